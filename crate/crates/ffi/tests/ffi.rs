use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use semion_core::dataset::{read_dataset, DatasetRecord, DatasetWriter, SyndromeImage};
use semion_core::mlp::{Mlp, MlpConfig};
use semion_core::noise::NoiseKind;
use semion_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(semion_last_error()).to_string_lossy().into_owned() }
}

fn c_path(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

#[test]
fn lattice_handle_lifecycle() {
    let mut lat = ptr::null_mut();
    unsafe {
        assert_eq!(semion_lattice_new(5, &mut lat), SemionStatus::Ok);
        assert_eq!(semion_lattice_distance(lat), 5);
        assert_eq!(semion_lattice_edges(lat), 75);
        assert_eq!(semion_lattice_vertices(lat), 50);
        assert_eq!(semion_lattice_plaquettes(lat), 25);
        semion_lattice_free(lat);
        semion_lattice_free(ptr::null_mut());
        assert_eq!(semion_lattice_edges(ptr::null()), 0);
    }
}

#[test]
fn invalid_arguments_set_status_and_message() {
    let mut lat = ptr::null_mut();
    unsafe {
        assert_eq!(semion_lattice_new(1, &mut lat), SemionStatus::InvalidArgument);
        assert!(lat.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(semion_lattice_new(4, ptr::null_mut()), SemionStatus::NullPointer);
        assert!(last_error().contains("out_lattice"));
        assert_eq!(semion_lattice_new(4, &mut lat), SemionStatus::Ok);
        assert_eq!(last_error(), "");

        let mut bits = [0u8; 47];
        let mut label = 0u8;
        let st = semion_sample(lat, SemionNoise::Independent, 0.05, SemionCode::Semion, SemionDecoder::Mwpm, 1, 0, bits.as_mut_ptr(), bits.len(), &mut label);
        assert_eq!(st, SemionStatus::BufferTooSmall);
        let mut bits = [0u8; 48];
        let st = semion_sample(lat, SemionNoise::Independent, 1.5, SemionCode::Semion, SemionDecoder::Mwpm, 1, 0, bits.as_mut_ptr(), bits.len(), &mut label);
        assert_eq!(st, SemionStatus::InvalidArgument);
        let st = semion_sample(ptr::null(), SemionNoise::Independent, 0.05, SemionCode::Semion, SemionDecoder::Mwpm, 1, 0, bits.as_mut_ptr(), 48, &mut label);
        assert_eq!(st, SemionStatus::NullPointer);
        semion_lattice_free(lat);
    }
}

#[test]
fn sampling_is_reproducible_and_matches_the_library() {
    let mut lat = ptr::null_mut();
    unsafe {
        assert_eq!(semion_lattice_new(4, &mut lat), SemionStatus::Ok);
        let core_lat = semion_core::lattice::CodeLattice::new(4).unwrap();
        let model = semion_core::noise::NoiseModel::with_p_eff(NoiseKind::Depolarizing, 0.1).unwrap();
        for index in 0..200 {
            let mut a = [0u8; 48];
            let mut b = [0u8; 48];
            let (mut la, mut lb) = (0u8, 0u8);
            for (buf, l) in [(&mut a, &mut la), (&mut b, &mut lb)] {
                let st = semion_sample(lat, SemionNoise::Depolarizing, 0.1, SemionCode::Semion, SemionDecoder::Simple, 9, index, buf.as_mut_ptr(), 48, l);
                assert_eq!(st, SemionStatus::Ok);
            }
            assert_eq!((a, la), (b, lb));
            let want = semion_core::decoders::decode_and_label(
                &core_lat,
                &model,
                semion_core::decoders::CodeKind::Semion,
                semion_core::decoders::DecoderKind::Simple,
                semion_core::algebra::DEFAULT_CAP,
                semion_core::rng::RngTrace { master_seed: 9, index },
            )
            .unwrap();
            assert_eq!(a.to_vec(), want.syndrome.stabilizer_bits());
            assert_eq!(la, want.label.value());
        }
        semion_lattice_free(lat);
    }
}

#[test]
fn logical_rate_at_zero_noise() {
    let mut p = -1.0;
    unsafe {
        assert_eq!(semion_logical_rate(4, SemionCode::Semion, SemionNoise::Independent, 0.0, SemionDecoder::Mwpm, 500, 1, &mut p), SemionStatus::Ok);
        assert_eq!(p, 0.0);
        assert_eq!(semion_logical_rate(4, SemionCode::Ktc, SemionNoise::Independent, 0.3, SemionDecoder::Mwpm, 500, 1, &mut p), SemionStatus::Ok);
        assert!(p > 0.0 && p < 1.0);
        assert_eq!(semion_logical_rate(0, SemionCode::Ktc, SemionNoise::Independent, 0.1, SemionDecoder::Mwpm, 5, 1, &mut p), SemionStatus::InvalidArgument);
    }
}

#[test]
fn image_placement() {
    let d = 4;
    let mut bits = vec![0u8; 3 * d * d];
    bits[0] = 1; // vertex 0
    bits[2 * d * d] = 1; // plaquette 0
    let mut cells = vec![9u8; 4 * d * d];
    unsafe {
        assert_eq!(semion_syndrome_image(d, bits.as_ptr(), bits.len(), cells.as_mut_ptr(), cells.len()), SemionStatus::Ok);
    }
    let img = SyndromeImage::from_cells(d, cells.clone()).unwrap();
    let (vi, vj) = semion_core::dataset::vertex_cell(d, 0);
    let (pi, pj) = semion_core::dataset::plaquette_cell(d, 0);
    assert_eq!(img.get(vi, vj), 1);
    assert_eq!(img.get(pi, pj), 1);
    assert_eq!(cells.iter().filter(|&&c| c == 1).count(), 2);
    unsafe {
        assert_eq!(semion_syndrome_image(d, bits.as_ptr(), bits.len() - 1, cells.as_mut_ptr(), cells.len()), SemionStatus::InvalidArgument);
        assert_eq!(semion_syndrome_image(d, bits.as_ptr(), bits.len(), cells.as_mut_ptr(), 10), SemionStatus::BufferTooSmall);
        bits[3] = 2;
        assert_eq!(semion_syndrome_image(d, bits.as_ptr(), bits.len(), cells.as_mut_ptr(), cells.len()), SemionStatus::InvalidArgument);
    }
}

#[test]
fn dataset_access() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.semd");
    let mut w = DatasetWriter::create(&file, 4, NoiseKind::Depolarizing, 0.07).unwrap();
    for k in 0..5u8 {
        let mut img = SyndromeImage::zeros(4);
        img.set(1, 1 + k as usize, 1);
        w.push(&DatasetRecord { image: img, label: k * 3 }).unwrap();
    }
    w.finish().unwrap();
    let (_, records) = read_dataset(&file).unwrap();
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(semion_dataset_open(c_path(&file).as_ptr(), &mut ds), SemionStatus::Ok);
        assert_eq!(semion_dataset_len(ds), 5);
        assert_eq!(semion_dataset_distance(ds), 4);
        assert_eq!(semion_dataset_p_eff(ds), 0.07);
        for (i, r) in records.iter().enumerate() {
            let mut cells = [0u8; 64];
            let mut label = 0;
            assert_eq!(semion_dataset_record(ds, i as u64, cells.as_mut_ptr(), 64, &mut label), SemionStatus::Ok);
            assert_eq!(&cells[..], r.image.cells());
            assert_eq!(label, r.label);
        }
        let mut cells = [0u8; 64];
        let mut label = 0;
        assert_eq!(semion_dataset_record(ds, 5, cells.as_mut_ptr(), 64, &mut label), SemionStatus::InvalidArgument);
        semion_dataset_free(ds);

        let mut ds = ptr::null_mut();
        let missing = dir.path().join("missing.semd");
        assert_eq!(semion_dataset_open(c_path(&missing).as_ptr(), &mut ds), SemionStatus::Io);
        assert!(last_error().contains("missing.semd"));
        std::fs::write(&missing, b"NOPE").unwrap();
        assert_eq!(semion_dataset_open(c_path(&missing).as_ptr(), &mut ds), SemionStatus::Format);
        assert_eq!(semion_dataset_open(ptr::null(), &mut ds), SemionStatus::NullPointer);
    }
}

#[test]
fn mlp_predictions_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.smlp");
    let mut c = MlpConfig::new(12, 2, 8);
    c.seed = 4;
    let net = Mlp::init(c).unwrap();
    net.save(&file).unwrap();
    let rows: Vec<Vec<u8>> = (0..7u32).map(|r| (0..12).map(|k| ((r * 5 + k) % 3 == 0) as u8).collect()).collect();
    let want = net.predict(semion_core::mlp::to_matrix(&rows, 12).unwrap().view()).unwrap();
    let flat: Vec<u8> = rows.concat();
    let mut got = vec![0u8; 7];
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(semion_mlp_load(c_path(&file).as_ptr(), &mut m), SemionStatus::Ok);
        assert_eq!(semion_mlp_input_dim(m), 12);
        assert_eq!(semion_mlp_predict(m, flat.as_ptr(), 7, got.as_mut_ptr()), SemionStatus::Ok);
        assert_eq!(semion_mlp_predict(m, ptr::null(), 0, ptr::null_mut()), SemionStatus::Ok);
        semion_mlp_free(m);
        let mut m = ptr::null_mut();
        assert_eq!(semion_mlp_load(c_path(&dir.path().join("none")).as_ptr(), &mut m), SemionStatus::Io);
    }
    assert_eq!(got, want);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(semion_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_interface_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/semion.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "semion_lattice_new",
        "semion_lattice_free",
        "semion_sample",
        "semion_logical_rate",
        "semion_syndrome_image",
        "semion_mlp_load",
        "semion_mlp_predict",
        "semion_dataset_open",
        "semion_dataset_record",
        "semion_last_error",
        "typedef struct SemionLattice SemionLattice",
        "SEMION_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
    // syntax check with the system C compiler when one is present
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("t.c");
    std::fs::write(
        &src,
        "#include \"semion.h\"\nint main(void) { SemionLattice *l = 0; return semion_lattice_new(4, &l) == SEMION_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    match std::process::Command::new("cc").arg("-fsyntax-only").arg("-I").arg(header.parent().unwrap()).arg(&src).output() {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(_) => eprintln!("no C compiler; header syntax not checked"),
    }
}
