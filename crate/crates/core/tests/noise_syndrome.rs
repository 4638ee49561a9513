mod common;

use common::{single_edge_frequencies, table_one};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semion_core::bits::Mask;
use semion_core::lattice::{CodeLattice, Orientation};
use semion_core::noise::{p0_from_p_eff, p_eff_from_p0, sample_error, NoiseKind, NoiseModel, PauliFrame};
use semion_core::rng::{sample_rng, RngTrace};
use semion_core::syndrome::{kitaev_hex_syndrome, sample_syndrome, vertex_syndrome, x_components, z_plaquette_flips};

fn within_4_sigma(count: u64, n: u64, p: f64) -> bool {
    let mean = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - mean).abs() <= 4.0 * sigma
}

#[test]
fn pauli_rates_match_the_model() {
    let lat = CodeLattice::new(6).unwrap();
    for model in [NoiseModel::independent(0.1).unwrap(), NoiseModel::depolarizing(0.15).unwrap()] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut x, mut y, mut z, mut n) = (0u64, 0u64, 0u64, 0u64);
        for _ in 0..5000 {
            let f = sample_error(&model, &lat, &mut rng);
            for e in 0..lat.n_edges() {
                match (f.x.get(e), f.z.get(e)) {
                    (true, false) => x += 1,
                    (true, true) => y += 1,
                    (false, true) => z += 1,
                    _ => {}
                }
            }
            n += lat.n_edges() as u64;
        }
        assert!(within_4_sigma(x, n, model.p_x), "{model:?} x");
        assert!(within_4_sigma(y, n, model.p_y), "{model:?} y");
        assert!(within_4_sigma(z, n, model.p_z), "{model:?} z");
    }
}

#[test]
fn independent_flips_are_uncorrelated() {
    let lat = CodeLattice::new(5).unwrap();
    let model = NoiseModel::independent(0.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut bx, mut bz, mut n) = (0u64, 0u64, 0u64);
    for _ in 0..5000 {
        let f = sample_error(&model, &lat, &mut rng);
        bx += f.x.count_ones() as u64;
        bz += f.z.count_ones() as u64;
        n += lat.n_edges() as u64;
    }
    assert!(within_4_sigma(bx, n, 0.2));
    assert!(within_4_sigma(bz, n, 0.2));
}

#[test]
fn p_eff_conversions() {
    assert!((p_eff_from_p0(0.045) - 0.087975).abs() < 1e-12);
    for p in [0.0, 0.01, 0.048, 0.09, 0.5] {
        assert!((p_eff_from_p0(p0_from_p_eff(p)) - p).abs() < 1e-12);
    }
    let m = NoiseModel::with_p_eff(NoiseKind::Independent, 0.09).unwrap();
    assert!((m.p_eff() - 0.09).abs() < 1e-12);
    assert_eq!(NoiseKind::from_code(NoiseKind::Depolarizing.code()), Some(NoiseKind::Depolarizing));
    assert_eq!(NoiseKind::from_code(2), None);
}

#[test]
fn zero_rate_gives_identity() {
    let lat = CodeLattice::new(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for model in [NoiseModel::independent(0.0).unwrap(), NoiseModel::depolarizing(0.0).unwrap()] {
        for _ in 0..100 {
            let f = sample_error(&model, &lat, &mut rng);
            assert!(f.is_identity());
            assert!(sample_syndrome(&lat, &f, &mut rng).is_trivial());
        }
    }
}

#[test]
fn z_part_flips_the_two_adjacent_plaquettes() {
    let lat = CodeLattice::new(5).unwrap();
    for e in 0..lat.n_edges() {
        let flips = z_plaquette_flips(&lat, &Mask::from_indices(lat.n_edges(), [e]));
        let mut expected = lat.edge_plaquettes(e).to_vec();
        expected.sort();
        assert_eq!(flips.ones(), expected);
    }
    let star = lat.star_mask(7);
    assert!(z_plaquette_flips(&lat, &star).is_empty());
}

#[test]
fn vertex_syndrome_marks_string_endpoints() {
    let lat = CodeLattice::new(5).unwrap();
    for e in 0..lat.n_edges() {
        let s = vertex_syndrome(&lat, &Mask::from_indices(lat.n_edges(), [e]));
        let mut ends = lat.edge_ends(e).to_vec();
        ends.sort();
        assert_eq!(s.ones(), ends);
    }
    assert!(vertex_syndrome(&lat, &lat.hexagon_mask(3)).is_empty());
}

#[test]
fn single_edge_frequencies_match_table() {
    let n = 200_000;
    for o in [Orientation::A, Orientation::B, Orientation::C] {
        let (counts, _) = single_edge_frequencies(o, n, 40 + o as u64);
        let table = table_one(o);
        for (pattern, sixteenths) in &table {
            let c = counts.get(pattern).copied().unwrap_or(0);
            assert!(within_4_sigma(c, n, *sixteenths as f64 / 16.0), "{o:?} {pattern:?}: {c}");
        }
        assert!(counts.keys().all(|k| table.contains_key(k)), "{o:?} produced a pattern outside the table");
    }
}

#[test]
fn syndrome_sectors_have_even_parity() {
    for d in [4, 5, 7] {
        let lat = CodeLattice::new(d).unwrap();
        for (i, model) in [NoiseModel::independent(0.07).unwrap(), NoiseModel::depolarizing(0.12).unwrap()].iter().enumerate() {
            for index in 0..3000 {
                let mut rng = sample_rng(RngTrace { master_seed: 100 + i as u64, index });
                let f = sample_error(model, &lat, &mut rng);
                let s = sample_syndrome(&lat, &f, &mut rng);
                assert_eq!(s.vertex_bits.count_ones() % 2, 0);
                assert_eq!(s.plaquette_bits.count_ones() % 2, 0);
                assert_eq!(s.stabilizer_bits().len(), 3 * d * d);
            }
        }
    }
}

#[test]
fn sampling_is_a_function_of_the_trace() {
    let lat = CodeLattice::new(6).unwrap();
    let model = NoiseModel::depolarizing(0.1).unwrap();
    let run = |index| {
        let mut rng = sample_rng(RngTrace { master_seed: 9, index });
        let f = sample_error(&model, &lat, &mut rng);
        let s = sample_syndrome(&lat, &f, &mut rng);
        (f, s)
    };
    let forward: Vec<_> = (0..200).map(run).collect();
    let backward: Vec<_> = (0..200).rev().map(run).collect();
    for (a, b) in forward.iter().zip(backward.iter().rev()) {
        assert_eq!(a, b);
    }
}

#[test]
fn kitaev_mode_is_deterministic() {
    let lat = CodeLattice::new(5).unwrap();
    let mut f = PauliFrame::identity(lat.n_edges());
    f.x.set(4, true);
    f.z.set(9, true);
    let s = kitaev_hex_syndrome(&lat, &f);
    assert_eq!(s.vertex_bits, vertex_syndrome(&lat, &f.x));
    assert_eq!(s.plaquette_bits, z_plaquette_flips(&lat, &f.z));
    assert!(s.residual_zq.is_empty());
}

#[test]
fn components_partition_the_x_support() {
    let lat = CodeLattice::new(6).unwrap();
    let model = NoiseModel::independent(0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let f = sample_error(&model, &lat, &mut rng);
        let comps = x_components(&lat, &f.x);
        let mut union = Mask::zeros(lat.n_edges());
        for c in &comps {
            for &e in c {
                assert!(!union.get(e));
                union.set(e, true);
            }
        }
        assert_eq!(union, f.x);
    }
}

#[test]
fn fallback_is_rare_in_the_operating_range() {
    let lat = CodeLattice::new(7).unwrap();
    let model = NoiseModel::with_p_eff(NoiseKind::Independent, 0.12).unwrap();
    let n = 20_000;
    let mut fallback = 0;
    for index in 0..n {
        let mut rng = sample_rng(RngTrace { master_seed: 12, index });
        let f = sample_error(&model, &lat, &mut rng);
        if sample_syndrome(&lat, &f, &mut rng).flags.used_fallback {
            fallback += 1;
        }
    }
    let fraction = fallback as f64 / n as f64;
    println!("fallback fraction d=7 p_eff=0.12: {fraction}");
    assert!(fraction < 0.01);
}
