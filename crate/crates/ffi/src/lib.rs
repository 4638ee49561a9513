//! C interface to the semion-code workbench.
//!
//! Every fallible call returns a [`SemionStatus`]; on failure the message is
//! available from [`semion_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use semion_core::algebra::DEFAULT_CAP;
use semion_core::bits::Mask;
use semion_core::dataset::{read_dataset, syndrome_to_image, DatasetHeader, DatasetRecord};
use semion_core::decoders::{decode_and_label, CodeKind, DecoderKind};
use semion_core::experiments::{estimate_rate, RateSpec};
use semion_core::lattice::CodeLattice;
use semion_core::mlp::{to_matrix, Mlp};
use semion_core::noise::{NoiseKind, NoiseModel};
use semion_core::rng::RngTrace;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemionStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Io = 4,
    Format = 5,
    Decode = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemionNoise {
    Independent = 0,
    Depolarizing = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemionCode {
    Semion = 0,
    Ktc = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemionDecoder {
    Simple = 0,
    Mwpm = 1,
}

impl From<SemionNoise> for NoiseKind {
    fn from(n: SemionNoise) -> Self {
        match n {
            SemionNoise::Independent => NoiseKind::Independent,
            SemionNoise::Depolarizing => NoiseKind::Depolarizing,
        }
    }
}

impl From<SemionCode> for CodeKind {
    fn from(c: SemionCode) -> Self {
        match c {
            SemionCode::Semion => CodeKind::Semion,
            SemionCode::Ktc => CodeKind::Ktc,
        }
    }
}

impl From<SemionDecoder> for DecoderKind {
    fn from(d: SemionDecoder) -> Self {
        match d {
            SemionDecoder::Simple => DecoderKind::Simple,
            SemionDecoder::Mwpm => DecoderKind::Mwpm,
        }
    }
}

/// Opaque lattice handle.
pub struct SemionLattice(CodeLattice);

/// Opaque trained network.
pub struct SemionMlp(Mlp);

/// Opaque in-memory dataset.
pub struct SemionDataset {
    header: DatasetHeader,
    records: Vec<DatasetRecord>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let c = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(SemionStatus, String);

fn fail<T>(status: SemionStatus, msg: impl ToString) -> Result<T, Fail> {
    Err(Fail(status, msg.to_string()))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SemionStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SemionStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SemionStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().map_or_else(|| fail(SemionStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().map_or_else(|| fail(SemionStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(SemionStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len < need {
        return fail(SemionStatus::BufferTooSmall, format!("{what} holds {len}, need {need}"));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return fail(SemionStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn path(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return fail(SemionStatus::NullPointer, "path is null");
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => fail(SemionStatus::InvalidArgument, "path is not UTF-8"),
    }
}

fn model(noise: SemionNoise, p_eff: f64) -> Result<NoiseModel, Fail> {
    NoiseModel::with_p_eff(noise.into(), p_eff).or_else(|e| fail(SemionStatus::InvalidArgument, e))
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn semion_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn semion_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semion_lattice_new(d: usize, out_lattice: *mut *mut SemionLattice) -> SemionStatus {
    guard(|| {
        let slot = out(out_lattice, "out_lattice")?;
        let lat = CodeLattice::new(d).or_else(|e| fail(SemionStatus::InvalidArgument, e))?;
        *slot = Box::into_raw(Box::new(SemionLattice(lat)));
        Ok(())
    })
}

/// # Safety
/// `lattice` must come from `semion_lattice_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn semion_lattice_free(lattice: *mut SemionLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Distance, edge, vertex and plaquette counts; zero for a null handle.
///
/// # Safety
/// `lattice` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semion_lattice_distance(lattice: *const SemionLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.d())
}

/// # Safety
/// `lattice` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semion_lattice_edges(lattice: *const SemionLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.n_edges())
}

/// # Safety
/// `lattice` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semion_lattice_vertices(lattice: *const SemionLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.n_vertices())
}

/// # Safety
/// `lattice` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semion_lattice_plaquettes(lattice: *const SemionLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.n_plaquettes())
}

/// Sample record `index` of stream `seed`: stabilizer bits (vertices, then
/// plaquettes; `bits_len >= 3 d²`) and the logical class left by `decoder`.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn semion_sample(
    lattice: *const SemionLattice,
    noise: SemionNoise,
    p_eff: f64,
    code: SemionCode,
    decoder: SemionDecoder,
    seed: u64,
    index: u64,
    bits: *mut u8,
    bits_len: usize,
    label: *mut u8,
) -> SemionStatus {
    guard(|| {
        let lat = &deref(lattice, "lattice")?.0;
        let m = model(noise, p_eff)?;
        let n = lat.n_vertices() + lat.n_plaquettes();
        let dst = slice_mut(bits, bits_len, n, "bits")?;
        let label = out(label, "label")?;
        let trace = RngTrace { master_seed: seed, index };
        let s = decode_and_label(lat, &m, code.into(), decoder.into(), DEFAULT_CAP, trace)
            .or_else(|e| fail(SemionStatus::Decode, e))?;
        dst.copy_from_slice(&s.syndrome.stabilizer_bits());
        *label = s.label.value();
        Ok(())
    })
}

/// Logical error rate over `n` samples of stream `seed`.
///
/// # Safety
/// `p_bar` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semion_logical_rate(
    d: usize,
    code: SemionCode,
    noise: SemionNoise,
    p_eff: f64,
    decoder: SemionDecoder,
    n: u64,
    seed: u64,
    p_bar: *mut f64,
) -> SemionStatus {
    guard(|| {
        let slot = out(p_bar, "p_bar")?;
        CodeLattice::new(d).or_else(|e| fail(SemionStatus::InvalidArgument, e))?;
        model(noise, p_eff)?;
        let spec = RateSpec {
            d,
            code: code.into(),
            noise: noise.into(),
            p_eff,
            decoder: decoder.into(),
            n,
            master_seed: seed,
            cap: DEFAULT_CAP,
        };
        *slot = estimate_rate(&spec).or_else(|e| fail(SemionStatus::Decode, e))?.p_bar;
        Ok(())
    })
}

/// Place stabilizer bits on the 2d × 2d image, row-major; `cells_len >= 4 d²`.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn semion_syndrome_image(d: usize, bits: *const u8, bits_len: usize, cells: *mut u8, cells_len: usize) -> SemionStatus {
    guard(|| {
        if d < 2 {
            return fail(SemionStatus::InvalidArgument, "d must be at least 2");
        }
        let nv = 2 * d * d;
        let src = slice(bits, bits_len, "bits")?;
        if src.len() != 3 * d * d {
            return fail(SemionStatus::InvalidArgument, format!("expected {} bits, got {}", 3 * d * d, src.len()));
        }
        if src.iter().any(|&b| b > 1) {
            return fail(SemionStatus::InvalidArgument, "bits must be 0 or 1");
        }
        let dst = slice_mut(cells, cells_len, 4 * d * d, "cells")?;
        let v = Mask::from_indices(nv, (0..nv).filter(|&i| src[i] == 1));
        let p = Mask::from_indices(d * d, (0..d * d).filter(|&i| src[nv + i] == 1));
        let img = syndrome_to_image(d, &v, &p).or_else(|e| fail(SemionStatus::InvalidArgument, e))?;
        dst.copy_from_slice(img.cells());
        Ok(())
    })
}

/// # Safety
/// `file` must be a NUL-terminated path and `out_mlp` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semion_mlp_load(file: *const c_char, out_mlp: *mut *mut SemionMlp) -> SemionStatus {
    guard(|| {
        let slot = out(out_mlp, "out_mlp")?;
        let p = path(file)?;
        let net = Mlp::load(&p).or_else(|e| {
            let status = if matches!(e, semion_core::mlp::MlpError::Io(_)) { SemionStatus::Io } else { SemionStatus::Format };
            fail(status, format!("{}: {e}", p.display()))
        })?;
        *slot = Box::into_raw(Box::new(SemionMlp(net)));
        Ok(())
    })
}

/// # Safety
/// `mlp` must come from `semion_mlp_load` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn semion_mlp_free(mlp: *mut SemionMlp) {
    if !mlp.is_null() {
        drop(Box::from_raw(mlp));
    }
}

/// Input width; zero for a null handle.
///
/// # Safety
/// `mlp` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semion_mlp_input_dim(mlp: *const SemionMlp) -> usize {
    mlp.as_ref().map_or(0, |m| m.0.config().input_dim)
}

/// Most likely class for each of `rows` inputs stored row-major in `bits`.
///
/// # Safety
/// `bits` must hold `rows * input_dim` bytes and `labels` `rows` bytes.
#[no_mangle]
pub unsafe extern "C" fn semion_mlp_predict(mlp: *const SemionMlp, bits: *const u8, rows: usize, labels: *mut u8) -> SemionStatus {
    guard(|| {
        let net = &deref(mlp, "mlp")?.0;
        let width = net.config().input_dim;
        let src = slice(bits, rows * width, "bits")?;
        let dst = slice_mut(labels, rows, rows, "labels")?;
        if rows == 0 {
            return Ok(());
        }
        let inputs: Vec<Vec<u8>> = src.chunks(width).map(|c| c.to_vec()).collect();
        let x = to_matrix(&inputs, width).or_else(|e| fail(SemionStatus::InvalidArgument, e))?;
        let pred = net.predict(x.view()).or_else(|e| fail(SemionStatus::InvalidArgument, e))?;
        dst.copy_from_slice(&pred);
        Ok(())
    })
}

/// Read a whole SEMD file.
///
/// # Safety
/// `file` must be a NUL-terminated path and `out_dataset` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semion_dataset_open(file: *const c_char, out_dataset: *mut *mut SemionDataset) -> SemionStatus {
    guard(|| {
        let slot = out(out_dataset, "out_dataset")?;
        let p = path(file)?;
        let (header, records) = read_dataset(&p).or_else(|e| {
            let status = if matches!(e, semion_core::dataset::DatasetError::Io(_)) { SemionStatus::Io } else { SemionStatus::Format };
            fail(status, format!("{}: {e}", p.display()))
        })?;
        *slot = Box::into_raw(Box::new(SemionDataset { header, records }));
        Ok(())
    })
}

/// # Safety
/// `dataset` must come from `semion_dataset_open` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn semion_dataset_free(dataset: *mut SemionDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Record count; zero for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semion_dataset_len(dataset: *const SemionDataset) -> u64 {
    dataset.as_ref().map_or(0, |d| d.records.len() as u64)
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semion_dataset_distance(dataset: *const SemionDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.header.d as usize)
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semion_dataset_p_eff(dataset: *const SemionDataset) -> f64 {
    dataset.as_ref().map_or(f64::NAN, |d| d.header.p_eff)
}

/// Cells (row-major, `4 d²`) and label of record `index`.
///
/// # Safety
/// `cells` must hold `cells_len` bytes and `label` must be valid.
#[no_mangle]
pub unsafe extern "C" fn semion_dataset_record(
    dataset: *const SemionDataset,
    index: u64,
    cells: *mut u8,
    cells_len: usize,
    label: *mut u8,
) -> SemionStatus {
    guard(|| {
        let ds = deref(dataset, "dataset")?;
        let rec = match ds.records.get(index as usize) {
            Some(r) => r,
            None => return fail(SemionStatus::InvalidArgument, format!("record {index} of {}", ds.records.len())),
        };
        let src = rec.image.cells();
        let dst = slice_mut(cells, cells_len, src.len(), "cells")?;
        let label = out(label, "label")?;
        dst.copy_from_slice(src);
        *label = rec.label;
        Ok(())
    })
}
