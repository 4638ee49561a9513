//! Simple and minimum-weight perfect matching decoders, and the 16-way
//! logical class of a corrected error.

use std::fmt;

use mwmatching::{Matching, SENTINEL};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::Mask;
use crate::lattice::{CodeLattice, SiteKind};
use crate::noise::{sample_error, NoiseModel, PauliFrame};
use crate::rng::{sample_rng, RngTrace};
use crate::syndrome::{kitaev_hex_syndrome, sample_syndrome_with_cap, SyndromeSample};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("odd number of {0} excitations")]
    OddParity(&'static str),
    #[error("recovery leaves a nonzero syndrome")]
    UncorrectedSyndrome,
    #[error("matching left {0} excitations unpaired")]
    MatchingInfeasible(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Simple,
    Mwpm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Semion,
    /// Hexagonal Kitaev toric code: CSS syndromes on the same lattice.
    Ktc,
}

/// X part: string supports; Z part: Z corrections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    pub frame: PauliFrame,
}

/// Homology parities `(hX_H, hX_V, hZ_Hbar, hZ_Vbar)` packed as
/// `hX_H + 2 hX_V + 4 hZ_Hbar + 8 hZ_Vbar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassLabel(u8);

impl ClassLabel {
    pub const IDENTITY: ClassLabel = ClassLabel(0);

    pub fn new(value: u8) -> Option<Self> {
        (value < 16).then_some(ClassLabel(value))
    }

    pub fn from_bits(x_h: bool, x_v: bool, z_hbar: bool, z_vbar: bool) -> Self {
        ClassLabel(x_h as u8 | (x_v as u8) << 1 | (z_hbar as u8) << 2 | (z_vbar as u8) << 3)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn bits(self) -> [bool; 4] {
        [0, 1, 2, 3].map(|i| (self.0 >> i) & 1 == 1)
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// Class of the product of two logical operators.
    pub fn compose(self, other: ClassLabel) -> ClassLabel {
        ClassLabel(self.0 ^ other.0)
    }

    /// Pauli names on the two logical qubits. The horizontal string
    /// operator carries a Z wrap, so an X wrap on H also toggles qubit 2's Z.
    pub fn pauli_names(self) -> (char, char) {
        let [x_h, x_v, z_hbar, z_vbar] = self.bits();
        let name = |x: bool, z: bool| match (x, z) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        };
        (name(x_h, z_vbar), name(x_v, z_hbar ^ x_h))
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.pauli_names();
        write!(f, "{a}{b}")
    }
}

fn excited_sites(bits: &Mask, what: &'static str) -> Result<Vec<usize>, DecodeError> {
    let sites = bits.ones();
    if sites.len() % 2 == 1 {
        return Err(DecodeError::OddParity(what));
    }
    Ok(sites)
}

fn xor_path(lat: &CodeLattice, kind: SiteKind, a: usize, b: usize, into: &mut Mask) {
    for e in lat.shortest_path(kind, a, b) {
        into.toggle(e);
    }
}

/// Move every excitation to vertex 1 / plaquette 1 along shortest paths.
pub fn simple_decode(lat: &CodeLattice, sample: &SyndromeSample) -> Result<Recovery, DecodeError> {
    let vertices = excited_sites(&sample.vertex_bits, "vertex")?;
    let plaquettes = excited_sites(&sample.plaquette_bits, "plaquette")?;
    let mut frame = PauliFrame::identity(lat.n_edges());
    for v in vertices {
        xor_path(lat, SiteKind::Primal, v, 0, &mut frame.x);
    }
    for p in plaquettes {
        xor_path(lat, SiteKind::Dual, p, 0, &mut frame.z);
    }
    Ok(Recovery { frame })
}

/// Minimum total distance pairing of `sites` (exact blossom matching).
pub fn min_weight_pairs(lat: &CodeLattice, kind: SiteKind, sites: &[usize]) -> Result<Vec<(usize, usize)>, DecodeError> {
    let k = sites.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == 2 {
        return Ok(vec![(sites[0], sites[1])]);
    }
    let mut far = 0;
    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            far = far.max(lat.distance(kind, sites[i], sites[j]));
        }
    }
    let big = far as i32 + 1;
    for i in 0..k {
        for j in i + 1..k {
            let w = big - lat.distance(kind, sites[i], sites[j]) as i32;
            edges.push((i, j, 2 * w));
        }
    }
    let mate = Matching::new(edges).max_cardinality().solve();
    let unpaired = mate.iter().filter(|&&m| m == SENTINEL).count();
    if unpaired > 0 || mate.len() != k {
        return Err(DecodeError::MatchingInfeasible(unpaired.max(k - mate.len().min(k))));
    }
    Ok((0..k).filter(|&i| mate[i] > i).map(|i| (sites[i], sites[mate[i]])).collect())
}

pub fn matched_weight(lat: &CodeLattice, kind: SiteKind, pairs: &[(usize, usize)]) -> usize {
    pairs.iter().map(|&(a, b)| lat.distance(kind, a, b)).sum()
}

pub fn mwpm_decode(lat: &CodeLattice, sample: &SyndromeSample) -> Result<Recovery, DecodeError> {
    let vertices = excited_sites(&sample.vertex_bits, "vertex")?;
    let plaquettes = excited_sites(&sample.plaquette_bits, "plaquette")?;
    let mut frame = PauliFrame::identity(lat.n_edges());
    for (a, b) in min_weight_pairs(lat, SiteKind::Primal, &vertices)? {
        xor_path(lat, SiteKind::Primal, a, b, &mut frame.x);
    }
    for (a, b) in min_weight_pairs(lat, SiteKind::Dual, &plaquettes)? {
        xor_path(lat, SiteKind::Dual, a, b, &mut frame.z);
    }
    Ok(Recovery { frame })
}

pub fn decode(lat: &CodeLattice, decoder: DecoderKind, sample: &SyndromeSample) -> Result<Recovery, DecodeError> {
    match decoder {
        DecoderKind::Simple => simple_decode(lat, sample),
        DecoderKind::Mwpm => mwpm_decode(lat, sample),
    }
}

/// Homology class of `error · residual · recovery`, which must be
/// syndrome free.
pub fn logical_class(
    lat: &CodeLattice,
    error: &PauliFrame,
    residual_zq: &Mask,
    recovery: &Recovery,
) -> Result<ClassLabel, DecodeError> {
    let net_x = error.x.xor(&recovery.frame.x);
    let mut net_z = error.z.xor(&recovery.frame.z);
    net_z.xor_assign(residual_zq);
    let vertex_clean = (0..lat.n_vertices()).all(|v| lat.vertex_edges(v).iter().filter(|&&e| net_x.get(e)).count() % 2 == 0);
    let plaquette_clean = (0..lat.n_plaquettes()).all(|p| lat.hexagon(p).iter().filter(|&&e| net_z.get(e)).count() % 2 == 0);
    if !vertex_clean || !plaquette_clean {
        return Err(DecodeError::UncorrectedSyndrome);
    }
    let cuts = lat.cuts();
    Ok(ClassLabel::from_bits(
        net_x.overlap_parity(&cuts.v_bar),
        net_x.overlap_parity(&cuts.h_bar),
        net_z.overlap_parity(&cuts.v),
        net_z.overlap_parity(&cuts.h),
    ))
}

/// One end-to-end record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSample {
    pub error: PauliFrame,
    pub syndrome: SyndromeSample,
    pub label: ClassLabel,
}

/// Sample an error and its syndrome from the stream `trace`.
pub fn sample_record(
    lat: &CodeLattice,
    model: &NoiseModel,
    code: CodeKind,
    cap: usize,
    trace: RngTrace,
) -> (PauliFrame, SyndromeSample) {
    let mut rng = sample_rng(trace);
    let error = sample_error(model, lat, &mut rng);
    let mut syndrome = match code {
        CodeKind::Semion => sample_syndrome_with_cap(lat, &error, cap, &mut rng),
        CodeKind::Ktc => kitaev_hex_syndrome(lat, &error),
    };
    syndrome.rng_trace = Some(trace);
    (error, syndrome)
}

/// Sample, decode and label one record.
pub fn decode_and_label(
    lat: &CodeLattice,
    model: &NoiseModel,
    code: CodeKind,
    decoder: DecoderKind,
    cap: usize,
    trace: RngTrace,
) -> Result<LabeledSample, DecodeError> {
    let (error, syndrome) = sample_record(lat, model, code, cap, trace);
    let recovery = decode(lat, decoder, &syndrome)?;
    let label = logical_class(lat, &error, &syndrome.residual_zq, &recovery)?;
    Ok(LabeledSample { error, syndrome, label })
}
