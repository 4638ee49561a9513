//! Pauli noise models and Pauli frames.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::Mask;
use crate::lattice::CodeLattice;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("error rate {0} outside [0, 1)")]
    InvalidRate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// Independent bit flips and phase flips with equal rate p0.
    Independent,
    /// X, Y and Z each with rate p_eff / 3.
    Depolarizing,
}

impl NoiseKind {
    pub fn code(self) -> u8 {
        match self {
            NoiseKind::Independent => 0,
            NoiseKind::Depolarizing => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(NoiseKind::Independent),
            1 => Some(NoiseKind::Depolarizing),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

fn check_rate(p: f64) -> Result<(), NoiseError> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(NoiseError::InvalidRate(p))
    }
}

impl NoiseModel {
    pub fn independent(p0: f64) -> Result<Self, NoiseError> {
        check_rate(p0)?;
        Ok(NoiseModel { kind: NoiseKind::Independent, p_x: p0 - p0 * p0, p_y: p0 * p0, p_z: p0 - p0 * p0 })
    }

    pub fn depolarizing(p_eff: f64) -> Result<Self, NoiseError> {
        check_rate(p_eff)?;
        let q = p_eff / 3.0;
        Ok(NoiseModel { kind: NoiseKind::Depolarizing, p_x: q, p_y: q, p_z: q })
    }

    /// Build a model of the given kind whose total error rate is `p_eff`.
    pub fn with_p_eff(kind: NoiseKind, p_eff: f64) -> Result<Self, NoiseError> {
        check_rate(p_eff)?;
        match kind {
            NoiseKind::Independent => Self::independent(p0_from_p_eff(p_eff)),
            NoiseKind::Depolarizing => Self::depolarizing(p_eff),
        }
    }

    pub fn p(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }

    pub fn p_eff(&self) -> f64 {
        self.p()
    }

    /// The single-flip rate of the independent model.
    pub fn p0(&self) -> Option<f64> {
        match self.kind {
            NoiseKind::Independent => Some(self.p_x + self.p_y),
            NoiseKind::Depolarizing => None,
        }
    }
}

pub fn p_eff_from_p0(p0: f64) -> f64 {
    2.0 * p0 - p0 * p0
}

pub fn p0_from_p_eff(p_eff: f64) -> f64 {
    1.0 - (1.0 - p_eff).sqrt()
}

/// X and Z supports of a Pauli operator; Y sets both bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    pub x: Mask,
    pub z: Mask,
}

impl PauliFrame {
    pub fn identity(n_edges: usize) -> Self {
        PauliFrame { x: Mask::zeros(n_edges), z: Mask::zeros(n_edges) }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_empty() && self.z.is_empty()
    }

    pub fn compose(&self, other: &PauliFrame) -> PauliFrame {
        PauliFrame { x: self.x.xor(&other.x), z: self.z.xor(&other.z) }
    }
}

/// One uniform draw per edge: X below p_X, Y below p_X + p_Y, Z below p.
pub fn sample_error<R: Rng>(model: &NoiseModel, lat: &CodeLattice, rng: &mut R) -> PauliFrame {
    let n = lat.n_edges();
    let mut frame = PauliFrame::identity(n);
    let (tx, ty, tz) = (model.p_x, model.p_x + model.p_y, model.p());
    for e in 0..n {
        let u: f64 = rng.gen();
        if u < tx {
            frame.x.set(e, true);
        } else if u < ty {
            frame.x.set(e, true);
            frame.z.set(e, true);
        } else if u < tz {
            frame.z.set(e, true);
        }
    }
    frame
}
