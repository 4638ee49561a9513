//! Exact operator algebra on small supports.
//!
//! Phases are kept as Z4 exponents (`phase = i^g`). Operators are signed
//! permutations of the computational basis: `O|j> = i^{g(j)} |j ^ x>`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::{CodeLattice, EdgeId, PlaquetteId, VertexId};

/// Default bound on |Conn| for exact evaluation (2^22 table entries).
pub const DEFAULT_CAP: usize = 22;

/// Hard bound for dense joint-support checks.
pub const DENSE_LIMIT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("support of size {size} exceeds the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("string-phase constraints are infeasible")]
    InfeasibleConstraints,
    #[error("invalid phase table: {0}")]
    InvalidTable(String),
}

/// A Z4-valued function on bitstrings over an ordered edge support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalPhaseTable {
    support: Vec<EdgeId>,
    exponents: Vec<u8>,
}

impl DiagonalPhaseTable {
    pub fn new(support: Vec<EdgeId>, exponents: Vec<u8>) -> Result<Self, AlgebraError> {
        if support.len() > 63 {
            return Err(AlgebraError::InvalidTable("support longer than 63 edges".into()));
        }
        if exponents.len() != 1usize << support.len() {
            return Err(AlgebraError::InvalidTable(format!(
                "expected {} entries, got {}",
                1usize << support.len(),
                exponents.len()
            )));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() {
            return Err(AlgebraError::InvalidTable("duplicate edge in support".into()));
        }
        if exponents.iter().any(|&g| g > 3) {
            return Err(AlgebraError::InvalidTable("exponent outside Z4".into()));
        }
        Ok(DiagonalPhaseTable { support, exponents })
    }

    pub fn identity(support: Vec<EdgeId>) -> Self {
        let n = support.len();
        DiagonalPhaseTable { support, exponents: vec![0; 1 << n] }
    }

    pub fn support(&self) -> &[EdgeId] {
        &self.support
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn exponent(&self, j: usize) -> u8 {
        self.exponents[j]
    }

    pub fn phase(&self, j: usize) -> Complex64 {
        i_pow(self.exponents[j])
    }
}

pub fn i_pow(g: u8) -> Complex64 {
    match g & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `O|j> = i^{phases(j)} |j ^ x_mask>` on an ordered edge support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutationOp {
    x_mask: u64,
    phases: DiagonalPhaseTable,
}

impl SignedPermutationOp {
    pub fn new(x_mask: u64, phases: DiagonalPhaseTable) -> Result<Self, AlgebraError> {
        if x_mask >> phases.support.len() != 0 {
            return Err(AlgebraError::InvalidTable("x mask outside support".into()));
        }
        Ok(SignedPermutationOp { x_mask, phases })
    }

    pub fn support(&self) -> &[EdgeId] {
        &self.phases.support
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn phases(&self) -> &DiagonalPhaseTable {
        &self.phases
    }

    /// Edges flipped by the operator.
    pub fn x_edges(&self) -> Vec<EdgeId> {
        self.support().iter().enumerate().filter(|(i, _)| (self.x_mask >> i) & 1 == 1).map(|(_, &e)| e).collect()
    }

    pub fn apply(&self, j: u64) -> (u64, u8) {
        (j ^ self.x_mask, self.phases.exponents[j as usize])
    }
}

fn bit(x: usize, label: usize) -> i32 {
    ((x >> (label - 1)) & 1) as i32
}

/// Exponent of the hexagon sign factors `(-1)^{n-_{k-1} n+_k}`, cyclic in k.
fn hexagon_sign_exponent(x: usize) -> u8 {
    let mut g = 0;
    for k in 1..=6 {
        let prev = if k == 1 { 6 } else { k - 1 };
        g += 2 * bit(x, prev) * (1 - bit(x, k));
    }
    g.rem_euclid(4) as u8
}

/// Exponent of the product of the six vertex phases `beta_v`, with bit `i`
/// of `x` the occupation `n-` of support position `i + 1`.
fn beta_exponent(x: usize) -> u8 {
    let n = |i| bit(x, i);
    let m = |i| 1 - bit(x, i);
    let g = n(12) * (n(1) * n(6) - m(1) * m(6))
        + n(7) * (m(1) * m(2) - n(1) * n(2))
        + m(8) * (n(2) * m(3) - m(2) * n(3))
        + n(9) * (n(3) * n(4) - m(3) * m(4))
        + n(10) * (m(4) * m(5) - n(4) * n(5))
        + m(11) * (n(5) * m(6) - m(5) * n(6));
    g.rem_euclid(4) as u8
}

struct LocalTables {
    beta: Vec<u8>,
    naive: Vec<u8>,
    full: Vec<u8>,
}

fn local_tables() -> &'static LocalTables {
    static TABLES: OnceLock<LocalTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let beta: Vec<u8> = (0..4096).map(beta_exponent).collect();
        let naive: Vec<u8> = (0..4096).map(hexagon_sign_exponent).collect();
        let full = beta.iter().zip(&naive).map(|(a, b)| (a + b) & 3).collect();
        LocalTables { beta, naive, full }
    })
}

/// Full plaquette phase exponent over the 12 local support bits.
pub fn plaquette_phase_exponent(local: usize) -> u8 {
    local_tables().full[local]
}

pub fn beta_product(lat: &CodeLattice, p: PlaquetteId) -> DiagonalPhaseTable {
    DiagonalPhaseTable { support: lat.support(p).to_vec(), exponents: local_tables().beta.clone() }
}

pub fn plaquette_op(lat: &CodeLattice, p: PlaquetteId) -> SignedPermutationOp {
    let phases = DiagonalPhaseTable { support: lat.support(p).to_vec(), exponents: local_tables().full.clone() };
    SignedPermutationOp { x_mask: 0x3f, phases }
}

/// The plaquette operator without the vertex phases.
pub fn naive_plaquette_op(lat: &CodeLattice, p: PlaquetteId) -> SignedPermutationOp {
    let phases = DiagonalPhaseTable { support: lat.support(p).to_vec(), exponents: local_tables().naive.clone() };
    SignedPermutationOp { x_mask: 0x3f, phases }
}

/// `Q_v = Z_i Z_j Z_k`.
pub fn vertex_op(lat: &CodeLattice, v: VertexId) -> SignedPermutationOp {
    let support = lat.vertex_edges(v).to_vec();
    let exponents = (0..8u32).map(|x| ((2 * x.count_ones()) & 3) as u8).collect();
    SignedPermutationOp { x_mask: 0, phases: DiagonalPhaseTable { support, exponents } }
}

/// Union of supports in ascending edge order.
pub fn joint_support(ops: &[&SignedPermutationOp]) -> Vec<EdgeId> {
    let mut all: Vec<EdgeId> = ops.iter().flat_map(|o| o.support().iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// An operator re-expressed on a larger ordered support.
struct Embedded<'a> {
    op: &'a SignedPermutationOp,
    positions: Vec<u32>,
    x_joint: u64,
}

impl<'a> Embedded<'a> {
    fn new(op: &'a SignedPermutationOp, joint: &[EdgeId]) -> Self {
        let positions: Vec<u32> = op
            .support()
            .iter()
            .map(|e| joint.binary_search(e).expect("edge in joint support") as u32)
            .collect();
        let x_joint = positions
            .iter()
            .enumerate()
            .filter(|(i, _)| (op.x_mask >> i) & 1 == 1)
            .fold(0u64, |acc, (_, &p)| acc | (1 << p));
        Embedded { op, positions, x_joint }
    }

    #[inline]
    fn apply(&self, j: u64) -> (u64, u8) {
        let mut local = 0usize;
        for (i, &p) in self.positions.iter().enumerate() {
            local |= (((j >> p) & 1) as usize) << i;
        }
        (j ^ self.x_joint, self.op.phases.exponents[local])
    }
}

fn check_dense(n: usize) -> Result<(), AlgebraError> {
    if n > DENSE_LIMIT {
        Err(AlgebraError::CapExceeded { size: n, cap: DENSE_LIMIT })
    } else {
        Ok(())
    }
}

/// `<j ^ x| O |j> = conj(<j| O |j ^ x>)` for every basis state.
pub fn is_hermitian(op: &SignedPermutationOp) -> bool {
    let g = &op.phases.exponents;
    (0..g.len()).all(|j| (g[j] + g[j ^ op.x_mask as usize]) & 3 == 0)
}

/// `O·O = 1`, evaluated by composing the operator with itself.
pub fn squares_to_identity(op: &SignedPermutationOp) -> bool {
    (0..1u64 << op.support().len()).all(|j| {
        let (j1, g1) = op.apply(j);
        let (j2, g2) = op.apply(j1);
        j2 == j && (g1 + g2) & 3 == 0
    })
}

/// Exact commutator test on the joint support.
pub fn commutes(a: &SignedPermutationOp, b: &SignedPermutationOp) -> Result<bool, AlgebraError> {
    let joint = joint_support(&[a, b]);
    check_dense(joint.len())?;
    let (ea, eb) = (Embedded::new(a, &joint), Embedded::new(b, &joint));
    Ok((0..1u64 << joint.len()).all(|j| {
        let (j1, g1) = eb.apply(j);
        let (_, g2) = ea.apply(j1);
        let (k1, h1) = ea.apply(j);
        let (_, h2) = eb.apply(k1);
        (g1 + g2 + 4 - ((h1 + h2) & 3)) & 3 == 0
    }))
}

/// Edges incident to any vertex touched by `edges`, ascending.
pub fn conn_support(lat: &CodeLattice, edges: &[EdgeId]) -> Vec<EdgeId> {
    let mut conn: Vec<EdgeId> = edges
        .iter()
        .flat_map(|&e| lat.edge_ends(e))
        .flat_map(|v| lat.vertex_edges(v))
        .collect();
    conn.sort_unstable();
    conn.dedup();
    conn
}

/// Precomputed constraint data for one X-string support.
struct StringSystem {
    conn: Vec<EdgeId>,
    x_local: u64,
    plaquettes: Vec<PlaquetteId>,
    /// Per plaquette: hexagon ∩ Conn as a local mask.
    flips: Vec<u64>,
    /// Per plaquette: Conn positions of its support bits.
    positions: Vec<Vec<u32>>,
    /// Per plaquette: phase change under the string, indexed by gathered bits.
    deltas: Vec<Vec<u8>>,
}

impl StringSystem {
    fn new(lat: &CodeLattice, x_support: &[EdgeId], cap: usize) -> Result<Self, AlgebraError> {
        let mut xs = x_support.to_vec();
        xs.sort_unstable();
        xs.dedup();
        let conn = conn_support(lat, &xs);
        if conn.len() > cap.min(DENSE_LIMIT) {
            return Err(AlgebraError::CapExceeded { size: conn.len(), cap: cap.min(DENSE_LIMIT) });
        }
        let local = |e: EdgeId| conn.binary_search(&e).ok();
        let x_local = xs.iter().fold(0u64, |acc, &e| acc | 1 << local(e).expect("string edge in Conn"));

        let mut plaquettes: Vec<PlaquetteId> = conn.iter().flat_map(|&e| lat.edge_plaquettes(e)).collect();
        plaquettes.sort_unstable();
        plaquettes.dedup();

        let full = &local_tables().full;
        let mut flips = Vec::with_capacity(plaquettes.len());
        let mut positions = Vec::with_capacity(plaquettes.len());
        let mut deltas = Vec::with_capacity(plaquettes.len());
        for &p in &plaquettes {
            let sup = lat.support(p);
            let flip = sup[..6].iter().filter_map(|&e| local(e)).fold(0u64, |acc, i| acc | 1 << i);
            // support position -> conn position for support edges inside Conn
            let inside: Vec<(usize, u32)> =
                sup.iter().enumerate().filter_map(|(k, &e)| local(e).map(|i| (k, i as u32))).collect();
            let pos: Vec<u32> = inside.iter().map(|&(_, i)| i).collect();
            let string_bits: usize = inside
                .iter()
                .filter(|&&(_, i)| (x_local >> i) & 1 == 1)
                .fold(0, |acc, &(k, _)| acc | 1 << k);
            let table: Vec<u8> = (0..1usize << inside.len())
                .map(|g| {
                    let mut sup_bits = 0usize;
                    for (b, &(k, _)) in inside.iter().enumerate() {
                        sup_bits |= ((g >> b) & 1) << k;
                    }
                    (full[sup_bits ^ string_bits] + 4 - full[sup_bits]) & 3
                })
                .collect();
            flips.push(flip);
            positions.push(pos);
            deltas.push(table);
        }
        Ok(StringSystem { conn, x_local, plaquettes, flips, positions, deltas })
    }

    #[inline]
    fn delta(&self, gen: usize, j: u64) -> u8 {
        let mut g = 0usize;
        for (b, &p) in self.positions[gen].iter().enumerate() {
            g |= (((j >> p) & 1) as usize) << b;
        }
        self.deltas[gen][g]
    }

    /// Solve for `g` with `g(j ^ x) = -g(j)` and, for every plaquette,
    /// `g(j ^ t_p) = g(j) + b_p(j ^ x) - b_p(j)`.
    fn solve(&self) -> Result<Vec<u8>, AlgebraError> {
        const UNSET: u8 = 0xff;
        let n = self.conn.len();
        let size = 1usize << n;
        // symbolic value s·x + c packed as (sign bit 2, c in bits 0..1)
        let mut sym = vec![UNSET; size];
        let mut out = vec![0u8; size];
        if self.x_local == 0 {
            return Ok(out);
        }

        // basis of the orbit group, chosen among generators (string first)
        let gens: Vec<u64> = std::iter::once(self.x_local).chain(self.flips.iter().copied()).collect();
        let mut echelon: Vec<u64> = Vec::new();
        let mut tree: Vec<usize> = Vec::new();
        for (gi, &g) in gens.iter().enumerate() {
            let mut r = g;
            for &b in &echelon {
                r = r.min(r ^ b);
            }
            if r != 0 {
                echelon.push(r);
                echelon.sort_unstable_by(|a, b| b.cmp(a));
                tree.push(gi);
            }
        }

        let step = |gi: usize, j: u64, s: u8| -> u8 {
            if gi == 0 {
                // negate s·x + c
                let sign = (s >> 2) & 1;
                let c = s & 3;
                ((sign ^ 1) << 2) | ((4 - c) & 3)
            } else {
                let d = self.delta(gi - 1, j);
                (s & 4) | ((s + d) & 3)
            }
        };

        let mut members: Vec<u64> = Vec::with_capacity(1 << tree.len());
        for start in 0..size as u64 {
            if sym[start as usize] != UNSET {
                continue;
            }
            members.clear();
            sym[start as usize] = 0; // +x + 0
            members.push(start);
            let mut j = start;
            for i in 1u64..(1u64 << tree.len()) {
                let gi = tree[i.trailing_zeros() as usize];
                let next = j ^ gens[gi];
                sym[next as usize] = step(gi, j, sym[j as usize]);
                members.push(next);
                j = next;
            }

            // every constraint, including dependent generators, fixes x or fails
            let mut x: Option<u8> = None;
            for &j in &members {
                let s = sym[j as usize];
                for (gi, &g) in gens.iter().enumerate() {
                    let want = step(gi, j, s);
                    let have = sym[(j ^ g) as usize];
                    if want == have {
                        continue;
                    }
                    if (want ^ have) & 4 == 0 {
                        return Err(AlgebraError::InfeasibleConstraints);
                    }
                    // ±x + c1 = ∓x + c2  =>  2x = c2 - c1 (mod 4)
                    let diff = ((have & 3) + 4 - (want & 3)) & 3;
                    if diff % 2 == 1 {
                        return Err(AlgebraError::InfeasibleConstraints);
                    }
                    let xv = diff / 2;
                    match x {
                        None => x = Some(xv),
                        Some(prev) if prev != xv => return Err(AlgebraError::InfeasibleConstraints),
                        _ => {}
                    }
                }
            }
            let x = x.unwrap_or(0);
            for &j in &members {
                let s = sym[j as usize];
                let sx = if s & 4 == 0 { x } else { (4 - x) & 3 };
                out[j as usize] = (sx + (s & 3)) & 3;
            }
        }
        Ok(out)
    }
}

/// String phase `F = i^g` over Conn(x_support) for `S+ = X_P F`.
///
/// Free directions are fixed by assigning 0 to the lowest basis state of
/// each orbit.
pub fn solve_string_phase(
    lat: &CodeLattice,
    x_support: &[EdgeId],
    cap: usize,
) -> Result<DiagonalPhaseTable, AlgebraError> {
    let sys = StringSystem::new(lat, x_support, cap)?;
    let exponents = sys.solve()?;
    Ok(DiagonalPhaseTable { support: sys.conn, exponents })
}

/// The string operator `S+ = X_P F` as a signed permutation on Conn(P).
pub fn string_op(lat: &CodeLattice, x_support: &[EdgeId], cap: usize) -> Result<SignedPermutationOp, AlgebraError> {
    let sys = StringSystem::new(lat, x_support, cap)?;
    let exponents = sys.solve()?;
    Ok(SignedPermutationOp { x_mask: sys.x_local, phases: DiagonalPhaseTable { support: sys.conn, exponents } })
}

/// Walsh spectrum `c(Q)` of `F*`, indexed by local masks over the support.
#[derive(Debug, Clone)]
pub struct AmplitudeTable {
    support: Vec<EdgeId>,
    coeffs: Vec<Complex64>,
}

impl AmplitudeTable {
    pub fn support(&self) -> &[EdgeId] {
        &self.support
    }

    pub fn coefficient(&self, q: usize) -> Complex64 {
        self.coeffs[q]
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sqr_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Unnormalized transform of `F*` in exact Gaussian integers.
fn walsh_integer(exponents: &[u8]) -> (Vec<i32>, Vec<i32>) {
    let mut re: Vec<i32> = Vec::with_capacity(exponents.len());
    let mut im: Vec<i32> = Vec::with_capacity(exponents.len());
    for &g in exponents {
        // conj(i^g) = i^{-g}
        let (a, b) = match g & 3 {
            0 => (1, 0),
            1 => (0, -1),
            2 => (-1, 0),
            _ => (0, 1),
        };
        re.push(a);
        im.push(b);
    }
    fwht(&mut re);
    fwht(&mut im);
    (re, im)
}

fn fwht(a: &mut [i32]) {
    let n = a.len();
    let mut h = 1;
    while h < n {
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
}

pub fn walsh_coefficients(f: &DiagonalPhaseTable, cap: usize) -> Result<AmplitudeTable, AlgebraError> {
    let n = f.support.len();
    if n > cap.min(DENSE_LIMIT) {
        return Err(AlgebraError::CapExceeded { size: n, cap: cap.min(DENSE_LIMIT) });
    }
    let (re, im) = walsh_integer(&f.exponents);
    let scale = (n as f64).exp2().recip();
    let coeffs = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a as f64 * scale, b as f64 * scale)).collect();
    Ok(AmplitudeTable { support: f.support.clone(), coeffs })
}

/// One plaquette-syndrome sector of an X-string.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    /// Bit `i` set when plaquette `plaquettes[i]` is excited.
    pub pattern: u64,
    pub probability: f64,
    /// Local mask over Conn of the max-|c| member of the sector.
    pub representative: u64,
}

#[derive(Debug, Clone)]
pub struct SyndromeDistribution {
    conn: Vec<EdgeId>,
    plaquettes: Vec<PlaquetteId>,
    sectors: Vec<Sector>,
    cumulative: Vec<f64>,
}

impl SyndromeDistribution {
    pub fn conn(&self) -> &[EdgeId] {
        &self.conn
    }

    pub fn plaquettes(&self) -> &[PlaquetteId] {
        &self.plaquettes
    }

    /// Sectors with nonzero amplitude, ascending by pattern.
    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn probability(&self, pattern: u64) -> f64 {
        self.sectors
            .binary_search_by_key(&pattern, |s| s.pattern)
            .map(|i| self.sectors[i].probability)
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.sectors.iter().map(|s| s.probability).sum()
    }

    /// Probability that exactly the given plaquettes are excited.
    pub fn probability_of(&self, excited: &[PlaquetteId]) -> f64 {
        let mut pattern = 0u64;
        for p in excited {
            match self.plaquettes.binary_search(p) {
                Ok(i) => pattern |= 1 << i,
                Err(_) => return 0.0,
            }
        }
        self.probability(pattern)
    }

    /// Inverse-CDF sampling for `u` in [0, 1).
    pub fn sample(&self, u: f64) -> &Sector {
        let target = u * self.cumulative.last().copied().unwrap_or(1.0);
        let i = self.cumulative.partition_point(|&c| c <= target);
        &self.sectors[i.min(self.sectors.len() - 1)]
    }

    pub fn excited_plaquettes(&self, pattern: u64) -> impl Iterator<Item = PlaquetteId> + '_ {
        self.plaquettes.iter().enumerate().filter(move |(i, _)| (pattern >> i) & 1 == 1).map(|(_, &p)| p)
    }

    pub fn representative_edges(&self, q: u64) -> impl Iterator<Item = EdgeId> + '_ {
        self.conn.iter().enumerate().filter(move |(i, _)| (q >> i) & 1 == 1).map(|(_, &e)| e)
    }
}

pub fn syndrome_distribution(
    lat: &CodeLattice,
    x_support: &[EdgeId],
    cap: usize,
) -> Result<SyndromeDistribution, AlgebraError> {
    let sys = StringSystem::new(lat, x_support, cap)?;
    let exponents = sys.solve()?;
    let n = sys.conn.len();
    let (re, im) = walsh_integer(&exponents);

    // plaquette pattern flipped by Z on each Conn edge
    let edge_pattern: Vec<u64> = (0..n)
        .map(|i| sys.flips.iter().enumerate().filter(|(_, &f)| (f >> i) & 1 == 1).fold(0u64, |acc, (k, _)| acc | 1 << k))
        .collect();

    struct Acc {
        re: i64,
        im: i64,
        best: i64,
        best_q: u64,
    }
    let mut buckets: HashMap<u64, Acc> = HashMap::new();
    let mut pattern = 0u64;
    for i in 0..1u64 << n {
        if i > 0 {
            pattern ^= edge_pattern[i.trailing_zeros() as usize];
        }
        let q = (i ^ (i >> 1)) as usize;
        let (a, b) = (re[q] as i64, im[q] as i64);
        if a == 0 && b == 0 {
            continue;
        }
        let mag = a * a + b * b;
        let acc = buckets.entry(pattern).or_insert(Acc { re: 0, im: 0, best: -1, best_q: 0 });
        acc.re += a;
        acc.im += b;
        if mag > acc.best || (mag == acc.best && (q as u64) < acc.best_q) {
            acc.best = mag;
            acc.best_q = q as u64;
        }
    }

    let norm = (2.0 * n as f64).exp2();
    let mut sectors: Vec<Sector> = buckets
        .into_iter()
        .filter(|(_, a)| a.re != 0 || a.im != 0)
        .map(|(pattern, a)| Sector {
            pattern,
            probability: (a.re as f64 * a.re as f64 + a.im as f64 * a.im as f64) / norm,
            representative: a.best_q,
        })
        .collect();
    sectors.sort_unstable_by_key(|s| s.pattern);
    let mut run = 0.0;
    let cumulative = sectors
        .iter()
        .map(|s| {
            run += s.probability;
            run
        })
        .collect();
    Ok(SyndromeDistribution { conn: sys.conn, plaquettes: sys.plaquettes, sectors, cumulative })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_state_has_trivial_phase() {
        assert_eq!(beta_exponent(0), 0);
        assert_eq!(hexagon_sign_exponent(0), 0);
        assert_eq!(hexagon_sign_exponent(0xfff), 0);
    }

    #[test]
    fn empty_string_is_identity() {
        let lat = CodeLattice::new(4).unwrap();
        let f = solve_string_phase(&lat, &[], DEFAULT_CAP).unwrap();
        assert!(f.support().is_empty());
        assert_eq!(f.exponents(), &[0]);
        let c = walsh_coefficients(&f, DEFAULT_CAP).unwrap();
        assert_eq!(c.coefficient(0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cap_is_enforced() {
        let lat = CodeLattice::new(6).unwrap();
        let row: Vec<EdgeId> = (0..12).collect();
        assert!(matches!(
            solve_string_phase(&lat, &row, 10),
            Err(AlgebraError::CapExceeded { .. })
        ));
    }

    #[test]
    fn table_validation() {
        assert!(DiagonalPhaseTable::new(vec![1, 1], vec![0; 4]).is_err());
        assert!(DiagonalPhaseTable::new(vec![1, 2], vec![0; 3]).is_err());
        assert!(DiagonalPhaseTable::new(vec![1], vec![0, 4]).is_err());
        assert!(DiagonalPhaseTable::new(vec![1], vec![0, 3]).is_ok());
    }
}
