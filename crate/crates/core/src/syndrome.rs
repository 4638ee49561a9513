//! Syndrome sampling: deterministic vertex syndromes, deterministic plaquette
//! flips from the Z part, and probabilistic plaquette syndromes from X strings.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{conn_support, syndrome_distribution, SyndromeDistribution, DEFAULT_CAP};
use crate::bits::Mask;
use crate::lattice::{CodeLattice, EdgeId, VertexId};
use crate::noise::PauliFrame;
use crate::rng::RngTrace;

/// Conn bound for the pieces produced by the over-cap fallback.
const FALLBACK_PIECE_CONN: usize = 16;

/// Shapes with larger Conn are not cached.
const CACHE_MAX_CONN: usize = 18;
const CACHE_MAX_ENTRIES: usize = 200_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFlags {
    pub used_fallback: bool,
    pub wrapped_component: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeSample {
    pub vertex_bits: Mask,
    pub plaquette_bits: Mask,
    /// Sector representatives of all X components, XOR-ed.
    pub residual_zq: Mask,
    pub flags: SampleFlags,
    pub rng_trace: Option<RngTrace>,
}

impl SyndromeSample {
    pub fn is_trivial(&self) -> bool {
        self.vertex_bits.is_empty() && self.plaquette_bits.is_empty()
    }

    /// All stabilizer bits: vertices first, then plaquettes.
    pub fn stabilizer_bits(&self) -> Vec<u8> {
        let mut out = self.vertex_bits.to_bytes();
        out.extend(self.plaquette_bits.to_bytes());
        out
    }
}

pub fn vertex_syndrome(lat: &CodeLattice, x_mask: &Mask) -> Mask {
    let mut bits = Mask::zeros(lat.n_vertices());
    for e in x_mask.iter_ones() {
        for v in lat.edge_ends(e) {
            bits.toggle(v);
        }
    }
    bits
}

pub fn z_plaquette_flips(lat: &CodeLattice, z_mask: &Mask) -> Mask {
    let mut bits = Mask::zeros(lat.n_plaquettes());
    for e in z_mask.iter_ones() {
        for p in lat.edge_plaquettes(e) {
            bits.toggle(p);
        }
    }
    bits
}

/// Vertex-connected components of an edge set, each sorted, ordered by
/// their smallest edge.
pub fn x_components(lat: &CodeLattice, x_mask: &Mask) -> Vec<Vec<EdgeId>> {
    let mut seen = Mask::zeros(lat.n_edges());
    let mut out = Vec::new();
    for start in x_mask.iter_ones() {
        if seen.get(start) {
            continue;
        }
        let mut comp = vec![start];
        seen.set(start, true);
        let mut queue = VecDeque::from([start]);
        while let Some(e) = queue.pop_front() {
            for v in lat.edge_ends(e) {
                for f in lat.vertex_edges(v) {
                    if x_mask.get(f) && !seen.get(f) {
                        seen.set(f, true);
                        comp.push(f);
                        queue.push_back(f);
                    }
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Whether the graph formed by `edges` contains a non-contractible cycle.
pub fn wraps_torus(lat: &CodeLattice, edges: &[EdgeId]) -> bool {
    let d = lat.d() as i64;
    let mut lift: HashMap<VertexId, (i64, i64)> = HashMap::new();
    let mut adj: HashMap<VertexId, Vec<(VertexId, (i64, i64))>> = HashMap::new();
    for &e in edges {
        let [a, b] = lat.edge_ends(e);
        // displacement from a to b in unwrapped (row, zigzag position) coordinates
        let (ra, ka) = lat.vertex_coords(a);
        let step = match lat.edge_cell(e).2 {
            2 => (1, -1),
            _ => (0, 1),
        };
        let (rb, kb) = lat.vertex_coords(b);
        debug_assert_eq!(((ra as i64 + step.0).rem_euclid(d), (ka as i64 + step.1).rem_euclid(2 * d)), (rb as i64, kb as i64));
        adj.entry(a).or_default().push((b, step));
        adj.entry(b).or_default().push((a, (-step.0, -step.1)));
    }
    let mut starts: Vec<VertexId> = adj.keys().copied().collect();
    starts.sort_unstable();
    for s in starts {
        if lift.contains_key(&s) {
            continue;
        }
        lift.insert(s, (0, 0));
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let lx = lift[&x];
            for &(y, (dr, dk)) in &adj[&x] {
                let ly = (lx.0 + dr, lx.1 + dk);
                match lift.get(&y) {
                    Some(&prev) if prev != ly => return true,
                    Some(_) => {}
                    None => {
                        lift.insert(y, ly);
                        queue.push_back(y);
                    }
                }
            }
        }
    }
    false
}

/// Split an edge set into paths between odd vertices and closed trails,
/// then cut every piece into consecutive runs with bounded Conn.
pub fn fallback_pieces(lat: &CodeLattice, comp: &[EdgeId], conn_limit: usize) -> Vec<Vec<EdgeId>> {
    let mut remaining: BTreeSet<EdgeId> = comp.iter().copied().collect();
    let degree = |rem: &BTreeSet<EdgeId>, v: VertexId| lat.vertex_edges(v).iter().filter(|e| rem.contains(e)).count();
    let mut trails: Vec<Vec<EdgeId>> = Vec::new();

    loop {
        let odd: Vec<VertexId> = {
            let vs: BTreeSet<VertexId> = remaining.iter().flat_map(|&e| lat.edge_ends(e)).collect();
            vs.into_iter().filter(|&v| degree(&remaining, v) % 2 == 1).collect()
        };
        if odd.is_empty() {
            break;
        }
        // nearest other odd vertex from the smallest odd vertex, within the remaining edges
        let a = odd[0];
        let mut prev: HashMap<VertexId, (VertexId, EdgeId)> = HashMap::new();
        let mut queue = VecDeque::from([a]);
        let mut found = None;
        let mut visited = BTreeSet::from([a]);
        while let Some(x) = queue.pop_front() {
            if x != a && degree(&remaining, x) % 2 == 1 {
                found = Some(x);
                break;
            }
            for e in lat.vertex_edges(x) {
                if !remaining.contains(&e) {
                    continue;
                }
                let y = lat.other_end(e, x);
                if visited.insert(y) {
                    prev.insert(y, (x, e));
                    queue.push_back(y);
                }
            }
        }
        let b = found.expect("odd vertices pair up within a component");
        let mut path = Vec::new();
        let mut cur = b;
        while cur != a {
            let (p, e) = prev[&cur];
            path.push(e);
            cur = p;
        }
        path.reverse();
        for e in &path {
            remaining.remove(e);
        }
        trails.push(path);
    }
    while let Some(&first) = remaining.iter().next() {
        // closed trail: walk smallest unused edges until stuck (back at the start)
        let mut trail = vec![first];
        remaining.remove(&first);
        let [_, mut cur] = lat.edge_ends(first);
        while let Some(e) = lat.vertex_edges(cur).into_iter().find(|e| remaining.contains(e)) {
            remaining.remove(&e);
            trail.push(e);
            cur = lat.other_end(e, cur);
        }
        trails.push(trail);
    }

    let mut pieces = Vec::new();
    for trail in trails {
        let mut piece: Vec<EdgeId> = Vec::new();
        for e in trail {
            piece.push(e);
            if piece.len() > 1 && conn_support(lat, &piece).len() > conn_limit {
                piece.pop();
                pieces.push(std::mem::take(&mut piece));
                piece.push(e);
            }
        }
        if !piece.is_empty() {
            pieces.push(piece);
        }
    }
    pieces
}

/// Translation taking `edges` to its canonical representative, and that
/// representative.
fn canonical_shape(lat: &CodeLattice, edges: &[EdgeId]) -> ((usize, usize), Vec<EdgeId>) {
    let d = lat.d();
    let mut best: Option<((usize, usize), Vec<EdgeId>)> = None;
    let mut tried = BTreeSet::new();
    for &e in edges {
        let (r, c, _) = lat.edge_cell(e);
        let shift = ((d - r) % d, (d - c) % d);
        if !tried.insert(shift) {
            continue;
        }
        let mut moved: Vec<EdgeId> = edges.iter().map(|&x| lat.translate_edge(x, shift.0, shift.1)).collect();
        moved.sort_unstable();
        if best.as_ref().is_none_or(|(_, b)| moved < *b) {
            best = Some((shift, moved));
        }
    }
    best.expect("non-empty edge set")
}

type ShapeKey = (usize, usize, Vec<EdgeId>);

thread_local! {
    static CACHE: RefCell<HashMap<ShapeKey, Rc<SyndromeDistribution>>> = RefCell::new(HashMap::new());
}

fn distribution_for(lat: &CodeLattice, canonical: &[EdgeId], cap: usize) -> Rc<SyndromeDistribution> {
    let key = (lat.d(), cap, canonical.to_vec());
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let dist = Rc::new(syndrome_distribution(lat, canonical, cap).expect("string-phase system is solvable"));
    if dist.conn().len() <= CACHE_MAX_CONN {
        CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() >= CACHE_MAX_ENTRIES {
                c.clear();
            }
            c.insert(key, dist.clone());
        });
    }
    dist
}

/// Sample one piece exactly and add its pattern and representative.
fn sample_piece<R: Rng>(lat: &CodeLattice, edges: &[EdgeId], cap: usize, rng: &mut R, bits: &mut Mask, residual: &mut Mask) {
    let d = lat.d();
    let (shift, canonical) = canonical_shape(lat, edges);
    let back = ((d - shift.0) % d, (d - shift.1) % d);
    let dist = distribution_for(lat, &canonical, cap);
    let u: f64 = rng.gen();
    let sector = dist.sample(u);
    for p in dist.excited_plaquettes(sector.pattern) {
        bits.toggle(lat.translate_plaquette(p, back.0, back.1));
    }
    for e in dist.representative_edges(sector.representative) {
        residual.toggle(lat.translate_edge(e, back.0, back.1));
    }
}

/// Plaquette bits and residual Z from the X part of an error, with the
/// default Conn cap.
pub fn sample_plaquette_syndrome<R: Rng>(lat: &CodeLattice, x_mask: &Mask, rng: &mut R) -> (Mask, Mask, SampleFlags) {
    sample_plaquette_syndrome_with_cap(lat, x_mask, DEFAULT_CAP, rng)
}

pub fn sample_plaquette_syndrome_with_cap<R: Rng>(
    lat: &CodeLattice,
    x_mask: &Mask,
    cap: usize,
    rng: &mut R,
) -> (Mask, Mask, SampleFlags) {
    let mut bits = Mask::zeros(lat.n_plaquettes());
    let mut residual = Mask::zeros(lat.n_edges());
    let mut flags = SampleFlags::default();
    for comp in x_components(lat, x_mask) {
        let conn = conn_support(lat, &comp);
        if wraps_torus(lat, &conn) {
            flags.wrapped_component = true;
        }
        if conn.len() <= cap {
            sample_piece(lat, &comp, cap, rng, &mut bits, &mut residual);
        } else {
            flags.used_fallback = true;
            for piece in fallback_pieces(lat, &comp, cap.min(FALLBACK_PIECE_CONN)) {
                sample_piece(lat, &piece, cap, rng, &mut bits, &mut residual);
            }
        }
    }
    (bits, residual, flags)
}

pub fn sample_syndrome<R: Rng>(lat: &CodeLattice, frame: &PauliFrame, rng: &mut R) -> SyndromeSample {
    sample_syndrome_with_cap(lat, frame, DEFAULT_CAP, rng)
}

pub fn sample_syndrome_with_cap<R: Rng>(lat: &CodeLattice, frame: &PauliFrame, cap: usize, rng: &mut R) -> SyndromeSample {
    let vertex_bits = vertex_syndrome(lat, &frame.x);
    let (mut plaquette_bits, residual_zq, flags) = sample_plaquette_syndrome_with_cap(lat, &frame.x, cap, rng);
    plaquette_bits.xor_assign(&z_plaquette_flips(lat, &frame.z));
    SyndromeSample { vertex_bits, plaquette_bits, residual_zq, flags, rng_trace: None }
}

/// CSS syndromes of the hexagonal toric code on the same lattice.
pub fn kitaev_hex_syndrome(lat: &CodeLattice, frame: &PauliFrame) -> SyndromeSample {
    SyndromeSample {
        vertex_bits: vertex_syndrome(lat, &frame.x),
        plaquette_bits: z_plaquette_flips(lat, &frame.z),
        residual_zq: Mask::zeros(lat.n_edges()),
        flags: SampleFlags::default(),
        rng_trace: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_shape_is_translation_invariant() {
        let lat = CodeLattice::new(5).unwrap();
        let edges = vec![3, 4, 17];
        let (_, a) = canonical_shape(&lat, &edges);
        let moved: Vec<EdgeId> = edges.iter().map(|&e| lat.translate_edge(e, 2, 4)).collect();
        let (_, b) = canonical_shape(&lat, &moved);
        assert_eq!(a, b);
    }

    #[test]
    fn row_wraps_and_hexagon_does_not() {
        let lat = CodeLattice::new(4).unwrap();
        let row: Vec<EdgeId> = (0..8).collect();
        assert!(wraps_torus(&lat, &row));
        assert!(!wraps_torus(&lat, &lat.hexagon(5)));
        assert!(!wraps_torus(&lat, &row[..7]));
        let column: Vec<EdgeId> = lat.cuts().v.ones();
        assert!(wraps_torus(&lat, &column));
    }

    #[test]
    fn fallback_pieces_partition_the_component() {
        let lat = CodeLattice::new(7).unwrap();
        let mut comp: Vec<EdgeId> = lat.hexagon(10).to_vec();
        comp.extend(lat.hexagon(11));
        comp.extend(lat.support(24)[6..].iter().copied());
        comp.sort_unstable();
        comp.dedup();
        let pieces = fallback_pieces(&lat, &comp, 12);
        let mut all: Vec<EdgeId> = pieces.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, comp);
        for p in &pieces {
            assert!(conn_support(&lat, p).len() <= 12 || p.len() == 1);
        }
    }
}
