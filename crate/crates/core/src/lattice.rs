//! Hexagonal lattice on a d×d rhombic torus.
//!
//! Coordinates: plaquette `hex(r, c)` sits in plaquette row `r` and column `c`.
//! Vertex row `r` holds the 2d vertices `V(r, k)` along the zigzag below
//! plaquette row `r`. Edges are either zigzag edges `Z(r, k)` joining
//! `V(r, k)` and `V(r, k+1)`, or vertical edges `Vert(r, c)` joining the
//! lower-left corner of `hex(r, c)` to its upper-left corner. All ids are
//! raster ordered (left to right, bottom to top), 0-based internally; add one
//! for the figure labels.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::Mask;

pub type EdgeId = usize;
pub type VertexId = usize;
pub type PlaquetteId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("code distance must be at least 2, got {0}")]
    DistanceTooSmall(usize),
    #[error("code distance {0} exceeds the supported maximum of 255")]
    DistanceTooLarge(usize),
    #[error("invalid plaquette id {0}")]
    InvalidPlaquette(usize),
    #[error("invalid edge id {0}")]
    InvalidEdge(usize),
    #[error("invalid vertex id {0}")]
    InvalidVertex(usize),
}

/// Edge direction in the brick-wall drawing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// Rising to the right (+30°).
    A,
    /// Vertical.
    B,
    /// Rising to the left (+150°).
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteKind {
    Primal,
    Dual,
}

/// The four non-contractible cycles used to read off homology.
#[derive(Debug, Clone)]
pub struct Cuts {
    /// Primal horizontal cycle: one zigzag row.
    pub h: Mask,
    /// Primal vertical cycle: a staircase of rising and vertical edges.
    pub v: Mask,
    /// Edges crossed by the dual horizontal cycle.
    pub h_bar: Mask,
    /// Edges crossed by the dual vertical cycle.
    pub v_bar: Mask,
}

#[derive(Debug, Clone)]
pub struct CodeLattice {
    d: usize,
    edge_ends: Vec<[VertexId; 2]>,
    edge_plaquettes: Vec<[PlaquetteId; 2]>,
    vertex_edges: Vec<[EdgeId; 3]>,
    hexagons: Vec<[EdgeId; 6]>,
    supports: Vec<[EdgeId; 12]>,
    orientation: Vec<Orientation>,
    cuts: Cuts,
    vertex_dist: Vec<u16>,
    plaquette_dist: Vec<u16>,
}

impl CodeLattice {
    pub fn new(d: usize) -> Result<Self, LatticeError> {
        if d < 2 {
            return Err(LatticeError::DistanceTooSmall(d));
        }
        if d > 255 {
            return Err(LatticeError::DistanceTooLarge(d));
        }
        let n_e = 3 * d * d;
        let n_v = 2 * d * d;
        let n_p = d * d;
        let geo = Geometry { d };

        let mut edge_ends = vec![[0; 2]; n_e];
        let mut orientation = vec![Orientation::A; n_e];
        for r in 0..d {
            for k in 0..2 * d {
                let e = geo.zig(r as isize, k as isize);
                edge_ends[e] = [geo.v(r as isize, k as isize), geo.v(r as isize, k as isize + 1)];
                orientation[e] = if k % 2 == 0 { Orientation::A } else { Orientation::C };
            }
            for c in 0..d {
                let (r, c) = (r as isize, c as isize);
                let e = geo.vert(r, c);
                edge_ends[e] = [geo.lower_left(r, c), geo.bottom(r + 1, c - 1)];
                orientation[e] = Orientation::B;
            }
        }

        let mut incident: Vec<Vec<EdgeId>> = vec![Vec::with_capacity(3); n_v];
        for (e, ends) in edge_ends.iter().enumerate() {
            incident[ends[0]].push(e);
            incident[ends[1]].push(e);
        }
        let vertex_edges: Vec<[EdgeId; 3]> = incident
            .into_iter()
            .map(|mut es| {
                es.sort_unstable();
                assert_eq!(es.len(), 3, "vertex degree must be 3");
                [es[0], es[1], es[2]]
            })
            .collect();

        let mut hexagons = vec![[0; 6]; n_p];
        let mut edge_plaq: Vec<Vec<PlaquetteId>> = vec![Vec::with_capacity(2); n_e];
        for r in 0..d as isize {
            for c in 0..d as isize {
                let p = geo.plaq(r, c);
                let h = [
                    geo.vert(r, c + 1),
                    geo.zig(r, 2 * (c + 1)),
                    geo.zig(r, 2 * c + 1),
                    geo.vert(r, c),
                    geo.zig(r + 1, 2 * c),
                    geo.zig(r + 1, 2 * c + 1),
                ];
                hexagons[p] = h;
                for &e in &h {
                    edge_plaq[e].push(p);
                }
            }
        }
        let edge_plaquettes: Vec<[PlaquetteId; 2]> = edge_plaq
            .into_iter()
            .map(|ps| {
                assert_eq!(ps.len(), 2, "every edge borders two hexagons");
                [ps[0], ps[1]]
            })
            .collect();

        let supports = hexagons
            .iter()
            .map(|h| {
                let mut s = [0; 12];
                s[..6].copy_from_slice(h);
                for k in 0..6 {
                    let (e1, e2) = (h[k], h[(k + 1) % 6]);
                    let v = shared_vertex(&edge_ends, e1, e2);
                    let leg = vertex_edges[v]
                        .iter()
                        .copied()
                        .find(|&e| e != e1 && e != e2)
                        .expect("third edge at hexagon corner");
                    s[6 + k] = leg;
                }
                s
            })
            .collect();

        let cuts = Cuts {
            h: Mask::from_indices(n_e, (0..2 * d as isize).map(|k| geo.zig(0, k))),
            v: Mask::from_indices(
                n_e,
                (0..d as isize).flat_map(|r| [geo.zig(r, 0), geo.vert(r, 0)]),
            ),
            h_bar: Mask::from_indices(n_e, (0..d as isize).map(|c| geo.vert(0, c))),
            v_bar: Mask::from_indices(n_e, (0..d as isize).map(|r| geo.zig(r, 1))),
        };

        let vertex_adj: Vec<Vec<usize>> = (0..n_v)
            .map(|v| vertex_edges[v].iter().map(|&e| other_end(&edge_ends, e, v)).collect())
            .collect();
        let plaq_adj: Vec<Vec<usize>> = (0..n_p)
            .map(|p| hexagons[p].iter().map(|&e| other_plaquette(&edge_plaquettes, e, p)).collect())
            .collect();
        let vertex_dist = all_pairs_bfs(&vertex_adj);
        let plaquette_dist = all_pairs_bfs(&plaq_adj);

        Ok(CodeLattice {
            d,
            edge_ends,
            edge_plaquettes,
            vertex_edges,
            hexagons,
            supports,
            orientation,
            cuts,
            vertex_dist,
            plaquette_dist,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_edges(&self) -> usize {
        3 * self.d * self.d
    }

    pub fn n_vertices(&self) -> usize {
        2 * self.d * self.d
    }

    pub fn n_plaquettes(&self) -> usize {
        self.d * self.d
    }

    pub fn edge_ends(&self, e: EdgeId) -> [VertexId; 2] {
        self.edge_ends[e]
    }

    pub fn edge_plaquettes(&self, e: EdgeId) -> [PlaquetteId; 2] {
        self.edge_plaquettes[e]
    }

    pub fn vertex_edges(&self, v: VertexId) -> [EdgeId; 3] {
        self.vertex_edges[v]
    }

    pub fn hexagon(&self, p: PlaquetteId) -> [EdgeId; 6] {
        self.hexagons[p]
    }

    /// Unchecked access to the 12-edge support: hexagon positions 1–6, legs 7–12.
    pub fn support(&self, p: PlaquetteId) -> &[EdgeId; 12] {
        &self.supports[p]
    }

    pub fn plaquette_support(&self, p: PlaquetteId) -> Result<[EdgeId; 12], LatticeError> {
        self.supports.get(p).copied().ok_or(LatticeError::InvalidPlaquette(p))
    }

    pub fn edge_orientation(&self, e: EdgeId) -> Result<Orientation, LatticeError> {
        self.orientation.get(e).copied().ok_or(LatticeError::InvalidEdge(e))
    }

    pub fn orientation(&self, e: EdgeId) -> Orientation {
        self.orientation[e]
    }

    /// The four plaquettes around an edge in the `(p, q, r, s)` order of the
    /// orientation diagrams. Slots may repeat on small tori.
    pub fn surrounding_plaquettes(&self, e: EdgeId) -> Result<[PlaquetteId; 4], LatticeError> {
        if e >= self.n_edges() {
            return Err(LatticeError::InvalidEdge(e));
        }
        let geo = Geometry { d: self.d };
        let (r, j) = ((e / (3 * self.d)) as isize, e % (3 * self.d));
        let two_d = 2 * self.d;
        let h = |r: isize, c: isize| geo.plaq(r, c);
        Ok(if j < two_d {
            let k = j as isize;
            if k % 2 == 0 {
                // bottom-right edge of hex(r, c)
                let c = k / 2 - 1;
                [h(r - 1, c), h(r, c), h(r - 1, c + 1), h(r, c + 1)]
            } else {
                // bottom-left edge of hex(r, c)
                let c = (k - 1) / 2;
                [h(r, c - 1), h(r - 1, c), h(r, c), h(r - 1, c + 1)]
            }
        } else {
            // left vertical of hex(r, c)
            let c = (j - two_d) as isize;
            [h(r - 1, c), h(r, c - 1), h(r, c), h(r + 1, c - 1)]
        })
    }

    pub fn cuts(&self) -> &Cuts {
        &self.cuts
    }

    pub fn hexagon_mask(&self, p: PlaquetteId) -> Mask {
        Mask::from_indices(self.n_edges(), self.hexagons[p])
    }

    pub fn star_mask(&self, v: VertexId) -> Mask {
        Mask::from_indices(self.n_edges(), self.vertex_edges[v])
    }

    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        other_end(&self.edge_ends, e, v)
    }

    pub fn other_plaquette(&self, e: EdgeId, p: PlaquetteId) -> PlaquetteId {
        other_plaquette(&self.edge_plaquettes, e, p)
    }

    /// Plaquette coordinates `(row, column)`.
    pub fn plaquette_coords(&self, p: PlaquetteId) -> (usize, usize) {
        (p / self.d, p % self.d)
    }

    /// Vertex coordinates `(row, position along the zigzag)`.
    pub fn vertex_coords(&self, v: VertexId) -> (usize, usize) {
        (v / (2 * self.d), v % (2 * self.d))
    }

    /// Cell coordinates of an edge: `(row, column, slot)` with slot 0 for the
    /// rising zigzag edge, 1 for the falling one and 2 for the vertical.
    pub fn edge_cell(&self, e: EdgeId) -> (usize, usize, usize) {
        let (r, j) = (e / (3 * self.d), e % (3 * self.d));
        if j < 2 * self.d {
            (r, j / 2, j % 2)
        } else {
            (r, j - 2 * self.d, 2)
        }
    }

    fn edge_from_cell(&self, r: usize, c: usize, slot: usize) -> EdgeId {
        let base = 3 * self.d * r;
        match slot {
            0 | 1 => base + 2 * c + slot,
            _ => base + 2 * self.d + c,
        }
    }

    /// Translate an edge by whole lattice periods.
    pub fn translate_edge(&self, e: EdgeId, dr: usize, dc: usize) -> EdgeId {
        let (r, c, slot) = self.edge_cell(e);
        self.edge_from_cell((r + dr) % self.d, (c + dc) % self.d, slot)
    }

    pub fn translate_plaquette(&self, p: PlaquetteId, dr: usize, dc: usize) -> PlaquetteId {
        let (r, c) = self.plaquette_coords(p);
        ((r + dr) % self.d) * self.d + (c + dc) % self.d
    }

    pub fn translate_vertex(&self, v: VertexId, dr: usize, dc: usize) -> VertexId {
        let (r, k) = self.vertex_coords(v);
        ((r + dr) % self.d) * 2 * self.d + (k + 2 * dc) % (2 * self.d)
    }

    pub fn distance(&self, kind: SiteKind, a: usize, b: usize) -> usize {
        match kind {
            SiteKind::Primal => self.vertex_dist[a * self.n_vertices() + b] as usize,
            SiteKind::Dual => self.plaquette_dist[a * self.n_plaquettes() + b] as usize,
        }
    }

    /// A minimal path from `a` to `b` as edges in walking order. Among
    /// minimal paths the one with the lexicographically smallest edge
    /// sequence is returned.
    pub fn shortest_path(&self, kind: SiteKind, a: usize, b: usize) -> Vec<EdgeId> {
        let mut path = Vec::with_capacity(self.distance(kind, a, b));
        let mut cur = a;
        while cur != b {
            let here = self.distance(kind, cur, b);
            let step = match kind {
                SiteKind::Primal => self.vertex_edges[cur]
                    .iter()
                    .map(|&e| (e, self.other_end(e, cur)))
                    .filter(|&(_, y)| self.distance(kind, y, b) + 1 == here)
                    .min_by_key(|&(e, _)| e),
                SiteKind::Dual => self.hexagons[cur]
                    .iter()
                    .map(|&e| (e, self.other_plaquette(e, cur)))
                    .filter(|&(_, y)| self.distance(kind, y, b) + 1 == here)
                    .min_by_key(|&(e, _)| e),
            };
            let (e, next) = step.expect("BFS distances admit a descending neighbour");
            path.push(e);
            cur = next;
        }
        path
    }

    /// Text rendering with 1-based ids, one line per object.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "d {}", self.d);
        for (e, ends) in self.edge_ends.iter().enumerate() {
            let _ = writeln!(
                out,
                "edge {} {:?} vertices {} {} plaquettes {} {}",
                e + 1,
                self.orientation[e],
                ends[0] + 1,
                ends[1] + 1,
                self.edge_plaquettes[e][0] + 1,
                self.edge_plaquettes[e][1] + 1
            );
        }
        for p in 0..self.n_plaquettes() {
            let s: Vec<String> = self.supports[p].iter().map(|e| (e + 1).to_string()).collect();
            let _ = writeln!(out, "plaquette {} support {}", p + 1, s.join(" "));
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Geometry {
    d: usize,
}

impl Geometry {
    fn wrap(&self, x: isize, m: usize) -> usize {
        x.rem_euclid(m as isize) as usize
    }
    fn v(&self, r: isize, k: isize) -> VertexId {
        let d = self.d;
        self.wrap(r, d) * 2 * d + self.wrap(k, 2 * d)
    }
    fn bottom(&self, r: isize, c: isize) -> VertexId {
        self.v(r, 2 * (c + 1))
    }
    fn lower_left(&self, r: isize, c: isize) -> VertexId {
        self.v(r, 2 * self.wrap(c, self.d) as isize + 1)
    }
    fn zig(&self, r: isize, k: isize) -> EdgeId {
        let d = self.d;
        3 * d * self.wrap(r, d) + self.wrap(k, 2 * d)
    }
    fn vert(&self, r: isize, c: isize) -> EdgeId {
        let d = self.d;
        3 * d * self.wrap(r, d) + 2 * d + self.wrap(c, d)
    }
    fn plaq(&self, r: isize, c: isize) -> PlaquetteId {
        self.wrap(r, self.d) * self.d + self.wrap(c, self.d)
    }
}

fn shared_vertex(ends: &[[VertexId; 2]], e1: EdgeId, e2: EdgeId) -> VertexId {
    let [a, b] = ends[e1];
    if ends[e2].contains(&a) {
        a
    } else {
        assert!(ends[e2].contains(&b), "hexagon edges {e1} and {e2} are not adjacent");
        b
    }
}

fn other_end(ends: &[[VertexId; 2]], e: EdgeId, v: VertexId) -> VertexId {
    let [a, b] = ends[e];
    if a == v {
        b
    } else {
        a
    }
}

fn other_plaquette(plaqs: &[[PlaquetteId; 2]], e: EdgeId, p: PlaquetteId) -> PlaquetteId {
    let [a, b] = plaqs[e];
    if a == p {
        b
    } else {
        a
    }
}

fn all_pairs_bfs(adj: &[Vec<usize>]) -> Vec<u16> {
    let n = adj.len();
    let mut dist = vec![u16::MAX; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if row[y] == u16::MAX {
                    row[y] = row[x] + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_distance() {
        assert_eq!(CodeLattice::new(1).unwrap_err(), LatticeError::DistanceTooSmall(1));
        assert!(CodeLattice::new(0).is_err());
    }

    #[test]
    fn counts() {
        for d in 2..=13 {
            let lat = CodeLattice::new(d).unwrap();
            assert_eq!(lat.n_edges(), 3 * d * d);
            assert_eq!(3 * lat.n_vertices(), 2 * lat.n_edges());
        }
    }

    #[test]
    fn translation_is_a_symmetry() {
        let lat = CodeLattice::new(5).unwrap();
        for p in 0..lat.n_plaquettes() {
            let q = lat.translate_plaquette(p, 2, 3);
            let moved: Vec<_> = lat.support(p).iter().map(|&e| lat.translate_edge(e, 2, 3)).collect();
            assert_eq!(&moved[..], &lat.support(q)[..]);
        }
        for e in 0..lat.n_edges() {
            let [a, b] = lat.edge_ends(e);
            let t = lat.translate_edge(e, 4, 1);
            let mut want = [lat.translate_vertex(a, 4, 1), lat.translate_vertex(b, 4, 1)];
            let mut got = lat.edge_ends(t);
            want.sort();
            got.sort();
            assert_eq!(want, got);
        }
    }
}
