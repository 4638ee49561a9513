#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ndarray::ArrayView2;
use num_complex::Complex64;
use rand::Rng;
use semion_core::algebra::SignedPermutationOp;
use semion_core::bits::Mask;
use semion_core::lattice::{CodeLattice, EdgeId, Orientation, SiteKind};
use semion_core::mlp::Mlp;
use semion_core::rng::{sample_rng, RngTrace};
use semion_core::syndrome::sample_plaquette_syndrome;

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

/// Parse a fixture: `#` header lines, then one Z4 digit per line.
pub fn read_fixture(name: &str) -> (Vec<String>, Vec<u8>) {
    let text = std::fs::read_to_string(format!("{FIXTURES}/{name}")).expect("fixture readable");
    let mut header = Vec::new();
    let mut values = Vec::new();
    for line in text.lines() {
        if let Some(h) = line.strip_prefix('#') {
            header.push(h.trim().to_string());
        } else if !line.trim().is_empty() {
            values.push(line.trim().parse().expect("digit"));
        }
    }
    (header, values)
}

/// The edge of hex(1, 1) with the given orientation, and Table-I reference
/// probabilities (in sixteenths) indexed by the `(p, q, r, s)` pattern.
pub fn table_one(orientation: Orientation) -> BTreeMap<[bool; 4], u32> {
    let rows: [(&str, [u32; 3]); 8] = [
        ("----", [9, 1, 9]),
        ("++--", [1, 1, 1]),
        ("+-+-", [1, 1, 1]),
        ("-++-", [1, 9, 1]),
        ("+--+", [1, 1, 1]),
        ("-+-+", [1, 1, 1]),
        ("--++", [1, 1, 1]),
        ("++++", [1, 1, 1]),
    ];
    let col = match orientation {
        Orientation::A => 0,
        Orientation::B => 1,
        Orientation::C => 2,
    };
    rows.iter()
        .map(|(s, p)| {
            let b: Vec<bool> = s.chars().map(|c| c == '+').collect();
            ([b[0], b[1], b[2], b[3]], p[col])
        })
        .collect()
}

pub fn edge_of(lat: &CodeLattice, orientation: Orientation, p: usize) -> EdgeId {
    // hexagon positions 2 (A), 4 (B), 3 (C)
    let h = lat.hexagon(p);
    match orientation {
        Orientation::A => h[1],
        Orientation::B => h[3],
        Orientation::C => h[2],
    }
}

/// A random connected edge set of the given size grown from a random edge.
pub fn random_cluster<R: Rng>(lat: &CodeLattice, size: usize, rng: &mut R) -> Vec<EdgeId> {
    let mut set = BTreeSet::new();
    set.insert(rng.gen_range(0..lat.n_edges()));
    while set.len() < size {
        let frontier: BTreeSet<EdgeId> = set
            .iter()
            .flat_map(|&e| lat.edge_ends(e))
            .flat_map(|v| lat.vertex_edges(v))
            .filter(|e| !set.contains(e))
            .collect();
        let v: Vec<EdgeId> = frontier.into_iter().collect();
        set.insert(v[rng.gen_range(0..v.len())]);
    }
    set.into_iter().collect()
}

pub fn i_pow(g: i64) -> Complex64 {
    let mut z = Complex64::new(1.0, 0.0);
    for _ in 0..g.rem_euclid(4) {
        z *= Complex64::new(0.0, 1.0);
    }
    z
}

/// Direct evaluation of the plaquette phase from the occupation numbers,
/// `n-_i = j_i` and `n+_i = 1 - j_i`, without lookup tables.
pub fn plaquette_phase_direct(j: &[i64; 12], with_vertex_phases: bool) -> Complex64 {
    let nm = |i: usize| j[i - 1];
    let np = |i: usize| 1 - j[i - 1];
    let mut z = Complex64::new(1.0, 0.0);
    for k in 1..=6 {
        let prev = if k == 1 { 6 } else { k - 1 };
        if nm(prev) * np(k) == 1 {
            z = -z;
        }
    }
    if with_vertex_phases {
        let factors = [
            nm(12) * (nm(1) * nm(6) - np(1) * np(6)),
            nm(7) * (np(1) * np(2) - nm(1) * nm(2)),
            np(8) * (nm(2) * np(3) - np(2) * nm(3)),
            nm(9) * (nm(3) * nm(4) - np(3) * np(4)),
            nm(10) * (np(4) * np(5) - nm(4) * nm(5)),
            np(11) * (nm(5) * np(6) - np(5) * nm(6)),
        ];
        for f in factors {
            z *= i_pow(f);
        }
    }
    z
}

/// Test-side dense oracle: both orders of a product as complex amplitudes.
pub fn dense_commutator_sign(a: &SignedPermutationOp, b: &SignedPermutationOp) -> Option<i32> {
    let joint: Vec<EdgeId> =
        a.support().iter().chain(b.support()).copied().collect::<BTreeSet<_>>().into_iter().collect();
    let act = |op: &SignedPermutationOp, state: &BTreeSet<EdgeId>| -> (BTreeSet<EdgeId>, Complex64) {
        let local = op.support().iter().enumerate().filter(|(_, e)| state.contains(e)).fold(0usize, |acc, (i, _)| acc | 1 << i);
        let mut next = state.clone();
        for e in op.x_edges() {
            if !next.remove(&e) {
                next.insert(e);
            }
        }
        (next, op.phases().phase(local))
    };
    let mut sign = None;
    for m in 0..1u64 << joint.len() {
        let s: BTreeSet<EdgeId> = joint.iter().enumerate().filter(|(i, _)| (m >> i) & 1 == 1).map(|(_, &e)| e).collect();
        let (s1, z1) = act(b, &s);
        let (s2, z2) = act(a, &s1);
        let (t1, w1) = act(a, &s);
        let (t2, w2) = act(b, &t1);
        assert_eq!(s2, t2);
        let ratio = z1 * z2 / (w1 * w2);
        let this = if ratio == Complex64::new(1.0, 0.0) {
            1
        } else if ratio == Complex64::new(-1.0, 0.0) {
            -1
        } else {
            return None;
        };
        match sign {
            None => sign = Some(this),
            Some(s) if s != this => return None,
            _ => {}
        }
    }
    sign
}

/// Minimum total distance over all perfect pairings, by recursion.
pub fn brute_min(lat: &CodeLattice, kind: SiteKind, sites: &[usize]) -> usize {
    if sites.is_empty() {
        return 0;
    }
    let first = sites[0];
    (1..sites.len())
        .map(|i| {
            let rest: Vec<usize> = sites[1..].iter().enumerate().filter(|&(j, _)| j + 1 != i).map(|(_, &s)| s).collect();
            lat.distance(kind, first, sites[i]) + brute_min(lat, kind, &rest)
        })
        .min()
        .unwrap()
}

/// Sampled plaquette patterns around one edge of orientation `o` (d=5),
/// indexed by its four surrounding plaquettes.
pub fn single_edge_frequencies(o: Orientation, n: u64, seed: u64) -> (BTreeMap<[bool; 4], u64>, [usize; 4]) {
    let lat = CodeLattice::new(5).unwrap();
    let e = edge_of(&lat, o, 6);
    let sur = lat.surrounding_plaquettes(e).unwrap();
    let x = Mask::from_indices(lat.n_edges(), [e]);
    let mut counts = BTreeMap::new();
    for index in 0..n {
        let mut rng = sample_rng(RngTrace { master_seed: seed, index });
        let (bits, _, flags) = sample_plaquette_syndrome(&lat, &x, &mut rng);
        assert!(!flags.used_fallback && !flags.wrapped_component);
        let mut outside = bits.clone();
        for p in sur {
            outside.set(p, false);
        }
        assert!(outside.is_empty());
        *counts.entry(sur.map(|p| bits.get(p))).or_insert(0) += 1;
    }
    (counts, sur)
}

/// Largest relative difference between analytic gradients and central
/// differences over every parameter.
pub fn max_relative_gradient_error(net: &mut Mlp, x: ArrayView2<f64>, y: &[u8]) -> f64 {
    let (_, grads) = net.loss_and_gradients(x, y).unwrap();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for pi in 0..net.params().len() {
        for k in 0..net.params()[pi].len() {
            let orig = net.params()[pi].as_slice().unwrap()[k];
            net.params_mut()[pi].as_slice_mut().unwrap()[k] = orig + h;
            let (lp, _) = net.loss_and_gradients(x, y).unwrap();
            net.params_mut()[pi].as_slice_mut().unwrap()[k] = orig - h;
            let (lm, _) = net.loss_and_gradients(x, y).unwrap();
            net.params_mut()[pi].as_slice_mut().unwrap()[k] = orig;
            let numeric = (lp - lm) / (2.0 * h);
            let analytic = grads[pi].as_slice().unwrap()[k];
            let scale = numeric.abs().max(analytic.abs());
            // biases feeding batch norm have an exactly zero gradient
            if scale < 1e-8 {
                assert!((numeric - analytic).abs() < 1e-9, "param {pi}[{k}]: {analytic} vs {numeric}");
                continue;
            }
            worst = worst.max((numeric - analytic).abs() / scale);
        }
    }
    worst
}
