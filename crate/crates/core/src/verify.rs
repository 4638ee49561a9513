//! Self-checks of the exact algebra and the image mapping, run by
//! `semion verify`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    beta_product, commutes, is_hermitian, naive_plaquette_op, plaquette_op, solve_string_phase, squares_to_identity,
    syndrome_distribution, vertex_op, walsh_coefficients, DEFAULT_CAP,
};
use crate::dataset::{plaquette_cell, vertex_cell};
use crate::lattice::{CodeLattice, EdgeId, Orientation};

pub const SUITES: &[&str] = &["fixtures", "table1", "hermitian", "commutators", "naive", "parseval", "mapping"];

pub fn default_fixture_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark}  {:<12} {:<34} {}", self.suite, self.name, self.detail)
    }
}

fn check(suite: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult { suite, name: name.into(), passed, detail: detail.into() }
}

/// Plaquette-syndrome probabilities of a single X error, in sixteenths,
/// for orientations A, B, C and the excitation pattern of the four
/// surrounding plaquettes.
pub const SINGLE_EDGE_TABLE: [([bool; 4], [u32; 3]); 8] = [
    ([false, false, false, false], [9, 1, 9]),
    ([true, true, false, false], [1, 1, 1]),
    ([true, false, true, false], [1, 1, 1]),
    ([false, true, true, false], [1, 9, 1]),
    ([true, false, false, true], [1, 1, 1]),
    ([false, true, false, true], [1, 1, 1]),
    ([false, false, true, true], [1, 1, 1]),
    ([true, true, true, true], [1, 1, 1]),
];

fn orientation_column(o: Orientation) -> usize {
    match o {
        Orientation::A => 0,
        Orientation::B => 1,
        Orientation::C => 2,
    }
}

/// Exact single-edge distribution keyed by the `(p, q, r, s)` pattern.
pub fn single_edge_distribution(lat: &CodeLattice, e: EdgeId) -> BTreeMap<[bool; 4], f64> {
    let dist = syndrome_distribution(lat, &[e], DEFAULT_CAP).expect("single edge within cap");
    let around = lat.surrounding_plaquettes(e).expect("edge in range");
    dist.sectors()
        .iter()
        .map(|s| {
            let excited: Vec<usize> = dist.excited_plaquettes(s.pattern).collect();
            (around.map(|p| excited.contains(&p)), s.probability)
        })
        .collect()
}

fn read_digits(path: &Path) -> Result<Vec<u8>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.trim().parse::<u8>().map_err(|e| format!("{}: {e}", path.display())))
        .collect()
}

fn fixture_checks(dir: &Path) -> Vec<CheckResult> {
    let lat = CodeLattice::new(4).expect("d=4");
    let mut out = Vec::new();
    for (file, table) in [
        ("beta_d4_p1.txt", beta_product(&lat, 0).exponents().to_vec()),
        ("bp_d4_p1.txt", plaquette_op(&lat, 0).phases().exponents().to_vec()),
    ] {
        let result = match read_digits(&dir.join(file)) {
            Ok(want) if want == table => check("fixtures", file, true, "4096 states"),
            Ok(want) if want.len() != table.len() => check("fixtures", file, false, format!("{} entries", want.len())),
            Ok(want) => {
                let first = want.iter().zip(&table).position(|(a, b)| a != b).unwrap();
                check("fixtures", file, false, format!("first mismatch at state {first}"))
            }
            Err(e) => check("fixtures", file, false, e),
        };
        out.push(result);
    }
    out
}

fn table_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for d in [4, 5] {
        let lat = CodeLattice::new(d).expect("distance");
        for o in [Orientation::A, Orientation::B, Orientation::C] {
            let col = orientation_column(o);
            let mut worst: f64 = 0.0;
            let mut count = 0;
            for e in (0..lat.n_edges()).filter(|&e| lat.orientation(e) == o) {
                let dist = single_edge_distribution(&lat, e);
                for (pattern, sixteenths) in SINGLE_EDGE_TABLE {
                    let got = dist.get(&pattern).copied().unwrap_or(0.0);
                    worst = worst.max((got - sixteenths[col] as f64 / 16.0).abs());
                }
                if dist.len() != 8 {
                    worst = f64::INFINITY;
                }
                count += 1;
            }
            out.push(check("table1", format!("d={d} orientation {o:?}"), worst <= 1e-12, format!("{count} edges, max error {worst:.1e}")));
        }
    }
    out
}

fn hermitian_checks() -> Vec<CheckResult> {
    let lat = CodeLattice::new(4).expect("d=4");
    let herm = (0..16).filter(|&p| !is_hermitian(&plaquette_op(&lat, p))).count();
    let square = (0..16).filter(|&p| !squares_to_identity(&plaquette_op(&lat, p))).count();
    vec![
        check("hermitian", "B_p self-adjoint (d=4)", herm == 0, format!("{herm} of 16 fail")),
        check("hermitian", "B_p squares to one (d=4)", square == 0, format!("{square} of 16 fail")),
    ]
}

fn overlapping_pairs(lat: &CodeLattice) -> Vec<(usize, usize)> {
    let n = lat.n_plaquettes();
    (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .filter(|&(p, q)| lat.support(p).iter().any(|e| lat.support(q).contains(e)))
        .collect()
}

fn commutator_checks() -> Vec<CheckResult> {
    let lat = CodeLattice::new(4).expect("d=4");
    let pairs = overlapping_pairs(&lat);
    let bad_pp = pairs.iter().filter(|&&(p, q)| commutes(&plaquette_op(&lat, p), &plaquette_op(&lat, q)) != Ok(true)).count();
    let mut bad_pv = 0;
    let mut n_pv = 0;
    for p in 0..16 {
        let bp = plaquette_op(&lat, p);
        for v in 0..lat.n_vertices() {
            n_pv += 1;
            if commutes(&bp, &vertex_op(&lat, v)) != Ok(true) {
                bad_pv += 1;
            }
        }
    }
    vec![
        check("commutators", "[B_p, B_q] = 0 (d=4)", bad_pp == 0, format!("{bad_pp} of {} overlapping pairs fail", pairs.len())),
        check("commutators", "[B_p, Q_v] = 0 (d=4)", bad_pv == 0, format!("{bad_pv} of {n_pv} pairs fail")),
    ]
}

fn naive_checks() -> Vec<CheckResult> {
    let lat = CodeLattice::new(4).expect("d=4");
    let pairs = overlapping_pairs(&lat);
    let failing = pairs
        .iter()
        .filter(|&&(p, q)| commutes(&naive_plaquette_op(&lat, p), &naive_plaquette_op(&lat, q)) != Ok(true))
        .count();
    let non_herm = (0..16).filter(|&p| !is_hermitian(&naive_plaquette_op(&lat, p))).count();
    vec![
        check("naive", "naive plaquettes break commutation", failing > 0, format!("{failing} of {} pairs anticommute", pairs.len())),
        check("naive", "naive plaquettes self-adjoint", non_herm == 0, format!("{non_herm} of 16 not self-adjoint")),
    ]
}

fn random_cluster<R: Rng>(lat: &CodeLattice, size: usize, rng: &mut R) -> Vec<EdgeId> {
    let mut set = vec![rng.gen_range(0..lat.n_edges())];
    while set.len() < size {
        let mut frontier: Vec<EdgeId> = set
            .iter()
            .flat_map(|&e| lat.edge_ends(e))
            .flat_map(|v| lat.vertex_edges(v))
            .filter(|e| !set.contains(e))
            .collect();
        frontier.sort();
        frontier.dedup();
        set.push(frontier[rng.gen_range(0..frontier.len())]);
    }
    set.sort();
    set
}

fn parseval_checks() -> Vec<CheckResult> {
    let lat = CodeLattice::new(7).expect("d=7");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut worst_c, mut worst_p): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let size = rng.gen_range(1..=6);
        let cluster = random_cluster(&lat, size, &mut rng);
        let f = solve_string_phase(&lat, &cluster, DEFAULT_CAP).expect("cluster within cap");
        let c = walsh_coefficients(&f, DEFAULT_CAP).expect("within cap");
        worst_c = worst_c.max((c.norm_sqr_sum() - 1.0).abs());
        let dist = syndrome_distribution(&lat, &cluster, DEFAULT_CAP).expect("within cap");
        worst_p = worst_p.max((dist.total() - 1.0).abs());
    }
    vec![
        check("parseval", "sum |c|^2 = 1", worst_c <= 1e-10, format!("100 clusters, max deviation {worst_c:.1e}")),
        check("parseval", "sum P(s) = 1", worst_p <= 1e-10, format!("100 clusters, max deviation {worst_p:.1e}")),
    ]
}

/// Parse the padded d=4 mapping table: rows top to bottom, `vN`, `pN`, `x`.
pub fn read_mapping_fixture(path: &Path) -> Result<Vec<Vec<String>>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows: Vec<Vec<String>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect();
    rows.reverse();
    Ok(rows)
}

fn mapping_checks(dir: &Path) -> Vec<CheckResult> {
    let d = 4;
    let mut grid = vec![vec!["x".to_string(); 2 * d]; 2 * d];
    for v in 0..2 * d * d {
        let (i, j) = vertex_cell(d, v);
        grid[i - 1][j - 1] = format!("v{}", v + 1);
    }
    for p in 0..d * d {
        let (i, j) = plaquette_cell(d, p);
        grid[i - 1][j - 1] = format!("p{}", p + 1);
    }
    let mut out = vec![match read_mapping_fixture(&dir.join("mapping_d4.txt")) {
        Ok(rows) if rows.len() == 2 * d + 2 && rows.iter().all(|r| r.len() == 2 * d + 2) => {
            let bad = (0..2 * d).flat_map(|i| (0..2 * d).map(move |j| (i, j))).filter(|&(i, j)| rows[i + 1][j + 1] != grid[i][j]).count();
            check("mapping", "d=4 placement vs table", bad == 0, format!("{bad} of 64 cells differ"))
        }
        Ok(rows) => check("mapping", "d=4 placement vs table", false, format!("fixture has {} rows", rows.len())),
        Err(e) => check("mapping", "d=4 placement vs table", false, e),
    }];
    let mut bad = Vec::new();
    for d in 2..=13 {
        let mut cells: Vec<(usize, usize)> = (0..2 * d * d).map(|v| vertex_cell(d, v)).chain((0..d * d).map(|p| plaquette_cell(d, p))).collect();
        cells.sort();
        cells.dedup();
        if cells.len() != 3 * d * d || 4 * d * d - cells.len() != d * d {
            bad.push(d);
        }
    }
    out.push(check("mapping", "injective, d*d fillers (d=2..13)", bad.is_empty(), format!("failing distances {bad:?}")));
    out
}

/// Run the named suite, or all of them.
pub fn run_checks(fixture_dir: &Path, only: Option<&str>) -> Result<Vec<CheckResult>, String> {
    if let Some(s) = only {
        if !SUITES.contains(&s) {
            return Err(format!("unknown suite {s:?}; choose from {}", SUITES.join(", ")));
        }
    }
    let want = |s: &str| only.is_none_or(|o| o == s);
    let mut out = Vec::new();
    if want("fixtures") {
        out.extend(fixture_checks(fixture_dir));
    }
    if want("table1") {
        out.extend(table_checks());
    }
    if want("hermitian") {
        out.extend(hermitian_checks());
    }
    if want("commutators") {
        out.extend(commutator_checks());
    }
    if want("naive") {
        out.extend(naive_checks());
    }
    if want("parseval") {
        out.extend(parseval_checks());
    }
    if want("mapping") {
        out.extend(mapping_checks(fixture_dir));
    }
    Ok(out)
}
