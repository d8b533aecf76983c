//! One line per acceptance criterion; the test fails if any criterion does.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectra_core::eigen::{eig_sym_dense, eig_sym_tridiag, DenseMatrix};
use spectra_core::experiments::{run_experiment, ExperimentReport};
use spectra_core::graph::RootedGraph;
use spectra_core::herglotz::{rank_one_transform, tridiag_resolvent_diag, MFunction, MValue};
use spectra_core::localization::{build_partition, PartitionKind};
use spectra_core::operator::{Convention, SchrodingerOperator};
use spectra_core::rlimit::canonical_form;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(name: &str) -> (ExperimentReport, Duration) {
    let t = Instant::now();
    let report = run_experiment(name, &BTreeMap::new(), 1, None).expect(name);
    (report, t.elapsed())
}

/// All claims whose description contains one of `keys` must pass, and at least one must exist per key.
fn claims_pass(report: &ExperimentReport, keys: &[&str]) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut failed = Vec::new();
    for key in keys {
        let hits: Vec<_> = report.claims.iter().filter(|c| c.description.contains(key)).collect();
        if hits.is_empty() {
            ok = false;
            failed.push(format!("missing claim '{key}'"));
        }
        for c in hits.into_iter().filter(|c| !c.pass) {
            ok = false;
            failed.push(format!("{} (observed {})", c.description, c.observed));
        }
    }
    (ok, failed)
}

fn scenario(name: &str, keys: &[&str], limit: Option<Duration>) -> Outcome {
    let (report, elapsed) = run(name);
    judge(&report, elapsed, keys, limit)
}

fn judge(report: &ExperimentReport, elapsed: Duration, keys: &[&str], limit: Option<Duration>) -> Outcome {
    let (mut pass, mut failed) = claims_pass(report, keys);
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            failed.push(format!("runtime {elapsed:?} exceeds {limit:?}"));
        }
    }
    let detail = if failed.is_empty() {
        format!("{} claims, {:.1}s", report.claims.len(), elapsed.as_secs_f64())
    } else {
        failed.join("; ")
    };
    Outcome { pass, detail }
}

fn m_functions() -> Vec<MFunction> {
    vec![
        MFunction::HalfLine { scale: 1.0 },
        MFunction::HalfLine { scale: 2.0 },
        MFunction::Line { scale: 1.0 },
        MFunction::Tree { d: 3 },
        MFunction::Tree { d: 4 },
        MFunction::HalfLineSite { k: 3, scale: 1.0 },
        rank_one_transform(MFunction::HalfLine { scale: 1.0 }, 0.7),
        rank_one_transform(MFunction::Tree { d: 3 }, 2.0),
        rank_one_transform(MFunction::Line { scale: 1.0 }, -5.0),
    ]
}

fn finite(f: &MFunction, z: Complex64) -> Complex64 {
    match f.eval(z).unwrap() {
        MValue::Finite(v) => v,
        MValue::Pole => panic!("pole at {z}"),
    }
}

fn criterion_8() -> Outcome {
    let mut worst_oracle = 0.0f64;
    let mut herglotz_ok = true;
    let mut worst_norm = 0.0f64;
    let points: Vec<Complex64> = (0..20)
        .map(|i| Complex64::new(-4.5 + 9.0 * (i % 10) as f64 / 9.0, if i < 10 { 0.25 } else { 1.5 }))
        .collect();
    for f in m_functions() {
        let (a, b, site) = f.truncated_model(4000);
        for &z in &points {
            let err = (finite(&f, z) - tridiag_resolvent_diag(&a, &b, z, site)).norm();
            worst_oracle = worst_oracle.max(err);
        }
        for im in [0.1, 1.0, 10.0] {
            for k in 0..41 {
                let z = Complex64::new(-10.0 + 0.5 * k as f64, im);
                herglotz_ok &= finite(&f, z).im > 0.0;
            }
        }
        for radius in [1e2, 1e3, 1e4] {
            for angle in [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0] {
                let z = Complex64::from_polar(radius, angle);
                worst_norm = worst_norm.max(z.norm_sqr() * (finite(&f, z) + z.inv()).norm());
            }
        }
    }
    for alpha in [-5.0, -1.0, 0.5, 2.0, 5.0] {
        let f = rank_one_transform(MFunction::Tree { d: 3 }, alpha);
        for im in [0.1, 1.0, 10.0] {
            for k in 0..41 {
                herglotz_ok &= finite(&f, Complex64::new(-10.0 + 0.5 * k as f64, im)).im > 0.0;
            }
        }
    }
    let pass = worst_oracle < 1e-6 && herglotz_ok && worst_norm <= 50.0;
    Outcome {
        pass,
        detail: format!("oracle err {worst_oracle:.2e}, herglotz {herglotz_ok}, |z|²|F+1/z| ≤ {worst_norm:.3}"),
    }
}

fn random_graph(rng: &mut ChaCha8Rng) -> RootedGraph {
    let n = rng.gen_range(3..30);
    let mut edges = BTreeSet::new();
    for v in 1..n {
        edges.insert((rng.gen_range(0..v), v));
    }
    for _ in 0..rng.gen_range(0..n) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    RootedGraph::from_edges(n, 0, &edges.into_iter().collect::<Vec<_>>()).unwrap()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();

    let mut worst_pou = 0.0f64;
    let mut coherent = true;
    let mut interlace = true;
    let mut invariant = 0;
    for trial in 0..200 {
        let g = random_graph(&mut rng);
        let n = g.vertex_count();
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0..3) as f64).collect();
        let h = SchrodingerOperator::new(&g, q.clone(), Convention::Adjacency).unwrap();

        let kind = if trial % 2 == 0 { PartitionKind::Pyramid } else { PartitionKind::Annuli };
        let p = build_partition(&g, &h, kind, 1 + trial % 6).unwrap();
        for &v in &p.interior {
            worst_pou = worst_pou.max((p.partition_sum(v) - 1.0).abs());
        }

        let c = rng.gen_range(0..n);
        for r in 1..4 {
            let small = h.ball_matrix(c, r - 1);
            let big = h.ball_matrix(c, r);
            coherent &= big.view.members[..small.view.len()] == small.view.members[..];
            coherent &= big.entries.corner(small.view.len()) == small.entries;
            let inner = eig_sym_dense(&small.entries, false).unwrap().values;
            let outer = eig_sym_dense(&big.entries, false).unwrap().values;
            let shift = outer.len() - inner.len();
            for k in 0..inner.len() {
                interlace &= outer[k] <= inner[k] + 1e-10 && inner[k] <= outer[k + shift] + 1e-10;
            }
        }

        let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
        let labels: Vec<i64> = q.iter().map(|&x| x as i64).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut permuted = vec![Vec::new(); n];
        let mut plabels = vec![0; n];
        for v in 0..n {
            permuted[perm[v]] = adj[v].iter().map(|&u| perm[u]).collect();
            plabels[perm[v]] = labels[v];
        }
        if canonical_form(&adj, 0, &labels).encoding == canonical_form(&permuted, perm[0], &plabels).encoding {
            invariant += 1;
        }
    }

    let mut worst_tri = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..60);
        let a: Vec<f64> = (1..n).map(|_| rng.gen_range(0.05..3.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let tri = eig_sym_tridiag(&a, &b).unwrap();
        let dense = eig_sym_dense(&DenseMatrix::tridiagonal(&a, &b), false).unwrap().values;
        for (x, y) in tri.iter().zip(&dense) {
            worst_tri = worst_tri.max((x - y).abs());
        }
    }

    if worst_pou > 1e-12 {
        failures.push(format!("partition of unity off by {worst_pou:.2e}"));
    }
    if !coherent {
        failures.push("ball matrices not nested".into());
    }
    if invariant != 200 {
        failures.push(format!("canonical invariance {invariant}/200"));
    }
    if worst_tri > 1e-10 {
        failures.push(format!("tridiagonal vs dense {worst_tri:.2e}"));
    }
    if !interlace {
        failures.push("interlacing violated".into());
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("pou {worst_pou:.1e}, canonical 200/200, tridiag {worst_tri:.1e}")
        } else {
            failures.join("; ")
        },
    }
}

fn main() {
    let (comb, comb_time) = run("comb-sparse-cycles");
    let outcomes = vec![
        (1, scenario("sparse-tree", &["z0", "z1", "matches the truncated J_", "approaches z0"], Some(Duration::from_secs(30)))),
        (2, scenario("counterexample", &["residual² = 2/n", "certificate witness", "outside the union"], Some(Duration::from_secs(120)))),
        (3, judge(&comb, comb_time, &["comb sweep hull", "comb edge"], Some(Duration::from_secs(60)))),
        (4, judge(&comb, comb_time, &["IS_3", "IS_4"], None)),
        (5, scenario("znxn", &["finite-section hull", "at least four", "line pattern", "lattice pattern"], None)),
        (6, scenario("jacobi-limits", &["T_3: ball spectrum", "T_4: ball spectrum"], None)),
        (7, scenario("localization-bounds", &["log-log slope", "interior diagonal", "annuli"], None)),
        (8, criterion_8()),
        (9, criterion_9()),
    ];
    for (n, o) in &outcomes {
        println!("criterion {n}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !outcomes.iter().all(|(_, o)| o.pass) {
        std::process::exit(1);
    }
}
