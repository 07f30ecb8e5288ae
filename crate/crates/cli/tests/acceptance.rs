//! Acceptance checks, one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topocube::complex::{
    build_complex, build_full_complex, components, enumerate_solutions, restrict_to_coords, DEFAULT_CAP,
};
use topocube::formula::{parse_dimacs, random_ksat, split_to_3cnf, Clause, CnfFormula, Origin};
use topocube::gadgets::{
    combine, make_gadget_b, make_ring_gadget, ring_certificate, verify_gadget_family, VarAllocator,
};
use topocube::graph::SimpleGraph;
use topocube::homology::{betti_numbers, betti_of_solutions, verify_boundary_squared};
use topocube::querymodel::{adversary_run, AdversaryFamily, ScriptedStrategy, Verdict};
use topocube::randomlab::{mc_face_survival, phi, phi_root, FaceStatParams, RandomLabError, SurvivalVariant};
use topocube::spectral::{
    cheeger, config_graph, effective_coupling_bound, laplacian_spectrum, CheegerMethod, LaplacianKind, WeightedGraph,
    EXACT_CHEEGER_LIMIT,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Components of the single-flip graph on `sol`, by flood fill.
fn flip_components(n: usize, sol: &[u64]) -> usize {
    let set: std::collections::HashSet<u64> = sol.iter().copied().collect();
    let mut seen = std::collections::HashSet::new();
    let mut count = 0;
    for &s in sol {
        if !seen.insert(s) {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for b in 0..n {
                let y = x ^ 1 << b;
                if set.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    count
}

fn random_clause(rng: &mut ChaCha8Rng, n: usize, width: usize) -> Clause {
    let mut vars: Vec<usize> = (1..=n).collect();
    for i in 0..width {
        let j = rng.gen_range(i..n);
        vars.swap(i, j);
    }
    let lits = vars[..width].iter().map(|&v| if rng.gen() { v as i32 } else { -(v as i32) }).collect();
    Clause::new(lits).expect("distinct nonzero literals")
}

fn c1_circle() -> Outcome {
    let start = Instant::now();
    let f = match parse_dimacs("c circle\np cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n") {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("parse failed: {e}")),
    };
    let k = build_full_complex(&enumerate_solutions(&f, DEFAULT_CAP).expect("3 variables"));
    let b = betti_numbers(&k, 2, false).expect("complete complex").betti;
    let t = start.elapsed();
    outcome(b == [1, 1, 0] && t < Duration::from_secs(1), format!("betti {b:?} in {t:?}"))
}

fn c2_gadget_b() -> Outcome {
    // Gadget B inside a larger formula: a second copy plus an unrelated clause.
    let mut alloc = VarAllocator::new(0);
    let gs = vec![make_gadget_b(0, &mut alloc), make_gadget_b(1, &mut alloc)];
    let extra = alloc.fresh_block(2);
    let mut f = combine(&gs).with_num_vars(alloc.used());
    f.push_clause(Clause::new(vec![extra[0] as i32, -(extra[1] as i32), gs[0].support[0] as i32]).unwrap());
    let s = enumerate_solutions(&f, DEFAULT_CAP).expect("small formula");
    let local = restrict_to_coords(&s, &gs[1].support).expect("valid coordinates");
    let k = build_full_complex(&local);
    let counts = k.face_counts();
    let faces = [0, 1, 2].map(|d| counts.get(d).copied().unwrap_or(0));
    let b1 = betti_numbers(&k, 1, false).expect("complete complex").get(1);
    outcome(faces == [6, 6, 0] && b1 == 1, format!("faces {faces:?}, beta1 {b1}"))
}

fn c3_ring() -> Outcome {
    let r = match ring_certificate(DEFAULT_CAP) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("certificate failed: {e}")),
    };
    let rows = &r.corner_table.satisfying_rows;
    let checks = [
        ("matrix matches printed", r.reconstructed_matches_printed),
        ("rank 3", r.reconstructed_rank == 3),
        ("nullity 1", r.reconstructed_nullity == 1),
        ("chain is cycle", r.ring_chain_is_cycle),
        ("chain not boundary", r.ring_chain_is_cycle && !r.ring_chain_is_boundary),
        ("corner rows {1,4,5,8}", rows == &[1, 4, 5, 8]),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!(
            "printed rank {} nullity {}; reconstructed rank {} nullity {}; squares in Sol: {}; corner rows {:?}; failed: {:?}",
            r.printed_rank,
            r.printed_nullity,
            r.reconstructed_rank,
            r.reconstructed_nullity,
            r.squares_in_solution_set,
            rows,
            failed
        ),
    )
}

fn c4_split_invariance() -> Outcome {
    const CASES: usize = 500;
    // Keeps every split formula within 20 variables.
    const AUX_BUDGET: usize = 10;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let densities = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0];
    let mut mismatches = Vec::new();
    let mut wide = 0;
    for case in 0..CASES {
        let n = rng.gen_range(3..=10);
        let m = ((densities[case % densities.len()] * n as f64).round() as usize).max(1);
        let mut aux = 0;
        let mut clauses = Vec::with_capacity(m);
        for _ in 0..m {
            let mut w = rng.gen_range(1..=6.min(n));
            if w > 3 && aux + (w - 3) > AUX_BUDGET {
                w = 3;
            }
            aux += w.saturating_sub(3);
            wide += usize::from(w > 3);
            clauses.push(random_clause(&mut rng, n, w));
        }
        let f = CnfFormula::new(n, clauses, Origin::Generated).expect("in range");
        let (g, _) = split_to_3cnf(&f);
        let a = betti_of_solutions(&enumerate_solutions(&f, DEFAULT_CAP).unwrap(), 2).betti;
        let b = betti_of_solutions(&enumerate_solutions(&g, DEFAULT_CAP).unwrap(), 2).betti;
        if a != b {
            mismatches.push((case, a, b));
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches.is_empty() && t < Duration::from_secs(300),
        format!(
            "{CASES} formulas, {wide} wide clauses, {} mismatches {:?}, {t:?}",
            mismatches.len(),
            mismatches.first()
        ),
    )
}

fn c5_ring_independence() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for m in 1..=2 {
        let mut alloc = VarAllocator::new(0);
        let gs: Vec<_> = (0..m).map(|i| make_ring_gadget(i, &mut alloc)).collect();
        match verify_gadget_family(&combine(&gs), &gs, DEFAULT_CAP) {
            Ok(r) => {
                let b2 = r.full_complex_betti.as_ref().map(|b| b.get(2).copied().unwrap_or(0));
                let ok = b2.is_some_and(|b| b >= m) && r.joint_rank == m;
                pass &= ok;
                parts.push(format!("m={m}: beta {:?}, joint rank {}", r.full_complex_betti, r.joint_rank));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("m={m}: {e}"));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn c6_face_statistics() -> Outcome {
    let start = Instant::now();
    let trials = 10_000;
    let v = FaceStatParams::new(10, 0, 10).unwrap();
    let ev = mc_face_survival(&v, trials, 6, SurvivalVariant::Exhaustive).unwrap();
    let tv = 1024.0 * 0.875f64.powi(10);
    // k = 1: a clause kills an edge iff its literals on the fixed coordinates
    // are all false, so q = Σ_t P(t fixed vars) 2^-t.
    let q1: f64 = (0..=3u64).map(|t| binom(9, t) * binom(1, 3 - t) / binom(10, 3) * 0.5f64.powi(t as i32)).sum();
    let te = 10.0 * 512.0 * (1.0 - q1).powi(10);
    let e = FaceStatParams::new(10, 1, 10).unwrap();
    let ee = mc_face_survival(&e, trials, 7, SurvivalVariant::Exhaustive).unwrap();
    let (sv, se) = (ev.sigmas_from(tv), ee.sigmas_from(te));
    let t = start.elapsed();
    outcome(
        sv <= 3.0 && se <= 3.0 && t < Duration::from_secs(120),
        format!(
            "k=0 {:.3}±{:.3} vs {tv:.3} ({sv:.2}σ); k=1 {:.3}±{:.3} vs {te:.3} ({se:.2}σ); {t:?}",
            ev.mean, ev.stderr, ee.mean, ee.stderr
        ),
    )
}

fn c7_phi() -> Outcome {
    let z = phi(0.0, 8.0 * std::f64::consts::LN_2).unwrap();
    let mut roots = Vec::new();
    for a in [1.0, 2.0, 4.0, 6.0] {
        // No sign change on [0, 1]: faces of every dimension already vanish.
        let r = match phi_root(a) {
            Ok(r) => r,
            Err(RandomLabError::NoBracket { .. }) => 0.0,
            Err(e) => return outcome(false, format!("alpha {a}: {e}")),
        };
        roots.push(r);
    }
    let mono = roots.windows(2).all(|w| w[1] <= w[0]);
    outcome(z.abs() <= 1e-12 && mono, format!("phi(0, 8 ln 2) = {z:e}; roots {roots:?}"))
}

fn spectral_corpus() -> Vec<(String, WeightedGraph, Option<usize>)> {
    let mut out = Vec::new();
    let circle = parse_dimacs("p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n").unwrap();
    let mut formulas = vec![("circle".to_string(), circle)];
    let mut alloc = VarAllocator::new(0);
    let gs = vec![make_gadget_b(0, &mut alloc), make_gadget_b(1, &mut alloc)];
    formulas.push(("gadget-b pair".into(), combine(&gs)));
    for seed in 0..300u64 {
        let n = 4 + (seed % 6) as usize;
        let m = ((2.0 + (seed % 5) as f64) * n as f64 / 2.0).round() as usize;
        formulas.push((format!("3sat n={n} m={m} seed={seed}"), random_ksat(n, m, 3, seed).unwrap()));
    }
    for (name, f) in formulas {
        let s = enumerate_solutions(&f, DEFAULT_CAP).unwrap();
        if s.len() < 2 {
            continue;
        }
        let b0 = betti_of_solutions(&s, 0).get(0);
        out.push((name, config_graph(&f, 1.0, DEFAULT_CAP).unwrap(), Some(b0)));
    }
    for (name, g) in [
        ("C6", SimpleGraph::cycle(6)),
        ("P5", SimpleGraph::path(5)),
        ("K5", SimpleGraph::complete(5)),
        ("petersen", SimpleGraph::petersen()),
        ("two edges", SimpleGraph::new(4, &[(0, 1), (2, 3)]).unwrap()),
    ] {
        let comps = g.component_count();
        out.push((name.into(), WeightedGraph::from_simple_graph(&g), Some(comps)));
    }
    out
}

fn c8_spectral() -> Outcome {
    let (mut connected, mut disconnected, mut skipped) = (0, 0, 0);
    let mut bad = Vec::new();
    for (name, g, b0) in spectral_corpus() {
        let comps = g.components().len();
        let comb = laplacian_spectrum(&g, LaplacianKind::Combinatorial).unwrap();
        if comps > 1 {
            disconnected += 1;
            let h = cheeger(&g, None).unwrap();
            if !(h.value == 0.0 && h.method == CheegerMethod::Disconnected && Some(comb.kernel_dim) == b0) {
                bad.push(format!("{name}: h {} kernel {} beta0 {b0:?}", h.value, comb.kernel_dim));
            }
        } else if g.len() <= EXACT_CHEEGER_LIMIT {
            connected += 1;
            let h = cheeger(&g, None).unwrap();
            let l = laplacian_spectrum(&g, LaplacianKind::Normalized).unwrap().lambda1.unwrap();
            if h.method != CheegerMethod::Exact || l > 2.0 * h.value + 1e-12 || comb.kernel_dim != 1 {
                bad.push(format!("{name}: lambda1 {l} h {}", h.value));
            }
        } else {
            skipped += 1;
        }
    }
    outcome(
        bad.is_empty() && connected > 0 && disconnected > 0,
        format!("{connected} connected, {disconnected} disconnected, {skipped} over 20 vertices; violations {bad:?}"),
    )
}

fn c9_coupling() -> Outcome {
    let v = effective_coupling_bound(10, 5, 0.1, 10.0).unwrap();
    let ulps = ((v - 1e-5).abs() / (1e-5 * f64::EPSILON)).round();
    let seq: Vec<f64> = (1..=20).map(|w| effective_coupling_bound(10, w, 0.1, 10.0).unwrap()).collect();
    let dec = seq.windows(2).all(|w| w[1] < w[0]);
    let seq2: Vec<f64> = (1..=20).map(|w| effective_coupling_bound(50, w, 0.01, 1.0).unwrap()).collect();
    let dec2 = seq2.windows(2).all(|w| w[1] < w[0]);
    outcome(ulps <= 4.0 && dec && dec2, format!("value {v:e} ({ulps} ulp from 1e-5); decreasing {}", dec && dec2))
}

fn c10_adversary() -> Outcome {
    let mut runs = 0;
    let mut wrong = Vec::new();
    for m in 1..=4 {
        let fam = AdversaryFamily::new(m).unwrap();
        for len in 0..=m + 1 {
            for code in 0..m.pow(len as u32) {
                let mut c = code;
                let probes: Vec<usize> = (0..len)
                    .map(|_| {
                        let i = c % m;
                        c /= m;
                        i
                    })
                    .collect();
                let mut distinct = probes.clone();
                distinct.sort_unstable();
                distinct.dedup();
                for verdict in [Verdict::Sat, Verdict::Unsat] {
                    let mut s =
                        ScriptedStrategy { queries: probes.iter().map(|&i| fam.support_query(i)).collect(), verdict };
                    let r = adversary_run(m, &mut s, m + 1).unwrap();
                    runs += 1;
                    let completions_ok = r.completions.as_ref().is_none_or(|(y, n)| y.satisfiable && !n.satisfiable);
                    if r.refuted != (distinct.len() < m) || !completions_ok {
                        wrong.push((m, probes.clone()));
                    }
                }
            }
        }
    }
    outcome(wrong.is_empty(), format!("{runs} strategies, {} disagreements {:?}", wrong.len(), wrong.first()))
}

fn c11_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut done, mut tries) = (0, 0);
    let mut bad = Vec::new();
    while done < 500 && tries < 100_000 {
        tries += 1;
        let n = rng.gen_range(2..=14);
        let m = rng.gen_range(n..=2 * n);
        let clauses = (0..m).map(|_| random_clause(&mut rng, n, 2)).collect();
        let f = CnfFormula::new(n, clauses, Origin::Generated).unwrap();
        let s = enumerate_solutions(&f, DEFAULT_CAP).unwrap();
        if s.is_empty() {
            continue;
        }
        done += 1;
        let k = build_full_complex(&s);
        let b = betti_numbers(&k, k.max_dim().min(n), false).unwrap();
        let comps = components(&build_complex(&s, 1).unwrap()).unwrap().len();
        let ok = verify_boundary_squared(&k)
            && k.verify_closure()
            && b.euler_characteristic() == k.euler_characteristic()
            && b.get(0) == comps
            && comps == flip_components(n, s.members())
            && b.betti.iter().skip(1).all(|&x| x == 0);
        if !ok {
            bad.push((tries, b.betti.clone()));
        }
    }
    // The same identities on a few non-2-SAT complexes with higher homology.
    let mut extra = 0;
    for seed in 0..50 {
        let f = random_ksat(7, 6 + seed as usize % 10, 3, seed).unwrap();
        let s = enumerate_solutions(&f, DEFAULT_CAP).unwrap();
        let k = build_full_complex(&s);
        let b = betti_numbers(&k, 7, false).unwrap();
        extra += 1;
        if !(verify_boundary_squared(&k) && b.euler_characteristic() == k.euler_characteristic())
            || b.get(0) != flip_components(7, s.members())
        {
            bad.push((seed as usize, b.betti.clone()));
        }
    }
    outcome(
        done == 500 && bad.is_empty(),
        format!("{done} satisfiable 2-SAT instances, {extra} 3-SAT complexes, failures {bad:?}"),
    )
}

fn run_cli(exe: &Path, dir: &Path, args: &[&str]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let out = Command::new(exe).args(args).current_dir(dir).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let mut artifacts = out.stdout;
    for name in ["out.json", "transcript.jsonl", "edges.txt"] {
        if let Ok(bytes) = std::fs::read(dir.join(name)) {
            artifacts.extend_from_slice(name.as_bytes());
            artifacts.extend(bytes);
            std::fs::remove_file(dir.join(name)).unwrap();
        }
    }
    Ok((artifacts, out.stderr))
}

fn c12_determinism() -> Outcome {
    let exe = Path::new(env!("CARGO_BIN_EXE_topocube"));
    let dir = tempfile::tempdir().expect("temporary directory");
    let d = dir.path();
    std::fs::write(d.join("circle.cnf"), "p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n").unwrap();
    std::fs::write(d.join("wide.cnf"), random_ksat(8, 20, 3, 1).unwrap().to_dimacs()).unwrap();
    std::fs::write(d.join("k4.txt"), SimpleGraph::complete(4).to_edge_list()).unwrap();
    std::fs::write(d.join("pts.txt"), "000\n001\n011\n111\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["homology", "--cnf", "circle.cnf"],
        vec!["complex", "--cnf", "wide.cnf", "--out", "out.json"],
        vec!["reduce", "--cnf", "wide.cnf", "--verify"],
        vec!["reduce", "--cnf", "circle.cnf", "--mode", "pad", "--emit", "dimacs"],
        vec!["gadget", "b", "--count", "2", "--verify"],
        vec!["gadget", "ring", "--verify"],
        vec!["expander", "--graph", "k4.txt", "--strict3"],
        vec!["randomlab", "q", "--n", "10", "--k", "1"],
        vec!["randomlab", "faces", "--n", "10", "--k", "1", "--m", "10"],
        vec!["randomlab", "phi", "--alpha", "2", "--root"],
        vec!["--seed", "5", "randomlab", "mc", "--n", "10", "--k", "1", "--m", "10", "--trials", "200"],
        vec![
            "--seed",
            "3",
            "--threads",
            "2",
            "randomlab",
            "sample",
            "--cnf",
            "wide.cnf",
            "--count",
            "20",
            "--burn-in",
            "10",
        ],
        vec!["--seed", "3", "randomlab", "vr", "--cnf", "wide.cnf", "--count", "30"],
        vec!["randomlab", "vr", "--points", "pts.txt", "--eps-grid", "1,2,3"],
        vec!["--seed", "2", "randomlab", "sweep", "--n", "10", "--alpha", "2,4.2", "--trials", "4"],
        vec!["spectral", "analyze", "--cnf", "circle.cnf", "--edges-out", "edges.txt"],
        vec!["spectral", "coupling-bound", "--n", "10", "--w", "5", "--g", "0.1", "--delta", "10"],
        vec!["adversary", "--m", "3", "--probe", "0,2", "--transcript", "transcript.jsonl"],
    ];
    let mut bad = Vec::new();
    for args in &cases {
        match (run_cli(exe, d, args), run_cli(exe, d, args)) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => bad.push(format!("{args:?}: outputs differ")),
            (Err(e), _) | (_, Err(e)) => bad.push(e),
        }
    }
    outcome(bad.is_empty(), format!("{} invocations run twice; problems {bad:?}", cases.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("circle homology", c1_circle),
        ("gadget B projection", c2_gadget_b),
        ("ring gadget certificate", c3_ring),
        ("reduction invariance", c4_split_invariance),
        ("ring gadget independence", c5_ring_independence),
        ("face statistics", c6_face_statistics),
        ("phi threshold", c7_phi),
        ("spectral checks", c8_spectral),
        ("coupling bound", c9_coupling),
        ("adversary game", c10_adversary),
        ("property suites", c11_properties),
        ("CLI determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.2?}]", i + 1, o.detail, start.elapsed());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
