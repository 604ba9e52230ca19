//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints its own PASS/FAIL line.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use graphcode::code::{code_metrics, failure_sets, verify_exhaustive, VerifyOptions};
use graphcode::double::checks::{set_identity_violations, schedule_violations};
use graphcode::double::{build_double_spec, DoublePrimeCode};
use graphcode::extreme::{
    construct_extreme, count_extreme_bruteforce, count_extreme_formula, decode_extreme, formula_rate, CountMode,
    CountResult,
};
use graphcode::graph::{binom2, failure_edges};
use graphcode::single::SingleParityCode;
use graphcode::triple::{build_triple_params, build_triple_spec, cross_column_violations, neighborhood_overlap_violations, TripleCode};
use graphcode::{EdgeId, EdgeSet, ExtremeCode, Field, GraphCode, Stage};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gf(q: u32) -> Field {
    Field::new(q).expect("valid field")
}

const DOUBLE_N: [usize; 4] = [5, 7, 11, 13];

fn double_optimal() -> Outcome {
    for n in DOUBLE_N {
        let m = code_metrics(&build_double_spec(n).map_err(|e| e.to_string())?, 2);
        ensure(m.redundancy == 2 * n - 1 && m.optimality_gap == 0, || format!("n={n}: {m:?}"))?;
    }
    Ok("rank 2n-1, gap 0 for n in {5,7,11,13}".into())
}

fn double_round_trips() -> Outcome {
    let opts = VerifyOptions { trials: 100, seed: 2, compare_oracle: true, jobs: 4 };
    let mut patterns = 0;
    for n in DOUBLE_N {
        let code = DoublePrimeCode::new(n).map_err(|e| e.to_string())?;
        let r = verify_exhaustive(&code, 2, &opts);
        ensure(r.all_ok() && r.patterns_total == binom2(n), || format!("n={n}: {:?}", r.failures))?;
        patterns += r.patterns_total;
    }
    Ok(format!("{patterns} pairs x 100 codewords match original and oracle"))
}

fn example_trace() -> Outcome {
    let n = 11;
    let code = DoublePrimeCode::new(n).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let info: Vec<u32> = (0..code.info_len()).map(|_| rng.gen_range(0..2)).collect();
    let word = code.encode(&info).map_err(|e| e.to_string())?;
    let (report, trace) = code.decode_traced(&word.apply_erasure(&[3, 5]).unwrap()).map_err(|e| e.to_string())?;
    let s = &trace.schedule;
    ensure((s.d, s.x, s.y) == (2, 4, 5), || format!("d,x,y = {},{},{}", s.d, s.x, s.y))?;
    let edges = |stage: Stage| -> Vec<EdgeId> {
        report.provenance.iter().filter(|p| p.stage == stage).map(|p| p.edge).collect()
    };
    let (l1, l2) = (edges(Stage::Loop1), edges(Stage::Loop2));
    let e = EdgeId::new;
    ensure(l1.first() == Some(&e(7, 5)) && l1.last() == Some(&e(10, 5)), || format!("loop 1: {l1:?}"))?;
    ensure(l2.first() == Some(&e(3, 0)) && l2.last() == Some(&e(10, 3)), || format!("loop 2: {l2:?}"))?;
    let want: EdgeSet = [e(5, 3), e(9, 3), e(9, 5)].into_iter().collect();
    ensure(trace.residual == want, || format!("residual {:?}", trace.residual))?;
    ensure(report.graph == word, || "decoded graph differs".into())?;
    Ok("d=2 x=4 y=5; loops (7,5)..(10,5), (3,0)..(10,3); residual {(5,3),(9,3),(9,5)}".into())
}

fn identities_and_schedules() -> Outcome {
    for n in [5, 7, 11, 13, 17, 19, 23] {
        let v1 = set_identity_violations(n).map_err(|e| e.to_string())?;
        let v2 = schedule_violations(n).map_err(|e| e.to_string())?;
        ensure(v1.is_empty() && v2.is_empty(), || format!("n={n}: {:?} {:?}", v1.first(), v2.first()))?;
    }
    Ok("zero violations for n in {5,7,11,13,17,19,23}".into())
}

fn triple_construction() -> Outcome {
    let opts = VerifyOptions { trials: 50, seed: 5, compare_oracle: true, jobs: 4 };
    for (n, q) in [(7, 8), (7, 11), (10, 11), (12, 13)] {
        let params = build_triple_params(n, &gf(q)).map_err(|e| e.to_string())?;
        let spec = build_triple_spec(&params).map_err(|e| e.to_string())?;
        ensure(spec.rank() == 3 * n - 3 && spec.dimension() == binom2(n - 2), || {
            format!("n={n} q={q}: rank {} k {}", spec.rank(), spec.dimension())
        })?;
        let v3 = cross_column_violations(&params);
        ensure(v3.is_empty(), || format!("cross columns, n={n}: {:?}", v3.first()))?;
        let code = TripleCode::new(n, &gf(q)).map_err(|e| e.to_string())?;
        let r = verify_exhaustive(&code, 3, &opts);
        ensure(r.all_ok(), || format!("n={n} q={q}: {:?}", r.failures.first()))?;
    }
    for n in 5..=12 {
        let v4 = neighborhood_overlap_violations(n).map_err(|e| e.to_string())?;
        ensure(v4.is_empty(), || format!("neighborhood overlap, n={n}: {:?}", v4.first()))?;
    }
    Ok("rank 3n-3, k=C(n-2,2); all triples x 50 match original and oracle; cross-column and overlap checks hold".into())
}

fn single_family() -> Outcome {
    for q in [2, 5] {
        for n in 3..=20 {
            let code = SingleParityCode::new(n, &gf(q)).map_err(|e| e.to_string())?;
            let m = code_metrics(code.spec(), 1);
            ensure(m.redundancy == n && m.optimality_gap == 0, || format!("n={n}: {m:?}"))?;
            let r = verify_exhaustive(&code, 1, &VerifyOptions { trials: 20, seed: 6, ..Default::default() });
            ensure(r.all_ok(), || format!("n={n} q={q}: {:?}", r.failures.first()))?;
        }
    }
    Ok("r=n for n in 3..=20; all single failures recovered".into())
}

fn within(n: usize, q: u32, samples: u64, seed: u64) -> Result<String, String> {
    let CountResult::MonteCarlo { rate, std_error, .. } =
        count_extreme_bruteforce(n, &gf(q), CountMode::MonteCarlo { samples, seed }).map_err(|e| e.to_string())?
    else {
        return Err("unexpected count mode".into());
    };
    let expected = formula_rate(n, q).map_err(|e| e.to_string())?;
    let z = (rate - expected).abs() / std_error;
    ensure(z < 4.0, || format!("(n={n},q={q}): rate {rate} vs {expected}, {z:.2} SE"))?;
    Ok(format!("({n},{q}) {rate:.6} vs {expected:.6} ({z:.2} SE)"))
}

fn counting() -> Outcome {
    let formula = count_extreme_formula(3, 2).map_err(|e| e.to_string())?;
    let exact = count_extreme_bruteforce(3, &gf(2), CountMode::Exhaustive).map_err(|e| e.to_string())?;
    let CountResult::Exhaustive { total, valid } = exact else {
        return Err("unexpected count mode".into());
    };
    ensure(total == 1 << 18 && BigUint::from(valid) == formula && valid == 13440, || {
        format!("exhaustive {valid}/{total}, formula {formula}")
    })?;
    let a = within(4, 2, 1_000_000, 7)?;
    let b = within(3, 3, 1_000_000, 8)?;
    Ok(format!("exhaustive 13440/2^18; MC {a}; {b}"))
}

fn existence_boundary() -> Outcome {
    let gen = construct_extreme(7, &gf(2), 0).map_err(|e| e.to_string())?;
    ensure(construct_extreme(8, &gf(2), 0).is_err(), || "n=8, q=2 constructed".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let u = [rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2)];
        let c = gen.encode(&u).map_err(|e| e.to_string())?;
        for [i, j] in failure_sets(7, 2).iter().map(|p| [p[0], p[1]]) {
            let l = |a, b| c.label(EdgeId::new(a, b)).unwrap();
            let got = decode_extreme(&gen, i, j, l(i, i), l(j, i), l(j, j)).map_err(|e| e.to_string())?;
            ensure(got == u, || format!("pair ({i},{j}): {got:?} != {u:?}"))?;
        }
    }
    Ok("n=7 built, n=8 NoSuchCode; 21 pairs x 100 messages recovered".into())
}

fn linearity() -> Outcome {
    let codes: Vec<Box<dyn GraphCode>> = vec![
        Box::new(SingleParityCode::new(8, &gf(5)).unwrap()),
        Box::new(DoublePrimeCode::new(7).unwrap()),
        Box::new(TripleCode::new(7, &gf(8)).unwrap()),
        Box::new(ExtremeCode::construct(5, &gf(3), 0).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for code in &codes {
        let spec = code.spec();
        let f = spec.field();
        let q = f.order();
        for _ in 0..1000 {
            let u1: Vec<u32> = (0..code.info_len()).map(|_| rng.gen_range(0..q)).collect();
            let u2: Vec<u32> = (0..code.info_len()).map(|_| rng.gen_range(0..q)).collect();
            let (a, b) = (rng.gen_range(0..q), rng.gen_range(0..q));
            let g1 = code.encode(&u1).map_err(|e| e.to_string())?;
            let g2 = code.encode(&u2).map_err(|e| e.to_string())?;
            let mix = g1.scale(a).and_then(|x| x.add(&g2.scale(b)?)).map_err(|e| e.to_string())?;
            let u: Vec<u32> = u1.iter().zip(&u2).map(|(&x, &y)| f.add(f.mul(a, x), f.mul(b, y))).collect();
            ensure(spec.is_codeword(&mix), || format!("{}: combination left the code", spec.family()))?;
            ensure(code.encode(&u).map_err(|e| e.to_string())? == mix, || {
                format!("{}: encoder is not linear", spec.family())
            })?;
        }
    }
    for n in 3..=12 {
        for mask in 0u32..1 << n {
            let nodes: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let rho = nodes.len();
            let got = failure_edges(n, &nodes).map_err(|e| e.to_string())?.len();
            ensure(got == rho * n - binom2(rho), || format!("n={n} {nodes:?}: {got}"))?;
        }
    }
    Ok("closure over 4 families x 1000 samples; failure edge counts for n <= 12".into())
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "double-erasure code is optimal", limit: secs(1), run: double_optimal },
        Criterion { id: 2, name: "double-failure round trips", limit: secs(30), run: double_round_trips },
        Criterion { id: 3, name: "zig-zag trace n=11 {3,5}", limit: secs(1), run: example_trace },
        Criterion { id: 4, name: "set identities and schedule invariants", limit: secs(10), run: identities_and_schedules },
        Criterion { id: 5, name: "triple-erasure code", limit: secs(60), run: triple_construction },
        Criterion { id: 6, name: "single-erasure code", limit: secs(5), run: single_family },
        Criterion { id: 7, name: "generator matrix count", limit: secs(60), run: counting },
        Criterion { id: 8, name: "existence boundary and decoding", limit: secs(5), run: existence_boundary },
        Criterion { id: 9, name: "linearity and failure sets", limit: secs(10), run: linearity },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = outcome
            .and_then(|msg| ensure(took <= c.limit, || format!("took {took:.2?}, limit {:?}", c.limit)).map(|_| msg));
        match outcome {
            Ok(msg) => println!("PASS [{}] {} ({took:.2?}): {msg}", c.id, c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {} ({took:.2?}): {msg}", c.id, c.name);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
