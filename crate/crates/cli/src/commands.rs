use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use graphcode::code::{code_metrics, optimal_redundancy};
use graphcode::double::checks::{set_identity_violations, schedule_violations};
use graphcode::extreme::{
    count_extreme_bruteforce, count_extreme_codes, count_extreme_formula, formula_rate, CountMode, CountResult,
    EXHAUSTIVE_LIMIT,
};
use graphcode::graph::{binom2, edge_count};
use graphcode::triple::{build_triple_params, cross_column_violations, neighborhood_overlap_violations};
use graphcode::{verify_exhaustive, EdgeId, Error, Field, GraphCode, LabeledGraph, VerifyOptions};
use serde_json::{json, Value};

use crate::{CodeOpts, Failure, Format, Suite};

type Res = Result<(), Failure>;

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    let mut s = String::new();
    match path {
        Some(p) => s = fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        None => {
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        }
    }
    Ok(s)
}

fn write_output(path: &Option<PathBuf>, data: &str) -> Res {
    match path {
        Some(p) => fs::write(p, data).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(data.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn render(g: &LabeledGraph, format: Format) -> String {
    match format {
        Format::Text => g.to_text(),
        Format::Json => g.to_json() + "\n",
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn comparison(n: usize, rho: usize) -> Vec<Value> {
    let mut rows = vec![json!({
        "construction": "MDS code on all edges",
        "redundancy": optimal_redundancy(n, rho),
        "field": format!("q >= {}", edge_count(n) - 1),
        "note": "optimal, but the field grows quadratically in n",
    })];
    if 2 * rho < n {
        let r = if n % 2 == 1 { n * rho } else { (n + 1) * rho };
        rows.push(json!({
            "construction": "binary symmetric rank-metric array code",
            "redundancy": r,
            "field": "q = 2",
            "note": "reference only; not implemented",
        }));
        if n.is_multiple_of(2) {
            rows.push(json!({
                "construction": "even-n array code variant",
                "redundancy": n * rho,
                "field": format!("q >= {}", n.div_ceil(2)),
                "note": "absent; no construction is available",
            }));
        }
    }
    if 2 * rho <= n {
        rows.push(json!({
            "construction": "symmetric crisscross array code",
            "redundancy": 2 * rho * n - binom2(2 * rho),
            "field": format!("q >= {}", n - 1),
            "note": "reference only; not implemented",
        }));
    }
    if rho == 2 {
        rows.push(json!({
            "construction": "q-ary optimal two-failure code",
            "redundancy": 2 * n - 1,
            "field": format!("q >= {}", n + 1),
            "note": "absent; no construction is available",
        }));
    }
    rows
}

pub fn info(opts: &CodeOpts, n: usize, rho: Option<usize>) -> Res {
    let field = opts.family.field(n, opts.q)?;
    let code = opts.family.build(n, &field, opts.seed)?;
    let rho = rho.unwrap_or(opts.family.default_rho(n));
    if rho > n {
        return Err(Error::NodeOutOfRange { node: rho, n }.into());
    }
    let m = code_metrics(code.spec(), rho);
    let g = gcd(m.dimension, m.edges).max(1);
    let rate = format!("{}/{}", m.dimension / g, m.edges / g);
    let cmp = comparison(n, rho);
    match opts.format {
        Format::Json => {
            let v = json!({
                "family": opts.family.name(),
                "field": field.to_string(),
                "metrics": m,
                "rate_fraction": rate,
                "comparison": cmp,
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
        Format::Text => {
            println!("family          {}", opts.family.name());
            println!("n               {n}");
            println!("field           {} (q = {})", field, m.q);
            println!("edges           {}", m.edges);
            println!("dimension k     {}", m.dimension);
            println!("redundancy r    {}", m.redundancy);
            println!("rate            {rate} ({:.6})", m.rate);
            println!("rho             {rho}");
            println!("lower bound     {}", m.optimal_bound);
            println!("gap             {}", m.optimality_gap);
            println!();
            println!("{:<42} {:>10}  {:<10} note", "other constructions", "redundancy", "field");
            for row in &cmp {
                println!(
                    "{:<42} {:>10}  {:<10} {}",
                    row["construction"].as_str().unwrap_or_default(),
                    row["redundancy"].as_u64().unwrap_or_default(),
                    row["field"].as_str().unwrap_or_default(),
                    row["note"].as_str().unwrap_or_default()
                );
            }
        }
    }
    Ok(())
}

fn parse_info(text: &str, code: &dyn GraphCode) -> Result<Vec<u32>, Failure> {
    let trimmed = text.trim_start();
    let bad = |msg: String| Failure::Code(Error::Parse { line: 0, msg });
    if trimmed.starts_with('{') {
        let k = code.spec().info_nodes().ok_or_else(|| bad("this family takes a list of message symbols".into()))?;
        let map: BTreeMap<String, u32> = serde_json::from_str(trimmed).map_err(|e| bad(e.to_string()))?;
        let mut edges = BTreeMap::new();
        for (key, v) in map {
            let e: EdgeId = key.parse()?;
            if edges.insert(e, v).is_some() {
                return Err(bad(format!("edge {e} given twice")));
            }
        }
        Ok(graphcode::code::info_map_to_vec(k, &edges)?)
    } else if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| bad(e.to_string()))
    } else {
        trimmed.split_whitespace().map(|t| t.parse().map_err(|_| bad(format!("bad value {t:?}")))).collect()
    }
}

pub fn encode(opts: &CodeOpts, n: usize, input: Option<PathBuf>, output: Option<PathBuf>) -> Res {
    let field = opts.family.field(n, opts.q)?;
    let code = opts.family.build(n, &field, opts.seed)?;
    let info = parse_info(&read_input(&input)?, code.as_ref())?;
    let g = code.encode(&info)?;
    write_output(&output, &render(&g, opts.format))
}

pub fn erase(input: Option<PathBuf>, output: Option<PathBuf>, fail: &[usize], format: Format) -> Res {
    let g = LabeledGraph::parse(&read_input(&input)?)?;
    let erased = g.apply_erasure(fail)?;
    write_output(&output, &render(&erased, format))
}

pub fn decode(opts: &CodeOpts, input: Option<PathBuf>, output: Option<PathBuf>, provenance: Option<PathBuf>) -> Res {
    let g = LabeledGraph::parse(&read_input(&input)?)?;
    if opts.q.is_some_and(|q| q != g.field().order()) {
        return Err(Error::FieldMismatch.into());
    }
    let code = opts.family.build(g.n(), g.field(), opts.seed)?;
    let report = code.decode(&g)?;
    write_output(&output, &render(&report.graph, opts.format))?;
    let log = report.provenance_json() + "\n";
    match (provenance, &output) {
        (Some(p), _) => write_output(&Some(p), &log),
        (None, Some(_)) => write_output(&None, &log),
        (None, None) => Ok(()),
    }
}

fn suite_result(name: &str, violations: Result<Vec<String>, Error>) -> Value {
    match violations {
        Ok(v) => json!({
            "suite": name,
            "ok": v.is_empty(),
            "violations": v.len(),
            "examples": v.iter().take(10).collect::<Vec<_>>(),
        }),
        Err(e) => json!({ "suite": name, "ok": false, "error": e.to_string() }),
    }
}

fn counting_suite(n: usize, field: &Field, samples: u64, seed: u64) -> Value {
    let q = field.order();
    let formula = match count_extreme_formula(n, q) {
        Ok(f) => f,
        Err(e) => return json!({ "suite": "counting", "ok": false, "error": e.to_string() }),
    };
    let codes = count_extreme_codes(n, q).map(|c| c.to_string()).unwrap_or_default();
    let exhaustive = (q as u128).checked_pow(3 * edge_count(n) as u32).is_some_and(|t| t <= EXHAUSTIVE_LIMIT);
    let mode = if exhaustive { CountMode::Exhaustive } else { CountMode::MonteCarlo { samples, seed } };
    match count_extreme_bruteforce(n, field, mode) {
        Ok(CountResult::Exhaustive { total, valid }) => json!({
            "suite": "counting",
            "ok": formula.to_string() == valid.to_string(),
            "formula": formula.to_string(),
            "distinct_codes": codes,
            "mode": "exhaustive",
            "candidates": total,
            "valid": valid,
        }),
        Ok(CountResult::MonteCarlo { samples, accepted, rate, std_error }) => {
            let expected = formula_rate(n, q).unwrap_or(f64::NAN);
            let z = (rate - expected).abs() / std_error;
            json!({
                "suite": "counting",
                "ok": z < 4.0,
                "formula": formula.to_string(),
                "distinct_codes": codes,
                "mode": "monte_carlo",
                "samples": samples,
                "accepted": accepted,
                "rate": rate,
                "std_error": std_error,
                "expected_rate": expected,
            })
        }
        Err(e) => json!({ "suite": "counting", "ok": false, "error": e.to_string() }),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn verify(
    opts: &CodeOpts,
    n: usize,
    rho: Option<usize>,
    trials: usize,
    jobs: usize,
    oracle: bool,
    suites: &[Suite],
    samples: u64,
) -> Res {
    let field = opts.family.field(n, opts.q)?;
    let code = opts.family.build(n, &field, opts.seed)?;
    let rho = rho.unwrap_or(opts.family.default_rho(n));
    if rho > n {
        return Err(Error::NodeOutOfRange { node: rho, n }.into());
    }
    let vopts = VerifyOptions { trials, seed: opts.seed, compare_oracle: oracle, jobs };
    let report = verify_exhaustive(code.as_ref(), rho, &vopts);
    let mut ok = report.all_ok();
    let mut results = Vec::new();
    for suite in suites {
        let v = match suite {
            Suite::Claims12 => {
                let both = set_identity_violations(n).and_then(|mut a| {
                    a.extend(schedule_violations(n)?);
                    Ok(a)
                });
                suite_result("claims1-2", both)
            }
            Suite::Schedule => suite_result("schedule", schedule_violations(n)),
            Suite::Claims34 => {
                let both = build_triple_params(n, &field).and_then(|p| {
                    let mut a = cross_column_violations(&p);
                    a.extend(neighborhood_overlap_violations(n)?);
                    Ok(a)
                });
                suite_result("claims3-4", both)
            }
            Suite::Counting => counting_suite(n, &field, samples, opts.seed),
        };
        ok &= v["ok"].as_bool().unwrap_or(false);
        results.push(v);
    }
    let out = if suites.is_empty() {
        serde_json::to_value(&report).expect("json")
    } else {
        json!({ "verify": report, "suites": results })
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    if ok {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((sorted.len() as f64 - 1.0) * p).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

pub fn bench(opts: &CodeOpts, n: usize, trials: usize) -> Res {
    let field = opts.family.field(n, opts.q)?;
    let code = opts.family.build(n, &field, opts.seed)?;
    let q = field.order();
    let rho = opts.family.default_rho(n);
    // failures spread evenly over the nodes
    let failed: Vec<usize> = (1..=rho).map(|k| k * n / (rho + 1)).collect();
    let info: Vec<u32> = (0..code.info_len()).map(|k| (k as u32).wrapping_mul(2_654_435_761) % q).collect();
    let word = code.encode(&info)?;
    let erased = word.apply_erasure(&failed)?;
    let time = |f: &dyn Fn() -> Result<(), Error>| -> Result<Vec<f64>, Error> {
        let mut v = Vec::with_capacity(trials);
        for _ in 0..trials.max(1) {
            let start = Instant::now();
            f()?;
            v.push(start.elapsed().as_secs_f64() * 1e6);
        }
        v.sort_by(f64::total_cmp);
        Ok(v)
    };
    let enc = time(&|| code.encode(&info).map(|_| ()))?;
    let dec = time(&|| code.decode(&erased).map(|_| ()))?;
    for (op, t) in [("encode", enc), ("decode", dec)] {
        let row = json!({
            "family": opts.family.name(),
            "n": n,
            "q": q,
            "op": op,
            "median_us": percentile(&t, 0.5),
            "p95_us": percentile(&t, 0.95),
        });
        println!("{row}");
    }
    Ok(())
}
