//! One line per acceptance criterion; exits nonzero if any fails.

use std::time::{Duration, Instant};

use siegel_core::padic::PadicCtx;
use siegel_core::verify::{cross_layer, run_suite, Suite, VerifyConfig};

struct Outcome {
    ok: bool,
    detail: String,
}

fn suite(s: Suite) -> Outcome {
    match run_suite(s, &VerifyConfig::default()) {
        Ok(r) => {
            let total = r.checks.iter().filter(|c| !c.informational).count();
            let info = r.checks.len() - total;
            let bad: Vec<_> = r.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
            let mut detail = format!("{} {} checks, {} informational", s, total, info);
            if let Some(first) = bad.first() {
                detail.push_str(&format!(", {} failed, first: {first}", bad.len()));
            }
            Outcome { ok: r.passed(), detail }
        }
        Err(e) => Outcome { ok: false, detail: format!("{s}: {e}") },
    }
}

fn coherence() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [2u32, 3] {
        let run = PadicCtx::new(p, 1, PadicCtx::default_precision(p, 4, 3, 6))
            .map_err(|e| e.to_string())
            .and_then(|c| cross_layer(&c, 500, 0).map_err(|e| e.to_string()));
        match run {
            Ok((n, bad)) => {
                ok &= bad.is_empty() && n >= 500;
                parts.push(format!("p={p}: {n} comparisons over 500 samples, {} mismatches", bad.len()));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("p={p}: {e}"));
            }
        }
    }
    Outcome { ok, detail: parts.join("; ") }
}

type Criterion = (u32, Option<Duration>, Box<dyn Fn() -> Outcome>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, Some(Duration::from_secs(30)), Box::new(|| suite(Suite::FixedDims))),
        (2, Some(Duration::from_secs(300)), Box::new(|| suite(Suite::Oracle))),
        (3, None, Box::new(|| suite(Suite::TwistedTraces))),
        (4, None, Box::new(|| suite(Suite::InducedTraces))),
        (5, Some(Duration::from_secs(10)), Box::new(|| suite(Suite::Counts))),
        (6, None, Box::new(|| suite(Suite::Dimensions))),
        (7, Some(Duration::from_secs(120)), Box::new(|| suite(Suite::Identities))),
        (8, Some(Duration::from_secs(300)), Box::new(|| suite(Suite::Rg))),
        (9, None, Box::new(|| suite(Suite::Signatures))),
        (10, None, Box::new(coherence)),
    ];
    let mut failed = 0;
    for (id, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let ok = out.ok && in_time;
        let budget = limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        println!(
            "criterion {id:>2}: {} [{:.2}s{budget}] {}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail
        );
        failed += usize::from(!ok);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
