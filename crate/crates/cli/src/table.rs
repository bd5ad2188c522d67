//! Dimension and signature tables per sigma class.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use siegel_core::chars::{
    all_sigma_labels, u1_twist, Constituent, ConstituentOracle, CuspidalLabel, Gl2Classifier, SigmaLabel,
};
use siegel_core::finitegrp::FqCtx;
use siegel_core::models::{ModelOracle, MAX_MODEL_ORDER};
use siegel_core::support::{Assembler, SigmaClass, Source, SupportError, TauSpec};

use crate::output::{CheckOut, CliError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub class: String,
    pub sigma: String,
    pub members: usize,
    pub omega_minus_one: i32,
    pub central_trivial: bool,
    pub ext_sign: Option<i32>,
    pub n: u32,
    pub dim: u64,
    pub dim_closed: u64,
    pub dim_match: bool,
    pub al: i64,
    pub al_closed: Option<i64>,
    pub al_match: Option<bool>,
}

pub fn sigma_string(s: &SigmaLabel) -> String {
    let c = match s.constituent {
        Constituent::Full => "full",
        Constituent::Plus => "plus",
        Constituent::Minus => "minus",
    };
    format!("{},{},{c}", s.theta1.k, s.theta2.k)
}

/// Parses `k1,k2[,full|plus|minus[,u1]]`; a trailing `u1` selects the `u_1`-twist.
pub fn parse_sigma(ctx: &FqCtx, s: &str) -> Result<SigmaLabel, CliError> {
    let bad = |m: &str| CliError::BadArgs(format!("sigma {s:?}: {m}"));
    let mut parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let twist = parts.last() == Some(&"u1");
    if twist {
        parts.pop();
    }
    if !(2..=3).contains(&parts.len()) {
        return Err(bad("expected k1,k2[,full|plus|minus[,u1]]"));
    }
    let k = |t: &str| t.parse::<i64>().map_err(|_| bad("exponents must be integers"));
    let constituent = match parts.get(2).copied().unwrap_or("full") {
        "full" => Constituent::Full,
        "plus" => Constituent::Plus,
        "minus" => Constituent::Minus,
        _ => return Err(bad("constituent must be full, plus or minus")),
    };
    let t1 = CuspidalLabel::new(ctx, k(parts[0])?).map_err(|e| bad(&e.to_string()))?;
    let t2 = CuspidalLabel::new(ctx, k(parts[1])?).map_err(|e| bad(&e.to_string()))?;
    let sigma = SigmaLabel::new(ctx, t1, t2, constituent).map_err(|e| bad(&e.to_string()))?;
    if !twist {
        return Ok(sigma);
    }
    let oracle = match constituent {
        Constituent::Full => None,
        _ => Some(ModelOracle::new(ctx, 0)?),
    };
    let dyn_oracle = oracle.as_ref().map(|o| o as &dyn ConstituentOracle);
    Ok(u1_twist(ctx, &Gl2Classifier::new(ctx), &sigma, dyn_oracle).map_err(|e| bad(&e.to_string()))?)
}

struct GridPoint {
    sigma: SigmaLabel,
    tau: TauSpec,
    members: usize,
    sign: Option<i32>,
}

/// Labels grouped by class, or one group per label with `raw`.
fn groups(ctx: &FqCtx, labels: Vec<SigmaLabel>, raw: bool) -> Result<Vec<(SigmaLabel, usize)>, CliError> {
    let mut out: Vec<((SigmaClass, i32, bool), SigmaLabel, usize)> = Vec::new();
    for s in labels {
        let tau = TauSpec::new(ctx, s, 1)?;
        let key = (tau.class, s.theta2.omega_minus_one(ctx), tau.central_trivial);
        match out.iter_mut().find(|g| !raw && g.0 == key) {
            Some(g) => g.2 += 1,
            None => out.push((key, s, 1)),
        }
    }
    Ok(out.into_iter().map(|(_, s, m)| (s, m)).collect())
}

type Block = (Vec<TableRow>, Vec<CheckOut>);

pub struct TableRequest {
    pub n_min: u32,
    pub n_max: u32,
    pub raw: bool,
    pub sigma: Option<SigmaLabel>,
    pub ext_sign: Option<i32>,
}

pub fn source_for(q: u32) -> Source {
    if q <= MAX_MODEL_ORDER {
        Source::Computed
    } else {
        Source::Closed
    }
}

pub fn run(ctx: &FqCtx, req: &TableRequest, seed: u64) -> Result<(Vec<TableRow>, Vec<CheckOut>), CliError> {
    let q = ctx.q();
    let source = source_for(q);
    let oracle = match source {
        Source::Computed => Some(ModelOracle::new(ctx, seed)?),
        Source::Closed => None,
    };
    let classes = match &oracle {
        Some(o) => o.classes.clone(),
        None => Gl2Classifier::new(ctx),
    };
    let labels = match req.sigma {
        Some(s) => vec![s],
        None => all_sigma_labels(ctx),
    };
    let mut grid = Vec::new();
    for (sigma, members) in groups(ctx, labels, req.raw)? {
        let base = TauSpec::new(ctx, sigma, 1)?;
        let signs: Vec<Option<i32>> = match (base.self_twisted(), req.ext_sign) {
            (false, _) => vec![None],
            (true, Some(e)) => vec![Some(e)],
            (true, None) => vec![Some(1), Some(-1)],
        };
        for sign in signs {
            let tau = TauSpec::new(ctx, sigma, sign.unwrap_or(1))?;
            grid.push(GridPoint { sigma, tau, members, sign });
        }
    }
    let results: Vec<Result<Block, CliError>> = grid
        .par_iter()
        .map(|g| {
            let a = Assembler::new(ctx, &classes, g.tau, source, oracle.as_ref())?;
            let mut rows = Vec::new();
            for n in req.n_min..=req.n_max {
                let d = a.assemble_dim(n);
                let s = a.assemble_al(n);
                let (al, al_closed, al_match) = match s {
                    Ok(r) => (r.assembled, Some(r.closed), Some(r.matched)),
                    Err(SupportError::NoClosedForm(_)) => (al_assembled(&a, n), None, None),
                    Err(e) => return Err(e.into()),
                };
                rows.push(TableRow {
                    class: g.tau.class.to_string(),
                    sigma: sigma_string(&g.sigma),
                    members: g.members,
                    omega_minus_one: g.sigma.theta2.omega_minus_one(ctx),
                    central_trivial: g.tau.central_trivial,
                    ext_sign: g.sign,
                    n,
                    dim: d.assembled,
                    dim_closed: d.closed,
                    dim_match: d.matched,
                    al,
                    al_closed,
                    al_match,
                });
            }
            let label = format!(
                "q={q} {} sigma={}{}",
                g.tau.class,
                sigma_string(&g.sigma),
                g.sign.map_or(String::new(), |e| format!(" ext_sign={e:+}"))
            );
            let bad_dims: Vec<u32> = rows.iter().filter(|r| !r.dim_match).map(|r| r.n).collect();
            let bad_al: Vec<u32> = rows.iter().filter(|r| r.al_match == Some(false)).map(|r| r.n).collect();
            let unchecked = rows.iter().filter(|r| r.al_match.is_none()).count();
            let checks = vec![
                CheckOut {
                    name: format!("{label} dimensions"),
                    passed: bad_dims.is_empty(),
                    informational: false,
                    detail: mismatch_detail(&bad_dims),
                },
                CheckOut {
                    name: format!("{label} signatures"),
                    passed: bad_al.is_empty() && unchecked == 0,
                    informational: bad_al.is_empty() && unchecked > 0,
                    detail: if unchecked > 0 && bad_al.is_empty() {
                        format!("no closed form at {unchecked} values of n")
                    } else {
                        mismatch_detail(&bad_al)
                    },
                },
            ];
            Ok((rows, checks))
        })
        .collect();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for r in results {
        let (rs, cs) = r?;
        rows.extend(rs);
        checks.extend(cs);
    }
    Ok((rows, checks))
}

fn al_assembled(a: &Assembler, n: u32) -> i64 {
    a.al_contributions(n).iter().map(|c| c.value).sum()
}

fn mismatch_detail(ns: &[u32]) -> String {
    if ns.is_empty() {
        String::new()
    } else {
        format!("mismatch at n = {ns:?}")
    }
}
