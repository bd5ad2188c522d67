//! Verification suites: each suite compares computed quantities with closed
//! forms or with an independent computation and reports one check per item.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chars::{
    all_cuspidal_labels, all_sigma_labels, closed_fixed_dim, is_self_twisted, is_self_twisted_label, lambda_omega,
    split_restriction, twisted_trace_closed, CharsError, Constituent, ConstituentOracle, FixedDimCase, Gl2Classifier,
    LambdaOmega, SigmaChar, SigmaLabel, TwistOperator,
};
use crate::finitegrp::{conjugate_subgroups, subgroup_r, ExtElem, FiniteGroupError, FqCtx, SubgroupKind, SubgroupR};
use crate::models::{fixed_rank, twisted_trace, InducedModel, ModelError, ModelOracle, MAX_MODEL_ORDER};
use crate::identities::{verify_identity, IdentityTag};
use crate::padic::{GSp4Elem, PadicCtx, PadicError, RgSampling};
use crate::support::{
    al_fixed_cosets, al_partner, closed_count, closed_fixed_count, enumerate_support, enumerate_type, f_even,
    representative, witness_family, Assembler, CosetParam, CosetType, Source, SupportError, TauSpec,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("q = {0} is not a prime power this crate supports")]
    BadOrder(u32),
    #[error(transparent)]
    Chars(#[from] CharsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    FiniteGroup(#[from] FiniteGroupError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Support(#[from] SupportError),
}

impl VerifyError {
    /// Whether the error comes from a size or precision limit rather than a
    /// wrong value.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            VerifyError::Model(ModelError::TooLarge { .. })
                | VerifyError::FiniteGroup(FiniteGroupError::TooLargeToEnumerate { .. })
                | VerifyError::Padic(
                    PadicError::PrecisionExhausted(_)
                        | PadicError::UnsupportedSize { .. }
                        | PadicError::StabilizationFailure { .. }
                )
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FixedDims,
    TwistedTraces,
    InducedTraces,
    Identities,
    Counts,
    Rg,
    Dimensions,
    Signatures,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::FixedDims,
        Suite::TwistedTraces,
        Suite::InducedTraces,
        Suite::Identities,
        Suite::Counts,
        Suite::Rg,
        Suite::Dimensions,
        Suite::Signatures,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::FixedDims => "fixed-dims",
            Suite::TwistedTraces => "twisted-traces",
            Suite::InducedTraces => "induced-traces",
            Suite::Identities => "identities",
            Suite::Counts => "counts",
            Suite::Rg => "rg",
            Suite::Dimensions => "dimensions",
            Suite::Signatures => "signatures",
            Suite::Oracle => "oracle",
        }
    }

    /// Orders covered when none is given.
    pub fn default_orders(self) -> &'static [u32] {
        match self {
            Suite::FixedDims => &[2, 3, 4, 5, 7],
            Suite::TwistedTraces => &[2, 3, 4, 5],
            Suite::InducedTraces => &[3, 4, 5],
            Suite::Identities => &[2, 3],
            Suite::Counts => &[2, 3, 4, 5, 8],
            Suite::Rg => &[2],
            Suite::Dimensions => &[2, 3, 4, 5],
            Suite::Signatures => &[2, 3, 4],
            Suite::Oracle => &[2, 3, 4, 5],
        }
    }

    pub fn default_n_max(self) -> u32 {
        match self {
            Suite::Identities => 10,
            Suite::Counts => 60,
            Suite::Rg => 6,
            Suite::Dimensions => 20,
            Suite::Signatures => 12,
            _ => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Suite, VerifyError> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| VerifyError::UnknownSuite(s.to_string()))
    }
}

/// One pass/fail item. Informational checks are reported but never fail a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub informational: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed && !c.informational)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[derive(Default)]
pub struct VerifyConfig {
    /// Orders to run; the suite default when empty.
    pub orders: Vec<u32>,
    pub n_max: Option<u32>,
    pub seed: u64,
    pub precision: Option<u32>,
    /// Random draws per item where the suite samples.
    pub trials: Option<usize>,
}


/// `(p, f)` with `p^f = q`.
pub fn factor_order(q: u32) -> Result<(u32, u32), VerifyError> {
    if q < 2 {
        return Err(VerifyError::BadOrder(q));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).expect("q >= 2 has a prime factor");
    let (mut m, mut f) = (q, 0);
    while m % p == 0 {
        m /= p;
        f += 1;
    }
    if m != 1 {
        return Err(VerifyError::BadOrder(q));
    }
    Ok((p, f))
}

pub fn field(q: u32) -> Result<FqCtx, VerifyError> {
    let (p, f) = factor_order(q)?;
    Ok(FqCtx::new(p, f)?)
}

struct Recorder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: Suite) -> Recorder {
        Recorder { suite, checks: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite: self.suite, name: name.into(), passed, informational: false, detail: detail.into() });
    }

    fn info(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite: self.suite, name: name.into(), passed, informational: true, detail: detail.into() });
    }

    /// A check comparing `got` against `want` over a batch of items.
    fn batch(&mut self, name: impl Into<String>, total: usize, mismatches: Vec<String>) {
        let detail = if mismatches.is_empty() {
            format!("{total} items agree")
        } else {
            format!("{} of {total} differ; first: {}", mismatches.len(), mismatches[0])
        };
        self.push(name, mismatches.is_empty() && total > 0, detail);
    }

    fn finish(self, seed: u64) -> SuiteReport {
        SuiteReport { suite: self.suite, seed, checks: self.checks }
    }
}

/// Runs one suite.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport, VerifyError> {
    let orders: Vec<u32> = if cfg.orders.is_empty() { suite.default_orders().to_vec() } else { cfg.orders.clone() };
    let n_max = cfg.n_max.unwrap_or(suite.default_n_max());
    let mut rec = Recorder::new(suite);
    for &q in &orders {
        let ctx = field(q)?;
        match suite {
            Suite::FixedDims => fixed_dims(&mut rec, &ctx)?,
            Suite::Oracle => oracle(&mut rec, &ctx, cfg.seed)?,
            Suite::TwistedTraces => twisted_traces(&mut rec, &ctx, cfg.seed)?,
            Suite::InducedTraces => induced_traces(&mut rec, &ctx, cfg.seed)?,
            Suite::Counts => counts(&mut rec, q, n_max),
            Suite::Identities => identities(&mut rec, &ctx, n_max, cfg)?,
            Suite::Rg => rg(&mut rec, &ctx, n_max, cfg)?,
            Suite::Dimensions => dimensions(&mut rec, &ctx, n_max, cfg.seed)?,
            Suite::Signatures => signatures(&mut rec, &ctx, n_max, cfg.seed)?,
        }
    }
    if suite == Suite::Rg && cfg.orders.is_empty() {
        type_two_diagnostic(&mut rec, cfg)?;
    }
    Ok(rec.finish(cfg.seed))
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn model_oracle(ctx: &FqCtx, seed: u64) -> Result<Option<ModelOracle>, VerifyError> {
    if ctx.q() > MAX_MODEL_ORDER {
        return Ok(None);
    }
    Ok(Some(ModelOracle::new(ctx, seed)?))
}

/// Every `sigma` from ordered pairs of cuspidal labels with matching central
/// characters, not reduced up to isomorphism.
fn all_pairs(ctx: &FqCtx) -> Vec<SigmaLabel> {
    let labels = all_cuspidal_labels(ctx);
    let mut out = Vec::new();
    for &t1 in &labels {
        for &t2 in &labels {
            if let Ok(s) = SigmaLabel::new(ctx, t1, t2, Constituent::Full) {
                out.push(s);
            }
        }
    }
    out
}

fn fixed_dims(rec: &mut Recorder, ctx: &FqCtx) -> Result<(), VerifyError> {
    let q = ctx.q();
    let classes = Gl2Classifier::new(ctx);
    let mut cases = vec![FixedDimCase::FullTorus, FixedDimCase::FullUnip];
    if ctx.is_even() {
        cases.push(FixedDimCase::FullArtinUnip);
    }
    let pairs = all_pairs(ctx);
    for case in cases {
        let r = subgroup_r(ctx, case.subgroup())?;
        let mut bad = Vec::new();
        for s in &pairs {
            let om = s.theta2.omega_minus_one(ctx);
            let got = SigmaChar::new(ctx, &classes, *s, None)?.fixed_dim(&r)?;
            let want = closed_fixed_dim(case, q, om)?;
            if got != want {
                bad.push(format!("({}, {}): {got} vs {want}", s.theta1.k, s.theta2.k));
            }
        }
        rec.batch(format!("q={q} {case:?}"), pairs.len(), bad);
    }
    if !ctx.is_even() {
        let oracle = ModelOracle::new(ctx, 0)?;
        let torus = subgroup_r(ctx, SubgroupKind::Torus)?;
        let split: Vec<&SigmaLabel> =
            pairs.iter().filter(|s| split_restriction(ctx, &s.theta1) && split_restriction(ctx, &s.theta2)).collect();
        let mut bad = Vec::new();
        for s in &split {
            for c in [Constituent::Plus, Constituent::Minus] {
                let sc = SigmaLabel { constituent: c, ..**s };
                let got = SigmaChar::new(ctx, &classes, sc, Some(&oracle as &dyn ConstituentOracle))?.fixed_dim(&torus)?;
                let want = closed_fixed_dim(FixedDimCase::ConstituentTorus, q, s.theta2.omega_minus_one(ctx))?;
                if got != want {
                    bad.push(format!("({}, {}, {c:?}): {got} vs {want}", s.theta1.k, s.theta2.k));
                }
            }
        }
        rec.batch(format!("q={q} ConstituentTorus"), 2 * split.len(), bad);
    }
    Ok(())
}

fn standard_kinds(ctx: &FqCtx) -> Vec<SubgroupKind> {
    let mut k = vec![SubgroupKind::Torus, SubgroupKind::Unip];
    if ctx.is_even() {
        k.push(SubgroupKind::ArtinUnip);
    }
    k.extend([SubgroupKind::U1, SubgroupKind::U2]);
    k
}

fn oracle(rec: &mut Recorder, ctx: &FqCtx, seed: u64) -> Result<(), VerifyError> {
    let q = ctx.q();
    let classes = Gl2Classifier::new(ctx);
    let oracle = ModelOracle::new(ctx, seed)?;
    let dyn_oracle: &dyn ConstituentOracle = &oracle;
    let sigmas = all_sigma_labels(ctx);
    for kind in standard_kinds(ctx) {
        let r = subgroup_r(ctx, kind)?;
        let mut bad = Vec::new();
        for s in &sigmas {
            let rep = oracle.sigma_rep(s)?;
            let model = fixed_rank(&rep, &r)?;
            let by_char = SigmaChar::new(ctx, &classes, *s, Some(dyn_oracle))?.fixed_dim(&r)?;
            let closed = closed_for(ctx, s, kind).unwrap_or(by_char);
            if model != by_char || model != closed {
                bad.push(format!("{s:?}: model {model}, character {by_char}, closed {closed}"));
            }
        }
        rec.batch(format!("q={q} {kind:?}: model rank = character average"), sigmas.len(), bad);
    }
    let split: Vec<&SigmaLabel> = sigmas.iter().filter(|s| s.constituent != Constituent::Full).collect();
    if !split.is_empty() {
        let mut bad = Vec::new();
        for s in &split {
            if !is_self_twisted(ctx, &classes, s, Some(dyn_oracle))? {
                bad.push(format!("{s:?}"));
            }
        }
        rec.batch(format!("q={q} constituents are self-twisted"), split.len(), bad);
    }
    let mut bad = Vec::new();
    let full: Vec<&SigmaLabel> = sigmas.iter().filter(|s| s.constituent == Constituent::Full).collect();
    for s in &full {
        if is_self_twisted(ctx, &classes, s, None)? != is_self_twisted_label(ctx, s) {
            bad.push(format!("{s:?}"));
        }
    }
    rec.batch(format!("q={q} self-twist from labels = character test"), full.len(), bad);
    Ok(())
}

/// Closed-form fixed dimension where one is known.
fn closed_for(ctx: &FqCtx, s: &SigmaLabel, kind: SubgroupKind) -> Option<u32> {
    let om = s.theta2.omega_minus_one(ctx);
    let case = match (s.constituent, kind) {
        (Constituent::Full, SubgroupKind::Torus) => FixedDimCase::FullTorus,
        (Constituent::Full, SubgroupKind::Unip) => FixedDimCase::FullUnip,
        (Constituent::Full, SubgroupKind::ArtinUnip) => FixedDimCase::FullArtinUnip,
        (_, SubgroupKind::Torus) => FixedDimCase::ConstituentTorus,
        (_, SubgroupKind::U1 | SubgroupKind::U2) => return Some(0),
        _ => return None,
    };
    closed_fixed_dim(case, ctx.q(), om).ok()
}

fn twisted_traces(rec: &mut Recorder, ctx: &FqCtx, seed: u64) -> Result<(), VerifyError> {
    let q = ctx.q();
    let oracle = ModelOracle::new(ctx, seed)?;
    let kinds: Vec<SubgroupKind> = if ctx.is_even() {
        vec![SubgroupKind::Torus, SubgroupKind::Unip, SubgroupKind::ArtinUnip]
    } else {
        vec![SubgroupKind::Torus]
    };
    let mut sigmas: Vec<SigmaLabel> = all_sigma_labels(ctx).into_iter().map(|s| s.full()).collect();
    sigmas.dedup();
    let sigmas: Vec<SigmaLabel> = sigmas
        .into_iter()
        .filter(|s| {
            s.theta2.omega_minus_one(ctx) == 1
                && matches!(lambda_omega(ctx, s), Some(LambdaOmega::Trivial | LambdaOmega::Quadratic))
        })
        .collect();
    for kind in kinds {
        let r = subgroup_r(ctx, kind)?;
        for op in [TwistOperator::Swap, TwistOperator::Ww, TwistOperator::SwapWw] {
            let mut bad = Vec::new();
            let mut total = 0;
            for s in &sigmas {
                let Ok(want) = twisted_trace_closed(ctx, s, op, kind) else { continue };
                let m = oracle.lambda_rho(s)?;
                let mat = match op {
                    TwistOperator::Swap => m.swap.clone(),
                    TwistOperator::Ww => m.ww.clone(),
                    TwistOperator::SwapWw => m.swap_ww(),
                };
                let got = twisted_trace(&m.rep, &mat, &r)?;
                total += 1;
                if got != want {
                    bad.push(format!("{s:?}: {got} vs {want}"));
                }
            }
            if total > 0 {
                rec.batch(format!("q={q} {kind:?} {op:?}"), total, bad);
            }
        }
    }
    Ok(())
}

fn induced_traces(rec: &mut Recorder, ctx: &FqCtx, seed: u64) -> Result<(), VerifyError> {
    let q = ctx.q();
    let oracle = ModelOracle::new(ctx, seed)?;
    let group = ctx.enumerate_gl22()?;
    let sigmas: Vec<SigmaLabel> = all_sigma_labels(ctx)
        .into_iter()
        .filter(|s| s.constituent == Constituent::Full && !is_self_twisted_label(ctx, s))
        .collect();
    let mut kinds = vec![SubgroupKind::Torus, SubgroupKind::Unip];
    if ctx.is_even() {
        kinds.push(SubgroupKind::ArtinUnip);
    }
    for kind in kinds {
        let r = subgroup_r(ctx, kind)?;
        let normalizing: Vec<ExtElem> =
            group.iter().map(|&base| ExtElem { base, eps: true }).filter(|s| r.normalized_by(ctx, s)).collect();
        let mut bad = Vec::new();
        let mut total = 0;
        for s in &sigmas {
            let rep = oracle.sigma_rep(s)?;
            let model = InducedModel { sigma: &rep };
            for x in &normalizing {
                total += 1;
                let t = model.twisted_trace(ctx, x, &r)?;
                if t != 0 {
                    bad.push(format!("{s:?} at {x:?}: {t}"));
                }
            }
        }
        let name = format!("q={q} {kind:?}: {} normalising u-coset elements", normalizing.len());
        if sigmas.is_empty() {
            rec.info(name, true, "every sigma is self-twisted at this q; nothing to check");
        } else {
            rec.batch(name, total, bad);
        }
    }
    Ok(())
}

fn counts(rec: &mut Recorder, q: u32, n_max: u32) {
    for t in CosetType::ALL {
        let mut bad = Vec::new();
        let mut bad_fixed = Vec::new();
        for n in 0..=n_max {
            let (got, want) = (enumerate_type(t, q, n).len() as u64, closed_count(t, q, n));
            if got != want {
                bad.push(format!("n={n}: {got} vs {want}"));
            }
            let fixed = al_fixed_cosets(q, n).iter().filter(|(c, _)| c.ctype == t).count() as u64;
            if fixed != closed_fixed_count(t, q, n) {
                bad_fixed.push(format!("n={n}: {fixed} vs {}", closed_fixed_count(t, q, n)));
            }
        }
        rec.batch(format!("q={q} type {t}: enumeration = closed count"), n_max as usize + 1, bad);
        rec.batch(format!("q={q} type {t}: u_n-fixed cosets = closed count"), n_max as usize + 1, bad_fixed);
    }
    let mut bad = Vec::new();
    let mut total = 0;
    for n in 0..=n_max {
        let support = enumerate_support(q, n);
        for c in &support {
            total += 1;
            let d = al_partner(c, n);
            if !support.contains(&d) || al_partner(&d, n) != *c {
                bad.push(format!("n={n} {c}"));
            }
        }
    }
    rec.batch(format!("q={q} u_n acts as an involution on the support"), total, bad);
    if q.is_multiple_of(2) {
        let mut bad = Vec::new();
        for n in 4..=n_max {
            let weighted: u64 = enumerate_support(q, n).iter().map(|c| c.table_dim(q) as u64).sum();
            if weighted != f_even(n, q) {
                bad.push(format!("n={n}: {weighted} vs {}", f_even(n, q)));
            }
        }
        rec.batch(format!("q={q} weighted support count = closed dimension"), n_max.saturating_sub(3) as usize, bad);
    }
}

fn padic_ctx(ctx: &FqCtx, n_max: u32, precision: Option<u32>) -> Result<PadicCtx, VerifyError> {
    let prec = precision
        .unwrap_or_else(|| PadicCtx::default_precision(ctx.p(), n_max, (n_max / 2).max(3), n_max.max(6)));
    Ok(PadicCtx::new(ctx.p(), ctx.f(), prec)?)
}

/// Reductions of `u_1 k u_1^-1` against the `u`-action on reductions of `k`.
pub fn cross_layer(c: &PadicCtx, samples: usize, seed: u64) -> Result<(usize, Vec<String>), VerifyError> {
    let mut rng = rng_for(seed, 10);
    let out = verify_identity(c, IdentityTag::AtkinLehnerNormalizesK, 4, samples, &mut rng)?;
    Ok((out.checked, out.failures))
}

fn identities(rec: &mut Recorder, ctx: &FqCtx, n_max: u32, cfg: &VerifyConfig) -> Result<(), VerifyError> {
    let q = ctx.q();
    let trials = cfg.trials.unwrap_or(100);
    let mut rng = rng_for(cfg.seed, 7);
    for tag in IdentityTag::ALL {
        let mut bad = Vec::new();
        let mut checked = 0;
        for n in 4..=n_max.max(4) {
            let c = padic_ctx(ctx, n, cfg.precision)?;
            let out = verify_identity(&c, tag, n, trials, &mut rng)?;
            checked += out.checked;
            bad.extend(out.failures.into_iter().map(|f| format!("n={n}: {f}")));
        }
        rec.batch(format!("q={q} {tag:?}"), checked, bad);
    }
    let c = padic_ctx(ctx, 4, cfg.precision)?;
    let (checked, bad) = cross_layer(&c, 500, cfg.seed)?;
    rec.batch(format!("q={q} reduction intertwines u_1-conjugation with the u-action"), checked, bad);
    Ok(())
}

fn contains_u1_or_conjugate_u2(ctx: &FqCtx, r: &SubgroupR) -> Result<bool, VerifyError> {
    let u1 = subgroup_r(ctx, SubgroupKind::U1)?;
    if u1.is_subset_of(r) {
        return Ok(true);
    }
    let u2 = subgroup_r(ctx, SubgroupKind::U2)?;
    Ok(ctx.enumerate_gl22()?.iter().any(|x| u2.conjugate_by(ctx, x).is_subset_of(r)))
}

/// Cosets outside the support bounds, with the level they are tested at.
fn off_support_panel(c: &PadicCtx) -> Vec<(String, u32, GSp4Elem)> {
    let w = |k: i64| c.w_pow(k);
    let z = crate::padic::Padic::ZERO;
    let mut out = Vec::new();
    // 2i + j >= n - 1
    for (n, i, j) in [(4, 0, 3), (4, 0, 4), (4, 1, 1), (5, 0, 4), (5, 1, 2), (6, 0, 5), (6, 1, 3), (6, 2, 1)] {
        out.push((format!("t_{{{i},{j}}} n={n}"), n, c.t_ij(i, j)));
    }
    // j <= 0
    for (n, i, j) in [(4, 0, 0), (5, 1, 0), (6, 1, -1), (6, 2, -2)] {
        out.push((format!("t_{{{i},{j}}} n={n}"), n, c.t_ij(i, j)));
    }
    // val(x^2) <= 2i + j + 1
    for (n, i, j, vx) in [(5, 0, 2, 0), (5, 0, 2, 1), (6, 1, 1, 1), (6, 0, 3, 1)] {
        let g = c.g_mul(&c.t_ij(i, j), &c.s_xyz(&w(vx), &z, &z));
        out.push((format!("t_{{{i},{j}}}S(p^{vx},0,0) n={n}"), n, g));
    }
    // val(y^2) <= j
    for (n, i, j, vy) in [(5, 0, 2, 1), (6, 0, 4, 2)] {
        let g = c.g_mul(&c.t_ij(i, j), &c.s_xyz(&z, &w(vy), &z));
        out.push((format!("t_{{{i},{j}}}S(0,p^{vy},0) n={n}"), n, g));
    }
    // 1 <= val(y) <= j - 1 with val(z) != 2i + 1 + val(y)
    for (n, i, j, vy, vz) in [(6, 0, 3, 2, 4), (6, 0, 4, 2, 5)] {
        let g = c.g_mul(&c.t_ij(i, j), &c.s_xyz(&z, &w(vy), &w(vz)));
        out.push((format!("t_{{{i},{j}}}S(0,p^{vy},p^{vz}) n={n}"), n, g));
    }
    out
}

fn rg_check(
    c: &PadicCtx,
    param: &CosetParam,
    n: u32,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(bool, String), VerifyError> {
    let ctx = c.residue_field();
    let g = representative(c, param);
    let sample = c.sample_rg(&g, n, &RgSampling::default(), rng)?;
    let witness = c.witness_rg(&g, n, &witness_family(c, param)?, draws, rng)?;
    let standard = subgroup_r(ctx, param.r_kind())?;
    let conj = conjugate_subgroups(ctx, &sample.group, &standard).is_some();
    let inside = witness.is_subset_of(&sample.group);
    let witness_conj = conjugate_subgroups(ctx, &witness, &standard).is_some();
    let ok = conj && inside && witness_conj;
    let detail = format!(
        "n={n} {param}: |R_g| = {} after {} proposals, witness {} , standard {:?} of order {}",
        sample.group.len(),
        sample.proposals,
        witness.len(),
        param.r_kind(),
        standard.len()
    );
    Ok((ok, detail))
}

fn rg(rec: &mut Recorder, ctx: &FqCtx, n_max: u32, cfg: &VerifyConfig) -> Result<(), VerifyError> {
    let q = ctx.q();
    let c = padic_ctx(ctx, n_max + 4, cfg.precision)?;
    let mut rng = rng_for(cfg.seed, 3);
    let draws = cfg.trials.unwrap_or(60);
    for n in 0..=n_max {
        for param in enumerate_support(q, n) {
            let (ok, detail) = rg_check(&c, &param, n, draws, &mut rng)?;
            let name = format!("q={q} n={n} {param}: R_g conjugate to the tabulated subgroup");
            if param.ctype == CosetType::II && q > 2 {
                rec.info(name, ok, detail);
            } else {
                rec.push(name, ok, detail);
            }
        }
    }
    if q == 2 {
        for (name, n, g) in off_support_panel(&c) {
            let sample = c.sample_rg(&g, n, &RgSampling::default(), &mut rng)?;
            let ok = contains_u1_or_conjugate_u2(ctx, &sample.group)?;
            rec.push(format!("off-support {name}: R_g contains U1 or a conjugate of U2"), ok, format!("|R_g| = {}", sample.group.len()));
        }
    }
    Ok(())
}

/// The order of `R_g` on a type II coset at `q = 4`, against the tabulated torus.
fn type_two_diagnostic(rec: &mut Recorder, cfg: &VerifyConfig) -> Result<(), VerifyError> {
    let ctx = field(4)?;
    let c = padic_ctx(&ctx, 11, cfg.precision)?;
    let mut rng = rng_for(cfg.seed, 4);
    let param = CosetParam::new(CosetType::II, 0, 3, None);
    let g = representative(&c, &param);
    let sample = c.sample_rg(&g, 7, &RgSampling::default(), &mut rng)?;
    let torus = subgroup_r(&ctx, SubgroupKind::Torus)?;
    let ok = conjugate_subgroups(&ctx, &sample.group, &torus).is_some();
    rec.info(
        format!("q=4 n=7 {param}: R_g against the tabulated torus"),
        ok,
        format!("|R_g| = {}, |Torus| = {}", sample.group.len(), torus.len()),
    );
    Ok(())
}

fn assemblers(ctx: &FqCtx, seed: u64, signs: &[i32]) -> Result<Vec<Assembler>, VerifyError> {
    let classes = Gl2Classifier::new(ctx);
    let oracle = model_oracle(ctx, seed)?;
    let mut out = Vec::new();
    for sigma in all_sigma_labels(ctx) {
        for &sign in signs {
            let tau = TauSpec::new(ctx, sigma, sign)?;
            let source = if oracle.is_some() { Source::Computed } else { Source::Closed };
            out.push(Assembler::new(ctx, &classes, tau, source, oracle.as_ref())?);
        }
    }
    Ok(out)
}

fn tau_name(a: &Assembler) -> String {
    let s = &a.tau.sigma;
    format!("({}, {}, {:?}) {}", s.theta1.k, s.theta2.k, s.constituent, a.tau.class)
}

fn dimensions(rec: &mut Recorder, ctx: &FqCtx, n_max: u32, seed: u64) -> Result<(), VerifyError> {
    let q = ctx.q();
    for a in assemblers(ctx, seed, &[1])? {
        let bad: Vec<String> = (0..=n_max)
            .map(|n| a.assemble_dim(n))
            .filter(|r| !r.matched)
            .map(|r| format!("n={}: {} vs {}", r.n, r.assembled, r.closed))
            .collect();
        rec.batch(format!("q={q} {}: assembled dimension = closed form", tau_name(&a)), n_max as usize + 1, bad);
    }
    if q == 2 {
        let a = &assemblers(ctx, seed, &[1])?[0];
        let seq: Vec<u64> = (0..=8).map(|n| a.assemble_dim(n).assembled).collect();
        rec.push("q=2 dimensions for n = 0..8", seq == [0, 0, 0, 1, 3, 7, 13, 23, 35], format!("{seq:?}"));
    }
    Ok(())
}

fn signatures(rec: &mut Recorder, ctx: &FqCtx, n_max: u32, seed: u64) -> Result<(), VerifyError> {
    let q = ctx.q();
    for a in assemblers(ctx, seed, &[1, -1])? {
        let mut bad = Vec::new();
        for n in 3..=n_max {
            let r = a.assemble_al(n)?;
            if !r.matched {
                bad.push(format!("n={n}: {} vs {}", r.assembled, r.closed));
            }
        }
        rec.batch(
            format!("q={q} {} sign {:+}: assembled signature = closed form", tau_name(&a), a.tau.ext_sign),
            n_max.saturating_sub(2) as usize,
            bad,
        );
    }
    if q == 2 {
        let a = &assemblers(ctx, seed, &[1])?[0];
        let mut got = Vec::new();
        let mut want = Vec::new();
        for n in 3..=n_max {
            got.push(a.assemble_al(n)?.assembled);
            want.push(match n {
                3 => 1,
                n if n % 2 == 0 => n as i64 - 3,
                n => 2 * n as i64 - 7,
            });
        }
        rec.push(format!("q=2 signatures for n = 3..{n_max}"), got == want, format!("{got:?}"));
    }
    Ok(())
}
