//! Support of the Siegel-fixed functions: coset enumeration, counts,
//! Atkin-Lehner action, and assembly of dimensions and signatures.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chars::{
    closed_fixed_dim, is_self_twisted_label, lambda_omega, twisted_trace_closed, u1_twist, CharsError,
    Constituent, ConstituentOracle, FixedDimCase, Gl2Classifier, LambdaOmega, SigmaChar, SigmaLabel, TwistOperator,
};
use crate::finitegrp::{subgroup_r, ExtElem, FiniteGroupError, Fq, FqCtx, Gl22, SubgroupKind};
use crate::models::{twisted_trace, u_intertwiner, InducedModel, ModelError, ModelOracle};
use crate::padic::{GSp4Elem, LeviFamily, PadicCtx, PadicError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SupportError {
    #[error("extension sign must be +1 or -1, got {0}")]
    BadSign(i32),
    #[error("no closed form for {0}")]
    NoClosedForm(String),
    #[error(transparent)]
    Chars(#[from] CharsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    FiniteGroup(#[from] FiniteGroupError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CosetType {
    I,
    II,
    IIIa,
    IIIb,
    IV,
}

impl CosetType {
    pub const ALL: [CosetType; 5] = [CosetType::I, CosetType::II, CosetType::IIIa, CosetType::IIIb, CosetType::IV];

    /// Smallest `j` allowed for the type.
    fn min_j(self) -> i64 {
        match self {
            CosetType::I => 1,
            CosetType::II => 2,
            CosetType::IIIa => 3,
            CosetType::IIIb => 5,
            CosetType::IV => 4,
        }
    }

    /// Standard subgroup conjugate to `R_g` on cosets of this type.
    pub fn r_kind(self) -> SubgroupKind {
        match self {
            CosetType::I | CosetType::II => SubgroupKind::Torus,
            CosetType::IIIa => SubgroupKind::Unip,
            CosetType::IIIb | CosetType::IV => SubgroupKind::ArtinUnip,
        }
    }

    /// How a coset fixed by `u_n` contributes to the signature.
    pub fn al_kind(self) -> ContributionKind {
        match self {
            CosetType::II | CosetType::IV => ContributionKind::Plain,
            _ => ContributionKind::Twisted,
        }
    }
}

impl fmt::Display for CosetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CosetType::I => "I",
            CosetType::II => "II",
            CosetType::IIIa => "IIIa",
            CosetType::IIIb => "IIIb",
            CosetType::IV => "IV",
        })
    }
}

/// One double coset in the support. `uclass` is the code of an element of
/// `F_q` (type IIIb) or `F_q^x` (type IV).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetParam {
    pub ctype: CosetType,
    pub i: i64,
    pub j: i64,
    pub r: Option<i64>,
    pub k: Option<i64>,
    pub uclass: Option<u8>,
}

impl CosetParam {
    /// The parameter of type `ctype` at `(i, j)`, with dependent fields filled in.
    pub fn new(ctype: CosetType, i: i64, j: i64, uclass: Option<u8>) -> CosetParam {
        let (r, k) = match ctype {
            CosetType::I => (None, None),
            CosetType::II => (None, Some(i + j)),
            CosetType::IIIa => (Some(j - 1), None),
            CosetType::IIIb => (Some(j - 2), None),
            CosetType::IV => (Some(j - 1), Some(i + j - 1)),
        };
        CosetParam { ctype, i, j, r, k, uclass }
    }

    pub fn r_kind(&self) -> SubgroupKind {
        self.ctype.r_kind()
    }

    /// Dimension of `R_g`-fixed vectors recorded for the type (`sigma` with
    /// trivial central character, `q` even).
    pub fn table_dim(&self, q: u32) -> u32 {
        match self.ctype {
            CosetType::IIIa => q - 1,
            _ => 1,
        }
    }
}

impl fmt::Display for CosetParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = (self.i, self.j);
        let u = self.uclass.unwrap_or(1);
        match self.ctype {
            CosetType::I => write!(f, "t_{{{i},{j}}}"),
            CosetType::II => write!(f, "t_{{{i},{j}}}X_{}", self.k.unwrap_or(i + j)),
            CosetType::IIIa => write!(f, "Y_{{{i},{j},{}}}(1)", self.r.unwrap_or(j - 1)),
            CosetType::IIIb => write!(f, "Y_{{{i},{j},{}}}(1+2[{u}])", self.r.unwrap_or(j - 2)),
            CosetType::IV => write!(f, "Z_{{{i},{j}}}([{u}])"),
        }
    }
}

fn floor_sq_quarter(m: i64) -> u64 {
    (m * m / 4) as u64
}

/// Closed-form number of support cosets of one type.
pub fn closed_count(ctype: CosetType, q: u32, n: u32) -> u64 {
    let n = n as i64;
    let q = q as u64;
    if ctype != CosetType::I && (q % 2 == 1 || n <= 3) {
        return 0;
    }
    match ctype {
        CosetType::I => floor_sq_quarter(n - 1),
        CosetType::II => floor_sq_quarter(n - 2),
        CosetType::IIIa => floor_sq_quarter(n - 3),
        CosetType::IIIb => q * floor_sq_quarter(n - 5),
        CosetType::IV => (q - 1) * floor_sq_quarter(n - 4),
    }
}

fn uclasses(ctype: CosetType, q: u32) -> Vec<Option<u8>> {
    match ctype {
        CosetType::IIIb => (0..q as u8).map(Some).collect(),
        CosetType::IV => (1..q as u8).map(Some).collect(),
        _ => vec![None],
    }
}

/// Support cosets of the given type, ordered by `(i, j, uclass)`.
pub fn enumerate_type(ctype: CosetType, q: u32, n: u32) -> Vec<CosetParam> {
    if ctype != CosetType::I && q % 2 == 1 {
        return Vec::new();
    }
    let n = n as i64;
    let mut out = Vec::new();
    let mut i = 0;
    while n - 2 - 2 * i >= ctype.min_j() {
        for j in ctype.min_j()..=n - 2 - 2 * i {
            for u in uclasses(ctype, q) {
                out.push(CosetParam::new(ctype, i, j, u));
            }
        }
        i += 1;
    }
    out
}

/// All support cosets. Odd `q` only has type I.
pub fn enumerate_support(q: u32, n: u32) -> Vec<CosetParam> {
    CosetType::ALL.iter().flat_map(|&t| enumerate_type(t, q, n)).collect()
}

/// The coset of `g u_n` for `g` representing `c`.
pub fn al_partner(c: &CosetParam, n: u32) -> CosetParam {
    let n = n as i64;
    let (i, j) = (c.i, c.j);
    let j2 = match c.ctype {
        CosetType::I => n - 2 * i - j - 1,
        CosetType::II => n - 2 * i - j,
        CosetType::IIIa => n - 2 * i - j + 1,
        CosetType::IIIb => n - 2 * i - j + 3,
        CosetType::IV => n - 2 * i - j + 2,
    };
    CosetParam::new(c.ctype, i, j2, c.uclass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContributionKind {
    /// `tau(s)` is trivial on the fixed space up to the coset identification.
    Plain,
    /// Trace of `tau(u_1)` (times a finite group element for type III).
    Twisted,
}

/// Support cosets fixed by `u_n`.
pub fn al_fixed_cosets(q: u32, n: u32) -> Vec<(CosetParam, ContributionKind)> {
    enumerate_support(q, n)
        .into_iter()
        .filter(|c| al_partner(c, n) == *c)
        .map(|c| (c, c.ctype.al_kind()))
        .collect()
}

/// Closed-form number of `u_n`-fixed cosets of one type.
pub fn closed_fixed_count(ctype: CosetType, q: u32, n: u32) -> u64 {
    let (q, n) = (q as u64, n as u64);
    let even_q = q % 2 == 0;
    match ctype {
        CosetType::I if n % 2 == 1 => (n - 1) / 2,
        CosetType::II if even_q && n % 2 == 0 && n >= 4 => (n - 2) / 2,
        CosetType::IIIa if even_q && n % 2 == 1 && n >= 5 => (n - 3) / 2,
        CosetType::IIIb if even_q && n % 2 == 1 && n >= 7 => q * (n - 5) / 2,
        CosetType::IV if even_q && n % 2 == 0 && n >= 6 => (q - 1) * (n - 4) / 2,
        _ => 0,
    }
}

/// The extension element `s` acting on a fixed coset of the given type,
/// as an element of the `u`-coset.
pub fn al_operator(ctx: &FqCtx, ctype: CosetType) -> ExtElem {
    let base = match ctype {
        CosetType::IIIa | CosetType::IIIb => Gl22::new(ctx.w(), ctx.w()),
        _ => Gl22::IDENTITY,
    };
    ExtElem { base, eps: true }
}

/// Whether `sigma` is isomorphic to its `u_1`-twist, and in which way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SigmaClass {
    NotSelfTwisted,
    SelfTwistedFull(LambdaOmega),
    /// A proper constituent of a split restriction (always self-twisted).
    Constituent,
}

impl fmt::Display for SigmaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaClass::NotSelfTwisted => f.write_str("not-self-twisted"),
            SigmaClass::SelfTwistedFull(LambdaOmega::Trivial) => f.write_str("self-twisted:trivial"),
            SigmaClass::SelfTwistedFull(LambdaOmega::Quadratic) => f.write_str("self-twisted:quadratic"),
            SigmaClass::SelfTwistedFull(LambdaOmega::Other) => f.write_str("self-twisted:other"),
            SigmaClass::Constituent => f.write_str("constituent"),
        }
    }
}

/// The representation `tau` of the normaliser, determined by `sigma` and,
/// when `sigma` is self-twisted, the sign of the extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauSpec {
    pub sigma: SigmaLabel,
    pub class: SigmaClass,
    pub central_trivial: bool,
    pub ext_sign: i32,
}

impl TauSpec {
    pub fn new(ctx: &FqCtx, sigma: SigmaLabel, ext_sign: i32) -> Result<TauSpec, SupportError> {
        if ext_sign.abs() != 1 {
            return Err(SupportError::BadSign(ext_sign));
        }
        let class = if sigma.constituent != Constituent::Full {
            SigmaClass::Constituent
        } else if is_self_twisted_label(ctx, &sigma) {
            SigmaClass::SelfTwistedFull(lambda_omega(ctx, &sigma).unwrap_or(LambdaOmega::Other))
        } else {
            SigmaClass::NotSelfTwisted
        };
        Ok(TauSpec { sigma, class, central_trivial: sigma.central_trivial(ctx), ext_sign })
    }

    pub fn self_twisted(&self) -> bool {
        self.class != SigmaClass::NotSelfTwisted
    }
}

/// Closed form for `dim pi^{Si(n)}` with `q` even, self-twisted `sigma`.
pub fn f_even(n: u32, q: u32) -> u64 {
    let (n, q) = (n as i64, q as i64);
    match n {
        0..=2 => 0,
        3 => 1,
        _ => (2 * n - 5 + q * ((3 * n * n + 1) / 4 - 6 * n + 12)) as u64,
    }
}

/// Closed-form dimension of the Siegel-fixed vectors.
pub fn dim_formula(tau: &TauSpec, q: u32, n: u32) -> u64 {
    if !tau.central_trivial {
        return 0;
    }
    let mult = if tau.self_twisted() { 1 } else { 2 };
    if q.is_multiple_of(2) {
        return mult * f_even(n, q);
    }
    let factor = match tau.class {
        SigmaClass::NotSelfTwisted => 4,
        SigmaClass::SelfTwistedFull(_) => 2,
        SigmaClass::Constituent => 1,
    };
    factor * floor_sq_quarter(n as i64 - 1)
}

/// Closed-form Atkin-Lehner signature (trace of `u_n` on the fixed vectors).
pub fn al_formula(tau: &TauSpec, q: u32, n: u32) -> Result<i64, SupportError> {
    if n < 3 || !tau.central_trivial {
        return Ok(0);
    }
    let (n, qi) = (n as i64, q as i64);
    let s = tau.ext_sign as i64;
    if n % 2 == 0 {
        if q % 2 == 1 {
            return Ok(0);
        }
        let mult = if tau.self_twisted() { 1 } else { 2 };
        return Ok(mult * (1 + qi * (n - 4) / 2));
    }
    if q.is_multiple_of(2) {
        return Ok(match (tau.self_twisted(), n) {
            (false, _) => 0,
            (true, 3) => s,
            (true, _) => s * (1 + qi * (n - 4)),
        });
    }
    let factor = match tau.class {
        SigmaClass::NotSelfTwisted => 0,
        SigmaClass::SelfTwistedFull(LambdaOmega::Trivial) => 2,
        SigmaClass::SelfTwistedFull(LambdaOmega::Quadratic) => 0,
        SigmaClass::SelfTwistedFull(LambdaOmega::Other) => {
            return Err(SupportError::NoClosedForm("lambda omega_rho of order > 2".into()))
        }
        SigmaClass::Constituent => 1,
    };
    Ok(s * (n - 1) / 2 * factor)
}

/// Per-type tally in a dimension report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeTally {
    pub ctype: CosetType,
    pub count: u64,
    pub closed_count: u64,
    pub fixed_dim: u64,
    pub subtotal: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub n: u32,
    pub per_type: Vec<TypeTally>,
    pub assembled: u64,
    pub closed: u64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlContribution {
    pub coset: CosetParam,
    pub kind: ContributionKind,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlReport {
    pub n: u32,
    pub contributions: Vec<AlContribution>,
    pub assembled: i64,
    pub closed: i64,
    pub matched: bool,
}

/// Where the per-coset quantities come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    /// Character averages, and twisted traces on explicit models.
    Computed,
    /// Closed forms for the finite-group quantities.
    Closed,
}

/// Per-`tau` finite-group data, computed once and reused for every `n`.
pub struct Assembler {
    pub q: u32,
    pub tau: TauSpec,
    pub source: Source,
    tau_dims: HashMap<SubgroupKind, u64>,
    twisted: HashMap<CosetType, i64>,
}

fn closed_case(tau: &TauSpec, kind: SubgroupKind) -> FixedDimCase {
    match (tau.class, kind) {
        (SigmaClass::Constituent, _) => FixedDimCase::ConstituentTorus,
        (_, SubgroupKind::Unip) => FixedDimCase::FullUnip,
        (_, SubgroupKind::ArtinUnip) => FixedDimCase::FullArtinUnip,
        _ => FixedDimCase::FullTorus,
    }
}

impl Assembler {
    /// `oracle` is needed for constituents with [`Source::Computed`], and for
    /// every twisted trace of a self-twisted `sigma` on that path.
    pub fn new(
        ctx: &FqCtx,
        classes: &Gl2Classifier,
        tau: TauSpec,
        source: Source,
        oracle: Option<&ModelOracle>,
    ) -> Result<Assembler, SupportError> {
        let kinds: &[SubgroupKind] = if ctx.is_even() {
            &[SubgroupKind::Torus, SubgroupKind::Unip, SubgroupKind::ArtinUnip]
        } else {
            &[SubgroupKind::Torus]
        };
        let mut tau_dims = HashMap::new();
        let sigma_dims = |sigma: &SigmaLabel| -> Result<Vec<u64>, SupportError> {
            let mut out = Vec::new();
            for &kind in kinds {
                let d = match source {
                    Source::Closed if !tau.central_trivial => 0,
                    Source::Closed => {
                        closed_fixed_dim(closed_case(&tau, kind), ctx.q(), sigma.theta2.omega_minus_one(ctx))? as u64
                    }
                    Source::Computed => {
                        let dyn_oracle = oracle.map(|o| o as &dyn ConstituentOracle);
                        let r = subgroup_r(ctx, kind)?;
                        SigmaChar::new(ctx, classes, *sigma, dyn_oracle)?.fixed_dim(&r)? as u64
                    }
                };
                out.push(d);
            }
            Ok(out)
        };
        let mut dims = sigma_dims(&tau.sigma)?;
        if !tau.self_twisted() {
            let twisted = u1_twist(ctx, classes, &tau.sigma, None)?;
            for (d, e) in dims.iter_mut().zip(sigma_dims(&twisted)?) {
                *d += e;
            }
        }
        for (&k, d) in kinds.iter().zip(dims) {
            tau_dims.insert(k, d);
        }
        let mut a = Assembler { q: ctx.q(), tau, source, tau_dims, twisted: HashMap::new() };
        let twisted_types: &[CosetType] =
            if ctx.is_even() { &[CosetType::I, CosetType::IIIa, CosetType::IIIb] } else { &[CosetType::I] };
        for &t in twisted_types {
            let v = a.twisted_contribution(ctx, t, oracle)?;
            a.twisted.insert(t, v);
        }
        Ok(a)
    }

    fn twisted_contribution(&self, ctx: &FqCtx, t: CosetType, oracle: Option<&ModelOracle>) -> Result<i64, SupportError> {
        let kind = t.r_kind();
        if self.tau_dims[&kind] == 0 {
            return Ok(0);
        }
        let tau = &self.tau;
        let s = al_operator(ctx, t);
        match (self.source, oracle) {
            (Source::Computed, Some(o)) => {
                let r = subgroup_r(ctx, kind)?;
                if !tau.self_twisted() {
                    let rep = o.sigma_rep(&tau.sigma)?;
                    return Ok(InducedModel { sigma: &rep }.twisted_trace(ctx, &s, &r)?);
                }
                let rep = o.sigma_rep(&tau.sigma)?;
                let torus = subgroup_r(ctx, SubgroupKind::Torus)?;
                let t_op = u_intertwiner(ctx, &rep)?.with_sign(&rep, &torus, tau.ext_sign);
                let op = t_op.matrix * rep.matrix(&s.base);
                Ok(twisted_trace(&rep, &op, &r)?)
            }
            (Source::Computed, None) if tau.self_twisted() => Err(CharsError::OracleRequired.into()),
            _ => {
                let sign = tau.ext_sign as i64;
                Ok(match tau.class {
                    SigmaClass::NotSelfTwisted => 0,
                    SigmaClass::Constituent => sign * self.tau_dims[&kind] as i64,
                    SigmaClass::SelfTwistedFull(_) => {
                        // tau(u_1) = +-swap o sigma(w, w); with sigma(w, w)^2 = 1 at even q
                        // the type III operator is the bare swap.
                        let op = if t == CosetType::I { TwistOperator::SwapWw } else { TwistOperator::Swap };
                        sign * twisted_trace_closed(ctx, &tau.sigma, op, kind)?
                    }
                })
            }
        }
    }

    /// `dim tau^R` for a standard `R`.
    pub fn tau_dim(&self, kind: SubgroupKind) -> u64 {
        self.tau_dims.get(&kind).copied().unwrap_or(0)
    }

    /// Sum of `dim tau^{R_g}` over the support.
    pub fn assemble_dim(&self, n: u32) -> DimReport {
        let per_type: Vec<TypeTally> = CosetType::ALL
            .iter()
            .map(|&t| {
                let count = enumerate_type(t, self.q, n).len() as u64;
                let fixed_dim = self.tau_dim(t.r_kind());
                TypeTally { ctype: t, count, closed_count: closed_count(t, self.q, n), fixed_dim, subtotal: count * fixed_dim }
            })
            .collect();
        let assembled = per_type.iter().map(|t| t.subtotal).sum();
        let closed = dim_formula(&self.tau, self.q, n);
        DimReport { n, per_type, assembled, closed, matched: assembled == closed }
    }

    /// Sum of contributions of the `u_n`-fixed cosets.
    pub fn assemble_al(&self, n: u32) -> Result<AlReport, SupportError> {
        let contributions = self.al_contributions(n);
        let assembled = contributions.iter().map(|c| c.value).sum();
        let closed = al_formula(&self.tau, self.q, n)?;
        Ok(AlReport { n, contributions, assembled, closed, matched: assembled == closed })
    }

    /// Per-coset contributions to the trace of `u_n`.
    pub fn al_contributions(&self, n: u32) -> Vec<AlContribution> {
        al_fixed_cosets(self.q, n)
            .into_iter()
            .map(|(coset, kind)| {
                let value = match kind {
                    ContributionKind::Plain => self.tau_dim(coset.r_kind()) as i64,
                    ContributionKind::Twisted => self.twisted.get(&coset.ctype).copied().unwrap_or(0),
                };
                AlContribution { coset, kind, value }
            })
            .collect()
    }
}

/// Unit representing the class `uclass`.
fn class_unit(c: &PadicCtx, p: &CosetParam) -> crate::padic::Padic {
    let u = Fq(p.uclass.unwrap_or(1));
    match p.ctype {
        CosetType::IIIb => c.add(&c.one(), &c.mul(&c.int(2), &c.lift(u))),
        CosetType::IV => c.lift(u),
        _ => c.one(),
    }
}

/// The matrix representative of a coset.
pub fn representative(c: &PadicCtx, p: &CosetParam) -> GSp4Elem {
    let u = class_unit(c, p);
    match p.ctype {
        CosetType::I => c.t_ij(p.i, p.j),
        CosetType::II => c.g_mul(&c.t_ij(p.i, p.j), &c.x_k(p.i + p.j)),
        CosetType::IIIa => c.y_ijr(p.i, p.j, p.j - 1, &u),
        CosetType::IIIb => c.y_ijr(p.i, p.j, p.j - 2, &u),
        CosetType::IV => c.z_ij(p.i, p.j, &u),
    }
}

/// Levi elements of `Si(n)` whose conjugates by the representative generate
/// the predicted `R_g`.
pub fn witness_family(c: &PadicCtx, p: &CosetParam) -> Result<LeviFamily, PadicError> {
    let u = class_unit(c, p);
    Ok(match p.ctype {
        CosetType::I => LeviFamily::Diagonal,
        CosetType::II => LeviFamily::DiagonalNearOne,
        CosetType::IIIa => LeviFamily::Unipotent { j: p.j, y: c.mul(&c.w_pow(p.j - 1), &u), d: 1 },
        CosetType::IIIb => LeviFamily::Unipotent { j: p.j, y: c.mul(&c.w_pow(p.j - 2), &u), d: 1 },
        CosetType::IV => LeviFamily::Mixed { i: p.i, t: u, u: c.inv(&u)? },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        let s = enumerate_support(3, 5);
        let ij: Vec<(i64, i64)> = s.iter().map(|c| (c.i, c.j)).collect();
        assert_eq!(ij, vec![(0, 1), (0, 2), (0, 3), (1, 1)]);
        let s = enumerate_support(2, 4);
        assert_eq!(s.iter().filter(|c| c.ctype == CosetType::I).count(), 2);
        assert_eq!(s.iter().filter(|c| c.ctype == CosetType::II).count(), 1);
        assert_eq!(s.len(), 3);
        assert_eq!(enumerate_support(2, 3).len(), 1);
        assert_eq!(closed_count(CosetType::I, 5, 6), 6);
        assert_eq!(closed_count(CosetType::IIIb, 2, 7), 2);
        assert_eq!(closed_count(CosetType::IV, 4, 8), 12);
    }

    #[test]
    fn fixed_coset_examples() {
        let f = al_fixed_cosets(2, 4);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].0.ctype, CosetType::II);
        assert_eq!(f[0].1, ContributionKind::Plain);
        let f = al_fixed_cosets(2, 5);
        let count = |t| f.iter().filter(|(c, _)| c.ctype == t).count();
        assert_eq!((count(CosetType::I), count(CosetType::IIIa), count(CosetType::IIIb)), (2, 1, 0));
        assert_eq!(al_fixed_cosets(2, 7).iter().filter(|(c, _)| c.ctype == CosetType::IIIb).count(), 2);
        let f = al_fixed_cosets(3, 3);
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].0.i, f[0].0.j), (0, 1));
    }

    #[test]
    fn closed_forms() {
        let seq: Vec<u64> = (0..=8).map(|n| f_even(n, 2)).collect();
        assert_eq!(seq, vec![0, 0, 0, 1, 3, 7, 13, 23, 35]);
        for n in 0..40 {
            let n64 = n as i64;
            assert_eq!(f_even(n, 2) as i64, if n < 4 { f_even(n, 2) as i64 } else { (3 * n64 * n64 - 20 * n64 + 39) / 2 });
        }
    }
}
