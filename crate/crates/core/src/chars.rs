//! Cuspidal characters of `GL_2(q)`, representations of `GL_{2,2}(q)` built
//! from pairs of them, and the closed-form fixed-space dimensions and
//! twisted traces used by the dimension and signature formulas.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finitegrp::{ExtElem, FiniteGroupError, Fq, FqCtx, Gl2, Gl22, SubgroupKind, SubgroupR};
use crate::numerics::{certify_complex, root_of_unity, CharValue, NumericsError, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharsError {
    #[error("exponent {k} does not label a cuspidal representation at q = {q}")]
    InvalidLabel { k: i64, q: u32 },
    #[error("central characters of the two factors do not multiply to 1")]
    CentralMismatch,
    #[error("split constituents need odd q and both labels with split restriction")]
    BadConstituent,
    #[error("closed form case {case:?} does not apply at q = {q} with omega(-1) = {omega_minus_one}")]
    BadCase { case: FixedDimCase, q: u32, omega_minus_one: i32 },
    #[error("constituent characters need an explicit model oracle")]
    OracleRequired,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    FiniteGroup(#[from] FiniteGroupError),
}

/// Conjugacy type of an element of `GL_2(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gl2Class {
    /// `g1^l * I`.
    Scalar(u32),
    /// Single eigenvalue `g1^l`, not diagonalisable.
    NonSemisimple(u32),
    Split,
    /// Eigenvalues `g2^j` and `g2^(jq)` outside `F_q`.
    Elliptic(u32),
}

#[derive(Debug, Clone, Copy)]
enum Roots {
    Double(u32),
    Split,
    Elliptic(u32),
}

/// Class lookup keyed on the characteristic polynomial.
#[derive(Debug, Clone)]
pub struct Gl2Classifier {
    q: u32,
    by_poly: Vec<Roots>,
}

impl Gl2Classifier {
    pub fn new(ctx: &FqCtx) -> Gl2Classifier {
        let q = ctx.q();
        let key = |tr: Fq, det: Fq| tr.index() + q as usize * det.index();
        let mut by_poly = vec![Roots::Split; (q * q) as usize];
        for l in 0..q - 1 {
            let a = ctx.gen_pow(l as i64);
            by_poly[key(ctx.add(a, a), ctx.mul(a, a))] = Roots::Double(l);
        }
        for j in 0..ctx.big_order() {
            if j % (q + 1) != 0 {
                let t = ctx.big_gen_pow(j as i64);
                by_poly[key(ctx.trace(t), ctx.norm(t))] = Roots::Elliptic(j);
            }
        }
        Gl2Classifier { q, by_poly }
    }

    pub fn classify(&self, ctx: &FqCtx, g: &Gl2) -> Gl2Class {
        if g.b.is_zero() && g.c.is_zero() && g.a == g.d {
            return Gl2Class::Scalar(g.a.log().expect("invertible"));
        }
        let k = ctx.gl2_trace(g).index() + self.q as usize * ctx.gl2_det(g).index();
        match self.by_poly[k] {
            Roots::Double(l) => Gl2Class::NonSemisimple(l),
            Roots::Split => Gl2Class::Split,
            Roots::Elliptic(j) => Gl2Class::Elliptic(j),
        }
    }
}

/// A character `theta(g2^j) = zeta_{q^2-1}^{kj}` of `F_{q^2}^x` with `theta^q != theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CuspidalLabel {
    pub k: u32,
}

impl CuspidalLabel {
    pub fn new(ctx: &FqCtx, k: i64) -> Result<CuspidalLabel, CharsError> {
        let m = ctx.big_order() as i64;
        let k = k.rem_euclid(m);
        if k % (ctx.q() as i64 + 1) == 0 {
            return Err(CharsError::InvalidLabel { k, q: ctx.q() });
        }
        Ok(CuspidalLabel { k: k as u32 })
    }

    /// The Galois conjugate `theta^q`, which labels the same representation.
    pub fn frobenius(&self, ctx: &FqCtx) -> CuspidalLabel {
        let m = ctx.big_order() as u64;
        CuspidalLabel { k: ((self.k as u64 * ctx.q() as u64) % m) as u32 }
    }

    pub fn canonical(&self, ctx: &FqCtx) -> CuspidalLabel {
        (*self).min(self.frobenius(ctx))
    }

    pub fn same_rep(&self, other: &CuspidalLabel, ctx: &FqCtx) -> bool {
        self.canonical(ctx) == other.canonical(ctx)
    }

    /// `omega(g1^l) = zeta_{q-1}^{e l}` with `e` returned here.
    pub fn central_exponent(&self, ctx: &FqCtx) -> u32 {
        self.k % (ctx.q() - 1)
    }

    /// `omega(-1)` as `+1` or `-1`.
    pub fn omega_minus_one(&self, ctx: &FqCtx) -> i32 {
        if ctx.is_even() || self.k.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Label of `(lambda o det) rho` where `lambda(g1) = zeta_{q-1}^l`.
    pub fn twist(&self, ctx: &FqCtx, l: i64) -> CuspidalLabel {
        CuspidalLabel::new(ctx, self.k as i64 + (ctx.q() as i64 + 1) * l).expect("twists stay cuspidal")
    }
}

/// One label per cuspidal representation, `q(q-1)/2` in total.
pub fn all_cuspidal_labels(ctx: &FqCtx) -> Vec<CuspidalLabel> {
    let set: BTreeSet<CuspidalLabel> = (0..ctx.big_order() as i64)
        .filter_map(|k| CuspidalLabel::new(ctx, k).ok())
        .map(|t| t.canonical(ctx))
        .collect();
    set.into_iter().collect()
}

/// `theta^(q-1) = alpha o N` as functions on `F_{q^2}^x`, compared pointwise.
pub fn split_restriction(ctx: &FqCtx, theta: &CuspidalLabel) -> bool {
    if ctx.is_even() {
        return false;
    }
    let m = ctx.big_order() as u64;
    let q = ctx.q() as u64;
    (0..m).all(|j| {
        let t = ctx.big_gen_pow(j as i64);
        let lhs = (theta.k as u64 * (q - 1) * j) % m;
        let n_log = ctx.norm(t).log().expect("norm of a unit") as u64;
        let rhs = if n_log % 2 == 1 { m / 2 } else { 0 };
        lhs == rhs
    })
}

/// `chi_theta(g)` from the class type.
pub fn cuspidal_char(ctx: &FqCtx, classes: &Gl2Classifier, theta: &CuspidalLabel, g: &Gl2) -> CharValue {
    let m = ctx.big_order();
    let q = ctx.q() as i64;
    let k = theta.k as i64;
    match classes.classify(ctx, g) {
        Gl2Class::Scalar(l) => root_of_unity(m, k * l as i64 * (q + 1)).scale(q - 1),
        Gl2Class::NonSemisimple(l) => -root_of_unity(m, k * l as i64 * (q + 1)),
        Gl2Class::Split => CharValue::zero(),
        Gl2Class::Elliptic(j) => -(root_of_unity(m, k * j as i64) + root_of_unity(m, k * j as i64 * q)),
    }
}

/// `chi_theta` tabulated on every 2x2 matrix index (zero on singular ones).
#[derive(Debug, Clone)]
pub struct CuspidalTable {
    pub label: CuspidalLabel,
    values: Vec<Complex64>,
    q: u32,
}

impl CuspidalTable {
    pub fn new(ctx: &FqCtx, classes: &Gl2Classifier, label: CuspidalLabel) -> CuspidalTable {
        let q = ctx.q();
        let mut values = vec![Complex64::new(0.0, 0.0); (q as usize).pow(4)];
        for g in ctx.enumerate_gl2() {
            values[g.index(q)] = cuspidal_char(ctx, classes, &label, &g).value;
        }
        CuspidalTable { label, values, q }
    }

    pub fn value(&self, g: &Gl2) -> Complex64 {
        self.values[g.index(self.q)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Constituent {
    Full,
    /// Trace `(1 + eps q)/2` at `(n, n)`, `n = [[1,0],[1,1]]`, `eps = (-1)^((q-1)/2)`.
    Plus,
    /// Trace `(1 - eps q)/2` at `(n, n)`.
    Minus,
}

/// An irreducible constituent of `[rho_1 x rho_2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SigmaLabel {
    pub theta1: CuspidalLabel,
    pub theta2: CuspidalLabel,
    pub constituent: Constituent,
}

impl SigmaLabel {
    pub fn new(
        ctx: &FqCtx,
        theta1: CuspidalLabel,
        theta2: CuspidalLabel,
        constituent: Constituent,
    ) -> Result<SigmaLabel, CharsError> {
        if !(theta1.central_exponent(ctx) + theta2.central_exponent(ctx)).is_multiple_of(ctx.q() - 1) {
            return Err(CharsError::CentralMismatch);
        }
        if constituent != Constituent::Full
            && !(split_restriction(ctx, &theta1) && split_restriction(ctx, &theta2))
        {
            return Err(CharsError::BadConstituent);
        }
        Ok(SigmaLabel { theta1, theta2, constituent })
    }

    pub fn full(&self) -> SigmaLabel {
        SigmaLabel { constituent: Constituent::Full, ..*self }
    }

    pub fn is_reducible_pair(&self, ctx: &FqCtx) -> bool {
        split_restriction(ctx, &self.theta1) && split_restriction(ctx, &self.theta2)
    }

    /// Whether the center of `GL_{2,2}(q)` acts trivially. `omega_1 omega_2 = 1`
    /// already holds, so only `(I, -I)` remains.
    pub fn central_trivial(&self, ctx: &FqCtx) -> bool {
        self.theta2.omega_minus_one(ctx) == 1
    }

    /// Canonical form up to Galois conjugation of each factor.
    pub fn canonical(&self, ctx: &FqCtx) -> SigmaLabel {
        SigmaLabel { theta1: self.theta1.canonical(ctx), theta2: self.theta2.canonical(ctx), ..*self }
    }

    /// Equality of the restricted representations `[rho_1 x rho_2]`, which is
    /// invariant under `(rho_1, rho_2) -> (chi rho_1, chi^-1 rho_2)`.
    pub fn same_full(&self, other: &SigmaLabel, ctx: &FqCtx) -> bool {
        let q1 = ctx.q() as i64 - 1;
        (0..q1).any(|l| {
            self.theta1.twist(ctx, l).same_rep(&other.theta1, ctx)
                && self.theta2.twist(ctx, -l).same_rep(&other.theta2, ctx)
        })
    }
}

/// Supplies characters of proper constituents, which have no closed form here.
pub trait ConstituentOracle {
    fn constituent_char(&self, sigma: &SigmaLabel, x: &Gl22) -> Result<Complex64, CharsError>;
}

/// Character evaluator for one `sigma`, with closed-form tables for `Full`.
pub struct SigmaChar<'a> {
    pub sigma: SigmaLabel,
    t1: CuspidalTable,
    t2: CuspidalTable,
    oracle: Option<&'a dyn ConstituentOracle>,
}

impl<'a> SigmaChar<'a> {
    pub fn new(
        ctx: &FqCtx,
        classes: &Gl2Classifier,
        sigma: SigmaLabel,
        oracle: Option<&'a dyn ConstituentOracle>,
    ) -> Result<SigmaChar<'a>, CharsError> {
        if sigma.constituent != Constituent::Full && oracle.is_none() {
            return Err(CharsError::OracleRequired);
        }
        Ok(SigmaChar {
            sigma,
            t1: CuspidalTable::new(ctx, classes, sigma.theta1),
            t2: CuspidalTable::new(ctx, classes, sigma.theta2),
            oracle,
        })
    }

    pub fn value(&self, x: &Gl22) -> Result<Complex64, CharsError> {
        match (self.sigma.constituent, self.oracle) {
            (Constituent::Full, _) => Ok(self.t1.value(&x.first) * self.t2.value(&x.second)),
            (_, Some(o)) => o.constituent_char(&self.sigma, x),
            (_, None) => Err(CharsError::OracleRequired),
        }
    }

    /// `dim sigma^R` by averaging the character over `R`.
    pub fn fixed_dim(&self, r: &SubgroupR) -> Result<u32, CharsError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for x in r.elements() {
            acc += self.value(x)?;
        }
        let d = certify_complex(acc / r.len() as f64, DEFAULT_TOL)?;
        Ok(u32::try_from(d).map_err(|_| NumericsError::NotAnInteger { re: d as f64, im: 0.0, tol: DEFAULT_TOL })?)
    }
}

/// `chi_sigma(x)`.
pub fn sigma_char(
    ctx: &FqCtx,
    classes: &Gl2Classifier,
    sigma: &SigmaLabel,
    x: &Gl22,
    oracle: Option<&dyn ConstituentOracle>,
) -> Result<CharValue, CharsError> {
    match sigma.constituent {
        Constituent::Full => Ok(cuspidal_char(ctx, classes, &sigma.theta1, &x.first)
            * cuspidal_char(ctx, classes, &sigma.theta2, &x.second)),
        _ => {
            let o = oracle.ok_or(CharsError::OracleRequired)?;
            Ok(CharValue::from_complex(o.constituent_char(sigma, x)?))
        }
    }
}

pub fn fixed_dim(
    ctx: &FqCtx,
    classes: &Gl2Classifier,
    sigma: &SigmaLabel,
    r: &SubgroupR,
    oracle: Option<&dyn ConstituentOracle>,
) -> Result<u32, CharsError> {
    SigmaChar::new(ctx, classes, *sigma, oracle)?.fixed_dim(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedDimCase {
    /// Full `sigma`, torus.
    FullTorus,
    /// Proper constituent, torus.
    ConstituentTorus,
    /// Full `sigma`, diagonal unipotent.
    FullUnip,
    /// Full `sigma`, Artin-Schreier unipotent.
    FullArtinUnip,
}

impl FixedDimCase {
    pub fn subgroup(self) -> SubgroupKind {
        match self {
            FixedDimCase::FullTorus | FixedDimCase::ConstituentTorus => SubgroupKind::Torus,
            FixedDimCase::FullUnip => SubgroupKind::Unip,
            FixedDimCase::FullArtinUnip => SubgroupKind::ArtinUnip,
        }
    }
}

/// Closed-form `dim sigma^R`.
pub fn closed_fixed_dim(case: FixedDimCase, q: u32, omega_minus_one: i32) -> Result<u32, CharsError> {
    let bad = || CharsError::BadCase { case, q, omega_minus_one };
    let even = q.is_multiple_of(2);
    if omega_minus_one.abs() != 1 || (even && omega_minus_one != 1) {
        return Err(bad());
    }
    match case {
        FixedDimCase::FullTorus if even => Ok(1),
        FixedDimCase::FullTorus => Ok((1 + omega_minus_one) as u32),
        FixedDimCase::ConstituentTorus => {
            let forced = if q % 4 == 3 { 1 } else { -1 };
            if even || omega_minus_one != forced {
                return Err(bad());
            }
            Ok(((1 + omega_minus_one) / 2) as u32)
        }
        FixedDimCase::FullUnip => Ok(q - 1),
        FixedDimCase::FullArtinUnip if even => Ok(1),
        FixedDimCase::FullArtinUnip => Err(bad()),
    }
}

/// Label of `sigma^{u_1}` for `Full`; constituents are resolved through the oracle.
pub fn u1_twist(
    ctx: &FqCtx,
    classes: &Gl2Classifier,
    sigma: &SigmaLabel,
    oracle: Option<&dyn ConstituentOracle>,
) -> Result<SigmaLabel, CharsError> {
    let swapped = SigmaLabel { theta1: sigma.theta2, theta2: sigma.theta1, constituent: sigma.constituent };
    if sigma.constituent == Constituent::Full {
        return Ok(swapped);
    }
    let n = Gl2::lower(Fq::ONE, Fq::ONE);
    let nn = Gl22::new(n, n);
    let twisted_value = sigma_char(ctx, classes, sigma, &ctx.u_action(&nn), oracle)?.value;
    for c in [Constituent::Plus, Constituent::Minus] {
        let cand = SigmaLabel { constituent: c, ..swapped };
        if (sigma_char(ctx, classes, &cand, &nn, oracle)?.value - twisted_value).norm() < 1e-6 {
            return Ok(cand);
        }
    }
    Err(CharsError::HypothesisViolated("twist matches neither constituent".into()))
}

/// `chi_sigma = chi_sigma o u_action` checked on all of `GL_{2,2}(q)`.
pub fn is_self_twisted(
    ctx: &FqCtx,
    classes: &Gl2Classifier,
    sigma: &SigmaLabel,
    oracle: Option<&dyn ConstituentOracle>,
) -> Result<bool, CharsError> {
    let ch = SigmaChar::new(ctx, classes, *sigma, oracle)?;
    for x in ctx.enumerate_gl22()? {
        if (ch.value(&x)? - ch.value(&ctx.u_action(&x))?).norm() > 1e-6 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Self-twist of the full restriction from labels alone: `rho_2` is a twist of `rho_1`.
pub fn is_self_twisted_label(ctx: &FqCtx, sigma: &SigmaLabel) -> bool {
    lambda_exponent(ctx, sigma).is_some()
}

/// `l` with `rho_1 = lambda rho_2`, `lambda(g1) = zeta_{q-1}^l`, if any.
pub fn lambda_exponent(ctx: &FqCtx, sigma: &SigmaLabel) -> Option<u32> {
    (0..ctx.q() - 1).find(|&l| sigma.theta2.twist(ctx, l as i64).same_rep(&sigma.theta1, ctx))
}

/// Value of `lambda omega_rho` for `sigma = [lambda rho x rho]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LambdaOmega {
    Trivial,
    Quadratic,
    Other,
}

pub fn lambda_omega(ctx: &FqCtx, sigma: &SigmaLabel) -> Option<LambdaOmega> {
    let l = lambda_exponent(ctx, sigma)?;
    let q1 = ctx.q() - 1;
    let e = (l + sigma.theta2.central_exponent(ctx)) % q1;
    Some(if e == 0 {
        LambdaOmega::Trivial
    } else if q1.is_multiple_of(2) && e == q1 / 2 {
        LambdaOmega::Quadratic
    } else {
        LambdaOmega::Other
    })
}

/// Operators acting on `sigma = [lambda rho x rho]` realised on `V (x) V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistOperator {
    Swap,
    Ww,
    SwapWw,
}

/// Closed-form trace of a twisting operator on `sigma^R`.
pub fn twisted_trace_closed(
    ctx: &FqCtx,
    sigma: &SigmaLabel,
    op: TwistOperator,
    kind: SubgroupKind,
) -> Result<i64, CharsError> {
    let violated = |s: &str| CharsError::HypothesisViolated(s.to_string());
    if sigma.constituent != Constituent::Full {
        return Err(violated("needs a full restriction"));
    }
    let lo = lambda_omega(ctx, sigma).ok_or_else(|| violated("sigma is not of the form [lambda rho x rho]"))?;
    if sigma.theta2.omega_minus_one(ctx) != 1 {
        return Err(violated("omega_rho(-1) must be 1"));
    }
    let q = ctx.q() as i64;
    if ctx.is_even() {
        return match (op, kind) {
            (TwistOperator::Swap, SubgroupKind::Unip) => Ok(q - 1),
            (TwistOperator::Swap, SubgroupKind::Torus | SubgroupKind::ArtinUnip) => Ok(1),
            (_, SubgroupKind::Torus) => Ok(1),
            _ => Err(violated("only the swap is covered off the torus")),
        };
    }
    if kind != SubgroupKind::Torus {
        return Err(violated("odd q is covered on the torus only"));
    }
    let sign = if (q - 3) / 2 % 2 == 0 { 1 } else { -1 };
    match (lo, op) {
        (LambdaOmega::Trivial, _) => Ok(2),
        (LambdaOmega::Quadratic, TwistOperator::Ww) => Ok(2 * sign),
        (LambdaOmega::Quadratic, _) => Ok(0),
        (LambdaOmega::Other, _) => Err(violated("(lambda omega_rho)^2 must be 1")),
    }
}

/// Trace of `tau(s)` on `tau^R` for `tau` induced from a non-self-twisted `sigma`.
pub fn induced_trace_zero(ctx: &FqCtx, sigma: &SigmaLabel, s: &ExtElem, r: &SubgroupR) -> Result<i64, CharsError> {
    if sigma.constituent == Constituent::Full && is_self_twisted_label(ctx, sigma) {
        return Err(CharsError::HypothesisViolated("sigma is self-twisted".into()));
    }
    if !s.eps || !r.normalized_by(ctx, s) {
        return Err(CharsError::HypothesisViolated("s must lie in the u-coset and normalise R".into()));
    }
    Ok(0)
}

/// All `sigma` with `omega_1 omega_2 = 1`, one per isomorphism class of the
/// full restriction, expanded into constituents where it splits.
pub fn all_sigma_labels(ctx: &FqCtx) -> Vec<SigmaLabel> {
    let labels = all_cuspidal_labels(ctx);
    let mut reps: Vec<SigmaLabel> = Vec::new();
    for &t1 in &labels {
        for &t2 in &labels {
            let Ok(s) = SigmaLabel::new(ctx, t1, t2, Constituent::Full) else { continue };
            if reps.iter().any(|r| r.same_full(&s, ctx)) {
                continue;
            }
            reps.push(s);
        }
    }
    let mut out = Vec::new();
    for s in reps {
        if s.is_reducible_pair(ctx) {
            out.push(SigmaLabel { constituent: Constituent::Plus, ..s });
            out.push(SigmaLabel { constituent: Constituent::Minus, ..s });
        } else {
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finitegrp::subgroup_r;

    fn setup(p: u32, f: u32) -> (FqCtx, Gl2Classifier) {
        let c = FqCtx::new(p, f).unwrap();
        let cl = Gl2Classifier::new(&c);
        (c, cl)
    }

    #[test]
    fn class_counts_q3() {
        let (c, cl) = setup(3, 1);
        let mut counts = [0usize; 4];
        for g in c.enumerate_gl2() {
            counts[match cl.classify(&c, &g) {
                Gl2Class::Scalar(_) => 0,
                Gl2Class::NonSemisimple(_) => 1,
                Gl2Class::Split => 2,
                Gl2Class::Elliptic(_) => 3,
            }] += 1;
        }
        // q-1 scalars, (q-1)(q^2-1) non-semisimple, q(q+1)(q-1)(q-2)/2 split, q(q-1)^2 q/2 elliptic
        assert_eq!(counts, [2, 16, 12, 18]);
    }

    #[test]
    fn label_counts() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let (c, _) = setup(p, f);
            let q = c.q() as usize;
            assert_eq!(all_cuspidal_labels(&c).len(), q * (q - 1) / 2);
        }
        let (c, _) = setup(3, 1);
        assert!(CuspidalLabel::new(&c, 4).is_err());
        assert!(CuspidalLabel::new(&c, 0).is_err());
    }

    #[test]
    fn dimension_and_split_trace() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let (c, cl) = setup(p, f);
            for t in all_cuspidal_labels(&c) {
                let d = cuspidal_char(&c, &cl, &t, &Gl2::IDENTITY);
                assert_eq!(crate::numerics::certify_integer(&d, DEFAULT_TOL), Ok(c.q() as i64 - 1));
                for &a in &c.units() {
                    for &b in &c.units() {
                        if a != b {
                            let v = cuspidal_char(&c, &cl, &t, &Gl2::diag(a, b)).value;
                            assert!(v.norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn orthonormality() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let (c, cl) = setup(p, f);
            let g = c.enumerate_gl2();
            let all: Vec<CuspidalLabel> = (0..c.big_order() as i64).filter_map(|k| CuspidalLabel::new(&c, k).ok()).collect();
            let tables: Vec<CuspidalTable> = all.iter().map(|&t| CuspidalTable::new(&c, &cl, t)).collect();
            for a in &tables {
                for b in &tables {
                    let ip: Complex64 = g.iter().map(|x| a.value(x) * b.value(x).conj()).sum();
                    let ip = certify_complex(ip / g.len() as f64, 1e-9).unwrap();
                    let expected = a.label.same_rep(&b.label, &c) as i64;
                    assert_eq!(ip, expected);
                }
            }
        }
    }

    #[test]
    fn split_restriction_examples() {
        for (p, f) in [(2, 1), (2, 2), (2, 3)] {
            let (c, _) = setup(p, f);
            assert!(all_cuspidal_labels(&c).iter().all(|t| !split_restriction(&c, t)));
        }
        let (c3, _) = setup(3, 1);
        let split: Vec<u32> =
            (0..8).filter_map(|k| CuspidalLabel::new(&c3, k).ok()).filter(|t| split_restriction(&c3, t)).map(|t| t.k).collect();
        assert_eq!(split, vec![2, 6]);
        for (p, f) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
            let (c, _) = setup(p, f);
            let q = c.q() as i64;
            let expected = if ((q - 3) / 2) % 2 == 0 { 1 } else { -1 };
            let mut found = 0;
            for t in all_cuspidal_labels(&c) {
                let by_congruence = t.k as i64 % (q + 1) == (q + 1) / 2;
                assert_eq!(split_restriction(&c, &t), by_congruence);
                if split_restriction(&c, &t) {
                    found += 1;
                    assert_eq!(t.omega_minus_one(&c), expected);
                }
            }
            assert!(found > 0);
        }
    }

    #[test]
    fn closed_fixed_dim_examples() {
        assert_eq!(closed_fixed_dim(FixedDimCase::FullTorus, 5, -1), Ok(0));
        assert_eq!(closed_fixed_dim(FixedDimCase::ConstituentTorus, 3, 1), Ok(1));
        assert_eq!(closed_fixed_dim(FixedDimCase::ConstituentTorus, 5, -1), Ok(0));
        assert_eq!(closed_fixed_dim(FixedDimCase::FullArtinUnip, 8, 1), Ok(1));
        assert!(closed_fixed_dim(FixedDimCase::FullArtinUnip, 5, 1).is_err());
        assert!(closed_fixed_dim(FixedDimCase::ConstituentTorus, 4, 1).is_err());
    }

    #[test]
    fn full_fixed_dims_match_closed_forms() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let (c, cl) = setup(p, f);
            for s in all_sigma_labels(&c).into_iter().filter(|s| s.constituent == Constituent::Full) {
                let om = s.theta2.omega_minus_one(&c);
                let ch = SigmaChar::new(&c, &cl, s, None).unwrap();
                let mut cases = vec![FixedDimCase::FullTorus, FixedDimCase::FullUnip];
                if c.is_even() {
                    cases.push(FixedDimCase::FullArtinUnip);
                }
                for case in cases {
                    let r = subgroup_r(&c, case.subgroup()).unwrap();
                    assert_eq!(ch.fixed_dim(&r).unwrap(), closed_fixed_dim(case, c.q(), om).unwrap());
                }
            }
        }
    }

    #[test]
    fn self_twist_label_matches_characters() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let (c, cl) = setup(p, f);
            for s in all_sigma_labels(&c).into_iter().filter(|s| s.constituent == Constituent::Full) {
                assert_eq!(is_self_twisted(&c, &cl, &s, None).unwrap(), is_self_twisted_label(&c, &s), "{s:?}");
                let t = u1_twist(&c, &cl, &s, None).unwrap();
                assert!(t.same_full(&SigmaLabel { theta1: s.theta2, theta2: s.theta1, ..s }, &c));
            }
        }
        let (c2, cl2) = setup(2, 1);
        let sig = all_sigma_labels(&c2);
        assert_eq!(sig.len(), 1);
        assert!(is_self_twisted(&c2, &cl2, &sig[0], None).unwrap());
    }

    #[test]
    fn oracle_required_for_constituents() {
        let (c, cl) = setup(3, 1);
        let t = CuspidalLabel::new(&c, 2).unwrap();
        let s = SigmaLabel::new(&c, t, t, Constituent::Plus).unwrap();
        assert_eq!(sigma_char(&c, &cl, &s, &Gl22::IDENTITY, None).unwrap_err(), CharsError::OracleRequired);
        let t1 = CuspidalLabel::new(&c, 1).unwrap();
        assert_eq!(SigmaLabel::new(&c, t1, t, Constituent::Full).unwrap_err(), CharsError::CentralMismatch);
        let t3 = CuspidalLabel::new(&c, 3).unwrap();
        assert_eq!(SigmaLabel::new(&c, t1, t3, Constituent::Plus).unwrap_err(), CharsError::BadConstituent);
    }

    #[test]
    fn twisted_trace_closed_examples() {
        let (c2, _) = setup(2, 1);
        let s2 = all_sigma_labels(&c2)[0];
        assert_eq!(twisted_trace_closed(&c2, &s2, TwistOperator::Swap, SubgroupKind::Unip), Ok(1));
        let (c5, _) = setup(5, 1);
        let quad = all_sigma_labels(&c5)
            .into_iter()
            .find(|s| lambda_omega(&c5, s) == Some(LambdaOmega::Quadratic) && s.central_trivial(&c5));
        if let Some(s) = quad {
            assert_eq!(twisted_trace_closed(&c5, &s, TwistOperator::Swap, SubgroupKind::Torus), Ok(0));
            assert_eq!(twisted_trace_closed(&c5, &s, TwistOperator::Ww, SubgroupKind::Torus), Ok(-2));
        }
    }
}
