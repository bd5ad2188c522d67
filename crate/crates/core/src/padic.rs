//! Capped-relative-precision arithmetic in the unramified extension `o` of
//! `Z_p`, 4x4 similitude matrices, congruence subgroup membership, the
//! reduction `K -> GL_{2,2}(q)` and computation of the finite groups `R_g`.

#![allow(clippy::needless_range_loop)]

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::finitegrp::{subgroup_closure, FiniteGroupError, Fq, FqCtx, Gl2, Gl22, SubgroupR};

/// Digits of slack required beyond a valuation before it is trusted.
pub const GUARD: i64 = 4;
const INF: i64 = i64::MAX / 8;
const MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("unsupported p = {p}, f = {f}, precision {prec}")]
    UnsupportedSize { p: u32, f: u32, prec: u32 },
    #[error("ramified extensions are not supported (ramification index {e})")]
    Ramified { e: u32 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("matrix is not a symplectic similitude")]
    NotSymplectic,
    #[error("element is not in K")]
    NotInK,
    #[error("R_g sampling did not stabilise after {proposals} proposals")]
    StabilizationFailure { proposals: usize },
    #[error(transparent)]
    FiniteGroup(#[from] FiniteGroupError),
}

fn exhausted(what: &str) -> PadicError {
    PadicError::PrecisionExhausted(what.to_string())
}

/// An element of `(Z/p^N)[x]/(m(x))`, coefficients in `0..p^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Zq([u64; MAX_DEGREE]);

/// `p^val * unit`, with the unit known modulo `p^rel`; `rel == 0` encodes a
/// zero known modulo `p^val`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Padic {
    val: i64,
    unit: Zq,
    rel: u32,
}

impl Padic {
    pub const ZERO: Padic = Padic { val: INF, unit: Zq([0; MAX_DEGREE]), rel: 0 };

    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    /// Valuation of a nonzero element.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Absolute precision: the element is known modulo `p^abs`.
    pub fn abs_prec(&self) -> i64 {
        if self.is_zero() {
            self.val
        } else {
            self.val + self.rel as i64
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.val >= INF
    }
}

/// Context for `o / p^N` with `o` unramified of degree `f` over `Z_p`.
#[derive(Debug, Clone)]
pub struct PadicCtx {
    p: u64,
    f: usize,
    prec: u32,
    pn: u64,
    /// `m(x) = x^f + sum_{i<f} modulus[i] x^i`.
    modulus: [u64; MAX_DEGREE],
    fq: FqCtx,
}

impl PadicCtx {
    pub fn new(p: u32, f: u32, prec: u32) -> Result<PadicCtx, PadicError> {
        Self::with_ramification(p, f, 1, prec)
    }

    /// `e` is the ramification index of the requested extension.
    pub fn with_ramification(p: u32, f: u32, e: u32, prec: u32) -> Result<PadicCtx, PadicError> {
        if e != 1 {
            return Err(PadicError::Ramified { e });
        }
        let bad = PadicError::UnsupportedSize { p, f, prec };
        if f as usize > MAX_DEGREE || prec < 2 * GUARD as u32 {
            return Err(bad);
        }
        let fq = FqCtx::new(p, f).map_err(|_| bad.clone())?;
        let pn = (p as u64).checked_pow(prec).filter(|&v| v < 1 << 62).ok_or(bad)?;
        // minimal polynomial of g1 over F_p, lifted with coefficients in 0..p
        let g = fq.gen_pow(1);
        let mut poly = vec![Fq::ONE];
        let mut root = g;
        for _ in 0..f {
            let mut next = vec![Fq::ZERO; poly.len() + 1];
            for (k, &c) in poly.iter().enumerate() {
                next[k + 1] = fq.add(next[k + 1], c);
                next[k] = fq.sub(next[k], fq.mul(c, root));
            }
            poly = next;
            root = fq.pow(root, p as u64);
        }
        let mut modulus = [0u64; MAX_DEGREE];
        for k in 0..f as usize {
            modulus[k] = fq.prime_field_value(poly[k]).expect("minimal polynomial over F_p") as u64;
        }
        Ok(PadicCtx { p: p as u64, f: f as usize, prec, pn, modulus, fq })
    }

    /// `n + 2 i + j + 8`, capped so that `p^N` fits the word size.
    pub fn default_precision(p: u32, n: u32, i_max: u32, j_max: u32) -> u32 {
        let want = n + 2 * i_max + j_max + 8;
        let mut cap = 0;
        while (p as u64).checked_pow(cap + 1).is_some_and(|v| v < 1 << 62) {
            cap += 1;
        }
        want.min(cap)
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn residue_field(&self) -> &FqCtx {
        &self.fq
    }

    // ---- o / p^N ----

    fn zq_add(&self, a: &Zq, b: &Zq) -> Zq {
        let mut c = [0; MAX_DEGREE];
        for k in 0..self.f {
            c[k] = (a.0[k] + b.0[k]) % self.pn;
        }
        Zq(c)
    }

    fn zq_neg(&self, a: &Zq) -> Zq {
        let mut c = [0; MAX_DEGREE];
        for k in 0..self.f {
            c[k] = (self.pn - a.0[k] % self.pn) % self.pn;
        }
        Zq(c)
    }

    fn zq_mul(&self, a: &Zq, b: &Zq) -> Zq {
        let m = self.pn as u128;
        let mut c = [0u128; 2 * MAX_DEGREE];
        for i in 0..self.f {
            for j in 0..self.f {
                c[i + j] = (c[i + j] + a.0[i] as u128 * b.0[j] as u128) % m;
            }
        }
        for k in (self.f..2 * self.f - 1).rev() {
            let t = c[k];
            c[k] = 0;
            for i in 0..self.f {
                let sub = t * self.modulus[i] as u128 % m;
                let idx = k - self.f + i;
                c[idx] = (c[idx] + m - sub) % m;
            }
        }
        let mut out = [0; MAX_DEGREE];
        for k in 0..self.f {
            out[k] = c[k] as u64;
        }
        Zq(out)
    }

    fn zq_scale_p(&self, a: &Zq, k: i64) -> Zq {
        if k >= self.prec as i64 {
            return Zq([0; MAX_DEGREE]);
        }
        let s = self.p.pow(k as u32) as u128;
        let mut c = [0; MAX_DEGREE];
        for i in 0..self.f {
            c[i] = ((a.0[i] as u128 * s) % self.pn as u128) as u64;
        }
        Zq(c)
    }

    fn zq_div_p(&self, a: &Zq, k: i64) -> Zq {
        let s = self.p.pow(k as u32);
        let mut c = [0; MAX_DEGREE];
        for i in 0..self.f {
            c[i] = a.0[i] / s;
        }
        Zq(c)
    }

    fn zq_val(&self, a: &Zq) -> Option<i64> {
        let mut best: Option<i64> = None;
        for i in 0..self.f {
            let mut c = a.0[i];
            if c == 0 {
                continue;
            }
            let mut v = 0;
            while c.is_multiple_of(self.p) {
                c /= self.p;
                v += 1;
            }
            best = Some(best.map_or(v, |b: i64| b.min(v)));
        }
        best
    }

    fn zq_one(&self) -> Zq {
        let mut c = [0; MAX_DEGREE];
        c[0] = 1;
        Zq(c)
    }

    fn zq_int(&self, n: i64) -> Zq {
        let mut c = [0; MAX_DEGREE];
        c[0] = n.rem_euclid(self.pn as i64) as u64;
        Zq(c)
    }

    fn zq_pow(&self, a: &Zq, mut e: u64) -> Zq {
        let mut base = *a;
        let mut acc = self.zq_one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.zq_mul(&acc, &base);
            }
            base = self.zq_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit: residue inverse then Newton iteration.
    fn zq_inv_unit(&self, a: &Zq) -> Zq {
        let q = self.fq.q() as u64;
        let mut y = self.zq_pow(a, q - 2);
        let two = self.zq_int(2);
        for _ in 0..8 {
            let ay = self.zq_mul(a, &y);
            if ay == self.zq_one() {
                break;
            }
            y = self.zq_mul(&y, &self.zq_add(&two, &self.zq_neg(&ay)));
        }
        y
    }

    // ---- scalars ----

    fn normalize(&self, val: i64, raw: Zq, rel: i64) -> Padic {
        let rel = rel.min(self.prec as i64);
        if val >= INF || rel <= 0 {
            return Padic { val: (val + rel.max(0)).min(INF), unit: Zq([0; MAX_DEGREE]), rel: 0 };
        }
        match self.zq_val(&raw) {
            Some(k) if k < rel => {
                Padic { val: val + k, unit: self.zq_div_p(&raw, k), rel: (rel - k) as u32 }
            }
            _ => Padic { val: (val + rel).min(INF), unit: Zq([0; MAX_DEGREE]), rel: 0 },
        }
    }

    pub fn int(&self, n: i64) -> Padic {
        if n == 0 {
            return Padic::ZERO;
        }
        self.normalize(0, self.zq_int(n), self.prec as i64)
    }

    pub fn one(&self) -> Padic {
        self.int(1)
    }

    /// `p^k`.
    pub fn uniformizer_pow(&self, k: i64) -> Padic {
        Padic { val: k, unit: self.zq_one(), rel: self.prec }
    }

    pub fn add(&self, a: &Padic, b: &Padic) -> Padic {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => Padic { val: a.val.min(b.val), ..Padic::ZERO },
            (true, false) => self.normalize(b.val, b.unit, (b.rel as i64).min(a.val - b.val)),
            (false, true) => self.normalize(a.val, a.unit, (a.rel as i64).min(b.val - a.val)),
            (false, false) => {
                let v = a.val.min(b.val);
                let ua = self.zq_scale_p(&a.unit, a.val - v);
                let ub = self.zq_scale_p(&b.unit, b.val - v);
                let rel = (a.val - v + a.rel as i64).min(b.val - v + b.rel as i64);
                self.normalize(v, self.zq_add(&ua, &ub), rel)
            }
        }
    }

    pub fn neg(&self, a: &Padic) -> Padic {
        if a.is_zero() {
            return *a;
        }
        Padic { unit: self.zq_neg(&a.unit), ..*a }
    }

    pub fn sub(&self, a: &Padic, b: &Padic) -> Padic {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Padic, b: &Padic) -> Padic {
        match (a.valuation(), b.valuation()) {
            (Some(va), Some(vb)) => Padic { val: va + vb, unit: self.zq_mul(&a.unit, &b.unit), rel: a.rel.min(b.rel) },
            (None, Some(vb)) => Padic { val: (a.val + vb).min(INF), ..Padic::ZERO },
            (Some(va), None) => Padic { val: (b.val + va).min(INF), ..Padic::ZERO },
            (None, None) => Padic { val: (a.val + b.val).min(INF), ..Padic::ZERO },
        }
    }

    pub fn inv(&self, a: &Padic) -> Result<Padic, PadicError> {
        if a.is_zero() {
            return Err(exhausted("inverse of an element not known to be nonzero"));
        }
        Ok(Padic { val: -a.val, unit: self.zq_inv_unit(&a.unit), rel: a.rel })
    }

    pub fn div(&self, a: &Padic, b: &Padic) -> Result<Padic, PadicError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `val(a) >= k`, or an error when the precision cannot decide.
    pub fn val_at_least(&self, a: &Padic, k: i64) -> Result<bool, PadicError> {
        match a.valuation() {
            Some(v) => Ok(v >= k),
            None if a.val >= k => Ok(true),
            None => Err(exhausted("valuation undecided")),
        }
    }

    pub fn is_unit(&self, a: &Padic) -> Result<bool, PadicError> {
        match a.valuation() {
            Some(v) => Ok(v == 0),
            None if a.val >= 1 => Ok(false),
            None => Err(exhausted("unit test undecided")),
        }
    }

    /// Certified equality; see the module notes on the precision floor.
    pub fn eq_certified(&self, a: &Padic, b: &Padic) -> Result<bool, PadicError> {
        let d = self.sub(a, b);
        if !d.is_zero() {
            return Ok(false);
        }
        let half = self.prec as i64 / 2;
        let vmin = match (a.valuation(), b.valuation()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        };
        let need = vmin.map_or(half, |v| half.max(v + GUARD));
        if d.val >= need {
            Ok(true)
        } else {
            Err(exhausted("equality below the precision floor"))
        }
    }

    /// Lift of a residue-field element (`g1^l -> x^l`).
    pub fn lift(&self, a: Fq) -> Padic {
        match a.log() {
            None => Padic::ZERO,
            Some(l) => {
                let mut x = [0; MAX_DEGREE];
                if self.f > 1 {
                    x[1] = 1;
                } else {
                    x[0] = (self.p - self.modulus[0] % self.p) % self.p;
                }
                let xl = self.zq_pow(&Zq(x), l as u64);
                self.normalize(0, xl, self.prec as i64)
            }
        }
    }

    /// Residue of an integral element.
    pub fn residue(&self, a: &Padic) -> Result<Fq, PadicError> {
        if !self.val_at_least(a, 0)? {
            return Err(PadicError::NotInK);
        }
        if self.val_at_least(a, 1)? {
            return Ok(Fq::ZERO);
        }
        let alpha = self.fq.gen_pow(1);
        let mut acc = Fq::ZERO;
        let mut pw = Fq::ONE;
        for i in 0..self.f {
            let c = self.fq.from_int((a.unit.0[i] % self.p) as i64);
            acc = self.fq.add(acc, self.fq.mul(c, pw));
            pw = self.fq.mul(pw, alpha);
        }
        Ok(acc)
    }

    pub fn random_integer<R: Rng>(&self, rng: &mut R) -> Padic {
        let mut c = [0; MAX_DEGREE];
        for x in c.iter_mut().take(self.f) {
            *x = rng.gen_range(0..self.pn);
        }
        self.normalize(0, Zq(c), self.prec as i64)
    }

    pub fn random_unit<R: Rng>(&self, rng: &mut R) -> Padic {
        loop {
            let x = self.random_integer(rng);
            if x.valuation() == Some(0) {
                return x;
            }
        }
    }

    /// `p^v * r` with `v` in `0..=max_val` and `r` a random unit, or zero.
    pub fn random_coord<R: Rng>(&self, rng: &mut R, max_val: i64) -> Padic {
        if rng.gen_bool(0.3) {
            return Padic::ZERO;
        }
        let v = random_valuation(rng, 0, max_val);
        self.mul(&self.uniformizer_pow(v), &self.random_unit(rng))
    }

    pub fn fmt_scalar(&self, a: &Padic) -> String {
        match a.valuation() {
            None if a.is_exact_zero() => "0".into(),
            None => format!("O(p^{})", a.val),
            Some(v) => format!("p^{}*{:?}", v, &a.unit.0[..self.f]),
        }
    }
}

/// Uniform on `lo..=hi` or geometric from `lo`, with equal odds; small
/// valuations are where the rare lifts live.
fn random_valuation<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> i64 {
    if rng.gen_bool(0.5) {
        return rng.gen_range(lo..=hi);
    }
    let mut v = lo;
    while v < hi && rng.gen_bool(0.5) {
        v += 1;
    }
    v
}

/// A 4x4 matrix of scalars.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Mat4(pub [[Padic; 4]; 4]);

impl fmt::Debug for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            let vals: Vec<String> = row
                .iter()
                .map(|x| match x.valuation() {
                    None => "0".into(),
                    Some(v) => format!("p^{v}"),
                })
                .collect();
            writeln!(f, "[{}]", vals.join(", "))?;
        }
        Ok(())
    }
}

impl PadicCtx {
    pub fn mat_zero(&self) -> Mat4 {
        Mat4([[Padic::ZERO; 4]; 4])
    }

    pub fn mat_identity(&self) -> Mat4 {
        self.mat_diag([self.one(), self.one(), self.one(), self.one()])
    }

    pub fn mat_diag(&self, d: [Padic; 4]) -> Mat4 {
        let mut m = self.mat_zero();
        for k in 0..4 {
            m.0[k][k] = d[k];
        }
        m
    }

    /// Matrix from integer entries.
    pub fn mat_int(&self, rows: [[i64; 4]; 4]) -> Mat4 {
        let mut m = self.mat_zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.int(rows[r][c]);
            }
        }
        m
    }

    pub fn mat_mul(&self, a: &Mat4, b: &Mat4) -> Mat4 {
        let mut m = self.mat_zero();
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = Padic::ZERO;
                for k in 0..4 {
                    if a.0[r][k].is_exact_zero() || b.0[k][c].is_exact_zero() {
                        continue;
                    }
                    acc = self.add(&acc, &self.mul(&a.0[r][k], &b.0[k][c]));
                }
                m.0[r][c] = acc;
            }
        }
        m
    }

    pub fn mat_prod(&self, ms: &[&Mat4]) -> Mat4 {
        ms.iter().fold(self.mat_identity(), |acc, m| self.mat_mul(&acc, m))
    }

    pub fn mat_scale(&self, s: &Padic, a: &Mat4) -> Mat4 {
        let mut m = *a;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x = self.mul(s, x);
            }
        }
        m
    }

    pub fn mat_transpose(&self, a: &Mat4) -> Mat4 {
        let mut m = self.mat_zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = a.0[c][r];
            }
        }
        m
    }

    pub fn mat_sub(&self, a: &Mat4, b: &Mat4) -> Mat4 {
        let mut m = self.mat_zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.sub(&a.0[r][c], &b.0[r][c]);
            }
        }
        m
    }

    /// Entrywise certified equality.
    pub fn mat_eq(&self, a: &Mat4, b: &Mat4) -> Result<bool, PadicError> {
        for r in 0..4 {
            for c in 0..4 {
                if !self.eq_certified(&a.0[r][c], &b.0[r][c])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `J = antidiag(1, 1, -1, -1)`.
    pub fn j(&self) -> Mat4 {
        self.mat_int([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])
    }

    /// `mu` with `tm J m = mu J`.
    pub fn similitude(&self, m: &Mat4) -> Result<Padic, PadicError> {
        let j = self.j();
        let form = self.mat_prod(&[&self.mat_transpose(m), &j, m]);
        let mu = form.0[0][3];
        if self.mat_eq(&form, &self.mat_scale(&mu, &j))? {
            Ok(mu)
        } else {
            Err(PadicError::NotSymplectic)
        }
    }
}

/// An element of `GSp(4, F)` with its similitude factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GSp4Elem {
    pub mat: Mat4,
    pub mu: Padic,
}

impl PadicCtx {
    pub fn gsp(&self, mat: Mat4) -> Result<GSp4Elem, PadicError> {
        Ok(GSp4Elem { mu: self.similitude(&mat)?, mat })
    }

    pub fn g_mul(&self, a: &GSp4Elem, b: &GSp4Elem) -> GSp4Elem {
        GSp4Elem { mat: self.mat_mul(&a.mat, &b.mat), mu: self.mul(&a.mu, &b.mu) }
    }

    pub fn g_prod(&self, gs: &[&GSp4Elem]) -> GSp4Elem {
        gs.iter().fold(self.g_identity(), |acc, g| self.g_mul(&acc, g))
    }

    pub fn g_identity(&self) -> GSp4Elem {
        GSp4Elem { mat: self.mat_identity(), mu: self.one() }
    }

    /// `g^-1 = mu^-1 J^-1 tg J`.
    pub fn g_inv(&self, g: &GSp4Elem) -> Result<GSp4Elem, PadicError> {
        let j = self.j();
        let jinv = self.mat_transpose(&j);
        let mu_inv = self.inv(&g.mu)?;
        let m = self.mat_prod(&[&jinv, &self.mat_transpose(&g.mat), &j]);
        Ok(GSp4Elem { mat: self.mat_scale(&mu_inv, &m), mu: mu_inv })
    }

    /// `a b a^-1`.
    pub fn g_conj(&self, a: &GSp4Elem, b: &GSp4Elem) -> Result<GSp4Elem, PadicError> {
        Ok(self.g_prod(&[a, b, &self.g_inv(a)?]))
    }

    pub fn g_scale(&self, s: &Padic, g: &GSp4Elem) -> GSp4Elem {
        GSp4Elem { mat: self.mat_scale(s, &g.mat), mu: self.mul(&self.mul(s, s), &g.mu) }
    }

    fn pattern(&self, g: &GSp4Elem, lower: [[i64; 4]; 4]) -> Result<bool, PadicError> {
        for r in 0..4 {
            for c in 0..4 {
                if !self.val_at_least(&g.mat.0[r][c], lower[r][c])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn in_g0(&self, g: &GSp4Elem) -> Result<bool, PadicError> {
        self.is_unit(&g.mu)
    }

    pub fn in_k(&self, g: &GSp4Elem) -> Result<bool, PadicError> {
        const K: [[i64; 4]; 4] = [[0, 0, 0, -1], [1, 0, 0, 0], [1, 0, 0, 0], [1, 1, 1, 0]];
        if !self.in_g0(g)? || !self.pattern(g, K)? {
            return Ok(false);
        }
        let r = self.reduce_unchecked(g)?;
        Ok(!self.fq.gl2_det(&r.first).is_zero() && !self.fq.gl2_det(&r.second).is_zero())
    }

    pub fn in_kplus(&self, g: &GSp4Elem) -> Result<bool, PadicError> {
        const KP: [[i64; 4]; 4] = [[1, 0, 0, 0], [1, 1, 1, 0], [1, 1, 1, 0], [2, 1, 1, 1]];
        if !self.in_g0(g)? {
            return Ok(false);
        }
        let mut shifted = *g;
        for k in 0..4 {
            shifted.mat.0[k][k] = self.sub(&g.mat.0[k][k], &self.one());
        }
        self.pattern(&shifted, KP)
    }

    pub fn in_iwahori(&self, g: &GSp4Elem) -> Result<bool, PadicError> {
        const I: [[i64; 4]; 4] = [[0, 0, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 0]];
        if !self.pattern(g, I)? {
            return Ok(false);
        }
        for k in 0..4 {
            if !self.is_unit(&g.mat.0[k][k])? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn in_siegel(&self, g: &GSp4Elem, n: u32) -> Result<bool, PadicError> {
        let n = n as i64;
        let si = [[0, 0, 0, 0], [0, 0, 0, 0], [n, n, 0, 0], [n, n, 0, 0]];
        Ok(self.in_g0(g)? && self.pattern(g, si)?)
    }

    fn reduce_unchecked(&self, g: &GSp4Elem) -> Result<Gl22, PadicError> {
        let m = &g.mat.0;
        let w = self.uniformizer_pow(1);
        let winv = self.uniformizer_pow(-1);
        let r = |x: &Padic| self.residue(x);
        let first = Gl2::new(r(&m[0][0])?, r(&self.mul(&w, &m[0][3]))?, r(&self.mul(&winv, &m[3][0]))?, r(&m[3][3])?);
        let second = Gl2::new(r(&m[1][1])?, r(&m[1][2])?, r(&m[2][1])?, r(&m[2][2])?);
        Ok(Gl22::new(first, second))
    }

    /// The reduction `K -> K/K+ = GL_{2,2}(q)`.
    pub fn reduce_k(&self, g: &GSp4Elem) -> Result<Gl22, PadicError> {
        if !self.in_k(g)? {
            return Err(PadicError::NotInK);
        }
        self.reduce_unchecked(g)
    }
}

/// Builders for the named elements.
impl PadicCtx {
    pub fn w_pow(&self, k: i64) -> Padic {
        self.uniformizer_pow(k)
    }

    /// `diag(p^(2i+j), p^(i+j), p^i, 1)`.
    pub fn t_ij(&self, i: i64, j: i64) -> GSp4Elem {
        let m = self.mat_diag([self.w_pow(2 * i + j), self.w_pow(i + j), self.w_pow(i), self.one()]);
        GSp4Elem { mat: m, mu: self.w_pow(2 * i + j) }
    }

    /// Lower unipotent with block `[[x, y], [z, x]]`.
    pub fn s_xyz(&self, x: &Padic, y: &Padic, z: &Padic) -> GSp4Elem {
        self.lower_block(&[*x, *y, *z])
    }

    /// `[[I, 0], [C, I]]` with `C = [[c1, c2], [c3, c1]]`.
    pub fn lower_block(&self, c: &[Padic; 3]) -> GSp4Elem {
        let mut m = self.mat_identity();
        m.0[2][0] = c[0];
        m.0[2][1] = c[1];
        m.0[3][0] = c[2];
        m.0[3][1] = c[0];
        GSp4Elem { mat: m, mu: self.one() }
    }

    /// `[[I, B], [0, I]]` with `B = [[b1, b2], [b3, b1]]`.
    pub fn upper_block(&self, b: &[Padic; 3]) -> GSp4Elem {
        let mut m = self.mat_identity();
        m.0[0][2] = b[0];
        m.0[0][3] = b[1];
        m.0[1][2] = b[2];
        m.0[1][3] = b[0];
        GSp4Elem { mat: m, mu: self.one() }
    }

    /// `diag(A, lambda A')` with `A' = [[a1, -a2], [-a3, a4]]`.
    pub fn levi(&self, a: &[Padic; 4], lambda: &Padic) -> GSp4Elem {
        let mut m = self.mat_zero();
        m.0[0][0] = a[0];
        m.0[0][1] = a[1];
        m.0[1][0] = a[2];
        m.0[1][1] = a[3];
        m.0[2][2] = self.mul(lambda, &a[0]);
        m.0[2][3] = self.neg(&self.mul(lambda, &a[1]));
        m.0[3][2] = self.neg(&self.mul(lambda, &a[2]));
        m.0[3][3] = self.mul(lambda, &a[3]);
        let det = self.sub(&self.mul(&a[0], &a[3]), &self.mul(&a[1], &a[2]));
        GSp4Elem { mat: m, mu: self.mul(lambda, &det) }
    }

    /// `[[I, 0], [p^n C, I]] diag(A, lambda A') [[I, B], [0, I]]`.
    pub fn siegel_element(&self, n: u32, c: &[Padic; 3], a: &[Padic; 4], lambda: &Padic, b: &[Padic; 3]) -> GSp4Elem {
        let wn = self.w_pow(n as i64);
        let cn = [self.mul(&wn, &c[0]), self.mul(&wn, &c[1]), self.mul(&wn, &c[2])];
        self.g_prod(&[&self.lower_block(&cn), &self.levi(a, lambda), &self.upper_block(b)])
    }

    /// Recovers `(C, A, lambda, B)` from a Siegel element.
    #[allow(clippy::type_complexity)]
    pub fn siegel_coordinates(
        &self,
        n: u32,
        s: &GSp4Elem,
    ) -> Result<([Padic; 3], [Padic; 4], Padic, [Padic; 3]), PadicError> {
        let m = &s.mat.0;
        let a = [m[0][0], m[0][1], m[1][0], m[1][1]];
        let det = self.sub(&self.mul(&a[0], &a[3]), &self.mul(&a[1], &a[2]));
        let di = self.inv(&det)?;
        // A^-1 = det^-1 [[a4, -a2], [-a3, a1]]
        let ainv = [self.mul(&di, &a[3]), self.neg(&self.mul(&di, &a[1])), self.neg(&self.mul(&di, &a[2])), self.mul(&di, &a[0])];
        let mul2 = |x: &[Padic; 4], y: &[Padic; 4]| {
            [
                self.add(&self.mul(&x[0], &y[0]), &self.mul(&x[1], &y[2])),
                self.add(&self.mul(&x[0], &y[1]), &self.mul(&x[1], &y[3])),
                self.add(&self.mul(&x[2], &y[0]), &self.mul(&x[3], &y[2])),
                self.add(&self.mul(&x[2], &y[1]), &self.mul(&x[3], &y[3])),
            ]
        };
        let bfull = mul2(&ainv, &[m[0][2], m[0][3], m[1][2], m[1][3]]);
        let cfull = mul2(&[m[2][0], m[2][1], m[3][0], m[3][1]], &ainv);
        let winv = self.w_pow(-(n as i64));
        let c = [self.mul(&winv, &cfull[0]), self.mul(&winv, &cfull[1]), self.mul(&winv, &cfull[2])];
        let lambda = self.mul(&s.mu, &di);
        Ok((c, a, lambda, [bfull[0], bfull[1], bfull[2]]))
    }

    pub fn x_k(&self, k: i64) -> GSp4Elem {
        self.s_xyz(&self.w_pow(k), &Padic::ZERO, &Padic::ZERO)
    }

    /// `t_{i,j} S(0, p^r u, p^(2i+1+r))`.
    pub fn y_ijr(&self, i: i64, j: i64, r: i64, u: &Padic) -> GSp4Elem {
        let y = self.mul(&self.w_pow(r), u);
        self.g_mul(&self.t_ij(i, j), &self.s_xyz(&Padic::ZERO, &y, &self.w_pow(2 * i + 1 + r)))
    }

    /// `t_{i,j} S(p^(i+j-1), p^(j-1) u, p^(2i+j))`.
    pub fn z_ij(&self, i: i64, j: i64, u: &Padic) -> GSp4Elem {
        let y = self.mul(&self.w_pow(j - 1), u);
        self.g_mul(&self.t_ij(i, j), &self.s_xyz(&self.w_pow(i + j - 1), &y, &self.w_pow(2 * i + j)))
    }

    pub fn s1(&self) -> GSp4Elem {
        GSp4Elem { mat: self.mat_int([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), mu: self.one() }
    }

    pub fn s2(&self) -> GSp4Elem {
        GSp4Elem { mat: self.mat_int([[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, 1]]), mu: self.one() }
    }

    /// The Atkin-Lehner element.
    pub fn u_n(&self, n: i64) -> GSp4Elem {
        let mut m = self.mat_zero();
        let wn = self.w_pow(n);
        m.0[0][2] = self.one();
        m.0[1][3] = self.int(-1);
        m.0[2][0] = wn;
        m.0[3][1] = self.neg(&wn);
        GSp4Elem { mat: m, mu: wn }
    }

    /// A random element of `K` as a product of root elements and a torus element.
    pub fn random_k<R: Rng>(&self, rng: &mut R) -> GSp4Elem {
        let mut g = self.g_identity();
        let w = self.w_pow(1);
        let winv = self.w_pow(-1);
        for _ in 0..3 {
            let r = |rng: &mut R| self.random_integer(rng);
            let z = Padic::ZERO;
            let factors = [
                self.upper_block(&[z, self.mul(&winv, &r(rng)), z]),
                self.lower_block(&[z, z, self.mul(&w, &r(rng))]),
                self.upper_block(&[z, z, r(rng)]),
                self.lower_block(&[z, r(rng), z]),
                self.levi(&[self.one(), r(rng), z, self.one()], &self.one()),
                self.levi(&[self.one(), z, self.mul(&w, &r(rng)), self.one()], &self.one()),
                self.upper_block(&[r(rng), z, z]),
                self.lower_block(&[self.mul(&w, &r(rng)), z, z]),
            ];
            for f in &factors {
                g = self.g_mul(&g, f);
            }
        }
        let (a, b, c) = (self.random_unit(rng), self.random_unit(rng), self.random_unit(rng));
        let d = self.div(&self.mul(&b, &c), &a).expect("unit");
        let torus = GSp4Elem { mat: self.mat_diag([a, b, c, d]), mu: self.mul(&a, &d) };
        self.g_mul(&g, &torus)
    }
}

/// Parameterised families of Levi elements whose conjugates land in `K`.
#[derive(Debug, Clone)]
pub enum LeviFamily {
    /// `A = diag(a1, a4)`, `lambda` any unit.
    Diagonal,
    /// `A = diag(a1, a4)`, `lambda = 1 + p w`.
    DiagonalNearOne,
    /// `a4 = lambda a1 + v p^j / y`, `lambda = 1 + p^d w`.
    Unipotent { j: i64, y: Padic, d: i64 },
    /// Mixed case: `lambda = 1 + p t w`, `a3 = p^(i+1)(a1 w - u lambda a2' + S1)`,
    /// `a4 = lambda a1 - a2'(1+lambda)/t + R1`.
    Mixed { i: i64, t: Padic, u: Padic },
}

impl PadicCtx {
    fn residue_lift<R: Rng>(&self, rng: &mut R, unit: bool) -> Padic {
        let fq = &self.fq;
        let e = if unit { fq.units() } else { fq.elements() };
        self.lift(e[rng.gen_range(0..e.len())])
    }

    /// One member of a Levi family, with random residue parameters.
    pub fn levi_member<R: Rng>(&self, fam: &LeviFamily, rng: &mut R) -> Result<GSp4Elem, PadicError> {
        let one = self.one();
        let z = Padic::ZERO;
        let w = self.w_pow(1);
        match fam {
            LeviFamily::Diagonal => {
                let (a1, a4, l) = (self.residue_lift(rng, true), self.residue_lift(rng, true), self.residue_lift(rng, true));
                Ok(self.levi(&[a1, z, z, a4], &l))
            }
            LeviFamily::DiagonalNearOne => {
                let (a1, a4) = (self.residue_lift(rng, true), self.residue_lift(rng, true));
                let l = self.add(&one, &self.mul(&w, &self.residue_lift(rng, false)));
                Ok(self.levi(&[a1, z, z, a4], &l))
            }
            LeviFamily::Unipotent { j, y, d } => {
                let a1 = self.residue_lift(rng, true);
                let l = self.add(&one, &self.mul(&self.w_pow(*d), &self.residue_lift(rng, false)));
                let v = self.residue_lift(rng, false);
                let shift = self.div(&self.mul(&v, &self.w_pow(*j)), y)?;
                let a4 = self.add(&self.mul(&l, &a1), &shift);
                Ok(self.levi(&[a1, z, z, a4], &l))
            }
            LeviFamily::Mixed { i, t, u } => {
                let a1 = self.residue_lift(rng, true);
                let wv = self.residue_lift(rng, false);
                let a2p = self.mul(&self.w_pow(*i), &self.residue_lift(rng, false));
                let s1 = self.mul(&w, &self.residue_lift(rng, false));
                let r1 = self.mul(&w, &self.residue_lift(rng, false));
                let l = self.add(&one, &self.mul(&self.mul(&w, t), &wv));
                let a3p = self.add(&self.sub(&self.mul(&a1, &wv), &self.mul(&self.mul(u, &l), &a2p)), &s1);
                let a3 = self.mul(&self.w_pow(i + 1), &a3p);
                let a4 = self.add(&self.sub(&self.mul(&l, &a1), &self.div(&self.mul(&a2p, &self.add(&one, &l)), t)?), &r1);
                let a2 = self.mul(&self.w_pow(-i), &a2p);
                Ok(self.levi(&[a1, a2, a3, a4], &l))
            }
        }
    }
}

/// Settings for sampling `R_g`.
#[derive(Debug, Clone)]
pub struct RgSampling {
    /// Accepted samples without growth before stopping.
    pub window: usize,
    pub max_proposals: usize,
}

impl Default for RgSampling {
    fn default() -> Self {
        RgSampling { window: 200, max_proposals: 400_000 }
    }
}

/// Outcome of sampling `R_g`.
#[derive(Debug, Clone)]
pub struct RgSample {
    pub group: SubgroupR,
    pub proposals: usize,
    pub accepted: usize,
}

impl PadicCtx {
    fn max_entry_val(&self, g: &GSp4Elem) -> i64 {
        let mut m = 0;
        for row in &g.mat.0 {
            for x in row {
                if let Some(v) = x.valuation() {
                    m = m.max(v.abs());
                }
            }
        }
        m
    }

    /// A random element of `Si(n)` from a structured proposal family.
    pub fn propose_siegel<R: Rng>(&self, rng: &mut R, n: u32, max_val: i64) -> GSp4Elem {
        let z = Padic::ZERO;
        let one = self.one();
        let coord = |rng: &mut R| self.random_coord(rng, max_val);
        let near = |rng: &mut R, base: &Padic| {
            let v = random_valuation(rng, 1, max_val.max(1));
            self.add(base, &self.mul(&self.w_pow(v), &self.random_integer(rng)))
        };
        let family = rng.gen_range(0..5);
        let c = if family == 0 || family == 4 { [coord(rng), coord(rng), coord(rng)] } else { [z, z, z] };
        let b = if family == 1 || family >= 3 { [coord(rng), coord(rng), coord(rng)] } else { [z, z, z] };
        let (a, lambda) = if family >= 2 {
            let lambda = match rng.gen_range(0..4) {
                0 => self.random_unit(rng),
                1 => near(rng, &one),
                2 => near(rng, &self.int(-1)),
                _ => one,
            };
            loop {
                let a1 = self.random_unit(rng);
                let a2 = coord(rng);
                let a3 = coord(rng);
                let a4 = match rng.gen_range(0..4) {
                    0 => self.random_unit(rng),
                    1 => near(rng, &self.mul(&lambda, &a1)),
                    2 => near(rng, &self.div(&a1, &lambda).expect("unit")),
                    _ => self.add(&self.mul(&lambda, &a1), &coord(rng)),
                };
                let det = self.sub(&self.mul(&a1, &a4), &self.mul(&a2, &a3));
                if self.is_unit(&det).unwrap_or(false) {
                    break ([a1, a2, a3, a4], lambda);
                }
            }
        } else {
            ([one, z, z, one], one)
        };
        self.siegel_element(n, &c, &a, &lambda, &b)
    }

    /// `R_g` by random sampling of `g s g^-1` with `s` in `Si(n)`.
    pub fn sample_rg<R: Rng>(&self, g: &GSp4Elem, n: u32, cfg: &RgSampling, rng: &mut R) -> Result<RgSample, PadicError> {
        let ginv = self.g_inv(g)?;
        let max_val = n as i64 + 2 + self.max_entry_val(g);
        let mut gens: Vec<Gl22> = Vec::new();
        let mut group: HashSet<Gl22> = [Gl22::IDENTITY].into_iter().collect();
        let (mut quiet, mut accepted, mut undecided) = (0usize, 0usize, 0usize);
        for proposals in 1..=cfg.max_proposals {
            let s = self.propose_siegel(rng, n, max_val);
            let h = self.g_prod(&[g, &s, &ginv]);
            match self.in_k(&h) {
                Ok(true) => {}
                Ok(false) => continue,
                Err(_) => {
                    undecided += 1;
                    if undecided > 1000 + 10 * accepted {
                        return Err(exhausted("too many undecidable proposals"));
                    }
                    continue;
                }
            }
            accepted += 1;
            let r = self.reduce_unchecked(&h)?;
            if group.contains(&r) {
                quiet += 1;
                if quiet >= cfg.window {
                    let group = SubgroupR::from_elements(group.into_iter().collect(), crate::finitegrp::SubgroupKind::Custom);
                    return Ok(RgSample { group, proposals, accepted });
                }
            } else {
                gens.push(r);
                group = subgroup_closure(&self.fq, &gens).elements().iter().copied().collect();
                quiet = 0;
            }
        }
        Err(PadicError::StabilizationFailure { proposals: cfg.max_proposals })
    }

    /// Reductions of `g s g^-1` for `draws` members `s` of a Levi family,
    /// with the generated subgroup. Every member must land in `K`.
    pub fn witness_rg<R: Rng>(
        &self,
        g: &GSp4Elem,
        n: u32,
        fam: &LeviFamily,
        draws: usize,
        rng: &mut R,
    ) -> Result<SubgroupR, PadicError> {
        let ginv = self.g_inv(g)?;
        let mut gens = Vec::new();
        for _ in 0..draws {
            let s = self.levi_member(fam, rng)?;
            if !self.in_siegel(&s, n)? {
                return Err(PadicError::NotInK);
            }
            let h = self.g_prod(&[g, &s, &ginv]);
            gens.push(self.reduce_k(&h)?);
        }
        Ok(subgroup_closure(&self.fq, &gens))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_arithmetic() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3), (2, 4)] {
            let c = PadicCtx::new(p, f, 20).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..200 {
                let a = c.random_unit(&mut rng);
                let b = c.mul(&c.w_pow(rng.gen_range(-2..5)), &c.random_unit(&mut rng));
                let ai = c.inv(&a).unwrap();
                assert!(c.eq_certified(&c.mul(&a, &ai), &c.one()).unwrap());
                let s = c.add(&a, &b);
                assert!(c.eq_certified(&c.sub(&s, &b), &a).unwrap());
                let prod = c.mul(&a, &b);
                assert!(c.eq_certified(&c.div(&prod, &b).unwrap(), &a).unwrap());
            }
            assert!(c.eq_certified(&c.add(&c.int(3), &c.int(-3)), &Padic::ZERO).unwrap());
            assert_eq!(c.int(12).valuation(), Some(if p == 2 { 2 } else { 1 }));
        }
    }

    #[test]
    fn residues_are_ring_maps() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2), (2, 4)] {
            let c = PadicCtx::new(p, f, 12).unwrap();
            let fq = c.residue_field().clone();
            for a in fq.elements() {
                assert_eq!(c.residue(&c.lift(a)).unwrap(), a);
                for b in fq.elements() {
                    let (la, lb) = (c.lift(a), c.lift(b));
                    assert_eq!(c.residue(&c.mul(&la, &lb)).unwrap(), fq.mul(a, b));
                    assert_eq!(c.residue(&c.add(&la, &lb)).unwrap(), fq.add(a, b));
                }
            }
        }
    }

    #[test]
    fn ramified_rejected_and_size_limits() {
        assert_eq!(PadicCtx::with_ramification(2, 1, 2, 20).unwrap_err(), PadicError::Ramified { e: 2 });
        assert!(PadicCtx::new(3, 1, 60).is_err());
        assert_eq!(PadicCtx::default_precision(3, 10, 3, 5), 29);
        assert_eq!(PadicCtx::default_precision(3, 40, 3, 5), 39);
    }

    #[test]
    fn similitudes_of_named_elements() {
        let c = PadicCtx::new(2, 1, 30).unwrap();
        for (i, j) in [(0, 1), (1, 2), (3, 5)] {
            let t = c.t_ij(i, j);
            assert!(c.eq_certified(&c.similitude(&t.mat).unwrap(), &c.w_pow(2 * i + j)).unwrap());
        }
        for n in 1..=6 {
            let u = c.u_n(n);
            assert!(c.eq_certified(&c.similitude(&u.mat).unwrap(), &c.w_pow(n)).unwrap());
            let sq = c.mat_mul(&u.mat, &u.mat);
            assert!(c.mat_eq(&sq, &c.mat_scale(&c.w_pow(n), &c.mat_identity())).unwrap());
        }
        assert!(c.eq_certified(&c.similitude(&c.j()).unwrap(), &c.one()).unwrap());
        assert!(c.eq_certified(&c.similitude(&c.s1().mat).unwrap(), &c.one()).unwrap());
        assert!(c.eq_certified(&c.similitude(&c.s2().mat).unwrap(), &c.one()).unwrap());
        let mut bad = c.mat_identity();
        bad.0[0][1] = c.one();
        assert_eq!(c.similitude(&bad).unwrap_err(), PadicError::NotSymplectic);
    }

    #[test]
    fn group_laws_and_membership() {
        for (p, f) in [(2, 1), (3, 1), (2, 2)] {
            let c = PadicCtx::new(p, f, 24).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let id = c.g_identity();
            assert!(c.in_k(&id).unwrap() && c.in_kplus(&id).unwrap() && c.in_iwahori(&id).unwrap());
            assert!(c.in_siegel(&id, 3).unwrap() && c.in_g0(&id).unwrap());
            assert_eq!(c.reduce_k(&id).unwrap(), Gl22::IDENTITY);
            for _ in 0..50 {
                let a = c.random_k(&mut rng);
                let b = c.random_k(&mut rng);
                assert!(c.in_k(&a).unwrap());
                let ab = c.g_mul(&a, &b);
                assert!(c.eq_certified(&c.similitude(&ab.mat).unwrap(), &ab.mu).unwrap());
                let ainv = c.g_inv(&a).unwrap();
                assert!(c.mat_eq(&c.mat_mul(&a.mat, &ainv.mat), &c.mat_identity()).unwrap());
                let fq = c.residue_field();
                let lhs = c.reduce_k(&ab).unwrap();
                let rhs = fq.gl22_mul(&c.reduce_k(&a).unwrap(), &c.reduce_k(&b).unwrap());
                assert_eq!(lhs, rhs);
                let kill = c.g_prod(&[&a, &b, &c.g_inv(&ab).unwrap()]);
                assert!(c.in_kplus(&kill).unwrap());
            }
        }
    }

    #[test]
    fn siegel_coordinates_roundtrip() {
        let c = PadicCtx::new(3, 1, 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..5 {
            for _ in 0..30 {
                let s = c.propose_siegel(&mut rng, n, 4);
                assert!(c.in_siegel(&s, n).unwrap());
                assert!(c.eq_certified(&c.similitude(&s.mat).unwrap(), &s.mu).unwrap());
                let (cc, a, l, b) = c.siegel_coordinates(n, &s).unwrap();
                let back = c.siegel_element(n, &cc, &a, &l, &b);
                assert!(c.mat_eq(&back.mat, &s.mat).unwrap());
            }
        }
        let one = c.one();
        let z = Padic::ZERO;
        let a = [one, z, z, one];
        let s = c.siegel_element(3, &[one, z, z], &a, &one, &[z, z, z]);
        assert!(c.in_siegel(&s, 3).unwrap());
        let s2 = c.siegel_element(2, &[one, z, z], &a, &one, &[z, z, z]);
        assert!(!c.in_siegel(&s2, 3).unwrap());
    }
}
