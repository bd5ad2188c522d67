//! The residue field `F_q` and its quadratic extension `F_{q^2}`.
//!
//! Nonzero elements are stored as discrete logarithms with respect to a fixed
//! generator; addition goes through Zech logarithm tables. `F_q` is realised
//! inside `F_{q^2}` as the subgroup generated by `N(g2) = g2^(q+1)`, so the two
//! fields share one generator.

use super::FiniteGroupError;

/// Largest `q` accepted for field-only work.
pub const MAX_FIELD_ORDER: u32 = 16;

/// An element of `F_q`: `0` is zero, `1 + l` is `g1^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub u8);

/// An element of `F_{q^2}`: `0` is zero, `1 + l` is `g2^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq2(pub u16);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Discrete log with respect to `g1`, or `None` for zero.
    pub fn log(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0 as u32 - 1)
    }

    /// Dense index in `0..q`.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Fq2 {
    pub const ZERO: Fq2 = Fq2(0);
    pub const ONE: Fq2 = Fq2(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn log(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0 as u32 - 1)
    }
}

/// `GF(p^d)` built from a primitive polynomial; elements encoded as base-`p`
/// coefficient integers.
#[derive(Debug, Clone)]
struct PolyField {
    p: u32,
    d: u32,
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PolyField {
    fn new(p: u32, d: u32) -> PolyField {
        let order = p.pow(d);
        // Search monic polynomials x^d + sum c_i x^i for one where x has
        // multiplicative order p^d - 1.
        for low in 0..order {
            let coeffs = digits(low, p, d);
            if coeffs[0] == 0 {
                continue;
            }
            if let Some(exp) = Self::power_cycle(p, d, &coeffs) {
                let mut log = vec![u32::MAX; order as usize];
                for (k, &e) in exp.iter().enumerate() {
                    log[e as usize] = k as u32;
                }
                return PolyField { p, d, order, exp, log };
            }
        }
        unreachable!("a primitive polynomial always exists")
    }

    fn power_cycle(p: u32, d: u32, low: &[u32]) -> Option<Vec<u32>> {
        let n = p.pow(d) - 1;
        let mut cur = vec![0u32; d as usize];
        cur[0] = 1;
        let mut exp = Vec::with_capacity(n as usize);
        for k in 0..n {
            let enc = undigits(&cur, p);
            if k > 0 && enc == 1 {
                return None;
            }
            exp.push(enc);
            // multiply by x modulo x^d + low
            let top = cur[d as usize - 1];
            for i in (1..d as usize).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            for i in 0..d as usize {
                cur[i] = (cur[i] + p - (top * low[i]) % p) % p;
            }
        }
        (undigits(&cur, p) == 1).then_some(exp)
    }

    fn add_enc(&self, a: u32, b: u32) -> u32 {
        let da = digits(a, self.p, self.d);
        let db = digits(b, self.p, self.d);
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p)
    }
}

fn digits(mut v: u32, p: u32, d: u32) -> Vec<u32> {
    (0..d)
        .map(|_| {
            let r = v % p;
            v /= p;
            r
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &c| acc * p + c)
}

pub(crate) fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Finite field context for `F_q` and `F_{q^2}`.
#[derive(Debug, Clone)]
pub struct FqCtx {
    p: u32,
    f: u32,
    q: u32,
    /// `1 + g2^n = g2^zech2[n]` (None when the sum is zero).
    zech2: Vec<Option<u32>>,
    /// `1 + g1^n = g1^zech[n]`.
    zech: Vec<Option<u32>>,
    /// Integer `n mod p` as an element of `F_q`, for `n in 0..p`.
    prime_elems: Vec<Fq>,
    /// Exponent of `zeta_p` in `psi(x)`, indexed by `Fq::index`.
    psi_exp: Vec<u32>,
}

impl FqCtx {
    pub fn new(p: u32, f: u32) -> Result<FqCtx, FiniteGroupError> {
        if !is_prime(p) || f == 0 {
            return Err(FiniteGroupError::UnsupportedSize { p, f });
        }
        let q = match p.checked_pow(f) {
            Some(q) if q <= MAX_FIELD_ORDER => q,
            _ => return Err(FiniteGroupError::UnsupportedSize { p, f }),
        };
        let big = PolyField::new(p, 2 * f);
        let n2 = big.order - 1;
        let zech2: Vec<Option<u32>> = (0..n2)
            .map(|n| {
                let s = big.add_enc(1, big.exp[n as usize]);
                (s != 0).then(|| big.log[s as usize])
            })
            .collect();
        let zech: Vec<Option<u32>> = (0..q - 1)
            .map(|n| {
                zech2[(n * (q + 1)) as usize].map(|l| {
                    debug_assert_eq!(l % (q + 1), 0);
                    l / (q + 1)
                })
            })
            .collect();
        let mut ctx = FqCtx { p, f, q, zech2, zech, prime_elems: Vec::new(), psi_exp: Vec::new() };
        let mut prime_elems = vec![Fq::ZERO];
        for _ in 1..p {
            let last = *prime_elems.last().unwrap();
            prime_elems.push(ctx.add(last, Fq::ONE));
        }
        ctx.prime_elems = prime_elems;
        ctx.psi_exp = ctx
            .elements()
            .into_iter()
            .map(|x| {
                let t = ctx.absolute_trace(x);
                ctx.prime_elems.iter().position(|&e| e == t).expect("trace lies in F_p") as u32
            })
            .collect();
        Ok(ctx)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_even(&self) -> bool {
        self.p == 2
    }

    /// All elements in index order (`Fq(0)..Fq(q-1)`).
    pub fn elements(&self) -> Vec<Fq> {
        (0..self.q).map(|i| Fq(i as u8)).collect()
    }

    pub fn units(&self) -> Vec<Fq> {
        (1..self.q).map(|i| Fq(i as u8)).collect()
    }

    /// `g1^l`.
    pub fn gen_pow(&self, l: i64) -> Fq {
        Fq(1 + l.rem_euclid(self.q as i64 - 1) as u8)
    }

    pub fn from_int(&self, n: i64) -> Fq {
        self.prime_elems[n.rem_euclid(self.p as i64) as usize]
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        match (a.log(), b.log()) {
            (Some(x), Some(y)) => self.gen_pow(x as i64 + y as i64),
            _ => Fq::ZERO,
        }
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        match (a.log(), b.log()) {
            (None, _) => b,
            (_, None) => a,
            (Some(x), Some(y)) => {
                let n = (y as i64 - x as i64).rem_euclid(self.q as i64 - 1) as usize;
                match self.zech[n] {
                    Some(z) => self.gen_pow(x as i64 + z as i64),
                    None => Fq::ZERO,
                }
            }
        }
    }

    pub fn minus_one(&self) -> Fq {
        if self.p == 2 {
            Fq::ONE
        } else {
            self.gen_pow((self.q as i64 - 1) / 2)
        }
    }

    pub fn neg(&self, a: Fq) -> Fq {
        self.mul(a, self.minus_one())
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: Fq) -> Fq {
        let l = a.log().expect("inverse of zero");
        self.gen_pow(-(l as i64))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Fq {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        match a.log() {
            None if e == 0 => Fq::ONE,
            None => Fq::ZERO,
            Some(l) => self.gen_pow(((l as u64 * e) % (self.q as u64 - 1)) as i64),
        }
    }

    pub fn is_square(&self, a: Fq) -> bool {
        match a.log() {
            None => true,
            Some(l) => self.p == 2 || l % 2 == 0,
        }
    }

    /// Trace down to the prime field.
    pub fn absolute_trace(&self, x: Fq) -> Fq {
        let mut acc = Fq::ZERO;
        let mut y = x;
        for _ in 0..self.f {
            acc = self.add(acc, y);
            y = self.pow(y, self.p as u64);
        }
        acc
    }

    /// `psi(x) = zeta_p^{psi_exp(x)}`, a fixed nontrivial additive character.
    pub fn psi_exp(&self, x: Fq) -> u32 {
        self.psi_exp[x.index()]
    }

    /// Integer in `0..p` represented by an element of the prime field.
    pub fn prime_field_value(&self, x: Fq) -> Option<u32> {
        self.prime_elems.iter().position(|&e| e == x).map(|i| i as u32)
    }

    // ---- F_{q^2} ----

    pub fn big_order(&self) -> u32 {
        self.q * self.q - 1
    }

    pub fn big_gen_pow(&self, l: i64) -> Fq2 {
        Fq2(1 + l.rem_euclid(self.big_order() as i64) as u16)
    }

    pub fn big_elements(&self) -> Vec<Fq2> {
        (0..=self.big_order()).map(|i| Fq2(i as u16)).collect()
    }

    pub fn big_mul(&self, a: Fq2, b: Fq2) -> Fq2 {
        match (a.log(), b.log()) {
            (Some(x), Some(y)) => self.big_gen_pow(x as i64 + y as i64),
            _ => Fq2::ZERO,
        }
    }

    pub fn big_add(&self, a: Fq2, b: Fq2) -> Fq2 {
        match (a.log(), b.log()) {
            (None, _) => b,
            (_, None) => a,
            (Some(x), Some(y)) => {
                let n = (y as i64 - x as i64).rem_euclid(self.big_order() as i64) as usize;
                match self.zech2[n] {
                    Some(z) => self.big_gen_pow(x as i64 + z as i64),
                    None => Fq2::ZERO,
                }
            }
        }
    }

    pub fn big_pow(&self, a: Fq2, e: u64) -> Fq2 {
        match a.log() {
            None if e == 0 => Fq2::ONE,
            None => Fq2::ZERO,
            Some(l) => self.big_gen_pow(((l as u64 * e) % self.big_order() as u64) as i64),
        }
    }

    /// The inclusion `F_q -> F_{q^2}`.
    pub fn embed(&self, a: Fq) -> Fq2 {
        match a.log() {
            None => Fq2::ZERO,
            Some(l) => self.big_gen_pow(l as i64 * (self.q as i64 + 1)),
        }
    }

    /// Inverse of `embed` on the image.
    pub fn restrict(&self, t: Fq2) -> Option<Fq> {
        match t.log() {
            None => Some(Fq::ZERO),
            Some(l) if l % (self.q + 1) == 0 => Some(self.gen_pow((l / (self.q + 1)) as i64)),
            _ => None,
        }
    }

    /// `N(t) = t^(q+1)`.
    pub fn norm(&self, t: Fq2) -> Fq {
        self.restrict(self.big_pow(t, self.q as u64 + 1)).expect("norm lands in F_q")
    }

    /// `Tr(t) = t + t^q`.
    pub fn trace(&self, t: Fq2) -> Fq {
        self.restrict(self.big_add(t, self.big_pow(t, self.q as u64))).expect("trace lands in F_q")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_small() -> Vec<FqCtx> {
        [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (11, 1), (13, 1)]
            .iter()
            .map(|&(p, f)| FqCtx::new(p, f).unwrap())
            .collect()
    }

    #[test]
    fn field_sizes() {
        let f2 = FqCtx::new(2, 1).unwrap();
        assert_eq!(f2.q(), 2);
        assert_eq!(f2.big_order(), 3);
        let f3 = FqCtx::new(3, 1).unwrap();
        assert_eq!(f3.big_order(), 8);
        assert!(matches!(FqCtx::new(17, 1), Err(FiniteGroupError::UnsupportedSize { .. })));
        assert!(matches!(FqCtx::new(4, 1), Err(FiniteGroupError::UnsupportedSize { .. })));
        assert!(matches!(FqCtx::new(2, 5), Err(FiniteGroupError::UnsupportedSize { .. })));
    }

    #[test]
    fn norm_surjective_f4() {
        let ctx = FqCtx::new(2, 2).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for t in ctx.big_elements().into_iter().filter(|t| !t.is_zero()) {
            seen.insert(ctx.norm(t));
        }
        assert_eq!(seen.len(), 3);
        assert!(!seen.contains(&Fq::ZERO));
    }

    #[test]
    fn field_axioms() {
        for ctx in all_small() {
            let els = ctx.elements();
            for &a in &els {
                assert_eq!(ctx.add(a, Fq::ZERO), a);
                assert_eq!(ctx.add(a, ctx.neg(a)), Fq::ZERO);
                for &b in &els {
                    assert_eq!(ctx.add(a, b), ctx.add(b, a));
                    for &c in &els {
                        let lhs = ctx.mul(a, ctx.add(b, c));
                        let rhs = ctx.add(ctx.mul(a, b), ctx.mul(a, c));
                        assert_eq!(lhs, rhs);
                        assert_eq!(ctx.add(a, ctx.add(b, c)), ctx.add(ctx.add(a, b), c));
                    }
                }
            }
            // p * 1 = 0
            let mut acc = Fq::ZERO;
            for _ in 0..ctx.p() {
                acc = ctx.add(acc, Fq::ONE);
            }
            assert_eq!(acc, Fq::ZERO);
        }
    }

    #[test]
    fn norm_of_generator_generates() {
        for ctx in all_small() {
            let n = ctx.norm(ctx.big_gen_pow(1));
            assert_eq!(n, ctx.gen_pow(1));
        }
    }

    #[test]
    fn psi_nontrivial_and_additive() {
        for ctx in all_small() {
            let p = ctx.p();
            let total: num_complex::Complex64 = ctx
                .elements()
                .iter()
                .map(|&x| num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU * ctx.psi_exp(x) as f64 / p as f64))
                .sum();
            assert!(total.norm() < 1e-9);
            for &a in &ctx.elements() {
                for &b in &ctx.elements() {
                    assert_eq!(ctx.psi_exp(ctx.add(a, b)), (ctx.psi_exp(a) + ctx.psi_exp(b)) % p);
                }
            }
        }
    }

    #[test]
    fn big_field_consistent() {
        let ctx = FqCtx::new(3, 1).unwrap();
        for &a in &ctx.elements() {
            for &b in &ctx.elements() {
                let s = ctx.big_add(ctx.embed(a), ctx.embed(b));
                assert_eq!(ctx.restrict(s), Some(ctx.add(a, b)));
            }
        }
    }
}
