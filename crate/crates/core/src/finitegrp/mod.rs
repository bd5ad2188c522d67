//! `GL_2(q)`, `GL_{2,2}(q)`, the order-two extension by the `u_1`-action and
//! explicitly enumerated subgroups of `GL_{2,2}(q)`.

mod field;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::{Fq, Fq2, FqCtx, MAX_FIELD_ORDER};

/// Largest `q` for which whole-group enumeration is allowed.
pub const MAX_ENUM_ORDER: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteGroupError {
    #[error("unsupported field size p = {p}, f = {f}")]
    UnsupportedSize { p: u32, f: u32 },
    #[error("subgroup kind {kind:?} is not available for q = {q}")]
    BadKind { kind: SubgroupKind, q: u32 },
    #[error("q = {q} exceeds the enumeration limit {MAX_ENUM_ORDER}")]
    TooLargeToEnumerate { q: u32 },
}

/// A 2x2 matrix `[[a, b], [c, d]]` over `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gl2 {
    pub a: Fq,
    pub b: Fq,
    pub c: Fq,
    pub d: Fq,
}

impl Gl2 {
    pub const IDENTITY: Gl2 = Gl2 { a: Fq::ONE, b: Fq::ZERO, c: Fq::ZERO, d: Fq::ONE };

    pub fn new(a: Fq, b: Fq, c: Fq, d: Fq) -> Gl2 {
        Gl2 { a, b, c, d }
    }

    pub fn diag(a: Fq, d: Fq) -> Gl2 {
        Gl2 { a, b: Fq::ZERO, c: Fq::ZERO, d }
    }

    /// `[[a, 0], [c, a]]`.
    pub fn lower(a: Fq, c: Fq) -> Gl2 {
        Gl2 { a, b: Fq::ZERO, c, d: a }
    }

    /// Dense index in `0..q^4`.
    pub fn index(&self, q: u32) -> usize {
        let q = q as usize;
        self.a.index() + q * (self.b.index() + q * (self.c.index() + q * self.d.index()))
    }
}

/// A pair `(g, h)` with `det g = det h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gl22 {
    pub first: Gl2,
    pub second: Gl2,
}

impl Gl22 {
    pub const IDENTITY: Gl22 = Gl22 { first: Gl2::IDENTITY, second: Gl2::IDENTITY };

    pub fn new(first: Gl2, second: Gl2) -> Gl22 {
        Gl22 { first, second }
    }
}

/// Element `u^eps * base` of the extension of `GL_{2,2}(q)` by the `u`-action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem {
    pub base: Gl22,
    pub eps: bool,
}

impl FqCtx {
    pub fn gl2_mul(&self, x: &Gl2, y: &Gl2) -> Gl2 {
        let dot = |p: Fq, q: Fq, r: Fq, s: Fq| self.add(self.mul(p, q), self.mul(r, s));
        Gl2 {
            a: dot(x.a, y.a, x.b, y.c),
            b: dot(x.a, y.b, x.b, y.d),
            c: dot(x.c, y.a, x.d, y.c),
            d: dot(x.c, y.b, x.d, y.d),
        }
    }

    pub fn gl2_det(&self, x: &Gl2) -> Fq {
        self.sub(self.mul(x.a, x.d), self.mul(x.b, x.c))
    }

    pub fn gl2_trace(&self, x: &Gl2) -> Fq {
        self.add(x.a, x.d)
    }

    pub fn gl2_inv(&self, x: &Gl2) -> Gl2 {
        let di = self.inv(self.gl2_det(x));
        Gl2 {
            a: self.mul(x.d, di),
            b: self.neg(self.mul(x.b, di)),
            c: self.neg(self.mul(x.c, di)),
            d: self.mul(x.a, di),
        }
    }

    pub fn gl2_conj(&self, x: &Gl2, g: &Gl2) -> Gl2 {
        self.gl2_mul(&self.gl2_mul(x, g), &self.gl2_inv(x))
    }

    /// `w = [[0, 1], [-1, 0]]`.
    pub fn w(&self) -> Gl2 {
        Gl2 { a: Fq::ZERO, b: Fq::ONE, c: self.minus_one(), d: Fq::ZERO }
    }

    /// `w g w^-1`, which equals `[[d, -c], [-b, a]]`.
    pub fn conj_by_w(&self, g: &Gl2) -> Gl2 {
        Gl2 { a: g.d, b: self.neg(g.c), c: self.neg(g.b), d: g.a }
    }

    pub fn enumerate_gl2(&self) -> Vec<Gl2> {
        let els = self.elements();
        let mut out = Vec::new();
        for &d in &els {
            for &c in &els {
                for &b in &els {
                    for &a in &els {
                        let g = Gl2 { a, b, c, d };
                        if !self.gl2_det(&g).is_zero() {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn gl22_mul(&self, x: &Gl22, y: &Gl22) -> Gl22 {
        Gl22 { first: self.gl2_mul(&x.first, &y.first), second: self.gl2_mul(&x.second, &y.second) }
    }

    pub fn gl22_inv(&self, x: &Gl22) -> Gl22 {
        Gl22 { first: self.gl2_inv(&x.first), second: self.gl2_inv(&x.second) }
    }

    pub fn gl22_conj(&self, x: &Gl22, g: &Gl22) -> Gl22 {
        self.gl22_mul(&self.gl22_mul(x, g), &self.gl22_inv(x))
    }

    pub fn is_gl22(&self, x: &Gl22) -> bool {
        let d = self.gl2_det(&x.first);
        !d.is_zero() && d == self.gl2_det(&x.second)
    }

    /// All of `GL_{2,2}(q)`; `q <= 9`.
    pub fn enumerate_gl22(&self) -> Result<Vec<Gl22>, FiniteGroupError> {
        if self.q() > MAX_ENUM_ORDER {
            return Err(FiniteGroupError::TooLargeToEnumerate { q: self.q() });
        }
        let gl2 = self.enumerate_gl2();
        let mut by_det: Vec<Vec<Gl2>> = vec![Vec::new(); self.q() as usize];
        for g in &gl2 {
            by_det[self.gl2_det(g).index()].push(*g);
        }
        let mut out = Vec::with_capacity(gl2.len() * gl2.len() / (self.q() as usize - 1));
        for g in &gl2 {
            for h in &by_det[self.gl2_det(g).index()] {
                out.push(Gl22 { first: *g, second: *h });
            }
        }
        Ok(out)
    }

    /// The action of `u_1`: swap the factors and conjugate both by `w`.
    pub fn u_action(&self, x: &Gl22) -> Gl22 {
        Gl22 { first: self.conj_by_w(&x.second), second: self.conj_by_w(&x.first) }
    }

    pub fn ext_mul(&self, x: &ExtElem, y: &ExtElem) -> ExtElem {
        // u^e1 b1 u^e2 b2 = u^(e1+e2) (u^-e2 b1 u^e2) b2, and u^2 acts trivially
        let moved = if y.eps { self.u_action(&x.base) } else { x.base };
        ExtElem { base: self.gl22_mul(&moved, &y.base), eps: x.eps ^ y.eps }
    }

    pub fn ext_inv(&self, x: &ExtElem) -> ExtElem {
        let inv = self.gl22_inv(&x.base);
        ExtElem { base: if x.eps { self.u_action(&inv) } else { inv }, eps: x.eps }
    }

    /// Conjugation `s g s^-1` of a base element by an extension element.
    pub fn ext_conj(&self, s: &ExtElem, g: &Gl22) -> Gl22 {
        let inner = self.gl22_conj(&s.base, g);
        if s.eps {
            self.u_action(&inner)
        } else {
            inner
        }
    }
}

/// Labels for the explicitly parameterised subgroups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubgroupKind {
    /// `(diag(a, b), diag(c, ab/c))`.
    Torus,
    /// `([[a, 0], [u, a]], [[a, 0], [u, a]])`.
    Unip,
    /// `([[a, 0], [u + a(b^2 + b), a]], [[a, 0], [u, a]])`, `q` even.
    ArtinUnip,
    /// Lower unipotents in the first factor.
    U1,
    /// Lower unipotents in the second factor.
    U2,
    Custom,
}

/// A finite subgroup of `GL_{2,2}(q)` stored as a sorted element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupR {
    elements: Vec<Gl22>,
    pub label: SubgroupKind,
}

impl SubgroupR {
    pub fn from_elements(mut elements: Vec<Gl22>, label: SubgroupKind) -> SubgroupR {
        elements.sort();
        elements.dedup();
        SubgroupR { elements, label }
    }

    pub fn elements(&self) -> &[Gl22] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &Gl22) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn is_subset_of(&self, other: &SubgroupR) -> bool {
        self.elements.iter().all(|x| other.contains(x))
    }

    pub fn is_closed(&self, ctx: &FqCtx) -> bool {
        self.contains(&Gl22::IDENTITY)
            && self.elements.iter().all(|x| {
                self.contains(&ctx.gl22_inv(x))
                    && self.elements.iter().all(|y| self.contains(&ctx.gl22_mul(x, y)))
            })
    }

    /// A small generating set, chosen greedily.
    pub fn generators(&self, ctx: &FqCtx) -> Vec<Gl22> {
        let mut gens = Vec::new();
        let mut span: HashSet<Gl22> = [Gl22::IDENTITY].into_iter().collect();
        for x in &self.elements {
            if !span.contains(x) {
                gens.push(*x);
                span = closure_set(ctx, &gens);
            }
        }
        gens
    }

    pub fn conjugate_by(&self, ctx: &FqCtx, x: &Gl22) -> SubgroupR {
        SubgroupR::from_elements(self.elements.iter().map(|g| ctx.gl22_conj(x, g)).collect(), SubgroupKind::Custom)
    }

    /// Whether `s` (possibly in the u-coset) normalises this subgroup.
    pub fn normalized_by(&self, ctx: &FqCtx, s: &ExtElem) -> bool {
        self.elements.iter().all(|g| self.contains(&ctx.ext_conj(s, g)))
    }
}

fn closure_set(ctx: &FqCtx, gens: &[Gl22]) -> HashSet<Gl22> {
    let mut seen: HashSet<Gl22> = HashSet::new();
    seen.insert(Gl22::IDENTITY);
    let mut frontier = vec![Gl22::IDENTITY];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = ctx.gl22_mul(&x, g);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Smallest subgroup containing `gens`.
pub fn subgroup_closure(ctx: &FqCtx, gens: &[Gl22]) -> SubgroupR {
    SubgroupR::from_elements(closure_set(ctx, gens).into_iter().collect(), SubgroupKind::Custom)
}

/// Builds one of the standard subgroups.
pub fn subgroup_r(ctx: &FqCtx, kind: SubgroupKind) -> Result<SubgroupR, FiniteGroupError> {
    let els = ctx.elements();
    let units = ctx.units();
    let mut out = Vec::new();
    match kind {
        SubgroupKind::Torus => {
            for &a in &units {
                for &b in &units {
                    for &c in &units {
                        let d = ctx.div(ctx.mul(a, b), c);
                        out.push(Gl22::new(Gl2::diag(a, b), Gl2::diag(c, d)));
                    }
                }
            }
        }
        SubgroupKind::Unip => {
            for &a in &units {
                for &u in &els {
                    let m = Gl2::lower(a, u);
                    out.push(Gl22::new(m, m));
                }
            }
        }
        SubgroupKind::ArtinUnip => {
            if !ctx.is_even() {
                return Err(FiniteGroupError::BadKind { kind, q: ctx.q() });
            }
            let shifts: BTreeSet<Fq> = els.iter().map(|&b| ctx.add(ctx.mul(b, b), b)).collect();
            for &a in &units {
                for &u in &els {
                    for &s in &shifts {
                        let c1 = ctx.add(u, ctx.mul(a, s));
                        out.push(Gl22::new(Gl2::lower(a, c1), Gl2::lower(a, u)));
                    }
                }
            }
        }
        SubgroupKind::U1 => {
            for &u in &els {
                out.push(Gl22::new(Gl2::lower(Fq::ONE, u), Gl2::IDENTITY));
            }
        }
        SubgroupKind::U2 => {
            for &u in &els {
                out.push(Gl22::new(Gl2::IDENTITY, Gl2::lower(Fq::ONE, u)));
            }
        }
        SubgroupKind::Custom => return Err(FiniteGroupError::BadKind { kind, q: ctx.q() }),
    }
    Ok(SubgroupR::from_elements(out, kind))
}

/// Finds `x` with `x A x^-1 = B`, searching all of `GL_{2,2}(q)`.
pub fn conjugate_subgroups(ctx: &FqCtx, a: &SubgroupR, b: &SubgroupR) -> Option<Gl22> {
    if a.len() != b.len() {
        return None;
    }
    let gens = a.generators(ctx);
    let group = ctx.enumerate_gl22().ok()?;
    group.into_iter().find(|x| gens.iter().all(|g| b.contains(&ctx.gl22_conj(x, g))))
}

/// Finds `x` with `x A x^-1` contained in `B`.
pub fn conjugate_into(ctx: &FqCtx, a: &SubgroupR, b: &SubgroupR) -> Option<Gl22> {
    if a.len() > b.len() || !b.len().is_multiple_of(a.len()) {
        return None;
    }
    let gens = a.generators(ctx);
    let group = ctx.enumerate_gl22().ok()?;
    group.into_iter().find(|x| gens.iter().all(|g| b.contains(&ctx.gl22_conj(x, g))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, f: u32) -> FqCtx {
        FqCtx::new(p, f).unwrap()
    }

    #[test]
    fn gl22_orders() {
        assert_eq!(ctx(2, 1).enumerate_gl22().unwrap().len(), 36);
        assert_eq!(ctx(3, 1).enumerate_gl22().unwrap().len(), 1152);
        assert_eq!(ctx(2, 2).enumerate_gl22().unwrap().len(), 10800);
        assert!(ctx(11, 1).enumerate_gl22().is_err());
    }

    #[test]
    fn standard_subgroup_sizes() {
        let c3 = ctx(3, 1);
        assert_eq!(subgroup_r(&c3, SubgroupKind::Torus).unwrap().len(), 8);
        let c4 = ctx(2, 2);
        assert_eq!(subgroup_r(&c4, SubgroupKind::Unip).unwrap().len(), 12);
        assert_eq!(subgroup_r(&ctx(2, 1), SubgroupKind::ArtinUnip).unwrap().len(), 2);
        assert!(matches!(subgroup_r(&c3, SubgroupKind::ArtinUnip), Err(FiniteGroupError::BadKind { .. })));
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3)] {
            let c = ctx(p, f);
            let q = c.q() as usize;
            for kind in [SubgroupKind::Torus, SubgroupKind::Unip, SubgroupKind::U1, SubgroupKind::U2] {
                let r = subgroup_r(&c, kind).unwrap();
                let expected = match kind {
                    SubgroupKind::Torus => (q - 1).pow(3),
                    SubgroupKind::Unip => q * (q - 1),
                    _ => q,
                };
                assert_eq!(r.len(), expected);
                if q <= 5 {
                    assert!(r.is_closed(&c), "{kind:?} at q = {q}");
                }
            }
            if c.is_even() {
                let r = subgroup_r(&c, SubgroupKind::ArtinUnip).unwrap();
                assert_eq!(r.len(), q * q * (q - 1) / 2);
                assert!(r.is_closed(&c));
            }
        }
    }

    #[test]
    fn u_action_examples() {
        for (p, f) in [(2, 1), (3, 1), (5, 1), (2, 2)] {
            let c = ctx(p, f);
            assert_eq!(c.u_action(&Gl22::IDENTITY), Gl22::IDENTITY);
            let units = c.units();
            for &a in &units {
                for &b in &units {
                    let x = Gl22::new(Gl2::diag(a, b), Gl2::diag(b, a));
                    assert_eq!(c.u_action(&x), Gl22::new(Gl2::diag(a, b), Gl2::diag(b, a)));
                    let y = Gl22::new(Gl2::diag(a, b), Gl2::diag(Fq::ONE, c.mul(a, b)));
                    let expected = Gl22::new(Gl2::diag(c.mul(a, b), Fq::ONE), Gl2::diag(b, a));
                    assert_eq!(c.u_action(&y), expected);
                }
            }
            let w = c.w();
            for x in c.enumerate_gl22().unwrap().iter().step_by(7) {
                assert_eq!(c.u_action(&c.u_action(x)), *x);
                assert!(c.is_gl22(&c.u_action(x)));
                assert_eq!(c.u_action(x).first, c.gl2_conj(&w, &x.second));
            }
        }
    }

    #[test]
    fn center_index_two_for_odd_q() {
        for (p, f) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let c = ctx(p, f);
            let units = c.units();
            let mut center = Vec::new();
            for &a in &units {
                for &b in &units {
                    if c.mul(a, a) == c.mul(b, b) {
                        center.push((a, b));
                    }
                }
            }
            let diag_count = units.len();
            assert_eq!(center.len(), 2 * diag_count);
            assert!(center.contains(&(Fq::ONE, c.minus_one())));
        }
    }

    #[test]
    fn closure_examples() {
        let c3 = ctx(3, 1);
        assert_eq!(subgroup_closure(&c3, &[Gl22::IDENTITY]).len(), 1);
        let torus = subgroup_r(&c3, SubgroupKind::Torus).unwrap();
        let gens = torus.generators(&c3);
        let closed = subgroup_closure(&c3, &gens);
        assert_eq!(closed.len(), 8);
        assert_eq!(subgroup_closure(&c3, closed.elements()).len(), 8);
        let u1 = subgroup_r(&c3, SubgroupKind::U1).unwrap();
        assert_eq!(subgroup_closure(&c3, &u1.generators(&c3)).len(), 3);
        let order = c3.enumerate_gl22().unwrap().len();
        assert_eq!(order % closed.len(), 0);
    }

    #[test]
    fn conjugacy_examples() {
        let c2 = ctx(2, 1);
        let u1 = subgroup_r(&c2, SubgroupKind::U1).unwrap();
        let u2 = subgroup_r(&c2, SubgroupKind::U2).unwrap();
        let x = conjugate_subgroups(&c2, &u1, &u1).unwrap();
        assert_eq!(u1.conjugate_by(&c2, &x).elements(), u1.elements());
        assert_eq!(conjugate_subgroups(&c2, &u1, &u2), None);

        let c3 = ctx(3, 1);
        let unip = subgroup_r(&c3, SubgroupKind::Unip).unwrap();
        let t = Gl22::new(Gl2::new(Fq::ONE, Fq::ONE, Fq::ZERO, c3.minus_one()), Gl2::diag(c3.minus_one(), Fq::ONE));
        let moved = unip.conjugate_by(&c3, &t);
        let found = conjugate_subgroups(&c3, &unip, &moved).unwrap();
        assert_eq!(unip.conjugate_by(&c3, &found).elements(), moved.elements());
    }

    #[test]
    fn ext_group_laws() {
        let c = ctx(3, 1);
        let g = c.enumerate_gl22().unwrap();
        let pick = |i: usize, e: bool| ExtElem { base: g[(i * 37) % g.len()], eps: e };
        for i in 0..40 {
            let x = pick(i, i % 2 == 0);
            let y = pick(i + 5, i % 3 == 0);
            let z = pick(i + 11, i % 5 == 0);
            assert_eq!(c.ext_mul(&c.ext_mul(&x, &y), &z), c.ext_mul(&x, &c.ext_mul(&y, &z)));
            let id = ExtElem { base: Gl22::IDENTITY, eps: false };
            assert_eq!(c.ext_mul(&x, &c.ext_inv(&x)), id);
        }
        let u = ExtElem { base: Gl22::IDENTITY, eps: true };
        assert_eq!(c.ext_mul(&u, &u), ExtElem { base: Gl22::IDENTITY, eps: false });
    }
}
