//! Explicit matrix identities behind the support and Atkin-Lehner arguments,
//! checked exactly in `o / p^N` with random parameters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::padic::{GSp4Elem, Mat4, Padic, PadicCtx, PadicError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityTag {
    /// `A^-1 S(x,y,z) A = S(x+cy, y, z+2cx+c^2 y)` and `t A t^-1` in `K+`.
    LowerShearShift,
    /// Moving `x`, `y` or `z` across `t_{i,j}`.
    CosetShift,
    /// Conjugating the lower corner root element.
    LowerCornerConj,
    /// Conjugating the mixed Levi and upper element built from `x b` and `b`.
    MixedUpperConj,
    /// Conjugating `I + b e23`.
    UpperRootConj,
    /// Conjugating `diag(1, a, 1, a)`.
    DiagScaleConj,
    /// Conjugating the lower Levi unipotent when `y = z = 0`.
    LeviUnipotentConj,
    /// Levi conjugation when `y = z = 0`.
    LeviConjX,
    /// Conjugating `diag(1, a, 1/a, 1)` when `x = 0`.
    DiagInverseConj,
    /// Levi conjugation when `x = 0`.
    LeviConjYz,
    /// Conjugating the element parameterised by `alpha`.
    AlphaConj,
    /// Levi conjugation, general `x, y, z`.
    LeviConjXyz,
    /// `t_{i,j} u_n = p^(i+j) u_1 t_{i,n-2i-j-1}`.
    AtkinLehnerDiagonal,
    /// `t_{i,j} X_k u_n` in terms of `t_{i,j+n-2k} X_{n-k}`.
    AtkinLehnerX,
    /// `t_{i,j} S(0,y,z) u_n` and the rescaling of `S(0, p^n/z, p^n/y)`.
    AtkinLehnerYz,
    /// `t_{i,j} S(x,y,z) u_n` for the mixed case.
    AtkinLehnerXyz,
    /// `u_n^2 = p^n`.
    AtkinLehnerSquare,
    /// `u_1` normalises `K` and induces the swap-and-conjugate action.
    AtkinLehnerNormalizesK,
    /// Lower and upper Siegel unipotents conjugate into `K+`.
    UnipotentsIntoKplus,
}

impl IdentityTag {
    pub const ALL: [IdentityTag; 19] = [
        IdentityTag::LowerShearShift,
        IdentityTag::CosetShift,
        IdentityTag::LowerCornerConj,
        IdentityTag::MixedUpperConj,
        IdentityTag::UpperRootConj,
        IdentityTag::DiagScaleConj,
        IdentityTag::LeviUnipotentConj,
        IdentityTag::LeviConjX,
        IdentityTag::DiagInverseConj,
        IdentityTag::LeviConjYz,
        IdentityTag::AlphaConj,
        IdentityTag::LeviConjXyz,
        IdentityTag::AtkinLehnerDiagonal,
        IdentityTag::AtkinLehnerX,
        IdentityTag::AtkinLehnerYz,
        IdentityTag::AtkinLehnerXyz,
        IdentityTag::AtkinLehnerSquare,
        IdentityTag::AtkinLehnerNormalizesK,
        IdentityTag::UnipotentsIntoKplus,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityOutcome {
    pub tag: IdentityTag,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Random parameters for one trial.
struct Params {
    i: i64,
    j: i64,
    x: Padic,
    y: Padic,
    z: Padic,
}

fn unit_times_pow<R: Rng>(c: &PadicCtx, rng: &mut R, v: i64) -> Padic {
    c.mul(&c.w_pow(v), &c.random_unit(rng))
}

fn random_val_unit<R: Rng>(c: &PadicCtx, rng: &mut R, lo: i64, hi: i64) -> Padic {
    let v = rng.gen_range(lo..=hi);
    unit_times_pow(c, rng, v)
}

/// Dense matrix from `(row, col, value)` triples, zero elsewhere.
fn sparse(c: &PadicCtx, entries: &[(usize, usize, Padic)]) -> Mat4 {
    let mut m = c.mat_zero();
    for (r, col, v) in entries {
        m.0[*r][*col] = *v;
    }
    m
}

fn with_identity(c: &PadicCtx, entries: &[(usize, usize, Padic)]) -> Mat4 {
    let mut m = c.mat_identity();
    for (r, col, v) in entries {
        m.0[*r][*col] = *v;
    }
    m
}

struct Checker<'a> {
    c: &'a PadicCtx,
    failures: Vec<String>,
    checked: usize,
}

impl Checker<'_> {
    fn eq(&mut self, what: &str, lhs: &Mat4, rhs: &Mat4) -> Result<(), PadicError> {
        self.checked += 1;
        if !self.c.mat_eq(lhs, rhs)? {
            self.failures.push(format!("{what}: lhs {lhs:?} rhs {rhs:?}"));
        }
        Ok(())
    }

    fn holds(&mut self, what: &str, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(what.to_string());
        }
    }
}

/// Checks one identity on `trials` random parameter sets at level `n >= 4`.
pub fn verify_identity<R: Rng>(
    c: &PadicCtx,
    tag: IdentityTag,
    n: u32,
    trials: usize,
    rng: &mut R,
) -> Result<IdentityOutcome, PadicError> {
    let mut ck = Checker { c, failures: Vec::new(), checked: 0 };
    let nn = n as i64;
    for _ in 0..trials {
        let i = rng.gen_range(0..=((nn - 3) / 2).max(0));
        let j = rng.gen_range(1..=(nn - 2 - 2 * i).max(1));
        let p = Params {
            i,
            j,
            x: random_val_unit(c, rng, 1, 5),
            y: random_val_unit(c, rng, 1, 5),
            z: random_val_unit(c, rng, 1, 5),
        };
        check_one(&mut ck, tag, nn, &p, rng)?;
    }
    Ok(IdentityOutcome { tag, checked: ck.checked, failures: ck.failures })
}

fn check_one<R: Rng>(ck: &mut Checker, tag: IdentityTag, n: i64, p: &Params, rng: &mut R) -> Result<(), PadicError> {
    let c = ck.c;
    let (i, j) = (p.i, p.j);
    let w = |k: i64| c.w_pow(k);
    let z0 = Padic::ZERO;
    let one = c.one();
    let t = c.t_ij(i, j);
    let g = c.g_mul(&t, &c.s_xyz(&p.x, &p.y, &p.z));
    let conj = |g: &GSp4Elem, s: &GSp4Elem| c.g_conj(g, s);
    match tag {
        IdentityTag::LowerShearShift => {
            let cc = random_val_unit(c, rng, i + 1, i + 3);
            let a = c.levi(&[one, z0, cc, one], &one);
            let lhs = c.g_prod(&[&c.g_inv(&a)?, &c.s_xyz(&p.x, &p.y, &p.z), &a]);
            let x2 = c.add(&p.x, &c.mul(&cc, &p.y));
            let z2 = c.add(&c.add(&p.z, &c.mul(&c.int(2), &c.mul(&cc, &p.x))), &c.mul(&c.mul(&cc, &cc), &p.y));
            ck.eq("shear", &lhs.mat, &c.s_xyz(&x2, &p.y, &z2).mat)?;
            ck.holds("t A t^-1 in K+", c.in_kplus(&conj(&t, &a)?)?);
        }
        IdentityTag::CosetShift => {
            let lhs = g.mat;
            let rx = c.g_prod(&[&c.s_xyz(&c.mul(&w(-i - j), &p.x), &z0, &z0), &t, &c.s_xyz(&z0, &p.y, &p.z)]);
            let ry = c.g_prod(&[&c.s_xyz(&z0, &c.mul(&w(-j), &p.y), &z0), &t, &c.s_xyz(&p.x, &z0, &p.z)]);
            let rz = c.g_prod(&[&c.s_xyz(&z0, &z0, &c.mul(&w(-2 * i - j), &p.z)), &t, &c.s_xyz(&p.x, &p.y, &z0)]);
            ck.eq("shift x", &lhs, &rx.mat)?;
            ck.eq("shift y", &lhs, &ry.mat)?;
            ck.eq("shift z", &lhs, &rz.mat)?;
        }
        IdentityTag::LowerCornerConj => {
            let v = c.random_unit(rng);
            let e = c.lower_block(&[z0, z0, c.mul(&w(n), &v)]);
            let rhs = with_identity(c, &[(3, 0, c.mul(&w(n - 2 * i - j), &v))]);
            ck.eq("lower corner", &conj(&g, &e)?.mat, &rhs)?;
        }
        IdentityTag::MixedUpperConj => {
            let b = c.random_integer(rng);
            let xb = c.mul(&p.x, &b);
            let e = c.g_mul(&c.levi(&[one, z0, xb, one], &one), &c.upper_block(&[z0, z0, b]));
            let ev = with_identity(c, &[(1, 0, xb), (1, 2, b), (3, 2, c.neg(&xb))]);
            ck.eq("mixed element shape", &e.mat, &ev)?;
            // independent of z; the y^2 b and diagonal y b terms carry opposite signs
            let yb = c.mul(&p.y, &b);
            let rhs = with_identity(
                c,
                &[
                    (1, 1, c.sub(&one, &yb)),
                    (1, 2, c.mul(&w(j), &b)),
                    (2, 1, c.neg(&c.mul(&w(-j), &c.mul(&p.y, &yb)))),
                    (2, 2, c.add(&one, &yb)),
                    (3, 0, c.mul(&w(-2 * i - j), &c.mul(&p.x, &xb))),
                ],
            );
            ck.eq("mixed upper", &conj(&g, &e)?.mat, &rhs)?;
        }
        IdentityTag::UpperRootConj => {
            let b = c.random_integer(rng);
            let e = c.upper_block(&[z0, z0, b]);
            let (xb, yb) = (c.mul(&p.x, &b), c.mul(&p.y, &b));
            let xyb = c.mul(&p.x, &yb);
            // independent of z; every term containing y b appears with a minus sign
            let rhs = with_identity(
                c,
                &[
                    (1, 0, c.neg(&c.mul(&w(-i), &xb))),
                    (1, 1, c.sub(&one, &yb)),
                    (1, 2, c.mul(&w(j), &b)),
                    (2, 0, c.neg(&c.mul(&w(-i - j), &xyb))),
                    (2, 1, c.neg(&c.mul(&w(-j), &c.mul(&p.y, &yb)))),
                    (2, 2, c.add(&one, &yb)),
                    (3, 0, c.neg(&c.mul(&w(-2 * i - j), &c.mul(&p.x, &xb)))),
                    (3, 1, c.neg(&c.mul(&w(-i - j), &xyb))),
                    (3, 2, c.mul(&w(-i), &xb)),
                ],
            );
            ck.eq("upper root", &conj(&g, &e)?.mat, &rhs)?;
        }
        IdentityTag::DiagScaleConj => {
            let a = c.random_unit(rng);
            let e = c.levi(&[one, z0, z0, a], &one);
            let am1 = c.sub(&a, &one);
            let rhs = with_identity(
                c,
                &[
                    (1, 1, a),
                    (2, 1, c.mul(&w(-j), &c.mul(&p.y, &am1))),
                    (3, 0, c.neg(&c.mul(&w(-2 * i - j), &c.mul(&p.z, &am1)))),
                    (3, 3, a),
                ],
            );
            ck.eq("diag scale", &conj(&g, &e)?.mat, &rhs)?;
        }
        IdentityTag::LeviUnipotentConj => {
            let a = c.random_integer(rng);
            let wa = c.mul(&w(i), &a);
            let e = c.levi(&[one, z0, wa, one], &one);
            let g0 = c.g_mul(&t, &c.s_xyz(&p.x, &z0, &z0));
            let rhs = with_identity(
                c,
                &[(1, 0, a), (3, 0, c.mul(&c.mul(&c.int(2), &p.x), &c.mul(&w(-i - j), &a))), (3, 2, c.neg(&a))],
            );
            ck.eq("levi unipotent", &conj(&g0, &e)?.mat, &rhs)?;
        }
        IdentityTag::LeviConjX | IdentityTag::LeviConjYz | IdentityTag::LeviConjXyz => {
            let (x, y, z) = match tag {
                IdentityTag::LeviConjX => (p.x, z0, z0),
                IdentityTag::LeviConjYz => (z0, p.y, p.z),
                _ => (p.x, p.y, p.z),
            };
            let a = [c.random_unit(rng), c.random_integer(rng), c.random_integer(rng), c.random_unit(rng)];
            let l = c.random_unit(rng);
            let g0 = c.g_mul(&t, &c.s_xyz(&x, &y, &z));
            let lhs = conj(&g0, &c.levi(&a, &l))?;
            let [a1, a2, a3, a4] = a;
            let m = |u: &Padic, v: &Padic| c.mul(u, v);
            let one_m = c.sub(&one, &l);
            let one_p = c.add(&one, &l);
            let m1 = c.add(&c.add(&m(&m(&x, &a1), &one_m), &m(&y, &a3)), &m(&m(&z, &l), &a2));
            let m2 = c.add(&m(&m(&x, &a2), &one_p), &m(&y, &c.sub(&a4, &m(&l, &a1))));
            let m3 = c.add(&m(&m(&x, &a3), &one_p), &m(&z, &c.sub(&a1, &m(&l, &a4))));
            let m4 = c.add(&c.add(&m(&m(&x, &a4), &one_m), &m(&m(&l, &y), &a3)), &m(&z, &a2));
            let rhs = sparse(
                c,
                &[
                    (0, 0, a1),
                    (0, 1, m(&w(i), &a2)),
                    (1, 0, m(&w(-i), &a3)),
                    (1, 1, a4),
                    (2, 0, m(&w(-i - j), &m1)),
                    (2, 1, m(&w(-j), &m2)),
                    (2, 2, m(&l, &a1)),
                    (2, 3, c.neg(&m(&w(i), &m(&l, &a2)))),
                    (3, 0, m(&w(-2 * i - j), &m3)),
                    (3, 1, m(&w(-i - j), &m4)),
                    (3, 2, c.neg(&m(&w(-i), &m(&l, &a3)))),
                    (3, 3, m(&l, &a4)),
                ],
            );
            ck.eq("levi conjugation", &lhs.mat, &rhs)?;
        }
        IdentityTag::DiagInverseConj => {
            let a = c.random_unit(rng);
            let ainv = c.inv(&a)?;
            let e = c.levi(&[one, z0, z0, a], &ainv);
            let ev = c.mat_diag([one, a, ainv, one]);
            ck.eq("diag inverse shape", &e.mat, &ev)?;
            let g0 = c.g_mul(&t, &c.s_xyz(&z0, &p.y, &p.z));
            let rhs = with_identity(c, &[(1, 1, a), (2, 1, c.mul(&w(-j), &c.mul(&p.y, &c.sub(&a, &ainv)))), (2, 2, ainv)]);
            ck.eq("diag inverse", &conj(&g0, &e)?.mat, &rhs)?;
        }
        IdentityTag::AlphaConj => {
            let al = c.random_integer(rng);
            let xy = c.div(&p.x, &p.y)?;
            let tt = c.mul(&w(i), &c.div(&p.y, &p.x)?);
            let opa = c.add(&one, &al);
            let e = c.levi(&[one, z0, c.mul(&al, &xy), opa], &opa);
            let ev = with_identity(
                c,
                &[
                    (1, 0, c.mul(&al, &xy)),
                    (1, 1, opa),
                    (2, 2, opa),
                    (3, 2, c.neg(&c.mul(&opa, &c.mul(&al, &xy)))),
                    (3, 3, c.mul(&opa, &opa)),
                ],
            );
            ck.eq("alpha element shape", &e.mat, &ev)?;
            let x2 = c.mul(&p.x, &p.x);
            let m = c.mul(
                &c.div(&c.mul(&al, &x2), &c.mul(&w(2 * i + j), &p.y))?,
                &c.mul(&c.add(&c.int(2), &al), &c.sub(&one, &c.div(&c.mul(&p.z, &p.y), &x2)?)),
            );
            let at = c.div(&al, &tt)?;
            let rhs = with_identity(
                c,
                &[
                    (1, 0, at),
                    (1, 1, opa),
                    (2, 2, opa),
                    (3, 0, m),
                    (3, 2, c.neg(&c.mul(&opa, &at))),
                    (3, 3, c.mul(&opa, &opa)),
                ],
            );
            ck.eq("alpha", &conj(&g, &e)?.mat, &rhs)?;
        }
        IdentityTag::AtkinLehnerDiagonal => {
            let lhs = c.g_mul(&t, &c.u_n(n));
            let rhs = c.g_scale(&w(i + j), &c.g_mul(&c.u_n(1), &c.t_ij(i, n - 2 * i - j - 1)));
            ck.eq("diagonal", &lhs.mat, &rhs.mat)?;
        }
        IdentityTag::AtkinLehnerX => {
            let k = rng.gen_range(1..=n);
            let lhs = c.g_prod(&[&t, &c.x_k(k), &c.u_n(n)]);
            let d = w(i + j - k);
            let mm = sparse(c, &[(0, 0, c.int(-1)), (0, 2, d), (1, 1, one), (1, 3, c.neg(&d)), (2, 2, one), (3, 3, c.int(-1))]);
            let tail = c.g_mul(&c.t_ij(i, j + n - 2 * k), &c.x_k(n - k));
            let rhs = c.mat_scale(&w(k), &c.mat_mul(&mm, &tail.mat));
            ck.eq("x", &lhs.mat, &rhs)?;
        }
        IdentityTag::AtkinLehnerYz => {
            let (y, z) = (p.y, p.z);
            let g0 = c.g_mul(&t, &c.s_xyz(&z0, &y, &z));
            let lhs = c.g_mul(&g0, &c.u_n(n));
            let h1 = sparse(
                c,
                &[
                    (0, 3, w(-1)),
                    (1, 2, one),
                    (2, 1, one),
                    (2, 2, c.neg(&c.div(&w(2 * i + j + 1), &z)?)),
                    (3, 0, w(1)),
                    (3, 3, c.neg(&c.div(&w(j), &y)?)),
                ],
            );
            let h2 = c.mat_diag([
                c.div(&w(n + j - 1), &c.mul(&y, &y))?,
                c.div(&w(n + i + j), &c.mul(&y, &z))?,
                c.div(&z, &c.mul(&y, &w(i + 1)))?,
                one,
            ]);
            let s = c.s_xyz(&z0, &c.div(&w(n), &z)?, &c.div(&w(n), &y)?);
            let sign = c.mat_diag([one, one, c.int(-1), c.int(-1)]);
            let rhs = c.mat_scale(&c.mul(&w(i), &y), &c.mat_prod(&[&c.u_n(1).mat, &h1, &h2, &s.mat, &sign]));
            ck.eq("yz", &lhs.mat, &rhs)?;
            let r = rng.gen_range(1..=4);
            let u = c.random_unit(rng);
            let (y, z) = (c.mul(&u, &w(r)), w(2 * i + 1 + r));
            let s = c.s_xyz(&z0, &c.div(&w(n), &z)?, &c.div(&w(n), &y)?);
            let ui = c.inv(&u)?;
            let rhs = c.mat_prod(&[
                &c.mat_diag([one, one, ui, ui]),
                &c.s_xyz(&z0, &c.mul(&u, &w(n - 2 * i - 1 - r)), &w(n - r)).mat,
                &c.mat_diag([one, one, u, u]),
            ]);
            ck.eq("rescaled", &s.mat, &rhs)?;
        }
        IdentityTag::AtkinLehnerXyz => {
            // valuations of the mixed case: val x = i + val y, val z = 2i + 1 + val y
            let vy = rng.gen_range(1..=3);
            let y = unit_times_pow(c, rng, vy);
            let x = unit_times_pow(c, rng, i + vy);
            let z = unit_times_pow(c, rng, 2 * i + 1 + vy);
            let x2 = c.mul(&x, &x);
            let l = c.sub(&one, &c.div(&c.mul(&y, &z), &x2)?);
            let lhs = c.g_prod(&[&t, &c.s_xyz(&x, &y, &z), &c.u_n(n)]);
            let h = c.mat_diag([
                c.div(&w(2 * i + j + n), &x2)?,
                c.div(&w(i + j + n), &c.mul(&x2, &l))?,
                c.mul(&l, &w(i)),
                one,
            ]);
            let li = c.inv(&l)?;
            let lwx = c.mul(&c.mul(&l, &w(i)), &x);
            let b = sparse(
                c,
                &[
                    (0, 0, one),
                    (1, 0, c.neg(&c.div(&z, &lwx)?)),
                    (1, 1, c.int(-1)),
                    (2, 2, li),
                    (3, 2, c.div(&z, &c.mul(&l, &lwx))?),
                    (3, 3, c.neg(&li)),
                ],
            );
            let wyx = c.div(&c.mul(&w(i), &y), &x)?;
            let uu = sparse(
                c,
                &[
                    (0, 0, c.int(-1)),
                    (0, 1, wyx),
                    (0, 2, c.div(&w(i + j), &c.mul(&x, &l))?),
                    (1, 1, c.int(-1)),
                    (1, 2, c.neg(&c.div(&c.mul(&w(j), &z), &c.mul(&x2, &l))?)),
                    (1, 3, c.div(&w(i + j), &x)?),
                    (2, 2, one),
                    (2, 3, wyx),
                    (3, 3, one),
                ],
            );
            let s = c.s_xyz(&c.div(&w(n), &x)?, &c.div(&c.mul(&w(n), &y), &x2)?, &c.div(&c.mul(&w(n), &z), &x2)?);
            let d = c.mat_diag([one, one, l, l]);
            let rhs = c.mat_scale(&x, &c.mat_prod(&[&uu, &b, &h, &s.mat, &d]));
            ck.eq("xyz", &lhs.mat, &rhs)?;
        }
        IdentityTag::AtkinLehnerSquare => {
            let u = c.u_n(n);
            let sq = c.g_mul(&u, &u);
            ck.eq("square", &sq.mat, &c.mat_scale(&w(n), &c.mat_identity()))?;
            ck.holds("u_n normalises Si(n)", {
                let s = c.propose_siegel(rng, n as u32, 4);
                c.in_siegel(&c.g_conj(&u, &s)?, n as u32)?
            });
        }
        IdentityTag::AtkinLehnerNormalizesK => {
            let k = c.random_k(rng);
            let u1 = c.u_n(1);
            let moved = conj(&u1, &k)?;
            ck.holds("u_1 k u_1^-1 in K", c.in_k(&moved)?);
            let fq = c.residue_field();
            ck.holds("reduction intertwines the u-action", c.reduce_k(&moved)? == fq.u_action(&c.reduce_k(&k)?));
        }
        IdentityTag::UnipotentsIntoKplus => {
            // support shape: val x^2 >= 2i+j+2, val y^2 >= j+1, val z = 2i+1+val y
            let vy = (j + 2) / 2 + rng.gen_range(0..2);
            let vx = (2 * i + j + 3) / 2 + rng.gen_range(0..2);
            let y = unit_times_pow(c, rng, vy);
            let x = unit_times_pow(c, rng, vx);
            let z = unit_times_pow(c, rng, 2 * i + 1 + vy);
            let g0 = c.g_mul(&t, &c.s_xyz(&x, &y, &z));
            let wn = w(n);
            let cc = [0; 3].map(|_| c.mul(&wn, &c.random_integer(rng)));
            let bb = [0; 3].map(|_| c.random_integer(rng));
            ck.holds("lower unipotent into K+", c.in_kplus(&conj(&g0, &c.lower_block(&cc))?)?);
            ck.holds("upper unipotent into K+", c.in_kplus(&conj(&g0, &c.upper_block(&bb))?)?);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, f) in [(2, 1), (3, 1), (2, 2)] {
            for n in [4u32, 7] {
                let c = PadicCtx::new(p, f, PadicCtx::default_precision(p, n, 3, 6)).unwrap();
                for tag in IdentityTag::ALL {
                    let out = verify_identity(&c, tag, n, 10, &mut rng).unwrap();
                    assert!(out.passed(), "{tag:?} p={p} f={f} n={n}: {:?}", out.failures.first());
                }
            }
        }
    }
}
