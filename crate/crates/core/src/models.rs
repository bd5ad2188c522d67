//! Explicit matrix models: cuspidal representations of `GL_2(q)` cut out of
//! the Gelfand-Graev module, their tensor products restricted to
//! `GL_{2,2}(q)`, commutant decompositions and twisted operator traces.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chars::{
    cuspidal_char, lambda_exponent, CharsError, Constituent, ConstituentOracle, CuspidalLabel, Gl2Classifier,
    SigmaLabel,
};
use crate::finitegrp::{ExtElem, FiniteGroupError, Fq, FqCtx, Gl2, Gl22, SubgroupR};
use crate::numerics::{certify_complex, root_of_unity, NumericsError, DEFAULT_TOL};

pub type CMat = DMatrix<Complex64>;

/// Largest `q` for which explicit models are built.
pub const MAX_MODEL_ORDER: u32 = 7;

const NULL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("explicit models need q <= {MAX_MODEL_ORDER}, got {q}")]
    TooLarge { q: u32 },
    #[error("projector has rank {found}, expected {expected}")]
    ProjectorRankMismatch { expected: usize, found: usize },
    #[error("no intertwiner between the representation and its u-twist")]
    NoIntertwiner,
    #[error("operator does not preserve the fixed space")]
    NotNormalizing,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Chars(#[from] CharsError),
    #[error(transparent)]
    FiniteGroup(#[from] FiniteGroupError),
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Orthonormal basis of the column span of `m`.
pub fn column_basis(m: &CMat, tol: f64) -> CMat {
    let mut cols: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for b in &cols {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let n = v.norm();
        if n > tol {
            cols.push(v / Complex64::new(n, 0.0));
        }
    }
    if cols.is_empty() {
        return CMat::zeros(m.nrows(), 0);
    }
    CMat::from_columns(&cols)
}

/// The induced module from `[[1, b], [0, 1]] -> psi(b)`, as monomial matrices.
pub struct GelfandGraev {
    q: u32,
    reps: Vec<Gl2>,
    slot: Vec<usize>,
    /// `gg(h)[j] = (i, e)`: `r_j h = n_beta r_i` with `psi(beta) = zeta_p^e`.
    action: Vec<Vec<(usize, u32)>>,
    group: Vec<Gl2>,
    p: u32,
}

impl GelfandGraev {
    pub fn new(ctx: &FqCtx) -> Result<GelfandGraev, ModelError> {
        let q = ctx.q();
        if q > MAX_MODEL_ORDER {
            return Err(ModelError::TooLarge { q });
        }
        let group = ctx.enumerate_gl2();
        let mut slot = vec![usize::MAX; (q as usize).pow(4)];
        let mut reps = Vec::new();
        for g in &group {
            let (_, r) = Self::split(ctx, g);
            if slot[r.index(q)] == usize::MAX {
                slot[r.index(q)] = reps.len();
                reps.push(r);
            }
        }
        let mut gg = GelfandGraev { q, reps, slot, action: Vec::new(), group, p: ctx.p() };
        let mut action = vec![Vec::new(); gg.slot.len()];
        for h in &gg.group {
            action[h.index(q)] = gg
                .reps
                .iter()
                .map(|r| {
                    let (beta, rep) = Self::split(ctx, &ctx.gl2_mul(r, h));
                    (gg.slot[rep.index(q)], ctx.psi_exp(beta))
                })
                .collect();
        }
        gg.action = action;
        Ok(gg)
    }

    /// `x = [[1, beta], [0, 1]] r` with `r` the canonical coset representative.
    fn split(ctx: &FqCtx, x: &Gl2) -> (Fq, Gl2) {
        if !x.c.is_zero() {
            let beta = ctx.div(x.a, x.c);
            let b = ctx.sub(x.b, ctx.mul(beta, x.d));
            (beta, Gl2::new(Fq::ZERO, b, x.c, x.d))
        } else {
            let beta = ctx.div(x.b, x.d);
            (beta, Gl2::diag(x.a, x.d))
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn group(&self) -> &[Gl2] {
        &self.group
    }

    fn phase(&self, e: u32) -> Complex64 {
        root_of_unity(self.p, e as i64).value
    }

    pub fn matrix(&self, h: &Gl2) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for (j, &(i, e)) in self.action[h.index(self.q)].iter().enumerate() {
            m[(j, i)] = self.phase(e);
        }
        m
    }

    pub fn character(&self, h: &Gl2) -> Complex64 {
        self.action[h.index(self.q)]
            .iter()
            .enumerate()
            .filter(|(j, (i, _))| j == i)
            .map(|(_, &(_, e))| self.phase(e))
            .sum()
    }

    /// `(d/|G|) sum conj(chi(g)) gg(g)`.
    fn projector(&self, chi: impl Fn(&Gl2) -> Complex64, d: usize) -> CMat {
        let n = self.dim();
        let mut p = CMat::zeros(n, n);
        for g in &self.group {
            let c = chi(g).conj();
            if c.norm() < 1e-14 {
                continue;
            }
            for (j, &(i, e)) in self.action[g.index(self.q)].iter().enumerate() {
                p[(j, i)] += c * self.phase(e);
            }
        }
        p * Complex64::new(d as f64 / self.group.len() as f64, 0.0)
    }

    /// Explicit model of `rho_theta`.
    pub fn project_cuspidal(
        &self,
        ctx: &FqCtx,
        classes: &Gl2Classifier,
        theta: &CuspidalLabel,
    ) -> Result<Gl2Rep, ModelError> {
        let d = (self.q - 1) as usize;
        let p = self.projector(|g| cuspidal_char(ctx, classes, theta, g).value, d);
        let v = column_basis(&p, 1e-6);
        if v.ncols() != d {
            return Err(ModelError::ProjectorRankMismatch { expected: d, found: v.ncols() });
        }
        let vh = v.adjoint();
        let mut mats = vec![None; self.slot.len()];
        for g in &self.group {
            let mut gv = CMat::zeros(self.dim(), d);
            for (j, &(i, e)) in self.action[g.index(self.q)].iter().enumerate() {
                let ph = self.phase(e);
                for c in 0..d {
                    gv[(j, c)] = ph * v[(i, c)];
                }
            }
            mats[g.index(self.q)] = Some(&vh * gv);
        }
        Ok(Gl2Rep { q: self.q, dim: d, mats })
    }
}

/// A representation of `GL_2(q)` tabulated on every element.
#[derive(Debug, Clone)]
pub struct Gl2Rep {
    q: u32,
    pub dim: usize,
    mats: Vec<Option<CMat>>,
}

impl Gl2Rep {
    pub fn matrix(&self, g: &Gl2) -> &CMat {
        self.mats[g.index(self.q)].as_ref().expect("matrix is invertible")
    }

    pub fn character(&self, g: &Gl2) -> Complex64 {
        trace(self.matrix(g))
    }

    /// `(lambda o det) rho` with `lambda(g1) = zeta_{q-1}^l`.
    pub fn twist(&self, ctx: &FqCtx, l: i64) -> Gl2Rep {
        let mut mats = self.mats.clone();
        for g in ctx.enumerate_gl2() {
            let e = ctx.gl2_det(&g).log().expect("unit") as i64;
            let s = root_of_unity(ctx.q() - 1, l * e).value;
            if let Some(m) = mats[g.index(self.q)].as_mut() {
                *m *= s;
            }
        }
        Gl2Rep { mats, ..self.clone() }
    }
}

#[derive(Debug, Clone)]
enum Gl22Kind {
    Tensor(Arc<Gl2Rep>, Arc<Gl2Rep>),
    Sub { parent: Arc<Gl22Rep>, basis: CMat },
}

/// A representation of `GL_{2,2}(q)`, evaluated on demand.
#[derive(Debug, Clone)]
pub struct Gl22Rep {
    pub dim: usize,
    kind: Gl22Kind,
}

impl Gl22Rep {
    pub fn matrix(&self, x: &Gl22) -> CMat {
        match &self.kind {
            Gl22Kind::Tensor(a, b) => a.matrix(&x.first).kronecker(b.matrix(&x.second)),
            Gl22Kind::Sub { parent, basis } => basis.adjoint() * parent.matrix(x) * basis,
        }
    }

    pub fn character(&self, x: &Gl22) -> Complex64 {
        trace(&self.matrix(x))
    }

    /// The subrepresentation on the span of an orthonormal `basis`.
    pub fn subspace(self: &Arc<Self>, basis: CMat) -> Gl22Rep {
        Gl22Rep { dim: basis.ncols(), kind: Gl22Kind::Sub { parent: self.clone(), basis } }
    }

    /// `(1/|R|) sum_r rep(r)`.
    pub fn averaging_projector(&self, r: &SubgroupR) -> CMat {
        let mut p = CMat::zeros(self.dim, self.dim);
        for x in r.elements() {
            p += self.matrix(x);
        }
        p / Complex64::new(r.len() as f64, 0.0)
    }
}

/// `[rho_1 x rho_2]`: the Kronecker product on pairs with equal determinant.
pub fn restrict_tensor(r1: Arc<Gl2Rep>, r2: Arc<Gl2Rep>) -> Gl22Rep {
    Gl22Rep { dim: r1.dim * r2.dim, kind: Gl22Kind::Tensor(r1, r2) }
}

/// Generators of `GL_{2,2}(q)`: elementary unipotents in each factor plus one
/// diagonal element of each determinant class.
pub fn gl22_generators(ctx: &FqCtx) -> Vec<Gl22> {
    let mut out = Vec::new();
    for i in 0..ctx.f() {
        let e = ctx.gen_pow(i as i64);
        let x = Gl2::new(Fq::ONE, e, Fq::ZERO, Fq::ONE);
        let y = Gl2::lower(Fq::ONE, e);
        out.push(Gl22::new(x, Gl2::IDENTITY));
        out.push(Gl22::new(y, Gl2::IDENTITY));
        out.push(Gl22::new(Gl2::IDENTITY, x));
        out.push(Gl22::new(Gl2::IDENTITY, y));
    }
    let d = Gl2::diag(ctx.gen_pow(1), Fq::ONE);
    out.push(Gl22::new(d, d));
    out
}

/// Null space of the map `T -> (T A_k - B_k T)_k` as matrices.
fn intertwiner_space(pairs: &[(CMat, CMat)], dim_in: usize, dim_out: usize) -> Vec<CMat> {
    let n = dim_in * dim_out;
    let mut h = CMat::zeros(n, n);
    let id_out = CMat::identity(dim_out, dim_out);
    let id_in = CMat::identity(dim_in, dim_in);
    for (a, b) in pairs {
        // vec(T A) = (A^T (x) I) vec T, vec(B T) = (I (x) B) vec T
        let m = a.transpose().kronecker(&id_out) - id_in.kronecker(b);
        h += m.adjoint() * &m;
    }
    let eig = SymmetricEigen::new(h);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let mut out = Vec::new();
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev.abs() < NULL_TOL * scale {
            let v = eig.eigenvectors.column(k);
            out.push(CMat::from_column_slice(dim_out, dim_in, v.as_slice()));
        }
    }
    out
}

/// Basis of the commutant algebra of `rep`.
pub fn commutant(ctx: &FqCtx, rep: &Gl22Rep) -> Vec<CMat> {
    let pairs: Vec<(CMat, CMat)> = gl22_generators(ctx)
        .iter()
        .map(|g| {
            let m = rep.matrix(g);
            (m.clone(), m)
        })
        .collect();
    intertwiner_space(&pairs, rep.dim, rep.dim)
}

/// Isotypic projectors of `rep`, from the spectrum of a random Hermitian
/// element of its commutant.
pub fn decompose(ctx: &FqCtx, rep: &Gl22Rep, seed: u64) -> Vec<CMat> {
    let basis = commutant(ctx, rep);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = CMat::zeros(rep.dim, rep.dim);
    for b in &basis {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        h += (b * c) + (b * c).adjoint();
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..rep.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in order {
        match clusters.last_mut() {
            Some(c) if (eig.eigenvalues[k] - eig.eigenvalues[*c.last().unwrap()]).abs() < 1e-6 => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    clusters
        .into_iter()
        .map(|c| {
            let mut p = CMat::zeros(rep.dim, rep.dim);
            for k in c {
                let v = eig.eigenvectors.column(k);
                p += v * v.adjoint();
            }
            p
        })
        .collect()
}

/// The two isotypic projectors of `rho` restricted to `SL_2(q)`. Tensor
/// products of these, summed over matching or opposite halves, give the
/// constituents of a split restriction without a full commutant computation.
fn sl2_projectors(ctx: &FqCtx, rho: &Gl2Rep, seed: u64) -> Result<(CMat, CMat), ModelError> {
    let mut pairs = Vec::new();
    for i in 0..ctx.f() {
        let e = ctx.gen_pow(i as i64);
        for g in [Gl2::new(Fq::ONE, e, Fq::ZERO, Fq::ONE), Gl2::lower(Fq::ONE, e)] {
            let m = rho.matrix(&g).clone();
            pairs.push((m.clone(), m));
        }
    }
    let basis = intertwiner_space(&pairs, rho.dim, rho.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = CMat::zeros(rho.dim, rho.dim);
    for b in &basis {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        h += (b * c) + (b * c).adjoint();
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..rho.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let half = rho.dim / 2;
    if basis.len() != 2 || (eig.eigenvalues[order[half]] - eig.eigenvalues[order[half - 1]]).abs() < 1e-6 {
        return Err(ModelError::ProjectorRankMismatch { expected: half, found: rho.dim });
    }
    let proj = |ks: &[usize]| {
        let mut p = CMat::zeros(rho.dim, rho.dim);
        for &k in ks {
            let v = eig.eigenvectors.column(k);
            p += v * v.adjoint();
        }
        p
    };
    Ok((proj(&order[..half]), proj(&order[half..])))
}

fn certify_rank(v: Complex64) -> Result<u32, ModelError> {
    let d = certify_complex(v, 1e-7)?;
    u32::try_from(d).map_err(|_| ModelError::Numerics(NumericsError::NotAnInteger { re: v.re, im: v.im, tol: 1e-7 }))
}

/// `dim rep^R` as the trace of the averaging projector.
pub fn fixed_rank(rep: &Gl22Rep, r: &SubgroupR) -> Result<u32, ModelError> {
    certify_rank(trace(&rep.averaging_projector(r)))
}

/// A normalised intertwiner `T rep(x) = rep(u_action(x)) T` with `T^2 = I`.
#[derive(Debug, Clone)]
pub struct Intertwiner {
    pub matrix: CMat,
}

impl Intertwiner {
    pub fn negate(&self) -> Intertwiner {
        Intertwiner { matrix: -self.matrix.clone() }
    }

    /// Picks the sign: `+1` has positive trace on the torus-fixed space
    /// (then positive trace, then a positive leading entry, as tie-breaks).
    pub fn with_sign(&self, rep: &Gl22Rep, torus: &SubgroupR, sign: i32) -> Intertwiner {
        let t = &self.matrix;
        let on_torus = trace(&(t * rep.averaging_projector(torus))).re;
        let positive = if on_torus.abs() > 1e-6 {
            on_torus > 0.0
        } else if trace(t).re.abs() > 1e-6 {
            trace(t).re > 0.0
        } else {
            let lead = t.iter().find(|z| z.norm() > 1e-6).copied().unwrap_or(czero());
            if lead.re.abs() > 1e-6 {
                lead.re > 0.0
            } else {
                lead.im > 0.0
            }
        };
        if positive == (sign > 0) {
            self.clone()
        } else {
            self.negate()
        }
    }
}

pub fn u_intertwiner(ctx: &FqCtx, rep: &Gl22Rep) -> Result<Intertwiner, ModelError> {
    let pairs: Vec<(CMat, CMat)> =
        gl22_generators(ctx).iter().map(|g| (rep.matrix(g), rep.matrix(&ctx.u_action(g)))).collect();
    let space = intertwiner_space(&pairs, rep.dim, rep.dim);
    if space.len() != 1 {
        return Err(ModelError::NoIntertwiner);
    }
    let t = &space[0];
    let sq = t * t;
    let c = sq[(0, 0)];
    if c.norm() < 1e-9 || (&sq - CMat::identity(rep.dim, rep.dim) * c).norm() > 1e-6 * c.norm() {
        return Err(ModelError::NoIntertwiner);
    }
    Ok(Intertwiner { matrix: t / c.sqrt() })
}

/// `trace(O P_R)` for `O` preserving the `R`-fixed space.
pub fn twisted_trace(rep: &Gl22Rep, op: &CMat, r: &SubgroupR) -> Result<i64, ModelError> {
    let p = rep.averaging_projector(r);
    let moved = op * &p;
    if (&p * &moved - &moved).norm() > 1e-7 {
        return Err(ModelError::NotNormalizing);
    }
    Ok(certify_complex(trace(&moved), DEFAULT_TOL.max(1e-8))?)
}

/// `swap(v1 (x) v2) = v2 (x) v1` on `V (x) V`.
pub fn swap_matrix(d: usize) -> CMat {
    let mut s = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, j * d + i)] = Complex64::new(1.0, 0.0);
        }
    }
    s
}

/// `sigma = [lambda rho x rho]` built on one model of `rho`, with the swap
/// and `sigma(w, w)`.
pub struct LambdaRhoModel {
    pub rep: Gl22Rep,
    pub swap: CMat,
    pub ww: CMat,
}

impl LambdaRhoModel {
    /// `swap * sigma(w, w)`, an intertwiner with the `u`-twist squaring to `I`.
    pub fn swap_ww(&self) -> CMat {
        &self.swap * &self.ww
    }
}

/// Model of the induced representation `tau = diag(sigma, sigma o u_action)`
/// with `tau(u) = [[0, I], [I, 0]]`.
pub struct InducedModel<'a> {
    pub sigma: &'a Gl22Rep,
}

impl InducedModel<'_> {
    pub fn dim(&self) -> usize {
        2 * self.sigma.dim
    }

    pub fn base_matrix(&self, ctx: &FqCtx, x: &Gl22) -> CMat {
        let d = self.sigma.dim;
        let mut m = CMat::zeros(2 * d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&self.sigma.matrix(x));
        m.view_mut((d, d), (d, d)).copy_from(&self.sigma.matrix(&ctx.u_action(x)));
        m
    }

    pub fn matrix(&self, ctx: &FqCtx, s: &ExtElem) -> CMat {
        let b = self.base_matrix(ctx, &s.base);
        if !s.eps {
            return b;
        }
        let d = self.sigma.dim;
        let mut u = CMat::zeros(2 * d, 2 * d);
        for i in 0..d {
            u[(i, d + i)] = Complex64::new(1.0, 0.0);
            u[(d + i, i)] = Complex64::new(1.0, 0.0);
        }
        u * b
    }

    /// `trace(tau(s))` on `tau^R`.
    pub fn twisted_trace(&self, ctx: &FqCtx, s: &ExtElem, r: &SubgroupR) -> Result<i64, ModelError> {
        let n = self.dim();
        let mut p = CMat::zeros(n, n);
        for x in r.elements() {
            p += self.base_matrix(ctx, x);
        }
        p /= Complex64::new(r.len() as f64, 0.0);
        let moved = self.matrix(ctx, s) * &p;
        if (&p * &moved - &moved).norm() > 1e-7 {
            return Err(ModelError::NotNormalizing);
        }
        Ok(certify_complex(trace(&moved), 1e-8)?)
    }
}

struct SplitPair {
    full: Arc<Gl22Rep>,
    plus: Arc<Gl22Rep>,
    minus: Arc<Gl22Rep>,
    plus_proj: CMat,
    minus_proj: CMat,
}

/// Builds and caches explicit models; answers constituent characters.
pub struct ModelOracle {
    pub ctx: FqCtx,
    pub classes: Gl2Classifier,
    pub seed: u64,
    gg: GelfandGraev,
    cuspidals: Mutex<HashMap<CuspidalLabel, Arc<Gl2Rep>>>,
    splits: Mutex<HashMap<(CuspidalLabel, CuspidalLabel), Arc<SplitPair>>>,
}

impl ModelOracle {
    pub fn new(ctx: &FqCtx, seed: u64) -> Result<ModelOracle, ModelError> {
        Ok(ModelOracle {
            ctx: ctx.clone(),
            classes: Gl2Classifier::new(ctx),
            seed,
            gg: GelfandGraev::new(ctx)?,
            cuspidals: Mutex::new(HashMap::new()),
            splits: Mutex::new(HashMap::new()),
        })
    }

    pub fn gelfand_graev(&self) -> &GelfandGraev {
        &self.gg
    }

    pub fn cuspidal(&self, theta: &CuspidalLabel) -> Result<Arc<Gl2Rep>, ModelError> {
        let key = theta.canonical(&self.ctx);
        if let Some(r) = self.cuspidals.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let r = Arc::new(self.gg.project_cuspidal(&self.ctx, &self.classes, &key)?);
        self.cuspidals.lock().unwrap().insert(key, r.clone());
        Ok(r)
    }

    pub fn full_rep(&self, sigma: &SigmaLabel) -> Result<Gl22Rep, ModelError> {
        Ok(restrict_tensor(self.cuspidal(&sigma.theta1)?, self.cuspidal(&sigma.theta2)?))
    }

    fn split_pair(&self, sigma: &SigmaLabel) -> Result<Arc<SplitPair>, ModelError> {
        let key = (sigma.theta1.canonical(&self.ctx), sigma.theta2.canonical(&self.ctx));
        if let Some(s) = self.splits.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let full = Arc::new(self.full_rep(sigma)?);
        let half = full.dim / 2;
        let (r1, r2) = (self.cuspidal(&sigma.theta1)?, self.cuspidal(&sigma.theta2)?);
        let (a1, b1) = sl2_projectors(&self.ctx, &r1, self.seed)?;
        let (a2, b2) = sl2_projectors(&self.ctx, &r2, self.seed)?;
        let projs = [a1.kronecker(&a2) + b1.kronecker(&b2), a1.kronecker(&b2) + b1.kronecker(&a2)];
        let n = Gl2::lower(Fq::ONE, Fq::ONE);
        let nn = full.matrix(&Gl22::new(n, n));
        let q = self.ctx.q() as f64;
        let eps = if ((self.ctx.q() - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let plus_value = (1.0 + eps * q) / 2.0;
        let (pp, pm) = if (trace(&(&projs[0] * &nn)).re - plus_value).abs() < 1e-6 {
            (projs[0].clone(), projs[1].clone())
        } else {
            (projs[1].clone(), projs[0].clone())
        };
        let plus = Arc::new(full.subspace(column_basis(&pp, 1e-6)));
        let minus = Arc::new(full.subspace(column_basis(&pm, 1e-6)));
        if plus.dim != half || minus.dim != half {
            return Err(ModelError::ProjectorRankMismatch { expected: half, found: plus.dim });
        }
        let s = Arc::new(SplitPair { full, plus, minus, plus_proj: pp, minus_proj: pm });
        self.splits.lock().unwrap().insert(key, s.clone());
        Ok(s)
    }

    /// `(P_plus, P_minus)` inside the full tensor model.
    pub fn split_projectors(&self, sigma: &SigmaLabel) -> Result<(CMat, CMat, Arc<Gl22Rep>), ModelError> {
        let s = self.split_pair(sigma)?;
        Ok((s.plus_proj.clone(), s.minus_proj.clone(), s.full.clone()))
    }

    /// Explicit model of `sigma`.
    pub fn sigma_rep(&self, sigma: &SigmaLabel) -> Result<Arc<Gl22Rep>, ModelError> {
        match sigma.constituent {
            Constituent::Full => Ok(Arc::new(self.full_rep(sigma)?)),
            Constituent::Plus => Ok(self.split_pair(sigma)?.plus.clone()),
            Constituent::Minus => Ok(self.split_pair(sigma)?.minus.clone()),
        }
    }

    /// `[lambda rho x rho]` on a single model of `rho = rho_{theta_2}`.
    pub fn lambda_rho(&self, sigma: &SigmaLabel) -> Result<LambdaRhoModel, ModelError> {
        let l = lambda_exponent(&self.ctx, sigma)
            .ok_or_else(|| CharsError::HypothesisViolated("sigma is not of the form [lambda rho x rho]".into()))?;
        let rho = self.cuspidal(&sigma.theta2)?;
        let first = Arc::new(rho.twist(&self.ctx, l as i64));
        let rep = restrict_tensor(first, rho.clone());
        let w = self.ctx.w();
        let ww = rep.matrix(&Gl22::new(w, w));
        Ok(LambdaRhoModel { swap: swap_matrix(rho.dim), ww, rep })
    }
}

impl ConstituentOracle for ModelOracle {
    fn constituent_char(&self, sigma: &SigmaLabel, x: &Gl22) -> Result<Complex64, CharsError> {
        let rep = self.sigma_rep(sigma).map_err(|e| match e {
            ModelError::Chars(c) => c,
            other => CharsError::HypothesisViolated(other.to_string()),
        })?;
        Ok(rep.character(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::{all_cuspidal_labels, all_sigma_labels, split_restriction};
    use crate::finitegrp::{subgroup_r, SubgroupKind};

    fn oracle(p: u32) -> ModelOracle {
        ModelOracle::new(&FqCtx::new(p, 1).unwrap(), 0).unwrap()
    }

    #[test]
    fn gelfand_graev_dims_and_multiplicity_one() {
        for (p, f, dim) in [(2, 1, 3), (3, 1, 16), (2, 2, 45), (5, 1, 96)] {
            let c = FqCtx::new(p, f).unwrap();
            let cl = Gl2Classifier::new(&c);
            let gg = GelfandGraev::new(&c).unwrap();
            assert_eq!(gg.dim(), dim);
            for t in all_cuspidal_labels(&c) {
                let ip: Complex64 =
                    gg.group().iter().map(|g| gg.character(g) * cuspidal_char(&c, &cl, &t, g).value.conj()).sum();
                assert_eq!(certify_complex(ip / gg.group().len() as f64, 1e-9), Ok(1));
            }
        }
        assert!(matches!(GelfandGraev::new(&FqCtx::new(2, 3).unwrap()), Err(ModelError::TooLarge { q: 8 })));
    }

    #[test]
    fn cuspidal_models_are_homomorphisms_with_right_character() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let c = FqCtx::new(p, f).unwrap();
            let o = ModelOracle::new(&c, 0).unwrap();
            let g = c.enumerate_gl2();
            for t in all_cuspidal_labels(&c) {
                let r = o.cuspidal(&t).unwrap();
                assert_eq!(r.dim, c.q() as usize - 1);
                for x in &g {
                    let want = cuspidal_char(&c, &o.classes, &t, x).value;
                    assert!((r.character(x) - want).norm() < 1e-9);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(1);
                for _ in 0..200 {
                    let a = g[rng.gen_range(0..g.len())];
                    let b = g[rng.gen_range(0..g.len())];
                    let lhs = r.matrix(&c.gl2_mul(&a, &b));
                    let rhs = r.matrix(&a) * r.matrix(&b);
                    assert!((lhs - rhs).camax() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn q3_unipotent_trace() {
        let o = oracle(3);
        let t = all_cuspidal_labels(&o.ctx)[0];
        let r = o.cuspidal(&t).unwrap();
        assert_eq!(r.dim, 2);
        let n = Gl2::lower(Fq::ONE, Fq::ONE);
        assert_eq!(certify_complex(r.character(&n), 1e-9), Ok(-1));
    }

    #[test]
    fn decompositions() {
        let o = oracle(3);
        for s in all_sigma_labels(&o.ctx).into_iter().map(|s| s.full()) {
            let rep = o.full_rep(&s).unwrap();
            let projs = decompose(&o.ctx, &rep, 0);
            let split = split_restriction(&o.ctx, &s.theta1) && split_restriction(&o.ctx, &s.theta2);
            if split {
                assert_eq!(projs.len(), 2);
                assert!(projs.iter().all(|p| (trace(p).re - 2.0).abs() < 1e-8));
                // (diag(x, 1), 1) lies outside GL_{2,2}; elements inside commute with both projectors
                let x = Gl2::diag(o.ctx.gen_pow(1), Fq::ONE);
                let r1 = o.cuspidal(&s.theta1).unwrap();
                let m = r1.matrix(&x).kronecker(&CMat::identity(2, 2));
                let moved = &m * &projs[0] * m.adjoint();
                assert!((moved - &projs[1]).camax() < 1e-8);
                let inside = rep.matrix(&Gl22::new(x, x));
                assert!((&inside * &projs[0] * inside.adjoint() - &projs[0]).camax() < 1e-8);
            } else {
                assert_eq!(projs.len(), 1);
                assert!((trace(&projs[0]).re - 4.0).abs() < 1e-8);
            }
            for p in &projs {
                for g in gl22_generators(&o.ctx) {
                    let m = rep.matrix(&g);
                    assert!((&m * p - p * &m).camax() < 1e-8);
                }
            }
        }
        let o2 = oracle(2);
        let s = all_sigma_labels(&o2.ctx)[0];
        assert_eq!(decompose(&o2.ctx, &o2.full_rep(&s).unwrap(), 0).len(), 1);
    }

    #[test]
    fn fixed_ranks_examples() {
        let o2 = oracle(2);
        let s = all_sigma_labels(&o2.ctx)[0];
        let rep = o2.full_rep(&s).unwrap();
        assert_eq!(fixed_rank(&rep, &subgroup_r(&o2.ctx, SubgroupKind::U1).unwrap()), Ok(0));
        let c4 = FqCtx::new(2, 2).unwrap();
        let o4 = ModelOracle::new(&c4, 0).unwrap();
        for s in all_sigma_labels(&c4) {
            let rep = o4.full_rep(&s).unwrap();
            assert_eq!(fixed_rank(&rep, &subgroup_r(&c4, SubgroupKind::ArtinUnip).unwrap()), Ok(1));
        }
    }

    #[test]
    fn intertwiners() {
        let o2 = oracle(2);
        let s = all_sigma_labels(&o2.ctx)[0];
        let rep = o2.full_rep(&s).unwrap();
        let t = u_intertwiner(&o2.ctx, &rep).unwrap();
        assert!((&t.matrix * &t.matrix - CMat::identity(1, 1)).camax() < 1e-9);
        let o3 = oracle(3);
        for s in all_sigma_labels(&o3.ctx).into_iter().filter(|s| s.constituent == Constituent::Full) {
            let rep = o3.full_rep(&s).unwrap();
            let twisted = crate::chars::is_self_twisted_label(&o3.ctx, &s);
            match u_intertwiner(&o3.ctx, &rep) {
                Ok(t) => {
                    assert!(twisted);
                    for g in gl22_generators(&o3.ctx) {
                        let lhs = &t.matrix * rep.matrix(&g);
                        let rhs = rep.matrix(&o3.ctx.u_action(&g)) * &t.matrix;
                        assert!((lhs - rhs).camax() < 1e-8);
                    }
                }
                Err(e) => {
                    assert!(!twisted);
                    assert_eq!(e, ModelError::NoIntertwiner);
                }
            }
        }
    }

    #[test]
    fn swap_ww_is_a_u_intertwiner() {
        for p in [2, 3, 5] {
            let o = oracle(p);
            for s in all_sigma_labels(&o.ctx) {
                if s.constituent != Constituent::Full || lambda_exponent(&o.ctx, &s).is_none() {
                    continue;
                }
                let m = o.lambda_rho(&s).unwrap();
                let t = m.swap_ww();
                let d = m.rep.dim;
                if s.central_trivial(&o.ctx) {
                    assert!((&t * &t - CMat::identity(d, d)).camax() < 1e-9);
                }
                for g in gl22_generators(&o.ctx) {
                    let lhs = &t * m.rep.matrix(&g);
                    let rhs = m.rep.matrix(&o.ctx.u_action(&g)) * &t;
                    assert!((lhs - rhs).camax() < 1e-8);
                }
            }
        }
    }
}
