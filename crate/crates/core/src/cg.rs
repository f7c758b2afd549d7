//! Clebsch–Gordan operators for tensor products of weight modules and the
//! spectral decomposition of the central element T on a tensor product.

use crate::reps::{build_rep, classical_shadow, mul2, tensor_rep, RepError, WeightModuleSpec};
use crate::scalars::{eigenvalues, C64, RootContext};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CgError {
    #[error("pole hit: z - x q^(2i) vanishes at i = {0}")]
    PoleHit(usize),
    #[error("periodicity precondition x^N + y^N = z^N violated (deviation {0:.3e})")]
    PeriodicityViolated(f64),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("eigenvalue clusters closer than resolution; clustering ambiguous")]
    ClusteringAmbiguous,
    #[error(transparent)]
    Rep(#[from] RepError),
}

fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

/// `w(x, y, z | k) = prod_{i=0}^{k} y / (z - x q^{2i})`, with the exponent
/// reduced to its representative in `{0, ..., N-1}`.  The product is
/// N-periodic in `k` exactly when `x^N + y^N = z^N`, which is checked up to
/// a relative tolerance.
pub fn w_coeff(ctx: &RootContext, x: C64, y: C64, z: C64, k: i64) -> Result<C64, CgError> {
    let nn = ctx.n as i64;
    let xn = x.powu(ctx.n);
    let yn = y.powu(ctx.n);
    let zn = z.powu(ctx.n);
    let scale = xn.norm().max(yn.norm()).max(zn.norm()).max(1.0);
    let dev = (xn + yn - zn).norm() / scale;
    if dev > 1e-6 {
        return Err(CgError::PeriodicityViolated(dev));
    }
    let kk = k.rem_euclid(nn) as usize;
    let mut w = cone();
    for i in 0..=kk {
        let den = z - x * ctx.q_int_pow(2 * i as i64);
        if den.norm() <= ctx.eps * (z.norm() + x.norm() + 1.0) {
            return Err(CgError::PoleHit(i));
        }
        w *= y / den;
    }
    Ok(w)
}

/// Parameters of the cyclic-by-cyclic Clebsch–Gordan operator: the chosen
/// N-th roots of b1, b2 and b = b1 + b2 μ1^{2N}, the branch index α, and the
/// derived target parameter a_α and central value t_α.  The t_α are the
/// eigenvalues of the central element T on the tensor product and a_α is the
/// corner parameter of the corresponding cyclic summand, recovered from
/// t_α = −(qλμ⁻¹ + q⁻¹μλ⁻¹) − (q−q⁻¹)²(λ₁μ₁λ₂μ₂)⁻¹·b·a_α for λ = λ₁λ₂,
/// μ = μ₁μ₂.
#[derive(Debug, Clone)]
pub struct CGParameters {
    pub b1: C64,
    pub b2: C64,
    pub b: C64,
    pub bt1: C64,
    pub bt2: C64,
    pub bt: C64,
    pub alpha: u32,
    pub a_alpha: C64,
    pub t_alpha: C64,
}

impl CGParameters {
    /// Principal N-th roots for all three radicals; a_α and t_α are filled
    /// in by `cg_operator`.
    pub fn new(
        ctx: &RootContext,
        v1: &WeightModuleSpec,
        v2: &WeightModuleSpec,
        alpha: u32,
    ) -> Result<Self, CgError> {
        Self::with_roots(ctx, v1, v2, alpha, 0, 0, 0)
    }

    /// Like `new`, but with explicit N-th-root branch indices for
    /// (b1, b2, b).  The decomposition itself is root-choice independent;
    /// the roots are only bookkeeping for the coefficient normalizations.
    pub fn with_roots(
        ctx: &RootContext,
        v1: &WeightModuleSpec,
        v2: &WeightModuleSpec,
        alpha: u32,
        root1: u32,
        root2: u32,
        root: u32,
    ) -> Result<Self, CgError> {
        let (_l1, m1, _a1, b1) = cyclic_params(v1)?;
        let (_l2, _m2, _a2, b2) = cyclic_params(v2)?;
        let b = b1 + b2 * m1.powu(2 * ctx.n);
        if b1.norm() == 0.0 || b2.norm() == 0.0 {
            return Err(CgError::DegenerateParameters("b1, b2 must be nonzero".into()));
        }
        if b.norm() <= ctx.eps * (b1.norm() + b2.norm()) {
            return Err(CgError::DegenerateParameters(
                "b = b1 + b2 mu1^{2N} vanishes".into(),
            ));
        }
        let bt1 = ctx.nth_root(b1, root1);
        let bt2 = ctx.nth_root(b2, root2);
        let bt = ctx.nth_root(b, root);
        Ok(CGParameters {
            b1,
            b2,
            b,
            bt1,
            bt2,
            bt,
            alpha: alpha % ctx.n,
            a_alpha: C64::new(0.0, 0.0),
            t_alpha: C64::new(0.0, 0.0),
        })
    }
}

fn cyclic_params(spec: &WeightModuleSpec) -> Result<(C64, C64, C64, C64), CgError> {
    match spec {
        WeightModuleSpec::Cyclic { lambda, mu, a, b } => Ok((*lambda, *mu, *a, *b)),
        _ => Err(CgError::DegenerateParameters(
            "expected a cyclic module spec".into(),
        )),
    }
}

fn semi_params(spec: &WeightModuleSpec) -> Result<(C64, C64, C64), CgError> {
    match spec {
        WeightModuleSpec::Semi { lambda, mu, c } => Ok((*lambda, *mu, *c)),
        _ => Err(CgError::DegenerateParameters(
            "expected a semi-cyclic module spec".into(),
        )),
    }
}

fn target_weights(v1: &WeightModuleSpec, v2: &WeightModuleSpec) -> (C64, C64) {
    let get = |s: &WeightModuleSpec| match s {
        WeightModuleSpec::Cyclic { lambda, mu, .. } => (*lambda, *mu),
        WeightModuleSpec::Semi { lambda, mu, .. } => (*lambda, *mu),
        WeightModuleSpec::Diag { .. } => unreachable!(),
    };
    let (l1, m1) = get(v1);
    let (l2, m2) = get(v2);
    (l1 * l2, m1 * m2)
}

/// One Clebsch–Gordan embedding K_α : target module → V1 ⊗ V2.
#[derive(Debug, Clone)]
pub struct CgOperator {
    /// N² × N matrix, columns indexed by the target basis v_k.
    pub matrix: DMatrix<C64>,
    pub target: WeightModuleSpec,
    pub t_alpha: C64,
}

/// Restriction of a square matrix to the rows/columns given by `idx`.
fn restrict(m: &DMatrix<C64>, idx: &[usize]) -> DMatrix<C64> {
    let n = idx.len();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for (r, &ir) in idx.iter().enumerate() {
        for (c, &ic) in idx.iter().enumerate() {
            out[(r, c)] = m[(ir, ic)];
        }
    }
    out
}

/// Unit null vector of `m` (right singular vector of the smallest singular
/// value).
fn null_vector(m: &DMatrix<C64>) -> nalgebra::DVector<C64> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let row = vt.row(n - 1);
    nalgebra::DVector::from_iterator(n, (0..n).map(|c| row[c].conj()))
}

/// Eigenvalues of the central element T on the K-weight subspace of the
/// tensor product with weight offset `s` (pairs (i,j) with i+j ≡ s mod N),
/// sorted lexicographically by (re, im).  Errors if any two eigenvalues are
/// closer than the clustering resolution.
fn weight_space_t(
    ctx: &RootContext,
    tmat: &DMatrix<C64>,
    s: usize,
) -> Result<(Vec<usize>, DMatrix<C64>, Vec<C64>), CgError> {
    let nn = ctx.n as usize;
    let idx: Vec<usize> = (0..nn).map(|i| i * nn + (s + nn - i) % nn).collect();
    let tr = restrict(tmat, &idx);
    let mut evs = eigenvalues(&tr);
    evs.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let scale = tr.norm().max(1.0);
    for a in 0..evs.len() {
        for z in a + 1..evs.len() {
            if (evs[a] - evs[z]).norm() < 1e-8 * scale {
                return Err(CgError::DegenerateParameters(
                    "T-eigenvalues on a weight space collide; branches not separable".into(),
                ));
            }
        }
    }
    Ok((idx, tr, evs))
}

/// Clebsch–Gordan operator for a pair of cyclic modules: the branch with
/// index α embeds V(λ1λ2, μ1μ2, a_α, b) into V1 ⊗ V2.  Column 0 is the
/// T-eigenvector of eigenvalue t_α in the top K-weight space, the remaining
/// columns are its images under the coproduct of F, and a_α is recovered
/// from t_α; the branches are ordered by (re, im) of t_α.
pub fn cg_operator(
    ctx: &RootContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
    alpha: u32,
) -> Result<CgOperator, CgError> {
    cg_operator_with_roots(ctx, v1, v2, alpha, 0, 0, 0)
}

pub fn cg_operator_with_roots(
    ctx: &RootContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
    alpha: u32,
    root1: u32,
    root2: u32,
    root: u32,
) -> Result<CgOperator, CgError> {
    let mut p = CGParameters::with_roots(ctx, v1, v2, alpha, root1, root2, root)?;
    let (l1, m1, _a1, _b1) = cyclic_params(v1)?;
    let (l2, m2, _a2, _b2) = cyclic_params(v2)?;
    let nn = ctx.n as usize;
    let r1 = build_rep(ctx, v1)?;
    let r2 = build_rep(ctx, v2)?;
    let ten = tensor_rep(&r1, &r2);
    let tmat = ten.t_mat(ctx);
    let (idx, tr, evs) = weight_space_t(ctx, &tmat, 0)?;
    let t_alpha = evs[(alpha as usize) % nn];
    let seed_small = null_vector(&(&tr - DMatrix::identity(nn, nn) * t_alpha));
    let mut mat = DMatrix::<C64>::zeros(nn * nn, nn);
    for (r, &ir) in idx.iter().enumerate() {
        mat[(ir, 0)] = seed_small[r];
    }
    // v_k = F^k v_0 in the target; Δ(F)^N acts by the scalar b, so the wrap
    // relation F v_{N-1} = b v_0 is automatic.
    for k in 1..nn {
        let prev = mat.column(k - 1).clone_owned();
        let next = &ten.f * prev;
        mat.set_column(k, &next);
    }
    let (lam, mu) = target_weights(v1, v2);
    let q = ctx.q();
    let qq = q - 1.0 / q;
    let a_alpha =
        (-t_alpha - (q * lam / mu + mu / (lam * q))) / (qq * qq) * (l1 * m1 * l2 * m2) / p.b;
    p.a_alpha = a_alpha;
    p.t_alpha = t_alpha;
    let target = WeightModuleSpec::Cyclic {
        lambda: lam,
        mu,
        a: a_alpha,
        b: p.b,
    };
    Ok(CgOperator {
        matrix: mat,
        target,
        t_alpha,
    })
}

/// Clebsch–Gordan operator for a pair of semi-cyclic modules.  The image is
/// a copy of Ṽ(λ1λ2 q^α, μ1μ2 q^{−α}, c) with c = c2 + c1 λ2², and T acts on
/// it by t_α = −q^{2α−1}λ1λ2(μ1μ2)^{−1} − q^{1−2α}μ1μ2(λ1λ2)^{−1}.
pub fn cg_operator_semicyclic(
    ctx: &RootContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
    alpha: u32,
) -> Result<CgOperator, CgError> {
    cg_operator_semicyclic_with_roots(ctx, v1, v2, alpha, 0, 0, 0)
}

pub fn cg_operator_semicyclic_with_roots(
    ctx: &RootContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
    alpha: u32,
    _root1: u32,
    _root2: u32,
    _root: u32,
) -> Result<CgOperator, CgError> {
    let (l1, m1, c1) = semi_params(v1)?;
    let (l2, m2, c2) = semi_params(v2)?;
    // χ(E^N) on the tensor: Δ(E^N) = E^N ⊗ K^N + 1 ⊗ E^N acts by the
    // scalar c1·λ2^{2N} + c2, which is the E-wrap of the target.
    let c = c2 + c1 * l2.powu(2 * ctx.n);
    if c1.norm() == 0.0 || c2.norm() == 0.0 {
        return Err(CgError::DegenerateParameters("c1, c2 must be nonzero".into()));
    }
    if c.norm() <= ctx.eps * (c1.norm() + c2.norm()) {
        return Err(CgError::DegenerateParameters(
            "c = c2 + c1 lambda2^2 vanishes".into(),
        ));
    }
    let nn = ctx.n as usize;
    let r1 = build_rep(ctx, v1)?;
    let r2 = build_rep(ctx, v2)?;
    let ten = tensor_rep(&r1, &r2);
    let tmat = ten.t_mat(ctx);
    // Target w_0 sits in the K-weight space of offset α; the central value
    // on this branch is known in closed form.
    let q = ctx.q();
    let q2a = ctx.q_int_pow(2 * alpha as i64);
    let t_alpha = -q2a / q * (l1 * l2) / (m1 * m2) - q / q2a * (m1 * m2) / (l1 * l2);
    let (idx, tr, evs) = weight_space_t(ctx, &tmat, alpha as usize % nn)?;
    let scale = tr.norm().max(1.0);
    let nearest = evs
        .iter()
        .cloned()
        .min_by(|a, b| {
            (*a - t_alpha)
                .norm()
                .partial_cmp(&(*b - t_alpha).norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    if (nearest - t_alpha).norm() > 1e-7 * scale {
        return Err(CgError::DegenerateParameters(format!(
            "predicted central value {t_alpha:.6} not in the spectrum"
        )));
    }
    let seed_small = null_vector(&(&tr - DMatrix::identity(nn, nn) * nearest));
    let mut mat = DMatrix::<C64>::zeros(nn * nn, nn);
    for (r, &ir) in idx.iter().enumerate() {
        mat[(ir, 0)] = seed_small[r];
    }
    // w_k = E^k w_0 in the target; Δ(E)^N acts by the scalar c, so the wrap
    // relation E w_{N-1} = c w_0 is automatic.
    for k in 1..nn {
        let prev = mat.column(k - 1).clone_owned();
        let next = &ten.e * prev;
        mat.set_column(k, &next);
    }
    let target = WeightModuleSpec::Semi {
        lambda: l1 * l2 * ctx.q_int_pow(alpha as i64),
        mu: m1 * m2 * ctx.q_int_pow(-(alpha as i64)),
        c,
    };
    Ok(CgOperator {
        matrix: mat,
        target,
        t_alpha,
    })
}

/// One summand of the tensor decomposition: T-eigenvalue `t`, raw eigenvalue
/// count `count` on the tensor product, and module multiplicity
/// `m = count / N`.
#[derive(Debug, Clone)]
pub struct CgSummand {
    pub t: C64,
    pub count: usize,
    pub m: usize,
}

#[derive(Debug, Clone)]
pub struct CgDecomposition {
    pub summands: Vec<CgSummand>,
    /// Trace of φ of the product of the two classical shadows.
    pub tr_phi: C64,
}

impl CgDecomposition {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "t_values": self.summands.iter().map(|s| vec![s.t.re, s.t.im]).collect::<Vec<_>>(),
            "multiplicities": self.summands.iter().map(|s| s.m).collect::<Vec<_>>(),
        })
    }
}

/// Roots of T_N(X) − c, with multiplicity (a root is listed once): the
/// factorization T_N(X) − c = Π_{i ∈ Z/N} (X − q^i c0 − q^{−i} c0^{−1})
/// where c0^N + c0^{−N} = c.
pub fn chebyshev_fiber(ctx: &RootContext, c: C64) -> Vec<C64> {
    let disc = (c * c - 4.0 * cone()).sqrt();
    let u = (c + disc) / 2.0;
    let u = if u.norm() == 0.0 { (c - disc) / 2.0 } else { u };
    let c0 = ctx.principal_nth_root(u);
    (0..ctx.n as i64)
        .map(|i| ctx.q_int_pow(i) * c0 + ctx.q_int_pow(-i) / c0)
        .collect()
}

/// Decomposition of V1 ⊗ V2 by the spectrum of the central element T.
/// The eigenvalues are clustered and checked against the zero set of
/// T_N(X) − Tr φ(g1 g2), where g1, g2 are the classical shadows; each
/// cluster size must be N·m_t with m_t = 2 iff Tr φ = ±2 and t ≠ ±2.
pub fn cg_decompose(
    ctx: &RootContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
) -> Result<CgDecomposition, CgError> {
    if matches!(v1, WeightModuleSpec::Diag { .. }) || matches!(v2, WeightModuleSpec::Diag { .. }) {
        return Err(CgError::DegenerateParameters(
            "decomposition applies to the N-dimensional module families".into(),
        ));
    }
    let r1 = build_rep(ctx, v1)?;
    let r2 = build_rep(ctx, v2)?;
    let ten = tensor_rep(&r1, &r2);
    let tmat = ten.t_mat(ctx);

    let g1 = classical_shadow(ctx, &r1)?;
    let g2 = classical_shadow(ctx, &r2)?;
    let gm = mul2(&g1.gminus, &g2.gminus);
    let gp = mul2(&g1.gplus, &g2.gplus);
    let prod = crate::reps::CentralCharacter {
        gminus: gm,
        gplus: gp,
        t: None,
        hdel: g1.hdel * g2.hdel,
    };
    let tr_phi = prod.tr_phi();

    // Cluster the raw eigenvalues at absolute tolerance 1e-6 on the
    // normalized scale set by the matrix norm of T.
    let scale = tmat.norm().max(1.0);
    let tol = 1e-6 * scale;
    let evs = eigenvalues(&tmat);
    let mut centers: Vec<(C64, Vec<C64>)> = Vec::new();
    for ev in evs {
        match centers.iter_mut().find(|(c, _)| (*c - ev).norm() < tol) {
            Some((_, members)) => members.push(ev),
            None => centers.push((ev, vec![ev])),
        }
    }
    let mut summands: Vec<CgSummand> = centers
        .iter()
        .map(|(_, members)| {
            let sum: C64 = members.iter().sum();
            let t = sum / members.len() as f64;
            CgSummand {
                t,
                count: members.len(),
                m: 0,
            }
        })
        .collect();
    for a in 0..summands.len() {
        for b in a + 1..summands.len() {
            if (summands[a].t - summands[b].t).norm() < 10.0 * tol {
                return Err(CgError::ClusteringAmbiguous);
            }
        }
    }

    // Refine each cluster value through its spectral projector
    // P_i = ∏_{j≠i} (T − t_j)/(t_i − t_j), taking t_i ← tr(T P_i)/tr(P_i).
    // Raw eigenvalues of the nonnormal matrix of T are limited by the
    // conditioning of its eigenbasis; the projector trace is not.
    let dim = tmat.nrows();
    let id = DMatrix::<C64>::identity(dim, dim);
    for _ in 0..2 {
        let ts: Vec<C64> = summands.iter().map(|s| s.t).collect();
        for (i, s) in summands.iter_mut().enumerate() {
            let mut p = id.clone();
            for (j, tj) in ts.iter().enumerate() {
                if j != i {
                    p = &p * (&tmat - &id * *tj) / (ts[i] - tj);
                }
            }
            let trp = p.trace();
            if trp.norm() > 1e-8 * p.norm().max(1.0) {
                s.t = (&tmat * &p).trace() / trp;
            }
        }
    }

    // Match clusters against the predicted fiber and its multiplicities.
    let nn = ctx.n as usize;
    let fiber = chebyshev_fiber(ctx, tr_phi);
    let two = C64::new(2.0, 0.0);
    let trphi_pm2 = (tr_phi - two).norm() < 1e-6 || (tr_phi + two).norm() < 1e-6;
    for s in summands.iter_mut() {
        let best = fiber
            .iter()
            .map(|r| (*r - s.t).norm())
            .fold(f64::INFINITY, f64::min);
        if best > 1e-5 * scale {
            return Err(CgError::DegenerateParameters(format!(
                "T-eigenvalue cluster {:.6} off the predicted zero set by {:.3e}",
                s.t, best
            )));
        }
        if s.count % nn != 0 {
            return Err(CgError::DegenerateParameters(format!(
                "cluster size {} not a multiple of N",
                s.count
            )));
        }
        s.m = s.count / nn;
        let m_pred = if trphi_pm2 && (s.t - two).norm() > 1e-6 && (s.t + two).norm() > 1e-6 {
            2
        } else {
            1
        };
        if s.m != m_pred {
            return Err(CgError::DegenerateParameters(format!(
                "multiplicity {} at t = {:.6} contradicts predicted {}",
                s.m, s.t, m_pred
            )));
        }
    }
    summands.sort_by(|a, b| {
        (a.t.re, a.t.im)
            .partial_cmp(&(b.t.re, b.t.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(CgDecomposition { summands, tr_phi })
}

/// Residual of the intertwining property of a CG operator against all four
/// algebra generators, normalized by matrix scales.
pub fn cg_equivariance_residual(
    ctx: &RootContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
    op: &CgOperator,
) -> Result<f64, CgError> {
    let r1 = build_rep(ctx, v1)?;
    let r2 = build_rep(ctx, v2)?;
    let ten = tensor_rep(&r1, &r2);
    let tgt = build_rep(ctx, &op.target)?;
    let pairs = [
        (&ten.e, &tgt.e),
        (&ten.f, &tgt.f),
        (&ten.khalf, &tgt.khalf),
        (&ten.lhalf, &tgt.lhalf),
    ];
    let mut worst = 0.0f64;
    for (big, small) in pairs {
        let lhs = big * &op.matrix;
        let rhs = &op.matrix * small;
        let scale = lhs.norm().max(rhs.norm()).max(op.matrix.norm()).max(1.0);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

/// Stacked matrix [K_0 | K_1 | ... | K_{N-1}] over all branches.
pub fn stacked_cg(ops: &[CgOperator]) -> DMatrix<C64> {
    let rows = ops[0].matrix.nrows();
    let nn = ops[0].matrix.ncols();
    let mut out = DMatrix::<C64>::zeros(rows, nn * ops.len());
    for (a, op) in ops.iter().enumerate() {
        out.view_mut((0, a * nn), (rows, nn)).copy_from(&op.matrix);
    }
    out
}

pub fn numeric_rank(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    svd.singular_values
        .iter()
        .filter(|s| **s > rel_tol * smax.max(1.0))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::{sample_cyclic, sample_semi};
    use crate::scalars::chebyshev_t;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn admissible_xyz(ctx: &RootContext, rng: &mut StdRng) -> (C64, C64, C64) {
        let x = c(rng.gen_range(0.3..1.5), rng.gen_range(-1.0..1.0));
        let y = c(rng.gen_range(0.3..1.5), rng.gen_range(-1.0..1.0));
        let z = ctx.principal_nth_root(x.powu(ctx.n) + y.powu(ctx.n));
        (x, y, z)
    }

    #[test]
    fn w_recurrence_and_periodicity() {
        let mut rng = StdRng::seed_from_u64(41);
        for nn in [3u32, 5, 7] {
            let ctx = RootContext::new(nn, 1).unwrap();
            for _ in 0..10 {
                let (x, y, z) = admissible_xyz(&ctx, &mut rng);
                // single-factor base case
                let w0 = w_coeff(&ctx, x, y, z, 0).unwrap();
                assert!((w0 - y / (z - x)).norm() < 1e-12);
                // recurrence z w(k) = y w(k-1) + x q^{2k} w(k) for all k,
                // including the wrap k = 0 which uses w(-1) = w(N-1)
                for k in 0..nn as i64 {
                    let wk = w_coeff(&ctx, x, y, z, k).unwrap();
                    let wkm = w_coeff(&ctx, x, y, z, k - 1).unwrap();
                    let lhs = z * wk;
                    let rhs = y * wkm + x * ctx.q_int_pow(2 * k) * wk;
                    assert!(
                        (lhs - rhs).norm() < 1e-9 * (lhs.norm() + rhs.norm() + 1.0),
                        "recurrence fails at N={nn} k={k}"
                    );
                    // explicit periodicity
                    let wkp = w_coeff(&ctx, x, y, z, k + nn as i64).unwrap();
                    assert!((wk - wkp).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn w_rejects_inadmissible_triples() {
        let ctx = RootContext::new(5, 1).unwrap();
        let err = w_coeff(&ctx, c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0), 1);
        assert!(matches!(err, Err(CgError::PeriodicityViolated(_))));
    }

    #[test]
    fn cg_operator_equivariance_and_rank() {
        let mut rng = StdRng::seed_from_u64(42);
        for nn in [3u32, 5] {
            let ctx = RootContext::new(nn, 1).unwrap();
            for _ in 0..4 {
                let v1 = sample_cyclic(&ctx, &mut rng);
                let v2 = sample_cyclic(&ctx, &mut rng);
                let mut ops = Vec::new();
                let mut ts = Vec::new();
                for alpha in 0..nn {
                    let op = cg_operator(&ctx, &v1, &v2, alpha).unwrap();
                    let res = cg_equivariance_residual(&ctx, &v1, &v2, &op).unwrap();
                    assert!(res < 1e-8, "equivariance residual {res:.3e} at N={nn}");
                    // T acts on the image by t_alpha
                    let r1 = build_rep(&ctx, &v1).unwrap();
                    let r2 = build_rep(&ctx, &v2).unwrap();
                    let ten = tensor_rep(&r1, &r2);
                    let tmat = ten.t_mat(&ctx);
                    let col0 = op.matrix.column(0).clone_owned();
                    let dev = (&tmat * &col0 - col0.clone() * op.t_alpha).norm() / col0.norm();
                    assert!(dev < 1e-7, "T eigen-relation residual {dev:.3e}");
                    ts.push(op.t_alpha);
                    ops.push(op);
                }
                // pairwise distinct t_alpha for generic draws
                for a in 0..ts.len() {
                    for b in a + 1..ts.len() {
                        assert!((ts[a] - ts[b]).norm() > 1e-6);
                    }
                }
                // stacked operator has full rank N^2
                let stacked = stacked_cg(&ops);
                assert_eq!(numeric_rank(&stacked, 1e-8), (nn * nn) as usize);
            }
        }
    }

    #[test]
    fn cg_operator_semicyclic_equivariance() {
        let mut rng = StdRng::seed_from_u64(43);
        for nn in [3u32, 5] {
            let ctx = RootContext::new(nn, 1).unwrap();
            for _ in 0..4 {
                let v1 = sample_semi(&ctx, &mut rng);
                let v2 = sample_semi(&ctx, &mut rng);
                let mut ts = Vec::new();
                for alpha in 0..nn {
                    let op = cg_operator_semicyclic(&ctx, &v1, &v2, alpha).unwrap();
                    let res = cg_equivariance_residual(&ctx, &v1, &v2, &op).unwrap();
                    assert!(res < 1e-8, "semicyclic equivariance {res:.3e} at N={nn}");
                    ts.push(op.t_alpha);
                }
                for a in 0..ts.len() {
                    for b in a + 1..ts.len() {
                        assert!((ts[a] - ts[b]).norm() > 1e-6);
                    }
                }
                // alpha = 0 closed form
                let (l1, m1, _) = semi_params(&v1).unwrap();
                let (l2, m2, _) = semi_params(&v2).unwrap();
                let q = ctx.q();
                let expect = -(l1 * l2) / (m1 * m2) / q - q * (m1 * m2) / (l1 * l2);
                assert!((ts[0] - expect).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn decompose_generic_cyclic_pair() {
        let mut rng = StdRng::seed_from_u64(44);
        let ctx = RootContext::new(3, 1).unwrap();
        for _ in 0..5 {
            let v1 = sample_cyclic(&ctx, &mut rng);
            let v2 = sample_cyclic(&ctx, &mut rng);
            let dec = cg_decompose(&ctx, &v1, &v2).unwrap();
            assert_eq!(dec.summands.len(), 3);
            for s in &dec.summands {
                assert_eq!(s.count, 3);
                assert_eq!(s.m, 1);
            }
            // spectrum matches the t_alpha values of the explicit operators
            for alpha in 0..3 {
                let op = cg_operator(&ctx, &v1, &v2, alpha).unwrap();
                let hit = dec
                    .summands
                    .iter()
                    .map(|s| (s.t - op.t_alpha).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(hit < 1e-6, "t_alpha missing from spectrum ({hit:.3e})");
            }
        }
    }

    #[test]
    fn decompose_matches_chebyshev_fiber() {
        let mut rng = StdRng::seed_from_u64(45);
        for nn in [3u32, 5, 7] {
            let ctx = RootContext::new(nn, 1).unwrap();
            for _ in 0..3 {
                let v1 = sample_cyclic(&ctx, &mut rng);
                let v2 = if rng.gen_bool(0.5) {
                    sample_cyclic(&ctx, &mut rng)
                } else {
                    sample_semi(&ctx, &mut rng)
                };
                let dec = cg_decompose(&ctx, &v1, &v2).unwrap();
                let total: usize = dec.summands.iter().map(|s| s.m).sum();
                assert_eq!(total, nn as usize, "sum of multiplicities is N");
                for s in &dec.summands {
                    let val = chebyshev_t(ctx.n, s.t);
                    assert!(
                        (val - dec.tr_phi).norm() < 1e-6 * (1.0 + dec.tr_phi.norm()),
                        "T_N(t) != tr phi at N={nn}"
                    );
                }
            }
        }
    }

    #[test]
    fn decompose_scalar_pair_with_doubled_multiplicities() {
        // Scalar shadows: lambda^N = 1, and mu1^N = -1, mu2^N = 1, so the
        // product shadow has tr phi = 2 and every t != 2 in the fiber is
        // doubled while t = 2 appears once.
        let ctx = RootContext::new(3, 1).unwrap();
        let mu1 = C64::from_polar(1.0, std::f64::consts::PI / 3.0); // mu1^3 = -1
        let v1 = WeightModuleSpec::Cyclic {
            lambda: c(1.0, 0.0),
            mu: mu1,
            a: c(0.0, 0.0),
            b: c(0.0, 0.0),
        };
        let v2 = WeightModuleSpec::Cyclic {
            lambda: c(1.0, 0.0),
            mu: c(1.0, 0.0),
            a: c(0.0, 0.0),
            b: c(0.0, 0.0),
        };
        let dec = cg_decompose(&ctx, &v1, &v2).unwrap();
        assert!((dec.tr_phi - c(2.0, 0.0)).norm() < 1e-9);
        let mut m1count = 0;
        let mut m2count = 0;
        for s in &dec.summands {
            if (s.t - c(2.0, 0.0)).norm() < 1e-6 {
                assert_eq!(s.m, 1);
                m1count += 1;
            } else {
                assert_eq!(s.m, 2);
                m2count += 1;
            }
        }
        assert_eq!(m1count, 1);
        assert_eq!(m2count, 1); // N = 3: fiber {2, t, t} has one doubled value
        let total: usize = dec.summands.iter().map(|s| s.m).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn decompose_rejects_finite_dimensional_family() {
        let ctx = RootContext::new(3, 1).unwrap();
        let v1 = WeightModuleSpec::Diag {
            mu: c(1.0, 0.0),
            sign: 1,
            n: 1,
        };
        let v2 = WeightModuleSpec::Cyclic {
            lambda: c(1.0, 0.2),
            mu: c(0.8, 0.1),
            a: c(0.3, 0.0),
            b: c(0.7, 0.0),
        };
        assert!(matches!(
            cg_decompose(&ctx, &v1, &v2),
            Err(CgError::DegenerateParameters(_))
        ));
    }
}
