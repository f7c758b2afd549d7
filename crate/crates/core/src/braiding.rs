//! Braiding operators between tensor pairs of standard modules: the cyclic
//! quantum-dilogarithm closed formula, the Drinfel'd R-matrix route for
//! scalar modules, intertwiner residuals, and the colored Yang–Baxter check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::reps::{
    build_rep, evaluate_torus, kron, mat_pow, scalar_of, standard_rep, standard_to_weight,
    weight_to_standard, MatrixRep, RepError, StandardModuleSpec, WeightModuleSpec,
};
use crate::scalars::{C64, RootContext};
use crate::torus::{
    chain_triangulation, derive_wp_d1, AlgCtx, Coeff, TorusElement, TorusError, Triangulation,
};

fn cone() -> C64 {
    Complex64::new(1.0, 0.0)
}
#[cfg_attr(not(test), allow(dead_code))]
fn czero() -> C64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Debug)]
pub enum BraidingError {
    /// Φ_w argument X has Xᴺ ≠ scalar·I (residual attached).
    PreconditionXNnotScalar(f64),
    /// Some denominator qⁿw − q⁻ⁿ of Φ_w vanishes.
    PoleDenominator,
    /// wᴺ(1 + Xᴺ) ≠ 1 for a Φ_w factor (mismatch attached).
    WNormalization(f64),
    /// A classical shape parameter sits at 0, 1 or ∞.
    NotTriangulable(String),
    /// A multi-term sum that must be inverted is numerically singular.
    SingularSum(String),
    /// The two operators are not proportional (best residual attached).
    NonProportional(f64),
    /// The six braidings of a Yang–Baxter check do not chain.
    ChainMismatch(String),
    /// Other diagonal-family precondition failures (Drinfel'd route).
    NotDiagonalFamily(String),
    Rep(RepError),
    Torus(TorusError),
}

impl From<RepError> for BraidingError {
    fn from(e: RepError) -> Self {
        BraidingError::Rep(e)
    }
}
impl From<TorusError> for BraidingError {
    fn from(e: TorusError) -> Self {
        BraidingError::Torus(e)
    }
}

impl std::fmt::Display for BraidingError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// Shared context for the doubled disc: the 4-edge disc triangulation, the
/// 7-edge two-factor chain, and the algebra context.
pub struct PairContext {
    pub alg: AlgCtx,
    pub d1: Triangulation,
    pub d2: Triangulation,
}

impl PairContext {
    pub fn new(ctx: RootContext) -> Result<Self, BraidingError> {
        let alg = AlgCtx::new(ctx);
        let d1 = derive_wp_d1()?;
        let d2 = chain_triangulation(2, &d1);
        Ok(PairContext { alg, d1, d2 })
    }

    pub fn ctx(&self) -> &RootContext {
        &self.alg.root
    }

    /// The squared-edge generator X_i (i = 1..7) of the doubled disc.
    pub fn x(&self, i: usize) -> TorusElement {
        assert!((1..=7).contains(&i));
        let mut e = vec![0i64; 7];
        e[i - 1] = 2;
        TorusElement::from_expo(&self.alg, &self.d2, &e)
    }

    /// Weyl monomial Z^expo on the doubled disc.
    pub fn mono(&self, expo: &[i64; 7]) -> TorusElement {
        TorusElement::from_expo(&self.alg, &self.d2, expo)
    }

    pub fn hp1(&self) -> TorusElement {
        self.mono(&[0, 1, 1, 0, 0, 0, 0])
    }
    pub fn hp2(&self) -> TorusElement {
        self.mono(&[0, 0, 0, 0, 1, 1, 0])
    }
    pub fn delta_khalf(&self) -> TorusElement {
        self.mono(&[-1, 0, -1, -1, 0, -1, -1])
    }
    pub fn delta_lhalf(&self) -> TorusElement {
        self.mono(&[-1, -1, 0, -1, -1, 0, -1])
    }

    /// Evaluate a doubled-disc element on V₁⊗V₂ (both standard) by cutting
    /// along the shared edge: each monomial splits into its two disc legs.
    pub fn evaluate_pair(
        &self,
        v1: &StandardModuleSpec,
        v2: &StandardModuleSpec,
        elt: &TorusElement,
    ) -> Result<DMatrix<C64>, BraidingError> {
        let n = self.ctx().n as usize;
        let ten = elt.embed_chain(&self.d1);
        let mut out = DMatrix::<C64>::zeros(n * n, n * n);
        for (legs, c) in &ten.terms {
            let m1 = evaluate_torus(
                v1,
                &TorusElement::monomial(&self.alg, &self.d1, legs[0].clone(), Coeff::one(&self.alg)),
            )?;
            let m2 = evaluate_torus(
                v2,
                &TorusElement::monomial(&self.alg, &self.d1, legs[1].clone(), Coeff::one(&self.alg)),
            )?;
            out += kron(&m1, &m2) * c.to_complex(&self.alg);
        }
        Ok(out)
    }
}

/// A hyperbolic-tetrahedron shape triple (z, z′, z″) with z′ = 1/(1−z) and
/// z″ = 1 − 1/z, so that zz′z″ = −1 and zz″ − z = −1.
#[derive(Debug, Clone, Copy)]
pub struct ShapeParameter {
    pub z: C64,
    pub zp: C64,
    pub zpp: C64,
}

impl ShapeParameter {
    pub fn from_z(z: C64, eps: f64) -> Result<Self, BraidingError> {
        if z.norm() < eps || (z - cone()).norm() < eps || z.norm() > 1.0 / eps {
            return Err(BraidingError::NotTriangulable(format!(
                "shape parameter degenerates: z = {}",
                z
            )));
        }
        Ok(ShapeParameter {
            z,
            zp: cone() / (cone() - z),
            zpp: cone() - cone() / z,
        })
    }

    /// Reconstruct the triple from its middle entry (the cyclic companion
    /// map u ↦ 1/(1−u) sends z ↦ z′ ↦ z″ ↦ z).
    pub fn from_zp(zp: C64, eps: f64) -> Result<Self, BraidingError> {
        if zp.norm() < eps || (zp - cone()).norm() < eps || zp.norm() > 1.0 / eps {
            return Err(BraidingError::NotTriangulable(format!(
                "shape parameter degenerates: z' = {}",
                zp
            )));
        }
        Self::from_z(cone() - cone() / zp, eps)
    }
}

/// A q-shape triple (w, w′, w″) with ww′w″ = −q⁻¹ whose N-th powers form a
/// classical shape triple.
#[derive(Debug, Clone, Copy)]
pub struct QShapeParameter {
    pub w: C64,
    pub wp: C64,
    pub wpp: C64,
}

impl QShapeParameter {
    /// Fill in w″ from the product constraint and validate the N-th powers.
    pub fn from_w_wp(ctx: &RootContext, w: C64, wp: C64, eps: f64) -> Result<Self, BraidingError> {
        let q = ctx.q();
        let wpp = -cone() / (q * w * wp);
        let nn = ctx.n;
        let shape = ShapeParameter::from_z(w.powu(nn), eps)?;
        let rel = |a: C64, b: C64| (a - b).norm() / (1.0 + a.norm());
        let mism = rel(shape.zp, wp.powu(nn)).max(rel(shape.zpp, wpp.powu(nn)));
        if mism > 1e-6 {
            return Err(BraidingError::WNormalization(mism));
        }
        Ok(QShapeParameter { w, wp, wpp })
    }
}

/// Which N-th root (and square-root sign) each branch choice takes.
#[derive(Debug, Clone, Copy, Default)]
pub struct RootChoices {
    pub w1p: u32,
    pub w2pp: u32,
    pub w3pp: u32,
    pub w4p: u32,
    pub sroot_negate: bool,
}

/// The full parameter set of one braiding octahedron.
#[derive(Debug, Clone)]
pub struct OctahedronParameters {
    pub w1: QShapeParameter,
    pub w2: QShapeParameter,
    pub w3: QShapeParameter,
    pub w4: QShapeParameter,
    /// Square root of w′₁w″₂w″₃w′₄ (the common λ-rescaling factor).
    pub sroot: C64,
    pub alpha: C64,
    pub beta: C64,
    /// Central characters of the three interior edges at the crossing.
    pub x3: C64,
    pub x4: C64,
    pub x5: C64,
    /// Diagonal amplitudes of the flip stage: its matrix is the tensor flip
    /// composed with diag(Uʲ Wⁱ q²ⁱʲ) (a presentation of the flattening
    /// operator and the wraparound-normalization correction combined).
    pub cap_u: C64,
    pub cap_w: C64,
}

/// An intertwiner between tensor pairs of standard modules.
#[derive(Debug, Clone)]
pub struct BraidingOperator {
    pub matrix: DMatrix<C64>,
    pub source: (StandardModuleSpec, StandardModuleSpec),
    pub target: (StandardModuleSpec, StandardModuleSpec),
    pub provenance: Provenance,
    /// The N²-th root of the pre-normalization determinant divided out.
    pub d: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedFormula,
    Drinfeld,
}

/// The cyclic-dilogarithm polynomial Φ_w evaluated on a matrix whose N-th
/// power is the scalar required by w.
pub fn phi_w(ctx: &RootContext, w: C64, x: &DMatrix<C64>) -> Result<DMatrix<C64>, BraidingError> {
    let n = ctx.n;
    let dim = x.nrows();
    let xn = mat_pow(x, n as i64);
    let lam = scalar_of(&xn, 1e-7 * (1.0 + xn.norm()))
        .ok_or_else(|| BraidingError::PreconditionXNnotScalar(xn.norm()))?;
    let mism = (w.powu(n) * (cone() + lam) - cone()).norm();
    if mism > 1e-6 {
        return Err(BraidingError::WNormalization(mism));
    }
    let q = ctx.q();
    let mut acc = DMatrix::<C64>::identity(dim, dim);
    let mut powx = DMatrix::<C64>::identity(dim, dim);
    let mut coef = cone();
    for m in 1..n as i64 {
        powx = &powx * x;
        let denom = ctx.q_int_pow(m) * w - ctx.q_int_pow(-m);
        if denom.norm() < 1e-12 {
            return Err(BraidingError::PoleDenominator);
        }
        coef *= -w * q.powi((m - 1) as i32) / denom;
        acc += &powx * coef;
    }
    Ok(acc)
}

/// The crossing scalars x₃, x₄, x₅: central characters of the three
/// interior doubled-disc edge variables on V₁⊗V₂, in closed form. (x₁ of a
/// standard module is already an N-th-power parameter.)
pub fn crossing_x(nn: u32, v1: &StandardModuleSpec, v2: &StandardModuleSpec) -> (C64, C64, C64) {
    let x3 = (v1.hp / (v1.hdel * v1.lambda * v1.lambda)).powu(nn);
    let x4 = v1.hdel.powu(nn) * v2.x1 / (v1.hp.powu(nn) * v1.x1);
    let x5 = (v2.lambda * v2.lambda * v2.hp * v2.hdel).powu(nn);
    (x3, x4, x5)
}

/// The four classical shape parameters of a crossing colored by (V₁, V₂).
pub fn classical_shapes(
    pc: &PairContext,
    v1: &StandardModuleSpec,
    v2: &StandardModuleSpec,
) -> Result<[ShapeParameter; 4], BraidingError> {
    let (x3, x4, x5) = crossing_x(pc.ctx().n, v1, v2);
    classical_shapes_from_x(x3, x4, x5)
}

fn classical_shapes_from_x(
    x3: C64,
    x4: C64,
    x5: C64,
) -> Result<[ShapeParameter; 4], BraidingError> {
    let eps = 1e-8;
    let z1 = -cone() / x4;
    let z2p = -cone() / (x5 * (cone() + x4));
    let z3p = -cone() / (x3 * (cone() + x4));
    let d2 = cone() + x5 * (cone() + x4);
    let d3 = cone() + x3 * (cone() + x4);
    if d2.norm() < eps || d3.norm() < eps {
        return Err(BraidingError::NotTriangulable(
            "shape denominator vanishes".into(),
        ));
    }
    let z4 = -x4 / (d2 * d3);
    Ok([
        ShapeParameter::from_z(z1, eps)?,
        ShapeParameter::from_zp(z2p, eps)?,
        ShapeParameter::from_zp(z3p, eps)?,
        ShapeParameter::from_z(z4, eps)?,
    ])
}


/// The clock matrix D (v_i ↦ qⁱ v_i) and shift matrix A (v_i ↦ v_{i−1}).
pub fn clock_shift(ctx: &RootContext) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = ctx.n as usize;
    let mut d = DMatrix::<C64>::zeros(n, n);
    let mut a = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = ctx.q_int_pow(i as i64);
        a[((i + n - 1) % n, i)] = cone();
    }
    (d, a)
}

/// Tensor flip P(x⊗y) = y⊗x on C^N⊗C^N.
pub fn flip_matrix(n: usize) -> DMatrix<C64> {
    let mut p = DMatrix::<C64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            p[(j * n + i, i * n + j)] = cone();
        }
    }
    p
}

/// Solve the octahedron around one crossing: choose the q-shape parameters
/// lifting the classical shapes (default: principal roots), the square root
/// of w′₁w″₂w″₃w′₄, the flattenings (α, β), and the target pair (V₃, V₄).
/// Also returns the four Φ-factor arguments realized on V₁⊗V₂.
fn octahedron_with_args(
    pc: &PairContext,
    v1: &StandardModuleSpec,
    v2: &StandardModuleSpec,
    roots: RootChoices,
) -> Result<
    (
        OctahedronParameters,
        StandardModuleSpec,
        StandardModuleSpec,
        [DMatrix<C64>; 4],
    ),
    BraidingError,
> {
    let ctx = pc.ctx();
    let nn = ctx.n;
    let (x3, x4, x5) = crossing_x(nn, v1, v2);
    // Validates non-degeneracy of all four tetrahedra.
    let shapes = classical_shapes_from_x(x3, x4, x5)?;

    // The Φ-factor arguments are inverted interior-edge monomials on V₁⊗V₂,
    // each with scalar N-th power a; the factor's parameter w must satisfy
    // wᴺ(1+a) = 1 (read off numerically, so the chain is self-consistent).
    let scalar_pow = |m: &DMatrix<C64>| -> Result<C64, BraidingError> {
        let mn = mat_pow(m, nn as i64);
        scalar_of(&mn, 1e-7 * (1.0 + mn.norm()))
            .ok_or_else(|| BraidingError::PreconditionXNnotScalar(mn.norm()))
    };
    let a1 = pc.evaluate_pair(v1, v2, &pc.x(4).monomial_inv()?)?;
    let w1p = ctx.nth_root(cone() / (cone() + scalar_pow(&a1)?), roots.w1p);
    let a2 = pc.evaluate_pair(v1, v2, &pc.mono(&[0, 0, 0, 2, 2, 0, 0]).monomial_inv()?)? * w1p;
    let w2pp = ctx.nth_root(cone() / (cone() + scalar_pow(&a2)?), roots.w2pp);
    let a3 = pc.evaluate_pair(v1, v2, &pc.mono(&[0, 0, 2, 2, 0, 0, 0]).monomial_inv()?)? * w1p;
    let w3pp = ctx.nth_root(cone() / (cone() + scalar_pow(&a3)?), roots.w3pp);
    let a4 = pc.evaluate_pair(v1, v2, &pc.mono(&[0, 0, 2, 2, 2, 0, 0]).monomial_inv()?)?
        * (w1p * w1p * w2pp * w3pp);
    let w4p = ctx.nth_root(cone() / (cone() + scalar_pow(&a4)?), roots.w4p);

    // Complete each tetrahedron's q-shape triple: the unconstrained member
    // is the principal N-th root of its classical shape; the product rule
    // ww′w″ = −q⁻¹ then lands the third member on a root of its own shape.
    let q = ctx.q();
    let eps = 1e-8;
    let w1 = ctx.principal_nth_root(shapes[0].z);
    let w1t = QShapeParameter::from_w_wp(ctx, w1, w1p, eps)?;
    let w2p = ctx.principal_nth_root(shapes[1].zp);
    let w2t = QShapeParameter::from_w_wp(ctx, -cone() / (q * w2p * w2pp), w2p, eps)?;
    let w3p = ctx.principal_nth_root(shapes[2].zp);
    let w3t = QShapeParameter::from_w_wp(ctx, -cone() / (q * w3p * w3pp), w3p, eps)?;
    let w4 = ctx.principal_nth_root(shapes[3].z);
    let w4t = QShapeParameter::from_w_wp(ctx, w4, w4p, eps)?;

    let prod = w1p * w2pp * w3pp * w4p;
    let mut sroot = prod.sqrt();
    if roots.sroot_negate {
        sroot = -sroot;
    }

    // Target pair: λ's rescale by the square root, h's swap legs. The shift
    // amplitudes x₁ and the flip-diagonal constants U, W are solved from
    // single entries of the flip-stage intertwining conditions for the two
    // outer shift generators (evaluated with placeholder amplitudes; the
    // wraparound entries then determine the true amplitudes).
    let lam3 = v2.lambda / sroot;
    let lam4 = v1.lambda * sroot;
    let mut v3 = StandardModuleSpec {
        x1: cone(),
        lambda: lam3,
        hp: v2.hp,
        hdel: v2.hdel,
    };
    let mut v4 = StandardModuleSpec {
        x1: cone(),
        lambda: lam4,
        hp: v1.hp,
        hdel: v1.hdel,
    };
    let n = nn as usize;
    let t1 = pc.evaluate_pair(&v3, &v4, &pc.mono(&[2, 2, 0, 2, 0, 0, 0]))? * (w3pp * w4p);
    let s7 = pc.evaluate_pair(v1, v2, &pc.mono(&[0, 0, 0, 0, 0, 0, 2]))?;
    let t7 = pc.evaluate_pair(&v3, &v4, &pc.mono(&[0, 0, 0, 2, 0, 2, 2]))? * (w2pp * w4p);
    // First shift generator: m·S₁ = T₁·m at basis cell (1,0) → (0,0) fixes
    // W; its wraparound cell fixes x₁ of the second target leg.
    let cap_w = cone() / t1[(0, 1)];
    v4.x1 = v1.x1 * cap_w.powu(nn - 1) / t1[(n - 1, 0)];
    // Last shift generator: fixes U and x₁ of the first target leg.
    let kappa = s7[(1, 0)];
    let cap_u = t7[(n, 0)] / kappa;
    v3.x1 = t7[(0, (n - 1) * n)] * v2.x1 * cap_u.powu(nn - 1) / kappa;

    // Flattening parameters from the fixed logq branch (reported; the flip
    // stage consumes them only through U and W).
    let logq = ctx.logq();
    let mu2 = l_weight(pc, v2)?;
    let alpha = (v1.lambda * v1.lambda / (w2pp * w4p)).ln() / logq;
    let beta = (w3pp * w4p / (mu2 * mu2)).ln() / logq;

    Ok((
        OctahedronParameters {
            w1: w1t,
            w2: w2t,
            w3: w3t,
            w4: w4t,
            sroot,
            alpha,
            beta,
            x3,
            x4,
            x5,
            cap_u,
            cap_w,
        },
        v3,
        v4,
        [a1, a2, a3, a4],
    ))
}

/// Public octahedron solve (without the realized Φ arguments).
pub fn solve_octahedron(
    pc: &PairContext,
    v1: &StandardModuleSpec,
    v2: &StandardModuleSpec,
    roots: RootChoices,
) -> Result<(OctahedronParameters, StandardModuleSpec, StandardModuleSpec), BraidingError> {
    let (oct, v3, v4, _) = octahedron_with_args(pc, v1, v2, roots)?;
    Ok((oct, v3, v4))
}

/// The L-weight μ of a standard module: ρ(L^{1/2}) = μ·D.
fn l_weight(pc: &PairContext, v: &StandardModuleSpec) -> Result<C64, BraidingError> {
    let lhalf = TorusElement::from_expo(&pc.alg, &pc.d1, &[-1, -1, 0, -1]);
    let m = evaluate_torus(v, &lhalf)?;
    Ok(m[(0, 0)])
}

/// The flip stage of the braiding: tensor flip composed with the diagonal
/// diag(Uʲ Wⁱ q²ⁱʲ) (flattening operator in wraparound-normalized form).
pub fn flip_stage(ctx: &RootContext, cap_u: C64, cap_w: C64) -> DMatrix<C64> {
    let n = ctx.n as usize;
    let mut m = DMatrix::<C64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            m[(j * n + i, i * n + j)] =
                cap_u.powu(j as u32) * cap_w.powu(i as u32) * ctx.q_int_pow(2 * (i * j) as i64);
        }
    }
    m
}

/// The diagonal flattening operator D_{α,β}.
pub fn d_alpha_beta(ctx: &RootContext, alpha: C64, beta: C64) -> DMatrix<C64> {
    let n = ctx.n as usize;
    let mut m = DMatrix::<C64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let e = (alpha - C64::new(2.0 * i as f64, 0.0))
                * (beta - C64::new(2.0 * j as f64, 0.0))
                / 2.0;
            m[(i * n + j, i * n + j)] = ctx.q_power(e);
        }
    }
    m
}

/// The closed-formula Kashaev braiding R: V₁⊗V₂ → V₃⊗V₄, determinant
/// normalized to 1.
pub fn closed_formula_r(
    pc: &PairContext,
    v1: &StandardModuleSpec,
    v2: &StandardModuleSpec,
    roots: RootChoices,
) -> Result<(BraidingOperator, OctahedronParameters), BraidingError> {
    let ctx = pc.ctx();
    let (oct, v3, v4, args) = octahedron_with_args(pc, v1, v2, roots)?;
    let p1 = phi_w(ctx, oct.w1.wp, &args[0])?;
    let p2 = phi_w(ctx, oct.w2.wpp, &args[1])?;
    let p3 = phi_w(ctx, oct.w3.wpp, &args[2])?;
    let p4 = phi_w(ctx, oct.w4.wp, &args[3])?;
    let raw = flip_stage(ctx, oct.cap_u, oct.cap_w) * p4 * p3 * p2 * p1;
    let (mat, d) = det_normalize(ctx, raw)?;
    Ok((
        BraidingOperator {
            matrix: mat,
            source: (v1.clone(), v2.clone()),
            target: (v3, v4),
            provenance: Provenance::ClosedFormula,
            d,
        },
        oct,
    ))
}

/// Divide out the principal N²-th root of the determinant.
pub fn det_normalize(
    ctx: &RootContext,
    raw: DMatrix<C64>,
) -> Result<(DMatrix<C64>, C64), BraidingError> {
    let det = raw.clone().lu().determinant();
    if det.norm() < 1e-12 {
        return Err(BraidingError::SingularSum("singular braiding matrix".into()));
    }
    let nn2 = (ctx.n * ctx.n) as f64;
    let d = (det.ln() / nn2).exp();
    Ok((raw / d, d))
}

/// The images of the doubled-disc generators under the half-twist
/// automorphism, evaluated on the target pair. Multi-term inverses are done
/// numerically.
pub fn script_r_targets(
    pc: &PairContext,
    v3: &StandardModuleSpec,
    v4: &StandardModuleSpec,
) -> Result<Vec<(String, DMatrix<C64>)>, BraidingError> {
    let ev = |expo: &[i64; 7]| -> Result<DMatrix<C64>, BraidingError> {
        pc.evaluate_pair(v3, v4, &pc.mono(expo))
    };
    let inv = |m: DMatrix<C64>, what: &str| -> Result<DMatrix<C64>, BraidingError> {
        m.try_inverse()
            .ok_or_else(|| BraidingError::SingularSum(what.to_string()))
    };
    let mut out = Vec::new();
    // X₁ ↦ (X₁⁻¹ + [X₁X₂]⁻¹ + [X₁X₂X₄]⁻¹)⁻¹
    out.push((
        "X1".to_string(),
        inv(
            ev(&[-2, 0, 0, 0, 0, 0, 0])? + ev(&[-2, -2, 0, 0, 0, 0, 0])?
                + ev(&[-2, -2, 0, -2, 0, 0, 0])?,
            "script-R(X1)",
        )?,
    ));
    // X₂ ↦ X₅ + [X₄X₅] + [X₂X₄X₅] + [X₄X₅X₆] + [X₂X₄X₅X₆]
    // (forced by X₂ = [H²ₚ₁X₃⁻¹] with Hₚ₁ central and the X₃ image).
    out.push((
        "X2".to_string(),
        ev(&[0, 0, 0, 2, 2, 0, 0])?
            + ev(&[0, 0, 0, 0, 2, 0, 0])?
            + ev(&[0, 2, 0, 2, 2, 0, 0])?
            + ev(&[0, 0, 0, 2, 2, 2, 0])?
            + ev(&[0, 2, 0, 2, 2, 2, 0])?,
    ));
    // X₃ ↦ (X₆⁻¹ + X₄ + [X₂X₄] + [X₆⁻¹X₄] + [X₂X₄X₆⁻¹])⁻¹
    out.push((
        "X3".to_string(),
        inv(
            ev(&[0, 0, 0, 0, 0, -2, 0])?
                + ev(&[0, 0, 0, 2, 0, 0, 0])?
                + ev(&[0, 2, 0, 2, 0, 0, 0])?
                + ev(&[0, 0, 0, 2, 0, -2, 0])?
                + ev(&[0, 2, 0, 2, 0, -2, 0])?,
            "script-R(X3)",
        )?,
    ));
    // X₅ ↦ (X₂⁻¹ + X₄ + [X₄X₆] + [X₂⁻¹X₄] + [X₂⁻¹X₄X₆])⁻¹
    out.push((
        "X5".to_string(),
        inv(
            ev(&[0, -2, 0, 0, 0, 0, 0])?
                + ev(&[0, 0, 0, 2, 0, 0, 0])?
                + ev(&[0, 0, 0, 2, 0, 2, 0])?
                + ev(&[0, -2, 0, 2, 0, 0, 0])?
                + ev(&[0, -2, 0, 2, 0, 2, 0])?,
            "script-R(X5)",
        )?,
    ));
    // X₆ ↦ X₃ + [X₃X₄] + [X₃X₄X₆] + [X₂X₃X₄] + [X₂X₃X₄X₆]
    // (forced by X₆ = [H²ₚ₂X₅⁻¹] with Hₚ₂ central and the X₅ image).
    out.push((
        "X6".to_string(),
        ev(&[0, 0, 2, 0, 0, 0, 0])?
            + ev(&[0, 0, 2, 2, 0, 0, 0])?
            + ev(&[0, 0, 2, 2, 0, 2, 0])?
            + ev(&[0, 2, 2, 2, 0, 0, 0])?
            + ev(&[0, 2, 2, 2, 0, 2, 0])?,
    ));
    // X₇ ↦ (X₇⁻¹ + [X₆X₇]⁻¹ + [X₄X₆X₇]⁻¹)⁻¹
    out.push((
        "X7".to_string(),
        inv(
            ev(&[0, 0, 0, 0, 0, 0, -2])? + ev(&[0, 0, 0, 0, 0, -2, -2])?
                + ev(&[0, 0, 0, -2, 0, -2, -2])?,
            "script-R(X7)",
        )?,
    ));
    // H_{p₁} ↦ H_{p₂}, H_{p₂} ↦ H_{p₁}; Δ(K^{1/2}), Δ(L^{1/2}) fixed.
    out.push(("Hp1".to_string(), pc.evaluate_pair(v3, v4, &pc.hp2())?));
    out.push(("Hp2".to_string(), pc.evaluate_pair(v3, v4, &pc.hp1())?));
    out.push((
        "DeltaKhalf".to_string(),
        pc.evaluate_pair(v3, v4, &pc.delta_khalf())?,
    ));
    out.push((
        "DeltaLhalf".to_string(),
        pc.evaluate_pair(v3, v4, &pc.delta_lhalf())?,
    ));
    Ok(out)
}

/// Max normalized residual of R as an intertwiner: doubled-disc generators
/// against the half-twist images, plus the five quantum-group twist
/// equations.
pub fn intertwiner_residual(pc: &PairContext, r: &BraidingOperator) -> Result<f64, BraidingError> {
    Ok(intertwiner_residuals(pc, r)?
        .into_iter()
        .fold(0.0f64, |acc, (_, v)| acc.max(v)))
}

/// Per-equation normalized residuals of R as an intertwiner.
pub fn intertwiner_residuals(
    pc: &PairContext,
    r: &BraidingOperator,
) -> Result<Vec<(String, f64)>, BraidingError> {
    let ctx = pc.ctx();
    let (v1, v2) = (&r.source.0, &r.source.1);
    let (v3, v4) = (&r.target.0, &r.target.1);
    let mut pairs: Vec<(DMatrix<C64>, DMatrix<C64>)> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    // Torus generators: source value vs script-R target value.
    let sources = [
        ("X1", [2i64, 0, 0, 0, 0, 0, 0]),
        ("X2", [0, 2, 0, 0, 0, 0, 0]),
        ("X3", [0, 0, 2, 0, 0, 0, 0]),
        ("X5", [0, 0, 0, 0, 2, 0, 0]),
        ("X6", [0, 0, 0, 0, 0, 2, 0]),
        ("X7", [0, 0, 0, 0, 0, 0, 2]),
    ];
    let targets = script_r_targets(pc, v3, v4)?;
    let find = |n: &str| -> DMatrix<C64> {
        targets
            .iter()
            .find(|(name, _)| name == n)
            .map(|(_, m)| m.clone())
            .expect("generator present")
    };
    for (name, expo) in &sources {
        pairs.push((pc.evaluate_pair(v1, v2, &pc.mono(expo))?, find(name)));
        labels.push(name.to_string());
    }
    pairs.push((pc.evaluate_pair(v1, v2, &pc.hp1())?, find("Hp1")));
    labels.push("Hp1".into());
    pairs.push((pc.evaluate_pair(v1, v2, &pc.hp2())?, find("Hp2")));
    labels.push("Hp2".into());
    pairs.push((
        pc.evaluate_pair(v1, v2, &pc.delta_khalf())?,
        find("DeltaKhalf"),
    ));
    labels.push("DeltaKhalf".into());
    pairs.push((
        pc.evaluate_pair(v1, v2, &pc.delta_lhalf())?,
        find("DeltaLhalf"),
    ));
    labels.push("DeltaLhalf".into());
    // Quantum-group twist equations on the two legs.
    let gens = crate::qgroup::build_generators(&pc.alg, &pc.d1);
    let r1 = standard_rep(&gens, v1)?;
    let r2 = standard_rep(&gens, v2)?;
    let r3 = standard_rep(&gens, v3)?;
    let r4 = standard_rep(&gens, v4)?;
    for (i, p) in kr_equation_pairs(ctx, &r1, &r2, &r3, &r4)?.into_iter().enumerate() {
        pairs.push(p);
        labels.push(format!("twist-eq-{}", i + 1));
    }
    let rn = r.matrix.norm();
    let mut out = Vec::new();
    for ((src, tgt), label) in pairs.iter().zip(labels) {
        let num = (tgt * &r.matrix - &r.matrix * src).norm();
        out.push((label, num / (rn * (1.0 + src.norm()))));
    }
    Ok(out)
}

/// The five half-twist equations on quantum-group elements, as
/// (source-pair value, target-pair value) matrices.
fn kr_equation_pairs(
    ctx: &RootContext,
    r1: &MatrixRep,
    r2: &MatrixRep,
    r3: &MatrixRep,
    r4: &MatrixRep,
) -> Result<Vec<(DMatrix<C64>, DMatrix<C64>)>, BraidingError> {
    let q = ctx.q();
    let qq = q - cone() / q;
    let id = DMatrix::<C64>::identity(ctx.n as usize, ctx.n as usize);
    let mut out = Vec::new();
    // Shared inverse factor (1 − q(q−q⁻¹)² FL⁻¹ ⊗ K⁻¹E)⁻¹ on the target.
    let factor = {
        let m = kron(&(&r3.f * r3.linv()), &(&r4.kinv() * &r4.e)) * (q * qq * qq);
        let big = DMatrix::<C64>::identity(m.nrows(), m.ncols()) - m;
        big.try_inverse()
            .ok_or_else(|| BraidingError::SingularSum("twist-equation inverse factor".into()))?
    };
    // (KR1) 1⊗K ↦ (K⊗1)·factor
    out.push((kron(&id, &r2.k()), &kron(&r3.k(), &id) * &factor));
    // (KR2) 1⊗L⁻¹ ↦ (L⁻¹⊗1)·factor
    out.push((kron(&id, &r2.linv()), &kron(&r3.linv(), &id) * &factor));
    // (KR3) E⊗1 ↦ L⁻¹⊗E
    out.push((kron(&r1.e, &id), kron(&r3.linv(), &r4.e)));
    // (KR4) 1⊗F ↦ F⊗K⁻¹
    out.push((kron(&id, &r2.f), kron(&r3.f, &r4.kinv())));
    // (KR5) coproducts fixed: Δ(E) and Δ(F).
    out.push((
        kron(&id, &r2.e) + kron(&r1.e, &r2.k()),
        kron(&id, &r4.e) + kron(&r3.e, &r4.k()),
    ));
    out.push((
        kron(&r1.f, &id) + kron(&r1.l(), &r2.f),
        kron(&r3.f, &id) + kron(&r3.l(), &r4.f),
    ));
    Ok(out)
}

/// The Drinfel'd braiding R^D = σ ∘ q^{−H⊗G/2} ∘ exp_q^{<N}((q−q⁻¹)E⊗F) for
/// a pair of weight modules with diagonal q-logarithms h, g.
pub fn drinfeld_r(
    ctx: &RootContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
    h: C64,
    g: C64,
) -> Result<DMatrix<C64>, BraidingError> {
    let r1 = build_rep(ctx, v1)?;
    let r2 = build_rep(ctx, v2)?;
    let n = ctx.n as usize;
    if r1.dim != n || r2.dim != n {
        return Err(BraidingError::NotDiagonalFamily(
            "Drinfel'd route expects full-dimensional diagonal modules".into(),
        ));
    }
    // The weight basis must diagonalize K^{1/2} (leg 1) and L^{1/2} (leg 2)
    // with the prescribed logarithms.
    let chk = |m: &DMatrix<C64>, i: usize, expect: C64, what: &str| -> Result<(), BraidingError> {
        if (m[(i, i)] - expect).norm() > 1e-8 * (1.0 + expect.norm()) {
            return Err(BraidingError::NotDiagonalFamily(format!(
                "{} is not diagonal with the prescribed weight-log",
                what
            )));
        }
        Ok(())
    };
    for i in 0..n {
        chk(
            &r1.khalf,
            i,
            ctx.q_power(h / 2.0 - C64::new(i as f64, 0.0)),
            "K^{1/2} on leg 1",
        )?;
        chk(
            &r2.lhalf,
            i,
            ctx.q_power(g / 2.0 + C64::new(i as f64, 0.0)),
            "L^{1/2} on leg 2",
        )?;
    }
    let q = ctx.q();
    let qq = q - cone() / q;
    // Truncated q-exponential of (q−q⁻¹) E⊗F; nilpotency is required.
    let ef = kron(&r1.e, &r2.f) * qq;
    let efn = mat_pow(&ef, ctx.n as i64);
    if efn.norm() > 1e-9 {
        return Err(BraidingError::NotDiagonalFamily(
            "E⊗F is not nilpotent of order N".into(),
        ));
    }
    // Truncated dual q-exponential Σ_{m<N} q^{m(m−1)/2} xᵐ/[m]!.
    let mut expf = DMatrix::<C64>::identity(n * n, n * n);
    let mut pow = DMatrix::<C64>::identity(n * n, n * n);
    for m in 1..ctx.n {
        pow = &pow * &ef;
        let c = ctx.q_int_pow((m * (m - 1) / 2) as i64)
            / ctx.qfact(m).expect("m < N");
        expf += &pow * c;
    }
    let mut cartan = DMatrix::<C64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let e = -(h - C64::new(2.0 * i as f64, 0.0)) * (g + C64::new(2.0 * j as f64, 0.0))
                / 2.0;
            cartan[(i * n + j, i * n + j)] = ctx.q_power(e);
        }
    }
    Ok(flip_matrix(n) * cartan * expf)
}

/// Intertwiner residual of the Drinfel'd braiding: R·Δ(x) on V₁⊗V₂ against
/// Δ(x) on V₂⊗V₁, over the quantum-group generators.
pub fn drinfeld_residual(
    ctx: &RootContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
    rmat: &DMatrix<C64>,
) -> Result<f64, BraidingError> {
    let r1 = build_rep(ctx, v1)?;
    let r2 = build_rep(ctx, v2)?;
    let coprods = |a: &MatrixRep, b: &MatrixRep| -> Vec<DMatrix<C64>> {
        let ida = DMatrix::<C64>::identity(a.dim, a.dim);
        let idb = DMatrix::<C64>::identity(b.dim, b.dim);
        vec![
            kron(&ida, &b.e) + kron(&a.e, &b.k()),
            kron(&a.f, &idb) + kron(&a.l(), &b.f),
            kron(&a.khalf, &b.khalf),
            kron(&a.lhalf, &b.lhalf),
        ]
    };
    let src = coprods(&r1, &r2);
    let tgt = coprods(&r2, &r1);
    let rn = rmat.norm();
    let mut resid: f64 = 0.0;
    for (s, t) in src.iter().zip(tgt.iter()) {
        resid = resid.max((t * rmat - rmat * s).norm() / (rn * (1.0 + s.norm())));
    }
    Ok(resid)
}

/// An intertwiner between two standard-module realizations (empty if the
/// specs are not isomorphic), normalized to unit determinant.
pub fn standard_intertwiner(
    pc: &PairContext,
    a: &StandardModuleSpec,
    b: &StandardModuleSpec,
) -> Result<DMatrix<C64>, BraidingError> {
    let ctx = pc.ctx();
    let n = ctx.n as usize;
    let gens: [&[i64; 4]; 4] = [
        &crate::torus::d1::H_BOUNDARY,
        &crate::torus::d1::H_PUNCTURE,
        &crate::torus::d1::Z134,
        &crate::torus::d1::X1,
    ];
    let mut sys = DMatrix::<C64>::zeros(4 * n * n, n * n);
    for (gi, expo) in gens.iter().enumerate() {
        let ma = evaluate_torus(
            a,
            &TorusElement::from_expo(&pc.alg, &pc.d1, &expo[..]),
        )?;
        let mb = evaluate_torus(
            b,
            &TorusElement::from_expo(&pc.alg, &pc.d1, &expo[..]),
        )?;
        let block = kron(&DMatrix::identity(n, n), &mb)
            - kron(&ma.transpose(), &DMatrix::identity(n, n));
        sys.view_mut((gi * n * n, 0), (n * n, n * n)).copy_from(&block);
    }
    let svd = sys.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-8 * (1.0 + smax);
    let mut j = None;
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            let row = vt.row(i);
            let mut m = DMatrix::<C64>::zeros(n, n);
            for c in 0..n * n {
                m[(c % n, c / n)] = row[c].conj();
            }
            j = Some(m);
            break;
        }
    }
    let j = j.ok_or_else(|| {
        BraidingError::ChainMismatch("no intertwiner between standard realizations".into())
    })?;
    let det = j.clone().lu().determinant();
    if det.norm() < 1e-12 {
        return Err(BraidingError::ChainMismatch(
            "degenerate alignment intertwiner".into(),
        ));
    }
    let d = (det.ln() / n as f64).exp();
    Ok(j / d)
}

/// Compare the Drinfel'd braiding of a weight-module pair with the closed
/// formula on its standard lifts: returns (ζ, residual) for the
/// proportionality R^D ≈ ζ·(T₃⊗T₄)·R·(U₁⊗U₂) after determinant
/// normalization of both sides.
pub fn compare_drinfeld_kashaev(
    pc: &PairContext,
    v1: &WeightModuleSpec,
    v2: &WeightModuleSpec,
    h: C64,
    g: C64,
    roots: RootChoices,
) -> Result<(C64, f64), BraidingError> {
    let ctx = pc.ctx();
    let rd_raw = drinfeld_r(ctx, v1, v2, h, g)?;
    let (rd, _) = det_normalize(ctx, rd_raw)?;
    let s1 = weight_to_standard(ctx, v1)?;
    let s2 = weight_to_standard(ctx, v2)?;
    // For scalar modules the shift amplitude of a standard lift is a free
    // parameter, and the default lift of an identical pair degenerates the
    // shapes; retry over amplitude rescalings until one is admissible.
    let mut picked = None;
    let mut last_err = None;
    for c in [
        cone(),
        C64::new(0.37, 0.21),
        C64::new(2.3, -0.7),
        C64::new(-0.45, 1.2),
    ] {
        let mut s2c = s2.clone();
        s2c.x1 *= c;
        match closed_formula_r(pc, &s1, &s2c, roots) {
            Ok((rk, _)) => {
                picked = Some((rk, s2c));
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (rk, s2) = picked.ok_or_else(|| {
        last_err.unwrap_or_else(|| BraidingError::ChainMismatch("no admissible lift".into()))
    })?;
    let gens = crate::qgroup::build_generators(&pc.alg, &pc.d1);
    // Transport R^D to the standard bases through the canonical weight-basis
    // change of each lift (F-orbit basis), checking that the lift restricts
    // back to the given weight module.
    let (w1b, p1, _) = standard_to_weight(&gens, &s1)?;
    let (w2b, p2, _) = standard_to_weight(&gens, &s2)?;
    for (given, back) in [(v1, &w1b), (v2, &w2b)] {
        let ra = build_rep(ctx, given)?;
        let rb = build_rep(ctx, back)?;
        let dev = (&ra.e - &rb.e).norm()
            + (&ra.f - &rb.f).norm()
            + (&ra.khalf - &rb.khalf).norm()
            + (&ra.lhalf - &rb.lhalf).norm();
        if dev > 1e-6 {
            return Err(BraidingError::ChainMismatch(format!(
                "standard lift restricts to a different weight module (dev {dev:.3e})"
            )));
        }
    }
    let p1_inv = p1.clone().try_inverse().ok_or_else(|| {
        BraidingError::SingularSum("weight-basis change not invertible".into())
    })?;
    let p2_inv = p2.clone().try_inverse().ok_or_else(|| {
        BraidingError::SingularSum("weight-basis change not invertible".into())
    })?;
    let rd_std = kron(&p2, &p1) * rd * kron(&p1_inv, &p2_inv);
    let (rd_std, _) = det_normalize(ctx, rd_std)?;
    // Align the closed-formula targets (V₃, V₄) with (V₂, V₁) at the level of
    // quantum-torus intertwiners, which are unique up to scalar.
    let j3 = standard_intertwiner(pc, &rk.target.0, &s2)?;
    let j4 = standard_intertwiner(pc, &rk.target.1, &s1)?;
    let rk_aligned = kron(&j3, &j4) * &rk.matrix;
    let (rk_aligned, _) = det_normalize(ctx, rk_aligned)?;
    proportionality(&rd_std, &rk_aligned)
}

/// Report of one Yang–Baxter verification on a triple of standard modules.
#[derive(Debug, Clone)]
pub struct YangBaxterReport {
    /// Proportionality constant between the two composite braidings.
    pub c: C64,
    /// Relative residual of the matrix equation after alignment.
    pub residual: f64,
    /// |c^{N²} − 1|.
    pub c_root_defect: f64,
}

/// Verify the colored Yang–Baxter equation on (V₁, V₂, V₃): braid the three
/// strands both ways around the hexagon, align the final colors by
/// standard-module intertwiners, and compare up to a constant.
pub fn yang_baxter_check(
    pc: &PairContext,
    v1: &StandardModuleSpec,
    v2: &StandardModuleSpec,
    v3: &StandardModuleSpec,
) -> Result<YangBaxterReport, BraidingError> {
    let ctx = pc.ctx();
    let n = ctx.n as usize;
    let id = DMatrix::<C64>::identity(n, n);
    let base = RootChoices::default();
    // Left route: crossings (1,2), then (2,3), then (1,2).
    let (r1, _) = closed_formula_r(pc, v1, v2, base)?;
    let (v7, v8) = (r1.target.0.clone(), r1.target.1.clone());
    let (r2, _) = closed_formula_r(pc, &v8, v3, base)?;
    let (v9, v6) = (r2.target.0.clone(), r2.target.1.clone());
    let (r3, _) = closed_formula_r(pc, &v7, &v9, base)?;
    let (v4, v5) = (r3.target.0.clone(), r3.target.1.clone());
    let lhs = kron(&r3.matrix, &id) * kron(&id, &r2.matrix) * kron(&r1.matrix, &id);
    // Right route: crossings (2,3), then (1,2), then (2,3), over the eight
    // square-root sign choices, aligned slotwise to the left route's colors.
    let mut best: Option<(YangBaxterReport, f64)> = None;
    for mask in 0..8u8 {
        let rc = |bit: u8| RootChoices {
            sroot_negate: mask & bit != 0,
            ..base
        };
        let attempt = (|| -> Result<YangBaxterReport, BraidingError> {
            let (r4, _) = closed_formula_r(pc, v2, v3, rc(1))?;
            let (v10, v11) = (r4.target.0.clone(), r4.target.1.clone());
            let (r5, _) = closed_formula_r(pc, v1, &v10, rc(2))?;
            let (v4b, v12) = (r5.target.0.clone(), r5.target.1.clone());
            let (r6, _) = closed_formula_r(pc, &v12, &v11, rc(4))?;
            let (v5b, v6b) = (r6.target.0.clone(), r6.target.1.clone());
            let rhs =
                kron(&id, &r6.matrix) * kron(&r5.matrix, &id) * kron(&id, &r4.matrix);
            let j4 = standard_intertwiner(pc, &v4b, &v4)?;
            let j5 = standard_intertwiner(pc, &v5b, &v5)?;
            let j6 = standard_intertwiner(pc, &v6b, &v6)?;
            let aligned = kron(&kron(&j4, &j5), &j6) * rhs;
            let (c, residual) = proportionality(&lhs, &aligned)?;
            let c_root_defect = (c.powu(ctx.n * ctx.n) - cone()).norm();
            Ok(YangBaxterReport {
                c,
                residual,
                c_root_defect,
            })
        })();
        if let Ok(rep) = attempt {
            let score = rep.residual;
            if best.as_ref().map_or(true, |(_, s)| score < *s) {
                best = Some((rep, score));
            }
            if score < 1e-8 {
                break;
            }
        }
    }
    best.map(|(rep, _)| rep).ok_or_else(|| {
        BraidingError::ChainMismatch("no square-root sign choice aligns the two routes".into())
    })
}

/// Compare two intertwiners with the same source and target up to a scalar:
/// returns (ζ, residual) with ζ the entry ratio at the largest entry.
pub fn proportionality(
    a: &DMatrix<C64>,
    b: &DMatrix<C64>,
) -> Result<(C64, f64), BraidingError> {
    let mut best = (0usize, 0usize);
    let mut bestv = 0.0f64;
    for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            if b[(i, j)].norm() > bestv {
                bestv = b[(i, j)].norm();
                best = (i, j);
            }
        }
    }
    if bestv < 1e-12 {
        return Err(BraidingError::NonProportional(f64::INFINITY));
    }
    let zeta = a[best] / b[best];
    let resid = (a - b * zeta).norm() / (1.0 + a.norm());
    Ok((zeta, resid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::sample_standard;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctxn(n: u32) -> RootContext {
        RootContext::new(n, 1).unwrap()
    }

    #[test]
    fn phi_w_basics() {
        // Φ of the zero matrix is the identity: only the n = 0 term.
        for nn in [3u32, 5, 7] {
            let ctx = ctxn(nn);
            let z = DMatrix::<C64>::zeros(4, 4);
            let out = phi_w(&ctx, cone(), &z).unwrap();
            assert!((out - DMatrix::<C64>::identity(4, 4)).norm() < 1e-12);
        }
    }

    #[test]
    fn phi_w_is_truncated_q_exponential_at_w_one() {
        // Φ_{w=1}(X) is the dual truncated q-exponential of −X/(q−q⁻¹):
        // Σ_{n<N} q^{n(n−1)/2}·(−X/(q−q⁻¹))ⁿ/[n]!.
        let ctx = ctxn(5);
        let n = 5usize;
        let mut x = DMatrix::<C64>::zeros(n, n);
        for i in 0..n - 1 {
            x[(i, i + 1)] = C64::new(0.3 + i as f64 * 0.17, -0.4 + 0.05 * i as f64);
        }
        let lhs = phi_w(&ctx, cone(), &x).unwrap();
        let q = ctx.q();
        let arg = -&x / (q - cone() / q);
        let mut rhs = DMatrix::<C64>::identity(n, n);
        let mut pow = DMatrix::<C64>::identity(n, n);
        for m in 1..ctx.n {
            pow = &pow * &arg;
            let c = ctx.q_int_pow((m * (m - 1) / 2) as i64) / ctx.qfact(m).unwrap();
            rhs += &pow * c;
        }
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn phi_w_functional_equation_and_adjoint() {
        // Φ_w(q⁻²x) = w(1+q⁻¹x)Φ_w(x), and Ad(Φ_w(x))y = w⁻¹y(1+qx)⁻¹ for
        // q²-commuting pairs, on clock/shift matrices.
        for nn in [3u32, 5] {
            let ctx = ctxn(nn);
            let n = nn as usize;
            let (d, a) = clock_shift(&ctx);
            let x = &a * C64::new(0.83, 0.41); // xᴺ = cᴺ·I
            let xn = scalar_of(&mat_pow(&x, nn as i64), 1e-9).unwrap();
            let w = ctx.nth_root(cone() / (cone() + xn), 1);
            let q = ctx.q();
            let phix = phi_w(&ctx, w, &x).unwrap();
            let phiq2x = phi_w(&ctx, w, &(&x / (q * q))).unwrap();
            let id = DMatrix::<C64>::identity(n, n);
            let rhs = (&id + &x / q) * &phix * w;
            assert!((&phiq2x - rhs).norm() < 1e-9, "functional equation N={nn}");
            // y = D² q²-commutes with x = c·A: x y = q² y x.
            let y = &d * &d;
            assert!((&x * &y - &y * &x * q * q).norm() < 1e-9);
            let ad = &phix * &y * phix.clone().try_inverse().unwrap();
            let rhs2 = &y
                * (&id + &x * q)
                    .try_inverse()
                    .unwrap()
                / w;
            assert!((ad - rhs2).norm() < 1e-8, "adjoint rule N={nn}");
        }
    }

    #[test]
    fn shape_parameters_product_one() {
        // z₁z₂z₃z₄ = 1 over random admissible draws, and invariance under
        // a common unit rescaling of the shift amplitudes.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for nn in [3u32, 5] {
            let ctx = ctxn(nn);
            let pc = PairContext::new(ctx.clone()).unwrap();
            for _ in 0..8 {
                let v1 = sample_standard(&ctx, &mut rng);
                let v2 = sample_standard(&ctx, &mut rng);
                let shapes = match classical_shapes(&pc, &v1, &v2) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let prod = shapes[0].z * shapes[1].z * shapes[2].z * shapes[3].z;
                assert!((prod - cone()).norm() < 1e-9, "Thurston product N={nn}");
                let om = ctx.omega_pow(2); // a primitive N-th root of unity
                let mut v1b = v1.clone();
                let mut v2b = v2.clone();
                v1b.x1 *= om;
                v2b.x1 *= om;
                let shapes_b = classical_shapes(&pc, &v1b, &v2b).unwrap();
                for (s, sb) in shapes.iter().zip(shapes_b.iter()) {
                    assert!((s.z - sb.z).norm() < 1e-9 * (1.0 + s.z.norm()));
                }
            }
        }
    }

    #[test]
    fn classical_shapes_from_torus_scalars() {
        // The closed-form crossing scalars agree with the N-th powers of
        // the doubled-disc edge operators evaluated on V₁⊗V₂.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for nn in [3u32, 5] {
            let ctx = ctxn(nn);
            let pc = PairContext::new(ctx.clone()).unwrap();
            for _ in 0..4 {
                let v1 = sample_standard(&ctx, &mut rng);
                let v2 = sample_standard(&ctx, &mut rng);
                let (x3, x4, x5) = crossing_x(nn, &v1, &v2);
                for (i, x) in [(3usize, x3), (4, x4), (5, x5)] {
                    let m = pc.evaluate_pair(&v1, &v2, &pc.x(i)).unwrap();
                    let mn = mat_pow(&m, nn as i64);
                    let sc = scalar_of(&mn, 1e-7 * (1.0 + mn.norm())).unwrap();
                    assert!(
                        (sc - x).norm() < 1e-7 * (1.0 + sc.norm()),
                        "x{i} mismatch at N={nn}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_formula_r_is_intertwiner() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for nn in [3u32, 5] {
            let ctx = ctxn(nn);
            let pc = PairContext::new(ctx.clone()).unwrap();
            let mut done = 0;
            let mut attempts = 0;
            while done < 3 {
                attempts += 1;
                assert!(attempts < 60, "too many inadmissible draws at N={nn}");
                let v1 = sample_standard(&ctx, &mut rng);
                let v2 = sample_standard(&ctx, &mut rng);
                let r = match closed_formula_r(&pc, &v1, &v2, RootChoices::default()) {
                    Ok((r, _)) => r,
                    Err(e) => {
                        eprintln!("draw rejected: {:?}", e);
                        continue;
                    }
                };
                let det = r.matrix.clone().lu().determinant();
                assert!((det.norm() - 1.0).abs() < 1e-9, "det modulus N={nn}");
                let resid = intertwiner_residual(&pc, &r).unwrap();
                assert!(resid < 1e-7, "residual {resid} at N={nn}");
                done += 1;
            }
        }
    }

    #[test]
    fn drinfeld_r_on_scalar_modules() {
        // On the scalar cyclic module V(A⁻¹, A, 0, 0) the truncated universal
        // R-matrix is a genuine intertwiner, and it matches the closed
        // formula on the standard lifts up to an N²-th root of unity.
        for nn in [3u32, 5] {
            let ctx = ctxn(nn);
            let pc = PairContext::new(ctx.clone()).unwrap();
            let a = ctx.qhalf();
            let spec = WeightModuleSpec::Cyclic {
                lambda: cone() / a,
                mu: a,
                a: czero(),
                b: czero(),
            };
            let h = C64::new(-1.0, 0.0);
            let g = C64::new(1.0, 0.0);
            let rd = drinfeld_r(&ctx, &spec, &spec, h, g).unwrap();
            let resid = drinfeld_residual(&ctx, &spec, &spec, &rd).unwrap();
            assert!(resid < 1e-8, "Drinfel'd residual {resid} at N={nn}");
            let (zeta, prop) =
                compare_drinfeld_kashaev(&pc, &spec, &spec, h, g, RootChoices::default())
                    .unwrap();
            assert!(prop < 1e-6, "proportionality residual {prop} at N={nn}");
            let defect = (zeta.powu(nn * nn) - cone()).norm();
            assert!(defect < 1e-5, "ζ^(N²) defect {defect} at N={nn}");
        }
    }

    #[test]
    fn yang_baxter_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for (nn, want) in [(3u32, 3usize), (5, 1)] {
            let ctx = ctxn(nn);
            let pc = PairContext::new(ctx.clone()).unwrap();
            let mut done = 0;
            let mut attempts = 0;
            while done < want {
                attempts += 1;
                assert!(attempts < 80, "too many inadmissible draws at N={nn}");
                let v1 = sample_standard(&ctx, &mut rng);
                let v2 = sample_standard(&ctx, &mut rng);
                let v3 = sample_standard(&ctx, &mut rng);
                let rep = match yang_baxter_check(&pc, &v1, &v2, &v3) {
                    Ok(r) => r,
                    Err(e) => {
                        eprintln!("triple rejected: {:?}", e);
                        continue;
                    }
                };
                assert!(rep.residual < 1e-6, "YB residual {} at N={nn}", rep.residual);
                assert!(
                    rep.c_root_defect < 1e-5,
                    "c^(N²) defect {} at N={nn}",
                    rep.c_root_defect
                );
                done += 1;
            }
        }
    }
}
