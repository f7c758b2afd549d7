//! Matrix representations: weight modules of the quantum group, standard
//! modules of the Δ₁ quantum torus, the dictionaries between the two, and
//! classical-shadow invariants.

use crate::qgroup::GeneratorSet;
use crate::scalars::{C64, RootContext};
use crate::torus::{TorusElement, TorusError};
use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("module does not extend to a standard torus module: {0}")]
    NotExtendable(String),
    #[error("central element does not act as a scalar (deviation {0:.3e})")]
    NotScalarCenter(f64),
    #[error("central characters do not match")]
    NoMatch,
    #[error("realignment recurrence inconsistent: {0}")]
    RecurrenceInconsistent(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// One of the three weight-module families.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightModuleSpec {
    /// Finite-weight family, dimension n+1.
    Diag { mu: C64, sign: i8, n: u32 },
    /// Dimension-N family with cyclic F-action parameter b and E-parameter a.
    Cyclic { lambda: C64, mu: C64, a: C64, b: C64 },
    /// Dimension-N family with cyclic E-action parameter c.
    Semi { lambda: C64, mu: C64, c: C64 },
}

impl WeightModuleSpec {
    pub fn dim(&self, _n_root: u32) -> usize {
        match self {
            WeightModuleSpec::Diag { n, .. } => (*n as usize) + 1,
            _ => _n_root as usize,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let c2 = |z: C64| serde_json::json!([z.re, z.im]);
        match self {
            WeightModuleSpec::Diag { mu, sign, n } => serde_json::json!({
                "family": "diag", "mu": c2(*mu), "sign": *sign, "n": *n
            }),
            WeightModuleSpec::Cyclic { lambda, mu, a, b } => serde_json::json!({
                "family": "cyclic", "lambda": c2(*lambda), "mu": c2(*mu),
                "a": c2(*a), "b": c2(*b)
            }),
            WeightModuleSpec::Semi { lambda, mu, c } => serde_json::json!({
                "family": "semi", "lambda": c2(*lambda), "mu": c2(*mu), "c": c2(*c)
            }),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let cx = |v: &serde_json::Value| -> Result<C64, String> {
            let a = v.as_array().ok_or("complex must be [re, im]")?;
            Ok(C64::new(
                a[0].as_f64().ok_or("bad re")?,
                a[1].as_f64().ok_or("bad im")?,
            ))
        };
        match v["family"].as_str().ok_or("missing 'family'")? {
            "diag" => Ok(WeightModuleSpec::Diag {
                mu: cx(&v["mu"])?,
                sign: v["sign"].as_i64().ok_or("missing 'sign'")? as i8,
                n: v["n"].as_u64().ok_or("missing 'n'")? as u32,
            }),
            "cyclic" => Ok(WeightModuleSpec::Cyclic {
                lambda: cx(&v["lambda"])?,
                mu: cx(&v["mu"])?,
                a: cx(&v["a"])?,
                b: cx(&v["b"])?,
            }),
            "semi" => Ok(WeightModuleSpec::Semi {
                lambda: cx(&v["lambda"])?,
                mu: cx(&v["mu"])?,
                c: cx(&v["c"])?,
            }),
            f => Err(format!("unknown family '{f}'")),
        }
    }
}

/// Parameters of a standard module of the Δ₁ quantum torus.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardModuleSpec {
    pub x1: C64,
    pub lambda: C64,
    pub hp: C64,
    pub hdel: C64,
}

impl StandardModuleSpec {
    pub fn to_json(&self) -> serde_json::Value {
        let c2 = |z: C64| serde_json::json!([z.re, z.im]);
        serde_json::json!({
            "x1": c2(self.x1), "lambda": c2(self.lambda),
            "hp": c2(self.hp), "hdel": c2(self.hdel)
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let cx = |v: &serde_json::Value| -> Result<C64, String> {
            let a = v.as_array().ok_or("complex must be [re, im]")?;
            Ok(C64::new(
                a[0].as_f64().ok_or("bad re")?,
                a[1].as_f64().ok_or("bad im")?,
            ))
        };
        Ok(StandardModuleSpec {
            x1: cx(&v["x1"])?,
            lambda: cx(&v["lambda"])?,
            hp: cx(&v["hp"])?,
            hdel: cx(&v["hdel"])?,
        })
    }
}

/// Realized generator matrices of a module.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub dim: usize,
    pub e: DMatrix<C64>,
    pub f: DMatrix<C64>,
    pub khalf: DMatrix<C64>,
    pub lhalf: DMatrix<C64>,
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// If `m` is within `eps`·scale of a scalar matrix, return that scalar.
pub fn scalar_of(m: &DMatrix<C64>, eps: f64) -> Option<C64> {
    let n = m.nrows();
    let s = m.trace() / C64::new(n as f64, 0.0);
    let dev = (m - DMatrix::<C64>::identity(n, n) * s).norm();
    let scale = 1.0 + m.norm();
    if dev <= eps * scale {
        Some(s)
    } else {
        None
    }
}

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

impl MatrixRep {
    pub fn id(&self) -> DMatrix<C64> {
        DMatrix::identity(self.dim, self.dim)
    }
    pub fn khalf_inv(&self) -> DMatrix<C64> {
        self.khalf.clone().try_inverse().expect("K^{1/2} invertible")
    }
    pub fn lhalf_inv(&self) -> DMatrix<C64> {
        self.lhalf.clone().try_inverse().expect("L^{1/2} invertible")
    }
    pub fn k(&self) -> DMatrix<C64> {
        &self.khalf * &self.khalf
    }
    pub fn l(&self) -> DMatrix<C64> {
        &self.lhalf * &self.lhalf
    }
    pub fn kinv(&self) -> DMatrix<C64> {
        let m = self.khalf_inv();
        &m * &m
    }
    pub fn linv(&self) -> DMatrix<C64> {
        let m = self.lhalf_inv();
        &m * &m
    }
    /// H_∂ = K^{-1/2}L^{-1/2}.
    pub fn hdel(&self) -> DMatrix<C64> {
        self.khalf_inv() * self.lhalf_inv()
    }
    /// T = −H_∂(q⁻¹K + qL) − (q−q⁻¹)²EFH_∂.
    pub fn t_mat(&self, ctx: &RootContext) -> DMatrix<C64> {
        let q = ctx.q();
        let qq = q - 1.0 / q;
        let hdel = self.hdel();
        -(&hdel * (self.k() * (1.0 / q) + self.l() * q))
            - (&self.e * &self.f * &hdel) * (qq * qq)
    }
    /// Casimir C = EF + (qL + q⁻¹K)/(q−q⁻¹)².
    pub fn casimir(&self, ctx: &RootContext) -> DMatrix<C64> {
        let q = ctx.q();
        let qq = q - 1.0 / q;
        &self.e * &self.f + (self.l() * q + self.k() * (1.0 / q)) * (1.0 / (qq * qq))
    }

    /// Maximum residual over the defining relations.
    pub fn relation_residual(&self, ctx: &RootContext) -> f64 {
        let q = ctx.q();
        let qq = q - 1.0 / q;
        let mut r: f64 = 0.0;
        let mut acc = |m: DMatrix<C64>| {
            let v = m.norm();
            if v > r {
                r = v;
            }
        };
        acc(&self.e * &self.khalf - &self.khalf * &self.e * (1.0 / q));
        acc(&self.e * &self.lhalf - &self.lhalf * &self.e * q);
        acc(&self.f * &self.khalf - &self.khalf * &self.f * q);
        acc(&self.f * &self.lhalf - &self.lhalf * &self.f * (1.0 / q));
        acc(&self.khalf * &self.lhalf - &self.lhalf * &self.khalf);
        acc(
            (&self.e * &self.f - &self.f * &self.e)
                - (self.k() - self.l()) * (1.0 / qq),
        );
        r
    }

    /// Residual of the degree-N central relation
    /// T_N(T) + K^{N/2}L^{−N/2} + L^{N/2}K^{−N/2} + (q−q⁻¹)^{2N}EᴺFᴺH_∂ᴺ = 0
    /// as matrices.
    pub fn center_relation_residual(&self, ctx: &RootContext) -> f64 {
        let n = ctx.n;
        let q = ctx.q();
        let qq = q - 1.0 / q;
        let t = self.t_mat(ctx);
        // Chebyshev on the matrix T.
        let id = self.id();
        let mut t0 = &id * C64::new(2.0, 0.0);
        let mut t1 = t.clone();
        for _ in 2..=n {
            let t2 = &t * &t1 - &t0;
            t0 = t1;
            t1 = t2;
        }
        let tn = if n == 1 { t.clone() } else { t1 };
        let khn = mat_pow(&self.khalf, n as i64);
        let lhn = mat_pow(&self.lhalf, n as i64);
        let khn_inv = mat_pow(&self.khalf_inv(), n as i64);
        let lhn_inv = mat_pow(&self.lhalf_inv(), n as i64);
        let en = mat_pow(&self.e, n as i64);
        let fnm = mat_pow(&self.f, n as i64);
        let hdn = mat_pow(&self.hdel(), n as i64);
        let res = tn + &khn * &lhn_inv + &lhn * &khn_inv
            + en * fnm * hdn * qq.powu(2 * n);
        res.norm()
    }

    /// Scalars of the central elements (Eᴺ, Fᴺ, K^{N/2}, L^{N/2}, T, H_∂),
    /// or an error if any fails to act as a scalar.
    pub fn central_scalars(&self, ctx: &RootContext) -> Result<CentralScalars, RepError> {
        let n = ctx.n as i64;
        let get = |m: &DMatrix<C64>| {
            scalar_of(m, ctx.eps).ok_or_else(|| {
                let s = m.trace() / C64::new(m.nrows() as f64, 0.0);
                let dev = (m - DMatrix::<C64>::identity(m.nrows(), m.nrows()) * s).norm();
                RepError::NotScalarCenter(dev)
            })
        };
        Ok(CentralScalars {
            en: get(&mat_pow(&self.e, n))?,
            fn_: get(&mat_pow(&self.f, n))?,
            khn: get(&mat_pow(&self.khalf, n))?,
            lhn: get(&mat_pow(&self.lhalf, n))?,
            t: get(&self.t_mat(ctx))?,
            hdel: get(&self.hdel())?,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CentralScalars {
    pub en: C64,
    pub fn_: C64,
    pub khn: C64,
    pub lhn: C64,
    pub t: C64,
    pub hdel: C64,
}

pub fn mat_pow(m: &DMatrix<C64>, e: i64) -> DMatrix<C64> {
    let dim = m.nrows();
    let base = if e < 0 {
        m.clone().try_inverse().expect("matrix invertible")
    } else {
        m.clone()
    };
    let mut acc = DMatrix::<C64>::identity(dim, dim);
    let mut sq = base;
    let mut e = e.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        sq = &sq * &sq;
        e >>= 1;
    }
    acc
}

/// Build the generator matrices of a weight module.
pub fn build_rep(ctx: &RootContext, spec: &WeightModuleSpec) -> Result<MatrixRep, RepError> {
    let nn = ctx.n;
    let q = ctx.q();
    let qq = q - 1.0 / q;
    match spec {
        WeightModuleSpec::Diag { mu, sign, n } => {
            if *n >= nn {
                return Err(RepError::InvalidParameters(format!(
                    "n = {n} must be < N = {nn}"
                )));
            }
            if mu.norm() == 0.0 {
                return Err(RepError::InvalidParameters("mu must be nonzero".into()));
            }
            let eps_s = C64::new(*sign as f64, 0.0);
            let d = (*n as usize) + 1;
            let a = ctx.a();
            let mut khalf = DMatrix::<C64>::zeros(d, d);
            let mut lhalf = DMatrix::<C64>::zeros(d, d);
            let mut e = DMatrix::<C64>::zeros(d, d);
            let mut f = DMatrix::<C64>::zeros(d, d);
            for i in 0..d {
                let ii = i as i32;
                khalf[(i, i)] = eps_s * mu * a.powi(*n as i32 - 2 * ii);
                lhalf[(i, i)] = mu * a.powi(2 * ii - *n as i32);
                if i + 1 < d {
                    f[(i + 1, i)] = cone();
                }
                if i >= 1 {
                    e[(i - 1, i)] =
                        mu * mu * ctx.qint(i as i64) * ctx.qint(*n as i64 - i as i64 + 1);
                }
            }
            Ok(MatrixRep {
                dim: d,
                e,
                f,
                khalf,
                lhalf,
            })
        }
        WeightModuleSpec::Cyclic { lambda, mu, a, b } => {
            if lambda.norm() == 0.0 || mu.norm() == 0.0 {
                return Err(RepError::InvalidParameters(
                    "lambda, mu must be nonzero".into(),
                ));
            }
            let d = nn as usize;
            let mut khalf = DMatrix::<C64>::zeros(d, d);
            let mut lhalf = DMatrix::<C64>::zeros(d, d);
            let mut e = DMatrix::<C64>::zeros(d, d);
            let mut f = DMatrix::<C64>::zeros(d, d);
            for i in 0..d {
                khalf[(i, i)] = lambda * ctx.q_int_pow(-(i as i64));
                lhalf[(i, i)] = mu * ctx.q_int_pow(i as i64);
                if i + 1 < d {
                    f[(i + 1, i)] = cone();
                }
                if i >= 1 {
                    let qi = i as i64;
                    let coef = (ctx.q_int_pow(-qi + 1) * lambda * lambda
                        - ctx.q_int_pow(qi - 1) * mu * mu)
                        / qq
                        * ctx.qint(qi)
                        + a * b;
                    e[(i - 1, i)] = coef;
                }
            }
            f[(0, d - 1)] = *b;
            e[(d - 1, 0)] = *a;
            Ok(MatrixRep {
                dim: d,
                e,
                f,
                khalf,
                lhalf,
            })
        }
        WeightModuleSpec::Semi { lambda, mu, c } => {
            if lambda.norm() == 0.0 || mu.norm() == 0.0 {
                return Err(RepError::InvalidParameters(
                    "lambda, mu must be nonzero".into(),
                ));
            }
            let d = nn as usize;
            let mut khalf = DMatrix::<C64>::zeros(d, d);
            let mut lhalf = DMatrix::<C64>::zeros(d, d);
            let mut e = DMatrix::<C64>::zeros(d, d);
            let mut f = DMatrix::<C64>::zeros(d, d);
            for i in 0..d {
                khalf[(i, i)] = lambda * ctx.q_int_pow(i as i64);
                lhalf[(i, i)] = mu * ctx.q_int_pow(-(i as i64));
                if i + 1 < d {
                    e[(i + 1, i)] = cone();
                }
            }
            e[(0, d - 1)] = *c;
            // F w_{i+1} = ((μ²q^{−i} − λ²q^{i})/(q−q⁻¹))[i+1] w_i, the action
            // forced by EF − FE = (K−L)/(q−q⁻¹); F w₀ = 0.
            for i in 0..(d - 1) {
                let qi = i as i64;
                f[(i, i + 1)] = (mu * mu * ctx.q_int_pow(-qi)
                    - lambda * lambda * ctx.q_int_pow(qi))
                    / qq
                    * ctx.qint(qi + 1);
            }
            Ok(MatrixRep {
                dim: d,
                e,
                f,
                khalf,
                lhalf,
            })
        }
    }
}

/// Matrix of a torus element on the standard module `std`: each Weyl
/// monomial Z^k is decomposed integrally over the generator lattice
/// (H_∂, H_p, [Z₁Z₃Z₄], X₁), with the Weyl-ordering ω-phase restored.
pub fn evaluate_torus(std: &StandardModuleSpec, elt: &TorusElement) -> Result<DMatrix<C64>, RepError> {
    let ctx = &elt.alg.root;
    let n = ctx.n as usize;
    assert_eq!(elt.tri.num_edges, 4, "standard modules live over the disc");
    // ρ([Z₁Z₃Z₄]) = λ⁻¹·diag(qⁱ); ρ(X₁) = shift with x₁ in the corner.
    let mut dmat = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        dmat[(i, i)] = ctx.q_int_pow(i as i64) / std.lambda;
    }
    let mut x1 = DMatrix::<C64>::zeros(n, n);
    x1[(n - 1, 0)] = std.x1;
    for i in 1..n {
        x1[(i - 1, i)] = cone();
    }
    let gens_mats: [DMatrix<C64>; 4] = [
        DMatrix::identity(n, n) * std.hdel,
        DMatrix::identity(n, n) * std.hp,
        dmat,
        x1,
    ];
    let mut out = DMatrix::<C64>::zeros(n, n);
    for (k, coeff) in &elt.terms {
        let coords = elt.tri.lattice_coordinates(k)?;
        // Weyl phase: Z^k = ω^{−s}·Π_i Z^{c_i g_i} with
        // s = Σ_{i<j} c_i c_j ⟨g_i, g_j⟩.
        let mut s = 0i64;
        for i in 0..4 {
            for j in (i + 1)..4 {
                s += coords[i]
                    * coords[j]
                    * elt.tri
                        .pairing(&elt.tri.generator_lattice[i], &elt.tri.generator_lattice[j]);
            }
        }
        let mut m = DMatrix::<C64>::identity(n, n) * (coeff.to_complex(&elt.alg) * ctx.omega_pow(-s));
        for (g, c) in gens_mats.iter().zip(coords.iter()) {
            if *c != 0 {
                m = m * mat_pow(g, *c);
            }
        }
        out += m;
    }
    Ok(out)
}

/// The standard module as a quantum-group representation, by evaluating the
/// generator torus elements.
pub fn standard_rep(
    gens: &GeneratorSet,
    std: &StandardModuleSpec,
) -> Result<MatrixRep, RepError> {
    Ok(MatrixRep {
        dim: gens.alg.root.n as usize,
        e: evaluate_torus(std, &gens.e)?,
        f: evaluate_torus(std, &gens.f)?,
        khalf: evaluate_torus(std, &gens.khalf)?,
        lhalf: evaluate_torus(std, &gens.lhalf)?,
    })
}

/// Which branch of the standard↔weight dictionary applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictionaryBranch {
    /// (h_∂h_pλ²)ᴺ ≠ −1: target has b ≠ 0.
    Generic,
    /// (h_∂h_pλ²)ᴺ = −1: target has b = 0.
    Degenerate,
}

/// Restrict a standard module to the quantum group and identify it with a
/// weight module: returns the module spec, the change-of-basis matrix P
/// (columns = new basis in the standard basis), and the branch taken.
pub fn standard_to_weight(
    gens: &GeneratorSet,
    std: &StandardModuleSpec,
) -> Result<(WeightModuleSpec, DMatrix<C64>, DictionaryBranch), RepError> {
    let ctx = &gens.alg.root;
    let n = ctx.n;
    let q = ctx.q();
    let qq = q - 1.0 / q;
    let v = std.hdel * std.hp * std.lambda * std.lambda;
    let vn = v.powu(n);
    let mu = 1.0 / (std.lambda * std.hdel);
    let f_w = evaluate_torus(std, &gens.f)?;
    let dim = n as usize;
    if (vn + cone()).norm() > 1e-6 {
        // Generic branch: basis v_i = Fⁱe₀.
        let a = -qq.powu(n - 2) * std.x1
            * ((std.hp + 1.0 / std.hp) / std.hdel + q * std.lambda * std.lambda + mu * mu / q)
            / (cone() + 1.0 / vn);
        let b = (cone() + 1.0 / vn) / (std.x1 * qq.powu(n));
        let mut p = DMatrix::<C64>::zeros(dim, dim);
        let mut col = DMatrix::<C64>::zeros(dim, 1);
        col[(0, 0)] = cone();
        for j in 0..dim {
            p.set_column(j, &col.column(0));
            col = &f_w * col;
        }
        Ok((
            WeightModuleSpec::Cyclic {
                lambda: std.lambda,
                mu,
                a,
                b,
            },
            p,
            DictionaryBranch::Generic,
        ))
    } else {
        // Degenerate branch: h_∂h_pλ² = −q^{2i₀+1} (the F-chain link out of
        // e_{i₀} vanishes); basis v_i = Fⁱe_{i₀+1}.
        let mut i0 = None;
        for i in 0..n as i64 {
            if (v + ctx.q_int_pow(2 * i + 1)).norm() < 1e-6 {
                i0 = Some(i);
                break;
            }
        }
        let i0 = i0.ok_or_else(|| {
            RepError::InvalidParameters(
                "(h_del·h_p·lambda²)^N = −1 but no q-power index matches".into(),
            )
        })?;
        let start = ((i0 + 1) % n as i64) as usize;
        let lam2 = std.lambda * ctx.q_int_pow(-(i0 + 1));
        let mu2 = mu * ctx.q_int_pow(i0 + 1);
        // Divide χ(Eᴺ), measured on the torus action, by the product of the
        // E-coefficients of V(λ₂, μ₂, ·, 0) to recover a.
        let e_w = evaluate_torus(std, &gens.e)?;
        let chi_en = scalar_of(&mat_pow(&e_w, n as i64), 1e-7).ok_or_else(|| {
            RepError::NotScalarCenter(0.0)
        })?;
        let mut prod = cone();
        for i in 1..n as i64 {
            prod *= (ctx.q_int_pow(1 - i) * lam2 * lam2 - ctx.q_int_pow(i - 1) * mu2 * mu2)
                / qq
                * ctx.qint(i);
        }
        let a = if prod.norm() < 1e-12 {
            czero()
        } else {
            chi_en / prod
        };
        let mut p = DMatrix::<C64>::zeros(dim, dim);
        let mut col = DMatrix::<C64>::zeros(dim, 1);
        col[(start, 0)] = cone();
        for j in 0..dim {
            p.set_column(j, &col.column(0));
            col = &f_w * col;
        }
        Ok((
            WeightModuleSpec::Cyclic {
                lambda: lam2,
                mu: mu2,
                a,
                b: czero(),
            },
            p,
            DictionaryBranch::Degenerate,
        ))
    }
}

/// Identify a weight module (cyclic or semi-cyclic family) with a standard
/// module of the quantum torus, or report why none exists.
pub fn weight_to_standard(
    ctx: &RootContext,
    spec: &WeightModuleSpec,
) -> Result<StandardModuleSpec, RepError> {
    let n = ctx.n;
    let q = ctx.q();
    let qq = q - 1.0 / q;
    match spec {
        WeightModuleSpec::Diag { .. } => Err(RepError::InvalidParameters(
            "finite-weight family does not extend; use the cyclic or semi-cyclic family"
                .into(),
        )),
        WeightModuleSpec::Semi { lambda, mu, c } => {
            // Bridge to the cyclic family: Ṽ(λ,μ,c) ≅ V(λq⁻¹, μq, a, 0).
            let lam2 = lambda / q;
            let mu2 = mu * q;
            let mut prod = cone();
            for i in 1..n as i64 {
                prod *= (ctx.q_int_pow(1 - i) * lam2 * lam2
                    - ctx.q_int_pow(i - 1) * mu2 * mu2)
                    / qq
                    * ctx.qint(i);
            }
            if prod.norm() < 1e-9 {
                if c.norm() < 1e-12 {
                    // Diagonal member of the semi-cyclic family.
                    return weight_to_standard(
                        ctx,
                        &WeightModuleSpec::Cyclic {
                            lambda: lam2,
                            mu: mu2,
                            a: czero(),
                            b: czero(),
                        },
                    );
                }
                return Err(RepError::NotExtendable(
                    "semi-cyclic module with unipotent shadow (λμ⁻¹ a 2N-th root of unity)"
                        .into(),
                ));
            }
            weight_to_standard(
                ctx,
                &WeightModuleSpec::Cyclic {
                    lambda: lam2,
                    mu: mu2,
                    a: c / prod,
                    b: czero(),
                },
            )
        }
        WeightModuleSpec::Cyclic { lambda, mu, a, b } => {
            let rep = build_rep(ctx, spec)?;
            let en = scalar_of(&mat_pow(&rep.e, n as i64), 1e-9).unwrap_or(czero());
            let fnv = scalar_of(&mat_pow(&rep.f, n as i64), 1e-9).unwrap_or(czero());
            let hdel = 1.0 / (lambda * mu);
            if fnv.norm() > 1e-9 {
                // Cyclic F-side: h_p is a root of
                // X² + (λμ)⁻¹(ab(q−q⁻¹)² + qλ² + q⁻¹μ²)X + 1, selected so the
                // reconstructed a matches the input.
                let pcoef = hdel * (a * b * qq * qq + q * lambda * lambda + mu * mu / q);
                let disc = (pcoef * pcoef - C64::new(4.0, 0.0)).sqrt();
                let roots = [(-pcoef + disc) / 2.0, (-pcoef - disc) / 2.0];
                let mut best: Option<(f64, StandardModuleSpec)> = None;
                for hp in roots {
                    let v = hdel * hp * lambda * lambda;
                    let vn_inv = 1.0 / v.powu(n);
                    if (cone() + vn_inv).norm() < 1e-9 {
                        continue;
                    }
                    let x1 = (cone() + vn_inv) / (b * qq.powu(n));
                    let a_cand = -qq.powu(n - 2) * x1
                        * ((hp + 1.0 / hp) / hdel + q * lambda * lambda + mu * mu / q)
                        / (cone() + vn_inv);
                    let err = (a_cand - a).norm();
                    let cand = StandardModuleSpec {
                        x1,
                        lambda: *lambda,
                        hp,
                        hdel,
                    };
                    if best.as_ref().map(|(e, _)| err < *e).unwrap_or(true) {
                        best = Some((err, cand));
                    }
                }
                best.map(|(_, s)| s).ok_or_else(|| {
                    RepError::InvalidParameters("no admissible h_p root".into())
                })
            } else if en.norm() > 1e-9 {
                // Semi-cyclic: requires (λμ⁻¹)²ᴺ ≠ 1.
                let r = (lambda / mu).powu(2 * n);
                if (r - cone()).norm() < 1e-6 {
                    return Err(RepError::NotExtendable(
                        "semi-cyclic module with unipotent shadow (λμ⁻¹ a 2N-th root of unity)"
                            .into(),
                    ));
                }
                let hp = -mu / (lambda * q);
                let lam_w = branch2_lambda(ctx, *lambda, hp, hdel)?;
                // χ(Eᴺ) = −x₁((h_∂⁻¹h_p)ᴺ + λ_Wᴺ²)/(q−q⁻¹)ᴺ  ⟹  x₁.
                let denom = (hp / hdel).powu(n) + lam_w.powu(2 * n);
                let x1 = -en * qq.powu(n) / denom;
                Ok(StandardModuleSpec {
                    x1,
                    lambda: lam_w,
                    hp,
                    hdel,
                })
            } else {
                // Diagonal: extends only in the scalar case (λμ⁻¹)²ᴺ = 1.
                let r = (lambda / mu).powu(2 * n);
                if (r - cone()).norm() > 1e-6 {
                    return Err(RepError::NotExtendable(
                        "diagonal non-scalar module".into(),
                    ));
                }
                // h_p = −(λμ⁻¹)ᴺ ∈ {±1} puts the module in the b = 0 branch.
                let s = (lambda / mu).powu(n);
                let hp = if (s - cone()).norm() < (s + cone()).norm() {
                    C64::new(-1.0, 0.0)
                } else {
                    cone()
                };
                let lam_w = branch2_lambda(ctx, *lambda, hp, hdel)?;
                Ok(StandardModuleSpec {
                    x1: cone(),
                    lambda: lam_w,
                    hp,
                    hdel,
                })
            }
        }
    }
}

/// Choose λ_W = Λ·q^{i₀+1} so that the degenerate-branch index i₀ computed
/// from h_∂h_pλ_W² = −q^{2i₀+1} matches the shift, making the roundtrip
/// through `standard_to_weight` return exactly Λ.
fn branch2_lambda(
    ctx: &RootContext,
    lambda_target: C64,
    hp: C64,
    hdel: C64,
) -> Result<C64, RepError> {
    let n = ctx.n as i64;
    for s in 0..n {
        let lam_w = lambda_target * ctx.q_int_pow(s);
        let v = hdel * hp * lam_w * lam_w;
        for i0 in 0..n {
            if (v + ctx.q_int_pow(2 * i0 + 1)).norm() < 1e-6 && (i0 + 1) % n == s % n {
                return Ok(lam_w);
            }
        }
    }
    Err(RepError::InvalidParameters(
        "no shift aligns the degenerate-branch index (is (h_∂h_pλ²)^N = −1?)".into(),
    ))
}

/// Shadow of an indecomposable module: the pair of triangular 2×2 matrices
/// of N-th power characters, plus the puncture and boundary invariants.
#[derive(Debug, Clone)]
pub struct CentralCharacter {
    pub gminus: [[C64; 2]; 2],
    pub gplus: [[C64; 2]; 2],
    /// Scalar of T; `None` for decomposable modules (e.g. tensor products),
    /// where T acts with several eigenvalues.
    pub t: Option<C64>,
    pub hdel: C64,
}

pub fn mul2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[czero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det2(a: &[[C64; 2]; 2]) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn inv2(a: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let d = det2(a);
    [
        [a[1][1] / d, -a[0][1] / d],
        [-a[1][0] / d, a[0][0] / d],
    ]
}

impl CentralCharacter {
    /// φ(g) = −g₋⁻¹g₊. The global sign is forced by the degree-N center
    /// identity: its diagonal contribution to tr φ must be −(λμ⁻¹)ᴺ−(μλ⁻¹)ᴺ,
    /// so that T_N(t) = tr φ(g) holds for every module.
    pub fn phi(&self) -> [[C64; 2]; 2] {
        let m = mul2(&inv2(&self.gminus), &self.gplus);
        [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]]
    }
    pub fn tr_phi(&self) -> C64 {
        let p = self.phi();
        p[0][0] + p[1][1]
    }
}

pub fn classical_shadow(ctx: &RootContext, rep: &MatrixRep) -> Result<CentralCharacter, RepError> {
    let n = ctx.n as i64;
    let q = ctx.q();
    let qq = q - 1.0 / q;
    let a = ctx.a();
    let get = |m: DMatrix<C64>| {
        scalar_of(&mat_pow(&m, n), ctx.eps).ok_or_else(|| RepError::NotScalarCenter(0.0))
    };
    let khalf_inv = rep.khalf_inv();
    let lhalf_inv = rep.lhalf_inv();
    // Upper-triangular factor from the K-family arcs; the off-diagonal arc
    // image is −A⁻¹(q−q⁻¹)EK^{−1/2}.
    let gplus = [
        [
            get(khalf_inv.clone())?,
            get(&rep.e * &khalf_inv * (-qq / a))?,
        ],
        [czero(), get(rep.khalf.clone())?],
    ];
    // Lower-triangular factor from the L-family arcs; the off-diagonal arc
    // image is A(q−q⁻¹)L^{−1/2}F.
    let gminus = [
        [get(lhalf_inv.clone())?, czero()],
        [get(&lhalf_inv * &rep.f * (a * qq))?, get(rep.lhalf.clone())?],
    ];
    let t = scalar_of(&rep.t_mat(ctx), ctx.eps);
    let hdel = scalar_of(&rep.hdel(), ctx.eps).ok_or(RepError::NotScalarCenter(0.0))?;
    Ok(CentralCharacter {
        gminus,
        gplus,
        t,
        hdel,
    })
}

/// Tensor product representation via the coproduct.
pub fn tensor_rep(r1: &MatrixRep, r2: &MatrixRep) -> MatrixRep {
    let id1 = r1.id();
    let id2 = r2.id();
    MatrixRep {
        dim: r1.dim * r2.dim,
        e: kron(&id1, &r2.e) + kron(&r1.e, &r2.k()),
        f: kron(&r1.f, &id2) + kron(&r1.l(), &r2.f),
        khalf: kron(&r1.khalf, &r2.khalf),
        lhalf: kron(&r1.lhalf, &r2.lhalf),
    }
}

/// Basis of the space of equivariant maps r1 → r2 (null space of the
/// stacked commutation system over the four generators).
pub fn intertwiner_space(ctx: &RootContext, r1: &MatrixRep, r2: &MatrixRep) -> Vec<DMatrix<C64>> {
    let (d1, d2) = (r1.dim, r2.dim);
    let rows = 4 * d1 * d2;
    let cols = d1 * d2;
    let mut sys = DMatrix::<C64>::zeros(rows, cols);
    let gens1 = [&r1.e, &r1.f, &r1.khalf, &r1.lhalf];
    let gens2 = [&r2.e, &r2.f, &r2.khalf, &r2.lhalf];
    for (gi, (g1, g2)) in gens1.iter().zip(gens2.iter()).enumerate() {
        // vec(ρ₂(g)M − Mρ₁(g)) = (I⊗ρ₂(g) − ρ₁(g)ᵀ⊗I)·vec(M), column-major.
        let block = kron(&DMatrix::identity(d1, d1), g2)
            - kron(&g1.transpose(), &DMatrix::identity(d2, d2));
        sys.view_mut((gi * d1 * d2, 0), (d1 * d2, cols))
            .copy_from(&block);
    }
    let svd = sys.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = ctx.eps * (1.0 + smax);
    let mut basis = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            let row = vt.row(i);
            let mut m = DMatrix::<C64>::zeros(d2, d1);
            for c in 0..cols {
                m[(c % d2, c / d2)] = row[c].conj();
            }
            basis.push(m);
        }
    }
    // Rows of V^T beyond the number of singular values (rows > cols case
    // does not occur here since sys is tall: cols ≤ rows).
    basis
}

pub fn commutant_dim(ctx: &RootContext, rep: &MatrixRep) -> usize {
    intertwiner_space(ctx, rep, rep).len()
}

#[derive(Debug, Clone)]
pub struct ExactSequenceReport {
    pub equivariance_residual: f64,
    pub rank_i: usize,
    pub rank_p: usize,
    pub splits: bool,
    pub section_residual: f64,
}

/// The short exact sequence of weight modules
/// 0 → V_{μ,ε,N−n−2} → V(εμAⁿ, μA⁻ⁿ, 0, 0) → V_{μ,ε,n} → 0:
/// builds the explicit maps, checks equivariance and exactness, and verifies
/// the sequence does not split by showing the equivariant-section system has
/// no solution.
pub fn exact_sequence_check(
    ctx: &RootContext,
    mu: C64,
    sign: i8,
    n: u32,
) -> Result<ExactSequenceReport, RepError> {
    let nn = ctx.n;
    assert!(n <= nn - 2);
    let a = ctx.a();
    let eps_s = C64::new(sign as f64, 0.0);
    let big = build_rep(
        ctx,
        &WeightModuleSpec::Cyclic {
            lambda: eps_s * mu * a.powi(n as i32),
            mu: mu * a.powi(-(n as i32)),
            a: czero(),
            b: czero(),
        },
    )?;
    let sub = build_rep(
        ctx,
        &WeightModuleSpec::Diag {
            mu,
            sign,
            n: nn - n - 2,
        },
    )?;
    let quot = build_rep(ctx, &WeightModuleSpec::Diag { mu, sign, n })?;
    let nb = nn as usize;
    let ds = sub.dim;
    let dq = quot.dim;
    // i(e_j) = v_{j+n+1};  p(v_j) = e_j for j ≤ n, else 0.
    let mut imap = DMatrix::<C64>::zeros(nb, ds);
    for j in 0..ds {
        imap[(j + n as usize + 1, j)] = cone();
    }
    let mut pmap = DMatrix::<C64>::zeros(dq, nb);
    for j in 0..dq {
        pmap[(j, j)] = cone();
    }
    let mut resid: f64 = 0.0;
    for (gb, gs, gq) in [
        (&big.e, &sub.e, &quot.e),
        (&big.f, &sub.f, &quot.f),
        (&big.khalf, &sub.khalf, &quot.khalf),
        (&big.lhalf, &sub.lhalf, &quot.lhalf),
    ] {
        resid = resid.max((gb * &imap - &imap * gs).norm());
        resid = resid.max((&pmap * gb - gq * &pmap).norm());
    }
    let rank = |m: &DMatrix<C64>| {
        let sv = m.clone().svd(false, false).singular_values;
        let smax = sv.iter().cloned().fold(0.0f64, f64::max);
        sv.iter().filter(|s| **s > ctx.eps * (1.0 + smax)).count()
    };
    let rank_i = rank(&imap);
    let rank_p = rank(&pmap);
    // Section r: quot → big with p∘r = id and equivariance; least squares.
    let cols = nb * dq;
    let mut rows_list: Vec<DMatrix<C64>> = Vec::new();
    let mut rhs_list: Vec<DMatrix<C64>> = Vec::new();
    for (gb, gq) in [
        (&big.e, &quot.e),
        (&big.f, &quot.f),
        (&big.khalf, &quot.khalf),
        (&big.lhalf, &quot.lhalf),
    ] {
        // vec(gb·r − r·gq) = (I⊗gb − gqᵀ⊗I)vec(r).
        rows_list.push(
            kron(&DMatrix::identity(dq, dq), gb)
                - kron(&gq.transpose(), &DMatrix::identity(nb, nb)),
        );
        rhs_list.push(DMatrix::zeros(nb * dq, 1));
    }
    // vec(p·r) = (I⊗p)vec(r) = vec(I_dq).
    rows_list.push(kron(&DMatrix::identity(dq, dq), &pmap));
    let mut id_vec = DMatrix::<C64>::zeros(dq * dq, 1);
    for j in 0..dq {
        id_vec[(j * dq + j, 0)] = cone();
    }
    rhs_list.push(id_vec);
    let total_rows: usize = rows_list.iter().map(|m| m.nrows()).sum();
    let mut sys = DMatrix::<C64>::zeros(total_rows, cols);
    let mut rhs = DMatrix::<C64>::zeros(total_rows, 1);
    let mut r0 = 0;
    for (m, b) in rows_list.iter().zip(rhs_list.iter()) {
        sys.view_mut((r0, 0), (m.nrows(), cols)).copy_from(m);
        rhs.view_mut((r0, 0), (m.nrows(), 1)).copy_from(b);
        r0 += m.nrows();
    }
    let svd = sys.clone().svd(true, true);
    let sol = svd.solve(&rhs, 1e-12).expect("least-squares solve");
    let section_residual = (&sys * &sol - &rhs).norm();
    let splits = section_residual < 1e-6;
    Ok(ExactSequenceReport {
        equivariance_residual: resid,
        rank_i,
        rank_p,
        splits,
        section_residual,
    })
}

/// Realign two pairs of cyclic modules that induce the same character of the
/// doubled-surface subalgebra: Ψ(v_i⊗v_j) = c_{i,j} v′_i⊗v′_j with the
/// recurrence coefficients, verified against the subalgebra generator list.
#[allow(clippy::too_many_arguments)]
pub fn realign_d2(
    ctx: &RootContext,
    gens_pair: (&WeightModuleSpec, &WeightModuleSpec),
    gens_pair2: (&WeightModuleSpec, &WeightModuleSpec),
) -> Result<(DMatrix<C64>, f64), RepError> {
    let unpack = |s: &WeightModuleSpec| -> Result<(C64, C64, C64, C64), RepError> {
        if let WeightModuleSpec::Cyclic { lambda, mu, a, b } = s {
            Ok((*lambda, *mu, *a, *b))
        } else {
            Err(RepError::InvalidParameters(
                "realignment expects cyclic-family modules".into(),
            ))
        }
    };
    let (l1, m1, a1, b1) = unpack(gens_pair.0)?;
    let (l2, m2, a2, b2) = unpack(gens_pair.1)?;
    let (l1p, m1p, a1p, b1p) = unpack(gens_pair2.0)?;
    let (l2p, m2p, a2p, b2p) = unpack(gens_pair2.1)?;
    let n = ctx.n as usize;
    let r1 = build_rep(ctx, gens_pair.0)?;
    let r2 = build_rep(ctx, gens_pair.1)?;
    let r1p = build_rep(ctx, gens_pair2.0)?;
    let r2p = build_rep(ctx, gens_pair2.1)?;
    // Character match: per-leg t, product shadow, product h_∂.
    let s1 = classical_shadow(ctx, &r1)?;
    let s2 = classical_shadow(ctx, &r2)?;
    let s1p = classical_shadow(ctx, &r1p)?;
    let s2p = classical_shadow(ctx, &r2p)?;
    let tol = 1e-6;
    let close = |x: C64, y: C64| (x - y).norm() < tol * (1.0 + x.norm());
    let g = (mul2(&s1.gminus, &s2.gminus), mul2(&s1.gplus, &s2.gplus));
    let gp = (mul2(&s1p.gminus, &s2p.gminus), mul2(&s1p.gplus, &s2p.gplus));
    let mats_close = |x: &[[C64; 2]; 2], y: &[[C64; 2]; 2]| {
        (0..2).all(|i| (0..2).all(|j| close(x[i][j], y[i][j])))
    };
    let (t1, t2, t1p, t2p) = match (s1.t, s2.t, s1p.t, s2p.t) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => return Err(RepError::NotScalarCenter(0.0)),
    };
    if !(close(t1, t1p)
        && close(t2, t2p)
        && close(s1.hdel * s2.hdel, s1p.hdel * s2p.hdel)
        && mats_close(&g.0, &gp.0)
        && mats_close(&g.1, &gp.1))
    {
        return Err(RepError::NoMatch);
    }
    let hd1 = 1.0 / (l1 * m1);
    let hd2 = 1.0 / (l2 * m2);
    let q = ctx.q();
    let qq = q - 1.0 / q;
    // Normalize the primed pair by the weight-shift isomorphisms
    // V(λ,μ,a,b) ≅ V(λq⁻ˢ, μqˢ, a″, b) so that λ₁μ₁⁻¹ = λ″₁μ″₁⁻¹ and
    // λ₁λ₂ = λ″₁λ″₂; the diagonal recurrence applies to the normalized pair.
    let find_pow = |target: C64| -> Option<i64> {
        (0..ctx.n as i64).find(|s| (ctx.q_int_pow(-*s) - target).norm() < 1e-6)
    };
    let ratio1 = (l1 / m1) / (l1p / m1p);
    let s1 = (0..ctx.n as i64)
        .find(|s| (ctx.q_int_pow(-2 * s) - ratio1).norm() < 1e-6)
        .ok_or(RepError::NoMatch)?;
    let l1pp = l1p * ctx.q_int_pow(-s1);
    let m1pp = m1p * ctx.q_int_pow(s1);
    let s2 = find_pow((l1 * l2) / (l1pp * l2p)).ok_or(RepError::NoMatch)?;
    let l2pp = l2p * ctx.q_int_pow(-s2);
    let m2pp = m2p * ctx.q_int_pow(s2);
    let shift_a = |s: i64, l: C64, m: C64, a: C64, b: C64| -> Result<C64, RepError> {
        if s == 0 {
            return Ok(a);
        }
        if b.norm() < 1e-9 {
            return Err(RepError::RecurrenceInconsistent(
                "nonzero weight shift needed with b = 0".into(),
            ));
        }
        Ok((a * b
            + (ctx.q_int_pow(1 - s) * l * l - ctx.q_int_pow(s - 1) * m * m) / qq
                * ctx.qint(s))
            / b)
    };
    let a1pp = shift_a(s1, l1p, m1p, a1p, b1p)?;
    let a2pp = shift_a(s2, l2p, m2p, a2p, b2p)?;
    let (b1pp, b2pp) = (b1p, b2p);
    let hd1pp = 1.0 / (l1pp * m1pp);
    let hd2pp = 1.0 / (l2pp * m2pp);
    let chk = |lhs: C64, rhs: C64, what: &str| {
        if (lhs - rhs).norm() > tol * (1.0 + lhs.norm()) {
            Err(RepError::RecurrenceInconsistent(what.to_string()))
        } else {
            Ok(())
        }
    };
    // First-leg constraints force c constant in i with two wrap conditions.
    chk(b1, b1pp, "first-leg F wrap: b₁ ≠ b″₁")?;
    chk(hd1pp * a1pp, hd1 * a1, "first-leg E wrap: h″_∂1a″₁ ≠ h_∂1a₁")?;
    // Second-leg: c_{i,j+1} = (h″_∂2/h_∂2) c_{i,j}, with its two wraps.
    let r = hd2pp / hd2;
    let rn1 = r.powu(ctx.n - 1);
    chk(a2pp, a2 * rn1, "second-leg E wrap")?;
    chk(b2 * hd2, b2pp * hd2pp * rn1, "second-leg F wrap")?;
    let mut psi = DMatrix::<C64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            psi[(i * n + j, i * n + j)] = r.powu(j as u32);
        }
    }
    // Compose with the shift intertwiners V″ᵢ → V′ᵢ to land in the requested
    // target modules.
    let theta = |s: i64, spec_pp: WeightModuleSpec, rp: &MatrixRep| -> Result<DMatrix<C64>, RepError> {
        if s == 0 {
            return Ok(DMatrix::identity(n, n));
        }
        let rpp = build_rep(ctx, &spec_pp)?;
        let basis = intertwiner_space(ctx, &rpp, rp);
        if basis.len() != 1 {
            return Err(RepError::RecurrenceInconsistent(format!(
                "shift intertwiner space has dimension {} (expected 1)",
                basis.len()
            )));
        }
        Ok(basis[0].clone())
    };
    let th1 = theta(
        s1,
        WeightModuleSpec::Cyclic {
            lambda: l1pp,
            mu: m1pp,
            a: a1pp,
            b: b1pp,
        },
        &r1p,
    )?;
    let th2 = theta(
        s2,
        WeightModuleSpec::Cyclic {
            lambda: l2pp,
            mu: m2pp,
            a: a2pp,
            b: b2pp,
        },
        &r2p,
    )?;
    let psi = kron(&th1, &th2) * psi;
    // Verify against the doubled-surface generator list.
    let t1 = r1.t_mat(ctx);
    let t2 = r2.t_mat(ctx);
    let t1p = r1p.t_mat(ctx);
    let t2p = r2p.t_mat(ctx);
    let id = DMatrix::<C64>::identity(n, n);
    let h1 = r1.hdel();
    let h2 = r2.hdel();
    let h1p = r1p.hdel();
    let h2p = r2p.hdel();
    let glist: Vec<(DMatrix<C64>, DMatrix<C64>)> = vec![
        (kron(&r1.khalf, &r2.khalf), kron(&r1p.khalf, &r2p.khalf)),
        (
            kron(&r1.khalf_inv(), &r2.khalf_inv()),
            kron(&r1p.khalf_inv(), &r2p.khalf_inv()),
        ),
        (kron(&t1, &id), kron(&t1p, &id)),
        (kron(&id, &t2), kron(&id, &t2p)),
        (kron(&h1, &h2), kron(&h1p, &h2p)),
        (
            kron(&mat_pow(&h1, -1), &mat_pow(&h2, -1)),
            kron(&mat_pow(&h1p, -1), &mat_pow(&h2p, -1)),
        ),
        (kron(&(&r1.e * &h1), &id), kron(&(&r1p.e * &h1p), &id)),
        (
            kron(&(&r1.khalf * &r1.lhalf_inv()), &id),
            kron(&(&r1p.khalf * &r1p.lhalf_inv()), &id),
        ),
        (kron(&r1.f, &id), kron(&r1p.f, &id)),
        (kron(&r1.l(), &r2.f), kron(&r1p.l(), &r2p.f)),
        (kron(&r1.e, &r2.k()), kron(&r1p.e, &r2p.k())),
        (kron(&id, &r2.e), kron(&id, &r2p.e)),
    ];
    let mut resid: f64 = 0.0;
    for (gm, gmp) in &glist {
        let scale = 1.0 + gm.norm();
        resid = resid.max((gmp * &psi - &psi * gm).norm() / scale);
    }
    Ok((psi, resid))
}

/// The semi↔cyclic bridge constant: Ṽ(λ,μ,c) ≅ V(λq⁻¹, μq, a, 0) with
/// c = a·∏ of the E-coefficients of the cyclic module.
pub fn semicyclic_bridge_c(ctx: &RootContext, lambda: C64, mu: C64, a: C64) -> C64 {
    let q = ctx.q();
    let qq = q - 1.0 / q;
    let lam2 = lambda / q;
    let mu2 = mu * q;
    let mut prod = cone();
    for i in 1..ctx.n as i64 {
        prod *= (ctx.q_int_pow(1 - i) * lam2 * lam2 - ctx.q_int_pow(i - 1) * mu2 * mu2) / qq
            * ctx.qint(i);
    }
    a * prod
}

// ---------------------------------------------------------------------------
// Random sampling away from degenerate loci.
// ---------------------------------------------------------------------------

const DEGENERACY_MARGIN: f64 = 1e-3;

pub fn sample_nonzero<R: Rng>(rng: &mut R) -> C64 {
    let r = rng.gen_range(0.6..1.7);
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::new(r * th.cos(), r * th.sin())
}

/// Generic cyclic module: both a and b nonzero, shadow away from the
/// unipotent locus.
pub fn sample_cyclic<R: Rng>(ctx: &RootContext, rng: &mut R) -> WeightModuleSpec {
    loop {
        let lambda = sample_nonzero(rng);
        let mu = sample_nonzero(rng);
        let a = sample_nonzero(rng);
        let b = sample_nonzero(rng);
        if degenerate_ratio(ctx, lambda, mu) {
            continue;
        }
        let spec = WeightModuleSpec::Cyclic { lambda, mu, a, b };
        if let Ok(rep) = build_rep(ctx, &spec) {
            let en = scalar_of(&mat_pow(&rep.e, ctx.n as i64), 1e-9).unwrap_or(czero());
            if en.norm() > DEGENERACY_MARGIN {
                return spec;
            }
        }
    }
}

pub fn sample_semi<R: Rng>(ctx: &RootContext, rng: &mut R) -> WeightModuleSpec {
    loop {
        let lambda = sample_nonzero(rng);
        let mu = sample_nonzero(rng);
        let c = sample_nonzero(rng);
        if !degenerate_ratio(ctx, lambda, mu) {
            return WeightModuleSpec::Semi { lambda, mu, c };
        }
    }
}

fn degenerate_ratio(ctx: &RootContext, lambda: C64, mu: C64) -> bool {
    let r = (lambda / mu).powu(2 * ctx.n);
    (r - cone()).norm() < DEGENERACY_MARGIN
        || (lambda / mu).norm() > 3.0
        || (lambda / mu).norm() < 0.33
}

/// Generic standard module (lands in the b ≠ 0 branch).
pub fn sample_standard<R: Rng>(ctx: &RootContext, rng: &mut R) -> StandardModuleSpec {
    loop {
        let x1 = sample_nonzero(rng);
        let lambda = sample_nonzero(rng);
        let hp = sample_nonzero(rng);
        let hdel = sample_nonzero(rng);
        let v = (hdel * hp * lambda * lambda).powu(ctx.n);
        if (v + cone()).norm() > DEGENERACY_MARGIN
            && (cone() + 1.0 / v).norm() > DEGENERACY_MARGIN
            && hp.norm() > 0.4
            && hp.norm() < 2.5
        {
            return StandardModuleSpec {
                x1,
                lambda,
                hp,
                hdel,
            };
        }
    }
}

/// Standard module exactly on the degenerate locus (h_∂h_pλ² = −q^{2i₀+1}).
pub fn sample_standard_degenerate<R: Rng>(ctx: &RootContext, rng: &mut R) -> StandardModuleSpec {
    let x1 = sample_nonzero(rng);
    let lambda = sample_nonzero(rng);
    let hdel = sample_nonzero(rng);
    let i0 = rng.gen_range(0..ctx.n as i64);
    let hp = -ctx.q_int_pow(2 * i0 + 1) / (hdel * lambda * lambda);
    StandardModuleSpec {
        x1,
        lambda,
        hp,
        hdel,
    }
}
