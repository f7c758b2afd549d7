//! Numeric scalar layer: the root-of-unity context and q-calculus helpers.
//!
//! `RootContext` fixes an odd order `N ≥ 3` and an exponent `k` coprime to
//! `N`, defining ω = exp(2πik/N), A = ω⁻², q = ω⁻⁴ = A². Since N is odd, q
//! is again a primitive N-th root of unity and A is a square root of q
//! compatible with all half-integer powers used throughout the crate:
//! fractional powers of q are always computed through `q_power`, which uses
//! log q := 2·Ln(A) so that q^{1/2} = A exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum ScalarError {
    #[error("order N must be odd and at least 3, got {0}")]
    BadOrder(u32),
    #[error("exponent k={k} is not coprime to N={n}")]
    NotCoprime { k: u32, n: u32 },
    #[error("q-factorial [n]! undefined for n >= N (n={n}, N={big_n})")]
    QFactorialUndefined { n: u32, big_n: u32 },
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Fixed root-of-unity data shared by every construction in the crate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootContext {
    #[serde(rename = "N")]
    pub n: u32,
    pub k: u32,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_eps() -> f64 {
    1e-9
}

impl RootContext {
    pub fn new(n: u32, k: u32) -> Result<Self, ScalarError> {
        Self::with_eps(n, k, default_eps())
    }

    pub fn with_eps(n: u32, k: u32, eps: f64) -> Result<Self, ScalarError> {
        if n < 3 || n % 2 == 0 {
            return Err(ScalarError::BadOrder(n));
        }
        if gcd(k % n, n) != 1 {
            return Err(ScalarError::NotCoprime { k, n });
        }
        Ok(RootContext { n, k, eps })
    }

    /// ω = exp(2πik/N).
    pub fn omega(&self) -> C64 {
        self.omega_pow(1)
    }

    /// ω^m for any integer m.
    pub fn omega_pow(&self, m: i64) -> C64 {
        let ang = 2.0 * PI * (self.k as f64) * (m.rem_euclid(self.n as i64) as f64)
            / (self.n as f64);
        C64::new(ang.cos(), ang.sin())
    }

    /// A = ω⁻², the preferred square root of q.
    pub fn a(&self) -> C64 {
        self.omega_pow(-2)
    }

    /// q = ω⁻⁴, a primitive N-th root of unity.
    pub fn q(&self) -> C64 {
        self.omega_pow(-4)
    }

    /// q^{1/2} = A.
    pub fn qhalf(&self) -> C64 {
        self.a()
    }

    /// The branch of log q used for all fractional powers: 2·Ln(A), so that
    /// exp(logq/2) = A exactly (the principal Ln of q itself would in
    /// general pick the other square root).
    pub fn logq(&self) -> C64 {
        let a = self.a();
        C64::new(0.0, 2.0 * a.im.atan2(a.re))
    }

    /// q^z = exp(z · logq) for arbitrary complex exponents.
    pub fn q_power(&self, z: C64) -> C64 {
        (z * self.logq()).exp()
    }

    /// q^{m/2} for integer m (so q_power_half(1) = A, q_power_half(2) = q).
    pub fn q_power_half(&self, m: i64) -> C64 {
        self.q_power(C64::new(m as f64 / 2.0, 0.0))
    }

    /// Integer power of q.
    pub fn q_int_pow(&self, m: i64) -> C64 {
        self.omega_pow(-4 * m)
    }

    /// Quantum integer [n] = (qⁿ − q⁻ⁿ)/(q − q⁻¹).
    pub fn qint(&self, n: i64) -> C64 {
        let q = self.q();
        (self.q_int_pow(n) - self.q_int_pow(-n)) / (q - 1.0 / q)
    }

    /// Quantum factorial [n]! = [1][2]…[n]; undefined for n ≥ N (where [N] = 0).
    pub fn qfact(&self, n: u32) -> Result<C64, ScalarError> {
        if n >= self.n {
            return Err(ScalarError::QFactorialUndefined { n, big_n: self.n });
        }
        let mut acc = C64::new(1.0, 0.0);
        for i in 1..=n as i64 {
            acc *= self.qint(i);
        }
        Ok(acc)
    }

    /// All N-th roots of z: r · exp(2πij/N), j = 0..N−1, with r the principal root.
    pub fn nth_roots(&self, z: C64) -> Vec<C64> {
        let principal = self.principal_nth_root(z);
        (0..self.n)
            .map(|j| {
                let ang = 2.0 * PI * (j as f64) / (self.n as f64);
                principal * C64::new(ang.cos(), ang.sin())
            })
            .collect()
    }

    /// Principal N-th root (principal log branch).
    pub fn principal_nth_root(&self, z: C64) -> C64 {
        z.powf(1.0 / self.n as f64)
    }

    /// Pick an N-th root of z by index into the `nth_roots` ordering.
    pub fn nth_root(&self, z: C64, index: u32) -> C64 {
        let ang = 2.0 * PI * ((index % self.n) as f64) / (self.n as f64);
        self.principal_nth_root(z) * C64::new(ang.cos(), ang.sin())
    }

    /// Is |z| within eps of zero?
    pub fn is_zero(&self, z: C64) -> bool {
        z.norm() <= self.eps
    }

    /// Are two scalars equal within eps?
    pub fn approx_eq(&self, a: C64, b: C64) -> bool {
        (a - b).norm() <= self.eps
    }
}

/// Chebyshev polynomial of the first kind (normalized so that
/// T_n(t + t⁻¹) = tⁿ + t⁻ⁿ): T_0 = 2, T_1 = x, T_{n+2} = x·T_{n+1} − T_n.
pub fn chebyshev_t(n: u32, x: C64) -> C64 {
    let mut t0 = C64::new(2.0, 0.0);
    let mut t1 = x;
    match n {
        0 => t0,
        1 => t1,
        _ => {
            for _ in 2..=n {
                let t2 = x * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            t1
        }
    }
}

/// A numeric scalar carrying exact phase information when available:
/// `exact_phase = Some(m)` asserts value = r · ω^m with r real rational.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProvenancedScalar {
    pub re: f64,
    pub im: f64,
    pub exact_phase: Option<i64>,
}

impl ProvenancedScalar {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn from_cyc(x: &crate::cyc::CycNum, k: u32) -> Self {
        let v = x.to_complex(k);
        ProvenancedScalar {
            re: v.re,
            im: v.im,
            exact_phase: x.as_phase().map(|(_, m)| m),
        }
    }
}

/// Truncated q-exponential of a matrix: Σ_{n=0}^{N−1} xⁿ / [n]!_q.
pub fn exp_q_truncated(
    ctx: &RootContext,
    x: &nalgebra::DMatrix<C64>,
) -> nalgebra::DMatrix<C64> {
    let dim = x.nrows();
    let mut acc = nalgebra::DMatrix::<C64>::identity(dim, dim);
    let mut pow = nalgebra::DMatrix::<C64>::identity(dim, dim);
    for n in 1..ctx.n {
        pow = &pow * x;
        let f = ctx.qfact(n).expect("n < N by construction");
        acc += pow.map(|e| e / f);
    }
    acc
}

/// Eigenvalues of a complex matrix via its Schur decomposition.
pub fn eigenvalues(m: &nalgebra::DMatrix<C64>) -> Vec<C64> {
    let schur = m.clone().schur();
    let t = schur.unpack().1;
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_validation() {
        assert!(RootContext::new(3, 1).is_ok());
        assert!(RootContext::new(4, 1).is_err());
        assert!(RootContext::new(9, 3).is_err());
        assert!(RootContext::new(9, 2).is_ok());
    }

    #[test]
    fn roots_relations() {
        for (n, k) in [(3u32, 1u32), (5, 2), (7, 3), (9, 4)] {
            let ctx = RootContext::new(n, k).unwrap();
            // A² = q and ω⁻⁴ = q  [TRIVIAL]
            assert!((ctx.a() * ctx.a() - ctx.q()).norm() < 1e-12);
            // q is a primitive N-th root: q^N = 1, q^m ≠ 1 for 0 < m < N  [TRIVIAL]
            assert!((ctx.q_int_pow(n as i64) - C64::new(1.0, 0.0)).norm() < 1e-12);
            for m in 1..n as i64 {
                assert!((ctx.q_int_pow(m) - C64::new(1.0, 0.0)).norm() > 1e-6);
            }
            // q_power respects the chosen square root: q^{1/2} = A, not −A.
            assert!((ctx.q_power(C64::new(0.5, 0.0)) - ctx.a()).norm() < 1e-12);
            // And integer exponents agree with direct powers.
            assert!((ctx.q_power(C64::new(3.0, 0.0)) - ctx.q_int_pow(3)).norm() < 1e-12);
        }
    }

    #[test]
    fn qint_values() {
        let ctx = RootContext::new(5, 1).unwrap();
        // [1] = 1, [N] = 0  [TRIVIAL]
        assert!((ctx.qint(1) - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(ctx.qint(5).norm() < 1e-12);
        // [2] = q + q⁻¹  [TRIVIAL]
        assert!((ctx.qint(2) - (ctx.q() + 1.0 / ctx.q())).norm() < 1e-12);
        // [n]! undefined at n = N.
        assert!(ctx.qfact(5).is_err());
        assert!(ctx.qfact(4).is_ok());
    }

    #[test]
    fn chebyshev_defining_property() {
        // T_n(t + 1/t) = tⁿ + t⁻ⁿ  [DERIVED: checked at random t]
        let t = C64::new(0.7, 0.45);
        for n in 0..10u32 {
            let lhs = chebyshev_t(n, t + 1.0 / t);
            let rhs = t.powi(n as i32) + t.powi(-(n as i32));
            assert!((lhs - rhs).norm() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn complex_eigenvalues_work() {
        // [[0,1],[1,0]] has eigenvalues ±1; the complex Schur path must find them.
        let m = nalgebra::DMatrix::<C64>::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[0] - C64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!((ev[1] - C64::new(1.0, 0.0)).norm() < 1e-10);
        // And a genuinely complex one: [[0,1],[-1,0]] has eigenvalues ±i.
        let j = nalgebra::DMatrix::<C64>::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let mut evj = eigenvalues(&j);
        evj.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((evj[0] - C64::new(0.0, -1.0)).norm() < 1e-10);
        assert!((evj[1] - C64::new(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn serde_roundtrip() {
        let ctx = RootContext::new(7, 2).unwrap();
        let s = serde_json::to_string(&ctx).unwrap();
        assert!(s.contains("\"N\":7"));
        let back: RootContext = serde_json::from_str("{\"N\":7,\"k\":2}").unwrap();
        assert_eq!(back.n, 7);
        assert_eq!(back.eps, 1e-9);
    }
}
