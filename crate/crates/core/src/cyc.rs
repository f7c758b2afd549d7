//! Exact arithmetic in the cyclotomic field Q(ω), where ω is a primitive
//! N-th root of unity.
//!
//! Elements are polynomials in ω with rational coefficients, reduced modulo
//! the N-th cyclotomic polynomial Φ_N. Since Φ_N is irreducible over Q the
//! quotient is a field, so nonzero elements (in particular q − q⁻¹) have
//! exact inverses and every symbolic identity check below is exact — there
//! is no floating-point tolerance anywhere in this module.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

/// Shared context for one value of N: the cyclotomic modulus Φ_N.
#[derive(Debug, PartialEq, Eq)]
pub struct CycCtx {
    /// Order of the root of unity.
    pub n: u32,
    /// Monic coefficients of Φ_N, ascending degree; `phi.len() - 1` = deg Φ_N = φ(N).
    pub phi: Vec<BigInt>,
}

impl CycCtx {
    pub fn new(n: u32) -> Arc<Self> {
        assert!(n >= 2, "order must be at least 2");
        Arc::new(CycCtx {
            n,
            phi: cyclotomic_poly(n),
        })
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }
}

/// Compute the coefficients of the n-th cyclotomic polynomial over Z by the
/// recursion Φ_n = (x^n − 1) / ∏_{d | n, d < n} Φ_d (exact polynomial division).
fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    // x^n - 1
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    num
}

/// Exact division of integer polynomials (ascending coefficients); panics if
/// the division leaves a remainder. Divisor must be monic.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![BigInt::zero(); qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn].clone();
        quot[i] = c.clone();
        for (j, d) in den.iter().enumerate() {
            let t = &c * d;
            rem[i + j] -= t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// An element of Q(ω) = Q[x]/(Φ_N): coefficients of 1, ω, …, ω^{φ(N)−1}.
#[derive(Clone)]
pub struct CycNum {
    pub ctx: Arc<CycCtx>,
    /// Ascending coefficients, length = deg Φ_N (kept dense).
    c: Vec<BigRational>,
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum(")?;
        let mut first = true;
        for (i, co) in self.c.iter().enumerate() {
            if !co.is_zero() {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{}·ω^{}", co, i)?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl CycNum {
    pub fn zero(ctx: &Arc<CycCtx>) -> Self {
        CycNum {
            ctx: ctx.clone(),
            c: vec![BigRational::zero(); ctx.degree()],
        }
    }

    pub fn one(ctx: &Arc<CycCtx>) -> Self {
        Self::from_i64(ctx, 1)
    }

    pub fn from_i64(ctx: &Arc<CycCtx>, v: i64) -> Self {
        let mut z = Self::zero(ctx);
        z.c[0] = BigRational::from(BigInt::from(v));
        z
    }

    pub fn from_ratio(ctx: &Arc<CycCtx>, num: i64, den: i64) -> Self {
        assert!(den != 0);
        let mut z = Self::zero(ctx);
        z.c[0] = BigRational::new(BigInt::from(num), BigInt::from(den));
        z
    }

    /// ω^m for any integer m (reduced mod N, then mod Φ_N).
    pub fn omega_pow(ctx: &Arc<CycCtx>, m: i64) -> Self {
        let n = ctx.n as i64;
        let m = m.rem_euclid(n) as usize;
        let mut raw = vec![BigRational::zero(); m + 1];
        raw[m] = BigRational::one();
        Self::reduce(ctx, raw)
    }

    fn reduce(ctx: &Arc<CycCtx>, mut raw: Vec<BigRational>) -> Self {
        let deg = ctx.degree();
        // Divide by monic Φ_N, keep the remainder.
        while raw.len() > deg {
            let top = raw.len() - 1;
            let lead = raw[top].clone();
            if lead.is_zero() {
                raw.pop();
                continue;
            }
            let shift = top - deg;
            for (j, pc) in ctx.phi.iter().enumerate() {
                let t = &lead * BigRational::from(pc.clone());
                raw[shift + j] -= t;
            }
            raw.pop();
        }
        raw.resize(deg, BigRational::zero());
        CycNum {
            ctx: ctx.clone(),
            c: raw,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn equals(&self, other: &CycNum) -> bool {
        assert_eq!(self.ctx, other.ctx);
        self.c.iter().zip(other.c.iter()).all(|(a, b)| a == b)
    }

    pub fn add(&self, other: &CycNum) -> CycNum {
        assert_eq!(self.ctx, other.ctx);
        let c = self
            .c
            .iter()
            .zip(other.c.iter())
            .map(|(a, b)| a + b)
            .collect();
        CycNum {
            ctx: self.ctx.clone(),
            c,
        }
    }

    pub fn sub(&self, other: &CycNum) -> CycNum {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycNum {
        CycNum {
            ctx: self.ctx.clone(),
            c: self.c.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &CycNum) -> CycNum {
        assert_eq!(self.ctx, other.ctx);
        let deg = self.ctx.degree();
        let mut raw = vec![BigRational::zero(); 2 * deg];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] += a * b;
            }
        }
        Self::reduce(&self.ctx, raw)
    }

    pub fn scale_i64(&self, v: i64) -> CycNum {
        let f = BigRational::from(BigInt::from(v));
        CycNum {
            ctx: self.ctx.clone(),
            c: self.c.iter().map(|a| a * &f).collect(),
        }
    }

    /// Exact inverse in the field Q(ω); panics on zero.
    pub fn inv(&self) -> CycNum {
        assert!(!self.is_zero(), "division by zero in Q(omega)");
        // Extended Euclid for self (as polynomial) and Φ_N over Q[x].
        let deg = self.ctx.degree();
        let mut r0: Vec<BigRational> = self
            .ctx
            .phi
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let mut r1: Vec<BigRational> = self.c.clone();
        trim(&mut r0);
        trim(&mut r1);
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while poly_deg(&r1) > 0 {
            let (q, r) = poly_divmod(&r0, &r1);
            let s_next = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s_next;
            trim(&mut r1);
        }
        assert!(
            !r1.is_empty() && !r1[0].is_zero(),
            "element not invertible mod Phi_N (impossible: Phi_N irreducible)"
        );
        let lead = r1[0].clone();
        let mut inv_raw: Vec<BigRational> = s1.iter().map(|c| c / &lead).collect();
        inv_raw.resize(inv_raw.len().max(deg), BigRational::zero());
        Self::reduce(&self.ctx, inv_raw)
    }

    pub fn pow_i64(&self, e: i64) -> CycNum {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.ctx);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        acc
    }

    /// Numeric value at ω = exp(2πik/N).
    pub fn to_complex(&self, k: u32) -> Complex64 {
        let n = self.ctx.n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ang = 2.0 * std::f64::consts::PI * (k as f64) * (i as f64) / n;
            acc += ratio_to_f64(a) * Complex64::new(ang.cos(), ang.sin());
        }
        acc
    }

    /// If the element is rational·ω^m, return (rational as f64, m).
    pub fn as_phase(&self) -> Option<(f64, i64)> {
        for m in 0..self.ctx.n as i64 {
            let t = self.mul(&Self::omega_pow(&self.ctx, -m));
            if t.c.iter().skip(1).all(|x| x.is_zero()) {
                return Some((ratio_to_f64(&t.c[0]), m));
            }
        }
        None
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // BigRational -> f64 with enough headroom for the small magnitudes here.
    let num = r.numer();
    let den = r.denom();
    let fnum = bigint_to_f64(num);
    let fden = bigint_to_f64(den);
    fnum / fden
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    let s = b.to_string();
    s.parse::<f64>().unwrap_or(if b.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_deg(p: &[BigRational]) -> usize {
    let mut d = p.len();
    while d > 1 && p[d - 1].is_zero() {
        d -= 1;
    }
    d - 1
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    out
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Division with remainder in Q[x]; returns (quotient, remainder).
fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let dn = poly_deg(den);
    let lead = den[dn].clone();
    assert!(!lead.is_zero());
    let mut rem = num.to_vec();
    let nn = poly_deg(&rem);
    if nn < dn {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); nn - dn + 1];
    for i in (0..=(nn - dn)).rev() {
        let c = &rem[i + dn] / &lead;
        quot[i] = c.clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dn {
            let t = &c * &den[j];
            rem[i + j] -= t;
        }
    }
    rem.truncate(dn.max(1));
    (quot, rem)
}
