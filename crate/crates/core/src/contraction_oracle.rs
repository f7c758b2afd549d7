//! Independent brute-force check values for braid closures on the scalar
//! module: builds the truncated universal R-matrix entrywise from its
//! defining series and contracts the closed braid diagram with explicit
//! index loops. Deliberately shares no code with the braiding or braid
//! modules beyond the root-of-unity context; used as an oracle by the
//! smoke tests.

use crate::scalars::{C64, RootContext};
use num_complex::Complex64;

fn cone() -> C64 {
    Complex64::new(1.0, 0.0)
}

/// Dense square matrix as nested vectors, multiplied with explicit loops.
type Mat = Vec<Vec<C64>>;

fn zeros(n: usize) -> Mat {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

fn eye(n: usize) -> Mat {
    let mut m = zeros(n);
    for i in 0..n {
        m[i][i] = cone();
    }
    m
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Scalar-module data, written out directly from the defining action:
/// K^{1/2}e_i = λq⁻ⁱe_i, L^{1/2}e_i = μqⁱe_i, F e_i = e_{i+1} (F e_{N−1}=0),
/// E e_i = [i](q^{1−i}λ² − q^{i−1}μ²)/(q−q⁻¹)² e_{i−1}, with λ = A⁻¹, μ = A.
struct ScalarModule {
    n: usize,
    e: Mat,
    f: Mat,
    khalf: Mat,
    lhalf: Mat,
}

fn scalar_module(ctx: &RootContext) -> ScalarModule {
    let n = ctx.n as usize;
    let q = ctx.q();
    let qq = q - cone() / q;
    let a = ctx.qhalf();
    let lambda = cone() / a;
    let mu = a;
    let mut e = zeros(n);
    let mut f = zeros(n);
    let mut khalf = zeros(n);
    let mut lhalf = zeros(n);
    for i in 0..n {
        khalf[i][i] = lambda * ctx.q_int_pow(-(i as i64));
        lhalf[i][i] = mu * ctx.q_int_pow(i as i64);
        if i + 1 < n {
            f[i + 1][i] = cone();
        }
        if i >= 1 {
            let ii = i as i64;
            let qint = (ctx.q_int_pow(ii) - ctx.q_int_pow(-ii)) / qq;
            e[i - 1][i] = qint
                * (ctx.q_int_pow(1 - ii) * lambda * lambda
                    - ctx.q_int_pow(ii - 1) * mu * mu)
                / qq;
        }
    }
    ScalarModule {
        n,
        e,
        f,
        khalf,
        lhalf,
    }
}

/// The braiding on the scalar pair, from the truncated series
/// σ ∘ q^{−H⊗G/2} ∘ Σ_{m<N} q^{m(m−1)/2}((q−q⁻¹)E⊗F)ᵐ/[m]!, with
/// q^{−H⊗G/2}(e_i⊗e_j) = q^{−(h−2i)(g+2j)/2}(e_i⊗e_j), h = −1, g = 1.
/// Normalized so that |det| = 1.
fn scalar_r(ctx: &RootContext, sm: &ScalarModule) -> Mat {
    let n = sm.n;
    let d = n * n;
    let q = ctx.q();
    let qq = q - cone() / q;
    // (q−q⁻¹) E⊗F on the product basis e_i⊗e_j ↦ index i·n+j.
    let mut ef = zeros(d);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = sm.e[k][i] * sm.f[l][j] * qq;
                    if v.norm() > 0.0 {
                        ef[k * n + l][i * n + j] += v;
                    }
                }
            }
        }
    }
    let mut series = eye(d);
    let mut pow = eye(d);
    let mut fact = cone();
    for m in 1..ctx.n {
        pow = matmul(&pow, &ef);
        let mm = m as i64;
        fact *= (ctx.q_int_pow(mm) - ctx.q_int_pow(-mm)) / qq;
        let coef = ctx.q_int_pow(mm * (mm - 1) / 2) / fact;
        for i in 0..d {
            for j in 0..d {
                let add = pow[i][j] * coef;
                series[i][j] += add;
            }
        }
    }
    // Cartan factor then flip (i,j) ↦ (j,i).
    let mut out = zeros(d);
    for i in 0..n {
        for j in 0..n {
            let hexp = -(C64::new(-1.0, 0.0) - C64::new(2.0 * i as f64, 0.0))
                * (C64::new(1.0, 0.0) + C64::new(2.0 * j as f64, 0.0))
                / 2.0;
            let c = ctx.q_power(hexp);
            for col in 0..d {
                out[j * n + i][col] += c * series[i * n + j][col];
            }
        }
    }
    // Normalize |det| to 1 by dividing by the geometric mean of |det|,
    // computed with naive Gaussian elimination.
    let mut work = out.clone();
    let mut logabs = 0.0f64;
    for p in 0..d {
        let mut piv = p;
        for r in p..d {
            if work[r][p].norm() > work[piv][p].norm() {
                piv = r;
            }
        }
        work.swap(p, piv);
        let pv = work[p][p];
        logabs += pv.norm().ln();
        for r in p + 1..d {
            let factor = work[r][p] / pv;
            for c in p..d {
                let sub = factor * work[p][c];
                work[r][c] -= sub;
            }
        }
    }
    let scale = (logabs / d as f64).exp();
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v /= scale;
        }
    }
    out
}

fn invert(m: &Mat) -> Mat {
    // Gauss–Jordan with partial pivoting.
    let n = m.len();
    let mut a = m.clone();
    let mut inv = eye(n);
    for p in 0..n {
        let mut piv = p;
        for r in p..n {
            if a[r][p].norm() > a[piv][p].norm() {
                piv = r;
            }
        }
        a.swap(p, piv);
        inv.swap(p, piv);
        let pv = a[p][p];
        for c in 0..n {
            a[p][c] /= pv;
            inv[p][c] /= pv;
        }
        for r in 0..n {
            if r == p {
                continue;
            }
            let f = a[r][p];
            if f.norm() == 0.0 {
                continue;
            }
            for c in 0..n {
                let s1 = f * a[p][c];
                a[r][c] -= s1;
                let s2 = f * inv[p][c];
                inv[r][c] -= s2;
            }
        }
    }
    inv
}

/// |closure value| of a braid word on `strands` strands, every strand
/// colored by the scalar module: the crossings are contracted layer by
/// layer and the closure is the trace against the pivot
/// (K^{1/2}L^{−1/2})^{N−1} on every strand. `word` lists (index ≥ 1, sign).
pub fn closure_abs(ctx: &RootContext, strands: usize, word: &[(usize, i8)]) -> f64 {
    let sm = scalar_module(ctx);
    let n = sm.n;
    let r = scalar_r(ctx, &sm);
    let rinv = invert(&r);
    let dim = n.pow(strands as u32);
    let mut op = eye(dim);
    for &(pos, sign) in word {
        assert!(pos >= 1 && pos < strands, "letter index out of range");
        let rm = if sign > 0 { &r } else { &rinv };
        // id^{⊗(pos−1)} ⊗ R ⊗ id^{⊗(strands−pos−1)} with explicit index
        // bookkeeping: each global index splits as (left, a, b, right).
        let right = n.pow((strands - pos - 1) as u32);
        let mut step = zeros(dim);
        for gi in 0..dim {
            let rpart = gi % right;
            let b = (gi / right) % n;
            let a = (gi / (right * n)) % n;
            let left = gi / (right * n * n);
            for c in 0..n {
                for dd in 0..n {
                    let v = rm[c * n + dd][a * n + b];
                    if v.norm() == 0.0 {
                        continue;
                    }
                    let go = ((left * n + c) * n + dd) * right + rpart;
                    step[go][gi] += v;
                }
            }
        }
        op = matmul(&step, &op);
    }
    // Pivot per strand.
    let mut pivot = eye(n);
    let klinv = {
        let linv = invert(&sm.lhalf);
        matmul(&sm.khalf, &linv)
    };
    for _ in 0..(ctx.n - 1) {
        pivot = matmul(&pivot, &klinv);
    }
    let mut value = Complex64::new(0.0, 0.0);
    for gi in 0..dim {
        for gj in 0..dim {
            // (⊗pivot)[gi][gj] is diagonal per strand: product over digits.
            let mut p = cone();
            let (mut x, mut y) = (gi, gj);
            let mut diag = true;
            for _ in 0..strands {
                let (dx, dy) = (x % n, y % n);
                if dx != dy {
                    diag = false;
                    break;
                }
                p *= pivot[dx][dx];
                x /= n;
                y /= n;
            }
            if diag {
                value += p * op[gj][gi];
            }
        }
    }
    value.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_unknot_is_pivot_trace() {
        for nn in [3u32, 5] {
            let ctx = RootContext::new(nn, 1).unwrap();
            let sm = scalar_module(&ctx);
            let n = sm.n;
            let klinv = matmul(&sm.khalf, &invert(&sm.lhalf));
            let mut pivot = eye(n);
            for _ in 0..nn - 1 {
                pivot = matmul(&pivot, &klinv);
            }
            let tr: C64 = (0..n).map(|i| pivot[i][i]).sum();
            let got = closure_abs(&ctx, 1, &[]);
            assert!((got - tr.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_r_is_intertwiner_for_coproduct() {
        // Entrywise check that the series R intertwines Δ(E), Δ(F),
        // Δ(K^{1/2}), Δ(L^{1/2}) between V⊗V and the swapped copy.
        for nn in [3u32, 5] {
            let ctx = RootContext::new(nn, 1).unwrap();
            let sm = scalar_module(&ctx);
            let n = sm.n;
            let d = n * n;
            let r = scalar_r(&ctx, &sm);
            let kr = |a: &Mat, b: &Mat| -> Mat {
                let mut m = zeros(d);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                m[i * n + j][k * n + l] = a[i][k] * b[j][l];
                            }
                        }
                    }
                }
                m
            };
            let kfull = matmul(&sm.khalf, &sm.khalf);
            let lfull = matmul(&sm.lhalf, &sm.lhalf);
            let id = eye(n);
            let plus = |x: &Mat, y: &Mat| -> Mat {
                let mut m = x.clone();
                for i in 0..d {
                    for j in 0..d {
                        m[i][j] += y[i][j];
                    }
                }
                m
            };
            let gens: Vec<Mat> = vec![
                plus(&kr(&id, &sm.e), &kr(&sm.e, &kfull)),
                plus(&kr(&sm.f, &id), &kr(&lfull, &sm.f)),
                kr(&sm.khalf, &sm.khalf),
                kr(&sm.lhalf, &sm.lhalf),
            ];
            for gm in &gens {
                let lhs = matmul(&r, gm);
                let rhs = matmul(gm, &r);
                let mut dev = 0.0f64;
                for i in 0..d {
                    for j in 0..d {
                        dev += (lhs[i][j] - rhs[i][j]).norm_sqr();
                    }
                }
                assert!(dev.sqrt() < 1e-9, "intertwiner defect at N={nn}");
            }
        }
    }

    #[test]
    fn oracle_inverse_cancels() {
        let ctx = RootContext::new(3, 1).unwrap();
        let plain = closure_abs(&ctx, 2, &[]);
        let cancel = closure_abs(&ctx, 2, &[(1, 1), (1, -1)]);
        assert!((plain - cancel).abs() < 1e-9);
    }
}
