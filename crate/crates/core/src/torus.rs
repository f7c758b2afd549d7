//! Balanced quantum tori attached to the chain triangulations Δ_n.
//!
//! A quantum torus here is the twisted group algebra of the balanced exponent
//! lattice of a triangulation: basis elements `Z^k` (Weyl-ordered monomials)
//! indexed by integer vectors over the edges, with product
//! `Z^k Z^k' = ω^{⟨k,k'⟩} Z^{k+k'}` for the antisymmetric Weil–Petersson
//! pairing ⟨·,·⟩. "Balanced" means the exponents have even sum around every
//! face. Coefficients are exact cyclotomic numbers whenever they arise from
//! symbolic constructions, so identity checks in this layer are exact; they
//! degrade to floating point only when numeric data enters (e.g. JSON input).

use crate::cyc::{CycCtx, CycNum};
use crate::scalars::{RootContext, C64};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("elements belong to different triangulations")]
    MixedTriangulation,
    #[error("exponent vector is not balanced: {0:?}")]
    NotBalanced(Vec<i64>),
    #[error("no antisymmetric form satisfies the commutation constraints")]
    NoConsistentForm,
    #[error("more than one antisymmetric form satisfies the constraints")]
    AmbiguousForm,
    #[error("inverse requires a single invertible monomial")]
    NotMonomial,
    #[error("exponent vector does not lie in the generator lattice: {0:?}")]
    NotInGeneratorLattice(Vec<i64>),
}

/// Shared arithmetic context: the numeric root data plus the exact
/// cyclotomic field Q(ω) at the same order.
#[derive(Debug, Clone)]
pub struct AlgCtx {
    pub root: RootContext,
    pub cyc: Arc<CycCtx>,
}

impl AlgCtx {
    pub fn new(root: RootContext) -> Self {
        let cyc = CycCtx::new(root.n);
        AlgCtx { root, cyc }
    }
}

/// A coefficient: exact element of Q(ω) when possible, complex double
/// otherwise. Arithmetic stays exact as long as both operands are exact.
#[derive(Debug, Clone)]
pub enum Coeff {
    Exact(CycNum),
    Approx(C64),
}

impl Coeff {
    pub fn one(alg: &AlgCtx) -> Self {
        Coeff::Exact(CycNum::one(&alg.cyc))
    }

    pub fn from_i64(alg: &AlgCtx, v: i64) -> Self {
        Coeff::Exact(CycNum::from_i64(&alg.cyc, v))
    }

    pub fn from_ratio(alg: &AlgCtx, n: i64, d: i64) -> Self {
        Coeff::Exact(CycNum::from_ratio(&alg.cyc, n, d))
    }

    pub fn omega_pow(alg: &AlgCtx, m: i64) -> Self {
        Coeff::Exact(CycNum::omega_pow(&alg.cyc, m))
    }

    /// q^m = ω^{−4m} exactly.
    pub fn q_pow(alg: &AlgCtx, m: i64) -> Self {
        Self::omega_pow(alg, -4 * m)
    }

    pub fn approx(v: C64) -> Self {
        Coeff::Approx(v)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn to_complex(&self, alg: &AlgCtx) -> C64 {
        match self {
            Coeff::Exact(x) => x.to_complex(alg.root.k),
            Coeff::Approx(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(x) => x.is_zero(),
            // Numeric coefficients are pruned only when they are zero to
            // machine precision; tolerance-eps comparisons live elsewhere.
            Coeff::Approx(v) => v.norm() < 1e-14,
        }
    }

    pub fn add(&self, o: &Coeff, alg: &AlgCtx) -> Coeff {
        match (self, o) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a.add(b)),
            _ => Coeff::Approx(self.to_complex(alg) + o.to_complex(alg)),
        }
    }

    pub fn mul(&self, o: &Coeff, alg: &AlgCtx) -> Coeff {
        match (self, o) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a.mul(b)),
            _ => Coeff::Approx(self.to_complex(alg) * o.to_complex(alg)),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(a.neg()),
            Coeff::Approx(v) => Coeff::Approx(-v),
        }
    }

    pub fn inv(&self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(a.inv()),
            Coeff::Approx(v) => Coeff::Approx(1.0 / v),
        }
    }
}

/// Combinatorial data of a chain triangulation Δ_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulationData {
    pub num_edges: usize,
    /// Antisymmetric Weil–Petersson pairing matrix ⟨e, e'⟩.
    pub wp: Vec<Vec<i64>>,
    /// Edge triples of the faces; an exponent vector is balanced when its
    /// sum over each triple is even.
    pub faces: Vec<[usize; 3]>,
    /// Exponent vectors generating the balanced lattice.
    pub generator_lattice: Vec<Vec<i64>>,
}

pub type Triangulation = Arc<TriangulationData>;

impl TriangulationData {
    pub fn pairing(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if *bj != 0 {
                    s += ai * self.wp[i][j] * bj;
                }
            }
        }
        s
    }

    pub fn is_balanced(&self, k: &[i64]) -> bool {
        self.faces
            .iter()
            .all(|f| (k[f[0]] + k[f[1]] + k[f[2]]) % 2 == 0)
    }

    /// Integer coordinates of `k` over `generator_lattice`, if they exist.
    /// The chain lattices here have a square unimodular-over-Q generator set,
    /// so Cramer-style elimination over rationals with an integrality check
    /// is sufficient.
    pub fn lattice_coordinates(&self, k: &[i64]) -> Result<Vec<i64>, TorusError> {
        let gens = &self.generator_lattice;
        let m = gens.len();
        let n = self.num_edges;
        // Solve  Σ c_j gens[j] = k  by fraction-free Gaussian elimination on
        // the (n × m) system with rational back-substitution.
        let mut a = vec![vec![0i128; m + 1]; n];
        for (r, row) in a.iter_mut().enumerate() {
            for j in 0..m {
                row[j] = gens[j][r] as i128;
            }
            row[m] = k[r] as i128;
        }
        let mut piv_rows: Vec<usize> = Vec::new();
        let mut row = 0usize;
        for col in 0..m {
            let Some(p) = (row..n).find(|&r| a[r][col] != 0) else {
                return Err(TorusError::NotInGeneratorLattice(k.to_vec()));
            };
            a.swap(row, p);
            for r in 0..n {
                if r != row && a[r][col] != 0 {
                    let (x, y) = (a[row][col], a[r][col]);
                    for c in 0..=m {
                        a[r][c] = a[r][c] * x - a[row][c] * y;
                    }
                }
            }
            piv_rows.push(row);
            row += 1;
        }
        // Consistency for the remaining rows.
        for r in row..n {
            if a[r][m] != 0 {
                return Err(TorusError::NotInGeneratorLattice(k.to_vec()));
            }
        }
        let mut coords = vec![0i64; m];
        for (col, &r) in piv_rows.iter().enumerate() {
            let (num, den) = (a[r][m], a[r][col]);
            if num % den != 0 {
                return Err(TorusError::NotInGeneratorLattice(k.to_vec()));
            }
            coords[col] = (num / den) as i64;
        }
        Ok(coords)
    }
}

/// Exponent vectors of the distinguished Δ₁ elements.
pub mod d1 {
    /// Boundary central element H_∂ = [X₁Z₂Z₃X₄].
    pub const H_BOUNDARY: [i64; 4] = [2, 1, 1, 2];
    /// Puncture central element H_p = [Z₂Z₃].
    pub const H_PUNCTURE: [i64; 4] = [0, 1, 1, 0];
    /// The Weyl monomial [Z₁Z₃Z₄]; its inverse is K^{1/2}.
    pub const Z134: [i64; 4] = [1, 0, 1, 1];
    /// The Weyl monomial [Z₁Z₂Z₄]; its inverse is L^{1/2}.
    pub const Z124: [i64; 4] = [1, 1, 0, 1];
    /// X₁ = Z₁².
    pub const X1: [i64; 4] = [2, 0, 0, 0];
}

/// Derive the Weil–Petersson pairing matrix of Δ₁ by exhaustive search over
/// antisymmetric integer matrices with entries in {−2,…,2}, constrained by:
/// (i) the exponent vectors of H_p and H_∂ pair to zero with everything,
/// (ii) ⟨[Z₁Z₃Z₄], X₁⟩ = 2, reproducing [Z₁Z₃Z₄]⁻¹X₁ = q X₁ [Z₁Z₃Z₄]⁻¹,
/// (iii) both monomials of the element E pair with the exponent of K^{1/2}
/// to 2, reproducing E K^{1/2} = q⁻¹ K^{1/2} E (this pins the global sign).
/// Exactly one matrix survives; anything else is an error.
pub fn derive_wp_d1() -> Result<Triangulation, TorusError> {
    let hp = d1::H_PUNCTURE;
    let hd = d1::H_BOUNDARY;
    let z134 = d1::Z134;
    let x1 = d1::X1;
    let k_khalf: [i64; 4] = [-1, 0, -1, -1];
    // Monomial exponents of E = −(q−q⁻¹)⁻¹ (X₄⁻¹ + [X₃X₄]⁻¹).
    let e_monos: [[i64; 4]; 2] = [[0, 0, 0, -2], [0, 0, -2, -2]];

    let pair = |m: &[[i64; 4]; 4], a: &[i64; 4], b: &[i64; 4]| -> i64 {
        let mut s = 0;
        for i in 0..4 {
            for j in 0..4 {
                s += a[i] * m[i][j] * b[j];
            }
        }
        s
    };

    let mut found: Option<[[i64; 4]; 4]> = None;
    let range = -2i64..=2;
    for m12 in range.clone() {
        for m13 in range.clone() {
            for m14 in range.clone() {
                for m23 in range.clone() {
                    for m24 in range.clone() {
                        for m34 in range.clone() {
                            let m = [
                                [0, m12, m13, m14],
                                [-m12, 0, m23, m24],
                                [-m13, -m23, 0, m34],
                                [-m14, -m24, -m34, 0],
                            ];
                            // (i) centrality of H_p, H_∂ as vector identities M·h = 0.
                            let central = (0..4).all(|i| {
                                (0..4).map(|j| m[i][j] * hp[j]).sum::<i64>() == 0
                                    && (0..4).map(|j| m[i][j] * hd[j]).sum::<i64>() == 0
                            });
                            if !central {
                                continue;
                            }
                            // (ii) q-commutation of [Z₁Z₃Z₄] against X₁.
                            if pair(&m, &z134, &x1) != 2 {
                                continue;
                            }
                            // (iii) sign pinning via E against K^{1/2}.
                            if e_monos.iter().any(|em| pair(&m, em, &k_khalf) != 2) {
                                continue;
                            }
                            if found.is_some() {
                                return Err(TorusError::AmbiguousForm);
                            }
                            found = Some(m);
                        }
                    }
                }
            }
        }
    }
    let m = found.ok_or(TorusError::NoConsistentForm)?;
    Ok(Arc::new(TriangulationData {
        num_edges: 4,
        wp: m.iter().map(|r| r.to_vec()).collect(),
        faces: vec![[0, 1, 2], [1, 2, 3]],
        generator_lattice: vec![
            hd.to_vec(),
            hp.to_vec(),
            z134.to_vec(),
            x1.to_vec(),
        ],
    }))
}

/// The chain triangulation Δ_n: 3n+1 edges; factor j (0-based) sees global
/// edges (3j, 3j+1, 3j+2, 3j+3) as its local Δ₁ edges (1,2,3,4), sharing
/// edge 3j+3 with factor j+1.
pub fn chain_triangulation(n: usize, dd1: &Triangulation) -> Triangulation {
    assert!(n >= 1);
    let num_edges = 3 * n + 1;
    let mut wp = vec![vec![0i64; num_edges]; num_edges];
    let mut faces = Vec::new();
    for j in 0..n {
        let g = |loc: usize| 3 * j + loc; // local edge index 0..3 -> global
        for a in 0..4 {
            for b in 0..4 {
                wp[g(a)][g(b)] += dd1.wp[a][b];
            }
        }
        faces.push([g(0), g(1), g(2)]);
        faces.push([g(1), g(2), g(3)]);
    }
    // Generator lattice: a basis of the full balanced lattice of Δ_n. The
    // balance conditions say that all "spine" exponents k_{3j} and all
    // middle-pair sums k_{3j+1}+k_{3j+2} share one parity, so a basis is:
    // the all-odd vector v (1 on every spine edge and on each first middle
    // edge), the puncture vectors H_{p_j}, and doubled unit vectors on the
    // first n spine edges and on each second middle edge (the last spine
    // double is a consequence of 2v and the rest).
    let mut gens: Vec<Vec<i64>> = Vec::new();
    if n == 1 {
        for base in [d1::H_BOUNDARY, d1::H_PUNCTURE, d1::Z134, d1::X1] {
            gens.push(base.to_vec());
        }
    } else {
        let mut v = vec![0i64; num_edges];
        for j in 0..=n {
            v[3 * j] = 1;
        }
        for j in 0..n {
            v[3 * j + 1] += 1;
        }
        gens.push(v);
        for j in 0..n {
            let mut h = vec![0i64; num_edges];
            h[3 * j + 1] = 1;
            h[3 * j + 2] = 1;
            gens.push(h);
        }
        for j in 0..n {
            let mut s = vec![0i64; num_edges];
            s[3 * j] = 2;
            gens.push(s);
            let mut m2 = vec![0i64; num_edges];
            m2[3 * j + 2] = 2;
            gens.push(m2);
        }
    }
    Arc::new(TriangulationData {
        num_edges,
        wp,
        faces,
        generator_lattice: gens,
    })
}

/// A finite linear combination of balanced Weyl monomials Z^k.
#[derive(Debug, Clone)]
pub struct TorusElement {
    pub alg: AlgCtx,
    pub tri: Triangulation,
    pub terms: BTreeMap<Vec<i64>, Coeff>,
}

impl TorusElement {
    pub fn zero(alg: &AlgCtx, tri: &Triangulation) -> Self {
        TorusElement {
            alg: alg.clone(),
            tri: tri.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alg: &AlgCtx, tri: &Triangulation) -> Self {
        Self::monomial(alg, tri, vec![0; tri.num_edges], Coeff::one(alg))
    }

    pub fn monomial(alg: &AlgCtx, tri: &Triangulation, expo: Vec<i64>, coeff: Coeff) -> Self {
        assert!(
            tri.is_balanced(&expo),
            "unbalanced exponent vector {:?}",
            expo
        );
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(expo, coeff);
        }
        TorusElement {
            alg: alg.clone(),
            tri: tri.clone(),
            terms,
        }
    }

    /// The Weyl-ordered bracket [Z_{e_1}…Z_{e_m}] = Z^{Σ e_i} (with
    /// multiplicity), coefficient 1.
    pub fn weyl_bracket(alg: &AlgCtx, tri: &Triangulation, edges: &[usize]) -> Self {
        let mut expo = vec![0i64; tri.num_edges];
        for &e in edges {
            expo[e] += 1;
        }
        Self::monomial(alg, tri, expo, Coeff::one(alg))
    }

    pub fn from_expo(alg: &AlgCtx, tri: &Triangulation, expo: &[i64]) -> Self {
        Self::monomial(alg, tri, expo.to_vec(), Coeff::one(alg))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &TorusElement) -> TorusElement {
        assert!(Arc::ptr_eq(&self.tri, &o.tri) || self.tri == o.tri);
        let mut out = self.clone();
        for (k, c) in &o.terms {
            let e = match out.terms.get(k) {
                Some(prev) => prev.add(c, &self.alg),
                None => c.clone(),
            };
            if e.is_zero() {
                out.terms.remove(k);
            } else {
                out.terms.insert(k.clone(), e);
            }
        }
        out
    }

    pub fn sub(&self, o: &TorusElement) -> TorusElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> TorusElement {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> TorusElement {
        let mut out = TorusElement::zero(&self.alg, &self.tri);
        for (k, v) in &self.terms {
            let e = v.mul(c, &self.alg);
            if !e.is_zero() {
                out.terms.insert(k.clone(), e);
            }
        }
        out
    }

    /// The twisted product: Z^k Z^k' = ω^{⟨k,k'⟩} Z^{k+k'}, extended
    /// bilinearly.
    pub fn mul(&self, o: &TorusElement) -> TorusElement {
        assert!(
            self.tri == o.tri,
            "product of elements over different triangulations"
        );
        let mut out = TorusElement::zero(&self.alg, &self.tri);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let phase = self.tri.pairing(ka, kb);
                let coeff = ca
                    .mul(cb, &self.alg)
                    .mul(&Coeff::omega_pow(&self.alg, phase), &self.alg);
                let ks: Vec<i64> = ka.iter().zip(kb.iter()).map(|(a, b)| a + b).collect();
                let e = match out.terms.get(&ks) {
                    Some(prev) => prev.add(&coeff, &self.alg),
                    None => coeff,
                };
                if e.is_zero() {
                    out.terms.remove(&ks);
                } else {
                    out.terms.insert(ks, e);
                }
            }
        }
        out
    }

    /// Inverse of a single monomial c·Z^k: c⁻¹·Z^{−k} (exact, since
    /// ⟨k,−k⟩ = 0).
    pub fn monomial_inv(&self) -> Result<TorusElement, TorusError> {
        if self.terms.len() != 1 {
            return Err(TorusError::NotMonomial);
        }
        let (k, c) = self.terms.iter().next().unwrap();
        Ok(TorusElement::monomial(
            &self.alg,
            &self.tri,
            k.iter().map(|x| -x).collect(),
            c.inv(),
        ))
    }

    /// Integer power of a single monomial ((c·Z^k)^m = c^m·Z^{mk}).
    pub fn monomial_pow(&self, m: i64) -> Result<TorusElement, TorusError> {
        if self.terms.len() != 1 {
            return Err(TorusError::NotMonomial);
        }
        let base = if m < 0 { self.monomial_inv()? } else { self.clone() };
        let (k, c) = base.terms.iter().next().unwrap();
        let n = m.unsigned_abs() as i64;
        let mut coeff = Coeff::one(&self.alg);
        for _ in 0..n {
            coeff = coeff.mul(c, &self.alg);
        }
        Ok(TorusElement::monomial(
            &self.alg,
            &self.tri,
            k.iter().map(|x| x * n).collect(),
            coeff,
        ))
    }

    /// General power by repeated multiplication (m ≥ 0).
    pub fn pow(&self, m: u32) -> TorusElement {
        let mut acc = TorusElement::one(&self.alg, &self.tri);
        for _ in 0..m {
            acc = acc.mul(self);
        }
        acc
    }

    /// The ordered (non-Weyl) product Π_i Z^{k_i} as a single element:
    /// ω^{Σ_{i<j}⟨k_i,k_j⟩} Z^{Σ k_i}.
    pub fn ordered_product(alg: &AlgCtx, tri: &Triangulation, expos: &[Vec<i64>]) -> Self {
        let mut phase = 0i64;
        for i in 0..expos.len() {
            for j in (i + 1)..expos.len() {
                phase += tri.pairing(&expos[i], &expos[j]);
            }
        }
        let mut total = vec![0i64; tri.num_edges];
        for e in expos {
            for (t, v) in total.iter_mut().zip(e.iter()) {
                *t += v;
            }
        }
        Self::monomial(alg, tri, total, Coeff::omega_pow(alg, phase))
    }

    /// Exact equality; requires every coefficient of the difference to be an
    /// exact zero in Q(ω). Returns false (never a false positive) if numeric
    /// coefficients are present and nonzero.
    pub fn equals_exact(&self, o: &TorusElement) -> bool {
        // Addition prunes exact zeros, so an exact difference is zero iff no
        // terms survive; any surviving numeric term counts as inequality.
        self.sub(o).terms.is_empty()
    }

    /// Numeric equality within eps, term by term.
    pub fn approx_eq(&self, o: &TorusElement) -> bool {
        let d = self.sub(o);
        d.terms
            .values()
            .all(|c| c.to_complex(&self.alg).norm() <= self.alg.root.eps)
    }

    /// Embed an element of Δ_n into the n-fold tensor power of the Δ₁ torus:
    /// Z^k ↦ ⊗_j Z^{k_j}, where k_j is the restriction of k to factor j's
    /// four edges (shared edges read by both neighbours). This is an algebra
    /// map because the chain pairing is the sum of the factor pairings.
    pub fn embed_chain(&self, d1_tri: &Triangulation) -> TensorTorusElement {
        let n = (self.tri.num_edges - 1) / 3;
        let mut out = TensorTorusElement::zero(&self.alg, d1_tri, n);
        for (k, c) in &self.terms {
            let legs: Vec<Vec<i64>> = (0..n)
                .map(|j| (0..4).map(|loc| k[3 * j + loc]).collect())
                .collect();
            out.terms.insert(legs, c.clone());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let v = c.to_complex(&self.alg);
                serde_json::json!({"expo": k, "re": v.re, "im": v.im})
            })
            .collect();
        serde_json::json!({"edges": self.tri.num_edges, "terms": terms})
    }

    pub fn from_json(
        alg: &AlgCtx,
        tri: &Triangulation,
        v: &serde_json::Value,
    ) -> Result<Self, String> {
        let edges = v["edges"].as_u64().ok_or("missing 'edges'")? as usize;
        if edges != tri.num_edges {
            return Err(format!(
                "edge count mismatch: JSON has {edges}, triangulation has {}",
                tri.num_edges
            ));
        }
        let mut out = TorusElement::zero(alg, tri);
        for t in v["terms"].as_array().ok_or("missing 'terms'")? {
            let expo: Vec<i64> = t["expo"]
                .as_array()
                .ok_or("missing 'expo'")?
                .iter()
                .map(|x| x.as_i64().ok_or("non-integer exponent"))
                .collect::<Result<_, _>>()?;
            if expo.len() != edges {
                return Err("exponent vector length mismatch".into());
            }
            if !tri.is_balanced(&expo) {
                return Err(format!("unbalanced exponent vector {:?}", expo));
            }
            let re = t["re"].as_f64().ok_or("missing 're'")?;
            let im = t["im"].as_f64().ok_or("missing 'im'")?;
            out = out.add(&TorusElement::monomial(
                alg,
                tri,
                expo,
                Coeff::approx(C64::new(re, im)),
            ));
        }
        Ok(out)
    }
}

/// A finite linear combination of pure tensors of Δ₁ Weyl monomials
/// (arbitrary number of legs); codomain of the coproduct and of chain
/// gluing.
#[derive(Debug, Clone)]
pub struct TensorTorusElement {
    pub alg: AlgCtx,
    pub tri: Triangulation,
    pub legs: usize,
    pub terms: BTreeMap<Vec<Vec<i64>>, Coeff>,
}

impl TensorTorusElement {
    pub fn zero(alg: &AlgCtx, tri: &Triangulation, legs: usize) -> Self {
        TensorTorusElement {
            alg: alg.clone(),
            tri: tri.clone(),
            legs,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alg: &AlgCtx, tri: &Triangulation, legs: usize) -> Self {
        let mut t = Self::zero(alg, tri, legs);
        t.terms
            .insert(vec![vec![0; tri.num_edges]; legs], Coeff::one(alg));
        t
    }

    /// Pure tensor of single-leg elements.
    pub fn tensor(factors: &[&TorusElement]) -> Self {
        assert!(!factors.is_empty());
        let alg = factors[0].alg.clone();
        let tri = factors[0].tri.clone();
        let mut out = Self::zero(&alg, &tri, factors.len());
        out.terms
            .insert(vec![vec![0; tri.num_edges]; 0], Coeff::one(&alg));
        // Build up leg by leg.
        let mut acc: Vec<(Vec<Vec<i64>>, Coeff)> = vec![(vec![], Coeff::one(&alg))];
        for f in factors {
            let mut next = Vec::new();
            for (legs, c) in &acc {
                for (k, fc) in &f.terms {
                    let mut l2 = legs.clone();
                    l2.push(k.clone());
                    next.push((l2, c.mul(fc, &alg)));
                }
            }
            acc = next;
        }
        out.terms.clear();
        for (legs, c) in acc {
            if !c.is_zero() {
                out.terms.insert(legs, c);
            }
        }
        out
    }

    pub fn add(&self, o: &TensorTorusElement) -> TensorTorusElement {
        assert_eq!(self.legs, o.legs);
        let mut out = self.clone();
        for (k, c) in &o.terms {
            let e = match out.terms.get(k) {
                Some(prev) => prev.add(c, &self.alg),
                None => c.clone(),
            };
            if e.is_zero() {
                out.terms.remove(k);
            } else {
                out.terms.insert(k.clone(), e);
            }
        }
        out
    }

    pub fn sub(&self, o: &TensorTorusElement) -> TensorTorusElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> TensorTorusElement {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> TensorTorusElement {
        let mut out = Self::zero(&self.alg, &self.tri, self.legs);
        for (k, v) in &self.terms {
            let e = v.mul(c, &self.alg);
            if !e.is_zero() {
                out.terms.insert(k.clone(), e);
            }
        }
        out
    }

    /// Componentwise twisted product: the phase is the sum of the per-leg
    /// Weyl phases.
    pub fn mul(&self, o: &TensorTorusElement) -> TensorTorusElement {
        assert_eq!(self.legs, o.legs);
        let mut out = Self::zero(&self.alg, &self.tri, self.legs);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let mut phase = 0i64;
                let mut ks = Vec::with_capacity(self.legs);
                for (la, lb) in ka.iter().zip(kb.iter()) {
                    phase += self.tri.pairing(la, lb);
                    ks.push(la.iter().zip(lb.iter()).map(|(a, b)| a + b).collect());
                }
                let coeff = ca
                    .mul(cb, &self.alg)
                    .mul(&Coeff::omega_pow(&self.alg, phase), &self.alg);
                let e = match out.terms.get(&ks) {
                    Some(prev) => prev.add(&coeff, &self.alg),
                    None => coeff,
                };
                if e.is_zero() {
                    out.terms.remove(&ks);
                } else {
                    out.terms.insert(ks, e);
                }
            }
        }
        out
    }

    pub fn equals_exact(&self, o: &TensorTorusElement) -> bool {
        let d = self.sub(o);
        d.terms.is_empty()
    }

    /// Apply a map to each term's legs (e.g. expanding one leg into more
    /// legs via a coproduct), summing the results.
    pub fn map_terms<F>(&self, legs_out: usize, mut f: F) -> TensorTorusElement
    where
        F: FnMut(&[Vec<i64>], &Coeff) -> TensorTorusElement,
    {
        let mut out = Self::zero(&self.alg, &self.tri, legs_out);
        for (k, c) in &self.terms {
            out = out.add(&f(k, c));
        }
        out
    }
}

/// Central elements of the chain torus: one H_p per inner puncture and the
/// boundary element H_∂.
pub fn central_elements(
    alg: &AlgCtx,
    tri: &Triangulation,
) -> (Vec<TorusElement>, TorusElement) {
    let n = (tri.num_edges - 1) / 3;
    let punctures = (0..n)
        .map(|j| {
            let mut expo = vec![0i64; tri.num_edges];
            expo[3 * j + 1] = 1;
            expo[3 * j + 2] = 1;
            TorusElement::monomial(alg, tri, expo, Coeff::one(alg))
        })
        .collect();
    let mut hd = vec![0i64; tri.num_edges];
    for j in 0..n {
        for (loc, v) in d1::H_BOUNDARY.iter().enumerate() {
            // Shared edges are read by both neighbouring factors but carry
            // exponent 2 once, not 4: take the max contribution per edge.
            let idx = 3 * j + loc;
            hd[idx] = hd[idx].max(*v);
        }
    }
    let boundary = TorusElement::monomial(alg, tri, hd, Coeff::one(alg));
    (punctures, boundary)
}
