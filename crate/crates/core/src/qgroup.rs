//! The quantum group realized inside the Δ₁ quantum torus.
//!
//! Generators are concrete torus elements (images of the quantum trace), so
//! every relation of the presentation, the Hopf axioms on generators, and
//! the central identities are verified as exact identities of the twisted
//! group algebra — pure lattice-cocycle arithmetic over Q(ω), no floats.

use crate::torus::{d1, AlgCtx, Coeff, TensorTorusElement, TorusElement, Triangulation};
use serde::Serialize;

/// The distinguished torus elements generating the quantum group, plus the
/// central elements built from them.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub alg: AlgCtx,
    pub tri: Triangulation,
    pub e: TorusElement,
    pub f: TorusElement,
    pub khalf: TorusElement,
    pub khalf_inv: TorusElement,
    pub lhalf: TorusElement,
    pub lhalf_inv: TorusElement,
    /// Casimir C = −T·H_∂⁻¹/(q−q⁻¹)².
    pub c: TorusElement,
    /// Puncture trace T = H_p + H_p⁻¹.
    pub t: TorusElement,
    pub hp: TorusElement,
    pub hdel: TorusElement,
}

/// One symbolic generator of the Hopf structure. The coproduct, counit and
/// antipode are defined on these symbols; all axiom checks then evaluate the
/// symbols back to torus elements, so the checks use real torus products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopfAtom {
    One,
    E,
    F,
    Khalf,
    KhalfInv,
    Lhalf,
    LhalfInv,
    K,
    Kinv,
    L,
    Linv,
}

impl HopfAtom {
    pub fn torus_elem(self, g: &GeneratorSet) -> TorusElement {
        match self {
            HopfAtom::One => TorusElement::one(&g.alg, &g.tri),
            HopfAtom::E => g.e.clone(),
            HopfAtom::F => g.f.clone(),
            HopfAtom::Khalf => g.khalf.clone(),
            HopfAtom::KhalfInv => g.khalf_inv.clone(),
            HopfAtom::Lhalf => g.lhalf.clone(),
            HopfAtom::LhalfInv => g.lhalf_inv.clone(),
            HopfAtom::K => g.khalf.mul(&g.khalf),
            HopfAtom::Kinv => g.khalf_inv.mul(&g.khalf_inv),
            HopfAtom::L => g.lhalf.mul(&g.lhalf),
            HopfAtom::Linv => g.lhalf_inv.mul(&g.lhalf_inv),
        }
    }

    /// Coproduct as a formal sum of atom pairs (all coefficients are 1).
    pub fn delta(self) -> Vec<(HopfAtom, HopfAtom)> {
        match self {
            HopfAtom::E => vec![(HopfAtom::One, HopfAtom::E), (HopfAtom::E, HopfAtom::K)],
            HopfAtom::F => vec![(HopfAtom::F, HopfAtom::One), (HopfAtom::L, HopfAtom::F)],
            x => vec![(x, x)],
        }
    }

    /// Counit.
    pub fn eps(self) -> i64 {
        match self {
            HopfAtom::E | HopfAtom::F => 0,
            _ => 1,
        }
    }

    /// Antipode as a signed word of atoms: S(E) = −E K⁻¹, S(F) = −L⁻¹ F,
    /// S(x) = x⁻¹ on the group-likes.
    pub fn antipode(self) -> (i64, Vec<HopfAtom>) {
        match self {
            HopfAtom::One => (1, vec![]),
            HopfAtom::E => (-1, vec![HopfAtom::E, HopfAtom::Kinv]),
            HopfAtom::F => (-1, vec![HopfAtom::Linv, HopfAtom::F]),
            HopfAtom::Khalf => (1, vec![HopfAtom::KhalfInv]),
            HopfAtom::KhalfInv => (1, vec![HopfAtom::Khalf]),
            HopfAtom::Lhalf => (1, vec![HopfAtom::LhalfInv]),
            HopfAtom::LhalfInv => (1, vec![HopfAtom::Lhalf]),
            HopfAtom::K => (1, vec![HopfAtom::Kinv]),
            HopfAtom::Kinv => (1, vec![HopfAtom::K]),
            HopfAtom::L => (1, vec![HopfAtom::Linv]),
            HopfAtom::Linv => (1, vec![HopfAtom::L]),
        }
    }

    /// Cartan involution Θ₁: swaps the K and L families and E with F.
    pub fn cartan(self) -> HopfAtom {
        match self {
            HopfAtom::E => HopfAtom::F,
            HopfAtom::F => HopfAtom::E,
            HopfAtom::Khalf => HopfAtom::Lhalf,
            HopfAtom::KhalfInv => HopfAtom::LhalfInv,
            HopfAtom::Lhalf => HopfAtom::Khalf,
            HopfAtom::LhalfInv => HopfAtom::KhalfInv,
            HopfAtom::K => HopfAtom::L,
            HopfAtom::Kinv => HopfAtom::Linv,
            HopfAtom::L => HopfAtom::K,
            HopfAtom::Linv => HopfAtom::Kinv,
            HopfAtom::One => HopfAtom::One,
        }
    }
}

pub const HOPF_GENERATORS: [HopfAtom; 6] = [
    HopfAtom::E,
    HopfAtom::F,
    HopfAtom::Khalf,
    HopfAtom::KhalfInv,
    HopfAtom::Lhalf,
    HopfAtom::LhalfInv,
];

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub id: String,
    pub pass: bool,
}

pub fn build_generators(alg: &AlgCtx, tri: &Triangulation) -> GeneratorSet {
    let mono = |e: &[i64]| TorusElement::from_expo(alg, tri, e);
    let khalf = mono(&d1::Z134).monomial_inv().unwrap();
    let khalf_inv = mono(&d1::Z134);
    let lhalf = mono(&d1::Z124).monomial_inv().unwrap();
    let lhalf_inv = mono(&d1::Z124);
    // (q − q⁻¹)⁻¹ exactly in Q(ω).
    let q = Coeff::q_pow(alg, 1);
    let qinv = Coeff::q_pow(alg, -1);
    let qq = match (q, qinv) {
        (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a.sub(&b)),
        _ => unreachable!(),
    };
    let qq_inv = qq.inv();
    let e = mono(&[0, 0, 0, -2])
        .add(&mono(&[0, 0, -2, -2]))
        .scale(&qq_inv)
        .neg();
    let f = mono(&[-2, 0, 0, 0])
        .add(&mono(&[-2, -2, 0, 0]))
        .scale(&qq_inv);
    let hp = mono(&d1::H_PUNCTURE);
    let hdel = mono(&d1::H_BOUNDARY);
    let t = hp.add(&hp.monomial_inv().unwrap());
    // C = −T·H_∂⁻¹/(q−q⁻¹)².
    let c = t
        .mul(&hdel.monomial_inv().unwrap())
        .scale(&qq_inv.mul(&qq_inv, alg))
        .neg();
    GeneratorSet {
        alg: alg.clone(),
        tri: tri.clone(),
        e,
        f,
        khalf,
        khalf_inv,
        lhalf,
        lhalf_inv,
        c,
        t,
        hp,
        hdel,
    }
}

impl GeneratorSet {
    pub fn k(&self) -> TorusElement {
        self.khalf.mul(&self.khalf)
    }
    pub fn kinv(&self) -> TorusElement {
        self.khalf_inv.mul(&self.khalf_inv)
    }
    pub fn l(&self) -> TorusElement {
        self.lhalf.mul(&self.lhalf)
    }
    pub fn linv(&self) -> TorusElement {
        self.lhalf_inv.mul(&self.lhalf_inv)
    }

    /// (q − q⁻¹) as an exact coefficient.
    pub fn qq(&self) -> Coeff {
        match (Coeff::q_pow(&self.alg, 1), Coeff::q_pow(&self.alg, -1)) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a.sub(&b)),
            _ => unreachable!(),
        }
    }
}

/// The defining relations as (id, residual) pairs; every residual must be the
/// exact zero element. The E/F relations are checked both in the direct form
/// (exact field coefficients) and with all (q−q⁻¹) denominators cleared.
pub fn verify_presentation(g: &GeneratorSet) -> Vec<RelationReport> {
    let alg = &g.alg;
    let q = Coeff::q_pow(alg, 1);
    let qinv = Coeff::q_pow(alg, -1);
    let mut out = Vec::new();
    let mut check = |id: &str, residual: TorusElement| {
        out.push(RelationReport {
            id: id.to_string(),
            pass: residual.is_zero(),
        });
    };

    check(
        "E_Khalf",
        g.e.mul(&g.khalf).sub(&g.khalf.mul(&g.e).scale(&qinv)),
    );
    check("E_Lhalf", g.e.mul(&g.lhalf).sub(&g.lhalf.mul(&g.e).scale(&q)));
    check("F_Khalf", g.f.mul(&g.khalf).sub(&g.khalf.mul(&g.f).scale(&q)));
    check(
        "F_Lhalf",
        g.f.mul(&g.lhalf).sub(&g.lhalf.mul(&g.f).scale(&qinv)),
    );
    let family = [&g.khalf, &g.khalf_inv, &g.lhalf, &g.lhalf_inv];
    let mut comm_ok = TorusElement::zero(alg, &g.tri);
    for x in family {
        for y in family {
            comm_ok = comm_ok.add(&x.mul(y).sub(&y.mul(x)));
        }
    }
    check("KL_family_commutes", comm_ok);
    check(
        "Khalf_inverse",
        g.khalf
            .mul(&g.khalf_inv)
            .sub(&TorusElement::one(alg, &g.tri)),
    );
    check(
        "Lhalf_inverse",
        g.lhalf
            .mul(&g.lhalf_inv)
            .sub(&TorusElement::one(alg, &g.tri)),
    );
    // EF − FE = (K − L)/(q − q⁻¹), direct exact form.
    let comm = g.e.mul(&g.f).sub(&g.f.mul(&g.e));
    let rhs = g.k().sub(&g.l()).scale(&g.qq().inv());
    check("EF_FE", comm.sub(&rhs));
    // Denominator-cleared form: (q−q⁻¹)(EF−FE) − (K−L).
    check(
        "EF_FE_cleared",
        comm.scale(&g.qq()).sub(&g.k().sub(&g.l())),
    );
    out
}

/// Central identities: the Casimir formula, the trace identity for T, the
/// freshman's-dream collapse of Eᴺ and Fᴺ, centrality of Eᴺ/Fᴺ, and the
/// degree-N relation tying T to the other central generators.
pub fn casimir_and_center_check(g: &GeneratorSet) -> Vec<RelationReport> {
    let alg = &g.alg;
    let n = alg.root.n;
    let mut out = Vec::new();
    let mut check = |id: &str, residual: TorusElement| {
        out.push(RelationReport {
            id: id.to_string(),
            pass: residual.is_zero(),
        });
    };
    let qq = g.qq();
    let qq2 = qq.mul(&qq, alg);
    let q = Coeff::q_pow(alg, 1);
    let qinv = Coeff::q_pow(alg, -1);

    // C = EF + (qL + q⁻¹K)/(q−q⁻¹)².
    let rhs = g
        .e
        .mul(&g.f)
        .add(&g.l().scale(&q).add(&g.k().scale(&qinv)).scale(&qq2.inv()));
    check("casimir_formula", g.c.sub(&rhs));
    // By symmetry, C = FE + (qK + q⁻¹L)/(q−q⁻¹)².
    let rhs2 = g
        .f
        .mul(&g.e)
        .add(&g.k().scale(&q).add(&g.l().scale(&qinv)).scale(&qq2.inv()));
    check("casimir_formula_swapped", g.c.sub(&rhs2));
    // T = −H_∂(q⁻¹K + qL) − (q−q⁻¹)²EFH_∂.
    let t_rhs = g
        .hdel
        .mul(&g.k().scale(&qinv).add(&g.l().scale(&q)))
        .neg()
        .sub(&g.e.mul(&g.f).mul(&g.hdel).scale(&qq2));
    check("trace_identity_T", g.t.sub(&t_rhs));

    // Freshman's dream: (u+v)^N = u^N + v^N for the q²-commuting monomial
    // pairs inside E and F, by brute N-fold expansion.
    let u = TorusElement::from_expo(alg, &g.tri, &[0, 0, 0, -2]);
    let v = TorusElement::from_expo(alg, &g.tri, &[0, 0, -2, -2]);
    let sum_pow = u.add(&v).pow(n);
    let collapsed = u.pow(n).add(&v.pow(n));
    check("binomial_collapse_E", sum_pow.sub(&collapsed));
    let uf = TorusElement::from_expo(alg, &g.tri, &[-2, 0, 0, 0]);
    let vf = TorusElement::from_expo(alg, &g.tri, &[-2, -2, 0, 0]);
    check(
        "binomial_collapse_F",
        uf.add(&vf).pow(n).sub(&uf.pow(n).add(&vf.pow(n))),
    );

    // Eᴺ, Fᴺ collapse to at most two Weyl monomials and are central against
    // the generators.
    let en = g.e.pow(n);
    let fn_ = g.f.pow(n);
    let mut central = TorusElement::zero(alg, &g.tri);
    for x in [&g.e, &g.f, &g.khalf, &g.lhalf] {
        central = central
            .add(&en.mul(x).sub(&x.mul(&en)))
            .add(&fn_.mul(x).sub(&x.mul(&fn_)));
    }
    check("EN_FN_central", central);

    // T_N(T) + K^{N/2}L^{−N/2} + L^{N/2}K^{−N/2} + (q−q⁻¹)^{2N} EᴺFᴺH_∂ᴺ = 0.
    let tn = chebyshev_torus(g, n);
    let kl = g
        .khalf
        .monomial_pow(n as i64)
        .unwrap()
        .mul(&g.lhalf_inv.monomial_pow(n as i64).unwrap());
    let lk = g
        .lhalf
        .monomial_pow(n as i64)
        .unwrap()
        .mul(&g.khalf_inv.monomial_pow(n as i64).unwrap());
    let mut qq2n = Coeff::one(alg);
    for _ in 0..(2 * n) {
        qq2n = qq2n.mul(&qq, alg);
    }
    let tail = en
        .mul(&fn_)
        .mul(&g.hdel.monomial_pow(n as i64).unwrap())
        .scale(&qq2n);
    check("center_relation_degree_N", tn.add(&kl).add(&lk).add(&tail));
    out
}

/// Chebyshev polynomial (T_0 = 2, T_1 = x, T_{m+2} = x·T_{m+1} − T_m)
/// evaluated on the torus element T.
fn chebyshev_torus(g: &GeneratorSet, m: u32) -> TorusElement {
    let two = TorusElement::one(&g.alg, &g.tri).scale(&Coeff::from_i64(&g.alg, 2));
    let mut t0 = two;
    let mut t1 = g.t.clone();
    match m {
        0 => t0,
        1 => t1,
        _ => {
            for _ in 2..=m {
                let t2 = g.t.mul(&t1).sub(&t0);
                t0 = t1;
                t1 = t2;
            }
            t1
        }
    }
}


/// Hopf axiom checks on the six generators: coassociativity, both counit
/// laws, and both antipode convolution laws. Everything is evaluated with
/// exact torus products.
pub fn hopf_axiom_check(g: &GeneratorSet) -> Vec<RelationReport> {
    let alg = &g.alg;
    let mut out = Vec::new();
    for x in HOPF_GENERATORS {
        // Coassociativity: (Δ⊗id)Δ(x) = (id⊗Δ)Δ(x) in three legs.
        let mut lhs = TensorTorusElement::zero(alg, &g.tri, 3);
        let mut rhs = TensorTorusElement::zero(alg, &g.tri, 3);
        for (a, b) in x.delta() {
            for (a1, a2) in a.delta() {
                lhs = lhs.add(&TensorTorusElement::tensor(&[
                    &a1.torus_elem(g),
                    &a2.torus_elem(g),
                    &b.torus_elem(g),
                ]));
            }
            for (b1, b2) in b.delta() {
                rhs = rhs.add(&TensorTorusElement::tensor(&[
                    &a.torus_elem(g),
                    &b1.torus_elem(g),
                    &b2.torus_elem(g),
                ]));
            }
        }
        out.push(RelationReport {
            id: format!("coassoc_{:?}", x),
            pass: lhs.equals_exact(&rhs),
        });

        // Counit: (ε⊗id)Δ(x) = x and (id⊗ε)Δ(x) = x.
        let mut left = TorusElement::zero(alg, &g.tri);
        let mut right = TorusElement::zero(alg, &g.tri);
        for (a, b) in x.delta() {
            left = left.add(&b.torus_elem(g).scale(&Coeff::from_i64(alg, a.eps())));
            right = right.add(&a.torus_elem(g).scale(&Coeff::from_i64(alg, b.eps())));
        }
        let xe = x.torus_elem(g);
        out.push(RelationReport {
            id: format!("counit_left_{:?}", x),
            pass: left.equals_exact(&xe),
        });
        out.push(RelationReport {
            id: format!("counit_right_{:?}", x),
            pass: right.equals_exact(&xe),
        });

        // Antipode: m(S⊗id)Δ(x) = ε(x)·1 = m(id⊗S)Δ(x).
        let eps1 = TorusElement::one(alg, &g.tri).scale(&Coeff::from_i64(alg, x.eps()));
        let mut conv_l = TorusElement::zero(alg, &g.tri);
        let mut conv_r = TorusElement::zero(alg, &g.tri);
        for (a, b) in x.delta() {
            let (sa_sign, sa_word) = a.antipode();
            let mut sa = TorusElement::one(alg, &g.tri).scale(&Coeff::from_i64(alg, sa_sign));
            for w in sa_word {
                sa = sa.mul(&w.torus_elem(g));
            }
            conv_l = conv_l.add(&sa.mul(&b.torus_elem(g)));
            let (sb_sign, sb_word) = b.antipode();
            let mut sb = TorusElement::one(alg, &g.tri).scale(&Coeff::from_i64(alg, sb_sign));
            for w in sb_word {
                sb = sb.mul(&w.torus_elem(g));
            }
            conv_r = conv_r.add(&a.torus_elem(g).mul(&sb));
        }
        out.push(RelationReport {
            id: format!("antipode_left_{:?}", x),
            pass: conv_l.equals_exact(&eps1),
        });
        out.push(RelationReport {
            id: format!("antipode_right_{:?}", x),
            pass: conv_r.equals_exact(&eps1),
        });
    }
    out
}

/// The Cartan involution Θ₁ on generator symbols, with two checks: it
/// squares to the identity, and the image of every defining relation holds
/// exactly (i.e. is again a relation).
pub fn cartan_involution_check(g: &GeneratorSet) -> Vec<RelationReport> {
    let alg = &g.alg;
    let mut out = Vec::new();
    for x in HOPF_GENERATORS {
        out.push(RelationReport {
            id: format!("cartan_involutive_{:?}", x),
            pass: x.cartan().cartan() == x,
        });
    }
    // Θ₁ images of the q-commutation relations: e.g. the image of
    // E·K^{1/2} = q⁻¹K^{1/2}E is F·L^{1/2} = q⁻¹L^{1/2}F, which is itself
    // in the list. Check the image identities exactly.
    let q = Coeff::q_pow(alg, 1);
    let qinv = Coeff::q_pow(alg, -1);
    type Rel = (
        &'static str,
        HopfAtom,
        HopfAtom,
        bool, // true: scalar is q⁻¹, false: q
        &'static str,
    );
    // (id, x, y, scalar, expected partner id) for the relation x·y = s·y·x.
    let rels: [Rel; 4] = [
        ("E_Khalf", HopfAtom::E, HopfAtom::Khalf, true, "F_Lhalf"),
        ("E_Lhalf", HopfAtom::E, HopfAtom::Lhalf, false, "F_Khalf"),
        ("F_Khalf", HopfAtom::F, HopfAtom::Khalf, false, "E_Lhalf"),
        ("F_Lhalf", HopfAtom::F, HopfAtom::Lhalf, true, "E_Khalf"),
    ];
    for (id, x, y, is_qinv, partner) in rels {
        let (xi, yi) = (x.cartan(), y.cartan());
        let s = if is_qinv { &qinv } else { &q };
        let residual = xi
            .torus_elem(g)
            .mul(&yi.torus_elem(g))
            .sub(&yi.torus_elem(g).mul(&xi.torus_elem(g)).scale(s));
        out.push(RelationReport {
            id: format!("cartan_image_{id}_is_{partner}"),
            pass: residual.is_zero(),
        });
    }
    // Image of EF−FE = (K−L)/(q−q⁻¹): FE−EF = (L−K)/(q−q⁻¹), i.e. the same
    // relation negated.
    let comm = g.f.mul(&g.e).sub(&g.e.mul(&g.f));
    let rhs = g.l().sub(&g.k()).scale(&g.qq().inv());
    out.push(RelationReport {
        id: "cartan_image_EF_FE".into(),
        pass: comm.sub(&rhs).is_zero(),
    });
    out
}

/// Θ₂ on a two-leg tensor element: Θ₁ on each leg, legs swapped. Θ₁ acts on
/// the torus by the lattice symmetry exchanging the two families, realized
/// here only on elements expressible through the Hopf atoms; the generic
/// entry point used by the braiding layer works on atom words.
pub fn theta2_on_atom_pairs(pairs: &[(HopfAtom, HopfAtom)]) -> Vec<(HopfAtom, HopfAtom)> {
    pairs.iter().map(|(a, b)| (b.cartan(), a.cartan())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::RootContext;
    use crate::torus::derive_wp_d1;

    fn gens(n: u32, k: u32) -> GeneratorSet {
        let alg = AlgCtx::new(RootContext::new(n, k).unwrap());
        let tri = derive_wp_d1().unwrap();
        build_generators(&alg, &tri)
    }

    #[test]
    fn presentation_exact() {
        for (n, k) in [(3u32, 1u32), (5, 1), (5, 2), (7, 3), (9, 2)] {
            let g = gens(n, k);
            for r in verify_presentation(&g) {
                assert!(r.pass, "relation {} failed at N={n}, k={k}", r.id);
            }
        }
    }

    #[test]
    fn center_identities_exact() {
        for (n, k) in [(3u32, 1u32), (5, 2), (7, 1)] {
            let g = gens(n, k);
            for r in casimir_and_center_check(&g) {
                assert!(r.pass, "identity {} failed at N={n}, k={k}", r.id);
            }
        }
    }

    #[test]
    fn hopf_axioms_exact() {
        for (n, k) in [(3u32, 1u32), (5, 2)] {
            let g = gens(n, k);
            for r in hopf_axiom_check(&g) {
                assert!(r.pass, "axiom {} failed at N={n}, k={k}", r.id);
            }
        }
    }

    #[test]
    fn cartan_involution_maps_relations() {
        let g = gens(5, 1);
        for r in cartan_involution_check(&g) {
            assert!(r.pass, "check {} failed", r.id);
        }
    }

    #[test]
    fn hdel_is_khalfinv_lhalfinv() {
        let g = gens(7, 2);
        // H_∂ = K^{-1/2}L^{-1/2} with exact phase 1.
        assert!(g.hdel.equals_exact(&g.khalf_inv.mul(&g.lhalf_inv)));
        // T central against X₁.
        let x1 = TorusElement::from_expo(&g.alg, &g.tri, &d1::X1);
        assert!(g.t.mul(&x1).equals_exact(&x1.mul(&g.t)));
    }

    #[test]
    fn en_fn_monomial_values() {
        // Fᴺ = (q−q⁻¹)^{−N} X₁^{−N}(1 + X₂^{−N}) — the collapse gives the
        // two monomials with no extra ω-phase.
        let g = gens(5, 1);
        let n = 5;
        let fn_ = g.f.pow(n);
        let x1invn = TorusElement::from_expo(&g.alg, &g.tri, &[-2, 0, 0, 0])
            .monomial_pow(n as i64)
            .unwrap();
        let x2invn = TorusElement::from_expo(&g.alg, &g.tri, &[0, -2, 0, 0])
            .monomial_pow(n as i64)
            .unwrap();
        let one = TorusElement::one(&g.alg, &g.tri);
        let mut qqn = Coeff::one(&g.alg);
        for _ in 0..n {
            qqn = qqn.mul(&g.qq(), &g.alg);
        }
        let expect = x1invn.mul(&one.add(&x2invn)).scale(&qqn.inv());
        assert!(fn_.equals_exact(&expect));
    }
}
