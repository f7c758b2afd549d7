//! Colored braid words over standard modules: evaluation as composites of
//! braiding operators, pivotal closures, and the two-route smoke checks on
//! scalar colorings. Closure scalars carry an N²-th root-of-unity phase
//! ambiguity and are reported as experimental values, not as certified link
//! invariants.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::braiding::{
    closed_formula_r, det_normalize, drinfeld_r, standard_intertwiner, BraidingError,
    PairContext, RootChoices,
};
use crate::contraction_oracle;
use crate::qgroup::build_generators;
use crate::reps::{
    build_rep, kron, mat_pow, standard_rep, standard_to_weight, weight_to_standard, RepError,
    StandardModuleSpec, WeightModuleSpec,
};
use crate::scalars::{C64, RootContext};

fn cone() -> C64 {
    Complex64::new(1.0, 0.0)
}

#[derive(Debug)]
pub enum BraidError {
    /// The crossing at letter k (0-based) is not admissible.
    NotTriangulableAtStep(usize, String),
    /// Closure requested between modules with different central characters.
    CharacterMismatch(String),
    Braiding(BraidingError),
    Rep(RepError),
}

impl From<BraidingError> for BraidError {
    fn from(e: BraidingError) -> Self {
        BraidError::Braiding(e)
    }
}
impl From<RepError> for BraidError {
    fn from(e: RepError) -> Self {
        BraidError::Rep(e)
    }
}
impl std::fmt::Display for BraidError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self)
    }
}
impl std::error::Error for BraidError {}

/// A braid word: letters are (index i ∈ 1..strands−1, sign ±1) for σᵢ^±.
#[derive(Debug, Clone)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<(usize, i8)>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<(usize, i8)>) -> Result<Self, String> {
        if strands < 1 {
            return Err("need at least one strand".into());
        }
        for &(i, s) in &letters {
            if i < 1 || i >= strands {
                return Err(format!("letter index {i} out of range for {strands} strands"));
            }
            if s != 1 && s != -1 {
                return Err("letter sign must be ±1".into());
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn trefoil() -> Self {
        BraidWord::new(2, vec![(1, 1), (1, 1), (1, 1)]).unwrap()
    }

    pub fn figure_eight() -> Self {
        BraidWord::new(3, vec![(1, 1), (2, -1), (1, 1), (2, -1)]).unwrap()
    }
}

/// A braid word with an initial coloring by standard modules and optional
/// per-letter root-choice overrides.
#[derive(Debug, Clone)]
pub struct ColoredBraid {
    pub word: BraidWord,
    pub colors: Vec<StandardModuleSpec>,
    pub roots: Vec<Option<RootChoices>>,
}

impl ColoredBraid {
    pub fn new(word: BraidWord, colors: Vec<StandardModuleSpec>) -> Result<Self, String> {
        if colors.len() != word.strands {
            return Err(format!(
                "{} colors for {} strands",
                colors.len(),
                word.strands
            ));
        }
        let nl = word.letters.len();
        Ok(ColoredBraid {
            word,
            colors,
            roots: vec![None; nl],
        })
    }
}

/// Pivot operators ρ((K^{1/2}L^{−1/2})^{N−1}), one per strand.
pub struct PivotalData {
    pub pivots: Vec<DMatrix<C64>>,
}

impl PivotalData {
    pub fn for_standard(
        pc: &PairContext,
        specs: &[StandardModuleSpec],
    ) -> Result<Self, BraidError> {
        let ctx = pc.ctx();
        let gens = build_generators(&pc.alg, &pc.d1);
        let mut pivots = Vec::new();
        for s in specs {
            let r = standard_rep(&gens, s)?;
            let kl = &r.khalf * r.lhalf_inv();
            pivots.push(mat_pow(&kl, ctx.n as i64 - 1));
        }
        Ok(PivotalData { pivots })
    }
}

fn spec_close(a: &StandardModuleSpec, b: &StandardModuleSpec) -> bool {
    let d = |x: C64, y: C64| (x - y).norm() / (1.0 + x.norm());
    d(a.x1, b.x1) < 1e-6
        && d(a.lambda, b.lambda) < 1e-6
        && d(a.hp, b.hp) < 1e-6
        && d(a.hdel, b.hdel) < 1e-6
}

/// Evaluate a colored braid into an operator on the tensor product of the
/// strand modules, threading the colors through each crossing. Returns the
/// operator together with the final color list.
pub fn evaluate_braid(
    pc: &PairContext,
    cb: &ColoredBraid,
) -> Result<(DMatrix<C64>, Vec<StandardModuleSpec>), BraidError> {
    let ctx = pc.ctx();
    let n = ctx.n as usize;
    let dim = n.pow(cb.word.strands as u32);
    let mut op = DMatrix::<C64>::identity(dim, dim);
    let mut state = cb.colors.clone();
    for (step, &(pos, sign)) in cb.word.letters.iter().enumerate() {
        let rc = cb.roots.get(step).copied().flatten().unwrap_or_default();
        let (a, b) = (state[pos - 1].clone(), state[pos].clone());
        let (mat, t1, t2) = if sign > 0 {
            let (r, _) = closed_formula_r(pc, &a, &b, rc).map_err(|e| {
                BraidError::NotTriangulableAtStep(step, format!("{:?}", e))
            })?;
            let (t1, t2) = (r.target.0.clone(), r.target.1.clone());
            (r.matrix, t1, t2)
        } else {
            // Inverse crossing: numerically invert the forward crossing whose
            // source is the swapped pair; its target must be the current pair.
            let (r, _) = closed_formula_r(pc, &b, &a, rc).map_err(|e| {
                BraidError::NotTriangulableAtStep(step, format!("{:?}", e))
            })?;
            if !spec_close(&r.target.0, &a) || !spec_close(&r.target.1, &b) {
                return Err(BraidError::NotTriangulableAtStep(
                    step,
                    "inverse crossing target does not match the current colors".into(),
                ));
            }
            let inv = r.matrix.clone().try_inverse().ok_or_else(|| {
                BraidError::NotTriangulableAtStep(step, "singular forward crossing".into())
            })?;
            (inv, b.clone(), a.clone())
        };
        state[pos - 1] = t1;
        state[pos] = t2;
        let left = DMatrix::<C64>::identity(n.pow((pos - 1) as u32), n.pow((pos - 1) as u32));
        let rdim = n.pow((cb.word.strands - pos - 1) as u32);
        let right = DMatrix::<C64>::identity(rdim, rdim);
        let stepop = kron(&left, &kron(&mat, &right));
        op = stepop * op;
    }
    Ok((op, state))
}

/// Alignment map from one standard module to another: identity when the
/// specs coincide, a quantum-torus intertwiner when they are isomorphic over
/// the torus, and otherwise the canonical bridge through a common weight
/// module (both lifts must restrict to the same weight module).
fn alignment_map(
    pc: &PairContext,
    from: &StandardModuleSpec,
    to: &StandardModuleSpec,
) -> Result<DMatrix<C64>, BraidError> {
    let ctx = pc.ctx();
    let n = ctx.n as usize;
    if spec_close(from, to) {
        return Ok(DMatrix::<C64>::identity(n, n));
    }
    if let Ok(j) = standard_intertwiner(pc, from, to) {
        return Ok(j);
    }
    let gens = build_generators(&pc.alg, &pc.d1);
    let (wf, pf, _) = standard_to_weight(&gens, from)?;
    let (wt, pt, _) = standard_to_weight(&gens, to)?;
    let rf = build_rep(ctx, &wf)?;
    let rt = build_rep(ctx, &wt)?;
    let dev = (&rf.e - &rt.e).norm()
        + (&rf.f - &rt.f).norm()
        + (&rf.khalf - &rt.khalf).norm()
        + (&rf.lhalf - &rt.lhalf).norm();
    if dev > 1e-6 {
        return Err(BraidError::CharacterMismatch(format!(
            "strand modules restrict to different weight modules (dev {dev:.3e})"
        )));
    }
    let pf_inv = pf.try_inverse().ok_or_else(|| {
        BraidError::CharacterMismatch("weight-basis change not invertible".into())
    })?;
    Ok(pt * pf_inv)
}

/// Close an evaluated braid: realign the final colors onto the initial ones
/// and take the trace against the pivot on every strand. The result carries
/// an N²-th root-of-unity phase ambiguity.
pub fn pivotal_closure(
    pc: &PairContext,
    op: &DMatrix<C64>,
    initial: &[StandardModuleSpec],
    fin: &[StandardModuleSpec],
) -> Result<C64, BraidError> {
    assert_eq!(initial.len(), fin.len());
    let mut align = DMatrix::<C64>::identity(1, 1);
    for (f, i) in fin.iter().zip(initial.iter()) {
        let j = alignment_map(pc, f, i)?;
        align = kron(&align, &j);
    }
    let piv = PivotalData::for_standard(pc, initial)?;
    let mut pivall = DMatrix::<C64>::identity(1, 1);
    for p in &piv.pivots {
        pivall = kron(&pivall, p);
    }
    Ok((pivall * align * op).trace())
}

/// Closure scalars of the two braiding routes and the brute-force check
/// value for a scalar-colored braid word.
#[derive(Debug, Clone)]
pub struct SmokeReport {
    pub kashaev: C64,
    pub drinfeld: C64,
    pub oracle_abs: f64,
    /// | |kashaev| − |drinfeld| |.
    pub abs_dev_routes: f64,
    /// | |drinfeld| − oracle |.
    pub abs_dev_oracle: f64,
    /// |(kashaev/drinfeld)^{N²} − 1| (phase agreement up to μ_{N²}).
    pub phase_defect: f64,
}

/// The scalar weight module V(A⁻¹, A, 0, 0) with its weight logarithms.
pub fn scalar_color(ctx: &RootContext) -> (WeightModuleSpec, C64, C64) {
    let a = ctx.qhalf();
    (
        WeightModuleSpec::Cyclic {
            lambda: cone() / a,
            mu: a,
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        },
        C64::new(-1.0, 0.0),
        C64::new(1.0, 0.0),
    )
}

/// Drinfel'd-route closure of a braid word with every strand colored by the
/// scalar module: composes the det-normalized series R-matrix and traces
/// against the pivot.
pub fn drinfeld_closure(ctx: &RootContext, word: &BraidWord) -> Result<C64, BraidError> {
    let (spec, h, g) = scalar_color(ctx);
    let rd_raw = drinfeld_r(ctx, &spec, &spec, h, g)?;
    let (rd, _) = det_normalize(ctx, rd_raw)?;
    let rd_inv = rd.clone().try_inverse().ok_or_else(|| {
        BraidError::NotTriangulableAtStep(0, "singular series R-matrix".into())
    })?;
    let n = ctx.n as usize;
    let dim = n.pow(word.strands as u32);
    let mut op = DMatrix::<C64>::identity(dim, dim);
    for &(pos, sign) in &word.letters {
        let m = if sign > 0 { &rd } else { &rd_inv };
        let left = DMatrix::<C64>::identity(n.pow((pos - 1) as u32), n.pow((pos - 1) as u32));
        let rdim = n.pow((word.strands - pos - 1) as u32);
        let right = DMatrix::<C64>::identity(rdim, rdim);
        op = kron(&left, &kron(m, &right)) * op;
    }
    let r = build_rep(ctx, &spec)?;
    let kl = &r.khalf * r.lhalf_inv();
    let pivot = mat_pow(&kl, ctx.n as i64 - 1);
    let mut pivall = DMatrix::<C64>::identity(1, 1);
    for _ in 0..word.strands {
        pivall = kron(&pivall, &pivot);
    }
    Ok((pivall * op).trace())
}

/// Kashaev-route closure on scalar colorings: lifts every strand to a
/// standard module with a distinct shift amplitude (the amplitude is a free
/// parameter of scalar lifts) so that every crossing is admissible.
pub fn kashaev_scalar_closure(pc: &PairContext, word: &BraidWord) -> Result<C64, BraidError> {
    let ctx = pc.ctx();
    let (spec, _, _) = scalar_color(ctx);
    let base = weight_to_standard(ctx, &spec)?;
    let amps = [
        cone(),
        C64::new(0.37, 0.21),
        C64::new(2.3, -0.7),
        C64::new(-0.45, 1.2),
        C64::new(0.9, 0.8),
        C64::new(-1.6, -0.3),
    ];
    if word.strands > amps.len() {
        return Err(BraidError::CharacterMismatch(
            "more strands than prepared amplitudes".into(),
        ));
    }
    let colors: Vec<StandardModuleSpec> = (0..word.strands)
        .map(|i| {
            let mut s = base.clone();
            s.x1 *= amps[i];
            s
        })
        .collect();
    let cb = ColoredBraid::new(word.clone(), colors.clone()).map_err(BraidError::CharacterMismatch)?;
    let (op, fin) = evaluate_braid(pc, &cb)?;
    pivotal_closure(pc, &op, &colors, &fin)
}

/// Compare the three routes on a scalar-colored braid word.
pub fn jones_smoke(pc: &PairContext, word: &BraidWord) -> Result<SmokeReport, BraidError> {
    let ctx = pc.ctx();
    let kashaev = kashaev_scalar_closure(pc, word)?;
    let drinfeld = drinfeld_closure(ctx, word)?;
    let oracle_abs = contraction_oracle::closure_abs(ctx, word.strands, &word.letters);
    let abs_dev_routes = (kashaev.norm() - drinfeld.norm()).abs();
    let abs_dev_oracle = (drinfeld.norm() - oracle_abs).abs();
    let phase_defect = if drinfeld.norm() < 1e-12 || kashaev.norm() < 1e-12 {
        0.0
    } else {
        let ratio = kashaev / drinfeld;
        let unit = ratio / ratio.norm();
        (unit.powu(ctx.n * ctx.n) - cone()).norm()
    };
    Ok(SmokeReport {
        kashaev,
        drinfeld,
        oracle_abs,
        abs_dev_routes,
        abs_dev_oracle,
        phase_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::sample_standard;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(n: u32) -> PairContext {
        PairContext::new(RootContext::new(n, 1).unwrap()).unwrap()
    }

    #[test]
    fn empty_word_is_identity() {
        let pc = pair(3);
        let ctx = pc.ctx().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let colors = vec![
            sample_standard(&ctx, &mut rng),
            sample_standard(&ctx, &mut rng),
        ];
        let cb = ColoredBraid::new(BraidWord::new(2, vec![]).unwrap(), colors.clone()).unwrap();
        let (op, fin) = evaluate_braid(&pc, &cb).unwrap();
        assert!((op - DMatrix::<C64>::identity(9, 9)).norm() < 1e-14);
        assert!(spec_close(&fin[0], &colors[0]) && spec_close(&fin[1], &colors[1]));
    }

    #[test]
    fn far_commutation_is_exact() {
        // σ₁ and σ₃ act on disjoint slots: the step operators commute
        // exactly as matrices.
        let pc = pair(3);
        let ctx = pc.ctx().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let colors: Vec<_> = (0..4).map(|_| sample_standard(&ctx, &mut rng)).collect();
        let w12 = BraidWord::new(4, vec![(1, 1), (3, 1)]).unwrap();
        let w21 = BraidWord::new(4, vec![(3, 1), (1, 1)]).unwrap();
        let (op_a, fin_a) =
            evaluate_braid(&pc, &ColoredBraid::new(w12, colors.clone()).unwrap()).unwrap();
        let (op_b, fin_b) =
            evaluate_braid(&pc, &ColoredBraid::new(w21, colors.clone()).unwrap()).unwrap();
        assert!((op_a - op_b).norm() < 1e-9);
        for (a, b) in fin_a.iter().zip(fin_b.iter()) {
            assert!(spec_close(a, b));
        }
    }

    #[test]
    fn inverse_cancels_on_scalar_lifts() {
        let pc = pair(3);
        let word = BraidWord::new(2, vec![(1, 1), (1, -1)]).unwrap();
        let plain = kashaev_scalar_closure(&pc, &BraidWord::new(2, vec![]).unwrap()).unwrap();
        let cancel = kashaev_scalar_closure(&pc, &word).unwrap();
        assert!(
            (plain - cancel).norm() < 1e-8 * (1.0 + plain.norm()),
            "σσ⁻¹ closure {cancel} vs identity closure {plain}"
        );
    }

    #[test]
    fn braid_relation_up_to_phase() {
        // σ₁σ₂σ₁ and σ₂σ₁σ₂ on scalar lifts: same final colors, operators
        // equal up to an N²-th root of unity.
        let pc = pair(3);
        let ctx = pc.ctx().clone();
        let (spec, _, _) = scalar_color(&ctx);
        let base = weight_to_standard(&ctx, &spec).unwrap();
        let amps = [cone(), C64::new(0.37, 0.21), C64::new(2.3, -0.7)];
        let colors: Vec<_> = amps
            .iter()
            .map(|&a| {
                let mut s = base.clone();
                s.x1 *= a;
                s
            })
            .collect();
        let wa = BraidWord::new(3, vec![(1, 1), (2, 1), (1, 1)]).unwrap();
        let wb = BraidWord::new(3, vec![(2, 1), (1, 1), (2, 1)]).unwrap();
        let (op_a, fin_a) =
            evaluate_braid(&pc, &ColoredBraid::new(wa, colors.clone()).unwrap()).unwrap();
        let (op_b, fin_b) =
            evaluate_braid(&pc, &ColoredBraid::new(wb, colors.clone()).unwrap()).unwrap();
        for (a, b) in fin_a.iter().zip(fin_b.iter()) {
            assert!(spec_close(a, b), "final colors differ");
        }
        let (zeta, resid) = crate::braiding::proportionality(&op_a, &op_b).unwrap();
        assert!(resid < 1e-8, "braid relation residual {resid}");
        let defect = (zeta.powu(9) - cone()).norm();
        assert!(defect < 1e-6, "phase defect {defect}");
    }

    #[test]
    fn unknot_closure_is_pivot_trace() {
        let pc = pair(3);
        let ctx = pc.ctx().clone();
        let report = jones_smoke(&pc, &BraidWord::new(1, vec![]).unwrap()).unwrap();
        let (spec, _, _) = scalar_color(&ctx);
        let r = build_rep(&ctx, &spec).unwrap();
        let kl = &r.khalf * r.lhalf_inv();
        let tr = mat_pow(&kl, 2).trace();
        assert!((report.drinfeld - tr).norm() < 1e-10);
        assert!(report.abs_dev_routes < 1e-8);
        assert!(report.abs_dev_oracle < 1e-8);
    }

    #[test]
    fn smoke_trefoil_and_figure_eight() {
        let pc = pair(3);
        for word in [BraidWord::trefoil(), BraidWord::figure_eight()] {
            let report = jones_smoke(&pc, &word).unwrap();
            assert!(
                report.abs_dev_routes < 1e-6,
                "route |·| deviation {} for {:?}",
                report.abs_dev_routes,
                word
            );
            assert!(
                report.abs_dev_oracle < 1e-6,
                "oracle |·| deviation {} for {:?}",
                report.abs_dev_oracle,
                word
            );
            assert!(
                report.phase_defect < 1e-6,
                "phase defect {} for {:?}",
                report.phase_defect,
                word
            );
        }
    }
}
