//! Weil factors, the projective representation g ↦ M_g, the canonical
//! Bruhat section and its cocycle, and scalar extension of sections.
//!
//! Orientation: every element (g, M) satisfies M ρ(h) M^{−1} = ρ(g·h) with
//! g·(v, t) = (gv, t). With this orientation g ↦ M_g is a homomorphism; the
//! inverse action would make it an anti-homomorphism.

use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cyclotomic::{phi_reduce, psi, CycNum, CycloRing, FieldElem, ResidueField};
use crate::error::{Error, Result};
use crate::exactalg::{Field, RingMatrix};
use crate::finsymp::{
    bruhat_decompose, det_x, extend_basis, random_element, sp_elements, sp_order, span_elements,
    Fq, FqElem, FqMat, Lagrangian, SpMode, SympMap, SympSpace,
};
use crate::heisenberg::{h_mul, sp_act, HeisElem, InducedModel, ModelBasis};
use crate::intertwine::{build_intertwiner, compatible_omega};
use crate::json;

/// Q(x) = ½ ᵗx B x on F_q^n, B symmetric.
#[derive(Clone, Debug)]
pub struct QuadraticForm {
    fq: Arc<Fq>,
    gram: FqMat,
}

impl QuadraticForm {
    pub fn new(fq: &Arc<Fq>, gram: FqMat) -> Result<Self> {
        if gram.rows() != gram.cols() {
            return Err(Error::DimensionMismatch(format!("{}x{} gram matrix", gram.rows(), gram.cols())));
        }
        if gram.transpose() != gram {
            return Err(Error::InvalidConfig("gram matrix is not symmetric".into()));
        }
        Ok(QuadraticForm { fq: fq.clone(), gram })
    }

    /// Σ a_i x_i².
    pub fn diagonal(fq: &Arc<Fq>, a: &[FqElem]) -> Self {
        let mut gram = FqMat::zeros(a.len(), a.len());
        for (i, &ai) in a.iter().enumerate() {
            gram.set(i, i, fq.add(ai, ai));
        }
        QuadraticForm { fq: fq.clone(), gram }
    }

    /// Q_j(x) = ½⟨x, w_j x⟩ on span(e_1, …, e_j) ≅ F_q^j, or ½⟨w_j x, x⟩
    /// when `reversed`.
    pub fn q_j(space: &Arc<SympSpace>, j: usize, reversed: bool) -> Self {
        let fq = space.fq();
        let w = space.w(j);
        let half = fq.half();
        let gram_entry = |i: usize, k: usize| {
            let (ei, ek) = (space.e(i), space.e(k));
            let b = fq.add(space.form(&ei, &w.apply(&ek)), space.form(&ek, &w.apply(&ei)));
            let b = fq.mul(half, b);
            if reversed {
                fq.neg(b)
            } else {
                b
            }
        };
        let rows: Vec<Vec<FqElem>> = (0..j).map(|i| (0..j).map(|k| gram_entry(i, k)).collect()).collect();
        let gram = if j == 0 { FqMat::zeros(0, 0) } else { FqMat::from_rows(&rows) };
        QuadraticForm { fq: fq.clone(), gram }
    }

    pub fn fq(&self) -> &Arc<Fq> {
        &self.fq
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &FqMat {
        &self.gram
    }

    pub fn value(&self, x: &[FqElem]) -> FqElem {
        let bx = self.gram.mul_vec(&self.fq, x);
        self.fq.mul(self.fq.half(), self.fq.dot(x, &bx))
    }

    pub fn neg(&self) -> Self {
        QuadraticForm {
            fq: self.fq.clone(),
            gram: self.gram.scale(&self.fq, self.fq.neg(self.fq.one())),
        }
    }

    pub fn radical(&self) -> Vec<Vec<FqElem>> {
        if self.dim() == 0 {
            return Vec::new();
        }
        self.gram.kernel(&self.fq)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().is_empty()
    }

    /// Representatives of F_q^n / rad(Q), on which Q_nd is evaluated.
    pub fn nondegenerate_reps(&self) -> Vec<Vec<FqElem>> {
        let n = self.dim();
        let std: Vec<Vec<FqElem>> = (0..n)
            .map(|i| {
                let mut v = vec![self.fq.zero(); n];
                v[i] = self.fq.one();
                v
            })
            .collect();
        let comp = extend_basis(&self.fq, &self.radical(), &std);
        span_elements(&self.fq, &comp, n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilFactor {
    pub value: CycNum,
}

impl WeilFactor {
    pub fn is_unit(&self) -> bool {
        self.value.is_unit()
    }
}

/// Ω_μ(ψ∘Q) = μ({0}) Σ_{x ∈ F_q^n/rad} ψ(Q_nd(x)).
pub fn weil_factor(q: &QuadraticForm, measure_unit: &CycNum) -> WeilFactor {
    let p = q.fq.p();
    let mut acc = CycNum::zero(p);
    for x in q.nondegenerate_reps() {
        acc = acc.add(&psi(&q.fq, q.value(&x)));
    }
    WeilFactor {
        value: acc.mul(measure_unit),
    }
}

/// Ω_{a,b} = Ω(ψ∘Q_a)/Ω(ψ∘Q_b) with Q_a(x) = ax².
pub fn omega_ratio(fq: &Arc<Fq>, a: FqElem, b: FqElem) -> Result<CycNum> {
    if a.0 == 0 || b.0 == 0 {
        return Err(Error::InvalidConfig("omega_ratio needs nonzero arguments".into()));
    }
    let one = CycNum::one(fq.p());
    let num = weil_factor(&QuadraticForm::diagonal(fq, &[a]), &one).value;
    let den = weil_factor(&QuadraticForm::diagonal(fq, &[b]), &one).value;
    Ok(num.mul(&den.inverse()?))
}

/// Which Gauss-sum normalization the section uses. `ReversedGauss` takes
/// Q_j(x) = ½⟨w_j x, x⟩ and is kept as a negative control: it breaks the
/// homomorphism property whenever −1 is not a square in F_q.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SectionVariant {
    #[default]
    Canonical,
    ReversedGauss,
}

/// A pair (g, M) of the fiber product Sp(W) ×_{PGL(V)} GL(V).
#[derive(Clone, Debug)]
pub struct MetaplecticElem<R: CycloRing> {
    pub g: SympMap,
    pub matrix: RingMatrix<R>,
}

impl<R: CycloRing> MetaplecticElem<R> {
    /// M ρ(h) = ρ(g·h) M on the generators of H.
    pub fn is_covariant(&self, basis: &ModelBasis) -> bool {
        let ctx = self.matrix.ctx();
        basis.generators().iter().all(|h| {
            let lhs = self.matrix.mul(&basis.act(h).to_matrix(ctx));
            let rhs = basis.act(&sp_act(&self.g, h)).to_matrix(ctx).mul(&self.matrix);
            lhs.is_ok() && lhs == rhs
        })
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(MetaplecticElem {
            g: self.g.compose(&other.g),
            matrix: self.matrix.mul(&other.matrix)?,
        })
    }
}

impl<R: CycloRing + json::JsonEntry> MetaplecticElem<R> {
    pub fn to_json(&self) -> Value {
        json!({"g": json::symp_map(&self.g), "matrix": json::matrix(&self.matrix)})
    }
}

/// M = I_{gA,A,1,ω} ∘ I_g: transport f ↦ f∘g^{−1} into the gA-model, then
/// return with the counting-measure intertwiner.
pub fn sigma_projective<R: CycloRing>(model: &InducedModel<R>, g: &SympMap) -> Result<MetaplecticElem<R>> {
    let ctx = model.ctx();
    let ch = model.basis().character();
    let moved = ch.transport(g);
    let gmodel = InducedModel::<R>::build(moved.clone(), ctx.clone())?;
    let n = model.dim();
    let mut transport = RingMatrix::zeros(n, n, ctx.clone());
    for (k, r) in model.basis().reps().iter().enumerate() {
        let (idx, e) = gmodel.basis().eval(&g.apply(r), model.basis().space().fq().zero());
        transport.set(idx, k, R::zeta_pow(ctx, -(e as i64)));
    }
    let back = build_intertwiner(
        &gmodel,
        model,
        &CycNum::one(R::prime(ctx)),
        &compatible_omega(&moved, ch),
    )?;
    Ok(MetaplecticElem {
        g: g.clone(),
        matrix: back.matrix.mul(&transport)?,
    })
}

/// λ with a = λ b, or `NonScalar`; b must have a unit entry.
pub fn scalar_ratio<R: CycloRing>(a: &RingMatrix<R>, b: &RingMatrix<R>) -> Result<R> {
    let pos = b
        .entries()
        .iter()
        .position(|x| !x.is_zero())
        .ok_or_else(|| Error::NonScalar("zero matrix".into()))?;
    let inv = b.entries()[pos]
        .unit_inverse()
        .ok_or_else(|| Error::NonScalar("reference entry is not a unit".into()))?;
    let lam = a.entries()[pos].mul(&inv);
    if *a == b.scale(&lam) {
        Ok(lam)
    } else {
        Err(Error::NonScalar(format!("entry {pos} fixes the ratio but the matrices are not proportional")))
    }
}

/// σ(g1)σ(g2)σ(g1g2)^{−1}, asserting it is scalar.
pub fn projective_defect<R: CycloRing>(
    s1: &MetaplecticElem<R>,
    s2: &MetaplecticElem<R>,
    s12: &MetaplecticElem<R>,
) -> Result<R> {
    scalar_ratio(&s1.matrix.mul(&s2.matrix)?, &s12.matrix)
}

/// The canonical section in phase form: scalar · ζ^{phases[w][k]}, absent
/// entries zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSection {
    pub g: SympMap,
    pub j: usize,
    pub det_class: FqElem,
    pub scalar: CycNum,
    pub scalar_inv: CycNum,
    pub phases: PhaseGrid,
}

fn require_reference(basis: &ModelBasis) -> Result<()> {
    let ch = basis.character();
    if ch.is_twisted() {
        return Err(Error::TwistedModel);
    }
    let space = ch.space();
    let x = Lagrangian::standard_x(space);
    if !x.basis().iter().all(|v| ch.lagrangian().contains(space, v)) {
        return Err(Error::NotLagrangian("the section is normalized on the standard X-model".into()));
    }
    Ok(())
}

/// Bruhat data and phases of Σ_{a ∈ X/(gX∩X)} f(g^{−1}·((a,0)(r_w,0))).
type PhaseGrid = Vec<Vec<Option<u32>>>;

fn section_phases(basis: &ModelBasis, g: &SympMap) -> Result<(usize, FqElem, PhaseGrid)> {
    require_reference(basis)?;
    let space = basis.space();
    let fq = space.fq();
    let bf = bruhat_decompose(g)?;
    let det = fq.mul(det_x(&bf.p1)?, det_x(&bf.p2)?);
    let x = Lagrangian::standard_x(space);
    let inter = x.image(g).intersection(space, &x);
    let comp = extend_basis(fq, &inter, x.basis());
    let arep = span_elements(fq, &comp, space.dim());
    let ginv = g.inverse();
    let n = basis.dim();
    let mut phases = vec![vec![None; n]; n];
    for (w, r) in basis.reps().iter().enumerate() {
        let rw = HeisElem::lift(r.clone());
        for a in &arep {
            let pt = h_mul(space, &HeisElem::lift(a.clone()), &rw);
            let (k, e) = basis.eval_h(&sp_act(&ginv, &pt));
            if phases[w][k].is_some() {
                return Err(Error::NonScalar(format!("section entry ({w},{k}) hit twice")));
            }
            phases[w][k] = Some(e);
        }
    }
    Ok((bf.j, det, phases))
}

/// Ω(ψ∘Q_j)^{−1} for each j and Ω_{1,d} for each d ≠ 0, computed once per space.
#[derive(Clone, Debug)]
pub struct SectionNormalizer {
    space: Arc<SympSpace>,
    variant: SectionVariant,
    gauss_inv: Vec<CycNum>,
    ratio: HashMap<FqElem, CycNum>,
}

impl SectionNormalizer {
    pub fn new(space: &Arc<SympSpace>, variant: SectionVariant) -> Result<Self> {
        let fq = space.fq();
        let one = CycNum::one(fq.p());
        let reversed = variant == SectionVariant::ReversedGauss;
        let gauss_inv = (0..=space.m())
            .map(|j| weil_factor(&QuadraticForm::q_j(space, j, reversed), &one).value.inverse())
            .collect::<Result<Vec<_>>>()?;
        let ratio = fq
            .elements()
            .filter(|d| d.0 != 0)
            .map(|d| Ok((d, omega_ratio(fq, fq.one(), d)?)))
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(SectionNormalizer {
            space: space.clone(),
            variant,
            gauss_inv,
            ratio,
        })
    }

    pub fn variant(&self) -> SectionVariant {
        self.variant
    }

    /// Ω_{1,det_X(p1p2)} · Ω(ψ∘Q_j)^{−1}.
    pub fn scalar(&self, j: usize, det: FqElem) -> CycNum {
        self.ratio[&det].mul(&self.gauss_inv[j])
    }

    pub fn phase_section(&self, basis: &ModelBasis, g: &SympMap) -> Result<PhaseSection> {
        let other = basis.space();
        if other.m() != self.space.m() || **other.fq() != **self.space.fq() {
            return Err(Error::DimensionMismatch("normalizer built for another space".into()));
        }
        let (j, det, phases) = section_phases(basis, g)?;
        let scalar = self.scalar(j, det);
        let scalar_inv = scalar.inverse()?;
        Ok(PhaseSection {
            g: g.clone(),
            j,
            det_class: det,
            scalar,
            scalar_inv,
            phases,
        })
    }
}

impl PhaseSection {
    pub fn to_matrix<R: CycloRing>(&self, ctx: &R::Ctx) -> RingMatrix<R> {
        let s = R::embed(ctx, &self.scalar);
        let n = self.phases.len();
        RingMatrix::from_fn(n, n, ctx.clone(), |w, k| match self.phases[w][k] {
            Some(e) => s.mul(&R::zeta_pow(ctx, e as i64)),
            None => R::zero(ctx),
        })
    }

    pub fn to_elem<R: CycloRing>(&self, ctx: &R::Ctx) -> MetaplecticElem<R> {
        MetaplecticElem {
            g: self.g.clone(),
            matrix: self.to_matrix(ctx),
        }
    }
}

/// σ^B(g) = φ_B(σ^𝒜(g)) on the untwisted X-model.
pub fn section_sigma<R: CycloRing>(
    model: &InducedModel<R>,
    g: &SympMap,
    variant: SectionVariant,
) -> Result<MetaplecticElem<R>> {
    let norm = SectionNormalizer::new(model.basis().space(), variant)?;
    Ok(norm.phase_section(model.basis(), g)?.to_elem(model.ctx()))
}

/// The section computed inside B itself: Gauss sums are summed and inverted
/// in B, with no passage through 𝒜.
pub fn native_section<R: Field + CycloRing>(
    model: &InducedModel<R>,
    g: &SympMap,
    variant: SectionVariant,
) -> Result<MetaplecticElem<R>> {
    let ctx = model.ctx();
    let space = model.basis().space();
    let fq = space.fq();
    let gauss = |c: FqElem| -> R {
        fq.elements().fold(R::zero(ctx), |acc, x| {
            let v = fq.mul(c, fq.mul(x, x));
            acc.add(&R::zeta_pow(ctx, fq.trace(v) as i64))
        })
    };
    let (j, det, phases) = section_phases(model.basis(), g)?;
    let c = match variant {
        SectionVariant::Canonical => fq.neg(fq.half()),
        SectionVariant::ReversedGauss => fq.half(),
    };
    let gj = (0..j).fold(R::one(ctx), |acc, _| acc.mul(&gauss(c)));
    let ratio = gauss(fq.one()).mul(&gauss(det).inv().ok_or(Error::Singular)?);
    let scalar = ratio.mul(&gj.inv().ok_or(Error::Singular)?);
    let n = phases.len();
    let matrix = RingMatrix::from_fn(n, n, ctx.clone(), |w, k| match phases[w][k] {
        Some(e) => scalar.mul(&R::zeta_pow(ctx, e as i64)),
        None => R::zero(ctx),
    });
    Ok(MetaplecticElem { g: g.clone(), matrix })
}

/// σ(g1)σ(g2)σ(g1g2)^{−1} for the canonical section over B.
pub fn cocycle<R: CycloRing>(
    model: &InducedModel<R>,
    g1: &SympMap,
    g2: &SympMap,
    variant: SectionVariant,
) -> Result<R> {
    let s1 = section_sigma(model, g1, variant)?;
    let s2 = section_sigma(model, g2, variant)?;
    let s12 = section_sigma(model, &g1.compose(g2), variant)?;
    projective_defect(&s1, &s2, &s12)
}

/// The cocycle from phase data alone: entries of σ(g1)σ(g2) are accumulated
/// as multiplicity vectors in ℤ[C_p] and compared with the phases of σ(g1g2).
pub fn phase_cocycle(a: &PhaseSection, b: &PhaseSection, c: &PhaseSection) -> Result<CycNum> {
    let p = a.scalar.p() as usize;
    let n = a.phases.len();
    let mut kappa: Option<Vec<i64>> = None;
    let mut counts = vec![0i64; p];
    for i in 0..n {
        for k in 0..n {
            counts.iter_mut().for_each(|x| *x = 0);
            for j in 0..n {
                if let (Some(x), Some(y)) = (a.phases[i][j], b.phases[j][k]) {
                    counts[(x + y) as usize % p] += 1;
                }
            }
            match c.phases[i][k] {
                Some(e) => {
                    let e = e as usize;
                    let last = counts[(p - 1 + e) % p];
                    let canon: Vec<i64> = (0..p - 1).map(|t| counts[(t + e) % p] - last).collect();
                    match &kappa {
                        None => kappa = Some(canon),
                        Some(kp) if *kp == canon => {}
                        Some(_) => return Err(Error::NonScalar(format!("entry ({i},{k}) disagrees"))),
                    }
                }
                None => {
                    if counts.iter().any(|&x| x != counts[0]) {
                        return Err(Error::NonScalar(format!("entry ({i},{k}) should vanish")));
                    }
                }
            }
        }
    }
    let kappa = kappa.ok_or_else(|| Error::NonScalar("empty section".into()))?;
    let kappa = CycNum::from_i64s(a.scalar.p(), &kappa);
    Ok(a.scalar.mul(&b.scalar).mul(&c.scalar_inv).mul(&kappa))
}

/// (g, φ_B(M)).
pub fn scalar_extend_element(
    elem: &MetaplecticElem<CycNum>,
    field: &Arc<ResidueField>,
) -> Result<MetaplecticElem<FieldElem>> {
    let rows = elem
        .matrix
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| phi_reduce(x, field)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(MetaplecticElem {
        g: elem.g.clone(),
        matrix: RingMatrix::from_rows(field.clone(), rows)?,
    })
}

/// Conjugates X-model representatives into the Y-model through a fixed pair
/// of intertwiners and checks Y-model covariance.
pub fn model_independence<R: CycloRing>(
    x_model: &InducedModel<R>,
    y_model: &InducedModel<R>,
    elems: &[MetaplecticElem<R>],
) -> Result<bool> {
    let p = CycNum::one(R::prime(x_model.ctx()));
    let (cx, cy) = (x_model.basis().character(), y_model.basis().character());
    let fwd = build_intertwiner(x_model, y_model, &p, &compatible_omega(cx, cy))?;
    let back = build_intertwiner(y_model, x_model, &p, &compatible_omega(cy, cx))?;
    for e in elems {
        let conj = MetaplecticElem {
            g: e.g.clone(),
            matrix: fwd.matrix.mul(&e.matrix)?.mul(&back.matrix)?,
        };
        if !conj.is_covariant(y_model.basis()) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub const PAIR_BOUND: u128 = 1_000_000;
pub const MAX_REPORTED_FAILURES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMode {
    Exhaustive,
    Sample { n: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct PairFailure {
    pub g1: SympMap,
    pub g2: SympMap,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub p: u32,
    pub f: u32,
    pub m: usize,
    pub ring: String,
    pub check: String,
    pub pairs_tested: u64,
    pub failure_count: u64,
    pub failures: Vec<PairFailure>,
    pub seed: Option<u64>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "config": {"p": self.p, "f": self.f, "m": self.m, "ring": self.ring},
            "check": self.check,
            "pairs_tested": self.pairs_tested,
            "failure_count": self.failure_count,
            "failures": self.failures.iter().map(|e| json!({
                "g1": json::symp_map(&e.g1),
                "g2": json::symp_map(&e.g2),
                "detail": e.detail,
            })).collect::<Vec<_>>(),
            "seed": self.seed,
        })
    }
}

/// Thread pool sized by WEIL_THREADS, rayon's default otherwise.
pub fn thread_pool() -> rayon::ThreadPool {
    let n = std::env::var("WEIL_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool")
}

fn fold_failures(results: Vec<Option<PairFailure>>) -> (u64, Vec<PairFailure>) {
    let mut count = 0;
    let mut kept = Vec::new();
    for f in results.into_iter().flatten() {
        count += 1;
        if kept.len() < MAX_REPORTED_FAILURES {
            kept.push(f);
        }
    }
    (count, kept)
}

fn judge(g1: &SympMap, g2: &SympMap, c: Result<CycNum>) -> Option<PairFailure> {
    let detail = match c {
        Ok(c) if c.is_one() => return None,
        Ok(c) => format!("cocycle {c}"),
        Err(e) => e.to_string(),
    };
    Some(PairFailure {
        g1: g1.clone(),
        g2: g2.clone(),
        detail,
    })
}

/// Checks σ(g1)σ(g2) = σ(g1g2) on all pairs or on seeded random pairs.
pub fn cocycle_sweep(space: &Arc<SympSpace>, mode: PairMode, variant: SectionVariant) -> Result<SweepReport> {
    let fq = space.fq();
    let basis = ModelBasis::new(crate::heisenberg::ExtendedCharacter::untwisted(
        space,
        Lagrangian::standard_x(space),
    ));
    let norm = SectionNormalizer::new(space, variant)?;
    let pool = thread_pool();
    let (tested, results, seed) = match mode {
        PairMode::Exhaustive => {
            let order = sp_order(fq.q() as u128, space.m() as u32);
            if order * order > PAIR_BOUND {
                return Err(Error::EnumerationTooLarge { order: order * order });
            }
            let elems = sp_elements(space, SpMode::Exhaustive)?;
            let sections = pool.install(|| {
                elems
                    .par_iter()
                    .map(|g| norm.phase_section(&basis, g))
                    .collect::<Result<Vec<_>>>()
            })?;
            let index: HashMap<&SympMap, usize> = elems.iter().enumerate().map(|(i, g)| (g, i)).collect();
            let n = elems.len();
            let results = pool.install(|| {
                (0..n * n)
                    .into_par_iter()
                    .map(|t| {
                        let (a, b) = (&sections[t / n], &sections[t % n]);
                        let c = &sections[index[&a.g.compose(&b.g)]];
                        judge(&a.g, &b.g, phase_cocycle(a, b, c))
                    })
                    .collect::<Vec<_>>()
            });
            ((n * n) as u64, results, None)
        }
        PairMode::Sample { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs: Vec<(SympMap, SympMap)> = (0..n)
                .map(|_| (random_element(space, &mut rng), random_element(space, &mut rng)))
                .collect();
            let results = pool.install(|| {
                pairs
                    .par_iter()
                    .map(|(g1, g2)| {
                        let c = (|| {
                            let a = norm.phase_section(&basis, g1)?;
                            let b = norm.phase_section(&basis, g2)?;
                            let c = norm.phase_section(&basis, &g1.compose(g2))?;
                            phase_cocycle(&a, &b, &c)
                        })();
                        judge(g1, g2, c)
                    })
                    .collect::<Vec<_>>()
            });
            (n as u64, results, Some(seed))
        }
    };
    let (failure_count, failures) = fold_failures(results);
    Ok(SweepReport {
        p: fq.p(),
        f: fq.f(),
        m: space.m(),
        ring: "A".into(),
        check: match variant {
            SectionVariant::Canonical => "cocycle".into(),
            SectionVariant::ReversedGauss => "cocycle-reversed-gauss".into(),
        },
        pairs_tested: tested,
        failure_count,
        failures,
        seed,
    })
}
