//! The Heisenberg group H = W × F_q, extended characters of A_H = A × F_q for
//! a lagrangian A, and the induced models V_A = ind_{A_H}^H ψ_A.
//!
//! A model vector is stored through its values at the points (r, 0), r running
//! over the isotropic complement R of A; every h ∈ H factors uniquely as
//! (a, s)·(r, 0), so f(h) = ψ_A(a, s) f((r, 0)). H acts by right translation,
//! (ρ(h)f)(x) = f(x h), hence ρ(h) is monomial with entries powers of ζ.

use std::sync::Arc;

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cyclotomic::{CycNum, CycloRing};
use crate::error::{Error, Result};
use crate::exactalg::{Echelon, Field, Ring, RingMatrix};
use crate::finsymp::{FqElem, Lagrangian, SympMap, SympSpace};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisElem {
    pub v: Vec<FqElem>,
    pub t: FqElem,
}

impl HeisElem {
    pub fn new(v: Vec<FqElem>, t: FqElem) -> Self {
        HeisElem { v, t }
    }

    pub fn identity(space: &SympSpace) -> Self {
        HeisElem::new(space.zero_vec(), FqElem(0))
    }

    pub fn central(space: &SympSpace, t: FqElem) -> Self {
        HeisElem::new(space.zero_vec(), t)
    }

    /// (v, 0).
    pub fn lift(v: Vec<FqElem>) -> Self {
        HeisElem::new(v, FqElem(0))
    }
}

/// (w, t)·(w′, t′) = (w + w′, t + t′ + ½⟨w, w′⟩).
pub fn h_mul(space: &SympSpace, a: &HeisElem, b: &HeisElem) -> HeisElem {
    let fq = space.fq();
    let t = fq.add(
        fq.add(a.t, b.t),
        fq.mul(fq.half(), space.form(&a.v, &b.v)),
    );
    HeisElem::new(fq.vadd(&a.v, &b.v), t)
}

pub fn h_inv(space: &SympSpace, a: &HeisElem) -> HeisElem {
    let fq = space.fq();
    HeisElem::new(fq.vneg(&a.v), fq.neg(a.t))
}

/// g·(w, t) = (gw, t).
pub fn sp_act(g: &SympMap, h: &HeisElem) -> HeisElem {
    HeisElem::new(g.apply(&h.v), h.t)
}

/// ψ_A(a, t) = ψ(t + ⟨c, a⟩) on A_H.
#[derive(Clone, Debug)]
pub struct ExtendedCharacter {
    space: Arc<SympSpace>,
    lagrangian: Lagrangian,
    twist: Vec<FqElem>,
}

impl ExtendedCharacter {
    pub fn new(space: &Arc<SympSpace>, lagrangian: Lagrangian, twist: Vec<FqElem>) -> Result<Self> {
        if twist.len() != space.dim() {
            return Err(Error::DimensionMismatch("twist must lie in W".into()));
        }
        Ok(ExtendedCharacter {
            space: space.clone(),
            lagrangian,
            twist,
        })
    }

    pub fn untwisted(space: &Arc<SympSpace>, lagrangian: Lagrangian) -> Self {
        ExtendedCharacter {
            space: space.clone(),
            lagrangian,
            twist: space.zero_vec(),
        }
    }

    pub fn space(&self) -> &Arc<SympSpace> {
        &self.space
    }

    pub fn lagrangian(&self) -> &Lagrangian {
        &self.lagrangian
    }

    pub fn twist(&self) -> &[FqElem] {
        &self.twist
    }

    pub fn is_twisted(&self) -> bool {
        self.twist.iter().any(|x| x.0 != 0)
    }

    /// Exponent k with ψ_A(h) = ζ^k, for h ∈ A_H.
    pub fn exponent(&self, h: &HeisElem) -> u32 {
        debug_assert!(self.lagrangian.contains(&self.space, &h.v));
        let fq = self.space.fq();
        fq.trace(fq.add(h.t, self.space.form(&self.twist, &h.v)))
    }

    /// The character transported by g: A ↦ gA, c ↦ gc, so ψ_{gA}(g·a) = ψ_A(a).
    pub fn transport(&self, g: &SympMap) -> ExtendedCharacter {
        ExtendedCharacter {
            space: self.space.clone(),
            lagrangian: self.lagrangian.image(g),
            twist: g.apply(&self.twist),
        }
    }
}

/// A monomial matrix: row w has the single entry ζ^{phase[w]} in column col[w].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    p: u32,
    col: Vec<usize>,
    phase: Vec<u32>,
}

impl Monomial {
    pub fn identity(n: usize, p: u32) -> Self {
        Monomial {
            p,
            col: (0..n).collect(),
            phase: vec![0; n],
        }
    }

    pub fn new(p: u32, col: Vec<usize>, phase: Vec<u32>) -> Self {
        assert_eq!(col.len(), phase.len());
        Monomial { p, col, phase }
    }

    pub fn dim(&self) -> usize {
        self.col.len()
    }

    pub fn col(&self) -> &[usize] {
        &self.col
    }

    pub fn phase(&self) -> &[u32] {
        &self.phase
    }

    pub fn compose(&self, other: &Monomial) -> Monomial {
        let col = self.col.iter().map(|&c| other.col[c]).collect();
        let phase = self
            .phase
            .iter()
            .zip(&self.col)
            .map(|(&e, &c)| (e + other.phase[c]) % self.p)
            .collect();
        Monomial {
            p: self.p,
            col,
            phase,
        }
    }

    /// Scalar ζ^k · Id, if it is one.
    pub fn scalar_exponent(&self) -> Option<u32> {
        let e = *self.phase.first()?;
        (self.col.iter().enumerate().all(|(i, &c)| i == c) && self.phase.iter().all(|&x| x == e))
            .then_some(e)
    }

    pub fn to_matrix<R: CycloRing>(&self, ctx: &R::Ctx) -> RingMatrix<R> {
        let zetas: Vec<R> = (0..self.p as i64).map(|k| R::zeta_pow(ctx, k)).collect();
        let mut m = RingMatrix::zeros(self.dim(), self.dim(), ctx.clone());
        for (w, (&c, &e)) in self.col.iter().zip(&self.phase).enumerate() {
            m.set(w, c, zetas[e as usize].clone());
        }
        m
    }

    pub fn apply<R: Ring>(&self, zetas: &[R], v: &[R]) -> Vec<R> {
        self.col
            .iter()
            .zip(&self.phase)
            .map(|(&c, &e)| zetas[e as usize].mul(&v[c]))
            .collect()
    }
}

/// The ring-independent part of a model: character, complement basis and the
/// ordered coset representatives r_w = Σ β_i b_i, indexed by Σ β_i q^{m−1−i}.
#[derive(Debug)]
pub struct ModelBasis {
    character: ExtendedCharacter,
    complement: Vec<Vec<FqElem>>,
    reps: Vec<Vec<FqElem>>,
}

impl ModelBasis {
    pub fn new(character: ExtendedCharacter) -> Arc<Self> {
        let space = character.space.clone();
        let complement = character.lagrangian.complement(&space);
        let fq = space.fq();
        let reps = fq
            .vectors(space.m())
            .map(|beta| fq.combine(&beta, &complement, space.dim()))
            .collect();
        Arc::new(ModelBasis {
            character,
            complement,
            reps,
        })
    }

    pub fn space(&self) -> &Arc<SympSpace> {
        &self.character.space
    }

    pub fn character(&self) -> &ExtendedCharacter {
        &self.character
    }

    pub fn complement(&self) -> &[Vec<FqElem>] {
        &self.complement
    }

    pub fn reps(&self) -> &[Vec<FqElem>] {
        &self.reps
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn p(&self) -> u32 {
        self.space().fq().p()
    }

    /// Writes (v, t) = (a, s)·(r_k, 0) and returns (k, exponent of ψ_A(a, s)).
    pub fn eval(&self, v: &[FqElem], t: FqElem) -> (usize, u32) {
        let space = self.space();
        let fq = space.fq();
        let basis = self.character.lagrangian.basis();
        let beta: Vec<FqElem> = basis.iter().map(|a| space.form(a, v)).collect();
        let r = fq.combine(&beta, &self.complement, space.dim());
        let a = fq.vsub(v, &r);
        let s = fq.sub(t, fq.mul(fq.half(), space.form(&a, &r)));
        let e = fq.trace(fq.add(s, space.form(&self.character.twist, &a)));
        (fq.vector_index(&beta), e)
    }

    pub fn eval_h(&self, h: &HeisElem) -> (usize, u32) {
        self.eval(&h.v, h.t)
    }

    pub fn act(&self, h: &HeisElem) -> Monomial {
        let space = self.space();
        let (col, phase) = self
            .reps
            .iter()
            .map(|r| self.eval_h(&h_mul(space, &HeisElem::lift(r.clone()), h)))
            .unzip();
        Monomial::new(self.p(), col, phase)
    }

    /// Generators of H: (t^k v, 0) for v in the standard basis of W and
    /// (0, t^k), t^k running over the F_p-basis of F_q.
    pub fn generators(&self) -> Vec<HeisElem> {
        heisenberg_generators(self.space())
    }
}

pub fn heisenberg_generators(space: &SympSpace) -> Vec<HeisElem> {
    let fq = space.fq();
    let mut gens = Vec::new();
    for k in 0..fq.f() {
        let lam = fq.basis_elem(k);
        for i in 0..space.dim() {
            let mut v = space.zero_vec();
            v[i] = lam;
            gens.push(HeisElem::lift(v));
        }
    }
    for k in 0..fq.f() {
        gens.push(HeisElem::central(space, fq.basis_elem(k)));
    }
    gens
}

/// V_A^B for a coefficient ring B receiving 𝒜.
#[derive(Debug)]
pub struct InducedModel<R: CycloRing> {
    basis: Arc<ModelBasis>,
    ctx: R::Ctx,
}

impl<R: CycloRing> Clone for InducedModel<R> {
    fn clone(&self) -> Self {
        InducedModel {
            basis: self.basis.clone(),
            ctx: self.ctx.clone(),
        }
    }
}

impl<R: CycloRing> InducedModel<R> {
    pub fn new(basis: Arc<ModelBasis>, ctx: R::Ctx) -> Result<Self> {
        if R::prime(&ctx) != basis.p() {
            return Err(Error::RingMismatch);
        }
        Ok(InducedModel { basis, ctx })
    }

    pub fn build(character: ExtendedCharacter, ctx: R::Ctx) -> Result<Self> {
        Self::new(ModelBasis::new(character), ctx)
    }

    pub fn basis(&self) -> &Arc<ModelBasis> {
        &self.basis
    }

    pub fn ctx(&self) -> &R::Ctx {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn zetas(&self) -> Vec<R> {
        (0..self.basis.p() as i64).map(|k| R::zeta_pow(&self.ctx, k)).collect()
    }

    pub fn act(&self, h: &HeisElem) -> RingMatrix<R> {
        self.basis.act(h).to_matrix(&self.ctx)
    }

    /// χ_k.
    pub fn basis_vector(&self, k: usize) -> Vec<R> {
        (0..self.dim())
            .map(|i| {
                if i == k {
                    R::one(&self.ctx)
                } else {
                    R::zero(&self.ctx)
                }
            })
            .collect()
    }
}

/// A finitely supported B[H] element Σ c_h [h] with coefficients in 𝒜.
#[derive(Clone, Debug)]
pub struct GroupAlgebraElem {
    pub terms: Vec<(HeisElem, CycNum)>,
}

impl GroupAlgebraElem {
    /// Σ c_h ρ(h) f.
    pub fn apply<R: CycloRing>(&self, model: &InducedModel<R>, f: &[R]) -> Vec<R> {
        let zetas = model.zetas();
        let mut out = vec![R::zero(model.ctx()); model.dim()];
        for (h, c) in &self.terms {
            let c = R::embed(model.ctx(), c);
            let moved = model.basis().act(h).apply(&zetas, f);
            for (o, x) in out.iter_mut().zip(moved) {
                *o = o.add(&c.mul(&x));
            }
        }
        out
    }
}

/// φ_w = Σ_{a ∈ A} ψ_A((−a, 0)) ψ(⟨−w, a⟩) |A|^{−1} [(a, 0)], so that
/// φ_w·f = f((w, 0)) χ_w.
pub fn projector_phi(basis: &ModelBasis, w: usize) -> GroupAlgebraElem {
    let space = basis.space();
    let fq = space.fq();
    let p = fq.p();
    let lag = basis.character().lagrangian();
    let rw = &basis.reps()[w];
    let vol = CycNum::p_power(p, (fq.f() as usize * space.m()) as i64);
    let terms = lag
        .elements(space)
        .into_iter()
        .map(|a| {
            let neg = HeisElem::lift(fq.vneg(&a));
            let e1 = basis.character().exponent(&neg);
            let e2 = fq.trace(fq.neg(space.form(rw, &a)));
            let coeff = CycNum::zeta_pow(p, e1 as i64 + e2 as i64).mul(&vol);
            (HeisElem::lift(a), coeff)
        })
        .collect();
    GroupAlgebraElem { terms }
}

/// Basis of Hom_H(V1, V2), as dim2 × dim1 matrices M with M ρ1(h) = ρ2(h) M.
pub fn intertwining_space<R: Field + CycloRing>(
    m1: &InducedModel<R>,
    m2: &InducedModel<R>,
) -> Result<Vec<RingMatrix<R>>> {
    if !Arc::ptr_eq(m1.basis().space(), m2.basis().space())
        && (m1.basis().space().m() != m2.basis().space().m()
            || **m1.basis().space().fq() != **m2.basis().space().fq())
    {
        return Err(Error::InvalidConfig("models over different symplectic spaces".into()));
    }
    if m1.ctx() != m2.ctx() {
        return Err(Error::RingMismatch);
    }
    let ctx = m1.ctx();
    let (n1, n2) = (m1.dim(), m2.dim());
    let zetas = m1.zetas();
    let zero = R::zero(ctx);
    let mut ech = Echelon::new(n1 * n2);
    // Unknown M[i][j] sits at i·n1 + j.
    for h in m1.basis().generators() {
        let p1 = m1.basis().act(&h);
        let p2 = m2.basis().act(&h);
        for i in 0..n2 {
            for (j, (&k, &e1)) in p1.col().iter().zip(p1.phase()).enumerate() {
                // (M ρ1)[i][k] = M[i][j] ζ^{e1}; (ρ2 M)[i][k] = ζ^{e2} M[col2(i)][k].
                let mut row = vec![zero.clone(); n1 * n2];
                let x = i * n1 + j;
                let y = p2.col()[i] * n1 + k;
                row[x] = row[x].add(&zetas[e1 as usize]);
                row[y] = row[y].sub(&zetas[p2.phase()[i] as usize]);
                ech.insert(&row);
            }
        }
    }
    ech.kernel(ctx)
        .into_iter()
        .map(|v| RingMatrix::new(n2, n1, ctx.clone(), v))
        .collect()
}

pub fn hom_space_rank<R: Field + CycloRing>(m1: &InducedModel<R>, m2: &InducedModel<R>) -> Result<usize> {
    Ok(intertwining_space(m1, m2)?.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationWitness {
    pub label: String,
    pub span_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibilityCertificate {
    pub irreducible: bool,
    pub end_dim: usize,
    pub dim: usize,
    pub witnesses: Vec<GenerationWitness>,
}

/// Dimension of the H-submodule generated by v.
pub fn generated_dim<R: Field + CycloRing>(model: &InducedModel<R>, v: &[R]) -> usize {
    let n = model.dim();
    let zetas = model.zetas();
    let gens: Vec<Monomial> = model
        .basis()
        .generators()
        .iter()
        .map(|h| model.basis().act(h))
        .collect();
    let mut ech = Echelon::new(n);
    if !ech.insert(v) {
        return 0;
    }
    let mut queue = vec![v.to_vec()];
    while let Some(x) = queue.pop() {
        if ech.dim() == n {
            break;
        }
        for g in &gens {
            let y = g.apply(&zetas, &x);
            if ech.insert(&y) {
                queue.push(y);
            }
        }
    }
    ech.dim()
}

pub const RANDOM_WITNESSES: usize = 5;

/// End dimension 1 and every basis vector plus a few seeded random vectors
/// generating the whole model.
pub fn irreducibility_check<R: Field + CycloRing>(
    model: &InducedModel<R>,
    seed: u64,
) -> Result<IrreducibilityCertificate> {
    let end_dim = hom_space_rank(model, model)?;
    let n = model.dim();
    let p = model.basis().p();
    let mut witnesses: Vec<GenerationWitness> = (0..n)
        .map(|k| GenerationWitness {
            label: format!("chi_{k}"),
            span_dim: generated_dim(model, &model.basis_vector(k)),
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut made = 0;
    while made < RANDOM_WITNESSES {
        let v: Vec<R> = (0..n)
            .map(|_| {
                let c = CycNum::from_i64s(p, &[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
                R::embed(model.ctx(), &c)
            })
            .collect();
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        witnesses.push(GenerationWitness {
            label: format!("random_{made}"),
            span_dim: generated_dim(model, &v),
        });
        made += 1;
    }
    let irreducible = end_dim == 1 && witnesses.iter().all(|w| w.span_dim == n);
    Ok(IrreducibilityCertificate {
        irreducible,
        end_dim,
        dim: n,
        witnesses,
    })
}
