//! Model-change operators I_{A1,A2,μ,ω}: V_{A1} → V_{A2},
//!
//!   (I f)(h) = Σ_{a ∈ (A1∩A2)\A2} ψ_{A2}(a)^{−1} f((ω,0)(a,0)h) μ,
//!
//! with μ = measure_unit × counting measure. The sum is well defined exactly
//! when ⟨c1 − c2 + ω, b⟩ = 0 for b ∈ A1 ∩ A2, c_i the twists.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::cyclotomic::{CycNum, CycloRing};
use crate::error::{Error, Result};
use crate::exactalg::{Echelon, Field, RingMatrix};
use crate::finsymp::{extend_basis, span_elements, FqElem};
use crate::heisenberg::{
    h_mul, intertwining_space, ExtendedCharacter, HeisElem, InducedModel, ModelBasis,
};
use crate::json;

/// ω = c2 − c1, which satisfies the compatibility condition for any pair.
pub fn compatible_omega(source: &ExtendedCharacter, target: &ExtendedCharacter) -> Vec<FqElem> {
    source.space().fq().vsub(target.twist(), source.twist())
}

/// Checks ψ_{A1}(b) ψ_{A2}(b)^{−1} = ψ(⟨b, ω⟩) on A1 ∩ A2; the witness is a
/// basis vector of the intersection where it fails.
pub fn check_omega(source: &ExtendedCharacter, target: &ExtendedCharacter, omega: &[FqElem]) -> Result<()> {
    let space = source.space();
    let fq = space.fq();
    let defect = fq.vadd(&fq.vsub(source.twist(), target.twist()), omega);
    for b in source.lagrangian().intersection(space, target.lagrangian()) {
        if space.form(&defect, &b).0 != 0 {
            return Err(Error::IncompatibleOmega {
                witness: b.iter().map(|x| x.0).collect(),
            });
        }
    }
    Ok(())
}

/// Representatives of (A1∩A2)\A2.
pub fn quotient_reps(source: &ExtendedCharacter, target: &ExtendedCharacter) -> Vec<Vec<FqElem>> {
    let space = source.space();
    let inter = source.lagrangian().intersection(space, target.lagrangian());
    let comp = extend_basis(space.fq(), &inter, target.lagrangian().basis());
    span_elements(space.fq(), &comp, space.dim())
}

/// For each target basis index w and source index k, the multiset of phases
/// e with Σ ζ^e the (w, k) entry before the measure is applied.
pub fn phase_counts(source: &ModelBasis, target: &ModelBasis, omega: &[FqElem]) -> Vec<Vec<Vec<u32>>> {
    let space = source.space();
    let fq = space.fq();
    let p = fq.p() as usize;
    let (n1, n2) = (source.dim(), target.dim());
    let mut counts = vec![vec![vec![0u32; p]; n1]; n2];
    let om = HeisElem::lift(omega.to_vec());
    for a in quotient_reps(source.character(), target.character()) {
        let ea = target.character().exponent(&HeisElem::lift(a.clone())) as usize;
        let oa = h_mul(space, &om, &HeisElem::lift(a));
        for (w, r) in target.reps().iter().enumerate() {
            let (k, e) = source.eval_h(&h_mul(space, &oa, &HeisElem::lift(r.clone())));
            counts[w][k][(e as usize + p - ea) % p] += 1;
        }
    }
    counts
}

/// Σ_e n_e ζ^e in R.
pub fn count_value<R: CycloRing>(ctx: &R::Ctx, zetas: &[R], counts: &[u32]) -> R {
    let p = R::prime(ctx);
    let mut acc = R::zero(ctx);
    for (e, &n) in counts.iter().enumerate() {
        if n != 0 {
            let c = R::embed(ctx, &CycNum::from_int(p, n));
            acc = acc.add(&c.mul(&zetas[e]));
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct Intertwiner<R: CycloRing> {
    pub source: Arc<ModelBasis>,
    pub target: Arc<ModelBasis>,
    pub omega: Vec<FqElem>,
    pub measure_unit: CycNum,
    pub matrix: RingMatrix<R>,
}

pub fn build_intertwiner<R: CycloRing>(
    source: &InducedModel<R>,
    target: &InducedModel<R>,
    measure_unit: &CycNum,
    omega: &[FqElem],
) -> Result<Intertwiner<R>> {
    if source.ctx() != target.ctx() {
        return Err(Error::RingMismatch);
    }
    check_omega(source.basis().character(), target.basis().character(), omega)?;
    let ctx = source.ctx();
    let zetas = source.zetas();
    let mu = R::embed(ctx, measure_unit);
    let counts = phase_counts(source.basis(), target.basis(), omega);
    let matrix = RingMatrix::from_fn(target.dim(), source.dim(), ctx.clone(), |w, k| {
        mu.mul(&count_value(ctx, &zetas, &counts[w][k]))
    });
    Ok(Intertwiner {
        source: source.basis().clone(),
        target: target.basis().clone(),
        omega: omega.to_vec(),
        measure_unit: measure_unit.clone(),
        matrix,
    })
}

impl<R: CycloRing> Intertwiner<R> {
    /// I ρ1(h) = ρ2(h) I on the generators of H.
    pub fn is_equivariant(&self) -> bool {
        let ctx = self.matrix.ctx();
        self.source.generators().iter().all(|h| {
            let lhs = self.matrix.mul(&self.source.act(h).to_matrix(ctx));
            let rhs = self.target.act(h).to_matrix(ctx).mul(&self.matrix);
            lhs.is_ok() && lhs == rhs
        })
    }
}

impl<R: CycloRing + json::JsonEntry> Intertwiner<R> {
    pub fn to_json(&self) -> Value {
        let space = self.source.space();
        let fq = space.fq();
        let lag = |b: &ModelBasis| -> Value {
            Value::Array(
                b.character()
                    .lagrangian()
                    .basis()
                    .iter()
                    .map(|v| json::fq_vec(fq, v))
                    .collect(),
            )
        };
        json!({
            "A1": lag(&self.source),
            "A2": lag(&self.target),
            "c1": json::fq_vec(fq, self.source.character().twist()),
            "c2": json::fq_vec(fq, self.target.character().twist()),
            "omega": json::fq_vec(fq, &self.omega),
            "measure_unit": json::cyc(&self.measure_unit),
            "matrix": json::matrix(&self.matrix),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneReport {
    pub rank: usize,
    pub equivariant: bool,
    pub spans: bool,
}

impl RankOneReport {
    pub fn ok(&self) -> bool {
        self.rank == 1 && self.equivariant && self.spans
    }
}

/// Hom_H(V1, V2) has dimension one and the counting-measure intertwiner spans it.
pub fn verify_rank_one<R: Field + CycloRing>(
    source: &InducedModel<R>,
    target: &InducedModel<R>,
) -> Result<RankOneReport> {
    let space = intertwining_space(source, target)?;
    let omega = compatible_omega(source.basis().character(), target.basis().character());
    let p = source.basis().p();
    let built = build_intertwiner(source, target, &CycNum::one(p), &omega)?;
    let flat = built.matrix.entries().to_vec();
    let nonzero = flat.iter().any(|x| !x.is_zero());
    let spans = nonzero && {
        let mut ech = Echelon::new(flat.len());
        for m in &space {
            ech.insert(m.entries());
        }
        ech.contains(&flat) && ech.dim() == 1
    };
    Ok(RankOneReport {
        rank: space.len(),
        equivariant: built.is_equivariant(),
        spans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{phi_reduce, CycFrac, FieldElem, ResidueField};
    use crate::exactalg::rank;
    use crate::finsymp::{Lagrangian, SympSpace};
    use std::collections::HashMap;

    fn space(p: u32, f: u32, m: usize) -> Arc<SympSpace> {
        SympSpace::with_params(p, f, m).unwrap()
    }

    fn chars(s: &Arc<SympSpace>) -> Vec<ExtendedCharacter> {
        let mut twist = s.zero_vec();
        twist[s.m()] = FqElem(1);
        let mut twist2 = s.zero_vec();
        twist2[0] = FqElem(2);
        vec![
            ExtendedCharacter::untwisted(s, Lagrangian::standard_x(s)),
            ExtendedCharacter::untwisted(s, Lagrangian::standard_y(s)),
            ExtendedCharacter::untwisted(s, Lagrangian::oblique(s)),
            ExtendedCharacter::new(s, Lagrangian::standard_x(s), twist).unwrap(),
            ExtendedCharacter::new(s, Lagrangian::standard_y(s), twist2).unwrap(),
        ]
    }

    fn model<R: CycloRing>(ch: &ExtendedCharacter, ctx: R::Ctx) -> InducedModel<R> {
        InducedModel::build(ch.clone(), ctx).unwrap()
    }

    #[test]
    fn omega_examples() {
        let s = space(3, 1, 1);
        let cs = chars(&s);
        assert_eq!(compatible_omega(&cs[0], &cs[1]), s.zero_vec());
        // X with twist c and X with twist c′: ω = c′ − c passes, c − c′ does not.
        let a = &cs[0];
        let b = &cs[3];
        let good = compatible_omega(a, b);
        assert!(check_omega(a, b, &good).is_ok());
        let fq = s.fq();
        let bad = fq.vsub(a.twist(), b.twist());
        assert_eq!(
            check_omega(a, b, &bad),
            Err(Error::IncompatibleOmega { witness: vec![1, 0] })
        );
        // Transverse lagrangians impose no condition.
        assert!(check_omega(&cs[0], &cs[1], &s.f(0)).is_ok());
    }

    #[test]
    fn same_model_is_identity() {
        for (p, f, m) in [(3, 1, 1), (5, 1, 1), (3, 1, 2)] {
            let s = space(p, f, m);
            let ch = &chars(&s)[0];
            let v: InducedModel<CycNum> = model(ch, p);
            let i = build_intertwiner(&v, &v, &CycNum::one(p), &s.zero_vec()).unwrap();
            assert!(i.matrix.is_identity());
        }
    }

    #[test]
    fn equivariance_all_pairs() {
        for (p, f, m) in [(3, 1, 1), (5, 1, 1), (3, 2, 1), (3, 1, 2)] {
            let s = space(p, f, m);
            let cs = chars(&s);
            for a in &cs {
                for b in &cs {
                    let (va, vb): (InducedModel<CycNum>, InducedModel<CycNum>) = (model(a, p), model(b, p));
                    let i = build_intertwiner(&va, &vb, &CycNum::one(p), &compatible_omega(a, b)).unwrap();
                    assert!(i.is_equivariant());
                }
            }
        }
    }

    // Functions tabulated on all of H and the defining sum evaluated point by
    // point.
    #[test]
    fn x_to_y_matches_naive_sum() {
        let p = 3;
        let s = space(p, 1, 1);
        let fq = s.fq();
        let cs = chars(&s);
        let (x, y) = (&cs[0], &cs[1]);
        let vx: InducedModel<CycNum> = model(x, p);
        let vy: InducedModel<CycNum> = model(y, p);
        let i = build_intertwiner(&vx, &vy, &CycNum::one(p), &s.zero_vec()).unwrap();
        for k in 0..3 {
            let mut tab: HashMap<HeisElem, u32> = HashMap::new();
            for a in x.lagrangian().elements(&s) {
                for t in fq.elements() {
                    let ah = HeisElem::new(a.clone(), t);
                    let pt = h_mul(&s, &ah, &HeisElem::lift(vx.basis().reps()[k].clone()));
                    tab.insert(pt, x.exponent(&ah));
                }
            }
            for (w, r) in vy.basis().reps().iter().enumerate() {
                let mut acc = CycNum::zero(p);
                for a in y.lagrangian().elements(&s) {
                    let pt = h_mul(&s, &HeisElem::lift(a.clone()), &HeisElem::lift(r.clone()));
                    if let Some(&e) = tab.get(&pt) {
                        let ea = y.exponent(&HeisElem::lift(a)) as i64;
                        acc = acc.add(&CycNum::zeta_pow(p, e as i64 - ea));
                    }
                }
                assert_eq!(i.matrix.get(w, k), &acc);
            }
        }
        // A Fourier matrix: every entry a single root of unity.
        for w in 0..3 {
            for k in 0..3 {
                let e = i.matrix.get(w, k);
                assert!((0..3).any(|j| *e == CycNum::zeta_pow(p, j)));
            }
        }
    }

    #[test]
    fn round_trip_is_scalar() {
        for (p, f, m) in [(3, 1, 1), (5, 1, 1), (3, 1, 2)] {
            let s = space(p, f, m);
            let cs = chars(&s);
            for (a, b) in [(&cs[0], &cs[1]), (&cs[0], &cs[2]), (&cs[3], &cs[4])] {
                let (va, vb): (InducedModel<CycNum>, InducedModel<CycNum>) = (model(a, p), model(b, p));
                let ab = build_intertwiner(&va, &vb, &CycNum::one(p), &compatible_omega(a, b)).unwrap();
                let ba = build_intertwiner(&vb, &va, &CycNum::one(p), &compatible_omega(b, a)).unwrap();
                let comp = ba.matrix.mul(&ab.matrix).unwrap();
                let lam = comp.get(0, 0).clone();
                assert!(!lam.is_zero());
                assert_eq!(comp, RingMatrix::identity(va.dim(), p).scale(&lam));
            }
        }
    }

    #[test]
    fn rank_one_reports() {
        for (p, f, m) in [(3, 1, 1), (5, 1, 1), (3, 2, 1)] {
            let s = space(p, f, m);
            let cs = chars(&s);
            for a in &cs {
                for b in &cs {
                    let (va, vb): (InducedModel<CycFrac>, InducedModel<CycFrac>) = (model(a, p), model(b, p));
                    let r = verify_rank_one(&va, &vb).unwrap();
                    assert!(r.ok(), "{r:?}");
                }
            }
        }
        let f = ResidueField::new(2, 5).unwrap();
        let s = space(5, 1, 1);
        let cs = chars(&s);
        let va: InducedModel<FieldElem> = model(&cs[0], f.clone());
        let vb: InducedModel<FieldElem> = model(&cs[3], f);
        assert!(verify_rank_one(&va, &vb).unwrap().ok());
    }

    #[test]
    fn reduction_commutes_with_building() {
        for (p, f, m) in [(3, 1, 1), (5, 1, 1), (3, 1, 2)] {
            let s = space(p, f, m);
            let cs = chars(&s);
            for l in [2u64, 7, 11, 13] {
                let Ok(field) = ResidueField::new(l, p) else { continue };
                for (a, b) in [(&cs[0], &cs[1]), (&cs[2], &cs[3]), (&cs[3], &cs[4])] {
                    let omega = compatible_omega(a, b);
                    let mu = CycNum::zeta_pow(p, 1).mul(&CycNum::p_power(p, 1));
                    let univ = build_intertwiner(&model::<CycNum>(a, p), &model(b, p), &mu, &omega).unwrap();
                    let native = build_intertwiner(
                        &model::<FieldElem>(a, field.clone()),
                        &model(b, field.clone()),
                        &mu,
                        &omega,
                    )
                    .unwrap();
                    let reduced = univ.matrix.map(field.clone(), |x| phi_reduce(x, &field).unwrap());
                    assert_eq!(reduced, native.matrix);
                }
            }
        }
    }

    #[test]
    fn unit_measure_is_invertible_and_non_unit_degenerates() {
        let p = 3;
        let s = space(p, 1, 1);
        let cs = chars(&s);
        let omega = compatible_omega(&cs[0], &cs[1]);
        let field = ResidueField::new(7, p).unwrap();
        let build = |mu: &CycNum| {
            build_intertwiner(
                &model::<FieldElem>(&cs[0], field.clone()),
                &model(&cs[1], field.clone()),
                mu,
                &omega,
            )
            .unwrap()
        };
        assert_eq!(rank(&build(&CycNum::one(p)).matrix), 3);
        // 1 − ζ has norm 3, a unit of 𝒜: rank is kept everywhere.
        let one_minus_zeta = CycNum::from_i64s(p, &[1, -1]);
        assert!(one_minus_zeta.is_unit());
        assert_eq!(rank(&build(&one_minus_zeta).matrix), 3);
        // 7 is not a unit of 𝒜 and vanishes in F_7: the image collapses.
        let seven = CycNum::from_int(p, 7);
        assert!(!seven.is_unit());
        let degenerate = build(&seven);
        assert_eq!(rank(&degenerate.matrix), 0);
        assert!(degenerate.is_equivariant());
    }

    #[test]
    fn incompatible_omega_rejected() {
        let p = 5;
        let s = space(p, 1, 1);
        let cs = chars(&s);
        let v0: InducedModel<CycNum> = model(&cs[0], p);
        let v3: InducedModel<CycNum> = model(&cs[3], p);
        let err = build_intertwiner(&v0, &v3, &CycNum::one(p), &s.zero_vec()).unwrap_err();
        assert!(matches!(err, Error::IncompatibleOmega { .. }));
    }

    #[test]
    fn json_provenance() {
        let p = 3;
        let s = space(p, 1, 1);
        let cs = chars(&s);
        let i = build_intertwiner(
            &model::<CycNum>(&cs[0], p),
            &model(&cs[1], p),
            &CycNum::one(p),
            &s.zero_vec(),
        )
        .unwrap();
        let j = i.to_json();
        assert_eq!(j["A1"], json!([[[1], [0]]]));
        assert_eq!(j["A2"], json!([[[0], [1]]]));
        assert_eq!(j["matrix"].as_array().unwrap().len(), 3);
        assert_eq!(j["measure_unit"]["coeffs"], json!([1, 0]));
    }
}
