//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

use std::collections::HashSet;
use std::panic;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weil_core::cyclotomic::{CycFrac, CycNum, FieldElem, ResidueField};
use weil_core::finsymp::{
    derived_subgroup, generators, random_element, sp_elements, FqElem, Lagrangian, SpMode, SympSpace,
};
use weil_core::gl1theta::{
    build_level0, build_level0_with_sign, defect_report, specialize, RelationSign, SpecializationIdeal,
};
use weil_core::heisenberg::{
    hom_space_rank, irreducibility_check, projector_phi, ExtendedCharacter, InducedModel, ModelBasis,
};
use weil_core::weilrep::{
    cocycle_sweep, native_section, omega_ratio, scalar_extend_element, section_sigma, weil_factor, MetaplecticElem,
    PairMode, QuadraticForm, SectionVariant,
};

const GRID: [(u32, u32, usize); 5] = [(3, 1, 1), (5, 1, 1), (7, 1, 1), (3, 2, 1), (3, 1, 2)];
const ELLS: [u64; 4] = [2, 5, 7, 13];
const SP4_SEED: u64 = 20_240_601;
const SP4_PAIRS: usize = 10_000;

type Outcome = std::result::Result<String, String>;

fn space(p: u32, f: u32, m: usize) -> Arc<SympSpace> {
    SympSpace::with_params(p, f, m).unwrap()
}

/// X, Y, the oblique lagrangian span(e_i + f_i), and X twisted by c = f_1.
fn models(s: &Arc<SympSpace>) -> Vec<Arc<ModelBasis>> {
    let twist = s.f(0);
    vec![
        ModelBasis::new(ExtendedCharacter::untwisted(s, Lagrangian::standard_x(s))),
        ModelBasis::new(ExtendedCharacter::untwisted(s, Lagrangian::standard_y(s))),
        ModelBasis::new(ExtendedCharacter::untwisted(s, Lagrangian::oblique(s))),
        ModelBasis::new(ExtendedCharacter::new(s, Lagrangian::standard_x(s), twist).unwrap()),
    ]
}

fn fields(p: u32) -> Vec<Arc<ResidueField>> {
    ELLS.iter()
        .filter(|&&l| l != p as u64)
        .map(|&l| ResidueField::new(l, p).unwrap())
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let mut pairs = 0;
    for (p, f, m) in GRID {
        let s = space(p, f, m);
        let ms = models(&s);
        for a in &ms {
            for b in &ms {
                let ma = InducedModel::<CycFrac>::new(a.clone(), p).unwrap();
                let mb = InducedModel::<CycFrac>::new(b.clone(), p).unwrap();
                let r = hom_space_rank(&ma, &mb).map_err(|e| e.to_string())?;
                ensure(r == 1, || format!("rank {r} over Frac(A) for q={}^{f}, m={m}", p))?;
                pairs += 1;
                for fld in fields(p) {
                    let ma = InducedModel::<FieldElem>::new(a.clone(), fld.clone()).unwrap();
                    let mb = InducedModel::<FieldElem>::new(b.clone(), fld.clone()).unwrap();
                    let r = hom_space_rank(&ma, &mb).map_err(|e| e.to_string())?;
                    ensure(r == 1, || format!("rank {r} over l={} for q={}^{f}, m={m}", fld.l(), p))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} (model pair, ring) combinations of rank 1"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    let mut non_banal = 0;
    for (p, f, m) in GRID {
        let s = space(p, f, m);
        let q = s.fq().q() as u64;
        for basis in models(&s) {
            for fld in fields(p) {
                let model = InducedModel::<FieldElem>::new(basis.clone(), fld.clone()).unwrap();
                let cert = irreducibility_check(&model, 7).map_err(|e| e.to_string())?;
                ensure(cert.irreducible, || {
                    format!("q={q}, m={m}, l={}: end_dim {} witnesses {:?}", fld.l(), cert.end_dim, cert.witnesses)
                })?;
                checked += 1;
                if (q - 1) % fld.l() == 0 {
                    non_banal += 1;
                }
            }
        }
    }
    Ok(format!("{checked} models irreducible, {non_banal} of them with l | q-1"))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for (p, f, m) in GRID {
        let s = space(p, f, m);
        for basis in models(&s) {
            let model = InducedModel::<CycNum>::new(basis.clone(), p).unwrap();
            let n = model.dim();
            for w in 0..n {
                let phi = projector_phi(&basis, w);
                for k in 0..n {
                    // f = χ_k takes the value δ_{wk} at (r_w, 0).
                    let out = phi.apply(&model, &model.basis_vector(k));
                    let expected = if k == w { model.basis_vector(w) } else { vec![CycNum::zero(p); n] };
                    ensure(out == expected, || format!("q={}^{f}, m={m}: w={w}, k={k}", p))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} projector evaluations exact"))
}

fn criterion_4() -> Outcome {
    let mut parts = Vec::new();
    for (p, f) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
        let s = space(p, f, 1);
        let t = Instant::now();
        let r = cocycle_sweep(&s, PairMode::Exhaustive, SectionVariant::Canonical).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("Sp2(F_{}): {} failures, first {:?}", s.fq().q(), r.failure_count, r.failures.first().map(|x| &x.detail)))?;
        parts.push(format!("Sp2(F{}) {} pairs {:.1}s", s.fq().q(), r.pairs_tested, t.elapsed().as_secs_f64()));
    }
    let s = space(3, 1, 2);
    let t = Instant::now();
    let r = cocycle_sweep(&s, PairMode::Sample { n: SP4_PAIRS, seed: SP4_SEED }, SectionVariant::Canonical)
        .map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("Sp4(F3): {} failures", r.failure_count))?;
    parts.push(format!("Sp4(F3) {} sampled pairs seed {SP4_SEED} {:.1}s", r.pairs_tested, t.elapsed().as_secs_f64()));
    Ok(parts.join("; "))
}

fn criterion_5() -> Outcome {
    let s = space(3, 1, 1);
    let r = cocycle_sweep(&s, PairMode::Exhaustive, SectionVariant::Canonical).map_err(|e| e.to_string())?;
    ensure(r.passed(), || "section is not a homomorphism on SL2(F3)".into())?;
    let model = InducedModel::<CycNum>::new(models(&s)[0].clone(), 3).unwrap();
    let elems = sp_elements(&s, SpMode::Exhaustive).unwrap();
    let mut images = HashSet::new();
    let mut kernel = 0;
    for g in &elems {
        let m = section_sigma(&model, g, SectionVariant::Canonical).map_err(|e| e.to_string())?.matrix;
        if m.is_identity() {
            kernel += 1;
        }
        images.insert(format!("{:?}", m.entries()));
    }
    ensure(kernel == 1 && images.len() == elems.len(), || {
        format!("kernel size {kernel}, {} distinct images of {}", images.len(), elems.len())
    })?;
    let derived = derived_subgroup(&elems);
    ensure(elems.len() == 3 * derived.len(), || format!("derived subgroup of order {}", derived.len()))?;
    Ok(format!(
        "injective homomorphism on {} elements; [SL2(F3), SL2(F3)] has order {} (index 3)",
        elems.len(),
        derived.len()
    ))
}

fn criterion_6() -> Outcome {
    let mut compared = 0;
    for (p, f, m) in GRID {
        let s = space(p, f, m);
        let universal = InducedModel::<CycNum>::new(models(&s)[0].clone(), p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut elems = generators(&s);
        elems.extend((0..100).map(|_| random_element(&s, &mut rng)));
        let sections: Vec<MetaplecticElem<CycNum>> = elems
            .iter()
            .map(|g| section_sigma(&universal, g, SectionVariant::Canonical))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for fld in fields(p) {
            let native_model = InducedModel::<FieldElem>::new(models(&s)[0].clone(), fld.clone()).unwrap();
            for (g, sec) in elems.iter().zip(&sections) {
                let ext = scalar_extend_element(sec, &fld).map_err(|e| e.to_string())?;
                let native = native_section(&native_model, g, SectionVariant::Canonical).map_err(|e| e.to_string())?;
                ensure(ext.matrix == native.matrix, || format!("q={}^{f}, m={m}, l={}", p, fld.l()))?;
                compared += 1;
            }
        }
    }
    // −1 and 1 collapse in characteristic 2.
    let s = space(3, 1, 1);
    let model = InducedModel::<CycNum>::new(models(&s)[0].clone(), 3).unwrap();
    let id = section_sigma(&model, &s.identity(), SectionVariant::Canonical).unwrap();
    let minus = MetaplecticElem { g: id.g.clone(), matrix: id.matrix.scale(&CycNum::from_int(3, -1)) };
    let two = ResidueField::new(2, 3).unwrap();
    let seven = ResidueField::new(7, 3).unwrap();
    let same2 = scalar_extend_element(&minus, &two).unwrap().matrix == scalar_extend_element(&id, &two).unwrap().matrix;
    let same7 =
        scalar_extend_element(&minus, &seven).unwrap().matrix == scalar_extend_element(&id, &seven).unwrap().matrix;
    ensure(same2 && !same7, || format!("sign collapse: l=2 {same2}, l=7 {same7}"))?;
    Ok(format!("{compared} sections agree after reduction; -Id = Id over l=2 only"))
}

fn brute_gauss(fq: &weil_core::finsymp::Fq, a: &[FqElem]) -> CycNum {
    // Σ over all of F_q^n, one coefficient per exponent.
    let p = fq.p();
    let mut counts = vec![0i64; p as usize];
    for x in fq.vectors(a.len()) {
        let mut v = fq.zero();
        for (ai, xi) in a.iter().zip(&x) {
            v = fq.add(v, fq.mul(*ai, fq.mul(*xi, *xi)));
        }
        counts[fq.trace(v) as usize] += 1;
    }
    CycNum::from_i64s(p, &counts)
}

fn criterion_7() -> Outcome {
    let mut forms = 0;
    for (p, f) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
        let s = space(p, f, 1);
        let fq = s.fq();
        let q = fq.q() as i64;
        let one = CycNum::one(p);
        let nz: Vec<FqElem> = fq.elements().filter(|x| x.0 != 0).collect();
        let mut diag: Vec<Vec<FqElem>> = nz.iter().map(|&a| vec![a]).collect();
        for &a in &nz {
            for &b in &nz {
                diag.push(vec![a, b]);
            }
        }
        for d in &diag {
            let qf = QuadraticForm::diagonal(fq, d);
            let w = weil_factor(&qf, &one).value;
            ensure(w == brute_gauss(fq, d), || format!("Gauss sum mismatch q={q} {d:?}"))?;
            let prod = w.mul(&weil_factor(&qf.neg(), &one).value);
            ensure(prod == CycNum::from_int(p, q.pow(d.len() as u32)), || format!("product q={q} {d:?}: {prod}"))?;
            let eighth = w.pow(8).as_rational().ok_or("8th power not rational")?;
            let mut n = eighth.to_integer();
            ensure(eighth.is_integer(), || "8th power not integral".into())?;
            while &n % q == BigInt::from(0) {
                n /= q;
            }
            ensure(n == BigInt::from(1), || format!("8th power not a power of q for {d:?}"))?;
            forms += 1;
        }
        for &b in &nz {
            let r = omega_ratio(fq, fq.one(), b).map_err(|e| e.to_string())?;
            let brute = brute_gauss(fq, &[fq.one()]).mul(&brute_gauss(fq, &[b]).inverse().map_err(|e| e.to_string())?);
            ensure(r == brute, || format!("Omega_(1,{b:?}) over q={q}"))?;
        }
    }
    let f3 = space(3, 1, 1);
    let r = omega_ratio(f3.fq(), FqElem(1), FqElem(2)).unwrap();
    ensure(r == CycNum::from_int(3, -1), || format!("Omega_(1,2) = {r} for p=3"))?;
    Ok(format!("{forms} diagonal forms; Omega_(1,2) = -1 at p=3"))
}

fn criterion_8() -> Outcome {
    let mut reports = 0;
    for q in [3u64, 5, 7, 9, 27] {
        let lz = build_level0(q).map_err(|e| e.to_string())?;
        for a in [1, q as i64] {
            let s = specialize(&lz, SpecializationIdeal::new(a, 1).unwrap()).map_err(|e| e.to_string())?;
            let r = defect_report(&s, None).map_err(|e| e.to_string())?;
            let ok = r.torsion_orders() == vec![BigInt::from(q - 1)]
                && r.free_rank == 1
                && r.free_action == (a, 1)
                && r.torsion.iter().all(|t| t.x_action == BigInt::from(1) && t.z_action == BigInt::from(1));
            ensure(ok, || format!("q={q}, X-{a}: {}", r.decomposition()))?;
            for l in [2u64, 3, 5, 7, 13] {
                let r = defect_report(&s, Some(l)).map_err(|e| e.to_string())?;
                let survives = !r.torsion.is_empty();
                ensure(survives == ((q - 1) % l == 0), || format!("q={q}, X-{a}, l={l}: {}", r.decomposition()))?;
            }
            reports += 1;
        }
    }
    Ok(format!("{reports} reports Z/(q-1) + Z; defect mod l survives exactly when l | q-1"))
}

fn criterion_9() -> Outcome {
    let s = space(3, 1, 1);
    let r = cocycle_sweep(&s, PairMode::Exhaustive, SectionVariant::ReversedGauss).map_err(|e| e.to_string())?;
    ensure(!r.passed(), || "reversed Gauss normalization still passes".into())?;
    let first = r.failures.first().ok_or("no counterexample recorded")?;
    let mut same = 0;
    for q in [3u64, 5, 7, 9, 27] {
        let std = build_level0_with_sign(q, RelationSign::Standard).unwrap();
        let opp = build_level0_with_sign(q, RelationSign::Opposite).unwrap();
        for a in [1, q as i64, 2, -1] {
            let id = SpecializationIdeal::new(a, 1).unwrap();
            let r1 = defect_report(&specialize(&std, id).unwrap(), None).unwrap();
            let r2 = defect_report(&specialize(&opp, id).unwrap(), None).unwrap();
            ensure(r1.torsion_orders() == r2.torsion_orders() && r1.free_rank == r2.free_rank, || {
                format!("sign changes SNF at q={q}, a={a}")
            })?;
            same += 1;
        }
    }
    Ok(format!(
        "reversed Gauss sum fails {} of {} pairs (e.g. g1={:?}, g2={:?}: {}); relation sign flip leaves {same} SNFs unchanged",
        r.failure_count,
        r.pairs_tested,
        first.g1.mat().data().iter().map(|x| x.0).collect::<Vec<_>>(),
        first.g2.mat().data().iter().map(|x| x.0).collect::<Vec<_>>(),
        first.detail
    ))
}

fn main() {
    // Silence the default panic printer; panics are reported as FAIL lines.
    panic::set_hook(Box::new(|_| {}));
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 Stone-von Neumann uniqueness", criterion_1),
        ("2 irreducibility over residue fields", criterion_2),
        ("3 projector lemma", criterion_3),
        ("4 cocycle triviality", criterion_4),
        ("5 exceptional case F3", criterion_5),
        ("6 universal specialization", criterion_6),
        ("7 Weil factors", criterion_7),
        ("8 theta defect", criterion_8),
        ("9 negative controls", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}) [{secs:.1}s]");
            }
        }
    }
    println!(
        "criterion 10 out of scope: SKIP (local {{+1,-1}} cocycle, topology of the local group and categorical \
         equivalences have no finite model; criteria 4 and 6 are their computable shadows)"
    );
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
