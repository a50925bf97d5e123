//! The level-0 Weil module of the dual pair (F^×, F^×) over the level-0
//! Bernstein center z⁰ = ℤ[X^{±1}, Z]/(Z^{q−1} − 1), its specializations at
//! center characters and the torsion defect.
//!
//! Presentation. V is generated over z⁰ by α = [1_{1+ϖ𝒪}] and β = [1_𝒪],
//! with F^× acting by (a·f)(x) = f(x a^{−1}) (the second factor of
//! ρ(a₁, a₂)). Then Z·β = β and X·β = 1_{ϖ𝒪} = β − 1_{𝒪^×} = β − Nα, where
//! N = 1 + Z + … + Z^{q−2}. The relation rows are [N, X − 1] and [0, Z − 1].
//! Completeness of these two relations rests on V₀ = z⁰α being free; the
//! specialization grid checks its consequences.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::{smith_normal_form, RingMatrix, SnfResult};
use crate::polyfp::is_prime;

/// A finitely supported Σ c_{ij} X^i Z^j with 0 ≤ j < q − 1.
#[derive(Clone, PartialEq, Eq)]
pub struct CenterElem {
    q: u64,
    terms: BTreeMap<(i64, u64), BigInt>,
}

impl CenterElem {
    pub fn zero(q: u64) -> Self {
        CenterElem { q, terms: BTreeMap::new() }
    }

    pub fn monomial(q: u64, c: impl Into<BigInt>, i: i64, j: i64) -> Self {
        let mut e = Self::zero(q);
        e.push(i, j, c.into());
        e
    }

    pub fn one(q: u64) -> Self {
        Self::monomial(q, 1, 0, 0)
    }

    pub fn x(q: u64) -> Self {
        Self::monomial(q, 1, 1, 0)
    }

    pub fn z(q: u64) -> Self {
        Self::monomial(q, 1, 0, 1)
    }

    /// N = 1 + Z + … + Z^{q−2}.
    pub fn norm_element(q: u64) -> Self {
        let mut e = Self::zero(q);
        for j in 0..(q - 1) as i64 {
            e.push(0, j, BigInt::one());
        }
        e
    }

    fn push(&mut self, i: i64, j: i64, c: BigInt) {
        let j = j.rem_euclid((self.q - 1) as i64) as u64;
        let slot = self.terms.entry((i, j)).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn terms(&self) -> &BTreeMap<(i64, u64), BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (&(i, j), c) in &other.terms {
            e.push(i, j as i64, c.clone());
        }
        e
    }

    pub fn neg(&self) -> Self {
        CenterElem {
            q: self.q,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = Self::zero(self.q);
        for (&(i, j), c) in &self.terms {
            for (&(k, l), d) in &other.terms {
                e.push(i + k, (j + l) as i64, c * d);
            }
        }
        e
    }

    /// Image under X ↦ a, Z ↦ b. Negative X-powers need a = ±1.
    pub fn evaluate(&self, a: i64, b: i64) -> Result<BigInt> {
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let mut acc = BigInt::zero();
        for (&(i, j), c) in &self.terms {
            let xi = if i >= 0 {
                a.pow(i as u32)
            } else if a.abs().is_one() {
                a.pow((-i) as u32)
            } else {
                return Err(Error::InvalidIdeal(format!("X^{i} has no integer image at X = {a}")));
            };
            acc += c * xi * b.pow(j as u32);
        }
        Ok(acc)
    }
}

impl fmt::Display for CenterElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.terms {
            let mono = match (i, j) {
                (0, 0) => String::new(),
                (0, j) => pow_str("Z", j as i64),
                (i, 0) => pow_str("X", i),
                (i, j) => format!("{}{}", pow_str("X", i), pow_str("Z", j as i64)),
            };
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CenterElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn pow_str(v: &str, e: i64) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

/// Which sign the relation (X − 1)β = ∓Nα carries. `Opposite` exists to
/// show the invariants do not depend on it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RelationSign {
    #[default]
    Standard,
    Opposite,
}

/// Generators [α, β]; each row Σ r_k g_k = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelZeroWeil {
    pub q: u64,
    pub relations: Vec<Vec<CenterElem>>,
}

fn odd_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 3 || q % 2 == 0 {
        return None;
    }
    let p = (3..=q).find(|d| q % d == 0)?;
    if !is_prime(p) {
        return None;
    }
    let (mut r, mut f) = (q, 0);
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}

pub fn build_level0(q: u64) -> Result<LevelZeroWeil> {
    build_level0_with_sign(q, RelationSign::Standard)
}

pub fn build_level0_with_sign(q: u64, sign: RelationSign) -> Result<LevelZeroWeil> {
    if odd_prime_power(q).is_none() {
        return Err(Error::InvalidConfig(format!("q = {q} is not an odd prime power")));
    }
    let n = CenterElem::norm_element(q);
    let n = match sign {
        RelationSign::Standard => n,
        RelationSign::Opposite => n.neg(),
    };
    let one = CenterElem::one(q);
    Ok(LevelZeroWeil {
        q,
        relations: vec![
            vec![n, CenterElem::x(q).sub(&one)],
            vec![CenterElem::zero(q), CenterElem::z(q).sub(&one)],
        ],
    })
}

impl LevelZeroWeil {
    /// Relations of V/(extra)V: the original rows plus P·α and P·β for each
    /// ideal generator P. Raw output for ideals where no PID target exists.
    pub fn quotient_presentation(&self, ideal: &[CenterElem]) -> Vec<Vec<CenterElem>> {
        let mut rows = self.relations.clone();
        let zero = CenterElem::zero(self.q);
        for p in ideal {
            rows.push(vec![p.clone(), zero.clone()]);
            rows.push(vec![zero.clone(), p.clone()]);
        }
        rows
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "generators": ["alpha", "beta"],
            "relations": self.relations.iter()
                .map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// The ideal (X − a, Z − b) of z⁰ ⊗ ℤ, b = ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpecializationIdeal {
    pub a: i64,
    pub b: i64,
}

impl SpecializationIdeal {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidIdeal("X must map to a nonzero integer".into()));
        }
        if b.abs() != 1 {
            return Err(Error::InvalidIdeal(format!(
                "Z ↦ {b}: only b = ±1 is supported over ℤ; other roots of unity need a cyclotomic target"
            )));
        }
        Ok(SpecializationIdeal { a, b })
    }

    /// Parses "X-a,Z-b" (also "X+a" for X − (−a)).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidIdeal(format!("expected X-a,Z-b, got {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (xs, zs) = compact.split_once(',').ok_or_else(bad)?;
        let value = |part: &str, var: char| -> Result<i64> {
            let rest = part.strip_prefix(var).ok_or_else(bad)?;
            let (sign, num) = match rest.chars().next() {
                Some('-') => (1, &rest[1..]),
                Some('+') => (-1, &rest[1..]),
                _ => return Err(bad()),
            };
            let n: i64 = num.parse().map_err(|_| bad())?;
            Ok(sign * n)
        };
        Self::new(value(xs, 'X')?, value(zs, 'Z')?)
    }
}

impl fmt::Display for SpecializationIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |v: &str, c: i64| {
            if c >= 0 {
                format!("{v}-{c}")
            } else {
                format!("{v}+{}", -c)
            }
        };
        write!(f, "{},{}", term("X", self.a), term("Z", self.b))
    }
}

/// V_η = V ⊗_{z⁰} ℤ as a ℤ-presentation; X acts by a and Z by b throughout.
#[derive(Clone, Debug, PartialEq)]
pub struct Specialization {
    pub q: u64,
    pub ideal: SpecializationIdeal,
    pub matrix: RingMatrix<BigInt>,
}

pub fn specialize(lz: &LevelZeroWeil, ideal: SpecializationIdeal) -> Result<Specialization> {
    let rows = lz
        .relations
        .iter()
        .map(|r| r.iter().map(|e| e.evaluate(ideal.a, ideal.b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Specialization {
        q: lz.q,
        ideal,
        matrix: RingMatrix::from_rows((), rows)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionSummand {
    pub order: BigInt,
    /// Generator in the α, β coordinates.
    pub generator: Vec<BigInt>,
    /// X and Z act on ℤ/order by these residues.
    pub x_action: BigInt,
    pub z_action: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectReport {
    pub q: u64,
    pub ideal: SpecializationIdeal,
    pub modulus: Option<u64>,
    pub torsion: Vec<TorsionSummand>,
    pub free_rank: usize,
    pub free_generators: Vec<Vec<BigInt>>,
    pub free_action: (i64, i64),
}

impl DefectReport {
    pub fn torsion_orders(&self) -> Vec<BigInt> {
        self.torsion.iter().map(|t| t.order.clone()).collect()
    }

    pub fn decomposition(&self) -> String {
        let base = match self.modulus {
            Some(l) => format!("F_{l}"),
            None => "Z".into(),
        };
        let mut parts: Vec<String> = self
            .torsion
            .iter()
            .map(|t| {
                let act = if t.x_action.is_one() && t.z_action.is_one() {
                    "trivial".to_string()
                } else {
                    format!("X={}, Z={}", t.x_action, t.z_action)
                };
                format!("Z/{} ({act})", t.order)
            })
            .collect();
        if self.free_rank > 0 {
            let (x, z) = self.free_action;
            let act = if x == 1 && z == 1 { "trivial".to_string() } else { format!("X={x}, Z={z}") };
            let free = if self.free_rank == 1 { base } else { format!("{base}^{}", self.free_rank) };
            parts.push(format!("{free} ({act})"));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn to_json(&self) -> Value {
        let ints = |v: &[BigInt]| v.iter().map(crate::json::bigint).collect::<Vec<_>>();
        json!({
            "q": self.q,
            "ideal": self.ideal.to_string(),
            "mod": self.modulus,
            "torsion": ints(&self.torsion_orders()),
            "torsion_generators": self.torsion.iter().map(|t| ints(&t.generator)).collect::<Vec<_>>(),
            "free_rank": self.free_rank,
            "free_action": {"X": self.free_action.0, "Z": self.free_action.1},
            "decomposition": self.decomposition(),
        })
    }
}

/// SNF of the specialized presentation; with `modulus = Some(ℓ)` the module
/// is further tensored with F_ℓ, so ℤ/d becomes ℤ/gcd(d, ℓ).
pub fn defect_report(spec: &Specialization, modulus: Option<u64>) -> Result<DefectReport> {
    if let Some(l) = modulus {
        if !is_prime(l) {
            return Err(Error::InvalidConfig(format!("modulus {l} is not prime")));
        }
    }
    let snf: SnfResult = smith_normal_form(&spec.matrix);
    let (a, b) = (BigInt::from(spec.ideal.a), BigInt::from(spec.ideal.b));
    let mut torsion = Vec::new();
    for (i, d) in snf.invariant_factors.iter().enumerate() {
        let d = d.abs();
        let order = match modulus {
            Some(l) => d.gcd(&BigInt::from(l)),
            None => d,
        };
        if order.is_one() {
            continue;
        }
        torsion.push(TorsionSummand {
            generator: snf.right_inverse.row(i).to_vec(),
            x_action: a.mod_floor(&order),
            z_action: b.mod_floor(&order),
            order,
        });
    }
    let rank = snf.invariant_factors.len();
    let free_generators = (rank..rank + snf.free_rank)
        .map(|i| snf.right_inverse.row(i).to_vec())
        .collect();
    let free_action = match modulus {
        Some(l) => {
            let l = l as i64;
            (spec.ideal.a.rem_euclid(l), spec.ideal.b.rem_euclid(l))
        }
        None => (spec.ideal.a, spec.ideal.b),
    };
    Ok(DefectReport {
        q: spec.q,
        ideal: spec.ideal,
        modulus,
        torsion,
        free_rank: snf.free_rank,
        free_generators,
        free_action,
    })
}

/// Elementary divisors of coker([A; ℓI]) = coker(A) ⊗ ℤ/ℓ, other than 1.
pub fn stacked_mod_factors(spec: &Specialization, l: u64) -> Vec<BigInt> {
    let n = spec.matrix.cols();
    let mut rows = spec.matrix.to_rows();
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        r[i] = BigInt::from(l);
        rows.push(r);
    }
    let m = RingMatrix::from_rows((), rows).expect("rectangular");
    smith_normal_form(&m)
        .invariant_factors
        .into_iter()
        .map(|d| d.abs())
        .filter(|d| !d.is_one())
        .collect()
}

/// True when two specializations give the same presentation modulo n.
pub fn agree_mod(s1: &Specialization, s2: &Specialization, n: u64) -> bool {
    let n = BigInt::from(n);
    s1.matrix.rows() == s2.matrix.rows()
        && s1
            .matrix
            .entries()
            .iter()
            .zip(s2.matrix.entries())
            .all(|(x, y)| (x - y).mod_floor(&n).is_zero())
}
