//! Exact arithmetic in 𝒜 = ℤ[1/p, ζ_p], its fraction field ℚ(ζ_p), and the
//! residue fields F_ℓ(ζ_p) = F_ℓ[Z]/(h) with the structure morphism φ.
//!
//! Elements of ℤ[ζ_p] use the power basis 1, ζ, …, ζ^{p−2}; products are
//! formed with length-p cyclic convolution and folded back with
//! ζ^{p−1} = −(1 + ζ + … + ζ^{p−2}).

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactalg::{Field, Ring};
use crate::finsymp::{Fq, FqElem};
use crate::polyfp;

/// p^{−e} Σ c_i ζ^i with e minimal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    p: u32,
    coeffs: Vec<BigInt>,
    denom_exp: u32,
}

fn check_prime(p: u32) {
    assert!(p > 2 && polyfp::is_prime(p as u64), "p must be an odd prime, got {p}");
}

// Folds a length-p vector into the power basis.
fn fold(mut full: Vec<BigInt>) -> Vec<BigInt> {
    let top = full.pop().unwrap();
    if !top.is_zero() {
        for c in full.iter_mut() {
            *c -= &top;
        }
    }
    full
}

impl CycNum {
    /// Accepts up to p coefficients (a p-th coefficient is folded back).
    pub fn new(p: u32, coeffs: Vec<BigInt>, denom_exp: u32) -> Self {
        check_prime(p);
        assert!(coeffs.len() <= p as usize, "too many coefficients");
        let mut full = coeffs;
        full.resize(p as usize, BigInt::default());
        let mut x = CycNum {
            p,
            coeffs: fold(full),
            denom_exp,
        };
        x.reduce_denominator();
        x
    }

    pub fn from_i64s(p: u32, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&c| BigInt::from(c)).collect(), 0)
    }

    pub fn from_int(p: u32, n: impl Into<BigInt>) -> Self {
        Self::new(p, vec![n.into()], 0)
    }

    pub fn zero(p: u32) -> Self {
        Self::from_int(p, 0)
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(p: u32, k: i64) -> Self {
        let k = k.rem_euclid(p as i64) as usize;
        let mut full = vec![BigInt::default(); p as usize];
        full[k] = BigInt::from(1);
        Self::new(p, full, 0)
    }

    /// p^{−e} for e of either sign.
    pub fn p_power(p: u32, e: i64) -> Self {
        if e <= 0 {
            Self::from_int(p, BigInt::from(p).pow((-e) as u32))
        } else {
            Self::new(p, vec![BigInt::from(1)], e as u32)
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.denom_exp == 0
            && self.coeffs[0].is_one()
            && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Strips common factors of p from numerator and denominator.
    pub fn reduce_denominator(&mut self) {
        let p = BigInt::from(self.p);
        if self.is_zero() {
            self.denom_exp = 0;
            return;
        }
        while self.denom_exp > 0 && self.coeffs.iter().all(|c| c.is_multiple_of(&p)) {
            for c in self.coeffs.iter_mut() {
                *c /= &p;
            }
            self.denom_exp -= 1;
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.p, other.p, "cyclotomic elements for different primes");
    }

    // Numerator scaled to denominator exponent e ≥ self.denom_exp.
    fn numerator_at(&self, e: u32) -> Vec<BigInt> {
        let k = e - self.denom_exp;
        if k == 0 {
            return self.coeffs.clone();
        }
        let s = BigInt::from(self.p).pow(k);
        self.coeffs.iter().map(|c| c * &s).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let e = self.denom_exp.max(other.denom_exp);
        let a = self.numerator_at(e);
        let b = other.numerator_at(e);
        let mut x = CycNum {
            p: self.p,
            coeffs: a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
            denom_exp: e,
        };
        x.reduce_denominator();
        x
    }

    pub fn neg(&self) -> Self {
        CycNum {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            denom_exp: self.denom_exp,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        let p = self.p as usize;
        let mut full = vec![BigInt::default(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % p] += a * b;
                }
            }
        }
        let mut x = CycNum {
            p: self.p,
            coeffs: fold(full),
            denom_exp: self.denom_exp + other.denom_exp,
        };
        x.reduce_denominator();
        x
    }

    /// Multiplication by ζ^k, a coefficient permutation.
    pub fn mul_zeta(&self, k: i64) -> Self {
        let p = self.p as usize;
        let k = k.rem_euclid(p as i64) as usize;
        let mut full = vec![BigInt::default(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[(i + k) % p] = c.clone();
        }
        CycNum {
            p: self.p,
            coeffs: fold(full),
            denom_exp: self.denom_exp,
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        let mut x = CycNum {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * n).collect(),
            denom_exp: self.denom_exp,
        };
        x.reduce_denominator();
        x
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// The Galois automorphism ζ ↦ ζ^k, k prime to p.
    pub fn galois(&self, k: i64) -> Self {
        let p = self.p as i64;
        assert!(k.rem_euclid(p) != 0, "ζ ↦ ζ^k needs k prime to p");
        let mut full = vec![BigInt::default(); p as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[(i as i64 * k).rem_euclid(p) as usize] += c;
        }
        CycNum {
            p: self.p,
            coeffs: fold(full),
            denom_exp: self.denom_exp,
        }
    }

    /// ζ ↦ ζ^{−1}.
    pub fn conj_tau(&self) -> Self {
        self.galois(self.p as i64 - 1)
    }

    /// The rational integer n as a constant, if self is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(BigRational::new(
                self.coeffs[0].clone(),
                BigInt::from(self.p).pow(self.denom_exp),
            ))
        } else {
            None
        }
    }

    /// N_{ℚ(ζ)/ℚ}, the product of all Galois conjugates.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for k in 2..self.p as i64 {
            acc = acc.mul(&self.galois(k));
        }
        acc.as_rational().expect("norm is rational")
    }

    /// Units of 𝒜 are exactly the elements of norm ±p^k, k ∈ ℤ.
    pub fn is_unit(&self) -> bool {
        p_power_exponent(&self.norm(), self.p).is_some()
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        let Some(k) = p_power_exponent(&n, self.p) else {
            return Err(Error::NotAUnit { norm: n.to_string() });
        };
        let mut conj = Self::one(self.p);
        for g in 2..self.p as i64 {
            conj = conj.mul(&self.galois(g));
        }
        // 1/N = ±p^{−k}.
        let inv_n = Self::p_power(self.p, k);
        let inv_n = if n.is_negative() { inv_n.neg() } else { inv_n };
        Ok(conj.mul(&inv_n))
    }

    /// Σ_i c_i ζ^i evaluated as a length-p count vector is not canonical; this
    /// returns the numerator over p^{denom_exp} with ζ^{p−1} coefficient zero.
    pub fn numerator_full(&self) -> Vec<BigInt> {
        let mut v = self.coeffs.clone();
        v.push(BigInt::default());
        v
    }

    pub fn to_frac(&self) -> CycFrac {
        let d = BigInt::from(self.p).pow(self.denom_exp);
        CycFrac {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigRational::new(c.clone(), d.clone()))
                .collect(),
        }
    }
}

/// k with |x| = p^k, if any.
fn p_power_exponent(x: &BigRational, p: u32) -> Option<i64> {
    let pb = BigInt::from(p);
    let exp_of = |n: &BigInt| -> Option<i64> {
        let mut n = n.abs();
        let mut k = 0i64;
        while n > BigInt::from(1) {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                return None;
            }
            n = q;
            k += 1;
        }
        (n.is_one()).then_some(k)
    };
    Some(exp_of(x.numer())? - exp_of(x.denom())?)
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}ζ"),
                _ => format!("{c}ζ^{i}"),
            })
            .collect();
        let num = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        if self.denom_exp == 0 {
            write!(f, "{num}")
        } else {
            write!(f, "({num})/{}^{}", self.p, self.denom_exp)
        }
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[p={}]({self})", self.p)
    }
}

impl Ring for CycNum {
    type Ctx = u32;

    fn ctx(&self) -> u32 {
        self.p
    }
    fn zero(p: &u32) -> Self {
        CycNum::zero(*p)
    }
    fn one(p: &u32) -> Self {
        CycNum::one(*p)
    }
    fn add(&self, rhs: &Self) -> Self {
        CycNum::add(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        CycNum::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        CycNum::neg(self)
    }
    fn is_zero(&self) -> bool {
        CycNum::is_zero(self)
    }
}

/// ψ(x) = ζ_p^{Tr(x)}.
pub fn psi(fq: &Fq, x: FqElem) -> CycNum {
    CycNum::zeta_pow(fq.p(), fq.trace(x) as i64)
}

/// ℚ(ζ_p), used where kernels over the fraction field of 𝒜 are needed.
/// Coordinates in the power basis with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycFrac {
    p: u32,
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for CycFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(|x| x.to_string()).collect();
        write!(f, "CycFrac[p={}]({})", self.p, c.join(", "))
    }
}

impl CycFrac {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn galois(&self, k: i64) -> Self {
        let p = self.p as i64;
        let mut full = vec![BigRational::default(); p as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[(i as i64 * k).rem_euclid(p) as usize] += c;
        }
        let top = full.pop().unwrap();
        CycFrac {
            p: self.p,
            coeffs: full.into_iter().map(|c| c - &top).collect(),
        }
    }

    /// Back to 𝒜 when the denominators are p-powers.
    pub fn to_cyc(&self) -> Option<CycNum> {
        let mut e = 0u32;
        let pb = BigInt::from(self.p);
        for c in &self.coeffs {
            let k = p_power_exponent(&BigRational::from_integer(c.denom().clone()), self.p)?;
            e = e.max(k as u32);
        }
        let scale = pb.pow(e);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(scale.clone())).to_integer())
            .collect();
        Some(CycNum::new(self.p, coeffs, e))
    }
}

impl Ring for CycFrac {
    type Ctx = u32;

    fn ctx(&self) -> u32 {
        self.p
    }
    fn zero(p: &u32) -> Self {
        CycFrac {
            p: *p,
            coeffs: vec![BigRational::default(); *p as usize - 1],
        }
    }
    fn one(p: &u32) -> Self {
        let mut x = <Self as Ring>::zero(p);
        x.coeffs[0] = BigRational::from_integer(1.into());
        x
    }
    fn add(&self, rhs: &Self) -> Self {
        CycFrac {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let p = self.p as usize;
        let mut full = vec![BigRational::default(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % p] += a * b;
                }
            }
        }
        let top = full.pop().unwrap();
        CycFrac {
            p: self.p,
            coeffs: full.into_iter().map(|c| c - &top).collect(),
        }
    }
    fn neg(&self) -> Self {
        CycFrac {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl Field for CycFrac {
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            return None;
        }
        let mut conj = <Self as Ring>::one(&self.p);
        for k in 2..self.p as i64 {
            conj = conj.mul(&self.galois(k));
        }
        let n = self.mul(&conj).coeffs[0].clone();
        Some(CycFrac {
            p: self.p,
            coeffs: conj.coeffs.iter().map(|c| c / &n).collect(),
        })
    }
}

/// F_ℓ[Z]/(h) with h the first monic factor of Φ_p over F_ℓ of degree
/// d = ord_p(ℓ), in the order of increasing Σ h_i ℓ^i over the lower
/// coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueField {
    l: u64,
    p: u32,
    h: Vec<u64>,
    zeta_powers: Vec<Vec<u64>>,
}

impl fmt::Debug for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[Z]/({:?}) for p={}", self.l, self.h, self.p)
    }
}

const MAX_ELL: u64 = 1 << 31;

impl ResidueField {
    pub fn new(l: u64, p: u32) -> Result<Arc<Self>> {
        if !polyfp::is_prime(l) || l >= MAX_ELL {
            return Err(Error::InvalidConfig(format!("ℓ must be a prime below 2^31, got {l}")));
        }
        if !(p > 2 && polyfp::is_prime(p as u64)) {
            return Err(Error::InvalidConfig(format!("p must be an odd prime, got {p}")));
        }
        if l == p as u64 {
            return Err(Error::InvalidConfig("ℓ must differ from p".into()));
        }
        let d = polyfp::multiplicative_order(l % p as u64, p as u64) as usize;
        let phi = polyfp::cyclotomic(p as u64, l);
        let h = polyfp::monic_of_degree(l, d)
            .find(|g| polyfp::rem(&phi, g, l).is_empty() && polyfp::is_irreducible(g, l))
            .ok_or_else(|| Error::InvalidConfig("no factor of Φ_p found".into()))?;
        let mut field = ResidueField {
            l,
            p,
            h,
            zeta_powers: Vec::new(),
        };
        let mut z = vec![0u64; d];
        if d == 1 {
            z[0] = (l - field.h[0]) % l;
        } else {
            z[1] = 1;
        }
        let mut acc = field.one_coeffs();
        for _ in 0..p {
            field.zeta_powers.push(acc.clone());
            acc = field.mul_coeffs(&acc, &z);
        }
        debug_assert_eq!(acc, field.one_coeffs());
        Ok(Arc::new(field))
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.h.len() - 1
    }

    /// Monic modulus, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.h
    }

    fn one_coeffs(&self) -> Vec<u64> {
        let mut v = vec![0; self.degree()];
        v[0] = 1 % self.l;
        v
    }

    fn mul_coeffs(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let l = self.l as u128;
        let d = self.degree();
        let mut prod = vec![0u128; 2 * d];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % l;
            }
        }
        for k in (d..2 * d).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                let sub = lead * self.h[i] as u128 % l;
                prod[k - d + i] = (prod[k - d + i] + l - sub) % l;
            }
        }
        prod.truncate(d);
        prod.into_iter().map(|x| x as u64).collect()
    }

    pub fn elem(self: &Arc<Self>, coeffs: &[i64]) -> FieldElem {
        let d = self.degree();
        let l = self.l as i64;
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x.rem_euclid(l) as u64).collect();
        if c.len() > d {
            let tail = polyfp::rem(&c, &self.h, self.l);
            c = tail;
        }
        c.resize(d, 0);
        FieldElem {
            field: self.clone(),
            coeffs: c,
        }
    }

    pub fn zero(self: &Arc<Self>) -> FieldElem {
        self.elem(&[])
    }

    pub fn one(self: &Arc<Self>) -> FieldElem {
        self.elem(&[1])
    }

    pub fn zeta_pow(self: &Arc<Self>, k: i64) -> FieldElem {
        FieldElem {
            field: self.clone(),
            coeffs: self.zeta_powers[k.rem_euclid(self.p as i64) as usize].clone(),
        }
    }

    /// |B| = ℓ^d.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.l).pow(self.degree() as u32)
    }
}

/// Which coefficient ring a computation runs over.
#[derive(Clone, Debug, PartialEq)]
pub enum CoeffRing {
    Universal { p: u32 },
    Residue(Arc<ResidueField>),
}

impl CoeffRing {
    pub fn p(&self) -> u32 {
        match self {
            CoeffRing::Universal { p } => *p,
            CoeffRing::Residue(f) => f.p(),
        }
    }
}

#[derive(Clone)]
pub struct FieldElem {
    field: Arc<ResidueField>,
    coeffs: Vec<u64>,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl Eq for FieldElem {}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}Z"),
                _ => format!("{c}Z^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl FieldElem {
    pub fn field(&self) -> &Arc<ResidueField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn pow_big(&self, e: &BigUint) -> Self {
        let mut acc = self.field.one();
        for i in (0..e.bits()).rev() {
            acc = Ring::mul(&acc, &acc);
            if e.bit(i) {
                acc = Ring::mul(&acc, self);
            }
        }
        acc
    }
}

impl Ring for FieldElem {
    type Ctx = Arc<ResidueField>;

    fn ctx(&self) -> Arc<ResidueField> {
        self.field.clone()
    }
    fn zero(ctx: &Arc<ResidueField>) -> Self {
        ctx.zero()
    }
    fn one(ctx: &Arc<ResidueField>) -> Self {
        ctx.one()
    }
    fn add(&self, rhs: &Self) -> Self {
        let l = self.field.l;
        FieldElem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| (a + b) % l)
                .collect(),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        FieldElem {
            field: self.field.clone(),
            coeffs: self.field.mul_coeffs(&self.coeffs, &rhs.coeffs),
        }
    }
    fn neg(&self) -> Self {
        let l = self.field.l;
        FieldElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| (l - a) % l).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl Field for FieldElem {
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            return None;
        }
        // x^{|B|−2}.
        let e = self.field.order() - BigUint::from(2u32);
        Some(self.pow_big(&e))
    }
}

/// φ: 𝒜 → F_ℓ(ζ_p), ζ ↦ Z, p^{−e} ↦ (p^e)^{−1}.
pub fn phi_reduce(a: &CycNum, field: &Arc<ResidueField>) -> Result<FieldElem> {
    if a.p() != field.p() {
        return Err(Error::RingMismatch);
    }
    let l = BigInt::from(field.l());
    let mut acc = field.zero();
    for (i, c) in a.coeffs().iter().enumerate() {
        let r = c.mod_floor(&l).to_u64().unwrap();
        if r != 0 {
            let term = Ring::mul(&field.zeta_pow(i as i64), &field.elem(&[r as i64]));
            acc = Ring::add(&acc, &term);
        }
    }
    if a.denom_exp() > 0 {
        let pe = field.elem(&[a.p() as i64]).pow_big(&BigUint::from(a.denom_exp()));
        acc = Ring::mul(&acc, &Field::inv(&pe).expect("p is invertible in B"));
    }
    Ok(acc)
}

/// Coefficient rings that receive 𝒜 through a structure morphism.
pub trait CycloRing: Ring {
    fn prime(ctx: &Self::Ctx) -> u32;
    fn embed(ctx: &Self::Ctx, x: &CycNum) -> Self;
    fn zeta_pow(ctx: &Self::Ctx, k: i64) -> Self;
    /// Inverse when self is a unit of the ring, `None` otherwise.
    fn unit_inverse(&self) -> Option<Self>;
}

impl CycloRing for CycNum {
    fn prime(ctx: &u32) -> u32 {
        *ctx
    }
    fn embed(_: &u32, x: &CycNum) -> Self {
        x.clone()
    }
    fn zeta_pow(ctx: &u32, k: i64) -> Self {
        CycNum::zeta_pow(*ctx, k)
    }
    fn unit_inverse(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

impl CycloRing for CycFrac {
    fn prime(ctx: &u32) -> u32 {
        *ctx
    }
    fn embed(_: &u32, x: &CycNum) -> Self {
        x.to_frac()
    }
    fn zeta_pow(ctx: &u32, k: i64) -> Self {
        CycNum::zeta_pow(*ctx, k).to_frac()
    }
    fn unit_inverse(&self) -> Option<Self> {
        self.inv()
    }
}

impl CycloRing for FieldElem {
    fn prime(ctx: &Arc<ResidueField>) -> u32 {
        ctx.p()
    }
    fn embed(ctx: &Arc<ResidueField>, x: &CycNum) -> Self {
        phi_reduce(x, ctx).expect("same p")
    }
    fn zeta_pow(ctx: &Arc<ResidueField>, k: i64) -> Self {
        ctx.zeta_pow(k)
    }
    fn unit_inverse(&self) -> Option<Self> {
        self.inv()
    }
}
