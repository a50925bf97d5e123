//! F_q arithmetic, the symplectic space W = F_q^{2m}, Sp(W), lagrangians and
//! the Bruhat decomposition relative to the Siegel parabolic P(X).
//!
//! Coordinates on W are (x, y) in the basis e_1..e_m, f_1..f_m with
//! ⟨(x,y),(x',y')⟩ = x·y' − y·x', so ⟨e_i, f_j⟩ = δ_ij and J = [[0, I], [−I, 0]].
//! The reference lagrangian is X = span(e_i).

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polyfp;

/// Elements of F_q are stored as the integer Σ c_i p^i of their coefficient
/// vector in the basis 1, t, …, t^{f−1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem(pub u16);

/// Table-driven F_q = F_p[t]/(g), g the first monic irreducible of degree f
/// in the order of `polyfp::monic_of_degree`.
pub struct Fq {
    p: u32,
    f: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u32>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.f)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f
    }
}

const MAX_Q: usize = 729;

impl Fq {
    pub fn new(p: u32, f: u32) -> Result<Self> {
        if !polyfp::is_prime(p as u64) || f == 0 {
            return Err(Error::InvalidConfig(format!("F_q needs p prime and f >= 1, got p={p}, f={f}")));
        }
        let q = (p as usize)
            .checked_pow(f)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::InvalidConfig(format!("q = {p}^{f} is too large (max {MAX_Q})")))?;
        let pp = p as u64;
        let modulus: Vec<u64> = polyfp::monic_of_degree(pp, f as usize)
            .find(|g| polyfp::is_irreducible(g, pp))
            .expect("irreducible polynomials exist in every degree");
        let digits = |mut n: usize| -> Vec<u64> {
            (0..f)
                .map(|_| {
                    let d = (n % p as usize) as u64;
                    n /= p as usize;
                    d
                })
                .collect()
        };
        let encode = |c: &[u64]| -> u16 {
            let mut n = 0usize;
            for &d in c.iter().rev() {
                n = n * p as usize + d as usize;
            }
            n as u16
        };
        let coeffs: Vec<Vec<u64>> = (0..q).map(digits).collect();
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            for b in 0..q {
                let s: Vec<u64> = coeffs[a]
                    .iter()
                    .zip(&coeffs[b])
                    .map(|(x, y)| (x + y) % pp)
                    .collect();
                add[a * q + b] = encode(&s);
                let mut r = polyfp::rem(&polyfp::mul(&coeffs[a], &coeffs[b], pp), &modulus, pp);
                r.resize(f as usize, 0);
                mul[a * q + b] = encode(&r);
            }
        }
        let neg: Vec<u16> = (0..q)
            .map(|a| encode(&coeffs[a].iter().map(|x| (pp - x) % pp).collect::<Vec<_>>()))
            .collect();
        let mut inv = vec![0u16; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u16;
        }
        let mut field = Fq {
            p,
            f,
            q,
            modulus: modulus.iter().map(|&x| x as u32).collect(),
            add,
            mul,
            neg,
            inv,
            trace: Vec::new(),
        };
        // Tr(x) = Σ_{i<f} x^{p^i}, which lands in the prime field.
        field.trace = (0..q)
            .map(|a| {
                let x = FqElem(a as u16);
                let mut acc = field.zero();
                let mut frob = x;
                for _ in 0..f {
                    acc = field.add(acc, frob);
                    frob = field.pow(frob, p as u64);
                }
                assert!((acc.0 as u32) < p, "trace outside the prime field");
                acc.0 as u32
            })
            .collect();
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Monic modulus g(t), low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }

    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p as i64) as u16)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q as u16).map(FqElem)
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.add[a.0 as usize * self.q + b.0 as usize])
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.neg[a.0 as usize])
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.mul[a.0 as usize * self.q + b.0 as usize])
    }

    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        (a.0 != 0).then(|| FqElem(self.inv[a.0 as usize]))
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let (mut base, mut acc) = (a, self.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// ½ = (q+1)/2.
    pub fn half(&self) -> FqElem {
        self.inv(self.from_int(2)).expect("odd characteristic")
    }

    /// Tr_{F_q/F_p} as an integer in 0..p.
    pub fn trace(&self, a: FqElem) -> u32 {
        self.trace[a.0 as usize]
    }

    pub fn coeffs(&self, a: FqElem) -> Vec<u32> {
        let mut n = a.0 as u32;
        (0..self.f)
            .map(|_| {
                let d = n % self.p;
                n /= self.p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, c: &[u32]) -> FqElem {
        let mut n = 0u32;
        for &d in c.iter().rev() {
            n = n * self.p + d % self.p;
        }
        FqElem(n as u16)
    }

    /// t^k, the F_p-basis used for generator lists.
    pub fn basis_elem(&self, k: u32) -> FqElem {
        FqElem((self.p as u16).pow(k))
    }

    pub fn is_square(&self, a: FqElem) -> bool {
        a.0 == 0 || self.pow(a, (self.q as u64 - 1) / 2) == self.one()
    }

    pub fn primitive_element(&self) -> FqElem {
        let order = |x: FqElem| {
            let mut y = x;
            let mut k = 1;
            while y != self.one() {
                y = self.mul(y, x);
                k += 1;
            }
            k
        };
        self.elements()
            .skip(1)
            .find(|&x| order(x) == self.q - 1)
            .unwrap()
    }

    pub fn vadd(&self, u: &[FqElem], v: &[FqElem]) -> Vec<FqElem> {
        u.iter().zip(v).map(|(&a, &b)| self.add(a, b)).collect()
    }

    pub fn vsub(&self, u: &[FqElem], v: &[FqElem]) -> Vec<FqElem> {
        u.iter().zip(v).map(|(&a, &b)| self.sub(a, b)).collect()
    }

    pub fn vneg(&self, u: &[FqElem]) -> Vec<FqElem> {
        u.iter().map(|&a| self.neg(a)).collect()
    }

    pub fn vscale(&self, s: FqElem, u: &[FqElem]) -> Vec<FqElem> {
        u.iter().map(|&a| self.mul(s, a)).collect()
    }

    pub fn dot(&self, u: &[FqElem], v: &[FqElem]) -> FqElem {
        u.iter()
            .zip(v)
            .fold(self.zero(), |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Σ c_i v_i.
    pub fn combine(&self, coeffs: &[FqElem], vs: &[Vec<FqElem>], len: usize) -> Vec<FqElem> {
        let mut out = vec![self.zero(); len];
        for (&c, v) in coeffs.iter().zip(vs) {
            if c.0 != 0 {
                out = self.vadd(&out, &self.vscale(c, v));
            }
        }
        out
    }

    /// The vector of F_q^n with lexicographic index `idx` (first coordinate
    /// most significant).
    pub fn vector_at(&self, n: usize, mut idx: usize) -> Vec<FqElem> {
        let mut v = vec![FqElem(0); n];
        for k in (0..n).rev() {
            v[k] = FqElem((idx % self.q) as u16);
            idx /= self.q;
        }
        v
    }

    pub fn vector_index(&self, v: &[FqElem]) -> usize {
        v.iter().fold(0, |acc, x| acc * self.q + x.0 as usize)
    }

    pub fn vectors(&self, n: usize) -> impl Iterator<Item = Vec<FqElem>> + '_ {
        (0..self.q.pow(n as u32)).map(move |i| self.vector_at(n, i))
    }
}

/// Trace to the prime field, as an element of F_q.
pub fn fq_trace(fq: &Fq, x: FqElem) -> FqElem {
    FqElem(fq.trace(x) as u16)
}

/// Dense matrix over F_q; operations take the field explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqMat {
    rows: usize,
    cols: usize,
    data: Vec<FqElem>,
}

impl FqMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FqMat {
            rows,
            cols,
            data: vec![FqElem(0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FqElem(1));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FqElem>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        FqMat {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn from_cols(cols: &[Vec<FqElem>]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[FqElem] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> FqElem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FqElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<FqElem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<FqElem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> FqMat {
        let mut out = FqMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    pub fn transpose(&self) -> FqMat {
        let mut out = FqMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.0 == 0)
    }

    pub fn mul(&self, fq: &Fq, other: &FqMat) -> FqMat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = FqMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.0 == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.0 != 0 {
                        let idx = i * other.cols + j;
                        out.data[idx] = fq.add(out.data[idx], fq.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, fq: &Fq, v: &[FqElem]) -> Vec<FqElem> {
        (0..self.rows)
            .map(|i| fq.dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    pub fn scale(&self, fq: &Fq, s: FqElem) -> FqMat {
        FqMat {
            data: self.data.iter().map(|&x| fq.mul(s, x)).collect(),
            ..self.clone()
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, fq: &Fq) -> (FqMat, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(pr) = (r..a.rows).find(|&i| a.get(i, c).0 != 0) else {
                continue;
            };
            for k in 0..a.cols {
                a.data.swap(pr * a.cols + k, r * a.cols + k);
            }
            let inv = fq.inv(a.get(r, c)).unwrap();
            for k in 0..a.cols {
                let v = fq.mul(inv, a.get(r, k));
                a.set(r, k, v);
            }
            for i in 0..a.rows {
                let f = a.get(i, c);
                if i != r && f.0 != 0 {
                    for k in 0..a.cols {
                        let v = fq.sub(a.get(i, k), fq.mul(f, a.get(r, k)));
                        a.set(i, k, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self, fq: &Fq) -> usize {
        self.rref(fq).1.len()
    }

    /// Basis of the right null space.
    pub fn kernel(&self, fq: &Fq) -> Vec<Vec<FqElem>> {
        let (red, pivots) = self.rref(fq);
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|fc| {
                let mut v = vec![FqElem(0); self.cols];
                v[fc] = FqElem(1);
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = fq.neg(red.get(r, fc));
                }
                v
            })
            .collect()
    }

    /// One solution of `self · x = b`, free variables set to zero.
    pub fn solve(&self, fq: &Fq, b: &[FqElem]) -> Option<Vec<FqElem>> {
        let mut aug = FqMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let (red, pivots) = aug.rref(fq);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![FqElem(0); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = red.get(r, self.cols);
        }
        Some(x)
    }

    pub fn inverse(&self, fq: &Fq) -> Option<FqMat> {
        let n = self.rows;
        let cols: Option<Vec<Vec<FqElem>>> = (0..n)
            .map(|j| {
                let e: Vec<FqElem> = (0..n).map(|i| FqElem((i == j) as u16)).collect();
                self.solve(fq, &e)
            })
            .collect();
        let inv = FqMat::from_cols(&cols?);
        (self.mul(fq, &inv) == FqMat::identity(n)).then_some(inv)
    }

    pub fn det(&self, fq: &Fq) -> FqElem {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut d = fq.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| a.get(i, c).0 != 0) else {
                return fq.zero();
            };
            if pr != c {
                for k in 0..n {
                    a.data.swap(pr * n + k, c * n + k);
                }
                d = fq.neg(d);
            }
            let piv = a.get(c, c);
            d = fq.mul(d, piv);
            let inv = fq.inv(piv).unwrap();
            for i in c + 1..n {
                let f = fq.mul(a.get(i, c), inv);
                if f.0 != 0 {
                    for k in c..n {
                        let v = fq.sub(a.get(i, k), fq.mul(f, a.get(c, k)));
                        a.set(i, k, v);
                    }
                }
            }
        }
        d
    }
}

/// Rank of a list of vectors.
pub fn span_rank(fq: &Fq, vs: &[Vec<FqElem>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    FqMat::from_rows(vs).rank(fq)
}

/// Extends the independent list `base` by the vectors of `candidates` (in
/// order) that enlarge the span; returns only the added vectors.
pub fn extend_basis(fq: &Fq, base: &[Vec<FqElem>], candidates: &[Vec<FqElem>]) -> Vec<Vec<FqElem>> {
    let mut cur = base.to_vec();
    let mut added = Vec::new();
    for v in candidates {
        cur.push(v.clone());
        if span_rank(fq, &cur) == cur.len() {
            added.push(v.clone());
        } else {
            cur.pop();
        }
    }
    added
}

/// All F_q-combinations of `basis`, coefficient vectors in lexicographic order.
pub fn span_elements(fq: &Fq, basis: &[Vec<FqElem>], len: usize) -> Vec<Vec<FqElem>> {
    fq.vectors(basis.len())
        .map(|c| fq.combine(&c, basis, len))
        .collect()
}

#[derive(Debug)]
pub struct SympSpace {
    fq: Arc<Fq>,
    m: usize,
}

impl SympSpace {
    pub fn new(fq: Arc<Fq>, m: usize) -> Result<Arc<Self>> {
        if fq.p() == 2 {
            return Err(Error::InvalidConfig("characteristic 2 is excluded".into()));
        }
        if m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        Ok(Arc::new(SympSpace { fq, m }))
    }

    pub fn with_params(p: u32, f: u32, m: usize) -> Result<Arc<Self>> {
        Self::new(Arc::new(Fq::new(p, f)?), m)
    }

    pub fn fq(&self) -> &Arc<Fq> {
        &self.fq
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    pub fn zero_vec(&self) -> Vec<FqElem> {
        vec![FqElem(0); 2 * self.m]
    }

    pub fn e(&self, i: usize) -> Vec<FqElem> {
        let mut v = self.zero_vec();
        v[i] = FqElem(1);
        v
    }

    pub fn f(&self, i: usize) -> Vec<FqElem> {
        let mut v = self.zero_vec();
        v[self.m + i] = FqElem(1);
        v
    }

    pub fn form(&self, v: &[FqElem], w: &[FqElem]) -> FqElem {
        let fq = &self.fq;
        let m = self.m;
        let mut acc = fq.zero();
        for i in 0..m {
            acc = fq.add(acc, fq.mul(v[i], w[m + i]));
            acc = fq.sub(acc, fq.mul(v[m + i], w[i]));
        }
        acc
    }

    pub fn j_matrix(&self) -> FqMat {
        let m = self.m;
        let mut j = FqMat::zeros(2 * m, 2 * m);
        for i in 0..m {
            j.set(i, m + i, self.fq.one());
            j.set(m + i, i, self.fq.neg(self.fq.one()));
        }
        j
    }

    pub fn vectors(&self) -> impl Iterator<Item = Vec<FqElem>> + '_ {
        self.fq.vectors(2 * self.m)
    }

    pub fn identity(self: &Arc<Self>) -> SympMap {
        SympMap {
            space: self.clone(),
            mat: FqMat::identity(2 * self.m),
        }
    }

    /// w_j: e_i ↦ −f_i, f_i ↦ e_i for i < j, identity on the other basis vectors.
    pub fn w(self: &Arc<Self>, j: usize) -> SympMap {
        assert!(j <= self.m);
        let m = self.m;
        let fq = &self.fq;
        let mut mat = FqMat::identity(2 * m);
        for i in 0..j {
            mat.set(i, i, fq.zero());
            mat.set(m + i, m + i, fq.zero());
            mat.set(m + i, i, fq.neg(fq.one()));
            mat.set(i, m + i, fq.one());
        }
        SympMap {
            space: self.clone(),
            mat,
        }
    }

    /// Levi element m(a) = diag(a, ᵗa^{−1}).
    pub fn levi(self: &Arc<Self>, a: &FqMat) -> Result<SympMap> {
        let m = self.m;
        let ait = a
            .inverse(&self.fq)
            .ok_or(Error::Singular)?
            .transpose();
        let mut mat = FqMat::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                mat.set(i, j, a.get(i, j));
                mat.set(m + i, m + j, ait.get(i, j));
            }
        }
        SympMap::new(self, mat)
    }

    /// Siegel unipotent n(S) = [[I, S], [0, I]] for symmetric S.
    pub fn siegel(self: &Arc<Self>, s: &FqMat) -> Result<SympMap> {
        let m = self.m;
        let mut mat = FqMat::identity(2 * m);
        for i in 0..m {
            for j in 0..m {
                mat.set(i, m + j, s.get(i, j));
            }
        }
        SympMap::new(self, mat)
    }
}

#[derive(Clone, Debug)]
pub struct SympMap {
    space: Arc<SympSpace>,
    mat: FqMat,
}

impl PartialEq for SympMap {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl Eq for SympMap {}

impl std::hash::Hash for SympMap {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.mat.hash(state)
    }
}

impl SympMap {
    /// Checks ᵗg·J·g = J.
    pub fn new(space: &Arc<SympSpace>, mat: FqMat) -> Result<Self> {
        let n = space.dim();
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::DimensionMismatch(format!("expected {n}x{n}")));
        }
        let fq = space.fq();
        let j = space.j_matrix();
        if mat.transpose().mul(fq, &j).mul(fq, &mat) != j {
            return Err(Error::NotSymplectic);
        }
        Ok(SympMap {
            space: space.clone(),
            mat,
        })
    }

    pub fn space(&self) -> &Arc<SympSpace> {
        &self.space
    }

    pub fn mat(&self) -> &FqMat {
        &self.mat
    }

    pub fn apply(&self, v: &[FqElem]) -> Vec<FqElem> {
        self.mat.mul_vec(self.space.fq(), v)
    }

    pub fn compose(&self, other: &SympMap) -> SympMap {
        SympMap {
            space: self.space.clone(),
            mat: self.mat.mul(self.space.fq(), &other.mat),
        }
    }

    /// g^{−1} = −J ᵗg J.
    pub fn inverse(&self) -> SympMap {
        let fq = self.space.fq();
        let j = self.space.j_matrix();
        let mat = j
            .mul(fq, &self.mat.transpose())
            .mul(fq, &j)
            .scale(fq, fq.neg(fq.one()));
        SympMap {
            space: self.space.clone(),
            mat,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.mat == FqMat::identity(self.space.dim())
    }

    /// Lower-left block C of g = [[A, B], [C, D]].
    pub fn lower_left(&self) -> FqMat {
        let m = self.space.m();
        self.mat.block(m, 0, m, m)
    }

    pub fn in_siegel_parabolic(&self) -> bool {
        self.lower_left().is_zero()
    }
}

/// det_X(p) = det(p|_X), the upper-left block.
pub fn det_x(p: &SympMap) -> Result<FqElem> {
    if !p.in_siegel_parabolic() {
        return Err(Error::NotInParabolic);
    }
    let m = p.space.m();
    Ok(p.mat.block(0, 0, m, m).det(p.space.fq()))
}

/// A lagrangian subspace, stored by a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lagrangian {
    basis: Vec<Vec<FqElem>>,
}

impl Lagrangian {
    pub fn new(space: &SympSpace, basis: Vec<Vec<FqElem>>) -> Result<Self> {
        if basis.len() != space.m() {
            return Err(Error::NotLagrangian(format!(
                "{} vectors, expected {}",
                basis.len(),
                space.m()
            )));
        }
        if basis.iter().any(|v| v.len() != space.dim()) {
            return Err(Error::NotLagrangian("wrong vector length".into()));
        }
        if span_rank(space.fq(), &basis) != basis.len() {
            return Err(Error::NotLagrangian("dependent vectors".into()));
        }
        for a in &basis {
            for b in &basis {
                if space.form(a, b).0 != 0 {
                    return Err(Error::NotLagrangian("not isotropic".into()));
                }
            }
        }
        Ok(Lagrangian { basis })
    }

    /// X = span(e_i).
    pub fn standard_x(space: &SympSpace) -> Self {
        Lagrangian {
            basis: (0..space.m()).map(|i| space.e(i)).collect(),
        }
    }

    /// Y = span(f_i).
    pub fn standard_y(space: &SympSpace) -> Self {
        Lagrangian {
            basis: (0..space.m()).map(|i| space.f(i)).collect(),
        }
    }

    /// span(e_i + f_i), transverse to both X and Y.
    pub fn oblique(space: &SympSpace) -> Self {
        Lagrangian {
            basis: (0..space.m())
                .map(|i| space.fq().vadd(&space.e(i), &space.f(i)))
                .collect(),
        }
    }

    pub fn basis(&self) -> &[Vec<FqElem>] {
        &self.basis
    }

    pub fn contains(&self, space: &SympSpace, v: &[FqElem]) -> bool {
        // A is its own orthogonal.
        self.basis.iter().all(|a| space.form(a, v).0 == 0)
    }

    pub fn image(&self, g: &SympMap) -> Lagrangian {
        Lagrangian {
            basis: self.basis.iter().map(|v| g.apply(v)).collect(),
        }
    }

    /// Basis of A ∩ A'.
    pub fn intersection(&self, space: &SympSpace, other: &Lagrangian) -> Vec<Vec<FqElem>> {
        let fq = space.fq();
        let m = space.m();
        // Σ t_c a_c lies in A' iff it pairs to zero with every basis vector of A'.
        let mut sys = FqMat::zeros(m, m);
        for (r, b) in other.basis.iter().enumerate() {
            for (c, a) in self.basis.iter().enumerate() {
                sys.set(r, c, space.form(a, b));
            }
        }
        sys.kernel(fq)
            .iter()
            .map(|t| fq.combine(t, &self.basis, space.dim()))
            .collect()
    }

    pub fn elements(&self, space: &SympSpace) -> Vec<Vec<FqElem>> {
        span_elements(space.fq(), &self.basis, space.dim())
    }

    /// Vectors b_1..b_m spanning an isotropic complement with ⟨a_i, b_j⟩ = δ_ij,
    /// by symplectic Gram–Schmidt: solve the pairing conditions with free
    /// variables zero, then correct by b_i −= ½ Σ_k ⟨b_i, b_k⟩ a_k.
    pub fn complement(&self, space: &SympSpace) -> Vec<Vec<FqElem>> {
        let fq = space.fq();
        let m = space.m();
        let n = space.dim();
        let mut sys = FqMat::zeros(m, n);
        for (k, a) in self.basis.iter().enumerate() {
            for c in 0..n {
                let mut unit = space.zero_vec();
                unit[c] = FqElem(1);
                sys.set(k, c, space.form(a, &unit));
            }
        }
        let raw: Vec<Vec<FqElem>> = (0..m)
            .map(|i| {
                let rhs: Vec<FqElem> = (0..m).map(|k| FqElem((k == i) as u16)).collect();
                sys.solve(fq, &rhs).expect("nondegenerate form")
            })
            .collect();
        let half = fq.half();
        raw.iter()
            .map(|bi| {
                let mut out = bi.clone();
                for (bk, ak) in raw.iter().zip(&self.basis) {
                    let c = fq.neg(fq.mul(half, space.form(bi, bk)));
                    out = fq.vadd(&out, &fq.vscale(c, ak));
                }
                out
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct BruhatFactorization {
    pub p1: SympMap,
    pub j: usize,
    pub w: SympMap,
    pub p2: SympMap,
}

/// g = p1·w_j·p2 with p1, p2 ∈ P(X) and j = m − dim(gX ∩ X).
pub fn bruhat_decompose(g: &SympMap) -> Result<BruhatFactorization> {
    let space = g.space().clone();
    let fq = space.fq().clone();
    let fq = &*fq;
    let m = space.m();
    let n = space.dim();
    SympMap::new(&space, g.mat().clone())?;
    let j = g.lower_left().rank(fq);
    let l1: Vec<Vec<FqElem>> = (0..m).map(|c| g.mat().col(c)).collect();
    let k: Vec<Vec<FqElem>> = g
        .lower_left()
        .kernel(fq)
        .iter()
        .map(|t| fq.combine(t, &l1, n))
        .collect();
    debug_assert_eq!(k.len(), m - j);
    let mut ys = extend_basis(fq, &k, &l1);
    debug_assert_eq!(ys.len(), j);

    // x_i ∈ X dual to y_1..y_j; the remaining x's are the basis of gX ∩ X.
    let mut xs = Vec::with_capacity(m);
    if j > 0 {
        let mut sys = FqMat::zeros(j, m);
        for (r, y) in ys.iter().enumerate() {
            for c in 0..m {
                sys.set(r, c, space.form(&space.e(c), y));
            }
        }
        for i in 0..j {
            let rhs: Vec<FqElem> = (0..j).map(|r| FqElem((r == i) as u16)).collect();
            let s = sys.solve(fq, &rhs).expect("y's have independent f-parts");
            let mut x = s;
            x.resize(n, FqElem(0));
            xs.push(x);
        }
    }
    xs.extend(k);

    // z_k for k ≥ j: ⟨x_i, z_k⟩ = δ_ik and ⟨y_l, z_k⟩ = 0, then made isotropic.
    if j < m {
        let mut sys = FqMat::zeros(m + j, n);
        for c in 0..n {
            let mut unit = space.zero_vec();
            unit[c] = FqElem(1);
            for (r, x) in xs.iter().enumerate() {
                sys.set(r, c, space.form(x, &unit));
            }
            for (l, y) in ys.iter().enumerate() {
                sys.set(m + l, c, space.form(y, &unit));
            }
        }
        let zs: Vec<Vec<FqElem>> = (j..m)
            .map(|kk| {
                let rhs: Vec<FqElem> = (0..m + j).map(|r| FqElem((r == kk) as u16)).collect();
                sys.solve(fq, &rhs).expect("nondegenerate form")
            })
            .collect();
        let half = fq.half();
        for (a, za) in zs.iter().enumerate() {
            let mut y = za.clone();
            for (b, zb) in zs.iter().enumerate() {
                let c = fq.neg(fq.mul(half, space.form(za, zb)));
                y = fq.vadd(&y, &fq.vscale(c, &xs[j + b]));
            }
            let _ = a;
            ys.push(y);
        }
    }

    let cols: Vec<Vec<FqElem>> = xs.into_iter().chain(ys).collect();
    let p1 = SympMap::new(&space, FqMat::from_cols(&cols))?;
    let w = space.w(j);
    let p2 = w.inverse().compose(&p1.inverse()).compose(g);
    debug_assert!(p1.in_siegel_parabolic() && p2.in_siegel_parabolic());
    debug_assert!(p1.compose(&w).compose(&p2) == *g);
    Ok(BruhatFactorization { p1, j, w, p2 })
}

/// |Sp_{2m}(F_q)| = q^{m²} Π_{i=1..m} (q^{2i} − 1).
pub fn sp_order(q: u128, m: u32) -> u128 {
    let mut n = q.pow(m * m);
    for i in 1..=m {
        n *= q.pow(2 * i) - 1;
    }
    n
}

pub const EXHAUSTIVE_BOUND: u128 = 1_000_000;
pub const WORD_LENGTH: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpMode {
    Exhaustive,
    Sample { n: usize, seed: u64 },
}

pub fn sp_elements(space: &Arc<SympSpace>, mode: SpMode) -> Result<Vec<SympMap>> {
    match mode {
        SpMode::Exhaustive => enumerate_sp(space),
        SpMode::Sample { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..n).map(|_| random_element(space, &mut rng)).collect())
        }
    }
}

// Every element is determined by the symplectic basis (g e_i, g f_i); choose
// the pairs one at a time inside the orthogonal of the previous ones.
fn enumerate_sp(space: &Arc<SympSpace>) -> Result<Vec<SympMap>> {
    let order = sp_order(space.fq().q() as u128, space.m() as u32);
    if order > EXHAUSTIVE_BOUND {
        return Err(Error::EnumerationTooLarge { order });
    }
    let fq = space.fq();
    let n = space.dim();
    let ambient: Vec<Vec<FqElem>> = (0..n)
        .map(|i| {
            let mut v = space.zero_vec();
            v[i] = FqElem(1);
            v
        })
        .collect();
    let mut out = Vec::with_capacity(order as usize);
    let mut chosen: Vec<(Vec<FqElem>, Vec<FqElem>)> = Vec::new();

    fn rec(
        space: &Arc<SympSpace>,
        fq: &Fq,
        sub: &[Vec<FqElem>],
        chosen: &mut Vec<(Vec<FqElem>, Vec<FqElem>)>,
        out: &mut Vec<SympMap>,
    ) {
        let n = space.dim();
        let m = space.m();
        if chosen.len() == m {
            let cols: Vec<Vec<FqElem>> = chosen
                .iter()
                .map(|(v, _)| v.clone())
                .chain(chosen.iter().map(|(_, w)| w.clone()))
                .collect();
            out.push(SympMap {
                space: space.clone(),
                mat: FqMat::from_cols(&cols),
            });
            return;
        }
        let vecs = span_elements(fq, sub, n);
        for v in vecs.iter().skip(1) {
            for w in &vecs {
                if space.form(v, w) != fq.one() {
                    continue;
                }
                let proj: Vec<Vec<FqElem>> = sub
                    .iter()
                    .map(|u| {
                        let a = fq.neg(space.form(u, w));
                        let b = space.form(u, v);
                        fq.vadd(&fq.vadd(u, &fq.vscale(a, v)), &fq.vscale(b, w))
                    })
                    .collect();
                let next = extend_basis(fq, &[], &proj);
                chosen.push((v.clone(), w.clone()));
                rec(space, fq, &next, chosen, out);
                chosen.pop();
            }
        }
    }

    rec(space, fq, &ambient, &mut chosen, &mut out);
    debug_assert_eq!(out.len() as u128, order);
    Ok(out)
}

fn random_gl(space: &SympSpace, rng: &mut ChaCha8Rng) -> FqMat {
    let m = space.m();
    let q = space.fq().q();
    loop {
        let rows: Vec<Vec<FqElem>> = (0..m)
            .map(|_| (0..m).map(|_| FqElem(rng.gen_range(0..q) as u16)).collect())
            .collect();
        let a = FqMat::from_rows(&rows);
        if a.rank(space.fq()) == m {
            return a;
        }
    }
}

fn random_symmetric(space: &SympSpace, rng: &mut ChaCha8Rng) -> FqMat {
    let m = space.m();
    let q = space.fq().q();
    let mut s = FqMat::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let x = FqElem(rng.gen_range(0..q) as u16);
            s.set(i, j, x);
            s.set(j, i, x);
        }
    }
    s
}

/// Product of `WORD_LENGTH` random factors drawn from Levi elements, Siegel
/// unipotents and the w_j.
pub fn random_element(space: &Arc<SympSpace>, rng: &mut ChaCha8Rng) -> SympMap {
    let mut g = space.identity();
    for _ in 0..WORD_LENGTH {
        let h = match rng.gen_range(0..3) {
            0 => space.levi(&random_gl(space, rng)).unwrap(),
            1 => space.siegel(&random_symmetric(space, rng)).unwrap(),
            _ => space.w(rng.gen_range(0..=space.m())),
        };
        g = g.compose(&h);
    }
    g
}

/// A fixed generating set: m(diag(ε,1,…)) for a primitive ε, the m(a) for an
/// elementary a and a cyclic permutation a (when m ≥ 2), n(t^k E_11) for the
/// F_p-basis t^k of F_q, and w_m.
pub fn generators(space: &Arc<SympSpace>) -> Vec<SympMap> {
    let fq = space.fq();
    let m = space.m();
    let mut gens = Vec::new();
    let mut d = FqMat::identity(m);
    d.set(0, 0, fq.primitive_element());
    gens.push(space.levi(&d).unwrap());
    if m >= 2 {
        let mut a = FqMat::identity(m);
        a.set(0, 1, fq.one());
        gens.push(space.levi(&a).unwrap());
        let mut c = FqMat::zeros(m, m);
        for i in 0..m {
            c.set((i + 1) % m, i, fq.one());
        }
        gens.push(space.levi(&c).unwrap());
    }
    for k in 0..fq.f() {
        let mut s = FqMat::zeros(m, m);
        s.set(0, 0, fq.basis_elem(k));
        gens.push(space.siegel(&s).unwrap());
    }
    gens.push(space.w(m));
    gens
}

/// The subgroup generated by `gens` (which must be nonempty), by breadth-first closure.
pub fn subgroup_closure(gens: &[SympMap]) -> Vec<SympMap> {
    let mut seen: HashSet<SympMap> = HashSet::new();
    let id = gens[0].space().identity();
    seen.insert(id.clone());
    let mut out = vec![id];
    let mut frontier = 0;
    while frontier < out.len() {
        let x = out[frontier].clone();
        frontier += 1;
        for g in gens {
            let y = x.compose(g);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
    }
    out
}

/// [G, G] for G given by all its elements.
pub fn derived_subgroup(elements: &[SympMap]) -> Vec<SympMap> {
    let mut comms: Vec<SympMap> = Vec::new();
    let mut seen: HashSet<SympMap> = HashSet::new();
    for a in elements {
        for b in elements {
            let c = a.compose(b).compose(&a.inverse()).compose(&b.inverse());
            if seen.insert(c.clone()) {
                comms.push(c);
            }
        }
    }
    subgroup_closure(&comms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{HashMap, HashSet};

    fn space(p: u32, f: u32, m: usize) -> Arc<SympSpace> {
        SympSpace::with_params(p, f, m).unwrap()
    }

    fn mat(fq: &Fq, rows: &[&[i64]]) -> FqMat {
        FqMat::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| fq.from_int(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn field_axioms_small() {
        for (p, f) in [(3, 1), (3, 2), (5, 1), (3, 3), (7, 1)] {
            let fq = Fq::new(p, f).unwrap();
            for a in fq.elements() {
                assert_eq!(fq.add(a, fq.neg(a)), fq.zero());
                if a.0 != 0 {
                    assert_eq!(fq.mul(a, fq.inv(a).unwrap()), fq.one());
                }
                for b in fq.elements() {
                    assert_eq!(fq.mul(a, b), fq.mul(b, a));
                }
            }
            assert_eq!(fq.mul(fq.half(), fq.from_int(2)), fq.one());
            // ½ = (q+1)/2 read in the prime field.
            assert_eq!(fq.half(), fq.from_int(((p as i64) + 1) / 2));
        }
    }

    #[test]
    fn modulus_choice() {
        assert_eq!(Fq::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Fq::new(5, 1).unwrap().modulus(), &[0, 1]);
        assert!(Fq::new(4, 1).is_err());
    }

    #[test]
    fn trace_examples() {
        let f3 = Fq::new(3, 1).unwrap();
        for x in f3.elements() {
            assert_eq!(fq_trace(&f3, x), x);
        }
        let f9 = Fq::new(3, 2).unwrap();
        assert_eq!(f9.trace(f9.one()), 2);
        let mut fibers = HashMap::new();
        for x in f9.elements() {
            let cube = f9.mul(x, f9.mul(x, x));
            assert_eq!(fq_trace(&f9, x), f9.add(x, cube));
            *fibers.entry(f9.trace(x)).or_insert(0) += 1;
        }
        assert_eq!(fibers.len(), 3);
        assert!(fibers.values().all(|&c| c == 3));
    }

    #[test]
    fn orders_and_enumeration() {
        assert_eq!(sp_order(3, 1), 24);
        assert_eq!(sp_order(5, 1), 120);
        assert_eq!(sp_order(3, 2), 51840);
        for (p, f, expected) in [(3, 1, 24usize), (5, 1, 120), (3, 2, 720)] {
            let s = space(p, f, 1);
            let all = sp_elements(&s, SpMode::Exhaustive).unwrap();
            assert_eq!(all.len(), expected);
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), expected);
        }
        assert!(matches!(
            sp_elements(&space(5, 1, 3), SpMode::Exhaustive),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn enumeration_sp4_f3() {
        let s = space(3, 1, 2);
        let all = sp_elements(&s, SpMode::Exhaustive).unwrap();
        assert_eq!(all.len(), 51840);
        let distinct: HashSet<_> = all.iter().map(|g| g.mat().clone()).collect();
        assert_eq!(distinct.len(), 51840);
    }

    // SL2 brute force: every 2x2 matrix of determinant one.
    #[test]
    fn sp2_equals_sl2() {
        for p in [3i64, 5] {
            let s = space(p as u32, 1, 1);
            let fq = s.fq();
            let all: HashSet<_> = sp_elements(&s, SpMode::Exhaustive)
                .unwrap()
                .into_iter()
                .map(|g| g.mat().clone())
                .collect();
            let mut count = 0;
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        for d in 0..p {
                            if (a * d - b * c).rem_euclid(p) == 1 {
                                count += 1;
                                assert!(all.contains(&mat(fq, &[&[a, b], &[c, d]])));
                            }
                        }
                    }
                }
            }
            assert_eq!(count, all.len());
        }
    }

    #[test]
    fn non_symplectic_rejected() {
        let s = space(3, 1, 1);
        let m = mat(s.fq(), &[&[1, 1], &[0, 2]]);
        assert_eq!(SympMap::new(&s, m.clone()).unwrap_err(), Error::NotSymplectic);
        let fake = SympMap {
            space: s.clone(),
            mat: m,
        };
        assert!(bruhat_decompose(&fake).is_err());
    }

    #[test]
    fn bruhat_trivial_cases() {
        for (p, f, m) in [(3, 1, 1), (5, 1, 2), (3, 2, 1)] {
            let s = space(p, f, m);
            let b = bruhat_decompose(&s.identity()).unwrap();
            assert_eq!(b.j, 0);
            assert!(b.p1.is_identity() && b.p2.is_identity());
            let b = bruhat_decompose(&s.w(m)).unwrap();
            assert_eq!(b.j, m);
            assert_eq!(b.p1.compose(&b.w).compose(&b.p2), s.w(m));
        }
    }

    fn check_bruhat(g: &SympMap) {
        let s = g.space();
        let b = bruhat_decompose(g).unwrap();
        assert!(b.p1.in_siegel_parabolic() && b.p2.in_siegel_parabolic());
        assert_eq!(b.p1.compose(&b.w).compose(&b.p2), *g);
        let x = Lagrangian::standard_x(s);
        let inter = x.image(g).intersection(s, &x);
        assert_eq!(b.j, s.m() - inter.len());
        assert_eq!(b.w, s.w(b.j));
    }

    #[test]
    fn bruhat_reconstruction_exhaustive() {
        for (p, f, m) in [(3, 1, 1), (5, 1, 1), (7, 1, 1), (3, 2, 1)] {
            let s = space(p, f, m);
            for g in sp_elements(&s, SpMode::Exhaustive).unwrap() {
                check_bruhat(&g);
            }
        }
        let s = space(3, 1, 2);
        for g in sp_elements(&s, SpMode::Exhaustive).unwrap().iter().step_by(7) {
            check_bruhat(g);
        }
    }

    #[test]
    fn bruhat_rotation_times_torus() {
        let s = space(3, 1, 1);
        let fq = s.fq();
        let rot = SympMap::new(&s, mat(fq, &[&[0, -1], &[1, 0]])).unwrap();
        let torus = SympMap::new(&s, mat(fq, &[&[2, 0], &[0, 2]])).unwrap();
        let g = rot.compose(&torus);
        let b = bruhat_decompose(&g).unwrap();
        assert_eq!(b.j, 1);
        assert_eq!(b.p1.compose(&b.w).compose(&b.p2), g);
    }

    #[test]
    fn det_x_examples() {
        let s = space(3, 1, 1);
        assert_eq!(det_x(&s.identity()).unwrap(), FqElem(1));
        let fq = s.fq();
        let d = s.levi(&mat(fq, &[&[2]])).unwrap();
        assert_eq!(det_x(&d).unwrap(), fq.from_int(2));
        assert_eq!(det_x(&s.w(1)), Err(Error::NotInParabolic));
        let s2 = space(3, 1, 2);
        let a = mat(s2.fq(), &[&[1, 1], &[0, 2]]);
        assert_eq!(det_x(&s2.levi(&a).unwrap()).unwrap(), s2.fq().from_int(2));
    }

    #[test]
    fn det_x_multiplicative_on_parabolic() {
        let s = space(5, 1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = s
                .levi(&random_gl(&s, &mut rng))
                .unwrap()
                .compose(&s.siegel(&random_symmetric(&s, &mut rng)).unwrap());
            let q = s.levi(&random_gl(&s, &mut rng)).unwrap();
            let fq = s.fq();
            assert_eq!(
                det_x(&p.compose(&q)).unwrap(),
                fq.mul(det_x(&p).unwrap(), det_x(&q).unwrap())
            );
        }
    }

    #[test]
    fn lagrangians() {
        let s = space(5, 1, 2);
        let x = Lagrangian::standard_x(&s);
        let y = Lagrangian::standard_y(&s);
        let o = Lagrangian::oblique(&s);
        assert!(x.intersection(&s, &y).is_empty());
        assert!(x.intersection(&s, &o).is_empty());
        assert_eq!(x.intersection(&s, &x).len(), 2);
        assert!(Lagrangian::new(&s, vec![s.e(0), s.f(0)]).is_err());
        assert!(Lagrangian::new(&s, vec![s.e(0)]).is_err());
        for l in [&x, &y, &o] {
            let b = l.complement(&s);
            for (i, a) in l.basis().iter().enumerate() {
                for (k, bk) in b.iter().enumerate() {
                    assert_eq!(s.form(a, bk), FqElem((i == k) as u16));
                    for bl in &b {
                        assert_eq!(s.form(bk, bl), FqElem(0));
                    }
                }
            }
        }
    }

    #[test]
    fn double_cosets_sp2() {
        // Orbits of P × P acting by (p, p') · g = p g p'^{-1}: exactly the Bruhat
        // cells, so equal j means same double coset.
        let s = space(5, 1, 1);
        let all = sp_elements(&s, SpMode::Exhaustive).unwrap();
        let parabolic: Vec<_> = all.iter().filter(|g| g.in_siegel_parabolic()).cloned().collect();
        let mut seen: HashSet<FqMat> = HashSet::new();
        let mut cells = Vec::new();
        for g in &all {
            if seen.contains(g.mat()) {
                continue;
            }
            let mut orbit = HashSet::new();
            for a in &parabolic {
                for b in &parabolic {
                    orbit.insert(a.compose(g).compose(b).mat().clone());
                }
            }
            let j = bruhat_decompose(g).unwrap().j;
            for h in &all {
                if orbit.contains(h.mat()) {
                    assert_eq!(bruhat_decompose(h).unwrap().j, j);
                }
            }
            seen.extend(orbit.iter().cloned());
            cells.push((j, orbit.len()));
        }
        cells.sort();
        assert_eq!(cells, vec![(0, 20), (1, 100)]);
    }

    #[test]
    fn generators_are_symplectic_and_generate() {
        let s = space(3, 1, 1);
        let gens = generators(&s);
        let mut group: HashSet<FqMat> = HashSet::from([s.identity().mat().clone()]);
        let mut frontier = vec![s.identity()];
        while let Some(g) = frontier.pop() {
            for h in &gens {
                let gh = g.compose(h);
                if group.insert(gh.mat().clone()) {
                    frontier.push(gh);
                }
            }
        }
        assert_eq!(group.len(), 24);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn symplectic_closure(seed in any::<u64>(), cfg in prop::sample::select(vec![(3u32, 1u32, 2usize), (5, 1, 1), (3, 2, 1), (7, 1, 2)])) {
            let s = space(cfg.0, cfg.1, cfg.2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_element(&s, &mut rng);
            let h = random_element(&s, &mut rng);
            prop_assert!(SympMap::new(&s, g.compose(&h).mat().clone()).is_ok());
            prop_assert!(SympMap::new(&s, g.inverse().mat().clone()).is_ok());
            prop_assert!(g.compose(&g.inverse()).is_identity());
            let l = Lagrangian::oblique(&s).image(&g);
            prop_assert!(Lagrangian::new(&s, l.basis().to_vec()).is_ok());
            check_bruhat(&g);
        }
    }

    #[test]
    fn derived_subgroups() {
        let s = SympSpace::with_params(3, 1, 1).unwrap();
        let g = sp_elements(&s, SpMode::Exhaustive).unwrap();
        assert_eq!(derived_subgroup(&g).len(), 8);
        assert_eq!(subgroup_closure(&generators(&s)).len(), 24);
        let s = SympSpace::with_params(5, 1, 1).unwrap();
        let g = sp_elements(&s, SpMode::Exhaustive).unwrap();
        assert_eq!(derived_subgroup(&g).len(), 120);
    }
}
