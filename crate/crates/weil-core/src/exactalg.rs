//! Dense exact linear algebra over an abstract commutative ring: products,
//! kernels and ranks over fields, and Smith normal form over ℤ.
//!
//! Rings carry an explicit context (`Ring::Ctx`) so zero and one can be built
//! without a sample element; a residue field needs its modulus for that.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    type Ctx: Clone + PartialEq + Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn is_one(&self) -> bool {
        *self == Self::one(&self.ctx())
    }
}

pub trait Field: Ring {
    /// `None` exactly for zero.
    fn inv(&self) -> Option<Self>;
}

impl Ring for BigInt {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: &()) -> Self {
        <BigInt as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigInt as One>::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Ring for BigRational {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: &()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigRational as One>::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for BigRational {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Prime field ℤ/p, mostly for tests and small oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
    v: u64,
}

impl Fp {
    pub fn new(p: u64, v: i64) -> Self {
        Fp {
            p,
            v: v.rem_euclid(p as i64) as u64,
        }
    }

    pub fn value(&self) -> u64 {
        self.v
    }
}

impl Ring for Fp {
    type Ctx = u64;

    fn ctx(&self) -> u64 {
        self.p
    }
    fn zero(p: &u64) -> Self {
        Fp { p: *p, v: 0 }
    }
    fn one(p: &u64) -> Self {
        Fp { p: *p, v: 1 % *p }
    }
    fn add(&self, rhs: &Self) -> Self {
        Fp {
            p: self.p,
            v: (self.v + rhs.v) % self.p,
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        Fp {
            p: self.p,
            v: (self.v * rhs.v) % self.p,
        }
    }
    fn neg(&self) -> Self {
        Fp {
            p: self.p,
            v: (self.p - self.v) % self.p,
        }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
}

impl Field for Fp {
    fn inv(&self) -> Option<Self> {
        if self.v == 0 {
            return None;
        }
        let (mut base, mut e, mut acc) = (self.v, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        Some(Fp { p: self.p, v: acc })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RingMatrix<R: Ring> {
    rows: usize,
    cols: usize,
    ctx: R::Ctx,
    data: Vec<R>,
}

impl<R: Ring> RingMatrix<R> {
    pub fn new(rows: usize, cols: usize, ctx: R::Ctx, data: Vec<R>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|x| x.ctx() != ctx) {
            return Err(Error::RingMismatch);
        }
        Ok(RingMatrix {
            rows,
            cols,
            ctx,
            data,
        })
    }

    pub fn from_rows(ctx: R::Ctx, rows: Vec<Vec<R>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, ctx, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        ctx: R::Ctx,
        mut f: impl FnMut(usize, usize) -> R,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RingMatrix {
            rows,
            cols,
            ctx,
            data,
        }
    }

    pub fn zeros(rows: usize, cols: usize, ctx: R::Ctx) -> Self {
        let z = R::zero(&ctx);
        RingMatrix {
            rows,
            cols,
            data: vec![z; rows * cols],
            ctx,
        }
    }

    pub fn identity(n: usize, ctx: R::Ctx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        let one = R::one(&m.ctx);
        for i in 0..n {
            m.data[i * n + i] = one.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &R::Ctx {
        &self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.ctx.clone(), |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.ctx != other.ctx {
            return Err(Error::RingMismatch);
        }
        let mut out = Self::zeros(self.rows, other.cols, self.ctx.clone());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        if self.ctx != other.ctx {
            return Err(Error::RingMismatch);
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(RingMatrix {
            data,
            ..self.clone()
        })
    }

    pub fn scale(&self, s: &R) -> Self {
        RingMatrix {
            data: self.data.iter().map(|x| x.mul(s)).collect(),
            ..self.clone()
        }
    }

    pub fn mul_vec(&self, v: &[R]) -> Result<Vec<R>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("matrix times vector".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = R::zero(&self.ctx);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect())
    }

    pub fn map<S: Ring>(&self, ctx: S::Ctx, f: impl Fn(&R) -> S) -> RingMatrix<S> {
        RingMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            ctx,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows, self.ctx.clone())
    }
}

/// Standard product; errors on shape or ring mismatch.
pub fn mat_mul<R: Ring>(a: &RingMatrix<R>, b: &RingMatrix<R>) -> Result<RingMatrix<R>> {
    a.mul(b)
}

/// Reduced row echelon form and pivot columns. Zero entries are skipped, so
/// the sparse systems built for Hom spaces stay cheap.
pub fn rref<F: Field>(m: &RingMatrix<F>) -> (RingMatrix<F>, Vec<usize>) {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for k in 0..cols {
                a.swap(pr * cols + k, r * cols + k);
            }
        }
        let inv = a[r * cols + c].inv().expect("nonzero pivot");
        let nz: Vec<usize> = (c..cols).filter(|&k| !a[r * cols + k].is_zero()).collect();
        for &k in &nz {
            a[r * cols + k] = a[r * cols + k].mul(&inv);
        }
        for i in 0..rows {
            if i == r || a[i * cols + c].is_zero() {
                continue;
            }
            let f = a[i * cols + c].clone();
            for &k in &nz {
                let t = f.mul(&a[r * cols + k]);
                a[i * cols + k] = a[i * cols + k].sub(&t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (
        RingMatrix {
            data: a,
            ..m.clone()
        },
        pivots,
    )
}

pub fn rank<F: Field>(m: &RingMatrix<F>) -> usize {
    rref(m).1.len()
}

/// Basis of the right null space; empty means injective.
pub fn kernel_basis<F: Field>(m: &RingMatrix<F>) -> Vec<Vec<F>> {
    let (red, pivots) = rref(m);
    let cols = m.cols;
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let zero = F::zero(&m.ctx);
    let one = F::one(&m.ctx);
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|fc| {
            let mut v = vec![zero.clone(); cols];
            v[fc] = one.clone();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = red.get(r, fc).neg();
            }
            v
        })
        .collect()
}

pub fn inverse<F: Field>(m: &RingMatrix<F>) -> Result<RingMatrix<F>> {
    let n = m.rows;
    if n != m.cols {
        return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
    }
    let aug = RingMatrix::from_fn(n, 2 * n, m.ctx.clone(), |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            F::one(&m.ctx)
        } else {
            F::zero(&m.ctx)
        }
    });
    let (red, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    Ok(RingMatrix::from_fn(n, n, m.ctx.clone(), |i, j| {
        red.get(i, n + j).clone()
    }))
}

/// Incrementally built span of vectors, kept in echelon form.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    len: usize,
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(len: usize) -> Self {
        Echelon {
            len,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for (pc, row) in &self.rows {
            if v[*pc].is_zero() {
                continue;
            }
            let f = v[*pc].clone();
            for (k, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    v[k] = v[k].sub(&f.mul(x));
                }
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.len);
        let mut r = self.reduce(v);
        let Some(pc) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[pc].inv().expect("nonzero");
        for x in r.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        self.rows.push((pc, r));
        true
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Vectors annihilated by every inserted vector (as rows).
    pub fn kernel(&self, ctx: &F::Ctx) -> Vec<Vec<F>> {
        let data: Vec<F> = self.rows.iter().flat_map(|(_, r)| r.iter().cloned()).collect();
        if data.is_empty() {
            return (0..self.len)
                .map(|i| {
                    (0..self.len)
                        .map(|k| if k == i { F::one(ctx) } else { F::zero(ctx) })
                        .collect()
                })
                .collect();
        }
        let m = RingMatrix {
            rows: self.rows.len(),
            cols: self.len,
            ctx: ctx.clone(),
            data,
        };
        kernel_basis(&m)
    }
}

/// Smith form `left · input · right = diag(d_1, …, d_r, 0, …)` of an integer
/// matrix whose rows are relations among the column generators, so the
/// cokernel is ℤ^cols / rowspace = ⊕ ℤ/d_i ⊕ ℤ^free_rank.
#[derive(Clone, Debug, PartialEq)]
pub struct SnfResult {
    /// All nonzero diagonal entries, units included.
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
    pub left_transform: RingMatrix<BigInt>,
    pub right_transform: RingMatrix<BigInt>,
    /// Inverse of `right_transform`; row i is the generator of summand i in
    /// the original coordinates.
    pub right_inverse: RingMatrix<BigInt>,
}

impl SnfResult {
    /// Cokernel coordinates of a vector in the original generators.
    pub fn coordinates(&self, v: &[BigInt]) -> Vec<BigInt> {
        let n = self.right_transform.rows();
        (0..n)
            .map(|j| {
                let mut acc = <BigInt as Zero>::zero();
                for (i, x) in v.iter().enumerate() {
                    acc += x * self.right_transform.get(i, j);
                }
                acc
            })
            .collect()
    }
}

struct SnfWork {
    a: Vec<Vec<BigInt>>,
    left: Vec<Vec<BigInt>>,
    right: Vec<Vec<BigInt>>,
    rinv: Vec<Vec<BigInt>>,
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { <BigInt as One>::one() } else { <BigInt as Zero>::zero() })
                .collect()
        })
        .collect()
}

impl SnfWork {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.left.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.right.iter_mut()) {
            row.swap(i, j);
        }
        self.rinv.swap(i, j);
    }

    /// row_i += k · row_t
    fn add_row(&mut self, i: usize, t: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.left] {
            let src = m[t].clone();
            for (x, s) in m[i].iter_mut().zip(&src) {
                *x += k * s;
            }
        }
    }

    /// col_j += k · col_t
    fn add_col(&mut self, j: usize, t: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.right] {
            for row in m.iter_mut() {
                let s = k * &row[t];
                row[j] += s;
            }
        }
        let src = self.rinv[j].clone();
        for (x, s) in self.rinv[t].iter_mut().zip(&src) {
            *x -= k * s;
        }
    }

    fn smallest(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in self.a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if Zero::is_zero(x) {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

/// Pivoting rule: smallest nonzero |entry| first, ties broken row-major.
pub fn smith_normal_form(m: &RingMatrix<BigInt>) -> SnfResult {
    let (r, n) = (m.rows, m.cols);
    let mut w = SnfWork {
        a: m.to_rows(),
        left: identity_rows(r),
        right: identity_rows(n),
        rinv: identity_rows(n),
    };
    let mut factors = Vec::new();
    let mut t = 0;
    while t < r.min(n) {
        let Some((pi, pj)) = w.smallest(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if !Zero::is_zero(&w.a[i][t]) {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    w.add_row(i, t, &-q);
                    clean &= Zero::is_zero(&w.a[i][t]);
                }
            }
            for j in t + 1..n {
                if !Zero::is_zero(&w.a[t][j]) {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    w.add_col(j, t, &-q);
                    clean &= Zero::is_zero(&w.a[t][j]);
                }
            }
            if !clean {
                let (pi, pj) = w.smallest(t).expect("nonzero remainder");
                w.swap_rows(t, pi);
                w.swap_cols(t, pj);
                continue;
            }
            let piv = w.a[t][t].clone();
            let bad = (t + 1..r).find(|&i| {
                w.a[i][t + 1..]
                    .iter()
                    .any(|x| !Zero::is_zero(&(x % &piv)))
            });
            match bad {
                Some(i) => w.add_row(t, i, &<BigInt as One>::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            for x in w.a[t].iter_mut().chain(w.left[t].iter_mut()) {
                *x = -&*x;
            }
        }
        factors.push(w.a[t][t].clone());
        t += 1;
    }
    let to_mat = |rows: Vec<Vec<BigInt>>| RingMatrix::from_rows((), rows).expect("square");
    SnfResult {
        free_rank: n - factors.len(),
        invariant_factors: factors,
        left_transform: to_mat(w.left),
        right_transform: to_mat(w.right),
        right_inverse: to_mat(w.rinv),
    }
}
