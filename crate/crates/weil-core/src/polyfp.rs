// Dense polynomials over a prime field F_p, coefficients low degree first.
// Only what is needed to pick field moduli.

pub(crate) fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - lead * c % p) % p;
        }
        trim(&mut r);
    }
    r
}

/// Monic polynomials of degree `d` in increasing order of the integer whose
/// base-p digits are the lower coefficients (constant term least significant).
pub(crate) fn monic_of_degree(p: u64, d: usize) -> impl Iterator<Item = Vec<u64>> {
    let count = p.pow(d as u32);
    (0..count).map(move |mut n| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push(n % p);
            n /= p;
        }
        v.push(1);
        v
    })
}

pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    (1..=deg / 2).all(|d| monic_of_degree(p, d).all(|g| !rem(f, &g, p).is_empty()))
}

/// Φ_p = 1 + Z + … + Z^{p−1} reduced mod ℓ.
pub(crate) fn cyclotomic(p: u64, l: u64) -> Vec<u64> {
    vec![1 % l; p as usize]
}

pub(crate) fn multiplicative_order(a: u64, n: u64) -> u64 {
    let mut x = a % n;
    let mut k = 1;
    while x != 1 {
        x = x * a % n;
        k += 1;
    }
    k
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}
