//! Finite fields GF(p^k) for prime powers q ≤ 32, with precomputed
//! operation tables, dense Gaussian elimination, and the prime-power
//! classifier. Elements are u16 codes: base-p digit vectors packed as
//! Σ cᵢ pⁱ, so codes 0..p−1 are the prime subfield.

use crate::error::{KitError, Result};

/// Largest field size supported by the table-based implementation.
pub const MAX_Q: u64 = 32;

/// Decomposes q = p^k with p prime, k ≥ 1; `None` when q is not a prime
/// power (or < 2).
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut n = q;
            let mut k = 0u32;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            return if n == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

/// Monic irreducible polynomial of degree k over F_p (little-endian
/// coefficients), for every prime power p^k ≤ 32 with k ≥ 2.
fn irreducible_poly(p: u64, k: u32) -> Option<Vec<u64>> {
    match (p, k) {
        (2, 2) => Some(vec![1, 1, 1]),       // x² + x + 1
        (2, 3) => Some(vec![1, 1, 0, 1]),    // x³ + x + 1
        (2, 4) => Some(vec![1, 1, 0, 0, 1]), // x⁴ + x + 1
        (2, 5) => Some(vec![1, 0, 1, 0, 0, 1]), // x⁵ + x² + 1
        (3, 2) => Some(vec![1, 0, 1]),       // x² + 1
        (3, 3) => Some(vec![1, 2, 0, 1]),    // x³ + 2x + 1
        (5, 2) => Some(vec![2, 1, 1]),       // x² + x + 2
        _ => None,
    }
}

/// GF(q) with all binary operations tabulated; elements are u16 codes.
#[derive(Debug, Clone)]
pub struct FqField {
    q: u16,
    p: u16,
    k: u32,
    add_t: Vec<u16>,
    mul_t: Vec<u16>,
    inv_t: Vec<u16>,
    neg_t: Vec<u16>,
}

fn decode(code: u64, p: u64, k: u32) -> Vec<u64> {
    let mut digits = vec![0u64; k as usize];
    let mut c = code;
    for d in digits.iter_mut() {
        *d = c % p;
        c /= p;
    }
    digits
}

fn encode(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two digit vectors modulo the defining polynomial.
fn poly_mul_mod(x: &[u64], y: &[u64], p: u64, modpoly: &[u64]) -> Vec<u64> {
    let k = modpoly.len() - 1;
    let mut prod = vec![0u64; 2 * k];
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + xi * yj) % p;
        }
    }
    // Reduce: x^k ≡ −(modpoly minus leading term).
    for d in (k..2 * k).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for (j, &mj) in modpoly.iter().enumerate().take(k) {
            let sub = (c * mj) % p;
            prod[d - k + j] = (prod[d - k + j] + p - sub) % p;
        }
    }
    prod.truncate(k);
    prod
}

impl FqField {
    /// Builds GF(q); errors unless q is a prime power with 2 ≤ q ≤ 32.
    pub fn new(q: u64) -> Result<FqField> {
        let (p, k) = prime_power(q).ok_or_else(|| {
            KitError::InvalidInput(format!("q = {q} is not a prime power"))
        })?;
        if q > MAX_Q {
            return Err(KitError::InvalidInput(format!(
                "q = {q} exceeds the supported bound {MAX_Q}"
            )));
        }
        let modpoly = if k == 1 {
            None
        } else {
            Some(irreducible_poly(p, k).expect("all prime powers <= 32 are covered"))
        };
        let qi = q as usize;
        let mut add_t = vec![0u16; qi * qi];
        let mut mul_t = vec![0u16; qi * qi];
        let mut neg_t = vec![0u16; qi];
        for x in 0..q {
            let dx = decode(x, p, k);
            let dneg: Vec<u64> = dx.iter().map(|&d| (p - d) % p).collect();
            neg_t[x as usize] = encode(&dneg, p) as u16;
            for y in 0..q {
                let dy = decode(y, p, k);
                let dsum: Vec<u64> = dx.iter().zip(&dy).map(|(&a, &b)| (a + b) % p).collect();
                add_t[(x * q + y) as usize] = encode(&dsum, p) as u16;
                let dprod = match &modpoly {
                    None => vec![(x * y) % p],
                    Some(m) => poly_mul_mod(&dx, &dy, p, m),
                };
                mul_t[(x * q + y) as usize] = encode(&dprod, p) as u16;
            }
        }
        let mut inv_t = vec![0u16; qi];
        for x in 1..qi {
            let row = &mul_t[x * qi..(x + 1) * qi];
            let inv = row.iter().position(|&v| v == 1).expect("field element has inverse");
            inv_t[x] = inv as u16;
        }
        Ok(FqField {
            q: q as u16,
            p: p as u16,
            k,
            add_t,
            mul_t,
            inv_t,
            neg_t,
        })
    }

    pub fn q(&self) -> u64 {
        self.q as u64
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn add(&self, x: u16, y: u16) -> u16 {
        self.add_t[x as usize * self.q as usize + y as usize]
    }

    pub fn neg(&self, x: u16) -> u16 {
        self.neg_t[x as usize]
    }

    pub fn sub(&self, x: u16, y: u16) -> u16 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u16, y: u16) -> u16 {
        self.mul_t[x as usize * self.q as usize + y as usize]
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, x: u16) -> Result<u16> {
        if x == 0 {
            return Err(KitError::InvalidInput("division by zero in GF(q)".into()));
        }
        Ok(self.inv_t[x as usize])
    }

    pub fn div(&self, x: u16, y: u16) -> Result<u16> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: u16, e: u64) -> u16 {
        let mut base = x;
        let mut e = e;
        let mut acc = 1u16;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Embeds an integer through the prime subfield (n mod p).
    pub fn from_int(&self, n: i64) -> u16 {
        n.rem_euclid(self.p as i64) as u16
    }

    /// All element codes, 0 first.
    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.q
    }
}

/// Reduces `mat` in place to reduced row echelon form; returns pivot columns.
pub fn row_reduce(field: &FqField, mat: &mut [Vec<u16>]) -> Vec<usize> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| mat[i][c] != 0) else {
            continue;
        };
        mat.swap(r, pr);
        let scale = field.inv(mat[r][c]).expect("pivot is nonzero");
        for v in mat[r].iter_mut() {
            *v = field.mul(*v, scale);
        }
        for i in 0..rows {
            if i != r && mat[i][c] != 0 {
                let f = mat[i][c];
                for j in 0..cols {
                    let sub = field.mul(f, mat[r][j]);
                    mat[i][j] = field.sub(mat[i][j], sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Rank of a matrix over GF(q).
pub fn rank(field: &FqField, mat: &[Vec<u16>]) -> usize {
    let mut work: Vec<Vec<u16>> = mat.to_vec();
    row_reduce(field, &mut work).len()
}

/// One solution of A·x = b, or `None` if inconsistent.
pub fn solve_linear(field: &FqField, a: &[Vec<u16>], b: &[u16]) -> Option<Vec<u16>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "dimension mismatch");
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<u16>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let pivots = row_reduce(field, &mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![0u16; cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols];
    }
    Some(x)
}

/// Basis of the right kernel {x : A·x = 0}.
pub fn kernel_basis(field: &FqField, a: &[Vec<u16>]) -> Vec<Vec<u16>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut work: Vec<Vec<u16>> = a.to_vec();
    let pivots = row_reduce(field, &mut work);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u16; cols];
        v[free] = 1;
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = field.neg(work[r][free]);
        }
        basis.push(v);
    }
    basis
}
