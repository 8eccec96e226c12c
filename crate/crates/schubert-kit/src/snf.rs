//! Smith normal form over the integers with exact big-integer arithmetic.
//!
//! The decomposition returns unimodular transforms together with their
//! inverses so callers can re-multiply and compare against the input matrix;
//! `verify` performs exactly that check. Pivots are chosen by least absolute
//! value to keep intermediate entries small.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix with big-integer entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IMat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    /// Columns are the given vectors.
    pub fn from_columns(cols: &[Vec<i64>], rows: usize) -> Self {
        let mut m = IMat::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Determinant by cofactor expansion; transforms are small, so this is fine.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return self[(0, 0)].clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if self[(0, j)].is_zero() {
                continue;
            }
            let mut minor = IMat::zero(n - 1, n - 1);
            for i in 1..n {
                let mut cj = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    minor[(i - 1, cj)] = self[(i, k)].clone();
                    cj += 1;
                }
            }
            let term = &self[(0, j)] * minor.det();
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        let c = self.cols;
        &mut self.data[i * c + j]
    }
}

/// Result of `smith_normal_form`: `left * a * right == diag` with both
/// transforms unimodular, and `left_inv * diag * right_inv == a`.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub diag: Vec<BigInt>,
    pub left: IMat,
    pub right: IMat,
    pub left_inv: IMat,
    pub right_inv: IMat,
    rows: usize,
    cols: usize,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries (the invariant factors of the cokernel
    /// together with trailing ones), in divisibility order.
    pub fn nonzero_diagonal(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn diag_matrix(&self) -> IMat {
        let mut m = IMat::zero(self.rows, self.cols);
        for (i, d) in self.diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Re-multiplies the transforms against the input and checks unimodularity.
    pub fn verify(&self, a: &IMat) -> bool {
        let lar = self.left.mul(a).mul(&self.right);
        if lar != self.diag_matrix() {
            return false;
        }
        if self.left_inv.mul(&self.diag_matrix()).mul(&self.right_inv) != *a {
            return false;
        }
        let one = BigInt::one();
        let minus_one = -BigInt::one();
        let dl = self.left.det();
        let dr = self.right.det();
        (dl == one || dl == minus_one) && (dr == one || dr == minus_one)
            && self.left.mul(&self.left_inv) == IMat::identity(self.rows)
            && self.right.mul(&self.right_inv) == IMat::identity(self.cols)
    }
}

struct Worker {
    m: IMat,
    left: IMat,
    left_inv: IMat,
    right: IMat,
    right_inv: IMat,
}

impl Worker {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.m.cols {
            let t = self.m[(a, j)].clone();
            self.m[(a, j)] = self.m[(b, j)].clone();
            self.m[(b, j)] = t;
        }
        for j in 0..self.left.cols {
            let t = self.left[(a, j)].clone();
            self.left[(a, j)] = self.left[(b, j)].clone();
            self.left[(b, j)] = t;
        }
        // Right-multiplying the inverse by the swap exchanges its columns.
        for i in 0..self.left_inv.rows {
            let t = self.left_inv[(i, a)].clone();
            self.left_inv[(i, a)] = self.left_inv[(i, b)].clone();
            self.left_inv[(i, b)] = t;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.m.rows {
            let t = self.m[(i, a)].clone();
            self.m[(i, a)] = self.m[(i, b)].clone();
            self.m[(i, b)] = t;
        }
        for i in 0..self.right.rows {
            let t = self.right[(i, a)].clone();
            self.right[(i, a)] = self.right[(i, b)].clone();
            self.right[(i, b)] = t;
        }
        for j in 0..self.right_inv.cols {
            let t = self.right_inv[(a, j)].clone();
            self.right_inv[(a, j)] = self.right_inv[(b, j)].clone();
            self.right_inv[(b, j)] = t;
        }
    }

    /// row[dst] += c * row[src]; inverse transform gets column update col[src] -= c * col[dst].
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.m.cols {
            let t = c * &self.m[(src, j)];
            self.m[(dst, j)] += t;
        }
        for j in 0..self.left.cols {
            let t = c * &self.left[(src, j)];
            self.left[(dst, j)] += t;
        }
        for i in 0..self.left_inv.rows {
            let t = c * &self.left_inv[(i, dst)];
            self.left_inv[(i, src)] -= t;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.m.rows {
            let t = c * &self.m[(i, src)];
            self.m[(i, dst)] += t;
        }
        for i in 0..self.right.rows {
            let t = c * &self.right[(i, src)];
            self.right[(i, dst)] += t;
        }
        for j in 0..self.right_inv.cols {
            let t = c * &self.right_inv[(dst, j)];
            self.right_inv[(src, j)] -= t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.m.cols {
            let t = -self.m[(r, j)].clone();
            self.m[(r, j)] = t;
        }
        for j in 0..self.left.cols {
            let t = -self.left[(r, j)].clone();
            self.left[(r, j)] = t;
        }
        for i in 0..self.left_inv.rows {
            let t = -self.left_inv[(i, r)].clone();
            self.left_inv[(i, r)] = t;
        }
    }
}

/// Computes the Smith normal form of `a` with validated transforms.
pub fn smith_normal_form(a: &IMat) -> SmithDecomposition {
    let rows = a.rows;
    let cols = a.cols;
    let mut w = Worker {
        m: a.clone(),
        left: IMat::identity(rows),
        left_inv: IMat::identity(rows),
        right: IMat::identity(cols),
        right_inv: IMat::identity(cols),
    };

    let n = rows.min(cols);
    for k in 0..n {
        loop {
            // Pivot: least nonzero absolute value in the trailing block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if w.m[(i, j)].is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some(p) => w.m[(i, j)].abs() < w.m[p].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            w.swap_rows(k, pi);
            w.swap_cols(k, pj);

            let mut clean = true;
            for i in (k + 1)..rows {
                if !w.m[(i, k)].is_zero() {
                    let q = -(&w.m[(i, k)] / &w.m[(k, k)]);
                    w.add_row(i, k, &q);
                    if !w.m[(i, k)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in (k + 1)..cols {
                if !w.m[(k, j)].is_zero() {
                    let q = -(&w.m[(k, j)] / &w.m[(k, k)]);
                    w.add_col(j, k, &q);
                    if !w.m[(k, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
    }

    // Repair the divisibility chain d1 | d2 | ... by folding offenders together.
    loop {
        let mut fixed = true;
        for k in 0..n.saturating_sub(1) {
            let a_k = w.m[(k, k)].clone();
            let b_k = w.m[(k + 1, k + 1)].clone();
            if a_k.is_zero() || b_k.is_zero() || (&b_k % &a_k).is_zero() {
                continue;
            }
            fixed = false;
            // Put both entries in one 2x2 corner and re-reduce it.
            w.add_col(k, k + 1, &BigInt::one());
            loop {
                let (p, q) = (w.m[(k, k)].clone(), w.m[(k + 1, k)].clone());
                if q.is_zero() {
                    break;
                }
                if p.is_zero() || q.abs() < p.abs() {
                    w.swap_rows(k, k + 1);
                    continue;
                }
                let c = -(&q / &p);
                w.add_row(k + 1, k, &c);
            }
            let q = -(&w.m[(k, k + 1)] / &w.m[(k, k)]);
            w.add_col(k + 1, k, &q);
            debug_assert!(w.m[(k, k + 1)].is_zero());
        }
        if fixed {
            break;
        }
    }

    for k in 0..n {
        if w.m[(k, k)].is_negative() {
            w.negate_row(k);
        }
    }

    let diag = (0..n).map(|k| w.m[(k, k)].clone()).collect();
    let out = SmithDecomposition {
        diag,
        left: w.left,
        right: w.right,
        left_inv: w.left_inv,
        right_inv: w.right_inv,
        rows,
        cols,
    };
    assert!(out.verify(a), "smith normal form failed self-validation");
    out
}

/// Solves `a · x = b` exactly over the integers; `None` when no integral
/// solution exists.
pub fn solve_integer(a: &IMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "dimension mismatch");
    let dec = smith_normal_form(a);
    // a = left_inv · diag · right_inv, so diag · (right_inv · x) = left · b.
    let ub = dec.left.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, target) in ub.iter().enumerate() {
        let d = dec.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !target.is_zero() {
                return None;
            }
        } else {
            if (target % &d) != BigInt::zero() {
                return None;
            }
            y[i] = target / &d;
        }
    }
    Some(dec.right.mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_i64(s: &SmithDecomposition) -> Vec<i64> {
        s.diag.iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn diagonalizes_small_matrix() {
        let a = IMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let s = smith_normal_form(&a);
        assert_eq!(diag_i64(&s), vec![2, 2, 156]);
        assert!(s.verify(&a));
    }

    #[test]
    fn cartan_a3_gives_single_factor_four() {
        let a = IMat::from_rows(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        let s = smith_normal_form(&a);
        assert_eq!(diag_i64(&s), vec![1, 1, 4]);
    }

    #[test]
    fn cartan_d4_gives_two_factors_of_two() {
        let a = IMat::from_rows(&[
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ]);
        let s = smith_normal_form(&a);
        assert_eq!(diag_i64(&s), vec![1, 1, 2, 2]);
    }

    #[test]
    fn handles_rectangular_and_rank_deficient() {
        let a = IMat::from_rows(&[vec![2, 0], vec![0, 0], vec![4, 0]]);
        let s = smith_normal_form(&a);
        assert_eq!(diag_i64(&s), vec![2, 0]);
        assert!(s.verify(&a));
    }

    #[test]
    fn transform_validation_catches_tampering() {
        let a = IMat::from_rows(&[vec![6, 4], vec![2, 8]]);
        let mut s = smith_normal_form(&a);
        s.diag[0] += BigInt::one();
        assert!(!s.verify(&a));
    }

    #[test]
    fn integer_solve_round_trips_and_rejects() {
        let a = IMat::from_rows(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        let known: Vec<BigInt> = [1, 2, 3].iter().map(|&v| BigInt::from(v)).collect();
        let b = a.mul_vec(&known);
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);

        // det = 4, so (1,1,1) is not in the image over Z.
        let odd: Vec<BigInt> = vec![BigInt::one(); 3];
        assert!(solve_integer(&a, &odd).is_none());

        // 2x = 1 has no integer solution.
        let a2 = IMat::from_rows(&[vec![2]]);
        assert!(solve_integer(&a2, &[BigInt::one()]).is_none());

        // Inconsistent overdetermined system.
        let a3 = IMat::from_rows(&[vec![1], vec![1]]);
        let b3 = [BigInt::from(1), BigInt::from(2)];
        assert!(solve_integer(&a3, &b3).is_none());
    }
}
