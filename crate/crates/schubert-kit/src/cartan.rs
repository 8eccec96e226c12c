//! Hard-coded Cartan matrices for the finite types A-G in Bourbaki numbering.
//!
//! The convention throughout the crate is `cartan[i][j] = <coroot_i, root_j>`,
//! i.e. row `i` lists the pairings of the i-th simple coroot against all
//! simple roots. Diagonal entries are 2 and the matrix of each irreducible
//! block has positive-definite symmetrization, which `validate_cartan` checks
//! exactly.

use crate::error::{KitError, Result};
use serde::{Deserialize, Serialize};

/// Irreducible finite type labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimpleType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl SimpleType {
    pub fn letter(self) -> char {
        match self {
            SimpleType::A => 'A',
            SimpleType::B => 'B',
            SimpleType::C => 'C',
            SimpleType::D => 'D',
            SimpleType::E => 'E',
            SimpleType::F => 'F',
            SimpleType::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'A' => Some(SimpleType::A),
            'B' => Some(SimpleType::B),
            'C' => Some(SimpleType::C),
            'D' => Some(SimpleType::D),
            'E' => Some(SimpleType::E),
            'F' => Some(SimpleType::F),
            'G' => Some(SimpleType::G),
            _ => None,
        }
    }

    /// Rank bounds: A >= 1, B/C >= 2, D >= 3, E in {6,7,8}, F = 4, G = 2.
    pub fn rank_ok(self, rank: usize) -> bool {
        match self {
            SimpleType::A => rank >= 1,
            SimpleType::B | SimpleType::C => rank >= 2,
            SimpleType::D => rank >= 3,
            SimpleType::E => (6..=8).contains(&rank),
            SimpleType::F => rank == 4,
            SimpleType::G => rank == 2,
        }
    }

    /// Cartan matrix in the row-coroot convention described in the module docs.
    pub fn cartan_matrix(self, rank: usize) -> Result<Vec<Vec<i64>>> {
        if !self.rank_ok(rank) {
            return Err(KitError::InvalidSpec(format!(
                "rank {rank} is out of range for type {}",
                self.letter()
            )));
        }
        let n = rank;
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 2;
        }
        let single = |m: &mut Vec<Vec<i64>>, i: usize, j: usize| {
            m[i][j] = -1;
            m[j][i] = -1;
        };
        match self {
            SimpleType::A => {
                for i in 0..n.saturating_sub(1) {
                    single(&mut m, i, i + 1);
                }
            }
            SimpleType::B => {
                // Last simple root is short; its coroot pairs to -2 with the neighbor.
                for i in 0..n - 2 {
                    single(&mut m, i, i + 1);
                }
                m[n - 2][n - 1] = -1;
                m[n - 1][n - 2] = -2;
            }
            SimpleType::C => {
                // Last simple root is long.
                for i in 0..n - 2 {
                    single(&mut m, i, i + 1);
                }
                m[n - 2][n - 1] = -2;
                m[n - 1][n - 2] = -1;
            }
            SimpleType::D => {
                for i in 0..n - 2 {
                    single(&mut m, i, i + 1);
                }
                single(&mut m, n - 3, n - 1);
            }
            SimpleType::E => {
                // Bourbaki: branch node is 4 (1-based); node 2 hangs off it.
                let edges: &[(usize, usize)] = match n {
                    6 => &[(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)],
                    7 => &[(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 3)],
                    8 => &[(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)],
                    _ => unreachable!(),
                };
                for &(i, j) in edges {
                    single(&mut m, i, j);
                }
            }
            SimpleType::F => {
                single(&mut m, 0, 1);
                m[1][2] = -1;
                m[2][1] = -2;
                single(&mut m, 2, 3);
            }
            SimpleType::G => {
                // First simple root short: its coroot pairs to -3.
                m[0][1] = -3;
                m[1][0] = -1;
            }
        }
        debug_assert!(validate_cartan(&m).is_ok());
        Ok(m)
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination over i128.
pub fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| {
            assert_eq!(r.len(), n, "determinant needs a square matrix");
            r.iter().map(|&v| v as i128).collect()
        })
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j]).expect("overflow")))
                    .expect("overflow in exact determinant");
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Checks that `m` is a valid Cartan matrix of finite type: 2s on the
/// diagonal, non-positive integers off it, zeros paired symmetrically, and a
/// positive-definite symmetrization per irreducible block.
pub fn validate_cartan(m: &[Vec<i64>]) -> Result<()> {
    let n = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(KitError::InvalidInput("cartan matrix is not square".into()));
        }
        if row[i] != 2 {
            return Err(KitError::InvalidInput(format!("cartan[{i}][{i}] must be 2")));
        }
        for (j, &v) in row.iter().enumerate() {
            if i != j {
                if v > 0 {
                    return Err(KitError::InvalidInput(format!(
                        "cartan[{i}][{j}] = {v} must be non-positive"
                    )));
                }
                if (v == 0) != (m[j][i] == 0) {
                    return Err(KitError::InvalidInput(format!(
                        "cartan[{i}][{j}] and cartan[{j}][{i}] must vanish together"
                    )));
                }
            }
        }
    }

    for block in components(m) {
        // Symmetrizer: positive integers d with d[i]*m[i][j] == d[j]*m[j][i],
        // found by spanning-tree propagation of the ratios.
        let k = block.len();
        let mut d = vec![0i128; k];
        d[0] = 1;
        let mut queue = vec![0usize];
        while let Some(u) = queue.pop() {
            for v in 0..k {
                if v == u || d[v] != 0 {
                    continue;
                }
                let (gi, gj) = (block[u], block[v]);
                if m[gi][gj] == 0 {
                    continue;
                }
                // d[v] / d[u] = |m[u][v]| / |m[v][u]| (both entries are negative).
                let a_uv = (m[gi][gj] as i128).abs();
                let a_vu = (m[gj][gi] as i128).abs();
                let num0 = d[u] * a_uv;
                let g = gcd_i128(num0, a_vu);
                let den = a_vu / g;
                if den > 1 {
                    for x in d.iter_mut() {
                        if *x != 0 {
                            *x *= den;
                        }
                    }
                }
                d[v] = num0 / g;
                queue.push(v);
            }
        }
        if d.iter().any(|&x| x <= 0) {
            return Err(KitError::InvalidInput("cartan matrix is not symmetrizable".into()));
        }
        // Positive definiteness of the symmetrized block via leading minors.
        for lead in 1..=k {
            let sub: Vec<Vec<i64>> = (0..lead)
                .map(|i| {
                    (0..lead)
                        .map(|j| {
                            let v = d[i] * m[block[i]][block[j]] as i128;
                            i64::try_from(v).expect("symmetrizer overflow")
                        })
                        .collect()
                })
                .collect();
            for i in 0..lead {
                for j in 0..lead {
                    if sub[i][j] != sub[j][i] {
                        return Err(KitError::InvalidInput(
                            "cartan symmetrization failed".into(),
                        ));
                    }
                }
            }
            if determinant(&sub) <= 0 {
                return Err(KitError::InvalidInput(
                    "cartan matrix is not of finite type (non-positive minor)".into(),
                ));
            }
        }
    }
    Ok(())
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Connected components of the Cartan graph (indices into the matrix).
pub fn components(m: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let n = m.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && m[u][v] != 0 {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants_match_the_classical_table() {
        let table: &[(SimpleType, usize, i128)] = &[
            (SimpleType::A, 1, 2),
            (SimpleType::A, 5, 6),
            (SimpleType::B, 2, 2),
            (SimpleType::B, 6, 2),
            (SimpleType::C, 3, 2),
            (SimpleType::D, 4, 4),
            (SimpleType::D, 7, 4),
            (SimpleType::E, 6, 3),
            (SimpleType::E, 7, 2),
            (SimpleType::E, 8, 1),
            (SimpleType::F, 4, 1),
            (SimpleType::G, 2, 1),
        ];
        for &(t, rank, det) in table {
            let m = t.cartan_matrix(rank).unwrap();
            assert_eq!(determinant(&m), det, "{}{}", t.letter(), rank);
        }
    }

    #[test]
    fn every_builtin_matrix_validates() {
        let mut cases = vec![
            (SimpleType::E, 6),
            (SimpleType::E, 7),
            (SimpleType::E, 8),
            (SimpleType::F, 4),
            (SimpleType::G, 2),
        ];
        for r in 1..=8 {
            cases.push((SimpleType::A, r));
        }
        for r in 2..=8 {
            cases.push((SimpleType::B, r));
            cases.push((SimpleType::C, r));
        }
        for r in 3..=8 {
            cases.push((SimpleType::D, r));
        }
        for (t, r) in cases {
            let m = t.cartan_matrix(r).unwrap();
            validate_cartan(&m).unwrap();
        }
    }

    #[test]
    fn rank_bounds_are_enforced() {
        assert!(SimpleType::E.cartan_matrix(5).is_err());
        assert!(SimpleType::F.cartan_matrix(3).is_err());
        assert!(SimpleType::G.cartan_matrix(3).is_err());
        assert!(SimpleType::B.cartan_matrix(1).is_err());
        assert!(SimpleType::D.cartan_matrix(2).is_err());
    }

    #[test]
    fn affine_style_matrix_is_rejected() {
        // The rank-2 affine matrix has determinant 0 and must fail validation.
        let m = vec![vec![2, -2], vec![-2, 2]];
        assert!(validate_cartan(&m).is_err());
    }

    #[test]
    fn asymmetric_types_transpose_into_each_other() {
        let b3 = SimpleType::B.cartan_matrix(3).unwrap();
        let c3 = SimpleType::C.cartan_matrix(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(b3[i][j], c3[j][i]);
            }
        }
    }
}
