//! Full root systems generated from a root datum: the closure of the simple
//! roots under simple reflections, with coroots tracked alongside, positive
//! roots marked by nonnegative expansion, and the highest root per
//! irreducible component (whose coroot seeds the affine reflection).

use crate::cartan::components;
use crate::error::{KitError, Result};
use crate::root_datum::RootDatum;
use std::collections::HashMap;

/// One root together with its coroot, in both expansion and ambient
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    /// Coefficients over the simple roots.
    pub expansion: Vec<i64>,
    /// Coefficients of the coroot over the simple coroots.
    pub coroot_expansion: Vec<i64>,
    /// Vector in X^*(T).
    pub vector: Vec<i64>,
    /// Coroot vector in X_*(T).
    pub coroot_vector: Vec<i64>,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.expansion.iter().sum()
    }
}

/// The positive half of a root system plus component bookkeeping.
#[derive(Debug, Clone)]
pub struct RootSystem {
    rank: usize,
    positive: Vec<Root>,
    index_by_vector: HashMap<Vec<i64>, usize>,
    /// Simple-root indices per irreducible component.
    components: Vec<Vec<usize>>,
    /// Index into `positive` of the highest root of each component.
    highest: Vec<usize>,
}

/// Generates the root system of `rd` by breadth-first closure under the
/// simple reflections, working on expansion coefficients.
pub fn generate(rd: &RootDatum) -> Result<RootSystem> {
    let s = rd.num_simple();
    let cartan = rd.cartan();
    let mut seen: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
    let mut queue: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    for j in 0..s {
        let e: Vec<i64> = (0..s).map(|k| i64::from(k == j)).collect();
        seen.insert(e.clone(), e.clone());
        queue.push((e.clone(), e));
    }
    while let Some((c, d)) = queue.pop() {
        for i in 0..s {
            let pair_root: i64 = (0..s).map(|j| cartan[i][j] * c[j]).sum();
            let pair_coroot: i64 = (0..s).map(|k| d[k] * cartan[k][i]).sum();
            let mut c2 = c.clone();
            let mut d2 = d.clone();
            c2[i] -= pair_root;
            d2[i] -= pair_coroot;
            if !seen.contains_key(&c2) {
                seen.insert(c2.clone(), d2.clone());
                queue.push((c2, d2));
            }
            if seen.len() > 10_000 {
                return Err(KitError::BoundExceeded(
                    "root generation exceeded the finite-type bound".into(),
                ));
            }
        }
    }

    let mut positive: Vec<Root> = Vec::new();
    for (c, d) in &seen {
        if c.iter().all(|&v| v >= 0) {
            positive.push(make_root(rd, c, d));
        }
    }
    if positive.len() * 2 != seen.len() {
        return Err(KitError::InvalidInput(
            "root system is not symmetric; invalid datum".into(),
        ));
    }
    // Sort by (height, expansion) for deterministic ordering.
    positive.sort_by(|a, b| (a.height(), &a.expansion).cmp(&(b.height(), &b.expansion)));

    let comps = components(cartan);
    let mut highest = Vec::with_capacity(comps.len());
    for comp in &comps {
        let in_comp = |r: &Root| {
            r.expansion
                .iter()
                .enumerate()
                .all(|(j, &v)| v == 0 || comp.contains(&j))
        };
        let idx = positive
            .iter()
            .enumerate()
            .filter(|(_, r)| in_comp(r))
            .max_by_key(|(_, r)| r.height())
            .map(|(i, _)| i)
            .ok_or_else(|| KitError::InvalidInput("empty component".into()))?;
        let top = positive[idx].height();
        let ties = positive
            .iter()
            .filter(|r| in_comp(r) && r.height() == top)
            .count();
        assert_eq!(ties, 1, "highest root must be unique per component");
        highest.push(idx);
    }

    let index_by_vector = positive
        .iter()
        .enumerate()
        .map(|(i, r)| (r.vector.clone(), i))
        .collect();
    Ok(RootSystem { rank: rd.rank(), positive, index_by_vector, components: comps, highest })
}

fn make_root(rd: &RootDatum, c: &[i64], d: &[i64]) -> Root {
    let rank = rd.rank();
    let mut vector = vec![0i64; rank];
    let mut coroot_vector = vec![0i64; rank];
    for (j, &coef) in c.iter().enumerate() {
        for a in 0..rank {
            vector[a] += coef * rd.simple_roots()[j][a];
        }
    }
    for (k, &coef) in d.iter().enumerate() {
        for a in 0..rank {
            coroot_vector[a] += coef * rd.simple_coroots()[k][a];
        }
    }
    Root {
        expansion: c.to_vec(),
        coroot_expansion: d.to_vec(),
        vector,
        coroot_vector,
    }
}

impl RootSystem {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn positive(&self) -> &[Root] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    /// Index of the positive root with this X^*-vector, if any.
    pub fn index_of_vector(&self, v: &[i64]) -> Option<usize> {
        self.index_by_vector.get(v).copied()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Highest root of each irreducible component, in component order.
    pub fn highest_roots(&self) -> Vec<&Root> {
        self.highest.iter().map(|&i| &self.positive[i]).collect()
    }
}

/// Matrix of the reflection along (root, coroot) acting on X_*(T):
/// λ ↦ λ − ⟨λ, root⟩·coroot.
pub fn reflection_matrix(rank: usize, root: &[i64], coroot: &[i64]) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; rank]; rank];
    for a in 0..rank {
        for b in 0..rank {
            m[a][b] = i64::from(a == b) - coroot[a] * root[b];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::SimpleType;
    use crate::root_datum::{build, pairing, Factor, GroupSpec, Isogeny};

    fn datum(t: SimpleType, rank: usize, isogeny: Isogeny) -> RootDatum {
        build(&GroupSpec {
            factors: vec![Factor { simple_type: t, rank, isogeny }],
            central_torus_rank: 0,
        })
        .unwrap()
    }

    #[test]
    fn positive_root_counts_match_the_classical_formulas() {
        // |Φ⁺| = n(n+1)/2, n², n², n(n−1), 36, 63, 120, 24, 6.
        let cases = [
            (SimpleType::A, 4, 10),
            (SimpleType::B, 3, 9),
            (SimpleType::C, 4, 16),
            (SimpleType::D, 5, 20),
            (SimpleType::E, 6, 36),
            (SimpleType::E, 7, 63),
            (SimpleType::E, 8, 120),
            (SimpleType::F, 4, 24),
            (SimpleType::G, 2, 6),
        ];
        for (t, r, count) in cases {
            let rs = generate(&datum(t, r, Isogeny::Sc)).unwrap();
            assert_eq!(rs.num_positive(), count, "{}{r}", t.letter());
        }
        // Isogeny type does not change the root system.
        let rs = generate(&datum(SimpleType::D, 4, Isogeny::Adjoint)).unwrap();
        assert_eq!(rs.num_positive(), 12);
    }

    #[test]
    fn highest_roots_have_the_classical_expansions() {
        let rs = generate(&datum(SimpleType::A, 2, Isogeny::Sc)).unwrap();
        assert_eq!(rs.highest_roots()[0].expansion, vec![1, 1]);

        let rs = generate(&datum(SimpleType::G, 2, Isogeny::Sc)).unwrap();
        let theta = rs.highest_roots()[0];
        assert_eq!(theta.expansion, vec![3, 2]);
        // θ is long, so θ^∨ is a short coroot: α₁^∨ + 2α₂^∨.
        assert_eq!(theta.coroot_expansion, vec![1, 2]);

        let rs = generate(&datum(SimpleType::B, 2, Isogeny::Sc)).unwrap();
        assert_eq!(rs.highest_roots()[0].expansion, vec![1, 2]);

        let rs = generate(&datum(SimpleType::C, 2, Isogeny::Sc)).unwrap();
        assert_eq!(rs.highest_roots()[0].expansion, vec![2, 1]);
    }

    #[test]
    fn sl2_and_pgl2_theta_vectors() {
        let sc = generate(&datum(SimpleType::A, 1, Isogeny::Sc)).unwrap();
        assert_eq!(sc.highest_roots()[0].vector, vec![2]);
        assert_eq!(sc.highest_roots()[0].coroot_vector, vec![1]);
        let adj = generate(&datum(SimpleType::A, 1, Isogeny::Adjoint)).unwrap();
        assert_eq!(adj.highest_roots()[0].vector, vec![1]);
        assert_eq!(adj.highest_roots()[0].coroot_vector, vec![2]);
    }

    #[test]
    fn products_split_into_components() {
        let spec = GroupSpec::parse("A1:sc x A2:adjoint +T1").unwrap();
        let rd = build(&spec).unwrap();
        let rs = generate(&rd).unwrap();
        assert_eq!(rs.components().len(), 2);
        assert_eq!(rs.num_positive(), 1 + 3);
        assert_eq!(rs.highest_roots().len(), 2);
    }

    #[test]
    fn pairings_against_coroots_are_cartan_like() {
        // Every pair (root, coroot) of the same root pairs to 2.
        let rs = generate(&datum(SimpleType::F, 4, Isogeny::Sc)).unwrap();
        for r in rs.positive() {
            assert_eq!(pairing(&r.coroot_vector, &r.vector), 2);
        }
    }

    #[test]
    fn reflection_matrices_are_involutions() {
        let rd = datum(SimpleType::B, 3, Isogeny::Adjoint);
        let rs = generate(&rd).unwrap();
        for r in rs.positive() {
            let m = reflection_matrix(rd.rank(), &r.vector, &r.coroot_vector);
            // m² = identity.
            for a in 0..rd.rank() {
                for b in 0..rd.rank() {
                    let mut acc = 0i64;
                    for k in 0..rd.rank() {
                        acc += m[a][k] * m[k][b];
                    }
                    assert_eq!(acc, i64::from(a == b));
                }
            }
        }
    }

    #[test]
    fn torus_has_empty_root_system() {
        let rd = build(&GroupSpec { factors: vec![], central_torus_rank: 2 }).unwrap();
        let rs = generate(&rd).unwrap();
        assert_eq!(rs.num_positive(), 0);
        assert!(rs.components().is_empty());
    }
}
