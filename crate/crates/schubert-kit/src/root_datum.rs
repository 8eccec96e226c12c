//! Root data for products of Chevalley groups in any isogeny type, plus the
//! lattice quotients attached to them: the fundamental group X_*(T)/Q^∨, its
//! derived-group torsion part, and the kernel of the simply-connected cover.
//!
//! Coordinates: X_*(T) ≅ Z^rank with the basis chosen per factor (coroots for
//! `sc`, fundamental coweights for `adjoint`, user rows for `intermediate`);
//! X^*(T) carries the dual basis, so pairings are plain dot products.

use crate::cartan::{validate_cartan, SimpleType};
use crate::error::{KitError, Result};
use crate::snf::{smith_normal_form, solve_integer, IMat};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Choice of cocharacter lattice for one simple factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Isogeny {
    Sc,
    Adjoint,
    /// Rows are a basis of a lattice between Q^∨ and P^∨, in fundamental
    /// coweight coordinates.
    Intermediate(Vec<Vec<i64>>),
}

/// One simple factor of a group specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub simple_type: SimpleType,
    pub rank: usize,
    pub isogeny: Isogeny,
}

/// A product of simple Chevalley factors extended by a central torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub factors: Vec<Factor>,
    #[serde(default)]
    pub central_torus_rank: usize,
}

impl GroupSpec {
    /// Parses the text grammar `<Type><rank>:<sc|adjoint>` joined by `x`,
    /// with an optional trailing `+T<r>` central torus, e.g.
    /// `A3:adjoint x D4:sc +T1`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut body = text.trim();
        let mut central_torus_rank = 0usize;
        if let Some(pos) = body.find('+') {
            let torus = body[pos + 1..].trim();
            let digits = torus.strip_prefix('T').ok_or_else(|| {
                KitError::InvalidSpec(format!("expected +T<r> after '+', got '+{torus}'"))
            })?;
            central_torus_rank = digits.parse().map_err(|_| {
                KitError::InvalidSpec(format!("bad central torus rank '{digits}'"))
            })?;
            body = body[..pos].trim();
        }
        let mut factors = Vec::new();
        if !body.is_empty() {
            for part in body.split('x') {
                factors.push(Self::parse_factor(part.trim())?);
            }
        }
        if factors.is_empty() && central_torus_rank == 0 {
            return Err(KitError::InvalidSpec(format!("empty group spec '{text}'")));
        }
        Ok(GroupSpec { factors, central_torus_rank })
    }

    fn parse_factor(part: &str) -> Result<Factor> {
        let err = || KitError::InvalidSpec(format!("bad factor '{part}' (want e.g. 'D4:sc')"));
        let mut chars = part.chars();
        let letter = chars.next().ok_or_else(err)?;
        let simple_type = SimpleType::from_letter(letter).ok_or_else(err)?;
        let rest = chars.as_str();
        let (digits, iso) = rest.split_once(':').ok_or_else(err)?;
        let rank: usize = digits.parse().map_err(|_| err())?;
        let isogeny = match iso.trim() {
            "sc" => Isogeny::Sc,
            "adjoint" => Isogeny::Adjoint,
            other => {
                return Err(KitError::InvalidSpec(format!(
                    "unknown isogeny '{other}' (want 'sc' or 'adjoint')"
                )))
            }
        };
        if !simple_type.rank_ok(rank) {
            return Err(KitError::InvalidSpec(format!(
                "rank {rank} is out of range for type {letter}"
            )));
        }
        Ok(Factor { simple_type, rank, isogeny })
    }

    /// The same factors with every isogeny replaced by `sc`.
    pub fn sc_variant(&self) -> GroupSpec {
        GroupSpec {
            factors: self
                .factors
                .iter()
                .map(|f| Factor { isogeny: Isogeny::Sc, ..f.clone() })
                .collect(),
            central_torus_rank: self.central_torus_rank,
        }
    }
}

/// Integer-lattice presentation of a split reductive group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    rank: usize,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
    cartan: Vec<Vec<i64>>,
}

impl RootDatum {
    /// Builds a root datum from raw vectors, checking all structural
    /// invariants (valid finite-type pairing matrix, linear independence).
    pub fn new(
        rank: usize,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let s = simple_roots.len();
        if simple_coroots.len() != s {
            return Err(KitError::InvalidInput(
                "simple root and coroot counts differ".into(),
            ));
        }
        if s > rank {
            return Err(KitError::InvalidInput(
                "more simple roots than the rank of the torus".into(),
            ));
        }
        for v in simple_roots.iter().chain(simple_coroots.iter()) {
            if v.len() != rank {
                return Err(KitError::InvalidInput(
                    "root/coroot vector length differs from rank".into(),
                ));
            }
        }
        let cartan: Vec<Vec<i64>> = (0..s)
            .map(|i| {
                (0..s)
                    .map(|j| pairing(&simple_coroots[i], &simple_roots[j]))
                    .collect()
            })
            .collect();
        validate_cartan(&cartan)?;
        for (name, vecs) in [("roots", &simple_roots), ("coroots", &simple_coroots)] {
            if rational_rank(vecs) != s {
                return Err(KitError::InvalidInput(format!(
                    "simple {name} are linearly dependent"
                )));
            }
        }
        Ok(RootDatum { rank, simple_roots, simple_coroots, cartan })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn simple_roots(&self) -> &[Vec<i64>] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Vec<i64>] {
        &self.simple_coroots
    }

    /// Pairing matrix `cartan[i][j] = <coroot_i, root_j>`.
    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn num_simple(&self) -> usize {
        self.simple_roots.len()
    }
}

/// `<coroot, root>` under the dual-bases convention: a dot product.
pub fn pairing(coroot: &[i64], root: &[i64]) -> i64 {
    coroot
        .iter()
        .zip(root)
        .map(|(&a, &b)| a.checked_mul(b).expect("pairing overflow"))
        .fold(0i64, |acc, t| acc.checked_add(t).expect("pairing overflow"))
}

fn rational_rank(vecs: &[Vec<i64>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    let m = IMat::from_rows(vecs);
    smith_normal_form(&m).diag.iter().filter(|d| !d.is_zero()).count()
}

/// Constructs the root datum described by `spec` (block-diagonal factors,
/// then free central-torus coordinates).
pub fn build(spec: &GroupSpec) -> Result<RootDatum> {
    let total_rank: usize =
        spec.factors.iter().map(|f| f.rank).sum::<usize>() + spec.central_torus_rank;
    let mut simple_roots: Vec<Vec<i64>> = Vec::new();
    let mut simple_coroots: Vec<Vec<i64>> = Vec::new();
    let mut offset = 0usize;
    for factor in &spec.factors {
        let c = factor.simple_type.cartan_matrix(factor.rank)?;
        let r = factor.rank;
        let (local_roots, local_coroots) = match &factor.isogeny {
            Isogeny::Sc => {
                // Basis = simple coroots: coroot_i = e_i, root_j = column j of C.
                let roots = (0..r).map(|j| (0..r).map(|i| c[i][j]).collect()).collect();
                let coroots = (0..r)
                    .map(|i| (0..r).map(|k| i64::from(k == i)).collect())
                    .collect();
                (roots, coroots)
            }
            Isogeny::Adjoint => {
                // Basis = fundamental coweights: root_j = e_j, coroot_i = row i of C.
                let roots = (0..r)
                    .map(|j| (0..r).map(|k| i64::from(k == j)).collect())
                    .collect();
                let coroots = c.clone();
                (roots, coroots)
            }
            Isogeny::Intermediate(m) => intermediate_datum(&c, m)?,
        };
        for v in local_roots {
            simple_roots.push(embed(&v, offset, total_rank));
        }
        for v in local_coroots {
            simple_coroots.push(embed(&v, offset, total_rank));
        }
        offset += r;
    }
    RootDatum::new(total_rank, simple_roots, simple_coroots)
}

fn embed(v: &[i64], offset: usize, total: usize) -> Vec<i64> {
    let mut out = vec![0i64; total];
    out[offset..offset + v.len()].copy_from_slice(v);
    out
}

/// Roots/coroots in the basis given by the rows of `m` (fundamental coweight
/// coordinates). Rows must span a lattice containing every coroot row of `c`.
fn intermediate_datum(
    c: &[Vec<i64>],
    m: &[Vec<i64>],
) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let r = c.len();
    if m.len() != r || m.iter().any(|row| row.len() != r) {
        return Err(KitError::InvalidSpec(format!(
            "intermediate matrix must be {r}x{r} for this factor"
        )));
    }
    // Coordinates of a coweight v relative to the rows of m solve mᵀ x = v.
    let mt = {
        let mut t = vec![vec![0i64; r]; r];
        for i in 0..r {
            for j in 0..r {
                t[j][i] = m[i][j];
            }
        }
        IMat::from_rows(&t)
    };
    let mut coroots = Vec::with_capacity(r);
    for row in c {
        let b: Vec<BigInt> = row.iter().map(|&v| BigInt::from(v)).collect();
        let x = solve_integer(&mt, &b).ok_or_else(|| {
            KitError::InvalidSpec(
                "intermediate matrix does not span a lattice containing the coroots".into(),
            )
        })?;
        let xi: Option<Vec<i64>> = x.iter().map(|v| v.to_i64()).collect();
        coroots.push(xi.ok_or_else(|| {
            KitError::InvalidSpec("intermediate coroot coordinates overflow i64".into())
        })?);
    }
    // Root j pairs with basis row k as <row_k, α_j> = m[k][j]: column j of m.
    let roots: Vec<Vec<i64>> = (0..r)
        .map(|j| (0..r).map(|k| m[k][j]).collect())
        .collect();
    for (i, coroot) in coroots.iter().enumerate() {
        for (j, root) in roots.iter().enumerate() {
            debug_assert_eq!(pairing(coroot, root), c[i][j]);
        }
    }
    Ok((roots, coroots))
}

/// Finite abelian group in invariant-factor form `Z/d₁ × … × Z/d_m × Z^free`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    /// Divisibility chain d₁ | d₂ | …, every factor ≥ 2.
    pub invariant_factors: Vec<u64>,
    pub free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup { invariant_factors: Vec::new(), free_rank: 0 }
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the group; `None` when infinite.
    pub fn order(&self) -> Option<u128> {
        if self.free_rank > 0 {
            return None;
        }
        Some(
            self.invariant_factors
                .iter()
                .fold(1u128, |acc, &d| acc.checked_mul(d as u128).expect("order overflow")),
        )
    }

    /// Ascending list of primes dividing the order (empty for trivial).
    pub fn prime_divisors(&self) -> Vec<u64> {
        let mut primes = Vec::new();
        for &d in &self.invariant_factors {
            let mut n = d;
            let mut p = 2u64;
            while p * p <= n {
                if n % p == 0 {
                    if !primes.contains(&p) {
                        primes.push(p);
                    }
                    while n % p == 0 {
                        n /= p;
                    }
                }
                p += 1;
            }
            if n > 1 && !primes.contains(&n) {
                primes.push(n);
            }
        }
        primes.sort_unstable();
        primes
    }
}

fn quotient_by_coroots(rd: &RootDatum) -> FiniteAbelianGroup {
    let s = rd.num_simple();
    if s == 0 {
        return FiniteAbelianGroup { invariant_factors: Vec::new(), free_rank: rd.rank() };
    }
    let m = IMat::from_columns(rd.simple_coroots(), rd.rank());
    let dec = smith_normal_form(&m);
    let invariant_factors: Vec<u64> = dec
        .diag
        .iter()
        .filter(|d| d > &&BigInt::from(1))
        .map(|d| d.to_u64().expect("invariant factor exceeds u64"))
        .collect();
    FiniteAbelianGroup { invariant_factors, free_rank: rd.rank() - s }
}

/// π₁ as the quotient X_*(T)/Q^∨ in invariant-factor form.
pub fn pi1(rd: &RootDatum) -> FiniteAbelianGroup {
    quotient_by_coroots(rd)
}

/// π₁ of the derived group: the torsion part of X_*(T)/Q^∨ (equivalently the
/// quotient of the saturation of Q^∨ by Q^∨). Always finite.
pub fn derived_pi1(rd: &RootDatum) -> FiniteAbelianGroup {
    FiniteAbelianGroup { invariant_factors: quotient_by_coroots(rd).invariant_factors, free_rank: 0 }
}

/// True iff the simple coroots span the full cocharacter lattice rationally.
pub fn is_semisimple(rd: &RootDatum) -> bool {
    rd.num_simple() == rd.rank()
}

/// Kernel of the simply-connected cover, as a product of μ_{d_i} — the same
/// invariant factors as π₁. Requires a semisimple datum.
pub fn isogeny_kernel(rd: &RootDatum) -> Result<FiniteAbelianGroup> {
    if !is_semisimple(rd) {
        return Err(KitError::NotSemisimple(
            "isogeny kernel needs a semisimple root datum".into(),
        ));
    }
    Ok(pi1(rd))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(t: SimpleType, rank: usize, isogeny: Isogeny) -> GroupSpec {
        GroupSpec { factors: vec![Factor { simple_type: t, rank, isogeny }], central_torus_rank: 0 }
    }

    #[test]
    fn sl2_and_pgl2_vectors() {
        let sc = build(&simple(SimpleType::A, 1, Isogeny::Sc)).unwrap();
        assert_eq!(sc.simple_coroots(), &[vec![1]]);
        assert_eq!(sc.simple_roots(), &[vec![2]]);
        let adj = build(&simple(SimpleType::A, 1, Isogeny::Adjoint)).unwrap();
        assert_eq!(adj.simple_coroots(), &[vec![2]]);
        assert_eq!(adj.simple_roots(), &[vec![1]]);
    }

    #[test]
    fn sl3_with_central_torus() {
        let spec = GroupSpec {
            factors: vec![Factor { simple_type: SimpleType::A, rank: 2, isogeny: Isogeny::Sc }],
            central_torus_rank: 1,
        };
        let rd = build(&spec).unwrap();
        assert_eq!(rd.rank(), 3);
        assert_eq!(rd.num_simple(), 2);
        assert_eq!(rd.simple_coroots(), &[vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(rd.simple_roots(), &[vec![2, -1, 0], vec![-1, 2, 0]]);
        assert!(!is_semisimple(&rd));
    }

    #[test]
    fn pi1_of_classical_quotients() {
        // Simply connected groups have trivial fundamental group.
        for n in 1..=4 {
            let rd = build(&simple(SimpleType::A, n, Isogeny::Sc)).unwrap();
            assert!(pi1(&rd).is_trivial(), "A{n} sc");
        }
        let pgl2 = build(&simple(SimpleType::A, 1, Isogeny::Adjoint)).unwrap();
        assert_eq!(pi1(&pgl2).invariant_factors, vec![2]);
        let d4 = build(&simple(SimpleType::D, 4, Isogeny::Adjoint)).unwrap();
        assert_eq!(pi1(&d4).invariant_factors, vec![2, 2]);
        let a3 = build(&simple(SimpleType::A, 3, Isogeny::Adjoint)).unwrap();
        assert_eq!(pi1(&a3).invariant_factors, vec![4]);
    }

    #[test]
    fn adjoint_pi1_order_equals_cartan_determinant() {
        // Independent oracle: |X_*/Q^∨| for the adjoint datum is the index
        // [P^∨ : Q^∨], which is the Cartan determinant.
        let cases = [
            (SimpleType::A, 5),
            (SimpleType::B, 4),
            (SimpleType::C, 3),
            (SimpleType::D, 5),
            (SimpleType::E, 6),
            (SimpleType::E, 7),
            (SimpleType::E, 8),
            (SimpleType::F, 4),
            (SimpleType::G, 2),
        ];
        for (t, r) in cases {
            let rd = build(&simple(t, r, Isogeny::Adjoint)).unwrap();
            let det = crate::cartan::determinant(&t.cartan_matrix(r).unwrap());
            assert_eq!(pi1(&rd).order(), Some(det as u128), "{}{r}", t.letter());
        }
    }

    #[test]
    fn derived_pi1_strips_the_torus() {
        let gl_like = GroupSpec {
            factors: vec![Factor {
                simple_type: SimpleType::A,
                rank: 1,
                isogeny: Isogeny::Adjoint,
            }],
            central_torus_rank: 1,
        };
        let rd = build(&gl_like).unwrap();
        assert_eq!(pi1(&rd).free_rank, 1);
        let der = derived_pi1(&rd);
        assert_eq!(der.invariant_factors, vec![2]);
        assert_eq!(der.free_rank, 0);

        let pgl4 = build(&simple(SimpleType::A, 3, Isogeny::Adjoint)).unwrap();
        assert_eq!(derived_pi1(&pgl4).invariant_factors, vec![4]);
        let sc = build(&simple(SimpleType::E, 7, Isogeny::Sc)).unwrap();
        assert!(derived_pi1(&sc).is_trivial());
    }

    #[test]
    fn isogeny_kernel_matches_pi1_and_guards_semisimplicity() {
        let pgl2 = build(&simple(SimpleType::A, 1, Isogeny::Adjoint)).unwrap();
        let ker = isogeny_kernel(&pgl2).unwrap();
        assert_eq!(ker.invariant_factors, vec![2]);
        assert_eq!(ker.order(), pi1(&pgl2).order());

        let torus = GroupSpec { factors: vec![], central_torus_rank: 2 };
        let rd = build(&torus).unwrap();
        assert!(matches!(isogeny_kernel(&rd), Err(KitError::NotSemisimple(_))));
    }

    #[test]
    fn intermediate_lattice_between_q_and_p() {
        // Index-2 sublattice of P^∨ for A3: the SL₄/μ₂ cocharacter lattice.
        let m = vec![vec![0, 1, 0], vec![-1, 0, -1], vec![0, 0, 2]];
        let rd = build(&simple(SimpleType::A, 3, Isogeny::Intermediate(m))).unwrap();
        assert_eq!(pi1(&rd).invariant_factors, vec![2]);

        // 2·(coroot basis) does not contain Q^∨.
        let bad = vec![vec![2, 0], vec![0, 2]];
        assert!(build(&simple(SimpleType::A, 2, Isogeny::Intermediate(bad))).is_err());

        // Identity recovers the adjoint datum.
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let rd = build(&simple(SimpleType::A, 3, Isogeny::Intermediate(id))).unwrap();
        assert_eq!(pi1(&rd).invariant_factors, vec![4]);
    }

    #[test]
    fn text_grammar_round_trips() {
        let spec = GroupSpec::parse("A3:adjoint x D4:sc +T1").unwrap();
        assert_eq!(spec.factors.len(), 2);
        assert_eq!(spec.factors[0].simple_type, SimpleType::A);
        assert_eq!(spec.factors[0].rank, 3);
        assert_eq!(spec.factors[0].isogeny, Isogeny::Adjoint);
        assert_eq!(spec.factors[1].simple_type, SimpleType::D);
        assert_eq!(spec.factors[1].isogeny, Isogeny::Sc);
        assert_eq!(spec.central_torus_rank, 1);

        assert!(GroupSpec::parse("A1:sc").is_ok());
        assert!(GroupSpec::parse("+T2").is_ok());
        assert!(GroupSpec::parse("E5:sc").is_err());
        assert!(GroupSpec::parse("A1").is_err());
        assert!(GroupSpec::parse("A1:fundamental").is_err());
        assert!(GroupSpec::parse("").is_err());
        assert!(GroupSpec::parse("H2:sc").is_err());
    }

    #[test]
    fn json_spec_with_intermediate_matrix() {
        let json = r#"{"factors":[{"simple_type":"A","rank":3,
            "isogeny":{"intermediate":[[0,1,0],[-1,0,-1],[0,0,2]]}}],
            "central_torus_rank":0}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        let rd = build(&spec).unwrap();
        assert_eq!(pi1(&rd).invariant_factors, vec![2]);
    }

    #[test]
    fn sc_variant_trivializes_pi1() {
        let spec = GroupSpec::parse("A3:adjoint x D4:sc +T1").unwrap();
        let rd = build(&spec.sc_variant()).unwrap();
        let group = pi1(&rd);
        assert!(group.invariant_factors.is_empty());
        assert_eq!(group.free_rank, 1);
    }

    #[test]
    fn prime_divisor_listing() {
        let g = FiniteAbelianGroup { invariant_factors: vec![2, 6], free_rank: 0 };
        assert_eq!(g.prime_divisors(), vec![2, 3]);
        assert_eq!(g.order(), Some(12));
        assert!(FiniteAbelianGroup::trivial().prime_divisors().is_empty());
    }
}
