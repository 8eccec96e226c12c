//! The Iwahori–Weyl group W = X_*(T) ⋊ W_fin of a root datum: elements in
//! canonical (translation, finite part) form, the finite and affine Coxeter
//! systems, Iwahori–Matsumoto length, Bruhat order by the subword property,
//! the length-zero subgroup Ω with its decomposition W = W_aff ⋊ Ω, and
//! parahoric coset combinatorics (minimal representatives, longest elements,
//! Iwahori lifts).

use crate::error::{KitError, Result};
use crate::root_datum::{pairing, pi1, RootDatum};
use crate::roots::{generate, reflection_matrix, RootSystem};
use crate::snf::{smith_normal_form, solve_integer, IMat, SmithDecomposition};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// Word in the generators of a Coxeter system, as indices.
pub type Word = Vec<usize>;

/// Parses a space-separated list of generator indices; empty text is the
/// empty word.
pub fn parse_word(text: &str) -> Result<Word> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| KitError::InvalidInput(format!("bad word letter '{t}'")))
        })
        .collect()
}

/// Element of X_*(T) ⋊ W_fin: `x = t_λ · w`, with the finite part stored as
/// its action matrix on X_*(T) together with the inverse matrix (so that
/// group inversion never solves a linear system).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IwahoriWeylElement {
    translation: Vec<i64>,
    fin: Vec<Vec<i64>>,
    fin_inv: Vec<Vec<i64>>,
}

fn mat_identity(rank: usize) -> Vec<Vec<i64>> {
    (0..rank)
        .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = out[i][j]
                    .checked_add(a[i][k].checked_mul(b[k][j]).expect("matrix overflow"))
                    .expect("matrix overflow");
            }
        }
    }
    out
}

fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(&a, &b)| a.checked_mul(b).expect("overflow"))
                .fold(0i64, |acc, t| acc.checked_add(t).expect("overflow"))
        })
        .collect()
}

/// Transpose action: (mᵀ v)_b = Σ_a m[a][b] v[a].
fn mat_tvec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    let n = m.len();
    (0..n)
        .map(|b| {
            (0..n)
                .map(|a| m[a][b].checked_mul(v[a]).expect("overflow"))
                .fold(0i64, |acc, t| acc.checked_add(t).expect("overflow"))
        })
        .collect()
}

impl IwahoriWeylElement {
    pub fn identity(rank: usize) -> Self {
        IwahoriWeylElement {
            translation: vec![0; rank],
            fin: mat_identity(rank),
            fin_inv: mat_identity(rank),
        }
    }

    /// The pure translation t_λ.
    pub fn from_translation(lambda: &[i64]) -> Self {
        IwahoriWeylElement {
            translation: lambda.to_vec(),
            fin: mat_identity(lambda.len()),
            fin_inv: mat_identity(lambda.len()),
        }
    }

    /// The finite reflection along (root, coroot), with zero translation.
    pub fn from_reflection(rank: usize, root: &[i64], coroot: &[i64]) -> Self {
        let m = reflection_matrix(rank, root, coroot);
        IwahoriWeylElement { translation: vec![0; rank], fin: m.clone(), fin_inv: m }
    }

    /// Group law: (λ₁, w₁)(λ₂, w₂) = (λ₁ + w₁λ₂, w₁w₂).
    pub fn mul(&self, other: &IwahoriWeylElement) -> Self {
        let moved = mat_vec(&self.fin, &other.translation);
        let translation = self
            .translation
            .iter()
            .zip(&moved)
            .map(|(&a, &b)| a.checked_add(b).expect("translation overflow"))
            .collect();
        IwahoriWeylElement {
            translation,
            fin: mat_mul(&self.fin, &other.fin),
            fin_inv: mat_mul(&other.fin_inv, &self.fin_inv),
        }
    }

    /// (λ, w)⁻¹ = (−w⁻¹λ, w⁻¹).
    pub fn inverse(&self) -> Self {
        let back = mat_vec(&self.fin_inv, &self.translation);
        IwahoriWeylElement {
            translation: back.iter().map(|&v| -v).collect(),
            fin: self.fin_inv.clone(),
            fin_inv: self.fin.clone(),
        }
    }

    pub fn translation_part(&self) -> &[i64] {
        &self.translation
    }

    pub fn finite_matrix(&self) -> &[Vec<i64>] {
        &self.fin
    }

    pub fn is_identity(&self) -> bool {
        self.translation.iter().all(|&v| v == 0) && self.fin == mat_identity(self.translation.len())
    }

    pub fn is_translation(&self) -> bool {
        self.fin == mat_identity(self.translation.len())
    }

    /// Affine action on the cocharacter lattice: λ ↦ w·λ + translation.
    pub fn apply(&self, lambda: &[i64]) -> Vec<i64> {
        mat_vec(&self.fin, lambda)
            .iter()
            .zip(&self.translation)
            .map(|(&a, &b)| a + b)
            .collect()
    }
}

/// Entry of a Coxeter matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoxOrder {
    Finite(u32),
    Infinite,
}

/// Whether the system is the finite Weyl group or the affine one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoxKind {
    Finite,
    Affine,
}

struct Gen {
    element: IwahoriWeylElement,
    root: Vec<i64>,
    coroot: Vec<i64>,
    affine: bool,
}

/// A Coxeter presentation of W_fin or W_aff over a root datum, carrying the
/// root system so lengths and descents are computed exactly.
pub struct CoxeterSystem {
    kind: CoxKind,
    rd: RootDatum,
    rs: RootSystem,
    gens: Vec<Gen>,
    matrix: Vec<Vec<CoxOrder>>,
    /// Generator indices per irreducible component (affine node first in the
    /// affine system).
    comp_gens: Vec<Vec<usize>>,
    coroot_snf: SmithDecomposition,
}

/// The finite Weyl group of `rd` as a Coxeter system.
pub fn finite_weyl(rd: &RootDatum) -> Result<CoxeterSystem> {
    CoxeterSystem::new(rd.clone(), CoxKind::Finite)
}

/// The affine Coxeter system: per irreducible component, the affine node
/// (translation by the highest coroot times the reflection in the highest
/// root) comes first, followed by that component's finite nodes. Errors on a
/// pure torus.
pub fn affine_coxeter(rd: &RootDatum) -> Result<CoxeterSystem> {
    if rd.num_simple() == 0 {
        return Err(KitError::InvalidInput(
            "a pure torus has no affine Coxeter system".into(),
        ));
    }
    CoxeterSystem::new(rd.clone(), CoxKind::Affine)
}

fn default_max_ball() -> usize {
    std::env::var("SCHUBERT_KIT_MAX_BALL")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(8)
}

impl CoxeterSystem {
    fn new(rd: RootDatum, kind: CoxKind) -> Result<Self> {
        let rs = generate(&rd)?;
        let rank = rd.rank();
        let mut gens: Vec<Gen> = Vec::new();
        let mut comp_gens: Vec<Vec<usize>> = Vec::new();
        for (c, comp) in rs.components().iter().enumerate() {
            let mut indices = Vec::new();
            if kind == CoxKind::Affine {
                let theta = rs.highest_roots()[c];
                let refl =
                    IwahoriWeylElement::from_reflection(rank, &theta.vector, &theta.coroot_vector);
                let element =
                    IwahoriWeylElement::from_translation(&theta.coroot_vector).mul(&refl);
                indices.push(gens.len());
                gens.push(Gen {
                    element,
                    root: theta.vector.clone(),
                    coroot: theta.coroot_vector.clone(),
                    affine: true,
                });
            }
            for &j in comp {
                let root = rd.simple_roots()[j].clone();
                let coroot = rd.simple_coroots()[j].clone();
                indices.push(gens.len());
                gens.push(Gen {
                    element: IwahoriWeylElement::from_reflection(rank, &root, &coroot),
                    root,
                    coroot,
                    affine: false,
                });
            }
            comp_gens.push(indices);
        }

        let n = gens.len();
        let mut matrix = vec![vec![CoxOrder::Finite(2); n]; n];
        for i in 0..n {
            matrix[i][i] = CoxOrder::Finite(1);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let p = pairing(&gens[i].coroot, &gens[j].root)
                    * pairing(&gens[j].coroot, &gens[i].root);
                matrix[i][j] = match p {
                    0 => CoxOrder::Finite(2),
                    1 => CoxOrder::Finite(3),
                    2 => CoxOrder::Finite(4),
                    3 => CoxOrder::Finite(6),
                    4 => CoxOrder::Infinite,
                    _ => {
                        return Err(KitError::InvalidInput(format!(
                            "pairing product {p} is not Coxeter-admissible"
                        )))
                    }
                };
            }
        }

        let coroot_snf = smith_normal_form(&IMat::from_columns(rd.simple_coroots(), rank));
        Ok(CoxeterSystem { kind, rd, rs, gens, matrix, comp_gens, coroot_snf })
    }

    pub fn kind(&self) -> CoxKind {
        self.kind
    }

    pub fn root_datum(&self) -> &RootDatum {
        &self.rd
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn generator(&self, i: usize) -> Result<&IwahoriWeylElement> {
        self.gens
            .get(i)
            .map(|g| &g.element)
            .ok_or_else(|| KitError::InvalidInput(format!("generator index {i} out of range")))
    }

    pub fn coxeter_matrix(&self) -> &[Vec<CoxOrder>] {
        &self.matrix
    }

    /// Whether generator `i` is an affine node.
    pub fn is_affine_generator(&self, i: usize) -> bool {
        self.gens.get(i).map_or(false, |g| g.affine)
    }

    /// Generator indices per irreducible component; in the affine system the
    /// first index of each component is its affine node.
    pub fn component_generators(&self) -> &[Vec<usize>] {
        &self.comp_gens
    }

    pub fn identity(&self) -> IwahoriWeylElement {
        IwahoriWeylElement::identity(self.rd.rank())
    }

    /// Left-to-right product of the generators named by `word`.
    pub fn element(&self, word: &[usize]) -> Result<IwahoriWeylElement> {
        let mut acc = self.identity();
        for &i in word {
            acc = acc.mul(self.generator(i)?);
        }
        Ok(acc)
    }

    /// Iwahori–Matsumoto length:
    /// ℓ(t_λ w) = Σ_{α>0, w⁻¹α>0} |⟨λ,α⟩| + Σ_{α>0, w⁻¹α<0} |⟨λ,α⟩ − 1|.
    pub fn length(&self, x: &IwahoriWeylElement) -> u64 {
        let mut total: i128 = 0;
        for alpha in self.rs.positive() {
            let pair = pairing(x.translation_part(), &alpha.vector) as i128;
            let pulled = mat_tvec(&x.fin, &alpha.vector);
            let positive = if self.rs.index_of_vector(&pulled).is_some() {
                true
            } else {
                debug_assert!(
                    self.rs
                        .index_of_vector(&pulled.iter().map(|&v| -v).collect::<Vec<_>>())
                        .is_some(),
                    "w⁻¹α is not a root"
                );
                false
            };
            total += if positive { pair.abs() } else { (pair - 1).abs() };
        }
        u64::try_from(total).expect("length overflow")
    }

    pub fn is_reduced(&self, word: &[usize]) -> Result<bool> {
        let x = self.element(word)?;
        Ok(self.length(&x) == word.len() as u64)
    }

    /// Canonical reduced word by greedy smallest-index left descent.
    /// Errors when the element is not in the group generated by the system
    /// (nontrivial length-zero part).
    pub fn canonical_word(&self, x: &IwahoriWeylElement) -> Result<Word> {
        let mut cur = x.clone();
        let mut len = self.length(&cur);
        let mut word = Vec::new();
        while len > 0 {
            let mut found = false;
            for i in 0..self.gens.len() {
                let cand = self.gens[i].element.mul(&cur);
                let l2 = self.length(&cand);
                if l2 < len {
                    word.push(i);
                    cur = cand;
                    len = l2;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(KitError::InvalidInput(
                    "element admits no descent yet has positive length".into(),
                ));
            }
        }
        if !cur.is_identity() {
            return Err(KitError::InvalidInput(
                "element is not a word in these generators (length-zero part is nontrivial)"
                    .into(),
            ));
        }
        Ok(word)
    }

    /// All elements of length ≤ radius, ordered by (length, canonical word).
    /// The radius is capped (default 8, `SCHUBERT_KIT_MAX_BALL` overrides).
    pub fn ball(&self, radius: usize) -> Result<Vec<IwahoriWeylElement>> {
        let cap = default_max_ball();
        if radius > cap {
            return Err(KitError::BoundExceeded(format!(
                "ball radius {radius} exceeds the cap {cap} (set SCHUBERT_KIT_MAX_BALL to raise)"
            )));
        }
        let mut seen: std::collections::HashSet<IwahoriWeylElement> =
            std::collections::HashSet::new();
        let mut frontier = vec![self.identity()];
        seen.insert(self.identity());
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &frontier {
                for g in &self.gens {
                    let y = x.mul(&g.element);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        let mut with_keys: Vec<(u64, Word, IwahoriWeylElement)> = seen
            .into_iter()
            .map(|x| {
                let l = self.length(&x);
                let w = self.canonical_word(&x).expect("ball elements are words");
                (l, w, x)
            })
            .filter(|(l, _, _)| *l <= radius as u64)
            .collect();
        with_keys.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        Ok(with_keys.into_iter().map(|(_, _, x)| x).collect())
    }

    /// Residues of λ in the torsion part of X_*/Q^∨, aligned with the
    /// invariant factors of π₁ (entries ≥ 2 only).
    pub fn translation_class(&self, lambda: &[i64]) -> Vec<u64> {
        let v: Vec<BigInt> = lambda.iter().map(|&x| BigInt::from(x)).collect();
        let reduced = self.coroot_snf.left.mul_vec(&v);
        let mut out = Vec::new();
        for (i, d) in self.coroot_snf.diag.iter().enumerate() {
            if let Some(d) = d.to_u64() {
                if d >= 2 {
                    let r = ((&reduced[i] % d) + d) % d;
                    out.push(r.to_u64().expect("residue in range"));
                }
            }
        }
        out
    }

    /// Whether λ lies in the coroot lattice Q^∨.
    pub fn in_coroot_lattice(&self, lambda: &[i64]) -> bool {
        let m = IMat::from_columns(self.rd.simple_coroots(), self.rd.rank());
        let b: Vec<BigInt> = lambda.iter().map(|&x| BigInt::from(x)).collect();
        solve_integer(&m, &b).is_some()
    }
}

/// Length-zero element of the Iwahori–Weyl group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OmegaElement(IwahoriWeylElement);

impl OmegaElement {
    pub fn element(&self) -> &IwahoriWeylElement {
        &self.0
    }

    pub fn into_element(self) -> IwahoriWeylElement {
        self.0
    }
}

/// The group Ω of length-zero elements, with the class of each element's
/// translation in X_*/Q^∨ recorded alongside (aligned with the invariant
/// factors of π₁).
pub struct OmegaGroup {
    pub elements: Vec<OmegaElement>,
    pub classes: Vec<Vec<u64>>,
}

/// Builds the finite-part w from its inversion set (indices into the
/// positive roots) by peeling simple roots; `None` when the set is not an
/// inversion set.
fn element_with_inversions(cs: &CoxeterSystem, set: &[usize]) -> Option<IwahoriWeylElement> {
    if set.is_empty() {
        return Some(cs.identity());
    }
    let rd = cs.root_datum();
    let rs = cs.root_system();
    for j in 0..rd.num_simple() {
        let simple_idx = rs
            .index_of_vector(&rd.simple_roots()[j])
            .expect("simple roots are positive roots");
        if !set.contains(&simple_idx) {
            continue;
        }
        // Reflect the remaining inversions through s_j; they stay positive.
        let mut next = Vec::with_capacity(set.len() - 1);
        for &r in set {
            if r == simple_idx {
                continue;
            }
            let alpha = &rs.positive()[r];
            let coef = pairing(&rd.simple_coroots()[j], &alpha.vector);
            let reflected: Vec<i64> = alpha
                .vector
                .iter()
                .zip(&rd.simple_roots()[j])
                .map(|(&a, &b)| a - coef * b)
                .collect();
            next.push(rs.index_of_vector(&reflected).expect("reflection stays positive"));
        }
        let s_j = IwahoriWeylElement::from_reflection(
            rd.rank(),
            &rd.simple_roots()[j],
            &rd.simple_coroots()[j],
        );
        return element_with_inversions(cs, &next).map(|rest| s_j.mul(&rest));
    }
    None
}

/// The length-zero element in the same W_aff-coset as t_λ for λ ≡ x's
/// translation mod Q^∨, or `None` if something is inconsistent.
fn length_zero_in_class(cs: &CoxeterSystem, lambda: &[i64]) -> Option<IwahoriWeylElement> {
    let rd = cs.root_datum();
    let rs = cs.root_system();
    let s = rd.num_simple();
    // ⟨μ, ·⟩ on simple roots determines ⟨μ, α⟩ = Σ c_j p_j for α = Σ c_j α_j.
    for mask in 0u32..(1 << s) {
        let p: Vec<i64> = (0..s).map(|j| i64::from(mask >> j & 1 == 1)).collect();
        let admissible = rs.positive().iter().all(|alpha| {
            let v: i64 = alpha.expansion.iter().zip(&p).map(|(&c, &pj)| c * pj).sum();
            v == 0 || v == 1
        });
        if !admissible {
            continue;
        }
        // Solve μ = λ + Σ y_k α_k^∨ with ⟨μ, α_j⟩ = p_j.
        let mut a = vec![vec![0i64; s]; s];
        for j in 0..s {
            for k in 0..s {
                a[j][k] = rd.cartan()[k][j];
            }
        }
        let rhs: Vec<BigInt> = (0..s)
            .map(|j| BigInt::from(p[j] - pairing(lambda, &rd.simple_roots()[j])))
            .collect();
        let Some(y) = solve_integer(&IMat::from_rows(&a), &rhs) else {
            continue;
        };
        let mut mu: Vec<i64> = lambda.to_vec();
        for (k, yk) in y.iter().enumerate() {
            let yk = yk.to_i64().expect("coroot coefficient overflow");
            for (m, c) in mu.iter_mut().zip(&rd.simple_coroots()[k]) {
                *m += yk * c;
            }
        }
        let inversions: Vec<usize> = rs
            .positive()
            .iter()
            .enumerate()
            .filter(|(_, alpha)| {
                alpha.expansion.iter().zip(&p).map(|(&c, &pj)| c * pj).sum::<i64>() == 1
            })
            .map(|(i, _)| i)
            .collect();
        let Some(w) = element_with_inversions(cs, &inversions) else {
            continue;
        };
        let gamma = IwahoriWeylElement::from_translation(&mu).mul(&w);
        if cs.length(&gamma) == 0 {
            return Some(gamma);
        }
    }
    None
}

/// Writes x = v · γ with v ∈ W_aff and ℓ(γ) = 0; the decomposition is unique.
pub fn omega_decompose(
    cs: &CoxeterSystem,
    x: &IwahoriWeylElement,
) -> Result<(IwahoriWeylElement, OmegaElement)> {
    let gamma = length_zero_in_class(cs, x.translation_part()).ok_or_else(|| {
        KitError::InvalidInput("no length-zero element in the coset; invalid element".into())
    })?;
    let v = x.mul(&gamma.inverse());
    debug_assert!(cs.in_coroot_lattice(v.translation_part()));
    Ok((v, OmegaElement(gamma)))
}

/// The full group Ω for a semisimple datum: one length-zero element per
/// class of X_*/Q^∨.
pub fn omega_group(cs: &CoxeterSystem) -> Result<OmegaGroup> {
    let rd = cs.root_datum();
    if rd.num_simple() != rd.rank() {
        return Err(KitError::NotSemisimple(
            "Ω is infinite for a non-semisimple datum; no table".into(),
        ));
    }
    let group = pi1(rd);
    let order = group.order().expect("semisimple pi1 is finite");
    if order > 10_000 {
        return Err(KitError::BoundExceeded(format!(
            "Ω enumeration capped at 10000 elements, need {order}"
        )));
    }
    let rank = rd.rank();
    let diag: Vec<u64> = cs
        .coroot_snf
        .diag
        .iter()
        .map(|d| d.to_u64().expect("semisimple diag fits u64"))
        .collect();
    let mut elements = Vec::new();
    let mut classes = Vec::new();
    let mut residue = vec![0u64; rank];
    loop {
        let r: Vec<BigInt> = residue.iter().map(|&v| BigInt::from(v)).collect();
        let rep = cs.coroot_snf.left_inv.mul_vec(&r);
        let lambda: Vec<i64> = rep
            .iter()
            .map(|v| v.to_i64().expect("representative overflow"))
            .collect();
        let gamma = length_zero_in_class(cs, &lambda).ok_or_else(|| {
            KitError::InvalidInput("no length-zero element in a class".into())
        })?;
        classes.push(cs.translation_class(gamma.translation_part()));
        elements.push(OmegaElement(gamma));
        // Advance the mixed-radix counter over ∏ Z/d_i.
        let mut i = 0;
        loop {
            if i == rank {
                return Ok(OmegaGroup { elements, classes });
            }
            residue[i] += 1;
            if residue[i] < diag[i] {
                break;
            }
            residue[i] = 0;
            i += 1;
        }
    }
}

/// Subset of the generators whose parahoric subgroup W_P is finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParahoricType(Vec<usize>);

impl ParahoricType {
    /// Validates bounds and finiteness: in the affine system, J must omit at
    /// least one node of every irreducible component it meets in full.
    pub fn new(cs: &CoxeterSystem, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices.iter().find(|&&i| i >= cs.num_generators()) {
            return Err(KitError::InvalidInput(format!(
                "parahoric index {bad} out of range"
            )));
        }
        if cs.kind() == CoxKind::Affine {
            for comp in cs.component_generators() {
                if comp.iter().all(|i| indices.contains(i)) {
                    return Err(KitError::InvalidInput(
                        "parahoric subset contains a full affine component; W_P is infinite"
                            .into(),
                    ));
                }
            }
        }
        Ok(ParahoricType(indices))
    }

    /// Builds a rank-one (or otherwise pre-validated) type without checks.
    pub(crate) fn from_indices_unchecked(indices: Vec<usize>) -> Self {
        ParahoricType(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

/// True iff v ≤ w in Bruhat order, by the standard left-to-right subword
/// scan along a reduced word of w.
pub fn bruhat_leq(cs: &CoxeterSystem, v: &[usize], w: &[usize]) -> Result<bool> {
    let w_elt = cs.element(w)?;
    let w_red = cs.canonical_word(&w_elt)?;
    let mut u = cs.element(v)?;
    let mut len = cs.length(&u);
    for &s in &w_red {
        let cand = cs.generator(s)?.mul(&u);
        let l2 = cs.length(&cand);
        if l2 < len {
            u = cand;
            len = l2;
        }
    }
    Ok(u.is_identity())
}

/// The minimal-length representative of w·W_P, as a canonical word.
pub fn min_coset_rep(cs: &CoxeterSystem, w: &[usize], j: &ParahoricType) -> Result<Word> {
    let mut x = cs.element(w)?;
    let mut len = cs.length(&x);
    'strip: loop {
        for &i in j.indices() {
            let cand = x.mul(cs.generator(i)?);
            let l2 = cs.length(&cand);
            if l2 < len {
                x = cand;
                len = l2;
                continue 'strip;
            }
        }
        break;
    }
    cs.canonical_word(&x)
}

/// The longest element of W_P, found by greedy length ascent (finite W_P has
/// a unique maximum). Fails loudly if the ascent exceeds its bound.
pub fn longest_in_parahoric(cs: &CoxeterSystem, j: &ParahoricType) -> Result<Word> {
    let mut x = cs.identity();
    let mut len = 0u64;
    let mut steps = 0usize;
    'grow: loop {
        steps += 1;
        if steps > 100_000 {
            return Err(KitError::BoundExceeded(
                "longest-element ascent exceeded 100000 steps".into(),
            ));
        }
        for &i in j.indices() {
            let cand = x.mul(cs.generator(i)?);
            let l2 = cs.length(&cand);
            if l2 > len {
                x = cand;
                len = l2;
                continue 'grow;
            }
        }
        break;
    }
    // The longest element is an involution.
    debug_assert!(x.mul(&x).is_identity());
    cs.canonical_word(&x)
}

/// The Iwahori lift v = w^P · w₀(W_P); its length is the sum of the parts.
pub fn lift_element(cs: &CoxeterSystem, w: &[usize], j: &ParahoricType) -> Result<Word> {
    let rep = min_coset_rep(cs, w, j)?;
    let long = longest_in_parahoric(cs, j)?;
    let mut word = rep.clone();
    word.extend_from_slice(&long);
    let x = cs.element(&word)?;
    if cs.length(&x) != (rep.len() + long.len()) as u64 {
        return Err(KitError::InvalidInput(
            "lift is not length-additive; inconsistent parahoric".into(),
        ));
    }
    cs.canonical_word(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_datum::{build, GroupSpec};
    use proptest::prelude::*;

    fn datum(text: &str) -> RootDatum {
        build(&GroupSpec::parse(text).unwrap()).unwrap()
    }

    fn enumerate_group(cs: &CoxeterSystem, cap: usize) -> Vec<IwahoriWeylElement> {
        let mut seen = std::collections::HashSet::new();
        let mut frontier = vec![cs.identity()];
        seen.insert(cs.identity());
        while let Some(x) = frontier.pop() {
            for i in 0..cs.num_generators() {
                let y = x.mul(cs.generator(i).unwrap());
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
            assert!(seen.len() <= cap, "group enumeration exceeded cap");
        }
        seen.into_iter().collect()
    }

    #[test]
    fn finite_weyl_group_orders() {
        // |W(A₁)| = 2, |W(A₂)| = 6, |W(B₂)| = 8, |W(G₂)| = 12.
        let cases = [("A1:sc", 2), ("A2:sc", 6), ("B2:sc", 8), ("G2:sc", 12)];
        for (spec, order) in cases {
            let cs = finite_weyl(&datum(spec)).unwrap();
            assert_eq!(enumerate_group(&cs, 200).len(), order, "{spec}");
        }
    }

    #[test]
    fn coxeter_matrices_match_product_orders() {
        // Oracle: m_ij must be the true order of s_i s_j, found by iterating.
        for spec in ["A1:sc", "A2:adjoint", "C2:sc", "G2:sc", "B3:sc", "A1:sc x A1:adjoint"] {
            let cs = affine_coxeter(&datum(spec)).unwrap();
            for i in 0..cs.num_generators() {
                for j in 0..cs.num_generators() {
                    let g = cs.element(&[i, j]).unwrap();
                    let mut acc = cs.identity();
                    let mut found = None;
                    for k in 1..=50u32 {
                        acc = acc.mul(&g);
                        if acc.is_identity() {
                            found = Some(k);
                            break;
                        }
                    }
                    let expect = match cs.coxeter_matrix()[i][j] {
                        CoxOrder::Finite(m) => Some(m),
                        CoxOrder::Infinite => None,
                    };
                    assert_eq!(found, expect, "{spec} m[{i}][{j}]");
                }
            }
        }
    }

    #[test]
    fn affine_matrices_frozen_values() {
        let cs = affine_coxeter(&datum("A1:sc")).unwrap();
        assert_eq!(cs.coxeter_matrix()[0][1], CoxOrder::Infinite);

        let cs = affine_coxeter(&datum("A2:sc")).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { CoxOrder::Finite(1) } else { CoxOrder::Finite(3) };
                assert_eq!(cs.coxeter_matrix()[i][j], want);
            }
        }

        // Affine C₂ is the path 0=1=2: orders m₀₁ = 4, m₁₂ = 4, m₀₂ = 2.
        let cs = affine_coxeter(&datum("C2:sc")).unwrap();
        assert_eq!(cs.coxeter_matrix()[0][1], CoxOrder::Finite(4));
        assert_eq!(cs.coxeter_matrix()[1][2], CoxOrder::Finite(4));
        assert_eq!(cs.coxeter_matrix()[0][2], CoxOrder::Finite(2));

        // Affine G₂: the affine node attaches to the long root simply.
        let cs = affine_coxeter(&datum("G2:sc")).unwrap();
        assert_eq!(cs.coxeter_matrix()[0][1], CoxOrder::Finite(2));
        assert_eq!(cs.coxeter_matrix()[0][2], CoxOrder::Finite(3));
        assert_eq!(cs.coxeter_matrix()[1][2], CoxOrder::Finite(6));
    }

    #[test]
    fn lengths_of_translations() {
        // SL₂: ℓ(t_{α^∨}) = |⟨α^∨, α⟩| = 2.
        let sl2 = datum("A1:sc");
        let cs = affine_coxeter(&sl2).unwrap();
        assert_eq!(cs.length(&IwahoriWeylElement::from_translation(&[1])), 2);
        assert_eq!(cs.length(&cs.identity()), 0);
        assert_eq!(cs.length(cs.generator(0).unwrap()), 1);
        assert_eq!(cs.length(cs.generator(1).unwrap()), 1);

        // PGL₂: ℓ(t_ω) = 1 and ℓ(t_ω s) = 0.
        let pgl2 = datum("A1:adjoint");
        let cs = affine_coxeter(&pgl2).unwrap();
        let t_omega = IwahoriWeylElement::from_translation(&[1]);
        assert_eq!(cs.length(&t_omega), 1);
        let s = IwahoriWeylElement::from_reflection(1, &[1], &[2]);
        assert_eq!(cs.length(&t_omega.mul(&s)), 0);
    }

    #[test]
    fn canonical_words_round_trip_on_a_ball() {
        let cs = affine_coxeter(&datum("A2:adjoint")).unwrap();
        for x in cs.ball(4).unwrap() {
            let w = cs.canonical_word(&x).unwrap();
            assert_eq!(w.len() as u64, cs.length(&x));
            assert_eq!(cs.element(&w).unwrap(), x);
        }
    }

    #[test]
    fn ball_of_affine_a1_is_the_infinite_dihedral_prefix() {
        let cs = affine_coxeter(&datum("A1:sc")).unwrap();
        let ball = cs.ball(3).unwrap();
        let words: Vec<Word> =
            ball.iter().map(|x| cs.canonical_word(x).unwrap()).collect();
        assert_eq!(
            words,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![0, 1],
                vec![1, 0],
                vec![0, 1, 0],
                vec![1, 0, 1]
            ]
        );
    }

    #[test]
    fn omega_decompose_pgl2_example() {
        let cs = affine_coxeter(&datum("A1:adjoint")).unwrap();
        let t_omega = IwahoriWeylElement::from_translation(&[1]);
        let (v, gamma) = omega_decompose(&cs, &t_omega).unwrap();
        // γ = t_ω·s and v = t_{α^∨}·s.
        let s = IwahoriWeylElement::from_reflection(1, &[1], &[2]);
        assert_eq!(gamma.element(), &t_omega.mul(&s));
        assert_eq!(v, IwahoriWeylElement::from_translation(&[2]).mul(&s));
        assert_eq!(v.mul(gamma.element()), t_omega);
        assert_eq!(cs.length(gamma.element()), 0);

        // Translations already in Q^∨ decompose trivially.
        let t2 = IwahoriWeylElement::from_translation(&[2]);
        let (v, gamma) = omega_decompose(&cs, &t2).unwrap();
        assert!(gamma.element().is_identity());
        assert_eq!(v, t2);
    }

    #[test]
    fn omega_groups_match_pi1() {
        let cs = affine_coxeter(&datum("A2:sc")).unwrap();
        assert_eq!(omega_group(&cs).unwrap().elements.len(), 1);

        let cs = affine_coxeter(&datum("A1:adjoint")).unwrap();
        let om = omega_group(&cs).unwrap();
        assert_eq!(om.elements.len(), 2);

        let cs = affine_coxeter(&datum("A2:adjoint")).unwrap();
        let om = omega_group(&cs).unwrap();
        assert_eq!(om.elements.len(), 3);
        let mut classes = om.classes.clone();
        classes.sort();
        assert_eq!(classes, vec![vec![0], vec![1], vec![2]]);
        for gamma in &om.elements {
            assert_eq!(cs.length(gamma.element()), 0);
        }

        // Non-semisimple data have infinite Ω.
        let cs = affine_coxeter(&datum("A1:sc +T1")).unwrap();
        assert!(matches!(omega_group(&cs), Err(KitError::NotSemisimple(_))));
    }

    #[test]
    fn length_is_preserved_under_omega_right_multiplication() {
        let cs = affine_coxeter(&datum("A1:adjoint")).unwrap();
        let om = omega_group(&cs).unwrap();
        for x in cs.ball(4).unwrap() {
            for gamma in &om.elements {
                assert_eq!(cs.length(&x.mul(gamma.element())), cs.length(&x));
            }
        }
    }

    #[test]
    fn bruhat_subword_examples() {
        let cs = affine_coxeter(&datum("A1:sc")).unwrap();
        assert!(bruhat_leq(&cs, &[], &[0, 1, 0]).unwrap());
        assert!(!bruhat_leq(&cs, &[0], &[1]).unwrap());
        assert!(bruhat_leq(&cs, &[0], &[1, 0, 1]).unwrap());
        assert!(!bruhat_leq(&cs, &[1, 0], &[0, 1]).unwrap());
        assert!(bruhat_leq(&cs, &[0, 1], &[0, 1]).unwrap());
    }

    #[test]
    fn coset_reps_and_longest_elements() {
        // Affine A₂: w = s₀s₁, J = {1} → s₀.
        let cs = affine_coxeter(&datum("A2:sc")).unwrap();
        let j = ParahoricType::new(&cs, vec![1]).unwrap();
        assert_eq!(min_coset_rep(&cs, &[0, 1], &j).unwrap(), vec![0]);
        assert_eq!(lift_element(&cs, &[0], &j).unwrap(), vec![0, 1]);

        // Finite A₂ (generators 0,1): stripping right descents in J.
        // s₀s₁s₀·W_{s₀} has minimum s₀s₁; s₀s₁s₀·W_{s₁} has minimum s₁s₀
        // (s₀s₁s₀s₁ = s₁s₀ in the symmetric group on three letters).
        let cs = finite_weyl(&datum("A2:sc")).unwrap();
        let j0 = ParahoricType::new(&cs, vec![0]).unwrap();
        assert_eq!(min_coset_rep(&cs, &[0, 1, 0], &j0).unwrap(), vec![0, 1]);
        let j = ParahoricType::new(&cs, vec![1]).unwrap();
        assert_eq!(min_coset_rep(&cs, &[0, 1, 0], &j).unwrap(), vec![1, 0]);
        assert_eq!(min_coset_rep(&cs, &[1], &j).unwrap(), Vec::<usize>::new());
        assert_eq!(longest_in_parahoric(&cs, &j).unwrap(), vec![1]);
        let full = ParahoricType::new(&cs, vec![0, 1]).unwrap();
        assert_eq!(longest_in_parahoric(&cs, &full).unwrap().len(), 3);
        assert_eq!(lift_element(&cs, &[0], &j).unwrap(), vec![0, 1]);

        // B₂ parahoric inside affine C₂ has longest length 4.
        let cs = affine_coxeter(&datum("C2:sc")).unwrap();
        let j = ParahoricType::new(&cs, vec![1, 2]).unwrap();
        assert_eq!(longest_in_parahoric(&cs, &j).unwrap().len(), 4);

        // A full affine component is rejected.
        assert!(ParahoricType::new(&cs, vec![0, 1, 2]).is_err());
    }

    #[test]
    fn coset_cells_partition_a_ball() {
        let cs = affine_coxeter(&datum("A2:sc")).unwrap();
        let j = ParahoricType::new(&cs, vec![1, 2]).unwrap();
        let wp = enumerate_subgroup(&cs, &j);
        for x in cs.ball(4).unwrap() {
            let rep_word = min_coset_rep(&cs, &cs.canonical_word(&x).unwrap(), &j).unwrap();
            let rep = cs.element(&rep_word).unwrap();
            let u = rep.inverse().mul(&x);
            assert!(wp.contains(&u), "x must lie in rep·W_P");
            assert_eq!(
                cs.length(&x),
                cs.length(&rep) + cs.length(&u),
                "length additivity on the coset cell"
            );
        }
    }

    fn enumerate_subgroup(cs: &CoxeterSystem, j: &ParahoricType) -> Vec<IwahoriWeylElement> {
        let mut seen = std::collections::HashSet::new();
        let mut frontier = vec![cs.identity()];
        seen.insert(cs.identity());
        while let Some(x) = frontier.pop() {
            for &i in j.indices() {
                let y = x.mul(cs.generator(i).unwrap());
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
            assert!(seen.len() <= 200_000, "subgroup enumeration exceeded cap");
        }
        seen.into_iter().collect()
    }

    #[test]
    fn semidirect_group_law_holds() {
        let cs = affine_coxeter(&datum("C2:sc")).unwrap();
        let a = cs.element(&[0, 1, 2]).unwrap();
        let b = cs.element(&[2, 1]).unwrap();
        assert_eq!(a.mul(&b).mul(&b.inverse()), a);
        assert!(a.mul(&a.inverse()).is_identity());
        assert_eq!(a.mul(&cs.identity()), a);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn deletion_property_on_random_words(word in proptest::collection::vec(0usize..3, 0..10)) {
            let cs = affine_coxeter(&datum("A2:sc")).unwrap();
            let x = cs.element(&word).unwrap();
            let len = cs.length(&x);
            prop_assert!(len <= word.len() as u64);
            if len < word.len() as u64 {
                // A non-reduced word admits a deletion of two letters.
                let mut witnessed = false;
                'outer: for i in 0..word.len() {
                    for k in i + 1..word.len() {
                        let mut shorter = word.clone();
                        shorter.remove(k);
                        shorter.remove(i);
                        if cs.element(&shorter).unwrap() == x {
                            witnessed = true;
                            break 'outer;
                        }
                    }
                }
                prop_assert!(witnessed, "deletion property failed for {:?}", word);
            }
        }

        #[test]
        fn length_subadditive_with_parity(
            w1 in proptest::collection::vec(0usize..3, 0..8),
            w2 in proptest::collection::vec(0usize..3, 0..8),
        ) {
            let cs = affine_coxeter(&datum("A2:adjoint")).unwrap();
            let x = cs.element(&w1).unwrap();
            let y = cs.element(&w2).unwrap();
            let lx = cs.length(&x);
            let ly = cs.length(&y);
            let lxy = cs.length(&x.mul(&y));
            prop_assert!(lxy <= lx + ly);
            prop_assert_eq!((lx + ly) % 2, lxy % 2);
        }
    }

    #[test]
    fn product_component_generator_indexing() {
        // Each component contributes its affine node first, then its finite
        // nodes, in Cartan order.
        let rd = datum("A1:sc x A2:sc");
        let cs = affine_coxeter(&rd).unwrap();
        assert_eq!(cs.component_generators().len(), 2);
        assert_eq!(cs.component_generators()[0], vec![0, 1]);
        assert_eq!(cs.component_generators()[1], vec![2, 3, 4]);
        assert_eq!(cs.num_generators(), 5);
    }
}
