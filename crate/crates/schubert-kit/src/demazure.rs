//! Demazure (Bott–Samelson-type) resolutions of affine Schubert varieties:
//! reduced-expression enumeration by braid closure, exact point counts over
//! F_q for the resolution and its image, and fiber sizes over Iwahori cells.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{KitError, Result};
use crate::fq::prime_power;
use crate::weyl::{
    bruhat_leq, parse_word, CoxOrder, CoxeterSystem, IwahoriWeylElement, ParahoricType, Word,
};

/// Hard cap on the length of a word fed to subword enumeration (2^20 masks).
const MAX_SUBWORD_LENGTH: usize = 20;

/// A word certified reduced, paired with the group element it spells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedExpression {
    word: Word,
    element: IwahoriWeylElement,
}

impl ReducedExpression {
    /// Certifies `word` as reduced; errors with `InvalidInput` otherwise.
    pub fn new(cs: &CoxeterSystem, word: &[usize]) -> Result<Self> {
        let element = cs.element(word)?;
        if cs.length(&element) != word.len() as u64 {
            return Err(KitError::InvalidInput(format!(
                "word {:?} is not reduced (length {})",
                word,
                cs.length(&element)
            )));
        }
        Ok(ReducedExpression {
            word: word.to_vec(),
            element,
        })
    }

    /// The underlying word.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// The group element the word multiplies out to.
    pub fn element(&self) -> &IwahoriWeylElement {
        &self.element
    }

    /// The common length of the word and the element.
    pub fn length(&self) -> u64 {
        self.word.len() as u64
    }
}

/// A reduced expression with the rank-one parahoric marker at each letter;
/// the marker of letter `i` is always the parahoric generated by that letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemazureWord {
    expr: ReducedExpression,
}

impl DemazureWord {
    /// Builds the Demazure word of a reduced word; errors if not reduced.
    pub fn new(cs: &CoxeterSystem, word: &[usize]) -> Result<Self> {
        Ok(DemazureWord {
            expr: ReducedExpression::new(cs, word)?,
        })
    }

    /// The underlying reduced expression.
    pub fn expression(&self) -> &ReducedExpression {
        &self.expr
    }

    /// The rank-one parahoric marker at each position (the letter itself).
    pub fn markers(&self) -> Vec<ParahoricType> {
        self.expr
            .word
            .iter()
            .map(|&i| ParahoricType::from_indices_unchecked(vec![i]))
            .collect()
    }
}

/// All reduced expressions of the element spelled by `word`, via closure
/// under braid moves; errors if `word` is not reduced or the closure
/// exceeds `cap` expressions.
pub fn all_reduced_expressions(
    cs: &CoxeterSystem,
    word: &[usize],
    cap: usize,
) -> Result<Vec<Word>> {
    let expr = ReducedExpression::new(cs, word)?;
    let n = expr.word().len();
    let mut seen: HashSet<Word> = HashSet::new();
    let mut queue: VecDeque<Word> = VecDeque::new();
    seen.insert(expr.word().to_vec());
    queue.push_back(expr.word().to_vec());
    while let Some(w) = queue.pop_front() {
        for pos in 0..n {
            for other in 0..cs.num_generators() {
                let i = w[pos];
                if other == i {
                    continue;
                }
                let m = match cs.coxeter_matrix()[i][other] {
                    CoxOrder::Finite(m) => m as usize,
                    CoxOrder::Infinite => continue,
                };
                if pos + m > n {
                    continue;
                }
                // Does an (i, other)-alternation of length m start at pos?
                let alternates = (0..m).all(|k| w[pos + k] == if k % 2 == 0 { i } else { other });
                if !alternates {
                    continue;
                }
                let mut next = w.clone();
                for k in 0..m {
                    next[pos + k] = if k % 2 == 0 { other } else { i };
                }
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(KitError::BoundExceeded(format!(
                            "more than {cap} reduced expressions"
                        )));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    let mut out: Vec<Word> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Checks that q is a prime power (the only sizes of finite residue fields).
fn validate_q(q: u64) -> Result<()> {
    if prime_power(q).is_none() {
        return Err(KitError::InvalidInput(format!(
            "q = {q} is not a prime power"
        )));
    }
    Ok(())
}

/// Number of F_q-points of the Demazure resolution: (q+1)^ℓ.
pub fn demazure_point_count(dw: &DemazureWord, q: u64) -> Result<BigUint> {
    validate_q(q)?;
    let base = BigUint::from(q + 1);
    Ok(base.pow(dw.expression().length() as u32))
}

/// One Iwahori cell in the image of a Demazure resolution, with the total
/// point count of the resolution above it and the per-point fiber size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemazureCell {
    /// Canonical reduced word of the cell's element.
    pub word: Word,
    /// Length of the cell's element (the cell has q^length points).
    pub length: u64,
    /// Points of the resolution lying over the whole cell.
    pub total: BigUint,
    /// Points of the resolution over each single point of the cell.
    pub fiber: BigUint,
}

/// Point counts of a Demazure resolution over every Iwahori cell of its
/// image, sorted by (length, canonical word).
pub fn demazure_cell_counts(
    cs: &CoxeterSystem,
    dw: &DemazureWord,
    q: u64,
) -> Result<Vec<DemazureCell>> {
    validate_q(q)?;
    let qb = BigUint::from(q);
    let mut counts: HashMap<IwahoriWeylElement, BigUint> = HashMap::new();
    counts.insert(cs.identity(), BigUint::one());
    for &letter in dw.expression().word() {
        let s = cs.generator(letter)?;
        let mut next: HashMap<IwahoriWeylElement, BigUint> = HashMap::new();
        for (y, g) in &counts {
            let ys = y.mul(s);
            let ascent = cs.length(&ys) > cs.length(y);
            let (stay, cross) = if ascent {
                (g.clone(), g * &qb)
            } else {
                (g * &qb, g.clone())
            };
            *next.entry(y.clone()).or_insert_with(BigUint::zero) += stay;
            *next.entry(ys).or_insert_with(BigUint::zero) += cross;
        }
        counts = next;
    }
    let mut cells = Vec::with_capacity(counts.len());
    for (x, total) in counts {
        let length = cs.length(&x);
        let cell_size = qb.pow(length as u32);
        let fiber = &total / &cell_size;
        let rem = &total % &cell_size;
        assert!(rem.is_zero(), "fiber count not constant along a cell");
        cells.push(DemazureCell {
            word: cs.canonical_word(&x)?,
            length,
            total,
            fiber,
        });
    }
    cells.sort_by(|a, b| (a.length, &a.word).cmp(&(b.length, &b.word)));
    Ok(cells)
}

/// Fiber size of the Demazure resolution over any point of the Iwahori cell
/// named by `target_cell`; errors if the cell is not in the image.
pub fn demazure_fiber_profile(
    cs: &CoxeterSystem,
    dw: &DemazureWord,
    target_cell: &[usize],
    q: u64,
) -> Result<BigUint> {
    let target = cs.element(target_cell)?;
    if !bruhat_leq(cs, target_cell, dw.expression().word())? {
        return Err(KitError::InvalidInput(
            "target cell is not in the image of the resolution".into(),
        ));
    }
    let target_word = cs.canonical_word(&target)?;
    let cells = demazure_cell_counts(cs, dw, q)?;
    cells
        .into_iter()
        .find(|c| c.word == target_word)
        .map(|c| c.fiber)
        .ok_or_else(|| {
            KitError::InvalidInput("target cell is not in the image of the resolution".into())
        })
}

/// Σ q^ℓ(v) over the distinct elements v ≤ w, each counted once (the
/// F_q-points of the Schubert variety of w in the full affine flag variety).
fn interval_point_count(cs: &CoxeterSystem, w: &IwahoriWeylElement, q: u64) -> Result<BigUint> {
    let word = cs.canonical_word(w)?;
    interval_elements(cs, &word).map(|els| {
        let qb = BigUint::from(q);
        els.iter()
            .map(|v| qb.pow(cs.length(v) as u32))
            .sum::<BigUint>()
    })
}

/// The distinct elements below the element of the reduced word `word`,
/// enumerated as subwords.
fn interval_elements(cs: &CoxeterSystem, word: &[usize]) -> Result<Vec<IwahoriWeylElement>> {
    let n = word.len();
    if n > MAX_SUBWORD_LENGTH {
        return Err(KitError::BoundExceeded(format!(
            "word length {n} exceeds subword-enumeration bound {MAX_SUBWORD_LENGTH}"
        )));
    }
    let gens: Vec<IwahoriWeylElement> = word
        .iter()
        .map(|&i| cs.generator(i).map(|g| g.clone()))
        .collect::<Result<_>>()?;
    let mut seen: HashSet<IwahoriWeylElement> = HashSet::new();
    for mask in 0u32..(1u32 << n) {
        let mut x = cs.identity();
        for (k, g) in gens.iter().enumerate() {
            if mask & (1 << k) != 0 {
                x = x.mul(g);
            }
        }
        seen.insert(x);
    }
    Ok(seen.into_iter().collect())
}

/// Number of F_q-points of the Schubert variety of w in the partial affine
/// flag variety of the parahoric J: Σ q^ℓ(v) over v ≤ w minimal in v·W_J.
/// Requires w itself minimal in w·W_J.
pub fn schubert_point_count(
    cs: &CoxeterSystem,
    w: &[usize],
    j: &ParahoricType,
    q: u64,
) -> Result<BigUint> {
    validate_q(q)?;
    let x = cs.element(w)?;
    if !is_min_coset_rep(cs, &x, j)? {
        return Err(KitError::InvalidInput(
            "w is not the minimal representative of its coset".into(),
        ));
    }
    if j.indices().is_empty() {
        return interval_point_count(cs, &x, q);
    }
    let word = cs.canonical_word(&x)?;
    let qb = BigUint::from(q);
    let mut sum = BigUint::zero();
    for v in interval_elements(cs, &word)? {
        if is_min_coset_rep(cs, &v, j)? {
            sum += qb.pow(cs.length(&v) as u32);
        }
    }
    Ok(sum)
}

/// Whether x has no right descent in J (equivalently, is minimal in x·W_J).
fn is_min_coset_rep(cs: &CoxeterSystem, x: &IwahoriWeylElement, j: &ParahoricType) -> Result<bool> {
    let lx = cs.length(x);
    for &i in j.indices() {
        let s = cs.generator(i)?;
        if cs.length(&x.mul(&s)) < lx {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Parses a word argument and certifies it reduced in one step.
pub fn demazure_word_from_str(cs: &CoxeterSystem, text: &str) -> Result<DemazureWord> {
    DemazureWord::new(cs, &parse_word(text)?)
}
