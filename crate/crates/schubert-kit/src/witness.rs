//! Constructive non-reducedness witnesses: classes of units of R((z))
//! modulo p^k-th powers and power-series units (R = F_q[ε], ε² = 0), the
//! determinant-route Kottwitz class for adjoint type A, and the
//! reducedness / ind-flat-locus oracles driven by |π₁|.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{KitError, Result};
use crate::fq::FqField;
use crate::root_datum::{is_semisimple, pi1, RootDatum};
use crate::series::{Dual, SeriesRing, TruncatedLaurentSeries};

/// Class of a unit f ∈ R((z))ˣ modulo (R((z))ˣ)^{p^k}·R[[z]]ˣ, in the
/// normal form (valuation mod p^k, strictly negative ε-tail over F_q).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessClass {
    /// p^k.
    pub modulus: u64,
    /// Valuation of the residue reduction, mod p^k.
    pub valuation_class: u64,
    /// Negative-exponent coefficients of the logarithmic ε-tail.
    pub nilpotent_tail: BTreeMap<i64, u16>,
}

impl WitnessClass {
    /// The identity class for modulus p^k.
    pub fn trivial(modulus: u64) -> Self {
        WitnessClass { modulus, valuation_class: 0, nilpotent_tail: BTreeMap::new() }
    }

    /// Trivial iff the valuation class vanishes and the tail is empty.
    pub fn is_trivial(&self) -> bool {
        self.valuation_class == 0 && self.nilpotent_tail.is_empty()
    }

    /// Group law, matching multiplication of representatives.
    pub fn combine(&self, other: &WitnessClass, field: &FqField) -> Result<WitnessClass> {
        if self.modulus != other.modulus {
            return Err(KitError::InvalidInput(format!(
                "cannot combine classes of different moduli {} and {}",
                self.modulus, other.modulus
            )));
        }
        let mut tail = self.nilpotent_tail.clone();
        for (&e, &c) in &other.nilpotent_tail {
            let entry = tail.entry(e).or_insert(0);
            *entry = field.add(*entry, c);
        }
        tail.retain(|_, c| *c != 0);
        Ok(WitnessClass {
            modulus: self.modulus,
            valuation_class: (self.valuation_class + other.valuation_class) % self.modulus,
            nilpotent_tail: tail,
        })
    }
}

impl fmt::Display for WitnessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail = self
            .nilpotent_tail
            .iter()
            .map(|(e, c)| format!("{e}: {c}"))
            .collect::<Vec<_>>()
            .join(", ");
        write!(f, "({} mod {}; tail {{{}}})", self.valuation_class, self.modulus, tail)
    }
}

/// Normal-form class of a unit f = z^m·g·(1+εh): returns (m mod p^k,
/// negative tail of h). Errors when f is not a unit or truncation hides
/// the tail.
pub fn class_mod_pk(
    ring: &SeriesRing,
    f: &TruncatedLaurentSeries,
    k: u32,
) -> Result<WitnessClass> {
    if k == 0 {
        return Err(KitError::InvalidInput("k must be positive".into()));
    }
    let modulus = ring
        .p()
        .checked_pow(k)
        .ok_or_else(|| KitError::InvalidInput(format!("p^{k} overflows")))?;
    let m = ring
        .residue_valuation(f)?
        .ok_or_else(|| KitError::InvalidInput("series is not a unit of R((z))".into()))?;
    let valuation_class = m.rem_euclid(modulus as i64) as u64;
    let b = ring.eps_part(f);
    let mut tail = BTreeMap::new();
    if let Some(lo_b) = b.min_exp() {
        if lo_b < m {
            // h = B·A⁻¹ needs A⁻¹ known up to z^(−1 − lo_B).
            let a = ring.residue_part(f);
            let ainv = ring.inverse(&a, -1 - lo_b)?;
            let h = ring.mul(&b, &ainv);
            if let Some(p) = h.precision() {
                if p < -1 {
                    return Err(KitError::Precision(
                        "precision window too small to extract the negative tail".into(),
                    ));
                }
            }
            for (e, c) in h.terms() {
                if e < 0 && c.a != 0 {
                    tail.insert(e, c.a);
                }
            }
        }
    }
    Ok(WitnessClass { modulus, valuation_class, nilpotent_tail: tail })
}

/// Kottwitz class of a matrix in adjoint type A_{n−1}: the class of det M
/// modulo p^k-th powers, for p^k the p-part of n. Errors if p ∤ n or M is
/// not invertible over R((z)).
pub fn kottwitz_class_pgl(
    ring: &SeriesRing,
    n: u64,
    m: &[Vec<TruncatedLaurentSeries>],
) -> Result<WitnessClass> {
    let p = ring.p();
    if n == 0 || n % p != 0 {
        return Err(KitError::InvalidInput(format!(
            "p = {p} does not divide n = {n}; no mu_p factor to route through"
        )));
    }
    let mut k = 0u32;
    let mut rest = n;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if m.len() != n as usize || m.iter().any(|row| row.len() != n as usize) {
        return Err(KitError::InvalidInput(format!("matrix is not {n}x{n}")));
    }
    let det = determinant(ring, m);
    if !ring.is_unit_laurent(&det)? {
        return Err(KitError::InvalidInput("matrix is not invertible over R((z))".into()));
    }
    class_mod_pk(ring, &det, k)
}

/// Cofactor-expansion determinant over the series ring.
fn determinant(ring: &SeriesRing, m: &[Vec<TruncatedLaurentSeries>]) -> TruncatedLaurentSeries {
    let n = m.len();
    if n == 0 {
        return TruncatedLaurentSeries::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = TruncatedLaurentSeries::zero();
    for col in 0..n {
        if m[0][col].is_exact_zero() {
            continue;
        }
        let minor: Vec<Vec<TruncatedLaurentSeries>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let mut term = ring.mul(&m[0][col], &determinant(ring, &minor));
        if col % 2 == 1 {
            term = ring.neg(&term);
        }
        det = ring.add(&det, &term);
    }
    det
}

/// Why a local model fails to be reduced, when it does.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NonReducedCause {
    /// The group has central torus directions.
    NotSemisimple,
    /// p divides |π₁|: a concrete witness series with verified nontrivial
    /// class through the μ_{p^k} factor.
    TorsionPrime {
        p: u64,
        k: u32,
        /// Canonical literal of the witness unit (1 + εz⁻¹).
        witness: String,
        class: WitnessClass,
    },
}

/// Answer of the reducedness oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Reducedness {
    Reduced,
    NonReduced(NonReducedCause),
}

/// Reduced iff the group is semisimple and p ∤ |π₁|; otherwise returns the
/// obstruction, with a self-verified witness class in the torsion case.
pub fn reducedness_oracle(rd: &RootDatum, p: u64) -> Result<Reducedness> {
    match crate::fq::prime_power(p) {
        Some((_, 1)) => {}
        _ => return Err(KitError::InvalidInput(format!("p = {p} is not prime"))),
    }
    if !is_semisimple(rd) {
        return Ok(Reducedness::NonReduced(NonReducedCause::NotSemisimple));
    }
    let group = pi1(rd);
    let mut k = 0u32;
    for &d in &group.invariant_factors {
        let mut n = d;
        let mut v = 0u32;
        while n % p == 0 {
            n /= p;
            v += 1;
        }
        k = k.max(v);
    }
    if k == 0 {
        return Ok(Reducedness::Reduced);
    }
    let ring = SeriesRing::new(p)?;
    let witness = TruncatedLaurentSeries::from_terms(&[(0, Dual::ONE), (-1, Dual::EPS)]);
    let class = class_mod_pk(&ring, &witness, k)?;
    assert!(!class.is_trivial(), "witness class must be nontrivial");
    Ok(Reducedness::NonReduced(NonReducedCause::TorsionPrime {
        p,
        k,
        witness: "1+e*z^-1".into(),
        class,
    }))
}

/// The set of primes over which ind-flatness fails, when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum IndFlatLocus {
    /// Ind-flat exactly away from these primes (empty: ind-flat everywhere).
    ExcludedPrimes(Vec<u64>),
    /// Open for non-semisimple groups.
    Unknown,
}

/// For semisimple groups: the prime divisors of |π₁|; otherwise Unknown.
pub fn ind_flat_locus(rd: &RootDatum) -> IndFlatLocus {
    if !is_semisimple(rd) {
        return IndFlatLocus::Unknown;
    }
    IndFlatLocus::ExcludedPrimes(pi1(rd).prime_divisors())
}

/// Random exact unit of R((z)) with small support, for property tests.
pub fn random_unit_series(ring: &SeriesRing, rng: &mut impl Rng) -> TruncatedLaurentSeries {
    let q = ring.q() as u16;
    let v: i64 = rng.gen_range(-3..=3);
    let mut terms = vec![(v, Dual::new(rng.gen_range(1..q.max(2)), rng.gen_range(0..q)))];
    for off in 1..=rng.gen_range(0..=4) {
        let c = Dual::new(rng.gen_range(0..q), rng.gen_range(0..q));
        if !c.is_zero() {
            terms.push((v + off, c));
        }
    }
    TruncatedLaurentSeries::from_terms(&terms)
}

/// Random exact unit of R[[z]] (valuation 0), for kernel-element tests.
pub fn random_integral_unit(ring: &SeriesRing, rng: &mut impl Rng) -> TruncatedLaurentSeries {
    let q = ring.q() as u16;
    let mut terms = vec![(0i64, Dual::new(rng.gen_range(1..q.max(2)), rng.gen_range(0..q)))];
    for off in 1..=rng.gen_range(0..=4) {
        let c = Dual::new(rng.gen_range(0..q), rng.gen_range(0..q));
        if !c.is_zero() {
            terms.push((off, c));
        }
    }
    TruncatedLaurentSeries::from_terms(&terms)
}
