//! Exact arithmetic in truncated Laurent series over the dual numbers
//! R = F_q[ε] with ε² = 0: the coefficient ring is the smallest Artinian
//! test ring with nontrivial nilpotents, and precision is tracked
//! pessimistically so no operation ever guesses an unknown coefficient.

use std::collections::BTreeMap;

use crate::error::{KitError, Result};
use crate::fq::FqField;

/// Default truncation window bound for operations that must truncate.
pub const DEFAULT_PRECISION: i64 = 16;

/// An element a + bε of F_q[ε] (ε² = 0); a and b are field codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dual {
    pub a: u16,
    pub b: u16,
}

impl Dual {
    pub const ZERO: Dual = Dual { a: 0, b: 0 };
    pub const ONE: Dual = Dual { a: 1, b: 0 };
    pub const EPS: Dual = Dual { a: 0, b: 1 };

    pub fn new(a: u16, b: u16) -> Self {
        Dual { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Units of F_q[ε] are exactly the elements with nonzero residue.
    pub fn is_unit(&self) -> bool {
        self.a != 0
    }

    /// Nilpotents are exactly the multiples of ε.
    pub fn is_nilpotent(&self) -> bool {
        self.a == 0
    }
}

/// A Laurent series over F_q[ε] with finitely many known coefficients.
/// `prec = None` means exact (every unstored coefficient is zero);
/// `prec = Some(P)` means coefficients above z^P are unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedLaurentSeries {
    coeffs: BTreeMap<i64, Dual>,
    prec: Option<i64>,
}

impl TruncatedLaurentSeries {
    /// The exact zero series.
    pub fn zero() -> Self {
        TruncatedLaurentSeries { coeffs: BTreeMap::new(), prec: None }
    }

    /// The exact constant 1.
    pub fn one() -> Self {
        Self::monomial(0, Dual::ONE)
    }

    /// The exact single term c·z^exp.
    pub fn monomial(exp: i64, c: Dual) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        TruncatedLaurentSeries { coeffs, prec: None }
    }

    /// Exact series from distinct-exponent terms.
    pub fn from_terms(terms: &[(i64, Dual)]) -> Self {
        let mut coeffs = BTreeMap::new();
        for &(exp, c) in terms {
            if !c.is_zero() {
                let prev = coeffs.insert(exp, c);
                assert!(prev.is_none(), "duplicate exponent {exp}");
            }
        }
        TruncatedLaurentSeries { coeffs, prec: None }
    }

    /// Forgets all coefficients above z^p, marking them unknown.
    pub fn truncated(mut self, p: i64) -> Self {
        self.coeffs.retain(|&e, _| e <= p);
        self.prec = Some(match self.prec {
            None => p,
            Some(old) => old.min(p),
        });
        self
    }

    /// Precision bound: `None` for exact series.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.prec.is_none() && self.coeffs.is_empty()
    }

    /// The coefficient of z^n; errors if n lies beyond the known window.
    pub fn coeff(&self, n: i64) -> Result<Dual> {
        if let Some(p) = self.prec {
            if n > p {
                return Err(KitError::Precision(format!(
                    "coefficient of z^{n} is unknown beyond precision {p}"
                )));
            }
        }
        Ok(self.coeffs.get(&n).copied().unwrap_or(Dual::ZERO))
    }

    /// Known nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Dual)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    /// Lowest exponent with a known nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    fn normalized(mut self) -> Self {
        self.coeffs.retain(|_, c| !c.is_zero());
        if let Some(p) = self.prec {
            self.coeffs.retain(|&e, _| e <= p);
        }
        self
    }
}

/// The ring R((z)) with R = F_q[ε]: owns the coefficient field and provides
/// all series arithmetic.
#[derive(Debug, Clone)]
pub struct SeriesRing {
    field: FqField,
}

impl SeriesRing {
    /// Builds R((z)) over F_q[ε]; q must be a prime power ≤ 32.
    pub fn new(q: u64) -> Result<Self> {
        Ok(SeriesRing { field: FqField::new(q)? })
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    // ----- coefficient arithmetic in F_q[ε] -----

    pub fn d_add(&self, x: Dual, y: Dual) -> Dual {
        Dual::new(self.field.add(x.a, y.a), self.field.add(x.b, y.b))
    }

    pub fn d_neg(&self, x: Dual) -> Dual {
        Dual::new(self.field.neg(x.a), self.field.neg(x.b))
    }

    pub fn d_sub(&self, x: Dual, y: Dual) -> Dual {
        self.d_add(x, self.d_neg(y))
    }

    /// (a₁ + b₁ε)(a₂ + b₂ε) = a₁a₂ + (a₁b₂ + b₁a₂)ε.
    pub fn d_mul(&self, x: Dual, y: Dual) -> Dual {
        Dual::new(
            self.field.mul(x.a, y.a),
            self.field.add(self.field.mul(x.a, y.b), self.field.mul(x.b, y.a)),
        )
    }

    /// (a + bε)⁻¹ = a⁻¹ − b·a⁻²·ε; errors on nilpotents.
    pub fn d_inv(&self, x: Dual) -> Result<Dual> {
        let ai = self.field.inv(x.a).map_err(|_| {
            KitError::InvalidInput("nilpotent element of F_q[eps] has no inverse".into())
        })?;
        let b = self.field.neg(self.field.mul(x.b, self.field.mul(ai, ai)));
        Ok(Dual::new(ai, b))
    }

    // ----- series arithmetic -----

    pub fn add(&self, f: &TruncatedLaurentSeries, g: &TruncatedLaurentSeries) -> TruncatedLaurentSeries {
        let prec = match (f.prec, g.prec) {
            (None, None) => None,
            (Some(p), None) | (None, Some(p)) => Some(p),
            (Some(p1), Some(p2)) => Some(p1.min(p2)),
        };
        let mut coeffs = f.coeffs.clone();
        for (&e, &c) in &g.coeffs {
            let entry = coeffs.entry(e).or_insert(Dual::ZERO);
            *entry = self.d_add(*entry, c);
        }
        TruncatedLaurentSeries { coeffs, prec }.normalized()
    }

    pub fn neg(&self, f: &TruncatedLaurentSeries) -> TruncatedLaurentSeries {
        TruncatedLaurentSeries {
            coeffs: f.coeffs.iter().map(|(&e, &c)| (e, self.d_neg(c))).collect(),
            prec: f.prec,
        }
    }

    pub fn sub(&self, f: &TruncatedLaurentSeries, g: &TruncatedLaurentSeries) -> TruncatedLaurentSeries {
        self.add(f, &self.neg(g))
    }

    /// Product with pessimistic precision: the result is known only where
    /// every contributing partial product is known.
    pub fn mul(&self, f: &TruncatedLaurentSeries, g: &TruncatedLaurentSeries) -> TruncatedLaurentSeries {
        if f.is_exact_zero() || g.is_exact_zero() {
            return TruncatedLaurentSeries::zero();
        }
        // First exponent at which a factor could be nonzero.
        let lo = |s: &TruncatedLaurentSeries| -> i64 {
            match (s.min_exp(), s.prec) {
                (Some(m), _) => m,
                (None, Some(p)) => p + 1,
                (None, None) => unreachable!("exact zero handled above"),
            }
        };
        let prec = match (f.prec, g.prec) {
            (None, None) => None,
            (Some(pf), None) => Some(pf + lo(g)),
            (None, Some(pg)) => Some(pg + lo(f)),
            (Some(pf), Some(pg)) => Some((pf + lo(g)).min(pg + lo(f))),
        };
        let mut coeffs: BTreeMap<i64, Dual> = BTreeMap::new();
        for (&ef, &cf) in &f.coeffs {
            for (&eg, &cg) in &g.coeffs {
                let e = ef + eg;
                if let Some(p) = prec {
                    if e > p {
                        continue;
                    }
                }
                let entry = coeffs.entry(e).or_insert(Dual::ZERO);
                *entry = self.d_add(*entry, self.d_mul(cf, cg));
            }
        }
        TruncatedLaurentSeries { coeffs, prec }.normalized()
    }

    pub fn pow(&self, f: &TruncatedLaurentSeries, e: u64) -> TruncatedLaurentSeries {
        let mut acc = TruncatedLaurentSeries::one();
        let mut base = f.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// The reduction modulo ε, kept as a series with zero ε-components.
    pub fn residue_part(&self, f: &TruncatedLaurentSeries) -> TruncatedLaurentSeries {
        TruncatedLaurentSeries {
            coeffs: f
                .coeffs
                .iter()
                .filter(|(_, c)| c.a != 0)
                .map(|(&e, &c)| (e, Dual::new(c.a, 0)))
                .collect(),
            prec: f.prec,
        }
    }

    /// The ε-components of f, re-expressed as a residue-field series.
    pub fn eps_part(&self, f: &TruncatedLaurentSeries) -> TruncatedLaurentSeries {
        TruncatedLaurentSeries {
            coeffs: f
                .coeffs
                .iter()
                .filter(|(_, c)| c.b != 0)
                .map(|(&e, &c)| (e, Dual::new(c.b, 0)))
                .collect(),
            prec: f.prec,
        }
    }

    /// Valuation of f mod ε: lowest exponent with unit coefficient.
    /// `Ok(None)` when f is exactly nilpotent; errors when truncation hides
    /// the answer.
    pub fn residue_valuation(&self, f: &TruncatedLaurentSeries) -> Result<Option<i64>> {
        if let Some((&e, _)) = f.coeffs.iter().find(|(_, c)| c.a != 0) {
            return Ok(Some(e));
        }
        match f.prec {
            None => Ok(None),
            Some(p) => Err(KitError::Precision(format!(
                "all coefficients known up to z^{p} are nilpotent; unit status undecidable"
            ))),
        }
    }

    /// Multiplicative inverse of a unit, with known coefficients up to
    /// z^target_prec (exact when f is a single unit term, or a unit term
    /// plus pure-ε terms below it).
    pub fn inverse(
        &self,
        f: &TruncatedLaurentSeries,
        target_prec: i64,
    ) -> Result<TruncatedLaurentSeries> {
        let m = self
            .residue_valuation(f)?
            .ok_or_else(|| KitError::InvalidInput("series is not a unit of R((z))".into()))?;
        let a = self.residue_part(f);
        let b = self.eps_part(f);
        // A⁻¹ for A = z^m·(c₀ + c₁z + …): power-series recursion on the unit.
        let c0 = a.coeff(m)?;
        let c0i = self.d_inv(c0)?;
        let exact = a.is_exact() && a.coeffs.len() == 1;
        let ainv = if exact {
            TruncatedLaurentSeries::monomial(-m, c0i)
        } else {
            let rel_deg = target_prec + m;
            if rel_deg < 0 {
                return Err(KitError::InvalidInput(format!(
                    "inverse precision {target_prec} is below the leading exponent {}",
                    -m
                )));
            }
            if let Some(pa) = a.prec {
                if rel_deg > pa - m {
                    return Err(KitError::Precision(format!(
                        "inverse to z^{target_prec} needs coefficients beyond precision {pa}"
                    )));
                }
            }
            let mut d = vec![Dual::ZERO; rel_deg as usize + 1];
            d[0] = c0i;
            for n in 1..=rel_deg {
                let mut s = Dual::ZERO;
                for i in 1..=n {
                    let ci = a.coeff(m + i)?;
                    if !ci.is_zero() {
                        s = self.d_add(s, self.d_mul(ci, d[(n - i) as usize]));
                    }
                }
                d[n as usize] = self.d_neg(self.d_mul(c0i, s));
            }
            let coeffs: BTreeMap<i64, Dual> = d
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(n, c)| (n as i64 - m, c))
                .collect();
            TruncatedLaurentSeries { coeffs, prec: Some(target_prec) }
        };
        if b.is_exact_zero() {
            return Ok(ainv);
        }
        // (A + εB)⁻¹ = A⁻¹ − ε·B·A⁻¹·A⁻¹.
        let correction = self.mul(&self.mul(&b, &ainv), &ainv);
        let eps_corr = TruncatedLaurentSeries {
            coeffs: correction
                .coeffs
                .iter()
                .map(|(&e, &c)| (e, Dual::new(0, self.field.neg(c.a))))
                .collect(),
            prec: correction.prec,
        };
        Ok(self.add(&ainv, &eps_corr).normalized())
    }

    /// True iff f is a unit of R((z)): its reduction mod ε is nonzero.
    /// Errors when every known coefficient is nilpotent but truncation
    /// leaves the answer open.
    pub fn is_unit_laurent(&self, f: &TruncatedLaurentSeries) -> Result<bool> {
        match self.residue_valuation(f) {
            Ok(Some(_)) => Ok(true),
            Ok(None) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Unit test for polynomials in z⁻¹ over R: the constant term must be a
    /// unit and every strictly negative coefficient nilpotent.
    pub fn is_unit_neg_poly(&self, f: &TruncatedLaurentSeries) -> Result<bool> {
        if !f.is_exact() {
            return Err(KitError::InvalidInput(
                "unit test for z^-1-polynomials requires an exact series".into(),
            ));
        }
        if f.terms().any(|(e, _)| e > 0) {
            return Err(KitError::InvalidInput(
                "not a polynomial in z^-1: positive exponent present".into(),
            ));
        }
        if !f.coeff(0)?.is_unit() {
            return Ok(false);
        }
        Ok(f.terms().all(|(e, c)| e == 0 || c.is_nilpotent()))
    }

    // ----- literal syntax -----

    /// Parses the CLI literal syntax: terms like `1`, `e`, `z^-1`, `2*e*z^3`
    /// joined by `+`/`-`; `e` is the nilpotent generator.
    pub fn parse(&self, text: &str) -> Result<TruncatedLaurentSeries> {
        let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(KitError::InvalidInput("empty series literal".into()));
        }
        // Split into signed terms at +/- not preceded by '^' or '*'.
        let bytes = src.as_bytes();
        let mut pieces: Vec<(i64, String)> = Vec::new();
        let mut start = 0usize;
        let mut sign = 1i64;
        let mut i = 0usize;
        if bytes[0] == b'+' || bytes[0] == b'-' {
            sign = if bytes[0] == b'-' { -1 } else { 1 };
            start = 1;
            i = 1;
        }
        while i < bytes.len() {
            let c = bytes[i];
            if (c == b'+' || c == b'-') && i > start && bytes[i - 1] != b'^' && bytes[i - 1] != b'*'
            {
                pieces.push((sign, src[start..i].to_string()));
                sign = if c == b'-' { -1 } else { 1 };
                start = i + 1;
            }
            i += 1;
        }
        pieces.push((sign, src[start..].to_string()));
        let mut out = TruncatedLaurentSeries::zero();
        for (sgn, term) in pieces {
            let (exp, coeff) = self.parse_term(sgn, &term)?;
            out = self.add(&out, &TruncatedLaurentSeries::monomial(exp, coeff));
        }
        Ok(out)
    }

    fn parse_term(&self, sign: i64, term: &str) -> Result<(i64, Dual)> {
        if term.is_empty() {
            return Err(KitError::InvalidInput("empty term in series literal".into()));
        }
        let mut int_coeff = 1i64;
        let mut eps_count = 0u32;
        let mut exp = 0i64;
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(KitError::InvalidInput(format!("malformed term '{term}'")));
            }
            if factor == "e" {
                eps_count += 1;
            } else if let Some(rest) = factor.strip_prefix('z') {
                if rest.is_empty() {
                    exp += 1;
                } else if let Some(e) = rest.strip_prefix('^') {
                    let k: i64 = e.parse().map_err(|_| {
                        KitError::InvalidInput(format!("bad exponent '{e}' in series literal"))
                    })?;
                    exp += k;
                } else {
                    return Err(KitError::InvalidInput(format!("malformed factor '{factor}'")));
                }
            } else if let Ok(n) = factor.parse::<i64>() {
                int_coeff = int_coeff.checked_mul(n).ok_or_else(|| {
                    KitError::InvalidInput("coefficient overflow in series literal".into())
                })?;
            } else {
                return Err(KitError::InvalidInput(format!("malformed factor '{factor}'")));
            }
        }
        let c = self.field.from_int(sign * int_coeff);
        let coeff = match eps_count {
            0 => Dual::new(c, 0),
            1 => Dual::new(0, c),
            _ => Dual::ZERO, // ε² = 0
        };
        Ok((exp, coeff))
    }

    /// Renders a series back to the literal syntax (codes print as
    /// integers); truncated series carry a trailing `+O(z^k)` marker.
    pub fn format(&self, f: &TruncatedLaurentSeries) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (e, c) in f.terms() {
            if c.a != 0 {
                parts.push(render_term(c.a, false, e));
            }
            if c.b != 0 {
                parts.push(render_term(c.b, true, e));
            }
        }
        let mut out = if parts.is_empty() { "0".to_string() } else { parts.join("+") };
        if let Some(p) = f.prec {
            out.push_str(&format!("+O(z^{})", p + 1));
        }
        out
    }
}

fn render_term(code: u16, eps: bool, exp: i64) -> String {
    let mut factors: Vec<String> = Vec::new();
    if code != 1 || (!eps && exp == 0) {
        factors.push(code.to_string());
    }
    if eps {
        factors.push("e".to_string());
    }
    if exp == 1 {
        factors.push("z".to_string());
    } else if exp != 0 {
        factors.push(format!("z^{exp}"));
    }
    factors.join("*")
}
