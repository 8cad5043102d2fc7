//! The quantum torus `𝒯 = ℤ[t^{±1}]⟨M^{±1}, L^{±1}⟩ / (LM − t²ML)`, its
//! classical limit, and its action on color sequences.
//!
//! Elements are kept in `M`-before-`L` normal form `Σ c_{a,b}(t) M^a L^b`;
//! the skew relation enters through the monomial rule
//!
//! ```text
//! (M^a L^b) · (M^c L^d) = t^{2bc} M^{a+c} L^{b+d},
//! ```
//!
//! which is the bilinear extension of `a(M) L^k · b(M) L^l =
//! a(M) b(t^{2k}M) L^{k+l}`. Three structure maps matter downstream:
//!
//! - [`TorusElement::sigma`] — the mirror involution `σ(M^a L^b) =
//!   M^{−a} L^{−b}` with coefficients fixed; an algebra automorphism.
//! - [`TorusElement::epsilon`] — reduction at `t = −1` into the
//!   commutative Laurent ring [`PlaneCurvePoly`] (where `t² = 1` makes the
//!   skew relation trivial).
//! - [`TorusElement::apply`] — the action on sequences,
//!   `(L f)(n) = f(n+1)`, `(M f)(n) = t^{2n} f(n)`, extended to
//!   `Σ c_{a,b}(t) t^{2an} f(n+b)`.
//!
//! [`ColorSequence`] wraps a generator `n ↦ ℤ[t^{±1}]` with a thread-safe
//! memo and an optional odd-parity rule `f(−n) = −f(n)`, matching the
//! symmetry of colored Jones functions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ring::{LaurentScalar, RingError};

/// Errors from quantum-torus operations and sequence evaluation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QTorusError {
    /// A sequence generator failed to produce a value.
    #[error("sequence generator failed at n = {n}: {msg}")]
    Generator { n: i64, msg: String },
    /// Division by the zero polynomial.
    #[error("division by the zero plane polynomial")]
    ZeroDivisor,
    /// Exact division failed: the divisor does not divide the dividend.
    #[error("plane polynomial is not divisible by the divisor")]
    NotDivisible,
    /// A torus element or plane polynomial failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<RingError> for QTorusError {
    fn from(e: RingError) -> Self {
        QTorusError::Parse(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// TorusElement
// ---------------------------------------------------------------------------

/// An element of the quantum torus in normal form
/// `Σ c_{a,b}(t) M^a L^b`, keyed by `(a, b) = (M-exponent, L-exponent)`.
///
/// Immutable after construction; all operations return new values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TorusElement {
    terms: BTreeMap<(i64, i64), LaurentScalar>,
}

impl TorusElement {
    /// The zero element.
    pub fn zero() -> Self {
        TorusElement { terms: BTreeMap::new() }
    }

    /// The unit element `1 = M⁰L⁰`.
    pub fn one() -> Self {
        Self::monomial(LaurentScalar::one(), 0, 0)
    }

    /// The single term `c(t) M^a L^b` (zero when `c = 0`).
    pub fn monomial(c: LaurentScalar, a: i64, b: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        TorusElement { terms }
    }

    /// The generator `M`.
    pub fn m() -> Self {
        Self::monomial(LaurentScalar::one(), 1, 0)
    }

    /// The generator `L`.
    pub fn l() -> Self {
        Self::monomial(LaurentScalar::one(), 0, 1)
    }

    /// Builds an element from `(a, b, coefficient)` triples, merging
    /// duplicates and dropping zeros.
    pub fn from_mono_terms<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64, LaurentScalar)>,
    {
        let mut terms: BTreeMap<(i64, i64), LaurentScalar> = BTreeMap::new();
        for (a, b, c) in iter {
            if c.is_zero() {
                continue;
            }
            match terms.entry((a, b)) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = o.get().add(&c);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
            }
        }
        TorusElement { terms }
    }

    /// True when this is the zero element.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored `M^a L^b` terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates `((a, b), coefficient)` in `(a, b)` order.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &LaurentScalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// Coefficient of `M^a L^b` (zero when absent).
    pub fn coeff(&self, a: i64, b: i64) -> LaurentScalar {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(LaurentScalar::zero)
    }

    /// Exact sum.
    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.terms.clone();
        for (k, c) in &rhs.terms {
            match out.entry(*k) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = o.get().add(c);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
            }
        }
        TorusElement { terms: out }
    }

    /// Exact difference.
    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Exact negation.
    pub fn neg(&self) -> Self {
        TorusElement {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scale(&self, c: &LaurentScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TorusElement {
            terms: self.terms.iter().map(|(k, x)| (*k, x.mul(c))).collect(),
        }
    }

    /// Exact skew product: bilinear extension of
    /// `(M^a L^b)(M^c L^d) = t^{2bc} M^{a+c} L^{b+d}`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut acc: BTreeMap<(i64, i64), LaurentScalar> = BTreeMap::new();
        for ((a, b), ca) in &self.terms {
            for ((c, d), cb) in &rhs.terms {
                let twist = LaurentScalar::tpow(2 * b * c);
                let coeff = ca.mul(cb).mul(&twist);
                let key = (a + c, b + d);
                match acc.entry(key) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(coeff);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let s = o.get().add(&coeff);
                        if s.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = s;
                        }
                    }
                }
            }
        }
        TorusElement { terms: acc }
    }

    /// Exact `k`-th power (repeated skew multiplication).
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The mirror involution `σ`: term `(a, b) ↦ c` becomes
    /// `(−a, −b) ↦ c` with the coefficient fixed. An algebra automorphism
    /// with `σ∘σ = id`.
    pub fn sigma(&self) -> Self {
        TorusElement {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((-a, -b), c.clone()))
                .collect(),
        }
    }

    /// The classical limit `ε` at `t = −1`, landing in the commutative
    /// plane-curve ring (where the skew relation trivializes since
    /// `t² = 1`).
    pub fn epsilon(&self) -> PlaneCurvePoly {
        PlaneCurvePoly::from_terms(
            self.terms
                .iter()
                .map(|(&(a, b), c)| ((a, b), c.epsilon())),
        )
    }

    /// Applies the element to a sequence at color `n`:
    /// `Σ_{(a,b)} c_{a,b}(t) · t^{2an} · f(n+b)`.
    ///
    /// # Errors
    ///
    /// Propagates any generator failure of `f`.
    pub fn apply(&self, f: &ColorSequence, n: i64) -> Result<LaurentScalar, QTorusError> {
        // Group coefficients by L-exponent so each f(n+b) is fetched once.
        let mut by_shift: BTreeMap<i64, LaurentScalar> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            let w = c.mul_monomial(&BigInt::one(), 2 * a * n);
            by_shift
                .entry(b)
                .and_modify(|acc| *acc = acc.add(&w))
                .or_insert(w);
        }
        let mut out = LaurentScalar::zero();
        for (b, c) in by_shift {
            let v = f.value(n + b)?;
            out = out.add(&c.mul(&v));
        }
        Ok(out)
    }

    /// The sequence `n ↦ (x f)(n)`, memoized. Composition respects the
    /// action law: `(xy)·f = x·(y·f)`.
    pub fn then_sequence(&self, f: &ColorSequence) -> ColorSequence {
        let op = self.clone();
        let f = f.clone();
        ColorSequence::new(false, move |n| op.apply(&f, n))
    }
}

impl fmt::Display for TorusElement {
    /// Canonical text: terms sorted by `(b, a)`, coefficients in
    /// parentheses, e.g. `(1) M^2 L^2 + (-t^-12) M^-10 L^0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut items: Vec<(&(i64, i64), &LaurentScalar)> = self.terms.iter().collect();
        items.sort_by_key(|(&(a, b), _)| (b, a));
        for (i, (&(a, b), c)) in items.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) M^{a} L^{b}")?;
        }
        Ok(())
    }
}

impl FromStr for TorusElement {
    type Err = QTorusError;

    /// Parses the operator mini-language.
    ///
    /// A term is a juxtaposed product of factors — a parenthesized scalar,
    /// a bare scalar atom (`3`, `t^-4`, `2t^6`), or a generator power
    /// (`M^-12`, `L^2`, `L^{3}`) — and terms are joined with `+`/`-`.
    /// Factors multiply **in the skew algebra in the order written**, so
    /// both the canonical `(c) M^a L^b` form and loose input like
    /// `L^2 - t^-24 M^-12` or `L M` (which normalizves to `t^2 M L`) parse
    /// correctly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(QTorusError::Parse("empty operator".into()));
        }
        let mut pos = 0usize;
        let mut total = TorusElement::zero();
        let err = |m: &str| QTorusError::Parse(format!("{m} in operator {s:?}"));
        while pos < compact.len() {
            let mut sign = 1i64;
            while pos < compact.len() && (compact[pos] == '+' || compact[pos] == '-') {
                if compact[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            }
            if pos >= compact.len() {
                return Err(err("dangling sign"));
            }
            let mut term = TorusElement::monomial(LaurentScalar::constant(sign), 0, 0);
            let mut saw_factor = false;
            while pos < compact.len() && compact[pos] != '+' && compact[pos] != '-' {
                let ch = compact[pos];
                if ch == '(' {
                    let mut depth = 1usize;
                    let start = pos + 1;
                    let mut end = None;
                    for (i, &c) in compact.iter().enumerate().skip(start) {
                        match c {
                            '(' => depth += 1,
                            ')' => {
                                depth -= 1;
                                if depth == 0 {
                                    end = Some(i);
                                    break;
                                }
                            }
                            _ => {}
                        }
                    }
                    let end = end.ok_or_else(|| err("unbalanced parenthesis"))?;
                    let inner: String = compact[start..end].iter().collect();
                    let scalar: LaurentScalar = inner.parse()?;
                    term = term.scale(&scalar);
                    pos = end + 1;
                    saw_factor = true;
                } else if ch == 'M' || ch == 'L' {
                    pos += 1;
                    let e = parse_exponent(&compact, &mut pos).map_err(|m| err(&m))?;
                    let gen = if ch == 'M' {
                        TorusElement::monomial(LaurentScalar::one(), e, 0)
                    } else {
                        TorusElement::monomial(LaurentScalar::one(), 0, e)
                    };
                    term = term.mul(&gen);
                    saw_factor = true;
                } else if ch == 't' || ch.is_ascii_digit() {
                    // Bare scalar atom: [int] [t [^exp]].
                    let start = pos;
                    while pos < compact.len() && compact[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let coeff: BigInt = if pos > start {
                        let txt: String = compact[start..pos].iter().collect();
                        txt.parse().map_err(|_| err("bad integer"))?
                    } else {
                        BigInt::one()
                    };
                    if pos < compact.len() && compact[pos] == '*' {
                        pos += 1;
                    }
                    let e = if pos < compact.len() && compact[pos] == 't' {
                        pos += 1;
                        parse_exponent(&compact, &mut pos).map_err(|m| err(&m))?
                    } else {
                        0
                    };
                    term = term.scale(&LaurentScalar::monomial(coeff, e));
                    saw_factor = true;
                } else if ch == '*' {
                    pos += 1;
                } else {
                    return Err(err(&format!("unexpected character {ch:?}")));
                }
            }
            if !saw_factor {
                return Err(err("empty term"));
            }
            total = total.add(&term);
        }
        Ok(total)
    }
}

/// Parses an optional `^e` / `^{e}` suffix at `pos` (default exponent 1).
fn parse_exponent(chars: &[char], pos: &mut usize) -> Result<i64, String> {
    if *pos >= chars.len() || chars[*pos] != '^' {
        return Ok(1);
    }
    *pos += 1;
    let braced = *pos < chars.len() && chars[*pos] == '{';
    if braced {
        *pos += 1;
    }
    let start = *pos;
    if *pos < chars.len() && (chars[*pos] == '-' || chars[*pos] == '+') {
        *pos += 1;
    }
    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err("missing exponent after ^".into());
    }
    let txt: String = chars[start..*pos].iter().collect();
    let e: i64 = txt.parse().map_err(|_| "bad exponent".to_string())?;
    if braced {
        if *pos < chars.len() && chars[*pos] == '}' {
            *pos += 1;
        } else {
            return Err("unclosed { in exponent".into());
        }
    }
    Ok(e)
}

impl Serialize for TorusElement {
    /// JSON form: list of `{a, b, coeff}` with the coefficient in
    /// canonical scalar text.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            a: i64,
            b: i64,
            coeff: &'a LaurentScalar,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        let mut items: Vec<(&(i64, i64), &LaurentScalar)> = self.terms.iter().collect();
        items.sort_by_key(|(&(a, b), _)| (b, a));
        for (&(a, b), coeff) in items {
            seq.serialize_element(&Term { a, b, coeff })?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for TorusElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Term {
            a: i64,
            b: i64,
            coeff: LaurentScalar,
        }
        let items = Vec::<Term>::deserialize(deserializer)?;
        Ok(TorusElement::from_mono_terms(
            items.into_iter().map(|t| (t.a, t.b, t.coeff)),
        ))
    }
}

// ---------------------------------------------------------------------------
// PlaneCurvePoly
// ---------------------------------------------------------------------------

/// A commutative Laurent polynomial in `M, L` with integer coefficients —
/// the target of the classical-limit map and the home of cable
/// A-polynomials.
///
/// Terms are stored sorted by `(a, b) = (M-exponent, L-exponent)` with no
/// zeros, so structural equality is mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlaneCurvePoly {
    terms: Vec<((i64, i64), BigInt)>,
}

impl PlaneCurvePoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        PlaneCurvePoly { terms: Vec::new() }
    }

    /// The unit polynomial.
    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0, 0)
    }

    /// The single term `c M^a L^b`.
    pub fn monomial(c: BigInt, a: i64, b: i64) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            PlaneCurvePoly { terms: vec![((a, b), c)] }
        }
    }

    /// Builds from `((a, b), coefficient)` pairs, merging and dropping
    /// zeros.
    pub fn from_terms<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = ((i64, i64), BigInt)>,
    {
        let mut v: Vec<((i64, i64), BigInt)> = iter.into_iter().collect();
        v.sort_by_key(|&(k, _)| k);
        let mut out: Vec<((i64, i64), BigInt)> = Vec::with_capacity(v.len());
        for (k, c) in v {
            if let Some(last) = out.last_mut() {
                if last.0 == k {
                    last.1 += c;
                    if last.1.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            if !c.is_zero() {
                out.push((k, c));
            }
        }
        PlaneCurvePoly { terms: out }
    }

    /// Convenience constructor from machine integers (tests, tables).
    pub fn from_i64_terms(terms: &[(i64, i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(a, b, c)| ((a, b), BigInt::from(c))))
    }

    /// True when zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the unit polynomial.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == (0, 0) && self.terms[0].1.is_one()
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates `((a, b), coefficient)` in `(a, b)` order.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &BigInt)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// If this is a single term `c M^a L^b`, returns `(c, (a, b))`.
    pub fn as_monomial(&self) -> Option<(&BigInt, (i64, i64))> {
        if self.terms.len() == 1 {
            Some((&self.terms[0].1, self.terms[0].0))
        } else {
            None
        }
    }

    /// Exact sum.
    pub fn add(&self, rhs: &Self) -> Self {
        let mut out: Vec<((i64, i64), BigInt)> =
            Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (ka, ca) = &self.terms[i];
            let (kb, cb) = &rhs.terms[j];
            match ka.cmp(kb) {
                std::cmp::Ordering::Less => {
                    out.push((*ka, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*kb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((*ka, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend(rhs.terms[j..].iter().cloned());
        PlaneCurvePoly { terms: out }
    }

    /// Exact difference.
    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Exact negation.
    pub fn neg(&self) -> Self {
        PlaneCurvePoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    /// Multiplies by a single term `c M^a L^b`.
    pub fn mul_monomial(&self, c: &BigInt, a: i64, b: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PlaneCurvePoly {
            terms: self
                .terms
                .iter()
                .map(|&((x, y), ref w)| ((x + a, y + b), w * c))
                .collect(),
        }
    }

    /// Exact product.
    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        if rhs.terms.len() == 1 {
            let ((a, b), c) = &rhs.terms[0];
            return self.mul_monomial(c, *a, *b);
        }
        if self.terms.len() == 1 {
            let ((a, b), c) = &self.terms[0];
            return rhs.mul_monomial(c, *a, *b);
        }
        let mut acc: HashMap<(i64, i64), BigInt> =
            HashMap::with_capacity(self.terms.len() + rhs.terms.len());
        for ((xa, xb), cx) in &self.terms {
            for ((ya, yb), cy) in &rhs.terms {
                let slot = acc.entry((xa + ya, xb + yb)).or_insert_with(BigInt::zero);
                *slot += cx * cy;
            }
        }
        Self::from_terms(acc)
    }

    /// Exact `k`-th power.
    ///
    /// Two-term polynomials expand directly by the binomial theorem
    /// (coefficients built incrementally); everything else uses repeated
    /// squaring. The binomial path keeps large certificate powers like
    /// `(L − M^{−c})^{2k}` linear-size instead of quadratic blowup through
    /// intermediate squarings.
    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        if self.terms.len() == 2 {
            let ((xa, xb), cx) = &self.terms[0];
            let ((ya, yb), cy) = &self.terms[1];
            let mut out: Vec<((i64, i64), BigInt)> = Vec::with_capacity(k as usize + 1);
            // binom = C(k, i) · cx^{k−i} · cy^{i} for i = 0..=k.
            let mut coeff = cx.pow(k);
            for i in 0..=k {
                let key = (
                    xa * ((k - i) as i64) + ya * (i as i64),
                    xb * ((k - i) as i64) + yb * (i as i64),
                );
                out.push((key, coeff.clone()));
                if i < k {
                    // C(k,i+1)/C(k,i) = (k−i)/(i+1); swap one cx for one cy.
                    coeff = coeff * BigInt::from(k - i) * cy / (BigInt::from(i + 1) * cx);
                }
            }
            return Self::from_terms(out);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The mirror involution on the plane: `σ(M^a L^b) = M^{−a} L^{−b}`,
    /// coefficients fixed.
    pub fn sigma(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|&((a, b), ref c)| ((-a, -b), c.clone())))
    }

    /// Leading term under the graded-lexicographic order used by exact
    /// division (grade `a+b`, then `b`, then `a`).
    pub fn leading_glex(&self) -> Option<((i64, i64), &BigInt)> {
        self.terms
            .iter()
            .max_by_key(|&&((a, b), _)| (a + b, b, a))
            .map(|&(k, ref c)| (k, c))
    }

    /// If `self = c M^a L^b · rhs` for a single term, returns
    /// `(c, (a, b))` — a streaming check that never materializes the
    /// product, so it stays cheap at certificate scale (millions of
    /// terms).
    pub fn monomial_quotient(&self, rhs: &Self) -> Option<(BigInt, (i64, i64))> {
        if rhs.is_zero() || self.terms.len() != rhs.terms.len() {
            return None;
        }
        if self.is_zero() {
            return None;
        }
        // Candidate from the minimal (a, b) terms: a monomial shift
        // preserves the (a, b) sort order termwise.
        let ((xa, xb), cx) = &self.terms[0];
        let ((ya, yb), cy) = &rhs.terms[0];
        let (q, r) = num_integer::Integer::div_rem(cx, cy);
        if !r.is_zero() {
            return None;
        }
        let shift = (xa - ya, xb - yb);
        for ((ka, kb), c) in self.terms.iter().zip(rhs.terms.iter()).map(|(x, y)| {
            ((x.0 .0 - y.0 .0, x.0 .1 - y.0 .1), (&x.1, &y.1))
        }) {
            if (ka, kb) != shift || *c.0 != c.1 * &q {
                return None;
            }
        }
        Some((q, shift))
    }

    /// Exact division: returns `q` with `self = q · rhs`, or
    /// [`QTorusError::NotDivisible`].
    ///
    /// Both operands are shifted by their minimal exponent boxes so the
    /// reduction runs over ordinary (nonnegative-exponent) polynomials
    /// under the graded-lexicographic order; for an exact Laurent quotient
    /// the shifted quotient is itself ordinary, so greedy leading-term
    /// reduction is complete.
    ///
    /// # Errors
    ///
    /// [`QTorusError::ZeroDivisor`] when `rhs = 0`;
    /// [`QTorusError::NotDivisible`] when no exact quotient exists.
    pub fn exact_divide(&self, rhs: &Self) -> Result<Self, QTorusError> {
        if rhs.is_zero() {
            return Err(QTorusError::ZeroDivisor);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        // Fast path: single-term quotient.
        if let Some((c, (a, b))) = self.monomial_quotient(rhs) {
            return Ok(Self::monomial(c, a, b));
        }
        // Shift both to nonnegative exponents; the net monomial offset is
        // a unit and is restored at the end.
        let min_box = |p: &Self| {
            let ma = p.terms.iter().map(|&((a, _), _)| a).min().unwrap();
            let mb = p.terms.iter().map(|&((_, b), _)| b).min().unwrap();
            (ma, mb)
        };
        let (xa0, xb0) = min_box(self);
        let (ya0, yb0) = min_box(rhs);
        let x = self.mul_monomial(&BigInt::one(), -xa0, -xb0);
        let y = rhs.mul_monomial(&BigInt::one(), -ya0, -yb0);
        let ((la, lb), lc) = y.leading_glex().expect("divisor is nonzero");
        let lc = lc.clone();
        let mut rem = x;
        let mut q: Vec<((i64, i64), BigInt)> = Vec::new();
        while !rem.is_zero() {
            let ((ra, rb), rc) = rem.leading_glex().expect("remainder is nonzero");
            let rc = rc.clone();
            let (qa, qb) = (ra - la, rb - lb);
            if qa < 0 || qb < 0 {
                return Err(QTorusError::NotDivisible);
            }
            let (qc, r) = num_integer::Integer::div_rem(&rc, &lc);
            if !r.is_zero() {
                return Err(QTorusError::NotDivisible);
            }
            rem = rem.sub(&y.mul_monomial(&qc, qa, qb));
            q.push(((qa, qb), qc));
        }
        Ok(Self::from_terms(q).mul_monomial(&BigInt::one(), xa0 - ya0, xb0 - yb0))
    }
}

impl fmt::Display for PlaneCurvePoly {
    /// Same shape as the torus rendering with integer coefficients:
    /// terms `(c) M^a L^b` sorted by `(b, a)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut items: Vec<(&(i64, i64), &BigInt)> = self.terms.iter().map(|(k, c)| (k, c)).collect();
        items.sort_by_key(|(&(a, b), _)| (b, a));
        for (i, (&(a, b), c)) in items.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) M^{a} L^{b}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// ColorSequence
// ---------------------------------------------------------------------------

type Generator = dyn Fn(i64) -> Result<LaurentScalar, QTorusError> + Send + Sync;

struct SeqInner {
    generator: Box<Generator>,
    cache: Mutex<HashMap<i64, Arc<LaurentScalar>>>,
    parity: bool,
}

/// A discrete function `ℤ → ℤ[t^{±1}]` with thread-safe memoization and
/// an optional odd-parity rule.
///
/// With the parity rule set (the symmetry of colored Jones functions),
/// `f(0) = 0` and `f(−n) = −f(n)` are enforced by construction: the
/// generator is only consulted for `n ≥ 1`.
///
/// Cloning is shallow — clones share the memo. Memoization guarantees
/// at-most-once observable insertion per color: concurrent computers may
/// race, but the first inserted value wins and is returned to everyone.
#[derive(Clone)]
pub struct ColorSequence {
    inner: Arc<SeqInner>,
}

impl ColorSequence {
    /// Wraps a generator. When `parity` is set, the generator is only
    /// invoked for `n ≥ 1` and the odd extension is applied elsewhere.
    pub fn new<F>(parity: bool, generator: F) -> Self
    where
        F: Fn(i64) -> Result<LaurentScalar, QTorusError> + Send + Sync + 'static,
    {
        ColorSequence {
            inner: Arc::new(SeqInner {
                generator: Box::new(generator),
                cache: Mutex::new(HashMap::new()),
                parity,
            }),
        }
    }

    /// True when the odd-parity rule is active.
    pub fn has_parity_rule(&self) -> bool {
        self.inner.parity
    }

    /// The value at color `n`.
    ///
    /// # Errors
    ///
    /// Propagates generator failures as [`QTorusError::Generator`].
    pub fn value(&self, n: i64) -> Result<Arc<LaurentScalar>, QTorusError> {
        if self.inner.parity && n == 0 {
            return Ok(Arc::new(LaurentScalar::zero()));
        }
        if let Some(v) = self.inner.cache.lock().unwrap().get(&n) {
            return Ok(Arc::clone(v));
        }
        let computed = if self.inner.parity && n < 0 {
            Arc::new(self.value(-n)?.neg())
        } else {
            Arc::new((self.inner.generator)(n)?)
        };
        let mut cache = self.inner.cache.lock().unwrap();
        let v = cache.entry(n).or_insert(computed);
        Ok(Arc::clone(v))
    }

    /// Number of memoized colors (diagnostics).
    pub fn cached_len(&self) -> usize {
        self.inner.cache.lock().unwrap().len()
    }

    /// Adopts a precomputed value (persistent-cache loading). First
    /// insertion wins, matching the memoization contract.
    pub(crate) fn seed(&self, n: i64, value: LaurentScalar) {
        self.inner
            .cache
            .lock()
            .unwrap()
            .entry(n)
            .or_insert_with(|| Arc::new(value));
    }

    /// Copies out the memoized colors (persistent-cache saving).
    pub(crate) fn snapshot(&self) -> Vec<(i64, LaurentScalar)> {
        self.inner
            .cache
            .lock()
            .unwrap()
            .iter()
            .map(|(&n, v)| (n, (**v).clone()))
            .collect()
    }
}

impl fmt::Debug for ColorSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ColorSequence")
            .field("parity", &self.inner.parity)
            .field("cached", &self.cached_len())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn ls(s: &str) -> LaurentScalar {
        s.parse().expect("test scalar parses")
    }

    fn te(s: &str) -> TorusElement {
        s.parse().expect("test operator parses")
    }

    /// The quantum integer `[n] = Σ_{i=0}^{n−1} t^{2(n−1−2i)}` (unknot
    /// values), for action-law tests.
    fn unknot_seq() -> ColorSequence {
        ColorSequence::new(true, |n| {
            Ok(LaurentScalar::from_terms(
                (0..n).map(|i| (2 * (n - 1 - 2 * i), BigInt::one())),
            ))
        })
    }

    #[test]
    fn skew_relation() {
        let lm = TorusElement::l().mul(&TorusElement::m());
        assert_eq!(lm, te("(t^2) M L"));
        assert_eq!(lm.to_string(), "(t^2) M^1 L^1");
    }

    #[test]
    fn unit_law() {
        let x = te("L^2 - t^-24 M^-12");
        assert_eq!(x.mul(&TorusElement::one()), x);
        assert_eq!(TorusElement::one().mul(&x), x);
    }

    #[test]
    fn normalization_example() {
        // (M² L²)·(M^{2pq}) with pq = 6: L² M^{12} = t^{2·2·12} M^{12} L².
        let x = te("M^2 L^2");
        let y = te("M^12");
        assert_eq!(x.mul(&y), te("(t^48) M^14 L^2"));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(te("M^3 L^2").sigma(), te("M^-3 L^-2"));
        let x = te("(t^4 - 1) M^2 L^-1 + 3 M^0 L^0");
        assert_eq!(x.sigma().sigma(), x);
    }

    #[test]
    fn epsilon_examples() {
        // ε(t³·M L) = −ML.
        let x = te("(t^3) M L");
        assert_eq!(x.epsilon(), PlaneCurvePoly::from_i64_terms(&[(1, 1, -1)]));
        // ε(L² − t^{−4rs} M^{−2rs}) = L² − M^{−2rs}, rs = 6.
        let y = te("L^2 - t^-24 M^-12");
        assert_eq!(
            y.epsilon(),
            PlaneCurvePoly::from_i64_terms(&[(0, 2, 1), (-12, 0, -1)])
        );
    }

    #[test]
    fn apply_examples() {
        let ju = unknot_seq();
        // (M f)(3) = t⁶·[3] = t^{10}+t^{6}+t^{2}.
        let got = TorusElement::m().apply(&ju, 3).unwrap();
        assert_eq!(got, ls("t^2 + t^6 + t^10"));
        // (L f)(n) = f(n+1).
        let got = TorusElement::l().apply(&ju, 4).unwrap();
        assert_eq!(got, *ju.value(5).unwrap());
    }

    #[test]
    fn parity_rule() {
        let ju = unknot_seq();
        assert!(ju.value(0).unwrap().is_zero());
        for n in 1..=6 {
            let pos = ju.value(n).unwrap();
            let neg = ju.value(-n).unwrap();
            assert_eq!(*neg, pos.neg());
        }
    }

    #[test]
    fn memoization_at_most_once() {
        let calls = Arc::new(AtomicUsize::new(0));
        let c = Arc::clone(&calls);
        let f = ColorSequence::new(false, move |n| {
            c.fetch_add(1, Ordering::SeqCst);
            Ok(LaurentScalar::constant(n))
        });
        for _ in 0..5 {
            assert_eq!(*f.value(7).unwrap(), LaurentScalar::constant(7));
        }
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn generator_errors_propagate() {
        let f = ColorSequence::new(false, |n| {
            Err(QTorusError::Generator { n, msg: "undefined".into() })
        });
        assert!(TorusElement::l().apply(&f, 0).is_err());
    }

    #[test]
    fn plane_arith_examples() {
        let l = PlaneCurvePoly::from_i64_terms(&[(0, 1, 1)]);
        let one = PlaneCurvePoly::one();
        // (L−1)(L+1) = L²−1.
        assert_eq!(
            l.sub(&one).mul(&l.add(&one)),
            PlaneCurvePoly::from_i64_terms(&[(0, 2, 1), (0, 0, -1)])
        );
        // (L + M^{−2r})², r = 13.
        let f = PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-26, 0, 1)]);
        assert_eq!(
            f.pow(2),
            PlaneCurvePoly::from_i64_terms(&[(0, 2, 1), (-26, 1, 2), (-52, 0, 1)])
        );
        // x·1 = x.
        assert_eq!(f.mul(&one), f);
    }

    #[test]
    fn binomial_pow_matches_repeated_multiplication() {
        let f = PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-4, 0, -2)]);
        let mut acc = PlaneCurvePoly::one();
        for _ in 0..7 {
            acc = acc.mul(&f);
        }
        assert_eq!(f.pow(7), acc);
    }

    #[test]
    fn plane_divide_examples() {
        let l = PlaneCurvePoly::from_i64_terms(&[(0, 1, 1)]);
        let one = PlaneCurvePoly::one();
        let l2m1 = l.mul(&l).sub(&one);
        // (L²−1)/(L−1) = L+1.
        assert_eq!(l2m1.exact_divide(&l.sub(&one)).unwrap(), l.add(&one));
        // (L−1)/(L+1) → NotDivisible.
        assert_eq!(
            l.sub(&one).exact_divide(&l.add(&one)),
            Err(QTorusError::NotDivisible)
        );
        // Zero divisor.
        assert_eq!(
            l.exact_divide(&PlaneCurvePoly::zero()),
            Err(QTorusError::ZeroDivisor)
        );
        // ((L−1)(L−M^{−24})(L+M^{−26}))² ÷ (A_C)² = 1 for the (3,2;13,2)
        // A-polynomial A_C = (L−1)(L−M^{−4pq})(L+M^{−2r}).
        let a_c = l
            .sub(&one)
            .mul(&l.sub(&PlaneCurvePoly::monomial(BigInt::one(), -24, 0)))
            .mul(&l.add(&PlaneCurvePoly::monomial(BigInt::one(), -26, 0)));
        assert_eq!(a_c.pow(2).exact_divide(&a_c.pow(2)).unwrap(), one);
    }

    #[test]
    fn monomial_quotient_streaming() {
        let f = PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-4, 0, -2), (3, 2, 5)]);
        let shifted = f.mul_monomial(&BigInt::from(-7), 11, -3);
        assert_eq!(
            shifted.monomial_quotient(&f),
            Some((BigInt::from(-7), (11, -3)))
        );
        assert_eq!(shifted.monomial_quotient(&f.add(&PlaneCurvePoly::one())), None);
        // Non-monomial relation between equal-length polynomials.
        let g = PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-4, 0, 2), (3, 2, 5)]);
        assert_eq!(g.monomial_quotient(&f), None);
    }

    #[test]
    fn sigma_plane_examples() {
        let x = PlaneCurvePoly::from_i64_terms(&[(2, -3, 1)]);
        assert_eq!(x.sigma(), PlaneCurvePoly::from_i64_terms(&[(-2, 3, 1)]));
        let y = PlaneCurvePoly::from_i64_terms(&[(2, -3, 4), (0, 0, -7), (-1, 5, 2)]);
        assert_eq!(y.sigma().sigma(), y);
    }

    #[test]
    fn torus_display_round_trip() {
        let x = te("(1) M^2 L^2 + (-t^-12) M^-10 L^0");
        assert_eq!(x.to_string(), "(-t^-12) M^-10 L^0 + (1) M^2 L^2");
        let back: TorusElement = x.to_string().parse().unwrap();
        assert_eq!(back, x);
        // Loose forms.
        assert_eq!(te("L + L^-1 - t^2 - t^-2").num_terms(), 3);
        assert_eq!(te("L^2 M^3"), te("(t^12) M^3 L^2"));
    }

    #[test]
    fn torus_serde_round_trip() {
        let x = te("L^2 - t^-24 M^-12 + (3t^4 - 1) M^{5} L^{-2}");
        let j = serde_json::to_string(&x).unwrap();
        let back: TorusElement = serde_json::from_str(&j).unwrap();
        assert_eq!(back, x);
    }

    prop_compose! {
        fn arb_coeff()(terms in prop::collection::vec((-6i64..=6, -4i64..=4), 0..3)) -> LaurentScalar {
            LaurentScalar::from_terms(terms.into_iter().map(|(e, c)| (e, BigInt::from(c))))
        }
    }

    prop_compose! {
        fn arb_torus()(terms in prop::collection::vec((-3i64..=3, -3i64..=3, arb_coeff()), 0..4)) -> TorusElement {
            TorusElement::from_mono_terms(terms.into_iter())
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn skew_associativity(x in arb_torus(), y in arb_torus(), z in arb_torus()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn sigma_is_algebra_automorphism(x in arb_torus(), y in arb_torus()) {
            prop_assert_eq!(x.mul(&y).sigma(), x.sigma().mul(&y.sigma()));
            prop_assert_eq!(x.sigma().sigma(), x.clone());
            prop_assert_eq!(x.add(&y).sigma(), x.sigma().add(&y.sigma()));
        }

        #[test]
        fn epsilon_is_multiplicative(x in arb_torus(), y in arb_torus()) {
            prop_assert_eq!(x.mul(&y).epsilon(), x.epsilon().mul(&y.epsilon()));
            prop_assert_eq!(x.add(&y).epsilon(), x.epsilon().add(&y.epsilon()));
        }

        #[test]
        fn scalars_are_central(x in arb_torus(), c in arb_coeff()) {
            let s = TorusElement::monomial(c, 0, 0);
            prop_assert_eq!(x.mul(&s), s.mul(&x));
        }

        #[test]
        fn action_law(x in arb_torus(), y in arb_torus(), n in -5i64..=5) {
            let f = unknot_seq();
            let xy = x.mul(&y);
            let lhs = xy.apply(&f, n).unwrap();
            let yf = y.then_sequence(&f);
            let rhs = x.apply(&yf, n).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
