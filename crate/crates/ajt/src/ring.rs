//! Exact scalar arithmetic: Laurent polynomials in `t` over
//! arbitrary-precision integers, and the fraction field needed for exact
//! linear solving.
//!
//! Every quantity downstream — colored Jones values, operator
//! coefficients, certificate monomials — lives in `ℤ[t^{±1}]`, so this
//! module is deliberately small and airtight:
//!
//! - [`LaurentScalar`] — a sparse Laurent polynomial `Σ c_e t^e` with
//!   `BigInt` coefficients, kept sorted by exponent with no stored zeros.
//! - [`RatScalar`] — a quotient of two [`LaurentScalar`]s; equality is
//!   cross-multiplication, so reduction to lowest terms is a cosmetic
//!   (but implemented) concern, never a correctness one.
//! - [`LaurentScalar::epsilon`] — evaluation at `t = −1`, the reduction
//!   used to pass from quantum operators to classical plane curves.
//! - [`LaurentScalar::specialize`] — exact evaluation at a rational
//!   `t₀ ≠ 0`, used by the randomized exact verification mode.
//!
//! Canonical text form renders terms in increasing exponent order, e.g.
//! `-t^-18 + t^-10 + t^-6 + t^-2`, and [`LaurentScalar::from_str`]
//! round-trips it.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Errors produced by scalar arithmetic and parsing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    /// Specialization at `t₀ = 0` is undefined (negative exponents).
    #[error("cannot specialize at t0 = 0: negative exponents are undefined")]
    ZeroBase,
    /// Division by the zero polynomial.
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    /// A scalar (or rational scalar) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

/// A Laurent polynomial `Σ c_e t^e` with arbitrary-precision integer
/// coefficients.
///
/// Terms are stored sorted by exponent with no zero coefficients, so
/// structural equality is mathematical equality. Values are immutable
/// after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentScalar {
    /// `(exponent, coefficient)` pairs, strictly increasing in exponent,
    /// with every coefficient nonzero.
    terms: Vec<(i64, BigInt)>,
}

impl LaurentScalar {
    /// The zero polynomial (empty support).
    pub fn zero() -> Self {
        LaurentScalar { terms: Vec::new() }
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    /// The single term `c · t^e` (zero if `c = 0`).
    pub fn monomial(c: BigInt, e: i64) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LaurentScalar { terms: vec![(e, c)] }
        }
    }

    /// The power `t^e`.
    pub fn tpow(e: i64) -> Self {
        Self::monomial(BigInt::one(), e)
    }

    /// The constant polynomial `c`.
    pub fn constant(c: i64) -> Self {
        Self::monomial(BigInt::from(c), 0)
    }

    /// Builds a scalar from arbitrary `(exponent, coefficient)` pairs,
    /// merging duplicates and dropping zeros.
    pub fn from_terms<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, BigInt)>,
    {
        let mut v: Vec<(i64, BigInt)> = iter.into_iter().collect();
        v.sort_by_key(|&(e, _)| e);
        let mut out: Vec<(i64, BigInt)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            if let Some(last) = out.last_mut() {
                if last.0 == e {
                    last.1 += c;
                    if last.1.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            if !c.is_zero() {
                out.push((e, c));
            }
        }
        LaurentScalar { terms: out }
    }

    /// Convenience constructor from machine-integer data (tests, tables).
    pub fn from_i64_terms(terms: &[(i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    /// True when this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when this is the constant polynomial `1`.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Number of stored (nonzero) terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates `(exponent, coefficient)` in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Smallest exponent with nonzero coefficient, if any.
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.first().map(|&(e, _)| e)
    }

    /// Largest exponent with nonzero coefficient, if any.
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.last().map(|&(e, _)| e)
    }

    /// Coefficient of `t^e` (zero when absent).
    pub fn coeff(&self, e: i64) -> BigInt {
        match self.terms.binary_search_by_key(&e, |&(x, _)| x) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Exact sum.
    pub fn add(&self, rhs: &Self) -> Self {
        let mut out: Vec<(i64, BigInt)> = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &rhs.terms[j];
            match ea.cmp(eb) {
                std::cmp::Ordering::Less => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*eb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((*ea, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend(rhs.terms[j..].iter().cloned());
        LaurentScalar { terms: out }
    }

    /// Exact difference.
    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Exact negation.
    pub fn neg(&self) -> Self {
        LaurentScalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    /// Multiplies by the single term `c · t^e` (fast path; no reallocation
    /// of the support structure).
    pub fn mul_monomial(&self, c: &BigInt, e: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentScalar {
            terms: self.terms.iter().map(|(x, a)| (*x + e, a * c)).collect(),
        }
    }

    /// Exact product.
    ///
    /// Accumulates into a hash map keyed by exponent, then re-sorts; the
    /// supports in this crate are sparse relative to their degree span, so
    /// this beats dense convolution throughout.
    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        if rhs.terms.len() == 1 {
            let (e, c) = &rhs.terms[0];
            return self.mul_monomial(c, *e);
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return rhs.mul_monomial(c, *e);
        }
        let mut acc: HashMap<i64, BigInt> =
            HashMap::with_capacity(self.terms.len() + rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let slot = acc.entry(ea + eb).or_insert_with(BigInt::zero);
                *slot += ca * cb;
            }
        }
        Self::from_terms(acc)
    }

    /// Exact `k`-th power by repeated squaring.
    pub fn pow(&self, k: u32) -> Self {
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

    /// Evaluation at `t = −1`: returns `Σ c_e · (−1)^e`.
    ///
    /// This is the scalar layer of the classical-limit map `ε` and is a
    /// ring homomorphism.
    pub fn epsilon(&self) -> BigInt {
        let mut s = BigInt::zero();
        for (e, c) in &self.terms {
            if e.rem_euclid(2) == 0 {
                s += c;
            } else {
                s -= c;
            }
        }
        s
    }

    /// Exact evaluation at a rational `t₀ ≠ 0`.
    ///
    /// # Errors
    ///
    /// [`RingError::ZeroBase`] when `t₀ = 0`, since negative exponents are
    /// undefined there.
    pub fn specialize(&self, t0: &BigRational) -> Result<BigRational, RingError> {
        if t0.is_zero() {
            return Err(RingError::ZeroBase);
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += BigRational::from_integer(c.clone()) * rational_pow(t0, *e);
        }
        Ok(acc)
    }

    /// Exact division: returns `q` with `self = q · rhs` in `ℤ[t^{±1}]`,
    /// or `None` when no such quotient exists.
    ///
    /// Standard leading-term reduction from the top exponent, with a
    /// termination guard: any genuine quotient has minimum exponent at
    /// least `min_exp(self) − min_exp(rhs)`, so a candidate quotient term
    /// below that bound proves indivisibility immediately.
    ///
    /// # Errors
    ///
    /// [`RingError::ZeroDivisor`] when `rhs = 0`.
    pub fn exact_div(&self, rhs: &Self) -> Result<Option<Self>, RingError> {
        if rhs.is_zero() {
            return Err(RingError::ZeroDivisor);
        }
        if self.is_zero() {
            return Ok(Some(Self::zero()));
        }
        let lo = self.min_exp().unwrap() - rhs.min_exp().unwrap();
        let (gd, gc) = {
            let (e, c) = rhs.terms.last().unwrap();
            (*e, c.clone())
        };
        let mut rem = self.clone();
        let mut q: Vec<(i64, BigInt)> = Vec::new();
        while !rem.is_zero() {
            let (re, rc) = {
                let (e, c) = rem.terms.last().unwrap();
                (*e, c.clone())
            };
            let qe = re - gd;
            if qe < lo {
                return Ok(None);
            }
            let (qc, r) = rc.div_rem(&gc);
            if !r.is_zero() {
                return Ok(None);
            }
            rem = rem.sub(&rhs.mul_monomial(&qc, qe));
            q.push((qe, qc));
        }
        Ok(Some(Self::from_terms(q)))
    }

    /// Integer content: the GCD of all coefficients (zero polynomial → 0).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Sign of the leading (highest-exponent) coefficient: −1, 0, or +1.
    pub fn leading_sign(&self) -> i32 {
        match self.terms.last() {
            None => 0,
            Some((_, c)) => {
                if c.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    /// If this scalar is a single term `c · t^e`, returns `(c, e)`.
    pub fn as_monomial(&self) -> Option<(&BigInt, i64)> {
        if self.terms.len() == 1 {
            Some((&self.terms[0].1, self.terms[0].0))
        } else {
            None
        }
    }
}

/// Exact `t₀^e` for rational `t₀ ≠ 0` and any integer `e`.
pub fn rational_pow(t0: &BigRational, e: i64) -> BigRational {
    let mut base = if e < 0 { t0.recip() } else { t0.clone() };
    let mut k = e.unsigned_abs();
    let mut acc = BigRational::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Parses an exact rational like `2`, `-3/2`, or `5/3`.
pub fn parse_rational(s: &str) -> Result<BigRational, RingError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num).map_err(|e| RingError::Parse(format!("bad rational {s:?}: {e}")))?;
    let d = BigInt::from_str(den).map_err(|e| RingError::Parse(format!("bad rational {s:?}: {e}")))?;
    if d.is_zero() {
        return Err(RingError::Parse(format!("bad rational {s:?}: zero denominator")));
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for LaurentScalar {
    /// Canonical text form: terms in increasing exponent order, e.g.
    /// `-t^-18 + t^-10 + t^-6 + t^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if *e == 0 {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}")?;
                }
                if *e == 1 {
                    write!(f, "t")?;
                } else {
                    write!(f, "t^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentScalar {
    type Err = RingError;

    /// Parses the canonical text form (liberally: whitespace anywhere,
    /// optional `*` between coefficient and `t`, optional braces around
    /// exponents, so `3t^-4`, `3 * t^{-4}`, and `+3t^-4` all work).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(RingError::Parse("empty scalar".into()));
        }
        let bytes = compact.as_bytes();
        let mut pos = 0usize;
        let mut terms: Vec<(i64, BigInt)> = Vec::new();
        let err = |m: &str| RingError::Parse(format!("{m} in scalar {s:?}"));
        while pos < bytes.len() {
            // Sign.
            let mut sign = 1i64;
            while pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
                if bytes[pos] == b'-' {
                    sign = -sign;
                }
                pos += 1;
            }
            if pos >= bytes.len() {
                return Err(err("dangling sign"));
            }
            // Optional integer coefficient.
            let digit_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coeff = if pos > digit_start {
                BigInt::from_str(&compact[digit_start..pos]).map_err(|e| err(&e.to_string()))?
            } else {
                BigInt::one()
            };
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
            }
            // Optional `t` with optional exponent.
            let exp = if pos < bytes.len() && bytes[pos] == b't' {
                pos += 1;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let braced = pos < bytes.len() && bytes[pos] == b'{';
                    if braced {
                        pos += 1;
                    }
                    let estart = pos;
                    if pos < bytes.len() && (bytes[pos] == b'-' || bytes[pos] == b'+') {
                        pos += 1;
                    }
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if pos == estart {
                        return Err(err("missing exponent after ^"));
                    }
                    let e: i64 = compact[estart..pos].parse().map_err(|_| err("bad exponent"))?;
                    if braced {
                        if pos < bytes.len() && bytes[pos] == b'}' {
                            pos += 1;
                        } else {
                            return Err(err("unclosed { in exponent"));
                        }
                    }
                    e
                } else {
                    1
                }
            } else {
                if pos == digit_start {
                    return Err(err("expected coefficient or t"));
                }
                0
            };
            terms.push((exp, if sign < 0 { -coeff } else { coeff }));
            if pos < bytes.len() && bytes[pos] != b'+' && bytes[pos] != b'-' {
                return Err(err("unexpected character"));
            }
        }
        Ok(Self::from_terms(terms))
    }
}

impl Serialize for LaurentScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LaurentScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: RingError| D::Error::custom(e.to_string()))
    }
}

/// An element of the fraction field `ℚ(t)`, held as a quotient of two
/// Laurent polynomials.
///
/// Equality is cross-multiplication equality, so representatives need not
/// be reduced; construction nevertheless normalizes cheaply (monomial
/// shift, integer content, denominator sign) and runs a full polynomial
/// GCD when both operands are small, so that fitted coefficients display
/// in their natural reduced form.
#[derive(Debug, Clone)]
pub struct RatScalar {
    num: LaurentScalar,
    den: LaurentScalar,
}

/// Degree-span bound below which construction attempts a full polynomial
/// GCD reduction. Larger operands are only content/monomial-normalized;
/// equality and arithmetic are exact regardless.
const GCD_POLISH_SPAN: i64 = 256;

impl RatScalar {
    /// Builds `num/den`, normalizing the representative.
    ///
    /// # Panics
    ///
    /// Panics when `den = 0`; denominators arise internally from products
    /// of provably nonzero factors.
    pub fn new(num: LaurentScalar, den: LaurentScalar) -> Self {
        assert!(!den.is_zero(), "RatScalar denominator must be nonzero");
        let mut r = RatScalar { num, den };
        r.normalize();
        r
    }

    /// The zero element.
    pub fn zero() -> Self {
        RatScalar { num: LaurentScalar::zero(), den: LaurentScalar::one() }
    }

    /// The unit element.
    pub fn one() -> Self {
        RatScalar { num: LaurentScalar::one(), den: LaurentScalar::one() }
    }

    /// Embeds a Laurent polynomial.
    pub fn from_laurent(x: LaurentScalar) -> Self {
        RatScalar { num: x, den: LaurentScalar::one() }
    }

    /// Numerator of the stored representative.
    pub fn numer(&self) -> &LaurentScalar {
        &self.num
    }

    /// Denominator of the stored representative.
    pub fn denom(&self) -> &LaurentScalar {
        &self.den
    }

    /// True when the value is zero.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentScalar::one();
            return;
        }
        // Shift so the denominator's minimum exponent is 0 (a monomial is
        // a unit in the Laurent ring, so this preserves the value exactly
        // when applied to both parts).
        let shift = self.den.min_exp().unwrap();
        if shift != 0 {
            let one = BigInt::one();
            self.num = self.num.mul_monomial(&one, -shift);
            self.den = self.den.mul_monomial(&one, -shift);
        }
        // Remove the common integer content.
        let g = self.num.content().gcd(&self.den.content());
        if !g.is_one() {
            self.num = divide_content(&self.num, &g);
            self.den = divide_content(&self.den, &g);
        }
        // Try full reduction when small.
        let span = |x: &LaurentScalar| x.max_exp().unwrap() - x.min_exp().unwrap();
        if span(&self.num) <= GCD_POLISH_SPAN && span(&self.den) <= GCD_POLISH_SPAN {
            let g = laurent_gcd(&self.num, &self.den);
            if !g.is_one() {
                if let (Ok(Some(n)), Ok(Some(d))) =
                    (self.num.exact_div(&g), self.den.exact_div(&g))
                {
                    self.num = n;
                    self.den = d;
                    let shift = self.den.min_exp().unwrap();
                    if shift != 0 {
                        let one = BigInt::one();
                        self.num = self.num.mul_monomial(&one, -shift);
                        self.den = self.den.mul_monomial(&one, -shift);
                    }
                }
            }
        }
        // Positive leading coefficient on the denominator.
        if self.den.leading_sign() < 0 {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    /// Exact sum.
    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    /// Exact difference.
    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Exact negation.
    pub fn neg(&self) -> Self {
        RatScalar { num: self.num.neg(), den: self.den.clone() }
    }

    /// Exact product.
    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    /// Exact quotient.
    ///
    /// # Errors
    ///
    /// [`RingError::ZeroDivisor`] when `rhs = 0`.
    pub fn div(&self, rhs: &Self) -> Result<Self, RingError> {
        if rhs.is_zero() {
            return Err(RingError::ZeroDivisor);
        }
        Ok(Self::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num)))
    }

    /// Multiplies by a Laurent polynomial.
    pub fn mul_laurent(&self, x: &LaurentScalar) -> Self {
        Self::new(self.num.mul(x), self.den.clone())
    }

    /// If the value is a Laurent polynomial with **integer** coefficients,
    /// returns it.
    pub fn as_laurent(&self) -> Option<LaurentScalar> {
        self.num.exact_div(&self.den).ok().flatten()
    }

    /// True when the value lies in `ℚ[t^{±1}]`, i.e. the reduced
    /// denominator is constant.
    pub fn is_laurent_polynomial(&self) -> bool {
        self.den.num_terms() == 1 || self.as_laurent().is_some()
    }

    /// Exact evaluation at rational `t₀`.
    ///
    /// # Errors
    ///
    /// [`RingError::ZeroBase`] at `t₀ = 0`; [`RingError::ZeroDivisor`]
    /// when the denominator vanishes at `t₀`.
    pub fn specialize(&self, t0: &BigRational) -> Result<BigRational, RingError> {
        let d = self.den.specialize(t0)?;
        if d.is_zero() {
            return Err(RingError::ZeroDivisor);
        }
        Ok(self.num.specialize(t0)? / d)
    }
}

impl PartialEq for RatScalar {
    /// Cross-multiplication equality: `a/b = c/d ⇔ ad = cb`.
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RatScalar {}

impl fmt::Display for RatScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for RatScalar {
    type Err = RingError;

    /// Parses `(num)/(den)` or a bare scalar.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(stripped) = t.strip_prefix('(') {
            // Find the matching close paren of the leading group.
            let mut depth = 1usize;
            for (i, ch) in stripped.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            let head = &stripped[..i];
                            let rest = stripped[i + 1..].trim();
                            if rest.is_empty() {
                                return Ok(Self::from_laurent(head.parse()?));
                            }
                            let rest = rest
                                .strip_prefix('/')
                                .ok_or_else(|| RingError::Parse(format!("expected / in {s:?}")))?
                                .trim();
                            let rest = rest
                                .strip_prefix('(')
                                .and_then(|r| r.strip_suffix(')'))
                                .ok_or_else(|| {
                                    RingError::Parse(format!("expected (den) in {s:?}"))
                                })?;
                            let den: LaurentScalar = rest.parse()?;
                            if den.is_zero() {
                                return Err(RingError::ZeroDivisor);
                            }
                            return Ok(Self::new(head.parse()?, den));
                        }
                    }
                    _ => {}
                }
            }
            return Err(RingError::Parse(format!("unbalanced parens in {s:?}")));
        }
        Ok(Self::from_laurent(t.parse()?))
    }
}

impl Serialize for RatScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: RingError| D::Error::custom(e.to_string()))
    }
}

fn divide_content(x: &LaurentScalar, g: &BigInt) -> LaurentScalar {
    LaurentScalar {
        terms: x.iter().map(|(e, c)| (e, c / g)).collect(),
    }
}

/// GCD of two Laurent polynomials up to units, via a primitive Euclidean
/// sequence on the monomial-shifted ordinary polynomials.
///
/// Returned normalized: primitive, minimum exponent 0, positive leading
/// coefficient. Intended for small operands (fitted-coefficient display);
/// callers guard the degree span.
pub fn laurent_gcd(a: &LaurentScalar, b: &LaurentScalar) -> LaurentScalar {
    if a.is_zero() {
        return normalize_gcd(b);
    }
    if b.is_zero() {
        return normalize_gcd(a);
    }
    let mut x = normalize_gcd(a);
    let mut y = normalize_gcd(b);
    while !y.is_zero() {
        let r = pseudo_rem(&x, &y);
        x = y;
        y = normalize_gcd(&r);
    }
    normalize_gcd(&x)
}

fn normalize_gcd(x: &LaurentScalar) -> LaurentScalar {
    if x.is_zero() {
        return LaurentScalar::zero();
    }
    let shift = x.min_exp().unwrap();
    let mut y = x.mul_monomial(&BigInt::one(), -shift);
    let c = y.content();
    if !c.is_one() {
        y = divide_content(&y, &c);
    }
    if y.leading_sign() < 0 {
        y = y.neg();
    }
    y
}

/// Pseudo-remainder of `a` by `b` (both with min exponent 0, `b ≠ 0`):
/// the remainder of `lc(b)^{Δ+1} · a` under ordinary polynomial division.
fn pseudo_rem(a: &LaurentScalar, b: &LaurentScalar) -> LaurentScalar {
    let db = b.max_exp().unwrap();
    let lb = b.coeff(db);
    let mut rem = a.clone();
    loop {
        let da = match rem.max_exp() {
            None => return rem,
            Some(d) => d,
        };
        if da < db {
            return rem;
        }
        // rem ← lc(b)·rem − lc(rem)·t^{da−db}·b, which cancels the top term.
        let lr = rem.coeff(da);
        rem = rem.mul_monomial(&lb, 0).sub(&b.mul_monomial(&lr, da - db));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ls(s: &str) -> LaurentScalar {
        s.parse().expect("test scalar parses")
    }

    #[test]
    fn difference_of_squares() {
        let x = ls("t^2 + t^-2");
        let y = ls("t^2 - t^-2");
        assert_eq!(x.mul(&y), ls("t^4 - t^-4"));
    }

    #[test]
    fn additive_identity() {
        let x = ls("3t^5 - 2 + t^-7");
        assert_eq!(x.add(&LaurentScalar::zero()), x);
    }

    #[test]
    fn trefoil_value_expansion() {
        // (t^{12}·(t⁴+1+t^{−4}) − 1) · t^{−18} = t^{−2}+t^{−6}+t^{−10}−t^{−18}
        let inner = LaurentScalar::tpow(12)
            .mul(&ls("t^4 + 1 + t^-4"))
            .sub(&LaurentScalar::one());
        let got = inner.mul(&LaurentScalar::tpow(-18));
        assert_eq!(got, ls("-t^-18 + t^-10 + t^-6 + t^-2"));
    }

    #[test]
    fn epsilon_examples() {
        for k in -5i64..=5 {
            assert_eq!(LaurentScalar::tpow(2 * k).epsilon(), BigInt::one());
        }
        assert_eq!(ls("t^3 + t").epsilon(), BigInt::from(-2));
        // The trefoil value at n = 2 evaluates to 2 at t = −1.
        assert_eq!(ls("-t^-18 + t^-10 + t^-6 + t^-2").epsilon(), BigInt::from(2));
    }

    #[test]
    fn specialize_examples() {
        let two = BigRational::from_integer(BigInt::from(2));
        let got = ls("t^2 + t^-2").specialize(&two).unwrap();
        assert_eq!(got, parse_rational("17/4").unwrap());

        let any = parse_rational("-7/3").unwrap();
        assert!(LaurentScalar::zero().specialize(&any).unwrap().is_zero());

        let t0 = parse_rational("3/2").unwrap();
        let got = ls("t^4 - t^-4").specialize(&t0).unwrap();
        assert_eq!(got, parse_rational("6305/1296").unwrap());

        assert_eq!(
            ls("t^-1").specialize(&BigRational::zero()),
            Err(RingError::ZeroBase)
        );
    }

    #[test]
    fn display_canonical_form() {
        let x = ls("-t^-18 + t^-10 + t^-6 + t^-2");
        assert_eq!(x.to_string(), "-t^-18 + t^-10 + t^-6 + t^-2");
        assert_eq!(LaurentScalar::zero().to_string(), "0");
        assert_eq!(ls("1").to_string(), "1");
        assert_eq!(ls("-1 + 3t - 5t^2").to_string(), "-1 + 3t - 5t^2");
    }

    #[test]
    fn parse_is_liberal() {
        assert_eq!(ls("3 * t^{-4} + 2"), ls("2 + 3t^-4"));
        assert_eq!(ls("+t"), LaurentScalar::tpow(1));
        assert_eq!(ls(" - t ").to_string(), "-t");
        assert!("".parse::<LaurentScalar>().is_err());
        assert!("t^".parse::<LaurentScalar>().is_err());
        assert!("t^{3".parse::<LaurentScalar>().is_err());
        assert!("q^2".parse::<LaurentScalar>().is_err());
    }

    #[test]
    fn exact_div_examples() {
        let f = ls("t^4 - 1");
        let g = ls("t^2 + 1");
        assert_eq!(f.exact_div(&g).unwrap(), Some(ls("t^2 - 1")));
        assert_eq!(ls("t^2 - 1").exact_div(&ls("t^2 + 1")).unwrap(), None);
        // Termination guard: candidate quotient exponent drops below the bound.
        assert_eq!(ls("t^2 + 1").exact_div(&ls("t^4 + t^2 + 1")).unwrap(), None);
        // Monomial divisor.
        assert_eq!(
            ls("t^2 + t^-2").exact_div(&ls("t^-2")).unwrap(),
            Some(ls("t^4 + 1"))
        );
        assert_eq!(
            ls("1").exact_div(&LaurentScalar::zero()),
            Err(RingError::ZeroDivisor)
        );
    }

    #[test]
    fn rat_scalar_basics() {
        // (t^4 − 1)/(t^2 − 1) reduces to t^2 + 1.
        let r = RatScalar::new(ls("t^4 - 1"), ls("t^2 - 1"));
        assert_eq!(r, RatScalar::from_laurent(ls("t^2 + 1")));
        assert_eq!(r.to_string(), "1 + t^2");
        assert!(r.is_laurent_polynomial());

        // Cross-multiplication equality between unreduced representatives.
        let a = RatScalar::new(ls("t^2"), ls("1 - t^-4"));
        let b = RatScalar::new(ls("t^6"), ls("t^4 - 1"));
        assert_eq!(a, b);
        assert!(!a.is_laurent_polynomial());

        let sum = a.sub(&b);
        assert!(sum.is_zero());

        let p = a.mul(&RatScalar::from_laurent(ls("1 - t^-4")));
        assert_eq!(p, RatScalar::from_laurent(ls("t^2")));

        let q = a.div(&a.clone()).unwrap();
        assert_eq!(q, RatScalar::one());
        assert!(a.div(&RatScalar::zero()).is_err());
    }

    #[test]
    fn rat_scalar_round_trip() {
        let a = RatScalar::new(ls("t^2 - 3"), ls("1 - t^-4"));
        let s = a.to_string();
        let back: RatScalar = s.parse().unwrap();
        assert_eq!(a, back);
        let plain: RatScalar = "t^2 + 1".parse().unwrap();
        assert_eq!(plain, RatScalar::from_laurent(ls("t^2 + 1")));
    }

    #[test]
    fn serde_round_trip() {
        let x = ls("-t^-18 + t^-10 + t^-6 + t^-2");
        let j = serde_json::to_string(&x).unwrap();
        let back: LaurentScalar = serde_json::from_str(&j).unwrap();
        assert_eq!(x, back);
    }

    prop_compose! {
        fn arb_scalar()(terms in prop::collection::vec((-50i64..=50, -1_000_000i64..=1_000_000), 0..8)) -> LaurentScalar {
            LaurentScalar::from_terms(terms.into_iter().map(|(e, c)| (e, BigInt::from(c))))
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ring_laws(x in arb_scalar(), y in arb_scalar(), z in arb_scalar()) {
            // Commutativity.
            prop_assert_eq!(x.add(&y), y.add(&x));
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            // Associativity.
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            // Distributivity.
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            // No stored zeros, sorted support.
            let w = x.mul(&y).add(&z);
            prop_assert!(w.iter().all(|(_, c)| !c.is_zero()));
            let exps: Vec<i64> = w.iter().map(|(e, _)| e).collect();
            let mut sorted = exps.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(exps, sorted);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn epsilon_is_ring_homomorphism(x in arb_scalar(), y in arb_scalar()) {
            prop_assert_eq!(x.mul(&y).epsilon(), x.epsilon() * y.epsilon());
            prop_assert_eq!(x.add(&y).epsilon(), x.epsilon() + y.epsilon());
        }

        #[test]
        fn specialize_is_multiplicative(x in arb_scalar(), y in arb_scalar()) {
            let t0 = parse_rational("3/2").unwrap();
            let lhs = x.mul(&y).specialize(&t0).unwrap();
            let rhs = x.specialize(&t0).unwrap() * y.specialize(&t0).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn display_parse_round_trip(x in arb_scalar()) {
            let back: LaurentScalar = x.to_string().parse().unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn exact_div_recovers_factor(x in arb_scalar(), y in arb_scalar()) {
            prop_assume!(!y.is_zero());
            let prod = x.mul(&y);
            let q = prod.exact_div(&y).unwrap();
            prop_assert_eq!(q, Some(x));
        }
    }
}
