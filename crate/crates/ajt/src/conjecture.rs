//! Mechanical verification of the strong AJ conjecture for cables of
//! torus knots.
//!
//! For a cable `C = C(p,q; r,s)` — the `(r,s)`-cable of the torus knot
//! `T(p,q)` — this module assembles an explicit inhomogeneous annihilator
//! `R` of the colored Jones function `J_C` together with a symmetric
//! cofactor `S`, and then checks the two identities that make the pair a
//! strong AJ witness:
//!
//! * **annihilation** — `R · J_C = 0` pointwise, verified symbolically
//!   when the annihilator is small enough to expand and by exact rational
//!   specialization (with a sound mod-p prescreen) when it is not;
//! * **certificate** — `ε(S R) = η · M^a L^b · (A_C)^{2k}` with
//!   `η = ±1`: the commutative shadow of `S R` is a unit monomial times
//!   an even power of the cable's A-polynomial.
//!
//! The pipeline follows the constructive proof shape:
//!
//! 1. **cable splitting** — the cabling sum telescopes, so a one- or
//!    two-step operator maps `J_C` to a difference of shifted torus-knot
//!    sequences `G_i` ([`verify_cable_splitting`]);
//! 2. **membership** — explicit skew factors `P_i` push each `P_i G_i`
//!    into the exponential-polynomial module `E`; the fits are exact and
//!    certified ([`verify_p_membership`]);
//! 3. **witness assembly** — the fitted frequency supports synthesize the
//!    symmetric annihilator `Q` of the `P G_i`, and the wings
//!    `R = W_0 + W_1` with `W_1 = σ(W_0)` are built factored
//!    ([`assemble_witness`]);
//! 4. **annihilation check** ([`verify_annihilation`]) and the
//!    **ε-certificate** ([`verify_epsilon_identity`]).
//!
//! [`strong_aj_verify`] runs the stages in order and emits a
//! [`StructuredReport`] with one entry per stage, designed for both
//! human reading and JSON serialization.
//!
//! Conventions:
//!
//! * the quantum torus acts by `(M^a L^b f)(n) = t^{2an} f(n + b)` and
//!   `σ(M^a L^b) = M^{-a} L^{-b}` fixing coefficients;
//! * `ε` maps `t ↦ -1`, producing commutative plane-curve polynomials;
//! * membership in `E` is over the fraction field: the certified
//!   coefficients legitimately carry the denominator `1 - t^{-4}`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expfit::{
    annihilator_from_support, apply_operator, fit_adaptive, modp, specialize_modp, ExpFitError,
    ExpPolynomial, FitReport, FitSequence, FitStatus,
};
use crate::jones::{jones_sequence, torus_jones, CableKnot, JonesError};
use crate::qtorus::{ColorSequence, PlaneCurvePoly, QTorusError, TorusElement};
use crate::ring::LaurentScalar;

/// Largest factor count for which the annihilator is expanded densely
/// (the dense form has exponentially many terms in the factor count).
const DENSE_LIMIT: u32 = 24;

/// Term budget for the monolithic certificate quotient `N / A^{2k}`;
/// `(2k+1)^3` bounds the expanded term count of either side. Above the
/// budget the quotient is established factorwise instead (each grouped
/// shadow is verified to be a unit monomial times the square of its
/// paired A-factor, and powers of equal polynomials are equal).
const FULL_DIVISION_TERM_BUDGET: i64 = 4_000_000;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Errors from the verification pipeline.
///
/// `InvalidParams` and `Inadmissible` are *input* errors (the pipeline
/// never started); everything else reports a failure or resource bound
/// inside an honest verification attempt.
#[derive(Debug, Error)]
pub enum ConjectureError {
    /// The parameters do not describe a cable of a torus knot.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// Valid parameters outside the verified family (the cabling slope
    /// interleaves the torus-knot twist region).
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    /// A polynomial expected to be σ-symmetric up to a unit monomial is
    /// not.
    #[error("symmetry failure: {0}")]
    NotSymmetric(String),
    /// A membership fit was soundly refuted.
    #[error("membership fit failed: {0}")]
    FitFailed(String),
    /// A fit or check could not be completed within configured bounds.
    #[error("resource bound: {0}")]
    ResourceBound(String),
    /// A structural identity of the assembled witness failed.
    #[error("witness assembly failed: {0}")]
    WitnessAssembly(String),
    /// An arithmetic identity of the ε-certificate failed.
    #[error("certificate arithmetic failed: {0}")]
    WitnessArithmetic(String),
    /// A color sequence failed to evaluate.
    #[error(transparent)]
    Sequence(#[from] QTorusError),
    /// Colored Jones evaluation failed.
    #[error(transparent)]
    Jones(#[from] JonesError),
    /// An exponential-polynomial fit failed to run.
    #[error(transparent)]
    Fit(#[from] ExpFitError),
}

// ---------------------------------------------------------------------------
// Parameters and case analysis
// ---------------------------------------------------------------------------

/// The four constructive cases, split on the cabling parameter `s` and
/// the torus-knot parameter `q`. The operator shapes, the middle
/// A-polynomial factor, and the certificate exponents differ per case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// `s` odd, `s > 2`, `q > 2`.
    #[serde(rename = "OddS_QBig")]
    OddSQBig,
    /// `s` odd, `s > 2`, `q = 2`.
    #[serde(rename = "OddS_Q2")]
    OddSQ2,
    /// `s` even, `s > 2`.
    #[serde(rename = "EvenS_Big")]
    EvenSBig,
    /// `s = 2`.
    S2,
}

impl CaseTag {
    /// Case number `1..=4` in the order of the enum.
    pub fn index(&self) -> u32 {
        match self {
            CaseTag::OddSQBig => 1,
            CaseTag::OddSQ2 => 2,
            CaseTag::EvenSBig => 3,
            CaseTag::S2 => 4,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CaseTag::OddSQBig => "OddS_QBig",
            CaseTag::OddSQ2 => "OddS_Q2",
            CaseTag::EvenSBig => "EvenS_Big",
            CaseTag::S2 => "S2",
        };
        write!(f, "{name}")
    }
}

/// Parameters of the `(r,s)`-cable of the torus knot `T(p,q)`.
///
/// Validity (`p > q ≥ 2`, `gcd(p,q) = 1`, `s ≥ 2`, `gcd(r,s) = 1`) makes
/// the knot well-defined; *admissibility* (`r < 0` or `r > pqs`) is the
/// extra slope condition under which the witness construction is proved
/// to work, checked separately by [`CableParams::is_admissible`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CableParams {
    /// Torus knot parameter `p` (`p > q`).
    pub p: i64,
    /// Torus knot parameter `q` (`q ≥ 2`).
    pub q: i64,
    /// Cabling slope numerator `r`.
    pub r: i64,
    /// Cabling slope denominator `s` (`s ≥ 2`, coprime to `r`).
    pub s: i64,
}

impl CableParams {
    /// Validates and wraps the parameters.
    ///
    /// # Errors
    ///
    /// [`ConjectureError::InvalidParams`] when `p ≤ q`, `q < 2`,
    /// `gcd(p,q) ≠ 1`, `s < 2`, or `gcd(r,s) ≠ 1`.
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self, ConjectureError> {
        if q < 2 {
            return Err(ConjectureError::InvalidParams(format!(
                "torus parameter q must satisfy q >= 2, got q = {q}"
            )));
        }
        if p <= q {
            return Err(ConjectureError::InvalidParams(format!(
                "torus parameters must satisfy p > q, got p = {p}, q = {q}"
            )));
        }
        if num_integer::gcd(p, q) != 1 {
            return Err(ConjectureError::InvalidParams(format!(
                "torus parameters must be coprime, got gcd({p}, {q}) = {}",
                num_integer::gcd(p, q)
            )));
        }
        if s < 2 {
            return Err(ConjectureError::InvalidParams(format!(
                "cabling parameter s must satisfy s >= 2, got s = {s}"
            )));
        }
        if num_integer::gcd(r, s) != 1 {
            return Err(ConjectureError::InvalidParams(format!(
                "cabling slope must be reduced, got gcd({r}, {s}) = {}",
                num_integer::gcd(r, s)
            )));
        }
        Ok(CableParams { p, q, r, s })
    }

    /// The constructive case this parameter set falls in.
    pub fn case(&self) -> CaseTag {
        if self.s == 2 {
            CaseTag::S2
        } else if self.s % 2 == 0 {
            CaseTag::EvenSBig
        } else if self.q == 2 {
            CaseTag::OddSQ2
        } else {
            CaseTag::OddSQBig
        }
    }

    /// Whether the slope lies outside the twist region `[0, pqs]` — the
    /// condition under which the witness construction is verified.
    pub fn is_admissible(&self) -> bool {
        self.r < 0 || self.r > self.p * self.q * self.s
    }

    /// Errors unless [`Self::is_admissible`].
    ///
    /// # Errors
    ///
    /// [`ConjectureError::Inadmissible`] with the offending slope.
    pub fn ensure_admissible(&self) -> Result<(), ConjectureError> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(ConjectureError::Inadmissible(format!(
                "slope r = {} lies in the twist region [0, pqs] = [0, {}]",
                self.r,
                self.p * self.q * self.s
            )))
        }
    }

    /// The cable knot these parameters describe.
    ///
    /// # Errors
    ///
    /// Propagates slope validation from the knot constructor.
    pub fn knot(&self) -> Result<CableKnot, ConjectureError> {
        Ok(CableKnot::cable(self.p, self.q, self.r, self.s)?)
    }
}

impl fmt::Display for CableParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({},{};{},{})", self.p, self.q, self.r, self.s)
    }
}

// ---------------------------------------------------------------------------
// Small operator builders
// ---------------------------------------------------------------------------

/// The written-order product `c · L^l M^m`: commuting `L^l` past `M^m`
/// costs `t^{2lm}`, giving the normal form `c t^{2lm} M^m L^l`.
fn lm_mono(c: LaurentScalar, l: i64, m: i64) -> TorusElement {
    TorusElement::monomial(c.mul_monomial(&BigInt::one(), 2 * l * m), m, l)
}

/// Lifts a plane-curve polynomial to the quantum torus by written-order
/// substitution `M^a L^b ↦ L^b M^a = t^{2ab} M^a L^b`.
///
/// The lift is a section of `ε` (`ε(lift(f)) = f`) and intertwines the
/// involutions (`σ(lift(f)) = lift(σ(f))`), so lifts of σ-symmetric
/// shadows are σ-invariant operators.
pub fn lift_symmetric(f: &PlaneCurvePoly) -> TorusElement {
    TorusElement::from_mono_terms(
        f.iter()
            .map(|((a, b), c)| (a, b, LaurentScalar::monomial(c.clone(), 2 * a * b))),
    )
}

/// The commutative shadow `L + L^{-1} - 2` of a symmetric annihilator
/// factor.
fn e_plane() -> PlaneCurvePoly {
    PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (0, -1, 1), (0, 0, -2)])
}

// ---------------------------------------------------------------------------
// The A-polynomial of the cable
// ---------------------------------------------------------------------------

/// The nonabelian factors of the cable's A-polynomial, in the fixed
/// order `[L - 1, companion factor, cabling factor]`:
///
/// * case 1 (`s` odd, `q > 2`): `(L - 1)(L² - M^{-2pqs²})(L² - M^{-2rs})`;
/// * case 2 (`s` odd, `q = 2`): `(L - 1)(L + M^{-2ps²})(L² - M^{-2rs})`;
/// * case 3 (`s` even):         `(L - 1)(L - M^{-pqs²})(L² - M^{-2rs})`;
/// * case 4 (`s = 2`):          `(L - 1)(L - M^{-4pq})(L + M^{-2r})`.
pub fn a_polynomial_factors(params: &CableParams) -> Vec<PlaneCurvePoly> {
    let CableParams { p, q, r, s } = *params;
    let l_minus_one = PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (0, 0, -1)]);
    let middle = match params.case() {
        CaseTag::OddSQBig => {
            PlaneCurvePoly::from_i64_terms(&[(0, 2, 1), (-2 * p * q * s * s, 0, -1)])
        }
        CaseTag::OddSQ2 => PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-2 * p * s * s, 0, 1)]),
        CaseTag::EvenSBig => PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-p * q * s * s, 0, -1)]),
        CaseTag::S2 => PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-4 * p * q, 0, -1)]),
    };
    let cabling = if s == 2 {
        PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-2 * r, 0, 1)])
    } else {
        PlaneCurvePoly::from_i64_terms(&[(0, 2, 1), (-2 * r * s, 0, -1)])
    };
    vec![l_minus_one, middle, cabling]
}

/// The expanded nonabelian A-polynomial of the cable — the product of
/// [`a_polynomial_factors`].
pub fn a_polynomial_cable(params: &CableParams) -> PlaneCurvePoly {
    let mut acc = PlaneCurvePoly::one();
    for f in a_polynomial_factors(params) {
        acc = acc.mul(&f);
    }
    acc
}

/// The symmetry data `(η, a, b)` of a plane polynomial with
/// `σ(A) = η M^a L^b A` and `η = ±1`.
///
/// # Errors
///
/// [`ConjectureError::NotSymmetric`] when `σ(A)/A` is not a unit
/// monomial.
pub fn symmetry_exponents(a_poly: &PlaneCurvePoly) -> Result<(i64, i64, i64), ConjectureError> {
    let mirrored = a_poly.sigma();
    let Some((eta, (a, b))) = mirrored.monomial_quotient(a_poly) else {
        return Err(ConjectureError::NotSymmetric(
            "σ(A) is not a monomial multiple of A".into(),
        ));
    };
    let unit = if eta == BigInt::one() {
        1
    } else if eta == -BigInt::one() {
        -1
    } else {
        return Err(ConjectureError::NotSymmetric(format!(
            "σ(A) = c·M^{a}L^{b}·A with non-unit c = {eta}"
        )));
    };
    Ok((unit, a, b))
}

/// Per-case symmetry data of the expanded A-polynomial — the honest
/// [`symmetry_exponents`] of [`a_polynomial_cable`], serialized for
/// reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// Sign `η` in `σ(A) = η M^a L^b A`.
    pub eta: i64,
    /// `M`-exponent `a`.
    pub a: i64,
    /// `L`-exponent `b`.
    pub b: i64,
}

// ---------------------------------------------------------------------------
// The torus-side sequences G and the cable-splitting identity
// ---------------------------------------------------------------------------

/// The shifted torus-knot sequences the cabling sum splits into:
///
/// * `s > 2`: `G₁(n) = t^{2r(n+1)} J_T(s(n+1)+1)` and
///   `G₂(n) = t^{-2r(n+1)} J_T(s(n+1)-1)`;
/// * `s = 2`: the single `G(n) = J_T(2n+1)`.
///
/// # Errors
///
/// Propagates torus-knot construction failures.
pub fn build_g(params: &CableParams) -> Result<Vec<ColorSequence>, ConjectureError> {
    Ok(g_pairs(params)?.into_iter().map(|(sym, _)| sym).collect())
}

/// Symbolic/mod-p pairs for each `G` sequence (the mod-p side drives the
/// fit probes without materializing symbolic values).
fn g_pairs(params: &CableParams) -> Result<Vec<(ColorSequence, GModp)>, ConjectureError> {
    let CableParams { p, q, r, s } = *params;
    let jt_sym = torus_jones(p, q)?;
    let jt_mod = Arc::new(ModpJones::new(p, q));
    let make = |r2: i64, off: i64| -> (ColorSequence, GModp) {
        let jt = jt_sym.clone();
        let sym = ColorSequence::new(false, move |n| {
            let v = jt.value(s * (n + 1) + off)?;
            Ok(v.mul_monomial(&BigInt::one(), r2 * (n + 1)))
        });
        (
            sym,
            GModp {
                r2,
                s,
                off,
                jt: Arc::clone(&jt_mod),
            },
        )
    };
    if s == 2 {
        Ok(vec![make(0, -1)])
    } else {
        Ok(vec![make(2 * r, 1), make(-2 * r, -1)])
    }
}

/// The splitting operator and a rendering of the identity it encodes.
///
/// * `s > 2`: `t^{2rs} · M^{rs}(L² - t^{-4rs} M^{-2rs})` maps `J_C` to
///   `G₁ - G₂`;
/// * `s = 2`: `M^{r}(L + t^{-2r} M^{-2r})` maps `J_C` to `G`.
fn splitting_operator(params: &CableParams) -> (TorusElement, String) {
    let CableParams { r, s, .. } = *params;
    if s == 2 {
        let inner = TorusElement::from_mono_terms([
            (0, 1, LaurentScalar::one()),
            (-2 * r, 0, LaurentScalar::tpow(-2 * r)),
        ]);
        let op = TorusElement::monomial(LaurentScalar::one(), r, 0).mul(&inner);
        let identity = format!(
            "(M^{r} (L + t^{{-{rr}}} M^{{-{rr}}}) J_C)(n) = J_T(2n+1)",
            rr = 2 * r
        );
        (op, identity)
    } else {
        let rs = r * s;
        let inner = TorusElement::from_mono_terms([
            (0, 2, LaurentScalar::one()),
            (-2 * rs, 0, LaurentScalar::tpow(-4 * rs).neg()),
        ]);
        let op = TorusElement::monomial(LaurentScalar::tpow(2 * rs), rs, 0).mul(&inner);
        let identity = format!(
            "t^{{{two_rs}}} (M^{{{rs}}} (L^2 - t^{{-{four_rs}}} M^{{-{two_rs}}}) J_C)(n) = G1(n) - G2(n)",
            two_rs = 2 * rs,
            rs = rs,
            four_rs = 4 * rs
        );
        (op, identity)
    }
}

/// Outcome of the pointwise cable-splitting check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingReport {
    /// The identity that was checked, rendered for humans.
    pub identity: String,
    /// First color checked.
    pub n_lo: i64,
    /// Last color checked.
    pub n_hi: i64,
    /// Colors at which the identity failed (empty on success).
    pub failures: Vec<i64>,
}

/// Checks the cable-splitting identity pointwise on `n_lo..=n_hi`:
/// the splitting operator applied to `J_C` equals `G₁ - G₂` (`s > 2`)
/// or `G` (`s = 2`), exactly.
///
/// # Errors
///
/// Propagates sequence evaluation failures; the mathematical outcome is
/// reported in [`SplittingReport::failures`], not as an error.
pub fn verify_cable_splitting(
    params: &CableParams,
    n_lo: i64,
    n_hi: i64,
) -> Result<SplittingReport, ConjectureError> {
    let jc = jones_sequence(&params.knot()?);
    let g = build_g(params)?;
    let (op, identity) = splitting_operator(params);
    let mut failures = Vec::new();
    for n in n_lo..=n_hi {
        let lhs = op.apply(&jc, n)?;
        let rhs = if params.s == 2 {
            (*g[0].value(n)?).clone()
        } else {
            g[0].value(n)?.sub(g[1].value(n)?.as_ref())
        };
        if lhs != rhs {
            failures.push(n);
        }
    }
    Ok(SplittingReport {
        identity,
        n_lo,
        n_hi,
        failures,
    })
}

// ---------------------------------------------------------------------------
// The P operators
// ---------------------------------------------------------------------------

/// The skew factors that push the torus-side sequences into the
/// exponential-polynomial module, written with `A` for the companion
/// `M`-exponent of the case:
///
/// * case 1 (`A = 2pqs²`, `e₁ = 4r - 4pqs`): two factors
///   `L²M^A + L^{-2}M^{-A} - t^{±e₁} - t^{∓e₁+4A}`;
/// * case 2 (`A = 2ps²`): two factors
///   `LM^A + L^{-1}M^{-A} + t^{±2r-2ps(s∓2)·sign} + …` (all-plus signs);
/// * case 3 (`A = pqs²`): the same shape with minus signs;
/// * case 4 (`A = 4pq`): the single `LM^A + L^{-1}M^{-A} - 1 - t^{8pq}`.
///
/// Every factor is σ-invariant, and in the two-factor cases the factors
/// commute with `ε(P₁) = ε(P₂)`.
pub fn build_p_factors(params: &CableParams) -> Vec<TorusElement> {
    let CableParams { p, q, r, s } = *params;
    let scalar = |e: i64| TorusElement::monomial(LaurentScalar::tpow(e), 0, 0);
    match params.case() {
        CaseTag::OddSQBig => {
            let a = 2 * p * q * s * s;
            let e1 = 4 * r - 4 * p * q * s;
            let factor = |e: i64| {
                lm_mono(LaurentScalar::one(), 2, a)
                    .add(&lm_mono(LaurentScalar::one(), -2, -a))
                    .sub(&scalar(e))
                    .sub(&scalar(-e + 4 * a))
            };
            vec![factor(e1), factor(-e1)]
        }
        CaseTag::OddSQ2 => {
            let a = 2 * p * s * s;
            let base = lm_mono(LaurentScalar::one(), 1, a).add(&lm_mono(LaurentScalar::one(), -1, -a));
            let p1 = base
                .add(&scalar(2 * r - 2 * p * s * (s + 2)))
                .add(&scalar(-2 * r + 2 * p * s * (3 * s + 2)));
            let p2 = base
                .add(&scalar(-2 * r - 2 * p * s * (s - 2)))
                .add(&scalar(2 * r + 2 * p * s * (3 * s - 2)));
            vec![p1, p2]
        }
        CaseTag::EvenSBig => {
            let a = p * q * s * s;
            let base = lm_mono(LaurentScalar::one(), 1, a).add(&lm_mono(LaurentScalar::one(), -1, -a));
            let p1 = base
                .sub(&scalar(2 * r - p * q * s * (s + 2)))
                .sub(&scalar(-2 * r + p * q * s * (3 * s + 2)));
            let p2 = base
                .sub(&scalar(-2 * r - p * q * s * (s - 2)))
                .sub(&scalar(2 * r + p * q * s * (3 * s - 2)));
            vec![p1, p2]
        }
        CaseTag::S2 => {
            let a = 4 * p * q;
            vec![lm_mono(LaurentScalar::one(), 1, a)
                .add(&lm_mono(LaurentScalar::one(), -1, -a))
                .sub(&scalar(0))
                .sub(&scalar(2 * a))]
        }
    }
}

/// The full membership operator `P` — the product of
/// [`build_p_factors`] (a single factor in case 4).
pub fn build_p(params: &CableParams) -> TorusElement {
    let mut acc = TorusElement::one();
    for f in build_p_factors(params) {
        acc = acc.mul(&f);
    }
    acc
}

// ---------------------------------------------------------------------------
// Mod-p torus evaluation (drives the fit probes)
// ---------------------------------------------------------------------------

/// The quantized integer `[k] = (t^{2k} - t^{-2k}) / (t² - t^{-2})` at a
/// residue `t₀` in `𝔽_p`, with a direct-sum fallback when `t₀⁴ ≡ 1`.
fn bracket_modp(t0: u64, k: i64) -> u64 {
    if k == 0 {
        return 0;
    }
    let den = modp::sub(modp::ipow(t0, 2), modp::ipow(t0, -2));
    if den != 0 {
        let num = modp::sub(modp::ipow(t0, 2 * k), modp::ipow(t0, -2 * k));
        return modp::mul(num, modp::inv(den));
    }
    let (kk, negate) = if k < 0 { (-k, true) } else { (k, false) };
    let mut acc = 0u64;
    for i in 0..kk {
        acc = modp::add(acc, modp::ipow(t0, 2 * (kk - 1 - 2 * i)));
    }
    if negate {
        acc = modp::sub(0, acc);
    }
    acc
}

/// Memoized direct evaluation of the torus-knot colored Jones values in
/// `𝔽_p` at a residue `t₀` — `O(c)` per color, no symbolic values.
struct ModpJones {
    p: i64,
    q: i64,
    cache: Mutex<HashMap<(u64, i64), u64>>,
}

impl ModpJones {
    fn new(p: i64, q: i64) -> Self {
        ModpJones {
            p,
            q,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// `J_{T(p,q)}(c)` at `t = t₀` in `𝔽_p`, with the odd extension
    /// `J(0) = 0`, `J(-c) = -J(c)`.
    fn value(&self, c: i64, t0: u64) -> u64 {
        if c == 0 {
            return 0;
        }
        if c < 0 {
            return modp::sub(0, self.value(-c, t0));
        }
        if let Some(&v) = self.cache.lock().unwrap().get(&(t0, c)) {
            return v;
        }
        let (p, q) = (self.p, self.q);
        let mut acc = 0u64;
        let mut tw = -(c - 1);
        while tw < c {
            let term = modp::mul(
                modp::ipow(t0, p * q * tw * tw + 2 * p * tw),
                bracket_modp(t0, q * tw + 1),
            );
            acc = modp::add(acc, term);
            tw += 2;
        }
        let v = modp::mul(modp::ipow(t0, -p * q * (c * c - 1)), acc);
        self.cache.lock().unwrap().insert((t0, c), v);
        v
    }
}

/// A torus-side sequence `G(n) = t^{r₂(n+1)} J_T(s(n+1) + off)` in
/// `𝔽_p` form. The parametrization covers `G₁ = (2r, s, +1)`,
/// `G₂ = (-2r, s, -1)`, the `s = 2` sequence `(0, 2, -1)`, and the bare
/// torus sequence `(0, 1, -1)`.
#[derive(Clone)]
struct GModp {
    r2: i64,
    s: i64,
    off: i64,
    jt: Arc<ModpJones>,
}

impl GModp {
    fn value(&self, n: i64, t0: u64) -> u64 {
        modp::mul(
            modp::ipow(t0, self.r2 * (n + 1)),
            self.jt.value(self.s * (n + 1) + self.off, t0),
        )
    }
}

/// An operator applied to a `G` sequence, with a native mod-p fast path:
/// symbolic values go through the memoized composed sequence, while the
/// probe path evaluates `Σ c(t₀) t₀^{2an} G(n+b)` directly in `𝔽_p`.
struct OpGSeq {
    sym: ColorSequence,
    terms: Vec<(i64, i64, LaurentScalar)>,
    g: GModp,
}

impl OpGSeq {
    fn new(op: &TorusElement, g_sym: &ColorSequence, g: GModp) -> Self {
        OpGSeq {
            sym: op.then_sequence(g_sym),
            terms: op.iter().map(|((a, b), c)| (a, b, c.clone())).collect(),
            g,
        }
    }
}

impl FitSequence for OpGSeq {
    fn value(&self, n: i64) -> Result<LaurentScalar, QTorusError> {
        Ok((*self.sym.value(n)?).clone())
    }

    fn value_modp(&self, n: i64, t0: u64) -> Result<u64, QTorusError> {
        let mut acc = 0u64;
        for (a, b, c) in &self.terms {
            let term = modp::mul(
                specialize_modp(c, t0),
                modp::mul(modp::ipow(t0, 2 * a * n), self.g.value(n + b, t0)),
            );
            acc = modp::add(acc, term);
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Membership of the P·G sequences in the exponential-polynomial module
// ---------------------------------------------------------------------------

/// Certified membership evidence: the fits of the `P_i G_i`, and the
/// pushed-through representations of the full `P G_i` whose supports
/// drive the annihilator synthesis.
#[derive(Debug, Clone)]
pub struct MembershipEvidence {
    /// One certified fit per `P_i G_i` pair (a single fit in case 4).
    pub fits: Vec<FitReport>,
    /// Exponential-polynomial representations of the full `P G_i`.
    pub pg: Vec<ExpPolynomial>,
    /// Number of colors at which each pushed-through representation was
    /// re-validated against symbolic evaluation (0 when the fit itself
    /// already certified the full product, as in case 4).
    pub pg_validated_points: u32,
}

/// Validates an exponential-polynomial representation of `op · G`
/// pointwise at `n = 1..=|support| + extra`, comparing in cleared-
/// denominator form: `D·(op G)(n) = Σ (D λ_j) t^{2jn}`.
fn validate_exp_rep(
    op: &TorusElement,
    g: &ColorSequence,
    rep: &ExpPolynomial,
    extra: u32,
) -> Result<u32, ConjectureError> {
    let (scaled, den) = rep.scaled_form();
    let points = rep.support().len() as u32 + extra.max(1);
    for i in 0..points {
        let n = 1 + i64::from(i);
        let lhs = op.apply(g, n)?.mul(&den);
        let mut rhs = LaurentScalar::zero();
        for (j, lam) in &scaled {
            rhs = rhs.add(&lam.mul_monomial(&BigInt::one(), 2 * j * n));
        }
        if lhs != rhs {
            return Err(ConjectureError::FitFailed(format!(
                "pushed-through representation disagrees with direct evaluation at n = {n}"
            )));
        }
    }
    Ok(points)
}

/// Certifies that each `P_i G_i` lies in the exponential-polynomial
/// module and produces representations of the full `P G_i`.
///
/// The fits run with the adaptive frequency ladder; in the two-factor
/// cases the complementary factor is applied algebraically to the fitted
/// representation and the result is re-validated pointwise against
/// symbolic evaluation of `P G_i`.
///
/// # Errors
///
/// [`ConjectureError::FitFailed`] on a sound refutation (a mathematical
/// failure), [`ConjectureError::ResourceBound`] when a fit is
/// inconclusive within `cfg.k_max`, input errors when the parameters are
/// invalid or inadmissible.
pub fn verify_p_membership(
    params: &CableParams,
    cfg: &RunConfig,
) -> Result<MembershipEvidence, ConjectureError> {
    params.ensure_admissible()?;
    let p_factors = build_p_factors(params);
    let pairs = g_pairs(params)?;
    debug_assert_eq!(p_factors.len(), pairs.len());
    let mut fits = Vec::new();
    let mut reps = Vec::new();
    for (pf, (g_sym, g_mod)) in p_factors.iter().zip(&pairs) {
        let seq = OpGSeq::new(pf, g_sym, g_mod.clone());
        let report = fit_adaptive(&seq, 1, cfg.k0, cfg.k_max, cfg.extra)?;
        match report.status {
            FitStatus::Member => {}
            FitStatus::NotMember => {
                return Err(ConjectureError::FitFailed(format!(
                    "membership soundly refuted up to frequency bound {}",
                    report.k_used
                )));
            }
            FitStatus::Inconclusive => {
                return Err(ConjectureError::ResourceBound(format!(
                    "membership fit inconclusive at frequency bound {}: {}",
                    report.k_used,
                    report.notes.join("; ")
                )));
            }
        }
        reps.push(
            report
                .coefficients
                .clone()
                .expect("a Member fit carries coefficients"),
        );
        fits.push(report);
    }
    let (pg, pg_validated_points) = if params.case() == CaseTag::S2 {
        (reps, 0)
    } else {
        let p_full = build_p(params);
        let pg0 = apply_operator(&p_factors[1], &reps[0]);
        let pg1 = apply_operator(&p_factors[0], &reps[1]);
        let mut validated = 0;
        for (rep, (g_sym, _)) in [&pg0, &pg1].into_iter().zip(&pairs) {
            validated += validate_exp_rep(&p_full, g_sym, rep, cfg.extra)?;
        }
        (vec![pg0, pg1], validated)
    };
    Ok(MembershipEvidence {
        fits,
        pg,
        pg_validated_points,
    })
}

// ---------------------------------------------------------------------------
// Witness assembly
// ---------------------------------------------------------------------------

/// The fully assembled strong AJ witness for one cable: the annihilator
/// wings, the symmetric cofactor in factored form, the A-polynomial, and
/// the membership evidence it was built from.
///
/// Fields are public so tests can mutate a copy and confirm the checks
/// reject corrupted witnesses.
#[derive(Debug, Clone)]
pub struct WitnessBundle {
    /// Cable parameters.
    pub params: CableParams,
    /// Constructive case.
    pub case: CaseTag,
    /// The torus-side sequences `G_i`.
    pub g: Vec<ColorSequence>,
    /// The membership factors `P_i`.
    pub p_factors: Vec<TorusElement>,
    /// The full membership operator `P`.
    pub p: TorusElement,
    /// The symmetric annihilator factors of `Q` (one per fitted
    /// frequency, multiset across the `P G_i`).
    pub q_factors: Vec<TorusElement>,
    /// Dense `Q` when the factor count is at most [`DENSE_LIMIT`].
    pub q_dense: Option<TorusElement>,
    /// Number of `Q` factors.
    pub m: u32,
    /// Certificate half-power: `k = m` in case 4, `k = max(m, 2)`
    /// otherwise.
    pub k: u32,
    /// Certificate power `2k` — the exponent of `A_C` in `ε(SR)`.
    pub power: u32,
    /// Number of `P` factors (2, or 1 in case 4).
    pub fpow: u32,
    /// The annihilator wings: `R = Π wings[0] + Π wings[1]`, products
    /// taken left to right, with `wings[1][j] = σ(wings[0][j])`.
    pub wings: [Vec<TorusElement>; 2],
    /// Dense `R` when the factor count permits expansion.
    pub r_dense: Option<TorusElement>,
    /// The symmetric cofactor `S = Π baseᵢ^{powᵢ}` in factored form,
    /// grouped as `[(cabling split, k-1), (companion lift, k-fpow),
    /// (torus factor, k-m)]`.
    pub s_factors: Vec<(TorusElement, u32)>,
    /// A-polynomial factors in the order of [`a_polynomial_factors`].
    pub a_factors: Vec<PlaneCurvePoly>,
    /// Expanded A-polynomial.
    pub a_c: PlaneCurvePoly,
    /// The certified membership fits.
    pub fits: Vec<FitReport>,
    /// The representations of the `P G_i`.
    pub pg: Vec<ExpPolynomial>,
}

/// The σ-invariant cabling-split factor whose shadow squares to the
/// cabling A-factor: `L²M^{2rs} + L^{-2}M^{-2rs} - 2` for `s > 2`,
/// `LM^{2r} + L^{-1}M^{-2r} + 2` for `s = 2`.
fn build_sym_split(params: &CableParams) -> TorusElement {
    let CableParams { r, s, .. } = *params;
    let two = TorusElement::monomial(LaurentScalar::constant(2), 0, 0);
    if s == 2 {
        lm_mono(LaurentScalar::one(), 1, 2 * r)
            .add(&lm_mono(LaurentScalar::one(), -1, -2 * r))
            .add(&two)
    } else {
        lm_mono(LaurentScalar::one(), 2, 2 * r * s)
            .add(&lm_mono(LaurentScalar::one(), -2, -2 * r * s))
            .sub(&two)
    }
}

/// The two annihilator wings in factor order
/// `[M^w, q₁, …, q_m, P, M^w, split]` and its σ-mirror, where
/// `w = rs`, `split = L² - t^{-4rs}M^{-2rs}` for `s > 2` and `w = r`,
/// `split = L + t^{-2r}M^{-2r}` for `s = 2`.
fn build_wings(
    params: &CableParams,
    q_factors: &[TorusElement],
    p: &TorusElement,
) -> [Vec<TorusElement>; 2] {
    let CableParams { r, s, .. } = *params;
    let (w, split0, split1) = if s == 2 {
        (
            r,
            TorusElement::from_mono_terms([
                (0, 1, LaurentScalar::one()),
                (-2 * r, 0, LaurentScalar::tpow(-2 * r)),
            ]),
            TorusElement::from_mono_terms([
                (0, -1, LaurentScalar::one()),
                (2 * r, 0, LaurentScalar::tpow(-2 * r)),
            ]),
        )
    } else {
        let rs = r * s;
        (
            rs,
            TorusElement::from_mono_terms([
                (0, 2, LaurentScalar::one()),
                (-2 * rs, 0, LaurentScalar::tpow(-4 * rs).neg()),
            ]),
            TorusElement::from_mono_terms([
                (0, -2, LaurentScalar::one()),
                (2 * rs, 0, LaurentScalar::tpow(-4 * rs).neg()),
            ]),
        )
    };
    let build = |m_exp: i64, split: TorusElement| -> Vec<TorusElement> {
        let mut wing = Vec::with_capacity(q_factors.len() + 4);
        wing.push(TorusElement::monomial(LaurentScalar::one(), m_exp, 0));
        wing.extend(q_factors.iter().cloned());
        wing.push(p.clone());
        wing.push(TorusElement::monomial(LaurentScalar::one(), m_exp, 0));
        wing.push(split);
        wing
    };
    [build(w, split0), build(-w, split1)]
}

/// Assembles the witness from certified membership evidence, checking
/// every structural identity along the way: σ-invariance of the `Q` and
/// `P` factors, commutation and equal shadows of the `P` factors, the
/// factorwise mirror property `wings[1][j] = σ(wings[0][j])`, and
/// σ-invariance of the cofactor bases.
///
/// # Errors
///
/// [`ConjectureError::WitnessAssembly`] when a structural identity
/// fails; input errors when the parameters are invalid or inadmissible.
pub fn assemble_witness(
    params: &CableParams,
    evidence: MembershipEvidence,
) -> Result<WitnessBundle, ConjectureError> {
    params.ensure_admissible()?;
    let case = params.case();
    let structural = |ok: bool, what: &str| -> Result<(), ConjectureError> {
        if ok {
            Ok(())
        } else {
            Err(ConjectureError::WitnessAssembly(what.to_string()))
        }
    };

    let supports: Vec<Vec<i64>> = evidence.pg.iter().map(|e| e.support()).collect();
    let synth = annihilator_from_support(&supports);
    structural(!synth.padded, "annihilator synthesis received empty supports")?;
    let m = synth.m;
    let fpow = if case == CaseTag::S2 { 1 } else { 2 };
    let k = if case == CaseTag::S2 { m } else { m.max(2) };
    let power = 2 * k;

    let p_factors = build_p_factors(params);
    let p = build_p(params);
    for (i, pf) in p_factors.iter().enumerate() {
        structural(pf.sigma() == *pf, &format!("P factor {i} is not σ-invariant"))?;
    }
    if p_factors.len() == 2 {
        let forward = p_factors[0].mul(&p_factors[1]);
        let backward = p_factors[1].mul(&p_factors[0]);
        structural(forward == p && backward == p, "P factors do not commute into P")?;
        structural(
            p_factors[0].epsilon() == p_factors[1].epsilon(),
            "P factors have different shadows",
        )?;
    }
    for (i, qf) in synth.factors.iter().enumerate() {
        structural(qf.sigma() == *qf, &format!("Q factor {i} is not σ-invariant"))?;
    }

    let wings = build_wings(params, &synth.factors, &p);
    structural(
        wings[0].len() == wings[1].len(),
        "wing factor lists have different lengths",
    )?;
    for (j, (w0, w1)) in wings[0].iter().zip(&wings[1]).enumerate() {
        structural(
            w0.sigma() == *w1,
            &format!("wing mirror fails at factor {j}: σ(W0[j]) ≠ W1[j]"),
        )?;
    }

    let sym_split = build_sym_split(params);
    structural(sym_split.sigma() == sym_split, "cabling-split base is not σ-invariant")?;
    let f_eps = p_factors[0].epsilon();
    let f_lift = lift_symmetric(&f_eps);
    structural(f_lift.sigma() == f_lift, "companion lift is not σ-invariant")?;
    structural(f_lift.epsilon() == f_eps, "companion lift does not shadow to ε(P₁)")?;
    let e_lift = lift_symmetric(&e_plane());
    let s_factors = vec![(sym_split, k - 1), (f_lift, k - fpow), (e_lift, k - m)];

    let a_factors = a_polynomial_factors(params);
    let a_c = a_polynomial_cable(params);

    let (q_dense, r_dense) = if m <= DENSE_LIMIT {
        let q_dense = synth.expanded();
        let dense = |wing: &[TorusElement]| -> TorusElement {
            let mut acc = TorusElement::one();
            for f in wing {
                acc = acc.mul(f);
            }
            acc
        };
        let r = dense(&wings[0]).add(&dense(&wings[1]));
        structural(r.sigma() == r, "dense annihilator is not σ-invariant")?;
        (Some(q_dense), Some(r))
    } else {
        (None, None)
    };

    Ok(WitnessBundle {
        params: *params,
        case,
        g: build_g(params)?,
        p_factors,
        p,
        q_factors: synth.factors,
        q_dense,
        m,
        k,
        power,
        fpow,
        wings,
        r_dense,
        s_factors,
        a_factors,
        a_c,
        fits: evidence.fits,
        pg: evidence.pg,
    })
}

/// Runs membership and assembles the witness in one call.
///
/// # Errors
///
/// Everything [`verify_p_membership`] and [`assemble_witness`] can
/// produce.
pub fn build_witness(params: &CableParams, cfg: &RunConfig) -> Result<WitnessBundle, ConjectureError> {
    let evidence = verify_p_membership(params, cfg)?;
    assemble_witness(params, evidence)
}

// ---------------------------------------------------------------------------
// Evaluation domains for the annihilation check
// ---------------------------------------------------------------------------

/// Exact-or-modular arithmetic the windowed annihilation sweep is
/// generic over. Implementations provide ring operations, powers of the
/// specialization point `t₀`, scalar specialization, and quantized
/// integers.
trait EvalDomain {
    /// Value type.
    type V: Clone;
    fn zero(&self) -> Self::V;
    fn is_zero(&self, v: &Self::V) -> bool;
    fn add(&self, x: &Self::V, y: &Self::V) -> Self::V;
    fn neg(&self, x: &Self::V) -> Self::V;
    fn mul(&self, x: &Self::V, y: &Self::V) -> Self::V;
    /// `t₀^e`.
    fn tpow(&self, e: i64) -> Self::V;
    /// A Laurent scalar evaluated at `t₀`.
    fn scalar(&self, c: &LaurentScalar) -> Self::V;
    /// The quantized integer `[k]`.
    fn bracket(&self, k: i64) -> Self::V;
}

/// `𝔽_p` arithmetic at a fixed residue — a sound *refuter*: a nonzero
/// residue disproves vanishing, a zero residue certifies nothing.
struct ModpDomain {
    t0: u64,
}

impl ModpDomain {
    /// The domain at the residue of a rational `t₀ = u/v`; `None` when
    /// the residue degenerates (`u ≡ 0` or `v ≡ 0` mod p).
    fn from_rational(t0: &BigRational) -> Option<ModpDomain> {
        let u = modp::from_bigint(t0.numer());
        let v = modp::from_bigint(t0.denom());
        if u == 0 || v == 0 {
            return None;
        }
        Some(ModpDomain {
            t0: modp::mul(u, modp::inv(v)),
        })
    }
}

impl EvalDomain for ModpDomain {
    type V = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, v: &u64) -> bool {
        *v == 0
    }
    fn add(&self, x: &u64, y: &u64) -> u64 {
        modp::add(*x, *y)
    }
    fn neg(&self, x: &u64) -> u64 {
        modp::sub(0, *x)
    }
    fn mul(&self, x: &u64, y: &u64) -> u64 {
        modp::mul(*x, *y)
    }
    fn tpow(&self, e: i64) -> u64 {
        modp::ipow(self.t0, e)
    }
    fn scalar(&self, c: &LaurentScalar) -> u64 {
        specialize_modp(c, self.t0)
    }
    fn bracket(&self, k: i64) -> u64 {
        bracket_modp(self.t0, k)
    }
}

/// An exact value `m · u^a · v^b` for `t₀ = u/v` — the power-scaled
/// representation keeps `t₀`-powers symbolic in the exponents, so only
/// additions (which align exponents) touch big-integer arithmetic.
#[derive(Clone)]
struct SpecVal {
    m: BigInt,
    a: i64,
    b: i64,
}

/// Exact rational arithmetic at `t₀ = u/v` in power-scaled form, with
/// cached squarings of `u` and `v` for the alignment raises.
struct SpecDomain {
    upows: RefCell<Vec<BigInt>>,
    vpows: RefCell<Vec<BigInt>>,
    /// `u⁴ - v⁴`, the denominator of the quantized-integer mantissa.
    d4: BigInt,
}

impl SpecDomain {
    /// # Errors
    ///
    /// [`ConjectureError::InvalidParams`] when `t₀ = 0` or `t₀⁴ = 1`
    /// (where quantized integers degenerate).
    fn new(t0: &BigRational) -> Result<Self, ConjectureError> {
        let u = t0.numer().clone();
        let v = t0.denom().clone();
        if u.is_zero() {
            return Err(ConjectureError::InvalidParams(
                "specialization point t₀ must be nonzero".into(),
            ));
        }
        if u.magnitude() == v.magnitude() {
            return Err(ConjectureError::InvalidParams(format!(
                "specialization point t₀ = {t0} is a fourth root of unity"
            )));
        }
        let u2 = &u * &u;
        let v2 = &v * &v;
        let d4 = &u2 * &u2 - &v2 * &v2;
        Ok(SpecDomain {
            upows: RefCell::new(vec![u]),
            vpows: RefCell::new(vec![v]),
            d4,
        })
    }

    /// `base^e` (`e ≥ 0`) as a product of cached squarings.
    fn pow_cached(pows: &RefCell<Vec<BigInt>>, e: i64) -> BigInt {
        debug_assert!(e >= 0);
        if e == 0 {
            return BigInt::one();
        }
        let mut e = e as u64;
        let top = 63 - e.leading_zeros() as usize;
        {
            let mut cache = pows.borrow_mut();
            while cache.len() <= top {
                let next = {
                    let last = cache.last().expect("cache is seeded with base");
                    last * last
                };
                cache.push(next);
            }
        }
        let cache = pows.borrow();
        let mut acc: Option<BigInt> = None;
        let mut i = 0usize;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => cache[i].clone(),
                    Some(a) => a * &cache[i],
                });
            }
            e >>= 1;
            i += 1;
        }
        acc.expect("e > 0 has at least one set bit")
    }

    fn pow_u(&self, e: i64) -> BigInt {
        Self::pow_cached(&self.upows, e)
    }

    fn pow_v(&self, e: i64) -> BigInt {
        Self::pow_cached(&self.vpows, e)
    }

    /// `m · u^{da} · v^{db}` with `da, db ≥ 0`.
    fn raise(&self, m: &BigInt, da: i64, db: i64) -> BigInt {
        let mut out = m.clone();
        if da > 0 {
            out *= self.pow_u(da);
        }
        if db > 0 {
            out *= self.pow_v(db);
        }
        out
    }
}

impl EvalDomain for SpecDomain {
    type V = SpecVal;

    fn zero(&self) -> SpecVal {
        SpecVal {
            m: BigInt::zero(),
            a: 0,
            b: 0,
        }
    }

    fn is_zero(&self, v: &SpecVal) -> bool {
        v.m.is_zero()
    }

    fn add(&self, x: &SpecVal, y: &SpecVal) -> SpecVal {
        if x.m.is_zero() {
            return y.clone();
        }
        if y.m.is_zero() {
            return x.clone();
        }
        let a = x.a.min(y.a);
        let b = x.b.min(y.b);
        let m = self.raise(&x.m, x.a - a, x.b - b) + self.raise(&y.m, y.a - a, y.b - b);
        if m.is_zero() {
            self.zero()
        } else {
            SpecVal { m, a, b }
        }
    }

    fn neg(&self, x: &SpecVal) -> SpecVal {
        SpecVal {
            m: -x.m.clone(),
            a: x.a,
            b: x.b,
        }
    }

    fn mul(&self, x: &SpecVal, y: &SpecVal) -> SpecVal {
        if x.m.is_zero() || y.m.is_zero() {
            return self.zero();
        }
        SpecVal {
            m: &x.m * &y.m,
            a: x.a + y.a,
            b: x.b + y.b,
        }
    }

    fn tpow(&self, e: i64) -> SpecVal {
        SpecVal {
            m: BigInt::one(),
            a: e,
            b: -e,
        }
    }

    fn scalar(&self, c: &LaurentScalar) -> SpecVal {
        let mut acc = self.zero();
        for (e, coeff) in c.iter() {
            let term = SpecVal {
                m: coeff.clone(),
                a: e,
                b: -e,
            };
            acc = self.add(&acc, &term);
        }
        acc
    }

    /// `[k] = (u^{4k} - v^{4k})/(u⁴ - v⁴) · (uv)^{2-2k}` — the first
    /// factor is an exact integer (a geometric sum in `u⁴, v⁴`).
    fn bracket(&self, k: i64) -> SpecVal {
        if k == 0 {
            return self.zero();
        }
        let (kk, negate) = if k < 0 { (-k, true) } else { (k, false) };
        let num = self.pow_u(4 * kk) - self.pow_v(4 * kk);
        debug_assert!((&num % &self.d4).is_zero(), "quantized integer divides exactly");
        let mut m = num / &self.d4;
        if negate {
            m = -m;
        }
        SpecVal {
            m,
            a: 2 - 2 * kk,
            b: 2 - 2 * kk,
        }
    }
}

// ---------------------------------------------------------------------------
// Windowed evaluation and the wing sweep
// ---------------------------------------------------------------------------

/// Torus-knot colored Jones values `J_{T(p,q)}(c)` for `c = 0..=c_max`,
/// built incrementally: the writhe-normalized sums satisfy
/// `S(c) = S(c-2) + term(c-1) + term(-(c-1))` along each parity chain,
/// so each color costs two term additions.
fn torus_window<D: EvalDomain>(d: &D, p: i64, q: i64, c_max: i64) -> Vec<D::V> {
    let mut out = Vec::with_capacity((c_max + 1).max(1) as usize);
    out.push(d.zero());
    if c_max < 1 {
        return out;
    }
    let term = |tw: i64| {
        d.mul(
            &d.tpow(p * q * tw * tw + 2 * p * tw),
            &d.bracket(q * tw + 1),
        )
    };
    let mut s_odd = term(0);
    out.push(s_odd.clone());
    if c_max < 2 {
        return out;
    }
    let mut s_even = d.add(&term(1), &term(-1));
    out.push(d.mul(&d.tpow(-p * q * 3), &s_even));
    for c in 3..=c_max {
        let chain = if c % 2 == 1 { &mut s_odd } else { &mut s_even };
        let boundary = d.add(&term(c - 1), &term(-(c - 1)));
        *chain = d.add(chain, &boundary);
        out.push(d.mul(&d.tpow(-p * q * (c * c - 1)), chain));
    }
    out
}

/// Cable colored Jones values `J_C(n)` for `n = lo..=hi` (odd extension
/// for `n ≤ 0`), built on a torus window via the same incremental parity
/// chains over the cabling sum.
fn cable_window<D: EvalDomain>(d: &D, params: &CableParams, lo: i64, hi: i64) -> Vec<D::V> {
    let CableParams { p, q, r, s } = *params;
    let n_max = hi.abs().max(lo.abs()).max(1);
    let tor = torus_window(d, p, q, s * (n_max - 1) + 1);
    let jt = |c: i64| -> D::V {
        if c > 0 {
            tor[c as usize].clone()
        } else if c == 0 {
            d.zero()
        } else {
            d.neg(&tor[(-c) as usize])
        }
    };
    let cterm = |twoj: i64| d.mul(&d.tpow(r * s * twoj * twoj + 2 * r * twoj), &jt(s * twoj + 1));
    // pos[n] = J_C(n) for n = 1..=n_max.
    let mut pos = Vec::with_capacity(n_max as usize + 1);
    pos.push(d.zero()); // J_C(0)
    let mut s_odd = cterm(0);
    pos.push(s_odd.clone());
    if n_max >= 2 {
        let mut s_even = d.add(&cterm(1), &cterm(-1));
        pos.push(d.mul(&d.tpow(-r * s * 3), &s_even));
        for n in 3..=n_max {
            let chain = if n % 2 == 1 { &mut s_odd } else { &mut s_even };
            let boundary = d.add(&cterm(n - 1), &cterm(-(n - 1)));
            *chain = d.add(chain, &boundary);
            pos.push(d.mul(&d.tpow(-r * s * (n * n - 1)), chain));
        }
    }
    (lo..=hi)
        .map(|n| {
            if n > 0 {
                pos[n as usize].clone()
            } else if n == 0 {
                d.zero()
            } else {
                d.neg(&pos[(-n) as usize])
            }
        })
        .collect()
}

/// The `L`-exponent range of a factor's terms.
fn factor_b_range(f: &TorusElement) -> (i64, i64) {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for ((_, b), _) in f.iter() {
        lo = lo.min(b);
        hi = hi.max(b);
    }
    debug_assert!(lo <= hi, "factors are nonzero");
    (lo, hi)
}

/// The chain of windows a wing's right-to-left application needs: entry
/// `0` is the output window, entry `len` is the window of the underlying
/// sequence.
fn wing_windows(wing: &[TorusElement], n_lo: i64, n_hi: i64) -> Vec<(i64, i64)> {
    let mut windows = Vec::with_capacity(wing.len() + 1);
    windows.push((n_lo, n_hi));
    for f in wing {
        let (b_min, b_max) = factor_b_range(f);
        let last = *windows.last().expect("window chain is nonempty");
        windows.push((last.0 + b_min, last.1 + b_max));
    }
    windows
}

/// Applies a factored wing to windowed base values: factors are applied
/// right to left, each step computing `g(n) = Σ c(t₀) t₀^{2an} h(n+b)`
/// over its window. `base` covers `windows.last()` starting at
/// `base_lo`; the result covers `[n_lo, n_hi]`.
fn wing_apply<D: EvalDomain>(
    d: &D,
    wing: &[TorusElement],
    n_lo: i64,
    n_hi: i64,
    base: &[D::V],
    base_lo: i64,
) -> Vec<D::V> {
    let windows = wing_windows(wing, n_lo, n_hi);
    let (need_lo, need_hi) = *windows.last().expect("window chain is nonempty");
    debug_assert!(base_lo <= need_lo);
    debug_assert!(base_lo + base.len() as i64 > need_hi);
    let mut vals: Vec<D::V> = base[(need_lo - base_lo) as usize..=(need_hi - base_lo) as usize]
        .to_vec();
    let mut cur_lo = need_lo;
    for (i, f) in wing.iter().enumerate().rev() {
        let (out_lo, out_hi) = windows[i];
        let terms: Vec<(i64, i64, D::V)> =
            f.iter().map(|((a, b), c)| (a, b, d.scalar(c))).collect();
        let next: Vec<D::V> = (out_lo..=out_hi)
            .map(|n| {
                let mut acc = d.zero();
                for (a, b, cv) in &terms {
                    let shifted = &vals[(n + b - cur_lo) as usize];
                    let term = d.mul(cv, &d.mul(&d.tpow(2 * a * n), shifted));
                    acc = d.add(&acc, &term);
                }
                acc
            })
            .collect();
        vals = next;
        cur_lo = out_lo;
    }
    vals
}

/// Colors in `[n_lo, n_hi]` at which `(Π wings[0] + Π wings[1]) J_C`
/// fails to vanish in the domain. The cable base window is shared
/// between the wings.
fn annihilation_failures<D: EvalDomain>(
    d: &D,
    wings: &[Vec<TorusElement>; 2],
    params: &CableParams,
    n_lo: i64,
    n_hi: i64,
) -> Vec<i64> {
    let w0 = wing_windows(&wings[0], n_lo, n_hi);
    let w1 = wing_windows(&wings[1], n_lo, n_hi);
    let (lo0, hi0) = *w0.last().expect("window chain is nonempty");
    let (lo1, hi1) = *w1.last().expect("window chain is nonempty");
    let base_lo = lo0.min(lo1);
    let base_hi = hi0.max(hi1);
    let base = cable_window(d, params, base_lo, base_hi);
    let v0 = wing_apply(d, &wings[0], n_lo, n_hi, &base, base_lo);
    let v1 = wing_apply(d, &wings[1], n_lo, n_hi, &base, base_lo);
    (n_lo..=n_hi)
        .filter(|&n| {
            let i = (n - n_lo) as usize;
            !d.is_zero(&d.add(&v0[i], &v1[i]))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Annihilation verification
// ---------------------------------------------------------------------------

/// How the annihilation identity `R·J_C = 0` is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// Symbolic when the annihilator expands densely, specialized
    /// otherwise.
    Auto,
    /// Expand `R` and apply it to symbolic colored Jones values.
    Symbolic,
    /// Exact rational evaluation at configured points `t₀` (with a
    /// sound mod-p prescreen), keeping `R` factored.
    Specialized,
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerifyMode::Auto => "auto",
            VerifyMode::Symbolic => "symbolic",
            VerifyMode::Specialized => "specialized",
        };
        write!(f, "{s}")
    }
}

impl FromStr for VerifyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(VerifyMode::Auto),
            "symbolic" => Ok(VerifyMode::Symbolic),
            "specialized" => Ok(VerifyMode::Specialized),
            other => Err(format!(
                "unknown mode {other:?}; expected auto, symbolic, or specialized"
            )),
        }
    }
}

/// Outcome of the annihilation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilationReport {
    /// Resolved mode the check ran in (`"symbolic"` or `"specialized"`).
    pub mode: String,
    /// First color checked.
    pub n_lo: i64,
    /// Last color checked.
    pub n_hi: i64,
    /// Specialization points used (specialized mode).
    pub t0_values: Vec<String>,
    /// Human-readable descriptions of every nonvanishing point (empty on
    /// success).
    pub failures: Vec<String>,
    /// Total points checked across colors and specializations.
    pub checked_points: u32,
    /// Wall-clock time.
    pub elapsed_ms: u64,
}

impl AnnihilationReport {
    /// True when every checked point vanished.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Resolves `Auto` against the witness size.
fn resolve_mode(mode: VerifyMode, m: u32) -> VerifyMode {
    match mode {
        VerifyMode::Auto => {
            if m <= DENSE_LIMIT {
                VerifyMode::Symbolic
            } else {
                VerifyMode::Specialized
            }
        }
        other => other,
    }
}

/// Checks `R · J_C = 0` for `n = n_lo..=n_hi`.
///
/// Symbolic mode applies the dense annihilator to symbolic colored
/// Jones values — a complete check per color. Specialized mode runs the
/// factored wing sweep at each `t₀`: first in `𝔽_p` at the residue of
/// `t₀` (a sound, fast refuter), then in exact power-scaled rational
/// arithmetic; specializations run in parallel.
///
/// # Errors
///
/// [`ConjectureError::ResourceBound`] when symbolic mode is requested
/// but the annihilator is too large to expand;
/// [`ConjectureError::InvalidParams`] for empty or degenerate `t₀`
/// lists. Nonvanishing points are reported in
/// [`AnnihilationReport::failures`], not as errors.
pub fn verify_annihilation(
    w: &WitnessBundle,
    n_lo: i64,
    n_hi: i64,
    mode: VerifyMode,
    t0_list: &[BigRational],
) -> Result<AnnihilationReport, ConjectureError> {
    let started = Instant::now();
    if n_lo > n_hi {
        return Err(ConjectureError::InvalidParams(format!(
            "empty color range {n_lo}..={n_hi}"
        )));
    }
    let resolved = resolve_mode(mode, w.m);
    let mut failures = Vec::new();
    let mut t0_values = Vec::new();
    let checked_points;
    match resolved {
        VerifyMode::Symbolic => {
            let Some(r) = w.r_dense.as_ref() else {
                return Err(ConjectureError::ResourceBound(format!(
                    "annihilator with {} symmetric factors is too large to expand; \
                     use specialized mode",
                    w.m
                )));
            };
            let jc = jones_sequence(&w.params.knot()?);
            for n in n_lo..=n_hi {
                if !r.apply(&jc, n)?.is_zero() {
                    failures.push(format!("n = {n}: symbolic value is nonzero"));
                }
            }
            checked_points = (n_hi - n_lo + 1) as u32;
        }
        VerifyMode::Specialized => {
            if t0_list.is_empty() {
                return Err(ConjectureError::InvalidParams(
                    "specialized mode needs at least one t₀".into(),
                ));
            }
            t0_values = t0_list.iter().map(|t| t.to_string()).collect();
            let per_t0: Vec<Vec<String>> = t0_list
                .par_iter()
                .map(|t0| -> Result<Vec<String>, ConjectureError> {
                    let mut local = Vec::new();
                    if let Some(md) = ModpDomain::from_rational(t0) {
                        for n in annihilation_failures(&md, &w.wings, &w.params, n_lo, n_hi) {
                            local.push(format!(
                                "n = {n}: nonzero residue at t₀ = {t0} (mod 2⁶¹−1)"
                            ));
                        }
                        if !local.is_empty() {
                            return Ok(local);
                        }
                    }
                    let sd = SpecDomain::new(t0)?;
                    for n in annihilation_failures(&sd, &w.wings, &w.params, n_lo, n_hi) {
                        local.push(format!("n = {n}: nonzero exact value at t₀ = {t0}"));
                    }
                    Ok(local)
                })
                .collect::<Result<Vec<_>, _>>()?;
            for mut local in per_t0 {
                failures.append(&mut local);
            }
            checked_points = (n_hi - n_lo + 1) as u32 * t0_list.len() as u32;
        }
        VerifyMode::Auto => unreachable!("resolve_mode eliminates Auto"),
    }
    Ok(AnnihilationReport {
        mode: resolved.to_string(),
        n_lo,
        n_hi,
        t0_values,
        failures,
        checked_points,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

// ---------------------------------------------------------------------------
// The ε-certificate
// ---------------------------------------------------------------------------

/// The verified shape of the certificate
/// `ε(S R) = η · M^{a_exp} L^{b_exp} · (A_C)^{power}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonReport {
    /// Unit sign `η`.
    pub eta: i64,
    /// `M`-exponent of the unit monomial.
    pub a_exp: i64,
    /// `L`-exponent of the unit monomial.
    pub b_exp: i64,
    /// Exponent of `A_C`.
    pub power: u32,
    /// Whether `(a_exp, b_exp) = k · (a_A, b_A)` for the symmetry
    /// exponents of `A_C` — the constraint σ-invariance of `S R` forces.
    pub symmetry_consistent: bool,
    /// Whether the exponents match the per-case closed forms.
    pub closed_form_consistent: bool,
    /// Whether the monolithic quotient `ε(S)ε(R) / A^{2k}` was computed
    /// at scale (always attempted within the term budget; above it the
    /// identity is established factorwise).
    pub full_division: bool,
    /// Expanded term count of `A^{2k}` when the monolithic quotient ran.
    pub quotient_terms: usize,
}

/// Per-case closed forms `(a_exp/k, b_exp/k)` of the certificate
/// monomial.
fn certificate_closed_form(params: &CableParams) -> (i64, i64) {
    let CableParams { p, q, r, s } = *params;
    match params.case() {
        CaseTag::OddSQBig => (2 * r * s + 2 * p * q * s * s, -5),
        CaseTag::OddSQ2 => (2 * r * s + 2 * p * s * s, -4),
        CaseTag::EvenSBig => (2 * r * s + p * q * s * s, -4),
        CaseTag::S2 => (2 * r + 4 * p * q, -3),
    }
}

/// Verifies the certificate `ε(S R) = η M^{a} L^{b} (A_C)^{2k}` exactly.
///
/// The check is layered so every step is an honest polynomial identity:
///
/// 1. every `Q`-factor shadow equals `L + L^{-1} - 2`, and the `P`
///    shadows agree with `ε(P) = ε(P₁)^{fpow}`;
/// 2. the wing-sum shadow collapses: `ε(R) = sym · ε(P₁)^{fpow} · E^m`
///    with `sym` the cabling-split shadow — computed from the honest
///    factor products, at scale;
/// 3. the cofactor exponents regroup `ε(S)ε(R)` into
///    `sym^k · ε(P₁)^k · E^k`;
/// 4. each grouped shadow is a unit monomial times the square of its
///    paired A-factor (`monomial_quotient` against the factor squares);
/// 5. the resulting monomial arithmetic is cross-checked against the
///    σ-symmetry exponents of `A_C` and the per-case closed forms;
/// 6. within the term budget, the monolithic quotient
///    `ε(S)ε(R) / A^{2k}` is computed at scale and must equal the unit
///    monomial; when the dense annihilator exists, `ε(S)·ε(R)` is also
///    recomputed without regrouping as a final cross-check.
///
/// # Errors
///
/// [`ConjectureError::WitnessArithmetic`] on any failed identity.
pub fn verify_epsilon_identity(w: &WitnessBundle) -> Result<EpsilonReport, ConjectureError> {
    let fail = |what: String| ConjectureError::WitnessArithmetic(what);
    let e = e_plane();
    for (i, qf) in w.q_factors.iter().enumerate() {
        if qf.epsilon() != e {
            return Err(fail(format!("Q factor {i} shadow is not L + L⁻¹ - 2")));
        }
    }
    let f_eps = w.p_factors[0].epsilon();
    for (i, pf) in w.p_factors.iter().enumerate() {
        if pf.epsilon() != f_eps {
            return Err(fail(format!("P factor {i} shadow differs from ε(P₁)")));
        }
    }
    if w.p.epsilon() != f_eps.pow(w.fpow) {
        return Err(fail("ε(P) ≠ ε(P₁)^fpow".into()));
    }

    // Honest wing-sum shadow, then the collapse identity.
    let wing_shadow = |wing: &[TorusElement]| -> PlaneCurvePoly {
        let mut acc = PlaneCurvePoly::one();
        for f in wing {
            acc = acc.mul(&f.epsilon());
        }
        acc
    };
    let eps_r = wing_shadow(&w.wings[0]).add(&wing_shadow(&w.wings[1]));
    let sym_eps = w.s_factors[0].0.epsilon();
    let e_pow_m = e.pow(w.m);
    let grouped = sym_eps.mul(&f_eps.pow(w.fpow)).mul(&e_pow_m);
    if eps_r != grouped {
        return Err(fail("wing-sum shadow does not collapse to sym·ε(P₁)^fpow·E^m".into()));
    }

    // Cofactor bases shadow to the grouped factors, and the exponents
    // regroup to k per group.
    let bases = [&sym_eps, &f_eps, &e];
    let r_contrib = [1, w.fpow, w.m];
    for (i, ((base_lift, s_pow), (base, contrib))) in w
        .s_factors
        .iter()
        .zip(bases.iter().zip(r_contrib))
        .enumerate()
    {
        if base_lift.epsilon() != **base {
            return Err(fail(format!("cofactor base {i} has the wrong shadow")));
        }
        if s_pow + contrib != w.k {
            return Err(fail(format!(
                "cofactor exponent {i} does not regroup to k: {s_pow} + {contrib} ≠ {}",
                w.k
            )));
        }
    }

    // Per-factor square certificates, pairing grouped shadows with
    // A-factors: sym ↔ cabling factor, ε(P₁) ↔ companion factor,
    // E ↔ (L - 1).
    let pairs = [
        (&sym_eps, &w.a_factors[2]),
        (&f_eps, &w.a_factors[1]),
        (&e, &w.a_factors[0]),
    ];
    let mut a_sum = 0i64;
    let mut b_sum = 0i64;
    let mut eta = 1i64;
    for (i, (shadow, factor)) in pairs.iter().enumerate() {
        let square = factor.pow(2);
        let Some((c, (a, b))) = shadow.monomial_quotient(&square) else {
            return Err(fail(format!(
                "grouped shadow {i} is not a monomial multiple of its A-factor squared"
            )));
        };
        let unit = if c == BigInt::one() {
            1
        } else if c == -BigInt::one() {
            -1
        } else {
            return Err(fail(format!("square certificate {i} has non-unit coefficient {c}")));
        };
        a_sum += a;
        b_sum += b;
        if unit == -1 && w.k % 2 == 1 {
            eta = -eta;
        }
    }
    let k = i64::from(w.k);
    let a_exp = k * a_sum;
    let b_exp = k * b_sum;

    // Monolithic quotient within the term budget.
    let span = 2 * k + 1;
    let full_division = span * span * span <= FULL_DIVISION_TERM_BUDGET;
    let mut quotient_terms = 0usize;
    if full_division {
        let n_poly = sym_eps.pow(w.k).mul(&f_eps.pow(w.k)).mul(&e.pow(w.k));
        let d_poly = w.a_factors[0]
            .pow(w.power)
            .mul(&w.a_factors[1].pow(w.power))
            .mul(&w.a_factors[2].pow(w.power));
        quotient_terms = d_poly.num_terms();
        let Some((c, (a, b))) = n_poly.monomial_quotient(&d_poly) else {
            return Err(fail("ε(S)ε(R) is not a monomial multiple of A^2k".into()));
        };
        if c != BigInt::from(eta) || a != a_exp || b != b_exp {
            return Err(fail(format!(
                "certificate quotient mismatch: got {c}·M^{a}L^{b}, expected {eta}·M^{a_exp}L^{b_exp}"
            )));
        }
        if w.r_dense.is_some() {
            // Ungrouped cross-check: ε(S)·ε(R) with ε(S) from the stored
            // cofactor powers and ε(R) from the honest wing sum.
            let mut eps_s = PlaneCurvePoly::one();
            for (base, pow) in &w.s_factors {
                eps_s = eps_s.mul(&base.epsilon().pow(*pow));
            }
            if eps_s.mul(&eps_r) != n_poly {
                return Err(fail("ungrouped ε(S)ε(R) differs from the regrouped product".into()));
            }
        }
    }

    // Symmetry-exponent consistency (σ-invariance of S R forces the
    // monomial to be the k-th power of the A-polynomial's own unit).
    let (_eta_a, a_a, b_a) = symmetry_exponents(&w.a_c)?;
    let symmetry_consistent = a_exp == a_a * k && b_exp == b_a * k;
    if !symmetry_consistent {
        return Err(fail(format!(
            "certificate monomial ({a_exp}, {b_exp}) is not k·(a_A, b_A) = ({}, {})",
            a_a * k,
            b_a * k
        )));
    }

    // Per-case closed forms.
    let (a_cf, b_cf) = certificate_closed_form(&w.params);
    let closed_form_consistent = a_exp == a_cf * k && b_exp == b_cf * k && eta == 1;
    if !closed_form_consistent {
        return Err(fail(format!(
            "certificate monomial η={eta}, ({a_exp}, {b_exp}) differs from the closed form \
             +1, ({}, {})",
            a_cf * k,
            b_cf * k
        )));
    }

    Ok(EpsilonReport {
        eta,
        a_exp,
        b_exp,
        power: w.power,
        symmetry_consistent,
        closed_form_consistent,
        full_division,
        quotient_terms,
    })
}

// ---------------------------------------------------------------------------
// Shift-lemma verification
// ---------------------------------------------------------------------------

/// Certifies the torus-knot shift lemmas for `m = 1..=m_max`: the
/// operators
///
/// * `L^{2m} - t^{-4pqm²} M^{-2pqm}` (all `q`), with frequency support
///   `{-pq(2u+1) ± (p+q), -pq(2u+1) ± (p-q) : 0 ≤ u < m}`;
/// * `L^{m} - (-1)^m t^{-2pm²} M^{-2pm}` (only `q = 2`), with support
///   `{-p(2u+1) ± 2 : 0 ≤ u < m}`,
///
/// map `J_T` into the exponential-polynomial module. Each fit must come
/// back Member with exactly the predicted support.
///
/// # Errors
///
/// [`ConjectureError::FitFailed`] on refutation or support mismatch,
/// [`ConjectureError::ResourceBound`] on an inconclusive fit.
pub fn verify_shift_lemmas(
    p: i64,
    q: i64,
    m_max: u32,
    cfg: &RunConfig,
) -> Result<Vec<FitReport>, ConjectureError> {
    let jt_sym = torus_jones(p, q)?;
    let jt_mod = Arc::new(ModpJones::new(p, q));
    let bare = GModp {
        r2: 0,
        s: 1,
        off: -1,
        jt: Arc::clone(&jt_mod),
    };
    let mut reports = Vec::new();
    let mut run = |op: TorusElement, expected: Vec<i64>| -> Result<(), ConjectureError> {
        let seq = OpGSeq::new(&op, &jt_sym, bare.clone());
        let report = fit_adaptive(&seq, 1, cfg.k0, cfg.k_max, cfg.extra)?;
        match report.status {
            FitStatus::Member => {}
            FitStatus::NotMember => {
                return Err(ConjectureError::FitFailed(
                    "shift-lemma membership soundly refuted".into(),
                ));
            }
            FitStatus::Inconclusive => {
                return Err(ConjectureError::ResourceBound(format!(
                    "shift-lemma fit inconclusive at frequency bound {}",
                    report.k_used
                )));
            }
        }
        if report.support != expected {
            return Err(ConjectureError::FitFailed(format!(
                "shift-lemma support {:?} differs from the predicted {:?}",
                report.support, expected
            )));
        }
        reports.push(report);
        Ok(())
    };
    for m in 1..=i64::from(m_max) {
        let op = TorusElement::from_mono_terms([
            (0, 2 * m, LaurentScalar::one()),
            (
                -2 * p * q * m,
                0,
                LaurentScalar::tpow(-4 * p * q * m * m).neg(),
            ),
        ]);
        let mut expected = Vec::new();
        for u in 0..m {
            for e in [p + q, -(p + q), p - q, -(p - q)] {
                expected.push(-p * q * (2 * u + 1) + e);
            }
        }
        expected.sort_unstable();
        expected.dedup();
        run(op, expected)?;
    }
    if q == 2 {
        for m in 1..=i64::from(m_max) {
            // Coefficient −(−1)^m t^{−2pm²}.
            let coeff = if m % 2 == 0 {
                LaurentScalar::tpow(-2 * p * m * m).neg()
            } else {
                LaurentScalar::tpow(-2 * p * m * m)
            };
            let op = TorusElement::from_mono_terms([
                (0, m, LaurentScalar::one()),
                (-2 * p * m, 0, coeff),
            ]);
            let mut expected = Vec::new();
            for u in 0..m {
                for e in [2, -2] {
                    expected.push(-p * (2 * u + 1) + e);
                }
            }
            expected.sort_unstable();
            expected.dedup();
            run(op, expected)?;
        }
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// The end-to-end pipeline
// ---------------------------------------------------------------------------

/// Tuning knobs for the verification pipeline.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Initial frequency bound of the fit ladder.
    pub k0: u32,
    /// Maximum frequency bound of the fit ladder.
    pub k_max: u32,
    /// Extra validation points beyond each fitted window.
    pub extra: u32,
    /// Specialization points for the specialized annihilation check.
    pub t0_list: Vec<BigRational>,
    /// Annihilation mode.
    pub mode: VerifyMode,
    /// Worker threads for specialized verification (applied by the CLI
    /// to the global thread pool; the library uses whatever pool is
    /// current).
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rat = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        RunConfig {
            k0: 8,
            k_max: 256,
            extra: 5,
            t0_list: vec![rat(2, 1), rat(3, 2), rat(5, 3)],
            mode: VerifyMode::Auto,
            parallelism: 1,
        }
    }
}

/// Outcome of one pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    /// The stage's checks all passed.
    Pass,
    /// A check failed or errored.
    Fail,
    /// Not run because an earlier stage failed.
    Skipped,
}

/// One pipeline stage: name, outcome, human-readable details, timing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    /// Stage name (`cable_splitting`, `p_membership`,
    /// `witness_assembly`, `annihilation`, `epsilon_identity`).
    pub name: String,
    /// Outcome.
    pub status: StageStatus,
    /// What was checked or why it failed.
    pub details: String,
    /// Wall-clock time.
    pub elapsed_ms: u64,
}

/// The certificate monomial, serialized for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialReport {
    /// Unit sign.
    pub eta: i64,
    /// `M`-exponent.
    pub a_exp: i64,
    /// `L`-exponent.
    pub b_exp: i64,
}

/// The complete result of [`strong_aj_verify`]: per-stage outcomes plus
/// the headline witness data, JSON-serializable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredReport {
    /// Cable parameters.
    pub params: CableParams,
    /// Constructive case.
    pub case: CaseTag,
    /// Whether the slope is admissible (always true in produced reports;
    /// inadmissible parameters error before a report exists).
    pub admissible: bool,
    /// Resolved annihilation mode (`"auto"` until the witness is built).
    pub mode: String,
    /// The color range the annihilation check ran on.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_range: Option<(i64, i64)>,
    /// Stage-by-stage outcomes, in execution order.
    pub stages: Vec<StageReport>,
    /// The certified membership fits.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub fits: Vec<FitReport>,
    /// Number of symmetric annihilator factors.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
    /// Certificate half-power.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u32>,
    /// Certificate power (exponent of `A_C`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub power: Option<u32>,
    /// The verified certificate monomial.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub monomial: Option<MonomialReport>,
    /// Symmetry exponents of the expanded A-polynomial.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub symmetry: Option<SymmetryReport>,
    /// True when every stage passed.
    pub verified: bool,
    /// True when the pipeline stopped at a resource bound rather than a
    /// mathematical failure.
    pub resource_bound: bool,
}

impl StructuredReport {
    /// Process exit code: `0` verified, `3` resource bound, `1` any
    /// mathematical failure.
    pub fn exit_code(&self) -> i32 {
        if self.verified {
            0
        } else if self.resource_bound {
            3
        } else {
            1
        }
    }
}

/// Runs the full verification pipeline for one cable:
/// `cable_splitting → p_membership → witness_assembly → annihilation →
/// epsilon_identity`, stopping (and skipping the rest) at the first
/// failure.
///
/// `n_range` overrides the annihilation color range; the default is
/// `1..=8` symbolic and `1..=4` specialized.
///
/// # Errors
///
/// Only input errors ([`ConjectureError::InvalidParams`],
/// [`ConjectureError::Inadmissible`]) are returned as `Err`;
/// mathematical failures and resource bounds are recorded in the report
/// and its exit code.
pub fn strong_aj_verify(
    params: &CableParams,
    n_range: Option<(i64, i64)>,
    cfg: &RunConfig,
) -> Result<StructuredReport, ConjectureError> {
    params.ensure_admissible()?;
    let mut report = StructuredReport {
        params: *params,
        case: params.case(),
        admissible: true,
        mode: cfg.mode.to_string(),
        n_range,
        stages: Vec::new(),
        fits: Vec::new(),
        m: None,
        k: None,
        power: None,
        monomial: None,
        symmetry: None,
        verified: false,
        resource_bound: false,
    };
    let mut failed = false;

    // Each stage returns Ok(details) on pass, Err((details, resource))
    // on fail; skipped stages record no timing work.
    type StageBody<'a> = dyn FnMut(&mut StructuredReport) -> Result<String, (String, bool)> + 'a;
    let run_stage = |report: &mut StructuredReport,
                         failed: &mut bool,
                         name: &str,
                         body: &mut StageBody| {
        if *failed {
            report.stages.push(StageReport {
                name: name.into(),
                status: StageStatus::Skipped,
                details: "skipped after earlier failure".into(),
                elapsed_ms: 0,
            });
            return;
        }
        let started = Instant::now();
        let (status, details) = match body(report) {
            Ok(details) => (StageStatus::Pass, details),
            Err((details, resource)) => {
                *failed = true;
                report.resource_bound = report.resource_bound || resource;
                (StageStatus::Fail, details)
            }
        };
        report.stages.push(StageReport {
            name: name.into(),
            status,
            details,
            elapsed_ms: started.elapsed().as_millis() as u64,
        });
    };
    // Maps pipeline errors onto (details, is-resource-bound).
    let stage_err = |e: ConjectureError| -> (String, bool) {
        let resource = matches!(e, ConjectureError::ResourceBound(_));
        (e.to_string(), resource)
    };

    run_stage(&mut report, &mut failed, "cable_splitting", &mut |_| {
        let sr = verify_cable_splitting(params, 0, 12).map_err(stage_err)?;
        if sr.failures.is_empty() {
            Ok(format!("{} holds for n = {}..={}", sr.identity, sr.n_lo, sr.n_hi))
        } else {
            Err((format!("{} fails at n ∈ {:?}", sr.identity, sr.failures), false))
        }
    });

    let mut evidence: Option<MembershipEvidence> = None;
    run_stage(&mut report, &mut failed, "p_membership", &mut |report| {
        let ev = verify_p_membership(params, cfg).map_err(stage_err)?;
        let supports: Vec<usize> = ev.pg.iter().map(|e| e.support().len()).collect();
        let details = format!(
            "{} certified fit(s); P·G support sizes {:?}; {} re-validation points",
            ev.fits.len(),
            supports,
            ev.pg_validated_points
        );
        report.fits = ev.fits.clone();
        evidence = Some(ev);
        Ok(details)
    });

    let mut witness: Option<WitnessBundle> = None;
    run_stage(&mut report, &mut failed, "witness_assembly", &mut |report| {
        let ev = evidence.take().expect("membership stage passed");
        let w = assemble_witness(params, ev).map_err(stage_err)?;
        report.m = Some(w.m);
        report.k = Some(w.k);
        report.power = Some(w.power);
        let (eta, a, b) = symmetry_exponents(&w.a_c).map_err(stage_err)?;
        report.symmetry = Some(SymmetryReport { eta, a, b });
        let details = format!(
            "m = {}, k = {}, power = {}; wings of {} factors; σ-mirror verified",
            w.m,
            w.k,
            w.power,
            w.wings[0].len()
        );
        witness = Some(w);
        Ok(details)
    });

    run_stage(&mut report, &mut failed, "annihilation", &mut |report| {
        let w = witness.as_ref().expect("witness stage passed");
        let resolved = resolve_mode(cfg.mode, w.m);
        report.mode = resolved.to_string();
        let (lo, hi) = n_range.unwrap_or(match resolved {
            VerifyMode::Specialized => (1, 4),
            _ => (1, 8),
        });
        report.n_range = Some((lo, hi));
        let ar = verify_annihilation(w, lo, hi, resolved, &cfg.t0_list).map_err(stage_err)?;
        if ar.passed() {
            Ok(format!(
                "R·J_C = 0 for n = {}..={} ({} mode, {} points)",
                ar.n_lo, ar.n_hi, ar.mode, ar.checked_points
            ))
        } else {
            Err((format!("annihilation fails: {}", ar.failures.join("; ")), false))
        }
    });

    run_stage(&mut report, &mut failed, "epsilon_identity", &mut |report| {
        let w = witness.as_ref().expect("witness stage passed");
        let er = verify_epsilon_identity(w).map_err(stage_err)?;
        report.monomial = Some(MonomialReport {
            eta: er.eta,
            a_exp: er.a_exp,
            b_exp: er.b_exp,
        });
        Ok(format!(
            "ε(SR) = {:+}·M^{}L^{}·A^{} ({}; symmetry and closed forms consistent)",
            er.eta,
            er.a_exp,
            er.b_exp,
            er.power,
            if er.full_division {
                "monolithic quotient verified"
            } else {
                "factorwise quotient verified"
            }
        ))
    });

    report.verified = !failed;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{parse_rational, rational_pow, RatScalar};

    fn params(p: i64, q: i64, r: i64, s: i64) -> CableParams {
        CableParams::new(p, q, r, s).expect("test parameters are valid")
    }

    fn op(s: &str) -> TorusElement {
        s.parse().expect("test operator parses")
    }

    #[test]
    fn parameter_validation_and_cases() {
        assert_eq!(params(4, 3, 37, 3).case(), CaseTag::OddSQBig);
        assert_eq!(params(3, 2, 19, 3).case(), CaseTag::OddSQ2);
        assert_eq!(params(3, 2, 25, 4).case(), CaseTag::EvenSBig);
        assert_eq!(params(3, 2, 13, 2).case(), CaseTag::S2);
        assert_eq!(params(3, 2, 13, 2).case().index(), 4);

        assert!(matches!(
            CableParams::new(2, 2, 1, 2),
            Err(ConjectureError::InvalidParams(_))
        ));
        assert!(matches!(
            CableParams::new(3, 3, 1, 2),
            Err(ConjectureError::InvalidParams(_))
        ));
        assert!(matches!(
            CableParams::new(4, 2, 1, 3),
            Err(ConjectureError::InvalidParams(_))
        ));
        assert!(matches!(
            CableParams::new(3, 1, 1, 2),
            Err(ConjectureError::InvalidParams(_))
        ));
        assert!(matches!(
            CableParams::new(3, 2, 1, 1),
            Err(ConjectureError::InvalidParams(_))
        ));
        assert!(matches!(
            CableParams::new(3, 2, 4, 2),
            Err(ConjectureError::InvalidParams(_))
        ));

        assert!(params(3, 2, 13, 2).is_admissible());
        assert!(params(3, 2, -1, 2).is_admissible());
        assert!(!params(3, 2, 7, 2).is_admissible());
        assert!(!params(3, 2, 1, 3).is_admissible());
        assert!(params(4, 3, 37, 3).is_admissible());
        assert!(matches!(
            params(3, 2, 7, 2).ensure_admissible(),
            Err(ConjectureError::Inadmissible(_))
        ));
        assert_eq!(params(3, 2, 13, 2).to_string(), "C(3,2;13,2)");
    }

    #[test]
    fn a_polynomial_factors_and_symmetry() {
        let pr = params(3, 2, 13, 2);
        let factors = a_polynomial_factors(&pr);
        assert_eq!(factors.len(), 3);
        assert_eq!(
            factors[0],
            PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (0, 0, -1)])
        );
        assert_eq!(
            factors[1],
            PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-24, 0, -1)])
        );
        assert_eq!(
            factors[2],
            PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (-26, 0, 1)])
        );

        // Single-factor symmetry data.
        assert_eq!(symmetry_exponents(&factors[0]).unwrap(), (-1, 0, -1));
        assert_eq!(symmetry_exponents(&factors[1]).unwrap(), (-1, 24, -1));
        assert_eq!(symmetry_exponents(&factors[2]).unwrap(), (1, 26, -1));

        // The expanded A-polynomial of the two reference cables.
        assert_eq!(
            symmetry_exponents(&a_polynomial_cable(&pr)).unwrap(),
            (1, 50, -3)
        );
        assert_eq!(
            symmetry_exponents(&a_polynomial_cable(&params(4, 3, 37, 3))).unwrap(),
            (-1, 438, -5)
        );

        // A non-symmetric polynomial is rejected.
        let lopsided = PlaneCurvePoly::from_i64_terms(&[(0, 1, 1), (1, 0, -1), (0, 0, 1)]);
        assert!(matches!(
            symmetry_exponents(&lopsided),
            Err(ConjectureError::NotSymmetric(_))
        ));
    }

    #[test]
    fn g_sequences_match_their_definitions() {
        let pr = params(3, 2, 19, 3);
        let g = build_g(&pr).unwrap();
        assert_eq!(g.len(), 2);
        let jt = torus_jones(3, 2).unwrap();
        let g1_0 = jt.value(4).unwrap().mul_monomial(&BigInt::one(), 38);
        let g2_0 = jt.value(2).unwrap().mul_monomial(&BigInt::one(), -38);
        assert_eq!(*g[0].value(0).unwrap(), g1_0);
        assert_eq!(*g[1].value(0).unwrap(), g2_0);

        let pr2 = params(3, 2, 13, 2);
        let g2 = build_g(&pr2).unwrap();
        assert_eq!(g2.len(), 1);
        assert_eq!(*g2[0].value(0).unwrap(), *jt.value(1).unwrap());
        assert_eq!(*g2[0].value(3).unwrap(), *jt.value(7).unwrap());
    }

    #[test]
    fn cable_splitting_holds() {
        for pr in [params(3, 2, 19, 3), params(3, 2, 13, 2)] {
            let sr = verify_cable_splitting(&pr, 0, 10).unwrap();
            assert!(sr.failures.is_empty(), "splitting fails for {pr}: {sr:?}");
        }
        let sr = verify_cable_splitting(&params(4, 3, 37, 3), 0, 6).unwrap();
        assert!(sr.failures.is_empty());
    }

    #[test]
    fn p_operators_match_their_definitions() {
        // Case 4: the single factor, in written order.
        let pr = params(3, 2, 13, 2);
        let p = build_p(&pr);
        assert_eq!(p, op("L M^24 + L^-1 M^-24 - 1 - t^48"));
        assert_eq!(p.sigma(), p);

        // Case 1: two σ-invariant commuting factors with equal shadows.
        let pr1 = params(4, 3, 37, 3);
        let pf = build_p_factors(&pr1);
        assert_eq!(pf.len(), 2);
        for f in &pf {
            assert_eq!(f.sigma(), *f);
        }
        assert_eq!(pf[0].mul(&pf[1]), pf[1].mul(&pf[0]));
        assert_eq!(pf[0].epsilon(), pf[1].epsilon());
        // e₁ = 4r − 4pqs = 4·37 − 144 = 4; A = 2pqs² = 216.
        assert_eq!(
            pf[0],
            op("L^2 M^216 + L^-2 M^-216 - t^4 - t^860")
        );

        // The lift of the shadow reproduces the written symmetric form.
        let lifted = lift_symmetric(&pf[0].epsilon());
        assert_eq!(lifted, op("L^2 M^216 + L^-2 M^-216 - 2"));
        assert_eq!(lifted.epsilon(), pf[0].epsilon());
    }

    #[test]
    fn membership_case4_has_the_frozen_support_and_coefficients() {
        let pr = params(3, 2, 13, 2);
        let ev = verify_p_membership(&pr, &RunConfig::default()).unwrap();
        assert_eq!(ev.fits.len(), 1);
        assert!(matches!(ev.fits[0].status, FitStatus::Member));
        assert_eq!(ev.pg.len(), 1);
        let rep = &ev.pg[0];
        assert_eq!(rep.support(), vec![-22, -14, -10, -2, 2, 10, 14, 22]);

        // λ_j · (1 − t^{-4}) is a signed power of t.
        let den = LaurentScalar::one().sub(&LaurentScalar::tpow(-4));
        let expect = [
            (22i64, 44i64, 1i64),
            (14, 24, -1),
            (10, 16, -1),
            (2, 4, 1),
            (-2, 48, -1),
            (-10, 44, 1),
            (-14, 44, 1),
            (-22, 48, -1),
        ];
        for (j, e, sign) in expect {
            let lam = rep.coeff(j);
            let num = LaurentScalar::monomial(BigInt::from(sign), e);
            assert_eq!(
                lam,
                RatScalar::new(num, den.clone()),
                "coefficient at frequency {j}"
            );
        }
        assert!(!rep.has_polynomial_coefficients());
    }

    #[test]
    fn witness_case4_structure() {
        let pr = params(3, 2, 13, 2);
        let w = build_witness(&pr, &RunConfig::default()).unwrap();
        assert_eq!((w.m, w.k, w.power, w.fpow), (8, 8, 16, 1));
        assert_eq!(w.q_factors.len(), 8);
        assert_eq!(w.wings[0].len(), 8 + 4);

        let r = w.r_dense.as_ref().expect("small witness expands densely");
        assert_eq!(r.num_terms(), 153);
        assert_eq!(r.sigma(), *r);

        let q = w.q_dense.as_ref().unwrap();
        assert_eq!(q.epsilon(), e_plane().pow(8));

        let pows: Vec<u32> = w.s_factors.iter().map(|(_, p)| *p).collect();
        assert_eq!(pows, vec![7, 7, 0]);
        for (base, _) in &w.s_factors {
            assert_eq!(base.sigma(), *base);
        }
    }

    #[test]
    fn annihilation_case4_symbolic_and_mutation_control() {
        let pr = params(3, 2, 13, 2);
        let w = build_witness(&pr, &RunConfig::default()).unwrap();
        let ar = verify_annihilation(&w, 1, 8, VerifyMode::Symbolic, &[]).unwrap();
        assert!(ar.passed(), "annihilation failures: {:?}", ar.failures);
        assert_eq!(ar.mode, "symbolic");
        assert_eq!(ar.checked_points, 8);

        // A corrupted dense annihilator is caught.
        let mut bad = w.clone();
        bad.r_dense = Some(
            bad.r_dense
                .unwrap()
                .add(&TorusElement::monomial(LaurentScalar::one(), 0, 0)),
        );
        let ar = verify_annihilation(&bad, 1, 3, VerifyMode::Symbolic, &[]).unwrap();
        assert!(!ar.passed());
    }

    /// Reference value of a power-scaled exact result as a rational.
    fn spec_to_rational(d: &SpecDomain, v: &SpecVal, t0: &BigRational) -> BigRational {
        let _ = d;
        let m = BigRational::from(v.m.clone());
        let u = BigRational::from(t0.numer().clone());
        let w = BigRational::from(t0.denom().clone());
        m * rational_pow(&u, v.a) * rational_pow(&w, v.b)
    }

    #[test]
    fn specialized_domains_agree_with_symbolic_values() {
        let t0 = parse_rational("3/2").unwrap();
        let sd = SpecDomain::new(&t0).unwrap();

        // Torus values.
        let jt = torus_jones(3, 2).unwrap();
        let window = torus_window(&sd, 3, 2, 6);
        for c in 0..=6i64 {
            let direct = jt.value(c).unwrap().specialize(&t0).unwrap();
            assert_eq!(
                spec_to_rational(&sd, &window[c as usize], &t0),
                direct,
                "torus value at color {c}"
            );
        }

        // Cable values on a window straddling zero.
        let pr = params(3, 2, 13, 2);
        let jc = jones_sequence(&pr.knot().unwrap());
        let window = cable_window(&sd, &pr, -3, 3);
        for (i, n) in (-3..=3).enumerate() {
            let direct = jc.value(n).unwrap().specialize(&t0).unwrap();
            assert_eq!(
                spec_to_rational(&sd, &window[i], &t0),
                direct,
                "cable value at color {n}"
            );
        }

        // The mod-p domain matches symbolic specialization at residues.
        let t7 = parse_rational("7").unwrap();
        let md = ModpDomain::from_rational(&t7).unwrap();
        let window = torus_window(&md, 3, 2, 6);
        for c in 0..=6i64 {
            let direct = specialize_modp(&jt.value(c).unwrap(), 7);
            assert_eq!(window[c as usize], direct, "mod-p torus value at color {c}");
        }

        // Degenerate specialization points are rejected.
        assert!(SpecDomain::new(&parse_rational("1").unwrap()).is_err());
        assert!(SpecDomain::new(&parse_rational("-1").unwrap()).is_err());
        assert!(SpecDomain::new(&parse_rational("0").unwrap()).is_err());
    }

    #[test]
    fn annihilation_case4_specialized_and_mutation_control() {
        let pr = params(3, 2, 13, 2);
        let w = build_witness(&pr, &RunConfig::default()).unwrap();
        let t0s = vec![parse_rational("2").unwrap(), parse_rational("3/2").unwrap()];
        let ar = verify_annihilation(&w, 1, 3, VerifyMode::Specialized, &t0s).unwrap();
        assert!(ar.passed(), "specialized failures: {:?}", ar.failures);
        assert_eq!(ar.mode, "specialized");
        assert_eq!(ar.checked_points, 6);
        assert_eq!(ar.t0_values, vec!["2", "3/2"]);

        // A structurally corrupted wing factor is caught by the prescreen
        // or the exact sweep. (A scalar rescaling of a single wing factor
        // would be invisible: each wing annihilates J_C on its own, the
        // sum exists for σ-invariance.)
        let mut bad = w.clone();
        let last = bad.wings[0].len() - 1;
        bad.wings[0][last] =
            bad.wings[0][last].add(&TorusElement::monomial(LaurentScalar::one(), 0, 0));
        let ar = verify_annihilation(&bad, 1, 2, VerifyMode::Specialized, &t0s).unwrap();
        assert!(!ar.passed());
    }

    #[test]
    fn epsilon_certificate_case4() {
        let pr = params(3, 2, 13, 2);
        let w = build_witness(&pr, &RunConfig::default()).unwrap();
        let er = verify_epsilon_identity(&w).unwrap();
        assert_eq!((er.eta, er.a_exp, er.b_exp, er.power), (1, 400, -24, 16));
        assert!(er.symmetry_consistent);
        assert!(er.closed_form_consistent);
        assert!(er.full_division);
        assert!(er.quotient_terms > 0);

        // A corrupted cofactor exponent is caught.
        let mut bad = w.clone();
        bad.s_factors[0].1 += 1;
        assert!(matches!(
            verify_epsilon_identity(&bad),
            Err(ConjectureError::WitnessArithmetic(_))
        ));
    }

    #[test]
    fn shift_lemmas_have_the_predicted_supports() {
        let cfg = RunConfig::default();

        // q > 2: only the even-shift family.
        let reports = verify_shift_lemmas(5, 3, 2, &cfg).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].support, vec![-23, -17, -13, -7]);
        assert_eq!(
            reports[1].support,
            vec![-53, -47, -43, -37, -23, -17, -13, -7]
        );

        // q = 2: both families.
        let reports = verify_shift_lemmas(5, 2, 2, &cfg).unwrap();
        assert_eq!(reports.len(), 4);
        assert_eq!(reports[0].support, vec![-17, -13, -7, -3]);
        assert_eq!(reports[2].support, vec![-7, -3]);
        assert_eq!(reports[3].support, vec![-17, -13, -7, -3]);
    }

    #[test]
    fn full_pipeline_case4() {
        let pr = params(3, 2, 13, 2);
        let report = strong_aj_verify(&pr, None, &RunConfig::default()).unwrap();
        assert!(report.verified, "pipeline failed: {report:?}");
        assert_eq!(report.exit_code(), 0);
        assert!(!report.resource_bound);
        assert_eq!(report.stages.len(), 5);
        assert!(report
            .stages
            .iter()
            .all(|s| s.status == StageStatus::Pass));
        assert_eq!(report.m, Some(8));
        assert_eq!(report.k, Some(8));
        assert_eq!(report.power, Some(16));
        assert_eq!(
            report.monomial,
            Some(MonomialReport {
                eta: 1,
                a_exp: 400,
                b_exp: -24
            })
        );
        assert_eq!(
            report.symmetry,
            Some(SymmetryReport {
                eta: 1,
                a: 50,
                b: -3
            })
        );
        assert_eq!(report.mode, "symbolic");

        // JSON round-trip.
        let json = serde_json::to_string(&report).unwrap();
        let back: StructuredReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        // Inadmissible parameters are an input error, not a report.
        assert!(matches!(
            strong_aj_verify(&params(3, 2, 7, 2), None, &RunConfig::default()),
            Err(ConjectureError::Inadmissible(_))
        ));
    }
}
