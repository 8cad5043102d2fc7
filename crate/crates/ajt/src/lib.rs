//! Exact computer algebra for the colored Jones polynomials of iterated
//! torus cables and for mechanical verification of the strong AJ
//! conjecture on that family.
//!
//! Everything here is exact: integer-coefficient Laurent polynomials in a
//! quantum parameter `t`, their fraction field, a quantum-torus operator
//! algebra acting on color sequences, and plane-curve polynomials for the
//! classical (commutative) limit. No floating point is used anywhere.
//!
//! The crate is organized as a tower:
//!
//! - [`ring`] — scalars: Laurent polynomials `ℤ[t^{±1}]`, their fraction
//!   field, evaluation/specialization, exact division, canonical text forms.
//! - [`qtorus`] — the quantum torus `ℤ[t^{±1}]⟨M^{±1}, L^{±1}⟩ / (LM = t²ML)`
//!   in `M^a L^b` normal form, its action on sequences, the mirror involution
//!   `σ`, the commutative limit `ε` into plane-curve polynomials.
//! - [`jones`] — colored Jones polynomials of the unknot, torus knots
//!   `T(p,q)`, and iterated cables `C(p,q; r,s)`, via the cabling formula,
//!   with memoized color sequences and an optional on-disk cache.
//! - [`expfit`] — exponential-polynomial fitting: decide whether a sequence
//!   is a finite sum `Σ_j λ_j t^{2jn}` on a window, produce the exact
//!   coefficients and a reproduction certificate, or a sound refutation.
//! - [`conjecture`] — the verification pipeline: cable splitting, membership
//!   fits, annihilator synthesis, the inhomogeneous recurrence witness
//!   `R` with `R·J_C = 0`, and the classical-limit certificate
//!   `ε(S·R) = (unit monomial) · A_C^{2k}`.
//!
//! The intended entry points are [`jones::colored_jones`],
//! [`expfit::fit_adaptive`], [`conjecture::a_polynomial_cable`], and
//! [`conjecture::strong_aj_verify`].

pub mod conjecture;
pub mod expfit;
pub mod jones;
pub mod qtorus;
pub mod ring;
