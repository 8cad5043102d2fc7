//! Colored Jones polynomials of iterated cables over the unknot.
//!
//! The unknot takes the quantum-integer values `J_U(n) = [n] =
//! (t^{2n} − t^{−2n})/(t² − t^{−2})`, and an `(r,s)`-cable satisfies the
//! cabling formula
//!
//! ```text
//! J_{K^{(r,s)}}(n) = t^{−rs(n²−1)} · Σ_j t^{4rj(js+1)} J_K(2sj + 1),
//! ```
//!
//! where `j` runs over `−(n−1)/2, −(n−1)/2 + 1, …, (n−1)/2` (integers for
//! odd `n`, half-integers for even `n`). Internally the index is stored as
//! `twoj = 2j`, so every exponent is the integer
//! `rs·twoj² + 2r·twoj` (see [`half_integer_exponent`]) and no fractional
//! powers ever appear. Torus knots enter as `T(p,q) = U^{(p,q)}`, and the
//! cables of interest are `C(p,q; r,s) = T(p,q)^{(r,s)}`.
//!
//! Companion colors `2sj + 1` go negative inside the sum; they resolve
//! through the odd symmetry `J_K(−n) = −J_K(n)`, `J_K(0) = 0`, which the
//! underlying [`ColorSequence`] enforces structurally.
//!
//! Values are memoized per knot in a process-wide registry (the
//! verification pipeline re-reads the same colors thousands of times) and
//! can be persisted to / reloaded from a checksummed JSON cache directory
//! via [`cache`].
//!
//! Chirality convention: the cabling formula as implemented yields
//! `J_{T(3,2)}(2) = t^{−2}+t^{−6}+t^{−10}−t^{−18} = [2]·V(t⁴)` with `V`
//! the reduced Jones polynomial of the **left-handed** trefoil
//! (`V(q) = −q^{−4}+q^{−3}+q^{−1}`). Nothing downstream depends on the
//! convention; it is recorded here because it fixes signs in examples.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::qtorus::{ColorSequence, QTorusError};
use crate::ring::LaurentScalar;

/// Errors from knot construction, parsing, and evaluation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JonesError {
    /// A knot violates a structural invariant.
    #[error("invalid knot: {0}")]
    InvalidKnot(String),
    /// Invalid torus-knot or cable parameters.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// Knot notation failed to parse.
    #[error("cannot parse knot {input:?}: {msg}")]
    Parse { input: String, msg: String },
    /// A sequence evaluation failed.
    #[error(transparent)]
    Sequence(#[from] QTorusError),
}

/// An iterated cable over the unknot: the empty slope list is the unknot
/// `U`, and each successive pair `(r_i, s_i)` takes the `(r_i, s_i)`-cable
/// of what came before.
///
/// `T(p,q)` is `slopes = [(p,q)]`; `C(p,q; r,s)` is
/// `slopes = [(p,q), (r,s)]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CableKnot {
    slopes: Vec<(i64, i64)>,
}

impl CableKnot {
    /// The unknot.
    pub fn unknot() -> Self {
        CableKnot { slopes: Vec::new() }
    }

    /// The torus knot `T(p,q)` as the `(p,q)`-cable of the unknot.
    ///
    /// # Errors
    ///
    /// [`JonesError::InvalidParams`] unless `|p| > q ≥ 2` and
    /// `gcd(p,q) = 1`.
    pub fn torus(p: i64, q: i64) -> Result<Self, JonesError> {
        validate_torus_params(p, q)?;
        Ok(CableKnot { slopes: vec![(p, q)] })
    }

    /// The cable `C(p,q; r,s) = T(p,q)^{(r,s)}`.
    ///
    /// # Errors
    ///
    /// [`JonesError::InvalidParams`] if the torus parameters are invalid,
    /// `gcd(r,s) ≠ 1`, or `s < 2`.
    pub fn cable(p: i64, q: i64, r: i64, s: i64) -> Result<Self, JonesError> {
        validate_torus_params(p, q)?;
        validate_cable_slope(r, s)?;
        Ok(CableKnot { slopes: vec![(p, q), (r, s)] })
    }

    /// Builds an arbitrary iterated cable from its slope list.
    ///
    /// # Errors
    ///
    /// [`JonesError::InvalidKnot`] when any slope has `gcd(r_i, s_i) ≠ 1`
    /// or `s_i < 2`.
    pub fn from_slopes(slopes: Vec<(i64, i64)>) -> Result<Self, JonesError> {
        for &(r, s) in &slopes {
            if s < 2 {
                return Err(JonesError::InvalidKnot(format!(
                    "slope ({r},{s}) violates s >= 2"
                )));
            }
            if r.gcd(&s) != 1 {
                return Err(JonesError::InvalidKnot(format!(
                    "slope ({r},{s}) violates gcd(r,s) = 1"
                )));
            }
        }
        Ok(CableKnot { slopes })
    }

    /// The slope list (outermost last).
    pub fn slopes(&self) -> &[(i64, i64)] {
        &self.slopes
    }

    /// Canonical encoding used as the memoization key, e.g. `U`,
    /// `T(3,2)`, `C(3,2;13,2)`.
    pub fn canonical_key(&self) -> String {
        self.to_string()
    }
}

fn validate_torus_params(p: i64, q: i64) -> Result<(), JonesError> {
    if q < 2 {
        return Err(JonesError::InvalidParams(format!(
            "torus knot T({p},{q}) violates q >= 2"
        )));
    }
    if p.abs() <= q {
        return Err(JonesError::InvalidParams(format!(
            "torus knot T({p},{q}) violates |p| > q"
        )));
    }
    if p.gcd(&q) != 1 {
        return Err(JonesError::InvalidParams(format!(
            "torus knot T({p},{q}) violates gcd(p,q) = 1"
        )));
    }
    Ok(())
}

fn validate_cable_slope(r: i64, s: i64) -> Result<(), JonesError> {
    if s < 2 {
        return Err(JonesError::InvalidParams(format!(
            "cable slope ({r},{s}) violates s >= 2"
        )));
    }
    if r.gcd(&s) != 1 {
        return Err(JonesError::InvalidParams(format!(
            "cable slope ({r},{s}) violates gcd(r,s) = 1"
        )));
    }
    Ok(())
}

impl fmt::Display for CableKnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.slopes.as_slice() {
            [] => write!(f, "U"),
            [(p, q)] => write!(f, "T({p},{q})"),
            [(p, q), (r, s)] => write!(f, "C({p},{q};{r},{s})"),
            more => {
                // General towers: U(r1,s1)(r2,s2)…
                write!(f, "U")?;
                for (r, s) in more {
                    write!(f, "({r},{s})")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for CableKnot {
    type Err = JonesError;

    /// Parses `U`, `T(p,q)`, or `C(p,q;r,s)` (whitespace-insensitive).
    ///
    /// # Errors
    ///
    /// [`JonesError::Parse`] on malformed notation;
    /// [`JonesError::InvalidParams`] naming the violated invariant when
    /// the shape is right but the numbers are not.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_err = |msg: &str| JonesError::Parse {
            input: s.to_string(),
            msg: msg.to_string(),
        };
        if compact == "U" || compact == "u" {
            return Ok(Self::unknot());
        }
        let (head, rest) = compact
            .split_at_checked(1)
            .ok_or_else(|| parse_err("empty knot"))?;
        let body = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| parse_err("expected parenthesized parameters"))?;
        let ints = |txt: &str| -> Result<Vec<i64>, JonesError> {
            txt.split(',')
                .map(|x| x.parse::<i64>().map_err(|_| parse_err(&format!("bad integer {x:?}"))))
                .collect()
        };
        match head {
            "T" | "t" => {
                let v = ints(body)?;
                if v.len() != 2 {
                    return Err(parse_err("T(p,q) takes exactly two integers"));
                }
                Self::torus(v[0], v[1])
            }
            "C" | "c" => {
                let (pq, rs) = body
                    .split_once(';')
                    .ok_or_else(|| parse_err("C(p,q;r,s) needs a semicolon"))?;
                let (pq, rs) = (ints(pq)?, ints(rs)?);
                if pq.len() != 2 || rs.len() != 2 {
                    return Err(parse_err("C(p,q;r,s) takes two pairs"));
                }
                Self::cable(pq[0], pq[1], rs[0], rs[1])
            }
            _ => Err(parse_err("knot must be U, T(p,q), or C(p,q;r,s)")),
        }
    }
}

/// The quantum integer `[n] = Σ_{i=0}^{n−1} t^{2(n−1−2i)}`, which is
/// `J_U(n)`; `[0] = 0` and `[−n] = −[n]`.
pub fn bracket(n: i64) -> LaurentScalar {
    if n == 0 {
        return LaurentScalar::zero();
    }
    if n < 0 {
        return bracket(-n).neg();
    }
    LaurentScalar::from_terms((0..n).map(|i| (2 * (n - 1 - 2 * i), BigInt::one())))
}

/// The integer exponent `rs·twoj² + 2r·twoj` of the cabling summand —
/// `4rj(js+1)` rewritten in the integer index `twoj = 2j` so half-integer
/// `j` never produces fractional powers.
pub fn half_integer_exponent(r: i64, s: i64, twoj: i64) -> i64 {
    r * s * twoj * twoj + 2 * r * twoj
}

fn registry() -> &'static Mutex<HashMap<String, ColorSequence>> {
    static REGISTRY: OnceLock<Mutex<HashMap<String, ColorSequence>>> = OnceLock::new();
    REGISTRY.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The memoized color sequence `n ↦ J_K(n)` of an iterated cable.
///
/// Sequences are shared process-wide per canonical knot encoding, so
/// repeated calls (and parallel workers) reuse every computed color. The
/// odd-parity rule is always set: `J_K(0) = 0`, `J_K(−n) = −J_K(n)`.
pub fn jones_sequence(knot: &CableKnot) -> ColorSequence {
    let key = knot.canonical_key();
    if let Some(seq) = registry().lock().unwrap().get(&key) {
        return seq.clone();
    }
    let seq = match knot.slopes.split_last() {
        None => ColorSequence::new(true, |n| Ok(bracket(n))),
        Some((&(r, s), inner)) => {
            let companion = jones_sequence(&CableKnot { slopes: inner.to_vec() });
            ColorSequence::new(true, move |n| {
                // n ≥ 1 here (parity rule handles the rest).
                let mut sum = LaurentScalar::zero();
                let mut twoj = -(n - 1);
                while twoj < n {
                    let e = half_integer_exponent(r, s, twoj);
                    let v = companion.value(s * twoj + 1)?;
                    sum = sum.add(&v.mul_monomial(&BigInt::one(), e));
                    twoj += 2;
                }
                Ok(sum.mul_monomial(&BigInt::one(), -r * s * (n * n - 1)))
            })
        }
    };
    registry()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert(seq)
        .clone()
}

/// The colored Jones polynomial `J_K(n)` of an iterated cable.
///
/// # Errors
///
/// Propagates sequence failures (none arise for valid knots).
pub fn colored_jones(knot: &CableKnot, n: i64) -> Result<LaurentScalar, JonesError> {
    Ok((*jones_sequence(knot).value(n)?).clone())
}

/// The memoized sequence `n ↦ J_{T(p,q)}(n)`.
///
/// # Errors
///
/// [`JonesError::InvalidParams`] unless `|p| > q ≥ 2`, `gcd(p,q) = 1`.
pub fn torus_jones(p: i64, q: i64) -> Result<ColorSequence, JonesError> {
    Ok(jones_sequence(&CableKnot::torus(p, q)?))
}

/// Checksummed on-disk persistence for the Jones memo.
///
/// The cache is one JSON file, `jones_cache.json`, holding
/// `{version, sha256, entries: [{knot, n, value}]}` where `sha256` is the
/// hex digest of the canonically serialized entries. A missing,
/// unreadable, corrupt, or checksum-mismatched file is treated as a cold
/// cache — never an error.
pub mod cache {
    use super::*;
    use serde::{Deserialize, Serialize};
    use sha2::{Digest, Sha256};
    use std::path::Path;

    const FILE_NAME: &str = "jones_cache.json";
    const VERSION: u32 = 1;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        knot: String,
        n: i64,
        value: LaurentScalar,
    }

    #[derive(Serialize, Deserialize)]
    struct CacheFile {
        version: u32,
        sha256: String,
        entries: Vec<Entry>,
    }

    fn digest_entries(entries: &[Entry]) -> String {
        let mut h = Sha256::new();
        for e in entries {
            h.update(e.knot.as_bytes());
            h.update(b"\x00");
            h.update(e.n.to_le_bytes());
            h.update(e.value.to_string().as_bytes());
            h.update(b"\x01");
        }
        format!("{:x}", h.finalize())
    }

    /// Loads cached colors into the process-wide memo. Returns the number
    /// of entries adopted (0 for cold/corrupt caches).
    pub fn load_from_dir(dir: &Path) -> usize {
        let path = dir.join(FILE_NAME);
        let Ok(text) = std::fs::read_to_string(&path) else {
            return 0;
        };
        let Ok(file) = serde_json::from_str::<CacheFile>(&text) else {
            return 0;
        };
        if file.version != VERSION || digest_entries(&file.entries) != file.sha256 {
            return 0;
        }
        let mut adopted = 0;
        for e in &file.entries {
            let Ok(knot) = e.knot.parse::<CableKnot>() else {
                continue;
            };
            let seq = jones_sequence(&knot);
            seq.seed(e.n, e.value.clone());
            adopted += 1;
        }
        adopted
    }

    /// Writes every memoized color of every knot touched by this process
    /// to the cache file. Returns the number of entries written.
    ///
    /// # Errors
    ///
    /// Propagates I/O failures (the directory is created if missing).
    pub fn save_to_dir(dir: &Path) -> std::io::Result<usize> {
        std::fs::create_dir_all(dir)?;
        let mut entries = Vec::new();
        for (key, seq) in registry().lock().unwrap().iter() {
            for (n, value) in seq.snapshot() {
                // Negative/zero colors are parity-derived; persist n ≥ 1 only.
                if n >= 1 {
                    entries.push(Entry { knot: key.clone(), n, value });
                }
            }
        }
        entries.sort_by(|a, b| (&a.knot, a.n).cmp(&(&b.knot, b.n)));
        let sha256 = digest_entries(&entries);
        let file = CacheFile { version: VERSION, sha256, entries };
        let text = serde_json::to_string(&file).expect("cache serializes");
        let path = dir.join(FILE_NAME);
        std::fs::write(&path, text)?;
        Ok(file.entries.len())
    }
}
