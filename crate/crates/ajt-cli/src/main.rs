//! `ajt` — exact computation and verification for cables of torus knots.
//!
//! Four subcommands, exact arithmetic throughout:
//!
//! * `jones <knot> <n>` — the colored Jones polynomial `J_K(n)` in
//!   canonical Laurent form plus its classical value `ε(J_K(n))`;
//! * `apoly <p> <q> <r> <s>` — the cable's A-polynomial in factored and
//!   expanded form, with the constructive case tag, the admissibility
//!   flag, and the σ-symmetry exponents;
//! * `fit` — decide membership of an operator-transformed sequence in
//!   the exponential-polynomial module and print the certified
//!   [`FitReport`](ajt::expfit::FitReport) as JSON;
//! * `verify` — run the full strong AJ verification pipeline and emit a
//!   [`StructuredReport`](ajt::conjecture::StructuredReport) as text or
//!   JSON.
//!
//! Exit codes are a stable contract for scripting: `0` verified/member,
//! `1` mathematical failure (a stage or fit refuted), `2` invalid or
//! inadmissible input, `3` resource bound exceeded.
//!
//! Knot notation: `U`, `T(p,q)`, `C(p,q;r,s)`. Operators use the quantum
//! torus mini-language (`L^2 - t^-24 M^-12`); sequence expressions are
//! sums of monomial terms `c t^{a n + b}` (e.g. `t^{2n} + t^{-2n}`).
//!
//! When `AJT_CACHE_DIR` is set, the colored-Jones memo is loaded from
//! that directory before the command runs and persisted after it
//! completes; a corrupt cache is detected by checksum and treated as
//! cold.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use ajt::conjecture::{
    a_polynomial_cable, a_polynomial_factors, strong_aj_verify, symmetry_exponents, CableParams,
    ConjectureError, RunConfig, StructuredReport, VerifyMode,
};
use ajt::expfit::{fit_adaptive, FitStatus};
use ajt::jones::{jones_sequence, CableKnot};
use ajt::qtorus::{ColorSequence, PlaneCurvePoly, TorusElement};
use ajt::ring::{parse_rational, LaurentScalar};

const EXIT_OK: u8 = 0;
const EXIT_MATH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ajt",
    version,
    about = "Exact colored Jones polynomials, cable A-polynomials, and strong AJ verification for cables of torus knots"
)]
struct Cli {
    /// Worker threads for specialized verification sweeps.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    parallelism: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the colored Jones polynomial J_K(n) and its classical value.
    Jones {
        /// Knot notation: U, T(p,q), or C(p,q;r,s).
        knot: String,
        /// Color (any integer; J_K(0) = 0 and J_K(-n) = -J_K(n)).
        n: i64,
    },
    /// Print the cable A-polynomial with case tag and admissibility flag.
    Apoly {
        /// Torus parameter p (p > q).
        p: i64,
        /// Torus parameter q (q >= 2, coprime to p).
        q: i64,
        /// Cabling slope numerator r.
        r: i64,
        /// Cabling slope denominator s (s >= 2, coprime to r).
        s: i64,
    },
    /// Fit an operator-transformed sequence as an exponential polynomial.
    Fit(FitArgs),
    /// Run the strong AJ verification pipeline for a cable of a torus knot.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Operator to apply before fitting, in quantum-torus text form.
    #[arg(long, default_value = "1")]
    op: String,
    /// Knot whose colored Jones sequence is fitted.
    #[arg(long, conflicts_with = "seq_expr", required_unless_present = "seq_expr")]
    seq: Option<String>,
    /// Explicit sequence: a sum of terms `c t^{a n + b}`.
    #[arg(long)]
    seq_expr: Option<String>,
    /// Maximum frequency bound for the adaptive ladder.
    #[arg(long = "K", default_value_t = 256)]
    k_max: u32,
    /// Initial frequency bound for the adaptive ladder.
    #[arg(long, default_value_t = 8)]
    k0: u32,
    /// First color of the fit window.
    #[arg(long, default_value_t = 1)]
    window_start: i64,
    /// Extra validation points beyond the solved window.
    #[arg(long, default_value_t = 5)]
    extra: u32,
}

#[derive(Args)]
struct VerifyArgs {
    /// Torus parameter p (p > q).
    #[arg(long)]
    p: i64,
    /// Torus parameter q (q >= 2, coprime to p).
    #[arg(long)]
    q: i64,
    /// Cabling slope numerator r (admissible iff r < 0 or r > pqs).
    #[arg(long)]
    r: i64,
    /// Cabling slope denominator s (s >= 2, coprime to r).
    #[arg(long)]
    s: i64,
    /// Color range for the annihilation check, e.g. `1..8` (inclusive).
    #[arg(long)]
    n: Option<String>,
    /// Annihilation mode: auto, symbolic, or specialized.
    #[arg(long, default_value = "auto")]
    mode: String,
    /// Specialization points for specialized mode, comma-separated
    /// rationals.
    #[arg(long, default_value = "2,3/2,5/3")]
    t0: String,
    /// Initial frequency bound of the membership fit ladder.
    #[arg(long, default_value_t = 8)]
    k0: u32,
    /// Maximum frequency bound of the membership fit ladder.
    #[arg(long, default_value_t = 256)]
    k_max: u32,
    /// Extra validation points beyond each fitted window.
    #[arg(long, default_value_t = 5)]
    extra: u32,
    /// Emit the structured report as JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // Restore the default SIGPIPE disposition so piping into a pager or
    // `head` terminates the process quietly instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if cli.parallelism > 1 {
        // Best-effort: the pool can only be configured once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(usize::from(cli.parallelism))
            .build_global();
    }
    let cache_dir = std::env::var_os("AJT_CACHE_DIR").map(PathBuf::from);
    if let Some(dir) = &cache_dir {
        ajt::jones::cache::load_from_dir(dir);
    }
    let code = match cli.command {
        Command::Jones { knot, n } => cmd_jones(&knot, n),
        Command::Apoly { p, q, r, s } => cmd_apoly(p, q, r, s),
        Command::Fit(args) => cmd_fit(&args),
        Command::Verify(args) => cmd_verify(&args, usize::from(cli.parallelism)),
    };
    if let Some(dir) = &cache_dir {
        if let Err(e) = ajt::jones::cache::save_to_dir(dir) {
            eprintln!("warning: failed to persist cache to {}: {e}", dir.display());
        }
    }
    ExitCode::from(code)
}

fn cmd_jones(knot_text: &str, n: i64) -> u8 {
    let knot = match CableKnot::from_str(knot_text) {
        Ok(k) => k,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match jones_sequence(&knot).value(n) {
        Ok(v) => {
            println!("J_{knot}({n}) = {v}");
            println!("ε = {}", v.epsilon());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_MATH
        }
    }
}

/// Renders a short A-polynomial factor compactly, L-part leading:
/// `(L-1)`, `(L+M^-26)`, `(L^2-M^-114)`.
fn render_factor(f: &PlaneCurvePoly) -> String {
    use num_traits::Signed;
    let mut terms: Vec<((i64, i64), num_bigint::BigInt)> =
        f.iter().map(|(key, c)| (key, c.clone())).collect();
    terms.sort_by_key(|&((a, b), _)| (std::cmp::Reverse(b), std::cmp::Reverse(a)));
    let mut out = String::from("(");
    for (i, ((a, b), c)) in terms.iter().enumerate() {
        if i == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push(if c.is_negative() { '-' } else { '+' });
        }
        let mag = c.abs().to_string();
        let mut body = String::new();
        if *b != 0 {
            body.push('L');
            if *b != 1 {
                body.push_str(&format!("^{b}"));
            }
        }
        if *a != 0 {
            if !body.is_empty() {
                body.push(' ');
            }
            body.push('M');
            if *a != 1 {
                body.push_str(&format!("^{a}"));
            }
        }
        if body.is_empty() {
            out.push_str(&mag);
        } else {
            if mag != "1" {
                out.push_str(&mag);
                out.push(' ');
            }
            out.push_str(&body);
        }
    }
    out.push(')');
    out
}

fn cmd_apoly(p: i64, q: i64, r: i64, s: i64) -> u8 {
    let params = match CableParams::new(p, q, r, s) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let admissible = if params.is_admissible() {
        "admissible".to_string()
    } else {
        format!("inadmissible: r in [0, pqs] = [0, {}]", p * q * s)
    };
    println!("{params}  case {}  {admissible}", params.case());
    let factors = a_polynomial_factors(&params);
    let rendered: Vec<String> = factors.iter().map(render_factor).collect();
    println!("factors: {}", rendered.concat());
    let a_c = a_polynomial_cable(&params);
    println!("expanded: {a_c}");
    match symmetry_exponents(&a_c) {
        Ok((eta, a, b)) => {
            println!("symmetry: σ(A) = {eta:+} M^{a} L^{b} A");
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MATH;
        }
    }
    EXIT_OK
}

/// Parses a sequence expression: a sum of monomial terms
/// `c t^{a n + b}` with integer `c`, `a`, `b` (each part optional, so
/// `5`, `t^{2n}`, `-3t^{-n+4}`, and `t^{3}` all work).
fn parse_seq_expr(text: &str) -> Result<Vec<(i64, i64, i64)>, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty sequence expression".into());
    }
    // Split into signed terms at top level: +/- splits except inside a
    // braced exponent or directly after '^' (an exponent sign).
    let bytes = compact.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0usize;
    let mut depth = 0i32;
    for (i, &byte) in bytes.iter().enumerate() {
        match byte as char {
            '{' => depth += 1,
            '}' => depth -= 1,
            '+' | '-' if i > 0 && depth == 0 && bytes[i - 1] as char != '^' => {
                terms.push(&compact[start..i]);
                start = i;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced braces in {text:?}"));
    }
    terms.push(&compact[start..]);

    let mut parsed = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, term.strip_prefix('+').unwrap_or(term)),
        };
        if body.is_empty() {
            return Err(format!("dangling sign in {text:?}"));
        }
        let (coeff_text, exp_text) = match body.find('t') {
            Some(pos) => (&body[..pos], &body[pos + 1..]),
            None => (body, ""),
        };
        let mut coeff: i64 = if coeff_text.is_empty() {
            1
        } else {
            let trimmed = coeff_text.strip_suffix('*').unwrap_or(coeff_text);
            trimmed
                .parse()
                .map_err(|_| format!("bad coefficient {coeff_text:?} in term {term:?}"))?
        };
        coeff *= sign;
        let (mut a, mut b) = (0i64, 0i64);
        if !exp_text.is_empty() {
            let exp = exp_text
                .strip_prefix('^')
                .ok_or_else(|| format!("expected ^ after t in term {term:?}"))?;
            let exp = exp
                .strip_prefix('{')
                .and_then(|e| e.strip_suffix('}'))
                .unwrap_or(exp);
            // Linear form: [c]n[±d] or just d.
            match exp.find('n') {
                Some(pos) => {
                    let a_text = &exp[..pos];
                    a = match a_text {
                        "" | "+" => 1,
                        "-" => -1,
                        other => other
                            .parse()
                            .map_err(|_| format!("bad n-coefficient {other:?} in term {term:?}"))?,
                    };
                    let rest = &exp[pos + 1..];
                    if !rest.is_empty() {
                        b = rest
                            .parse()
                            .map_err(|_| format!("bad exponent offset {rest:?} in term {term:?}"))?;
                    }
                }
                None => {
                    b = exp
                        .parse()
                        .map_err(|_| format!("bad exponent {exp:?} in term {term:?}"))?;
                }
            }
        } else if body.contains('t') {
            // `t` with no exponent means t^1.
            b = 1;
        }
        parsed.push((coeff, a, b));
    }
    Ok(parsed)
}

fn cmd_fit(args: &FitArgs) -> u8 {
    let op = match args.op.parse::<TorusElement>() {
        Ok(op) => op,
        Err(e) => {
            eprintln!("error: bad --op: {e}");
            return EXIT_INPUT;
        }
    };
    let base = if let Some(expr) = &args.seq_expr {
        let terms = match parse_seq_expr(expr) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: bad --seq-expr: {e}");
                return EXIT_INPUT;
            }
        };
        ColorSequence::new(false, move |n| {
            let mut acc = LaurentScalar::zero();
            for &(c, a, b) in &terms {
                acc = acc.add(&LaurentScalar::from_i64_terms(&[(a * n + b, c)]));
            }
            Ok(acc)
        })
    } else {
        let knot_text = args.seq.as_deref().expect("clap enforces seq xor seq_expr");
        match CableKnot::from_str(knot_text) {
            Ok(k) => jones_sequence(&k),
            Err(e) => {
                eprintln!("error: bad --seq: {e}");
                return EXIT_INPUT;
            }
        }
    };
    if args.k_max == 0 {
        eprintln!("error: --K must be at least 1");
        return EXIT_INPUT;
    }
    let seq = op.then_sequence(&base);
    let report = match fit_adaptive(
        &seq,
        args.window_start,
        args.k0.min(args.k_max).max(1),
        args.k_max,
        args.extra,
    ) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("fit reports serialize")
    );
    match report.status {
        FitStatus::Member => EXIT_OK,
        FitStatus::NotMember => EXIT_MATH,
        FitStatus::Inconclusive => EXIT_RESOURCE,
    }
}

/// Parses an inclusive color range `lo..hi` (or `lo..=hi`).
fn parse_n_range(text: &str) -> Result<(i64, i64), String> {
    let (lo_text, hi_text) = text
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got {text:?}"))?;
    let hi_text = hi_text.strip_prefix('=').unwrap_or(hi_text);
    let lo: i64 = lo_text
        .trim()
        .parse()
        .map_err(|_| format!("bad range start {lo_text:?}"))?;
    let hi: i64 = hi_text
        .trim()
        .parse()
        .map_err(|_| format!("bad range end {hi_text:?}"))?;
    if lo > hi {
        return Err(format!("empty range: {lo} > {hi}"));
    }
    Ok((lo, hi))
}

fn render_text_report(report: &StructuredReport) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let admissible = if report.admissible {
        "admissible"
    } else {
        "inadmissible"
    };
    let _ = writeln!(out, "{}  case {}  {admissible}", report.params, report.case);
    for stage in &report.stages {
        let status = match stage.status {
            ajt::conjecture::StageStatus::Pass => "pass",
            ajt::conjecture::StageStatus::Fail => "FAIL",
            ajt::conjecture::StageStatus::Skipped => "skipped",
        };
        let _ = writeln!(
            out,
            "  {:<18} {:<8} {:>8} ms  {}",
            stage.name, status, stage.elapsed_ms, stage.details
        );
    }
    if let (Some(m), Some(k), Some(power)) = (report.m, report.k, report.power) {
        let _ = writeln!(out, "witness: m = {m}, k = {k}, power = {power}");
    }
    if let Some(mono) = &report.monomial {
        let _ = writeln!(
            out,
            "certificate: ε(SR) = {:+} · M^{} L^{} · A_C^{}",
            mono.eta,
            mono.a_exp,
            mono.b_exp,
            report.power.unwrap_or(0)
        );
    }
    if let Some(sym) = &report.symmetry {
        let _ = writeln!(
            out,
            "symmetry: σ(A_C) = {:+} · M^{} L^{} · A_C",
            sym.eta, sym.a, sym.b
        );
    }
    let _ = writeln!(out, "verified: {}", report.verified);
    out
}

fn cmd_verify(args: &VerifyArgs, parallelism: usize) -> u8 {
    let params = match CableParams::new(args.p, args.q, args.r, args.s) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let mode = match VerifyMode::from_str(&args.mode) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let n_range = match args.n.as_deref().map(parse_n_range).transpose() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: bad --n: {e}");
            return EXIT_INPUT;
        }
    };
    let mut t0_list = Vec::new();
    for part in args.t0.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match parse_rational(part) {
            Ok(v) => t0_list.push(v),
            Err(e) => {
                eprintln!("error: bad --t0 value {part:?}: {e}");
                return EXIT_INPUT;
            }
        }
    }
    for (i, a) in t0_list.iter().enumerate() {
        use num_traits::Zero as _;
        if a.is_zero() {
            eprintln!("error: --t0 values must be nonzero");
            return EXIT_INPUT;
        }
        if t0_list[..i].contains(a) {
            eprintln!("error: --t0 values must be pairwise distinct, {a} repeats");
            return EXIT_INPUT;
        }
    }
    if t0_list.is_empty() {
        eprintln!("error: --t0 must list at least one specialization point");
        return EXIT_INPUT;
    }
    if args.k0 == 0 || args.k_max < args.k0 {
        eprintln!(
            "error: fit bounds must satisfy 1 <= k0 <= k-max, got k0 = {}, k-max = {}",
            args.k0, args.k_max
        );
        return EXIT_INPUT;
    }
    let cfg = RunConfig {
        k0: args.k0,
        k_max: args.k_max,
        extra: args.extra,
        t0_list,
        mode,
        parallelism,
    };
    let report = match strong_aj_verify(&params, n_range, &cfg) {
        Ok(r) => r,
        Err(e @ (ConjectureError::InvalidParams(_) | ConjectureError::Inadmissible(_))) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MATH;
        }
    };
    let rendered = if args.json {
        let mut json =
            serde_json::to_string_pretty(&report).expect("structured reports serialize");
        json.push('\n');
        json
    } else {
        render_text_report(&report)
    };
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, &rendered) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
        eprintln!("report written to {}", path.display());
    } else {
        print!("{rendered}");
    }
    let code = report.exit_code();
    u8::try_from(code).unwrap_or(EXIT_MATH)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_expr_parses_monomial_sums() {
        assert_eq!(parse_seq_expr("t^{2n}+t^{-2n}").unwrap(), vec![(1, 2, 0), (1, -2, 0)]);
        assert_eq!(parse_seq_expr("5").unwrap(), vec![(5, 0, 0)]);
        assert_eq!(
            parse_seq_expr("-3t^{-n+4} + 2t^{3}").unwrap(),
            vec![(-3, -1, 4), (2, 0, 3)]
        );
        assert_eq!(parse_seq_expr("t^2n").unwrap(), vec![(1, 2, 0)]);
        assert_eq!(parse_seq_expr("7t").unwrap(), vec![(7, 0, 1)]);
        assert!(parse_seq_expr("").is_err());
        assert!(parse_seq_expr("t^").is_err());
        assert!(parse_seq_expr("q^{2n}").is_err());
    }

    #[test]
    fn n_range_parses_inclusive_forms() {
        assert_eq!(parse_n_range("1..8").unwrap(), (1, 8));
        assert_eq!(parse_n_range("1..=8").unwrap(), (1, 8));
        assert_eq!(parse_n_range("-2..2").unwrap(), (-2, 2));
        assert!(parse_n_range("3..1").is_err());
        assert!(parse_n_range("5").is_err());
    }
}
