//! CSV and JSON output. Every numeric column comes twice: a decimal with 12
//! significant digits for plotting and the exact canonical string.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use mql_core::numerics::{parse_rational, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::bounds::BoundsRecord;
use crate::experiment::ExperimentResult;

/// `x` in scientific notation with 12 significant digits, rounded half away
/// from zero, computed exactly (no underflow for tiny rationals).
pub fn sci12(x: &Rational) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let ten = BigInt::from(10);
    let n = x.numer().abs();
    let d = x.denom().clone();
    let lo = num_traits::pow(ten.clone(), 11);
    let hi = num_traits::pow(ten.clone(), 12);
    // Scaled value n * 10^(11 - e) / d should land in [10^11, 10^12).
    let mut e = ((n.bits() as f64 - d.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let scaled = |e: i64| -> (BigInt, BigInt) {
        let shift = 11 - e;
        if shift >= 0 {
            (&n * num_traits::pow(ten.clone(), shift as usize), d.clone())
        } else {
            (
                n.clone(),
                &d * num_traits::pow(ten.clone(), (-shift) as usize),
            )
        }
    };
    loop {
        let (a, b) = scaled(e);
        if a < &lo * &b {
            e -= 1;
        } else if a >= &hi * &b {
            e += 1;
        } else {
            break;
        }
    }
    let (a, b) = scaled(e);
    let mut q: BigInt = (2 * a + &b) / (2 * &b);
    if q >= hi {
        q /= 10;
        e += 1;
    }
    let digits = q.to_string();
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{}.{}e{e}", &digits[..1], &digits[1..])
}

/// [`sci12`] of a canonical string in either mode.
pub fn decimal(canonical: &str) -> String {
    match parse_rational(canonical) {
        Ok(x) => sci12(&x),
        Err(_) => canonical.to_string(),
    }
}

fn sci12_f64(x: f64) -> String {
    match Rational::from_float(x) {
        Some(r) => sci12(&r),
        None => x.to_string(),
    }
}

#[derive(Serialize)]
struct RunRow<'a> {
    repetition: usize,
    seed: u64,
    oracle: &'a str,
    learner: &'a str,
    k: usize,
    mode: &'a str,
    horizon: usize,
    queries_used: usize,
    gap: String,
    gap_exact: &'a str,
    witness_kind: &'a str,
    certificate: String,
    certificate_exact: &'a str,
    certificate_holds: &'a str,
}

#[derive(Serialize)]
struct TrajectoryRow<'a> {
    repetition: usize,
    learner: &'a str,
    t: usize,
    gap: String,
    gap_exact: &'a str,
}

#[derive(Serialize)]
struct TraceCsvRow<'a> {
    repetition: usize,
    t: usize,
    moved: bool,
    u_norm_sq: String,
    step_parameter: String,
    dist_sq: String,
    decay: String,
    drift: String,
    u_norm_sq_exact: &'a str,
    step_parameter_exact: &'a str,
    dist_sq_exact: &'a str,
    decay_exact: &'a str,
    drift_exact: &'a str,
}

#[derive(Serialize)]
struct BoundsRow {
    k: usize,
    eps: String,
    regime: &'static str,
    upper_t: String,
    lower_t: String,
    exact_lower_t: usize,
    horizon: usize,
    lower_eps: String,
    lower_eps_log2: String,
    lower_eps_exact: String,
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `runs.csv`, `trajectories.csv`, `adversary_trace.csv` (adversary
/// oracles only), `summary.json` and `transcripts/rep_NNN.jsonl` into `dir`.
pub fn emit_results(dir: &Path, result: &ExperimentResult) -> anyhow::Result<()> {
    if result.runs.is_empty() {
        bail!("no results to emit");
    }
    fs::create_dir_all(dir.join("transcripts"))
        .with_context(|| format!("creating {}", dir.display()))?;
    write_csv(
        &dir.join("runs.csv"),
        result.runs.iter().map(|r| RunRow {
            repetition: r.repetition,
            seed: r.seed,
            oracle: &r.oracle,
            learner: &r.learner,
            k: r.k,
            mode: &r.mode,
            horizon: r.horizon,
            queries_used: r.queries_used,
            gap: decimal(&r.gap),
            gap_exact: &r.gap,
            witness_kind: r.witness_kind.as_deref().unwrap_or(""),
            certificate: r.certificate.as_deref().map(decimal).unwrap_or_default(),
            certificate_exact: r.certificate.as_deref().unwrap_or(""),
            certificate_holds: match r.certificate_holds {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            },
        }),
    )?;
    emit_curves(&dir.join("trajectories.csv"), result)?;
    if result.runs.iter().any(|r| !r.adversary_trace.is_empty()) {
        write_csv(
            &dir.join("adversary_trace.csv"),
            result.runs.iter().flat_map(|r| {
                r.adversary_trace.iter().map(move |t| TraceCsvRow {
                    repetition: r.repetition,
                    t: t.t,
                    moved: t.moved,
                    u_norm_sq: decimal(&t.u_norm_sq),
                    step_parameter: decimal(&t.step_parameter),
                    dist_sq: decimal(&t.dist_sq),
                    decay: decimal(&t.decay),
                    drift: decimal(&t.drift),
                    u_norm_sq_exact: &t.u_norm_sq,
                    step_parameter_exact: &t.step_parameter,
                    dist_sq_exact: &t.dist_sq,
                    decay_exact: &t.decay,
                    drift_exact: &t.drift,
                })
            }),
        )?;
    }
    for r in &result.runs {
        let path = dir
            .join("transcripts")
            .join(format!("rep_{:03}.jsonl", r.repetition));
        fs::write(&path, &r.transcript).with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = serde_json::to_string_pretty(&result.summary)? + "\n";
    fs::write(dir.join("summary.json"), summary)?;
    Ok(())
}

/// Measured `(t, gap of averaged plays)` trajectories, one row per round.
pub fn emit_curves(path: &Path, result: &ExperimentResult) -> anyhow::Result<()> {
    if result.runs.is_empty() {
        bail!("no results to emit");
    }
    write_csv(
        path,
        result.runs.iter().flat_map(|r| {
            r.trajectory.iter().map(move |p| TrajectoryRow {
                repetition: r.repetition,
                learner: &r.learner,
                t: p.t,
                gap: decimal(&p.gap),
                gap_exact: &p.gap,
            })
        }),
    )
}

/// Bound curves `(ε, upper_T, lower_T, ...)`.
pub fn emit_bounds<W: std::io::Write>(out: W, records: &[BoundsRecord]) -> anyhow::Result<()> {
    if records.is_empty() {
        bail!("no bounds to emit");
    }
    let mut w = csv::Writer::from_writer(out);
    for b in records {
        w.serialize(BoundsRow {
            k: b.k,
            eps: sci12_f64(b.eps),
            regime: b.regime.as_str(),
            upper_t: sci12_f64(b.upper_t),
            lower_t: sci12_f64(b.lower_t),
            exact_lower_t: b.exact_lower_t,
            horizon: b.horizon,
            lower_eps: sci12_f64(b.lower_eps),
            lower_eps_log2: sci12_f64(b.lower_eps_log2),
            lower_eps_exact: b
                .lower_eps_exact
                .as_ref()
                .map(mql_core::Scalar::to_canonical)
                .unwrap_or_default(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use mql_core::Scalar;

    #[test]
    fn sci12_examples() {
        assert_eq!(sci12(&Rational::ratio(1, 3)), "3.33333333333e-1");
        assert_eq!(sci12(&Rational::ratio(-2, 3)), "-6.66666666667e-1");
        assert_eq!(sci12(&Rational::from_int(1000)), "1.00000000000e3");
        assert_eq!(
            sci12(&Rational::ratio(9_999_999_999_999, 10)),
            "1.00000000000e12"
        );
        let tiny = Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(2), 1100));
        assert!(sci12(&tiny).ends_with("e-332"));
        assert_eq!(decimal("0.5"), "5.00000000000e-1");
        assert_eq!(decimal("0/1"), "0");
    }
}
