//! Closed-form query-complexity bounds.
//!
//! Everything here is a formula evaluation; nothing is fitted. The constant
//! of the upper bound is not pinned down by the theory and is exposed as a
//! parameter (default [`DEFAULT_C`]) for plotting only.

use mql_core::numerics::{powi, Rational, Scalar};
use mql_core::{Error, Result};
use num_traits::{One, Zero};
use serde::Serialize;

/// Chart constant for the upper bound `c ln K / ε`.
pub const DEFAULT_C: f64 = 8.0;

/// Which regime of the query-complexity picture `ε` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `ε <= 1/(e 2^11 K^4)`: the adaptive lower bound applies.
    LowerBound,
    /// Between the lower-bound guard and `1/2`.
    Intermediate,
    /// `1/2 <= ε < 1 - 1/K`: two queries suffice.
    TwoQuery,
    /// `ε >= 1 - 1/K`: uniform play, no queries.
    ZeroQuery,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::LowerBound => "lower_bound",
            Regime::Intermediate => "intermediate",
            Regime::TwoQuery => "two_query",
            Regime::ZeroQuery => "zero_query",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRecord {
    pub k: usize,
    pub eps: f64,
    pub regime: Regime,
    pub upper_t: f64,
    pub lower_t: f64,
    pub exact_lower_t: usize,
    /// Horizon at which `lower_eps` is evaluated: `max(1, floor(lower_t))`.
    pub horizon: usize,
    pub lower_eps: f64,
    pub lower_eps_log2: f64,
    /// Exact value when `2K` is a perfect square.
    #[serde(skip)]
    pub lower_eps_exact: Option<Rational>,
}

/// `1 / (e 2^11 K^4)`.
pub fn lower_bound_guard(k: usize) -> f64 {
    lower_bound_scale(k) / std::f64::consts::E
}

fn lower_bound_scale(k: usize) -> f64 {
    1.0 / (2f64.powi(11) * (k as f64).powi(4))
}

/// `log2` of `(1/(2^10 K^4)) (1/(2^{11/2} K^{5/2} T))^{T+1}`.
pub fn lower_eps_log2(k: usize, horizon: usize) -> f64 {
    let lk = (k as f64).log2();
    let lt = (horizon as f64).log2();
    -(10.0 + 4.0 * lk) - (horizon as f64 + 1.0) * (5.5 + 2.5 * lk + lt)
}

/// Gap level below which `T` queries cannot certify an approximate
/// equilibrium on every game. Underflows to zero for large `K, T`; use
/// [`lower_eps_log2`] there.
pub fn lower_eps(k: usize, horizon: usize) -> f64 {
    lower_eps_log2(k, horizon).exp2()
}

/// Exact value of [`lower_eps`] when `2K` is a perfect square.
pub fn lower_eps_exact(k: usize, horizon: usize) -> Option<Rational> {
    let s = (2 * k) as f64;
    let root = s.sqrt().round() as i64;
    if (root * root) as usize != 2 * k {
        return None;
    }
    let kk = Rational::from_int(k as i64);
    let prefactor = Rational::one() / (Rational::from_int(1 << 10) * powi(&kk, 4));
    // 2^{11/2} K^{5/2} = 2^5 K^2 sqrt(2K)
    let denom =
        Rational::from_int(32 * root) * kk.clone() * kk * Rational::from_int(horizon as i64);
    let factor = Rational::one() / denom;
    Some(prefactor * powi(&factor, horizon as i32 + 1))
}

/// `ln(a/ε) / ln(b ln(a/ε))`, defined for `a, b, ε > 0` and `ε <= a/e`.
pub fn invert_query_bound(a: f64, b: f64, eps: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && eps > 0.0) {
        return Err(Error::InvalidArgument("a, b and ε must be positive".into()));
    }
    if eps > a / std::f64::consts::E {
        return Err(Error::InvalidArgument(format!(
            "ε = {eps} exceeds a/e = {}",
            a / std::f64::consts::E
        )));
    }
    let l = (a / eps).ln();
    Ok(l / (b * l).ln())
}

/// `ε`, upper and lower query counts at `K`.
pub fn theoretical_bounds(k: usize, eps: f64, c: f64) -> Result<BoundsRecord> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "K must be at least 2, got {k}"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::NegativeEpsilon);
    }
    let kf = k as f64;
    let guard = lower_bound_guard(k);
    let regime = if eps >= 1.0 - 1.0 / kf {
        Regime::ZeroQuery
    } else if eps >= 0.5 {
        Regime::TwoQuery
    } else if eps <= guard {
        Regime::LowerBound
    } else {
        Regime::Intermediate
    };
    let upper_t = match regime {
        Regime::ZeroQuery => 0.0,
        Regime::TwoQuery => 2.0,
        _ => (c * kf.ln() / eps).min(kf),
    };
    let lower_t = if regime == Regime::LowerBound {
        let a = lower_bound_scale(k);
        let b = 2f64.powf(5.5) * kf.powf(2.5);
        (invert_query_bound(a, b, eps)? - 1.0).clamp(0.0, kf / 2.0 - 1.0)
    } else {
        0.0
    };
    let horizon = (lower_t.floor() as usize).max(1);
    Ok(BoundsRecord {
        k,
        eps,
        regime,
        upper_t,
        lower_t,
        exact_lower_t: exact_lower_t(k),
        horizon,
        lower_eps: lower_eps(k, horizon),
        lower_eps_log2: lower_eps_log2(k, horizon),
        lower_eps_exact: lower_eps_exact(k, horizon),
    })
}

/// Queries needed to find an exact equilibrium on every game: `⌈K/2 - 1⌉`.
pub fn exact_lower_t(k: usize) -> usize {
    k.div_ceil(2).saturating_sub(1)
}

/// `ε = 2^{-1}, ..., 2^{-n}`.
pub fn dyadic_grid(n: usize) -> Vec<f64> {
    (1..=n as i32).map(|j| 2f64.powi(-j)).collect()
}

/// One record per `ε`.
pub fn sweep(k: usize, eps: &[f64], c: f64) -> Result<Vec<BoundsRecord>> {
    eps.iter().map(|&e| theoretical_bounds(k, e, c)).collect()
}

/// Whether the Lambert-W step behind [`invert_query_bound`] is valid at
/// `(a, b, ε)`: it needs `b ln(a/ε) >= e`.
pub fn lambert_step_valid(a: f64, b: f64, eps: f64) -> bool {
    b * (a / eps).ln() >= std::f64::consts::E
}

/// Checks `x >= invert_query_bound(a, b, ε)` at `ε = a (1/(bx))^x` over
/// `a, b ∈ {1, 2, 4}`, `x ∈ 1..=10`, skipping points with `ε > a/e`.
/// Returns the violating `(a, b, x, bound)` tuples.
pub fn invert_query_grid_violations() -> Vec<(f64, f64, u32, f64)> {
    let mut bad = Vec::new();
    for a in [1.0, 2.0, 4.0] {
        for b in [1.0, 2.0, 4.0] {
            for x in 1..=10u32 {
                let xf = x as f64;
                let eps = a * (1.0 / (b * xf)).powi(x as i32);
                if eps > a / std::f64::consts::E {
                    continue;
                }
                let bound = invert_query_bound(a, b, eps).expect("guard checked");
                if !(bound <= xf * (1.0 + 1e-12)) {
                    bad.push((a, b, x, bound));
                }
            }
        }
    }
    bad
}

/// Whether `r` equals `2^e` for some integer `e`, and which.
pub fn power_of_two_exponent(r: &Rational) -> Option<i64> {
    if *r <= Rational::zero() {
        return None;
    }
    let (n, d) = (r.numer().magnitude(), r.denom().magnitude());
    if n.count_ones() == 1 && d.count_ones() == 1 {
        Some(n.bits() as i64 - d.bits() as i64)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_eps_eight_two() {
        let exact = lower_eps_exact(8, 2).unwrap();
        assert_eq!(power_of_two_exponent(&exact), Some(-64));
        assert_eq!(lower_eps_log2(8, 2), -64.0);
        assert!(lower_eps_exact(5, 2).is_none());
    }

    #[test]
    fn upper_examples() {
        let b = theoretical_bounds(16, 0.1, DEFAULT_C).unwrap();
        assert_eq!(b.upper_t, 16.0);
        let b = theoretical_bounds(16, 1.0 - 1.0 / 16.0, DEFAULT_C).unwrap();
        assert_eq!((b.upper_t, b.lower_t), (0.0, 0.0));
        let b = theoretical_bounds(16, 0.5, DEFAULT_C).unwrap();
        assert_eq!(b.upper_t, 2.0);
        assert!(theoretical_bounds(16, 0.0, DEFAULT_C).is_err());
        assert_eq!(exact_lower_t(16), 7);
        assert_eq!(exact_lower_t(5), 2);
    }

    #[test]
    fn invert_examples() {
        let e = std::f64::consts::E;
        let v = invert_query_bound(1.0, 1.0, (-e).exp()).unwrap();
        assert!((v - e).abs() < 1e-12);
        let v = invert_query_bound(2.0, 3.0, 2.0 / e).unwrap();
        assert!((v - 1.0 / 3f64.ln()).abs() < 1e-12);
        assert!(invert_query_bound(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn grid_holds_where_lambert_step_is_valid() {
        for a in [1.0, 2.0, 4.0] {
            for b in [1.0, 2.0, 4.0] {
                for x in 1..=10 {
                    let eps = a * (1.0 / (b * x as f64)).powi(x);
                    if eps <= a / std::f64::consts::E && lambert_step_valid(a, b, eps) {
                        assert!(invert_query_bound(a, b, eps).unwrap() <= x as f64);
                    }
                }
            }
        }
    }

    #[test]
    fn sweep_upper_monotone_until_cap() {
        let rows = sweep(32, &dyadic_grid(20), DEFAULT_C).unwrap();
        assert_eq!(rows.len(), 20);
        for w in rows.windows(2) {
            assert!(w[1].upper_t >= w[0].upper_t);
        }
    }
}
