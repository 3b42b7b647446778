//! Effective densities for the exponential regime.
//!
//! When `phi` is too large for the object budget, the constructions are built
//! for a smaller density `phi'` that makes the budget inequality tight:
//!
//! * bi-criteria: `phi' = ((2 phi' - 1)/(phi' - 1))^((n - 1)/3)`, `phi' > 1`
//! * multi-criteria: `phi' - d = (4 d^2 / n) (2 phi'/(phi' - d))^(n/(2 d))`, `phi' > d`
//!
//! Both gap functions are increasing on `(lower, inf)`, so the root is found
//! by bisection. The sign test runs on a log-space form of the gap, which
//! cannot overflow; the reported residual is the linear one.

use crate::error::{Error, Result};

/// Offset of the bracket's lower end above the domain bound.
pub const BRACKET_OFFSET: f64 = 1.0 / (1u64 << 20) as f64;
pub const MAX_ITERATIONS: u32 = 200;
/// Residual tolerance, relative to `max(1, phi')`.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint {
    pub value: f64,
    /// Signed linear residual of the defining equation at `value`.
    pub residual: f64,
    pub iterations: u32,
}

struct Equation {
    /// Domain bound; the root lies strictly above it.
    lower: f64,
    /// Increasing, same sign as the linear gap.
    log_gap: Box<dyn Fn(f64) -> f64>,
    residual: Box<dyn Fn(f64) -> f64>,
}

fn bi_equation(n: u64) -> Equation {
    let e = (n as f64 - 1.0) / 3.0;
    let base = |x: f64| (2.0 * x - 1.0) / (x - 1.0);
    Equation {
        lower: 1.0,
        log_gap: Box::new(move |x| x.ln() - e * base(x).ln()),
        residual: Box::new(move |x| x - base(x).powf(e)),
    }
}

fn multi_equation(n: u64, d: u64) -> Equation {
    let (nf, df) = (n as f64, d as f64);
    let e = nf / (2.0 * df);
    let coef = 4.0 * df * df / nf;
    let base = move |x: f64| 2.0 * x / (x - df);
    Equation {
        lower: df,
        log_gap: Box::new(move |x| (x - df).ln() - coef.ln() - e * base(x).ln()),
        residual: Box::new(move |x| (x - df) - coef * base(x).powf(e)),
    }
}

pub fn solve_phi_prime_bi(n: u64) -> Result<FixedPoint> {
    if n < 4 {
        return Err(Error::Precondition(format!("phi' (bi-criteria) needs n >= 4, got {n}")));
    }
    solve(&bi_equation(n), None)
}

pub fn solve_phi_prime_multi(n: u64, d: u64) -> Result<FixedPoint> {
    check_multi(n, d)?;
    solve(&multi_equation(n, d), None)
}

/// Bi-criteria root with the bracket's upper end at `upper` (the input phi).
pub(crate) fn solve_phi_prime_bi_below(n: u64, upper: f64) -> Result<FixedPoint> {
    solve(&bi_equation(n), Some(upper))
}

pub(crate) fn solve_phi_prime_multi_below(n: u64, d: u64, upper: f64) -> Result<FixedPoint> {
    check_multi(n, d)?;
    solve(&multi_equation(n, d), Some(upper))
}

fn check_multi(n: u64, d: u64) -> Result<()> {
    if d < 2 || n < 16 * d {
        return Err(Error::Precondition(format!(
            "phi' (multi-criteria) needs d >= 2 and n >= 16d, got n = {n}, d = {d}"
        )));
    }
    Ok(())
}

fn solve(eq: &Equation, upper: Option<f64>) -> Result<FixedPoint> {
    let mut lo = eq.lower + BRACKET_OFFSET;
    if (eq.log_gap)(lo) >= 0.0 {
        return Err(Error::Solver(format!("gap is not negative at bracket start {lo}")));
    }
    let mut hi = match upper {
        Some(u) => u,
        None => {
            let mut hi = eq.lower + 1.0;
            while (eq.log_gap)(hi) < 0.0 {
                hi = eq.lower + 2.0 * (hi - eq.lower);
                if !hi.is_finite() {
                    return Err(Error::Solver("no sign change below f64::MAX".into()));
                }
            }
            hi
        }
    };
    if !(hi > lo) || (eq.log_gap)(hi) < 0.0 {
        return Err(Error::Solver(format!("no sign change on [{lo}, {hi}]")));
    }
    check_monotone(eq, lo, hi)?;

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (a, b) = (lo - eq.lower, hi - eq.lower);
        // geometric steps while the bracket spans more than a factor of two
        let mid = if b > 2.0 * a {
            eq.lower + (a * b).sqrt()
        } else {
            lo + 0.5 * (hi - lo)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if (eq.log_gap)(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let (r_lo, r_hi) = ((eq.residual)(lo), (eq.residual)(hi));
    let (value, residual) = if r_lo.abs() <= r_hi.abs() { (lo, r_lo) } else { (hi, r_hi) };
    if !(residual.abs() < RESIDUAL_TOL * value.max(1.0)) {
        return Err(Error::Solver(format!(
            "residual {residual:e} at {value} after {iterations} iterations"
        )));
    }
    Ok(FixedPoint {
        value,
        residual,
        iterations,
    })
}

/// Samples the gap on a log-spaced grid over the bracket and fails if it is
/// ever decreasing.
fn check_monotone(eq: &Equation, lo: f64, hi: f64) -> Result<()> {
    const SAMPLES: usize = 64;
    let (a, b) = ((lo - eq.lower).ln(), (hi - eq.lower).ln());
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=SAMPLES {
        let t = a + (b - a) * i as f64 / SAMPLES as f64;
        let x = (eq.lower + t.exp()).clamp(lo, hi);
        let g = (eq.log_gap)(x);
        if g < prev {
            return Err(Error::Solver(format!("gap decreases near {x}")));
        }
        prev = g;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bi_n4_is_golden_square() {
        let fp = solve_phi_prime_bi(4).unwrap();
        let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((fp.value - golden_sq).abs() < 1e-9, "{fp:?}");
        assert!(fp.residual.abs() < 1e-9);
    }

    #[test]
    fn bi_residuals() {
        for n in [4, 10, 40] {
            let fp = solve_phi_prime_bi(n).unwrap();
            assert!(fp.residual.abs() < 1e-9, "n = {n}: {fp:?}");
            assert!(fp.iterations <= MAX_ITERATIONS);
        }
    }

    #[test]
    fn bi_below_matches_unbounded() {
        let free = solve_phi_prime_bi(10).unwrap();
        let capped = solve_phi_prime_bi_below(10, 1e6).unwrap();
        assert!((free.value - capped.value).abs() < 1e-9 * free.value);
        assert!(solve_phi_prime_bi_below(10, 2.0).is_err());
    }

    #[test]
    fn multi_32_2() {
        let fp = solve_phi_prime_multi(32, 2).unwrap();
        assert!(fp.residual.abs() < 1e-9, "{fp:?}");
        assert!(fp.value > 2.0);
        assert!(fp.value >= 130.0, "{fp:?}");
    }

    #[test]
    fn multi_grid_above_d() {
        for d in 2..=4 {
            for n in [16 * d, 20 * d, 40 * d] {
                let fp = solve_phi_prime_multi(n, d).unwrap();
                assert!(fp.value > d as f64);
                assert!(fp.residual.abs() < RESIDUAL_TOL * fp.value.max(1.0));
            }
        }
    }

    #[test]
    fn preconditions() {
        assert!(solve_phi_prime_bi(3).is_err());
        assert!(solve_phi_prime_multi(31, 2).is_err());
        assert!(solve_phi_prime_multi(64, 1).is_err());
    }
}
