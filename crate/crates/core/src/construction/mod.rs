//! Parameter planners and instance builders for the three lower-bound
//! families: the uniform baseline, the bi-criteria copy/split construction
//! and the multi-criteria construction over Hamming-weight choice sets.

mod build;
mod phi_prime;
mod sequences;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use build::{build, build_bicriteria, build_multicriteria, build_uniform_baseline, hamming_choices};
pub use phi_prime::{solve_phi_prime_bi, solve_phi_prime_multi, FixedPoint, RESIDUAL_TOL};
pub use sequences::{m_explicit_multi, m_sequence_bi, m_sequence_multi};

use crate::error::{Error, Result};
use crate::rational::{cmp_golden_square, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Baseline,
    Bicriteria,
    Multicriteria,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Baseline => "baseline",
            Family::Bicriteria => "bicriteria",
            Family::Multicriteria => "multicriteria",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" | "uniform" => Ok(Family::Baseline),
            "bi" | "bicriteria" => Ok(Family::Bicriteria),
            "multi" | "multicriteria" => Ok(Family::Multicriteria),
            other => Err(Error::InvalidInput(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Poly,
    Exponential,
}

/// Everything a builder needs, plus the intermediate real-valued quantities
/// the planner went through.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionPlan {
    pub kind: Family,
    /// Object budget.
    pub n: u64,
    pub d: u64,
    pub phi_input: Rational,
    pub regime: Regime,
    pub phi_eff: Rational,
    pub n_p: Option<u64>,
    pub n_q: u64,
    pub n_hat_p: Option<f64>,
    pub n_hat_q: f64,
    pub d_hat: Option<u64>,
    pub m: Vec<Rational>,
    pub k: Vec<u64>,
    /// Objects actually built.
    #[serde(rename = "N")]
    pub total_objects: u64,
}

impl ConstructionPlan {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn expect(&self, kind: Family) -> Result<()> {
        if self.kind != kind {
            return Err(Error::WrongPlanKind {
                expected: kind.to_string(),
                got: self.kind.to_string(),
            });
        }
        Ok(())
    }

    /// Bi-criteria construction with `n_p` and `n_q` given directly instead
    /// of derived from a budget. The budget is set to the objects built.
    pub fn bicriteria_fixed(n_p: u64, phi: &Rational, n_q: u64) -> Result<Self> {
        let m = m_sequence_bi(n_p, phi, n_q)?;
        let k = ceilings(&m)?;
        let total = n_p + k.iter().sum::<u64>();
        Ok(ConstructionPlan {
            kind: Family::Bicriteria,
            n: total,
            d: 1,
            phi_input: phi.clone(),
            regime: Regime::Poly,
            phi_eff: phi.clone(),
            n_p: Some(n_p),
            n_q,
            n_hat_p: Some(n_p as f64),
            n_hat_q: n_q as f64,
            d_hat: None,
            m,
            k,
            total_objects: total,
        })
    }

    /// Multi-criteria construction with `n_q` given directly; needs `phi > d >= 2`.
    pub fn multicriteria_fixed(d: u64, phi: &Rational, n_q: u64) -> Result<Self> {
        let m = m_sequence_multi(d, phi, n_q)?;
        let k = ceilings(&m)?;
        let total = d * k.iter().sum::<u64>();
        Ok(ConstructionPlan {
            kind: Family::Multicriteria,
            n: total,
            d,
            phi_input: phi.clone(),
            regime: Regime::Poly,
            phi_eff: phi.clone(),
            n_p: None,
            n_q,
            n_hat_p: None,
            n_hat_q: n_q as f64,
            d_hat: Some(d.div_ceil(2)),
            m,
            k,
            total_objects: total,
        })
    }
}

fn ceilings(m: &[Rational]) -> Result<Vec<u64>> {
    m.iter().map(Rational::ceil_u64).collect()
}

/// Floor that treats values within `1e-9` of an integer as that integer,
/// so quantities that are integral in exact arithmetic are not rounded
/// down by float error.
fn floor_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.floor()
    }
}

fn to_count(x: f64, name: &str) -> Result<u64> {
    if !(x.is_finite() && x >= 0.0 && x < u32::MAX as f64) {
        return Err(Error::Precondition(format!("{name} = {x} out of range")));
    }
    Ok(x as u64)
}

fn check_budget(built: u64, budget: u64) -> Result<()> {
    if built > budget {
        return Err(Error::BudgetExceeded { built, budget });
    }
    Ok(())
}

pub fn plan_baseline(n: u64) -> Result<ConstructionPlan> {
    if n < 1 {
        return Err(Error::Precondition("baseline needs n >= 1".into()));
    }
    Ok(ConstructionPlan {
        kind: Family::Baseline,
        n,
        d: 1,
        phi_input: Rational::one(),
        regime: Regime::Poly,
        phi_eff: Rational::one(),
        n_p: Some(n),
        n_q: 0,
        n_hat_p: Some(n as f64),
        n_hat_q: 0.0,
        d_hat: None,
        m: vec![],
        k: vec![],
        total_objects: n,
    })
}

pub fn plan_bicriteria(n: u64, phi: &Rational) -> Result<ConstructionPlan> {
    if n < 4 {
        return Err(Error::Precondition(format!("bi-criteria plan needs n >= 4, got {n}")));
    }
    if cmp_golden_square(phi) == Ordering::Less {
        return Err(Error::Precondition(format!(
            "bi-criteria plan needs phi >= (3 + sqrt 5)/2, got {phi}"
        )));
    }
    let one = Rational::one();
    let ratio = |p: &Rational| ((p * &Rational::from(2) - &one) / (p - &one)).to_f64();
    let exponent = (n as f64 - 1.0) / 3.0;
    // ties go to the polynomial regime
    let poly = phi.to_f64().ln() <= exponent * ratio(phi).ln();
    let (regime, phi_eff) = if poly {
        (Regime::Poly, phi.clone())
    } else {
        let fp = phi_prime::solve_phi_prime_bi_below(n, phi.to_f64())?;
        (Regime::Exponential, Rational::from_f64(fp.value)?)
    };

    let n_hat_q = phi_eff.to_f64().ln() / ratio(&phi_eff).ln();
    let n_hat_p = (n as f64 - 1.0 - n_hat_q) / 2.0;
    let n_q = to_count(floor_snapped(n_hat_q), "n_q")?;
    let n_p = to_count(floor_snapped(n_hat_p), "n_p")?;
    if n_q < 1 || n_p < 1 {
        return Err(Error::Precondition(format!(
            "rounded n_p = {n_p}, n_q = {n_q}; both must be >= 1"
        )));
    }
    let m = m_sequence_bi(n_p, &phi_eff, n_q)?;
    let k = ceilings(&m)?;
    let total = n_p + k.iter().sum::<u64>();
    check_budget(total, n)?;
    Ok(ConstructionPlan {
        kind: Family::Bicriteria,
        n,
        d: 1,
        phi_input: phi.clone(),
        regime,
        phi_eff,
        n_p: Some(n_p),
        n_q,
        n_hat_p: Some(n_hat_p),
        n_hat_q,
        d_hat: None,
        m,
        k,
        total_objects: total,
    })
}

pub fn plan_multicriteria(n: u64, d: u64, phi: &Rational) -> Result<ConstructionPlan> {
    if d < 2 {
        return Err(Error::Precondition(format!("multi-criteria plan needs d >= 2, got {d}")));
    }
    if n < 16 * d {
        return Err(Error::Precondition(format!(
            "multi-criteria plan needs n >= 16d = {}, got {n}",
            16 * d
        )));
    }
    if *phi < Rational::from(2 * d) {
        return Err(Error::Precondition(format!(
            "multi-criteria plan needs phi >= 2d = {}, got {phi}",
            2 * d
        )));
    }
    let (nf, df) = (n as f64, d as f64);
    let d_r = Rational::from(d);
    let ratio = |p: &Rational| ((p * &Rational::from(2)) / (p - &d_r)).to_f64();
    let coef = 4.0 * df * df / nf;
    let exponent = nf / (2.0 * df);
    let poly = (phi - &d_r).to_f64().ln() <= coef.ln() + exponent * ratio(phi).ln();
    let (regime, phi_eff) = if poly {
        (Regime::Poly, phi.clone())
    } else {
        let fp = phi_prime::solve_phi_prime_multi_below(n, d, phi.to_f64())?;
        (Regime::Exponential, Rational::from_f64(fp.value)?)
    };

    let n_hat_q = ((&phi_eff - &d_r).to_f64() * nf / (4.0 * df * df)).ln() / ratio(&phi_eff).ln();
    let n_q = to_count(floor_snapped(n_hat_q), "n_q")?;
    if n_q < 1 {
        return Err(Error::Precondition(format!("rounded n_q = {n_q}; must be >= 1")));
    }
    let m = m_sequence_multi(d, &phi_eff, n_q)?;
    let k = ceilings(&m)?;
    let total = d * k.iter().sum::<u64>();
    check_budget(total, n)?;
    Ok(ConstructionPlan {
        kind: Family::Multicriteria,
        n,
        d,
        phi_input: phi.clone(),
        regime,
        phi_eff,
        n_p: None,
        n_q,
        n_hat_p: None,
        n_hat_q,
        d_hat: Some(d.div_ceil(2)),
        m,
        k,
        total_objects: total,
    })
}

/// Dispatches on `family`; `d` and `phi` are ignored by the baseline.
pub fn plan(family: Family, n: u64, d: u64, phi: &Rational) -> Result<ConstructionPlan> {
    match family {
        Family::Baseline => plan_baseline(n),
        Family::Bicriteria => plan_bicriteria(n, phi),
        Family::Multicriteria => plan_multicriteria(n, d, phi),
    }
}
