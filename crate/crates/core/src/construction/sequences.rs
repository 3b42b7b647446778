//! Scale sequences `m_1, m_2, ...` that place each copy step's profit
//! interval beyond everything that came before it.

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Bi-criteria scales: `m_i = (n_p + 1)/(phi - 1) * ((2 phi - 1)/(phi - 1))^(i - 1)`.
pub fn m_sequence_bi(n_p: u64, phi: &Rational, n_q: u64) -> Result<Vec<Rational>> {
    let one = Rational::one();
    if *phi <= one {
        return Err(Error::Precondition(format!("phi must be > 1, got {phi}")));
    }
    if n_p < 1 {
        return Err(Error::Precondition("n_p must be >= 1".into()));
    }
    let phi_minus_one = phi - &one;
    let ratio = (phi * &Rational::from(2) - &one) / &phi_minus_one;
    let mut m = Rational::from(n_p + 1) / &phi_minus_one;
    let mut out = Vec::with_capacity(n_q as usize);
    for _ in 0..n_q {
        out.push(m.clone());
        m = m * &ratio;
    }
    Ok(out)
}

/// Multi-criteria scales from the recurrence
/// `m_0 = 0`, `m_i = (sum_{l < i} (m_l (phi + d) + d)) / (phi - d)`.
pub fn m_sequence_multi(d: u64, phi: &Rational, n_q: u64) -> Result<Vec<Rational>> {
    let d_r = Rational::from(d);
    if *phi <= d_r {
        return Err(Error::Precondition(format!("phi must be > d = {d}, got {phi}")));
    }
    if d < 2 {
        return Err(Error::Precondition(format!("d must be >= 2, got {d}")));
    }
    let scale = phi + &d_r;
    let denom = phi - &d_r;
    let mut running = Rational::zero();
    let mut prev = Rational::zero();
    let mut out = Vec::with_capacity(n_q as usize);
    for _ in 0..n_q {
        running = running + &prev * &scale + &d_r;
        prev = &running / &denom;
        out.push(prev.clone());
    }
    Ok(out)
}

/// Closed form of [`m_sequence_multi`]:
/// `m_i = d/(phi + d) * ((2 phi/(phi - d))^i - 1)`.
pub fn m_explicit_multi(d: u64, phi: &Rational, i: u32) -> Result<Rational> {
    let d_r = Rational::from(d);
    if *phi <= d_r {
        return Err(Error::Precondition(format!("phi must be > d = {d}, got {phi}")));
    }
    let ratio = (phi * &Rational::from(2)) / (phi - &d_r);
    Ok(&d_r / &(phi + &d_r) * (ratio.pow(i) - Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn bi_values() {
        let m = m_sequence_bi(3, &r("3"), 2).unwrap();
        assert_eq!(m, vec![r("2"), r("5")]);
        assert!(m_sequence_bi(3, &r("1"), 2).is_err());
        assert!(m_sequence_bi(3, &r("1/2"), 2).is_err());
        assert!(m_sequence_bi(3, &r("3"), 0).unwrap().is_empty());
    }

    #[test]
    fn multi_values() {
        let m = m_sequence_multi(2, &r("4"), 2).unwrap();
        assert_eq!(m, vec![r("1"), r("5")]);
        assert_eq!(m_explicit_multi(2, &r("4"), 0).unwrap(), Rational::zero());
        assert_eq!(m_explicit_multi(2, &r("4"), 2).unwrap(), r("5"));
        assert!(m_sequence_multi(2, &r("2"), 1).is_err());
        assert!(m_sequence_multi(1, &r("4"), 1).is_err());
    }

    #[test]
    fn recurrence_matches_closed_form() {
        for d in 2..=5u64 {
            for phi in ["9/4", "3", "7/2", "10", "33/2", "100"] {
                let phi = r(phi);
                if phi <= Rational::from(d) {
                    continue;
                }
                let m = m_sequence_multi(d, &phi, 20).unwrap();
                for (i, mi) in m.iter().enumerate() {
                    assert_eq!(*mi, m_explicit_multi(d, &phi, i as u32 + 1).unwrap());
                }
            }
        }
    }
}
