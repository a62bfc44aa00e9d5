use serde::{Deserialize, Serialize};

use super::schedule::CoefficientSchedule;
use crate::error::{Error, Result};

/// Which contraction condition a problem is posed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Two-term condition with Θ and Δ, each right-hand term wrapped in F.
    Vetro,
    /// Three-term condition with Δ, Θ and Λ.
    Abbas,
    /// Three-term condition with both sides wrapped in F.
    AbbasPhi,
}

/// Upper bound placed on `Δ + 3Θ + 4Λ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbbasThreshold {
    /// `< 1/2`, the family-level bound.
    #[default]
    Half,
    /// `< 1`, the three-map bound.
    One,
}

impl AbbasThreshold {
    pub fn value(self) -> f64 {
        match self {
            AbbasThreshold::Half => 0.5,
            AbbasThreshold::One => 1.0,
        }
    }
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::param(name, format!("{v} is not a finite nonnegative real")));
    }
    Ok(())
}

fn check_degree(s: f64) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::param("s", format!("degree {s} is not positive")));
    }
    Ok(())
}

/// `(Θ^s + Δ^s) / (1 - Θ^s)`.
pub fn r_vetro(theta: f64, delta: f64, s: f64) -> Result<f64> {
    check_nonneg("theta", theta)?;
    check_nonneg("delta", delta)?;
    check_degree(s)?;
    let (ts, ds) = (theta.powf(s), delta.powf(s));
    let denominator = 1.0 - ts;
    if denominator <= 0.0 {
        return Err(Error::Singularity { denominator });
    }
    Ok((ts + ds) / denominator)
}

/// `(Δ + 2Θ + 3Λ) / (1 - Θ - Λ)`.
pub fn r_abbas(delta: f64, theta: f64, lam: f64) -> Result<f64> {
    r_abbas_phi(delta, theta, lam, 1.0)
}

/// `(Δ^s + 2Θ^s + 3Λ^s) / (1 - Θ^s - Λ^s)`.
pub fn r_abbas_phi(delta: f64, theta: f64, lam: f64, s: f64) -> Result<f64> {
    check_nonneg("delta", delta)?;
    check_nonneg("theta", theta)?;
    check_nonneg("lambda", lam)?;
    check_degree(s)?;
    let (d, t, l) = if s == 1.0 {
        (delta, theta, lam)
    } else {
        (delta.powf(s), theta.powf(s), lam.powf(s))
    };
    let denominator = 1.0 - t - l;
    if denominator <= 0.0 {
        return Err(Error::Singularity { denominator });
    }
    Ok((d + 2.0 * t + 3.0 * l) / denominator)
}

/// `r_1, ..., r_len` with `r_i` evaluated at index triple `(i, i+1, i+2)`.
///
/// `s` is the homogeneity degree; pass 1 for the plain three-term mode.
pub fn rate_sequence(sched: &CoefficientSchedule, mode: Mode, s: f64, len: usize) -> Result<Vec<f64>> {
    if mode != Mode::Vetro && !sched.has_lambda() {
        return Err(Error::Mode("three-term rates need a Λ coefficient".into()));
    }
    (1..=len)
        .map(|i| {
            let c = sched.at(i, i + 1, i + 2)?;
            match mode {
                Mode::Vetro => r_vetro(c.theta, c.delta, s),
                Mode::Abbas => r_abbas(c.delta, c.theta, c.lambda),
                Mode::AbbasPhi => r_abbas_phi(c.delta, c.theta, c.lambda, s),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vetro_examples() {
        assert_eq!(r_vetro(0.0, 0.0, 2.5).unwrap(), 0.0);
        assert!((r_vetro(0.2, 0.1, 1.0).unwrap() - 0.375).abs() < 1e-15);
        assert!((r_vetro(0.3, 0.4, 2.0).unwrap() - 0.25 / 0.91).abs() < 1e-15);
        assert!((r_vetro(0.3, 0.4, 2.0).unwrap() - 0.274725).abs() < 1e-6);
        assert!(matches!(r_vetro(1.0, 0.1, 1.0), Err(Error::Singularity { .. })));
        assert!(r_vetro(0.5, 0.1, 0.0).is_err());
    }

    #[test]
    fn abbas_examples() {
        assert_eq!(r_abbas(0.0, 0.0, 0.0).unwrap(), 0.0);
        let r = r_abbas(0.1, 0.05, 0.05).unwrap();
        assert!((r - 0.35 / 0.9).abs() < 1e-15);
        assert!((r - 0.388889).abs() < 1e-6);
        assert!(matches!(r_abbas(0.0, 0.6, 0.4), Err(Error::Singularity { .. })));
    }

    #[test]
    fn abbas_phi_examples() {
        assert!((r_abbas_phi(0.1, 0.05, 0.05, 1.0).unwrap() - r_abbas(0.1, 0.05, 0.05).unwrap()).abs() < 1e-15);
        assert_eq!(r_abbas_phi(0.0, 0.0, 0.0, 0.5).unwrap(), 0.0);
        assert!((r_abbas_phi(0.04, 0.01, 0.01, 0.5).unwrap() - 0.875).abs() < 1e-12);
        assert!(r_abbas_phi(0.0, 0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn rate_sequence_needs_lambda_for_three_term_modes() {
        let v = CoefficientSchedule::vetro_constant(0.2, 0.1);
        assert!(matches!(rate_sequence(&v, Mode::Abbas, 1.0, 3), Err(Error::Mode(_))));
        assert_eq!(rate_sequence(&v, Mode::Vetro, 1.0, 3).unwrap().len(), 3);
        let a = CoefficientSchedule::abbas_constant(0.1, 0.05, 0.05);
        let r = rate_sequence(&a, Mode::Abbas, 1.0, 4).unwrap();
        assert!(r.iter().all(|x| (x - 0.35 / 0.9).abs() < 1e-15));
    }
}
