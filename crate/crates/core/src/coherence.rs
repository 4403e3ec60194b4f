//! Finite probe coherence between the two Kerr cells.
//!
//! When the optical path `Δx` between the cells exceeds the probe coherence
//! length `L_c`, the two arms acquire a random relative phase. Its mean
//! resultant `γ = E[cos δ]` multiplies the interference term of the fringe.

use crate::ensemble::PhaseDistribution;
use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Lineshape {
    /// `γ = exp(−Δx/L_c)`; phase noise is wrapped Cauchy.
    #[default]
    Lorentzian,
    /// `γ = exp(−(π/2)(Δx/L_c)²)`; phase noise is normal with
    /// `σ² = π(Δx/L_c)²`.
    Gaussian,
}

impl std::str::FromStr for Lineshape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lorentzian" => Ok(Lineshape::Lorentzian),
            "gaussian" => Ok(Lineshape::Gaussian),
            other => Err(Error::invalid(
                "lineshape",
                format!("expected `lorentzian` or `gaussian`, got `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for Lineshape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Lineshape::Lorentzian => "lorentzian",
            Lineshape::Gaussian => "gaussian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSpec {
    /// Probe optical path between the two cells, meters.
    pub delta_x: f64,
    /// Probe coherence length, meters.
    pub l_coh: f64,
    pub lineshape: Lineshape,
}

impl CoherenceSpec {
    pub fn new(delta_x: f64, l_coh: f64, lineshape: Lineshape) -> Result<Self> {
        let spec = CoherenceSpec {
            delta_x,
            l_coh,
            lineshape,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("delta_x", self.delta_x)?;
        ensure_finite("l_coh", self.l_coh)?;
        if self.delta_x < 0.0 {
            return Err(Error::invalid("delta_x", "must be >= 0"));
        }
        if self.l_coh <= 0.0 {
            return Err(Error::invalid("l_coh", "must be > 0"));
        }
        Ok(())
    }

    fn ratio(&self) -> f64 {
        self.delta_x / self.l_coh
    }

    /// Random inter-cell phase whose mean resultant is [`coherence_factor`].
    pub fn phase_distribution(&self) -> Result<PhaseDistribution> {
        self.validate()?;
        let x = self.ratio();
        Ok(match self.lineshape {
            Lineshape::Lorentzian => PhaseDistribution::WrappedCauchy { width: x },
            Lineshape::Gaussian => PhaseDistribution::Normal {
                sigma: (std::f64::consts::PI).sqrt() * x,
            },
        })
    }
}

/// Mean resultant `γ ∈ (0, 1]` of the inter-cell phase.
pub fn coherence_factor(spec: &CoherenceSpec) -> Result<f64> {
    spec.validate()?;
    let x = spec.ratio();
    Ok(match spec.lineshape {
        Lineshape::Lorentzian => (-x).exp(),
        Lineshape::Gaussian => (-std::f64::consts::FRAC_PI_2 * x * x).exp(),
    })
}

/// Scales the interference term of `n4` by `gamma`, leaving the constant
/// `½` untouched.
pub fn apply_dephasing(n4: f64, gamma: f64) -> Result<f64> {
    ensure_finite("n4", n4)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid(
            "gamma",
            format!("must lie in [0, 1], got {gamma}"),
        ));
    }
    Ok(0.5 + gamma * (n4 - 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{GaussLegendre, DEFAULT_NODES};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn colocated_cells_are_coherent() {
        for shape in [Lineshape::Lorentzian, Lineshape::Gaussian] {
            let spec = CoherenceSpec::new(0.0, 0.1, shape).unwrap();
            assert_eq!(coherence_factor(&spec).unwrap(), 1.0);
        }
    }

    #[test]
    fn lorentzian_at_one_coherence_length() {
        let spec = CoherenceSpec::new(0.1, 0.1, Lineshape::Lorentzian).unwrap();
        assert_abs_diff_eq!(coherence_factor(&spec).unwrap(), 0.36788, epsilon = 1e-5);
    }

    #[test]
    fn far_cells_lose_coherence() {
        for shape in [Lineshape::Lorentzian, Lineshape::Gaussian] {
            let spec = CoherenceSpec::new(1e3, 0.1, shape).unwrap();
            assert!(coherence_factor(&spec).unwrap() < 1e-300);
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        let err = CoherenceSpec::new(0.1, -1.0, Lineshape::Lorentzian).unwrap_err();
        assert_eq!(err.to_string(), "invalid parameter `l_coh`: must be > 0");
        assert!(CoherenceSpec::new(0.1, 0.0, Lineshape::Gaussian).is_err());
        assert!(CoherenceSpec::new(-0.1, 1.0, Lineshape::Gaussian).is_err());
    }

    #[test]
    fn dephasing_endpoints() {
        assert_eq!(apply_dephasing(0.9, 1.0).unwrap(), 0.9);
        assert_eq!(apply_dephasing(0.9, 0.0).unwrap(), 0.5);
        // γ = 0.5 on the restored fringe ½(1 − cos Θ)
        let theta: f64 = 0.0;
        let n4 = apply_dephasing(0.5 * (1.0 - theta.cos()), 0.5).unwrap();
        assert_abs_diff_eq!(n4, 0.5 * (1.0 - 0.5 * theta.cos()), epsilon = 1e-16);
        assert!(apply_dephasing(0.5, 1.5).is_err());
        assert!(apply_dephasing(0.5, -0.1).is_err());
    }

    #[test]
    fn lineshape_names_round_trip() {
        for shape in [Lineshape::Lorentzian, Lineshape::Gaussian] {
            assert_eq!(shape.to_string().parse::<Lineshape>().unwrap(), shape);
        }
        assert!("voigt".parse::<Lineshape>().is_err());
    }

    proptest! {
        #[test]
        fn distribution_reproduces_gamma(dx in 0.0f64..3.0, lc in 0.05f64..2.0, gauss in any::<bool>()) {
            let shape = if gauss { Lineshape::Gaussian } else { Lineshape::Lorentzian };
            let spec = CoherenceSpec::new(dx, lc, shape).unwrap();
            let rule = GaussLegendre::new(DEFAULT_NODES).unwrap();
            let d = spec.phase_distribution().unwrap();
            let q = d.expectation(&rule, f64::cos);
            prop_assert!((q - coherence_factor(&spec).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn gamma_decreases_with_separation(dx in 0.0f64..2.0, step in 1e-3f64..1.0, lc in 0.5f64..2.0, gauss in any::<bool>()) {
            let shape = if gauss { Lineshape::Gaussian } else { Lineshape::Lorentzian };
            let a = coherence_factor(&CoherenceSpec::new(dx, lc, shape).unwrap()).unwrap();
            let b = coherence_factor(&CoherenceSpec::new(dx + step, lc, shape).unwrap()).unwrap();
            prop_assert!(b < a && b > 0.0);
        }
    }
}
