//! Closed-form fringe, visibility and Bell attenuation formulas.
//!
//! Phases are dimensionless interaction phases (`χT` and friends). The
//! ν-dependent fringe shift enters as `+|ν|² sin(2χT)` and all deterministic
//! signal phases are lumped into a single offset `φ₀`.

use num_complex::Complex64;

use crate::error::{ensure_finite, Result};

/// Interaction phases of one Kerr cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrCellSpec {
    /// Cross-Kerr phase `χT`.
    pub chi_t: f64,
    /// Signal self-Kerr phase `χ_s T`.
    pub chi_s_t: f64,
    /// Probe self-Kerr phase `χ_p T`.
    pub chi_p_t: f64,
}

impl KerrCellSpec {
    pub fn new(chi_t: f64) -> Self {
        KerrCellSpec {
            chi_t,
            chi_s_t: 0.0,
            chi_p_t: 0.0,
        }
    }

    pub fn with_self_kerr(mut self, chi_s_t: f64, chi_p_t: f64) -> Self {
        self.chi_s_t = chi_s_t;
        self.chi_p_t = chi_p_t;
        self
    }

    /// Same coupling constants, interaction time scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        KerrCellSpec {
            chi_t: self.chi_t * factor,
            chi_s_t: self.chi_s_t * factor,
            chi_p_t: self.chi_p_t * factor,
        }
    }

    /// Phase a single signal photon picks up from its own self-Kerr term,
    /// `(χ_s/2) n_s² T` at `n_s = 1`.
    pub fn signal_self_phase(&self) -> f64 {
        0.5 * self.chi_s_t
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("chi_t", self.chi_t)?;
        ensure_finite("chi_s_t", self.chi_s_t)?;
        ensure_finite("chi_p_t", self.chi_p_t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeParams {
    pub nu: Complex64,
    pub cell: KerrCellSpec,
    /// Interferometer phase `Θ`.
    pub theta: f64,
    /// Aggregated deterministic phase `φ₀`.
    pub phi0: f64,
}

impl FringeParams {
    pub fn new(nu: Complex64, cell: KerrCellSpec, theta: f64) -> Self {
        FringeParams {
            nu,
            cell,
            theta,
            phi0: 0.0,
        }
    }

    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.phi0 = phi0;
        self
    }
}

/// `V = exp(-2|ν|² sin²(χT))`.
pub fn visibility(nu: Complex64, cell: &KerrCellSpec) -> f64 {
    let s = cell.chi_t.sin();
    (-2.0 * nu.norm_sqr() * s * s).exp()
}

/// Homodyne signal-to-noise ratio `R = 4|ν| sin(χT)`.
pub fn homodyne_snr(nu: Complex64, cell: &KerrCellSpec) -> f64 {
    4.0 * nu.norm() * cell.chi_t.sin()
}

/// Visibility expressed through the SNR, `exp(-R²/8)`.
pub fn visibility_from_snr(snr: f64) -> f64 {
    (-snr * snr / 8.0).exp()
}

/// Pure-probe which-path distinguishability, `D = sqrt(1 - V²)`.
pub fn distinguishability(nu: Complex64, cell: &KerrCellSpec) -> f64 {
    let v = visibility(nu, cell);
    (1.0 - v * v).max(0.0).sqrt()
}

/// Fringe-shift angle `|ν|² sin(2χT)`.
pub fn probe_phase_shift(nu: Complex64, cell: &KerrCellSpec) -> f64 {
    nu.norm_sqr() * (2.0 * cell.chi_t).sin()
}

/// `⟨n₄⟩ = ½[1 − V cos(φ₀ + Θ + |ν|² sin 2χT)]` for one cell on arm 3.
pub fn n4_single_cell(p: &FringeParams) -> f64 {
    let v = visibility(p.nu, &p.cell);
    0.5 * (1.0 - v * (p.phi0 + p.theta + probe_phase_shift(p.nu, &p.cell)).cos())
}

/// Two cells: arm 3 interacts for `T`, arm 2 for `T' = ratio·T`.
///
/// Only the interaction-time difference `T − T'` survives, so every cell
/// phase and `φ₀` are scaled by `1 − ratio`. At `ratio = 1` this is exactly
/// `½(1 − cos Θ)`.
pub fn n4_double_cell(p: &FringeParams, t_prime_ratio: f64) -> f64 {
    let factor = 1.0 - t_prime_ratio;
    if factor == 0.0 {
        return 0.5 * (1.0 - p.theta.cos());
    }
    let reduced = FringeParams {
        nu: p.nu,
        cell: p.cell.scaled(factor),
        theta: p.theta,
        phi0: p.phi0 * factor,
    };
    n4_single_cell(&reduced)
}

/// Bell-term attenuation `Φ = V cos(|ν|² sin 2χT + φ)`.
pub fn phi_factor(nu: Complex64, cell: &KerrCellSpec, phi_extra: f64) -> f64 {
    visibility(nu, cell) * (probe_phase_shift(nu, cell) + phi_extra).cos()
}
