//! Polarization-entangled variant: one photon of an `|HV⟩ + |VH⟩` pair
//! enters the interferometer, where a polarizing beamsplitter sends `V`
//! through the Kerr cell on arm 3; the partner is counted at a remote
//! polarizer. The probe coherence left between the two branches scales the
//! quantum correlation term by `Φ`, which in turn bounds the Clauser–Horne
//! sum.
//!
//! Register 0 is the remote photon (polarizer `θ₁`), register 1 the
//! interferometer photon (polarizer `θ₂`). Basis index 0 is `H`, 1 is `V`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::{self, KerrCellSpec};
use crate::error::{ensure_finite, Error, Result};
use crate::fock::{self, FockVector, QuantumState};

pub const H: usize = 0;
pub const V: usize = 1;
pub const REMOTE: usize = 0;
pub const INTERFEROMETER: usize = 1;

/// Polarizer settings, radians from horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizerAngles {
    pub theta1: f64,
    pub theta1p: f64,
    pub theta2: f64,
    pub theta2p: f64,
}

impl PolarizerAngles {
    pub fn new(theta1: f64, theta1p: f64, theta2: f64, theta2p: f64) -> Self {
        PolarizerAngles {
            theta1,
            theta1p,
            theta2,
            theta2p,
        }
    }

    /// Every angle reduced to `[0, π)`; probabilities have period `π`.
    pub fn canonicalized(&self) -> Self {
        let c = |x: f64| {
            let r = x.rem_euclid(PI);
            if r >= PI {
                0.0
            } else {
                r
            }
        };
        PolarizerAngles {
            theta1: c(self.theta1),
            theta1p: c(self.theta1p),
            theta2: c(self.theta2),
            theta2p: c(self.theta2p),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.theta1, self.theta1p, self.theta2, self.theta2p]
    }

    fn from_array(a: [f64; 4]) -> Self {
        PolarizerAngles::new(a[0], a[1], a[2], a[3])
    }

    fn validate(&self) -> Result<()> {
        for a in self.as_array() {
            ensure_finite("angles", a)?;
        }
        Ok(())
    }
}

/// The six Clauser–Horne terms and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CHSReport {
    /// `P(θ₁, θ₂)`
    pub p11: f64,
    /// `P(θ₁, θ₂′)`
    pub p12p: f64,
    /// `P(θ₁′, θ₂)`
    pub p1p2: f64,
    /// `P(θ₁′, θ₂′)`
    pub p1p2p: f64,
    /// `P(θ₁′)`
    pub s1p: f64,
    /// `P(θ₂)`
    pub s2: f64,
    pub chs: f64,
    pub phi_used: f64,
    pub angles: PolarizerAngles,
}

impl CHSReport {
    fn assemble(terms: [f64; 6], phi: f64, angles: PolarizerAngles) -> Self {
        let [p11, p12p, p1p2, p1p2p, s1p, s2] = terms;
        CHSReport {
            p11,
            p12p,
            p1p2,
            p1p2p,
            s1p,
            s2,
            chs: p11 - p12p + p1p2 + p1p2p - s1p - s2,
            phi_used: phi,
            angles,
        }
    }
}

/// `(|H⟩|V⟩ + |V⟩|H⟩)/√2 ⊗ probe`.
pub fn entangled_state(probe: &FockVector) -> QuantumState {
    let zero = Complex64::new(0.0, 0.0);
    let amp = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let branches = [zero, amp, amp, zero]
        .into_iter()
        .map(|a| probe.scale(a))
        .collect();
    QuantumState::from_branches(vec![2, 2], branches).expect("four branches, one cutoff")
}

/// Routes the interferometer photon's `V` component through the Kerr cell
/// on arm 3: its probe branch rotates by `exp(-i 2χT n_p)` and picks up the
/// extra phase `exp(-iφ)`. The probe self-Kerr factor acts on every branch.
pub fn kerr_tag(state: &QuantumState, cell: &KerrCellSpec, phi_extra: f64) -> Result<QuantumState> {
    cell.validate()?;
    ensure_finite("phi_extra", phi_extra)?;
    let mut out = state.clone();
    if cell.chi_p_t != 0.0 {
        for outcome in [H, V] {
            out =
                out.map_probe_where(INTERFEROMETER, outcome, |p| p.self_kerr_apply(cell.chi_p_t))?;
        }
    }
    out = out.number_phase_where(INTERFEROMETER, V, 2.0 * cell.chi_t)?;
    out.phase_where(INTERFEROMETER, V, phi_extra)
}

/// The probe-entangled cat state for a coherent probe `ν`, cutoff chosen by
/// [`fock::truncation_bound`].
pub fn tagged_state(nu: Complex64, cell: &KerrCellSpec, phi_extra: f64) -> Result<QuantumState> {
    let probe = fock::coherent_state_auto(nu)?;
    kerr_tag(&entangled_state(&probe), cell, phi_extra)
}

/// Rotation whose first row is `⟨θ| = cos θ ⟨H| + sin θ ⟨V|`, so that
/// outcome 0 afterwards means "passed a polarizer at `θ`".
fn polarizer_basis(theta: f64) -> [Complex64; 4] {
    let (s, c) = theta.sin_cos();
    [
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(c, 0.0),
    ]
}

/// Coincidence probability by projecting the full state.
pub fn state_joint_probability(state: &QuantumState, theta1: f64, theta2: f64) -> Result<f64> {
    let rotated = state
        .apply_register_unitary(REMOTE, &polarizer_basis(theta1))?
        .apply_register_unitary(INTERFEROMETER, &polarizer_basis(theta2))?;
    rotated.joint_probability(&[(REMOTE, 0), (INTERFEROMETER, 0)])
}

/// Single-detector probability for one photon by projecting the full state.
pub fn state_single_probability(state: &QuantumState, photon: usize, theta: f64) -> Result<f64> {
    state
        .apply_register_unitary(photon, &polarizer_basis(theta))?
        .partial_trace_probability(photon, 0)
}

/// `2 Re⟨HV-branch | VH-branch⟩` read off the state; equals `Φ` for the
/// tagged state.
pub fn state_phi_factor(state: &QuantumState) -> Result<f64> {
    let hv = state.branch(2 * H + V)?;
    let vh = state.branch(2 * V + H)?;
    Ok(2.0 * fock::overlap(&hv, &vh)?.re)
}

/// Closed-form coincidence probability for a given attenuation `Φ`:
/// `½[cos²θ₁ sin²θ₂ + cos²θ₂ sin²θ₁ + 2Φ cosθ₁ sinθ₂ cosθ₂ sinθ₁]`.
pub fn joint_probability_phi(theta1: f64, theta2: f64, phi: f64) -> f64 {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    0.5 * (c1 * c1 * s2 * s2 + c2 * c2 * s1 * s1 + 2.0 * phi * c1 * s2 * c2 * s1)
}

/// Closed-form coincidence probability with `Φ` from the probe parameters.
pub fn joint_probability(
    theta1: f64,
    theta2: f64,
    nu: Complex64,
    cell: &KerrCellSpec,
    phi_extra: f64,
) -> f64 {
    joint_probability_phi(theta1, theta2, analytic::phi_factor(nu, cell, phi_extra))
}

/// Single detection probability; the marginal of either photon is
/// maximally mixed.
pub fn singles_probability(_theta: f64) -> f64 {
    0.5
}

/// Clauser–Horne sum from the closed-form probabilities.
pub fn chs_sum(angles: &PolarizerAngles, phi: f64) -> CHSReport {
    let a = angles;
    let p = |t1, t2| joint_probability_phi(t1, t2, phi);
    CHSReport::assemble(
        [
            p(a.theta1, a.theta2),
            p(a.theta1, a.theta2p),
            p(a.theta1p, a.theta2),
            p(a.theta1p, a.theta2p),
            singles_probability(a.theta1p),
            singles_probability(a.theta2),
        ],
        phi,
        *angles,
    )
}

/// Clauser–Horne sum by projecting the full probe-entangled state.
pub fn chs_sum_from_state(state: &QuantumState, angles: &PolarizerAngles) -> Result<CHSReport> {
    angles.validate()?;
    let a = angles;
    let p = |t1, t2| state_joint_probability(state, t1, t2);
    Ok(CHSReport::assemble(
        [
            p(a.theta1, a.theta2)?,
            p(a.theta1, a.theta2p)?,
            p(a.theta1p, a.theta2)?,
            p(a.theta1p, a.theta2p)?,
            state_single_probability(state, REMOTE, a.theta1p)?,
            state_single_probability(state, INTERFEROMETER, a.theta2)?,
        ],
        state_phi_factor(state)?,
        *angles,
    ))
}

/// Largest Clauser–Horne sum attainable at attenuation `Φ`,
/// `(√(1 + Φ²) − 1)/2`.
pub fn chs_optimum(phi: f64) -> f64 {
    0.5 * ((1.0 + phi * phi).sqrt() - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Grid points per angle on `[0, π)`.
    pub grid: usize,
    /// Stop once every partial derivative is below this.
    pub stationarity: f64,
    pub max_sweeps: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid: 32,
            stationarity: 1e-10,
            max_sweeps: 200_000,
        }
    }
}

/// Maximizes the Clauser–Horne sum over all four polarizer angles.
pub fn maximize_chs(phi: f64) -> Result<CHSReport> {
    maximize_chs_with(phi, &OptimizerConfig::default())
}

/// Exhaustive grid over the full angle torus, then coordinate ascent from
/// the best grid point. The sum is `A + B cos 2x + C sin 2x` in any single
/// angle `x`, so each coordinate step is an exact 1-D maximization.
pub fn maximize_chs_with(phi: f64, config: &OptimizerConfig) -> Result<CHSReport> {
    ensure_finite("phi", phi)?;
    if !(-1.0..=1.0).contains(&phi) {
        return Err(Error::invalid(
            "phi",
            format!("must lie in [-1, 1], got {phi}"),
        ));
    }
    if config.grid < 2 {
        return Err(Error::invalid("grid", "need at least 2 points per angle"));
    }
    let n = config.grid;
    let step = PI / n as f64;
    let table: Vec<f64> = (0..n * n)
        .map(|k| joint_probability_phi((k / n) as f64 * step, (k % n) as f64 * step, phi))
        .collect();
    let at = |i: usize, j: usize| table[i * n + j];

    // (value, [i, i', j, j']) with ties broken toward the smallest indices
    type Best = (f64, [usize; 4]);
    let better = |a: Best, b: Best| -> Best {
        if a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1) {
            a
        } else {
            b
        }
    };
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut local: Best = (f64::NEG_INFINITY, [usize::MAX; 4]);
            for ip in 0..n {
                for j in 0..n {
                    for jp in 0..n {
                        let v = at(i, j) - at(i, jp) + at(ip, j) + at(ip, jp) - 1.0;
                        local = better(local, (v, [i, ip, j, jp]));
                    }
                }
            }
            local
        })
        .reduce(|| (f64::NEG_INFINITY, [usize::MAX; 4]), better);

    let mut x = best.1.map(|k| k as f64 * step);
    let value = |x: &[f64; 4]| chs_sum(&PolarizerAngles::from_array(*x), phi).chs;
    for _ in 0..config.max_sweeps {
        for k in 0..4 {
            let mut probe = x;
            let mut f = |t: f64| {
                probe[k] = t;
                value(&probe)
            };
            let f0 = f(0.0);
            let f90 = f(FRAC_PI_2);
            let f45 = f(FRAC_PI_4);
            let a = 0.5 * (f0 + f90);
            let b = 0.5 * (f0 - f90);
            let c = f45 - a;
            if b.hypot(c) > 0.0 {
                let candidate = 0.5 * c.atan2(b);
                let mut trial = x;
                trial[k] = candidate;
                if value(&trial) >= value(&x) {
                    x = trial;
                }
            }
        }
        if gradient_norm(&x, phi) < config.stationarity {
            break;
        }
    }
    let angles = PolarizerAngles::from_array(x).canonicalized();
    Ok(chs_sum(&angles, phi))
}

/// Largest partial derivative of the sum, from the exact single-angle
/// harmonic form.
pub fn gradient_norm(x: &[f64; 4], phi: f64) -> f64 {
    let value = |x: &[f64; 4]| chs_sum(&PolarizerAngles::from_array(*x), phi).chs;
    (0..4)
        .map(|k| {
            let mut y = *x;
            let mut f = |t: f64| {
                y[k] = t;
                value(&y)
            };
            let f0 = f(0.0);
            let f90 = f(FRAC_PI_2);
            let f45 = f(FRAC_PI_4);
            let a = 0.5 * (f0 + f90);
            let b = 0.5 * (f0 - f90);
            let c = f45 - a;
            (2.0 * (-b * (2.0 * x[k]).sin() + c * (2.0 * x[k]).cos())).abs()
        })
        .fold(0.0, f64::max)
}

/// Angles that maximize the sum at `Φ = 1`, with the quantum correlation
/// split evenly between the cosine and sine parts of the sum:
/// `θ₁ = 0, θ₁′ = π/4, θ₂ = 3π/8, θ₂′ = π/8`.
pub fn unattenuated_optimal_angles() -> PolarizerAngles {
    PolarizerAngles::new(0.0, FRAC_PI_4, 3.0 * PI / 8.0, PI / 8.0)
}

/// Sum at `Φ` with the polarizers left at the `Φ = 1` optimum instead of
/// re-optimized.
pub fn fixed_angle_chs(phi: f64) -> CHSReport {
    chs_sum(&unattenuated_optimal_angles(), phi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceRow {
    pub gamma: f64,
    /// `γ·Φ₀`.
    pub phi_effective: f64,
    pub report: CHSReport,
}

/// Maximized sum for each coherence factor, with effective `Φ = γ·Φ₀`.
pub fn chs_vs_coherence(phi0: f64, gammas: &[f64]) -> Result<Vec<CoherenceRow>> {
    gammas
        .iter()
        .map(|&gamma| {
            if !(0.0..=1.0).contains(&gamma) {
                return Err(Error::invalid(
                    "gamma",
                    format!("must lie in [0, 1], got {gamma}"),
                ));
            }
            let phi_effective = gamma * phi0;
            Ok(CoherenceRow {
                gamma,
                phi_effective,
                report: maximize_chs(phi_effective)?,
            })
        })
        .collect()
}
