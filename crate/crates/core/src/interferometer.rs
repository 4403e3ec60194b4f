//! Exact simulation of the Mach–Zehnder layout: BS I, Kerr cell(s) coupling
//! the signal photon to a coherent probe, BS II, photon counting.
//!
//! With a single signal photon the joint state is two probe vectors, one
//! per path mode. Beamsplitters mix the two branches with
//! `[[t, i r], [i r, t]]`; index 0 is input port 1, arm 2 and output 4,
//! index 1 is input port 0, arm 3 and output 5. Arm 3 carries the
//! interferometer phase `exp(-iΘ)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::KerrCellSpec;
use crate::ensemble::{GaussLegendre, PhaseDistribution, DEFAULT_NODES};
use crate::error::{ensure_finite, Error, Result};
use crate::fock::{self, FockVector, QuantumState, DEFAULT_TAIL_TOLERANCE};

/// Interferometer arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Two,
    Three,
}

impl Arm {
    fn index(self) -> usize {
        match self {
            Arm::Two => 0,
            Arm::Three => 1,
        }
    }
}

/// Probe amplitude plus Fock cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    pub nu: Complex64,
    /// Explicit cutoff; `None` selects [`fock::truncation_bound`].
    pub n_max: Option<usize>,
    pub tail_tolerance: f64,
}

impl ProbeSpec {
    pub fn new(nu: Complex64) -> Self {
        ProbeSpec {
            nu,
            n_max: None,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = Some(n_max);
        self
    }

    pub fn resolved_n_max(&self) -> usize {
        self.n_max
            .unwrap_or_else(|| fock::truncation_bound(self.nu.norm()))
    }

    pub fn state(&self) -> Result<FockVector> {
        fock::coherent_state_with_tolerance(self.nu, self.resolved_n_max(), self.tail_tolerance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmConfig {
    pub cell_arm2: Option<KerrCellSpec>,
    pub cell_arm3: Option<KerrCellSpec>,
    /// Interferometer phase `Θ` on arm 3.
    pub theta: f64,
    pub bs1_reflectivity: f64,
    pub bs2_reflectivity: f64,
}

impl ArmConfig {
    /// Balanced interferometer with one cell on arm 3.
    pub fn single_cell(cell: KerrCellSpec, theta: f64) -> Self {
        ArmConfig {
            cell_arm2: None,
            cell_arm3: Some(cell),
            theta,
            bs1_reflectivity: 0.5,
            bs2_reflectivity: 0.5,
        }
    }

    /// Balanced interferometer, `cell` on arm 3 and the same medium driven
    /// for `t_prime_ratio · T` on arm 2.
    pub fn double_cell(cell: KerrCellSpec, t_prime_ratio: f64, theta: f64) -> Self {
        ArmConfig {
            cell_arm2: Some(cell.scaled(t_prime_ratio)),
            ..Self::single_cell(cell, theta)
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("theta", self.theta)?;
        for (name, r) in [
            ("bs1_reflectivity", self.bs1_reflectivity),
            ("bs2_reflectivity", self.bs2_reflectivity),
        ] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::invalid(name, format!("must lie in (0, 1), got {r}")));
            }
        }
        for cell in self.cell_arm2.iter().chain(self.cell_arm3.iter()) {
            cell.validate()?;
        }
        Ok(())
    }
}

/// Single signal photon in a two-mode path register, one probe vector per
/// mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    branches: [FockVector; 2],
}

impl PathState {
    /// Signal photon entering BS I through port 1.
    pub fn input(probe: FockVector) -> Self {
        let zero = probe.scale(Complex64::new(0.0, 0.0));
        PathState {
            branches: [probe, zero],
        }
    }

    pub fn branch(&self, index: usize) -> &FockVector {
        &self.branches[index]
    }

    pub fn arm(&self, arm: Arm) -> &FockVector {
        &self.branches[arm.index()]
    }

    /// Occupation probability of each path mode.
    pub fn probabilities(&self) -> [f64; 2] {
        [self.branches[0].norm_sqr(), self.branches[1].norm_sqr()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(FockVector::norm_sqr).sum()
    }

    /// Flattened joint state with a two-level path register.
    pub fn to_joint(&self) -> QuantumState {
        QuantumState::from_branches(vec![2], self.branches.to_vec())
            .expect("both branches share a cutoff")
    }

    fn map_arm<F: Fn(&FockVector) -> FockVector>(&self, arm: Arm, f: F) -> PathState {
        let mut branches = self.branches.clone();
        branches[arm.index()] = f(&branches[arm.index()]);
        PathState { branches }
    }

    fn map_all<F: Fn(&FockVector) -> FockVector>(&self, f: F) -> PathState {
        PathState {
            branches: [f(&self.branches[0]), f(&self.branches[1])],
        }
    }

    /// Scalar phase `exp(-iφ)` on one arm.
    pub fn phase(&self, arm: Arm, phi: f64) -> PathState {
        let factor = Complex64::from_polar(1.0, -phi);
        self.map_arm(arm, |p| p.scale(factor))
    }
}

/// The `[[t, i r], [i r, t]]` beamsplitter mixing the two path modes.
pub fn bs_transform(state: &PathState, reflectivity: f64) -> Result<PathState> {
    if !(0.0..=1.0).contains(&reflectivity) {
        return Err(Error::invalid(
            "reflectivity",
            format!("must lie in [0, 1], got {reflectivity}"),
        ));
    }
    let t = Complex64::new((1.0 - reflectivity).sqrt(), 0.0);
    let ir = Complex64::new(0.0, reflectivity.sqrt());
    let [a, b] = &state.branches;
    let mix = |x: Complex64, p: &FockVector, y: Complex64, q: &FockVector| {
        let amps = p
            .amps()
            .iter()
            .zip(q.amps())
            .map(|(u, v)| x * u + y * v)
            .collect();
        FockVector::from_amps(amps)
    };
    Ok(PathState {
        branches: [mix(t, a, ir, b)?, mix(ir, a, t, b)?],
    })
}

/// One Kerr cell on `arm`.
///
/// The probe crosses the cell on both branches and always picks up its
/// self-Kerr factor; on the branch where the photon occupies `arm` it is
/// also rotated by `exp(-i 2χT n_p)` and the photon takes the self-phase
/// `(χ_s/2) T`.
pub fn kerr_evolve(state: &PathState, arm: Arm, cell: &KerrCellSpec) -> Result<PathState> {
    cell.validate()?;
    let mut out = state.clone();
    if cell.chi_p_t != 0.0 {
        out = out.map_all(|p| p.self_kerr_apply(cell.chi_p_t));
    }
    let signal = Complex64::from_polar(1.0, -cell.signal_self_phase());
    Ok(out.map_arm(arm, |p| {
        p.number_phase_apply(2.0 * cell.chi_t).scale(signal)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    /// `⟨n₄⟩`.
    pub n4_expectation: f64,
    /// `⟨n₅⟩`, the complementary port.
    pub n5_expectation: f64,
    pub joint_state_norm: f64,
    /// `⟨probe|arm 2 , probe|arm 3⟩` between normalized conditional probe
    /// states, times the mean phase factor of any inter-cell noise.
    pub probe_conditional_overlap: Complex64,
}

/// State just before BS II, with the inter-cell phase `delta` on arm 2.
fn evolve_to_bs2(config: &ArmConfig, probe: &FockVector, delta: f64) -> Result<PathState> {
    let mut state = bs_transform(&PathState::input(probe.clone()), config.bs1_reflectivity)?;
    if let Some(cell) = &config.cell_arm3 {
        state = kerr_evolve(&state, Arm::Three, cell)?;
    }
    if let Some(cell) = &config.cell_arm2 {
        state = kerr_evolve(&state, Arm::Two, cell)?;
    }
    if delta != 0.0 {
        state = state.phase(Arm::Two, delta);
    }
    Ok(state.phase(Arm::Three, config.theta))
}

/// Overlap of the normalized probe states conditioned on the photon path.
pub fn conditional_probe_overlap(state: &PathState) -> Result<Complex64> {
    let a = state.arm(Arm::Two);
    let b = state.arm(Arm::Three);
    let na = a.norm_sqr().sqrt();
    let nb = b.norm_sqr().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(fock::overlap(a, b)? / (na * nb))
}

/// Probe-only overlap before any signal phase: Kerr rotations only.
fn probe_overlap(config: &ArmConfig, probe: &FockVector) -> Result<Complex64> {
    let rotate = |cell: Option<&KerrCellSpec>| match cell {
        Some(c) => probe
            .self_kerr_apply(c.chi_p_t)
            .number_phase_apply(2.0 * c.chi_t),
        None => probe.clone(),
    };
    let mut on2 = rotate(config.cell_arm2.as_ref());
    let mut on3 = rotate(config.cell_arm3.as_ref());
    // the probe crosses every cell on both branches
    if let Some(c) = &config.cell_arm2 {
        on3 = on3.self_kerr_apply(c.chi_p_t);
    }
    if let Some(c) = &config.cell_arm3 {
        on2 = on2.self_kerr_apply(c.chi_p_t);
    }
    let na = on2.norm_sqr().sqrt();
    let nb = on3.norm_sqr().sqrt();
    Ok(fock::overlap(&on2, &on3)? / (na * nb))
}

/// Englert distinguishability `tr|w₂ρ₂ − w₃ρ₃|` of the which-path probe
/// states, from the 2×2 restriction of the operator to the span of the two
/// conditional probe vectors.
pub fn which_path_distinguishability(state: &PathState) -> Result<f64> {
    let a = state.arm(Arm::Two);
    let b = state.arm(Arm::Three);
    let total = a.norm_sqr() + b.norm_sqr();
    if total == 0.0 {
        return Err(Error::invalid("state", "zero norm"));
    }
    // unnormalized branches carry their weights: M = |a⟩⟨a| − |b⟩⟨b|
    let na2 = a.norm_sqr();
    if na2 == 0.0 {
        return Ok(1.0);
    }
    // orthonormal basis e1 = a/|a|, e2 ∝ b − ⟨e1|b⟩e1
    let b1 = fock::overlap(a, b)? / na2.sqrt();
    let b2 = (b.norm_sqr() - b1.norm_sqr()).max(0.0).sqrt();
    let m11 = na2 - b1.norm_sqr();
    let m22 = -b2 * b2;
    let m12 = b1.norm() * b2;
    let mean = 0.5 * (m11 + m22);
    let radius = (0.25 * (m11 - m22).powi(2) + m12 * m12).sqrt();
    let trace_norm = (mean + radius).abs() + (mean - radius).abs();
    Ok((trace_norm / total).min(1.0))
}

/// State just before BS II for a fixed inter-cell phase; exposes the
/// which-path record for duality checks.
pub fn state_before_recombination(
    config: &ArmConfig,
    probe: &ProbeSpec,
    delta: f64,
) -> Result<PathState> {
    config.validate()?;
    evolve_to_bs2(config, &probe.state()?, delta)
}

/// Runs the full pipeline for a fixed inter-cell phase.
pub fn run_fixed(config: &ArmConfig, probe: &ProbeSpec, delta: f64) -> Result<SimResult> {
    config.validate()?;
    ensure_finite("inter_cell_phase", delta)?;
    let probe_state = probe.state()?;
    run_with_state(config, &probe_state, delta)
}

fn run_with_state(config: &ArmConfig, probe: &FockVector, delta: f64) -> Result<SimResult> {
    let before = evolve_to_bs2(config, probe, delta)?;
    let overlap = probe_overlap(config, probe)?;
    let out = bs_transform(&before, config.bs2_reflectivity)?;
    let [n4, n5] = out.probabilities();
    Ok(SimResult {
        n4_expectation: n4,
        n5_expectation: n5,
        joint_state_norm: out.norm_sqr(),
        probe_conditional_overlap: overlap,
    })
}

/// One cell on arm 3 only.
pub fn run_single_cell(config: &ArmConfig, probe: &ProbeSpec) -> Result<SimResult> {
    if config.cell_arm3.is_none() || config.cell_arm2.is_some() {
        return Err(Error::invalid(
            "cells",
            "single-cell run needs a cell on arm 3 and none on arm 2",
        ));
    }
    run_fixed(config, probe, 0.0)
}

/// Cells on both arms with a random relative phase between them, averaged
/// over `phase` by Gauss–Legendre quadrature of order `nodes`.
pub fn run_double_cell(
    config: &ArmConfig,
    probe: &ProbeSpec,
    phase: &PhaseDistribution,
) -> Result<SimResult> {
    run_double_cell_with_nodes(config, probe, phase, DEFAULT_NODES)
}

pub fn run_double_cell_with_nodes(
    config: &ArmConfig,
    probe: &ProbeSpec,
    phase: &PhaseDistribution,
    nodes: usize,
) -> Result<SimResult> {
    if config.cell_arm3.is_none() || config.cell_arm2.is_none() {
        return Err(Error::invalid(
            "cells",
            "double-cell run needs a cell on each arm",
        ));
    }
    config.validate()?;
    phase.validate()?;
    let rule = GaussLegendre::new(nodes)?;
    let probe_state = probe.state()?;
    ensemble_run(config, &probe_state, phase, &rule)
}

fn ensemble_run(
    config: &ArmConfig,
    probe: &FockVector,
    phase: &PhaseDistribution,
    rule: &GaussLegendre,
) -> Result<SimResult> {
    let mut failure = None;
    let mut sample = |delta: f64| match run_with_state(config, probe, delta) {
        Ok(r) => r,
        Err(e) => {
            failure.get_or_insert(e);
            SimResult {
                n4_expectation: f64::NAN,
                n5_expectation: f64::NAN,
                joint_state_norm: f64::NAN,
                probe_conditional_overlap: Complex64::new(f64::NAN, 0.0),
            }
        }
    };
    let n4 = phase.expectation(rule, |d| sample(d).n4_expectation);
    let n5 = phase.expectation(rule, |d| sample(d).n5_expectation);
    let norm = phase.expectation(rule, |d| sample(d).joint_state_norm);
    // arm-2 phase exp(-iδ) multiplies ⟨arm2|arm3⟩ by exp(+iδ)
    let re = phase.expectation(rule, f64::cos);
    let im = phase.expectation(rule, f64::sin);
    let overlap = probe_overlap(config, probe)? * Complex64::new(re, im);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(SimResult {
        n4_expectation: n4,
        n5_expectation: n5,
        joint_state_norm: norm,
        probe_conditional_overlap: overlap,
    })
}

/// `(Θ, ⟨n₄⟩)` over a grid of interferometer phases; points are evaluated
/// in parallel and returned in grid order.
pub fn fringe_scan(
    config: &ArmConfig,
    probe: &ProbeSpec,
    phase: &PhaseDistribution,
    theta_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if theta_grid.is_empty() {
        return Err(Error::invalid("theta_grid", "must not be empty"));
    }
    config.validate()?;
    phase.validate()?;
    let probe_state = probe.state()?;
    let rule = GaussLegendre::new(DEFAULT_NODES)?;
    theta_grid
        .par_iter()
        .map(|&theta| {
            let cfg = config.with_theta(theta);
            let r = match phase {
                PhaseDistribution::Fixed(d) => run_with_state(&cfg, &probe_state, *d)?,
                _ => ensemble_run(&cfg, &probe_state, phase, &rule)?,
            };
            Ok((theta, r.n4_expectation))
        })
        .collect()
}

/// Sinusoid fitted to fringe data, `n₄(Θ) = mean − amplitude·cos(Θ + offset)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub mean: f64,
    pub amplitude: f64,
    /// Fringe phase offset; equals `φ₀ + |ν|² sin 2χT` for the single cell.
    pub phase_offset: f64,
    /// `amplitude / mean`, i.e. (max − min)/(max + min) of the fitted fringe.
    pub visibility: f64,
}

/// Least-squares fit of `a + b cos Θ + c sin Θ`.
///
/// Exact for data that is a pure first harmonic, which every fringe in this
/// crate is; grid sampling does not bias the extracted visibility.
pub fn fit_fringe(points: &[(f64, f64)]) -> Result<FringeFit> {
    if points.is_empty() {
        return Err(Error::invalid("fringe", "no data points"));
    }
    // normal equations, basis (1, cos, sin)
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(theta, y) in points {
        let f = [1.0, theta.cos(), theta.sin()];
        for i in 0..3 {
            rhs[i] += f[i] * y;
            for j in 0..3 {
                m[i][j] += f[i] * f[j];
            }
        }
    }
    let [a, b, c] =
        solve3(m, rhs).ok_or(Error::DegenerateFit("grid does not resolve a sinusoid"))?;
    let amplitude = b.hypot(c);
    let visibility = if a > 0.0 { amplitude / a } else { 0.0 };
    Ok(FringeFit {
        mean: a,
        amplitude,
        phase_offset: c.atan2(-b),
        visibility,
    })
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    let scale: f64 = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if d.abs() <= 1e-12 * scale.powi(3) {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = r[i];
        }
        *slot = det(&mk) / d;
    }
    Some(out)
}

/// Raw contrast `(max − min)/(max + min)` of sampled fringe values.
pub fn minmax_visibility(points: &[(f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::invalid("fringe", "no data points"));
    }
    let max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if max + min <= 0.0 {
        return Ok(0.0);
    }
    Ok((max - min) / (max + min))
}

/// `n` equally spaced phases covering `[0, 2π)`.
pub fn uniform_theta_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{self, FringeParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_beamsplitter_amplitudes() {
        let s = bs_transform(&PathState::input(FockVector::vacuum(0)), 0.5).unwrap();
        assert_abs_diff_eq!(s.arm(Arm::Two).amps()[0].re, FRAC_1_SQRT_2, epsilon = 1e-16);
        assert_abs_diff_eq!(
            s.arm(Arm::Three).amps()[0].im,
            FRAC_1_SQRT_2,
            epsilon = 1e-16
        );
        assert_eq!(s.arm(Arm::Two).amps()[0].im, 0.0);
        assert_eq!(s.arm(Arm::Three).amps()[0].re, 0.0);
    }

    #[test]
    fn zero_reflectivity_is_identity() {
        let input = PathState::input(fock::coherent_state(c(0.5, 0.1), 30).unwrap());
        assert_eq!(bs_transform(&input, 0.0).unwrap(), input);
        assert!(bs_transform(&input, 1.5).is_err());
    }

    #[test]
    fn two_balanced_beamsplitters_route_to_port_five() {
        let input = PathState::input(FockVector::vacuum(2));
        let out = bs_transform(&bs_transform(&input, 0.5).unwrap(), 0.5).unwrap();
        let [p4, p5] = out.probabilities();
        assert_abs_diff_eq!(p4, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(p5, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn kerr_without_coupling_is_identity() {
        let probe = fock::coherent_state(c(1.0, 0.0), 40).unwrap();
        let s = bs_transform(&PathState::input(probe), 0.5).unwrap();
        assert_eq!(
            kerr_evolve(&s, Arm::Three, &KerrCellSpec::new(0.0)).unwrap(),
            s
        );
    }

    #[test]
    fn kerr_rotates_probe_on_occupied_arm() {
        let nu = c(1.2, 0.3);
        let chi_t = 0.35;
        let n_max = fock::truncation_bound(nu.norm());
        let probe = fock::coherent_state(nu, n_max).unwrap();
        // photon sits in arm 3 when it enters through port 0
        let s = bs_transform(&PathState::input(probe.clone()), 0.0).unwrap();
        let s = PathState {
            branches: [s.branches[1].clone(), s.branches[0].clone()],
        };
        let out = kerr_evolve(&s, Arm::Three, &KerrCellSpec::new(chi_t)).unwrap();
        let expected =
            fock::coherent_state(nu * Complex64::from_polar(1.0, -2.0 * chi_t), n_max).unwrap();
        assert!(out.arm(Arm::Three).max_abs_diff(&expected).unwrap() < 1e-12);
        assert_eq!(out.arm(Arm::Two).norm_sqr(), 0.0);
    }

    #[test]
    fn superposed_photon_entangles_probe_branches() {
        let nu = c(1.0, 0.0);
        let chi_t = 0.4;
        let probe = ProbeSpec::new(nu);
        let cfg = ArmConfig::single_cell(KerrCellSpec::new(chi_t), 0.0);
        let s = state_before_recombination(&cfg, &probe, 0.0).unwrap();
        let ov = conditional_probe_overlap(&s).unwrap();
        assert_abs_diff_eq!(
            ov.norm(),
            analytic::visibility(nu, &KerrCellSpec::new(chi_t)),
            epsilon = 1e-12
        );
        assert!(ov.norm() < 1.0);
    }

    #[test]
    fn dark_and_bright_fringes_without_probe() {
        let probe = ProbeSpec::new(c(0.0, 0.0));
        let cfg = ArmConfig::single_cell(KerrCellSpec::new(0.5), PI);
        let r = run_single_cell(&cfg, &probe).unwrap();
        assert_abs_diff_eq!(r.n4_expectation, 1.0, epsilon = 1e-15);
        let r = run_single_cell(&cfg.with_theta(0.0), &probe).unwrap();
        assert_abs_diff_eq!(r.n4_expectation, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn strong_probe_suppresses_interference() {
        let probe = ProbeSpec::new(c(5.0, 0.0));
        for k in 0..8 {
            let cfg = ArmConfig::single_cell(KerrCellSpec::new(FRAC_PI_2), k as f64 * 0.8);
            let r = run_single_cell(&cfg, &probe).unwrap();
            assert_abs_diff_eq!(r.n4_expectation, 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn fringe_shift_sign_is_pinned() {
        let nu = c(1.5, 0.0);
        let cell = KerrCellSpec::new(0.3);
        let pts = fringe_scan(
            &ArmConfig::single_cell(cell, 0.0),
            &ProbeSpec::new(nu),
            &PhaseDistribution::Fixed(0.0),
            &uniform_theta_grid(360),
        )
        .unwrap();
        let fit = fit_fringe(&pts).unwrap();
        assert_abs_diff_eq!(
            fit.phase_offset,
            analytic::probe_phase_shift(nu, &cell),
            epsilon = 1e-10
        );
        assert!(fit.phase_offset > 0.0);
        assert_abs_diff_eq!(
            fit.visibility,
            analytic::visibility(nu, &cell),
            epsilon = 1e-10
        );
    }

    #[test]
    fn signal_self_kerr_maps_to_phi0() {
        let nu = c(0.8, -0.2);
        let cell = KerrCellSpec::new(0.6).with_self_kerr(0.9, 0.0);
        for k in 0..16 {
            let theta = k as f64 * 0.4;
            let r =
                run_single_cell(&ArmConfig::single_cell(cell, theta), &ProbeSpec::new(nu)).unwrap();
            let p = FringeParams::new(nu, cell, theta).with_phi0(cell.signal_self_phase());
            assert_abs_diff_eq!(
                r.n4_expectation,
                analytic::n4_single_cell(&p),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn probe_self_kerr_leaves_single_cell_fringe_unchanged() {
        let nu = c(1.1, 0.0);
        let plain = KerrCellSpec::new(0.45);
        let kerr = plain.with_self_kerr(0.0, 0.7);
        for k in 0..10 {
            let theta = k as f64 * 0.6;
            let a = run_single_cell(&ArmConfig::single_cell(plain, theta), &ProbeSpec::new(nu))
                .unwrap();
            let b =
                run_single_cell(&ArmConfig::single_cell(kerr, theta), &ProbeSpec::new(nu)).unwrap();
            assert_abs_diff_eq!(a.n4_expectation, b.n4_expectation, epsilon = 1e-12);
        }
    }

    #[test]
    fn equal_cells_restore_full_fringe() {
        let cell = KerrCellSpec::new(0.9).with_self_kerr(0.4, 0.0);
        let probe = ProbeSpec::new(c(3.0, 1.0));
        for k in 0..12 {
            let theta = k as f64 * 0.5;
            let r = run_double_cell(
                &ArmConfig::double_cell(cell, 1.0, theta),
                &probe,
                &PhaseDistribution::Fixed(0.0),
            )
            .unwrap();
            assert_abs_diff_eq!(r.n4_expectation, 0.5 * (1.0 - theta.cos()), epsilon = 1e-10);
        }
    }

    #[test]
    fn absent_second_cell_reduces_to_single() {
        let cell = KerrCellSpec::new(0.7);
        let probe = ProbeSpec::new(c(1.3, 0.0));
        for k in 0..10 {
            let theta = k as f64 * 0.7;
            let d = run_double_cell(
                &ArmConfig::double_cell(cell, 0.0, theta),
                &probe,
                &PhaseDistribution::Fixed(0.0),
            )
            .unwrap();
            let s = run_single_cell(&ArmConfig::single_cell(cell, theta), &probe).unwrap();
            assert_abs_diff_eq!(d.n4_expectation, s.n4_expectation, epsilon = 1e-14);
        }
    }

    #[test]
    fn half_interaction_time_matches_closed_form() {
        let nu = c(1.7, 0.0);
        let cell = KerrCellSpec::new(0.8);
        for k in 0..10 {
            let theta = k as f64 * 0.65;
            let d = run_double_cell(
                &ArmConfig::double_cell(cell, 0.5, theta),
                &ProbeSpec::new(nu),
                &PhaseDistribution::Fixed(0.0),
            )
            .unwrap();
            let p = FringeParams::new(nu, cell, theta);
            assert_abs_diff_eq!(
                d.n4_expectation,
                analytic::n4_double_cell(&p, 0.5),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn uniform_inter_cell_phase_flattens_fringe() {
        let cell = KerrCellSpec::new(0.3);
        for k in 0..8 {
            let r = run_double_cell(
                &ArmConfig::double_cell(cell, 1.0, k as f64 * 0.8),
                &ProbeSpec::new(c(1.0, 0.0)),
                &PhaseDistribution::Uniform,
            )
            .unwrap();
            assert_abs_diff_eq!(r.n4_expectation, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(r.n4_expectation + r.n5_expectation, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unbalanced_beamsplitters_conserve_the_photon() {
        let mut cfg = ArmConfig::single_cell(KerrCellSpec::new(0.4), 1.0);
        cfg.bs1_reflectivity = 0.3;
        cfg.bs2_reflectivity = 0.8;
        let r = run_single_cell(&cfg, &ProbeSpec::new(c(1.0, 0.5))).unwrap();
        assert_abs_diff_eq!(r.n4_expectation + r.n5_expectation, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.joint_state_norm, 1.0, epsilon = 1e-12);
        cfg.bs1_reflectivity = 1.0;
        assert!(run_single_cell(&cfg, &ProbeSpec::new(c(1.0, 0.5))).is_err());
    }

    #[test]
    fn distinguishability_of_pure_branches() {
        let nu = c(1.0, 0.0);
        let cell = KerrCellSpec::new(0.5);
        let s = state_before_recombination(
            &ArmConfig::single_cell(cell, 0.0),
            &ProbeSpec::new(nu),
            0.0,
        )
        .unwrap();
        let d = which_path_distinguishability(&s).unwrap();
        assert_abs_diff_eq!(d, analytic::distinguishability(nu, &cell), epsilon = 1e-12);
        // no probe: nothing distinguishes the paths
        let s = state_before_recombination(
            &ArmConfig::single_cell(cell, 0.0),
            &ProbeSpec::new(c(0.0, 0.0)),
            0.0,
        )
        .unwrap();
        assert_abs_diff_eq!(
            which_path_distinguishability(&s).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fringe_extraction_edge_cases() {
        assert!(fringe_scan(
            &ArmConfig::single_cell(KerrCellSpec::new(0.1), 0.0),
            &ProbeSpec::new(c(0.0, 0.0)),
            &PhaseDistribution::Fixed(0.0),
            &[],
        )
        .is_err());
        let flat: Vec<(f64, f64)> = uniform_theta_grid(720)
            .into_iter()
            .map(|t| (t, 0.5))
            .collect();
        assert_abs_diff_eq!(fit_fringe(&flat).unwrap().visibility, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(minmax_visibility(&flat).unwrap(), 0.0, epsilon = 1e-10);
        assert!(fit_fringe(&[(0.3, 0.2), (0.3, 0.4)]).is_err());
        let pts = fringe_scan(
            &ArmConfig::single_cell(KerrCellSpec::new(0.1), 0.0),
            &ProbeSpec::new(c(0.0, 0.0)),
            &PhaseDistribution::Fixed(0.0),
            &uniform_theta_grid(720),
        )
        .unwrap();
        assert_abs_diff_eq!(fit_fringe(&pts).unwrap().visibility, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(minmax_visibility(&pts).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn joint_view_matches_branches() {
        let s = state_before_recombination(
            &ArmConfig::single_cell(KerrCellSpec::new(0.2), 0.3),
            &ProbeSpec::new(c(0.6, 0.0)),
            0.0,
        )
        .unwrap();
        let j = s.to_joint();
        assert_abs_diff_eq!(
            j.partial_trace_probability(0, 0).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            j.partial_trace_probability(0, 1).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn truncation_violation_surfaces() {
        let probe = ProbeSpec::new(c(3.0, 0.0)).with_n_max(5);
        let cfg = ArmConfig::single_cell(KerrCellSpec::new(0.2), 0.0);
        assert!(matches!(
            run_single_cell(&cfg, &probe),
            Err(Error::TruncationExceeded { .. })
        ));
    }
}
