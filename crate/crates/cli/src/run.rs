//! Mode drivers: validated spec in, table out.

use rayon::prelude::*;

use qnd_core::analytic::{self, FringeParams, KerrCellSpec};
use qnd_core::bell::{self, CHSReport, PolarizerAngles};
use qnd_core::coherence::{self, CoherenceSpec, Lineshape};
use qnd_core::ensemble::PhaseDistribution;
use qnd_core::fock;
use qnd_core::interferometer::{self, ArmConfig, ProbeSpec};
use qnd_core::Complex64;

use crate::config::{validate, Diagnostic, Mode, RunSpec};
use crate::table::OutputTable;

pub const GENERATOR: &str = concat!("qnd-cli ", env!("CARGO_PKG_VERSION"));

/// Points used to fit the simulated fringe in duality mode.
const DUALITY_FIT_POINTS: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid run spec: {}", join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("numeric failure: {0}")]
    Numeric(#[from] qnd_core::Error),
}

fn join(d: &[Diagnostic]) -> String {
    d.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl RunError {
    /// 2 for specs rejected before any computation, 3 for numeric failures
    /// such as an exceeded truncation bound.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => 2,
            RunError::Numeric(_) => 3,
        }
    }
}

type Rows = Vec<Vec<f64>>;

/// Validates, resolves defaults and runs the spec. Output depends only on
/// the spec: grids and quadrature are fixed and rows keep sweep order.
pub fn run(spec: &RunSpec) -> Result<OutputTable, RunError> {
    let diagnostics = validate(spec);
    if !diagnostics.is_empty() {
        return Err(RunError::Invalid(diagnostics));
    }
    let spec = spec.resolved();
    let mode = spec.mode().expect("validated spec has a known mode");
    let (columns, rows, meta) = match mode {
        Mode::Fringe => fringe(&spec)?,
        Mode::Duality => duality(&spec)?,
        Mode::DoubleCell => double_cell(&spec)?,
        Mode::CoherenceSweep => coherence_sweep(&spec)?,
        Mode::Bell => bell_point(&spec)?,
        Mode::ChsSweep => chs_sweep(&spec)?,
    };
    let mut metadata = spec.to_toml_string();
    metadata.push_str("\n[meta]\n");
    metadata.push_str(&format!("generator = \"{GENERATOR}\"\n"));
    for (key, value) in meta {
        metadata.push_str(&format!("{key} = {value}\n"));
    }
    let mut table = OutputTable::new(metadata, columns.iter().map(|c| c.to_string()).collect());
    for row in rows {
        table.push_row(row);
    }
    Ok(table)
}

type ModeOutput = (Vec<&'static str>, Rows, Vec<(&'static str, String)>);

fn nu(spec: &RunSpec) -> Complex64 {
    Complex64::new(spec.nu_re.unwrap_or(0.0), spec.nu_im.unwrap_or(0.0))
}

fn cell(spec: &RunSpec) -> KerrCellSpec {
    KerrCellSpec::new(spec.chi_t.unwrap_or(0.0))
        .with_self_kerr(spec.chi_s_t.unwrap_or(0.0), spec.chi_p_t.unwrap_or(0.0))
}

/// Probe with its cutoff; builds the state once so truncation failures
/// surface before any sweep starts.
fn probe(spec: &RunSpec) -> Result<ProbeSpec, RunError> {
    let mut p = ProbeSpec::new(nu(spec));
    if let Some(n) = spec.n_max {
        p = p.with_n_max(n);
    }
    p.state()?;
    Ok(p)
}

fn lineshape(spec: &RunSpec) -> Lineshape {
    spec.lineshape
        .as_deref()
        .map(|s| s.parse().expect("validated lineshape"))
        .unwrap_or_default()
}

fn grid(g: &Option<crate::config::Grid>) -> Vec<f64> {
    g.as_ref().map(|g| g.values()).unwrap_or_default()
}

fn fringe(spec: &RunSpec) -> Result<ModeOutput, RunError> {
    let probe = probe(spec)?;
    let cell = cell(spec);
    let config = ArmConfig::single_cell(cell, 0.0);
    let rows = grid(&spec.theta_grid)
        .par_iter()
        .map(|&theta| {
            let r = interferometer::run_single_cell(&config.with_theta(theta), &probe)?;
            let p = FringeParams::new(probe.nu, cell, theta).with_phi0(cell.signal_self_phase());
            Ok(vec![
                theta,
                r.n4_expectation,
                r.n5_expectation,
                analytic::n4_single_cell(&p),
            ])
        })
        .collect::<Result<Rows, qnd_core::Error>>()?;
    Ok((
        vec!["theta", "n4_sim", "n5_sim", "n4_closed_form"],
        rows,
        vec![("n_max", probe.resolved_n_max().to_string())],
    ))
}

fn duality(spec: &RunSpec) -> Result<ModeOutput, RunError> {
    let cell = cell(spec);
    let config = ArmConfig::single_cell(cell, 0.0);
    let fit_grid = interferometer::uniform_theta_grid(DUALITY_FIT_POINTS);
    let nus = grid(&spec.nu_grid);
    let rows = nus
        .par_iter()
        .map(|&a| {
            let nu = Complex64::new(a, 0.0);
            let probe = ProbeSpec::new(nu);
            let v = analytic::visibility(nu, &cell);
            let d = analytic::distinguishability(nu, &cell);
            let pts = interferometer::fringe_scan(
                &config,
                &probe,
                &PhaseDistribution::Fixed(0.0),
                &fit_grid,
            )?;
            let v_sim = interferometer::fit_fringe(&pts)?.visibility;
            let before = interferometer::state_before_recombination(&config, &probe, 0.0)?;
            let d_sim = interferometer::which_path_distinguishability(&before)?;
            Ok(vec![
                a,
                analytic::homodyne_snr(nu, &cell),
                v,
                d,
                d * d + v * v,
                v_sim,
                d_sim,
                d_sim * d_sim + v_sim * v_sim,
            ])
        })
        .collect::<Result<Rows, qnd_core::Error>>()?;
    let n_max = nus
        .iter()
        .map(|&a| fock::truncation_bound(a))
        .max()
        .unwrap_or(0);
    Ok((
        vec![
            "nu_abs",
            "snr",
            "visibility",
            "distinguishability",
            "d2_plus_v2",
            "visibility_sim",
            "distinguishability_sim",
            "d2_plus_v2_sim",
        ],
        rows,
        vec![("n_max", n_max.to_string())],
    ))
}

fn coherence_spec(spec: &RunSpec, l_coh: f64) -> Result<CoherenceSpec, RunError> {
    Ok(CoherenceSpec::new(
        spec.delta_x.unwrap_or(0.0),
        l_coh,
        lineshape(spec),
    )?)
}

fn double_cell(spec: &RunSpec) -> Result<ModeOutput, RunError> {
    let probe = probe(spec)?;
    let cell = cell(spec);
    let ratio = spec.t_prime_ratio.unwrap_or(1.0);
    let nodes = spec
        .quadrature_nodes
        .unwrap_or(qnd_core::ensemble::DEFAULT_NODES);
    let (phase, gamma) = match spec.l_coh {
        Some(l) => {
            let cs = coherence_spec(spec, l)?;
            (cs.phase_distribution()?, coherence::coherence_factor(&cs)?)
        }
        None => (PhaseDistribution::Fixed(0.0), 1.0),
    };
    let rows = grid(&spec.theta_grid)
        .par_iter()
        .map(|&theta| {
            let config = ArmConfig::double_cell(cell, ratio, theta);
            let r = interferometer::run_double_cell_with_nodes(&config, &probe, &phase, nodes)?;
            let p = FringeParams::new(probe.nu, cell, theta).with_phi0(cell.signal_self_phase());
            let closed = coherence::apply_dephasing(analytic::n4_double_cell(&p, ratio), gamma)?;
            Ok(vec![theta, r.n4_expectation, r.n5_expectation, closed])
        })
        .collect::<Result<Rows, qnd_core::Error>>()?;
    Ok((
        vec!["theta", "n4_sim", "n5_sim", "n4_closed_form"],
        rows,
        vec![
            ("n_max", probe.resolved_n_max().to_string()),
            ("gamma", toml_float(gamma)),
        ],
    ))
}

fn coherence_sweep(spec: &RunSpec) -> Result<ModeOutput, RunError> {
    let probe = probe(spec)?;
    let cell = cell(spec);
    let ratio = spec.t_prime_ratio.unwrap_or(1.0);
    let nodes = spec
        .quadrature_nodes
        .unwrap_or(qnd_core::ensemble::DEFAULT_NODES);
    let thetas = grid(&spec.theta_grid);
    let base_visibility = analytic::visibility(probe.nu, &cell.scaled(1.0 - ratio));
    let rows = grid(&spec.l_coh_grid)
        .par_iter()
        .map(|&l| {
            let cs = coherence_spec(spec, l)?;
            let gamma = coherence::coherence_factor(&cs)?;
            let phase = cs.phase_distribution()?;
            let pts = thetas
                .iter()
                .map(|&theta| {
                    let config = ArmConfig::double_cell(cell, ratio, theta);
                    interferometer::run_double_cell_with_nodes(&config, &probe, &phase, nodes)
                        .map(|r| (theta, r.n4_expectation))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let v_sim = interferometer::fit_fringe(&pts)?.visibility;
            Ok(vec![l, gamma, gamma * base_visibility, v_sim])
        })
        .collect::<Result<Rows, RunError>>()?;
    Ok((
        vec!["l_coh", "gamma", "visibility_closed_form", "visibility_sim"],
        rows,
        vec![("n_max", probe.resolved_n_max().to_string())],
    ))
}

fn angles_row(r: &CHSReport) -> [f64; 4] {
    r.angles.as_array()
}

fn bell_point(spec: &RunSpec) -> Result<ModeOutput, RunError> {
    let mut meta = Vec::new();
    let (phi, state) = match spec.phi {
        Some(phi) => (phi, None),
        None => {
            let probe = probe(spec)?;
            let cell = KerrCellSpec::new(spec.chi_t.unwrap_or(0.0));
            let phi_extra = spec.phi_extra.unwrap_or(0.0);
            let state = bell::kerr_tag(&bell::entangled_state(&probe.state()?), &cell, phi_extra)?;
            meta.push(("n_max", probe.resolved_n_max().to_string()));
            meta.push(("phi_state", toml_float(bell::state_phi_factor(&state)?)));
            (
                analytic::phi_factor(probe.nu, &cell, phi_extra),
                Some(state),
            )
        }
    };
    let report = match spec.angles {
        Some([a, b, c, d]) => bell::chs_sum(&PolarizerAngles::new(a, b, c, d), phi),
        None if spec.fixed_angles == Some(true) => bell::fixed_angle_chs(phi),
        None => bell::maximize_chs(phi)?,
    };
    let chs_state = match &state {
        Some(s) => bell::chs_sum_from_state(s, &report.angles)?.chs,
        None => f64::NAN,
    };
    let mut row = vec![
        phi,
        report.chs,
        report.p11,
        report.p12p,
        report.p1p2,
        report.p1p2p,
        report.s1p,
        report.s2,
    ];
    row.extend(angles_row(&report));
    row.extend([bell::chs_optimum(phi), chs_state]);
    Ok((
        vec![
            "phi",
            "chs",
            "p11",
            "p12p",
            "p1p2",
            "p1p2p",
            "s1p",
            "s2",
            "theta1",
            "theta1p",
            "theta2",
            "theta2p",
            "chs_optimum",
            "chs_state",
        ],
        vec![row],
        meta,
    ))
}

fn chs_sweep(spec: &RunSpec) -> Result<ModeOutput, RunError> {
    // (l_coh, γ, Φ) per row; l_coh and γ only for coherence sweeps
    let points: Vec<(Option<(f64, f64)>, f64)> = match &spec.phi_grid {
        Some(g) => g.values().into_iter().map(|phi| (None, phi)).collect(),
        None => {
            let phi0 = spec.phi.unwrap_or(1.0);
            grid(&spec.l_coh_grid)
                .into_iter()
                .map(|l| {
                    let gamma = coherence::coherence_factor(&coherence_spec(spec, l)?)?;
                    Ok((Some((l, gamma)), gamma * phi0))
                })
                .collect::<Result<_, RunError>>()?
        }
    };
    let rows = points
        .par_iter()
        .map(|&(coh, phi)| {
            let best = bell::maximize_chs(phi)?;
            let mut row = Vec::with_capacity(9);
            if let Some((l, gamma)) = coh {
                row.extend([l, gamma]);
            }
            row.extend([
                phi,
                best.chs,
                bell::chs_optimum(phi),
                bell::fixed_angle_chs(phi).chs,
            ]);
            row.extend(angles_row(&best));
            Ok(row)
        })
        .collect::<Result<Rows, qnd_core::Error>>()?;
    let mut columns = Vec::new();
    if spec.phi_grid.is_none() {
        columns.extend(["l_coh", "gamma"]);
    }
    columns.extend([
        "phi",
        "chs_max",
        "chs_closed_form",
        "chs_fixed_angle",
        "theta1",
        "theta1p",
        "theta2",
        "theta2p",
    ]);
    Ok((columns, rows, Vec::new()))
}

/// TOML float literal, including the non-finite spellings.
fn toml_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        toml::Value::Float(x).to_string()
    }
}
