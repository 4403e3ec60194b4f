use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qnd_cli::config::{parse_angles, Grid, Mode, RunSpec};
use qnd_cli::run;

#[derive(Parser)]
#[command(
    name = "qnd",
    version,
    about = "Sweeps for the Kerr which-path interferometer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-cell fringe over a Θ grid.
    Fringe(Opts),
    /// Visibility and distinguishability against |ν|.
    Duality(Opts),
    /// Two cells, optionally with a finite probe coherence length.
    DoubleCell(Opts),
    /// Double-cell visibility against coherence length.
    CoherenceSweep(Opts),
    /// One Clauser-Horne evaluation.
    Bell(Opts),
    /// Maximized Clauser-Horne sum against Φ or coherence length.
    ChsSweep(Opts),
}

impl Command {
    fn split(self) -> (Mode, Opts) {
        match self {
            Command::Fringe(o) => (Mode::Fringe, o),
            Command::Duality(o) => (Mode::Duality, o),
            Command::DoubleCell(o) => (Mode::DoubleCell, o),
            Command::CoherenceSweep(o) => (Mode::CoherenceSweep, o),
            Command::Bell(o) => (Mode::Bell, o),
            Command::ChsSweep(o) => (Mode::ChsSweep, o),
        }
    }
}

#[derive(Args)]
struct Opts {
    /// TOML run spec, or a table written by an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// No progress line on stderr.
    #[arg(long)]
    quiet: bool,

    /// Real probe amplitude |ν| (sets nu_im = 0).
    #[arg(long, conflicts_with_all = ["nu_re", "nu_im"])]
    nu_abs: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu_im: Option<f64>,
    /// Cross-Kerr phase χT.
    #[arg(long, allow_hyphen_values = true)]
    chi_t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    chi_s_t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    chi_p_t: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    /// `start:stop:points` or `v1,v2,...`.
    #[arg(long, allow_hyphen_values = true)]
    theta_grid: Option<Grid>,
    #[arg(long, allow_hyphen_values = true)]
    nu_grid: Option<Grid>,
    #[arg(long, allow_hyphen_values = true)]
    l_coh_grid: Option<Grid>,
    #[arg(long, allow_hyphen_values = true)]
    phi_grid: Option<Grid>,
    #[arg(long, allow_hyphen_values = true)]
    t_prime_ratio: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    l_coh: Option<f64>,
    /// `lorentzian` or `gaussian`.
    #[arg(long)]
    lineshape: Option<String>,
    #[arg(long)]
    quadrature_nodes: Option<usize>,
    /// Bell: Φ itself. chs-sweep: Φ₀ scaled by the coherence factor.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi_extra: Option<f64>,
    /// `θ₁,θ₁′,θ₂,θ₂′` in radians.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angles)]
    angles: Option<[f64; 4]>,
    /// Keep the polarizers at the Φ = 1 optimum instead of re-optimizing.
    #[arg(long)]
    fixed_angles: bool,
}

impl Opts {
    fn apply(&self, spec: &mut RunSpec) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { spec.$field = Some(v.clone()); })*
            };
        }
        set!(
            nu_re,
            nu_im,
            chi_t,
            chi_s_t,
            chi_p_t,
            n_max,
            theta_grid,
            nu_grid,
            l_coh_grid,
            phi_grid,
            t_prime_ratio,
            delta_x,
            l_coh,
            lineshape,
            quadrature_nodes,
            phi,
            phi_extra,
            angles
        );
        if let Some(a) = self.nu_abs {
            spec.nu_re = Some(a);
            spec.nu_im = Some(0.0);
        }
        if self.fixed_angles {
            spec.fixed_angles = Some(true);
        }
    }
}

fn main() -> ExitCode {
    let (mode, opts) = Cli::parse().command.split();
    match execute(mode, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("qnd: {msg}");
            ExitCode::from(code)
        }
    }
}

fn execute(mode: Mode, opts: &Opts) -> Result<(), (u8, String)> {
    let mut spec = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| (1, format!("cannot read {}: {e}", path.display())))?;
            RunSpec::from_config_text(&text).map_err(|e| (2, format!("{}: {e}", path.display())))?
        }
        None => RunSpec::default(),
    };
    match spec.mode.as_deref() {
        Some(m) if m != mode.name() => {
            return Err((
                2,
                format!("mode `{m}` in config conflicts with subcommand `{mode}`"),
            ));
        }
        _ => spec.mode = Some(mode.name().to_owned()),
    }
    opts.apply(&mut spec);
    let out = opts
        .out
        .clone()
        .or_else(|| spec.out.as_ref().map(PathBuf::from));

    let table = run(&spec).map_err(|e| {
        let code = e.exit_code() as u8;
        match e {
            qnd_cli::RunError::Invalid(diags) => (
                code,
                diags
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("\nqnd: "),
            ),
            other => (code, other.to_string()),
        }
    })?;
    let csv = table.to_csv();
    match &out {
        Some(path) => {
            std::fs::write(path, csv)
                .map_err(|e| (1, format!("cannot write {}: {e}", path.display())))?;
            if !opts.quiet {
                eprintln!(
                    "qnd: {} rows written to {}",
                    table.rows.len(),
                    path.display()
                );
            }
        }
        None => print!("{csv}"),
    }
    Ok(())
}
