//! Run specifications: TOML parsing, flag overrides, validation and
//! default resolution.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::table::{split_metadata, METADATA_MARKER};

/// Largest probe amplitude accepted; the cutoff grows as `|ν|² + 10|ν|`.
pub const MAX_NU_ABS: f64 = 50.0;
pub const MAX_GRID_POINTS: usize = 1_000_000;
pub const MAX_N_MAX: usize = 100_000;
pub const MAX_QUADRATURE_NODES: usize = 1024;
pub const DEFAULT_FIT_POINTS: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Fringe,
    Duality,
    DoubleCell,
    CoherenceSweep,
    Bell,
    ChsSweep,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Fringe,
        Mode::Duality,
        Mode::DoubleCell,
        Mode::CoherenceSweep,
        Mode::Bell,
        Mode::ChsSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Fringe => "fringe",
            Mode::Duality => "duality",
            Mode::DoubleCell => "double-cell",
            Mode::CoherenceSweep => "coherence-sweep",
            Mode::Bell => "bell",
            Mode::ChsSweep => "chs-sweep",
        }
    }

    /// Keys a spec for this mode may set.
    fn allowed(self) -> &'static [&'static str] {
        match self {
            Mode::Fringe => &[
                "nu_re",
                "nu_im",
                "chi_t",
                "chi_s_t",
                "chi_p_t",
                "n_max",
                "theta_grid",
            ],
            Mode::Duality => &["nu_grid", "chi_t", "chi_s_t", "chi_p_t"],
            Mode::DoubleCell => &[
                "nu_re",
                "nu_im",
                "chi_t",
                "chi_s_t",
                "chi_p_t",
                "n_max",
                "theta_grid",
                "t_prime_ratio",
                "delta_x",
                "l_coh",
                "lineshape",
                "quadrature_nodes",
            ],
            Mode::CoherenceSweep => &[
                "nu_re",
                "nu_im",
                "chi_t",
                "chi_s_t",
                "chi_p_t",
                "n_max",
                "theta_grid",
                "t_prime_ratio",
                "delta_x",
                "l_coh_grid",
                "lineshape",
                "quadrature_nodes",
            ],
            Mode::Bell => &[
                "nu_re",
                "nu_im",
                "chi_t",
                "n_max",
                "phi",
                "phi_extra",
                "angles",
                "fixed_angles",
            ],
            Mode::ChsSweep => &["phi_grid", "phi", "l_coh_grid", "delta_x", "lineshape"],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// A sweep axis: either explicit values or `points` evenly spaced values
/// from `start` to `stop`, both ends included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl Grid {
    pub fn range(start: f64, stop: f64, points: usize) -> Self {
        Grid::Range {
            start,
            stop,
            points,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Values(v) => v.len(),
            Grid::Range { points, .. } => *points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Range {
                start,
                stop,
                points,
            } => match *points {
                0 => Vec::new(),
                1 => vec![*start],
                n => {
                    let step = (stop - start) / (n - 1) as f64;
                    (0..n)
                        .map(|k| {
                            if k == n - 1 {
                                *stop
                            } else {
                                start + step * k as f64
                            }
                        })
                        .collect()
                }
            },
        }
    }

    fn check(&self, key: &str, out: &mut Vec<Diagnostic>) {
        match self {
            Grid::Values(v) => {
                if v.is_empty() {
                    out.push(Diagnostic::new(key, "must not be empty"));
                }
                if v.len() > MAX_GRID_POINTS {
                    out.push(Diagnostic::new(
                        key,
                        format!("must have at most {MAX_GRID_POINTS} values"),
                    ));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    out.push(Diagnostic::new(key, "values must be finite"));
                }
            }
            Grid::Range {
                start,
                stop,
                points,
            } => {
                if !start.is_finite() {
                    out.push(Diagnostic::new(format!("{key}.start"), "must be finite"));
                }
                if !stop.is_finite() {
                    out.push(Diagnostic::new(format!("{key}.stop"), "must be finite"));
                }
                if *points == 0 || *points > MAX_GRID_POINTS {
                    out.push(Diagnostic::new(
                        format!("{key}.points"),
                        format!("must be in 1..={MAX_GRID_POINTS}"),
                    ));
                }
            }
        }
    }

    /// Smallest and largest value without materializing the grid.
    fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            Grid::Values(v) if !v.is_empty() => Some(
                v.iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                        (lo.min(x), hi.max(x))
                    }),
            ),
            Grid::Values(_) => None,
            Grid::Range {
                start,
                stop,
                points,
            } if *points > 0 => Some((start.min(*stop), start.max(*stop))),
            Grid::Range { .. } => None,
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    /// `start:stop:points` or a comma-separated list of values.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, points] = parts.as_slice() else {
                return Err(format!("expected `start:stop:points`, got `{s}`"));
            };
            Ok(Grid::Range {
                start: parse_f64(start)?,
                stop: parse_f64(stop)?,
                points: points
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid point count `{}`", points.trim()))?,
            })
        } else {
            parse_list(s).map(Grid::Values)
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("invalid number `{}`", s.trim()))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Err("empty list".into());
    }
    s.split(',').map(parse_f64).collect()
}

/// Parses `θ₁,θ₁′,θ₂,θ₂′` in radians.
pub fn parse_angles(s: &str) -> Result<[f64; 4], String> {
    let v = parse_list(s)?;
    <[f64; 4]>::try_from(v.as_slice())
        .map_err(|_| format!("expected 4 comma-separated angles, got {}", v.len()))
}

/// One failed constraint, naming the offending key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub key: String,
    pub constraint: String,
}

impl Diagnostic {
    pub fn new(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Diagnostic {
            key: key.into(),
            constraint: constraint.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.key, self.constraint)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("table has no metadata block")]
    MissingMetadata,
}

/// Everything a run depends on. Keys left unset take mode defaults during
/// [`RunSpec::resolved`]; `n_max` left unset is chosen from `|ν|`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_s_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_p_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// `T′/T` for the second cell.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_prime_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_coh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lineshape: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
    /// Bell: `Φ` given directly. chs-sweep: `Φ₀` scaled by `γ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_extra: Option<f64>,
    /// `[θ₁, θ₁′, θ₂, θ₂′]`, radians.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_angles: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_coh_grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_grid: Option<Grid>,
    /// Where the CLI writes the table; not part of the emitted metadata.
    #[serde(skip_serializing)]
    pub out: Option<String>,
}

impl RunSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Recovers the spec from the metadata block of an emitted table.
    pub fn from_metadata(table_text: &str) -> Result<Self, ConfigError> {
        let (body, _, _) = split_metadata(table_text).map_err(|_| ConfigError::MissingMetadata)?;
        let mut doc: toml::Table = toml::from_str(&body)?;
        doc.remove("meta");
        Ok(toml::Value::Table(doc).try_into()?)
    }

    /// Accepts either a TOML config or a previously emitted table.
    pub fn from_config_text(text: &str) -> Result<Self, ConfigError> {
        if text.starts_with(METADATA_MARKER) {
            Self::from_metadata(text)
        } else {
            Self::from_toml_str(text)
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run specs always serialize")
    }

    pub fn mode(&self) -> Option<Mode> {
        self.mode.as_deref().and_then(|m| m.parse().ok())
    }

    /// Names of the keys that are set, excluding `mode` and `out`.
    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! note {
            ($($field:ident),*) => {
                $(if self.$field.is_some() { keys.push(stringify!($field)); })*
            };
        }
        note!(
            nu_re,
            nu_im,
            chi_t,
            chi_s_t,
            chi_p_t,
            n_max,
            t_prime_ratio,
            delta_x,
            l_coh,
            lineshape,
            quadrature_nodes,
            phi,
            phi_extra,
            angles,
            fixed_angles,
            theta_grid,
            nu_grid,
            l_coh_grid,
            phi_grid
        );
        keys
    }

    /// Fills mode defaults so the emitted metadata pins every input.
    /// Call only on a spec that passed [`validate`].
    pub fn resolved(&self) -> RunSpec {
        let mut s = self.clone();
        let Some(mode) = self.mode() else {
            return s;
        };
        let uses = |k: &str| mode.allowed().contains(&k);
        for (key, slot) in [
            ("nu_re", &mut s.nu_re),
            ("nu_im", &mut s.nu_im),
            ("chi_t", &mut s.chi_t),
            ("chi_s_t", &mut s.chi_s_t),
            ("chi_p_t", &mut s.chi_p_t),
        ] {
            if uses(key) && slot.is_none() && !(mode == Mode::Bell && self.phi.is_some()) {
                *slot = Some(0.0);
            }
        }
        match mode {
            Mode::DoubleCell | Mode::CoherenceSweep => {
                s.t_prime_ratio.get_or_insert(1.0);
                s.quadrature_nodes
                    .get_or_insert(qnd_core::ensemble::DEFAULT_NODES);
                if mode == Mode::CoherenceSweep || s.l_coh.is_some() {
                    s.delta_x.get_or_insert(0.0);
                    s.lineshape.get_or_insert_with(default_lineshape);
                }
                if mode == Mode::CoherenceSweep {
                    s.theta_grid.get_or_insert(Grid::range(
                        0.0,
                        std::f64::consts::TAU,
                        DEFAULT_FIT_POINTS,
                    ));
                }
            }
            Mode::Bell => {
                if s.phi.is_none() {
                    s.phi_extra.get_or_insert(0.0);
                }
                if s.angles.is_none() {
                    s.fixed_angles.get_or_insert(false);
                }
            }
            Mode::ChsSweep => {
                if s.l_coh_grid.is_some() {
                    s.phi.get_or_insert(1.0);
                    s.lineshape.get_or_insert_with(default_lineshape);
                }
            }
            Mode::Fringe | Mode::Duality => {}
        }
        s
    }
}

fn default_lineshape() -> String {
    qnd_core::coherence::Lineshape::default().to_string()
}

fn finite(key: &str, v: Option<f64>, out: &mut Vec<Diagnostic>) {
    if let Some(x) = v {
        if !x.is_finite() {
            out.push(Diagnostic::new(key, "must be finite"));
        }
    }
}

fn required(key: &str, present: bool, mode: Mode, out: &mut Vec<Diagnostic>) {
    if !present {
        out.push(Diagnostic::new(key, format!("is required for mode {mode}")));
    }
}

/// Every violated constraint; empty iff [`crate::run::run`] would accept
/// the spec.
pub fn validate(spec: &RunSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mode = match spec.mode.as_deref() {
        None => {
            out.push(Diagnostic::new("mode", "is required"));
            None
        }
        Some(m) => match m.parse::<Mode>() {
            Ok(mode) => Some(mode),
            Err(_) => {
                let names: Vec<&str> = Mode::ALL.iter().map(|m| m.name()).collect();
                out.push(Diagnostic::new(
                    "mode",
                    format!("must be one of {}, got `{m}`", names.join(", ")),
                ));
                None
            }
        },
    };

    for (key, v) in [
        ("nu_re", spec.nu_re),
        ("nu_im", spec.nu_im),
        ("chi_t", spec.chi_t),
        ("chi_s_t", spec.chi_s_t),
        ("chi_p_t", spec.chi_p_t),
        ("phi_extra", spec.phi_extra),
    ] {
        finite(key, v, &mut out);
    }
    let nu_abs = spec.nu_re.unwrap_or(0.0).hypot(spec.nu_im.unwrap_or(0.0));
    if nu_abs > MAX_NU_ABS {
        out.push(Diagnostic::new(
            "nu",
            format!("must satisfy |nu| <= {MAX_NU_ABS}"),
        ));
    }
    if let Some(n) = spec.n_max {
        if n > MAX_N_MAX {
            out.push(Diagnostic::new("n_max", format!("must be <= {MAX_N_MAX}")));
        }
    }
    if let Some(r) = spec.t_prime_ratio {
        if !(r.is_finite() && r >= 0.0) {
            out.push(Diagnostic::new("t_prime_ratio", "must be >= 0"));
        }
    }
    if let Some(d) = spec.delta_x {
        if !(d.is_finite() && d >= 0.0) {
            out.push(Diagnostic::new("delta_x", "must be >= 0"));
        }
    }
    if let Some(l) = spec.l_coh {
        if !(l.is_finite() && l > 0.0) {
            out.push(Diagnostic::new("l_coh", "must be > 0"));
        }
    }
    if let Some(shape) = spec.lineshape.as_deref() {
        if shape.parse::<qnd_core::coherence::Lineshape>().is_err() {
            out.push(Diagnostic::new(
                "lineshape",
                format!("must be one of lorentzian, gaussian, got `{shape}`"),
            ));
        }
    }
    if let Some(n) = spec.quadrature_nodes {
        if n == 0 || n > MAX_QUADRATURE_NODES {
            out.push(Diagnostic::new(
                "quadrature_nodes",
                format!("must be in 1..={MAX_QUADRATURE_NODES}"),
            ));
        }
    }
    if let Some(p) = spec.phi {
        if !(p.is_finite() && (-1.0..=1.0).contains(&p)) {
            out.push(Diagnostic::new("phi", "must lie in [-1, 1]"));
        }
    }
    if let Some(a) = spec.angles {
        if a.iter().any(|x| !x.is_finite()) {
            out.push(Diagnostic::new("angles", "must be finite"));
        }
    }
    if let Some(g) = &spec.theta_grid {
        g.check("theta_grid", &mut out);
    }
    if let Some(g) = &spec.nu_grid {
        g.check("nu_grid", &mut out);
        if let Some((lo, hi)) = g.bounds() {
            if lo < 0.0 || hi > MAX_NU_ABS {
                out.push(Diagnostic::new(
                    "nu_grid",
                    format!("values must lie in [0, {MAX_NU_ABS}]"),
                ));
            }
        }
    }
    if let Some(g) = &spec.l_coh_grid {
        g.check("l_coh_grid", &mut out);
        if matches!(g.bounds(), Some((lo, _)) if lo <= 0.0) {
            out.push(Diagnostic::new("l_coh_grid", "values must be > 0"));
        }
    }
    if let Some(g) = &spec.phi_grid {
        g.check("phi_grid", &mut out);
        if matches!(g.bounds(), Some((lo, hi)) if lo < -1.0 || hi > 1.0) {
            out.push(Diagnostic::new("phi_grid", "values must lie in [-1, 1]"));
        }
    }

    let Some(mode) = mode else {
        return out;
    };
    for key in spec.present_keys() {
        if !mode.allowed().contains(&key) {
            out.push(Diagnostic::new(key, format!("is not used by mode {mode}")));
        }
    }
    match mode {
        Mode::Fringe => required("theta_grid", spec.theta_grid.is_some(), mode, &mut out),
        Mode::Duality => required("nu_grid", spec.nu_grid.is_some(), mode, &mut out),
        Mode::DoubleCell => {
            required("theta_grid", spec.theta_grid.is_some(), mode, &mut out);
            if spec.l_coh.is_none() {
                for (key, set) in [
                    ("delta_x", spec.delta_x.is_some()),
                    ("lineshape", spec.lineshape.is_some()),
                ] {
                    if set {
                        out.push(Diagnostic::new(key, "requires l_coh"));
                    }
                }
            }
        }
        Mode::CoherenceSweep => {
            required("l_coh_grid", spec.l_coh_grid.is_some(), mode, &mut out);
            required("delta_x", spec.delta_x.is_some(), mode, &mut out);
            if matches!(&spec.theta_grid, Some(g) if g.len() < 3) {
                out.push(Diagnostic::new(
                    "theta_grid",
                    "must have at least 3 points for mode coherence-sweep",
                ));
            }
        }
        Mode::Bell => {
            if spec.phi.is_some() {
                for (key, set) in [
                    ("nu_re", spec.nu_re.is_some()),
                    ("nu_im", spec.nu_im.is_some()),
                    ("chi_t", spec.chi_t.is_some()),
                    ("n_max", spec.n_max.is_some()),
                    ("phi_extra", spec.phi_extra.is_some()),
                ] {
                    if set {
                        out.push(Diagnostic::new(key, "conflicts with phi"));
                    }
                }
            }
            if spec.angles.is_some() && spec.fixed_angles.is_some() {
                out.push(Diagnostic::new("fixed_angles", "conflicts with angles"));
            }
        }
        Mode::ChsSweep => match (&spec.phi_grid, &spec.l_coh_grid) {
            (Some(_), Some(_)) => {
                out.push(Diagnostic::new("phi_grid", "conflicts with l_coh_grid"));
            }
            (None, None) => {
                out.push(Diagnostic::new(
                    "phi_grid",
                    "or l_coh_grid is required for mode chs-sweep",
                ));
            }
            (Some(_), None) => {
                for (key, set) in [
                    ("phi", spec.phi.is_some()),
                    ("delta_x", spec.delta_x.is_some()),
                    ("lineshape", spec.lineshape.is_some()),
                ] {
                    if set {
                        out.push(Diagnostic::new(key, "requires l_coh_grid"));
                    }
                }
            }
            (None, Some(_)) => required("delta_x", spec.delta_x.is_some(), mode, &mut out),
        },
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> RunSpec {
        RunSpec::from_toml_str(text).unwrap()
    }

    #[test]
    fn grid_flag_forms() {
        assert_eq!(
            "0:1:3".parse::<Grid>().unwrap().values(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(
            "1, 0.8,0.5".parse::<Grid>().unwrap().values(),
            vec![1.0, 0.8, 0.5]
        );
        assert_eq!("2:5:1".parse::<Grid>().unwrap().values(), vec![2.0]);
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:x".parse::<Grid>().is_err());
        assert!("".parse::<Grid>().is_err());
    }

    #[test]
    fn range_hits_stop_exactly() {
        let v = Grid::range(0.0, std::f64::consts::TAU, 721).values();
        assert_eq!(v.len(), 721);
        assert_eq!(*v.last().unwrap(), std::f64::consts::TAU);
    }

    #[test]
    fn negative_coherence_length_is_named() {
        let d = validate(&spec(
            "mode = \"double-cell\"\nl_coh = -1.0\ntheta_grid = [0.0]",
        ));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].to_string(), "l_coh must be > 0");
    }

    #[test]
    fn missing_theta_grid_is_named() {
        let d = validate(&spec("mode = \"fringe\"\nchi_t = 0.3"));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].key, "theta_grid");
        assert_eq!(d[0].to_string(), "theta_grid is required for mode fringe");
    }

    #[test]
    fn valid_bell_spec_has_no_diagnostics() {
        assert!(validate(&spec("mode = \"bell\"\nphi = 0.5")).is_empty());
        assert!(validate(&spec("mode = \"bell\"\nnu_re = 1.0\nchi_t = 0.1")).is_empty());
    }

    #[test]
    fn unknown_mode_and_stray_keys() {
        let d = validate(&spec("mode = \"sideways\""));
        assert_eq!(d[0].key, "mode");
        let d = validate(&spec("mode = \"duality\"\nnu_grid = [1.0]\nphi = 0.2"));
        assert_eq!(
            d,
            vec![Diagnostic::new("phi", "is not used by mode duality")]
        );
        assert_eq!(
            validate(&RunSpec::default())[0].to_string(),
            "mode is required"
        );
    }

    #[test]
    fn unknown_keys_are_rejected_at_parse() {
        assert!(RunSpec::from_toml_str("mode = \"bell\"\nchi = 1.0").is_err());
    }

    #[test]
    fn resolution_pins_defaults() {
        let s = spec("mode = \"coherence-sweep\"\ndelta_x = 0.1\nl_coh_grid = [0.1]").resolved();
        assert_eq!(s.lineshape.as_deref(), Some("lorentzian"));
        assert_eq!(s.t_prime_ratio, Some(1.0));
        assert_eq!(s.nu_re, Some(0.0));
        assert!(s.theta_grid.is_some());
        assert!(validate(&s).is_empty());
        let b = spec("mode = \"bell\"\nphi = 0.5").resolved();
        assert_eq!(b.nu_re, None);
        assert!(validate(&b).is_empty());
    }

    #[test]
    fn spec_round_trips_through_toml() {
        let s = spec(
            "mode = \"fringe\"\nnu_re = 0.1\nchi_t = 0.30000000000000004\n\
             theta_grid = { start = 0.0, stop = 6.283185307179586, points = 721 }",
        );
        assert_eq!(RunSpec::from_toml_str(&s.to_toml_string()).unwrap(), s);
    }
}
