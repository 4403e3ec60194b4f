//! Deterministic ensemble averages over a random relative phase.
//!
//! Every average is a composite Gauss–Legendre sum, so results are
//! bit-reproducible and independent of thread scheduling.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};

/// Default Gauss–Legendre order per panel.
pub const DEFAULT_NODES: usize = 64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid(
                "nodes",
                "quadrature order must be at least 1",
            ));
        }
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `∫_a^b f` with one panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// `∫` over consecutive panels delimited by `breaks`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], &mut f))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Distribution of the random relative phase between the two arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseDistribution {
    /// A single deterministic phase.
    Fixed(f64),
    /// Uniform on a full turn.
    Uniform,
    /// Zero-mean normal with standard deviation `sigma`.
    Normal { sigma: f64 },
    /// Wrapped Cauchy with half width `width`, mean resultant `exp(-width)`.
    WrappedCauchy { width: f64 },
}

impl PhaseDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PhaseDistribution::Fixed(p) => ensure_finite("inter_cell_phase", p),
            PhaseDistribution::Uniform => Ok(()),
            PhaseDistribution::Normal { sigma } => {
                ensure_finite("sigma", sigma)?;
                if sigma < 0.0 {
                    return Err(Error::invalid("sigma", "must be >= 0"));
                }
                Ok(())
            }
            PhaseDistribution::WrappedCauchy { width } => {
                ensure_finite("width", width)?;
                if width < 0.0 {
                    return Err(Error::invalid("width", "must be >= 0"));
                }
                Ok(())
            }
        }
    }

    /// Closed-form `E[cos δ]`; used to cross-check the quadrature.
    pub fn mean_cosine(&self) -> f64 {
        match *self {
            PhaseDistribution::Fixed(p) => p.cos(),
            PhaseDistribution::Uniform => 0.0,
            PhaseDistribution::Normal { sigma } => (-0.5 * sigma * sigma).exp(),
            PhaseDistribution::WrappedCauchy { width } => (-width).exp(),
        }
    }

    /// `E[f(δ)]` by composite Gauss–Legendre quadrature.
    pub fn expectation<F: FnMut(f64) -> f64>(&self, rule: &GaussLegendre, mut f: F) -> f64 {
        match *self {
            PhaseDistribution::Fixed(p) => f(p),
            PhaseDistribution::Normal { sigma: 0.0 }
            | PhaseDistribution::WrappedCauchy { width: 0.0 } => f(0.0),
            PhaseDistribution::Uniform => {
                rule.integrate_panels(&uniform_breaks(8), |x| f(x) / (2.0 * PI))
            }
            PhaseDistribution::Normal { sigma } if sigma <= 3.0 => {
                // unwrapped, δ = σx on |x| ≤ 12
                let norm = 1.0 / (2.0 * PI).sqrt();
                let breaks: Vec<f64> = (0..=8).map(|k| -12.0 + 3.0 * k as f64).collect();
                rule.integrate_panels(&breaks, |x| norm * (-0.5 * x * x).exp() * f(sigma * x))
            }
            PhaseDistribution::Normal { sigma } => {
                // broad: wrapped density on one turn via its Fourier series
                let density = |d: f64| {
                    let mut s = 1.0;
                    for k in 1..=20 {
                        let k = k as f64;
                        s += 2.0 * (-0.5 * k * k * sigma * sigma).exp() * (k * d).cos();
                    }
                    s / (2.0 * PI)
                };
                rule.integrate_panels(&uniform_breaks(8), |x| density(x) * f(x))
            }
            PhaseDistribution::WrappedCauchy { width } => {
                // density peaks at 0 with scale `width`; grade panels geometrically.
                // (1 − ρ²) / (2π(1 + ρ² − 2ρ cos δ)) with ρ = e^{−w}, written
                // without cancellation at small w or overflow at large w
                let rho = (-width).exp();
                let gap = -(-width).exp_m1();
                let density = |d: f64| {
                    let sd = (0.5 * d).sin();
                    gap * (1.0 + rho) / (2.0 * PI * (gap * gap + 4.0 * rho * sd * sd))
                };
                let breaks = graded_breaks(width);
                rule.integrate_panels(&breaks, |x| density(x) * f(x))
            }
        }
    }
}

fn uniform_breaks(panels: usize) -> Vec<f64> {
    (0..=panels)
        .map(|k| -PI + 2.0 * PI * k as f64 / panels as f64)
        .collect()
}

fn graded_breaks(scale: f64) -> Vec<f64> {
    let mut positive = vec![0.0];
    let mut edge = scale.min(PI) * 0.25;
    while edge < PI {
        positive.push(edge);
        edge *= 4.0;
    }
    positive.push(PI);
    let mut breaks: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
    breaks.pop();
    breaks.extend(positive);
    breaks
}
