//! Truncated Fock-space vectors for the probe field and joint states that
//! pair small discrete registers (path, polarization) with a probe mode.
//!
//! Amplitudes are `Complex64`. A [`FockVector`] holds levels `0..=n_max`;
//! a [`QuantumState`] stores one probe vector per register basis index,
//! flattened so that the probe photon number runs fastest.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

/// Default bound on the Poisson weight discarded by a Fock cutoff.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Cutoff rule for a coherent amplitude of modulus `nu_abs`:
/// `ceil(|ν|² + 10|ν| + 20)`.
pub fn truncation_bound(nu_abs: f64) -> usize {
    let nu = nu_abs.abs();
    (nu * nu + 10.0 * nu + 20.0).ceil() as usize
}

/// `P(n > n_max)` for a Poisson distribution of the given mean, summed
/// directly over the tail in the log domain.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    // ln(n!) for n = n_max + 1
    let mut ln_fact: f64 = (1..=n_max + 1).map(|k| (k as f64).ln()).sum();
    let mut n = n_max + 1;
    let mut tail = 0.0;
    loop {
        let term = (n as f64 * ln_mean - mean - ln_fact).exp();
        tail += term;
        // past the mode the terms fall off geometrically
        if (n as f64) > mean && (term <= tail * 1e-18 || term < 1e-300) {
            break;
        }
        if n > n_max + 1_000_000 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    tail.min(1.0)
}

/// Amplitudes over photon numbers `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid(
                "amps",
                "a Fock vector needs at least the vacuum level",
            ));
        }
        for a in &amps {
            ensure_finite("amps", a.re)?;
            ensure_finite("amps", a.im)?;
        }
        Ok(FockVector { amps })
    }

    /// The number state `|n⟩` truncated at `n_max`.
    pub fn number_state(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::IndexOutOfRange {
                what: "photon number",
                index: n,
                len: n_max + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(FockVector { amps })
    }

    pub fn vacuum(n_max: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
        amps[0] = Complex64::new(1.0, 0.0);
        FockVector { amps }
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }

    /// Applies `exp(-i θ n)`.
    pub fn number_phase_apply(&self, theta: f64) -> FockVector {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, a)| a * Complex64::from_polar(1.0, -theta * n as f64))
            .collect();
        FockVector { amps }
    }

    /// Applies the self-Kerr factor `exp(-i (κ/2) n²)`.
    pub fn self_kerr_apply(&self, kappa: f64) -> FockVector {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, a)| {
                let n = n as f64;
                a * Complex64::from_polar(1.0, -0.5 * kappa * n * n)
            })
            .collect();
        FockVector { amps }
    }

    pub fn scale(&self, factor: Complex64) -> FockVector {
        FockVector {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// `Σ conj(self_n) other_n`.
    pub fn overlap(&self, other: &FockVector) -> Result<Complex64> {
        overlap(self, other)
    }

    /// Largest elementwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &FockVector) -> Result<f64> {
        check_same_cutoff(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

fn check_same_cutoff(a: &FockVector, b: &FockVector) -> Result<()> {
    if a.amps.len() != b.amps.len() {
        return Err(Error::DimensionMismatch {
            left: a.amps.len(),
            right: b.amps.len(),
        });
    }
    Ok(())
}

/// `⟨a|b⟩`.
pub fn overlap(a: &FockVector, b: &FockVector) -> Result<Complex64> {
    check_same_cutoff(a, b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Coherent state `|ν⟩` truncated at `n_max`, rejecting cutoffs whose
/// discarded tail exceeds [`DEFAULT_TAIL_TOLERANCE`].
pub fn coherent_state(nu: Complex64, n_max: usize) -> Result<FockVector> {
    coherent_state_with_tolerance(nu, n_max, DEFAULT_TAIL_TOLERANCE)
}

pub fn coherent_state_with_tolerance(
    nu: Complex64,
    n_max: usize,
    tail_tolerance: f64,
) -> Result<FockVector> {
    ensure_finite("nu.re", nu.re)?;
    ensure_finite("nu.im", nu.im)?;
    let mean = nu.norm_sqr();
    let tail = poisson_tail(mean, n_max);
    if tail > tail_tolerance {
        return Err(Error::TruncationExceeded {
            n_max,
            tail,
            bound: tail_tolerance,
        });
    }
    if mean == 0.0 {
        return Ok(FockVector::vacuum(n_max));
    }
    // |amp_n| = exp(-|ν|²/2 + n ln|ν| - ln(n!)/2), arg amp_n = n arg ν
    let ln_abs = nu.norm().ln();
    let arg = nu.arg();
    let mut ln_fact = 0.0;
    let mut amps = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let nf = n as f64;
        let modulus = (-0.5 * mean + nf * ln_abs - 0.5 * ln_fact).exp();
        amps.push(Complex64::from_polar(modulus, nf * arg));
    }
    Ok(FockVector { amps })
}

/// Coherent state with the cutoff chosen by [`truncation_bound`].
pub fn coherent_state_auto(nu: Complex64) -> Result<FockVector> {
    coherent_state(nu, truncation_bound(nu.norm()))
}

/// Joint amplitudes over `register_dims × (n_max + 1)`.
///
/// Register basis indices are row-major in the order of `register_dims`;
/// each combined register index owns a contiguous probe block.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    register_dims: Vec<usize>,
    n_max: usize,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// One probe vector per combined register index.
    pub fn from_branches(register_dims: Vec<usize>, branches: Vec<FockVector>) -> Result<Self> {
        if register_dims.contains(&0) {
            return Err(Error::invalid(
                "register_dims",
                "register dimensions must be positive",
            ));
        }
        let reg_len: usize = register_dims.iter().product();
        if branches.len() != reg_len {
            return Err(Error::DimensionMismatch {
                left: reg_len,
                right: branches.len(),
            });
        }
        let n_max = branches[0].n_max();
        let mut amps = Vec::with_capacity(reg_len * (n_max + 1));
        for b in branches {
            if b.n_max() != n_max {
                return Err(Error::DimensionMismatch {
                    left: n_max + 1,
                    right: b.n_max() + 1,
                });
            }
            amps.extend(b.into_amps());
        }
        Ok(QuantumState {
            register_dims,
            n_max,
            amps,
        })
    }

    /// Product of register amplitudes (outer product in register order)
    /// with a probe vector.
    pub fn product(registers: &[Vec<Complex64>], probe: &FockVector) -> Result<Self> {
        let dims: Vec<usize> = registers.iter().map(Vec::len).collect();
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for reg in registers {
            coeffs = coeffs
                .iter()
                .flat_map(|c| reg.iter().map(move |r| c * r))
                .collect();
        }
        let branches = coeffs.into_iter().map(|c| probe.scale(c)).collect();
        Self::from_branches(dims, branches)
    }

    pub fn register_dims(&self) -> &[usize] {
        &self.register_dims
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn probe_len(&self) -> usize {
        self.n_max + 1
    }

    fn branch_count(&self) -> usize {
        self.register_dims.iter().product()
    }

    fn stride(&self, register: usize) -> usize {
        self.register_dims[register + 1..].iter().product()
    }

    fn check_register(&self, register: usize) -> Result<()> {
        if register >= self.register_dims.len() {
            return Err(Error::IndexOutOfRange {
                what: "register",
                index: register,
                len: self.register_dims.len(),
            });
        }
        Ok(())
    }

    fn check_outcome(&self, register: usize, outcome: usize) -> Result<()> {
        self.check_register(register)?;
        if outcome >= self.register_dims[register] {
            return Err(Error::IndexOutOfRange {
                what: "outcome",
                index: outcome,
                len: self.register_dims[register],
            });
        }
        Ok(())
    }

    fn digit(&self, branch: usize, register: usize) -> usize {
        (branch / self.stride(register)) % self.register_dims[register]
    }

    /// Probe vector attached to a combined register index.
    pub fn branch(&self, index: usize) -> Result<FockVector> {
        if index >= self.branch_count() {
            return Err(Error::IndexOutOfRange {
                what: "branch",
                index,
                len: self.branch_count(),
            });
        }
        let len = self.probe_len();
        Ok(FockVector {
            amps: self.amps[index * len..(index + 1) * len].to_vec(),
        })
    }

    /// Applies a `d × d` unitary (row-major) to one register.
    pub fn apply_register_unitary(&self, register: usize, matrix: &[Complex64]) -> Result<Self> {
        self.check_register(register)?;
        let d = self.register_dims[register];
        if matrix.len() != d * d {
            return Err(Error::DimensionMismatch {
                left: d * d,
                right: matrix.len(),
            });
        }
        let stride = self.stride(register) * self.probe_len();
        let block = stride * d;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for base in (0..self.amps.len()).step_by(block) {
            for inner in 0..stride {
                for row in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for col in 0..d {
                        acc += matrix[row * d + col] * self.amps[base + col * stride + inner];
                    }
                    out[base + row * stride + inner] = acc;
                }
            }
        }
        Ok(QuantumState {
            register_dims: self.register_dims.clone(),
            n_max: self.n_max,
            amps: out,
        })
    }

    /// Transforms the probe block of every branch where `register`
    /// reads `outcome`.
    pub fn map_probe_where<F>(&self, register: usize, outcome: usize, f: F) -> Result<Self>
    where
        F: Fn(&FockVector) -> FockVector,
    {
        self.check_outcome(register, outcome)?;
        let len = self.probe_len();
        let mut amps = self.amps.clone();
        for b in 0..self.branch_count() {
            if self.digit(b, register) == outcome {
                let probe = FockVector {
                    amps: self.amps[b * len..(b + 1) * len].to_vec(),
                };
                let mapped = f(&probe);
                if mapped.amps.len() != len {
                    return Err(Error::DimensionMismatch {
                        left: len,
                        right: mapped.amps.len(),
                    });
                }
                amps[b * len..(b + 1) * len].copy_from_slice(&mapped.amps);
            }
        }
        Ok(QuantumState {
            register_dims: self.register_dims.clone(),
            n_max: self.n_max,
            amps,
        })
    }

    /// Applies `exp(-i θ n_p)` to the probe on branches where `register`
    /// reads `outcome`.
    pub fn number_phase_where(&self, register: usize, outcome: usize, theta: f64) -> Result<Self> {
        self.map_probe_where(register, outcome, |p| p.number_phase_apply(theta))
    }

    /// Applies the scalar phase `exp(-i φ)` on branches where `register`
    /// reads `outcome`.
    pub fn phase_where(&self, register: usize, outcome: usize, phi: f64) -> Result<Self> {
        let factor = Complex64::from_polar(1.0, -phi);
        self.map_probe_where(register, outcome, |p| p.scale(factor))
    }

    /// Probability that `register` reads `outcome`, summed over every other
    /// register and the probe.
    pub fn partial_trace_probability(&self, register: usize, outcome: usize) -> Result<f64> {
        self.joint_probability(&[(register, outcome)])
    }

    /// Probability of a joint outcome on several registers.
    pub fn joint_probability(&self, outcomes: &[(usize, usize)]) -> Result<f64> {
        for &(r, o) in outcomes {
            self.check_outcome(r, o)?;
        }
        let len = self.probe_len();
        let mut p = 0.0;
        for b in 0..self.branch_count() {
            if outcomes.iter().all(|&(r, o)| self.digit(b, r) == o) {
                p += self.amps[b * len..(b + 1) * len]
                    .iter()
                    .map(|a| a.norm_sqr())
                    .sum::<f64>();
            }
        }
        Ok(p)
    }
}
