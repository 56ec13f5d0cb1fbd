//! Discretized Ohmic baths and their spectral / memory-kernel quantities.
//!
//! A bath is a set of `N` oscillators with frequencies `omega[α]` and
//! dimensionless coupling strengths `gamma[α]`, bilinearly coupled to the
//! system coordinate. Everything the dynamics needs from the bath enters
//! through the per-mode weight `gamma[α]² omega[α]²`.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BathError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidSpec {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(
        "mode {alpha} (omega = {omega}) implies coupling gamma = {gamma} >= 1; \
         the coupling is too strong for this mode count"
    )]
    OverCoupling {
        alpha: usize,
        omega: f64,
        gamma: f64,
    },
    #[error("frequency {omega} outside the spectral window [0, {omega_c}]")]
    OutOfDomain { omega: f64, omega_c: f64 },
    #[error("bath arrays must have equal length (omega: {omega}, gamma: {gamma})")]
    LengthMismatch { omega: usize, gamma: usize },
}

fn check_positive(name: &'static str, value: f64) -> Result<(), BathError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(BathError::InvalidSpec {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

fn check_open_unit(name: &'static str, value: f64) -> Result<(), BathError> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(BathError::InvalidSpec {
            name,
            value,
            reason: "must lie in (0, 1)",
        })
    }
}

/// Parameters of the central oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega0: f64,
    pub hbar: f64,
    /// Quantum friction coefficient, underdamped: `0 < lambda_q < 1`.
    pub lambda_q: f64,
    /// Bohmian friction coefficient, underdamped: `0 < lambda_b < 1`.
    pub lambda_b: f64,
}

impl SystemParams {
    pub fn new(omega0: f64, hbar: f64, lambda_q: f64, lambda_b: f64) -> Result<Self, BathError> {
        check_positive("omega0", omega0)?;
        check_positive("hbar", hbar)?;
        check_open_unit("lambda_q", lambda_q)?;
        check_open_unit("lambda_b", lambda_b)?;
        Ok(Self {
            omega0,
            hbar,
            lambda_q,
            lambda_b,
        })
    }

    /// Ohmic strength matching the quantum friction: `2 omega0 lambda_q`.
    pub fn lambda_q_prime(&self) -> f64 {
        2.0 * self.omega0 * self.lambda_q
    }
}

/// How the continuous Ohmic density is turned into per-mode weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discretization {
    /// Equal weights `(2λ'/π)(ω_c/N)`: the discrete memory kernel converges to
    /// the continuum one.
    KernelMatched,
    /// Weights `∝ ω³`, normalized so that `Σ γ²ω² = λ' ω_c⁴`.
    PaperEq44,
}

impl Discretization {
    pub fn as_str(self) -> &'static str {
        match self {
            Discretization::KernelMatched => "kernel_matched",
            Discretization::PaperEq44 => "paper_eq44",
        }
    }
}

impl std::str::FromStr for Discretization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kernel_matched" => Ok(Discretization::KernelMatched),
            "paper_eq44" => Ok(Discretization::PaperEq44),
            other => Err(format!(
                "unknown discretization `{other}` (expected kernel_matched or paper_eq44)"
            )),
        }
    }
}

/// Whether couplings `γ_α ≥ 1` are rejected.
///
/// `Strict` enforces `0 < γ_α < 1`. `Unbounded` accepts any positive coupling;
/// the quadratic Hamiltonian stays positive definite for every `γ_α` because
/// `ω²` always contains `Σ γ_α² ω_α²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CouplingBound {
    #[default]
    Strict,
    Unbounded,
}

impl CouplingBound {
    pub fn as_str(self) -> &'static str {
        match self {
            CouplingBound::Strict => "strict",
            CouplingBound::Unbounded => "unbounded",
        }
    }
}

impl std::str::FromStr for CouplingBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(CouplingBound::Strict),
            "unbounded" => Ok(CouplingBound::Unbounded),
            other => Err(format!(
                "unknown coupling bound `{other}` (expected strict or unbounded)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub n_modes: usize,
    pub omega_c: f64,
    pub lambda_q_prime: f64,
    pub discretization: Discretization,
    pub coupling_bound: CouplingBound,
}

impl BathSpec {
    /// A spec with the strict coupling bound.
    pub fn new(
        n_modes: usize,
        omega_c: f64,
        lambda_q_prime: f64,
        discretization: Discretization,
    ) -> Self {
        Self {
            n_modes,
            omega_c,
            lambda_q_prime,
            discretization,
            coupling_bound: CouplingBound::Strict,
        }
    }

    pub fn with_coupling_bound(mut self, bound: CouplingBound) -> Self {
        self.coupling_bound = bound;
        self
    }

    pub fn validate(&self) -> Result<(), BathError> {
        if self.n_modes == 0 {
            return Err(BathError::InvalidSpec {
                name: "n_modes",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        check_positive("omega_c", self.omega_c)?;
        check_positive("lambda_q_prime", self.lambda_q_prime)
    }
}

/// Concrete bath: mode frequencies and couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct BathRealization {
    omega: Vec<f64>,
    gamma: Vec<f64>,
    gamma_bar: Vec<f64>,
}

impl BathRealization {
    /// Builds a bath from explicit arrays.
    ///
    /// Frequencies must be positive and nondecreasing. A zero coupling is
    /// accepted and describes a decoupled mode.
    pub fn from_arrays(
        omega: Vec<f64>,
        gamma: Vec<f64>,
        bound: CouplingBound,
    ) -> Result<Self, BathError> {
        if omega.len() != gamma.len() {
            return Err(BathError::LengthMismatch {
                omega: omega.len(),
                gamma: gamma.len(),
            });
        }
        for (alpha, (&w, &g)) in omega.iter().zip(&gamma).enumerate() {
            check_positive("omega", w)?;
            if !(g.is_finite() && g >= 0.0) {
                return Err(BathError::InvalidSpec {
                    name: "gamma",
                    value: g,
                    reason: "must be finite and >= 0",
                });
            }
            if bound == CouplingBound::Strict && g >= 1.0 {
                return Err(BathError::OverCoupling {
                    alpha: alpha + 1,
                    omega: w,
                    gamma: g,
                });
            }
        }
        if omega.windows(2).any(|w| w[1] < w[0]) {
            return Err(BathError::InvalidSpec {
                name: "omega",
                value: f64::NAN,
                reason: "frequencies must be sorted nondecreasing",
            });
        }
        let gamma_bar = omega
            .iter()
            .zip(&gamma)
            .map(|(&w, &g)| g * w.powf(1.5))
            .collect();
        Ok(Self {
            omega,
            gamma,
            gamma_bar,
        })
    }

    /// A bath with no modes (only meaningful for the effective frequency).
    pub fn empty() -> Self {
        Self {
            omega: Vec::new(),
            gamma: Vec::new(),
            gamma_bar: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// `γ̄_α = γ_α ω_α^{3/2}`.
    pub fn gamma_bar(&self) -> &[f64] {
        &self.gamma_bar
    }

    /// Per-mode kernel weight `γ_α² ω_α²`.
    pub fn weight(&self, alpha: usize) -> f64 {
        let gw = self.gamma[alpha] * self.omega[alpha];
        gw * gw
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|a| self.weight(a))
    }

    /// `Σ_α γ_α² ω_α²`, which is also `T(0)`.
    pub fn total_weight(&self) -> f64 {
        self.weights().sum()
    }

    pub fn max_omega(&self) -> f64 {
        self.omega.last().copied().unwrap_or(0.0)
    }
}

/// Discretizes the Ohmic density `J(ω) = λ' ω` on the midpoint grid
/// `ω_α = (α − ½) ω_c / N`.
pub fn discretize_ohmic(spec: &BathSpec) -> Result<BathRealization, BathError> {
    spec.validate()?;
    let n = spec.n_modes;
    let spacing = spec.omega_c / n as f64;
    let omega: Vec<f64> = (1..=n).map(|a| (a as f64 - 0.5) * spacing).collect();

    let weights: Vec<f64> = match spec.discretization {
        Discretization::KernelMatched => {
            let w = 2.0 * spec.lambda_q_prime / PI * spacing;
            vec![w; n]
        }
        Discretization::PaperEq44 => {
            let cubes: Vec<f64> = omega.iter().map(|w| w * w * w).collect();
            let norm: f64 = cubes.iter().sum();
            let total = spec.lambda_q_prime * spec.omega_c.powi(4);
            cubes.iter().map(|c| total * c / norm).collect()
        }
    };

    let gamma = weights
        .iter()
        .zip(&omega)
        .map(|(w, om)| w.sqrt() / om)
        .collect();
    BathRealization::from_arrays(omega, gamma, spec.coupling_bound)
}

/// Ohmic spectral density `J(ω) = λ' ω` on `[0, ω_c]`.
pub fn spectral_density(omega_e: f64, lambda_q_prime: f64, omega_c: f64) -> Result<f64, BathError> {
    if !(0.0..=omega_c).contains(&omega_e) {
        return Err(BathError::OutOfDomain {
            omega: omega_e,
            omega_c,
        });
    }
    Ok(lambda_q_prime * omega_e)
}

/// Discrete memory kernel `T(t) = Σ_α γ_α² ω_α² cos(ω_α t)`.
pub fn memory_kernel_discrete(bath: &BathRealization, t: f64) -> f64 {
    bath.omega
        .iter()
        .enumerate()
        .map(|(a, &w)| bath.weight(a) * (w * t).cos())
        .sum()
}

/// Continuum Ohmic kernel `(2λ'/π) sin(ω_c t)/t`, with `2λ'ω_c/π` at `t = 0`.
pub fn memory_kernel_continuum(lambda_q_prime: f64, omega_c: f64, t: f64) -> f64 {
    let x = omega_c * t;
    // sin(x)/x loses accuracy only for |x| below ~1e-4; use the series there.
    let sinc = if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    };
    2.0 * lambda_q_prime / PI * omega_c * sinc
}

/// `ω² = ω₀² + Σ_α γ_α² ω_α²`.
pub fn effective_frequency_squared(params: &SystemParams, bath: &BathRealization) -> f64 {
    params.omega0 * params.omega0 + bath.total_weight()
}
