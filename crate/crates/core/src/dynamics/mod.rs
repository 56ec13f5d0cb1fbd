//! Time evolution: the full `(N+1)`-oscillator Hamiltonian, the generalized
//! Langevin equation with memory, and the closed-form damped solutions.

mod analytic;
mod gle;
mod hamiltonian;

pub use analytic::{
    analytic_trajectory, bohmian_langevin_analytic, merged_solution, quantum_langevin_analytic,
    LangevinParams,
};
pub use gle::{
    classical_noise, integrate_damped_oscillator, integrate_gle, mean_classical_noise, GleNoise,
    MemoryKernel,
};
pub use hamiltonian::{
    energy_breakdown, integrate_full_hamiltonian, integrate_full_hamiltonian_with,
    normal_mode_energies, pair_energy, total_energy, EnergyBreakdown, FullRun, SymplecticScheme,
};

use thiserror::Error;

/// Largest accepted `dt · (fastest frequency)`.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("time step {dt} too large for frequency {frequency}: dt*frequency must be <= {limit}")]
    StepTooLarge { dt: f64, frequency: f64, limit: f64 },
    #[error("invalid time grid: dt = {dt}, t_end = {t_end}")]
    InvalidGrid { dt: f64, t_end: f64 },
    #[error("lambda = {lambda} >= 1: only the underdamped regime is supported")]
    OverdampedUnsupported { lambda: f64 },
    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("initial bath data has {got} entries, bath has {expected} modes")]
    LengthMismatch { expected: usize, got: usize },
}

/// Which model produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Full,
    Gle,
    MarkovQuantum,
    Bohmian,
    Merged,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Full,
        Method::Gle,
        Method::MarkovQuantum,
        Method::Bohmian,
        Method::Merged,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Full => "full",
            Method::Gle => "gle",
            Method::MarkovQuantum => "markov_quantum",
            Method::Bohmian => "bohmian",
            Method::Merged => "merged",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Uniformly sampled `q(t)` and `q̇(t)` at `t0 + k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub t0: f64,
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub label: Method,
}

impl Trajectory {
    pub fn new(
        dt: f64,
        t0: f64,
        q: Vec<f64>,
        qdot: Vec<f64>,
        label: Method,
    ) -> Result<Self, DynamicsError> {
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(DynamicsError::InvalidGrid {
                dt,
                t_end: f64::NAN,
            });
        }
        if q.len() != qdot.len() {
            return Err(DynamicsError::LengthMismatch {
                expected: q.len(),
                got: qdot.len(),
            });
        }
        if q.len() < 2 {
            return Err(DynamicsError::InvalidGrid { dt, t_end: t0 });
        }
        Ok(Self {
            dt,
            t0,
            q,
            qdot,
            label,
        })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }
}

/// Number of steps for `[0, t_end]` at spacing `dt`.
pub(crate) fn step_count(dt: f64, t_end: f64) -> Result<usize, DynamicsError> {
    if !(dt > 0.0 && dt.is_finite() && t_end > 0.0 && t_end.is_finite()) {
        return Err(DynamicsError::InvalidGrid { dt, t_end });
    }
    let steps = (t_end / dt).round();
    if steps < 1.0 {
        return Err(DynamicsError::InvalidGrid { dt, t_end });
    }
    Ok(steps as usize)
}

pub(crate) fn check_step(dt: f64, frequency: f64) -> Result<(), DynamicsError> {
    if dt * frequency > MAX_PHASE_PER_STEP {
        Err(DynamicsError::StepTooLarge {
            dt,
            frequency,
            limit: MAX_PHASE_PER_STEP,
        })
    } else {
        Ok(())
    }
}
