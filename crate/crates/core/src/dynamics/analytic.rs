//! Closed-form underdamped solutions `C e^{−ωλt} sin(√(1−λ²) ω t + φ)`.

use super::{step_count, DynamicsError, Method, Trajectory};

/// Parameters of an underdamped sinusoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinParams {
    pub omega: f64,
    pub lambda: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl LangevinParams {
    /// `λ = 0` is allowed and gives an undamped sinusoid.
    pub fn new(omega: f64, lambda: f64, amplitude: f64, phase: f64) -> Result<Self, DynamicsError> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(DynamicsError::InvalidParameter {
                name: "omega",
                value: omega,
            });
        }
        if lambda >= 1.0 {
            return Err(DynamicsError::OverdampedUnsupported { lambda });
        }
        if !(lambda >= 0.0) {
            return Err(DynamicsError::InvalidParameter {
                name: "lambda",
                value: lambda,
            });
        }
        for (name, value) in [("amplitude", amplitude), ("phase", phase)] {
            if !value.is_finite() {
                return Err(DynamicsError::InvalidParameter { name, value });
            }
        }
        Ok(Self {
            omega,
            lambda,
            amplitude,
            phase,
        })
    }

    /// Amplitude and phase that reproduce `q(0) = q0`, `q̇(0) = qdot0`.
    pub fn from_initial(
        omega: f64,
        lambda: f64,
        q0: f64,
        qdot0: f64,
    ) -> Result<Self, DynamicsError> {
        let probe = Self::new(omega, lambda, 0.0, 0.0)?;
        // C sin φ = q0, C cos φ = (q̇0 + κ q0)/Ω
        let s = q0;
        let c = (qdot0 + probe.decay_rate() * q0) / probe.damped_frequency();
        Self::new(omega, lambda, s.hypot(c), s.atan2(c))
    }

    pub fn decay_rate(&self) -> f64 {
        self.omega * self.lambda
    }

    pub fn damped_frequency(&self) -> f64 {
        (1.0 - self.lambda * self.lambda).sqrt() * self.omega
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude
            * (-self.decay_rate() * t).exp()
            * (self.damped_frequency() * t + self.phase).sin()
    }

    pub fn velocity(&self, t: f64) -> f64 {
        let (k, w) = (self.decay_rate(), self.damped_frequency());
        let (s, c) = (w * t + self.phase).sin_cos();
        self.amplitude * (-k * t).exp() * (w * c - k * s)
    }
}

/// Solution of the Markovian quantum Langevin equation.
pub fn quantum_langevin_analytic(t: f64, p: &LangevinParams) -> f64 {
    p.value(t)
}

/// Solution of the Bohmian Langevin equation. The functional form is the
/// same; only the parameters differ (`ξ`, `λ_B`, `C′`, `φ′`).
pub fn bohmian_langevin_analytic(t: f64, p: &LangevinParams) -> f64 {
    p.value(t)
}

/// Common solution when both equations share `ω₀`, `λ` and start from
/// `q(0) = 0` with velocity `qdot0`.
pub fn merged_solution(t: f64, omega0: f64, lambda: f64, qdot0: f64) -> Result<f64, DynamicsError> {
    let p = LangevinParams::new(omega0, lambda, 0.0, 0.0)?;
    let w = p.damped_frequency();
    Ok((-omega0 * lambda * t).exp() * ((w * t).sin() * (qdot0 / w)))
}

/// Samples a closed-form solution on `[0, t_end]`.
pub fn analytic_trajectory(
    p: &LangevinParams,
    dt: f64,
    t_end: f64,
    label: Method,
) -> Result<Trajectory, DynamicsError> {
    let steps = step_count(dt, t_end)?;
    let times = (0..=steps).map(|k| k as f64 * dt);
    let q = times.clone().map(|t| p.value(t)).collect();
    let qdot = times.map(|t| p.velocity(t)).collect();
    Trajectory::new(dt, 0.0, q, qdot, label)
}
