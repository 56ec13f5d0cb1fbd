//! Generalized Langevin equation
//!
//! ```text
//! q̈(t) = −ω₀² q(t) − ∫₀ᵗ T(t−s) q̇(s) ds + R(t)
//! ```
//!
//! solved with classical RK4 and a trapezoidal history convolution. The
//! kernel is tabulated on a half-step grid so every RK stage reads it
//! exactly; each step costs three `O(n)` history sums.

use super::{check_step, step_count, DynamicsError, Method, Trajectory};
use crate::bath::{memory_kernel_continuum, memory_kernel_discrete, BathRealization};
use crate::modes::PhasePoint;
use crate::stats::MeanEstimate;

/// Memory kernel entering the GLE.
#[derive(Debug, Clone, Copy)]
pub enum MemoryKernel<'a> {
    /// `Σ γ²ω² cos ωt` of a concrete bath.
    Discrete(&'a BathRealization),
    /// Continuum limit of the ohmic bath.
    Continuum { lambda_q_prime: f64, omega_c: f64 },
    /// Memoryless limit: the convolution collapses to `friction · q̇`.
    Markov { friction: f64 },
}

impl MemoryKernel<'_> {
    /// Kernel value at lag `t`; `None` for the memoryless limit.
    pub fn value(&self, t: f64) -> Option<f64> {
        match *self {
            MemoryKernel::Discrete(bath) => Some(memory_kernel_discrete(bath, t)),
            MemoryKernel::Continuum {
                lambda_q_prime,
                omega_c,
            } => Some(memory_kernel_continuum(lambda_q_prime, omega_c, t)),
            MemoryKernel::Markov { .. } => None,
        }
    }

    /// Fastest time scale the integrator has to resolve.
    fn max_frequency(&self, omega0: f64) -> f64 {
        match *self {
            MemoryKernel::Discrete(bath) => (omega0 * omega0 + bath.total_weight())
                .sqrt()
                .max(bath.max_omega()),
            MemoryKernel::Continuum {
                lambda_q_prime,
                omega_c,
            } => {
                let t0 = memory_kernel_continuum(lambda_q_prime, omega_c, 0.0).abs();
                (omega0 * omega0 + t0).sqrt().max(omega_c)
            }
            MemoryKernel::Markov { friction } => omega0.max(friction.abs()),
        }
    }
}

/// Initial bath phase-space data that generates the classical noise.
#[derive(Debug, Clone, Copy)]
pub struct GleNoise<'a> {
    pub bath: &'a BathRealization,
    pub x0: &'a [f64],
    pub p0: &'a [f64],
}

impl<'a> GleNoise<'a> {
    pub fn from_point(bath: &'a BathRealization, point: &'a PhasePoint) -> Self {
        Self {
            bath,
            x0: &point.x,
            p0: &point.p_bath,
        }
    }
}

/// `R(t) = Σ γω² [(x_α(0) − γ q(0)) cos ωt + (p_α(0)/ω) sin ωt]`.
pub fn classical_noise(x0: &[f64], p0: &[f64], q0: f64, bath: &BathRealization, t: f64) -> f64 {
    bath.omega()
        .iter()
        .zip(bath.gamma())
        .zip(x0.iter().zip(p0))
        .map(|((&w, &g), (&x, &p))| {
            let (s, c) = (w * t).sin_cos();
            g * w * w * ((x - g * q0) * c + p / w * s)
        })
        .sum()
}

/// Ensemble mean of `R(t)` over sampled bath configurations.
pub fn mean_classical_noise(
    samples: &[PhasePoint],
    bath: &BathRealization,
    t: f64,
) -> MeanEstimate {
    let values: Vec<f64> = samples
        .iter()
        .map(|s| classical_noise(&s.x, &s.p_bath, s.q, bath, t))
        .collect();
    MeanEstimate::from_values(&values)
}

/// Integrates the GLE from `(q0, q̇0)` on `[0, t_end]`.
///
/// Without `noise` the force `R` is zero. With it, `R` is built from the
/// given bath data and `q0`, which makes the run exactly equivalent to the
/// full Hamiltonian started from the same phase point.
pub fn integrate_gle(
    q0: f64,
    qdot0: f64,
    omega0: f64,
    kernel: MemoryKernel<'_>,
    noise: Option<GleNoise<'_>>,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory, DynamicsError> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(DynamicsError::InvalidParameter {
            name: "omega0",
            value: omega0,
        });
    }
    let steps = step_count(dt, t_end)?;
    check_step(dt, kernel.max_frequency(omega0))?;
    if let Some(n) = &noise {
        for len in [n.x0.len(), n.p0.len()] {
            if len != n.bath.len() {
                return Err(DynamicsError::LengthMismatch {
                    expected: n.bath.len(),
                    got: len,
                });
            }
        }
    }

    // R on the half-step grid
    let noise_half: Vec<f64> = match &noise {
        Some(n) => (0..=2 * steps)
            .map(|j| classical_noise(n.x0, n.p0, q0, n.bath, 0.5 * dt * j as f64))
            .collect(),
        None => vec![0.0; 2 * steps + 1],
    };

    let w0sq = omega0 * omega0;
    let mut q = Vec::with_capacity(steps + 1);
    let mut v = Vec::with_capacity(steps + 1);
    q.push(q0);
    v.push(qdot0);

    if let MemoryKernel::Markov { friction } = kernel {
        let acc = |q: f64, v: f64, r: f64| -w0sq * q - friction * v + r;
        for i in 0..steps {
            let (qi, vi) = (q[i], v[i]);
            let (rh, r1) = (noise_half[2 * i + 1], noise_half[2 * i + 2]);
            let k1 = (vi, acc(qi, vi, noise_half[2 * i]));
            let k2 = {
                let (qs, vs) = (qi + 0.5 * dt * k1.0, vi + 0.5 * dt * k1.1);
                (vs, acc(qs, vs, rh))
            };
            let k3 = {
                let (qs, vs) = (qi + 0.5 * dt * k2.0, vi + 0.5 * dt * k2.1);
                (vs, acc(qs, vs, rh))
            };
            let k4 = {
                let (qs, vs) = (qi + dt * k3.0, vi + dt * k3.1);
                (vs, acc(qs, vs, r1))
            };
            q.push(qi + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0));
            v.push(vi + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1));
        }
        return Trajectory::new(dt, 0.0, q, v, Method::Gle);
    }

    // kh[j] = T(j·dt/2)
    let kh: Vec<f64> = (0..=2 * steps + 2)
        .map(|j| kernel.value(0.5 * dt * j as f64).unwrap_or(0.0))
        .collect();
    let acc = |q: f64, memory: f64, r: f64| -w0sq * q - memory + r;

    for i in 0..steps {
        // trapezoidal history sums over the already known velocities
        // v_0..v_i, evaluated at t_i, t_i + dt/2 and t_i + dt
        let (mut f0, mut fh, mut f1) = (0.0, 0.0, 0.0);
        if i > 0 {
            for (k, &vk) in v.iter().enumerate() {
                let c = if k == 0 || k == i { 0.5 * dt } else { dt };
                let j = 2 * (i - k);
                f0 += c * kh[j] * vk;
                fh += c * kh[j + 1] * vk;
                f1 += c * kh[j + 2] * vk;
            }
        }
        let (qi, vi) = (q[i], v[i]);
        // memory at the stage times, closing the trapezoid with the trial velocity
        let mem_half = |vs: f64| fh + 0.25 * dt * (kh[1] * vi + kh[0] * vs);
        let mem_full = |vs: f64| f1 + 0.5 * dt * (kh[2] * vi + kh[0] * vs);
        let (rh, r1) = (noise_half[2 * i + 1], noise_half[2 * i + 2]);

        let k1 = (vi, acc(qi, f0, noise_half[2 * i]));
        let k2 = {
            let (qs, vs) = (qi + 0.5 * dt * k1.0, vi + 0.5 * dt * k1.1);
            (vs, acc(qs, mem_half(vs), rh))
        };
        let k3 = {
            let (qs, vs) = (qi + 0.5 * dt * k2.0, vi + 0.5 * dt * k2.1);
            (vs, acc(qs, mem_half(vs), rh))
        };
        let k4 = {
            let (qs, vs) = (qi + dt * k3.0, vi + dt * k3.1);
            (vs, acc(qs, mem_full(vs), r1))
        };
        q.push(qi + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0));
        v.push(vi + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1));
    }
    Trajectory::new(dt, 0.0, q, v, Method::Gle)
}

/// RK4 solution of `q̈ + 2ωλ q̇ + ω² q = 0`.
pub fn integrate_damped_oscillator(
    omega: f64,
    lambda: f64,
    q0: f64,
    qdot0: f64,
    dt: f64,
    t_end: f64,
    label: Method,
) -> Result<Trajectory, DynamicsError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(DynamicsError::InvalidParameter {
            name: "omega",
            value: omega,
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(DynamicsError::InvalidParameter {
            name: "lambda",
            value: lambda,
        });
    }
    let steps = step_count(dt, t_end)?;
    check_step(dt, omega.max(2.0 * omega * lambda))?;
    let f = |q: f64, v: f64| (v, -2.0 * omega * lambda * v - omega * omega * q);
    let mut q = Vec::with_capacity(steps + 1);
    let mut v = Vec::with_capacity(steps + 1);
    let (mut qi, mut vi) = (q0, qdot0);
    q.push(qi);
    v.push(vi);
    for _ in 0..steps {
        let k1 = f(qi, vi);
        let k2 = f(qi + 0.5 * dt * k1.0, vi + 0.5 * dt * k1.1);
        let k3 = f(qi + 0.5 * dt * k2.0, vi + 0.5 * dt * k2.1);
        let k4 = f(qi + dt * k3.0, vi + dt * k3.1);
        qi += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        vi += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        q.push(qi);
        v.push(vi);
    }
    Trajectory::new(dt, 0.0, q, v, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize_ohmic, BathSpec, CouplingBound, Discretization, SystemParams};
    use crate::dynamics::integrate_full_hamiltonian;
    use crate::rng::seeded_rng;
    use rand::Rng;

    #[test]
    fn noise_vanishes_for_relaxed_bath() {
        // x_α(0) = γ_α q(0), p_α(0) = 0 is the bath minimum for fixed q(0)
        let bath = discretize_ohmic(
            &BathSpec::new(6, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let q0 = 0.7;
        let x0: Vec<f64> = bath.gamma().iter().map(|g| g * q0).collect();
        let p0 = vec![0.0; 6];
        for t in [0.0, 0.3, 2.0, 17.0] {
            assert!(classical_noise(&x0, &p0, q0, &bath, t).abs() < 1e-15);
        }
    }

    #[test]
    fn noise_at_zero_is_coupling_force() {
        let bath = discretize_ohmic(
            &BathSpec::new(3, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let x0 = [0.1, -0.2, 0.3];
        let expected: f64 = (0..3)
            .map(|a| {
                let (w, g) = (bath.omega()[a], bath.gamma()[a]);
                g * w * w * (x0[a] - g * 0.5)
            })
            .sum();
        let r = classical_noise(&x0, &[1.0, 1.0, 1.0], 0.5, &bath, 0.0);
        assert!((r - expected).abs() < 1e-15);
    }

    #[test]
    fn markov_matches_damped_oscillator() {
        let (omega, lambda) = (1.3, 0.2);
        let gle = integrate_gle(
            1.0,
            0.0,
            omega,
            MemoryKernel::Markov {
                friction: 2.0 * omega * lambda,
            },
            None,
            1e-3,
            5.0,
        )
        .unwrap();
        let rk =
            integrate_damped_oscillator(omega, lambda, 1.0, 0.0, 1e-3, 5.0, Method::MarkovQuantum)
                .unwrap();
        for (a, b) in gle.q.iter().zip(&rk.q) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn damped_oscillator_matches_closed_form() {
        let (omega, lambda) = (2.0, 0.3);
        let rk = integrate_damped_oscillator(omega, lambda, 0.0, 1.0, 1e-3, 10.0, Method::Merged)
            .unwrap();
        let wd = omega * (1.0 - lambda * lambda).sqrt();
        for (t, q) in rk.times().zip(&rk.q) {
            let exact = (-omega * lambda * t).exp() * (wd * t).sin() / wd;
            assert!((q - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn gle_reproduces_full_hamiltonian() {
        let params = SystemParams::new(1.0, 0.1, 0.5, 0.5).unwrap();
        let bath = discretize_ohmic(
            &BathSpec::new(12, 1.5, 1.0, Discretization::KernelMatched)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let mut r = seeded_rng(3);
        let point = PhasePoint {
            q: 0.6,
            p: -0.2,
            x: (0..12).map(|_| r.random_range(-0.5..0.5)).collect(),
            p_bath: (0..12).map(|_| r.random_range(-0.5..0.5)).collect(),
        };
        let full = integrate_full_hamiltonian(&point, &params, &bath, 2e-3, 4.0).unwrap();
        let gle = integrate_gle(
            point.q,
            point.p,
            params.omega0,
            MemoryKernel::Discrete(&bath),
            Some(GleNoise::from_point(&bath, &point)),
            2e-3,
            4.0,
        )
        .unwrap();
        let scale = full.trajectory.q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = full
            .trajectory
            .q
            .iter()
            .zip(&gle.q)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-5 * scale, "max deviation {err}");
    }

    #[test]
    fn gle_convolution_is_second_order() {
        // with R = 0 the error of the trapezoidal memory term scales as dt²
        let bath = discretize_ohmic(
            &BathSpec::new(8, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let run = |dt: f64| {
            integrate_gle(1.0, 0.0, 1.0, MemoryKernel::Discrete(&bath), None, dt, 2.0)
                .unwrap()
                .q
                .last()
                .copied()
                .unwrap()
        };
        let (a, b, c) = (run(4e-3), run(2e-3), run(1e-3));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.5, "convergence ratio {ratio}");
    }

    #[test]
    fn gle_rejects_coarse_step() {
        let err = integrate_gle(
            1.0,
            0.0,
            1.0,
            MemoryKernel::Continuum {
                lambda_q_prime: 1.0,
                omega_c: 50.0,
            },
            None,
            0.01,
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, DynamicsError::StepTooLarge { .. }));
    }
}
