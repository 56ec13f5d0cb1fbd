//! Classical equations of motion of the full bilinear Hamiltonian
//!
//! ```text
//! H = p²/2 + ½ω²q² + Σ_α [p_α²/2 + ½ω_α² x_α² − γ_α ω_α² q x_α]
//! ```
//!
//! integrated with symplectic splitting methods.

use super::{check_step, step_count, DynamicsError, Method, Trajectory};
use crate::bath::{effective_frequency_squared, BathRealization, SystemParams};
use crate::modes::{to_normal_coords, ModePair, PhasePoint};

/// Splitting scheme for the Hamiltonian integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymplecticScheme {
    /// Second-order velocity Verlet.
    VelocityVerlet,
    /// Fourth-order Yoshida composition of three velocity Verlet substeps.
    #[default]
    Yoshida4,
}

impl SymplecticScheme {
    fn substeps(self) -> &'static [f64] {
        // w1 = 1/(2 − 2^{1/3}), w0 = −2^{1/3}/(2 − 2^{1/3})
        const W1: f64 = 1.351_207_191_959_657_8;
        const W0: f64 = -1.702_414_383_919_315_3;
        match self {
            SymplecticScheme::VelocityVerlet => &[1.0],
            SymplecticScheme::Yoshida4 => &[W1, W0, W1],
        }
    }
}

/// Trajectory of `q` plus the final phase point.
#[derive(Debug, Clone, PartialEq)]
pub struct FullRun {
    pub trajectory: Trajectory,
    pub final_point: PhasePoint,
}

struct Oscillators<'a> {
    omega_sq: f64,
    bath: &'a BathRealization,
    /// `γ_α ω_α²`
    coupling: Vec<f64>,
}

impl<'a> Oscillators<'a> {
    fn new(params: &SystemParams, bath: &'a BathRealization) -> Self {
        let coupling = bath
            .omega()
            .iter()
            .zip(bath.gamma())
            .map(|(w, g)| g * w * w)
            .collect();
        Self {
            omega_sq: effective_frequency_squared(params, bath),
            bath,
            coupling,
        }
    }

    fn accelerations(&self, point: &PhasePoint, acc_x: &mut [f64]) -> f64 {
        let mut acc_q = -self.omega_sq * point.q;
        for (((acc, &x), &k), &w) in acc_x
            .iter_mut()
            .zip(&point.x)
            .zip(&self.coupling)
            .zip(self.bath.omega())
        {
            acc_q += k * x;
            *acc = -w * w * x + k * point.q;
        }
        acc_q
    }
}

/// Integrates the full Hamiltonian with the fourth-order scheme.
pub fn integrate_full_hamiltonian(
    initial: &PhasePoint,
    params: &SystemParams,
    bath: &BathRealization,
    dt: f64,
    t_end: f64,
) -> Result<FullRun, DynamicsError> {
    integrate_full_hamiltonian_with(
        initial,
        params,
        bath,
        dt,
        t_end,
        SymplecticScheme::default(),
    )
}

pub fn integrate_full_hamiltonian_with(
    initial: &PhasePoint,
    params: &SystemParams,
    bath: &BathRealization,
    dt: f64,
    t_end: f64,
    scheme: SymplecticScheme,
) -> Result<FullRun, DynamicsError> {
    let n = bath.len();
    for len in [initial.x.len(), initial.p_bath.len()] {
        if len != n {
            return Err(DynamicsError::LengthMismatch {
                expected: n,
                got: len,
            });
        }
    }
    let steps = step_count(dt, t_end)?;
    let osc = Oscillators::new(params, bath);
    check_step(dt, osc.omega_sq.sqrt().max(bath.max_omega()))?;

    let mut point = initial.clone();
    let mut acc_x = vec![0.0; n];
    let mut acc_q = osc.accelerations(&point, &mut acc_x);

    let mut q = Vec::with_capacity(steps + 1);
    let mut qdot = Vec::with_capacity(steps + 1);
    q.push(point.q);
    qdot.push(point.p);

    for _ in 0..steps {
        for &w in scheme.substeps() {
            let h = w * dt;
            // kick, drift, kick
            point.p += 0.5 * h * acc_q;
            for (pb, a) in point.p_bath.iter_mut().zip(&acc_x) {
                *pb += 0.5 * h * a;
            }
            point.q += h * point.p;
            for (x, pb) in point.x.iter_mut().zip(&point.p_bath) {
                *x += h * pb;
            }
            acc_q = osc.accelerations(&point, &mut acc_x);
            point.p += 0.5 * h * acc_q;
            for (pb, a) in point.p_bath.iter_mut().zip(&acc_x) {
                *pb += 0.5 * h * a;
            }
        }
        q.push(point.q);
        qdot.push(point.p);
    }

    Ok(FullRun {
        trajectory: Trajectory::new(dt, 0.0, q, qdot, Method::Full)?,
        final_point: point,
    })
}

/// Energy split into system, environment and interaction parts.
///
/// `system = p²/2 + ½ω₀²q²`; `interaction` carries `−Σγω²qx` and the
/// counterterm `½Σγ²ω²q²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub system: f64,
    pub environment: f64,
    pub interaction: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.system + self.environment + self.interaction
    }
}

pub fn energy_breakdown(
    point: &PhasePoint,
    params: &SystemParams,
    bath: &BathRealization,
) -> EnergyBreakdown {
    let q = point.q;
    let system = 0.5 * point.p * point.p + 0.5 * params.omega0 * params.omega0 * q * q;
    let mut environment = 0.0;
    let mut interaction = 0.5 * bath.total_weight() * q * q;
    for ((&w, &g), (&x, &pb)) in bath
        .omega()
        .iter()
        .zip(bath.gamma())
        .zip(point.x.iter().zip(&point.p_bath))
    {
        environment += 0.5 * pb * pb + 0.5 * w * w * x * x;
        interaction -= g * w * w * q * x;
    }
    EnergyBreakdown {
        system,
        environment,
        interaction,
    }
}

/// Total energy of the full Hamiltonian.
pub fn total_energy(point: &PhasePoint, params: &SystemParams, bath: &BathRealization) -> f64 {
    let q = point.q;
    let mut h = 0.5 * point.p * point.p + 0.5 * effective_frequency_squared(params, bath) * q * q;
    for ((&w, &g), (&x, &pb)) in bath
        .omega()
        .iter()
        .zip(bath.gamma())
        .zip(point.x.iter().zip(&point.p_bath))
    {
        h += 0.5 * pb * pb + 0.5 * w * w * x * x - w * w * g * q * x;
    }
    h
}

/// Energy of the (system, mode α) pair with `q' = q/N`, `p' = p/N`:
/// `p'²/2 + ½ω²q'² + p_α²/2 + ½ω_α²x_α² − ω_α²γ_α q' x_α`.
#[allow(clippy::too_many_arguments)]
pub fn pair_energy(
    q: f64,
    p: f64,
    x_alpha: f64,
    p_alpha: f64,
    n_modes: usize,
    omega_sq: f64,
    omega_alpha: f64,
    gamma_alpha: f64,
) -> f64 {
    let nf = n_modes as f64;
    let (qs, ps) = (q / nf, p / nf);
    let w2 = omega_alpha * omega_alpha;
    0.5 * ps * ps
        + 0.5 * omega_sq * qs * qs
        + 0.5 * p_alpha * p_alpha
        + 0.5 * w2 * x_alpha * x_alpha
        - w2 * gamma_alpha * qs * x_alpha
}

/// The same pair energy in normal-mode form, returned as `(H_+, H_−)`.
pub fn normal_mode_energies(
    q: f64,
    p: f64,
    x_alpha: f64,
    p_alpha: f64,
    n_modes: usize,
    mode: &ModePair,
) -> (f64, f64) {
    let (xp, xm) = to_normal_coords(q, x_alpha, mode.theta, n_modes);
    let (pp, pm) = to_normal_coords(p, p_alpha, mode.theta, n_modes);
    (
        0.5 * pp * pp + 0.5 * mode.omega_plus.powi(2) * xp * xp,
        0.5 * pm * pm + 0.5 * mode.omega_minus.powi(2) * xm * xm,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize_ohmic, BathSpec, CouplingBound, Discretization};
    use crate::modes::{mode_frequencies, rotation_angle};
    use crate::rng::seeded_rng;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn params(omega0: f64) -> SystemParams {
        SystemParams::new(omega0, 0.1, 0.5, 0.5).unwrap()
    }

    fn random_point<R: Rng>(r: &mut R, n: usize) -> PhasePoint {
        PhasePoint {
            q: r.random_range(-1.0..1.0),
            p: r.random_range(-1.0..1.0),
            x: (0..n).map(|_| r.random_range(-1.0..1.0)).collect(),
            p_bath: (0..n).map(|_| r.random_range(-1.0..1.0)).collect(),
        }
    }

    #[test]
    fn energy_at_origin_is_zero() {
        let bath = discretize_ohmic(
            &BathSpec::new(5, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        assert_eq!(
            total_energy(&PhasePoint::at_rest(0.0, 5), &params(1.0), &bath),
            0.0
        );
    }

    #[test]
    fn breakdown_sums_to_total() {
        let bath = discretize_ohmic(
            &BathSpec::new(9, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let mut r = seeded_rng(5);
        for _ in 0..20 {
            let pt = random_point(&mut r, 9);
            let b = energy_breakdown(&pt, &params(1.0), &bath);
            assert_relative_eq!(
                b.total(),
                total_energy(&pt, &params(1.0), &bath),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn normal_form_split_matches_pair_energy() {
        let mut r = seeded_rng(11);
        for _ in 0..200 {
            let n: usize = r.random_range(1..50);
            let w: f64 = r.random_range(0.1..3.0);
            let g: f64 = r.random_range(0.01..0.99);
            let omega0: f64 = r.random_range(0.2..3.0);
            let omega_sq = omega0 * omega0 + g * g * w * w;
            let mode = mode_frequencies(rotation_angle(omega_sq, w, g), omega_sq, w, g).unwrap();
            let (q, p, x, pa) = (
                r.random_range(-2.0..2.0),
                r.random_range(-2.0..2.0),
                r.random_range(-2.0..2.0),
                r.random_range(-2.0..2.0),
            );
            let direct = pair_energy(q, p, x, pa, n, omega_sq, w, g);
            let (hp, hm) = normal_mode_energies(q, p, x, pa, n, &mode);
            assert_relative_eq!(hp + hm, direct, max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn uncoupled_system_is_bare_oscillator() {
        let bath =
            BathRealization::from_arrays(vec![0.5, 1.2], vec![0.0, 0.0], CouplingBound::Strict)
                .unwrap();
        let initial = PhasePoint {
            q: 0.8,
            p: -0.3,
            x: vec![0.0; 2],
            p_bath: vec![0.0; 2],
        };
        let run = integrate_full_hamiltonian(&initial, &params(1.3), &bath, 1e-3, 10.0).unwrap();
        let w0 = 1.3f64;
        let max_err = run
            .trajectory
            .times()
            .zip(&run.trajectory.q)
            .map(|(t, q)| (q - (0.8 * (w0 * t).cos() - 0.3 / w0 * (w0 * t).sin())).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-8, "max error {max_err}");
    }

    #[test]
    fn verlet_is_second_order_only() {
        // Velocity Verlet alone cannot reach 1e-8 at dt = 1e-3; its phase
        // error grows as ω³dt²t/24.
        let bath =
            BathRealization::from_arrays(vec![1.0], vec![0.0], CouplingBound::Strict).unwrap();
        let initial = PhasePoint::at_rest(1.0, 1);
        let run = integrate_full_hamiltonian_with(
            &initial,
            &params(1.0),
            &bath,
            1e-3,
            10.0,
            SymplecticScheme::VelocityVerlet,
        )
        .unwrap();
        let err = (run.trajectory.q.last().unwrap() - 10f64.cos()).abs();
        assert!(err > 1e-8 && err < 1e-6, "verlet error {err}");
    }

    #[test]
    fn resonant_pair_follows_normal_mode_solution() {
        // ω₁ = ω₀ with weak coupling: energy beats between q and x₁.
        let omega0 = 1.0;
        let g = 0.05;
        let bath =
            BathRealization::from_arrays(vec![omega0], vec![g], CouplingBound::Strict).unwrap();
        let p = params(omega0);
        let omega_sq = effective_frequency_squared(&p, &bath);
        let mode =
            mode_frequencies(rotation_angle(omega_sq, omega0, g), omega_sq, omega0, g).unwrap();
        let beat_period = 2.0 * std::f64::consts::PI / mode.delta.abs();
        let t_end = beat_period.ceil();
        let run = integrate_full_hamiltonian(&PhasePoint::at_rest(1.0, 1), &p, &bath, 1e-3, t_end)
            .unwrap();
        // q(0) = 1, everything else zero: q(t) = b² cos ω_+t + a² cos ω_−t.
        let (a2, b2) = (mode.a * mode.a, mode.b * mode.b);
        let max_err = run
            .trajectory
            .times()
            .zip(&run.trajectory.q)
            .map(|(t, q)| {
                (q - (b2 * (mode.omega_plus * t).cos() + a2 * (mode.omega_minus * t).cos())).abs()
            })
            .fold(0.0, f64::max);
        assert!(max_err < 1e-2, "max deviation {max_err}");

        // the envelope minimum of q sits at half the beat period
        let env_min_time = run
            .trajectory
            .q
            .windows(3)
            .enumerate()
            .filter(|(_, w)| w[1].abs() >= w[0].abs() && w[1].abs() >= w[2].abs())
            .map(|(k, w)| ((k + 1) as f64 * 1e-3, w[1].abs()))
            .filter(|&(t, _)| t > 0.25 * beat_period && t < 0.75 * beat_period)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        assert!((env_min_time - 0.5 * beat_period).abs() < 0.01 * beat_period);
    }

    #[test]
    fn step_guard() {
        let bath = discretize_ohmic(
            &BathSpec::new(4, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let err =
            integrate_full_hamiltonian(&PhasePoint::at_rest(1.0, 4), &params(1.0), &bath, 0.1, 1.0)
                .unwrap_err();
        assert!(matches!(err, DynamicsError::StepTooLarge { .. }));
    }

    #[test]
    fn mismatched_initial_point_is_rejected() {
        let bath = discretize_ohmic(
            &BathSpec::new(4, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let err = integrate_full_hamiltonian(
            &PhasePoint::at_rest(1.0, 3),
            &params(1.0),
            &bath,
            1e-3,
            1.0,
        )
        .unwrap_err();
        assert_eq!(
            err,
            DynamicsError::LengthMismatch {
                expected: 4,
                got: 3
            }
        );
    }
}
