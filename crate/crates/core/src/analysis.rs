//! Damped-sine fitting, trajectory comparison and regime classification.

use crate::dynamics::Trajectory;
use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use std::f64::consts::PI;
use thiserror::Error;

/// Fit of `A e^{−γt} sin(Ωt + φ)` with `A ≥ 0` and `φ ∈ (−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedSineFit {
    pub amplitude: f64,
    pub decay_rate: f64,
    pub frequency: f64,
    pub phase: f64,
    pub residual_rms: f64,
}

impl DampedSineFit {
    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * (-self.decay_rate * t).exp() * (self.frequency * t + self.phase).sin()
    }

    fn from_params(p: &Vector4<f64>, residual_rms: f64) -> Self {
        let (mut a, g, mut w, mut phi) = (p[0], p[1], p[2], p[3]);
        // A sin(−|Ω|t + φ) = −A sin(|Ω|t − φ)
        if w < 0.0 {
            w = -w;
            phi = -phi;
            a = -a;
        }
        if a < 0.0 {
            a = -a;
            phi += PI;
        }
        phi = wrap_phase(phi);
        Self {
            amplitude: a,
            decay_rate: g,
            frequency: w,
            phase: phi,
            residual_rms,
        }
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("signal cannot be fitted: {0}")]
    DegenerateSignal(String),
    #[error("fit did not converge; best estimate {best:?}")]
    NoConvergence { best: DampedSineFit },
    #[error("trajectories are on different grids: {0}")]
    GridMismatch(String),
}

/// Iteration cap of the Levenberg-Marquardt refinement.
pub const MAX_FIT_ITERATIONS: usize = 100;
/// Relative parameter step below which the fit is considered converged.
pub const FIT_STEP_TOLERANCE: f64 = 1e-10;

/// Robust white-noise level estimated from eighth-order differences, which
/// annihilate any smooth, well-sampled signal.
fn noise_sigma(q: &[f64]) -> f64 {
    const BINOM: [f64; 9] = [1.0, 8.0, 28.0, 56.0, 70.0, 56.0, 28.0, 8.0, 1.0];
    // Σ C(8,j)² = C(16,8)
    const NORM: f64 = 12870.0;
    let mut d: Vec<f64> = q
        .windows(9)
        .map(|w| {
            w.iter()
                .zip(BINOM)
                .enumerate()
                .map(|(j, (v, c))| if j % 2 == 0 { c * v } else { -c * v })
                .sum::<f64>()
                .abs()
        })
        .collect();
    let mid = d.len() / 2;
    let (_, median, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    *median / (0.6745 * NORM.sqrt())
}

/// Extremum times and magnitudes of the interior half-oscillations.
///
/// The signal is cut into lobes of constant sign; a sign change only counts
/// once the signal leaves the band `±floor`, so noise around zero crossings
/// cannot split a lobe. The first and last lobes may be truncated and are
/// dropped.
fn interior_peaks(times: &[f64], q: &[f64], floor: f64) -> Vec<(f64, f64)> {
    let mut lobes: Vec<(usize, usize, f64)> = Vec::new();
    let mut start = 0;
    let mut sign = 0.0;
    for (k, &v) in q.iter().enumerate() {
        let s = if v > floor {
            1.0
        } else if v < -floor {
            -1.0
        } else {
            continue;
        };
        if sign != 0.0 && s != sign {
            lobes.push((start, k, sign));
            start = k;
        }
        sign = s;
    }
    lobes.push((start, q.len(), sign));
    if lobes.len() < 3 {
        return Vec::new();
    }
    let dt = times[1] - times[0];
    lobes[1..lobes.len() - 1]
        .iter()
        .filter_map(|&(lo, hi, s)| {
            let k = (lo..hi).max_by(|&i, &j| (s * q[i]).total_cmp(&(s * q[j])))?;
            if k == 0 || k + 1 >= q.len() {
                return None;
            }
            let (ym, y0, yp) = (s * q[k - 1], s * q[k], s * q[k + 1]);
            let curv = ym - 2.0 * y0 + yp;
            let shift = if curv < 0.0 {
                (0.5 * (ym - yp) / curv).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            let peak = y0 - 0.25 * (ym - yp) * shift;
            Some((times[k] + shift * dt, peak))
        })
        .collect()
}

/// Initial guess from peak spacing, peak decay and a linear amplitude fit.
fn seed(times: &[f64], q: &[f64], peaks: &[(f64, f64)]) -> Option<Vector4<f64>> {
    let n = peaks.len() as f64;
    let spacing = (peaks[peaks.len() - 1].0 - peaks[0].0) / (n - 1.0);
    if !(spacing > 0.0) {
        return None;
    }
    let omega = PI / spacing;

    // ln|peak| = c − γ t
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in peaks {
        let ly = y.ln();
        st += t;
        sy += ly;
        stt += t * t;
        sty += t * ly;
    }
    let den = n * stt - st * st;
    let gamma = if den > 0.0 {
        -(n * sty - st * sy) / den
    } else {
        0.0
    };

    // q ≈ e^{−γt}(α sin Ωt + β cos Ωt), α = A cos φ, β = A sin φ
    let mut m = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for (&t, &y) in times.iter().zip(q) {
        let e = (-gamma * t).exp();
        let basis = Vector2::new(e * (omega * t).sin(), e * (omega * t).cos());
        m += basis * basis.transpose();
        rhs += basis * y;
    }
    let ab = m.lu().solve(&rhs)?;
    let p = Vector4::new(ab[0].hypot(ab[1]), gamma, omega, ab[1].atan2(ab[0]));
    p.iter().all(|v| v.is_finite()).then_some(p)
}

fn sum_sq_residuals(times: &[f64], q: &[f64], p: &Vector4<f64>) -> f64 {
    times
        .iter()
        .zip(q)
        .map(|(&t, &y)| {
            let r = p[0] * (-p[1] * t).exp() * (p[2] * t + p[3]).sin() - y;
            r * r
        })
        .sum()
}

/// Fits `A e^{−γt} sin(Ωt + φ)` to `q(t)` over the whole trajectory.
///
/// Fails with [`FitError::DegenerateSignal`] when fewer than three interior
/// half-oscillations rise above the estimated noise floor.
pub fn fit_damped_sine(traj: &Trajectory) -> Result<DampedSineFit, FitError> {
    let q = &traj.q;
    if q.len() < 16 {
        return Err(FitError::DegenerateSignal(format!(
            "{} samples, need at least 16",
            q.len()
        )));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(FitError::DegenerateSignal("non-finite samples".into()));
    }
    let times: Vec<f64> = traj.times().collect();
    let scale = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(FitError::DegenerateSignal(
            "signal is identically zero".into(),
        ));
    }
    let floor = (10.0 * noise_sigma(q)).max(1e-14 * scale);
    let peaks = interior_peaks(&times, q, floor);
    if peaks.len() < 3 {
        return Err(FitError::DegenerateSignal(format!(
            "{} interior extrema above noise floor {floor:.3e}, need 3",
            peaks.len()
        )));
    }
    let mut p = seed(&times, q, &peaks)
        .ok_or_else(|| FitError::DegenerateSignal("could not seed the fit".into()))?;

    let npts = q.len() as f64;
    let mut cost = sum_sq_residuals(&times, q, &p);
    let mut mu = 1e-3;
    for _ in 0..MAX_FIT_ITERATIONS {
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for (&t, &y) in times.iter().zip(q) {
            let e = (-p[1] * t).exp();
            let (s, c) = (p[2] * t + p[3]).sin_cos();
            let r = p[0] * e * s - y;
            let j = Vector4::new(e * s, -t * p[0] * e * s, t * p[0] * e * c, p[0] * e * c);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let mut damped = jtj;
        for i in 0..4 {
            damped[(i, i)] += mu * jtj[(i, i)].max(1e-300);
        }
        let Some(step) = damped.cholesky().map(|ch| ch.solve(&(-jtr))) else {
            mu *= 10.0;
            continue;
        };
        let small = step.norm() <= FIT_STEP_TOLERANCE * (p.norm() + FIT_STEP_TOLERANCE);
        let trial = p + step;
        let trial_cost = sum_sq_residuals(&times, q, &trial);
        if trial_cost.is_finite() && trial_cost <= cost {
            p = trial;
            cost = trial_cost;
            mu = (mu * 0.3).max(1e-12);
        } else {
            mu *= 10.0;
        }
        if small {
            return Ok(DampedSineFit::from_params(&p, (cost / npts).sqrt()));
        }
    }
    Err(FitError::NoConvergence {
        best: DampedSineFit::from_params(&p, (cost / npts).sqrt()),
    })
}

/// Pointwise and fitted-parameter comparison of two trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// `‖b − a‖₂ / ‖a‖₂`
    pub relative_l2: f64,
    pub max_abs_diff: f64,
    pub fit_a: Option<DampedSineFit>,
    pub fit_b: Option<DampedSineFit>,
    /// `γ_b / γ_a` when both fits succeed.
    pub decay_ratio: Option<f64>,
    /// `Ω_b / Ω_a` when both fits succeed.
    pub frequency_ratio: Option<f64>,
}

pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<Comparison, FitError> {
    if a.len() != b.len() {
        return Err(FitError::GridMismatch(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    if (a.dt - b.dt).abs() > 1e-12 * a.dt || (a.t0 - b.t0).abs() > 1e-12 * a.dt {
        return Err(FitError::GridMismatch(format!(
            "dt {} / t0 {} vs dt {} / t0 {}",
            a.dt, a.t0, b.dt, b.t0
        )));
    }
    let (mut diff_sq, mut norm_sq, mut max_abs) = (0.0, 0.0, 0.0f64);
    for (x, y) in a.q.iter().zip(&b.q) {
        let d = y - x;
        diff_sq += d * d;
        norm_sq += x * x;
        max_abs = max_abs.max(d.abs());
    }
    let relative_l2 = if norm_sq > 0.0 {
        (diff_sq / norm_sq).sqrt()
    } else if diff_sq == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let fit_a = fit_damped_sine(a).ok();
    let fit_b = fit_damped_sine(b).ok();
    let ratio = |f: fn(&DampedSineFit) -> f64| match (&fit_a, &fit_b) {
        (Some(fa), Some(fb)) if f(fa) != 0.0 => Some(f(fb) / f(fa)),
        _ => None,
    };
    Ok(Comparison {
        relative_l2,
        max_abs_diff: max_abs,
        decay_ratio: ratio(|f| f.decay_rate),
        frequency_ratio: ratio(|f| f.frequency),
        fit_a,
        fit_b,
    })
}

/// Parameter regimes of the bath relative to the system frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Broad bath, `ω_c²/ω₀` large: the bath dominates the effective frequency.
    Regime1,
    /// Narrow bath, `ω_c²/ω₀` small: the quantum and Bohmian pictures agree.
    Regime2,
    Intermediate,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Regime1 => "regime1",
            Regime::Regime2 => "regime2",
            Regime::Intermediate => "intermediate",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Boundaries on `r = ω_c²/ω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// `r` strictly above this is regime 1.
    pub regime1_above: f64,
    /// `r` at or below this is regime 2.
    pub regime2_at_or_below: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            regime1_above: 1.0,
            regime2_at_or_below: 0.1,
        }
    }
}

pub fn regime_ratio(omega0: f64, omega_c: f64) -> f64 {
    omega_c * omega_c / omega0
}

/// Regime label together with the ratio `r = ω_c²/ω₀` it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClassification {
    pub regime: Regime,
    pub ratio: f64,
}

pub fn classify_regime(omega0: f64, omega_c: f64) -> RegimeClassification {
    classify_regime_with(omega0, omega_c, &RegimeThresholds::default())
}

pub fn classify_regime_with(
    omega0: f64,
    omega_c: f64,
    th: &RegimeThresholds,
) -> RegimeClassification {
    let ratio = regime_ratio(omega0, omega_c);
    let regime = if ratio > th.regime1_above {
        Regime::Regime1
    } else if ratio <= th.regime2_at_or_below {
        Regime::Regime2
    } else {
        Regime::Intermediate
    };
    RegimeClassification { regime, ratio }
}
