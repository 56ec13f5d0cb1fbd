//! Classical potential, quantum potential and the Bohmian force algebra.
//!
//! For the real Gaussian ground state the quantum potential is quadratic in
//! `(q, x)`, so `−∂(Q+V)/∂q` is exactly linear: `−ξ² q + η(x)`. The force is
//! evaluated here twice, once by differentiating the explicit `Q` term by
//! term and once through the assembled coefficients `ξ²` and `η`.

use rand::Rng;
use thiserror::Error;

use crate::bath::BathRealization;
use crate::modes::{sample_ground_state, GroundState, ModesError, PhasePoint};
use crate::stats::MeanEstimate;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialsError {
    #[error("xi² = {xi_sq} is not positive; the bath is outside the oscillatory regime")]
    NegativeXiSq { xi_sq: f64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error(transparent)]
    Modes(#[from] ModesError),
}

/// `V = ½ω²q² + Σ_α [½ω_α² x_α² − γ_α q ω_α² x_α]`.
pub fn classical_potential(point: &PhasePoint, omega_sq: f64, bath: &BathRealization) -> f64 {
    let q = point.q;
    let mut v = 0.5 * omega_sq * q * q;
    for ((&w, &g), &x) in bath.omega().iter().zip(bath.gamma()).zip(&point.x) {
        let w2 = w * w;
        v += 0.5 * w2 * x * x - g * q * w2 * x;
    }
    v
}

/// Quantum potential of the ground state, written out in terms of `A`,
/// `B(x)` and the per-mode rotation data.
pub fn quantum_potential(point: &PhasePoint, gs: &GroundState) -> f64 {
    let h = gs.hbar();
    let nf = gs.n_modes() as f64;
    let q = point.q;
    let a_f = gs.a_factor();
    let b_f = gs.b_factor(&point.x);

    let system =
        2.0 * a_f - (4.0 * a_f * a_f * q * q + 4.0 * a_f * b_f * q + b_f * b_f) / (2.0 * h);
    let bath: f64 = gs
        .modes()
        .iter()
        .zip(&point.x)
        .map(|(m, &x)| {
            let (a2, b2) = (m.a * m.a, m.b * m.b);
            let lin = 2.0 * m.a * m.b * q * m.delta / nf
                + 2.0 * a2 * m.omega_plus * x
                + 2.0 * b2 * m.omega_minus * x;
            (2.0 * a2 * m.omega_plus + 2.0 * b2 * m.omega_minus) - lin * lin / (2.0 * h)
        })
        .sum();
    0.25 * h * (system + bath)
}

/// Rule for the Bohmian frequency ξ used in the damped solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XiRule {
    /// `ξ² = ω² − A² − Σ_α a²b²Δ_α²/N²`.
    Exact,
    /// `ξ² ≈ ω²`: the first and third terms dropped.
    EffectiveFrequency,
    /// `ξ² ≈ Σ_α γ_α² ω_α²`: additionally dropping `ω₀²`, the
    /// low-frequency-system limit (`λ' ω_c⁴` for the ω³ weighting).
    BathDominated,
}

impl XiRule {
    pub fn as_str(self) -> &'static str {
        match self {
            XiRule::Exact => "exact",
            XiRule::EffectiveFrequency => "effective_frequency",
            XiRule::BathDominated => "bath_dominated",
        }
    }

    pub fn xi_squared(self, coeffs: &BohmianCoefficients, bath: &BathRealization) -> f64 {
        match self {
            XiRule::Exact => coeffs.xi_sq,
            XiRule::EffectiveFrequency => coeffs.omega_sq,
            XiRule::BathDominated => bath.total_weight(),
        }
    }
}

impl std::str::FromStr for XiRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(XiRule::Exact),
            "effective_frequency" => Ok(XiRule::EffectiveFrequency),
            "bath_dominated" => Ok(XiRule::BathDominated),
            other => Err(format!(
                "unknown xi rule `{other}` (expected exact, effective_frequency or bath_dominated)"
            )),
        }
    }
}

/// Coefficients of the Bohmian Langevin force `−ξ² q + η(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BohmianCoefficients {
    pub xi_sq: f64,
    /// `η(x) = Σ_α eta_weights[α] x_α`; the `AB/2` term is folded in.
    pub eta_weights: Vec<f64>,
    /// `ω²` of the underlying ground state.
    pub omega_sq: f64,
}

impl BohmianCoefficients {
    pub fn xi(&self) -> f64 {
        self.xi_sq.sqrt()
    }

    pub fn eta(&self, x: &[f64]) -> f64 {
        self.eta_weights.iter().zip(x).map(|(w, x)| w * x).sum()
    }

    /// `⟨η⟩` for given coordinate means; zero means give exactly zero.
    pub fn eta_expectation(&self, mean_x: &[f64]) -> f64 {
        self.eta(mean_x)
    }

    /// `−ξ² q + η(x)`.
    pub fn force(&self, q: f64, x: &[f64]) -> f64 {
        -self.xi_sq * q + self.eta(x)
    }
}

/// Per-mode weights of `η`: `A·abΔ/N + γω² + (abΔ/N)(a²ω_+ + b²ω_−)`.
pub fn eta_weights(gs: &GroundState, bath: &BathRealization) -> Vec<f64> {
    let nf = gs.n_modes() as f64;
    let a_f = gs.a_factor();
    gs.modes()
        .iter()
        .zip(bath.omega().iter().zip(bath.gamma()))
        .map(|(m, (&w, &g))| {
            let c = m.a * m.b * m.delta / nf;
            a_f * c + g * w * w + c * (m.a * m.a * m.omega_plus + m.b * m.b * m.omega_minus)
        })
        .collect()
}

pub fn bohmian_coefficients(
    gs: &GroundState,
    bath: &BathRealization,
) -> Result<BohmianCoefficients, PotentialsError> {
    let coeffs = bohmian_coefficients_unchecked(gs, bath);
    // ξ² is a difference of O(ω²) terms; anything within roundoff of zero
    // counts as non-positive.
    if !(coeffs.xi_sq > 64.0 * f64::EPSILON * gs.omega_sq()) {
        return Err(PotentialsError::NegativeXiSq {
            xi_sq: coeffs.xi_sq,
        });
    }
    Ok(coeffs)
}

/// The force coefficients without the oscillatory-regime check. For a
/// single mode `ξ²` and `η` vanish up to roundoff, since the state is then
/// an exact eigenstate and `Q + V` is constant.
pub fn bohmian_coefficients_unchecked(
    gs: &GroundState,
    bath: &BathRealization,
) -> BohmianCoefficients {
    let nf = gs.n_modes() as f64;
    let a_f = gs.a_factor();
    let spread: f64 = gs
        .modes()
        .iter()
        .map(|m| (m.a * m.b * m.delta).powi(2))
        .sum::<f64>()
        / (nf * nf);
    BohmianCoefficients {
        xi_sq: gs.omega_sq() - a_f * a_f - spread,
        eta_weights: eta_weights(gs, bath),
        omega_sq: gs.omega_sq(),
    }
}

/// `−∂(Q+V)/∂q`, differentiating the explicit quantum potential term by term.
pub fn bohmian_force(point: &PhasePoint, gs: &GroundState, bath: &BathRealization) -> f64 {
    let nf = gs.n_modes() as f64;
    let q = point.q;
    let a_f = gs.a_factor();
    let b_f = gs.b_factor(&point.x);

    // ∂Q/∂q: only the bracketed squares depend on q; (ħ/4)/(2ħ) = 1/8.
    let mut bracket = 8.0 * a_f * a_f * q + 4.0 * a_f * b_f;
    for (m, &x) in gs.modes().iter().zip(&point.x) {
        let slope = 2.0 * m.a * m.b * m.delta / nf;
        let lin =
            slope * q + 2.0 * m.a * m.a * m.omega_plus * x + 2.0 * m.b * m.b * m.omega_minus * x;
        bracket += 2.0 * lin * slope;
    }
    let dq_quantum = -bracket / 8.0;

    let mut dq_classical = gs.omega_sq() * q;
    for ((&w, &g), &x) in bath.omega().iter().zip(bath.gamma()).zip(&point.x) {
        dq_classical -= g * w * w * x;
    }
    -(dq_quantum + dq_classical)
}

/// Monte Carlo estimate of `⟨η⟩` over ground-state samples.
pub fn mean_eta<R: Rng + ?Sized>(
    gs: &GroundState,
    bath: &BathRealization,
    sample_count: usize,
    rng: &mut R,
) -> Result<MeanEstimate, PotentialsError> {
    const MIN_SAMPLES: usize = 100;
    if sample_count < MIN_SAMPLES {
        return Err(PotentialsError::TooFewSamples {
            min: MIN_SAMPLES,
            got: sample_count,
        });
    }
    let weights = eta_weights(gs, bath);
    let values: Vec<f64> = sample_ground_state(gs, rng, sample_count)?
        .iter()
        .map(|p| weights.iter().zip(&p.x).map(|(w, x)| w * x).sum())
        .collect();
    Ok(MeanEstimate::from_values(&values))
}

/// One row of a 1-D scan of the potentials along `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceScanRow {
    pub q: f64,
    pub classical: f64,
    pub quantum: f64,
    pub force: f64,
}

/// Scans `V`, `Q` and the Bohmian force along `q` at fixed bath coordinates.
pub fn force_scan(
    gs: &GroundState,
    bath: &BathRealization,
    x_fixed: &[f64],
    q_values: &[f64],
) -> Vec<ForceScanRow> {
    q_values
        .iter()
        .map(|&q| {
            let point = PhasePoint {
                q,
                p: 0.0,
                x: x_fixed.to_vec(),
                p_bath: vec![0.0; x_fixed.len()],
            };
            ForceScanRow {
                q,
                classical: classical_potential(&point, gs.omega_sq(), bath),
                quantum: quantum_potential(&point, gs),
                force: bohmian_force(&point, gs, bath),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize_ohmic, BathSpec, CouplingBound, Discretization};
    use crate::modes::build_ground_state;
    use crate::rng::seeded_rng;
    use approx::assert_relative_eq;

    use crate::bath::SystemParams;

    fn eq44(n: usize, hbar: f64) -> (SystemParams, BathRealization, GroundState) {
        let params = SystemParams::new(1.0, hbar, 0.5, 0.5).unwrap();
        let bath = discretize_ohmic(
            &BathSpec::new(n, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let gs = build_ground_state(&params, &bath).unwrap();
        (params, bath, gs)
    }

    fn point(q: f64, x: Vec<f64>) -> PhasePoint {
        let n = x.len();
        PhasePoint {
            q,
            p: 0.0,
            x,
            p_bath: vec![0.0; n],
        }
    }

    #[test]
    fn classical_potential_examples() {
        let bath =
            BathRealization::from_arrays(vec![1.0], vec![0.5], CouplingBound::Strict).unwrap();
        assert_eq!(classical_potential(&point(0.0, vec![0.0]), 4.0, &bath), 0.0);
        assert_eq!(classical_potential(&point(1.0, vec![1.0]), 4.0, &bath), 2.0);
        let v1 = classical_potential(&point(0.3, vec![-0.7]), 4.0, &bath);
        let v2 = classical_potential(&point(-0.3, vec![0.7]), 4.0, &bath);
        assert_eq!(v1, v2);
    }

    #[test]
    fn quantum_potential_at_origin() {
        let (_, _, gs) = eq44(10, 0.2);
        let q = quantum_potential(&point(0.0, vec![0.0; 10]), &gs);
        let trace: f64 = gs
            .modes()
            .iter()
            .map(|m| m.a * m.a * m.omega_plus + m.b * m.b * m.omega_minus)
            .sum();
        assert_relative_eq!(q, 0.1 * (gs.a_factor() + trace), max_relative = 1e-14);
    }

    #[test]
    fn quantum_potential_matches_gaussian_identity() {
        // For R ∝ exp(−vᵀMv/2ħ): Q = (ħ/2) tr M − ½ |Mv|².
        let (_, _, gs) = eq44(5, 0.7);
        let x = vec![0.1, -0.2, 0.05, 0.3, -0.1];
        let q = 0.4;
        let m = gs.precision_core();
        let mut v = nalgebra::DVector::zeros(6);
        v[0] = q;
        for i in 0..5 {
            v[i + 1] = x[i];
        }
        let mv = m * &v;
        let expected = 0.5 * gs.hbar() * m.trace() - 0.5 * mv.norm_squared();
        assert_relative_eq!(
            quantum_potential(&point(q, x), &gs),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn xi_sq_without_coupling() {
        let n = 100;
        let omega: Vec<f64> = (1..=n).map(|a| (a as f64 - 0.5) * 0.015).collect();
        let bath =
            BathRealization::from_arrays(omega, vec![1e-12; n], CouplingBound::Strict).unwrap();
        let params = SystemParams::new(1.0, 0.1, 0.5, 0.5).unwrap();
        let gs = build_ground_state(&params, &bath).unwrap();
        let c = bohmian_coefficients(&gs, &bath).unwrap();
        assert_relative_eq!(c.xi_sq, 0.9999, max_relative = 1e-12);
    }

    #[test]
    fn xi_for_cubic_weight_bath() {
        let (_, bath, gs) = eq44(100, 0.1);
        let c = bohmian_coefficients(&gs, &bath).unwrap();
        assert_relative_eq!(c.omega_sq, 6.0625, max_relative = 1e-12);
        // the first and third terms are small for large N
        assert!((c.xi_sq - 6.0625).abs() / 6.0625 < 2e-3);
        assert_relative_eq!(
            XiRule::EffectiveFrequency.xi_squared(&c, &bath).sqrt(),
            2.462_214_450_449_026,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            XiRule::BathDominated.xi_squared(&c, &bath).sqrt(),
            2.25,
            max_relative = 1e-12
        );
    }

    #[test]
    fn eta_is_linear_and_vanishes_at_origin() {
        let (_, bath, gs) = eq44(12, 0.1);
        let c = bohmian_coefficients(&gs, &bath).unwrap();
        assert_eq!(c.eta(&[0.0; 12]), 0.0);
        assert_eq!(c.eta_expectation(&[0.0; 12]), 0.0);
        let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin()).collect();
        let scaled: Vec<f64> = x.iter().map(|v| -2.5 * v).collect();
        assert_relative_eq!(c.eta(&scaled), -2.5 * c.eta(&x), max_relative = 1e-13);
    }

    #[test]
    fn force_at_origin_vanishes() {
        let (_, bath, gs) = eq44(8, 0.1);
        assert_eq!(bohmian_force(&point(0.0, vec![0.0; 8]), &gs, &bath), 0.0);
    }

    #[test]
    fn force_identity_single_point() {
        let (_, bath, gs) = eq44(32, 0.05);
        let c = bohmian_coefficients(&gs, &bath).unwrap();
        let x: Vec<f64> = (0..32).map(|i| 0.1 * ((i * 7 % 11) as f64 - 5.0)).collect();
        let p = point(0.37, x);
        let direct = bohmian_force(&p, &gs, &bath);
        assert_relative_eq!(direct, c.force(p.q, &p.x), max_relative = 1e-10);
    }

    #[test]
    fn single_mode_has_no_restoring_force() {
        // With one mode the product state is the exact ground state, so
        // Q + V is constant and ξ² vanishes up to roundoff.
        let bath =
            BathRealization::from_arrays(vec![1.0], vec![0.5], CouplingBound::Strict).unwrap();
        let params = SystemParams::new(1.0, 0.1, 0.5, 0.5).unwrap();
        let gs = build_ground_state(&params, &bath).unwrap();
        match bohmian_coefficients(&gs, &bath) {
            Err(PotentialsError::NegativeXiSq { xi_sq }) => assert!(xi_sq.abs() < 1e-13),
            other => panic!("expected NegativeXiSq, got {other:?}"),
        }
        let w = eta_weights(&gs, &bath);
        assert!(w[0].abs() < 1e-14);
    }

    #[test]
    fn mean_eta_needs_enough_samples() {
        let (_, bath, gs) = eq44(4, 0.1);
        let err = mean_eta(&gs, &bath, 99, &mut seeded_rng(1)).unwrap_err();
        assert_eq!(err, PotentialsError::TooFewSamples { min: 100, got: 99 });
    }

    #[test]
    fn mean_eta_stderr_halves_with_four_times_samples() {
        let (_, bath, gs) = eq44(6, 0.1);
        let small = mean_eta(&gs, &bath, 10_000, &mut seeded_rng(3)).unwrap();
        let large = mean_eta(&gs, &bath, 40_000, &mut seeded_rng(4)).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!((ratio - 2.0).abs() < 0.4, "stderr ratio {ratio}");
        assert!(small.z_score(0.0) < 4.0);
        assert!(large.z_score(0.0) < 4.0);
    }
}
