//! Per-mode rotation decoupling and the Gaussian ground state.
//!
//! Each bath mode α is paired with the scaled system coordinate `q' = q/N`.
//! The 2×2 potential of the pair,
//!
//! ```text
//! ½ ω² q'² + ½ ω_α² x_α² − γ_α ω_α² q' x_α,
//! ```
//!
//! is diagonalized by a rotation through `θ_α`, giving normal modes
//! `x_±α` with frequencies `ω_±α`. The ground state is the product of the
//! normal-mode Gaussians, which in the original coordinates
//! `v = (q, x_1, …, x_N)` reads `|ψ₀|² ∝ exp(−vᵀ M v / ħ)` with an
//! arrowhead precision matrix `M`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::bath::{effective_frequency_squared, BathRealization, SystemParams};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModesError {
    #[error("normal mode {alpha} has non-positive squared frequency {omega_sq}")]
    NonPositiveMode { alpha: usize, omega_sq: f64 },
    #[error(
        "precision matrix is not positive definite: A = {a}, Schur complement = {schur}, \
         smallest bath diagonal = {min_diag}"
    )]
    CholeskyFailure { a: f64, schur: f64, min_diag: f64 },
    #[error("the ground state needs at least one bath mode")]
    EmptyBath,
    #[error("sample count must be >= 1")]
    EmptySample,
}

/// Rotation and normal-mode frequencies of one (system, mode α) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePair {
    pub theta: f64,
    /// `sin θ`
    pub a: f64,
    /// `cos θ`
    pub b: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// `ω_+ − ω_−`
    pub delta: f64,
}

/// Instantaneous coordinates of the system and all bath modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
    pub x: Vec<f64>,
    pub p_bath: Vec<f64>,
}

impl PhasePoint {
    pub fn at_rest(q: f64, n_modes: usize) -> Self {
        Self {
            q,
            p: 0.0,
            x: vec![0.0; n_modes],
            p_bath: vec![0.0; n_modes],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.x.len()
    }
}

/// Angle that removes the cross term of the pair potential.
///
/// `θ = ½ atan2(−2 γ_α ω_α², ω² − ω_α²)`; the two-argument form keeps the
/// angle continuous through `ω² = ω_α²` (where it equals `−π/4`).
pub fn rotation_angle(omega_sq: f64, omega_alpha: f64, gamma_alpha: f64) -> f64 {
    let w2 = omega_alpha * omega_alpha;
    0.5 * (-2.0 * gamma_alpha * w2).atan2(omega_sq - w2)
}

/// Normal-mode frequencies of the pair rotated by `theta`.
///
/// The larger eigenvalue comes straight from the rotated diagonal; the
/// smaller one is recovered from the determinant `ω_α²(ω² − γ_α² ω_α²)`
/// so that it keeps full relative precision when the pair is stiff.
pub fn mode_frequencies(
    theta: f64,
    omega_sq: f64,
    omega_alpha: f64,
    gamma_alpha: f64,
) -> Result<ModePair, ModesError> {
    let (a, b) = theta.sin_cos();
    let w2 = omega_alpha * omega_alpha;
    // ω'² = −2 γ ω_α²
    let cross = -2.0 * gamma_alpha * w2;
    let plus_sq = omega_sq * b * b + w2 * a * a + cross * a * b;
    let minus_sq = omega_sq * a * a + w2 * b * b - cross * a * b;
    let det = w2 * (omega_sq - gamma_alpha * gamma_alpha * w2);

    let (plus_sq, minus_sq) = if plus_sq >= minus_sq {
        (plus_sq, det / plus_sq)
    } else {
        (det / minus_sq, minus_sq)
    };
    for value in [plus_sq, minus_sq] {
        if !(value > 0.0) {
            return Err(ModesError::NonPositiveMode {
                alpha: 0,
                omega_sq: value,
            });
        }
    }
    let omega_plus = plus_sq.sqrt();
    let omega_minus = minus_sq.sqrt();
    Ok(ModePair {
        theta,
        a,
        b,
        omega_plus,
        omega_minus,
        delta: omega_plus - omega_minus,
    })
}

/// `(q, x_α) → (x_+, x_−)` using `q' = q / n_modes`.
pub fn to_normal_coords(q: f64, x_alpha: f64, theta: f64, n_modes: usize) -> (f64, f64) {
    let (a, b) = theta.sin_cos();
    let qs = q / n_modes as f64;
    (b * qs + a * x_alpha, -a * qs + b * x_alpha)
}

/// Inverse of [`to_normal_coords`]; returns `(q, x_α)`.
pub fn from_normal_coords(x_plus: f64, x_minus: f64, theta: f64, n_modes: usize) -> (f64, f64) {
    let (a, b) = theta.sin_cos();
    let qs = b * x_plus - a * x_minus;
    (qs * n_modes as f64, a * x_plus + b * x_minus)
}

/// The product-Gaussian ground state over `(q, x_1, …, x_N)`.
#[derive(Debug, Clone)]
pub struct GroundState {
    modes: Vec<ModePair>,
    hbar: f64,
    omega_sq: f64,
    a_factor: f64,
    precision: DMatrix<f64>,
    factor: ArrowFactor,
}

/// Fill-free Cholesky factor of the arrowhead `M` with `q` ordered last:
/// `L = [[D, 0], [lᵀ, s]]`, so `L Lᵀ = [[D², D l], [lᵀD, lᵀl + s²]]`.
#[derive(Debug, Clone, PartialEq)]
struct ArrowFactor {
    diag: Vec<f64>,
    arm: Vec<f64>,
    corner: f64,
}

pub fn build_ground_state(
    params: &SystemParams,
    bath: &BathRealization,
) -> Result<GroundState, ModesError> {
    if bath.is_empty() {
        return Err(ModesError::EmptyBath);
    }
    let n = bath.len();
    let nf = n as f64;
    let omega_sq = effective_frequency_squared(params, bath);

    let modes = bath
        .omega()
        .iter()
        .zip(bath.gamma())
        .enumerate()
        .map(|(alpha, (&w, &g))| {
            let theta = rotation_angle(omega_sq, w, g);
            mode_frequencies(theta, omega_sq, w, g).map_err(|e| match e {
                ModesError::NonPositiveMode { omega_sq, .. } => ModesError::NonPositiveMode {
                    alpha: alpha + 1,
                    omega_sq,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let a_factor = modes
        .iter()
        .map(|m| m.a * m.a * m.omega_minus + m.b * m.b * m.omega_plus)
        .sum::<f64>()
        / (nf * nf);

    let mut precision = DMatrix::zeros(n + 1, n + 1);
    precision[(0, 0)] = a_factor;
    for (i, m) in modes.iter().enumerate() {
        let c = m.a * m.b * m.delta / nf;
        precision[(0, i + 1)] = c;
        precision[(i + 1, 0)] = c;
        precision[(i + 1, i + 1)] = m.a * m.a * m.omega_plus + m.b * m.b * m.omega_minus;
    }

    let factor = arrow_factor(a_factor, &precision)?;

    Ok(GroundState {
        modes,
        hbar: params.hbar,
        omega_sq,
        a_factor,
        precision,
        factor,
    })
}

impl GroundState {
    pub fn modes(&self) -> &[ModePair] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `ω²` the state was built with.
    pub fn omega_sq(&self) -> f64 {
        self.omega_sq
    }

    /// `A = Σ_α (a²ω_−α + b²ω_+α) / N²`, equal to `M_qq`.
    pub fn a_factor(&self) -> f64 {
        self.a_factor
    }

    /// The `(N+1)×(N+1)` precision matrix `M`, coordinate order `(q, x_1, …)`.
    pub fn precision_core(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// Per-mode weights `2abΔ_α/N`, so that `B(x) = Σ_α weight_α x_α`.
    pub fn b_weights(&self) -> Vec<f64> {
        let nf = self.n_modes() as f64;
        self.modes
            .iter()
            .map(|m| 2.0 * m.a * m.b * m.delta / nf)
            .collect()
    }

    /// `B(x) = 2ab Σ_α x_α (ω_+α − ω_−α) / N`.
    pub fn b_factor(&self, x: &[f64]) -> f64 {
        let nf = self.n_modes() as f64;
        self.modes
            .iter()
            .zip(x)
            .map(|(m, &xa)| m.a * m.b * m.delta * xa)
            .sum::<f64>()
            * 2.0
            / nf
    }

    /// The same state with a different `ħ` (`M` does not depend on it).
    pub fn with_hbar(&self, hbar: f64) -> Self {
        Self {
            hbar,
            ..self.clone()
        }
    }

    /// `vᵀ M v` exploiting the arrowhead structure.
    pub fn quadratic_form(&self, q: f64, x: &[f64]) -> f64 {
        let nf = self.n_modes() as f64;
        let mut total = self.a_factor * q * q;
        for (m, &xa) in self.modes.iter().zip(x) {
            let c = m.a * m.b * m.delta / nf;
            let d = m.a * m.a * m.omega_plus + m.b * m.b * m.omega_minus;
            total += 2.0 * c * q * xa + d * xa * xa;
        }
        total
    }

    /// `ln ψ₀(q, x)` assembled factor by factor from the normal-mode
    /// Gaussians, including normalization.
    pub fn log_amplitude(&self, q: f64, x: &[f64]) -> f64 {
        let n = self.n_modes();
        let h = self.hbar;
        self.modes
            .iter()
            .zip(x)
            .map(|(m, &xa)| {
                let (xp, xm) = to_normal_coords(q, xa, m.theta, n);
                let norm = 0.25
                    * (m.omega_plus * m.omega_minus / (std::f64::consts::PI.powi(2) * h * h)).ln();
                norm - m.omega_plus * xp * xp / (2.0 * h) - m.omega_minus * xm * xm / (2.0 * h)
            })
            .sum()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePoint {
        let f = &self.factor;
        let scale = (0.5 * self.hbar).sqrt();
        let mut normal = || -> f64 { rng.sample(StandardNormal) };

        // positions: cov (ħ/2) M⁻¹ via Lᵀ z = u
        let zq = normal() / f.corner;
        let x = f
            .diag
            .iter()
            .zip(&f.arm)
            .map(|(&d, &l)| scale * (normal() - l * zq) / d)
            .collect();
        // momenta: Wigner function of the real Gaussian, cov (ħ/2) M, p = L w
        let mut pq = 0.0;
        let p_bath = f
            .diag
            .iter()
            .zip(&f.arm)
            .map(|(&d, &l)| {
                let w = normal();
                pq += l * w;
                scale * d * w
            })
            .collect();
        pq += f.corner * normal();

        PhasePoint {
            q: scale * zq,
            p: scale * pq,
            x,
            p_bath,
        }
    }
}

fn arrow_factor(a_factor: f64, precision: &DMatrix<f64>) -> Result<ArrowFactor, ModesError> {
    let n = precision.nrows() - 1;
    let mut diag = Vec::with_capacity(n);
    let mut arm = Vec::with_capacity(n);
    let mut schur = a_factor;
    let mut min_diag = f64::INFINITY;
    for i in 1..=n {
        let d = precision[(i, i)];
        min_diag = min_diag.min(d);
        let sd = d.sqrt();
        let l = precision[(0, i)] / sd;
        schur -= l * l;
        diag.push(sd);
        arm.push(l);
    }
    if !(min_diag > 0.0 && schur > 0.0) {
        return Err(ModesError::CholeskyFailure {
            a: a_factor,
            schur,
            min_diag,
        });
    }
    Ok(ArrowFactor {
        diag,
        arm,
        corner: schur.sqrt(),
    })
}

/// Draws phase points from the ground state's Wigner distribution.
///
/// Positions have covariance `(ħ/2) M⁻¹`. Momenta have covariance `(ħ/2) M`;
/// its bath block is diagonal with entries `(ħ/2)(a²ω_+ + b²ω_−)`, i.e. each
/// `p_α` is the back-rotation of independent normal-mode momenta with
/// variances `ħω_±/2`.
pub fn sample_ground_state<R: Rng + ?Sized>(
    gs: &GroundState,
    rng: &mut R,
    count: usize,
) -> Result<Vec<PhasePoint>, ModesError> {
    if count == 0 {
        return Err(ModesError::EmptySample);
    }
    Ok((0..count).map(|_| gs.draw(rng)).collect())
}

/// Parallel variant of [`sample_ground_state`] driven by a master seed.
///
/// Output is identical for any thread count (see [`crate::rng`]).
pub fn sample_ground_state_seeded(
    gs: &GroundState,
    seed: u64,
    count: usize,
) -> Result<Vec<PhasePoint>, ModesError> {
    if count == 0 {
        return Err(ModesError::EmptySample);
    }
    let chunks: Vec<(u64, usize)> = rng::chunks(count).collect();
    let parts: Vec<Vec<PhasePoint>> = chunks
        .par_iter()
        .map(|&(stream, len)| {
            let mut r = rng::stream_rng(seed, stream);
            (0..len).map(|_| gs.draw(&mut r)).collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}
