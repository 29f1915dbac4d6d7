//! Channel quantities derived from a single transition amplitude `f`.
//!
//! Sending `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` from the sender spin leaves the
//! receiver spin in
//!
//! ```text
//! ρ_out = P |ψ_out⟩⟨ψ_out| + (1 - P) |0⟩⟨0|
//! P     = cos²(θ/2) + sin²(θ/2) |f|²
//! ```
//!
//! which, once the phase of `f` is compensated, is an amplitude-damping
//! channel with Kraus operators `M₀ = diag(1, |f|)` and
//! `M₁ = √(1-|f|²) |0⟩⟨1|`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::sector::TransitionAmplitude;

const AMPLITUDE_SLACK: f64 = 1e-9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_abs(f_abs: f64) -> Result<()> {
    if !(0.0..=1.0 + AMPLITUDE_SLACK).contains(&f_abs) {
        return Err(Error::Domain(format!("|f| = {f_abs} outside [0, 1]")));
    }
    Ok(())
}

/// Pure qubit state on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub theta: f64,
    pub phi: f64,
}

impl QubitState {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn amplitudes(&self) -> Vector2<Complex64> {
        Vector2::new(
            c((self.theta / 2.0).cos()),
            Complex64::from_polar((self.theta / 2.0).sin(), self.phi),
        )
    }

    pub fn density(&self) -> Matrix2<Complex64> {
        let v = self.amplitudes();
        v * v.adjoint()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverOutput {
    pub rho: Matrix2<Complex64>,
    /// Weight of the conditional pure state.
    pub p: f64,
    /// Absent when `P = 0`, where it is undefined.
    pub psi_out: Option<Vector2<Complex64>>,
}

pub fn receiver_state(input: QubitState, f: Complex64) -> Result<ReceiverOutput> {
    check_abs(f.norm())?;
    let (ch, sh) = ((input.theta / 2.0).cos(), (input.theta / 2.0).sin());
    let unnormalised = Vector2::new(c(ch), Complex64::from_polar(sh, input.phi) * f);
    let p = ch * ch + sh * sh * f.norm_sqr();
    let lost = (1.0 - p).max(0.0);
    let mut rho = unnormalised * unnormalised.adjoint();
    rho[(0, 0)] += c(lost);
    let psi_out = (p > 1e-15).then(|| unnormalised / c(p.sqrt()));
    Ok(ReceiverOutput { rho, p, psi_out })
}

/// Input-output fidelity averaged over the Bloch sphere,
/// `|f| cos γ / 3 + |f|² / 6 + 1/2`.
pub fn averaged_fidelity(f_abs: f64, gamma: f64) -> Result<f64> {
    check_abs(f_abs)?;
    Ok(f_abs * gamma.cos() / 3.0 + f_abs * f_abs / 6.0 + 0.5)
}

/// `|f|` at which the phase-compensated averaged fidelity equals `target`,
/// found by bisection on the monotone map `|f| ↦ F`.
pub fn amplitude_for_fidelity(target: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&target) {
        return Err(Error::Domain(format!("compensated fidelity {target} outside [1/2, 1]")));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if averaged_fidelity(mid, 0.0)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Best average fidelity of measure-and-resend transmission.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Smallest `|f|` beating the classical fidelity once the phase is compensated.
pub fn classical_threshold_amplitude() -> f64 {
    amplitude_for_fidelity(CLASSICAL_FIDELITY).expect("2/3 lies in the compensated range")
}

/// Smallest uniform field `B ≥ 0` making `arg f ≡ 0 (mod 2π)` at `t0`,
/// given the phase `γ` obtained with zero field. A uniform field shifts every
/// sector energy by `2B`, so `arg f(B) = γ - 2 B t0`.
pub fn compensating_field(gamma_at_b0: f64, t0: f64) -> Result<f64> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::InvalidTime { what: "readout time", value: t0 });
    }
    Ok(gamma_at_b0.rem_euclid(TAU) / (2.0 * t0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausPair {
    pub m0: Matrix2<Complex64>,
    pub m1: Matrix2<Complex64>,
}

impl KrausPair {
    pub fn amplitude_damping(f_abs: f64) -> Result<Self> {
        check_abs(f_abs)?;
        let f_abs = f_abs.min(1.0);
        let m0 = Matrix2::new(c(1.0), c(0.0), c(0.0), c(f_abs));
        let m1 = Matrix2::new(c(0.0), c((1.0 - f_abs * f_abs).sqrt()), c(0.0), c(0.0));
        Ok(Self { m0, m1 })
    }

    /// `M₀†M₀ + M₁†M₁`, the identity for a trace-preserving map.
    pub fn completeness(&self) -> Matrix2<Complex64> {
        self.m0.adjoint() * self.m0 + self.m1.adjoint() * self.m1
    }

    pub fn apply(&self, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        self.m0 * rho * self.m0.adjoint() + self.m1 * rho * self.m1.adjoint()
    }
}

fn check_density2(rho: &Matrix2<Complex64>) -> Result<()> {
    let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > 1e-10 {
        return Err(Error::Domain("density matrix is not Hermitian".into()));
    }
    if (rho.trace().re - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("density matrix trace {} != 1", rho.trace().re)));
    }
    let eig = SymmetricEigen::new(*rho);
    if eig.eigenvalues.iter().any(|&l| l < -1e-10) {
        return Err(Error::Domain("density matrix is not positive".into()));
    }
    Ok(())
}

/// Amplitude-damping channel applied to a qubit density matrix.
pub fn kraus_apply(rho_in: &Matrix2<Complex64>, f_abs: f64) -> Result<Matrix2<Complex64>> {
    check_density2(rho_in)?;
    Ok(KrausPair::amplitude_damping(f_abs)?.apply(rho_in))
}

/// Concurrence shared by sending one half of `(|01⟩ + |10⟩)/√2` through the
/// channel. Equal to `|f|`.
pub fn shared_entanglement(f_abs: f64) -> Result<f64> {
    check_abs(f_abs)?;
    Ok(f_abs.min(1.0))
}

/// Two-qubit state left after the second half of `(|01⟩ + |10⟩)/√2` passes
/// through the channel, written out explicitly:
/// `½[(1-|f|²)|00⟩⟨00| + (|10⟩ + |f||01⟩)(⟨10| + |f|⟨01|)]`.
///
/// Basis order `|00⟩, |01⟩, |10⟩, |11⟩`, kept qubit first.
pub fn shared_pair_state(f_abs: f64) -> Result<Matrix4<Complex64>> {
    check_abs(f_abs)?;
    let mut rho = Matrix4::<Complex64>::zeros();
    rho[(0, 0)] = c(0.5 * (1.0 - f_abs * f_abs));
    rho[(2, 2)] = c(0.5);
    rho[(1, 1)] = c(0.5 * f_abs * f_abs);
    rho[(1, 2)] = c(0.5 * f_abs);
    rho[(2, 1)] = c(0.5 * f_abs);
    Ok(rho)
}

/// The same state built as `Σ_i (I ⊗ M_i) |ψ⁺⟩⟨ψ⁺| (I ⊗ M_i)†`.
pub fn shared_pair_via_kraus(f_abs: f64) -> Result<Matrix4<Complex64>> {
    let k = KrausPair::amplitude_damping(f_abs)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = nalgebra::Vector4::new(c(0.0), c(s), c(s), c(0.0));
    let bell = psi * psi.adjoint();
    let lift = |m: &Matrix2<Complex64>| {
        let mut out = Matrix4::<Complex64>::zeros();
        for a in 0..2 {
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                out[(2 * a + i, 2 * a + j)] = m[(i, j)];
            }
        }
        out
    };
    Ok([k.m0, k.m1]
        .iter()
        .map(|m| {
            let l = lift(m);
            l * bell * l.adjoint()
        })
        .sum())
}

/// Wootters concurrence `max(0, λ₁ - λ₂ - λ₃ - λ₄)`, with `λ_i` the
/// decreasing eigenvalues of `√(√ρ ρ̃ √ρ)` and `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
///
/// Evaluated as the singular values of `Wᵀ (σ_y⊗σ_y) W` with `ρ = W W†`;
/// eigenvalues of `ρ` at round-off level are treated as zero.
pub fn wootters_concurrence(rho: &Matrix4<Complex64>) -> f64 {
    let herm = (rho + rho.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(herm);
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let floor = 64.0 * f64::EPSILON * scale;
    let roots = eig.eigenvalues.map(|l| c(if l > floor { l.sqrt() } else { 0.0 }));
    let w = eig.eigenvectors * Matrix4::from_diagonal(&roots);
    // σ_y ⊗ σ_y is real: anti-diagonal (-1, 1, 1, -1).
    let mut yy = Matrix4::<Complex64>::zeros();
    for (i, v) in [-1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
        yy[(i, 3 - i)] = c(v);
    }
    let tau = w.transpose() * yy * w;
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Points in `cos θ` for the Bloch-sphere product rule.
pub const BLOCH_POLAR_ORDER: usize = 16;
/// Points in `φ` for the Bloch-sphere product rule.
pub const BLOCH_AZIMUTH_ORDER: usize = 32;

/// `(1/4π) ∫ ⟨ψ_in|ρ_out|ψ_in⟩ dΩ` by a product rule: Gauss–Legendre in
/// `cos θ` and the periodic trapezoid in `φ`. The integrand is a trigonometric
/// polynomial of low degree, so the rule is exact up to rounding.
pub fn bloch_average_oracle(f: Complex64) -> Result<f64> {
    let polar = gauss_legendre(BLOCH_POLAR_ORDER);
    let mut total = 0.0;
    for &(x, w) in &polar {
        let theta = x.acos();
        for k in 0..BLOCH_AZIMUTH_ORDER {
            let phi = TAU * k as f64 / BLOCH_AZIMUTH_ORDER as f64;
            let input = QubitState::new(theta, phi);
            let rho = receiver_state(input, f)?.rho;
            let v = input.amplitudes();
            let fid = (v.adjoint() * rho * v)[(0, 0)].re;
            total += w * fid / BLOCH_AZIMUTH_ORDER as f64;
        }
    }
    Ok(total / 2.0)
}

/// Everything the receiver cares about at one readout time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub f_abs: f64,
    pub gamma: f64,
    /// Averaged fidelity with the phase left as is.
    pub fidelity: f64,
    /// Averaged fidelity after phase compensation (`γ = 0`).
    pub fidelity_compensated: f64,
    pub concurrence: f64,
    /// Uniform field that compensates `γ`, or `None` at `t0 = 0`.
    pub b_star: Option<f64>,
    pub t0: f64,
}

impl ChannelReport {
    /// `amp` must have been evaluated at zero field for `b_star` to be the
    /// absolute compensating field; otherwise it is the extra field needed.
    pub fn from_amplitude(amp: &TransitionAmplitude) -> Result<Self> {
        let f_abs = amp.abs().min(1.0);
        let gamma = amp.phase();
        Ok(Self {
            f_abs,
            gamma,
            fidelity: averaged_fidelity(f_abs, gamma)?,
            fidelity_compensated: averaged_fidelity(f_abs, 0.0)?,
            concurrence: shared_entanglement(f_abs)?,
            b_star: compensating_field(gamma, amp.t).ok(),
            t0: amp.t,
        })
    }
}
