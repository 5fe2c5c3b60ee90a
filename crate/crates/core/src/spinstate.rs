//! Two-spin states, the spin-correlation entanglement witness and the
//! partial-transpose negativity used as the ground truth for entanglement.
//!
//! Basis order is {up-up, up-down, down-up, down-down} with sigma_z |up> = +|up>.
//! Qubit 1 is the left tensor factor.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// Negativity above which a state is reported as entangled.
pub const NEGATIVITY_THRESHOLD: f64 = 1e-9;
/// Grid points per rotation angle in [`optimize_witness`].
pub const WITNESS_GRID: usize = 721;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Pauli::I),
            1 => Ok(Pauli::X),
            2 => Ok(Pauli::Y),
            3 => Ok(Pauli::Z),
            _ => Err(Error::InvalidArgument(format!("Pauli index {i} not in 0..=3"))),
        }
    }

    pub fn matrix(self) -> Matrix2<Complex64> {
        match self {
            Pauli::I => Matrix2::new(ONE, ZERO, ZERO, ONE),
            Pauli::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            Pauli::Y => Matrix2::new(ZERO, -I, I, ZERO),
            Pauli::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Density matrix of two spins (or two orbital qubits).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4<Complex64>,
}

impl TwoQubitState {
    /// Wraps a matrix after checking hermiticity, unit trace and positivity.
    pub fn from_matrix(rho: Matrix4<Complex64>) -> Result<Self> {
        let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidArgument(format!("not Hermitian (residual {herm:e})")));
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidArgument(format!("trace {tr} != 1")));
        }
        let min = hermitian_eigenvalues(&rho)
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min < EIGENVALUE_FLOOR {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {min:e}")));
        }
        Ok(TwoQubitState { rho })
    }

    /// Callers guarantee the invariants.
    pub(crate) fn from_matrix_unchecked(rho: Matrix4<Complex64>) -> Self {
        TwoQubitState { rho }
    }

    /// Pure state from (unnormalised) amplitudes.
    pub fn pure(amplitudes: [Complex64; 4]) -> Self {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        TwoQubitState {
            rho: Matrix4::from_fn(|r, c| v[r] * v[c].conj()),
        }
    }

    pub fn product(a: [Complex64; 2], b: [Complex64; 2]) -> Self {
        Self::pure([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    pub fn maximally_mixed() -> Self {
        TwoQubitState {
            rho: Matrix4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    /// (|up,down> - |down,up>)/sqrt 2
    pub fn singlet() -> Self {
        Self::pure([ZERO, ONE, -ONE, ZERO])
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.rho)
    }

    /// Partial transpose over qubit 2.
    pub fn partial_transpose(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|r, c| {
            let (r1, r2) = (r / 2, r % 2);
            let (c1, c2) = (c / 2, c % 2);
            self.rho[(2 * r1 + c2, 2 * c1 + r2)]
        })
    }

    fn conjugated(&self, u: &Matrix4<Complex64>) -> Self {
        TwoQubitState {
            rho: u * self.rho * u.adjoint(),
        }
    }
}

fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    // symmetrise away rounding so the solver sees an exactly Hermitian input
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = h.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Final spin state (|up>(|up> + e^{i a}|down>) + |down>(e^{i b}|up> + |down>)) / 2
/// with a = dPhiLR and b = dPhiRL.
pub fn entangled_state(d_phi_lr: f64, d_phi_rl: f64) -> TwoQubitState {
    TwoQubitState::pure([
        ONE,
        Complex64::from_polar(1.0, d_phi_lr),
        Complex64::from_polar(1.0, d_phi_rl),
        ONE,
    ])
}

/// tr(rho (P1 x P2)); the imaginary residue is dropped.
pub fn expectation(state: &TwoQubitState, p1: Pauli, p2: Pauli) -> f64 {
    let op = kron(&p1.matrix(), &p2.matrix());
    (state.rho * op).trace().re
}

pub fn expectation_by_index(state: &TwoQubitState, i1: usize, i2: usize) -> Result<f64> {
    Ok(expectation(state, Pauli::from_index(i1)?, Pauli::from_index(i2)?))
}

/// Sum of the magnitudes of the negative eigenvalues of the partial transpose.
pub fn negativity(state: &TwoQubitState) -> f64 {
    let ev = hermitian_eigenvalues(&state.partial_transpose());
    ev.iter().filter(|&&e| e < 0.0).fold(0.0, |acc, e| acc - e)
}

/// Local z rotations applied to each spin before the correlators are measured.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessSettings {
    pub theta_z1: f64,
    pub theta_z2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessResult {
    pub w: f64,
    #[serde(rename = "expXZ")]
    pub exp_xz: f64,
    #[serde(rename = "expYZ")]
    pub exp_yz: f64,
    pub negativity: f64,
    pub entangled_by_negativity: bool,
}

fn rz(theta: f64) -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::from_polar(1.0, -0.5 * theta),
        ZERO,
        ZERO,
        Complex64::from_polar(1.0, 0.5 * theta),
    )
}

/// W = |<sx x sz> - <sy x sz>| after the local rotations in `settings`.
pub fn witness(state: &TwoQubitState, settings: WitnessSettings) -> WitnessResult {
    let u = kron(&rz(settings.theta_z1), &rz(settings.theta_z2));
    let rotated = state.conjugated(&u);
    let exp_xz = expectation(&rotated, Pauli::X, Pauli::Z);
    let exp_yz = expectation(&rotated, Pauli::Y, Pauli::Z);
    let neg = negativity(state);
    WitnessResult {
        w: (exp_xz - exp_yz).abs(),
        exp_xz,
        exp_yz,
        negativity: neg,
        entangled_by_negativity: neg > NEGATIVITY_THRESHOLD,
    }
}

/// Maximises W over the two z-rotation angles.
///
/// A 721 x 721 grid over [-pi, pi]^2 is scanned using the rotated-correlator
/// identities Rz(t)^+ X Rz(t) = cos t X - sin t Y and Rz(t)^+ Y Rz(t) =
/// sin t X + cos t Y (sigma_z on spin 2 is unchanged). The best point is then
/// polished with golden-section searches and re-evaluated through [`witness`].
pub fn optimize_witness(state: &TwoQubitState) -> (WitnessSettings, WitnessResult) {
    let txz = expectation(state, Pauli::X, Pauli::Z);
    let tyz = expectation(state, Pauli::Y, Pauli::Z);
    let fast = |t1: f64, _t2: f64| {
        let (s, c) = t1.sin_cos();
        ((c * txz - s * tyz) - (s * txz + c * tyz)).abs()
    };

    let step = 2.0 * std::f64::consts::PI / (WITNESS_GRID - 1) as f64;
    let angle = |i: usize| -std::f64::consts::PI + i as f64 * step;
    let mut best = (0.0, 0.0, fast(0.0, 0.0));
    for i in 0..WITNESS_GRID {
        let t1 = angle(i);
        for j in 0..WITNESS_GRID {
            let t2 = angle(j);
            let v = fast(t1, t2);
            if v > best.2 {
                best = (t1, t2, v);
            }
        }
    }

    let (mut t1, mut t2) = (best.0, best.1);
    for _ in 0..3 {
        t1 = golden_max(|x| fast(x, t2), t1 - step, t1 + step, 80);
        t2 = golden_max(|x| fast(t1, x), t2 - step, t2 + step, 80);
    }

    let default = witness(state, WitnessSettings::default());
    let polished = WitnessSettings {
        theta_z1: t1,
        theta_z2: t2,
    };
    let result = witness(state, polished);
    if result.w >= default.w {
        (polished, result)
    } else {
        (WitnessSettings::default(), default)
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        a
    } else {
        b
    }
}

/// Independent phase-flip channels: rho -> (1-p) rho + p Z rho Z on each spin.
pub fn apply_dephasing(state: &TwoQubitState, p1: f64, p2: f64) -> Result<TwoQubitState> {
    for (name, p) in [("p1", p1), ("p2", p2)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("{name} = {p} outside [0, 1]")));
        }
    }
    let id = Pauli::I.matrix();
    let z = Pauli::Z.matrix();
    let flip = |rho: Matrix4<Complex64>, op: Matrix4<Complex64>, p: f64| {
        rho * Complex64::new(1.0 - p, 0.0) + op * rho * op * Complex64::new(p, 0.0)
    };
    let rho = flip(state.rho, kron(&z, &id), p1);
    let rho = flip(rho, kron(&id, &z), p2);
    Ok(TwoQubitState { rho })
}
