//! Mode-discretised linearised-gravity field coupled to the two masses.
//!
//! Each mass couples to field mode k with strength g_j,k = m_j c^2
//! sqrt(2 pi G / (hbar c^3 k V)) and the modes have omega_k = c k. The
//! positions all lie on the x axis, so the angular integral over mode
//! directions is done analytically (the average of exp(i k.r) over the
//! sphere is sinc(k r)) and the field is represented by a 1D grid of radial
//! shells. The box volume V cancels against the shell mode count
//! V k^2 dk / (2 pi^2).
//!
//! Within one shell the four branch displacement vectors span at most four
//! dimensions. The shell's 4x4 branch Gram matrix is diagonalised and each
//! eigen-direction is carried as one effective mode, which reproduces every
//! inner product (and hence every coherent-state overlap) exactly.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::constants::CODATA_2018;
use crate::error::{Error, Result};
use crate::gravphase::{static_phases, Branch};
use crate::spinstate::{negativity, TwoQubitState};

/// Graviton polarisations summed over in the interaction Hamiltonian.
pub const POLARIZATIONS: f64 = 2.0;

/// Scale fixing the continuum limit of the branch phase to G m1 m2 t / (hbar r).
///
/// The Hamiltonian's coupling is polarisation independent, so the raw sum over
/// both polarisations gives twice the Newtonian phase; one effective channel
/// is kept.
pub const COUPLING_SCALE: f64 = 1.0 / POLARIZATIONS;

/// kCut * r_min used by [`FieldModeSet::covering`].
pub const DEFAULT_CUTOFF_PRODUCT: f64 = 1e3;
/// Grid top in units of kCut; exp(-40) is far below double precision relevance.
pub const DEFAULT_TOP_OVER_CUTOFF: f64 = 40.0;
/// kMin * r_max used by [`FieldModeSet::covering`].
pub const DEFAULT_FLOOR_PRODUCT: f64 = 1e-3;
/// Shell count that resolves sinc(k r) up to 40 kCut for kCut r ~ 1e3.
pub const DEFAULT_MODES: usize = 1 << 17;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Radial wavenumber grid with trapezoidal weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldModeSet {
    k: Vec<f64>,
    weights: Vec<f64>,
    k_cut: f64,
    coupling_scale: f64,
}

impl FieldModeSet {
    /// Logarithmically spaced grid on [k_min, k_max] with `n_modes` shells.
    pub fn build(k_min: f64, k_max: f64, n_modes: usize, k_cut: f64) -> Result<Self> {
        if !(k_min > 0.0 && k_min < k_max && k_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < kMin < kMax, got kMin = {k_min:e}, kMax = {k_max:e}"
            )));
        }
        if n_modes < 2 {
            return Err(Error::InvalidArgument(format!("nModes = {n_modes}, need at least 2")));
        }
        let ratio = (k_max / k_min).ln() / (n_modes - 1) as f64;
        let mut k: Vec<f64> = (0..n_modes).map(|i| k_min * (ratio * i as f64).exp()).collect();
        k[n_modes - 1] = k_max;
        let mut weights = vec![0.0; n_modes];
        for i in 0..n_modes - 1 {
            let h = k[i + 1] - k[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        Self::from_grid(k, weights, k_cut)
    }

    /// Grid spanning separations in [r_min, r_max] with kCut r_min = 1e3.
    pub fn covering(r_min: f64, r_max: f64, n_modes: usize) -> Result<Self> {
        let k_cut = DEFAULT_CUTOFF_PRODUCT / r_min;
        Self::build(
            DEFAULT_FLOOR_PRODUCT / r_max,
            DEFAULT_TOP_OVER_CUTOFF * k_cut,
            n_modes,
            k_cut,
        )
    }

    /// Arbitrary grid; `k` strictly increasing and positive, weights positive.
    pub fn from_grid(k: Vec<f64>, weights: Vec<f64>, k_cut: f64) -> Result<Self> {
        if k.is_empty() || k.len() != weights.len() {
            return Err(Error::InvalidArgument(
                "grid and weights must be non-empty and equal length".into(),
            ));
        }
        if !(k_cut > 0.0) {
            return Err(Error::InvalidArgument(format!("kCut = {k_cut:e} must be > 0")));
        }
        if k[0] <= 0.0 || k.windows(2).any(|w| w[1] <= w[0]) || !k.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(
                "k grid must be positive and strictly increasing".into(),
            ));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument("quadrature weights must be positive".into()));
        }
        Ok(FieldModeSet {
            k,
            weights,
            k_cut,
            coupling_scale: COUPLING_SCALE,
        })
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k_cut(&self) -> f64 {
        self.k_cut
    }

    pub fn coupling_scale(&self) -> f64 {
        self.coupling_scale
    }

    /// Angle-averaged sum of g_a g_b / omega^2 over the modes of a unit-width
    /// shell at k, for masses a distance `dist` apart, regularised by exp(-k/kCut).
    fn pair_kernel(&self, k: f64, m_a: f64, m_b: f64, dist: f64) -> f64 {
        let c = CODATA_2018;
        POLARIZATIONS * self.coupling_scale * c.g * m_a * m_b / (std::f64::consts::PI * c.hbar * c.c * k)
            * sinc(k * dist)
            * (-k / self.k_cut).exp()
    }
}

/// Secular phase from the mass-mass cross term of the squared coupling.
///
/// Equals (G m1 m2 t / hbar) (2/pi) sum_i w_i sinc(k_i r) exp(-k_i / kCut),
/// which tends to G m1 m2 t / (hbar r) once kCut r >> 1 and the grid resolves
/// the oscillation.
pub fn branch_phase(modes: &FieldModeSet, config: &ExperimentConfig, separation: f64, t: f64) -> Result<f64> {
    if !(separation > 0.0) {
        return Err(Error::InvalidArgument(format!("separation {separation:e} must be > 0")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be >= 0")));
    }
    let c = CODATA_2018;
    let sum: f64 = modes
        .k
        .iter()
        .zip(&modes.weights)
        .map(|(&k, &w)| w * 2.0 * c.c * k * modes.pair_kernel(k, config.m1, config.m2, separation))
        .sum();
    Ok(sum * t)
}

/// Closed form of the damped continuum integral, (2/pi) arctan(kCut r) / r,
/// expressed as a phase.
pub fn damped_continuum_phase(config: &ExperimentConfig, k_cut: f64, separation: f64, t: f64) -> f64 {
    let c = CODATA_2018;
    c.g * config.m1 * config.m2 * t / c.hbar * (2.0 / std::f64::consts::PI) * (k_cut * separation).atan() / separation
}

/// x coordinates of the L and R paths of each mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPositions {
    pub mass1: [f64; 2],
    pub mass2: [f64; 2],
}

impl BranchPositions {
    /// Mass 1 split about 0, mass 2 about d.
    pub fn from_config(config: &ExperimentConfig) -> Self {
        let h = 0.5 * config.split();
        BranchPositions {
            mass1: [-h, h],
            mass2: [config.d - h, config.d + h],
        }
    }

    pub fn of(&self, branch: Branch) -> (f64, f64) {
        let (r1, r2) = branch.sides();
        (self.mass1[r1 as usize], self.mass2[r2 as usize])
    }

    pub fn separation(&self, branch: Branch) -> f64 {
        let (a, b) = self.of(branch);
        (b - a).abs()
    }
}

/// Coherent amplitudes of every effective field mode for one branch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeAmplitudes(pub Vec<Complex64>);

impl ModeAmplitudes {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Field state of all four branches at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDisplacements {
    /// Indexed by [`Branch::index`].
    pub amplitudes: [ModeAmplitudes; 4],
    /// Secular phase of each branch, rad.
    pub branch_phase: [f64; 4],
    pub t: f64,
}

impl BranchDisplacements {
    pub fn get(&self, branch: Branch) -> &ModeAmplitudes {
        &self.amplitudes[branch.index()]
    }

    /// Same phases with the field left in vacuum on every branch, i.e. the
    /// matter and field treated as an exact product.
    pub fn without_field_record(&self) -> Self {
        let zero = |a: &ModeAmplitudes| ModeAmplitudes(vec![Complex64::new(0.0, 0.0); a.len()]);
        BranchDisplacements {
            amplitudes: [
                zero(&self.amplitudes[0]),
                zero(&self.amplitudes[1]),
                zero(&self.amplitudes[2]),
                zero(&self.amplitudes[3]),
            ],
            branch_phase: self.branch_phase,
            t: self.t,
        }
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes.iter().map(ModeAmplitudes::max_norm).fold(0.0, f64::max)
    }

    pub fn d_phi_lr(&self) -> f64 {
        self.branch_phase[Branch::LR.index()] - self.branch_phase[Branch::LL.index()]
    }

    pub fn d_phi_rl(&self) -> f64 {
        self.branch_phase[Branch::RL.index()] - self.branch_phase[Branch::LL.index()]
    }
}

/// Field displacements alpha = (g1/omega e^{ik.r1} + g2/omega e^{ik.r2}) (e^{i omega t} - 1)
/// for a vacuum initial field, per branch, plus each branch's secular phase.
pub fn displacements(
    modes: &FieldModeSet,
    config: &ExperimentConfig,
    positions: &BranchPositions,
    t: f64,
) -> Result<BranchDisplacements> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be >= 0")));
    }
    let c = CODATA_2018;
    let masses = [config.m1, config.m2];
    // (mass index, x) for both masses in each branch
    let sources: Vec<[(usize, f64); 2]> = Branch::ALL
        .iter()
        .map(|&b| {
            let (x1, x2) = positions.of(b);
            [(0, x1), (1, x2)]
        })
        .collect();

    let per_shell: Vec<[[Complex64; 4]; 4]> = modes
        .k
        .par_iter()
        .zip(modes.weights.par_iter())
        .map(|(&k, &w)| {
            let gram = Matrix4::from_fn(|a, b| {
                let mut s = 0.0;
                for &(ja, xa) in &sources[a] {
                    for &(jb, xb) in &sources[b] {
                        s += modes.pair_kernel(k, masses[ja], masses[jb], (xa - xb).abs());
                    }
                }
                w * s
            });
            let eig = SymmetricEigen::new(gram);
            let time_factor = Complex64::from_polar(1.0, c.c * k * t) - 1.0;
            let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
            for ch in 0..4 {
                let lambda = eig.eigenvalues[ch].max(0.0).sqrt();
                for b in 0..4 {
                    out[b][ch] = time_factor * (lambda * eig.eigenvectors[(b, ch)]);
                }
            }
            out
        })
        .collect();

    let mut amplitudes: [ModeAmplitudes; 4] = Default::default();
    for (b, amp) in amplitudes.iter_mut().enumerate() {
        amp.0 = per_shell.iter().flat_map(|shell| shell[b]).collect();
    }
    let mut phases = [0.0; 4];
    for b in Branch::ALL {
        phases[b.index()] = branch_phase(modes, config, positions.separation(b), t)?;
    }
    Ok(BranchDisplacements {
        amplitudes,
        branch_phase: phases,
        t,
    })
}

/// <A|B> for product coherent states, exp(sum(-|a|^2/2 - |b|^2/2 + conj(a) b)).
///
/// The real part of the exponent is accumulated as -|a - b|^2 / 2 so the
/// magnitude stays exact even when the amplitudes are tiny.
pub fn branch_overlap(a: &ModeAmplitudes, b: &ModeAmplitudes) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.0.iter().zip(&b.0) {
        re -= 0.5 * (x - y).norm_sqr();
        im += (x.conj() * y).im;
    }
    Ok(Complex64::from_polar(re.exp(), im))
}

/// Orbital two-qubit state after tracing out the field:
/// rho[b, b'] = (1/4) e^{i(phi_b - phi_b')} <alpha_b'|alpha_b>.
pub fn reduced_mass_state(d: &BranchDisplacements) -> Result<TwoQubitState> {
    let mut overlaps = [[Complex64::new(1.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                overlaps[a][b] = branch_overlap(&d.amplitudes[b], &d.amplitudes[a])?;
            }
        }
    }
    let rho =
        Matrix4::from_fn(|a, b| Complex64::from_polar(0.25, d.branch_phase[a] - d.branch_phase[b]) * overlaps[a][b]);
    // a Gram matrix of the vectors e^{i phi_b} |alpha_b> / 2, so always a valid state
    Ok(TwoQubitState::from_matrix_unchecked(rho))
}

/// Removes every coherence between distinct field states; the masses are left
/// in an equal-weight mixture of the four branches.
pub fn classicalize(_displacements: &BranchDisplacements) -> TwoQubitState {
    TwoQubitState::from_matrix_unchecked(Matrix4::identity() * Complex64::new(0.25, 0.0))
}

/// One line of the grid-refinement table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceRow {
    pub n_modes: usize,
    pub separation: f64,
    pub phase: f64,
    pub damped_target: f64,
    pub newtonian_target: f64,
    pub relative_error: f64,
}

/// Branch phase at the closest-approach separation for each grid size.
pub fn convergence_study(config: &ExperimentConfig, mode_counts: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let c = CODATA_2018;
    let sep = config.d - config.split();
    let r_max = config.d + config.split();
    mode_counts
        .iter()
        .map(|&n| {
            let modes = FieldModeSet::covering(sep, r_max, n)?;
            let phase = branch_phase(&modes, config, sep, config.tau)?;
            let newton = c.g * config.m1 * config.m2 * config.tau / (c.hbar * sep);
            Ok(ConvergenceRow {
                n_modes: n,
                separation: sep,
                phase,
                damped_target: damped_continuum_phase(config, modes.k_cut, sep, config.tau),
                newtonian_target: newton,
                relative_error: (phase - newton).abs() / newton,
            })
        })
        .collect()
}

/// Entanglement with a quantum field versus after classicalising it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassicalizationReport {
    pub n_modes: usize,
    #[serde(rename = "dPhiLR")]
    pub d_phi_lr: f64,
    #[serde(rename = "dPhiRL")]
    pub d_phi_rl: f64,
    pub min_overlap: f64,
    pub max_amplitude: f64,
    pub negativity_quantum_field: f64,
    pub negativity_static_phases: f64,
    pub negativity_classical_field: f64,
}

pub fn classicalization_report(config: &ExperimentConfig, n_modes: usize) -> Result<ClassicalizationReport> {
    let positions = BranchPositions::from_config(config);
    let sep = config.d - config.split();
    let modes = FieldModeSet::covering(sep, config.d + config.split(), n_modes)?;
    let disp = displacements(&modes, config, &positions, config.tau)?;
    let mut min_overlap: f64 = 1.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            min_overlap = min_overlap.min(branch_overlap(&disp.amplitudes[a], &disp.amplitudes[b])?.norm());
        }
    }
    let stat = static_phases(config);
    Ok(ClassicalizationReport {
        n_modes,
        d_phi_lr: disp.d_phi_lr(),
        d_phi_rl: disp.d_phi_rl(),
        min_overlap,
        max_amplitude: disp.max_amplitude(),
        negativity_quantum_field: negativity(&reduced_mass_state(&disp)?),
        negativity_static_phases: negativity(&crate::spinstate::entangled_state(stat.d_phi_lr, stat.d_phi_rl)),
        negativity_classical_field: negativity(&classicalize(&disp)),
    })
}
