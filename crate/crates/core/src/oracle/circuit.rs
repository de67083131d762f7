//! Brute-force simulation of the single-measurement circuit.
//!
//! The ancilla lives on a periodic grid in `w`. Its conjugate momentum obeys
//! `[W, T] = i hbar`, so `T = -i hbar d/dw` and `exp(-i a T / hbar)` moves a
//! packet from `w0` to `w0 + a`. Controlled translations are applied in the
//! Fourier domain, where they are diagonal in the ancilla and act as
//! `exp(+/- i E k)` on each system eigenspace.
//!
//! Mixed initial states are simulated as an ensemble of pure eigencomponents.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::oracle::quadrature::gaussian_amplitude;
use crate::qcore::{hermitian_eig, Complex, ComplexMatrix, HERM_TOL};
use crate::spectral::SpectralDecomposition;
use crate::workstats::{DrivenProcess, WorkTransitionTable};

pub const MIN_GRID_POINTS: usize = 256;
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Ensemble components lighter than this are skipped.
const NEGLIGIBLE_WEIGHT: f64 = 1e-15;

/// Uniform periodic grid of `n_points` nodes `w_lo + j h`, `h = (w_hi - w_lo) / n_points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaGrid {
    n_points: usize,
    w_lo: f64,
    w_hi: f64,
}

impl AncillaGrid {
    pub fn new(n_points: usize, w_lo: f64, w_hi: f64) -> Result<Self> {
        if n_points < MIN_GRID_POINTS || !n_points.is_power_of_two() {
            return Err(Error::BadGridSpec(format!(
                "ancilla grid needs a power of two >= {MIN_GRID_POINTS} points, got {n_points}"
            )));
        }
        if !(w_lo.is_finite() && w_hi.is_finite() && w_hi > w_lo) {
            return Err(Error::BadGridSpec(format!("empty ancilla range [{w_lo}, {w_hi})")));
        }
        Ok(Self { n_points, w_lo, w_hi })
    }

    /// Range `[min w - 10 sigma - 10, max w + 10 sigma + 10]` with at least
    /// 4096 points and at least 16 points per `sigma`.
    pub fn default_for(table: &WorkTransitionTable, sigma: f64) -> Result<Self> {
        let works = table.work_values();
        let lo = works.iter().copied().fold(f64::INFINITY, f64::min) - 10.0 * sigma - 10.0;
        let hi = works.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 10.0 * sigma + 10.0;
        let mut n = DEFAULT_GRID_POINTS;
        while (hi - lo) / n as f64 > sigma / 16.0 {
            n *= 2;
        }
        Self::new(n, lo, hi)
    }

    /// Same range, different resolution.
    pub fn with_points(&self, n_points: usize) -> Result<Self> {
        Self::new(n_points, self.w_lo, self.w_hi)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn w_lo(&self) -> f64 {
        self.w_lo
    }

    pub fn w_hi(&self) -> f64 {
        self.w_hi
    }

    pub fn spacing(&self) -> f64 {
        (self.w_hi - self.w_lo) / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.w_lo + self.spacing() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Angular wavenumber of FFT bin `j`.
    fn wavenumber(&self, j: usize) -> f64 {
        let n = self.n_points as i64;
        let f = if (j as i64) < n / 2 { j as i64 } else { j as i64 - n };
        2.0 * PI * f as f64 / (self.w_hi - self.w_lo)
    }

    fn check_packet(&self, centre: f64, sigma: f64) -> Result<()> {
        let last = self.node(self.n_points - 1);
        if centre - 8.0 * sigma < self.w_lo || centre + 8.0 * sigma > last {
            return Err(Error::GridWraparound { lo: self.w_lo, hi: self.w_hi, centre });
        }
        Ok(())
    }
}

/// System (rows) times ancilla grid (columns) amplitudes.
#[derive(Debug, Clone)]
pub struct JointState {
    dim: usize,
    grid: AncillaGrid,
    amps: Vec<Vec<Complex>>,
}

impl JointState {
    /// `|system> (x) psi_sigma` sampled on the grid.
    pub fn product(system: &[Complex], sigma: f64, grid: AncillaGrid) -> Self {
        let packet: Vec<f64> =
            grid.nodes().iter().map(|&x| gaussian_amplitude(x, sigma)).collect();
        let amps = system
            .iter()
            .map(|&a| packet.iter().map(|&g| a * g).collect())
            .collect();
        Self { dim: system.len(), grid, amps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &AncillaGrid {
        &self.grid
    }

    /// Amplitudes of system basis state `i` along the grid.
    pub fn row(&self, i: usize) -> &[Complex] {
        &self.amps[i]
    }

    /// `h sum |a|^2`.
    pub fn norm(&self) -> f64 {
        self.grid.spacing() * self.amps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Mean ancilla position, `h sum_j x_j sum_i |a_ij|^2`.
    pub fn mean_position(&self) -> f64 {
        let nodes = self.grid.nodes();
        let h = self.grid.spacing();
        h * self
            .amps
            .iter()
            .map(|row| row.iter().zip(&nodes).map(|(a, x)| a.norm_sqr() * x).sum::<f64>())
            .sum::<f64>()
            / self.norm()
    }

    /// Applies `sum_n Pi_n (x) exp(-i direction E_n T / hbar)`, which moves the
    /// ancilla by `direction * E_n` on eigenspace `n`.
    pub fn controlled_translation(
        &mut self,
        levels: &SpectralDecomposition,
        direction: f64,
        ffts: &FftPair,
    ) -> Result<()> {
        if levels.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: levels.dim() });
        }
        for row in &mut self.amps {
            ffts.forward.process(row);
        }
        let n = self.grid.n_points;
        // exp(-i direction H k) as a d x d matrix per bin, applied to the column.
        let mut column = vec![Complex::new(0.0, 0.0); self.dim];
        for j in 0..n {
            let k = self.grid.wavenumber(j);
            let mut op = ComplexMatrix::zeros(self.dim);
            for level in levels.levels() {
                let phase = Complex::from_polar(1.0, -direction * level.energy * k);
                op = &op + &level.projector.scale(phase);
            }
            for (i, c) in column.iter_mut().enumerate() {
                *c = self.amps[i][j];
            }
            let out = op.apply(&column)?;
            for (i, v) in out.into_iter().enumerate() {
                self.amps[i][j] = v;
            }
        }
        let scale = 1.0 / n as f64;
        for row in &mut self.amps {
            ffts.inverse.process(row);
            row.iter_mut().for_each(|z| *z *= scale);
        }
        Ok(())
    }

    /// Applies a system unitary, identity on the ancilla.
    pub fn apply_system(&mut self, u: &ComplexMatrix) -> Result<()> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: u.dim() });
        }
        let mut column = vec![Complex::new(0.0, 0.0); self.dim];
        for j in 0..self.grid.n_points {
            for (i, c) in column.iter_mut().enumerate() {
                *c = self.amps[i][j];
            }
            let out = u.apply(&column)?;
            for (i, v) in out.into_iter().enumerate() {
                self.amps[i][j] = v;
            }
        }
        Ok(())
    }
}

/// Planned forward/inverse transforms for one grid size.
pub struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }
}

/// Reduced ancilla state in factored form, `rho(x, x') = sum_r p_r a_r(x) a_r(x')^*`.
///
/// The dense `n_points x n_points` matrix is available through
/// [`ReducedAncilla::to_dense`], but every consumer here reads elements on
/// demand instead.
#[derive(Debug, Clone)]
pub struct ReducedAncilla {
    grid: AncillaGrid,
    components: Vec<(f64, Vec<Complex>)>,
}

impl ReducedAncilla {
    pub fn grid(&self) -> &AncillaGrid {
        &self.grid
    }

    pub fn rank_bound(&self) -> usize {
        self.components.len()
    }

    /// Kernel value `<x_j | rho | x_k>` (a density in both arguments).
    pub fn element(&self, j: usize, k: usize) -> Complex {
        self.components.iter().map(|(p, a)| a[j] * a[k].conj() * *p).sum()
    }

    /// Probability density of `W` at each node.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.grid.n_points).map(|j| self.element(j, j).re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.grid.spacing() * self.diagonal().iter().sum::<f64>()
    }

    /// Dense matrix of kernel values; O(n_points^2) memory.
    pub fn to_dense(&self) -> Vec<Vec<Complex>> {
        let n = self.grid.n_points;
        (0..n).map(|j| (0..n).map(|k| self.element(j, k)).collect()).collect()
    }

    /// Kernel value at off-grid points, bilinear in the two arguments.
    fn interpolated(&self, x: f64, xp: f64) -> Complex {
        let (j, t) = self.locate(x);
        let (k, s) = self.locate(xp);
        self.components
            .iter()
            .map(|(p, a)| {
                let ax = a[j] * (1.0 - t) + a[j + 1] * t;
                let axp = a[k] * (1.0 - s) + a[k + 1] * s;
                ax * axp.conj() * *p
            })
            .sum()
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let u = (x - self.grid.w_lo) / self.grid.spacing();
        let j = (u.floor() as usize).min(self.grid.n_points - 2);
        (j, u - j as f64)
    }
}

/// Runs the single-measurement circuit and traces out the system.
///
/// Stages per pure component: prepare `|v> (x) psi`, couple with
/// `exp(i H (x) T / hbar)` (shift by `-E_n`), drive with `U (x) I`, couple with
/// `exp(-i H~ (x) T / hbar)` (shift by `+E~_m`). The net shift on branch
/// `(n, m)` is `w_nm`.
pub fn sm_circuit(
    proc: &DrivenProcess,
    rho: &ComplexMatrix,
    sigma: f64,
    grid: AncillaGrid,
) -> Result<ReducedAncilla> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonpositiveWidth(sigma));
    }
    if rho.dim() != proc.dim() {
        return Err(Error::DimensionMismatch { expected: proc.dim(), found: rho.dim() });
    }
    for level in proc.initial().levels() {
        grid.check_packet(-level.energy, sigma)?;
        for fin in proc.final_hamiltonian().levels() {
            grid.check_packet(fin.energy - level.energy, sigma)?;
        }
    }

    let ensemble = hermitian_eig(rho, HERM_TOL)?;
    let ffts = FftPair::new(grid.n_points);
    let mut components = Vec::new();
    for (k, &weight) in ensemble.eigenvalues.iter().enumerate() {
        if weight <= NEGLIGIBLE_WEIGHT {
            continue;
        }
        let mut state = JointState::product(&ensemble.eigenvector(k), sigma, grid);
        state.controlled_translation(proc.initial(), -1.0, &ffts)?;
        state.apply_system(proc.driving())?;
        state.controlled_translation(proc.final_hamiltonian(), 1.0, &ffts)?;
        components.extend(state.amps.into_iter().map(|row| (weight, row)));
    }
    Ok(ReducedAncilla { grid, components })
}

/// Trapezoid quadrature of the Wigner transform of a grid state, with `y`
/// sampled at the grid spacing and the kernel interpolated bilinearly.
pub fn grid_wigner(rho: &ReducedAncilla, hbar: f64, w: f64, tau: f64) -> Result<f64> {
    grid_wigner_complex(rho, hbar, w, tau).map(|z| z.re)
}

pub fn grid_wigner_complex(rho: &ReducedAncilla, hbar: f64, w: f64, tau: f64) -> Result<Complex> {
    let grid = rho.grid;
    let h = grid.spacing();
    let first = grid.w_lo;
    let last = grid.node(grid.n_points - 1);
    if !(w >= first + h && w <= last - h) {
        return Err(Error::OutOfGrid { w });
    }
    let reach = 2.0 * (w - first).min(last - w);
    let half = (reach / h).floor() as i64;
    let mut acc = Complex::new(0.0, 0.0);
    for k in -half..=half {
        let y = k as f64 * h;
        let weight = if k.abs() == half { 0.5 } else { 1.0 };
        let value = rho.interpolated(w + 0.5 * y, w - 0.5 * y);
        acc += value * Complex::from_polar(weight, -tau * y / hbar);
    }
    Ok(acc * (h / (2.0 * PI * hbar)))
}
