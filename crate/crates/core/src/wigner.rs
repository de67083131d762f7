//! Closed-form Wigner quasidistribution of work for a Gaussian ancilla.
//!
//! For an ancilla prepared in a zero-mean Gaussian with work variance
//! `sigma^2`, the Wigner function of the post-protocol ancilla is
//!
//! ```text
//! P_W(w, tau) = sum_{n,n',m} c[n][n'][m] e^{i tau (E_n - E_n')/hbar}
//!               N(w | (w_nm + w_n'm)/2, sigma) N(tau | 0, s)
//! ```
//!
//! with `s = hbar / (2 sigma)` for a minimum-uncertainty packet. The τ-spread
//! is kept as a field so other conventions can be configured explicitly.
//!
//! Every sum runs over ordered pairs `n <= n'`, with the `n < n'` terms doubled
//! through their real part, so the result is real by construction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{linspace, normal_pdf, trapezoid, trapezoid_weights};
use crate::qcore::{Complex, ComplexMatrix};
use crate::spectral::evolve;
use crate::workstats::{delta_e, DrivenProcess, WorkTransitionTable};

pub const DEFAULT_QUAD_POINTS: usize = 1024;
pub const MIN_QUAD_POINTS: usize = 64;
/// Half-width, in standard deviations, of default integration boxes.
pub const BOX_SIGMAS: f64 = 8.0;
/// Beyond this many τ-spreads the slice identity is not evaluated.
pub const MAX_SLICE_SPREADS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAncilla {
    sigma: f64,
    hbar: f64,
    tau_spread: f64,
}

impl GaussianAncilla {
    /// Minimum-uncertainty packet: `s = hbar / (2 sigma)`.
    pub fn new(sigma: f64, hbar: f64) -> Result<Self> {
        Self::with_tau_spread(sigma, hbar, hbar / (2.0 * sigma))
    }

    pub fn with_tau_spread(sigma: f64, hbar: f64, tau_spread: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::NonpositiveWidth(sigma));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidState(format!("hbar must be positive, got {hbar}")));
        }
        if !(tau_spread > 0.0 && tau_spread.is_finite()) {
            return Err(Error::NonpositiveWidth(tau_spread));
        }
        Ok(Self { sigma, hbar, tau_spread })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn tau_spread(&self) -> f64 {
        self.tau_spread
    }

    /// `int dtau N(tau|0,s) e^{i tau delta / hbar}`.
    fn damping(&self, delta: f64) -> f64 {
        let x = self.tau_spread * delta / self.hbar;
        (-0.5 * x * x).exp()
    }
}

/// One `(n <= n', m)` contribution.
#[derive(Debug, Clone, Copy)]
struct Term {
    /// `c[n][n'][m]`, doubled when `n < n'`.
    coeff: Complex,
    /// `(w_nm + w_n'm) / 2`.
    centre: f64,
    /// `E_n - E_n'`.
    delta: f64,
    diagonal: bool,
}

#[derive(Debug, Clone)]
pub struct WignerWork {
    table: WorkTransitionTable,
    ancilla: GaussianAncilla,
    terms: Vec<Term>,
}

/// Integration region in phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBox {
    pub w_min: f64,
    pub w_max: f64,
    pub tau_min: f64,
    pub tau_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub w_min: f64,
    pub w_max: f64,
    pub n_w: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.w_min, self.w_max, self.tau_min, self.tau_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::BadGridSpec("grid bounds must be finite".into()));
        }
        if self.n_w < 2 || self.n_tau < 2 {
            return Err(Error::BadGridSpec(format!(
                "need at least 2 samples per axis, got n_w = {}, n_tau = {}",
                self.n_w, self.n_tau
            )));
        }
        if !(self.w_max > self.w_min && self.tau_max > self.tau_min) {
            return Err(Error::BadGridSpec("grid maxima must exceed minima".into()));
        }
        Ok(())
    }
}

/// Samples on a uniform `(tau, w)` lattice; row `i` is `tau_axis[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub w_axis: Vec<f64>,
    pub tau_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Grid2D {
    pub fn min_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(tau, w, value)` in tau-major order.
    pub fn long_form(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.tau_axis.iter().zip(&self.values).flat_map(move |(&tau, row)| {
            self.w_axis.iter().zip(row).map(move |(&w, &v)| (tau, w, v))
        })
    }
}

/// `(slice, direct)` estimates of the energy change for the state evolved to `-tau0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePair {
    pub slice_value: f64,
    pub direct_value: f64,
}

impl SlicePair {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.slice_value.abs().max(self.direct_value.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.slice_value - self.direct_value).abs() / scale
        }
    }
}

impl WignerWork {
    pub fn new(table: WorkTransitionTable, ancilla: GaussianAncilla) -> Self {
        let mut terms = Vec::new();
        let energies = table.energies_initial();
        for n in 0..table.n_initial() {
            for np in n..table.n_initial() {
                for m in 0..table.n_final() {
                    let c = table.coeff(n, np, m);
                    let diagonal = n == np;
                    terms.push(Term {
                        coeff: if diagonal { c } else { c * 2.0 },
                        centre: 0.5 * (table.work(n, m) + table.work(np, m)),
                        delta: energies[n] - energies[np],
                        diagonal,
                    });
                }
            }
        }
        Self { table, ancilla, terms }
    }

    pub fn table(&self) -> &WorkTransitionTable {
        &self.table
    }

    pub fn ancilla(&self) -> &GaussianAncilla {
        &self.ancilla
    }

    /// Same table, different ancilla.
    pub fn with_ancilla(&self, ancilla: GaussianAncilla) -> Self {
        Self::new(self.table.clone(), ancilla)
    }

    fn tau_density(&self, tau: f64) -> f64 {
        normal_pdf(tau, 0.0, self.ancilla.tau_spread)
    }

    /// `Re[c e^{i tau delta / hbar}]` per term.
    fn tau_weights(&self, tau: f64, mut keep: impl FnMut(&Term) -> bool) -> Vec<f64> {
        let hbar = self.ancilla.hbar;
        self.terms
            .iter()
            .map(|t| {
                if !keep(t) {
                    0.0
                } else if t.diagonal {
                    t.coeff.re
                } else {
                    (t.coeff * Complex::from_polar(1.0, tau * t.delta / hbar)).re
                }
            })
            .collect()
    }

    fn w_profile(&self, w: f64) -> Vec<f64> {
        self.terms.iter().map(|t| normal_pdf(w, t.centre, self.ancilla.sigma)).collect()
    }

    #[inline]
    fn combine(tau_density: f64, weights: &[f64], profile: &[f64]) -> f64 {
        tau_density * weights.iter().zip(profile).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `P_W(w, tau)`.
    pub fn evaluate(&self, w: f64, tau: f64) -> f64 {
        Self::combine(self.tau_density(tau), &self.tau_weights(tau, |_| true), &self.w_profile(w))
    }

    /// The unsymmetrised complex sum over every ordered `(n, n', m)`. Its
    /// imaginary part vanishes up to rounding.
    pub fn evaluate_complex(&self, w: f64, tau: f64) -> Complex {
        let t = &self.table;
        let (sigma, hbar) = (self.ancilla.sigma, self.ancilla.hbar);
        let energies = t.energies_initial();
        let mut acc = Complex::new(0.0, 0.0);
        for n in 0..t.n_initial() {
            for np in 0..t.n_initial() {
                let phase = Complex::from_polar(1.0, tau * (energies[n] - energies[np]) / hbar);
                for m in 0..t.n_final() {
                    let centre = 0.5 * (t.work(n, m) + t.work(np, m));
                    acc += t.coeff(n, np, m) * phase * normal_pdf(w, centre, sigma);
                }
            }
        }
        acc * self.tau_density(tau)
    }

    /// The `n == n'` part, `P_N(w|sigma) N(tau|0,s)`.
    pub fn diagonal_part(&self, w: f64, tau: f64) -> f64 {
        Self::combine(self.tau_density(tau), &self.tau_weights(tau, |t| t.diagonal), &self.w_profile(w))
    }

    /// The `n != n'` part carrying the initial coherences.
    pub fn coherent_part(&self, w: f64, tau: f64) -> f64 {
        Self::combine(self.tau_density(tau), &self.tau_weights(tau, |t| !t.diagonal), &self.w_profile(w))
    }

    /// `P_N(w|sigma)` assembled from the diagonal coefficients.
    pub fn convolved_tpm(&self, w: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.diagonal)
            .map(|t| t.coeff.re * normal_pdf(w, t.centre, self.ancilla.sigma))
            .sum()
    }

    /// Samples `evaluate` on a uniform lattice. Rows are computed in parallel;
    /// each value is independent of the partitioning.
    pub fn grid(&self, spec: &GridSpec) -> Result<Grid2D> {
        spec.validate()?;
        let w_axis = linspace(spec.w_min, spec.w_max, spec.n_w);
        let tau_axis = linspace(spec.tau_min, spec.tau_max, spec.n_tau);
        let profiles: Vec<Vec<f64>> = w_axis.iter().map(|&w| self.w_profile(w)).collect();
        let values = tau_axis
            .par_iter()
            .map(|&tau| {
                let density = self.tau_density(tau);
                let weights = self.tau_weights(tau, |_| true);
                profiles.iter().map(|p| Self::combine(density, &weights, p)).collect()
            })
            .collect();
        Ok(Grid2D { w_axis, tau_axis, values })
    }

    /// `P_N(w|sigma) + sum_{n != n'} Re[c] N(w | centre, sigma) e^{-s^2 delta^2 / (2 hbar^2)}`.
    pub fn marginal_w_closed(&self, w: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let damp = if t.diagonal { 1.0 } else { self.ancilla.damping(t.delta) };
                t.coeff.re * damp * normal_pdf(w, t.centre, self.ancilla.sigma)
            })
            .sum()
    }

    /// Trapezoid integral of `evaluate(w, .)` over `|tau| <= k s`.
    pub fn marginal_w_numeric(&self, w: f64, tau_halfwidth_spreads: f64, n_quad: usize) -> Result<f64> {
        if n_quad < MIN_QUAD_POINTS {
            return Err(Error::BadQuadratureSpec(format!(
                "need at least {MIN_QUAD_POINTS} points, got {n_quad}"
            )));
        }
        if !(tau_halfwidth_spreads > 0.0 && tau_halfwidth_spreads.is_finite()) {
            return Err(Error::BadQuadratureSpec("tau half-width must be positive".into()));
        }
        let half = tau_halfwidth_spreads * self.ancilla.tau_spread;
        let taus = linspace(-half, half, n_quad);
        let profile = self.w_profile(w);
        let values: Vec<f64> = taus
            .iter()
            .map(|&tau| Self::combine(self.tau_density(tau), &self.tau_weights(tau, |_| true), &profile))
            .collect();
        Ok(trapezoid(&values, taus[1] - taus[0]))
    }

    /// Box covering every term centre by `BOX_SIGMAS` standard deviations in
    /// `w`, and `BOX_SIGMAS` τ-spreads in `tau`.
    pub fn default_box(&self) -> PhaseBox {
        let (lo, hi) = self.centre_range();
        let sigma = self.ancilla.sigma;
        let s = self.ancilla.tau_spread;
        PhaseBox {
            w_min: lo - BOX_SIGMAS * sigma,
            w_max: hi + BOX_SIGMAS * sigma,
            tau_min: -BOX_SIGMAS * s,
            tau_max: BOX_SIGMAS * s,
        }
    }

    fn centre_range(&self) -> (f64, f64) {
        self.terms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
            (lo.min(t.centre), hi.max(t.centre))
        })
    }

    /// Phase-space average of a Weyl symbol `A(w, tau)` by 2-D trapezoid
    /// quadrature with `n_quad` points per axis.
    pub fn expectation<F>(&self, symbol: F, region: &PhaseBox, n_quad: usize) -> Result<f64>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        self.integrate(|w, tau, v| symbol(w, tau) * v, region, n_quad, |_| true)
    }

    /// Double integral of `coherent_part` over `region`.
    pub fn coherent_integral(&self, region: &PhaseBox, n_quad: usize) -> Result<f64> {
        self.integrate(|_, _, v| v, region, n_quad, |t| !t.diagonal)
    }

    fn integrate<F>(
        &self,
        integrand: F,
        region: &PhaseBox,
        n_quad: usize,
        keep: impl Fn(&Term) -> bool + Sync,
    ) -> Result<f64>
    where
        F: Fn(f64, f64, f64) -> f64 + Sync,
    {
        if n_quad < MIN_QUAD_POINTS {
            return Err(Error::BadQuadratureSpec(format!(
                "need at least {MIN_QUAD_POINTS} points per axis, got {n_quad}"
            )));
        }
        let valid = [region.w_min, region.w_max, region.tau_min, region.tau_max]
            .iter()
            .all(|x| x.is_finite())
            && region.w_max > region.w_min
            && region.tau_max > region.tau_min;
        if !valid {
            return Err(Error::BadQuadratureSpec(format!("degenerate integration box {region:?}")));
        }
        let ws = linspace(region.w_min, region.w_max, n_quad);
        let taus = linspace(region.tau_min, region.tau_max, n_quad);
        let w_weights = trapezoid_weights(n_quad, ws[1] - ws[0]);
        let tau_weights = trapezoid_weights(n_quad, taus[1] - taus[0]);
        let profiles: Vec<Vec<f64>> = ws.iter().map(|&w| self.w_profile(w)).collect();
        let rows: Vec<f64> = taus
            .par_iter()
            .map(|&tau| {
                let density = self.tau_density(tau);
                let weights = self.tau_weights(tau, &keep);
                ws.iter()
                    .zip(&profiles)
                    .zip(&w_weights)
                    .map(|((&w, p), ww)| ww * integrand(w, tau, Self::combine(density, &weights, p)))
                    .sum::<f64>()
            })
            .collect();
        Ok(rows.iter().zip(&tau_weights).map(|(r, tw)| r * tw).sum())
    }

    /// Expectation over the default box with the default resolution.
    pub fn expectation_default<F>(&self, symbol: F) -> Result<f64>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        self.expectation(symbol, &self.default_box(), DEFAULT_QUAD_POINTS)
    }

    /// `<w>` in closed form: `sum Re[c] centre e^{-s^2 delta^2 / (2 hbar^2)}`.
    pub fn mean_work(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let damp = if t.diagonal { 1.0 } else { self.ancilla.damping(t.delta) };
                t.coeff.re * t.centre * damp
            })
            .sum()
    }

    /// `<tau>` in closed form: `sum Re[c i s^2 delta / hbar] e^{-s^2 delta^2 / (2 hbar^2)}`.
    pub fn mean_tau(&self) -> f64 {
        let (s, hbar) = (self.ancilla.tau_spread, self.ancilla.hbar);
        self.terms
            .iter()
            .filter(|t| !t.diagonal)
            .map(|t| {
                let moment = Complex::new(0.0, s * s * t.delta / hbar) * self.ancilla.damping(t.delta);
                (t.coeff * moment).re
            })
            .sum()
    }

    /// `<e^{-beta w}>` in closed form via the Gaussian moment identity.
    pub fn exp_beta_work(&self, beta: f64) -> f64 {
        let sigma = self.ancilla.sigma;
        let gaussian = (0.5 * beta * beta * sigma * sigma).exp();
        self.terms
            .iter()
            .map(|t| {
                let damp = if t.diagonal { 1.0 } else { self.ancilla.damping(t.delta) };
                t.coeff.re * (-beta * t.centre).exp() * gaussian * damp
            })
            .sum()
    }

    /// Compares the `w`-weighted slice of `P_W` at `tau0`, divided by the
    /// Gaussian modulation, with the energy change of `rho` evolved to `-tau0`.
    pub fn delta_e_at(
        &self,
        proc: &DrivenProcess,
        rho: &ComplexMatrix,
        tau0: f64,
    ) -> Result<SlicePair> {
        let limit = MAX_SLICE_SPREADS * self.ancilla.tau_spread;
        if tau0.is_nan() || tau0.abs() > limit {
            return Err(Error::SliceTooFarOut { tau0, limit });
        }
        let (lo, hi) = self.centre_range();
        let sigma = self.ancilla.sigma;
        let (w_min, w_max) = (lo - BOX_SIGMAS * sigma, hi + BOX_SIGMAS * sigma);
        let n = (((w_max - w_min) / (sigma / 8.0)).ceil() as usize).max(2048) + 1;
        let ws = linspace(w_min, w_max, n);
        let weights = self.tau_weights(tau0, |_| true);
        let values: Vec<f64> = ws
            .iter()
            .map(|&w| w * Self::combine(1.0, &weights, &self.w_profile(w)))
            .collect();
        // The tau density factors out of every term; dividing by it is exact.
        let slice_value = trapezoid(&values, ws[1] - ws[0]);
        let evolved = evolve(rho, proc.initial(), -tau0, self.ancilla.hbar)?;
        let direct_value = delta_e(proc, &evolved)?;
        Ok(SlicePair { slice_value, direct_value })
    }

    /// The raw slice integral `int dw w P_W(w, tau0)`, without dividing by the
    /// Gaussian modulation.
    pub fn slice_moment(&self, tau0: f64, n_quad: usize) -> Result<f64> {
        if n_quad < MIN_QUAD_POINTS {
            return Err(Error::BadQuadratureSpec(format!(
                "need at least {MIN_QUAD_POINTS} points, got {n_quad}"
            )));
        }
        let (lo, hi) = self.centre_range();
        let sigma = self.ancilla.sigma;
        let ws = linspace(lo - BOX_SIGMAS * sigma, hi + BOX_SIGMAS * sigma, n_quad);
        let values: Vec<f64> = ws.iter().map(|&w| w * self.evaluate(w, tau0)).collect();
        Ok(trapezoid(&values, ws[1] - ws[0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::pauli;
    use crate::spectral::DEGENERACY_TOL;
    use crate::workstats::{convolved_distribution, identity_process, tpm_distribution, transition_table, MERGE_TOL};

    fn fig_process() -> DrivenProcess {
        let i = Complex::new(0.0, 1.0);
        let u = (&(&pauli::identity().scale_real(2f64.sqrt()) + &pauli::x().scale(i))
            + &pauli::z().scale(i))
            .scale_real(0.5);
        DrivenProcess::from_matrices(
            &pauli::excitation(),
            &pauli::excitation().scale_real(2.0),
            u,
            DEGENERACY_TOL,
        )
        .unwrap()
    }

    fn fig2_state() -> ComplexMatrix {
        (&pauli::identity() + &pauli::z().scale_real(0.25)).scale_real(0.5)
    }

    fn fig3_state() -> ComplexMatrix {
        (&(&(&pauli::identity() + &pauli::x().scale_real(0.5)) + &pauli::y().scale_real(0.5))
            + &pauli::z().scale_real(0.25))
            .scale_real(0.5)
    }

    fn wigner(rho: &ComplexMatrix, sigma: f64) -> WignerWork {
        let t = transition_table(&fig_process(), rho).unwrap();
        WignerWork::new(t, GaussianAncilla::new(sigma, 1.0).unwrap())
    }

    #[test]
    fn ancilla_defaults_and_validation() {
        let a = GaussianAncilla::new(0.1, 1.0).unwrap();
        assert!((a.tau_spread() - 5.0).abs() < 1e-15);
        assert!(GaussianAncilla::new(0.0, 1.0).is_err());
        assert!(GaussianAncilla::new(0.1, -1.0).is_err());
        assert!(GaussianAncilla::with_tau_spread(0.1, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn diagonal_state_factorises() {
        let q = wigner(&fig2_state(), 0.1);
        let pn = convolved_distribution(&tpm_distribution(q.table(), MERGE_TOL), 0.1).unwrap();
        for &w in &[-1.2, -0.5, 0.0, 0.3, 1.0, 2.1] {
            for &tau in &[-7.0, 0.0, 2.5] {
                let expected = pn.density(w) * normal_pdf(tau, 0.0, 5.0);
                assert!((q.evaluate(w, tau) - expected).abs() < 1e-14);
                assert_eq!(q.coherent_part(w, tau), 0.0);
            }
        }
    }

    #[test]
    fn zero_work_single_gaussian() {
        let proc = identity_process(&pauli::excitation()).unwrap();
        let t = transition_table(&proc, &ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
        let q = WignerWork::new(t, GaussianAncilla::new(0.2, 1.0).unwrap());
        for &(w, tau) in &[(0.0, 0.0), (0.1, -1.0), (-0.3, 2.0)] {
            let expected = normal_pdf(w, 0.0, 0.2) * normal_pdf(tau, 0.0, 2.5);
            assert!((q.evaluate(w, tau) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_state_is_real_and_decomposes() {
        let q = wigner(&fig3_state(), 0.1);
        let mut saw_negative = false;
        for i in 0..40 {
            for j in 0..40 {
                let w = -1.5 + 4.0 * i as f64 / 39.0;
                let tau = -15.0 + 30.0 * j as f64 / 39.0;
                let v = q.evaluate(w, tau);
                let z = q.evaluate_complex(w, tau);
                assert!(z.im.abs() <= 1e-12 * (z.re.abs() + 1.0));
                assert!((z.re - v).abs() < 1e-13);
                let split = q.diagonal_part(w, tau) + q.coherent_part(w, tau);
                assert!((split - v).abs() < 1e-13);
                saw_negative |= q.coherent_part(w, tau) < 0.0;
            }
        }
        assert!(saw_negative);
    }

    #[test]
    fn grid_matches_evaluate_and_validates() {
        let q = wigner(&fig3_state(), 0.1);
        let spec = GridSpec { w_min: -1.5, w_max: 2.5, n_w: 9, tau_min: -10.0, tau_max: 10.0, n_tau: 5 };
        let g = q.grid(&spec).unwrap();
        for (i, &tau) in g.tau_axis.iter().enumerate() {
            for (j, &w) in g.w_axis.iter().enumerate() {
                assert_eq!(g.values[i][j], q.evaluate(w, tau));
            }
        }
        assert_eq!(g.long_form().count(), 45);
        let bad = GridSpec { n_w: 1, ..spec };
        assert!(matches!(q.grid(&bad), Err(Error::BadGridSpec(_))));
        let bad = GridSpec { w_max: -2.0, ..spec };
        assert!(matches!(q.grid(&bad), Err(Error::BadGridSpec(_))));
    }

    #[test]
    fn marginals_agree() {
        for sigma in [0.02, 0.1, 0.35] {
            let q = wigner(&fig3_state(), sigma);
            for &w in &[-1.0, -0.5, 0.0, 0.5, 1.5, 2.0] {
                let closed = q.marginal_w_closed(w);
                let numeric = q.marginal_w_numeric(w, 8.0, 512).unwrap();
                assert!((closed - numeric).abs() < 1e-8, "sigma {sigma} w {w}: {closed} {numeric}");
            }
        }
        let q = wigner(&fig3_state(), 0.1);
        let truncated = q.marginal_w_numeric(0.0, 1.0, 512).unwrap();
        assert!((truncated - q.marginal_w_closed(0.0)).abs() > 1e-3);
        assert!(matches!(q.marginal_w_numeric(0.0, 8.0, 10), Err(Error::BadQuadratureSpec(_))));
    }

    #[test]
    fn diagonal_marginal_is_convolved_tpm() {
        let q = wigner(&fig2_state(), 0.35);
        for &w in &[-1.0, 0.25, 1.7] {
            assert!((q.marginal_w_closed(w) - q.convolved_tpm(w)).abs() < 1e-15);
        }
    }

    #[test]
    fn expectations_match_closed_forms() {
        let q = wigner(&fig3_state(), 0.1);
        let norm = q.expectation_default(|_, _| 1.0).unwrap();
        assert!((norm - 1.0).abs() < 1e-6, "{norm}");
        let mean_w = q.expectation_default(|w, _| w).unwrap();
        assert!((mean_w - q.mean_work()).abs() < 1e-6);
        let mean_tau = q.expectation_default(|_, tau| tau).unwrap();
        assert!((mean_tau - q.mean_tau()).abs() < 1e-6);
        let beta = 1.0;
        let sigma = q.ancilla().sigma();
        let mut region = q.default_box();
        region.w_min -= beta * sigma * sigma;
        region.w_max += beta * sigma * sigma;
        let jar = q.expectation(|w, _| (-beta * w).exp(), &region, 1024).unwrap();
        assert!((jar - q.exp_beta_work(beta)).abs() < 1e-6);
        assert!((q.exp_beta_work(0.0) - 1.0).abs() < 1e-14);
        assert!(q.coherent_integral(&q.default_box(), 1024).unwrap().abs() < 1e-6);

        let q2 = wigner(&fig2_state(), 0.1);
        assert!((q2.expectation_default(|w, _| w).unwrap() - 0.5).abs() < 1e-6);
        assert!(q2.expectation_default(|_, tau| tau).unwrap().abs() < 1e-6);
    }

    #[test]
    fn slice_identity() {
        let proc = fig_process();
        let rho = fig3_state();
        let q = WignerWork::new(
            transition_table(&proc, &rho).unwrap(),
            GaussianAncilla::new(0.1, 1.0).unwrap(),
        );
        let s = q.ancilla().tau_spread();
        for tau0 in [0.0, 0.5 * s, -0.5 * s, s, -s, 0.5] {
            let pair = q.delta_e_at(&proc, &rho, tau0).unwrap();
            assert!(pair.relative_gap() < 1e-8, "{tau0}: {pair:?}");
            let raw = q.slice_moment(tau0, 4097).unwrap();
            let expected = pair.direct_value * normal_pdf(tau0, 0.0, s);
            assert!((raw - expected).abs() < 1e-10);
        }
        let at_zero = q.delta_e_at(&proc, &rho, 0.0).unwrap();
        assert!((at_zero.direct_value - delta_e(&proc, &rho).unwrap()).abs() < 1e-15);
        assert!(matches!(
            q.delta_e_at(&proc, &rho, 6.5 * s),
            Err(Error::SliceTooFarOut { .. })
        ));
    }
}
