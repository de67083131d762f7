//! Direct quadrature of the Wigner transform of the post-protocol ancilla.
//!
//! The ancilla starts in the real Gaussian wavepacket
//! `psi(x) = (2 pi sigma^2)^{-1/4} exp(-x^2 / (4 sigma^2))`, so `|psi|^2` has
//! variance `sigma^2`. Each branch of the final state is `psi` translated by a
//! work value, and the Wigner function is integrated over the off-diagonal
//! coordinate `y` with a plain trapezoid rule. Nothing here uses the Gaussian
//! closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::linspace;
use crate::qcore::Complex;
use crate::workstats::WorkTransitionTable;

pub const MIN_QUAD_POINTS: usize = 512;
pub const DEFAULT_QUAD_POINTS: usize = 4097;

/// Real Gaussian amplitude whose squared modulus is `N(x | 0, sigma)`.
#[inline]
pub fn gaussian_amplitude(x: f64, sigma: f64) -> f64 {
    (2.0 * PI * sigma * sigma).powf(-0.25) * (-x * x / (4.0 * sigma * sigma)).exp()
}

/// Largest separation between branch centres that meet in one coherence,
/// `max |E_n - E_n'|`.
pub fn max_branch_separation(table: &WorkTransitionTable) -> f64 {
    let e = table.energies_initial();
    let lo = e.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

/// Integration half-width in `y` for which truncation is below double
/// precision: the `y` integrand of every branch pair is a Gaussian of standard
/// deviation `2 sigma` centred within the branch separation.
pub fn default_y_halfwidth(table: &WorkTransitionTable, sigma: f64) -> f64 {
    24.0 * sigma + max_branch_separation(table)
}

/// Full complex sum over ordered `(n, n', m)`; its imaginary part measures
/// how far the result is from real.
pub fn wigner_quadrature_complex(
    table: &WorkTransitionTable,
    sigma: f64,
    hbar: f64,
    w: f64,
    tau: f64,
    n_quad: usize,
    y_halfwidth: f64,
) -> Result<Complex> {
    if n_quad < MIN_QUAD_POINTS {
        return Err(Error::BadQuadratureSpec(format!(
            "need at least {MIN_QUAD_POINTS} points, got {n_quad}"
        )));
    }
    if !(y_halfwidth > 0.0 && y_halfwidth.is_finite()) {
        return Err(Error::BadQuadratureSpec(format!("y half-width {y_halfwidth} is not positive")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonpositiveWidth(sigma));
    }
    let ys = linspace(-y_halfwidth, y_halfwidth, n_quad);
    let step = ys[1] - ys[0];
    let kernel: Vec<Complex> = ys
        .iter()
        .enumerate()
        .map(|(k, &y)| {
            let weight = if k == 0 || k + 1 == n_quad { 0.5 * step } else { step };
            Complex::from_polar(weight, -tau * y / hbar)
        })
        .collect();

    let mut total = Complex::new(0.0, 0.0);
    for n in 0..table.n_initial() {
        for np in 0..table.n_initial() {
            for m in 0..table.n_final() {
                let c = table.coeff(n, np, m);
                if c == Complex::new(0.0, 0.0) {
                    continue;
                }
                let (a, b) = (table.work(n, m), table.work(np, m));
                let integral: Complex = ys
                    .iter()
                    .zip(&kernel)
                    .map(|(&y, k)| {
                        k * (gaussian_amplitude(w + 0.5 * y - a, sigma)
                            * gaussian_amplitude(w - 0.5 * y - b, sigma))
                    })
                    .sum();
                total += c * integral;
            }
        }
    }
    Ok(total / (2.0 * PI * hbar))
}

/// `P_W(w, tau)` by quadrature of the Wigner transform.
pub fn wigner_quadrature(
    table: &WorkTransitionTable,
    sigma: f64,
    hbar: f64,
    w: f64,
    tau: f64,
    n_quad: usize,
    y_halfwidth: f64,
) -> Result<f64> {
    wigner_quadrature_complex(table, sigma, hbar, w, tau, n_quad, y_halfwidth).map(|z| z.re)
}

/// Quadrature with the default resolution and half-width.
pub fn wigner_quadrature_default(
    table: &WorkTransitionTable,
    sigma: f64,
    hbar: f64,
    w: f64,
    tau: f64,
) -> Result<f64> {
    let half = default_y_halfwidth(table, sigma);
    wigner_quadrature(table, sigma, hbar, w, tau, DEFAULT_QUAD_POINTS, half)
}
