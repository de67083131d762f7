//! Independent brute-force references for the closed-form Wigner function.
//!
//! [`quadrature`] integrates the Wigner transform of translated Gaussian
//! wavepackets directly; [`circuit`] simulates the two-coupling measurement
//! circuit on a discretised ancilla. Neither uses the Gaussian closed form.
//! The comparison helpers at the bottom of this module drive both against a
//! [`WignerWork`].

pub mod circuit;
pub mod quadrature;

pub use circuit::{grid_wigner, sm_circuit, AncillaGrid, JointState, ReducedAncilla};
pub use quadrature::{wigner_quadrature, wigner_quadrature_complex, wigner_quadrature_default};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::numeric::linspace;
use crate::qcore::ComplexMatrix;
use crate::wigner::{PhaseBox, WignerWork};
use crate::workstats::DrivenProcess;

/// Standard deviations around the term centres covered by probe points.
pub const PROBE_SIGMAS: f64 = 4.0;

/// Region where `P_W` carries its structure: every work value padded by
/// `PROBE_SIGMAS` in `w`, `PROBE_SIGMAS` τ-spreads in `tau`.
pub fn probe_region(q: &WignerWork) -> PhaseBox {
    let works = q.table().work_values();
    let a = q.ancilla();
    let lo = works.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = works.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    PhaseBox {
        w_min: lo - PROBE_SIGMAS * a.sigma(),
        w_max: hi + PROBE_SIGMAS * a.sigma(),
        tau_min: -PROBE_SIGMAS * a.tau_spread(),
        tau_max: PROBE_SIGMAS * a.tau_spread(),
    }
}

/// `n` uniform pseudo-random points in `region`, reproducible from `seed`.
pub fn probe_points(region: &PhaseBox, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let w = rng.gen_range(region.w_min..=region.w_max);
            let tau = rng.gen_range(region.tau_min..=region.tau_max);
            (w, tau)
        })
        .collect()
}

/// `n_w x n_tau` lattice spanning `region`, tau-major.
pub fn probe_lattice(region: &PhaseBox, n_w: usize, n_tau: usize) -> Vec<(f64, f64)> {
    let ws = linspace(region.w_min, region.w_max, n_w);
    linspace(region.tau_min, region.tau_max, n_tau)
        .into_iter()
        .flat_map(|tau| ws.iter().map(move |&w| (w, tau)))
        .collect()
}

/// Largest `|evaluate - quadrature|` over `probes`. The quadrature uses only
/// `sigma` and `hbar` from the ancilla, never its τ-spread.
pub fn quadrature_gap(q: &WignerWork, probes: &[(f64, f64)]) -> Result<f64> {
    let (sigma, hbar) = (q.ancilla().sigma(), q.ancilla().hbar());
    let gaps = probes
        .par_iter()
        .map(|&(w, tau)| {
            let reference = wigner_quadrature_default(q.table(), sigma, hbar, w, tau)?;
            Ok((q.evaluate(w, tau) - reference).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// Largest `|evaluate - grid_wigner|` over `probes` for a circuit run on `grid`.
pub fn circuit_gap(
    q: &WignerWork,
    proc: &DrivenProcess,
    rho: &ComplexMatrix,
    grid: AncillaGrid,
    probes: &[(f64, f64)],
) -> Result<f64> {
    let reduced = sm_circuit(proc, rho, q.ancilla().sigma(), grid)?;
    let hbar = q.ancilla().hbar();
    let gaps = probes
        .par_iter()
        .map(|&(w, tau)| Ok((q.evaluate(w, tau) - grid_wigner(&reduced, hbar, w, tau)?).abs()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}
