//! Built-in scenarios, in units where `E = 1` and `hbar = 1`.

use crate::error::{Error, Result};
use crate::qcore::{density_violation, pauli, validate_unitary, Complex, ComplexMatrix};
use crate::spectral::DEGENERACY_TOL;
use crate::wigner::{GaussianAncilla, GridSpec, WignerWork};
use crate::workstats::{transition_table, DrivenProcess, WorkTransitionTable};

pub const BUILTIN_NAMES: [&str; 8] = [
    "fig2a",
    "fig2b",
    "fig2c",
    "fig3a",
    "fig3b",
    "fig3c",
    "jarzynski",
    "qutrit-degenerate",
];

/// Ancilla widths of the `a`, `b`, `c` panels.
pub const PANEL_SIGMAS: [f64; 3] = [0.02, 0.1, 0.35];
pub const DEFAULT_SIGMA: f64 = 0.1;
pub const JARZYNSKI_BETA: f64 = 1.0;

const GRID_N_W: usize = 201;
const GRID_N_TAU: usize = 121;
const GRID_TAU_SPREADS: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub hbar: f64,
    pub hamiltonian_initial: ComplexMatrix,
    pub hamiltonian_final: ComplexMatrix,
    pub unitary: ComplexMatrix,
    pub initial_state: ComplexMatrix,
    pub sigma: f64,
    /// Overrides the minimum-uncertainty τ-spread when set.
    pub tau_spread: Option<f64>,
    pub degeneracy_tol: f64,
    pub grid: GridSpec,
    pub beta: Option<f64>,
}

impl Scenario {
    /// Assembles and validates a scenario; `grid` defaults to one fitted to
    /// the work values.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        hbar: f64,
        hamiltonian_initial: ComplexMatrix,
        hamiltonian_final: ComplexMatrix,
        unitary: ComplexMatrix,
        initial_state: ComplexMatrix,
        sigma: f64,
        tau_spread: Option<f64>,
        degeneracy_tol: f64,
        grid: Option<GridSpec>,
        beta: Option<f64>,
    ) -> Result<Self> {
        let mut scenario = Self {
            name: name.into(),
            hbar,
            hamiltonian_initial,
            hamiltonian_final,
            unitary,
            initial_state,
            sigma,
            tau_spread,
            degeneracy_tol,
            grid: GridSpec { w_min: 0.0, w_max: 1.0, n_w: 2, tau_min: 0.0, tau_max: 1.0, n_tau: 2 },
            beta,
        };
        scenario.ancilla()?;
        if let Some(b) = beta {
            if !b.is_finite() {
                return Err(Error::InvalidState(format!("beta must be finite, got {b}")));
            }
        }
        if !(degeneracy_tol >= 0.0 && degeneracy_tol.is_finite()) {
            return Err(Error::InvalidProcess(format!("bad degeneracy tolerance {degeneracy_tol}")));
        }
        let table = scenario.table()?;
        scenario.grid = match grid {
            Some(g) => g,
            None => scenario.default_grid(&table)?,
        };
        scenario.grid.validate()?;
        Ok(scenario)
    }

    pub fn ancilla(&self) -> Result<GaussianAncilla> {
        match self.tau_spread {
            Some(s) => GaussianAncilla::with_tau_spread(self.sigma, self.hbar, s),
            None => GaussianAncilla::new(self.sigma, self.hbar),
        }
    }

    pub fn process(&self) -> Result<DrivenProcess> {
        DrivenProcess::from_matrices(
            &self.hamiltonian_initial,
            &self.hamiltonian_final,
            self.unitary.clone(),
            self.degeneracy_tol,
        )
    }

    pub fn table(&self) -> Result<WorkTransitionTable> {
        transition_table(&self.process()?, &self.initial_state)
    }

    pub fn wigner(&self) -> Result<WignerWork> {
        Ok(WignerWork::new(self.table()?, self.ancilla()?))
    }

    /// Same process and state with a different ancilla width. The τ-spread
    /// override and grid are reset to their defaults.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.hbar,
            self.hamiltonian_initial.clone(),
            self.hamiltonian_final.clone(),
            self.unitary.clone(),
            self.initial_state.clone(),
            sigma,
            None,
            self.degeneracy_tol,
            None,
            self.beta,
        )
    }

    /// `w` spans every work value padded by `max(0.5, 4 sigma)`; `tau` spans
    /// four τ-spreads either side.
    fn default_grid(&self, table: &WorkTransitionTable) -> Result<GridSpec> {
        let works = table.work_values();
        let pad = (4.0 * self.sigma).max(0.5);
        let s = self.ancilla()?.tau_spread();
        Ok(GridSpec {
            w_min: works.iter().copied().fold(f64::INFINITY, f64::min) - pad,
            w_max: works.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad,
            n_w: GRID_N_W,
            tau_min: -GRID_TAU_SPREADS * s,
            tau_max: GRID_TAU_SPREADS * s,
            n_tau: GRID_N_TAU,
        })
    }
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// `(sqrt(2) I + i sigma_x + i sigma_z) / 2`.
pub fn two_level_unitary() -> ComplexMatrix {
    let i = c(0.0, 1.0);
    (&(&pauli::identity().scale_real(2f64.sqrt()) + &pauli::x().scale(i)) + &pauli::z().scale(i))
        .scale_real(0.5)
}

/// `(I + sigma_z / 4) / 2`.
pub fn fig2_state() -> ComplexMatrix {
    (&pauli::identity() + &pauli::z().scale_real(0.25)).scale_real(0.5)
}

/// `(I + sigma_x / 2 + sigma_y / 2 + sigma_z / 4) / 2`.
pub fn fig3_state() -> ComplexMatrix {
    (&(&(&pauli::identity() + &pauli::x().scale_real(0.5)) + &pauli::y().scale_real(0.5))
        + &pauli::z().scale_real(0.25))
        .scale_real(0.5)
}

/// `exp(-beta H) / Z` for the two-level `H = sigma_+ sigma_-`.
pub fn thermal_two_level(beta: f64) -> ComplexMatrix {
    let excited = (-beta).exp();
    let z = 1.0 + excited;
    ComplexMatrix::from_real_diagonal(&[1.0 / z, excited / z])
}

fn qutrit_unitary() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![
            c(-0.08510890466414622, -0.06384015968642899),
            c(-0.46483090641725167, -0.5286146388693991),
            c(0.7000148437571295, -0.056204260426171423),
        ],
        vec![
            c(-0.7213257928498233, 0.17830336894071908),
            c(0.4658967645593801, -0.23108040784195563),
            c(0.02969377302190601, -0.42018726649243443),
        ],
        vec![
            c(-0.2925972118349003, -0.5924228128444131),
            c(-0.3379568742955558, -0.34615891294803597),
            c(-0.5733265543499062, 0.026036563295332826),
        ],
    ])
    .expect("literal qutrit unitary is square")
}

fn qutrit_state() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![
            c(0.20041180507209339, 0.0),
            c(-0.06693872425276924, -0.023275023414172563),
            c(0.09820068389077302, 0.06560072214724019),
        ],
        vec![
            c(-0.06693872425276924, 0.023275023414172563),
            c(0.346143779634462, 0.0),
            c(-0.27716204104399017, -0.07823625972013687),
        ],
        vec![
            c(0.09820068389077302, -0.06560072214724019),
            c(-0.27716204104399017, 0.07823625972013687),
            c(0.45344441529344465, 0.0),
        ],
    ])
    .expect("literal qutrit state is square")
}

fn two_level(name: &str, rho: ComplexMatrix, sigma: f64, beta: Option<f64>) -> Result<Scenario> {
    Scenario::new(
        name,
        1.0,
        pauli::excitation(),
        pauli::excitation().scale_real(2.0),
        two_level_unitary(),
        rho,
        sigma,
        None,
        DEGENERACY_TOL,
        None,
        beta,
    )
}

pub fn builtin(name: &str) -> Result<Scenario> {
    let panel = |suffix: char| match suffix {
        'a' => Some(PANEL_SIGMAS[0]),
        'b' => Some(PANEL_SIGMAS[1]),
        'c' => Some(PANEL_SIGMAS[2]),
        _ => None,
    };
    let unknown = || Error::UnknownScenario(name.to_string());
    match name {
        "jarzynski" => two_level(
            name,
            thermal_two_level(JARZYNSKI_BETA),
            DEFAULT_SIGMA,
            Some(JARZYNSKI_BETA),
        ),
        "qutrit-degenerate" => Scenario::new(
            name,
            1.0,
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.0]),
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 2.0]),
            qutrit_unitary(),
            qutrit_state(),
            DEFAULT_SIGMA,
            None,
            DEGENERACY_TOL,
            None,
            None,
        ),
        _ if name.len() == 5 && (name.starts_with("fig2") || name.starts_with("fig3")) => {
            let sigma = name.chars().last().and_then(panel).ok_or_else(unknown)?;
            let rho = if name.starts_with("fig2") { fig2_state() } else { fig3_state() };
            two_level(name, rho, sigma, None)
        }
        _ => Err(unknown()),
    }
}

/// Validators at the strict tolerance used for built-in data.
pub fn validate_builtin(s: &Scenario, tol: f64) -> Result<()> {
    if !validate_unitary(&s.unitary, tol) {
        return Err(Error::InvalidProcess(format!("{}: driving is not unitary within {tol}", s.name)));
    }
    if let Some(reason) = density_violation(&s.initial_state, tol) {
        return Err(Error::InvalidState(format!("{}: {reason}", s.name)));
    }
    Ok(())
}
