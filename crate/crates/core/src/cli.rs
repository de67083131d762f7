//! Command-line front end: scenario loading, the computation commands and
//! their CSV/JSON renderings.
//!
//! Exit codes: 0 success, 2 invalid input, 3 internal consistency violation.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::oracle::{self, AncillaGrid};
use crate::qcore::{Complex, ComplexMatrix};
use crate::scenarios::{builtin, Scenario};
use crate::spectral::DEGENERACY_TOL;
use crate::wigner::GridSpec;
use crate::workstats::{delta_e, mean_work_tpm, tpm_distribution, MERGE_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

pub const MARGINAL_TOL: f64 = 1e-8;
pub const SLICE_TOL: f64 = 1e-8;
pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const QUADRATURE_TOL: f64 = 1e-10;
pub const CIRCUIT_TOL: f64 = 1e-3;

const MARGINAL_TAU_SPREADS: f64 = 8.0;
const MARGINAL_QUAD_POINTS: usize = 512;

#[derive(Debug, Parser)]
#[command(name = "wigwork", version, about = "Wigner quasiprobability of quantum work")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-point-measurement work distribution as CSV `w,p`.
    Tpm(Common),
    /// Wigner function on a grid as long-form CSV `tau,w,value`.
    WignerGrid {
        #[command(flatten)]
        common: Common,
        /// w_min,w_max,n_w,tau_min,tau_max,n_tau
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Closed-form and quadrature work marginals as CSV `w,closed,numeric`.
    Marginal(Common),
    /// Mean-value summary as JSON.
    Means {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
    },
    /// Compare the closed form against both brute-force oracles.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["scenario", "file"])))]
pub struct Common {
    /// Built-in scenario name.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Scenario file (JSON).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }

    fn inconsistent(message: impl Into<String>) -> Self {
        Self { code: EXIT_INCONSISTENT, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::invalid(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Complex entries are `[re, im]` pairs.
type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub hamiltonian_initial: MatrixRows,
    pub hamiltonian_final: MatrixRows,
    pub unitary: MatrixRows,
    pub initial_state: MatrixRows,
    pub ancilla: AncillaSpec,
    #[serde(default)]
    pub degeneracy_tol: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridFields>,
    #[serde(default)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AncillaSpec {
    pub sigma: f64,
    #[serde(default)]
    pub tau_spread: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFields {
    pub w_min: f64,
    pub w_max: f64,
    pub n_w: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
}

impl From<GridFields> for GridSpec {
    fn from(g: GridFields) -> Self {
        GridSpec {
            w_min: g.w_min,
            w_max: g.w_max,
            n_w: g.n_w,
            tau_min: g.tau_min,
            tau_max: g.tau_max,
            n_tau: g.n_tau,
        }
    }
}

fn default_hbar() -> f64 {
    1.0
}

fn matrix(label: &str, rows: &MatrixRows) -> Result<ComplexMatrix, Error> {
    let rows: Vec<Vec<Complex>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| Error::ScenarioFile(format!("{label}: {e}")))
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::ScenarioFile(e.to_string()))
    }

    pub fn into_scenario(self, name: &str) -> Result<Scenario, Error> {
        Scenario::new(
            name,
            self.hbar,
            matrix("hamiltonian_initial", &self.hamiltonian_initial)?,
            matrix("hamiltonian_final", &self.hamiltonian_final)?,
            matrix("unitary", &self.unitary)?,
            matrix("initial_state", &self.initial_state)?,
            self.ancilla.sigma,
            self.ancilla.tau_spread,
            self.degeneracy_tol.unwrap_or(DEGENERACY_TOL),
            self.grid.map(GridSpec::from),
            self.beta,
        )
    }

    /// Serialisable description of an existing scenario.
    pub fn from_scenario(s: &Scenario) -> Self {
        let rows = |m: &ComplexMatrix| -> MatrixRows {
            (0..m.dim()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
        };
        Self {
            hbar: s.hbar,
            hamiltonian_initial: rows(&s.hamiltonian_initial),
            hamiltonian_final: rows(&s.hamiltonian_final),
            unitary: rows(&s.unitary),
            initial_state: rows(&s.initial_state),
            ancilla: AncillaSpec { sigma: s.sigma, tau_spread: s.tau_spread },
            degeneracy_tol: Some(s.degeneracy_tol),
            grid: Some(GridFields {
                w_min: s.grid.w_min,
                w_max: s.grid.w_max,
                n_w: s.grid.n_w,
                tau_min: s.grid.tau_min,
                tau_max: s.grid.tau_max,
                n_tau: s.grid.n_tau,
            }),
            beta: s.beta,
        }
    }
}

pub fn load_scenario(common: &Common) -> CliResult<Scenario> {
    match (&common.scenario, &common.file) {
        (Some(name), None) => Ok(builtin(name)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
            Ok(ScenarioFile::parse(&text)?.into_scenario(name)?)
        }
        _ => Err(CliError::invalid("exactly one of --scenario or --file is required")),
    }
}

pub fn parse_grid(text: &str) -> CliResult<GridSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::from(Error::BadGridSpec(format!("cannot parse `{text}`")));
    if parts.len() != 6 {
        return Err(bad());
    }
    let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let count = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let spec = GridSpec {
        w_min: real(parts[0])?,
        w_max: real(parts[1])?,
        n_w: count(parts[2])?,
        tau_min: real(parts[3])?,
        tau_max: real(parts[4])?,
        n_tau: count(parts[5])?,
    };
    spec.validate()?;
    Ok(spec)
}

/// Shortest digits that parse back to the same double. Plain notation for
/// moderate magnitudes, exponent notation otherwise; `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    let x = x + 0.0;
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn cmd_tpm(s: &Scenario) -> CliResult<String> {
    let dist = tpm_distribution(&s.table()?, MERGE_TOL);
    let mut out = String::from("w,p\n");
    for atom in dist.atoms() {
        writeln!(out, "{},{}", fmt_num(atom.w), fmt_num(atom.p)).unwrap();
    }
    Ok(out)
}

pub fn cmd_wigner_grid(s: &Scenario, grid: Option<GridSpec>) -> CliResult<String> {
    let spec = grid.unwrap_or(s.grid);
    let g = s.wigner()?.grid(&spec)?;
    let mut out = String::from("tau,w,value\n");
    for (tau, w, v) in g.long_form() {
        writeln!(out, "{},{},{}", fmt_num(tau), fmt_num(w), fmt_num(v)).unwrap();
    }
    Ok(out)
}

/// Rows are rendered even when a row breaches the tolerance; the breach is
/// reported alongside the output.
pub fn cmd_marginal(s: &Scenario) -> CliResult<(String, Option<CliError>)> {
    let q = s.wigner()?;
    let ws = crate::numeric::linspace(s.grid.w_min, s.grid.w_max, s.grid.n_w);
    let mut out = String::from("w,closed,numeric\n");
    let mut worst: f64 = 0.0;
    for w in ws {
        let closed = q.marginal_w_closed(w);
        let numeric = q.marginal_w_numeric(w, MARGINAL_TAU_SPREADS, MARGINAL_QUAD_POINTS)?;
        worst = worst.max((closed - numeric).abs());
        writeln!(out, "{},{},{}", fmt_num(w), fmt_num(closed), fmt_num(numeric)).unwrap();
    }
    let alarm = (worst > MARGINAL_TOL).then(|| {
        CliError::inconsistent(format!(
            "closed-form and quadrature marginals differ by {worst:e} (tolerance {MARGINAL_TOL:e})"
        ))
    });
    Ok((out, alarm))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SlicePairOut {
    pub slice: f64,
    pub direct: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NormalizationCheck {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeansSummary {
    pub scenario: String,
    #[serde(rename = "delta_E")]
    pub delta_e: f64,
    pub mean_work_tpm: f64,
    pub mean_work: f64,
    #[serde(rename = "delta_E_at_0")]
    pub delta_e_at_0: SlicePairOut,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exp_beta_work: Option<f64>,
    pub min_grid_value: f64,
    pub normalization_check: NormalizationCheck,
}

pub fn means_summary(s: &Scenario, beta: Option<f64>) -> CliResult<MeansSummary> {
    let proc = s.process()?;
    let table = s.table()?;
    let q = s.wigner()?;
    let beta = beta.or(s.beta);
    if let Some(b) = beta {
        if !b.is_finite() {
            return Err(CliError::invalid(format!("beta must be finite, got {b}")));
        }
    }
    let pair = q.delta_e_at(&proc, &s.initial_state, 0.0)?;
    Ok(MeansSummary {
        scenario: s.name.clone(),
        delta_e: delta_e(&proc, &s.initial_state)?,
        mean_work_tpm: mean_work_tpm(&tpm_distribution(&table, MERGE_TOL)),
        mean_work: q.mean_work(),
        delta_e_at_0: SlicePairOut { slice: pair.slice_value, direct: pair.direct_value },
        beta,
        exp_beta_work: beta.map(|b| q.exp_beta_work(b)),
        min_grid_value: q.grid(&s.grid)?.min_value(),
        normalization_check: NormalizationCheck {
            value: q.expectation_default(|_, _| 1.0)?,
            tolerance: NORMALIZATION_TOL,
        },
    })
}

pub fn cmd_means(s: &Scenario, beta: Option<f64>) -> CliResult<(String, Option<CliError>)> {
    let summary = means_summary(s, beta)?;
    let finite = [
        summary.delta_e,
        summary.mean_work_tpm,
        summary.mean_work,
        summary.delta_e_at_0.slice,
        summary.delta_e_at_0.direct,
        summary.min_grid_value,
        summary.normalization_check.value,
    ]
    .iter()
    .chain(summary.exp_beta_work.iter())
    .all(|x| x.is_finite());
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serialises");
    text.push('\n');
    let pair = crate::wigner::SlicePair {
        slice_value: summary.delta_e_at_0.slice,
        direct_value: summary.delta_e_at_0.direct,
    };
    let norm_gap = (summary.normalization_check.value - 1.0).abs();
    let alarm = if !finite {
        Some(CliError::inconsistent("non-finite value in summary"))
    } else if pair.relative_gap() > SLICE_TOL {
        Some(CliError::inconsistent(format!(
            "slice and direct energy changes differ by {:e} relative (tolerance {SLICE_TOL:e})",
            pair.relative_gap()
        )))
    } else if norm_gap > NORMALIZATION_TOL {
        Some(CliError::inconsistent(format!(
            "normalization off by {norm_gap:e} (tolerance {NORMALIZATION_TOL:e})"
        )))
    } else {
        None
    };
    Ok((text, alarm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub quadrature_gap: f64,
    pub circuit_gap: f64,
}

impl OracleReport {
    pub fn passes(&self) -> bool {
        self.quadrature_gap <= QUADRATURE_TOL && self.circuit_gap <= CIRCUIT_TOL
    }
}

pub fn oracle_report(s: &Scenario, probes: usize, seed: u64) -> CliResult<OracleReport> {
    if probes == 0 {
        return Err(CliError::invalid("--probes must be at least 1"));
    }
    let q = s.wigner()?;
    let points = oracle::probe_points(&oracle::probe_region(&q), probes, seed);
    let quadrature_gap = oracle::quadrature_gap(&q, &points)?;
    let grid = AncillaGrid::default_for(q.table(), s.sigma)?;
    let circuit_gap = oracle::circuit_gap(&q, &s.process()?, &s.initial_state, grid, &points)?;
    Ok(OracleReport { quadrature_gap, circuit_gap })
}

pub fn cmd_oracle_check(s: &Scenario, probes: usize, seed: u64) -> CliResult<(String, Option<CliError>)> {
    let r = oracle_report(s, probes, seed)?;
    let verdict = |gap: f64, tol: f64| if gap <= tol { "pass" } else { "FAIL" };
    let mut out = String::new();
    writeln!(out, "scenario {}", s.name).unwrap();
    writeln!(out, "probes {probes} seed {seed}").unwrap();
    writeln!(
        out,
        "quadrature max_abs_dev {} tol {} {}",
        fmt_num(r.quadrature_gap),
        fmt_num(QUADRATURE_TOL),
        verdict(r.quadrature_gap, QUADRATURE_TOL)
    )
    .unwrap();
    writeln!(
        out,
        "circuit max_abs_dev {} tol {} {}",
        fmt_num(r.circuit_gap),
        fmt_num(CIRCUIT_TOL),
        verdict(r.circuit_gap, CIRCUIT_TOL)
    )
    .unwrap();
    let alarm = (!r.passes()).then(|| CliError::inconsistent("closed form disagrees with an oracle"));
    Ok((out, alarm))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::invalid(format!("cannot write output: {e}")))
        }
    }
}

/// Sizes the global thread pool from `WIGWORK_THREADS` (0 or unset: automatic).
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("WIGWORK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::invalid(format!("WIGWORK_THREADS must be a count, got `{raw}`")))?;
    // A pool may already exist when embedded; keeping it is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let (common, result) = match &cli.command {
        Command::Tpm(common) => (common, load_scenario(common).and_then(|s| cmd_tpm(&s)).map(|t| (t, None))),
        Command::WignerGrid { common, grid } => {
            let result = load_scenario(common).and_then(|s| {
                let spec = grid.as_deref().map(parse_grid).transpose()?;
                cmd_wigner_grid(&s, spec)
            });
            (common, result.map(|t| (t, None)))
        }
        Command::Marginal(common) => (common, load_scenario(common).and_then(|s| cmd_marginal(&s))),
        Command::Means { common, beta } => {
            (common, load_scenario(common).and_then(|s| cmd_means(&s, *beta)))
        }
        Command::OracleCheck { common, probes, seed } => {
            (common, load_scenario(common).and_then(|s| cmd_oracle_check(&s, *probes, *seed)))
        }
    };
    let (text, alarm) = result?;
    emit(common.out.as_deref(), &text)?;
    match alarm {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_shortest() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(15.0 / 32.0), "0.46875");
        assert_eq!(fmt_num(1e-300), "1e-300");
        assert_eq!(fmt_num(-2.5e-7), "-2.5e-7");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn grid_flag_parsing() {
        let g = parse_grid("-1,2,3,-5,5,4").unwrap();
        assert_eq!((g.n_w, g.n_tau), (3, 4));
        assert!(parse_grid("-1,2,3,-5,5").is_err());
        assert!(parse_grid("-1,2,1,-5,5,4").is_err());
        assert!(parse_grid("a,2,3,-5,5,4").is_err());
    }

    #[test]
    fn tpm_of_fig2b() {
        let text = cmd_tpm(&builtin("fig2b").unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("w,p"));
        let rows: Vec<(f64, f64)> = lines
            .map(|l| {
                let (w, p) = l.split_once(',').unwrap();
                (w.parse().unwrap(), p.parse().unwrap())
            })
            .collect();
        let expected = [(-1.0, 3.0 / 32.0), (0.0, 15.0 / 32.0), (1.0, 9.0 / 32.0), (2.0, 5.0 / 32.0)];
        assert_eq!(rows.len(), 4);
        for ((w, p), (ew, ep)) in rows.iter().zip(expected) {
            assert_eq!(*w, ew);
            assert!((p - ep).abs() < 1e-15);
        }
    }

    #[test]
    fn scenario_file_round_trip() {
        let s = builtin("fig3b").unwrap();
        let file = ScenarioFile::from_scenario(&s);
        let text = serde_json::to_string(&file).unwrap();
        let back = ScenarioFile::parse(&text).unwrap().into_scenario("fig3b").unwrap();
        assert_eq!(back.initial_state, s.initial_state);
        assert_eq!(back.grid, s.grid);
        assert_eq!(cmd_tpm(&back).unwrap(), cmd_tpm(&s).unwrap());
    }

    #[test]
    fn scenario_file_rejects_garbage() {
        assert!(matches!(ScenarioFile::parse("{"), Err(Error::ScenarioFile(_))));
        let s = builtin("fig2b").unwrap();
        let mut file = ScenarioFile::from_scenario(&s);
        file.unitary[0].pop();
        assert!(file.into_scenario("ragged").is_err());
    }
}
