//! Work transition coefficients and the two-point-measurement statistics.
//!
//! The central object is the table of coefficients
//! `c[n][n'][m] = tr[Pi~_m U Pi_n rho Pi_n' U^dagger]`, indexed by an initial
//! level pair and a final level. Its diagonal (`n == n'`) entries are the joint
//! probabilities of the two-point measurement; the off-diagonal entries carry
//! the initial coherences between energy subspaces.

use crate::error::{Error, Result};
use crate::numeric::normal_pdf;
use crate::qcore::{density_violation, validate_unitary, Complex, ComplexMatrix, DENSITY_TOL, UNITARY_TOL};
use crate::spectral::{dephase, SpectralDecomposition, DEGENERACY_TOL};

pub const MERGE_TOL: f64 = 1e-9;

/// Atoms carrying less probability than this are dropped from the TPM
/// distribution.
pub const NEGLIGIBLE_MASS: f64 = 1e-14;

const SYMMETRY_TOL: f64 = 1e-12;
const NEGATIVITY_TOL: f64 = 1e-12;
const NORMALISATION_TOL: f64 = 1e-10;

/// Initial Hamiltonian, final Hamiltonian and the driving unitary.
#[derive(Debug, Clone)]
pub struct DrivenProcess {
    initial: SpectralDecomposition,
    final_: SpectralDecomposition,
    driving: ComplexMatrix,
}

impl DrivenProcess {
    pub fn new(
        initial: SpectralDecomposition,
        final_: SpectralDecomposition,
        driving: ComplexMatrix,
    ) -> Result<Self> {
        let dim = initial.dim();
        for found in [final_.dim(), driving.dim()] {
            if found != dim {
                return Err(Error::DimensionMismatch { expected: dim, found });
            }
        }
        if !validate_unitary(&driving, UNITARY_TOL) {
            return Err(Error::InvalidProcess("driving is not unitary".into()));
        }
        Ok(Self { initial, final_, driving })
    }

    /// Decomposes both Hamiltonians with the same degeneracy tolerance.
    pub fn from_matrices(
        h_initial: &ComplexMatrix,
        h_final: &ComplexMatrix,
        driving: ComplexMatrix,
        degeneracy_tol: f64,
    ) -> Result<Self> {
        Self::new(
            SpectralDecomposition::decompose(h_initial, degeneracy_tol)?,
            SpectralDecomposition::decompose(h_final, degeneracy_tol)?,
            driving,
        )
    }

    pub fn initial(&self) -> &SpectralDecomposition {
        &self.initial
    }

    pub fn final_hamiltonian(&self) -> &SpectralDecomposition {
        &self.final_
    }

    pub fn driving(&self) -> &ComplexMatrix {
        &self.driving
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    fn check_state(&self, rho: &ComplexMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        match density_violation(rho, DENSITY_TOL) {
            Some(why) => Err(Error::InvalidState(why)),
            None => Ok(()),
        }
    }
}

/// Identity driving with equal initial and final Hamiltonians.
pub fn identity_process(h: &ComplexMatrix) -> Result<DrivenProcess> {
    DrivenProcess::from_matrices(h, h, ComplexMatrix::identity(h.dim()), DEGENERACY_TOL)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkTransitionTable {
    energies_initial: Vec<f64>,
    energies_final: Vec<f64>,
    /// Flattened `[n][n'][m]`.
    coeffs: Vec<Complex>,
}

impl WorkTransitionTable {
    /// Assembles a table from raw coefficients, checking its invariants.
    pub fn from_parts(
        energies_initial: Vec<f64>,
        energies_final: Vec<f64>,
        coeffs: Vec<Complex>,
    ) -> Result<Self> {
        let (ni, nf) = (energies_initial.len(), energies_final.len());
        if coeffs.len() != ni * ni * nf {
            return Err(Error::DimensionMismatch { expected: ni * ni * nf, found: coeffs.len() });
        }
        let table = Self { energies_initial, energies_final, coeffs };
        table.check_invariants()?;
        Ok(table)
    }

    fn check_invariants(&self) -> Result<()> {
        let mut total = 0.0;
        for n in 0..self.n_initial() {
            for np in 0..self.n_initial() {
                for m in 0..self.n_final() {
                    let c = self.coeff(n, np, m);
                    if (c - self.coeff(np, n, m).conj()).norm() > SYMMETRY_TOL {
                        return Err(Error::InvalidState(format!(
                            "coefficient ({n},{np},{m}) breaks Hermitian-pair symmetry"
                        )));
                    }
                }
            }
            for m in 0..self.n_final() {
                let c = self.coeff(n, n, m);
                if c.re < -NEGATIVITY_TOL {
                    return Err(Error::InvalidState(format!(
                        "joint probability ({n},{m}) is negative: {:e}",
                        c.re
                    )));
                }
                total += c.re;
            }
        }
        if (total - 1.0).abs() > NORMALISATION_TOL {
            return Err(Error::InvalidState(format!("joint probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn n_initial(&self) -> usize {
        self.energies_initial.len()
    }

    pub fn n_final(&self) -> usize {
        self.energies_final.len()
    }

    pub fn energies_initial(&self) -> &[f64] {
        &self.energies_initial
    }

    pub fn energies_final(&self) -> &[f64] {
        &self.energies_final
    }

    #[inline]
    pub fn coeff(&self, n: usize, np: usize, m: usize) -> Complex {
        let (ni, nf) = (self.n_initial(), self.n_final());
        self.coeffs[(n * ni + np) * nf + m]
    }

    /// `w_nm = E~_m - E_n`.
    #[inline]
    pub fn work(&self, n: usize, m: usize) -> f64 {
        self.energies_final[m] - self.energies_initial[n]
    }

    /// All work values `w_nm`, in `(n, m)` order.
    pub fn work_values(&self) -> Vec<f64> {
        (0..self.n_initial())
            .flat_map(|n| (0..self.n_final()).map(move |m| (n, m)))
            .map(|(n, m)| self.work(n, m))
            .collect()
    }

    /// The table of the freely evolved state `rho(-tau)`:
    /// `c[n][n'][m] * e^{i tau (E_n - E_n') / hbar}`.
    pub fn phase_shifted(&self, tau: f64, hbar: f64) -> Self {
        let (ni, nf) = (self.n_initial(), self.n_final());
        let mut coeffs = self.coeffs.clone();
        for n in 0..ni {
            for np in 0..ni {
                let delta = self.energies_initial[n] - self.energies_initial[np];
                let phase = Complex::from_polar(1.0, tau * delta / hbar);
                for m in 0..nf {
                    coeffs[(n * ni + np) * nf + m] *= phase;
                }
            }
        }
        Self { coeffs, ..self.clone() }
    }

    /// True when every `n != n'` coefficient vanishes within `tol`.
    pub fn is_incoherent(&self, tol: f64) -> bool {
        (0..self.n_initial()).all(|n| {
            (0..self.n_initial())
                .filter(|&np| np != n)
                .all(|np| (0..self.n_final()).all(|m| self.coeff(n, np, m).norm() <= tol))
        })
    }

    /// Sum of `|c[n][n'][m]|` over `n != n'`.
    pub fn coherent_weight(&self) -> f64 {
        let mut acc = 0.0;
        for n in 0..self.n_initial() {
            for np in 0..self.n_initial() {
                if n != np {
                    acc += (0..self.n_final()).map(|m| self.coeff(n, np, m).norm()).sum::<f64>();
                }
            }
        }
        acc
    }
}

/// Computes `c[n][n'][m]` as `tr[(U^dagger Pi~_m U)(Pi_n rho Pi_n')]`.
pub fn transition_table(proc: &DrivenProcess, rho: &ComplexMatrix) -> Result<WorkTransitionTable> {
    proc.check_state(rho)?;
    let u = proc.driving();
    let u_dag = u.adjoint();
    let heisenberg: Vec<ComplexMatrix> = proc
        .final_hamiltonian()
        .levels()
        .iter()
        .map(|l| &(&u_dag * &l.projector) * u)
        .collect();
    let blocks = proc.initial().blocks(rho)?;
    let (ni, nf) = (proc.initial().len(), heisenberg.len());
    let mut coeffs = Vec::with_capacity(ni * ni * nf);
    for row in &blocks {
        for block in row {
            for h in &heisenberg {
                coeffs.push(h.trace_product(block)?);
            }
        }
    }
    WorkTransitionTable::from_parts(
        proc.initial().energies(),
        proc.final_hamiltonian().energies(),
        coeffs,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkAtom {
    pub w: f64,
    pub p: f64,
}

/// Atoms with strictly increasing work values and probabilities summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteWorkDistribution {
    atoms: Vec<WorkAtom>,
}

impl DiscreteWorkDistribution {
    pub fn new(atoms: Vec<WorkAtom>) -> Result<Self> {
        if atoms.windows(2).any(|a| a[0].w >= a[1].w) {
            return Err(Error::InvalidState("work values must be strictly increasing".into()));
        }
        if atoms.iter().any(|a| a.p.is_nan() || a.p < 0.0 || !a.w.is_finite()) {
            return Err(Error::InvalidState("atoms need finite w and p >= 0".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > NORMALISATION_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[WorkAtom] {
        &self.atoms
    }
}

/// `P_TPM(w)`: joint probabilities `c[n][n][m]` gathered by work value.
///
/// Work values closer than `merge_tol` (chained over sorted neighbours) share
/// one atom placed at their probability-weighted mean.
pub fn tpm_distribution(table: &WorkTransitionTable, merge_tol: f64) -> DiscreteWorkDistribution {
    let mut entries: Vec<(f64, f64)> = (0..table.n_initial())
        .flat_map(|n| (0..table.n_final()).map(move |m| (n, m)))
        .map(|(n, m)| (table.work(n, m), table.coeff(n, n, m).re.max(0.0)))
        .collect();
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut groups: Vec<Vec<(f64, f64)>> = Vec::new();
    for e in entries {
        match groups.last_mut() {
            Some(g) if e.0 - g.last().unwrap().0 <= merge_tol => g.push(e),
            _ => groups.push(vec![e]),
        }
    }
    let atoms = groups
        .into_iter()
        .filter_map(|g| {
            let p: f64 = g.iter().map(|e| e.1).sum();
            if p <= NEGLIGIBLE_MASS {
                return None;
            }
            let w = g.iter().map(|e| e.0 * e.1).sum::<f64>() / p;
            // Normalise -0.0 so rendered output is stable.
            Some(WorkAtom { w: w + 0.0, p })
        })
        .collect();
    DiscreteWorkDistribution { atoms }
}

/// Mean work under the TPM distribution.
pub fn mean_work_tpm(d: &DiscreteWorkDistribution) -> f64 {
    d.atoms.iter().map(|a| a.w * a.p).sum()
}

/// `tr[H~ U rho U^dagger] - tr[H rho]`.
pub fn delta_e(proc: &DrivenProcess, rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != proc.dim() {
        return Err(Error::DimensionMismatch { expected: proc.dim(), found: rho.dim() });
    }
    let u = proc.driving();
    let evolved = &(u * rho) * &u.adjoint();
    let final_energy = proc.final_hamiltonian().hamiltonian().trace_product(&evolved)?.re;
    let initial_energy = proc.initial().hamiltonian().trace_product(rho)?.re;
    Ok(final_energy - initial_energy)
}

/// `tr[H~ U rho_bar U^dagger] - tr[H rho_bar]` for the dephased state.
pub fn delta_e_dephased(proc: &DrivenProcess, rho: &ComplexMatrix) -> Result<f64> {
    delta_e(proc, &dephase(rho, proc.initial())?)
}

/// `P_N(w|sigma)`: the TPM distribution smeared with a normal kernel.
#[derive(Debug, Clone)]
pub struct ConvolvedDistribution {
    atoms: Vec<WorkAtom>,
    sigma: f64,
}

impl ConvolvedDistribution {
    pub fn density(&self, w: f64) -> f64 {
        self.atoms.iter().map(|a| a.p * normal_pdf(w, a.w, self.sigma)).sum()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

pub fn convolved_distribution(
    d: &DiscreteWorkDistribution,
    sigma: f64,
) -> Result<ConvolvedDistribution> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonpositiveWidth(sigma));
    }
    Ok(ConvolvedDistribution { atoms: d.atoms.clone(), sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{linspace, trapezoid};
    use crate::qcore::pauli;
    use crate::spectral::evolve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

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

    fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let h = (&h + &h.adjoint()).scale_real(0.5);
        let eig = crate::qcore::hermitian_eig(&h, 1e-10).unwrap();
        let phases: Vec<Complex> =
            eig.eigenvalues.iter().map(|&l| Complex::from_polar(1.0, 3.0 * l)).collect();
        let mut d = ComplexMatrix::zeros(n);
        for (k, p) in phases.iter().enumerate() {
            d[(k, k)] = *p;
        }
        &(&eig.eigenvectors * &d) * &eig.eigenvectors.adjoint()
    }

    fn random_density(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let rho = &a * &a.adjoint();
        let tr = rho.trace().re;
        rho.scale_real(1.0 / tr)
    }

    fn random_process(n: usize, rng: &mut impl Rng) -> DrivenProcess {
        let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ht: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        DrivenProcess::from_matrices(
            &ComplexMatrix::from_real_diagonal(&h),
            &ComplexMatrix::from_real_diagonal(&ht),
            random_unitary(n, rng),
            DEGENERACY_TOL,
        )
        .unwrap()
    }

    #[test]
    fn fig2_coefficients() {
        let t = transition_table(&fig_process(), &fig2_state()).unwrap();
        let expect = [[15.0, 5.0], [3.0, 9.0]];
        for (n, row) in expect.iter().enumerate() {
            for (m, &e) in row.iter().enumerate() {
                let c = t.coeff(n, n, m);
                assert!((c - Complex::new(e / 32.0, 0.0)).norm() < 1e-15, "{n}{m}");
                assert!(t.coeff(n, 1 - n, m).norm() < 1e-15);
            }
        }
        assert_eq!(t.work_values(), vec![0.0, 2.0, -1.0, 1.0]);
    }

    #[test]
    fn fig3_coefficients_share_diagonal_and_pair_symmetry() {
        let t2 = transition_table(&fig_process(), &fig2_state()).unwrap();
        let t3 = transition_table(&fig_process(), &fig3_state()).unwrap();
        for n in 0..2 {
            for m in 0..2 {
                assert!((t3.coeff(n, n, m) - t2.coeff(n, n, m)).norm() < 1e-15);
            }
        }
        for m in 0..2 {
            assert!(t3.coeff(0, 1, m).norm() > 0.05);
            assert!((t3.coeff(0, 1, m) - t3.coeff(1, 0, m).conj()).norm() < 1e-15);
        }
        // tr[Pi~_m U Pi_0 rho Pi_1 U^dagger] = U_m0 rho_01 conj(U_m1), rho_01 = (1 - i)/4.
        let u = fig_process().driving().clone();
        for m in 0..2 {
            let expected = u[(m, 0)] * Complex::new(0.25, -0.25) * u[(m, 1)].conj();
            assert!((t3.coeff(0, 1, m) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_driving_is_block_diagonal() {
        let proc = identity_process(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 3.0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(3, &mut rng);
        let t = transition_table(&proc, &rho).unwrap();
        for n in 0..3 {
            for np in 0..3 {
                for m in 0..3 {
                    let c = t.coeff(n, np, m);
                    if n == np && n == m {
                        assert!((c - rho[(n, n)]).norm() < 1e-15);
                    } else {
                        assert!(c.norm() < 1e-15);
                    }
                }
            }
        }
        let pure = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
        let d = tpm_distribution(&transition_table(&proc, &pure).unwrap(), MERGE_TOL);
        assert_eq!(d.atoms(), &[WorkAtom { w: 0.0, p: 1.0 }]);
        assert_eq!(mean_work_tpm(&d), 0.0);
        assert!(delta_e(&proc, &rho).unwrap().abs() < 1e-15);
    }

    #[test]
    fn fig2_tpm_distribution() {
        let t = transition_table(&fig_process(), &fig2_state()).unwrap();
        let d = tpm_distribution(&t, MERGE_TOL);
        let expect = [(-1.0, 3.0), (0.0, 15.0), (1.0, 9.0), (2.0, 5.0)];
        assert_eq!(d.atoms().len(), 4);
        for (a, (w, p)) in d.atoms().iter().zip(expect) {
            assert_eq!(a.w, w);
            assert!((a.p - p / 32.0).abs() < 1e-15);
        }
        assert!((mean_work_tpm(&d) - 0.5).abs() < 1e-15);
        let t3 = transition_table(&fig_process(), &fig3_state()).unwrap();
        let d3 = tpm_distribution(&t3, MERGE_TOL);
        for (a, b) in d.atoms().iter().zip(d3.atoms()) {
            assert_eq!(a.w, b.w);
            assert!((a.p - b.p).abs() < 1e-15);
        }
        assert!((mean_work_tpm(&d3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn delta_e_fig_scenarios() {
        let proc = fig_process();
        assert!((delta_e(&proc, &fig2_state()).unwrap() - 0.5).abs() < 1e-15);
        let coherent = delta_e(&proc, &fig3_state()).unwrap();
        // 2 (U rho U^dagger)_11 - 3/8 with (U rho U^dagger)_11 = 14/32 + (sqrt2 - 1)/8.
        assert!((coherent - (0.5 + (2f64.sqrt() - 1.0) / 4.0)).abs() < 1e-15);
        assert!((delta_e_dephased(&proc, &fig3_state()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let proc = fig_process();
        assert!(matches!(
            transition_table(&proc, &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            transition_table(&proc, &ComplexMatrix::identity(2)),
            Err(Error::InvalidState(_))
        ));
        let bad = DrivenProcess::from_matrices(
            &pauli::excitation(),
            &pauli::excitation(),
            ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            DEGENERACY_TOL,
        );
        assert!(matches!(bad, Err(Error::InvalidProcess(_))));
        let negative = WorkTransitionTable::from_parts(
            vec![0.0],
            vec![0.0, 1.0],
            vec![Complex::new(1.1, 0.0), Complex::new(-0.1, 0.0)],
        );
        assert!(matches!(negative, Err(Error::InvalidState(_))));
    }

    #[test]
    fn merge_tolerance_coalesces_close_work_values() {
        let table = WorkTransitionTable::from_parts(
            vec![0.0, 1.0],
            vec![1.0 + 1e-12, 2.0],
            vec![
                Complex::new(0.25, 0.0),
                Complex::new(0.25, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.25, 0.0),
                Complex::new(0.25, 0.0),
            ],
        )
        .unwrap();
        let d = tpm_distribution(&table, MERGE_TOL);
        // Work values: 1+1e-12, 2, 1e-12, 1 -> {1e-12}, {1, 1+1e-12}, {2}.
        assert_eq!(d.atoms().len(), 3);
        assert!((d.atoms()[1].p - 0.5).abs() < 1e-15);
        assert!((d.atoms()[1].w - (1.0 + 0.5e-12)).abs() < 1e-15);
    }

    #[test]
    fn convolved_distribution_properties() {
        let single = DiscreteWorkDistribution::new(vec![WorkAtom { w: 0.0, p: 1.0 }]).unwrap();
        let pn = convolved_distribution(&single, 1.0).unwrap();
        assert!((pn.density(0.0) - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-16);
        assert_eq!(convolved_distribution(&single, 0.0).unwrap_err(), Error::NonpositiveWidth(0.0));
        assert!(convolved_distribution(&single, -1.0).is_err());

        let t = transition_table(&fig_process(), &fig2_state()).unwrap();
        let d = tpm_distribution(&t, MERGE_TOL);
        let pn = convolved_distribution(&d, 0.1).unwrap();
        let xs = linspace(-2.0, 4.0, 6001);
        let ys: Vec<f64> = xs.iter().map(|&w| pn.density(w)).collect();
        assert!((trapezoid(&ys, xs[1] - xs[0]) - 1.0).abs() < 1e-6);

        let sigma = 0.02;
        let pn = convolved_distribution(&d, sigma).unwrap();
        for atom in d.atoms() {
            let xs = linspace(atom.w - 4.0 * sigma, atom.w + 4.0 * sigma, 2001);
            let ys: Vec<f64> = xs.iter().map(|&w| pn.density(w)).collect();
            assert!((trapezoid(&ys, xs[1] - xs[0]) - atom.p).abs() < 1e-4);
        }
    }

    #[test]
    fn random_process_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..25 {
            let n = rng.gen_range(2..5);
            let proc = random_process(n, &mut rng);
            let rho = random_density(n, &mut rng);
            let t = transition_table(&proc, &rho).unwrap();
            let dephased = dephase(&rho, proc.initial()).unwrap();
            let td = transition_table(&proc, &dephased).unwrap();
            for a in 0..t.n_initial() {
                for b in 0..t.n_initial() {
                    for m in 0..t.n_final() {
                        let expected = if a == b { t.coeff(a, b, m) } else { Complex::new(0.0, 0.0) };
                        assert!((td.coeff(a, b, m) - expected).norm() < 1e-13);
                        assert!((t.coeff(a, b, m) - t.coeff(b, a, m).conj()).norm() < 1e-12);
                    }
                }
            }
            assert_eq!(tpm_distribution(&t, MERGE_TOL), tpm_distribution(&td, MERGE_TOL));
            let mean = mean_work_tpm(&tpm_distribution(&t, MERGE_TOL));
            assert!((mean - delta_e(&proc, &dephased).unwrap()).abs() < 1e-11);

            let tau = rng.gen_range(-3.0..3.0);
            let shifted = transition_table(&proc, &evolve(&rho, proc.initial(), -tau, 1.0).unwrap())
                .unwrap();
            let phased = t.phase_shifted(tau, 1.0);
            for a in 0..t.n_initial() {
                for b in 0..t.n_initial() {
                    for m in 0..t.n_final() {
                        assert!((shifted.coeff(a, b, m) - phased.coeff(a, b, m)).norm() < 1e-12);
                    }
                }
            }
        }
    }
}
