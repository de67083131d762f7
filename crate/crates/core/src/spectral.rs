//! Spectral structure of Hamiltonians, the dephasing map and free evolution.

use crate::error::{Error, Result};
use crate::qcore::{hermitian_eig, Complex, ComplexMatrix, HERM_TOL};

pub const DEGENERACY_TOL: f64 = 1e-9;

/// One energy level: its energy and the projector onto its eigenspace.
#[derive(Debug, Clone)]
pub struct Level {
    pub energy: f64,
    pub projector: ComplexMatrix,
    pub rank: usize,
}

/// `H = sum_n E_n Pi_n` with strictly increasing energies.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    dim: usize,
    levels: Vec<Level>,
}

impl SpectralDecomposition {
    /// Diagonalises `h` and merges eigenvalues whose sorted neighbours lie within
    /// `degeneracy_tol` of one another into a single level.
    pub fn decompose(h: &ComplexMatrix, degeneracy_tol: f64) -> Result<Self> {
        let eig = hermitian_eig(h, HERM_TOL)?;
        let dim = h.dim();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for k in 0..dim {
            match groups.last_mut() {
                Some(g)
                    if eig.eigenvalues[k] - eig.eigenvalues[*g.last().unwrap()]
                        <= degeneracy_tol =>
                {
                    g.push(k)
                }
                _ => groups.push(vec![k]),
            }
        }
        let levels = groups
            .into_iter()
            .map(|members| {
                let energy =
                    members.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / members.len() as f64;
                let mut projector = ComplexMatrix::zeros(dim);
                for &k in &members {
                    projector = &projector + &ComplexMatrix::outer(&eig.eigenvector(k));
                }
                Level { energy, projector, rank: members.len() }
            })
            .collect();
        Ok(Self { dim, levels })
    }

    /// Builds a decomposition from explicit levels, checking the projector
    /// invariants to 1e-10.
    pub fn from_levels(levels: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let dim = levels.first().map(|(_, p)| p.dim()).ok_or_else(|| {
            Error::InvalidState("a spectral decomposition needs at least one level".into())
        })?;
        let levels: Vec<Level> = levels
            .into_iter()
            .map(|(energy, projector)| {
                let rank = projector.trace().re.round() as usize;
                Level { energy, projector, rank }
            })
            .collect();
        let d = Self { dim, levels };
        d.check_invariants(1e-10)?;
        Ok(d)
    }

    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidState(msg));
        if self.levels.windows(2).any(|w| w[0].energy >= w[1].energy) {
            return bad("energies are not strictly increasing".into());
        }
        let mut sum = ComplexMatrix::zeros(self.dim);
        for (n, level) in self.levels.iter().enumerate() {
            let p = &level.projector;
            if p.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
            }
            if (p * p).max_abs_diff(p) > tol || p.hermiticity_deviation() > tol {
                return bad(format!("level {n} is not an orthogonal projector"));
            }
            if level.rank == 0 {
                return bad(format!("level {n} has rank 0"));
            }
            for (k, other) in self.levels.iter().enumerate().skip(n + 1) {
                if (p * &other.projector).max_abs() > tol {
                    return bad(format!("projectors {n} and {k} are not orthogonal"));
                }
            }
            sum = &sum + p;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(self.dim)) > tol {
            return bad("projectors do not resolve the identity".into());
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn projector(&self, n: usize) -> &ComplexMatrix {
        &self.levels[n].projector
    }

    /// `sum_n E_n Pi_n`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        self.levels.iter().fold(ComplexMatrix::zeros(self.dim), |acc, l| {
            &acc + &l.projector.scale_real(l.energy)
        })
    }

    /// Smallest gap between distinct levels, or `None` for a single level.
    pub fn min_gap(&self) -> Option<f64> {
        self.levels.windows(2).map(|w| w[1].energy - w[0].energy).reduce(f64::min)
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.dim() });
        }
        Ok(())
    }

    /// `Pi_n rho Pi_n'` for every ordered pair.
    pub fn blocks(&self, rho: &ComplexMatrix) -> Result<Vec<Vec<ComplexMatrix>>> {
        self.check_dim(rho)?;
        Ok(self
            .levels
            .iter()
            .map(|a| {
                let left = &a.projector * rho;
                self.levels.iter().map(|b| &left * &b.projector).collect()
            })
            .collect())
    }
}

/// Removes coherences between energy subspaces: `sum_n Pi_n rho Pi_n`.
pub fn dephase(rho: &ComplexMatrix, d: &SpectralDecomposition) -> Result<ComplexMatrix> {
    d.check_dim(rho)?;
    Ok(d.levels.iter().fold(ComplexMatrix::zeros(d.dim), |acc, l| {
        &acc + &(&(&l.projector * rho) * &l.projector)
    }))
}

/// Free evolution `e^{-iHt/hbar} rho e^{iHt/hbar}`, assembled blockwise.
pub fn evolve(
    rho: &ComplexMatrix,
    d: &SpectralDecomposition,
    t: f64,
    hbar: f64,
) -> Result<ComplexMatrix> {
    let blocks = d.blocks(rho)?;
    let mut out = ComplexMatrix::zeros(d.dim);
    for (n, row) in blocks.iter().enumerate() {
        for (np, block) in row.iter().enumerate() {
            let delta = d.levels[n].energy - d.levels[np].energy;
            let phase = Complex::from_polar(1.0, -delta * t / hbar);
            out = &out + &block.scale(phase);
        }
    }
    Ok(out)
}
