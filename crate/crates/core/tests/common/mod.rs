//! Test-side helpers: random matrices and hand-rolled two-level references
//! that do not go through the library's spectral machinery.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigwork::qcore::{hermitian_eig, Complex, ComplexMatrix, HERM_TOL};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex::new(rng.gen_range(-2.0..2.0), 0.0);
        for j in i + 1..dim {
            let z = random_complex(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// `V diag(e^{i theta}) V^dagger` from a random Hermitian generator.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let eig = hermitian_eig(&random_hermitian(dim, rng), HERM_TOL).unwrap();
    let mut u = ComplexMatrix::zeros(dim);
    for (k, &theta) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvector(k);
        let phase = Complex::from_polar(1.0, 3.0 * theta);
        for i in 0..dim {
            for j in 0..dim {
                u[(i, j)] += phase * v[i] * v[j].conj();
            }
        }
    }
    u
}

/// `A A^dagger / tr`, full rank with probability one.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = random_complex(rng);
        }
    }
    let rho = a.matmul(&a.adjoint()).unwrap();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Diagonal Hamiltonian with entries drawn from a small integer ladder, so
/// degeneracies occur often.
pub fn random_ladder(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let diag: Vec<f64> = (0..dim).map(|_| rng.gen_range(0..3) as f64).collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// The two-level driving written out entry by entry.
pub fn fig_unitary_entries() -> [[Complex; 2]; 2] {
    let r = 0.5 * 2f64.sqrt();
    [
        [Complex::new(r, 0.5), Complex::new(0.0, 0.5)],
        [Complex::new(0.0, 0.5), Complex::new(r, -0.5)],
    ]
}

/// Brute-force TPM atoms `(E~_m - E_n, |U_mn|^2 rho_nn)` for the two-level
/// process with `E = (0, 1)`, `E~ = (0, 2)` and populations `(5/8, 3/8)`.
pub fn fig_tpm_atoms() -> Vec<(f64, f64)> {
    let u = fig_unitary_entries();
    let pop = [5.0 / 8.0, 3.0 / 8.0];
    let (e, et) = ([0.0, 1.0], [0.0, 2.0]);
    let mut atoms = Vec::new();
    for n in 0..2 {
        for m in 0..2 {
            atoms.push((et[m] - e[n], u[m][n].norm_sqr() * pop[n]));
        }
    }
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    atoms
}

/// `tr[H~ U rho U^dagger] - tr[H rho]` for a 2x2 state given entrywise.
pub fn fig_delta_e(rho: [[Complex; 2]; 2]) -> f64 {
    let u = fig_unitary_entries();
    let mut evolved = [[Complex::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    evolved[i][j] += u[i][k] * rho[k][l] * u[j][l].conj();
                }
            }
        }
    }
    2.0 * evolved[1][1].re - rho[1][1].re
}

/// The fig3 initial state entrywise: `[[5/8, (1 - i)/4], [(1 + i)/4, 3/8]]`.
pub fn fig3_entries() -> [[Complex; 2]; 2] {
    [
        [Complex::new(0.625, 0.0), Complex::new(0.25, -0.25)],
        [Complex::new(0.25, 0.25), Complex::new(0.375, 0.0)],
    ]
}

/// `Z~ / Z` for `H = diag(0, 1)`, `H~ = diag(0, 2)`.
pub fn thermal_partition_ratio(beta: f64) -> f64 {
    (1.0 + (-2.0 * beta).exp()) / (1.0 + (-beta).exp())
}

/// Trapezoid integral of `f` over `[a, b]` with `n` points.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|k| {
            let weight = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
            weight * f(a + h * k as f64)
        })
        .sum::<f64>()
        * h
}
