//! Seeded random matrices for test panels.

use crate::linalg::{herm_eig, ComplexMatrix};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type PanelRng = ChaCha8Rng;

pub fn rng(seed: u64) -> PanelRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n, n);
    (&a + a.adjoint()).scale(0.5)
}

/// Random positive-definite matrix of unit trace.
pub fn random_psd(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n, n);
    let p = &a * a.adjoint() + ComplexMatrix::identity(n, n).scale(1e-3);
    let tr: f64 = p.diagonal().iter().map(|z| z.re).sum();
    p.unscale(tr)
}

/// `exp(i·π·H)` for a random Hermitian `H`.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, n);
    let eig = herm_eig(&h).expect("random Hermitian matrix diagonalizes");
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &w) in eig.eigenvalues.iter().enumerate() {
        let ph = C64::from_polar(1.0, std::f64::consts::PI * w);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= ph;
        }
    }
    &scaled * v.adjoint()
}

pub fn random_phase(rng: &mut impl Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}
