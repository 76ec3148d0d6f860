//! Dense complex linear algebra kernel.
//!
//! Everything downstream (transfer channels, gauge solving, modular data,
//! exact diagonalization) goes through the handful of routines here, so the
//! numerical conventions are fixed in one place:
//!
//! * superoperators on `k × k` matrices are stored as `k² × k²` matrices acting
//!   on **column-stacked** vectorizations, `vec(A X B) = (Bᵀ ⊗ A) vec(X)`;
//! * Hermitian eigenvectors have their first significant component made
//!   real-positive; eigenmatrices of superoperators have their largest-magnitude
//!   entry (first one in row-major order, among near-ties) made real-positive.
//!
//! All routines are pure and single-threaded, so identical inputs give
//! bit-identical outputs.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense complex matrix used for every operator in the crate.
pub type ComplexMatrix = DMatrix<C64>;

const MAX_SWEEPS: usize = 10_000;
const SCHUR_RETRIES: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: relative residual {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("matrix has a negative eigenvalue {value:.3e}")]
    NegativeEigenvalue { value: f64 },

    #[error("matrix is rank deficient: singular value ratio {ratio:.3e}")]
    RankDeficient { ratio: f64 },

    #[error("{routine} did not converge (residual {residual:.3e})")]
    ConvergenceFailure { routine: &'static str, residual: f64 },

    #[error("superoperator dimension {dim} is not a perfect square")]
    NotPerfectSquare { dim: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,
}

pub type LinalgResult<T> = Result<T, LinalgError>;

/// Tolerances used by the kernel.
pub const EPS_LIN: f64 = 1e-10;
pub const EPS_HERM: f64 = 1e-8;
pub const RANK_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn frob(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frob_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn conj(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `‖H − H†‖_F / ‖H‖_F` (zero for the zero matrix).
pub fn hermiticity_residual(h: &ComplexMatrix) -> f64 {
    let n = frob(h);
    if n == 0.0 {
        return 0.0;
    }
    frob_diff(h, &h.adjoint()) / n
}

pub fn hermitian_part(h: &ComplexMatrix) -> ComplexMatrix {
    (h + h.adjoint()).scale(0.5)
}

/// Column-stacking vectorization.
pub fn vec_cols(m: &ComplexMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_cols`] for a `k × k` matrix.
pub fn unvec_cols(v: &DVector<C64>, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(k, k, v.as_slice())
}

fn ensure_square(m: &ComplexMatrix) -> LinalgResult<usize> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// Multiply a vector by the unit phase that makes `vec[idx]` real-positive.
fn fix_phase_at(v: &mut [C64], idx: usize) {
    let z = v[idx];
    let n = z.norm();
    if n > 0.0 {
        let ph = z.conj() / n;
        for x in v.iter_mut() {
            *x *= ph;
        }
        v[idx] = C64::new(v[idx].norm(), 0.0);
    }
}

/// Index of the first component whose modulus exceeds `rel` times the largest.
fn first_significant(v: &[C64], rel: f64) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter().position(|z| z.norm() > rel * max).unwrap_or(0)
}

/// Row-major position of the largest-magnitude entry; among entries within a
/// relative `1e-9` of the maximum the first one wins.
fn largest_entry_row_major(m: &ComplexMatrix) -> (usize, usize) {
    let max = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)].norm() >= max * (1.0 - 1e-9) {
                return (i, j);
            }
        }
    }
    (0, 0)
}

/// Scale `m` to unit Frobenius norm and rotate its largest entry onto the
/// positive real axis.
pub fn normalize_eigenmatrix(m: &ComplexMatrix) -> ComplexMatrix {
    let n = frob(m);
    if n == 0.0 {
        return m.clone();
    }
    let mut out = m.unscale(n);
    let (i, j) = largest_entry_row_major(&out);
    let z = out[(i, j)];
    let ph = z.conj() / z.norm();
    out *= ph;
    out[(i, j)] = C64::new(out[(i, j)].norm(), 0.0);
    out
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V · diag(f(w)) · V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &w) in self.eigenvalues.iter().enumerate() {
            let fw = f(w);
            scaled.column_mut(j).scale_mut(fw);
        }
        &scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|w| w)
    }

    /// Same decomposition with eigenvalues in descending order.
    pub fn descending(&self) -> (Vec<f64>, ComplexMatrix) {
        let n = self.dim();
        let vals = self.eigenvalues.iter().rev().copied().collect();
        let mut vecs = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            vecs.set_column(j, &self.eigenvectors.column(n - 1 - j));
        }
        (vals, vecs)
    }
}

/// Hermitian eigendecomposition with deterministic ordering and phases.
pub fn herm_eig(h: &ComplexMatrix) -> LinalgResult<HermitianEig> {
    herm_eig_tol(h, EPS_HERM)
}

pub fn herm_eig_tol(h: &ComplexMatrix, eps_herm: f64) -> LinalgResult<HermitianEig> {
    let n = ensure_square(h)?;
    if !is_finite(h) {
        return Err(LinalgError::NonFinite);
    }
    let residual = hermiticity_residual(h);
    if residual > eps_herm {
        return Err(LinalgError::NotHermitian { residual });
    }
    let sym = hermitian_part(h);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS * n.max(1))
        .ok_or(LinalgError::ConvergenceFailure { routine: "herm_eig", residual: f64::NAN })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let mut vecs = ComplexMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (j, &src) in order.iter().enumerate() {
        let mut col: Vec<C64> = eig.eigenvectors.column(src).iter().copied().collect();
        let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in col.iter_mut() {
            *z /= nrm;
        }
        let idx = first_significant(&col, 1e-8);
        fix_phase_at(&mut col, idx);
        vecs.set_column(j, &DVector::from_vec(col));
        vals.push(eig.eigenvalues[src]);
    }
    Ok(HermitianEig { eigenvalues: vals, eigenvectors: vecs })
}

/// Linear map on `k × k` matrices in column-stacking representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    k: usize,
    matrix: ComplexMatrix,
}

impl SuperOperator {
    pub fn from_matrix(matrix: ComplexMatrix) -> LinalgResult<Self> {
        let n = ensure_square(&matrix)?;
        let k = (n as f64).sqrt().round() as usize;
        if k * k != n {
            return Err(LinalgError::NotPerfectSquare { dim: n });
        }
        Ok(Self { k, matrix })
    }

    /// `x ↦ Σ_i left_i · x · right_i†`.
    pub fn sandwich(left: &[ComplexMatrix], right: &[ComplexMatrix]) -> Self {
        assert_eq!(left.len(), right.len());
        assert!(!left.is_empty());
        let k = left[0].nrows();
        let mut matrix = ComplexMatrix::zeros(k * k, k * k);
        for (a, b) in left.iter().zip(right) {
            matrix += kron(&conj(b), a);
        }
        Self { k, matrix }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        unvec_cols(&(&self.matrix * vec_cols(x)), self.k)
    }

    /// Adjoint with respect to the Hilbert–Schmidt inner product.
    pub fn adjoint(&self) -> Self {
        Self { k: self.k, matrix: self.matrix.adjoint() }
    }
}

/// Complex eigenvalues of a general square matrix via complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> LinalgResult<Vec<C64>> {
    let n = ensure_square(m)?;
    if !is_finite(m) {
        return Err(LinalgError::NonFinite);
    }
    if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS * n.max(1)) {
        return Ok(schur.unpack().1.diagonal().iter().copied().collect());
    }
    // The QR iteration has no exceptional shifts and can cycle on highly
    // degenerate spectra; a unitary similarity breaks the cycle.
    let mut r = crate::random::rng(0x5c4u64);
    for _ in 0..SCHUR_RETRIES {
        let q = crate::random::random_unitary(&mut r, n);
        let rotated = q.adjoint() * m * &q;
        if let Some(schur) = Schur::try_new(rotated, f64::EPSILON, MAX_SWEEPS * n.max(1)) {
            return Ok(schur.unpack().1.diagonal().iter().copied().collect());
        }
    }
    Err(LinalgError::ConvergenceFailure { routine: "schur", residual: f64::NAN })
}

/// Sort by modulus descending (moduli within `1e-12` count as equal), then by
/// argument ascending.
pub fn sort_spectrum(vals: &mut [C64]) {
    vals.sort_by(|a, b| {
        let (ma, mb) = (a.norm(), b.norm());
        if (ma - mb).abs() > 1e-12 * ma.max(mb).max(1.0) {
            mb.total_cmp(&ma)
        } else {
            arg(*a).total_cmp(&arg(*b))
        }
    });
}

fn arg(z: C64) -> f64 {
    if z.norm() < 1e-14 {
        0.0
    } else {
        z.arg()
    }
}

/// Orthonormal basis (columns) of the numerical null space of `a`, at most
/// `max_dim` vectors, always at least one.
fn null_space(a: &ComplexMatrix, max_dim: usize) -> LinalgResult<Vec<DVector<C64>>> {
    let n = a.ncols();
    let svd = SVD::try_new(a.clone(), false, true, f64::EPSILON, MAX_SWEEPS * n.max(1))
        .ok_or(LinalgError::ConvergenceFailure { routine: "svd", residual: f64::NAN })?;
    let v_t = svd.v_t.expect("requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]).then(x.cmp(&y)));
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max).max(1.0);
    let mut out = Vec::new();
    for (rank, &i) in idx.iter().enumerate() {
        if rank >= max_dim || (rank > 0 && svd.singular_values[i] > 1e-8 * smax) {
            break;
        }
        out.push(v_t.row(i).adjoint());
    }
    Ok(out)
}

/// One eigenpair of a superoperator.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub eigenvalue: C64,
    /// Unit Frobenius norm, largest entry real-positive.
    pub eigenmatrix: ComplexMatrix,
}

/// Peripheral part of a superoperator spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PeripheralSpectrum {
    pub spectral_radius: f64,
    /// Full spectrum, sorted by [`sort_spectrum`].
    pub spectrum: Vec<C64>,
    /// Number of eigenvalues (with algebraic multiplicity) on the periphery.
    pub algebraic_count: usize,
    /// One pair per independent eigenmatrix.
    pub pairs: Vec<Eigenpair>,
}

/// All eigenpairs with `|λ| ≥ r − tol`, `r` the spectral radius.
///
/// Eigenvalues come from the full dense spectrum; eigenmatrices span the
/// numerical null space of `L − λ` for each peripheral cluster.
pub fn peripheral_eigs(op: &SuperOperator, tol: f64) -> LinalgResult<PeripheralSpectrum> {
    assert!(tol > 0.0 && tol < 0.5, "peripheral tolerance must lie in (0, 0.5)");
    let mut spectrum = eigenvalues(op.matrix())?;
    sort_spectrum(&mut spectrum);
    let radius = spectrum.first().map(|z| z.norm()).unwrap_or(0.0);
    let peripheral: Vec<C64> = spectrum.iter().copied().filter(|z| z.norm() >= radius - tol).collect();

    // cluster eigenvalues that coincide numerically
    let cluster_tol = 1e-7 * radius.max(1.0);
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for z in &peripheral {
        match clusters.iter_mut().find(|c| (c[0] - z).norm() <= cluster_tol) {
            Some(c) => c.push(*z),
            None => clusters.push(vec![*z]),
        }
    }

    let n = op.matrix().nrows();
    let scale = frob(op.matrix()).max(1.0);
    let mut pairs = Vec::new();
    for cluster in clusters {
        let mean = cluster.iter().sum::<C64>() / cluster.len() as f64;
        let shifted = op.matrix() - ComplexMatrix::identity(n, n) * mean;
        for vec in null_space(&shifted, cluster.len())? {
            let x = unvec_cols(&vec, op.k());
            // Rayleigh quotient refines the eigenvalue for simple clusters
            let lx = op.apply(&x);
            let num: C64 = x.iter().zip(lx.iter()).map(|(a, b)| a.conj() * b).sum();
            let den: f64 = x.iter().map(|a| a.norm_sqr()).sum();
            let lambda = if cluster.len() == 1 { num / den } else { mean };
            let eigenmatrix = normalize_eigenmatrix(&x);
            let residual = frob_diff(&op.apply(&eigenmatrix), &eigenmatrix.map(|z| z * lambda));
            if residual > 1e-8 * scale {
                return Err(LinalgError::ConvergenceFailure { routine: "peripheral_eigs", residual });
            }
            pairs.push(Eigenpair { eigenvalue: lambda, eigenmatrix });
        }
    }
    Ok(PeripheralSpectrum { spectral_radius: radius, algebraic_count: peripheral.len(), spectrum, pairs })
}

/// Fractional power of a Hermitian PSD matrix on its support.
///
/// Eigenvalues at or below `rank_tol · λ_max` are treated as zero, so negative
/// `p` gives a pseudo-power and `p = 0` the support projection.
pub fn psd_power(rho: &ComplexMatrix, p: f64, rank_tol: f64) -> LinalgResult<ComplexMatrix> {
    let eig = herm_eig(rho)?;
    psd_power_from_eig(&eig, p, rank_tol)
}

pub fn psd_power_from_eig(eig: &HermitianEig, p: f64, rank_tol: f64) -> LinalgResult<ComplexMatrix> {
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cut = rank_tol * max;
    if let Some(&neg) = eig.eigenvalues.iter().find(|&&w| w < -cut) {
        return Err(LinalgError::NegativeEigenvalue { value: neg });
    }
    Ok(eig.map_eigenvalues(|w| if w > cut && max > 0.0 { w.powf(p) } else { 0.0 }))
}

/// Unitary polar factor together with how far `X` is from a multiple of it.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFactor {
    pub unitary: ComplexMatrix,
    /// `‖X − c·U‖_F / ‖X‖_F` with `c` the mean singular value.
    pub deviation: f64,
    pub singular_values: Vec<f64>,
}

/// `U = X (X†X)^{-1/2}`.
pub fn polar_unitary(x: &ComplexMatrix, tol: f64) -> LinalgResult<PolarFactor> {
    let n = ensure_square(x)?;
    let gram = x.adjoint() * x;
    let eig = herm_eig(&gram)?;
    let sv: Vec<f64> = eig.eigenvalues.iter().map(|w| w.max(0.0).sqrt()).collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin < tol * smax {
        let ratio = if smax == 0.0 { 0.0 } else { smin / smax };
        return Err(LinalgError::RankDeficient { ratio });
    }
    let inv_sqrt = eig.map_eigenvalues(|w| 1.0 / w.sqrt());
    let unitary = x * inv_sqrt;
    let mean = sv.iter().sum::<f64>() / n as f64;
    let deviation = frob_diff(x, &unitary.scale(mean)) / frob(x);
    let mut singular_values = sv;
    singular_values.reverse();
    Ok(PolarFactor { unitary, deviation, singular_values })
}

/// Serde adapter storing a complex matrix as rows of `[re, im]` pairs.
pub mod serde_matrix {
    use super::ComplexMatrix;
    use num_complex::Complex64 as C64;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix, String> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err("matrix has no rows".into());
        }
        let ncols = rows[0].len();
        if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return Err("ragged or empty matrix rows".into());
        }
        if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err("non-finite matrix entry".into());
        }
        Ok(ComplexMatrix::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Serde adapter for lists of matrices.
pub mod serde_matrix_list {
    use super::{serde_matrix, ComplexMatrix};
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ms: &[ComplexMatrix], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(serde_matrix::to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ComplexMatrix>, D::Error> {
        let raw = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        raw.iter().map(|r| serde_matrix::from_rows(r).map_err(D::Error::custom)).collect()
    }
}

/// Serde adapter for complex scalars as `[re, im]`.
pub mod serde_complex {
    use num_complex::Complex64 as C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// Serde adapter for complex lists as `[[re, im], ...]`.
pub mod serde_complex_list {
    use num_complex::Complex64 as C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(zs: &[C64], s: S) -> Result<S::Ok, S::Error> {
        zs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// A complex number serialized as `[re, im]`, for use inside report structs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex(#[serde(with = "serde_complex")] pub C64);
