//! Translation-invariant matrix product states generated by a `d`-tuple of
//! `k × k` matrices.
//!
//! A tuple `v = (v_1, …, v_d)` is *normalized* when `Σ_μ v_μ v_μ† = 1`, and
//! *primitive* when products of some fixed length span all of `M_k`. A
//! normalized primitive tuple has a unique faithful density matrix `ρ` fixed by
//! `x ↦ Σ_μ v_μ† x v_μ`, and generates the state
//!
//! ```text
//! ω(|μ_0…μ_{l−1}⟩⟨ν_0…ν_{l−1}|) = Tr(ρ v_{μ_0}⋯v_{μ_{l−1}} v_{ν_{l−1}}†⋯v_{ν_0}†).
//! ```
//!
//! Multi-site indices are ordered with site 0 most significant.

use crate::config::Config;
use crate::linalg::{
    self, frob, frob_diff, herm_eig, identity, peripheral_eigs, psd_power, ComplexMatrix, LinalgError,
    SuperOperator,
};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MpsError {
    #[error("tuple must contain at least two matrices, got {0}")]
    TooFewMatrices(usize),

    #[error("matrix {index} has shape {rows}x{cols}, expected {k}x{k}")]
    ShapeMismatch { index: usize, rows: usize, cols: usize, k: usize },

    #[error("tuple contains non-finite entries")]
    NonFinite,

    #[error("tuple is not normalized: ‖Σ v v† − 1‖_F = {residual:.3e}")]
    NotNormalized { residual: f64 },

    #[error("dominant transfer eigenmatrix is not positive definite (reducible tuple)")]
    NotNormalizable,

    #[error("tuple is not primitive (peripheral count {peripheral_count})")]
    NotPrimitive { peripheral_count: usize },

    #[error("invariant state is not faithful: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotFaithful { min_eigenvalue: f64 },

    #[error("window of {sites} sites has dimension {dim} above the cap {cap}")]
    WindowTooLarge { sites: usize, dim: usize, cap: usize },

    #[error("span and spectral primitivity certificates disagree: {0}")]
    CertificateDisagreement(String),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type MpsResult<T> = Result<T, MpsError>;

fn check_shapes(mats: &[ComplexMatrix]) -> MpsResult<usize> {
    if mats.len() < 2 {
        return Err(MpsError::TooFewMatrices(mats.len()));
    }
    let k = mats[0].nrows();
    for (index, m) in mats.iter().enumerate() {
        if m.nrows() != k || m.ncols() != k || k == 0 {
            return Err(MpsError::ShapeMismatch { index, rows: m.nrows(), cols: m.ncols(), k });
        }
        if !linalg::is_finite(m) {
            return Err(MpsError::NonFinite);
        }
    }
    Ok(k)
}

/// Shape-checked but not necessarily normalized tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTuple {
    #[serde(with = "linalg::serde_matrix_list")]
    mats: Vec<ComplexMatrix>,
}

impl RawTuple {
    pub fn new(mats: Vec<ComplexMatrix>) -> MpsResult<Self> {
        check_shapes(&mats)?;
        Ok(Self { mats })
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn k(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { mats: self.mats.iter().map(|m| m * s).collect() }
    }

    /// `E(x) = Σ v x v†`.
    pub fn transfer(&self) -> SuperOperator {
        SuperOperator::sandwich(&self.mats, &self.mats)
    }
}

/// `‖Σ_μ v_μ v_μ† − 1‖_F`.
pub fn normalization_residual(mats: &[ComplexMatrix]) -> f64 {
    let k = mats[0].nrows();
    let sum = mats.iter().fold(ComplexMatrix::zeros(k, k), |acc, v| acc + v * v.adjoint());
    frob_diff(&sum, &identity(k))
}

/// A normalized tuple, the generator of a matrix product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpsTuple {
    #[serde(with = "linalg::serde_matrix_list")]
    mats: Vec<ComplexMatrix>,
}

impl MpsTuple {
    /// Accept an already normalized tuple.
    pub fn new(mats: Vec<ComplexMatrix>, eps_norm: f64) -> MpsResult<Self> {
        check_shapes(&mats)?;
        let residual = normalization_residual(&mats);
        if residual > eps_norm {
            return Err(MpsError::NotNormalized { residual });
        }
        Ok(Self { mats })
    }

    pub(crate) fn new_unchecked(mats: Vec<ComplexMatrix>) -> Self {
        Self { mats }
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn k(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    pub fn normalization_residual(&self) -> f64 {
        normalization_residual(&self.mats)
    }

    /// `E(x) = Σ v x v†`.
    pub fn transfer(&self) -> SuperOperator {
        SuperOperator::sandwich(&self.mats, &self.mats)
    }

    /// `E†(x) = Σ v† x v`, whose fixed point is the invariant state.
    pub fn adjoint_transfer(&self) -> SuperOperator {
        self.transfer().adjoint()
    }

    /// `v_μ ↦ e^{iφ} W v_μ W†`; generates the same state for unitary `W`.
    pub fn gauge_transform(&self, w: &ComplexMatrix, phase: C64) -> Self {
        let wd = w.adjoint();
        Self { mats: self.mats.iter().map(|v| (w * v * &wd) * phase).collect() }
    }
}

/// Rescale and gauge a raw tuple into a normalized one.
///
/// With `(r, e)` the dominant eigenpair of `E(x) = Σ v x v†` and `e ≻ 0`,
/// returns `w_μ = r^{-1/2} e^{-1/2} v_μ e^{1/2}`. When the dominant eigenvalue
/// is degenerate the eigenmatrix used is the projection of `1` onto its
/// eigenspace.
pub fn normalize(raw: &RawTuple, cfg: &Config) -> MpsResult<MpsTuple> {
    let k = raw.k();
    let spectrum = peripheral_eigs(&raw.transfer(), cfg.peripheral_tol)?;
    let r = spectrum.spectral_radius;
    if r <= 0.0 {
        return Err(MpsError::NotNormalizable);
    }
    // eigenmatrices for eigenvalue r itself (E is positive, so r is an eigenvalue)
    let basis: Vec<&ComplexMatrix> = spectrum
        .pairs
        .iter()
        .filter(|p| (p.eigenvalue - C64::new(r, 0.0)).norm() <= 1e-7 * r.max(1.0))
        .map(|p| &p.eigenmatrix)
        .collect();
    if basis.is_empty() {
        return Err(MpsError::NotNormalizable);
    }
    let e = project_identity(&basis, k);
    let e = linalg::hermitian_part(&e);
    let eig = herm_eig(&e)?;
    let max = eig.eigenvalues[k - 1];
    if !max.is_finite() || max <= 0.0 || eig.eigenvalues[0] <= cfg.rank_tol * max {
        return Err(MpsError::NotNormalizable);
    }
    let sqrt_e = eig.map_eigenvalues(f64::sqrt);
    let inv_sqrt_e = eig.map_eigenvalues(|w| 1.0 / w.sqrt());
    let s = 1.0 / r.sqrt();
    let mats = raw.mats().iter().map(|v| (&inv_sqrt_e * v * &sqrt_e).scale(s)).collect();
    MpsTuple::new(mats, cfg.eps_norm)
}

/// Orthogonal projection of the identity onto `span(basis)`.
fn project_identity(basis: &[&ComplexMatrix], k: usize) -> ComplexMatrix {
    let n = basis.len();
    let ip = |a: &ComplexMatrix, b: &ComplexMatrix| -> C64 {
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
    };
    let id = identity(k);
    let gram = ComplexMatrix::from_fn(n, n, |i, j| ip(basis[i], basis[j]));
    let rhs = nalgebra::DVector::from_fn(n, |i, _| ip(basis[i], &id));
    let coef = gram.lu().solve(&rhs).unwrap_or_else(|| nalgebra::DVector::zeros(n));
    basis.iter().zip(coef.iter()).fold(ComplexMatrix::zeros(k, k), |acc, (b, c)| acc + *b * *c)
}

/// Span and spectral evidence for primitivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitivityCertificate {
    pub is_primitive: bool,
    /// Smallest `l` with `dim K_l = k²`, if reached within `l_max`.
    pub injectivity_length: Option<usize>,
    /// `dim K_l` for `l = 1, 2, …` as explored.
    pub span_dims: Vec<usize>,
    pub l_max: usize,
    /// Eigenvalues (with multiplicity) on the periphery of the transfer map.
    pub peripheral_count: usize,
    /// `1 −` second-largest modulus of the transfer spectrum.
    pub spectral_gap: f64,
}

/// Certify primitivity by growing `K_l = span{v_{μ_0}⋯v_{μ_{l−1}}}` and
/// comparing with the peripheral spectrum of the transfer map.
pub fn primitivity(v: &MpsTuple, cfg: &Config) -> MpsResult<PrimitivityCertificate> {
    let k = v.k();
    let l_max = cfg.l_max.unwrap_or(k.pow(4)).max(1);
    let full = k * k;

    // orthonormal basis of K_l as flattened k×k matrices; K_{l+1} = K_l · {v_μ}
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    let mut span_dims = Vec::new();
    let mut injectivity_length = None;
    let mut current: Vec<ComplexMatrix> = vec![identity(k)];
    for l in 1..=l_max {
        basis.clear();
        for x in &current {
            for vm in v.mats() {
                let cand = x * vm;
                add_orthonormal(&mut basis, cand);
                if basis.len() == full {
                    break;
                }
            }
            if basis.len() == full {
                break;
            }
        }
        span_dims.push(basis.len());
        if basis.len() == full {
            injectivity_length = Some(l);
            break;
        }
        if basis.is_empty() {
            break;
        }
        current = basis.clone();
    }

    let spec = peripheral_eigs(&v.transfer(), cfg.peripheral_tol)?;
    let unit_simple =
        spec.algebraic_count == 1 && (spec.pairs[0].eigenvalue - C64::new(1.0, 0.0)).norm() <= 1e-7;
    let second = spec.spectrum.get(1).map(|z| z.norm()).unwrap_or(0.0);
    let spectral_gap = 1.0 - second;

    if injectivity_length.is_some() && !unit_simple {
        return Err(MpsError::CertificateDisagreement(format!(
            "products span M_{k} but the transfer map has {} peripheral eigenvalues",
            spec.algebraic_count
        )));
    }
    Ok(PrimitivityCertificate {
        is_primitive: injectivity_length.is_some() && unit_simple,
        injectivity_length,
        span_dims,
        l_max,
        peripheral_count: spec.algebraic_count,
        spectral_gap,
    })
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
fn add_orthonormal(basis: &mut Vec<ComplexMatrix>, mut cand: ComplexMatrix) {
    let norm0 = frob(&cand);
    if norm0 < 1e-14 {
        return;
    }
    for _ in 0..2 {
        for b in basis.iter() {
            let ip: C64 = b.iter().zip(cand.iter()).map(|(x, y)| x.conj() * y).sum();
            cand -= b * ip;
        }
    }
    let n = frob(&cand);
    if n > 1e-10 * norm0 {
        basis.push(cand.unscale(n));
    }
}

/// The density matrix `ρ` of the unique state invariant under the transfer map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantState {
    #[serde(with = "linalg::serde_matrix")]
    pub rho: ComplexMatrix,
    /// `‖Σ v† ρ v − ρ‖_F`.
    pub residual: f64,
    pub min_eigenvalue: f64,
}

pub fn invariant_state(v: &MpsTuple, cfg: &Config) -> MpsResult<InvariantState> {
    let spec = peripheral_eigs(&v.adjoint_transfer(), cfg.peripheral_tol)?;
    if spec.algebraic_count != 1 || spec.pairs.len() != 1 {
        return Err(MpsError::NotPrimitive { peripheral_count: spec.algebraic_count });
    }
    let x = &spec.pairs[0].eigenmatrix;
    let tr = linalg::trace(x);
    let rho = linalg::hermitian_part(&x.map(|z| z / tr));
    let adj = v.adjoint_transfer();
    let residual = frob_diff(&adj.apply(&rho), &rho);
    let eig = herm_eig(&rho)?;
    let min_eigenvalue = eig.eigenvalues[0];
    if min_eigenvalue <= cfg.rank_tol {
        return Err(MpsError::NotFaithful { min_eigenvalue });
    }
    Ok(InvariantState { rho, residual, min_eigenvalue })
}

/// Reduced density matrix of `l` consecutive sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    pub length: usize,
    #[serde(with = "linalg::serde_matrix")]
    pub matrix: ComplexMatrix,
    pub rank: usize,
}

fn window_dim(d: usize, l: usize, cap: usize) -> MpsResult<usize> {
    let mut dim: usize = 1;
    for _ in 0..l {
        dim = dim.saturating_mul(d);
        if dim > cap {
            return Err(MpsError::WindowTooLarge { sites: l, dim, cap });
        }
    }
    Ok(dim)
}

/// `l`-site marginal `[μ⃗, ν⃗] = Tr(ρ v_{μ⃗} v_{ν⃗}†)`.
///
/// Built as the Gram matrix of the strings `ρ^{1/2} v_{μ_0}⋯v_{μ_{l−1}}`,
/// each obtained from its prefix by one right multiplication.
pub fn marginal(v: &MpsTuple, rho: &InvariantState, l: usize, cfg: &Config) -> MpsResult<Marginal> {
    let matrix = marginal_matrix(v, rho, l, cfg)?;
    let eig = herm_eig(&matrix)?;
    let max = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let rank = eig.eigenvalues.iter().filter(|&&w| w > cfg.rank_tol * max).count();
    Ok(Marginal { length: l, matrix, rank })
}

/// The matrix of [`marginal`] without the rank computation.
pub fn marginal_matrix(
    v: &MpsTuple,
    rho: &InvariantState,
    l: usize,
    cfg: &Config,
) -> MpsResult<ComplexMatrix> {
    assert!(l >= 1, "marginal window must contain at least one site");
    let dim = window_dim(v.d(), l, cfg.window_cap)?;
    let k = v.k();
    let root = psd_power(&rho.rho, 0.5, cfg.rank_tol)?;

    let mut strings = vec![root];
    for _ in 0..l {
        let mut next = Vec::with_capacity(strings.len() * v.d());
        for s in &strings {
            for vm in v.mats() {
                next.push(s * vm);
            }
        }
        strings = next;
    }
    debug_assert_eq!(strings.len(), dim);

    // F has one row per window configuration: row μ⃗ = vec(ρ^{1/2} v_{μ⃗})
    let f = ComplexMatrix::from_fn(dim, k * k, |i, j| strings[i].as_slice()[j]);
    // Tr(ρ A B†) = ⟨ρ^{1/2} B, ρ^{1/2} A⟩ = (F F†)[A, B]
    Ok(linalg::hermitian_part(&(&f * f.adjoint())))
}

/// Group `b` sites into one: `w_{(μ_1…μ_b)} = v_{μ_1}⋯v_{μ_b}`.
pub fn block(v: &MpsTuple, b: usize, cap: usize) -> MpsResult<MpsTuple> {
    assert!(b >= 1, "block size must be positive");
    window_dim(v.d(), b, cap)?;
    let mut mats = v.mats().to_vec();
    for _ in 1..b {
        let mut next = Vec::with_capacity(mats.len() * v.d());
        for m in &mats {
            for vm in v.mats() {
                next.push(m * vm);
            }
        }
        mats = next;
    }
    Ok(MpsTuple::new_unchecked(mats))
}

/// Full spectrum of `x ↦ Σ v x v†`, modulus descending then phase ascending.
pub fn transfer_spectrum(v: &MpsTuple) -> MpsResult<Vec<C64>> {
    let mut vals = linalg::eigenvalues(v.transfer().matrix())?;
    linalg::sort_spectrum(&mut vals);
    Ok(vals)
}

/// Reverse the site order of an `l`-site operator on `(ℂ^d)^{⊗l}`.
pub fn reverse_sites(m: &ComplexMatrix, d: usize, l: usize) -> ComplexMatrix {
    let dim = m.nrows();
    let perm: Vec<usize> = (0..dim).map(|i| reverse_digits(i, d, l)).collect();
    ComplexMatrix::from_fn(dim, dim, |i, j| m[(perm[i], perm[j])])
}

/// Index of the window configuration with its site order reversed.
pub fn reverse_digits(mut i: usize, d: usize, l: usize) -> usize {
    let mut out = 0;
    for _ in 0..l {
        out = out * d + i % d;
        i /= d;
    }
    out
}
