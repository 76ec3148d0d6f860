//! Parent Hamiltonians and dense exact diagonalization.
//!
//! The `m`-site interaction is `h = 1 − P`, with `P` the support projection
//! of the `m`-site marginal. Every translate annihilates the state, so the
//! chain Hamiltonian built from `h` is frustration free.

use crate::config::Config;
use crate::linalg::{frob_diff, herm_eig, identity, ComplexMatrix, LinalgError};
use crate::mps::{invariant_state, marginal, primitivity, MpsError, MpsTuple};
use crate::reflection::SiteMap;
use crate::status::{HasStatus, Status};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("chain of {n} sites is shorter than the interaction range {m}")]
    ChainTooShort { n: usize, m: usize },

    #[error("interaction range must be at least 1")]
    ZeroRange,

    #[error(transparent)]
    Mps(#[from] MpsError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl HasStatus for HamiltonianError {
    fn status(&self) -> Status {
        match self {
            HamiltonianError::DimensionCap { .. } => Status::DimensionCap,
            HamiltonianError::ChainTooShort { .. } | HamiltonianError::ZeroRange => Status::InputError,
            HamiltonianError::Mps(e) => e.status(),
            HamiltonianError::Linalg(e) => e.status(),
        }
    }
}

pub type HamiltonianResult<T> = Result<T, HamiltonianError>;

/// The range is below `injectivity_length + 1`; the projector is still well
/// defined but its ground space may be larger than the MPS family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeWarning {
    pub m: usize,
    pub recommended: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParentInteraction {
    pub m: usize,
    pub d: usize,
    #[serde(with = "crate::linalg::serde_matrix")]
    pub h: ComplexMatrix,
    pub rank: usize,
    pub support_rank: usize,
    /// `‖h² − h‖_F`.
    pub projector_residual: f64,
    /// `‖h ω_m‖_F` with `ω_m` the marginal.
    pub annihilation_residual: f64,
    pub warning: Option<RangeWarning>,
}

/// `h = 1 − supp(ω_m)` for a primitive normalized tuple.
pub fn parent_interaction(v: &MpsTuple, m: usize, cfg: &Config) -> HamiltonianResult<ParentInteraction> {
    if m == 0 {
        return Err(HamiltonianError::ZeroRange);
    }
    let cert = primitivity(v, cfg)?;
    if !cert.is_primitive {
        return Err(MpsError::NotPrimitive { peripheral_count: cert.peripheral_count }.into());
    }
    let rho = invariant_state(v, cfg)?;
    let marg = marginal(v, &rho, m, cfg)?;
    let eig = herm_eig(&marg.matrix)?;
    let max = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let dim = marg.matrix.nrows();
    let mut p = ComplexMatrix::zeros(dim, dim);
    let mut support_rank = 0;
    for (j, &w) in eig.eigenvalues.iter().enumerate() {
        if w > cfg.rank_tol * max {
            let col = eig.eigenvectors.column(j);
            p += col * col.adjoint();
            support_rank += 1;
        }
    }
    let h = identity(dim) - p;
    let projector_residual = frob_diff(&(&h * &h), &h);
    let annihilation_residual = crate::linalg::frob(&(&h * &marg.matrix));
    let recommended = cert.injectivity_length.unwrap_or(1) + 1;
    Ok(ParentInteraction {
        m,
        d: v.d(),
        h,
        rank: dim - support_rank,
        support_rank,
        projector_residual,
        annihilation_residual,
        warning: (m < recommended).then_some(RangeWarning { m, recommended }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            _ => Err(format!("unknown boundary `{s}` (expected open or periodic)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n: usize,
    pub boundary: Boundary,
}

fn checked_pow(d: usize, n: usize, cap: usize) -> HamiltonianResult<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(d);
        if dim > cap {
            return Err(HamiltonianError::DimensionCap { dim, cap });
        }
    }
    Ok(dim)
}

/// `Σ_i h_{[i, i+m−1]}` over `i = 0..n−m` (open) or all `i` mod `n` (periodic).
pub fn chain_hamiltonian(
    hint: &ParentInteraction,
    spec: ChainSpec,
    cap: usize,
) -> HamiltonianResult<ComplexMatrix> {
    let (d, m, n) = (hint.d, hint.m, spec.n);
    if n < m {
        return Err(HamiltonianError::ChainTooShort { n, m });
    }
    let dim = checked_pow(d, n, cap)?;
    let local = hint.h.nrows();
    let starts: Vec<usize> = match spec.boundary {
        Boundary::Open => (0..=n - m).collect(),
        Boundary::Periodic => (0..n).collect(),
    };
    // place value of site s, with site 0 most significant
    let place: Vec<usize> = (0..n).map(|s| d.pow((n - 1 - s) as u32)).collect();
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; n];
    for col in 0..dim {
        for (s, digit) in digits.iter_mut().enumerate() {
            *digit = (col / place[s]) % d;
        }
        for &i in &starts {
            let sites: Vec<usize> = (0..m).map(|j| (i + j) % n).collect();
            let loc_in = sites.iter().fold(0, |acc, &s| acc * d + digits[s]);
            let base = col - sites.iter().map(|&s| digits[s] * place[s]).sum::<usize>();
            for loc_out in 0..local {
                let amp: C64 = hint.h[(loc_out, loc_in)];
                if amp == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut row = base;
                let mut rest = loc_out;
                for &s in sites.iter().rev() {
                    row += (rest % d) * place[s];
                    rest /= d;
                }
                out[(row, col)] += amp;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdReport {
    pub dim: usize,
    pub ground_energy: f64,
    pub kernel_tol: f64,
    pub kernel_dim: usize,
    /// Smallest eigenvalue at or above the kernel tolerance.
    pub gap: Option<f64>,
    pub spectrum_head: Vec<f64>,
    pub frustration_free: bool,
}

/// Full dense spectrum with kernel tolerance `kernel_tol_rel · (λ_max + 1)`.
pub fn ed_report(h: &ComplexMatrix, kernel_tol_rel: f64, cap: usize) -> HamiltonianResult<EdReport> {
    let dim = h.nrows();
    if dim > cap {
        return Err(HamiltonianError::DimensionCap { dim, cap });
    }
    let eig = herm_eig(h)?;
    let w = &eig.eigenvalues;
    let max = w.last().copied().unwrap_or(0.0);
    let kernel_tol = kernel_tol_rel * (max.abs() + 1.0);
    let kernel_dim = w.iter().filter(|&&x| x < kernel_tol).count();
    let gap = w.iter().copied().find(|&x| x >= kernel_tol);
    let ground_energy = w[0];
    Ok(EdReport {
        dim,
        ground_energy,
        kernel_tol,
        kernel_dim,
        gap,
        spectrum_head: w.iter().take(10).copied().collect(),
        frustration_free: ground_energy.abs() <= 1e-9 && kernel_dim >= 1,
    })
}

/// `‖reverse_m(h) − h‖_F`.
pub fn reflection_check(hint: &ParentInteraction) -> f64 {
    reflection_check_with(hint, &SiteMap::identity(hint.d))
}

/// [`reflection_check`] for a reflection that also applies `site_map` on each site.
pub fn reflection_check_with(hint: &ParentInteraction, site_map: &SiteMap) -> f64 {
    frob_diff(&site_map.reflect_window(&hint.h, hint.m), &hint.h)
}
