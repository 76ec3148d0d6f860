//! Numerical tolerances and caps shared by every stage of the pipeline.

use serde::{Deserialize, Serialize};

/// Effective configuration; embedded verbatim in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Round-trip tolerance for the dense kernel.
    pub eps_lin: f64,
    /// Relative Hermiticity tolerance accepted by the Hermitian solver.
    pub eps_herm: f64,
    /// Relative eigenvalue cutoff defining supports and ranks.
    pub rank_tol: f64,
    /// `‖Σ v v† − 1‖_F` accepted for a normalized tuple.
    pub eps_norm: f64,
    /// Distance from the spectral radius that still counts as peripheral.
    pub peripheral_tol: f64,
    /// Longest product length tried by the span search; `None` means `k⁴`.
    pub l_max: Option<usize>,
    /// Largest window dimension `d^l` for marginals and blocking.
    pub window_cap: usize,
    /// Mixed transfer radius must reach `1 − gauge_tol`; also bounds the
    /// unitary-multiple deviation of the gauge eigenmatrix.
    pub gauge_tol: f64,
    /// Accepted residual of `U v_μ − e^{it} w_μ U`.
    pub eps_gauge: f64,
    /// Symmetry, phase and commutation residual bound for the index.
    pub eps_index: f64,
    /// Accepted reversal mismatch of marginals.
    pub marginal_tol: f64,
    /// Symmetric/antisymmetric tolerance of bond vectors.
    pub swap_tol: f64,
    /// Residual bound for the modular identities.
    pub modular_tol: f64,
    /// Random operators per modular-identity panel.
    pub panel_size: usize,
    /// Seed for every randomized panel.
    pub seed: u64,
    /// Largest dense Hamiltonian dimension.
    pub ed_cap: usize,
    /// Kernel cutoff relative to `λ_max + 1`.
    pub kernel_tol_rel: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            eps_lin: 1e-10,
            eps_herm: 1e-8,
            rank_tol: 1e-12,
            eps_norm: 1e-9,
            peripheral_tol: 1e-8,
            l_max: None,
            window_cap: 4096,
            gauge_tol: 1e-6,
            eps_gauge: 1e-7,
            eps_index: 1e-7,
            marginal_tol: 1e-8,
            swap_tol: 1e-8,
            modular_tol: 1e-8,
            panel_size: 8,
            seed: 0,
            ed_cap: 4096,
            kernel_tol_rel: 1e-8,
        }
    }
}
