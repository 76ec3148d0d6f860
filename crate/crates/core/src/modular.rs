//! Modular data of a bipartite vector and its swap sign.
//!
//! A vector `Ω = Σ M_{jl} e_j ⊗ e_l` on `ℂ^m ⊗ ℂ^m` is stored through its
//! coefficient matrix; `(A ⊗ B) Ω` corresponds to `A M Bᵀ`. With the Schmidt
//! form `Ω = Σ_k √λ_k ξ_k ⊗ ζ_k` the Tomita operator of `Ω` for the algebra
//! `1 ⊗ B(ℂ^m)` is `S (s ⊗ x) Ω = (s ⊗ x†) Ω`, and everything below is
//! expressed through `Ξ = [ξ_k]`, `Z = [ζ_k]` and `λ`:
//!
//! ```text
//! Δ^{1/2} Y = ρ_L^{−1/2} Y (ρ_R^{1/2})ᵀ,    J Y = T Y† T,    T = Ξ Zᵀ,
//! ```
//!
//! where `ρ_L = M M†` and `ρ_R = Mᵀ M̄ = Σ λ_k |ζ_k⟩⟨ζ_k|`. The antiunitary
//! `θ = u c` with `u = Σ |ξ_k⟩⟨ζ_k|` and `c` the conjugation fixing every
//! `ζ_k` has matrix `T` as well, so `θ² = T T̄`.
//!
//! [`modular_data`] checks these closed forms against an independent oracle:
//! the polar decomposition `S = J Δ^{1/2}` of the Tomita operator assembled
//! column by column from its defining action.

use crate::config::Config;
use crate::linalg::{self, frob, frob_diff, herm_eig, kron, psd_power, ComplexMatrix, LinalgError};
use crate::random::{random_matrix, rng};
use crate::reflection::IndexReport;
use crate::status::{HasStatus, Status};
use nalgebra::SVD;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModularError {
    #[error("vector is zero")]
    ZeroVector,

    #[error("coefficient matrix must be {m}x{m}, got {rows}x{cols}")]
    Shape { m: usize, rows: usize, cols: usize },

    #[error("vector contains non-finite entries")]
    NonFinite,

    #[error("vector norm {norm} differs from 1")]
    NotUnit { norm: f64 },

    #[error("no Schmidt coefficient above the rank tolerance")]
    DegenerateSupport,

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl HasStatus for ModularError {
    fn status(&self) -> Status {
        match self {
            ModularError::ZeroVector | ModularError::DegenerateSupport => Status::DegenerateSupport,
            ModularError::Shape { .. } | ModularError::NonFinite | ModularError::NotUnit { .. } => {
                Status::InputError
            }
            ModularError::Linalg(e) => e.status(),
        }
    }
}

pub type ModularResult<T> = Result<T, ModularError>;

/// Unit vector in `ℂ^m ⊗ ℂ^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteVector {
    m: usize,
    #[serde(with = "linalg::serde_matrix")]
    matrix: ComplexMatrix,
}

impl BipartiteVector {
    /// Accept a coefficient matrix of unit Frobenius norm.
    pub fn new(matrix: ComplexMatrix) -> ModularResult<Self> {
        let v = Self::check(matrix)?;
        let norm = frob(&v.matrix);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(ModularError::NotUnit { norm });
        }
        Ok(v)
    }

    /// Rescale a nonzero coefficient matrix to unit norm.
    pub fn normalized(matrix: ComplexMatrix) -> ModularResult<Self> {
        let mut v = Self::check(matrix)?;
        let norm = frob(&v.matrix);
        if norm == 0.0 {
            return Err(ModularError::ZeroVector);
        }
        v.matrix.unscale_mut(norm);
        Ok(v)
    }

    fn check(matrix: ComplexMatrix) -> ModularResult<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(ModularError::Shape { m: rows.max(cols), rows, cols });
        }
        if !linalg::is_finite(&matrix) {
            return Err(ModularError::NonFinite);
        }
        Ok(Self { m: rows, matrix })
    }

    /// From the `m²` components in the order `e_j ⊗ e_l ↦ j·m + l`.
    pub fn from_entries(m: usize, entries: &[C64]) -> ModularResult<Self> {
        if entries.len() != m * m || m == 0 {
            return Err(ModularError::Shape { m, rows: entries.len(), cols: 1 });
        }
        Self::normalized(ComplexMatrix::from_row_slice(m, m, entries))
    }

    pub fn entries(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.m * self.m);
        for j in 0..self.m {
            for l in 0..self.m {
                out.push(self.matrix[(j, l)]);
            }
        }
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// `Ω = Σ √λ_k ξ_k ⊗ ζ_k`, i.e. `M = Ξ diag(√λ) Zᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtData {
    /// Descending, summing to one.
    pub lambda: Vec<f64>,
    #[serde(with = "linalg::serde_matrix")]
    pub left_basis: ComplexMatrix,
    #[serde(with = "linalg::serde_matrix")]
    pub right_basis: ComplexMatrix,
    /// `u = Σ |ξ_k⟩⟨ζ_k|`.
    #[serde(with = "linalg::serde_matrix")]
    pub u: ComplexMatrix,
    pub support_dim: usize,
    pub reconstruction_residual: f64,
}

pub fn schmidt(omega: &BipartiteVector, rank_tol: f64) -> ModularResult<SchmidtData> {
    let m = omega.matrix();
    let (vals, vecs) = herm_eig(&linalg::hermitian_part(&(m.adjoint() * m)))?.descending();
    let r = vals.iter().take_while(|&&w| w > rank_tol).count();
    if r == 0 {
        return Err(ModularError::DegenerateSupport);
    }
    let n = omega.m();
    let mut xi = ComplexMatrix::zeros(n, r);
    let mut zeta = ComplexMatrix::zeros(n, r);
    for (k, &w) in vals[..r].iter().enumerate() {
        let b = vecs.column(k);
        let x = (m * b).unscale(w.sqrt());
        xi.set_column(k, &x);
        zeta.set_column(k, &b.map(|z| z.conj()));
    }
    let total: f64 = vals[..r].iter().sum();
    let lambda: Vec<f64> = vals[..r].iter().map(|w| w / total).collect();
    let sqrt_l = diag(&vals[..r].iter().map(|w| w.sqrt()).collect::<Vec<_>>());
    let reconstruction_residual = frob_diff(&(&xi * &sqrt_l * zeta.transpose()), m);
    let u = &xi * zeta.adjoint();
    Ok(SchmidtData { lambda, left_basis: xi, right_basis: zeta, u, support_dim: r, reconstruction_residual })
}

fn diag(vals: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(vals.len(), |i, _| C64::new(vals[i], 0.0)))
}

/// Sign of `Ω` under the flip `ξ ⊗ η ↦ η ⊗ ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapSign {
    Symmetric,
    Antisymmetric,
    Undefined,
}

impl SwapSign {
    pub fn value(self) -> Option<i8> {
        match self {
            SwapSign::Symmetric => Some(1),
            SwapSign::Antisymmetric => Some(-1),
            SwapSign::Undefined => None,
        }
    }
}

pub fn swap_sign(omega: &BipartiteVector, tol: f64) -> SwapSign {
    let m = omega.matrix();
    let t = m.transpose();
    if frob_diff(&t, m) <= tol {
        SwapSign::Symmetric
    } else if frob(&(&t + m)) <= tol {
        SwapSign::Antisymmetric
    } else {
        SwapSign::Undefined
    }
}

/// Worst residual of each identity over the random panel.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModularResiduals {
    /// `S (s ⊗ x) Ω = (s ⊗ x†) Ω` for the closed-form `S = J Δ^{1/2}` and
    /// agreement of the oracle factors with the assembled `S`.
    pub s_action: f64,
    /// `J² = s ⊗ s` for the oracle and closed-form `J`.
    pub j_square: f64,
    /// `ΔΩ = Ω` and `JΩ = Ω`.
    pub delta_fix: f64,
    /// `Δ^{1/2}(s ⊗ x)Ω = (s ⊗ ρ^{1/2} x ρ^{−1/2})Ω` for both `Δ`.
    pub delta_formula: f64,
    /// `J (s ⊗ x) J* = (u c x c u†) ⊗ s` and oracle `J` = closed-form `J`.
    pub j_formula: f64,
    /// `‖θ² − κ s‖_F`; absent when no sign fits.
    pub theta_square: Option<f64>,
    /// `‖u − σ uᵀ‖_F` in the `ζ` basis; present when the swap sign is defined.
    pub u_relation: Option<f64>,
    pub schmidt_reconstruction: f64,
}

impl ModularResiduals {
    pub fn max(&self) -> f64 {
        [
            self.s_action,
            self.j_square,
            self.delta_fix,
            self.delta_formula,
            self.j_formula,
            self.theta_square.unwrap_or(0.0),
            self.u_relation.unwrap_or(0.0),
            self.schmidt_reconstruction,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularReport {
    pub m: usize,
    /// `θ² = κ s`; absent when left and right supports differ.
    pub kappa: Option<i8>,
    pub sigma: Option<i8>,
    pub swap: SwapSign,
    pub lambda: Vec<f64>,
    pub support_dim: usize,
    #[serde(with = "linalg::serde_matrix")]
    pub u: ComplexMatrix,
    pub residuals: ModularResiduals,
    pub max_residual: f64,
    pub identities_hold: bool,
    /// `κ = σ` whenever `σ` is defined.
    pub kappa_matches_sigma: Option<bool>,
    pub panel_size: usize,
    pub seed: u64,
}

/// Antilinear map `y ↦ A ȳ`.
struct Antilinear(ComplexMatrix);

impl Antilinear {
    fn apply(&self, y: &ComplexMatrix) -> ComplexMatrix {
        &self.0 * y.map(|z| z.conj())
    }

    /// `J L J⁻¹ = A L̄ A†`.
    fn conjugate(&self, l: &ComplexMatrix) -> ComplexMatrix {
        &self.0 * l.map(|z| z.conj()) * self.0.adjoint()
    }

    fn square(&self) -> ComplexMatrix {
        &self.0 * self.0.map(|z| z.conj())
    }
}

/// Row-major vectorization `Y_{jl} ↦ y_{j·m + l}` as a column.
fn vec_rm(y: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = y.shape();
    ComplexMatrix::from_fn(r * c, 1, |i, _| y[(i / c, i % c)])
}

fn unvec_rm(y: &ComplexMatrix, m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |j, l| y[(j * m + l, 0)])
}

/// Tomita data of `Ω` and the residuals of every closed-form identity.
pub fn modular_data(omega: &BipartiteVector, cfg: &Config) -> ModularResult<ModularReport> {
    let n = omega.m();
    let m = omega.matrix().clone();
    let sd = schmidt(omega, cfg.rank_tol)?;
    let (xi, zeta) = (&sd.left_basis, &sd.right_basis);

    let rho_l = linalg::hermitian_part(&(&m * m.adjoint()));
    let rho_r = linalg::hermitian_part(&(m.transpose() * m.map(|z| z.conj())));
    let p_l = xi * xi.adjoint();
    let p_r = zeta * zeta.adjoint();
    let rho_l_inv_half = psd_power(&rho_l, -0.5, cfg.rank_tol)?;
    let rho_r_half = psd_power(&rho_r, 0.5, cfg.rank_tol)?;
    let rho_r_inv_half = psd_power(&rho_r, -0.5, cfg.rank_tol)?;
    let t = xi * zeta.transpose();
    let c_mat = zeta * zeta.transpose();
    let big_p = kron(&p_l, &p_r);

    // closed forms
    let delta_half_f = |y: &ComplexMatrix| &rho_l_inv_half * y * rho_r_half.transpose();
    let j_f = |y: &ComplexMatrix| &t * y.adjoint() * &t;
    let s_f = |y: &ComplexMatrix| j_f(&delta_half_f(y));

    // oracle: S(Y) = M (M⁺ P(Y))† with M⁺ = (M†M)⁺ M†, assembled on basis vectors
    let gram_inv = psd_power(&linalg::hermitian_part(&(m.adjoint() * &m)), -1.0, cfg.rank_tol)?;
    let m_plus = gram_inv * m.adjoint();
    let s_oracle = |y: &ComplexMatrix| -> ComplexMatrix {
        let py = &p_l * y * p_r.transpose();
        &m * (&m_plus * py).adjoint()
    };
    let dim = n * n;
    let mut a_s = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let mut e = ComplexMatrix::zeros(n, n);
        e[(i / n, i % n)] = C64::new(1.0, 0.0);
        a_s.set_column(i, &vec_rm(&s_oracle(&e)).column(0));
    }
    // polar decomposition through the SVD A_S = W Σ V†: J = W V† and
    // Δ^{1/2} = conj(V Σ V†) (as S = A_S ∘ conj, S†S = conj(A_S† A_S))
    let svd = SVD::try_new(a_s.clone(), true, true, f64::EPSILON, 0)
        .ok_or(LinalgError::ConvergenceFailure { routine: "svd", residual: f64::NAN })?;
    let (w, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    // S is supported on P_L ⊗ P_R, which has dimension r²
    let mut keep: Vec<usize> = (0..svd.singular_values.len()).collect();
    keep.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    keep.truncate(sd.support_dim * sd.support_dim);
    let mut a_j = ComplexMatrix::zeros(dim, dim);
    let mut half = ComplexMatrix::zeros(dim, dim);
    let mut full = ComplexMatrix::zeros(dim, dim);
    for &i in &keep {
        let wi = w.column(i);
        let vi = v_t.row(i).adjoint();
        let s = svd.singular_values[i];
        a_j += wi * vi.adjoint();
        let proj = &vi * vi.adjoint();
        half += proj.scale(s);
        full += proj.scale(s * s);
    }
    let delta_half_o = half.map(|z| z.conj());
    let delta_o = full.map(|z| z.conj());
    let j_o = Antilinear(a_j);

    let omega_vec = vec_rm(&m);
    let mut res =
        ModularResiduals { schmidt_reconstruction: sd.reconstruction_residual, ..Default::default() };

    // S = J Δ^{1/2} reproduces the assembled oracle
    res.s_action = frob_diff(&(&j_o.0 * delta_half_o.map(|z| z.conj())), &a_s);

    // J² = s ⊗ s
    let j_f_mat = {
        let mut a = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            let mut e = ComplexMatrix::zeros(n, n);
            e[(i / n, i % n)] = C64::new(1.0, 0.0);
            a.set_column(i, &vec_rm(&j_f(&e)).column(0));
        }
        Antilinear(a)
    };
    res.j_square = frob_diff(&j_o.square(), &big_p).max(frob_diff(&j_f_mat.square(), &big_p));
    res.j_formula = frob_diff(&j_o.0, &j_f_mat.0);

    // ΔΩ = Ω, JΩ = Ω
    res.delta_fix = frob_diff(&(&delta_o * &omega_vec), &omega_vec)
        .max(frob_diff(&j_o.apply(&omega_vec), &omega_vec))
        .max(frob_diff(&j_f(&m), &m));

    let mut r = rng(cfg.seed);
    let u_c = &sd.u * &c_mat;
    for _ in 0..cfg.panel_size {
        let x = &p_r * random_matrix(&mut r, n, n) * &p_r;
        let y = &m * x.transpose();
        // (c) S(s⊗x)Ω = (s⊗x†)Ω
        let target_s = &m * x.map(|z| z.conj());
        res.s_action = res
            .s_action
            .max(frob_diff(&s_f(&y), &target_s))
            .max(frob_diff(&unvec_rm(&(&a_s * vec_rm(&y).map(|z| z.conj())), n), &target_s));
        // (a) Δ^{1/2}(s⊗x)Ω = (s ⊗ ρ^{1/2} x ρ^{−1/2})Ω
        let target_d = &m * (&rho_r_half * &x * &rho_r_inv_half).transpose();
        let oracle_d = unvec_rm(&(&delta_half_o * vec_rm(&y)), n);
        res.delta_formula = res
            .delta_formula
            .max(frob_diff(&oracle_d, &target_d))
            .max(frob_diff(&delta_half_f(&y), &target_d));
        // (b) J(s⊗x)J* = (u c x c u†) ⊗ s, with c x c = C x̄ C̄
        let left = &u_c * x.map(|z| z.conj()) * u_c.adjoint();
        let target_j = kron(&left, &p_r);
        let lifted = kron(&p_l, &x);
        res.j_formula = res
            .j_formula
            .max(frob_diff(&j_o.conjugate(&lifted), &target_j))
            .max(frob_diff(&j_f_mat.conjugate(&lifted), &target_j));
    }

    // θ² = T T̄ against ±s; a sign exists only when both supports coincide
    let theta_sq = &t * t.map(|z| z.conj());
    let plus = frob_diff(&theta_sq, &p_r);
    let minus = frob(&(&theta_sq + &p_r));
    let (kappa, theta_res) = if plus <= cfg.modular_tol {
        (Some(1i8), Some(plus))
    } else if minus <= cfg.modular_tol {
        (Some(-1i8), Some(minus))
    } else {
        (None, None)
    };
    res.theta_square = theta_res;

    let swap = swap_sign(omega, cfg.swap_tol);
    let sigma = swap.value();
    if let Some(s) = sigma {
        let u_zeta = zeta.adjoint() * xi;
        res.u_relation = Some(frob_diff(&u_zeta, &u_zeta.transpose().scale(s as f64)));
    }

    let max_residual = res.max();
    Ok(ModularReport {
        m: n,
        kappa,
        sigma,
        swap,
        lambda: sd.lambda,
        support_dim: sd.support_dim,
        u: sd.u,
        identities_hold: max_residual <= cfg.modular_tol,
        max_residual,
        residuals: res,
        kappa_matches_sigma: sigma.map(|s| kappa == Some(s)),
        panel_size: cfg.panel_size,
        seed: cfg.seed,
    })
}

/// `M = U'† Λ^{1/2}` in the eigenbasis of `ρ`, normalized.
///
/// `U'ᵀ = ζ U'` together with `[U', Λ] = 0` gives `Mᵀ = ζ M`, so the swap
/// sign of this vector reproduces the index.
pub fn bond_vector(report: &IndexReport, rho: &ComplexMatrix) -> ModularResult<BipartiteVector> {
    let q = &report.basis;
    let lam = linalg::hermitian_part(&(q.adjoint() * rho * q));
    let half = psd_power(&lam, 0.5, 0.0)?;
    BipartiteVector::normalized(report.u_eigenbasis.adjoint() * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::reflection::z2_index_run;
    use crate::zoo;

    fn cfg() -> Config {
        Config::default()
    }

    fn bell() -> BipartiteVector {
        BipartiteVector::from_entries(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    fn singlet() -> BipartiteVector {
        BipartiteVector::from_entries(2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    fn random_vector(seed: u64, m: usize, sign: f64) -> BipartiteVector {
        let mut r = rng(seed);
        let g = random_matrix(&mut r, m, m);
        BipartiteVector::normalized(&g + g.transpose().scale(sign)).unwrap()
    }

    #[test]
    fn bipartite_vector_validation() {
        assert!(matches!(
            BipartiteVector::normalized(ComplexMatrix::zeros(2, 2)),
            Err(ModularError::ZeroVector)
        ));
        assert!(matches!(
            BipartiteVector::new(ComplexMatrix::identity(2, 2)),
            Err(ModularError::NotUnit { .. })
        ));
        assert!(BipartiteVector::from_entries(2, &[c(1.0, 0.0); 3]).is_err());
        let v = singlet();
        let back = BipartiteVector::from_entries(2, &v.entries()).unwrap();
        assert!(frob_diff(back.matrix(), v.matrix()) < 1e-15);
    }

    #[test]
    fn bell_schmidt() {
        let sd = schmidt(&bell(), 1e-12).unwrap();
        assert_eq!(sd.support_dim, 2);
        for l in &sd.lambda {
            assert!((l - 0.5).abs() < 1e-14);
        }
        assert!(frob_diff(&sd.u, &ComplexMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn singlet_schmidt() {
        let sd = schmidt(&singlet(), 1e-12).unwrap();
        for l in &sd.lambda {
            assert!((l - 0.5).abs() < 1e-14);
        }
        // u ∝ [[0, −1], [1, 0]] up to a phase
        assert!(frob(&(&sd.u + sd.u.transpose())) < 1e-12);
        assert!(sd.u[(0, 0)].norm() < 1e-12 && (sd.u[(0, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_schmidt_round_trip() {
        for seed in 0..10 {
            let mut r = rng(seed);
            let v = BipartiteVector::normalized(random_matrix(&mut r, 5, 5)).unwrap();
            let sd = schmidt(&v, 1e-12).unwrap();
            assert!(sd.reconstruction_residual <= 1e-9);
            assert!((sd.lambda.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(sd.lambda.windows(2).all(|w| w[0] >= w[1]));
            let uu = sd.u.adjoint() * &sd.u;
            assert!(frob_diff(&uu, &(&sd.right_basis * sd.right_basis.adjoint())) < 1e-10);
        }
    }

    #[test]
    fn bell_and_singlet_modular_data() {
        let b = modular_data(&bell(), &cfg()).unwrap();
        assert_eq!(b.kappa, Some(1));
        assert_eq!(b.sigma, Some(1));
        assert!(b.max_residual < 1e-12, "{:?}", b.residuals);
        let s = modular_data(&singlet(), &cfg()).unwrap();
        assert_eq!(s.kappa, Some(-1));
        assert_eq!(s.sigma, Some(-1));
        assert!(s.identities_hold);
    }

    #[test]
    fn symmetric_and_antisymmetric_random_vectors() {
        for seed in 0..20 {
            let m = 2 + (seed as usize % 6);
            let sym = modular_data(&random_vector(seed, m, 1.0), &cfg()).unwrap();
            assert_eq!(sym.sigma, Some(1));
            assert_eq!(sym.kappa, Some(1));
            assert!(sym.identities_hold, "{:?}", sym.residuals);
            let m = 2 * (1 + seed as usize % 4);
            let anti = modular_data(&random_vector(seed + 1000, m, -1.0), &cfg()).unwrap();
            assert_eq!(anti.sigma, Some(-1));
            assert_eq!(anti.kappa, Some(-1));
            assert!(anti.identities_hold, "{:?}", anti.residuals);
        }
    }

    #[test]
    fn rank_deficient_vector() {
        // symmetric with a degenerate Schmidt pair
        let mut mat = ComplexMatrix::zeros(3, 3);
        mat[(0, 0)] = c(0.8, 0.0);
        mat[(1, 2)] = c(0.3, 0.1);
        mat[(2, 1)] = c(0.3, 0.1);
        let v = BipartiteVector::normalized(mat).unwrap();
        let rep = modular_data(&v, &cfg()).unwrap();
        assert_eq!(rep.support_dim, 3);
        let mut low = ComplexMatrix::zeros(3, 3);
        low[(0, 0)] = c(0.6, 0.0);
        low[(1, 1)] = c(0.0, 0.8);
        let rep = modular_data(&BipartiteVector::normalized(low).unwrap(), &cfg()).unwrap();
        assert_eq!(rep.support_dim, 2);
        assert_eq!(rep.kappa, Some(1));
        assert!(rep.identities_hold, "{:?}", rep.residuals);
    }

    #[test]
    fn swap_sign_examples() {
        assert_eq!(swap_sign(&bell(), 1e-8), SwapSign::Symmetric);
        assert_eq!(swap_sign(&singlet(), 1e-8), SwapSign::Antisymmetric);
        let mut r = rng(5);
        let v = BipartiteVector::normalized(random_matrix(&mut r, 3, 3)).unwrap();
        assert_eq!(swap_sign(&v, 1e-8), SwapSign::Undefined);
        let rep = modular_data(&v, &cfg()).unwrap();
        assert_eq!(rep.sigma, None);
        assert_eq!(rep.kappa_matches_sigma, None);
        assert!(rep.residuals.delta_fix < 1e-8 && rep.residuals.j_square < 1e-8);
    }

    #[test]
    fn aklt_bond_vector() {
        let run = z2_index_run(&zoo::aklt(), &cfg()).unwrap();
        let bv = bond_vector(&run.report, &run.rho.rho).unwrap();
        assert_eq!(swap_sign(&bv, 1e-8), SwapSign::Antisymmetric);
        assert_eq!(modular_data(&bv, &cfg()).unwrap().kappa, Some(-1));
    }

    #[test]
    fn product_bond_vector() {
        let run = z2_index_run(&zoo::model("product:1,0").unwrap(), &cfg()).unwrap();
        let bv = bond_vector(&run.report, &run.rho.rho).unwrap();
        assert!((bv.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert_eq!(swap_sign(&bv, 1e-8), SwapSign::Symmetric);
    }

    #[test]
    fn deformed_aklt_bond_vectors() {
        for i in 0..=10 {
            let run = z2_index_run(&zoo::deformed_aklt(i as f64 / 10.0), &cfg()).unwrap();
            let bv = bond_vector(&run.report, &run.rho.rho).unwrap();
            assert_eq!(swap_sign(&bv, 1e-8).value(), Some(run.report.zeta));
        }
    }
}
