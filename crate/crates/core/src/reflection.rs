//! Reflected tuples, the gauge equation and the ℤ₂ reflection index.
//!
//! Let `Q` diagonalize the invariant state, `ρ = Q Λ Q†` with `Λ` descending,
//! and let `c` be entrywise conjugation in that basis. The reflected tuple is
//!
//! ```text
//! ṽ_μ = Q Λ^{−1/2} (Q† v_μ Q)ᵀ Λ^{1/2} Q†,
//! ```
//!
//! which generates the mirror image of the state generated by `v`. When both
//! states agree there is a unitary `U` and a phase with `U v_μ = e^{it} ṽ_μ U`.
//! Writing `U' = Q† U Q`, the antiunitary `θ = U'† c` squares to `U'† U'ᵀ`, and
//! `U'ᵀ = ζ U'` defines the index `ζ = ±1`.

use crate::config::Config;
use crate::linalg::{
    self, frob, frob_diff, herm_eig, identity, peripheral_eigs, polar_unitary, ComplexMatrix, LinalgError,
    SuperOperator,
};
use crate::mps::{
    self, invariant_state, marginal_matrix, primitivity, InvariantState, MpsError, MpsTuple,
    PrimitivityCertificate, RawTuple,
};
use crate::status::{HasStatus, Status};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReflectionError {
    #[error("states differ: mixed transfer radius {radius:.6} below 1 − tol")]
    NotSameState { radius: f64 },

    #[error("gauge eigenmatrix deviates from a unitary multiple by {deviation:.3e}")]
    NotUnitaryMultiple { deviation: f64 },

    #[error("gauge relation residual {residual:.3e} exceeds tolerance")]
    GaugeResidual { residual: f64 },

    #[error("reflected tuple lost normalization: residual {residual:.3e}")]
    NormalizationBroken { residual: f64 },

    #[error("tuple is not primitive")]
    NotPrimitive(Box<PrimitivityCertificate>),

    #[error("state is not reflection invariant")]
    NotReflectionInvariant(Box<ReflectionEvidence>),

    #[error("gauge and marginal evidence disagree on reflection invariance")]
    Inconclusive(Box<ReflectionEvidence>),

    #[error("transpose symmetry undecided: sym {sym:.3e}, antisym {antisym:.3e}")]
    AmbiguousSymmetry { sym: f64, antisym: f64 },

    #[error("index consistency check `{check}` failed: residual {residual:.3e}")]
    Consistency { check: &'static str, residual: f64 },

    #[error(transparent)]
    Mps(#[from] MpsError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl HasStatus for ReflectionError {
    fn status(&self) -> Status {
        use ReflectionError::*;
        match self {
            NotPrimitive(_) => Status::NotPrimitive,
            NotReflectionInvariant(_) | NotSameState { .. } => Status::NotReflectionInvariant,
            Inconclusive(_) => Status::Inconclusive,
            AmbiguousSymmetry { .. } => Status::AmbiguousSymmetry,
            NotUnitaryMultiple { .. }
            | GaugeResidual { .. }
            | NormalizationBroken { .. }
            | Consistency { .. } => Status::NumericalFailure,
            Mps(e) => e.status(),
            Linalg(e) => e.status(),
        }
    }
}

pub type ReflectionResult<T> = Result<T, ReflectionError>;

/// On-site involution `π` accompanying the reflection, acting as
/// `|μ_0 … μ_{l−1}⟩ ↦ |π(μ_{l−1}) … π(μ_0)⟩` on a window.
///
/// Plain chains use the identity. A chain of `b`-site blocks inherits the
/// reflection of the underlying chain, which also reverses the order of the
/// sites inside each block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SiteMap(Vec<usize>);

impl SiteMap {
    pub fn identity(d: usize) -> Self {
        Self((0..d).collect())
    }

    /// Digit reversal on `d^b` block indices.
    pub fn blocked(d: usize, b: usize) -> Self {
        let dim = d.pow(b as u32);
        Self((0..dim).map(|i| mps::reverse_digits(i, d, b)).collect())
    }

    /// Accepts only involutive permutations.
    pub fn new(map: Vec<usize>) -> Option<Self> {
        let n = map.len();
        let ok = map.iter().all(|&j| j < n) && (0..n).all(|i| map[map[i]] == i);
        ok.then_some(Self(map))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Reflect an `l`-site window operator.
    pub fn reflect_window(&self, m: &ComplexMatrix, l: usize) -> ComplexMatrix {
        let d = self.0.len();
        let dim = m.nrows();
        let perm: Vec<usize> = (0..dim)
            .map(|i| {
                let r = mps::reverse_digits(i, d, l);
                // apply π digit by digit
                let (mut x, mut out, mut place) = (r, 0, 1);
                for _ in 0..l {
                    out += self.0[x % d] * place;
                    x /= d;
                    place *= d;
                }
                out
            })
            .collect();
        ComplexMatrix::from_fn(dim, dim, |i, j| m[(perm[i], perm[j])])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectedTuple {
    pub tilde_v: MpsTuple,
    /// Eigenvectors of `ρ` as columns, eigenvalues descending.
    #[serde(with = "linalg::serde_matrix")]
    pub basis: ComplexMatrix,
    pub rho_diag: Vec<f64>,
}

pub fn reflected_tuple(v: &MpsTuple, rho: &InvariantState, cfg: &Config) -> ReflectionResult<ReflectedTuple> {
    reflected_tuple_with(v, rho, &SiteMap::identity(v.d()), cfg)
}

/// [`reflected_tuple`] with an on-site involution: `ṽ_μ` is built from `v_{π(μ)}`.
pub fn reflected_tuple_with(
    v: &MpsTuple,
    rho: &InvariantState,
    site_map: &SiteMap,
    cfg: &Config,
) -> ReflectionResult<ReflectedTuple> {
    assert_eq!(site_map.as_slice().len(), v.d(), "site map must act on the physical index");
    let (rho_diag, q) = herm_eig(&rho.rho)?.descending();
    let min = *rho_diag.last().expect("nonempty spectrum");
    if min <= cfg.rank_tol * rho_diag[0] {
        return Err(MpsError::NotFaithful { min_eigenvalue: min }.into());
    }
    let k = v.k();
    let half = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(k, |i, _| {
        C64::new(rho_diag[i].sqrt(), 0.0)
    }));
    let inv_half = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(k, |i, _| {
        C64::new(1.0 / rho_diag[i].sqrt(), 0.0)
    }));
    let qd = q.adjoint();
    let mats: Vec<ComplexMatrix> = site_map
        .as_slice()
        .iter()
        .map(|&src| {
            let local = &qd * &v.mats()[src] * &q;
            &q * &inv_half * local.transpose() * &half * &qd
        })
        .collect();
    let residual = mps::normalization_residual(&mats);
    if residual > cfg.eps_norm {
        return Err(ReflectionError::NormalizationBroken { residual });
    }
    Ok(ReflectedTuple { tilde_v: MpsTuple::new(mats, cfg.eps_norm)?, basis: q, rho_diag })
}

/// Unitary `U` and phase with `U v_μ = phase · w_μ U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeSolution {
    #[serde(with = "linalg::serde_matrix")]
    pub u: ComplexMatrix,
    #[serde(with = "linalg::serde_complex")]
    pub phase: C64,
    /// Modulus of the dominant eigenvalue of `x ↦ Σ v x w†`.
    pub mixed_radius: f64,
    pub relation_residual: f64,
    pub unitary_multiple_deviation: f64,
}

/// Solve `U v_μ = e^{it} w_μ U` for tuples generating the same state.
///
/// If the relation holds then `X = U†` satisfies `Σ v_μ X w_μ† = e^{it} X`, so
/// the dominant eigenmatrix of the mixed transfer map is a multiple of `U†`.
pub fn gauge_solve(v: &MpsTuple, w: &MpsTuple, cfg: &Config) -> ReflectionResult<GaugeSolution> {
    assert_eq!((v.d(), v.k()), (w.d(), w.k()), "gauge_solve needs tuples of equal shape");
    let mixed = SuperOperator::sandwich(v.mats(), w.mats());
    let spec = peripheral_eigs(&mixed, cfg.peripheral_tol)?;
    let top = &spec.pairs[0];
    let radius = top.eigenvalue.norm();
    if radius < 1.0 - cfg.gauge_tol {
        return Err(ReflectionError::NotSameState { radius });
    }
    let polar = match polar_unitary(&top.eigenmatrix, cfg.gauge_tol) {
        Ok(p) => p,
        Err(LinalgError::RankDeficient { .. }) => {
            return Err(ReflectionError::NotUnitaryMultiple { deviation: 1.0 })
        }
        Err(e) => return Err(e.into()),
    };
    if polar.deviation > cfg.gauge_tol {
        return Err(ReflectionError::NotUnitaryMultiple { deviation: polar.deviation });
    }
    let u = polar.unitary.adjoint();
    let phase = top.eigenvalue / radius;
    let relation_residual = relation_residual(&u, phase, v, w);
    if relation_residual > cfg.eps_gauge {
        return Err(ReflectionError::GaugeResidual { residual: relation_residual });
    }
    Ok(GaugeSolution {
        u,
        phase,
        mixed_radius: radius,
        relation_residual,
        unitary_multiple_deviation: polar.deviation,
    })
}

/// `max_μ ‖U v_μ − phase · w_μ U‖_F`.
pub fn relation_residual(u: &ComplexMatrix, phase: C64, v: &MpsTuple, w: &MpsTuple) -> f64 {
    v.mats()
        .iter()
        .zip(w.mats())
        .map(|(vm, wm)| frob_diff(&(u * vm), &((wm * u) * phase)))
        .fold(0.0, f64::max)
}

/// Two independent tests of `ω ∘ γ = ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionEvidence {
    pub invariant: bool,
    pub via_gauge: bool,
    /// Relation residual when the gauge equation was solved.
    pub gauge_residual: Option<f64>,
    pub mixed_radius: Option<f64>,
    pub gauge_failure: Option<String>,
    /// `max_{l ≤ L} ‖reverse(ω_l) − ω_l‖_F`.
    pub via_marginals: f64,
    pub marginal_window: usize,
    pub marginal_tol: f64,
}

/// Largest window length compared by the marginal test.
fn marginal_window(v: &MpsTuple, cert: &PrimitivityCertificate, cfg: &Config) -> usize {
    let wanted = 2 * cert.injectivity_length.unwrap_or(1).max(1);
    let mut l = 1;
    let mut dim = v.d();
    while l < wanted && dim.saturating_mul(v.d()) <= cfg.window_cap {
        dim *= v.d();
        l += 1;
    }
    l
}

/// Certify reflection invariance of a primitive tuple.
pub fn reflection_invariant(v: &MpsTuple, cfg: &Config) -> ReflectionResult<ReflectionEvidence> {
    reflection_invariant_with(v, &SiteMap::identity(v.d()), cfg)
}

pub fn reflection_invariant_with(
    v: &MpsTuple,
    site_map: &SiteMap,
    cfg: &Config,
) -> ReflectionResult<ReflectionEvidence> {
    let cert = primitivity(v, cfg)?;
    if !cert.is_primitive {
        return Err(ReflectionError::NotPrimitive(Box::new(cert)));
    }
    let rho = invariant_state(v, cfg)?;
    let reflected = reflected_tuple_with(v, &rho, site_map, cfg)?;
    evidence(v, &rho, &reflected, site_map, &cert, cfg).map(|(ev, _)| ev)
}

fn evidence(
    v: &MpsTuple,
    rho: &InvariantState,
    reflected: &ReflectedTuple,
    site_map: &SiteMap,
    cert: &PrimitivityCertificate,
    cfg: &Config,
) -> ReflectionResult<(ReflectionEvidence, Option<GaugeSolution>)> {
    let gauge = match gauge_solve(v, &reflected.tilde_v, cfg) {
        Ok(sol) => Ok(sol),
        Err(
            e @ (ReflectionError::NotSameState { .. }
            | ReflectionError::NotUnitaryMultiple { .. }
            | ReflectionError::GaugeResidual { .. }),
        ) => Err(e),
        Err(other) => return Err(other),
    };
    let window = marginal_window(v, cert, cfg);
    let mut mismatch: f64 = 0.0;
    for l in 1..=window {
        let m = marginal_matrix(v, rho, l, cfg)?;
        mismatch = mismatch.max(frob_diff(&site_map.reflect_window(&m, l), &m));
    }
    let via_marginals_ok = mismatch <= cfg.marginal_tol;
    let ev = ReflectionEvidence {
        invariant: gauge.is_ok() && via_marginals_ok,
        via_gauge: gauge.is_ok(),
        gauge_residual: gauge.as_ref().ok().map(|g| g.relation_residual),
        mixed_radius: match &gauge {
            Ok(g) => Some(g.mixed_radius),
            Err(ReflectionError::NotSameState { radius }) => Some(*radius),
            Err(_) => None,
        },
        gauge_failure: gauge.as_ref().err().map(|e| e.to_string()),
        via_marginals: mismatch,
        marginal_window: window,
        marginal_tol: cfg.marginal_tol,
    };
    if gauge.is_ok() != via_marginals_ok {
        return Err(ReflectionError::Inconclusive(Box::new(ev)));
    }
    Ok((ev, gauge.ok()))
}

/// The ℤ₂ index with every intermediate certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub zeta: i8,
    /// Gauge unitary in the original bond basis.
    #[serde(with = "linalg::serde_matrix")]
    pub u: ComplexMatrix,
    /// The same unitary in the eigenbasis of `ρ`, where `c` acts.
    #[serde(with = "linalg::serde_matrix")]
    pub u_eigenbasis: ComplexMatrix,
    #[serde(with = "linalg::serde_complex")]
    pub phase: C64,
    pub sym_residual: f64,
    pub antisym_residual: f64,
    pub phase_sq_residual: f64,
    pub rho_commute_residual: f64,
    pub relation_residual: f64,
    /// `‖θ² − ζ·1‖_F` with `θ² = U'† U'ᵀ`.
    pub theta_square_residual: f64,
    #[serde(with = "linalg::serde_matrix")]
    pub basis: ComplexMatrix,
    pub rho_diag: Vec<f64>,
    pub normalization_residual: f64,
    pub site_map: SiteMap,
    pub primitivity: PrimitivityCertificate,
    pub reflection: ReflectionEvidence,
}

/// Normalized tuple together with its index report.
#[derive(Debug, Clone)]
pub struct IndexRun {
    pub tuple: MpsTuple,
    pub rho: InvariantState,
    pub report: IndexReport,
}

/// Full pipeline from a raw tuple to the index.
pub fn z2_index(raw: &RawTuple, cfg: &Config) -> ReflectionResult<IndexReport> {
    z2_index_run(raw, cfg).map(|run| run.report)
}

pub fn z2_index_run(raw: &RawTuple, cfg: &Config) -> ReflectionResult<IndexRun> {
    z2_index_run_with(raw, &SiteMap::identity(raw.d()), cfg)
}

/// Index with respect to a reflection carrying the on-site involution `site_map`.
pub fn z2_index_run_with(raw: &RawTuple, site_map: &SiteMap, cfg: &Config) -> ReflectionResult<IndexRun> {
    let v = mps::normalize(raw, cfg)?;
    let cert = primitivity(&v, cfg)?;
    if !cert.is_primitive {
        return Err(ReflectionError::NotPrimitive(Box::new(cert)));
    }
    let rho = invariant_state(&v, cfg)?;
    let reflected = reflected_tuple_with(&v, &rho, site_map, cfg)?;
    let (ev, gauge) = evidence(&v, &rho, &reflected, site_map, &cert, cfg)?;
    let Some(gauge) = gauge else {
        return Err(ReflectionError::NotReflectionInvariant(Box::new(ev)));
    };

    let q = &reflected.basis;
    let u_eig = q.adjoint() * &gauge.u * q;
    let ut = u_eig.transpose();
    let sym = frob_diff(&ut, &u_eig);
    let antisym = frob(&(&ut + &u_eig));
    let (zeta, small, large) = if sym < antisym { (1i8, sym, antisym) } else { (-1i8, antisym, sym) };
    if small > cfg.eps_index || large < 0.5 * frob(&u_eig) {
        return Err(ReflectionError::AmbiguousSymmetry { sym, antisym });
    }
    let phase_sq = (gauge.phase * gauge.phase - C64::new(1.0, 0.0)).norm();
    if phase_sq > cfg.eps_index {
        return Err(ReflectionError::Consistency { check: "phase_square", residual: phase_sq });
    }
    let rho_commute = frob_diff(&(&gauge.u * &rho.rho * gauge.u.adjoint()), &rho.rho);
    if rho_commute > cfg.eps_index {
        return Err(ReflectionError::Consistency { check: "rho_commute", residual: rho_commute });
    }
    let theta_sq = u_eig.adjoint() * &ut;
    let theta_square_residual = frob_diff(&theta_sq, &identity(v.k()).scale(zeta as f64));

    let report = IndexReport {
        zeta,
        u: gauge.u.clone(),
        u_eigenbasis: u_eig,
        phase: gauge.phase,
        sym_residual: sym,
        antisym_residual: antisym,
        phase_sq_residual: phase_sq,
        rho_commute_residual: rho_commute,
        relation_residual: gauge.relation_residual,
        theta_square_residual,
        basis: reflected.basis.clone(),
        rho_diag: reflected.rho_diag.clone(),
        normalization_residual: v.normalization_residual(),
        site_map: site_map.clone(),
        primitivity: cert,
        reflection: ev,
    };
    Ok(IndexRun { tuple: v, rho, report })
}
