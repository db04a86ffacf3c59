//! Mutual and conditional mutual information estimators.
//!
//! Every estimator here averages per-row local values `xi_i` built from the
//! neighbor counts of [`crate::knn`]:
//!
//! | kind       | local value                                                          | counts    |
//! |------------|----------------------------------------------------------------------|-----------|
//! | `Proposed` | `psi(k) - psi(n_xz) - psi(n_yz) + psi(n_z)` if `k~ = k`, else the same with `log` and `k~` | `<= rho` |
//! | `Fp`       | `psi(k) - psi(n*_xz + 1) - psi(n*_yz + 1) + psi(n*_z + 1)`, `n* >= 1` | `< rho`   |
//! | `Ravk1/2`  | `psi(k~) - log(n_xz + 1) - log(n_yz + 1) + log(n_z + 1)`              | `<= rho`  |
//! | `KsgMi`    | `psi(k) + psi(n) - psi(n*_x + 1) - psi(n*_y + 1)`                     | `< rho`   |
//!
//! Terms are grouped as `(a + d) - (b + c)` so that exchanging X and Y gives
//! bit-identical results. All values are in nats.

mod kl;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, RoleAssignment};
use crate::error::{Error, Result};
use crate::knn::{neighbor_counts, NeighborCounts, NeighborProfile, RowCounts, SearchStrategy};
use crate::numerics::{digamma_count, mean};

pub use self::kl::{kl_entropy, kl_entropy_result};

/// Neighbor count used by every estimator unless told otherwise.
pub const DEFAULT_K: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Proposed,
    Fp,
    Ravk1,
    Ravk2,
    KsgMi,
    KlEntropy,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 6] = [
        EstimatorKind::Proposed,
        EstimatorKind::Fp,
        EstimatorKind::Ravk1,
        EstimatorKind::Ravk2,
        EstimatorKind::KsgMi,
        EstimatorKind::KlEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Proposed => "proposed",
            EstimatorKind::Fp => "fp",
            EstimatorKind::Ravk1 => "ravk1",
            EstimatorKind::Ravk2 => "ravk2",
            EstimatorKind::KsgMi => "ksg_mi",
            EstimatorKind::KlEntropy => "kl_entropy",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "proposed" => Ok(EstimatorKind::Proposed),
            "fp" => Ok(EstimatorKind::Fp),
            "ravk1" => Ok(EstimatorKind::Ravk1),
            "ravk2" => Ok(EstimatorKind::Ravk2),
            "ksg" | "ksg_mi" => Ok(EstimatorKind::KsgMi),
            "kl" | "kl_entropy" => Ok(EstimatorKind::KlEntropy),
            other => Err(Error::Domain(format!("unknown estimator {other:?}"))),
        }
    }
}

/// Which tie count RAVK plugs into its digamma term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RavkVariant {
    /// Exact duplicates when `rho = 0`, otherwise `k`.
    DuplicatesOnly,
    /// All rows within `rho`, boundary included.
    Inclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateParams {
    pub k: usize,
    /// Report `max(mean(xi), 0)` instead of the raw mean.
    pub clamp: bool,
    /// Norm for the KL entropy estimator; the other estimators always use the max norm.
    pub p_norm: f64,
    #[serde(default)]
    pub strategy: SearchStrategy,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            clamp: true,
            p_norm: f64::INFINITY,
            strategy: SearchStrategy::Auto,
        }
    }
}

impl EstimateParams {
    pub fn with_k(k: usize) -> Self {
        Self { k, ..Self::default() }
    }

    pub fn unclamped(mut self) -> Self {
        self.clamp = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    /// Point estimate in nats.
    pub estimate: f64,
    /// Local values; `estimate` is their mean, clamped at zero when requested.
    pub xi: Vec<f64>,
    /// True when clamping raised a negative mean to zero.
    pub clamped: bool,
    pub kind: EstimatorKind,
    pub params: EstimateParams,
    pub n: usize,
}

impl EstimateResult {
    fn from_local(xi: Vec<f64>, kind: EstimatorKind, params: EstimateParams) -> Result<Self> {
        if let Some(i) = xi.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("{kind}: local value at row {i} is not finite")));
        }
        let raw = mean(&xi)?;
        let clamped = params.clamp && raw < 0.0;
        Ok(Self {
            estimate: if clamped { 0.0 } else { raw },
            n: xi.len(),
            xi,
            clamped,
            kind,
            params,
        })
    }

    /// Unclamped mean of the local values.
    pub fn mean_xi(&self) -> f64 {
        mean(&self.xi).unwrap_or(f64::NAN)
    }
}

/// Local value of the proposed estimator.
///
/// Uses digamma when the joint count equals `k` and natural logs when ties
/// pushed it above `k`.
pub fn local_xi_proposed(profile: &NeighborProfile, k: usize) -> Result<f64> {
    profile.check_chain(k)?;
    let p = profile;
    Ok(if p.tilde_k == k {
        (digamma_count(k) + digamma_count(p.n_z)) - (digamma_count(p.n_xz) + digamma_count(p.n_yz))
    } else {
        let ln = |c: usize| (c as f64).ln();
        (ln(p.tilde_k) + ln(p.n_z)) - (ln(p.n_xz) + ln(p.n_yz))
    })
}

/// Frenzel-Pompe local value with strict counts, each floored at 1.
pub fn local_xi_fp(c: &RowCounts, k: usize) -> f64 {
    let g = |m: usize| digamma_count(m.max(1) + 1);
    (digamma_count(k) + g(c.z_strict)) - (g(c.xz_strict) + g(c.yz_strict))
}

/// RAVK local value. `c.z` must use `j != i` counting, so plain MI reduces to
/// the `log(n)` term of the mixed MI estimator it extends.
pub fn local_xi_ravk(c: &RowCounts, k: usize, variant: RavkVariant) -> f64 {
    let tilde = match variant {
        // at rho = 0 the inclusive joint count is the number of duplicates
        RavkVariant::DuplicatesOnly if c.rho > 0.0 => k,
        _ => c.joint,
    };
    let ln1 = |m: usize| ((m + 1) as f64).ln();
    (digamma_count(tilde) + ln1(c.z)) - (ln1(c.xz) + ln1(c.yz))
}

/// KSG local value with strict marginal counts. `floor_counts` applies the
/// `max(n*, 1)` floor used on data with ties.
pub fn local_xi_ksg(c: &RowCounts, k: usize, n: usize, floor_counts: bool) -> f64 {
    let floor = usize::from(floor_counts);
    let g = |m: usize| digamma_count(m.max(floor) + 1);
    (digamma_count(k) + digamma_count(n)) - (g(c.xz_strict) + g(c.yz_strict))
}

/// Estimates from precomputed counts, so several estimators can share one
/// neighbor search on the same sample.
pub fn estimate_from_counts(
    kind: EstimatorKind,
    counts: &NeighborCounts,
    params: EstimateParams,
) -> Result<EstimateResult> {
    if counts.k != params.k {
        return Err(Error::Domain(format!(
            "counts were computed for k = {}, params ask for k = {}",
            counts.k, params.k
        )));
    }
    let k = params.k;
    let xi: Vec<f64> = match kind {
        EstimatorKind::Proposed => (0..counts.n)
            .map(|i| local_xi_proposed(&counts.profile(i), k))
            .collect::<Result<_>>()?,
        EstimatorKind::Fp => counts.rows.iter().map(|c| local_xi_fp(c, k)).collect(),
        EstimatorKind::Ravk1 => counts
            .rows
            .iter()
            .map(|c| local_xi_ravk(c, k, RavkVariant::DuplicatesOnly))
            .collect(),
        EstimatorKind::Ravk2 => counts
            .rows
            .iter()
            .map(|c| local_xi_ravk(c, k, RavkVariant::Inclusive))
            .collect(),
        EstimatorKind::KsgMi => {
            if !counts.mutual_information {
                return Err(Error::InvalidRoles("the KSG estimator needs an empty z group".into()));
            }
            let ties = counts.rows.iter().any(|c| c.rho == 0.0 || c.joint > k);
            if ties {
                log::warn!("KSG applied to data with distance ties; flooring strict counts at 1");
            }
            counts.rows.iter().map(|c| local_xi_ksg(c, k, counts.n, ties)).collect()
        }
        EstimatorKind::KlEntropy => {
            return Err(Error::Domain(
                "the KL entropy estimator works on raw coordinates, not neighbor counts".into(),
            ))
        }
    };
    EstimateResult::from_local(xi, kind, params)
}

/// Runs estimator `kind`. The KL entropy estimator ignores `roles` and uses
/// every column of `ds`.
pub fn estimate(
    kind: EstimatorKind,
    ds: &Dataset,
    roles: &RoleAssignment,
    params: EstimateParams,
) -> Result<EstimateResult> {
    if kind == EstimatorKind::KlEntropy {
        return kl_entropy_result(ds, params);
    }
    if kind == EstimatorKind::KsgMi && !roles.is_mi() {
        return Err(Error::InvalidRoles("the KSG estimator needs an empty z group".into()));
    }
    let counts = neighbor_counts(ds, roles, params.k, params.strategy)?;
    estimate_from_counts(kind, &counts, params)
}

/// Proposed CMI estimate. An empty Z group gives the MI estimate.
pub fn estimate_cmi_proposed(ds: &Dataset, roles: &RoleAssignment, params: EstimateParams) -> Result<EstimateResult> {
    estimate(EstimatorKind::Proposed, ds, roles, params)
}

/// Proposed MI estimate; Z is treated as constant, so `n_z = n`.
pub fn estimate_mi_proposed(ds: &Dataset, roles: &RoleAssignment, params: EstimateParams) -> Result<EstimateResult> {
    if !roles.is_mi() {
        return Err(Error::InvalidRoles("mutual information needs an empty z group".into()));
    }
    estimate(EstimatorKind::Proposed, ds, roles, params)
}

pub fn estimate_fp(ds: &Dataset, roles: &RoleAssignment, params: EstimateParams) -> Result<EstimateResult> {
    estimate(EstimatorKind::Fp, ds, roles, params)
}

pub fn estimate_ravk(
    ds: &Dataset,
    roles: &RoleAssignment,
    params: EstimateParams,
    variant: RavkVariant,
) -> Result<EstimateResult> {
    let kind = match variant {
        RavkVariant::DuplicatesOnly => EstimatorKind::Ravk1,
        RavkVariant::Inclusive => EstimatorKind::Ravk2,
    };
    estimate(kind, ds, roles, params)
}

pub fn estimate_ksg_mi(ds: &Dataset, roles: &RoleAssignment, params: EstimateParams) -> Result<EstimateResult> {
    estimate(EstimatorKind::KsgMi, ds, roles, params)
}
