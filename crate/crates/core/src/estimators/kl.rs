//! Kozachenko-Leonenko differential entropy.

use rayon::prelude::*;

use crate::data::{ColumnData, Dataset};
use crate::error::{Error, Result};
use crate::knn::check_k;
use crate::numerics::{digamma_count, lp_ball_log_volume_constant, mean};

use super::{EstimateParams, EstimateResult, EstimatorKind};

/// Entropy estimate of all columns of `ds` in nats:
/// `-psi(k) + psi(n) + log c_{d,p} + (d / n) sum_i log rho_{k,i,p}`.
pub fn kl_entropy(ds: &Dataset, params: EstimateParams) -> Result<f64> {
    let local = kl_local(ds, params)?;
    mean(&local)
}

/// [`kl_entropy`] with per-row contributions `-log f(x_i)`; clamping never applies.
pub fn kl_entropy_result(ds: &Dataset, params: EstimateParams) -> Result<EstimateResult> {
    let xi = kl_local(ds, params)?;
    let estimate = mean(&xi)?;
    Ok(EstimateResult {
        estimate,
        n: xi.len(),
        xi,
        clamped: false,
        kind: EstimatorKind::KlEntropy,
        params,
    })
}

fn kl_local(ds: &Dataset, params: EstimateParams) -> Result<Vec<f64>> {
    let n = ds.n_rows();
    let k = params.k;
    check_k(k, n)?;
    let p = params.p_norm;
    let d = ds.n_cols();
    let log_c = lp_ball_log_volume_constant(d, p)?;

    let mut columns = Vec::with_capacity(d);
    for col in ds.columns() {
        match col.data() {
            ColumnData::Numeric(v) => columns.push(v.as_slice()),
            ColumnData::Categorical { .. } => {
                return Err(Error::Domain(format!(
                    "KL entropy needs numeric columns; {:?} is categorical",
                    col.name()
                )))
            }
        }
    }

    let radii: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf: &mut Vec<f64>, i| {
                buf.clear();
                buf.extend((0..n).filter(|&j| j != i).map(|j| lp_distance(&columns, i, j, p)));
                let (_, kth, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
                *kth
            },
        )
        .collect();

    if let Some(i) = radii.iter().position(|&r| r <= 0.0) {
        return Err(Error::Domain(format!(
            "row {i} has {k} or more exact duplicates; the KL estimator needs a positive kNN distance"
        )));
    }

    let base = digamma_count(n) - digamma_count(k) + log_c;
    let d_f = d as f64;
    Ok(radii.iter().map(|r| base + d_f * r.ln()).collect())
}

fn lp_distance(columns: &[&[f64]], i: usize, j: usize, p: f64) -> f64 {
    if p.is_infinite() {
        columns.iter().fold(0.0, |m, c| m.max((c[i] - c[j]).abs()))
    } else {
        columns.iter().map(|c| (c[i] - c[j]).abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}
