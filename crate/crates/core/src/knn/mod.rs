//! Mixed Chebyshev metric, k-nearest-neighbor radii and radius counts.
//!
//! Numeric coordinates contribute `|a - b|`, categorical coordinates 0 or 1,
//! and the distance is the maximum over coordinates. All counting is done at
//! the joint-space kNN radius `rho` of each row, with exact floating-point
//! comparison at the boundary.
//!
//! The free functions ([`mixed_distance`], [`knn_radius`], [`count_within`],
//! [`neighbor_profile`]) are the literal per-row definitions. The batch entry
//! points ([`neighbor_counts`], [`batch_profiles`]) run either a brute-force
//! scan or a kd-tree and agree with the per-row definitions exactly.

mod kdtree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Column, Dataset, RoleAssignment};
use crate::error::{Error, Result};

use self::kdtree::KdTree;

/// Rows at or above this size use the kd-tree under [`SearchStrategy::Auto`].
pub const AUTO_TREE_MIN_ROWS: usize = 256;

/// Boundary rule for radius counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountMode {
    /// `dist <= r`
    Inclusive,
    /// `dist < r`
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    #[default]
    Auto,
    BruteForce,
    KdTree,
}

impl SearchStrategy {
    fn use_tree(self, n: usize) -> bool {
        match self {
            SearchStrategy::Auto => n >= AUTO_TREE_MIN_ROWS,
            SearchStrategy::BruteForce => false,
            SearchStrategy::KdTree => true,
        }
    }
}

/// Neighborhood summary of one row at its joint-space kNN radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborProfile {
    /// Distance to the k-th nearest other row in the joint space.
    pub rho: f64,
    /// Rows within `rho` in the joint space (at least `k`, more under ties).
    pub tilde_k: usize,
    pub n_xz: usize,
    pub n_yz: usize,
    /// Rows within `rho` in the Z space; fixed to `n` when Z is empty.
    pub n_z: usize,
}

impl NeighborProfile {
    /// Checks `k <= tilde_k <= n_xz, n_yz <= n_z`.
    pub fn check_chain(&self, k: usize) -> Result<()> {
        let ok = k <= self.tilde_k
            && self.tilde_k <= self.n_xz.min(self.n_yz)
            && self.n_xz.max(self.n_yz) <= self.n_z;
        if ok {
            Ok(())
        } else {
            Err(Error::ChainInvariant(format!("k = {k}, profile = {self:?}")))
        }
    }
}

/// Every count the estimators need for one row, taken at the row's radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowCounts {
    pub rho: f64,
    /// Inclusive count in the joint space.
    pub joint: usize,
    pub xz: usize,
    pub yz: usize,
    /// Inclusive Z count under `j != i` counting (`n - 1` when Z is empty).
    pub z: usize,
    pub xz_strict: usize,
    pub yz_strict: usize,
    pub z_strict: usize,
}

/// Row counts for a whole dataset under one role assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborCounts {
    pub n: usize,
    pub k: usize,
    pub mutual_information: bool,
    pub rows: Vec<RowCounts>,
}

impl NeighborCounts {
    pub fn profile(&self, i: usize) -> NeighborProfile {
        let r = &self.rows[i];
        NeighborProfile {
            rho: r.rho,
            tilde_k: r.joint,
            n_xz: r.xz,
            n_yz: r.yz,
            // Z constant: every row counts, including i itself
            n_z: if self.mutual_information { self.n } else { r.z },
        }
    }

    pub fn profiles(&self) -> Vec<NeighborProfile> {
        (0..self.n).map(|i| self.profile(i)).collect()
    }
}

/// Chebyshev distance between rows `i` and `j` over all columns of `ds`.
pub fn mixed_distance(ds: &Dataset, i: usize, j: usize) -> f64 {
    ds.columns().fold(0.0, |m, c| m.max(c.coord_distance(i, j)))
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k + 1 > n {
        return Err(Error::InvalidK { k, n });
    }
    Ok(())
}

/// The `k`-th smallest distance from row `i` to the other rows.
pub fn knn_radius(ds: &Dataset, i: usize, k: usize) -> Result<f64> {
    let n = ds.n_rows();
    check_k(k, n)?;
    let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| mixed_distance(ds, i, j)).collect();
    let (_, kth, _) = d.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(*kth)
}

/// Number of rows `j != i` with `dist(i, j) <= r` (inclusive) or `< r` (strict).
pub fn count_within(ds: &Dataset, i: usize, r: f64, mode: CountMode) -> usize {
    (0..ds.n_rows())
        .filter(|&j| j != i)
        .filter(|&j| {
            let d = mixed_distance(ds, i, j);
            match mode {
                CountMode::Inclusive => d <= r,
                CountMode::Strict => d < r,
            }
        })
        .count()
}

/// Profile of row `i`, computed directly from projections.
pub fn neighbor_profile(ds: &Dataset, roles: &RoleAssignment, i: usize, k: usize) -> Result<NeighborProfile> {
    let joint = ds.project(&roles.joint())?;
    let rho = knn_radius(&joint, i, k)?;
    let n_z = if roles.is_mi() {
        ds.n_rows()
    } else {
        count_within(&ds.project(roles.z())?, i, rho, CountMode::Inclusive)
    };
    Ok(NeighborProfile {
        rho,
        tilde_k: count_within(&joint, i, rho, CountMode::Inclusive),
        n_xz: count_within(&ds.project(&roles.xz())?, i, rho, CountMode::Inclusive),
        n_yz: count_within(&ds.project(&roles.yz())?, i, rho, CountMode::Inclusive),
        n_z,
    })
}

/// [`neighbor_profile`] for every row.
pub fn batch_profiles(
    ds: &Dataset,
    roles: &RoleAssignment,
    k: usize,
    strategy: SearchStrategy,
) -> Result<Vec<NeighborProfile>> {
    Ok(neighbor_counts(ds, roles, k, strategy)?.profiles())
}

/// All inclusive and strict counts for every row. Rows are evaluated in
/// parallel; the output is in row order.
pub fn neighbor_counts(
    ds: &Dataset,
    roles: &RoleAssignment,
    k: usize,
    strategy: SearchStrategy,
) -> Result<NeighborCounts> {
    let n = ds.n_rows();
    check_k(k, n)?;
    // validates the role indices against this dataset
    RoleAssignment::new(roles.x().to_vec(), roles.y().to_vec(), roles.z().to_vec(), ds.n_cols())?;

    let rows = if strategy.use_tree(n) {
        tree_counts(ds, roles, k)?
    } else {
        brute_counts(ds, roles, k)
    };
    Ok(NeighborCounts {
        n,
        k,
        mutual_information: roles.is_mi(),
        rows,
    })
}

fn group_distance(cols: &[&Column], i: usize, j: usize) -> f64 {
    cols.iter().fold(0.0, |m, c| m.max(c.coord_distance(i, j)))
}

struct Scratch {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    joint: Vec<f64>,
}

fn brute_counts(ds: &Dataset, roles: &RoleAssignment, k: usize) -> Vec<RowCounts> {
    let n = ds.n_rows();
    let group = |idx: &[usize]| idx.iter().map(|&c| ds.column(c)).collect::<Vec<_>>();
    let (xs, ys, zs) = (group(roles.x()), group(roles.y()), group(roles.z()));

    (0..n)
        .into_par_iter()
        .map_init(
            || Scratch {
                dx: vec![0.0; n],
                dy: vec![0.0; n],
                dz: vec![0.0; n],
                joint: Vec::with_capacity(n),
            },
            |s, i| {
                s.joint.clear();
                for j in 0..n {
                    s.dx[j] = group_distance(&xs, i, j);
                    s.dy[j] = group_distance(&ys, i, j);
                    s.dz[j] = group_distance(&zs, i, j);
                    if j != i {
                        s.joint.push(s.dx[j].max(s.dy[j]).max(s.dz[j]));
                    }
                }
                let (_, kth, _) = s.joint.select_nth_unstable_by(k - 1, f64::total_cmp);
                let rho = *kth;

                let mut c = RowCounts {
                    rho,
                    joint: 0,
                    xz: 0,
                    yz: 0,
                    z: 0,
                    xz_strict: 0,
                    yz_strict: 0,
                    z_strict: 0,
                };
                for j in (0..n).filter(|&j| j != i) {
                    let xz = s.dx[j].max(s.dz[j]);
                    let yz = s.dy[j].max(s.dz[j]);
                    let z = s.dz[j];
                    let joint = xz.max(s.dy[j]);
                    c.joint += usize::from(joint <= rho);
                    c.xz += usize::from(xz <= rho);
                    c.yz += usize::from(yz <= rho);
                    c.z += usize::from(z <= rho);
                    c.xz_strict += usize::from(xz < rho);
                    c.yz_strict += usize::from(yz < rho);
                    c.z_strict += usize::from(z < rho);
                }
                c
            },
        )
        .collect()
}

fn tree_counts(ds: &Dataset, roles: &RoleAssignment, k: usize) -> Result<Vec<RowCounts>> {
    let n = ds.n_rows();
    let joint = KdTree::build(&ds.project(&roles.joint())?);
    let xz = KdTree::build(&ds.project(&roles.xz())?);
    let yz = KdTree::build(&ds.project(&roles.yz())?);
    let z = if roles.is_mi() {
        None
    } else {
        Some(KdTree::build(&ds.project(roles.z())?))
    };

    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let rho = joint.kth_distance(i, k);
            // an empty Z space puts every row at distance 0
            let (z_in, z_lt) = match &z {
                Some(t) => (
                    t.count_within(i, rho, CountMode::Inclusive),
                    t.count_within(i, rho, CountMode::Strict),
                ),
                None => (n - 1, if rho > 0.0 { n - 1 } else { 0 }),
            };
            RowCounts {
                rho,
                joint: joint.count_within(i, rho, CountMode::Inclusive),
                xz: xz.count_within(i, rho, CountMode::Inclusive),
                yz: yz.count_within(i, rho, CountMode::Inclusive),
                z: z_in,
                xz_strict: xz.count_within(i, rho, CountMode::Strict),
                yz_strict: yz.count_within(i, rho, CountMode::Strict),
                z_strict: z_lt,
            }
        })
        .collect())
}
