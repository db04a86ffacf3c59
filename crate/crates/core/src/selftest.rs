//! Fast internal consistency checks, run by the `selftest` subcommand.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, MixedValue, RoleAssignment};
use crate::error::Result;
use crate::estimators::{estimate, EstimateParams, EstimatorKind};
use crate::knn::{knn_radius, neighbor_counts, SearchStrategy};
use crate::numerics::{digamma, mean};
use crate::simulators::synthetic;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Digamma<'a> = &'a dyn Fn(f64) -> Result<f64>;

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn check_digamma_values(psi: Digamma) -> Result<(bool, String)> {
    let mut worst = (0.0_f64, 0.0_f64);
    let mut harmonic = 0.0;
    for n in 1..=60u32 {
        let err = (psi(f64::from(n))? - (harmonic - EULER_GAMMA)).abs();
        if err > worst.0 {
            worst = (err, f64::from(n));
        }
        harmonic += 1.0 / f64::from(n);
    }
    let half = (psi(0.5)? - (-EULER_GAMMA - 2.0 * std::f64::consts::LN_2)).abs();
    if half > worst.0 {
        worst = (half, 0.5);
    }
    Ok((worst.0 < 1e-12, format!("max error {:.2e} at x = {}", worst.0, worst.1)))
}

fn check_digamma_recurrence(psi: Digamma) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    let mut bound_ok = true;
    for i in 1..400 {
        let x = 0.05 * f64::from(i);
        worst = worst.max((psi(x + 1.0)? - psi(x)? - 1.0 / x).abs());
        let p = psi(x)?;
        bound_ok &= x.ln() - 1.0 / x <= p && p <= x.ln();
    }
    Ok((
        worst < 1e-10 && bound_ok,
        format!("max recurrence error {worst:.2e}; log bounds hold: {bound_ok}"),
    ))
}

/// Mass of the Chebyshev ball of radius `r` around `p`, clipped to the unit cube.
fn clipped_cube_mass(p: &[f64], r: f64) -> f64 {
    p.iter().map(|&c| (c + r).min(1.0) - (c - r).max(0.0)).product()
}

fn check_ball_mass_identity(psi: Digamma) -> Result<(bool, String)> {
    let (n, k, draws) = (300, 3, 40);
    let mut per_draw = Vec::with_capacity(draws);
    for seed in 0..draws as u64 {
        let ds = synthetic::uniform_cube(n, 2, 0x5e1f ^ seed)?;
        let logs = (0..n)
            .map(|i| {
                let rho = knn_radius(&ds, i, k)?;
                let p: Vec<f64> = (0..2).map(|c| numeric_cell(&ds, i, c)).collect();
                Ok(clipped_cube_mass(&p, rho).ln())
            })
            .collect::<Result<Vec<f64>>>()?;
        per_draw.push(mean(&logs)?);
    }
    let observed = mean(&per_draw)?;
    let expected = psi(k as f64)? - psi(n as f64)?;
    let ok = (observed - expected).abs() <= 0.03;
    Ok((ok, format!("mean log mass {observed:.4}, psi(k) - psi(n) = {expected:.4}")))
}

fn numeric_cell(ds: &Dataset, row: usize, col: usize) -> f64 {
    match ds.value(row, col) {
        MixedValue::Numeric(v) => v,
        MixedValue::Symbol(_) => f64::NAN,
    }
}

fn check_tree_matches_brute_force() -> Result<(bool, String)> {
    let mut mismatches = 0;
    for seed in 0..20 {
        let (ds, roles) = synthetic::random_mixed(250, 0x7ee ^ seed)?;
        for k in [1, 4] {
            let brute = neighbor_counts(&ds, &roles, k, SearchStrategy::BruteForce)?;
            let tree = neighbor_counts(&ds, &roles, k, SearchStrategy::KdTree)?;
            mismatches += usize::from(brute != tree);
        }
    }
    Ok((mismatches == 0, format!("{mismatches} of 40 datasets differ")))
}

fn check_symmetry_and_permutation() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a11);
    let mut worst_perm = 0.0_f64;
    let mut asymmetric = 0;
    for seed in 0..10 {
        let (ds, roles) = synthetic::random_mixed(150, 0x9e ^ seed)?;
        let params = EstimateParams::default().unclamped();
        for kind in [EstimatorKind::Proposed, EstimatorKind::Fp, EstimatorKind::Ravk1, EstimatorKind::Ravk2] {
            let base = estimate(kind, &ds, &roles, params)?.estimate;
            let swapped = estimate(kind, &ds, &roles.swapped(), params)?.estimate;
            asymmetric += usize::from(base.to_bits() != swapped.to_bits());
            let mut perm: Vec<usize> = (0..ds.n_rows()).collect();
            perm.shuffle(&mut rng);
            let permuted = estimate(kind, &ds.permute_rows(&perm)?, &roles, params)?.estimate;
            worst_perm = worst_perm.max((permuted - base).abs());
        }
    }
    Ok((
        asymmetric == 0 && worst_perm <= 1e-12,
        format!("{asymmetric} asymmetric estimates; max permutation change {worst_perm:.1e}"),
    ))
}

fn check_discrete_plug_in(psi: Digamma) -> Result<(bool, String)> {
    let k = 3;
    let mut worst = 0.0_f64;
    for seed in 0..5 {
        // four copies of every row, so each radius is 0 and each cell holds >= k + 1 rows
        let base = synthetic::random_categorical(15, 3, 3, 0xd15c ^ seed)?;
        let perm: Vec<usize> = (0..60).map(|i| i % 15).collect();
        let ds = base.take_rows(&perm)?;
        let roles = RoleAssignment::new(vec![0], vec![1], vec![2], 3)?;
        let result = estimate(EstimatorKind::Proposed, &ds, &roles, EstimateParams::with_k(k).unclamped())?;

        let key = |r: usize, cols: &[usize]| cols.iter().map(|&c| ds.value(r, c).to_string()).collect::<Vec<_>>();
        let mut tables: Vec<HashMap<Vec<String>, usize>> = vec![HashMap::new(); 4];
        let groups: [&[usize]; 4] = [&[0, 1, 2], &[0, 2], &[1, 2], &[2]];
        for r in 0..ds.n_rows() {
            for (t, cols) in tables.iter_mut().zip(groups) {
                *t.entry(key(r, cols)).or_default() += 1;
            }
        }
        for r in 0..ds.n_rows() {
            let c: Vec<f64> = tables.iter().zip(groups).map(|(t, cols)| (t[&key(r, cols)] - 1) as f64).collect();
            let oracle = if c[0] as usize == k {
                psi(c[0])? + psi(c[3])? - psi(c[1])? - psi(c[2])?
            } else {
                c[0].ln() + c[3].ln() - c[1].ln() - c[2].ln()
            };
            worst = worst.max((oracle - result.xi[r]).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max local deviation {worst:.1e}")))
}

/// Runs every check with `psi` standing in for the digamma function.
pub fn run_checks_with(psi: Digamma) -> Vec<CheckOutcome> {
    vec![
        outcome("digamma values", check_digamma_values(psi)),
        outcome("digamma recurrence and log bounds", check_digamma_recurrence(psi)),
        outcome("kNN ball mass identity", check_ball_mass_identity(psi)),
        outcome("kd-tree equals brute force", check_tree_matches_brute_force()),
        outcome("X/Y symmetry and row permutation", check_symmetry_and_permutation()),
        outcome("discrete plug-in counts", check_discrete_plug_in(psi)),
    ]
}

pub fn run_checks() -> Vec<CheckOutcome> {
    run_checks_with(&digamma)
}

/// Prints one `PASS`/`FAIL` line per check; returns true when all pass.
pub fn report<W: Write>(checks: &[CheckOutcome], mut out: W) -> std::io::Result<bool> {
    for c in checks {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    writeln!(out, "{passed}/{} checks passed", checks.len())?;
    Ok(passed == checks.len())
}
