//! Seeded generators for the four benchmark scenarios and their analytic
//! conditional mutual information.
//!
//! Every generator draws from a `ChaCha8Rng` seeded with the `ScenarioSpec` seed, so
//! the same `(scenario, n, seed)` always gives the same dataset. Columns are
//! named `x`, `y`, `z` and the returned roles map them to X, Y and Z.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Exp, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::data::{Column, ColumnKind, Dataset, RoleAssignment};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// `X ~ Exp(mean 10)`, `Z ~ Poisson(X)`, `Y ~ Binomial(Z, 1/2)`.
    EggChain,
    /// `X ~ Uniform{0, 1, 2}`, `Y ~ Uniform(X, X + 2)`, `Z ~ Binomial(3, 1/2)`.
    DiscUnifCont,
    /// Four-point `(X, Y)` mass, `Z ~ Poisson(2)`.
    FourPointDiscrete,
    /// Half correlated Gaussian, half four-point mass; `Z ~ Binomial(3, 0.2)`.
    GaussDiscreteMixture,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::EggChain,
        Scenario::DiscUnifCont,
        Scenario::FourPointDiscrete,
        Scenario::GaussDiscreteMixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::EggChain => "egg_chain",
            Scenario::DiscUnifCont => "disc_unif_cont",
            Scenario::FourPointDiscrete => "four_point_discrete",
            Scenario::GaussDiscreteMixture => "gauss_discrete_mixture",
        }
    }

    /// Stable small integer used in seed derivation.
    pub fn code(self) -> u64 {
        match self {
            Scenario::EggChain => 1,
            Scenario::DiscUnifCont => 2,
            Scenario::FourPointDiscrete => 3,
            Scenario::GaussDiscreteMixture => 4,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "egg_chain" | "eggchain" | "sim1" | "1" => Ok(Scenario::EggChain),
            "disc_unif_cont" | "discunifcont" | "sim2" | "2" => Ok(Scenario::DiscUnifCont),
            "four_point_discrete" | "fourpointdiscrete" | "sim3" | "3" => Ok(Scenario::FourPointDiscrete),
            "gauss_discrete_mixture" | "gaussdiscretemixture" | "sim4" | "4" => Ok(Scenario::GaussDiscreteMixture),
            _ => Err(Error::Domain(format!("unknown scenario {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: Scenario,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTruth {
    /// I(X;Y|Z) in nats.
    pub value: f64,
    pub formula: String,
}

const FOUR_POINT: [((f64, f64), f64); 4] = [((1.0, 1.0), 0.4), ((-1.0, -1.0), 0.4), ((1.0, -1.0), 0.1), ((-1.0, 1.0), 0.1)];
const MIXTURE_CORRELATION: f64 = 0.8;

fn four_point_draw(rng: &mut impl Rng) -> (f64, f64) {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (point, mass) in FOUR_POINT {
        acc += mass;
        if u < acc {
            return point;
        }
    }
    FOUR_POINT[3].0
}

fn poisson(rng: &mut impl Rng, mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean).expect("finite positive Poisson mean").sample(rng)
}

fn binomial(rng: &mut impl Rng, trials: u64, p: f64) -> f64 {
    Binomial::new(trials, p).expect("valid binomial").sample(rng) as f64
}

/// Draws `spec.n` rows of the scenario.
pub fn generate(spec: &ScenarioSpec) -> Result<(Dataset, RoleAssignment)> {
    if spec.n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let (mut xs, mut ys, mut zs) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));

    let kinds = match spec.id {
        Scenario::EggChain => {
            let rate = Exp::new(0.1).unwrap();
            for _ in 0..n {
                let x: f64 = rate.sample(&mut rng);
                let z = poisson(&mut rng, x);
                let y = binomial(&mut rng, z as u64, 0.5);
                xs.push(x);
                ys.push(y);
                zs.push(z);
            }
            [ColumnKind::Continuous, ColumnKind::DiscreteNumeric, ColumnKind::DiscreteNumeric]
        }
        Scenario::DiscUnifCont => {
            for _ in 0..n {
                let x = rng.random_range(0..3u32) as f64;
                let y = x + 2.0 * rng.random::<f64>();
                let z = binomial(&mut rng, 3, 0.5);
                xs.push(x);
                ys.push(y);
                zs.push(z);
            }
            [ColumnKind::DiscreteNumeric, ColumnKind::Continuous, ColumnKind::DiscreteNumeric]
        }
        Scenario::FourPointDiscrete => {
            for _ in 0..n {
                let (x, y) = four_point_draw(&mut rng);
                xs.push(x);
                ys.push(y);
                zs.push(poisson(&mut rng, 2.0));
            }
            [ColumnKind::DiscreteNumeric, ColumnKind::DiscreteNumeric, ColumnKind::DiscreteNumeric]
        }
        Scenario::GaussDiscreteMixture => {
            let std = Normal::new(0.0, 1.0).unwrap();
            let r = MIXTURE_CORRELATION;
            let resid = (1.0 - r * r).sqrt();
            for _ in 0..n {
                let (x, y) = if rng.random_bool(0.5) {
                    let a: f64 = std.sample(&mut rng);
                    let b: f64 = std.sample(&mut rng);
                    (a, r * a + resid * b)
                } else {
                    four_point_draw(&mut rng)
                };
                xs.push(x);
                ys.push(y);
                zs.push(binomial(&mut rng, 3, 0.2));
            }
            [ColumnKind::Continuous, ColumnKind::Continuous, ColumnKind::DiscreteNumeric]
        }
    };

    let ds = Dataset::from_columns(vec![
        Column::numeric("x", kinds[0], xs)?,
        Column::numeric("y", kinds[1], ys)?,
        Column::numeric("z", kinds[2], zs)?,
    ])?;
    let roles = RoleAssignment::new(vec![0], vec![1], vec![2], 3)?;
    Ok((ds, roles))
}

/// Closed-form I(X;Y|Z) of the scenario, in nats.
pub fn truth(id: Scenario) -> ScenarioTruth {
    let ln = f64::ln;
    let four_point = 0.8 * ln(1.6) + 0.2 * ln(0.4);
    let (value, formula) = match id {
        Scenario::EggChain => (0.0, "0 (X -> Z -> Y is a Markov chain)"),
        Scenario::DiscUnifCont => (ln(3.0) - 2.0 * ln(2.0) / 3.0, "log 3 - (2/3) log 2"),
        Scenario::FourPointDiscrete => (four_point, "0.8 log(0.4/0.5^2) + 0.2 log(0.1/0.5^2)"),
        Scenario::GaussDiscreteMixture => {
            let r2 = MIXTURE_CORRELATION * MIXTURE_CORRELATION;
            (
                0.4 * ln(2.0 * 0.4 / 0.25) + 0.1 * ln(2.0 * 0.1 / 0.25) + 0.25 * ln(4.0 / (1.0 - r2)),
                "0.4 log(2*0.4/0.5^2) + 0.1 log(2*0.1/0.5^2) + 0.25 log(4/(1 - 0.8^2))",
            )
        }
    };
    ScenarioTruth {
        value,
        formula: formula.to_string(),
    }
}

/// Synthetic families used by the invariant and acceptance suites.
pub mod synthetic {
    use super::*;
    use rand_distr::Uniform;

    fn numeric_columns(names: &[String], kind: ColumnKind, values: Vec<Vec<f64>>) -> Result<Vec<Column>> {
        names
            .iter()
            .zip(values)
            .map(|(name, v)| Column::numeric(name.clone(), kind, v))
            .collect()
    }

    /// Independent `U[0,1]` X, Y and (if `with_z`) Z.
    pub fn independent_uniform(n: usize, with_z: bool, seed: u64) -> Result<(Dataset, RoleAssignment)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = if with_z { 3 } else { 2 };
        let values: Vec<Vec<f64>> = (0..d).map(|_| (0..n).map(|_| rng.random()).collect()).collect();
        let names: Vec<String> = ["x", "y", "z"][..d].iter().map(|s| s.to_string()).collect();
        let ds = Dataset::from_columns(numeric_columns(&names, ColumnKind::Continuous, values)?)?;
        let z = if with_z { vec![2] } else { vec![] };
        Ok((ds, RoleAssignment::new(vec![0], vec![1], z, d)?))
    }

    /// Standard bivariate Gaussian with correlation `rho`; MI roles.
    pub fn gaussian_pair(n: usize, rho: f64, seed: u64) -> Result<(Dataset, RoleAssignment)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let std = Normal::new(0.0, 1.0).unwrap();
        let resid = (1.0 - rho * rho).sqrt();
        let (mut xs, mut ys) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let a: f64 = std.sample(&mut rng);
            let b: f64 = std.sample(&mut rng);
            xs.push(a);
            ys.push(rho * a + resid * b);
        }
        let ds = Dataset::from_columns(vec![
            Column::numeric("x", ColumnKind::Continuous, xs)?,
            Column::numeric("y", ColumnKind::Continuous, ys)?,
        ])?;
        Ok((ds, RoleAssignment::new(vec![0], vec![1], vec![], 2)?))
    }

    /// `n` draws from `U[0,1]^d`.
    pub fn uniform_cube(n: usize, d: usize, seed: u64) -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = Uniform::new(0.0, 1.0).unwrap();
        let values = (0..d).map(|_| (0..n).map(|_| u.sample(&mut rng)).collect()).collect();
        let names: Vec<String> = (0..d).map(|c| format!("u{c}")).collect();
        Dataset::from_columns(numeric_columns(&names, ColumnKind::Continuous, values)?)
    }

    /// `n` draws from `N(0, sigma^2)` in one column.
    pub fn gaussian(n: usize, sigma: f64, seed: u64) -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::Domain(e.to_string()))?;
        let values = (0..n).map(|_| normal.sample(&mut rng)).collect();
        Dataset::from_columns(vec![Column::numeric("g", ColumnKind::Continuous, values)?])
    }

    /// Random mixed-type data with ties: each column is continuous, rounded
    /// continuous, small-integer discrete or categorical, and the X/Y/Z
    /// groups get 1-2, 1-2 and 0-2 columns.
    pub fn random_mixed(n: usize, seed: u64) -> Result<(Dataset, RoleAssignment)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes = [rng.random_range(1..=2), rng.random_range(1..=2), rng.random_range(0..=2)];
        let total: usize = sizes.iter().sum();
        let mut cols = Vec::with_capacity(total);
        for c in 0..total {
            let name = format!("c{c}");
            let col = match rng.random_range(0..4) {
                0 => Column::numeric(name, ColumnKind::Continuous, (0..n).map(|_| rng.random()).collect())?,
                1 => {
                    let v = (0..n).map(|_| (rng.random::<f64>() * 10.0).round() / 10.0).collect();
                    Column::numeric(name, ColumnKind::Continuous, v)?
                }
                2 => {
                    let v = (0..n).map(|_| f64::from(rng.random_range(0..5u8))).collect();
                    Column::numeric(name, ColumnKind::DiscreteNumeric, v)?
                }
                _ => {
                    let m = rng.random_range(1..=3u8);
                    let v: Vec<String> = (0..n).map(|_| char::from(b'a' + rng.random_range(0..m)).to_string()).collect();
                    Column::categorical(name, &v)?
                }
            };
            cols.push(col);
        }
        let ds = Dataset::from_columns(cols)?;
        let x = (0..sizes[0]).collect();
        let y = (sizes[0]..sizes[0] + sizes[1]).collect();
        let z = (sizes[0] + sizes[1]..total).collect();
        Ok((ds, RoleAssignment::new(x, y, z, total)?))
    }

    /// Fully categorical data: `cols` columns, each with an alphabet of at most
    /// `max_alphabet` symbols.
    pub fn random_categorical(n: usize, cols: usize, max_alphabet: u8, seed: u64) -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let columns = (0..cols)
            .map(|c| {
                let m = rng.random_range(1..=max_alphabet.max(1));
                let v: Vec<String> = (0..n).map(|_| char::from(b'a' + rng.random_range(0..m)).to_string()).collect();
                Column::categorical(format!("c{c}"), &v)
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::from_columns(columns)
    }

    /// Dependent `X ~ U[0,1]`, `Y = X + N(0, 0.1^2)` conditioned on `d`
    /// independent Bernoulli(1/2) coordinates `z0..z{d-1}`.
    pub fn binary_noise_conditioning(n: usize, d: usize, seed: u64) -> Result<(Dataset, RoleAssignment)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.1).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x + noise.sample(&mut rng)).collect();
        let mut cols = vec![
            Column::numeric("x", ColumnKind::Continuous, xs)?,
            Column::numeric("y", ColumnKind::Continuous, ys)?,
        ];
        for c in 0..d {
            let bits = (0..n).map(|_| f64::from(u8::from(rng.random_bool(0.5)))).collect();
            cols.push(Column::numeric(format!("z{c}"), ColumnKind::DiscreteNumeric, bits)?);
        }
        let ds = Dataset::from_columns(cols)?;
        Ok((ds, RoleAssignment::new(vec![0], vec![1], (2..2 + d).collect(), 2 + d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ColumnData;

    fn numeric(ds: &Dataset, col: usize) -> &[f64] {
        match ds.column(col).data() {
            ColumnData::Numeric(v) => v,
            _ => panic!("numeric column expected"),
        }
    }

    #[test]
    fn egg_chain_moments_and_structure() {
        let (ds, roles) = generate(&ScenarioSpec {
            id: Scenario::EggChain,
            n: 100_000,
            seed: 3,
        })
        .unwrap();
        assert_eq!(roles.z(), &[2]);
        let x = numeric(&ds, 0);
        let mean_x = x.iter().sum::<f64>() / x.len() as f64;
        assert!((mean_x - 10.0).abs() / 10.0 < 0.02, "{mean_x}");
        let (y, z) = (numeric(&ds, 1), numeric(&ds, 2));
        assert!(y.iter().zip(z).all(|(y, z)| y <= z && y.fract() == 0.0 && z.fract() == 0.0));
    }

    #[test]
    fn four_point_masses() {
        let (ds, _) = generate(&ScenarioSpec {
            id: Scenario::FourPointDiscrete,
            n: 100_000,
            seed: 5,
        })
        .unwrap();
        let (x, y) = (numeric(&ds, 0), numeric(&ds, 1));
        assert!(x.iter().chain(y).all(|v| v.abs() == 1.0));
        let both_one = x.iter().zip(y).filter(|(a, b)| **a == 1.0 && **b == 1.0).count();
        assert!((both_one as f64 / 1e5 - 0.4).abs() < 0.01);
    }

    #[test]
    fn disc_unif_cont_support() {
        let (ds, _) = generate(&ScenarioSpec {
            id: Scenario::DiscUnifCont,
            n: 5000,
            seed: 8,
        })
        .unwrap();
        let (x, y) = (numeric(&ds, 0), numeric(&ds, 1));
        assert!(x.iter().all(|v| [0.0, 1.0, 2.0].contains(v)));
        assert!(x.iter().zip(y).all(|(x, y)| *x <= *y && *y <= x + 2.0));
        assert!(numeric(&ds, 2).iter().all(|z| (0.0..=3.0).contains(z)));
    }

    #[test]
    fn mixture_balance() {
        let n = 10_000;
        let (ds, _) = generate(&ScenarioSpec {
            id: Scenario::GaussDiscreteMixture,
            n,
            seed: 13,
        })
        .unwrap();
        let (x, y) = (numeric(&ds, 0), numeric(&ds, 1));
        let discrete = x.iter().zip(y).filter(|(a, b)| a.abs() == 1.0 && b.abs() == 1.0).count();
        let frac = discrete as f64 / n as f64;
        let se = (0.25 / n as f64).sqrt();
        assert!((frac - 0.5).abs() <= 3.0 * se, "{frac}");
    }

    #[test]
    fn same_seed_same_data() {
        for id in Scenario::ALL {
            let spec = ScenarioSpec { id, n: 50, seed: 99 };
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
            let other = ScenarioSpec { seed: 100, ..spec };
            assert_ne!(generate(&spec).unwrap().0, generate(&other).unwrap().0);
        }
    }

    #[test]
    fn four_point_truth_matches_plug_in() {
        // exhaustive sum over the support; Z is independent so I(X;Y|Z) = I(X;Y)
        let px = |x: f64| FOUR_POINT.iter().filter(|((a, _), _)| *a == x).map(|(_, m)| m).sum::<f64>();
        let py = |y: f64| FOUR_POINT.iter().filter(|((_, b), _)| *b == y).map(|(_, m)| m).sum::<f64>();
        let plug_in: f64 = FOUR_POINT.iter().map(|((x, y), m)| m * (m / (px(*x) * py(*y))).ln()).sum();
        assert!((truth(Scenario::FourPointDiscrete).value - plug_in).abs() < 1e-12);
        assert!((plug_in - 0.192_745).abs() < 1e-6);
    }

    #[test]
    fn disc_unif_cont_truth_matches_entropy_difference() {
        // h(Y) from the piecewise-constant density of a 3-component uniform
        // mixture on [0,4]; h(Y|X) = log 2.
        let density = |y: f64| (0..3).filter(|&x| (x as f64) <= y && y <= x as f64 + 2.0).count() as f64 / 6.0;
        let h_y: f64 = (0..4)
            .map(|seg| {
                let f = density(seg as f64 + 0.5);
                -f * f.ln()
            })
            .sum();
        let oracle = h_y - 2f64.ln();
        assert!((truth(Scenario::DiscUnifCont).value - oracle).abs() < 1e-12);
    }

    #[test]
    fn mixture_truth_matches_decomposition() {
        // Q = component indicator is a function of X: I = H(Q) + (I_discrete + I_gauss) / 2
        let i_gauss = -0.5 * (1.0 - 0.64f64).ln();
        let oracle = 2f64.ln() + 0.5 * truth(Scenario::FourPointDiscrete).value + 0.5 * i_gauss;
        assert!((truth(Scenario::GaussDiscreteMixture).value - oracle).abs() < 1e-12);
        assert_eq!(truth(Scenario::EggChain).value, 0.0);
    }

    #[test]
    fn scenario_names_parse() {
        for id in Scenario::ALL {
            assert_eq!(id.name().parse::<Scenario>().unwrap(), id);
        }
        assert!("sim9".parse::<Scenario>().is_err());
    }
}
