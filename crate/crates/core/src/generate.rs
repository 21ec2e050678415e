//! Seeded random instance families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CommSpeed, Instance, Platform, TaskGraph};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Consecutive layers of roughly `√n` tasks, edges only between neighbouring layers.
    Layered,
    /// One source, one sink, everything else in between.
    ForkJoin,
    /// Every pair `i < j` is an edge with probability `density`.
    RandomDag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfComm {
    /// Diagonal entries drawn like the others.
    Matrix,
    /// Local transfers are free.
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Zero,
    Uniform,
    /// Adds a unit-demand dummy sink of weight one fed by every sink with
    /// zero data; all other weights are zero.
    SinkOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub demand_range: (f64, f64),
    pub speed_range: (f64, f64),
    pub comm_range: (f64, f64),
    pub data_range: (f64, f64),
    pub self_comm: SelfComm,
    pub weights: WeightMode,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            family: Family::RandomDag,
            n: 10,
            m: 3,
            density: 0.3,
            demand_range: (1.0, 10.0),
            speed_range: (1.0, 4.0),
            comm_range: (0.5, 4.0),
            data_range: (0.0, 5.0),
            self_comm: SelfComm::Infinite,
            weights: WeightMode::Zero,
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Generator("n and m must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::Generator(format!("density {} outside [0, 1]", self.density)));
        }
        for (name, (lo, hi)) in [
            ("demand", self.demand_range),
            ("speed", self.speed_range),
            ("comm", self.comm_range),
        ] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::Generator(format!("{name} range [{lo}, {hi}] must be positive and ordered")));
            }
        }
        let (lo, hi) = self.data_range;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Generator(format!("data range [{lo}, {hi}] must be nonnegative and ordered")));
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn structure(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let n = spec.n;
    let mut edges = Vec::new();
    match spec.family {
        Family::Layered => {
            let width = ((n as f64).sqrt().round() as usize).max(1);
            let layer = |j: usize| j / width;
            for a in 0..n {
                for b in a + 1..n {
                    if layer(b) == layer(a) + 1 && rng.gen_bool(spec.density) {
                        edges.push((a, b));
                    }
                }
            }
        }
        Family::ForkJoin => {
            if n == 2 {
                edges.push((0, 1));
            }
            for mid in 1..n.saturating_sub(1) {
                edges.push((0, mid));
                edges.push((mid, n - 1));
            }
        }
        Family::RandomDag => {
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(spec.density) {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    edges
}

pub fn generate_instance<T: Scalar>(spec: &GeneratorSpec) -> Result<Instance<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let lit = T::lit;
    let shape = structure(spec, &mut rng);
    let mut demands: Vec<T> = (0..spec.n).map(|_| lit(draw(&mut rng, spec.demand_range))).collect();
    let mut edges: Vec<(usize, usize, T)> = shape
        .into_iter()
        .map(|(a, b)| (a, b, lit(draw(&mut rng, spec.data_range))))
        .collect();
    let speeds: Vec<T> = (0..spec.m).map(|_| lit(draw(&mut rng, spec.speed_range))).collect();
    let comm = (0..spec.m)
        .map(|a| {
            (0..spec.m)
                .map(|b| {
                    if a == b && spec.self_comm == SelfComm::Infinite {
                        CommSpeed::Infinite
                    } else {
                        CommSpeed::Finite(lit(draw(&mut rng, spec.comm_range)))
                    }
                })
                .collect()
        })
        .collect();
    let weights: Vec<T> = match spec.weights {
        WeightMode::Zero => vec![T::zero(); spec.n],
        WeightMode::Uniform => (0..spec.n).map(|_| lit(rng.gen_range(0.0..=1.0))).collect(),
        WeightMode::SinkOnly => {
            let dummy = spec.n;
            let mut has_succ = vec![false; spec.n];
            for &(a, _, _) in &edges {
                has_succ[a] = true;
            }
            for j in (0..spec.n).filter(|&j| !has_succ[j]) {
                edges.push((j, dummy, T::zero()));
            }
            demands.push(T::one());
            let mut w = vec![T::zero(); spec.n];
            w.push(T::one());
            w
        }
    };
    let graph = TaskGraph::from_demands(&demands, &edges).with_weights(&weights);
    Instance::new(graph, Platform::with_matrix(&speeds, comm))
}
