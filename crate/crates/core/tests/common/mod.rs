#![allow(dead_code)]

use getf_core::generate::{generate_instance, Family, GeneratorSpec, SelfComm, WeightMode};
use getf_core::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape of a random ensemble.
#[derive(Clone, Copy, Debug)]
pub struct Ensemble {
    pub n: (usize, usize),
    pub m: (usize, usize),
    pub identical: bool,
    pub with_comm: bool,
    pub weights: &'static [WeightMode],
}

impl Ensemble {
    pub fn new(n: (usize, usize), m: (usize, usize)) -> Self {
        Ensemble {
            n,
            m,
            identical: false,
            with_comm: true,
            weights: &[WeightMode::Zero],
        }
    }

    pub fn spec(&self, master_seed: u64, index: u64) -> GeneratorSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let family = [Family::Layered, Family::ForkJoin, Family::RandomDag][rng.gen_range(0..3)];
        let speed_hi = if self.identical { 1.0 } else { [1.0, 2.0, 8.0, 32.0][rng.gen_range(0..4)] };
        let comm_lo = rng.gen_range(0.2..2.0);
        GeneratorSpec {
            family,
            n: rng.gen_range(self.n.0..=self.n.1),
            m: rng.gen_range(self.m.0..=self.m.1),
            density: rng.gen_range(0.05..0.6),
            demand_range: (rng.gen_range(0.5..2.0), rng.gen_range(2.0..20.0)),
            speed_range: (1.0, speed_hi),
            comm_range: (comm_lo, comm_lo * rng.gen_range(1.0..10.0)),
            data_range: if self.with_comm { (0.0, rng.gen_range(0.5..10.0)) } else { (0.0, 0.0) },
            self_comm: if rng.gen_bool(0.5) { SelfComm::Matrix } else { SelfComm::Infinite },
            weights: self.weights[rng.gen_range(0..self.weights.len())],
            seed: rng.gen(),
        }
    }

    pub fn instance(&self, master_seed: u64, index: u64) -> Instance {
        let inst: Instance = generate_instance(&self.spec(master_seed, index)).expect("ensemble spec is valid");
        if self.with_comm {
            inst
        } else {
            inst.without_communication()
        }
    }
}
