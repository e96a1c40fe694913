//! Seeded pseudorandom problem instances.
//!
//! Every instance draws from its own ChaCha stream keyed by `(seed, index)`,
//! so results do not depend on iteration order or thread count.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bridge::Zeros;
use crate::catalog::ModelId;
use crate::params::ModelParams;

pub const DEFAULT_SEED: u64 = 0x5eed_a1f1;

/// Bounds for sampled zeros and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub param_radius: f64,
    pub zero_radius: f64,
    pub min_x1: f64,
    pub min_gap: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { param_radius: 0.5, zero_radius: 1.0, min_x1: 0.5, min_gap: 0.5 }
    }
}

pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform on the closed disk of radius `r`.
pub fn disk<R: Rng>(rng: &mut R, r: f64) -> Complex64 {
    let rho = r * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Zeros uniform on the disk, rejected until the separation bounds hold.
pub fn zeros<R: Rng>(rng: &mut R, b: &Bounds) -> Zeros<f64> {
    loop {
        let x1 = disk(rng, b.zero_radius);
        let x2 = disk(rng, b.zero_radius);
        if x1.norm() >= b.min_x1 && (x1 - x2).norm() >= b.min_gap {
            return Zeros::new(x1, x2);
        }
    }
}

pub fn params<R: Rng>(rng: &mut R, id: ModelId, b: &Bounds) -> ModelParams<Complex64> {
    ModelParams::from_pairs(id.params().iter().map(|&k| (k, disk(rng, b.param_radius))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub index: u64,
    pub params: ModelParams<Complex64>,
    pub z0: Zeros<f64>,
}

pub fn instance(id: ModelId, seed: u64, index: u64, b: &Bounds) -> Instance {
    // model-specific stream so different models do not share draws
    let mut rng = instance_rng(seed ^ ((id as u64 + 1) << 48), index);
    let params = params(&mut rng, id, b);
    let z0 = zeros(&mut rng, b);
    Instance { index, params, z0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_bounded() {
        let b = Bounds::default();
        for i in 0..200 {
            let a = instance(ModelId::A2_1, 7, i, &b);
            assert_eq!(a, instance(ModelId::A2_1, 7, i, &b));
            assert!(a.z0.x1.norm() >= 0.5 && a.z0.x1.norm() <= 1.0);
            assert!(a.z0.x2.norm() <= 1.0 && (a.z0.x1 - a.z0.x2).norm() >= 0.5);
            for (_, v) in a.params.assigned() {
                assert!(v.norm() <= 0.5);
            }
            assert_eq!(a.params.assigned().count(), ModelId::A2_1.params().len());
        }
        assert_ne!(instance(ModelId::A1_1, 7, 0, &b), instance(ModelId::A1_1, 8, 0, &b));
        assert_ne!(instance(ModelId::A1_1, 7, 0, &b).z0, instance(ModelId::A1_1, 7, 1, &b).z0);
    }
}
