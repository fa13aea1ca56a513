//! Seeded random instance generation, shared by the benchmark command and
//! the test suites.

use crate::model::LpInstance;
use crate::reduction::MechanismInstance;
use rand::Rng;
use rand_distr::StandardNormal;

/// How the budget weights of a random LP instance are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightModel {
    /// i.i.d. uniform in (0.1, 10).
    Uniform,
    /// Weights produced by reducing a random mechanism over the same types.
    Mechanism,
}

/// Sorted absolute-normal draws rescaled into [0.1, 10].
pub fn random_types<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            let v: f64 = rng.sample(StandardNormal);
            v.abs()
        })
        .collect();
    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut q: Vec<f64> = if hi > lo {
        raw.iter()
            .map(|&v| 0.1 + (10.0 - 0.1) * (v - lo) / (hi - lo))
            .collect()
    } else {
        vec![5.05; n]
    };
    q.sort_by(|a, b| a.partial_cmp(b).unwrap());
    q
}

/// Random mechanism with a budget that never exceeds the saturation cost of
/// its LP reduction.
pub fn random_mechanism<R: Rng>(rng: &mut R, n: usize) -> MechanismInstance {
    let q = random_types(rng, n);
    let cost = rng.random_range(0.5..2.0);
    let probe = MechanismInstance::new(&q, 1.0, 1.0).expect("generated types are valid");
    let saturation = probe.to_lp().saturation_cost();
    let k = rng.random_range(0.0..saturation).max(saturation * 1e-6);
    MechanismInstance::new(&q, k * cost, cost).expect("generated mechanism is valid")
}

/// Random LP instance: sorted types, weights per `model`, budget uniform in
/// (0, sum z_i q_i).
pub fn random_lp<R: Rng>(rng: &mut R, n: usize, model: WeightModel) -> LpInstance {
    let (q, z) = match model {
        WeightModel::Uniform => {
            let q = random_types(rng, n);
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
            (q, z)
        }
        WeightModel::Mechanism => {
            let mech = random_mechanism(rng, n);
            let lp = mech.to_lp();
            (lp.q().to_vec(), lp.z().to_vec())
        }
    };
    let saturation: f64 = q.iter().zip(&z).map(|(a, b)| a * b).sum();
    let k = rng.random_range(0.0..saturation).max(saturation * 1e-9);
    LpInstance::new(q, z, k).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_validate_and_are_deterministic() {
        let mut rng1 = ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        for model in [WeightModel::Uniform, WeightModel::Mechanism] {
            let a = random_lp(&mut rng1, 20, model);
            let b = random_lp(&mut rng2, 20, model);
            assert_eq!(a, b);
            assert!(a.budget() > 0.0);
            assert!(a.budget() < a.saturation_cost());
        }
    }

    #[test]
    fn types_are_sorted_and_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = random_types(&mut rng, 100);
        assert!(q.windows(2).all(|w| w[0] <= w[1]));
        assert!(q.iter().all(|&v| (0.1..=10.0).contains(&v)));
    }
}
