//! Seeded generators of random bi-invariant functions and instances.

use std::sync::Arc;

use rand::Rng;

use crate::gelfand::{BiInvariantFunction, DoubleCosetPartition, RealSphericalBasis};

/// Nonnegative combination of the real spherical generators, with a random
/// subset of weights set to zero so that boundary cases occur.
pub fn random_pd<R: Rng>(basis: &RealSphericalBasis, partition: &Arc<DoubleCosetPartition>, rng: &mut R) -> BiInvariantFunction<f64> {
    let weights: Vec<f64> = basis
        .functions
        .iter()
        .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..1.0) })
        .collect();
    combine(basis, partition, &weights)
}

/// Like [`random_pd`] but with one generator weight forced below `-0.05`,
/// hence certainly not positive definite.
pub fn random_non_pd<R: Rng>(basis: &RealSphericalBasis, partition: &Arc<DoubleCosetPartition>, rng: &mut R) -> BiInvariantFunction<f64> {
    let mut weights: Vec<f64> = basis.functions.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
    let bad = rng.gen_range(0..weights.len());
    weights[bad] = -rng.gen_range(0.05..1.0);
    combine(basis, partition, &weights)
}

/// Uniform random real values on classes with `f(a*) = f(a)`.
pub fn random_symmetric<R: Rng>(partition: &Arc<DoubleCosetPartition>, rng: &mut R) -> BiInvariantFunction<f64> {
    let s = partition.num_classes();
    let mut coeffs = vec![f64::NAN; s];
    for j in 0..s {
        if coeffs[j].is_nan() {
            let v = rng.gen_range(-1.0..1.0);
            coeffs[j] = v;
            coeffs[partition.inverse_class[j]] = v;
        }
    }
    BiInvariantFunction {
        partition: Arc::clone(partition),
        coeffs,
    }
}

fn combine(basis: &RealSphericalBasis, partition: &Arc<DoubleCosetPartition>, weights: &[f64]) -> BiInvariantFunction<f64> {
    let s = partition.num_classes();
    let coeffs = (0..s)
        .map(|j| weights.iter().zip(&basis.functions).map(|(w, phi)| w * phi[j]).sum())
        .collect();
    BiInvariantFunction {
        partition: Arc::clone(partition),
        coeffs,
    }
}

/// Random symmetric union of double cosets containing `K` (class 0), each
/// other class kept with probability `p`.
pub fn random_class_union<R: Rng>(partition: &DoubleCosetPartition, p: f64, with_identity: bool, rng: &mut R) -> Vec<usize> {
    let s = partition.num_classes();
    let mut keep = vec![None; s];
    keep[0] = Some(with_identity);
    for j in 1..s {
        if keep[j].is_none() {
            let k = rng.gen_bool(p);
            keep[j] = Some(k);
            keep[partition.inverse_class[j]] = Some(k);
        }
    }
    let mut members: Vec<usize> = (0..s)
        .filter(|&j| keep[j] == Some(true))
        .flat_map(|j| partition.classes[j].iter().copied())
        .collect();
    members.sort_unstable();
    members
}
