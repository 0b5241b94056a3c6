//! Shared fixtures for unit tests: seeded random states and directions.

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::c64;
use crate::state::{average_density, DensityMatrix, PureState, UnitVector3};

/// Standard-normal draw (Box–Muller); statistical quality is ample for
/// test fixtures.
pub(crate) fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random::<f64>().max(1e-12);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Uniform direction on the unit sphere.
pub(crate) fn random_unit(rng: &mut ChaCha8Rng) -> UnitVector3 {
    loop {
        let v = Vector3::new(gauss(rng), gauss(rng), gauss(rng));
        if v.norm() > 1e-6 {
            return UnitVector3::normalized(v.x, v.y, v.z).unwrap();
        }
    }
}

/// Haar-ish random pure state (normalized complex Gaussian amplitudes).
pub(crate) fn random_pure(rng: &mut ChaCha8Rng) -> PureState {
    let mut amp = [c64(0.0, 0.0); 4];
    loop {
        let mut norm_sq = 0.0;
        for a in &mut amp {
            *a = c64(gauss(rng), gauss(rng));
            norm_sq += a.norm_sqr();
        }
        if norm_sq > 1e-6 {
            let n = norm_sq.sqrt();
            for a in &mut amp {
                *a /= c64(n, 0.0);
            }
            return PureState::new(amp).unwrap();
        }
    }
}

/// Random full-rank-ish mixed state: a four-component mixture of random pure
/// states with random positive weights.
pub(crate) fn random_mixed(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let states: Vec<DensityMatrix> = (0..4).map(|_| random_pure(rng).density()).collect();
    let weights: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 1e-3).collect();
    average_density(&weights, &states).unwrap()
}
