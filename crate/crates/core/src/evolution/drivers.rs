use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::Scalar;

/// Brownian increments over one step.
#[derive(Clone, Debug, PartialEq)]
pub struct Increments<S> {
    pub db0: S,
    pub db1: S,
    pub db2: S,
    pub db3: S,
    pub dbeta: S,
}

impl<S: Scalar> Increments<S> {
    pub fn zero() -> Self {
        Increments { db0: S::zero(), db1: S::zero(), db2: S::zero(), db3: S::zero(), dbeta: S::zero() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Increments {
            db0: self.db0.clone() + o.db0.clone(),
            db1: self.db1.clone() + o.db1.clone(),
            db2: self.db2.clone() + o.db2.clone(),
            db3: self.db3.clone() + o.db3.clone(),
            dbeta: self.dbeta.clone() + o.dbeta.clone(),
        }
    }
}

/// Five independent Brownian streams: `B⁰` with variance `κt`, and
/// `B¹, B², B³, B^{α/2}` with variance `τt`.
///
/// Each path gets its own ChaCha stream keyed by (master seed, path index),
/// so paths can be generated in any order.
#[derive(Clone, Debug)]
pub struct DriverBundle {
    rng: ChaCha8Rng,
    sd0: f64,
    sd: f64,
    dt: f64,
}

impl DriverBundle {
    pub fn new(seed: u64, path: u64, kappa: f64, tau: f64, dt: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path);
        DriverBundle { rng, sd0: (kappa * dt).sqrt(), sd: (tau * dt).sqrt(), dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Standard normals in the order B⁰, B¹, B², B³, B^{α/2}.
    fn normals(&mut self) -> [f64; 5] {
        let mut z = [0.0; 5];
        for x in z.iter_mut() {
            *x = StandardNormal.sample(&mut self.rng);
        }
        z
    }

    pub fn next_increments<S: Scalar>(&mut self) -> Increments<S> {
        let z = self.normals();
        let real = |x: f64| S::from_real(x);
        Increments {
            db0: real(self.sd0 * z[0]),
            db1: real(self.sd * z[1]),
            db2: real(self.sd * z[2]),
            db3: real(self.sd * z[3]),
            dbeta: real(self.sd * z[4]),
        }
    }
}
