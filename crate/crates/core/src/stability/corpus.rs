use crate::error::{HbmError, Result};
use crate::geometry::{BodySpec, TrigMode};
use crate::sphere_disc::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::str::FromStr;

/// `random:seed=<u64>,count=<k>`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
}

impl FromStr for CorpusSpec {
    type Err = HbmError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || HbmError::input(format!("corpus must look like random:seed=<u64>,count=<k>, got '{s}'"));
        let rest = s.strip_prefix("random:").ok_or_else(bad)?;
        let (mut seed, mut count) = (None, None);
        for part in rest.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "seed" => seed = Some(v.trim().parse().map_err(|_| bad())?),
                "count" => count = Some(v.trim().parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        match (seed, count) {
            (Some(seed), Some(count)) => Ok(CorpusSpec { seed, count }),
            _ => Err(bad()),
        }
    }
}

const CHECK_SAMPLES: usize = 720;

fn min_radius_of_curvature(spec: &BodySpec) -> Result<f64> {
    let mut m = f64::INFINITY;
    for j in 0..CHECK_SAMPLES {
        let (s, c) = (2.0 * PI * (j as f64 + 0.5) / CHECK_SAMPLES as f64).sin_cos();
        let jet = spec.jet_at(&Vec3::new(c, s, 0.0))?;
        let tau = Vec3::new(-s, c, 0.0);
        m = m.min(tau.dot(&(jet.hess * tau))).min(jet.h);
    }
    Ok(m)
}

/// An ellipse support function plus small even harmonics (k = 2, 4, 6),
/// redrawn until h″+h stays above 5% of the shorter semi-axis.
pub fn random_body<R: Rng>(rng: &mut R) -> Result<BodySpec> {
    loop {
        let a = rng.random_range(0.6..1.6);
        let b = rng.random_range(0.6..1.6);
        let small = f64::min(a, b);
        let modes: Vec<TrigMode> = [2usize, 4, 6]
            .iter()
            .map(|&k| {
                let amp = 0.3 * small / (k * k - 1) as f64;
                TrigMode { k, cos: rng.random_range(-amp..amp), sin: rng.random_range(-amp..amp) }
            })
            .collect();
        let spec = BodySpec::trig(a, b, modes)?;
        if min_radius_of_curvature(&spec)? >= 0.05 * small {
            return Ok(spec);
        }
    }
}

/// `count` independent pairs from a ChaCha20 stream seeded by `seed`.
pub fn random_pairs(seed: u64, count: usize) -> Result<Vec<(BodySpec, BodySpec)>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count).map(|_| Ok((random_body(&mut rng)?, random_body(&mut rng)?))).collect()
}
