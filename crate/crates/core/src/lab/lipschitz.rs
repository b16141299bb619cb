//! Empirical Lipschitz ratio `|d(g) − d(g')| / N(g'⁻¹g)` of a boundary
//! distance against a homogeneous norm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::concavity::BATCH;
use crate::boundary::Metric;
use crate::error::{invalid, Error, Result};
use crate::group::{inverse, multiply, HeisenbergPoint};
use crate::quasi_norm::{cc_norm, gauge_norm};

/// `|d(g) − d(g')| / N(g'⁻¹g)`, or `None` when `g = g'`.
pub fn lipschitz_ratio<F>(dist: F, norm: Metric, g: &HeisenbergPoint<f64>, gp: &HeisenbergPoint<f64>) -> Result<Option<f64>>
where
    F: Fn(&HeisenbergPoint<f64>) -> Result<f64>,
{
    let rel = multiply(&inverse(gp), g)?;
    let den = match norm {
        Metric::Gauge => gauge_norm(&rel),
        Metric::Cc => cc_norm(&rel)?,
        Metric::Euclidean => return Err(Error::Unsupported("the probe needs a homogeneous norm".into())),
    };
    if den == 0.0 {
        return Ok(None);
    }
    Ok(Some((dist(g)? - dist(gp)?).abs() / den))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub norm: Metric,
    pub seed: u64,
    pub region: Vec<(f64, f64)>,
    pub pairs: usize,
    pub excluded: usize,
    pub max_ratio: f64,
    pub argmax: Option<(Vec<f64>, Vec<f64>)>,
}

/// Largest ratio over `pairs` random pairs drawn uniformly from `region`
/// (flat coordinates, `2n + 1` intervals).
pub fn lipschitz_probe<F>(dist: F, norm: Metric, region: &[(f64, f64)], pairs: usize, seed: u64) -> Result<LipschitzReport>
where
    F: Fn(&HeisenbergPoint<f64>) -> Result<f64> + Sync,
{
    if region.len() % 2 != 1 || region.len() < 3 {
        return Err(invalid("region", "need 2n + 1 intervals"));
    }
    if region.iter().any(|&(lo, hi)| !(lo < hi && lo.is_finite() && hi.is_finite())) {
        return Err(invalid("region", "each interval needs finite lo < hi"));
    }
    let n = region.len() / 2;
    let draw = |rng: &mut ChaCha8Rng| -> Result<HeisenbergPoint<f64>> {
        let v: Vec<f64> = region.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
        HeisenbergPoint::new(v[..n].to_vec(), v[n..2 * n].to_vec(), v[2 * n])
    };
    let batches = pairs.div_ceil(BATCH);
    let parts = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<(usize, f64, Option<(Vec<f64>, Vec<f64>)>)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut excluded = 0;
            let mut best = (f64::NEG_INFINITY, None);
            for _ in 0..BATCH.min(pairs - b * BATCH) {
                let g = draw(&mut rng)?;
                let gp = draw(&mut rng)?;
                match lipschitz_ratio(&dist, norm, &g, &gp)? {
                    None => excluded += 1,
                    Some(q) if q > best.0 => best = (q, Some((flat(&g), flat(&gp)))),
                    Some(_) => {}
                }
            }
            Ok((excluded, best.0, best.1))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = LipschitzReport {
        norm,
        seed,
        region: region.to_vec(),
        pairs,
        excluded: 0,
        max_ratio: 0.0,
        argmax: None,
    };
    for (ex, q, arg) in parts {
        rep.excluded += ex;
        if q > rep.max_ratio {
            rep.max_ratio = q;
            rep.argmax = arg;
        }
    }
    Ok(rep)
}

fn flat(p: &HeisenbergPoint<f64>) -> Vec<f64> {
    let mut v = p.horizontal();
    v.push(p.t());
    v
}
