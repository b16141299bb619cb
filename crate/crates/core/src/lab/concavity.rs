//! Weak H-concavity along anisotropic convex combinations, by sampling on
//! convex domains and by the explicit half-space counterexample for `d_N`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{d_gauge_halfspace, ConvexPolytope, Metric};
use crate::error::{invalid, Result};
use crate::group::{GroupElement, StepTwoGroup};

/// Samples drawn from one generator stream.
pub const BATCH: usize = 1024;

/// Threshold below which a margin counts as a violation.
pub const CONCAVITY_TOL: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavitySample {
    pub lambda: f64,
    /// `d(g_λ)`.
    pub lhs: f64,
    /// `(1 − λ) d(g) + λ d(g')`.
    pub rhs: f64,
    pub margin: f64,
}

/// Evaluates the concavity inequality for `g' = g·(v, 0)`. `dist` returns
/// `None` outside its domain, in which case the sample is skipped.
pub fn h_concavity_sample<F>(
    group: &StepTwoGroup<f64>,
    dist: F,
    g: &GroupElement<f64>,
    v: &[f64],
    lambda: f64,
) -> Result<Option<ConcavitySample>>
where
    F: Fn(&GroupElement<f64>) -> Result<Option<f64>>,
{
    let gp = group.horizontal_point(g, v)?;
    let (Some(d0), Some(d1)) = (dist(g)?, dist(&gp)?) else {
        return Ok(None);
    };
    let gl = group.convex_combination(g, &gp, lambda)?;
    let Some(lhs) = dist(&gl)? else {
        return Ok(None);
    };
    let rhs = (1.0 - lambda) * d0 + lambda * d1;
    Ok(Some(ConcavitySample {
        lambda,
        lhs,
        rhs,
        margin: lhs - rhs,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavitySummary {
    pub seed: u64,
    pub samples: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub violations: usize,
    pub worst_margin: f64,
    /// `(g, v, λ)` attaining the worst margin.
    pub worst: Option<(Vec<f64>, Vec<f64>, f64)>,
}

#[derive(Debug, Clone, Copy, Default)]
struct BatchTally {
    evaluated: usize,
    skipped: usize,
    violations: usize,
    worst: Option<(f64, usize)>,
}

/// Random `(g, v, λ)` with `g` uniform in `bbox` (flat coordinates),
/// `v ∈ [−v_scale, v_scale]^m`, `λ ∈ [0, 1]`. Batch `b` uses stream `b` of a
/// ChaCha8 generator seeded with `seed`, so results do not depend on the
/// scheduling.
pub fn concavity_sampling<F>(
    group: &StepTwoGroup<f64>,
    dist: F,
    bbox: &[(f64, f64)],
    v_scale: f64,
    samples: usize,
    seed: u64,
) -> Result<ConcavitySummary>
where
    F: Fn(&GroupElement<f64>) -> Result<Option<f64>> + Sync,
{
    let m = group.m();
    if bbox.len() != group.n() {
        return Err(crate::Error::DimensionMismatch {
            expected: group.n(),
            found: bbox.len(),
        });
    }
    if !(v_scale > 0.0 && v_scale.is_finite()) {
        return Err(invalid("v_scale", "must be positive"));
    }
    let draw = |rng: &mut ChaCha8Rng| {
        let flat: Vec<f64> = bbox.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-v_scale..v_scale)).collect();
        let lambda: f64 = rng.gen_range(0.0..=1.0);
        (GroupElement::new(flat[..m].to_vec(), flat[m..].to_vec()), v, lambda)
    };
    let stream = |b: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        rng
    };
    let batches = samples.div_ceil(BATCH);
    let tallies = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<(BatchTally, f64)> {
            let mut rng = stream(b);
            let count = BATCH.min(samples - b * BATCH);
            let mut tally = BatchTally::default();
            let mut worst_margin = f64::INFINITY;
            for k in 0..count {
                let (g, v, lambda) = draw(&mut rng);
                match h_concavity_sample(group, &dist, &g, &v, lambda)? {
                    None => tally.skipped += 1,
                    Some(s) => {
                        tally.evaluated += 1;
                        if s.margin < CONCAVITY_TOL {
                            tally.violations += 1;
                        }
                        if s.margin < worst_margin {
                            worst_margin = s.margin;
                            tally.worst = Some((s.margin, k));
                        }
                    }
                }
            }
            Ok((tally, worst_margin))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = ConcavitySummary {
        seed,
        samples,
        evaluated: 0,
        skipped: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
        worst: None,
    };
    let mut worst_at = None;
    for (b, (tally, wm)) in tallies.iter().enumerate() {
        summary.evaluated += tally.evaluated;
        summary.skipped += tally.skipped;
        summary.violations += tally.violations;
        if *wm < summary.worst_margin {
            summary.worst_margin = *wm;
            worst_at = tally.worst.map(|(_, k)| (b, k));
        }
    }
    // replay the stream to recover the worst triple
    if let Some((b, k)) = worst_at {
        let mut rng = stream(b);
        for _ in 0..k {
            draw(&mut rng);
        }
        let (g, v, lambda) = draw(&mut rng);
        summary.worst = Some((g.flat(), v, lambda));
    }
    Ok(summary)
}

/// Sampling on the unit cube of `ℍ¹` with its Euclidean boundary distance.
pub fn cube_concavity_sampling(samples: usize, seed: u64, v_scale: f64) -> Result<ConcavitySummary> {
    let group = StepTwoGroup::heisenberg(1);
    let cube = ConvexPolytope::<f64>::unit_cube(1);
    let dist = |g: &GroupElement<f64>| -> Result<Option<f64>> {
        let p = group.to_heisenberg(g)?;
        if !cube.contains(&p)? {
            return Ok(None);
        }
        cube.distance(&p, Metric::Euclidean).map(Some)
    };
    concavity_sampling(&group, dist, &[(0.0, 1.0); 3], v_scale, samples, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub xi: Vec<f64>,
    pub xi_prime: Vec<f64>,
    pub lambda: f64,
    /// `d_N(ξ_λ)`.
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; positive means concavity fails.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub t_scale: f64,
    pub best: Counterexample,
    pub candidates: usize,
    /// `best.margin > 1e-6 · t_scale`.
    pub found: bool,
}

/// Searches `ξ = (r, 0, t)`, `ξ' = (ar, 0, t) ∈ H_ξ` in `ℍ¹` with
/// `a ∈ {2, 4}`, `r ∈ {0.5, 1, 2}`, `λ = ½`, `t = t_scale`, for a violation
/// of concavity of `d_N` on `Π₀`.
pub fn h_concavity_counterexample_search(t_scale: f64) -> Result<CounterexampleReport> {
    if !(t_scale > 0.0 && t_scale.is_finite()) {
        return Err(invalid("t_scale", "must be positive"));
    }
    let group = StepTwoGroup::heisenberg(1);
    let dist = |g: &GroupElement<f64>| -> Result<f64> {
        let p = group.to_heisenberg(g)?;
        d_gauge_halfspace(p.r(), p.t())
    };
    let lambda = 0.5;
    let mut best: Option<Counterexample> = None;
    let mut candidates = 0;
    for &a in &[2.0, 4.0] {
        for &r in &[0.5, 1.0, 2.0] {
            let g = GroupElement::new(vec![r, 0.0], vec![t_scale]);
            let gp = GroupElement::new(vec![a * r, 0.0], vec![t_scale]);
            if !group.in_horizontal_plane(&g, &gp, 1e-12)? {
                continue;
            }
            candidates += 1;
            let gl = group.convex_combination(&g, &gp, lambda)?;
            let lhs = dist(&gl)?;
            let rhs = (1.0 - lambda) * dist(&g)? + lambda * dist(&gp)?;
            let c = Counterexample {
                xi: g.flat(),
                xi_prime: gp.flat(),
                lambda,
                lhs,
                rhs,
                margin: rhs - lhs,
            };
            if best.as_ref().is_none_or(|b| c.margin > b.margin) {
                best = Some(c);
            }
        }
    }
    let best = best.ok_or_else(|| invalid("search", "no admissible candidate"))?;
    Ok(CounterexampleReport {
        t_scale,
        found: best.margin > 1e-6 * t_scale,
        best,
        candidates,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("fit", "need at least two matching points"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(invalid("fit", "values must be positive"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
