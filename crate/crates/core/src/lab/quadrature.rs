//! Tensor midpoint rules on graded meshes, cutoff profiles, and a
//! reduction whose result does not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Sums `K` integrands over the rows `0..rows`, each row handled by `row`.
/// Rows run in parallel; the row totals are combined sequentially in index
/// order, so the result is bit-identical for any number of threads.
pub fn fixed_order_sum<const K: usize, F>(rows: usize, row: F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K] + Sync,
{
    let parts: Vec<[f64; K]> = (0..rows).into_par_iter().map(&row).collect();
    let mut acc = [CompensatedSum::default(); K];
    for part in parts {
        for k in 0..K {
            acc[k].add(part[k]);
        }
    }
    acc.map(|a| a.value())
}

/// Midpoint nodes of `[0, 1]` pushed through `σ ↦ σ^γ`: returns
/// `(σ_i^γ, γ σ_i^{γ−1} / m)`, node and weight.
pub fn graded_nodes(m: usize, gamma: f64) -> Vec<(f64, f64)> {
    let h = 1.0 / m as f64;
    (0..m)
        .map(|i| {
            let s = (i as f64 + 0.5) * h;
            (s.powf(gamma), gamma * s.powf(gamma - 1.0) * h)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `1 − (10x³ − 15x⁴ + 6x⁵)`, C² at both ends.
    Quintic,
}

/// Cutoff equal to 1 on `[0, q1]` and 0 on `[q2, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub q1: f64,
    pub q2: f64,
    pub profile: Profile,
}

impl Cutoff {
    pub fn new(q1: f64, q2: f64) -> crate::Result<Self> {
        if !(q1 >= 0.0 && q2 > q1 && q2.is_finite()) {
            return Err(crate::error::invalid("cutoff", format!("need 0 <= q1 < q2, got q1={q1}, q2={q2}")));
        }
        Ok(Self {
            q1,
            q2,
            profile: Profile::Quintic,
        })
    }

    /// Value and derivative at `s`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let w = self.q2 - self.q1;
        let x = (s - self.q1) / w;
        if x <= 0.0 {
            return (1.0, 0.0);
        }
        if x >= 1.0 {
            return (0.0, 0.0);
        }
        match self.profile {
            Profile::Quintic => {
                let x2 = x * x;
                let v = 1.0 - x2 * x * (10.0 - 15.0 * x + 6.0 * x2);
                let d = -30.0 * x2 * (1.0 - x) * (1.0 - x) / w;
                (v, d)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        let c = Cutoff::new(0.5, 1.0).unwrap();
        assert_eq!(c.eval(0.2), (1.0, 0.0));
        assert_eq!(c.eval(1.2), (0.0, 0.0));
        let (v, _) = c.eval(0.75);
        assert!((v - 0.5).abs() < 1e-15);
        let h = 1e-6;
        let fd = (c.eval(0.7 + h).0 - c.eval(0.7 - h).0) / (2.0 * h);
        assert!((fd - c.eval(0.7).1).abs() < 1e-8);
        assert!(Cutoff::new(1.0, 0.5).is_err());
    }

    #[test]
    fn graded_rule_integrates_singular_power() {
        // ∫₀¹ x^{-0.9} dx = 10 with γ = 10 removes the singularity
        let nodes = graded_nodes(400, 10.0);
        let v: f64 = nodes.iter().map(|&(x, w)| x.powf(-0.9) * w).sum();
        assert!((v - 10.0).abs() < 1e-6);
    }

    #[test]
    fn fixed_order_sum_is_thread_independent() {
        let f = |i: usize| [((i as f64) * 0.1).sin() * 1e-3, 1.0 / (i as f64 + 1.0)];
        let a = fixed_order_sum(10_000, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| fixed_order_sum(10_000, f));
        assert_eq!(a[0].to_bits(), b[0].to_bits());
        assert_eq!(a[1].to_bits(), b[1].to_bits());
    }
}
