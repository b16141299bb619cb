//! Rayleigh quotients of the Hardy inequality for the family
//! `u_ε = d^{(p−1)/p+ε} ψ`, the ε-sweep, and the uncertainty check.
//!
//! Every integrand is cylindrically symmetric, so integrals run over the
//! `(r, t)` half-plane with weight `r^{2n−1}`; the sphere area cancels in all
//! ratios and is dropped.

use serde::{Deserialize, Serialize};

use super::quadrature::{fixed_order_sum, graded_nodes, Cutoff, Profile};
use crate::boundary::{d_cc_halfspace, d_gauge_halfspace, Metric};
use crate::error::{invalid, Error, Result};
use crate::horizontal::{cc_derivs, gauge_derivs};

/// Largest mesh grading exponent; reached only for very small `pε`.
const MAX_GRADING: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub exponent_eps: f64,
    /// Cutoff in the normal variable `σ = (d̃/L)^k`, where `d̃` is the
    /// coordinate that vanishes on the boundary (`t` for the half-space, the
    /// distance for the torus) and `L` the truncation length.
    pub cutoff_inner: f64,
    pub cutoff_outer: f64,
    pub cutoff_profile: Profile,
    pub normal_power: f64,
    /// Lateral cutoff in `|r − r_mid|/half_width` (half-space only).
    pub lateral_inner: f64,
    pub lateral_outer: f64,
    pub amplitude: f64,
}

impl TestFunctionSpec {
    pub fn new(eps: f64) -> Self {
        Self {
            exponent_eps: eps,
            cutoff_inner: 0.05,
            cutoff_outer: 1.0,
            cutoff_profile: Profile::Quintic,
            normal_power: 0.5,
            lateral_inner: 0.5,
            lateral_outer: 1.0,
            amplitude: 1.0,
        }
    }

    /// Defaults for the torus: the support stays away from the core circle.
    pub fn torus(eps: f64) -> Self {
        Self {
            cutoff_outer: 0.9,
            ..Self::new(eps)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent_eps >= 0.0 && self.exponent_eps.is_finite()) {
            return Err(invalid("exponent_eps", "must be a finite nonnegative number"));
        }
        if !(self.normal_power > 0.0 && self.normal_power.is_finite()) {
            return Err(invalid("normal_power", "must be positive"));
        }
        if !(self.amplitude.is_finite() && self.amplitude != 0.0) {
            return Err(invalid("amplitude", "must be finite and nonzero"));
        }
        if !(self.cutoff_inner > 0.0) || self.cutoff_outer > 1.0 {
            return Err(invalid("cutoff", "need 0 < q1 < q2 <= 1"));
        }
        self.normal_cutoff()?;
        self.lateral_cutoff()?;
        Ok(())
    }

    fn normal_cutoff(&self) -> Result<Cutoff> {
        Ok(Cutoff {
            profile: self.cutoff_profile,
            ..Cutoff::new(self.cutoff_inner, self.cutoff_outer)?
        })
    }

    fn lateral_cutoff(&self) -> Result<Cutoff> {
        Ok(Cutoff {
            profile: self.cutoff_profile,
            ..Cutoff::new(self.lateral_inner, self.lateral_outer)?
        })
    }

    /// `(p − 1)/p + ε`.
    pub fn exponent(&self, p: f64) -> f64 {
        (p - 1.0) / p + self.exponent_eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum QuotientDomain {
    /// `Π₀` truncated to `r ∈ [r_min, r_max]`, `t ∈ (0, t_max]`.
    HalfSpace {
        n: usize,
        r_min: f64,
        r_max: f64,
        t_max: f64,
    },
    Torus {
        n: usize,
        big_r: f64,
        rho: f64,
    },
}

impl QuotientDomain {
    pub fn halfspace(n: usize) -> Self {
        QuotientDomain::HalfSpace {
            n,
            r_min: 0.2,
            r_max: 3.0,
            t_max: 2.0,
        }
    }

    pub fn torus(n: usize, big_r: f64, rho: f64) -> Self {
        QuotientDomain::Torus { n, big_r, rho }
    }

    pub fn describe(&self) -> String {
        match *self {
            QuotientDomain::HalfSpace { n, r_min, r_max, t_max } => {
                format!("halfspace n={n} r=[{r_min},{r_max}] t=(0,{t_max}]")
            }
            QuotientDomain::Torus { n, big_r, rho } => format!("torus n={n} R={big_r} rho={rho}"),
        }
    }

    fn validate(&self, metric: Metric) -> Result<()> {
        match *self {
            QuotientDomain::HalfSpace { n, r_min, r_max, t_max } => {
                if n == 0 {
                    return Err(invalid("n", "must be at least 1"));
                }
                if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
                    return Err(invalid("r range", "need 0 < r_min < r_max"));
                }
                if !(t_max > 0.0 && t_max.is_finite()) {
                    return Err(invalid("t_max", "must be positive"));
                }
            }
            QuotientDomain::Torus { n, big_r, rho } => {
                crate::boundary::Torus::new(big_r, rho, n)?;
                if metric != Metric::Euclidean {
                    return Err(Error::Unsupported(format!(
                        "torus quotients are implemented for the euclidean metric only, got {metric}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Base resolution per direction; the report uses `size` and `2·size`.
    pub size: usize,
    /// Reports whose Richardson estimate exceeds this are flagged.
    pub max_error: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            size: 400,
            max_error: 1e-3,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.size < 4 {
            return Err(invalid("grid size", "must be at least 4"));
        }
        if !(self.max_error > 0.0) {
            return Err(invalid("max_error", "must be positive"));
        }
        Ok(())
    }
}

/// Pointwise data handed to the integrand callbacks.
#[derive(Debug, Clone, Copy)]
struct Node {
    /// `d`, `|∇_H d|²`, `u`, `|∇_H u|²`, quadrature weight incl. `r^{2n−1}`.
    d: f64,
    grad_d_sq: f64,
    u: f64,
    grad_u_sq: f64,
    w: f64,
}

fn grading(p: f64, eps: f64) -> f64 {
    if eps <= 0.0 {
        return MAX_GRADING;
    }
    (1.0 / (p * eps)).clamp(1.0, MAX_GRADING)
}

fn halfspace_distance(metric: Metric, r: f64, t: f64) -> Result<(f64, f64, f64)> {
    match metric {
        Metric::Euclidean => Ok((t, 0.0, 1.0)),
        Metric::Gauge => {
            let g = gauge_derivs(r, t)?;
            Ok((d_gauge_halfspace(r, t)?, g.derivs.d_r, g.derivs.d_t))
        }
        Metric::Cc => {
            let (_, dv, _) = cc_derivs(r, t)?;
            Ok((d_cc_halfspace(r, t)?, dv.d_r, dv.d_t))
        }
    }
}

/// Integrates `f` over the truncated domain at resolution `m`.
fn integrate<const K: usize, F>(
    domain: &QuotientDomain,
    metric: Metric,
    spec: &TestFunctionSpec,
    p: f64,
    m: usize,
    f: F,
) -> Result<[f64; K]>
where
    F: Fn(&Node) -> [f64; K] + Sync,
{
    let a = spec.exponent(p);
    let k = spec.normal_power;
    let amp = spec.amplitude;
    let normal = spec.normal_cutoff()?;
    let lateral = spec.lateral_cutoff()?;
    let graded = graded_nodes(m, grading(p, spec.exponent_eps));
    // ψ(σ(s)) with σ = (s/L)^k
    let psi_n = |s: f64, len: f64| {
        let sig = (s / len).powf(k);
        let (v, dv) = normal.eval(sig);
        (v, dv * k * sig / s)
    };
    let failure = std::sync::Mutex::new(None::<Error>);
    let record = |e: Error| {
        let mut slot = failure.lock().unwrap();
        if slot.is_none() {
            *slot = Some(e);
        }
    };

    let sums = match *domain {
        QuotientDomain::HalfSpace { n, r_min, r_max, t_max } => {
            let hr = (r_max - r_min) / m as f64;
            let mid = 0.5 * (r_min + r_max);
            let half = 0.5 * (r_max - r_min);
            fixed_order_sum(m, |i| {
                let r = r_min + (i as f64 + 0.5) * hr;
                let (pl, dpl) = lateral.eval((r - mid).abs() / half);
                let dpl = dpl * (r - mid).signum() / half;
                let wr = hr * r.powi(2 * n as i32 - 1);
                let mut acc = [0.0; K];
                for &(s, ws) in &graded {
                    let t = t_max * s;
                    let (pt, dpt) = psi_n(t, t_max);
                    if pt == 0.0 || pl == 0.0 {
                        continue;
                    }
                    let (d, d_r, d_t) = match halfspace_distance(metric, r, t) {
                        Ok(v) => v,
                        Err(e) => {
                            record(e);
                            return acc;
                        }
                    };
                    let psi = pl * pt;
                    let da = d.powf(a);
                    let dam = a * da / d;
                    let u_r = amp * (dam * d_r * psi + da * dpl * pt);
                    let u_t = amp * (dam * d_t * psi + da * pl * dpt);
                    let node = Node {
                        d,
                        grad_d_sq: d_r * d_r + 4.0 * r * r * d_t * d_t,
                        u: amp * da * psi,
                        grad_u_sq: u_r * u_r + 4.0 * r * r * u_t * u_t,
                        w: wr * ws * t_max,
                    };
                    for (slot, v) in acc.iter_mut().zip(f(&node)) {
                        *slot += v;
                    }
                }
                acc
            })
        }
        QuotientDomain::Torus { n, big_r, rho } => {
            // polar coordinates about the core circle: r = R + q cos θ, t = q sin θ
            let hth = std::f64::consts::TAU / m as f64;
            fixed_order_sum(m, |i| {
                let th = (i as f64 + 0.5) * hth;
                let (sn, cs) = th.sin_cos();
                let mut acc = [0.0; K];
                for &(s, ws) in &graded {
                    let d = rho * s;
                    let (psi, dpsi) = psi_n(d, rho);
                    if psi == 0.0 {
                        continue;
                    }
                    let q = rho - d;
                    let r = big_r + q * cs;
                    let grad_d_sq = cs * cs + 4.0 * r * r * sn * sn;
                    let da = d.powf(a);
                    let du = amp * (a * da / d * psi + da * dpsi);
                    let node = Node {
                        d,
                        grad_d_sq,
                        u: amp * da * psi,
                        grad_u_sq: du * du * grad_d_sq,
                        w: hth * ws * rho * q * r.powi(2 * n as i32 - 1),
                    };
                    for (slot, v) in acc.iter_mut().zip(f(&node)) {
                        *slot += v;
                    }
                }
                acc
            })
        }
    };
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(sums)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub p: f64,
    pub metric: Metric,
    pub domain: QuotientDomain,
    pub eps: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub quotient: f64,
    /// Quotient on the coarse grid.
    pub coarse_quotient: f64,
    pub quadrature: String,
    pub est_error: f64,
    /// `((p − 1)/p)^p`.
    pub target: f64,
    pub converged: bool,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", "must be a finite number above 1"));
    }
    Ok(())
}

/// `∫|∇_H u|^p / ∫(|∇_H d|^p / d^p)|u|^p` for `u = u_ε`.
pub fn hardy_quotient(
    domain: &QuotientDomain,
    metric: Metric,
    p: f64,
    u: &TestFunctionSpec,
    quad: &QuadratureSpec,
) -> Result<QuotientReport> {
    check_p(p)?;
    domain.validate(metric)?;
    u.validate()?;
    quad.validate()?;
    let eval = |m: usize| {
        integrate(domain, metric, u, p, m, |nd| {
            [
                nd.grad_u_sq.powf(0.5 * p) * nd.w,
                nd.grad_d_sq.powf(0.5 * p) * (nd.u.abs() / nd.d).powf(p) * nd.w,
            ]
        })
    };
    let [nc, dc] = eval(quad.size)?;
    let [nf, df] = eval(2 * quad.size)?;
    let coarse = nc / dc;
    let quotient = nf / df;
    let est_error = (quotient - coarse).abs();
    // at ε = 0 both integrals diverge and the grids only see truncations
    let converged =
        u.exponent_eps > 0.0 && nf > 0.0 && df > 0.0 && est_error.is_finite() && est_error <= quad.max_error;
    Ok(QuotientReport {
        p,
        metric,
        domain: *domain,
        eps: u.exponent_eps,
        numerator: nf,
        denominator: df,
        quotient,
        coarse_quotient: coarse,
        quadrature: format!(
            "midpoint {m}x{m} and {m2}x{m2}, graded normal mesh gamma={g}",
            m = quad.size,
            m2 = 2 * quad.size,
            g = grading(p, u.exponent_eps)
        ),
        est_error,
        target: ((p - 1.0) / p).powf(p),
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub reports: Vec<QuotientReport>,
    /// `quotient(ε_k) − ((p−1)/p)^p`.
    pub gaps: Vec<f64>,
    /// Each quotient is below its predecessor up to `2·est_error`.
    pub decreasing: bool,
    /// Each quotient is at least the Hardy constant minus `2·est_error`.
    pub above_floor: bool,
    /// Each quotient is at most `((p−1)/p + ε)^p + ceiling_margin`.
    pub below_ceiling: bool,
    pub ceiling_margin: f64,
}

/// Quotients along a strictly decreasing list of ε, with `spec` providing
/// everything but ε.
pub fn epsilon_sweep(
    domain: &QuotientDomain,
    metric: Metric,
    p: f64,
    eps_list: &[f64],
    spec: &TestFunctionSpec,
    quad: &QuadratureSpec,
    ceiling_margin: f64,
) -> Result<SweepReport> {
    if eps_list.is_empty() {
        return Err(invalid("eps_list", "must not be empty"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(invalid("eps_list", "entries must be positive"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("eps_list", "must be strictly decreasing"));
    }
    let reports = eps_list
        .iter()
        .map(|&eps| {
            let u = TestFunctionSpec {
                exponent_eps: eps,
                ..*spec
            };
            hardy_quotient(domain, metric, p, &u, quad)
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps = reports.iter().map(|r| r.quotient - r.target).collect();
    let decreasing = reports
        .windows(2)
        .all(|w| w[1].quotient < w[0].quotient + 2.0 * (w[0].est_error + w[1].est_error));
    let above_floor = reports.iter().all(|r| r.quotient >= r.target - 2.0 * r.est_error);
    let below_ceiling = reports
        .iter()
        .all(|r| r.quotient <= u_ceiling(p, r.eps) + ceiling_margin);
    Ok(SweepReport {
        reports,
        gaps,
        decreasing,
        above_floor,
        below_ceiling,
        ceiling_margin,
    })
}

/// `((p−1)/p + ε)^p`.
pub fn u_ceiling(p: f64, eps: f64) -> f64 {
    ((p - 1.0) / p + eps).powf(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub metric: Metric,
    pub domain: QuotientDomain,
    pub eps: f64,
    /// `(∫|∇_H u|²)^{1/2} (∫d²u²)^{1/2}`.
    pub lhs: f64,
    /// `½∫u²`.
    pub rhs: f64,
    pub ratio: f64,
    pub est_error: f64,
    pub converged: bool,
}

/// Checks `(∫|∇_H u|²)^{1/2}(∫d²u²)^{1/2} ≥ ½∫u²` for `u = u_ε` with `p = 2`.
pub fn uncertainty_check(
    domain: &QuotientDomain,
    metric: Metric,
    u: &TestFunctionSpec,
    quad: &QuadratureSpec,
) -> Result<UncertaintyReport> {
    if metric == Metric::Euclidean {
        return Err(Error::Unsupported(
            "the uncertainty check is stated for the gauge and cc distances".into(),
        ));
    }
    domain.validate(metric)?;
    u.validate()?;
    quad.validate()?;
    let eval = |m: usize| -> Result<(f64, f64)> {
        let [g, d2, u2] = integrate(domain, metric, u, 2.0, m, |nd| {
            let u2 = nd.u * nd.u * nd.w;
            [nd.grad_u_sq * nd.w, nd.d * nd.d * u2, u2]
        })?;
        Ok((g.sqrt() * d2.sqrt(), 0.5 * u2))
    };
    let (lc, rc) = eval(quad.size)?;
    let (lhs, rhs) = eval(2 * quad.size)?;
    let ratio = lhs / rhs;
    let est_error = (ratio - lc / rc).abs();
    Ok(UncertaintyReport {
        metric,
        domain: *domain,
        eps: u.exponent_eps,
        lhs,
        rhs,
        ratio,
        est_error,
        converged: est_error <= quad.max_error,
    })
}

/// `∫_{δ < d < ρ/2} d^{−1+ε}` over the torus, the integral whose divergence
/// as `δ, ε → 0` makes `u_ε` a sharpness family. Grows like `log(1/δ)` for ε = 0.
pub fn torus_collar_mass(n: usize, big_r: f64, rho: f64, eps: f64, delta: f64, size: usize) -> Result<f64> {
    crate::boundary::Torus::new(big_r, rho, n)?;
    if !(delta > 0.0 && delta < 0.5 * rho) {
        return Err(invalid("delta", "must lie in (0, rho/2)"));
    }
    if size < 4 {
        return Err(invalid("size", "must be at least 4"));
    }
    // logarithmic mesh in d, midpoint in θ
    let (l0, l1) = (delta.ln(), (0.5 * rho).ln());
    let hl = (l1 - l0) / size as f64;
    let hth = std::f64::consts::TAU / size as f64;
    let [v] = fixed_order_sum(size, |i| {
        let d = (l0 + (i as f64 + 0.5) * hl).exp();
        let q = rho - d;
        let mut acc = 0.0;
        for j in 0..size {
            let th = (j as f64 + 0.5) * hth;
            let r = big_r + q * th.cos();
            acc += r.powi(2 * n as i32 - 1) * q * hth;
        }
        [acc * d.powf(eps) * hl]
    });
    Ok(v)
}
