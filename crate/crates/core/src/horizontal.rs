//! Horizontal calculus on `ℍⁿ`.
//!
//! For a cylindrically symmetric field `u(r, t)` the horizontal gradient
//! satisfies `|∇_H u|² = u_r² + 4r²u_t²` and the sub-Laplacian reads
//! `Δ_H u = u_rr + (2n − 1)/r · u_r + 4r²u_tt`. The routines here evaluate
//! these, the p-Laplacian built from them, the closed-form derivatives of the
//! three boundary distances, and the sign certificates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::Torus;
use crate::error::{invalid, Error, Result};
use crate::group::HeisenbergPoint;
use crate::roots::{qb_derivatives, solve_cubic_s, solve_q_phi};
use crate::scalar::Real;

/// Partials of a cylindrically symmetric field at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HorizontalDerivs<T> {
    pub d_r: T,
    pub d_t: T,
    pub d_rr: T,
    pub d_tt: T,
    pub d_rt: T,
}

/// `A = d_r² + 4r²d_t²`.
pub fn horizontal_gradient_sq_cyl<T: Real>(d: &HorizontalDerivs<T>, r: T) -> T {
    d.d_r * d.d_r + T::lit(4.0) * r * r * d.d_t * d.d_t
}

/// `(A_r, A_t)` by differentiating `A = d_r² + 4r²d_t²`.
pub fn gradient_sq_partials<T: Real>(d: &HorizontalDerivs<T>, r: T) -> (T, T) {
    let eight = T::lit(8.0);
    let a_r = T::two() * d.d_r * d.d_rr + eight * r * d.d_t * d.d_t + eight * r * r * d.d_t * d.d_rt;
    let a_t = T::two() * d.d_r * d.d_rt + eight * r * r * d.d_t * d.d_tt;
    (a_r, a_t)
}

pub fn horizontal_laplacian_cyl<T: Real>(d: &HorizontalDerivs<T>, r: T, n: usize) -> Result<T> {
    if !(r > T::zero()) {
        return Err(invalid("r", "must be positive"));
    }
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let k = T::lit((2 * n - 1) as f64);
    Ok(d.d_rr + k / r * d.d_r + T::lit(4.0) * r * r * d.d_tt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PLapReport<T> {
    pub value: T,
    pub a: T,
    pub laplacian: T,
    pub correction: T,
}

/// `Δ_{p,H} d = A^{(p−4)/2} (A Δ_H d + (p−2)/2 (d_r A_r + 4r² d_t A_t))`.
pub fn p_laplacian_cyl<T: Real>(
    d: &HorizontalDerivs<T>,
    a_r: T,
    a_t: T,
    r: T,
    n: usize,
    p: T,
) -> Result<PLapReport<T>> {
    if !(p > T::one()) {
        return Err(invalid("p", "must exceed 1"));
    }
    let laplacian = horizontal_laplacian_cyl(d, r, n)?;
    let a = horizontal_gradient_sq_cyl(d, r);
    if !(a > T::zero()) {
        return Err(Error::SingularSet);
    }
    let correction =
        (p - T::two()) * T::half() * (d.d_r * a_r + T::lit(4.0) * r * r * d.d_t * a_t);
    let value = if p == T::two() {
        laplacian
    } else {
        a.powf((p - T::lit(4.0)) * T::half()) * (a * laplacian + correction)
    };
    Ok(PLapReport {
        value,
        a,
        laplacian,
        correction,
    })
}

/// [`p_laplacian_cyl`] with `A_r`, `A_t` taken from the second derivatives.
pub fn p_laplacian_from_derivs<T: Real>(d: &HorizontalDerivs<T>, r: T, n: usize, p: T) -> Result<PLapReport<T>> {
    let (a_r, a_t) = gradient_sq_partials(d, r);
    p_laplacian_cyl(d, a_r, a_t, r, n, p)
}

// ---------------------------------------------------------------------------
// Finite-difference oracles

fn stencil_step<T: Real>(h: T, c: T) -> T {
    h * T::one().max(c.abs())
}

/// Central-difference `(X₁f, …, Xₙf, Y₁f, …, Yₙf)` with
/// `X_i = ∂x_i + 2y_i∂t`, `Y_i = ∂y_i − 2x_i∂t`.
pub fn fd_horizontal_gradient<T: Real, F>(f: F, xi: &HeisenbergPoint<T>, h: T) -> Result<Vec<T>>
where
    F: Fn(&HeisenbergPoint<T>) -> Result<T>,
{
    if !(h > T::zero()) {
        return Err(invalid("h", "must be positive"));
    }
    let n = xi.n();
    let mut flat = xi.horizontal();
    flat.push(xi.t());
    let eval = |v: &[T]| f(&HeisenbergPoint::new(v[..n].to_vec(), v[n..2 * n].to_vec(), v[2 * n])?);
    let partial = |k: usize| -> Result<T> {
        let hk = stencil_step(h, flat[k]);
        let mut plus = flat.clone();
        let mut minus = flat.clone();
        plus[k] = plus[k] + hk;
        minus[k] = minus[k] - hk;
        Ok((eval(&plus)? - eval(&minus)?) / (T::two() * hk))
    };
    let f_t = partial(2 * n)?;
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        out.push(partial(i)? + T::two() * xi.y()[i] * f_t);
    }
    for i in 0..n {
        out.push(partial(n + i)? - T::two() * xi.x()[i] * f_t);
    }
    Ok(out)
}

/// Second-order differences of a field `f(r, t)`. Falls back to one-sided
/// stencils in `r` when a central stencil point cannot be evaluated (near a
/// singular set or the axis).
pub fn fd_cyl_derivs<T: Real, F>(f: F, r: T, t: T, h: T) -> Result<HorizontalDerivs<T>>
where
    F: Fn(T, T) -> Result<T>,
{
    let hr = stencil_step(h, r);
    let ht = stencil_step(h, t);
    let f0 = f(r, t)?;
    let central = f(r + hr, t).is_ok() && f(r - hr, t).is_ok();
    // one-sided stencils step away from the unavailable side
    let s = if central || f(r + hr, t).is_ok() { hr } else { -hr };
    let r_first = |g: &dyn Fn(T) -> Result<T>| -> Result<T> {
        if central {
            Ok((g(r + hr)? - g(r - hr)?) / (T::two() * hr))
        } else {
            Ok((-T::lit(3.0) * g(r)? + T::lit(4.0) * g(r + s)? - g(r + T::two() * s)?) / (T::two() * s))
        }
    };
    let d_r = r_first(&|rr| f(rr, t))?;
    let d_rr = if central {
        (f(r + hr, t)? - T::two() * f0 + f(r - hr, t)?) / (hr * hr)
    } else {
        let (f1, f2, f3) = (f(r + s, t)?, f(r + T::two() * s, t)?, f(r + T::lit(3.0) * s, t)?);
        (T::two() * f0 - T::lit(5.0) * f1 + T::lit(4.0) * f2 - f3) / (s * s)
    };
    let fp = f(r, t + ht)?;
    let fm = f(r, t - ht)?;
    let d_t = (fp - fm) / (T::two() * ht);
    let d_tt = (fp - T::two() * f0 + fm) / (ht * ht);
    let d_rt = r_first(&|rr| Ok((f(rr, t + ht)? - f(rr, t - ht)?) / (T::two() * ht)))?;
    Ok(HorizontalDerivs {
        d_r,
        d_t,
        d_rr,
        d_tt,
        d_rt,
    })
}

// ---------------------------------------------------------------------------
// Gauge half-space distance

/// Closed-form derivative data of the gauge distance to `∂Π₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeDerivs<T> {
    pub s: T,
    pub s_r: T,
    pub s_t: T,
    pub g: T,
    pub g_r: T,
    pub g_t: T,
    pub g_rr: T,
    pub g_tt: T,
    pub g_rt: T,
    pub derivs: HorizontalDerivs<T>,
    pub a: T,
    pub a_r: T,
    pub a_t: T,
}

fn check_positive<T: Real>(r: T, t: T) -> Result<()> {
    if !r.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite { name: "(r, t)" });
    }
    if !(r > T::zero()) || !(t > T::zero()) {
        return Err(invalid("(r, t)", "both must be positive"));
    }
    Ok(())
}

/// Derivatives of `d = G^{1/4}`, `G = r⁴s⁴(s² + 1)`, with `s³ + 2s = t/r²`.
///
/// The `d`-partials are evaluated in reduced form (powers of `1 + s²`), which
/// is the chain rule through `G` with the common factors cancelled; the raw
/// `G`-partials are reported alongside.
pub fn gauge_derivs<T: Real>(r: T, t: T) -> Result<GaugeDerivs<T>> {
    check_positive(r, t)?;
    let (two, three, four) = (T::two(), T::lit(3.0), T::lit(4.0));
    let r2 = r * r;
    let s = solve_cubic_s(t / r2)?;
    let s2 = s * s;
    let k = three * s2 + two;
    let s_t = T::one() / (r2 * k);
    let s_r = -two * s * (s2 + two) / (r * k);

    let g = r2 * r2 * s2 * s2 * (s2 + T::one());
    let g_r = -four * r2 * r * s2 * s2;
    let g_t = two * r2 * s2 * s;
    let g_rr = -T::lit(12.0) * r2 * s2 * s2 - T::lit(16.0) * r2 * r * s2 * s * s_r;
    let g_tt = T::lit(6.0) * r2 * s2 * s_t;
    let g_rt = -T::lit(16.0) * r2 * r * s2 * s * s_t;

    let q = T::one() + s2;
    let w = q.powf(-T::lit(0.75));
    let dw = -T::lit(1.5) * s * q.powf(-T::lit(1.75));
    let inner = w + s * dw;
    let derivs = HorizontalDerivs {
        d_r: -s * w,
        d_t: w / (two * r),
        d_rr: -inner * s_r,
        d_tt: dw * s_t / (two * r),
        d_rt: -inner * s_t,
    };
    let q32 = q.powf(-T::lit(1.5));
    Ok(GaugeDerivs {
        s,
        s_r,
        s_t,
        g,
        g_r,
        g_t,
        g_rr,
        g_tt,
        g_rt,
        derivs,
        a: q.sqrt().recip(),
        a_r: -s * s_r * q32,
        a_t: -s * s_t * q32,
    })
}

/// `Δ_{p,H} d_N = −(s/r)(1 + s²)^{−(p+1)/4} ((6n+p−4)s² + 4n+p−5)/(3s² + 2)`,
/// the reduced form of `−G^{−(3p+1)/4} r^{3p}s^{3p+2}(s²+1)^{p/2}(…)/(3s²+2)`.
pub fn closed_form_plap_gauge<T: Real>(r: T, t: T, n: usize, p: T) -> Result<T> {
    check_positive(r, t)?;
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(p > T::one()) {
        return Err(invalid("p", "must exceed 1"));
    }
    let s = solve_cubic_s(t / (r * r))?;
    let s2 = s * s;
    let nn = T::lit(n as f64);
    let bracket = (T::lit(6.0) * nn + p - T::lit(4.0)) * s2 + T::lit(4.0) * nn + p - T::lit(5.0);
    let decay = (T::one() + s2).powf(-(p + T::one()) / T::lit(4.0));
    Ok(-(s / r) * decay * bracket / (T::lit(3.0) * s2 + T::two()))
}

// ---------------------------------------------------------------------------
// CC half-space distance

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcLaplacian<T> {
    pub phi: T,
    pub derivs: HorizontalDerivs<T>,
    /// Exact `Δ_H d_ρ`.
    pub exact: T,
    /// Upper bound `(4(Q²+1)(B''Q' − Q''B') + B Q'³)/(r Q'³)`.
    pub bound: T,
    /// `|∇_H d_ρ|²`, identically one.
    pub grad_sq: T,
}

/// Closed-form derivatives of `d = B(φ) r`, `B = φ/cos φ`, `Q(φ) = t/r²`.
pub fn cc_derivs<T: Real>(r: T, t: T) -> Result<(T, HorizontalDerivs<T>, crate::roots::QBData<T>)> {
    check_positive(r, t)?;
    let angle = solve_q_phi(t / (r * r))?;
    let qb = qb_derivatives(&angle);
    let (s, c) = (angle.sin_phi(), angle.cos_phi());
    let r2 = r * r;
    let derivs = HorizontalDerivs {
        d_r: -s,
        d_t: c / (T::two() * r),
        d_rr: T::two() * qb.q * c / (r * qb.dq),
        d_tt: -s / (T::two() * r2 * r * qb.dq),
        d_rt: -c / (r2 * qb.dq),
    };
    Ok((angle.phi, derivs, qb))
}

pub fn cc_halfspace_laplacian<T: Real>(r: T, t: T, n: usize) -> Result<CcLaplacian<T>> {
    let (phi, derivs, qb) = cc_derivs(r, t)?;
    let exact = horizontal_laplacian_cyl(&derivs, r, n)?;
    let dq3 = qb.dq * qb.dq * qb.dq;
    let bound = (T::lit(4.0) * (qb.q * qb.q + T::one()) * (qb.d2b * qb.dq - qb.d2q * qb.db) + qb.b * dq3)
        / (r * dq3);
    Ok(CcLaplacian {
        phi,
        derivs,
        exact,
        bound,
        grad_sq: horizontal_gradient_sq_cyl(&derivs, r),
    })
}

// ---------------------------------------------------------------------------
// Torus

/// Derivatives of `d = ρ − √((r−R)² + t²)`.
pub fn torus_derivs<T: Real>(torus: &Torus<T>, r: T, t: T) -> Result<HorizontalDerivs<T>> {
    let a = r - torus.big_r;
    let dd = a * a + t * t;
    if dd == T::zero() {
        return Err(Error::SingularSet);
    }
    let q = dd.sqrt();
    let q3 = dd * q;
    Ok(HorizontalDerivs {
        d_r: -a / q,
        d_t: -t / q,
        d_rr: -t * t / q3,
        d_tt: -a * a / q3,
        d_rt: a * t / q3,
    })
}

/// `rW = C₀ + C₁t² + C₂t⁴` with `Δ_{p,H} d = −A^{(p−4)/2} D^{−5/2} W`,
/// `D = (r−R)² + t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusW<T> {
    pub w: T,
    pub c0: T,
    pub c1: T,
    pub c2: T,
}

pub fn torus_w<T: Real>(p: T, n: usize, torus: &Torus<T>, r: T, t: T) -> Result<TorusW<T>> {
    if !(p > T::one()) {
        return Err(invalid("p", "must exceed 1"));
    }
    if !(r > T::zero()) {
        return Err(invalid("r", "must be positive"));
    }
    let a = r - torus.big_r;
    if a == T::zero() && t == T::zero() {
        return Err(Error::SingularSet);
    }
    let (one, two, three, four) = (T::one(), T::two(), T::lit(3.0), T::lit(4.0));
    let k = T::lit((2 * n - 1) as f64);
    let m = T::lit((2 * n) as f64) + p - three;
    let r2 = r * r;
    let r3 = r2 * r;
    let a2 = a * a;
    let c0 = a2 * a2 * (k * a + four * r3);
    let c1 = a2
        * ((k + four * m * r2) * a + T::lit(16.0) * (p - one) * r3 * r2 - T::lit(8.0) * (p - two) * r3
            + (p - one) * r);
    let c2 = four * r2 * (m * a + r);
    let t2 = t * t;
    Ok(TorusW {
        w: (c0 + c1 * t2 + c2 * t2 * t2) / r,
        c0,
        c1,
        c2,
    })
}

// ---------------------------------------------------------------------------
// Sharp constants

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaCase {
    /// `1 < p < 2`
    Below2,
    /// `p = 2`
    Exactly2,
    /// `2 < p < (13 + √(32n−7))/8`
    Quadratic,
    /// `p ≥ (13 + √(32n−7))/8`
    AboveThreshold,
}

impl BetaCase {
    pub fn label(&self) -> &'static str {
        match self {
            BetaCase::Below2 => "1<p<2",
            BetaCase::Exactly2 => "p=2",
            BetaCase::Quadratic => "2<p<threshold",
            BetaCase::AboveThreshold => "p>=threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub p: f64,
    pub n: usize,
    pub beta: f64,
    pub case: BetaCase,
    /// Positive root of the quadratic, in the quadratic case.
    pub a: Option<f64>,
    pub threshold: f64,
    pub p0: f64,
    /// Values of the neighbouring case formulas when `p` is within `1e-6` of
    /// a case boundary: (from below, from above).
    pub one_sided: Option<(f64, f64)>,
}

/// `(13 + √(32n − 7))/8`.
pub fn beta_threshold(n: usize) -> f64 {
    (13.0 + (32.0 * n as f64 - 7.0).sqrt()) / 8.0
}

/// `p₀ = √(9n² − 8n + 2) − 3(n − 1)`.
pub fn p0_threshold(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let nf = n as f64;
    Ok((9.0 * nf * nf - 8.0 * nf + 2.0).sqrt() - 3.0 * (nf - 1.0))
}

/// Positive root of `(2n+p−3)²a² + 4((p−2)(2n+p−3) + (p−1)(2n−1))a − 4(2p−3) = 0`.
pub fn beta_quadratic_root(p: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let m = 2.0 * nf + p - 3.0;
    let alpha = m * m;
    let b = 4.0 * ((p - 2.0) * m + (p - 1.0) * (2.0 * nf - 1.0));
    let c = -4.0 * (2.0 * p - 3.0);
    if !(c < 0.0) || alpha == 0.0 {
        return Err(invalid("p", "quadratic has no positive root"));
    }
    let disc = (b * b - 4.0 * alpha * c).sqrt();
    // stable form of (−b + √disc)/(2α)
    let root = if b >= 0.0 { -2.0 * c / (b + disc) } else { (disc - b) / (2.0 * alpha) };
    Ok(root)
}

fn below2_formula(p: f64, n: usize) -> f64 {
    let nf = n as f64;
    ((2.0 * nf + p - 2.0) / (p - 1.0)).max((2.0 * nf - p + 1.0) / (2.0 * (2.0 - p)))
}

fn quadratic_formula(p: f64, n: usize) -> Result<(f64, f64)> {
    let a = beta_quadratic_root(p, n)?;
    Ok(((2.0 * n as f64 + p - 2.0).max(1.0 + 1.0 / a), a))
}

pub fn beta_constant(p: f64, n: usize) -> Result<BetaReport> {
    if !p.is_finite() || !(p > 1.0) {
        return Err(invalid("p", "must be finite and exceed 1"));
    }
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let nf = n as f64;
    let threshold = beta_threshold(n);
    let p0 = p0_threshold(n)?;
    let (beta, case, a) = if p == 2.0 {
        (2.0 * nf, BetaCase::Exactly2, None)
    } else if p < 2.0 {
        (below2_formula(p, n), BetaCase::Below2, None)
    } else if p >= threshold - 1e-12 {
        (2.0 * nf + p - 2.0, BetaCase::AboveThreshold, None)
    } else {
        let (b, a) = quadratic_formula(p, n)?;
        (b, BetaCase::Quadratic, Some(a))
    };
    let near = 1e-6;
    let one_sided = if (p - 2.0).abs() < near {
        // the 1<p<2 branch diverges as p → 2⁻
        Some((below2_formula(2.0 - near, n), quadratic_formula(2.0 + near, n)?.0))
    } else if (p - threshold).abs() < near {
        Some((quadratic_formula(threshold - near, n)?.0, 2.0 * nf + threshold - 2.0))
    } else {
        None
    };
    Ok(BetaReport {
        p,
        n,
        beta,
        case,
        a,
        threshold,
        p0,
        one_sided,
    })
}

// ---------------------------------------------------------------------------
// Certificates

/// Rectangular `(r, t)` grid with `size × size` midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub size: usize,
}

impl GridSpec {
    /// Node `(i, j)` on the closed rectangle (inclusive endpoints).
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let f = |lo: f64, hi: f64, k: usize| {
            if self.size == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * k as f64 / (self.size - 1) as f64
            }
        };
        (f(self.r_min, self.r_max, i), f(self.t_min, self.t_max, j))
    }
}

/// Maximum of a field over a grid; `pass` iff nothing exceeds `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignScan {
    pub grid: GridSpec,
    pub points: usize,
    pub max_value: f64,
    pub argmax: (f64, f64),
    pub positive: usize,
    pub pass: bool,
}

/// Scans `f ≤ tol` over the grid. Parallel over rows with an order-independent
/// reduction.
pub fn scan_nonpositive<F>(grid: GridSpec, tol: f64, f: F) -> Result<SignScan>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    if grid.size == 0 {
        return Err(invalid("grid", "size must be positive"));
    }
    let rows: Vec<(f64, (f64, f64), usize)> = (0..grid.size)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, (0.0, 0.0), 0usize);
            for j in 0..grid.size {
                let (r, t) = grid.node(i, j);
                let v = f(r, t)?;
                if v > tol {
                    best.2 += 1;
                }
                if v > best.0 {
                    best = (v, (r, t), best.2);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_value = f64::NEG_INFINITY;
    let mut argmax = (0.0, 0.0);
    let mut positive = 0;
    for (v, at, pos) in rows {
        positive += pos;
        if v > max_value {
            max_value = v;
            argmax = at;
        }
    }
    Ok(SignScan {
        grid,
        points: grid.size * grid.size,
        max_value,
        argmax,
        positive,
        pass: positive == 0,
    })
}

/// Sign scan of `Δ_{p,H} d_N` on a grid.
pub fn gauge_sign_scan(grid: GridSpec, n: usize, p: f64) -> Result<SignScan> {
    scan_nonpositive(grid, 0.0, |r, t| closed_form_plap_gauge(r, t, n, p))
}

/// Sign scan of `Δ_H d_ρ` (exact) on a grid.
pub fn cc_sign_scan(grid: GridSpec, n: usize) -> Result<SignScan> {
    scan_nonpositive(grid, 0.0, |r, t| Ok(cc_halfspace_laplacian(r, t, n)?.exact))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusCertificate {
    pub p: f64,
    pub n: usize,
    pub big_r: f64,
    pub rho: f64,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub beta: f64,
    /// Minimum of `W` over the scanned points.
    pub worst_w: f64,
    /// Minimum of `W / (|C₀| + |C₁|t² + |C₂|t⁴)·r`.
    pub worst_relative: f64,
    pub worst_at: (f64, f64),
    pub grid: usize,
    pub collar: f64,
    pub points: usize,
    pub pass: bool,
    pub reasons: Vec<String>,
}

/// Relative tolerance on `W` used by the certificate.
pub const TORUS_W_TOL: f64 = 1e-9;

/// Checks conditions (i) `R ≥ ρ + ((2n−1)ρ/4)^{1/3}` and (ii) `R ≥ β(p,n)ρ`,
/// then scans `W` over a `grid × grid` lattice of the tube cross-section
/// minus collars of width `ρ/grid` around the core circle and the boundary.
pub fn torus_certificate(p: f64, n: usize, big_r: f64, rho: f64, grid: usize) -> Result<TorusCertificate> {
    let torus = Torus::new(big_r, rho, n)?;
    if grid < 2 {
        return Err(invalid("grid", "need at least 2 points per side"));
    }
    let beta = beta_constant(p, n)?.beta;
    let cond_i = big_r >= rho + ((2.0 * n as f64 - 1.0) * rho / 4.0).cbrt();
    let cond_ii = big_r >= beta * rho;
    let collar = rho / grid as f64;
    let rows: Vec<(f64, f64, (f64, f64), usize)> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let r = big_r - rho + 2.0 * rho * i as f64 / (grid - 1) as f64;
            let mut acc = (f64::INFINITY, f64::INFINITY, (0.0, 0.0), 0usize);
            for j in 0..grid {
                let t = -rho + 2.0 * rho * j as f64 / (grid - 1) as f64;
                let core = torus.core_distance(r, t);
                if core < collar || rho - core < collar || r <= 0.0 {
                    continue;
                }
                let w = torus_w(p, n, &torus, r, t)?;
                let t2 = t * t;
                let scale = (w.c0.abs() + w.c1.abs() * t2 + w.c2.abs() * t2 * t2) / r;
                let rel = if scale > 0.0 { w.w / scale } else { 0.0 };
                acc.3 += 1;
                if w.w < acc.0 {
                    acc.0 = w.w;
                    acc.2 = (r, t);
                }
                acc.1 = acc.1.min(rel);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst_w = f64::INFINITY;
    let mut worst_relative = f64::INFINITY;
    let mut worst_at = (0.0, 0.0);
    let mut points = 0;
    for (w, rel, at, cnt) in rows {
        points += cnt;
        worst_relative = worst_relative.min(rel);
        if w < worst_w {
            worst_w = w;
            worst_at = at;
        }
    }
    let mut reasons = Vec::new();
    if !cond_i {
        reasons.push(format!(
            "condition (i): R >= rho + ((2n-1)rho/4)^(1/3) = {}",
            rho + ((2.0 * n as f64 - 1.0) * rho / 4.0).cbrt()
        ));
    }
    if !cond_ii {
        reasons.push(format!("condition (ii): R >= beta*rho = {}", beta * rho));
    }
    let scan_ok = worst_relative >= -TORUS_W_TOL;
    if !scan_ok {
        reasons.push(format!("W < 0 at (r, t) = {worst_at:?}"));
    }
    Ok(TorusCertificate {
        p,
        n,
        big_r,
        rho,
        condition_i: cond_i,
        condition_ii: cond_ii,
        beta,
        worst_w,
        worst_relative,
        worst_at,
        grid,
        collar,
        points,
        pass: cond_i && cond_ii && scan_ok,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn gradient_sq_examples() {
        let d = HorizontalDerivs { d_r: 1.0, ..Default::default() };
        assert_eq!(horizontal_gradient_sq_cyl(&d, 3.0), 1.0);
        let d = HorizontalDerivs { d_t: 1.0, ..Default::default() };
        assert_eq!(horizontal_gradient_sq_cyl(&d, 0.5), 1.0);
        let tor = Torus::new(3.0, 2.0, 1).unwrap();
        let d = torus_derivs(&tor, 4.0, 0.0).unwrap();
        assert_eq!(horizontal_gradient_sq_cyl(&d, 4.0), 1.0);
    }

    #[test]
    fn laplacian_examples() {
        let zero = HorizontalDerivs::<f64>::default();
        assert_eq!(horizontal_laplacian_cyl(&zero, 1.0, 1).unwrap(), 0.0);
        for n in 1..4 {
            let r = 0.7;
            let u = HorizontalDerivs { d_r: 2.0 * r, d_rr: 2.0, ..Default::default() };
            assert_relative_eq!(horizontal_laplacian_cyl(&u, r, n).unwrap(), 4.0 * n as f64, epsilon = 1e-14);
        }
        let tor = Torus::new(3.0, 1.0, 1).unwrap();
        let d = torus_derivs(&tor, 3.5, 0.0).unwrap();
        let v = horizontal_laplacian_cyl(&d, 3.5, 1).unwrap();
        assert_relative_eq!(v, -98.285_714_285_714_29, max_relative = 1e-14);
        assert!(horizontal_laplacian_cyl(&d, 0.0, 1).is_err());
    }

    #[test]
    fn p_two_is_the_laplacian() {
        let g = gauge_derivs(1.3, 0.4).unwrap();
        let rep = p_laplacian_cyl(&g.derivs, g.a_r, g.a_t, 1.3, 2, 2.0).unwrap();
        assert_eq!(rep.value, rep.laplacian);
        assert_eq!(rep.correction, 0.0);
        let z = HorizontalDerivs::<f64>::default();
        assert_eq!(p_laplacian_cyl(&z, 0.0, 0.0, 1.0, 1, 3.0), Err(Error::SingularSet));
    }

    #[test]
    fn gauge_spot_values() {
        let g = gauge_derivs(1.0f64, 3.0).unwrap();
        assert!((g.s - 1.0).abs() < 1e-15);
        assert_relative_eq!(g.g_r, -4.0, epsilon = 1e-14);
        assert_relative_eq!(g.g_t, 2.0, epsilon = 1e-14);
        assert_relative_eq!(g.g, 2.0, epsilon = 1e-14);
        assert_relative_eq!(g.a, 2f64.powf(-0.5), epsilon = 1e-15);
        let v = closed_form_plap_gauge(1.0, 3.0, 1, 2.0).unwrap();
        assert_relative_eq!(v, -(2f64.powf(-0.75)), max_relative = 1e-14);
        assert_relative_eq!(v, -0.594_604, epsilon = 1e-6);
        assert!(closed_form_plap_gauge(1.0f64, 1e-9, 1, 2.0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn gauge_reduced_form_matches_g_chain() {
        for &(r, t) in &[(1.3f64, 2.7f64), (0.4, 0.2), (2.0, 7.0)] {
            let g = gauge_derivs(r, t).unwrap();
            let q = 0.25 * g.g.powf(-0.75);
            let qq = -3.0 / 16.0 * g.g.powf(-1.75);
            let d = g.derivs;
            assert_relative_eq!(d.d_r, q * g.g_r, max_relative = 1e-12);
            assert_relative_eq!(d.d_t, q * g.g_t, max_relative = 1e-12);
            assert_relative_eq!(d.d_rr, q * g.g_rr + qq * g.g_r * g.g_r, max_relative = 1e-10);
            assert_relative_eq!(d.d_tt, q * g.g_tt + qq * g.g_t * g.g_t, max_relative = 1e-10);
            assert_relative_eq!(d.d_rt, q * g.g_rt + qq * g.g_r * g.g_t, max_relative = 1e-10);
            let g6 = g.g.powf(-1.5) * r.powi(6) * g.s.powi(6) * (g.s * g.s + 1.0);
            assert_relative_eq!(g.a, g6, max_relative = 1e-12);
        }
    }

    #[test]
    fn cc_spot_values() {
        let c = cc_halfspace_laplacian(1.0, FRAC_PI_2 + 1.0, 1).unwrap();
        assert_relative_eq!(c.derivs.d_r, -(0.5f64.sqrt()), epsilon = 1e-15);
        assert_relative_eq!(c.grad_sq, 1.0, epsilon = 1e-15);
        assert!(c.exact <= 0.0 && c.bound <= 0.0 && c.bound >= c.exact - 1e-14);
    }

    #[test]
    fn torus_w_branches() {
        let tor = Torus::new(10.0, 1.0, 1).unwrap();
        let w = torus_w(3.0, 1, &tor, 10.0, 0.3).unwrap();
        assert_eq!(w.c0, 0.0);
        let w = torus_w(2.0, 1, &tor, 10.4, 0.0).unwrap();
        let a: f64 = 0.4;
        assert_relative_eq!(w.w * 10.4, a.powi(4) * (a + 4.0 * 10.4f64.powi(3)), max_relative = 1e-14);
        assert_eq!(torus_w(2.0, 1, &tor, 10.0, 0.0), Err(Error::SingularSet));
    }

    #[test]
    fn beta_values() {
        for n in 1..=3 {
            assert_eq!(beta_constant(2.0, n).unwrap().beta, 2.0 * n as f64);
        }
        let b = beta_constant(3.0, 1).unwrap();
        assert_eq!(b.beta, 3.0);
        assert_eq!(b.case, BetaCase::AboveThreshold);
        assert_eq!(beta_threshold(1), 2.25);
        let b = beta_constant(1.5, 1).unwrap();
        assert_eq!(b.beta, 3.0);
        assert!(beta_constant(1.0, 1).is_err());
        let q = beta_constant(2.1, 1).unwrap();
        assert_eq!(q.case, BetaCase::Quadratic);
        let a = q.a.unwrap();
        let m: f64 = 2.0 + 2.1 - 3.0;
        let resid = m * m * a * a + 4.0 * (0.1 * m + 1.1) * a - 4.0 * 1.2;
        assert!(resid.abs() < 1e-14);
        let edge = beta_constant(2.0, 1).unwrap().one_sided.unwrap();
        assert!(edge.0 > 1e5 && (edge.1 - 2.207).abs() < 1e-3);
    }

    #[test]
    fn p0_values() {
        assert_relative_eq!(p0_threshold(1).unwrap(), 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(p0_threshold(2).unwrap(), 22f64.sqrt() - 3.0, epsilon = 1e-15);
        for n in 1..=10 {
            let p0 = p0_threshold(n).unwrap();
            assert!(p0 > 1.5 && p0 < 2.0);
        }
    }

    #[test]
    fn certificate_examples() {
        let c = torus_certificate(2.0, 1, 10.0, 1.0, 200).unwrap();
        assert!(c.pass, "{c:?}");
        let c = torus_certificate(2.0, 1, 1.1, 1.0, 50).unwrap();
        assert!(!c.condition_ii && !c.pass);
    }

    #[test]
    fn fd_gradient_examples() {
        let xi = HeisenbergPoint::h1(1.0, 0.0, 0.0);
        let g = fd_horizontal_gradient(|q: &HeisenbergPoint<f64>| Ok(q.t()), &xi, 1e-5).unwrap();
        assert!((g[0] - 0.0).abs() < 1e-9 && (g[1] + 2.0).abs() < 1e-9);
        let g = fd_horizontal_gradient(|q: &HeisenbergPoint<f64>| Ok(q.x()[0]), &xi, 1e-5).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-9 && g[1].abs() < 1e-9);
    }

    #[test]
    fn one_sided_fallback() {
        // field undefined for r < 1
        let f = |r: f64, t: f64| if r < 1.0 { Err(Error::OutsideDomain) } else { Ok(r * r * t) };
        let d = fd_cyl_derivs(f, 1.0, 2.0, 1e-4).unwrap();
        assert!((d.d_r - 4.0).abs() < 1e-6);
        assert!((d.d_rr - 4.0).abs() < 1e-3);
        assert!((d.d_rt - 2.0).abs() < 1e-6);
    }
}
