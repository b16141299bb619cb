//! Homogeneous quasi-norms on `ℍⁿ`: the gauge `N` and the
//! Carnot-Carathéodory norm `ρ`, plus the left-invariant distances they induce.

use crate::error::Result;
use crate::group::{inverse, multiply, HeisenbergPoint};
use crate::roots::solve_mu;
use crate::scalar::Real;

/// `N = (r⁴ + t²)^{1/4}` from cylindrical data.
pub fn gauge_norm_cyl<T: Real>(r: T, t: T) -> T {
    (r * r).hypot(t).sqrt()
}

pub fn gauge_norm<T: Real>(xi: &HeisenbergPoint<T>) -> T {
    gauge_norm_cyl(xi.r(), xi.t())
}

/// CC norm from cylindrical data. Uses `√(π|t|)` on (or numerically on) the
/// t-axis and `r` on the horizontal plane.
pub fn cc_norm_cyl<T: Real>(r: T, t: T) -> Result<T> {
    let at = t.abs();
    if at == T::zero() {
        return Ok(r);
    }
    if r < T::lit(1e-12) * T::one().max(at.sqrt()) {
        return Ok((T::PI() * at).sqrt());
    }
    let angle = solve_mu(at / (r * r))?;
    Ok(angle.phi / angle.sin_phi() * r)
}

pub fn cc_norm<T: Real>(xi: &HeisenbergPoint<T>) -> Result<T> {
    cc_norm_cyl(xi.r(), xi.t())
}

/// `N(b⁻¹a)`.
pub fn gauge_distance<T: Real>(a: &HeisenbergPoint<T>, b: &HeisenbergPoint<T>) -> Result<T> {
    Ok(gauge_norm(&multiply(&inverse(b), a)?))
}

/// `ρ(b⁻¹a)`.
pub fn cc_distance<T: Real>(a: &HeisenbergPoint<T>, b: &HeisenbergPoint<T>) -> Result<T> {
    cc_norm(&multiply(&inverse(b), a)?)
}
