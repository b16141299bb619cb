//! Scalar root solvers for the implicit equations behind the distances.
//!
//! * `s³ + 2s = c` (gauge half-space distance),
//! * `μ(φ) = (2φ - sin 2φ) / (2 sin²φ) = c` on `(0, π)` (CC norm),
//! * `Q(φ) = (2φ + sin 2φ) / (2 cos²φ) = c` on `(0, π/2)` (CC half-space).
//!
//! Both angle equations blow up at the right end of their interval. Close to
//! that end the solve runs in the complementary angle `δ` so that `sin δ`
//! (and hence the distance) keeps full relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{x_minus_sin, Real};

const MAX_ITER: usize = 300;

/// Root of a monotone function on `[lo, hi]` by Newton steps, falling back to
/// bisection whenever a step leaves the current bracket. `f` returns the value
/// and derivative. Terminates once the step is at rounding level.
pub fn safeguarded_newton<T: Real>(
    f: impl Fn(T) -> (T, T),
    lo: T,
    hi: T,
    x0: T,
    increasing: bool,
) -> Result<T> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid("bracket", "need finite lo < hi"));
    }
    let sign = if increasing { T::one() } else { -T::one() };
    let (mut lo, mut hi) = (lo, hi);
    let mut x = if x0 > lo && x0 < hi { x0 } else { T::half() * (lo + hi) };
    let tol = T::epsilon() * T::two();
    for _ in 0..MAX_ITER {
        let (v, dv) = f(x);
        let v = sign * v;
        let dv = sign * dv;
        if v == T::zero() {
            return Ok(x);
        }
        if !v.is_finite() {
            return Err(Error::NonConvergence(format!("non-finite residual at {x}")));
        }
        if v > T::zero() {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - v / dv;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            T::half() * (lo + hi)
        };
        if (next - x).abs() <= tol * next.abs() || hi - lo <= tol * hi.abs().max(lo.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergence(format!(
        "no convergence within {MAX_ITER} iterations, bracket [{lo}, {hi}]"
    )))
}

/// The real root of `s³ + 2s = c`.
pub fn solve_cubic_s<T: Real>(c: T) -> Result<T> {
    if !c.is_finite() {
        return Err(Error::NonFinite { name: "c" });
    }
    if c == T::zero() {
        return Ok(T::zero());
    }
    let a = c.abs();
    // The root lies below both a/2 and a^{1/3}; Newton from the smaller bound
    // on this convex increasing function only moves down.
    let hi = (a * T::half()).min(a.cbrt());
    let f = |s: T| (s * s * s + T::two() * s - a, T::lit(3.0) * s * s + T::two());
    let upper = hi * (T::one() + T::epsilon() * T::lit(4.0));
    let s = safeguarded_newton(f, T::zero(), upper, hi, true)?;
    Ok(s.copysign(c))
}

/// Which implicit angle equation a [`CCAngle`] solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleEquation {
    /// `μ(φ) = c` on `(0, π)`.
    Mu,
    /// `Q(φ) = c` on `(0, π/2)`.
    Q,
}

/// A solved angle together with its complement (`π - φ` for `μ`, `π/2 - φ`
/// for `Q`) and the residual of the defining equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CCAngle<T> {
    pub phi: T,
    pub complement: T,
    pub residual: T,
    pub equation: AngleEquation,
}

impl<T: Real> CCAngle<T> {
    pub fn sin_phi(&self) -> T {
        match self.equation {
            AngleEquation::Mu if self.phi > self.complement => self.complement.sin(),
            AngleEquation::Q if self.phi > self.complement => self.complement.cos(),
            _ => self.phi.sin(),
        }
    }

    pub fn cos_phi(&self) -> T {
        match self.equation {
            AngleEquation::Mu if self.phi > self.complement => -self.complement.cos(),
            AngleEquation::Q if self.phi > self.complement => self.complement.sin(),
            _ => self.phi.cos(),
        }
    }
}

/// `(K - (2δ - sin 2δ)) / (2 sin²δ)` and its δ-derivative. With `K = 2π` this
/// is `μ(π - δ)`, with `K = π` it is `Q(π/2 - δ)`.
fn complement_form<T: Real>(k: T, d: T) -> (T, T) {
    let s = d.sin();
    let num = k - x_minus_sin(T::two() * d);
    let val = num / (T::two() * s * s);
    let der = -T::two() - num * d.cos() / (s * s * s);
    (val, der)
}

/// `μ(φ) = (2φ - sin 2φ) / (2 sin²φ)`, with the limit 0 at φ = 0.
pub fn mu<T: Real>(phi: T) -> T {
    if phi == T::zero() {
        return T::zero();
    }
    if phi > T::FRAC_PI_2() {
        return complement_form(T::TAU(), T::PI() - phi).0;
    }
    let s = phi.sin();
    x_minus_sin(T::two() * phi) / (T::two() * s * s)
}

fn mu_with_derivative<T: Real>(phi: T) -> (T, T) {
    let s = phi.sin();
    let num = x_minus_sin(T::two() * phi);
    (num / (T::two() * s * s), T::two() - num * phi.cos() / (s * s * s))
}

/// `Q(φ) = (2φ + sin 2φ) / (2 cos²φ)`.
pub fn q_of_phi<T: Real>(phi: T) -> T {
    if phi > T::FRAC_PI_4() {
        return complement_form(T::PI(), T::FRAC_PI_2() - phi).0;
    }
    q_with_derivative(phi).0
}

fn q_with_derivative<T: Real>(phi: T) -> (T, T) {
    let c = phi.cos();
    let num = T::two() * phi + (T::two() * phi).sin();
    (num / (T::two() * c * c), T::two() + num * phi.sin() / (c * c * c))
}

/// Solves `μ(φ) = c` for `φ ∈ [0, π)`; `c = 0` returns the limit `φ = 0`.
pub fn solve_mu<T: Real>(c: T) -> Result<CCAngle<T>> {
    if !c.is_finite() {
        return Err(Error::NonFinite { name: "c" });
    }
    if c < T::zero() {
        return Err(invalid("c", "must be nonnegative"));
    }
    if c == T::zero() {
        return Ok(CCAngle {
            phi: T::zero(),
            complement: T::PI(),
            residual: T::zero(),
            equation: AngleEquation::Mu,
        });
    }
    let half_pi = T::FRAC_PI_2();
    if c <= half_pi {
        // μ ≈ 2φ/3 near zero
        let seed = (T::lit(1.5) * c).min(half_pi * T::half());
        let phi = safeguarded_newton(|p| {
            let (v, d) = mu_with_derivative(p);
            (v - c, d)
        }, T::zero(), half_pi, seed, true)?;
        Ok(CCAngle {
            phi,
            complement: T::PI() - phi,
            residual: mu(phi) - c,
            equation: AngleEquation::Mu,
        })
    } else {
        // μ(π - δ) ≈ π/δ² near δ = 0
        let seed = (T::PI() / c).sqrt().min(half_pi * T::half());
        let f = |d: T| {
            let (v, der) = complement_form(T::TAU(), d);
            (v - c, der)
        };
        let delta = safeguarded_newton(f, T::zero(), half_pi, seed, false)?;
        Ok(CCAngle {
            phi: T::PI() - delta,
            complement: delta,
            residual: complement_form(T::TAU(), delta).0 - c,
            equation: AngleEquation::Mu,
        })
    }
}

/// Solves `Q(φ) = c` for `φ ∈ (0, π/2)`.
pub fn solve_q_phi<T: Real>(c: T) -> Result<CCAngle<T>> {
    if !c.is_finite() {
        return Err(Error::NonFinite { name: "c" });
    }
    if !(c > T::zero()) {
        return Err(invalid("c", "must be positive"));
    }
    let quarter = T::FRAC_PI_4();
    let split = q_of_phi(quarter);
    if c <= split {
        // Q ≈ 2φ near zero
        let seed = (T::half() * c).min(quarter * T::half());
        let phi = safeguarded_newton(|p| {
            let (v, d) = q_with_derivative(p);
            (v - c, d)
        }, T::zero(), quarter, seed, true)?;
        Ok(CCAngle {
            phi,
            complement: T::FRAC_PI_2() - phi,
            residual: q_of_phi(phi) - c,
            equation: AngleEquation::Q,
        })
    } else {
        // Q(π/2 - δ) ≈ π/(2δ²) near δ = 0
        let seed = (T::PI() / (T::two() * c)).sqrt().min(quarter * T::half());
        let f = |d: T| {
            let (v, der) = complement_form(T::PI(), d);
            (v - c, der)
        };
        let delta = safeguarded_newton(f, T::zero(), quarter, seed, false)?;
        Ok(CCAngle {
            phi: T::FRAC_PI_2() - delta,
            complement: delta,
            residual: complement_form(T::PI(), delta).0 - c,
            equation: AngleEquation::Q,
        })
    }
}

/// Derivative data of `B(φ) = φ / cos φ` and `Q(φ)` used by the CC
/// half-space calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBData<T> {
    pub q: T,
    pub dq: T,
    pub d2q: T,
    pub b: T,
    pub db: T,
    pub d2b: T,
}

/// Evaluates `Q, Q', Q'', B, B', B''` at a solved `Q`-angle.
pub fn qb_derivatives<T: Real>(angle: &CCAngle<T>) -> QBData<T> {
    let phi = angle.phi;
    let s = angle.sin_phi();
    let c = angle.cos_phi();
    let c2 = c * c;
    let c3 = c2 * c;
    let two = T::two();
    let q = if phi > angle.complement {
        complement_form(T::PI(), angle.complement).0
    } else {
        q_with_derivative(phi).0
    };
    let dq = two * (c + phi * s) / c3;
    let d2q = two * (phi + two * phi * s * s + T::lit(3.0) * s * c) / (c3 * c);
    let b = phi / c;
    let db = (c + phi * s) / c2;
    let d2b = (phi + phi * s * s + two * s * c) / c3;
    QBData { q, dq, d2q, b, db, d2b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cubic_spot_values() {
        assert_eq!(solve_cubic_s(0.0).unwrap(), 0.0);
        assert!((solve_cubic_s(3.0f64).unwrap() - 1.0).abs() < 1e-15);
        assert!((solve_cubic_s(12.0f64).unwrap() - 2.0).abs() < 1e-15);
        assert!((solve_cubic_s(-3.0f64).unwrap() + 1.0).abs() < 1e-15);
        assert!(solve_cubic_s(f64::NAN).is_err());
    }

    #[test]
    fn cubic_residual_contract_across_scales() {
        for &c in &[1e-300, 1e-12, 1e-3, 0.7, 5.0, 1e6, 1e150, 1e300] {
            let s: f64 = solve_cubic_s(c).unwrap();
            let res = s * s * s + 2.0 * s - c;
            assert!(res.abs() <= 1e-12 * c.max(1.0), "c={c} res={res}");
        }
    }

    #[test]
    fn mu_spot_values() {
        let a = solve_mu(FRAC_PI_2).unwrap();
        assert!((a.phi - FRAC_PI_2).abs() < 1e-15);
        let a = solve_mu(1e-8f64).unwrap();
        assert!((mu(a.phi) - 1e-8).abs() <= 1e-12);
        let oracle = bisect(|p| mu(p) - 1e-8, 1e-12, 1.0);
        assert!((a.phi - oracle).abs() < 1e-15);
        let a = solve_mu(mu(2.0f64)).unwrap();
        assert!((a.phi - 2.0).abs() < 1e-10);
        assert!(solve_mu(f64::INFINITY).is_err());
    }

    #[test]
    fn mu_large_argument_keeps_complement_precision() {
        let c = 1e20f64;
        let a = solve_mu(c).unwrap();
        let expected = (PI / c).sqrt();
        assert!((a.complement / expected - 1.0).abs() < 1e-9);
        assert!(a.residual.abs() <= 1e-12 * c);
    }

    #[test]
    fn q_spot_values() {
        let a = solve_q_phi(FRAC_PI_2 + 1.0).unwrap();
        assert!((a.phi - FRAC_PI_4).abs() < 1e-15);
        let a = solve_q_phi(1e-8f64).unwrap();
        assert!((q_of_phi(a.phi) - 1e-8).abs() <= 1e-12);
        let a = solve_q_phi(q_of_phi(1.2f64)).unwrap();
        assert!((a.phi - 1.2).abs() < 1e-10);
        assert!(solve_q_phi(0.0f64).is_err());
        assert!(solve_q_phi(-1.0f64).is_err());
    }

    #[test]
    fn q_derivatives_match_differences() {
        let a = solve_q_phi(2.3f64).unwrap();
        let d = qb_derivatives(&a);
        let h = 1e-5;
        let phi = a.phi;
        let fd = (q_of_phi(phi + h) - q_of_phi(phi - h)) / (2.0 * h);
        assert!((fd - d.dq).abs() < 1e-6 * d.dq.abs());
        let fdq = |p: f64| 2.0 * (p.cos() + p * p.sin()) / p.cos().powi(3);
        let fd2 = (fdq(phi + h) - fdq(phi - h)) / (2.0 * h);
        assert!((fd2 - d.d2q).abs() < 1e-6 * d.d2q.abs());
        let b = |p: f64| p / p.cos();
        let fdb = (b(phi + h) - b(phi - h)) / (2.0 * h);
        assert!((fdb - d.db).abs() < 1e-6 * d.db.abs());
        let fdb2 = (b(phi + h) - 2.0 * b(phi) + b(phi - h)) / (h * h);
        assert!((fdb2 - d.d2b).abs() < 1e-4 * d.d2b.abs());
    }

    #[test]
    fn single_precision_solvers() {
        let s: f32 = solve_cubic_s(3.0f32).unwrap();
        assert!((s - 1.0).abs() < 1e-6);
        let a = solve_mu(std::f32::consts::FRAC_PI_2).unwrap();
        assert!((a.phi - std::f32::consts::FRAC_PI_2).abs() < 1e-5);
    }
}
