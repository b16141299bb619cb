//! Distances to the boundary of half-spaces, tori and convex polytopes in
//! `ℍⁿ` under the Euclidean, gauge and Carnot-Carathéodory metrics.
//!
//! Gauge and CC distances to an anchored half-space `g₀Π₀` (with
//! `Π₀ = {t > 0}`) are evaluated in the canonical frame: the point is pulled
//! back by `g₀⁻¹` (and by the flip `σ` for lower half-spaces), which is an
//! isometry for both metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::{flip, inverse, multiply, CylCoords, HeisenbergPoint};
use crate::quasi_norm::{cc_distance, gauge_distance};
use crate::roots::{q_of_phi, solve_cubic_s, solve_q_phi};
use crate::scalar::Real;

/// Number of representatives returned for the circle of nearest points.
pub const AXIS_SAMPLES: usize = 16;

/// Below `NEAR_AXIS · √t` the half-space distances use the `r = 0` forms.
pub const NEAR_AXIS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Gauge,
    Cc,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "eucl" => Ok(Metric::Euclidean),
            "gauge" | "n" => Ok(Metric::Gauge),
            "cc" | "carnot" => Ok(Metric::Cc),
            other => Err(invalid("metric", format!("unknown metric `{other}`"))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Gauge => "gauge",
            Metric::Cc => "cc",
        })
    }
}

/// Euclidean distance in the flat coordinates `(x, y, t)`.
pub fn euclidean_distance<T: Real>(a: &HeisenbergPoint<T>, b: &HeisenbergPoint<T>) -> T {
    let dt = a.t() - b.t();
    a.x()
        .iter()
        .zip(b.x())
        .chain(a.y().iter().zip(b.y()))
        .fold(dt * dt, |acc, (&p, &q)| acc + (p - q) * (p - q))
        .sqrt()
}

/// Point-to-point distance for the chosen metric.
pub fn metric_distance<T: Real>(
    metric: Metric,
    a: &HeisenbergPoint<T>,
    b: &HeisenbergPoint<T>,
) -> Result<T> {
    match metric {
        Metric::Euclidean => Ok(euclidean_distance(a, b)),
        Metric::Gauge => gauge_distance(a, b),
        Metric::Cc => cc_distance(a, b),
    }
}

// ---------------------------------------------------------------------------
// Closed forms on the canonical half-space

/// Gauge distance from `(r, t)` to `∂Π₀`: `r s (1 + s²)^{1/4}` with
/// `s³ + 2s = t/r²`, and `√t` on the axis.
pub fn d_gauge_halfspace<T: Real>(r: T, t: T) -> Result<T> {
    check_rt(r, t)?;
    if r < T::lit(NEAR_AXIS) * t.sqrt() {
        return Ok(t.sqrt());
    }
    let s = solve_cubic_s(t / (r * r))?;
    Ok(r * s * (T::one() + s * s).sqrt().sqrt())
}

/// The algebraic form `(2r⁴s² − 3tr²s + t²)^{1/4}`; cancels badly for small
/// `t/r²` and is kept as a cross-check.
pub fn d_gauge_halfspace_quartic<T: Real>(r: T, t: T) -> Result<T> {
    check_rt(r, t)?;
    let r2 = r * r;
    let s = solve_cubic_s(t / r2)?;
    let q = T::two() * r2 * r2 * s * s - T::lit(3.0) * t * r2 * s + t * t;
    Ok(q.max(T::zero()).sqrt().sqrt())
}

/// CC distance from `(r, t)` to `∂Π₀`: `φ r / cos φ` with `Q(φ) = t/r²`, and
/// `√(πt/2)` on the axis.
pub fn d_cc_halfspace<T: Real>(r: T, t: T) -> Result<T> {
    check_rt(r, t)?;
    if r < T::lit(NEAR_AXIS) * t.sqrt() {
        return Ok((T::PI() * t * T::half()).sqrt());
    }
    let angle = solve_q_phi(t / (r * r))?;
    Ok(angle.phi * r / angle.cos_phi())
}

fn check_rt<T: Real>(r: T, t: T) -> Result<()> {
    if !r.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite { name: "(r, t)" });
    }
    if r < T::zero() {
        return Err(invalid("r", "must be nonnegative"));
    }
    if !(t > T::zero()) {
        return Err(Error::OutsideDomain);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Unique,
    Circle,
    TwoBranch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestPointResult<T> {
    pub distance: T,
    pub points: Vec<HeisenbergPoint<T>>,
    pub multiplicity: Multiplicity,
}

fn require_upper<T: Real>(xi: &HeisenbergPoint<T>) -> Result<()> {
    if !xi.t().is_finite() {
        return Err(Error::NonFinite { name: "t" });
    }
    if !(xi.t() > T::zero()) {
        return Err(Error::OutsideDomain);
    }
    Ok(())
}

fn on_plane<T: Real>(x: Vec<T>, y: Vec<T>) -> Result<HeisenbergPoint<T>> {
    HeisenbergPoint::new(x, y, T::zero())
}

/// Gauge-nearest point of `∂Π₀`: `x' = x + s y`, `y' = y − s x`.
pub fn nearest_point_gauge<T: Real>(xi: &HeisenbergPoint<T>) -> Result<NearestPointResult<T>> {
    require_upper(xi)?;
    let r = xi.r();
    if r == T::zero() {
        return Err(Error::AxisMinimizerUndetermined {
            distance: xi.t().sqrt().as_f64(),
        });
    }
    let s = solve_cubic_s(xi.t() / (r * r))?;
    let x = xi.x().iter().zip(xi.y()).map(|(&a, &b)| a + s * b).collect();
    let y = xi.x().iter().zip(xi.y()).map(|(&a, &b)| b - s * a).collect();
    Ok(NearestPointResult {
        distance: d_gauge_halfspace(r, xi.t())?,
        points: vec![on_plane(x, y)?],
        multiplicity: Multiplicity::Unique,
    })
}

/// The point of `Π₀` at gauge distance `rho` whose nearest boundary point is
/// `xi_prime`.
pub fn inverse_nearest_gauge<T: Real>(xi_prime: &HeisenbergPoint<T>, rho: T) -> Result<HeisenbergPoint<T>> {
    if xi_prime.t() != T::zero() {
        return Err(invalid("xi_prime", "must lie on t = 0"));
    }
    if !(rho > T::zero()) || !rho.is_finite() {
        return Err(invalid("rho", "must be positive and finite"));
    }
    let rp2 = xi_prime.r2();
    if rp2 == T::zero() {
        return Err(invalid("xi_prime", "must be off the t-axis"));
    }
    // (1 + s²)/s⁴ = r'⁴/ρ⁴
    let ratio = rp2 / (rho * rho);
    let k = ratio * ratio;
    let s2 = (T::one() + (T::one() + T::lit(4.0) * k).sqrt()) / (T::two() * k);
    let s = s2.sqrt();
    let denom = T::one() + s2;
    let (xp, yp) = (xi_prime.x(), xi_prime.y());
    let x: Vec<T> = xp.iter().zip(yp).map(|(&a, &b)| (a - s * b) / denom).collect();
    let y: Vec<T> = xp.iter().zip(yp).map(|(&a, &b)| (s * a + b) / denom).collect();
    let r2 = rp2 / denom;
    HeisenbergPoint::new(x, y, r2 * s * (s2 + T::two()))
}

/// CC-nearest points of `∂Π₀`: unique off the axis, a circle of radius
/// `√(2t/π)` on it (sampled by [`AXIS_SAMPLES`] points in the `(x₁, y₁)` plane).
pub fn nearest_point_cc<T: Real>(xi: &HeisenbergPoint<T>) -> Result<NearestPointResult<T>> {
    require_upper(xi)?;
    let r = xi.r();
    let t = xi.t();
    if r == T::zero() {
        let n = xi.n();
        let radius = (T::two() * t / T::PI()).sqrt();
        let points = (0..AXIS_SAMPLES)
            .map(|k| {
                let theta = T::TAU() * T::lit(k as f64) / T::lit(AXIS_SAMPLES as f64);
                let mut x = vec![T::zero(); n];
                let mut y = vec![T::zero(); n];
                x[0] = radius * theta.cos();
                y[0] = radius * theta.sin();
                on_plane(x, y)
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(NearestPointResult {
            distance: (T::PI() * t * T::half()).sqrt(),
            points,
            multiplicity: Multiplicity::Circle,
        });
    }
    let angle = solve_q_phi(t / (r * r))?;
    let tan = angle.sin_phi() / angle.cos_phi();
    let x = xi.x().iter().zip(xi.y()).map(|(&a, &b)| a + b * tan).collect();
    let y = xi.x().iter().zip(xi.y()).map(|(&a, &b)| b - a * tan).collect();
    Ok(NearestPointResult {
        distance: d_cc_halfspace(r, t)?,
        points: vec![on_plane(x, y)?],
        multiplicity: Multiplicity::Unique,
    })
}

/// Candidates at CC distance `rho` from `∂Π₀` associated with `xi_prime`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseCcResult<T> {
    /// Defined when `rho < π r'/2`; has `xi_prime` as its nearest point.
    pub off_axis: Option<HeisenbergPoint<T>>,
    /// `(0, 0, 2ρ²/π)`, always at distance `rho`.
    pub axis: HeisenbergPoint<T>,
    pub multiplicity: Multiplicity,
}

impl<T: Real> InverseCcResult<T> {
    pub fn points(&self) -> Vec<HeisenbergPoint<T>> {
        self.off_axis.iter().cloned().chain(std::iter::once(self.axis.clone())).collect()
    }
}

pub fn inverse_nearest_cc<T: Real>(xi_prime: &HeisenbergPoint<T>, rho: T) -> Result<InverseCcResult<T>> {
    if xi_prime.t() != T::zero() {
        return Err(invalid("xi_prime", "must lie on t = 0"));
    }
    if !(rho > T::zero()) || !rho.is_finite() {
        return Err(invalid("rho", "must be positive and finite"));
    }
    let rp = xi_prime.r();
    if rp == T::zero() {
        return Err(invalid("xi_prime", "the origin is nearest to no point of the half-space"));
    }
    let n = xi_prime.n();
    let axis = HeisenbergPoint::new(vec![T::zero(); n], vec![T::zero(); n], T::two() * rho * rho / T::PI())?;
    let phi = rho / rp;
    if phi >= T::FRAC_PI_2() {
        return Ok(InverseCcResult {
            off_axis: None,
            axis,
            multiplicity: Multiplicity::Unique,
        });
    }
    let (s, c) = phi.sin_cos();
    let tan = s / c;
    let c2 = c * c;
    let (xp, yp) = (xi_prime.x(), xi_prime.y());
    let x = xp.iter().zip(yp).map(|(&a, &b)| c2 * (a - tan * b)).collect();
    let y = xp.iter().zip(yp).map(|(&a, &b)| c2 * (b + tan * a)).collect();
    let r = rp * c;
    let off = HeisenbergPoint::new(x, y, r * r * q_of_phi(phi))?;
    Ok(InverseCcResult {
        off_axis: Some(off),
        axis,
        multiplicity: Multiplicity::TwoBranch,
    })
}

/// Whether `candidate` (a point of `∂Π₀`) is among the CC-nearest boundary
/// points of `xi`, to `tol` in distance.
pub fn is_cc_nearest<T: Real>(xi: &HeisenbergPoint<T>, candidate: &HeisenbergPoint<T>, tol: T) -> Result<bool> {
    let d = d_cc_halfspace(xi.r(), xi.t())?;
    Ok((cc_distance(xi, candidate)? - d).abs() <= tol)
}

// ---------------------------------------------------------------------------
// Half-spaces

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `g₀Π₀`
    Upper,
    /// `g₀σ(Π₀)` with `σ(x, y, t) = (x, −y, −t)`
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HalfSpace<T> {
    Anchored {
        anchor: HeisenbergPoint<T>,
        orientation: Orientation,
    },
    /// `{ν·(x, y) > offset}`; only the Euclidean metric and the brute-force
    /// oracle are available.
    Vertical { normal: Vec<T>, offset: T },
}

impl<T: Real> HalfSpace<T> {
    pub fn pi0(n: usize) -> Self {
        HalfSpace::Anchored {
            anchor: HeisenbergPoint::identity(n),
            orientation: Orientation::Upper,
        }
    }

    pub fn anchored(anchor: HeisenbergPoint<T>, orientation: Orientation) -> Self {
        HalfSpace::Anchored { anchor, orientation }
    }

    pub fn vertical(normal: Vec<T>, offset: T) -> Result<Self> {
        if normal.is_empty() || !normal.len().is_multiple_of(2) {
            return Err(invalid("normal", "length must be 2n"));
        }
        if normal.iter().all(|v| *v == T::zero()) || normal.iter().any(|v| !v.is_finite()) {
            return Err(invalid("normal", "must be finite and nonzero"));
        }
        Ok(HalfSpace::Vertical { normal, offset })
    }

    pub fn n(&self) -> usize {
        match self {
            HalfSpace::Anchored { anchor, .. } => anchor.n(),
            HalfSpace::Vertical { normal, .. } => normal.len() / 2,
        }
    }

    /// `σᵒ(g₀⁻¹ ξ)`, the point in the frame where the half-space is `Π₀`.
    pub fn to_canonical(&self, xi: &HeisenbergPoint<T>) -> Result<HeisenbergPoint<T>> {
        match self {
            HalfSpace::Anchored { anchor, orientation } => {
                let p = multiply(&inverse(anchor), xi)?;
                Ok(match orientation {
                    Orientation::Upper => p,
                    Orientation::Lower => flip(&p),
                })
            }
            HalfSpace::Vertical { .. } => Err(Error::Unsupported(
                "vertical half-spaces have no canonical frame".into(),
            )),
        }
    }

    pub fn from_canonical(&self, p: &HeisenbergPoint<T>) -> Result<HeisenbergPoint<T>> {
        match self {
            HalfSpace::Anchored { anchor, orientation } => {
                let q = match orientation {
                    Orientation::Upper => p.clone(),
                    Orientation::Lower => flip(p),
                };
                multiply(anchor, &q)
            }
            HalfSpace::Vertical { .. } => Err(Error::Unsupported(
                "vertical half-spaces have no canonical frame".into(),
            )),
        }
    }

    /// An affine function positive exactly on the half-space.
    pub fn level(&self, xi: &HeisenbergPoint<T>) -> Result<T> {
        match self {
            HalfSpace::Anchored { .. } => Ok(self.to_canonical(xi)?.t()),
            HalfSpace::Vertical { normal, offset } => {
                if normal.len() != 2 * xi.n() {
                    return Err(Error::DimensionMismatch {
                        expected: normal.len(),
                        found: 2 * xi.n(),
                    });
                }
                let h = xi.horizontal();
                Ok(normal.iter().zip(&h).fold(-*offset, |acc, (&a, &b)| acc + a * b))
            }
        }
    }

    pub fn contains(&self, xi: &HeisenbergPoint<T>) -> Result<bool> {
        Ok(self.level(xi)? > T::zero())
    }

    /// Euclidean length of the gradient of [`Self::level`].
    fn level_gradient_norm(&self) -> T {
        match self {
            HalfSpace::Anchored { anchor, .. } => {
                (T::one() + T::lit(4.0) * anchor.r2()).sqrt()
            }
            HalfSpace::Vertical { normal, .. } => {
                normal.iter().fold(T::zero(), |a, &v| a + v * v).sqrt()
            }
        }
    }

    /// Distance from an interior point to the boundary.
    pub fn distance(&self, xi: &HeisenbergPoint<T>, metric: Metric) -> Result<T> {
        let level = self.level(xi)?;
        if !(level > T::zero()) {
            return Err(Error::OutsideDomain);
        }
        match (metric, self) {
            (Metric::Euclidean, _) => Ok(level / self.level_gradient_norm()),
            (_, HalfSpace::Vertical { .. }) => Err(Error::Unsupported(format!(
                "no closed form for the {metric} distance to a vertical half-space"
            ))),
            (Metric::Gauge, _) => {
                let p = self.to_canonical(xi)?;
                d_gauge_halfspace(p.r(), p.t())
            }
            (Metric::Cc, _) => {
                let p = self.to_canonical(xi)?;
                d_cc_halfspace(p.r(), p.t())
            }
        }
    }

    /// Nearest boundary points for the gauge or CC metric, in the original frame.
    pub fn nearest_points(&self, xi: &HeisenbergPoint<T>, metric: Metric) -> Result<NearestPointResult<T>> {
        let p = self.to_canonical(xi)?;
        let res = match metric {
            Metric::Gauge => nearest_point_gauge(&p)?,
            Metric::Cc => nearest_point_cc(&p)?,
            Metric::Euclidean => {
                let level = self.level(xi)?;
                if !(level > T::zero()) {
                    return Err(Error::OutsideDomain);
                }
                let HalfSpace::Anchored { anchor, orientation } = self else {
                    unreachable!("to_canonical rejects vertical half-spaces")
                };
                // gradient of the level in original coordinates: (2y₀, −2x₀, 1), up to σ
                let sgn = match orientation {
                    Orientation::Upper => T::one(),
                    Orientation::Lower => -T::one(),
                };
                let g2 = T::one() + T::lit(4.0) * anchor.r2();
                let step = level / g2 * sgn;
                let x = xi.x().iter().zip(anchor.y()).map(|(&a, &y0)| a - step * T::two() * y0).collect();
                let y = xi.y().iter().zip(anchor.x()).map(|(&b, &x0)| b + step * T::two() * x0).collect();
                let foot = HeisenbergPoint::new(x, y, xi.t() - step)?;
                return Ok(NearestPointResult {
                    distance: level / g2.sqrt(),
                    points: vec![foot],
                    multiplicity: Multiplicity::Unique,
                });
            }
        };
        Ok(NearestPointResult {
            distance: res.distance,
            points: res
                .points
                .iter()
                .map(|q| self.from_canonical(q))
                .collect::<Result<Vec<_>>>()?,
            multiplicity: res.multiplicity,
        })
    }
}

// ---------------------------------------------------------------------------
// Torus

/// `{(r − R)² + t² < ρ²}` in cylindrical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Torus<T> {
    pub big_r: T,
    pub rho: T,
    pub n: usize,
}

impl<T: Real> Torus<T> {
    pub fn new(big_r: T, rho: T, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if !(rho > T::zero()) || !(big_r > rho) || !big_r.is_finite() {
            return Err(invalid("R, rho", "need R > rho > 0"));
        }
        Ok(Self { big_r, rho, n })
    }

    /// `|(r − R, t)|`, the distance to the core circle in the `(r, t)` half-plane.
    pub fn core_distance(&self, r: T, t: T) -> T {
        (r - self.big_r).hypot(t)
    }

    pub fn contains(&self, r: T, t: T) -> bool {
        self.core_distance(r, t) < self.rho
    }

    /// Boundary point with tube angle `theta`, horizontal direction `omega`.
    pub fn boundary_point(&self, theta: T, omega: &[T]) -> Result<HeisenbergPoint<T>> {
        let r = self.big_r + self.rho * theta.cos();
        HeisenbergPoint::from_cyl(r, omega, self.rho * theta.sin())
    }
}

/// `ρ − √((r − R)² + t²)`.
pub fn d_eucl_torus<T: Real>(torus: &Torus<T>, p: &CylCoords<T>) -> Result<T> {
    let core = torus.core_distance(p.r, p.t);
    if !core.is_finite() {
        return Err(Error::NonFinite { name: "point" });
    }
    if core > torus.rho {
        return Err(Error::OutsideDomain);
    }
    Ok(torus.rho - core)
}

// ---------------------------------------------------------------------------
// Polytopes

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolytope<T> {
    pub faces: Vec<HalfSpace<T>>,
    /// `(lo, hi)` per flat coordinate `(x, y, t)`.
    pub bounding_box: Vec<(T, T)>,
}

/// Distance to a polytope together with the face attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolytopeDistance<T> {
    pub distance: T,
    pub face: usize,
}

/// Outcome of the sampling check on a polytope description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeCheck {
    pub samples: usize,
    pub interior: usize,
    /// Per face: attained the minimum distance at some interior sample.
    pub active: Vec<bool>,
}

impl<T: Real> ConvexPolytope<T> {
    pub fn new(faces: Vec<HalfSpace<T>>, bounding_box: Vec<(T, T)>) -> Result<Self> {
        let Some(first) = faces.first() else {
            return Err(invalid("faces", "need at least one face"));
        };
        let n = first.n();
        if let Some(bad) = faces.iter().find(|f| f.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.n(),
            });
        }
        if bounding_box.len() != 2 * n + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * n + 1,
                found: bounding_box.len(),
            });
        }
        if bounding_box.iter().any(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(invalid("bounding_box", "each interval needs finite lo < hi"));
        }
        Ok(Self { faces, bounding_box })
    }

    /// The cube `(0, 1)^{2n+1}`: vertical faces in `x`, `y`, anchored faces in `t`.
    pub fn unit_cube(n: usize) -> Self {
        let mut faces = Vec::with_capacity(4 * n + 2);
        for i in 0..2 * n {
            let mut e = vec![T::zero(); 2 * n];
            e[i] = T::one();
            faces.push(HalfSpace::Vertical { normal: e.clone(), offset: T::zero() });
            e[i] = -T::one();
            faces.push(HalfSpace::Vertical { normal: e, offset: -T::one() });
        }
        faces.push(HalfSpace::pi0(n));
        let top = HeisenbergPoint::identity(n).with_t(T::one());
        faces.push(HalfSpace::anchored(top, Orientation::Lower));
        Self {
            faces,
            bounding_box: vec![(T::zero(), T::one()); 2 * n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.faces[0].n()
    }

    pub fn contains(&self, xi: &HeisenbergPoint<T>) -> Result<bool> {
        for f in &self.faces {
            if !f.contains(xi)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `min_k d_k(ξ)` over the faces (ξ interior).
    pub fn distance_with_face(&self, xi: &HeisenbergPoint<T>, metric: Metric) -> Result<PolytopeDistance<T>> {
        if metric != Metric::Euclidean
            && self.faces.iter().any(|f| matches!(f, HalfSpace::Vertical { .. }))
        {
            return Err(Error::Unsupported(format!(
                "{metric} distance needs every face anchored"
            )));
        }
        let mut best = PolytopeDistance {
            distance: T::infinity(),
            face: 0,
        };
        for (k, f) in self.faces.iter().enumerate() {
            let d = f.distance(xi, metric)?;
            if d < best.distance {
                best = PolytopeDistance { distance: d, face: k };
            }
        }
        Ok(best)
    }

    pub fn distance(&self, xi: &HeisenbergPoint<T>, metric: Metric) -> Result<T> {
        Ok(self.distance_with_face(xi, metric)?.distance)
    }

    fn sample_box(&self, rng: &mut ChaCha8Rng) -> Vec<T> {
        self.bounding_box
            .iter()
            .map(|&(lo, hi)| lo + (hi - lo) * T::lit(rng.gen::<f64>()))
            .collect()
    }

    fn point_from_flat(&self, v: &[T]) -> Result<HeisenbergPoint<T>> {
        let n = self.n();
        HeisenbergPoint::new(v[..n].to_vec(), v[n..2 * n].to_vec(), v[2 * n])
    }

    /// Samples the bounding box to confirm a nonempty interior and that every
    /// face is active. Advisory only.
    pub fn check(&self, samples: usize, seed: u64) -> Result<PolytopeCheck> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut active = vec![false; self.faces.len()];
        let mut interior = 0;
        for _ in 0..samples {
            let v = self.sample_box(&mut rng);
            let xi = self.point_from_flat(&v)?;
            if self.contains(&xi)? {
                interior += 1;
                active[self.distance_with_face(&xi, Metric::Euclidean)?.face] = true;
            }
        }
        Ok(PolytopeCheck {
            samples,
            interior,
            active,
        })
    }

    /// Random points of face `k` lying in the box and in the closure of the
    /// other faces.
    fn face_samples(&self, k: usize, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<HeisenbergPoint<T>>> {
        let n = self.n();
        let tol = T::lit(1e-12);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let v = self.sample_box(rng);
            let p = self.point_from_flat(&v)?;
            let q = match &self.faces[k] {
                HalfSpace::Vertical { normal, offset } => {
                    let nn = normal.iter().fold(T::zero(), |a, &w| a + w * w);
                    let h = p.horizontal();
                    let lvl = normal.iter().zip(&h).fold(-*offset, |a, (&w, &c)| a + w * c);
                    let h: Vec<T> = h.iter().zip(normal).map(|(&c, &w)| c - lvl / nn * w).collect();
                    HeisenbergPoint::new(h[..n].to_vec(), h[n..].to_vec(), p.t())?
                }
                face @ HalfSpace::Anchored { .. } => {
                    // move vertically onto the face: the level is t minus an
                    // affine function of (x, y), with t-coefficient ±1
                    let lvl = face.level(&p)?;
                    let probe = face.level(&p.with_t(p.t() + T::one()))? - lvl;
                    p.with_t(p.t() - lvl / probe)
                }
            };
            let flat = q.horizontal().into_iter().chain(std::iter::once(q.t()));
            let in_box = flat
                .zip(&self.bounding_box)
                .all(|(c, &(lo, hi))| c >= lo - tol && c <= hi + tol);
            if !in_box {
                continue;
            }
            let mut ok = true;
            for (j, f) in self.faces.iter().enumerate() {
                if j != k && f.level(&q)? < -tol {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(q);
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Brute-force oracle

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Domain<T> {
    HalfSpace(HalfSpace<T>),
    Torus(Torus<T>),
    Polytope(ConvexPolytope<T>),
}

fn orthonormal_pair<T: Real>(h: &[T]) -> (Vec<T>, Vec<T>) {
    let m = h.len();
    let n = m / 2;
    let norm = h.iter().fold(T::zero(), |a, &v| a + v * v).sqrt();
    let e1: Vec<T> = if norm > T::zero() {
        h.iter().map(|&v| v / norm).collect()
    } else {
        let mut e = vec![T::zero(); m];
        e[0] = T::one();
        e
    };
    // J(x, y) = (y, −x) is orthogonal to (x, y)
    let e2 = (0..m)
        .map(|i| if i < n { e1[n + i] } else { -e1[i - n] })
        .collect();
    (e1, e2)
}

fn split_counts(samples: usize) -> (usize, usize) {
    let a = ((samples as f64).sqrt().ceil() as usize).max(2);
    let b = (samples / a).max(2);
    (a, b)
}

/// Minimum of the metric distance over `samples` deterministic boundary
/// points. An upper bound of the true distance that converges as the grid is
/// refined.
pub fn brute_force_boundary_distance<T: Real>(
    domain: &Domain<T>,
    xi: &HeisenbergPoint<T>,
    metric: Metric,
    samples: usize,
) -> Result<T> {
    if samples == 0 {
        return Err(invalid("samples", "must be positive"));
    }
    let points = boundary_samples(domain, xi, samples)?;
    points
        .par_iter()
        .map(|q| metric_distance(metric, xi, q))
        .try_reduce(T::infinity, |a, b| Ok(a.min(b)))
}

/// The boundary sample used by [`brute_force_boundary_distance`].
pub fn boundary_samples<T: Real>(
    domain: &Domain<T>,
    xi: &HeisenbergPoint<T>,
    samples: usize,
) -> Result<Vec<HeisenbergPoint<T>>> {
    match domain {
        Domain::HalfSpace(h @ HalfSpace::Anchored { .. }) => {
            let p = h.to_canonical(xi)?;
            let hz = p.horizontal();
            let (e1, e2) = orthonormal_pair(&hz);
            let scale = p.r().max(p.t().abs().sqrt()).max(T::lit(1e-300));
            let radius = T::lit(8.0) * scale;
            let (nr, nt) = split_counts(samples);
            let n = p.n();
            let mut out = Vec::with_capacity(nr * nt);
            for i in 0..nr {
                let rad = radius * T::lit(i as f64 / (nr - 1) as f64);
                for j in 0..nt {
                    let th = T::TAU() * T::lit(j as f64 / nt as f64);
                    let (s, c) = th.sin_cos();
                    let q: Vec<T> = (0..2 * n).map(|k| hz[k] + rad * (c * e1[k] + s * e2[k])).collect();
                    let b = HeisenbergPoint::new(q[..n].to_vec(), q[n..].to_vec(), T::zero())?;
                    out.push(h.from_canonical(&b)?);
                }
            }
            Ok(out)
        }
        Domain::HalfSpace(HalfSpace::Vertical { normal, offset }) => {
            let n = xi.n();
            if normal.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: normal.len(),
                    found: 2 * n,
                });
            }
            let nn = normal.iter().fold(T::zero(), |a, &w| a + w * w).sqrt();
            let unit: Vec<T> = normal.iter().map(|&w| w / nn).collect();
            let h = xi.horizontal();
            let lvl = unit.iter().zip(&h).fold(-*offset / nn, |a, (&w, &c)| a + w * c);
            let foot: Vec<T> = h.iter().zip(&unit).map(|(&c, &w)| c - lvl * w).collect();
            let (_, tangent) = orthonormal_pair(&unit);
            let scale = lvl.abs().max(xi.r()).max(xi.t().abs().sqrt()).max(T::lit(1e-300));
            let half = T::lit(8.0) * scale;
            let (na, nb) = split_counts(samples);
            let (na, nb) = (na | 1, nb | 1);
            let mut out = Vec::with_capacity(na * nb);
            for i in 0..na {
                let a = half * T::lit(2.0 * i as f64 / (na - 1) as f64 - 1.0);
                for j in 0..nb {
                    let b = half * T::lit(2.0 * j as f64 / (nb - 1) as f64 - 1.0);
                    let q: Vec<T> = foot.iter().zip(&tangent).map(|(&f, &e)| f + a * e).collect();
                    out.push(HeisenbergPoint::new(q[..n].to_vec(), q[n..].to_vec(), xi.t() + b)?);
                }
            }
            Ok(out)
        }
        Domain::Torus(torus) => {
            let n = xi.n();
            if n != torus.n {
                return Err(Error::DimensionMismatch {
                    expected: torus.n,
                    found: n,
                });
            }
            let (e1, e2) = orthonormal_pair(&xi.horizontal());
            let (ntheta, nalpha) = split_counts(samples);
            let mut out = Vec::with_capacity(ntheta * nalpha);
            for i in 0..ntheta {
                let theta = T::TAU() * T::lit(i as f64 / ntheta as f64);
                for j in 0..nalpha {
                    let alpha = T::TAU() * T::lit(j as f64 / nalpha as f64);
                    let (s, c) = alpha.sin_cos();
                    let omega: Vec<T> = e1.iter().zip(&e2).map(|(&a, &b)| c * a + s * b).collect();
                    out.push(torus.boundary_point(theta, &omega)?);
                }
            }
            Ok(out)
        }
        Domain::Polytope(poly) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_db0b);
            let per_face = (samples / poly.faces.len()).max(1);
            let mut out = Vec::new();
            for k in 0..poly.faces.len() {
                out.extend(poly.face_samples(k, per_face, &mut rng)?);
            }
            if out.is_empty() {
                return Err(Error::NonConvergence("no boundary samples inside the box".into()));
            }
            Ok(out)
        }
    }
}
