//! Group algebra on the Heisenberg group and on general step-two groups.
//!
//! The Heisenberg law used throughout is
//!
//! ```text
//! (x, y, t)(x', y', t') = (x + x', y + y', t + t' + 2(x·y' - y·x'))
//! ```
//!
//! with identity `(0, 0, 0)`, inverse `(-x, -y, -t)` and dilations
//! `(λx, λy, λ²t)`. A step-two group with first stratum of dimension `m`
//! multiplies as `a·b = (a₁ + b₁, a₂ + b₂ + ½ a₁ᵀ B b₁)` where `B` is a stack
//! of `m×m` matrices, one per second-stratum coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Default tolerance for membership and equality predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A point `(x, y, t)` of the Heisenberg group `ℍⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergPoint<T> {
    x: Vec<T>,
    y: Vec<T>,
    t: T,
}

impl<T: Real> HeisenbergPoint<T> {
    pub fn new(x: Vec<T>, y: Vec<T>, t: T) -> Result<Self> {
        if x.is_empty() {
            return Err(invalid("n", "group parameter must be at least 1"));
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if !t.is_finite() || x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { name: "point" });
        }
        Ok(Self { x, y, t })
    }

    /// Convenience constructor for `ℍ¹`.
    pub fn h1(x: T, y: T, t: T) -> Self {
        Self::new(vec![x], vec![y], t).expect("finite coordinates")
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "group parameter must be at least 1");
        Self {
            x: vec![T::zero(); n],
            y: vec![T::zero(); n],
            t: T::zero(),
        }
    }

    /// Builds the point `(r·ω, t)` from cylindrical data with `ω ∈ S^{2n-1}`
    /// given as a `2n` vector `(ωx, ωy)`.
    pub fn from_cyl(r: T, omega: &[T], t: T) -> Result<Self> {
        if !omega.len().is_multiple_of(2) || omega.is_empty() {
            return Err(invalid("omega", "length must be a positive even number"));
        }
        let n = omega.len() / 2;
        let x = omega[..n].iter().map(|&w| r * w).collect();
        let y = omega[n..].iter().map(|&w| r * w).collect();
        Self::new(x, y, t)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// `|x|² + |y|²`.
    pub fn r2(&self) -> T {
        self.x
            .iter()
            .chain(self.y.iter())
            .fold(T::zero(), |acc, &v| acc + v * v)
    }

    pub fn r(&self) -> T {
        self.r2().sqrt()
    }

    /// Horizontal part `(x, y)` as one `2n` vector.
    pub fn horizontal(&self) -> Vec<T> {
        self.x.iter().chain(self.y.iter()).copied().collect()
    }

    pub fn cyl(&self) -> CylCoords<T> {
        let r = self.r();
        let omega = if r > T::zero() {
            Some(self.horizontal().into_iter().map(|v| v / r).collect())
        } else {
            None
        };
        CylCoords {
            r,
            omega,
            t: self.t,
        }
    }

    pub fn with_t(&self, t: T) -> Self {
        Self {
            x: self.x.clone(),
            y: self.y.clone(),
            t,
        }
    }

    /// Componentwise comparison in the sup norm.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.n() == other.n()
            && (self.t - other.t).abs() <= tol
            && self
                .x
                .iter()
                .zip(&other.x)
                .chain(self.y.iter().zip(&other.y))
                .all(|(a, b)| (*a - *b).abs() <= tol)
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }
}

/// Cylindrical coordinates `(r, ω, t)`; `ω` is absent on the t-axis or when
/// only the symmetric part `(r, t)` matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylCoords<T> {
    pub r: T,
    pub omega: Option<Vec<T>>,
    pub t: T,
}

impl<T: Real> CylCoords<T> {
    /// Symmetric coordinates without an angular part.
    pub fn rt(r: T, t: T) -> Result<Self> {
        if !r.is_finite() || !t.is_finite() {
            return Err(Error::NonFinite { name: "cylindrical coordinates" });
        }
        if r < T::zero() {
            return Err(invalid("r", "must be nonnegative"));
        }
        Ok(Self { r, omega: None, t })
    }

    pub fn with_omega(r: T, omega: Vec<T>, t: T) -> Result<Self> {
        let c = Self::rt(r, t)?;
        let norm = omega.iter().fold(T::zero(), |a, &w| a + w * w).sqrt();
        if (norm - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) {
            return Err(invalid("omega", "must be a unit vector"));
        }
        Ok(Self {
            omega: Some(omega),
            ..c
        })
    }
}

/// Group product `ab` on `ℍⁿ`.
pub fn multiply<T: Real>(a: &HeisenbergPoint<T>, b: &HeisenbergPoint<T>) -> Result<HeisenbergPoint<T>> {
    a.check_same_n(b)?;
    let symp = a
        .x
        .iter()
        .zip(&b.y)
        .zip(a.y.iter().zip(&b.x))
        .fold(T::zero(), |acc, ((&xa, &yb), (&ya, &xb))| acc + xa * yb - ya * xb);
    Ok(HeisenbergPoint {
        x: a.x.iter().zip(&b.x).map(|(&p, &q)| p + q).collect(),
        y: a.y.iter().zip(&b.y).map(|(&p, &q)| p + q).collect(),
        t: a.t + b.t + T::two() * symp,
    })
}

pub fn inverse<T: Real>(a: &HeisenbergPoint<T>) -> HeisenbergPoint<T> {
    HeisenbergPoint {
        x: a.x.iter().map(|&v| -v).collect(),
        y: a.y.iter().map(|&v| -v).collect(),
        t: -a.t,
    }
}

/// Anisotropic dilation `δ_λ(x, y, t) = (λx, λy, λ²t)`.
pub fn dilate<T: Real>(a: &HeisenbergPoint<T>, lambda: T) -> Result<HeisenbergPoint<T>> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(invalid("lambda", "dilation factor must be positive and finite"));
    }
    Ok(HeisenbergPoint {
        x: a.x.iter().map(|&v| lambda * v).collect(),
        y: a.y.iter().map(|&v| lambda * v).collect(),
        t: lambda * lambda * a.t,
    })
}

/// The group automorphism `(x, y, t) ↦ (x, -y, -t)`. It preserves the gauge
/// and Carnot-Carathéodory norms and exchanges `{t > 0}` with `{t < 0}`.
pub fn flip<T: Real>(a: &HeisenbergPoint<T>) -> HeisenbergPoint<T> {
    HeisenbergPoint {
        x: a.x.clone(),
        y: a.y.iter().map(|&v| -v).collect(),
        t: -a.t,
    }
}

/// Dense `m×m` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(invalid("B", "matrix must be nonempty"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            let mut row = T::zero();
            for j in 0..self.dim {
                row = row + self.get(i, j) * v[j];
            }
            acc = acc + u[i] * row;
        }
        acc
    }
}

/// A stratified group of step two on `ℝ^n = ℝ^m ⊕ ℝ^{n-m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTwoGroup<T> {
    m: usize,
    n: usize,
    b: Vec<SquareMatrix<T>>,
}

/// An element `(g¹, g²)` of a [`StepTwoGroup`], strata stored separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement<T> {
    pub g1: Vec<T>,
    pub g2: Vec<T>,
}

impl<T: Real> GroupElement<T> {
    pub fn new(g1: Vec<T>, g2: Vec<T>) -> Self {
        Self { g1, g2 }
    }

    /// Flat coordinates `(g¹, g²)`.
    pub fn flat(&self) -> Vec<T> {
        self.g1.iter().chain(self.g2.iter()).copied().collect()
    }

    /// Euclidean affine combination `(1-λ)a + λb` in flat coordinates.
    pub fn lerp(a: &Self, b: &Self, lambda: T) -> Self {
        let mix = |u: &[T], v: &[T]| -> Vec<T> {
            u.iter()
                .zip(v)
                .map(|(&p, &q)| (T::one() - lambda) * p + lambda * q)
                .collect()
        };
        Self {
            g1: mix(&a.g1, &b.g1),
            g2: mix(&a.g2, &b.g2),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.g1.len() == other.g1.len()
            && self.g2.len() == other.g2.len()
            && self
                .flat()
                .iter()
                .zip(other.flat().iter())
                .all(|(a, b)| (*a - *b).abs() <= tol)
    }
}

impl<T: Real> StepTwoGroup<T> {
    /// `m` is the first-stratum dimension, `n` the total dimension; one
    /// matrix per second-stratum coordinate.
    pub fn new(m: usize, n: usize, b: Vec<SquareMatrix<T>>) -> Result<Self> {
        if m == 0 || n <= m {
            return Err(invalid("dimensions", format!("need 0 < m < n, got m={m}, n={n}")));
        }
        if b.len() != n - m {
            return Err(Error::DimensionMismatch {
                expected: n - m,
                found: b.len(),
            });
        }
        if let Some(bad) = b.iter().find(|mat| mat.dim() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.dim(),
            });
        }
        Ok(Self { m, n, b })
    }

    /// `ℍⁿ` written as a step-two group: `m = 2n`, one center coordinate, and
    /// `B = [[0, 4I], [-4I, 0]]` so that `½ a₁ᵀ B b₁ = 2(x·y' - y·x')`.
    pub fn heisenberg(n: usize) -> Self {
        assert!(n >= 1, "group parameter must be at least 1");
        let m = 2 * n;
        let mut b = SquareMatrix::zeros(m);
        let four = T::lit(4.0);
        for i in 0..n {
            b.set(i, n + i, four);
            b.set(n + i, i, -four);
        }
        Self { m, n: m + 1, b: vec![b] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrices(&self) -> &[SquareMatrix<T>] {
        &self.b
    }

    pub fn identity(&self) -> GroupElement<T> {
        GroupElement {
            g1: vec![T::zero(); self.m],
            g2: vec![T::zero(); self.n - self.m],
        }
    }

    pub fn check(&self, g: &GroupElement<T>) -> Result<()> {
        if g.g1.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: g.g1.len(),
            });
        }
        if g.g2.len() != self.n - self.m {
            return Err(Error::DimensionMismatch {
                expected: self.n - self.m,
                found: g.g2.len(),
            });
        }
        Ok(())
    }

    /// `½ (u ᵀ B⁽ⁱ⁾ v)_i`, one entry per second-stratum coordinate.
    fn correction(&self, u: &[T], v: &[T]) -> Vec<T> {
        self.b.iter().map(|mat| T::half() * mat.bilinear(u, v)).collect()
    }

    /// Product `ab = (a₁ + b₁, a₂ + b₂ + ½ a₁ᵀ B b₁)`.
    pub fn multiply(&self, a: &GroupElement<T>, b: &GroupElement<T>) -> Result<GroupElement<T>> {
        self.check(a)?;
        self.check(b)?;
        let corr = self.correction(&a.g1, &b.g1);
        Ok(GroupElement {
            g1: a.g1.iter().zip(&b.g1).map(|(&p, &q)| p + q).collect(),
            g2: a
                .g2
                .iter()
                .zip(&b.g2)
                .zip(corr)
                .map(|((&p, &q), c)| p + q + c)
                .collect(),
        })
    }

    /// `g⁻¹ = (-g₁, -g₂ + ½ g₁ᵀ B g₁)`.
    pub fn inverse(&self, g: &GroupElement<T>) -> Result<GroupElement<T>> {
        self.check(g)?;
        let corr = self.correction(&g.g1, &g.g1);
        Ok(GroupElement {
            g1: g.g1.iter().map(|&v| -v).collect(),
            g2: g.g2.iter().zip(corr).map(|(&v, c)| -v + c).collect(),
        })
    }

    pub fn dilate(&self, g: &GroupElement<T>, lambda: T) -> Result<GroupElement<T>> {
        self.check(g)?;
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(invalid("lambda", "dilation factor must be positive and finite"));
        }
        Ok(GroupElement {
            g1: g.g1.iter().map(|&v| lambda * v).collect(),
            g2: g.g2.iter().map(|&v| lambda * lambda * v).collect(),
        })
    }

    /// The point of the horizontal plane `H_g` reached from `g` by the
    /// first-stratum displacement `v`: `g·(v, 0)`.
    pub fn horizontal_point(&self, g: &GroupElement<T>, v: &[T]) -> Result<GroupElement<T>> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: v.len(),
            });
        }
        let step = GroupElement {
            g1: v.to_vec(),
            g2: vec![T::zero(); self.n - self.m],
        };
        self.multiply(g, &step)
    }

    /// Whether `gp ∈ H_g`, i.e. the second stratum of `g⁻¹ gp` vanishes to `tol`.
    pub fn in_horizontal_plane(&self, g: &GroupElement<T>, gp: &GroupElement<T>, tol: T) -> Result<bool> {
        if tol < T::zero() {
            return Err(invalid("tol", "must be nonnegative"));
        }
        let rel = self.multiply(&self.inverse(g)?, gp)?;
        Ok(rel.g2.iter().all(|c| c.abs() <= tol))
    }

    /// `g_λ = g δ_λ(g⁻¹ g')`.
    pub fn convex_combination(
        &self,
        g: &GroupElement<T>,
        gp: &GroupElement<T>,
        lambda: T,
    ) -> Result<GroupElement<T>> {
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(invalid("lambda", "must lie in [0, 1]"));
        }
        let rel = self.multiply(&self.inverse(g)?, gp)?;
        // δ_0 collapses everything to the identity; handle it without the
        // positivity check on the dilation factor.
        let scaled = if lambda == T::zero() {
            self.identity()
        } else {
            self.dilate(&rel, lambda)?
        };
        self.multiply(g, &scaled)
    }

    pub fn from_heisenberg(&self, p: &HeisenbergPoint<T>) -> Result<GroupElement<T>> {
        if self.m != 2 * p.n() || self.n != self.m + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: 2 * p.n(),
            });
        }
        Ok(GroupElement {
            g1: p.horizontal(),
            g2: vec![p.t()],
        })
    }

    pub fn to_heisenberg(&self, g: &GroupElement<T>) -> Result<HeisenbergPoint<T>> {
        self.check(g)?;
        if !self.m.is_multiple_of(2) || self.n != self.m + 1 {
            return Err(Error::Unsupported("group is not shaped like ℍⁿ".into()));
        }
        let half = self.m / 2;
        HeisenbergPoint::new(g.g1[..half].to_vec(), g.g1[half..].to_vec(), g.g2[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, t: f64) -> HeisenbergPoint<f64> {
        HeisenbergPoint::h1(x, y, t)
    }

    #[test]
    fn identity_is_neutral() {
        let xi = p(0.3, -1.2, 4.0);
        let e = HeisenbergPoint::identity(1);
        assert_eq!(multiply(&e, &xi).unwrap(), xi);
        assert_eq!(multiply(&xi, &e).unwrap(), xi);
    }

    #[test]
    fn product_of_basis_vectors() {
        let out = multiply(&p(1.0, 0.0, 0.0), &p(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(out, p(1.0, 1.0, 2.0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse(&p(1.0, 2.0, 3.0)), p(-1.0, -2.0, -3.0));
        let e = HeisenbergPoint::<f64>::identity(2);
        assert!(inverse(&e).approx_eq(&e, 0.0));
    }

    #[test]
    fn dilation_examples() {
        let xi = p(1.0, 1.0, 1.0);
        assert_eq!(dilate(&xi, 1.0).unwrap(), xi);
        assert_eq!(dilate(&xi, 2.0).unwrap(), p(2.0, 2.0, 4.0));
        assert!(matches!(dilate(&xi, 0.0), Err(Error::InvalidParameter { .. })));
        assert!(matches!(dilate(&xi, -1.0), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = HeisenbergPoint::<f64>::identity(1);
        let b = HeisenbergPoint::<f64>::identity(2);
        assert_eq!(
            multiply(&a, &b),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
        assert!(HeisenbergPoint::new(vec![1.0], vec![1.0, 2.0], 0.0).is_err());
        assert!(HeisenbergPoint::new(vec![f64::NAN], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn skew_correction_vanishes_on_the_diagonal() {
        let g = StepTwoGroup::<f64>::heisenberg(1);
        let a = GroupElement::new(vec![0.7, -0.4], vec![0.0]);
        let sq = g.multiply(&a, &a).unwrap();
        assert_eq!(sq.g2, vec![0.0]);
    }

    #[test]
    fn horizontal_plane_examples() {
        let g = StepTwoGroup::<f64>::heisenberg(1);
        let base = GroupElement::new(vec![1.0, 0.0], vec![0.0]);
        assert!(g.in_horizontal_plane(&base, &base, 1e-12).unwrap());
        let gp = g.horizontal_point(&base, &[1.0, 1.0]).unwrap();
        assert!(gp.approx_eq(&GroupElement::new(vec![2.0, 1.0], vec![2.0]), 1e-15));
        assert!(g.in_horizontal_plane(&base, &gp, 1e-12).unwrap());
        let vertical = GroupElement::new(vec![1.0, 0.0], vec![1.0]);
        assert!(!g.in_horizontal_plane(&base, &vertical, 1e-12).unwrap());
        assert!(g.in_horizontal_plane(&base, &base, -1.0).is_err());
    }

    #[test]
    fn convex_combination_endpoints_and_range() {
        let g = StepTwoGroup::<f64>::heisenberg(1);
        let a = GroupElement::new(vec![0.2, 0.5], vec![0.1]);
        let b = GroupElement::new(vec![-0.3, 0.9], vec![1.4]);
        assert!(g.convex_combination(&a, &b, 0.0).unwrap().approx_eq(&a, 1e-15));
        assert!(g.convex_combination(&a, &b, 1.0).unwrap().approx_eq(&b, 1e-14));
        assert!(g.convex_combination(&a, &b, 1.5).is_err());
        assert!(g.convex_combination(&a, &b, -0.1).is_err());
    }

    #[test]
    fn step_two_constructor_validates_shapes() {
        assert!(StepTwoGroup::<f64>::new(2, 2, vec![]).is_err());
        assert!(StepTwoGroup::<f64>::new(2, 3, vec![]).is_err());
        assert!(StepTwoGroup::new(2, 3, vec![SquareMatrix::<f64>::zeros(3)]).is_err());
        assert!(StepTwoGroup::new(2, 3, vec![SquareMatrix::<f64>::zeros(2)]).is_ok());
    }

    #[test]
    fn cylindrical_coordinates() {
        let xi = HeisenbergPoint::new(vec![3.0, 0.0], vec![0.0, 4.0], -1.0).unwrap();
        let c = xi.cyl();
        assert_eq!(c.r, 5.0);
        assert_eq!(c.omega.unwrap(), vec![0.6, 0.0, 0.0, 0.8]);
        assert!(CylCoords::with_omega(1.0, vec![1.0, 1.0], 0.0).is_err());
        assert!(CylCoords::<f64>::rt(-1.0, 0.0).is_err());
        let back = HeisenbergPoint::from_cyl(5.0, &[0.6, 0.0, 0.0, 0.8], -1.0).unwrap();
        assert!(back.approx_eq(&xi, 1e-15));
    }
}
