//! Numerical toolkit for geometric Hardy inequalities on the Heisenberg group.
//!
//! The geometry (group law, quasi-norms, boundary distances, horizontal
//! calculus) is generic over the scalar type through [`Real`]; the aliases
//! below fix `f64` and `f32`. The quadrature laboratory in [`lab`] works in
//! `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod error;
pub mod group;
pub mod horizontal;
pub mod lab;
pub mod quasi_norm;
pub mod roots;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = group::HeisenbergPoint<f64>;
pub type Point32 = group::HeisenbergPoint<f32>;
pub type Cyl = group::CylCoords<f64>;
pub type StepTwo = group::StepTwoGroup<f64>;
pub type Element = group::GroupElement<f64>;
pub type HalfSpace = boundary::HalfSpace<f64>;
pub type Torus = boundary::Torus<f64>;
pub type Polytope = boundary::ConvexPolytope<f64>;
pub type Domain = boundary::Domain<f64>;
pub type Derivs = horizontal::HorizontalDerivs<f64>;
