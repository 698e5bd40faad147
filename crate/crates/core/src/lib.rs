//! Numerical toolkit for support functions of convex bodies on the circle and
//! the 2-sphere.

pub mod body;
pub mod functions;
pub mod hypotheses;
pub mod integrals;
pub mod solver;
pub mod spectral;
pub mod sphere;
pub mod symfun;
