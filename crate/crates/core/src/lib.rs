//! Metric ribbon graphs with the tête-à-tête property, and translations
//! between such graphs and Seifert fibered 3-manifold data.
//!
//! The library is organized around the two directions of the translation:
//!
//! * forward: a metric ribbon graph with the tête-à-tête property determines a
//!   periodic graph automorphism ([`tat`]), whose quotient data ([`quotient`])
//!   feeds the Seifert invariant and plumbing calculus ([`seifert`]) together
//!   with the horizontal-surface cohomology class ([`horizontal`]);
//! * inverse: from a Seifert fibering plus a horizontal class, [`inverse`]
//!   builds the lifted spine with its monodromy and solves for a metric that
//!   realizes it as a tête-à-tête graph.
//!
//! All metric data is exact: lengths are positive rationals in units of π.

pub mod feasibility;
pub mod fixtures;
pub mod horizontal;
pub mod inverse;
pub mod quotient;
pub mod rational;
pub mod ribbon;
pub mod seifert;
pub mod tat;
pub mod translate;

pub use rational::Rational;
pub use ribbon::RibbonGraph;
