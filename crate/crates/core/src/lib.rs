//! First Wodzicki–Chern–Simons class of the H^s Levi-Civita connection on
//! the frame bundle of L(S³×S¹), for metrics that scale a left-invariant
//! frame of S³ by functions of the circle coordinate.
//!
//! The pipeline runs bottom-up through [`calculus`] (expressions, jets,
//! quadrature), [`geometry`] (brackets, Christoffel symbols), [`forms`]
//! (matrix-valued exterior algebra), [`symbols`] (order 0 and −1 symbols of
//! connection and curvature) and [`cs`] (density, integral, class value).

pub mod calculus;
pub mod cli;
pub mod cs;
pub mod error;
pub mod exec;
pub mod forms;
pub mod geometry;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
