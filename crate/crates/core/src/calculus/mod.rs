//! Scalar calculus on the circle: expression trees in `alpha`, exact
//! second-order jets, and periodic quadrature.

mod expr;
mod jet;
mod parse;
mod quad;

pub use expr::{Node, PeriodicExpr};
pub use jet::Jet2;
pub use parse::parse_expr;
pub use quad::{
    grid, integrate_circle, simpson_fixed, try_integrate_circle, Quadrature, QuadratureSpec, Rule,
    DEFAULT_SAMPLES, DEFAULT_TOLERANCE, MAX_REFINEMENTS,
};

/// Value and first two `alpha`-derivatives of `e` at `alpha`.
pub fn eval_jet2(e: &PeriodicExpr, alpha: f64, a: i64) -> crate::Result<Jet2> {
    e.eval_jet2(alpha, a)
}
