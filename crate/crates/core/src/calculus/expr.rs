use std::fmt;
use std::sync::Arc;

use super::jet::Jet2;
use crate::error::{Error, Result};

/// Node of an expression tree in the circle coordinate `alpha` and the
/// integer family parameter `a`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Alpha,
    Param,
    Neg(Arc<Node>),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Pow(Arc<Node>, i32),
    Sin(Arc<Node>),
    Cos(Arc<Node>),
}

/// Expression in `alpha` closed under rational operations, integer powers,
/// `sin` and `cos`. For integer `a` every such expression is 2π-periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicExpr {
    root: Arc<Node>,
}

impl PeriodicExpr {
    fn wrap(node: Node) -> Self {
        Self {
            root: Arc::new(node),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::wrap(Node::Const(c))
    }

    pub fn alpha() -> Self {
        Self::wrap(Node::Alpha)
    }

    pub fn param() -> Self {
        Self::wrap(Node::Param)
    }

    pub fn node(&self) -> &Node {
        &self.root
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Self::wrap(Node::Neg(self.root))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Self) -> Self {
        Self::wrap(Node::Add(self.root, rhs.root))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Self) -> Self {
        Self::wrap(Node::Sub(self.root, rhs.root))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Self) -> Self {
        Self::wrap(Node::Mul(self.root, rhs.root))
    }

    /// Quotient. Rejects denominators that are constant (free of `alpha` and
    /// `a`) and evaluate to zero.
    pub fn try_div(self, rhs: Self) -> Result<Self> {
        if let Some(c) = constant_value(&rhs.root) {
            if c == 0.0 {
                return Err(Error::Domain {
                    node: rhs.to_string(),
                    alpha: f64::NAN,
                });
            }
        }
        Ok(Self::wrap(Node::Div(self.root, rhs.root)))
    }

    /// Integer power. Negative exponents of an identically-zero constant
    /// are rejected like division by zero.
    pub fn powi(self, n: i32) -> Result<Self> {
        if n < 0 && constant_value(&self.root) == Some(0.0) {
            return Err(Error::Domain {
                node: self.to_string(),
                alpha: f64::NAN,
            });
        }
        Ok(Self::wrap(Node::Pow(self.root, n)))
    }

    pub fn sin(self) -> Self {
        Self::wrap(Node::Sin(self.root))
    }

    pub fn cos(self) -> Self {
        Self::wrap(Node::Cos(self.root))
    }

    /// Value and first two exact `alpha`-derivatives at `alpha`.
    pub fn eval_jet2(&self, alpha: f64, a: i64) -> Result<Jet2> {
        eval(&self.root, alpha, a as f64)
    }

    pub fn eval(&self, alpha: f64, a: i64) -> Result<f64> {
        self.eval_jet2(alpha, a).map(|j| j.v)
    }

    /// Symbolic `d/dalpha`, with light constant folding.
    pub fn derivative(&self) -> Self {
        Self { root: diff(&self.root) }
    }

    /// True when the expression does not depend on `alpha`.
    pub fn is_alpha_free(&self) -> bool {
        !depends_on_alpha(&self.root)
    }
}

impl fmt::Display for PeriodicExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) => {
                if *c < 0.0 {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Node::Alpha => f.write_str("alpha"),
            Node::Param => f.write_str("a"),
            Node::Neg(x) => write!(f, "-({x})"),
            Node::Add(x, y) => write!(f, "({x} + {y})"),
            Node::Sub(x, y) => write!(f, "({x} - {y})"),
            Node::Mul(x, y) => write!(f, "({x} * {y})"),
            Node::Div(x, y) => write!(f, "({x} / {y})"),
            Node::Pow(x, n) => {
                if *n < 0 {
                    write!(f, "({x})^-{}", -(*n as i64))
                } else {
                    write!(f, "({x})^{n}")
                }
            }
            Node::Sin(x) => write!(f, "sin({x})"),
            Node::Cos(x) => write!(f, "cos({x})"),
        }
    }
}

fn domain(node: &Node, alpha: f64) -> Error {
    Error::Domain {
        node: node.to_string(),
        alpha,
    }
}

fn eval(node: &Node, alpha: f64, a: f64) -> Result<Jet2> {
    Ok(match node {
        Node::Const(c) => Jet2::constant(*c),
        Node::Alpha => Jet2::variable(alpha),
        Node::Param => Jet2::constant(a),
        Node::Neg(x) => -eval(x, alpha, a)?,
        Node::Add(x, y) => eval(x, alpha, a)? + eval(y, alpha, a)?,
        Node::Sub(x, y) => eval(x, alpha, a)? - eval(y, alpha, a)?,
        Node::Mul(x, y) => eval(x, alpha, a)? * eval(y, alpha, a)?,
        Node::Div(x, y) => {
            let den = eval(y, alpha, a)?;
            if den.v == 0.0 {
                return Err(domain(y, alpha));
            }
            eval(x, alpha, a)? / den
        }
        Node::Pow(x, n) => {
            let base = eval(x, alpha, a)?;
            if *n < 0 && base.v == 0.0 {
                return Err(domain(x, alpha));
            }
            base.powi(*n)
        }
        Node::Sin(x) => eval(x, alpha, a)?.sin(),
        Node::Cos(x) => eval(x, alpha, a)?.cos(),
    })
}

fn depends_on_alpha(node: &Node) -> bool {
    match node {
        Node::Const(_) | Node::Param => false,
        Node::Alpha => true,
        Node::Neg(x) | Node::Pow(x, _) | Node::Sin(x) | Node::Cos(x) => depends_on_alpha(x),
        Node::Add(x, y) | Node::Sub(x, y) | Node::Mul(x, y) | Node::Div(x, y) => {
            depends_on_alpha(x) || depends_on_alpha(y)
        }
    }
}

/// Value of a subtree that involves neither `alpha` nor `a`.
fn constant_value(node: &Node) -> Option<f64> {
    Some(match node {
        Node::Const(c) => *c,
        Node::Alpha | Node::Param => return None,
        Node::Neg(x) => -constant_value(x)?,
        Node::Add(x, y) => constant_value(x)? + constant_value(y)?,
        Node::Sub(x, y) => constant_value(x)? - constant_value(y)?,
        Node::Mul(x, y) => constant_value(x)? * constant_value(y)?,
        Node::Div(x, y) => constant_value(x)? / constant_value(y)?,
        Node::Pow(x, n) => constant_value(x)?.powi(*n),
        Node::Sin(x) => constant_value(x)?.sin(),
        Node::Cos(x) => constant_value(x)?.cos(),
    })
}

fn is_zero(node: &Node) -> bool {
    matches!(node, Node::Const(c) if *c == 0.0)
}

fn is_one(node: &Node) -> bool {
    matches!(node, Node::Const(c) if *c == 1.0)
}

fn c(v: f64) -> Arc<Node> {
    Arc::new(Node::Const(v))
}

fn add(x: Arc<Node>, y: Arc<Node>) -> Arc<Node> {
    if is_zero(&x) {
        y
    } else if is_zero(&y) {
        x
    } else {
        Arc::new(Node::Add(x, y))
    }
}

fn sub(x: Arc<Node>, y: Arc<Node>) -> Arc<Node> {
    if is_zero(&y) {
        x
    } else if is_zero(&x) {
        neg(y)
    } else {
        Arc::new(Node::Sub(x, y))
    }
}

fn neg(x: Arc<Node>) -> Arc<Node> {
    match &*x {
        Node::Const(v) => c(-v),
        Node::Neg(inner) => inner.clone(),
        _ => Arc::new(Node::Neg(x)),
    }
}

fn mul(x: Arc<Node>, y: Arc<Node>) -> Arc<Node> {
    if is_zero(&x) || is_zero(&y) {
        c(0.0)
    } else if is_one(&x) {
        y
    } else if is_one(&y) {
        x
    } else {
        Arc::new(Node::Mul(x, y))
    }
}

fn div(x: Arc<Node>, y: Arc<Node>) -> Arc<Node> {
    if is_zero(&x) {
        c(0.0)
    } else if is_one(&y) {
        x
    } else {
        Arc::new(Node::Div(x, y))
    }
}

fn diff(node: &Node) -> Arc<Node> {
    match node {
        Node::Const(_) | Node::Param => c(0.0),
        Node::Alpha => c(1.0),
        Node::Neg(x) => neg(diff(x)),
        Node::Add(x, y) => add(diff(x), diff(y)),
        Node::Sub(x, y) => sub(diff(x), diff(y)),
        Node::Mul(x, y) => add(mul(diff(x), y.clone()), mul(x.clone(), diff(y))),
        Node::Div(x, y) => {
            // (x'y - xy') / y^2
            let num = sub(mul(diff(x), y.clone()), mul(x.clone(), diff(y)));
            div(num, Arc::new(Node::Pow(y.clone(), 2)))
        }
        Node::Pow(x, n) => match n {
            0 => c(0.0),
            1 => diff(x),
            _ => {
                let outer = mul(c(f64::from(*n)), Arc::new(Node::Pow(x.clone(), n - 1)));
                mul(outer, diff(x))
            }
        },
        Node::Sin(x) => mul(Arc::new(Node::Cos(x.clone())), diff(x)),
        Node::Cos(x) => neg(mul(Arc::new(Node::Sin(x.clone())), diff(x))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mu_family() -> PeriodicExpr {
        // 2 + (1/a) cos(a alpha) sin(a alpha)
        let aa = PeriodicExpr::param().mul(PeriodicExpr::alpha());
        PeriodicExpr::constant(2.0).add(
            PeriodicExpr::constant(1.0)
                .try_div(PeriodicExpr::param())
                .unwrap()
                .mul(aa.clone().cos())
                .mul(aa.sin()),
        )
    }

    #[test]
    fn sine_jet_at_zero() {
        let j = PeriodicExpr::alpha().sin().eval_jet2(0.0, 1).unwrap();
        assert_eq!(j, Jet2::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn constant_jet() {
        let j = PeriodicExpr::constant(2.0).eval_jet2(1.234, 5).unwrap();
        assert_eq!(j, Jet2::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn family_mu_matches_finite_differences() {
        let e = mu_family();
        let (x, h) = (0.3, 1e-5);
        let f = |t: f64| e.eval(t, 2).unwrap();
        let j = e.eval_jet2(x, 2).unwrap();
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        assert!((j.d1 - d1).abs() <= 1e-6 * d1.abs().max(1.0));
        // the second difference loses ~eps/h^2 to rounding
        assert!((j.d2 - d2).abs() <= 1e-4 * d2.abs().max(1.0));
        // closed form: mu' = cos(2a alpha), mu'' = -2a sin(2a alpha)
        assert!((j.d1 - (4.0 * x).cos()).abs() < 1e-14);
        assert!((j.d2 + 4.0 * (4.0 * x).sin()).abs() < 1e-13);
    }

    #[test]
    fn periodic_for_integer_param() {
        let e = mu_family();
        for a in [1, 2, 3, 8] {
            let d = e.eval(0.7, a).unwrap() - e.eval(0.7 + 2.0 * PI, a).unwrap();
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn constant_zero_denominator_rejected() {
        let r = PeriodicExpr::constant(1.0).try_div(PeriodicExpr::constant(2.0).sub(PeriodicExpr::constant(2.0)));
        assert!(matches!(r, Err(Error::Domain { .. })));
    }

    #[test]
    fn runtime_division_by_zero_names_node() {
        let e = PeriodicExpr::constant(1.0).try_div(PeriodicExpr::alpha().sin()).unwrap();
        match e.eval_jet2(0.0, 1) {
            Err(Error::Domain { node, .. }) => assert_eq!(node, "sin(alpha)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn symbolic_derivative_agrees_with_jet() {
        let e = mu_family()
            .try_div(PeriodicExpr::constant(2.0).sub(PeriodicExpr::param().mul(PeriodicExpr::alpha()).cos()))
            .unwrap()
            .powi(3)
            .unwrap();
        let de = e.derivative();
        for x in [0.1, 0.9, 2.5, 4.0] {
            let j = e.eval_jet2(x, 3).unwrap();
            let dj = de.eval_jet2(x, 3).unwrap();
            assert!((j.d1 - dj.v).abs() < 1e-10 * j.d1.abs().max(1.0));
            assert!((j.d2 - dj.d1).abs() < 1e-10 * j.d2.abs().max(1.0));
        }
    }

    #[test]
    fn alpha_free_detection() {
        assert!(PeriodicExpr::param().mul(PeriodicExpr::constant(3.0)).is_alpha_free());
        assert!(!PeriodicExpr::alpha().cos().is_alpha_free());
    }
}
