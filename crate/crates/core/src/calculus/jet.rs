use std::ops::{Add, Div, Mul, Neg, Sub};

/// Second-order jet `(f, f', f'')` of a scalar function of the circle
/// coordinate. Arithmetic propagates both derivatives exactly.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        v: 0.0,
        d1: 0.0,
        d2: 0.0,
    };

    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0)
    }

    /// The identity function evaluated at `x`.
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0, 0.0)
    }

    /// Derivative jet, dropping the unknown third derivative.
    pub fn derivative(self) -> Self {
        Self::new(self.d1, self.d2, f64::NAN)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Self::new(s, c * self.d1, c * self.d2 - s * self.d1 * self.d1)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Self::new(c, -s * self.d1, -s * self.d2 - c * self.d1 * self.d1)
    }

    /// Integer power. Negative exponents of a zero value yield infinities;
    /// callers that care check the base first.
    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => {
                let nf = f64::from(n);
                let p2 = self.v.powi(n - 2);
                let p1 = p2 * self.v;
                Self::new(
                    p1 * self.v,
                    nf * p1 * self.d1,
                    nf * (nf - 1.0) * p2 * self.d1 * self.d1 + nf * p1 * self.d2,
                )
            }
        }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        Self::new(
            r,
            -self.d1 * r * r,
            (2.0 * self.d1 * self.d1 * r - self.d2) * r * r,
        )
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.v, c * self.d1, c * self.d2)
    }

    pub fn max_abs_diff(self, other: Jet2) -> f64 {
        (self.v - other.v)
            .abs()
            .max((self.d1 - other.d1).abs())
            .max((self.d2 - other.d2).abs())
    }
}

impl From<f64> for Jet2 {
    fn from(c: f64) -> Self {
        Self::constant(c)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        j.scale(self)
    }
}

impl std::iter::Sum for Jet2 {
    fn sum<I: Iterator<Item = Jet2>>(iter: I) -> Jet2 {
        iter.fold(Jet2::ZERO, |acc, j| acc + j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Jet2, b: Jet2) -> bool {
        a.max_abs_diff(b) < 1e-12
    }

    #[test]
    fn constant_lifts_to_flat_jet() {
        assert_eq!(Jet2::constant(2.0), Jet2::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn sine_at_zero() {
        assert!(close(Jet2::variable(0.0).sin(), Jet2::new(0.0, 1.0, 0.0)));
    }

    #[test]
    fn product_rule_on_x_squared() {
        let x = Jet2::variable(3.0);
        assert!(close(x * x, Jet2::new(9.0, 6.0, 2.0)));
        assert!(close(x.powi(2), Jet2::new(9.0, 6.0, 2.0)));
    }

    #[test]
    fn reciprocal_of_x() {
        let x = Jet2::variable(2.0);
        // 1/x -> (1/2, -1/4, 2/8)
        assert!(close(x.recip(), Jet2::new(0.5, -0.25, 0.25)));
        assert!(close(x.powi(-1), x.recip()));
    }

    #[test]
    fn chain_rule_through_cos() {
        // cos(2x) at x = 0.4
        let x = 0.4_f64;
        let j = (Jet2::variable(x) * 2.0).cos();
        let want = Jet2::new((2.0 * x).cos(), -2.0 * (2.0 * x).sin(), -4.0 * (2.0 * x).cos());
        assert!(close(j, want));
    }
}
