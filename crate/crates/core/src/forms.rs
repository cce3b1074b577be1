//! Exterior algebra on the coframe `ψ¹..ψ⁴` with matrix or scalar
//! coefficients.
//!
//! A form is stored densely over the sixteen basis monomials, indexed by
//! bitmask: bit `i` set means `ψ^{i+1}` is a factor, and the monomial is
//! taken in increasing index order.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::DIM;

pub type Mat4 = Matrix4<Complex64>;

const BASIS: usize = 1 << DIM;
/// Bitmask of `ψ¹∧ψ²∧ψ³`.
pub const S3_VOLUME: usize = 0b0111;

/// Coefficient ring of a form.
pub trait Coefficient:
    Clone + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn scale(&self, c: Complex64) -> Self;
    fn max_abs(&self) -> f64;
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
}

impl Coefficient for Mat4 {
    fn zero() -> Self {
        Mat4::zeros()
    }
    fn is_zero(&self) -> bool {
        self.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Homogeneous form of a fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<C> {
    degree: usize,
    coeffs: [C; BASIS],
}

pub type MatrixForm = Form<Mat4>;
pub type ScalarForm = Form<Complex64>;

/// Sign of the permutation sorting the concatenation of the increasing
/// index lists `a` and `b` (which must be disjoint).
fn merge_sign(a: usize, b: usize) -> f64 {
    let mut inversions = 0;
    for i in 0..DIM {
        if a & (1 << i) != 0 {
            // indices of b that are smaller than i get passed by i
            inversions += (b & ((1 << i) - 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl<C: Coefficient> Form<C> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "degree {degree} exceeds {DIM}");
        Self {
            degree,
            coeffs: std::array::from_fn(|_| C::zero()),
        }
    }

    /// `coeff · ψ^{i₁}∧…∧ψ^{i_p}` for the zero-based indices in `indices`.
    /// Repeated indices give the zero form; order is honored with its sign.
    pub fn monomial(indices: &[usize], coeff: C) -> Self {
        let mut out = Self::zero(indices.len());
        let mut mask = 0usize;
        let mut sign = 1.0;
        for &i in indices {
            assert!(i < DIM, "coframe index {i} out of range");
            let bit = 1 << i;
            if mask & bit != 0 {
                return out;
            }
            sign *= merge_sign(mask, bit);
            mask |= bit;
        }
        out.coeffs[mask] = coeff.scale(Complex64::new(sign, 0.0));
        out
    }

    /// `Σ_p coeffs[p] ψ^{p+1}`.
    pub fn one_form(coeffs: [C; DIM]) -> Self {
        let mut out = Self::zero(1);
        for (i, c) in coeffs.into_iter().enumerate() {
            out.coeffs[1 << i] = c;
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of the increasing monomial with the given bitmask.
    pub fn coeff(&self, mask: usize) -> &C {
        &self.coeffs[mask]
    }

    /// Nonzero `(mask, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            degree: self.degree,
            coeffs: std::array::from_fn(|i| self.coeffs[i].scale(c)),
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(C::max_abs).fold(0.0, f64::max)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::Contract(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(Self {
            degree: self.degree,
            coeffs: std::array::from_fn(|i| self.coeffs[i].clone() + other.coeffs[i].clone()),
        })
    }

    /// Exterior product. Coefficients multiply in argument order.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let degree = self.degree + other.degree;
        if degree > DIM {
            return Err(Error::Contract(format!(
                "wedge of degrees {} and {} exceeds {DIM}",
                self.degree, other.degree
            )));
        }
        let mut out = Self::zero(degree);
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if i & j != 0 {
                    continue;
                }
                let prod = a.clone() * b.clone();
                let signed = if merge_sign(i, j) < 0.0 { -prod } else { prod };
                out.coeffs[i | j] = out.coeffs[i | j].clone() + signed;
            }
        }
        Ok(out)
    }
}

impl MatrixForm {
    /// Coefficient-wise matrix trace.
    pub fn trace(&self) -> ScalarForm {
        ScalarForm {
            degree: self.degree,
            coeffs: std::array::from_fn(|i| self.coeffs[i].trace()),
        }
    }

    /// Lifts a scalar form to a matrix form with `coeff · M` coefficients.
    pub fn from_scalar(form: &ScalarForm, m: &Mat4) -> Self {
        Self {
            degree: form.degree,
            coeffs: std::array::from_fn(|i| m * form.coeffs[i]),
        }
    }
}

/// Free function alias for [`MatrixForm::trace`].
pub fn trace(form: &MatrixForm) -> ScalarForm {
    form.trace()
}

/// Value of a 3-form on the frame triple `(F₁, F₂, F₃)`: the `ψ¹∧ψ²∧ψ³`
/// coefficient. Monomials containing `ψ⁴` vanish on the S³ directions.
pub fn evaluate3(form: &ScalarForm) -> Result<Complex64> {
    if form.degree != 3 {
        return Err(Error::Contract(format!(
            "evaluate3 needs a 3-form, got degree {}",
            form.degree
        )));
    }
    Ok(form.coeffs[S3_VOLUME])
}

/// Real 4×4 matrix as a complex one.
pub fn complexify(m: &Matrix4<f64>) -> Mat4 {
    m.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn elementary(i: usize, j: usize) -> Mat4 {
        let mut m = Mat4::zeros();
        m[(i, j)] = c(1.0);
        m
    }

    #[test]
    fn basis_antisymmetry() {
        let id = Mat4::identity();
        let a = MatrixForm::monomial(&[0], id);
        let b = MatrixForm::monomial(&[1], id);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(*ab.coeff(0b0011), id);
        assert_eq!(*ba.coeff(0b0011), -id);
    }

    #[test]
    fn elementary_product() {
        let a = MatrixForm::monomial(&[0], elementary(0, 1));
        let b = MatrixForm::monomial(&[1], elementary(1, 2));
        assert_eq!(*a.wedge(&b).unwrap().coeff(0b0011), elementary(0, 2));
    }

    #[test]
    fn repeated_index_vanishes() {
        let m = Mat4::from_fn(|i, j| c((i * 4 + j) as f64));
        let a = MatrixForm::monomial(&[2], m);
        assert!(a.wedge(&a).unwrap().max_abs() == 0.0);
        assert!(MatrixForm::monomial(&[1, 1], m).max_abs() == 0.0);
    }

    #[test]
    fn degree_overflow_is_a_contract_error() {
        let a = MatrixForm::monomial(&[0, 1, 2], Mat4::identity());
        let b = MatrixForm::monomial(&[3, 0], Mat4::identity());
        assert!(matches!(a.wedge(&b), Err(Error::Contract(_))));
    }

    #[test]
    fn trace_examples() {
        let t = MatrixForm::monomial(&[0, 1], Mat4::identity()).trace();
        assert_eq!(*t.coeff(0b0011), c(4.0));
        let t = MatrixForm::monomial(&[0], elementary(0, 1)).trace();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn evaluate3_examples() {
        let vol = ScalarForm::monomial(&[0, 1, 2], c(1.0));
        assert_eq!(evaluate3(&vol).unwrap(), c(1.0));
        let with4 = ScalarForm::monomial(&[0, 1, 3], c(1.0));
        assert_eq!(evaluate3(&with4).unwrap(), c(0.0));
        let mix = ScalarForm::monomial(&[0, 1, 2], c(2.0))
            .try_add(&ScalarForm::monomial(&[1, 2, 3], c(-5.0)))
            .unwrap();
        assert_eq!(evaluate3(&mix).unwrap(), c(2.0));
        assert!(evaluate3(&ScalarForm::monomial(&[0, 1], c(1.0))).is_err());
    }

    #[test]
    fn monomial_order_sign() {
        let f = ScalarForm::monomial(&[2, 0, 1], c(1.0));
        // ψ³∧ψ¹∧ψ² = +ψ¹∧ψ²∧ψ³ (cyclic)
        assert_eq!(*f.coeff(S3_VOLUME), c(1.0));
        let g = ScalarForm::monomial(&[1, 0, 2], c(1.0));
        assert_eq!(*g.coeff(S3_VOLUME), c(-1.0));
    }
}
