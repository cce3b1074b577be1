//! Order-0 and order-(−1) symbols of the H^s Levi-Civita connection on the
//! loop space, along the constant-loop embedding `β(x)(α) = (x, α)`.
//!
//! Order-(−1) quantities are stored as the coefficient of `2isξ⁻¹`; neither
//! `s` nor `ξ` is ever carried numerically here. The frame is orthonormal,
//! so all raised and lowered indices coincide and the `ġ` terms are absent.
//! Along `β` loops `γ̇ = F₄`, and frame vectors pushed forward from S³ are
//! constant in `α`.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::forms::{complexify, MatrixForm};
use crate::geometry::{
    christoffel_table, coefficient_set, BergerMetric, ChristoffelTable, CoefficientSet, CIRCLE,
    DIM,
};

pub type RealMat4 = Matrix4<f64>;

/// A tangent vector along a loop, in frame components, with its
/// `α`-derivative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector {
    pub components: [f64; DIM],
    pub rates: [f64; DIM],
}

impl FrameVector {
    /// `β_* F_{i+1}`: constant along the loop.
    pub fn basis(i: usize) -> Self {
        let mut components = [0.0; DIM];
        components[i] = 1.0;
        Self {
            components,
            rates: [0.0; DIM],
        }
    }

    pub fn with_rates(components: [f64; DIM], rates: [f64; DIM]) -> Self {
        Self { components, rates }
    }
}

/// Leading and subleading symbols of the connection one-form.
#[derive(Debug, Clone)]
pub struct SymbolPair {
    pub sigma0: MatrixForm,
    /// Coefficient of `2isξ⁻¹`.
    pub sigma_minus1: MatrixForm,
}

pub fn symbol_pair(m: &BergerMetric, alpha: f64) -> Result<SymbolPair> {
    let table = christoffel_table(m, alpha)?;
    let sigma0 = sigma0_from_coefficients(&coefficient_set(m, alpha)?);
    let sigma_minus1 = connection_minus1_beta(&table);
    Ok(SymbolPair {
        sigma0,
        sigma_minus1,
    })
}

fn real_one_form(coeffs: [RealMat4; DIM]) -> MatrixForm {
    MatrixForm::one_form(coeffs.map(|m| complexify(&m)))
}

/// `σ₀(ω^s)` assembled from `U, V, W, A, B, C`:
///
/// ```text
/// ⎡ −Aψ⁴    Uψ³   −Vψ²   ½Aψ¹ ⎤
/// ⎢  Uψ³   −Bψ⁴    Wψ¹   ½Bψ² ⎥
/// ⎢ −Vψ²    Wψ¹   −Cψ⁴   ½Cψ³ ⎥
/// ⎣ ½Aψ¹   ½Bψ²   ½Cψ³    0   ⎦
/// ```
pub fn sigma0_connection(m: &BergerMetric, alpha: f64) -> Result<MatrixForm> {
    Ok(sigma0_from_coefficients(&coefficient_set(m, alpha)?))
}

pub fn sigma0_from_coefficients(cs: &CoefficientSet) -> MatrixForm {
    let (u, v, w) = (cs.u.v, cs.v.v, cs.w.v);
    let (a, b, c) = (cs.a.v, cs.b.v, cs.c.v);
    let mut p = [RealMat4::zeros(); DIM];
    let mut sym = |dir: usize, i: usize, j: usize, x: f64| {
        p[dir][(i, j)] = x;
        p[dir][(j, i)] = x;
    };
    sym(3, 0, 0, -a);
    sym(3, 1, 1, -b);
    sym(3, 2, 2, -c);
    sym(2, 0, 1, u);
    sym(1, 0, 2, -v);
    sym(0, 1, 2, w);
    sym(0, 0, 3, 0.5 * a);
    sym(1, 1, 3, 0.5 * b);
    sym(2, 2, 3, 0.5 * c);
    real_one_form(p)
}

/// `σ₀(ω^s)^k_l = ½ (Γ^k_{lp} + Γ^l_{kp}) ψ^p` straight from the
/// Christoffel table.
pub fn sigma0_from_christoffel(t: &ChristoffelTable) -> MatrixForm {
    let p = std::array::from_fn(|dir| {
        RealMat4::from_fn(|k, l| 0.5 * (t.value(k, l, dir) + t.value(l, k, dir)))
    });
    real_one_form(p)
}

/// Quadratic Christoffel terms of the order-(−1) connection symbol in the
/// direction `l`, with `γ̇ = F₄`.
fn quadratic_terms(t: &ChristoffelTable, l: usize, a: usize, b: usize) -> f64 {
    (0..DIM)
        .map(|k| {
            t.value(a, l, k) * t.value(k, b, CIRCLE)
                - t.value(a, k, CIRCLE) * t.value(k, l, b)
                - t.value(b, k, CIRCLE) * t.value(k, a, l)
                - t.value(a, k, CIRCLE) * t.value(b, k, l)
        })
        .sum()
}

/// Coefficient of `2isξ⁻¹` in `σ₋₁(ω^s(X))` for a general vector field
/// along a `β` loop, including the `Ẋ` terms.
pub fn connection_minus1(t: &ChristoffelTable, x: &FrameVector) -> RealMat4 {
    RealMat4::from_fn(|a, b| {
        let mut s = 0.0;
        for l in 0..DIM {
            let xl = x.components[l];
            if xl != 0.0 {
                let derivative = t.partial(l, a, b, CIRCLE);
                let transport = t.get(a, l, b).d1 + t.get(b, a, l).d1;
                s += xl * (derivative + quadratic_terms(t, l, a, b) + transport);
            }
            let rate = x.rates[l];
            if rate != 0.0 {
                s += rate * (t.value(a, b, l) + t.value(b, a, l));
            }
        }
        s
    })
}

pub fn sigma_minus1_connection_dot(
    m: &BergerMetric,
    alpha: f64,
    x: usize,
    xdot: [f64; DIM],
) -> Result<RealMat4> {
    if x >= DIM {
        return Err(Error::Contract(format!("frame index {x} out of range")));
    }
    let t = christoffel_table(m, alpha)?;
    let mut v = FrameVector::basis(x);
    v.rates = xdot;
    Ok(connection_minus1(&t, &v))
}

/// `σ₋₁(ω^s)` on `β_*(TS³)` as a matrix of one-forms in `ψ¹, ψ², ψ³`,
/// coefficient of `2isξ⁻¹`. Vectors from S³ have no `α`-dependence, so the
/// `Ẋ` terms drop out.
pub fn connection_minus1_beta(t: &ChristoffelTable) -> MatrixForm {
    let mut per_dir = [RealMat4::zeros(); DIM];
    for (l, m) in per_dir.iter_mut().enumerate().take(3) {
        for a in 0..DIM {
            for b in 0..DIM {
                let spatial = t.partial(l, a, b, CIRCLE);
                debug_assert_eq!(spatial, 0.0, "left-invariant frame: no S³ derivatives");
                let quad = quadratic_terms(t, l, a, b);
                let transport = t.get(a, l, b).d1 + t.get(b, a, l).d1;
                m[(a, b)] = spatial + quad + transport;
            }
        }
    }
    real_one_form(per_dir)
}

pub fn sigma_minus1_connection_beta(m: &BergerMetric, alpha: f64) -> Result<MatrixForm> {
    Ok(connection_minus1_beta(&christoffel_table(m, alpha)?))
}

/// Order-(−1) symbol of the curvature, as the coefficient of `2isξ⁻¹`.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureSymbol {
    table: ChristoffelTable,
}

impl CurvatureSymbol {
    pub fn new(table: ChristoffelTable) -> Self {
        Self { table }
    }

    pub fn at(m: &BergerMetric, alpha: f64) -> Result<Self> {
        Ok(Self::new(christoffel_table(m, alpha)?))
    }

    /// `σ₋₁(Ω^s(X, Y))^k_l / (2isξ⁻¹)`. In the middle bracket the first
    /// term is read as `∂_{p4}Γ^k_{rl}`, matching the other brackets.
    pub fn apply(&self, x: &FrameVector, y: &FrameVector) -> RealMat4 {
        let t = &self.table;
        let d = |dir: usize, k: usize, i: usize, j: usize| t.partial(dir, k, i, j);
        let d4 = |dir: usize, k: usize, i: usize, j: usize| t.partial_circle2(dir, k, i, j);
        RealMat4::from_fn(|k, l| {
            let mut s = 0.0;
            for p in 0..DIM {
                for r in 0..DIM {
                    let (xp, yr) = (x.components[p], y.components[r]);
                    let (xdp, ydr) = (x.rates[p], y.rates[r]);
                    if xdp != 0.0 && yr != 0.0 {
                        s += xdp * yr * (d(p, k, r, l) - d(r, k, p, l) - d(r, l, k, p));
                    }
                    if xp != 0.0 && yr != 0.0 {
                        s += xp
                            * yr
                            * (d4(p, k, r, l) + d4(p, l, k, r) - d4(r, k, p, l) - d4(r, l, k, p));
                    }
                    if xp != 0.0 && ydr != 0.0 {
                        s += xp * ydr * (d(p, k, l, r) + d(p, l, k, r) - d(r, k, p, l));
                    }
                }
            }
            s
        })
    }

    /// The curvature symbol as a matrix of two-forms on the S³ directions,
    /// `Σ_{p<q} σ₋₁(Ω(F_p, F_q)) ψ^p∧ψ^q`.
    pub fn beta_two_form(&self) -> MatrixForm {
        let mut out = MatrixForm::zero(2);
        for p in 0..3 {
            for q in (p + 1)..3 {
                let m = self.apply(&FrameVector::basis(p), &FrameVector::basis(q));
                let term = MatrixForm::monomial(&[p, q], complexify(&m));
                out = out.try_add(&term).expect("both are two-forms");
            }
        }
        out
    }
}

/// `σ₋₁(Ω^s(F_x, F_y))` for `x, y` tangent to S³, coefficient of `2isξ⁻¹`.
pub fn sigma_minus1_curvature_beta(
    m: &BergerMetric,
    alpha: f64,
    x: usize,
    y: usize,
) -> Result<RealMat4> {
    if x >= 3 || y >= 3 {
        return Err(Error::Contract(format!(
            "curvature on beta_*(TS^3) needs S^3 directions, got ({x}, {y})"
        )));
    }
    Ok(CurvatureSymbol::at(m, alpha)?.apply(&FrameVector::basis(x), &FrameVector::basis(y)))
}

/// A symbol truncated after order −1: `leading + subleading` with the
/// subleading part homogeneous of degree −1 in `ξ`. Both parts are forms of
/// the same degree.
///
/// The leading parts here are independent of `ξ`, so the composition
/// correction `∂_ξ a · D_x b` vanishes and the order −1 part of a product is
/// `a₀ b₋₁ + a₋₁ b₀`. Products of two subleading parts are order ≤ −2 and
/// are dropped; `dropped` counts them.
#[derive(Debug, Clone)]
pub struct TruncatedSymbol {
    pub leading: MatrixForm,
    pub subleading: MatrixForm,
    dropped: usize,
}

impl TruncatedSymbol {
    pub fn new(leading: MatrixForm, subleading: MatrixForm) -> Result<Self> {
        if leading.degree() != subleading.degree() {
            return Err(Error::Contract("symbol parts must share a form degree".into()));
        }
        Ok(Self {
            leading,
            subleading,
            dropped: 0,
        })
    }

    pub fn from_pair(pair: &SymbolPair) -> Self {
        Self::new(pair.sigma0.clone(), pair.sigma_minus1.clone())
            .expect("connection symbols are one-forms")
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let leading = self.leading.wedge(&other.leading)?;
        let subleading = self
            .leading
            .wedge(&other.subleading)?
            .try_add(&self.subleading.wedge(&other.leading)?)?;
        Ok(Self {
            leading,
            subleading,
            dropped: self.dropped + other.dropped + 1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse_expr;

    fn family(a: i64) -> BergerMetric {
        BergerMetric::paper_family(a).unwrap()
    }

    fn max_abs(m: &RealMat4) -> f64 {
        m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn round_sigma0_vanishes() {
        let s = sigma0_connection(&BergerMetric::round(), 0.5).unwrap();
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn sigma0_entries_at_123() {
        let s = sigma0_connection(&BergerMetric::constant(1.0, 2.0, 3.0).unwrap(), 0.0).unwrap();
        // entry (1,2) is U ψ³
        assert!((s.coeff(1 << 2)[(0, 1)].re - 4.5).abs() < 1e-12);
        // entry (3,4) is ½ C ψ³, C = 0
        for mask in [1, 2, 4, 8] {
            assert_eq!(s.coeff(mask)[(2, 3)].re, 0.0);
        }
    }

    #[test]
    fn sigma0_two_routes_agree_on_family() {
        let m = family(2);
        for alpha in [0.0, 0.3, 1.7, 4.1] {
            let t = christoffel_table(&m, alpha).unwrap();
            let a = sigma0_connection(&m, alpha).unwrap();
            let b = sigma0_from_christoffel(&t);
            assert!(a.try_add(&b.scale((-1.0).into())).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn constant_metric_minus1_vanishes() {
        let m = BergerMetric::constant(1.0, 2.0, 3.0).unwrap();
        assert_eq!(sigma_minus1_connection_beta(&m, 0.2).unwrap().max_abs(), 0.0);
        for x in 0..DIM {
            let d = sigma_minus1_connection_dot(&m, 0.2, x, [0.0; DIM]).unwrap();
            assert_eq!(max_abs(&d), 0.0);
        }
    }

    #[test]
    fn rate_term_hand_expansion() {
        // X = F₁, Ẋ = F₂ on constant scales (1,2,3): only (Γ^a_{b2} + Γ^b_{a2}) survives.
        let m = BergerMetric::constant(1.0, 2.0, 3.0).unwrap();
        let d = sigma_minus1_connection_dot(&m, 0.0, 0, [0.0, 1.0, 0.0, 0.0]).unwrap();
        // Γ¹₃₂ + Γ³₁₂ = −41/6 − 23/6
        assert!((d[(0, 2)] + 32.0 / 3.0).abs() < 1e-12);
        assert!((d[(2, 0)] + 32.0 / 3.0).abs() < 1e-12);
        assert_eq!(d[(0, 1)], 0.0);
        // round metric: the symmetric part of Γ^·_{·2} vanishes
        let r = sigma_minus1_connection_dot(&BergerMetric::round(), 0.0, 0, [0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(max_abs(&r) < 1e-15);
    }

    #[test]
    fn dot_route_matches_beta_route() {
        let m = family(2);
        let alpha = 0.0;
        let form = sigma_minus1_connection_beta(&m, alpha).unwrap();
        assert!(form.max_abs() > 0.1);
        for l in 0..3 {
            let d = sigma_minus1_connection_dot(&m, alpha, l, [0.0; DIM]).unwrap();
            let f = form.coeff(1 << l).map(|z| z.re);
            assert!(max_abs(&(d - f)) < 1e-12);
        }
    }

    #[test]
    fn representative_entry_for_lambda_one_mu_eq_nu() {
        // λ = 1, μ = ν = g: Γ¹₃₂ = −g², Γ²₁₃ = g² − 2, Γ²₂₄ = −ġ/g, A = 0.
        // Entry (1,2) of the ψ³ coefficient: Γ¹₃₂Γ²₂₄ − Γ²₂₄Γ²₁₃ and the
        // transport term (Γ¹₃₂ + Γ²₁₃)˙ = 0, giving 2(g² − 1)ġ/g.
        let g = parse_expr("2 - 0.5*cos(alpha)").unwrap();
        let m = BergerMetric::new(parse_expr("1").unwrap(), g.clone(), g.clone(), 0).unwrap();
        let alpha = 0.8;
        let gj = g.eval_jet2(alpha, 0).unwrap();
        let form = sigma_minus1_connection_beta(&m, alpha).unwrap();
        let got = form.coeff(1 << 2)[(0, 1)].re;
        let (gv, gd) = (gj.v, gj.d1);
        let want = 2.0 * (gv * gv - 1.0) * gd / gv;
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn curvature_vanishes_on_s3() {
        let m = family(8);
        for alpha in [0.0, 0.9, 2.2, 5.0] {
            for x in 0..3 {
                for y in 0..3 {
                    let c = sigma_minus1_curvature_beta(&m, alpha, x, y).unwrap();
                    assert!(max_abs(&c) < 1e-12);
                }
            }
        }
        assert!(sigma_minus1_curvature_beta(&m, 0.0, 3, 0).is_err());
    }

    #[test]
    fn curvature_circle_bracket_is_antisymmetric() {
        let curv = CurvatureSymbol::at(&family(2), 0.7).unwrap();
        let x = FrameVector::basis(CIRCLE);
        let y = FrameVector::basis(0);
        let xy = curv.apply(&x, &y);
        let yx = curv.apply(&y, &x);
        assert!(max_abs(&xy) > 1e-3);
        assert!(max_abs(&(xy + yx)) < 1e-12);
    }

    #[test]
    fn truncation_drops_double_subleading() {
        let pair = symbol_pair(&family(2), 0.4).unwrap();
        let t = TruncatedSymbol::from_pair(&pair);
        let t3 = t.wedge(&t).unwrap().wedge(&t).unwrap();
        assert_eq!(t3.dropped(), 2);
        let direct = pair
            .sigma_minus1
            .wedge(&pair.sigma0)
            .unwrap()
            .wedge(&pair.sigma0)
            .unwrap()
            .trace();
        let got = t3.subleading.trace();
        let diff = got.try_add(&direct.scale((-3.0).into())).unwrap();
        assert!(diff.max_abs() < 1e-10 * direct.max_abs().max(1.0));
    }
}
