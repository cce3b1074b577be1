//! Metrics on S³×S¹ for which `F₁ = λE₁, F₂ = μE₂, F₃ = νE₃, F₄ = ∂_ρ` is
//! orthonormal, with `E_i` left-invariant on S³ and `λ, μ, ν` functions of
//! the circle coordinate only.
//!
//! Frame indices are zero-based throughout: index `i` is `F_{i+1}`, so the
//! circle direction is [`CIRCLE`] = 3. Tables are stored upper index first:
//! `gamma[k][i][j]` is `Γ^k_{ij}` with `∇_{F_i} F_j = Γ^k_{ij} F_k`, and
//! `c[k][i][j]` is `c^k_{ij}` with `[F_i, F_j] = c^k_{ij} F_k`.

use std::f64::consts::TAU;

use crate::calculus::{parse_expr, Jet2, PeriodicExpr};
use crate::error::{Error, Result};

pub const DIM: usize = 4;
/// Index of `F₄ = ∂_ρ`.
pub const CIRCLE: usize = 3;
/// Number of equispaced points on which positivity is checked.
pub const POSITIVITY_SAMPLES: usize = 1024;

pub type Table3 = [[[Jet2; DIM]; DIM]; DIM];

/// Scale functions `λ, μ, ν` of a metric on S³×S¹, together with their
/// symbolic derivatives.
#[derive(Debug, Clone)]
pub struct BergerMetric {
    scales: [PeriodicExpr; 3],
    rates: [PeriodicExpr; 3],
    a: i64,
}

/// Jets of `λ, μ, ν` and of their logarithmic derivatives at one `α`.
#[derive(Debug, Clone, Copy)]
pub struct ScaleJets {
    pub scale: [Jet2; 3],
    /// `λ̇/λ, μ̇/μ, ν̇/ν` with their own first two derivatives.
    pub log_rate: [Jet2; 3],
}

impl BergerMetric {
    pub fn new(lambda: PeriodicExpr, mu: PeriodicExpr, nu: PeriodicExpr, a: i64) -> Result<Self> {
        let rates = [lambda.derivative(), mu.derivative(), nu.derivative()];
        let m = Self {
            scales: [lambda, mu, nu],
            rates,
            a,
        };
        m.check_positive()?;
        Ok(m)
    }

    /// `λ = 1, μ = 2 + (1/a) cos(aα) sin(aα), ν = 2 − cos(aα)`.
    pub fn paper_family(a: i64) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidMetric("family parameter a must be nonzero".into()));
        }
        Self::new(
            parse_expr("1")?,
            parse_expr("2 + (1/a)*cos(a*alpha)*sin(a*alpha)")?,
            parse_expr("2 - cos(a*alpha)")?,
            a,
        )
    }

    /// Constant scales.
    pub fn constant(lambda: f64, mu: f64, nu: f64) -> Result<Self> {
        Self::new(
            PeriodicExpr::constant(lambda),
            PeriodicExpr::constant(mu),
            PeriodicExpr::constant(nu),
            0,
        )
    }

    /// The product of the round S³ and the unit circle.
    pub fn round() -> Self {
        Self::constant(1.0, 1.0, 1.0).expect("unit scales are positive")
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn scales(&self) -> &[PeriodicExpr; 3] {
        &self.scales
    }

    pub fn is_constant(&self) -> bool {
        self.scales.iter().all(PeriodicExpr::is_alpha_free)
    }

    fn check_positive(&self) -> Result<()> {
        for j in 0..POSITIVITY_SAMPLES {
            let alpha = TAU * j as f64 / POSITIVITY_SAMPLES as f64;
            for (name, e) in ["lambda", "mu", "nu"].iter().zip(&self.scales) {
                let v = e.eval(alpha, self.a)?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidMetric(format!(
                        "{name} = {v} is not positive at alpha = {alpha}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn jets(&self, alpha: f64) -> Result<ScaleJets> {
        let mut scale = [Jet2::ZERO; 3];
        let mut log_rate = [Jet2::ZERO; 3];
        for i in 0..3 {
            scale[i] = self.scales[i].eval_jet2(alpha, self.a)?;
            if scale[i].v <= 0.0 {
                return Err(Error::InvalidMetric(format!(
                    "scale {} = {} is not positive at alpha = {alpha}",
                    i + 1,
                    scale[i].v
                )));
            }
            log_rate[i] = self.rates[i].eval_jet2(alpha, self.a)? / scale[i];
        }
        Ok(ScaleJets { scale, log_rate })
    }
}

/// Brackets of the scaled frame, `[F_i, F_j] = c^k_{ij} F_k`.
#[derive(Debug, Clone, Copy)]
pub struct StructureConstants {
    pub c: Table3,
}

impl StructureConstants {
    pub fn get(&self, k: usize, i: usize, j: usize) -> Jet2 {
        self.c[k][i][j]
    }

    /// Largest `|c^k_{ij} + c^k_{ji}|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    r = r.max((self.c[k][i][j].v + self.c[k][j][i].v).abs());
                }
            }
        }
        r
    }

    /// Largest component of `Σ_cyc [[F_i, F_j], F_k]`. The structure
    /// functions depend on `ρ` only, so `F_l(c) = δ_{l4} ċ`.
    pub fn jacobi_residual(&self) -> f64 {
        let bracket = |i: usize, j: usize, k: usize, n: usize| -> f64 {
            // [[F_i,F_j],F_k]^n = c^m_{ij} c^n_{mk} − F_k(c^n_{ij})
            let mut s: f64 = (0..DIM).map(|m| self.c[m][i][j].v * self.c[n][m][k].v).sum();
            if k == CIRCLE {
                s -= self.c[n][i][j].d1;
            }
            s
        };
        let mut r: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for n in 0..DIM {
                        let s = bracket(i, j, k, n) + bracket(j, k, i, n) + bracket(k, i, j, n);
                        r = r.max(s.abs());
                    }
                }
            }
        }
        r
    }
}

/// Levi-Civita connection coefficients in the orthonormal frame, each a jet
/// in `α`.
#[derive(Debug, Clone, Copy)]
pub struct ChristoffelTable {
    pub gamma: Table3,
}

impl ChristoffelTable {
    pub fn get(&self, k: usize, i: usize, j: usize) -> Jet2 {
        self.gamma[k][i][j]
    }

    pub fn value(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[k][i][j].v
    }

    /// `F_dir(Γ^k_{ij})`. Every coefficient is a function of `ρ` alone, so
    /// the derivative along the S³ directions is identically zero.
    pub fn partial(&self, dir: usize, k: usize, i: usize, j: usize) -> f64 {
        if dir == CIRCLE {
            self.gamma[k][i][j].d1
        } else {
            0.0
        }
    }

    /// `F_dir F₄ (Γ^k_{ij})`, zero unless `dir` is the circle direction.
    pub fn partial_circle2(&self, dir: usize, k: usize, i: usize, j: usize) -> f64 {
        if dir == CIRCLE {
            self.gamma[k][i][j].d2
        } else {
            0.0
        }
    }

    /// Largest entrywise difference of values and first derivatives.
    pub fn max_diff(&self, other: &ChristoffelTable) -> f64 {
        let mut r: f64 = 0.0;
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    let (x, y) = (self.gamma[k][i][j], other.gamma[k][i][j]);
                    r = r.max((x.v - y.v).abs()).max((x.d1 - y.d1).abs());
                }
            }
        }
        r
    }

    /// Largest `|Γ^k_{ij} + Γ^j_{ik}|` over values and first derivatives.
    pub fn compatibility_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    let s = self.gamma[k][i][j] + self.gamma[j][i][k];
                    r = r.max(s.v.abs()).max(s.d1.abs());
                }
            }
        }
        r
    }

    /// Largest `|Γ^k_{ij} − Γ^k_{ji} − c^k_{ij}|` over values and first
    /// derivatives.
    pub fn torsion_residual(&self, sc: &StructureConstants) -> f64 {
        let mut r: f64 = 0.0;
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    let s = self.gamma[k][i][j] - self.gamma[k][j][i] - sc.c[k][i][j];
                    r = r.max(s.v.abs()).max(s.d1.abs());
                }
            }
        }
        r
    }
}

/// `U, V, W` and the logarithmic derivatives `A, B, C`.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientSet {
    pub u: Jet2,
    pub v: Jet2,
    pub w: Jet2,
    pub a: Jet2,
    pub b: Jet2,
    pub c: Jet2,
}

pub fn structure_constants(m: &BergerMetric, alpha: f64) -> Result<StructureConstants> {
    let ScaleJets { scale, log_rate } = m.jets(alpha)?;
    let [l, mu, nu] = scale;
    let mut c = [[[Jet2::ZERO; DIM]; DIM]; DIM];
    let mut set = |k: usize, i: usize, j: usize, v: Jet2| {
        c[k][i][j] = v;
        c[k][j][i] = -v;
    };
    // [E₁,E₂] = 2E₃, [E₂,E₃] = 2E₁, [E₁,E₃] = −2E₂
    set(2, 0, 1, 2.0 * l * mu / nu);
    set(0, 1, 2, 2.0 * mu * nu / l);
    set(1, 0, 2, -2.0 * l * nu / mu);
    // [∂_ρ, λE₁] = λ̇E₁ = (λ̇/λ)F₁
    for (i, rate) in log_rate.iter().enumerate() {
        set(i, CIRCLE, i, *rate);
    }
    Ok(StructureConstants { c })
}

/// Christoffel symbols from the structure constants alone, by the Koszul
/// formula for an orthonormal frame:
/// `Γ^k_{ij} = ½ (c^k_{ij} − c^i_{jk} + c^j_{ki})`.
pub fn christoffel_koszul(m: &BergerMetric, alpha: f64) -> Result<ChristoffelTable> {
    let sc = structure_constants(m, alpha)?;
    Ok(christoffel_from_brackets(&sc))
}

pub fn christoffel_from_brackets(sc: &StructureConstants) -> ChristoffelTable {
    let c = &sc.c;
    let mut gamma = [[[Jet2::ZERO; DIM]; DIM]; DIM];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for (i, gki) in gk.iter_mut().enumerate() {
            for (j, g) in gki.iter_mut().enumerate() {
                *g = 0.5 * (c[k][i][j] - c[i][j][k] + c[j][k][i]);
            }
        }
    }
    ChristoffelTable { gamma }
}

/// The closed-form table of nonzero coefficients.
pub fn christoffel_table(m: &BergerMetric, alpha: f64) -> Result<ChristoffelTable> {
    let ScaleJets { scale, log_rate } = m.jets(alpha)?;
    let [l, mu, nu] = scale;
    let (l2, m2, n2) = (l * l, mu * mu, nu * nu);
    let lmn = l * mu * nu;
    let g312 = (m2 * l2 - m2 * n2 + n2 * l2) / lmn;
    let g321 = (-(m2 * l2) - m2 * n2 + n2 * l2) / lmn;
    let g231 = (n2 * l2 - l2 * m2 + m2 * n2) / lmn;

    let mut gamma = [[[Jet2::ZERO; DIM]; DIM]; DIM];
    // Γ³₁₂ = −Γ²₁₃, Γ³₂₁ = −Γ¹₂₃, Γ²₃₁ = −Γ¹₃₂
    gamma[2][0][1] = g312;
    gamma[1][0][2] = -g312;
    gamma[2][1][0] = g321;
    gamma[0][1][2] = -g321;
    gamma[1][2][0] = g231;
    gamma[0][2][1] = -g231;
    // Γ^i_{i4} = −Γ⁴_{ii} = −(log scale_i)˙
    for (i, rate) in log_rate.iter().enumerate() {
        gamma[i][i][CIRCLE] = -*rate;
        gamma[CIRCLE][i][i] = *rate;
    }
    Ok(ChristoffelTable { gamma })
}

pub fn coefficient_set(m: &BergerMetric, alpha: f64) -> Result<CoefficientSet> {
    let ScaleJets { scale, log_rate } = m.jets(alpha)?;
    let [l, mu, nu] = scale;
    let (l2, m2, n2) = (l * l, mu * mu, nu * nu);
    let lmn = l * mu * nu;
    Ok(CoefficientSet {
        u: n2 * (m2 - l2) / lmn,
        v: m2 * (n2 - l2) / lmn,
        w: l2 * (n2 - m2) / lmn,
        a: log_rate[0],
        b: log_rate[1],
        c: log_rate[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() < 1e-12
    }

    #[test]
    fn round_brackets() {
        let sc = structure_constants(&BergerMetric::round(), 0.4).unwrap();
        assert!(close(sc.get(2, 0, 1).v, 2.0));
        assert!(close(sc.get(0, 1, 2).v, 2.0));
        assert!(close(sc.get(1, 0, 2).v, -2.0));
        for k in 0..DIM {
            for i in 0..DIM {
                assert_eq!(sc.get(k, i, CIRCLE).v, 0.0);
                assert_eq!(sc.get(k, CIRCLE, i).v, 0.0);
                assert_eq!(sc.get(CIRCLE, k, i).v, 0.0);
            }
        }
        assert!(sc.antisymmetry_residual() == 0.0);
        assert!(sc.jacobi_residual() < 1e-12);
    }

    #[test]
    fn scaled_bracket() {
        let m = BergerMetric::constant(1.0, 2.0, 3.0).unwrap();
        let sc = structure_constants(&m, 0.0).unwrap();
        assert!(close(sc.get(2, 0, 1).v, 4.0 / 3.0));
    }

    #[test]
    fn circle_bracket_is_log_rate() {
        let m = BergerMetric::new(
            parse_expr("1 + 0.1*sin(alpha)").unwrap(),
            parse_expr("1").unwrap(),
            parse_expr("1").unwrap(),
            0,
        )
        .unwrap();
        let sc = structure_constants(&m, 0.0).unwrap();
        assert!(close(sc.get(0, CIRCLE, 0).v, 0.1));
        assert!(sc.jacobi_residual() < 1e-12);
    }

    #[test]
    fn koszul_round() {
        let t = christoffel_koszul(&BergerMetric::round(), 1.0).unwrap();
        assert!(close(t.value(2, 0, 1), 1.0));
        assert!(close(t.value(2, 1, 0), -1.0));
        assert!(close(t.value(1, 2, 0), 1.0));
        assert!(close(t.value(0, 2, 1), -1.0));
        for i in 0..3 {
            assert_eq!(t.value(i, i, CIRCLE), 0.0);
        }
    }

    #[test]
    fn constant_scales_have_no_circle_terms() {
        let t = christoffel_koszul(&BergerMetric::constant(1.0, 2.0, 3.0).unwrap(), 2.0).unwrap();
        for i in 0..DIM {
            for j in 0..DIM {
                assert_eq!(t.value(i, j, CIRCLE), 0.0);
                assert_eq!(t.value(CIRCLE, i, j), 0.0);
            }
        }
        assert!(close(t.value(2, 0, 1), -23.0 / 6.0));
    }

    #[test]
    fn closed_form_at_123() {
        let m = BergerMetric::constant(1.0, 2.0, 3.0).unwrap();
        let t = christoffel_table(&m, 0.0).unwrap();
        let sc = structure_constants(&m, 0.0).unwrap();
        assert!(close(t.value(2, 1, 0), -31.0 / 6.0));
        assert!(close(t.value(2, 0, 1) - t.value(2, 1, 0), 4.0 / 3.0));
        assert!(close(t.value(2, 0, 1) - t.value(2, 1, 0), sc.get(2, 0, 1).v));
    }

    #[test]
    fn closed_form_circle_entry_at_zero() {
        let m = BergerMetric::new(
            parse_expr("1").unwrap(),
            parse_expr("2 + 0.25*cos(2*alpha)*sin(2*alpha)").unwrap(),
            parse_expr("2 - cos(2*alpha)").unwrap(),
            2,
        )
        .unwrap();
        let t = christoffel_table(&m, 0.0).unwrap();
        assert_eq!(t.value(0, 0, CIRCLE), 0.0);
        assert_eq!(t.value(CIRCLE, 0, 0), 0.0);
        assert!(t.max_diff(&christoffel_koszul(&m, 0.0).unwrap()) < 1e-12);
    }

    #[test]
    fn round_closed_form() {
        let t = christoffel_table(&BergerMetric::round(), 0.0).unwrap();
        assert!(close(t.value(1, 2, 0), 1.0));
        assert!(close(t.value(0, 2, 1), -1.0));
    }

    #[test]
    fn coefficients_round_vanish() {
        let cs = coefficient_set(&BergerMetric::round(), 0.3).unwrap();
        for j in [cs.u, cs.v, cs.w, cs.a, cs.b, cs.c] {
            assert_eq!(j, Jet2::ZERO);
        }
    }

    #[test]
    fn coefficients_at_123() {
        let cs = coefficient_set(&BergerMetric::constant(1.0, 2.0, 3.0).unwrap(), 0.0).unwrap();
        assert!(close(cs.u.v, 4.5));
        // μ²(ν² − λ²)/(λμν) = 4·8/6
        assert!(close(cs.v.v, 16.0 / 3.0));
        assert!(close(cs.w.v, 5.0 / 6.0));
    }

    #[test]
    fn log_rate_of_nu() {
        let m = BergerMetric::new(
            parse_expr("1").unwrap(),
            parse_expr("1").unwrap(),
            parse_expr("2 - cos(alpha)").unwrap(),
            0,
        )
        .unwrap();
        let cs = coefficient_set(&m, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(close(cs.c.v, 0.5));
    }

    #[test]
    fn nonpositive_scale_rejected() {
        let r = BergerMetric::new(
            parse_expr("1").unwrap(),
            parse_expr("cos(alpha)").unwrap(),
            parse_expr("1").unwrap(),
            0,
        );
        assert!(matches!(r, Err(Error::InvalidMetric(_))));
        assert!(BergerMetric::paper_family(0).is_err());
    }
}
