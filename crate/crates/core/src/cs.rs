//! Chern–Simons density along the constant loops, its circle integral and
//! the resulting ℝ/ℤ class value.
//!
//! The transgression form for `l = 2` pulled back along `β` is
//!
//! ```text
//! −i/(8π³) R Tr[σ₀(θ)∧σ₋₁(Ω)] + i/(48π³) R · 3 Tr[σ₋₁(θ)∧σ₀(θ)∧σ₀(θ)]
//! ```
//!
//! with `σ₋₁ = 2isξ⁻¹ × (stored coefficient)` and `R` the constant that
//! realizes the cosphere integral `∫_{S*S¹} dξ` of the `ξ⁻¹` density. The
//! density `f` is this 3-form on `(F₁, F₂, F₃)` times `2π²/s`, so that the
//! class value is `(s/4) ∫_{S¹} f`.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::{try_integrate_circle, QuadratureSpec};
use crate::error::{Error, Result};
use crate::forms::{evaluate3, MatrixForm};
use crate::geometry::{christoffel_table, BergerMetric};
use crate::symbols::{connection_minus1_beta, sigma0_connection, CurvatureSymbol};

/// Cosphere normalization `R`. It is fixed by requiring the prefactor chain
/// `i/(48π³) · 3 · 2is · R` to equal `s/(2π²)`, which makes `f` the bare
/// `ψ¹∧ψ²∧ψ³` coefficient of `Tr[σ₋₁∧σ₀∧σ₀]` and reproduces the published
/// integrals `−26.0687` (a = 2) and `−100.992` (a = 8).
pub const RESIDUE_CONVENTION: f64 = -4.0 * PI;

/// Reality threshold for the density, on the scale of `f`.
pub const IMAGINARY_LIMIT: f64 = 1e-10;

pub const DEFAULT_INTEGRALITY_TOLERANCE: f64 = 1e-3;

fn curvature_prefactor() -> Complex64 {
    Complex64::new(0.0, -1.0 / (8.0 * PI.powi(3)))
}

fn connection_prefactor() -> Complex64 {
    Complex64::new(0.0, 1.0 / (48.0 * PI.powi(3)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CSConfig {
    s: f64,
    quadrature: QuadratureSpec,
    integrality_tolerance: f64,
}

impl Default for CSConfig {
    fn default() -> Self {
        Self {
            s: 1.0,
            quadrature: QuadratureSpec::default(),
            integrality_tolerance: DEFAULT_INTEGRALITY_TOLERANCE,
        }
    }
}

impl CSConfig {
    /// `s` must exceed 1/2, the threshold for H^s loops to be continuous.
    pub fn new(s: f64, quadrature: QuadratureSpec, integrality_tolerance: f64) -> Result<Self> {
        if !(s > 0.5 && s.is_finite()) {
            return Err(Error::Config(format!("Sobolev parameter must exceed 1/2, got {s}")));
        }
        if !(integrality_tolerance > 0.0 && integrality_tolerance < 0.5) {
            return Err(Error::Config(format!(
                "integrality tolerance must lie in (0, 1/2), got {integrality_tolerance}"
            )));
        }
        Ok(Self {
            s,
            quadrature,
            integrality_tolerance,
        })
    }

    pub fn with_s(s: f64) -> Result<Self> {
        Self::new(s, QuadratureSpec::default(), DEFAULT_INTEGRALITY_TOLERANCE)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quadrature
    }

    pub fn integrality_tolerance(&self) -> f64 {
        self.integrality_tolerance
    }
}

/// The two contributions to `f(α)` before the imaginary parts are dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTerms {
    /// `Tr[σ₋₁(θ)∧σ₀∧σ₀]` contribution.
    pub connection: Complex64,
    /// `Tr[σ₀∧σ₋₁(Ω)]` contribution.
    pub curvature: Complex64,
}

impl DensityTerms {
    pub fn total(&self) -> Complex64 {
        self.connection + self.curvature
    }
}

/// Both terms of the density at `α`, normalized like `f`.
pub fn density_terms(m: &BergerMetric, s: f64, alpha: f64) -> Result<DensityTerms> {
    let table = christoffel_table(m, alpha)?;
    let sigma0 = sigma0_connection(m, alpha)?;
    let order = Complex64::new(0.0, 2.0 * s);
    let sigma_m1 = connection_minus1_beta(&table).scale(order);
    let omega_m1 = CurvatureSymbol::new(table).beta_two_form().scale(order);

    let normalization = 2.0 * PI * PI / s * RESIDUE_CONVENTION;
    let cubic = sigma_m1.wedge(&sigma0)?.wedge(&sigma0)?;
    let connection = connection_prefactor() * 3.0 * normalization * evaluate3(&cubic.trace())?;
    let mixed = sigma0.wedge(&omega_m1)?;
    let curvature = curvature_prefactor() * normalization * evaluate3(&mixed.trace())?;
    Ok(DensityTerms {
        connection,
        curvature,
    })
}

/// `f(α)`, with the imaginary residue returned alongside.
pub fn cs_density_complex(m: &BergerMetric, s: f64, alpha: f64) -> Result<(f64, f64)> {
    let total = density_terms(m, s, alpha)?.total();
    if total.im.abs() >= IMAGINARY_LIMIT {
        return Err(Error::ImaginaryResidue {
            residue: total.im.abs(),
            alpha,
            limit: IMAGINARY_LIMIT,
        });
    }
    Ok((total.re, total.im.abs()))
}

pub fn cs_density(m: &BergerMetric, cfg: &CSConfig, alpha: f64) -> Result<f64> {
    cs_density_complex(m, cfg.s, alpha).map(|(re, _)| re)
}

/// `Tr[σ₀∧σ₀∧σ₀]` on `(F₁, F₂, F₃)`.
pub fn leading_order_density(m: &BergerMetric, alpha: f64) -> Result<f64> {
    let s0: MatrixForm = sigma0_connection(m, alpha)?;
    let v = evaluate3(&s0.wedge(&s0)?.wedge(&s0)?.trace())?;
    if v.im.abs() >= IMAGINARY_LIMIT {
        return Err(Error::ImaginaryResidue {
            residue: v.im.abs(),
            alpha,
            limit: IMAGINARY_LIMIT,
        });
    }
    Ok(v.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The pairing with `β_*[S³]` is not an integer.
    Nontrivial,
    /// The pairing vanishes: this cycle does not detect the class.
    Vanishing,
    /// The pairing is within tolerance of a nonzero integer.
    Indeterminate,
}

/// Fractional part in `[0, 1)` and distance to the nearest integer.
pub fn reduce_mod_z(v: f64) -> (f64, f64) {
    let r = v - v.floor();
    let r = if r >= 1.0 { 0.0 } else { r };
    (r, r.min(1.0 - r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CSReport {
    pub a: Option<i64>,
    pub s: f64,
    /// `∫_{S¹} f`.
    pub integral: f64,
    /// `(s/4) ∫ f`.
    pub class_value: f64,
    pub mod_z: f64,
    /// `s ∫ f`, the value under the unit-volume normalization of S³.
    pub alt_class_value: f64,
    pub alt_mod_z: f64,
    pub verdict: Verdict,
    pub nontrivial: bool,
    pub max_imag: f64,
    pub quadrature_n: usize,
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
}

impl CSReport {
    fn build(a: Option<i64>, cfg: &CSConfig, integral: f64, max_imag: f64, samples: Vec<(f64, f64)>, n: usize) -> Self {
        let s = cfg.s;
        let class_value = s / 4.0 * integral;
        let (mod_z, dist) = reduce_mod_z(class_value);
        let alt_class_value = s * integral;
        let (alt_mod_z, _) = reduce_mod_z(alt_class_value);
        let tol = cfg.integrality_tolerance;
        let verdict = if dist > tol {
            Verdict::Nontrivial
        } else if class_value.abs() <= tol {
            Verdict::Vanishing
        } else {
            Verdict::Indeterminate
        };
        Self {
            a,
            s,
            integral,
            class_value,
            mod_z,
            alt_class_value,
            alt_mod_z,
            verdict,
            nontrivial: verdict == Verdict::Nontrivial,
            max_imag,
            quadrature_n: n,
            samples,
        }
    }

    /// Distance of `(s/4) ∫ f` from ℤ.
    pub fn distance_to_z(&self) -> f64 {
        reduce_mod_z(self.class_value).1
    }

    /// Distance of `s ∫ f` from ℤ.
    pub fn alt_distance_to_z(&self) -> f64 {
        reduce_mod_z(self.alt_class_value).1
    }
}

pub fn cs_class(m: &BergerMetric, cfg: &CSConfig) -> Result<CSReport> {
    let s = cfg.s;
    // nonnegative f64 bit patterns order like the values they encode
    let max_imag = AtomicU64::new(0);
    let q = try_integrate_circle(
        |alpha| {
            let (re, im) = cs_density_complex(m, s, alpha)?;
            max_imag.fetch_max(im.to_bits(), Ordering::Relaxed);
            Ok(re)
        },
        &cfg.quadrature,
    )?;
    let max_imag = f64::from_bits(max_imag.into_inner());
    let a = if m.is_constant() { None } else { Some(m.a()) };
    Ok(CSReport::build(a, cfg, q.value, max_imag, q.samples, q.intervals))
}

/// One report per `a` for `λ = 1, μ = 2 + (1/a) cos(aα) sin(aα), ν = 2 − cos(aα)`.
pub fn sweep(a_values: &[i64], cfg: &CSConfig) -> Result<Vec<CSReport>> {
    if let Some(bad) = a_values.iter().find(|&&a| a == 0) {
        return Err(Error::Config(format!("family parameter a must be nonzero, got {bad}")));
    }
    a_values
        .iter()
        .map(|&a| {
            let m = BergerMetric::paper_family(a)?;
            let mut r = cs_class(&m, cfg)?;
            r.a = Some(a);
            Ok(r)
        })
        .collect()
}
