//! Indefinite convolution through kernel transforms, and the control
//! response `p(t) = ∫_t^b e^{α(t-τ)} J0(t-τ) g(τ) dτ`.
//!
//! Transform convention: for side `+`, `f̂(y) = ∫_0^∞ f(t) e^{iyt} dt` and
//! `q = f̂(i/C) g`; for side `-`, `f̂(y) = ∫_0^∞ f(-t) e^{-iyt} dt` and
//! `q = f̂(-i/C) g`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::IntervalMap;
use crate::error::{Error, Result};
use crate::intmat::{to_real, Analyticity, EigenFactorization, RealVector, ScalarSymbol, Side};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A one-sided convolution `q±` to be evaluated at the mapped nodes.
#[derive(Debug, Clone)]
pub struct ConvolutionProblem {
    pub side: Side,
    pub kernel_symbol: ScalarSymbol,
    pub map: IntervalMap,
    pub g_values: Vec<Complex64>,
}

impl ConvolutionProblem {
    pub fn new(side: Side, kernel_symbol: ScalarSymbol, map: IntervalMap, g_values: Vec<Complex64>) -> Self {
        Self {
            side,
            kernel_symbol,
            map,
            g_values,
        }
    }

    pub fn real(side: Side, kernel_symbol: ScalarSymbol, map: IntervalMap, g: &[f64]) -> Self {
        Self::new(side, kernel_symbol, map, g.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    fn validate(&self, eig: &EigenFactorization) -> Result<()> {
        let required = match self.side {
            Side::Plus => Analyticity::UpperHalfPlane,
            Side::Minus => Analyticity::LowerHalfPlane,
        };
        if !self.kernel_symbol.region().covers(required) {
            return Err(Error::InvalidProblem(format!(
                "side {} needs a kernel transform analytic in the {required:?} region, got {:?}",
                self.side,
                self.kernel_symbol.region()
            )));
        }
        check_factorization(eig, self.side, &self.map)?;
        if self.g_values.len() != eig.n() {
            return Err(Error::InvalidProblem(format!(
                "{} input values for {} nodes",
                self.g_values.len(),
                eig.n()
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_factorization(eig: &EigenFactorization, side: Side, map: &IntervalMap) -> Result<()> {
    if eig.side() != side {
        return Err(Error::InvalidProblem(format!(
            "factorization is for side {}, problem needs side {side}",
            eig.side()
        )));
    }
    if eig.map() != map {
        return Err(Error::InvalidProblem("factorization interval differs from the problem interval".into()));
    }
    Ok(())
}

/// Argument `±i/λ` at which a side's kernel transform is evaluated.
pub fn transform_argument(side: Side, lambda: Complex64) -> Complex64 {
    I * side.sign() / lambda
}

/// `X diag(f̂(±i/λ)) X⁻¹ g`.
pub fn convolve(problem: &ConvolutionProblem, eig: &EigenFactorization) -> Result<Vec<Complex64>> {
    problem.validate(eig)?;
    let side = problem.side;
    let symbol = &problem.kernel_symbol;
    eig.apply(|l| symbol.eval(transform_argument(side, l)), &problem.g_values)
}

/// Real-valued convolution, failing if the imaginary residue is not negligible.
pub fn convolve_real(problem: &ConvolutionProblem, eig: &EigenFactorization) -> Result<RealVector> {
    to_real(&convolve(problem, eig)?)
}

/// Kernel transform of `e^{-t}` on side `+`: `1/(1 - iy)`.
pub fn exponential_symbol() -> ScalarSymbol {
    ScalarSymbol::new("1/(1 - iy)", Analyticity::UpperHalfPlane, |y| (1.0 - I * y).inv())
}

/// Parameters of the control demo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSpec {
    pub alpha: f64,
    pub beta: f64,
    pub map: IntervalMap,
}

impl ControlSpec {
    pub fn new(alpha: f64, beta: f64, map: IntervalMap) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "control parameters must be positive, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self { alpha, beta, map })
    }

    /// Control input `g(τ) = e^{-βτ}`.
    pub fn control(&self, tau: f64) -> f64 {
        (-self.beta * tau).exp()
    }

    /// Kernel `f(s) = e^{αs} J0(s)` for `s <= 0`.
    pub fn kernel(&self, s: f64) -> f64 {
        (self.alpha * s).exp() * crate::oracle::bessel_j0(s)
    }
}

/// Transform of the control kernel: `∫_0^∞ e^{-(α + iy)t} J0(t) dt = (1 + (α + iy)²)^{-1/2}`.
pub fn control_symbol(alpha: f64) -> ScalarSymbol {
    ScalarSymbol::new("(1 + (alpha + iy)^2)^(-1/2)", Analyticity::LowerHalfPlane, move |y| {
        let s = alpha + I * y;
        (1.0 + s * s).sqrt().inv()
    })
}

/// `(1 + (α + iy)²)^{-1/2} / (α + iy)`: a variant carrying an extra prefactor,
/// kept only to measure how far it sits from the closed form.
pub fn control_symbol_with_prefactor(alpha: f64) -> ScalarSymbol {
    ScalarSymbol::new("(1 + (alpha + iy)^2)^(-1/2) / (alpha + iy)", Analyticity::LowerHalfPlane, move |y| {
        let s = alpha + I * y;
        (s * (1.0 + s * s).sqrt()).inv()
    })
}

/// `d_j = ((1 + α²)λ² + 2αλ + 1)^{1/2}` with the principal root.
pub fn design_diagonal(alpha: f64, eig: &EigenFactorization) -> Result<Vec<Complex64>> {
    eig.eigenvalues()
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let d = ((1.0 + alpha * alpha) * l * l + 2.0 * alpha * l + 1.0).sqrt();
            if d.norm() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
                Err(Error::SingularDesign { index: j })
            } else {
                Ok(d)
            }
        })
        .collect()
}

/// Control response by both routes.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlResponse {
    /// Generic symbol route; the canonical output.
    pub values: Vec<f64>,
    /// `C ((1+α²)C² + 2αC + I)^{-1/2} g` through `d_j`.
    pub closed_form: Vec<f64>,
    /// `max |values - closed_form|`.
    pub route_discrepancy: f64,
    /// `max |values - (prefactor symbol route)|`.
    pub prefactor_discrepancy: f64,
    pub imag_residue: f64,
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_spec(spec: &ControlSpec, eig: &EigenFactorization, len: usize) -> Result<()> {
    check_factorization(eig, Side::Minus, &spec.map)?;
    if len != eig.n() {
        return Err(Error::InvalidProblem(format!("{len} values for {} nodes", eig.n())));
    }
    Ok(())
}

/// `C ((1+α²)C² + 2αC + I)^{-1/2} g`, evaluated as `X diag(λ_j / d_j) X⁻¹ g`.
pub fn control_forward_closed_form(spec: &ControlSpec, eig: &EigenFactorization, g: &[f64]) -> Result<RealVector> {
    check_spec(spec, eig, g.len())?;
    let d = design_diagonal(spec.alpha, eig)?;
    let diag: Vec<Complex64> = eig.eigenvalues().iter().zip(&d).map(|(l, d)| l / d).collect();
    eig.apply_diagonal_real(&diag, g)
}

/// Response `p` to the control `g` at the mapped nodes of a side-`-` factorization.
pub fn control_response(spec: &ControlSpec, eig: &EigenFactorization, g: &[f64]) -> Result<ControlResponse> {
    check_spec(spec, eig, g.len())?;
    let generic = convolve_real(&ConvolutionProblem::real(Side::Minus, control_symbol(spec.alpha), spec.map, g), eig)?;
    let closed = control_forward_closed_form(spec, eig, g)?;
    let prefactor =
        convolve_real(&ConvolutionProblem::real(Side::Minus, control_symbol_with_prefactor(spec.alpha), spec.map, g), eig)?;
    Ok(ControlResponse {
        route_discrepancy: max_diff(&generic.values, &closed.values),
        prefactor_discrepancy: max_diff(&generic.values, &prefactor.values),
        imag_residue: generic.imag_residue.max(closed.imag_residue),
        closed_form: closed.values,
        values: generic.values,
    })
}

/// Control `g` producing the response `p`: `X diag(d_j / λ_j) X⁻¹ p`, the
/// exact inverse of the forward map.
pub fn control_inverse(spec: &ControlSpec, eig: &EigenFactorization, p: &[f64]) -> Result<RealVector> {
    check_spec(spec, eig, p.len())?;
    let d = design_diagonal(spec.alpha, eig)?;
    let diag: Vec<Complex64> = eig.eigenvalues().iter().zip(&d).map(|(l, d)| d / l).collect();
    if let Some(j) = diag.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::PoleEvaluation { lambda: eig.eigenvalues()[j] });
    }
    eig.apply_diagonal_real(&diag, p)
}
