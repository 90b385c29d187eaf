//! Wiener–Hopf equations `f(x) - ∫_0^∞ k(x - t) f(t) dt = g(x)` collocated
//! on a finite window by splitting the integral at `t = x` into a side `+`
//! and a side `-` indefinite convolution.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::IntervalMap;
use crate::convolve::{check_factorization, transform_argument};
use crate::error::{Error, Result};
use crate::intmat::{to_real, Analyticity, EigenFactorization, ScalarSymbol, Side};

/// Relative singular-value threshold below which the system is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct WienerHopfProblem {
    /// `∫_0^∞ k(t) e^{iyt} dt`.
    pub khat_plus: ScalarSymbol,
    /// `∫_{-T}^0 k(t) e^{iyt} dt`, with the truncation `T` recorded.
    pub khat_minus: ScalarSymbol,
    pub minus_truncation: Option<f64>,
    pub g_values: Vec<f64>,
    pub map: IntervalMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerHopfDiagnostics {
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// True when the least-squares (SVD) path was taken.
    pub rank_deficient: bool,
    /// `‖(I - K⁺ - K⁻) f - g‖∞ / ‖g‖∞`.
    pub relative_residual: f64,
    pub imag_residue: f64,
    /// Solution of the alternative system `(I - K⁺ + K⁻) f = g`.
    pub alternative_solution: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WienerHopfSolution {
    pub f: Vec<f64>,
    pub diagnostics: WienerHopfDiagnostics,
}

/// `X diag(φ(λ)) X⁻¹` for a kernel symbol evaluated at `±i/λ`.
pub fn kernel_matrix(eig: &EigenFactorization, symbol: &ScalarSymbol) -> Result<DMatrix<Complex64>> {
    let side = eig.side();
    eig.function_matrix(|l| symbol.eval(transform_argument(side, l)))
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |a, x| a.max(x.abs()))
}

fn solve_system(m: &DMatrix<Complex64>, g: &DVector<Complex64>) -> Result<(DVector<Complex64>, f64, f64, bool)> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smin < RANK_TOL * smax {
        let x = svd
            .solve(g, RANK_TOL * smax)
            .map_err(|e| Error::Singular(format!("least-squares solve failed: {e}")))?;
        return Ok((x, smin, smax, true));
    }
    let x = m
        .clone()
        .lu()
        .solve(g)
        .ok_or_else(|| Error::Singular("Wiener-Hopf system".into()))?;
    Ok((x, smin, smax, false))
}

/// Solves `(I - K⁺ - K⁻) f = g` with `K⁺ = X diag(k̂⁺(i/λ)) X⁻¹` and
/// `K⁻ = Y diag(k̂⁻(-i/λ)) Y⁻¹`.
pub fn solve(
    problem: &WienerHopfProblem,
    eig_plus: &EigenFactorization,
    eig_minus: &EigenFactorization,
) -> Result<WienerHopfSolution> {
    check_factorization(eig_plus, Side::Plus, &problem.map)?;
    check_factorization(eig_minus, Side::Minus, &problem.map)?;
    let n = eig_plus.n();
    if eig_minus.n() != n || problem.g_values.len() != n {
        return Err(Error::InvalidProblem("node counts of factorizations and data differ".into()));
    }
    if !problem.khat_plus.region().covers(Analyticity::UpperHalfPlane) {
        return Err(Error::InvalidProblem("k̂⁺ must be analytic in the upper half-plane".into()));
    }
    let kp = kernel_matrix(eig_plus, &problem.khat_plus)?;
    let km = kernel_matrix(eig_minus, &problem.khat_minus)?;
    let ident = DMatrix::<Complex64>::identity(n, n);
    let system = &ident - &kp - &km;
    let g = DVector::from_iterator(n, problem.g_values.iter().map(|&v| Complex64::new(v, 0.0)));
    let (x, sigma_min, sigma_max, rank_deficient) = solve_system(&system, &g)?;
    let resid = &system * &x - &g;
    let gnorm = max_abs(problem.g_values.iter().copied());
    let relative_residual = if gnorm > 0.0 { max_abs(resid.iter().map(|z| z.norm())) / gnorm } else { 0.0 };
    let f = to_real(x.as_slice())?;

    let alt_system = &ident - &kp + &km;
    let (alt, _, _, _) = solve_system(&alt_system, &g)?;
    Ok(WienerHopfSolution {
        f: f.values,
        diagnostics: WienerHopfDiagnostics {
            sigma_min,
            sigma_max,
            rank_deficient,
            relative_residual,
            imag_residue: f.imag_residue,
            alternative_solution: alt.iter().map(|z| z.re).collect(),
        },
    })
}

/// `(e^z - 1)/z`, continuous through `z = 0`.
pub fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        // 1 + z/2 + z²/6 + z³/24 + z⁴/120
        1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Transforms of the demo kernel `k(t) = -e^{-t}`.
///
/// `k̂⁺(y) = -∫_0^∞ e^{iyt} e^{-t} dt = -1/(1 - iy)` and
/// `k̂⁻(y) = -∫_{-2}^0 e^{iyt} e^{-t} dt = (1 - e^{2u})/u = -2 e^u sinh(u)/u`,
/// `u = 1 - iy`. The negative side is truncated at `-2`.
pub fn demo_kernel_symbols() -> (ScalarSymbol, ScalarSymbol) {
    let plus = ScalarSymbol::new("-1/(1 - iy)", Analyticity::UpperHalfPlane, |y| -(1.0 - I * y).inv());
    let minus = ScalarSymbol::new("-2 exp(1 - iy) sinh(1 - iy)/(1 - iy)", Analyticity::Entire, |y| {
        let u = 1.0 - I * y;
        -2.0 * exprel(2.0 * u)
    });
    (plus, minus)
}

/// Truncation point of the negative-side kernel in `demo_kernel_symbols`.
pub const DEMO_MINUS_TRUNCATION: f64 = 2.0;

/// Right-hand side `g(t) = 2 e^{-1/2} t e^{t² - t}` of the demo.
pub fn demo_rhs(t: f64) -> f64 {
    2.0 * (-0.5f64).exp() * t * (t * t - t).exp()
}

/// Exact demo solution `g(t) - sinh(1/2) e^{-t}`.
pub fn demo_exact(t: f64) -> f64 {
    demo_rhs(t) - 0.5f64.sinh() * (-t).exp()
}

/// The diagonal entries `-2 w_j`, `w_j = e^{-v} sinh(v)/v`, `v = -(1 - 1/λ_j)`,
/// which equal `k̂⁻(-i/λ_j)`.
pub fn minus_diagonal_recipe(eig: &EigenFactorization) -> Vec<Complex64> {
    eig.eigenvalues()
        .iter()
        .map(|&l| {
            let v = -(1.0 - l.inv());
            let w = if v.norm() < 1e-8 { (-v).exp() } else { (-v).exp() * v.sinh() / v };
            -2.0 * w
        })
        .collect()
}
