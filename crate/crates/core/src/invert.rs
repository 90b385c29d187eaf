//! Fourier and Laplace transform inversion as matrix functions of `C`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::IntervalMap;
use crate::convolve::{check_factorization, transform_argument};
use crate::error::{Error, Result};
use crate::intmat::{Analyticity, EigenFactorization, RealVector, ScalarSymbol, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionKind {
    /// `f̂(y) = ∫_0^∞ f(t) e^{iyt} dt`; recovers `f(ξ - a)`.
    FourierPlus,
    /// `f̂(y) = ∫_{-∞}^0 f(t) e^{iyt} dt`; recovers `f(ξ - b)`.
    FourierMinus,
    /// `F(s) = ∫_0^∞ f(t) e^{-st} dt` on `(0, b)`; recovers `f(ξ)`.
    Laplace,
}

impl InversionKind {
    pub fn side(self) -> Side {
        match self {
            InversionKind::FourierMinus => Side::Minus,
            _ => Side::Plus,
        }
    }

    fn region(self) -> Analyticity {
        match self {
            InversionKind::FourierPlus => Analyticity::UpperHalfPlane,
            InversionKind::FourierMinus => Analyticity::LowerHalfPlane,
            InversionKind::Laplace => Analyticity::RightHalfPlane,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InversionProblem {
    pub kind: InversionKind,
    pub transform: ScalarSymbol,
    pub map: IntervalMap,
}

impl InversionProblem {
    pub fn new(kind: InversionKind, transform: ScalarSymbol, map: IntervalMap) -> Self {
        Self { kind, transform, map }
    }

    fn validate(&self, eig: &EigenFactorization) -> Result<()> {
        if !self.transform.region().covers(self.kind.region()) {
            return Err(Error::InvalidProblem(format!(
                "{:?} inversion needs a transform analytic in the {:?} region, got {:?}",
                self.kind,
                self.kind.region(),
                self.transform.region()
            )));
        }
        if self.kind == InversionKind::Laplace && self.map.a() != 0.0 {
            return Err(Error::InvalidProblem(format!(
                "Laplace inversion needs an interval starting at 0, got a = {}",
                self.map.a()
            )));
        }
        check_factorization(eig, self.kind.side(), &self.map)
    }
}

fn ones(n: usize) -> Vec<f64> {
    vec![1.0; n]
}

/// `(1/C) f̂(±i/C) 1` through the eigenbasis.
pub fn fourier_invert(problem: &InversionProblem, eig: &EigenFactorization) -> Result<RealVector> {
    if problem.kind == InversionKind::Laplace {
        return Err(Error::InvalidProblem("use laplace_invert for Laplace transforms".into()));
    }
    problem.validate(eig)?;
    let side = problem.kind.side();
    let f = &problem.transform;
    eig.apply_real(|l| f.eval(transform_argument(side, l)) / l, &ones(eig.n()))
}

/// `(1/C) F(1/C) 1` through the eigenbasis.
pub fn laplace_invert(problem: &InversionProblem, eig: &EigenFactorization) -> Result<RealVector> {
    if problem.kind != InversionKind::Laplace {
        return Err(Error::InvalidProblem("use fourier_invert for Fourier transforms".into()));
    }
    problem.validate(eig)?;
    let f = &problem.transform;
    eig.apply_real(|l| f.eval(l.inv()) / l, &ones(eig.n()))
}

/// `F(s) = 1/2 - (1/π) atan(s/π)`, the transform of `sin(πt)/(πt)`.
pub fn sinc_laplace_transform() -> ScalarSymbol {
    use std::f64::consts::PI;
    ScalarSymbol::new("1/2 - atan(s/pi)/pi", Analyticity::RightHalfPlane, |s: Complex64| {
        0.5 - (s / PI).atan() / PI
    })
}

/// `F(s) = s^{-k}`, the transform of `t^{k-1}/(k-1)!`.
pub fn power_laplace_transform(k: i32) -> ScalarSymbol {
    ScalarSymbol::new(format!("s^-{k}"), Analyticity::RightHalfPlane, move |s: Complex64| s.powi(-k))
}

/// `f̂(y) = (1 - iy)^{-k}`, the transform of `t^{k-1} e^{-t}/(k-1)!` on the half-line.
pub fn exponential_fourier_transform(k: i32) -> ScalarSymbol {
    ScalarSymbol::new(format!("(1 - iy)^-{k}"), Analyticity::UpperHalfPlane, move |y: Complex64| {
        (1.0 - Complex64::i() * y).powi(-k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, WeightFamily};
    use crate::intmat::{build_integration_matrices, eigen_factorize, rational_apply};

    fn setup(n: usize, side: Side, a: f64, b: f64) -> (EigenFactorization, Vec<f64>) {
        let basis = build_basis(WeightFamily::Legendre, n).unwrap();
        let m = build_integration_matrices(&basis).unwrap();
        let map = IntervalMap::new(a, b).unwrap();
        (eigen_factorize(&m.scale(side, map)).unwrap(), basis.mapped_nodes(&map))
    }

    #[test]
    fn fourier_demo_matches_linear_solve() {
        let (e, _) = setup(5, Side::Plus, 0.0, 4.0);
        let p = InversionProblem::new(InversionKind::FourierPlus, exponential_fourier_transform(1), *e.map());
        let f = fourier_invert(&p, &e).unwrap();
        let lin = rational_apply(e.matrix(), &[1.0], &[1.0, 1.0], &[1.0; 5]).unwrap();
        for (a, b) in f.values.iter().zip(&lin) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn fourier_second_order_pair() {
        let (e, x) = setup(8, Side::Plus, 0.0, 4.0);
        let p = InversionProblem::new(InversionKind::FourierPlus, exponential_fourier_transform(2), *e.map());
        let f = fourier_invert(&p, &e).unwrap();
        for (v, t) in f.values.iter().zip(&x) {
            assert!((v - t * (-t).exp()).abs() < 1e-3);
        }
    }

    #[test]
    fn fourier_minus_side() {
        // f(t) = e^{t} on t < 0, f̂(y) = 1/(1 + iy); recovered as f(ξ - b)
        let (e, x) = setup(10, Side::Minus, 0.0, 2.0);
        let sym = ScalarSymbol::new("1/(1+iy)", Analyticity::LowerHalfPlane, |y: Complex64| {
            (1.0 + Complex64::i() * y).inv()
        });
        let p = InversionProblem::new(InversionKind::FourierMinus, sym, *e.map());
        let f = fourier_invert(&p, &e).unwrap();
        for (v, t) in f.values.iter().zip(&x) {
            assert!((v - (t - 2.0).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn laplace_collapse_cases() {
        for n in 2..=10 {
            let (e, x) = setup(n, Side::Plus, 0.0, 2.0);
            let mut fact = 1.0;
            for k in 1..n as i32 {
                if k > 1 {
                    fact *= (k - 1) as f64;
                }
                let p = InversionProblem::new(InversionKind::Laplace, power_laplace_transform(k), *e.map());
                let f = laplace_invert(&p, &e).unwrap();
                for (v, t) in f.values.iter().zip(&x) {
                    assert!((v - t.powi(k - 1) / fact).abs() < 1e-11, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn laplace_rational_cross_check() {
        // F(s) = 1/(s + 1): (1/λ)·1/(1/λ + 1) = 1/(1 + λ), giving e^{-t}
        let (e, _) = setup(7, Side::Plus, 0.0, 2.0);
        let sym = ScalarSymbol::new("1/(s+1)", Analyticity::RightHalfPlane, |s: Complex64| (s + 1.0).inv());
        let p = InversionProblem::new(InversionKind::Laplace, sym, *e.map());
        let f = laplace_invert(&p, &e).unwrap();
        let lin = rational_apply(e.matrix(), &[1.0], &[1.0, 1.0], &[1.0; 7]).unwrap();
        for (a, b) in f.values.iter().zip(&lin) {
            assert!((a - b).abs() < 1e-9);
        }
        // F(s) = 1/(s^2 + 1) gives sin t: (1/λ)·λ²/(1 + λ²) = λ/(1 + λ²)
        let sym = ScalarSymbol::new("1/(s^2+1)", Analyticity::RightHalfPlane, |s: Complex64| (s * s + 1.0).inv());
        let p = InversionProblem::new(InversionKind::Laplace, sym, *e.map());
        let f = laplace_invert(&p, &e).unwrap();
        let lin = rational_apply(e.matrix(), &[0.0, 1.0], &[1.0, 0.0, 1.0], &[1.0; 7]).unwrap();
        for (a, b) in f.values.iter().zip(&lin) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sinc_example_is_close() {
        let (e, x) = setup(11, Side::Plus, 0.0, 2.0);
        let p = InversionProblem::new(InversionKind::Laplace, sinc_laplace_transform(), *e.map());
        let f = laplace_invert(&p, &e).unwrap();
        for (v, t) in f.values.iter().zip(&x) {
            let exact = (std::f64::consts::PI * t).sin() / (std::f64::consts::PI * t);
            assert!((v - exact).abs() < 1e-2);
        }
    }

    #[test]
    fn invalid_problems() {
        let (e, _) = setup(4, Side::Plus, 1.0, 2.0);
        let p = InversionProblem::new(InversionKind::Laplace, power_laplace_transform(1), *e.map());
        assert!(matches!(laplace_invert(&p, &e), Err(Error::InvalidProblem(_))));
        let p = InversionProblem::new(InversionKind::FourierPlus, power_laplace_transform(1), *e.map());
        assert!(matches!(fourier_invert(&p, &e), Err(Error::InvalidProblem(_))));
    }
}
