//! Orthogonal-polynomial grids on (-1, 1), barycentric Lagrange
//! interpolation, affine interval maps and Legendre coefficient estimation.

use std::fmt;
use std::ops::{Add, Div, Mul};
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight function on (-1, 1) defining the orthogonal-polynomial family.
///
/// Every family is a Jacobi weight `(1 - x)^alpha (1 + x)^beta`:
/// Legendre is `(0, 0)`, Chebyshev of the first kind `(-1/2, -1/2)` and
/// Gegenbauer with parameter `lambda` is `(lambda - 1/2, lambda - 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFamily {
    Legendre,
    ChebyshevFirst,
    Gegenbauer { lambda: f64 },
    Jacobi { alpha: f64, beta: f64 },
}

impl WeightFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightFamily::Legendre | WeightFamily::ChebyshevFirst => Ok(()),
            WeightFamily::Gegenbauer { lambda } => {
                if lambda.is_finite() && lambda > -0.5 {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "Gegenbauer parameter must exceed -1/2, got {lambda}"
                    )))
                }
            }
            WeightFamily::Jacobi { alpha, beta } => {
                if alpha.is_finite() && beta.is_finite() && alpha > -1.0 && beta > -1.0 {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "Jacobi exponents must exceed -1, got alpha = {alpha}, beta = {beta}"
                    )))
                }
            }
        }
    }

    /// Exponents `(alpha, beta)` of `(1 - x)^alpha (1 + x)^beta`.
    pub fn jacobi_exponents(&self) -> (f64, f64) {
        match *self {
            WeightFamily::Legendre => (0.0, 0.0),
            WeightFamily::ChebyshevFirst => (-0.5, -0.5),
            WeightFamily::Gegenbauer { lambda } => (lambda - 0.5, lambda - 0.5),
            WeightFamily::Jacobi { alpha, beta } => (alpha, beta),
        }
    }

    pub fn is_unit_weight(&self) -> bool {
        self.jacobi_exponents() == (0.0, 0.0)
    }

    pub fn is_symmetric(&self) -> bool {
        let (alpha, beta) = self.jacobi_exponents();
        alpha == beta
    }

    pub fn density(&self, x: f64) -> f64 {
        let (alpha, beta) = self.jacobi_exponents();
        let mut w = 1.0;
        if alpha != 0.0 {
            w *= (1.0 - x).powf(alpha);
        }
        if beta != 0.0 {
            w *= (1.0 + x).powf(beta);
        }
        w
    }

    /// Total measure `∫_{-1}^{1} w(x) dx`.
    pub fn total_mass(&self) -> f64 {
        let (alpha, beta) = self.jacobi_exponents();
        (alpha + beta + 1.0).exp2() * libm::tgamma(alpha + 1.0) * libm::tgamma(beta + 1.0)
            / libm::tgamma(alpha + beta + 2.0)
    }

    /// Orthonormal three-term recurrence coefficients.
    ///
    /// Returns `(diag, off, mass)` where `diag[k]` is the k-th diagonal
    /// entry of the Jacobi matrix (k = 0..len) and `off[k]` couples
    /// degrees `k - 1` and `k` (`off[0] = 0`).
    pub fn recurrence(&self, len: usize) -> (Vec<f64>, Vec<f64>, f64) {
        let (alpha, beta) = self.jacobi_exponents();
        let ab = alpha + beta;
        let mut diag = Vec::with_capacity(len);
        let mut off = Vec::with_capacity(len + 1);
        off.push(0.0);
        for k in 0..len {
            let kf = k as f64;
            let a = if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                let s = 2.0 * kf + ab;
                (beta * beta - alpha * alpha) / (s * (s + 2.0))
            };
            diag.push(a);
        }
        for k in 1..=len {
            let kf = k as f64;
            let b2 = if k == 1 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * kf + ab;
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                    / (s * s * (s + 1.0) * (s - 1.0))
            };
            off.push(b2.sqrt());
        }
        (diag, off, self.total_mass())
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFamily::Legendre => write!(f, "legendre"),
            WeightFamily::ChebyshevFirst => write!(f, "chebyshev"),
            WeightFamily::Gegenbauer { lambda } => write!(f, "gegenbauer:{lambda}"),
            WeightFamily::Jacobi { alpha, beta } => write!(f, "jacobi:{alpha},{beta}"),
        }
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    /// Accepts `legendre`, `chebyshev`, `gegenbauer:<lambda>` and
    /// `jacobi:<alpha>,<beta>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParameterDomain(format!("unrecognised weight family '{s}'"));
        let (name, params) = match s.split_once(':') {
            Some((name, params)) => (name, Some(params)),
            None => (s, None),
        };
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let family = match (name.trim().to_ascii_lowercase().as_str(), params) {
            ("legendre", None) => WeightFamily::Legendre,
            ("chebyshev" | "chebyshev-first" | "chebyshev1", None) => WeightFamily::ChebyshevFirst,
            ("gegenbauer", Some(p)) => WeightFamily::Gegenbauer { lambda: parse(p)? },
            ("jacobi", Some(p)) => {
                let (a, b) = p.split_once(',').ok_or_else(bad)?;
                WeightFamily::Jacobi {
                    alpha: parse(a)?,
                    beta: parse(b)?,
                }
            }
            _ => return Err(bad()),
        };
        family.validate()?;
        Ok(family)
    }
}

/// Affine map `t(y) = (a + b)/2 + y (b - a)/2` from (-1, 1) onto (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalMap {
    a: f64,
    b: f64,
}

impl IntervalMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::ParameterDomain(format!(
                "interval endpoints must satisfy a < b, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn reference() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// `(b - a)/2`, the factor that scales integration matrices.
    pub fn half_length(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn to_interval(&self, y: f64) -> f64 {
        0.5 * (self.a + self.b) + y * self.half_length()
    }

    pub fn to_reference(&self, t: f64) -> f64 {
        (t - 0.5 * (self.a + self.b)) / self.half_length()
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-14 * self.a.abs().max(self.b.abs()).max(1.0);
        t >= self.a - slack && t <= self.b + slack
    }

    /// `count` equispaced points covering `[a, b]` including both ends.
    pub fn equispaced(&self, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![0.5 * (self.a + self.b)],
            _ => {
                let h = self.length() / (count - 1) as f64;
                (0..count)
                    .map(|i| if i + 1 == count { self.b } else { self.a + h * i as f64 })
                    .collect()
            }
        }
    }
}

/// Values that can be interpolated: reals and complex numbers.
pub trait NodeValue:
    Copy + Add<Output = Self> + Mul<f64, Output = Self> + Div<f64, Output = Self>
{
    fn zero() -> Self;
}

impl NodeValue for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl NodeValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// Result of evaluating an interpolant; `extrapolated` is set when any
/// evaluation point fell outside the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolation<T> {
    pub values: Vec<T>,
    pub extrapolated: bool,
}

/// Gauss nodes and weights of a degree-n orthogonal-polynomial family.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureBasis {
    family: WeightFamily,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    barycentric: Vec<f64>,
}

/// Builds the `n`-point Gauss rule for `family`.
///
/// Nodes come from the symmetric Jacobi matrix of the recurrence and are
/// polished with one Newton step on the orthonormal polynomial; weights
/// are the Christoffel numbers at the polished nodes.
pub fn build_basis(family: WeightFamily, n: usize) -> Result<QuadratureBasis> {
    family.validate()?;
    if n == 0 {
        return Err(Error::ParameterDomain("basis size n must be at least 1".into()));
    }
    let (diag, off, mass) = family.recurrence(n);
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[j]
        } else if j + 1 == i {
            off[i]
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    for x in nodes.iter_mut() {
        let (q, dq, _) = orthonormal_eval(&diag, &off, mass, n, *x);
        if dq != 0.0 && dq.is_finite() {
            let step = q / dq;
            if step.abs() < 1e-6 {
                *x -= step;
            }
        }
    }
    if family.is_symmetric() {
        for j in 0..n / 2 {
            let k = n - 1 - j;
            let half = 0.5 * (nodes[k] - nodes[j]);
            nodes[j] = -half;
            nodes[k] = half;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
    }

    let weights = nodes
        .iter()
        .map(|&x| 1.0 / orthonormal_eval(&diag, &off, mass, n, x).2)
        .collect();
    let barycentric = barycentric_weights(&nodes);
    Ok(QuadratureBasis {
        family,
        nodes,
        weights,
        barycentric,
    })
}

/// Evaluates `(q_n(x), q_n'(x), Σ_{k<n} q_k(x)^2)` for the orthonormal family.
fn orthonormal_eval(diag: &[f64], off: &[f64], mass: f64, n: usize, x: f64) -> (f64, f64, f64) {
    let mut q_prev = 0.0;
    let mut q = 1.0 / mass.sqrt();
    let mut dq_prev = 0.0;
    let mut dq = 0.0;
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += q * q;
        let q_next = ((x - diag[k]) * q - off[k] * q_prev) / off[k + 1];
        let dq_next = (q + (x - diag[k]) * dq - off[k] * dq_prev) / off[k + 1];
        q_prev = q;
        q = q_next;
        dq_prev = dq;
        dq = dq_next;
    }
    (q, dq, sum_sq)
}

pub(crate) fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let mut w: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &xj)| xk - xj)
                .product();
            1.0 / prod
        })
        .collect();
    let scale = w.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale > 0.0 {
        w.iter_mut().for_each(|v| *v /= scale);
    }
    w
}

/// Second-form barycentric evaluation at `x` on arbitrary `nodes`.
pub(crate) fn barycentric_eval<T: NodeValue>(nodes: &[f64], bary: &[f64], values: &[T], x: f64) -> T {
    let mut num = T::zero();
    let mut den = 0.0;
    for ((&xk, &wk), &fk) in nodes.iter().zip(bary).zip(values) {
        let d = x - xk;
        if d == 0.0 {
            return fk;
        }
        let c = wk / d;
        num = num + fk * c;
        den += c;
    }
    num / den
}

impl QuadratureBasis {
    pub fn family(&self) -> WeightFamily {
        self.family
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in ascending order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn barycentric_weights(&self) -> &[f64] {
        &self.barycentric
    }

    /// Nodes pushed forward to (a, b).
    pub fn mapped_nodes(&self, map: &IntervalMap) -> Vec<f64> {
        self.nodes.iter().map(|&x| map.to_interval(x)).collect()
    }

    /// Gauss approximation of `∫ f(x) w(x) dx` over (-1, 1).
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Lagrange cardinal `ℓ_k(x)` (0-based `k`), in barycentric form.
    pub fn lagrange_cardinal(&self, k: usize, x: f64) -> Result<f64> {
        if k >= self.n() {
            return Err(Error::ParameterDomain(format!(
                "cardinal index {k} out of range for n = {}",
                self.n()
            )));
        }
        let mut den = 0.0;
        let mut num = 0.0;
        for (j, (&xj, &wj)) in self.nodes.iter().zip(&self.barycentric).enumerate() {
            let d = x - xj;
            if d == 0.0 {
                return Ok(if j == k { 1.0 } else { 0.0 });
            }
            let c = wj / d;
            if j == k {
                num = c;
            }
            den += c;
        }
        Ok(num / den)
    }

    /// All cardinals `ℓ_1(x)..ℓ_n(x)` at once.
    pub fn cardinals(&self, x: f64) -> Vec<f64> {
        let n = self.n();
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            return e;
        }
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.barycentric)
            .map(|(&xj, &wj)| wj / (x - xj))
            .collect();
        let den: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / den).collect()
    }

    /// Evaluates the degree-(n-1) interpolant of `node_values` (given at
    /// the nodes mapped onto `map`) at `eval_points` in (a, b).
    pub fn interpolate<T: NodeValue>(
        &self,
        map: &IntervalMap,
        node_values: &[T],
        eval_points: &[f64],
    ) -> Result<Interpolation<T>> {
        if node_values.len() != self.n() {
            return Err(Error::ParameterDomain(format!(
                "expected {} node values, got {}",
                self.n(),
                node_values.len()
            )));
        }
        let mut extrapolated = false;
        let values = eval_points
            .iter()
            .map(|&t| {
                extrapolated |= !map.contains(t);
                barycentric_eval(&self.nodes, &self.barycentric, node_values, map.to_reference(t))
            })
            .collect();
        Ok(Interpolation {
            values,
            extrapolated,
        })
    }

    /// Discrete Legendre coefficients `ĉ_0..ĉ_max_k` of the function
    /// sampled at the nodes, against orthonormal Legendre polynomials.
    ///
    /// `stop_index` is the first k with `|ĉ_k| < tol`.
    pub fn legendre_coefficients(
        &self,
        node_values: &[f64],
        max_k: usize,
        tol: f64,
    ) -> Result<LegendreCoefficients> {
        if !self.family.is_unit_weight() {
            return Err(Error::UnsupportedFamily(self.family.to_string()));
        }
        if max_k >= self.n() {
            return Err(Error::ParameterDomain(format!(
                "max_k = {max_k} must be below n = {}",
                self.n()
            )));
        }
        if node_values.len() != self.n() {
            return Err(Error::ParameterDomain(format!(
                "expected {} node values, got {}",
                self.n(),
                node_values.len()
            )));
        }
        let mut coefficients = vec![0.0; max_k + 1];
        for ((&x, &w), &f) in self.nodes.iter().zip(&self.weights).zip(node_values) {
            for (k, phi) in normalized_legendre(max_k, x).into_iter().enumerate() {
                coefficients[k] += w * f * phi;
            }
        }
        let stop_index = coefficients.iter().position(|c| c.abs() < tol);
        Ok(LegendreCoefficients {
            coefficients,
            stop_index,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegendreCoefficients {
    pub coefficients: Vec<f64>,
    pub stop_index: Option<usize>,
}

/// `φ_0(x)..φ_max_k(x)` with `∫ φ_j φ_k = δ_jk` on (-1, 1).
pub fn normalized_legendre(max_k: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(max_k + 1);
    p.push(1.0);
    if max_k >= 1 {
        p.push(x);
    }
    for k in 1..max_k {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    p.iter()
        .enumerate()
        .map(|(k, v)| v * ((2.0 * k as f64 + 1.0) / 2.0).sqrt())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_families() -> Vec<WeightFamily> {
        vec![
            WeightFamily::Legendre,
            WeightFamily::ChebyshevFirst,
            WeightFamily::Gegenbauer { lambda: 1.5 },
            WeightFamily::Gegenbauer { lambda: 0.25 },
            WeightFamily::Jacobi { alpha: 0.5, beta: -0.3 },
            WeightFamily::Jacobi { alpha: -0.6, beta: 1.2 },
        ]
    }

    #[test]
    fn legendre_one_point() {
        let b = build_basis(WeightFamily::Legendre, 1).unwrap();
        assert_eq!(b.nodes(), &[0.0]);
        assert!((b.weights()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_two_points() {
        let b = build_basis(WeightFamily::Legendre, 2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((b.nodes()[0] + r).abs() < 1e-15);
        assert!((b.nodes()[1] - r).abs() < 1e-15);
        for w in b.weights() {
            assert!((w - 1.0).abs() < 1e-14);
        }
        assert!((b.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_five_points() {
        let b = build_basis(WeightFamily::Legendre, 5).unwrap();
        assert_eq!(b.nodes()[2], 0.0);
        assert!((b.nodes()[4] - 0.906_179_845_938_664).abs() < 1e-14);
        assert!((b.nodes()[0] + 0.906_179_845_938_664).abs() < 1e-14);
        // bracket each node as a sign change of P_5 evaluated by the closed form
        let p5 = |x: f64| (63.0 * x.powi(5) - 70.0 * x.powi(3) + 15.0 * x) / 8.0;
        for &x in b.nodes() {
            assert!(p5(x - 1e-12) * p5(x + 1e-12) <= 0.0, "no sign change at {x}");
        }
    }

    #[test]
    fn chebyshev_matches_closed_form_nodes() {
        for n in 1..=12 {
            let b = build_basis(WeightFamily::ChebyshevFirst, n).unwrap();
            for (j, &x) in b.nodes().iter().enumerate() {
                let exact = -((2 * j + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
                assert!((x - exact).abs() < 1e-14, "n={n} j={j}");
            }
            for &w in b.weights() {
                assert!((w - std::f64::consts::PI / n as f64).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn weights_sum_to_total_mass() {
        for fam in all_families() {
            for n in [1, 3, 8, 20] {
                let b = build_basis(fam, n).unwrap();
                let s: f64 = b.weights().iter().sum();
                assert!((s - fam.total_mass()).abs() < 1e-13 * fam.total_mass().max(1.0), "{fam} n={n}");
            }
        }
        let b = build_basis(WeightFamily::Legendre, 17).unwrap();
        assert!((b.weights().iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_exactness_against_beta_moments() {
        // ∫ (1-x)^α (1+x)^(β+k) dx = 2^(α+β+k+1) B(α+1, β+k+1)
        for fam in all_families() {
            let (alpha, beta) = fam.jacobi_exponents();
            for n in 1..=10 {
                let b = build_basis(fam, n).unwrap();
                for k in 0..(2 * n) {
                    let kf = k as f64;
                    let exact = (alpha + beta + kf + 1.0).exp2() * libm::tgamma(alpha + 1.0)
                        * libm::tgamma(beta + kf + 1.0)
                        / libm::tgamma(alpha + beta + kf + 2.0);
                    let got = b.integrate(|x| (1.0 + x).powi(k as i32));
                    assert!(
                        (got - exact).abs() <= 1e-12 * exact.max(1.0),
                        "{fam} n={n} k={k}: {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn legendre_monomials_exact() {
        for n in 1..=12 {
            let b = build_basis(WeightFamily::Legendre, n).unwrap();
            for k in 0..(2 * n) {
                let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                let got = b.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn nodes_are_recurrence_roots() {
        for fam in all_families() {
            for n in [1, 4, 9, 30, 60] {
                let b = build_basis(fam, n).unwrap();
                let (diag, off, mass) = fam.recurrence(n);
                for &x in b.nodes() {
                    let (q, _, _) = orthonormal_eval(&diag, &off, mass, n, x);
                    assert!(q.abs() < 1e-13 * (n as f64), "{fam} n={n} residual {q:e}");
                }
                assert!(b.nodes().windows(2).all(|w| w[0] < w[1]));
                assert!(b.nodes().iter().all(|&x| x > -1.0 && x < 1.0));
                assert!(b.weights().iter().all(|&w| w > 0.0));
            }
        }
    }

    #[test]
    fn symmetric_families_have_symmetric_nodes() {
        for fam in all_families().into_iter().filter(|f| f.is_symmetric()) {
            for n in 1..=15 {
                let b = build_basis(fam, n).unwrap();
                let x = b.nodes();
                for j in 0..n {
                    assert!((x[j] + x[n - 1 - j]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn cardinal_matrix_is_identity() {
        for fam in all_families() {
            for n in 1..=12 {
                let b = build_basis(fam, n).unwrap();
                for (j, &xj) in b.nodes().iter().enumerate() {
                    for k in 0..n {
                        let v = b.lagrange_cardinal(k, xj).unwrap();
                        let e = if j == k { 1.0 } else { 0.0 };
                        assert!((v - e).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn two_point_cardinal_at_origin() {
        let b = build_basis(WeightFamily::Legendre, 2).unwrap();
        assert!((b.lagrange_cardinal(0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(b.lagrange_cardinal(2, 0.0).is_err());
    }

    #[test]
    fn cardinals_agree_with_product_formula() {
        let b = build_basis(WeightFamily::Jacobi { alpha: 0.3, beta: 0.7 }, 7).unwrap();
        let x = b.nodes();
        let t = 0.123;
        let all = b.cardinals(t);
        for k in 0..7 {
            let prod: f64 = (0..7).filter(|&j| j != k).map(|j| (t - x[j]) / (x[k] - x[j])).product();
            assert!((all[k] - prod).abs() < 1e-13);
            assert!((b.lagrange_cardinal(k, t).unwrap() - prod).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolate_constant_and_linear() {
        let b = build_basis(WeightFamily::Legendre, 5).unwrap();
        let map = IntervalMap::new(0.0, 3.0).unwrap();
        let pts = map.equispaced(11);
        let c = b.interpolate(&map, &[2.5; 5], &pts).unwrap();
        assert!(!c.extrapolated);
        assert!(c.values.iter().all(|v| (v - 2.5).abs() < 1e-14));
        let xi = b.mapped_nodes(&map);
        let mid = b.interpolate(&map, &xi, &[1.5]).unwrap();
        assert!((mid.values[0] - 1.5).abs() < 1e-14);
        let out = b.interpolate(&map, &xi, &[3.5]).unwrap();
        assert!(out.extrapolated);
        assert!((out.values[0] - 3.5).abs() < 1e-12);
        assert!(b.interpolate(&map, &xi[..3], &[1.0]).is_err());
    }

    #[test]
    fn interpolate_complex_values() {
        let b = build_basis(WeightFamily::Legendre, 4).unwrap();
        let map = IntervalMap::reference();
        let vals: Vec<Complex64> = b.nodes().iter().map(|&x| Complex64::new(x * x, -x)).collect();
        let r = b.interpolate(&map, &vals, &[0.3]).unwrap();
        assert!((r.values[0] - Complex64::new(0.09, -0.3)).norm() < 1e-14);
    }

    #[test]
    fn legendre_coefficients_of_constant_and_linear() {
        let b = build_basis(WeightFamily::Legendre, 6).unwrap();
        let ones = vec![1.0; 6];
        let c = b.legendre_coefficients(&ones, 5, 1e-10).unwrap();
        assert!((c.coefficients[0] - 2f64.sqrt()).abs() < 1e-13);
        assert!(c.coefficients[1..].iter().all(|v| v.abs() < 1e-13));
        assert_eq!(c.stop_index, Some(1));

        let xs = b.nodes().to_vec();
        let c = b.legendre_coefficients(&xs, 5, 1e-10).unwrap();
        assert!(c.coefficients[0].abs() < 1e-13);
        assert!((c.coefficients[1] - (2.0f64 / 3.0).sqrt()).abs() < 1e-13);
        assert!(c.coefficients[2..].iter().all(|v| v.abs() < 1e-13));
        assert_eq!(c.stop_index, Some(0));
    }

    #[test]
    fn legendre_coefficients_reject_other_families() {
        let b = build_basis(WeightFamily::ChebyshevFirst, 4).unwrap();
        assert!(matches!(
            b.legendre_coefficients(&[1.0; 4], 2, 1e-8),
            Err(Error::UnsupportedFamily(_))
        ));
        let b = build_basis(WeightFamily::Legendre, 4).unwrap();
        assert!(b.legendre_coefficients(&[1.0; 4], 4, 1e-8).is_err());
    }

    #[test]
    fn family_parameters_are_validated() {
        assert!(build_basis(WeightFamily::Gegenbauer { lambda: -0.5 }, 3).is_err());
        assert!(build_basis(WeightFamily::Jacobi { alpha: -1.0, beta: 0.0 }, 3).is_err());
        assert!(build_basis(WeightFamily::Legendre, 0).is_err());
    }

    #[test]
    fn family_string_round_trip() {
        for fam in all_families() {
            let parsed: WeightFamily = fam.to_string().parse().unwrap();
            assert_eq!(parsed, fam);
        }
        assert!("hermite".parse::<WeightFamily>().is_err());
        assert!("jacobi:0.5".parse::<WeightFamily>().is_err());
    }

    #[test]
    fn interval_map_endpoints() {
        let m = IntervalMap::new(0.0, 4.0).unwrap();
        assert_eq!(m.to_interval(-1.0), 0.0);
        assert_eq!(m.to_interval(1.0), 4.0);
        assert_eq!(m.to_reference(2.0), 0.0);
        assert!(IntervalMap::new(1.0, 1.0).is_err());
        let pts = m.equispaced(100);
        assert_eq!(pts.len(), 100);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[99], 4.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reproduces_low_degree_polynomials(
                n in 1usize..12,
                coeffs in proptest::collection::vec(-1.0f64..1.0, 12),
                points in proptest::collection::vec(0.0f64..1.0, 50),
                a in -3.0f64..3.0,
                len in 0.1f64..5.0,
            ) {
                let map = IntervalMap::new(a, a + len).unwrap();
                let b = build_basis(WeightFamily::Legendre, n).unwrap();
                let p = |t: f64| coeffs[..n].iter().rev().fold(0.0, |acc, c| acc * map.to_reference(t) + c);
                let vals: Vec<f64> = b.mapped_nodes(&map).iter().map(|&t| p(t)).collect();
                let ts: Vec<f64> = points.iter().map(|u| a + u * len).collect();
                let got = b.interpolate(&map, &vals, &ts).unwrap();
                let scale = coeffs[..n].iter().map(|c| c.abs()).sum::<f64>().max(1e-3);
                for (t, v) in ts.iter().zip(&got.values) {
                    prop_assert!((v - p(*t)).abs() <= 1e-11 * scale);
                }
            }
        }
    }
}
