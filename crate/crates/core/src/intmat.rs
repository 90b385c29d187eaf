//! Indefinite-integration matrices `A±` on (-1, 1), their scaling to an
//! interval (a, b), eigendecomposition, and matrix functions evaluated
//! through the eigenbasis.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, IntervalMap, QuadratureBasis, WeightFamily};
use crate::error::{Error, Result};

/// Entry tolerance for the quadrature that fills the matrices.
pub const ENTRY_TOL: f64 = 1e-12;
/// Largest acceptable condition number of the eigenvector matrix.
pub const MAX_EIGENVECTOR_COND: f64 = 1e8;
/// Relative imaginary residue tolerated when a real result is requested.
pub const REAL_RESIDUE_TOL: f64 = 1e-9;

const MAX_RULE_POINTS: usize = 4096;

/// Direction of integration: `+` integrates from the left end, `-` to the right end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// `+1` for `Plus`, `-1` for `Minus`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        })
    }
}

/// The pair `A+`, `A-` for one basis on (-1, 1).
#[derive(Debug, Clone)]
pub struct IntegrationMatrices {
    basis: QuadratureBasis,
    plus: DMatrix<f64>,
    minus: DMatrix<f64>,
}

impl IntegrationMatrices {
    pub fn basis(&self) -> &QuadratureBasis {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn plus(&self) -> &DMatrix<f64> {
        &self.plus
    }

    pub fn minus(&self) -> &DMatrix<f64> {
        &self.minus
    }

    pub fn side(&self, side: Side) -> &DMatrix<f64> {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    /// Scales one side to `map`: `C = ((b - a)/2) A_side`, nodes `ξ_j = t(x_j)`.
    pub fn scale(&self, side: Side, map: IntervalMap) -> ScaledMatrix {
        self.scale_by(side, map, map.half_length())
    }

    /// `C = factor · A_side` with nodes mapped to `map`. Any factor other
    /// than `(b - a)/2` gives a deliberately inconsistent operator, which is
    /// useful for showing what happens when the interval scaling is omitted.
    pub fn scale_by(&self, side: Side, map: IntervalMap, factor: f64) -> ScaledMatrix {
        ScaledMatrix {
            side,
            map,
            matrix: self.side(side) * factor,
            nodes: self.basis.mapped_nodes(&map),
        }
    }
}

/// `A+_{jk} = ∫_{-1}^{x_j} ℓ_k w` and `A-_{jk} = ∫_{x_j}^{1} ℓ_k w`.
///
/// For the unit weight every row is one Gauss–Legendre rule with
/// `⌈n/2⌉ + 2` points, which is exact. Other Jacobi weights split each
/// integral at the origin so that only one endpoint singularity is
/// present per piece; that singularity is absorbed into a Gauss–Jacobi
/// rule whose size is doubled until successive rows agree to `ENTRY_TOL`.
pub fn build_integration_matrices(basis: &QuadratureBasis) -> Result<IntegrationMatrices> {
    let n = basis.n();
    let mut plus = DMatrix::zeros(n, n);
    let mut minus = DMatrix::zeros(n, n);
    if basis.family().is_unit_weight() {
        let rule = build_basis(WeightFamily::Legendre, n.div_ceil(2) + 2)?;
        for (j, &xj) in basis.nodes().iter().enumerate() {
            let left = unit_weight_integrals(basis, &rule, -1.0, xj);
            let right = unit_weight_integrals(basis, &rule, xj, 1.0);
            for k in 0..n {
                plus[(j, k)] = left[k];
                minus[(j, k)] = right[k];
            }
        }
    } else {
        let mut pieces = HalfIntegrals::new(basis);
        let left_half = pieces.left(0.0, 0)?;
        let right_half = pieces.right(0.0, 0)?;
        for (j, &xj) in basis.nodes().iter().enumerate() {
            let (p, m) = if xj <= 0.0 {
                let left = pieces.left(xj, j)?;
                let m: Vec<f64> = (0..n).map(|k| right_half[k] + left_half[k] - left[k]).collect();
                (left, m)
            } else {
                let right = pieces.right(xj, j)?;
                let p: Vec<f64> = (0..n).map(|k| left_half[k] + right_half[k] - right[k]).collect();
                (p, right)
            };
            for k in 0..n {
                plus[(j, k)] = p[k];
                minus[(j, k)] = m[k];
            }
        }
    }
    Ok(IntegrationMatrices {
        basis: basis.clone(),
        plus,
        minus,
    })
}

fn unit_weight_integrals(basis: &QuadratureBasis, rule: &QuadratureBasis, lo: f64, hi: f64) -> Vec<f64> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = vec![0.0; basis.n()];
    for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
        for (a, l) in acc.iter_mut().zip(basis.cardinals(mid + half * s)) {
            *a += w * half * l;
        }
    }
    acc
}

/// Integrals of every cardinal against a Jacobi weight over `[-1, c]`
/// (c <= 0) or `[c, 1]` (c >= 0).
struct HalfIntegrals<'a> {
    basis: &'a QuadratureBasis,
    alpha: f64,
    beta: f64,
    left_rules: Vec<QuadratureBasis>,
    right_rules: Vec<QuadratureBasis>,
}

impl<'a> HalfIntegrals<'a> {
    fn new(basis: &'a QuadratureBasis) -> Self {
        let (alpha, beta) = basis.family().jacobi_exponents();
        Self {
            basis,
            alpha,
            beta,
            left_rules: Vec::new(),
            right_rules: Vec::new(),
        }
    }

    fn rule(rules: &mut Vec<QuadratureBasis>, level: usize, base: usize, family: WeightFamily) -> Result<&QuadratureBasis> {
        while rules.len() <= level {
            let m = base << rules.len();
            rules.push(build_basis(family, m)?);
        }
        Ok(&rules[level])
    }

    fn base_points(&self) -> usize {
        self.basis.n() + 8
    }

    fn left(&mut self, c: f64, row: usize) -> Result<Vec<f64>> {
        let family = WeightFamily::Jacobi { alpha: 0.0, beta: self.beta };
        let scale = ((c + 1.0) / 2.0).powf(self.beta + 1.0);
        let (alpha, basis, base) = (self.alpha, self.basis, self.base_points());
        let map = move |s: f64| {
            let x = -1.0 + (c + 1.0) * (1.0 + s) / 2.0;
            (x, (1.0 - x).powf(alpha))
        };
        refine(&mut self.left_rules, family, base, basis, row, scale, map)
    }

    fn right(&mut self, c: f64, row: usize) -> Result<Vec<f64>> {
        let family = WeightFamily::Jacobi { alpha: self.alpha, beta: 0.0 };
        let scale = ((1.0 - c) / 2.0).powf(self.alpha + 1.0);
        let (beta, basis, base) = (self.beta, self.basis, self.base_points());
        let map = move |s: f64| {
            let x = c + (1.0 - c) * (1.0 + s) / 2.0;
            (x, (1.0 + x).powf(beta))
        };
        refine(&mut self.right_rules, family, base, basis, row, scale, map)
    }
}

fn refine(
    rules: &mut Vec<QuadratureBasis>,
    family: WeightFamily,
    base: usize,
    basis: &QuadratureBasis,
    row: usize,
    scale: f64,
    map: impl Fn(f64) -> (f64, f64),
) -> Result<Vec<f64>> {
    let n = basis.n();
    let eval = |rule: &QuadratureBasis| -> Vec<f64> {
        let mut acc = vec![0.0; n];
        for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
            let (x, smooth) = map(s);
            for (a, l) in acc.iter_mut().zip(basis.cardinals(x)) {
                *a += w * smooth * l;
            }
        }
        acc.iter_mut().for_each(|a| *a *= scale);
        acc
    };
    let mut level = 0;
    let mut prev = eval(HalfIntegrals::rule(rules, level, base, family)?);
    loop {
        level += 1;
        if base << level > MAX_RULE_POINTS {
            let (col, estimate) = worst_diff(&prev, &eval(HalfIntegrals::rule(rules, level - 1, base, family)?));
            return Err(Error::EntryAccuracy { row, col, estimate });
        }
        let next = eval(HalfIntegrals::rule(rules, level, base, family)?);
        let (col, diff) = worst_diff(&prev, &next);
        if diff <= ENTRY_TOL {
            return Ok(next);
        }
        if level >= 12 {
            return Err(Error::EntryAccuracy { row, col, estimate: diff });
        }
        prev = next;
    }
}

fn worst_diff(a: &[f64], b: &[f64]) -> (usize, f64) {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
        .enumerate()
        .fold((0, 0.0), |best, (k, d)| if d > best.1 { (k, d) } else { best })
}

/// One side of the integration matrices scaled to an interval.
#[derive(Debug, Clone)]
pub struct ScaledMatrix {
    side: Side,
    map: IntervalMap,
    matrix: DMatrix<f64>,
    nodes: Vec<f64>,
}

impl ScaledMatrix {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn map(&self) -> &IntervalMap {
        &self.map
    }

    /// `C = ((b - a)/2) A_side`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Mapped nodes `ξ_j`, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let out = &self.matrix * nalgebra::DVector::from_column_slice(v);
        out.iter().copied().collect()
    }
}

/// Complex eigendecomposition `C = X diag(λ) X⁻¹` of a scaled matrix.
#[derive(Debug, Clone)]
pub struct EigenFactorization {
    side: Side,
    map: IntervalMap,
    matrix: DMatrix<f64>,
    lambda: Vec<Complex64>,
    vectors: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
    cond: f64,
}

/// Eigenvalues of a real matrix sorted by (real part, imaginary part).
pub fn eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = matrix.nrows();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| matrix[(i, j)]);
    let mut values = m.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    values.sort_by(cmp_complex);
    Ok(values)
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Diagonalises `scaled.matrix()`.
///
/// Eigenvalues are ordered by (Re, Im); eigenvector columns have unit
/// 2-norm and their first non-negligible entry has non-negative real part.
pub fn eigen_factorize(scaled: &ScaledMatrix) -> Result<EigenFactorization> {
    let c = scaled.matrix();
    let n = c.nrows();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| c[(i, j)]);
    let evd = m.eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| cmp_complex(&s[i], &s[j]));

    let lambda: Vec<Complex64> = order.iter().map(|&i| s[i]).collect();
    let mut vectors = DMatrix::<Complex64>::from_fn(n, n, |i, j| u[(i, order[j])]);
    for mut col in vectors.column_iter_mut() {
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            col.iter_mut().for_each(|z| *z /= norm);
        }
        let lead = col.iter().copied().find(|z| z.norm() > 1e-12);
        if let Some(z) = lead {
            if z.re < 0.0 {
                col.iter_mut().for_each(|v| *v = -*v);
            }
        }
    }
    let sv = vectors.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond <= MAX_EIGENVECTOR_COND) {
        return Err(Error::IllConditioned { cond });
    }
    let inverse = vectors
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular("eigenvector matrix".into()))?;
    Ok(EigenFactorization {
        side: scaled.side(),
        map: *scaled.map(),
        matrix: c.clone(),
        lambda,
        vectors,
        inverse,
        cond,
    })
}

/// A real vector recovered from a complex matrix-function result.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVector {
    pub values: Vec<f64>,
    /// `max |Im| / max |value|` of the discarded imaginary part.
    pub imag_residue: f64,
}

impl EigenFactorization {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn map(&self) -> &IntervalMap {
        &self.map
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// The factorised matrix `C`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.lambda
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn inverse_vectors(&self) -> &DMatrix<Complex64> {
        &self.inverse
    }

    pub fn cond_estimate(&self) -> f64 {
        self.cond
    }

    /// `φ(λ_j)` for every eigenvalue, failing on a non-finite value.
    pub fn symbol_values(&self, phi: impl Fn(Complex64) -> Complex64) -> Result<Vec<Complex64>> {
        self.lambda
            .iter()
            .map(|&l| {
                let v = phi(l);
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::PoleEvaluation { lambda: l })
                }
            })
            .collect()
    }

    /// `X diag(d) X⁻¹` for given diagonal entries.
    pub fn assemble(&self, diag: &[Complex64]) -> DMatrix<Complex64> {
        let mut scaled = self.vectors.clone();
        for (mut col, d) in scaled.column_iter_mut().zip(diag) {
            col *= *d;
        }
        scaled * &self.inverse
    }

    /// `φ(C) = X diag(φ(λ)) X⁻¹`.
    pub fn function_matrix(&self, phi: impl Fn(Complex64) -> Complex64) -> Result<DMatrix<Complex64>> {
        Ok(self.assemble(&self.symbol_values(phi)?))
    }

    /// `X diag(φ(λ)) X⁻¹ v`.
    pub fn apply(&self, phi: impl Fn(Complex64) -> Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n() {
            return Err(Error::ParameterDomain(format!(
                "vector length {} does not match n = {}",
                v.len(),
                self.n()
            )));
        }
        let d = self.symbol_values(phi)?;
        Ok(self.apply_diagonal(&d, v))
    }

    /// `X diag(d) X⁻¹ v` for precomputed diagonal entries (same order as `eigenvalues()`).
    pub fn apply_diagonal(&self, diag: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
        let y = &self.inverse * nalgebra::DVector::from_column_slice(v);
        let y = y.zip_map(&nalgebra::DVector::from_column_slice(diag), |a, b| a * b);
        (&self.vectors * y).iter().copied().collect()
    }

    /// Real part of `X diag(d) X⁻¹ v`, checking the imaginary residue.
    pub fn apply_diagonal_real(&self, diag: &[Complex64], v: &[f64]) -> Result<RealVector> {
        let cv: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        to_real(&self.apply_diagonal(diag, &cv))
    }

    /// `φ(C) v` for real `v`, returning the real part when the imaginary
    /// residue is below `REAL_RESIDUE_TOL` relative to the result.
    pub fn apply_real(&self, phi: impl Fn(Complex64) -> Complex64, v: &[f64]) -> Result<RealVector> {
        let cv: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        to_real(&self.apply(phi, &cv)?)
    }
}

/// Truncates a complex vector to its real part, checking the imaginary residue.
pub fn to_real(values: &[Complex64]) -> Result<RealVector> {
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let imag = values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let imag_residue = if scale > 0.0 { imag / scale } else { 0.0 };
    if imag_residue > REAL_RESIDUE_TOL {
        return Err(Error::ComplexResidue { residue: imag_residue });
    }
    Ok(RealVector {
        values: values.iter().map(|z| z.re).collect(),
        imag_residue,
    })
}

/// Region where a transform symbol is analytic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analyticity {
    UpperHalfPlane,
    LowerHalfPlane,
    RightHalfPlane,
    Entire,
}

impl Analyticity {
    pub fn covers(self, required: Analyticity) -> bool {
        self == Analyticity::Entire || self == required
    }
}

/// A complex scalar function, lifted to matrices through an eigenbasis.
///
/// Multivalued pieces (square roots, logarithms, arctangents) use their
/// principal branches.
#[derive(Clone)]
pub struct ScalarSymbol {
    name: String,
    region: Analyticity,
    eval: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
}

impl ScalarSymbol {
    pub fn new(
        name: impl Into<String>,
        region: Analyticity,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            region,
            eval: Arc::new(eval),
        }
    }

    pub fn zero() -> Self {
        Self::new("0", Analyticity::Entire, |_| Complex64::new(0.0, 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn region(&self) -> Analyticity {
        self.region
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    /// `ε · φ`.
    pub fn scaled(&self, factor: f64) -> Self {
        let inner = self.eval.clone();
        Self {
            name: format!("{factor} * ({})", self.name),
            region: self.region,
            eval: Arc::new(move |z| inner(z) * factor),
        }
    }
}

impl fmt::Debug for ScalarSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarSymbol")
            .field("name", &self.name)
            .field("region", &self.region)
            .finish()
    }
}

/// `N(C) D(C)⁻¹ v` by an LU solve with the assembled matrix `D(C)`.
/// Coefficients are listed in ascending powers.
pub fn rational_apply(c: &DMatrix<f64>, numerator: &[f64], denominator: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = c.nrows();
    if v.len() != n {
        return Err(Error::ParameterDomain("vector length does not match matrix".into()));
    }
    let poly = |coeffs: &[f64]| -> DMatrix<f64> {
        let mut acc = DMatrix::<f64>::zeros(n, n);
        for &a in coeffs.iter().rev() {
            acc = &acc * c + DMatrix::<f64>::identity(n, n) * a;
        }
        acc
    };
    let den = poly(denominator);
    let rhs = nalgebra::DVector::from_column_slice(v);
    let y = den
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("denominator polynomial of C".into()))?;
    Ok((poly(numerator) * y).iter().copied().collect())
}

/// Largest distance in a greedy nearest-neighbour matching of two spectra.
pub fn spectral_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for za in a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, zb)| (i, (za - zb).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[idx] = true;
        worst = worst.max(d);
    }
    worst
}
