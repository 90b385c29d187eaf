//! Quadrature checks of the continuous operator identities and bounds,
//! the right-half-plane eigenvalue scan, and discrete field-of-values sampling.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, IntervalMap, WeightFamily};
use crate::error::{Error, Result};
use crate::intmat::{build_integration_matrices, eigen_factorize, eigenvalues, spectral_distance, ScaledMatrix, Side};
use crate::oracle::{adaptive_integrate, integrate_complex, EndpointSingularity, QuadratureRequest};

/// Seed used by every randomized suite unless the caller supplies one.
pub const DEFAULT_SEED: u64 = 20_240_601;
/// Pass tolerance of the identity and bound checks.
pub const CHECK_TOL: f64 = 1e-9;

const QUAD_TOL: f64 = 1e-13;

/// Two sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        Self {
            lhs,
            rhs,
            abs_diff,
            passed: abs_diff <= tol * rhs.abs().max(1.0),
        }
    }
}

fn magnitude(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> f64 {
    // crude 16-point midpoint sum of |f|, only used to set a relative tolerance
    let h = (b - a) / 16.0;
    (0..16).map(|k| f(a + (k as f64 + 0.5) * h).norm()).sum::<f64>() * h.abs()
}

fn cintegrate_tagged(f: impl Fn(f64) -> Complex64, a: f64, b: f64, sing: EndpointSingularity) -> Result<Complex64> {
    let tol = QUAD_TOL * magnitude(&f, a, b).max(1.0);
    integrate_complex(f, &QuadratureRequest::new(a, b, tol).with_singularity(sing))
}

fn cintegrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64) -> Result<Complex64> {
    cintegrate_tagged(f, a, b, EndpointSingularity::None)
}

// the quadrature takes an infallible integrand; nested quadrature carries errors out
fn cintegrate_fallible(
    f: impl Fn(f64) -> Result<Complex64>,
    a: f64,
    b: f64,
    sing: EndpointSingularity,
) -> Result<Complex64> {
    let failure = std::cell::RefCell::new(None);
    let v = cintegrate_tagged(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        a,
        b,
        sing,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `Re (J⁺g, g) = Re ∫_a^b (∫_a^x g) conj(g(x)) dx` against `|∫_a^b g|² / 2`.
///
/// `tol` is relative to `max(1, |rhs|)`.
pub fn check_positivity_identity(g: impl Fn(f64) -> Complex64, map: &IntervalMap, tol: f64) -> Result<IdentityCheck> {
    let (a, b) = (map.a(), map.b());
    let lhs = cintegrate_fallible(|x| Ok(cintegrate(&g, a, x)? * g(x).conj()), a, b, EndpointSingularity::None)?;
    let total = cintegrate(&g, a, b)?;
    Ok(IdentityCheck::new(lhs.re, 0.5 * total.norm_sqr(), tol))
}

/// `Re ∫_a^b f'(x) conj(f(x)) dx` against `(|f(b)|² - |f(a)|²)/2`, for `f(a) = 0`.
pub fn check_derivative_range(
    f: impl Fn(f64) -> Complex64,
    df: impl Fn(f64) -> Complex64,
    map: &IntervalMap,
    tol: f64,
) -> Result<IdentityCheck> {
    let (a, b) = (map.a(), map.b());
    if f(a).norm() > 1e-12 {
        return Err(Error::InvalidProblem(format!("need f(a) = 0, got |f(a)| = {:e}", f(a).norm())));
    }
    let lhs = cintegrate(|x| df(x) * f(x).conj(), a, b)?;
    Ok(IdentityCheck::new(lhs.re, 0.5 * (f(b).norm_sqr() - f(a).norm_sqr()), tol))
}

/// Outcome of one norm-bound sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBoundReport {
    pub b: f64,
    pub bound: f64,
    pub samples: usize,
    pub skipped: usize,
    /// `None` when every sample was the zero function.
    pub max_ratio: Option<f64>,
    pub passed: bool,
    pub seed: u64,
}

/// `‖J⁺g‖₂ / ‖g‖₂` on `(0, b)` for a polynomial given by its coefficients,
/// or `None` for the zero polynomial.
pub fn operator_norm_ratio(coeffs: &[f64], b: f64) -> Option<f64> {
    let deg = coeffs.len().saturating_sub(1);
    let rule = build_basis(WeightFamily::Legendre, deg + 3).expect("Legendre rule");
    let map = IntervalMap::new(0.0, b).expect("positive length");
    let h = map.half_length();
    let g = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let jg = |x: f64| {
        let hx = 0.5 * x;
        rule.nodes().iter().zip(rule.weights()).map(|(&s, &w)| w * hx * g(hx * (1.0 + s))).sum::<f64>()
    };
    let norm2 = |f: &dyn Fn(f64) -> f64| -> f64 {
        rule.nodes()
            .iter()
            .zip(rule.weights())
            .map(|(&s, &w)| w * h * f(map.to_interval(s)).powi(2))
            .sum()
    };
    let den = norm2(&g);
    if den == 0.0 {
        return None;
    }
    Some((norm2(&jg) / den).sqrt())
}

/// Random polynomials of degree `<= n_poly` on `(0, b)`; asserts each ratio `<= b/√2 + 1e-10`.
pub fn check_norm_bound(samples: usize, b: f64, n_poly: usize, seed: u64) -> Result<NormBoundReport> {
    if samples == 0 || !(b > 0.0) {
        return Err(Error::ParameterDomain(format!("need samples >= 1 and b > 0, got {samples}, {b}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = b / 2f64.sqrt();
    let (mut max_ratio, mut skipped) = (None::<f64>, 0);
    for _ in 0..samples {
        let deg = rng.random_range(0..=n_poly);
        let coeffs: Vec<f64> = (0..=deg).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        match operator_norm_ratio(&coeffs, b) {
            Some(r) => max_ratio = Some(max_ratio.map_or(r, |m| m.max(r))),
            None => skipped += 1,
        }
    }
    Ok(NormBoundReport {
        b,
        bound,
        samples,
        skipped,
        max_ratio,
        passed: max_ratio.is_none_or(|m| m <= bound + 1e-10),
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub re_error: f64,
    pub im_error: f64,
}

/// Truncated pairing `∫_0^T conj(i F'(x)) F(x) dx` with `F(x) = ∫_0^∞ f(y) e^{ixy} dy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    /// `(∫_0^∞ f)² / 2`, the limit of the imaginary part.
    pub im_target: f64,
    /// `-π ∫_0^∞ y f(y)² dy`, the limit of the real part.
    pub re_target: f64,
    pub rows: Vec<PairingRow>,
    /// Both error columns are non-increasing in `T`.
    pub monotone: bool,
}

/// Builds the convergence table for increasing truncation points `ts`.
///
/// `y_max` truncates the half-line integrals defining `F`; `f` must be
/// negligible beyond it.
pub fn check_fourier_pairing(f: impl Fn(f64) -> f64, y_max: f64, ts: &[f64]) -> Result<PairingReport> {
    if ts.is_empty() || ts.windows(2).any(|w| w[1] <= w[0]) || ts[0] <= 0.0 {
        return Err(Error::ParameterDomain("truncation points must be positive and increasing".into()));
    }
    let t_max = *ts.last().expect("non-empty");
    let im_total = adaptive_integrate(&QuadratureRequest::new(0.0, y_max, 1e-14), &f)?.value;
    let re_total = adaptive_integrate(&QuadratureRequest::new(0.0, y_max, 1e-14), |y| y * f(y) * f(y))?.value;
    let (im_target, re_target) = (0.5 * im_total * im_total, -PI * re_total);

    let gauss = build_basis(WeightFamily::Legendre, 16)?;
    let panels = (y_max * (1.0 + t_max / (2.0 * PI))).ceil() as usize;
    let hy = y_max / panels as f64;
    let mut ys = Vec::with_capacity(panels * 16);
    let mut wf = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let lo = p as f64 * hy;
        for (&s, &w) in gauss.nodes().iter().zip(gauss.weights()) {
            let y = lo + 0.5 * hy * (1.0 + s);
            ys.push(y);
            wf.push(0.5 * hy * w * f(y));
        }
    }
    let integrand = |x: f64| -> Complex64 {
        let (mut big, mut dbig) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (&y, &w) in ys.iter().zip(&wf) {
            let e = Complex64::cis(x * y) * w;
            big += e;
            dbig += e * y;
        }
        // F' = i ∫ y f e^{ixy}, so i F' = -∫ y f e^{ixy}
        (-dbig).conj() * big
    };

    let mut rows = Vec::with_capacity(ts.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = 0.0;
    for &t in ts {
        let pieces = ((t - lo) / 0.25).ceil().max(1.0) as usize;
        let h = (t - lo) / pieces as f64;
        for p in 0..pieces {
            let a = lo + p as f64 * h;
            for (&s, &w) in gauss.nodes().iter().zip(gauss.weights()) {
                acc += integrand(a + 0.5 * h * (1.0 + s)) * (0.5 * h * w);
            }
        }
        lo = t;
        rows.push(PairingRow {
            t,
            re: acc.re,
            im: acc.im,
            re_error: (acc.re - re_target).abs(),
            im_error: (acc.im - im_target).abs(),
        });
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].re_error <= w[0].re_error && w[1].im_error <= w[0].im_error);
    Ok(PairingReport {
        im_target,
        re_target,
        rows,
        monotone,
    })
}

/// Weighted double-integral chain on `(a, b)`.
///
/// With `W = w∘t⁻¹` and `f` given on `(a, b)`:
/// - `lhs = |∫_a^b W conj(f) ∫_a^y W f dt dy|`
/// - `mid = ((b-a)²/2) ∫_{-1}^1 w|f| ∫_{-1}^x w|f| dt dx` (reference coordinates)
/// - `rhs = ((b-a)²/2) (∫_{-1}^1 w|f|)²`
///
/// `doubled_lhs` is `((b-a)²/2) |∫_{-1}^1 w conj(f) ∫_{-1}^η w f|`,
/// which exceeds `lhs` by exactly a factor of 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub doubled_lhs: f64,
    pub holds: bool,
}

pub fn check_weighted_chain(
    f: impl Fn(f64) -> Complex64,
    family: WeightFamily,
    map: &IntervalMap,
    tol: f64,
) -> Result<ChainReport> {
    use EndpointSingularity::{Both, Lower, None as Smooth, Upper};
    use std::f64::consts::FRAC_PI_2;
    family.validate()?;
    // x = -cos θ turns w(x) dx into 2^{α+β+1} cos^{2α+1}(θ/2) sin^{2β+1}(θ/2) dθ,
    // which needs no cancellation near either endpoint
    let (alpha, beta) = family.jacobi_exponents();
    let scale_w = 2f64.powf(alpha + beta + 1.0);
    let wt = |th: f64| scale_w * (0.5 * th).cos().powf(2.0 * alpha + 1.0) * (0.5 * th).sin().powf(2.0 * beta + 1.0);
    let fr = |th: f64| f(map.to_interval(-th.cos()));
    let fw = |th: f64| fr(th) * wt(th);
    let fw_abs = |th: f64| Complex64::new(fr(th).norm() * wt(th), 0.0);
    let tag = |e: f64| e != 0.0;
    let (lower, upper) = (if tag(beta) { Lower } else { Smooth }, if tag(alpha) { Upper } else { Smooth });
    let whole = match (tag(beta), tag(alpha)) {
        (true, true) => Both,
        (true, false) => Lower,
        (false, true) => Upper,
        (false, false) => Smooth,
    };

    let total = cintegrate_tagged(fw, 0.0, PI, whole)?;
    let total_abs = cintegrate_tagged(fw_abs, 0.0, PI, whole)?.re;
    // ∫ from x = -1, split so each piece carries at most one tagged end
    let partial = |g: &dyn Fn(f64) -> Complex64, all: Complex64, th: f64| -> Result<Complex64> {
        if th <= FRAC_PI_2 {
            cintegrate_tagged(g, 0.0, th, lower)
        } else {
            Ok(all - cintegrate_tagged(g, th, PI, upper)?)
        }
    };
    let double = cintegrate_fallible(|th| Ok(wt(th) * fr(th).conj() * partial(&fw, total, th)?), 0.0, PI, whole)?.norm();
    let double_abs = cintegrate_fallible(
        |th| Ok(fw_abs(th) * partial(&fw_abs, Complex64::new(total_abs, 0.0), th)?),
        0.0,
        PI,
        whole,
    )?
    .re;

    let l = map.length();
    let scale = l * l / 2.0;
    let lhs = (l / 2.0).powi(2) * double;
    let mid = scale * double_abs;
    let rhs = scale * total_abs * total_abs;
    let slack = tol * rhs.max(1.0);
    Ok(ChainReport {
        lhs,
        mid,
        rhs,
        doubled_lhs: scale * double,
        holds: lhs <= mid + slack && mid <= rhs + slack,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureEntry {
    pub n: usize,
    pub eigs: Vec<[f64; 2]>,
    pub min_re: f64,
    /// Largest matching distance between the spectra of `A+` and `A-`.
    pub minus_spectrum_distance: f64,
    /// Eigenvector condition estimate, when the factorization succeeded.
    pub eigenvector_cond: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub family: String,
    pub params: serde_json::Value,
    pub per_n: Vec<ConjectureEntry>,
    pub min_re_overall: f64,
    /// `(n, [re, im])` for every eigenvalue with `Re λ <= 0`.
    pub violations: Vec<(usize, [f64; 2])>,
    /// Values of `n` whose eigenvector matrix was too ill-conditioned to trust.
    pub inconclusive: Vec<usize>,
    /// Positivity is asserted only where it is known to hold (Legendre).
    pub asserted: bool,
}

impl ConjectureReport {
    /// True when an asserted family shows a violation.
    pub fn assertion_failed(&self) -> bool {
        self.asserted && !self.violations.is_empty()
    }
}

fn family_params(family: WeightFamily) -> serde_json::Value {
    let (alpha, beta) = family.jacobi_exponents();
    let mut params = serde_json::json!({ "alpha": alpha, "beta": beta });
    if let WeightFamily::Gegenbauer { lambda } = family {
        params["lambda"] = serde_json::json!(lambda);
    }
    params
}

/// Spectra of `A+` for `n = 1..=n_max`.
pub fn conjecture_scan(family: WeightFamily, n_max: usize) -> Result<ConjectureReport> {
    if n_max == 0 {
        return Err(Error::ParameterDomain("n_max must be at least 1".into()));
    }
    family.validate()?;
    let mut report = ConjectureReport {
        family: family.to_string(),
        params: family_params(family),
        per_n: Vec::with_capacity(n_max),
        min_re_overall: f64::INFINITY,
        violations: Vec::new(),
        inconclusive: Vec::new(),
        asserted: family.is_unit_weight(),
    };
    for n in 1..=n_max {
        let m = build_integration_matrices(&build_basis(family, n)?)?;
        let plus = eigenvalues(m.plus())?;
        let minus = eigenvalues(m.minus())?;
        let cond = match eigen_factorize(&m.scale(Side::Plus, IntervalMap::reference())) {
            Ok(e) => Some(e.cond_estimate()),
            Err(Error::IllConditioned { .. }) | Err(Error::Eigen(_)) | Err(Error::Singular(_)) => {
                report.inconclusive.push(n);
                None
            }
            Err(e) => return Err(e),
        };
        let min_re = plus.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        for z in plus.iter().filter(|z| z.re <= 0.0) {
            report.violations.push((n, [z.re, z.im]));
        }
        report.min_re_overall = report.min_re_overall.min(min_re);
        report.per_n.push(ConjectureEntry {
            n,
            eigs: plus.iter().map(|z| [z.re, z.im]).collect(),
            min_re,
            minus_spectrum_distance: spectral_distance(&plus, &minus),
            eigenvector_cond: cond,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalRangeReport {
    pub samples: usize,
    pub seed: u64,
    /// `u* C u` for the random unit vectors.
    #[serde(skip)]
    pub points: Vec<Complex64>,
    pub min_re: f64,
    /// Smallest eigenvalue of `(C + Cᵀ)/2`, the exact minimum of `Re W(C)`.
    pub hermitian_min: f64,
    pub eigen_min_re: f64,
    /// Largest amount by which an eigenvalue leaves the field of values,
    /// measured through its support function at 720 angles.
    pub containment_violation: f64,
    pub spectrum_contained: bool,
}

/// Samples the field of values of `C`.
pub fn numerical_range_sample(scaled: &ScaledMatrix, samples: usize, seed: u64) -> Result<NumericalRangeReport> {
    if samples == 0 {
        return Err(Error::ParameterDomain("samples must be at least 1".into()));
    }
    let c = scaled.matrix();
    let n = c.nrows();
    let cc = c.map(|v| Complex64::new(v, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples);
    let mut u = nalgebra::DVector::<Complex64>::zeros(n);
    for _ in 0..samples {
        for z in u.iter_mut() {
            *z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let norm = u.norm();
        u /= Complex64::new(norm, 0.0);
        points.push(u.dotc(&(&cc * &u)));
    }
    let min_re = points.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let sym = (c + c.transpose()) * 0.5;
    let hermitian_min = SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let eig = eigenvalues(c)?;
    let eigen_min_re = eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let mut violation: f64 = 0.0;
    for k in 0..720 {
        let rot = Complex64::from_polar(1.0, -(k as f64) * PI / 360.0);
        let h: DMatrix<Complex64> = (&cc * rot + cc.adjoint() * rot.conj()) * Complex64::new(0.5, 0.0);
        let support = SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for l in &eig {
            violation = violation.max((l * rot).re - support);
        }
    }
    Ok(NumericalRangeReport {
        samples,
        seed,
        points,
        min_re,
        hermitian_min,
        eigen_min_re,
        containment_violation: violation.max(0.0),
        spectrum_contained: violation <= 1e-8,
    })
}

/// Complex polynomial with ascending coefficients.
#[derive(Debug, Clone)]
struct Poly(Vec<Complex64>);

impl Poly {
    fn random(rng: &mut ChaCha8Rng, max_deg: usize, complex: bool) -> Self {
        let deg = rng.random_range(0..=max_deg);
        Poly(
            (0..=deg)
                .map(|_| {
                    let im = if complex { rng.sample(StandardNormal) } else { 0.0 };
                    Complex64::new(rng.sample(StandardNormal), im)
                })
                .collect(),
        )
    }

    fn eval(&self, x: f64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }
}

/// Summary of one randomized family of checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest relative deviation (identities) or largest observed ratio (bounds).
    pub worst: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub entries: Vec<SuiteEntry>,
    pub fourier_pairing: Vec<(String, PairingReport)>,
    pub conjecture_legendre: ConjectureReport,
    pub numerical_range: NumericalRangeReport,
    pub passed: bool,
}

fn random_interval(rng: &mut ChaCha8Rng) -> IntervalMap {
    let a = rng.random_range(-1.0..0.5);
    let len = rng.random_range(0.5..2.0);
    IntervalMap::new(a, a + len).expect("positive length")
}

fn identity_entry(name: &str, checks: &[IdentityCheck]) -> SuiteEntry {
    let worst = checks
        .iter()
        .map(|c| c.abs_diff / c.rhs.abs().max(1.0))
        .fold(0.0, f64::max);
    let failures = checks.iter().filter(|c| !c.passed).count();
    SuiteEntry {
        name: name.into(),
        cases: checks.len(),
        failures,
        worst,
        passed: failures == 0,
    }
}

/// The full randomized identity and bound suite.
pub fn run_suite(seed: u64) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();

    let mut checks = Vec::new();
    for _ in 0..100 {
        let g = Poly::random(&mut rng, 8, true);
        let map = random_interval(&mut rng);
        checks.push(check_positivity_identity(|x| g.eval(x), &map, CHECK_TOL)?);
    }
    entries.push(identity_entry("positivity_identity", &checks));

    let mut checks = Vec::new();
    for _ in 0..100 {
        let p = Poly::random(&mut rng, 7, true);
        let map = random_interval(&mut rng);
        let a = map.a();
        // f = (x - a) p(x) vanishes at a
        let mut c = vec![Complex64::new(0.0, 0.0); p.0.len() + 1];
        for (k, pk) in p.0.iter().enumerate() {
            c[k + 1] += pk;
            c[k] -= pk * a;
        }
        let f = Poly(c);
        let df = f.derivative();
        checks.push(check_derivative_range(|x| f.eval(x), |x| df.eval(x), &map, CHECK_TOL)?);
    }
    entries.push(identity_entry("derivative_identity", &checks));

    for b in [1.0, 2.0, 3.0] {
        let r = check_norm_bound(100, b, 8, rng.random())?;
        entries.push(SuiteEntry {
            name: format!("norm_bound_b{b}"),
            cases: r.samples - r.skipped,
            failures: usize::from(!r.passed),
            worst: r.max_ratio.unwrap_or(0.0) / r.bound,
            passed: r.passed,
        });
    }

    let families = [
        WeightFamily::Legendre,
        WeightFamily::ChebyshevFirst,
        WeightFamily::Gegenbauer { lambda: 1.5 },
    ];
    let mut chains = Vec::new();
    for fam in families {
        for _ in 0..10 {
            let f = Poly::random(&mut rng, 6, true);
            let map = random_interval(&mut rng);
            chains.push(check_weighted_chain(|x| f.eval(x), fam, &map, CHECK_TOL)?);
        }
    }
    let failures = chains.iter().filter(|c| !c.holds).count();
    entries.push(SuiteEntry {
        name: "weighted_chain".into(),
        cases: chains.len(),
        failures,
        worst: chains.iter().map(|c| c.mid / c.rhs.max(f64::MIN_POSITIVE)).fold(0.0, f64::max),
        passed: failures == 0,
    });

    let ts = [5.0, 10.0, 20.0, 40.0, 80.0];
    let t24 = vec![
        ("exp(-y)".to_string(), check_fourier_pairing(|y| (-y).exp(), 45.0, &ts)?),
        ("y exp(-y)".to_string(), check_fourier_pairing(|y| y * (-y).exp(), 50.0, &ts)?),
    ];
    let conjecture_legendre = conjecture_scan(WeightFamily::Legendre, 40)?;
    let basis = build_basis(WeightFamily::Legendre, 5)?;
    let scaled = build_integration_matrices(&basis)?.scale(Side::Plus, IntervalMap::reference());
    let numerical_range = numerical_range_sample(&scaled, 100_000, seed)?;

    let passed = entries.iter().all(|e| e.passed)
        && t24.iter().all(|(_, r)| r.monotone)
        && !conjecture_legendre.assertion_failed()
        && numerical_range.spectrum_contained;
    Ok(VerifyReport {
        seed,
        entries,
        fourier_pairing: t24,
        conjecture_legendre,
        numerical_range,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn positivity_examples() {
        let unit = IntervalMap::new(0.0, 1.0).unwrap();
        let r = check_positivity_identity(|_| c(1.0), &unit, CHECK_TOL).unwrap();
        assert!(r.passed && (r.lhs - 0.5).abs() < 1e-12);
        let r = check_positivity_identity(c, &unit, CHECK_TOL).unwrap();
        assert!(r.passed && (r.rhs - 0.125).abs() < 1e-12);
        let full = IntervalMap::new(0.0, 2.0 * PI).unwrap();
        let r = check_positivity_identity(|x| Complex64::cis(x), &full, CHECK_TOL).unwrap();
        assert!(r.lhs.abs() < 1e-10 && r.rhs.abs() < 1e-10);
    }

    #[test]
    fn derivative_examples() {
        let unit = IntervalMap::new(0.0, 1.0).unwrap();
        let r = check_derivative_range(c, |_| c(1.0), &unit, CHECK_TOL).unwrap();
        assert!(r.passed && (r.rhs - 0.5).abs() < 1e-15);
        let pi = IntervalMap::new(0.0, PI).unwrap();
        let r = check_derivative_range(|x| c(x.sin()), |x| c(x.cos()), &pi, CHECK_TOL).unwrap();
        assert!(r.passed && r.lhs.abs() < 1e-12);
        let r = check_derivative_range(
            |x| Complex64::cis(x) * x,
            |x| Complex64::cis(x) * (1.0 + Complex64::i() * x),
            &unit,
            CHECK_TOL,
        )
        .unwrap();
        assert!(r.passed && (r.lhs - 0.5).abs() < 1e-12);
        assert!(check_derivative_range(|_| c(1.0), |_| c(0.0), &unit, CHECK_TOL).is_err());
    }

    #[test]
    fn norm_bound_examples() {
        assert!((operator_norm_ratio(&[1.0], 1.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(operator_norm_ratio(&[0.0, 0.0], 1.0).is_none());
        let r = check_norm_bound(200, 2.0, 8, DEFAULT_SEED).unwrap();
        assert!(r.passed && r.max_ratio.unwrap() <= 2f64.sqrt());
    }

    #[test]
    fn fourier_pairing_exponential() {
        let r = check_fourier_pairing(|y| (-y).exp(), 45.0, &[5.0, 10.0, 20.0, 40.0, 80.0]).unwrap();
        assert!((r.im_target - 0.5).abs() < 1e-13);
        assert!((r.re_target + PI / 4.0).abs() < 1e-13);
        assert!(r.monotone, "{:?}", r.rows);
        // closed form of the truncated pairing: ∫_0^T -(1 - ix)/(1 + x²)² dx
        for row in &r.rows {
            let t = row.t;
            let re = -(0.5 * (t / (1.0 + t * t) + t.atan()));
            let im = 0.5 * (1.0 - 1.0 / (1.0 + t * t));
            assert!((row.re - re).abs() < 1e-10 && (row.im - im).abs() < 1e-10, "{row:?}");
        }
    }

    #[test]
    fn fourier_pairing_other_cases() {
        let z = check_fourier_pairing(|_| 0.0, 10.0, &[1.0, 2.0]).unwrap();
        assert!(z.rows.iter().all(|r| r.re == 0.0 && r.im == 0.0) && z.monotone);
        let r = check_fourier_pairing(|y| y * (-y).exp(), 50.0, &[5.0, 10.0, 20.0, 40.0]).unwrap();
        assert!((r.im_target - 0.5).abs() < 1e-12);
        assert!((r.re_target + PI * 3.0 / 8.0).abs() < 1e-12);
        assert!(r.monotone);
    }

    #[test]
    fn chain_examples() {
        let reference = IntervalMap::reference();
        let r = check_weighted_chain(|_| c(1.0), WeightFamily::Legendre, &reference, CHECK_TOL).unwrap();
        assert!(r.holds);
        assert!((r.rhs - 8.0).abs() < 1e-12);
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.mid - 4.0).abs() < 1e-12);
        assert!((r.doubled_lhs - 2.0 * r.lhs).abs() < 1e-12);
        let r = check_weighted_chain(c, WeightFamily::Legendre, &reference, CHECK_TOL).unwrap();
        assert!(r.holds && r.lhs < r.mid && r.mid < r.rhs);
        let r = check_weighted_chain(|_| c(0.0), WeightFamily::Legendre, &reference, CHECK_TOL).unwrap();
        assert!(r.lhs == 0.0 && r.mid == 0.0 && r.rhs == 0.0);
        let r = check_weighted_chain(|x| c(x * x), WeightFamily::ChebyshevFirst, &IntervalMap::new(0.0, 3.0).unwrap(), CHECK_TOL)
            .unwrap();
        assert!(r.holds);
        // double integral cross-check on (0, 3): |∫_0^3 x² ∫_0^x t² dt dx| = 3^6/18 (unit weight)
        let r = check_weighted_chain(|x| c(x * x), WeightFamily::Legendre, &IntervalMap::new(0.0, 3.0).unwrap(), CHECK_TOL)
            .unwrap();
        assert!((r.lhs - 729.0 / 18.0).abs() < 1e-9);
    }

    #[test]
    fn conjecture_legendre_and_chebyshev() {
        let r = conjecture_scan(WeightFamily::Legendre, 40).unwrap();
        assert!(r.violations.is_empty() && r.min_re_overall > 0.0);
        assert_eq!(r.per_n[0].eigs, vec![[1.0, 0.0]]);
        assert!(!r.assertion_failed());
        // the reflected matrix has the same spectrum; agreement is only
        // meaningful while the eigenvectors are well conditioned
        for e in r.per_n.iter().filter(|e| !r.inconclusive.contains(&e.n)) {
            let cond = e.eigenvector_cond.unwrap();
            assert!(e.minus_spectrum_distance < 1e-15 * cond.max(10.0) * e.n as f64, "n={} {}", e.n, e.minus_spectrum_distance);
        }
        assert!(r.inconclusive.iter().all(|&n| n > 12));
        let c = conjecture_scan(WeightFamily::ChebyshevFirst, 30).unwrap();
        assert!(!c.asserted && c.per_n.len() == 30);
        assert_eq!(c.violations.is_empty(), c.min_re_overall > 0.0);
    }

    #[test]
    fn numerical_range_examples() {
        let m1 = build_integration_matrices(&build_basis(WeightFamily::Legendre, 1).unwrap()).unwrap();
        let r = numerical_range_sample(&m1.scale(Side::Plus, IntervalMap::reference()), 10, 1).unwrap();
        assert!(r.points.iter().all(|z| (z - 1.0).norm() < 1e-14));
        let m5 = build_integration_matrices(&build_basis(WeightFamily::Legendre, 5).unwrap()).unwrap();
        let r = numerical_range_sample(&m5.scale(Side::Plus, IntervalMap::reference()), 100_000, DEFAULT_SEED).unwrap();
        assert!(r.spectrum_contained);
        assert!(r.min_re >= r.hermitian_min - 1e-12);
        let r2 = numerical_range_sample(&m5.scale(Side::Plus, IntervalMap::reference()), 100_000, DEFAULT_SEED).unwrap();
        assert_eq!(r.points, r2.points);
        let g = build_integration_matrices(&build_basis(WeightFamily::Gegenbauer { lambda: 2.0 }, 7).unwrap()).unwrap();
        assert!(numerical_range_sample(&g.scale(Side::Minus, IntervalMap::new(0.0, 3.0).unwrap()), 500, 3)
            .unwrap()
            .spectrum_contained);
    }
}
