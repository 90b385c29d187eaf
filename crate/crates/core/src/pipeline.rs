//! The five end-to-end demos, each producing a coarse/fine [`SolveReport`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, IntervalMap, QuadratureBasis, WeightFamily};
use crate::convolve::{control_response, ControlSpec};
use crate::error::{Error, Result};
use crate::intmat::{build_integration_matrices, eigen_factorize, Analyticity, EigenFactorization, ScalarSymbol, Side};
use crate::invert::{
    exponential_fourier_transform, fourier_invert, laplace_invert, sinc_laplace_transform, InversionKind,
    InversionProblem,
};
use crate::ode::{hermite_refine, picard_solve, OdeProblem, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::oracle::direct_convolution;
use crate::report::{ExactKind, ReportRow, SolveReport};
use crate::wiener_hopf::{self, demo_exact, demo_kernel_symbols, demo_rhs, WienerHopfProblem, DEMO_MINUS_TRUNCATION};

/// Node count of the self-convergence reference run.
pub const REFERENCE_N: usize = 11;

const ORACLE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineId {
    FtInvert,
    LtInvert,
    Control,
    Ode,
    WienerHopf,
}

impl PipelineId {
    pub const ALL: [PipelineId; 5] = [
        PipelineId::FtInvert,
        PipelineId::LtInvert,
        PipelineId::Control,
        PipelineId::Ode,
        PipelineId::WienerHopf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PipelineId::FtInvert => "ft-invert",
            PipelineId::LtInvert => "lt-invert",
            PipelineId::Control => "control",
            PipelineId::Ode => "ode",
            PipelineId::WienerHopf => "wiener-hopf",
        }
    }

    pub fn default_interval(self) -> (f64, f64) {
        match self {
            PipelineId::FtInvert => (0.0, 4.0),
            PipelineId::LtInvert => (0.0, 2.0),
            PipelineId::Control => (0.0, 3.0),
            PipelineId::Ode => (0.0, 0.5),
            PipelineId::WienerHopf => (0.0, 1.0),
        }
    }
}

impl fmt::Display for PipelineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PipelineId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PipelineId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::ParameterDomain(format!("unknown pipeline {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub fine_points: usize,
    pub family: WeightFamily,
    pub alpha: f64,
    pub beta: f64,
    /// Only the Fourier demo has a choice of side.
    pub side: Side,
}

impl DemoConfig {
    pub fn defaults(id: PipelineId) -> Self {
        let (a, b) = id.default_interval();
        Self {
            n: 5,
            a,
            b,
            fine_points: 100,
            family: WeightFamily::Legendre,
            alpha: 1.0,
            beta: 0.7,
            side: Side::Plus,
        }
    }

    pub fn with_n(self, n: usize) -> Self {
        Self { n, ..self }
    }

    pub fn map(&self) -> Result<IntervalMap> {
        if self.n == 0 {
            return Err(Error::ParameterDomain("n must be at least 1".into()));
        }
        if self.fine_points < 2 {
            return Err(Error::ParameterDomain(format!("fine_points must be at least 2, got {}", self.fine_points)));
        }
        self.family.validate()?;
        IntervalMap::new(self.a, self.b)
    }
}

struct Setup {
    basis: QuadratureBasis,
    map: IntervalMap,
    eig: EigenFactorization,
    nodes: Vec<f64>,
    fine: Vec<f64>,
}

fn setup(cfg: &DemoConfig, side: Side) -> Result<Setup> {
    let map = cfg.map()?;
    let basis = build_basis(cfg.family, cfg.n)?;
    let eig = eigen_factorize(&build_integration_matrices(&basis)?.scale(side, map))?;
    Ok(Setup {
        nodes: basis.mapped_nodes(&map),
        fine: map.equispaced(cfg.fine_points),
        basis,
        map,
        eig,
    })
}

impl Setup {
    fn interpolate(&self, values: &[f64]) -> Result<Vec<f64>> {
        Ok(self.basis.interpolate(&self.map, values, &self.fine)?.values)
    }

    /// Rows against a closed form; fine values by Lagrange interpolation.
    fn closed_form(&self, name: &str, computed: &[f64], exact: impl Fn(f64) -> f64) -> Result<SolveReport> {
        let fine_computed = self.interpolate(computed)?;
        let coarse = self.nodes.iter().zip(computed).map(|(&t, &c)| ReportRow::new(t, exact(t), c)).collect();
        let fine = self.fine.iter().zip(&fine_computed).map(|(&t, &c)| ReportRow::new(t, exact(t), c)).collect();
        Ok(self.annotate(SolveReport::new(name, ExactKind::ClosedForm, coarse, fine)))
    }

    fn annotate(&self, report: SolveReport) -> SolveReport {
        report
            .with("n", self.basis.n())
            .with("a", self.map.a())
            .with("b", self.map.b())
            .with("family", self.basis.family())
            .with("fine_points", self.fine.len())
            .with("side", self.eig.side())
            .with("eigenvector_cond", self.eig.cond_estimate())
    }
}

/// Runs one demo at `cfg`.
pub fn run_pipeline(id: PipelineId, cfg: &DemoConfig) -> Result<SolveReport> {
    match id {
        PipelineId::FtInvert => ft_invert(cfg),
        PipelineId::LtInvert => lt_invert(cfg),
        PipelineId::Control => control(cfg, ControlExact::Reference(REFERENCE_N)),
        PipelineId::Ode => ode(cfg),
        PipelineId::WienerHopf => wiener_hopf_demo(cfg),
    }
}

/// The same demo at `n_ref` nodes, to serve as the exact curve where no
/// closed form exists.
///
/// The control reference is checked against direct quadrature of the
/// convolution, so its `exact` column is the quadrature oracle.
pub fn reference_run(id: PipelineId, cfg: &DemoConfig, n_ref: usize) -> Result<SolveReport> {
    let cfg = cfg.with_n(n_ref);
    match id {
        PipelineId::Control => control(&cfg, ControlExact::Oracle),
        _ => run_pipeline(id, &cfg),
    }
}

fn ft_invert(cfg: &DemoConfig) -> Result<SolveReport> {
    let s = setup(cfg, cfg.side)?;
    let (a, b) = (s.map.a(), s.map.b());
    let (kind, transform, exact): (_, _, Box<dyn Fn(f64) -> f64>) = match cfg.side {
        Side::Plus => (InversionKind::FourierPlus, exponential_fourier_transform(1), Box::new(move |t| (a - t).exp())),
        Side::Minus => (
            InversionKind::FourierMinus,
            ScalarSymbol::new("1/(1 + iy)", Analyticity::LowerHalfPlane, |y: Complex64| {
                (1.0 + Complex64::i() * y).inv()
            }),
            Box::new(move |t| (t - b).exp()),
        ),
    };
    let problem = InversionProblem::new(kind, transform, s.map);
    let f = fourier_invert(&problem, &s.eig)?;
    Ok(s.closed_form(PipelineId::FtInvert.name(), &f.values, exact)?
        .with("transform", problem.transform.name())
        .with("imag_residue", f.imag_residue))
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        let x = std::f64::consts::PI * t;
        x.sin() / x
    }
}

fn lt_invert(cfg: &DemoConfig) -> Result<SolveReport> {
    let s = setup(cfg, Side::Plus)?;
    let problem = InversionProblem::new(InversionKind::Laplace, sinc_laplace_transform(), s.map);
    let f = laplace_invert(&problem, &s.eig)?;
    Ok(s.closed_form(PipelineId::LtInvert.name(), &f.values, sinc)?
        .with("transform", problem.transform.name())
        .with("imag_residue", f.imag_residue))
}

enum ControlExact {
    Reference(usize),
    Oracle,
}

fn control(cfg: &DemoConfig, exact: ControlExact) -> Result<SolveReport> {
    let s = setup(cfg, Side::Minus)?;
    let spec = ControlSpec::new(cfg.alpha, cfg.beta, s.map)?;
    let g: Vec<f64> = s.nodes.iter().map(|&t| spec.control(t)).collect();
    let response = control_response(&spec, &s.eig, &g)?;
    let fine_computed = s.interpolate(&response.values)?;
    let oracle = |points: &[f64]| {
        direct_convolution(|u| spec.kernel(u), |t| spec.control(t), Side::Minus, &s.map, points, ORACLE_TOL)
    };
    let (kind, coarse_exact, fine_exact, extra) = match exact {
        ControlExact::Oracle => (ExactKind::ClosedForm, oracle(&s.nodes)?, oracle(&s.fine)?, None),
        ControlExact::Reference(n_ref) => {
            let r = setup(&cfg.with_n(n_ref), Side::Minus)?;
            let g_ref: Vec<f64> = r.nodes.iter().map(|&t| spec.control(t)).collect();
            let reference = control_response(&spec, &r.eig, &g_ref)?.values;
            let at_nodes = r.basis.interpolate(&r.map, &reference, &s.nodes)?.values;
            let direct = oracle(&s.nodes)?;
            let deviation = at_nodes.iter().zip(&direct).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            (ExactKind::Reference, at_nodes, r.interpolate(&reference)?, Some((n_ref, deviation)))
        }
    };
    let coarse = s
        .nodes
        .iter()
        .zip(coarse_exact.iter().zip(&response.values))
        .map(|(&t, (&e, &c))| ReportRow::new(t, e, c))
        .collect();
    let fine = s
        .fine
        .iter()
        .zip(fine_exact.iter().zip(&fine_computed))
        .map(|(&t, (&e, &c))| ReportRow::new(t, e, c))
        .collect();
    let mut report = s
        .annotate(SolveReport::new(PipelineId::Control.name(), kind, coarse, fine))
        .with("alpha", spec.alpha)
        .with("beta", spec.beta)
        .with("route_discrepancy", response.route_discrepancy)
        .with("prefactor_discrepancy", response.prefactor_discrepancy)
        .with("imag_residue", response.imag_residue);
    match extra {
        Some((n_ref, deviation)) => {
            report = report.with("reference_n", n_ref).with("reference_oracle_deviation", deviation);
        }
        None => report = report.with("exact_source", "direct_quadrature"),
    }
    Ok(report)
}

fn ode(cfg: &DemoConfig) -> Result<SolveReport> {
    let s = setup(cfg, Side::Plus)?;
    let problem = OdeProblem::new(|_, y| 1.0 + y * y, s.map.a().tan(), s.map);
    let scaled = build_integration_matrices(&s.basis)?.scale(Side::Plus, s.map);
    let result = picard_solve(&problem, &scaled, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    if !result.converged {
        return Err(Error::NonContraction {
            segment: None,
            iteration: result.iterations,
            delta: result.final_delta,
        });
    }
    let hermite = hermite_refine(&problem, &result, &s.fine)?;
    let hermite_max_fine_error = s.fine.iter().zip(&hermite).map(|(&t, &h)| (h - t.tan()).abs()).fold(0.0, f64::max);
    Ok(s.closed_form(PipelineId::Ode.name(), &result.y, f64::tan)?
        .with("picard_tol", DEFAULT_TOL)
        .with("iterations", result.iterations)
        .with("final_delta", result.final_delta)
        .with("hermite_max_fine_error", hermite_max_fine_error))
}

fn wiener_hopf_demo(cfg: &DemoConfig) -> Result<SolveReport> {
    let map = cfg.map()?;
    if map != IntervalMap::new(0.0, 1.0)? {
        return Err(Error::InvalidProblem("the Wiener-Hopf demo solution is only known on (0, 1)".into()));
    }
    let s = setup(cfg, Side::Plus)?;
    let eig_minus = eigen_factorize(&build_integration_matrices(&s.basis)?.scale(Side::Minus, s.map))?;
    let (khat_plus, khat_minus) = demo_kernel_symbols();
    let problem = WienerHopfProblem {
        khat_plus,
        khat_minus,
        minus_truncation: Some(DEMO_MINUS_TRUNCATION),
        g_values: s.nodes.iter().map(|&t| demo_rhs(t)).collect(),
        map: s.map,
    };
    let sol = wiener_hopf::solve(&problem, &s.eig, &eig_minus)?;
    let d = &sol.diagnostics;
    let alternative_max_error = s
        .nodes
        .iter()
        .zip(&d.alternative_solution)
        .map(|(&t, &v)| (v - demo_exact(t)).abs())
        .fold(0.0, f64::max);
    Ok(s.closed_form(PipelineId::WienerHopf.name(), &sol.f, demo_exact)?
        .with("relative_residual", d.relative_residual)
        .with("sigma_min", d.sigma_min)
        .with("sigma_max", d.sigma_max)
        .with("rank_deficient", d.rank_deficient)
        .with("imag_residue", d.imag_residue)
        .with("alternative_sign_max_error", alternative_max_error))
}
