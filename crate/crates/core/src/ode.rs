//! Scalar initial-value problems `y' = f(x, y)`, `y(a) = y_a`, solved by
//! Picard iteration on the collocated integral equation `Y = y_a 1 + C f(ξ, Y)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::basis::{barycentric_weights, IntervalMap};
use crate::error::{Error, Result};
use crate::intmat::{ScaledMatrix, Side};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Consecutive growing steps, and the growth factor over them, that count as divergence.
const DIVERGENCE_WINDOW: usize = 5;
const DIVERGENCE_GROWTH: f64 = 10.0;

type Rhs = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct OdeProblem {
    rhs: Rhs,
    pub y_a: f64,
    pub map: IntervalMap,
}

impl OdeProblem {
    pub fn new(rhs: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, y_a: f64, map: IntervalMap) -> Self {
        Self {
            rhs: Arc::new(rhs),
            y_a,
            map,
        }
    }

    pub fn rhs(&self, x: f64, y: f64) -> f64 {
        (self.rhs)(x, y)
    }
}

impl fmt::Debug for OdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeProblem")
            .field("y_a", &self.y_a)
            .field("map", &self.map)
            .finish_non_exhaustive()
    }
}

/// One sub-interval of a (possibly restarted) solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub map: IntervalMap,
    /// Index of the segment's first node in `PicardResult::nodes`.
    pub offset: usize,
    pub y_start: f64,
    pub iterations: usize,
    pub final_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    pub nodes: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: usize,
    pub final_delta: f64,
    pub converged: bool,
    pub segments: Vec<Segment>,
}

impl PicardResult {
    /// `f(ξ_j, Y_j)` at every node.
    pub fn slopes(&self, problem: &OdeProblem) -> Vec<f64> {
        self.nodes.iter().zip(&self.y).map(|(&x, &y)| problem.rhs(x, y)).collect()
    }

    fn segment_len(&self, s: usize) -> usize {
        let end = self.segments.get(s + 1).map_or(self.nodes.len(), |next| next.offset);
        end - self.segments[s].offset
    }
}

fn iterate(
    problem: &OdeProblem,
    c: &nalgebra::DMatrix<f64>,
    nodes: &[f64],
    y_start: f64,
    tol: f64,
    max_iter: usize,
    segment: Option<usize>,
) -> Result<(Vec<f64>, usize, f64, bool)> {
    let n = nodes.len();
    let mut y = vec![y_start; n];
    let mut deltas: Vec<f64> = Vec::new();
    for m in 1..=max_iter {
        let fv = DVector::from_iterator(n, nodes.iter().zip(&y).map(|(&x, &v)| problem.rhs(x, v)));
        let next: Vec<f64> = (c * fv).iter().map(|v| y_start + v).collect();
        let delta = next.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if !delta.is_finite() || next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonContraction {
                segment,
                iteration: m,
                delta,
            });
        }
        y = next;
        deltas.push(delta);
        if delta < tol {
            return Ok((y, m, delta, true));
        }
        if deltas.len() > DIVERGENCE_WINDOW {
            let w = &deltas[deltas.len() - DIVERGENCE_WINDOW - 1..];
            let growing = w.windows(2).all(|p| p[1] > p[0]);
            if growing && w[DIVERGENCE_WINDOW] >= DIVERGENCE_GROWTH * w[0] {
                return Err(Error::NonContraction {
                    segment,
                    iteration: m,
                    delta,
                });
            }
        }
    }
    let last = deltas.last().copied().unwrap_or(0.0);
    Ok((y, max_iter, last, false))
}

fn check_inputs(problem: &OdeProblem, scaled: &ScaledMatrix, tol: f64, max_iter: usize) -> Result<()> {
    if scaled.side() != Side::Plus {
        return Err(Error::InvalidProblem("Picard iteration needs the side + matrix".into()));
    }
    if scaled.map() != &problem.map {
        return Err(Error::InvalidProblem("matrix interval differs from the problem interval".into()));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::ParameterDomain(format!(
            "need tol > 0 and max_iter >= 1, got {tol} and {max_iter}"
        )));
    }
    Ok(())
}

/// Iterates `Y ← y_a 1 + C f(ξ, Y)` from `Y = y_a 1` until the sup-norm
/// step is below `tol`.
///
/// Reaching `max_iter` is not an error (`converged == false`); a step
/// that grows tenfold over five consecutive increases is.
pub fn picard_solve(problem: &OdeProblem, scaled: &ScaledMatrix, tol: f64, max_iter: usize) -> Result<PicardResult> {
    check_inputs(problem, scaled, tol, max_iter)?;
    let (y, iterations, final_delta, converged) =
        iterate(problem, scaled.matrix(), scaled.nodes(), problem.y_a, tol, max_iter, None)?;
    Ok(PicardResult {
        nodes: scaled.nodes().to_vec(),
        y,
        iterations,
        final_delta,
        converged,
        segments: vec![Segment {
            map: problem.map,
            offset: 0,
            y_start: problem.y_a,
            iterations,
            final_delta,
        }],
    })
}

/// Degree `2n - 1` interpolant matching values and slopes at the nodes.
#[derive(Debug, Clone)]
pub struct HermiteInterpolant {
    nodes: Vec<f64>,
    bary: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    /// `ℓ_j'(ξ_j) = Σ_{k≠j} 1/(ξ_j - ξ_k)`.
    self_derivative: Vec<f64>,
}

impl HermiteInterpolant {
    pub fn new(nodes: &[f64], values: &[f64], slopes: &[f64]) -> Result<Self> {
        if nodes.is_empty() || values.len() != nodes.len() || slopes.len() != nodes.len() {
            return Err(Error::ParameterDomain("Hermite data lengths must match and be non-empty".into()));
        }
        let self_derivative = nodes
            .iter()
            .enumerate()
            .map(|(j, &xj)| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &xk)| 1.0 / (xj - xk))
                    .sum()
            })
            .collect();
        Ok(Self {
            nodes: nodes.to_vec(),
            bary: barycentric_weights(nodes),
            values: values.to_vec(),
            slopes: slopes.to_vec(),
            self_derivative,
        })
    }

    /// Lagrange cardinals `ℓ_j(x)` on the stored nodes.
    fn cardinals(&self, x: f64) -> Vec<f64> {
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            let mut e = vec![0.0; self.nodes.len()];
            e[j] = 1.0;
            return e;
        }
        let terms: Vec<f64> = self.nodes.iter().zip(&self.bary).map(|(&xj, &wj)| wj / (x - xj)).collect();
        let sum: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / sum).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.cardinals(x)
            .iter()
            .enumerate()
            .map(|(j, &l)| {
                let d = x - self.nodes[j];
                (self.values[j] * (1.0 - 2.0 * self.self_derivative[j] * d) + self.slopes[j] * d) * l * l
            })
            .sum()
    }

    /// Derivative of the interpolant.
    pub fn derivative(&self, x: f64) -> f64 {
        let l = self.cardinals(x);
        let n = self.nodes.len();
        let dl: Vec<f64> = match self.nodes.iter().position(|&xk| xk == x) {
            Some(k) => (0..n)
                .map(|j| {
                    if j == k {
                        self.self_derivative[k]
                    } else {
                        self.bary[j] / self.bary[k] / (x - self.nodes[j])
                    }
                })
                .collect(),
            None => (0..n)
                .map(|j| {
                    let s: f64 = (0..n).filter(|&m| m != j).map(|m| 1.0 / (x - self.nodes[m])).sum();
                    l[j] * s
                })
                .collect(),
        };
        (0..n)
            .map(|j| {
                let d = x - self.nodes[j];
                let a = self.values[j] * (1.0 - 2.0 * self.self_derivative[j] * d) + self.slopes[j] * d;
                let da = -2.0 * self.values[j] * self.self_derivative[j] + self.slopes[j];
                da * l[j] * l[j] + a * 2.0 * l[j] * dl[j]
            })
            .sum()
    }
}

fn segment_interpolants(problem: &OdeProblem, result: &PicardResult) -> Result<Vec<HermiteInterpolant>> {
    let slopes = result.slopes(problem);
    (0..result.segments.len())
        .map(|s| {
            let lo = result.segments[s].offset;
            let hi = lo + result.segment_len(s);
            HermiteInterpolant::new(&result.nodes[lo..hi], &result.y[lo..hi], &slopes[lo..hi])
        })
        .collect()
}

/// Evaluates the Hermite interpolant of `(ξ_j, Y_j, f(ξ_j, Y_j))` at
/// `eval_points`, segment by segment for restarted solves.
pub fn hermite_refine(problem: &OdeProblem, result: &PicardResult, eval_points: &[f64]) -> Result<Vec<f64>> {
    if !result.converged {
        return Err(Error::InvalidProblem("Hermite refinement needs a converged Picard result".into()));
    }
    let parts = segment_interpolants(problem, result)?;
    Ok(eval_points
        .iter()
        .map(|&x| {
            let s = result
                .segments
                .iter()
                .rposition(|seg| x >= seg.map.a())
                .unwrap_or(0);
            parts[s].eval(x)
        })
        .collect())
}

/// Solves on `segments` equal pieces of `problem.map`, starting each piece
/// from the Hermite value at the end of the previous one.
///
/// `scaled` is the side `+` matrix for the whole interval; each piece uses
/// `C / segments`.
pub fn restart_extend(
    problem: &OdeProblem,
    scaled: &ScaledMatrix,
    segments: usize,
    tol: f64,
    max_iter: usize,
) -> Result<PicardResult> {
    check_inputs(problem, scaled, tol, max_iter)?;
    if segments == 0 {
        return Err(Error::ParameterDomain("need at least one segment".into()));
    }
    if segments == 1 {
        return picard_solve(problem, scaled, tol, max_iter);
    }
    let k = segments as f64;
    let c = scaled.matrix() / k;
    let (a, len) = (problem.map.a(), problem.map.length());
    let mut out = PicardResult {
        nodes: Vec::new(),
        y: Vec::new(),
        iterations: 0,
        final_delta: 0.0,
        converged: true,
        segments: Vec::new(),
    };
    let mut y_start = problem.y_a;
    for s in 0..segments {
        let lo = a + len * s as f64 / k;
        let hi = if s + 1 == segments { problem.map.b() } else { a + len * (s + 1) as f64 / k };
        let map = IntervalMap::new(lo, hi)?;
        let nodes: Vec<f64> = scaled.nodes().iter().map(|&x| lo + (x - a) / k).collect();
        let (y, iterations, final_delta, converged) = iterate(problem, &c, &nodes, y_start, tol, max_iter, Some(s))?;
        if !converged {
            return Err(Error::NonContraction {
                segment: Some(s),
                iteration: iterations,
                delta: final_delta,
            });
        }
        let slopes: Vec<f64> = nodes.iter().zip(&y).map(|(&x, &v)| problem.rhs(x, v)).collect();
        let end = HermiteInterpolant::new(&nodes, &y, &slopes)?.eval(hi);
        out.segments.push(Segment {
            map,
            offset: out.nodes.len(),
            y_start,
            iterations,
            final_delta,
        });
        out.iterations += iterations;
        out.final_delta = out.final_delta.max(final_delta);
        out.nodes.extend(nodes);
        out.y.extend(y);
        y_start = end;
    }
    Ok(out)
}
