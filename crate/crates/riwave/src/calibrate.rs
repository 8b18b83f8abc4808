//! Parameter calibration: Pearson-correlation objective and the three-pass
//! bracketed coordinate search with quadratic refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::params::{Coordinate, WaveletParams};
use crate::signal::Signal;
use crate::synthesis::is_causal;
use crate::transform::{CwtEngine, WindowSettings};

/// Step fractions of the three passes.
pub const PASS_FRACTIONS: [f64; 3] = [0.10, 0.03, 0.01];

/// Longest bracketing walk before a coordinate step gives up.
const MAX_WALK: usize = 12;

/// Attempts at drawing a causal neighbour before a probe is abandoned.
const MAX_CAUSAL_DRAWS: usize = 16;

/// Product-moment correlation of two equal-length sample arrays.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "correlation needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Input(format!("correlation needs at least 2 samples, got {}", a.len())));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "a constant array has no correlation".into(),
        ));
    }
    Ok(cov / (va * vb).sqrt())
}

/// Reconstruction quality of parameter vector `p` on the corpus: builds the
/// engine, runs the plain windowed pipeline and returns the correlation of
/// input and output over the reconstructed region.
pub fn objective(p: &WaveletParams, corpus: &Signal, ws: WindowSettings) -> Result<f64> {
    let engine = CwtEngine::new(p.clone(), ws)?;
    let (_, report) = engine.process_stream(corpus)?;
    Ok(report.rho)
}

/// One evaluated probe of a coordinate step.
#[derive(Debug, Clone, Copy)]
pub struct Probe {
    pub x: f64,
    pub f: f64,
}

/// Outcome of a single-coordinate search step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    /// Best coordinate value found (the centre when nothing improved).
    pub x: f64,
    /// Objective at `x`; `None` when every probe failed.
    pub f: Option<f64>,
    /// Whether a quadratic-vertex candidate was accepted.
    pub vertex_accepted: bool,
    /// Number of objective evaluations spent.
    pub evaluations: usize,
}

/// Vertex of the parabola through three points, if concave and finite.
fn quadratic_vertex(p1: Probe, p2: Probe, p3: Probe) -> Option<f64> {
    let d21 = (p2.f - p1.f) / (p2.x - p1.x);
    let d32 = (p3.f - p2.f) / (p3.x - p2.x);
    let curv = (d32 - d21) / (p3.x - p1.x);
    if !(curv < 0.0) {
        return None;
    }
    let x = 0.5 * (p1.x + p2.x) - d21 / (2.0 * curv);
    x.is_finite().then_some(x)
}

/// Bracketed line search along one coordinate with quadratic refinement.
///
/// Probes the centre and centre ± step. If the centre wins, the parabola
/// through the three points proposes a vertex that is accepted only when it
/// beats the centre. Otherwise the search walks in the improving direction
/// in whole steps until the maximum is bracketed, then applies the same
/// fit-and-accept rule around the bracket. `eval` returns the objective or
/// `None` on failure; failed probes are skipped.
pub fn bracketed_step<F>(center: f64, step: f64, mut eval: F) -> StepOutcome
where
    F: FnMut(f64) -> Option<Probe>,
{
    let mut evals = 0usize;
    let mut probe = |x: f64, evals: &mut usize| -> Option<Probe> {
        *evals += 1;
        eval(x)
    };
    let Some(c) = probe(center, &mut evals) else {
        return StepOutcome { x: center, f: None, vertex_accepted: false, evaluations: evals };
    };
    let hi = probe(center + step, &mut evals);
    let lo = probe(center - step, &mut evals);

    let keep = |best: Probe, accepted: bool, evals: usize| StepOutcome {
        x: best.x,
        f: Some(best.f),
        vertex_accepted: accepted,
        evaluations: evals,
    };

    let best_side = match (lo, hi) {
        (Some(l), Some(h)) => {
            if l.f >= h.f {
                Some((l, -step))
            } else {
                Some((h, step))
            }
        }
        (Some(l), None) => Some((l, -step)),
        (None, Some(h)) => Some((h, step)),
        (None, None) => None,
    };
    let Some((side, dir)) = best_side else {
        return keep(c, false, evals);
    };

    if c.f >= side.f {
        // centre is the best of the three: refine with the parabola when
        // both sides were evaluated
        if let (Some(l), Some(h)) = (lo, hi) {
            if let Some(xv) = quadratic_vertex(l, c, h) {
                if let Some(v) = probe(xv, &mut evals) {
                    if v.f > c.f {
                        return keep(v, true, evals);
                    }
                }
            }
        }
        return keep(c, false, evals);
    }

    // walk in the improving direction until the objective turns down
    let mut prev = c;
    let mut best = side;
    let mut bracket: Option<(Probe, Probe, Probe)> = None;
    for k in 2..=MAX_WALK {
        match probe(center + dir * k as f64, &mut evals) {
            Some(next) if next.f > best.f => {
                prev = best;
                best = next;
            }
            Some(next) => {
                bracket = Some((prev, best, next));
                break;
            }
            None => break,
        }
    }
    if let Some((a, m, b)) = bracket {
        if let Some(xv) = quadratic_vertex(a, m, b) {
            if let Some(v) = probe(xv, &mut evals) {
                if v.f > m.f {
                    return keep(v, true, evals);
                }
            }
        }
        return keep(m, false, evals);
    }
    keep(best, false, evals)
}

/// One row of the optimization trace.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub pass: usize,
    pub step_fraction: f64,
    pub coordinate: Coordinate,
    /// Parameter vector after this coordinate step.
    pub params: WaveletParams,
    pub rho: f64,
    pub vertex_accepted: bool,
    /// Probes replaced by a random causal neighbour.
    pub causality_substitutions: usize,
    pub evaluations: usize,
}

/// Full record of an optimization run.
#[derive(Debug, Clone)]
pub struct OptimizationTrace {
    pub initial_rho: f64,
    pub entries: Vec<TraceEntry>,
}

impl OptimizationTrace {
    /// The rho values in order: initial, then one per coordinate step.
    pub fn rho_sequence(&self) -> Vec<f64> {
        let mut v = vec![self.initial_rho];
        v.extend(self.entries.iter().map(|e| e.rho));
        v
    }
}

/// Three-pass coordinate search over (beta, phi_m, alpha, kappa) at step
/// fractions 10%, 3%, 1%, starting each pass from the previous result.
///
/// Probes whose mother wavelet fails the causality check are replaced by a
/// causal neighbour drawn uniformly (seeded) from the current variation
/// interval. nu and c stay fixed.
pub fn optimize(
    p0: &WaveletParams,
    corpus: &Signal,
    ws: WindowSettings,
    seed: u64,
) -> Result<(WaveletParams, OptimizationTrace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rate = 1.0 / ws.dt;
    let mut p = p0.clone();
    let initial_rho = objective(&p, corpus, ws)?;
    let mut rho = initial_rho;
    let mut entries = Vec::new();

    for (pass, &fraction) in PASS_FRACTIONS.iter().enumerate() {
        for coord in Coordinate::SEARCH_ORDER {
            let center = p.value(coord);
            let step = fraction * center;
            let mut substitutions = 0usize;
            let outcome = {
                let p_ref = &p;
                let rng = &mut rng;
                let subs = &mut substitutions;
                bracketed_step(center, step, move |x| {
                    let mut x_try = x;
                    for _ in 0..MAX_CAUSAL_DRAWS {
                        let cand = p_ref.with_value(coord, x_try).ok()?;
                        if is_causal(&cand, rate).ok()? {
                            let f = objective(&cand, corpus, ws).ok()?;
                            return Some(Probe { x: x_try, f });
                        }
                        // draw a causal neighbour within the variation
                        // interval spanned by the centre and this probe
                        *subs += 1;
                        let lo = center.min(x);
                        let hi = center.max(x);
                        x_try = rng.gen_range(lo..=hi);
                    }
                    None
                })
            };
            if let Some(f) = outcome.f {
                if f > rho {
                    p = p.with_value(coord, outcome.x)?;
                    rho = f;
                }
            }
            entries.push(TraceEntry {
                pass,
                step_fraction: fraction,
                coordinate: coord,
                params: p.clone(),
                rho,
                vertex_accepted: outcome.vertex_accepted,
                causality_substitutions: substitutions,
                evaluations: outcome.evaluations,
            });
        }
    }
    Ok((p, OptimizationTrace { initial_rho, entries }))
}
