//! Grid search for parameter sets that keep the transition probability out of
//! `|I_0>` small, guided by the sign changes of `Omega_1(N)` in `N`.

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{uniform_grid, CoherentTransition};
use crate::error::{invalid, Error, Result};
use crate::model::{laguerre, BellState, ModelParams};
use crate::oracle::{exact_bell_survival, recommended_ncut, TruncatedSpace};
use crate::spectrum::t0_tilde;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// Largest `T(alpha, tau)` over the time grid.
    WorstCaseT,
    /// Time-averaged level `sum_N p(N) B(N)`.
    PlateauT1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Alpha2Candidates {
    List(Vec<f64>),
    /// Mean photon numbers placed at the `Omega_1` sign changes of each beta
    /// in the given photon-number range.
    FromZeros { n_range: (u64, u64) },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub beta_grid: Vec<f64>,
    pub a_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub alpha2: Alpha2Candidates,
    pub tau_horizon: f64,
    pub tau_samples: usize,
    pub objective: Objective,
}

/// `start, start + step, ...` up to `stop` inclusive, built by index and
/// snapped to 12 decimals so decimal grids print cleanly.
pub fn linspace_step(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            beta_grid: linspace_step(0.4, 0.65, 0.005),
            a_grid: linspace_step(-1.0, 0.0, 0.05),
            r_grid: linspace_step(0.18, 0.28, 0.01),
            alpha2: Alpha2Candidates::List(vec![55.0]),
            tau_horizon: 500.0,
            tau_samples: 2000,
            objective: Objective::WorstCaseT,
        }
    }
}

impl SearchSpec {
    pub fn validate(&self) -> Result<()> {
        for (field, grid) in [("beta_grid", &self.beta_grid), ("a_grid", &self.a_grid), ("r_grid", &self.r_grid)] {
            if grid.is_empty() {
                return Err(Error::EmptySearchSpace { reason: format!("{field} is empty") });
            }
            if grid.iter().any(|x| !x.is_finite()) {
                return Err(invalid(field, "values must be finite"));
            }
        }
        match &self.alpha2 {
            Alpha2Candidates::List(v) if v.is_empty() => {
                return Err(Error::EmptySearchSpace { reason: "alpha2 list is empty".into() });
            }
            Alpha2Candidates::List(v) if v.iter().any(|x| !x.is_finite() || *x <= 0.0) => {
                return Err(invalid("alpha2", "values must be finite and > 0"));
            }
            Alpha2Candidates::FromZeros { n_range: (lo, hi) } if lo > hi => {
                return Err(invalid("alpha2", format!("empty photon-number range {lo}..={hi}")));
            }
            _ => {}
        }
        if !(self.tau_horizon.is_finite() && self.tau_horizon > 0.0) {
            return Err(invalid("tau_horizon", format!("must be finite and > 0, got {}", self.tau_horizon)));
        }
        if self.tau_samples < 2 {
            return Err(invalid("tau_samples", format!("need at least 2 samples, got {}", self.tau_samples)));
        }
        Ok(())
    }
}

/// Sign change of `Omega_1` between consecutive photon numbers, or an exact
/// zero when `lower == upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Omega1Zero {
    pub lower: u64,
    pub upper: u64,
}

impl Omega1Zero {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// Bracket midpoint rounded half up.
    pub fn candidate(&self) -> u64 {
        (self.lower + self.upper).div_ceil(2)
    }
}

/// Sign changes of `L_N(2 beta^2)` (and so of `Omega_1(N)`) over `n_range`.
pub fn find_omega1_zeros(p: &ModelParams, n_range: RangeInclusive<u64>) -> Vec<Omega1Zero> {
    let x = 2.0 * p.beta2();
    let (lo, hi) = (*n_range.start(), *n_range.end());
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    let mut prev = laguerre(lo, x);
    if prev == 0.0 {
        out.push(Omega1Zero { lower: lo, upper: lo });
    }
    for n in lo + 1..=hi {
        let cur = laguerre(n, x);
        if cur == 0.0 {
            out.push(Omega1Zero { lower: n, upper: n });
        } else if prev * cur < 0.0 {
            out.push(Omega1Zero { lower: n - 1, upper: n });
        }
        prev = cur;
    }
    out
}

/// Zeros within two standard deviations of the photon-number distribution.
pub fn zeros_near(p: &ModelParams, alpha2: f64) -> Vec<Omega1Zero> {
    let w = 2.0 * alpha2.sqrt();
    let lo = (alpha2 - w).floor().max(0.0) as u64;
    let hi = (alpha2 + w).ceil() as u64;
    find_omega1_zeros(p, lo..=hi)
}

pub fn objective_worst_case(p: &ModelParams, alpha2: f64, tau_horizon: f64, tau_samples: usize) -> Result<f64> {
    let grid = uniform_grid(tau_horizon, tau_samples)?;
    let t = CoherentTransition::new(p, alpha2.sqrt())?;
    Ok(grid.iter().map(|&tau| t.at(tau)).fold(0.0, f64::max))
}

pub fn objective_plateau(p: &ModelParams, alpha2: f64) -> Result<f64> {
    Ok(CoherentTransition::new(p, alpha2.sqrt())?.plateau())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub params: ModelParams,
    pub alpha2: f64,
    pub score: f64,
    pub zeros_nearby: Vec<Omega1Zero>,
    pub t0_sq_at_nbar: f64,
}

fn evaluate(spec: &SearchSpec, p: &ModelParams, alpha2: f64) -> Result<SearchResult> {
    let score = match spec.objective {
        Objective::WorstCaseT => objective_worst_case(p, alpha2, spec.tau_horizon, spec.tau_samples)?,
        Objective::PlateauT1 => objective_plateau(p, alpha2)?,
    };
    let nbar = alpha2.floor() as u64;
    Ok(SearchResult {
        params: *p,
        alpha2,
        score: score.max(0.0),
        zeros_nearby: zeros_near(p, alpha2),
        t0_sq_at_nbar: t0_tilde(p, nbar).powi(2),
    })
}

fn rank(a: &SearchResult, b: &SearchResult) -> Ordering {
    a.score
        .total_cmp(&b.score)
        .then(a.params.beta.total_cmp(&b.params.beta))
        .then(a.params.a.total_cmp(&b.params.a))
        .then(a.params.ratio.total_cmp(&b.params.ratio))
        .then(a.alpha2.total_cmp(&b.alpha2))
}

/// Evaluates the objective over the whole grid and returns the results in
/// ascending score order.
pub fn search(spec: &SearchSpec) -> Result<Vec<SearchResult>> {
    spec.validate()?;
    let mut points = Vec::new();
    for &beta in &spec.beta_grid {
        for &a in &spec.a_grid {
            for &r in &spec.r_grid {
                let p = ModelParams::new(beta, a, r)?;
                match &spec.alpha2 {
                    Alpha2Candidates::List(v) => points.extend(v.iter().map(|&a2| (p, a2))),
                    Alpha2Candidates::FromZeros { n_range } => points.extend(
                        find_omega1_zeros(&p, n_range.0..=n_range.1)
                            .iter()
                            .map(|z| z.candidate())
                            .filter(|&n| n > 0)
                            .map(|n| (p, n as f64)),
                    ),
                }
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptySearchSpace { reason: "no Omega_1 sign change in the photon-number range".into() });
    }
    let mut results = points.par_iter().map(|(p, a2)| evaluate(spec, p, *a2)).collect::<Result<Vec<_>>>()?;
    results.sort_by(rank);
    Ok(results)
}

/// Exact-engine check of one search result at a smaller mean photon number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRescore {
    pub params: ModelParams,
    pub alpha2: f64,
    pub ncut: usize,
    pub approx_score: f64,
    pub exact_score: f64,
}

/// Worst-case `1 - survival` of `|I_0>` from the exact engine, next to the
/// approximate worst-case `T`, for the first `top` results at `alpha2`.
pub fn exact_rescore(
    results: &[SearchResult],
    top: usize,
    alpha2: f64,
    tau_horizon: f64,
    tau_samples: usize,
) -> Result<Vec<ExactRescore>> {
    let grid = uniform_grid(tau_horizon, tau_samples)?;
    results
        .par_iter()
        .take(top)
        .map(|res| {
            let p = res.params;
            let ncut = recommended_ncut(alpha2, p.beta);
            let space = TruncatedSpace::new(ncut)?;
            let s = exact_bell_survival(&p, space, BellState::PhiMinus, alpha2.sqrt(), &grid)?;
            Ok(ExactRescore {
                params: p,
                alpha2,
                ncut,
                approx_score: objective_worst_case(&p, alpha2, tau_horizon, tau_samples)?,
                exact_score: 1.0 - s.min(),
            })
        })
        .collect()
}
