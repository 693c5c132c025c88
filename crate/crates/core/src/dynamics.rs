//! Time-dependent probabilities in the adiabatic approximation.
//!
//! Per block `N`: survival and transition probabilities for the initial
//! states `|1,1>|N_1>` and `|1,0>|N_0>`. With the oscillator in a coherent
//! state: the Bell-to-Bell probability for `|I_{+-1}>` and the transition
//! probability `T(alpha, tau)` out of `|I_0>`.
//!
//! Times are dimensionless (`tau = omega t`); callers always pass explicit
//! grids. Sums over photon number run in ascending `N` so results are
//! bit-reproducible.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{displaced_overlap, ln_factorial, poisson_cutoff, poisson_weight, ModelParams, PoissonTable};
use crate::spectrum::{block_spectrum, BlockSpectrum};

/// Slack allowed above 1 (and below 0) for probabilities built from sums of
/// cosines.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// The three oscillation frequencies of a block, in units of `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockFrequencies {
    pub w1: f64,
    pub w2: f64,
    pub w0: f64,
}

impl BlockFrequencies {
    pub fn from_spectrum(s: &BlockSpectrum) -> Self {
        let w0 = s.t0_tilde.hypot(2.0 * SQRT_2 * s.omega1);
        BlockFrequencies {
            w1: 0.5 * (4.0 * s.omega2 - s.t0_tilde + w0),
            w2: 0.5 * (4.0 * s.omega2 - s.t0_tilde - w0),
            w0,
        }
    }
}

pub fn block_frequencies(p: &ModelParams, n: u64) -> BlockFrequencies {
    BlockFrequencies::from_spectrum(&block_spectrum(p, n))
}

/// Precomputed amplitudes for the block-`N` probabilities.
#[derive(Debug, Clone, Copy)]
pub struct BlockDynamics {
    pub spectrum: BlockSpectrum,
    pub freqs: BlockFrequencies,
    inv_l2p: f64,
    inv_l2m: f64,
    y_l2p: f64,
    y_l2m: f64,
    y2_l2p: f64,
    y2_l2m: f64,
}

impl BlockDynamics {
    pub fn new(p: &ModelParams, n: u64) -> Result<Self> {
        let spectrum = block_spectrum(p, n);
        spectrum.regular()?;
        let (ep, mp) = spectrum.plus_components();
        let (em, mm) = spectrum.minus_components();
        Ok(BlockDynamics {
            freqs: BlockFrequencies::from_spectrum(&spectrum),
            spectrum,
            inv_l2p: ep * ep,
            inv_l2m: em * em,
            y_l2p: ep * mp,
            y_l2m: em * mm,
            y2_l2p: mp * mp,
            y2_l2m: mm * mm,
        })
    }

    /// Probability of remaining in `|1,1>|N_1>`.
    pub fn p1(&self, tau: f64) -> f64 {
        let f = &self.freqs;
        0.25 + self.inv_l2p * self.inv_l2p
            + self.inv_l2m * self.inv_l2m
            + self.inv_l2p * (f.w1 * tau).cos()
            + self.inv_l2m * (f.w2 * tau).cos()
            + 2.0 * self.inv_l2p * self.inv_l2m * (f.w0 * tau).cos()
    }

    /// Probability of remaining in `|1,0>|N_0>`.
    pub fn p0(&self, tau: f64) -> f64 {
        self.y2_l2p * self.y2_l2p
            + self.y2_l2m * self.y2_l2m
            + 2.0 * self.y2_l2p * self.y2_l2m * (self.freqs.w0 * tau).cos()
    }

    /// Transition `|1,1>|N_1> -> |1,-1>|N_-1>`.
    pub fn t1_to_m1(&self, tau: f64) -> f64 {
        let f = &self.freqs;
        0.25 + self.inv_l2p * self.inv_l2p + self.inv_l2m * self.inv_l2m
            - self.inv_l2p * (f.w1 * tau).cos()
            - self.inv_l2m * (f.w2 * tau).cos()
            + 2.0 * self.inv_l2p * self.inv_l2m * (f.w0 * tau).cos()
    }

    /// Transition `|1,1>|N_1> -> |1,0>|N_0>`.
    pub fn t1_to_0(&self, tau: f64) -> f64 {
        self.y_l2p * self.y_l2p
            + self.y_l2m * self.y_l2m
            + 2.0 * self.y_l2p * self.y_l2m * (self.freqs.w0 * tau).cos()
    }

    /// Long-time average of [`p1`](Self::p1).
    pub fn p1_mean(&self) -> f64 {
        0.25 + self.inv_l2p * self.inv_l2p + self.inv_l2m * self.inv_l2m
    }

    /// Smallest value [`p0`](Self::p0) reaches (at `cos(w0 tau) = -1`).
    pub fn p0_min(&self) -> f64 {
        (self.y2_l2p - self.y2_l2m).powi(2)
    }
}

pub fn p1(p: &ModelParams, n: u64, tau: f64) -> Result<f64> {
    Ok(BlockDynamics::new(p, n)?.p1(tau))
}

pub fn p0(p: &ModelParams, n: u64, tau: f64) -> Result<f64> {
    Ok(BlockDynamics::new(p, n)?.p0(tau))
}

pub fn t1_to_m1(p: &ModelParams, n: u64, tau: f64) -> Result<f64> {
    Ok(BlockDynamics::new(p, n)?.t1_to_m1(tau))
}

pub fn t1_to_0(p: &ModelParams, n: u64, tau: f64) -> Result<f64> {
    Ok(BlockDynamics::new(p, n)?.t1_to_0(tau))
}

/// Checks that a time grid is non-empty, finite and strictly increasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("tau grid", "must contain at least one time"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(invalid("tau grid", "contains a non-finite time"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("tau grid", "must be strictly increasing"));
    }
    Ok(())
}

/// `samples` equally spaced times on `[0, tau_max]`.
pub fn uniform_grid(tau_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !tau_max.is_finite() || tau_max <= 0.0 {
        return Err(invalid("tau_max", format!("must be finite and > 0, got {tau_max}")));
    }
    if samples < 2 {
        return Err(invalid("tau_samples", format!("need at least 2 samples, got {samples}")));
    }
    let step = tau_max / (samples - 1) as f64;
    Ok((0..samples).map(|i| i as f64 * step).collect())
}

/// A sampled probability trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub params: ModelParams,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl TimeSeries {
    pub fn new(params: ModelParams, grid: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        validate_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(invalid("values", format!("{} values for {} times", values.len(), grid.len())));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= -PROBABILITY_SLACK && **v <= 1.0 + PROBABILITY_SLACK)) {
            return Err(invalid("values", format!("probability {v} outside [0, 1]")));
        }
        Ok(TimeSeries { params, grid, values, label: label.into() })
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `B(N) = 2 Y+^2 / L+^4`, the amplitude with which photon number `N`
/// contributes to the transition out of `|I_0>`. Zero at degenerate blocks.
pub fn b_of_n(p: &ModelParams, n: u64) -> f64 {
    b_from_spectrum(&block_spectrum(p, n))
}

pub(crate) fn b_from_spectrum(s: &BlockSpectrum) -> f64 {
    if s.degenerate {
        return 0.0;
    }
    let (edge, mid) = s.plus_components();
    2.0 * edge * edge * mid * mid
}

/// Transition probability `T(alpha, tau)` out of `|I_0>` with the field in
/// the coherent state `|alpha>`: the direct, truncated photon-number sum.
#[derive(Debug, Clone)]
pub struct CoherentTransition {
    pub params: ModelParams,
    pub alpha: f64,
    /// `(p(N, alpha) B(N), w0(N))` for `N = 0..=cutoff`.
    terms: Vec<(f64, f64)>,
    tail: f64,
}

impl CoherentTransition {
    pub fn new(params: &ModelParams, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let table = PoissonTable::new(alpha * alpha);
        let terms = table
            .weights
            .iter()
            .enumerate()
            .map(|(n, &w)| {
                let s = block_spectrum(params, n as u64);
                (w * b_from_spectrum(&s), BlockFrequencies::from_spectrum(&s).w0)
            })
            .collect();
        Ok(CoherentTransition { params: *params, alpha, terms, tail: table.tail() })
    }

    pub fn at(&self, tau: f64) -> f64 {
        self.terms.iter().map(|&(wb, w0)| wb * (1.0 - (w0 * tau).cos())).sum()
    }

    /// Evaluates the grid in parallel; each point is still an ascending-`N`
    /// sum, so output does not depend on thread scheduling.
    pub fn series(&self, grid: &[f64]) -> Result<TimeSeries> {
        validate_grid(grid)?;
        let values = grid.par_iter().map(|&t| self.at(t)).collect();
        TimeSeries::new(self.params, grid.to_vec(), values, "T(alpha,tau)")
    }

    /// Time average `sum_N p(N, alpha) B(N)`.
    pub fn plateau(&self) -> f64 {
        self.terms.iter().map(|&(wb, _)| wb).sum()
    }

    /// Poisson mass dropped by the photon-number cutoff.
    pub fn truncation_tail(&self) -> f64 {
        self.tail
    }

    pub fn cutoff(&self) -> usize {
        self.terms.len() - 1
    }
}

pub fn t_alpha(p: &ModelParams, alpha: f64, tau: f64) -> Result<f64> {
    Ok(CoherentTransition::new(p, alpha)?.at(tau))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
    }
    Ok(())
}

fn check_delta(field: &'static str, d: i32) -> Result<()> {
    if d == 1 || d == -1 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be +1 or -1, got {d}")))
    }
}

/// Probability that `|I_delta>|alpha>` is found in `|I_delta_bar>`, from the
/// adiabatic-approximation series, evaluated term by term without
/// renormalization. At `tau = 0` it is not exactly 1 (or 0) because the
/// displaced basis is not orthogonal.
#[derive(Debug, Clone)]
pub struct BellTransition {
    pub params: ModelParams,
    pub alpha: f64,
    pub delta: i32,
    pub delta_bar: i32,
    constant: f64,
    /// `(amplitude, w0)` per `N` of the oscillating part.
    terms: Vec<(f64, f64)>,
}

impl BellTransition {
    pub fn new(params: &ModelParams, delta: i32, delta_bar: i32, alpha: f64) -> Result<Self> {
        check_delta("delta", delta)?;
        check_delta("delta_bar", delta_bar)?;
        check_alpha(alpha)?;
        let a2 = alpha * alpha;
        let b2 = params.beta2();
        let base = a2 - b2;
        if base < 0.0 {
            return Err(Error::NegativeBase { alpha2: a2, beta2: b2 });
        }
        let mean_plus = (alpha + params.beta).powi(2);
        let mean_minus = (alpha - params.beta).powi(2);
        let cutoff = poisson_cutoff(mean_plus.max(a2 + b2));
        let sign = (delta * delta_bar) as f64;
        let d = delta as f64;

        let mut series = 0.0;
        let mut terms = Vec::with_capacity(cutoff + 1);
        for n in 0..=cutoff as u64 {
            // (alpha^2 - beta^2)^N e^{-(alpha^2 + beta^2)} / N!
            let cross = if base == 0.0 {
                if n == 0 { (-(a2 + b2)).exp() } else { 0.0 }
            } else {
                (n as f64 * base.ln() - (a2 + b2) - ln_factorial(n)).exp()
            };
            let overlap = displaced_overlap(n, 2.0 * SQRT_2 * params.beta);
            series += cross * overlap;

            let s = block_spectrum(params, n);
            let f = BlockFrequencies::from_spectrum(&s);
            let denom = f.w0 * f.w0;
            let ratio = if denom > 0.0 { s.omega1 * s.omega1 / denom } else { 0.0 };
            let weight = poisson_weight(n, mean_plus) + poisson_weight(n, mean_minus) + 2.0 * d * cross;
            terms.push((0.5 * weight * (1.0 + overlap) * ratio, f.w0));
        }
        Ok(BellTransition {
            params: *params,
            alpha,
            delta,
            delta_bar,
            constant: 0.5 + sign * series,
            terms,
        })
    }

    pub fn at(&self, tau: f64) -> f64 {
        self.constant - self.terms.iter().map(|&(amp, w0)| amp * (1.0 - (w0 * tau).cos())).sum::<f64>()
    }

    /// Values on a grid. Not wrapped in a [`TimeSeries`] because the series
    /// can leave `[0, 1]` slightly outside its regime of validity.
    pub fn series(&self, grid: &[f64]) -> Result<Vec<f64>> {
        validate_grid(grid)?;
        Ok(grid.par_iter().map(|&t| self.at(t)).collect())
    }
}

pub fn bell_transition_prob(p: &ModelParams, delta: i32, delta_bar: i32, alpha: f64, tau: f64) -> Result<f64> {
    Ok(BellTransition::new(p, delta, delta_bar, alpha)?.at(tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta: f64, a: f64, r: f64) -> ModelParams {
        ModelParams::new(beta, a, r).unwrap()
    }

    #[test]
    fn frequency_reductions() {
        let r = 0.25;
        let f = block_frequencies(&params(0.0, 0.0, r), 6);
        assert!((f.w0 - 2.0 * r).abs() < 1e-15);

        // a = 0, beta^2 << Omega_1: w1 = -w2 = w0/2 = sqrt2 |Omega_1|
        let p = params(0.01, 0.0, 0.25);
        let s = block_spectrum(&p, 3);
        let f = block_frequencies(&p, 3);
        let target = SQRT_2 * s.omega1.abs();
        assert!((f.w1 - target).abs() < 2.0 * p.beta2());
        assert!((f.w2 + target).abs() < 2.0 * p.beta2());
        assert!((0.5 * f.w0 - target).abs() < 1e-3 * target);

        // composes the Omega_1 / T0 oracle values of block N = 2
        let f = block_frequencies(&params(0.2, 0.2, 0.25), 2);
        let w1 = 0.143_213_457_402_749_4f64;
        let t0 = -0.063_760_038_150_572_65f64;
        assert!((f.w0 - (t0 * t0 + 8.0 * w1 * w1).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn initial_values() {
        let p = params(0.2, 0.2, 0.25);
        for n in [0, 2, 40] {
            assert!((p1(&p, n, 0.0).unwrap() - 1.0).abs() < 1e-12);
            assert!((p0(&p, n, 0.0).unwrap() - 1.0).abs() < 1e-12);
            assert!(t1_to_m1(&p, n, 0.0).unwrap().abs() < 1e-12);
            assert!(t1_to_0(&p, n, 0.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_block_is_an_error() {
        let p = params(0.2, 0.3, 0.0);
        assert!(matches!(p1(&p, 3, 1.0), Err(Error::DegenerateBlock { n: 3, .. })));
        assert!(matches!(p0(&p, 3, 1.0), Err(Error::DegenerateBlock { .. })));
        assert_eq!(b_of_n(&p, 3), 0.0);
    }

    #[test]
    fn p1_time_average() {
        let p = params(0.2, 0.2, 0.25);
        let d = BlockDynamics::new(&p, 2).unwrap();
        // trapezoid average over [0, 1e4]
        let m = 200_000;
        let h = 1e4 / m as f64;
        let mut acc = 0.5 * (d.p1(0.0) + d.p1(1e4));
        for i in 1..m {
            acc += d.p1(i as f64 * h);
        }
        let avg = acc * h / 1e4;
        assert!((avg - d.p1_mean()).abs() < 0.02 * d.p1_mean(), "{avg} vs {}", d.p1_mean());
    }

    #[test]
    fn p0_minimum() {
        let p = params(0.3, -0.4, 0.2);
        let d = BlockDynamics::new(&p, 5).unwrap();
        let t_half = std::f64::consts::PI / d.freqs.w0;
        assert!((d.p0(t_half) - d.p0_min()).abs() < 1e-9);
        let s = &d.spectrum;
        let direct = (s.y_plus.powi(2) / s.l2_plus - s.y_minus.powi(2) / s.l2_minus).powi(2);
        assert!((d.p0_min() - direct).abs() < 1e-12);
    }

    #[test]
    fn b_symmetric_limit() {
        assert!((b_of_n(&params(0.0, 0.0, 0.2), 9) - 0.25).abs() < 1e-15);
        // |T0| >> |Omega_1| pushes B to zero
        assert!(b_of_n(&params(0.6, -0.5, 0.01), 3) < 1e-4);
    }

    #[test]
    fn t_alpha_starts_at_zero() {
        let p = params(0.5599, -0.6, 0.24);
        assert_eq!(t_alpha(&p, 55f64.sqrt(), 0.0).unwrap(), 0.0);
        let ct = CoherentTransition::new(&p, 55f64.sqrt()).unwrap();
        assert!(ct.truncation_tail() < 1e-10);
        assert_eq!(ct.cutoff(), 144);
    }

    #[test]
    fn grids() {
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[0.0, 1.0, 1.0]).is_err());
        assert!(validate_grid(&[0.0, f64::NAN]).is_err());
        let g = uniform_grid(10.0, 11).unwrap();
        assert_eq!(g[10], 10.0);
        assert!(uniform_grid(10.0, 1).is_err());
        assert!(uniform_grid(-1.0, 10).is_err());
    }

    #[test]
    fn time_series_rejects_bad_values() {
        let p = params(0.2, 0.0, 0.2);
        assert!(TimeSeries::new(p, vec![0.0, 1.0], vec![0.5, 1.1], "x").is_err());
        assert!(TimeSeries::new(p, vec![0.0, 1.0], vec![0.5], "x").is_err());
        let ts = TimeSeries::new(p, vec![0.0, 1.0], vec![0.5, 0.25], "x").unwrap();
        assert_eq!((ts.min(), ts.max()), (0.25, 0.5));
    }

    #[test]
    fn bell_argument_checks() {
        let p = params(0.2, 0.0, 0.2);
        assert!(bell_transition_prob(&p, 0, 1, 3.0, 0.0).is_err());
        assert!(matches!(bell_transition_prob(&p, 1, 1, 0.1, 0.0), Err(Error::NegativeBase { .. })));
        assert!(bell_transition_prob(&p, 1, 1, 0.2, 0.0).is_ok());
    }
}
