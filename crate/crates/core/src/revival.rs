//! Collapse and revival of `T(alpha, tau)` for large mean photon number.
//!
//! Around `n = floor(|alpha|^2)` the amplitude `B(N)` and the frequency
//! `w0(N)` are expanded to second order,
//!
//! ```text
//! B(N)  ~ b0 + b1 (N - n) + b2 (N - n)^2
//! w0(N) ~ w0(n) + c1 (N - n) + c2 (N - n)^2
//! ```
//!
//! the Poisson weights are replaced by a Gaussian of variance `n`, and the
//! oscillating part `T2` of `T = T1 - T2` is Poisson-summed into a sum over
//! revival index `k`.
//!
//! `c1` and `c2` are per-photon-number derivatives of `w0` alone; they enter
//! the envelope as `c1 tau` and `c2 tau`, so `t_rev(k) = 2 pi |k / c1|` is a
//! dimensionless time.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::dynamics::{b_from_spectrum, BlockFrequencies, CoherentTransition};
use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;
use crate::spectrum::block_spectrum;

/// Largest Gaussian factor a dropped revival term may carry.
pub const POISSON_TAIL_TOLERANCE: f64 = 1e-12;

/// Below this mean photon number the Gaussian extension of the photon sum
/// to negative `N` is questionable.
pub const GAUSSIAN_REGIME_MIN_ALPHA2: f64 = 10.0;

pub const DEFAULT_KMAX: u32 = 8;

/// Local quadratic model of `B(N)` and `w0(N)` around `nbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub alpha2: f64,
    pub nbar: u64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub w0_nbar: f64,
    /// Set when a degenerate block forced the wider least-squares stencil.
    pub fallback_stencil: bool,
}

/// Which Gaussian exponent the envelope uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeForm {
    /// `exp(-n K^2 cos(theta) / (2 rho))`: the Fourier transform of a
    /// Gaussian of variance `n`.
    Derived,
    /// `exp(-n K^2 cos(theta) / rho)`, without the factor 1/2. Kept as a
    /// diagnostic; its collapse is too fast by sqrt(2).
    Unhalved,
}

impl EnvelopeForm {
    fn factor(self) -> f64 {
        match self {
            EnvelopeForm::Derived => 0.5,
            EnvelopeForm::Unhalved => 1.0,
        }
    }
}

/// Amplitude and phase of the `k`-th revival term `A cos(theta1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint {
    pub amplitude: f64,
    pub theta1: f64,
}

/// Non-oscillating level `T1 = b0 + b2 nbar` of `T(alpha, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub value: f64,
    /// False when `b2 < 0` drags the level negative, which means the
    /// quadratic model does not hold here.
    pub valid_region: bool,
}

/// Coefficients `(f(0), f'(0), f''(0)/2)` of a quadratic through samples
/// `(x, f(x))`, by least squares.
fn quadratic_lsq(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for &(x, y) in points {
        let row = Vector3::new(1.0, x, x * x);
        ata += row * row.transpose();
        aty += row * y;
    }
    let sol = ata.lu().solve(&aty)?;
    Some((sol[0], sol[1], sol[2]))
}

pub fn quadratic_fit(p: &ModelParams, alpha: f64) -> Result<QuadraticFit> {
    let alpha2 = alpha * alpha;
    if !alpha2.is_finite() || alpha2 < 2.0 {
        return Err(invalid("alpha", format!("|alpha|^2 must be >= 2 for the fit stencil, got {alpha2}")));
    }
    let nbar = alpha2.floor() as u64;
    let start = nbar.saturating_sub(2);
    let spectra: Vec<_> = (start..=nbar + 2).map(|n| block_spectrum(p, n)).collect();
    let at = |n: u64| &spectra[(n - start) as usize];

    let w = |n: u64| BlockFrequencies::from_spectrum(at(n)).w0;
    let (wm, w0, wp) = (w(nbar - 1), w(nbar), w(nbar + 1));
    let c1 = 0.5 * (wp - wm);
    let c2 = 0.5 * (wp - 2.0 * w0 + wm);

    let b = |n: u64| b_from_spectrum(at(n));
    let b0 = b(nbar);
    let stencil_degenerate = (nbar - 1..=nbar + 1).any(|n| at(n).degenerate);
    let (b1, b2) = if !stencil_degenerate {
        let (bm, bp) = (b(nbar - 1), b(nbar + 1));
        (0.5 * (bp - bm), 0.5 * (bp - 2.0 * b0 + bm))
    } else {
        let points: Vec<(f64, f64)> = (start..=nbar + 2)
            .filter(|&n| !at(n).degenerate)
            .map(|n| (n as f64 - nbar as f64, b(n)))
            .collect();
        if points.len() < 3 {
            return Err(Error::DegenerateNeighborhood {
                reason: format!("fewer than 3 regular blocks within 2 of nbar = {nbar}"),
            });
        }
        let (_, d1, d2) = quadratic_lsq(&points).ok_or_else(|| Error::DegenerateNeighborhood {
            reason: format!("singular fallback stencil around nbar = {nbar}"),
        })?;
        (d1, d2)
    };

    Ok(QuadraticFit {
        alpha2,
        nbar,
        b0,
        b1,
        b2,
        c1,
        c2,
        w0_nbar: w0,
        fallback_stencil: stencil_degenerate,
    })
}

impl QuadraticFit {
    fn n(&self) -> f64 {
        self.nbar as f64
    }

    /// Quadratic model of `B` at photon number `n`.
    pub fn b_model(&self, n: f64) -> f64 {
        let x = n - self.n();
        self.b0 + self.b1 * x + self.b2 * x * x
    }

    /// `|B(nbar + 2) - model(nbar + 2)|`, a one-point check of the quadratic
    /// model just outside its stencil.
    pub fn residual(&self, p: &ModelParams) -> f64 {
        let n = self.nbar + 2;
        (b_from_spectrum(&block_spectrum(p, n)) - self.b_model(n as f64)).abs()
    }

    pub fn advisories(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.alpha2 < GAUSSIAN_REGIME_MIN_ALPHA2 {
            out.push(format!(
                "|alpha|^2 = {} is below {GAUSSIAN_REGIME_MIN_ALPHA2}; the Gaussian photon distribution is a poor fit",
                self.alpha2
            ));
        }
        if self.fallback_stencil {
            out.push(format!("degenerate block near nbar = {}; b1, b2 from a 5-point fit", self.nbar));
        }
        if !t1_const(self).valid_region {
            out.push(format!("plateau b0 + b2 nbar = {} is negative (invalid fit region)", t1_const(self).value));
        }
        out
    }
}

pub fn t1_const(fit: &QuadraticFit) -> Plateau {
    let value = fit.b0 + fit.b2 * fit.n();
    Plateau { value, valid_region: value >= 0.0 }
}

/// `rho = (1 + 4 n^2 c2^2 tau^2)^{1/2}` and `theta = atan(2 n c2 tau)`.
fn chirp(fit: &QuadraticFit, tau: f64) -> (f64, f64) {
    let x = 2.0 * fit.n() * fit.c2 * tau;
    (x.hypot(1.0), x.atan())
}

/// Gaussian factor `exp(-E cos(theta)) / sqrt(rho)` of term `k`.
fn gaussian_factor(fit: &QuadraticFit, k: i64, tau: f64, form: EnvelopeForm) -> f64 {
    let (rho, theta) = chirp(fit, tau);
    let kk = TAU * k as f64 + fit.c1 * tau;
    let e = form.factor() * fit.n() * kk * kk / rho;
    (-e * theta.cos()).exp() / rho.sqrt()
}

pub fn envelope_with(fit: &QuadraticFit, k: i64, tau: f64, form: EnvelopeForm) -> EnvelopePoint {
    let n = fit.n();
    let (rho, theta) = chirp(fit, tau);
    let kk = TAU * k as f64 + fit.c1 * tau;
    let e = form.factor() * n * kk * kk / rho;
    let gamma = fit.b2 * (n / rho - kk * kk * n * n / (rho * rho));
    EnvelopePoint {
        amplitude: (-e * theta.cos()).exp() / rho.sqrt() * (fit.b0 + gamma),
        theta1: fit.w0_nbar * tau + 0.5 * theta + TAU * k as f64 * n - e * theta.sin(),
    }
}

pub fn envelope(fit: &QuadraticFit, k: i64, tau: f64) -> EnvelopePoint {
    envelope_with(fit, k, tau, EnvelopeForm::Derived)
}

/// `T2(alpha, tau)` as the revival sum over `k = -kmax..=kmax`.
///
/// Fails when a dropped term would carry a Gaussian factor above
/// [`POISSON_TAIL_TOLERANCE`].
pub fn t2_poisson_with(fit: &QuadraticFit, tau: f64, kmax: u32, form: EnvelopeForm) -> Result<f64> {
    if kmax < 1 {
        return Err(invalid("kmax", "must be >= 1"));
    }
    let tail = dropped_tail(fit, tau, kmax, form);
    if tail > POISSON_TAIL_TOLERANCE {
        return Err(Error::TruncatedPoissonSum { kmax, tau, tail });
    }
    let kmax = kmax as i64;
    Ok((-kmax..=kmax)
        .map(|k| {
            let g = envelope_with(fit, k, tau, form);
            g.amplitude * g.theta1.cos()
        })
        .sum())
}

pub fn t2_poisson(fit: &QuadraticFit, tau: f64, kmax: u32) -> Result<f64> {
    t2_poisson_with(fit, tau, kmax, EnvelopeForm::Derived)
}

/// Largest Gaussian factor among the terms with `|k| > kmax`.
pub fn dropped_tail(fit: &QuadraticFit, tau: f64, kmax: u32, form: EnvelopeForm) -> f64 {
    let kmax = kmax as i64;
    let mut worst = gaussian_factor(fit, kmax + 1, tau, form).max(gaussian_factor(fit, -kmax - 1, tau, form));
    // the terms peak where 2 pi k + c1 tau = 0
    let center = (-fit.c1 * tau / TAU).round() as i64;
    if center.abs() > kmax {
        worst = worst.max(gaussian_factor(fit, center, tau, form));
    }
    worst
}

/// Smallest `kmax` whose dropped tail is negligible at every time in `grid`.
pub fn required_kmax(fit: &QuadraticFit, grid: &[f64], form: EnvelopeForm) -> u32 {
    let mut kmax = 1;
    while grid.iter().any(|&t| dropped_tail(fit, t, kmax, form) > POISSON_TAIL_TOLERANCE) {
        kmax += 1;
    }
    kmax
}

/// `T1 - T2` on a grid: the Poisson-summation reconstruction of
/// `T(alpha, tau)`.
pub fn reconstruct(fit: &QuadraticFit, grid: &[f64], kmax: u32, form: EnvelopeForm) -> Result<Vec<f64>> {
    let t1 = t1_const(fit).value;
    grid.iter().map(|&t| Ok(t1 - t2_poisson_with(fit, t, kmax, form)?)).collect()
}

/// `t_rev(k) = 2 pi |k / c1|`.
pub fn revival_time(fit: &QuadraticFit, k: i64) -> Result<f64> {
    if fit.c1.abs() < 1e-14 {
        return Err(Error::NoRevival { c1: fit.c1 });
    }
    Ok(TAU * (k as f64 / fit.c1).abs())
}

/// The `k` whose term revives at positive time: `-sign(c1) |k|`.
pub fn forward_index(fit: &QuadraticFit, k: u32) -> i64 {
    if fit.c1 < 0.0 {
        k as i64
    } else {
        -(k as i64)
    }
}

/// Full width at half maximum of `|A(k, tau)|` around its revival.
pub fn revival_width(fit: &QuadraticFit, k: u32, form: EnvelopeForm) -> Result<f64> {
    let center = revival_time(fit, k as i64)?;
    let ki = forward_index(fit, k);
    let amp = |t: f64| envelope_with(fit, ki, t, form).amplitude.abs();
    // coarse Gaussian width guess, only used to size the search steps
    let sigma = 1.0 / (fit.c1.abs() * fit.n().sqrt());
    let step = sigma / 50.0;

    let mut peak_t = center;
    let mut peak = amp(center);
    let mut t = (center - 5.0 * sigma).max(0.0);
    while t <= center + 5.0 * sigma {
        let a = amp(t);
        if a > peak {
            peak = a;
            peak_t = t;
        }
        t += step;
    }
    let half = 0.5 * peak;
    let crossing = |dir: f64| -> Option<f64> {
        let mut inner = peak_t;
        let mut outer = peak_t + dir * step;
        let mut guard = 0;
        while amp(outer) > half {
            inner = outer;
            outer += dir * step;
            guard += 1;
            if guard > 100_000 || outer < 0.0 {
                return None;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (inner + outer);
            if amp(mid) > half {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        Some(0.5 * (inner + outer))
    };
    match (crossing(-1.0), crossing(1.0)) {
        (Some(lo), Some(hi)) => Ok(hi - lo),
        _ => Err(Error::DegenerateNeighborhood { reason: format!("revival {k} has no resolvable half-maximum") }),
    }
}

/// `A(k, tau)` specialized to `c2 = 0`, written out directly.
pub fn envelope_c2_zero(fit: &QuadraticFit, k: i64, tau: f64, form: EnvelopeForm) -> f64 {
    let n = fit.n();
    let kk = 2.0 * PI * k as f64 + fit.c1 * tau;
    (-form.factor() * n * kk * kk).exp() * (fit.b0 + fit.b2 * (n - kk * kk * n * n))
}

/// Time of the largest `|T - T1|` of the direct sum within half a revival
/// period of `t_rev(k)`.
pub fn direct_revival_peak(p: &ModelParams, fit: &QuadraticFit, k: u32, samples: usize) -> Result<f64> {
    if k == 0 || samples < 2 {
        return Err(invalid("k", "need k >= 1 and at least 2 samples"));
    }
    let t_rev = revival_time(fit, 1)?;
    let t = CoherentTransition::new(p, fit.alpha2.sqrt())?;
    let level = t1_const(fit).value;
    let lo = (k as f64 - 0.5) * t_rev;
    let step = t_rev / (samples - 1) as f64;
    let (mut best, mut best_gap) = (lo, f64::NEG_INFINITY);
    for i in 0..samples {
        let tau = lo + i as f64 * step;
        let gap = (t.at(tau) - level).abs();
        if gap > best_gap {
            best = tau;
            best_gap = gap;
        }
    }
    Ok(best)
}
