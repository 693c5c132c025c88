//! Special functions shared by the whole crate: Laguerre polynomials,
//! displaced-number-state overlaps and photon-number distributions.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

/// Minimum number of photon-number terms kept in any Poisson sum.
const MIN_CUTOFF: usize = 20;

/// Laguerre polynomial `L_n(x)` by forward three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre(n: u64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Overlap of two copies of the number state `|N>` displaced a real distance
/// `delta` apart: `exp(-delta^2/2) L_N(delta^2)`.
pub fn displaced_overlap(n: u64, delta: f64) -> f64 {
    let d2 = delta * delta;
    (-0.5 * d2).exp() * laguerre(n, d2)
}

pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Poisson photon-number probability `exp(-mean) mean^n / n!`, evaluated in
/// log space.
pub fn poisson_weight(n: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-mean + n as f64 * mean.ln() - ln_factorial(n)).exp()
}

/// Continuous Gaussian stand-in for [`poisson_weight`], meant for `mean >> 1`.
pub fn gaussian_weight(n: f64, mean: f64) -> f64 {
    let d = n - mean;
    (-d * d / (2.0 * mean)).exp() / (2.0 * PI * mean).sqrt()
}

/// Last photon number kept when summing over a Poisson distribution:
/// `ceil(mean + 12 sqrt(mean))`, never fewer than 20 terms.
pub fn poisson_cutoff(mean: f64) -> usize {
    let c = (mean + 12.0 * mean.sqrt()).ceil() as usize;
    c.max(MIN_CUTOFF)
}

/// Tabulated Poisson weights `p(0..=cutoff, mean)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonTable {
    pub mean: f64,
    pub weights: Vec<f64>,
}

impl PoissonTable {
    pub fn new(mean: f64) -> Self {
        Self::with_cutoff(mean, poisson_cutoff(mean))
    }

    pub fn with_cutoff(mean: f64, cutoff: usize) -> Self {
        let weights = (0..=cutoff as u64).map(|n| poisson_weight(n, mean)).collect();
        PoissonTable { mean, weights }
    }

    pub fn cutoff(&self) -> usize {
        self.weights.len() - 1
    }

    /// Probability mass beyond the cutoff.
    pub fn tail(&self) -> f64 {
        (1.0 - self.weights.iter().sum::<f64>()).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_laguerre() {
        assert_eq!(laguerre(0, 0.7), 1.0);
        assert!((laguerre(1, 0.3) - 0.7).abs() < 1e-15);
        // 1 - 2x + x^2/2 at x = 0.08
        assert!((laguerre(2, 0.08) - 0.8432).abs() < 1e-15);
        assert_eq!(laguerre(7, 0.0), 1.0);
    }

    #[test]
    fn overlap_values() {
        for n in [0, 3, 50] {
            assert_eq!(displaced_overlap(n, 0.0), 1.0);
        }
        // exp(-0.04) * 0.8432 and exp(-0.16) * 0.4112
        let d1 = std::f64::consts::SQRT_2 * 0.2;
        assert!((displaced_overlap(2, d1) - 0.810_137_655_093_238_9).abs() < 1e-14);
        assert!((displaced_overlap(2, 2.0 * d1) - 0.350_401_526_022_906_1).abs() < 1e-14);
    }

    #[test]
    fn poisson_values() {
        assert!((poisson_weight(0, 1.0) - (-1.0f64).exp()).abs() < 1e-16);
        // log-gamma oracle (30 digits): e^-55 55^55 / 55!
        assert!((poisson_weight(55, 55.0) - 0.053_711_923_627_106_85).abs() < 1e-14);
        let total: f64 = (0..=200).map(|n| poisson_weight(n, 55.0)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(poisson_weight(0, 0.0), 1.0);
        assert_eq!(poisson_weight(3, 0.0), 0.0);
        // log space survives where mean^n overflows
        let w = poisson_weight(10_000, 10_000.0);
        assert!(w.is_finite() && w > 0.0);
    }

    #[test]
    fn gaussian_peak_and_tail() {
        let m = 55.0;
        assert!((gaussian_weight(m, m) - 1.0 / (2.0 * PI * m).sqrt()).abs() < 1e-16);
        let rel = (gaussian_weight(55.0, 55.0) - poisson_weight(55, 55.0)).abs() / poisson_weight(55, 55.0);
        assert!(rel < 0.02, "{rel}");
        assert!(gaussian_weight(m + 10.0 * m.sqrt(), m) < 1e-20 * gaussian_weight(m, m));
    }

    #[test]
    fn cutoff_tail_is_negligible() {
        for mean in [1e-3, 0.5, 1.0, 9.0, 55.0, 360.0, 5000.0] {
            let t = PoissonTable::new(mean);
            assert!(t.tail() < 1e-10, "mean {mean}: tail {}", t.tail());
        }
        assert_eq!(poisson_cutoff(55.0), 144);
    }
}
