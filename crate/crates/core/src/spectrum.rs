//! Closed-form eigensystem of the per-photon-number block Hamiltonian that
//! the adiabatic approximation leaves behind.
//!
//! Block `N` acts on `|1,m>|N_m>` for `m = 1, 0, -1` (in that order) and
//! reads
//!
//! ```text
//! [ N~    W1   W2 ]
//! [ W1    N    W1 ]      N~ = N - 2 beta^2 + a r / 2
//! [ W2    W1   N~ ]
//! ```
//!
//! with `W1 = r/sqrt2 e^{-beta^2} L_N(2 beta^2)` and
//! `W2 = -a r/2 e^{-4 beta^2} L_N(8 beta^2)`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{displaced_overlap, ModelParams};

/// Below this `|Omega_1N|` the closed-form eigenvectors are replaced by
/// their analytic limit.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// `Omega_1N = (r/sqrt2) e^{-beta^2} L_N(2 beta^2)`.
pub fn omega1(p: &ModelParams, n: u64) -> f64 {
    FRAC_1_SQRT_2 * p.ratio * displaced_overlap(n, SQRT_2 * p.beta)
}

/// `Omega_2N = -(a/2) r e^{-4 beta^2} L_N(8 beta^2)`.
pub fn omega2(p: &ModelParams, n: u64) -> f64 {
    -0.5 * p.a * p.ratio * displaced_overlap(n, 2.0 * SQRT_2 * p.beta)
}

/// `-2 beta^2 + (a/2) r (1 - e^{-4 beta^2} L_N(8 beta^2))`, which is the
/// same as `-2 beta^2 + a r / 2 + Omega_2N`.
pub fn t0_tilde(p: &ModelParams, n: u64) -> f64 {
    -2.0 * p.beta2() + 0.5 * p.a * p.ratio * (1.0 - displaced_overlap(n, 2.0 * SQRT_2 * p.beta))
}

/// Shifted diagonal `N - 2 beta^2 + a r / 2` of the outer block entries.
pub fn n_tilde(p: &ModelParams, n: u64) -> f64 {
    n as f64 - 2.0 * p.beta2() + 0.5 * p.a * p.ratio
}

pub fn block_hamiltonian(p: &ModelParams, n: u64) -> Matrix3<f64> {
    let nt = n_tilde(p, n);
    let w1 = omega1(p, n);
    let w2 = omega2(p, n);
    let nn = n as f64;
    Matrix3::new(nt, w1, w2, w1, nn, w1, w2, w1, nt)
}

/// Eigensystem of one block. Energies are in units of `hbar*omega`.
///
/// The `+`/`-` eigenvectors are `(1, Y, 1)/L` with `L^2 = Y^2 + 2`. At a
/// degenerate block one of the `Y` is infinite and the matching `L^2` too;
/// use the normalized component accessors rather than dividing by hand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSpectrum {
    pub n: u64,
    pub omega1: f64,
    pub omega2: f64,
    pub t0_tilde: f64,
    pub e0: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub y_plus: f64,
    pub y_minus: f64,
    pub l2_plus: f64,
    pub l2_minus: f64,
    pub degenerate: bool,
}

/// `(1/L, Y/L)` for one of the `+`/`-` eigenvectors.
fn normalized(y: f64, l2: f64) -> (f64, f64) {
    if y.is_infinite() {
        (0.0, y.signum())
    } else {
        let l = l2.sqrt();
        (1.0 / l, y / l)
    }
}

impl BlockSpectrum {
    /// `sqrt(T0~^2 + 8 Omega_1N^2)`, the gap between the `+` and `-` levels.
    pub fn splitting(&self) -> f64 {
        self.e_plus - self.e_minus
    }

    /// Components `(1/L+, Y+/L+)` of the `+` eigenvector.
    pub fn plus_components(&self) -> (f64, f64) {
        normalized(self.y_plus, self.l2_plus)
    }

    pub fn minus_components(&self) -> (f64, f64) {
        normalized(self.y_minus, self.l2_minus)
    }

    /// Eigenvectors for `e0`, `e_plus`, `e_minus`, in the `m = 1, 0, -1`
    /// template basis.
    pub fn eigenvectors(&self) -> [[f64; 3]; 3] {
        let (ep, mp) = self.plus_components();
        let (em, mm) = self.minus_components();
        [[FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2], [ep, mp, ep], [em, mm, em]]
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        [self.e0, self.e_plus, self.e_minus]
    }

    /// `Err(DegenerateBlock)` when the closed-form `Y` would divide by zero.
    pub fn regular(&self) -> Result<&Self> {
        if self.degenerate {
            Err(Error::DegenerateBlock { n: self.n, omega1: self.omega1 })
        } else {
            Ok(self)
        }
    }

    /// Largest `|H v - e v|` over the three eigenpairs.
    pub fn residual(&self, h: &Matrix3<f64>) -> f64 {
        let mut worst = 0.0f64;
        for (vec, e) in self.eigenvectors().iter().zip(self.eigenvalues()) {
            let v = nalgebra::Vector3::from_column_slice(vec);
            worst = worst.max((h * v - v * e).amax());
        }
        worst
    }
}

pub fn block_spectrum(p: &ModelParams, n: u64) -> BlockSpectrum {
    let w1 = omega1(p, n);
    let w2 = omega2(p, n);
    let t0 = t0_tilde(p, n);
    let s = t0.hypot(2.0 * SQRT_2 * w1);
    let nn = n as f64;

    let degenerate = w1.abs() < DEGENERACY_THRESHOLD;
    let (y_plus, y_minus) = if degenerate {
        let sign = if w1 < 0.0 { -1.0 } else { 1.0 };
        if t0 <= 0.0 {
            (sign * f64::INFINITY, -sign * 0.0)
        } else {
            (sign * 0.0, -sign * f64::INFINITY)
        }
    } else if t0 <= 0.0 {
        // -T0 + s has no cancellation here; the other root follows from Y+ Y- = -2
        let yp = (s - t0) / (2.0 * w1);
        (yp, -2.0 / yp)
    } else {
        let ym = -(t0 + s) / (2.0 * w1);
        (-2.0 / ym, ym)
    };

    BlockSpectrum {
        n,
        omega1: w1,
        omega2: w2,
        t0_tilde: t0,
        e0: nn + t0 - 2.0 * w2,
        e_plus: nn + 0.5 * (t0 + s),
        e_minus: nn + 0.5 * (t0 - s),
        y_plus,
        y_minus,
        l2_plus: y_plus * y_plus + 2.0,
        l2_minus: y_minus * y_minus + 2.0,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn params(beta: f64, a: f64, r: f64) -> ModelParams {
        ModelParams::new(beta, a, r).unwrap()
    }

    fn numeric_sorted(h: Matrix3<f64>) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn closed_sorted(s: &BlockSpectrum) -> Vec<f64> {
        let mut ev = s.eigenvalues().to_vec();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn coupling_values() {
        let p = params(0.0, 0.3, 0.25);
        for n in [0, 4, 90] {
            assert!((omega1(&p, n) - 0.25 * FRAC_1_SQRT_2).abs() < 1e-15);
            assert_eq!(t0_tilde(&p, n), 0.0);
        }
        let p = params(0.2, 0.2, 0.25);
        // (0.25/sqrt2) * 0.81013765509..., -0.025 * 0.35040152602...
        assert!((omega1(&p, 2) - 0.143_213_457_402_749_4).abs() < 1e-14);
        assert!((omega2(&p, 2) - -0.008_760_038_150_572_65).abs() < 1e-14);
        assert!((t0_tilde(&p, 2) - -0.063_760_038_150_572_65).abs() < 1e-14);
        let q = params(0.2, 0.0, 0.25);
        assert_eq!(omega2(&q, 2), 0.0);
        assert!((t0_tilde(&q, 7) - -0.08).abs() < 1e-15);
        assert_eq!(omega2(&params(0.2, -0.2, 0.25), 2), -omega2(&p, 2));
        assert!((t0_tilde(&p, 2) - (-0.08 + 0.025 + omega2(&p, 2))).abs() < 1e-15);
    }

    #[test]
    fn omega1_changes_sign_at_laguerre_roots() {
        // L_N(2 beta^2) at beta = 0.5599 crosses zero between N = 54 and 55
        let p = params(0.5599, -0.6, 0.24);
        assert!(omega1(&p, 54) < 0.0 && omega1(&p, 55) > 0.0);
    }

    #[test]
    fn uncoupled_limit() {
        let r = 0.25;
        let s = block_spectrum(&params(0.0, 0.0, r), 3);
        let ev = closed_sorted(&s);
        for (got, want) in ev.iter().zip([3.0 - r, 3.0, 3.0 + r]) {
            assert!((got - want).abs() < 1e-14, "{ev:?}");
        }
        assert!((s.y_plus - SQRT_2).abs() < 1e-15);
        assert!((s.l2_plus - 4.0).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_shape() {
        let p = params(0.0, 0.0, 0.2);
        let h = block_hamiltonian(&p, 5);
        assert_eq!(h[(0, 0)], 5.0);
        assert_eq!(h[(0, 2)], 0.0);
        assert!((h[(0, 1)] - 0.2 * FRAC_1_SQRT_2).abs() < 1e-16);
        let h = block_hamiltonian(&params(0.37, -0.4, 0.2), 11);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn matches_numeric_diagonalization() {
        let p = params(0.2, 0.2, 0.25);
        let s = block_spectrum(&p, 2);
        let h = block_hamiltonian(&p, 2);
        for (a, b) in closed_sorted(&s).iter().zip(numeric_sorted(h)) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(s.residual(&h) < 1e-12);
    }

    #[test]
    fn figure_one_parameter_sets_differ() {
        let spectra: Vec<_> = [0.2, 0.0, -0.2]
            .iter()
            .map(|&a| closed_sorted(&block_spectrum(&params(0.2, a, 0.25), 2)))
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                let d: f64 = spectra[i].iter().zip(&spectra[j]).map(|(x, y)| (x - y).abs()).sum();
                assert!(d > 1e-3);
            }
        }
    }

    #[test]
    fn degenerate_block_uses_limit() {
        let p = params(0.0, -0.4, 0.0);
        let s = block_spectrum(&p, 4);
        assert!(s.degenerate);
        assert!(s.regular().is_err());
        // T0 = -0.0 here, so + is the (0,1,0) state at energy N
        assert_eq!(s.plus_components(), (0.0, 1.0));
        let (edge, mid) = s.minus_components();
        assert!((edge - FRAC_1_SQRT_2).abs() < 1e-15 && mid == 0.0);
        assert!(s.residual(&block_hamiltonian(&p, 4)) < 1e-15);

        let p = params(0.3, 0.5, 1e-16);
        let s = block_spectrum(&p, 4);
        assert!(s.degenerate);
        assert!(s.residual(&block_hamiltonian(&p, 4)) < 1e-12);
    }

    #[test]
    fn large_y_is_stable() {
        // near the Omega_1 zero at N = 55, Y+ ~ 2e4
        let p = params(0.5599, -0.6, 0.24);
        let s = block_spectrum(&p, 55);
        assert!(s.y_plus.abs() > 1e4);
        assert!((s.y_plus * s.y_minus + 2.0).abs() < 1e-12);
        assert!(s.residual(&block_hamiltonian(&p, 55)) < 1e-12);
    }
}
