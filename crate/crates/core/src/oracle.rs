//! Exact reference engine: the full qubit-oscillator Hamiltonian in a
//! truncated Fock space, diagonalized densely.
//!
//! Composite vectors are laid out level-major: index `l * (ncut + 1) + n`
//! for qubit level `l` in `(|3>, |2>, |1>)` and photon number `n`.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::dynamics::{validate_grid, TimeSeries};
use crate::error::{invalid, Error, Result};
use crate::model::{ln_factorial, BellState, ModelParams, SxEigenstate, SX};
use crate::spectrum::block_spectrum;

/// Norm allowed in the top 5% of Fock states before a vector is considered
/// truncated.
pub const TAIL_NORM_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedSpace {
    pub ncut: usize,
}

impl TruncatedSpace {
    pub fn new(ncut: usize) -> Result<Self> {
        if ncut < 4 {
            return Err(invalid("ncut", format!("must be at least 4, got {ncut}")));
        }
        Ok(TruncatedSpace { ncut })
    }

    /// Fock states `|0> .. |ncut>`.
    pub fn fock_dim(&self) -> usize {
        self.ncut + 1
    }

    pub fn dim(&self) -> usize {
        3 * self.fock_dim()
    }

    pub fn index(&self, level: usize, n: usize) -> usize {
        level * self.fock_dim() + n
    }

    pub fn doubled(&self) -> Self {
        TruncatedSpace { ncut: 2 * self.ncut }
    }

    /// Checks that `field` keeps its weight away from the truncation edge.
    fn check_tail(&self, field: &DVector<f64>) -> Result<()> {
        let start = ((0.95 * self.fock_dim() as f64) as usize).min(self.ncut);
        let tail: f64 = field.iter().skip(start).map(|x| x * x).sum();
        if tail > TAIL_NORM_LIMIT {
            return Err(Error::TruncationRisk {
                ncut: self.ncut,
                reason: format!("top 5% of Fock states carry {tail:e} of the norm"),
            });
        }
        Ok(())
    }
}

/// Pure state of qubits and oscillator.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    pub amplitudes: DVector<Complex64>,
}

impl CompositeState {
    /// `qubit ⊗ field` for a real qubit vector in the level basis.
    pub fn product(space: &TruncatedSpace, qubit: [f64; 3], field: &DVector<f64>) -> Self {
        let f = space.fock_dim();
        let amplitudes =
            DVector::from_fn(space.dim(), |i, _| Complex64::new(qubit[i / f] * field[i % f], 0.0));
        CompositeState { amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sum_n |<q, n|psi>|^2`: population of the qubit state `q` with the
    /// oscillator traced out.
    pub fn qubit_population(&self, space: &TruncatedSpace, qubit: [f64; 3]) -> f64 {
        let f = space.fock_dim();
        (0..f)
            .map(|n| (0..3).map(|l| self.amplitudes[l * f + n] * qubit[l]).sum::<Complex64>().norm_sqr())
            .sum()
    }
}

/// `H / (hbar omega) = r S_z ⊗ 1 + 1 ⊗ a†a + beta S_x ⊗ (a + a†)` with
/// `S_z = diag(1, a, -1)`.
pub fn build_full_hamiltonian(p: &ModelParams, space: &TruncatedSpace) -> DMatrix<f64> {
    let f = space.fock_dim();
    let sz = [1.0, p.a, -1.0];
    let mut h = DMatrix::zeros(space.dim(), space.dim());
    for (l, s) in sz.iter().enumerate() {
        for n in 0..f {
            let i = space.index(l, n);
            h[(i, i)] = p.ratio * s + n as f64;
        }
    }
    for l in 0..3 {
        for lp in 0..3 {
            if SX[l][lp] == 0.0 {
                continue;
            }
            for n in 0..f - 1 {
                let x = p.beta * SX[l][lp] * ((n + 1) as f64).sqrt();
                h[(space.index(l, n), space.index(lp, n + 1))] = x;
                h[(space.index(l, n + 1), space.index(lp, n))] = x;
            }
        }
    }
    h
}

/// Displacement operator `exp(shift (a† - a))` on the truncated Fock space.
pub fn displacement_matrix(space: &TruncatedSpace, shift: f64) -> DMatrix<f64> {
    let f = space.fock_dim();
    let mut g = DMatrix::zeros(f, f);
    for n in 0..f - 1 {
        let s = shift * ((n + 1) as f64).sqrt();
        g[(n + 1, n)] = s;
        g[(n, n + 1)] = -s;
    }
    g.exp()
}

/// `D(shift)|n>` in the truncated space.
pub fn displaced_number_state(space: &TruncatedSpace, n: usize, shift: f64) -> Result<DVector<f64>> {
    if 2 * n > space.ncut {
        return Err(Error::TruncationRisk {
            ncut: space.ncut,
            reason: format!("number state {n} needs ncut >= {}", 2 * n),
        });
    }
    let v = displacement_matrix(space, shift).column(n).into_owned();
    space.check_tail(&v)?;
    Ok(v)
}

/// Coherent state `|alpha>` for real `alpha`.
pub fn coherent_state(space: &TruncatedSpace, alpha: f64) -> Result<DVector<f64>> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
    }
    if alpha * alpha + 6.0 * alpha > space.ncut as f64 {
        return Err(Error::TruncationRisk {
            ncut: space.ncut,
            reason: format!("alpha^2 + 6 alpha = {} exceeds ncut", alpha * alpha + 6.0 * alpha),
        });
    }
    let v = DVector::from_fn(space.fock_dim(), |n, _| {
        if alpha == 0.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        (-0.5 * alpha * alpha + n as f64 * alpha.ln() - 0.5 * ln_factorial(n as u64)).exp()
    });
    space.check_tail(&v)?;
    Ok(v)
}

/// A diagonalized Hamiltonian, ready to propagate states.
#[derive(Debug, Clone)]
pub struct ExactSystem {
    pub params: ModelParams,
    pub space: TruncatedSpace,
    pub energies: DVector<f64>,
    /// Eigenvectors as columns.
    pub vectors: DMatrix<f64>,
}

impl ExactSystem {
    pub fn new(p: &ModelParams, space: TruncatedSpace) -> Self {
        let eig = SymmetricEigen::new(build_full_hamiltonian(p, &space));
        ExactSystem { params: *p, space, energies: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    /// `|psi(tau)> = V exp(-i E tau) V^T |psi(0)>` for every time in `grid`.
    pub fn evolve(&self, initial: &CompositeState, grid: &[f64]) -> Result<Vec<CompositeState>> {
        validate_grid(grid)?;
        let re = self.vectors.tr_mul(&initial.amplitudes.map(|c| c.re));
        let im = self.vectors.tr_mul(&initial.amplitudes.map(|c| c.im));
        Ok(grid
            .iter()
            .map(|&tau| {
                let mut out_re = DVector::zeros(self.energies.len());
                let mut out_im = DVector::zeros(self.energies.len());
                for k in 0..self.energies.len() {
                    let c = Complex64::new(re[k], im[k]) * Complex64::from_polar(1.0, -self.energies[k] * tau);
                    out_re[k] = c.re;
                    out_im[k] = c.im;
                }
                let r = &self.vectors * out_re;
                let i = &self.vectors * out_im;
                CompositeState {
                    amplitudes: DVector::from_fn(r.len(), |j, _| Complex64::new(r[j], i[j])),
                }
            })
            .collect())
    }

    /// `<psi|H|psi>` in units of `hbar omega`.
    pub fn energy(&self, state: &CompositeState) -> f64 {
        let re = self.vectors.tr_mul(&state.amplitudes.map(|c| c.re));
        let im = self.vectors.tr_mul(&state.amplitudes.map(|c| c.im));
        (0..self.energies.len()).map(|k| self.energies[k] * (re[k] * re[k] + im[k] * im[k])).sum()
    }

    /// Population of `qubit` along the evolution of `qubit ⊗ field`.
    ///
    /// Projects the eigenvectors once onto `<qubit| ⊗ 1` so each time costs
    /// a single matrix-vector product.
    pub fn qubit_survival(&self, qubit: [f64; 3], field: &DVector<f64>, grid: &[f64]) -> Result<Vec<f64>> {
        validate_grid(grid)?;
        let f = self.space.fock_dim();
        let dim = self.space.dim();
        let psi0 = DVector::from_fn(dim, |i, _| qubit[i / f] * field[i % f]);
        let coeff = self.vectors.tr_mul(&psi0);
        let proj: DMatrix<f64> = DMatrix::from_fn(f, dim, |n, k| (0..3).map(|l| qubit[l] * self.vectors[(l * f + n, k)]).sum());
        Ok(grid
            .iter()
            .map(|&tau| {
                let cr: DVector<f64> = DVector::from_fn(dim, |k, _| coeff[k] * (self.energies[k] * tau).cos());
                let ci: DVector<f64> = DVector::from_fn(dim, |k, _| coeff[k] * (self.energies[k] * tau).sin());
                (&proj * cr).norm_squared() + (&proj * ci).norm_squared()
            })
            .collect())
    }

    /// Probability that the qubits are still in `bell` when the system
    /// starts in `bell ⊗ |alpha>`.
    pub fn bell_survival(&self, bell: BellState, alpha: f64, grid: &[f64]) -> Result<TimeSeries> {
        bell.check_channel(self.params.a)?;
        let field = coherent_state(&self.space, alpha)?;
        let values = self.qubit_survival(bell.vector(), &field, grid)?;
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        TimeSeries::new(self.params, grid.to_vec(), values, format!("exact survival of {}", bell.name()))
    }

    /// Matches exact eigenstates to adiabatic-approximation blocks
    /// `0..blocks` by their weight on the templates `|1,m>|N_m>`, and pairs
    /// energies within each block in ascending order.
    pub fn compare_spectrum(&self, blocks: usize) -> Result<Vec<BlockComparison>> {
        let f = self.space.fock_dim();
        if blocks == 0 || 2 * blocks > self.space.ncut {
            return Err(invalid("blocks", format!("need 1 <= blocks <= ncut/2, got {blocks}")));
        }
        let beta = self.params.beta;
        let mut templates = DMatrix::zeros(3 * blocks, self.space.dim());
        for (mi, m) in SxEigenstate::ALL.iter().enumerate() {
            let d = displacement_matrix(&self.space, m.displacement(beta));
            let q = m.vector();
            for n in 0..blocks {
                let field = d.column(n);
                self.space.check_tail(&field.into_owned())?;
                for l in 0..3 {
                    for j in 0..f {
                        templates[(3 * n + mi, l * f + j)] = q[l] * field[j];
                    }
                }
            }
        }
        let overlaps = &templates * &self.vectors;
        let weight = |n: usize, k: usize| (0..3).map(|m| overlaps[(3 * n + m, k)].powi(2)).sum::<f64>();

        let mut out = Vec::with_capacity(blocks);
        for n in 0..blocks {
            let mut ranked: Vec<(usize, f64)> = (0..self.space.dim()).map(|k| (k, weight(n, k))).collect();
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
            let mut exact: Vec<f64> = ranked[..3].iter().map(|&(k, _)| self.energies[k]).collect();
            exact.sort_by(f64::total_cmp);
            let mut aa = block_spectrum(&self.params, n as u64).eigenvalues().to_vec();
            aa.sort_by(f64::total_cmp);
            out.push(BlockComparison {
                n: n as u64,
                exact: [exact[0], exact[1], exact[2]],
                adiabatic: [aa[0], aa[1], aa[2]],
                min_weight: ranked[2].1,
            });
        }
        Ok(out)
    }
}

/// Exact vs adiabatic-approximation energies of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockComparison {
    pub n: u64,
    pub exact: [f64; 3],
    pub adiabatic: [f64; 3],
    /// Smallest template weight among the three matched exact states.
    pub min_weight: f64,
}

impl BlockComparison {
    pub fn max_error(&self) -> f64 {
        self.exact.iter().zip(&self.adiabatic).map(|(e, a)| (e - a).abs()).fold(0.0, f64::max)
    }
}

pub fn exact_bell_survival(
    p: &ModelParams,
    space: TruncatedSpace,
    bell: BellState,
    alpha: f64,
    grid: &[f64],
) -> Result<TimeSeries> {
    ExactSystem::new(p, space).bell_survival(bell, alpha, grid)
}

/// Fock cutoff that comfortably holds `|alpha>` plus the displacement
/// `2 sqrt(2) beta` between the extreme qubit branches.
pub fn recommended_ncut(alpha2: f64, beta: f64) -> usize {
    let shift = 2.0 * SQRT_2 * beta;
    let reach = alpha2.sqrt() + shift;
    (reach * reach + 12.0 * reach + 20.0).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta: f64, a: f64, r: f64) -> ModelParams {
        ModelParams::new(beta, a, r).unwrap()
    }

    #[test]
    fn decoupled_spectrum() {
        let r = 0.2;
        let a = -0.4;
        let space = TruncatedSpace::new(10).unwrap();
        let sys = ExactSystem::new(&params(0.0, a, r), space);
        let mut want: Vec<f64> =
            (0..=10).flat_map(|n| [n as f64 + r, n as f64 + a * r, n as f64 - r]).collect();
        want.sort_by(f64::total_cmp);
        let mut got: Vec<f64> = sys.energies.iter().copied().collect();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_ratio_spectrum_is_displaced_ladder() {
        let beta = 0.3;
        let space = TruncatedSpace::new(60).unwrap();
        let sys = ExactSystem::new(&params(beta, 0.5, 0.0), space);
        let mut got: Vec<f64> = sys.energies.iter().copied().collect();
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> =
            (0..20).flat_map(|n| [0, 1, -1].map(|m: i32| n as f64 - 2.0 * beta * beta * (m * m) as f64)).collect();
        want.sort_by(f64::total_cmp);
        // far from the truncation edge the ladder is exact
        for (g, w) in got.iter().zip(&want).take(45) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let h = build_full_hamiltonian(&params(0.4, -0.3, 0.2), &TruncatedSpace::new(12).unwrap());
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn displacement_basics() {
        let space = TruncatedSpace::new(60).unwrap();
        let v = displaced_number_state(&space, 3, 0.0).unwrap();
        for (n, x) in v.iter().enumerate() {
            assert!((x - if n == 3 { 1.0 } else { 0.0 }).abs() < 1e-15);
        }
        let v = displaced_number_state(&space, 5, 0.8).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-10);
        assert!(displaced_number_state(&space, 31, 0.1).is_err());
        let small = TruncatedSpace::new(8).unwrap();
        assert!(matches!(displaced_number_state(&small, 3, 2.0), Err(Error::TruncationRisk { .. })));
    }

    #[test]
    fn coherent_state_moments() {
        let space = TruncatedSpace::new(60).unwrap();
        let vac = coherent_state(&space, 0.0).unwrap();
        assert_eq!(vac[0], 1.0);
        let alpha = 3.0;
        let v = coherent_state(&space, alpha).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-10);
        for n in 0..=60 {
            assert!((v[n] * v[n] - crate::model::poisson_weight(n as u64, 9.0)).abs() < 1e-12);
        }
        let mean: f64 = v.iter().enumerate().map(|(n, x)| n as f64 * x * x).sum();
        assert!((mean - 9.0).abs() < 1e-8);
        assert!(coherent_state(&TruncatedSpace::new(20).unwrap(), 3.0).is_err());
    }

    #[test]
    fn evolution_preserves_norm_and_energy() {
        let p = params(0.3, -0.5, 0.2);
        let space = TruncatedSpace::new(50).unwrap();
        let sys = ExactSystem::new(&p, space);
        let field = coherent_state(&space, 2.0).unwrap();
        let psi0 = CompositeState::product(&space, BellState::PhiMinus.vector(), &field);
        let grid = [0.0, 0.7, 5.0, 40.0];
        let states = sys.evolve(&psi0, &grid).unwrap();
        for (a, b) in states[0].amplitudes.iter().zip(psi0.amplitudes.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        let e0 = sys.energy(&psi0);
        for s in &states {
            assert!((s.norm() - 1.0).abs() < 1e-9);
            assert!((sys.energy(s) - e0).abs() < 1e-9);
        }
        // the projected fast path agrees with full evolution
        let fast = sys.qubit_survival(BellState::PhiMinus.vector(), &field, &grid).unwrap();
        for (s, f) in states.iter().zip(&fast) {
            assert!((s.qubit_population(&space, BellState::PhiMinus.vector()) - f).abs() < 1e-12);
        }
    }

    #[test]
    fn uncoupled_survival_is_two_level_phase() {
        // beta = 0: |3> and |1> pick up phases e^{-+i r tau}, so the
        // population of (|3> - |1>)/sqrt2 is cos^2(r tau)
        let r = 0.2;
        let space = TruncatedSpace::new(40).unwrap();
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.37).collect();
        let s = exact_bell_survival(&params(0.0, 0.3, r), space, BellState::PhiMinus, 2.0, &grid).unwrap();
        assert_eq!(s.values[0], 1.0);
        for (t, v) in grid.iter().zip(&s.values) {
            assert!((v - (r * t).cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn channel_mismatch_is_rejected() {
        let space = TruncatedSpace::new(30).unwrap();
        let r = exact_bell_survival(&params(0.2, -0.3, 0.1), space, BellState::PsiPlus, 1.0, &[0.0]);
        assert!(matches!(r, Err(Error::ChannelMismatch { .. })));
    }

    #[test]
    fn spectrum_error_shrinks_with_ratio() {
        let mut errs = Vec::new();
        for r in [0.2, 0.1, 0.05] {
            let sys = ExactSystem::new(&params(0.2, 0.0, r), TruncatedSpace::new(80).unwrap());
            let cmp = sys.compare_spectrum(10).unwrap();
            let err = cmp.iter().map(BlockComparison::max_error).fold(0.0, f64::max);
            assert!(cmp.iter().all(|c| c.min_weight > 0.5));
            errs.push(err / (r * r));
        }
        // error / r^2 stays bounded while r shrinks
        assert!(errs.iter().all(|&c| c < 1.0), "{errs:?}");
    }

    #[test]
    fn recommended_cutoff_holds_coherent_state() {
        for (a2, beta) in [(9.0, 0.2), (25.0, 0.5599), (55.0, 0.6)] {
            let space = TruncatedSpace::new(recommended_ncut(a2, beta)).unwrap();
            assert!(coherent_state(&space, f64::sqrt(a2)).is_ok());
        }
    }
}
