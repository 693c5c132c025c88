//! Collective three-level qubit basis and the Bell states expressed in it.
//!
//! Qubit vectors are ordered as `(|3>, |2>, |1>)`: both qubits up, the
//! channel's middle state, both qubits down.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are `|1,1>`, `|1,0>`, `|1,-1>` in the `(|3>, |2>, |1>)` basis.
pub const SX_EIGENBASIS: [[f64; 3]; 3] = [
    [0.5, FRAC_1_SQRT_2, 0.5],
    [FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2],
    [0.5, -FRAC_1_SQRT_2, 0.5],
];

/// Spin-1 collective `S_x` in the level basis.
pub const SX: [[f64; 3]; 3] = [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]];

/// Eigenstate `|1,m>` of `S_x` with eigenvalue `sqrt(2) m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SxEigenstate {
    Plus,
    Zero,
    Minus,
}

impl SxEigenstate {
    pub const ALL: [SxEigenstate; 3] = [SxEigenstate::Plus, SxEigenstate::Zero, SxEigenstate::Minus];

    pub fn from_m(m: i32) -> Option<Self> {
        match m {
            1 => Some(Self::Plus),
            0 => Some(Self::Zero),
            -1 => Some(Self::Minus),
            _ => None,
        }
    }

    pub fn m(self) -> i32 {
        match self {
            Self::Plus => 1,
            Self::Zero => 0,
            Self::Minus => -1,
        }
    }

    pub fn eigenvalue(self) -> f64 {
        std::f64::consts::SQRT_2 * self.m() as f64
    }

    pub fn vector(self) -> [f64; 3] {
        match self {
            Self::Plus => SX_EIGENBASIS[0],
            Self::Zero => SX_EIGENBASIS[1],
            Self::Minus => SX_EIGENBASIS[2],
        }
    }

    /// Oscillator displacement `-sqrt(2) m beta` attached to this qubit state.
    pub fn displacement(self, beta: f64) -> f64 {
        -std::f64::consts::SQRT_2 * self.m() as f64 * beta
    }
}

/// The four maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiMinus,
    PhiPlus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    /// Label `delta` of `|I_delta> = (|1,1> + delta |1,-1>)/sqrt(2)`;
    /// `PhiMinus` is `|I_0> = |1,0>` and reports 0.
    pub fn delta(self) -> i32 {
        match self {
            Self::PhiMinus => 0,
            Self::PhiPlus => 1,
            Self::PsiPlus | Self::PsiMinus => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PhiMinus => "PhiMinus",
            Self::PhiPlus => "PhiPlus",
            Self::PsiPlus => "PsiPlus",
            Self::PsiMinus => "PsiMinus",
        }
    }

    /// `Psi+` lives in the symmetric channel (`a > 0`), `Psi-` in the
    /// asymmetric one (`a < 0`). The `Phi` states exist in both.
    pub fn check_channel(self, a: f64) -> Result<()> {
        match self {
            Self::PsiPlus if a < 0.0 => {
                Err(Error::ChannelMismatch { state: self.name(), expected: "symmetric", a })
            }
            Self::PsiMinus if a > 0.0 => {
                Err(Error::ChannelMismatch { state: self.name(), expected: "asymmetric", a })
            }
            _ => Ok(()),
        }
    }

    /// Qubit vector in the `(|3>, |2>, |1>)` basis.
    pub fn vector(self) -> [f64; 3] {
        match self.delta() {
            0 => SxEigenstate::Zero.vector(),
            d => {
                let p = SxEigenstate::Plus.vector();
                let m = SxEigenstate::Minus.vector();
                let d = d as f64;
                [
                    (p[0] + d * m[0]) * FRAC_1_SQRT_2,
                    (p[1] + d * m[1]) * FRAC_1_SQRT_2,
                    (p[2] + d * m[2]) * FRAC_1_SQRT_2,
                ]
            }
        }
    }
}
