//! R-matrix, transfer matrices, Hamiltonians and conserved operators.

mod hamiltonian;
mod operators;
mod rmatrix;
mod transfer;

pub use hamiltonian::{hamiltonian_direct, hamiltonian_from_transfer, xxz_antiperiodic};
pub use operators::{
    charge_asymptotic, charge_operator, shift_operator, shift_operator_product,
    shift_product_factors,
};
pub use rmatrix::{
    check_crossing, check_pt, check_quasi_periodicity, check_special_points, check_unitarity,
    check_ybe, check_z2, permutation, phi, r_matrix, r_matrix_derivative, ybe_residual,
};
pub use transfer::{transfer_derivative, transfer_matrix, transfer_with_derivative, Direction};

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub const MAX_SITES: usize = 12;

fn is_real(z: C64) -> bool {
    z.im.abs() <= 1e-14 * z.norm().max(1.0)
}

fn is_imag(z: C64) -> bool {
    z.re.abs() <= 1e-14 * z.norm().max(1.0)
}

/// Chain of 2N sites with parameters (a, eta).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub half_size: usize,
    pub a: C64,
    pub eta: C64,
}

impl ModelParams {
    pub fn new(half_size: usize, a: C64, eta: C64) -> Result<Self> {
        if half_size < 2 {
            return Err(Error::Domain(format!(
                "chain needs 2N >= 4 sites, got {}",
                2 * half_size
            )));
        }
        if eta.sinh().norm() < 1e-12 {
            return Err(Error::SingularParameter("sinh(eta) = 0".into()));
        }
        if phi(2.0 * a, eta).norm() < 1e-12 {
            return Err(Error::SingularParameter("phi(2a) = 0 (eta = +-2a)".into()));
        }
        Ok(Self { half_size, a, eta })
    }

    pub fn sites(&self) -> usize {
        2 * self.half_size
    }

    pub fn dim(&self) -> usize {
        1 << self.sites()
    }

    /// -i eta when eta is purely imaginary.
    pub fn gamma(&self) -> Option<f64> {
        is_imag(self.eta).then_some(self.eta.im)
    }

    /// (a real and eta imaginary) or (a imaginary and eta real).
    pub fn is_hermitian_regime(&self) -> bool {
        (is_real(self.a) && is_imag(self.eta)) || (is_imag(self.a) && is_real(self.eta))
    }

    /// a real and eta imaginary, where root sets are closed under conjugation.
    pub fn is_real_a_regime(&self) -> bool {
        is_real(self.a) && is_imag(self.eta)
    }

    pub(crate) fn check_size(&self) -> Result<()> {
        if self.sites() > MAX_SITES {
            return Err(Error::SizeLimit {
                dim: self.dim(),
                cap: 1 << MAX_SITES,
            });
        }
        Ok(())
    }

    pub fn couplings(&self) -> CouplingConstants {
        CouplingConstants::new(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants {
    pub j1x: C64,
    pub j1y: C64,
    pub j1z: C64,
    pub j2: C64,
    pub j3x: C64,
    pub j3y: C64,
    pub j3z: C64,
    pub e0: C64,
    pub phi2a: C64,
}

impl CouplingConstants {
    pub fn new(p: &ModelParams) -> Self {
        let (a, eta) = (p.a, p.eta);
        let i = C64::new(0.0, 1.0);
        let ch2a = (2.0 * a).cosh();
        let sh2a = (2.0 * a).sinh();
        let she = eta.sinh();
        let che = eta.cosh();
        let n = p.half_size as f64;
        Self {
            j1x: ch2a,
            j1y: ch2a,
            j1z: che,
            j2: -sh2a * sh2a * che / (2.0 * she * she),
            j3x: i * sh2a * che / (2.0 * she),
            j3y: i * sh2a * che / (2.0 * she),
            j3z: i * sh2a * ch2a / (2.0 * she),
            e0: -n * che * (ch2a * ch2a - (2.0 * eta).cosh()) / (she * she),
            phi2a: phi(2.0 * a, eta),
        }
    }
}

/// Bit of `site` (1-based, site 1 most significant) in basis index `idx`.
#[inline]
pub(crate) fn site_bit(idx: usize, site: usize, sites: usize) -> usize {
    (idx >> (sites - site)) & 1
}

#[inline]
pub(crate) fn site_mask(site: usize, sites: usize) -> usize {
    1 << (sites - site)
}
