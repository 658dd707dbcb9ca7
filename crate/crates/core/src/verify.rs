//! Integrability identity suite over one parameter point.

use crate::error::Result;
use crate::lattice::{
    charge_operator, check_crossing, check_pt, check_quasi_periodicity, check_special_points,
    check_unitarity, check_z2, hamiltonian_direct, hamiltonian_from_transfer, phi, r_matrix,
    shift_operator, transfer_matrix, ybe_residual, Direction, ModelParams,
};
use crate::linalg::ComplexMatrix;
use crate::spectrum::{eigenvalue_functions, joint_eigenbasis, tw_identity_residual};
use num_complex::Complex64 as C64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random spectral points per check.
    pub points: usize,
    /// Flips the sign of R[3][3] inside the Yang-Baxter check (negative control).
    pub inject_sign_error: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            points: 3,
            inject_sign_error: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ModelParams,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn record(checks: &mut Vec<CheckResult>, name: &str, residual: f64, tolerance: f64) {
    checks.push(CheckResult {
        name: name.to_string(),
        residual,
        tolerance,
        passed: residual.is_finite() && residual < tolerance,
    });
}

/// Commutator size relative to the operand norms.
fn relative_commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    let scale = (x.frobenius() * y.frobenius()).max(f64::MIN_POSITIVE);
    Ok(x.commutator(y)?.frobenius() / scale)
}

fn relative_diff(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    x.max_abs_diff(y) / x.max_abs().max(y.max_abs()).max(1.0)
}

/// Runs every identity at the given point; the per-state t-W check needs a hermitian regime.
pub fn run_suite(p: &ModelParams, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut draw = || C64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7));
    let points: Vec<(C64, C64, C64)> = (0..opts.points.max(1))
        .map(|_| (draw(), draw(), draw()))
        .collect();
    let eta = p.eta;
    let mut checks = Vec::new();

    let flip = opts.inject_sign_error;
    let r_used = |u: C64| -> Result<ComplexMatrix> {
        let mut r = r_matrix(u, eta)?;
        if flip {
            r[(3, 3)] = -r[(3, 3)];
        }
        Ok(r)
    };
    let mut worst = [0.0f64; 6];
    for &(u, v, w) in &points {
        worst[0] = worst[0].max(ybe_residual(r_used, u, v, w)?);
        worst[1] = worst[1].max(check_unitarity(u, eta)?);
        worst[2] = worst[2].max(check_crossing(u, eta)?);
        worst[3] = worst[3].max(check_pt(u, eta)?);
        worst[4] = worst[4].max(check_z2(u, eta)?);
        worst[5] = worst[5].max(check_quasi_periodicity(u, eta)?);
    }
    record(&mut checks, "yang-baxter", worst[0], 1e-10);
    let phi0 = (phi(C64::new(0.0, 0.0), eta) - 1.0).norm();
    record(&mut checks, "unitarity", worst[1].max(phi0), 1e-10);
    record(&mut checks, "crossing", worst[2], 1e-10);
    record(&mut checks, "pt-symmetry", worst[3], 1e-12);
    record(&mut checks, "z2-symmetry", worst[4], 1e-10);
    record(&mut checks, "quasi-periodicity", worst[5], 1e-10);
    let (fusion, initial) = check_special_points(eta)?;
    record(&mut checks, "fusion-point", fusion.max(initial), 1e-12);

    let mut comm = 0.0f64;
    let mut cross = 0.0f64;
    let mut charge = 0.0f64;
    let q = charge_operator(p)?;
    for &(u, v, _) in &points {
        let tu = transfer_matrix(u, p, Direction::Forward)?;
        let tv = transfer_matrix(v, p, Direction::Forward)?;
        comm = comm.max(relative_commutator(&tu, &tv)?);
        let hat = transfer_matrix(-u - eta, p, Direction::Reversed)?;
        cross = cross.max(relative_diff(&tu, &hat.scale(C64::new(-1.0, 0.0))));
        charge = charge.max(relative_commutator(&q, &tu)?);
    }
    record(&mut checks, "transfer-commute", comm, 1e-10);
    record(&mut checks, "transfer-reversed", cross, 1e-10);

    let hd = hamiltonian_direct(p)?;
    let ht = hamiltonian_from_transfer(p)?;
    record(
        &mut checks,
        "hamiltonian-equivalence",
        relative_diff(&hd, &ht),
        1e-8,
    );

    let u = shift_operator(p)?;
    let power = u.powi(p.sites() as u32)?;
    record(
        &mut checks,
        "shift-period",
        power.max_abs_diff(&ComplexMatrix::identity(p.dim())),
        1e-9,
    );
    record(&mut checks, "charge-commute", charge, 1e-9);

    if p.is_hermitian_regime() {
        let spec = joint_eigenbasis(p, opts.seed)?;
        let fs = eigenvalue_functions(&spec)?;
        let us: Vec<C64> = points.iter().flat_map(|&(x, y, z)| [x, y, z]).collect();
        let per_state = tw_identity_residual(&spec, &fs, &us)?;
        let worst = per_state.iter().cloned().fold(0.0f64, f64::max);
        record(&mut checks, "t-w-identity", worst, 1e-8);
    }

    Ok(VerifyReport { params: *p, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn both_regimes_pass() {
        for p in [
            ModelParams::new(2, c(0.2, 0.0), c(0.0, 0.6)).unwrap(),
            ModelParams::new(2, c(0.0, 0.2), c(0.6, 0.0)).unwrap(),
            ModelParams::new(3, c(0.15, 0.0), c(0.0, 0.45)).unwrap(),
        ] {
            let r = run_suite(&p, &VerifyOptions::default()).unwrap();
            assert!(r.all_passed(), "{:?}", r.failures());
            assert_eq!(r.checks.len(), 13);
        }
    }

    #[test]
    fn generic_complex_point_skips_state_check() {
        let p = ModelParams::new(2, c(0.3, 0.1), c(0.2, 0.5)).unwrap();
        let r = run_suite(&p, &VerifyOptions::default()).unwrap();
        assert!(r.all_passed(), "{:?}", r.failures());
        assert!(r.checks.iter().all(|c| c.name != "t-w-identity"));
    }

    #[test]
    fn injected_sign_error_breaks_yang_baxter_only() {
        let p = ModelParams::new(2, c(0.2, 0.0), c(0.0, 0.6)).unwrap();
        let opts = VerifyOptions {
            inject_sign_error: true,
            ..VerifyOptions::default()
        };
        let r = run_suite(&p, &opts).unwrap();
        let failed: Vec<_> = r.failures().iter().map(|c| c.name.clone()).collect();
        assert_eq!(failed, vec!["yang-baxter".to_string()]);
    }
}
