//! Thermodynamic limit for real a and eta = i gamma: ground-state density and energy,
//! and the three excitation branches.

mod kernels;

pub use kernels::ThermoKernels;

use crate::bae::reduce;
use crate::error::{Error, Result};
use crate::linalg::{integrate, LineKind};
use kernels::{cosh_tanh_over_sinh, sech_ratio};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
const RESONANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoParams {
    pub a: f64,
    pub gamma: f64,
    pub quad_tol: f64,
}

impl ThermoParams {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        Self::with_tol(a, gamma, DEFAULT_QUAD_TOL)
    }

    pub fn with_tol(a: f64, gamma: f64, quad_tol: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Domain(format!("a must be finite, got {a}")));
        }
        if !(gamma > 0.0 && gamma < PI) {
            return Err(Error::Domain(format!(
                "gamma must lie in (0, pi), got {gamma}"
            )));
        }
        if !(quad_tol > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerance must be positive, got {quad_tol}"
            )));
        }
        Ok(Self { a, gamma, quad_tol })
    }

    pub fn kernels(&self) -> ThermoKernels {
        ThermoKernels::new(self.gamma)
    }

    /// (cosh 4a - cos 2 gamma) / sin gamma.
    fn energy_scale(&self) -> f64 {
        ((4.0 * self.a).cosh() - (2.0 * self.gamma).cos()) / self.gamma.sin()
    }
}

fn full_line(f: impl FnMut(f64) -> f64, tol: f64) -> Result<f64> {
    Ok(integrate(f, LineKind::Full, tol)?.value)
}

/// rho + rho^h of the ground state; holes sit at infinity, so at finite z this is the root density.
/// The closed form is positive and normalized only for gamma < 2 pi / 3.
pub fn ground_density(z: f64, t: &ThermoParams) -> f64 {
    let g = t.gamma;
    let x = PI / (PI - g);
    let c = -(x * g).cos();
    let term = |s: f64| sech_ratio(x, s, c);
    (0.5 * x * g).sin() / (PI - g) * (term(z + t.a) + term(z - t.a))
}

/// Ground-state energy per site.
pub fn ground_energy_density(t: &ThermoParams) -> Result<f64> {
    let (a, g) = (t.a, t.gamma);
    let integral = full_line(
        |tau| (2.0 * a * tau).cos().powi(2) * cosh_tanh_over_sinh(PI - 2.0 * g, PI - g, tau),
        t.quad_tol,
    )?;
    let pref = ((2.0 * g).cos() - (4.0 * a).cosh()) / g.sin();
    let constant = g.cos() * ((2.0 * a).cosh().powi(2) - (2.0 * g).cos()) / (2.0 * g.sin().powi(2));
    Ok(pref * integral + constant)
}

/// Ground-state energy per site of -sum (xx + yy + cos(gamma) zz), from the single-kernel integral
/// at the sublattice-rotated anisotropy pi - gamma.
pub fn xxz_ground_energy_density(gamma: f64, tol: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::Domain(format!(
            "gamma must lie in (0, pi), got {gamma}"
        )));
    }
    let mu = PI - gamma;
    let integral = full_line(
        |x| {
            let s = x.abs();
            if s < 1e-8 {
                return (PI - mu) / PI;
            }
            if s < 5.0 {
                return ((PI - mu) * s).sinh() / ((PI * s).sinh() * (mu * s).cosh());
            }
            let e = |c: f64| (-2.0 * c * s).exp();
            2.0 * e(mu) * (1.0 - e(PI - mu)) / ((1.0 - e(PI)) * (1.0 + e(mu)))
        },
        tol,
    )?;
    Ok(mu.cos() - 2.0 * mu.sin() * integral)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ExcitationKind {
    I,
    II,
    III { n: usize },
}

impl ExcitationKind {
    pub fn string_length(&self) -> Option<usize> {
        match self {
            Self::III { n } => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for ExcitationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::I => write!(f, "I"),
            Self::II => write!(f, "II"),
            Self::III { .. } => write!(f, "III"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    pub delta_e: f64,
    /// Quasi-momentum in (-pi, pi].
    pub k: f64,
    /// Imaginary part left over in the momentum sum before reduction.
    pub k_imaginary: f64,
}

fn log_phase(a: f64, z: f64, g: f64) -> C64 {
    let h = C64::new(0.0, 0.5 * g);
    ((a + z - h).sinh() / (a - z - h).sinh()).ln()
}

/// (2i / (pi - gamma)) * integral of kernel(z - lambda) * log_phase(z) dz.
fn momentum_integral(kernel: impl Fn(f64) -> f64, lambda: f64, t: &ThermoParams) -> Result<C64> {
    let (a, g) = (t.a, t.gamma);
    let re = full_line(|s| kernel(s) * log_phase(a, lambda + s, g).re, t.quad_tol)?;
    let im = full_line(|s| kernel(s) * log_phase(a, lambda + s, g).im, t.quad_tol)?;
    Ok(C64::new(0.0, 2.0 / (PI - g)) * C64::new(re, im))
}

fn finish(delta_e: f64, k: C64) -> Excitation {
    Excitation {
        delta_e,
        k: reduce(k.re),
        k_imaginary: k.im,
    }
}

fn sh(re: f64, im: f64) -> C64 {
    C64::new(re, im).sinh()
}

/// One z root at lambda - i pi/2 with the w pair lambda +- i (pi/gamma - 1) gamma/2.
pub fn excitation1(lambda: f64, t: &ThermoParams) -> Result<Excitation> {
    let (a, g) = (t.a, t.gamma);
    let scale = t.energy_scale();
    let integral = full_line(
        |tau| {
            (2.0 * a * tau).cos() * (2.0 * lambda * tau).cos() * cosh_tanh_over_sinh(g, PI - g, tau)
        },
        t.quad_tol,
    )?;
    let bracket = g.sin() / ((2.0 * lambda + 2.0 * a).cosh() + g.cos())
        + g.sin() / ((2.0 * lambda - 2.0 * a).cosh() + g.cos());
    let delta_e = scale * integral + 0.5 * scale * bracket;

    let x = PI / (PI - g);
    let (cn, cd) = ((0.5 * x * g).cos(), (x * g).cos());
    let cont = momentum_integral(|s| cn * sech_ratio(x, s, cd), lambda, t)?;
    let disc = C64::new(0.0, -1.0)
        * (sh(a + lambda, -0.5 * PI - 0.5 * g) / sh(a - lambda, 0.5 * PI - 0.5 * g)).ln();
    Ok(finish(delta_e, cont + disc))
}

/// z pair lambda +- i gamma with the w pair lambda +- 3 i gamma / 2; needs gamma < 2 pi / 3.
pub fn excitation2(lambda: f64, t: &ThermoParams) -> Result<Excitation> {
    let (a, g) = (t.a, t.gamma);
    if g >= 2.0 * PI / 3.0 {
        return Err(Error::Domain(format!(
            "type II needs gamma < 2 pi/3 so that cosh((pi - 3 gamma) tau)/sinh(pi tau) decays; got {g}"
        )));
    }
    let scale = t.energy_scale();
    let integral = full_line(
        |tau| {
            (2.0 * a * tau).cos()
                * (2.0 * lambda * tau).cos()
                * cosh_tanh_over_sinh(PI - 3.0 * g, PI - g, tau)
        },
        t.quad_tol,
    )?;
    let (cp, cm) = (
        (2.0 * lambda + 2.0 * a).cosh(),
        (2.0 * lambda - 2.0 * a).cosh(),
    );
    let bracket = 2.0 * g.sin() / (cp - g.cos()) + 2.0 * g.sin() / (cm - g.cos())
        - (3.0 * g).sin() / (cp - (3.0 * g).cos())
        - (3.0 * g).sin() / (cm - (3.0 * g).cos());
    let delta_e = scale * integral + 0.5 * scale * bracket;

    let x = PI / (PI - g);
    let y = PI - 3.0 * g;
    let (cn, cd) = ((0.5 * x * y).cos(), (x * y).cos());
    let cont = momentum_integral(|s| cn * sech_ratio(x, s, cd), lambda, t)?;
    let num = sh(a + lambda, -0.5 * g) * sh(a - lambda, 0.5 * g) * sh(a - lambda, -1.5 * g);
    let den = sh(a - lambda, -0.5 * g) * sh(a + lambda, 0.5 * g) * sh(a + lambda, -1.5 * g);
    let disc = C64::new(0.0, 1.0) * (num / den).ln();
    Ok(finish(delta_e, cont + disc))
}

/// z pair lambda +- i n gamma / 2 (n >= 3) with w pairs at heights (n -+ 1) gamma / 2.
pub fn excitation3(lambda: f64, n: usize, t: &ThermoParams) -> Result<Excitation> {
    if n < 3 {
        return Err(Error::Domain(format!("type III needs n >= 3, got {n}")));
    }
    let (a, g) = (t.a, t.gamma);
    let k = t.kernels();
    let (ylo, yhi) = (k.y_n(n - 1), k.y_n(n + 1));
    let scale = t.energy_scale();
    let integral = full_line(
        |tau| {
            (2.0 * a * tau).cos()
                * (2.0 * lambda * tau).cos()
                * (cosh_tanh_over_sinh(ylo, PI - g, tau) + cosh_tanh_over_sinh(yhi, PI - g, tau))
        },
        t.quad_tol,
    )?;
    let (cp, cm) = (
        (2.0 * lambda + 2.0 * a).cosh(),
        (2.0 * lambda - 2.0 * a).cosh(),
    );
    let term = |m: usize, c: f64| -> Result<f64> {
        let mg = m as f64 * g;
        let d = c - mg.cos();
        if d.abs() < RESONANCE {
            return Err(Error::Pole(format!(
                "cosh(2 lambda +- 2a) = cos({m} gamma) at lambda = {lambda}"
            )));
        }
        Ok(mg.sin() / d)
    };
    let bracket = term(n - 1, cp)? + term(n - 1, cm)? - term(n + 1, cp)? - term(n + 1, cm)?;
    let delta_e = scale * integral + 0.5 * scale * bracket;

    let x = k.x();
    let mut parts = Vec::with_capacity(2);
    for y in [yhi, ylo] {
        let cd = (x * y).cos();
        if (1.0 + cd).abs() < RESONANCE {
            return Err(Error::Pole(format!(
                "momentum kernel resonant at x y = pi (y = {y})"
            )));
        }
        parts.push(((0.5 * x * y).cos(), cd));
    }
    let cont = momentum_integral(
        |s| {
            parts
                .iter()
                .map(|&(cn, cd)| cn * sech_ratio(x, s, cd))
                .sum()
        },
        lambda,
        t,
    )?;
    let (hp, hm) = (0.5 * (n - 1) as f64 * g, 0.5 * (n + 1) as f64 * g);
    let num = sh(a + lambda, hp) * sh(a + lambda, -hm);
    let den = sh(a - lambda, hp) * sh(a - lambda, -hm);
    let disc = C64::new(0.0, -1.0) * (num / den).ln();
    Ok(finish(delta_e, cont + disc))
}

pub fn excitation(kind: ExcitationKind, lambda: f64, t: &ThermoParams) -> Result<Excitation> {
    match kind {
        ExcitationKind::I => excitation1(lambda, t),
        ExcitationKind::II => excitation2(lambda, t),
        ExcitationKind::III { n } => excitation3(lambda, n, t),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    pub kind: ExcitationKind,
    pub lambda: f64,
    pub delta_e: f64,
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub lambda: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub kind: ExcitationKind,
    pub params: ThermoParams,
    /// Sorted by k.
    pub samples: Vec<DispersionSample>,
    pub failures: Vec<SampleFailure>,
}

/// Evaluates a branch on a lambda grid; failing points are collected instead of aborting.
pub fn dispersion_curve(
    kind: ExcitationKind,
    t: &ThermoParams,
    lambda_grid: &[f64],
) -> DispersionCurve {
    let results: Vec<(f64, Result<Excitation>)> = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let r = if lambda.is_finite() {
                excitation(kind, lambda, t)
            } else {
                Err(Error::Domain(format!("non-finite lambda {lambda}")))
            };
            (lambda, r)
        })
        .collect();
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (lambda, r) in results {
        match r {
            Ok(e) => samples.push(DispersionSample {
                kind,
                lambda,
                delta_e: e.delta_e,
                k: e.k,
            }),
            Err(e) => failures.push(SampleFailure {
                lambda,
                message: e.to_string(),
            }),
        }
    }
    samples.sort_by(|p, q| p.k.total_cmp(&q.k).then(p.lambda.total_cmp(&q.lambda)));
    DispersionCurve {
        kind,
        params: *t,
        samples,
        failures,
    }
}

/// Uniform grid lo, lo + step, ..., up to hi inclusive (within half a step).
pub fn linear_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::Domain(format!("bad grid {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 0.5).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::Domain(format!(
            "grid of {count} points is too large"
        )));
    }
    Ok((0..count).map(|k| lo + step * k as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{hamiltonian_direct, ModelParams};
    use crate::linalg::eigenvalues_hermitian;
    use proptest::prelude::*;

    fn tp(a: f64, g: f64) -> ThermoParams {
        ThermoParams::new(a, g).unwrap()
    }

    /// Positive lambda at which the branch momentum equals k_target, by bisection on a decreasing k.
    fn lambda_at_momentum(kind: ExcitationKind, t: &ThermoParams, k_target: f64) -> f64 {
        let (mut lo, mut hi) = (0.5, 40.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if excitation(kind, mid, t).unwrap().k > k_target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn domain_rules() {
        assert!(ThermoParams::new(0.2, 0.0).is_err());
        assert!(ThermoParams::new(0.2, PI).is_err());
        assert!(ThermoParams::new(f64::NAN, 0.5).is_err());
        assert!(matches!(
            excitation2(0.1, &tp(0.2, 2.2)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            excitation3(0.1, 2, &tp(0.2, 0.6)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn density_normalized() {
        for (a, g) in [(0.0, 0.6), (0.3, 0.6), (0.8, 0.2), (0.2, 2.0)] {
            let t = tp(a, g);
            let total = integrate(|z| ground_density(z, &t), LineKind::Full, 1e-12)
                .unwrap()
                .value;
            assert!((total - 1.0).abs() < 1e-8, "a={a} g={g}: {total}");
        }
    }

    #[test]
    fn density_at_zero_a_is_doubled_single_term() {
        let g = 0.7;
        let x = PI / (PI - g);
        let single = |z: f64| {
            (0.5 * x * g).sin() / (PI - g) * (x * z).cosh() / ((2.0 * x * z).cosh() - (x * g).cos())
        };
        for z in [-2.0, -0.3, 0.0, 0.4, 3.0] {
            assert!((ground_density(z, &tp(0.0, g)) - 2.0 * single(z)).abs() < 1e-15);
        }
    }

    #[test]
    fn energy_density_matches_xxz_at_zero_a() {
        for g in [0.2, 0.6, 1.0, 1.7, 2.6] {
            let e = ground_energy_density(&tp(0.0, g)).unwrap();
            let oracle = xxz_ground_energy_density(g, 1e-12).unwrap();
            assert!((e - oracle).abs() < 1e-8, "g={g}: {e} vs {oracle}");
        }
    }

    #[test]
    fn xxz_oracle_close_to_ten_sites() {
        let g = 0.6;
        let p = ModelParams::new(5, C64::new(0.0, 0.0), C64::new(0.0, g)).unwrap();
        let e10 = eigenvalues_hermitian(&hamiltonian_direct(&p).unwrap()).unwrap()[0] / 10.0;
        let oracle = xxz_ground_energy_density(g, 1e-12).unwrap();
        assert!((e10 - oracle).abs() < 2e-2, "{e10} vs {oracle}");
    }

    #[test]
    fn half_line_doubled_equals_full_line() {
        let (a, g) = (0.35, 0.9);
        let f = |tau: f64| {
            (2.0 * a * tau).cos().powi(2) * cosh_tanh_over_sinh(PI - 2.0 * g, PI - g, tau)
        };
        let full = integrate(f, LineKind::Full, 1e-12).unwrap().value;
        let half = integrate(f, LineKind::Half, 1e-12).unwrap().value;
        assert!((full - 2.0 * half).abs() < 1e-10);
    }

    #[test]
    fn energy_density_against_small_chains() {
        let (a, g) = (0.2, 0.6);
        let per_site = |half: usize| {
            let p = ModelParams::new(half, C64::new(a, 0.0), C64::new(0.0, g)).unwrap();
            eigenvalues_hermitian(&hamiltonian_direct(&p).unwrap()).unwrap()[0] / (2 * half) as f64
        };
        let (e4, e5) = (per_site(4), per_site(5));
        // Leading finite-size correction ~ 1/N^2.
        let extrapolated = (25.0 * e5 - 16.0 * e4) / 9.0;
        let eg = ground_energy_density(&tp(a, g)).unwrap();
        assert!((eg - extrapolated).abs() < 1e-2, "{eg} vs {extrapolated}");
        assert!(eg < e5 && e5 < e4);
    }

    #[test]
    fn type_one_decays_and_is_linear_at_small_momentum() {
        let t = tp(0.0, 0.6);
        for lambda in [-30.0, 30.0] {
            assert!(excitation1(lambda, &t).unwrap().delta_e < 1e-6);
        }
        let t = tp(0.6, 0.6);
        let slope = |k: f64| {
            let l = lambda_at_momentum(ExcitationKind::I, &t, k);
            let e = excitation1(l, &t).unwrap();
            assert!((e.k - k).abs() < 1e-9);
            e.delta_e / e.k.abs()
        };
        let (s1, s2) = (slope(0.05), slope(0.1));
        assert!((s1 / s2 - 1.0).abs() < 0.05, "{s1} vs {s2}");
    }

    #[test]
    fn momentum_is_real() {
        let t = tp(0.3, 0.6);
        for kind in [
            ExcitationKind::I,
            ExcitationKind::II,
            ExcitationKind::III { n: 3 },
        ] {
            for lambda in [-1.3, 0.2, 2.0] {
                let e = excitation(kind, lambda, &t).unwrap();
                assert!(
                    e.k_imaginary.abs() < 1e-8,
                    "{kind:?} {lambda}: {}",
                    e.k_imaginary
                );
            }
        }
    }

    #[test]
    fn type_two_even_in_a() {
        let e1 = excitation2(0.2, &tp(0.4, 0.6)).unwrap().delta_e;
        let e2 = excitation2(0.2, &tp(-0.4, 0.6)).unwrap().delta_e;
        assert!((e1 - e2).abs() < 1e-9);
    }

    #[test]
    fn type_three_wrapped_integrand_decays() {
        let t = tp(0.6, 0.8);
        let k = t.kernels();
        let (ylo, yhi) = (k.y_n(4), k.y_n(6));
        let c = PI - ylo.abs().max(yhi.abs());
        assert!(c > 0.0);
        for tau in [5.0, 10.0, 20.0, 40.0] {
            let v = k.f_tau(5, tau) * (tau * (PI - 0.8)).tanh() / (PI * tau).sinh();
            assert!(v.abs() < 3.0 * (-c * tau).exp(), "tau {tau}: {v}");
        }
        assert!(excitation3(0.3, 5, &t).unwrap().delta_e.is_finite());
    }

    #[test]
    fn type_three_pole_detected() {
        // y_4 = pi - gamma at gamma = 2 pi / 3, so x y_4 = pi.
        let t = tp(0.3, 2.0 * PI / 3.0);
        assert!(matches!(excitation3(0.7, 3, &t), Err(Error::Pole(_))));
    }

    #[test]
    fn single_point_curve_matches_direct_call() {
        let t = tp(0.2, 0.6);
        let c = dispersion_curve(ExcitationKind::I, &t, &[0.7]);
        let e = excitation1(0.7, &t).unwrap();
        assert_eq!(c.samples.len(), 1);
        assert_eq!(c.samples[0].delta_e, e.delta_e);
        assert_eq!(c.samples[0].k, e.k);
    }

    #[test]
    fn curve_sorted_and_failures_collected() {
        let t = tp(0.3, 0.6);
        let grid = [-1.0, f64::INFINITY, f64::NAN, 0.8, 2.0];
        let c = dispersion_curve(ExcitationKind::III { n: 3 }, &t, &grid);
        assert_eq!(c.failures.len(), 2);
        assert_eq!(c.samples.len(), 3);
        assert!(c.samples.windows(2).all(|w| w[0].k <= w[1].k));
    }

    #[test]
    fn peaks_leave_zone_boundary_for_large_a() {
        let t = tp(0.8, 0.6);
        let grid = linear_grid(-6.0, 6.0, 0.01).unwrap();
        let c = dispersion_curve(ExcitationKind::I, &t, &grid);
        let best = c
            .samples
            .iter()
            .max_by(|p, q| p.delta_e.total_cmp(&q.delta_e))
            .unwrap();
        assert!(best.k.abs() < PI - 0.1, "peak at k = {}", best.k);
    }

    #[test]
    fn grid_construction() {
        let g = linear_grid(0.0, 1.0, 0.05).unwrap();
        assert_eq!(g.len(), 21);
        assert!((g[20] - 1.0).abs() < 1e-12);
        assert!(linear_grid(1.0, 0.0, 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn density_even(z in -5.0f64..5.0, a in -1.0f64..1.0, g in 0.05f64..2.0) {
            let t = tp(a, g);
            prop_assert!((ground_density(z, &t) - ground_density(-z, &t)).abs() < 1e-14);
            prop_assert!(ground_density(z, &t) > 0.0);
        }

        #[test]
        fn energy_density_even_in_a(a in 0.0f64..1.2, g in 0.1f64..3.0) {
            let e1 = ground_energy_density(&tp(a, g)).unwrap();
            let e2 = ground_energy_density(&tp(-a, g)).unwrap();
            prop_assert!((e1 - e2).abs() < 1e-10);
        }

        #[test]
        fn branches_even_in_lambda_and_odd_in_momentum(
            lambda in 0.05f64..4.0, a in 0.0f64..0.9, g in 0.15f64..0.65, n in 3usize..6,
        ) {
            let t = tp(a, g);
            for kind in [ExcitationKind::I, ExcitationKind::II, ExcitationKind::III { n }] {
                let p = excitation(kind, lambda, &t).unwrap();
                let m = excitation(kind, -lambda, &t).unwrap();
                prop_assert!((p.delta_e - m.delta_e).abs() < 1e-9);
                prop_assert!(reduce(p.k + m.k).abs() < 1e-8 || (reduce(p.k + m.k).abs() - PI).abs() < 1e-8);
                prop_assert!(p.delta_e >= -1e-9);
            }
        }
    }
}
