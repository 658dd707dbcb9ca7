use super::ExactSpectrum;
use crate::error::{Error, Result};
use crate::lattice::{transfer_matrix, Direction, ModelParams};
use crate::linalg::{canonical_strip, trig_fit, trig_roots, TrigPolynomial};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const MIN_D: f64 = 1e-6;
const TW_LIMIT: f64 = 1e-7;

/// d(u) = sinh^N(u+a) sinh^N(u-a) / sinh^{2N}(eta).
pub fn d_function(u: C64, p: &ModelParams) -> C64 {
    let n = p.half_size as i32;
    ((u + p.a).sinh() * (u - p.a).sinh() / (p.eta.sinh() * p.eta.sinh())).powi(n)
}

/// Lambda0 prod sinh(u - z + eta/2).
pub fn lambda_from_roots(u: C64, z: &[C64], lambda0: C64, eta: C64) -> C64 {
    z.iter()
        .fold(lambda0, |acc, zj| acc * (u - zj + eta * 0.5).sinh())
}

/// W0 sinh^{-2N}(eta) prod sinh(u - w).
pub fn w_from_roots(u: C64, w: &[C64], w0: C64, eta: C64) -> C64 {
    let s = eta.sinh().powi(-(w.len() as i32));
    w.iter().fold(w0 * s, |acc, wl| acc * (u - wl).sinh())
}

/// Nodes on a vertical line, equally spaced over one period; the fit matrix is then a scaled DFT.
pub fn sampling_nodes(p: &ModelParams) -> Vec<C64> {
    let k = p.sites() + 3;
    let ar = p.a.re.abs();
    let c = if (0.5 - ar).abs() < 0.2 {
        ar + 0.5
    } else {
        0.5
    };
    (0..k)
        .map(|j| C64::new(c, PI * (j as f64 + 0.5) / k as f64))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LambdaPart {
    pub poly: TrigPolynomial,
    pub z: Vec<C64>,
    pub lambda0: C64,
    pub fit_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WPart {
    pub poly: TrigPolynomial,
    pub w: Vec<C64>,
    pub w0: C64,
    pub fit_residual: f64,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ExtractionResiduals {
    pub lambda_fit: f64,
    pub w_fit: f64,
    /// t-W identity at the sampling nodes, relative.
    pub tw_identity: f64,
    /// Lambda(a) Lambda(a-eta) + d(a+eta) d(a-eta), relative.
    pub closure: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenvalueFunction {
    pub state: usize,
    pub level: usize,
    pub energy: f64,
    pub degeneracy: usize,
    pub z: Vec<C64>,
    pub lambda0: C64,
    pub lambda0_sq: C64,
    pub w: Vec<C64>,
    pub w0: C64,
    pub lambda_poly: TrigPolynomial,
    pub w_poly: TrigPolynomial,
    pub residuals: ExtractionResiduals,
}

fn lambda_part(nodes: &[C64], values: &[C64], p: &ModelParams) -> Result<LambdaPart> {
    let d = p.sites() - 1;
    let samples: Vec<(C64, C64)> = nodes.iter().copied().zip(values.iter().copied()).collect();
    let fit = trig_fit(&samples, d, -1)?;
    let half = p.eta * 0.5;
    let z: Vec<C64> = trig_roots(&fit.poly)?
        .into_iter()
        .map(|r| canonical_strip(r + half))
        .collect();
    let sum: C64 = z.iter().map(|zj| zj - half).sum();
    let lambda0 = fit.poly.leading() * 2f64.powi(d as i32) * sum.exp();
    Ok(LambdaPart {
        poly: fit.poly,
        z,
        lambda0,
        fit_residual: fit.residual,
    })
}

fn w_values(nodes: &[C64], lam: &[C64], lam_shift: &[C64], p: &ModelParams) -> Result<Vec<C64>> {
    nodes
        .iter()
        .zip(lam.iter().zip(lam_shift))
        .map(|(&u, (&l, &ls))| {
            let du = d_function(u, p);
            if du.norm() < MIN_D {
                return Err(Error::Extraction(format!(
                    "sampling node {u} is too close to a zero of d"
                )));
            }
            Ok((l * ls + d_function(u + p.eta, p) * d_function(u - p.eta, p)) / du)
        })
        .collect()
}

fn w_part(nodes: &[C64], values: &[C64], p: &ModelParams) -> Result<WPart> {
    let d = p.sites();
    let samples: Vec<(C64, C64)> = nodes.iter().copied().zip(values.iter().copied()).collect();
    let fit = trig_fit(&samples, d, 1)?;
    let mut w = trig_roots(&fit.poly)?;
    let sum: C64 = w.iter().sum();
    let mut w0 = fit.poly.leading() * p.eta.sinh().powi(d as i32) * 2f64.powi(d as i32) * sum.exp();
    // Prefer the representative with W0 = 1: move one root from Im = pi/2 to -pi/2.
    if (w0 + 1.0).norm() < 1e-6 {
        if let Some(k) = w
            .iter()
            .enumerate()
            .filter(|(_, x)| (x.im - PI / 2.0).abs() < 1e-6)
            .min_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .map(|(k, _)| k)
        {
            w[k] -= C64::new(0.0, PI);
            w0 = -w0;
        }
    }
    Ok(WPart {
        poly: fit.poly,
        w,
        w0,
        fit_residual: fit.residual,
    })
}

fn tw_relative(u: C64, l: C64, ls: C64, w: C64, p: &ModelParams) -> f64 {
    let lhs = l * ls;
    let dd = d_function(u + p.eta, p) * d_function(u - p.eta, p);
    let dw = d_function(u, p) * w;
    let scale = lhs
        .norm()
        .max(dd.norm())
        .max(dw.norm())
        .max(f64::MIN_POSITIVE);
    (lhs + dd - dw).norm() / scale
}

struct Samples {
    nodes: Vec<C64>,
    lam: Vec<Vec<C64>>,
    lam_shift: Vec<Vec<C64>>,
}

impl Samples {
    fn take(spec: &ExactSpectrum) -> Result<Self> {
        let p = &spec.params;
        let nodes = sampling_nodes(p);
        let mut lam = Vec::new();
        let mut lam_shift = Vec::new();
        for &u in &nodes {
            lam.push(spec.lambda_at(u)?);
            lam_shift.push(spec.lambda_at(u - p.eta)?);
        }
        Ok(Self {
            nodes,
            lam,
            lam_shift,
        })
    }

    fn column(rows: &[Vec<C64>], level: usize) -> Vec<C64> {
        rows.iter().map(|r| r[level]).collect()
    }
}

fn check_state(spec: &ExactSpectrum, state: usize) -> Result<()> {
    if state >= spec.state_count() {
        return Err(Error::Domain(format!(
            "state {state} out of range (0..{})",
            spec.state_count()
        )));
    }
    Ok(())
}

pub fn extract_lambda(spec: &ExactSpectrum, state: usize) -> Result<LambdaPart> {
    check_state(spec, state)?;
    let nodes = sampling_nodes(&spec.params);
    let vals = nodes
        .iter()
        .map(|&u| Ok(spec.lambda_at(u)?[state]))
        .collect::<Result<Vec<_>>>()?;
    lambda_part(&nodes, &vals, &spec.params)
}

pub fn extract_w(spec: &ExactSpectrum, state: usize, lambda: &LambdaPart) -> Result<WPart> {
    check_state(spec, state)?;
    let p = &spec.params;
    let nodes = sampling_nodes(p);
    let lam = nodes
        .iter()
        .map(|&u| Ok(spec.lambda_at(u)?[state]))
        .collect::<Result<Vec<_>>>()?;
    let shift: Vec<C64> = nodes.iter().map(|&u| lambda.poly.eval(u - p.eta)).collect();
    let vals = w_values(&nodes, &lam, &shift, p)?;
    w_part(&nodes, &vals, p)
}

fn assemble(
    spec: &ExactSpectrum,
    state: usize,
    s: &Samples,
    at_a: &[C64],
    at_a_shift: &[C64],
) -> Result<EigenvalueFunction> {
    let p = &spec.params;
    let lam = Samples::column(&s.lam, state);
    let lam_shift = Samples::column(&s.lam_shift, state);
    let lp = lambda_part(&s.nodes, &lam, p)?;
    let wv = w_values(&s.nodes, &lam, &lam_shift, p)?;
    let wp = w_part(&s.nodes, &wv, p)?;
    let tw = s
        .nodes
        .iter()
        .enumerate()
        .map(|(k, &u)| tw_relative(u, lam[k], lam_shift[k], wp.poly.eval(u), p))
        .fold(0.0, f64::max);
    if !(tw < TW_LIMIT) {
        return Err(Error::Extraction(format!(
            "t-W identity residual {tw:.3e} at state {state}"
        )));
    }
    let dd = d_function(p.a + p.eta, p) * d_function(p.a - p.eta, p);
    let closure = (at_a[state] * at_a_shift[state] + dd).norm() / dd.norm().max(f64::MIN_POSITIVE);
    let level = spec.state_level[state];
    let rec = &spec.records[level];
    Ok(EigenvalueFunction {
        state,
        level,
        energy: rec.energy,
        degeneracy: rec.degeneracy,
        lambda0_sq: lp.lambda0 * lp.lambda0,
        z: lp.z,
        lambda0: lp.lambda0,
        w: wp.w,
        w0: wp.w0,
        residuals: ExtractionResiduals {
            lambda_fit: lp.fit_residual,
            w_fit: wp.fit_residual,
            tw_identity: tw,
            closure,
        },
        lambda_poly: lp.poly,
        w_poly: wp.poly,
    })
}

/// Lambda and W data for every state, sharing the transfer-matrix samples.
pub fn eigenvalue_functions(spec: &ExactSpectrum) -> Result<Vec<EigenvalueFunction>> {
    let s = Samples::take(spec)?;
    let p = &spec.params;
    let at_a = spec.lambda_at(p.a)?;
    let at_a_shift = spec.lambda_at(p.a - p.eta)?;
    (0..spec.state_count())
        .map(|l| assemble(spec, l, &s, &at_a, &at_a_shift))
        .collect()
}

pub fn eigenvalue_function(spec: &ExactSpectrum, state: usize) -> Result<EigenvalueFunction> {
    check_state(spec, state)?;
    let s = Samples::take(spec)?;
    let p = &spec.params;
    let at_a = spec.lambda_at(p.a)?;
    let at_a_shift = spec.lambda_at(p.a - p.eta)?;
    assemble(spec, state, &s, &at_a, &at_a_shift)
}

/// Worst relative t-W residual per state at the given points, with Lambda from the transfer matrix
/// and W from the extracted roots.
pub fn tw_identity_residual(
    spec: &ExactSpectrum,
    functions: &[EigenvalueFunction],
    us: &[C64],
) -> Result<Vec<f64>> {
    let p = &spec.params;
    let mut worst = vec![0.0f64; functions.len()];
    for &u in us {
        let t1 = spec.diagonal_of(&transfer_matrix(u, p, Direction::Forward)?)?;
        let t2 = spec.diagonal_of(&transfer_matrix(u - p.eta, p, Direction::Forward)?)?;
        for (k, f) in functions.iter().enumerate() {
            let w = w_from_roots(u, &f.w, f.w0, p.eta);
            worst[k] = worst[k].max(tw_relative(u, t1[f.state], t2[f.state], w, p));
        }
    }
    Ok(worst)
}

/// |Lambda(a) Lambda(a-eta) + d(a+eta) d(a-eta)| / |d(a+eta) d(a-eta)| with Lambda rebuilt from roots.
pub fn closure_residual(z: &[C64], lambda0: C64, p: &ModelParams) -> f64 {
    let dd = d_function(p.a + p.eta, p) * d_function(p.a - p.eta, p);
    let l1 = lambda_from_roots(p.a, z, lambda0, p.eta);
    let l2 = lambda_from_roots(p.a - p.eta, z, lambda0, p.eta);
    (l1 * l2 + dd).norm() / dd.norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::strip_distance;
    use crate::spectrum::joint_eigenbasis;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn multiset_match(got: &[C64], want: &[C64], tol: f64) -> bool {
        let mut used = vec![false; got.len()];
        want.iter().all(|w| {
            if let Some(k) = (0..got.len()).find(|&k| !used[k] && strip_distance(got[k], *w) < tol)
            {
                used[k] = true;
                true
            } else {
                false
            }
        })
    }

    #[test]
    fn table_one_ground_roots() {
        let p = ModelParams::new(2, c(0.2, 0.0), c(0.0, 0.6)).unwrap();
        let s = joint_eigenbasis(&p, 0).unwrap();
        let f = eigenvalue_function(&s, 0).unwrap();
        assert!(multiset_match(
            &f.z,
            &[c(-0.3477, 0.0), c(0.0, 0.0), c(0.3477, 0.0)],
            5e-4
        ));
        assert!(multiset_match(
            &f.w,
            &[
                c(-1.2826, 0.0),
                c(-0.2473, 0.0),
                c(0.2473, 0.0),
                c(1.2826, 0.0)
            ],
            5e-4
        ));
        assert!((f.lambda0_sq - c(-399.7321, 0.0)).norm() < 1e-2);
        assert!((f.w0 - 1.0).norm() < 1e-8);
        assert!(f.residuals.closure < 1e-9);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn table_two_ground_roots() {
        let p = ModelParams::new(2, c(0.0, 0.2), c(0.6, 0.0)).unwrap();
        let s = joint_eigenbasis(&p, 0).unwrap();
        let f = eigenvalue_function(&s, 0).unwrap();
        assert!(multiset_match(
            &f.z,
            &[c(0.0, -0.3690), c(0.0, 0.0), c(0.0, 0.3690)],
            5e-4
        ));
        assert!(multiset_match(
            &f.w,
            &[
                c(-1.6145, -1.5708),
                c(0.0, -0.2869),
                c(0.0, 0.2869),
                c(1.6145, 1.5708)
            ],
            5e-4
        ));
        assert!((f.lambda0_sq - c(308.1505, 0.0)).norm() < 1e-2);
    }

    #[test]
    fn all_states_satisfy_tw_and_ba0() {
        let p = ModelParams::new(2, c(0.2, 0.0), c(0.0, 0.6)).unwrap();
        let s = joint_eigenbasis(&p, 0).unwrap();
        let fs = eigenvalue_functions(&s).unwrap();
        let us: Vec<C64> = (0..20)
            .map(|k| c(0.05 * k as f64 - 0.4, 0.13 * k as f64))
            .collect();
        for (f, r) in fs.iter().zip(tw_identity_residual(&s, &fs, &us).unwrap()) {
            assert!(r < 1e-8, "state {} residual {r}", f.state);
            assert_eq!(f.z.len(), 3);
            assert_eq!(f.w.len(), 4);
            let sw: C64 = f.w.iter().sum();
            assert!((f.w0 * sw.exp() - 1.0).norm() < 1e-8);
            assert!((f.w0 * (-sw).exp() - 1.0).norm() < 1e-8);
            assert!(closure_residual(&f.z, f.lambda0, &p) < 1e-9);
        }
    }

    #[test]
    fn rebuilt_lambda_matches_samples() {
        let p = ModelParams::new(2, c(0.2, 0.0), c(0.0, 0.6)).unwrap();
        let s = joint_eigenbasis(&p, 0).unwrap();
        let fs = eigenvalue_functions(&s).unwrap();
        let u = c(0.37, -0.21);
        let direct = s.lambda_at(u).unwrap();
        for f in &fs {
            let rebuilt = lambda_from_roots(u, &f.z, f.lambda0, p.eta);
            assert!((rebuilt - direct[f.state]).norm() < 1e-8 * direct[f.state].norm().max(1.0));
        }
    }

    #[test]
    fn nodes_avoid_inhomogeneities() {
        let p = ModelParams::new(3, c(0.55, 0.0), c(0.0, 0.6)).unwrap();
        for u in sampling_nodes(&p) {
            assert!(d_function(u, &p).norm() > 1e-6);
        }
    }
}
