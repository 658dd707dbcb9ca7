use crate::error::{Error, Result};
use crate::lattice::ModelParams;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const POLE: f64 = 1e-12;
const SNAP: f64 = 1e-6;

fn check_len(z: &[C64], p: &ModelParams) -> Result<()> {
    if z.len() != p.sites() - 1 {
        return Err(Error::Shape(format!(
            "expected {} z roots, got {}",
            p.sites() - 1,
            z.len()
        )));
    }
    Ok(())
}

fn sinh_checked(x: C64, what: &str) -> Result<C64> {
    let s = x.sinh();
    if s.norm() < POLE {
        return Err(Error::Pole(format!("{what} at argument {x}")));
    }
    Ok(s)
}

pub fn energy_from_roots_complex(z: &[C64], p: &ModelParams) -> Result<C64> {
    check_len(z, p)?;
    let c = p.couplings();
    let (a, half) = (p.a, p.eta * 0.5);
    let mut sum = C64::new(0.0, 0.0);
    for &zj in z {
        let (x1, x2) = (a - zj + half, a + zj - half);
        sum += x1.cosh() / sinh_checked(x1, "coth")? - x2.cosh() / sinh_checked(x2, "coth")?;
    }
    Ok(-c.phi2a * p.eta.sinh() * sum + c.e0)
}

/// Energy of a root set; in the hermitian regimes the imaginary residue must stay below 1e-8.
pub fn energy_from_roots(z: &[C64], p: &ModelParams) -> Result<f64> {
    let e = energy_from_roots_complex(z, p)?;
    if p.is_hermitian_regime() && e.im.abs() > 1e-8 * e.re.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "energy has imaginary residue {:.3e}",
            e.im
        )));
    }
    Ok(e.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    /// Sum of per-term principal arguments reduced to (-pi, pi].
    pub raw: f64,
    /// Nearest point pi l / N, reduced to (-pi, pi].
    pub grid: f64,
    pub snap_residual: f64,
    /// Imaginary part of the summed logarithm (zero for physical states).
    pub imaginary: f64,
}

pub(crate) fn reduce(x: f64) -> f64 {
    let mut r = x - 2.0 * PI * (x / (2.0 * PI)).round();
    if r <= -PI {
        r += 2.0 * PI;
    }
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

pub fn momentum_raw(z: &[C64], p: &ModelParams) -> Result<Momentum> {
    check_len(z, p)?;
    let (a, half) = (p.a, p.eta * 0.5);
    let mut sum = C64::new(0.0, 0.0);
    for &zj in z {
        let num = sinh_checked(a + zj - half, "momentum log")?;
        let den = sinh_checked(a - zj - half, "momentum log")?;
        sum += (num / den).ln();
    }
    let k = C64::new(0.0, -1.0) * sum;
    let raw = reduce(k.re);
    let step = PI / p.half_size as f64;
    let l = (raw / step).round();
    Ok(Momentum {
        raw,
        grid: reduce(l * step),
        snap_residual: (raw - l * step).abs(),
        imaginary: k.im,
    })
}

/// k in (-pi, pi], snapped to the grid pi l / N when within 1e-6.
pub fn momentum_from_roots(z: &[C64], p: &ModelParams) -> Result<f64> {
    let m = momentum_raw(z, p)?;
    Ok(if m.snap_residual < SNAP {
        m.grid
    } else {
        m.raw
    })
}

/// q = sinh^{2N-1}(eta) Lambda0 exp(-sum z) / 4.
pub fn charge_from_roots(z: &[C64], lambda0: Option<C64>, p: &ModelParams) -> Result<C64> {
    check_len(z, p)?;
    let l0 = lambda0.ok_or(Error::SignUnknown)?;
    let sz: C64 = z.iter().sum();
    Ok(0.25 * p.eta.sinh().powi(z.len() as i32) * l0 * (-sz).exp())
}
