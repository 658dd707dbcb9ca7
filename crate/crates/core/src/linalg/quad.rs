#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineKind {
    /// Integral over the real line.
    Full,
    /// Integral over [0, inf).
    Half,
}

#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub cutoff: f64,
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    let value = rk * h;
    let diff = ((rk - rg) * h).abs();
    (value, diff.max(50.0 * f64::EPSILON * value.abs()))
}

/// Globally adaptive G7K15 on [a, b] split into `pieces` initial panels.
pub fn integrate_interval(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    pieces: usize,
    tol: f64,
) -> Result<Integral> {
    let pieces = pieces.max(1);
    let w = (b - a) / pieces as f64;
    let mut panels: Vec<(f64, f64, f64, f64)> = (0..pieces)
        .map(|k| {
            let (lo, hi) = (a + w * k as f64, a + w * (k + 1) as f64);
            let (v, e) = gk15(&mut f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    for _ in 0..4000 {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature {
                error: f64::NAN,
                tol,
            });
        }
        if err <= tol * total.abs().max(1.0) {
            return Ok(Integral {
                value: total,
                error: err,
                cutoff: b,
            });
        }
        let (idx, _) =
            panels.iter().enumerate().fold(
                (0, -1.0),
                |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc },
            );
        let (lo, hi, _, _) = panels[idx];
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        panels[idx] = (lo, mid, v1, e1);
        panels.push((mid, hi, v2, e2));
    }
    let error: f64 = panels.iter().map(|p| p.3).sum();
    Err(Error::Quadrature { error, tol })
}

/// Integral over [-t, t] (full) or [0, t] (half) at a fixed cutoff.
pub fn integrate_truncated(
    f: impl FnMut(f64) -> f64,
    kind: LineKind,
    cutoff: f64,
    tol: f64,
) -> Result<Integral> {
    let pieces = (cutoff.ceil() as usize).clamp(4, 512);
    match kind {
        LineKind::Full => integrate_interval(f, -cutoff, cutoff, 2 * pieces, tol),
        LineKind::Half => integrate_interval(f, 0.0, cutoff, pieces, tol),
    }
}

/// Integral of an exponentially decaying function over the real line or the half line.
pub fn integrate(mut f: impl FnMut(f64) -> f64, kind: LineKind, tol: f64) -> Result<Integral> {
    let tail = |f: &mut dyn FnMut(f64) -> f64, t: f64| -> f64 {
        match kind {
            LineKind::Full => f(t).abs().max(f(-t).abs()),
            LineKind::Half => f(t).abs(),
        }
    };
    let mut t = 8.0;
    let mut prev = tail(&mut f, t);
    while !(prev < 1e-15) {
        let next_t = 2.0 * t;
        let next = tail(&mut f, next_t);
        if !next.is_finite() || (next_t >= 64.0 && !(next < prev)) || next_t > 8192.0 {
            return Err(Error::Divergence {
                cutoff: next_t,
                value: next,
            });
        }
        t = next_t;
        prev = next;
    }
    integrate_truncated(f, kind, t, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian() {
        let r = integrate(|x| (-x * x).exp(), LineKind::Full, 1e-10).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn sech() {
        let r = integrate(|x| 1.0 / x.cosh(), LineKind::Full, 1e-10).unwrap();
        assert!((r.value - PI).abs() < 1e-10);
        assert!(r.error < 1e-10 * PI);
    }

    #[test]
    fn half_line_doubles() {
        let f = |x: f64| (-x.abs()).exp() * (3.0 * x).cos();
        let full = integrate(f, LineKind::Full, 1e-11).unwrap().value;
        let half = integrate(f, LineKind::Half, 1e-11).unwrap().value;
        assert!((full - 2.0 * half).abs() < 1e-10);
        assert!((full - 2.0 / 10.0).abs() < 1e-10);
    }

    #[test]
    fn non_decaying_rejected() {
        assert!(matches!(
            integrate(|x| 1.0 / (1.0 + x.abs()), LineKind::Full, 1e-10),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x.sin() * (-x * x / 3.0).exp()).powi(2);
        let a = integrate(f, LineKind::Full, 1e-10).unwrap().value;
        let b = integrate(f, LineKind::Full, 1e-10).unwrap().value;
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
