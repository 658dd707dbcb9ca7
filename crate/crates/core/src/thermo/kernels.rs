use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Kernel functions of the logarithmic ground-state equations at anisotropy gamma.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermoKernels {
    pub gamma: f64,
}

impl ThermoKernels {
    pub fn new(gamma: f64) -> Self {
        Self { gamma }
    }

    /// sin(n g) / (pi (cosh 2x - cos n g)).
    pub fn a_n(&self, n: usize, x: f64) -> f64 {
        let ng = n as f64 * self.gamma;
        ng.sin() / (PI * ((2.0 * x).cosh() - ng.cos()))
    }

    /// sinh 2x / (pi (cosh 2x - cos n g)).
    pub fn b_n(&self, n: usize, x: f64) -> f64 {
        let ng = n as f64 * self.gamma;
        (2.0 * x).sinh() / (PI * ((2.0 * x).cosh() - ng.cos()))
    }

    /// -i ln sinh(x - i n g/2) + i ln sinh(x + i n g/2) with principal logarithms.
    pub fn alpha_n(&self, n: usize, x: f64) -> f64 {
        let h = C64::new(0.0, 0.5 * n as f64 * self.gamma);
        let v = C64::new(0.0, -1.0) * (C64::new(x, 0.0) - h).sinh().ln()
            + C64::new(0.0, 1.0) * (C64::new(x, 0.0) + h).sinh().ln();
        v.re
    }

    /// ln sinh(x - i n g/2) + ln sinh(x + i n g/2).
    pub fn beta_n(&self, n: usize, x: f64) -> f64 {
        let h = C64::new(0.0, 0.5 * n as f64 * self.gamma);
        ((C64::new(x, 0.0) - h).sinh().ln() + (C64::new(x, 0.0) + h).sinh().ln()).re
    }

    /// Fractional part of n g / 2 pi.
    pub fn delta_n(&self, n: usize) -> f64 {
        let r = n as f64 * self.gamma / (2.0 * PI);
        r - r.floor()
    }

    /// pi - 2 pi delta_n, in (-pi, pi].
    pub fn y_n(&self, n: usize) -> f64 {
        PI - 2.0 * PI * self.delta_n(n)
    }

    /// pi / (pi - g).
    pub fn x(&self) -> f64 {
        PI / (PI - self.gamma)
    }

    /// cosh(y_{n-1} t) + cosh(y_{n+1} t).
    pub fn f_tau(&self, n: usize, t: f64) -> f64 {
        (self.y_n(n - 1) * t).cosh() + (self.y_n(n + 1) * t).cosh()
    }
}

/// cosh(c t) tanh(b t) / sinh(pi t), evaluated without overflow; the t = 0 value is b / pi.
pub(crate) fn cosh_tanh_over_sinh(c: f64, b: f64, t: f64) -> f64 {
    let s = t.abs();
    if s < 1e-8 {
        return b / PI;
    }
    if s < 5.0 {
        return (c * s).cosh() * (b * s).tanh() / (PI * s).sinh();
    }
    let c = c.abs();
    ((c - PI) * s).exp() * (1.0 + (-2.0 * c * s).exp()) / (1.0 - (-2.0 * PI * s).exp())
        * (b * s).tanh()
}

/// cosh(x s) / (cosh(2 x s) + c) without overflow, for c > -1 or s away from zero.
pub(crate) fn sech_ratio(x: f64, s: f64, c: f64) -> f64 {
    let v = (x * s).abs();
    if v < 20.0 {
        return v.cosh() / ((2.0 * v).cosh() + c);
    }
    let e = (-v).exp();
    e * (1.0 + e * e) / (1.0 + e.powi(4) + 2.0 * c * e * e)
}
