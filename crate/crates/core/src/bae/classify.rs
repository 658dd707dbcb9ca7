use super::RootSet;
use crate::lattice::ModelParams;
use crate::linalg::canonical_strip;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    Ground,
    TypeI,
    TypeII,
    TypeIII { n: usize },
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StringParams {
    /// w-string lambda1 +- i m gamma / 2.
    TypeI {
        lambda1: f64,
        m: f64,
    },
    Length {
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootClassification {
    pub kind: RootKind,
    pub lambda: Option<f64>,
    pub string_params: Option<StringParams>,
}

impl RootClassification {
    fn unclassified() -> Self {
        Self {
            kind: RootKind::Unclassified,
            lambda: None,
            string_params: None,
        }
    }
}

/// |Im| of the strip representative, in [0, pi/2].
fn height(z: C64) -> f64 {
    canonical_strip(z).im.abs()
}

/// Distance of the strip height of z from the wrapped height of i*h.
fn height_miss(z: C64, h: f64) -> f64 {
    (height(z) - height(C64::new(0.0, h))).abs()
}

struct Split {
    real: usize,
    rest: Vec<C64>,
}

fn split(v: &[C64], tol: f64) -> Split {
    let mut real = 0;
    let mut rest = Vec::new();
    for &x in v {
        if height(x) < tol {
            real += 1;
        } else {
            rest.push(x);
        }
    }
    Split { real, rest }
}

/// Two entries forming a conjugate pair at height h with a common real part; returns that real part.
fn pair_center(rest: &[C64], h: f64, tol: f64) -> Option<f64> {
    if rest.len() != 2 {
        return None;
    }
    let (x, y) = (canonical_strip(rest[0]), canonical_strip(rest[1]));
    let same_center = (x.re - y.re).abs() < tol.max(1e-6);
    let opposite = (x.im + y.im).abs() < tol || (x.im.abs() - PI / 2.0).abs() < tol;
    (height_miss(x, h) < tol && height_miss(y, h) < tol && same_center && opposite)
        .then_some(0.5 * (x.re + y.re))
}

fn near(x: f64, target: f64) -> bool {
    (x - target).abs() <= 0.1 * target.abs().max(0.1)
}

/// Root pattern of a state in the regime a real, eta = i gamma.
pub fn classify_roots(r: &RootSet, p: &ModelParams) -> RootClassification {
    let gamma = match p.gamma() {
        Some(g) if p.is_real_a_regime() && g > 0.0 => g,
        _ => return RootClassification::unclassified(),
    };
    let tol = 0.05 * gamma;
    let l = p.sites();
    let zs = split(&r.z, tol);
    let ws = split(&r.w, tol);

    if zs.rest.is_empty() && ws.rest.is_empty() {
        return RootClassification {
            kind: RootKind::Ground,
            lambda: None,
            string_params: None,
        };
    }

    // Type I: one z at Im = -pi/2, a w-pair lambda1 +- i m gamma/2 with m close to pi/gamma - 1.
    if zs.real == l - 2 && zs.rest.len() == 1 && (height(zs.rest[0]) - PI / 2.0).abs() < tol {
        let lambda = zs.rest[0].re;
        if ws.real == l - 2 && ws.rest.len() == 2 {
            let (x, y) = (canonical_strip(ws.rest[0]), canonical_strip(ws.rest[1]));
            let m_expected = PI / gamma - 1.0;
            let m = (x.im.abs() + y.im.abs()) / gamma;
            let lambda1 = 0.5 * (x.re + y.re);
            if (x.im + y.im).abs() < tol && near(lambda1, lambda) && near(m, m_expected) {
                return RootClassification {
                    kind: RootKind::TypeI,
                    lambda: Some(lambda),
                    string_params: Some(StringParams::TypeI { lambda1, m }),
                };
            }
        }
        return RootClassification::unclassified();
    }

    if zs.real != l - 3 || zs.rest.len() != 2 {
        return RootClassification::unclassified();
    }

    // Type II: z-pair lambda +- i gamma, w-pair lambda +- 3 i gamma / 2.
    if let Some(lambda) = pair_center(&zs.rest, gamma, tol) {
        if ws.real == l - 2 {
            if let Some(c) = pair_center(&ws.rest, 1.5 * gamma, tol) {
                if near(c, lambda) {
                    return RootClassification {
                        kind: RootKind::TypeII,
                        lambda: Some(lambda),
                        string_params: Some(StringParams::Length { n: 2 }),
                    };
                }
            }
        }
    }

    // Type III: z-pair lambda +- i n gamma / 2, w-pairs at (n -+ 1) gamma / 2.
    if ws.real == l - 4 && ws.rest.len() == 4 {
        let n_max = (2.0 * PI / gamma).ceil() as usize + 2;
        for n in 3..=n_max {
            let Some(lambda) = pair_center(&zs.rest, 0.5 * n as f64 * gamma, tol) else {
                continue;
            };
            let lo = 0.5 * (n - 1) as f64 * gamma;
            let hi = 0.5 * (n + 1) as f64 * gamma;
            let (mut a, mut b): (Vec<C64>, Vec<C64>) = (Vec::new(), Vec::new());
            for &w in &ws.rest {
                if height_miss(w, lo) < tol {
                    a.push(w);
                } else if height_miss(w, hi) < tol {
                    b.push(w);
                }
            }
            let ca = pair_center(&a, lo, tol);
            let cb = pair_center(&b, hi, tol);
            if let (Some(ca), Some(cb)) = (ca, cb) {
                if near(ca, lambda) && near(cb, lambda) {
                    return RootClassification {
                        kind: RootKind::TypeIII { n },
                        lambda: Some(lambda),
                        string_params: Some(StringParams::Length { n }),
                    };
                }
            }
        }
    }
    RootClassification::unclassified()
}
