use super::{eig, ComplexMatrix};
use crate::error::{Error, Result};
use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// f(u) = exp(-d u) * sum_k c_k exp(2 k u).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub degree: usize,
    pub coefficients: Vec<C64>,
    /// Sign picked up under u -> u + i pi.
    pub parity: i8,
}

#[derive(Clone, Debug)]
pub struct TrigFit {
    pub poly: TrigPolynomial,
    pub condition: f64,
    /// max |fit - sample| / max |sample|.
    pub residual: f64,
}

fn parity_of(d: usize) -> i8 {
    if d.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl TrigPolynomial {
    pub fn new(coefficients: Vec<C64>) -> Self {
        let degree = coefficients.len().saturating_sub(1);
        Self {
            degree,
            coefficients,
            parity: parity_of(degree),
        }
    }

    /// scale * prod_j sinh(u - r_j).
    pub fn from_roots(roots: &[C64], scale: C64) -> Self {
        let mut c = vec![scale];
        for r in roots {
            let (lin, cst) = ((-r).exp() * 0.5, -(r.exp()) * 0.5);
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k] += ck * cst;
                next[k + 1] += ck * lin;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn eval(&self, u: C64) -> C64 {
        let x = (2.0 * u).exp();
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        acc * (-(self.degree as f64) * u).exp()
    }

    pub fn leading(&self) -> C64 {
        self.coefficients[self.degree]
    }
}

/// Least-squares fit of a degree-d trigonometric polynomial to (u, value) samples.
pub fn trig_fit(samples: &[(C64, C64)], degree: usize, parity: i8) -> Result<TrigFit> {
    if parity != parity_of(degree) {
        return Err(Error::Domain(format!(
            "parity {parity} is incompatible with degree {degree}"
        )));
    }
    let m = samples.len();
    let n = degree + 1;
    if m < n {
        return Err(Error::IllConditionedFit {
            condition: f64::INFINITY,
        });
    }
    let d = degree as f64;
    let mut a = Mat::<C64>::from_fn(m, n, |i, k| ((2.0 * k as f64 - d) * samples[i].0).exp());
    let mut col_scale = vec![0.0f64; n];
    for (k, s) in col_scale.iter_mut().enumerate() {
        for i in 0..m {
            *s = s.max(a[(i, k)].norm());
        }
        if *s == 0.0 || !s.is_finite() {
            return Err(Error::IllConditionedFit {
                condition: f64::INFINITY,
            });
        }
        for i in 0..m {
            a[(i, k)] /= *s;
        }
    }
    let svd = a.thin_svd().map_err(|_| Error::IllConditionedFit {
        condition: f64::INFINITY,
    })?;
    let s = svd.S().column_vector();
    let smax = s[0].re;
    let smin = s[n - 1].re;
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition < 1e12) {
        return Err(Error::IllConditionedFit { condition });
    }
    let u = svd.U();
    let v = svd.V();
    let mut coef = vec![C64::new(0.0, 0.0); n];
    for r in 0..n {
        let mut proj = C64::new(0.0, 0.0);
        for i in 0..m {
            proj += u[(i, r)].conj() * samples[i].1;
        }
        proj /= s[r].re;
        for k in 0..n {
            coef[k] += v[(k, r)] * proj;
        }
    }
    for (c, sc) in coef.iter_mut().zip(&col_scale) {
        *c /= *sc;
    }
    let poly = TrigPolynomial {
        degree,
        coefficients: coef,
        parity,
    };
    let vmax = samples.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
    let worst = samples
        .iter()
        .map(|(u, v)| (poly.eval(*u) - v).norm())
        .fold(0.0, f64::max);
    let residual = if vmax > 0.0 { worst / vmax } else { worst };
    if !(residual < 1e-8) {
        return Err(Error::FitResidual {
            residual,
            limit: 1e-8,
        });
    }
    Ok(TrigFit {
        poly,
        condition,
        residual,
    })
}

fn horner(c: &[C64], x: C64) -> (C64, C64, f64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    let xn = x.norm();
    for ck in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ck;
        scale = scale * xn + ck.norm();
    }
    (p, dp, scale)
}

/// Zeros of a trigonometric polynomial, Im in (-pi/2, pi/2].
pub fn trig_roots(p: &TrigPolynomial) -> Result<Vec<C64>> {
    let d = p.degree;
    let cmax = p.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if d == 0 {
        return Ok(Vec::new());
    }
    if !(p.leading().norm() > 1e-13 * cmax) || !(p.coefficients[0].norm() > 1e-13 * cmax) {
        return Err(Error::DegenerateDegree);
    }
    let lead = p.leading();
    let mut comp = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        comp[(0, k)] = -p.coefficients[d - 1 - k] / lead;
        if k + 1 < d {
            comp[(k + 1, k)] = C64::new(1.0, 0.0);
        }
    }
    let e = eig(&comp, false)?;
    let mut roots = Vec::with_capacity(d);
    for mut x in e.values {
        for _ in 0..4 {
            let (f, df, _) = horner(&p.coefficients, x);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            x -= step;
        }
        let (f, _, scale) = horner(&p.coefficients, x);
        let residual = f.norm() / scale.max(f64::MIN_POSITIVE);
        if !(residual < 1e-8) {
            return Err(Error::FitResidual {
                residual,
                limit: 1e-8,
            });
        }
        roots.push(canonical_strip(0.5 * x.ln()));
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Representative of z modulo i*pi with Im in (-pi/2, pi/2].
pub fn canonical_strip(z: C64) -> C64 {
    use std::f64::consts::PI;
    let mut im = z.im - PI * (z.im / PI).round();
    if im <= -PI / 2.0 {
        im += PI;
    }
    if im > PI / 2.0 {
        im -= PI;
    }
    C64::new(z.re, im)
}

/// Difference of two points modulo i*pi, reduced into the canonical strip.
pub fn strip_distance(a: C64, b: C64) -> f64 {
    canonical_strip(a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn nodes(k: usize) -> Vec<C64> {
        (0..k)
            .map(|j| C64::new(0.3, std::f64::consts::PI * (j as f64 + 0.5) / k as f64))
            .collect()
    }

    #[test]
    fn sinh_fit_is_exact() {
        let s: Vec<(C64, C64)> = [0.1, 0.7, -0.4]
            .iter()
            .map(|&u| (C64::new(u, 0.0), C64::new(u, 0.0).sinh()))
            .collect();
        let f = trig_fit(&s, 1, -1).unwrap();
        assert!((f.poly.coefficients[0] + 0.5).norm() < 1e-14);
        assert!((f.poly.coefficients[1] - 0.5).norm() < 1e-14);
    }

    #[test]
    fn single_zero() {
        let p = TrigPolynomial::from_roots(&[C64::new(0.3, 0.0)], C64::new(1.0, 0.0));
        let r = trig_roots(&p).unwrap();
        assert!((r[0] - C64::new(0.3, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn strip_boundary() {
        let p = TrigPolynomial::from_roots(
            &[C64::new(0.0, 0.0), C64::new(0.0, -FRAC_PI_2)],
            C64::new(1.0, 0.0),
        );
        let r = trig_roots(&p).unwrap();
        assert!(r.iter().any(|z| z.norm() < 1e-12));
        assert!(r
            .iter()
            .any(|z| (z - C64::new(0.0, FRAC_PI_2)).norm() < 1e-12));
    }

    #[test]
    fn construct_then_recover() {
        let zs = [
            C64::new(0.2, 0.1),
            C64::new(-0.7, 0.0),
            C64::new(1.1, -0.4),
            C64::new(0.05, 1.2),
            C64::new(-0.3, -0.9),
        ];
        let p = TrigPolynomial::from_roots(&zs, C64::new(2.0, -1.0));
        let samples: Vec<(C64, C64)> = nodes(9).into_iter().map(|u| (u, p.eval(u))).collect();
        let f = trig_fit(&samples, 5, -1).unwrap();
        let r = trig_roots(&f.poly).unwrap();
        for z in zs {
            let best = r
                .iter()
                .map(|x| strip_distance(*x, z))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "{z} missing");
        }
    }

    #[test]
    fn wrong_parity_rejected() {
        let s = vec![(C64::new(0.0, 0.0), C64::new(1.0, 0.0)); 3];
        assert!(trig_fit(&s, 2, -1).is_err());
    }

    #[test]
    fn clustered_nodes_rejected() {
        let s: Vec<(C64, C64)> = (0..4)
            .map(|k| {
                let u = C64::new(0.1, 1e-14 * k as f64);
                (u, u.sinh() * (u - 0.3).sinh() * (u + 0.2).sinh())
            })
            .collect();
        assert!(matches!(
            trig_fit(&s, 3, -1),
            Err(Error::IllConditionedFit { .. })
        ));
    }

    #[test]
    fn degenerate_leading_coefficient() {
        let p = TrigPolynomial::new(vec![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        assert!(matches!(trig_roots(&p), Err(Error::DegenerateDegree)));
    }
}
