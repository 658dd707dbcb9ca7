use super::{site_bit, site_mask, transfer_matrix, Direction, ModelParams};
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use num_complex::Complex64 as C64;

/// phi^{-N}(2a) t(a) t(-a).
pub fn shift_operator(p: &ModelParams) -> Result<ComplexMatrix> {
    let c = p.couplings();
    let t1 = transfer_matrix(p.a, p, Direction::Forward)?;
    let t2 = transfer_matrix(-p.a, p, Direction::Forward)?;
    Ok(t1.matmul(&t2)?.scale(c.phi2a.powf(-(p.half_size as f64))))
}

fn permutation_matrix(dim: usize, f: impl Fn(usize) -> usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(f(col), col)] = C64::new(1.0, 0.0);
    }
    m
}

fn swap_sites(p: &ModelParams, i: usize, j: usize) -> ComplexMatrix {
    let l = p.sites();
    permutation_matrix(p.dim(), |s| {
        if site_bit(s, i, l) == site_bit(s, j, l) {
            s
        } else {
            s ^ site_mask(i, l) ^ site_mask(j, l)
        }
    })
}

fn flip_site(p: &ModelParams, i: usize) -> ComplexMatrix {
    let mask = site_mask(i, p.sites());
    permutation_matrix(p.dim(), |s| s ^ mask)
}

/// sigma^x_{2N} P_{2,2N} ... P_{2N-2,2N} P_{1,3} ... P_{1,2N-1} sigma^x_1, in written order.
pub fn shift_product_factors(p: &ModelParams) -> Result<Vec<ComplexMatrix>> {
    p.check_size()?;
    let l = p.sites();
    let mut f = vec![flip_site(p, l)];
    f.extend((2..l).step_by(2).map(|j| swap_sites(p, j, l)));
    f.extend((3..l).step_by(2).map(|j| swap_sites(p, 1, j)));
    f.push(flip_site(p, 1));
    Ok(f)
}

pub fn shift_operator_product(p: &ModelParams) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::identity(p.dim());
    for f in shift_product_factors(p)? {
        m = m.matmul(&f)?;
    }
    Ok(m)
}

/// (Q+ + Q-)/4 with the staggered, string-dressed ladder sums.
pub fn charge_operator(p: &ModelParams) -> Result<ComplexMatrix> {
    p.check_size()?;
    let l = p.sites();
    let dim = p.dim();
    let half_eta = p.eta * 0.5;
    let mut q = ComplexMatrix::zeros(dim, dim);
    let sz = |s: usize, k: usize| if site_bit(s, k, l) == 0 { 1.0 } else { -1.0 };
    for col in 0..dim {
        for j in 1..=l {
            let weight = if j % 2 == 0 { p.a.exp() } else { (-p.a).exp() };
            let left: f64 = (1..j).map(|k| sz(col, k)).sum();
            let right: f64 = (j + 1..=l).map(|k| sz(col, k)).sum();
            let row = col ^ site_mask(j, l);
            // sigma^+ lowers bit 1 -> 0, sigma^- raises 0 -> 1; neighbours are untouched.
            let sign = if site_bit(col, j, l) == 1 { 1.0 } else { -1.0 };
            let phase = (half_eta * (-sign * left + sign * right)).exp();
            q[(row, col)] += weight * phase * 0.25;
        }
    }
    Ok(q)
}

/// Leading u -> infinity term of t(u), rescaled to the charge normalization.
pub fn charge_asymptotic(p: &ModelParams, u: f64) -> Result<ComplexMatrix> {
    let m = (p.sites() - 1) as f64;
    let t = transfer_matrix(C64::new(u, 0.0), p, Direction::Forward)?;
    let pref = (2.0 * p.eta.sinh()).powf(m) / (4.0 * (p.eta * (m / 2.0)).exp()) * (-m * u).exp();
    Ok(t.scale(pref))
}
