use super::{r_matrix, r_matrix_derivative, site_mask, ModelParams};
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// t(u): sites 1..2N with inhomogeneities +a, -a, ...
    Forward,
    /// t-hat(u): sites 2N..1 with inhomogeneities +a, -a, ...
    Reversed,
}

type Block = [[C64; 2]; 2];

/// Auxiliary blocks R[2g+p][2b+q] -> blocks[g][b][p][q].
fn aux_blocks(r: &ComplexMatrix) -> [[Block; 2]; 2] {
    let mut out = [[[[C64::new(0.0, 0.0); 2]; 2]; 2]; 2];
    for g in 0..2 {
        for b in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    out[g][b][p][q] = r[(2 * g + p, 2 * b + q)];
                }
            }
        }
    }
    out
}

/// out += m * op acting on the site selected by `mask`.
fn accumulate_site_right(out: &mut ComplexMatrix, m: &ComplexMatrix, mask: usize, op: &Block) {
    if op.iter().flatten().all(|c| *c == C64::new(0.0, 0.0)) {
        return;
    }
    let dim = m.cols();
    let src = m.as_slice();
    let dst = out.as_mut_slice();
    for i in 0..m.rows() {
        let row = &src[i * dim..(i + 1) * dim];
        let orow = &mut dst[i * dim..(i + 1) * dim];
        for j in 0..dim {
            let jb = usize::from(j & mask != 0);
            orow[j] += row[j & !mask] * op[0][jb] + row[j | mask] * op[1][jb];
        }
    }
}

fn sweep_order(p: &ModelParams, u: C64, dir: Direction) -> Vec<(usize, C64)> {
    let l = p.sites();
    (1..=l)
        .map(|j| {
            let site = match dir {
                Direction::Forward => j,
                Direction::Reversed => l + 1 - j,
            };
            let arg = if j % 2 == 1 { u + p.a } else { u - p.a };
            (site, arg)
        })
        .collect()
}

fn sweep(
    p: &ModelParams,
    u: C64,
    dir: Direction,
    with_derivative: bool,
) -> Result<(ComplexMatrix, Option<ComplexMatrix>)> {
    p.check_size()?;
    let l = p.sites();
    let dim = p.dim();
    let id = ComplexMatrix::identity(dim);
    let zero = ComplexMatrix::zeros(dim, dim);
    let mut t = [[id.clone(), zero.clone()], [zero.clone(), id]];
    let mut dt = [[zero.clone(), zero.clone()], [zero.clone(), zero.clone()]];
    for (site, arg) in sweep_order(p, u, dir) {
        let mask = site_mask(site, l);
        let r = aux_blocks(&r_matrix(arg, p.eta)?);
        let dr = if with_derivative {
            Some(aux_blocks(&r_matrix_derivative(arg, p.eta)?))
        } else {
            None
        };
        let mut nt = [[zero.clone(), zero.clone()], [zero.clone(), zero.clone()]];
        let mut ndt = if with_derivative {
            Some([[zero.clone(), zero.clone()], [zero.clone(), zero.clone()]])
        } else {
            None
        };
        for a in 0..2 {
            for b in 0..2 {
                for g in 0..2 {
                    accumulate_site_right(&mut nt[a][b], &t[a][g], mask, &r[g][b]);
                    if let (Some(nd), Some(dr)) = (ndt.as_mut(), dr.as_ref()) {
                        accumulate_site_right(&mut nd[a][b], &dt[a][g], mask, &r[g][b]);
                        accumulate_site_right(&mut nd[a][b], &t[a][g], mask, &dr[g][b]);
                    }
                }
            }
        }
        t = nt;
        if let Some(nd) = ndt {
            dt = nd;
        }
    }
    let [[_, t01], [t10, _]] = t;
    let tm = t01.add(&t10)?;
    let dtm = if with_derivative {
        let [[_, d01], [d10, _]] = dt;
        Some(d01.add(&d10)?)
    } else {
        None
    };
    Ok((tm, dtm))
}

/// Twisted transfer matrix built by sweeping the auxiliary space across the chain.
pub fn transfer_matrix(u: C64, p: &ModelParams, dir: Direction) -> Result<ComplexMatrix> {
    Ok(sweep(p, u, dir, false)?.0)
}

/// Analytic derivative in u, summed over single-site insertions.
pub fn transfer_derivative(u: C64, p: &ModelParams, dir: Direction) -> Result<ComplexMatrix> {
    Ok(sweep(p, u, dir, true)?.1.expect("derivative requested"))
}

pub fn transfer_with_derivative(
    u: C64,
    p: &ModelParams,
    dir: Direction,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (t, dt) = sweep(p, u, dir, true)?;
    Ok((t, dt.expect("derivative requested")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, pauli_x};

    fn params() -> ModelParams {
        ModelParams::new(2, C64::new(0.2, 0.0), C64::new(0.0, 0.6)).unwrap()
    }

    /// Reference: full aux (x) chain product, then partial trace with sigma^x.
    fn brute_force(u: C64, p: &ModelParams) -> ComplexMatrix {
        let l = p.sites();
        let dim = p.dim();
        let big = 2 * dim;
        let mut prod = ComplexMatrix::identity(big);
        for j in 1..=l {
            let arg = if j % 2 == 1 { u + p.a } else { u - p.a };
            let r = r_matrix(arg, p.eta).unwrap();
            let embedded = ComplexMatrix::from_fn(big, big, |row, col| {
                let (a0, s0) = (row / dim, row % dim);
                let (a1, s1) = (col / dim, col % dim);
                let mask = site_mask(j, l);
                if (s0 & !mask) != (s1 & !mask) {
                    return C64::new(0.0, 0.0);
                }
                let (b0, b1) = (usize::from(s0 & mask != 0), usize::from(s1 & mask != 0));
                r[(2 * a0 + b0, 2 * a1 + b1)]
            });
            prod = prod.matmul(&embedded).unwrap();
        }
        let tw = kron(&pauli_x(), &ComplexMatrix::identity(dim)).unwrap();
        let m = tw.matmul(&prod).unwrap();
        ComplexMatrix::from_fn(dim, dim, |i, j| m[(i, j)] + m[(dim + i, dim + j)])
    }

    #[test]
    fn sweep_matches_brute_force() {
        let p = params();
        let u = C64::new(0.31, -0.17);
        let t = transfer_matrix(u, &p, Direction::Forward).unwrap();
        assert!(t.max_abs_diff(&brute_force(u, &p)) < 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = params();
        let u = C64::new(0.23, 0.4);
        let h = 1e-6;
        for dir in [Direction::Forward, Direction::Reversed] {
            let d = transfer_derivative(u, &p, dir).unwrap();
            let fd = transfer_matrix(u + h, &p, dir)
                .unwrap()
                .sub(&transfer_matrix(u - h, &p, dir).unwrap())
                .unwrap()
                .scale(C64::new(0.5 / h, 0.0));
            assert!(d.max_abs_diff(&fd) < 1e-6 * d.max_abs().max(1.0));
        }
    }

    #[test]
    fn periodicity_and_crossing() {
        let p = params();
        let u = C64::new(0.4, 0.25);
        let t = transfer_matrix(u, &p, Direction::Forward).unwrap();
        let shifted = transfer_matrix(
            u + C64::new(0.0, std::f64::consts::PI),
            &p,
            Direction::Forward,
        )
        .unwrap();
        assert!(shifted.max_abs_diff(&t.scale(C64::new(-1.0, 0.0))) < 1e-10);
        let hat = transfer_matrix(-u - p.eta, &p, Direction::Reversed).unwrap();
        assert!(t.max_abs_diff(&hat.scale(C64::new(-1.0, 0.0))) < 1e-10);
    }

    #[test]
    fn too_large_rejected() {
        let p = ModelParams::new(7, C64::new(0.2, 0.0), C64::new(0.0, 0.6)).unwrap();
        assert!(transfer_matrix(C64::new(0.1, 0.0), &p, Direction::Forward).is_err());
    }
}
