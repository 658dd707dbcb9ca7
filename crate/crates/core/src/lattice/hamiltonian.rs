use super::{site_bit, site_mask, transfer_derivative, transfer_matrix, Direction, ModelParams};
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli_x, pauli_y, pauli_z, ComplexMatrix};
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
    Z,
}

/// Product of Paulis on distinct sites with a prefactor.
struct PauliString {
    coef: C64,
    ops: Vec<(usize, Pauli)>,
}

/// Site index on the ring; the twist conjugates sites past 2N by sigma^x, flipping y and z.
fn wrap(site: usize, op: Pauli, sites: usize) -> (usize, Pauli, f64) {
    if site <= sites {
        (site, op, 1.0)
    } else {
        let sign = if op == Pauli::X { 1.0 } else { -1.0 };
        (site - sites, op, sign)
    }
}

fn term(coef: C64, raw: &[(usize, Pauli)], sites: usize) -> PauliString {
    let mut c = coef;
    let ops = raw
        .iter()
        .map(|&(s, o)| {
            let (s, o, sign) = wrap(s, o, sites);
            c *= sign;
            (s, o)
        })
        .collect();
    PauliString { coef: c, ops }
}

fn accumulate(h: &mut ComplexMatrix, sites: usize, t: &PauliString) {
    if t.coef == C64::new(0.0, 0.0) {
        return;
    }
    let i = C64::new(0.0, 1.0);
    for col in 0..h.cols() {
        let mut row = col;
        let mut phase = t.coef;
        for &(site, op) in &t.ops {
            let b = site_bit(col, site, sites);
            match op {
                Pauli::X => row ^= site_mask(site, sites),
                Pauli::Y => {
                    row ^= site_mask(site, sites);
                    phase *= if b == 0 { i } else { -i };
                }
                Pauli::Z => {
                    if b == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        h[(row, col)] += phase;
    }
}

/// Hamiltonian with NN, NNN and chiral three-spin couplings on the twisted ring (no constant).
pub fn hamiltonian_direct(p: &ModelParams) -> Result<ComplexMatrix> {
    p.check_size()?;
    let c = p.couplings();
    let l = p.sites();
    let mut h = ComplexMatrix::zeros(p.dim(), p.dim());
    let axes = [Pauli::X, Pauli::Y, Pauli::Z];
    let j1 = [c.j1x, c.j1y, c.j1z];
    let j3 = [c.j3x, c.j3y, c.j3z];
    let m1 = C64::new(-1.0, 0.0);
    for j in 1..=l {
        let stagger = if j % 2 == 0 { 1.0 } else { -1.0 };
        for k in 0..3 {
            let (al, be, ga) = (axes[k], axes[(k + 1) % 3], axes[(k + 2) % 3]);
            let terms = [
                term(m1 * j1[k], &[(j, al), (j + 1, al)], l),
                term(m1 * c.j2, &[(j, al), (j + 2, al)], l),
                term(
                    m1 * stagger * j3[k],
                    &[(j + 1, al), (j, be), (j + 2, ga)],
                    l,
                ),
                term(stagger * j3[k], &[(j + 1, al), (j, ga), (j + 2, be)], l),
            ];
            for t in &terms {
                accumulate(&mut h, l, t);
            }
        }
    }
    Ok(h)
}

/// -phi^{1-N}(2a) sinh(eta) [t-hat(-a) t'(a) + t-hat(a) t'(-a)] + E0.
pub fn hamiltonian_from_transfer(p: &ModelParams) -> Result<ComplexMatrix> {
    let c = p.couplings();
    if c.phi2a.norm() < 1e-12 {
        return Err(Error::SingularParameter("phi(2a) = 0".into()));
    }
    let a = p.a;
    let first = transfer_matrix(-a, p, Direction::Reversed)?.matmul(&transfer_derivative(
        a,
        p,
        Direction::Forward,
    )?)?;
    let second = transfer_matrix(a, p, Direction::Reversed)?.matmul(&transfer_derivative(
        -a,
        p,
        Direction::Forward,
    )?)?;
    let pref = -c.phi2a.powf(1.0 - p.half_size as f64) * p.eta.sinh();
    let mut h = first.add(&second)?.scale(pref);
    for d in 0..p.dim() {
        h[(d, d)] += c.e0;
    }
    Ok(h)
}

fn embed(op: &ComplexMatrix, site: usize, sites: usize) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::identity(1);
    for s in 1..=sites {
        let f = if s == site {
            op.clone()
        } else {
            ComplexMatrix::identity(2)
        };
        m = kron(&m, &f)?;
    }
    Ok(m)
}

/// Antiperiodic XXZ ring -sum (sx sx + sy sy + cosh(eta) sz sz), built from Kronecker products.
pub fn xxz_antiperiodic(half_size: usize, eta: C64) -> Result<ComplexMatrix> {
    let l = 2 * half_size;
    if l > super::MAX_SITES {
        return Err(Error::SizeLimit {
            dim: 1 << l,
            cap: 1 << super::MAX_SITES,
        });
    }
    let dim = 1 << l;
    let mut h = ComplexMatrix::zeros(dim, dim);
    let coef = [C64::new(1.0, 0.0), C64::new(1.0, 0.0), eta.cosh()];
    let sx1 = embed(&pauli_x(), 1, l)?;
    for (k, s) in [pauli_x(), pauli_y(), pauli_z()].iter().enumerate() {
        for j in 1..=l {
            let left = embed(s, j, l)?;
            let right = if j < l {
                embed(s, j + 1, l)?
            } else {
                sx1.matmul(&embed(s, 1, l)?)?.matmul(&sx1)?
            };
            h.add_scaled_in_place(&left.matmul(&right)?, -coef[k]);
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_hermitian;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn table_ground_energies() {
        let p = ModelParams::new(2, c(0.2, 0.0), c(0.0, 0.6)).unwrap();
        let h = hamiltonian_direct(&p).unwrap();
        assert!(h.is_hermitian(1e-12));
        let ev = eigenvalues_hermitian(&h).unwrap();
        assert!((ev[0] - -5.2630).abs() < 1e-3);
        let q = ModelParams::new(2, c(0.0, 0.2), c(0.6, 0.0)).unwrap();
        let ev = eigenvalues_hermitian(&hamiltonian_direct(&q).unwrap()).unwrap();
        assert!((ev[0] - -4.6408).abs() < 1e-3);
    }

    #[test]
    fn transfer_route_agrees() {
        for (n, a, eta) in [
            (2, c(0.2, 0.0), c(0.0, 0.6)),
            (3, c(0.0, 0.15), c(0.7, 0.0)),
            (2, c(0.3, 0.1), c(0.2, 0.5)),
        ] {
            let p = ModelParams::new(n, a, eta).unwrap();
            let d = hamiltonian_direct(&p).unwrap();
            let t = hamiltonian_from_transfer(&p).unwrap();
            assert!(d.max_abs_diff(&t) < 1e-8, "{n} {a} {eta}");
        }
    }

    #[test]
    fn xxz_limit() {
        let eta = c(0.0, 0.6);
        let p = ModelParams::new(2, c(0.0, 0.0), eta).unwrap();
        let x = xxz_antiperiodic(2, eta).unwrap();
        assert!(hamiltonian_direct(&p).unwrap().max_abs_diff(&x) < 1e-12);
        assert!(hamiltonian_from_transfer(&p).unwrap().max_abs_diff(&x) < 1e-8);
    }
}
