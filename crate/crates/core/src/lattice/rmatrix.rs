use crate::error::{Error, Result};
use crate::linalg::{kron, pauli_x, pauli_y, pauli_z, ComplexMatrix};
use num_complex::Complex64 as C64;

/// phi(u) = -sinh(u+eta) sinh(u-eta) / sinh^2(eta).
pub fn phi(u: C64, eta: C64) -> C64 {
    let s = eta.sinh();
    -(u + eta).sinh() * (u - eta).sinh() / (s * s)
}

/// Six-vertex R-matrix on |00>, |01>, |10>, |11>.
pub fn r_matrix(u: C64, eta: C64) -> Result<ComplexMatrix> {
    let s = eta.sinh();
    if s.norm() < 1e-14 {
        return Err(Error::SingularParameter("sinh(eta) = 0".into()));
    }
    let a = (u + eta).sinh() / s;
    let b = u.sinh() / s;
    let c = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    ComplexMatrix::from_row_major(4, 4, vec![a, z, z, z, z, b, c, z, z, c, b, z, z, z, z, a])
}

pub fn r_matrix_derivative(u: C64, eta: C64) -> Result<ComplexMatrix> {
    let s = eta.sinh();
    if s.norm() < 1e-14 {
        return Err(Error::SingularParameter("sinh(eta) = 0".into()));
    }
    let a = (u + eta).cosh() / s;
    let b = u.cosh() / s;
    let z = C64::new(0.0, 0.0);
    ComplexMatrix::from_row_major(4, 4, vec![a, z, z, z, z, b, z, z, z, z, b, z, z, z, z, a])
}

/// Two-site swap.
pub fn permutation() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

/// max |R12(u1-u2) R13(u1-u3) R23(u2-u3) - R23(u2-u3) R13(u1-u3) R12(u1-u2)|
/// for an arbitrary R builder.
pub fn ybe_residual(
    r: impl Fn(C64) -> Result<ComplexMatrix>,
    u1: C64,
    u2: C64,
    u3: C64,
) -> Result<f64> {
    let i2 = ComplexMatrix::identity(2);
    let p23 = kron(&i2, &permutation())?;
    let r12 = kron(&r(u1 - u2)?, &i2)?;
    let r23 = kron(&i2, &r(u2 - u3)?)?;
    let r13 = p23.matmul(&kron(&r(u1 - u3)?, &i2)?)?.matmul(&p23)?;
    let lhs = r12.matmul(&r13)?.matmul(&r23)?;
    let rhs = r23.matmul(&r13)?.matmul(&r12)?;
    Ok(lhs.max_abs_diff(&rhs))
}

pub fn check_ybe(u1: C64, u2: C64, u3: C64, eta: C64) -> Result<f64> {
    ybe_residual(|u| r_matrix(u, eta), u1, u2, u3)
}

/// max |R12(u) R21(-u) - phi(u) id|.
pub fn check_unitarity(u: C64, eta: C64) -> Result<f64> {
    let p = permutation();
    let r21 = p.matmul(&r_matrix(-u, eta)?)?.matmul(&p)?;
    let lhs = r_matrix(u, eta)?.matmul(&r21)?;
    Ok(lhs.max_abs_diff(&ComplexMatrix::identity(4).scale(phi(u, eta))))
}

fn partial_transpose_second(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |i, j| {
        let (a, b) = (i >> 1, i & 1);
        let (c, d) = (j >> 1, j & 1);
        m[((a << 1) | d, (c << 1) | b)]
    })
}

/// max |R(u) - V0 R^{t_2}(-u-eta) V0| with V = -i sigma^y.
pub fn check_crossing(u: C64, eta: C64) -> Result<f64> {
    let v = kron(
        &pauli_y().scale(C64::new(0.0, -1.0)),
        &ComplexMatrix::identity(2),
    )?;
    let rt = partial_transpose_second(&r_matrix(-u - eta, eta)?);
    let rhs = v.matmul(&rt)?.matmul(&v)?;
    Ok(r_matrix(u, eta)?.max_abs_diff(&rhs))
}

/// Residual of R12 = R21 = R^{t1 t2}.
pub fn check_pt(u: C64, eta: C64) -> Result<f64> {
    let r = r_matrix(u, eta)?;
    let p = permutation();
    let swapped = p.matmul(&r)?.matmul(&p)?;
    Ok(r.max_abs_diff(&swapped).max(r.max_abs_diff(&r.transpose())))
}

/// Largest commutator of R with sigma^a sigma^a, a = x, y, z.
pub fn check_z2(u: C64, eta: C64) -> Result<f64> {
    let r = r_matrix(u, eta)?;
    let mut worst = 0.0f64;
    for s in [pauli_x(), pauli_y(), pauli_z()] {
        let ss = kron(&s, &s)?;
        worst = worst.max(ss.commutator(&r)?.max_abs());
    }
    Ok(worst)
}

/// max |R(u + i pi) + sz0 R(u) sz0|.
pub fn check_quasi_periodicity(u: C64, eta: C64) -> Result<f64> {
    let sz = kron(&pauli_z(), &ComplexMatrix::identity(2))?;
    let shifted = r_matrix(u + C64::new(0.0, std::f64::consts::PI), eta)?;
    let rhs = sz
        .matmul(&r_matrix(u, eta)?)?
        .matmul(&sz)?
        .scale(C64::new(-1.0, 0.0));
    Ok(shifted.max_abs_diff(&rhs))
}

/// max |R(-eta) + 2 P^-| and |R(0) - P|.
pub fn check_special_points(eta: C64) -> Result<(f64, f64)> {
    let p = permutation();
    let pminus = ComplexMatrix::identity(4)
        .sub(&p)?
        .scale(C64::new(0.5, 0.0));
    let fusion = r_matrix(-eta, eta)?.max_abs_diff(&pminus.scale(C64::new(-2.0, 0.0)));
    let initial = r_matrix(C64::new(0.0, 0.0), eta)?.max_abs_diff(&p);
    Ok((fusion, initial))
}
