use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Eigenvectors as columns.
    pub vectors: ComplexMatrix,
    /// max over columns of |M v - lambda v|.
    pub residual: f64,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

/// Full eigendecomposition. Hermitian input gives real values sorted ascending.
pub fn eig(m: &ComplexMatrix, hermitian: bool) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "{}x{} is not square",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let fm = m.to_faer();
    let (mut values, vectors) = if hermitian {
        let defect = m.hermiticity_defect();
        if defect > 1e-12 * m.max_abs().max(1.0) {
            return Err(Error::Domain(format!(
                "matrix flagged hermitian has defect {defect:.3e}"
            )));
        }
        let e = fm
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|_| Error::Decomposition { residual: f64::NAN })?;
        let vals: Vec<C64> = e
            .S()
            .column_vector()
            .iter()
            .map(|x| C64::new(x.re, 0.0))
            .collect();
        (vals, ComplexMatrix::from_faer(e.U()))
    } else {
        let e = fm
            .eigen()
            .map_err(|_| Error::Decomposition { residual: f64::NAN })?;
        let vals: Vec<C64> = e.S().column_vector().iter().copied().collect();
        (vals, ComplexMatrix::from_faer(e.U()))
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    let sorted_values: Vec<C64> = order.iter().map(|&k| values[k]).collect();
    let mut sorted_vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut norm = 0.0;
        for i in 0..n {
            norm += vectors[(i, src)].norm_sqr();
        }
        let norm = norm.sqrt().max(f64::MIN_POSITIVE);
        for i in 0..n {
            sorted_vectors[(i, dst)] = vectors[(i, src)] / norm;
        }
    }
    values = sorted_values;

    let mv = m.matmul(&sorted_vectors)?;
    let mut residual = 0.0f64;
    for k in 0..n {
        let mut r = 0.0;
        for i in 0..n {
            r += (mv[(i, k)] - values[k] * sorted_vectors[(i, k)]).norm_sqr();
        }
        residual = residual.max(r.sqrt());
    }
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    if !(residual < 1e-9 * scale) {
        return Err(Error::Decomposition { residual });
    }
    Ok(EigenDecomposition {
        values,
        vectors: sorted_vectors,
        residual,
    })
}

/// Ascending eigenvalues of a Hermitian matrix without vectors.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "{}x{} is not square",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > 1e-12 * m.max_abs().max(1.0) {
        return Err(Error::Domain(format!(
            "matrix flagged hermitian has defect {defect:.3e}"
        )));
    }
    let mut v = m
        .to_faer()
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| Error::Decomposition { residual: f64::NAN })?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}
