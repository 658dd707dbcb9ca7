//! Exact diagonalization, joint eigenbasis of H and t(u), and eigenvalue-function extraction.

mod extract;

pub use extract::{
    closure_residual, d_function, eigenvalue_function, eigenvalue_functions, extract_lambda,
    extract_w, sampling_nodes, tw_identity_residual, EigenvalueFunction, ExtractionResiduals,
    LambdaPart, WPart,
};

use crate::error::{Error, Result};
use crate::lattice::{hamiltonian_direct, transfer_matrix, Direction, ModelParams};
use crate::linalg::{eig, ComplexMatrix};
use num_complex::Complex64 as C64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::{Deserialize, Serialize};

const ENERGY_GAP: f64 = 1e-9;
const LAMBDA_GAP: f64 = 1e-8;
const MAX_REDRAWS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub level: usize,
    pub energy: f64,
    pub degeneracy: usize,
    /// Columns of the stored joint eigenbasis.
    pub eigenvector_ids: Vec<usize>,
}

/// Joint eigenbasis of H and the transfer matrix. Each basis column is a state; a level
/// groups the states of one energy whose transfer eigenvalues agree up to sign.
#[derive(Clone, Debug)]
pub struct ExactSpectrum {
    pub params: ModelParams,
    pub u0: C64,
    pub records: Vec<SpectrumRecord>,
    /// Lambda(u0) per state.
    pub lambda_u0: Vec<C64>,
    /// Level of each state.
    pub state_level: Vec<usize>,
    basis: ComplexMatrix,
}

impl ExactSpectrum {
    pub fn state_count(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn vector(&self, id: usize) -> Vec<C64> {
        self.basis.column(id)
    }

    pub fn energy_of_state(&self, id: usize) -> f64 {
        self.records[self.state_level[id]].energy
    }

    /// v^dagger op v for every state.
    pub fn diagonal_of(&self, op: &ComplexMatrix) -> Result<Vec<C64>> {
        let ov = op.matmul(&self.basis)?;
        let n = self.basis.rows();
        Ok((0..self.basis.cols())
            .map(|k| (0..n).map(|i| self.basis[(i, k)].conj() * ov[(i, k)]).sum())
            .collect())
    }

    /// Largest off-diagonal element of V^dagger op V relative to max|op|.
    pub fn leakage(&self, op: &ComplexMatrix) -> Result<f64> {
        let m = self.basis.adjoint().matmul(&op.matmul(&self.basis)?)?;
        let mut worst = 0.0f64;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
        Ok(worst / op.max_abs().max(f64::MIN_POSITIVE))
    }

    /// Lambda(u) for every state.
    pub fn lambda_at(&self, u: C64) -> Result<Vec<C64>> {
        self.diagonal_of(&transfer_matrix(u, &self.params, Direction::Forward)?)
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }
}

fn require_hermitian(p: &ModelParams) -> Result<()> {
    if !p.is_hermitian_regime() {
        return Err(Error::Domain(
            "exact diagonalization needs a real with eta imaginary, or a imaginary with eta real"
                .into(),
        ));
    }
    Ok(())
}

/// Index ranges of levels whose consecutive gaps are below `gap` (relative to max(1,|x|)).
fn clusters(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > gap * values[k].abs().max(1.0) {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Sorted levels of H, with degenerate energies split by the transfer-matrix eigenvalue.
pub fn diagonalize_model(p: &ModelParams) -> Result<Vec<SpectrumRecord>> {
    Ok(joint_eigenbasis(p, 0)?.records)
}

fn orthonormal_columns(m: &ComplexMatrix, cols: &[usize]) -> ComplexMatrix {
    let n = m.rows();
    let mut out: Vec<Vec<C64>> = Vec::new();
    for &c in cols {
        let mut v = m.column(c);
        for q in &out {
            let dot: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= dot * qi;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|x| x / norm).collect());
    }
    ComplexMatrix::from_fn(n, cols.len(), |i, j| out[j][i])
}

struct Class {
    energy: f64,
    lambda: C64,
    vectors: ComplexMatrix,
}

fn resolve_block(
    vecs: &ComplexMatrix,
    energy: f64,
    t0: &ComplexMatrix,
    probes: &[ComplexMatrix],
    mix: f64,
) -> Result<Option<Vec<Class>>> {
    let m = vecs.cols();
    let restricted = vecs.adjoint().matmul(&t0.matmul(vecs)?)?;
    if m == 1 {
        return Ok(Some(vec![Class {
            energy,
            lambda: restricted[(0, 0)],
            vectors: vecs.clone(),
        }]));
    }
    // t is normal: diagonalize a generic hermitian combination of its hermitian parts.
    let adj = restricted.adjoint();
    let h1 = restricted.add(&adj)?.scale(C64::new(0.5, 0.0));
    let h2 = restricted.sub(&adj)?.scale(C64::new(0.0, -0.5));
    let combo = h1.add(&h2.scale(C64::new(mix, 0.0)))?;
    let combo = combo.add(&combo.adjoint())?.scale(C64::new(0.5, 0.0));
    let e = eig(&combo, true)?;
    let rotated = vecs.matmul(&e.vectors)?;
    let diag = rotated.adjoint().matmul(&t0.matmul(&rotated)?)?;
    let scale = diag.max_abs().max(1.0);
    let lambdas: Vec<C64> = (0..m).map(|k| diag[(k, k)]).collect();
    for i in 0..m {
        for j in 0..m {
            if i != j && diag[(i, j)].norm() > LAMBDA_GAP * scale {
                return Ok(None);
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        lambdas[a]
            .re
            .total_cmp(&lambdas[b].re)
            .then(lambdas[a].im.total_cmp(&lambdas[b].im))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match groups
            .iter_mut()
            .find(|g| (lambdas[g[0]] - lambdas[k]).norm() <= LAMBDA_GAP * scale)
        {
            Some(g) => g.push(k),
            None => groups.push(vec![k]),
        }
    }
    let mut out = Vec::new();
    for g in groups {
        let vectors = orthonormal_columns(&rotated, &g);
        if g.len() > 1 {
            for t in probes {
                let r = vectors.adjoint().matmul(&t.matmul(&vectors)?)?;
                let mean = r.trace() / g.len() as f64;
                let tol = LAMBDA_GAP * r.max_abs().max(1.0);
                let scalar = (0..g.len()).all(|i| {
                    (0..g.len()).all(|j| {
                        let target = if i == j { mean } else { C64::new(0.0, 0.0) };
                        (r[(i, j)] - target).norm() <= tol
                    })
                });
                if !scalar {
                    return Ok(None);
                }
            }
        }
        out.push(Class {
            energy,
            lambda: lambdas[g[0]],
            vectors,
        });
    }
    Ok(Some(out))
}

/// Classes of one energy whose Lambda(u0) agree up to sign, ordered by energy then Re Lambda.
fn pair_by_sign(classes: &[Class]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, c) in classes.iter().enumerate() {
        let tol = LAMBDA_GAP * c.lambda.norm().max(1.0);
        match groups.iter_mut().find(|g| {
            let o = &classes[g[0]];
            (o.energy - c.energy).abs() <= ENERGY_GAP * c.energy.abs().max(1.0)
                && (o.lambda * o.lambda - c.lambda * c.lambda).norm()
                    <= tol * c.lambda.norm().max(1.0)
        }) {
            Some(g) => g.push(k),
            None => groups.push(vec![k]),
        }
    }
    for g in &mut groups {
        g.sort_by(|&a, &b| classes[a].lambda.re.total_cmp(&classes[b].lambda.re));
    }
    groups.sort_by(|a, b| {
        let (x, y) = (&classes[a[0]], &classes[b[0]]);
        x.energy
            .total_cmp(&y.energy)
            .then(x.lambda.re.abs().total_cmp(&y.lambda.re.abs()))
    });
    groups
}

fn draw(rng: &mut StdRng) -> C64 {
    C64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7))
}

/// Common eigenbasis of H and t(u); u0 is drawn from a seeded generator and redrawn on accidental degeneracy.
pub fn joint_eigenbasis(p: &ModelParams, seed: u64) -> Result<ExactSpectrum> {
    require_hermitian(p)?;
    let h = hamiltonian_direct(p)?;
    let e = eig(&h, true)?;
    let energies: Vec<f64> = e.values.iter().map(|v| v.re).collect();
    let blocks = clusters(&energies, ENERGY_GAP);
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..=MAX_REDRAWS {
        let u0 = draw(&mut rng);
        let mix = rng.gen_range(0.5..1.5);
        let t0 = transfer_matrix(u0, p, Direction::Forward)?;
        let probes = (0..3)
            .map(|_| transfer_matrix(draw(&mut rng), p, Direction::Forward))
            .collect::<Result<Vec<_>>>()?;
        let mut classes = Vec::new();
        let mut ok = true;
        for b in &blocks {
            let cols: Vec<usize> = b.clone().collect();
            let vecs = ComplexMatrix::from_fn(h.rows(), cols.len(), |i, j| e.vectors[(i, cols[j])]);
            let energy = cols.iter().map(|&k| energies[k]).sum::<f64>() / cols.len() as f64;
            match resolve_block(&vecs, energy, &t0, &probes, mix)? {
                Some(c) => classes.extend(c),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let dim = h.rows();
        let mut basis = ComplexMatrix::zeros(dim, dim);
        let mut records: Vec<SpectrumRecord> = Vec::new();
        let mut lambda_u0 = Vec::with_capacity(dim);
        let mut state_level = Vec::with_capacity(dim);
        let mut next = 0;
        for group in pair_by_sign(&classes) {
            let level = records.len();
            let mut ids = Vec::new();
            for &ci in &group {
                let c = &classes[ci];
                for j in 0..c.vectors.cols() {
                    for i in 0..dim {
                        basis[(i, next)] = c.vectors[(i, j)];
                    }
                    ids.push(next);
                    lambda_u0.push(c.lambda);
                    state_level.push(level);
                    next += 1;
                }
            }
            records.push(SpectrumRecord {
                level,
                energy: classes[group[0]].energy,
                degeneracy: ids.len(),
                eigenvector_ids: ids,
            });
        }
        return Ok(ExactSpectrum {
            params: *p,
            u0,
            records,
            lambda_u0,
            state_level,
            basis,
        });
    }
    Err(Error::DegeneracyResolution {
        attempts: MAX_REDRAWS + 1,
    })
}
