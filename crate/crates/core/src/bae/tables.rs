//! Published four-decimal root sets for 2N = 4 in both hermitian regimes.

use super::{RootSet, RootSource};
use crate::lattice::ModelParams;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub w: Vec<C64>,
    pub z: Vec<C64>,
    pub lambda0_sq: f64,
    pub energy: f64,
}

impl TableRow {
    /// Imported root set with W0 = 1.
    pub fn root_set(&self) -> RootSet {
        RootSet {
            z: self.z.clone(),
            w: self.w.clone(),
            lambda0_sq: C64::new(self.lambda0_sq, 0.0),
            w0: C64::new(1.0, 0.0),
            residual_norm: 0.0,
            source: RootSource::Table,
            lambda0: None,
        }
    }
}

#[allow(clippy::approx_constant)]
const H: f64 = 1.5708;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn row(n: usize, w: [C64; 4], z: [C64; 3], lambda0_sq: f64, energy: f64) -> TableRow {
    TableRow {
        n,
        w: w.to_vec(),
        z: z.to_vec(),
        lambda0_sq,
        energy,
    }
}

/// a = 0.2, eta = 0.6i.
pub fn table_one_params() -> ModelParams {
    ModelParams::new(2, c(0.2, 0.0), c(0.0, 0.6)).expect("valid parameters")
}

/// a = 0.2i, eta = 0.6.
pub fn table_two_params() -> ModelParams {
    ModelParams::new(2, c(0.0, 0.2), c(0.6, 0.0)).expect("valid parameters")
}

#[rustfmt::skip]
pub fn table_one() -> Vec<TableRow> {
    vec![
        row(1, [c(-1.2826, 0.0), c(-0.2473, 0.0), c(0.2473, 0.0), c(1.2826, 0.0)],
            [c(-0.3477, 0.0), c(0.0, 0.0), c(0.3477, 0.0)], -399.7321, -5.2630),
        row(2, [c(-1.0902, 0.0), c(-0.0812, 0.0), c(0.5857, -0.9540), c(0.5857, 0.9540)],
            [c(-0.2913, 0.0), c(0.0728, 0.0), c(1.8173, 0.0)], -10.8865, -2.9735),
        row(3, [c(-0.5857, -0.9540), c(-0.5857, 0.9540), c(0.0812, 0.0), c(1.0902, 0.0)],
            [c(-1.8173, 0.0), c(-0.0728, 0.0), c(0.2913, 0.0)], -10.8865, -2.9735),
        row(4, [c(-0.7051, 0.0), c(0.0, -1.0960), c(0.0, 1.0960), c(0.7051, 0.0)],
            [c(-0.2105, 0.0), c(0.0, -H), c(0.2105, 0.0)], 105.6802, -2.7257),
        row(5, [c(-0.3577, -0.8792), c(-0.3577, 0.8792), c(0.3577, -0.8792), c(0.3577, 0.8792)],
            [c(-0.8076, -H), c(0.0, 0.0), c(0.8076, -H)], -5.9241, 0.9387),
        row(6, [c(-0.8868, 0.0), c(0.1556, -0.8924), c(0.1556, 0.8924), c(0.5756, 0.0)],
            [c(-0.2332, 0.0), c(0.1899, -0.6221), c(0.1899, 0.6221)], -127.8985, 2.9735),
        row(7, [c(-0.5756, 0.0), c(-0.1556, -0.8924), c(-0.1556, 0.8924), c(0.8868, 0.0)],
            [c(-0.1899, -0.6221), c(-0.1899, 0.6221), c(0.2332, 0.0)], -127.8983, 2.9735),
        row(8, [c(-0.1910, -0.8162), c(-0.1910, 0.8162), c(0.1910, -0.8162), c(0.1910, 0.8162)],
            [c(0.0, -H), c(0.0, -0.6474), c(0.0, 0.6474)], 22.4078, 7.0500),
    ]
}

#[rustfmt::skip]
pub fn table_two() -> Vec<TableRow> {
    vec![
        row(1, [c(-1.6145, -H), c(0.0, -0.2869), c(0.0, 0.2869), c(1.6145, H)],
            [c(0.0, -0.3690), c(0.0, 0.0), c(0.0, 0.3690)], 308.1505, -4.6408),
        row(2, [c(-1.3531, 0.6671), c(0.0, -1.2799), c(0.0, -0.0542), c(1.3531, 0.6671)],
            [c(0.0, -0.2868), c(0.0, 0.0800), c(0.0, 0.7901)], 140.6619, -3.3343),
        row(3, [c(-1.3531, -0.6671), c(0.0, 0.0542), c(0.0, 1.2799), c(1.3531, -0.6671)],
            [c(0.0, -0.7901), c(0.0, -0.0800), c(0.0, 0.2868)], 140.6615, -3.3343),
        row(4, [c(-1.4230, 0.0), c(0.0, -0.5427), c(0.0, 0.5427), c(1.4230, 0.0)],
            [c(0.0, -H), c(0.0, -0.1996), c(0.0, 0.1996)], 79.2054, -3.1881),
        row(5, [c(-0.8913, -0.3487), c(-0.8913, 0.3487), c(0.8913, -0.3487), c(0.8913, 0.3487)],
            [c(-0.9699, -H), c(0.0, 0.0), c(0.9699, -H)], 2.6434, 0.9566),
        row(6, [c(-0.8929, -0.1418), c(-0.2682, -1.4290), c(0.2682, 1.7126), c(0.8929, -0.1418)],
            [c(-0.6190, -0.2120), c(0.0, 0.2360), c(0.6190, -0.2120)], 59.4799, 3.3343),
        row(7, [c(-0.8929, 0.1418), c(-0.2682, -1.7126), c(0.2682, 1.4290), c(0.8929, 0.1418)],
            [c(-0.6190, 0.2120), c(0.0, -0.2360), c(0.6190, 0.2120)], 59.4799, 3.3343),
        row(8, [c(-0.8693, -0.2039), c(-0.8693, 0.2039), c(0.8693, -0.2039), c(0.8693, 0.2039)],
            [c(-0.6253, 0.0), c(0.0, -H), c(0.6253, 0.0)], 10.2842, 6.8723),
    ]
}
