//! Shared test support: textbook dense Hamiltonians built from Kronecker
//! products, random states, and small comparison helpers.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thermal_sampling::{ModelKind, ModelSpec, StateVector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn sx() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)])
}

pub fn sy() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)])
}

pub fn sz() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)])
}

/// `I (x) ... (x) op (x) ... (x) I` with 1-based site `i` at bit `i - 1`,
/// i.e. the last Kronecker factor is site 1.
pub fn embed(ops: &[(usize, DMatrix<Complex64>)], sites: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for site in (1..=sites).rev() {
        let factor = ops
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, op)| op.clone())
            .unwrap_or_else(|| DMatrix::identity(2, 2));
        m = m.kronecker(&factor);
    }
    m
}

/// The named model written out term by term.
pub fn textbook(spec: &ModelSpec) -> DMatrix<Complex64> {
    let l = spec.sites;
    let dim = 1 << l;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    let j = c(spec.j, 0.0);
    for i in 1..l {
        let zz = embed(&[(i, sz()), (i + 1, sz())], l);
        let xy = embed(&[(i, sx()), (i + 1, sx())], l) + embed(&[(i, sy()), (i + 1, sy())], l);
        h += match spec.kind {
            ModelKind::Heisenberg => (xy + zz) * j,
            ModelKind::XxzStaggered => (xy + zz * c(spec.delta, 0.0)) * j,
            ModelKind::TransverseIsing | ModelKind::MixedIsing => zz * j,
        };
    }
    for i in 1..=l {
        match spec.kind {
            ModelKind::Heisenberg => {}
            ModelKind::XxzStaggered => {
                h += embed(&[(i, sz())], l) * c(spec.h_stag * (-1f64).powi(i as i32), 0.0)
            }
            ModelKind::TransverseIsing => h += embed(&[(i, sx())], l) * c(spec.h_x, 0.0),
            ModelKind::MixedIsing => {
                h += embed(&[(i, sx())], l) * c(spec.h_x, 0.0)
                    + embed(&[(i, sz())], l) * c(spec.h_z, 0.0)
            }
        }
    }
    h
}

pub fn catalog(sites: usize) -> Vec<ModelSpec> {
    vec![
        ModelSpec::heisenberg(sites, 1.0),
        ModelSpec::xxz_staggered(sites, 1.0, 5.0, 1.0),
        ModelSpec::transverse_ising(sites, 1.0, 1.0),
        ModelSpec::mixed_ising(sites, 1.0, 1.0, 1.0),
    ]
}

/// Unnormalized complex Gaussian vector.
pub fn random_state(sites: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1 << sites)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::new(sites, amps).unwrap()
}

pub fn random_unit_state(sites: usize, seed: u64) -> StateVector {
    let mut s = random_state(sites, seed);
    s.normalize().unwrap();
    s.set_log_norm_offset(0.0);
    s
}

pub fn to_dvector(state: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(state.amplitudes())
}

/// The represented vector `exp(offset) * amplitudes`.
pub fn represented(state: &StateVector) -> DVector<Complex64> {
    to_dvector(state) * c(state.log_norm_offset().exp(), 0.0)
}

pub fn rel_err(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    (a - b).norm() / b.norm()
}

pub struct FixtureRow {
    pub spec: ModelSpec,
    pub beta: f64,
    pub value: f64,
    pub tolerance: f64,
}

pub fn oracle_fixture() -> Vec<FixtureRow> {
    let text = include_str!("../fixtures/oracle_values.txt");
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|line| {
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| f[i].parse::<f64>().unwrap();
            let kind = match f[0] {
                "heisenberg" => ModelKind::Heisenberg,
                "xxz_staggered" => ModelKind::XxzStaggered,
                "transverse_ising" => ModelKind::TransverseIsing,
                "mixed_ising" => ModelKind::MixedIsing,
                other => panic!("unknown model {other}"),
            };
            FixtureRow {
                spec: ModelSpec {
                    kind,
                    sites: f[1].parse().unwrap(),
                    j: num(3),
                    delta: num(4),
                    h_stag: num(5),
                    h_x: num(6),
                    h_z: num(7),
                },
                beta: num(2),
                value: num(8),
                tolerance: num(9),
            }
        })
        .collect()
}
