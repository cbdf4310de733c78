//! Initial sampling states: Haar-random vectors, random-phase product
//! states, and product states scrambled by a first-order Trotter circuit.
//!
//! Every sample draws from its own ChaCha stream keyed by
//! `(master_seed, sample_index)`, so a sample is reproducible no matter
//! which thread builds it or in what order.

use std::f64::consts::TAU;

use nalgebra::{SymmetricEigen, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianTerms, Matrix4c, ModelSpec};
use crate::hilbert::{SiteIndex, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleSeed {
    pub master_seed: u64,
    pub sample_index: u64,
}

impl SampleSeed {
    pub fn new(master_seed: u64, sample_index: u64) -> Self {
        Self {
            master_seed,
            sample_index,
        }
    }

    /// The generator for this sample: one ChaCha stream per sample index.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.sample_index);
        rng
    }
}

/// Random-phase product state `(x)_i (e^{i a_i}|up> + e^{i b_i}|down>)/sqrt2`,
/// with the `2L` phases drawn uniformly from `[0, 2pi)` in site order
/// (up phase, then down phase).
pub fn sample_rpps(num_sites: usize, seed: SampleSeed) -> Result<StateVector> {
    check_sites(num_sites)?;
    let mut rng = seed.rng();
    let phases: Vec<[f64; 2]> = (0..num_sites)
        .map(|_| [rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)])
        .collect();
    let scale = (-(num_sites as f64) * 0.5 * std::f64::consts::LN_2).exp();
    let amps = (0..1usize << num_sites)
        .map(|idx| {
            let phase: f64 = phases
                .iter()
                .enumerate()
                .map(|(site, p)| p[(idx >> site) & 1])
                .sum();
            Complex64::from_polar(scale, phase)
        })
        .collect();
    StateVector::new(num_sites, amps)
}

/// Haar-random unit vector: i.i.d. standard complex Gaussians, normalized.
/// The normalization is discarded so the returned offset is zero.
pub fn sample_haar(num_sites: usize, seed: SampleSeed) -> Result<StateVector> {
    check_sites(num_sites)?;
    let mut rng = seed.rng();
    let amps = (0..1usize << num_sites)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    let mut state = StateVector::new(num_sites, amps)?;
    state.normalize()?;
    state.set_log_norm_offset(0.0);
    Ok(state)
}

fn check_sites(num_sites: usize) -> Result<()> {
    if num_sites < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 sites, got {num_sites}"
        )));
    }
    Ok(())
}

/// `U(tau) = exp(-i tau H_odd) exp(-i tau H_even)`, repeated `n_reps` times.
///
/// `odd_layer` holds the gates on bonds (1,2), (3,4), ... and `even_layer`
/// those on (2,3), (4,5), .... Each bond is labelled by its left site.
#[derive(Debug, Clone)]
pub struct TrotterCircuit {
    pub num_sites: usize,
    pub even_layer: Vec<(SiteIndex, Matrix4c)>,
    pub odd_layer: Vec<(SiteIndex, Matrix4c)>,
    pub tau: f64,
    pub n_reps: usize,
}

impl TrotterCircuit {
    pub fn from_terms(terms: &HamiltonianTerms, tau: f64, n_reps: usize) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "trotter step must be finite and non-negative, got {tau}"
            )));
        }
        let mut even_layer = Vec::new();
        let mut odd_layer = Vec::new();
        for (b, h) in terms.bond_hamiltonians().into_iter().enumerate() {
            let site = SiteIndex(b + 1);
            let gate = unitary_exp(&h, tau);
            if site.0 % 2 == 1 {
                odd_layer.push((site, gate));
            } else {
                even_layer.push((site, gate));
            }
        }
        Ok(Self {
            num_sites: terms.num_sites(),
            even_layer,
            odd_layer,
            tau,
            n_reps,
        })
    }

    pub fn gates(&self) -> impl Iterator<Item = &(SiteIndex, Matrix4c)> {
        self.even_layer.iter().chain(self.odd_layer.iter())
    }

    /// Apply `U(tau)^n_reps` in place, then renormalize.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        state.check_sites(self.num_sites)?;
        let amps = state.amplitudes_mut();
        for _ in 0..self.n_reps {
            for (site, gate) in self.even_layer.iter().chain(&self.odd_layer) {
                apply_two_site_gate(amps, site.bit(), gate);
            }
        }
        if self.n_reps > 0 {
            state.normalize()?;
        }
        Ok(())
    }
}

/// Compile the Trotter circuit of a model.
pub fn build_trotter_circuit(spec: &ModelSpec, tau: f64, n_reps: usize) -> Result<TrotterCircuit> {
    TrotterCircuit::from_terms(&spec.build()?, tau, n_reps)
}

/// Apply a circuit to a state, returning the scrambled state.
pub fn apply_circuit(mut state: StateVector, circuit: &TrotterCircuit) -> Result<StateVector> {
    circuit.apply(&mut state)?;
    Ok(state)
}

/// `exp(-i tau h)` for Hermitian `h`, via its eigendecomposition.
pub fn unitary_exp(h: &Matrix4c, tau: f64) -> Matrix4c {
    let eig = SymmetricEigen::new(*h);
    let phases = Vector4::from_fn(|k, _| Complex64::from_polar(1.0, -tau * eig.eigenvalues[k]));
    let v = &eig.eigenvectors;
    v * Matrix4c::from_diagonal(&phases) * v.adjoint()
}

/// Apply a 4x4 gate to the sites at bit positions `shift` and `shift + 1`.
pub(crate) fn apply_two_site_gate(amps: &mut [Complex64], shift: usize, gate: &Matrix4c) {
    let low_mask = (1usize << shift) - 1;
    let lo = 1usize << shift;
    let hi = 2usize << shift;
    for k in 0..amps.len() >> 2 {
        let base = ((k & !low_mask) << 2) | (k & low_mask);
        let idx = [base, base | lo, base | hi, base | lo | hi];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &i) in idx.iter().enumerate() {
            amps[i] = gate[(r, 0)] * v[0]
                + gate[(r, 1)] * v[1]
                + gate[(r, 2)] * v[2]
                + gate[(r, 3)] * v[3];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rpps_has_flat_moduli() {
        for idx in 0..5 {
            let s = sample_rpps(7, SampleSeed::new(42, idx)).unwrap();
            let expected = 2f64.powf(-3.5);
            assert!(s.amplitudes().iter().all(|a| (a.norm() - expected).abs() < 1e-14));
            assert_eq!(s.log_norm_offset(), 0.0);
        }
    }

    #[test]
    fn rpps_is_deterministic() {
        let a = sample_rpps(4, SampleSeed::new(0, 0)).unwrap();
        let b = sample_rpps(4, SampleSeed::new(0, 0)).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        let c = sample_rpps(4, SampleSeed::new(0, 1)).unwrap();
        assert_ne!(a.amplitudes(), c.amplitudes());
    }

    #[test]
    fn rpps_is_a_product_state() {
        let s = sample_rpps(6, SampleSeed::new(9, 3)).unwrap();
        for cut in 1..6 {
            let spec = s.schmidt_spectrum(SiteIndex(cut)).unwrap();
            assert!((spec[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_is_normalized() {
        let s = sample_haar(8, SampleSeed::new(1, 2)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert_eq!(s.log_norm_offset(), 0.0);
    }

    #[test]
    fn too_few_sites() {
        assert!(sample_haar(1, SampleSeed::new(0, 0)).is_err());
        assert!(sample_rpps(1, SampleSeed::new(0, 0)).is_err());
    }

    #[test]
    fn layers_partition_bonds() {
        let c = build_trotter_circuit(&ModelSpec::heisenberg(7, 1.0), 0.3, 1).unwrap();
        let odd: Vec<_> = c.odd_layer.iter().map(|(s, _)| s.0).collect();
        let even: Vec<_> = c.even_layer.iter().map(|(s, _)| s.0).collect();
        assert_eq!(odd, vec![1, 3, 5]);
        assert_eq!(even, vec![2, 4, 6]);
    }

    #[test]
    fn gates_are_unitary() {
        let spec = ModelSpec::mixed_ising(6, 1.0, 1.0, 1.0);
        let c = build_trotter_circuit(&spec, 10.0, 12).unwrap();
        for (_, g) in c.gates() {
            let err = (g.adjoint() * g - Matrix4c::identity()).camax();
            assert!(err <= 1e-12, "unitarity error {err}");
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let spec = ModelSpec::xxz_staggered(5, 1.0, 5.0, 1.0);
        let c = build_trotter_circuit(&spec, 0.0, 3).unwrap();
        for (_, g) in c.gates() {
            assert!((g - Matrix4c::identity()).camax() < 1e-15);
        }
    }

    #[test]
    fn zero_reps_leaves_state() {
        let spec = ModelSpec::mixed_ising(5, 1.0, 1.0, 1.0);
        let c = build_trotter_circuit(&spec, 10.0, 0).unwrap();
        let s = sample_haar(5, SampleSeed::new(3, 3)).unwrap();
        let out = apply_circuit(s.clone(), &c).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn circuit_preserves_norm() {
        let spec = ModelSpec::mixed_ising(8, 1.0, 1.0, 1.0);
        let c = build_trotter_circuit(&spec, 10.0, 16).unwrap();
        let mut s = sample_rpps(8, SampleSeed::new(5, 0)).unwrap();
        let before = s.norm();
        let amps_norm = {
            let mut copy = s.clone();
            for _ in 0..c.n_reps {
                for (site, g) in c.gates() {
                    apply_two_site_gate(copy.amplitudes_mut(), site.bit(), g);
                }
            }
            copy.norm()
        };
        assert!((amps_norm - before).abs() < 1e-10);
        c.apply(&mut s).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circuit_size_mismatch() {
        let c = build_trotter_circuit(&ModelSpec::heisenberg(4, 1.0), 1.0, 1).unwrap();
        let s = sample_haar(5, SampleSeed::new(0, 0)).unwrap();
        assert!(apply_circuit(s, &c).is_err());
    }

    #[test]
    fn negative_step_rejected() {
        assert!(build_trotter_circuit(&ModelSpec::heisenberg(4, 1.0), -1.0, 1).is_err());
    }
}
