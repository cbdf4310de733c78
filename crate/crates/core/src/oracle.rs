//! Dense exact-diagonalization reference for small chains. Used as ground
//! truth by the tests; nothing in the sampling pipeline depends on it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerms;
use crate::hilbert::{SiteIndex, StateVector};

pub const DEFAULT_DENSE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionKind {
    /// `exp(-i theta H)`
    RealTime,
    /// `exp(-theta H)`
    ImagTime,
}

#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub matrix: DMatrix<Complex64>,
    pub num_sites: usize,
}

fn check_cap(sites: usize, cap: usize) -> Result<()> {
    if sites > cap {
        return Err(Error::DenseCapExceeded { sites, cap });
    }
    Ok(())
}

pub fn dense_build(terms: &HamiltonianTerms) -> Result<DenseOperator> {
    dense_build_with_cap(terms, DEFAULT_DENSE_CAP)
}

/// Sum of the bond and field terms, each embedded entry by entry into the
/// full `2^L x 2^L` matrix.
pub fn dense_build_with_cap(terms: &HamiltonianTerms, cap: usize) -> Result<DenseOperator> {
    let sites = terms.num_sites();
    check_cap(sites, cap)?;
    let dim = 1usize << sites;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for (site, m) in terms.bonds() {
        let p = site.bit();
        for col in 0..dim {
            let local_col = (col >> p) & 3;
            let rest = col & !(3 << p);
            for local_row in 0..4 {
                let v = m[(local_row, local_col)];
                if v != Complex64::new(0.0, 0.0) {
                    matrix[(rest | (local_row << p), col)] += v;
                }
            }
        }
    }
    for (site, m) in terms.fields() {
        let p = site.bit();
        for col in 0..dim {
            let local_col = (col >> p) & 1;
            let rest = col & !(1 << p);
            for local_row in 0..2 {
                let v = m[(local_row, local_col)];
                if v != Complex64::new(0.0, 0.0) {
                    matrix[(rest | (local_row << p), col)] += v;
                }
            }
        }
    }
    Ok(DenseOperator {
        matrix,
        num_sites: sites,
    })
}

/// Eigendecomposition `A = V diag(E) V^dagger`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
    pub num_sites: usize,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectrum(&self) -> Spectrum {
        let is_real = self.matrix.iter().all(|z| z.im == 0.0);
        let (values, vectors) = if is_real {
            let real = self.matrix.map(|z| z.re);
            let eig = SymmetricEigen::new(real);
            (eig.eigenvalues, eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        } else {
            let eig = SymmetricEigen::new(self.matrix.clone());
            (eig.eigenvalues, eig.eigenvectors)
        };
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let values = DVector::from_iterator(values.len(), order.iter().map(|&k| values[k]));
        let vectors = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, col| {
            vectors[(r, order[col])]
        });
        Spectrum {
            values,
            vectors,
            num_sites: self.num_sites,
        }
    }

    /// Dense matrix-vector product on the stored amplitudes.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        state.check_sites(self.num_sites)?;
        let v = DVector::from_column_slice(state.amplitudes());
        let mut out = StateVector::new(self.num_sites, (&self.matrix * v).as_slice().to_vec())?;
        out.set_log_norm_offset(state.log_norm_offset());
        Ok(out)
    }
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }

    pub fn ground_state(&self) -> StateVector {
        StateVector::new(self.num_sites, self.vectors.column(0).as_slice().to_vec())
            .expect("eigenvector has the full dimension")
    }

    /// Exact `exp(-i theta A)` or `exp(-theta A)` applied to `state`. The
    /// imaginary-time result is normalized with its exact log-norm in the
    /// offset.
    pub fn evolve(&self, state: &StateVector, theta: f64, kind: EvolutionKind) -> Result<StateVector> {
        state.check_sites(self.num_sites)?;
        let psi = DVector::from_column_slice(state.amplitudes());
        let mut coeffs = self.vectors.adjoint() * psi;
        let e0 = self.ground_energy();
        for (c, &e) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= match kind {
                EvolutionKind::RealTime => Complex64::from_polar(1.0, -theta * e),
                EvolutionKind::ImagTime => Complex64::new((-theta * (e - e0)).exp(), 0.0),
            };
        }
        let mut out = StateVector::new(self.num_sites, (&self.vectors * coeffs).as_slice().to_vec())?;
        out.set_log_norm_offset(state.log_norm_offset());
        if kind == EvolutionKind::ImagTime {
            out.add_log_norm(-theta * e0);
            out.normalize()?;
        }
        Ok(out)
    }

    /// `ln <psi| exp(-beta A) |psi>` for the represented state.
    pub fn log_boltzmann_norm(&self, state: &StateVector, beta: f64) -> Result<f64> {
        let evolved = self.evolve(state, 0.5 * beta, EvolutionKind::ImagTime)?;
        Ok(evolved.log_norm_sqr())
    }

    /// `sum_k <k|O|k> e^{-beta E_k} / sum_k e^{-beta E_k}`.
    pub fn thermal_average(&self, observable: &DenseOperator, beta: f64) -> Result<f64> {
        if observable.num_sites != self.num_sites {
            return Err(Error::SizeMismatch {
                expected: self.num_sites,
                found: observable.num_sites,
            });
        }
        let e0 = self.ground_energy();
        let ov = &observable.matrix * &self.vectors;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..self.values.len() {
            let boltzmann = (-beta * (self.values[k] - e0)).exp();
            let diag = self.vectors.column(k).dotc(&ov.column(k)).re;
            num += diag * boltzmann;
            den += boltzmann;
        }
        Ok(num / den)
    }
}

/// Exact thermal average `Tr[O e^{-beta H}] / Tr e^{-beta H}`.
pub fn exact_thermal(h: &HamiltonianTerms, o: &HamiltonianTerms, beta: f64) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be non-negative, got {beta}")));
    }
    let spectrum = dense_build(h)?.spectrum();
    spectrum.thermal_average(&dense_build(o)?, beta)
}

pub fn exact_evolve(
    op: &DenseOperator,
    state: &StateVector,
    theta: f64,
    kind: EvolutionKind,
) -> Result<StateVector> {
    op.spectrum().evolve(state, theta, kind)
}

/// `rho_A = Tr_B |psi><psi|` for `A` = sites `1..=cut_after`, by direct
/// summation over the right block.
pub fn reduced_density_matrix(state: &StateVector, cut_after: SiteIndex) -> Result<DMatrix<Complex64>> {
    let sites = state.num_sites();
    if cut_after.0 < 1 || cut_after.0 >= sites {
        return Err(Error::CutOutOfRange {
            cut: cut_after.0,
            sites,
        });
    }
    let left = 1usize << cut_after.0;
    let right = 1usize << (sites - cut_after.0);
    let amps = state.amplitudes();
    Ok(DMatrix::from_fn(left, left, |a, a2| {
        (0..right)
            .map(|b| amps[a + b * left] * amps[a2 + b * left].conj())
            .sum()
    }))
}
