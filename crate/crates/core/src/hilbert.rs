//! State vectors for chains of spin-1/2 sites.
//!
//! Basis convention: site `i` (1-based) is bit `i - 1` of the basis-state
//! index. A clear bit is spin up (S^z = +1/2), a set bit is spin down.
//!
//! Amplitudes are kept unit-normalized wherever possible; the scale that a
//! normalization removes is accumulated in [`StateVector::log_norm_offset`]
//! (natural log), so the represented vector is `exp(offset) * amplitudes`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest chain handled by the dense state-vector storage.
pub const MAX_SITES: usize = 30;

/// A 1-based site label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteIndex(pub usize);

impl SiteIndex {
    /// Bit position of this site in a basis-state index.
    pub fn bit(self) -> usize {
        debug_assert!(self.0 >= 1);
        self.0 - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    log_norm_offset: f64,
    num_sites: usize,
}

impl StateVector {
    pub fn new(num_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if num_sites == 0 || num_sites > MAX_SITES || amplitudes.len() != 1 << num_sites {
            return Err(Error::BadLength {
                sites: num_sites,
                len: amplitudes.len(),
            });
        }
        Ok(Self {
            amplitudes,
            log_norm_offset: 0.0,
            num_sites,
        })
    }

    pub fn zeros(num_sites: usize) -> Result<Self> {
        if num_sites == 0 || num_sites > MAX_SITES {
            return Err(Error::BadLength {
                sites: num_sites,
                len: 0,
            });
        }
        Self::new(num_sites, vec![Complex64::new(0.0, 0.0); 1 << num_sites])
    }

    /// The computational basis state `|index>`.
    pub fn basis(num_sites: usize, index: usize) -> Result<Self> {
        let mut state = Self::zeros(num_sites)?;
        if index >= state.dim() {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_sites} sites"
            )));
        }
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn log_norm_offset(&self) -> f64 {
        self.log_norm_offset
    }

    pub fn set_log_norm_offset(&mut self, offset: f64) {
        self.log_norm_offset = offset;
    }

    /// Shift the stored log-norm by `delta` without touching amplitudes.
    pub fn add_log_norm(&mut self, delta: f64) {
        self.log_norm_offset += delta;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Natural log of the squared norm of the represented vector,
    /// `2 * offset + ln ||amplitudes||^2`.
    pub fn log_norm_sqr(&self) -> f64 {
        2.0 * self.log_norm_offset + self.norm_sqr().ln()
    }

    /// Rescale the amplitudes to unit norm and move `ln(norm)` into the
    /// log-norm offset. Returns the norm that was removed.
    pub fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateState);
        }
        if norm != 1.0 {
            let scale = 1.0 / norm;
            for a in &mut self.amplitudes {
                *a *= scale;
            }
            self.log_norm_offset += norm.ln();
        }
        Ok(norm)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub(crate) fn check_sites(&self, num_sites: usize) -> Result<()> {
        if self.num_sites != num_sites {
            return Err(Error::SizeMismatch {
                expected: num_sites,
                found: self.num_sites,
            });
        }
        Ok(())
    }

    /// `<a|b>` of the stored amplitudes; log-norm offsets are not applied.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        other.check_sites(self.num_sites)?;
        Ok(inner_slices(&self.amplitudes, &other.amplitudes))
    }

    /// Squared Schmidt coefficients for the cut between sites `cut_after`
    /// and `cut_after + 1`, sorted in descending order.
    pub fn schmidt_spectrum(&self, cut_after: SiteIndex) -> Result<Vec<f64>> {
        let sites = self.num_sites;
        if cut_after.0 < 1 || cut_after.0 >= sites {
            return Err(Error::CutOutOfRange {
                cut: cut_after.0,
                sites,
            });
        }
        let left_dim = 1usize << cut_after.0;
        let right_dim = 1usize << (sites - cut_after.0);
        // Left block = low bits, so column-major storage lines up with the
        // amplitude layout exactly.
        let matrix = DMatrix::from_column_slice(left_dim, right_dim, &self.amplitudes);
        let mut spectrum: Vec<f64> = matrix
            .singular_values()
            .iter()
            .map(|s| s * s)
            .collect();
        let total: f64 = spectrum.iter().sum();
        if total == 0.0 || !total.is_finite() {
            return Err(Error::DegenerateState);
        }
        for value in &mut spectrum {
            *value /= total;
        }
        spectrum.sort_by(|a, b| b.total_cmp(a));
        Ok(spectrum)
    }
}

pub(crate) fn inner_slices(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
