//! Open spin-1/2 chain Hamiltonians as lists of two-site bond terms and
//! single-site field terms, applied to state vectors without ever forming
//! the full matrix.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{SiteIndex, StateVector};

pub type Matrix2c = Matrix2<Complex64>;
pub type Matrix4c = Matrix4<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Spin-1/2 operators S = sigma / 2.
pub fn spin_x() -> Matrix2c {
    Matrix2c::new(c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0))
}

pub fn spin_y() -> Matrix2c {
    Matrix2c::new(c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0))
}

pub fn spin_z() -> Matrix2c {
    Matrix2c::new(c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0))
}

/// Two-site operator `left (x) right` in the bond-local basis, where the
/// local index is `bit(left site) + 2 * bit(right site)`.
pub fn two_site(left: &Matrix2c, right: &Matrix2c) -> Matrix4c {
    let k = right.kronecker(left);
    Matrix4c::from_fn(|r, col| k[(r, col)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `J sum S_i . S_{i+1}`
    Heisenberg,
    /// `J sum (SxSx + SySy + delta SzSz) + h sum (-1)^i Sz_i`
    XxzStaggered,
    /// `J sum SzSz + h_x sum Sx_i`
    TransverseIsing,
    /// `J sum SzSz + sum (h_z Sz_i + h_x Sx_i)`
    MixedIsing,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Heisenberg => "heisenberg",
            ModelKind::XxzStaggered => "xxz_staggered",
            ModelKind::TransverseIsing => "transverse_ising",
            ModelKind::MixedIsing => "mixed_ising",
        }
    }
}

fn default_sites() -> usize {
    2
}

fn default_one() -> f64 {
    1.0
}

/// Model parameters. Energies are in units of `j`; parameters that the
/// chosen `kind` does not use are kept but ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default = "default_sites")]
    pub sites: usize,
    #[serde(default = "default_one")]
    pub j: f64,
    #[serde(default = "default_one")]
    pub delta: f64,
    #[serde(default)]
    pub h_stag: f64,
    #[serde(default)]
    pub h_x: f64,
    #[serde(default)]
    pub h_z: f64,
}

impl ModelSpec {
    fn base(kind: ModelKind, sites: usize, j: f64) -> Self {
        Self {
            kind,
            sites,
            j,
            delta: 1.0,
            h_stag: 0.0,
            h_x: 0.0,
            h_z: 0.0,
        }
    }

    pub fn heisenberg(sites: usize, j: f64) -> Self {
        Self::base(ModelKind::Heisenberg, sites, j)
    }

    pub fn xxz_staggered(sites: usize, j: f64, delta: f64, h_stag: f64) -> Self {
        Self {
            delta,
            h_stag,
            ..Self::base(ModelKind::XxzStaggered, sites, j)
        }
    }

    pub fn transverse_ising(sites: usize, j: f64, h_x: f64) -> Self {
        Self {
            h_x,
            ..Self::base(ModelKind::TransverseIsing, sites, j)
        }
    }

    pub fn mixed_ising(sites: usize, j: f64, h_x: f64, h_z: f64) -> Self {
        Self {
            h_x,
            h_z,
            ..Self::base(ModelKind::MixedIsing, sites, j)
        }
    }

    pub fn with_sites(&self, sites: usize) -> Self {
        Self {
            sites,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::InvalidModel(format!(
                "chain needs at least 2 sites, got {}",
                self.sites
            )));
        }
        if self.sites > crate::hilbert::MAX_SITES {
            return Err(Error::InvalidModel(format!(
                "{} sites exceeds the supported maximum of {}",
                self.sites,
                crate::hilbert::MAX_SITES
            )));
        }
        if self.j == 0.0 || !self.j.is_finite() {
            return Err(Error::InvalidModel("coupling j must be finite and nonzero".into()));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("h_stag", self.h_stag),
            ("h_x", self.h_x),
            ("h_z", self.h_z),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<HamiltonianTerms> {
        build_hamiltonian(self)
    }
}

/// Compile a model into bond and field terms.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<HamiltonianTerms> {
    spec.validate()?;
    let (sx, sy, sz) = (spin_x(), spin_y(), spin_z());
    let j = c(spec.j, 0.0);
    let bond = match spec.kind {
        ModelKind::Heisenberg => (two_site(&sx, &sx) + two_site(&sy, &sy) + two_site(&sz, &sz)) * j,
        ModelKind::XxzStaggered => {
            (two_site(&sx, &sx)
                + two_site(&sy, &sy)
                + two_site(&sz, &sz) * c(spec.delta, 0.0))
                * j
        }
        ModelKind::TransverseIsing | ModelKind::MixedIsing => two_site(&sz, &sz) * j,
    };
    let bonds = (1..spec.sites).map(|i| (SiteIndex(i), bond)).collect();

    let field_at = |site: usize| -> Matrix2c {
        match spec.kind {
            ModelKind::Heisenberg => Matrix2c::zeros(),
            ModelKind::XxzStaggered => {
                let sign = if site.is_multiple_of(2) { 1.0 } else { -1.0 };
                sz * c(sign * spec.h_stag, 0.0)
            }
            ModelKind::TransverseIsing => sx * c(spec.h_x, 0.0),
            ModelKind::MixedIsing => sx * c(spec.h_x, 0.0) + sz * c(spec.h_z, 0.0),
        }
    };
    let fields = (1..=spec.sites)
        .map(|i| (SiteIndex(i), field_at(i)))
        .filter(|(_, m)| m.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
        .collect();

    HamiltonianTerms::new(spec.sites, bonds, fields)
}

/// Nonzero entries of a bond operator, applied at bit position `shift`.
#[derive(Debug, Clone)]
struct SparseBond {
    shift: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

/// A Hamiltonian (or observable) given as a sum of bond terms on sites
/// `(i, i + 1)` and single-site field terms. Immutable once built.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    num_sites: usize,
    bonds: Vec<(SiteIndex, Matrix4c)>,
    fields: Vec<(SiteIndex, Matrix2c)>,
    compiled: Vec<SparseBond>,
}

impl HamiltonianTerms {
    pub fn new(
        num_sites: usize,
        bonds: Vec<(SiteIndex, Matrix4c)>,
        fields: Vec<(SiteIndex, Matrix2c)>,
    ) -> Result<Self> {
        if num_sites < 2 {
            return Err(Error::InvalidModel(format!(
                "chain needs at least 2 sites, got {num_sites}"
            )));
        }
        for (site, m) in &bonds {
            if site.0 < 1 || site.0 >= num_sites {
                return Err(Error::InvalidModel(format!(
                    "bond at site {} outside 1..{}",
                    site.0,
                    num_sites - 1
                )));
            }
            if (m - m.adjoint()).camax() > HERMITIAN_TOL {
                return Err(Error::InvalidModel(format!("bond at site {} is not Hermitian", site.0)));
            }
        }
        for (site, m) in &fields {
            if site.0 < 1 || site.0 > num_sites {
                return Err(Error::InvalidModel(format!(
                    "field at site {} outside 1..{num_sites}",
                    site.0
                )));
            }
            if (m - m.adjoint()).camax() > HERMITIAN_TOL {
                return Err(Error::InvalidModel(format!("field at site {} is not Hermitian", site.0)));
            }
        }
        let mut terms = Self {
            num_sites,
            bonds,
            fields,
            compiled: Vec::new(),
        };
        terms.compiled = terms
            .bond_hamiltonians()
            .into_iter()
            .enumerate()
            .filter_map(|(b, m)| {
                let entries: Vec<_> = (0..4)
                    .flat_map(|r| (0..4).map(move |col| (r, col)))
                    .filter(|&(r, col)| m[(r, col)] != Complex64::new(0.0, 0.0))
                    .map(|(r, col)| (r, col, m[(r, col)]))
                    .collect();
                (!entries.is_empty()).then_some(SparseBond { shift: b, entries })
            })
            .collect();
        Ok(terms)
    }

    /// A term list with no terms, i.e. the zero operator.
    pub fn empty(num_sites: usize) -> Result<Self> {
        Self::new(num_sites, Vec::new(), Vec::new())
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn bonds(&self) -> &[(SiteIndex, Matrix4c)] {
        &self.bonds
    }

    pub fn fields(&self) -> &[(SiteIndex, Matrix2c)] {
        &self.fields
    }

    /// One Hermitian 4x4 matrix per bond `(i, i + 1)`, `i = 1..L-1`, holding
    /// the bond terms plus shares of the field terms. A field on an interior
    /// site is split evenly between its two bonds; the end sites give their
    /// whole field to their only bond. The matrices sum (embedded) to the
    /// full operator.
    pub fn bond_hamiltonians(&self) -> Vec<Matrix4c> {
        let l = self.num_sites;
        let id = Matrix2c::identity();
        let mut out = vec![Matrix4c::zeros(); l - 1];
        for (site, m) in &self.bonds {
            out[site.0 - 1] += m;
        }
        for (site, m) in &self.fields {
            let s = site.0;
            let share = if s == 1 || s == l { 1.0 } else { 0.5 };
            let scaled = m * c(share, 0.0);
            // bond (s-1, s): the field sits on the right site
            if s > 1 {
                out[s - 2] += two_site(&id, &scaled);
            }
            // bond (s, s+1): the field sits on the left site
            if s < l {
                out[s - 1] += two_site(&scaled, &id);
            }
        }
        out
    }

    /// `Tr H / 2^L`, from the traces of the local terms.
    pub fn trace_shift(&self) -> f64 {
        let bonds: f64 = self.bonds.iter().map(|(_, m)| m.trace().re / 4.0).sum();
        let fields: f64 = self.fields.iter().map(|(_, m)| m.trace().re / 2.0).sum();
        bonds + fields
    }

    /// Upper bound on the spectral radius: sum of the spectral norms of all
    /// terms.
    pub fn spectral_bound(&self) -> f64 {
        let bonds: f64 = self.bonds.iter().map(|(_, m)| hermitian_norm4(m)).sum();
        let fields: f64 = self.fields.iter().map(|(_, m)| hermitian_norm2(m)).sum();
        bonds + fields
    }

    /// Like [`spectral_bound`](Self::spectral_bound) but for `H - Tr H / 2^L`,
    /// with each term shifted by its own mean eigenvalue.
    pub fn shifted_spectral_bound(&self) -> f64 {
        let bonds: f64 = self
            .bonds
            .iter()
            .map(|(_, m)| hermitian_norm4(&(m - Matrix4c::identity() * (m.trace() / 4.0))))
            .sum();
        let fields: f64 = self
            .fields
            .iter()
            .map(|(_, m)| hermitian_norm2(&(m - Matrix2c::identity() * (m.trace() / 2.0))))
            .sum();
        bonds + fields
    }

    /// `out = H * input`, overwriting `out`.
    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(input.len(), 1 << self.num_sites);
        debug_assert_eq!(out.len(), input.len());
        out.fill(Complex64::new(0.0, 0.0));
        let groups = input.len() >> 2;
        for bond in &self.compiled {
            let p = bond.shift;
            let low_mask = (1usize << p) - 1;
            let lo = 1usize << p;
            let hi = 2usize << p;
            for k in 0..groups {
                let base = ((k & !low_mask) << 2) | (k & low_mask);
                let idx = [base, base | lo, base | hi, base | lo | hi];
                let v = [input[idx[0]], input[idx[1]], input[idx[2]], input[idx[3]]];
                for &(r, col, val) in &bond.entries {
                    out[idx[r]] += val * v[col];
                }
            }
        }
    }

    /// `H|psi>`; the log-norm offset is carried over unchanged.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        state.check_sites(self.num_sites)?;
        let mut out = state.clone();
        self.apply_into(state.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// `<psi|H|psi> / <psi|psi>` of the stored amplitudes.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        state.check_sites(self.num_sites)?;
        let mut scratch = vec![Complex64::new(0.0, 0.0); state.dim()];
        Ok(self.expectation_with(state.amplitudes(), &mut scratch))
    }

    pub(crate) fn expectation_with(&self, amps: &[Complex64], scratch: &mut [Complex64]) -> f64 {
        self.apply_into(amps, scratch);
        let num = crate::hilbert::inner_slices(amps, scratch).re;
        let den: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        num / den
    }
}

/// Free-function form of [`HamiltonianTerms::apply`].
pub fn apply_h(terms: &HamiltonianTerms, state: &StateVector) -> Result<StateVector> {
    terms.apply(state)
}

/// Free-function form of [`HamiltonianTerms::expectation`].
pub fn expectation(terms: &HamiltonianTerms, state: &StateVector) -> Result<f64> {
    terms.expectation(state)
}

/// Free-function form of [`HamiltonianTerms::spectral_bound`].
pub fn spectral_bound(terms: &HamiltonianTerms) -> f64 {
    terms.spectral_bound()
}

pub(crate) fn hermitian_norm4(m: &Matrix4c) -> f64 {
    SymmetricEigen::new(*m).eigenvalues.amax()
}

fn hermitian_norm2(m: &Matrix2c) -> f64 {
    SymmetricEigen::new(*m).eigenvalues.amax()
}
