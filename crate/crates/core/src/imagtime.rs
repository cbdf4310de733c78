//! Imaginary-time propagation `exp(-theta H)|psi>` by truncated Taylor
//! series with substepping.
//!
//! The operator is shifted by its diagonal mean `mu = Tr H / 2^L`, the
//! interval is cut into `s = ceil(theta * B / cap)` substeps where `B`
//! bounds the spectral radius of `H - mu`, and each substep sums Taylor
//! terms until two consecutive terms fall below the tolerance. After every
//! substep the amplitudes are renormalized and the removed scale (together
//! with the `-dt * mu` shift) goes into the state's log-norm offset, so
//! norms spanning hundreds of decades stay representable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerms;
use crate::hilbert::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorConfig {
    pub tolerance: f64,
    pub max_order: usize,
    pub substep_cap: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_order: 64,
            substep_cap: 1.0,
        }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-6) {
            return Err(Error::InvalidPropagator(format!(
                "tolerance must lie in (0, 1e-6], got {}",
                self.tolerance
            )));
        }
        if self.max_order < 8 {
            return Err(Error::InvalidPropagator(format!(
                "max_order must be at least 8, got {}",
                self.max_order
            )));
        }
        if !(self.substep_cap > 0.0 && self.substep_cap.is_finite()) {
            return Err(Error::InvalidPropagator(format!(
                "substep_cap must be positive, got {}",
                self.substep_cap
            )));
        }
        Ok(())
    }
}

/// Strictly increasing list of positive inverse temperatures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BetaGrid(Vec<f64>);

/// Tolerance used when matching a requested beta against grid points.
pub const BETA_MATCH_TOL: f64 = 1e-9;

impl BetaGrid {
    pub fn new(checkpoints: Vec<f64>) -> Result<Self> {
        if checkpoints.is_empty() {
            return Err(Error::InvalidArgument("beta grid is empty".into()));
        }
        if checkpoints.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::InvalidArgument("beta values must be positive and finite".into()));
        }
        if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("beta grid must be strictly increasing".into()));
        }
        Ok(Self(checkpoints))
    }

    pub fn single(beta: f64) -> Result<Self> {
        Self::new(vec![beta])
    }

    /// `step, 2 step, ..., count * step`, with values rounded to 12 decimals
    /// so that e.g. `30 * 0.1` lands exactly on `3.0`.
    pub fn uniform(step: f64, count: usize) -> Result<Self> {
        Self::new(
            (1..=count)
                .map(|k| (k as f64 * step * 1e12).round() / 1e12)
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        *self.0.last().expect("grid is never empty")
    }

    pub fn position(&self, beta: f64) -> Option<usize> {
        self.0.iter().position(|b| (b - beta).abs() <= BETA_MATCH_TOL)
    }
}

impl TryFrom<Vec<f64>> for BetaGrid {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<BetaGrid> for Vec<f64> {
    fn from(grid: BetaGrid) -> Self {
        grid.0
    }
}

/// Values recorded at one beta checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub beta: f64,
    /// `ln <psi|exp(-beta H)|psi>`
    pub log_sq_norm: f64,
    /// `<phi|O|phi> / <phi|phi>` with `phi = exp(-beta H / 2)|psi>`
    pub obs_value: f64,
}

/// Reusable Taylor propagator for one Hamiltonian.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    terms: &'a HamiltonianTerms,
    cfg: PropagatorConfig,
    shift: f64,
    bound: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(terms: &'a HamiltonianTerms, cfg: PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            terms,
            cfg,
            shift: terms.trace_shift(),
            bound: terms.shifted_spectral_bound(),
        })
    }

    /// Number of substeps used for an interval `theta`.
    pub fn substeps(&self, theta: f64) -> usize {
        ((theta * self.bound / self.cfg.substep_cap).ceil() as usize).max(1)
    }

    /// Replace `state` by `exp(-theta H) state`, normalized, with the scale
    /// folded into the log-norm offset.
    pub fn evolve_in_place(&self, state: &mut StateVector, theta: f64) -> Result<()> {
        state.check_sites(self.terms.num_sites())?;
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "imaginary time must be finite and non-negative, got {theta}"
            )));
        }
        if theta == 0.0 {
            return Ok(());
        }
        state.normalize()?;
        let steps = self.substeps(theta);
        let dt = theta / steps as f64;
        let dim = state.dim();
        let mut term = vec![Complex64::new(0.0, 0.0); dim];
        let mut next = vec![Complex64::new(0.0, 0.0); dim];
        for _ in 0..steps {
            self.taylor_step(state.amplitudes_mut(), dt, &mut term, &mut next)?;
            state.normalize()?;
            state.add_log_norm(-dt * self.shift);
        }
        Ok(())
    }

    /// `x <- sum_k (-dt (H - mu))^k / k! x`, unnormalized.
    fn taylor_step(
        &self,
        x: &mut [Complex64],
        dt: f64,
        term: &mut Vec<Complex64>,
        next: &mut Vec<Complex64>,
    ) -> Result<()> {
        let x_norm: f64 = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        // ||exp(-dt (H - mu)) x|| >= exp(-dt B) ||x||
        let scale = x_norm * (-dt * self.bound).exp();
        let tol = self.cfg.tolerance;
        term.copy_from_slice(x);
        let mut prev_norm = x_norm;
        for k in 1..=self.cfg.max_order {
            self.terms.apply_into(term, next);
            let coef = -dt / k as f64;
            let mut norm_sqr = 0.0;
            for ((n, t), xi) in next.iter_mut().zip(term.iter()).zip(x.iter_mut()) {
                *n = (*n - t * self.shift) * coef;
                *xi += *n;
                norm_sqr += n.norm_sqr();
            }
            std::mem::swap(term, next);
            let norm = norm_sqr.sqrt();
            if norm + prev_norm <= tol * scale {
                return Ok(());
            }
            if k == self.cfg.max_order {
                return Err(Error::OrderExhausted {
                    order: k,
                    residual: (norm + prev_norm) / scale,
                    tolerance: tol,
                });
            }
            prev_norm = norm;
        }
        unreachable!("max_order is validated to be at least 8")
    }

    /// Sweep through `grid`, evolving by half of each beta increment and
    /// recording `ln <psi|exp(-beta H)|psi>` and the normalized expectation
    /// of `observable` at every checkpoint.
    pub fn sweep(
        &self,
        state: &StateVector,
        grid: &BetaGrid,
        observable: &HamiltonianTerms,
    ) -> Result<Vec<Checkpoint>> {
        state.check_sites(self.terms.num_sites())?;
        state.check_sites(observable.num_sites())?;
        let mut phi = state.clone();
        phi.normalize()?;
        let mut scratch = vec![Complex64::new(0.0, 0.0); phi.dim()];
        let mut reached = 0.0;
        let mut out = Vec::with_capacity(grid.len());
        for &beta in grid.values() {
            self.evolve_in_place(&mut phi, 0.5 * (beta - reached))?;
            reached = beta;
            out.push(Checkpoint {
                beta,
                log_sq_norm: 2.0 * phi.log_norm_offset(),
                obs_value: observable.expectation_with(phi.amplitudes(), &mut scratch),
            });
        }
        Ok(out)
    }
}

/// `exp(-theta H)|psi>` as normalized amplitudes plus log-norm offset.
pub fn evolve(
    state: &StateVector,
    terms: &HamiltonianTerms,
    theta: f64,
    cfg: &PropagatorConfig,
) -> Result<StateVector> {
    let mut out = state.clone();
    Propagator::new(terms, *cfg)?.evolve_in_place(&mut out, theta)?;
    Ok(out)
}

/// Checkpointed evolution over a beta grid; see [`Propagator::sweep`].
pub fn evolve_with_checkpoints(
    state: &StateVector,
    terms: &HamiltonianTerms,
    grid: &BetaGrid,
    observable: &HamiltonianTerms,
    cfg: &PropagatorConfig,
) -> Result<Vec<Checkpoint>> {
    Propagator::new(terms, *cfg)?.sweep(state, grid, observable)
}
