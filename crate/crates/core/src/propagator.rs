//! Exact propagation on the truncated space from a single Hermitian
//! eigendecomposition of the (time-independent) Hamiltonian.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::jacobi::{eigh, max_abs, JacobiOptions};
use crate::model::{HamiltonianMatrix, JointState};

/// `H = V diag(lambda) V†`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |V†V - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.eigenvectors.adjoint() * &self.eigenvectors - DMatrix::identity(n, n)))
    }

    /// `max |V diag(lambda) V† - H|`.
    pub fn residual(&self, h: &HamiltonianMatrix) -> f64 {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.eigenvectors[(i, j)] * self.eigenvalues[j]
        });
        max_abs(&(scaled * self.eigenvectors.adjoint() - h.matrix()))
    }

    /// Precomputes the eigenbasis coefficients of `psi0` for repeated evolution.
    pub fn propagator(&self, psi0: &JointState) -> Propagator<'_> {
        let psi = DVector::from_column_slice(psi0.amplitudes());
        Propagator {
            sd: self,
            initial: psi0.clone(),
            coefficients: self.eigenvectors.ad_mul(&psi),
        }
    }
}

/// Diagonalizes `h` with the cyclic Jacobi solver.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<SpectralDecomposition> {
    let eig = eigh(h.matrix(), JacobiOptions::default())?;
    Ok(SpectralDecomposition {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    })
}

/// A fixed initial state expressed in the eigenbasis.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    sd: &'a SpectralDecomposition,
    initial: JointState,
    coefficients: DVector<C64>,
}

impl Propagator<'_> {
    /// `Psi(t) = V exp(-i diag(lambda) t) V† Psi(0)` at physical time `t`.
    /// At `t = 0` the initial state is returned unchanged.
    pub fn at(&self, t_phys: f64) -> JointState {
        if t_phys == 0.0 {
            return self.initial.clone();
        }
        let phased = DVector::from_iterator(
            self.coefficients.len(),
            self.coefficients
                .iter()
                .zip(&self.sd.eigenvalues)
                .map(|(c, &lambda)| c * C64::from_polar(1.0, -lambda * t_phys)),
        );
        let psi = &self.sd.eigenvectors * phased;
        JointState::from_amplitudes(psi.as_slice().to_vec())
    }

    /// Energy `<Psi|H|Psi>`, constant in time by construction.
    pub fn energy(&self) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.sd.eigenvalues)
            .map(|(c, l)| c.norm_sqr() * l)
            .sum()
    }
}

pub fn evolve(sd: &SpectralDecomposition, psi0: &JointState, t_phys: f64) -> JointState {
    sd.propagator(psi0).at(t_phys)
}

/// Converts rescaled time `Omega t / 2 pi` to physical time (Omega = 1).
pub fn rescaled_to_physical(t_rescaled: f64) -> f64 {
    TAU * t_rescaled
}

/// States on a grid of rescaled times, each evaluated directly from the
/// spectral form.
pub fn time_series<'a>(
    sd: &'a SpectralDecomposition,
    psi0: &JointState,
    grid: &'a [f64],
) -> impl Iterator<Item = JointState> + 'a {
    let prop = sd.propagator(psi0);
    grid.iter().map(move |&t| prop.at(rescaled_to_physical(t)))
}

/// The uniform grid `k * dt` for `k = 0, 1, ...` up to `t_max` (inclusive,
/// within a relative slack of 1e-9 steps).
pub fn uniform_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt + 1e-9).floor() as usize;
    (0..=steps).map(|k| k as f64 * dt).collect()
}
