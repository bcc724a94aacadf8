//! Truncated-basis Hamiltonian for a two-level ion driven by a laser in a
//! q-deformed trap, and the initial states it is started from.
//!
//! Joint basis ordering: index `m` is `|g, m>` and index `levels + m` is
//! `|e, m>`. Energies are in units of the Rabi frequency with `hbar = 1`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qalgebra::{coherent_amplitudes, q_factorials, q_number, DeformationParams};

/// Dimensionless model constants, all relative to the Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Trap frequency.
    pub omega_bar: f64,
    /// Detuning `omega_atom - omega_laser`.
    pub delta_bar: f64,
    /// Lamb-Dicke-like coupling in `F_q`.
    pub epsilon_bar: f64,
    /// Coherent amplitude of the motional state.
    pub beta: C64,
    pub deformation: DeformationParams,
}

impl SystemParams {
    /// The reference parameter set (`omega = 50, Delta = -50, eps = 0.05,
    /// beta = 4, n_max = 32`) at the given deformation.
    pub fn reference(tau: f64) -> Result<Self> {
        Self::new(50.0, -50.0, 0.05, C64::new(4.0, 0.0), DeformationParams::new(tau, 32)?)
    }

    pub fn new(
        omega_bar: f64,
        delta_bar: f64,
        epsilon_bar: f64,
        beta: C64,
        deformation: DeformationParams,
    ) -> Result<Self> {
        for (field, v) in [
            ("omega_bar", omega_bar),
            ("delta_bar", delta_bar),
            ("epsilon_bar", epsilon_bar),
            ("beta", beta.re),
            ("beta", beta.im),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, format!("must be finite, got {v}")));
            }
        }
        if deformation.n_max() < 1 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        Ok(Self {
            omega_bar,
            delta_bar,
            epsilon_bar,
            beta,
            deformation,
        })
    }

    /// Fock levels per ion branch.
    pub fn levels(&self) -> usize {
        self.deformation.levels()
    }

    pub fn dim(&self) -> usize {
        2 * self.levels()
    }
}

/// Amplitudes `{g_m, e_m}` of a joint ion-motion state.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amps: Vec<C64>,
}

impl JointState {
    /// Builds a state from its ground- and excited-branch amplitudes.
    ///
    /// Panics if the two branches differ in length.
    pub fn from_branches(g: &[C64], e: &[C64]) -> Self {
        assert_eq!(g.len(), e.len(), "branch lengths differ");
        let mut amps = Vec::with_capacity(2 * g.len());
        amps.extend_from_slice(g);
        amps.extend_from_slice(e);
        Self { amps }
    }

    /// Wraps a full amplitude vector in basis order. Panics on odd length.
    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        assert!(amps.len().is_multiple_of(2), "joint dimension must be even");
        Self { amps }
    }

    pub fn levels(&self) -> usize {
        self.amps.len() / 2
    }

    pub fn ground(&self) -> &[C64] {
        &self.amps[..self.levels()]
    }

    pub fn excited(&self) -> &[C64] {
        &self.amps[self.levels()..]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Which initial state to prepare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    /// `|g> ⊗ |beta>_q`
    Ground,
    /// `|e> ⊗ |-beta>_q`
    Excited,
    /// `(|g, beta>_q + |e, -beta>_q) / sqrt 2`
    Cat,
}

impl FromStr for InitialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ground" => Ok(Self::Ground),
            "excited" => Ok(Self::Excited),
            "cat" => Ok(Self::Cat),
            other => Err(Error::invalid(
                "initial",
                format!("expected ground, excited or cat, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ground => "ground",
            Self::Excited => "excited",
            Self::Cat => "cat",
        })
    }
}

/// Dense Hermitian Hamiltonian on the joint truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix(DMatrix<C64>);

impl HamiltonianMatrix {
    /// Wraps an arbitrary matrix; Hermiticity is the caller's responsibility.
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "Hamiltonian must be square");
        Self(m)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `max |H - H†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, psi: &JointState) -> f64 {
        let a = psi.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            let row: C64 = a.iter().enumerate().map(|(j, aj)| self.0[(i, j)] * aj).sum();
            acc += ai.conj() * row;
        }
        acc.re
    }
}

/// Matrix of `F_q = e^{-eps^2/2} e^{i eps A†} e^{i eps A}` on the truncated Fock space.
///
/// Element `<m|F|n>` is the normal-ordered double sum collapsed onto the
/// single index `k` (number of annihilations); the creation count is
/// `m - n + k`. Ordinary factorials come from the exponential series,
/// bracketed ones from the deformed ladder operators.
pub fn fq_matrix(params: &SystemParams) -> DMatrix<C64> {
    let d = params.levels();
    let eps = params.epsilon_bar;
    let qfact = q_factorials(&params.deformation);
    let fact: Vec<f64> = std::iter::once(1.0)
        .chain((1..d).scan(1.0, |acc, k| {
            *acc *= k as f64;
            Some(*acc)
        }))
        .collect();
    let prefactor = (-0.5 * eps * eps).exp();
    let ieps = C64::new(0.0, eps);

    DMatrix::from_fn(d, d, |m, n| {
        let norm = (qfact[n] * qfact[m]).sqrt();
        let k_min = n.saturating_sub(m);
        let sum: C64 = (k_min..=n)
            .map(|k| {
                let creations = m + k - n;
                let power = ieps.powu((creations + k) as u32);
                power * (norm / (fact[k] * fact[creations] * qfact[n - k]))
            })
            .sum();
        sum * prefactor
    })
}

/// Builds the Hamiltonian
/// `1/2 omega (A A† + A† A) + 1/2 Delta sigma_z + 1/2 (F sigma+ + F† sigma-)`
/// with `<e|sigma_z|e> = +1`.
pub fn build_hamiltonian(params: &SystemParams) -> HamiltonianMatrix {
    let d = params.levels();
    let p = &params.deformation;
    let f = fq_matrix(params);
    let mut h = DMatrix::<C64>::zeros(2 * d, 2 * d);

    for m in 0..d {
        let trap = 0.5 * params.omega_bar * (q_number(m + 1, p) + q_number(m, p));
        h[(m, m)] = C64::new(trap - 0.5 * params.delta_bar, 0.0);
        h[(d + m, d + m)] = C64::new(trap + 0.5 * params.delta_bar, 0.0);
    }
    for m in 0..d {
        for n in 0..d {
            let coupling = 0.5 * f[(m, n)];
            // sigma+ raises g -> e: row in the e-block, column in the g-block
            h[(d + m, n)] = coupling;
            h[(n, d + m)] = coupling.conj();
        }
    }
    HamiltonianMatrix(h)
}

/// Prepares one of the three initial states for the given parameters.
pub fn initial_state(kind: InitialKind, params: &SystemParams) -> JointState {
    let p = &params.deformation;
    let zeros = vec![C64::new(0.0, 0.0); params.levels()];
    match kind {
        InitialKind::Ground => {
            JointState::from_branches(&coherent_amplitudes(params.beta, p), &zeros)
        }
        InitialKind::Excited => {
            JointState::from_branches(&zeros, &coherent_amplitudes(-params.beta, p))
        }
        InitialKind::Cat => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let g: Vec<C64> = coherent_amplitudes(params.beta, p).iter().map(|c| c * s).collect();
            let e: Vec<C64> = coherent_amplitudes(-params.beta, p).iter().map(|c| c * s).collect();
            JointState::from_branches(&g, &e)
        }
    }
}
