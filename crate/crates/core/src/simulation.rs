//! One diagonalization, many observables: the run pipeline shared by all commands.

use rayon::prelude::*;

use crate::analysis::{detect_events, DetectorConfig, EventReport, Sample};
use crate::error::Result;
use crate::model::{build_hamiltonian, initial_state, HamiltonianMatrix, InitialKind, SystemParams};
use crate::observables::{inversion, mutual_decomposition, reduce_ion, BranchTriple, EntropyRecord};
use crate::propagator::{diagonalize, rescaled_to_physical, Propagator, SpectralDecomposition};

/// A diagonalized model ready to evolve any of its initial states.
#[derive(Debug, Clone)]
pub struct Simulation {
    params: SystemParams,
    hamiltonian: HamiltonianMatrix,
    spectrum: SpectralDecomposition,
}

struct Branches<'a> {
    ground: Propagator<'a>,
    excited: Propagator<'a>,
    cat: Propagator<'a>,
}

impl Branches<'_> {
    fn triple(&self, t_phys: f64) -> BranchTriple {
        BranchTriple {
            ground: reduce_ion(&self.ground.at(t_phys)),
            excited: reduce_ion(&self.excited.at(t_phys)),
            cat: reduce_ion(&self.cat.at(t_phys)),
        }
    }
}

impl Simulation {
    pub fn new(params: SystemParams) -> Result<Self> {
        let hamiltonian = build_hamiltonian(&params);
        let spectrum = diagonalize(&hamiltonian)?;
        Ok(Self {
            params,
            hamiltonian,
            spectrum,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn hamiltonian(&self) -> &HamiltonianMatrix {
        &self.hamiltonian
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn propagator(&self, kind: InitialKind) -> Propagator<'_> {
        self.spectrum.propagator(&initial_state(kind, &self.params))
    }

    fn branches(&self) -> Branches<'_> {
        Branches {
            ground: self.propagator(InitialKind::Ground),
            excited: self.propagator(InitialKind::Excited),
            cat: self.propagator(InitialKind::Cat),
        }
    }

    /// Observables of `initial` on a grid of rescaled times. With
    /// `with_mutual`, the ground/excited/cat triple is evolved alongside to
    /// fill the mutual-entropy fields.
    pub fn records(&self, initial: InitialKind, grid: &[f64], with_mutual: bool) -> Result<Vec<EntropyRecord>> {
        let main = self.propagator(initial);
        let branches = with_mutual.then(|| self.branches());
        grid.par_iter()
            .map(|&t| {
                let t_phys = rescaled_to_physical(t);
                let psi = main.at(t_phys);
                let triple = branches.as_ref().map(|b| b.triple(t_phys));
                EntropyRecord::evaluate(t, &psi, triple.as_ref())
            })
            .collect()
    }

    /// Ion reductions of the three branches on the grid.
    pub fn branch_triples(&self, grid: &[f64]) -> Vec<BranchTriple> {
        let branches = self.branches();
        grid.par_iter()
            .map(|&t| branches.triple(rescaled_to_physical(t)))
            .collect()
    }

    /// The `S(P)` series (undefined samples dropped) and the ground-product
    /// inversion on the grid.
    pub fn event_series(&self, grid: &[f64]) -> (Vec<Sample>, Vec<Sample>) {
        let triples = self.branch_triples(grid);
        let sp = grid
            .iter()
            .zip(&triples)
            .filter_map(|(&t, b)| mutual_decomposition(&b.ground, &b.excited, &b.cat).s_p.map(|v| (t, v)))
            .collect();
        let inv = grid.iter().zip(&triples).map(|(&t, b)| (t, inversion(&b.ground))).collect();
        (sp, inv)
    }

    /// Collapse/revival events of the mutual-entropy run.
    pub fn detect(&self, grid: &[f64], cfg: &DetectorConfig) -> Result<EventReport> {
        let (sp, inv) = self.event_series(grid);
        detect_events(&sp, &inv, cfg)
    }
}
