//! Run configuration: a flat JSON document, overridable from the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InitialKind, SystemParams};
use crate::observables::EntropyRecord;
use crate::propagator::uniform_grid;
use crate::qalgebra::DeformationParams;

/// An output column. Names are the CSV header spellings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Column {
    T,
    Pg,
    Pe,
    ReC,
    ImC,
    Inv,
    SPaper,
    SVn,
    SVnMotion,
    I,
    SP,
    SC,
    InvGround,
    InvExcited,
}

impl Column {
    pub const ALL: [Column; 14] = [
        Column::T,
        Column::Pg,
        Column::Pe,
        Column::ReC,
        Column::ImC,
        Column::Inv,
        Column::SPaper,
        Column::SVn,
        Column::SVnMotion,
        Column::I,
        Column::SP,
        Column::SC,
        Column::InvGround,
        Column::InvExcited,
    ];

    /// The default column set of a run.
    pub const STANDARD: [Column; 11] = [
        Column::T,
        Column::Pg,
        Column::Pe,
        Column::ReC,
        Column::ImC,
        Column::Inv,
        Column::SPaper,
        Column::SVn,
        Column::I,
        Column::SP,
        Column::SC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::T => "t",
            Column::Pg => "Pg",
            Column::Pe => "Pe",
            Column::ReC => "ReC",
            Column::ImC => "ImC",
            Column::Inv => "Inv",
            Column::SPaper => "S_paper",
            Column::SVn => "S_vN",
            Column::SVnMotion => "S_vN_cm",
            Column::I => "I",
            Column::SP => "SP",
            Column::SC => "SC",
            Column::InvGround => "Inv_g",
            Column::InvExcited => "Inv_e",
        }
    }

    /// Whether the column needs the ground/excited/cat branch triple.
    pub fn needs_branches(self) -> bool {
        matches!(
            self,
            Column::I | Column::SP | Column::SC | Column::InvGround | Column::InvExcited
        )
    }

    pub fn value(self, r: &EntropyRecord) -> Option<f64> {
        match self {
            Column::T => Some(r.t_rescaled),
            Column::Pg => Some(r.ion.pg),
            Column::Pe => Some(r.ion.pe),
            Column::ReC => Some(r.ion.c_ge.re),
            Column::ImC => Some(r.ion.c_ge.im),
            Column::Inv => Some(r.inv),
            Column::SPaper => Some(r.s_paper),
            Column::SVn => Some(r.s_vn),
            Column::SVnMotion => Some(r.s_vn_motion),
            Column::I => r.i_mutual,
            Column::SP => r.s_p,
            Column::SC => r.s_c,
            Column::InvGround => r.inv_ground,
            Column::InvExcited => r.inv_excited,
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Column::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::invalid("emit", format!("unknown column `{s}`")))
    }
}

impl TryFrom<String> for Column {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Column> for String {
    fn from(c: Column) -> String {
        c.name().to_string()
    }
}

/// Parses a comma-separated column list.
pub fn parse_columns(list: &str) -> Result<Vec<Column>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// Everything needed for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega_bar: f64,
    pub delta_bar: f64,
    pub epsilon_bar: f64,
    /// Real part of the coherent amplitude.
    pub beta: f64,
    pub beta_im: f64,
    pub tau: f64,
    pub n_max: usize,
    pub initial: InitialKind,
    /// End of the grid in rescaled time.
    pub t_max: f64,
    /// Grid step in rescaled time.
    pub dt: f64,
    pub output_path: Option<PathBuf>,
    pub emit: Vec<Column>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega_bar: 50.0,
            delta_bar: -50.0,
            epsilon_bar: 0.05,
            beta: 4.0,
            beta_im: 0.0,
            tau: 0.004,
            n_max: 32,
            initial: InitialKind::Cat,
            t_max: 350.0,
            dt: 0.1,
            output_path: None,
            emit: Column::STANDARD.to_vec(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::invalid("t_max", format!("must be non-negative, got {}", self.t_max)));
        }
        if self.emit.is_empty() {
            return Err(Error::invalid("emit", "no columns requested"));
        }
        self.system_params().map(|_| ())
    }

    pub fn system_params(&self) -> Result<SystemParams> {
        SystemParams::new(
            self.omega_bar,
            self.delta_bar,
            self.epsilon_bar,
            C64::new(self.beta, self.beta_im),
            DeformationParams::new(self.tau, self.n_max)?,
        )
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.t_max, self.dt)
    }

    pub fn needs_branches(&self) -> bool {
        self.emit.iter().any(|c| c.needs_branches())
    }
}
