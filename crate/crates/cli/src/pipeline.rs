use std::fmt;

use hwig_core::reduction::{sample_grid, sample_section};
use hwig_core::scenario::{Scenario, ScenarioOutcome};
use hwig_core::{FieldVector, NegativityMetrics, ReducedWignerGrid};

use crate::config::{ConfigError, GridSection, ScenarioSection};

/// Relative tolerance on the closed-form mass of a reduced state.
pub const MASS_TOL: f64 = 1e-9;
/// Tolerance on the grid quadrature under `--strict`.
pub const GRID_TOL: f64 = 1e-3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    HeraldImpossible(String),
    Verification(String),
    Io(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::HeraldImpossible(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::HeraldImpossible(m) => write!(f, "{m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<hwig_core::Error> for CliError {
    fn from(e: hwig_core::Error) -> Self {
        use hwig_core::Error as E;
        match e {
            E::HeraldImpossible(_) => CliError::HeraldImpossible(e.to_string()),
            E::Domain(_) | E::InvalidGrid(_) | E::InvalidPair(_) => CliError::Config(e.to_string()),
            E::Verification(_) => CliError::Verification(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Everything a run reports.
pub struct Evaluation {
    pub outcome: ScenarioOutcome,
    /// 2D grid for one-mode reductions, 4D for two-mode reductions.
    pub grid: ReducedWignerGrid,
    /// One `(q, p)` plane per reduced mode through the origin of the others.
    pub sections: Vec<ReducedWignerGrid>,
    pub metrics: NegativityMetrics,
    pub quadrature: f64,
    pub origin_value: f64,
}

pub fn evaluate(scenario: &ScenarioSection, grid: &GridSection) -> Result<Evaluation, CliError> {
    let axis = grid.axis()?;
    let outcome = Scenario::build(&scenario.params())?.run()?;
    let reduced = &outcome.reduced;
    let k = reduced.basis().n_modes();
    let origin = FieldVector::zeros(reduced.basis());
    let (full, sections) = if k == 1 {
        let g = sample_grid(reduced, &[axis, axis])?;
        (g.clone(), vec![g])
    } else {
        let ax4 = grid.axis4()?;
        let g = sample_grid(reduced, &[ax4, ax4, ax4, ax4])?;
        let secs = (0..k)
            .map(|m| sample_section(reduced, m, &origin, axis, axis))
            .collect::<Result<Vec<_>, _>>()?;
        (g, secs)
    };
    Ok(Evaluation {
        metrics: full.negativity_metrics(),
        quadrature: full.quadrature(),
        origin_value: reduced.eval(&origin)?,
        grid: full,
        sections,
        outcome,
    })
}

impl Evaluation {
    /// Closed-form mass always; grid quadrature only when `strict`.
    pub fn verify(&self, strict: bool) -> Result<(), CliError> {
        let m = self.outcome.analytic_mass;
        if !((m - 1.0).abs() <= MASS_TOL) {
            return Err(CliError::Verification(format!("reduced state has mass {m}, expected 1")));
        }
        let res = (self.quadrature - 1.0).abs();
        if strict && !(res <= GRID_TOL) {
            return Err(CliError::Verification(format!(
                "grid quadrature {} misses 1 by {res:e} (> {GRID_TOL:e}); widen the grid",
                self.quadrature
            )));
        }
        Ok(())
    }
}
