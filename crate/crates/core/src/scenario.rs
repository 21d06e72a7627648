//! Ready-made heralding setups shared by the command-line tool and the
//! browser demo.
//!
//! Every scenario lives in an `n_modes` basis whose orientation is drawn from
//! `seed`. The state's principal mode `P` is the first column of that random
//! unitary; the detector mode is tilted away from `P` towards the second
//! column by `detector_overlap = |P*⋄M|²`.

use nalgebra::DMatrix;

use crate::heralding::{add_photon, subtract_photon, DetectorKernel, HeraldedState};
use crate::mode::{FieldVector, Kernel, ModeBasis};
use crate::reduction::mode_overlap;
use crate::states::{GaussianWigner, PolyGaussian, ThermalSpec};
use crate::transforms::{random_unitary, seeded_rng, squeezer_pair_in_modes, WeakBogoliubov};
use crate::{Error, Result, C64};

pub const MAX_SCENARIO_MODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    SubtractSqueezed,
    AddCoherent,
    AddThermal,
    AddVacuum,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::SubtractSqueezed,
        ScenarioKind::AddCoherent,
        ScenarioKind::AddThermal,
        ScenarioKind::AddVacuum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::SubtractSqueezed => "subtract-squeezed",
            ScenarioKind::AddCoherent => "add-coherent",
            ScenarioKind::AddThermal => "add-thermal",
            ScenarioKind::AddVacuum => "add-vacuum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_addition(self) -> bool {
        self != ScenarioKind::SubtractSqueezed
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioParams {
    pub kind: ScenarioKind,
    /// Squeezing of the principal mode.
    pub r: f64,
    /// Squeezing phase.
    pub phi: f64,
    /// Squeezing of the secondary mode (subtraction only).
    pub r2: f64,
    /// Coherent amplitude along the principal mode.
    pub xi0: C64,
    /// Thermal photon number in the principal mode.
    pub tau: f64,
    /// `|P*⋄M|²` between principal and detector mode.
    pub detector_overlap: f64,
    pub n_modes: usize,
    /// Coupling strength: beamsplitter reflectivity or down-conversion `ξ`.
    pub strength: f64,
    /// Overall scale of the down-conversion kernel `V`.
    pub v_scale: f64,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::SubtractSqueezed,
            r: 0.5,
            phi: 0.0,
            r2: 0.0,
            xi0: C64::new(1.0, 0.0),
            tau: 5.0,
            detector_overlap: 1.0,
            n_modes: 4,
            strength: 0.1,
            v_scale: 1.0,
            seed: 0,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if !(1..=MAX_SCENARIO_MODES).contains(&self.n_modes) {
            return bad(format!("n_modes must lie in [1, {MAX_SCENARIO_MODES}], got {}", self.n_modes));
        }
        if !(0.0..=1.0).contains(&self.detector_overlap) {
            return bad(format!("detector_overlap must lie in [0, 1], got {}", self.detector_overlap));
        }
        if self.detector_overlap < 1.0 && self.n_modes < 2 {
            return bad("detector_overlap < 1 needs n_modes >= 2".into());
        }
        if !(self.r >= 0.0) || !(self.r2 >= 0.0) || !self.r.is_finite() || !self.r2.is_finite() {
            return bad("squeezing parameters must be finite and >= 0".into());
        }
        if self.r2 > 0.0 && self.n_modes < 2 {
            return bad("secondary squeezing needs n_modes >= 2".into());
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return bad(format!("tau must be finite and >= 0, got {}", self.tau));
        }
        if !(self.strength > 0.0) || self.strength > 1.0 {
            return bad(format!("strength must lie in (0, 1], got {}", self.strength));
        }
        if !(self.v_scale > 0.0) || !self.v_scale.is_finite() {
            return bad(format!("v_scale must be finite and > 0, got {}", self.v_scale));
        }
        if !self.phi.is_finite() || !self.xi0.re.is_finite() || !self.xi0.im.is_finite() {
            return bad("phi and xi0 must be finite".into());
        }
        Ok(())
    }
}

/// Input state, detector and (for addition) down-conversion of one scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    params: ScenarioParams,
    input: GaussianWigner,
    detector: DetectorKernel,
    bogoliubov: Option<WeakBogoliubov>,
    principal: FieldVector,
}

fn column(basis: &ModeBasis, w: &DMatrix<C64>, j: usize) -> FieldVector {
    FieldVector::new(basis, w.column(j).iter().copied().collect()).expect("column length matches basis")
}

impl Scenario {
    pub fn build(params: &ScenarioParams) -> Result<Self> {
        params.validate()?;
        let n = params.n_modes;
        let basis = ModeBasis::numbered("k", n)?;
        let w = random_unitary(n, &mut seeded_rng(params.seed));
        let principal = column(&basis, &w, 0);
        let o = params.detector_overlap;
        let tilted = if n > 1 {
            principal
                .scale(C64::new(o.sqrt(), 0.0))
                .add(&column(&basis, &w, 1).scale(C64::new((1.0 - o).sqrt(), 0.0)))?
        } else {
            principal.clone()
        };
        let detector = DetectorKernel::new(&tilted)?;

        let (input, bogoliubov) = match params.kind {
            ScenarioKind::SubtractSqueezed => {
                let mut r = vec![0.0; n];
                let mut phi = vec![0.0; n];
                r[0] = params.r;
                phi[0] = params.phi;
                if n > 1 {
                    r[1] = params.r2;
                    phi[1] = params.phi;
                }
                let (u, v) = squeezer_pair_in_modes(&basis, &w, &r, &phi)?;
                (GaussianWigner::squeezed_vacuum(&u, &v)?, None)
            }
            kind => {
                let g = detector.mode();
                let mut v = Kernel::outer_bilinear(g, g)?;
                if n > 2 {
                    // a second down-converted mode the detector does not see
                    let extra = column(&basis, &w, n - 1);
                    v = v.add(&Kernel::outer_bilinear(&extra, &extra)?.scale(C64::new(0.5, 0.0)))?;
                }
                let wb = WeakBogoliubov::new(v.scale(C64::new(params.v_scale, 0.0)), params.strength)?;
                let input = match kind {
                    ScenarioKind::AddCoherent => GaussianWigner::coherent(&principal.scale(params.xi0)),
                    ScenarioKind::AddThermal => GaussianWigner::thermal(&ThermalSpec::new(params.tau, &principal)?),
                    _ => GaussianWigner::vacuum(&basis),
                };
                (input, Some(wb))
            }
        };
        Ok(Self {
            params: params.clone(),
            input,
            detector,
            bogoliubov,
            principal,
        })
    }

    pub fn params(&self) -> &ScenarioParams {
        &self.params
    }

    pub fn input(&self) -> &GaussianWigner {
        &self.input
    }

    pub fn detector(&self) -> &DetectorKernel {
        &self.detector
    }

    pub fn bogoliubov(&self) -> Option<&WeakBogoliubov> {
        self.bogoliubov.as_ref()
    }

    pub fn principal_mode(&self) -> &FieldVector {
        &self.principal
    }

    pub fn herald(&self) -> Result<HeraldedState> {
        match &self.bogoliubov {
            None => subtract_photon(&self.input, &self.detector),
            Some(wb) => add_photon(&self.input, wb, &self.detector),
        }
    }

    /// Herald, reduce and collect the scalar diagnostics.
    pub fn run(&self) -> Result<ScenarioOutcome> {
        let herald = self.herald()?;
        let reduced = herald.reduce()?;
        let transformed = herald
            .transformed_modes()
            .iter()
            .find(|m| m.norm() > 0.0)
            .ok_or(Error::ZeroVector)?;
        let lo_overlap = mode_overlap(self.detector.mode(), transformed)?;
        Ok(ScenarioOutcome {
            success_probability: herald.success_probability(self.params.strength),
            analytic_mass: reduced.mass(),
            lo_overlap,
            herald,
            reduced,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub herald: HeraldedState,
    pub reduced: PolyGaussian,
    /// Overlap between the detector (local-oscillator) mode and the first
    /// transformed detector mode.
    pub lo_overlap: f64,
    pub success_probability: f64,
    /// Closed-form mass of the reduced state; 1 up to roundoff.
    pub analytic_mass: f64,
}
