//! Scenario configuration files.
//!
//! A config is a TOML document with up to four tables. Every key is
//! optional; missing keys take the defaults shown by `hwig preset <name>
//! --print-config`.
//!
//! ```toml
//! [scenario]
//! kind = "add-coherent"   # subtract-squeezed | add-coherent | add-thermal | add-vacuum
//! r = 0.5
//! phi = 0.0
//! r2 = 0.0
//! xi0 = [1.0, 0.0]        # real, imaginary
//! tau = 5.0
//! detector_overlap = 1.0
//! n_modes = 4
//! strength = 0.1
//! v_scale = 1.0
//! seed = 0
//!
//! [grid]
//! qmin = -4.0
//! qmax = 4.0
//! n = 161
//! n4 = 33                 # points per axis of the 4D grid (two-mode reductions)
//! full4d = false          # also write the 4D grid
//!
//! [output]
//! dir = "hwig-out"
//! name = "scenario"
//! format = "csv"          # csv | pgm
//!
//! [sweep]
//! parameter = "detector_overlap"
//! values = [1.0, 0.8, 0.6]
//! ```

use std::fmt;
use std::path::PathBuf;

use hwig_core::scenario::{ScenarioKind, ScenarioParams};
use hwig_core::{Axis, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    SubtractSqueezed,
    AddCoherent,
    AddThermal,
    AddVacuum,
}

impl From<Kind> for ScenarioKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::SubtractSqueezed => ScenarioKind::SubtractSqueezed,
            Kind::AddCoherent => ScenarioKind::AddCoherent,
            Kind::AddThermal => ScenarioKind::AddThermal,
            Kind::AddVacuum => ScenarioKind::AddVacuum,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Pgm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: Kind,
    pub r: f64,
    pub phi: f64,
    pub r2: f64,
    pub xi0: [f64; 2],
    pub tau: f64,
    pub detector_overlap: f64,
    pub n_modes: usize,
    pub strength: f64,
    pub v_scale: f64,
    pub seed: u64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let p = ScenarioParams::default();
        Self {
            kind: Kind::SubtractSqueezed,
            r: p.r,
            phi: p.phi,
            r2: p.r2,
            xi0: [p.xi0.re, p.xi0.im],
            tau: p.tau,
            detector_overlap: p.detector_overlap,
            n_modes: p.n_modes,
            strength: p.strength,
            v_scale: p.v_scale,
            seed: p.seed,
        }
    }
}

impl ScenarioSection {
    pub fn params(&self) -> ScenarioParams {
        ScenarioParams {
            kind: self.kind.into(),
            r: self.r,
            phi: self.phi,
            r2: self.r2,
            xi0: C64::new(self.xi0[0], self.xi0[1]),
            tau: self.tau,
            detector_overlap: self.detector_overlap,
            n_modes: self.n_modes,
            strength: self.strength,
            v_scale: self.v_scale,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub qmin: f64,
    pub qmax: f64,
    pub n: usize,
    pub n4: usize,
    pub full4d: bool,
}

impl Default for GridSection {
    fn default() -> Self {
        let ax = Axis::standard();
        Self {
            qmin: ax.min,
            qmax: ax.max,
            n: ax.n,
            n4: 33,
            full4d: false,
        }
    }
}

impl GridSection {
    pub fn axis(&self) -> Result<Axis, ConfigError> {
        Axis::new(self.qmin, self.qmax, self.n).map_err(|e| ConfigError(format!("[grid]: {e}")))
    }

    pub fn axis4(&self) -> Result<Axis, ConfigError> {
        Axis::new(self.qmin, self.qmax, self.n4).map_err(|e| ConfigError(format!("[grid] n4: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub name: String,
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("hwig-out"),
            name: "scenario".into(),
            format: Format::Csv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    R,
    Phi,
    R2,
    Xi0,
    Tau,
    DetectorOverlap,
    NModes,
    Strength,
    VScale,
    Seed,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::R => "r",
            SweepParameter::Phi => "phi",
            SweepParameter::R2 => "r2",
            SweepParameter::Xi0 => "xi0",
            SweepParameter::Tau => "tau",
            SweepParameter::DetectorOverlap => "detector_overlap",
            SweepParameter::NModes => "n_modes",
            SweepParameter::Strength => "strength",
            SweepParameter::VScale => "v_scale",
            SweepParameter::Seed => "seed",
        }
    }

    /// Scenario with this parameter set to `value`. `xi0` sweeps the real
    /// amplitude at fixed phase; integer parameters must be whole numbers.
    pub fn apply(self, base: &ScenarioSection, value: f64) -> Result<ScenarioSection, ConfigError> {
        let mut s = base.clone();
        let whole = |v: f64| -> Result<u64, ConfigError> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u64)
            } else {
                Err(ConfigError(format!("{} must be a non-negative integer, got {v}", self.name())))
            }
        };
        match self {
            SweepParameter::R => s.r = value,
            SweepParameter::Phi => s.phi = value,
            SweepParameter::R2 => s.r2 = value,
            SweepParameter::Xi0 => {
                let z = C64::new(base.xi0[0], base.xi0[1]);
                let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
                let w = phase * value;
                s.xi0 = [w.re, w.im];
            }
            SweepParameter::Tau => s.tau = value,
            SweepParameter::DetectorOverlap => s.detector_overlap = value,
            SweepParameter::NModes => s.n_modes = whole(value)? as usize,
            SweepParameter::Strength => s.strength = value,
            SweepParameter::VScale => s.v_scale = value,
            SweepParameter::Seed => s.seed = whole(value)?,
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioSection,
    pub grid: GridSection,
    pub output: OutputSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn preset(name: &str) -> Option<Self> {
        let mut cfg = Config::default();
        cfg.output.name = name.to_string();
        match name {
            "fig3" => {
                cfg.scenario.kind = Kind::AddCoherent;
                cfg.scenario.xi0 = [1.0, 0.0];
            }
            "fig4" => {
                cfg.scenario.kind = Kind::AddThermal;
                cfg.scenario.tau = 5.0;
                // τ = 5 tails reach e^{-5} at |α| = 4
                cfg.grid.qmin = -8.0;
                cfg.grid.qmax = 8.0;
                cfg.grid.n = 321;
            }
            "sv-subtract" => {
                cfg.scenario.kind = Kind::SubtractSqueezed;
                cfg.scenario.r = 0.5;
            }
            _ => return None,
        }
        Some(cfg)
    }

    pub const PRESETS: [&'static str; 3] = ["fig3", "fig4", "sv-subtract"];

    /// `qmin:qmax:n`.
    pub fn apply_grid_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || ConfigError(format!("--grid expects qmin:qmax:n, got {spec:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        self.grid.qmin = parts[0].trim().parse().map_err(|_| bad())?;
        self.grid.qmax = parts[1].trim().parse().map_err(|_| bad())?;
        self.grid.n = parts[2].trim().parse().map_err(|_| bad())?;
        self.grid.axis()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn parses_documented_example() {
        let text = r#"
            [scenario]
            kind = "add-thermal"
            tau = 2.5
            xi0 = [0.5, -0.5]
            seed = 3

            [grid]
            qmin = -6.0
            qmax = 6.0
            n = 101

            [output]
            name = "th"
            format = "pgm"

            [sweep]
            parameter = "detector_overlap"
            values = [1.0, 0.5]
        "#;
        let cfg = Config::parse(text).unwrap();
        assert_eq!(cfg.scenario.kind, Kind::AddThermal);
        assert_eq!(cfg.scenario.tau, 2.5);
        assert_eq!(cfg.scenario.seed, 3);
        assert_eq!(cfg.grid.n, 101);
        assert_eq!(cfg.output.format, Format::Pgm);
        assert_eq!(cfg.sweep.as_ref().unwrap().parameter, SweepParameter::DetectorOverlap);
        let p = cfg.scenario.params();
        assert_eq!(p.xi0, C64::new(0.5, -0.5));
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        assert!(Config::parse("[scenario]\nkind = \"add-squeezed\"").is_err());
        assert!(Config::parse("[scenario]\nrr = 1.0").is_err());
        assert!(Config::parse("[extra]\nx = 1").is_err());
        assert!(Config::parse("[grid]\nn = -3").is_err());
    }

    #[test]
    fn round_trip_is_idempotent() {
        for name in Config::PRESETS {
            let cfg = Config::preset(name).unwrap();
            let once = cfg.to_toml();
            let back = Config::parse(&once).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.to_toml(), once);
        }
        let cfg = Config {
            sweep: Some(SweepSection {
                parameter: SweepParameter::R,
                values: vec![0.1, 0.5],
            }),
            ..Config::default()
        };
        let once = cfg.to_toml();
        assert_eq!(Config::parse(&once).unwrap().to_toml(), once);
    }

    #[test]
    fn grid_override() {
        let mut cfg = Config::default();
        cfg.apply_grid_override("-2:2:41").unwrap();
        assert_eq!((cfg.grid.qmin, cfg.grid.qmax, cfg.grid.n), (-2.0, 2.0, 41));
        assert!(cfg.apply_grid_override("2:-2:41").is_err());
        assert!(cfg.apply_grid_override("1:2").is_err());
        assert!(cfg.apply_grid_override("a:2:3").is_err());
    }

    #[test]
    fn sweep_parameters_apply() {
        let base = ScenarioSection {
            xi0: [0.0, 2.0],
            ..Default::default()
        };
        let s = SweepParameter::Xi0.apply(&base, 0.5).unwrap();
        assert!((s.xi0[0]).abs() < 1e-15 && (s.xi0[1] - 0.5).abs() < 1e-15);
        assert_eq!(SweepParameter::NModes.apply(&base, 3.0).unwrap().n_modes, 3);
        assert!(SweepParameter::NModes.apply(&base, 2.5).is_err());
        assert_eq!(SweepParameter::Tau.apply(&base, 0.0).unwrap().tau, 0.0);
    }

    #[test]
    fn unknown_preset() {
        assert!(Config::preset("fig5").is_none());
    }
}
