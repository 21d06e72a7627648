//! WebAssembly bindings for the browser demo. Each entry point builds a
//! scenario, reduces it onto its single transformed detector mode and samples
//! the reduced Wigner function on a square grid.

use wasm_bindgen::prelude::*;

use hwig_core::reduction::sample_grid;
use hwig_core::scenario::{Scenario, ScenarioKind, ScenarioParams};
use hwig_core::{Axis, C64};

const MAX_POINTS: usize = 401;

/// Sampled reduced Wigner function. `values` is row-major with `q` outermost.
#[wasm_bindgen]
pub struct GridView {
    values: Vec<f64>,
    n: usize,
    half_width: f64,
    min_value: f64,
    argmin_q: f64,
    argmin_p: f64,
    negative_volume: f64,
    quadrature: f64,
    success_probability: f64,
}

#[wasm_bindgen]
impl GridView {
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[wasm_bindgen(getter)]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[wasm_bindgen(getter)]
    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    #[wasm_bindgen(getter)]
    pub fn argmin_q(&self) -> f64 {
        self.argmin_q
    }

    #[wasm_bindgen(getter)]
    pub fn argmin_p(&self) -> f64 {
        self.argmin_p
    }

    #[wasm_bindgen(getter)]
    pub fn negative_volume(&self) -> f64 {
        self.negative_volume
    }

    #[wasm_bindgen(getter)]
    pub fn quadrature(&self) -> f64 {
        self.quadrature
    }

    #[wasm_bindgen(getter)]
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Runs a scenario and samples its reduced state on `[-half_width, half_width]²`.
pub fn grid_view(params: &ScenarioParams, half_width: f64, n: usize) -> Result<GridView, String> {
    if half_width.is_nan() || half_width <= 0.0 || half_width.is_infinite() {
        return Err("half width must be positive".into());
    }
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(format!("grid size must be in 2..={MAX_POINTS}"));
    }
    let out = Scenario::build(params).and_then(|s| s.run()).map_err(|e| e.to_string())?;
    let reduced_modes = out.reduced.basis().n_modes();
    if reduced_modes != 1 {
        return Err(format!("expected a single reduced mode, got {reduced_modes}"));
    }
    let ax = Axis::new(-half_width, half_width, n).map_err(|e| e.to_string())?;
    let grid = sample_grid(&out.reduced, &[ax, ax]).map_err(|e| e.to_string())?;
    let m = grid.negativity_metrics();
    Ok(GridView {
        quadrature: grid.quadrature(),
        values: grid.values().to_vec(),
        n,
        half_width,
        min_value: m.min_value,
        argmin_q: m.argmin[0],
        argmin_p: m.argmin[1],
        negative_volume: m.negative_volume,
        success_probability: out.success_probability,
    })
}

fn render(params: ScenarioParams, half_width: f64, n: usize) -> Result<GridView, JsError> {
    grid_view(&params, half_width, n).map_err(|e| JsError::new(&e))
}

/// Photon-added coherent state with amplitude `xi_re + i·xi_im`.
#[wasm_bindgen]
pub fn photon_added_coherent(xi_re: f64, xi_im: f64, half_width: f64, n: usize) -> Result<GridView, JsError> {
    render(
        ScenarioParams {
            kind: ScenarioKind::AddCoherent,
            xi0: C64::new(xi_re, xi_im),
            n_modes: 2,
            ..ScenarioParams::default()
        },
        half_width,
        n,
    )
}

/// Photon-added thermal state with mean photon number `tau`.
#[wasm_bindgen]
pub fn photon_added_thermal(tau: f64, half_width: f64, n: usize) -> Result<GridView, JsError> {
    render(
        ScenarioParams {
            kind: ScenarioKind::AddThermal,
            tau,
            n_modes: 2,
            ..ScenarioParams::default()
        },
        half_width,
        n,
    )
}

/// Photon-subtracted squeezed vacuum seen by a detector whose mode overlaps
/// the squeezed mode by `overlap`.
#[wasm_bindgen]
pub fn photon_subtracted_squeezed(
    r: f64,
    phi: f64,
    overlap: f64,
    half_width: f64,
    n: usize,
) -> Result<GridView, JsError> {
    render(
        ScenarioParams {
            kind: ScenarioKind::SubtractSqueezed,
            r,
            phi,
            detector_overlap: overlap,
            n_modes: 2,
            ..ScenarioParams::default()
        },
        half_width,
        n,
    )
}
