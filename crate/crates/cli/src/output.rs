//! Text serializers. Floats use `{:.16e}` (17 significant digits) so output
//! is exact to double precision and byte-stable.

use std::fmt::Write;

use hwig_core::ReducedWignerGrid;

use crate::config::Config;
use crate::pipeline::Evaluation;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn grid_csv(grid: &ReducedWignerGrid) -> String {
    let header = if grid.dims() == 2 { "q,p,w" } else { "q1,p1,q2,p2,w" };
    let mut out = String::with_capacity(grid.values().len() * 24 * (grid.dims() + 1));
    out.push_str(header);
    out.push('\n');
    for (i, w) in grid.values().iter().enumerate() {
        for x in grid.coords(i) {
            out.push_str(&num(x));
            out.push(',');
        }
        out.push_str(&num(*w));
        out.push('\n');
    }
    out
}

/// Plain (P2) grayscale image of a 2D grid: `q` left to right, `p` bottom to
/// top, black at the minimum and white at the maximum.
pub fn grid_pgm(grid: &ReducedWignerGrid) -> Option<String> {
    if grid.dims() != 2 {
        return None;
    }
    let (nq, np) = (grid.axes()[0].n, grid.axes()[1].n);
    let v = grid.values();
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P2\n{nq} {np}\n255\n");
    for j in (0..np).rev() {
        let row: Vec<String> = (0..nq)
            .map(|i| (((v[i * np + j] - lo) / span * 255.0).round() as u8).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Some(out)
}

fn coords(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}

/// `key = value` report.
pub fn summary(cfg: &Config, ev: &Evaluation) -> String {
    let s = &cfg.scenario;
    let o = &ev.outcome;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").expect("write to string");
    kv("kind", s.params().kind.to_string());
    kv("n_modes", s.n_modes.to_string());
    kv("seed", s.seed.to_string());
    kv("reduced_modes", o.reduced.basis().n_modes().to_string());
    kv("grid_dims", ev.grid.dims().to_string());
    kv("grid_points", ev.grid.values().len().to_string());
    kv("norm_inverse", num(o.herald.norm_inverse()));
    kv("success_probability", num(o.success_probability));
    kv("analytic_mass", num(o.analytic_mass));
    kv("grid_quadrature", num(ev.quadrature));
    kv("normalization_residual", num((ev.quadrature - 1.0).abs()));
    kv("min_value", num(ev.metrics.min_value));
    kv("argmin", coords(&ev.metrics.argmin));
    kv("negative_volume", num(ev.metrics.negative_volume));
    kv("value_at_origin", num(ev.origin_value));
    kv("lo_overlap", num(o.lo_overlap));
    for (i, m) in o.herald.subspace().iter().enumerate() {
        let parts: Vec<f64> = m.amps().iter().flat_map(|z| [z.re, z.im]).collect();
        kv(&format!("subspace_{i}"), coords(&parts));
    }
    out
}
