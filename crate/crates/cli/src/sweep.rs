use rayon::prelude::*;

use crate::config::{Config, SweepSection};
use crate::output::num;
use crate::pipeline::{evaluate, CliError, Evaluation};

pub struct SweepPoint {
    pub value: f64,
    pub result: Result<Evaluation, CliError>,
}

/// Evaluates every point concurrently; results come back in input order.
pub fn run_sweep(cfg: &Config, sweep: &SweepSection) -> Vec<SweepPoint> {
    sweep
        .values
        .par_iter()
        .map(|&value| {
            let result = sweep
                .parameter
                .apply(&cfg.scenario, value)
                .map_err(CliError::from)
                .and_then(|s| evaluate(&s, &cfg.grid));
            SweepPoint { value, result }
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "min_value,argmin,negative_volume,value_at_origin,norm_inverse,success_probability,lo_overlap,grid_quadrature";

pub fn sweep_csv(sweep: &SweepSection, points: &[SweepPoint]) -> String {
    let mut out = format!("{},status,{SWEEP_HEADER},message\n", sweep.parameter.name());
    for p in points {
        out.push_str(&num(p.value));
        match &p.result {
            Ok(ev) => {
                let o = &ev.outcome;
                let argmin: Vec<String> = ev.metrics.argmin.iter().map(|&x| num(x)).collect();
                let cols = [
                    num(ev.metrics.min_value),
                    argmin.join(" "),
                    num(ev.metrics.negative_volume),
                    num(ev.origin_value),
                    num(o.herald.norm_inverse()),
                    num(o.success_probability),
                    num(o.lo_overlap),
                    num(ev.quadrature),
                ];
                out.push_str(",ok,");
                out.push_str(&cols.join(","));
                out.push_str(",\n");
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                out.push_str(",error");
                out.push_str(&",".repeat(SWEEP_HEADER.split(',').count()));
                out.push(',');
                out.push_str(&msg);
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Kind, SweepParameter};

    fn column(csv: &str, name: &str) -> Vec<String> {
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let idx = header.iter().position(|h| *h == name).unwrap();
        lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
    }

    #[test]
    fn subtracted_minimum_is_constant_in_r() {
        let mut cfg = Config::preset("sv-subtract").unwrap();
        cfg.grid.n = 41;
        let sweep = SweepSection {
            parameter: SweepParameter::R,
            values: vec![0.1, 0.5],
        };
        let pts = run_sweep(&cfg, &sweep);
        for p in &pts {
            let ev = p.result.as_ref().unwrap();
            assert!((ev.metrics.min_value + 2.0).abs() < 1e-9);
        }
        let csv = sweep_csv(&sweep, &pts);
        assert_eq!(column(&csv, "status"), ["ok", "ok"]);
    }

    #[test]
    fn failed_points_are_recorded() {
        let mut cfg = Config::preset("sv-subtract").unwrap();
        cfg.grid.n = 21;
        let sweep = SweepSection {
            parameter: SweepParameter::R,
            values: vec![0.0, 0.3],
        };
        let pts = run_sweep(&cfg, &sweep);
        assert!(matches!(pts[0].result, Err(CliError::HeraldImpossible(_))));
        assert!(pts[1].result.is_ok());
        let csv = sweep_csv(&sweep, &pts);
        let n_cols = csv.lines().next().unwrap().split(',').count();
        assert!(csv.lines().all(|l| l.split(',').count() == n_cols));
        assert_eq!(column(&csv, "status"), ["error", "ok"]);
    }

    #[test]
    fn zero_temperature_sweep_matches_vacuum() {
        let mut cfg = Config::preset("fig4").unwrap();
        cfg.grid.n = 41;
        let sweep = SweepSection {
            parameter: SweepParameter::Tau,
            values: vec![0.0],
        };
        let th = run_sweep(&cfg, &sweep).remove(0).result.unwrap();
        cfg.scenario.kind = Kind::AddVacuum;
        let vac = evaluate(&cfg.scenario, &cfg.grid).unwrap();
        for (a, b) in th.grid.values().iter().zip(vac.grid.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn single_point_sweep_equals_run() {
        let mut cfg = Config::preset("fig3").unwrap();
        cfg.grid.n = 41;
        let sweep = SweepSection {
            parameter: SweepParameter::DetectorOverlap,
            values: vec![1.0],
        };
        let pt = run_sweep(&cfg, &sweep).remove(0).result.unwrap();
        let run = evaluate(&cfg.scenario, &cfg.grid).unwrap();
        assert_eq!(pt.grid, run.grid);
        assert_eq!(pt.metrics, run.metrics);
    }
}
