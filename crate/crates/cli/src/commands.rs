// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

use serde_json::{json, Value};

use ness_core::analysis::{
    cmax_map as run_cmax_map, detect_overhang, maximize_concurrence, sample_cq_region_with, OptimizerConfig,
    RegionConfig, SearchBox,
};
use ness_core::collision::{initial_state, simulate, thermal_qubit};
use ness_core::divisibility::non_divisibility;
use ness_core::generators::steady_state_for;
use ness_core::{DensityMatrix, ModelParams};

use crate::output::{float, write_json_file, Sink, Table};
use crate::{CliError, CmaxMapArgs, CollideArgs, CqRegionArgs, DivisibilityArgs, Format, InitialState, ModelArgs};

fn model_params(a: &ModelArgs) -> Result<ModelParams, CliError> {
    let params = ModelParams::with_memory(a.z1, a.z2, a.g1, a.g2, a.u1, a.u2, a.p);
    params.validate()?;
    Ok(params)
}

fn params_json(p: &ModelParams) -> Value {
    json!({ "z1": p.z1, "z2": p.z2, "g1": p.gamma1, "g2": p.gamma2, "u1": p.upsilon1, "u2": p.upsilon2, "p": p.p })
}

pub fn steady(a: &ModelArgs, sink: &Sink) -> Result<(), CliError> {
    let params = model_params(a)?;
    let report = steady_state_for(&params)?;
    let rho = report.rho_system.matrix();
    match sink.format {
        Format::Csv => {
            let mut t = Table::new(&["quantity", "value"]);
            let scalars = [
                ("concurrence", report.concurrence),
                ("q_dot", report.q_dot),
                ("q_dot2", report.q_dot2),
                ("s1", report.s1),
                ("s2", report.s2),
                ("residual", report.residual),
            ];
            for (k, v) in scalars {
                t.push(vec![k.to_string(), float(v)]);
            }
            for i in 0..4 {
                for j in 0..4 {
                    t.push(vec![format!("rho_re_{i}{j}"), float(rho[(i, j)].re)]);
                    t.push(vec![format!("rho_im_{i}{j}"), float(rho[(i, j)].im)]);
                }
            }
            sink.write_table(&t)?;
        }
        Format::Json => {
            let re: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| rho[(i, j)].re).collect()).collect();
            let im: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| rho[(i, j)].im).collect()).collect();
            sink.write_json(&json!({
                "params": params_json(&params),
                "concurrence": report.concurrence,
                "q_dot": report.q_dot,
                "q_dot2": report.q_dot2,
                "s1": report.s1,
                "s2": report.s2,
                "residual": report.residual,
                "rho": { "re": re, "im": im },
            }))?;
        }
    }
    Ok(())
}

pub fn cmax_map(a: &CmaxMapArgs, sink: &Sink) -> Result<(), CliError> {
    if a.grid_n < 5 {
        return Err(CliError::Usage(format!("--grid-n must be at least 5, got {}", a.grid_n)));
    }
    if a.starts == 0 {
        return Err(CliError::Usage("--starts must be at least 1".into()));
    }
    let cfg = OptimizerConfig { starts: a.starts, seed: a.seed, ..OptimizerConfig::default() };
    let map = run_cmax_map(a.p, a.grid_n, &SearchBox::default(), &cfg)?;
    match sink.format {
        Format::Csv => {
            let mut t = Table::new(&["z1", "z2", "c_max", "g1", "g2", "u1", "u2", "q_dot", "n_evaluations", "converged"]);
            for pt in &map {
                let r = &pt.result;
                let b = &r.best_params;
                t.push(vec![
                    float(pt.z1),
                    float(pt.z2),
                    float(r.c_max),
                    float(b.gamma1),
                    float(b.gamma2),
                    float(b.upsilon1),
                    float(b.upsilon2),
                    float(r.q_dot_at_best),
                    r.n_evaluations.to_string(),
                    r.converged.to_string(),
                ]);
            }
            sink.write_table(&t)?;
        }
        Format::Json => {
            let rows: Vec<Value> = map
                .iter()
                .map(|pt| {
                    let r = &pt.result;
                    json!({
                        "i": pt.i, "j": pt.j, "z1": pt.z1, "z2": pt.z2, "c_max": r.c_max,
                        "params": params_json(&r.best_params), "q_dot": r.q_dot_at_best,
                        "n_evaluations": r.n_evaluations, "converged": r.converged,
                    })
                })
                .collect();
            sink.write_json(&json!({ "p": a.p, "grid_n": a.grid_n, "seed": a.seed, "starts": a.starts, "points": rows }))?;
        }
    }
    Ok(())
}

pub fn cq_region(a: &CqRegionArgs, sink: &Sink) -> Result<(), CliError> {
    if a.bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let cfg = RegionConfig { bins: a.bins, ..RegionConfig::default() };
    let region = sample_cq_region_with(a.z1, a.z2, a.p, a.samples, a.seed, &cfg)?;
    let overhang = detect_overhang(&region);
    let hull = json!({
        "z1": a.z1, "z2": a.z2, "p": a.p, "samples": a.samples, "seed": a.seed,
        "q_max": region.q_max(),
        "overhang": overhang.map(|(lo, hi)| json!({ "q_lo": lo, "q_hi": hi })),
        "bins": region.bins,
        "hull_upper": region.hull_upper(),
        "hull_lower": region.hull_lower(),
    });
    match overhang {
        Some((lo, hi)) => eprintln!("guaranteed entanglement for |Q| in [{lo:.6}, {hi:.6}]"),
        None => eprintln!("no guaranteed-entanglement interval"),
    }
    match sink.format {
        Format::Csv => {
            let mut t = Table::new(&["q_abs", "c", "g1", "g2", "u1", "u2"]);
            for pt in &region.points {
                let b = &pt.params;
                t.push(vec![
                    float(pt.q_abs),
                    float(pt.concurrence),
                    float(b.gamma1),
                    float(b.gamma2),
                    float(b.upsilon1),
                    float(b.upsilon2),
                ]);
            }
            sink.write_table(&t)?;
            if let Some(path) = sink.sidecar("hull.json") {
                write_json_file(&path, &hull)?;
            }
        }
        Format::Json => {
            let points: Vec<Value> = region
                .points
                .iter()
                .map(|pt| json!({ "q_abs": pt.q_abs, "c": pt.concurrence, "params": params_json(&pt.params) }))
                .collect();
            sink.write_json(&json!({ "points": points, "hull": hull }))?;
        }
    }
    Ok(())
}

pub fn divisibility(a: &DivisibilityArgs, sink: &Sink) -> Result<(), CliError> {
    let params = if a.use_cmax_params {
        let cfg = OptimizerConfig { seed: a.seed, ..OptimizerConfig::default() };
        maximize_concurrence(a.z1, a.z2, a.p, &SearchBox::default(), &cfg)?.best_params
    } else {
        let missing = || CliError::Usage("--g1 and --g2 are required without --use-cmax-params".into());
        let params = ModelParams::with_memory(
            a.z1,
            a.z2,
            a.g1.ok_or_else(missing)?,
            a.g2.ok_or_else(missing)?,
            a.u1.unwrap_or(0.0),
            a.u2.unwrap_or(0.0),
            a.p,
        );
        params.validate()?;
        params
    };
    let report = non_divisibility(&params, a.tmax, a.grid)?;
    let summary = json!({
        "params": params_json(&params),
        "n_measure": report.n_measure,
        "non_divisible": report.is_non_divisible(),
        "converged": report.converged,
        "t_max": report.t_max,
        "n_steps": report.t_grid.len() - 1,
    });
    eprintln!("N = {:.6e}", report.n_measure);
    match sink.format {
        Format::Csv => {
            let mut t = Table::new(&["t", "det_abs"]);
            for (time, det) in report.t_grid.iter().zip(&report.det_abs) {
                t.push(vec![float(*time), float(*det)]);
            }
            sink.write_table(&t)?;
            if let Some(path) = sink.sidecar("summary.json") {
                write_json_file(&path, &summary)?;
            }
        }
        Format::Json => {
            sink.write_json(&json!({ "summary": summary, "t": report.t_grid, "det_abs": report.det_abs }))?;
        }
    }
    if !report.converged {
        return Err(CliError::Numerical(format!(
            "N did not settle within the grid cap ({} steps)",
            report.t_grid.len() - 1
        )));
    }
    Ok(())
}

pub fn collide(a: &CollideArgs, sink: &Sink) -> Result<(), CliError> {
    let params = model_params(&a.model)?;
    if a.every == 0 {
        return Err(CliError::Usage("--every must be at least 1".into()));
    }
    let system = match a.init {
        InitialState::Mixed => DensityMatrix::maximally_mixed(4)?,
        InitialState::Ground => DensityMatrix::product(&[&thermal_qubit(-1.0)?, &thermal_qubit(-1.0)?]),
        InitialState::Thermal => DensityMatrix::product(&[&thermal_qubit(params.z1)?, &thermal_qubit(params.z2)?]),
    };
    let traj = simulate(&initial_state(&system, &params)?, &params, a.dt, a.steps)?;
    let kept = traj.records.iter().filter(|r| r.step % a.every == 0 || r.step == a.steps);
    match sink.format {
        Format::Csv => {
            let mut t = Table::new(&["step", "t", "concurrence", "d_e1", "d_e2", "cumulative_q1"]);
            for r in kept {
                t.push(vec![
                    r.step.to_string(),
                    float(r.t),
                    float(r.concurrence),
                    float(r.d_e1),
                    float(r.d_e2),
                    float(r.cumulative_q1),
                ]);
            }
            sink.write_table(&t)?;
        }
        Format::Json => {
            let rows: Vec<_> = kept.collect();
            sink.write_json(&json!({ "params": params_json(&params), "dt": a.dt, "records": rows }))?;
        }
    }
    Ok(())
}
