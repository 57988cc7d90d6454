//! The scenario sweep behind `compare`: every controller on every `alpha`,
//! run in parallel and written in a fixed order.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use mg_opcon::cost::closed_loop_cost;
use mg_opcon::ems::Controller;
use mg_opcon::scenario::scenario_alphas;
use mg_opcon::{Error, Result};
use rayon::prelude::*;

use crate::commands::{output, RunSetup};
use crate::{BoundsArgs, EmsArgs, FleetArg};

/// Worker count override; defaults to the rayon choice (one per core).
pub const THREADS_ENV: &str = "MG_OPCON_THREADS";

struct Cell {
    s: usize,
    alpha: f64,
    controller: Controller,
    outcome: Result<f64>,
    runtime_ms: f64,
}

fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV}={v} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

pub fn compare(
    fleet: &FleetArg,
    src: &BoundsArgs,
    controllers: &[Controller],
    ems: &EmsArgs,
    degenerate: bool,
    no_timing: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let setup = RunSetup::new(fleet, src, ems)?;
    let jobs: Vec<(usize, f64, Controller)> = scenario_alphas()
        .into_iter()
        .enumerate()
        .flat_map(|(s, a)| controllers.iter().map(move |&c| (s, a, c)))
        .collect();
    let cells: Vec<Cell> = pool()?.install(|| {
        jobs.par_iter()
            .map(|&(s, alpha, controller)| {
                let t0 = Instant::now();
                let outcome = setup
                    .run(controller, alpha, degenerate)
                    .map(|log| closed_loop_cost(&log, &setup.weights));
                Cell {
                    s,
                    alpha,
                    controller,
                    outcome,
                    runtime_ms: t0.elapsed().as_secs_f64() * 1e3,
                }
            })
            .collect()
    });

    let mut sink = output(out)?;
    let mut w = csv::Writer::from_writer(&mut sink);
    w.write_record(["s", "alpha", "controller", "total_cost", "runtime_ms"])?;
    let mut failed = 0;
    for c in &cells {
        let cost = match &c.outcome {
            Ok(j) => j.to_string(),
            Err(e) => {
                failed += 1;
                eprintln!("s={} {}: {e}", c.s, c.controller);
                "failed".to_string()
            }
        };
        let runtime = if no_timing {
            String::new()
        } else {
            format!("{:.3}", c.runtime_ms)
        };
        w.write_record([
            c.s.to_string(),
            format!("{:.1}", c.alpha),
            c.controller.to_string(),
            cost,
            runtime,
        ])?;
    }
    w.flush()?;
    drop(w);
    sink.flush()?;
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}
