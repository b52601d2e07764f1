//! Refinement study: the same problem at increasing cutoffs, advanced in
//! lockstep so differences are taken at every common step.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::forcing::Forcing;
use crate::spectral::l2_norm;
use crate::timestepper::{dynamics_of, init_state, Integrator, TrajectoryState};

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub coarse: usize,
    pub fine: usize,
    /// `‖u_coarse(T) - u_fine(T)‖_{L²}`
    pub final_diff: f64,
    /// `sup_t ‖u_coarse(t) - u_fine(t)‖_{L²}`
    pub sup_diff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// `sup_diff[i] / sup_diff[i + 1]`
    pub ratios: Vec<f64>,
    /// Differences below this are treated as converged to rounding.
    pub floor: f64,
    pub monotone: bool,
}

/// Runs the configured problem at each cutoff (ascending, at least three)
/// and compares consecutive pairs.
pub fn convergence_study(cfg: &RunConfig, cutoffs: &[usize]) -> Result<ConvergenceTable> {
    if cutoffs.len() < 3 || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "convergence study needs at least three increasing cutoffs, got {cutoffs:?}"
        )));
    }
    let forcings = cutoffs
        .iter()
        .map(|&k| cfg.forcing_at(k))
        .collect::<Result<Vec<Box<dyn Forcing>>>>()?;
    let finest = *cutoffs.last().unwrap();
    let u0 = cfg.ic.build(finest, cfg.box_l);
    let integrators: Vec<Integrator<'_>> = forcings
        .iter()
        .map(|f| {
            let mut i = Integrator::new(dynamics_of(cfg), cfg.scheme, f.as_ref());
            i.solenoidal_tol = cfg.tolerances.solenoidal;
            i
        })
        .collect();
    let mut states = integrators
        .iter()
        .zip(cutoffs)
        .map(|(i, &k)| i.prime(init_state(&u0, k)))
        .collect::<Result<Vec<TrajectoryState>>>()?;

    let diffs = |states: &[TrajectoryState]| -> Vec<f64> {
        states
            .windows(2)
            .map(|w| {
                let fine = &w[1].u;
                l2_norm(&(&w[0].u.with_cutoff(fine.cutoff()) - fine))
            })
            .collect()
    };
    let mut sup = diffs(&states);
    for _ in 0..cfg.steps() {
        states = integrators
            .par_iter()
            .zip(states.par_iter())
            .map(|(i, s)| i.step(s, cfg.dt).map(|r| r.0))
            .collect::<Result<Vec<_>>>()?;
        for (s, d) in sup.iter_mut().zip(diffs(&states)) {
            *s = s.max(d);
        }
    }
    let last = diffs(&states);
    let scale = states.iter().map(|s| l2_norm(&s.u)).fold(l2_norm(&u0), f64::max);
    Ok(table(cutoffs, &last, &sup, 1e-12 * scale))
}

fn table(cutoffs: &[usize], last: &[f64], sup: &[f64], floor: f64) -> ConvergenceTable {
    let rows: Vec<ConvergenceRow> = (0..sup.len())
        .map(|i| ConvergenceRow {
            coarse: cutoffs[i],
            fine: cutoffs[i + 1],
            final_diff: last[i],
            sup_diff: sup[i],
        })
        .collect();
    let ratios = sup.windows(2).map(|w| w[0] / w[1]).collect();
    let monotone = sup.windows(2).all(|w| w[1] < w[0] || w[1] <= floor);
    ConvergenceTable {
        rows,
        ratios,
        floor,
        monotone,
    }
}
