//! Fixed-step integration of the semi-discrete Galerkin system
//! `u' = -ν A u - g(u) + P f`.

use crate::config::{RunConfig, Scheme};
use crate::error::{Error, Result};
use crate::estimates::{EnergyLedger, LedgerMeta, LedgerRow};
use crate::forcing::Forcing;
use crate::galerkin::Dynamics;
use crate::spectral::{dealiased_grid, l2_norm, leray_project, SpectralField};

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryState {
    pub t: f64,
    pub step: u64,
    pub u: SpectralField,
    /// `u'` at this state, once evaluated.
    pub last_rhs: Option<SpectralField>,
}

/// Projected, truncated initial state at `t = 0`.
pub fn init_state(u0: &SpectralField, cutoff: usize) -> TrajectoryState {
    TrajectoryState {
        t: 0.0,
        step: 0,
        u: leray_project(&u0.with_cutoff(cutoff)),
        last_rhs: None,
    }
}

/// One scheme bound to its dynamics and forcing.
pub struct Integrator<'a> {
    pub dynamics: Dynamics,
    pub scheme: Scheme,
    pub forcing: &'a dyn Forcing,
    /// Largest accepted relative solenoidality correction per step.
    pub solenoidal_tol: f64,
}

impl<'a> Integrator<'a> {
    pub fn new(dynamics: Dynamics, scheme: Scheme, forcing: &'a dyn Forcing) -> Self {
        Integrator {
            dynamics,
            scheme,
            forcing,
            solenoidal_tol: 1e-11,
        }
    }

    pub fn rhs(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        self.dynamics.rhs(u, &self.forcing.at(t))
    }

    fn explicit(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        self.dynamics.explicit_part(u, &self.forcing.at(t))
    }

    /// Fills in `last_rhs` if missing.
    pub fn prime(&self, mut s: TrajectoryState) -> Result<TrajectoryState> {
        if s.last_rhs.is_none() {
            s.last_rhs = Some(self.rhs(&s.u, s.t)?);
        }
        Ok(s)
    }

    /// Advances by `dt`; returns the new state and the relative size of the
    /// solenoidality correction that was applied.
    pub fn step(&self, s: &TrajectoryState, dt: f64) -> Result<(TrajectoryState, f64)> {
        assert!(dt > 0.0, "dt must be positive");
        let du0 = match &s.last_rhs {
            Some(r) => r.clone(),
            None => self.rhs(&s.u, s.t)?,
        };
        let raw = match self.scheme {
            Scheme::Rk4 => self.rk4(s, &du0, dt)?,
            Scheme::Ifrk4 => self.ifrk4(s, &du0, dt)?,
        };
        let step = s.step + 1;
        let t = step as f64 * dt;
        if !raw.is_finite() {
            return Err(Error::NonFinite { step, t });
        }
        let u = leray_project(&raw);
        let norm = l2_norm(&raw);
        let correction = if norm > 0.0 { l2_norm(&(&raw - &u)) / norm } else { 0.0 };
        if correction > self.solenoidal_tol {
            return Err(Error::Solenoidality {
                step,
                correction,
                limit: self.solenoidal_tol,
            });
        }
        let last_rhs = self.rhs(&u, t)?;
        if !last_rhs.is_finite() {
            return Err(Error::NonFinite { step, t });
        }
        Ok((
            TrajectoryState {
                t,
                step,
                u,
                last_rhs: Some(last_rhs),
            },
            correction,
        ))
    }

    fn rk4(&self, s: &TrajectoryState, k1: &SpectralField, dt: f64) -> Result<SpectralField> {
        let t = s.t;
        let stage = |k: &SpectralField, h: f64| {
            let mut x = s.u.clone();
            x.axpy(h, k);
            x
        };
        let k2 = self.rhs(&stage(k1, 0.5 * dt), t + 0.5 * dt)?;
        let k3 = self.rhs(&stage(&k2, 0.5 * dt), t + 0.5 * dt)?;
        let k4 = self.rhs(&stage(&k3, dt), t + dt)?;
        let mut out = s.u.clone();
        out.axpy(dt / 6.0, k1);
        out.axpy(dt / 3.0, &k2);
        out.axpy(dt / 3.0, &k3);
        out.axpy(dt / 6.0, &k4);
        Ok(out)
    }

    /// Lawson integrating-factor RK4: the viscous factor `exp(-ν|κ|²h)` is
    /// applied exactly per mode, the explicit part `N(u) = -g(u) + P f` by RK4.
    fn ifrk4(&self, s: &TrajectoryState, du0: &SpectralField, dt: f64) -> Result<SpectralField> {
        let t = s.t;
        let nu = self.dynamics.viscosity;
        let l = s.u.box_l();
        let decay = |f: &SpectralField, h: f64| f.multiplied(|k| (-nu * k.kappa_sq(l) * h).exp());

        // N(u_n) = u'_n + ν A u_n
        let mut a = du0.clone();
        a.axpy(nu, &crate::galerkin::apply_a(&s.u));

        let eu_half = decay(&s.u, 0.5 * dt);
        let mut x2 = s.u.clone();
        x2.axpy(0.5 * dt, &a);
        let u2 = decay(&x2, 0.5 * dt);
        let b = self.explicit(&u2, t + 0.5 * dt)?;

        let mut u3 = eu_half.clone();
        u3.axpy(0.5 * dt, &b);
        let c = self.explicit(&u3, t + 0.5 * dt)?;

        let mut u4 = decay(&s.u, dt);
        u4.axpy(dt, &decay(&c, 0.5 * dt));
        let d = self.explicit(&u4, t + dt)?;

        let mut out = decay(&s.u, dt);
        out.axpy(dt / 6.0, &decay(&a, dt));
        let mut bc = b;
        bc.axpy(1.0, &c);
        out.axpy(dt / 3.0, &decay(&bc, 0.5 * dt));
        out.axpy(dt / 6.0, &d);
        Ok(out)
    }
}

/// Classical RK4 step of `u' = rhs(u, f, ν)`.
pub fn step_rk4(s: &TrajectoryState, dt: f64, forcing: &dyn Forcing, dynamics: Dynamics) -> Result<TrajectoryState> {
    Ok(Integrator::new(dynamics, Scheme::Rk4, forcing).step(s, dt)?.0)
}

/// Integrating-factor RK4 step.
pub fn step_ifrk4(s: &TrajectoryState, dt: f64, forcing: &dyn Forcing, dynamics: Dynamics) -> Result<TrajectoryState> {
    Ok(Integrator::new(dynamics, Scheme::Ifrk4, forcing).step(s, dt)?.0)
}

/// What a monitor sees after each accepted step.
pub struct Snapshot<'a> {
    pub state: &'a TrajectoryState,
    pub forcing: &'a SpectralField,
    pub row: &'a LedgerRow,
}

/// Read-only per-step observer.
pub trait Monitor {
    fn observe(&mut self, snap: &Snapshot<'_>) -> Result<()>;
}

impl<F: FnMut(&Snapshot<'_>) -> Result<()>> Monitor for F {
    fn observe(&mut self, snap: &Snapshot<'_>) -> Result<()> {
        self(snap)
    }
}

#[derive(Debug)]
pub struct RunResult {
    pub ledger: EnergyLedger,
    pub final_state: TrajectoryState,
}

/// A run that stopped early; `ledger` holds every row recorded before the
/// failure.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub ledger: EnergyLedger,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} ledger rows)", self.error, self.ledger.len())
    }
}

/// Runs the configured problem from its own initial condition and forcing.
pub fn run(cfg: &RunConfig, monitors: &mut [&mut dyn Monitor]) -> std::result::Result<RunResult, RunFailure> {
    let meta = ledger_meta(cfg);
    let forcing = cfg.forcing().map_err(|error| RunFailure {
        error,
        ledger: EnergyLedger::new(meta),
    })?;
    simulate(cfg, &cfg.initial_field(), forcing.as_ref(), monitors)
}

fn ledger_meta(cfg: &RunConfig) -> LedgerMeta {
    LedgerMeta {
        viscosity: cfg.viscosity,
        box_l: cfg.box_l,
        cutoff: cfg.cutoff,
        dt: cfg.dt,
    }
}

pub fn dynamics_of(cfg: &RunConfig) -> Dynamics {
    Dynamics {
        nonlinear: cfg.nonlinear,
        ..Dynamics::new(cfg.viscosity)
    }
}

/// Steps `u0` to `cfg.t_final` under `forcing`, recording a ledger row for
/// `t = 0` and each accepted step (no rows when `t_final = 0`).
pub fn simulate(
    cfg: &RunConfig,
    u0: &SpectralField,
    forcing: &dyn Forcing,
    monitors: &mut [&mut dyn Monitor],
) -> std::result::Result<RunResult, RunFailure> {
    let mut ledger = EnergyLedger::new(ledger_meta(cfg));
    let steps = cfg.steps();
    let mut integrator = Integrator::new(dynamics_of(cfg), cfg.scheme, forcing);
    integrator.solenoidal_tol = cfg.tolerances.solenoidal;
    let state = init_state(u0, cfg.cutoff);
    if steps == 0 {
        return Ok(RunResult {
            ledger,
            final_state: state,
        });
    }
    let sup_grid = dealiased_grid(cfg.cutoff);
    let dx = cfg.box_l / sup_grid as f64;

    let mut record = |state: &TrajectoryState, correction: f64, ledger: &mut EnergyLedger| -> Result<()> {
        let f = forcing.at(state.t);
        let du = state.last_rhs.as_ref().expect("primed state");
        let row = LedgerRow::measure(state.step, state.t, &state.u, du, &f, sup_grid, correction)?;
        if !row.is_finite() {
            return Err(Error::NonFinite {
                step: state.step,
                t: state.t,
            });
        }
        if row.sup_norm > 0.0 {
            let limit = cfg.tolerances.cfl_advective * dx / row.sup_norm;
            if cfg.dt > limit {
                return Err(Error::Cfl {
                    guard: "advective",
                    dt: cfg.dt,
                    limit,
                });
            }
        }
        let snap = Snapshot {
            state,
            forcing: &f,
            row: &row,
        };
        for m in monitors.iter_mut() {
            m.observe(&snap)?;
        }
        ledger.push(row);
        Ok(())
    };

    let mut state = match integrator
        .prime(state)
        .and_then(|s| record(&s, 0.0, &mut ledger).map(|_| s))
    {
        Ok(s) => s,
        Err(error) => return Err(RunFailure { error, ledger }),
    };
    for _ in 0..steps {
        match integrator
            .step(&state, cfg.dt)
            .and_then(|(s, corr)| record(&s, corr, &mut ledger).map(|_| s))
        {
            Ok(s) => state = s,
            Err(error) => return Err(RunFailure { error, ledger }),
        }
    }
    Ok(RunResult {
        ledger,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{taylor_green, RunConfig};
    use crate::forcing::Steady;
    use crate::spectral::{l2_norm, random, WaveVector};
    use num_complex::Complex64;
    use std::f64::consts::TAU;

    fn single_mode(k: WaveVector, l: f64, cutoff: usize) -> SpectralField {
        let e = crate::galerkin::polarizations(k)[0];
        let mut f = SpectralField::zeros(cutoff, 3, l);
        f.set_pair(k, &e.map(|x| Complex64::new(x, 0.0)));
        f
    }

    #[test]
    fn init_state_projects_and_truncates() {
        let u0 = random::band_field(5, 3, 1.0, 1, 0.0, f64::INFINITY, 0.0, 1.0);
        let s = init_state(&u0, 3);
        assert_eq!(s.u.cutoff(), 3);
        assert!(l2_norm(&s.u) <= l2_norm(&u0));
        assert!(crate::spectral::max_divergence(&s.u) < 1e-13 * l2_norm(&u0));

        let sol = leray_project(&u0);
        let kept = init_state(&sol, 3);
        let dropped = l2_norm(&sol).powi(2) - l2_norm(&kept.u).powi(2);
        let mut expected = 0.0;
        for (k, c) in sol.modes() {
            if k.max_abs() > 3 {
                expected += c.iter().map(|v| v.norm_sqr()).sum::<f64>();
            }
        }
        expected *= sol.volume();
        assert!((dropped - expected).abs() < 1e-12 * expected);
        let same = init_state(&sol.with_cutoff(3), 3);
        assert!((&same.u - &sol.with_cutoff(3)).max_abs() < 1e-15);
    }

    #[test]
    fn zero_stays_zero() {
        let z = SpectralField::zeros(3, 3, 1.0);
        let f = Steady::zero(3, 1.0);
        let s = init_state(&z, 3);
        let a = step_rk4(&s, 0.01, &f, Dynamics::new(1.0)).unwrap();
        let b = step_ifrk4(&s, 0.01, &f, Dynamics::new(1.0)).unwrap();
        assert_eq!(a.u.max_abs(), 0.0);
        assert_eq!(b.u.max_abs(), 0.0);
    }

    #[test]
    fn linear_mode_decay() {
        let l = 1.0;
        let k = WaveVector::new(1, 2, 0);
        let u0 = single_mode(k, l, 2);
        let nu = 0.01;
        let dt = 0.01;
        let z = nu * k.kappa_sq(l) * dt;
        let f = Steady::zero(2, l);
        let s = init_state(&u0, 2);
        let exact = (-z).exp();

        let r = step_rk4(&s, dt, &f, Dynamics::linear(nu)).unwrap();
        let ratio = l2_norm(&r.u) / l2_norm(&u0);
        assert!(((ratio - exact) / exact).abs() <= z.powi(5), "{ratio} vs {exact}");

        let i = step_ifrk4(&s, dt, &f, Dynamics::linear(nu)).unwrap();
        let ratio = l2_norm(&i.u) / l2_norm(&u0);
        assert!(((ratio - exact) / exact).abs() < 1e-15);
    }

    #[test]
    fn taylor_green_rk4_decay() {
        let u0 = taylor_green(3, TAU, 1.0);
        let f = Steady::zero(3, TAU);
        let integ = Integrator::new(Dynamics::new(1.0), Scheme::Rk4, &f);
        let mut s = init_state(&u0, 3);
        for _ in 0..500 {
            s = integ.step(&s, 1e-3).unwrap().0;
        }
        let exact = u0.scaled((-2.0 * s.t).exp());
        let err = l2_norm(&(&s.u - &exact)) / l2_norm(&exact);
        assert!((s.t - 0.5).abs() < 1e-15);
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn schemes_agree_on_taylor_green() {
        let u0 = taylor_green(2, TAU, 1.0);
        let f = Steady::zero(2, TAU);
        let err_at = |dt: f64| {
            let a = Integrator::new(Dynamics::new(1.0), Scheme::Rk4, &f);
            let b = Integrator::new(Dynamics::new(1.0), Scheme::Ifrk4, &f);
            let (mut x, mut y) = (init_state(&u0, 2), init_state(&u0, 2));
            for _ in 0..(0.4 / dt).round() as usize {
                x = a.step(&x, dt).unwrap().0;
                y = b.step(&y, dt).unwrap().0;
            }
            l2_norm(&(&x.u - &y.u))
        };
        let (e1, e2) = (err_at(0.04), err_at(0.02));
        assert!(e1 < 1e-5 && e2 < e1 / 12.0, "{e1} {e2}");
    }

    #[test]
    fn constant_modes_are_frozen_without_mean_forcing() {
        let mut u0 = random::solenoidal_field(3, 1.0, 4).scaled(0.01);
        u0.set_pair(
            WaveVector::ZERO,
            &[
                Complex64::new(0.3, 0.0),
                Complex64::new(-0.1, 0.0),
                Complex64::new(0.2, 0.0),
            ],
        );
        let f = Steady(random::band_field(3, 3, 1.0, 9, 1.0, f64::INFINITY, 0.0, 0.01));
        let integ = Integrator::new(Dynamics::new(0.1), Scheme::Ifrk4, &f);
        let mut s = init_state(&u0, 3);
        let c0 = s.u.coeff(WaveVector::ZERO).to_vec();
        for _ in 0..20 {
            s = integ.step(&s, 0.01).unwrap().0;
            assert_eq!(s.u.coeff(WaveVector::ZERO), c0.as_slice());
        }
    }

    #[test]
    fn run_with_zero_horizon_is_empty() {
        let cfg = RunConfig::from_toml_str(
            "box_l = 1.0\nt_final = 0.0\ndt = 0.1\ncutoff = 2\n[ic]\nfamily = \"random_band\"\nseed = 1\nk_max = 2.0\n",
        )
        .unwrap();
        let r = run(&cfg, &mut []).unwrap();
        assert!(r.ledger.is_empty());
        assert_eq!(r.final_state.t, 0.0);
        assert_eq!(r.final_state.u, init_state(&cfg.initial_field(), 2).u);
    }

    #[test]
    fn blow_up_is_reported_with_partial_ledger() {
        let base = "scheme = \"rk4\"\nbox_l = 1.0\nt_final = 2.0\ndt = 0.01\ncutoff = 3\n[ic]\nfamily = \"random_band\"\nseed = 1\nk_max = 3.0\n";
        assert!(matches!(
            RunConfig::from_toml_str(base),
            Err(Error::Cfl { guard: "viscous", .. })
        ));
        // Explicit RK4 far beyond its stability limit with every guard relaxed,
        // so the instability itself is what stops the run.
        let relaxed = format!("{base}[tolerances]\ncfl_viscous = 1e9\ncfl_advective = 1e300\nsolenoidal = 1e300\n");
        let cfg = RunConfig::from_toml_str(&relaxed).unwrap();
        let fail = run(&cfg, &mut []).unwrap_err();
        assert!(matches!(fail.error, Error::NonFinite { .. }), "{}", fail.error);
        assert!(!fail.ledger.is_empty());
    }

    #[test]
    fn monitors_see_every_step() {
        let cfg = RunConfig::from_toml_str(
            "box_l = 1.0\nt_final = 0.05\ndt = 0.01\ncutoff = 2\nviscosity = 0.1\n[ic]\nfamily = \"random_band\"\nseed = 1\nk_max = 2.0\namplitude = 0.01\n",
        )
        .unwrap();
        let mut seen = Vec::new();
        let mut m = |s: &Snapshot<'_>| -> Result<()> {
            seen.push(s.state.step);
            Ok(())
        };
        let r = run(&cfg, &mut [&mut m]).unwrap();
        assert_eq!(seen, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(r.ledger.len(), 6);
        assert!(r.ledger.is_valid());
    }
}
