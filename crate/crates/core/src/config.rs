//! Run configuration: a single TOML file with nested tables. Unknown keys
//! are rejected.
//!
//! Field families (used for `ic` and, where noted, `forcing`), with
//! `κ = 2π / box_l`:
//!
//! * `zero`: `u = 0`.
//! * `taylor_green { amplitude }`:
//!   `u = A (sin κx₁ cos κx₂, -cos κx₁ sin κx₂, 0)`.
//! * `abc_flow { a, b, c, wavenumber }`: with `s = n κ`,
//!   `u = (a sin s x₃ + c cos s x₂, b sin s x₁ + a cos s x₃, c sin s x₂ + b cos s x₁)`.
//! * `random_band { seed, k_min, k_max, slope, amplitude }`: independent
//!   complex Gaussian coefficients scaled by `amplitude · |k|^slope` for
//!   `k_min ≤ |k| ≤ k_max`.
//! * `constant_mode { vector }`: the uniform field `vector`.
//!
//! Forcing additionally accepts `taylor_green_compatible { amplitude }`
//! (the Taylor–Green shape as a steady force), an `omega` on `random_band`
//! (modulation by `cos ωt`) and `series { paths, cadence }` reading
//! checkpoint files at `t = i · cadence` with linear interpolation.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::forcing::{Forcing, Modulated, Series, Steady};
use crate::spectral::{random, SpectralField, WaveVector};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rk4,
    #[default]
    Ifrk4,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    TaylorGreen {
        #[serde(default = "one")]
        amplitude: f64,
    },
    AbcFlow {
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "one")]
        b: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "one_i64")]
        wavenumber: i64,
    },
    RandomBand {
        seed: u64,
        #[serde(default = "one")]
        k_min: f64,
        k_max: f64,
        #[serde(default)]
        slope: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    ConstantMode {
        vector: [f64; 3],
    },
}

fn one_i64() -> i64 {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    Zero,
    ConstantMode {
        vector: [f64; 3],
    },
    TaylorGreenCompatible {
        #[serde(default = "one")]
        amplitude: f64,
    },
    RandomBand {
        seed: u64,
        #[serde(default = "one")]
        k_min: f64,
        k_max: f64,
        #[serde(default)]
        slope: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        omega: f64,
    },
    Series {
        paths: Vec<PathBuf>,
        cadence: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// RK4 only: `dt · ν · max|κ|² ≤ cfl_viscous`.
    pub cfl_viscous: f64,
    /// `dt ≤ cfl_advective · Δx / ‖u‖_∞`, checked every step.
    pub cfl_advective: f64,
    /// Largest relative solenoidality correction accepted after a step.
    pub solenoidal: f64,
    /// Energy-identity residual relative to `max E`.
    pub energy_identity: f64,
    /// Relative L² error against the analytic Taylor–Green decay.
    pub taylor_green: f64,
    /// Gronwall margin floor relative to `|w(0)|²`.
    pub gronwall: f64,
    /// Pressure-gradient residual relative to the momentum-balance scale.
    pub pressure_residual: f64,
    /// Compatibility jumps relative to the data scale.
    pub compat: f64,
    /// Largest relative change of `∫‖u'‖²_{V'}` between `K` and `2K`.
    pub refinement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cfl_viscous: 2.5,
            cfl_advective: 0.5,
            solenoidal: 1e-11,
            energy_identity: 1e-6,
            taylor_green: 1e-8,
            gronwall: 1e-10,
            pressure_residual: 1e-10,
            compat: 1e-12,
            refinement: 0.2,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Write a checkpoint every this many steps (0 disables).
    pub checkpoint_every: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationSpec {
    /// L² norm of the perturbation δ.
    pub amplitude: f64,
    /// Single solenoidal mode; defaults to `(K, 0, 0)`.
    pub mode: Option<[i64; 3]>,
    /// Random solenoidal shape instead of a single mode.
    pub seed: Option<u64>,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec {
            amplitude: 1e-6,
            mode: None,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudySpec {
    pub cutoffs: Vec<usize>,
    /// Times at which compatibility conditions are evaluated; defaults to
    /// `0, T/2, T`.
    pub compat_times: Option<Vec<f64>>,
}

impl Default for StudySpec {
    fn default() -> Self {
        StudySpec {
            cutoffs: vec![4, 8, 16],
            compat_times: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub box_l: f64,
    #[serde(default = "one")]
    pub viscosity: f64,
    pub t_final: f64,
    pub dt: f64,
    pub cutoff: usize,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Prescribed `∫ p dx`; defaults to `box_l³`.
    #[serde(default)]
    pub q0: Option<f64>,
    pub ic: FieldSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub perturbation: PerturbationSpec,
    #[serde(default)]
    pub study: StudySpec,
}

fn add_sin(f: &mut SpectralField, k: WaveVector, d: usize, amp: f64) {
    add_trig(f, k, d, Complex64::new(0.0, -0.5 * amp));
}

fn add_cos(f: &mut SpectralField, k: WaveVector, d: usize, amp: f64) {
    add_trig(f, k, d, Complex64::new(0.5 * amp, 0.0));
}

fn add_trig(f: &mut SpectralField, k: WaveVector, d: usize, c: Complex64) {
    if !f.contains(k) {
        return;
    }
    f.coeff_mut(k)[d] += c;
    f.coeff_mut(k.neg())[d] += c.conj();
}

/// `A (sin κx₁ cos κx₂, -cos κx₁ sin κx₂, 0)` with `κ = 2π/l`.
pub fn taylor_green(cutoff: usize, box_l: f64, amplitude: f64) -> SpectralField {
    let mut f = SpectralField::zeros(cutoff, 3, box_l);
    let (p, m) = (WaveVector::new(1, 1, 0), WaveVector::new(1, -1, 0));
    // sin a cos b = (sin(a+b) + sin(a-b))/2, cos a sin b = (sin(a+b) - sin(a-b))/2
    add_sin(&mut f, p, 0, 0.5 * amplitude);
    add_sin(&mut f, m, 0, 0.5 * amplitude);
    add_sin(&mut f, p, 1, -0.5 * amplitude);
    add_sin(&mut f, m, 1, 0.5 * amplitude);
    f
}

/// Pressure of the decaying Taylor–Green vortex of amplitude `A` at time `t`
/// (zero forcing), with `∫ p = q0`:
/// `p = A²/4 (cos 2κx₁ + cos 2κx₂) e^{-4νκ²t} + q0/l³`.
pub fn taylor_green_pressure(
    cutoff: usize,
    box_l: f64,
    amplitude: f64,
    viscosity: f64,
    t: f64,
    q0: f64,
) -> SpectralField {
    let kappa_sq = (std::f64::consts::TAU / box_l).powi(2);
    let a = 0.25 * amplitude * amplitude * (-4.0 * viscosity * kappa_sq * t).exp();
    let mut p = SpectralField::constant(cutoff, &[q0 / box_l.powi(3)], box_l);
    add_cos(&mut p, WaveVector::new(2, 0, 0), 0, a);
    add_cos(&mut p, WaveVector::new(0, 2, 0), 0, a);
    p
}

pub fn abc_flow(cutoff: usize, box_l: f64, a: f64, b: f64, c: f64, n: i64) -> SpectralField {
    let mut f = SpectralField::zeros(cutoff, 3, box_l);
    let (x, y, z) = (
        WaveVector::new(n, 0, 0),
        WaveVector::new(0, n, 0),
        WaveVector::new(0, 0, n),
    );
    add_sin(&mut f, z, 0, a);
    add_cos(&mut f, y, 0, c);
    add_sin(&mut f, x, 1, b);
    add_cos(&mut f, z, 1, a);
    add_sin(&mut f, y, 2, c);
    add_cos(&mut f, x, 2, b);
    f
}

impl FieldSpec {
    /// The family at the given cutoff (not yet projected).
    pub fn build(&self, cutoff: usize, box_l: f64) -> SpectralField {
        match *self {
            FieldSpec::Zero => SpectralField::zeros(cutoff, 3, box_l),
            FieldSpec::TaylorGreen { amplitude } => taylor_green(cutoff, box_l, amplitude),
            FieldSpec::AbcFlow { a, b, c, wavenumber } => abc_flow(cutoff, box_l, a, b, c, wavenumber),
            FieldSpec::RandomBand {
                seed,
                k_min,
                k_max,
                slope,
                amplitude,
            } => random::band_field(cutoff, 3, box_l, seed, k_min, k_max, slope, amplitude),
            FieldSpec::ConstantMode { vector } => SpectralField::constant(cutoff, &vector, box_l),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Fully resolved configuration as TOML, defaults included.
    pub fn resolved_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// SHA-256 of [`RunConfig::resolved_toml`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.resolved_toml().as_bytes()))
    }

    pub fn q0(&self) -> f64 {
        self.q0.unwrap_or(self.box_l.powi(3))
    }

    pub fn steps(&self) -> u64 {
        (self.t_final / self.dt).round() as u64
    }

    /// Largest `|κ|²` on the cutoff cube.
    pub fn max_kappa_sq(&self) -> f64 {
        let k = self.cutoff as i64;
        WaveVector::new(k, k, k).kappa_sq(self.box_l)
    }

    /// Overrides every seed in the initial condition and forcing.
    pub fn override_seed(&mut self, seed: u64) {
        if let FieldSpec::RandomBand { seed: s, .. } = &mut self.ic {
            *s = seed;
        }
        if let ForcingSpec::RandomBand { seed: s, .. } = &mut self.forcing {
            *s = seed;
        }
        if self.perturbation.seed.is_some() {
            self.perturbation.seed = Some(seed);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if !(self.box_l > 0.0 && self.box_l.is_finite()) {
            return err(format!("box_l must be positive, got {}", self.box_l));
        }
        if !(self.viscosity > 0.0 && self.viscosity.is_finite()) {
            return err(format!("viscosity must be positive, got {}", self.viscosity));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return err(format!("t_final must be nonnegative, got {}", self.t_final));
        }
        let n = self.t_final / self.dt;
        if (n - n.round()).abs() > 1e-6 * n.max(1.0) {
            return err(format!(
                "t_final = {} is not a multiple of dt = {}",
                self.t_final, self.dt
            ));
        }
        if let Some(q0) = self.q0 {
            if !(q0 > 0.0) {
                return err(format!("q0 must be positive, got {q0}"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("cfl_viscous", t.cfl_viscous),
            ("cfl_advective", t.cfl_advective),
            ("solenoidal", t.solenoidal),
            ("energy_identity", t.energy_identity),
            ("taylor_green", t.taylor_green),
            ("gronwall", t.gronwall),
            ("pressure_residual", t.pressure_residual),
            ("compat", t.compat),
            ("refinement", t.refinement),
        ] {
            if !(v > 0.0) {
                return err(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.scheme == Scheme::Rk4 {
            let limit = t.cfl_viscous / (self.viscosity * self.max_kappa_sq().max(f64::MIN_POSITIVE));
            if self.dt > limit {
                return Err(Error::Cfl {
                    guard: "viscous",
                    dt: self.dt,
                    limit,
                });
            }
        }
        if let FieldSpec::RandomBand { k_min, k_max, .. } = self.ic {
            if k_min > k_max {
                return err(format!("ic k_min {k_min} exceeds k_max {k_max}"));
            }
        }
        match &self.forcing {
            ForcingSpec::RandomBand { k_min, k_max, .. } if k_min > k_max => {
                return err(format!("forcing k_min {k_min} exceeds k_max {k_max}"));
            }
            ForcingSpec::Series { paths, cadence } if paths.is_empty() || !(*cadence > 0.0) => {
                return err("series forcing needs at least one path and a positive cadence".into());
            }
            _ => {}
        }
        if self.perturbation.amplitude < 0.0 {
            return err("perturbation amplitude must be nonnegative".into());
        }
        Ok(())
    }

    pub fn initial_field(&self) -> SpectralField {
        self.ic.build(self.cutoff, self.box_l)
    }

    pub fn forcing(&self) -> Result<Box<dyn Forcing>> {
        self.forcing_at(self.cutoff)
    }

    /// Forcing at an arbitrary cutoff (for refinement studies).
    pub fn forcing_at(&self, cutoff: usize) -> Result<Box<dyn Forcing>> {
        let l = self.box_l;
        Ok(match &self.forcing {
            ForcingSpec::Zero => Box::new(Steady::zero(cutoff, l)),
            ForcingSpec::ConstantMode { vector } => Box::new(Steady(SpectralField::constant(cutoff, vector, l))),
            ForcingSpec::TaylorGreenCompatible { amplitude } => Box::new(Steady(taylor_green(cutoff, l, *amplitude))),
            ForcingSpec::RandomBand {
                seed,
                k_min,
                k_max,
                slope,
                amplitude,
                omega,
            } => {
                let base = random::band_field(cutoff, 3, l, *seed, *k_min, *k_max, *slope, *amplitude);
                if *omega == 0.0 {
                    Box::new(Steady(base))
                } else {
                    Box::new(Modulated { base, omega: *omega })
                }
            }
            ForcingSpec::Series { paths, cadence } => {
                let mut frames = Vec::with_capacity(paths.len());
                for p in paths {
                    let ck = Checkpoint::read(p)?;
                    let field = ck.field()?;
                    if field.components() != 3 || field.box_l() != l {
                        return Err(Error::Config(format!(
                            "series frame {} does not match the box",
                            p.display()
                        )));
                    }
                    frames.push(field.with_cutoff(cutoff));
                }
                Box::new(Series {
                    frames,
                    cadence: *cadence,
                })
            }
        })
    }

    /// The configured perturbation δ (solenoidal, `|δ| = amplitude`).
    pub fn perturbation_field(&self) -> SpectralField {
        let p = &self.perturbation;
        let (k, l) = (self.cutoff, self.box_l);
        let shape = match (p.seed, p.mode) {
            (Some(seed), _) => random::solenoidal_field(k, l, seed),
            (None, mode) => {
                let m = WaveVector(mode.unwrap_or([k as i64, 0, 0]));
                if m.is_zero() || m.max_abs() > k as u64 {
                    SpectralField::constant(k, &[1.0, 0.0, 0.0], l)
                } else {
                    let e = crate::galerkin::polarizations(m)[0];
                    let mut f = SpectralField::zeros(k, 3, l);
                    f.set_pair(m, &e.map(|x| Complex64::new(x, 0.0)));
                    f
                }
            }
        };
        let norm = crate::spectral::l2_norm(&shape);
        if norm == 0.0 {
            return shape;
        }
        shape.scaled(p.amplitude / norm)
    }
}
