//! Time-dependent body forces sampled at stage times.

use crate::spectral::SpectralField;

pub trait Forcing: Send + Sync {
    /// Spectral forcing at time `t`.
    fn at(&self, t: f64) -> SpectralField;
}

/// Time-independent forcing (including zero).
#[derive(Clone, Debug)]
pub struct Steady(pub SpectralField);

impl Steady {
    pub fn zero(cutoff: usize, box_l: f64) -> Self {
        Steady(SpectralField::zeros(cutoff, 3, box_l))
    }
}

impl Forcing for Steady {
    fn at(&self, _t: f64) -> SpectralField {
        self.0.clone()
    }
}

/// `base · cos(ω t)`.
#[derive(Clone, Debug)]
pub struct Modulated {
    pub base: SpectralField,
    pub omega: f64,
}

impl Forcing for Modulated {
    fn at(&self, t: f64) -> SpectralField {
        self.base.scaled((self.omega * t).cos())
    }
}

/// Snapshots at `t = i · cadence`, linearly interpolated in between and held
/// constant past the last one.
#[derive(Clone, Debug)]
pub struct Series {
    pub frames: Vec<SpectralField>,
    pub cadence: f64,
}

impl Forcing for Series {
    fn at(&self, t: f64) -> SpectralField {
        let last = self.frames.len() - 1;
        let s = (t / self.cadence).max(0.0);
        let i = (s.floor() as usize).min(last);
        if i == last {
            return self.frames[last].clone();
        }
        let w = s - i as f64;
        let mut out = self.frames[i].scaled(1.0 - w);
        out.axpy(w, &self.frames[i + 1]);
        out
    }
}
