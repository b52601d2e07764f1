//! Self-describing JSON container for spectral fields.
//!
//! Each stored mode is one line `[[k1,k2,k3],[re_0,im_0,re_1,im_1,...]]`.
//! Floats are written as shortest round-trip decimals, so reading a
//! checkpoint reproduces the coefficients bit for bit. Exactly-zero modes
//! are omitted.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, WaveVector};

pub const FORMAT: &str = "periodic-ns-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord(pub [i64; 3], pub Vec<f64>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    /// Set for pressure snapshots and other scalar fields.
    pub scalar: bool,
    pub box_l: f64,
    pub cutoff: usize,
    pub components: usize,
    pub time: f64,
    pub config_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
    pub modes: Vec<ModeRecord>,
}

#[derive(Serialize)]
struct Header<'a> {
    format: &'a str,
    version: u32,
    scalar: bool,
    box_l: f64,
    cutoff: usize,
    components: usize,
    time: f64,
    config_hash: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    q0: Option<f64>,
}

impl Checkpoint {
    pub fn from_field(field: &SpectralField, time: f64, config_hash: &str) -> Self {
        let modes = field
            .modes()
            .filter(|(_, c)| c.iter().any(|v| v.re != 0.0 || v.im != 0.0))
            .map(|(k, c)| ModeRecord(k.0, c.iter().flat_map(|v| [v.re, v.im]).collect()))
            .collect();
        Checkpoint {
            format: FORMAT.to_string(),
            version: VERSION,
            scalar: field.components() == 1,
            box_l: field.box_l(),
            cutoff: field.cutoff(),
            components: field.components(),
            time,
            config_hash: config_hash.to_string(),
            q0: None,
            modes,
        }
    }

    /// Rebuilds the field, validating shape and Hermitian symmetry.
    pub fn field(&self) -> Result<SpectralField> {
        let bad = |m: String| Err(Error::Checkpoint(m));
        if self.format != FORMAT || self.version != VERSION {
            return bad(format!("unsupported format {} v{}", self.format, self.version));
        }
        if self.components == 0 || !(self.box_l > 0.0) {
            return bad("empty field or nonpositive box".into());
        }
        if self.scalar != (self.components == 1) {
            return bad("scalar flag disagrees with component count".into());
        }
        let mut f = SpectralField::zeros(self.cutoff, self.components, self.box_l);
        for ModeRecord(k, c) in &self.modes {
            let k = WaveVector(*k);
            if !f.contains(k) {
                return bad(format!("mode {:?} outside cutoff {}", k.0, self.cutoff));
            }
            if c.len() != 2 * self.components {
                return bad(format!(
                    "mode {:?} has {} values, expected {}",
                    k.0,
                    c.len(),
                    2 * self.components
                ));
            }
            for (slot, pair) in f.coeff_mut(k).iter_mut().zip(c.chunks_exact(2)) {
                *slot = Complex64::new(pair[0], pair[1]);
            }
        }
        if !f.is_finite() {
            return bad("non-finite coefficient".into());
        }
        let defect = f.hermitian_defect();
        if defect > 1e-12 * f.max_abs() {
            return bad(format!("coefficients are not Hermitian (defect {defect:e})"));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        let header = Header {
            format: &self.format,
            version: self.version,
            scalar: self.scalar,
            box_l: self.box_l,
            cutoff: self.cutoff,
            components: self.components,
            time: self.time,
            config_hash: &self.config_hash,
            q0: self.q0,
        };
        let head = serde_json::to_string_pretty(&header).expect("header serializes");
        let head = head.trim_end().trim_end_matches('}').trim_end();
        let lines: Vec<String> = self
            .modes
            .iter()
            .map(|m| format!("    {}", serde_json::to_string(m).expect("mode serializes")))
            .collect();
        if lines.is_empty() {
            format!("{head},\n  \"modes\": []\n}}\n")
        } else {
            format!("{head},\n  \"modes\": [\n{}\n  ]\n}}\n", lines.join(",\n"))
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn round_trip_is_bit_exact(seed in any::<u64>(), cutoff in 0usize..4, comps in prop::sample::select(vec![1usize, 3])) {
            let f = random::band_field(cutoff, comps, 1.0 + (seed % 7) as f64 / 3.0, seed, 0.0, f64::INFINITY, -1.3, 0.1);
            let ck = Checkpoint::from_field(&f, 0.125, "abc");
            let back = Checkpoint::from_json(&ck.to_json()).unwrap();
            prop_assert_eq!(&back, &ck);
            prop_assert_eq!(back.field().unwrap(), f);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut f = SpectralField::zeros(1, 1, 1.0);
        f.coeff_mut(WaveVector::new(1, 0, 0))[0] = Complex64::new(1.0, 0.0);
        let ck = Checkpoint::from_field(&f, 0.0, "");
        assert!(matches!(ck.field(), Err(Error::Checkpoint(_))));
    }

    #[test]
    fn one_mode_per_line() {
        let f = random::band_field(1, 3, 1.0, 3, 0.0, f64::INFINITY, 0.0, 1.0);
        let json = Checkpoint::from_field(&f, 0.0, "h").to_json();
        assert_eq!(json.lines().filter(|l| l.trim_start().starts_with("[[")).count(), 27);
    }
}
