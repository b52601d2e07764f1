//! Seeded random band-limited fields.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{SpectralField, WaveVector};

/// Random real field with `c(k) = amplitude · |k|^slope · (ξ + iη)` for
/// `k_min ≤ |k| ≤ k_max` (Euclidean integer norm), Gaussian `ξ, η`.
///
/// Coefficients are drawn over the full cube `|k_i| ≤ ceil(k_max)` (or the
/// cutoff, if `k_max` is infinite) in lexicographic order and only then
/// truncated to `cutoff`, so the low modes do not depend on the cutoff
/// whenever `k_max` is finite.
#[allow(clippy::too_many_arguments)]
pub fn band_field(
    cutoff: usize,
    components: usize,
    box_l: f64,
    seed: u64,
    k_min: f64,
    k_max: f64,
    slope: f64,
    amplitude: f64,
) -> SpectralField {
    let span = if k_max.is_finite() {
        k_max.ceil() as usize
    } else {
        cutoff
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut full = SpectralField::zeros(span, components, box_l);
    let waves: Vec<WaveVector> = full.wavevectors().collect();
    let mut value = vec![Complex64::new(0.0, 0.0); components];
    for k in waves {
        if !(k.is_zero() || k.is_representative()) {
            continue;
        }
        let r = (k.norm_sq() as f64).sqrt();
        if r < k_min || r > k_max {
            continue;
        }
        let scale = if k.is_zero() {
            amplitude
        } else {
            amplitude * r.powf(slope)
        };
        for v in value.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *v = Complex64::new(re, im) * scale;
        }
        full.set_pair(k, &value);
    }
    full.with_cutoff(cutoff)
}

/// Random solenoidal zero-mean field with unit-variance-style coefficients.
pub fn solenoidal_field(cutoff: usize, box_l: f64, seed: u64) -> SpectralField {
    let f = band_field(cutoff, 3, box_l, seed, 1.0, f64::INFINITY, 0.0, 1.0);
    super::leray_project(&f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_hermitian() {
        let a = band_field(3, 3, 1.0, 42, 0.0, 3.0, -1.0, 1.0);
        let b = band_field(3, 3, 1.0, 42, 0.0, 3.0, -1.0, 1.0);
        assert_eq!(a, b);
        assert_eq!(a.hermitian_defect(), 0.0);
    }

    #[test]
    fn low_modes_independent_of_cutoff() {
        let a = band_field(2, 3, 1.0, 7, 1.0, 6.0, -2.0, 1.0);
        let b = band_field(5, 3, 1.0, 7, 1.0, 6.0, -2.0, 1.0);
        assert_eq!(a, b.with_cutoff(2));
    }
}
