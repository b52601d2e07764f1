use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, WaveVector};

/// One solenoidal eigenmode of the Galerkin basis.
///
/// For `k = 0` the mode is the real constant field `e / l^{3/2}`. For a
/// Hermitian representative `k ≠ 0` the mode carries a complex amplitude:
/// its real field is `(e exp(iκ·x) + conj(e) exp(-iκ·x)) / sqrt(2 l³)`, and
/// the `i·e` partner is the second real direction of the same amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisMode {
    /// 1-based position in the ordered basis.
    pub index: usize,
    pub wave: WaveVector,
    /// 0..3 for the constant modes, 0..2 otherwise.
    pub polarization_id: usize,
    pub polarization: [Complex64; 3],
    /// `(1 + |κ|²)^{3/2}`.
    pub eigenvalue: f64,
}

impl BasisMode {
    /// Spectral coefficient placed at `k` for unit (real) amplitude.
    fn unit_coeff(&self, box_l: f64) -> f64 {
        if self.wave.is_zero() {
            box_l.powf(-1.5)
        } else {
            (2.0 * box_l.powi(3)).powf(-0.5)
        }
    }

    /// Real field of this mode for amplitude `amp` (complex amplitudes only
    /// make sense for `k ≠ 0`).
    pub fn field(&self, cutoff: usize, box_l: f64, amp: Complex64) -> SpectralField {
        let mut f = SpectralField::zeros(cutoff, 3, box_l);
        let s = self.unit_coeff(box_l);
        let v: Vec<Complex64> = self.polarization.iter().map(|e| e * amp * s).collect();
        f.set_pair(self.wave, &v);
        f
    }
}

/// Ordered solenoidal Fourier basis for the cube cutoff `|k_i| ≤ K`.
#[derive(Clone, Debug)]
pub struct GalerkinBasis {
    modes: Vec<BasisMode>,
    cutoff: usize,
    box_l: f64,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Two orthonormal real vectors perpendicular to `k`, built from the first
/// coordinate axis not parallel to `k`.
pub fn polarizations(k: WaveVector) -> [[f64; 3]; 2] {
    let kf = [k.0[0] as f64, k.0[1] as f64, k.0[2] as f64];
    let kh = normalized(kf);
    let axis = (0..3)
        .find(|&i| (0..3).any(|j| j != i && k.0[j] != 0))
        .expect("nonzero wavevector");
    let mut a = [0.0; 3];
    a[axis] = 1.0;
    let e1 = normalized(cross(a, kh));
    let e2 = cross(kh, e1);
    [e1, e2]
}

impl GalerkinBasis {
    pub fn build(cutoff: usize, box_l: f64) -> Self {
        let mut modes = Vec::new();
        let zero = Complex64::new(0.0, 0.0);
        for axis in 0..3 {
            let mut e = [zero; 3];
            e[axis] = Complex64::new(1.0, 0.0);
            modes.push(BasisMode {
                index: 0,
                wave: WaveVector::ZERO,
                polarization_id: axis,
                polarization: e,
                eigenvalue: 1.0,
            });
        }
        let k = cutoff as i64;
        for a in -k..=k {
            for b in -k..=k {
                for c in -k..=k {
                    let w = WaveVector::new(a, b, c);
                    if !w.is_representative() {
                        continue;
                    }
                    let lambda = (1.0 + w.kappa_sq(box_l)).powf(1.5);
                    for (pid, e) in polarizations(w).into_iter().enumerate() {
                        modes.push(BasisMode {
                            index: 0,
                            wave: w,
                            polarization_id: pid,
                            polarization: e.map(|x| Complex64::new(x, 0.0)),
                            eigenvalue: lambda,
                        });
                    }
                }
            }
        }
        // λ is monotone in the integer |k|², which gives exact tie detection.
        modes.sort_by_key(|m| (m.wave.norm_sq(), m.wave.0, m.polarization_id));
        for (i, m) in modes.iter_mut().enumerate() {
            m.index = i + 1;
        }
        GalerkinBasis { modes, cutoff, box_l }
    }

    pub fn modes(&self) -> &[BasisMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn box_l(&self) -> f64 {
        self.box_l
    }

    /// Orthogonal projection onto the span of the first `m` modes.
    pub fn project(&self, field: &SpectralField, m: usize) -> Result<SpectralField> {
        if m > self.modes.len() {
            return Err(Error::BasisTooSmall {
                m,
                size: self.modes.len(),
            });
        }
        assert_eq!(field.components(), 3, "P_m acts on vector fields");
        if field.box_l() != self.box_l {
            return Err(Error::BoxMismatch(field.box_l(), self.box_l));
        }
        let mut out = SpectralField::zeros(field.cutoff(), 3, self.box_l);
        let mut acc: Vec<(WaveVector, [Complex64; 3])> = Vec::new();
        for mode in &self.modes[..m] {
            if !field.contains(mode.wave) {
                continue;
            }
            let c = field.coeff(mode.wave);
            let e = &mode.polarization;
            let mut amp = c[0] * e[0].conj() + c[1] * e[1].conj() + c[2] * e[2].conj();
            if mode.wave.is_zero() {
                amp = Complex64::new(amp.re, 0.0);
            }
            let contrib = [e[0] * amp, e[1] * amp, e[2] * amp];
            match acc.iter_mut().find(|(w, _)| *w == mode.wave) {
                Some((_, v)) => v.iter_mut().zip(contrib).for_each(|(a, b)| *a += b),
                None => acc.push((mode.wave, contrib)),
            }
        }
        for (w, v) in acc {
            out.set_pair(w, &v);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{l2_inner, leray_project, max_divergence, random};
    use std::f64::consts::TAU;

    #[test]
    fn cutoff_zero_has_three_constant_modes() {
        let b = GalerkinBasis::build(0, 1.0);
        assert_eq!(b.len(), 3);
        assert!(b.modes().iter().all(|m| m.eigenvalue == 1.0 && m.wave.is_zero()));
    }

    #[test]
    fn mode_count_and_first_eigenvalue() {
        let b = GalerkinBasis::build(1, TAU);
        assert_eq!(b.len(), 3 + 2 * 13);
        let m = b.modes().iter().find(|m| m.wave == WaveVector::new(1, 0, 0)).unwrap();
        assert!((m.eigenvalue - 2f64.powf(1.5)).abs() < 1e-14);
        assert!(b.modes()[..3].iter().all(|m| m.wave.is_zero()));
        assert!(b.modes()[3..].iter().all(|m| m.eigenvalue > 1.0));
    }

    #[test]
    fn ordering_is_by_eigenvalue_then_lexicographic() {
        let b = GalerkinBasis::build(2, 1.0);
        for pair in b.modes().windows(2) {
            let (x, y) = (&pair[0], &pair[1]);
            assert!(x.eigenvalue <= y.eigenvalue);
            if x.wave.norm_sq() == y.wave.norm_sq() {
                assert!((x.wave.0, x.polarization_id) < (y.wave.0, y.polarization_id));
            }
        }
    }

    #[test]
    fn modes_are_solenoidal_and_orthonormal() {
        let (k, l) = (2, 1.7);
        let b = GalerkinBasis::build(k, l);
        let one = Complex64::new(1.0, 0.0);
        let fields: Vec<SpectralField> = b.modes().iter().map(|m| m.field(k, l, one)).collect();
        for (i, fi) in fields.iter().enumerate() {
            assert!(max_divergence(fi) < 1e-14);
            for (j, fj) in fields.iter().enumerate().skip(i) {
                let ip = l2_inner(fi, fj).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-13, "({i},{j}) -> {ip}");
            }
        }
    }

    #[test]
    fn rejects_oversized_m() {
        let b = GalerkinBasis::build(1, 1.0);
        let f = SpectralField::zeros(1, 3, 1.0);
        assert!(matches!(b.project(&f, b.len() + 1), Err(Error::BasisTooSmall { .. })));
    }

    #[test]
    fn full_projection_is_identity_on_solenoidal_fields() {
        let b = GalerkinBasis::build(3, 2.0);
        let f = leray_project(&random::band_field(3, 3, 2.0, 11, 0.0, f64::INFINITY, 0.0, 1.0));
        let p = b.project(&f, b.len()).unwrap();
        assert!((&p - &f).max_abs() < 1e-14 * f.max_abs());
    }

    #[test]
    fn element_of_span_is_unchanged() {
        let b = GalerkinBasis::build(2, 1.0);
        let mut f = SpectralField::zeros(2, 3, 1.0);
        for mode in &b.modes()[..10] {
            let amp = Complex64::new(0.3 * mode.index as f64, if mode.wave.is_zero() { 0.0 } else { -0.2 });
            f.axpy(1.0, &mode.field(2, 1.0, amp));
        }
        let p = b.project(&f, 10).unwrap();
        assert!((&p - &f).max_abs() < 1e-14);
    }
}
