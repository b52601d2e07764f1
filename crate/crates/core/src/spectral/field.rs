use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::WaveVector;
use crate::error::{Error, Result};

/// Fourier coefficients of a real scalar or vector field on `[0, l]^3`.
///
/// The field is `u(x) = Σ_k c(k) exp(iκ·x)` over the cube `|k_i| ≤ K`.
/// Storage covers the full cube including the Hermitian-redundant half;
/// `c(-k) = conj c(k)` is maintained by every constructor in this crate and
/// validated by [`SpectralField::hermitian_defect`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    cutoff: usize,
    components: usize,
    box_l: f64,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(cutoff: usize, components: usize, box_l: f64) -> Self {
        assert!(components > 0, "field needs at least one component");
        assert!(box_l > 0.0, "box size must be positive");
        let side = 2 * cutoff + 1;
        SpectralField {
            cutoff,
            components,
            box_l,
            coeffs: vec![Complex64::new(0.0, 0.0); side * side * side * components],
        }
    }

    /// Field with only the `k = 0` coefficient set to `value`.
    pub fn constant(cutoff: usize, value: &[f64], box_l: f64) -> Self {
        let mut f = Self::zeros(cutoff, value.len(), box_l);
        for (c, v) in f.coeff_mut(WaveVector::ZERO).iter_mut().zip(value) {
            *c = Complex64::new(*v, 0.0);
        }
        f
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn box_l(&self) -> f64 {
        self.box_l
    }

    pub fn volume(&self) -> f64 {
        self.box_l.powi(3)
    }

    /// Points per axis of the coefficient cube.
    pub fn side(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn contains(&self, k: WaveVector) -> bool {
        k.max_abs() <= self.cutoff as u64
    }

    fn offset(&self, k: WaveVector) -> usize {
        let kk = self.cutoff as i64;
        let side = self.side();
        let i = |c: i64| (c + kk) as usize;
        ((i(k.0[0]) * side + i(k.0[1])) * side + i(k.0[2])) * self.components
    }

    /// Coefficient vector at `k`. Panics if `k` lies outside the cutoff.
    pub fn coeff(&self, k: WaveVector) -> &[Complex64] {
        assert!(self.contains(k), "wavevector {k:?} outside cutoff {}", self.cutoff);
        let o = self.offset(k);
        &self.coeffs[o..o + self.components]
    }

    pub fn coeff_mut(&mut self, k: WaveVector) -> &mut [Complex64] {
        assert!(self.contains(k), "wavevector {k:?} outside cutoff {}", self.cutoff);
        let o = self.offset(k);
        &mut self.coeffs[o..o + self.components]
    }

    /// Coefficient at `k`, component `d`; zero outside the cutoff.
    pub fn get(&self, k: WaveVector, d: usize) -> Complex64 {
        if self.contains(k) {
            self.coeff(k)[d]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Sets `c(k) = value` and `c(-k) = conj(value)`. At `k = 0` only the
    /// real part is kept.
    pub fn set_pair(&mut self, k: WaveVector, value: &[Complex64]) {
        assert_eq!(value.len(), self.components);
        if k.is_zero() {
            for (c, v) in self.coeff_mut(k).iter_mut().zip(value) {
                *c = Complex64::new(v.re, 0.0);
            }
            return;
        }
        self.coeff_mut(k).copy_from_slice(value);
        for (c, v) in self.coeff_mut(k.neg()).iter_mut().zip(value) {
            *c = v.conj();
        }
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn raw_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// All wavevectors of the cube in lexicographic order.
    pub fn wavevectors(&self) -> impl Iterator<Item = WaveVector> {
        let k = self.cutoff as i64;
        (-k..=k).flat_map(move |a| (-k..=k).flat_map(move |b| (-k..=k).map(move |c| WaveVector([a, b, c]))))
    }

    /// `(k, coefficients)` pairs in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (WaveVector, &[Complex64])> {
        self.wavevectors().zip(self.coeffs.chunks_exact(self.components))
    }

    /// Applies `f` to every coefficient vector in storage order.
    pub fn for_each_mode_mut(&mut self, mut f: impl FnMut(WaveVector, &mut [Complex64])) {
        let waves: Vec<WaveVector> = self.wavevectors().collect();
        for (k, c) in waves.into_iter().zip(self.coeffs.chunks_exact_mut(self.components)) {
            f(k, c);
        }
    }

    /// Multiplies every mode by the real symbol `m(k)`.
    pub fn multiplied(&self, m: impl Fn(WaveVector) -> f64) -> Self {
        let mut out = self.clone();
        out.for_each_mode_mut(|k, c| {
            let s = m(k);
            c.iter_mut().for_each(|v| *v *= s);
        });
        out
    }

    /// Copy with a different cutoff: modes beyond the new cutoff are dropped,
    /// new modes are zero.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut out = Self::zeros(cutoff, self.components, self.box_l);
        let common = cutoff.min(self.cutoff) as i64;
        for a in -common..=common {
            for b in -common..=common {
                for c in -common..=common {
                    let k = WaveVector([a, b, c]);
                    out.coeff_mut(k).copy_from_slice(self.coeff(k));
                }
            }
        }
        out
    }

    /// Single component `d` as a scalar field.
    pub fn component(&self, d: usize) -> Self {
        assert!(d < self.components);
        let mut out = Self::zeros(self.cutoff, 1, self.box_l);
        for (o, c) in out.coeffs.iter_mut().zip(self.coeffs.chunks_exact(self.components)) {
            *o = c[d];
        }
        out
    }

    /// Stacks scalar fields into a vector field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts.first().expect("stack needs at least one field");
        let components: usize = parts.iter().map(|p| p.components).sum();
        let mut out = Self::zeros(first.cutoff, components, first.box_l);
        let mut d0 = 0;
        for p in parts {
            first.check_shape(p)?;
            for (o, c) in out
                .coeffs
                .chunks_exact_mut(components)
                .zip(p.coeffs.chunks_exact(p.components))
            {
                o[d0..d0 + p.components].copy_from_slice(c);
            }
            d0 += p.components;
        }
        Ok(out)
    }

    pub fn check_shape(&self, other: &SpectralField) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::CutoffMismatch(self.cutoff, other.cutoff));
        }
        if self.box_l != other.box_l {
            return Err(Error::BoxMismatch(self.box_l, other.box_l));
        }
        Ok(())
    }

    pub fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        self.check_shape(other)?;
        if self.components != other.components {
            return Err(Error::ComponentMismatch(self.components, other.components));
        }
        Ok(())
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        debug_assert!(self.check_compatible(other).is_ok());
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += o * a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= a);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max_k |c(-k) - conj c(k)|`; zero for an exactly real field.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in self.wavevectors() {
            let a = self.coeff(k);
            let b = self.coeff(k.neg());
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y.conj()).norm());
            }
        }
        worst
    }

    /// Replaces each `c(k)` by `(c(k) + conj c(-k)) / 2`.
    pub fn symmetrize(&mut self) {
        let waves: Vec<WaveVector> = self.wavevectors().collect();
        for k in waves {
            if k.is_zero() {
                self.coeff_mut(k).iter_mut().for_each(|c| c.im = 0.0);
            } else if k.is_representative() {
                let a: Vec<Complex64> = self.coeff(k).to_vec();
                let b: Vec<Complex64> = self.coeff(k.neg()).to_vec();
                let avg: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| (x + y.conj()) * 0.5).collect();
                self.set_pair(k, &avg);
            }
        }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;

    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, a: f64) -> SpectralField {
        self.scaled(a)
    }
}
