use num_complex::Complex64;

use super::fft::{fft3, Direction};
use super::{SpectralField, WaveVector};
use crate::error::{Error, Result};

/// Real samples of a field on the uniform grid `x_j = j l / n`, `j = 0..n`.
///
/// Values are stored component-major: `values[((d * n + i1) * n + i2) * n + i3]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalGrid {
    n: usize,
    components: usize,
    box_l: f64,
    values: Vec<f64>,
    /// Largest imaginary residue discarded by the inverse transform,
    /// relative to the largest real value.
    imag_residue: f64,
}

impl PhysicalGrid {
    pub fn new(n: usize, components: usize, box_l: f64, values: Vec<f64>) -> Result<Self> {
        let expected = n * n * n * components;
        if values.len() != expected {
            return Err(Error::GridSize {
                got: values.len(),
                expected,
            });
        }
        Ok(PhysicalGrid {
            n,
            components,
            box_l,
            values,
            imag_residue: 0.0,
        })
    }

    /// Samples `f(x)` (which writes `components` values) at every node.
    pub fn from_fn(n: usize, components: usize, box_l: f64, mut f: impl FnMut([f64; 3], &mut [f64])) -> Self {
        let h = box_l / n as f64;
        let mut values = vec![0.0; n * n * n * components];
        let mut buf = vec![0.0; components];
        let nnn = n * n * n;
        for i1 in 0..n {
            for i2 in 0..n {
                for i3 in 0..n {
                    f([i1 as f64 * h, i2 as f64 * h, i3 as f64 * h], &mut buf);
                    let node = (i1 * n + i2) * n + i3;
                    for (d, v) in buf.iter().enumerate() {
                        values[d * nnn + node] = *v;
                    }
                }
            }
        }
        PhysicalGrid {
            n,
            components,
            box_l,
            values,
            imag_residue: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn box_l(&self) -> f64 {
        self.box_l
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    /// Samples of component `d`.
    pub fn component(&self, d: usize) -> &[f64] {
        let nnn = self.n * self.n * self.n;
        &self.values[d * nnn..(d + 1) * nnn]
    }

    pub fn component_mut(&mut self, d: usize) -> &mut [f64] {
        let nnn = self.n * self.n * self.n;
        &mut self.values[d * nnn..(d + 1) * nnn]
    }

    pub fn node_count(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Quadrature weight `(l/n)^3`.
    pub fn cell_volume(&self) -> f64 {
        (self.box_l / self.n as f64).powi(3)
    }

    /// Euclidean magnitude of the value vector at every node.
    pub fn magnitudes(&self) -> Vec<f64> {
        let nnn = self.node_count();
        (0..nnn)
            .map(|i| {
                (0..self.components)
                    .map(|d| self.values[d * nnn + i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

fn wrap(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

fn check_grid(n: usize, cutoff: usize) -> Result<()> {
    let required = 2 * cutoff + 1;
    if n < required {
        return Err(Error::GridTooSmall { n, cutoff, required });
    }
    Ok(())
}

/// Evaluates `F` at the `n^3` uniform nodes.
pub fn to_physical(field: &SpectralField, n: usize) -> Result<PhysicalGrid> {
    check_grid(n, field.cutoff())?;
    let comps = field.components();
    let nnn = n * n * n;
    let mut values = vec![0.0; nnn * comps];
    let mut buf = vec![Complex64::new(0.0, 0.0); nnn];
    let mut max_re: f64 = 0.0;
    let mut max_im: f64 = 0.0;
    for d in 0..comps {
        buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (k, c) in field.modes() {
            let idx = (wrap(k.0[0], n) * n + wrap(k.0[1], n)) * n + wrap(k.0[2], n);
            buf[idx] = c[d];
        }
        fft3(&mut buf, n, Direction::Inverse);
        for (v, c) in values[d * nnn..(d + 1) * nnn].iter_mut().zip(&buf) {
            *v = c.re;
            max_re = max_re.max(c.re.abs());
            max_im = max_im.max(c.im.abs());
        }
    }
    Ok(PhysicalGrid {
        n,
        components: comps,
        box_l: field.box_l(),
        values,
        imag_residue: if max_re > 0.0 { max_im / max_re } else { max_im },
    })
}

/// Forward transform of grid samples, truncated to `|k_i| ≤ cutoff`.
///
/// The result is symmetrized so that `c(-k) = conj c(k)` holds exactly.
pub fn from_physical(grid: &PhysicalGrid, cutoff: usize) -> Result<SpectralField> {
    let n = grid.n;
    check_grid(n, cutoff)?;
    let comps = grid.components;
    let nnn = n * n * n;
    let mut out = SpectralField::zeros(cutoff, comps, grid.box_l);
    let waves: Vec<WaveVector> = out.wavevectors().collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); nnn];
    let scale = 1.0 / nnn as f64;
    for d in 0..comps {
        for (b, v) in buf.iter_mut().zip(grid.component(d)) {
            *b = Complex64::new(*v, 0.0);
        }
        fft3(&mut buf, n, Direction::Forward);
        for k in &waves {
            let idx = (wrap(k.0[0], n) * n + wrap(k.0[1], n)) * n + wrap(k.0[2], n);
            out.coeff_mut(*k)[d] = buf[idx] * scale;
        }
    }
    out.symmetrize();
    Ok(out)
}
