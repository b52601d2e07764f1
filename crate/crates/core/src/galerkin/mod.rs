//! Galerkin operators: the solenoidal eigenbasis and its projector, the
//! Dirichlet form `a(u, v)` with its operator `A`, the trilinear advection
//! form `b(u, v, w)` and the projected nonlinearity `g(u)`.

mod basis;

use num_complex::Complex64;

pub use basis::{polarizations, BasisMode, GalerkinBasis};

use crate::error::Result;
use crate::spectral::{
    dealiased_grid, default_grid, from_physical, gradient, l2_inner, leray_project, to_physical, SpectralField,
    WaveVector,
};

/// `a(u, v) = Σ_ij ∫ ∂_i u_j ∂_i v_j dx`.
pub fn form_a(u: &SpectralField, v: &SpectralField) -> Result<f64> {
    u.check_compatible(v)?;
    let l = u.box_l();
    let mut acc = 0.0;
    for ((k, a), (_, b)) in u.modes().zip(v.modes()) {
        let k2 = k.kappa_sq(l);
        if k2 == 0.0 {
            continue;
        }
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum();
        acc += k2 * dot;
    }
    Ok(acc * u.volume())
}

/// Spectral `-Δ`: `c(k) ↦ |κ|² c(k)`.
pub fn apply_a(u: &SpectralField) -> SpectralField {
    let l = u.box_l();
    u.multiplied(|k| k.kappa_sq(l))
}

/// Whether products are formed on the padded (alias-free) grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dealias {
    On,
    Off,
}

impl Dealias {
    pub fn grid(self, cutoff: usize) -> usize {
        match self {
            Dealias::On => dealiased_grid(cutoff),
            Dealias::Off => default_grid(cutoff),
        }
    }
}

/// `(u·∇)v` truncated to the common cutoff, evaluated pseudo-spectrally.
///
/// With [`Dealias::On`] this is the exact Galerkin truncation of the
/// convolution.
pub fn advection(u: &SpectralField, v: &SpectralField, dealias: Dealias) -> Result<SpectralField> {
    u.check_shape(v)?;
    assert_eq!(u.components(), 3, "advecting field must be a vector field");
    let comps = v.components();
    let n = dealias.grid(u.cutoff());
    let up = to_physical(u, n)?;
    let gp = to_physical(&gradient(v), n)?;
    let nnn = n * n * n;
    let mut values = vec![0.0; comps * nnn];
    for d in 0..comps {
        let out = &mut values[d * nnn..(d + 1) * nnn];
        for axis in 0..3 {
            let ua = up.component(axis);
            let dv = gp.component(3 * d + axis);
            for ((o, a), b) in out.iter_mut().zip(ua).zip(dv) {
                *o += a * b;
            }
        }
    }
    let grid = crate::spectral::PhysicalGrid::new(n, comps, u.box_l(), values)?;
    from_physical(&grid, u.cutoff())
}

/// `b(u, v, w) = Σ_ik ∫ u_k (∂_k v_i) w_i dx`.
pub fn trilinear_b(u: &SpectralField, v: &SpectralField, w: &SpectralField, dealias: Dealias) -> Result<f64> {
    let adv = advection(u, v, dealias)?;
    l2_inner(&adv, w)
}

/// `g(u)`: Leray projection of `(u·∇)u`, so that `(g(u), v) = b(u, u, v)`
/// for solenoidal `v`.
///
/// The mean of `(u·∇)u = ∇·(u ⊗ u)` vanishes for periodic solenoidal `u`;
/// the `k = 0` coefficient is set to zero rather than left at rounding level.
pub fn nonlinear_g(u: &SpectralField, dealias: Dealias) -> Result<SpectralField> {
    let mut g = leray_project(&advection(u, u, dealias)?);
    g.coeff_mut(WaveVector::ZERO)
        .iter_mut()
        .for_each(|c| *c = Complex64::new(0.0, 0.0));
    Ok(g)
}

/// Right-hand side of the semi-discrete system,
/// `u' = -ν A u - g(u) + P f` (Leray projection `P` after truncation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dynamics {
    pub viscosity: f64,
    /// Disables `g(u)`; the remaining system is the forced heat equation.
    pub nonlinear: bool,
    pub dealias: Dealias,
}

impl Dynamics {
    pub fn new(viscosity: f64) -> Self {
        Dynamics {
            viscosity,
            nonlinear: true,
            dealias: Dealias::On,
        }
    }

    pub fn linear(viscosity: f64) -> Self {
        Dynamics {
            nonlinear: false,
            ..Self::new(viscosity)
        }
    }

    /// `N(u) = -g(u) + P f`: everything except the viscous term.
    pub fn explicit_part(&self, u: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
        let mut out = project_forcing(f, u.cutoff());
        out.check_compatible(u)?;
        if self.nonlinear {
            out.axpy(-1.0, &nonlinear_g(u, self.dealias)?);
        }
        Ok(out)
    }

    pub fn rhs(&self, u: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
        let mut out = self.explicit_part(u, f)?;
        out.axpy(-self.viscosity, &apply_a(u));
        Ok(out)
    }
}

/// `P f` after truncation (or zero-padding) to `cutoff`.
pub fn project_forcing(f: &SpectralField, cutoff: usize) -> SpectralField {
    leray_project(&f.with_cutoff(cutoff))
}

/// `u' = -ν A u - g(u) + P f` with dealiased products.
pub fn rhs(u: &SpectralField, f: &SpectralField, viscosity: f64) -> Result<SpectralField> {
    Dynamics::new(viscosity).rhs(u, f)
}

#[cfg(test)]
#[path = "../../tests/common/oracle.rs"]
mod oracle;
