//! Regularity diagnostics: size of `u'`, its Gronwall envelope, higher
//! Sobolev norms and the decay rate of the energy spectrum.

use serde::Serialize;

use super::ledger::{cumulative_fourth_order, EnergyLedger};
use crate::spectral::SpectralField;

pub const ENVELOPE_DERIVATION: &str = "\
for time-independent f, v = u' solves v' + nu A v + P[(v.grad)u + (u.grad)v] = 0; \
pairing with v and bounding b(v, u, v) = -b(v, v, u) as in the uniqueness argument gives \
|u'(t)|^2 <= c8 exp(c3 int_0^t phi), phi = |u|_inf^2, with c3 = 1/(2 nu) and c8 = |u'(0)|^2.";

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub derivation: &'static str,
    pub sup_du: f64,
    pub c3: f64,
    pub c8: f64,
    /// Smallest `c8` making the envelope hold with `c3` at every row.
    pub c8_measured: f64,
    /// The derived envelope only applies to steady forcing.
    pub envelope_applies: bool,
    pub envelope_worst_margin: f64,
    pub sup_h2: f64,
    pub sup_h3: f64,
    pub h2_nonincreasing: bool,
    pub h3_nonincreasing: bool,
    /// Least-squares slope of `log E(n)` against `log n` over the upper half
    /// of the populated shells of the final state.
    pub spectral_decay_exponent: Option<f64>,
    pub passed: bool,
}

pub fn regularity_monitor(ledger: &EnergyLedger, final_u: &SpectralField, steady_forcing: bool) -> RegularityReport {
    let t = ledger.times();
    let nu = ledger.meta.viscosity;
    let c3 = 1.0 / (2.0 * nu);
    let du_sq = ledger.column(|r| r.du_l2 * r.du_l2);
    let phi = cumulative_fourth_order(&t, &ledger.column(|r| r.sup_norm * r.sup_norm));
    let c8 = du_sq.first().copied().unwrap_or(0.0);

    let mut c8_measured: f64 = 0.0;
    let mut worst: f64 = f64::INFINITY;
    for i in 0..t.len() {
        let env = (c3 * phi[i]).exp();
        c8_measured = c8_measured.max(du_sq[i] / env);
        worst = worst.min(c8 * env - du_sq[i]);
    }
    if t.is_empty() {
        worst = 0.0;
    }
    let tol = 1e-10 * c8.max(du_sq.iter().copied().fold(0.0, f64::max));
    let nonincreasing = |col: Vec<f64>| col.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let h2 = ledger.column(|r| r.h2_norm);
    let h3 = ledger.column(|r| r.h3_norm);
    let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let sup_h2 = sup(&h2);
    let sup_h3 = sup(&h3);
    RegularityReport {
        derivation: ENVELOPE_DERIVATION,
        sup_du: sup(&du_sq).sqrt(),
        c3,
        c8,
        c8_measured,
        envelope_applies: steady_forcing,
        envelope_worst_margin: worst,
        sup_h2,
        sup_h3,
        h2_nonincreasing: nonincreasing(h2),
        h3_nonincreasing: nonincreasing(h3),
        spectral_decay_exponent: spectral_decay_exponent(final_u),
        passed: sup_h2.is_finite() && sup_h3.is_finite() && (!steady_forcing || worst >= -tol),
    }
}

/// Shell energies `E(n) = Σ_{n - ½ ≤ |k| < n + ½} ½ l³ |c(k)|²` for `n ≥ 1`.
pub fn shell_spectrum(u: &SpectralField) -> Vec<f64> {
    let max_shell = ((3.0f64).sqrt() * u.cutoff() as f64).round() as usize + 1;
    let mut shells = vec![0.0; max_shell + 1];
    for (k, c) in u.modes() {
        let n = (k.norm_sq() as f64).sqrt().round() as usize;
        shells[n] += 0.5 * u.volume() * c.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    shells
}

pub fn spectral_decay_exponent(u: &SpectralField) -> Option<f64> {
    // Shells beyond the cutoff are only partly populated by the cube.
    let spectrum = shell_spectrum(u);
    let pts: Vec<(f64, f64)> = (1..=u.cutoff())
        .filter(|&n| spectrum[n] > 0.0)
        .map(|n| ((n as f64).ln(), spectrum[n].ln()))
        .collect();
    let tail = &pts[pts.len() / 2..];
    if tail.len() < 2 {
        return None;
    }
    let m = tail.len() as f64;
    let (sx, sy) = tail.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in tail {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}
