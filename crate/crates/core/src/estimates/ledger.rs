use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use crate::galerkin::{form_a, project_forcing};
use crate::spectral::{
    grid_lp_norm, l2_inner, l2_norm_sq, sobolev_norm, sobolev_norm_sq, to_physical, SpectralField, WaveVector,
};
use crate::Result;

pub const LEDGER_SCHEMA: &str = "periodic-ns-ledger v1";

/// Dual-norm exponent of `V'` (`V` is the solenoidal closure in `H^{3/2}`).
pub const V_DUAL_ORDER: f64 = -1.5;

/// Per-step diagnostics of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub step: u64,
    pub t: f64,
    /// `½|u|²`
    pub energy: f64,
    /// `½|u_{k=0}|²`
    pub energy_const: f64,
    /// `a(u, u)`
    pub dissipation: f64,
    /// `(f, u)`
    pub work: f64,
    /// `‖u‖_{L∞}` on the dealiased grid.
    pub sup_norm: f64,
    pub h2_norm: f64,
    pub h3_norm: f64,
    /// `|u'|`
    pub du_l2: f64,
    /// `‖u'‖_{V'}`
    pub du_dual: f64,
    /// `|P f_{k=0}|²`
    pub f_const_sq: f64,
    /// `Σ_{k≠0} l³ |P f(k)|² / |κ|²`, the dual of the `a`-seminorm.
    pub f_hm1_sq: f64,
    /// `‖P f‖²_{V'}`
    pub f_vdual_sq: f64,
    /// Relative size of the solenoidality correction applied after the step.
    pub correction: f64,
}

impl LedgerRow {
    /// Measures a state `u` with time derivative `du` under forcing `f`.
    pub fn measure(
        step: u64,
        t: f64,
        u: &SpectralField,
        du: &SpectralField,
        f: &SpectralField,
        sup_grid: usize,
        correction: f64,
    ) -> Result<Self> {
        let l = u.box_l();
        let vol = u.volume();
        let pf = project_forcing(f, u.cutoff());
        let mean_sq =
            |g: &SpectralField| -> f64 { g.coeff(WaveVector::ZERO).iter().map(|c| c.norm_sqr()).sum::<f64>() * vol };
        let mut f_hm1_sq = 0.0;
        for (k, c) in pf.modes() {
            if !k.is_zero() {
                f_hm1_sq += c.iter().map(|v| v.norm_sqr()).sum::<f64>() / k.kappa_sq(l);
            }
        }
        let grid = to_physical(u, sup_grid)?;
        Ok(LedgerRow {
            step,
            t,
            energy: 0.5 * l2_norm_sq(u),
            energy_const: 0.5 * mean_sq(u),
            dissipation: form_a(u, u)?,
            work: l2_inner(&pf, u)?,
            sup_norm: grid_lp_norm(&grid, f64::INFINITY),
            h2_norm: sobolev_norm(u, 2.0),
            h3_norm: sobolev_norm(u, 3.0),
            du_l2: l2_norm_sq(du).sqrt(),
            du_dual: sobolev_norm(du, V_DUAL_ORDER),
            f_const_sq: mean_sq(&pf),
            f_hm1_sq: f_hm1_sq * vol,
            f_vdual_sq: sobolev_norm_sq(&pf, V_DUAL_ORDER),
            correction,
        })
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.energy,
            self.energy_const,
            self.dissipation,
            self.work,
            self.sup_norm,
            self.h2_norm,
            self.h3_norm,
            self.du_l2,
            self.du_dual,
            self.f_const_sq,
            self.f_hm1_sq,
            self.f_vdual_sq,
            self.correction,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerMeta {
    pub viscosity: f64,
    pub box_l: f64,
    pub cutoff: usize,
    pub dt: f64,
}

/// Time series of energy-budget quantities, one row per accepted step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub meta: LedgerMeta,
    pub rows: Vec<LedgerRow>,
}

const COLUMNS: &str = "step,t,energy,energy_const,dissipation,work,sup_norm,h2_norm,h3_norm,du_l2,du_dual,f_const_sq,f_hm1_sq,f_vdual_sq,correction";

impl EnergyLedger {
    pub fn new(meta: LedgerMeta) -> Self {
        EnergyLedger { meta, rows: Vec::new() }
    }

    /// Appends a row; rows must be finite with strictly increasing time.
    pub fn push(&mut self, row: LedgerRow) {
        debug_assert!(row.is_finite(), "non-finite ledger row at step {}", row.step);
        if let Some(last) = self.rows.last() {
            debug_assert!(row.t > last.t, "ledger time must increase");
        }
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, f: impl Fn(&LedgerRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn is_valid(&self) -> bool {
        self.rows.iter().all(LedgerRow::is_finite) && self.rows.windows(2).all(|w| w[1].t > w[0].t)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let m = &self.meta;
        let _ = writeln!(
            s,
            "# {LEDGER_SCHEMA} viscosity={} box_l={} cutoff={} dt={}",
            m.viscosity, m.box_l, m.cutoff, m.dt
        );
        let _ = writeln!(s, "{COLUMNS}");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.step,
                r.t,
                r.energy,
                r.energy_const,
                r.dissipation,
                r.work,
                r.sup_norm,
                r.h2_norm,
                r.h3_norm,
                r.du_l2,
                r.du_dual,
                r.f_const_sq,
                r.f_hm1_sq,
                r.f_vdual_sq,
                r.correction
            );
        }
        s
    }

    pub fn write_csv(&self, mut w: impl io::Write) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// Cumulative trapezoid integral, starting at 0.
pub fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for i in 0..t.len() {
        if i > 0 {
            acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Cumulative integral with a fourth-order rule on uniformly spaced rows:
/// each interval uses the cubic through four neighbouring samples
/// (`(-1, 13, 13, -1)/24` inside, one-sided `(9, 19, -5, 1)/24` at the ends).
/// Falls back to the trapezoid rule with fewer than four rows.
pub fn cumulative_fourth_order(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 4 {
        return cumulative_trapezoid(t, y);
    }
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..n - 1 {
        let h = t[i + 1] - t[i];
        let part = if i == 0 {
            9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]
        } else if i == n - 2 {
            9.0 * y[n - 1] + 19.0 * y[n - 2] - 5.0 * y[n - 3] + y[n - 4]
        } else {
            -y[i - 1] + 13.0 * y[i] + 13.0 * y[i + 1] - y[i + 2]
        };
        acc += h * part / 24.0;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_orders() {
        // ∫_0^1 exp(t) dt
        let exact = std::f64::consts::E - 1.0;
        let err = |n: usize, rule: fn(&[f64], &[f64]) -> Vec<f64>| {
            let t: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let y: Vec<f64> = t.iter().map(|x| x.exp()).collect();
            (rule(&t, &y)[n] - exact).abs()
        };
        let r2 = err(20, cumulative_trapezoid) / err(40, cumulative_trapezoid);
        // boundary intervals carry a lower-order term that only fades near n ~ 100
        let r4 = err(80, cumulative_fourth_order) / err(160, cumulative_fourth_order);
        assert!((r2 - 4.0).abs() < 0.1, "{r2}");
        assert!((r4 - 16.0).abs() < 1.5, "{r4}");
    }

    #[test]
    fn cubic_is_integrated_exactly() {
        let t: Vec<f64> = (0..7).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = t.iter().map(|x| x * x * x - 2.0 * x).collect();
        let c = cumulative_fourth_order(&t, &y);
        for (ti, ci) in t.iter().zip(&c) {
            let exact = ti.powi(4) / 4.0 - ti * ti;
            assert!((ci - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_has_schema_header() {
        let ledger = EnergyLedger::new(LedgerMeta {
            viscosity: 1.0,
            box_l: 1.0,
            cutoff: 2,
            dt: 0.1,
        });
        let csv = ledger.to_csv();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# periodic-ns-ledger v1"));
        assert_eq!(lines.next().unwrap(), COLUMNS);
    }
}
