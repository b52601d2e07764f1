//! Energy identity and the two a-priori bounds, checked on a finished ledger.

use serde::Serialize;

use super::ledger::{cumulative_fourth_order, EnergyLedger};

/// Slack allowed for rounding in inequalities that are exact at `t = 0`.
const ROUNDING: f64 = 8.0 * f64::EPSILON;

fn integrate(t: &[f64], y: &[f64]) -> Vec<f64> {
    cumulative_fourth_order(t, y)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyIdentityReport {
    /// `E(t) - E(0) + ν∫D - ∫W` at each row.
    pub residuals: Vec<f64>,
    /// `max |r| / max E` (zero for an identically zero trajectory).
    pub max_relative: f64,
}

impl EnergyIdentityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative <= tol
    }
}

/// Residual of `½ d/dt |u|² + ν a(u, u) = (f, u)` integrated from the first
/// row.
pub fn check_energy_identity(ledger: &EnergyLedger) -> EnergyIdentityReport {
    if ledger.is_empty() {
        return EnergyIdentityReport {
            residuals: Vec::new(),
            max_relative: 0.0,
        };
    }
    let t = ledger.times();
    let nu = ledger.meta.viscosity;
    let e = ledger.column(|r| r.energy);
    let d = integrate(&t, &ledger.column(|r| r.dissipation));
    let w = integrate(&t, &ledger.column(|r| r.work));
    let residuals: Vec<f64> = (0..t.len()).map(|i| e[i] - e[0] + nu * d[i] - w[i]).collect();
    let e_max = e.iter().copied().fold(0.0, f64::max);
    let r_max = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    EnergyIdentityReport {
        max_relative: if e_max > 0.0 { r_max / e_max } else { r_max },
        residuals,
    }
}

pub const ESTIMATE_I_DERIVATION: &str = "\
split u = u1 + u2 (k = 0 part and the rest), same for P f. \
(f2, u2) <= |f2|_{-1} |u2|_a <= |f2|_{-1}^2 / (2 nu) + nu a(u, u) / 2 with |g|_{-1}^2 = sum_{k!=0} l^3 |g(k)|^2 / |kappa|^2; \
(f1, u1) <= (|f1|^2 + |u1|^2) / 2. \
Inserting both into d/dt |u|^2 / 2 + nu a(u, u) = (f, u) and integrating: \
|u(t)|^2 + nu int_0^t a(u, u) <= |u(0)|^2 + int_0^t (|f2|_{-1}^2 / nu + |f1|^2 + |u1|^2). \
For the constant modes alone d/dt |u1|^2 <= |f1|^2 + |u1|^2, hence |u1(t)|^2 <= e^t (|u1(0)|^2 + int_0^t |f1|^2). \
Constant modes are paired with f by the L2 pairing of their k = 0 coefficients.";

#[derive(Clone, Debug, Serialize)]
pub struct EstimateIReport {
    pub derivation: &'static str,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub worst_margin: f64,
    pub worst_time: f64,
    /// `|u1(t)|²` against `e^t (|u1(0)|² + ∫|f1|²)`.
    pub const_lhs: Vec<f64>,
    pub const_bound: Vec<f64>,
    pub const_worst_margin: f64,
    /// `∫ ‖P f‖²_{V'}` over the run, for reference.
    pub f_vdual_integral: f64,
    pub passed: bool,
}

pub fn check_estimate_i(ledger: &EnergyLedger) -> EstimateIReport {
    let t = ledger.times();
    let nu = ledger.meta.viscosity;
    let u_sq = ledger.column(|r| 2.0 * r.energy);
    let u1_sq = ledger.column(|r| 2.0 * r.energy_const);
    let dis = integrate(&t, &ledger.column(|r| r.dissipation));
    let src = integrate(
        &t,
        &ledger.column(|r| r.f_hm1_sq / nu + r.f_const_sq + 2.0 * r.energy_const),
    );
    let f1 = integrate(&t, &ledger.column(|r| r.f_const_sq));
    let fv = integrate(&t, &ledger.column(|r| r.f_vdual_sq));

    let n = t.len();
    let lhs: Vec<f64> = (0..n).map(|i| u_sq[i] + nu * dis[i]).collect();
    let rhs: Vec<f64> = (0..n).map(|i| u_sq[0] + src[i]).collect();
    let const_bound: Vec<f64> = (0..n).map(|i| t[i].exp() * (u1_sq[0] + f1[i])).collect();

    let (mut worst_margin, mut worst_time) = (f64::INFINITY, 0.0);
    let mut passed = true;
    for i in 0..n {
        let m = rhs[i] - lhs[i];
        if m < worst_margin {
            worst_margin = m;
            worst_time = t[i];
        }
        passed &= m >= -ROUNDING * rhs[i].abs();
    }
    let mut const_worst_margin = f64::INFINITY;
    for i in 0..n {
        let m = const_bound[i] - u1_sq[i];
        const_worst_margin = const_worst_margin.min(m);
        passed &= m >= -ROUNDING * const_bound[i].abs();
    }
    if n == 0 {
        worst_margin = 0.0;
        const_worst_margin = 0.0;
    }
    EstimateIReport {
        derivation: ESTIMATE_I_DERIVATION,
        times: t,
        lhs,
        rhs,
        worst_margin,
        worst_time,
        const_lhs: u1_sq,
        const_bound,
        const_worst_margin,
        f_vdual_integral: fv.last().copied().unwrap_or(0.0),
        passed,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateIIReport {
    /// `∫_0^T ‖u'‖²_{V'} dt`.
    pub integral: f64,
    pub sup_dual: f64,
    pub finite: bool,
}

/// Time integral of the squared `V'` norm of `u'`.
pub fn check_estimate_ii(ledger: &EnergyLedger) -> EstimateIIReport {
    let t = ledger.times();
    let sq = ledger.column(|r| r.du_dual * r.du_dual);
    let integral = integrate(&t, &sq).last().copied().unwrap_or(0.0);
    let sup_dual = ledger.column(|r| r.du_dual).into_iter().fold(0.0, f64::max);
    EstimateIIReport {
        integral,
        sup_dual,
        finite: integral.is_finite(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementComparison {
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
    pub passed: bool,
}

/// Relative change of a scalar diagnostic from a coarse to a refined run.
pub fn compare_refinement(coarse: f64, fine: f64, tol: f64) -> RefinementComparison {
    let scale = coarse.abs().max(fine.abs());
    let relative_change = if scale > 0.0 {
        (fine - coarse).abs() / scale
    } else {
        0.0
    };
    RefinementComparison {
        coarse,
        fine,
        relative_change,
        passed: coarse.is_finite() && fine.is_finite() && relative_change <= tol,
    }
}
