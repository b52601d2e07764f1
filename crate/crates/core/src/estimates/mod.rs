//! Runtime certificates for the a-priori estimates, uniqueness and
//! regularity, evaluated on trajectories.

mod certificates;
mod convergence;
mod gronwall;
mod ledger;
mod regularity;

pub use certificates::{
    check_energy_identity, check_estimate_i, check_estimate_ii, compare_refinement, EnergyIdentityReport,
    EstimateIIReport, EstimateIReport, RefinementComparison, ESTIMATE_I_DERIVATION,
};
pub use convergence::{convergence_study, ConvergenceRow, ConvergenceTable};
pub use gronwall::{gronwall_report, twin_run_gronwall, GronwallConstant, GronwallReport, GRONWALL_DERIVATION};
pub use ledger::{
    cumulative_fourth_order, cumulative_trapezoid, EnergyLedger, LedgerMeta, LedgerRow, LEDGER_SCHEMA, V_DUAL_ORDER,
};
pub use regularity::{
    regularity_monitor, shell_spectrum, spectral_decay_exponent, RegularityReport, ENVELOPE_DERIVATION,
};
