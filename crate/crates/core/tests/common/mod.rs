#![allow(dead_code)]

pub use periodic_ns::spectral::{SpectralField, WaveVector};

pub mod oracle;

use periodic_ns::config::RunConfig;

pub const TAU_TOML: &str = "6.283185307179586";

/// Parses a config, panicking with the error on failure.
pub fn config(toml: &str) -> RunConfig {
    RunConfig::from_toml_str(toml).unwrap_or_else(|e| panic!("{e}\n{toml}"))
}

/// Taylor–Green vortex of unit amplitude on the `2π` box with `ν = 1`.
pub fn taylor_green_config(cutoff: usize, dt: f64, t_final: f64, scheme: &str) -> RunConfig {
    config(&format!(
        "box_l = {TAU_TOML}\nviscosity = 1.0\nt_final = {t_final}\ndt = {dt}\ncutoff = {cutoff}\nscheme = \"{scheme}\"\n\
         [ic]\nfamily = \"taylor_green\"\n"
    ))
}

/// Random smooth initial data under steady random forcing.
pub fn forced_random_config(cutoff: usize, dt: f64, t_final: f64, seed: u64) -> RunConfig {
    config(&format!(
        "box_l = {TAU_TOML}\nviscosity = 0.1\nt_final = {t_final}\ndt = {dt}\ncutoff = {cutoff}\n\
         [ic]\nfamily = \"random_band\"\nseed = {seed}\nk_max = 3.0\nslope = -2.0\namplitude = 0.3\n\
         [forcing]\nfamily = \"random_band\"\nseed = {}\nk_max = 2.0\nslope = -1.0\namplitude = 0.2\n",
        seed + 1000
    ))
}
