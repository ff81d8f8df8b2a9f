//! Benchmarks for the coincidence-probability estimators live in `benches/`.

use lhv_core::{ModelParams, Setting};

/// Parameters shared by the benchmarks.
pub fn reference_case() -> (Setting, ModelParams) {
    let setting = Setting::new(std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_3);
    let params = ModelParams::new(0.5, 1.0, 0.2).expect("valid parameters");
    (setting, params)
}
