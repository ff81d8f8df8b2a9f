use serde::Serialize;

use crate::integration::compute_p12_closed_form;
use crate::model::{quantum_prediction, HardySettings, ModelParams, Setting};

/// How the quantum and model families are brought to a common scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NFit {
    /// Each family divided by its own largest entry.
    #[default]
    MaxEntry,
    /// The quantum family scaled by the least-squares factor onto the model
    /// family; both then divided by the model's largest entry.
    LeastSquares,
}

impl NFit {
    pub fn as_str(self) -> &'static str {
        match self {
            NFit::MaxEntry => "max-entry",
            NFit::LeastSquares => "least-squares",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyEntry {
    pub label: &'static str,
    /// The setting actually evaluated.
    pub setting: Setting,
    /// Quantum prediction with `N = 1`.
    pub quantum: f64,
    pub quantum_norm: f64,
    pub lhv: f64,
    pub lhv_norm: f64,
    /// Model value over `(3/16) C² ε²`.
    pub lhv_over_scale: f64,
    /// `lhv_norm - quantum_norm`.
    pub deviation: f64,
    /// Quantum value (with `N = 1`) at most `ε`.
    pub quantum_near_zero: bool,
    /// Model value at most `ε (3/16) C² ε²`.
    pub lhv_near_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub settings: HardySettings,
    pub entries: [HardyEntry; 4],
    pub n_fit: NFit,
    pub epsilon: f64,
}

impl HardyReport {
    pub fn near_zero_count(&self) -> usize {
        self.entries.iter().filter(|e| e.lhv_near_zero).count()
    }
}

const LABELS: [&str; 4] = [
    "theta1_theta2",
    "theta1_theta20",
    "theta10_theta2",
    "theta10_theta20",
];

/// Quantum and model values of the four Hardy probabilities.
///
/// The entries follow [`HardySettings::hardy_settings`]: the second probes
/// the orthogonal outcome of polarizer 1 and the third that of polarizer 2.
pub fn hardy_report(hs: &HardySettings, params: &ModelParams, n_fit: NFit) -> HardyReport {
    let settings = hs.hardy_settings();
    let quantum = settings.map(|s| quantum_prediction(s, params.gamma(), 1.0));
    let lhv = settings.map(|s| compute_p12_closed_form(s, params).value);

    let max_of = |xs: &[f64; 4]| xs.iter().copied().fold(0.0, f64::max);
    let safe_div = |x: f64, d: f64| if d > 0.0 { x / d } else { 0.0 };
    let lhv_max = max_of(&lhv);
    let lhv_norm = lhv.map(|v| safe_div(v, lhv_max));
    let quantum_norm = match n_fit {
        NFit::MaxEntry => {
            let m = max_of(&quantum);
            quantum.map(|q| safe_div(q, m))
        }
        NFit::LeastSquares => {
            let sxy: f64 = quantum.iter().zip(&lhv).map(|(q, l)| q * l).sum();
            let sxx: f64 = quantum.iter().map(|q| q * q).sum();
            let scale = safe_div(sxy, sxx);
            quantum.map(|q| safe_div(scale * q, lhv_max))
        }
    };

    let eps = params.epsilon();
    let scale = params.leading_scale();
    let entries = std::array::from_fn(|i| HardyEntry {
        label: LABELS[i],
        setting: settings[i],
        quantum: quantum[i],
        quantum_norm: quantum_norm[i],
        lhv: lhv[i],
        lhv_norm: lhv_norm[i],
        lhv_over_scale: lhv[i] / scale,
        deviation: lhv_norm[i] - quantum_norm[i],
        quantum_near_zero: quantum[i] <= eps,
        lhv_near_zero: lhv[i] <= eps * scale,
    });
    HardyReport {
        settings: *hs,
        entries,
        n_fit,
        epsilon: eps,
    }
}
