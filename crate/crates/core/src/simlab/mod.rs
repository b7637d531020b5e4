//! Synthetic data from the SNIR model and the simulation designs built on it.

mod metrics;
mod settings;
mod study;
mod sweep;
mod truth;

pub use metrics::{average, l2_diff, linf_diff, metrics, StudyMetrics};
pub use settings::{run_setting, surrogate_response, Setting, SettingResult, SettingsConfig, SurrogateSpec};
pub use study::{
    draw_dataset, run_study, CovariatePlan, Dataset, RepRecord, StudyConfig, StudyResult, StudyRow, TruthPlan,
    MAX_REDRAWS,
};
pub use sweep::{snr_sweep, spearman, SweepConfig, SweepPoint};
pub use truth::{
    gen_conditional, gen_snir_data, heteroskedastic_sd, pick_truth, spectral_radius, top_by_value, Noise, RhoPlan,
    TruthMode, TruthSpec,
};
