//! Competing ways of naming influential nodes: centrality and response
//! rankings, the scalar spatial autoregressive (SAR) model, and the
//! response/follower loss used to compare them.

mod impact;
pub mod logdet;
mod rules;
mod sar;

pub use impact::{compare_methods, identifiable_rho, response_loss, ImpactReport, MethodImpact};
pub use logdet::LogDet;
pub use rules::{select_by_rule, top_by_score, RuleKind, SelectionRule};
pub use sar::{gen_sar_data, row_normalized, sar_fit, SarFit, SarObjective, RHO_BOUND};
