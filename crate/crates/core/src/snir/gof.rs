use serde::{Deserialize, Serialize};

use super::design::{DesignContext, RegressionDesign};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessOfFit {
    pub r2: f64,
    pub adj_r2: f64,
}

/// R^2 of the conditional regression on the non-candidate rows, against a
/// centered total sum of squares.
pub fn r_squared(ctx: &DesignContext, s: &[usize]) -> Result<GoodnessOfFit> {
    design_r_squared(&ctx.design, s)
}

/// R^2 of a regression design restricted to the columns of nodes `s`.
pub(crate) fn design_r_squared(design: &RegressionDesign, s: &[usize]) -> Result<GoodnessOfFit> {
    let y = &design.target;
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if tss == 0.0 {
        return Err(Error::ConstantResponse);
    }
    if n <= s.len() + 1 {
        return Err(Error::InsufficientRows {
            rows: n,
            cols: s.len() + 1,
        });
    }
    let cols = design.columns_for(s)?;
    let rss = design.rss_of(&cols)?;
    let r2 = 1.0 - rss / tss;
    let adj_r2 = 1.0 - (1.0 - r2) * (n - 1) as f64 / (n - s.len() - 1) as f64;
    Ok(GoodnessOfFit { r2, adj_r2 })
}
