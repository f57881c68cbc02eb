//! Candidate curve families for the model comparison.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::expfit::fit_exponential_weighted;
use crate::error::FitError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Exponential,
    Linear,
    Quadratic,
    /// `y = p + q ln(1 + |t - t_min|)`.
    Logarithmic,
}

impl ModelFamily {
    /// Fixed order, also the tie-break order.
    pub const ALL: [ModelFamily; 4] = [
        ModelFamily::Exponential,
        ModelFamily::Linear,
        ModelFamily::Quadratic,
        ModelFamily::Logarithmic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::Exponential => "exponential",
            ModelFamily::Linear => "linear",
            ModelFamily::Quadratic => "quadratic",
            ModelFamily::Logarithmic => "logarithmic",
        }
    }

    pub fn parse(s: &str) -> Option<ModelFamily> {
        ModelFamily::ALL.into_iter().find(|f| f.as_str() == s)
    }

    fn min_points(self) -> usize {
        match self {
            ModelFamily::Exponential => 4,
            ModelFamily::Linear | ModelFamily::Logarithmic => 3,
            ModelFamily::Quadratic => 4,
        }
    }

    /// Weighted SSE of the best fit of this family. `anchor` is the time of
    /// the series minimum, used by the logarithmic family.
    pub fn fit_sse(self, ts: &[f64], ys: &[f64], ws: &[f64], anchor: f64) -> Result<f64, FitError> {
        if ts.len() < self.min_points() {
            return Err(FitError {
                family: self.as_str(),
                reason: format!(
                    "{} points, at least {} required",
                    ts.len(),
                    self.min_points()
                ),
                best: None,
            });
        }
        match self {
            ModelFamily::Exponential => fit_exponential_weighted(ts, ys, ws).map(|f| f.sse),
            ModelFamily::Linear => linear_sse(self, ts, ys, ws, |t| vec![1.0, t]),
            ModelFamily::Quadratic => linear_sse(self, ts, ys, ws, |t| vec![1.0, t, t * t]),
            ModelFamily::Logarithmic => linear_sse(self, ts, ys, ws, |t| {
                vec![1.0, (1.0 + (t - anchor).abs()).ln()]
            }),
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn linear_sse(
    family: ModelFamily,
    ts: &[f64],
    ys: &[f64],
    ws: &[f64],
    basis: impl Fn(f64) -> Vec<f64>,
) -> Result<f64, FitError> {
    let rows: Vec<Vec<f64>> = ts.iter().map(|&t| basis(t)).collect();
    let k = rows[0].len();
    let x = DMatrix::from_fn(ts.len(), k, |i, j| rows[i][j] * ws[i].sqrt());
    let y = DVector::from_iterator(ts.len(), ys.iter().zip(ws).map(|(y, w)| y * w.sqrt()));
    let svd = x.clone().svd(true, true);
    let coef = svd.solve(&y, 1e-12).map_err(|e| FitError {
        family: family.as_str(),
        reason: e.to_string(),
        best: None,
    })?;
    let resid = y - x * coef;
    Ok(resid.norm_squared())
}
