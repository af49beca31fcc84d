//! Least-squares fits of power-law and exponential relationships.
//!
//! Both families are linear after a log transform, so the fit is ordinary
//! (optionally weighted) least squares in the transformed space and R² is
//! reported there as well:
//!
//! | family      | model          | regression            |
//! |-------------|----------------|-----------------------|
//! | power       | `y = a·x^b`    | `log y` on `log x`    |
//! | exponential | `y = a·e^(bx)` | `log y` on `x`        |

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Power,
    Exponential,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Family::Power),
            "exponential" | "exp" => Ok(Family::Exponential),
            other => Err(Error::InvalidParams(format!("unknown fit family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: Family,
    pub amplitude: f64,
    /// Power-law exponent or exponential rate.
    pub exponent: f64,
    /// `None` when the transformed response has zero variance.
    pub r_squared: Option<f64>,
    pub points: usize,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        match self.family {
            Family::Power => self.amplitude * x.powf(self.exponent),
            Family::Exponential => self.amplitude * (self.exponent * x).exp(),
        }
    }

    fn predict_transformed(&self, tx: f64) -> f64 {
        self.amplitude.ln() + self.exponent * tx
    }
}

pub const MIN_FIT_POINTS: usize = 3;

fn transform(family: Family, points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    points
        .iter()
        .map(|&(x, y)| {
            if !(y > 0.0 && y.is_finite()) {
                return Err(Error::Domain(format!("response must be positive, got {y}")));
            }
            let tx = match family {
                Family::Power => {
                    if !(x > 0.0 && x.is_finite()) {
                        return Err(Error::Domain(format!(
                            "power fit needs positive x, got {x}"
                        )));
                    }
                    x.ln()
                }
                Family::Exponential => {
                    if !x.is_finite() {
                        return Err(Error::Domain(format!("x must be finite, got {x}")));
                    }
                    x
                }
            };
            Ok((tx, y.ln()))
        })
        .collect()
}

fn weighted_r_squared(t: &[(f64, f64)], w: &[f64], predict: impl Fn(f64) -> f64) -> Option<f64> {
    let total_w = compensated_sum(w.iter().copied());
    let mean = compensated_sum(t.iter().zip(w).map(|(&(_, y), &wi)| wi * y)) / total_w;
    let ss_tot = compensated_sum(t.iter().zip(w).map(|(&(_, y), &wi)| wi * (y - mean).powi(2)));
    let ss_res = compensated_sum(
        t.iter()
            .zip(w)
            .map(|(&(x, y), &wi)| wi * (y - predict(x)).powi(2)),
    );
    // relative threshold so a constant series read back from text counts as constant
    if ss_tot <= 1e-24 * compensated_sum(t.iter().zip(w).map(|(&(_, y), &wi)| wi * y * y)).max(1e-300)
    {
        return None;
    }
    Some(1.0 - ss_res / ss_tot)
}

fn fit_transformed(family: Family, t: &[(f64, f64)], w: &[f64]) -> Result<FitResult> {
    let total_w = compensated_sum(w.iter().copied());
    let mx = compensated_sum(t.iter().zip(w).map(|(&(x, _), &wi)| wi * x)) / total_w;
    let my = compensated_sum(t.iter().zip(w).map(|(&(_, y), &wi)| wi * y)) / total_w;
    let sxx = compensated_sum(t.iter().zip(w).map(|(&(x, _), &wi)| wi * (x - mx).powi(2)));
    let sxy = compensated_sum(
        t.iter()
            .zip(w)
            .map(|(&(x, y), &wi)| wi * (x - mx) * (y - my)),
    );
    if sxx == 0.0 {
        return Err(Error::Domain("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = weighted_r_squared(t, w, |x| intercept + slope * x);
    Ok(FitResult {
        family,
        amplitude: intercept.exp(),
        exponent: slope,
        r_squared,
        points: t.len(),
    })
}

/// Weighted least-squares fit in the family's transformed space.
pub fn fit_weighted(family: Family, points: &[(f64, f64)], weights: &[f64]) -> Result<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    if weights.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: weights.len(),
        });
    }
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::Domain("weights must be positive and finite".into()));
    }
    let t = transform(family, points)?;
    fit_transformed(family, &t, weights)
}

pub fn fit(family: Family, points: &[(f64, f64)]) -> Result<FitResult> {
    fit_weighted(family, points, &vec![1.0; points.len()])
}

/// `y = a·x^b` by least squares on `(log x, log y)`.
pub fn fit_power(points: &[(f64, f64)]) -> Result<FitResult> {
    fit(Family::Power, points)
}

/// `y = a·exp(b·x)` by least squares on `(x, log y)`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult> {
    fit(Family::Exponential, points)
}

/// `1 − SS_res / SS_tot` of `model` on `points`, in the model's transformed
/// space.
pub fn r_squared(points: &[(f64, f64)], model: &FitResult) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let t = transform(model.family, points)?;
    weighted_r_squared(&t, &vec![1.0; t.len()], |x| model.predict_transformed(x))
        .ok_or(Error::ZeroVariance)
}

/// Points read from a delimited table.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnData {
    pub points: Vec<(f64, f64)>,
    pub weights: Option<Vec<f64>>,
    /// Rows with an empty cell in a requested column.
    pub skipped: usize,
}

/// Reads two (optionally three) named columns from a CSV table with a
/// header row. Lines starting with `#` are ignored, as are rows where a
/// requested cell is empty.
pub fn read_columns<R: Read>(
    reader: R,
    x: &str,
    y: &str,
    weight: Option<&str>,
) -> Result<ColumnData> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::InvalidParams(format!(
                "no column {name:?}; available: {}",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let xi = column(x)?;
    let yi = column(y)?;
    let wi = weight.map(column).transpose()?;

    let mut data = ColumnData {
        points: Vec::new(),
        weights: wi.map(|_| Vec::new()),
        skipped: 0,
    };
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut wanted = vec![xi, yi];
        wanted.extend(wi);
        if wanted.iter().any(|&c| record.get(c).is_none_or(str::is_empty)) {
            data.skipped += 1;
            continue;
        }
        let parse = |c: usize| {
            let cell = &record[c];
            cell.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("not a number: {cell:?}"),
            })
        };
        data.points.push((parse(xi)?, parse(yi)?));
        if let (Some(c), Some(ws)) = (wi, data.weights.as_mut()) {
            ws.push(parse(c)?);
        }
    }
    Ok(data)
}
