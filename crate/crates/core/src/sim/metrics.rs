use super::records::StepRecord;
use crate::error::{Error, Result};

/// Tracking and load summary over the evaluation window.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// W
    pub mean_power: f64,
    /// Relative to the baseline's mean power, %.
    pub percent_change: Option<f64>,
    /// W
    pub rms_error: f64,
    /// N, per turbine.
    pub mean_thrust: Vec<f64>,
    /// Fraction of the window each turbine spent saturated.
    pub saturation_duty: Vec<f64>,
    pub samples: usize,
}

fn window(records: &[StepRecord], eval_start: f64) -> Result<&[StepRecord]> {
    // Tolerate rounding in t = k·dt when locating the window start.
    let first = records.partition_point(|r| r.t < eval_start - 1e-9);
    let w = &records[first..];
    if w.is_empty() {
        return Err(Error::WindowTooShort {
            records: records.len(),
            start: eval_start,
        });
    }
    Ok(w)
}

pub fn mean_power(records: &[StepRecord], eval_start: f64) -> Result<f64> {
    let w = window(records, eval_start)?;
    Ok(w.iter().map(|r| r.p_bar).sum::<f64>() / w.len() as f64)
}

pub fn compute_metrics(
    records: &[StepRecord],
    baseline: Option<&[StepRecord]>,
    eval_start: f64,
) -> Result<Metrics> {
    let w = window(records, eval_start)?;
    let n = w.len() as f64;
    let n_turbines = w[0].turbines.len();

    let mean = w.iter().map(|r| r.p_bar).sum::<f64>() / n;
    let mse = w.iter().map(|r| (r.r - r.p_bar).powi(2)).sum::<f64>() / n;
    let mut thrust = vec![0.0; n_turbines];
    let mut duty = vec![0.0; n_turbines];
    for rec in w {
        for (i, tr) in rec.turbines.iter().enumerate() {
            thrust[i] += tr.thrust;
            duty[i] += tr.saturated as u8 as f64;
        }
    }
    thrust.iter_mut().for_each(|x| *x /= n);
    duty.iter_mut().for_each(|x| *x /= n);

    let percent_change = match baseline {
        Some(b) => {
            let base = mean_power(b, eval_start)?;
            Some(100.0 * (mean - base) / base)
        }
        None => None,
    };

    Ok(Metrics {
        mean_power: mean,
        percent_change,
        rms_error: mse.sqrt(),
        mean_thrust: thrust,
        saturation_duty: duty,
        samples: w.len(),
    })
}
