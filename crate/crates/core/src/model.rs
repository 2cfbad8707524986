//! Ideal preparation model for thermal-noise studies: a pure squeezed vacuum
//! with preparation loss, a vacuum, and a symmetric thermal state fed into the
//! three-mode circuit.

use std::fmt::Write as _;

use crate::covariance::CovarianceMatrix;
use crate::error::Result;
use crate::network::{mix_three_mode, modes};
use crate::noise::check_grid;
use crate::spectrum::{ppt_value, UNITY_TOLERANCE};
use crate::states::{apply_preparation_loss, make_state, SingleModeSpec};

/// Bisection width for separability onsets, in dB.
pub const ONSET_TOLERANCE_DB: f64 = 1e-6;

/// Three-mode state for `squeezing_db` of pure squeezing, preparation loss
/// `loss` on the squeezed input, and thermal noise `thermal_db` above shot
/// noise.
pub fn ideal_three_mode(squeezing_db: f64, loss: f64, thermal_db: f64) -> Result<CovarianceMatrix> {
    let sq = apply_preparation_loss(
        &make_state(&SingleModeSpec::pure_squeezed_db(squeezing_db))?,
        loss,
    )?;
    let vac = CovarianceMatrix::vacuum(1);
    let th = make_state(&SingleModeSpec::thermal_db(thermal_db))?;
    mix_three_mode(&sq, &vac, &th)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPoint {
    pub thermal_db: f64,
    pub ppt_a: f64,
    pub ppt_b: f64,
    pub ppt_c: f64,
}

pub fn thermal_point(squeezing_db: f64, loss: f64, thermal_db: f64) -> Result<ThermalPoint> {
    let g = ideal_three_mode(squeezing_db, loss, thermal_db)?;
    Ok(ThermalPoint {
        thermal_db,
        ppt_a: ppt_value(&g, modes::A)?,
        ppt_b: ppt_value(&g, modes::B)?,
        ppt_c: ppt_value(&g, modes::C)?,
    })
}

pub fn thermal_sweep(squeezing_db: f64, loss: f64, thermal_grid_db: &[f64]) -> Result<Vec<ThermalPoint>> {
    check_grid(thermal_grid_db)?;
    thermal_grid_db
        .iter()
        .map(|&t| thermal_point(squeezing_db, loss, t))
        .collect()
}

/// Smallest thermal power on the grid range at which `PPT_C` reaches one,
/// refined by bisection between the bracketing grid points. `None` if the C
/// splitting stays entangled over the whole grid.
pub fn separability_onset(
    squeezing_db: f64,
    loss: f64,
    points: &[ThermalPoint],
) -> Result<Option<f64>> {
    let separable = |p: &ThermalPoint| p.ppt_c >= 1.0 - UNITY_TOLERANCE;
    let Some(first) = points.iter().position(separable) else {
        return Ok(None);
    };
    if first == 0 {
        return Ok(Some(points[0].thermal_db));
    }
    let (mut lo, mut hi) = (points[first - 1].thermal_db, points[first].thermal_db);
    while hi - lo > ONSET_TOLERANCE_DB {
        let mid = 0.5 * (lo + hi);
        if separable(&thermal_point(squeezing_db, loss, mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// `n` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n)
            .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// One labelled `PPT_C` series of a thermal sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalSeries {
    pub squeezing_db: f64,
    pub loss: f64,
    pub points: Vec<ThermalPoint>,
}

/// Wide CSV: `thermal_db` then one `PPT_C` column per series.
pub fn thermal_series_csv(series: &[ThermalSeries]) -> String {
    let mut out = String::from("thermal_db");
    for s in series {
        write!(out, ",ppt_c_sq{}db_loss{}", s.squeezing_db, s.loss).unwrap();
    }
    out.push('\n');
    let rows = series.first().map_or(0, |s| s.points.len());
    for i in 0..rows {
        write!(out, "{:.6}", series[0].points[i].thermal_db).unwrap();
        for s in series {
            write!(out, ",{:.9}", s.points[i].ppt_c).unwrap();
        }
        out.push('\n');
    }
    out
}
