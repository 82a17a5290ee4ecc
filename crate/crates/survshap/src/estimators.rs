//! Nonparametric estimators over censored samples: Kaplan-Meier,
//! Nelson-Aalen, and the censoring-distribution Kaplan-Meier used for
//! inverse-probability weighting.

use crate::curve::{CurveKind, StepCurve, TimeGrid};
use crate::dataset::SurvivalDataset;
use crate::error::{Error, Result};

/// Risk table over the distinct observed times of a sample: at each time,
/// the number of events, censorings, and subjects still at risk.
struct RiskTable {
    times: Vec<f64>,
    events: Vec<usize>,
    censored: Vec<usize>,
    at_risk: Vec<usize>,
}

fn risk_table(times: &[f64], events: &[bool]) -> RiskTable {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].partial_cmp(&times[b]).unwrap());

    let mut distinct = Vec::new();
    let mut d = Vec::new();
    let mut c = Vec::new();
    for &i in &order {
        if distinct.last() != Some(&times[i]) {
            distinct.push(times[i]);
            d.push(0);
            c.push(0);
        }
        if events[i] {
            *d.last_mut().unwrap() += 1;
        } else {
            *c.last_mut().unwrap() += 1;
        }
    }

    // Everyone with an observed time >= t_j is at risk at t_j.
    let mut at_risk = vec![0usize; distinct.len()];
    let mut remaining = times.len();
    for j in 0..distinct.len() {
        at_risk[j] = remaining;
        remaining -= d[j] + c[j];
    }

    RiskTable {
        times: distinct,
        events: d,
        censored: c,
        at_risk,
    }
}

/// Kaplan-Meier product-limit survival estimate on the event grid.
pub fn kaplan_meier(dataset: &SurvivalDataset) -> Result<StepCurve> {
    kaplan_meier_from(dataset.times(), dataset.events())
}

pub(crate) fn kaplan_meier_from(times: &[f64], events: &[bool]) -> Result<StepCurve> {
    if !events.iter().any(|&e| e) {
        return Err(Error::NoEvents);
    }
    let table = risk_table(times, events);
    let mut grid_times = Vec::new();
    let mut values = Vec::new();
    let mut surv = 1.0;
    for j in 0..table.times.len() {
        if table.events[j] == 0 {
            continue;
        }
        surv *= 1.0 - table.events[j] as f64 / table.at_risk[j] as f64;
        grid_times.push(table.times[j]);
        values.push(surv.max(0.0));
    }
    StepCurve::new(TimeGrid::new(grid_times)?, values, CurveKind::Survival)
}

/// Nelson-Aalen cumulative-hazard estimate: H(t) = sum of d_j / r_j over
/// event times up to t.
pub fn nelson_aalen(dataset: &SurvivalDataset) -> Result<StepCurve> {
    nelson_aalen_from(dataset.times(), dataset.events())
}

pub(crate) fn nelson_aalen_from(times: &[f64], events: &[bool]) -> Result<StepCurve> {
    if !events.iter().any(|&e| e) {
        return Err(Error::NoEvents);
    }
    let table = risk_table(times, events);
    let mut grid_times = Vec::new();
    let mut values = Vec::new();
    let mut chf = 0.0;
    for j in 0..table.times.len() {
        if table.events[j] == 0 {
            continue;
        }
        chf += table.events[j] as f64 / table.at_risk[j] as f64;
        grid_times.push(table.times[j]);
        values.push(chf);
    }
    StepCurve::new(
        TimeGrid::new(grid_times)?,
        values,
        CurveKind::CumulativeHazard,
    )
}

/// Kaplan-Meier estimate of the censoring distribution G(t), obtained by
/// treating censorings as the event of interest. Ties between events and
/// censorings follow the convention that events happen first, so subjects
/// with an event at t remain in the censoring risk set at t.
pub fn censoring_kaplan_meier(dataset: &SurvivalDataset) -> Result<StepCurve> {
    let table = risk_table(dataset.times(), dataset.events());
    let mut grid_times = Vec::new();
    let mut values = Vec::new();
    let mut surv = 1.0;
    for j in 0..table.times.len() {
        if table.censored[j] == 0 {
            continue;
        }
        surv *= 1.0 - table.censored[j] as f64 / table.at_risk[j] as f64;
        grid_times.push(table.times[j]);
        values.push(surv.max(0.0));
    }
    if grid_times.is_empty() {
        // No censoring: G == 1 everywhere. Represent with a single step of
        // height 1 at the first observed time.
        let t0 = dataset
            .times()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .max(f64::MIN_POSITIVE);
        return StepCurve::new(TimeGrid::new(vec![t0])?, vec![1.0], CurveKind::Survival);
    }
    StepCurve::new(TimeGrid::new(grid_times)?, values, CurveKind::Survival)
}
