//! Step-function machinery shared by every estimator and explainer:
//! a strictly increasing grid of event times and right-continuous step
//! curves defined over it.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Strictly increasing, positive event times.
///
/// Grids are shared by reference between curves; cloning is cheap.
/// Serialized as a plain array and re-validated on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid {
    times: Arc<Vec<f64>>,
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;

    fn try_from(times: Vec<f64>) -> Result<Self> {
        TimeGrid::new(times)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(grid: TimeGrid) -> Vec<f64> {
        grid.times().to_vec()
    }
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut prev = 0.0;
        for (i, &t) in times.iter().enumerate() {
            if !t.is_finite() || t <= prev {
                return Err(Error::InvalidGrid { index: i, value: t });
            }
            prev = t;
        }
        Ok(TimeGrid {
            times: Arc::new(times),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> f64 {
        self.times[0]
    }

    pub fn last(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index of the last grid time <= t, or `None` for t before the grid.
    pub fn index_at(&self, t: f64) -> Option<usize> {
        if t < self.times[0] {
            return None;
        }
        Some(match self.times.partition_point(|&g| g <= t) {
            0 => unreachable!(),
            k => k - 1,
        })
    }

    /// Index of an exact grid time (used when mapping event times back
    /// onto the grid they came from).
    pub fn position(&self, t: f64) -> Option<usize> {
        self.times.binary_search_by(|g| g.partial_cmp(&t).unwrap()).ok()
    }
}

/// What a step curve represents; decides its invariants and the implicit
/// value before the first grid time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    /// Values in [0, 1], non-increasing, implicitly 1 before the grid.
    Survival,
    /// Values >= 0, non-decreasing, implicitly 0 before the grid.
    CumulativeHazard,
    /// Unconstrained reals, implicitly 0 before the grid.
    Attribution,
}

impl CurveKind {
    /// Implicit value for t below the first grid time.
    pub fn pre_grid_value(self) -> f64 {
        match self {
            CurveKind::Survival => 1.0,
            CurveKind::CumulativeHazard | CurveKind::Attribution => 0.0,
        }
    }
}

/// Transform applied to curve values during integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    AbsoluteValue,
}

/// A right-continuous step function over a [`TimeGrid`].
///
/// `values[j]` holds on `[t_j, t_{j+1})`; the last value extends to
/// infinity and `kind.pre_grid_value()` holds before `t_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCurve {
    grid: TimeGrid,
    values: Vec<f64>,
    kind: CurveKind,
}

impl StepCurve {
    pub fn new(grid: TimeGrid, values: Vec<f64>, kind: CurveKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::CurveLength {
                values: values.len(),
                times: grid.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::CurveInvariant {
                    kind,
                    index: i,
                    value: v,
                });
            }
            let ok = match kind {
                CurveKind::Survival => {
                    (0.0..=1.0).contains(&v) && (i == 0 || v <= values[i - 1])
                }
                CurveKind::CumulativeHazard => v >= 0.0 && (i == 0 || v >= values[i - 1]),
                CurveKind::Attribution => true,
            };
            if !ok {
                return Err(Error::CurveInvariant {
                    kind,
                    index: i,
                    value: v,
                });
            }
        }
        Ok(StepCurve { grid, values, kind })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Right-continuous evaluation at any t >= 0.
    pub fn value_at(&self, t: f64) -> f64 {
        match self.grid.index_at(t) {
            None => self.kind.pre_grid_value(),
            Some(j) => self.values[j],
        }
    }

    /// Left limit at t: the value just before t.
    pub fn value_before(&self, t: f64) -> f64 {
        match self.grid.index_at(t) {
            None => self.kind.pre_grid_value(),
            Some(j) => {
                if self.grid.times()[j] == t {
                    if j == 0 {
                        self.kind.pre_grid_value()
                    } else {
                        self.values[j - 1]
                    }
                } else {
                    self.values[j]
                }
            }
        }
    }

    /// S(t) = exp(-H(t)) applied pointwise to a cumulative-hazard curve.
    ///
    /// Results are clipped to [0, 1] to absorb rounding.
    pub fn chf_to_survival(&self) -> StepCurve {
        assert_eq!(
            self.kind,
            CurveKind::CumulativeHazard,
            "chf_to_survival needs a cumulative-hazard curve"
        );
        let values = self
            .values
            .iter()
            .map(|&h| (-h).exp().clamp(0.0, 1.0))
            .collect();
        StepCurve::new(self.grid.clone(), values, CurveKind::Survival)
            .expect("exp(-H) of a valid CHF is a valid survival curve")
    }

    /// Exact integral of the (optionally |.|-transformed) step function
    /// over `[t_start, t_end]`.
    pub fn integrate(&self, t_start: f64, t_end: f64, transform: Transform) -> Result<f64> {
        if !(t_start < t_end) {
            return Err(Error::EmptyRange {
                start: t_start,
                end: t_end,
            });
        }
        let apply = |v: f64| match transform {
            Transform::Identity => v,
            Transform::AbsoluteValue => v.abs(),
        };

        let times = self.grid.times();
        let mut total = 0.0;
        let mut cursor = t_start;

        // Segment before the first grid time.
        if cursor < times[0] {
            let seg_end = t_end.min(times[0]);
            total += apply(self.kind.pre_grid_value()) * (seg_end - cursor);
            cursor = seg_end;
        }
        if cursor >= t_end {
            return Ok(total);
        }

        let start_idx = self.grid.index_at(cursor).unwrap();
        for j in start_idx..times.len() {
            let seg_start = cursor.max(times[j]);
            let seg_end = if j + 1 < times.len() {
                t_end.min(times[j + 1])
            } else {
                t_end
            };
            if seg_end > seg_start {
                total += apply(self.values[j]) * (seg_end - seg_start);
                cursor = seg_end;
            }
            if cursor >= t_end {
                break;
            }
        }
        Ok(total)
    }

    /// Re-sample this curve onto another grid using step semantics.
    pub fn resample(&self, grid: &TimeGrid) -> StepCurve {
        let values = grid.times().iter().map(|&t| self.value_at(t)).collect();
        StepCurve::new(grid.clone(), values, self.kind)
            .expect("resampling preserves step-curve invariants")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(ts: &[f64]) -> TimeGrid {
        TimeGrid::new(ts.to_vec()).unwrap()
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(matches!(TimeGrid::new(vec![]), Err(Error::EmptyGrid)));
        assert!(matches!(
            TimeGrid::new(vec![0.0, 1.0]),
            Err(Error::InvalidGrid { index: 0, .. })
        ));
        assert!(matches!(
            TimeGrid::new(vec![1.0, 1.0]),
            Err(Error::InvalidGrid { index: 1, .. })
        ));
        assert!(matches!(
            TimeGrid::new(vec![2.0, 1.0]),
            Err(Error::InvalidGrid { index: 1, .. })
        ));
    }

    #[test]
    fn survival_curve_invariants_enforced() {
        let g = grid(&[1.0, 2.0]);
        assert!(StepCurve::new(g.clone(), vec![0.9, 0.5], CurveKind::Survival).is_ok());
        assert!(StepCurve::new(g.clone(), vec![0.5, 0.9], CurveKind::Survival).is_err());
        assert!(StepCurve::new(g.clone(), vec![1.1, 0.5], CurveKind::Survival).is_err());
        assert!(StepCurve::new(g, vec![0.5, -0.1], CurveKind::Survival).is_err());
    }

    #[test]
    fn chf_curve_invariants_enforced() {
        let g = grid(&[1.0, 2.0]);
        assert!(StepCurve::new(g.clone(), vec![0.1, 0.4], CurveKind::CumulativeHazard).is_ok());
        assert!(StepCurve::new(g.clone(), vec![0.4, 0.1], CurveKind::CumulativeHazard).is_err());
        assert!(StepCurve::new(g, vec![-0.1, 0.4], CurveKind::CumulativeHazard).is_err());
    }

    #[test]
    fn evaluation_is_right_continuous_with_defaults() {
        let c = StepCurve::new(grid(&[1.0, 3.0]), vec![0.8, 0.4], CurveKind::Survival).unwrap();
        assert_eq!(c.value_at(0.0), 1.0); // survival default before grid
        assert_eq!(c.value_at(1.0), 0.8); // right continuity on the grid point
        assert_eq!(c.value_at(2.9), 0.8);
        assert_eq!(c.value_at(3.0), 0.4);
        assert_eq!(c.value_at(100.0), 0.4); // step extension past the grid

        assert_eq!(c.value_before(1.0), 1.0);
        assert_eq!(c.value_before(3.0), 0.8);
        assert_eq!(c.value_before(2.0), 0.8);

        let h =
            StepCurve::new(grid(&[1.0]), vec![0.5], CurveKind::CumulativeHazard).unwrap();
        assert_eq!(h.value_at(0.5), 0.0); // CHF default before grid
    }

    #[test]
    fn chf_to_survival_pointwise() {
        let g = grid(&[1.0, 2.0, 3.0]);
        let h = StepCurve::new(
            g.clone(),
            vec![0.0, 2.0f64.ln(), 1.0],
            CurveKind::CumulativeHazard,
        )
        .unwrap();
        let s = h.chf_to_survival();
        assert_eq!(s.kind(), CurveKind::Survival);
        assert_eq!(s.values()[0], 1.0); // H = 0 -> S = 1
        assert!((s.values()[1] - 0.5).abs() < 1e-15); // H = ln 2 -> S = 0.5
        assert!(s.values()[2] < s.values()[1]); // monotone
    }

    #[test]
    fn integrate_constant_and_absolute() {
        // Constant c from the first grid time onward: length-10 window.
        let c = StepCurve::new(grid(&[1.0]), vec![0.3], CurveKind::Attribution).unwrap();
        let got = c.integrate(1.0, 11.0, Transform::Identity).unwrap();
        assert!((got - 3.0).abs() < 1e-12);

        // phi = -0.2 everywhere, |.| over a length-5 window.
        let neg = StepCurve::new(grid(&[1.0]), vec![-0.2], CurveKind::Attribution).unwrap();
        let got = neg.integrate(2.0, 7.0, Transform::AbsoluteValue).unwrap();
        assert!((got - 1.0).abs() < 1e-12);

        // Pre-grid portion contributes the implicit 0 for attributions.
        let got = neg.integrate(0.0, 2.0, Transform::AbsoluteValue).unwrap();
        assert!((got - 0.2).abs() < 1e-12);

        assert!(matches!(
            neg.integrate(3.0, 3.0, Transform::Identity),
            Err(Error::EmptyRange { .. })
        ));
    }

    #[test]
    fn integrate_matches_riemann_oracle() {
        // Piecewise curve checked against a fine Riemann sum.
        let c = StepCurve::new(
            grid(&[1.0, 2.5, 4.0, 7.0]),
            vec![0.4, -1.2, 0.7, -0.1],
            CurveKind::Attribution,
        )
        .unwrap();
        let (a, b) = (0.3, 9.1);
        let n = 1_000_000usize;
        let dt = (b - a) / n as f64;
        let mut riemann = 0.0;
        for i in 0..n {
            let t = a + (i as f64 + 0.5) * dt;
            riemann += c.value_at(t).abs() * dt;
        }
        let exact = c.integrate(a, b, Transform::AbsoluteValue).unwrap();
        assert!(
            (exact - riemann).abs() < 1e-4,
            "exact {exact} vs riemann {riemann}"
        );
    }

    #[test]
    fn resample_restriction() {
        let c = StepCurve::new(
            grid(&[1.0, 2.0, 3.0]),
            vec![0.9, 0.6, 0.2],
            CurveKind::Survival,
        )
        .unwrap();
        let sub = c.resample(&grid(&[0.5, 2.5]));
        assert_eq!(sub.values(), &[1.0, 0.6]);
    }

    proptest! {
        // Additivity over adjacent intervals to within 1e-12 relative error.
        #[test]
        fn integrate_is_additive(
            vals in proptest::collection::vec(-10.0f64..10.0, 1..12),
            split in 0.0f64..1.0,
        ) {
            let n = vals.len();
            let times: Vec<f64> = (1..=n).map(|i| i as f64).collect();
            let c = StepCurve::new(
                TimeGrid::new(times).unwrap(),
                vals,
                CurveKind::Attribution,
            ).unwrap();
            let (a, bnd) = (0.5, n as f64 + 1.5);
            let mid = a + split * (bnd - a);
            if mid > a && mid < bnd {
                let whole = c.integrate(a, bnd, Transform::Identity).unwrap();
                let left = c.integrate(a, mid, Transform::Identity).unwrap();
                let right = c.integrate(mid, bnd, Transform::Identity).unwrap();
                let scale = whole.abs().max(1.0);
                prop_assert!(((left + right) - whole).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn value_at_matches_linear_scan(t in 0.0f64..12.0) {
            let c = StepCurve::new(
                TimeGrid::new(vec![1.0, 2.0, 5.0, 9.0]).unwrap(),
                vec![0.9, 0.7, 0.4, 0.1],
                CurveKind::Survival,
            ).unwrap();
            // Reference: scan segments directly.
            let expected = if t < 1.0 { 1.0 }
                else if t < 2.0 { 0.9 }
                else if t < 5.0 { 0.7 }
                else if t < 9.0 { 0.4 }
                else { 0.1 };
            prop_assert_eq!(c.value_at(t), expected);
        }
    }
}
