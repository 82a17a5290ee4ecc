//! Censored survival datasets and the delimited interchange format.

use crate::curve::TimeGrid;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Column names reserved for the outcome in the interchange format.
pub const TIME_COLUMN: &str = "time";
pub const EVENT_COLUMN: &str = "event";

const DATASET_SCHEMA: &str = "survshap-dataset";
const DATASET_VERSION: u32 = 1;

/// A right-censored sample: feature matrix plus (observed time, event
/// indicator) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalDataset {
    feature_names: Vec<String>,
    /// Row-major n x p matrix.
    features: Vec<f64>,
    times: Vec<f64>,
    events: Vec<bool>,
    n: usize,
    p: usize,
}

impl SurvivalDataset {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        times: Vec<f64>,
        events: Vec<bool>,
    ) -> Result<Self> {
        let p = feature_names.len();
        let n = rows.len();
        if times.len() != n || events.len() != n {
            return Err(Error::invalid(
                "dataset",
                format!(
                    "got {n} rows, {} times and {} event indicators",
                    times.len(),
                    events.len()
                ),
            ));
        }
        let mut features = Vec::with_capacity(n * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::RaggedRow {
                    row: i,
                    got: row.len(),
                    expected: p,
                });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidObservation {
                        row: i,
                        message: format!("non-finite feature value {v}"),
                    });
                }
            }
            features.extend_from_slice(row);
        }
        for (i, &t) in times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidObservation {
                    row: i,
                    message: format!("observed time must be finite and non-negative, got {t}"),
                });
            }
        }
        if !events.iter().any(|&e| e) {
            return Err(Error::NoEvents);
        }
        Ok(SurvivalDataset {
            feature_names,
            features,
            times,
            events,
            n,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn events(&self) -> &[bool] {
        &self.events
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.p + feature]
    }

    pub fn event_count(&self) -> usize {
        self.events.iter().filter(|&&e| e).count()
    }

    /// Fraction of censored observations.
    pub fn censoring_rate(&self) -> f64 {
        1.0 - self.event_count() as f64 / self.n as f64
    }

    /// Per-feature means.
    pub fn feature_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.p];
        for i in 0..self.n {
            for (m, &v) in means.iter_mut().zip(self.row(i)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= self.n as f64;
        }
        means
    }

    /// Per-feature standard deviations (population convention).
    pub fn feature_stds(&self) -> Vec<f64> {
        let means = self.feature_means();
        let mut vars = vec![0.0; self.p];
        for i in 0..self.n {
            for ((v, &x), &m) in vars.iter_mut().zip(self.row(i)).zip(&means) {
                let d = x - m;
                *v += d * d;
            }
        }
        for v in &mut vars {
            *v = (*v / self.n as f64).sqrt();
        }
        vars
    }

    /// Dataset restricted to the given row indices, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let rows = indices.iter().map(|&i| self.row(i).to_vec()).collect();
        let times = indices.iter().map(|&i| self.times[i]).collect();
        let events = indices.iter().map(|&i| self.events[i]).collect();
        SurvivalDataset::new(self.feature_names.clone(), rows, times, events)
    }

    /// Seeded shuffle split into (train, test) with the given test fraction.
    pub fn split_train_test(&self, test_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        if !(0.0..1.0).contains(&test_fraction) || test_fraction <= 0.0 {
            return Err(Error::invalid(
                "split",
                format!("test fraction must be in (0, 1), got {test_fraction}"),
            ));
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let n_test = ((self.n as f64) * test_fraction).round() as usize;
        let n_test = n_test.clamp(1, self.n - 1);
        let (test_idx, train_idx) = order.split_at(n_test);
        let mut train_idx = train_idx.to_vec();
        let mut test_idx = test_idx.to_vec();
        train_idx.sort_unstable();
        test_idx.sort_unstable();
        Ok((self.select_rows(&train_idx)?, self.select_rows(&test_idx)?))
    }

    /// Sorted unique times among event observations.
    pub fn event_grid(&self) -> Result<TimeGrid> {
        let mut times: Vec<f64> = self
            .times
            .iter()
            .zip(&self.events)
            .filter(|&(_, &e)| e)
            .map(|(&t, _)| t)
            .collect();
        if times.is_empty() {
            return Err(Error::NoEvents);
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup();
        TimeGrid::new(times)
    }

    /// Write the interchange format: a schema header line, then a header
    /// row of feature names plus the reserved `time` and `event` columns.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        writeln!(out, "# schema: {DATASET_SCHEMA} v{DATASET_VERSION}").unwrap();
        let mut header = self.feature_names.join(",");
        header.push_str(",time,event");
        writeln!(out, "{header}").unwrap();
        for i in 0..self.n {
            for v in self.row(i) {
                write!(out, "{v},").unwrap();
            }
            writeln!(out, "{},{}", self.times[i], u8::from(self.events[i])).unwrap();
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        file.write_all(out.as_bytes())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Read the interchange format written by [`SurvivalDataset::write`].
    ///
    /// Lines starting with `#` are treated as comments; the reserved
    /// `time` and `event` columns may appear in any position.
    pub fn read(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|e| Error::io(display.clone(), e))?;
        let reader = BufReader::new(file);

        let mut header: Option<Vec<String>> = None;
        let mut feature_cols: Vec<usize> = Vec::new();
        let mut feature_names: Vec<String> = Vec::new();
        let mut time_col = usize::MAX;
        let mut event_col = usize::MAX;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut times = Vec::new();
        let mut events = Vec::new();

        for (line_no, line) in reader.lines().enumerate() {
            let line_no = line_no + 1;
            let line = line.map_err(|e| Error::io(display.clone(), e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            match &header {
                None => {
                    let names: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
                    for (idx, name) in names.iter().enumerate() {
                        match name.as_str() {
                            TIME_COLUMN => time_col = idx,
                            EVENT_COLUMN => event_col = idx,
                            _ => {
                                feature_cols.push(idx);
                                feature_names.push(name.clone());
                            }
                        }
                    }
                    if time_col == usize::MAX {
                        return Err(Error::MissingColumn {
                            path: display,
                            column: TIME_COLUMN.into(),
                        });
                    }
                    if event_col == usize::MAX {
                        return Err(Error::MissingColumn {
                            path: display,
                            column: EVENT_COLUMN.into(),
                        });
                    }
                    header = Some(names);
                }
                Some(names) => {
                    if fields.len() != names.len() {
                        return Err(Error::parse(
                            &display,
                            line_no,
                            format!("expected {} fields, found {}", names.len(), fields.len()),
                        ));
                    }
                    let parse_cell = |idx: usize| -> Result<f64> {
                        fields[idx].parse::<f64>().map_err(|_| {
                            Error::parse(
                                &display,
                                line_no,
                                format!(
                                    "column `{}`: non-numeric cell `{}`",
                                    names[idx], fields[idx]
                                ),
                            )
                        })
                    };
                    let row: Vec<f64> = feature_cols
                        .iter()
                        .map(|&c| parse_cell(c))
                        .collect::<Result<_>>()?;
                    times.push(parse_cell(time_col)?);
                    let ev = fields[event_col];
                    events.push(match ev {
                        "0" => false,
                        "1" => true,
                        _ => {
                            return Err(Error::parse(
                                &display,
                                line_no,
                                format!("column `event`: expected 0 or 1, found `{ev}`"),
                            ))
                        }
                    });
                    rows.push(row);
                }
            }
        }

        if header.is_none() {
            return Err(Error::parse(&display, 0, "file has no header row"));
        }
        SurvivalDataset::new(feature_names, rows, times, events)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy() -> SurvivalDataset {
        SurvivalDataset::new(
            vec!["a".into(), "b".into()],
            vec![
                vec![1.0, 2.0],
                vec![3.0, 4.0],
                vec![5.0, 6.0],
                vec![7.0, 8.0],
            ],
            vec![2.0, 1.0, 2.0, 3.0],
            vec![true, true, true, false],
        )
        .unwrap()
    }

    #[test]
    fn event_grid_excludes_censored_and_merges_ties() {
        // times [2,1,2,3], events [1,1,1,0] -> grid [1,2]
        let grid = toy().event_grid().unwrap();
        assert_eq!(grid.times(), &[1.0, 2.0]);
    }

    #[test]
    fn all_censored_rejected() {
        let err = SurvivalDataset::new(
            vec!["a".into()],
            vec![vec![1.0], vec![2.0]],
            vec![1.0, 2.0],
            vec![false, false],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoEvents));
    }

    #[test]
    fn validation_errors_carry_locations() {
        let err = SurvivalDataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0], vec![3.0]],
            vec![1.0, 2.0],
            vec![true, true],
        )
        .unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 1, got: 1, expected: 2 }));

        let err = SurvivalDataset::new(
            vec!["a".into()],
            vec![vec![1.0], vec![2.0]],
            vec![1.0, -3.0],
            vec![true, true],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidObservation { row: 1, .. }));
    }

    #[test]
    fn interchange_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.csv");
        let data = SurvivalDataset::new(
            vec!["x1".into(), "x2".into()],
            vec![
                vec![0.1234567890123456, -7.25e-9],
                vec![1.0 / 3.0, 2.0f64.sqrt()],
            ],
            vec![1.5, 2.25],
            vec![true, false],
        )
        .unwrap();
        data.write(&path).unwrap();
        let back = SurvivalDataset::read(&path).unwrap();
        assert_eq!(data, back);

        // Same dataset written twice is byte-identical.
        let path2 = dir.path().join("toy2.csv");
        data.write(&path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn read_reports_schema_problems() {
        let dir = tempfile::tempdir().unwrap();

        let path = dir.path().join("missing_event.csv");
        std::fs::write(&path, "a,b,time\n1,2,3\n").unwrap();
        let err = SurvivalDataset::read(&path).unwrap_err();
        assert!(matches!(err, Error::MissingColumn { column, .. } if column == "event"));

        let path = dir.path().join("bad_cell.csv");
        std::fs::write(&path, "a,time,event\n1,2,1\nx,3,1\n").unwrap();
        let err = SurvivalDataset::read(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn split_is_seeded_and_partitions() {
        let data = toy();
        let (train, test) = data.split_train_test(0.25, 7).unwrap();
        assert_eq!(train.n() + test.n(), data.n());
        let (train2, test2) = data.split_train_test(0.25, 7).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
    }
}
