//! Time-indexed tables of named values.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::num_fmt::format_f64;

/// Simulation output: one row of values per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    names: Vec<String>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(names: Vec<String>) -> Self {
        Trajectory {
            names,
            times: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Appends a row. Times must be strictly increasing and values finite.
    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::DimensionMismatch(format!(
                "row of {} values for {} columns",
                values.len(),
                self.names.len()
            )));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::Config(format!(
                    "trajectory times must increase ({t} after {last})"
                )));
            }
        }
        if !t.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { time: t });
        }
        self.times.push(t);
        self.rows.push(values);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times
            .iter()
            .copied()
            .zip(self.rows.iter().map(Vec::as_slice))
    }

    pub fn last(&self) -> Option<(f64, &[f64])> {
        self.rows().last()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Linear interpolation of column `j` at time `t` (clamped to the grid).
    pub fn interpolate(&self, j: usize, t: f64) -> f64 {
        let ts = &self.times;
        if t <= ts[0] {
            return self.rows[0][j];
        }
        if t >= ts[ts.len() - 1] {
            return self.rows[ts.len() - 1][j];
        }
        let k = ts.partition_point(|&s| s <= t);
        let (t0, t1) = (ts[k - 1], ts[k]);
        let w = (t - t0) / (t1 - t0);
        self.rows[k - 1][j] * (1.0 - w) + self.rows[k][j] * w
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select(&self, columns: &[&str]) -> Result<Trajectory> {
        let idx: Vec<usize> = columns
            .iter()
            .map(|c| self.column_index(c))
            .collect::<Result<_>>()?;
        Ok(Trajectory {
            names: columns.iter().map(|c| c.to_string()).collect(),
            times: self.times.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect(),
        })
    }

    /// Appends the columns of `other`, which must share this time grid.
    pub fn join(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.times != other.times {
            return Err(Error::DimensionMismatch(
                "joined trajectories must share a time grid".into(),
            ));
        }
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        Ok(Trajectory {
            names,
            times: self.times.clone(),
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().chain(b).copied().collect())
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// CSV with header `t,<names...>` and 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (t, row) in self.rows() {
            out.push_str(&format_f64(t));
            for v in row {
                let _ = write!(out, ",{}", format_f64(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Trajectory> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing CSV header".into(),
        })?;
        let mut cols = header.split(',');
        if cols.next() != Some("t") {
            return Err(Error::Parse {
                line: 1,
                message: "CSV header must start with `t`".into(),
            });
        }
        let mut traj = Trajectory::new(cols.map(str::to_string).collect());
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| {
                    v.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 1,
                        message: format!("bad number `{v}`"),
                    })
                })
                .collect::<Result<_>>()?;
            traj.push(vals[0], vals[1..].to_vec())?;
        }
        Ok(traj)
    }
}
