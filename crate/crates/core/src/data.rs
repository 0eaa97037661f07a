//! In-memory data containers.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Row-major `n × d` covariate matrix. `d` may be zero (intercept-only models).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covariates {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl Covariates {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {n}x{d} matrix",
                values.len()
            )));
        }
        Ok(Covariates { n, d, values })
    }

    /// A matrix with `n` rows and no columns.
    pub fn empty(n: usize) -> Self {
        Covariates {
            n,
            d: 0,
            values: Vec::new(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * d);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} columns, expected {d}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Ok(Covariates { n, d, values })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let d = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut values = Vec::with_capacity(n * d);
        for i in 0..n {
            values.extend(columns.iter().map(|c| c[i]));
        }
        Ok(Covariates { n, d, values })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.values[i * self.d + j]).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n).map(move |i| self.row(i))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut values = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        Covariates {
            n: idx.len(),
            d: self.d,
            values,
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.n * cols.len());
        for i in 0..self.n {
            let r = self.row(i);
            values.extend(cols.iter().map(|&j| r[j]));
        }
        Covariates {
            n: self.n,
            d: cols.len(),
            values,
        }
    }

    /// Columns of `self` followed by the columns of `other`.
    pub fn hstack(&self, other: &Covariates) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        let d = self.d + other.d;
        let mut values = Vec::with_capacity(self.n * d);
        for i in 0..self.n {
            values.extend_from_slice(self.row(i));
            values.extend_from_slice(other.row(i));
        }
        Ok(Covariates { n: self.n, d, values })
    }
}

/// One outcome column together with its covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub y: Vec<f64>,
    pub x: Covariates,
}

impl Dataset {
    pub fn new(y: Vec<f64>, x: Covariates) -> Result<Self> {
        if y.len() != x.nrows() {
            return Err(Error::LengthMismatch(y.len(), x.nrows()));
        }
        if y.iter().chain(x.values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite value in dataset".into()));
        }
        Ok(Dataset { y, x })
    }

    pub fn intercept_only(y: Vec<f64>) -> Self {
        let n = y.len();
        Dataset {
            y,
            x: Covariates::empty(n),
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }
}

/// Two outcomes observed on the same rows, sharing one covariate matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairData {
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    pub x: Covariates,
}

impl PairData {
    pub fn new(y1: Vec<f64>, y2: Vec<f64>, x: Covariates) -> Result<Self> {
        if y1.len() != y2.len() {
            return Err(Error::LengthMismatch(y1.len(), y2.len()));
        }
        if y1.len() != x.nrows() {
            return Err(Error::LengthMismatch(y1.len(), x.nrows()));
        }
        Ok(PairData { y1, y2, x })
    }

    pub fn n(&self) -> usize {
        self.y1.len()
    }

    pub fn first(&self) -> Dataset {
        Dataset {
            y: self.y1.clone(),
            x: self.x.clone(),
        }
    }

    pub fn second(&self) -> Dataset {
        Dataset {
            y: self.y2.clone(),
            x: self.x.clone(),
        }
    }

    /// The pair restricted to a subset of covariate columns.
    pub fn with_covariates(&self, cols: &[usize]) -> PairData {
        PairData {
            y1: self.y1.clone(),
            y2: self.y2.clone(),
            x: self.x.select_columns(cols),
        }
    }

    /// Rows `idx` (with repetition) of all three components.
    pub fn resample(&self, idx: &[usize]) -> PairData {
        PairData {
            y1: idx.iter().map(|&i| self.y1[i]).collect(),
            y2: idx.iter().map(|&i| self.y2[i]).collect(),
            x: self.x.select_rows(idx),
        }
    }
}

/// Maps arbitrary ordered labels to codes `1..=J` by sort order. Returns the
/// codes and the sorted distinct labels (`levels[k]` has code `k + 1`).
pub fn encode_ordinal(labels: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if labels.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("NaN ordinal label".into()));
    }
    let mut levels = labels.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let codes = labels
        .iter()
        .map(|v| {
            let k = levels.partition_point(|l| l < v);
            (k + 1) as f64
        })
        .collect();
    Ok((codes, levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_by_sort_order() {
        let (codes, levels) = encode_ordinal(&[10.0, -3.0, 7.5, 10.0, -3.0]).unwrap();
        assert_eq!(codes, vec![3.0, 1.0, 2.0, 3.0, 1.0]);
        assert_eq!(levels, vec![-3.0, 7.5, 10.0]);
    }

    #[test]
    fn select_and_stack() {
        let x = Covariates::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let r = x.select_rows(&[2, 0, 2]);
        assert_eq!(r.row(0), &[5.0, 6.0]);
        assert_eq!(r.row(1), &[1.0, 2.0]);
        let c = x.select_columns(&[1]);
        assert_eq!(c.column(0), vec![2.0, 4.0, 6.0]);
        let s = c.hstack(&x).unwrap();
        assert_eq!(s.row(1), &[4.0, 3.0, 4.0]);
        let f = Covariates::from_columns(&[vec![1.0, 3.0, 5.0], vec![2.0, 4.0, 6.0]]).unwrap();
        assert_eq!(f, x);
    }

    #[test]
    fn dataset_rejects_length_mismatch() {
        let x = Covariates::empty(3);
        assert!(matches!(
            Dataset::new(vec![1.0, 2.0], x),
            Err(Error::LengthMismatch(2, 3))
        ));
    }
}
