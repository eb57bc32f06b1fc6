use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Target ranges for per-column affine normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Normalization {
    pub input_range: (f64, f64),
    pub output_range: (f64, f64),
}

impl Default for Normalization {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self { input_range: (-PI, PI), output_range: (0.03, 1.0) }
    }
}

/// `v ↦ scale·v + offset`, fitted from the column range. Evaluated as a
/// linear interpolation so the column extremes land on the range ends exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub scale: f64,
    pub offset: f64,
    pub source_min: f64,
    pub source_max: f64,
    pub target_min: f64,
    pub target_max: f64,
}

impl Affine {
    /// Maps `[min, max]` onto `range`. A constant column maps to the middle
    /// of `range` and has `scale = 0`.
    pub fn fit(min: f64, max: f64, range: (f64, f64)) -> Self {
        let (lo, hi) = range;
        if max > min {
            let scale = (hi - lo) / (max - min);
            let offset = lo - scale * min;
            Self { scale, offset, source_min: min, source_max: max, target_min: lo, target_max: hi }
        } else {
            let offset = 0.5 * (lo + hi);
            Self { scale: 0.0, offset, source_min: min, source_max: max, target_min: lo, target_max: hi }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.scale == 0.0
    }

    pub fn apply(&self, v: f64) -> f64 {
        if self.is_degenerate() {
            return self.offset;
        }
        let t = (v - self.source_min) / (self.source_max - self.source_min);
        (1.0 - t) * self.target_min + t * self.target_max
    }

    /// Inverse map; a degenerate column returns its constant value.
    pub fn invert(&self, u: f64) -> f64 {
        if self.is_degenerate() {
            self.source_min
        } else {
            let t = (u - self.target_min) / (self.target_max - self.target_min);
            (1.0 - t) * self.source_min + t * self.source_max
        }
    }
}

/// Affine parameters used to normalize a CSV dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub inputs: Vec<Affine>,
    pub output: Affine,
}

/// Reads a header-ed numeric CSV, selects columns by name and normalizes
/// each to the configured range.
pub fn load_csv_dataset<T: Real>(
    path: &Path,
    input_cols: &[String],
    output_col: &str,
    normalization: &Normalization,
) -> Result<(Dataset<T>, NormalizationRecord)> {
    let file = std::fs::File::open(path)?;
    read_csv_dataset(file, input_cols, output_col, normalization, &path.display().to_string())
}

/// [`load_csv_dataset`] over any reader.
pub fn read_csv_dataset<T: Real, R: std::io::Read>(
    reader: R,
    input_cols: &[String],
    output_col: &str,
    normalization: &Normalization,
    descriptor: &str,
) -> Result<(Dataset<T>, NormalizationRecord)> {
    if input_cols.is_empty() {
        return Err(Error::arg("at least one input column is required"));
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::arg(format!("column {name:?} not found")))
    };
    let in_idx = input_cols.iter().map(|c| find(c)).collect::<Result<Vec<_>>>()?;
    let out_idx = find(output_col)?;

    let mut raw_x: Vec<Vec<f64>> = Vec::new();
    let mut raw_y: Vec<f64> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse { line, message: e.to_string() }
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |i: usize| -> Result<f64> {
            let s = rec.get(i).unwrap_or("").trim();
            let v: f64 = s.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {:?}: {s:?} is not a number", &headers[i]),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse { line, message: format!("non-finite value {s:?}") })
            }
        };
        raw_x.push(in_idx.iter().map(|&i| cell(i)).collect::<Result<_>>()?);
        raw_y.push(cell(out_idx)?);
    }
    if raw_y.is_empty() {
        return Err(Error::arg("CSV has no data rows"));
    }

    let fit = |vals: &mut dyn Iterator<Item = f64>, range, name: &str| {
        let (min, max) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let a = Affine::fit(min, max, range);
        if a.is_degenerate() {
            log::warn!("column {name:?} is constant; mapped to the range midpoint");
        }
        a
    };
    let inputs: Vec<Affine> = (0..in_idx.len())
        .map(|m| fit(&mut raw_x.iter().map(|r| r[m]), normalization.input_range, &input_cols[m]))
        .collect();
    let output = fit(&mut raw_y.iter().copied(), normalization.output_range, output_col);

    let xs = raw_x
        .iter()
        .map(|r| r.iter().zip(&inputs).map(|(v, a)| T::lit(a.apply(*v))).collect())
        .collect();
    let ys = raw_y.iter().map(|v| T::lit(output.apply(*v))).collect();
    let data = Dataset::new(xs, ys, format!("csv:{descriptor}"))?;
    Ok((data, NormalizationRecord { inputs, output }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "a,b,y\n1,5,10\n3,5,20\n2,5,15\n";

    fn load(text: &str) -> Result<(Dataset<f64>, NormalizationRecord)> {
        read_csv_dataset(
            text.as_bytes(),
            &["a".to_string(), "b".to_string()],
            "y",
            &Normalization::default(),
            "test",
        )
    }

    #[test]
    fn endpoints_and_midpoint() {
        let (d, rec) = load(TEXT).unwrap();
        let pi = std::f64::consts::PI;
        assert_eq!(d.inputs[0][0], -pi);
        assert_eq!(d.inputs[1][0], pi);
        assert_eq!(d.outputs[0], 0.03);
        assert_eq!(d.outputs[1], 1.0);
        assert_eq!(d.inputs[0][1], 0.0);
        assert!(rec.inputs[1].is_degenerate());
        assert_eq!(rec.inputs[1].invert(0.0), 5.0);
    }

    #[test]
    fn round_trip() {
        let a = Affine::fit(-3.7, 12.25, (0.03, 1.0));
        for v in [-3.7, 0.0, 1.5, 12.25] {
            assert!((a.invert(a.apply(v)) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        match load("a,b,y\n1,2,3\n4,x,6\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("a,b,y\n1,2,3\n4,5\n"), Err(Error::Parse { line: 3, .. })));
        assert!(load("a,c,y\n1,2,3\n").is_err());
    }
}
