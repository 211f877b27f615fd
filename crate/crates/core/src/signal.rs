//! Finite real sequences standing in for `f: ℤ → ℝ`: forward differences,
//! convolution with boundary handling, and CSV column I/O.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::kernels::Kernel;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("time series must have at least one value".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("value {i} is not finite")));
        }
        Ok(TimeSeries { values, labels: None })
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                actual: labels.len(),
            });
        }
        let mut s = Self::new(values)?;
        s.labels = Some(labels);
        Ok(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// How samples outside the observed window are supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Mirror about the edge samples without repeating them (`c b | a b c | b a`).
    #[default]
    Reflect,
    /// Treat missing samples as zero.
    Zero,
    /// Repeat the edge samples.
    Extend,
    /// Only emit outputs whose window lies inside the data (length shrinks by `2n`).
    Valid,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reflect" => Ok(Boundary::Reflect),
            "zero" => Ok(Boundary::Zero),
            "extend" => Ok(Boundary::Extend),
            "valid" => Ok(Boundary::Valid),
            other => Err(Error::Precondition(format!("unknown boundary mode `{other}`"))),
        }
    }
}

fn reflect_index(i: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let r = i.rem_euclid(period);
    if r < len as isize {
        r as usize
    } else {
        (period - r) as usize
    }
}

/// `(u ∗ f)(k) = Σ_ℓ u(ℓ)·f(k - ℓ)` by direct summation.
pub fn convolve<K: Kernel + ?Sized>(u: &K, f: &TimeSeries, boundary: Boundary) -> Result<TimeSeries> {
    let n = u.half_width() as isize;
    let len = f.len();
    let weights = u.full_weights();
    let x = f.values();

    let sample = |i: isize| -> f64 {
        if (0..len as isize).contains(&i) {
            return x[i as usize];
        }
        match boundary {
            Boundary::Zero | Boundary::Valid => 0.0,
            Boundary::Extend => x[i.clamp(0, len as isize - 1) as usize],
            Boundary::Reflect => x[reflect_index(i, len)],
        }
    };
    let at = |k: isize| -> f64 {
        weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * sample(k - (j as isize - n)))
            .sum()
    };

    let range = match boundary {
        Boundary::Valid => {
            let needed = 2 * u.half_width() + 1;
            if len < needed {
                return Err(Error::Precondition(format!(
                    "valid convolution needs at least {needed} samples, got {len}"
                )));
            }
            n..len as isize - n
        }
        _ => 0..len as isize,
    };
    let values: Vec<f64> = range.clone().map(at).collect();
    let labels = f
        .labels()
        .map(|l| l[range.start as usize..range.end as usize].to_vec());
    Ok(TimeSeries { values, labels })
}

/// Full linear convolution of a finitely supported sequence: index `i` of
/// the result holds `(u ∗ f)(i - n)`, length `len + 2n`.
pub fn convolve_full<K: Kernel + ?Sized>(u: &K, f: &[f64]) -> Vec<f64> {
    let n = u.half_width();
    let weights = u.full_weights();
    let mut out = vec![0.0; f.len() + 2 * n];
    for (i, &fi) in f.iter().enumerate() {
        for (j, &w) in weights.iter().enumerate() {
            out[i + j] += w * fi;
        }
    }
    out
}

/// `D^m f` with `Df(k) = f(k+1) - f(k)`; the result is `m` samples shorter.
pub fn derivative(f: &TimeSeries, m: usize) -> Result<TimeSeries> {
    if m == 0 {
        return Err(Error::Precondition("derivative order must be at least 1".into()));
    }
    if f.len() < m + 1 {
        return Err(Error::Precondition(format!(
            "order-{m} difference needs at least {} samples, got {}",
            m + 1,
            f.len()
        )));
    }
    Ok(TimeSeries {
        values: forward_differences(f.values(), m),
        labels: None,
    })
}

pub(crate) fn forward_differences(x: &[f64], m: usize) -> Vec<f64> {
    let mut v = x.to_vec();
    for _ in 0..m {
        v = v.windows(2).map(|w| w[1] - w[0]).collect();
    }
    v
}

/// `‖f‖₂`.
pub fn l2_norm(f: &TimeSeries) -> f64 {
    l2(f.values())
}

pub(crate) fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A CSV file held as strings, for column extraction and replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    path: PathBuf,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    lines: Vec<u64>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, path)
    }

    pub fn from_reader<R: Read>(input: R, path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = rdr.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for record in rdr.records() {
            let record = record?;
            lines.push(record.position().map_or(0, |p| p.line()));
            rows.push(record.iter().map(str::to_owned).collect());
        }
        Ok(CsvTable {
            path: path.to_path_buf(),
            headers,
            rows,
            lines,
        })
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_owned(),
                path: self.path.clone(),
            })
    }

    /// Parses one column as decimal reals, naming the data row and file line
    /// of the first bad cell.
    pub fn column(&self, name: &str) -> Result<TimeSeries> {
        let idx = self.column_index(name)?;
        let mut values = Vec::with_capacity(self.rows.len());
        for (row, (cells, &line)) in self.rows.iter().zip(&self.lines).enumerate() {
            let cell = cells.get(idx).map(String::as_str).unwrap_or("");
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| Error::Parse {
                path: self.path.clone(),
                line,
                message: format!("row {}: cannot parse `{cell}` in column `{name}` as a number", row + 1),
            })?;
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::Parse {
                path: self.path.clone(),
                line: 1,
                message: "no data rows".into(),
            });
        }
        TimeSeries::new(values)
    }

    pub fn text_column(&self, name: &str) -> Result<Vec<String>> {
        let idx = self.column_index(name)?;
        Ok(self
            .rows
            .iter()
            .map(|r| r.get(idx).cloned().unwrap_or_default())
            .collect())
    }

    /// Replaces column `name` if present, appends it otherwise.
    pub fn set_column(&mut self, name: &str, values: &[f64]) -> Result<()> {
        if values.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                expected: self.rows.len(),
                actual: values.len(),
            });
        }
        let idx = match self.headers.iter().position(|h| h == name) {
            Some(i) => i,
            None => {
                self.headers.push(name.to_owned());
                self.headers.len() - 1
            }
        };
        for (row, v) in self.rows.iter_mut().zip(values) {
            if row.len() <= idx {
                row.resize(idx + 1, String::new());
            }
            row[idx] = sig17(*v);
        }
        Ok(())
    }

    /// Keeps only data rows `start..end`.
    pub fn retain_rows(&mut self, start: usize, end: usize) {
        self.rows.truncate(end);
        self.rows.drain(..start);
        self.lines.truncate(end);
        self.lines.drain(..start);
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().flexible(true).from_writer(out);
        wtr.write_record(&self.headers)?;
        for row in &self.rows {
            wtr.write_record(row)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

/// Reads one numeric column.
pub fn read_csv(path: &Path, column: &str) -> Result<TimeSeries> {
    CsvTable::read(path)?.column(column)
}

/// Reads a numeric column and a pass-through label column.
pub fn read_csv_labeled(path: &Path, column: &str, label_column: &str) -> Result<TimeSeries> {
    let table = CsvTable::read(path)?;
    let values = table.column(column)?.into_values();
    TimeSeries::with_labels(values, table.text_column(label_column)?)
}

/// Writes a header and one row per sample, labels first when present.
pub fn write_csv_to<W: Write>(out: W, series: &TimeSeries, column: &str) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    match series.labels() {
        Some(labels) => {
            wtr.write_record(["label", column])?;
            for (l, v) in labels.iter().zip(series.values()) {
                wtr.write_record([l.as_str(), &sig17(*v)])?;
            }
        }
        None => {
            wtr.write_record([column])?;
            for v in series.values() {
                wtr.write_record([sig17(*v)])?;
            }
        }
    }
    wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn write_csv(path: &Path, series: &TimeSeries, column: &str) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(std::io::BufWriter::new(file), series, column)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{constant_kernel, epanechnikov_kernel, optimal_kernel, triangle_kernel, GeneralKernel};
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn construction() {
        assert!(TimeSeries::new(vec![]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(TimeSeries::with_labels(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn identity_kernel_is_noop() {
        let f = ts(&[3.0, -1.0, 2.0, 7.5]);
        let id = constant_kernel(0);
        for b in [Boundary::Reflect, Boundary::Zero, Boundary::Extend, Boundary::Valid] {
            assert_eq!(convolve(&id, &f, b).unwrap(), f);
        }
    }

    #[test]
    fn three_term_average() {
        let out = convolve(&constant_kernel(1), &ts(&[0.0, 3.0, 0.0]), Boundary::Zero).unwrap();
        for v in out.values() {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_preserved_under_extend() {
        let f = ts(&[2.5; 40]);
        for u in [optimal_kernel(7).unwrap(), epanechnikov_kernel(5).unwrap(), triangle_kernel(3)] {
            let out = convolve(&u, &f, Boundary::Extend).unwrap();
            assert!(out.values().iter().all(|v| (v - 2.5).abs() < 1e-13));
        }
    }

    #[test]
    fn asymmetric_kernel_orientation() {
        // u(1) = 1 shifts right: (u ∗ f)(k) = f(k - 1).
        let u = GeneralKernel::new(vec![0.0, 0.0, 1.0]).unwrap();
        let out = convolve(&u, &ts(&[1.0, 2.0, 3.0, 4.0]), Boundary::Zero).unwrap();
        assert_eq!(out.values(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn boundary_modes() {
        let f = ts(&[1.0, 2.0, 4.0]);
        let shift_left = GeneralKernel::new(vec![1.0, 0.0, 0.0]).unwrap(); // f(k + 1)
        let r = convolve(&shift_left, &f, Boundary::Reflect).unwrap();
        assert_eq!(r.values(), &[2.0, 4.0, 2.0]);
        let e = convolve(&shift_left, &f, Boundary::Extend).unwrap();
        assert_eq!(e.values(), &[2.0, 4.0, 4.0]);
        let v = convolve(&constant_kernel(1), &f, Boundary::Valid).unwrap();
        assert_eq!(v.len(), 1);
        assert!(convolve(&constant_kernel(2), &f, Boundary::Valid).is_err());
        assert_eq!(reflect_index(-1, 3), 1);
        assert_eq!(reflect_index(3, 3), 1);
        assert_eq!(reflect_index(-7, 1), 0);
        // A wide kernel on a short signal still reflects into range.
        let wide = convolve(&constant_kernel(6), &f, Boundary::Reflect).unwrap();
        assert_eq!(wide.len(), 3);
    }

    #[test]
    fn valid_keeps_matching_labels() {
        let labels: Vec<String> = (0..5).map(|i| format!("t{i}")).collect();
        let f = TimeSeries::with_labels(vec![1.0; 5], labels).unwrap();
        let out = convolve(&constant_kernel(1), &f, Boundary::Valid).unwrap();
        assert_eq!(out.labels().unwrap(), &["t1", "t2", "t3"]);
    }

    #[test]
    fn derivative_examples() {
        let f = ts(&[1.0, 2.0, 4.0]);
        assert_eq!(derivative(&f, 1).unwrap().values(), &[1.0, 2.0]);
        assert_eq!(derivative(&f, 2).unwrap().values(), &[1.0]);
        let ramp = ts(&(0..20).map(|k| 3.0 * k as f64 - 1.0).collect::<Vec<_>>());
        assert!(derivative(&ramp, 2).unwrap().values().iter().all(|v| *v == 0.0));
        assert!(derivative(&f, 3).is_err());
        assert!(derivative(&f, 0).is_err());
    }

    #[test]
    fn second_difference_is_laplacian_stencil() {
        let f: Vec<f64> = (0..30).map(|k| ((k * k) as f64 * 0.37).sin()).collect();
        let d2 = derivative(&ts(&f), 2).unwrap();
        for (k, v) in d2.values().iter().enumerate() {
            assert_eq!(*v, (f[k + 2] - f[k + 1]) - (f[k + 1] - f[k]));
            assert!((v - (f[k + 2] - 2.0 * f[k + 1] + f[k])).abs() < 1e-14);
        }
    }

    #[test]
    fn l2_examples() {
        assert_eq!(l2_norm(&ts(&[0.0, 3.0, 4.0])), 5.0);
        assert_eq!(l2_norm(&ts(&[0.0, 0.0, 1.0, 0.0])), 1.0);
    }

    #[test]
    fn full_convolution_support() {
        let out = convolve_full(&constant_kernel(1), &[3.0]);
        assert_eq!(out, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn csv_read_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lake.csv");
        let mut text = String::from("time,level\n");
        for i in 0..14 {
            text.push_str(&format!("2024-01-{:02},{}\n", i + 1, 1000.0 + i as f64 * 0.1));
        }
        std::fs::write(&path, text).unwrap();
        let s = read_csv(&path, "level").unwrap();
        assert_eq!(s.len(), 14);
        let labeled = read_csv_labeled(&path, "level", "time").unwrap();
        assert_eq!(labeled.labels().unwrap()[0], "2024-01-01");

        let out = dir.path().join("out.csv");
        write_csv(&out, &labeled, "level").unwrap();
        let back = read_csv_labeled(&out, "level", "label").unwrap();
        assert_eq!(back, labeled);

        match read_csv(&path, "depth") {
            Err(Error::MissingColumn { column, .. }) => assert_eq!(column, "depth"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(read_csv(&dir.path().join("nope.csv"), "level"), Err(Error::Io { .. })));
    }

    #[test]
    fn csv_parse_error_names_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "level\n1.0\n2.0\nabc\n").unwrap();
        let err = read_csv(&path, "level").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3") && msg.contains("line 4") && msg.contains("abc"), "{msg}");
    }

    proptest! {
        #[test]
        fn csv_round_trip_lossless(v in prop::collection::vec(-1e12f64..1e12, 1..50)) {
            let s = TimeSeries::new(v).unwrap();
            let mut buf = Vec::new();
            write_csv_to(&mut buf, &s, "x").unwrap();
            let back = CsvTable::from_reader(&buf[..], Path::new("mem")).unwrap().column("x").unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
