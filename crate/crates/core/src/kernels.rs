//! Normalized averaging kernels on `{-n, …, n}` and their Chebyshev
//! polynomials `p_u(x) = u(0) + Σ 2u(k)·T_k(x)`.

use std::io::{Read, Write};
use std::path::Path;

use crate::chebyshev::ChebSeries;
use crate::error::{Error, Result};
use crate::extremal::{build_solution, MAX_DEGREE};
use crate::format::sig17;

/// Normalization (and symmetry) band accepted by the checked constructors
/// and the kernel file reader.
pub const KERNEL_TOL: f64 = 1e-9;

/// Anything that can be convolved against a signal.
pub trait Kernel {
    fn half_width(&self) -> usize;

    /// `u(k)`, zero outside `{-n, …, n}`.
    fn weight(&self, k: isize) -> f64;

    /// Weights for `k = -n..=n`.
    fn full_weights(&self) -> Vec<f64> {
        let n = self.half_width() as isize;
        (-n..=n).map(|k| self.weight(k)).collect()
    }

    /// `|û(ξ)| = |Σ_k u(k)·e^{-ikξ}|`.
    fn transfer_abs(&self, xi: f64) -> f64 {
        let n = self.half_width() as isize;
        let (mut re, mut im) = (0.0, 0.0);
        for k in -n..=n {
            let (s, c) = (k as f64 * xi).sin_cos();
            let w = self.weight(k);
            re += w * c;
            im -= w * s;
        }
        re.hypot(im)
    }

    fn is_symmetric(&self) -> bool;
}

/// A kernel with `u(k) = u(-k)`, stored as `w_0..w_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricKernel {
    weights: Vec<f64>,
}

impl SymmetricKernel {
    /// From half-width weights `w_0..w_n`; checks `w_0 + 2Σw_k = 1`.
    pub fn from_half_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidKernel("no weights".into()));
        }
        check_finite(&weights)?;
        let k = SymmetricKernel { weights };
        check_normalized(k.total())?;
        Ok(k)
    }

    fn from_trusted(weights: Vec<f64>) -> Self {
        SymmetricKernel { weights }
    }

    pub fn half_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_0 + 2·Σ w_k`.
    pub fn total(&self) -> f64 {
        self.weights[0] + 2.0 * self.weights[1..].iter().sum::<f64>()
    }

    /// `û(ξ) = u(0) + 2Σ u(k)·cos(kξ)`, real for symmetric kernels.
    pub fn cosine_series(&self, xi: f64) -> f64 {
        self.weights[0]
            + 2.0
                * self.weights[1..]
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * ((i + 1) as f64 * xi).cos())
                    .sum::<f64>()
    }

    pub fn to_general(&self) -> GeneralKernel {
        GeneralKernel {
            half_width: self.half_width(),
            weights: self.full_weights(),
        }
    }
}

impl Kernel for SymmetricKernel {
    fn half_width(&self) -> usize {
        self.weights.len() - 1
    }

    fn weight(&self, k: isize) -> f64 {
        self.weights.get(k.unsigned_abs()).copied().unwrap_or(0.0)
    }

    fn transfer_abs(&self, xi: f64) -> f64 {
        self.cosine_series(xi).abs()
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

/// A normalized kernel with no symmetry assumption, weights for `k = -n..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralKernel {
    half_width: usize,
    weights: Vec<f64>,
}

impl GeneralKernel {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() % 2 == 0 {
            return Err(Error::InvalidKernel(format!(
                "expected an odd number of weights for k = -n..n, got {}",
                weights.len()
            )));
        }
        check_finite(&weights)?;
        check_normalized(weights.iter().sum())?;
        Ok(GeneralKernel {
            half_width: weights.len() / 2,
            weights,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Interpret as symmetric if `|u(k) - u(-k)| ≤ tol` for every `k`.
    pub fn to_symmetric(&self, tol: f64) -> Result<SymmetricKernel> {
        let n = self.half_width;
        for k in 1..=n {
            let (a, b) = (self.weights[n + k], self.weights[n - k]);
            if (a - b).abs() > tol {
                return Err(Error::InvalidKernel(format!(
                    "not symmetric: u({k}) = {a} but u(-{k}) = {b}"
                )));
            }
        }
        Ok(symmetrize(self))
    }
}

impl Kernel for GeneralKernel {
    fn half_width(&self) -> usize {
        self.half_width
    }

    fn weight(&self, k: isize) -> f64 {
        let idx = k + self.half_width as isize;
        if idx < 0 {
            return 0.0;
        }
        self.weights.get(idx as usize).copied().unwrap_or(0.0)
    }

    fn full_weights(&self) -> Vec<f64> {
        self.weights.clone()
    }

    fn is_symmetric(&self) -> bool {
        let n = self.half_width;
        (1..=n).all(|k| self.weights[n + k] == self.weights[n - k])
    }
}

fn check_finite(weights: &[f64]) -> Result<()> {
    match weights.iter().position(|w| !w.is_finite()) {
        Some(i) => Err(Error::InvalidKernel(format!("weight {i} is not finite"))),
        None => Ok(()),
    }
}

fn check_normalized(total: f64) -> Result<()> {
    if (total - 1.0).abs() > KERNEL_TOL {
        return Err(Error::InvalidKernel(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// `u(k) = 1/(2n+1)`.
pub fn constant_kernel(n: usize) -> SymmetricKernel {
    SymmetricKernel::from_trusted(vec![1.0 / (2 * n + 1) as f64; n + 1])
}

/// `u(k) = (n + 1 - |k|)/(n + 1)²`.
pub fn triangle_kernel(n: usize) -> SymmetricKernel {
    let denom = ((n + 1) * (n + 1)) as f64;
    SymmetricKernel::from_trusted((0..=n).map(|k| (n + 1 - k) as f64 / denom).collect())
}

/// Discrete Epanechnikov kernel `E_n(k) = 3(n² - k²)/(n(4n² - 1))`, `n ≥ 1`.
pub fn epanechnikov_kernel(n: usize) -> Result<SymmetricKernel> {
    if n == 0 {
        return Err(Error::Range {
            what: "Epanechnikov half-width",
            value: 0,
            range: "n >= 1",
        });
    }
    let nf = n as f64;
    let scale = 3.0 / (nf * (4.0 * nf * nf - 1.0));
    Ok(SymmetricKernel::from_trusted(
        (0..=n).map(|k| scale * (nf * nf - (k * k) as f64)).collect(),
    ))
}

/// The kernel minimizing `C_2(u)` among normalized kernels of half-width `n`.
///
/// Its polynomial `p_u` is the degree-`n` minimax polynomial `S`, so the
/// weights are read off the Chebyshev coefficients: `w_0 = c_0`,
/// `w_k = c_k / 2`.
pub fn optimal_kernel(n: usize) -> Result<SymmetricKernel> {
    if n > MAX_DEGREE {
        return Err(Error::Range {
            what: "half-width",
            value: n,
            range: "0..=4096",
        });
    }
    if n == 0 {
        return Ok(SymmetricKernel::from_trusted(vec![1.0]));
    }
    let sol = build_solution(n)?;
    Ok(from_polynomial(&sol.s))
}

/// Inverse of [`to_polynomial`]; no normalization check.
pub fn from_polynomial(p: &ChebSeries) -> SymmetricKernel {
    let c = p.coeffs();
    let mut w = Vec::with_capacity(c.len());
    w.push(c[0]);
    w.extend(c[1..].iter().map(|ck| ck / 2.0));
    SymmetricKernel::from_trusted(w)
}

/// `ũ(k) = (u(k) + u(-k))/2`.
pub fn symmetrize(u: &GeneralKernel) -> SymmetricKernel {
    let n = u.half_width;
    let w = &u.weights;
    let mut half = Vec::with_capacity(n + 1);
    half.push(w[n]);
    half.extend((1..=n).map(|k| 0.5 * (w[n + k] + w[n - k])));
    SymmetricKernel::from_trusted(half)
}

/// `p_u = [w_0, 2w_1, …, 2w_n]` in the Chebyshev basis.
pub fn to_polynomial(u: &SymmetricKernel) -> ChebSeries {
    let w = &u.weights;
    let mut c = Vec::with_capacity(w.len());
    c.push(w[0]);
    c.extend(w[1..].iter().map(|wk| 2.0 * wk));
    ChebSeries::new(c).expect("kernel weights are finite and non-empty")
}

/// Writes the `k,weight` table for `k = -n..=n`.
pub fn write_kernel_csv<K: Kernel + ?Sized, W: Write>(kernel: &K, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["k", "weight"])?;
    let n = kernel.half_width() as isize;
    for (k, w) in (-n..=n).zip(kernel.full_weights()) {
        wtr.write_record([k.to_string(), sig17(w)])?;
    }
    wtr.flush().map_err(|e| Error::io("<kernel output>", e))?;
    Ok(())
}

/// Parses a `k,weight` table. Rows must run over `k = -n..=n` in order and
/// the weights must sum to 1 within [`KERNEL_TOL`].
pub fn read_kernel_csv<R: Read>(input: R, source: &Path) -> Result<GeneralKernel> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "k" || &headers[1] != "weight" {
        return Err(Error::Parse {
            path: source.to_path_buf(),
            line: 1,
            message: format!("expected header `k,weight`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let parse_err = |line: u64, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut ks = Vec::new();
    let mut weights = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let k: i64 = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid offset `{}`", &record[0])))?;
        let w: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid weight `{}`", &record[1])))?;
        ks.push((k, line));
        weights.push(w);
    }
    if weights.is_empty() {
        return Err(parse_err(1, "kernel file has no rows".into()));
    }
    if weights.len() % 2 == 0 {
        return Err(parse_err(ks[ks.len() - 1].1, format!("{} rows cannot cover k = -n..n", weights.len())));
    }
    let n = (weights.len() / 2) as i64;
    for (i, &(k, line)) in ks.iter().enumerate() {
        let expected = i as i64 - n;
        if k != expected {
            return Err(parse_err(line, format!("expected offset {expected}, found {k}")));
        }
    }
    GeneralKernel::new(weights)
}

pub fn read_kernel_file(path: &Path) -> Result<GeneralKernel> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_kernel_csv(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_examples() {
        assert_eq!(constant_kernel(0).half_weights(), &[1.0]);
        let c1 = constant_kernel(1);
        assert_eq!(c1.half_weights(), &[1.0 / 3.0, 1.0 / 3.0]);
        assert!(constant_kernel(2).half_weights().iter().all(|w| (w - 0.2).abs() < 1e-16));
        for n in 0..100 {
            assert!((constant_kernel(n).total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(triangle_kernel(0).half_weights(), &[1.0]);
        assert_eq!(triangle_kernel(1).half_weights(), &[0.5, 0.25]);
        let t2 = triangle_kernel(2);
        assert_relative_eq!(t2.half_weights()[0], 3.0 / 9.0);
        assert_relative_eq!(t2.half_weights()[1], 2.0 / 9.0);
        assert_relative_eq!(t2.half_weights()[2], 1.0 / 9.0);
        for n in 0..100 {
            assert!((triangle_kernel(n).total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn epanechnikov_examples() {
        let e1 = epanechnikov_kernel(1).unwrap();
        assert_eq!(e1.half_weights(), &[1.0, 0.0]);
        let e2 = epanechnikov_kernel(2).unwrap();
        assert_relative_eq!(e2.half_weights()[0], 0.4, epsilon = 1e-15);
        assert_relative_eq!(e2.half_weights()[1], 0.3, epsilon = 1e-15);
        assert_eq!(e2.half_weights()[2], 0.0);
        assert!((epanechnikov_kernel(7).unwrap().total() - 1.0).abs() < 1e-12);
        for n in 1..200 {
            let e = epanechnikov_kernel(n).unwrap();
            assert!((e.total() - 1.0).abs() < 1e-12, "n={n}");
            assert_eq!(e.weight(n as isize), 0.0);
        }
        assert!(matches!(epanechnikov_kernel(0), Err(Error::Range { .. })));
    }

    #[test]
    fn optimal_examples() {
        assert_eq!(optimal_kernel(0).unwrap().half_weights(), &[1.0]);
        let u1 = optimal_kernel(1).unwrap();
        assert_relative_eq!(u1.half_weights()[0], 0.396_446_609_406_726_2, epsilon = 1e-12);
        assert_relative_eq!(u1.half_weights()[1], 0.301_776_695_296_636_9, epsilon = 1e-12);
        for n in 1..=64 {
            let u = optimal_kernel(n).unwrap();
            assert_eq!(u.half_width(), n);
            assert!((u.total() - 1.0).abs() <= 1e-10, "n={n}");
        }
        assert!(optimal_kernel(4097).is_err());
    }

    #[test]
    fn optimal_matches_quadrature() {
        // u_n(k) = (1/π)∫ S T_k dx/√(1-x²), by 10(n+1)-node Gauss–Chebyshev quadrature.
        for n in [1usize, 2, 3, 5, 8] {
            let sol = build_solution(n).unwrap();
            let u = optimal_kernel(n).unwrap();
            let m = 10 * (n + 1);
            for k in 0..=n {
                let quad: f64 = (0..m)
                    .map(|j| {
                        let theta = std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                        sol.s.eval(theta.cos()) * (k as f64 * theta).cos()
                    })
                    .sum::<f64>()
                    / m as f64;
                assert!((u.half_weights()[k] - quad).abs() < 1e-10, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn symmetrize_examples() {
        let u = GeneralKernel::new(vec![0.0, 0.3, 0.7]).unwrap();
        let s = symmetrize(&u);
        assert_relative_eq!(s.half_weights()[0], 0.3);
        assert_relative_eq!(s.half_weights()[1], 0.35);
        assert_eq!(s.full_weights(), vec![0.35, 0.3, 0.35]);

        let sym = triangle_kernel(3);
        assert_eq!(symmetrize(&sym.to_general()), sym);

        let mut delta = vec![0.0; 7];
        delta[6] = 1.0;
        let s = symmetrize(&GeneralKernel::new(delta).unwrap());
        assert_eq!(s.half_weights(), &[0.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn to_polynomial_examples() {
        let p = to_polynomial(&constant_kernel(1));
        assert_relative_eq!(p.coeffs()[0], 1.0 / 3.0);
        assert_relative_eq!(p.coeffs()[1], 2.0 / 3.0);
        assert_relative_eq!(p.eval(1.0), 1.0, epsilon = 1e-15);

        let p = to_polynomial(&triangle_kernel(1));
        assert_eq!(p.coeffs(), &[0.5, 0.5]);

        for n in [1usize, 4, 10] {
            let p = to_polynomial(&optimal_kernel(n).unwrap());
            let s = build_solution(n).unwrap().s;
            for (a, b) in p.coeffs().iter().zip(s.coeffs()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(GeneralKernel::new(vec![0.5, 0.5]).is_err());
        assert!(GeneralKernel::new(vec![0.5, 0.4, 0.0]).is_err());
        assert!(GeneralKernel::new(vec![f64::NAN, 1.0, 0.0]).is_err());
        assert!(SymmetricKernel::from_half_weights(vec![]).is_err());
        assert!(SymmetricKernel::from_half_weights(vec![0.5, 0.3]).is_err());
        assert!(SymmetricKernel::from_half_weights(vec![0.5, 0.25]).is_ok());
        let asym = GeneralKernel::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(asym.to_symmetric(1e-9).is_err());
        assert!(!asym.is_symmetric());
    }

    #[test]
    fn kernel_csv_round_trip() {
        let u = optimal_kernel(6).unwrap();
        let mut buf = Vec::new();
        write_kernel_csv(&u, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,weight\n-6,"));
        let back = read_kernel_csv(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back.full_weights(), u.full_weights());
        assert_eq!(back.to_symmetric(KERNEL_TOL).unwrap(), u);
    }

    #[test]
    fn kernel_csv_rejects_bad_input() {
        let p = Path::new("mem");
        assert!(read_kernel_csv("k,w\n0,1\n".as_bytes(), p).is_err());
        assert!(read_kernel_csv("k,weight\n".as_bytes(), p).is_err());
        assert!(read_kernel_csv("k,weight\n-1,0.5\n1,0.5\n".as_bytes(), p).is_err());
        assert!(read_kernel_csv("k,weight\n-1,0.5\n0,0.5\n1,0.5\n".as_bytes(), p).is_err());
        let err = read_kernel_csv("k,weight\n-1,0.25\n0,x\n1,0.25\n".as_bytes(), p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_kernel_csv("k,weight\n0,0.5\n1,0.25\n2,0.25\n".as_bytes(), p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    proptest! {
        #[test]
        fn symmetrize_normalized_and_idempotent(raw in prop::collection::vec(-1.0f64..1.0, 1..12)) {
            let mut w = raw.clone();
            if w.len() % 2 == 0 { w.push(0.5); }
            let sum: f64 = w.iter().sum();
            prop_assume!(sum.abs() > 0.05);
            let u = GeneralKernel::new(w.iter().map(|x| x / sum).collect()).unwrap();
            let s = symmetrize(&u);
            prop_assert!((s.total() - 1.0).abs() < 1e-12);
            prop_assert_eq!(symmetrize(&s.to_general()), s);
        }

        #[test]
        fn polynomial_round_trip(raw in prop::collection::vec(-1.0f64..1.0, 1..20)) {
            let u = SymmetricKernel::from_trusted(raw);
            prop_assert_eq!(from_polynomial(&to_polynomial(&u)), u);
        }
    }
}
