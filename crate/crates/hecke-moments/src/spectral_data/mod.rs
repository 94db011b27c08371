//! Maass-form eigendata: ingestion, Hecke relations, weighted spectral sums and the
//! Kloosterman-side sums of the trace formula.
//!
//! Eigendata is consumed, never computed. Only prime Hecke eigenvalues are read; composite
//! ones are derived, so multiplicativity holds by construction and any composite column in
//! the input is checked against the derived value.

mod sums;
mod trace;

use std::path::Path;

use serde::Serialize;

use crate::error::{HeckeError, Result};
use crate::precision::PrecisionContext;
use crate::special_functions::arith::{gcd, primes_up_to};

pub use sums::{first_moment_bound_chain, second_moment_ratio, spectral_sum, FirstMomentChain, SecondMomentRatio, SpectralWeight};
pub use trace::{m_pm_partial, trace_rhs, trace_rhs_summed, trace_rhs_with, MpmPartial, TraceRhs, PSI_ALPHA, PSI_ENVELOPE_ALPHA};

/// Tolerance for composite columns and for the Hecke relations at ingestion.
pub const INGEST_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaassFormRecord {
    pub kappa: f64,
    pub alpha: f64,
    pub parity: i8,
    /// `t(n)` at index `n`; index 0 is unused and `t(1) = 1`.
    pub hecke: Vec<f64>,
    pub central_value: f64,
}

impl MaassFormRecord {
    /// Record with composite eigenvalues derived from `primes`, given as `(p, t(p))`.
    pub fn from_primes(kappa: f64, alpha: f64, parity: i8, central_value: f64, primes: &[(u64, f64)], n_max: usize) -> Self {
        MaassFormRecord { kappa, alpha, parity, hecke: derive_hecke(primes, n_max), central_value }
    }

    pub fn n_max(&self) -> usize {
        self.hecke.len().saturating_sub(1)
    }

    pub fn t(&self, n: usize) -> f64 {
        self.hecke[n]
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.parity != 1 && self.parity != -1 {
            return Err(format!("parity must be +1 or -1, got {}", self.parity));
        }
        if !(self.central_value >= 0.0 && self.central_value.is_finite()) {
            return Err(format!("central value must be nonnegative, got {}", self.central_value));
        }
        if self.parity == -1 && self.central_value != 0.0 {
            return Err(format!("odd form with nonzero central value {}", self.central_value));
        }
        Ok(())
    }
}

/// Eigenvalues up to `n_max` from prime values: `t(p^{k+1}) = t(p) t(p^k) - t(p^{k-1})` and
/// multiplicativity over coprime factors.
pub fn derive_hecke(primes: &[(u64, f64)], n_max: usize) -> Vec<f64> {
    let mut t = vec![f64::NAN; n_max + 1];
    if n_max >= 1 {
        t[1] = 1.0;
    }
    for &(p, tp) in primes {
        let p = p as usize;
        if p > n_max {
            continue;
        }
        let (mut prev, mut cur, mut q) = (1.0, tp, p);
        t[p] = tp;
        while q <= n_max / p {
            let next = tp * cur - prev;
            q *= p;
            t[q] = next;
            prev = cur;
            cur = next;
        }
    }
    for n in 2..=n_max {
        if !t[n].is_nan() {
            continue;
        }
        // split off the full power of the smallest prime factor
        let mut m = n;
        let mut q = 1;
        let p = (2..=n).find(|d| n % d == 0).expect("n >= 2 has a prime factor");
        while m % p == 0 {
            m /= p;
            q *= p;
        }
        t[n] = t[q] * t[m];
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeckeReport {
    pub check: String,
    pub max_violation: f64,
    pub passed: bool,
}

/// Largest violation of `t(m) t(n) = sum_{d | (m,n)} t(mn/d^2)` over `m n <= n_max`.
pub fn hecke_consistency(rec: &MaassFormRecord, tol: f64) -> HeckeReport {
    let n_max = rec.n_max();
    let mut worst: f64 = 0.0;
    for m in 1..=n_max {
        for n in m..=n_max / m {
            let g = gcd(m as i64, n as i64) as usize;
            let rhs: f64 = (1..=g).filter(|d| g % d == 0).map(|d| rec.t(m * n / (d * d))).sum();
            let v = (rec.t(m) * rec.t(n) - rhs).abs();
            if v.is_nan() {
                worst = f64::INFINITY;
            } else {
                worst = worst.max(v);
            }
        }
    }
    HeckeReport { check: format!("hecke relations for mn <= {}", n_max), max_violation: worst, passed: worst <= tol }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralDataset {
    /// Sorted by strictly increasing `kappa`.
    pub records: Vec<MaassFormRecord>,
    pub n_max: usize,
    pub source: String,
    /// The discrete spectrum is complete on `[0, complete_to]`.
    pub complete_to: f64,
}

impl SpectralDataset {
    pub fn empty(source: &str) -> Self {
        SpectralDataset { records: Vec::new(), n_max: 0, source: source.to_string(), complete_to: 0.0 }
    }

    /// Smallest `alpha` in the data.
    pub fn min_alpha(&self) -> Option<f64> {
        self.records.iter().map(|r| r.alpha).reduce(f64::min)
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Read a dataset from a CSV file; see [`parse_csv`] for the format.
pub fn ingest_csv(path: &Path, _ctx: &PrecisionContext) -> Result<SpectralDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| HeckeError::Io(format!("{}: {}", path.display(), e)))?;
    parse_csv(&text, &path.display().to_string())
}

/// Parse CSV text with header `kappa,alpha,parity,H_half,t2,t3,t5,...`.
///
/// Lines starting with `#` are comments; `# source: ...` and `# complete_to: ...` are recognised.
/// Without `complete_to` the data is taken to be complete up to its last `kappa`.
pub fn parse_csv(text: &str, origin: &str) -> Result<SpectralDataset> {
    let mut source = origin.to_string();
    let mut complete_to = None;
    for (i, line) in text.lines().enumerate() {
        let Some(c) = line.trim_start().strip_prefix('#') else { continue };
        if let Some((k, v)) = c.split_once(':') {
            match k.trim() {
                "source" => source = v.trim().to_string(),
                "complete_to" => {
                    let x: f64 = v.trim().parse().map_err(|_| HeckeError::Parse { line: i + 1, msg: format!("bad complete_to '{}'", v.trim()) })?;
                    complete_to = Some(x);
                }
                _ => {}
            }
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    // physical line numbers of the header and data rows; the csv reader does not count comments
    let rows: Vec<usize> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, _)| i + 1)
        .collect();
    let line_of = |record: u64| rows.get(record as usize).copied().unwrap_or(0);
    let Some(&header_line) = rows.first() else {
        let mut ds = SpectralDataset::empty(&source);
        ds.complete_to = complete_to.unwrap_or(0.0);
        return Ok(ds);
    };
    let headers = rdr.headers().map_err(|e| HeckeError::Parse { line: header_line, msg: e.to_string() })?.clone();
    let cols = Columns::from_headers(&headers, header_line)?;

    let mut records: Vec<MaassFormRecord> = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| HeckeError::Parse { line: e.position().map_or(0, |p| line_of(p.record())), msg: e.to_string() })?;
        let line = row.position().map_or(0, |p| line_of(p.record()));
        let idx = records.len();
        let num = |j: usize| -> Result<f64> {
            row[j].parse::<f64>().map_err(|_| HeckeError::Parse { line, msg: format!("column '{}': bad number '{}'", &headers[j], &row[j]) })
        };
        let kappa = num(cols.kappa)?;
        let alpha = num(cols.alpha)?;
        let parity_raw = num(cols.parity)?;
        let central = num(cols.h_half)?;
        let primes: Vec<(u64, f64)> = cols.primes.iter().map(|&(p, j)| Ok((p, num(j)?))).collect::<Result<_>>()?;
        let parity = if parity_raw == 1.0 { 1 } else if parity_raw == -1.0 { -1 } else { 0 };
        let rec = MaassFormRecord::from_primes(kappa, alpha, parity, central, &primes, cols.n_max);
        let bad = |msg: String| HeckeError::Invariant { record: idx, line, msg };
        rec.validate().map_err(bad)?;
        for &(n, j) in &cols.composites {
            let given = num(j)?;
            let v = (given - rec.t(n)).abs();
            if !(v <= INGEST_TOL * given.abs().max(1.0)) {
                return Err(bad(format!("t({}) = {} but the Hecke relations give {}", n, given, rec.t(n))));
            }
        }
        let rep = hecke_consistency(&rec, INGEST_TOL);
        if !rep.passed {
            return Err(bad(format!("{}: violation {:e}", rep.check, rep.max_violation)));
        }
        if let Some(prev) = records.last() {
            if !(rec.kappa > prev.kappa) {
                return Err(bad(format!("kappa {} not above the previous {}", rec.kappa, prev.kappa)));
            }
        }
        records.push(rec);
    }
    let last = records.last().map_or(0.0, |r| r.kappa);
    let complete_to = complete_to.unwrap_or(last);
    let n_max = if records.is_empty() { 0 } else { cols.n_max };
    Ok(SpectralDataset { records, n_max, source, complete_to })
}

struct Columns {
    kappa: usize,
    alpha: usize,
    parity: usize,
    h_half: usize,
    primes: Vec<(u64, usize)>,
    composites: Vec<(usize, usize)>,
    n_max: usize,
}

impl Columns {
    fn from_headers(h: &csv::StringRecord, line: usize) -> Result<Self> {
        let find = |name: &str| {
            h.iter().position(|c| c == name).ok_or_else(|| HeckeError::Parse { line, msg: format!("missing column '{}'", name) })
        };
        let (kappa, alpha, parity, h_half) = (find("kappa")?, find("alpha")?, find("parity")?, find("H_half")?);
        let mut indexed = Vec::new();
        for (j, c) in h.iter().enumerate() {
            if [kappa, alpha, parity, h_half].contains(&j) {
                continue;
            }
            let n = c
                .strip_prefix('t')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&n| n >= 2)
                .ok_or_else(|| HeckeError::Parse { line, msg: format!("unknown column '{}'", c) })?;
            indexed.push((n, j));
        }
        let largest = indexed.iter().map(|x| x.0).max().unwrap_or(1);
        let plist = primes_up_to(2 * largest + 2);
        let is_prime = |n: usize| plist.binary_search(&n).is_ok();
        // complete up to the first prime without a column
        let missing = plist.iter().copied().find(|p| !indexed.iter().any(|x| x.0 == *p));
        let n_max = missing.map_or(largest, |p| p - 1).max(1);
        let primes = indexed.iter().filter(|x| is_prime(x.0)).map(|&(n, j)| (n as u64, j)).collect();
        let mut composites = Vec::new();
        for &(n, j) in indexed.iter().filter(|x| !is_prime(x.0)) {
            if n > n_max {
                return Err(HeckeError::Parse { line, msg: format!("column t{} needs primes up to {}", n, n) });
            }
            composites.push((n, j));
        }
        Ok(Columns { kappa, alpha, parity, h_half, primes, composites, n_max })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = include_str!("../../data/sample_synthetic.csv");

    #[test]
    fn empty_file_gives_empty_dataset() {
        let ds = parse_csv("", "empty").unwrap();
        assert!(ds.is_empty());
        assert_eq!(ds.n_max, 0);
    }

    #[test]
    fn derived_t4_from_t2_equal_one() {
        let ds = parse_csv("kappa,alpha,parity,H_half,t2,t3\n9.5,1.0,1,0.5,1.0,0.2\n", "x").unwrap();
        let r = &ds.records[0];
        assert_eq!(ds.n_max, 4);
        assert_eq!(r.t(4), 0.0);
    }

    #[test]
    fn odd_form_with_central_value_rejected() {
        let e = parse_csv("kappa,alpha,parity,H_half,t2\n# note\n9.5,1.0,-1,0.3,0.1\n", "x").unwrap_err();
        match e {
            HeckeError::Invariant { record, line, .. } => assert_eq!((record, line), (0, 3)),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn bad_composite_and_order_rejected() {
        let txt = "kappa,alpha,parity,H_half,t2,t3,t4\n9.5,1.0,1,0.5,1.0,0.2,0.5\n";
        assert!(matches!(parse_csv(txt, "x"), Err(HeckeError::Invariant { .. })));
        let txt = "kappa,alpha,parity,H_half,t2\n9.5,1.0,1,0.5,1.0\n9.5,1.0,1,0.5,1.0\n";
        assert!(matches!(parse_csv(txt, "x"), Err(HeckeError::Invariant { record: 1, line: 3, .. })));
        let txt = "kappa,alpha,parity,H_half,t2\n9.5,1.0,1,abc,1.0\n";
        assert!(matches!(parse_csv(txt, "x"), Err(HeckeError::Parse { line: 2, .. })));
    }

    #[test]
    fn hecke_relation_examples() {
        let primes: Vec<(u64, f64)> = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29].iter().map(|&p| (p, (p as f64).sin() * 1.9)).collect();
        let r = MaassFormRecord::from_primes(10.0, 1.0, 1, 0.0, &primes, 30);
        assert!((r.t(2) * r.t(3) - r.t(6)).abs() < 1e-14);
        assert!((r.t(2) * r.t(2) - r.t(4) - 1.0).abs() < 1e-14);
        assert!((r.t(4) * r.t(6) - r.t(24) - r.t(6)).abs() < 1e-14);
        assert!(hecke_consistency(&r, 1e-12).passed);
    }

    #[test]
    fn bundled_sample_loads() {
        let ds = parse_csv(SAMPLE, "sample").unwrap();
        assert!(ds.source.contains("synthetic"));
        assert!(ds.records.len() >= 10);
        assert!(ds.n_max >= 24);
        assert!(ds.complete_to >= ds.records.last().unwrap().kappa);
        for r in &ds.records {
            assert!(hecke_consistency(r, 1e-6).passed);
        }
    }
}
