//! Rate tables comparing FTP against a traditional baseline, as CSV.

use std::fmt::Write as _;
use std::io;
use std::str::FromStr;

use ftp_sdmm_core::analysis::{
    aspect, download_ratio, ftp_rate, group_sizes, mital_rate, AnalysisError, RateForm, RateParams,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

pub const CSV_HEADER: [&str; 11] =
    ["a", "b", "c", "L", "T", "primes", "N_L", "ftp_rate", "baseline", "baseline_rate", "winner"];

#[derive(Debug, thiserror::Error)]
pub enum RatesError {
    #[error("bad grid point {0:?}: expected a,b,c,L,T,p1;p2;...")]
    BadGrid(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad csv row: {0}")]
    BadRow(String),
}

/// One `(a, b, c, L, T, primes)` point of a rate grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPoint {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub l: u64,
    pub t: u64,
    pub primes: Vec<u64>,
}

impl FromStr for GridPoint {
    type Err = RatesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RatesError::BadGrid(s.to_string());
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(bad());
        }
        let num = |x: &str| x.parse::<u64>().map_err(|_| bad());
        let primes = parts[5].split(';').map(|p| num(p.trim())).collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            a: num(parts[0])?,
            b: num(parts[1])?,
            c: num(parts[2])?,
            l: num(parts[3])?,
            t: num(parts[4])?,
            primes,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Baseline {
    /// Secure MatDot with the same `L` and `T`: `N′ = 2L + 2T − 1`.
    Matdot,
    /// The published `L = 3, T = 2` rate `(7((ab+bc)/(3ac)+1))^{-1}`.
    Mital,
    /// The three-server traditional code: `ac / (3ab + 3bc + 3ac)`.
    Section3,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::Matdot => "matdot",
            Baseline::Mital => "mital",
            Baseline::Section3 => "section3",
        }
    }

    pub fn rate(self, p: &GridPoint) -> Result<BigRational, AnalysisError> {
        match self {
            Baseline::Matdot => Ok(RateForm::traditional(2 * p.l + 2 * p.t - 1, p.l)?.eval(&aspect(p.a, p.b, p.c))),
            Baseline::Mital => Ok(mital_rate(p.a, p.b, p.c)),
            Baseline::Section3 => Ok(RateForm::traditional(3, 1)?.eval(&aspect(p.a, p.b, p.c))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateRow {
    pub point: GridPoint,
    pub n_l: u64,
    pub ftp_rate: BigRational,
    pub baseline: String,
    pub baseline_rate: BigRational,
    pub winner: String,
    /// `Σ N_i / p_i`; shown in the table only.
    pub download_ratio: BigRational,
}

pub fn rate_rows(points: &[GridPoint], baseline: Baseline) -> Result<Vec<RateRow>, RatesError> {
    points
        .iter()
        .map(|p| {
            let params = RateParams::new(p.a, p.b, p.c, p.l, p.t, &p.primes);
            let ftp = ftp_rate(&params)?;
            let base = baseline.rate(p)?;
            let winner = match ftp.cmp(&base) {
                std::cmp::Ordering::Greater => "ftp",
                std::cmp::Ordering::Less => "baseline",
                std::cmp::Ordering::Equal => "tie",
            };
            Ok(RateRow {
                point: p.clone(),
                n_l: *group_sizes(p.l, p.t, &p.primes).last().unwrap(),
                ftp_rate: ftp,
                baseline: baseline.name().to_string(),
                baseline_rate: base,
                winner: winner.to_string(),
                download_ratio: download_ratio(p.l, p.t, &p.primes)?,
            })
        })
        .collect()
}

/// `num/den`, also when the denominator is 1.
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    (d != BigInt::from(0)).then(|| BigRational::new(n, d))
}

fn join_primes(primes: &[u64]) -> String {
    primes.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

pub fn write_csv<W: io::Write>(rows: &[RateRow], out: W) -> Result<(), RatesError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let p = &r.point;
        w.write_record([
            p.a.to_string(),
            p.b.to_string(),
            p.c.to_string(),
            p.l.to_string(),
            p.t.to_string(),
            join_primes(&p.primes),
            r.n_l.to_string(),
            fmt_rational(&r.ftp_rate),
            r.baseline.clone(),
            fmt_rational(&r.baseline_rate),
            r.winner.clone(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Parses a table written by [`write_csv`]. The download-ratio column is
/// recomputed since the CSV does not carry it.
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<RateRow>, RatesError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(RatesError::BadRow(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let bad = || RatesError::BadRow(rec.iter().collect::<Vec<_>>().join(","));
        let num = |i: usize| rec[i].parse::<u64>().map_err(|_| bad());
        let rat = |i: usize| parse_rational(&rec[i]).ok_or_else(bad);
        let primes = rec[5].split(';').map(|p| p.parse::<u64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
        let point = GridPoint { a: num(0)?, b: num(1)?, c: num(2)?, l: num(3)?, t: num(4)?, primes };
        rows.push(RateRow {
            download_ratio: download_ratio(point.l, point.t, &point.primes)?,
            point,
            n_l: num(6)?,
            ftp_rate: rat(7)?,
            baseline: rec[8].to_string(),
            baseline_rate: rat(9)?,
            winner: rec[10].to_string(),
        });
    }
    Ok(rows)
}

/// Human-readable table, with the `ΣN_i/p_i` column added.
pub fn format_table(rows: &[RateRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:>5} {:>5} {:>3} {:>3} {:<12} {:>5} {:>14} {:>12} {:>14} {:>12} {:<8}",
        "a", "b", "c", "L", "T", "primes", "N_L", "sum N_i/p_i", "ftp_rate", "", "baseline", "winner"
    );
    for r in rows {
        let p = &r.point;
        let approx = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{:>5} {:>5} {:>5} {:>3} {:>3} {:<12} {:>5} {:>14} {:>12} {:>14} {:>12} {:<8}",
            p.a,
            p.b,
            p.c,
            p.l,
            p.t,
            join_primes(&p.primes),
            r.n_l,
            fmt_rational(&r.download_ratio),
            fmt_rational(&r.ftp_rate),
            format!("({:.5})", approx(&r.ftp_rate)),
            fmt_rational(&r.baseline_rate),
            r.winner,
        );
    }
    out
}
