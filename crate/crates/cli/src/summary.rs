//! Per-point aggregation of runtime records and their CSV forms.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use qsc_core::prs::{HaltReason, RuntimeRecord};
use qsc_core::stats::{mean, median};

use crate::error::CliError;

pub const RAW_HEADER: [&str; 9] = [
    "graph_class",
    "n",
    "d",
    "lambda",
    "alpha",
    "seed",
    "trial",
    "rounds",
    "halted_by",
];
pub const SUMMARY_HEADER: [&str; 8] = [
    "n",
    "d",
    "lambda",
    "alpha",
    "mean_rounds",
    "median_rounds",
    "censored_count",
    "trials",
];

/// Statistics of one (n, d, λ, α) grid point. Censored trials are left out
/// of the mean and median and counted separately.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    /// `None` when the sweep ran without α-halting.
    pub alpha: Option<f64>,
    pub mean_rounds: Option<f64>,
    pub median_rounds: Option<f64>,
    pub censored_count: u64,
    pub trials: u64,
}

/// Records carry α = 0 when α-halting is off.
fn record_alpha(r: &RuntimeRecord) -> Option<f64> {
    (r.alpha > 0.0).then_some(r.alpha)
}

/// Groups by (d, λ, α, n) in ascending order.
pub fn summarize(records: &[RuntimeRecord]) -> Vec<SummaryRow> {
    type Key = (usize, u64, u64, usize);
    let key = |r: &RuntimeRecord| -> Key {
        // total order on non-negative floats via their bit patterns
        (r.d, r.lambda.to_bits(), r.alpha.to_bits(), r.n)
    };
    let mut groups: BTreeMap<Key, Vec<&RuntimeRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(key(r)).or_default().push(r);
    }
    groups
        .into_values()
        .map(|group| {
            let first = group[0];
            let kept: Vec<f64> = group
                .iter()
                .filter(|r| !r.halted_by.is_censored())
                .map(|r| r.rounds as f64)
                .collect();
            SummaryRow {
                n: first.n,
                d: first.d,
                lambda: first.lambda,
                alpha: record_alpha(first),
                mean_rounds: mean(&kept),
                median_rounds: median(&kept),
                censored_count: (group.len() - kept.len()) as u64,
                trials: group.len() as u64,
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt(field: &str, what: &str) -> Result<Option<f64>, CliError> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| CliError::Config(format!("summary column {what}: cannot parse {field:?}")))
}

pub fn write_raw<W: Write>(out: W, records: &[RuntimeRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RAW_HEADER)?;
    for r in records {
        w.write_record([
            r.graph_class.clone(),
            r.n.to_string(),
            r.d.to_string(),
            r.lambda.to_string(),
            opt(record_alpha(r)),
            r.seed.to_string(),
            r.trial.to_string(),
            r.rounds.to_string(),
            r.halted_by.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.d.to_string(),
            r.lambda.to_string(),
            opt(r.alpha),
            opt(r.mean_rounds),
            opt(r.median_rounds),
            r.censored_count.to_string(),
            r.trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>, CliError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(SUMMARY_HEADER) {
        return Err(CliError::Config(format!(
            "unexpected summary header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let int = |i: usize| -> Result<u64, CliError> {
            rec[i].parse().map_err(|_| {
                CliError::Config(format!("summary line {line}: bad integer {:?}", &rec[i]))
            })
        };
        rows.push(SummaryRow {
            n: int(0)? as usize,
            d: int(1)? as usize,
            lambda: parse_opt(&rec[2], "lambda")?
                .ok_or_else(|| CliError::Config(format!("summary line {line}: missing lambda")))?,
            alpha: parse_opt(&rec[3], "alpha")?,
            mean_rounds: parse_opt(&rec[4], "mean_rounds")?,
            median_rounds: parse_opt(&rec[5], "median_rounds")?,
            censored_count: int(6)?,
            trials: int(7)?,
        });
    }
    Ok(rows)
}

/// Reads a raw per-trial CSV back into records.
pub fn read_raw<R: Read>(input: R) -> Result<Vec<RuntimeRecord>, CliError> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let field = |i: usize| -> Result<&str, CliError> {
            rec.get(i)
                .ok_or_else(|| CliError::Config(format!("raw line {line}: missing column {i}")))
        };
        let num = |i: usize| -> Result<f64, CliError> {
            field(i)?
                .parse()
                .map_err(|_| CliError::Config(format!("raw line {line}: bad number in column {i}")))
        };
        let halted_by = match field(8)? {
            "full" => HaltReason::Full,
            "alpha" => HaltReason::AlphaFraction,
            "max_rounds" => HaltReason::MaxRounds,
            other => {
                return Err(CliError::Config(format!(
                    "raw line {line}: unknown halt {other:?}"
                )))
            }
        };
        out.push(RuntimeRecord {
            graph_class: field(0)?.to_string(),
            n: num(1)? as usize,
            d: num(2)? as usize,
            lambda: num(3)?,
            alpha: parse_opt(field(4)?, "alpha")?.unwrap_or(0.0),
            seed: field(5)?
                .parse()
                .map_err(|_| CliError::Config(format!("raw line {line}: bad seed")))?,
            trial: num(6)? as u64,
            rounds: num(7)? as u64,
            halted_by,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize, rounds: u64, halted_by: HaltReason) -> RuntimeRecord {
        RuntimeRecord {
            graph_class: "regular".into(),
            n,
            d: 3,
            lambda: 1.0,
            alpha: 0.0,
            seed: 0,
            trial: 0,
            rounds,
            halted_by,
        }
    }

    #[test]
    fn single_record() {
        let rows = summarize(&[rec(4, 5, HaltReason::Full)]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_rounds, Some(5.0));
        assert_eq!(rows[0].median_rounds, Some(5.0));
    }

    #[test]
    fn mean_and_median() {
        let rows = summarize(&[
            rec(4, 1, HaltReason::Full),
            rec(4, 2, HaltReason::Full),
            rec(4, 100, HaltReason::Full),
        ]);
        assert!((rows[0].mean_rounds.unwrap() - 34.333_333).abs() < 1e-5);
        assert_eq!(rows[0].median_rounds, Some(2.0));
    }

    #[test]
    fn all_censored() {
        let rows = summarize(&[
            rec(4, 9, HaltReason::MaxRounds),
            rec(4, 9, HaltReason::MaxRounds),
        ]);
        assert_eq!(rows[0].mean_rounds, None);
        assert_eq!(rows[0].median_rounds, None);
        assert_eq!(rows[0].censored_count, 2);
        assert_eq!(rows[0].trials, 2);
    }

    #[test]
    fn ordering_is_by_degree_lambda_alpha_size() {
        let mut a = rec(8, 1, HaltReason::Full);
        a.lambda = 0.5;
        let rows = summarize(&[rec(16, 1, HaltReason::Full), rec(8, 1, HaltReason::Full), a]);
        let keys: Vec<_> = rows.iter().map(|r| (r.lambda, r.n)).collect();
        assert_eq!(keys, vec![(0.5, 8), (1.0, 8), (1.0, 16)]);
    }
}
