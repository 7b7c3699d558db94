//! Small statistics helpers shared by the samplers and experiment drivers.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Result of a chi-square test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    fn from_statistic(statistic: f64, dof: usize) -> Self {
        let p_value = if dof == 0 {
            1.0
        } else {
            let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
            dist.sf(statistic)
        };
        ChiSquareTest {
            statistic,
            dof,
            p_value,
        }
    }
}

/// Goodness of fit of `observed` counts against probabilities `expected`.
///
/// Cells are visited in order of decreasing expected count and pooled until
/// each pooled cell expects at least `min_expected` hits.
pub fn chi_square_gof(observed: &[u64], expected: &[f64], min_expected: f64) -> ChiSquareTest {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let mut order: Vec<usize> = (0..observed.len()).collect();
    order.sort_by(|&a, &b| expected[b].total_cmp(&expected[a]));
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for k in order {
        obs += observed[k] as f64;
        exp += expected[k] * total as f64;
        if exp >= min_expected {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    let statistic = cells
        .iter()
        .map(|&(o, e)| {
            if e > 0.0 {
                (o - e).powi(2) / e
            } else if o > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    ChiSquareTest::from_statistic(statistic, cells.len().saturating_sub(1))
}

/// Two-sample chi-square homogeneity test on integer-valued samples.
///
/// Values are binned individually, then adjacent bins are merged from the
/// low end until every merged bin has pooled expected count at least
/// `min_expected` in both samples.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_expected: f64) -> ChiSquareTest {
    let max = a.iter().chain(b).copied().max().unwrap_or(0) as usize;
    let mut ha = vec![0f64; max + 1];
    let mut hb = vec![0f64; max + 1];
    for &x in a {
        ha[x as usize] += 1.0;
    }
    for &x in b {
        hb[x as usize] += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for k in 0..=max {
        ca += ha[k];
        cb += hb[k];
        let pooled = ca + cb;
        if pooled * na.min(nb) / n >= min_expected {
            bins.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => bins.push((ca, cb)),
        }
    }
    let mut statistic = 0.0;
    for &(oa, ob) in &bins {
        let pooled = oa + ob;
        let ea = pooled * na / n;
        let eb = pooled * nb / n;
        statistic += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    ChiSquareTest::from_statistic(statistic, bins.len().saturating_sub(1))
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    })
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mx = mean(x).unwrap_or(0.0);
    let my = mean(y).unwrap_or(0.0);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_slope(&lx, &ly)
}
