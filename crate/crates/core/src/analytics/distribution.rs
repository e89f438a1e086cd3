use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BinSpec {
    /// One bin per distinct value.
    Distinct,
    /// Inclusive upper bounds, ascending. Values above the last bound get a
    /// final bin bounded by the maximum.
    Edges { upper_bounds: Vec<f64> },
    /// `count` equal-width bins between the minimum and maximum.
    Uniform { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub variable: String,
    pub n: usize,
    pub bins: Vec<Bin>,
    pub cdf: Vec<f64>,
    pub mean: f64,
    /// Mean of the two middle values for even `n`.
    pub median: f64,
    /// Smallest of the most frequent values.
    pub mode: f64,
}

/// Histogram, cumulative fractions and central tendency. `None` for an empty
/// sample.
pub fn distribution(variable: &str, values: &[f64], spec: &BinSpec) -> Option<Distribution> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[n - 1];

    let bounds: Vec<f64> = match spec {
        BinSpec::Distinct => {
            let mut b = sorted.clone();
            b.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
            b
        }
        BinSpec::Edges { upper_bounds } => {
            let mut b = upper_bounds.clone();
            if b.last().is_none_or(|&last| last < max) {
                b.push(max);
            }
            b
        }
        BinSpec::Uniform { count } => {
            let k = (*count).max(1);
            let width = (max - min) / k as f64;
            let mut b: Vec<f64> = (1..k).map(|i| min + width * i as f64).collect();
            b.push(max);
            b
        }
    };

    let mut counts = vec![0usize; bounds.len()];
    let mut bin = 0;
    for v in &sorted {
        while bin + 1 < bounds.len() && *v > bounds[bin] {
            bin += 1;
        }
        counts[bin] += 1;
    }
    let mut cumulative = 0;
    let cdf = counts
        .iter()
        .map(|c| {
            cumulative += c;
            cumulative as f64 / n as f64
        })
        .collect();

    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };

    let mut mode = sorted[0];
    let mut best = 0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && sorted[j].total_cmp(&sorted[i]) == Ordering::Equal {
            j += 1;
        }
        if j - i > best {
            best = j - i;
            mode = sorted[i];
        }
        i = j;
    }

    Some(Distribution {
        variable: variable.to_string(),
        n,
        bins: bounds
            .into_iter()
            .zip(counts)
            .map(|(upper, count)| Bin { upper, count })
            .collect(),
        cdf,
        mean: values.iter().sum::<f64>() / n as f64,
        median,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample() {
        let d = distribution("x", &[3.0, 3.0, 3.0], &BinSpec::Distinct).unwrap();
        assert_eq!(d.mode, 3.0);
        assert_eq!(*d.cdf.last().unwrap(), 1.0);
        assert_eq!(d.bins, vec![Bin { upper: 3.0, count: 3 }]);
    }

    #[test]
    fn even_median() {
        let d = distribution("x", &[4.0, 1.0, 3.0, 2.0], &BinSpec::Distinct).unwrap();
        assert_eq!(d.median, 2.5);
        assert_eq!(d.mean, 2.5);
        assert_eq!(d.mode, 1.0);
    }

    #[test]
    fn edges_with_overflow() {
        let d = distribution(
            "x",
            &[1.0, 5.0, 9.0, 12.0],
            &BinSpec::Edges {
                upper_bounds: vec![4.0, 9.0],
            },
        )
        .unwrap();
        let counts: Vec<_> = d.bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, [1, 2, 1]);
        assert_eq!(d.bins[2].upper, 12.0);
        assert_eq!(d.cdf, vec![0.25, 0.75, 1.0]);
    }

    #[test]
    fn uniform_bins() {
        let d = distribution("x", &[0.0, 0.5, 1.0, 2.0], &BinSpec::Uniform { count: 2 }).unwrap();
        let counts: Vec<_> = d.bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, [3, 1]);
    }

    #[test]
    fn empty_sample() {
        assert!(distribution("x", &[], &BinSpec::Distinct).is_none());
    }
}
