//! Symbol sequences of utterance features and their bigram statistics.

use std::collections::BTreeMap;

use crate::{Error, Result, Vector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    pub symbols: Vec<u64>,
    pub bigrams: BTreeMap<(u64, u64), usize>,
}

/// Bin index of `x` among `bins` equal-width bins spanning `[lo, hi]`.
fn bin_of(x: f64, lo: f64, hi: f64, bins: u32) -> u64 {
    if hi <= lo {
        return 0;
    }
    let b = ((x - lo) / (hi - lo) * bins as f64).floor();
    (b.max(0.0) as u64).min(bins as u64 - 1)
}

/// Quantizes each ω coordinate into `bins` uniform bins over its observed
/// range; the symbol is the mixed-radix number of the bin vector, first
/// coordinate most significant.
pub fn symbolize_transcript(omega: &[Vector], bins: u32) -> Result<SymbolSequence> {
    if omega.is_empty() {
        return Err(Error::InvalidInput(
            "cannot symbolize an empty ω sequence".into(),
        ));
    }
    if bins == 0 {
        return Err(Error::InvalidInput("symbol_bins must be >= 1".into()));
    }
    let dim = omega[0].len();
    if let Some(bad) = omega.iter().find(|w| w.len() != dim) {
        return Err(Error::dims("ω", dim, bad.len()));
    }
    let ranges: Vec<(f64, f64)> = (0..dim)
        .map(|d| {
            omega
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| {
                    (lo.min(w[d]), hi.max(w[d]))
                })
        })
        .collect();
    let symbols: Vec<u64> = omega
        .iter()
        .map(|w| {
            ranges.iter().enumerate().fold(0u64, |acc, (d, &(lo, hi))| {
                acc * bins as u64 + bin_of(w[d], lo, hi, bins)
            })
        })
        .collect();
    let mut bigrams = BTreeMap::new();
    for pair in symbols.windows(2) {
        *bigrams.entry((pair[0], pair[1])).or_insert(0) += 1;
    }
    Ok(SymbolSequence { symbols, bigrams })
}
