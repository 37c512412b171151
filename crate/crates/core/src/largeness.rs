//! Run, gap and window statistics of finite integer sets.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::bohr::TruncatedSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LargenessError {
    #[error("set is empty")]
    EmptySet,
}

/// Maximal block of consecutive integers `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Run {
    pub length: u64,
    pub start: u64,
    pub end: u64,
}

/// Largest distance between consecutive elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gap {
    pub gap: u64,
    pub from: u64,
    pub to: u64,
}

/// Longest stretch `[start, end]` whose consecutive gaps are all `≤ g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub g: u64,
    pub start: u64,
    pub end: u64,
    pub length: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LargenessReport {
    pub horizon: u64,
    pub size: usize,
    pub max_run: Run,
    pub max_gap: Option<Gap>,
    pub gap_histogram: BTreeMap<u64, u64>,
    pub windows: Vec<Window>,
}

pub fn run_gap_profile(s: &TruncatedSet) -> Result<LargenessReport, LargenessError> {
    let xs = s.elements();
    let first = *xs.first().ok_or(LargenessError::EmptySet)?;
    let mut max_run = Run {
        length: 1,
        start: first,
        end: first,
    };
    let mut run_start = first;
    let mut max_gap: Option<Gap> = None;
    let mut gap_histogram = BTreeMap::new();
    for w in xs.windows(2) {
        let gap = w[1] - w[0];
        *gap_histogram.entry(gap).or_insert(0) += 1;
        if max_gap.is_none_or(|g| gap > g.gap) {
            max_gap = Some(Gap {
                gap,
                from: w[0],
                to: w[1],
            });
        }
        if gap != 1 {
            run_start = w[1];
        }
        let length = w[1] - run_start + 1;
        if length > max_run.length {
            max_run = Run {
                length,
                start: run_start,
                end: w[1],
            };
        }
    }
    Ok(LargenessReport {
        horizon: s.horizon(),
        size: xs.len(),
        max_run,
        max_gap,
        gap_histogram,
        windows: Vec::new(),
    })
}

pub fn pws_profile(s: &TruncatedSet, g: u64) -> Result<Window, LargenessError> {
    let xs = s.elements();
    let first = *xs.first().ok_or(LargenessError::EmptySet)?;
    let mut best = Window {
        g,
        start: first,
        end: first,
        length: 1,
    };
    let mut start = first;
    for w in xs.windows(2) {
        if w[1] - w[0] > g {
            start = w[1];
        }
        let length = w[1] - start + 1;
        if length > best.length {
            best = Window {
                g,
                start,
                end: w[1],
                length,
            };
        }
    }
    Ok(best)
}

/// Run/gap profile plus the longest window for each probe gap.
pub fn full_profile(s: &TruncatedSet, probes: &[u64]) -> Result<LargenessReport, LargenessError> {
    let mut rep = run_gap_profile(s)?;
    rep.windows = probes.iter().map(|&g| pws_profile(s, g)).collect::<Result<_, _>>()?;
    Ok(rep)
}
