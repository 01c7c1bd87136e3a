//! Snapshot sets and their full-band rates.

use super::BhError;
use crate::metrics::co_channel_sinr;
use crate::scenario::Scenario;

pub const DEFAULT_SNAPSHOT_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    /// Beam indices lit in each snapshot, ascending.
    snapshots: Vec<Vec<usize>>,
    /// `rates[g][l]` in bit/s; zero for beams dark in `g`.
    rates: Vec<Vec<f64>>,
    beams: usize,
}

impl SnapshotSet {
    /// Builds a set from explicit beam-index subsets.
    pub fn from_indices(s: &Scenario, snapshots: Vec<Vec<usize>>) -> Result<Self, BhError> {
        if snapshots.is_empty() {
            return Err(BhError::NoSnapshots);
        }
        let beams = s.num_beams();
        let mut normalized = Vec::with_capacity(snapshots.len());
        for (index, mut set) in snapshots.into_iter().enumerate() {
            set.sort_unstable();
            let before = set.len();
            set.dedup();
            if set.len() != before {
                return Err(BhError::InvalidSnapshot { index, reason: "repeats a beam".into() });
            }
            if set.is_empty() {
                return Err(BhError::InvalidSnapshot { index, reason: "is empty".into() });
            }
            if let Some(&b) = set.iter().find(|&&b| b >= beams) {
                return Err(BhError::InvalidSnapshot { index, reason: format!("beam index {b} out of range") });
            }
            normalized.push(set);
        }
        let rates = normalized.iter().map(|set| snapshot_rates(s, set)).collect();
        Ok(Self { snapshots: normalized, rates, beams })
    }

    /// Builds a set from subsets of beam ids, as read from a snapshot file.
    pub fn from_beam_ids(s: &Scenario, subsets: &[Vec<u32>]) -> Result<Self, BhError> {
        let mut indices = Vec::with_capacity(subsets.len());
        for (index, ids) in subsets.iter().enumerate() {
            let set = ids
                .iter()
                .map(|&id| {
                    s.beam_index(id)
                        .ok_or_else(|| BhError::InvalidSnapshot { index, reason: format!("unknown beam id {id}") })
                })
                .collect::<Result<Vec<_>, _>>()?;
            indices.push(set);
        }
        Self::from_indices(s, indices)
    }

    /// Parses a JSON list of beam-id lists.
    pub fn from_json(s: &Scenario, text: &str) -> Result<Self, BhError> {
        let subsets: Vec<Vec<u32>> = serde_json::from_str(text)
            .map_err(|e| BhError::InvalidSnapshot { index: 0, reason: format!("snapshot file: {e}") })?;
        Self::from_beam_ids(s, &subsets)
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn num_beams(&self) -> usize {
        self.beams
    }

    pub fn snapshot(&self, g: usize) -> &[usize] {
        &self.snapshots[g]
    }

    pub fn snapshots(&self) -> &[Vec<usize>] {
        &self.snapshots
    }

    pub fn rates(&self, g: usize) -> &[f64] {
        &self.rates[g]
    }

    pub fn rate(&self, l: usize, g: usize) -> f64 {
        self.rates[g][l]
    }

    /// Index of the snapshot lighting only `beam`.
    pub fn single_beam(&self, beam: usize) -> Option<usize> {
        self.snapshots.iter().position(|set| set.as_slice() == [beam])
    }

    /// Keeps the listed snapshots, in the given order.
    pub fn subset(&self, keep: &[usize]) -> Self {
        Self {
            snapshots: keep.iter().map(|&g| self.snapshots[g].clone()).collect(),
            rates: keep.iter().map(|&g| self.rates[g].clone()).collect(),
            beams: self.beams,
        }
    }
}

/// Uniform power over the lit beams, whole band each.
fn snapshot_rates(s: &Scenario, set: &[usize]) -> Vec<f64> {
    let mut tx = vec![0.0; s.num_beams()];
    let share = s.total_power() / set.len() as f64;
    for &l in set {
        tx[l] = share;
    }
    let band = s.total_bandwidth();
    (0..s.num_beams())
        .map(|l| {
            if tx[l] > 0.0 {
                band * co_channel_sinr(s, l, &tx).ln_1p() / std::f64::consts::LN_2
            } else {
                0.0
            }
        })
        .collect()
}

/// All non-empty subsets of at most `max_active` beams whose centers are
/// pairwise at least `min_distance` apart, ordered by size and then
/// lexicographically.
pub fn enumerate_snapshots(
    s: &Scenario,
    max_active: usize,
    min_distance: f64,
    cap: usize,
) -> Result<SnapshotSet, BhError> {
    if max_active == 0 {
        return Err(BhError::InvalidMaxActive);
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    extend(s, max_active, min_distance, cap, 0, &mut stack, &mut found)?;
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    SnapshotSet::from_indices(s, found)
}

fn extend(
    s: &Scenario,
    max_active: usize,
    min_distance: f64,
    cap: usize,
    from: usize,
    stack: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) -> Result<(), BhError> {
    for next in from..s.num_beams() {
        if stack.iter().any(|&b| s.center_distance(b, next) < min_distance) {
            continue;
        }
        stack.push(next);
        if found.len() == cap {
            return Err(BhError::CapExceeded { cap });
        }
        found.push(stack.clone());
        if stack.len() < max_active {
            extend(s, max_active, min_distance, cap, next + 1, stack, found)?;
        }
        stack.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioDoc;

    fn line(beams: usize) -> Scenario {
        let gain: Vec<Vec<f64>> = (0..beams)
            .map(|l| (0..beams).map(|m| if l == m { 1.0 } else { 0.1 }).collect())
            .collect();
        Scenario::from_doc(&ScenarioDoc::from_gains(gain, vec![1e6; beams], 1.0, 1e6, 1, 2.0)).unwrap()
    }

    #[test]
    fn single_beam_snapshots() {
        let ss = enumerate_snapshots(&line(2), 1, 0.0, DEFAULT_SNAPSHOT_CAP).unwrap();
        assert_eq!(ss.snapshots(), &[vec![0], vec![1]]);
        // Full power on one beam: log2(1 + 2) bit/s/Hz over 1 MHz.
        assert!((ss.rate(0, 0) - 1e6 * 3f64.log2()).abs() < 1e-6);
        assert_eq!(ss.rate(1, 0), 0.0);
    }

    #[test]
    fn distance_filter_drops_pairs() {
        let s = line(2);
        let d = s.center_distance(0, 1);
        assert_eq!(enumerate_snapshots(&s, 2, d * 1.01, DEFAULT_SNAPSHOT_CAP).unwrap().len(), 2);
        assert_eq!(enumerate_snapshots(&s, 2, d, DEFAULT_SNAPSHOT_CAP).unwrap().len(), 3);
    }

    #[test]
    fn counts_subsets() {
        let ss = enumerate_snapshots(&line(4), 2, 0.0, DEFAULT_SNAPSHOT_CAP).unwrap();
        assert_eq!(ss.len(), 10);
        assert_eq!(ss.snapshot(4), &[0, 1]);
        // Pair rates use half the power each and see each other.
        let sinr: f64 = 1.0 / (0.1 + 1.0);
        assert!((ss.rate(0, 4) - 1e6 * sinr.ln_1p() / std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(enumerate_snapshots(&line(6), 3, 0.0, 20), Err(BhError::CapExceeded { cap: 20 }));
        assert!(enumerate_snapshots(&line(6), 3, 0.0, 41).is_ok());
        assert_eq!(enumerate_snapshots(&line(2), 0, 0.0, 10), Err(BhError::InvalidMaxActive));
    }

    #[test]
    fn file_subsets_are_checked() {
        let s = line(3);
        let ss = SnapshotSet::from_json(&s, "[[2, 0], [1]]").unwrap();
        assert_eq!(ss.snapshots(), &[vec![0, 2], vec![1]]);
        assert!(SnapshotSet::from_json(&s, "[[7]]").is_err());
        assert!(SnapshotSet::from_json(&s, "[[1, 1]]").is_err());
        assert!(SnapshotSet::from_json(&s, "[[]]").is_err());
        assert_eq!(SnapshotSet::from_json(&s, "[]"), Err(BhError::NoSnapshots));
    }
}
