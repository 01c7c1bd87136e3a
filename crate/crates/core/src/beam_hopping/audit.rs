//! Turning dwell counts into a slot sequence and checking it.
//!
//! A beam switches on once per burst of consecutive lit slots, and its gap
//! is the longest run of dark slots, both counted cyclically because the
//! window repeats.

use super::{IlluminationPattern, SnapshotSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sequencing {
    /// Smooth weighted round-robin: spreads each snapshot's slots evenly.
    #[default]
    Interleaved,
    /// All slots of a snapshot back to back, in snapshot order.
    Blocked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AuditLimits {
    pub max_switches_per_window: Option<usize>,
    pub max_revisit_gap_slots: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    /// Snapshot index for every slot.
    pub sequence: Vec<usize>,
    /// Per beam: switch-on events per window.
    pub switches: Vec<usize>,
    /// Per beam: longest cyclic run of dark slots.
    pub max_gap: Vec<usize>,
    pub violations: Vec<String>,
}

pub fn sequence(t: &[usize], order: Sequencing) -> Vec<usize> {
    let slots: usize = t.iter().sum();
    match order {
        Sequencing::Blocked => t.iter().enumerate().flat_map(|(g, &n)| std::iter::repeat_n(g, n)).collect(),
        Sequencing::Interleaved => {
            let mut credit = vec![0i64; t.len()];
            let mut out = Vec::with_capacity(slots);
            for _ in 0..slots {
                for (c, &n) in credit.iter_mut().zip(t) {
                    *c += n as i64;
                }
                let mut pick = 0;
                for g in 1..t.len() {
                    if credit[g] > credit[pick] {
                        pick = g;
                    }
                }
                credit[pick] -= slots as i64;
                out.push(pick);
            }
            out
        }
    }
}

pub fn audit_pattern(
    pattern: &IlluminationPattern,
    ss: &SnapshotSet,
    order: Sequencing,
    limits: AuditLimits,
) -> AuditReport {
    let seq = sequence(&pattern.t, order);
    let n = seq.len();
    let beams = ss.num_beams();
    let mut switches = vec![0; beams];
    let mut max_gap = vec![0; beams];
    for beam in 0..beams {
        let lit: Vec<bool> = seq.iter().map(|&g| ss.snapshot(g).contains(&beam)).collect();
        let Some(start) = lit.iter().position(|&x| x) else {
            max_gap[beam] = n;
            continue;
        };
        // Walk one full cycle starting at a lit slot.
        let mut run = 0;
        for i in 1..=n {
            let on = lit[(start + i) % n];
            let prev = lit[(start + i - 1) % n];
            if on {
                if !prev {
                    switches[beam] += 1;
                }
                max_gap[beam] = max_gap[beam].max(run);
                run = 0;
            } else {
                run += 1;
            }
        }
    }
    let mut violations = Vec::new();
    for beam in 0..beams {
        if let Some(limit) = limits.max_switches_per_window {
            if switches[beam] > limit {
                violations.push(format!("beam {beam}: {} switches exceed {limit}", switches[beam]));
            }
        }
        if let Some(limit) = limits.max_revisit_gap_slots {
            if max_gap[beam] > limit {
                violations.push(format!("beam {beam}: gap of {} slots exceeds {limit}", max_gap[beam]));
            }
        }
    }
    AuditReport {
        sequence: seq,
        switches,
        max_gap,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam_hopping::{enumerate_snapshots, Window};
    use crate::scenario::{Scenario, ScenarioDoc};

    fn isolated(beams: usize) -> SnapshotSet {
        let gain: Vec<Vec<f64>> = (0..beams)
            .map(|l| (0..beams).map(|m| if l == m { 1.0 } else { 0.0 }).collect())
            .collect();
        let s = Scenario::from_doc(&ScenarioDoc::from_gains(gain, vec![1e6; beams], 1.0, 1e6, 1, 1.0)).unwrap();
        enumerate_snapshots(&s, beams, 0.0, 64).unwrap()
    }

    fn pattern(t: Vec<usize>) -> IlluminationPattern {
        let slots = t.iter().sum();
        IlluminationPattern::new(t, Window::new(slots, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn always_lit_snapshot() {
        // Snapshot 2 lights both beams.
        let ss = isolated(2);
        let r = audit_pattern(&pattern(vec![0, 0, 4]), &ss, Sequencing::Interleaved, AuditLimits::default());
        assert_eq!(r.switches, vec![0, 0]);
        assert_eq!(r.max_gap, vec![0, 0]);
    }

    #[test]
    fn two_slot_alternation() {
        let ss = isolated(2);
        let r = audit_pattern(&pattern(vec![1, 1, 0]), &ss, Sequencing::Interleaved, AuditLimits::default());
        assert_eq!(r.sequence, vec![0, 1]);
        assert_eq!(r.max_gap, vec![1, 1]);
        assert_eq!(r.switches, vec![1, 1]);
    }

    #[test]
    fn interleaving_beats_blocks() {
        let ss = isolated(2);
        let p = pattern(vec![5, 5, 0]);
        let limits = AuditLimits { max_switches_per_window: Some(2), max_revisit_gap_slots: Some(3) };
        let inter = audit_pattern(&p, &ss, Sequencing::Interleaved, limits);
        let block = audit_pattern(&p, &ss, Sequencing::Blocked, limits);
        assert_eq!(inter.max_gap, vec![1, 1]);
        assert_eq!(block.max_gap, vec![5, 5]);
        assert_eq!(inter.switches, vec![5, 5]);
        assert_eq!(block.switches, vec![1, 1]);
        assert_eq!(inter.violations.len(), 2);
        assert_eq!(block.violations.len(), 2);
    }

    #[test]
    fn sequence_preserves_counts() {
        for t in [vec![3, 0, 2, 7], vec![1], vec![0, 4]] {
            let seq = sequence(&t, Sequencing::Interleaved);
            for (g, &n) in t.iter().enumerate() {
                assert_eq!(seq.iter().filter(|&&x| x == g).count(), n);
            }
        }
    }

    #[test]
    fn dark_beam_gap_is_whole_window() {
        let ss = isolated(2);
        let r = audit_pattern(&pattern(vec![3, 0, 0]), &ss, Sequencing::Blocked, AuditLimits::default());
        assert_eq!(r.max_gap, vec![0, 3]);
        assert_eq!(r.switches, vec![0, 0]);
    }
}
