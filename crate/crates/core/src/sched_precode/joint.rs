//! The coupled schedule, precode, re-measure loop.
//!
//! Each round orders every beam's users by their current SINR estimate and
//! sweeps over `max_l N_l` slots. In a slot each beam takes the first
//! unscheduled user in its queue whose channel is semi-orthogonal to the
//! users already placed in that slot. A beam may idle when no compatible user
//! is left and its remaining users still fit in the remaining slots; when
//! they do not, it takes its next user regardless. A swap pass then
//! separates correlated users the greedy fill left together. The slot's users are then
//! precoded together and their SINRs recomputed, which reorders the queues
//! of the next round.

use nalgebra::DMatrix;

use super::sus::Span;
use super::channel_correlation;
use super::{
    default_regularization, precoded_sinr, rzf, similarity_schedule, to_db, FramePlan, ModCodTable,
    PrecodeError, PrecodingMatrix, UserId, DEFAULT_SUS_EPSILON,
};
use crate::scenario::{Scenario, UserChannelSet};

#[derive(Debug, Clone)]
pub struct JointOptions {
    /// `None` uses [`default_regularization`].
    pub alpha: Option<f64>,
    pub rounds: usize,
    pub epsilon: f64,
    pub frame_size: usize,
    pub table: ModCodTable,
}

impl Default for JointOptions {
    fn default() -> Self {
        Self {
            alpha: None,
            rounds: 3,
            epsilon: DEFAULT_SUS_EPSILON,
            frame_size: 2,
            table: ModCodTable::demo(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SlotAssignment {
    /// Served users, one per active beam, in beam order.
    pub users: Vec<UserId>,
    /// Column `i` serves `users[i]`.
    pub precoder: PrecodingMatrix,
    pub sinr: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct JointOutcome {
    pub slots: Vec<SlotAssignment>,
    /// Achieved linear SINR per beam and user.
    pub sinr: Vec<Vec<f64>>,
    pub frames: FramePlan,
    pub rounds_run: usize,
    /// The last round selected the same users as the one before it.
    pub converged: bool,
}

pub fn joint_schedule_precode(
    s: &Scenario,
    channels: &UserChannelSet,
    opts: &JointOptions,
) -> Result<JointOutcome, PrecodeError> {
    let beams = s.num_beams();
    if opts.rounds == 0 {
        return Err(PrecodeError::InvalidRounds);
    }
    if opts.frame_size == 0 {
        return Err(PrecodeError::InvalidFrameSize);
    }
    if !(opts.epsilon > 0.0 && opts.epsilon <= 1.0) {
        return Err(PrecodeError::ShapeMismatch(format!("epsilon must lie in (0, 1], got {}", opts.epsilon)));
    }
    if channels.per_beam.len() != beams {
        return Err(PrecodeError::ShapeMismatch(format!(
            "{} beams in the scenario, {} in the channel set",
            beams,
            channels.per_beam.len()
        )));
    }
    for users in &channels.per_beam {
        if let Some(u) = users.iter().find(|u| u.h.len() != beams) {
            return Err(PrecodeError::ShapeMismatch(format!(
                "channel vector of length {} for {} feeds",
                u.h.len(),
                beams
            )));
        }
    }
    let noise: Vec<f64> = (0..beams).map(|l| s.noise(l)).collect();
    let p_total = s.total_power();
    let alpha = opts.alpha.unwrap_or_else(|| default_regularization(&noise, p_total));

    let mut estimate = initial_estimate(channels, &noise, p_total);
    let mut previous: Option<Vec<Vec<UserId>>> = None;
    let mut result = None;
    let mut rounds_run = 0;
    let mut converged = false;
    for _ in 0..opts.rounds {
        rounds_run += 1;
        let selection = select_slots(channels, &estimate, opts.epsilon);
        let (slots, achieved) = precode_slots(channels, &selection, &noise, alpha, p_total)?;
        estimate = achieved;
        converged = previous.as_ref() == Some(&selection);
        previous = Some(selection);
        result = Some(slots);
        if converged {
            break;
        }
    }
    let slots = result.expect("at least one round");
    let sinr_db: Vec<Vec<f64>> = estimate.iter().map(|b| b.iter().map(|&g| to_db(g)).collect()).collect();
    let frames = similarity_schedule(&sinr_db, opts.frame_size, &opts.table)?;
    Ok(JointOutcome {
        slots,
        sinr: estimate,
        frames,
        rounds_run,
        converged,
    })
}

/// Unprecoded SINR with `P / L` on every feed.
fn initial_estimate(channels: &UserChannelSet, noise: &[f64], p_total: f64) -> Vec<Vec<f64>> {
    let per_feed = p_total / noise.len() as f64;
    channels
        .per_beam
        .iter()
        .enumerate()
        .map(|(l, users)| {
            users
                .iter()
                .map(|u| {
                    let signal = per_feed * u.h[l].norm_sqr();
                    let other: f64 = u.h.iter().enumerate().filter(|&(j, _)| j != l).map(|(_, x)| x.norm_sqr()).sum();
                    signal / (per_feed * other + noise[l])
                })
                .collect()
        })
        .collect()
}

fn select_slots(channels: &UserChannelSet, estimate: &[Vec<f64>], epsilon: f64) -> Vec<Vec<UserId>> {
    let queues: Vec<Vec<usize>> = estimate
        .iter()
        .map(|values| {
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
            order
        })
        .collect();
    let slot_count = queues.iter().map(Vec::len).max().unwrap_or(0);
    let mut done: Vec<Vec<bool>> = queues.iter().map(|q| vec![false; q.len()]).collect();
    let mut remaining: Vec<usize> = queues.iter().map(Vec::len).collect();
    let mut slots = Vec::with_capacity(slot_count);
    for slot in 0..slot_count {
        let slots_after = slot_count - slot - 1;
        let mut span = Span::default();
        let mut picked = Vec::new();
        for (beam, queue) in queues.iter().enumerate() {
            if remaining[beam] == 0 {
                continue;
            }
            let pending = || queue.iter().copied().filter(|&u| !done[beam][u]);
            let compatible = pending().find(|&u| span.correlation(&channels.per_beam[beam][u].h) < epsilon);
            let choice = match compatible {
                Some(u) => Some(u),
                None if remaining[beam] > slots_after => pending().next(),
                None => None,
            };
            if let Some(user) = choice {
                done[beam][user] = true;
                remaining[beam] -= 1;
                span.push(&channels.per_beam[beam][user].h);
                picked.push(UserId { beam, user });
            }
        }
        slots.push(picked);
    }
    repair_conflicts(channels, slots, epsilon)
}

/// Swaps a beam's users between two slots while that lowers the summed
/// correlation of same-slot pairs at or above `epsilon`. Greedy filling can leave
/// two such users together in the last slot even when a swap separates them.
fn repair_conflicts(channels: &UserChannelSet, slots: Vec<Vec<UserId>>, epsilon: f64) -> Vec<Vec<UserId>> {
    let beams = channels.per_beam.len();
    let mut grid: Vec<Vec<Option<usize>>> = slots
        .iter()
        .map(|slot| {
            let mut row = vec![None; beams];
            for id in slot {
                row[id.beam] = Some(id.user);
            }
            row
        })
        .collect();
    let clash = |a: (usize, usize), b: (usize, usize)| {
        let c = channel_correlation(&channels.per_beam[a.0][a.1].h, &channels.per_beam[b.0][b.1].h);
        if c >= epsilon {
            c
        } else {
            0.0
        }
    };
    let conflicts = |row: &[Option<usize>], beam: usize, user: Option<usize>| -> f64 {
        let Some(u) = user else { return 0.0 };
        row.iter()
            .enumerate()
            .filter(|&(m, _)| m != beam)
            .filter_map(|(m, other)| other.map(|o| clash((beam, u), (m, o))))
            .sum()
    };
    let mut improved = true;
    while improved {
        improved = false;
        for beam in 0..beams {
            for a in 0..grid.len() {
                for b in a + 1..grid.len() {
                    let (ua, ub) = (grid[a][beam], grid[b][beam]);
                    if ua == ub {
                        continue;
                    }
                    let before = conflicts(&grid[a], beam, ua) + conflicts(&grid[b], beam, ub);
                    let after = conflicts(&grid[a], beam, ub) + conflicts(&grid[b], beam, ua);
                    if after < before - 1e-12 {
                        grid[a][beam] = ub;
                        grid[b][beam] = ua;
                        improved = true;
                    }
                }
            }
        }
    }
    grid.into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .filter_map(|(beam, user)| user.map(|user| UserId { beam, user }))
                .collect()
        })
        .collect()
}

type Precoded = (Vec<SlotAssignment>, Vec<Vec<f64>>);

fn precode_slots(
    channels: &UserChannelSet,
    selection: &[Vec<UserId>],
    noise: &[f64],
    alpha: f64,
    p_total: f64,
) -> Result<Precoded, PrecodeError> {
    let mut achieved: Vec<Vec<f64>> = channels.per_beam.iter().map(|u| vec![0.0; u.len()]).collect();
    let mut slots = Vec::with_capacity(selection.len());
    for users in selection {
        if users.is_empty() {
            continue;
        }
        let feeds = noise.len();
        let h = DMatrix::from_fn(users.len(), feeds, |r, c| {
            let id = users[r];
            channels.per_beam[id.beam][id.user].h[c].conj()
        });
        let precoder = rzf(&h, alpha, p_total)?;
        let slot_noise: Vec<f64> = users.iter().map(|id| noise[id.beam]).collect();
        let sinr = precoded_sinr(&h, &precoder.w, &slot_noise)?;
        for (id, &g) in users.iter().zip(&sinr) {
            achieved[id.beam][id.user] = g;
        }
        slots.push(SlotAssignment {
            users: users.clone(),
            precoder,
            sinr,
        });
    }
    Ok((slots, achieved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ScenarioDoc, UserChannel};
    use num_complex::Complex64;
    use nalgebra::DVector;

    fn scenario(beams: usize) -> Scenario {
        let gain: Vec<Vec<f64>> = (0..beams)
            .map(|l| (0..beams).map(|m| if l == m { 1.0 } else { 0.01 }).collect())
            .collect();
        let doc = ScenarioDoc::from_gains(gain, vec![1e6; beams], 0.1, 1e6, 1, 4.0);
        Scenario::from_doc(&doc).unwrap()
    }

    fn user(entries: &[(f64, f64)]) -> UserChannel {
        UserChannel {
            position: [0.0, 0.0],
            h: DVector::from_iterator(entries.len(), entries.iter().map(|&(re, im)| Complex64::new(re, im))),
        }
    }

    #[test]
    fn single_user_per_beam_is_one_precoded_slot() {
        let s = scenario(2);
        let set = UserChannelSet {
            per_beam: vec![vec![user(&[(1.0, 0.0), (0.3, 0.1)])], vec![user(&[(0.2, -0.4), (0.9, 0.0)])]],
        };
        let opts = JointOptions { alpha: Some(0.05), ..JointOptions::default() };
        let out = joint_schedule_precode(&s, &set, &opts).unwrap();
        assert_eq!(out.slots.len(), 1);
        let h = DMatrix::from_fn(2, 2, |r, c| set.per_beam[r][0].h[c].conj());
        let p = rzf(&h, 0.05, 4.0).unwrap();
        let want = precoded_sinr(&h, &p.w, &[0.1, 0.1]).unwrap();
        assert_eq!(out.slots[0].sinr, want);
        assert_eq!(out.slots[0].precoder, p);
    }

    #[test]
    fn orthogonal_channels_reach_a_fixed_point() {
        let s = scenario(2);
        let set = UserChannelSet {
            per_beam: vec![
                vec![user(&[(1.0, 0.0), (0.0, 0.0)]), user(&[(0.5, 0.0), (0.0, 0.0)])],
                vec![user(&[(0.0, 0.0), (0.0, 0.8)]), user(&[(0.0, 0.0), (0.7, 0.0)])],
            ],
        };
        let one = JointOptions { rounds: 1, ..JointOptions::default() };
        let two = JointOptions { rounds: 2, ..JointOptions::default() };
        let a = joint_schedule_precode(&s, &set, &one).unwrap();
        let b = joint_schedule_precode(&s, &set, &two).unwrap();
        assert!(b.converged);
        assert_eq!(a.sinr, b.sinr);
        for slot in &b.slots {
            assert_eq!(slot.users.len(), 2);
        }
    }

    #[test]
    fn colinear_users_are_separated() {
        let s = scenario(3);
        let shared = [(0.8, 0.3), (0.05, 0.0), (0.0, 0.0)];
        for first in 0..2 {
            let mut b0 = vec![user(&[(0.0, 0.0), (1.0, 0.0), (0.1, 0.0)]), user(&[(0.1, 0.0), (0.9, 0.2), (0.0, 0.0)])];
            b0[first] = user(&shared);
            let b1 = vec![user(&shared), user(&[(0.0, 0.0), (0.1, 0.0), (1.0, 0.0)])];
            let set = UserChannelSet { per_beam: vec![b0, b1, vec![]] };
            let out = joint_schedule_precode(&s, &set, &JointOptions::default()).unwrap();
            let together = out.slots.iter().any(|slot| {
                slot.users.contains(&UserId { beam: 0, user: first }) && slot.users.contains(&UserId { beam: 1, user: 0 })
            });
            assert!(!together);
        }
    }

    #[test]
    fn every_user_is_served_once_per_sweep() {
        let s = crate::scenario::generate_scenario(&crate::scenario::GeneratorParams {
            seed: 11,
            ..Default::default()
        })
        .unwrap();
        let set = crate::scenario::generate_user_channels(&s, 11);
        let out = joint_schedule_precode(&s, &set, &JointOptions::default()).unwrap();
        let mut seen: Vec<UserId> = out.slots.iter().flat_map(|x| x.users.iter().copied()).collect();
        seen.sort();
        let total = seen.len();
        seen.dedup();
        assert_eq!(total, seen.len());
        assert_eq!(total, set.num_users());
        for slot in &out.slots {
            let power = slot.precoder.power();
            assert!((power - s.total_power()).abs() <= 1e-9 * s.total_power());
        }
    }

    #[test]
    fn rejects_bad_options() {
        let s = scenario(2);
        let set = UserChannelSet { per_beam: vec![vec![], vec![]] };
        let zero = JointOptions { rounds: 0, ..JointOptions::default() };
        assert_eq!(joint_schedule_precode(&s, &set, &zero).unwrap_err(), PrecodeError::InvalidRounds);
        let wrong = UserChannelSet { per_beam: vec![vec![]] };
        assert!(joint_schedule_precode(&s, &wrong, &JointOptions::default()).is_err());
    }
}
