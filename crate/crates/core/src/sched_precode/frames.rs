//! Frame building under a shared ModCod.
//!
//! Every member of a frame is served at the efficiency its weakest member
//! supports. The loss of a frame is what its members could have had on
//! their own minus what they get.

use serde::{Deserialize, Serialize};

use super::{ModCodTable, PrecodeError};
use crate::format::round_sig12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UserId {
    pub beam: usize,
    pub user: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub beam: usize,
    pub users: Vec<UserId>,
    pub threshold_db: f64,
    pub spectral_efficiency: f64,
    pub loss: f64,
}

impl Frame {
    pub fn throughput(&self) -> f64 {
        self.spectral_efficiency * self.users.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FramePlan {
    pub frames: Vec<Frame>,
    /// Users below the lowest table threshold.
    pub unservable: Vec<UserId>,
    pub total_loss: f64,
    /// Sum over frames of members times frame efficiency, in bit/s/Hz.
    pub throughput: f64,
}

impl FramePlan {
    /// Copy with every float rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        for f in &mut out.frames {
            f.threshold_db = round_sig12(f.threshold_db);
            f.spectral_efficiency = round_sig12(f.spectral_efficiency);
            f.loss = round_sig12(f.loss);
        }
        out.total_loss = round_sig12(out.total_loss);
        out.throughput = round_sig12(out.throughput);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rounded()).expect("frame plan serializes")
    }
}

/// Sorts each beam's users by SINR (dB) descending and cuts consecutive
/// frames of `frame_size`.
pub fn similarity_schedule(
    sinr_db: &[Vec<f64>],
    frame_size: usize,
    table: &ModCodTable,
) -> Result<FramePlan, PrecodeError> {
    if frame_size == 0 {
        return Err(PrecodeError::InvalidFrameSize);
    }
    let mut groups = Vec::new();
    for (beam, values) in sinr_db.iter().enumerate() {
        let mut order: Vec<usize> = (0..values.len()).filter(|&u| table.lookup(values[u]).is_some()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        for chunk in order.chunks(frame_size) {
            groups.push(chunk.iter().map(|&user| UserId { beam, user }).collect());
        }
    }
    group_frames(sinr_db, &groups, table)
}

/// Builds a plan from explicit groups. Each group must stay within one
/// beam. Users with no table row are listed as unservable and left out of
/// their group; users in no group are also left out.
pub fn group_frames(
    sinr_db: &[Vec<f64>],
    groups: &[Vec<UserId>],
    table: &ModCodTable,
) -> Result<FramePlan, PrecodeError> {
    let mut plan = FramePlan::default();
    let mut seen = std::collections::BTreeSet::new();
    for group in groups {
        let Some(first) = group.first() else { continue };
        let mut members = Vec::with_capacity(group.len());
        let mut own = Vec::with_capacity(group.len());
        for &id in group {
            if id.beam != first.beam {
                return Err(PrecodeError::ShapeMismatch("frame spans more than one beam".into()));
            }
            let Some(&value) = sinr_db.get(id.beam).and_then(|b| b.get(id.user)) else {
                return Err(PrecodeError::ShapeMismatch(format!("no SINR for user {:?}", id)));
            };
            if !seen.insert(id) {
                return Err(PrecodeError::ShapeMismatch(format!("user {:?} appears twice", id)));
            }
            match table.lookup(value) {
                Some(row) => {
                    members.push((id, value));
                    own.push(row.spectral_efficiency);
                }
                None => plan.unservable.push(id),
            }
        }
        if members.is_empty() {
            continue;
        }
        let weakest = members.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
        let row = table.lookup(weakest).expect("weakest member is servable");
        let loss: f64 = own.iter().map(|e| e - row.spectral_efficiency).sum();
        plan.total_loss += loss;
        plan.throughput += row.spectral_efficiency * members.len() as f64;
        plan.frames.push(Frame {
            beam: first.beam,
            users: members.into_iter().map(|m| m.0).collect(),
            threshold_db: row.threshold_db,
            spectral_efficiency: row.spectral_efficiency,
            loss,
        });
    }
    for (beam, values) in sinr_db.iter().enumerate() {
        for (user, &value) in values.iter().enumerate() {
            let id = UserId { beam, user };
            if table.lookup(value).is_none() && !seen.contains(&id) {
                plan.unservable.push(id);
            }
        }
    }
    plan.unservable.sort();
    Ok(plan)
}
