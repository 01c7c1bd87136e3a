//! Serde mirror of the JSON scenario file.

use serde::{Deserialize, Serialize};

use super::BeamModel;
use crate::format::round_sig12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub beams: Vec<BeamDoc>,
    /// Row-major, linear; row `l` holds the gains seen by beam `l`'s super-user.
    pub gain_matrix: Vec<Vec<f64>>,
    pub spectrum: SpectrumDoc,
    pub power: PowerDoc,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub rain_margin_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam_model: Option<BeamModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamDoc {
    pub id: u32,
    pub center: [f64; 2],
    pub demand_bps: f64,
    #[serde(default = "one")]
    pub users: usize,
    pub noise_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transponder: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub b_total_hz: f64,
    pub k_carriers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerDoc {
    pub p_total_w: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transponders: Vec<TransponderDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransponderDoc {
    pub id: u32,
    pub p_cap_w: f64,
    pub k_cap: usize,
}

fn one() -> usize {
    1
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl ScenarioDoc {
    /// Document with beams placed on a line at unit spacing, ids `0..L`,
    /// one user per beam and the same noise power everywhere.
    pub fn from_gains(
        gain_matrix: Vec<Vec<f64>>,
        demands: Vec<f64>,
        noise_w: f64,
        b_total_hz: f64,
        k_carriers: usize,
        p_total_w: f64,
    ) -> Self {
        let beams = demands
            .iter()
            .enumerate()
            .map(|(i, &d)| BeamDoc {
                id: i as u32,
                center: [i as f64, 0.0],
                demand_bps: d,
                users: 1,
                noise_w,
                transponder: None,
            })
            .collect();
        ScenarioDoc {
            beams,
            gain_matrix,
            spectrum: SpectrumDoc {
                b_total_hz,
                k_carriers,
            },
            power: PowerDoc {
                p_total_w,
                transponders: Vec::new(),
            },
            rain_margin_db: 0.0,
            beam_model: None,
        }
    }

    /// Copy with every float rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        let mut d = self.clone();
        for b in &mut d.beams {
            b.center = b.center.map(round_sig12);
            b.demand_bps = round_sig12(b.demand_bps);
            b.noise_w = round_sig12(b.noise_w);
        }
        for row in &mut d.gain_matrix {
            row.iter_mut().for_each(|g| *g = round_sig12(*g));
        }
        d.spectrum.b_total_hz = round_sig12(d.spectrum.b_total_hz);
        d.power.p_total_w = round_sig12(d.power.p_total_w);
        for t in &mut d.power.transponders {
            t.p_cap_w = round_sig12(t.p_cap_w);
        }
        d.rain_margin_db = round_sig12(d.rain_margin_db);
        if let Some(m) = &mut d.beam_model {
            m.peak_gain = round_sig12(m.peak_gain);
            m.beamwidth_3db = round_sig12(m.beamwidth_3db);
            m.rain_margin_db = round_sig12(m.rain_margin_db);
            m.user_radius = round_sig12(m.user_radius);
        }
        d
    }
}
