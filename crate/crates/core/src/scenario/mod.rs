//! System model: beams, demands, gains, spectrum and power budgets.
//!
//! A [`Scenario`] represents every beam by a single super-user that carries
//! the aggregate demand of the beam. Gains are linear power gains with any
//! rain margin already folded in; `gain(l, m)` is the gain of beam `m`'s
//! transmission at beam `l`'s super-user.

mod document;
mod generate;

pub use document::{BeamDoc, PowerDoc, ScenarioDoc, SpectrumDoc, TransponderDoc};
pub use generate::{
    generate_scenario, generate_user_channels, hex_centers, GeneratorParams, Layout,
    UserChannel, UserChannelSet,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ScenarioError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    pub id: u32,
    pub center: [f64; 2],
    pub demand_bps: f64,
    pub users: usize,
    pub noise_w: f64,
    pub transponder: Option<u32>,
}

/// Payload unit serving a group of beams with shared caps.
#[derive(Debug, Clone, PartialEq)]
pub struct Transponder {
    pub id: u32,
    pub p_cap_w: f64,
    /// Maximum number of (carrier, beam) assignments across the group.
    pub k_cap: usize,
}

/// Gaussian beam profile `g(d) = g_peak * 10^(-rain/10) * exp(-4 ln2 * d^2 / theta^2)`.
///
/// `beamwidth_3db` is the full 3 dB width, so the gain halves at
/// `d = beamwidth_3db / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamModel {
    pub peak_gain: f64,
    pub beamwidth_3db: f64,
    #[serde(default)]
    pub rain_margin_db: f64,
    /// Radius of the disc around a beam center where its users are placed.
    pub user_radius: f64,
}

/// `4 ln 2`: places the half-power point at half the 3 dB beamwidth.
pub const GAUSSIAN_BEAM_CONSTANT: f64 = 4.0 * std::f64::consts::LN_2;

impl BeamModel {
    pub fn gain_at(&self, distance: f64) -> f64 {
        let margin = 10f64.powf(-self.rain_margin_db / 10.0);
        let t = distance / self.beamwidth_3db;
        self.peak_gain * margin * (-GAUSSIAN_BEAM_CONSTANT * t * t).exp()
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.peak_gain) {
            return Err(ScenarioError::invalid("beam_model.peak_gain", "must be positive"));
        }
        if !pos(self.beamwidth_3db) {
            return Err(ScenarioError::invalid("beam_model.beamwidth_3db", "must be positive"));
        }
        if !(self.rain_margin_db.is_finite() && self.rain_margin_db >= 0.0) {
            return Err(ScenarioError::invalid("beam_model.rain_margin_db", "must be non-negative"));
        }
        if !(self.user_radius.is_finite() && self.user_radius >= 0.0) {
            return Err(ScenarioError::invalid("beam_model.user_radius", "must be non-negative"));
        }
        Ok(())
    }
}

/// Validated, immutable system model.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    beams: Vec<Beam>,
    gain: Vec<f64>,
    b_total_hz: f64,
    k_carriers: usize,
    p_total_w: f64,
    transponders: Vec<Transponder>,
    beam_transponder: Vec<Option<usize>>,
    rain_margin_db: f64,
    beam_model: Option<BeamModel>,
}

/// Parses and validates a JSON scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(text)?;
    Scenario::from_doc(&doc)
}

impl Scenario {
    pub fn from_doc(doc: &ScenarioDoc) -> Result<Self, ScenarioError> {
        let l = doc.beams.len();
        if l == 0 {
            return Err(ScenarioError::invalid("beams", "at least one beam is required"));
        }
        let mut beams = Vec::with_capacity(l);
        for (i, b) in doc.beams.iter().enumerate() {
            if doc.beams[..i].iter().any(|o| o.id == b.id) {
                return Err(ScenarioError::invalid(
                    format!("beams[{i}].id"),
                    format!("duplicate beam id {}", b.id),
                ));
            }
            if !b.center.iter().all(|c| c.is_finite()) {
                return Err(ScenarioError::invalid(format!("beams[{i}].center"), "must be finite"));
            }
            if !(b.demand_bps.is_finite() && b.demand_bps >= 0.0) {
                return Err(ScenarioError::invalid(
                    format!("beams[{i}].demand_bps"),
                    "must be a non-negative rate",
                ));
            }
            if b.users == 0 {
                return Err(ScenarioError::invalid(format!("beams[{i}].users"), "must be positive"));
            }
            if !(b.noise_w.is_finite() && b.noise_w > 0.0) {
                return Err(ScenarioError::invalid(format!("beams[{i}].noise_w"), "must be positive"));
            }
            beams.push(Beam {
                id: b.id,
                center: b.center,
                demand_bps: b.demand_bps,
                users: b.users,
                noise_w: b.noise_w,
                transponder: b.transponder,
            });
        }

        if doc.gain_matrix.len() != l {
            return Err(ScenarioError::invalid(
                "gain_matrix",
                format!("expected {l} rows, found {}", doc.gain_matrix.len()),
            ));
        }
        let mut gain = Vec::with_capacity(l * l);
        for (r, row) in doc.gain_matrix.iter().enumerate() {
            if row.len() != l {
                return Err(ScenarioError::invalid(
                    format!("gain_matrix[{r}]"),
                    format!("expected {l} entries, found {}", row.len()),
                ));
            }
            for (c, &g) in row.iter().enumerate() {
                if !(g.is_finite() && g >= 0.0) {
                    return Err(ScenarioError::invalid(
                        format!("gain_matrix[{r}][{c}]"),
                        "gains must be finite and non-negative",
                    ));
                }
                if c != r && g > row[r] {
                    return Err(ScenarioError::invalid(
                        format!("gain_matrix[{r}][{c}]"),
                        format!("exceeds own-beam gain {} (diagonal dominance)", row[r]),
                    ));
                }
            }
            gain.extend_from_slice(row);
        }

        let spec = &doc.spectrum;
        if !(spec.b_total_hz.is_finite() && spec.b_total_hz > 0.0) {
            return Err(ScenarioError::invalid("spectrum.b_total_hz", "must be positive"));
        }
        if spec.k_carriers == 0 {
            return Err(ScenarioError::invalid("spectrum.k_carriers", "must be positive"));
        }
        // fmod is exact, so this is true divisibility rather than a tolerance test.
        if spec.b_total_hz % spec.k_carriers as f64 != 0.0 {
            return Err(ScenarioError::invalid(
                "spectrum.k_carriers",
                format!(
                    "b_total_hz {} is not exactly divisible into {} carriers",
                    spec.b_total_hz, spec.k_carriers
                ),
            ));
        }

        let power = &doc.power;
        if !(power.p_total_w.is_finite() && power.p_total_w > 0.0) {
            return Err(ScenarioError::invalid("power.p_total_w", "must be positive"));
        }
        let transponders: Vec<Transponder> = power
            .transponders
            .iter()
            .map(|t| Transponder {
                id: t.id,
                p_cap_w: t.p_cap_w,
                k_cap: t.k_cap,
            })
            .collect();
        for (i, t) in transponders.iter().enumerate() {
            if transponders[..i].iter().any(|o| o.id == t.id) {
                return Err(ScenarioError::invalid(
                    format!("power.transponders[{i}].id"),
                    format!("duplicate transponder id {}", t.id),
                ));
            }
            if !(t.p_cap_w.is_finite() && t.p_cap_w > 0.0 && t.p_cap_w <= power.p_total_w) {
                return Err(ScenarioError::invalid(
                    format!("power.transponders[{i}].p_cap_w"),
                    "must lie in (0, p_total_w]",
                ));
            }
            if t.k_cap == 0 {
                return Err(ScenarioError::invalid(
                    format!("power.transponders[{i}].k_cap"),
                    "must be positive",
                ));
            }
        }
        let mut beam_transponder = vec![None; l];
        for (i, b) in beams.iter().enumerate() {
            match (b.transponder, transponders.is_empty()) {
                (None, true) => {}
                (None, false) => {
                    return Err(ScenarioError::invalid(
                        format!("beams[{i}].transponder"),
                        "every beam must belong to a transponder when transponders are configured",
                    ))
                }
                (Some(id), _) => {
                    let idx = transponders.iter().position(|t| t.id == id).ok_or_else(|| {
                        ScenarioError::invalid(
                            format!("beams[{i}].transponder"),
                            format!("unknown transponder id {id}"),
                        )
                    })?;
                    beam_transponder[i] = Some(idx);
                }
            }
        }

        if !(doc.rain_margin_db.is_finite() && doc.rain_margin_db >= 0.0) {
            return Err(ScenarioError::invalid("rain_margin_db", "must be non-negative"));
        }
        if let Some(m) = &doc.beam_model {
            m.validate()?;
        }

        Ok(Scenario {
            beams,
            gain,
            b_total_hz: spec.b_total_hz,
            k_carriers: spec.k_carriers,
            p_total_w: power.p_total_w,
            transponders,
            beam_transponder,
            rain_margin_db: doc.rain_margin_db,
            beam_model: doc.beam_model,
        })
    }

    pub fn to_doc(&self) -> ScenarioDoc {
        ScenarioDoc {
            beams: self
                .beams
                .iter()
                .map(|b| BeamDoc {
                    id: b.id,
                    center: b.center,
                    demand_bps: b.demand_bps,
                    users: b.users,
                    noise_w: b.noise_w,
                    transponder: b.transponder,
                })
                .collect(),
            gain_matrix: self.gain.chunks(self.num_beams()).map(<[f64]>::to_vec).collect(),
            spectrum: SpectrumDoc {
                b_total_hz: self.b_total_hz,
                k_carriers: self.k_carriers,
            },
            power: PowerDoc {
                p_total_w: self.p_total_w,
                transponders: self
                    .transponders
                    .iter()
                    .map(|t| TransponderDoc {
                        id: t.id,
                        p_cap_w: t.p_cap_w,
                        k_cap: t.k_cap,
                    })
                    .collect(),
            },
            rain_margin_db: self.rain_margin_db,
            beam_model: self.beam_model,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_doc().rounded())
            .expect("scenario documents always serialize");
        text.push('\n');
        text
    }

    pub fn num_beams(&self) -> usize {
        self.beams.len()
    }

    pub fn num_carriers(&self) -> usize {
        self.k_carriers
    }

    pub fn beams(&self) -> &[Beam] {
        &self.beams
    }

    pub fn beam_index(&self, id: u32) -> Option<usize> {
        self.beams.iter().position(|b| b.id == id)
    }

    /// Gain of beam `m`'s transmission at beam `l`'s super-user.
    pub fn gain(&self, l: usize, m: usize) -> f64 {
        self.gain[l * self.beams.len() + m]
    }

    pub fn demand(&self, l: usize) -> f64 {
        self.beams[l].demand_bps
    }

    pub fn demands(&self) -> Vec<f64> {
        self.beams.iter().map(|b| b.demand_bps).collect()
    }

    pub fn noise(&self, l: usize) -> f64 {
        self.beams[l].noise_w
    }

    pub fn total_bandwidth(&self) -> f64 {
        self.b_total_hz
    }

    pub fn carrier_width(&self) -> f64 {
        self.b_total_hz / self.k_carriers as f64
    }

    pub fn total_power(&self) -> f64 {
        self.p_total_w
    }

    pub fn transponders(&self) -> &[Transponder] {
        &self.transponders
    }

    /// Index into [`Scenario::transponders`] of the unit serving beam `l`.
    pub fn transponder_of(&self, l: usize) -> Option<usize> {
        self.beam_transponder[l]
    }

    pub fn rain_margin_db(&self) -> f64 {
        self.rain_margin_db
    }

    pub fn beam_model(&self) -> Option<&BeamModel> {
        self.beam_model.as_ref()
    }

    pub fn center_distance(&self, a: usize, b: usize) -> f64 {
        let [ax, ay] = self.beams[a].center;
        let [bx, by] = self.beams[b].center;
        (ax - bx).hypot(ay - by)
    }

    /// Copy with demands replaced; the other invariants are untouched.
    pub fn with_demands(&self, demands: &[f64]) -> Result<Scenario, ScenarioError> {
        let mut doc = self.to_doc();
        if demands.len() != doc.beams.len() {
            return Err(ScenarioError::invalid("demands", "length must equal the beam count"));
        }
        for (b, &d) in doc.beams.iter_mut().zip(demands) {
            b.demand_bps = d;
        }
        Scenario::from_doc(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{
            "beams": [{"id": 1, "center": [0, 0], "demand_bps": 1e6, "noise_w": 1e-3}],
            "gain_matrix": [[1.0]],
            "spectrum": {"b_total_hz": 1e6, "k_carriers": 1},
            "power": {"p_total_w": 10}
        }"#
    }

    #[test]
    fn minimal_document_loads() {
        let s = load_scenario(minimal()).unwrap();
        assert_eq!(s.num_beams(), 1);
        assert_eq!(s.carrier_width(), 1e6);
        assert_eq!(s.beams()[0].users, 1);
        assert_eq!(s.total_power(), 10.0);
    }

    #[test]
    fn inexact_carrier_split_is_rejected() {
        let text = minimal().replace(r#""k_carriers": 1"#, r#""k_carriers": 3"#);
        match load_scenario(&text) {
            Err(ScenarioError::Invalid { field, .. }) => assert_eq!(field, "spectrum.k_carriers"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_dominance_is_enforced() {
        let doc = ScenarioDoc::from_gains(
            vec![vec![0.5, 0.9], vec![0.1, 1.0]],
            vec![1.0, 1.0],
            1.0,
            2.0,
            2,
            1.0,
        );
        match Scenario::from_doc(&doc) {
            Err(ScenarioError::Invalid { field, .. }) => assert_eq!(field, "gain_matrix[0][1]"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(load_scenario("{ not json"), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn transponder_partition_must_cover_every_beam() {
        let mut doc = ScenarioDoc::from_gains(
            vec![vec![1.0, 0.1], vec![0.1, 1.0]],
            vec![1.0, 1.0],
            1.0,
            2.0,
            2,
            4.0,
        );
        doc.power.transponders = vec![TransponderDoc {
            id: 9,
            p_cap_w: 2.0,
            k_cap: 2,
        }];
        doc.beams[0].transponder = Some(9);
        assert!(Scenario::from_doc(&doc).is_err());
        doc.beams[1].transponder = Some(9);
        let s = Scenario::from_doc(&doc).unwrap();
        assert_eq!(s.transponder_of(1), Some(0));
        doc.beams[1].transponder = Some(3);
        assert!(Scenario::from_doc(&doc).is_err());
    }

    #[test]
    fn round_trip_through_json() {
        let doc = ScenarioDoc::from_gains(
            vec![vec![1.0, 0.25], vec![0.125, 2.0]],
            vec![3.0, 4.0],
            0.5,
            8.0,
            4,
            10.0,
        );
        let s = Scenario::from_doc(&doc).unwrap();
        let back = load_scenario(&s.to_json()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn gaussian_profile_halves_at_half_beamwidth() {
        let m = BeamModel {
            peak_gain: 2.0,
            beamwidth_3db: 3.0,
            rain_margin_db: 0.0,
            user_radius: 0.0,
        };
        assert!((m.gain_at(1.5) - 1.0).abs() < 1e-12);
        assert_eq!(m.gain_at(0.0), 2.0);
    }
}
