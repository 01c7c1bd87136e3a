//! Reproducible synthetic scenarios and per-user channel vectors.
//!
//! Draw order is part of the contract: beams are visited in index order and
//! each beam consumes one uniform for its demand followed by one for its user
//! count. User channels consume, per user, two uniforms for the position
//! offset and then one phase uniform per feed.

use nalgebra::DVector;
use num_complex::Complex64;

use super::{BeamDoc, BeamModel, PowerDoc, Scenario, ScenarioDoc, ScenarioError, SpectrumDoc};
use crate::rng::Prng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Beams fill hexagonal rings around the origin (1, 7, 19, ... beams).
    Hexagonal,
    /// Beams on the x axis.
    Line,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub num_beams: usize,
    pub layout: Layout,
    /// Distance between neighbouring beam centers.
    pub spacing: f64,
    pub beam_model: BeamModel,
    pub demand_min_bps: f64,
    pub demand_max_bps: f64,
    pub users_min: usize,
    pub users_max: usize,
    pub noise_w: f64,
    pub k_carriers: usize,
    /// Whole hertz so that `K * width` is an exact total band.
    pub carrier_width_hz: u64,
    pub p_total_w: f64,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            num_beams: 7,
            layout: Layout::Hexagonal,
            spacing: 1.0,
            beam_model: BeamModel {
                peak_gain: 1e-10,
                beamwidth_3db: 1.0,
                rain_margin_db: 3.0,
                user_radius: 0.4,
            },
            demand_min_bps: 50e6,
            demand_max_bps: 500e6,
            users_min: 1,
            users_max: 4,
            noise_w: 1e-12,
            k_carriers: 4,
            carrier_width_hz: 50_000_000,
            p_total_w: 100.0,
            seed: 0,
        }
    }
}

/// First `n` cells of a hexagonal spiral with unit neighbour distance.
pub fn hex_centers(n: usize) -> Vec<[f64; 2]> {
    // axial directions, walked counter-clockwise
    const DIRS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    let mut cells = Vec::with_capacity(n);
    if n > 0 {
        cells.push((0i64, 0i64));
    }
    let mut ring = 1i64;
    while cells.len() < n {
        let (mut q, mut r) = (DIRS[4].0 * ring, DIRS[4].1 * ring);
        for &(dq, dr) in &DIRS {
            for _ in 0..ring {
                if cells.len() < n {
                    cells.push((q, r));
                }
                q += dq;
                r += dr;
            }
        }
        ring += 1;
    }
    cells
        .into_iter()
        .map(|(q, r)| {
            let (q, r) = (q as f64, r as f64);
            [q + r / 2.0, r * 3f64.sqrt() / 2.0]
        })
        .collect()
}

pub fn generate_scenario(params: &GeneratorParams) -> Result<Scenario, ScenarioError> {
    let p = params;
    if p.num_beams == 0 {
        return Err(ScenarioError::invalid("num_beams", "must be at least 1"));
    }
    if !(p.spacing.is_finite() && p.spacing > 0.0) {
        return Err(ScenarioError::invalid("spacing", "must be positive"));
    }
    if !(p.demand_min_bps > 0.0 && p.demand_max_bps >= p.demand_min_bps && p.demand_max_bps.is_finite()) {
        return Err(ScenarioError::invalid(
            "demand range",
            "need 0 < demand_min_bps <= demand_max_bps",
        ));
    }
    if p.users_min == 0 || p.users_max < p.users_min {
        return Err(ScenarioError::invalid("users range", "need 1 <= users_min <= users_max"));
    }
    if p.k_carriers == 0 || p.carrier_width_hz == 0 {
        return Err(ScenarioError::invalid("spectrum", "carriers and carrier width must be positive"));
    }

    let unit = match p.layout {
        Layout::Hexagonal => hex_centers(p.num_beams),
        Layout::Line => (0..p.num_beams).map(|i| [i as f64, 0.0]).collect(),
    };
    let centers: Vec<[f64; 2]> = unit.iter().map(|c| [c[0] * p.spacing, c[1] * p.spacing]).collect();

    let mut rng = Prng::new(p.seed);
    let mut beams = Vec::with_capacity(p.num_beams);
    for (i, &center) in centers.iter().enumerate() {
        let demand_bps = rng.log_uniform(p.demand_min_bps, p.demand_max_bps);
        let users = p.users_min + rng.below(p.users_max - p.users_min + 1);
        beams.push(BeamDoc {
            id: i as u32,
            center,
            demand_bps,
            users,
            noise_w: p.noise_w,
            transponder: None,
        });
    }

    let gain_matrix = centers
        .iter()
        .map(|a| {
            centers
                .iter()
                .map(|b| p.beam_model.gain_at((a[0] - b[0]).hypot(a[1] - b[1])))
                .collect()
        })
        .collect();

    let doc = ScenarioDoc {
        beams,
        gain_matrix,
        spectrum: SpectrumDoc {
            b_total_hz: p.k_carriers as f64 * p.carrier_width_hz as f64,
            k_carriers: p.k_carriers,
        },
        power: PowerDoc {
            p_total_w: p.p_total_w,
            transponders: Vec::new(),
        },
        rain_margin_db: p.beam_model.rain_margin_db,
        beam_model: Some(p.beam_model),
    };
    Scenario::from_doc(&doc)
}

/// One user's channel `h` (feed-indexed) and where it was placed.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannel {
    pub position: [f64; 2],
    pub h: DVector<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserChannelSet {
    pub per_beam: Vec<Vec<UserChannel>>,
}

impl UserChannelSet {
    pub fn num_users(&self) -> usize {
        self.per_beam.iter().map(Vec::len).sum()
    }

    pub fn channel(&self, beam: usize, user: usize) -> &DVector<Complex64> {
        &self.per_beam[beam][user].h
    }
}

/// Samples `N_l` users per beam and their channel vectors.
///
/// With a beam model, users fall uniformly in a disc of `user_radius` around
/// their beam center and `|h[m]|^2` is the model gain from feed `m` at that
/// point. Without one, users sit at the beam center and `|h[m]|^2` is the
/// scenario gain `g_l[m]`. Every entry gets an independent uniform phase.
pub fn generate_user_channels(s: &Scenario, seed: u64) -> UserChannelSet {
    let l_count = s.num_beams();
    let mut rng = Prng::new(seed);
    let two_pi = 2.0 * std::f64::consts::PI;
    let per_beam = (0..l_count)
        .map(|l| {
            let center = s.beams()[l].center;
            (0..s.beams()[l].users)
                .map(|_| {
                    let radial = rng.uniform().sqrt();
                    let angle = two_pi * rng.uniform();
                    let (position, gains): ([f64; 2], Vec<f64>) = match s.beam_model() {
                        Some(model) => {
                            let rad = model.user_radius * radial;
                            let pos = [center[0] + rad * angle.cos(), center[1] + rad * angle.sin()];
                            let g = (0..l_count)
                                .map(|m| {
                                    let c = s.beams()[m].center;
                                    model.gain_at((pos[0] - c[0]).hypot(pos[1] - c[1]))
                                })
                                .collect();
                            (pos, g)
                        }
                        None => (center, (0..l_count).map(|m| s.gain(l, m)).collect()),
                    };
                    let h = DVector::from_iterator(
                        l_count,
                        gains
                            .iter()
                            .map(|g| Complex64::from_polar(g.sqrt(), two_pi * rng.uniform())),
                    );
                    UserChannel { position, h }
                })
                .collect()
        })
        .collect();
    UserChannelSet { per_beam }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_beam_has_no_interference_entries() {
        for seed in [0, 1, 99] {
            let s = generate_scenario(&GeneratorParams {
                num_beams: 1,
                seed,
                ..Default::default()
            })
            .unwrap();
            assert_eq!(s.num_beams(), 1);
            assert!(s.gain(0, 0) > 0.0);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let params = GeneratorParams {
            seed: 1234,
            ..Default::default()
        };
        let a = generate_scenario(&params).unwrap();
        let b = generate_scenario(&params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(generate_user_channels(&a, 5), generate_user_channels(&b, 5));
    }

    #[test]
    fn hexagonal_seven_beams_are_diagonally_dominant() {
        let s = generate_scenario(&GeneratorParams {
            num_beams: 7,
            seed: 42,
            ..Default::default()
        })
        .unwrap();
        for l in 0..7 {
            for m in 0..7 {
                if m != l {
                    assert!(s.gain(l, m) / s.gain(l, l) < 1.0);
                }
            }
        }
    }

    #[test]
    fn hex_spiral_neighbours_are_unit_distance() {
        let c = hex_centers(7);
        for p in &c[1..] {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
        let c19 = hex_centers(19);
        for i in 0..19 {
            for j in 0..i {
                let d = (c19[i][0] - c19[j][0]).hypot(c19[i][1] - c19[j][1]);
                assert!(d > 1.0 - 1e-9, "cells {i} and {j} overlap");
            }
        }
    }

    #[test]
    fn gain_decays_with_center_distance() {
        let s = generate_scenario(&GeneratorParams {
            num_beams: 5,
            layout: Layout::Line,
            ..Default::default()
        })
        .unwrap();
        for m in 1..5 {
            assert!(s.gain(0, m) < s.gain(0, m - 1));
        }
    }

    #[test]
    fn rain_margin_scales_every_gain() {
        let base = GeneratorParams::default();
        let mut dry = base.clone();
        dry.beam_model.rain_margin_db = 0.0;
        let wet = generate_scenario(&base).unwrap();
        let dry = generate_scenario(&dry).unwrap();
        let factor = 10f64.powf(-base.beam_model.rain_margin_db / 10.0);
        for l in 0..wet.num_beams() {
            for m in 0..wet.num_beams() {
                let want = dry.gain(l, m) * factor;
                assert!((wet.gain(l, m) - want).abs() <= 1e-12 * want);
            }
        }
    }

    #[test]
    fn single_user_channel_matches_model_gain() {
        let s = generate_scenario(&GeneratorParams {
            num_beams: 1,
            users_min: 1,
            users_max: 1,
            ..Default::default()
        })
        .unwrap();
        let set = generate_user_channels(&s, 8);
        assert_eq!(set.num_users(), 1);
        let u = &set.per_beam[0][0];
        let model = s.beam_model().unwrap();
        let offset = u.position[0].hypot(u.position[1]);
        assert!(offset <= model.user_radius);
        let expected = model.gain_at(offset);
        assert!((u.h[0].norm_sqr() - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn user_counts_follow_the_scenario() {
        let s = generate_scenario(&GeneratorParams::default()).unwrap();
        let set = generate_user_channels(&s, 3);
        for (l, users) in set.per_beam.iter().enumerate() {
            assert_eq!(users.len(), s.beams()[l].users);
            assert!(users.iter().all(|u| u.h.len() == s.num_beams()));
        }
    }

    #[test]
    fn own_beam_dominates_on_average() {
        let s = generate_scenario(&GeneratorParams {
            num_beams: 3,
            users_min: 1000,
            users_max: 1000,
            seed: 11,
            ..Default::default()
        })
        .unwrap();
        let set = generate_user_channels(&s, 17);
        for l in 0..3 {
            for m in (0..3).filter(|&m| m != l) {
                let mean: f64 = set.per_beam[l]
                    .iter()
                    .map(|u| u.h[l].norm_sqr() / u.h[m].norm_sqr())
                    .sum::<f64>()
                    / 1000.0;
                assert!(mean > 1.0, "beam {l} vs {m}: {mean}");
            }
        }
    }
}
