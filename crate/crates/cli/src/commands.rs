use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use satrrm::beam_hopping::{
    audit_pattern, bh_brute_force, enumerate_snapshots, lp_relax, pattern_json, proportional_baseline,
    round_dwell, AuditLimits, IlluminationPattern, Sequencing, SnapshotSet, Window,
};
use satrrm::carrier_power::{alternating_solve, best_coloring, brute_force_plan, RelaxationMode, SolverOptions};
use satrrm::format::round_sig12;
use satrrm::metrics::PlanDoc;
use satrrm::scenario::{generate_scenario, generate_user_channels, GeneratorParams, Layout};
use satrrm::sched_precode::{joint_schedule_precode, FramePlan, JointOptions, ModCodTable, UserId};
use satrrm::{load_scenario, AllocationPlan, MetricsReport, Scenario};

use crate::args::*;
use crate::error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Schedule(a) => schedule(a),
        Command::Bh(a) => bh(a),
        Command::Report(a) => report(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    let mut body = text.to_owned();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn scenario(path: &Path) -> Result<Scenario, CliError> {
    load_scenario(&read(path)?).map_err(|e| CliError::validation(&format!("scenario {}", path.display()), e))
}

fn gen(a: GenArgs) -> Result<(), CliError> {
    let params = GeneratorParams {
        num_beams: a.beams,
        layout: match a.layout {
            LayoutArg::Hex => Layout::Hexagonal,
            LayoutArg::Line => Layout::Line,
        },
        spacing: a.spacing,
        demand_min_bps: a.demand_min,
        demand_max_bps: a.demand_max,
        k_carriers: a.carriers,
        p_total_w: a.power,
        seed: a.seed,
        ..GeneratorParams::default()
    };
    let s = generate_scenario(&params).map_err(|e| CliError::validation("gen", e))?;
    write(a.out.as_ref(), &s.to_json())
}

fn solve(a: SolveArgs) -> Result<(), CliError> {
    let s = scenario(&a.scenario)?;
    let opts = SolverOptions {
        max_outer_iters: a.max_outer_iters,
        sca_max_iters: a.sca_max_iters,
        sca_tolerance: a.sca_tolerance,
        power_grid_levels: a.levels,
        relaxation_mode: match a.relaxation {
            RelaxationArg::Hungarian => RelaxationMode::BinaryHungarian,
            RelaxationArg::RelaxRound => RelaxationMode::ContinuousRelaxRound,
        },
    };
    opts.validate()?;
    if a.trace.is_some() && !matches!(a.method, SolveMethod::Alternating) {
        return Err(CliError::Validation("--trace is only produced by --method alternating".into()));
    }
    let plan = match a.method {
        SolveMethod::Coloring => best_coloring(&s),
        SolveMethod::Bruteforce => brute_force_plan(&s, opts.power_grid_levels)?,
        SolveMethod::Alternating => {
            let outcome = alternating_solve(&s, &opts)?;
            if let Some(path) = &a.trace {
                write(Some(path), &outcome.trace_csv())?;
            }
            outcome.plan
        }
    };
    write(a.out.as_ref(), &plan.to_json())
}

#[derive(Serialize)]
struct ScheduleDoc {
    alpha: f64,
    rounds_run: usize,
    converged: bool,
    slots: Vec<SlotDoc>,
    frames: FramePlan,
}

#[derive(Serialize)]
struct SlotDoc {
    users: Vec<UserId>,
    sinr: Vec<f64>,
}

fn schedule(a: ScheduleArgs) -> Result<(), CliError> {
    let s = scenario(&a.scenario)?;
    let table = match &a.modcod {
        Some(path) => ModCodTable::from_csv(&read(path)?)
            .map_err(|e| CliError::validation(&format!("modcod {}", path.display()), e))?,
        None => ModCodTable::demo(),
    };
    let opts = JointOptions {
        alpha: a.alpha,
        rounds: a.rounds,
        epsilon: a.epsilon,
        frame_size: a.frame_size,
        table,
    };
    let channels = generate_user_channels(&s, a.seed);
    let out = joint_schedule_precode(&s, &channels, &opts).map_err(|e| CliError::validation("schedule", e))?;
    let alpha = out.slots.first().map_or(0.0, |slot| slot.precoder.alpha);
    let doc = ScheduleDoc {
        alpha: round_sig12(alpha),
        rounds_run: out.rounds_run,
        converged: out.converged,
        slots: out
            .slots
            .iter()
            .map(|slot| SlotDoc {
                users: slot.users.clone(),
                sinr: slot.sinr.iter().map(|&v| round_sig12(v)).collect(),
            })
            .collect(),
        frames: out.frames.rounded(),
    };
    write(a.out.as_ref(), &serde_json::to_string_pretty(&doc).expect("schedule serializes"))
}

fn bh(a: BhArgs) -> Result<(), CliError> {
    let s = scenario(&a.scenario)?;
    let window = Window::new(a.slots, a.slot_duration)?;
    let ss = match &a.snapshots {
        Some(path) => SnapshotSet::from_json(&s, &read(path)?)?,
        None => enumerate_snapshots(&s, a.max_active, a.min_distance, a.snapshot_cap)?,
    };
    let demands = s.demands();
    let t = match a.method {
        BhMethod::Proportional => proportional_baseline(&ss, &demands, window.slots)?,
        BhMethod::Bruteforce => bh_brute_force(&ss, &demands, window.slots)?,
        BhMethod::Lp => {
            let lp = lp_relax(&ss, &demands, window)?;
            round_dwell(&ss, &demands, &lp.t, window.slots)?
        }
    };
    let pattern = IlluminationPattern::new(t, window)?;
    let eta = pattern.eta(&ss, &demands);
    let order = match a.sequencing {
        SequencingArg::Interleaved => Sequencing::Interleaved,
        SequencingArg::Blocked => Sequencing::Blocked,
    };
    let limits = AuditLimits {
        max_switches_per_window: a.max_switches,
        max_revisit_gap_slots: a.max_gap,
    };
    let audit = audit_pattern(&pattern, &ss, order, limits);
    for v in &audit.violations {
        eprintln!("warning: {v}");
    }
    write(a.out.as_ref(), &pattern_json(&pattern, eta, &audit))
}

fn report(a: ReportArgs) -> Result<(), CliError> {
    let s = scenario(&a.scenario)?;
    let context = format!("plan {}", a.plan.display());
    let doc: PlanDoc = serde_json::from_str(&read(&a.plan)?).map_err(|e| CliError::validation(&context, e))?;
    let plan = AllocationPlan::from_doc(&doc).map_err(|e| CliError::validation(&context, e))?;
    plan.validate(&s).map_err(|e| CliError::validation(&context, e))?;
    let r = MetricsReport::evaluate(&s, &plan);
    let text = match a.format {
        Format::Json => r.to_json(),
        Format::Csv => r.to_csv(),
    };
    write(a.out.as_ref(), &text)
}
