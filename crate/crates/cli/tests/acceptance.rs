//! Acceptance suite: reproduces the recorded 2020 contest figures and
//! drives the metric, generator, pipeline, and service end to end,
//! printing one pass/fail line per criterion.

use std::collections::BTreeMap;
use std::fs;
use std::net::TcpListener;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tablebench_core::files::{read_database, read_task, task_to_json, write_task, PoseDto};
use tablebench_core::{
    BoundingBox, Pose, Rotation, SceneConfiguration, SetTag, Task, TaskObject, Vec3,
};
use tablebench_harness::{read_report, write_script, Action, ActionScript, Termination};
use tablebench_scenegen::files::read_template;
use tablebench_scenegen::{
    generate_batch, manifest_to_json, penetration_depth, validate_scene, BatchEntry,
    GenerationConfig, Obb, Support, Workspace,
};
use tablebench_scoring::{
    baseline_error, ede, evaluate_task, grasp_success_rate, improvement, round_half_away,
    GraspStats, MissingObjectMode, UebPolicy,
};
use tablebench_service::{Payload, PrecomputedRun, TaskSolution};

/// Mean real-robot baseline error, cm.
const REAL_BASELINE: f64 = 49.75;
/// Per-task real-robot baseline errors, cm.
const TASK_BASELINES: [f64; 5] = [41.49, 52.59, 52.41, 52.41, 49.84];
/// Real-robot finals: (error cm, improvement %) per ranked team.
const REAL_FINALS: [(f64, f64); 5] = [
    (34.29, 31.1),
    (35.02, 29.6),
    (41.06, 17.5),
    (42.26, 15.1),
    (46.47, 6.6),
];
/// Real-robot per-task cells, (error cm, improvement %), teams by rank.
const REAL_TASK_CELLS: [[(f64, f64); 5]; 5] = [
    [
        (19.29, 53.5),
        (27.59, 47.5),
        (41.29, 21.2),
        (41.62, 20.6),
        (41.64, 16.5),
    ],
    [
        (16.07, 61.3),
        (33.99, 35.4),
        (36.44, 30.5),
        (42.87, 18.2),
        (45.73, 8.3),
    ],
    [
        (29.78, 28.2),
        (38.90, 26.0),
        (43.68, 16.7),
        (43.08, 17.8),
        (49.84, 0.0),
    ],
    [
        (34.02, 18.0),
        (40.22, 23.5),
        (43.79, 16.5),
        (46.93, 10.5),
        (46.34, 7.0),
    ],
    [
        (25.08, 39.6),
        (52.59, 0.0),
        (52.41, 0.0),
        (52.41, 0.0),
        (49.84, 0.0),
    ],
];
/// Recorded per-task means of the five finalists: (error cm, improvement %).
const TASK_MEANS: [(f64, f64); 5] = [
    (24.85, 40.1),
    (38.66, 26.5),
    (43.52, 17.0),
    (45.38, 13.4),
    (46.68, 6.3),
];
/// Simulation standings: (error cm, improvement %) for the 14 ranked teams.
const SIM_ROWS: [(f64, f64); 14] = [
    (29.21, 10.3),
    (29.43, 9.6),
    (30.15, 7.4),
    (30.28, 7.0),
    (30.56, 6.2),
    (30.95, 4.9),
    (31.04, 4.7),
    (31.82, 2.3),
    (31.84, 2.2),
    (31.84, 2.2),
    (31.88, 2.1),
    (31.88, 2.1),
    (32.15, 2.0),
    (32.22, 1.0),
];
/// Recorded grasp tallies: (successes, attempts, rate %).
const GRASP_ROWS: [(u64, u64, f64); 5] = [
    (26, 33, 78.8),
    (21, 34, 61.8),
    (13, 17, 76.5),
    (9, 32, 28.1),
    (2, 3, 66.7),
];

fn main() {
    let criteria: [(&str, Option<f64>, fn() -> Result<String, String>); 9] = [
        (
            "final and per-task improvements",
            Some(1.0),
            c1_improvements,
        ),
        ("per-task means of the finalists", Some(1.0), c2_task_means),
        (
            "simulation standings consistency",
            Some(1.0),
            c3_sim_consistency,
        ),
        ("grasp success rates", Some(1.0), c4_grasp_rates),
        ("metric property suite", Some(10.0), c5_metric_properties),
        ("analytic error oracles", None, c6_analytic_oracles),
        ("generation suite", Some(60.0), c7_generation),
        ("end-to-end golden path", Some(30.0), c8_golden_path),
        ("service durability", Some(30.0), c9_service_durability),
    ];
    let mut failed = 0usize;
    for (index, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|panic| Err(format!("panicked: {}", panic_text(&panic))));
        let elapsed = start.elapsed().as_secs_f64();
        let result = match (result, budget) {
            (Ok(_), Some(limit)) if elapsed >= *limit => {
                Err(format!("took {elapsed:.1} s, budget {limit} s"))
            }
            (other, _) => other,
        };
        match result {
            Ok(detail) => {
                println!(
                    "criterion {} ({name}): pass — {detail} ({elapsed:.2} s)",
                    index + 1
                )
            }
            Err(reason) => {
                failed += 1;
                println!(
                    "criterion {} ({name}): FAIL — {reason} ({elapsed:.2} s)",
                    index + 1
                )
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_text(panic: &(dyn std::any::Any + Send)) -> String {
    panic
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| panic.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "opaque panic".into())
}

fn round1(value: f64) -> f64 {
    round_half_away(value, 1)
}

/// Criterion 1: recorded final errors and the baseline reproduce the
/// recorded improvement percentages, finals and per-task cells alike.
fn c1_improvements() -> Result<String, String> {
    for (error, expected) in REAL_FINALS {
        let got = round1(improvement(error, REAL_BASELINE).map_err(|e| e.to_string())?);
        if (got - expected).abs() > 0.05 {
            return Err(format!(
                "final error {error:.2} cm: improvement {got:.1}%, recorded {expected:.1}%"
            ));
        }
    }
    let mut bad = Vec::new();
    for (team, cells) in REAL_TASK_CELLS.iter().enumerate() {
        for (task, (error, expected)) in cells.iter().enumerate() {
            let baseline = TASK_BASELINES[task];
            let got = round1(improvement(*error, baseline).map_err(|e| e.to_string())?);
            if (got - expected).abs() > 0.05 {
                bad.push(format!(
                    "team {} task {}: {error:.2} cm over baseline {baseline:.2} gives {got:.1}%, recorded {expected:.1}%",
                    team + 1,
                    task + 1
                ));
            }
        }
    }
    if bad.is_empty() {
        Ok("5 finals and 25 per-task improvements reproduced within 0.05 pp".into())
    } else {
        Err(format!(
            "{} of 25 per-task cells: {}",
            bad.len(),
            bad.join("; ")
        ))
    }
}

/// Criterion 2: per-task error means over the five finalists and their
/// improvements match the recorded summary row.
fn c2_task_means() -> Result<String, String> {
    for (task, (expected_mean, expected_pct)) in TASK_MEANS.iter().enumerate() {
        let mean = REAL_TASK_CELLS
            .iter()
            .map(|cells| cells[task].0)
            .sum::<f64>()
            / REAL_TASK_CELLS.len() as f64;
        if (mean - expected_mean).abs() > 0.01 {
            return Err(format!(
                "task {} mean {mean:.3} cm, recorded {expected_mean:.2} cm",
                task + 1
            ));
        }
        let got = round1(improvement(mean, TASK_BASELINES[task]).map_err(|e| e.to_string())?);
        if (got - expected_pct).abs() > 0.05 {
            return Err(format!(
                "task {} mean improvement {got:.1}%, recorded {expected_pct:.1}%",
                task + 1
            ));
        }
    }
    Ok("5 per-task means within 0.01 cm and improvements within 0.05 pp".into())
}

/// Criterion 3: one simulation baseline must explain every recorded
/// (error, improvement) standing to within 0.1 pp.
fn c3_sim_consistency() -> Result<String, String> {
    let solve = |(error, pct): (f64, f64)| 100.0 * error / (100.0 - pct);
    let first = solve(SIM_ROWS[0]);
    let last = solve(SIM_ROWS[SIM_ROWS.len() - 1]);
    if (first - last).abs() > 0.05 {
        return Err(format!(
            "baseline from the top row is {first:.3} cm but {last:.3} cm from the bottom row"
        ));
    }
    let baseline = (first + last) / 2.0;
    let mut bad = Vec::new();
    for (error, expected) in SIM_ROWS {
        let got = improvement(error, baseline).map_err(|e| e.to_string())?;
        if (got - expected).abs() > 0.1 {
            bad.push(format!(
                "({error:.2} cm, {expected:.1}%) computes to {got:.2}%"
            ));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "baseline {baseline:.2} cm explains all 14 standings within 0.1 pp"
        ))
    } else {
        Err(format!(
            "with baseline {baseline:.2} cm, {} of 14 rows disagree: {}",
            bad.len(),
            bad.join("; ")
        ))
    }
}

/// Criterion 4: grasp tallies round to the recorded success rates exactly.
fn c4_grasp_rates() -> Result<String, String> {
    for (successes, attempts, expected) in GRASP_ROWS {
        let rate = grasp_success_rate(GraspStats {
            successes,
            attempts,
        })
        .map_err(|e| e.to_string())?
        .ok_or("no attempts")?;
        let got = round1(rate * 100.0);
        if got != expected {
            return Err(format!(
                "{successes}/{attempts} rounds to {got:.1}%, recorded {expected:.1}%"
            ));
        }
    }
    Ok("all 5 recorded grasp rates reproduced exactly at 1 decimal".into())
}

fn rand_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    loop {
        let axis = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if axis.norm() > 1e-3 {
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            return Rotation::from_axis_angle(axis, angle).expect("nonzero axis");
        }
    }
}

fn rand_pose(rng: &mut ChaCha8Rng) -> Pose {
    Pose::new(
        rand_rotation(rng),
        Vec3::new(
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
        ),
    )
}

fn close(a: f64, b: f64, case: usize, what: &str) -> Result<(), String> {
    let tol = 1e-9 * a.abs().max(b.abs()).max(1.0);
    if (a - b).abs() > tol {
        return Err(format!("case {case}: {what}: {a:.15} vs {b:.15}"));
    }
    Ok(())
}

/// Criterion 5: 10,000 seeded random cases uphold symmetry, rigid-motion
/// invariance, translation exactness, the triangle inequality,
/// zero-iff-equal, and the capping bound.
fn c5_metric_properties() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2020);
    let mut ring: Vec<(BoundingBox, Pose, Pose)> = Vec::new();
    for case in 0..10_000 {
        let bbox = BoundingBox::new(
            rng.random_range(1.0..30.0),
            rng.random_range(1.0..30.0),
            rng.random_range(1.0..30.0),
        )
        .map_err(|e| e.to_string())?;
        let a = rand_pose(&mut rng);
        let b = rand_pose(&mut rng);
        let c = rand_pose(&mut rng);
        let g = rand_pose(&mut rng);

        let e_ab = ede(&bbox, &a, &b);
        close(e_ab, ede(&bbox, &b, &a), case, "symmetry")?;
        close(
            ede(&bbox, &g.compose(&a), &g.compose(&b)),
            e_ab,
            case,
            "rigid-motion invariance",
        )?;

        let mut t = Vec3::new(
            rng.random_range(-20.0..20.0),
            rng.random_range(-20.0..20.0),
            rng.random_range(-20.0..20.0),
        );
        if t.norm() < 0.01 {
            t.x += 1.0;
        }
        let shifted = Pose::new(a.rotation, a.translation + t);
        close(ede(&bbox, &a, &shifted), t.norm(), case, "pure translation")?;

        let e_ac = ede(&bbox, &a, &c);
        let e_bc = ede(&bbox, &b, &c);
        if e_ac > e_ab + e_bc + 1e-9 * (1.0 + e_ab + e_bc) {
            return Err(format!(
                "case {case}: triangle inequality: {e_ac} > {e_ab} + {e_bc}"
            ));
        }
        if ede(&bbox, &a, &a) != 0.0 {
            return Err(format!("case {case}: error against itself is nonzero"));
        }
        if ede(&bbox, &a, &shifted) <= 0.0 {
            return Err(format!("case {case}: distinct poses score zero"));
        }

        ring.push((bbox, a, b));
        if ring.len() > 3 {
            ring.remove(0);
        }
        let policy = if case % 2 == 0 {
            UebPolicy::SizeBased2020
        } else {
            UebPolicy::constant(30.0).map_err(|e| e.to_string())?
        };
        let mut objects = Vec::new();
        let mut target = SceneConfiguration::new();
        let mut solution = SceneConfiguration::new();
        for (i, (bbox, tgt, sol)) in ring.iter().enumerate() {
            let id = format!("o{i}");
            objects.push(TaskObject {
                instance_id: id.clone(),
                model_id: format!("m{i}"),
                category: "prop".into(),
                bbox: bbox.clone(),
            });
            target.set(id.clone(), *tgt);
            solution.set(id, *sol);
        }
        let task = Task::new("case", SetTag::Contest, objects, target.clone(), target)
            .map_err(|e| e.to_string())?;
        let score = evaluate_task(&task, &solution, &policy, MissingObjectMode::Strict)
            .map_err(|e| e.to_string())?;
        let bound = baseline_error(&task, &policy);
        if score.task_error < 0.0 || score.task_error > bound + 1e-12 {
            return Err(format!(
                "case {case}: task error {} outside [0, {bound}]",
                score.task_error
            ));
        }
    }
    Ok("10000 randomized cases uphold all six metric properties".into())
}

/// Criterion 6: closed-form displacements of the 3 cm cube.
fn c6_analytic_oracles() -> Result<String, String> {
    let bbox = BoundingBox::new(3.0, 3.0, 3.0).map_err(|e| e.to_string())?;
    let target = Pose::identity();
    let checks = [
        (
            Pose::new(Rotation::about_z(std::f64::consts::PI), Vec3::zeros()),
            3.0 * std::f64::consts::SQRT_2,
            "half turn",
        ),
        (
            Pose::new(
                Rotation::about_z(std::f64::consts::FRAC_PI_2),
                Vec3::zeros(),
            ),
            3.0,
            "quarter turn",
        ),
        (
            Pose::from_translation(Vec3::new(3.0, 4.0, 0.0)),
            5.0,
            "3-4-0 translation",
        ),
    ];
    for (solution, expected, what) in checks {
        let got = ede(&bbox, &target, &solution);
        if (got - expected).abs() > 1e-12 {
            return Err(format!("{what}: {got:.15}, expected {expected:.15}"));
        }
    }
    Ok("half turn, quarter turn, and translation hit closed forms within 1e-12".into())
}

fn assets_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

const TEMPLATE_NAMES: [&str; 5] = [
    "adjacent-pair",
    "line-three",
    "stack-two",
    "swap-pair",
    "tower-five",
];

fn aabb(obb: &Obb) -> (Vec3, Vec3) {
    let corners = obb.corners();
    let mut lo = corners[0];
    let mut hi = corners[0];
    for c in &corners[1..] {
        lo = lo.inf(c);
        hi = hi.sup(c);
    }
    (lo, hi)
}

/// Samples the two boxes' axis-aligned overlap region for a point lying
/// strictly inside both boxes eroded by `margin`. Such a point would be
/// interior to both boxes, hence inside the overlap region; an empty or
/// flat region therefore proves no such point exists.
fn oracle_sees_deep_overlap(a: &Obb, b: &Obb, margin: f64, rng: &mut ChaCha8Rng) -> Option<bool> {
    let (lo_a, hi_a) = aabb(a);
    let (lo_b, hi_b) = aabb(b);
    let lo = lo_a.sup(&lo_b);
    let hi = hi_a.inf(&hi_b);
    if lo.x >= hi.x || lo.y >= hi.y || lo.z >= hi.z {
        return None;
    }
    for _ in 0..100_000 {
        let p = Vec3::new(
            rng.random_range(lo.x..hi.x),
            rng.random_range(lo.y..hi.y),
            rng.random_range(lo.z..hi.z),
        );
        if a.contains_eroded(p, margin) && b.contains_eroded(p, margin) {
            return Some(true);
        }
    }
    Some(false)
}

/// Criterion 7: a 200-task seeded batch is fully valid, regenerates
/// byte-identically, and its overlap verdicts agree with point sampling.
fn c7_generation() -> Result<String, String> {
    let assets = assets_dir();
    let db = read_database(assets.join("objects.json")).map_err(|e| e.to_string())?;
    let entries = TEMPLATE_NAMES
        .iter()
        .map(|name| {
            let template = read_template(assets.join(format!("templates/{name}.json")))
                .map_err(|e| e.to_string())?;
            Ok(BatchEntry {
                template,
                count: 40,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let workspace = Workspace::new(0.0, 80.0, 0.0, 60.0, 0.0, 60.0).map_err(|e| e.to_string())?;
    let cfg = GenerationConfig {
        seed: 2026,
        ..GenerationConfig::default()
    };
    let tasks = generate_batch(&entries, &db, &workspace, &cfg, 0.1).map_err(|e| e.to_string())?;
    if tasks.len() != 200 {
        return Err(format!("generated {} tasks, wanted 200", tasks.len()));
    }
    for generated in &tasks {
        let task = &generated.task;
        for (scene_name, scene) in [("initial", &task.initial), ("target", &task.target)] {
            let outcome = validate_scene(scene, &task.objects, &workspace, &cfg)
                .map_err(|e| e.to_string())?;
            if !outcome.is_valid() {
                return Err(format!(
                    "{} {scene_name} scene: {}",
                    task.task_id, outcome.violations[0]
                ));
            }
        }
    }

    let again = generate_batch(&entries, &db, &workspace, &cfg, 0.1).map_err(|e| e.to_string())?;
    if manifest_to_json(&tasks) != manifest_to_json(&again) {
        return Err("regenerated manifest differs".into());
    }
    for (first, second) in tasks.iter().zip(&again) {
        if task_to_json(&first.task) != task_to_json(&second.task) {
            return Err(format!("{} regenerates differently", first.task.task_id));
        }
    }

    let margin = cfg.clearance_tol / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0u64;
    let mut sampled = 0u64;
    for generated in &tasks {
        let task = &generated.task;
        for scene in [&task.initial, &task.target] {
            let boxes: Vec<Obb> = task
                .objects
                .iter()
                .map(|o| Obb::from_pose(&o.bbox, scene.get(&o.instance_id).expect("pose")))
                .collect();
            for i in 0..boxes.len() {
                for j in i + 1..boxes.len() {
                    pairs += 1;
                    let depth = penetration_depth(&boxes[i], &boxes[j]).unwrap_or(0.0);
                    let invalid = depth > cfg.clearance_tol;
                    let deep =
                        match oracle_sees_deep_overlap(&boxes[i], &boxes[j], margin, &mut rng) {
                            Some(found) => {
                                sampled += 1;
                                found
                            }
                            None => false,
                        };
                    if deep != invalid {
                        return Err(format!(
                            "{}: objects {i} and {j} sampled {deep} but depth {depth:.4} says {invalid}",
                            task.task_id
                        ));
                    }
                }
            }
        }
    }
    Ok(format!(
        "200 tasks valid and byte-stable; oracle agrees on {pairs} pairs ({sampled} sampled)"
    ))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_tablebench"))
        .args(args)
        .output()
        .map_err(|e| format!("spawning the tool: {e}"))?;
    if !output.status.success() {
        return Err(format!(
            "`{}` exited with {:?}: {}",
            args.join(" "),
            output.status.code(),
            String::from_utf8_lossy(&output.stderr).trim()
        ));
    }
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

/// A move is sound when the scene stays valid and the moved object does not
/// end up resting on something that still has to move away from under it.
fn placement_ok(
    id: &str,
    scene: &SceneConfiguration,
    objects: &[TaskObject],
    workspace: &Workspace,
    cfg: &GenerationConfig,
    remaining: &[String],
) -> bool {
    match validate_scene(scene, objects, workspace, cfg) {
        Ok(outcome) if outcome.is_valid() => match outcome.supporters.get(id) {
            Some(Support::OnInstance(parent)) => !remaining.contains(parent),
            _ => true,
        },
        _ => false,
    }
}

fn poses_differ(a: &Pose, b: &Pose) -> bool {
    a.translation != b.translation || a.rotation.matrix() != b.rotation.matrix()
}

fn parking_spot(
    id: &str,
    state: &SceneConfiguration,
    objects: &[TaskObject],
    workspace: &Workspace,
    cfg: &GenerationConfig,
    remaining: &[String],
) -> Option<Pose> {
    let current = *state.get(id)?;
    let mut y = 6.0;
    while y < 56.0 {
        let mut x = 6.0;
        while x < 76.0 {
            let pose = Pose::new(current.rotation, Vec3::new(x, y, current.translation.z));
            let mut candidate = state.clone();
            candidate.set(id.to_string(), pose);
            if placement_ok(id, &candidate, objects, workspace, cfg, remaining) {
                return Some(pose);
            }
            x += 4.0;
        }
        y += 4.0;
    }
    None
}

/// Plans a pick-and-place script that reaches the target scene exactly:
/// greedily moves any object whose target spot is free, parking a blocker
/// at a free spot when every direct move is stuck.
fn plan_script(
    task: &Task,
    workspace: &Workspace,
    cfg: &GenerationConfig,
) -> Result<ActionScript, String> {
    let mut state = task.initial.clone();
    let mut actions = Vec::new();
    let mut remaining: Vec<String> = task
        .objects
        .iter()
        .map(|o| o.instance_id.clone())
        .filter(|id| {
            poses_differ(
                state.get(id).expect("pose"),
                task.target.get(id).expect("pose"),
            )
        })
        .collect();
    remaining.sort();
    let mut round = 0usize;
    while !remaining.is_empty() {
        round += 1;
        if round > 50 {
            return Err(format!("{}: planner made no progress", task.task_id));
        }
        let mut moved = false;
        let mut index = 0;
        while index < remaining.len() {
            let id = remaining[index].clone();
            let goal = *task.target.get(&id).expect("pose");
            let mut candidate = state.clone();
            candidate.set(id.clone(), goal);
            if placement_ok(&id, &candidate, &task.objects, workspace, cfg, &remaining) {
                actions.push(Action::Pick { id: id.clone() });
                actions.push(Action::Place {
                    id: id.clone(),
                    pose: goal,
                });
                state = candidate;
                remaining.remove(index);
                moved = true;
            } else {
                index += 1;
            }
        }
        if !moved {
            let id = remaining[round % remaining.len()].clone();
            let spot = parking_spot(&id, &state, &task.objects, workspace, cfg, &remaining)
                .ok_or_else(|| format!("{}: no free parking spot for {id}", task.task_id))?;
            actions.push(Action::Pick { id: id.clone() });
            actions.push(Action::Place {
                id: id.clone(),
                pose: spot,
            });
            state.set(id, spot);
        }
    }
    Ok(ActionScript::new(actions))
}

fn stalling_script(task: &Task) -> ActionScript {
    let id = task.objects[0].instance_id.clone();
    let pose = *task.initial.get(&id).expect("pose");
    let mut actions = Vec::new();
    for _ in 0..25 {
        actions.push(Action::Pick { id: id.clone() });
        actions.push(Action::Place {
            id: id.clone(),
            pose,
        });
    }
    ActionScript::new(actions)
}

fn task_files(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "json")
                && p.file_name().is_some_and(|name| name != "manifest.json")
        })
        .collect();
    paths.sort();
    Ok(paths)
}

fn golden_pipeline(root: &Path) -> Result<(String, String), String> {
    let assets = assets_dir();
    let db = assets.join("objects.json");
    let tasks_dir = root.join("tasks");
    let mut args: Vec<String> = vec!["gen-tasks".into(), "--quiet".into()];
    for name in TEMPLATE_NAMES {
        args.push("--template".into());
        args.push(
            assets
                .join(format!("templates/{name}.json"))
                .display()
                .to_string(),
        );
    }
    args.extend([
        "--db".into(),
        db.display().to_string(),
        "--out".into(),
        tasks_dir.display().to_string(),
        "--seed".into(),
        "7".into(),
        "--count".into(),
        "1".into(),
    ]);
    run_cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;

    let workspace = Workspace::new(0.0, 80.0, 0.0, 60.0, 0.0, 60.0).map_err(|e| e.to_string())?;
    let cfg = GenerationConfig::default();
    let paths = task_files(&tasks_dir)?;
    if paths.len() != 5 {
        return Err(format!("generated {} task files, wanted 5", paths.len()));
    }
    let scripts = root.join("scripts");
    let reports = root.join("reports");
    fs::create_dir_all(&scripts).map_err(|e| e.to_string())?;
    fs::create_dir_all(&reports).map_err(|e| e.to_string())?;

    let mut baseline_sum = 0.0;
    let mut score_args: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (index, path) in paths.iter().enumerate() {
        let task = read_task(path).map_err(|e| e.to_string())?;
        baseline_sum += baseline_error(&task, &UebPolicy::SizeBased2020);

        let plan = plan_script(&task, &workspace, &cfg)?;
        let stall = stalling_script(&task);
        for (team, script) in [("perfect", plan), ("stalled", stall)] {
            let script_path = scripts.join(format!("{team}-{index}.json"));
            let report_path = reports.join(format!("{team}-{index}.json"));
            write_script(&script_path, &script).map_err(|e| e.to_string())?;
            run_cli(&[
                "run",
                "--quiet",
                "--task",
                &path.display().to_string(),
                "--script",
                &script_path.display().to_string(),
                "--out",
                &report_path.display().to_string(),
            ])?;
            score_args.entry(team).or_default().extend([
                "--task".to_string(),
                path.display().to_string(),
                "--report".to_string(),
                report_path.display().to_string(),
            ]);
        }
    }

    let truncated = read_report(&reports.join("stalled-0.json")).map_err(|e| e.to_string())?;
    if truncated.terminated != Termination::TimeLimit {
        return Err(format!(
            "stalled run ended with {:?}, not a time-limit cut",
            truncated.terminated
        ));
    }

    let mut team_reports = Vec::new();
    for (team, extra) in &score_args {
        let out = root.join(format!("{team}.json"));
        let mut args: Vec<String> = vec!["score".into(), "--quiet".into()];
        args.extend(extra.iter().cloned());
        args.extend([
            "--team".to_string(),
            team.to_string(),
            "--out".to_string(),
            out.display().to_string(),
        ]);
        run_cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
        team_reports.push(out);
    }

    let baseline = baseline_sum / paths.len() as f64;
    let csv_path = root.join("leaderboard.csv");
    let mut args: Vec<String> = vec!["rank".into()];
    for report in &team_reports {
        args.push("--report".into());
        args.push(report.display().to_string());
    }
    args.extend([
        "--baseline-cm".to_string(),
        format!("{baseline}"),
        "--out-csv".to_string(),
        csv_path.display().to_string(),
    ]);
    let stdout = run_cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
    let csv = fs::read_to_string(&csv_path).map_err(|e| e.to_string())?;
    Ok((stdout, csv))
}

/// Criterion 8: generated tasks, planned scripts, execution, scoring, and
/// ranking produce a perfect winner over a time-limited straggler, twice,
/// byte-for-byte.
fn c8_golden_path() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    fs::create_dir_all(&first).map_err(|e| e.to_string())?;
    fs::create_dir_all(&second).map_err(|e| e.to_string())?;
    let (stdout, csv) = golden_pipeline(&first)?;
    let (_, csv_again) = golden_pipeline(&second)?;
    if csv != csv_again {
        return Err("leaderboard differs between the two full re-runs".into());
    }
    let rows: Vec<&str> = csv.lines().collect();
    if rows.len() != 4 {
        return Err(format!("leaderboard has {} rows, wanted 4", rows.len()));
    }
    if !rows[1].starts_with("1,perfect,0.00,100.0,") {
        return Err(format!("winner row reads `{}`", rows[1]));
    }
    if !rows[2].starts_with("2,stalled,") || rows[2].contains(",0.00,") {
        return Err(format!("straggler row reads `{}`", rows[2]));
    }
    if !stdout.contains("perfect") {
        return Err("rank output never mentions the winner".into());
    }
    Ok("perfect team scores 0.00 cm at 100.0% and rank 1; reruns byte-identical".into())
}

struct ChildGuard(Child);

impl Drop for ChildGuard {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn free_port() -> Result<u16, String> {
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| e.to_string())?;
    Ok(listener.local_addr().map_err(|e| e.to_string())?.port())
}

fn spawn_server(contest: &Path, data: &Path, addr: &str) -> Result<ChildGuard, String> {
    let child = Command::new(env!("CARGO_BIN_EXE_tablebench"))
        .args([
            "serve",
            "--quiet",
            "--contest",
            &contest.display().to_string(),
            "--bind",
            addr,
            "--data-dir",
            &data.display().to_string(),
        ])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    Ok(ChildGuard(child))
}

fn wait_ready(client: &reqwest::blocking::Client, url: &str) -> Result<(), String> {
    for _ in 0..100 {
        if let Ok(resp) = client.get(url).send() {
            if resp.status().is_success() {
                return Ok(());
            }
        }
        std::thread::sleep(Duration::from_millis(100));
    }
    Err("service never came up".into())
}

fn cube_task(index: usize) -> Result<Task, String> {
    let bbox = BoundingBox::new(4.0, 4.0, 4.0).map_err(|e| e.to_string())?;
    let id = "block";
    let mut initial = SceneConfiguration::new();
    initial.set(
        id,
        Pose::from_translation(Vec3::new(20.0 + 10.0 * index as f64, 20.0, 0.0)),
    );
    let mut target = SceneConfiguration::new();
    target.set(
        id,
        Pose::from_translation(Vec3::new(50.0, 20.0 + 8.0 * index as f64, 0.0)),
    );
    Task::new(
        format!("t-{index:04}"),
        SetTag::Contest,
        vec![TaskObject {
            instance_id: id.into(),
            model_id: "block_small".into(),
            category: "block".into(),
            bbox,
        }],
        initial,
        target,
    )
    .map_err(|e| e.to_string())
}

/// Criterion 9: a submission survives kill -9 after acknowledgment, and
/// the restarted service reproduces its scored record byte for byte.
fn c9_service_durability() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("data");
    let tasks_dir = dir.path().join("tasks");
    fs::create_dir_all(&tasks_dir).map_err(|e| e.to_string())?;
    let mut solutions = BTreeMap::new();
    for index in 0..2 {
        let task = cube_task(index)?;
        let poses: BTreeMap<String, PoseDto> = task
            .target
            .iter()
            .map(|(id, pose)| (id.to_string(), PoseDto::from_pose(pose)))
            .collect();
        solutions.insert(
            task.task_id.clone(),
            TaskSolution {
                solution: poses,
                execution_time_s: 90.0,
            },
        );
        write_task(tasks_dir.join(format!("{}.json", task.task_id)), &task)
            .map_err(|e| e.to_string())?;
    }
    let contest_path = dir.path().join("contest.json");
    let contest = serde_json::json!({
        "config": {
            "contest_id": "durability",
            "policy": { "variant": "size_based_2020" },
            "stage": "contest",
            "execution": {
                "workspace": {
                    "x_min": 0.0, "x_max": 80.0,
                    "y_min": 0.0, "y_max": 60.0,
                    "z0": 0.0, "z_max": 60.0
                }
            }
        },
        "tasks_dir": tasks_dir,
    });
    fs::write(
        &contest_path,
        serde_json::to_string_pretty(&contest).unwrap(),
    )
    .map_err(|e| e.to_string())?;

    let port = free_port()?;
    let addr = format!("127.0.0.1:{port}");
    let base = format!("http://{addr}/v1");
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(2))
        .build()
        .map_err(|e| e.to_string())?;

    let server = spawn_server(&contest_path, &data, &addr)?;
    wait_ready(&client, &format!("{base}/contests/durability/leaderboard"))?;

    let payload = Payload::PrecomputedRuns {
        runs: vec![PrecomputedRun {
            backend: 1,
            tasks: solutions,
            grasp: GraspStats {
                successes: 3,
                attempts: 4,
            },
        }],
    };
    let body = serde_json::json!({ "team_id": "red", "payload": payload });
    let response = client
        .post(format!("{base}/contests/durability/submissions"))
        .json(&body)
        .send()
        .map_err(|e| e.to_string())?;
    if !response.status().is_success() {
        return Err(format!("submission refused: {}", response.status()));
    }
    let submission_id = response
        .json::<serde_json::Value>()
        .map_err(|e| e.to_string())?["submission_id"]
        .as_str()
        .ok_or("no submission id in the acknowledgment")?
        .to_string();

    let status_url = format!("{base}/submissions/{submission_id}");
    let before = client
        .get(&status_url)
        .send()
        .map_err(|e| e.to_string())?
        .text()
        .map_err(|e| e.to_string())?;
    if !before.contains("\"state\":\"scored\"") {
        return Err(format!("submission not scored before the kill: {before}"));
    }

    drop(server);

    let server = spawn_server(&contest_path, &data, &addr)?;
    wait_ready(&client, &format!("{base}/contests/durability/leaderboard"))?;
    let after = client
        .get(&status_url)
        .send()
        .map_err(|e| e.to_string())?
        .text()
        .map_err(|e| e.to_string())?;
    if after != before {
        return Err(format!(
            "record changed across the restart: {before} vs {after}"
        ));
    }

    let response = client
        .post(format!("{base}/contests/durability/submissions"))
        .json(&body)
        .send()
        .map_err(|e| e.to_string())?;
    if !response.status().is_success() {
        return Err(format!("resubmission refused: {}", response.status()));
    }
    let second_id = response
        .json::<serde_json::Value>()
        .map_err(|e| e.to_string())?["submission_id"]
        .as_str()
        .ok_or("no submission id in the second acknowledgment")?
        .to_string();
    let rescored = client
        .get(format!("{base}/submissions/{second_id}"))
        .send()
        .map_err(|e| e.to_string())?
        .text()
        .map_err(|e| e.to_string())?;
    let status_of = |text: &str| -> Result<String, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        serde_json::to_string(&value["status"]).map_err(|e| e.to_string())
    };
    if status_of(&rescored)? != status_of(&before)? {
        return Err("re-evaluation on the restarted service scored differently".into());
    }
    drop(server);
    Ok(format!(
        "{submission_id} survived kill -9 byte-identically and rescored identically"
    ))
}
