mod common;

use common::{oracle, runs};
use liqueur_plant::events::Event;
use liqueur_plant::process::{ProcessId, Recipe, RecipeOverrides, ResourceKind};
use liqueur_plant::service::{ControlCommand, ErrorCode, LiqueurPlant, ScenarioEntry};
use proptest::prelude::*;

fn non_wait(t: Vec<(u64, String)>) -> Vec<(u64, String)> {
    t.into_iter().filter(|(_, s)| !s.starts_with("WAIT_")).collect()
}

fn lone(config: &liqueur_plant::service::SystemConfig, recipe: Recipe) -> (runs::Run, oracle::Trajectory) {
    let name = if recipe == Recipe::A { 'A' } else { 'B' };
    let expected = oracle::lone_run(config, name);
    let run = runs::run(config, vec![runs::start(0, recipe)], expected.done_cycle() + 10);
    (run, expected)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lone_runs_follow_the_oracle(
        recipe in prop::sample::select(vec![Recipe::A, Recipe::B]),
        setpoint in 10.0f64..95.0,
        mix in 0.0f64..60.0,
        dwell in 0.0f64..20.0,
        period_ms in prop::sample::select(vec![100u64, 250, 500, 1000]),
        fill_rate in 1.0f64..10.0,
        drain_rate in 1.0f64..10.0,
    ) {
        let mut config = runs::headless_config();
        config.cycle.period_ms = period_ms;
        for s in &mut config.plant.silos {
            s.fill_rate = fill_rate;
            s.drain_rate = drain_rate;
        }
        for r in [&mut config.recipes.a, &mut config.recipes.b] {
            r.setpoint = setpoint;
            r.mix_duration = mix;
        }
        config.recipes.a.dwell_s1 = dwell;
        let (run, expected) = lone(&config, recipe);
        let id = run.plant.snapshot().processes[0].id;
        prop_assert_eq!(non_wait(run.transitions(id)), expected.states);
        for (got, want) in run.plant.snapshot().silos.iter().zip(&expected.final_levels) {
            prop_assert!((got.level - want).abs() < 1e-9);
        }
        runs::check_callback_bijection(&run).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn concurrent_runs_keep_every_invariant(
        a in 0u64..150,
        b in 0u64..150,
        setpoint_a in 30.0f64..90.0,
        setpoint_b in 30.0f64..90.0,
        mix in 1.0f64..40.0,
    ) {
        let mut config = runs::headless_config();
        config.recipes.a.setpoint = setpoint_a;
        config.recipes.b.setpoint = setpoint_b;
        config.recipes.b.mix_duration = mix;
        let run = runs::run(&config, vec![runs::start(a, Recipe::A), runs::start(b, Recipe::B)], 5000);
        prop_assert!(run.all_done());
        runs::check_pipe_exclusive(&run).map_err(TestCaseError::fail)?;
        runs::check_power_exclusive(&run).map_err(TestCaseError::fail)?;
        runs::check_fifo(&run).map_err(TestCaseError::fail)?;
        runs::check_callback_bijection(&run).map_err(TestCaseError::fail)?;
    }
}

/// Every relative start offset in a window wider than either batch.
#[test]
fn all_relative_offsets_finish_safely() {
    let config = runs::headless_config();
    let mut max_len = 0;
    for d in -300i64..=300 {
        let (a, b) = if d < 0 { (0, (-d) as u64) } else { (d as u64, 0) };
        let run = runs::run(&config, vec![runs::start(a, Recipe::A), runs::start(b, Recipe::B)], 3000);
        assert!(run.all_done(), "offset {d}");
        runs::check_pipe_exclusive(&run).unwrap_or_else(|e| panic!("offset {d}: {e}"));
        runs::check_power_exclusive(&run).unwrap_or_else(|e| panic!("offset {d}: {e}"));
        runs::check_fifo(&run).unwrap_or_else(|e| panic!("offset {d}: {e}"));
        max_len = max_len.max(run.lines.len());
    }
    // Serialized worst case stays below the two lone runs back to back.
    assert!(max_len < 258 + 249 + 300, "{max_len}");
}

#[test]
fn contention_queues_the_later_requester() {
    let run = runs::run(
        &runs::headless_config(),
        vec![runs::start(0, Recipe::A), runs::start(0, Recipe::B)],
        2000,
    );
    assert!(run.all_done());
    let queued = run
        .lines
        .iter()
        .any(|l| l.snapshot.resources.iter().any(|r| r.kind == ResourceKind::Pipe && !r.queue.is_empty()));
    assert!(queued, "simultaneous starts must contend for the pipe");
    // B waits for A's fill, so it finishes later than alone.
    let b_done = run
        .transitions(ProcessId(2))
        .into_iter()
        .find(|(_, s)| s == "DONE")
        .unwrap()
        .0;
    assert!(b_done > oracle::lone_run(&runs::headless_config(), 'B').done_cycle());
}

#[test]
fn abort_mid_transfer_cancels_and_hands_the_pipe_on() {
    let config = runs::headless_config();
    let mut plant = LiqueurPlant::new(&config).unwrap();
    let a = plant.apply(&start(Recipe::A)).unwrap().process.unwrap();
    let b = plant.apply(&start(Recipe::B)).unwrap().process.unwrap();
    let mut events = Vec::new();
    while plant.controller().process(a).unwrap().state_name() != "TRANSFERRING" {
        events.extend(plant.run_cycle().events);
    }
    let ack = plant.apply(&ControlCommand::AbortProcess { process: a }).unwrap();
    assert_eq!(ack.effective_cycle, plant.next_cycle());
    let record = plant.run_cycle();
    let snap = plant.snapshot();
    assert_eq!(snap.process(a).unwrap().state, "ABORTED");
    assert!(snap.process(a).unwrap().held.is_empty());
    let cancelled: Vec<_> = record
        .events
        .iter()
        .filter_map(|e| match e {
            Event::Cancelled { process, silo } if *process == a => Some(*silo),
            _ => None,
        })
        .collect();
    assert_eq!(cancelled.len(), 2, "{:?}", record.events);
    assert!(snap.silos.iter().filter(|s| s.claimed_by.is_none()).count() >= 2);
    let err = plant.apply(&ControlCommand::AbortProcess { process: a }).unwrap_err();
    assert_eq!(err.code, ErrorCode::AlreadyDone);
    let r = plant.run_until(|p| p.is_idle(), 2000);
    assert!(r.satisfied);
    assert_eq!(plant.snapshot().process(b).unwrap().state, "DONE");
}

#[test]
fn repeat_starts_the_next_batch() {
    let config = runs::headless_config();
    let mut plant = LiqueurPlant::new(&config).unwrap();
    let cmd = ControlCommand::StartProcess {
        recipe: Recipe::B,
        params: RecipeOverrides { repeat: Some(true), ..Default::default() },
    };
    let id = plant.apply(&cmd).unwrap().process.unwrap();
    let lone = oracle::lone_run(&config, 'B').done_cycle();
    for _ in 0..lone * 2 + 50 {
        plant.run_cycle();
    }
    let p = plant.snapshot().process(id).unwrap().clone();
    assert!(p.batches_completed >= 2, "{p:?}");
    assert_ne!(p.state, "DONE");
}

#[test]
fn second_start_on_claimed_silos_is_busy() {
    let mut plant = LiqueurPlant::new(&runs::headless_config()).unwrap();
    plant.apply(&start(Recipe::A)).unwrap();
    let err = plant.apply(&start(Recipe::A)).unwrap_err();
    assert_eq!(err.code, ErrorCode::SilosBusy);
}

#[test]
fn scenario_entries_apply_in_the_gap_before_their_cycle() {
    let entries = vec![
        ScenarioEntry { cycle: 5, command: start(Recipe::B) },
        ScenarioEntry { cycle: 5, command: start(Recipe::A) },
    ];
    let run = runs::run(&runs::headless_config(), entries, 2000);
    let first = &run.lines[5];
    assert_eq!(first.commands.len(), 2);
    assert!(run.lines[..5].iter().all(|l| l.commands.is_empty()));
    assert!(run.all_done());
}

fn start(recipe: Recipe) -> ControlCommand {
    ControlCommand::StartProcess { recipe, params: RecipeOverrides::default() }
}
