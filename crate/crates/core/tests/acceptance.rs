//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured runtime. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use common::*;
use cosmosim::agent::MOBILIZATION_DIAG;
use cosmosim::engine::{DelayMode, Universe};
use cosmosim::experiment::{
    run_experiment_delay_contrast, write_run_artifacts, DelaySpec, MetricsTable,
};
use cosmosim::model::{
    check_matrix, ConstraintRegime, PrivateAction, PublicAction, TransferMatrix, Worldview,
    EPSILON,
};
use cosmosim::protocol::{
    parse_decision, parse_private_action, parse_public_actions, scan_fields, RawDecisionText,
};
use cosmosim::secretary::validate;
use cosmosim::stick::{read_stick_dir, Stick, StickEvent};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

fn assert_runtime(criterion: u32, started: Instant, budget_secs: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < budget_secs,
        "criterion {criterion} took {elapsed:.3}s, budget {budget_secs}s"
    );
}

#[test]
fn criterion_1_parser_and_secretary_golden_suite() {
    let started = Instant::now();

    // Partial war excerpt: action fields parse to a war plus mobilization.
    let fields = scan_fields(WAR_EXCERPT);
    let actions =
        parse_public_actions(fields.public_action.as_deref().unwrap(), &known(&["Earth"])).unwrap();
    assert_eq!(
        actions,
        vec![PublicAction::LaunchAnnihilationWar {
            target: "Earth".into()
        }]
    );
    assert_eq!(
        parse_private_action(fields.private_action.as_deref().unwrap()).unwrap(),
        PrivateAction::MobilizeForWar
    );
    assert!(fields.action_reason.unwrap().contains("lowest military capability"));

    // Partial friendliness excerpt.
    let fields = scan_fields(FRIENDLY_EXCERPT);
    let actions =
        parse_public_actions(fields.public_action.as_deref().unwrap(), &known(&["Earth"])).unwrap();
    assert_eq!(
        actions,
        vec![PublicAction::ExpressFriendliness {
            target: "Earth".into()
        }]
    );
    assert!(fields.private_action.is_none());

    // Full swift-war text parses to the stated decision...
    let swift = RawDecisionText::new(SWIFT_WAR_FULL);
    let decision = parse_decision(&swift, &known(&["Earth"])).unwrap();
    assert_eq!(decision.worldview, Worldview::Militarism);
    assert_eq!(decision.matrix.diagonal(), [2.5, 1.8, 1.8, 1.8, 1.2]);
    assert_eq!(
        decision.public_actions,
        vec![PublicAction::LaunchAnnihilationWar {
            target: "Earth".into()
        }]
    );
    assert_eq!(decision.private_action, PrivateAction::MobilizeForWar);

    // ...but is rejected: its diagonal sums to 9.1 while mobilization
    // requires exactly 9.0.
    let (verdict, parsed) = validate(&swift, &militarist_snapshot(&["Earth"]));
    assert!(!verdict.is_approved());
    assert!(parsed.is_none());
    let reason = verdict.rejection_reason();
    assert!(reason.contains("diagonal sum"), "reason was: {reason}");
    assert!(reason.contains("9.1"), "reason was: {reason}");
    assert!(reason.contains("9.0"), "reason was: {reason}");

    // The delayed-mobilization text parses and is approved.
    let mobilization = RawDecisionText::new(DELAYED_MOBILIZATION_FULL);
    let decision = parse_decision(&mobilization, &known(&["Earth"])).unwrap();
    assert_eq!(decision.worldview, Worldview::Militarism);
    assert_eq!(decision.matrix.diagonal(), [2.3, 2.3, 1.7, 1.7, 1.0]);
    assert_eq!(decision.public_actions, vec![PublicAction::DoNothing]);
    assert_eq!(decision.private_action, PrivateAction::MobilizeForWar);
    let (verdict, parsed) = validate(&mobilization, &militarist_snapshot(&["Earth"]));
    assert!(verdict.is_approved(), "rejected: {}", verdict.rejection_reason());
    assert!(parsed.is_some());

    assert_runtime(1, started, 1.0);
    println!("acceptance 1 PASS: parser/secretary golden suite ({:?})", started.elapsed());
}

/// Independently coded accept predicate for criterion 2. Written as
/// direct boolean rules, separate from the production check.
fn oracle_accepts(diag: [f64; 5], regime: ConstraintRegime) -> bool {
    let eps = 1e-9;
    let sum: f64 = diag.iter().sum();
    if diag.iter().any(|v| *v < 1.0 - eps) {
        return false;
    }
    let others_ok = diag[1..].iter().all(|v| *v <= 2.5 + eps);
    match regime {
        ConstraintRegime::Default => diag[0] <= 2.5 + eps && others_ok && sum <= 9.0 + eps,
        ConstraintRegime::Mobilization => {
            diag[0] <= 3.5 + eps && others_ok && (sum - 9.0).abs() <= eps
        }
        ConstraintRegime::Cooperation => diag[0] < 1.6 - eps && others_ok && sum <= 10.0 + eps,
    }
}

#[test]
fn criterion_2_matrix_constraint_suite_matches_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240);
    let regimes = [
        ConstraintRegime::Default,
        ConstraintRegime::Mobilization,
        ConstraintRegime::Cooperation,
    ];
    for regime in regimes {
        let mut checked = 0;
        while checked < 220 {
            let mut diag = [0.0; 5];
            for (i, v) in diag.iter_mut().enumerate() {
                let hi = if i == 0 { 3.7 } else { 2.7 };
                *v = rng.random_range(0.9..hi);
            }
            // Half the samples get an exact-sum construction so the
            // mobilization equality rule is exercised on both sides.
            if checked % 2 == 0 {
                let partial: f64 = diag[..4].iter().sum();
                let last = 9.0 - partial;
                if last <= 0.05 {
                    continue;
                }
                diag[4] = last;
            }
            let matrix = TransferMatrix::from_diagonal(diag).unwrap();
            let accepted = check_matrix(&matrix, regime).is_accept();
            assert_eq!(
                accepted,
                oracle_accepts(diag, regime),
                "disagreement on {diag:?} under {regime:?}"
            );
            checked += 1;
        }
        // Pinned boundary cases.
        for diag in [
            [1.8, 1.8, 1.8, 1.8, 1.8],
            [1.0, 1.0, 1.0, 1.0, 1.0],
            [2.5, 1.0, 1.0, 1.0, 1.0],
            [3.5, 1.5, 1.5, 1.5, 1.0],
            [1.6, 2.1, 2.1, 2.1, 2.1],
            [2.3, 2.3, 1.7, 1.7, 1.0],
            [2.5, 1.8, 1.8, 1.8, 1.2],
        ] {
            let matrix = TransferMatrix::from_diagonal(diag).unwrap();
            assert_eq!(
                check_matrix(&matrix, regime).is_accept(),
                oracle_accepts(diag, regime),
                "boundary disagreement on {diag:?} under {regime:?}"
            );
        }
    }
    assert_runtime(2, started, 5.0);
    println!("acceptance 2 PASS: matrix constraints match the oracle ({:?})", started.elapsed());
}

#[test]
fn criterion_3_growth_law() {
    let started = Instant::now();
    let config = universe_config(
        vec![doctrine_civ("Earth", Worldview::Pacifism, [1.0; 5])],
        vec![vec![0]],
        DelayMode::RealTime,
        10,
        1,
    );
    let mut universe = Universe::new(config).unwrap();
    universe.run().unwrap();
    let records = &universe.stick()["Earth"];
    assert_eq!(records.len(), 10);
    let expected = 1.8f64.powi(10);
    for value in records.last().unwrap().resources.values() {
        assert!(
            (value - expected).abs() <= 1e-9 * expected,
            "expected {expected}, found {value}"
        );
    }
    // Growth is exponential: every round multiplies every resource.
    for pair in records.windows(2) {
        for (a, b) in pair[0]
            .resources
            .values()
            .iter()
            .zip(pair[1].resources.values())
        {
            assert!(b > *a);
        }
    }
    assert_runtime(3, started, 1.0);
    println!("acceptance 3 PASS: lone-civilization growth law ({:?})", started.elapsed());
}

#[test]
fn criterion_4_overwhelming_strike_scenario() {
    let started = Instant::now();
    let mut reference: Option<String> = None;
    for seed in 1..=5u64 {
        let config = universe_config(
            vec![
                doctrine_civ("ThreeBody", Worldview::Militarism, [10.0; 5]),
                doctrine_civ("Earth", Worldview::Pacifism, [3.0; 5]),
            ],
            vec![vec![0, 0], vec![0, 0]],
            DelayMode::RealTime,
            3,
            seed,
        );
        let mut universe = Universe::new(config).unwrap();
        universe.run().unwrap();

        let attacker = &universe.stick()["ThreeBody"];
        let earth = &universe.stick()["Earth"];

        // War declared and resolved in round 1; Earth never acts again.
        assert!(attacker[0]
            .public_actions
            .contains(&PublicAction::LaunchAnnihilationWar {
                target: "Earth".into()
            }));
        assert_eq!(earth.len(), 1);
        assert!(earth[0]
            .events
            .iter()
            .any(|e| matches!(e, StickEvent::Eliminated { by } if by == "ThreeBody")));

        let expected_military = (10.0f64 * 10.0 - 3.0 * 3.0).sqrt();
        let war = attacker[0]
            .events
            .iter()
            .find_map(|e| match e {
                StickEvent::WarResolved {
                    attacker_military_after,
                    defender_military_after,
                    loot,
                    ..
                } => Some((*attacker_military_after, *defender_military_after, *loot)),
                _ => None,
            })
            .expect("war event on the attacker record");
        assert!((war.0 - expected_military).abs() <= 1e-9 * expected_military);
        assert_eq!(war.1, 0.0);
        assert_eq!(war.2, [0.0, 1.5, 1.5, 1.5, 1.5]);

        // Loot credited exactly, then the mobilization matrix applied.
        let looted = 10.0 + 1.5;
        let expected = [
            expected_military * MOBILIZATION_DIAG[0],
            looted * MOBILIZATION_DIAG[1],
            looted * MOBILIZATION_DIAG[2],
            looted * MOBILIZATION_DIAG[3],
            looted * MOBILIZATION_DIAG[4],
        ];
        assert_eq!(attacker[0].resources.values(), expected);
        assert_eq!(earth[0].resources.values(), [0.0, 1.5, 1.5, 1.5, 1.5]);

        let serialized = serde_json::to_string(universe.stick()).unwrap();
        match &reference {
            None => reference = Some(serialized),
            Some(prev) => assert_eq!(prev, &serialized, "diverged at seed {seed}"),
        }
    }
    assert_runtime(4, started, 1.0);
    println!("acceptance 4 PASS: overwhelming strike resolves in round 1 ({:?})", started.elapsed());
}

/// Independent recount of decision changes straight from stick files,
/// using string-rendered actions rather than the harness types.
fn recount_from_files(control: &Stick, delayed: &Stick) -> BTreeMap<Worldview, (u64, u64, u64, u64)> {
    let mut rows: BTreeMap<Worldview, (u64, u64, u64, u64)> = BTreeMap::new();
    for (name, control_records) in control {
        let Some(delayed_records) = delayed.get(name) else {
            continue;
        };
        let shared = control_records.len().min(delayed_records.len());
        for k in 0..shared {
            let (c, d) = (&control_records[k], &delayed_records[k]);
            assert_eq!(c.round, d.round);
            let normalize = |actions: &[PublicAction]| -> Vec<String> {
                let mut rendered: Vec<String> = actions
                    .iter()
                    .map(cosmosim::protocol::render_public_action)
                    .collect();
                rendered.sort();
                rendered.dedup();
                if rendered.is_empty() {
                    rendered.push("Do Nothing".to_string());
                }
                rendered
            };
            let row = rows.entry(c.worldview).or_default();
            row.0 += 1;
            if normalize(&c.public_actions) != normalize(&d.public_actions) {
                row.1 += 1;
            }
            if c.private_action != d.private_action {
                row.2 += 1;
            }
            if c.worldview != d.worldview {
                row.3 += 1;
            }
        }
    }
    rows
}

fn assert_table_matches_recount(table: &MetricsTable, out_dir: &Path) {
    let control = read_stick_dir(&out_dir.join("rep000/control/sticks")).unwrap();
    let delayed = read_stick_dir(&out_dir.join("rep000/delayed/sticks")).unwrap();
    let recount = recount_from_files(&control, &delayed);
    assert_eq!(table.rows.len(), recount.len());
    for (worldview, row) in &table.rows {
        let counted = recount[worldview];
        assert_eq!(
            (row.compared, row.public_changed, row.private_changed, row.worldview_changed),
            counted,
            "mismatch for {worldview}"
        );
    }
}

#[test]
fn criterion_5_delay_contrast() {
    let started = Instant::now();
    let spec = DelaySpec {
        base_seed: 42,
        repetitions: 1,
        rounds: 6,
        max_distance: 4,
        distances: Some(vec![vec![0, 2], vec![2, 0]]),
        civs: vec![
            doctrine_civ("ThreeBody", Worldview::Militarism, [10.0; 5]),
            doctrine_civ("Earth", Worldview::Pacifism, [8.0; 5]),
        ],
    };
    let out = tempfile::tempdir().unwrap();
    let table = run_experiment_delay_contrast(&spec, Some(out.path())).unwrap();

    let control = read_stick_dir(&out.path().join("rep000/control/sticks")).unwrap();
    let delayed = read_stick_dir(&out.path().join("rep000/delayed/sticks")).unwrap();

    // With live sight the militarist strikes the weaker Earth at once.
    assert!(control["ThreeBody"][0]
        .public_actions
        .contains(&PublicAction::LaunchAnnihilationWar {
            target: "Earth".into()
        }));
    // Under a two-round delay it has discovered nothing yet: it holds
    // position and mobilizes.
    let delayed_first = &delayed["ThreeBody"][0];
    assert!(!delayed_first.public_actions.iter().any(|a| a.is_war()));
    assert_eq!(
        cosmosim::experiment::canonical_public_actions(&delayed_first.public_actions),
        vec![PublicAction::DoNothing]
    );
    assert_eq!(delayed_first.private_action, PrivateAction::MobilizeForWar);

    let militarism = &table.rows[&Worldview::Militarism];
    assert!(militarism.public_action_change_pct() > 0.0);
    assert_table_matches_recount(&table, out.path());

    assert_runtime(5, started, 2.0);
    println!("acceptance 5 PASS: delay contrast flips the opening move ({:?})", started.elapsed());
}

#[test]
fn criterion_6_default_protocol() {
    let started = Instant::now();
    let mut config = universe_config(
        vec![doctrine_civ("Mute", Worldview::Pacifism, [2.0; 5])],
        vec![vec![0]],
        DelayMode::RealTime,
        5,
        3,
    );
    config.civs[0].backend = cosmosim::engine::BackendConfig::Scripted {
        policy: cosmosim::agent::ScriptedPolicy::AlwaysInvalid,
    };
    let mut universe = Universe::new(config).unwrap();
    universe.run().unwrap();

    let records = &universe.stick()["Mute"];
    assert_eq!(records.len(), 5);
    for record in records {
        assert_eq!(record.worldview, Worldview::Pacifism);
        assert_eq!(record.matrix_diag, [1.8; 5]);
        assert_eq!(record.private_action, PrivateAction::DoNothing);
        let attempts = record
            .events
            .iter()
            .find_map(|e| match e {
                StickEvent::DefaultApplied {
                    attempts,
                    retained_matrix_valid,
                } => Some((*attempts, *retained_matrix_valid)),
                _ => None,
            })
            .expect("default protocol event");
        assert_eq!(attempts.0, 3);
        assert!(attempts.1);
    }
    assert_runtime(6, started, 1.0);
    println!("acceptance 6 PASS: default protocol after three rejections ({:?})", started.elapsed());
}

#[test]
fn criterion_7_isolationist_selectivity() {
    let started = Instant::now();
    let config = universe_config(
        vec![
            doctrine_civ("Yaderan", Worldview::Isolationism, [10.0; 5]),
            doctrine_civ("Earth", Worldview::Pacifism, [8.0; 5]),
            doctrine_civ("ThreeBody", Worldview::Militarism, [5.0; 5]),
        ],
        vec![vec![0; 3]; 3],
        DelayMode::RealTime,
        4,
        11,
    );
    let mut universe = Universe::new(config.clone()).unwrap();
    universe.run().unwrap();
    let isolationist = &universe.stick()["Yaderan"];

    // Window W=2: no public action in round 1, friendliness toward the
    // pacifist in round 2, never anything toward the militarist.
    assert_eq!(isolationist[0].public_actions, vec![PublicAction::DoNothing]);
    assert!(isolationist[1]
        .public_actions
        .contains(&PublicAction::ExpressFriendliness {
            target: "Earth".into()
        }));
    for record in isolationist {
        for action in &record.public_actions {
            assert_ne!(action.counterparty(), Some("ThreeBody"), "round {}", record.round);
        }
    }

    let mut again = Universe::new(config).unwrap();
    again.run().unwrap();
    assert_eq!(universe.stick(), again.stick());

    assert_runtime(7, started, 1.0);
    println!("acceptance 7 PASS: isolationist greets only the pacifist ({:?})", started.elapsed());
}

fn dir_snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut snapshot = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        for entry in std::fs::read_dir(&current).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let key = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                snapshot.insert(key, std::fs::read(&path).unwrap());
            }
        }
    }
    snapshot
}

#[test]
fn criterion_8_determinism_and_persistence() {
    let started = Instant::now();
    let config = universe_config(
        vec![
            doctrine_civ("ThreeBody", Worldview::Militarism, [10.0; 5]),
            doctrine_civ("Earth", Worldview::Pacifism, [8.0; 5]),
            doctrine_civ("Yaderan", Worldview::Isolationism, [9.0; 5]),
        ],
        vec![vec![0, 2, 3], vec![2, 0, 1], vec![3, 1, 0]],
        DelayMode::Delayed,
        6,
        99,
    );

    let dirs: Vec<tempfile::TempDir> = (0..2)
        .map(|_| {
            let mut universe = Universe::new(config.clone()).unwrap();
            universe.run().unwrap();
            let dir = tempfile::tempdir().unwrap();
            write_run_artifacts(dir.path(), &universe).unwrap();

            // Persistence: the files read back exactly as written.
            let reread = read_stick_dir(&dir.path().join("sticks")).unwrap();
            assert_eq!(&reread, universe.stick());
            dir
        })
        .collect();

    assert_eq!(dir_snapshot(dirs[0].path()), dir_snapshot(dirs[1].path()));
    assert_runtime(8, started, 5.0);
    println!("acceptance 8 PASS: byte-identical runs and exact persistence ({:?})", started.elapsed());
}

#[test]
fn criterion_9_real_time_equals_zero_distance() {
    let started = Instant::now();
    let civs = vec![
        doctrine_civ("ThreeBody", Worldview::Militarism, [10.0; 5]),
        doctrine_civ("Earth", Worldview::Pacifism, [8.0; 5]),
        doctrine_civ("Yaderan", Worldview::Isolationism, [9.0; 5]),
    ];
    let zeros = vec![vec![0; 3]; 3];

    let mut real_time = Universe::new(universe_config(
        civs.clone(),
        zeros.clone(),
        DelayMode::RealTime,
        5,
        4,
    ))
    .unwrap();
    real_time.run().unwrap();

    let mut delayed_zero =
        Universe::new(universe_config(civs, zeros, DelayMode::Delayed, 5, 4)).unwrap();
    delayed_zero.run().unwrap();

    assert_eq!(real_time.stick(), delayed_zero.stick());
    assert_eq!(
        serde_json::to_string(real_time.stick()).unwrap(),
        serde_json::to_string(delayed_zero.stick()).unwrap()
    );
    assert_runtime(9, started, 1.0);
    println!("acceptance 9 PASS: real-time equals delayed-with-zero-distances ({:?})", started.elapsed());
}

#[test]
fn criterion_10_metrics_oracle_with_flip_probes() {
    let started = Instant::now();
    let probe = |name: &str| {
        let mut civ = doctrine_civ(name, Worldview::Pacifism, [5.0; 5]);
        civ.backend = cosmosim::engine::BackendConfig::Scripted {
            policy: cosmosim::agent::ScriptedPolicy::FlipProbe,
        };
        civ
    };
    let spec = DelaySpec {
        base_seed: 7,
        repetitions: 1,
        rounds: 4,
        max_distance: 4,
        distances: Some(vec![vec![0, 2], vec![2, 0]]),
        civs: vec![probe("ProbeA"), probe("ProbeB")],
    };
    let out = tempfile::tempdir().unwrap();
    let table = run_experiment_delay_contrast(&spec, Some(out.path())).unwrap();

    // Each probe flips its public action in exactly 1 of 4 compared
    // rounds: archived history of the counterpart appears in round 2
    // live but only in round 3 under a two-round delay.
    let row = &table.rows[&Worldview::Pacifism];
    assert_eq!(row.compared, 8);
    assert_eq!(row.public_changed, 2);
    assert_eq!(row.public_action_change_pct(), 25.0);
    assert_eq!(row.private_action_change_pct(), 0.0);
    assert_eq!(row.worldview_change_pct(), 0.0);
    assert_table_matches_recount(&table, out.path());

    assert_runtime(10, started, 2.0);
    println!("acceptance 10 PASS: metrics equal the analytic flip rate ({:?})", started.elapsed());
}

#[test]
fn epsilon_is_pinned() {
    // Every tolerance in this suite derives from the model epsilon.
    assert_eq!(EPSILON, 1e-9);
}
