mod common;

use std::collections::BTreeMap;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sitcalc_core::engine::*;
use sitcalc_core::gaussian::normal_cell;
use sitcalc_core::model::{BeliefState, History, NumericMode, Rational, Trajectory, Value, Weight};
use sitcalc_core::theory::{parse_formula, parse_scenario, parse_theory, ActionTheory};

fn int(i: i64) -> Value {
    Value::Int(i)
}

fn positions(t: &ActionTheory, b: &BeliefState) -> BTreeMap<i64, Rational> {
    marginal(t, b, "position")
}

fn table(pairs: &[(i64, i64, i64)]) -> BTreeMap<i64, Rational> {
    pairs.iter().map(|&(x, n, d)| (x, rat(n, d))).collect()
}

fn observe_all(t: &ActionTheory, steps: &[&str]) -> BeliefState {
    let mut b = initial_belief(t, NumericMode::Exact).unwrap();
    for s in steps {
        b = progress(t, &b, &sig(t, s)).unwrap();
    }
    b
}

const S5: [&str; 5] = [
    "sense-position(11)",
    "sense-position(11)",
    "exact-advance(-2)",
    "sense-position(9)",
    "exact-advance(2)",
];

#[test]
fn poss_examples() {
    let c2 = load("robot-c2.sitc");
    let at9 = start(&c2, "position = 9");
    let at8 = start(&c2, "position = 8");
    assert!(poss(&c2, &act(&c2, "sense-position", &[int(11), int(9)]), &at9).unwrap());
    assert!(!poss(&c2, &act(&c2, "sense-position", &[int(11), int(8)]), &at8).unwrap());

    let safe = load("safe.sitc");
    let w = start(&safe, "combi = 57");
    for z in 0..100 {
        assert_eq!(
            poss(&safe, &act(&safe, "read", &[int(z)]), &w).unwrap(),
            z == 57
        );
    }
}

#[test]
fn apply_action_examples() {
    let t = load("robot.sitc");
    let w = start(&t, "position = 10");
    let next = apply_action(&t, &act(&t, "advance", &[int(1), int(2)]), &w).unwrap();
    assert_eq!(next, world(&t, "position = 12"));
    let same = apply_action(&t, &act(&t, "sense-position", &[int(11), int(10)]), &w).unwrap();
    assert_eq!(same, world(&t, "position = 10"));

    let d = load("drop.sitc");
    let w = start(
        &d,
        "Holding(A) = true, Holding(B) = false, Fragile(A) = true, Fragile(B) = false, \
         Broken(A) = false, Broken(B) = false",
    );
    let a = sym(&d, "A");
    let next = apply_action(&d, &act(&d, "drop-break", std::slice::from_ref(&a)), &w).unwrap();
    assert_eq!(
        fluent(&d, &next, "Broken", std::slice::from_ref(&a)),
        Value::Bool(true)
    );
    assert_eq!(
        fluent(&d, &next, "Holding", std::slice::from_ref(&a)),
        Value::Bool(false)
    );
    assert_eq!(
        fluent(&d, &next, "Broken", &[sym(&d, "B")]),
        Value::Bool(false)
    );
}

#[test]
fn oi_class_examples() {
    let t = load("robot.sitc");
    let class = oi_class(&t, &sig(&t, "advance(1)"));
    let expected: Vec<_> = (-12..=12)
        .map(|y| act(&t, "advance", &[int(1), int(y)]))
        .collect();
    assert_eq!(class, expected);

    let d = load("drop.sitc");
    let a = sym(&d, "A");
    let class = oi_class(&d, &sig(&d, "drop(A)"));
    assert_eq!(
        class,
        [
            act(&d, "drop-break", std::slice::from_ref(&a)),
            act(&d, "drop-not-break", &[a])
        ]
    );

    let p = parse_theory(
        "domain Obj = {A, B}\nfluent Holding(x: Obj) : bool\naction pickup(x: Obj)\n  poss: not Holding(x)",
    )
    .unwrap();
    let a = sym(&p, "A");
    assert_eq!(
        oi_class(&p, &sig(&p, "pickup(A)")),
        [act(&p, "pickup", &[a])]
    );
}

#[test]
fn likelihood_examples() {
    let t = load("robot.sitc");
    let w = start(&t, "position = 10");
    let l = |x, y| {
        likelihood(
            &t,
            &act(&t, "advance", &[int(x), int(y)]),
            &w,
            NumericMode::Exact,
        )
        .unwrap()
    };
    assert_eq!(l(1, 1), exact(1, 2));
    assert_eq!(l(1, 2), exact(1, 4));
    assert_eq!(l(1, 4), exact(0, 1));

    let sense = act(&t, "sense-position", &[int(11), int(10)]);
    assert_eq!(
        likelihood(&t, &sense, &w, NumericMode::Exact).unwrap(),
        exact(1, 4)
    );
    let at9 = start(&t, "position = 9");
    assert_eq!(
        likelihood(&t, &sense, &at9, NumericMode::Exact).unwrap(),
        exact(0, 1)
    );
}

#[test]
fn likelihood_can_depend_on_the_situation() {
    let t = parse_theory(
        r#"
domain Pos = 0..20
domain Cmd = -2..2
domain Move = -6..6
fluent position : Pos
fluent slippery : bool
action advance(nominal x: Cmd, actual y: Move)
  poss: position + y in [0, 20]
  likelihood: if slippery then normal(y - x, 2.4) else normal(y - x, 0.5)
successor position { case advance(_, y) => position + y }
"#,
    )
    .unwrap();
    let a = act(&t, "advance", &[int(1), int(3)]);
    let wet = start(&t, "position = 5, slippery = true");
    let dry = start(&t, "position = 5, slippery = false");
    let l = |w: &Trajectory| likelihood(&t, &a, w, NumericMode::Float).unwrap().to_f64();
    assert_eq!(l(&wet), normal_cell(2.0, 2.4, 1.0));
    assert_eq!(l(&dry), normal_cell(2.0, 0.5, 1.0));
    assert!(l(&wet) > l(&dry));
}

#[test]
fn sensing_from_the_initial_belief() {
    let t = load("robot.sitc");
    let b = observe_all(&t, &["sense-position(11)"]);
    assert_eq!(
        positions(&t, &b),
        table(&[(10, 4, 7), (11, 2, 7), (12, 1, 7)])
    );
    assert_eq!(b.step(), 1);
}

#[test]
fn noisy_advance_from_s5() {
    let t = load("robot.sitc");
    let b = observe_all(&t, &S5);
    assert_eq!(
        positions(&t, &b),
        table(&[(10, 4, 13), (11, 8, 13), (12, 1, 13)])
    );
    let b = progress(&t, &b, &sig(&t, "advance(1)")).unwrap();
    assert_eq!(
        positions(&t, &b),
        table(&[
            (10, 4, 52),
            (11, 16, 52),
            (12, 21, 52),
            (13, 10, 52),
            (14, 1, 52)
        ])
    );
}

#[test]
fn sensing_after_noisy_motion() {
    let t = load("robot.sitc");
    let mut steps = S5.to_vec();
    steps.extend(["advance(1)", "advance(-1)", "sense-position(11)"]);
    let b = observe_all(&t, &steps);
    assert_eq!(
        positions(&t, &b),
        table(&[(10, 57, 235), (11, 136, 235), (12, 42, 235)])
    );
    // members with weight zero stay in K
    assert!(b.members().iter().any(|m| m.weight.is_zero()));
}

#[test]
fn bel_examples() {
    let t = load("robot.sitc");
    let s2 = observe_all(&t, &S5[..2]);
    let f = |s: &str| parse_formula(s, &t).unwrap();
    assert_eq!(bel(&t, &s2, &f("position = 10")).unwrap(), exact(4, 9));
    assert_eq!(bel(&t, &s2, &f("true")).unwrap(), exact(1, 1));
    let s3 = progress(&t, &s2, &sig(&t, "exact-advance(-2)")).unwrap();
    assert_eq!(
        bel(&t, &s3, &f("position(now) = position(prev(now)) - 2")).unwrap(),
        exact(1, 1)
    );
}

#[test]
fn bel_is_undefined_when_every_weight_is_zero() {
    let t = parse_theory(
        "domain D = 0..1\nfluent f : D\naction look(nominal x: D)\n  likelihood: if x = f then 1 else 0\ninit { world {f = 0} }",
    )
    .unwrap();
    let b = observe_all(&t, &["look(1)"]);
    let e = bel(&t, &b, &parse_formula("true", &t).unwrap()).unwrap_err();
    assert!(e.to_string().contains("belief undefined"), "{e}");
    assert!(know(&t, &b, &parse_formula("f = 0", &t).unwrap()).unwrap());
}

#[test]
fn know_examples() {
    let c2 = load("robot-c2.sitc");
    let b = observe_all(&c2, &["sense-position(11)"]);
    let f = |s: &str| parse_formula(s, &c2).unwrap();
    assert!(know(&c2, &b, &f("position != 8")).unwrap());
    assert!(!know(&c2, &b, &f("position != 9")).unwrap());
    assert_eq!(bel(&c2, &b, &f("position = 9")).unwrap(), exact(0, 1));
    assert!(know(&c2, &b, &f("true")).unwrap());

    let d = load("drop.sitc");
    let b = initial_belief(&d, NumericMode::Exact).unwrap();
    assert!(know(&d, &b, &parse_formula("Holding(A)", &d).unwrap()).unwrap());
}

#[test]
fn run_program_examples() {
    let t = load("robot.sitc");
    let w = start(&t, "position = 10");
    let ends = run_program(&t, &program(&t, "exact-advance(2); exact-advance(-2)"), &w).unwrap();
    assert_eq!(ends.len(), 1);
    assert_eq!(ends[0].len(), 2);
    assert_eq!(fluent(&t, ends[0].current(), "position", &[]), int(10));

    let ends = run_program(&t, &program(&t, "pi y: Move . advance(1, y)"), &w).unwrap();
    let ys: Vec<Value> = ends
        .iter()
        .map(|e| e.last_action().unwrap().args[1].clone())
        .collect();
    assert_eq!(ys, [int(0), int(1), int(2)]);

    let d = load("drop.sitc");
    let body = |fragile: bool| {
        format!(
            "Holding(A) = true, Holding(B) = false, Fragile(A) = {fragile}, Fragile(B) = false, \
             Broken(A) = false, Broken(B) = false"
        )
    };
    let p = program(&d, "drop-break(A) | drop-not-break(A)");
    assert_eq!(
        run_program(&d, &p, &start(&d, &body(true))).unwrap().len(),
        2
    );
    assert_eq!(
        run_program(&d, &p, &start(&d, &body(false))).unwrap().len(),
        1
    );
}

#[test]
fn simulated_noisy_advance_follows_the_likelihoods() {
    let t = load("robot.sitc");
    let w = start(&t, "position = 10");
    let cmd = program(&t, "noisy-advance(1)");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 10_000;
    let mut counts = BTreeMap::new();
    for _ in 0..n {
        let o = simulate_step(&t, &w, &cmd, &mut rng).unwrap();
        assert_eq!(o.signature, sig(&t, "advance(1)"));
        let Value::Int(y) = o.action.args[1] else {
            panic!()
        };
        assert_eq!(fluent(&t, &o.world, "position", &[]), int(10 + y));
        *counts.entry(y).or_insert(0usize) += 1;
    }
    assert_eq!(counts.keys().copied().collect::<Vec<_>>(), [0, 1, 2]);
    for (y, p) in [(0, 0.25), (1, 0.5), (2, 0.25)] {
        let freq = counts[&y] as f64 / n as f64;
        assert!((freq - p).abs() <= 0.02, "y = {y}: {freq}");
    }
}

#[test]
fn simulated_deterministic_and_drop_commands() {
    let t = load("robot.sitc");
    let w = start(&t, "position = 10");
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = simulate_step(&t, &w, &program(&t, "exact-advance(2)"), &mut rng).unwrap();
        assert_eq!(fluent(&t, &o.world, "position", &[]), int(12));
    }

    let d = load("drop.sitc");
    let w = start(
        &d,
        "Holding(A) = true, Holding(B) = false, Fragile(A) = false, Fragile(B) = false, \
         Broken(A) = false, Broken(B) = false",
    );
    let cmd = program(&d, "drop(A)");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let o = simulate_step(&d, &w, &cmd, &mut rng).unwrap();
        assert_eq!(o.action, act(&d, "drop-not-break", &[sym(&d, "A")]));
    }

    let safe = load("safe.sitc");
    let e = simulate_step(
        &safe,
        &start(&safe, "combi = 3"),
        &program(&safe, "read(4)"),
        &mut rng,
    )
    .unwrap_err();
    assert!(
        e.to_string()
            .contains("command unexecutable in actual world"),
        "{e}"
    );
}

#[test]
fn simulation_is_deterministic_given_the_seed() {
    let t = load("robot.sitc");
    let w = start(&t, "position = 10");
    let cmd = program(&t, "noisy-advance(1); noisy-advance(2); noisy-advance(-1)");
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        simulate_program(&t, &w, &cmd, &mut rng).unwrap()
    };
    assert_eq!(run(11), run(11));
    assert_eq!(run(11).len(), 3);
}

#[test]
fn empty_scenario_records_the_initial_belief() {
    let t = load("robot.sitc");
    let s = parse_scenario("", &t).unwrap();
    let trace = run_scenario(&t, &s, &RunOptions::default()).unwrap();
    assert_eq!(trace.entries.len(), 1);
    assert_eq!(trace.entries[0].step, 0);
    assert_eq!(trace.entries[0].members, 5);
}

#[test]
fn impossible_observation_aborts_at_its_step() {
    let t = load("robot-c2.sitc");
    let s = parse_scenario("observe sense-position(30)", &t).unwrap();
    let e = run_scenario(&t, &s, &RunOptions::default()).unwrap_err();
    assert_eq!(e.step, 1);
    assert!(
        e.to_string()
            .starts_with("impossible observation at step 1"),
        "{e}"
    );
}

#[test]
fn sensing_script_runs_with_its_assertions() {
    let t = load("robot.sitc");
    let s = parse_scenario(&theory_file("s0to8.scn"), &t).unwrap();
    let trace = run_scenario(&t, &s, &RunOptions::default()).unwrap();
    assert_eq!(trace.entries.len(), 9);
    assert_eq!(
        positions(&t, &trace.final_belief),
        table(&[(10, 57, 235), (11, 136, 235), (12, 42, 235)])
    );

    let no_collapse = RunOptions {
        collapse: false,
        ..RunOptions::default()
    };
    let full = run_scenario(&t, &s, &no_collapse).unwrap();
    assert_eq!(full.entries.len(), 9);
    for (a, b) in trace.entries.iter().zip(&full.entries) {
        assert_eq!(a.belief, b.belief);
        assert!(a.members <= b.members);
    }
}

#[test]
fn failed_assertion_reports_both_values() {
    let t = load("robot.sitc");
    let s = parse_scenario(
        "observe sense-position(11)\nquery bel position = 10\nassert = 1/2",
        &t,
    )
    .unwrap();
    let e = run_scenario(&t, &s, &RunOptions::default()).unwrap_err();
    assert_eq!(e.step, 3);
    let msg = e.to_string();
    assert!(
        msg.contains("expected = 1/2") && msg.contains("found 4/7"),
        "{msg}"
    );
}

#[test]
fn drop_scenario_in_both_modes() {
    let d = load("drop.sitc");
    let s = parse_scenario(&theory_file("drop.scn"), &d).unwrap();
    run_scenario(&d, &s, &RunOptions::default()).unwrap();
    let sim = RunOptions {
        simulate: true,
        seed: 3,
        ..RunOptions::default()
    };
    let trace = run_scenario(&d, &s, &sim).unwrap();
    let last = trace.entries.last().unwrap();
    assert_eq!(
        last.action,
        Some(act(&d, "drop-not-break", &[sym(&d, "A")]))
    );
}

#[test]
fn reading_the_combination_needs_simulation() {
    let safe = load("safe.sitc");
    let s = parse_scenario(&theory_file("safe.scn"), &safe).unwrap();
    let e = run_scenario(&safe, &s, &RunOptions::default()).unwrap_err();
    assert!(e.to_string().contains("simulate"), "{e}");
    let sim = RunOptions {
        simulate: true,
        ..RunOptions::default()
    };
    let trace = run_scenario(&safe, &s, &sim).unwrap();
    assert_eq!(trace.final_belief.len(), 1);
}

#[test]
fn float_mode_agrees_with_exact_mode() {
    let t = load("robot.sitc");
    let s = parse_scenario(&theory_file("s0to8.scn"), &t).unwrap();
    let float = RunOptions {
        mode: NumericMode::Float,
        ..RunOptions::default()
    };
    let exact = run_scenario(&t, &s, &RunOptions::default()).unwrap();
    let approx = run_scenario(&t, &s, &float).unwrap();
    for (a, b) in exact.entries.iter().zip(&approx.entries) {
        for ((wa, pa), (wb, pb)) in a
            .belief
            .as_ref()
            .unwrap()
            .iter()
            .zip(b.belief.as_ref().unwrap())
        {
            assert_eq!(wa, wb);
            assert!(matches!(pb, Weight::Float(_)));
            assert!((pa.to_f64() - pb.to_f64()).abs() < 1e-12);
        }
    }
}
