mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sitcalc_core::engine::{bel, initial_belief, know, progress};
use sitcalc_core::model::NumericMode;
use sitcalc_core::oracle::*;
use sitcalc_core::theory::{parse_formula, parse_theory};

#[test]
fn first_sensing_step() {
    let t = load("robot.sitc");
    let f = parse_formula("position = 10", &t).unwrap();
    let sigs = [sig(&t, "sense-position(11)")];
    assert_eq!(oracle_bel(&t, &sigs, &f).unwrap(), rat(4, 7));
    assert_eq!(situation_tree(&t, &sigs).unwrap().len(), 5);
}

#[test]
fn depth_zero_is_the_initial_weight_ratio() {
    let t = load("robot.sitc");
    let f = parse_formula("position >= 11", &t).unwrap();
    assert_eq!(oracle_bel(&t, &[], &f).unwrap(), rat(1, 4));
    assert!(oracle_know(&t, &[], &parse_formula("true", &t).unwrap()).unwrap());
}

#[test]
fn bounded_sensor_knowledge() {
    let t = load("robot-c2.sitc");
    let sigs = [sig(&t, "sense-position(11)")];
    let f = |s: &str| parse_formula(s, &t).unwrap();
    assert!(oracle_know(&t, &sigs, &f("position != 8")).unwrap());
    assert!(!oracle_know(&t, &sigs, &f("position != 9")).unwrap());
    assert_eq!(
        oracle_bel(&t, &sigs, &f("position = 9")).unwrap(),
        rat(0, 1)
    );
}

#[test]
fn empty_tree_and_zero_denominator() {
    let t = load("robot-c2.sitc");
    let f = parse_formula("true", &t).unwrap();
    assert_eq!(
        oracle_bel(&t, &[sig(&t, "sense-position(30)")], &f),
        Err(OracleError::EmptyTree)
    );
    let z = parse_theory(
        "domain D = 0..1\nfluent f : D\naction look(nominal x: D)\n  likelihood: if x = f then 1 else 0\ninit { world {f = 0} }",
    )
    .unwrap();
    let f = parse_formula("true", &z).unwrap();
    assert_eq!(
        oracle_bel(&z, &[sig(&z, "look(1)")], &f),
        Err(OracleError::ZeroDenominator)
    );
    assert!(oracle_know(&z, &[sig(&z, "look(1)")], &f).unwrap());
}

#[test]
fn three_worlds_two_steps_match_the_engine() {
    let t = parse_theory(
        r#"
domain V = 0..2
fluent f : V
action sense(nominal x: V, actual y: V)
  poss: y = f
  observe: (sense, x)
  likelihood: if x = y then 2/3 else 1/6
action bump(nominal x: V, actual y: V)
  poss: abs(x - y) <= 1
  observe: (bump, x)
  likelihood: if x = y then 1/2 else 1/4
successor f { case bump(_, y) => y }
init { world {f = 0} weight 1 ; world {f = 1} weight 2 ; world {f = 2} weight 3 }
"#,
    )
    .unwrap();
    let sigs = [sig(&t, "bump(1)"), sig(&t, "sense(2)")];
    let mut b = initial_belief(&t, NumericMode::Exact).unwrap();
    for s in &sigs {
        b = progress(&t, &b, s).unwrap();
    }
    for text in ["f = 0", "f = 1", "f = 2", "f(prev(now)) = f"] {
        let f = parse_formula(text, &t).unwrap();
        assert_eq!(
            bel(&t, &b, &f).unwrap().as_rational().unwrap(),
            &oracle_bel(&t, &sigs, &f).unwrap(),
            "{text}"
        );
        assert_eq!(
            know(&t, &b, &f).unwrap(),
            oracle_know(&t, &sigs, &f).unwrap()
        );
    }
}

#[test]
fn random_small_theories_match_the_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..60 {
        crosscheck(&mut rng, 3).unwrap();
    }
}

#[test]
fn distribution_matches_the_engine_tables() {
    let t = load("robot.sitc");
    let sigs = [sig(&t, "sense-position(11)"), sig(&t, "advance(1)")];
    let mut b = initial_belief(&t, NumericMode::Exact).unwrap();
    for s in &sigs {
        b = progress(&t, &b, s).unwrap();
    }
    let engine: Vec<_> = b
        .world_distribution()
        .unwrap()
        .into_iter()
        .map(|(w, p)| (w, p.as_rational().unwrap().clone()))
        .collect();
    assert_eq!(oracle_distribution(&t, &sigs).unwrap(), engine);
}
