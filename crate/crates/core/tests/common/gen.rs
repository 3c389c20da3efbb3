//! Seeded generators for small random action theories.

use std::fmt::Write;

use rand::seq::IndexedRandom;
use rand::Rng;

const WEIGHTS: [&str; 6] = ["0", "1/2", "1/3", "1", "2/5", "3/4"];

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    /// `(nominal x, actual y)`
    Noisy,
    /// `(x)`, fully observed
    Plain,
    /// no parameters
    Bare,
}

pub struct SmallTheory {
    pub text: String,
    /// Observation statements the agent may see, e.g. `o1(2)`.
    pub observations: Vec<String>,
    /// Formulas over the newest state.
    pub formulas: Vec<String>,
    /// Formulas that also look one state back.
    pub history_formulas: Vec<String>,
}

fn weight<R: Rng>(rng: &mut R) -> &'static str {
    WEIGHTS.choose(rng).unwrap()
}

/// At most four values for `f`, a boolean `g`, and one to three actions
/// whose groups, preconditions, likelihoods and effects are drawn at random.
pub fn small_theory<R: Rng>(rng: &mut R) -> SmallTheory {
    let k: i64 = rng.random_range(2..=4);
    let top = k - 1;
    let mut text = String::new();
    writeln!(text, "domain V = 0..{top}\nfluent f : V\nfluent g : bool").unwrap();

    let n = rng.random_range(1..=3);
    let mut observations = Vec::new();
    let mut f_cases = Vec::new();
    let mut g_clauses = Vec::new();
    for i in 0..n {
        let kind = *[Kind::Noisy, Kind::Plain, Kind::Bare].choose(rng).unwrap();
        let (params, group) = match kind {
            Kind::Noisy => (
                "(nominal x: V, actual y: V)",
                format!("o{}", rng.random_range(0..=i)),
            ),
            Kind::Plain => ("(x: V)", format!("o{}", rng.random_range(0..=i))),
            Kind::Bare => ("", format!("p{}", rng.random_range(0..=i))),
        };
        writeln!(text, "action a{i}{params}").unwrap();
        let poss = match kind {
            Kind::Noisy => *[
                "true",
                "y != f",
                "x = y or g",
                "f + y <= {top}",
                "abs(x - y) <= 1",
            ]
            .choose(rng)
            .unwrap(),
            Kind::Plain => *["true", "x <= f", "g or x = f", "x != f"]
                .choose(rng)
                .unwrap(),
            Kind::Bare => *["true", "g", "f > 0"].choose(rng).unwrap(),
        };
        writeln!(text, "  poss: {}", poss.replace("{top}", &top.to_string())).unwrap();
        match kind {
            Kind::Bare => writeln!(text, "  observe: ({group})").unwrap(),
            _ => writeln!(text, "  observe: ({group}, x)").unwrap(),
        }
        let lik = match kind {
            Kind::Noisy => format!(
                "if x = y then {} else if y = f then {} else {}",
                weight(rng),
                weight(rng),
                weight(rng)
            ),
            Kind::Plain => format!("if g then {} else {}", weight(rng), weight(rng)),
            Kind::Bare => format!("if f = 0 then {} else {}", weight(rng), weight(rng)),
        };
        writeln!(text, "  likelihood: {lik}").unwrap();

        if rng.random_bool(0.7) {
            let case = match kind {
                Kind::Noisy => [
                    format!("case a{i}(_, y) => y"),
                    format!("case a{i}(x, y) when g => min(f + y, {top})"),
                    format!("case a{i}(x, _) => max(f - x, 0)"),
                ]
                .choose(rng)
                .unwrap()
                .clone(),
                Kind::Plain => [
                    format!("case a{i}(x) => x"),
                    format!("case a{i}(x) when x > f => min(f + 1, {top})"),
                ]
                .choose(rng)
                .unwrap()
                .clone(),
                Kind::Bare => format!("case a{i} => max(f - 1, 0)"),
            };
            f_cases.push(case);
        }
        if rng.random_bool(0.6) {
            let head = match kind {
                Kind::Noisy => format!("a{i}(x, _)"),
                Kind::Plain => format!("a{i}(x)"),
                Kind::Bare => format!("a{i}"),
            };
            let clause = match (kind, rng.random_range(0..3)) {
                (Kind::Bare, 0) | (_, 1) => format!("{head} causes not g"),
                (Kind::Bare, _) => format!("{head} causes g when f = {top}"),
                _ => format!("{head} causes g when f = x"),
            };
            g_clauses.push(clause);
        }

        let group_obs = |x: i64| match kind {
            Kind::Bare => group.clone(),
            _ => format!("{group}({x})"),
        };
        for x in 0..k {
            let o = group_obs(x);
            if !observations.contains(&o) {
                observations.push(o);
            }
        }
    }
    if !f_cases.is_empty() {
        writeln!(text, "successor f {{ {} }}", f_cases.join(" ; ")).unwrap();
    }
    if !g_clauses.is_empty() {
        writeln!(text, "effects {{ {} }}", g_clauses.join(" ; ")).unwrap();
    }

    let worlds = rng.random_range(1..=3);
    text.push_str("init {\n");
    let mut any_positive = false;
    for w in 0..worlds {
        let mut wt = weight(rng);
        if w + 1 == worlds && !any_positive && wt == "0" {
            wt = "1";
        }
        any_positive |= wt != "0";
        writeln!(
            text,
            "  world {{f = {}, g = {}}} weight {wt}",
            rng.random_range(0..k),
            rng.random_bool(0.5)
        )
        .unwrap();
    }
    text.push_str("}\n");

    let mut formulas = vec![
        "true".to_string(),
        "g".to_string(),
        "f = 0 and not g".to_string(),
    ];
    for v in 0..k {
        formulas.push(format!("f = {v}"));
        formulas.push(format!("f >= {v} or g"));
    }
    formulas.push("exists z: V . z = f and z > 0".to_string());
    let history_formulas = vec![
        "f = f(prev(now))".to_string(),
        "g(prev(now)) implies g".to_string(),
    ];
    SmallTheory {
        text,
        observations,
        formulas,
        history_formulas,
    }
}

/// A pure sensing theory: `f` over `0..k-1` and a reading `sense(x, y)` of
/// it whose likelihood is an arbitrary table over `(x, y)`.
pub struct SensingCase {
    pub text: String,
    pub values: i64,
    pub prior: Vec<(i64, i64)>,
    /// `table[x][t]` as `(num, den)`.
    pub table: Vec<Vec<(i64, i64)>>,
    pub reading: i64,
}

pub fn sensing_case<R: Rng>(rng: &mut R) -> SensingCase {
    let k: i64 = rng.random_range(2..=5);
    let mut prior: Vec<(i64, i64)> = (0..k)
        .map(|_| (rng.random_range(0..=4), rng.random_range(1..=5)))
        .collect();
    if prior.iter().all(|p| p.0 == 0) {
        prior[0].0 = 1;
    }
    let table: Vec<Vec<(i64, i64)>> = (0..k)
        .map(|_| {
            (0..k)
                .map(|_| {
                    let d = rng.random_range(1..=4);
                    (rng.random_range(0..=d), d)
                })
                .collect()
        })
        .collect();
    let reading = rng.random_range(0..k);
    let mut text = format!("domain V = 0..{}\nfluent f : V\n", k - 1);
    text.push_str("action sense(nominal x: V, actual y: V)\n  poss: y = f\n  observe: (sense, x)\n  likelihood: ");
    for x in 0..k {
        for t in 0..k {
            let (n, d) = table[x as usize][t as usize];
            write!(text, "if x = {x} and y = {t} then {n}/{d} else ").unwrap();
        }
    }
    text.push_str("0\ninit {\n");
    for (v, (n, d)) in prior.iter().enumerate() {
        writeln!(text, "  world {{f = {v}}} weight {n}/{d}").unwrap();
    }
    text.push_str("}\n");
    SensingCase {
        text,
        values: k,
        prior,
        table,
        reading,
    }
}

/// An additive effector: `move(x, y)` shifts `f` by `y` with a likelihood
/// table over `y - x` that sums to 1.
pub struct EffectorCase {
    pub text: String,
    pub prior: Vec<(i64, (i64, i64))>,
    /// `noise[y - x + 2]` for `y - x` in `-2..=2`, as `(num, den)`.
    pub noise: Vec<(i64, i64)>,
    pub command: i64,
}

pub fn effector_case<R: Rng>(rng: &mut R) -> EffectorCase {
    let support: i64 = rng.random_range(1..=5);
    let mut raw: Vec<i64> = (0..support).map(|_| rng.random_range(0..=4)).collect();
    if raw.iter().all(|r| *r == 0) {
        raw[0] = 1;
    }
    let total: i64 = raw.iter().sum();
    let offset = rng.random_range(-2..=3 - support);
    let mut noise = vec![(0, 1); 5];
    for (i, r) in raw.iter().enumerate() {
        noise[(offset + i as i64 + 2) as usize] = (*r, total);
    }
    let command = rng.random_range(-2..=2);
    let start = rng.random_range(-3..=3);
    let prior: Vec<(i64, (i64, i64))> = (0..rng.random_range(1..=4))
        .map(|i| {
            (
                start + i,
                (rng.random_range(1..=5), rng.random_range(1..=3)),
            )
        })
        .collect();

    let mut text = String::from(
        "domain P = -20..20\ndomain C = -2..2\ndomain M = -4..4\nfluent f : P\n\
         action move(nominal x: C, actual y: M)\n  poss: abs(y - x) <= 2\n  observe: (move, x)\n  likelihood: ",
    );
    for (i, (n, d)) in noise.iter().enumerate() {
        write!(text, "if y - x = {} then {n}/{d} else ", i as i64 - 2).unwrap();
    }
    text.push_str("0\nsuccessor f { case move(_, y) => f + y }\ninit {\n");
    for (v, (n, d)) in &prior {
        writeln!(text, "  world {{f = {v}}} weight {n}/{d}").unwrap();
    }
    text.push_str("}\n");
    EffectorCase {
        text,
        prior,
        noise,
        command,
    }
}
