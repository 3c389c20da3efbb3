use anyhow::anyhow;
use sitcalc_core::engine::{format_signature, format_world, run_scenario, QueryValue};
use sitcalc_core::model::{format_rational, NumericMode, ObservationSignature, Rational};
use sitcalc_core::oracle::{oracle_bel, oracle_distribution, oracle_know};
use sitcalc_core::theory::{parse_formula, QueryKind};

use crate::output::exact_table;
use crate::{load_scenario, load_theory, options, Failure, VerifyArgs};

/// Runs the scenario in exact mode and recomputes every belief table and
/// query answer from the full situation tree.
pub fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let theory = load_theory(&a.inputs.theory)?;
    let scenario = load_scenario(&a.inputs.scenario, &theory)?;
    let opts = options(&a.inputs, NumericMode::Exact, None);
    let trace = run_scenario(&theory, &scenario, &opts).map_err(|e| Failure::Runtime(e.into()))?;

    let mut sigs: Vec<ObservationSignature> = Vec::new();
    let mut mismatches = 0;
    let mut worlds = 0;
    let mut queries = 0;
    for e in &trace.entries {
        if let Some(s) = &e.signature {
            sigs.push(s.clone());
        }
        let label = match &e.signature {
            Some(s) => format!("S{} {}", e.step, format_signature(&theory, s)),
            None => format!("S{}", e.step),
        };
        let oracle = oracle_distribution(&theory, &sigs);
        match (&e.belief, oracle) {
            (Some(b), Ok(o)) => {
                let engine = exact_table(b);
                let oracle: std::collections::BTreeMap<_, _> = o.into_iter().collect();
                if engine == oracle {
                    worlds += engine.len();
                    println!("{label}: {} worlds agree", engine.len());
                } else {
                    mismatches += 1;
                    println!("{label}: belief tables differ");
                    for (w, p) in &engine {
                        let q = oracle.get(w).map_or("missing".into(), format_rational);
                        if oracle.get(w) != Some(p) {
                            println!(
                                "  {}  engine {}  oracle {q}",
                                format_world(&theory, w),
                                format_rational(p)
                            );
                        }
                    }
                    for w in oracle.keys().filter(|w| !engine.contains_key(*w)) {
                        println!("  {}  only in the oracle", format_world(&theory, w));
                    }
                }
            }
            (None, Err(sitcalc_core::oracle::OracleError::ZeroDenominator)) => {
                println!("{label}: belief undefined in both");
            }
            (_, Err(e)) => return Err(Failure::Input(anyhow!("{label}: oracle cannot run: {e}"))),
            (None, Ok(_)) => {
                mismatches += 1;
                println!("{label}: engine belief undefined, oracle defined");
            }
        }
        for q in &e.queries {
            let f = parse_formula(&q.formula, &theory)?;
            let (engine, oracle) = match (&q.value, q.kind) {
                (QueryValue::Bel(w), QueryKind::Bel) => (
                    w.as_rational().map(format_rational).unwrap_or_default(),
                    oracle_bel(&theory, &sigs, &f)
                        .map(|r: Rational| format_rational(&r))
                        .map_err(|e| anyhow!("{label}: {e}"))?,
                ),
                (QueryValue::Know(k), _) => (
                    k.to_string(),
                    oracle_know(&theory, &sigs, &f)
                        .map_err(|e| anyhow!("{label}: {e}"))?
                        .to_string(),
                ),
                _ => unreachable!("query values match their kinds"),
            };
            let kind = if q.kind == QueryKind::Bel {
                "bel"
            } else {
                "know"
            };
            queries += 1;
            if engine == oracle {
                println!("{label}: {kind} {} = {engine}", q.formula);
            } else {
                mismatches += 1;
                println!(
                    "{label}: {kind} {}: engine {engine}, oracle {oracle}",
                    q.formula
                );
            }
        }
    }
    if mismatches > 0 {
        return Err(Failure::Runtime(anyhow!(
            "{mismatches} disagreements between the engine and the oracle"
        )));
    }
    eprintln!(
        "verified {} steps: {worlds} world weights and {queries} queries agree",
        trace.entries.len()
    );
    Ok(())
}
