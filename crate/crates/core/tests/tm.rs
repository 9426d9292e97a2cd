use num_bigint::BigUint;
use sizephase::solver::propagate::{propagate, PropagateOptions};
use sizephase::solver::sweep::{sweep_transition, Construction};
use sizephase::solver::{solve, Method};
use sizephase::tiling::{int, score_assignment, Assignment};
use sizephase::tm::{
    busy_beaver, busy_beaver_table, colour_count, colour_formula, compile_to_tileset, count_steps,
    decode_history, registry_machine, simulate, threshold_estimate, threshold_estimate_sci,
    visible_prefix, Sci, StepCount, TuringMachine, DEFAULT_COLOUR_CAP,
};
use sizephase::{Error, SquareLattice};

#[test]
fn champion_step_counts() {
    for (n, steps) in [(2, 6), (3, 21), (4, 107)] {
        let tm = registry_machine(&format!("bb{n}")).unwrap();
        assert_eq!(count_steps(&tm, 1000), Some(steps));
        let trace = simulate(&tm, 1000);
        assert!(trace.halted);
        assert_eq!(trace.step_count, steps);
        assert_eq!(trace.steps.len() as u64, steps + 1);
        assert_eq!(busy_beaver(n).unwrap().steps, StepCount::Exact(steps));
    }
    assert!(registry_machine("bb5").is_none());
    assert!(registry_machine("bb9").is_none());
}

#[test]
fn machine_without_transitions_halts_at_once() {
    let tm = TuringMachine::from_rules(2, "A", &[]);
    let trace = simulate(&tm, 10);
    assert!(trace.halted);
    assert_eq!(trace.step_count, 0);
    assert_eq!(count_steps(&tm, 10), Some(0));
}

#[test]
fn simulate_respects_step_limit() {
    let tm = registry_machine("bb4").unwrap();
    let trace = simulate(&tm, 10);
    assert!(!trace.halted);
    assert_eq!(trace.step_count, 10);
    assert_eq!(count_steps(&tm, 10), None);
}

#[test]
fn colour_formula_examples() {
    assert_eq!(colour_formula(2, 2), 6);
    assert_eq!(colour_formula(2, 3), 6);
    assert_eq!(colour_formula(2, 5), 7);
    assert_eq!(colour_formula(2, 6), 8);
    assert_eq!(colour_formula(3, 4), 11);
    assert_eq!(colour_formula(1, 9), 10);
    assert_eq!(colour_count(&registry_machine("bb4").unwrap()), 6);
}

#[test]
fn thresholds() {
    assert_eq!(
        threshold_estimate(&BigUint::from(21u32)),
        BigUint::from(14u32)
    );
    assert_eq!(
        threshold_estimate(&BigUint::from(107u32)),
        BigUint::from(75u32)
    );
    assert_eq!(
        threshold_estimate(&BigUint::from(0u32)),
        BigUint::from(0u32)
    );
    assert_eq!(
        threshold_estimate(&BigUint::from(6u32)),
        BigUint::from(4u32)
    );
    assert_eq!(threshold_estimate_sci(Sci::new(4.7, 7)).display(2), "3.3e7");
    assert_eq!(
        threshold_estimate_sci(Sci::new(7.4, 36534)).display(2),
        "5.2e36534"
    );
}

#[test]
fn table_rows() {
    let rows = busy_beaver_table();
    let got: Vec<_> = rows
        .iter()
        .map(|r| (r.states, r.colours, r.steps.as_str(), r.threshold.as_str()))
        .collect();
    assert_eq!(
        got,
        vec![
            (3, 6, "21", "14"),
            (4, 6, "107", "75"),
            (5, 7, "4.7e7", "3.3e7"),
            (6, 8, "7.4e36534", "5.2e36534")
        ]
    );
}

#[test]
fn decode_round_trip() {
    for name in ["bb2", "bb3"] {
        let tm = registry_machine(name).unwrap();
        let cm = compile_to_tileset(&tm, DEFAULT_COLOUR_CAP).unwrap();
        let full = simulate(&tm, 1000);
        for w in 2..=12 {
            for h in 2..=12 {
                let lat = SquareLattice::new(w, h);
                let p = propagate(&cm.tileset, &lat, &PropagateOptions::default()).unwrap();
                let decoded = decode_history(&p.assignment, &tm, &cm.map).unwrap();
                assert_eq!(
                    decoded.steps,
                    visible_prefix(&full, &tm, &lat),
                    "{name} on {w}x{h}"
                );
            }
        }
    }
}

#[test]
fn decode_rejects_blank_assignment() {
    let tm = registry_machine("bb2").unwrap();
    let cm = compile_to_tileset(&tm, DEFAULT_COLOUR_CAP).unwrap();
    let a = Assignment::uniform(SquareLattice::square(4), 0);
    assert!(matches!(
        decode_history(&a, &tm, &cm.map),
        Err(Error::Decode(_))
    ));
}

#[test]
fn bb2_transition() {
    let c = Construction::parse("tm:bb2").unwrap();
    let sizes: Vec<usize> = (1..=8).collect();
    let r = sweep_transition(&c, &sizes, &int(-1), &int(0)).unwrap();
    let at = r.transition_at.unwrap();
    assert!((4..=5).contains(&at), "transition at {at}");
    for (n, s) in sizes.iter().zip(&r.scores) {
        assert_eq!(*s, if *n < at { int(-1) } else { int(0) }, "N = {n}");
    }
}

#[test]
fn machine_without_transitions_scores() {
    let tm = TuringMachine::from_rules(2, "A", &[]);
    let cm = compile_to_tileset(&tm, DEFAULT_COLOUR_CAP).unwrap();
    // the halt is visible from 2x2 on: the corner bonus is lost and the
    // halting configuration is charged
    for (n, expect) in [(1, -1), (2, 1)] {
        let lat = SquareLattice::square(n);
        let r = solve(&cm.tileset, &lat, Some(Method::ColumnDp), 0).unwrap();
        assert_eq!(r.min_score, int(expect), "N = {n}");
        assert_eq!(
            score_assignment(&cm.tileset, &r.witness.unwrap()).unwrap(),
            r.min_score
        );
    }
}

#[test]
fn alphabet_cap() {
    let tm = TuringMachine::from_rules(6, "A", &["A0:1RB", "B0:5LA"]);
    assert!(matches!(
        compile_to_tileset(&tm, DEFAULT_COLOUR_CAP),
        Err(Error::AlphabetTooLarge {
            needed: 38,
            cap: 32
        })
    ));
    let bb2 = registry_machine("bb2").unwrap();
    assert!(matches!(
        compile_to_tileset(&bb2, 5),
        Err(Error::AlphabetTooLarge { .. })
    ));
}

#[test]
fn json_round_trip() {
    for name in ["bb2", "bb3", "bb4"] {
        let tm = registry_machine(name).unwrap();
        assert_eq!(TuringMachine::from_json(&tm.to_json()).unwrap(), tm);
    }
    assert!(TuringMachine::from_json(
        "{\"states\": [], \"symbols\": [\"0\"], \"initial\": \"A\", \"delta\": []}"
    )
    .is_err());
}
