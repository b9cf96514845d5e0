//! The frozen oracle table in `tests/data` must match what the library computes.

use bcsgp::oracles::{oracle_table, OracleTable, ORACLE_TABLE_VERSION};

fn frozen() -> OracleTable {
    let text = include_str!("data/oracle_table.json");
    serde_json::from_str(text).expect("oracle table parses")
}

#[test]
fn frozen_table_is_current_version() {
    assert_eq!(frozen().version, ORACLE_TABLE_VERSION);
}

#[test]
fn every_frozen_case_is_reproduced() {
    let live = oracle_table().unwrap();
    let table = frozen();
    assert_eq!(table.cases.len(), live.cases.len(), "case lists differ");
    for case in &table.cases {
        let now = live.get(&case.name).unwrap_or_else(|| panic!("case {} vanished", case.name));
        assert_eq!(now.inputs, case.inputs, "{}", case.name);
        match (case.expected, now.expected) {
            (Some(a), Some(b)) => {
                let tol = 1e-12 * a.abs().max(1.0);
                assert!((a - b).abs() <= tol, "{}: frozen {a}, computed {b}", case.name);
            }
            (None, None) => {}
            (a, b) => panic!("{}: frozen {a:?}, computed {b:?}", case.name),
        }
    }
}

#[test]
fn tolerances_are_sane() {
    for case in &frozen().cases {
        assert!(case.tolerance >= 0.0 && case.tolerance <= 1e-2, "{}", case.name);
        assert!(!case.formula.is_empty() && !case.derivation.is_empty(), "{}", case.name);
    }
}
