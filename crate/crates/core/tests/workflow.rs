//! One pass through the library the way a caller would use it: state a
//! conjecture, refute it, persist the witness, reload it, interrogate it,
//! then quotient it down and certify a repaired conjecture.

use std::time::Duration;

use secretum_core::decision::{
    decide, filtrate, find_countermodel, verify_filtration, SearchConfig, SearchOutcome,
};
use secretum_core::kripke::KripkeModel;
use secretum_core::parser::parse_formula;

#[test]
fn refute_persist_reload_quotient_certify() {
    // "If the keeper intends to keep p secret from b, b does not know p"
    // sounds plausible and is false.
    let conjecture = parse_formula("S[a,b] p -> ~K[b] p").unwrap().desugar();
    let outcome = decide(&conjecture, Duration::from_secs(120)).unwrap();
    let SearchOutcome::Invalid { model, world } = outcome else {
        panic!("the conjecture must be refutable, got {outcome:?}");
    };

    // Round-trip the witness through its file format.
    let reloaded = KripkeModel::from_json_str(&model.to_json_string()).unwrap();
    assert_eq!(reloaded, model);
    assert!(reloaded.check_frame().all_passed());
    assert!(!reloaded.eval(&world, &conjecture).unwrap());

    // At the refuting world the secret is kept *and* leaked.
    let kept = parse_formula("S[a,b] p & K[b] p").unwrap().desugar();
    assert!(reloaded.eval(&world, &kept).unwrap());

    // The quotient through the conjecture's closure keeps the refutation.
    let filtration = filtrate(&reloaded, &conjecture).unwrap();
    let report = verify_filtration(&reloaded, &filtration, &conjecture).unwrap();
    assert!(report.is_ok(), "{report:?}");
    let representative = &filtration.class_map[&world];
    assert!(!filtration
        .model
        .eval_unchecked(representative, &conjecture)
        .unwrap());

    // Weakening the consequent to belief-compatible ignorance repairs it:
    // the keeper *believes* b does not know p. (The full certificate bound
    // is out of desk range, so sweep four tiers.)
    let repaired = parse_formula("S[a,b] p -> B[a] ~K[b] p").unwrap().desugar();
    let cfg = SearchConfig::new(4).with_budget(Duration::from_secs(120));
    let outcome = find_countermodel(&repaired, &cfg).unwrap();
    assert!(
        matches!(outcome, SearchOutcome::ValidUpTo(4)),
        "the repaired conjecture must not be refuted: {outcome:?}"
    );
}
