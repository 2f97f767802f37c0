mod common;

use std::path::PathBuf;

use common::{fig8, models};
use liqueur_plant::codegen::{
    check_port_compliance, emit_st, parse_model, plant_model, to_st_identifier, ErrorKind,
};
use proptest::prelude::*;

fn repo_file(rel: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn plant_model_matches_the_published_sample() {
    let emitted = emit_st(&plant_model().normalized());
    assert_eq!(fig8::check(&emitted), Ok(3));
}

#[test]
fn sample_matcher_is_not_vacuous() {
    let emitted = emit_st(&plant_model().normalized());
    let broken = emitted.replace("itsPROCESS:PROCESS2MHSILO_IF;", "itsPROC:PROCESS2MHSILO_IF;");
    assert!(fig8::check(&broken).is_err());
    let reordered = emitted.replace(
        "METHOD HEATING_COMPLETED END_METHOD\nMETHOD MIXING_COMPLETED END_METHOD",
        "METHOD MIXING_COMPLETED END_METHOD\nMETHOD HEATING_COMPLETED END_METHOD",
    );
    assert!(fig8::check(&reordered).is_err());
}

#[test]
fn wildcard_matching() {
    let t = |s: &str| fig8::tokens(s);
    assert!(fig8::matches(&t("A ... B"), &t("A B")));
    assert!(fig8::matches(&t("A ... B"), &t("A x : y ; B")));
    assert!(!fig8::matches(&t("A ... B"), &t("A x")));
    assert_eq!(t("x: Y;"), ["x", ":", "Y", ";"]);
}

#[test]
fn shipped_files_agree_with_the_built_in_model() {
    let model = plant_model().normalized();
    assert_eq!(parse_model(&repo_file("models/liqueur_plant.json")).unwrap(), model);
    let st = repo_file("models/liqueur_plant.st");
    assert_eq!(st, emit_st(&model));
    assert_eq!(parse_model(&st).unwrap(), model);
}

#[test]
fn every_plant_connection_is_compliant() {
    let m = plant_model().normalized();
    let pairs = [
        ("SiloProcessPort", "GenLiqueurA2SiloPort"),
        ("MHSiloProcessPort", "GenLiqueurA2MHSiloPort"),
        ("HSiloProcessPort", "GenLiqueurB2HSiloPort"),
        ("MSiloProcessPort", "GenLiqueurB2MSiloPort"),
    ];
    for (a, b) in pairs {
        let r = check_port_compliance(&m, a, b).unwrap();
        assert!(r.is_compliant(), "{a} / {b}: {:?}", r.violations);
    }
    let r = check_port_compliance(&m, "HSiloProcessPort", "GenLiqueurA2SiloPort").unwrap();
    assert!(!r.is_compliant());
}

#[test]
fn error_kinds_and_locations() {
    let cases: &[(&str, ErrorKind, Option<usize>)] = &[
        ("FUNCTION_BLOCK A\nx:INT\nEND_FUNCTION_BLOCK\n", ErrorKind::Syntax, Some(3)),
        ("FUNCTION_BLOCK A\nx:NOPE;\nEND_FUNCTION_BLOCK\n", ErrorKind::UnresolvedReference, Some(1)),
        (
            "FUNCTION_BLOCK A EXTENDS B\nEND_FUNCTION_BLOCK\n\nFUNCTION_BLOCK B EXTENDS A\nEND_FUNCTION_BLOCK\n",
            ErrorKind::CyclicInheritance,
            Some(1),
        ),
        ("INTERFACE I\nEND_INTERFACE\nFUNCTION_BLOCK I\nEND_FUNCTION_BLOCK\n", ErrorKind::DuplicateName, Some(3)),
        ("FUNCTION_BLOCK fooBar\nEND_FUNCTION_BLOCK\nFUNCTION_BLOCK FOO_BAR\nEND_FUNCTION_BLOCK\n", ErrorKind::DuplicateName, Some(3)),
        ("FUNCTION_BLOCK A IMPLEMENTS X\nEND_FUNCTION_BLOCK\n", ErrorKind::UnresolvedReference, Some(1)),
        (r#"{"blocks": [{"name": "A", "extends": "Z"}]}"#, ErrorKind::UnresolvedReference, None),
        (r#"{"blocks": [{"name": "END_VAR"}]}"#, ErrorKind::Syntax, None),
    ];
    for (text, kind, line) in cases {
        let err = parse_model(text).unwrap_err();
        assert_eq!(err.kind, *kind, "{text}: {err}");
        assert_eq!(err.location.line, *line, "{text}: {err}");
    }
}

#[test]
fn json_errors_carry_a_path() {
    let err = parse_model(r#"{"interfaces": [], "blocks": [{"name": "A"}, {"name": "B", "members": [{"name": "x", "type": "Q"}]}]}"#)
        .unwrap_err();
    assert_eq!(err.kind, ErrorKind::UnresolvedReference);
    assert_eq!(err.location.path, "blocks[1].members[0].type");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_models_round_trip(seed in any::<u64>()) {
        let m = models::random_model(seed);
        prop_assert!(m.validate().is_ok());
        let text = emit_st(&m);
        prop_assert_eq!(parse_model(&text).unwrap(), m.clone());
        prop_assert_eq!(emit_st(&parse_model(&text).unwrap()), text);
        let json = serde_json::to_string(&m).unwrap();
        prop_assert_eq!(parse_model(&json).unwrap(), m);
    }

    #[test]
    fn normalization_is_idempotent(name in "[A-Za-z_][A-Za-z0-9_]{0,12}") {
        let once = to_st_identifier(&name);
        prop_assert_eq!(to_st_identifier(&once), once);
    }

    #[test]
    fn garbage_never_panics(text in "\\PC{0,80}") {
        let _ = parse_model(&text);
    }
}
