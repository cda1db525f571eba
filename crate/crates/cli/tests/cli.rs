use std::collections::BTreeSet;
use std::io::Write;
use std::process::{Command, Output};

use rlsheaf_cli::{builtin, parse_document, parse_workspace, LoadError, Mode};
use rlsheaf_core::fixtures as fx;
use serde_json::Value;

fn rlsheaf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlsheaf"))
        .args(args)
        .env_remove("RLSHEAF_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = rlsheaf(&all);
    let v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    (v, out.status.code().unwrap())
}

fn text(args: &[&str]) -> (String, i32) {
    let out = rlsheaf(args);
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn workspace_file(doc: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(doc.as_bytes()).unwrap();
    f
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn bundled_corpus_validates() {
    let (v, code) = json(&["validate"]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["ok"], true);
    assert!(v["data"]["diagnostics"].as_array().unwrap().is_empty());
    assert_eq!(v["data"]["counts"]["lattices"], 5);
}

#[test]
fn law_suite_passes_on_the_corpus() {
    let (out, code) = text(&["law-suite"]);
    assert_eq!(code, 0, "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn adjunction_suite_passes() {
    let (out, code) = text(&["adjunction-suite"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn filters_of_a4() {
    let (v, code) = json(&["filters", "A4"]);
    assert_eq!(code, 0);
    assert_eq!(strings(&v["data"]["filters"]), ["{0,1,a,b}", "{1,a}", "{1,b}", "{1}"]);
}

#[test]
fn classify_a6() {
    let (v, _) = json(&["classify", "A6"]);
    assert_eq!(strings(&v["data"]["maximal"]), ["{1,a,b,d}", "{1,c,d}"]);
    assert_eq!(strings(&v["data"]["minimal_prime"]), ["{1}"]);
}

#[test]
fn hull_spectrum_of_a4() {
    let (v, code) = json(&["spectrum", "A4", "--set", "spec", "--flavor", "hull"]);
    assert_eq!(code, 0);
    let opens: BTreeSet<Vec<String>> = v["data"]["opens"].as_array().unwrap().iter().map(strings).collect();
    let want: BTreeSet<Vec<String>> = [vec![], vec!["{1,a}"], vec!["{1,b}"], vec!["{1,a}", "{1,b}"]]
        .into_iter()
        .map(|o| o.into_iter().map(String::from).collect())
        .collect();
    assert_eq!(opens, want);
}

#[test]
fn sheafify_the_indiscrete_bundle() {
    let (out, code) = text(&["sheafify", "indiscrete_a2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("étalé: yes; germs: 2"));
    assert!(out.contains("counit continuous: yes; injective: yes; surjective: yes; open: no"));
    let (v, _) = json(&["sheafify", "indiscrete_a2"]);
    assert_eq!(v["data"]["counit"]["open"], false);
    assert_eq!(v["data"]["germs"].as_array().unwrap().len(), 2);
}

#[test]
fn counit_of_an_etale_space_is_an_isomorphism() {
    let (v, code) = json(&["counit-check", "sierpinski_a4_a2"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["isomorphism"], true);
}

#[test]
fn gamma_of_etspecha4_has_four_sections() {
    let (v, code) = json(&["gamma", "etspecha4"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["elements"].as_array().unwrap().len(), 4);
}

#[test]
fn sections_over_a_point_of_the_spectrum() {
    let (v, _) = json(&["sections", "etspecha4", "--open", "{1,a}"]);
    assert_eq!(strings(&v["data"]["sections"]), ["{{1,a}:0_1}", "{{1,a}:1_1}"]);
    let (v, _) = json(&["sections", "etspecha4", "--open", "{1,a},{1,b}"]);
    assert_eq!(v["data"]["sections"].as_array().unwrap().len(), 4);
}

#[test]
fn quotient_by_a_filter() {
    let (v, code) = json(&["quotient", "A6", "d,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["classes"]["b"], "[a,b]");
    let (_, code) = json(&["quotient", "A6", "a"]);
    assert_eq!(code, 1);
}

#[test]
fn pullback_and_composition() {
    let (v, code) = json(&["pullback", "pick_a", "etspecha4"]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["data"]["points"].as_array().unwrap().len(), 2);
    let (v, code) = json(&["compose-rle", "swap_etspecha4", "swap_etspecha4"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["base_map"]["{1,a}"], "{1,a}");
    let (_, code) = json(&["compose-rle", "swap_etspecha4", "restrict_a"]);
    assert_eq!(code, 1);
}

#[test]
fn failed_check_exits_one() {
    let (out, code) = text(&["check-etale", "indiscrete_a2"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL projection is locally injective"));
}

#[test]
fn unknown_command_and_names_exit_two() {
    assert_eq!(rlsheaf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(json(&["filters", "A5"]).1, 2);
    assert_eq!(json(&["export-dot", "nothing"]).1, 2);
}

#[test]
fn machine_readable_alias_and_schema() {
    let out = rlsheaf(&["filters", "A2", "--format", "machine-readable"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, BTreeSet::from(["command", "ok", "checks", "data"]));
    assert_eq!(v["command"], "filters");
}

#[test]
fn export_dot() {
    let (out, code) = text(&["export-dot", "A4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph \"A4\""));
    let (v, _) = json(&["export-dot", "etspecha4"]);
    assert_eq!(v["data"]["kind"], "bundle");
}

#[test]
fn seed_is_read_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_rlsheaf"))
        .args(["law-suite", "--cases", "2"])
        .env("RLSHEAF_SEED", "7")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed: 7"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn empty_document_is_an_empty_workspace() {
    let ws = parse_workspace("{}", Mode::Strict).unwrap();
    assert!(ws.lattices.is_empty() && ws.bundles.is_empty() && ws.diagnostics.is_empty());
}

#[test]
fn dangling_base_is_a_reference_error() {
    let doc = r#"{"spaces": {"T": {"points": ["t"], "opens": [[], ["t"]]}},
                  "bundles": {"E": {"total": "T", "base": "B", "proj": {"t": "b"}}}}"#;
    let err = parse_workspace(doc, Mode::Strict).unwrap_err();
    assert_eq!(
        err,
        LoadError::Reference {
            path: "bundles.E.base".into(),
            key: "B".into()
        }
    );
    assert_eq!(err.exit_code(), 2);
    let f = workspace_file(doc);
    let (v, code) = json(&["validate", "--workspace", f.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "reference");
    assert!(v["error"]["message"].as_str().unwrap().contains("`B`"));
}

#[test]
fn syntax_and_unknown_keys_exit_two() {
    assert!(matches!(parse_document("{"), Err(LoadError::Syntax(_))));
    let err = parse_document(r#"{"lattices": {}, "colour": 1}"#).unwrap_err();
    assert!(matches!(err, LoadError::Syntax(ref m) if m.contains("colour")));
    let err = parse_document(r#"{"spaces": {"S": {"points": [], "opens": [[]], "extra": 0}}}"#).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

const TWO: &str = r#""carrier": ["0", "1"], "hasse": [["0", "1"]]"#;

#[test]
fn upper_triangular_products_are_symmetrized() {
    let doc = format!(r#"{{"lattices": {{"L": {{{TWO}, "mul": {{"0,0": "0", "0,1": "0", "1,1": "1"}}}}}}}}"#);
    let ws = parse_workspace(&doc, Mode::Strict).unwrap();
    let l = &ws.lattices["L"];
    assert_eq!(**l, *fx::a2());
}

#[test]
fn conflicting_cells_are_rejected() {
    let doc =
        format!(r#"{{"lattices": {{"L": {{{TWO}, "mul": {{"0,0": "0", "0,1": "0", "1,0": "1", "1,1": "1"}}}}}}}}"#);
    let err = parse_workspace(&doc, Mode::Strict).unwrap_err();
    assert!(matches!(err, LoadError::Invalid { ref path, .. } if path.starts_with("lattices.L.mul")));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn lenient_mode_records_diagnostics() {
    let doc = format!(
        r#"{{"lattices": {{
              "Bad": {{{TWO}, "mul": {{"0,0": "0", "0,1": "1", "1,1": "1"}}}},
              "Good": {{{TWO}, "mul": {{"0,0": "0", "0,1": "0", "1,1": "1"}}}}}},
            "morphisms": {{"m": {{"dom": "Bad", "cod": "Good", "table": {{"0": "0", "1": "1"}}}}}}}}"#
    );
    assert!(matches!(
        parse_workspace(&doc, Mode::Strict),
        Err(LoadError::Invalid { .. })
    ));
    let ws = parse_workspace(&doc, Mode::Lenient).unwrap();
    assert_eq!(ws.lattices.keys().collect::<Vec<_>>(), ["Good"]);
    let paths: Vec<&str> = ws.diagnostics.iter().map(|d| d.path.as_str()).collect();
    assert_eq!(paths, ["lattices.Bad", "morphisms.m.dom"]);
    let f = workspace_file(&doc);
    let p = f.path().to_str().unwrap();
    assert_eq!(json(&["validate", "--workspace", p]).1, 1);
    let (v, code) = json(&["validate", "--workspace", p, "--lenient"]);
    assert_eq!(code, 1);
    assert_eq!(v["data"]["diagnostics"].as_array().unwrap().len(), 2);
}

#[test]
fn serialization_round_trips() {
    let ws = builtin();
    let text = serde_json::to_string(&ws.to_document()).unwrap();
    let again = parse_workspace(&text, Mode::Strict).unwrap();
    assert!(again == ws);
    assert_eq!(again.to_document(), ws.to_document());
}

#[test]
fn corpus_matches_the_library_examples() {
    let ws = builtin();
    assert_eq!(*ws.lattices["A4"], *fx::a4());
    assert_eq!(*ws.lattices["A6"], *fx::a6());
    assert_eq!(*ws.lattices["A8"], *fx::a8());
    assert_eq!(ws.bundles["etspecha4"].bundle, *fx::etspecha4().bundle());
    assert_eq!(ws.bundles["etmaxda6"].bundle, *fx::etmaxda6().bundle());
    assert_eq!(ws.bundles["etminpa8"].bundle, *fx::etminpa8().bundle());
    assert_eq!(
        ws.bundles["indiscrete_a2"].bundle,
        *fx::indiscrete_a2_over_point().bundle()
    );
    assert_eq!(ws.bundles["sierpinski_a4_a2"].bundle, *fx::sierpinski_a2_a4().bundle());
    assert_eq!(ws.morphisms["a6_to_a4"].morphism, fx::a6_to_a4());
}
