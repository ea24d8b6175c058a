use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;
use tangent_lift::cli::{parse_model, run_command, scenario, Model, Output};
use tangent_lift::Error;

fn scenario_names() -> Vec<String> {
    let mut names: Vec<String> = ["so3", "symplectic2", "symplectic4", "heisenberg", "zero3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for seed in 0..6 {
        names.push(format!("random-linear({seed})"));
        names.push(format!("random-quadratic({seed})"));
    }
    names
}

fn model_of(output: Output) -> Model {
    match output {
        Output::Model(m, _) => m,
        other => panic!("expected a model, got {other:?}"),
    }
}

fn tlift(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tlift"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn printed_models_parse_back_unchanged() {
    for name in scenario_names() {
        let model = scenario(&name).unwrap();
        let text = model.to_string();
        let back = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(back, model, "{name}");
        assert_eq!(back.to_string(), text, "{name}");
    }
    // lifted models live on tangent charts and round-trip as well
    let lifted = model_of(run_command(&scenario("heisenberg").unwrap(), "lift complete").unwrap());
    assert_eq!(parse_model(&lifted.to_string()).unwrap(), lifted);
}

#[test]
fn scenarios_are_poisson_except_odd_quadratic_seeds() {
    for name in scenario_names() {
        let passed = run_command(&scenario(&name).unwrap(), "check-poisson")
            .unwrap()
            .passed();
        let expected = !matches!(
            name.as_str(),
            "random-quadratic(1)" | "random-quadratic(3)" | "random-quadratic(5)"
        );
        assert_eq!(passed, expected, "{name}");
    }
    assert!(scenario("random-linear").is_err());
    assert!(scenario("so4").is_err());
}

fn parse_error(text: &str) -> Error {
    parse_model(text).expect_err("the model should be rejected")
}

#[test]
fn malformed_models_get_located_diagnostics() {
    let head = "manifold M dim 2 coords x1 x2\n";
    let cases: [(&str, &str); 8] = [
        (
            "bivector w on M {\n  [1,2] = x1 +;\n}\n",
            "line 3, column 15",
        ),
        (
            "bivector w on M {\n  [1,2] = z;\n}\n",
            "line 3: unknown identifier `z`",
        ),
        (
            "bivector w on N {\n  [1,2] = 1;\n}\n",
            "line 2: unknown identifier `N`",
        ),
        (
            "bivector w on M { [1,2] = 1; }\nbivector w on M { [1,2] = 2; }\n",
            "line 3: duplicate definition of `w`",
        ),
        (
            "bivector w on M {\n  [1,3] = 1;\n}\n",
            "line 3: index 3 out of range 1..=2",
        ),
        (
            "bivector w on M {\n  [1,1] = x1;\n}\n",
            "line 3: entry [1,1] has a repeated index",
        ),
        (
            "bivector w on M {\n  [1,2] = 1;\n  [2,1] = -1;\n}\n",
            "line 4: entry [2,1] repeats an already given slot",
        ),
        (
            "bivector w on M {\n  [1,2] = 1/(x1 - x1);\n}\n",
            "division by zero",
        ),
    ];
    for (body, expected) in cases {
        let message = parse_error(&format!("{head}{body}")).to_string();
        assert!(
            message.contains(expected),
            "{message:?} should contain {expected:?}"
        );
    }
    assert!(matches!(
        parse_error("manifold M dim 2 coords x1 x2\nmanifold M dim 1 coords t\n"),
        Error::Duplicate { line: 2, .. }
    ));
    assert!(matches!(
        parse_error("bivector w on M { }\n"),
        Error::UnknownIdentifier { line: 1, .. }
    ));
}

#[test]
fn commands_extend_and_inspect_models() {
    let model = scenario("so3").unwrap();
    let lifted = model_of(run_command(&model, "lift complete").unwrap());
    assert!(lifted.get("wC").is_some());
    assert!(run_command(&lifted, "check-poisson wC").unwrap().passed());
    assert!(run_command(&lifted, "check-semi-poisson wC")
        .unwrap()
        .passed());

    let with_bracket = model_of(run_command(&model, "bracket schouten w w").unwrap());
    assert!(run_command(&with_bracket, "check-poisson w")
        .unwrap()
        .passed());

    let with_conn = parse_model(&format!("{model}linconn G on M {{ }}\n")).unwrap();
    let graded =
        model_of(run_command(&with_conn, "lift graded-nabla w --conn G --name W").unwrap());
    assert!(run_command(&graded, "check-graded W").unwrap().passed());

    let modular = model_of(run_command(&model, "modular w --volume riemannian:g").unwrap());
    assert!(modular.get("modular_w").is_some());

    // usage problems are errors, not failed checks
    assert!(matches!(
        run_command(&model, "check-poisson nothing"),
        Err(Error::Usage(_))
    ));
    assert!(run_command(&model, "frobnicate").is_err());
}

#[test]
fn json_reports_are_machine_readable() {
    let (code, model, _) = tlift(&["scenario", "random-quadratic(1)"], "");
    assert_eq!(code, 0);
    let (code, out, _) = tlift(&["check-poisson", "--format", "json"], &model);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], Value::Bool(false));
    assert_eq!(v["checks"][0]["name"], "poisson");
    assert_eq!(v["checks"][0]["passed"], Value::Bool(false));

    let (code, out, _) = tlift(&["scenario", "so3", "--format", "json"], "");
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v.is_object());
}

#[test]
fn exit_status_separates_pass_fail_and_errors() {
    let (code, model, _) = tlift(&["scenario", "symplectic2"], "");
    assert_eq!(code, 0);
    assert_eq!(tlift(&["check-poisson"], &model).0, 0);
    let bad =
        "manifold M dim 3 coords x1 x2 x3\nbivector w on M {\n  [1,2] = x2;\n  [2,3] = x1;\n}\n";
    let (code, out, _) = tlift(&["check-poisson"], bad);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
    let (code, out, err) = tlift(
        &["check-poisson"],
        "manifold M dim 2 coords x1 x2\nbivector w on M {\n  [1,2] = ;\n}\n",
    );
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.starts_with("error: line 3"));
    assert_eq!(tlift(&["no-such-command"], "").0, 2);
}
