use semiquat::config::{parse_curve_csv, parse_grid, ConfigError, CurveChoice, OutputFormat, RunConfig};
use semiquat::{MetricContext, SemiQuaternion};

#[test]
fn defaults_are_complete_and_valid() {
    let cfg = RunConfig::from_json("{}").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.ctx(), MetricContext::default());
    assert_eq!(cfg.c, 2.0);
    assert_eq!(cfg.grid.to_string(), "-1:1:21");
    assert_eq!(cfg.beta_anchor(), SemiQuaternion::spatial(2.0, 2.0, 2.0));
    let moved = RunConfig::from_json(r#"{"c": -3}"#).unwrap();
    assert_eq!(moved.beta_anchor(), SemiQuaternion::spatial(-3.0, -3.0, -3.0));
    assert_eq!(cfg.output.format_or(OutputFormat::Json), OutputFormat::Json);
}

#[test]
fn echoed_config_parses_back() {
    let cfg = RunConfig::from_json(r#"{"metric":"paper24","grid":"0:2:5","curve":"fuzz:4"}"#).unwrap();
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    assert_eq!(cfg.ctx(), MetricContext::paper24());
    assert_eq!(cfg.curve, CurveChoice::Builtin("fuzz:4".into()));
}

#[test]
fn grid_errors_name_the_problem() {
    for (text, needle) in [
        ("0:1", "three fields"),
        ("x:1:3", "lower bound"),
        ("0:y:3", "upper bound"),
        ("0:1:-2", "count"),
        ("1:0:5", "min < max"),
        ("0:1:1", "at least 2"),
        ("0:inf:4", "finite"),
    ] {
        let err = parse_grid(text).unwrap_err().to_string();
        assert!(err.contains(needle), "{text}: {err}");
    }
    assert_eq!(parse_grid(" -2 : 2 : 3 ").unwrap().points(), vec![-2.0, 0.0, 2.0]);
}

#[test]
fn curve_csv_errors_carry_line_numbers() {
    let head = "s,q1,q2,q3,q4\n";
    assert!(matches!(parse_curve_csv("t,q1,q2,q3,q4\n0,0,0,0,0\n"), Err(ConfigError::Csv { line: 1, .. })));
    let bad = format!("{head}0,0,0,0,0\n1,1,nan,0,0\n2,2,0,0,0\n3,3,0,0,0\n");
    match parse_curve_csv(&bad) {
        Err(ConfigError::Csv { line, reason }) => {
            assert_eq!(line, 3);
            assert!(reason.contains("nan"), "{reason}");
        }
        other => panic!("{other:?}"),
    }
    assert!(parse_curve_csv(&format!("{head}0,0,0,0\n")).is_err());
    assert!(parse_curve_csv(&format!("{head}1,0,0,0,0\n0,1,0,0,0\n2,0,0,0,0\n3,0,0,0,0\n")).is_err());
    assert!(parse_curve_csv(head).is_err());
}

#[test]
fn unknown_fields_and_bad_values_are_rejected() {
    for text in [
        r#"{"colour": 1}"#,
        r#"{"tolerances": {"tangency": 1e-8, "slack": 1}}"#,
        r#"{"tolerances": {"tangency": 0}}"#,
        r#"{"tolerances": {"ode_fd": -1e-3}}"#,
        r#"{"metric": "lorentz"}"#,
        r#"{"metric": {"ambient_signs": [1, 1, 1, 1]}}"#,
        r#"{"grid": "0:0:3"}"#,
        r#"{"output": {"format": "xml"}}"#,
        "[1, 2]",
    ] {
        assert!(RunConfig::from_json(text).is_err(), "{text}");
    }
    let err = RunConfig::from_json(r#"{"tolerances": {"tangency": 0}}"#).unwrap_err();
    assert!(matches!(err, ConfigError::Tolerance { ref name, .. } if name == "tangency"), "{err}");
}

#[test]
fn curve_choices_resolve() {
    let ctx = MetricContext::default();
    assert!(matches!(CurveChoice::from_arg("data/Path.CSV"), CurveChoice::Csv { .. }));
    assert!(CurveChoice::from_arg("cubic").build(&ctx).is_ok());
    assert!(CurveChoice::from_arg("fuzz:12").build(&ctx).is_ok());
    for bad in ["fuzz:", "fuzz:-1", "helix"] {
        assert!(matches!(CurveChoice::from_arg(bad).build(&ctx), Err(ConfigError::UnknownCurve(_))), "{bad}");
    }
    assert!(matches!(CurveChoice::from_arg("/nonexistent/x.csv").build(&ctx), Err(ConfigError::Io { .. })));
}
