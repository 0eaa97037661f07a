use mixassoc::{Family, OutcomeKind};
use mixassoc_cli::{read_dataset, write_dataset, AnalysisConfig, CliError, Kind, OutcomeConfig};

fn outcome(column: &str, kind: Kind) -> OutcomeConfig {
    OutcomeConfig {
        column: column.into(),
        kind,
        family: None,
        link: mixassoc::Link::Logit,
        levels: None,
    }
}

fn config(outcomes: Vec<OutcomeConfig>, covariates: &[&str]) -> AnalysisConfig {
    AnalysisConfig::new(outcomes, covariates.iter().map(|s| s.to_string()).collect())
}

#[test]
fn declared_ordering_sets_the_codes() {
    let csv = "id,anx,w\n1,mid,2.5\n2,high,1.0\n3,low,0.5\n";
    let mut anx = outcome("anx", Kind::Ordinal);
    anx.levels = Some(vec!["low".into(), "mid".into(), "high".into()]);
    let cfg = config(vec![anx, outcome("w", Kind::Continuous)], &[]);
    let data = read_dataset(csv.as_bytes(), &cfg).unwrap();
    assert_eq!(data.outcomes[0].y, vec![2.0, 3.0, 1.0]);
    assert_eq!(data.outcomes[0].spec.outcome, OutcomeKind::Ordinal(3));
    assert_eq!(data.outcomes[0].spec.family, Family::CumulativeLink);
    assert_eq!(data.outcomes[1].y, vec![2.5, 1.0, 0.5]);
    assert_eq!(data.n(), 3);
}

#[test]
fn undeclared_levels_sort_numerically_or_lexically() {
    let csv = "a,b\n10,beta\n9,alpha\n10,gamma\n100,alpha\n";
    let cfg = config(vec![outcome("a", Kind::Ordinal), outcome("b", Kind::Ordinal)], &[]);
    let data = read_dataset(csv.as_bytes(), &cfg).unwrap();
    assert_eq!(data.outcomes[0].y, vec![2.0, 1.0, 2.0, 3.0]);
    assert_eq!(data.outcomes[1].y, vec![2.0, 1.0, 3.0, 1.0]);
}

#[test]
fn missing_header_column_is_named() {
    let cfg = config(vec![outcome("y", Kind::Continuous)], &["age"]);
    match read_dataset("y,sex\n1,0\n".as_bytes(), &cfg) {
        Err(CliError::MissingColumn(c)) => assert_eq!(c, "age"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unobserved_declared_category_is_listed() {
    let mut anx = outcome("anx", Kind::Ordinal);
    anx.levels = Some(vec!["low".into(), "mid".into(), "high".into(), "severe".into()]);
    let cfg = config(vec![anx], &[]);
    match read_dataset("anx\nlow\nhigh\nlow\n".as_bytes(), &cfg) {
        Err(e @ CliError::UnobservedCategory { .. }) => {
            let msg = e.to_string();
            assert!(msg.contains("mid") && msg.contains("severe"), "{msg}");
            assert_eq!(e.exit_code(), 3);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn rows_with_missing_cells_are_dropped_by_line() {
    let csv = "y,x,unused\n1.0,2.0,\n,3.0,a\n2.0,NA,b\n4.0,1.0,c\n";
    let cfg = config(vec![outcome("y", Kind::Continuous)], &["x"]);
    let data = read_dataset(csv.as_bytes(), &cfg).unwrap();
    assert_eq!(data.rejected_lines, vec![3, 4]);
    assert_eq!(data.outcomes[0].y, vec![1.0, 4.0]);
    assert_eq!(data.covariates.column(0), vec![2.0, 1.0]);
    match read_dataset("y,x\n,1\n2,\n".as_bytes(), &cfg) {
        Err(CliError::EmptyAfterFiltering { rejected }) => assert_eq!(rejected, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn non_numeric_cells_report_their_line() {
    let cfg = config(vec![outcome("y", Kind::Continuous)], &["x"]);
    match read_dataset("y,x\n1,2\n3,abc\n".as_bytes(), &cfg) {
        Err(CliError::NonNumericCell { line, column, value }) => {
            assert_eq!((line, column.as_str(), value.as_str()), (3, "x", "abc"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn quoted_fields_are_accepted() {
    let csv = "\"group\",\"y\"\n\"low, really\",1.5\n\"high\",2.5\n";
    let mut g = outcome("group", Kind::Binary);
    g.levels = Some(vec!["low, really".into(), "high".into()]);
    let cfg = config(vec![g, outcome("y", Kind::Continuous)], &[]);
    let data = read_dataset(csv.as_bytes(), &cfg).unwrap();
    assert_eq!(data.outcomes[0].y, vec![0.0, 1.0]);
}

#[test]
fn written_data_reloads_identically() {
    let csv = "w,anx,smoker,age\n1.25,mid,no,19\n-0.5,low,yes,21\n3.0,high,no,18\n0.1,mid,yes,20\n";
    let mut anx = outcome("anx", Kind::Ordinal);
    anx.levels = Some(vec!["low".into(), "mid".into(), "high".into()]);
    let cfg = config(
        vec![outcome("w", Kind::Continuous), anx, outcome("smoker", Kind::Binary)],
        &["age"],
    );
    let data = read_dataset(csv.as_bytes(), &cfg).unwrap();
    let mut buf = Vec::new();
    write_dataset(&data, &mut buf).unwrap();
    let again = read_dataset(buf.as_slice(), &cfg).unwrap();
    assert_eq!(data, again);
}

#[test]
fn config_rejects_overlapping_columns() {
    let cfg = config(vec![outcome("y", Kind::Continuous)], &["y"]);
    let err = cfg.validate().unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let mut bad = config(vec![outcome("y", Kind::Continuous)], &[]);
    bad.outcomes[0].family = Some(Family::CumulativeLink);
    assert!(bad.validate().is_err());
}

#[test]
fn config_json_defaults() {
    let cfg: AnalysisConfig = serde_json::from_str(
        r#"{"outcomes": [{"column": "w", "kind": "continuous"},
                         {"column": "a", "kind": "ordinal", "family": "adjacent_category_logit"}],
            "covariates": ["x"], "seed": 7}"#,
    )
    .unwrap();
    cfg.validate().unwrap();
    assert_eq!((cfg.m, cfg.b, cfg.alpha, cfg.delta), (30, 1000, 0.05, None));
    assert_eq!(cfg.pairs().unwrap(), vec![(0, 1)]);
    assert!(serde_json::from_str::<AnalysisConfig>(r#"{"outcomes": [], "bogus": 1}"#).is_err());
}
