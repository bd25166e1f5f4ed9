use gaplab::dsl::{eval_sequence, parse_sequence, EvalError, ParseErrorKind, SequenceExpr as E};
use proptest::prelude::*;

const CORPUS: &str = include_str!("fixtures/dsl_corpus.tsv");

fn corpus() -> Vec<(&'static str, u64, f64)> {
    CORPUS
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut f = l.split('\t');
            let expr = f.next().unwrap();
            let n = f.next().unwrap().parse().unwrap();
            let v = f.next().unwrap().parse().unwrap();
            (expr, n, v)
        })
        .collect()
}

#[test]
fn corpus_matches_high_precision_values() {
    let rows = corpus();
    let mut exprs: Vec<&str> = rows.iter().map(|r| r.0).collect();
    exprs.dedup();
    assert!(exprs.len() >= 50);
    for (src, n, want) in rows {
        let e = parse_sequence(src).unwrap_or_else(|err| panic!("{src}: {err}"));
        let got = eval_sequence(&e, n).unwrap().to_f64();
        assert!(((got - want) / want).abs() < 1e-12, "{src} at n={n}: {got} vs {want}");
    }
}

#[test]
fn corpus_round_trips_through_printer() {
    for (src, _, _) in corpus() {
        let e = parse_sequence(src).unwrap();
        let printed = e.to_string();
        assert_eq!(parse_sequence(&printed).unwrap(), e, "{src} -> {printed}");
        assert_eq!(parse_sequence(&printed).unwrap().to_string(), printed);
    }
}

#[test]
fn precedence_fixtures() {
    let (n, two, three) = (|| E::Var, || E::number("2"), || E::number("3"));
    assert_eq!(parse_sequence("n/2^3").unwrap(), E::div(n(), E::pow(two(), three())));
    assert_eq!(parse_sequence("n-2-3").unwrap(), E::sub(E::sub(n(), two()), three()));
    assert_eq!(parse_sequence("n^2^3").unwrap(), E::pow(n(), E::pow(two(), three())));
    assert_eq!(parse_sequence("1/(n^2)").unwrap(), E::div(E::number("1"), E::pow(n(), two())));
    assert_eq!(parse_sequence("1/ln(n)^2").unwrap(), E::div(E::number("1"), E::pow(E::ln(n()), two())));
    assert_eq!(parse_sequence("n/2*3").unwrap(), E::mul(E::div(n(), two()), three()));
    assert_eq!(parse_sequence("n+2*3").unwrap(), E::add(n(), E::mul(two(), three())));
    assert_eq!(parse_sequence("-n^2").unwrap(), E::pow(E::neg(n()), two()));
    assert_eq!(parse_sequence("n^-2").unwrap(), E::pow(n(), E::neg(two())));
    assert_eq!(parse_sequence("  ln ( n )* 2 ").unwrap(), E::mul(E::ln(n()), two()));
}

#[test]
fn syntax_errors_report_position_and_expectations() {
    let err = parse_sequence("1/(n^").unwrap_err();
    assert_eq!(err.offset, 5);
    match err.kind {
        ParseErrorKind::Syntax { expected, .. } => {
            assert_eq!(expected, vec!["'('", "'-'", "'ln'", "'n'", "number"]);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_sequence("").unwrap_err().kind, ParseErrorKind::Empty));
    assert!(matches!(parse_sequence("   ").unwrap_err().kind, ParseErrorKind::Empty));
    let err = parse_sequence("exp(n)").unwrap_err();
    assert_eq!(err.offset, 0);
    assert!(matches!(err.kind, ParseErrorKind::UnknownIdentifier { ref name } if name == "exp"));
    assert!(parse_sequence("2*x").is_err());
    assert_eq!(parse_sequence("(n").unwrap_err().offset, 2);
    assert_eq!(parse_sequence("n)").unwrap_err().offset, 1);
    assert!(parse_sequence("1e3").is_err());
    assert!(parse_sequence("1..2").is_err());
    assert!(parse_sequence("ln n").is_err());
}

#[test]
fn evaluation_errors() {
    let ev = |s: &str, n: u64| eval_sequence(&parse_sequence(s).unwrap(), n);
    assert!(matches!(ev("n", 0), Err(EvalError::ZeroIndex(_))));
    assert!(matches!(ev("1/(n - 2)", 2), Err(EvalError::DivisionByZero { .. })));
    assert!(matches!(ev("ln(1 - n)", 3), Err(EvalError::LnDomain { .. })));
    assert!(matches!(ev("(1 - n)^0.5 + 10", 3), Err(EvalError::PowDomain { .. })));
    assert!(matches!(ev("2 - n", 5), Err(EvalError::NotPositive { .. })));
    assert!(matches!(ev("1/ln(n)", 1), Err(EvalError::DivisionByZero { .. })));
    assert!(ev("(1 - n)^2", 3).is_ok());
}

#[test]
fn ast_json_round_trip() {
    let e = parse_sequence("1/(n*ln(n)^1.50)").unwrap();
    let json = serde_json::to_string(&e).unwrap();
    assert!(json.contains("\"1.50\""));
    let back: E = serde_json::from_str(&json).unwrap();
    assert_eq!(back, e);
}

fn literal() -> impl Strategy<Value = E> {
    prop::sample::select(vec!["0", "1", "2", "0.5", "3.25", "10", "1.01", "007", "12.000"]).prop_map(E::number)
}

fn expr() -> impl Strategy<Value = E> {
    let leaf = prop_oneof![literal(), Just(E::Var)];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(E::ln),
            inner.clone().prop_map(E::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| E::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| E::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| E::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| E::div(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| E::pow(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn printed_trees_reparse_identically(e in expr()) {
        let printed = e.to_string();
        let back = parse_sequence(&printed).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", printed);
    }

    #[test]
    fn parser_never_panics(s in "[n0-9ln()+*/^. -]{0,24}") {
        let _ = parse_sequence(&s);
    }
}
