use std::fs;
use std::path::Path;

use kmrep::families::FamilySpec;
use kmrep::spec_file::{load_chain, parse_chain_spec, ChainSpec, MAX_CUSTOM_STATES};
use proptest::prelude::*;

fn corpus() -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus/chain_spec_parse");
    let mut out: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn corpus_seeds_parse_as_labelled() {
    let seeds = corpus();
    assert!(seeds.len() >= 10);
    for (name, text) in seeds {
        let parsed = parse_chain_spec(&text);
        match name.as_str() {
            "misspelled" | "bad_type" | "both" => assert!(parsed.is_err(), "{name}"),
            "singular" => {
                assert!(parsed.is_ok(), "{name}");
                let err = load_chain(&text).unwrap_err().to_string();
                assert!(err.contains("B^11"), "{err}");
            }
            _ => {
                parsed.unwrap_or_else(|e| panic!("{name}: {e}"));
                load_chain(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }
}

#[test]
fn diagnostics_locate_the_problem() {
    let err = parse_chain_spec("{\"family\": \"ehrenfest\",\n \"params\": {\"N\": 3},\n \"extra\": 1}")
        .unwrap_err()
        .to_string();
    assert!(err.contains("line 3") && err.contains("extra"), "{err}");
    let err = parse_chain_spec(r#"{"family":"jacobi_block","params":{"alpha":1}}"#)
        .unwrap_err()
        .to_string();
    assert!(err.contains("beta"), "{err}");
    let err = parse_chain_spec(r#"{"family":"ehrenfest","params":{"N":-1}}"#)
        .unwrap_err()
        .to_string();
    assert!(err.contains("params"), "{err}");
    assert!(parse_chain_spec(r#"{"custom_tridiagonal":{"p":[1],"q":[0],"r":[0]},"params":{}}"#).is_err());
    let huge = format!(
        r#"{{"custom_tridiagonal":{{"p":[{}],"q":[0],"r":[0]}}}}"#,
        vec!["0"; MAX_CUSTOM_STATES + 1].join(",")
    );
    assert!(parse_chain_spec(&huge).unwrap_err().to_string().contains("at most"));
}

#[test]
fn built_chains_have_the_right_shape() {
    let b = load_chain(r#"{"family":"bernoulli_laplace","params":{"W":3,"B":4}}"#).unwrap();
    assert_eq!(b.rows().scalar_size(), Some(4));
    assert!(b.family().is_some());
    let b = load_chain(r#"{"family":"chebyshev_block"}"#).unwrap();
    assert!(b.scalar_chain().is_none());
    assert!(!b.rows().is_stochastic());
    let b = load_chain(r#"{"custom_tridiagonal":{"p":[0.5,0.5,0],"q":[0,0.5,0.5],"r":[0.5,0,0.5]}}"#).unwrap();
    assert!(b.family().is_none());
    assert!(b.rows().is_stochastic());
}

fn arb_family() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        (1usize..200).prop_map(|n| FamilySpec::Ehrenfest { n }),
        (0.01f64..0.99).prop_map(|p| FamilySpec::ChebyshevWalk { p }),
        (1usize..50, 0usize..50).prop_map(|(w, e)| FamilySpec::BernoulliLaplace { white: w, black: w + e }),
        (-0.9f64..10.0, -0.9f64..10.0).prop_map(|(alpha, beta)| FamilySpec::JacobiBlock { alpha, beta }),
        Just(FamilySpec::ChebyshevBlock),
    ]
}

fn to_json(spec: &FamilySpec) -> String {
    let params = match spec {
        FamilySpec::Ehrenfest { n } => format!(r#"{{"N":{n}}}"#),
        FamilySpec::ChebyshevWalk { p } => format!(r#"{{"p":{p:?}}}"#),
        FamilySpec::BernoulliLaplace { white, black } => format!(r#"{{"W":{white},"B":{black}}}"#),
        FamilySpec::JacobiBlock { alpha, beta } => format!(r#"{{"alpha":{alpha:?},"beta":{beta:?}}}"#),
        FamilySpec::ChebyshevBlock => "{}".into(),
    };
    format!(r#"{{"family":"{}","params":{params}}}"#, spec.name())
}

proptest! {
    #[test]
    fn family_specs_parse_back(spec in arb_family()) {
        prop_assert_eq!(parse_chain_spec(&to_json(&spec)).unwrap(), ChainSpec::Family(spec));
    }

    #[test]
    fn arbitrary_text_never_panics(text in ".{0,200}") {
        let _ = load_chain(&text);
    }

    #[test]
    fn arbitrary_custom_chains_never_panic(
        p in prop::collection::vec(-1.0f64..2.0, 0..20),
        q in prop::collection::vec(-1.0f64..2.0, 0..20),
        r in prop::collection::vec(-1.0f64..2.0, 0..20),
    ) {
        let text = format!(r#"{{"custom_tridiagonal":{{"p":{p:?},"q":{q:?},"r":{r:?}}}}}"#);
        if let Ok(b) = load_chain(&text) {
            prop_assert!(b.rows().is_stochastic());
        }
    }
}
