mod common;

use proptest::prelude::*;

use common::gen::any_term;
use evl::syntax::{self, parse_scheme, pretty};
use evl::Mode;

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]

    #[test]
    fn parse_after_pretty_is_identity(t in any_term()) {
        let text = pretty(&t);
        let back = syntax::parse(&text, Mode::Extended).map_err(|d| TestCaseError::fail(format!("{d}\n{text}")))?;
        prop_assert_eq!(back, t);
    }
}

#[test]
fn corpus_round_trips() {
    for (name, src) in common::corpus() {
        if common::SCHEMES.contains(&name.as_str()) {
            let s = parse_scheme(src.trim()).unwrap();
            assert_eq!(parse_scheme(&s.to_string()).unwrap(), s, "{name}");
            continue;
        }
        let t = syntax::parse(&src, common::mode_of(&name)).unwrap_or_else(|d| panic!("{name}: {d}"));
        let text = pretty(&t);
        assert_eq!(syntax::parse(&text, Mode::Extended).unwrap(), t, "{name}");
        assert_eq!(pretty(&syntax::parse(&text, Mode::Extended).unwrap()), text, "{name}");
    }
}

#[test]
fn core_mode_rejects_extended_syntax() {
    assert!(syntax::parse("letrec f x = f x in f", Mode::Core).is_err());
    assert!(syntax::parse("letrec f x = f x in f", Mode::Extended).is_ok());
}
