//! Which terms are event processing agents, and of what shape.

use evl::events::{agent_shape, is_epa};
use evl::infer::Options;
use evl::{syntax, Mode};

fn main() {
    let opts = Options::new(Mode::Extended);
    let programs = [
        "λx. x",
        "λx. {location = x.location, alert = true}",
        "λacc. λx. {total = acc.total + x.precipitation}",
        "λxs. cons (λx. x) nil",
        "λx. x.temperature",
        "1",
    ];
    for src in programs {
        let t = syntax::parse(src, Mode::Extended).unwrap();
        match agent_shape(&t, &opts) {
            Ok(s) => println!("{src}\n  agent of arity {}: {}", s.arity(), s.scheme),
            Err(e) => println!("{src}\n  not an agent: {e}"),
        }
        assert_eq!(is_epa(&t, &opts), agent_shape(&t, &opts).is_ok());
    }
}
