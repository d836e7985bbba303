//! Parse a program, print it back, and parse the printout again.
//!
//! `cargo run --example parse_and_pretty [FILE]`

use evl::syntax::{self, pretty};
use evl::Mode;

fn main() {
    let src = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("read source"),
        None => r#"letEv FireDanger l d = {location = l, fire_danger = d} in
                   let check x = if x.temperature > 29.0 then FireDanger x.location "high"
                                 else FireDanger x.location "low" in
                   check {location = "Porto", temperature = 31.0}"#
            .to_string(),
    };
    let term = match syntax::parse(&src, Mode::Extended) {
        Ok(t) => t,
        Err(d) => {
            eprintln!("{d}");
            std::process::exit(1);
        }
    };
    let text = pretty(&term);
    println!("{text}");
    assert_eq!(syntax::parse(&text, Mode::Extended).unwrap(), term);
    println!("-- {} nodes", term.size());
}
