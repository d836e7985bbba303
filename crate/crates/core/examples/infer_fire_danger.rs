//! Infer principal types for a few event programs, including agents that
//! use constructors from the event registry.

use evl::events::Registry;
use evl::infer::{self, Options};
use evl::{syntax, Mode};

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let registry = Registry::load(&dir.join("fixtures/events.toml"), Mode::Core).expect("registry");
    let opts = Options { extra: registry.typing_env(), ..Options::default() };

    let programs = [
        r#"letEv FireDanger l d = {location = l, fire_danger = d} in FireDanger "Porto" "low""#,
        "λx. modify(x, temperature, (x.temperature - 32.0) / 1.8)",
        "λx. λy. WeatherInfo x.temperature x.wind y.humidity y.precipitation",
        "λx. x.location",
        "λx. x x",
    ];
    for src in programs {
        let term = syntax::parse(src, Mode::Core).expect("parse");
        match infer::principal(&term, &opts) {
            Ok(r) => {
                println!("{src}");
                println!("  kinds   {}", r.kinds);
                println!("  type    {}", r.ty);
                println!("  scheme  {}", infer::principal_scheme(&term, &opts).unwrap());
            }
            Err(e) => println!("{src}\n  error   {e}"),
        }
    }
}
