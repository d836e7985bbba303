//! Run the fire-danger pipeline over the weather fixture.

use evl::events::Registry;
use evl::harness::{self, Agent, HarnessConfig};
use evl::infer::Options;
use evl::{syntax, Mode};

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(dir.join("corpus/fire_pipeline.evl")).unwrap();
    let input = std::fs::read_to_string(dir.join("fixtures/weather.ndjson")).unwrap();
    let registry = Registry::load(&dir.join("fixtures/events.toml"), Mode::Extended).unwrap();

    let term = syntax::parse(&src, Mode::Extended).unwrap();
    let cfg = HarnessConfig {
        opts: Options { extra: registry.typing_env(), ..Options::new(Mode::Extended) },
        ..HarnessConfig::default()
    };
    let mut agent = Agent::new(&term, &cfg).unwrap_or_else(|e| panic!("{e}"));
    agent.runtime = registry.wrap(term);
    println!("agent: {} ({:?})", agent.shape.scheme, agent.style);

    let mut out = Vec::new();
    let report = harness::run_stream(&agent, input.as_bytes(), &mut out, &cfg, |d| eprintln!("{d}")).unwrap();
    print!("{}", String::from_utf8(out).unwrap());
    println!("{}", report.to_json());
}
