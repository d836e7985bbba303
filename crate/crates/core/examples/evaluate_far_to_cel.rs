//! Evaluate a conversion agent step by step, then with the machine.

use evl::eval;
use evl::{syntax, Mode};

fn main() {
    let src = "(λx. modify(x, temperature, (x.temperature - 32.0) / 1.8)) {temperature = 50.0}";
    let term = syntax::parse(src, Mode::Core).unwrap();
    let (steps, end) = eval::trace(&term, 100);
    for (rule, t) in &steps {
        match rule {
            Some(r) => println!("  -> [{r}] {t}"),
            None => println!("     {t}"),
        }
    }
    end.unwrap();
    let v = eval::run(&term, 100).unwrap();
    println!("machine: {} in {} steps", v.value, v.steps);

    // Ill-typed terms get stuck; runaway ones run out of fuel.
    for src in ["1 + true", "(λx. x x) (λx. x x)"] {
        let t = syntax::parse(src, Mode::Core).unwrap();
        println!("{src}: {}", eval::run(&t, 1_000).unwrap_err());
    }
}
