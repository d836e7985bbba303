//! Command-line front end.
//!
//! Exit codes: 0 success or `true`, 1 diagnostic or `false`, 2 stuck,
//! 3 out of fuel.

use std::io::{self, BufReader, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use evl::eval::{self, EvalError};
use evl::events::{self, Registry};
use evl::harness::{self, Agent, HarnessConfig, HarnessError, NumberPolicy};
use evl::infer::{self, Options};
use evl::syntax::{self, parse_scheme, SourceProgram};
use evl::types::{ftv, Kind, KindingEnv, PolyType};
use evl::{BaseType, Mode, Term};

#[derive(Parser)]
#[command(name = "evl", version, about = "Parse, type, evaluate and run EVL event programs")]
struct Cli {
    /// Language level: `core`, or `extended` for lists and letrec.
    #[arg(long, global = true, default_value = "core")]
    mode: Mode,
    /// Step budget for evaluation.
    #[arg(long, global = true, env = "EVL_FUEL", default_value_t = eval::DEFAULT_FUEL)]
    fuel: u64,
    /// Leave the operators out of the environment, as in the pure calculus.
    #[arg(long, global = true)]
    no_prelude: bool,
    /// Event constructors to make available (TOML registry).
    #[arg(long, global = true, value_name = "FILE")]
    events: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and print it back in canonical form.
    Parse {
        /// Program source; `-` reads stdin.
        file: PathBuf,
    },
    /// Print the principal type scheme of a program.
    Infer {
        /// Program source; `-` reads stdin.
        file: PathBuf,
        /// Print `{"type", "kinds", "subst"}` instead.
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a program has the given type.
    Check {
        /// Program source; `-` reads stdin.
        file: PathBuf,
        /// A type; a `forall` prefix declares kinded variables.
        #[arg(value_name = "TYPE")]
        ty: String,
    },
    /// Evaluate a program to a value.
    Eval {
        /// Program source; `-` reads stdin.
        file: PathBuf,
        /// Skip type checking.
        #[arg(long = "unsafe")]
        unsafe_: bool,
    },
    /// Print every reduction step as `n: term`.
    Trace {
        /// Program source; `-` reads stdin.
        file: PathBuf,
        /// Skip type checking.
        #[arg(long = "unsafe")]
        unsafe_: bool,
        /// Append the rule that produced each step.
        #[arg(long)]
        rules: bool,
    },
    /// Decide a relation between two event schemes (programs or types).
    Relate {
        relation: Relation,
        /// A program file or a `.evl` file holding a type scheme.
        first: PathBuf,
        /// A program file or a `.evl` file holding a type scheme.
        second: PathBuf,
    },
    /// Run an agent over NDJSON events from stdin, writing events to stdout.
    Run {
        /// The agent program.
        #[arg(long, value_name = "FILE")]
        agent: PathBuf,
        /// Initial accumulator; folds a two-argument agent over the stream.
        #[arg(long, value_name = "EXPR")]
        init: Option<String>,
        /// Count and skip bad events instead of stopping.
        #[arg(long)]
        skip_bad: bool,
        /// Read a numeric field as `Int` or `Float`, e.g. `n=Float`.
        #[arg(long = "number", value_name = "LABEL=TYPE", value_parser = parse_override)]
        numbers: Vec<(String, BaseType)>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Relation {
    Member,
    Generalization,
    Specialization,
}

fn parse_override(s: &str) -> Result<(String, BaseType), String> {
    let (label, ty) = s.split_once('=').ok_or("expected LABEL=TYPE")?;
    match BaseType::from_name(ty) {
        Some(b @ (BaseType::Int | BaseType::Float)) => Ok((label.to_string(), b)),
        _ => Err(format!("`{ty}` is not a number type (Int or Float)")),
    }
}

/// A failed command and its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn diag(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::Stuck { .. } => 2,
            EvalError::FuelExhausted { .. } => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("evl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

struct Ctx {
    mode: Mode,
    opts: Options,
    registry: Registry,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Ctx, Failure> {
        let registry = match &cli.events {
            Some(p) => Registry::load(p, cli.mode).map_err(Failure::diag)?,
            None => Registry::default(),
        };
        let mut opts = Options::new(cli.mode);
        opts.prelude = !cli.no_prelude;
        opts.extra = registry.typing_env();
        Ok(Ctx { mode: cli.mode, opts, registry })
    }

    fn term(&self, path: &Path) -> Result<Term, Failure> {
        let src = read(path)?;
        syntax::parse_source(&src, self.mode).map_err(Failure::diag)
    }

    /// Rejects free variables the environment does not provide.
    fn closed(&self, t: &Term) -> Result<(), Failure> {
        let env = self.opts.env();
        let free: Vec<String> = t.free_vars().into_iter().filter(|x| env.get(x).is_none()).collect();
        if free.is_empty() {
            Ok(())
        } else {
            Err(Failure::diag(format!("unbound variable(s): {}", free.join(", "))))
        }
    }

    /// The term to evaluate: checked unless `unsafe_`, with registry
    /// constructors bound around it.
    fn runnable(&self, path: &Path, unsafe_: bool) -> Result<Term, Failure> {
        let t = self.term(path)?;
        self.closed(&t)?;
        if !unsafe_ {
            infer::principal(&t, &self.opts).map_err(Failure::diag)?;
        }
        Ok(self.registry.wrap(t))
    }

    /// A program's principal scheme, or a scheme written in type syntax.
    fn scheme(&self, path: &Path) -> Result<PolyType, Failure> {
        let src = read(path)?;
        let body: String =
            src.text.lines().filter(|l| !l.trim_start().starts_with("--")).collect::<Vec<_>>().join("\n");
        let s = match syntax::parse(&src.text, self.mode) {
            Ok(t) => infer::principal_scheme(&t, &self.opts).map_err(|e| Failure::diag(format!("{src}: {e}")))?,
            Err(term_err) => parse_scheme(body.trim()).map_err(|_| Failure::diag(format!("{src}:{term_err}")))?,
        };
        if !infer::is_event_scheme(&s) {
            return Err(Failure::diag(format!("{src}: `{s}` is not an event scheme")));
        }
        Ok(s)
    }
}

fn read(path: &Path) -> Result<SourceProgram, Failure> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map_err(Failure::diag)?;
        return Ok(SourceProgram::stdin(text));
    }
    SourceProgram::read(path).map_err(|e| Failure::diag(format!("{}: {e}", path.display())))
}

fn verdict(b: bool) -> ExitCode {
    println!("{b}");
    if b {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx::new(cli)?;
    match &cli.command {
        Command::Parse { file } => {
            println!("{}", ctx.term(file)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Infer { file, json } => {
            let t = ctx.term(file)?;
            if *json {
                let r = infer::principal(&t, &ctx.opts).map_err(Failure::diag)?;
                println!("{}", r.to_json());
            } else {
                println!("{}", infer::principal_scheme(&t, &ctx.opts).map_err(Failure::diag)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file, ty } => {
            let t = ctx.term(file)?;
            let s = parse_scheme(ty).map_err(|e| Failure::diag(format!("type: {e}")))?;
            let mut k: KindingEnv = s.prefix.iter().cloned().collect();
            for v in ftv(&s.body) {
                if !k.contains(&v) {
                    k.insert(v, Kind::Universal);
                }
            }
            Ok(verdict(infer::check(&k, &ctx.opts.env(), &t, &s.body)))
        }
        Command::Eval { file, unsafe_ } => {
            let t = ctx.runnable(file, *unsafe_)?;
            let r = eval::run(&t, cli.fuel)?;
            println!("{}", r.value);
            eprintln!("{} steps", r.steps);
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace { file, unsafe_, rules } => {
            let t = ctx.runnable(file, *unsafe_)?;
            let (steps, result) = eval::trace(&t, cli.fuel);
            for (i, (rule, term)) in steps.iter().enumerate() {
                match rule.as_ref().filter(|_| *rules) {
                    Some(r) => println!("{i}: {term}    [{r}]"),
                    None => println!("{i}: {term}"),
                }
            }
            result?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Relate { relation, first, second } => {
            let (a, b) = (ctx.scheme(first)?, ctx.scheme(second)?);
            let k = KindingEnv::new();
            let holds = match relation {
                Relation::Member => events::membership(&k, &a, &b),
                Relation::Generalization => events::generalization(&k, &a, &b),
                Relation::Specialization => events::specialization(&k, &a, &b),
            };
            let code = verdict(holds);
            if !holds && matches!(relation, Relation::Member) {
                if let Some(w) = events::membership_witness(&k, &a, &b) {
                    println!("witness: {w}");
                }
            }
            Ok(code)
        }
        Command::Run { agent, init, skip_bad, numbers } => {
            let term = ctx.term(agent)?;
            ctx.closed(&term)?;
            let init = init
                .as_deref()
                .map(|s| syntax::parse(s, ctx.mode).map_err(|e| Failure::diag(format!("--init: {e}"))))
                .transpose()?;
            let numbers = NumberPolicy { overrides: numbers.iter().cloned().collect() };
            let cfg = HarnessConfig { opts: ctx.opts.clone(), fuel: cli.fuel, numbers, init, skip_bad: *skip_bad };
            let mut a = Agent::new(&term, &cfg).map_err(Failure::diag)?;
            a.runtime = ctx.registry.wrap(term);
            let stdout = io::stdout().lock();
            let result =
                harness::run_stream(&a, BufReader::new(io::stdin().lock()), stdout, &cfg, |e| eprintln!("evl: {e}"));
            match result {
                Ok(report) => {
                    eprintln!("{}", report.to_json());
                    Ok(ExitCode::SUCCESS)
                }
                Err(HarnessError::Eval { error, .. }) => Err(error.into()),
                Err(e) => Err(Failure::diag(e)),
            }
        }
    }
}
