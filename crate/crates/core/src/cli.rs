//! The `oreal` command line.
//!
//! Exit codes: 0 for a definitive result, 2 when the budget ran out before
//! one was reached, 1 for errors. `check` exits 1 when a property is
//! falsified and 2 when one could not be judged.

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::OracleError;
use crate::expr::parse_expr;
use crate::harness::{check_axioms, Verdict};
use crate::oracle::{Budget, Oracle, QueryResult};
use crate::refine::{best_approx, mediant_expand, to_decimal};
use crate::{RInterval, Rational};

#[derive(Parser, Debug)]
#[command(name = "oreal", version, about = "Exact real arithmetic with interval oracles")]
struct Cli {
    /// Refinement rounds one query may use.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: u64,
    /// Print {"lo", "hi", "status"} with exact rational endpoints.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decimal digits, truncated, with an error bound.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
    /// Continued fraction terms.
    Cf {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Best rational approximation with bounded denominator.
    Approx {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        maxden: u64,
    },
    /// Does the number lie in LO:HI?
    Query {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(allow_hyphen_values = true)]
        interval: String,
    },
    /// Run the property checks on the number's oracle.
    Check {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, default_value_t = 500)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        CommandOutput { code: 0, stdout, stderr: String::new() }
    }

    fn error(stderr: String) -> Self {
        CommandOutput { code: 1, stdout: String::new(), stderr }
    }

    fn exhausted(stdout: String, spent: u64) -> Self {
        CommandOutput { code: 2, stdout, stderr: exhausted_message(spent) }
    }
}

fn exhausted_message(spent: u64) -> String {
    format!("undecided: budget of {spent} refinement rounds spent\n")
}

fn enclosure_json(i: &RInterval, status: &str) -> String {
    json!({ "lo": i.lo().to_string(), "hi": i.hi().to_string(), "status": status }).to_string() + "\n"
}

/// Runs one command. `args` excludes the program name.
pub fn run_command<I, T>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once("oreal".into()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CommandOutput::ok(text)
            } else {
                CommandOutput::error(text)
            };
        }
    };
    let budget = Budget::new(cli.budget);
    let expr = match &cli.command {
        Command::Eval { expr, .. }
        | Command::Cf { expr, .. }
        | Command::Approx { expr, .. }
        | Command::Query { expr, .. }
        | Command::Check { expr, .. } => expr,
    };
    let oracle = match parse_expr(expr).map_err(|e| caret(expr, e.position(), &e.to_string())) {
        Ok(ast) => match ast.to_oracle() {
            Ok(o) => o,
            Err(e) => return CommandOutput::error(format!("error: {e}\n")),
        },
        Err(message) => return CommandOutput::error(message),
    };
    let result = match cli.command {
        Command::Eval { digits, .. } => eval(&oracle, digits, budget, cli.json),
        Command::Cf { terms, .. } => cf(&oracle, terms, budget, cli.json),
        Command::Approx { maxden, .. } => approx(&oracle, maxden, budget, cli.json),
        Command::Query { interval, .. } => match interval.parse::<RInterval>() {
            Ok(i) => query(&oracle, &i, budget, cli.json),
            Err(e) => Err(OracleError::InvalidBounds(format!("{interval}: {e}"))),
        },
        Command::Check { samples, seed, .. } => Ok(check(&oracle, seed, samples, budget, cli.json)),
    };
    result.unwrap_or_else(|e| match e {
        OracleError::BudgetExhausted { spent } => {
            let stdout = if cli.json { exhausted_json(&oracle, budget) } else { String::new() };
            CommandOutput::exhausted(stdout, spent)
        }
        e => CommandOutput::error(format!("error: {e}\n")),
    })
}

fn caret(text: &str, position: usize, message: &str) -> String {
    format!("{message}\n  {text}\n  {}^\n", " ".repeat(position))
}

/// The narrowest enclosure the budget allows, for a JSON report of failure.
fn exhausted_json(o: &Oracle, budget: Budget) -> String {
    match budget.steps.checked_sub(1).map(|k| o.level(k)) {
        Some(Ok(i)) => enclosure_json(&i, "exhausted"),
        _ => json!({ "lo": Value::Null, "hi": Value::Null, "status": "exhausted" }).to_string() + "\n",
    }
}

fn eval(o: &Oracle, digits: u32, budget: Budget, as_json: bool) -> Result<CommandOutput, OracleError> {
    let d = to_decimal(o, digits, budget)?;
    Ok(CommandOutput::ok(if as_json {
        enclosure_json(&d.enclosure, "ok")
    } else {
        format!("{}\n", d.text)
    }))
}

fn cf(o: &Oracle, terms: usize, budget: Budget, as_json: bool) -> Result<CommandOutput, OracleError> {
    let e = mediant_expand(o, terms, budget)?;
    if !as_json {
        return Ok(CommandOutput::ok(format!("{e}\n")));
    }
    // the number lies between the last two convergents
    let n = e.convergents.len();
    let last = e.convergents[n - 1].clone();
    let bracket = if e.exact_terminated || n < 2 {
        RInterval::singleton(last)
    } else {
        RInterval::new(e.convergents[n - 2].clone(), last)
    };
    let mut v: Value = serde_json::from_str(&enclosure_json(&bracket, "ok")).expect("valid json");
    v["terms"] = e.terms.iter().map(|t| Value::String(t.to_string())).collect();
    v["exact"] = Value::Bool(e.exact_terminated);
    Ok(CommandOutput::ok(v.to_string() + "\n"))
}

fn approx(o: &Oracle, maxden: u64, budget: Budget, as_json: bool) -> Result<CommandOutput, OracleError> {
    let q: Rational = best_approx(o, maxden, budget)?;
    Ok(CommandOutput::ok(if as_json {
        enclosure_json(&RInterval::singleton(q), "ok")
    } else {
        format!("{q}\n")
    }))
}

fn query(o: &Oracle, i: &RInterval, budget: Budget, as_json: bool) -> Result<CommandOutput, OracleError> {
    let r = o.decide(i, budget)?;
    let stdout = if as_json { enclosure_json(i, &r.to_string()) } else { format!("{r}\n") };
    Ok(match r {
        QueryResult::Exhausted => CommandOutput::exhausted(stdout, budget.steps),
        _ => CommandOutput::ok(stdout),
    })
}

fn check(o: &Oracle, seed: u64, samples: u64, budget: Budget, as_json: bool) -> CommandOutput {
    let reports = check_axioms(o, seed, samples, budget);
    let stdout = if as_json {
        let rows: Vec<Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "property": r.property.name(),
                    "verdict": r.verdict.to_string(),
                    "samples": r.samples_run,
                    "counterexample": r.counterexample.as_ref().map(|c| c.to_string()),
                })
            })
            .collect();
        Value::Array(rows).to_string() + "\n"
    } else {
        reports.iter().map(|r| format!("{r}\n")).collect()
    };
    let code = if reports.iter().any(|r| r.verdict == Verdict::Falsified) {
        1
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        2
    } else {
        0
    };
    let stderr = if code == 2 { exhausted_message(budget.steps) } else { String::new() };
    CommandOutput { code, stdout, stderr }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CommandOutput {
        run_command(args.iter().copied())
    }

    #[test]
    fn goldens() {
        let r = run(&["eval", "sqrt(2)+1", "--digits", "10"]);
        assert_eq!((r.code, r.stdout.as_str()), (0, "2.4142135623 \u{b1} 1e-10\n"));
        let r = run(&["cf", "sqrt(2)", "--terms", "5"]);
        assert_eq!((r.code, r.stdout.as_str()), (0, "1; 2 2 2 2\n"));
        let r = run(&["query", "sqrt(2)", "1:2"]);
        assert_eq!((r.code, r.stdout.as_str()), (0, "Yes\n"));
    }

    #[test]
    fn negative_arguments() {
        let r = run(&["query", "-sqrt(2)", "-2:-1"]);
        assert_eq!((r.code, r.stdout.as_str()), (0, "Yes\n"));
        let r = run(&["query", "sqrt(2)", "-2:-1"]);
        assert_eq!((r.code, r.stdout.as_str()), (0, "No\n"));
    }

    #[test]
    fn exhausted_exits_two() {
        let r = run(&["--budget", "100", "query", "sqrt(2) - sqrt(2)", "0:0"]);
        assert_eq!((r.code, r.stdout.as_str()), (2, "Exhausted\n"));
        assert!(r.stderr.contains("100"), "{}", r.stderr);
        let r = run(&["eval", "sqrt(2) - sqrt(2)", "--digits", "3", "--budget", "50"]);
        assert_eq!(r.code, 2);
        assert!(r.stderr.contains("50"));
    }

    #[test]
    fn errors_exit_one() {
        let r = run(&["eval", "sqrt(-1)"]);
        assert_eq!(r.code, 1);
        assert!(r.stderr.contains("radicand"));
        let r = run(&["eval", "1 +"]);
        assert_eq!(r.code, 1);
        assert!(r.stderr.contains("     ^"), "{}", r.stderr);
        assert_eq!(run(&["frobnicate"]).code, 1);
        assert_eq!(run(&["query", "sqrt(2)", "1:x"]).code, 1);
        assert_eq!(run(&["eval", "recip(sqrt(2); 2:3)"]).code, 1);
    }

    #[test]
    fn json_output() {
        let r = run(&["--json", "approx", "sqrt(2)", "--maxden", "10"]);
        assert_eq!(r.stdout, "{\"hi\":\"7/5\",\"lo\":\"7/5\",\"status\":\"ok\"}\n");
        let r = run(&["query", "sqrt(2)", "3/2:2", "--json"]);
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(v["status"], "No");
        assert_eq!(v["lo"], "3/2");
        let r = run(&["eval", "1/3", "--digits", "4", "--json"]);
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!((v["lo"].as_str(), v["hi"].as_str()), (Some("1/3"), Some("1/3")));
        let r = run(&["cf", "3/7", "--json"]);
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(v["terms"], json!(["0", "2", "3"]));
        assert_eq!(v["exact"], true);
    }

    #[test]
    fn approx_and_check() {
        assert_eq!(run(&["approx", "sqrt(2)", "--maxden", "100"]).stdout, "140/99\n");
        let r = run(&["check", "sqrt(2)", "--samples", "50", "--seed", "3", "--budget", "256"]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        assert_eq!(r.stdout.lines().count(), 9);
        assert!(r.stdout.starts_with("CONSISTENCY Passed 50"));
    }
}
