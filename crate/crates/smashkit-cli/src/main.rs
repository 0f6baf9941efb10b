//! `smashkit` — command-line front end for the smash-product path calculus.
//!
//! Three subcommands:
//! - `check`: run a named coherence check (or all of them), discharging its
//!   square obligations by normalization. `--dump` writes the JSON report to
//!   a file, `--dot` exports the underlying commuting diagram(s) as Graphviz.
//! - `obligations`: print the case squares a null-homotopy over a given
//!   smash shape has to fill, one per leaf.
//! - `model`: interpret a diagram in finite pointed sets and compare its two
//!   routes pointwise, sweeping every pointed assignment of its abstract
//!   map symbols. `SMASHKIT_MAX_SIZE` (default 4) caps requested leaf sizes.
//!
//! Exit codes: 0 everything passed, 1 a check or model comparison failed,
//! 2 usage error.

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use smashkit_core::check::{check_diagrams, check_names, run_check, CheckOutcome};
use smashkit_core::induction::shape_case_obligations;
use smashkit_core::maps::{diagram, diagram_names, dot_export};
use smashkit_core::model::{assign_sizes, check_diagram_all_envs};
use smashkit_core::term::{leaf, smash, Shape};
use smashkit_core::Error;

const DEFAULT_MAX_SIZE: usize = 4;

#[derive(Parser)]
#[command(
    name = "smashkit",
    version,
    about = "Path calculus for smash products: coherence checks by normalization, \
             induction obligations per shape, and finite pointed-set cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a named coherence check, or `all` for the whole roster
    Check {
        /// One of: pentagon, hexagon, triangle, involution, naturality-alpha,
        /// naturality-beta, unit-naturality, unitors — or `all`
        name: String,
        /// Print the outcome(s) as a JSON array instead of text
        #[arg(long)]
        json: bool,
        /// Also write the JSON outcome(s) to FILE
        #[arg(long, value_name = "FILE")]
        dump: Option<PathBuf>,
        /// Write the commuting diagram(s) behind the check as Graphviz DOT to FILE
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Print the case squares a null-homotopy over a smash shape must fill
    Obligations {
        /// Shape expression: IDENT or (EXPR ^ EXPR), e.g. "(A ^ (B ^ C))"
        #[arg(long)]
        shape: String,
        /// Print the squares as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Interpret a diagram in finite pointed sets and compare its routes pointwise
    #[command(group(ArgGroup::new("target").required(true).args(["diagram", "all"])))]
    Model {
        /// Leaf sizes (incl. basepoint) in first-appearance order, e.g. 3,2,3;
        /// a short list repeats its last entry
        #[arg(
            long,
            value_delimiter = ',',
            value_name = "N,..",
            required_unless_present = "all",
            conflicts_with = "all"
        )]
        sizes: Vec<usize>,
        /// Diagram to check under --sizes (see `check --help` plus the
        /// per-side names like unit-naturality-lambda)
        #[arg(long, value_name = "NAME")]
        diagram: Option<String>,
        /// Sweep every diagram at uniform sizes 1..=min(3, cap)
        #[arg(long)]
        all: bool,
        /// Print the results as JSON instead of text
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (e.g. `smashkit ... | head`)
    // instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(), // clap exits 2 on usage errors, 0 on --help/--version
    };
    match cli.cmd {
        Cmd::Check { name, json, dump, dot } => cmd_check(&name, json, dump, dot),
        Cmd::Obligations { shape, json } => cmd_obligations(&shape, json),
        Cmd::Model { sizes, diagram, all, json } => cmd_model(&sizes, diagram.as_deref(), all, json),
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(2)
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn cmd_check(name: &str, json: bool, dump: Option<PathBuf>, dot: Option<PathBuf>) -> ExitCode {
    let roster: Vec<&str> = if name == "all" {
        check_names().to_vec()
    } else if check_names().contains(&name) {
        vec![name]
    } else {
        return usage(&format!(
            "unknown check `{}`; expected one of {} or `all`",
            name,
            check_names().join(", ")
        ));
    };

    let mut outcomes: Vec<CheckOutcome> = Vec::new();
    for n in &roster {
        match run_check(n) {
            Ok(out) => outcomes.push(out),
            Err(e) => {
                eprintln!("error: check `{}` could not run: {}", n, e);
                return ExitCode::from(1);
            }
        }
    }

    if let Some(path) = dot {
        let mut graphs = Vec::new();
        for n in &roster {
            match check_diagrams(n) {
                Ok(ds) => graphs.extend(ds.iter().map(dot_export)),
                Err(e) => {
                    eprintln!("error: {}", e);
                    return ExitCode::from(1);
                }
            }
        }
        if let Err(e) = fs::write(&path, graphs.join("\n")) {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            return ExitCode::from(1);
        }
    }

    let rendered = match serde_json::to_string_pretty(&outcomes) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot serialize outcomes: {}", e);
            return ExitCode::from(1);
        }
    };
    if let Some(path) = dump {
        if let Err(e) = fs::write(&path, &rendered) {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            return ExitCode::from(1);
        }
    }

    if json {
        println!("{}", rendered);
    } else {
        for out in &outcomes {
            print_outcome(out);
        }
    }

    if outcomes.iter().all(CheckOutcome::pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_outcome(out: &CheckOutcome) {
    let verdict = if out.pass() { "pass" } else { "FAIL" };
    println!(
        "check {}: {} ({} obligations, {} ms)",
        out.name,
        verdict,
        out.obligations.len(),
        out.wall_time_ms
    );
    for ob in out.obligations.iter().filter(|o| !o.fillable) {
        let vars = if ob.vars.is_empty() { String::new() } else { format!(" [{}]", ob.vars) };
        match &ob.error {
            Some(e) => println!("  {}{}: error: {}", ob.tag, vars, e),
            None => {
                println!("  {}{}: boundary words differ", ob.tag, vars);
                println!("    lhs: {}", ob.lhs_word);
                println!("    rhs: {}", ob.rhs_word);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// obligations
// ---------------------------------------------------------------------------

fn cmd_obligations(expr: &str, json: bool) -> ExitCode {
    let shape = match parse_shape(expr) {
        Ok(s) => s,
        Err(msg) => return usage(&format!("bad shape `{}`: {}", expr, msg)),
    };
    let squares = match shape_case_obligations(&shape) {
        Ok(sq) => sq,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    };
    if json {
        match serde_json::to_string_pretty(&squares) {
            Ok(s) => println!("{}", s),
            Err(e) => {
                eprintln!("error: cannot serialize squares: {}", e);
                return ExitCode::from(1);
            }
        }
    } else {
        println!("{} case squares for {}:", squares.len(), shape);
        for sq in &squares {
            println!("{} [{}]", sq.tag, sq.vars);
            println!("  top:    {}", sq.top);
            println!("  bottom: {}", sq.bottom);
            println!("  left:   {}", sq.left);
            println!("  right:  {}", sq.right);
        }
    }
    ExitCode::SUCCESS
}

enum Tok {
    Open,
    Close,
    Caret,
    Ident(String),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                out.push(Tok::Open);
                chars.next();
            }
            ')' => {
                out.push(Tok::Close);
                chars.next();
            }
            '^' => {
                out.push(Tok::Caret);
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(s));
            }
            other => return Err(format!("unexpected character `{}`", other)),
        }
    }
    if out.is_empty() {
        return Err("empty expression".into());
    }
    Ok(out)
}

fn parse_expr(toks: &[Tok], pos: &mut usize) -> Result<Shape, String> {
    match toks.get(*pos) {
        Some(Tok::Ident(name)) => {
            *pos += 1;
            Ok(leaf(name))
        }
        Some(Tok::Open) => {
            *pos += 1;
            let l = parse_expr(toks, pos)?;
            match toks.get(*pos) {
                Some(Tok::Caret) => *pos += 1,
                _ => return Err("expected `^` between the two factors".into()),
            }
            let r = parse_expr(toks, pos)?;
            match toks.get(*pos) {
                Some(Tok::Close) => *pos += 1,
                _ => return Err("expected `)` closing the pair".into()),
            }
            Ok(smash(l, r))
        }
        Some(_) => Err("expected a leaf name or `(`".into()),
        None => Err("unexpected end of expression".into()),
    }
}

/// Grammar: expr := IDENT | '(' expr '^' expr ')'. Leaf names must be
/// pairwise distinct so induction variables stay unambiguous.
fn parse_shape(src: &str) -> Result<Shape, String> {
    let toks = tokenize(src)?;
    let mut pos = 0;
    let shape = parse_expr(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err("trailing input after a complete expression".into());
    }
    let leaves = shape.leaves();
    for (i, a) in leaves.iter().enumerate() {
        if leaves[i + 1..].iter().any(|b| b.name == a.name) {
            return Err(format!("leaf `{}` appears twice; names must be distinct", a.name));
        }
    }
    Ok(shape)
}

// ---------------------------------------------------------------------------
// model
// ---------------------------------------------------------------------------

fn max_size() -> Result<usize, String> {
    match env::var("SMASHKIT_MAX_SIZE") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("SMASHKIT_MAX_SIZE must be a positive integer, got `{}`", v)),
        Err(_) => Ok(DEFAULT_MAX_SIZE),
    }
}

fn cmd_model(sizes: &[usize], diagram_name: Option<&str>, all: bool, json: bool) -> ExitCode {
    let cap = match max_size() {
        Ok(c) => c,
        Err(msg) => return usage(&msg),
    };

    let mut jobs: Vec<(String, Vec<usize>)> = Vec::new();
    if all {
        for s in 1..=cap.min(3) {
            for name in diagram_names() {
                jobs.push((name.to_string(), vec![s]));
            }
        }
    } else {
        let name = diagram_name.expect("clap enforces --diagram without --all");
        if !diagram_names().contains(&name) {
            return usage(&format!(
                "unknown diagram `{}`; expected one of {}",
                name,
                diagram_names().join(", ")
            ));
        }
        if sizes.is_empty() {
            return usage("--sizes needs at least one entry");
        }
        if let Some(&z) = sizes.iter().find(|&&s| s == 0) {
            return usage(&format!("size {} is too small; each size counts the basepoint", z));
        }
        if let Some(&big) = sizes.iter().find(|&&s| s > cap) {
            return usage(&format!(
                "size {} exceeds the cap {} (set SMASHKIT_MAX_SIZE to raise it)",
                big, cap
            ));
        }
        jobs.push((name.to_string(), sizes.to_vec()));
    }

    let mut results = Vec::new();
    let mut all_pass = true;
    for (name, sz) in &jobs {
        let d = match diagram(name) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("error: {}", e);
                return ExitCode::from(1);
            }
        };
        let leaf_sizes = match assign_sizes(&d, sz) {
            Ok(ls) => ls,
            Err(e) => return usage(&e.to_string()),
        };
        let sizes_json: serde_json::Map<String, serde_json::Value> = leaf_sizes
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::from(*v)))
            .collect();
        let sizes_text = leaf_sizes
            .iter()
            .map(|(k, v)| format!("{}={}", k, v))
            .collect::<Vec<_>>()
            .join(" ");
        match check_diagram_all_envs(&leaf_sizes, &d) {
            Ok(n) => {
                if !json {
                    let plural = if n == 1 { "assignment" } else { "assignments" };
                    println!("model {} sizes {}: pass ({} {})", name, sizes_text, n, plural);
                }
                results.push(serde_json::json!({
                    "name": name,
                    "status": "pass",
                    "sizes": sizes_json,
                    "assignments": n,
                }));
            }
            Err(Error::ObligationFailed { tag, detail }) => {
                all_pass = false;
                if !json {
                    println!("model {} sizes {}: FAIL", name, sizes_text);
                    println!("  {}: {}", tag, detail);
                }
                results.push(serde_json::json!({
                    "name": name,
                    "status": "fail",
                    "sizes": sizes_json,
                    "error": format!("{}: {}", tag, detail),
                }));
            }
            Err(e) => {
                eprintln!("error: {}", e);
                return ExitCode::from(1);
            }
        }
    }

    if json {
        match serde_json::to_string_pretty(&results) {
            Ok(s) => println!("{}", s),
            Err(e) => {
                eprintln!("error: cannot serialize results: {}", e);
                return ExitCode::from(1);
            }
        }
    }

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
