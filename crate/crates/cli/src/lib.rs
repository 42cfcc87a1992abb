//! Implementation of the `mw` command. [`run`] takes the argument list and
//! output streams so the commands can be driven in-process.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mwo_core::classifier::{classify, explain, format_score, verdict_line, ClassifyError};
use mwo_core::discovery::{discover, PreferenceQuery, Target};
use mwo_core::kb::{build_seed_kb, kb_to_document, parse_kb, provenance_tsv, KbError, KnowledgeBase, ROOT_CLASS};
use mwo_core::parser::{parse_document, parse_service, ParseError};
use mwo_core::vocabulary::parse_assignment;
use mwo_core::{Ontology, Score};
use serde_json::json;

/// Process exit status of every `mw` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Parse = 2,
    Validation = 3,
    NoResult = 4,
    Internal = 5,
}

impl From<ExitCode> for std::process::ExitCode {
    fn from(code: ExitCode) -> Self {
        std::process::ExitCode::from(code as u8)
    }
}

#[derive(Debug, Parser)]
#[command(name = "mw", version, about = "Middleware ontology toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Types,
    Individuals,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Types => Target::Types,
            TargetArg::Individuals => Target::Individuals,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an ontology or service file.
    Validate { path: PathBuf },
    /// Rank middleware types for a service description.
    Classify {
        service: PathBuf,
        /// Knowledge base to classify against (default: built-in seed).
        #[arg(long)]
        kb: Option<PathBuf>,
        /// Number of ranked types to print.
        #[arg(long, default_value_t = 3)]
        top: usize,
        #[arg(long)]
        json: bool,
        /// Append the per-feature contribution table.
        #[arg(long)]
        explain: bool,
    },
    /// Find types or technologies matching required and preferred features.
    Query {
        /// key=value that every match must satisfy exactly.
        #[arg(long = "require", value_name = "KEY=VALUE")]
        require: Vec<String>,
        /// key=value[:weight] used to rank matches.
        #[arg(long = "prefer", value_name = "KEY=VALUE[:WEIGHT]")]
        prefer: Vec<String>,
        #[arg(long, value_enum, default_value = "types")]
        target: TargetArg,
        #[arg(long)]
        json: bool,
    },
    /// Print the class hierarchy below a class.
    Taxonomy {
        #[arg(long, default_value = ROOT_CLASS)]
        root: String,
    },
    /// Write the seed knowledge base in canonical form.
    Export {
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Export the table provenance instead of the ontology.
        #[arg(long)]
        provenance: bool,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn out(&mut self, text: &str) {
        let _ = self.out.write_all(text.as_bytes());
    }

    fn err(&mut self, text: &str) {
        let _ = self.err.write_all(text.as_bytes());
        if !text.ends_with('\n') {
            let _ = self.err.write_all(b"\n");
        }
    }
}

/// Runs `mw` with `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut io = Io { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    io.out(&e.to_string());
                    ExitCode::Success
                }
                _ => {
                    io.err(&e.to_string());
                    ExitCode::Usage
                }
            };
        }
    };
    match cli.command {
        Command::Validate { path } => cmd_validate(&mut io, &path),
        Command::Classify {
            service,
            kb,
            top,
            json,
            explain,
        } => cmd_classify(&mut io, &service, kb.as_deref(), top, json, explain),
        Command::Query {
            require,
            prefer,
            target,
            json,
        } => cmd_query(&mut io, &require, &prefer, target.into(), json),
        Command::Taxonomy { root } => cmd_taxonomy(&mut io, &root),
        Command::Export { out, provenance } => cmd_export(&mut io, out.as_deref(), provenance),
    }
}

fn read(io: &mut Io, path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        io.err(&format!("mw: cannot read {}: {e}", path.display()));
        ExitCode::Usage
    })
}

/// Reports a parse failure and returns its exit code.
fn report_parse_error(io: &mut Io, path: &Path, e: &ParseError) -> ExitCode {
    match e {
        ParseError::Syntax(s) => {
            io.err(&format!("{}:{s}", path.display()));
            ExitCode::Parse
        }
        ParseError::ValidationFailed(vs) => {
            for v in vs {
                io.err(&format!("{}: {v}", path.display()));
            }
            ExitCode::Validation
        }
        other => {
            io.err(&format!("{}:{other}", path.display()));
            ExitCode::Validation
        }
    }
}

fn cmd_validate(io: &mut Io, path: &Path) -> ExitCode {
    let text = match read(io, path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match parse_document(&text) {
        Ok(_) => {
            io.out("OK\n");
            ExitCode::Success
        }
        Err(e) => report_parse_error(io, path, &e),
    }
}

fn load_kb(io: &mut Io, path: Option<&Path>) -> Result<KnowledgeBase, ExitCode> {
    let Some(path) = path else {
        return Ok(build_seed_kb());
    };
    let text = read(io, path)?;
    parse_kb(&text).map_err(|e| match e {
        KbError::Parse(pe) => report_parse_error(io, path, &pe),
        KbError::Invalid(vs) => {
            for v in vs {
                io.err(&format!("{}: {v}", path.display()));
            }
            ExitCode::Validation
        }
        other => {
            io.err(&format!("{}: {other}", path.display()));
            ExitCode::Validation
        }
    })
}

fn cmd_classify(
    io: &mut Io,
    service_path: &Path,
    kb_path: Option<&Path>,
    top: usize,
    json: bool,
    with_explanation: bool,
) -> ExitCode {
    let kb = match load_kb(io, kb_path) {
        Ok(kb) => kb,
        Err(code) => return code,
    };
    let text = match read(io, service_path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let service = match parse_service(&text) {
        Ok(s) => s,
        Err(e) => return report_parse_error(io, service_path, &e),
    };
    let result = match classify(&kb, &service) {
        Ok(r) => r,
        Err(ClassifyError::EmptyService(name)) => {
            io.err(&format!(
                "{}: EmptyService [{name}]: service asserts no features",
                service_path.display()
            ));
            return ExitCode::Validation;
        }
    };

    let shown = &result.ranking[..top.min(result.ranking.len())];
    if json {
        let ranking: Vec<_> = shown
            .iter()
            .map(|r| {
                json!({
                    "type": r.type_class.as_str(),
                    "score_num": r.score.numer(),
                    "score_den": r.score.denom(),
                    "comparable": r.comparable,
                })
            })
            .collect();
        let types: Vec<&str> = result.verdict.types().into_iter().map(|c| c.as_str()).collect();
        let doc = json!({
            "service": result.service.as_str(),
            "verdict": { "kind": result.verdict.kind(), "types": types },
            "ranking": ranking,
        });
        io.out(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")));
    } else {
        let mut text = format!("{}\n", verdict_line(&result));
        let width = shown.iter().map(|r| r.type_class.as_str().len()).max().unwrap_or(0);
        for (i, r) in shown.iter().enumerate() {
            let _ = writeln!(
                text,
                "{:>3}. {:<width$}  {}  ({} comparable)",
                i + 1,
                r.type_class.as_str(),
                format_score(&r.score, 2),
                r.comparable
            );
        }
        if with_explanation {
            text.push('\n');
            text.push_str(&explain(&result));
        }
        io.out(&text);
    }
    match result.verdict {
        mwo_core::Verdict::Unclassified => ExitCode::NoResult,
        _ => ExitCode::Success,
    }
}

/// Parses a positive weight: `2`, `0.5` or `3/4`.
fn parse_weight(text: &str) -> Option<Score> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let (n, d) = (n.parse::<u64>().ok()?, d.parse::<u64>().ok()?);
        return (n > 0 && d > 0).then(|| Score::new(n, d));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 9 || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = |s: &str| s.is_empty() || s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || !digits(frac) {
        return None;
    }
    let scale = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let numer = int.checked_mul(scale)?.checked_add(frac)?;
    (numer > 0).then(|| Score::new(numer, scale))
}

fn usage_error(io: &mut Io, msg: impl std::fmt::Display) -> ExitCode {
    io.err(&format!("mw: {msg}"));
    ExitCode::Usage
}

fn cmd_query(
    io: &mut Io,
    require: &[String],
    prefer: &[String],
    target: Target,
    json: bool,
) -> ExitCode {
    let mut query = PreferenceQuery::new();
    for r in require {
        let (key, value) = match parse_assignment(r) {
            Ok(kv) => kv,
            Err(e) => return usage_error(io, e),
        };
        if let Err(e) = query.require(key, value) {
            return usage_error(io, e);
        }
    }
    for p in prefer {
        let (assignment, weight) = match p.rsplit_once(':') {
            Some((a, w)) => match parse_weight(w) {
                Some(w) => (a, w),
                None => return usage_error(io, format!("invalid weight '{w}' in '{p}'")),
            },
            None => (p.as_str(), Score::from_integer(1)),
        };
        let (key, value) = match parse_assignment(assignment) {
            Ok(kv) => kv,
            Err(e) => return usage_error(io, e),
        };
        if let Err(e) = query.prefer(key, value, weight) {
            return usage_error(io, e);
        }
    }

    let kb = build_seed_kb();
    let result = match discover(&kb, &query, target) {
        Ok(r) => r,
        Err(e) => return usage_error(io, e),
    };

    if json {
        let matches: Vec<_> = result
            .matches
            .iter()
            .map(|m| {
                json!({
                    "entity": m.entity,
                    "score_num": m.score.numer(),
                    "score_den": m.score.denom(),
                })
            })
            .collect();
        let doc = json!({ "target": target.as_str(), "matches": matches });
        io.out(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")));
    } else {
        let width = result.matches.iter().map(|m| m.entity.len()).max().unwrap_or(0);
        let mut text = String::new();
        for m in &result.matches {
            let _ = writeln!(text, "{:<width$}  {}", m.entity, format_score(&m.score, 2));
        }
        io.out(&text);
    }
    if result.matches.is_empty() {
        io.err(&format!("mw: no {target} satisfy the query"));
        ExitCode::NoResult
    } else {
        ExitCode::Success
    }
}

/// Indented expansion of the hierarchy below `root`; shared subtrees are
/// repeated under each parent.
pub fn render_taxonomy(ontology: &Ontology, root: &str) -> Option<String> {
    fn walk(o: &Ontology, class: &str, depth: usize, out: &mut String) {
        let _ = writeln!(out, "{}{class}", "  ".repeat(depth));
        for child in o.taxonomy().direct_subclasses(class) {
            walk(o, child.as_str(), depth + 1, out);
        }
    }
    if !ontology.has_class(root) {
        return None;
    }
    let mut out = String::new();
    walk(ontology, root, 0, &mut out);
    Some(out)
}

fn cmd_taxonomy(io: &mut Io, root: &str) -> ExitCode {
    let kb = build_seed_kb();
    match render_taxonomy(kb.ontology(), root) {
        Some(text) => {
            io.out(&text);
            ExitCode::Success
        }
        None => usage_error(io, format!("unknown class '{root}'")),
    }
}

fn cmd_export(io: &mut Io, out: Option<&Path>, provenance: bool) -> ExitCode {
    let text = if provenance {
        provenance_tsv()
    } else {
        kb_to_document(&build_seed_kb())
    };
    match out {
        None => {
            io.out(&text);
            ExitCode::Success
        }
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => ExitCode::Success,
            Err(e) => {
                io.err(&format!("mw: cannot write {}: {e}", path.display()));
                ExitCode::Internal
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        assert_eq!(parse_weight("2"), Some(Score::from_integer(2)));
        assert_eq!(parse_weight("0.5"), Some(Score::new(1, 2)));
        assert_eq!(parse_weight("3/4"), Some(Score::new(3, 4)));
        assert_eq!(parse_weight(".25"), Some(Score::new(1, 4)));
        for bad in ["0", "-1", "x", "1/0", "", ".", "0.0"] {
            assert_eq!(parse_weight(bad), None, "{bad}");
        }
    }
}
