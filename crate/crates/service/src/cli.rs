//! The `inquiry` command line. Exit codes: 0 success, 1 domain error,
//! 2 usage error.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use inquiry_core::analytics::{build_report, ReportOptions};
use inquiry_core::coding::{
    code_causation, code_emotion, code_hypothesis, code_themes_deductive, code_themes_inductive,
    responses_from,
};
use inquiry_core::quantify::{Analyzer, QuestionUnits};
use inquiry_core::script::{example_script, validate_json};
use inquiry_core::session::ExportRecord;
use inquiry_core::store;
use inquiry_core::InquiryScript;

use crate::config::ServiceConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "inquiry", version, about = "Conversational inquiry service and analysis tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Thematic,
    Emotion,
    Causation,
    Hypothesis,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check script files; prints one error per line.
    Validate {
        #[arg(required = true)]
        scripts: Vec<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        host: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        port: Option<u16>,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        scripts: Option<PathBuf>,
    },
    /// Entities, frequency and sentiment of one text (stdin when --text is absent).
    Quantify {
        #[arg(long)]
        text: Option<String>,
        /// Question units such as `days/week`.
        #[arg(long, value_parser = parse_units)]
        units: Option<QuestionUnits>,
    },
    /// Code stored responses; prints NDJSON.
    Code {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        codebook: Option<PathBuf>,
        /// Script defining hypotheses; the bundled script when absent.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Only this hypothesis (hypothesis method).
        #[arg(long)]
        hypothesis: Option<String>,
        /// Emergent themes instead of codebook themes (thematic method).
        #[arg(long)]
        inductive: bool,
        #[arg(long, default_value_t = 2)]
        min_support: usize,
        #[arg(long, default_value_t = 0.5)]
        jaccard: f64,
    },
    /// Aggregate analytics report over a store.
    Analyze {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write flat CSV tables (next to --out, or to stdout).
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        codebook: Option<PathBuf>,
    },
    /// Anonymized session records as NDJSON.
    Export {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        session: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rewrite the store with one line per session first.
        #[arg(long)]
        compact: bool,
    },
}

fn parse_units(s: &str) -> Result<QuestionUnits, String> {
    s.parse()
}

/// A domain failure: message for stderr, exit code 1.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Validate { scripts } => validate(&scripts, out),
        Command::Serve {
            config,
            host,
            port,
            store,
            scripts,
        } => serve(config, host, port, store, scripts),
        Command::Quantify { text, units } => quantify(text, units, out),
        Command::Code {
            method,
            store,
            codebook,
            script,
            hypothesis,
            inductive,
            min_support,
            jaccard,
        } => code(
            CodeArgs {
                method,
                store,
                codebook,
                script,
                hypothesis,
                inductive,
                min_support,
                jaccard,
            },
            out,
        ),
        Command::Analyze {
            store,
            script,
            out: out_path,
            csv,
            alpha,
            codebook,
        } => analyze(&store, script.as_deref(), out_path.as_deref(), csv, alpha, codebook.as_deref(), out),
        Command::Export {
            store,
            session,
            out: out_path,
            compact,
        } => export(&store, session.as_deref(), out_path.as_deref(), compact, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure(msg)) => {
            if !msg.is_empty() {
                let _ = writeln!(err, "{msg}");
            }
            EXIT_DOMAIN
        }
    }
}

fn validate(paths: &[PathBuf], out: &mut dyn Write) -> CmdResult {
    let mut failed = false;
    for p in paths {
        let text = std::fs::read_to_string(p).map_err(|e| Failure(format!("cannot read {}: {e}", p.display())))?;
        let (_, report) = validate_json(&text);
        for e in &report.errors {
            writeln!(out, "{e}")?;
            failed = true;
        }
    }
    if failed {
        Err(Failure(String::new()))
    } else {
        Ok(())
    }
}

fn serve(
    config: Option<PathBuf>,
    host: Option<String>,
    port: Option<u16>,
    store: Option<PathBuf>,
    scripts: Option<PathBuf>,
) -> CmdResult {
    let mut cfg = ServiceConfig::from_env(config.as_deref())?;
    if let Some(h) = host {
        cfg.host = h;
    }
    if let Some(p) = port {
        cfg.port = p.into();
    }
    if let Some(s) = store {
        cfg.store = s;
    }
    if let Some(s) = scripts {
        cfg.scripts = Some(s);
    }
    let state = crate::build_state(&cfg)?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async move {
        let addr = format!("{}:{}", cfg.host, cfg.port_u16());
        let listener = tokio::net::TcpListener::bind(&addr).await?;
        tracing::info!(%addr, sessions = state.manager.session_count(), "listening");
        let sweeper = state.manager.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(std::time::Duration::from_secs(60));
            loop {
                tick.tick().await;
                match sweeper.sweep_expired() {
                    Ok(0) => {}
                    Ok(n) => tracing::info!(abandoned = n, "expired idle sessions"),
                    Err(e) => tracing::warn!(error = %e, "session sweep failed"),
                }
            }
        });
        axum::serve(listener, crate::router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    })?;
    Ok(())
}

fn quantify(text: Option<String>, units: Option<QuestionUnits>, out: &mut dyn Write) -> CmdResult {
    let text = match text {
        Some(t) => t,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let q = Analyzer::bundled().quantify(&text, units);
    writeln!(out, "{}", serde_json::to_string_pretty(&q)?)?;
    Ok(())
}

fn load_records(path: &Path) -> Result<Vec<ExportRecord>, Failure> {
    let loaded = store::load(path)?;
    Ok(loaded.sessions.iter().map(ExportRecord::from).collect())
}

fn load_script_or_default(path: Option<&Path>) -> Result<InquiryScript, Failure> {
    match path {
        Some(p) => Ok(crate::load_script(p)?),
        None => Ok(example_script()),
    }
}

struct CodeArgs {
    method: Method,
    store: PathBuf,
    codebook: Option<PathBuf>,
    script: Option<PathBuf>,
    hypothesis: Option<String>,
    inductive: bool,
    min_support: usize,
    jaccard: f64,
}

fn line<T: serde::Serialize>(out: &mut dyn Write, v: &T) -> CmdResult {
    writeln!(out, "{}", serde_json::to_string(v)?)?;
    Ok(())
}

fn code(args: CodeArgs, out: &mut dyn Write) -> CmdResult {
    let records = load_records(&args.store)?;
    let codebook = crate::load_codebook(args.codebook.as_deref())?;
    let responses = responses_from(&records, None);
    match args.method {
        Method::Thematic if args.inductive => {
            let themes = code_themes_inductive(&responses, args.min_support, args.jaccard);
            for a in &themes.assignments {
                line(out, a)?;
            }
        }
        Method::Thematic => {
            for a in code_themes_deductive(&responses, &codebook) {
                line(out, &a)?;
            }
        }
        Method::Emotion => {
            for r in &responses {
                if let Some(c) = code_emotion(r, &codebook) {
                    line(out, &c)?;
                }
            }
        }
        Method::Causation => {
            for r in &responses {
                let Some(text) = r.text() else { continue };
                let chains = code_causation(text, r.entities(), &codebook);
                if !chains.is_empty() {
                    line(
                        out,
                        &serde_json::json!({
                            "session_id": r.session_id,
                            "question_id": r.answer.question_id,
                            "chains": chains,
                        }),
                    )?;
                }
            }
        }
        Method::Hypothesis => {
            let script = load_script_or_default(args.script.as_deref())?;
            let selected: Vec<_> = script
                .hypotheses
                .iter()
                .filter(|h| args.hypothesis.as_deref().is_none_or(|id| h.hypothesis_id == id))
                .filter(|h| matches!(h.test, inquiry_core::script::HypothesisTest::ProportionTest { .. }))
                .collect();
            if selected.is_empty() {
                return Err(Failure(match &args.hypothesis {
                    Some(id) => format!("hypothesis not found: {id}"),
                    None => "script defines no proportion hypotheses".to_string(),
                }));
            }
            for h in selected {
                let subset = responses_from(&records, Some(h.test.question_id()));
                line(out, &code_hypothesis(&script, &subset, h)?)?;
            }
        }
    }
    Ok(())
}

/// Report JSON for a store and script; the same bytes the HTTP endpoint
/// serves for the same sessions.
pub fn analyze_to_string(
    store_path: &Path,
    script: &InquiryScript,
    options: &ReportOptions,
) -> Result<(String, Vec<(String, String)>), Failure> {
    let records = load_records(store_path)?;
    let report = build_report(script, &records, options);
    Ok((report.to_json(), report.to_csv_tables()))
}

fn analyze(
    store_path: &Path,
    script: Option<&Path>,
    out_path: Option<&Path>,
    csv: bool,
    alpha: Option<f64>,
    codebook: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let script = load_script_or_default(script)?;
    let mut options = ReportOptions {
        codebook: crate::load_codebook(codebook)?,
        ..ReportOptions::default()
    };
    if let Some(a) = alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(Failure(format!("alpha must lie strictly between 0 and 1, got {a}")));
        }
        options.alpha = a;
    }
    let (json, tables) = analyze_to_string(store_path, &script, &options)?;
    match out_path {
        Some(p) => {
            std::fs::write(p, &json)?;
            if csv {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
                for (name, body) in &tables {
                    std::fs::write(p.with_file_name(format!("{stem}.{name}.csv")), body)?;
                }
            }
        }
        None => {
            out.write_all(json.as_bytes())?;
            if csv {
                for (name, body) in &tables {
                    writeln!(out, "# {name}")?;
                    out.write_all(body.as_bytes())?;
                }
            }
        }
    }
    Ok(())
}

fn export(
    store_path: &Path,
    session: Option<&str>,
    out_path: Option<&Path>,
    compact: bool,
    out: &mut dyn Write,
) -> CmdResult {
    if compact {
        store::compact(store_path)?;
    }
    let records = load_records(store_path)?;
    let mut text = String::new();
    for r in records.iter().filter(|r| session.is_none_or(|id| r.session_id == id)) {
        text.push_str(&r.to_line());
        text.push('\n');
    }
    if let Some(id) = session {
        if text.is_empty() {
            return Err(Failure(format!("session not found: {id}")));
        }
    }
    match out_path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}
