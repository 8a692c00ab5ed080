//! The `wiregen` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use wiregen_core::beautify::{beautify, BeautifyReport};
use wiregen_core::corpus::{self, build_examples, load_index, load_jsonl, select_samples};
use wiregen_core::dsl::{parse_dsl, serialize};
use wiregen_core::generation::{ApiKey, RemoteClient};
use wiregen_core::render::{render_svg, RenderStyle};
use wiregen_core::{
    assemble_prompt, emit_dsl, lint, normalize, parse_hierarchy, Backend, CorpusConfig, GenerationConfig,
    GenerationError, LintConfig, LintFinding, Mode, TrainingExample, WireframeDocument,
};

use crate::server::{self, builtin_exemplars, AppState};

#[derive(Debug, Parser)]
#[command(
    name = "wiregen",
    version,
    about = "Wireframes from view hierarchies and text descriptions"
)]
pub struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    /// Seed for every random choice a command makes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert one Rico view hierarchy to wireframe markup.
    Convert(ConvertArgs),
    /// Build a training corpus and a holdout set.
    Corpus(CorpusArgs),
    /// Generate a wireframe from a description.
    Generate(GenerateArgs),
    /// Resolve icons, plan typography and repair layout flaws.
    Beautify(BeautifyArgs),
    /// Report layout flaws without changing anything.
    Lint(LintArgs),
    /// Draw wireframe markup as SVG.
    Render(RenderArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1440)]
    pub width: u32,
    #[arg(long, default_value_t = 2560)]
    pub height: u32,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub rico_dir: PathBuf,
    /// CSV with `screen_id,app_id,category,description` columns.
    #[arg(long)]
    pub descriptions: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub holdout: PathBuf,
    /// Where to write the fine-tuning hyperparameters.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub holdout_apps: usize,
    #[arg(long, default_value_t = 4096)]
    pub max_tokens: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ZeroShot,
    FewShot,
    FineTuned,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub prompt: String,
    #[arg(long, value_enum, default_value = "fine-tuned")]
    pub mode: ModeArg,
    /// Exemplars in few-shot mode.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Few-shot exemplars as JSONL; built-in ones when omitted.
    #[arg(long)]
    pub exemplars: Option<PathBuf>,
    #[arg(long, default_value_t = wiregen_core::generation::DEFAULT_TEMPERATURE)]
    pub temperature: f64,
    /// `mock`, `remote` (endpoint from the environment) or a chat completions URL.
    #[arg(long, default_value = "mock")]
    pub backend: String,
    #[arg(long)]
    pub model: Option<String>,
    /// Final output (raw markup, beautified markup or SVG); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also keep the raw generation here.
    #[arg(long)]
    pub raw_out: Option<PathBuf>,
    #[arg(long)]
    pub beautify: bool,
    /// Render to SVG; implies --beautify.
    #[arg(long)]
    pub render: bool,
    /// Where to write the SVG when --out holds the markup.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Beautify report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BeautifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct LintArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Clip boxes that leave the canvas instead of failing.
    #[arg(long)]
    pub clip: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// `mock`, `remote` (endpoint from the environment) or a chat completions URL.
    #[arg(long, default_value = "mock")]
    pub backend: String,
    /// Directory of static files served at `/`.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
    #[arg(long)]
    pub exemplars: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0:#}")]
    Input(#[from] anyhow::Error),
    #[error("backend: {0}")]
    Backend(GenerationError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Backend(_) => 2,
        }
    }
}

impl From<GenerationError> for CliError {
    fn from(err: GenerationError) -> Self {
        if err.is_backend() {
            CliError::Backend(err)
        } else {
            CliError::Input(err.into())
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    init_logging(cli.verbose);
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn init_logging(verbose: bool) {
    let level = if verbose { "debug" } else { "warn" };
    let filter = tracing_subscriber::EnvFilter::try_from_env("WIREGEN_LOG")
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(level));
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}

pub fn execute(cli: Cli) -> CliResult {
    let seed = cli.seed;
    match cli.command {
        Command::Convert(args) => convert(args),
        Command::Corpus(args) => corpus_cmd(args, seed.unwrap_or(0)),
        Command::Generate(args) => generate(args, seed),
        Command::Beautify(args) => beautify_cmd(args),
        Command::Lint(args) => lint_cmd(args),
        Command::Render(args) => render_cmd(args),
        Command::Serve(args) => serve(args, seed),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn read_document(path: &Path) -> anyhow::Result<WireframeDocument> {
    let text = read(path)?;
    parse_dsl(&text).with_context(|| format!("{} is not usable wireframe markup", path.display()))
}

fn convert(args: ConvertArgs) -> CliResult {
    let raw = read(&args.input)?;
    let tree = parse_hierarchy(&raw, (args.width, args.height))
        .with_context(|| format!("cannot convert {}", args.input.display()))?;
    write_or_print(args.out.as_deref(), &emit_dsl(&normalize(&tree)))?;
    Ok(())
}

fn corpus_cmd(args: CorpusArgs, seed: u64) -> CliResult {
    let cfg = CorpusConfig {
        n_samples: args.n,
        seed,
        max_tokens: args.max_tokens,
        holdout_apps_per_category: args.holdout_apps,
        ..CorpusConfig::default()
    };
    let index = load_index(&args.descriptions, &args.rico_dir).context("cannot load the screen index")?;
    let selection = select_samples(&index, &cfg);
    if selection.shortfall > 0 {
        tracing::warn!(shortfall = selection.shortfall, "fewer train screens than requested");
    }
    let train = build_examples(&selection.train, &cfg);
    let holdout = build_examples(&selection.holdout, &cfg);
    corpus::emit_jsonl(&train.examples, &args.out).context("cannot write the train set")?;
    corpus::emit_jsonl(&holdout.examples, &args.holdout).context("cannot write the holdout set")?;
    if let Some(manifest) = &args.manifest {
        corpus::emit_finetune_manifest(manifest).context("cannot write the manifest")?;
    }
    let (categories, overlap) = corpus::selection_stats(&selection);
    eprintln!(
        "train {} ({} over token ceiling, {} unreadable), holdout {}, categories {}, shared apps {}, shortfall {}",
        train.examples.len(),
        train.skipped_oversized,
        train.failed.len(),
        holdout.examples.len(),
        categories,
        overlap,
        selection.shortfall,
    );
    Ok(())
}

fn backend_from_arg(spec: &str, cfg: &GenerationConfig) -> CliResult<Backend> {
    if spec.eq_ignore_ascii_case("mock") {
        return Ok(Backend::mock());
    }
    if spec.eq_ignore_ascii_case("remote") {
        return Ok(Backend::Remote(RemoteClient::from_env(cfg)?));
    }
    if !(spec.starts_with("http://") || spec.starts_with("https://")) {
        return Err(CliError::Input(anyhow::anyhow!(
            "--backend must be `mock`, `remote` or an http(s) URL"
        )));
    }
    Ok(Backend::Remote(RemoteClient::new(spec, ApiKey::from_env(), cfg)?))
}

fn load_exemplars(path: Option<&Path>) -> anyhow::Result<Vec<TrainingExample>> {
    match path {
        Some(path) => load_jsonl(path).with_context(|| format!("cannot load exemplars from {}", path.display())),
        None => Ok(builtin_exemplars()),
    }
}

fn runtime() -> anyhow::Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("cannot start the async runtime")
}

fn render_default(doc: &WireframeDocument) -> anyhow::Result<String> {
    render_svg(doc, &RenderStyle::default()).context("cannot render")
}

fn write_report(path: Option<&Path>, report: &BeautifyReport) -> anyhow::Result<()> {
    if let Some(path) = path {
        let json = serde_json::to_string_pretty(report)?;
        fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn generate(args: GenerateArgs, seed: Option<u64>) -> CliResult {
    let mode = match args.mode {
        ModeArg::ZeroShot => Mode::ZeroShot,
        ModeArg::FewShot => Mode::FewShot { k: args.k },
        ModeArg::FineTuned => Mode::FineTuned,
    };
    let mut cfg = GenerationConfig {
        mode,
        temperature: args.temperature,
        seed,
        ..GenerationConfig::default()
    };
    if let Some(model) = &args.model {
        cfg.model_id = model.clone();
    }
    cfg.validate()?;
    if args.prompt.trim().is_empty() {
        return Err(CliError::Input(anyhow::anyhow!("--prompt must not be empty")));
    }
    let exemplars = match mode {
        Mode::FewShot { .. } => load_exemplars(args.exemplars.as_deref())?,
        _ => Vec::new(),
    };
    let prompt = assemble_prompt(&args.prompt, mode, &exemplars, cfg.max_tokens)?;
    let backend = backend_from_arg(&args.backend, &cfg)?;
    let raw_dsl = runtime()?.block_on(backend.generate(&prompt, &cfg))?;
    if let Some(path) = &args.raw_out {
        write_or_print(Some(path), &raw_dsl)?;
    }

    if !(args.beautify || args.render) {
        write_or_print(args.out.as_deref(), &raw_dsl)?;
        return Ok(());
    }
    let raw = parse_dsl(&raw_dsl).context("the backend returned unusable markup")?;
    let (doc, report) = beautify(&raw);
    write_report(args.report.as_deref(), &report)?;
    let markup = serialize(&doc);
    if !args.render {
        write_or_print(args.out.as_deref(), &markup)?;
        return Ok(());
    }
    let svg = render_default(&doc)?;
    match &args.svg {
        Some(svg_path) => {
            write_or_print(Some(svg_path), &svg)?;
            write_or_print(args.out.as_deref(), &markup)?;
        }
        None => write_or_print(args.out.as_deref(), &svg)?,
    }
    Ok(())
}

fn findings_table(findings: &[LintFinding]) -> String {
    if findings.is_empty() {
        return "no findings\n".into();
    }
    let rows: Vec<[String; 4]> = findings
        .iter()
        .map(|f| {
            [
                format!("{:?}", f.kind),
                f.element_ids.join(","),
                format!("{:?}", f.repair),
                f.detail.clone(),
            ]
        })
        .collect();
    let header = ["KIND", "ELEMENTS", "REPAIR", "DETAIL"];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: [&str; 4]| {
        let padded: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(header);
    for row in &rows {
        line([&row[0], &row[1], &row[2], &row[3]]);
    }
    out
}

fn report_summary(report: &BeautifyReport) -> String {
    let mut out = format!(
        "icons resolved: {}\ntext planned: {} ({} overflowing)\nrepair iterations: {}\n",
        report.icons.len(),
        report.typography.len(),
        report.typography.iter().filter(|p| !p.plan.fits).count(),
        report.lint_iterations,
    );
    out.push_str("fixed:\n");
    out.push_str(&findings_table(&report.fixed));
    out.push_str("residual:\n");
    out.push_str(&findings_table(&report.residual));
    out
}

fn beautify_cmd(args: BeautifyArgs) -> CliResult {
    let raw = read_document(&args.input)?;
    let (doc, report) = beautify(&raw);
    write_report(args.report.as_deref(), &report)?;
    let markup = serialize(&doc);
    match &args.out {
        Some(out) => write_or_print(Some(out), &markup)?,
        None if !args.json => write_or_print(None, &markup)?,
        None => {}
    }
    if args.json {
        write_or_print(
            None,
            &serde_json::to_string_pretty(&report).context("cannot encode report")?,
        )?;
    } else if args.out.is_some() {
        write_or_print(None, &report_summary(&report))?;
    }
    Ok(())
}

fn lint_cmd(args: LintArgs) -> CliResult {
    let doc = read_document(&args.input)?;
    let findings = lint(&doc, &LintConfig::default());
    let text = if args.json {
        serde_json::to_string_pretty(&findings).context("cannot encode findings")?
    } else {
        findings_table(&findings)
    };
    write_or_print(None, &text)?;
    Ok(())
}

fn render_cmd(args: RenderArgs) -> CliResult {
    let doc = read_document(&args.input)?;
    let style = RenderStyle {
        scale: args.scale,
        clip_out_of_canvas: args.clip,
        ..RenderStyle::default()
    };
    let svg = render_svg(&doc, &style).context("cannot render")?;
    write_or_print(args.out.as_deref(), &svg)?;
    Ok(())
}

fn serve(args: ServeArgs, seed: Option<u64>) -> CliResult {
    let base_config = GenerationConfig {
        seed,
        ..GenerationConfig::default()
    };
    let mut state = AppState {
        exemplars: Arc::new(load_exemplars(args.exemplars.as_deref())?),
        base_config: base_config.clone(),
        ..AppState::mock_only()
    };
    if !args.backend.eq_ignore_ascii_case("mock") {
        let remote = backend_from_arg(&args.backend, &base_config)?;
        state = state.with_remote(remote, true);
    }
    if let Some(dir) = &args.static_dir {
        if !dir.is_dir() {
            return Err(CliError::Input(anyhow::anyhow!("{} is not a directory", dir.display())));
        }
    }
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .with_context(|| format!("bad listen address {}:{}", args.host, args.port))?;
    runtime()?
        .block_on(server::serve(state, addr, args.static_dir))
        .context("server stopped")?;
    Ok(())
}
