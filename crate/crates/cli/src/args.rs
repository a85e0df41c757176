use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ore_core::{Level, WireFormat};

#[derive(Debug, Parser)]
#[command(name = "ore", version, about = "Build, check, convert, publish and crawl OAI-ORE resource maps")]
pub struct Cli {
    /// Print machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Settings file with `key = value` lines. Flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More logging on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a resource map file or URI against the model constraints.
    Validate(ValidateArgs),
    /// Re-serialize a resource map in another format.
    Convert(ConvertArgs),
    /// Write a new resource map for an aggregation.
    Build(BuildArgs),
    /// Publish a corpus directory over HTTP.
    Serve(ServeArgs),
    /// Walk aggregations breadth first from seed URIs.
    Crawl(CrawlArgs),
    /// Generate test corpora.
    Fixture(FixtureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Auto,
    Rdfxml,
    Atom,
}

impl FormatArg {
    pub fn fixed(self) -> Option<WireFormat> {
        match self {
            FormatArg::Auto => None,
            FormatArg::Rdfxml => Some(WireFormat::Rdfxml),
            FormatArg::Atom => Some(WireFormat::Atom),
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// File path, `-` for stdin, or an http(s) URI.
    pub input: String,
    #[arg(long, value_parser = parse_level)]
    pub level: Option<Level>,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// File path, `-` for stdin, or an http(s) URI.
    pub input: String,
    #[arg(long, value_parser = parse_format)]
    pub to: WireFormat,
    /// Input format; detected from the root element by default.
    #[arg(long, value_enum, default_value = "auto")]
    pub from: FormatArg,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub agg: String,
    #[arg(long)]
    pub rem: String,
    /// An aggregated resource; repeat for more.
    #[arg(long = "aggregate", value_name = "URI")]
    pub aggregates: Vec<String>,
    /// Creator of the resource map.
    #[arg(long)]
    pub creator: Option<String>,
    /// Modification timestamp of the resource map.
    #[arg(long)]
    pub modified: Option<String>,
    /// Title of the aggregation.
    #[arg(long)]
    pub title: Option<String>,
    /// A URI identifying the same content elsewhere; repeat for more.
    #[arg(long = "similar-to", value_name = "URI")]
    pub similar_to: Vec<String>,
    /// Add a proxy per aggregated resource, chained in argument order.
    #[arg(long)]
    pub proxies: bool,
    #[arg(long, value_parser = parse_format, default_value = "rdfxml")]
    pub to: WireFormat,
    #[arg(long, value_parser = parse_level)]
    pub level: Option<Level>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Directory of resource maps and manifests, as written by `ore fixture`.
    pub corpus: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub port: Option<u16>,
    #[arg(long)]
    pub bind: Option<String>,
    /// Public base URI; defaults to http://localhost:<port>/.
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long, value_parser = parse_format)]
    pub default_format: Option<WireFormat>,
    /// Tie-break order for content negotiation, e.g. `atom,rdfxml`.
    #[arg(long)]
    pub preference: Option<String>,
    /// Static files to serve under /ui.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
    /// Serve maps with URIs outside the base under /mirror/.
    #[arg(long)]
    pub mirror: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutArg {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CrawlArgs {
    #[arg(required = true, value_name = "SEED")]
    pub seeds: Vec<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub max_fetches: Option<usize>,
    /// Relations to follow: nested, isAggregatedBy, references, or all.
    #[arg(long)]
    pub follow: Option<String>,
    /// Aggregations fetched concurrently.
    #[arg(long)]
    pub width: Option<usize>,
    /// Delay between requests to one host, in milliseconds.
    #[arg(long)]
    pub politeness_ms: Option<u64>,
    #[arg(long)]
    pub timeout_secs: Option<u64>,
    /// Preferred map format when dereferencing aggregations.
    #[arg(long, value_parser = parse_format)]
    pub prefer: Option<WireFormat>,
    /// Report format on stdout; `json` is the same as --json.
    #[arg(long, value_enum)]
    pub out: Option<OutArg>,
    /// Also write the JSON report to this file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    Fig2,
    Arxiv,
    Jstor,
    Adversarial,
    All,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(value_enum)]
    pub kind: FixtureKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Base URI for generated JSTOR and adversarial corpora.
    #[arg(long, default_value = "http://localhost:8080/")]
    pub base: String,
    /// Base URI for the arXiv corpus.
    #[arg(long, default_value = "http://arxiv.org/")]
    pub arxiv_base: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub journals: usize,
    #[arg(long, default_value_t = 2)]
    pub issues: usize,
    #[arg(long, default_value_t = 3)]
    pub articles: usize,
    #[arg(long, default_value_t = 4)]
    pub pages: usize,
    #[arg(long, default_value_t = 0.1)]
    pub citation_density: f64,
    #[arg(long, default_value_t = 4)]
    pub formats: usize,
    #[arg(long, default_value_t = 2)]
    pub versions: usize,
    #[arg(long, default_value = "astro-ph/0601007")]
    pub identifier: String,
}

fn parse_format(s: &str) -> Result<WireFormat, String> {
    s.parse()
}

fn parse_level(s: &str) -> Result<Level, String> {
    s.parse()
}
