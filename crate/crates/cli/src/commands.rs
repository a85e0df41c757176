use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use ore_core::fixtures::{fig2, gen_adversarial, proxy_uri, write_corpus, AdversarialKind, ArxivParams, Corpus, JstorParams};
use ore_core::serialize::{parse, serialize, to_atom_with_warnings, WireError};
use ore_core::{validate, vocab, Level, Literal, OreGraph, Term, Triple, Uri, ValidationReport, WireDocument, WireFormat};
use ore_http::{crawl, discover, CrawlLimits, CrawlOptions, DiscoverError, HttpFetcher, PublishOptions, Relation, Service, ServiceConfig};
use serde_json::{json, Value};

use crate::args::{BuildArgs, ConvertArgs, CrawlArgs, FixtureArgs, FixtureKind, OutArg, ServeArgs, ValidateArgs};
use crate::config::Config;
use crate::exit::{Exit, Failure};

const DEFAULT_TIMEOUT: u64 = 10;

/// Serializes, logging what the Atom profile had to approximate.
fn render(graph: &OreGraph, format: WireFormat) -> Result<WireDocument, WireError> {
    if format != WireFormat::Atom {
        return serialize(graph, format);
    }
    let (doc, warnings) = to_atom_with_warnings(graph)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(doc)
}

/// Where results go: text for people, one JSON document for programs.
pub struct Output {
    pub json: bool,
}

impl Output {
    pub fn emit(&self, text: &str, value: &Value) {
        let mut stdout = std::io::stdout().lock();
        let written = if self.json {
            serde_json::to_writer_pretty(&mut stdout, value)
                .map_err(std::io::Error::from)
                .and_then(|_| writeln!(stdout))
        } else {
            stdout.write_all(text.as_bytes())
        };
        // a closed pipe is not worth a panic
        let _ = written.and_then(|_| stdout.flush());
    }
}

fn parse_uri(value: &str, what: &str) -> Result<Uri, Failure> {
    Uri::parse(value).map_err(|e| Failure::usage(format!("{what}: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn is_remote(input: &str) -> bool {
    input.starts_with("http://") || input.starts_with("https://")
}

fn discover_failure(e: DiscoverError) -> Failure {
    match e {
        DiscoverError::Parse { .. } => Failure::input(e),
        other => Failure::network(other),
    }
}

/// Reads a map from a file, stdin or the web.
fn read_document(input: &str, format: Option<WireFormat>, timeout: Duration) -> Result<WireDocument, Failure> {
    let doc = if is_remote(input) {
        let uri = parse_uri(input, "input")?;
        let trace = discover(&uri, format, &HttpFetcher::new(timeout)).map_err(discover_failure)?;
        trace.doc.expect("a successful discovery carries the document")
    } else {
        let bytes = if input == "-" {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
            buf
        } else {
            std::fs::read(input).map_err(|e| Failure::input(format!("cannot read {input}: {e}")))?
        };
        match format {
            Some(f) => WireDocument::new(f, bytes),
            None => WireDocument::detect(bytes).map_err(|e| Failure::input(format!("{input}: {e}")))?,
        }
    };
    match format {
        Some(f) if f != doc.format => Err(Failure::input(format!("{input}: expected a {f} document, got {}", doc.format))),
        _ => Ok(doc),
    }
}

fn read_graph(input: &str, format: Option<WireFormat>, timeout: Duration) -> Result<(WireDocument, OreGraph), Failure> {
    let doc = read_document(input, format, timeout)?;
    let graph = parse(&doc).map_err(|e| Failure::input(format!("{input}: {e}")))?;
    Ok((doc, graph))
}

fn findings_text(report: &ValidationReport) -> String {
    let mut out = String::new();
    for f in &report.findings {
        let severity = serde_json::to_value(f.severity).unwrap_or_default();
        let subject = f.subject.as_deref().map(|s| format!(" <{s}>")).unwrap_or_default();
        out.push_str(&format!("  {} {}{subject}: {}\n", severity.as_str().unwrap_or("?"), f.code, f.message));
    }
    out
}

fn verdict(report: &ValidationReport) -> Exit {
    if report.valid {
        Exit::Ok
    } else {
        Exit::Invalid
    }
}

pub fn validate_cmd(args: ValidateArgs, config: &Config, out: &Output) -> Result<Exit, Failure> {
    let level = config.or(args.level, "level", Level::Strict)?;
    let timeout = Duration::from_secs(config.or(None, "timeout_secs", DEFAULT_TIMEOUT)?);
    let (doc, graph) = read_graph(&args.input, args.format.fixed(), timeout)?;
    let report = validate(&graph, level);
    let (errors, warnings) = (report.errors().count(), report.warnings().count());
    let text = format!(
        "{} ({}): {} at {level} level, {errors} errors, {warnings} warnings\n{}",
        args.input,
        doc.format,
        if report.valid { "valid" } else { "INVALID" },
        findings_text(&report),
    );
    out.emit(
        &text,
        &json!({
            "input": args.input,
            "format": doc.format,
            "agg_uri": graph.agg_uri(),
            "rem_uri": graph.rem_uri(),
            "level": level,
            "valid": report.valid,
            "errors": errors,
            "warnings": warnings,
            "findings": report.findings,
        }),
    );
    Ok(verdict(&report))
}

pub fn convert_cmd(args: ConvertArgs, config: &Config, out: &Output) -> Result<Exit, Failure> {
    let timeout = Duration::from_secs(config.or(None, "timeout_secs", DEFAULT_TIMEOUT)?);
    let (doc, graph) = read_graph(&args.input, args.from.fixed(), timeout)?;
    let converted = render(&graph, args.to).map_err(|e| Failure::input(format!("{}: {e}", args.input)))?;
    let text = converted.as_str().expect("serializers write UTF-8").to_owned();
    let mut value = json!({
        "input": args.input,
        "from": doc.format,
        "to": args.to,
        "output": args.output,
        "bytes": converted.bytes.len(),
    });
    match &args.output {
        Some(path) => {
            write_file(path, &converted.bytes)?;
            out.emit(&format!("wrote {} ({} bytes)\n", path.display(), converted.bytes.len()), &value);
        }
        None => {
            value["document"] = Value::String(text.clone());
            out.emit(&text, &value);
        }
    }
    Ok(Exit::Ok)
}

fn add_literal(graph: &mut OreGraph, subject: &Uri, predicate: &Uri, text: &str) -> Result<(), Failure> {
    let literal = Literal::plain(text).map_err(|e| Failure::usage(format!("{text:?}: {e}")))?;
    let triple = Triple::new(Term::uri(subject.clone()), predicate.clone(), Term::literal(literal))
        .map_err(Failure::usage)?;
    graph.add_triple(triple).map_err(Failure::usage)?;
    Ok(())
}

pub fn build_cmd(args: BuildArgs, config: &Config, out: &Output) -> Result<Exit, Failure> {
    let level = config.or(args.level, "level", Level::Strict)?;
    let agg = parse_uri(&args.agg, "--agg")?;
    let rem = parse_uri(&args.rem, "--rem")?;
    let members = args
        .aggregates
        .iter()
        .map(|a| parse_uri(a, "--aggregate"))
        .collect::<Result<Vec<_>, _>>()?;
    let mut graph = OreGraph::new_aggregation(&rem, &agg, &members).map_err(Failure::usage)?;
    let v = vocab();
    if let Some(creator) = &args.creator {
        add_literal(&mut graph, &rem, &v.creator, creator)?;
    }
    if let Some(modified) = &args.modified {
        add_literal(&mut graph, &rem, &v.modified, modified)?;
    }
    if let Some(title) = &args.title {
        add_literal(&mut graph, &agg, &v.title, title)?;
    }
    for other in &args.similar_to {
        graph.add_similar_to(other).map_err(Failure::usage)?;
    }
    if args.proxies {
        let mut previous: Option<Uri> = None;
        for member in &members {
            let proxy = proxy_uri(&agg, member).map_err(Failure::usage)?;
            graph.create_proxy(&proxy, member, &agg).map_err(Failure::usage)?;
            if let Some(prev) = previous.replace(proxy.clone()) {
                graph
                    .add_triple(Triple::uris(&prev, &v.followed_by, &proxy))
                    .map_err(Failure::usage)?;
            }
        }
    }

    let report = validate(&graph, level);
    let mut value = json!({
        "agg_uri": agg,
        "rem_uri": rem,
        "format": args.to,
        "output": args.output,
        "triples": graph.len(),
        "level": level,
        "valid": report.valid,
        "findings": report.findings,
    });
    if !report.valid {
        let text = format!("not written: the map is invalid at {level} level\n{}", findings_text(&report));
        out.emit(&text, &value);
        return Ok(Exit::Invalid);
    }
    let doc = render(&graph, args.to).map_err(Failure::input)?;
    let text = match &args.output {
        Some(path) => {
            write_file(path, &doc.bytes)?;
            format!("wrote {} ({} triples)\n{}", path.display(), graph.len(), findings_text(&report))
        }
        None => {
            let text = doc.as_str().expect("serializers write UTF-8").to_owned();
            value["document"] = Value::String(text.clone());
            text
        }
    };
    out.emit(&text, &value);
    Ok(Exit::Ok)
}

fn parse_preference(list: &str) -> Result<Vec<WireFormat>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<WireFormat>().map_err(Failure::usage))
        .collect()
}

pub fn serve_cmd(args: ServeArgs, config: &Config, out: &Output) -> Result<Exit, Failure> {
    let port: u16 = config.or(args.port, "port", 8080)?;
    if port == 0 {
        return Err(Failure::usage("port must be between 1 and 65535"));
    }
    let bind: String = config.or(args.bind, "bind", "127.0.0.1".to_owned())?;
    let base = match config.pick(args.base, "base")? {
        Some(b) => parse_uri(&b, "--base")?,
        None => parse_uri(&format!("http://localhost:{port}/"), "base")?,
    };
    let mut service_config = ServiceConfig::new(base.clone());
    if let Some(f) = config.pick(args.default_format, "default_format")? {
        service_config.default_format = f;
    }
    if let Some(list) = config.pick(args.preference, "preference")? {
        service_config.preference = parse_preference(&list)?;
    }
    service_config.ui_dir = config.pick(args.ui_dir, "ui_dir")?;
    let mirror = args.mirror || config.or(None, "mirror", false)?;

    if !args.corpus.is_dir() {
        return Err(Failure::input(format!("{} is not a directory", args.corpus.display())));
    }
    let service = Service::new(service_config);
    let summary = service
        .publish_dir(&args.corpus, PublishOptions { replace: false, mirror })
        .map_err(Failure::input)?;
    let handle = ore_http::serve(Arc::new(service), &bind, port).map_err(Failure::network)?;
    let addr = handle.local_addr();

    let skipped: Vec<Value> = summary
        .skipped
        .iter()
        .map(|(path, reason)| json!({ "path": path, "reason": reason }))
        .collect();
    let mut text = format!(
        "serving {} aggregations from {} at {base} (listening on {addr})\n",
        summary.published.len(),
        args.corpus.display()
    );
    for (path, reason) in &summary.skipped {
        text.push_str(&format!("  skipped {}: {reason}\n", path.display()));
    }
    out.emit(
        &text,
        &json!({
            "listening": addr.to_string(),
            "base": base,
            "published": summary.published.len(),
            "redirects": summary.redirects,
            "skipped": skipped,
        }),
    );
    // runs until the process is interrupted
    handle.wait();
    Ok(Exit::Ok)
}

fn crawl_exit(nodes: usize, codes: &[&str]) -> Exit {
    if nodes > 0 || codes.is_empty() {
        Exit::Ok
    } else if codes.iter().all(|c| *c == "not_http") {
        Exit::Usage
    } else if codes.iter().all(|c| *c == "parse_error") {
        Exit::Input
    } else {
        Exit::Network
    }
}

pub fn crawl_cmd(args: CrawlArgs, config: &Config, out: &Output) -> Result<Exit, Failure> {
    let seeds = args
        .seeds
        .iter()
        .map(|s| parse_uri(s, "seed"))
        .collect::<Result<Vec<_>, _>>()?;
    let defaults = CrawlLimits::default();
    let follow: String = config.or(args.follow, "follow", "nested".to_owned())?;
    let options = CrawlOptions {
        limits: CrawlLimits {
            max_depth: config.or(args.depth, "depth", defaults.max_depth)?,
            max_nodes: config.or(args.max_nodes, "max_nodes", defaults.max_nodes)?,
            max_fetches: config.or(args.max_fetches, "max_fetches", defaults.max_fetches)?,
        },
        follow: Relation::parse_list(&follow).map_err(Failure::usage)?,
        width: config.or(args.width, "width", 1usize)?.max(1),
        politeness: Duration::from_millis(config.or(args.politeness_ms, "politeness_ms", 0)?),
        preferred: args.prefer,
    };
    let timeout = Duration::from_secs(config.or(args.timeout_secs, "timeout_secs", DEFAULT_TIMEOUT)?);

    let result = crawl(&seeds, &options, &HttpFetcher::new(timeout));
    let report = serde_json::to_value(result.to_json()).expect("crawl reports serialize");
    if let Some(path) = &args.output {
        let mut bytes = serde_json::to_vec_pretty(&report).expect("crawl reports serialize");
        bytes.push(b'\n');
        write_file(path, &bytes)?;
    }

    let mut text = format!(
        "{} aggregations, {} edges, {} errors, {} fetches{}\n",
        result.nodes.len(),
        result.edges.len(),
        result.errors.len(),
        result.fetches,
        if result.truncated { " (truncated by limits)" } else { "" },
    );
    for node in result.nodes.values() {
        let authority = if node.authoritative { "authoritative" } else { "NOT authoritative" };
        text.push_str(&format!("  [{}] {} <- {} ({}, {authority})\n", node.depth, node.agg_uri, node.rem_uri, node.format));
    }
    for e in &result.errors {
        text.push_str(&format!("  error {} {}: {}\n", e.code, e.uri, e.message));
    }
    let json_out = Output {
        json: out.json || args.out == Some(OutArg::Json),
    };
    json_out.emit(&text, &report);

    let codes: Vec<&str> = result.errors.iter().map(|e| e.code.as_str()).collect();
    Ok(crawl_exit(result.nodes.len(), &codes))
}

pub fn fixture_cmd(args: FixtureArgs, out: &Output) -> Result<Exit, Failure> {
    let base = parse_uri(&args.base, "--base")?;
    let arxiv_base = parse_uri(&args.arxiv_base, "--arxiv-base")?;
    let bad = |e: ore_core::fixtures::FixtureError| Failure::usage(e);
    let wants = |k: FixtureKind| args.kind == k || args.kind == FixtureKind::All;

    let mut corpora: Vec<(PathBuf, Corpus)> = Vec::new();
    if wants(FixtureKind::Arxiv) {
        let params = ArxivParams {
            n_formats: args.formats,
            n_versions: args.versions,
            identifier: args.identifier.clone(),
            seed: args.seed,
        };
        corpora.push((args.out.clone(), Corpus::arxiv(&arxiv_base, &params).map_err(bad)?));
    }
    if wants(FixtureKind::Jstor) {
        let params = JstorParams {
            journals: args.journals,
            issues_per: args.issues,
            articles_per: args.articles,
            pages_per: args.pages,
            citation_density: args.citation_density,
            seed: args.seed,
        };
        corpora.push((args.out.clone(), Corpus::jstor(&base, &params).map_err(bad)?));
    }
    if wants(FixtureKind::Adversarial) {
        for kind in AdversarialKind::ALL {
            corpora.push((args.out.join("adversarial"), gen_adversarial(&base, kind).map_err(bad)?));
        }
    }

    let mut files: Vec<PathBuf> = Vec::new();
    if wants(FixtureKind::Fig2) {
        std::fs::create_dir_all(&args.out).map_err(|e| Failure::input(format!("{}: {e}", args.out.display())))?;
        let graph = fig2();
        for format in WireFormat::ALL {
            let doc = serialize(&graph, format).map_err(Failure::input)?;
            let path = args.out.join(format!("fig2.{}", format.extension()));
            write_file(&path, &doc.bytes)?;
            files.push(path);
        }
    }
    let mut summaries = Vec::new();
    let mut text = String::new();
    for (root, corpus) in &corpora {
        files.extend(write_corpus(root, corpus).map_err(Failure::input)?);
        let m = &corpus.manifest;
        text.push_str(&format!(
            "  {}: {} aggregations, {} expected crawl nodes from {} seeds\n",
            corpus.kind,
            m.agg_uris.len(),
            m.expected_crawl_nodes,
            m.seeds.len()
        ));
        summaries.push(json!({
            "kind": corpus.kind,
            "aggregations": m.agg_uris.len(),
            "expected_crawl_nodes": m.expected_crawl_nodes,
            "seeds": m.seeds,
        }));
    }
    let text = format!("wrote {} files under {}\n{text}", files.len(), args.out.display());
    out.emit(
        &text,
        &json!({
            "out": args.out,
            "files": files,
            "corpora": summaries,
        }),
    );
    Ok(Exit::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crawl_exit_codes() {
        assert_eq!(crawl_exit(3, &["unreachable"]), Exit::Ok);
        assert_eq!(crawl_exit(0, &["unreachable", "parse_error"]), Exit::Network);
        assert_eq!(crawl_exit(0, &["parse_error"]), Exit::Input);
        assert_eq!(crawl_exit(0, &["not_http"]), Exit::Usage);
    }

    #[test]
    fn preference_lists() {
        assert_eq!(parse_preference("atom, rdfxml").unwrap(), [WireFormat::Atom, WireFormat::Rdfxml]);
        assert_eq!(parse_preference("turtle").unwrap_err().code(), 4);
    }
}
