//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p ore-cli --test acceptance -- --nocapture` to see them.

mod common;

#[path = "../../http/tests/support/matrix.rs"]
mod matrix;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ore_core::fixtures::{fig2, gen_adversarial, random_graph, random_triples, AdversarialKind, Corpus, JstorParams, Lcg};
use ore_core::serialize::{parse, serialize, to_atom, to_rdfxml};
use ore_core::{validate, vocab, Level, OreGraph, Term, Triple, Uri, WireFormat};
use ore_http::{
    check_authority, crawl, is_authoritative, CrawlLimits, CrawlOptions, CrawlResult, FakeNetwork, PublishOptions,
    Relation, Response, Service, ServiceConfig,
};
use ore_testkit::{isomorphic, naive_closure, read_rdfxml};

use common::{fixture, ore, repo_root, schema_check};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(started: Instant, limit: Duration) -> Result<Duration, String> {
    let took = started.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

/// The figure caption gives the member count in words.
fn caption_member_count() -> usize {
    let text = std::fs::read_to_string(repo_root().join("paper.md")).expect("paper.md");
    let caption = text
        .lines()
        .find(|l| l.contains("A Resource Map describes an Aggregation with"))
        .expect("figure caption");
    let words = ["one", "two", "three", "four", "five"];
    words
        .iter()
        .position(|w| caption.contains(&format!("with {w} Aggregated Resources")))
        .map(|i| i + 1)
        .expect("a spelled-out count")
}

fn fig2_reproduction() -> Check {
    let started = Instant::now();
    let v = vocab();
    let g = fig2();
    let rem = Term::uri(g.rem_uri().clone());
    let agg = Term::uri(g.agg_uri().clone());
    let count = |p: &Uri| g.with_predicate(p).count();
    ensure(count(&v.describes) == 1, || "describes count".into())?;
    let members = g.objects(&agg, &v.aggregates).count();
    ensure(members == caption_member_count(), || format!("{members} aggregated resources"))?;
    ensure(g.objects(&rem, &v.creator).count() == 1, || "creator on the map".into())?;
    ensure(g.objects(&rem, &v.modified).count() == 1, || "modified on the map".into())?;
    let report = validate(&g, Level::Strict);
    ensure(report.valid && report.errors().count() == 0, || report.error_summary())?;
    let rdf = std::fs::read(fixture("fig2.rdf")).map_err(|e| e.to_string())?;
    let atom = std::fs::read(fixture("fig2.atom")).map_err(|e| e.to_string())?;
    ensure(to_rdfxml(&g).unwrap().bytes == rdf, || "RDF/XML differs from golden".into())?;
    ensure(to_atom(&g).unwrap().bytes == atom, || "Atom differs from golden".into())?;
    let took = within(started, Duration::from_secs(1))?;
    Ok(format!("strict valid, goldens byte-equal, {took:.2?}"))
}

fn round_trip() -> Check {
    let started = Instant::now();
    let mut rng = Lcg::new(20_081_001);
    let mut largest = 0;
    for i in 0..500 {
        let g = random_graph(&mut rng, 200);
        largest = largest.max(g.len());
        ensure(g.len() <= 200, || format!("graph {i} has {} triples", g.len()))?;
        ensure(validate(&g, Level::Lax).valid, || format!("graph {i} is not valid"))?;
        let mut parsed = Vec::new();
        for format in WireFormat::ALL {
            let doc = serialize(&g, format).map_err(|e| format!("graph {i} {format}: {e}"))?;
            let back = parse(&doc).map_err(|e| format!("graph {i} {format}: {e}"))?;
            ensure(isomorphic(g.triples(), back.triples()), || format!("graph {i} {format} changed"))?;
            if format == WireFormat::Rdfxml {
                let oracle = read_rdfxml(doc.as_str().unwrap());
                ensure(isomorphic(&oracle, g.triples()), || format!("graph {i}: reference reader disagrees"))?;
            }
            parsed.push(back);
        }
        ensure(isomorphic(parsed[0].triples(), parsed[1].triples()), || {
            format!("graph {i}: Atom extraction differs from RDF/XML")
        })?;
    }
    let took = within(started, Duration::from_secs(30))?;
    Ok(format!("500 graphs (largest {largest} triples), both formats, {took:.2?}"))
}

fn with_describes(triples: Vec<Triple>) -> OreGraph {
    let ex = |s: &str| Uri::parse(&format!("http://example.org/{s}")).unwrap();
    let mut all = triples;
    all.push(Triple::uris(&ex("rem"), &vocab().describes, &ex("n0")));
    OreGraph::from_triples(all).unwrap()
}

fn inference() -> Check {
    let started = Instant::now();
    let mut rng = Lcg::new(7);
    for i in 0..200 {
        // alternate valid maps with unconstrained triple soups
        let g = if i % 2 == 0 {
            random_graph(&mut rng, 50)
        } else {
            with_describes(random_triples(&mut rng, 49))
        };
        ensure(g.len() <= 50, || format!("graph {i} has {} triples", g.len()))?;
        let closed = g.infer();
        ensure(closed.triples() == &naive_closure(g.triples()), || format!("graph {i} differs from fixpoint"))?;
    }
    let took = within(started, Duration::from_secs(10))?;
    Ok(format!("200 graphs equal the naive fixpoint, {took:.2?}"))
}

fn http_matrix() -> Check {
    let outcomes = matrix::run();
    let failed: Vec<&String> = outcomes.iter().filter(|(_, ok)| !ok).map(|(l, _)| l).collect();
    ensure(outcomes.len() >= 20, || format!("only {} cases", outcomes.len()))?;
    ensure(failed.is_empty(), || format!("{failed:?}"))?;
    Ok(format!("{} cases bit-exact", outcomes.len()))
}

fn authority() -> Check {
    let base = Uri::parse("http://localhost:8080/").unwrap();
    let corpus = Corpus::jstor(&base, &JstorParams::default()).unwrap();
    let service = Arc::new(Service::new(ServiceConfig::new(base)));
    service.publish_corpus(&corpus, PublishOptions::default()).map_err(|e| e.to_string())?;
    let original = service.entry(corpus.graphs[0].agg_uri()).unwrap();
    let copy = Uri::parse("http://copies.example.net/j1.rdf").unwrap();
    let bytes = original.variants[&WireFormat::Rdfxml].doc.bytes.clone();
    let net = FakeNetwork::new()
        .mount(service.clone())
        .script(copy.clone(), Response::new(200).with_body("application/rdf+xml", bytes));
    let mut published = 0;
    for entry in service.entries() {
        for variant in entry.variants.values() {
            ensure(is_authoritative(&variant.rem_uri, &entry.agg_uri, &net), || {
                format!("{} not authoritative", variant.rem_uri)
            })?;
            published += 1;
        }
    }
    let verdict = check_authority(&copy, &original.agg_uri, &net);
    ensure(!verdict.authoritative, || "foreign copy tested authoritative".into())?;
    Ok(format!("{published} published maps true, byte-identical foreign copy false"))
}

fn node_and_edge_sets(r: &CrawlResult) -> (Vec<Uri>, Vec<(Uri, Relation, Uri)>) {
    (
        r.nodes.keys().cloned().collect(),
        r.edges.iter().map(|e| (e.from.clone(), e.relation, e.to.clone())).collect(),
    )
}

fn crawl_bounds() -> Check {
    let started = Instant::now();
    let base = Uri::parse("http://localhost:8080/").unwrap();
    let params = JstorParams::default();
    ensure((params.journals, params.issues_per, params.articles_per, params.pages_per) == (2, 2, 3, 4), || {
        "fixture shape".into()
    })?;
    let corpus = Corpus::jstor(&base, &params).unwrap();
    let manifest = corpus.manifest.clone();
    let service = Arc::new(Service::new(ServiceConfig::new(base.clone())));
    service.publish_corpus(&corpus, PublishOptions::default()).map_err(|e| e.to_string())?;
    let net = FakeNetwork::new().mount(service);

    let mut options = CrawlOptions {
        limits: CrawlLimits {
            max_depth: 4,
            max_nodes: 1_000,
            max_fetches: 400,
        },
        follow: BTreeSet::from([Relation::Nested]),
        ..CrawlOptions::default()
    };
    let one = crawl(&manifest.seeds, &options, &net);
    let top_level = 2 + 2 * 2 + 2 * 2 * 3;
    let pages = manifest.counts["pages"];
    ensure(one.nodes.len() == manifest.expected_crawl_nodes, || {
        format!("{} nodes, manifest {}", one.nodes.len(), manifest.expected_crawl_nodes)
    })?;
    ensure(one.nodes.len() == top_level + pages, || format!("{} != {top_level} + {pages}", one.nodes.len()))?;
    ensure(net.calls() <= options.limits.max_fetches, || format!("{} fetches", net.calls()))?;
    ensure(!one.truncated && one.errors.is_empty(), || format!("{:?}", one.errors))?;

    options.width = 8;
    let eight = crawl(&manifest.seeds, &options, &net);
    ensure(node_and_edge_sets(&one) == node_and_edge_sets(&eight), || "width 8 differs from width 1".into())?;

    let cycle = gen_adversarial(&base, AdversarialKind::Cycle).unwrap();
    let cyclic = Arc::new(Service::new(ServiceConfig::new(base)));
    cyclic.publish_corpus(&cycle, PublishOptions::default()).map_err(|e| e.to_string())?;
    let cycle_net = FakeNetwork::new().mount(cyclic);
    options.limits.max_depth = 50;
    let looped = crawl(&cycle.manifest.seeds, &options, &cycle_net);
    let log = cycle_net.log();
    let distinct: BTreeSet<&Uri> = log.iter().collect();
    ensure(looped.nodes.len() == 2, || format!("cycle gave {} nodes", looped.nodes.len()))?;
    ensure(distinct.len() == log.len(), || format!("refetches in {log:?}"))?;

    let took = within(started, Duration::from_secs(10))?;
    Ok(format!(
        "{} nodes ({top_level} + {pages} pages), {} fetches, cycle 2 nodes, width 8 = width 1, {took:.2?}",
        one.nodes.len(),
        one.fetches
    ))
}

fn cli_matrix() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let missing = tmp.path().join("missing.rdf").to_string_lossy().into_owned();
    let gen = tmp.path().to_string_lossy().into_owned();
    let fig2_path = fixture("fig2.rdf");
    let double = fixture("adversarial/double_describes/0.rdf");
    let disconnected = fixture("adversarial/disconnected/0.rdf");
    let cases: Vec<(Vec<&str>, i32, &str)> = vec![
        (vec!["validate", &fig2_path], 0, "validate"),
        (vec!["convert", &fig2_path, "--to", "atom"], 0, "convert"),
        (vec!["fixture", "adversarial", "--out", &gen], 0, "fixture"),
        (vec!["build", "--agg", "http://ex.org/a", "--rem", "http://ex.org/r", "--aggregate", "http://ex.org/x"], 0, "build"),
        (vec!["validate", &disconnected], 1, "validate"),
        (vec!["validate", &double], 2, "error"),
        (vec!["convert", &double, "--to", "atom"], 2, "error"),
        (vec!["validate", &missing], 2, "error"),
        (vec!["validate", "http://127.0.0.1:1/a"], 3, "error"),
        (vec!["crawl", "http://127.0.0.1:1/a"], 3, "crawl"),
        (vec!["serve", &gen, "--port", "99999"], 4, "error"),
        (vec!["convert", &fig2_path, "--to", "n3"], 4, "error"),
    ];
    let mut codes = BTreeSet::new();
    for (args, want, schema) in &cases {
        let mut args = args.clone();
        args.push("--json");
        let run = ore(&args);
        ensure(run.code == *want, || format!("ore {}: exit {} want {want}", args.join(" "), run.code))?;
        let value: serde_json::Value =
            serde_json::from_str(&run.stdout).map_err(|e| format!("ore {}: {e}", args.join(" ")))?;
        schema_check(schema, &value).map_err(|e| format!("ore {}: {e}", args.join(" ")))?;
        codes.insert(run.code);
    }
    ensure(codes.len() == 5, || format!("codes seen {codes:?}"))?;
    Ok(format!("{} invocations, exits 0-4 seen, JSON matches schemas", cases.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("fig2 reproduction", fig2_reproduction),
        ("round-trip property", round_trip),
        ("inference oracle", inference),
        ("http conformance matrix", http_matrix),
        ("authoritativeness", authority),
        ("crawl determinism and bounds", crawl_bounds),
        ("cli matrix", cli_matrix),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
