use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, PoisonError};
use std::time::{Duration, Instant};

use log::{debug, warn};
use ore_core::{vocab, OreGraph, Term, Uri, WireFormat};
use serde::Serialize;

use crate::discover::{check_authority, discover_graph, DiscoverError, Verdict, MAX_REDIRECTS};
use crate::fetch::{FetchError, Fetcher};
use crate::message::Response;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Relation {
    /// A member that has its own resource map (`ore:isDescribedBy`).
    Nested,
    /// Another aggregation this one, or one of its members, belongs to.
    IsAggregatedBy,
    /// `dcterms:references` from the aggregation.
    References,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Nested, Relation::IsAggregatedBy, Relation::References];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Nested => "nested",
            Relation::IsAggregatedBy => "isAggregatedBy",
            Relation::References => "references",
        }
    }

    /// Comma-separated names; `all` selects every relation.
    pub fn parse_list(list: &str) -> Result<BTreeSet<Relation>, String> {
        let mut out = BTreeSet::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "all" {
                out.extend(Relation::ALL);
            } else {
                out.insert(item.parse()?);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Relation, String> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s) || (s == "is-aggregated-by" && *r == Relation::IsAggregatedBy))
            .ok_or_else(|| format!("unknown relation {s:?} (expected nested, isAggregatedBy or references)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrawlLimits {
    /// Link hops from a seed; 0 fetches only the seeds.
    pub max_depth: usize,
    pub max_nodes: usize,
    /// Upper bound on requests issued, redirects and authority checks included.
    pub max_fetches: usize,
}

impl Default for CrawlLimits {
    fn default() -> CrawlLimits {
        CrawlLimits {
            max_depth: 3,
            max_nodes: 1_000,
            max_fetches: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrawlOptions {
    pub limits: CrawlLimits,
    pub follow: BTreeSet<Relation>,
    /// Concurrent fetches per batch. 1 is fully sequential.
    pub width: usize,
    /// Minimum spacing between requests to one authority.
    pub politeness: Duration,
    pub preferred: Option<WireFormat>,
}

impl Default for CrawlOptions {
    fn default() -> CrawlOptions {
        CrawlOptions {
            limits: CrawlLimits::default(),
            follow: BTreeSet::from([Relation::Nested]),
            width: 1,
            politeness: Duration::ZERO,
            preferred: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrawlNode {
    pub agg_uri: Uri,
    /// The map's own URI, as stated in its `ore:describes` triple.
    pub rem_uri: Uri,
    /// Where the map was actually retrieved.
    pub fetched_from: Uri,
    pub format: WireFormat,
    pub depth: usize,
    pub authoritative: bool,
    pub authority_reason: Option<String>,
    pub graph: OreGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CrawlEdge {
    pub from: Uri,
    pub relation: Relation,
    pub to: Uri,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CrawlError {
    pub uri: Uri,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CrawlResult {
    pub nodes: BTreeMap<Uri, CrawlNode>,
    pub edges: BTreeSet<CrawlEdge>,
    pub errors: Vec<CrawlError>,
    pub truncated: bool,
    /// Requests actually issued.
    pub fetches: usize,
}

/// Worst-case requests for one frontier entry: a redirect chain for the map
/// and one per format for the authority check.
const WORST_CASE_FETCHES: usize = (MAX_REDIRECTS + 1) * (1 + WireFormat::ALL.len());

/// Breadth-first crawl over resource maps.
///
/// Frontier levels are visited in lexicographic URI order and the visited
/// set is keyed by aggregation URI, so no aggregation is fetched twice.
/// With `width > 1` a level is fetched in parallel batches; a batch only
/// runs when the fetch budget covers its worst case, which keeps the node
/// and edge sets identical to a sequential crawl.
pub fn crawl(seeds: &[Uri], options: &CrawlOptions, fetcher: &dyn Fetcher) -> CrawlResult {
    let limits = options.limits;
    let budget = Budget::new(fetcher, limits.max_fetches, options.politeness);
    let authority = Mutex::new(HashMap::new());
    let width = options.width.max(1);

    let mut result = CrawlResult::default();
    let mut scheduled: BTreeSet<Uri> = seeds.iter().cloned().collect();
    let mut resolved: BTreeMap<Uri, Uri> = BTreeMap::new();
    let mut raw_edges = BTreeSet::new();
    let mut frontier: Vec<Uri> = scheduled.iter().cloned().collect();
    let mut depth = 0;

    'levels: while !frontier.is_empty() {
        let mut next = BTreeSet::new();
        let mut queue = frontier.into_iter().peekable();
        while queue.peek().is_some() {
            let slots = limits.max_nodes.saturating_sub(result.nodes.len());
            if slots == 0 || budget.remaining() == 0 {
                result.truncated = true;
                break 'levels;
            }
            let n = if width > 1 && budget.remaining() >= WORST_CASE_FETCHES * width.min(slots) {
                width.min(slots)
            } else {
                1
            };
            let batch: Vec<Uri> = queue.by_ref().filter(|u| !result.nodes.contains_key(u)).take(n).collect();
            let outcomes: Vec<Result<Visit, DiscoverError>> = if batch.len() > 1 {
                std::thread::scope(|scope| {
                    let handles: Vec<_> = batch
                        .iter()
                        .map(|uri| scope.spawn(|| visit(uri, options, &budget, &authority)))
                        .collect();
                    handles.into_iter().map(|h| h.join().expect("crawl worker panicked")).collect()
                })
            } else {
                batch.iter().map(|uri| visit(uri, options, &budget, &authority)).collect()
            };

            for (uri, outcome) in batch.into_iter().zip(outcomes) {
                match outcome {
                    Ok(found) => {
                        let agg = found.node.agg_uri.clone();
                        resolved.insert(uri, agg.clone());
                        if result.nodes.contains_key(&agg) {
                            continue;
                        }
                        scheduled.insert(agg.clone());
                        for (relation, to) in found.links {
                            raw_edges.insert(CrawlEdge {
                                from: agg.clone(),
                                relation,
                                to: to.clone(),
                            });
                            if result.nodes.contains_key(&to) || scheduled.contains(&to) {
                                continue;
                            }
                            if depth < limits.max_depth {
                                scheduled.insert(to.clone());
                                next.insert(to);
                            } else {
                                result.truncated = true;
                            }
                        }
                        result.nodes.insert(agg, CrawlNode { depth, ..found.node });
                    }
                    Err(e) => {
                        if matches!(e, DiscoverError::Fetch(FetchError::Budget(_))) {
                            result.truncated = true;
                        }
                        warn!("crawl: {uri}: {e}");
                        result.errors.push(CrawlError {
                            uri,
                            code: e.code().to_owned(),
                            message: e.to_string(),
                        });
                    }
                }
            }
        }
        frontier = next.into_iter().collect();
        depth += 1;
    }

    if budget.exhausted() {
        result.truncated = true;
    }
    let failed: BTreeSet<&Uri> = result.errors.iter().map(|e| &e.uri).collect();
    result.edges = raw_edges
        .into_iter()
        .map(|e| CrawlEdge {
            to: resolved.get(&e.to).cloned().unwrap_or(e.to),
            ..e
        })
        .filter(|e| result.nodes.contains_key(&e.to) || failed.contains(&e.to))
        .collect();
    result.errors.sort();
    result.fetches = budget.used();
    debug!(
        "crawl: {} nodes, {} edges, {} errors, {} fetches",
        result.nodes.len(),
        result.edges.len(),
        result.errors.len(),
        result.fetches
    );
    result
}

struct Visit {
    node: CrawlNode,
    links: Vec<(Relation, Uri)>,
}

fn visit(
    uri: &Uri,
    options: &CrawlOptions,
    fetcher: &Budget<'_>,
    cache: &Mutex<HashMap<(Uri, Uri), Verdict>>,
) -> Result<Visit, DiscoverError> {
    let (trace, graph) = discover_graph(uri, options.preferred, fetcher)?;
    let agg = graph.agg_uri().clone();
    let rem = graph.rem_uri().clone();
    // the crawl request itself dereferenced the aggregation
    let verdict = if trace.steps[0].request_uri == agg && trace.final_uri == rem.without_fragment() {
        Verdict {
            authoritative: true,
            via: trace.doc.as_ref().map(|d| d.format),
            reason: None,
        }
    } else {
        let key = (agg.clone(), rem.clone());
        let cached = cache.lock().unwrap_or_else(PoisonError::into_inner).get(&key).cloned();
        cached.unwrap_or_else(|| {
            let verdict = check_authority(&rem, &agg, fetcher);
            cache.lock().unwrap_or_else(PoisonError::into_inner).insert(key, verdict.clone());
            verdict
        })
    };
    let links = links(&graph, &options.follow);
    let doc = trace.doc.expect("discovery returns a document with the graph");
    Ok(Visit {
        node: CrawlNode {
            agg_uri: agg,
            rem_uri: rem,
            fetched_from: trace.final_uri,
            format: doc.format,
            depth: 0,
            authoritative: verdict.authoritative,
            authority_reason: verdict.reason,
            graph,
        },
        links,
    })
}

fn links(graph: &OreGraph, follow: &BTreeSet<Relation>) -> Vec<(Relation, Uri)> {
    let v = vocab();
    let agg = graph.agg_uri();
    let mut out = BTreeSet::new();
    let uri_of = |t: &Term| t.as_uri().filter(|u| *u != agg && u.is_http()).cloned();
    if follow.contains(&Relation::Nested) {
        for t in graph.with_predicate(&v.is_described_by) {
            if let Some(member) = uri_of(t.subject()).filter(|m| graph.aggregates(m)) {
                out.insert((Relation::Nested, member));
            }
        }
    }
    if follow.contains(&Relation::IsAggregatedBy) {
        for t in graph.with_predicate(&v.is_aggregated_by) {
            let subject_ok = t.subject().as_uri().is_some_and(|s| s == agg || graph.aggregates(s));
            if let Some(other) = uri_of(t.object()).filter(|_| subject_ok) {
                out.insert((Relation::IsAggregatedBy, other));
            }
        }
    }
    if follow.contains(&Relation::References) {
        for t in graph.with_predicate(&v.references) {
            if let Some(cited) = uri_of(t.object()).filter(|_| t.subject().is_uri(agg)) {
                out.insert((Relation::References, cited));
            }
        }
    }
    out.into_iter().collect()
}

/// Counts requests, refuses those beyond the limit and spaces requests to
/// one authority by the politeness delay.
struct Budget<'f> {
    inner: &'f dyn Fetcher,
    limit: usize,
    used: AtomicUsize,
    refused: AtomicUsize,
    politeness: Duration,
    next_slot: Mutex<HashMap<String, Instant>>,
}

impl<'f> Budget<'f> {
    fn new(inner: &'f dyn Fetcher, limit: usize, politeness: Duration) -> Budget<'f> {
        Budget {
            inner,
            limit,
            used: AtomicUsize::new(0),
            refused: AtomicUsize::new(0),
            politeness,
            next_slot: Mutex::new(HashMap::new()),
        }
    }

    fn remaining(&self) -> usize {
        self.limit.saturating_sub(self.used.load(Ordering::SeqCst))
    }

    fn used(&self) -> usize {
        self.used.load(Ordering::SeqCst)
    }

    fn exhausted(&self) -> bool {
        self.refused.load(Ordering::SeqCst) > 0
    }

    fn wait_turn(&self, uri: &Uri) {
        if self.politeness.is_zero() {
            return;
        }
        let authority = uri.authority().unwrap_or_default().to_owned();
        let wait = {
            let mut slots = self.next_slot.lock().unwrap_or_else(PoisonError::into_inner);
            let now = Instant::now();
            let slot = slots.get(&authority).copied().unwrap_or(now).max(now);
            slots.insert(authority, slot + self.politeness);
            slot - now
        };
        std::thread::sleep(wait);
    }
}

impl Fetcher for Budget<'_> {
    fn fetch(&self, uri: &Uri, accept: Option<&str>) -> Result<Response, FetchError> {
        let granted = self
            .used
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| (n < self.limit).then_some(n + 1))
            .is_ok();
        if !granted {
            self.refused.fetch_add(1, Ordering::SeqCst);
            return Err(FetchError::Budget(uri.clone()));
        }
        self.wait_turn(uri);
        self.inner.fetch(uri, accept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_names() {
        assert_eq!(Relation::parse_list("nested, references").unwrap().len(), 2);
        assert_eq!(Relation::parse_list("all").unwrap().len(), 3);
        assert_eq!("isaggregatedby".parse(), Ok(Relation::IsAggregatedBy));
        assert!(Relation::parse_list("nested,parent").is_err());
        assert_eq!(serde_json::to_string(&Relation::IsAggregatedBy).unwrap(), "\"isAggregatedBy\"");
    }
}
