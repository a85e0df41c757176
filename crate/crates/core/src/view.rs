use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{ModelError, OreGraph};
use crate::term::{Term, Triple};
use crate::uri::Uri;
use crate::validate::{validate, Level};
use crate::vocab::vocab;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Proxy {
    pub proxy_uri: Uri,
    pub proxy_for: Uri,
    pub proxy_in: Uri,
}

/// Read model over a Resource Map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AggregationView {
    pub agg_uri: Uri,
    /// Members in `fst:followedBy` chain order first, then lexicographic.
    pub aggregated: Vec<Uri>,
    pub proxies: Vec<Proxy>,
    pub similar_to: Vec<Uri>,
    /// `(resource, resource map)` pairs from `ore:isDescribedBy`.
    pub nested: Vec<(Uri, Uri)>,
    pub metadata: Vec<Triple>,
}

impl AggregationView {
    pub fn of(graph: &OreGraph) -> Result<AggregationView, ModelError> {
        let report = validate(graph, Level::Lax);
        if !report.valid {
            return Err(ModelError::InvalidGraph(report.error_summary()));
        }
        Ok(build(graph))
    }

    pub fn proxy_for(&self, resource: &Uri) -> Option<&Proxy> {
        self.proxies
            .iter()
            .find(|p| &p.proxy_for == resource && p.proxy_in == self.agg_uri)
    }
}

pub fn aggregation_view(graph: &OreGraph) -> Result<AggregationView, ModelError> {
    AggregationView::of(graph)
}

/// All well-formed proxies (one proxyFor, one proxyIn, both URIs).
pub fn proxies(graph: &OreGraph) -> Vec<Proxy> {
    let v = vocab();
    let subjects: BTreeSet<&Uri> = graph
        .with_predicate(&v.proxy_for)
        .filter_map(|t| t.subject().as_uri())
        .collect();
    subjects
        .into_iter()
        .filter_map(|p| {
            let term = Term::uri(p.clone());
            let fors: Vec<&Term> = graph.objects(&term, &v.proxy_for).collect();
            let ins: Vec<&Term> = graph.objects(&term, &v.proxy_in).collect();
            match (fors.as_slice(), ins.as_slice()) {
                ([Term::Uri { value: f }], [Term::Uri { value: i }]) => Some(Proxy {
                    proxy_uri: p.clone(),
                    proxy_for: f.clone(),
                    proxy_in: i.clone(),
                }),
                _ => None,
            }
        })
        .collect()
}

fn build(graph: &OreGraph) -> AggregationView {
    let v = vocab();
    let agg = Term::uri(graph.agg_uri().clone());
    let proxies = proxies(graph);
    let members: BTreeSet<&Uri> = graph.aggregated().collect();

    let ordered = chain_order(graph, &proxies, &members);
    let chained: BTreeSet<&Uri> = ordered.iter().collect();
    let mut aggregated = ordered.clone();
    aggregated.extend(members.iter().filter(|m| !chained.contains(*m)).map(|m| (*m).clone()));

    let similar_to = graph
        .objects(&agg, &v.similar_to)
        .filter_map(Term::as_uri)
        .cloned()
        .collect();

    let nested = graph
        .with_predicate(&v.is_described_by)
        .filter(|t| t.subject() != &agg)
        .filter_map(|t| Some((t.subject().as_uri()?.clone(), t.object().as_uri()?.clone())))
        .collect();

    let metadata = graph
        .triples()
        .iter()
        .filter(|t| t.subject() == &agg)
        .cloned()
        .collect();

    AggregationView {
        agg_uri: graph.agg_uri().clone(),
        aggregated,
        proxies,
        similar_to,
        nested,
        metadata,
    }
}

fn walk<'a>(
    start: &'a Uri,
    local: &BTreeMap<&'a Uri, &'a Uri>,
    next: &BTreeMap<&'a Uri, &'a Uri>,
    visited: &mut BTreeSet<&'a Uri>,
    out: &mut Vec<Uri>,
) {
    let mut cur = Some(start);
    while let Some(p) = cur {
        let Some(target) = local.get(p) else { break };
        if !visited.insert(p) {
            break;
        }
        if !out.contains(*target) {
            out.push((*target).clone());
        }
        cur = next.get(p).copied();
    }
}

/// Walks `fst:followedBy` chains between this aggregation's proxies and
/// returns the proxied members in chain order.
fn chain_order<'a>(graph: &'a OreGraph, proxies: &'a [Proxy], members: &BTreeSet<&'a Uri>) -> Vec<Uri> {
    let v = vocab();
    let local: BTreeMap<&Uri, &Uri> = proxies
        .iter()
        .filter(|p| &p.proxy_in == graph.agg_uri() && members.contains(&p.proxy_for))
        .map(|p| (&p.proxy_uri, &p.proxy_for))
        .collect();

    let mut next: BTreeMap<&Uri, &Uri> = BTreeMap::new();
    let mut has_incoming: BTreeSet<&Uri> = BTreeSet::new();
    for t in graph.with_predicate(&v.followed_by) {
        let (Some(from), Some(to)) = (t.subject().as_uri(), t.object().as_uri()) else {
            continue;
        };
        if !local.contains_key(from) || !local.contains_key(to) || from == to {
            continue;
        }
        // With several successors, the smallest URI wins.
        let slot = next.entry(from).or_insert(to);
        if to < *slot {
            *slot = to;
        }
    }
    for to in next.values() {
        has_incoming.insert(to);
    }

    let in_chain: BTreeSet<&Uri> = next.keys().copied().chain(next.values().copied()).collect();
    let by_target = |a: &&Uri, b: &&Uri| local[a].cmp(local[b]);
    let mut heads: Vec<&Uri> = in_chain.iter().copied().filter(|p| !has_incoming.contains(p)).collect();
    heads.sort_by(by_target);

    let mut visited: BTreeSet<&Uri> = BTreeSet::new();
    let mut out = Vec::new();
    for head in heads {
        walk(head, &local, &next, &mut visited, &mut out);
    }
    // Pure cycles have no head; start them at their smallest member.
    let mut rest: Vec<&Uri> = in_chain.into_iter().filter(|p| !visited.contains(p)).collect();
    rest.sort_by(by_target);
    for p in rest {
        if !visited.contains(p) {
            walk(p, &local, &next, &mut visited, &mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: &str) -> Uri {
        Uri::parse(&format!("http://example.org/{s}")).unwrap()
    }

    #[test]
    fn lexicographic_without_chains() {
        let g = OreGraph::new_aggregation(&u("ReM-1"), &u("A-1"), &[u("AR-3"), u("AR-1"), u("AR-2")]).unwrap();
        let view = aggregation_view(&g).unwrap();
        assert_eq!(view.aggregated, vec![u("AR-1"), u("AR-2"), u("AR-3")]);
        assert_eq!(view.metadata.len(), 4);
    }

    #[test]
    fn chain_order_wins() {
        let v = vocab();
        let pages = [u("p/c"), u("p/a"), u("p/b"), u("pdf")];
        let mut g = OreGraph::new_aggregation(&u("R"), &u("A"), &pages).unwrap();
        for name in ["c", "a", "b"] {
            g.create_proxy(&u(&format!("A#proxy/{name}")), &u(&format!("p/{name}")), &u("A")).unwrap();
        }
        // c -> a -> b
        g.add_triple(Triple::uris(&u("A#proxy/c"), &v.followed_by, &u("A#proxy/a"))).unwrap();
        g.add_triple(Triple::uris(&u("A#proxy/a"), &v.followed_by, &u("A#proxy/b"))).unwrap();
        let view = aggregation_view(&g).unwrap();
        assert_eq!(view.aggregated, vec![u("p/c"), u("p/a"), u("p/b"), u("pdf")]);
        assert_eq!(view.proxies.len(), 3);
        assert_eq!(view.proxy_for(&u("p/a")).unwrap().proxy_uri, u("A#proxy/a"));
    }

    #[test]
    fn cyclic_chain_terminates() {
        let v = vocab();
        let mut g = OreGraph::new_aggregation(&u("R"), &u("A"), &[u("x"), u("y")]).unwrap();
        g.create_proxy(&u("P-x"), &u("x"), &u("A")).unwrap();
        g.create_proxy(&u("P-y"), &u("y"), &u("A")).unwrap();
        g.add_triple(Triple::uris(&u("P-y"), &v.followed_by, &u("P-x"))).unwrap();
        g.add_triple(Triple::uris(&u("P-x"), &v.followed_by, &u("P-y"))).unwrap();
        assert_eq!(aggregation_view(&g).unwrap().aggregated, vec![u("x"), u("y")]);
    }

    #[test]
    fn nested_and_similar() {
        let mut g = OreGraph::new_aggregation(&u("R"), &u("A"), &[u("x")]).unwrap();
        g.mark_nested(&u("x"), &u("R-x")).unwrap();
        g.add_similar_to("info:doi/10.5555/1").unwrap();
        let view = aggregation_view(&g).unwrap();
        assert_eq!(view.nested, vec![(u("x"), u("R-x"))]);
        assert_eq!(view.similar_to.len(), 1);
    }

    #[test]
    fn invalid_graph_rejected() {
        let v = vocab();
        let mut g = OreGraph::new_aggregation(&u("R"), &u("A"), &[u("x")]).unwrap();
        g.add_triple(Triple::uris(&u("lonely"), &v.creator, &u("nobody"))).unwrap();
        assert!(matches!(aggregation_view(&g), Err(ModelError::InvalidGraph(_))));
    }
}
