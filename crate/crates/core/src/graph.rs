use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::term::{Term, TermError, Triple};
use crate::uri::{BadUri, Uri};
use crate::vocab::{self, vocab};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    BadUri(#[from] BadUri),
    #[error("{0} must be an http(s) URI")]
    NotHttp(Uri),
    #[error("identity clash: {0}")]
    IdentityClash(String),
    #[error("the ore:describes triple is fixed at construction")]
    DescribesImmutable,
    #[error("blank node {0} cannot be typed as an aggregation, resource map or proxy")]
    BlankIdentity(String),
    #[error("{resource} is not aggregated by {aggregation}")]
    NotAggregated { resource: Uri, aggregation: Uri },
    #[error("{existing} is already a proxy for {proxy_for} in {proxy_in}")]
    DuplicateProxy {
        existing: Uri,
        proxy_for: Uri,
        proxy_in: Uri,
    },
    #[error("no ore:describes triple")]
    NoDescribes,
    #[error("{0} ore:describes triples; exactly one is required")]
    AmbiguousDescribes(usize),
    #[error("graph is invalid: {0}")]
    InvalidGraph(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// The in-memory form of a Resource Map: a duplicate-free triple set anchored
/// by exactly one `(rem, ore:describes, agg)` triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OreGraph {
    rem_uri: Uri,
    agg_uri: Uri,
    triples: BTreeSet<Triple>,
}

impl OreGraph {
    /// Builds a Resource Map describing `agg_uri`, which aggregates each
    /// distinct URI in `aggregated`.
    pub fn new_aggregation(rem_uri: &Uri, agg_uri: &Uri, aggregated: &[Uri]) -> Result<OreGraph, ModelError> {
        for uri in [rem_uri, agg_uri].into_iter().chain(aggregated) {
            require_http(uri)?;
        }
        if rem_uri == agg_uri {
            return Err(ModelError::IdentityClash(format!(
                "resource map and aggregation share the URI {rem_uri}"
            )));
        }
        if aggregated.contains(agg_uri) {
            return Err(ModelError::IdentityClash(format!("{agg_uri} cannot aggregate itself")));
        }
        let v = vocab();
        let mut triples = BTreeSet::new();
        triples.insert(Triple::uris(rem_uri, &v.describes, agg_uri));
        triples.insert(Triple::uris(rem_uri, &v.rdf_type, &v.resource_map_class));
        triples.insert(Triple::uris(agg_uri, &v.rdf_type, &v.aggregation_class));
        for resource in aggregated {
            triples.insert(Triple::uris(agg_uri, &v.aggregates, resource));
        }
        Ok(OreGraph {
            rem_uri: rem_uri.clone(),
            agg_uri: agg_uri.clone(),
            triples,
        })
    }

    /// Wraps a parsed triple set, recovering the Resource Map and Aggregation
    /// from its single `ore:describes` triple.
    pub fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Result<OreGraph, ModelError> {
        let triples: BTreeSet<Triple> = triples.into_iter().collect();
        let describes = &vocab().describes;
        let anchors: Vec<&Triple> = triples.iter().filter(|t| t.predicate() == describes).collect();
        let anchor = match anchors.as_slice() {
            [] => return Err(ModelError::NoDescribes),
            [one] => *one,
            many => return Err(ModelError::AmbiguousDescribes(many.len())),
        };
        let rem_uri = match anchor.subject() {
            Term::Uri { value } => value.clone(),
            other => return Err(ModelError::BlankIdentity(other.to_string())),
        };
        let agg_uri = match anchor.object() {
            Term::Uri { value } => value.clone(),
            Term::Blank { label } => return Err(ModelError::BlankIdentity(format!("_:{}", label.as_str()))),
            Term::Literal { .. } => return Err(ModelError::IdentityClash("ore:describes object is a literal".into())),
        };
        if rem_uri == agg_uri {
            return Err(ModelError::IdentityClash(format!(
                "resource map and aggregation share the URI {rem_uri}"
            )));
        }
        Ok(OreGraph {
            rem_uri,
            agg_uri,
            triples,
        })
    }

    pub fn rem_uri(&self) -> &Uri {
        &self.rem_uri
    }

    pub fn agg_uri(&self) -> &Uri {
        &self.agg_uri
    }

    pub fn triples(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn describes_triple(&self) -> Triple {
        Triple::uris(&self.rem_uri, &vocab().describes, &self.agg_uri)
    }

    /// Objects of `(subject, predicate, _)`.
    pub fn objects<'a>(&'a self, subject: &'a Term, predicate: &'a Uri) -> impl Iterator<Item = &'a Term> + 'a {
        self.triples
            .iter()
            .filter(move |t| t.subject() == subject && t.predicate() == predicate)
            .map(Triple::object)
    }

    pub fn with_predicate<'a>(&'a self, predicate: &'a Uri) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples.iter().filter(move |t| t.predicate() == predicate)
    }

    /// URIs aggregated by the graph's Aggregation, in set order.
    pub fn aggregated(&self) -> impl Iterator<Item = &Uri> + '_ {
        let agg = Term::uri(self.agg_uri.clone());
        let v = vocab();
        self.triples
            .iter()
            .filter(move |t| t.subject() == &agg && t.predicate() == &v.aggregates)
            .filter_map(|t| t.object().as_uri())
    }

    pub fn aggregates(&self, resource: &Uri) -> bool {
        self.triples
            .contains(&Triple::uris(&self.agg_uri, &vocab().aggregates, resource))
    }

    /// Inserts a triple, returning false if it was already present.
    ///
    /// Connectedness is not checked here; see [`OreGraph::is_connected`].
    pub fn add_triple(&mut self, triple: Triple) -> Result<bool, ModelError> {
        let v = vocab();
        if triple.predicate() == &v.describes {
            return Err(ModelError::DescribesImmutable);
        }
        if let Term::Blank { label } = triple.subject() {
            if triple.predicate() == &v.rdf_type
                && vocab::identity_classes().iter().any(|c| triple.object().is_uri(c))
            {
                return Err(ModelError::BlankIdentity(format!("_:{}", label.as_str())));
            }
        }
        Ok(self.triples.insert(triple))
    }

    /// Removes a triple. The `ore:describes` anchor cannot be removed.
    pub fn remove_triple(&mut self, triple: &Triple) -> bool {
        if *triple == self.describes_triple() {
            return false;
        }
        self.triples.remove(triple)
    }

    /// Mints a Proxy for `proxy_for` in the context of `proxy_in`.
    pub fn create_proxy(&mut self, proxy_uri: &Uri, proxy_for: &Uri, proxy_in: &Uri) -> Result<(), ModelError> {
        let v = vocab();
        require_http(proxy_uri)?;
        if !self
            .triples
            .contains(&Triple::uris(proxy_in, &v.aggregates, proxy_for))
        {
            return Err(ModelError::NotAggregated {
                resource: proxy_for.clone(),
                aggregation: proxy_in.clone(),
            });
        }
        if proxy_uri == proxy_for || proxy_uri == proxy_in {
            return Err(ModelError::IdentityClash(format!(
                "proxy {proxy_uri} must differ from its target and aggregation"
            )));
        }
        if let Some(existing) = self.proxy_for_pair(proxy_for, proxy_in) {
            return Err(ModelError::DuplicateProxy {
                existing,
                proxy_for: proxy_for.clone(),
                proxy_in: proxy_in.clone(),
            });
        }
        self.triples.insert(Triple::uris(proxy_uri, &v.proxy_for, proxy_for));
        self.triples.insert(Triple::uris(proxy_uri, &v.proxy_in, proxy_in));
        self.triples.insert(Triple::uris(proxy_uri, &v.rdf_type, &v.proxy_class));
        Ok(())
    }

    /// The existing proxy, if any, for a `(proxy_for, proxy_in)` pair.
    pub fn proxy_for_pair(&self, proxy_for: &Uri, proxy_in: &Uri) -> Option<Uri> {
        let v = vocab();
        let target = Term::uri(proxy_for.clone());
        self.with_predicate(&v.proxy_for)
            .filter(|t| t.object() == &target)
            .filter_map(|t| t.subject().as_uri())
            .find(|p| {
                self.triples
                    .contains(&Triple::uris(p, &v.proxy_in, proxy_in))
            })
            .cloned()
    }

    /// Records that an aggregated resource is itself an Aggregation described
    /// by `nested_rem`.
    pub fn mark_nested(&mut self, resource: &Uri, nested_rem: &Uri) -> Result<(), ModelError> {
        if !self.aggregates(resource) {
            return Err(ModelError::NotAggregated {
                resource: resource.clone(),
                aggregation: self.agg_uri.clone(),
            });
        }
        require_http(nested_rem)?;
        self.triples
            .insert(Triple::uris(resource, &vocab().is_described_by, nested_rem));
        Ok(())
    }

    /// Links the Aggregation to a comparable resource. Non-protocol URIs such
    /// as `info:doi/...` are allowed.
    pub fn add_similar_to(&mut self, other: &str) -> Result<(), ModelError> {
        let other = Uri::parse(other)?;
        self.triples
            .insert(Triple::uris(&self.agg_uri, &vocab().similar_to, &other));
        Ok(())
    }

    /// Closure under the inverse and subproperty tables. The input is left
    /// untouched.
    pub fn infer(&self) -> OreGraph {
        let mut closed = self.triples.clone();
        let mut queue: VecDeque<Triple> = self.triples.iter().cloned().collect();
        while let Some(t) = queue.pop_front() {
            let mut derived = Vec::with_capacity(2);
            if let (Some(inverse), Term::Uri { .. }) = (vocab::inverse_of(t.predicate()), t.object()) {
                derived.push(
                    Triple::new(t.object().clone(), inverse.clone(), t.subject().clone())
                        .expect("object is a URI"),
                );
            }
            if let Some(sup) = vocab::super_property_of(t.predicate()) {
                derived.push(
                    Triple::new(t.subject().clone(), sup.clone(), t.object().clone())
                        .expect("subject unchanged"),
                );
            }
            for d in derived {
                if closed.insert(d.clone()) {
                    queue.push_back(d);
                }
            }
        }
        OreGraph {
            rem_uri: self.rem_uri.clone(),
            agg_uri: self.agg_uri.clone(),
            triples: closed,
        }
    }

    /// True if every URI or blank node is reachable from the Aggregation when
    /// triples are treated as undirected edges. Literals hang off their
    /// subject and never disconnect anything.
    pub fn is_connected(&self) -> bool {
        let mut adjacency: HashMap<&Term, Vec<&Term>> = HashMap::new();
        for t in &self.triples {
            adjacency.entry(t.subject()).or_default();
            if t.object().is_node() {
                adjacency.entry(t.subject()).or_default().push(t.object());
                adjacency.entry(t.object()).or_default().push(t.subject());
            }
        }
        let root = Term::uri(self.agg_uri.clone());
        if !adjacency.contains_key(&root) {
            return adjacency.is_empty();
        }
        let mut seen = std::collections::HashSet::new();
        let mut queue = VecDeque::from([&root]);
        seen.insert(&root);
        while let Some(node) = queue.pop_front() {
            for next in &adjacency[node] {
                if seen.insert(*next) {
                    queue.push_back(*next);
                }
            }
        }
        seen.len() == adjacency.len()
    }

    /// A copy with the Resource Map renamed, e.g. to publish the same
    /// description under a second serialization.
    pub fn with_rem_uri(&self, rem_uri: &Uri) -> Result<OreGraph, ModelError> {
        if self.triples.iter().any(|t| t.subject().is_uri(rem_uri) || t.object().is_uri(rem_uri)) {
            return Err(ModelError::IdentityClash(format!("{rem_uri} already occurs in the graph")));
        }
        let old = Term::uri(self.rem_uri.clone());
        let new = Term::uri(rem_uri.clone());
        let triples = self
            .triples
            .iter()
            .map(|t| t.map_terms(|term| if *term == old { new.clone() } else { term.clone() }))
            .collect();
        Ok(OreGraph {
            rem_uri: rem_uri.clone(),
            agg_uri: self.agg_uri.clone(),
            triples,
        })
    }
}

fn require_http(uri: &Uri) -> Result<(), ModelError> {
    if uri.is_http() {
        Ok(())
    } else {
        Err(ModelError::NotHttp(uri.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{BlankId, Literal};

    fn u(s: &str) -> Uri {
        Uri::parse(&format!("http://example.org/{s}")).unwrap()
    }

    fn fig2_base() -> OreGraph {
        OreGraph::new_aggregation(&u("ReM-1"), &u("A-1"), &[u("AR-1"), u("AR-2"), u("AR-3")]).unwrap()
    }

    #[test]
    fn new_aggregation_shapes() {
        let v = vocab();
        let g = fig2_base();
        assert_eq!(g.with_predicate(&v.describes).count(), 1);
        assert_eq!(g.with_predicate(&v.aggregates).count(), 3);
        assert_eq!(g.with_predicate(&v.rdf_type).count(), 2);
        assert_eq!(g.len(), 6);

        let empty = OreGraph::new_aggregation(&u("ReM-1"), &u("A-1"), &[]).unwrap();
        assert_eq!(empty.with_predicate(&v.aggregates).count(), 0);

        let dup = OreGraph::new_aggregation(&u("ReM-1"), &u("A-1"), &[u("AR-1"), u("AR-1")]).unwrap();
        assert_eq!(dup.with_predicate(&v.aggregates).count(), 1);
    }

    #[test]
    fn new_aggregation_errors() {
        assert!(matches!(
            OreGraph::new_aggregation(&u("X"), &u("X"), &[]),
            Err(ModelError::IdentityClash(_))
        ));
        assert!(matches!(
            OreGraph::new_aggregation(&u("R"), &u("A"), &[u("A")]),
            Err(ModelError::IdentityClash(_))
        ));
        let doi = Uri::parse("info:doi/10.1/x").unwrap();
        assert!(matches!(
            OreGraph::new_aggregation(&u("R"), &doi, &[]),
            Err(ModelError::NotHttp(_))
        ));
    }

    #[test]
    fn add_triple_rules() {
        let v = vocab();
        let mut g = fig2_base();
        let creator = Triple::new(u("ReM-1"), v.creator.clone(), Literal::plain("Libraries of the LANL").unwrap()).unwrap();
        assert_eq!(g.add_triple(creator.clone()), Ok(true));
        assert_eq!(g.add_triple(creator), Ok(false));
        assert_eq!(g.len(), 7);

        assert_eq!(
            g.add_triple(Triple::uris(&u("ReM-2"), &v.describes, &u("A-2"))),
            Err(ModelError::DescribesImmutable)
        );
        let blank = Triple::new(BlankId::new("x").unwrap(), v.rdf_type.clone(), v.proxy_class.clone()).unwrap();
        assert!(matches!(g.add_triple(blank), Err(ModelError::BlankIdentity(_))));
    }

    #[test]
    fn proxies() {
        let mut g = fig2_base();
        g.create_proxy(&u("P-1"), &u("AR-1"), &u("A-1")).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.proxy_for_pair(&u("AR-1"), &u("A-1")), Some(u("P-1")));
        assert!(matches!(
            g.create_proxy(&u("P-9"), &u("AR-9"), &u("A-1")),
            Err(ModelError::NotAggregated { .. })
        ));
        assert!(matches!(
            g.create_proxy(&u("P-2"), &u("AR-1"), &u("A-1")),
            Err(ModelError::DuplicateProxy { .. })
        ));
        assert!(matches!(
            g.create_proxy(&u("AR-2"), &u("AR-2"), &u("A-1")),
            Err(ModelError::IdentityClash(_))
        ));
    }

    #[test]
    fn nesting_and_similarity() {
        let v = vocab();
        let mut g = fig2_base();
        g.mark_nested(&u("AR-2"), &u("ReM-2")).unwrap();
        g.mark_nested(&u("AR-2"), &u("ReM-2")).unwrap();
        g.mark_nested(&u("AR-2"), &u("ReM-2b")).unwrap();
        assert_eq!(g.with_predicate(&v.is_described_by).count(), 2);
        assert!(matches!(g.mark_nested(&u("AR-9"), &u("ReM-9")), Err(ModelError::NotAggregated { .. })));

        g.add_similar_to("info:doi/10.1086/503091").unwrap();
        assert_eq!(g.with_predicate(&v.similar_to).count(), 1);
        assert!(matches!(g.add_similar_to("not a uri"), Err(ModelError::BadUri(_))));
    }

    #[test]
    fn infer_adds_inverses_and_superproperties() {
        let v = vocab();
        let mut g = fig2_base();
        g.mark_nested(&u("AR-2"), &u("ReM-2")).unwrap();
        let closed = g.infer();
        assert!(closed.contains(&Triple::uris(&u("AR-1"), &v.is_aggregated_by, &u("A-1"))));
        assert!(closed.contains(&Triple::uris(&u("A-1"), &v.has_part, &u("AR-1"))));
        assert!(closed.contains(&Triple::uris(&u("ReM-2"), &v.describes, &u("AR-2"))));
        assert!(closed.contains(&Triple::uris(&u("AR-2"), &v.see_also, &u("ReM-2"))));
        assert_eq!(closed.infer(), closed);
        assert!(g.triples().is_subset(closed.triples()));
        // input untouched
        assert!(!g.contains(&Triple::uris(&u("AR-1"), &v.is_aggregated_by, &u("A-1"))));
    }

    #[test]
    fn connectivity() {
        let v = vocab();
        let mut g = fig2_base();
        assert!(g.is_connected());
        let only_describes = OreGraph::new_aggregation(&u("R"), &u("A"), &[]).unwrap();
        assert!(only_describes.is_connected());
        g.add_triple(Triple::new(u("X"), v.creator.clone(), Literal::plain("Y").unwrap()).unwrap())
            .unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn from_triples_needs_one_describes() {
        let v = vocab();
        assert_eq!(OreGraph::from_triples(vec![]), Err(ModelError::NoDescribes));
        let two = vec![
            Triple::uris(&u("R"), &v.describes, &u("A")),
            Triple::uris(&u("R"), &v.describes, &u("B")),
        ];
        assert_eq!(OreGraph::from_triples(two), Err(ModelError::AmbiguousDescribes(2)));
        let g = OreGraph::from_triples(fig2_base().triples().clone()).unwrap();
        assert_eq!(g, fig2_base());
    }

    #[test]
    fn rem_renaming() {
        let g = fig2_base();
        let renamed = g.with_rem_uri(&u("ReM-1.atom")).unwrap();
        assert_eq!(renamed.rem_uri(), &u("ReM-1.atom"));
        assert_eq!(renamed.len(), g.len());
        assert!(g.with_rem_uri(&u("AR-1")).is_err());
    }
}
