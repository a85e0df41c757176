//! Namespaces and the closed set of predicates and classes used by the model.
//!
//! `ore:similarTo` sits between `rdfs:seeAlso` and `owl:sameAs` in how strong
//! a claim it makes. That is a documentation note only; no inference rule is
//! attached to it.

use std::sync::LazyLock;

use crate::uri::Uri;

pub const ORE: &str = "http://www.openarchives.org/ore/terms/";
pub const DCTERMS: &str = "http://purl.org/dc/terms/";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const ATOM: &str = "http://www.w3.org/2005/Atom";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
/// Local stand-in namespace for the Foresite ordering predicate.
pub const FST: &str = "http://example.org/foresite/terms/";

/// Prefixes always declared on emitted documents, sorted by prefix.
pub const FIXED_PREFIXES: &[(&str, &str)] = &[
    ("atom", ATOM),
    ("dcterms", DCTERMS),
    ("fst", FST),
    ("ore", ORE),
    ("owl", OWL),
    ("rdf", RDF),
    ("rdfs", RDFS),
];

pub struct Vocabulary {
    pub describes: Uri,
    pub is_described_by: Uri,
    pub aggregates: Uri,
    pub is_aggregated_by: Uri,
    pub similar_to: Uri,
    pub proxy_for: Uri,
    pub proxy_in: Uri,
    /// Link relation naming a proxy's aggregation in HTTP `Link` headers.
    pub aggregation_rel: Uri,
    pub aggregation_class: Uri,
    pub resource_map_class: Uri,
    pub proxy_class: Uri,
    pub has_part: Uri,
    pub creator: Uri,
    pub created: Uri,
    pub modified: Uri,
    pub title: Uri,
    pub references: Uri,
    pub see_also: Uri,
    pub same_as: Uri,
    pub rdf_type: Uri,
    pub followed_by: Uri,
}

fn uri(ns: &str, local: &str) -> Uri {
    Uri::parse(&format!("{ns}{local}")).expect("vocabulary URIs are valid")
}

static VOCAB: LazyLock<Vocabulary> = LazyLock::new(|| Vocabulary {
    describes: uri(ORE, "describes"),
    is_described_by: uri(ORE, "isDescribedBy"),
    aggregates: uri(ORE, "aggregates"),
    is_aggregated_by: uri(ORE, "isAggregatedBy"),
    similar_to: uri(ORE, "similarTo"),
    proxy_for: uri(ORE, "proxyFor"),
    proxy_in: uri(ORE, "proxyIn"),
    aggregation_rel: uri(ORE, "aggregation"),
    aggregation_class: uri(ORE, "Aggregation"),
    resource_map_class: uri(ORE, "ResourceMap"),
    proxy_class: uri(ORE, "Proxy"),
    has_part: uri(DCTERMS, "hasPart"),
    creator: uri(DCTERMS, "creator"),
    created: uri(DCTERMS, "created"),
    modified: uri(DCTERMS, "modified"),
    title: uri(DCTERMS, "title"),
    references: uri(DCTERMS, "references"),
    see_also: uri(RDFS, "seeAlso"),
    same_as: uri(OWL, "sameAs"),
    rdf_type: uri(RDF, "type"),
    followed_by: uri(FST, "followedBy"),
});

pub fn vocab() -> &'static Vocabulary {
    &VOCAB
}

static INVERSES: LazyLock<[(Uri, Uri); 2]> = LazyLock::new(|| {
    let v = vocab();
    [
        (v.aggregates.clone(), v.is_aggregated_by.clone()),
        (v.describes.clone(), v.is_described_by.clone()),
    ]
});

static SUBPROPERTIES: LazyLock<[(Uri, Uri); 2]> = LazyLock::new(|| {
    let v = vocab();
    [
        (v.aggregates.clone(), v.has_part.clone()),
        (v.is_described_by.clone(), v.see_also.clone()),
    ]
});

/// Pairs of mutually inverse predicates.
pub fn inverse_pairs() -> &'static [(Uri, Uri)] {
    &INVERSES[..]
}

/// `(sub, super)` pairs.
pub fn subproperty_pairs() -> &'static [(Uri, Uri)] {
    &SUBPROPERTIES[..]
}

pub fn inverse_of(predicate: &Uri) -> Option<&'static Uri> {
    inverse_pairs().iter().find_map(|(a, b)| {
        if a == predicate {
            Some(b)
        } else if b == predicate {
            Some(a)
        } else {
            None
        }
    })
}

pub fn super_property_of(predicate: &Uri) -> Option<&'static Uri> {
    subproperty_pairs()
        .iter()
        .find_map(|(sub, sup)| (sub == predicate).then_some(sup))
}

/// Classes whose instances must be named by HTTP URIs.
pub fn identity_classes() -> [&'static Uri; 3] {
    let v = vocab();
    [&v.aggregation_class, &v.resource_map_class, &v.proxy_class]
}

/// Splits a URI into a namespace and an XML local name, if it has one.
pub fn split_qname(uri: &str) -> Option<(&str, &str)> {
    let start = uri
        .char_indices()
        .rev()
        .take_while(|&(_, c)| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        .last()
        .map(|(i, _)| i)?;
    // The local part must start with a letter or underscore.
    let offset = uri[start..].find(|c: char| c.is_alphabetic() || c == '_')?;
    let split = start + offset;
    if split == 0 {
        return None;
    }
    Some((&uri[..split], &uri[split..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_table_is_symmetric() {
        for (a, b) in inverse_pairs() {
            assert_eq!(inverse_of(a), Some(b));
            assert_eq!(inverse_of(b), Some(a));
        }
    }

    #[test]
    fn subproperty_table_is_acyclic() {
        for (sub, _) in subproperty_pairs() {
            let mut seen = vec![sub.clone()];
            let mut cur = sub;
            while let Some(next) = super_property_of(cur) {
                assert!(!seen.contains(next), "cycle through {next}");
                seen.push(next.clone());
                cur = next;
            }
        }
    }

    #[test]
    fn qname_splitting() {
        assert_eq!(split_qname("http://purl.org/dc/terms/title"), Some(("http://purl.org/dc/terms/", "title")));
        assert_eq!(split_qname("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), Some(("http://www.w3.org/1999/02/22-rdf-syntax-ns#", "type")));
        assert_eq!(split_qname("http://example.org/p-1"), Some(("http://example.org/", "p-1")));
        assert_eq!(split_qname("http://example.org/12a"), Some(("http://example.org/12", "a")));
        assert_eq!(split_qname("http://example.org/123"), None);
        assert_eq!(split_qname("http://example.org/"), None);
    }
}
