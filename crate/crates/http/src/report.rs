//! JSON form of a crawl, shared by the CLI and the `/crawl` endpoint.

use ore_core::{Term, Triple, WireFormat};
use serde::Serialize;

use crate::crawl::{CrawlEdge, CrawlError, CrawlResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrawlReport<'a> {
    pub nodes: Vec<NodeReport<'a>>,
    pub edges: Vec<&'a CrawlEdge>,
    pub errors: Vec<&'a CrawlError>,
    pub truncated: bool,
    pub fetches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeReport<'a> {
    pub agg_uri: &'a str,
    pub rem_uri: &'a str,
    pub fetched_from: &'a str,
    pub format: WireFormat,
    pub depth: usize,
    pub authoritative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub authority_reason: Option<&'a str>,
    pub triples: Vec<[TermReport<'a>; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TermReport<'a> {
    Uri {
        value: &'a str,
    },
    Blank {
        value: &'a str,
    },
    Literal {
        value: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        language: Option<&'a str>,
        #[serde(skip_serializing_if = "Option::is_none")]
        datatype: Option<&'a str>,
    },
}

impl<'a> TermReport<'a> {
    pub fn of(term: &'a Term) -> TermReport<'a> {
        if let Some(uri) = term.as_uri() {
            TermReport::Uri { value: uri.as_str() }
        } else if let Some(blank) = term.as_blank() {
            TermReport::Blank { value: blank.as_str() }
        } else {
            let literal = term.as_literal().expect("a term is a URI, blank node or literal");
            TermReport::Literal {
                value: literal.lexical(),
                language: literal.language(),
                datatype: literal.datatype().map(|d| d.as_str()),
            }
        }
    }
}

fn triple(t: &Triple) -> [TermReport<'_>; 3] {
    let predicate = TermReport::Uri {
        value: t.predicate().as_str(),
    };
    [TermReport::of(t.subject()), predicate, TermReport::of(t.object())]
}

impl CrawlResult {
    pub fn to_json(&self) -> CrawlReport<'_> {
        CrawlReport {
            nodes: self
                .nodes
                .values()
                .map(|n| NodeReport {
                    agg_uri: n.agg_uri.as_str(),
                    rem_uri: n.rem_uri.as_str(),
                    fetched_from: n.fetched_from.as_str(),
                    format: n.format,
                    depth: n.depth,
                    authoritative: n.authoritative,
                    authority_reason: n.authority_reason.as_deref(),
                    triples: n.graph.triples().iter().map(triple).collect(),
                })
                .collect(),
            edges: self.edges.iter().collect(),
            errors: self.errors.iter().collect(),
            truncated: self.truncated,
            fetches: self.fetches,
        }
    }
}
