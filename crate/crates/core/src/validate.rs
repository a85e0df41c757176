//! Structural checks over an [`OreGraph`].
//!
//! Finding codes are a stable public contract: tools match on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::OreGraph;
use crate::term::Term;
use crate::vocab::{self, vocab};

pub const DESCRIBES_COUNT: &str = "DESCRIBES_COUNT";
pub const AGGREGATES_MIN: &str = "AGGREGATES_MIN";
pub const CONNECTED: &str = "CONNECTED";
pub const PROXY_TARGET: &str = "PROXY_TARGET";
pub const IDENTITY_HTTP: &str = "IDENTITY_HTTP";
pub const BLANK_IDENTITY: &str = "BLANK_IDENTITY";
pub const SELF_SIMILAR: &str = "SELF_SIMILAR";
pub const REM_MODIFIED_MISSING: &str = "REM_MODIFIED_MISSING";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Strict,
    Lax,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Level::Strict),
            "lax" => Ok(Level::Lax),
            other => Err(format!("unknown validation level {other:?}")),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Strict => "strict",
            Level::Lax => "lax",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub code: String,
    pub severity: Severity,
    pub subject: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub level: Level,
    pub valid: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn has(&self, code: &str) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn has_error(&self, code: &str) -> bool {
        self.errors().any(|f| f.code == code)
    }

    /// One-line summary of the error findings.
    pub fn error_summary(&self) -> String {
        self.errors()
            .map(|f| format!("{}: {}", f.code, f.message))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

struct Collector {
    findings: Vec<Finding>,
}

impl Collector {
    fn push(&mut self, code: &str, severity: Severity, subject: Option<&Term>, message: String) {
        self.findings.push(Finding {
            code: code.to_owned(),
            severity,
            subject: subject.map(term_label),
            message,
        });
    }
}

fn term_label(term: &Term) -> String {
    match term {
        Term::Uri { value } => value.to_string(),
        other => other.to_string(),
    }
}

pub fn validate(graph: &OreGraph, level: Level) -> ValidationReport {
    let v = vocab();
    let mut out = Collector { findings: Vec::new() };
    let rem = Term::uri(graph.rem_uri().clone());
    let agg = Term::uri(graph.agg_uri().clone());

    let describes: Vec<_> = graph
        .with_predicate(&v.describes)
        .filter(|t| t.subject() == &rem)
        .collect();
    if describes.len() != 1 || describes[0].object() != &agg {
        out.push(
            DESCRIBES_COUNT,
            Severity::Error,
            Some(&rem),
            format!(
                "resource map must describe exactly one aggregation, found {} ore:describes triples",
                describes.len()
            ),
        );
    }

    let aggregated: Vec<&Term> = graph.objects(&agg, &v.aggregates).collect();
    if aggregated.is_empty() {
        let severity = match level {
            Level::Strict => Severity::Error,
            Level::Lax => Severity::Warning,
        };
        out.push(AGGREGATES_MIN, severity, Some(&agg), "aggregation has no aggregated resources".into());
    }

    if !graph.is_connected() {
        out.push(
            CONNECTED,
            Severity::Error,
            Some(&agg),
            "triples do not form a single connected graph".into(),
        );
    }

    check_proxies(graph, &mut out);
    check_identities(graph, &aggregated, &mut out);

    if graph.contains(&crate::term::Triple::uris(graph.agg_uri(), &v.similar_to, graph.agg_uri())) {
        out.push(
            SELF_SIMILAR,
            Severity::Warning,
            Some(&agg),
            "aggregation is ore:similarTo itself".into(),
        );
    }

    if level == Level::Strict && graph.objects(&rem, &v.modified).next().is_none() {
        out.push(
            REM_MODIFIED_MISSING,
            Severity::Warning,
            Some(&rem),
            "resource map has no dcterms:modified".into(),
        );
    }

    let valid = !out.findings.iter().any(|f| f.severity == Severity::Error);
    ValidationReport {
        level,
        valid,
        findings: out.findings,
    }
}

fn check_proxies(graph: &OreGraph, out: &mut Collector) {
    let v = vocab();
    let proxy_class = Term::uri(v.proxy_class.clone());
    let mut proxies: BTreeSet<&Term> = BTreeSet::new();
    for t in graph.triples() {
        if t.predicate() == &v.proxy_for
            || t.predicate() == &v.proxy_in
            || (t.predicate() == &v.rdf_type && t.object() == &proxy_class)
        {
            proxies.insert(t.subject());
        }
    }

    let mut by_pair: BTreeMap<(&Term, &Term), Vec<&Term>> = BTreeMap::new();
    for proxy in proxies {
        let fors: Vec<&Term> = graph.objects(proxy, &v.proxy_for).collect();
        let ins: Vec<&Term> = graph.objects(proxy, &v.proxy_in).collect();
        let (target, context) = match (fors.as_slice(), ins.as_slice()) {
            ([target], [context]) => (*target, *context),
            _ => {
                out.push(
                    PROXY_TARGET,
                    Severity::Error,
                    Some(proxy),
                    format!(
                        "proxy needs exactly one ore:proxyFor and one ore:proxyIn, found {} and {}",
                        fors.len(),
                        ins.len()
                    ),
                );
                continue;
            }
        };
        let aggregated = match (context, target) {
            (Term::Uri { value: c }, Term::Uri { value: r }) => graph.contains(&crate::term::Triple::uris(c, &v.aggregates, r)),
            _ => false,
        };
        if !aggregated {
            out.push(
                PROXY_TARGET,
                Severity::Error,
                Some(proxy),
                format!("{context} does not aggregate {target} in this resource map"),
            );
        }
        if proxy == target || proxy == context {
            out.push(
                PROXY_TARGET,
                Severity::Error,
                Some(proxy),
                "proxy URI must differ from its target and aggregation".into(),
            );
        }
        by_pair.entry((target, context)).or_default().push(proxy);
    }
    for ((target, context), proxies) in by_pair {
        for extra in proxies.iter().skip(1) {
            out.push(
                PROXY_TARGET,
                Severity::Error,
                Some(extra),
                format!("second proxy for {target} in {context}"),
            );
        }
    }
}

fn check_identities(graph: &OreGraph, aggregated: &[&Term], out: &mut Collector) {
    let v = vocab();
    // role name per identity term; BTreeMap keeps the report order stable
    let mut identities: BTreeMap<Term, &'static str> = BTreeMap::new();
    identities.insert(Term::uri(graph.rem_uri().clone()), "resource map");
    identities.insert(Term::uri(graph.agg_uri().clone()), "aggregation");
    for r in aggregated {
        identities.entry((*r).clone()).or_insert("aggregated resource");
    }
    let classes = vocab::identity_classes();
    for t in graph.triples() {
        if t.predicate() == &v.proxy_for || t.predicate() == &v.proxy_in {
            identities.entry(t.subject().clone()).or_insert("proxy");
        }
        if t.predicate() == &v.rdf_type && classes.iter().any(|c| t.object().is_uri(c)) {
            identities.entry(t.subject().clone()).or_insert("typed identity");
        }
    }
    for (term, role) in &identities {
        match term {
            Term::Uri { value } if !value.is_http() => out.push(
                IDENTITY_HTTP,
                Severity::Error,
                Some(term),
                format!("{role} {value} is not an http(s) URI"),
            ),
            Term::Uri { .. } => {}
            Term::Blank { .. } => out.push(
                BLANK_IDENTITY,
                Severity::Error,
                Some(term),
                format!("{role} is a blank node"),
            ),
            Term::Literal { .. } => out.push(
                IDENTITY_HTTP,
                Severity::Error,
                Some(term),
                format!("{role} is a literal, not a URI"),
            ),
        }
    }
}

/// Convenience for callers that only need a yes/no answer with a reason.
pub fn ensure_valid(graph: &OreGraph, level: Level) -> Result<(), crate::graph::ModelError> {
    let report = validate(graph, level);
    if report.valid {
        Ok(())
    } else {
        Err(crate::graph::ModelError::InvalidGraph(report.error_summary()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Literal, Triple};
    use crate::uri::Uri;

    fn u(s: &str) -> Uri {
        Uri::parse(&format!("http://example.org/{s}")).unwrap()
    }

    fn fig2() -> OreGraph {
        let v = vocab();
        let mut g = OreGraph::new_aggregation(&u("ReM-1"), &u("A-1"), &[u("AR-1"), u("AR-2"), u("AR-3")]).unwrap();
        g.add_triple(Triple::new(u("ReM-1"), v.creator.clone(), Literal::plain("Libraries of the LANL").unwrap()).unwrap())
            .unwrap();
        g.add_triple(Triple::new(u("ReM-1"), v.modified.clone(), Literal::plain("2008-10-01T00:00:00Z").unwrap()).unwrap())
            .unwrap();
        g
    }

    #[test]
    fn fig2_is_clean() {
        let report = validate(&fig2(), Level::Strict);
        assert!(report.valid);
        assert!(report.findings.is_empty(), "{:?}", report.findings);
    }

    #[test]
    fn empty_aggregation() {
        let g = OreGraph::new_aggregation(&u("R"), &u("A"), &[]).unwrap();
        let strict = validate(&g, Level::Strict);
        assert!(!strict.valid);
        assert!(strict.has_error(AGGREGATES_MIN));
        assert!(strict.has(REM_MODIFIED_MISSING));
        let lax = validate(&g, Level::Lax);
        assert!(lax.valid);
        assert!(lax.has(AGGREGATES_MIN) && !lax.has_error(AGGREGATES_MIN));
        assert!(!lax.has(REM_MODIFIED_MISSING));
    }

    #[test]
    fn proxy_target_fires_after_deleting_aggregates() {
        let v = vocab();
        let mut g = fig2();
        g.create_proxy(&u("P-1"), &u("AR-1"), &u("A-1")).unwrap();
        assert!(!validate(&g, Level::Strict).has(PROXY_TARGET));
        assert!(g.remove_triple(&Triple::uris(&u("A-1"), &v.aggregates, &u("AR-1"))));
        let report = validate(&g, Level::Strict);
        assert!(report.has_error(PROXY_TARGET));
        assert!(!report.valid);
    }

    #[test]
    fn self_similar_is_a_warning() {
        let mut g = fig2();
        g.add_similar_to("http://example.org/A-1").unwrap();
        let report = validate(&g, Level::Lax);
        assert!(report.valid);
        assert!(report.has(SELF_SIMILAR));
    }

    #[test]
    fn disconnected_and_identity_errors() {
        let v = vocab();
        let mut g = fig2();
        g.add_triple(Triple::new(u("X"), v.creator.clone(), Literal::plain("Y").unwrap()).unwrap())
            .unwrap();
        assert!(validate(&g, Level::Lax).has_error(CONNECTED));

        let mut g = fig2();
        let doi = Uri::parse("info:doi/10.1/x").unwrap();
        g.add_triple(Triple::uris(&u("A-1"), &v.aggregates, &doi)).unwrap();
        assert!(validate(&g, Level::Lax).has_error(IDENTITY_HTTP));

        let mut g = fig2();
        let b = crate::term::BlankId::new("b").unwrap();
        g.add_triple(Triple::new(u("A-1"), v.aggregates.clone(), b).unwrap()).unwrap();
        assert!(validate(&g, Level::Lax).has_error(BLANK_IDENTITY));
    }

    #[test]
    fn reports_are_deterministic() {
        let g = OreGraph::new_aggregation(&u("R"), &u("A"), &[]).unwrap();
        let a = serde_json::to_string(&validate(&g, Level::Strict)).unwrap();
        let b = serde_json::to_string(&validate(&g.clone(), Level::Strict)).unwrap();
        assert_eq!(a, b);
    }
}
