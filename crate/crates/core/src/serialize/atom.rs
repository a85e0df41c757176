//! Atom entry profile.
//!
//! The entry carries the aggregation as `atom:id`, the resource map as the
//! `self` link and one `atom:link` per aggregated resource. `atom:title` and
//! `atom:updated` stand in for `dcterms:title` on the aggregation and
//! `dcterms:modified` on the resource map when that can be done without
//! loss. Every other triple goes verbatim, as RDF/XML, into `ore:triples`.

use std::collections::BTreeSet;

use super::rdfxml::{write_descriptions, Context, Parser, Prefixes};
use super::xml::{self, Element};
use super::{check_format, WireDocument, WireError, WireFormat};
use crate::graph::OreGraph;
use crate::term::{Literal, Term, Triple};
use crate::uri::Uri;
use crate::validate::{validate, Level};
use crate::vocab::{vocab, ATOM, ORE};

/// `atom:updated` value used when the resource map has no usable
/// `dcterms:modified`.
pub const UPDATED_PLACEHOLDER: &str = "1970-01-01T00:00:00Z";

pub fn to_atom(graph: &OreGraph) -> Result<WireDocument, WireError> {
    to_atom_with_warnings(graph).map(|(doc, _)| doc)
}

/// Like [`to_atom`], also returning serializer warnings (such as the
/// placeholder `atom:updated`).
pub fn to_atom_with_warnings(graph: &OreGraph) -> Result<(WireDocument, Vec<String>), WireError> {
    let report = validate(graph, Level::Lax);
    if !report.valid {
        return Err(WireError::InvalidGraph(report.error_summary()));
    }
    let v = vocab();
    let agg = Term::uri(graph.agg_uri().clone());
    let rem = Term::uri(graph.rem_uri().clone());
    let mut warnings = Vec::new();

    let mut residual: BTreeSet<Triple> = graph.triples().clone();
    residual.remove(&graph.describes_triple());

    let mut members = Vec::new();
    for t in graph.triples() {
        if t.subject() == &agg && t.predicate() == &v.aggregates {
            if let Some(member) = t.object().as_uri() {
                members.push(member.clone());
                residual.remove(t);
            }
        }
    }

    let titles: Vec<&Triple> = graph.triples().iter().filter(|t| t.subject() == &agg && t.predicate() == &v.title).collect();
    let title = match titles.as_slice() {
        [t] if native_title(t, graph.agg_uri()) => {
            residual.remove(*t);
            t.object().as_literal().expect("checked").lexical().to_owned()
        }
        _ => titles
            .iter()
            .find_map(|t| t.object().as_literal())
            .map(|l| l.lexical().to_owned())
            .unwrap_or_else(|| graph.agg_uri().to_string()),
    };

    let modified: Vec<&Triple> = graph.triples().iter().filter(|t| t.subject() == &rem && t.predicate() == &v.modified).collect();
    let updated = match modified.as_slice() {
        [t] if native_updated(t) => {
            residual.remove(*t);
            t.object().as_literal().expect("checked").lexical().to_owned()
        }
        _ => {
            let derived = modified
                .iter()
                .filter_map(|t| t.object().as_literal())
                .find_map(|l| as_atom_date(l.lexical()));
            match derived {
                Some(d) => d,
                None => {
                    warnings.push(format!(
                        "{} has no usable dcterms:modified; atom:updated set to {UPDATED_PLACEHOLDER}",
                        graph.rem_uri()
                    ));
                    UPDATED_PLACEHOLDER.to_owned()
                }
            }
        }
    };

    let prefixes = Prefixes::for_triples(residual.iter())?;
    let mut out = String::from(xml::DECLARATION);
    let mut attrs = prefixes.declarations();
    xml::open_tag(&mut out, 0, "atom:entry", &mut attrs);
    out.push_str(">\n");
    text_element(&mut out, "atom:id", graph.agg_uri().as_str());
    text_element(&mut out, "atom:title", &title);
    text_element(&mut out, "atom:updated", &updated);
    let rel = format!("{ORE}aggregates");
    for member in &members {
        let mut attrs = vec![("href".to_owned(), member.to_string()), ("rel".to_owned(), rel.clone())];
        xml::open_tag(&mut out, 1, "atom:link", &mut attrs);
        out.push_str("/>\n");
    }
    let mut attrs = vec![("href".to_owned(), graph.rem_uri().to_string()), ("rel".to_owned(), "self".to_owned())];
    xml::open_tag(&mut out, 1, "atom:link", &mut attrs);
    out.push_str("/>\n");
    if !residual.is_empty() {
        xml::push_indent(&mut out, 1);
        out.push_str("<ore:triples>\n");
        write_descriptions(&residual, &prefixes, 2, &mut out)?;
        xml::push_indent(&mut out, 1);
        out.push_str("</ore:triples>\n");
    }
    out.push_str("</atom:entry>\n");
    Ok((WireDocument::new(WireFormat::Atom, out), warnings))
}

fn text_element(out: &mut String, name: &str, text: &str) {
    xml::push_indent(out, 1);
    out.push('<');
    out.push_str(name);
    out.push('>');
    xml::escape_text(text, out);
    out.push_str("</");
    out.push_str(name);
    out.push_str(">\n");
}

fn native_title(t: &Triple, agg: &Uri) -> bool {
    matches!(t.object().as_literal(), Some(l) if l.is_plain() && l.lexical() != agg.as_str())
}

fn native_updated(t: &Triple) -> bool {
    matches!(t.object().as_literal(), Some(l) if l.is_plain() && l.lexical() != UPDATED_PLACEHOLDER && is_rfc3339(l.lexical()))
}

fn is_rfc3339(s: &str) -> bool {
    chrono::DateTime::parse_from_rfc3339(s).is_ok()
}

/// An Atom date for a `dcterms:modified` value that is not carried natively.
fn as_atom_date(lexical: &str) -> Option<String> {
    if is_rfc3339(lexical) {
        Some(lexical.to_owned())
    } else if chrono::NaiveDate::parse_from_str(lexical, "%Y-%m-%d").is_ok() && lexical.len() == 10 {
        Some(format!("{lexical}T00:00:00Z"))
    } else {
        None
    }
}

pub fn from_atom(doc: &WireDocument) -> Result<OreGraph, WireError> {
    check_format(doc, WireFormat::Atom)?;
    let root = xml::parse_document(&doc.bytes).map_err(WireError::XmlMalformed)?;
    let ctx = Context {
        base: doc.source_uri.clone(),
        lang: None,
    }
    .enter(&root)?;

    let (entry, ctx) = if root.is(ATOM, "entry") {
        (&root, ctx)
    } else if root.is(ATOM, "feed") {
        let entries: Vec<&Element> = root.elements().filter(|e| e.is(ATOM, "entry")).collect();
        match entries.as_slice() {
            [entry] => {
                let entry_ctx = ctx.enter(entry)?;
                (*entry, entry_ctx)
            }
            _ => return Err(WireError::NotSingleEntry(entries.len())),
        }
    } else {
        return Err(WireError::UnknownRoot(root.qualified()));
    };
    extract(&root, entry, &ctx)
}

fn extract(root: &Element, entry: &Element, ctx: &Context) -> Result<OreGraph, WireError> {
    let v = vocab();
    let child = |local: &str| entry.elements().find(|e| e.is(ATOM, local));

    let id = child("id").ok_or(WireError::NoDescribes)?;
    let agg = ctx.enter(id)?.resolve(id.text().trim())?;

    let aggregates_rel = format!("{ORE}aggregates");
    let mut rem = None;
    let mut members = Vec::new();
    for link in entry.elements().filter(|e| e.is(ATOM, "link")) {
        let link_ctx = ctx.enter(link)?;
        let Some(href) = link.attr(None, "href") else { continue };
        match link.attr(None, "rel") {
            Some("self") if rem.is_none() => rem = Some(link_ctx.resolve(href.trim())?),
            Some(rel) if rel == aggregates_rel => members.push(link_ctx.resolve(href.trim())?),
            _ => {}
        }
    }
    let rem = rem.ok_or(WireError::NoDescribes)?;

    let mut parser = Parser::new(root);
    for wrapper in entry.elements().filter(|e| e.is(ORE, "triples")) {
        let wrapper_ctx = ctx.enter(wrapper)?;
        parser.node_elements(wrapper, &wrapper_ctx)?;
    }
    let mut triples = std::mem::take(&mut parser.triples);

    let agg_term = Term::uri(agg.clone());
    let rem_term = Term::uri(rem.clone());
    triples.push(Triple::uris(&rem, &v.describes, &agg));
    for member in &members {
        triples.push(Triple::uris(&agg, &v.aggregates, member));
    }

    let carried = |s: &Term, p: &Uri| triples.iter().any(|t| t.subject() == s && t.predicate() == p);
    let mut native = Vec::new();
    if let Some(title) = child("title") {
        let text = title.text();
        if !carried(&agg_term, &v.title) && text != agg.as_str() {
            native.push(Triple::new(agg_term.clone(), v.title.clone(), Term::literal(plain(text)?)).expect("uri subject"));
        }
    }
    if let Some(updated) = child("updated") {
        let text = updated.text().trim().to_owned();
        if !carried(&rem_term, &v.modified) && text != UPDATED_PLACEHOLDER {
            native.push(Triple::new(rem_term.clone(), v.modified.clone(), Term::literal(plain(text)?)).expect("uri subject"));
        }
    }
    triples.extend(native);
    Ok(OreGraph::from_triples(triples)?)
}

fn plain(text: impl Into<String>) -> Result<Literal, WireError> {
    Literal::plain(text).map_err(|e| WireError::InvalidContent(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::serialize::{from_rdfxml, to_rdfxml};

    fn u(s: &str) -> Uri {
        Uri::parse(&format!("http://example.org/{s}")).unwrap()
    }

    fn fig2() -> OreGraph {
        let v = vocab();
        let mut g = OreGraph::new_aggregation(&u("ReM-1"), &u("A-1"), &[u("AR-1"), u("AR-2"), u("AR-3")]).unwrap();
        g.add_triple(Triple::new(Term::uri(u("ReM-1")), v.creator.clone(), Term::literal(Literal::plain("Libraries of the LANL").unwrap())).unwrap())
            .unwrap();
        g.add_triple(Triple::new(Term::uri(u("ReM-1")), v.modified.clone(), Term::literal(Literal::plain("2008-10-01T00:00:00Z").unwrap())).unwrap())
            .unwrap();
        g
    }

    #[test]
    fn fig2_round_trips_with_native_updated() {
        let g = fig2();
        let (doc, warnings) = to_atom_with_warnings(&g).unwrap();
        assert!(warnings.is_empty());
        let text = doc.as_str().unwrap();
        assert_eq!(text.matches(&format!("rel=\"{ORE}aggregates\"")).count(), 3);
        assert!(text.contains("<atom:updated>2008-10-01T00:00:00Z</atom:updated>"));
        assert!(!text.contains("dcterms:modified"));
        assert_eq!(from_atom(&doc).unwrap(), g);
    }

    #[test]
    fn placeholder_and_warning_without_modified() {
        let g = OreGraph::new_aggregation(&u("R"), &u("A"), &[u("x")]).unwrap();
        let (doc, warnings) = to_atom_with_warnings(&g).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(doc.as_str().unwrap().contains(UPDATED_PLACEHOLDER));
        assert_eq!(from_atom(&doc).unwrap(), g);
    }

    #[test]
    fn awkward_titles_and_dates_go_to_triples() {
        let v = vocab();
        let mut g = OreGraph::new_aggregation(&u("R"), &u("A"), &[u("x")]).unwrap();
        let lit = |s: &str| Term::literal(Literal::plain(s).unwrap());
        g.add_triple(Triple::new(Term::uri(u("A")), v.title.clone(), lit("http://example.org/A")).unwrap()).unwrap();
        g.add_triple(Triple::new(Term::uri(u("R")), v.modified.clone(), lit("2008-10-01")).unwrap()).unwrap();
        g.add_triple(Triple::new(Term::uri(u("R")), v.modified.clone(), lit(UPDATED_PLACEHOLDER)).unwrap()).unwrap();
        let doc = to_atom(&g).unwrap();
        assert!(doc.as_str().unwrap().contains("<ore:triples>"));
        assert_eq!(from_atom(&doc).unwrap(), g);
    }

    #[test]
    fn minimal_graph_has_no_wrapper() {
        let v = vocab();
        let triples = vec![Triple::uris(&u("R"), &v.describes, &u("A")), Triple::uris(&u("A"), &v.aggregates, &u("x"))];
        let g = OreGraph::from_triples(triples).unwrap();
        let doc = to_atom(&g).unwrap();
        assert!(!doc.as_str().unwrap().contains("ore:triples"));
        assert_eq!(from_atom(&doc).unwrap(), g);
    }

    #[test]
    fn agrees_with_rdfxml() {
        let g = fig2();
        let via_atom = from_atom(&to_atom(&g).unwrap()).unwrap();
        let via_rdf = from_rdfxml(&to_rdfxml(&g).unwrap()).unwrap();
        assert_eq!(via_atom.triples(), via_rdf.triples());
    }

    #[test]
    fn feeds_and_missing_parts() {
        let entry = r#"<entry><id>http://e.org/A</id><link rel="self" href="http://e.org/R"/></entry>"#;
        let feed = |n: usize| {
            WireDocument::new(
                WireFormat::Atom,
                format!("<feed xmlns=\"{ATOM}\">{}</feed>", entry.repeat(n)),
            )
        };
        let g = from_atom(&feed(1)).unwrap();
        assert_eq!(g.agg_uri().as_str(), "http://e.org/A");
        assert_eq!(g.len(), 1);
        assert_eq!(from_atom(&feed(2)), Err(WireError::NotSingleEntry(2)));
        assert_eq!(from_atom(&feed(0)), Err(WireError::NotSingleEntry(0)));

        let no_self = WireDocument::new(WireFormat::Atom, format!("<entry xmlns=\"{ATOM}\"><id>http://e.org/A</id></entry>"));
        assert_eq!(from_atom(&no_self), Err(WireError::NoDescribes));
    }
}
