use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::xml::{self, Element, XML_NS};
use super::{check_format, WireDocument, WireError, WireFormat};
use crate::graph::OreGraph;
use crate::term::{BlankId, Literal, Term, Triple};
use crate::uri::Uri;
use crate::validate::{validate, Level};
use crate::vocab::{self, RDF};

/// Names in the RDF namespace that are syntax, not properties.
const RDF_SYNTAX_NAMES: &[&str] = &[
    "RDF",
    "Description",
    "ID",
    "about",
    "bagID",
    "parseType",
    "resource",
    "nodeID",
    "datatype",
    "li",
    "aboutEach",
    "aboutEachPrefix",
];

pub fn to_rdfxml(graph: &OreGraph) -> Result<WireDocument, WireError> {
    let report = validate(graph, Level::Lax);
    if !report.valid {
        return Err(WireError::InvalidGraph(report.error_summary()));
    }
    let prefixes = Prefixes::for_triples(graph.triples().iter())?;
    let mut out = String::from(xml::DECLARATION);
    let mut attrs = prefixes.declarations();
    xml::open_tag(&mut out, 0, "rdf:RDF", &mut attrs);
    out.push_str(">\n");
    write_descriptions(graph.triples(), &prefixes, 1, &mut out)?;
    out.push_str("</rdf:RDF>\n");
    Ok(WireDocument::new(WireFormat::Rdfxml, out))
}

pub fn from_rdfxml(doc: &WireDocument) -> Result<OreGraph, WireError> {
    check_format(doc, WireFormat::Rdfxml)?;
    let triples = parse_rdfxml_triples(&doc.bytes, doc.source_uri.as_ref())?;
    Ok(OreGraph::from_triples(triples)?)
}

/// Parses an RDF/XML document into its triples without requiring an
/// `ore:describes` anchor.
pub fn parse_rdfxml_triples(bytes: &[u8], source: Option<&Uri>) -> Result<Vec<Triple>, WireError> {
    let root = xml::parse_document(bytes).map_err(WireError::XmlMalformed)?;
    let mut parser = Parser::new(&root);
    let ctx = Context {
        base: source.cloned(),
        lang: None,
    }
    .enter(&root)?;
    if root.is(RDF, "RDF") {
        parser.node_elements(&root, &ctx)?;
    } else {
        parser.node_element(&root, &ctx)?;
    }
    Ok(parser.triples)
}

// ---------------------------------------------------------------------------
// writer

pub(super) struct Prefixes {
    /// namespace -> prefix
    by_ns: BTreeMap<String, String>,
}

impl Prefixes {
    /// Fixed prefixes plus `ns0`, `ns1`, ... for any other predicate
    /// namespaces, numbered in namespace order.
    pub(super) fn for_triples<'a>(triples: impl Iterator<Item = &'a Triple>) -> Result<Prefixes, WireError> {
        let mut by_ns: BTreeMap<String, String> = vocab::FIXED_PREFIXES
            .iter()
            .map(|(p, ns)| (ns.to_string(), p.to_string()))
            .collect();
        let mut extra = BTreeSet::new();
        for t in triples {
            let (ns, local) = split_predicate(t.predicate())?;
            if ns == RDF && RDF_SYNTAX_NAMES.contains(&local) {
                return Err(WireError::UnserializablePredicate(t.predicate().to_string()));
            }
            if !by_ns.contains_key(ns) {
                extra.insert(ns.to_owned());
            }
        }
        for (i, ns) in extra.into_iter().enumerate() {
            by_ns.insert(ns, format!("ns{i}"));
        }
        Ok(Prefixes { by_ns })
    }

    pub(super) fn declarations(&self) -> Vec<(String, String)> {
        self.by_ns
            .iter()
            .map(|(ns, p)| (format!("xmlns:{p}"), ns.clone()))
            .collect()
    }

    fn qname(&self, predicate: &Uri) -> String {
        let (ns, local) = split_predicate(predicate).expect("checked in for_triples");
        format!("{}:{local}", self.by_ns[ns])
    }
}

fn split_predicate(predicate: &Uri) -> Result<(&str, &str), WireError> {
    vocab::split_qname(predicate.as_str())
        .ok_or_else(|| WireError::UnserializablePredicate(predicate.to_string()))
}

/// Canonical blank labelling: a blank gets the next `bN` label the first time
/// the writer reaches it. URI subjects are visited in order, then blank
/// subjects (already-labelled first, by label). Ties between unlabelled
/// blanks fall back to their existing labels compared by (length, text), so
/// a document that already carries canonical labels reproduces them.
struct Labeller<'a> {
    labels: HashMap<&'a BlankId, usize>,
}

impl<'a> Labeller<'a> {
    fn label(&mut self, b: &'a BlankId) -> usize {
        let next = self.labels.len();
        *self.labels.entry(b).or_insert(next)
    }

    fn cmp_blank(&self, a: &BlankId, b: &BlankId) -> Ordering {
        match (self.labels.get(a), self.labels.get(b)) {
            (Some(x), Some(y)) => x.cmp(y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => natural(a.as_str(), b.as_str()),
        }
    }

    fn cmp_object(&self, a: &Term, b: &Term) -> Ordering {
        fn rank(t: &Term) -> u8 {
            match t {
                Term::Uri { .. } => 0,
                Term::Blank { .. } => 1,
                Term::Literal { .. } => 2,
            }
        }
        match (a, b) {
            (Term::Blank { label: x }, Term::Blank { label: y }) => self.cmp_blank(x, y),
            _ => rank(a).cmp(&rank(b)).then_with(|| a.cmp(b)),
        }
    }
}

fn natural(a: &str, b: &str) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub(super) fn write_descriptions(
    triples: &BTreeSet<Triple>,
    prefixes: &Prefixes,
    indent: usize,
    out: &mut String,
) -> Result<(), WireError> {
    let mut by_subject: BTreeMap<&Term, Vec<&Triple>> = BTreeMap::new();
    for t in triples {
        by_subject.entry(t.subject()).or_default().push(t);
    }
    let mut labeller = Labeller { labels: HashMap::new() };

    let uri_subjects: Vec<&Term> = by_subject.keys().copied().filter(|s| s.as_uri().is_some()).collect();
    for subject in uri_subjects {
        write_subject(subject, &by_subject[subject], prefixes, &mut labeller, indent, out);
    }

    let mut pending: Vec<&BlankId> = by_subject.keys().filter_map(|s| s.as_blank()).collect();
    while !pending.is_empty() {
        let (idx, _) = pending
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| labeller.cmp_blank(a, b))
            .expect("non-empty");
        let blank = pending.swap_remove(idx);
        labeller.label(blank);
        let subject = by_subject
            .keys()
            .copied()
            .find(|s| s.as_blank() == Some(blank))
            .expect("pending blanks are subjects");
        write_subject(subject, &by_subject[subject], prefixes, &mut labeller, indent, out);
    }
    Ok(())
}

fn write_subject<'a>(
    subject: &'a Term,
    triples: &[&'a Triple],
    prefixes: &Prefixes,
    labeller: &mut Labeller<'a>,
    indent: usize,
    out: &mut String,
) {
    let mut attrs = match subject {
        Term::Uri { value } => vec![("rdf:about".to_owned(), value.to_string())],
        Term::Blank { label } => vec![("rdf:nodeID".to_owned(), format!("b{}", labeller.label(label)))],
        Term::Literal { .. } => unreachable!("literal subjects are rejected at construction"),
    };
    xml::open_tag(out, indent, "rdf:Description", &mut attrs);
    out.push_str(">\n");

    let mut sorted: Vec<&Triple> = triples.to_vec();
    sorted.sort_by(|a, b| {
        a.predicate()
            .cmp(b.predicate())
            .then_with(|| labeller.cmp_object(a.object(), b.object()))
    });
    for t in sorted {
        let name = prefixes.qname(t.predicate());
        match t.object() {
            Term::Uri { value } => {
                let mut attrs = vec![("rdf:resource".to_owned(), value.to_string())];
                xml::open_tag(out, indent + 1, &name, &mut attrs);
                out.push_str("/>\n");
            }
            Term::Blank { label } => {
                let mut attrs = vec![("rdf:nodeID".to_owned(), format!("b{}", labeller.label(label)))];
                xml::open_tag(out, indent + 1, &name, &mut attrs);
                out.push_str("/>\n");
            }
            Term::Literal { value } => {
                let mut attrs = Vec::new();
                if let Some(lang) = value.language() {
                    attrs.push(("xml:lang".to_owned(), lang.to_owned()));
                }
                if let Some(dt) = value.datatype() {
                    attrs.push(("rdf:datatype".to_owned(), dt.to_string()));
                }
                xml::open_tag(out, indent + 1, &name, &mut attrs);
                out.push('>');
                xml::escape_text(value.lexical(), out);
                out.push_str("</");
                out.push_str(&name);
                out.push_str(">\n");
            }
        }
    }
    xml::push_indent(out, indent);
    out.push_str("</rdf:Description>\n");
}

// ---------------------------------------------------------------------------
// parser

#[derive(Clone)]
pub(super) struct Context {
    pub base: Option<Uri>,
    pub lang: Option<String>,
}

impl Context {
    /// Applies `xml:base` and `xml:lang` from an element.
    pub(super) fn enter(&self, element: &Element) -> Result<Context, WireError> {
        let mut ctx = self.clone();
        if let Some(base) = element.attr(Some(XML_NS), "base") {
            ctx.base = Some(ctx.resolve(base)?);
        }
        if let Some(lang) = element.attr(Some(XML_NS), "lang") {
            ctx.lang = if lang.is_empty() { None } else { Some(lang.to_owned()) };
        }
        Ok(ctx)
    }

    pub(super) fn resolve(&self, reference: &str) -> Result<Uri, WireError> {
        if let Ok(uri) = Uri::parse(reference) {
            return Ok(uri);
        }
        match &self.base {
            Some(base) => base
                .resolve(reference)
                .map_err(|e| WireError::InvalidContent(e.to_string())),
            None => Err(WireError::NoBase(reference.to_owned())),
        }
    }
}

pub(super) struct Parser {
    pub triples: Vec<Triple>,
    taken: HashSet<String>,
    counter: usize,
}

impl Parser {
    pub(super) fn new(root: &Element) -> Parser {
        let mut taken = HashSet::new();
        collect_node_ids(root, &mut taken);
        Parser {
            triples: Vec::new(),
            taken,
            counter: 0,
        }
    }

    fn fresh_blank(&mut self) -> BlankId {
        loop {
            let label = format!("genid{}", self.counter);
            self.counter += 1;
            if !self.taken.contains(&label) {
                return BlankId::new(label).expect("valid label");
            }
        }
    }

    fn push(&mut self, s: Term, p: Uri, o: Term) -> Result<(), WireError> {
        let t = Triple::new(s, p, o).map_err(|e| WireError::InvalidContent(e.to_string()))?;
        self.triples.push(t);
        Ok(())
    }

    /// Every child element of `container` is a node element.
    pub(super) fn node_elements(&mut self, container: &Element, ctx: &Context) -> Result<(), WireError> {
        if container.has_non_whitespace_text() {
            return Err(WireError::XmlMalformed(format!(
                "unexpected text inside {}",
                container.qualified()
            )));
        }
        for child in container.elements() {
            let child_ctx = ctx.enter(child)?;
            self.node_element(child, &child_ctx)?;
        }
        Ok(())
    }

    /// Returns the node's subject term. `ctx` already includes the element's
    /// own xml:base / xml:lang.
    pub(super) fn node_element(&mut self, element: &Element, ctx: &Context) -> Result<Term, WireError> {
        let about = element.attr(Some(RDF), "about");
        let node_id = element.attr(Some(RDF), "nodeID");
        let id = element.attr(Some(RDF), "ID");
        for name in ["aboutEach", "aboutEachPrefix", "bagID"] {
            if element.attr(Some(RDF), name).is_some() {
                return Err(WireError::UnsupportedRdfXml(format!("rdf:{name}")));
            }
        }
        let subject = match (about, node_id, id) {
            (Some(a), None, None) => Term::uri(ctx.resolve(a)?),
            (None, Some(n), None) => Term::blank(blank_id(n)?),
            (None, None, Some(i)) => Term::uri(ctx.resolve(&format!("#{i}"))?),
            (None, None, None) => Term::blank(self.fresh_blank()),
            _ => {
                return Err(WireError::XmlMalformed(
                    "node element with more than one of rdf:about, rdf:nodeID, rdf:ID".into(),
                ))
            }
        };

        if !element.is(RDF, "Description") {
            let ty = element_uri(element)?;
            if element.ns.as_deref() == Some(RDF) && RDF_SYNTAX_NAMES.contains(&element.local.as_str()) {
                return Err(WireError::XmlMalformed(format!("rdf:{} is not a node element", element.local)));
            }
            self.push(subject.clone(), vocab::vocab().rdf_type.clone(), Term::uri(ty))?;
        }
        self.property_attributes(element, &subject, ctx)?;

        if element.has_non_whitespace_text() {
            return Err(WireError::XmlMalformed(format!(
                "unexpected text inside node element {}",
                element.qualified()
            )));
        }
        for prop in element.elements() {
            let prop_ctx = ctx.enter(prop)?;
            self.property_element(prop, &subject, &prop_ctx)?;
        }
        Ok(subject)
    }

    /// Non-syntax attributes on a node element are literal-valued properties
    /// (`rdf:type` takes a URI).
    fn property_attributes(&mut self, element: &Element, subject: &Term, ctx: &Context) -> Result<(), WireError> {
        for attr in &element.attrs {
            let ns = attr.ns.as_deref();
            if ns == Some(XML_NS) || ns.is_none() {
                continue;
            }
            if ns == Some(RDF) && RDF_SYNTAX_NAMES.contains(&attr.local.as_str()) {
                continue;
            }
            let predicate = attr_uri(ns.unwrap_or_default(), &attr.local)?;
            if predicate == vocab::vocab().rdf_type {
                self.push(subject.clone(), predicate, Term::uri(ctx.resolve(&attr.value)?))?;
            } else {
                let lit = literal(&attr.value, ctx.lang.clone(), None)?;
                self.push(subject.clone(), predicate, Term::literal(lit))?;
            }
        }
        Ok(())
    }

    fn property_element(&mut self, element: &Element, subject: &Term, ctx: &Context) -> Result<(), WireError> {
        let predicate = element_uri(element)?;
        if element.ns.as_deref() == Some(RDF) {
            let local = element.local.as_str();
            if local == "li" || (local.starts_with('_') && local[1..].chars().all(|c| c.is_ascii_digit())) {
                return Err(WireError::UnsupportedRdfXml(format!("container membership property rdf:{local}")));
            }
            if RDF_SYNTAX_NAMES.contains(&local) {
                return Err(WireError::XmlMalformed(format!("rdf:{local} is not a property element")));
            }
        }
        if element.attr(Some(RDF), "ID").is_some() {
            return Err(WireError::UnsupportedRdfXml("rdf:ID on a property element (reification)".into()));
        }
        if let Some(parse_type) = element.attr(Some(RDF), "parseType") {
            if parse_type != "Resource" {
                return Err(WireError::UnsupportedRdfXml(format!("rdf:parseType=\"{parse_type}\"")));
            }
            let object = Term::blank(self.fresh_blank());
            self.push(subject.clone(), predicate, object.clone())?;
            if element.has_non_whitespace_text() {
                return Err(WireError::XmlMalformed("text inside rdf:parseType=\"Resource\"".into()));
            }
            for prop in element.elements() {
                let prop_ctx = ctx.enter(prop)?;
                self.property_element(prop, &object, &prop_ctx)?;
            }
            return Ok(());
        }

        let children: Vec<&Element> = element.elements().collect();
        let resource = element.attr(Some(RDF), "resource");
        let node_id = element.attr(Some(RDF), "nodeID");
        let datatype = element.attr(Some(RDF), "datatype");
        let has_prop_attrs = element.attrs.iter().any(|a| {
            let ns = a.ns.as_deref();
            ns.is_some() && ns != Some(XML_NS) && !(ns == Some(RDF) && RDF_SYNTAX_NAMES.contains(&a.local.as_str()))
        });

        match children.as_slice() {
            [node] => {
                if resource.is_some() || node_id.is_some() || datatype.is_some() || has_prop_attrs {
                    return Err(WireError::XmlMalformed(
                        "property element with a nested node cannot carry rdf:resource, rdf:nodeID or rdf:datatype".into(),
                    ));
                }
                if element.has_non_whitespace_text() {
                    return Err(WireError::XmlMalformed("mixed content in property element".into()));
                }
                let node_ctx = ctx.enter(node)?;
                let object = self.node_element(node, &node_ctx)?;
                self.push(subject.clone(), predicate, object)
            }
            [] => {
                let object = match (resource, node_id) {
                    (Some(r), None) => Some(Term::uri(ctx.resolve(r)?)),
                    (None, Some(n)) => Some(Term::blank(blank_id(n)?)),
                    (Some(_), Some(_)) => {
                        return Err(WireError::XmlMalformed("both rdf:resource and rdf:nodeID".into()))
                    }
                    (None, None) if has_prop_attrs => Some(Term::blank(self.fresh_blank())),
                    (None, None) => None,
                };
                match object {
                    Some(object) => {
                        if datatype.is_some() || !element.text().is_empty() {
                            return Err(WireError::XmlMalformed(
                                "resource-valued property element with literal content".into(),
                            ));
                        }
                        self.property_attributes(element, &object, ctx)?;
                        self.push(subject.clone(), predicate, object)
                    }
                    None => {
                        let datatype = datatype.map(|d| ctx.resolve(d)).transpose()?;
                        let lang = if datatype.is_some() { None } else { ctx.lang.clone() };
                        let lit = literal(&element.text(), lang, datatype)?;
                        self.push(subject.clone(), predicate, Term::literal(lit))
                    }
                }
            }
            _ => Err(WireError::XmlMalformed(format!(
                "property element {} has {} child elements",
                element.qualified(),
                children.len()
            ))),
        }
    }
}

fn collect_node_ids(element: &Element, out: &mut HashSet<String>) {
    if let Some(id) = element.attr(Some(RDF), "nodeID") {
        out.insert(id.to_owned());
    }
    for child in element.elements() {
        collect_node_ids(child, out);
    }
}

fn blank_id(label: &str) -> Result<BlankId, WireError> {
    BlankId::new(label).map_err(|e| WireError::InvalidContent(e.to_string()))
}

fn literal(text: &str, lang: Option<String>, datatype: Option<Uri>) -> Result<Literal, WireError> {
    Literal::new(text, lang, datatype).map_err(|e| WireError::InvalidContent(e.to_string()))
}

fn element_uri(element: &Element) -> Result<Uri, WireError> {
    let ns = element
        .ns
        .as_deref()
        .ok_or_else(|| WireError::XmlMalformed(format!("element {} has no namespace", element.local)))?;
    attr_uri(ns, &element.local)
}

fn attr_uri(ns: &str, local: &str) -> Result<Uri, WireError> {
    Uri::parse(&format!("{ns}{local}")).map_err(|e| WireError::InvalidContent(e.to_string()))
}
