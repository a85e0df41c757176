//! Independent oracles for the integration and acceptance tests. Nothing
//! here reuses library internals beyond the public term types.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use ore_core::{BlankId, Term, Triple};

const ORE: &str = "http://www.openarchives.org/ore/terms/";

/// Naive closure: apply every rule to every triple until nothing changes.
pub fn naive_closure(input: &BTreeSet<Triple>) -> BTreeSet<Triple> {
    let inverse = [
        (format!("{ORE}aggregates"), format!("{ORE}isAggregatedBy")),
        (format!("{ORE}describes"), format!("{ORE}isDescribedBy")),
    ];
    let sub = [
        (format!("{ORE}aggregates"), "http://purl.org/dc/terms/hasPart".to_string()),
        (format!("{ORE}isDescribedBy"), "http://www.w3.org/2000/01/rdf-schema#seeAlso".to_string()),
    ];
    let mut set = input.clone();
    loop {
        let mut added = Vec::new();
        for t in &set {
            let p = t.predicate().as_str();
            for (a, b) in &inverse {
                for (from, to) in [(a, b), (b, a)] {
                    if p == from && matches!(t.object(), Term::Uri { .. }) {
                        added.push(Triple::new(t.object().clone(), to.parse().unwrap(), t.subject().clone()).unwrap());
                    }
                }
            }
            for (from, to) in &sub {
                if p == from {
                    added.push(Triple::new(t.subject().clone(), to.parse().unwrap(), t.object().clone()).unwrap());
                }
            }
        }
        let before = set.len();
        set.extend(added);
        if set.len() == before {
            return set;
        }
    }
}

/// Union-find over subjects and non-literal objects.
pub fn union_find_connected(triples: &BTreeSet<Triple>, root: &Term) -> bool {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut ids: HashMap<&Term, usize> = HashMap::new();
    let mut parent: Vec<usize> = Vec::new();
    let id_of = |term, ids: &mut HashMap<_, usize>, parent: &mut Vec<usize>| {
        *ids.entry(term).or_insert_with(|| {
            parent.push(parent.len());
            parent.len() - 1
        })
    };
    for t in triples {
        let s = id_of(t.subject(), &mut ids, &mut parent);
        if !matches!(t.object(), Term::Literal { .. }) {
            let o = id_of(t.object(), &mut ids, &mut parent);
            let (x, y) = (find(&mut parent, s), find(&mut parent, o));
            parent[x] = y;
        }
    }
    let Some(&r) = ids.get(root) else {
        return ids.is_empty();
    };
    let r = find(&mut parent, r);
    (0..parent.len()).all(|i| find(&mut parent, i) == r)
}

fn blanks(t: &Triple) -> impl Iterator<Item = &BlankId> {
    [t.subject(), t.object()].into_iter().filter_map(Term::as_blank)
}

fn hash_of(x: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

/// Colour refinement over blank nodes; colours depend only on structure and
/// named terms, so isomorphic graphs get equal colour multisets.
fn colours(triples: &BTreeSet<Triple>) -> BTreeMap<BlankId, u64> {
    let mut colour: BTreeMap<BlankId, u64> = triples.iter().flat_map(blanks).map(|b| (b.clone(), 0)).collect();
    let term_key = |t: &Term, colour: &BTreeMap<BlankId, u64>| match t {
        Term::Blank { label } => format!("_:{}", colour[label]),
        other => other.to_string(),
    };
    for _ in 0..6 {
        let mut next = BTreeMap::new();
        for b in colour.keys() {
            let mut sig: Vec<String> = Vec::new();
            for t in triples {
                if t.subject().as_blank() == Some(b) {
                    sig.push(format!("out {} {}", t.predicate(), term_key(t.object(), &colour)));
                }
                if t.object().as_blank() == Some(b) {
                    sig.push(format!("in {} {}", t.predicate(), term_key(t.subject(), &colour)));
                }
            }
            sig.sort();
            next.insert(b.clone(), hash_of((colour[b], sig)));
        }
        colour = next;
    }
    colour
}

/// True if the two triple sets are equal up to a renaming of blank nodes.
pub fn isomorphic(a: &BTreeSet<Triple>, b: &BTreeSet<Triple>) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ground = |s: &BTreeSet<Triple>| -> BTreeSet<Triple> { s.iter().filter(|t| blanks(t).next().is_none()).cloned().collect() };
    if ground(a) != ground(b) {
        return false;
    }
    let ca = colours(a);
    let cb = colours(b);
    let mut ma: Vec<u64> = ca.values().copied().collect();
    let mut mb: Vec<u64> = cb.values().copied().collect();
    ma.sort();
    mb.sort();
    if ma != mb {
        return false;
    }
    let order: Vec<BlankId> = ca.keys().cloned().collect();
    let mut mapping: BTreeMap<BlankId, BlankId> = BTreeMap::new();
    search(a, b, &ca, &cb, &order, &mut mapping)
}

fn rename(t: &Triple, mapping: &BTreeMap<BlankId, BlankId>) -> Option<Triple> {
    let map = |term: &Term| -> Option<Term> {
        match term {
            Term::Blank { label } => mapping.get(label).map(|l| Term::blank(l.clone())),
            other => Some(other.clone()),
        }
    };
    Some(Triple::new(map(t.subject())?, t.predicate().clone(), map(t.object())?).unwrap())
}

fn search(
    a: &BTreeSet<Triple>,
    b: &BTreeSet<Triple>,
    ca: &BTreeMap<BlankId, u64>,
    cb: &BTreeMap<BlankId, u64>,
    order: &[BlankId],
    mapping: &mut BTreeMap<BlankId, BlankId>,
) -> bool {
    // every fully mapped triple must exist on the other side
    for t in a {
        if let Some(r) = rename(t, mapping) {
            if blanks(t).next().is_some() && !b.contains(&r) {
                return false;
            }
        }
    }
    let Some(next) = order.iter().find(|x| !mapping.contains_key(*x)) else {
        return true;
    };
    let used: BTreeSet<&BlankId> = mapping.values().collect();
    let candidates: Vec<BlankId> = cb
        .iter()
        .filter(|(l, c)| **c == ca[next] && !used.contains(l))
        .map(|(l, _)| l.clone())
        .collect();
    for cand in candidates {
        mapping.insert(next.clone(), cand);
        if search(a, b, ca, cb, order, mapping) {
            return true;
        }
        mapping.remove(next);
    }
    false
}

/// One media range from an Accept header.
#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub kind: String,
    pub subtype: String,
    pub q: f64,
}

/// Parses an Accept header. Malformed entries are skipped, parameters
/// other than q are ignored.
pub fn parse_accept(header: &str) -> Vec<Range> {
    let mut out = Vec::new();
    for part in header.split(',') {
        let mut pieces = part.split(';').map(str::trim);
        let Some(media) = pieces.next().filter(|m| !m.is_empty()) else { continue };
        let Some((kind, subtype)) = media.split_once('/') else { continue };
        let mut q: f64 = 1.0;
        for param in pieces {
            if let Some((k, v)) = param.split_once('=') {
                if k.trim().eq_ignore_ascii_case("q") {
                    q = v.trim().parse().unwrap_or(0.0);
                }
            }
        }
        out.push(Range {
            kind: kind.to_ascii_lowercase(),
            subtype: subtype.to_ascii_lowercase(),
            q: q.clamp(0.0, 1.0),
        });
    }
    out
}

/// Quality the header assigns to `media_type`, taken from the most specific
/// matching range.
pub fn quality(ranges: &[Range], media_type: &str) -> f64 {
    let (kind, subtype) = media_type.split_once('/').unwrap();
    let mut best: Option<(u8, f64)> = None;
    for r in ranges {
        let specificity = if r.kind == kind && r.subtype == subtype {
            2
        } else if r.kind == kind && r.subtype == "*" {
            1
        } else if r.kind == "*" && r.subtype == "*" {
            0
        } else {
            continue;
        };
        if best.is_none_or(|(s, _)| specificity > s) {
            best = Some((specificity, r.q));
        }
    }
    best.map_or(0.0, |(_, q)| q)
}

/// Picks from `offered` (in server preference order). Empty header means the
/// first offer.
pub fn choose<'a>(header: &str, offered: &[&'a str]) -> Option<(&'a str, f64)> {
    let ranges = parse_accept(header);
    if ranges.is_empty() {
        return offered.first().map(|m| (*m, 1.0));
    }
    let mut best: Option<(&str, f64)> = None;
    for m in offered {
        let q = quality(&ranges, m);
        if q > 0.0 && best.is_none_or(|(_, bq)| q > bq) {
            best = Some((m, q));
        }
    }
    best
}

const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";

/// A small RDF/XML reader over roxmltree covering node elements with
/// rdf:about or rdf:nodeID, typed nodes, rdf:resource, rdf:nodeID, nested
/// nodes and literals with xml:lang or rdf:datatype. Anonymous nodes get
/// `anonN` labels. Enough for comparing against the library parser.
pub fn read_rdfxml(text: &str) -> BTreeSet<Triple> {
    let doc = roxmltree::Document::parse(text).expect("well-formed XML");
    let mut out = BTreeSet::new();
    let mut counter = 0;
    let root = doc.root_element();
    let nodes: Vec<roxmltree::Node> = if root.tag_name().namespace() == Some(RDF_NS) && root.tag_name().name() == "RDF" {
        root.children().filter(|n| n.is_element()).collect()
    } else {
        vec![root]
    };
    for n in nodes {
        node(n, &mut out, &mut counter);
    }
    out
}

fn expand(n: roxmltree::ExpandedName) -> String {
    format!("{}{}", n.namespace().unwrap_or_default(), n.name())
}

fn node(n: roxmltree::Node, out: &mut BTreeSet<Triple>, counter: &mut usize) -> Term {
    let subject = if let Some(about) = n.attribute((RDF_NS, "about")) {
        Term::uri(about.parse().unwrap())
    } else if let Some(id) = n.attribute((RDF_NS, "nodeID")) {
        Term::blank(BlankId::new(id).unwrap())
    } else {
        *counter += 1;
        Term::blank(BlankId::new(format!("anon{counter}")).unwrap())
    };
    let name = expand(n.tag_name());
    if name != format!("{RDF_NS}Description") {
        out.insert(Triple::new(subject.clone(), format!("{RDF_NS}type").parse().unwrap(), Term::uri(name.parse().unwrap())).unwrap());
    }
    for prop in n.children().filter(|c| c.is_element()) {
        let predicate = expand(prop.tag_name()).parse().unwrap();
        let object = if let Some(r) = prop.attribute((RDF_NS, "resource")) {
            Term::uri(r.parse().unwrap())
        } else if let Some(id) = prop.attribute((RDF_NS, "nodeID")) {
            Term::blank(BlankId::new(id).unwrap())
        } else if let Some(inner) = prop.children().find(|c| c.is_element()) {
            node(inner, out, counter)
        } else {
            let text: String = prop.children().filter_map(|c| c.text()).collect();
            let datatype = prop.attribute((RDF_NS, "datatype")).map(|d| d.parse().unwrap());
            let lang = if datatype.is_some() {
                None
            } else {
                prop.ancestors()
                    .find_map(|a| a.attribute((XML_NS, "lang")))
                    .filter(|l| !l.is_empty())
                    .map(str::to_owned)
            };
            Term::literal(ore_core::Literal::new(text, lang, datatype).unwrap())
        };
        out.insert(Triple::new(subject.clone(), predicate, object).unwrap());
    }
    subject
}
