use super::{proxy_uri, Lcg};
use crate::graph::OreGraph;
use crate::term::{BlankId, Literal, Term, Triple};
use crate::uri::Uri;
use crate::vocab::{vocab, XSD};

const TEXTS: &[&str] = &[
    "Libraries of the LANL",
    "",
    "  padded  ",
    "a & b < c > d",
    "quote \" and ' apos",
    "two\nlines\tand a tab",
    "carriage\rreturn",
    "caf\u{e9} \u{65e5}\u{672c} \u{1f4d6}",
    "]]> not a CDATA end",
    "1970-01-01T00:00:00Z",
    "2008-10-01",
    "2008-10-01T00:00:00Z",
    "2009-02-28T12:30:00+01:00",
];

const LANGS: &[&str] = &["en", "en-GB", "fr", "x-private"];

const EXTRA_PREDICATES: &[&str] = &[
    "http://example.org/terms/related",
    "http://example.org/terms/has-note",
    "http://purl.org/vocab/rel#_weird.name",
    "urn:x-local:vocab/score",
    "http://xmlns.com/foaf/0.1/name",
];

const CLASSES: &[&str] = &[
    "http://purl.org/dc/dcmitype/Text",
    "http://purl.org/dc/dcmitype/Image",
    "http://xmlns.com/foaf/0.1/Document",
];

struct Builder<'r> {
    rng: &'r mut Lcg,
    graph: OreGraph,
    base: String,
    nodes: Vec<Term>,
    members: Vec<Uri>,
    proxies: Vec<Uri>,
    fresh: usize,
}

impl Builder<'_> {
    fn uri(&mut self, stem: &str) -> Uri {
        self.fresh += 1;
        let n = self.fresh;
        let tail = match self.rng.below(6) {
            0 => format!("{stem}{n}?a=1&b=2"),
            1 => format!("{stem}{n}/x%20y"),
            2 => format!("{stem}{n}/caf%C3%A9"),
            _ => format!("{stem}{n}"),
        };
        Uri::parse(&format!("{}{tail}", self.base)).expect("generated URI")
    }

    fn foreign_uri(&mut self) -> Uri {
        self.fresh += 1;
        let n = self.fresh;
        let s = match self.rng.below(4) {
            0 => format!("info:doi/10.5555/{n}"),
            1 => format!("urn:isbn:0-000-{n}"),
            2 => format!("mailto:someone{n}@example.org"),
            _ => format!("http://elsewhere.example.com/{n}"),
        };
        Uri::parse(&s).expect("generated URI")
    }

    fn blank(&mut self) -> BlankId {
        self.fresh += 1;
        let label = if self.rng.chance(0.3) {
            format!("b{}", self.rng.below(20))
        } else {
            format!("n{}", self.fresh)
        };
        BlankId::new(label).expect("generated label")
    }

    fn literal(&mut self) -> Literal {
        let mut text = self.rng.pick(TEXTS).to_string();
        if self.rng.chance(0.3) {
            text.push_str(&format!(" #{}", self.rng.below(1000)));
        }
        match self.rng.below(5) {
            0 => Literal::new(text, Some(self.rng.pick(LANGS).to_string()), None),
            1 => {
                let dt = *self.rng.pick(&["date", "dateTime", "string", "integer"]);
                Literal::new(text, None, Some(Uri::parse(&format!("{XSD}{dt}")).expect("xsd")))
            }
            _ => Literal::plain(text),
        }
        .expect("generated literal")
    }

    fn predicate(&mut self) -> Uri {
        let v = vocab();
        let pool = [
            &v.title,
            &v.creator,
            &v.created,
            &v.modified,
            &v.references,
            &v.has_part,
            &v.see_also,
            &v.same_as,
            &v.is_aggregated_by,
            &v.is_described_by,
            &v.rdf_type,
        ];
        if self.rng.chance(0.25) {
            Uri::parse(self.rng.pick(EXTRA_PREDICATES)).expect("static")
        } else {
            (*self.rng.pick(&pool)).clone()
        }
    }

    fn subject(&mut self) -> Term {
        let agg = Term::uri(self.graph.agg_uri().clone());
        let rem = Term::uri(self.graph.rem_uri().clone());
        match self.rng.below(10) {
            0..=1 => agg,
            2 => rem,
            _ => self.rng.pick(&self.nodes).clone(),
        }
    }

    fn add(&mut self, t: Triple) {
        for term in [t.subject(), t.object()] {
            if term.is_node() && !self.nodes.contains(term) {
                self.nodes.push(term.clone());
            }
        }
        self.graph.add_triple(t).expect("generated triple is addable");
    }

    fn step(&mut self) {
        let v = vocab();
        let agg = self.graph.agg_uri().clone();
        match self.rng.below(100) {
            0..=7 => {
                let m = self.uri("r");
                self.add(Triple::uris(&agg, &v.aggregates, &m));
                self.members.push(m);
            }
            8..=15 => {
                let m = self.rng.pick(&self.members).clone();
                if self.graph.proxy_for_pair(&m, &agg).is_none() {
                    let p = proxy_uri(&agg, &m).expect("proxy URI");
                    // distinct members can share a last segment
                    if self.graph.triples().iter().any(|t| t.subject().is_uri(&p)) {
                        return;
                    }
                    self.graph.create_proxy(&p, &m, &agg).expect("member is aggregated");
                    self.nodes.push(Term::uri(p.clone()));
                    self.proxies.push(p);
                }
            }
            16..=20 if self.proxies.len() >= 2 => {
                let a = self.rng.pick(&self.proxies).clone();
                let b = self.rng.pick(&self.proxies).clone();
                self.add(Triple::uris(&a, &v.followed_by, &b));
            }
            21..=25 => {
                let m = self.rng.pick(&self.members).clone();
                let rem = self.uri("rem-");
                self.graph.mark_nested(&m, &rem).expect("member is aggregated");
                self.nodes.push(Term::uri(rem));
            }
            26..=29 => {
                let other = self.foreign_uri();
                self.graph.add_similar_to(other.as_str()).expect("absolute URI");
                self.nodes.push(Term::uri(other));
            }
            _ => {
                let subject = self.subject();
                let predicate = self.predicate();
                let object = if predicate == v.rdf_type {
                    Term::uri(Uri::parse(self.rng.pick(CLASSES)).expect("static"))
                } else {
                    match self.rng.below(20) {
                        0..=6 => Term::literal(self.literal()),
                        7..=10 => Term::blank(self.blank()),
                        11..=14 => self.rng.pick(&self.nodes).clone(),
                        15..=17 => Term::uri(self.uri("x")),
                        _ => Term::uri(self.foreign_uri()),
                    }
                };
                self.add(Triple::new(subject, predicate, object).expect("subject is a node"));
            }
        }
    }
}

/// A random graph that passes lax validation, with at most `max_triples`
/// triples (at least 4). It mixes proxies, `fst:followedBy` chains, nested
/// maps, foreign `ore:similarTo` targets, blank nodes and literals with
/// awkward text, languages and datatypes.
pub fn random_graph(rng: &mut Lcg, max_triples: usize) -> OreGraph {
    assert!(max_triples >= 4, "a valid graph needs at least 4 triples");
    let base = format!("http://example.org/g{}/", rng.below(1_000_000));
    let rem = Uri::parse(&format!("{base}rem")).expect("static");
    let agg = Uri::parse(&format!("{base}agg")).expect("static");
    let first = Uri::parse(&format!("{base}r0")).expect("static");
    let graph = OreGraph::new_aggregation(&rem, &agg, std::slice::from_ref(&first)).expect("valid identities");
    let target = graph.len() + rng.below(max_triples - graph.len() + 1);
    let mut b = Builder {
        rng,
        graph,
        base,
        nodes: vec![Term::uri(rem), Term::uri(agg), Term::uri(first.clone())],
        members: vec![first],
        proxies: Vec::new(),
        fresh: 0,
    };
    let mut attempts = 0;
    while b.graph.len() + 3 <= target && attempts < 20 * max_triples {
        attempts += 1;
        b.step();
    }
    b.graph
}

/// Unconstrained triples over a small vocabulary and node pool, for checking
/// inference and connectivity against brute-force oracles. Never contains
/// `ore:describes`.
pub fn random_triples(rng: &mut Lcg, max_triples: usize) -> Vec<Triple> {
    let v = vocab();
    let predicates = [
        &v.aggregates,
        &v.is_aggregated_by,
        &v.is_described_by,
        &v.has_part,
        &v.see_also,
        &v.creator,
        &v.similar_to,
        &v.references,
    ];
    let uris: Vec<Uri> = (0..10)
        .map(|i| Uri::parse(&format!("http://example.org/n{i}")).expect("static"))
        .collect();
    let blanks: Vec<BlankId> = (0..3).map(|i| BlankId::new(format!("x{i}")).expect("static")).collect();
    let node = |rng: &mut Lcg| -> Term {
        if rng.chance(0.15) {
            Term::blank(rng.pick(&blanks).clone())
        } else {
            Term::uri(rng.pick(&uris).clone())
        }
    };
    let n = rng.below(max_triples + 1);
    (0..n)
        .map(|_| {
            let s = node(rng);
            let p = rng.pick(&predicates).to_owned().clone();
            let o = if rng.chance(0.15) {
                Term::literal(Literal::plain(format!("lit{}", rng.below(3))).expect("static"))
            } else {
                node(rng)
            };
            Triple::new(s, p, o).expect("node subject")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::{validate, Level};

    #[test]
    fn random_graphs_are_valid_and_bounded() {
        let mut rng = Lcg::new(42);
        for _ in 0..200 {
            let g = random_graph(&mut rng, 60);
            assert!(g.len() <= 60);
            let report = validate(&g, Level::Lax);
            assert!(report.valid, "{:?}", report.findings);
        }
    }

    #[test]
    fn same_seed_same_graph() {
        let a = random_graph(&mut Lcg::new(5), 100);
        let b = random_graph(&mut Lcg::new(5), 100);
        assert_eq!(a, b);
    }
}
