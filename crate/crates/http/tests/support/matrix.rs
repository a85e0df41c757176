//! The wire conformance table: requests against a service publishing the
//! Fig. 2 map, with every status, header and body spelled out.

#![allow(dead_code)]

use ore_core::fixtures::fig2;
use ore_core::serialize::{to_atom, to_rdfxml};
use ore_core::{OreGraph, Uri, WireFormat};
use ore_http::{PublishOptions, Request, Service, ServiceConfig, AGGREGATION_REL};
use sha2::{Digest, Sha256};

pub const RDF: &str = "application/rdf+xml";
pub const ATOM: &str = "application/atom+xml";
const TEXT: &str = "text/plain; charset=utf-8";

pub fn ex(s: &str) -> Uri {
    Uri::parse(&format!("http://example.org/{s}")).unwrap()
}

/// Fig. 2 plus a proxy P-1 for AR-1.
pub fn fig2_with_proxy() -> OreGraph {
    let mut g = fig2();
    g.create_proxy(&ex("P-1"), &ex("AR-1"), &ex("A-1")).unwrap();
    g
}

pub struct Fixture {
    pub service: Service,
    pub rdf: Vec<u8>,
    pub atom: Vec<u8>,
}

pub fn fixture() -> Fixture {
    let service = Service::new(ServiceConfig::new(ex("")));
    let g = fig2_with_proxy();
    service.publish_graph(&g, PublishOptions::default()).unwrap();
    let atom_only = OreGraph::new_aggregation(&ex("ReM-B.atom"), &ex("B-1"), &[ex("AR-1")]).unwrap();
    service
        .publish(vec![(WireFormat::Atom, atom_only)], PublishOptions::default())
        .unwrap();
    Fixture {
        service,
        rdf: to_rdfxml(&g).unwrap().bytes,
        atom: to_atom(&g.with_rem_uri(&ex("ReM-1.atom")).unwrap()).unwrap().bytes,
    }
}

/// Independent ETag: quoted lowercase hex SHA-256.
fn tag(bytes: &[u8]) -> String {
    let hex: String = Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect();
    format!("\"{hex}\"")
}

#[derive(Clone)]
enum Body {
    Empty,
    Bytes(Vec<u8>),
}

struct Case {
    name: &'static str,
    method: &'static str,
    target: &'static str,
    request: Vec<(&'static str, String)>,
    status: u16,
    headers: Vec<(&'static str, String)>,
    body: Body,
}

fn get(name: &'static str, target: &'static str, accept: Option<&str>) -> Case {
    Case {
        name,
        method: "GET",
        target,
        request: accept.map(|a| ("Accept", a.to_owned())).into_iter().collect(),
        status: 0,
        headers: Vec::new(),
        body: Body::Empty,
    }
}

impl Case {
    fn method(mut self, method: &'static str) -> Case {
        self.method = method;
        self
    }

    fn with(mut self, name: &'static str, value: impl Into<String>) -> Case {
        self.request.push((name, value.into()));
        self
    }

    fn expect(mut self, status: u16, headers: &[(&'static str, String)], body: Body) -> Case {
        self.status = status;
        self.headers = headers.to_vec();
        self.body = body;
        self
    }
}

fn see_other(location: &str) -> Vec<(&'static str, String)> {
    vec![("Location", location.to_owned()), ("Vary", "Accept".to_owned())]
}

/// Runs every case against a fresh service. One entry per case: a
/// printable line and whether it passed.
pub fn run() -> Vec<(String, bool)> {
    let f = fixture();
    let rdf_tag = tag(&f.rdf);
    let atom_tag = tag(&f.atom);
    let to_rdf = see_other("http://example.org/ReM-1");
    let to_atom = see_other("http://example.org/ReM-1.atom");
    let rdf_ok = vec![
        ("Content-Type", RDF.to_owned()),
        ("ETag", rdf_tag.clone()),
        ("Content-Length", f.rdf.len().to_string()),
    ];
    let atom_ok = vec![
        ("Content-Type", ATOM.to_owned()),
        ("ETag", atom_tag.clone()),
        ("Content-Length", f.atom.len().to_string()),
    ];
    let not_acceptable = vec![("Vary", "Accept".to_owned()), ("Content-Type", TEXT.to_owned())];
    let link = format!("<http://example.org/A-1>; rel=\"{AGGREGATION_REL}\"");
    let proxy = vec![("Location", "http://example.org/AR-1".to_owned()), ("Link", link)];
    let text_only = vec![("Content-Type", TEXT.to_owned())];
    let not_allowed = vec![("Allow", "GET, HEAD".to_owned()), ("Content-Type", TEXT.to_owned())];
    let both = Body::Bytes(b"available: application/rdf+xml, application/atom+xml\n".to_vec());
    let missing = Body::Bytes(b"not found\n".to_vec());
    let rdf = Body::Bytes(f.rdf.clone());
    let atom = Body::Bytes(f.atom.clone());
    let agg = |name, accept, to: &Vec<(&'static str, String)>| get(name, "/A-1", accept).expect(303, to, Body::Empty);

    let cases = vec![
        agg("agg, atom accepted", Some(ATOM), &to_atom),
        agg("agg, rdf accepted", Some(RDF), &to_rdf),
        agg("agg, no Accept", None, &to_rdf),
        agg("agg, empty Accept", Some(""), &to_rdf),
        agg("agg, */*", Some("*/*"), &to_rdf),
        agg("agg, q-values favour atom", Some("application/rdf+xml;q=0.4, application/atom+xml;q=0.9"), &to_atom),
        agg("agg, q-values favour rdf", Some("application/rdf+xml;q=0.8, application/atom+xml;q=0.5"), &to_rdf),
        agg("agg, application/*", Some("application/*"), &to_rdf),
        agg("agg, exact beats wildcard", Some("*/*;q=0.1, application/atom+xml"), &to_atom),
        agg("agg, atom refused", Some("application/atom+xml;q=0, */*"), &to_rdf),
        agg("agg, rdf refused", Some("application/rdf+xml;q=0, */*"), &to_atom),
        agg("agg, equal q uses preference", Some("application/atom+xml;q=0.5, application/rdf+xml;q=0.5"), &to_rdf),
        agg("agg, html and atom", Some("text/html, application/atom+xml;q=0.2"), &to_atom),
        agg("agg, HEAD", Some(ATOM), &to_atom).method("HEAD"),
        get("agg, html only", "/A-1", Some("text/html")).expect(406, &not_acceptable, both.clone()),
        get("agg, everything q=0", "/A-1", Some("application/rdf+xml;q=0, application/atom+xml;q=0"))
            .expect(406, &not_acceptable, both.clone()),
        get("atom-only agg, rdf wanted", "/B-1", Some(RDF))
            .expect(406, &not_acceptable, Body::Bytes(b"available: application/atom+xml\n".to_vec())),
        get("atom-only agg, no Accept", "/B-1", None).expect(303, &see_other("http://example.org/ReM-B.atom"), Body::Empty),
        get("rem rdf", "/ReM-1", None).expect(200, &rdf_ok, rdf.clone()),
        get("rem atom", "/ReM-1.atom", None).expect(200, &atom_ok, atom),
        get("rem is not negotiated", "/ReM-1", Some(ATOM)).expect(200, &rdf_ok, rdf.clone()),
        get("rem HEAD", "/ReM-1", None).method("HEAD").expect(200, &rdf_ok, Body::Empty),
        get("rem, matching If-None-Match", "/ReM-1", None)
            .with("If-None-Match", rdf_tag.clone())
            .expect(304, &[("ETag", rdf_tag.clone())], Body::Empty),
        get("rem, If-None-Match list", "/ReM-1.atom", None)
            .with("If-None-Match", format!("\"x\", {atom_tag}"))
            .expect(304, &[("ETag", atom_tag.clone())], Body::Empty),
        get("rem, If-None-Match *", "/ReM-1", None)
            .with("If-None-Match", "*")
            .expect(304, &[("ETag", rdf_tag.clone())], Body::Empty),
        get("rem, stale If-None-Match", "/ReM-1", None)
            .with("If-None-Match", atom_tag.clone())
            .expect(200, &rdf_ok, rdf),
        get("proxy", "/P-1", Some(ATOM)).expect(303, &proxy, Body::Empty),
        get("proxy HEAD", "/P-1", None).method("HEAD").expect(303, &proxy, Body::Empty),
        get("unknown path", "/nothing", None).expect(404, &text_only, missing.clone()),
        get("query makes a different resource", "/A-1?x=1", None).expect(404, &text_only, missing.clone()),
        get("aggregated resource is not published", "/AR-1", None).expect(404, &text_only, missing),
        get("POST", "/A-1", None)
            .method("POST")
            .expect(405, &not_allowed, Body::Bytes(b"method not allowed\n".to_vec())),
        get("DELETE", "/ReM-1", None)
            .method("DELETE")
            .expect(405, &not_allowed, Body::Bytes(b"method not allowed\n".to_vec())),
    ];

    let mut outcomes = Vec::new();
    for case in &cases {
        let mut request = Request::new(case.method, case.target);
        for (n, v) in &case.request {
            request = request.header(n, v);
        }
        let response = f.service.handle(&request);
        let headers: Vec<(&str, String)> = response.headers.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
        let body_ok = match &case.body {
            Body::Empty => response.body.is_empty(),
            Body::Bytes(b) => &response.body == b,
        };
        let ok = response.status == case.status && headers == case.headers && body_ok;
        let mut line = format!("{} {} {} -> {}", case.name, case.method, case.target, response.status);
        if !ok {
            line.push_str(&format!(" {:?}", response.headers));
        }
        outcomes.push((line, ok));
    }
    outcomes
}
