use std::sync::Arc;

use ore_core::fixtures::{gen_jstor, JstorParams};
use ore_core::{aggregation_view, Uri, WireFormat};
use ore_http::{
    discover, negotiate, FakeNetwork, Fetcher, PublishOptions, Request, Response, Service, ServiceConfig,
    AGGREGATION_REL,
};
use ore_testkit::choose;
use proptest::prelude::*;

#[path = "support/matrix.rs"]
mod matrix;

use matrix::{ex, fig2_with_proxy, fixture, ATOM, RDF};

#[test]
fn conformance_matrix() {
    let outcomes = matrix::run();
    assert!(outcomes.len() >= 20);
    for (line, ok) in &outcomes {
        println!("{} {line}", if *ok { "ok  " } else { "FAIL" });
    }
    assert!(outcomes.iter().all(|(_, ok)| *ok));
}

/// The twenty-row negotiation table, checked against the testkit parser.
#[test]
fn negotiation_agrees_with_reference_parser() {
    let table = [
        "application/atom+xml",
        "application/rdf+xml",
        "*/*",
        "application/rdf+xml;q=0.4, application/atom+xml;q=0.9",
        "application/atom+xml;q=0.4, application/rdf+xml;q=0.9",
        "application/*",
        "application/*;q=0.3, application/atom+xml;q=0.2",
        "*/*;q=0.1, application/atom+xml",
        "*/*, application/rdf+xml;q=0",
        "text/html",
        "text/html, */*;q=0.01",
        "text/*, application/atom+xml;q=0.5",
        "application/atom+xml;q=0, application/rdf+xml;q=0",
        "application/xml, application/atom+xml;q=0.8",
        "APPLICATION/RDF+XML",
        "application/atom+xml; charset=utf-8; q=0.6, application/rdf+xml; q=0.59",
        "application/rdf+xml;q=0.5, application/atom+xml;q=0.5",
        "*/*;q=0.2, application/*;q=0.7, application/rdf+xml;q=0.1",
        "application/atom+xml;q=0.001",
        "application/atom+xml;q=1.0, application/rdf+xml;q=1",
    ];
    let both = [WireFormat::Rdfxml, WireFormat::Atom];
    for accept in table {
        let ours = negotiate(Some(accept), &both, WireFormat::Rdfxml, &both).ok();
        let theirs = choose(accept, &[RDF, ATOM]);
        assert_eq!(
            ours.as_ref().map(|r| (r.chosen.media_type(), r.quality)),
            theirs,
            "Accept: {accept}"
        );
    }
}

fn range() -> impl Strategy<Value = String> {
    let media = prop::sample::select(vec![
        RDF,
        ATOM,
        "application/*",
        "*/*",
        "text/html",
        "text/*",
        "application/xml",
    ]);
    let q = prop_oneof![Just(None), (0u32..=1000).prop_map(Some)];
    (media, q).prop_map(|(m, q)| match q {
        None => m.to_owned(),
        Some(q) => format!("{m};q={}", f64::from(q) / 1000.0),
    })
}

proptest! {
    #[test]
    fn negotiation_matches_reference(ranges in prop::collection::vec(range(), 1..6), atom_first in any::<bool>()) {
        let header = ranges.join(", ");
        let pref = if atom_first { [WireFormat::Atom, WireFormat::Rdfxml] } else { [WireFormat::Rdfxml, WireFormat::Atom] };
        let offered: Vec<&str> = pref.iter().map(|f| f.media_type()).collect();
        let ours = negotiate(Some(&header), &pref, pref[0], &pref).ok();
        let theirs = choose(&header, &offered);
        prop_assert_eq!(ours.as_ref().map(|r| (r.chosen.media_type(), r.quality)), theirs);
        if let Some(r) = ours {
            prop_assert!(r.quality > 0.0);
        }
    }
}

/// Every aggregation redirect leads to a 200 inside the service, aggregation
/// URIs never answer 200, and replies are replay-deterministic.
#[test]
fn redirects_are_never_dangling() {
    let base = Uri::parse("http://localhost:8080/").unwrap();
    let (graphs, _) = gen_jstor(&base, &JstorParams::default()).unwrap();
    let service = Service::new(ServiceConfig::new(base));
    for g in &graphs {
        service.publish_graph(g, PublishOptions::default()).unwrap();
    }
    let accepts = [None, Some(RDF), Some(ATOM), Some("*/*"), Some("text/html")];
    for entry in service.entries() {
        for accept in accepts {
            let mut request = Request::get(&service.local_path(&entry.agg_uri));
            if let Some(a) = accept {
                request = request.header("Accept", a);
            }
            let first = service.handle(&request);
            assert_eq!(first, service.handle(&request), "replay");
            assert!(matches!(first.status, 303 | 406), "{} answered {}", entry.agg_uri, first.status);
            if first.status == 303 {
                let location = Uri::parse(first.header("Location").unwrap()).unwrap();
                let map = service.handle(&Request::get(location.path_and_query()));
                assert_eq!(map.status, 200);
                let format = WireFormat::from_media_type(map.header("Content-Type").unwrap()).unwrap();
                assert_eq!(map.body, entry.variants[&format].doc.bytes);
            }
        }
    }
}

#[test]
fn jstor_page_proxies_resolve() {
    let base = Uri::parse("http://localhost:8080/").unwrap();
    let (graphs, _) = gen_jstor(&base, &JstorParams::default()).unwrap();
    let article = graphs.iter().find(|g| g.agg_uri().as_str().ends_with("/j1/i1/a1")).unwrap();
    let service = Arc::new(Service::new(ServiceConfig::new(base)));
    service.publish_graph(article, PublishOptions::default()).unwrap();
    let network = FakeNetwork::new().mount(service.clone());

    let view = aggregation_view(article).unwrap();
    assert_eq!(view.proxies.len(), 4);
    for p in &view.proxies {
        let proxy_at = service.local_uri(&p.proxy_uri);
        let response: Response = network.fetch(&proxy_at, None).unwrap();
        assert_eq!(response.status, 303);
        assert_eq!(response.header("Location"), Some(p.proxy_for.as_str()));
        let links = response.headers_named("Link");
        assert_eq!(links, [format!("<{}>; rel=\"{AGGREGATION_REL}\"", p.proxy_in).as_str()]);
    }
}

#[test]
fn publish_then_discover_preserves_triples() {
    let f = fixture();
    let network = FakeNetwork::new().mount(Arc::new(f.service));
    let g = fig2_with_proxy();
    for format in WireFormat::ALL {
        let trace = discover(g.agg_uri(), Some(format), &network).unwrap();
        let statuses: Vec<u16> = trace.steps.iter().map(|s| s.status).collect();
        assert_eq!(statuses, [303, 200]);
        let doc = trace.doc.unwrap();
        assert_eq!(doc.format, format);
        let parsed = ore_core::serialize::parse(&doc).unwrap();
        let expected = if format == WireFormat::Atom { g.with_rem_uri(&ex("ReM-1.atom")).unwrap() } else { g.clone() };
        assert_eq!(parsed.triples(), expected.triples());
    }
}

/// Readers racing a publisher see either no entry or a complete one.
#[test]
fn publishing_is_atomic_for_readers() {
    let base = Uri::parse("http://localhost:8080/").unwrap();
    let (graphs, _) = gen_jstor(&base, &JstorParams::default()).unwrap();
    let service = Service::new(ServiceConfig::new(base));
    std::thread::scope(|scope| {
        scope.spawn(|| {
            for g in &graphs {
                service.publish_graph(g, PublishOptions::default()).unwrap();
            }
        });
        for _ in 0..4 {
            scope.spawn(|| {
                for _ in 0..20 {
                    for g in graphs.iter().rev() {
                        let agg = service.handle(&Request::get(g.agg_uri().path_and_query()));
                        if agg.status == 404 {
                            continue;
                        }
                        let location = Uri::parse(agg.header("Location").unwrap()).unwrap();
                        assert_eq!(service.handle(&Request::get(location.path_and_query())).status, 200);
                    }
                }
            });
        }
    });
    assert_eq!(service.entries().len(), graphs.len());
}
