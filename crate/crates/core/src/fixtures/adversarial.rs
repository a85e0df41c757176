use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{add_literal, base_dir, Corpus, CorpusManifest, FixtureError};
use crate::graph::OreGraph;
use crate::serialize::{WireDocument, WireFormat};
use crate::uri::Uri;
use crate::vocab::{vocab, DCTERMS, ORE, RDF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversarialKind {
    /// A nests B, B nests A.
    Cycle,
    /// A parseable map with a triple island.
    Disconnected,
    /// A map with two `ore:describes` triples.
    DoubleDescribes,
    /// Two URIs redirecting to each other.
    RedirectLoop,
}

impl AdversarialKind {
    pub const ALL: [AdversarialKind; 4] = [
        AdversarialKind::Cycle,
        AdversarialKind::Disconnected,
        AdversarialKind::DoubleDescribes,
        AdversarialKind::RedirectLoop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdversarialKind::Cycle => "cycle",
            AdversarialKind::Disconnected => "disconnected",
            AdversarialKind::DoubleDescribes => "double_describes",
            AdversarialKind::RedirectLoop => "redirect_loop",
        }
    }
}

impl fmt::Display for AdversarialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversarialKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AdversarialKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('_', "-") == s)
            .ok_or_else(|| format!("unknown adversarial kind {s:?}"))
    }
}

pub fn gen_adversarial(base: &Uri, kind: AdversarialKind) -> Result<Corpus, FixtureError> {
    let root = format!("{}{}", base_dir(base), kind.name());
    let uri = |s: &str| Uri::parse(&format!("{root}/{s}"));
    let mut manifest = CorpusManifest::new(kind.name(), 0, base);
    let mut graphs = Vec::new();
    let mut raw = Vec::new();
    let v = vocab();

    match kind {
        AdversarialKind::Cycle => {
            let (a, b) = (uri("A")?, uri("B")?);
            for (me, other) in [(&a, &b), (&b, &a)] {
                let rem = me.with_suffix(".rdf")?;
                let mut g = OreGraph::new_aggregation(&rem, me, std::slice::from_ref(other))?;
                g.mark_nested(other, &other.with_suffix(".rdf")?)?;
                add_literal(&mut g, &rem, &v.modified, "2008-10-01T00:00:00Z")?;
                graphs.push(g);
            }
            manifest.seeds = vec![a.clone()];
            manifest.agg_uris = vec![a, b];
            manifest.expected_crawl_nodes = 2;
        }
        AdversarialKind::Disconnected => {
            let body = format!(
                r#"  <rdf:Description rdf:about="{rem}">
    <ore:describes rdf:resource="{agg}"/>
  </rdf:Description>
  <rdf:Description rdf:about="{agg}">
    <ore:aggregates rdf:resource="{member}"/>
  </rdf:Description>
  <rdf:Description rdf:about="{island}">
    <dcterms:creator>Nobody links here</dcterms:creator>
  </rdf:Description>
"#,
                rem = uri("map.rdf")?,
                agg = uri("agg")?,
                member = uri("member")?,
                island = uri("island")?,
            );
            raw.push(rdf_document(&body));
            manifest.agg_uris = vec![uri("agg")?];
        }
        AdversarialKind::DoubleDescribes => {
            let body = format!(
                r#"  <rdf:Description rdf:about="{rem}">
    <ore:describes rdf:resource="{a}"/>
    <ore:describes rdf:resource="{b}"/>
  </rdf:Description>
  <rdf:Description rdf:about="{a}">
    <ore:aggregates rdf:resource="{member}"/>
  </rdf:Description>
"#,
                rem = uri("map.rdf")?,
                a = uri("A")?,
                b = uri("B")?,
                member = uri("member")?,
            );
            raw.push(rdf_document(&body));
        }
        AdversarialKind::RedirectLoop => {
            let (a, b) = (uri("A")?, uri("B")?);
            manifest.redirects = vec![(a.clone(), b.clone()), (b, a.clone())];
            manifest.seeds = vec![a];
        }
    }
    Ok(Corpus {
        kind: kind.name().to_owned(),
        graphs,
        raw,
        manifest,
    })
}

fn rdf_document(body: &str) -> WireDocument {
    WireDocument::new(
        WireFormat::Rdfxml,
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rdf:RDF xmlns:dcterms=\"{DCTERMS}\" xmlns:ore=\"{ORE}\" xmlns:rdf=\"{RDF}\">\n{body}</rdf:RDF>\n"
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::serialize::{from_rdfxml, parse_rdfxml_triples, WireError};
    use crate::validate::{validate, Level, CONNECTED};

    fn base() -> Uri {
        Uri::parse("http://localhost:8080/").unwrap()
    }

    #[test]
    fn disconnected_parses_but_fails_validation() {
        let corpus = gen_adversarial(&base(), AdversarialKind::Disconnected).unwrap();
        let g = from_rdfxml(&corpus.raw[0]).unwrap();
        assert!(validate(&g, Level::Lax).has_error(CONNECTED));
    }

    #[test]
    fn double_describes_is_ambiguous() {
        let corpus = gen_adversarial(&base(), AdversarialKind::DoubleDescribes).unwrap();
        assert_eq!(from_rdfxml(&corpus.raw[0]), Err(WireError::AmbiguousDescribes(2)));
        assert_eq!(parse_rdfxml_triples(&corpus.raw[0].bytes, None).unwrap().len(), 3);
    }

    #[test]
    fn cycle_graphs_are_valid() {
        let corpus = gen_adversarial(&base(), AdversarialKind::Cycle).unwrap();
        assert_eq!(corpus.graphs.len(), 2);
        for g in &corpus.graphs {
            assert!(validate(g, Level::Strict).valid);
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in AdversarialKind::ALL {
            assert_eq!(kind.name().parse::<AdversarialKind>(), Ok(kind));
        }
        assert!("redirect-loop".parse::<AdversarialKind>().is_ok());
    }
}
