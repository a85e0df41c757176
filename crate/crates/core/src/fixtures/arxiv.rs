use serde::{Deserialize, Serialize};

use super::{add_literal, base_dir, Corpus, CorpusManifest, FixtureError, Lcg};
use crate::graph::OreGraph;
use crate::term::Triple;
use crate::uri::Uri;
use crate::vocab::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArxivParams {
    /// Format variants aggregated by each version (PostScript, PDF, ...).
    pub n_formats: usize,
    /// Versions including the current one; earlier versions become their own
    /// aggregations.
    pub n_versions: usize,
    pub identifier: String,
    pub seed: u64,
}

impl Default for ArxivParams {
    fn default() -> Self {
        ArxivParams {
            n_formats: 4,
            n_versions: 2,
            identifier: "astro-ph/0601007".into(),
            seed: 1,
        }
    }
}

/// Path segment and label for the i-th format.
fn format_kind(i: usize) -> (String, String) {
    const KNOWN: [(&str, &str); 4] = [
        ("ps", "PostScript"),
        ("pdf", "PDF"),
        ("format", "Other formats"),
        ("e-print", "Source"),
    ];
    match KNOWN.get(i) {
        Some((seg, label)) => (seg.to_string(), label.to_string()),
        None => (format!("format{i}"), format!("Format {i}")),
    }
}

/// A document aggregation in the style of an arXiv splash page: the format
/// variants are the aggregated resources; title, authors and dates are
/// metadata; the splash page is `rdfs:seeAlso`; a journal DOI is
/// `ore:similarTo`; earlier versions are separate aggregations reached by
/// `dcterms:references` plus `ore:isDescribedBy`. Navigation links to other
/// documents are not aggregated.
pub fn gen_arxiv(base: &Uri, params: &ArxivParams) -> Result<(Vec<OreGraph>, CorpusManifest), FixtureError> {
    if params.n_formats == 0 {
        return Err(FixtureError::BadParams("n_formats must be at least 1".into()));
    }
    if params.n_versions == 0 {
        return Err(FixtureError::BadParams("n_versions must be at least 1".into()));
    }
    let root = base_dir(base);
    let id = &params.identifier;
    let v = vocab();
    let mut rng = Lcg::new(params.seed);

    // version n_versions is current and has no suffix
    let version_id = |k: usize| {
        if k == params.n_versions {
            id.clone()
        } else {
            format!("{id}v{k}")
        }
    };
    let agg_of = |k: usize| Uri::parse(&format!("{root}aggregation/{}", version_id(k)));
    let rem_of = |k: usize| Uri::parse(&format!("{root}rem/{}.rdf", version_id(k)));

    let mut graphs = Vec::new();
    for k in (1..=params.n_versions).rev() {
        let agg = agg_of(k)?;
        let rem = rem_of(k)?;
        let formats: Vec<Uri> = (0..params.n_formats)
            .map(|i| Uri::parse(&format!("{root}{}/{}", format_kind(i).0, version_id(k))))
            .collect::<Result<_, _>>()?;
        let mut g = OreGraph::new_aggregation(&rem, &agg, &formats)?;
        let title = if k == params.n_versions {
            format!("A fixture document ({id})")
        } else {
            format!("A fixture document ({id}, version {k})")
        };
        add_literal(&mut g, &agg, &v.title, &title)?;
        add_literal(&mut g, &agg, &v.creator, "Ada Astronomer")?;
        add_literal(&mut g, &agg, &v.creator, "Bo Observer")?;
        add_literal(&mut g, &agg, &v.created, &format!("2006-01-{:02}", k.min(28)))?;
        let modified = format!("2006-{:02}-15T00:00:00Z", (k % 12) + 1);
        add_literal(&mut g, &agg, &v.modified, &modified)?;
        add_literal(&mut g, &rem, &v.modified, &modified)?;
        for (i, f) in formats.iter().enumerate() {
            add_literal(&mut g, f, &v.title, &format_kind(i).1)?;
        }
        if k == params.n_versions {
            let splash = Uri::parse(&format!("{root}abs/{id}"))?;
            g.add_triple(Triple::uris(&agg, &v.see_also, &splash))?;
            let doi = format!("info:doi/10.5555/{}", 1_000_000 + rng.below(9_000_000));
            g.add_similar_to(&doi)?;
            for prior in 1..params.n_versions {
                let prior_agg = agg_of(prior)?;
                g.add_triple(Triple::uris(&agg, &v.references, &prior_agg))?;
                g.add_triple(Triple::uris(&prior_agg, &v.is_described_by, &rem_of(prior)?))?;
            }
        }
        graphs.push(g);
    }

    let mut manifest = CorpusManifest::new("arxiv", params.seed, base);
    manifest.counts.insert("formats".into(), params.n_formats);
    manifest.counts.insert("versions".into(), params.n_versions);
    manifest.agg_uris = graphs.iter().map(|g| g.agg_uri().clone()).collect();
    manifest.seeds = vec![agg_of(params.n_versions)?];
    manifest.expected_crawl_nodes = graphs.len();
    Ok((graphs, manifest))
}

impl Corpus {
    pub fn arxiv(base: &Uri, params: &ArxivParams) -> Result<Corpus, FixtureError> {
        let (graphs, manifest) = gen_arxiv(base, params)?;
        Ok(Corpus {
            kind: "arxiv".into(),
            graphs,
            raw: Vec::new(),
            manifest,
        })
    }
}
