use serde::{Deserialize, Serialize};

use super::{add_literal, base_dir, proxy_chain, Corpus, CorpusManifest, FixtureError, Lcg};
use crate::graph::OreGraph;
use crate::term::Triple;
use crate::uri::Uri;
use crate::vocab::vocab;

/// Shape of a journal / issue / article / page hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JstorParams {
    pub journals: usize,
    pub issues_per: usize,
    pub articles_per: usize,
    pub pages_per: usize,
    /// Probability that an ordered pair of distinct articles is a citation.
    pub citation_density: f64,
    pub seed: u64,
}

impl Default for JstorParams {
    fn default() -> Self {
        JstorParams {
            journals: 2,
            issues_per: 2,
            articles_per: 3,
            pages_per: 4,
            citation_density: 0.1,
            seed: 1,
        }
    }
}

const MODIFIED: &str = "2008-10-01T00:00:00Z";
const CREATOR: &str = "Foresite JSTOR fixture";

struct Node {
    agg: Uri,
    title: String,
    parent: Option<Uri>,
    children: Vec<Uri>,
    /// Aggregated but not chained (the article PDF, page images).
    extras: Vec<Uri>,
    nested: bool,
}

fn rem_of(agg: &Uri) -> Result<Uri, FixtureError> {
    Ok(agg.with_suffix(".rdf")?)
}

/// Journals aggregate issues, issues aggregate articles, articles aggregate
/// page sub-aggregations plus a PDF; each page aggregates its full-size and
/// thumbnail images. Sibling order is a `fst:followedBy` chain over proxies,
/// children point to their maps with `ore:isDescribedBy` and back to their
/// parent with `ore:isAggregatedBy`, and articles cite each other with
/// `dcterms:references`.
pub fn gen_jstor(base: &Uri, params: &JstorParams) -> Result<(Vec<OreGraph>, CorpusManifest), FixtureError> {
    let p = params;
    if p.journals == 0 || p.issues_per == 0 || p.articles_per == 0 || p.pages_per == 0 {
        return Err(FixtureError::BadParams("all counts must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p.citation_density) {
        return Err(FixtureError::BadParams(format!(
            "citation density {} is outside [0, 1]",
            p.citation_density
        )));
    }
    let root = format!("{}jstor", base_dir(base));
    let uri = |path: String| Uri::parse(&path);

    // one level at a time so graphs come out journals, issues, articles, pages
    let mut levels: Vec<Vec<Node>> = vec![Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for j in 1..=p.journals {
        let journal = uri(format!("{root}/j{j}"))?;
        let issues: Vec<Uri> = (1..=p.issues_per).map(|i| uri(format!("{journal}/i{i}"))).collect::<Result<_, _>>()?;
        for (i, issue) in issues.iter().enumerate() {
            let articles: Vec<Uri> =
                (1..=p.articles_per).map(|a| uri(format!("{issue}/a{a}"))).collect::<Result<_, _>>()?;
            for (a, article) in articles.iter().enumerate() {
                let pages: Vec<Uri> = (1..=p.pages_per).map(|n| uri(format!("{article}/p{n}"))).collect::<Result<_, _>>()?;
                for (n, page) in pages.iter().enumerate() {
                    levels[3].push(Node {
                        agg: page.clone(),
                        title: format!("Journal {j}, issue {}, article {}, page {}", i + 1, a + 1, n + 1),
                        parent: Some(article.clone()),
                        children: Vec::new(),
                        extras: vec![uri(format!("{page}/full.gif"))?, uri(format!("{page}/thumb.gif"))?],
                        nested: false,
                    });
                }
                levels[2].push(Node {
                    agg: article.clone(),
                    title: format!("Journal {j}, issue {}, article {}", i + 1, a + 1),
                    parent: Some(issue.clone()),
                    children: pages,
                    extras: vec![uri(format!("{article}/article.pdf"))?],
                    nested: true,
                });
            }
            levels[1].push(Node {
                agg: issue.clone(),
                title: format!("Journal {j}, issue {}", i + 1),
                parent: Some(journal.clone()),
                children: articles,
                extras: Vec::new(),
                nested: true,
            });
        }
        levels[0].push(Node {
            agg: journal.clone(),
            title: format!("Journal {j}"),
            parent: None,
            children: issues,
            extras: Vec::new(),
            nested: true,
        });
    }

    let mut rng = Lcg::new(p.seed);
    let articles: Vec<&Uri> = levels[2].iter().map(|n| &n.agg).collect();
    let mut citations = Vec::new();
    for from in &articles {
        for to in &articles {
            if from != to && rng.chance(p.citation_density) {
                citations.push(((*from).clone(), (*to).clone()));
            }
        }
    }

    let v = vocab();
    let mut graphs = Vec::new();
    for node in levels.iter().flatten() {
        let rem = rem_of(&node.agg)?;
        let members: Vec<Uri> = node.children.iter().chain(&node.extras).cloned().collect();
        let mut g = OreGraph::new_aggregation(&rem, &node.agg, &members)?;
        add_literal(&mut g, &rem, &v.creator, CREATOR)?;
        add_literal(&mut g, &rem, &v.modified, MODIFIED)?;
        add_literal(&mut g, &node.agg, &v.title, &node.title)?;
        if node.nested {
            for child in &node.children {
                g.mark_nested(child, &rem_of(child)?)?;
            }
        }
        proxy_chain(&mut g, &node.agg, &node.children)?;
        if let Some(parent) = &node.parent {
            g.add_triple(Triple::uris(&node.agg, &v.is_aggregated_by, parent))?;
        }
        for (from, to) in &citations {
            if from == &node.agg {
                g.add_triple(Triple::uris(from, &v.references, to))?;
            }
        }
        graphs.push(g);
    }

    let mut manifest = CorpusManifest::new("jstor", p.seed, base);
    let n_pages = levels[3].len();
    for (key, n) in [
        ("journals", levels[0].len()),
        ("issues", levels[1].len()),
        ("articles", levels[2].len()),
        ("pages", n_pages),
        ("formats", levels[2].len()),
        ("page_images", n_pages * 2),
        ("citations", citations.len()),
    ] {
        manifest.counts.insert(key.to_owned(), n);
    }
    manifest.agg_uris = graphs.iter().map(|g| g.agg_uri().clone()).collect();
    manifest.seeds = levels[0].iter().map(|n| n.agg.clone()).collect();
    manifest.expected_crawl_nodes = graphs.len();
    manifest.citation_pairs = citations;
    Ok((graphs, manifest))
}

impl Corpus {
    pub fn jstor(base: &Uri, params: &JstorParams) -> Result<Corpus, FixtureError> {
        let (graphs, manifest) = gen_jstor(base, params)?;
        Ok(Corpus {
            kind: "jstor".into(),
            graphs,
            raw: Vec::new(),
            manifest,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::{validate, Level};
    use crate::view::aggregation_view;

    fn base() -> Uri {
        Uri::parse("http://localhost:8080/").unwrap()
    }

    #[test]
    fn default_shape() {
        let (graphs, manifest) = gen_jstor(&base(), &JstorParams::default()).unwrap();
        assert_eq!(graphs.len(), 2 + 4 + 12 + 48);
        assert_eq!(manifest.expected_crawl_nodes, 66);
        assert_eq!(manifest.seeds.len(), 2);
        for g in &graphs {
            let report = validate(g, Level::Strict);
            assert!(report.findings.is_empty(), "{}: {:?}", g.agg_uri(), report.findings);
        }
        let article = graphs.iter().find(|g| g.agg_uri().as_str().ends_with("j1/i1/a1")).unwrap();
        let view = aggregation_view(article).unwrap();
        assert_eq!(view.aggregated.len(), 5);
        assert_eq!(view.proxies.len(), 4);
        assert_eq!(article.with_predicate(&vocab().followed_by).count(), 3);
        assert!(view.aggregated[0].as_str().ends_with("/p1"));
        assert!(view.aggregated[3].as_str().ends_with("/p4"));
    }

    #[test]
    fn zero_density_means_no_citations() {
        let params = JstorParams {
            citation_density: 0.0,
            ..JstorParams::default()
        };
        let (graphs, manifest) = gen_jstor(&base(), &params).unwrap();
        assert!(manifest.citation_pairs.is_empty());
        assert!(graphs.iter().all(|g| g.with_predicate(&vocab().references).next().is_none()));
    }

    #[test]
    fn rejects_bad_params() {
        let zero = JstorParams {
            pages_per: 0,
            ..JstorParams::default()
        };
        assert!(gen_jstor(&base(), &zero).is_err());
        let dense = JstorParams {
            citation_density: 1.5,
            ..JstorParams::default()
        };
        assert!(gen_jstor(&base(), &dense).is_err());
    }
}
