use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::warn;
use ore_core::fixtures::{load_corpus, Corpus, CorpusError};
use ore_core::serialize::parse;
use ore_core::{OreGraph, Uri, WireFormat};

use crate::service::{PublishError, PublishOptions, Service};

/// What a directory load published and what it had to leave out.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadSummary {
    pub published: Vec<Uri>,
    pub redirects: usize,
    pub skipped: Vec<(PathBuf, String)>,
}

impl Service {
    /// Publishes every graph of a generated corpus in both formats, plus
    /// its manifest redirects.
    pub fn publish_corpus(&self, corpus: &Corpus, options: PublishOptions) -> Result<usize, PublishError> {
        for graph in &corpus.graphs {
            self.publish_graph(graph, options)?;
        }
        for (from, to) in &corpus.manifest.redirects {
            self.add_redirect(from, to)?;
        }
        Ok(corpus.graphs.len())
    }

    /// Publishes a corpus directory. Documents describing one aggregation
    /// become the variants of one entry. Documents that do not parse, and
    /// entries the service refuses, are skipped and reported.
    pub fn publish_dir(&self, dir: &Path, options: PublishOptions) -> Result<LoadSummary, CorpusError> {
        let loaded = load_corpus(dir)?;
        let mut summary = LoadSummary::default();
        let mut groups: BTreeMap<Uri, Vec<(PathBuf, WireFormat, OreGraph)>> = BTreeMap::new();
        for (path, doc) in loaded.documents {
            match parse(&doc) {
                Ok(graph) => groups
                    .entry(graph.agg_uri().clone())
                    .or_default()
                    .push((path, doc.format, graph)),
                Err(e) => summary.skipped.push((path, e.to_string())),
            }
        }
        for (agg, group) in groups {
            let first_path = group[0].0.clone();
            let variants = group.into_iter().map(|(_, f, g)| (f, g)).collect();
            match self.publish(variants, options) {
                Ok(_) => summary.published.push(agg),
                Err(e) => summary.skipped.push((first_path, e.to_string())),
            }
        }
        for (path, manifest) in &loaded.manifests {
            for (from, to) in &manifest.redirects {
                match self.add_redirect(from, to) {
                    Ok(()) => summary.redirects += 1,
                    Err(e) => summary.skipped.push((path.clone(), e.to_string())),
                }
            }
        }
        for (path, reason) in &summary.skipped {
            warn!("skipped {}: {reason}", path.display());
        }
        Ok(summary)
    }
}
