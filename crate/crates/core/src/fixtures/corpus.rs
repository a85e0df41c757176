use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{Corpus, CorpusManifest};
use crate::serialize::{to_atom, to_rdfxml, WireDocument, WireError, WireFormat};
use crate::uri::{BadUri, Uri};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Wire { path: PathBuf, source: WireError },
    #[error("{path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    BadUri(#[from] BadUri),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_owned(),
        source,
    }
}

/// The Atom map URI paired with an RDF/XML map URI: `.rdf` becomes `.atom`,
/// anything else gets `.atom` appended.
pub fn atom_rem_uri(rem: &Uri) -> Result<Uri, BadUri> {
    match rem.as_str().strip_suffix(".rdf") {
        Some(stem) => Uri::parse(&format!("{stem}.atom")),
        None => rem.with_suffix(".atom"),
    }
}

/// Writes `<root>/<kind>/<n>.rdf`, `<n>.atom` and `manifest.json`. Returns the
/// files written, in order.
pub fn write_corpus(root: &Path, corpus: &Corpus) -> Result<Vec<PathBuf>, CorpusError> {
    let dir = root.join(&corpus.kind);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut written = Vec::new();
    let mut write = |name: String, bytes: &[u8]| -> Result<(), CorpusError> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))?;
        written.push(path);
        Ok(())
    };
    for (n, g) in corpus.graphs.iter().enumerate() {
        let wire = |path: String| move |source| CorpusError::Wire {
            path: PathBuf::from(path),
            source,
        };
        let rdf = to_rdfxml(g).map_err(wire(format!("{n}.rdf")))?;
        write(format!("{n}.rdf"), &rdf.bytes)?;
        let atom_graph = g
            .with_rem_uri(&atom_rem_uri(g.rem_uri())?)
            .map_err(|e| CorpusError::Wire {
                path: PathBuf::from(format!("{n}.atom")),
                source: e.into(),
            })?;
        let atom = to_atom(&atom_graph).map_err(wire(format!("{n}.atom")))?;
        write(format!("{n}.atom"), &atom.bytes)?;
    }
    for (k, doc) in corpus.raw.iter().enumerate() {
        let n = corpus.graphs.len() + k;
        write(format!("{n}.{}", doc.format.extension()), &doc.bytes)?;
    }
    let manifest = serde_json::to_vec_pretty(&corpus.manifest).expect("manifest serializes");
    write("manifest.json".into(), &manifest)?;
    Ok(written)
}

/// Everything found under a corpus directory.
#[derive(Debug, Default)]
pub struct LoadedCorpus {
    pub documents: Vec<(PathBuf, WireDocument)>,
    pub manifests: Vec<(PathBuf, CorpusManifest)>,
}

/// Reads every `.rdf` / `.atom` document and `manifest.json` below `dir`,
/// in path order. Documents are not parsed.
pub fn load_corpus(dir: &Path) -> Result<LoadedCorpus, CorpusError> {
    let mut files = Vec::new();
    collect(dir, &mut files)?;
    files.sort();
    let mut out = LoadedCorpus::default();
    for path in files {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
        if name == "manifest.json" {
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            let manifest = serde_json::from_slice(&bytes).map_err(|source| CorpusError::Manifest {
                path: path.clone(),
                source,
            })?;
            out.manifests.push((path, manifest));
        } else if let Some(format) = match ext {
            "rdf" => Some(WireFormat::Rdfxml),
            "atom" => Some(WireFormat::Atom),
            _ => None,
        } {
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            out.documents.push((path, WireDocument::new(format, bytes)));
        }
    }
    Ok(out)
}

fn collect(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CorpusError> {
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_dir() {
            collect(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}
