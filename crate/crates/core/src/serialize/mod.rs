//! Wire formats for Resource Maps: RDF/XML and Atom.
//!
//! Both writers are canonical: the same graph always produces the same bytes
//! (UTF-8, LF line endings, 2-space indent, attributes sorted by name), and
//! blank nodes are relabelled `b0`, `b1`, ... in first-use order.

mod atom;
mod rdfxml;
pub(crate) mod xml;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ModelError, OreGraph};
use crate::uri::Uri;

pub use atom::{from_atom, to_atom, to_atom_with_warnings, UPDATED_PLACEHOLDER};
pub use rdfxml::{from_rdfxml, parse_rdfxml_triples, to_rdfxml};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WireFormat {
    Rdfxml,
    Atom,
}

impl WireFormat {
    pub const ALL: [WireFormat; 2] = [WireFormat::Rdfxml, WireFormat::Atom];

    pub fn media_type(self) -> &'static str {
        match self {
            WireFormat::Rdfxml => "application/rdf+xml",
            WireFormat::Atom => "application/atom+xml",
        }
    }

    /// Matches a `Content-Type` value, ignoring parameters and case.
    pub fn from_media_type(value: &str) -> Option<WireFormat> {
        let essence = value.split(';').next()?.trim();
        WireFormat::ALL
            .into_iter()
            .find(|f| f.media_type().eq_ignore_ascii_case(essence))
    }

    /// Conventional file extension.
    pub fn extension(self) -> &'static str {
        match self {
            WireFormat::Rdfxml => "rdf",
            WireFormat::Atom => "atom",
        }
    }
}

impl fmt::Display for WireFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WireFormat::Rdfxml => "rdfxml",
            WireFormat::Atom => "atom",
        })
    }
}

impl FromStr for WireFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rdfxml" | "rdf" => Ok(WireFormat::Rdfxml),
            "atom" => Ok(WireFormat::Atom),
            other => Err(format!("unknown format {other:?} (expected rdfxml or atom)")),
        }
    }
}

/// Serialized Resource Map bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireDocument {
    pub format: WireFormat,
    pub bytes: Vec<u8>,
    pub source_uri: Option<Uri>,
}

impl WireDocument {
    pub fn new(format: WireFormat, bytes: impl Into<Vec<u8>>) -> WireDocument {
        WireDocument {
            format,
            bytes: bytes.into(),
            source_uri: None,
        }
    }

    pub fn with_source(mut self, source: Uri) -> WireDocument {
        self.source_uri = Some(source);
        self
    }

    pub fn media_type(&self) -> &'static str {
        self.format.media_type()
    }

    pub fn as_str(&self) -> Option<&str> {
        std::str::from_utf8(&self.bytes).ok()
    }

    /// Tags raw bytes with a format chosen from the root element.
    pub fn detect(bytes: impl Into<Vec<u8>>) -> Result<WireDocument, WireError> {
        let bytes = bytes.into();
        let format = detect_format(&bytes)?;
        Ok(WireDocument::new(format, bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("malformed XML: {0}")]
    XmlMalformed(String),
    #[error("unsupported RDF/XML construct: {0}")]
    UnsupportedRdfXml(String),
    #[error("relative URI {0:?} with no xml:base or source URI to resolve it against")]
    NoBase(String),
    #[error("no ore:describes triple (cannot tell which aggregation is described)")]
    NoDescribes,
    #[error("{0} ore:describes triples; exactly one is required")]
    AmbiguousDescribes(usize),
    #[error("expected a single Atom entry, found {0}")]
    NotSingleEntry(usize),
    #[error("unrecognized root element {0}")]
    UnknownRoot(String),
    #[error("expected a {expected} document, got {found}")]
    WrongFormat { expected: WireFormat, found: WireFormat },
    #[error("invalid content: {0}")]
    InvalidContent(String),
    #[error("graph cannot be serialized: {0}")]
    InvalidGraph(String),
    #[error("predicate {0} cannot be written as an XML name")]
    UnserializablePredicate(String),
}

impl From<ModelError> for WireError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NoDescribes => WireError::NoDescribes,
            ModelError::AmbiguousDescribes(n) => WireError::AmbiguousDescribes(n),
            ModelError::InvalidGraph(msg) => WireError::InvalidGraph(msg),
            other => WireError::InvalidContent(other.to_string()),
        }
    }
}

/// Picks the format from the document's root element.
pub fn detect_format(bytes: &[u8]) -> Result<WireFormat, WireError> {
    let root = xml::parse_document(bytes).map_err(WireError::XmlMalformed)?;
    if root.is(crate::vocab::ATOM, "entry") || root.is(crate::vocab::ATOM, "feed") {
        Ok(WireFormat::Atom)
    } else if root.ns.as_deref() == Some(crate::vocab::RDF) {
        // rdf:RDF, or a bare rdf:Description root
        Ok(WireFormat::Rdfxml)
    } else {
        Err(WireError::UnknownRoot(root.qualified()))
    }
}

pub fn parse(doc: &WireDocument) -> Result<OreGraph, WireError> {
    match doc.format {
        WireFormat::Rdfxml => from_rdfxml(doc),
        WireFormat::Atom => from_atom(doc),
    }
}

pub fn serialize(graph: &OreGraph, format: WireFormat) -> Result<WireDocument, WireError> {
    match format {
        WireFormat::Rdfxml => to_rdfxml(graph),
        WireFormat::Atom => to_atom(graph),
    }
}

/// Parses with the document's own format and re-serializes as `target`.
/// Converting to the same format canonicalizes.
pub fn convert(doc: &WireDocument, target: WireFormat) -> Result<WireDocument, WireError> {
    let graph = parse(doc)?;
    serialize(&graph, target)
}

fn check_format(doc: &WireDocument, expected: WireFormat) -> Result<(), WireError> {
    if doc.format == expected {
        Ok(())
    } else {
        Err(WireError::WrongFormat {
            expected,
            found: doc.format,
        })
    }
}
