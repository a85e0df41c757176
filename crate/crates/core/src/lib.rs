//! OAI-ORE aggregations as RDF triple graphs.
//!
//! [`OreGraph`] holds one Resource Map: the triples describing a single
//! Aggregation, anchored by an `ore:describes` triple. [`validate`] checks the
//! model constraints, [`aggregation_view`] gives an ordered read model, and
//! [`serialize`] converts to and from RDF/XML and Atom.

pub mod fixtures;
pub mod graph;
pub mod serialize;
pub mod term;
pub mod uri;
pub mod validate;
pub mod view;
pub mod vocab;

pub use graph::{ModelError, OreGraph};
pub use serialize::{WireDocument, WireError, WireFormat};
pub use term::{BlankId, Literal, Term, TermError, Triple};
pub use uri::{BadUri, Uri};
pub use validate::{validate, Finding, Level, Severity, ValidationReport};
pub use view::{aggregation_view, AggregationView, Proxy};
pub use vocab::vocab;
