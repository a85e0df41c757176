//! Publication service and discovery client for OAI-ORE resource maps.
//!
//! The [`Service`] answers transport-neutral [`Request`]s: aggregation URIs
//! redirect (303) to a negotiated resource map, resource map URIs return the
//! document with an ETag, and proxy URIs redirect to their target with a
//! `Link` header naming the aggregation. [`serve`] puts it on a socket.
//!
//! The client side works against any [`Fetcher`]: [`discover`] follows the
//! redirect chain from an aggregation, [`is_authoritative`] checks that a map
//! is reachable from its aggregation, and [`crawl`] walks nested, member-of
//! and citation links breadth first within limits.

pub mod crawl;
pub mod discover;
pub mod fetch;
pub mod load;
pub mod message;
pub mod negotiate;
pub mod report;
pub mod server;
pub mod service;

pub use crawl::{crawl, CrawlEdge, CrawlError, CrawlLimits, CrawlNode, CrawlOptions, CrawlResult, Relation};
pub use discover::{check_authority, discover, is_authoritative, DiscoverError, FetchStep, FetchTrace, Verdict};
pub use fetch::{FakeNetwork, FetchError, Fetcher, HttpFetcher};
pub use load::LoadSummary;
pub use message::{Request, Response};
pub use negotiate::{negotiate, NegotiationResult, NotAcceptable};
pub use report::CrawlReport;
pub use server::{serve, BindFailure, ServiceHandle};
pub use service::{
    etag, LocalFetcher, PublishError, PublishOptions, PublishedEntry, Service, ServiceConfig, Variant, AGGREGATION_REL,
};
