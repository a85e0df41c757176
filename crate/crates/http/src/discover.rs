use ore_core::serialize::parse;
use ore_core::{OreGraph, Uri, WireDocument, WireError, WireFormat};
use serde::Serialize;
use thiserror::Error;

use crate::fetch::{FetchError, Fetcher};

pub const MAX_REDIRECTS: usize = 5;

/// Accept header sent when no format is preferred.
pub const ACCEPT_ANY_MAP: &str = "application/rdf+xml, application/atom+xml;q=0.9";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FetchStep {
    pub request_uri: Uri,
    pub status: u16,
    pub location: Option<String>,
    pub content_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchTrace {
    pub steps: Vec<FetchStep>,
    pub final_uri: Uri,
    pub doc: Option<WireDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscoverError {
    #[error("{0} is not an http(s) URI")]
    NotHttp(Uri),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("more than {MAX_REDIRECTS} redirects starting at {}", .0.steps[0].request_uri)]
    TooManyRedirects(FetchTrace),
    #[error("no resource map at {} (status {})", .0.final_uri, .0.steps.last().map_or(0, |s| s.status))]
    NoResourceMap(FetchTrace),
    #[error("redirect from {from} to unusable location {location:?}")]
    BadLocation { from: Uri, location: String },
    #[error("resource map at {uri} does not parse: {source}")]
    Parse { uri: Uri, source: WireError },
}

impl DiscoverError {
    /// Stable code for reports.
    pub fn code(&self) -> &'static str {
        match self {
            DiscoverError::NotHttp(_) => "not_http",
            DiscoverError::Fetch(FetchError::Budget(_)) => "fetch_budget",
            DiscoverError::Fetch(_) => "unreachable",
            DiscoverError::TooManyRedirects(_) => "too_many_redirects",
            DiscoverError::NoResourceMap(_) => "no_resource_map",
            DiscoverError::BadLocation { .. } => "bad_location",
            DiscoverError::Parse { .. } => "parse_error",
        }
    }
}

/// Dereferences `agg_uri` the way a Cool-URI client does: GET with an Accept
/// header, follow up to [`MAX_REDIRECTS`] redirects, parse the first 200 that
/// carries a resource map media type.
pub fn discover(agg_uri: &Uri, preferred: Option<WireFormat>, fetcher: &dyn Fetcher) -> Result<FetchTrace, DiscoverError> {
    discover_graph(agg_uri, preferred, fetcher).map(|(trace, _)| trace)
}

pub(crate) fn discover_graph(
    agg_uri: &Uri,
    preferred: Option<WireFormat>,
    fetcher: &dyn Fetcher,
) -> Result<(FetchTrace, OreGraph), DiscoverError> {
    if !agg_uri.is_http() {
        return Err(DiscoverError::NotHttp(agg_uri.clone()));
    }
    let accept = preferred.map_or(ACCEPT_ANY_MAP, WireFormat::media_type);
    let mut steps = Vec::new();
    let mut current = agg_uri.clone();
    loop {
        let response = fetcher.fetch(&current, Some(accept))?;
        let location = response.header("Location").map(str::to_owned);
        let content_type = response.header("Content-Type").map(str::to_owned);
        steps.push(FetchStep {
            request_uri: current.clone(),
            status: response.status,
            location: location.clone(),
            content_type: content_type.clone(),
        });
        let trace = |steps: Vec<FetchStep>, doc| FetchTrace {
            steps,
            final_uri: current.clone(),
            doc,
        };
        if response.is_redirect() {
            let Some(location) = location else {
                return Err(DiscoverError::NoResourceMap(trace(steps, None)));
            };
            if steps.len() > MAX_REDIRECTS {
                return Err(DiscoverError::TooManyRedirects(trace(steps, None)));
            }
            let next = current
                .without_fragment()
                .resolve(&location)
                .ok()
                .filter(Uri::is_http)
                .ok_or_else(|| DiscoverError::BadLocation {
                    from: current.clone(),
                    location: location.clone(),
                })?;
            current = next;
            continue;
        }
        let format = content_type.as_deref().and_then(WireFormat::from_media_type);
        let (200, Some(format)) = (response.status, format) else {
            return Err(DiscoverError::NoResourceMap(trace(steps, None)));
        };
        let doc = WireDocument::new(format, response.body).with_source(current.clone());
        let graph = parse(&doc).map_err(|source| DiscoverError::Parse {
            uri: current.clone(),
            source,
        })?;
        return Ok((trace(steps, Some(doc)), graph));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub authoritative: bool,
    /// Format whose negotiation reached the map, when authoritative.
    pub via: Option<WireFormat>,
    /// Why the map is not authoritative.
    pub reason: Option<String>,
}

impl Verdict {
    fn no(reason: String) -> Verdict {
        Verdict {
            authoritative: false,
            via: None,
            reason: Some(reason),
        }
    }
}

/// A resource map is authoritative for an aggregation when dereferencing the
/// aggregation URI, for some requested format, ends at the map's URI.
/// Failures never propagate; they become a negative verdict with a reason.
pub fn check_authority(rem_uri: &Uri, agg_uri: &Uri, fetcher: &dyn Fetcher) -> Verdict {
    if rem_uri == agg_uri {
        return Verdict::no("resource map URI equals the aggregation URI".to_owned());
    }
    if !rem_uri.is_http() || !agg_uri.is_http() {
        return Verdict::no("only http(s) URIs can be dereferenced".to_owned());
    }
    let target = rem_uri.without_fragment();
    let mut reasons = Vec::new();
    for format in WireFormat::ALL {
        match discover(agg_uri, Some(format), fetcher) {
            Ok(trace) if trace.final_uri == target => {
                return Verdict {
                    authoritative: true,
                    via: Some(format),
                    reason: None,
                }
            }
            Ok(trace) => reasons.push(format!("{format}: ends at {}", trace.final_uri)),
            Err(e) => reasons.push(format!("{format}: {e}")),
        }
    }
    Verdict::no(reasons.join("; "))
}

pub fn is_authoritative(rem_uri: &Uri, agg_uri: &Uri, fetcher: &dyn Fetcher) -> bool {
    check_authority(rem_uri, agg_uri, fetcher).authoritative
}
