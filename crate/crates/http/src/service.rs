use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Component, Path, PathBuf};
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use log::{debug, info};
use ore_core::serialize::serialize;
use ore_core::view::proxies;
use ore_core::{validate, Level, OreGraph, Proxy, Uri, WireDocument, WireFormat};
use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::crawl::{crawl, CrawlLimits, CrawlOptions, Relation};
use crate::fetch::{FetchError, Fetcher};
use crate::message::{Request, Response};
use crate::negotiate::negotiate;

/// `rel` value of the Link header on proxy redirects.
pub const AGGREGATION_REL: &str = "http://www.openarchives.org/ore/terms/aggregation";
pub const MIRROR_PREFIX: &str = "/mirror/";

/// Everything but RFC 3986 unreserved characters.
const COMPONENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

const TEXT: &str = "text/plain; charset=utf-8";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Origin of the service, e.g. `http://localhost:8080/`. URIs with this
    /// scheme and authority are served at their own path.
    pub base: Uri,
    pub default_format: WireFormat,
    /// Tie-break order for negotiation.
    pub preference: Vec<WireFormat>,
    /// Static files for `/ui`. A placeholder page is served when unset.
    pub ui_dir: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(base: Uri) -> ServiceConfig {
        ServiceConfig {
            base,
            default_format: WireFormat::Rdfxml,
            preference: vec![WireFormat::Rdfxml, WireFormat::Atom],
            ui_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub rem_uri: Uri,
    pub doc: WireDocument,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublishedEntry {
    pub agg_uri: Uri,
    pub variants: BTreeMap<WireFormat, Variant>,
    pub proxies: Vec<Proxy>,
    pub default_format: WireFormat,
}

impl PublishedEntry {
    pub fn formats(&self) -> Vec<WireFormat> {
        self.variants.keys().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PublishOptions {
    /// Overwrite an already published aggregation.
    pub replace: bool,
    /// Accept URIs outside the service origin and serve them under `/mirror/`.
    pub mirror: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PublishError {
    #[error("nothing to publish")]
    NoVariants,
    #[error("variants describe different aggregations: {0} and {1}")]
    MixedAggregations(Uri, Uri),
    #[error("{0} is already published")]
    DuplicateAggregation(Uri),
    #[error("two {0} variants for one aggregation")]
    DuplicateFormat(WireFormat),
    #[error("resource map URI {0} is reused within the entry")]
    RemCollision(Uri),
    #[error("{0} is outside the service origin; publish with mirroring enabled")]
    ForeignUri(Uri),
    #[error("path {path} is already taken by {owner}")]
    RouteConflict { path: String, owner: Uri },
    #[error("invalid graph for {agg}: {reason}")]
    InvalidGraph { agg: Uri, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Route {
    Aggregation(Uri),
    Map(Uri, WireFormat),
    Proxy { target: Uri, agg: Uri },
    Redirect(Uri),
}

impl Route {
    fn owner(&self) -> &Uri {
        match self {
            Route::Aggregation(agg) | Route::Map(agg, _) | Route::Proxy { agg, .. } => agg,
            Route::Redirect(to) => to,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Catalog {
    entries: BTreeMap<Uri, Arc<PublishedEntry>>,
    routes: HashMap<String, Route>,
}

/// Publication service. Readers take a snapshot of the catalog, writers
/// build a new catalog and swap it in, so a request never sees half of a
/// publish.
#[derive(Debug)]
pub struct Service {
    config: ServiceConfig,
    catalog: RwLock<Arc<Catalog>>,
    writer: Mutex<()>,
}

impl Service {
    pub fn new(config: ServiceConfig) -> Service {
        Service {
            config,
            catalog: RwLock::new(Arc::new(Catalog::default())),
            writer: Mutex::new(()),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    fn snapshot(&self) -> Arc<Catalog> {
        self.catalog.read().unwrap_or_else(PoisonError::into_inner).clone()
    }

    fn update<T>(&self, edit: impl FnOnce(&mut Catalog) -> Result<T, PublishError>) -> Result<T, PublishError> {
        let _writer = self.writer.lock().unwrap_or_else(PoisonError::into_inner);
        let mut next = (*self.snapshot()).clone();
        let out = edit(&mut next)?;
        *self.catalog.write().unwrap_or_else(PoisonError::into_inner) = Arc::new(next);
        Ok(out)
    }

    pub fn entries(&self) -> Vec<Arc<PublishedEntry>> {
        self.snapshot().entries.values().cloned().collect()
    }

    pub fn entry(&self, agg: &Uri) -> Option<Arc<PublishedEntry>> {
        self.snapshot().entries.get(agg).cloned()
    }

    fn is_local(&self, uri: &Uri) -> bool {
        uri.scheme() == self.config.base.scheme() && uri.authority() == self.config.base.authority()
    }

    fn origin(&self) -> String {
        let base = self.config.base.as_str();
        base[..base.len() - self.config.base.path_and_query().len()].to_owned()
    }

    /// Request target under which `uri` is served. Foreign URIs and URIs
    /// with a fragment live under `/mirror/<percent-encoded URI>`.
    pub fn local_path(&self, uri: &Uri) -> String {
        if self.is_local(uri) && !uri.as_str().contains('#') {
            uri.path_and_query().to_owned()
        } else {
            format!("{MIRROR_PREFIX}{}", utf8_percent_encode(uri.as_str(), COMPONENT))
        }
    }

    /// Absolute URI that reaches `uri` through this service.
    pub fn local_uri(&self, uri: &Uri) -> Uri {
        let path = self.local_path(uri);
        Uri::parse(&format!("{}{path}", self.origin())).expect("origin plus path is a URI")
    }

    /// Publishes one aggregation in one or more formats.
    pub fn publish(
        &self,
        variants: Vec<(WireFormat, OreGraph)>,
        options: PublishOptions,
    ) -> Result<Arc<PublishedEntry>, PublishError> {
        let entry = Arc::new(self.prepare(variants, options)?);
        let routes = self.routes_for(&entry);
        self.update(|catalog| {
            let agg = &entry.agg_uri;
            if catalog.entries.contains_key(agg) {
                if !options.replace {
                    return Err(PublishError::DuplicateAggregation(agg.clone()));
                }
                catalog
                    .routes
                    .retain(|_, r| !matches!(r, Route::Aggregation(a) | Route::Map(a, _) | Route::Proxy { agg: a, .. } if a == agg));
            }
            for (path, _) in &routes {
                if let Some(existing) = catalog.routes.get(path) {
                    return Err(PublishError::RouteConflict {
                        path: path.clone(),
                        owner: existing.owner().clone(),
                    });
                }
            }
            catalog.routes.extend(routes);
            catalog.entries.insert(agg.clone(), entry.clone());
            Ok(())
        })?;
        info!("published {} ({} variants)", entry.agg_uri, entry.variants.len());
        Ok(entry)
    }

    /// Publishes a graph as RDF/XML at its own ReM URI and as Atom at the
    /// `.atom` sibling.
    pub fn publish_graph(&self, graph: &OreGraph, options: PublishOptions) -> Result<Arc<PublishedEntry>, PublishError> {
        let invalid = |reason: String| PublishError::InvalidGraph {
            agg: graph.agg_uri().clone(),
            reason,
        };
        let atom_rem = ore_core::fixtures::atom_rem_uri(graph.rem_uri()).map_err(|e| invalid(e.to_string()))?;
        let atom = graph.with_rem_uri(&atom_rem).map_err(|e| invalid(e.to_string()))?;
        self.publish(vec![(WireFormat::Rdfxml, graph.clone()), (WireFormat::Atom, atom)], options)
    }

    fn prepare(&self, variants: Vec<(WireFormat, OreGraph)>, options: PublishOptions) -> Result<PublishedEntry, PublishError> {
        let Some((_, first)) = variants.first() else {
            return Err(PublishError::NoVariants);
        };
        let agg = first.agg_uri().clone();
        let mut out = BTreeMap::new();
        let mut all_proxies = BTreeSet::new();
        let mut seen_rems = BTreeSet::from([agg.clone()]);
        for (format, graph) in &variants {
            if graph.agg_uri() != &agg {
                return Err(PublishError::MixedAggregations(agg, graph.agg_uri().clone()));
            }
            let report = validate(graph, Level::Lax);
            if !report.valid {
                return Err(PublishError::InvalidGraph {
                    agg,
                    reason: report.error_summary(),
                });
            }
            if out.contains_key(format) {
                return Err(PublishError::DuplicateFormat(*format));
            }
            if !seen_rems.insert(graph.rem_uri().clone()) {
                return Err(PublishError::RemCollision(graph.rem_uri().clone()));
            }
            let doc = serialize(graph, *format).map_err(|e| PublishError::InvalidGraph {
                agg: agg.clone(),
                reason: e.to_string(),
            })?;
            all_proxies.extend(proxies(graph).into_iter().filter(|p| p.proxy_in == agg));
            out.insert(
                *format,
                Variant {
                    rem_uri: graph.rem_uri().clone(),
                    doc,
                },
            );
        }
        let entry = PublishedEntry {
            default_format: if out.contains_key(&self.config.default_format) {
                self.config.default_format
            } else {
                *out.keys().next().expect("at least one variant")
            },
            agg_uri: agg,
            variants: out,
            proxies: all_proxies.into_iter().collect(),
        };
        if !options.mirror {
            let uris = std::iter::once(&entry.agg_uri)
                .chain(entry.variants.values().map(|v| &v.rem_uri))
                .chain(entry.proxies.iter().map(|p| &p.proxy_uri));
            for uri in uris {
                if !self.is_local(uri) {
                    return Err(PublishError::ForeignUri(uri.clone()));
                }
            }
        }
        Ok(entry)
    }

    fn routes_for(&self, entry: &PublishedEntry) -> Vec<(String, Route)> {
        let agg = &entry.agg_uri;
        let mut routes = vec![(self.local_path(agg), Route::Aggregation(agg.clone()))];
        for (format, v) in &entry.variants {
            routes.push((self.local_path(&v.rem_uri), Route::Map(agg.clone(), *format)));
        }
        for p in &entry.proxies {
            routes.push((
                self.local_path(&p.proxy_uri),
                Route::Proxy {
                    target: p.proxy_for.clone(),
                    agg: agg.clone(),
                },
            ));
        }
        routes
    }

    /// Answers `from` with a 302 to `to`. Used for redirect fixtures.
    pub fn add_redirect(&self, from: &Uri, to: &Uri) -> Result<(), PublishError> {
        let path = self.local_path(from);
        let route = Route::Redirect(to.clone());
        self.update(|catalog| {
            if let Some(existing) = catalog.routes.get(&path) {
                return Err(PublishError::RouteConflict {
                    path: path.clone(),
                    owner: existing.owner().clone(),
                });
            }
            catalog.routes.insert(path.clone(), route);
            Ok(())
        })
    }

    pub fn handle(&self, request: &Request) -> Response {
        let head = request.method.eq_ignore_ascii_case("HEAD");
        let mut response = if head || request.method.eq_ignore_ascii_case("GET") {
            self.route(request)
        } else {
            Response::new(405)
                .with_header("Allow", "GET, HEAD")
                .with_body(TEXT, "method not allowed\n")
        };
        if head {
            response.body.clear();
        }
        debug!("{} {} -> {}", request.method, request.target, response.status);
        response
    }

    fn route(&self, request: &Request) -> Response {
        let catalog = self.snapshot();
        let Some(route) = catalog.routes.get(&request.target) else {
            let path = request.path();
            if path == "/crawl" {
                return self.crawl_endpoint(request);
            }
            if path == "/ui" || path.starts_with("/ui/") {
                return self.ui(path);
            }
            return not_found();
        };
        match route {
            Route::Aggregation(agg) => {
                let entry = &catalog.entries[agg];
                let accept = request.header_value("Accept");
                match negotiate(accept.as_deref(), &entry.formats(), entry.default_format, &self.config.preference) {
                    Ok(choice) => {
                        let rem = &entry.variants[&choice.chosen].rem_uri;
                        Response::new(303)
                            .with_header("Location", self.local_uri(rem).as_str())
                            .with_header("Vary", "Accept")
                    }
                    Err(_) => {
                        let offered: Vec<&str> = entry.formats().iter().map(|f| f.media_type()).collect();
                        Response::new(406)
                            .with_header("Vary", "Accept")
                            .with_body(TEXT, format!("available: {}\n", offered.join(", ")))
                    }
                }
            }
            Route::Map(agg, format) => {
                let doc = &catalog.entries[agg].variants[format].doc;
                let etag = etag(&doc.bytes);
                if request
                    .header_value("If-None-Match")
                    .is_some_and(|header| etag_matches(&header, &etag))
                {
                    return Response::new(304).with_header("ETag", etag);
                }
                Response::new(200)
                    .with_body(format.media_type(), doc.bytes.clone())
                    .with_header("ETag", etag)
                    .with_header("Content-Length", doc.bytes.len().to_string())
            }
            Route::Proxy { target, agg } => Response::new(303)
                .with_header("Location", target.as_str())
                .with_header("Link", format!("<{agg}>; rel=\"{AGGREGATION_REL}\"")),
            Route::Redirect(to) => Response::new(302).with_header("Location", self.local_uri(to).as_str()),
        }
    }

    /// `GET /crawl?seed=<uri>[&seed=..][&depth=n][&max_nodes=n][&max_fetches=n][&follow=a,b]`
    /// crawls this service's own content and returns the CrawlResult JSON.
    fn crawl_endpoint(&self, request: &Request) -> Response {
        let mut seeds = Vec::new();
        let mut options = CrawlOptions::default();
        for (key, value) in url::form_urlencoded::parse(request.query().unwrap_or_default().as_bytes()) {
            let parsed = match key.as_ref() {
                "seed" => Uri::parse(&value).map(|u| seeds.push(u)).map_err(|e| e.to_string()),
                "depth" => parse_limit(&value).map(|n| options.limits.max_depth = n),
                "max_nodes" => parse_limit(&value).map(|n| options.limits.max_nodes = n),
                "max_fetches" => parse_limit(&value).map(|n| options.limits.max_fetches = n),
                "follow" => Relation::parse_list(&value).map(|set| options.follow = set),
                _ => Err(format!("unknown parameter {key:?}")),
            };
            if let Err(reason) = parsed {
                return Response::new(400).with_body(TEXT, format!("{reason}\n"));
            }
        }
        if seeds.is_empty() {
            return Response::new(400).with_body(TEXT, "missing seed\n");
        }
        options.limits.max_fetches = options.limits.max_fetches.min(CrawlLimits::default().max_fetches);
        let result = crawl(&seeds, &options, &LocalFetcher(self));
        let json = serde_json::to_vec_pretty(&result.to_json()).expect("crawl JSON serializes");
        Response::new(200).with_body("application/json", json)
    }

    fn ui(&self, path: &str) -> Response {
        let rest = path.strip_prefix("/ui").unwrap_or_default().trim_start_matches('/');
        let rest = if rest.is_empty() { "index.html" } else { rest };
        let Some(dir) = &self.config.ui_dir else {
            return if rest == "index.html" {
                Response::new(200).with_body("text/html; charset=utf-8", PLACEHOLDER_UI)
            } else {
                not_found()
            };
        };
        let relative = Path::new(rest);
        if relative.components().any(|c| !matches!(c, Component::Normal(_))) {
            return not_found();
        }
        match std::fs::read(dir.join(relative)) {
            Ok(bytes) => Response::new(200).with_body(content_type_for(relative), bytes),
            Err(_) => not_found(),
        }
    }
}

const PLACEHOLDER_UI: &str = "<!doctype html>\n<title>ORE explorer</title>\n<p>No UI bundle configured. \
Resource maps are served at their own URIs and <code>/crawl?seed=...</code> returns crawl results as JSON.</p>\n";

fn content_type_for(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript; charset=utf-8",
        Some("css") => "text/css; charset=utf-8",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        _ => "application/octet-stream",
    }
}

fn parse_limit(value: &str) -> Result<usize, String> {
    value.parse().map_err(|_| format!("not a number: {value:?}"))
}

fn not_found() -> Response {
    Response::new(404).with_body(TEXT, "not found\n")
}

/// Strong validator: quoted hex SHA-256 of the body.
pub fn etag(bytes: &[u8]) -> String {
    format!("\"{}\"", hex::encode(Sha256::digest(bytes)))
}

fn etag_matches(header: &str, etag: &str) -> bool {
    header
        .split(',')
        .map(str::trim)
        .any(|candidate| candidate == "*" || candidate.strip_prefix("W/").unwrap_or(candidate) == etag)
}

/// Fetches through a service without sockets. URIs outside the origin are
/// looked up under `/mirror/`.
pub struct LocalFetcher<'s>(pub &'s Service);

impl Fetcher for LocalFetcher<'_> {
    fn fetch(&self, uri: &Uri, accept: Option<&str>) -> Result<Response, FetchError> {
        let mut request = Request::get(&self.0.local_path(uri));
        if let Some(accept) = accept {
            request = request.header("Accept", accept);
        }
        Ok(self.0.handle(&request))
    }
}
