use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, PoisonError};
use std::time::Duration;

use ore_core::Uri;
use thiserror::Error;

use crate::message::{Request, Response};
use crate::service::Service;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FetchError {
    #[error("cannot reach {uri}: {reason}")]
    Unreachable { uri: Uri, reason: String },
    #[error("fetch budget exhausted before {0}")]
    Budget(Uri),
}

/// One GET, no redirect following. Implementations must be shareable
/// across crawl worker threads.
pub trait Fetcher: Send + Sync {
    fn fetch(&self, uri: &Uri, accept: Option<&str>) -> Result<Response, FetchError>;
}

impl<F: Fetcher + ?Sized> Fetcher for &F {
    fn fetch(&self, uri: &Uri, accept: Option<&str>) -> Result<Response, FetchError> {
        (**self).fetch(uri, accept)
    }
}

impl<F: Fetcher + ?Sized> Fetcher for Arc<F> {
    fn fetch(&self, uri: &Uri, accept: Option<&str>) -> Result<Response, FetchError> {
        (**self).fetch(uri, accept)
    }
}

/// In-process network: services mounted by authority plus scripted
/// responses for exact URIs. Counts and logs every call.
#[derive(Default)]
pub struct FakeNetwork {
    hosts: BTreeMap<String, Arc<Service>>,
    scripted: BTreeMap<Uri, Response>,
    latency: Duration,
    calls: AtomicUsize,
    log: Mutex<Vec<Uri>>,
}

impl FakeNetwork {
    pub fn new() -> FakeNetwork {
        FakeNetwork::default()
    }

    /// Routes requests for the service's own authority to it.
    pub fn mount(mut self, service: Arc<Service>) -> FakeNetwork {
        let authority = service.config().base.authority().unwrap_or_default().to_owned();
        self.hosts.insert(authority, service);
        self
    }

    pub fn script(mut self, uri: Uri, response: Response) -> FakeNetwork {
        self.scripted.insert(uri, response);
        self
    }

    /// Sleep per call, to make parallel fetching observable.
    pub fn with_latency(mut self, latency: Duration) -> FakeNetwork {
        self.latency = latency;
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn log(&self) -> Vec<Uri> {
        self.log.lock().unwrap_or_else(PoisonError::into_inner).clone()
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::SeqCst);
        self.log.lock().unwrap_or_else(PoisonError::into_inner).clear();
    }
}

impl Fetcher for FakeNetwork {
    fn fetch(&self, uri: &Uri, accept: Option<&str>) -> Result<Response, FetchError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.log.lock().unwrap_or_else(PoisonError::into_inner).push(uri.clone());
        if !self.latency.is_zero() {
            std::thread::sleep(self.latency);
        }
        let target = uri.without_fragment();
        if let Some(response) = self.scripted.get(&target) {
            return Ok(response.clone());
        }
        let host = uri.authority().and_then(|a| self.hosts.get(a));
        let Some(service) = host.filter(|_| uri.is_http()) else {
            return Err(FetchError::Unreachable {
                uri: uri.clone(),
                reason: "no such host".to_owned(),
            });
        };
        let mut request = Request::get(target.path_and_query());
        if let Some(accept) = accept {
            request = request.header("Accept", accept);
        }
        Ok(service.handle(&request))
    }
}

/// Real HTTP over reqwest's blocking client. Redirects are reported, not
/// followed. Must not be called from inside an async runtime.
pub struct HttpFetcher {
    client: reqwest::blocking::Client,
}

impl HttpFetcher {
    pub fn new(timeout: Duration) -> HttpFetcher {
        let client = reqwest::blocking::Client::builder()
            .redirect(reqwest::redirect::Policy::none())
            .timeout(timeout)
            .user_agent(concat!("ore-crawl/", env!("CARGO_PKG_VERSION")))
            .build()
            .expect("HTTP client configuration is static");
        HttpFetcher { client }
    }
}

impl Default for HttpFetcher {
    fn default() -> HttpFetcher {
        HttpFetcher::new(Duration::from_secs(10))
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, uri: &Uri, accept: Option<&str>) -> Result<Response, FetchError> {
        let unreachable = |reason: String| FetchError::Unreachable { uri: uri.clone(), reason };
        let mut request = self.client.get(uri.without_fragment().as_str());
        if let Some(accept) = accept {
            request = request.header("Accept", accept);
        }
        let response = request.send().map_err(|e| unreachable(e.to_string()))?;
        let status = response.status().as_u16();
        let headers = response
            .headers()
            .iter()
            .filter_map(|(name, value)| Some((name.as_str().to_owned(), value.to_str().ok()?.to_owned())))
            .collect();
        let body = response.bytes().map_err(|e| unreachable(e.to_string()))?.to_vec();
        Ok(Response { status, headers, body })
    }
}
