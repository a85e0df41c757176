use std::net::{SocketAddr, TcpListener};
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::body::{to_bytes, Body};
use axum::extract::State;
use axum::http::{HeaderName, HeaderValue, StatusCode};
use axum::Router;
use log::{error, info};
use thiserror::Error;
use tokio::sync::oneshot;

use crate::message::{Request, Response};
use crate::service::Service;

#[derive(Debug, Error)]
#[error("cannot listen on {address}: {source}")]
pub struct BindFailure {
    pub address: String,
    pub source: std::io::Error,
}

/// A running server. Dropping it shuts the server down.
pub struct ServiceHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl ServiceHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting connections, finishes in-flight requests and waits.
    pub fn shutdown(mut self) {
        self.stop();
    }

    /// Blocks until the server stops on its own (it normally does not).
    pub fn wait(mut self) {
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }

    fn stop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}

impl Drop for ServiceHandle {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Binds synchronously, so a taken port is reported here, then serves on a
/// background runtime.
pub fn serve(service: Arc<Service>, bind: &str, port: u16) -> Result<ServiceHandle, BindFailure> {
    let address = format!("{bind}:{port}");
    let failure = |source| BindFailure {
        address: address.clone(),
        source,
    };
    let listener = TcpListener::bind(&address).map_err(failure)?;
    listener.set_nonblocking(true).map_err(failure)?;
    let addr = listener.local_addr().map_err(failure)?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .thread_name("ore-serve")
        .build()
        .map_err(failure)?;
    let (tx, rx) = oneshot::channel();
    let app = Router::new().fallback(dispatch).with_state(service);
    let thread = std::thread::spawn(move || {
        runtime.block_on(async move {
            let listener = match tokio::net::TcpListener::from_std(listener) {
                Ok(l) => l,
                Err(e) => return error!("serve: {e}"),
            };
            let stopped = async {
                let _ = rx.await;
            };
            if let Err(e) = axum::serve(listener, app).with_graceful_shutdown(stopped).await {
                error!("serve: {e}");
            }
        });
    });
    info!("listening on http://{addr}/");
    Ok(ServiceHandle {
        addr,
        shutdown: Some(tx),
        thread: Some(thread),
    })
}

async fn dispatch(State(service): State<Arc<Service>>, request: axum::extract::Request) -> axum::response::Response {
    let target = request.uri().path_and_query().map_or("/", |pq| pq.as_str()).to_owned();
    let headers = request
        .headers()
        .iter()
        .filter_map(|(n, v)| Some((n.as_str().to_owned(), v.to_str().ok()?.to_owned())))
        .collect();
    let ours = Request {
        method: request.method().as_str().to_owned(),
        target,
        headers,
    };
    // the body is ignored, but drain it so keep-alive connections stay usable
    let _ = to_bytes(request.into_body(), 64 * 1024).await;
    let response = tokio::task::spawn_blocking(move || service.handle(&ours))
        .await
        .unwrap_or_else(|_| Response::new(500));
    into_axum(response)
}

fn into_axum(response: Response) -> axum::response::Response {
    let mut out = axum::response::Response::new(Body::from(response.body));
    *out.status_mut() = StatusCode::from_u16(response.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    for (name, value) in response.headers {
        if let (Ok(name), Ok(value)) = (HeaderName::try_from(name), HeaderValue::try_from(value)) {
            out.headers_mut().append(name, value);
        }
    }
    out
}
