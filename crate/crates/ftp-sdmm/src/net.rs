//! TCP transport: a server daemon and a user-side runner.
//!
//! Per connection the exchange is strictly request/response:
//! `Params → Hello` (acknowledgement), then `Share → Responses`.
//! Any failure is answered with an `Error` frame carrying a text reason.

use std::collections::HashMap;
use std::io::{self, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use ftp_sdmm_core::ftp::{decode, encode, Dims, ResponseBundle, SchemeError, SchemeParams, ServerContext};
use ftp_sdmm_core::{Mat, TowerElem, TowerField};
use log::{debug, info, warn};

use crate::ledger::TrafficLedger;
use crate::message::{
    decode_responses, decode_share, encode_responses, encode_share, frame_text, params_ack, read_frame, share_job_id,
    text_frame, write_frame, Frame, FrameIoError, MsgType, ParamsMsg,
};
use crate::wire::{symbol_bytes, WireError};

pub const TIMEOUT_ENV: &str = "FTP_SDMM_TIMEOUT_MS";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
const JOB_CACHE_LIMIT: usize = 4096;

/// The timeout from `FTP_SDMM_TIMEOUT_MS`, or 30 s.
pub fn configured_timeout() -> Duration {
    std::env::var(TIMEOUT_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(Duration::from_millis)
        .unwrap_or(DEFAULT_TIMEOUT)
}

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("server {server}: connection failed: {reason}")]
    ConnectionFailed { server: usize, reason: String },
    #[error("server {server}: protocol error: {reason}")]
    ProtocolError { server: usize, reason: String },
    #[error("server {server}: timed out")]
    Timeout { server: usize },
    #[error("server {server} replied with an error: {message}")]
    Remote { server: usize, message: String },
    #[error("{needed} endpoints required, {got} given")]
    InvalidEndpoints { needed: usize, got: usize },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

struct Job {
    tower: TowerField,
    ctx: ServerContext,
    dims: Dims,
    width: usize,
}

#[derive(Default)]
struct State {
    jobs: HashMap<(u64, usize), Arc<Job>>,
    towers: HashMap<(u64, usize, Vec<usize>), TowerField>,
}

/// A bound server; [`Server::run`] serves until the process exits.
pub struct Server {
    listener: TcpListener,
    state: Arc<Mutex<State>>,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs) -> io::Result<Self> {
        Ok(Self { listener: TcpListener::bind(addr)?, state: Arc::default() })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn run(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            match stream {
                Ok(stream) => {
                    let state = Arc::clone(&self.state);
                    thread::spawn(move || {
                        let peer = stream.peer_addr().ok();
                        if let Err(e) = handle_connection(stream, &state) {
                            debug!("connection {peer:?} closed: {e}");
                        }
                    });
                }
                Err(e) => warn!("accept failed: {e}"),
            }
        }
        Ok(())
    }

    /// Runs on a background thread and returns the bound address.
    pub fn spawn(self) -> io::Result<SocketAddr> {
        let addr = self.local_addr()?;
        thread::spawn(move || self.run());
        Ok(addr)
    }
}

fn handle_connection(mut stream: TcpStream, state: &Mutex<State>) -> Result<(), FrameIoError> {
    let _ = stream.set_nodelay(true);
    loop {
        let frame = match read_frame(&mut stream) {
            Ok(Some(f)) => f,
            Ok(None) => return Ok(()),
            Err(FrameIoError::Wire(e)) => {
                write_frame(&mut stream, &text_frame(MsgType::Error, &e.to_string()))?;
                return Err(e.into());
            }
            Err(e) => return Err(e),
        };
        let reply = match frame.msg_type() {
            Err(e @ WireError::VersionMismatch(_)) => {
                write_frame(&mut stream, &text_frame(MsgType::Error, &e.to_string()))?;
                return Err(e.into());
            }
            Err(e) => text_frame(MsgType::Error, &e.to_string()),
            Ok(MsgType::Hello) => text_frame(MsgType::Hello, "ftp-sdmm server"),
            Ok(MsgType::Params) => match accept_params(&frame.body, state) {
                Ok(job) => params_ack(job),
                Err(reason) => text_frame(MsgType::Error, &reason),
            },
            Ok(MsgType::Share) => {
                answer_share(&frame.body, state).unwrap_or_else(|reason| text_frame(MsgType::Error, &reason))
            }
            Ok(MsgType::Responses | MsgType::Error) => text_frame(MsgType::Error, "unexpected message type"),
        };
        write_frame(&mut stream, &reply)?;
    }
}

fn accept_params(body: &[u8], state: &Mutex<State>) -> Result<u64, String> {
    let (msg, tower) = ParamsMsg::decode_with(body, |m| {
        let key = (m.p, m.d, m.primes.clone());
        if let Some(t) = state.lock().unwrap().towers.get(&key) {
            return Ok(t.clone());
        }
        let t = m.tower()?;
        state.lock().unwrap().towers.insert(key, t.clone());
        Ok(t)
    })
    .map_err(|e| e.to_string())?;
    let l = msg.primes.len();
    if msg.dims.b % l != 0 || msg.dims.a == 0 || msg.dims.b == 0 || msg.dims.c == 0 {
        return Err("invalid matrix dimensions".into());
    }
    info!("job {:016x}: server {} with {} groups", msg.job_id, msg.server, msg.weights.len());
    let job = Job {
        ctx: ServerContext::new(tower.clone(), msg.server, msg.weights.clone()),
        tower,
        dims: msg.dims,
        width: msg.dims.b / l,
    };
    let mut st = state.lock().unwrap();
    if st.jobs.len() >= JOB_CACHE_LIMIT {
        st.jobs.clear();
    }
    st.jobs.insert((msg.job_id, msg.server), Arc::new(job));
    Ok(msg.job_id)
}

fn answer_share(body: &[u8], state: &Mutex<State>) -> Result<Frame, String> {
    let job_id = share_job_id(body).map_err(|e| e.to_string())?;
    let server = crate::wire::Reader::new(&body[8.min(body.len())..]).usize().map_err(|e| e.to_string())?;
    let job = state
        .lock()
        .unwrap()
        .jobs
        .get(&(job_id, server))
        .cloned()
        .ok_or_else(|| format!("unknown job {job_id:016x} for server {server}"))?;
    let (_, share, _) = decode_share(&job.tower, body).map_err(|e| e.to_string())?;
    if share.f_eval.shape() != (job.dims.a, job.width) || share.g_eval.shape() != (job.width, job.dims.c) {
        return Err("share shape does not match the job".into());
    }
    let bundle = job.ctx.respond(&share).map_err(|e| e.to_string())?;
    let (frame, _) = encode_responses(&job.tower, job_id, &bundle).map_err(|e| e.to_string())?;
    Ok(frame)
}

fn fresh_job_id() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0));
    h.write_u32(std::process::id());
    h.finish()
}

fn io_error(server: usize, e: io::Error) -> NetError {
    match e.kind() {
        io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => NetError::Timeout { server },
        _ => NetError::ProtocolError { server, reason: e.to_string() },
    }
}

fn frame_error(server: usize, e: FrameIoError) -> NetError {
    match e {
        FrameIoError::Io(e) => io_error(server, e),
        FrameIoError::Wire(e) => NetError::ProtocolError { server, reason: e.to_string() },
    }
}

/// Sends one frame and returns the single reply frame.
fn exchange(stream: &mut TcpStream, server: usize, frame: &Frame) -> Result<Frame, NetError> {
    stream.write_all(&frame.to_bytes()).map_err(|e| io_error(server, e))?;
    stream.flush().map_err(|e| io_error(server, e))?;
    let reply = read_frame(stream)
        .map_err(|e| frame_error(server, e))?
        .ok_or_else(|| NetError::ProtocolError { server, reason: "connection closed".into() })?;
    if reply.kind == MsgType::Error as u8 {
        return Err(NetError::Remote { server, message: frame_text(&reply) });
    }
    reply.msg_type().map_err(|e| NetError::ProtocolError { server, reason: e.to_string() })?;
    Ok(reply)
}

pub fn connect(endpoint: &str, server: usize, timeout: Duration) -> Result<TcpStream, NetError> {
    let failed = |reason: String| NetError::ConnectionFailed { server, reason };
    let addrs: Vec<SocketAddr> = endpoint.to_socket_addrs().map_err(|e| failed(e.to_string()))?.collect();
    let mut last = String::from("no address");
    for addr in addrs {
        match TcpStream::connect_timeout(&addr, timeout) {
            Ok(s) => {
                s.set_read_timeout(Some(timeout)).map_err(|e| failed(e.to_string()))?;
                s.set_write_timeout(Some(timeout)).map_err(|e| failed(e.to_string()))?;
                let _ = s.set_nodelay(true);
                return Ok(s);
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(failed(last))
}

/// Sends a raw frame to `endpoint` and returns the reply; for probing servers.
pub fn send_raw(endpoint: &str, frame: &Frame, timeout: Duration) -> Result<Frame, NetError> {
    let mut s = connect(endpoint, 0, timeout)?;
    s.write_all(&frame.to_bytes()).map_err(|e| io_error(0, e))?;
    read_frame(&mut s)
        .map_err(|e| frame_error(0, e))?
        .ok_or_else(|| NetError::ProtocolError { server: 0, reason: "connection closed".into() })
}

struct Outcome {
    bundle: ResponseBundle,
    up_payload: usize,
    up_frames: usize,
    down_payload: usize,
    down_frames: usize,
    overhead_up: usize,
    overhead_down: usize,
}

/// Runs the protocol against `endpoints[j]` for each server `j`, all servers
/// concurrently. Randomness comes from `seed` exactly as in the in-process run.
pub fn run_remote(
    endpoints: &[String],
    scheme: &SchemeParams,
    a: &Mat<TowerElem>,
    b: &Mat<TowerElem>,
    seed: u64,
    timeout: Duration,
) -> Result<(Mat<TowerElem>, TrafficLedger), NetError> {
    let servers = scheme.servers();
    if endpoints.len() < servers {
        return Err(NetError::InvalidEndpoints { needed: servers, got: endpoints.len() });
    }
    let tower = scheme.tower();
    let shares = encode(scheme, a, b, seed)?;
    let job_id = fresh_job_id();

    let outcomes: Vec<Result<Outcome, NetError>> = thread::scope(|scope| {
        let handles: Vec<_> = shares
            .iter()
            .map(|share| {
                let j = share.server;
                let endpoint = &endpoints[j];
                scope.spawn(move || -> Result<Outcome, NetError> {
                    let mut stream = connect(endpoint, j, timeout)?;
                    let params_frame = ParamsMsg::for_server(scheme, job_id, j).encode(tower)?;
                    let ack = exchange(&mut stream, j, &params_frame)?;
                    if ack.kind != MsgType::Hello as u8 {
                        return Err(NetError::ProtocolError { server: j, reason: "Params not acknowledged".into() });
                    }
                    let (share_frame, up_payload) = encode_share(tower, job_id, share)?;
                    let reply = exchange(&mut stream, j, &share_frame)?;
                    if reply.kind != MsgType::Responses as u8 {
                        return Err(NetError::ProtocolError { server: j, reason: "expected Responses".into() });
                    }
                    let (got_job, bundle, down_payload) = decode_responses(tower, &reply.body)
                        .map_err(|e| NetError::ProtocolError { server: j, reason: e.to_string() })?;
                    if got_job != job_id || bundle.server != j {
                        return Err(NetError::ProtocolError { server: j, reason: "response for another job".into() });
                    }
                    Ok(Outcome {
                        bundle,
                        up_payload,
                        up_frames: share_frame.encoded_len(),
                        down_payload,
                        down_frames: reply.encoded_len(),
                        overhead_up: params_frame.encoded_len(),
                        overhead_down: ack.encoded_len(),
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("server thread panicked")).collect()
    });

    let mut ledger = TrafficLedger::new(servers, symbol_bytes(tower));
    let mut bundles = Vec::with_capacity(servers);
    for (j, outcome) in outcomes.into_iter().enumerate() {
        let o = outcome?;
        ledger.record_upload(j, o.up_payload, o.up_frames);
        ledger.record_download(j, o.down_payload, o.down_frames);
        ledger.record_overhead(j, o.overhead_up, o.overhead_down);
        bundles.push(o.bundle);
    }
    Ok((decode(scheme, &bundles)?, ledger))
}
