//! Framed messages: `"FTPC"`, version, type, big-endian body length, body.

use std::io::{self, Read, Write};

use ftp_sdmm_core::ftp::{Dims, GroupResponse, ResponseBundle, SchemeParams, Share};
use ftp_sdmm_core::{BaseField, TowerElem, TowerField};

use crate::wire::{Reader, WireError, Writer};

pub const MAGIC: &[u8; 4] = b"FTPC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
/// Upper bound on accepted body sizes.
pub const MAX_BODY: u32 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    Hello = 1,
    Params = 2,
    Share = 3,
    Responses = 4,
    Error = 5,
}

impl MsgType {
    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            1 => Self::Hello,
            2 => Self::Params,
            3 => Self::Share,
            4 => Self::Responses,
            5 => Self::Error,
            _ => return None,
        })
    }
}

/// A frame as read off the wire; the type byte is kept raw so unknown
/// types can be answered with an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub version: u8,
    pub kind: u8,
    pub body: Vec<u8>,
}

impl Frame {
    pub fn new(kind: MsgType, body: Vec<u8>) -> Self {
        Self { version: VERSION, kind: kind as u8, body }
    }

    pub fn msg_type(&self) -> Result<MsgType, WireError> {
        if self.version != VERSION {
            return Err(WireError::VersionMismatch(self.version));
        }
        MsgType::from_byte(self.kind).ok_or(WireError::UnknownType(self.kind))
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.body.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(MAGIC);
        out.push(self.version);
        out.push(self.kind);
        out.extend_from_slice(&(self.body.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.body);
        out
    }

    /// Parses exactly one frame occupying all of `bytes`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(WireError::MalformedFrame("bad header"));
        }
        let len = u32::from_be_bytes(bytes[6..10].try_into().unwrap()) as usize;
        if bytes.len() - HEADER_LEN != len {
            return Err(WireError::MalformedFrame("body length mismatch"));
        }
        Ok(Self { version: bytes[4], kind: bytes[5], body: bytes[HEADER_LEN..].to_vec() })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FrameIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Wire(#[from] WireError),
}

pub fn write_frame(w: &mut impl Write, frame: &Frame) -> io::Result<()> {
    w.write_all(&frame.to_bytes())?;
    w.flush()
}

/// Reads one frame; `Ok(None)` on a clean end of stream before any header byte.
pub fn read_frame(r: &mut impl Read) -> Result<Option<Frame>, FrameIoError> {
    let mut header = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        match r.read(&mut header[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(WireError::MalformedFrame("truncated header").into()),
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    if &header[..4] != MAGIC {
        return Err(WireError::MalformedFrame("bad magic").into());
    }
    let len = u32::from_be_bytes(header[6..10].try_into().unwrap());
    if len > MAX_BODY {
        return Err(WireError::MalformedFrame("body too large").into());
    }
    let mut body = vec![0u8; len as usize];
    r.read_exact(&mut body).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => FrameIoError::Wire(WireError::MalformedFrame("truncated body")),
        _ => FrameIoError::Io(e),
    })?;
    Ok(Some(Frame { version: header[4], kind: header[5], body }))
}

/// Everything one server needs for one job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamsMsg {
    pub job_id: u64,
    pub server: usize,
    pub p: u64,
    pub d: usize,
    pub t: usize,
    pub primes: Vec<usize>,
    pub dims: Dims,
    /// `(i, v_{L+j} k_i(α_{L+j}))` for each group this server answers.
    pub weights: Vec<(usize, TowerElem)>,
}

impl ParamsMsg {
    pub fn for_server(scheme: &SchemeParams, job_id: u64, server: usize) -> Self {
        let base = scheme.tower().base();
        Self {
            job_id,
            server,
            p: base.characteristic(),
            d: base.degree(),
            t: scheme.security(),
            primes: scheme.primes().to_vec(),
            dims: scheme.dims(),
            weights: scheme.server_weights(server).to_vec(),
        }
    }

    pub fn tower(&self) -> Result<TowerField, String> {
        let base = BaseField::new(self.p, self.d).map_err(|e| e.to_string())?;
        TowerField::new(base, &self.primes).map_err(|e| e.to_string())
    }

    pub fn encode(&self, tower: &TowerField) -> Result<Frame, WireError> {
        let mut w = Writer::new();
        w.u64(self.job_id);
        w.usize(self.server)?;
        w.u32(u32::try_from(self.p).map_err(|_| WireError::MalformedFrame("p exceeds u32"))?);
        w.usize(self.d)?;
        w.usize(self.primes.len())?;
        w.usize(self.t)?;
        for &p in &self.primes {
            w.usize(p)?;
        }
        w.usize(self.dims.a)?;
        w.usize(self.dims.b)?;
        w.usize(self.dims.c)?;
        w.usize(self.weights.len())?;
        for (i, x) in &self.weights {
            w.usize(*i)?;
            w.elem(tower, x)?;
        }
        Ok(Frame::new(MsgType::Params, w.into_bytes()))
    }

    /// Decodes a Params body, building the tower it describes.
    pub fn decode(body: &[u8]) -> Result<(Self, TowerField), WireError> {
        Self::decode_with(body, |m| m.tower())
    }

    /// Like [`ParamsMsg::decode`] with a caller-supplied tower constructor (for caching).
    pub fn decode_with(
        body: &[u8],
        tower_for: impl FnOnce(&ParamsMsg) -> Result<TowerField, String>,
    ) -> Result<(Self, TowerField), WireError> {
        let mut r = Reader::new(body);
        let job_id = r.u64()?;
        let server = r.usize()?;
        let p = r.u32()? as u64;
        let d = r.usize()?;
        let l = r.usize()?;
        let t = r.usize()?;
        if l == 0 || l > 64 {
            return Err(WireError::MalformedFrame("group count"));
        }
        let primes = (0..l).map(|_| r.usize()).collect::<Result<Vec<_>, _>>()?;
        let dims = Dims::new(r.usize()?, r.usize()?, r.usize()?);
        let mut msg = Self { job_id, server, p, d, t, primes, dims, weights: Vec::new() };
        let tower = tower_for(&msg).map_err(|_| WireError::MalformedFrame("field parameters"))?;
        let n = r.usize()?;
        if n > l {
            return Err(WireError::MalformedFrame("weight count"));
        }
        for _ in 0..n {
            let i = r.usize()?;
            if i >= l {
                return Err(WireError::MalformedFrame("group index out of range"));
            }
            msg.weights.push((i, r.elem(&tower)?));
        }
        r.finish()?;
        Ok((msg, tower))
    }
}

/// Share frame plus the number of element bytes it carries.
pub fn encode_share(tower: &TowerField, job_id: u64, share: &Share) -> Result<(Frame, usize), WireError> {
    let mut w = Writer::new();
    w.u64(job_id);
    w.usize(share.server)?;
    w.mat(tower, &share.f_eval)?;
    w.mat(tower, &share.g_eval)?;
    let payload = w.payload_bytes();
    Ok((Frame::new(MsgType::Share, w.into_bytes()), payload))
}

pub fn decode_share(tower: &TowerField, body: &[u8]) -> Result<(u64, Share, usize), WireError> {
    let mut r = Reader::new(body);
    let job_id = r.u64()?;
    let server = r.usize()?;
    let f_eval = r.mat(tower)?;
    let g_eval = r.mat(tower)?;
    r.finish()?;
    Ok((job_id, Share { server, f_eval, g_eval }, r.payload_bytes()))
}

/// Peeks the job id of a Share body.
pub fn share_job_id(body: &[u8]) -> Result<u64, WireError> {
    Reader::new(body).u64()
}

pub fn encode_responses(tower: &TowerField, job_id: u64, bundle: &ResponseBundle) -> Result<(Frame, usize), WireError> {
    let mut w = Writer::new();
    w.u64(job_id);
    w.usize(bundle.server)?;
    w.usize(bundle.groups.len())?;
    for g in &bundle.groups {
        w.usize(g.group)?;
        w.subfield_mat(tower, &g.traced, g.group)?;
    }
    let payload = w.payload_bytes();
    Ok((Frame::new(MsgType::Responses, w.into_bytes()), payload))
}

pub fn decode_responses(tower: &TowerField, body: &[u8]) -> Result<(u64, ResponseBundle, usize), WireError> {
    let mut r = Reader::new(body);
    let job_id = r.u64()?;
    let server = r.usize()?;
    let n = r.usize()?;
    if n > tower.groups() {
        return Err(WireError::MalformedFrame("group count"));
    }
    let mut groups = Vec::with_capacity(n);
    for _ in 0..n {
        let group = r.usize()?;
        groups.push(GroupResponse { group, traced: r.subfield_mat(tower, group)? });
    }
    r.finish()?;
    Ok((job_id, ResponseBundle { server, groups }, r.payload_bytes()))
}

/// The server's acknowledgement of a Params frame.
pub fn params_ack(job_id: u64) -> Frame {
    text_frame(MsgType::Hello, &format!("job {job_id:016x} ready"))
}

pub fn text_frame(kind: MsgType, text: &str) -> Frame {
    Frame::new(kind, text.as_bytes().to_vec())
}

pub fn frame_text(frame: &Frame) -> String {
    String::from_utf8_lossy(&frame.body).into_owned()
}
