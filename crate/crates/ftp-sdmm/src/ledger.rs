use std::fmt;

/// Traffic on one link in one direction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counter {
    /// Symbols of the accounting field carried by element payloads.
    pub symbols: u128,
    /// Bytes of element payloads.
    pub payload_bytes: u128,
    /// Every byte on the wire, including frame headers and metadata.
    pub frame_bytes: u128,
}

impl Counter {
    fn add(&mut self, other: &Counter) {
        self.symbols += other.symbols;
        self.payload_bytes += other.payload_bytes;
        self.frame_bytes += other.frame_bytes;
    }
}

/// Per-server upload and download counters.
///
/// `bytes_per_symbol` fixes the accounting unit: `d` for `F_{q0}` symbols,
/// `d · [F_q : F_{q0}]` when whole `F_q` elements are the unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficLedger {
    pub bytes_per_symbol: usize,
    pub upload: Vec<Counter>,
    pub download: Vec<Counter>,
}

impl TrafficLedger {
    pub fn new(servers: usize, bytes_per_symbol: usize) -> Self {
        Self {
            bytes_per_symbol,
            upload: vec![Counter::default(); servers],
            download: vec![Counter::default(); servers],
        }
    }

    fn counter(&self, payload_bytes: usize, frame_bytes: usize) -> Counter {
        debug_assert_eq!(payload_bytes % self.bytes_per_symbol, 0);
        Counter {
            symbols: (payload_bytes / self.bytes_per_symbol) as u128,
            payload_bytes: payload_bytes as u128,
            frame_bytes: frame_bytes as u128,
        }
    }

    /// Records a payload-carrying upload to `server`.
    pub fn record_upload(&mut self, server: usize, payload_bytes: usize, frame_bytes: usize) {
        let c = self.counter(payload_bytes, frame_bytes);
        self.upload[server].add(&c);
    }

    pub fn record_download(&mut self, server: usize, payload_bytes: usize, frame_bytes: usize) {
        let c = self.counter(payload_bytes, frame_bytes);
        self.download[server].add(&c);
    }

    /// Control traffic (no element payload).
    pub fn record_overhead(&mut self, server: usize, up_bytes: usize, down_bytes: usize) {
        self.upload[server].frame_bytes += up_bytes as u128;
        self.download[server].frame_bytes += down_bytes as u128;
    }

    pub fn upload_total(&self) -> Counter {
        self.upload.iter().fold(Counter::default(), |mut acc, c| {
            acc.add(c);
            acc
        })
    }

    pub fn download_total(&self) -> Counter {
        self.download.iter().fold(Counter::default(), |mut acc, c| {
            acc.add(c);
            acc
        })
    }

    /// Payload bytes and symbol counts agree for every counter.
    pub fn is_consistent(&self) -> bool {
        let bps = self.bytes_per_symbol as u128;
        self.upload.iter().chain(&self.download).all(|c| c.symbols * bps == c.payload_bytes)
    }
}

impl fmt::Display for TrafficLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (u, d) = (self.upload_total(), self.download_total());
        write!(
            f,
            "upload {} symbols ({} payload bytes, {} on the wire); download {} symbols ({} payload bytes, {} on the wire)",
            u.symbols, u.payload_bytes, u.frame_bytes, d.symbols, d.payload_bytes, d.frame_bytes
        )
    }
}
