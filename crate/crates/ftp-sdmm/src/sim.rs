//! In-process execution with every payload serialized, so the ledger counts
//! exactly what a network run would carry.

use ftp_sdmm_core::baseline::{baseline_decode, baseline_encode, baseline_respond, BaselineError, TraditionalScheme};
use ftp_sdmm_core::ftp::{decode, encode, CostReport, SchemeError, SchemeParams, ServerContext};
use ftp_sdmm_core::{Mat, TowerElem, TowerField};

use crate::ledger::TrafficLedger;
use crate::message::{decode_responses, decode_share, encode_responses, encode_share, params_ack, ParamsMsg};
use crate::wire::{symbol_bytes, Reader, WireError, Writer};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// Encode, run all `N_L` servers and decode, serializing each share and bundle.
pub fn run_inprocess(
    scheme: &SchemeParams,
    a: &Mat<TowerElem>,
    b: &Mat<TowerElem>,
    seed: u64,
) -> Result<(Mat<TowerElem>, TrafficLedger), SimError> {
    let tower = scheme.tower();
    let mut ledger = TrafficLedger::new(scheme.servers(), symbol_bytes(tower));
    let shares = encode(scheme, a, b, seed)?;
    let mut bundles = Vec::with_capacity(shares.len());
    for share in &shares {
        let params = ParamsMsg::for_server(scheme, 0, share.server).encode(tower)?;
        ledger.record_overhead(share.server, params.encoded_len(), params_ack(0).encoded_len());
        let (frame, up) = encode_share(tower, 0, share)?;
        ledger.record_upload(share.server, up, frame.encoded_len());
        let (_, received, _) = decode_share(tower, &frame.body)?;

        let bundle = ServerContext::from_scheme(scheme, received.server).respond(&received)?;
        let (frame, down) = encode_responses(tower, 0, &bundle)?;
        ledger.record_download(bundle.server, down, frame.encoded_len());
        bundles.push(decode_responses(tower, &frame.body)?.1);
    }
    Ok((decode(scheme, &bundles)?, ledger))
}

/// Runs a traditional scheme over `tower` with whole `F_q` elements as the unit.
pub fn run_baseline_inprocess(
    tower: &TowerField,
    scheme: &TraditionalScheme<TowerElem>,
    a: &Mat<TowerElem>,
    b: &Mat<TowerElem>,
    seed: u64,
) -> Result<(Mat<TowerElem>, CostReport, TrafficLedger), SimError> {
    let mut ledger = TrafficLedger::new(scheme.servers(), symbol_bytes(tower) * tower.degree());
    let shares = baseline_encode(tower, scheme, a, b, seed)?;
    let mut answers = Vec::with_capacity(shares.len());
    for (j, share) in shares.iter().enumerate() {
        let mut w = Writer::new();
        w.mat(tower, &share.f_eval)?;
        w.mat(tower, &share.g_eval)?;
        ledger.record_upload(j, w.payload_bytes(), w.as_bytes().len());
        let bytes = w.into_bytes();
        let mut r = Reader::new(&bytes);
        let received = ftp_sdmm_core::baseline::BaselineShare { f_eval: r.mat(tower)?, g_eval: r.mat(tower)? };

        let h = baseline_respond(tower, &received)?;
        let mut w = Writer::new();
        w.mat(tower, &h)?;
        ledger.record_download(j, w.payload_bytes(), w.as_bytes().len());
        answers.push(Reader::new(w.as_bytes()).mat(tower)?);
    }
    let product = baseline_decode(tower, scheme, &answers)?;
    let cost = scheme.cost(a.rows(), a.cols(), b.cols());
    Ok((product, cost, ledger))
}
