use num_bigint::BigInt;
use num_rational::BigRational;

use super::SchemeParams;

/// Exact communication cost of one run.
///
/// The unit depends on the producer: FTP counts `F_{q0}` symbols, the
/// baselines count symbols of the field they run over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub upload: u128,
    pub download: u128,
    pub output: u128,
    /// `output / (upload + download)`.
    pub rate: BigRational,
}

impl CostReport {
    pub fn new(upload: u128, download: u128, output: u128) -> Self {
        let rate = BigRational::new(BigInt::from(output), BigInt::from(upload + download));
        Self { upload, download, output, rate }
    }

    /// Counts, server by server, the `F_{q0}` coefficients each message carries:
    /// a full `F_q` element has `∏ p_j` of them, an `F_i` element `∏_{j≠i} p_j`.
    pub fn for_scheme(scheme: &SchemeParams) -> Self {
        let tower = scheme.tower();
        let dims = scheme.dims();
        let w = scheme.block_width() as u128;
        let full = tower.degree() as u128;
        let (a, c) = (dims.a as u128, dims.c as u128);
        let mut upload = 0u128;
        let mut download = 0u128;
        for j in 0..scheme.servers() {
            upload += (a * w + w * c) * full;
            for (i, _) in scheme.server_weights(j) {
                download += a * c * tower.subfield_degree(*i) as u128;
            }
        }
        Self::new(upload, download, a * c * full)
    }
}
