//! Byte layout of field elements and matrices.
//!
//! One `F_{q0}` symbol is `d` bytes: the base-`p` digits of the coefficient,
//! least significant first. A full `F_q` element is its flat coefficient
//! tensor (axis 1 slowest) written symbol by symbol; an element of the
//! subfield `F_i` carries only the coefficients on its support.

use ftp_sdmm_core::{Mat, TowerElem, TowerField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WireError {
    #[error("malformed frame: {0}")]
    MalformedFrame(&'static str),
    #[error("protocol version {0} is not supported")]
    VersionMismatch(u8),
    #[error("unknown message type {0}")]
    UnknownType(u8),
    #[error("digit {digit} does not fit the one-byte format for p = {p}")]
    DigitOverflow { digit: u32, p: u64 },
    #[error("element does not match the field")]
    FieldMismatch,
}

/// Bytes of one `F_{q0}` symbol.
pub fn symbol_bytes(tower: &TowerField) -> usize {
    tower.base().degree()
}

fn check_p(tower: &TowerField) -> Result<(), WireError> {
    let p = tower.base().characteristic();
    if p >= 256 {
        return Err(WireError::DigitOverflow { digit: (p - 1) as u32, p });
    }
    Ok(())
}

/// Growable output buffer that also counts element (payload) bytes.
#[derive(Debug, Default, Clone)]
pub struct Writer {
    buf: Vec<u8>,
    payload: usize,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn usize(&mut self, v: usize) -> Result<(), WireError> {
        self.u32(u32::try_from(v).map_err(|_| WireError::MalformedFrame("integer exceeds u32"))?);
        Ok(())
    }

    pub fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }

    fn coeffs(&mut self, tower: &TowerField, coeffs: impl Iterator<Item = u32>) -> Result<(), WireError> {
        check_p(tower)?;
        let base = tower.base();
        let start = self.buf.len();
        for c in coeffs {
            self.buf.extend(base.digits(c).into_iter().map(|d| d as u8));
        }
        self.payload += self.buf.len() - start;
        Ok(())
    }

    /// Full `F_q` element.
    pub fn elem(&mut self, tower: &TowerField, x: &TowerElem) -> Result<(), WireError> {
        if x.coeffs().len() != tower.degree() {
            return Err(WireError::FieldMismatch);
        }
        self.coeffs(tower, x.coeffs().iter().copied())
    }

    /// Element of `F_i`; only its supported coefficients are written.
    pub fn subfield_elem(&mut self, tower: &TowerField, x: &TowerElem, i: usize) -> Result<(), WireError> {
        if x.coeffs().len() != tower.degree() || !tower.in_subfield(x, i) {
            return Err(WireError::FieldMismatch);
        }
        let coeffs = x.coeffs();
        self.coeffs(tower, tower.subfield_support(i).map(|k| coeffs[k]))
    }

    /// `rows`, `cols`, then row-major full elements.
    pub fn mat(&mut self, tower: &TowerField, m: &Mat<TowerElem>) -> Result<(), WireError> {
        self.usize(m.rows())?;
        self.usize(m.cols())?;
        m.data().iter().try_for_each(|x| self.elem(tower, x))
    }

    /// Like [`Writer::mat`] with `F_i` entries.
    pub fn subfield_mat(&mut self, tower: &TowerField, m: &Mat<TowerElem>, i: usize) -> Result<(), WireError> {
        self.usize(m.rows())?;
        self.usize(m.cols())?;
        m.data().iter().try_for_each(|x| self.subfield_elem(tower, x, i))
    }

    /// Number of bytes written by element serializers.
    pub fn payload_bytes(&self) -> usize {
        self.payload
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.buf
    }
}

/// Cursor over a message body; counts element bytes like [`Writer`].
#[derive(Debug, Clone)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    payload: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0, payload: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or(WireError::MalformedFrame("body truncated"))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn usize(&mut self) -> Result<usize, WireError> {
        Ok(self.u32()? as usize)
    }

    pub fn rest(&mut self) -> &'a [u8] {
        let out = &self.buf[self.pos..];
        self.pos = self.buf.len();
        out
    }

    pub fn finish(&self) -> Result<(), WireError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(WireError::MalformedFrame("trailing bytes"))
        }
    }

    pub fn payload_bytes(&self) -> usize {
        self.payload
    }

    fn symbol(&mut self, tower: &TowerField) -> Result<u32, WireError> {
        let base = tower.base();
        let p = base.characteristic();
        let raw = self.take(base.degree())?;
        self.payload += raw.len();
        let digits: Vec<u32> = raw.iter().map(|&b| b as u32).collect();
        if let Some(&digit) = digits.iter().find(|&&d| d as u64 >= p) {
            return Err(WireError::DigitOverflow { digit, p });
        }
        base.from_digits(&digits).map_err(|_| WireError::FieldMismatch)
    }

    pub fn elem(&mut self, tower: &TowerField) -> Result<TowerElem, WireError> {
        check_p(tower)?;
        let coeffs = (0..tower.degree()).map(|_| self.symbol(tower)).collect::<Result<Vec<_>, _>>()?;
        tower.from_coeffs(coeffs).map_err(|_| WireError::FieldMismatch)
    }

    pub fn subfield_elem(&mut self, tower: &TowerField, i: usize) -> Result<TowerElem, WireError> {
        check_p(tower)?;
        if i >= tower.groups() {
            return Err(WireError::MalformedFrame("group index out of range"));
        }
        let mut coeffs = vec![0u32; tower.degree()];
        for k in tower.subfield_support(i) {
            coeffs[k] = self.symbol(tower)?;
        }
        tower.from_coeffs(coeffs).map_err(|_| WireError::FieldMismatch)
    }

    fn shape(&mut self) -> Result<(usize, usize), WireError> {
        let (rows, cols) = (self.usize()?, self.usize()?);
        // refuse shapes that cannot possibly fit in the remaining bytes
        if rows.saturating_mul(cols) > self.buf.len() - self.pos {
            return Err(WireError::MalformedFrame("matrix larger than body"));
        }
        Ok((rows, cols))
    }

    pub fn mat(&mut self, tower: &TowerField) -> Result<Mat<TowerElem>, WireError> {
        let (rows, cols) = self.shape()?;
        let data = (0..rows * cols).map(|_| self.elem(tower)).collect::<Result<Vec<_>, _>>()?;
        Mat::new(rows, cols, data).map_err(|_| WireError::MalformedFrame("matrix shape"))
    }

    pub fn subfield_mat(&mut self, tower: &TowerField, i: usize) -> Result<Mat<TowerElem>, WireError> {
        let (rows, cols) = self.shape()?;
        let data = (0..rows * cols).map(|_| self.subfield_elem(tower, i)).collect::<Result<Vec<_>, _>>()?;
        Mat::new(rows, cols, data).map_err(|_| WireError::MalformedFrame("matrix shape"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ftp_sdmm_core::{BaseField, Field, SplitMix64};

    fn tower(p: u64, d: usize, primes: &[usize]) -> TowerField {
        TowerField::new(BaseField::new(p, d).unwrap(), primes).unwrap()
    }

    #[test]
    fn omega_in_f4_is_two_digit_bytes() {
        let t = tower(2, 2, &[3]);
        let mut w = Writer::new();
        // ω is the F_4 element with digits [0, 1]
        let omega = t.base().from_digits(&[0, 1]).unwrap();
        w.coeffs(&t, [omega].into_iter()).unwrap();
        assert_eq!(w.as_bytes(), &[0x00, 0x01]);
    }

    #[test]
    fn subfield_elements_are_shorter() {
        let t = tower(11, 1, &[2, 3]);
        let mut rng = SplitMix64::new(1);
        let x = t.random(&mut rng);
        for i in 0..2 {
            let y = t.trace(&x, i).unwrap();
            let mut w = Writer::new();
            w.subfield_elem(&t, &y, i).unwrap();
            assert_eq!(w.payload_bytes(), t.subfield_degree(i));
            let bytes = w.into_bytes();
            let mut r = Reader::new(&bytes);
            assert_eq!(r.subfield_elem(&t, i).unwrap(), y);
            r.finish().unwrap();
        }
        let mut w = Writer::new();
        assert_eq!(w.subfield_elem(&t, &t.generator(0).unwrap(), 0), Err(WireError::FieldMismatch));
    }

    #[test]
    fn element_roundtrip() {
        let t = tower(11, 1, &[2, 3]);
        let mut rng = SplitMix64::new(2);
        for _ in 0..1000 {
            let x = t.random(&mut rng);
            let mut w = Writer::new();
            w.elem(&t, &x).unwrap();
            assert_eq!(w.payload_bytes(), 6);
            let bytes = w.into_bytes();
            assert_eq!(Reader::new(&bytes).elem(&t).unwrap(), x);
        }
    }

    #[test]
    fn matrix_roundtrip_and_truncation() {
        let t = tower(3, 3, &[2]);
        let mut rng = SplitMix64::new(3);
        let m = ftp_sdmm_core::matrix::random_mat(&t, 2, 3, &mut rng);
        let mut w = Writer::new();
        w.mat(&t, &m).unwrap();
        assert_eq!(w.payload_bytes(), 2 * 3 * 2 * 3);
        let bytes = w.into_bytes();
        assert_eq!(Reader::new(&bytes).mat(&t).unwrap(), m);
        assert!(matches!(Reader::new(&bytes[..bytes.len() - 1]).mat(&t), Err(WireError::MalformedFrame(_))));
    }

    #[test]
    fn bad_digits_rejected() {
        let t = tower(3, 1, &[2]);
        assert_eq!(Reader::new(&[1, 3]).elem(&t), Err(WireError::DigitOverflow { digit: 3, p: 3 }));
        let big = tower(257, 1, &[2]);
        let mut w = Writer::new();
        assert!(matches!(w.elem(&big, &big.one()), Err(WireError::DigitOverflow { .. })));
    }
}
