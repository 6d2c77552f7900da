//! Big-endian framing helpers shared by every on-disk and hash-input layout.

use crate::error::{Error, Result};
use crate::hash::{Digest, DIGEST_LEN};

pub(crate) fn put_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_be_bytes());
}

pub(crate) fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

pub(crate) fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_be_bytes());
}

/// 4-byte big-endian length followed by the bytes.
pub(crate) fn put_lp(out: &mut Vec<u8>, bytes: &[u8]) {
    put_u32(out, bytes.len() as u32);
    out.extend_from_slice(bytes);
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8], what: &'static str) -> Self {
        Reader { buf, pos: 0, what }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::decode(
                self.what,
                format!("truncated at offset {} (need {n} bytes)", self.pos),
            ));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn magic(&mut self, magic: &[u8; 4], version: u16) -> Result<()> {
        if self.take(4)? != magic {
            return Err(Error::decode(self.what, "bad magic"));
        }
        let v = self.u16()?;
        if v != version {
            return Err(Error::decode(self.what, format!("unsupported version {v}")));
        }
        Ok(())
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn digest(&mut self) -> Result<Digest> {
        Ok(Digest::from_slice(self.take(DIGEST_LEN)?).unwrap())
    }

    /// Length-prefixed bytes whose declared length must not exceed `max`.
    pub(crate) fn lp(&mut self, max: usize) -> Result<&'a [u8]> {
        let len = self.u32()? as usize;
        if len > max {
            return Err(Error::decode(
                self.what,
                format!("length {len} exceeds limit {max}"),
            ));
        }
        self.take(len)
    }

    pub(crate) fn lp_str(&mut self, max: usize) -> Result<&'a str> {
        let b = self.lp(max)?;
        std::str::from_utf8(b).map_err(|e| Error::decode(self.what, e.to_string()))
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::decode(
                self.what,
                format!("{} trailing bytes", self.remaining()),
            ));
        }
        Ok(())
    }
}
