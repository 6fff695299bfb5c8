//! Byte-level container layout.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! offset  size  field
//!      0     5  magic "SHRK1"
//!      5     1  flags: bit 0 lossless, bit 1 base entropy-coded, bit 2 residuals present
//!      6     1  entropy backend id
//!      7     1  decimals (lossless artifacts only)
//!      8     8  n (u64)
//!     16     8  epsilon
//!     24     8  eps_b
//!     32     8  lambda
//!     40     8  eps_r
//!     48     8  r_min
//!     56     8  r_max
//!     64     8  eps_hat_max
//!     72     4  sub-base count k (u32)
//!     76     4  CRC32 of bytes 0..76
//!     80     4  base section length, then the section, then its CRC32
//!      .     4  residual section length, then the section, then its CRC32
//! ```
//!
//! A raw base section holds, per sub-base: origin (f64), slope (f64), a
//! LEB128 run count, the run starts as LEB128 deltas from the previous start
//! of the same sub-base, then the run lengths as LEB128.

use crate::error::{Error, Result};
use crate::model::{CompressedArtifact, Header, KnowledgeBase, Run, SubBase};

pub const MAGIC: &[u8; 5] = b"SHRK1";
pub const MULTI_MAGIC: &[u8; 5] = b"SHRKM";

const FIXED_HEADER: usize = 76;
/// Bytes of a serialized artifact outside its two sections.
pub const CONTAINER_OVERHEAD: usize = FIXED_HEADER + 4 + 2 * (4 + 4);

const FLAG_LOSSLESS: u8 = 1;
const FLAG_BASE_CODED: u8 = 1 << 1;
const FLAG_RESIDUALS: u8 = 1 << 2;

pub fn serialize(artifact: &CompressedArtifact) -> Vec<u8> {
    let h = &artifact.header;
    let mut out = Vec::with_capacity(
        CONTAINER_OVERHEAD + artifact.base_bytes.len() + artifact.residual_bytes.len(),
    );
    out.extend_from_slice(MAGIC);
    let mut flags = 0;
    if h.lossless {
        flags |= FLAG_LOSSLESS;
    }
    if h.base_entropy_coded {
        flags |= FLAG_BASE_CODED;
    }
    if h.residuals_present {
        flags |= FLAG_RESIDUALS;
    }
    out.extend_from_slice(&[flags, h.backend, h.decimals]);
    out.extend_from_slice(&h.n.to_le_bytes());
    for v in [
        h.epsilon,
        h.eps_b,
        h.lambda,
        h.eps_r,
        h.r_min,
        h.r_max,
        h.eps_hat_max,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&h.sub_base_count.to_le_bytes());
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    for section in [&artifact.base_bytes, &artifact.residual_bytes] {
        out.extend_from_slice(&(section.len() as u32).to_le_bytes());
        out.extend_from_slice(section);
        out.extend_from_slice(&crc32fast::hash(section).to_le_bytes());
    }
    out
}

pub fn deserialize(bytes: &[u8]) -> Result<CompressedArtifact> {
    let mut r = Reader::new(bytes);
    let magic = r.take(MAGIC.len(), "magic")?;
    if magic != MAGIC {
        return Err(Error::Corrupt(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(MAGIC)
        )));
    }
    let flags = r.u8("flags")?;
    if flags & !(FLAG_LOSSLESS | FLAG_BASE_CODED | FLAG_RESIDUALS) != 0 {
        return Err(Error::Corrupt(format!("unknown flag bits {flags:#04x}")));
    }
    let backend = r.u8("backend")?;
    let decimals = r.u8("decimals")?;
    let n = r.u64("n")?;
    let mut floats = [0.0; 7];
    for f in &mut floats {
        *f = r.f64("header")?;
    }
    let sub_base_count = r.u32("sub-base count")?;
    let computed = crc32fast::hash(&bytes[..FIXED_HEADER]);
    let stored = r.u32("header checksum")?;
    if stored != computed {
        return Err(Error::Checksum {
            section: "header",
            stored,
            computed,
        });
    }
    if backend != crate::entropy::BACKEND_ID {
        return Err(Error::Corrupt(format!("unsupported entropy backend {backend}")));
    }
    let [epsilon, eps_b, lambda, eps_r, r_min, r_max, eps_hat_max] = floats;
    let header = Header {
        lossless: flags & FLAG_LOSSLESS != 0,
        base_entropy_coded: flags & FLAG_BASE_CODED != 0,
        residuals_present: flags & FLAG_RESIDUALS != 0,
        backend,
        decimals,
        n,
        epsilon,
        eps_b,
        lambda,
        eps_r,
        r_min,
        r_max,
        eps_hat_max,
        sub_base_count,
    };
    let base_bytes = r.section("base")?;
    let residual_bytes = r.section("residual")?;
    if !r.is_done() {
        return Err(Error::Corrupt(format!("{} trailing bytes", r.remaining())));
    }
    if header.residuals_present == residual_bytes.is_empty() {
        return Err(Error::Corrupt(
            "residual flag disagrees with residual section".into(),
        ));
    }
    Ok(CompressedArtifact {
        header,
        base_bytes,
        residual_bytes,
    })
}

/// Concatenates per-column artifacts.
pub fn serialize_multi(columns: &[CompressedArtifact]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MULTI_MAGIC);
    out.extend_from_slice(&(columns.len() as u32).to_le_bytes());
    for column in columns {
        let bytes = serialize(column);
        out.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
        out.extend_from_slice(&bytes);
    }
    out
}

pub fn deserialize_multi(bytes: &[u8]) -> Result<Vec<CompressedArtifact>> {
    let mut r = Reader::new(bytes);
    if r.take(MULTI_MAGIC.len(), "magic")? != MULTI_MAGIC {
        return Err(Error::Corrupt("bad multi-column magic".into()));
    }
    let count = r.u32("column count")? as usize;
    let mut columns = Vec::with_capacity(count.min(bytes.len() / CONTAINER_OVERHEAD + 1));
    for _ in 0..count {
        let len = r.u64("column length")?;
        let len = usize::try_from(len).map_err(|_| Error::Corrupt("column too long".into()))?;
        columns.push(deserialize(r.take(len, "column")?)?);
    }
    if !r.is_done() {
        return Err(Error::Corrupt(format!("{} trailing bytes", r.remaining())));
    }
    Ok(columns)
}

/// Raw (not entropy-coded) base section.
pub fn encode_base(base: &KnowledgeBase) -> Vec<u8> {
    let mut out = Vec::with_capacity(base.sub_bases.len() * 20 + base.run_count() * 3);
    for b in &base.sub_bases {
        out.extend_from_slice(&b.origin.to_le_bytes());
        out.extend_from_slice(&b.slope.to_le_bytes());
        write_varint(&mut out, b.runs.len() as u64);
        let mut prev = 0;
        for run in &b.runs {
            write_varint(&mut out, (run.start - prev) as u64);
            prev = run.start;
        }
        for run in &b.runs {
            write_varint(&mut out, run.length as u64);
        }
    }
    out
}

/// Parses a raw base section. Spans are not stored, so each decoded span
/// collapses onto its slope.
pub fn decode_base(bytes: &[u8], header: &Header) -> Result<KnowledgeBase> {
    let n = usize::try_from(header.n).map_err(|_| Error::Corrupt("n does not fit".into()))?;
    let mut r = Reader::new(bytes);
    let mut sub_bases = Vec::with_capacity((header.sub_base_count as usize).min(bytes.len() / 17 + 1));
    let mut covered: u64 = 0;
    for _ in 0..header.sub_base_count {
        let origin = r.f64("origin")?;
        let slope = r.f64("slope")?;
        if !(origin.is_finite() && slope.is_finite()) {
            return Err(Error::Corrupt("non-finite line in base".into()));
        }
        let count = r.varint("run count")?;
        if count == 0 || count > r.remaining() as u64 {
            return Err(Error::Corrupt(format!("implausible run count {count}")));
        }
        let mut starts = Vec::with_capacity(count as usize);
        let mut prev: u64 = 0;
        for i in 0..count {
            let delta = r.varint("run start")?;
            if i > 0 && delta == 0 {
                return Err(Error::Corrupt("run starts not increasing".into()));
            }
            prev = prev
                .checked_add(delta)
                .filter(|&s| s < header.n)
                .ok_or_else(|| Error::Corrupt("run start beyond series".into()))?;
            starts.push(prev as usize);
        }
        let mut runs = Vec::with_capacity(starts.len());
        for start in starts {
            let length = r.varint("run length")?;
            if length == 0 || length > header.n {
                return Err(Error::Corrupt(format!("bad run length {length}")));
            }
            covered = covered
                .checked_add(length)
                .filter(|&c| c <= header.n)
                .ok_or_else(|| Error::Corrupt("runs cover more than the series".into()))?;
            runs.push(Run {
                start,
                length: length as usize,
            });
        }
        sub_bases.push(SubBase {
            origin,
            span_lo: slope,
            span_hi: slope,
            slope,
            runs,
        });
    }
    if !r.is_done() {
        return Err(Error::Corrupt(format!("{} trailing base bytes", r.remaining())));
    }
    let base = KnowledgeBase {
        sub_bases,
        n,
        eps_b: header.eps_b,
        lambda: header.lambda,
        eps_hat_max: header.eps_hat_max,
    };
    base.check_coverage()
        .map_err(|e| Error::Corrupt(format!("base does not tile the series: {e}")))?;
    Ok(base)
}

pub fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    fn is_done(&self) -> bool {
        self.pos == self.data.len()
    }

    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.remaining() < len {
            return Err(Error::Corrupt(format!(
                "truncated while reading {what}: need {len} bytes at offset {}, {} left",
                self.pos,
                self.remaining()
            )));
        }
        let s = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn varint(&mut self, what: &str) -> Result<u64> {
        let mut v: u64 = 0;
        for shift in (0..64).step_by(7) {
            let b = self.u8(what)?;
            v |= ((b & 0x7F) as u64) << shift;
            if b & 0x80 == 0 {
                if shift == 63 && b > 1 {
                    break;
                }
                return Ok(v);
            }
        }
        Err(Error::Corrupt(format!("overlong varint in {what}")))
    }

    fn section(&mut self, name: &'static str) -> Result<Vec<u8>> {
        let len = self.u32(name)? as usize;
        let body = self.take(len, name)?.to_vec();
        let stored = self.u32(name)?;
        let computed = crc32fast::hash(&body);
        if stored != computed {
            return Err(Error::Checksum {
                section: name,
                stored,
                computed,
            });
        }
        Ok(body)
    }
}
