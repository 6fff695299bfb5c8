//! Order-0 adaptive range coder.
//!
//! Stream layout (little-endian):
//!
//! ```text
//! u32 symbol count | u32 alphabet size | range-coded payload
//! ```
//!
//! The coder keeps a 32-bit range with a 64-bit low word and emits one byte
//! per renormalization, propagating carries through a cached byte. The model
//! starts with every symbol at frequency 1, adds 32 per coded symbol and
//! halves all counts once the total passes 2^16.
//!
//! Alphabets above [`MODEL_SYMBOLS`] are split: the high part of each symbol
//! goes through the adaptive model, the low `shift` bits are written as flat
//! binary digits. Empty streams and one-symbol alphabets have no payload.

use crate::error::{invalid, Error, Result};

/// Identifier recorded in containers for this backend.
pub const BACKEND_ID: u8 = 1;

/// Largest alphabet modelled symbol by symbol.
pub const MODEL_SYMBOLS: u32 = 256;

const HEADER_LEN: usize = 8;
const TOP: u32 = 1 << 24;
const INCREMENT: u32 = 32;
const MAX_TOTAL: u32 = 1 << 16;
const FLAT_CHUNK: u32 = 16;

/// Splits an alphabet into `(model alphabet, flat low bits)`.
fn split(alphabet: u32) -> (u32, u32) {
    let mut shift = 0;
    while ((alphabet - 1) >> shift) + 1 > MODEL_SYMBOLS {
        shift += 1;
    }
    (((alphabet - 1) >> shift) + 1, shift)
}

pub fn encode(symbols: &[u32], alphabet: u32) -> Result<Vec<u8>> {
    if alphabet == 0 {
        return Err(invalid("alphabet", "must be >= 1"));
    }
    if symbols.len() > u32::MAX as usize {
        return Err(invalid("symbols", "more than 2^32 - 1 symbols"));
    }
    if let Some((position, &symbol)) = symbols.iter().enumerate().find(|(_, &s)| s >= alphabet) {
        return Err(Error::SymbolOutOfRange {
            position,
            symbol,
            alphabet,
        });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + symbols.len() / 2);
    out.extend_from_slice(&(symbols.len() as u32).to_le_bytes());
    out.extend_from_slice(&alphabet.to_le_bytes());
    if symbols.is_empty() || alphabet == 1 {
        return Ok(out);
    }

    let (model_symbols, shift) = split(alphabet);
    let mut model = AdaptiveModel::new(model_symbols);
    let mut enc = Encoder::new(out);
    for &s in symbols {
        let high = s >> shift;
        let (cum, freq) = model.interval(high);
        enc.encode(cum, freq, model.total());
        model.update(high);
        enc.encode_flat(s, shift);
    }
    Ok(enc.finish())
}

/// Decodes a stream produced by [`encode`], checking its header against the
/// expected count and alphabet.
pub fn decode(data: &[u8], count: usize, alphabet: u32) -> Result<Vec<u32>> {
    let (stored_count, stored_alphabet) = read_header(data)?;
    if stored_count != count || stored_alphabet != alphabet {
        return Err(Error::Corrupt(format!(
            "stream holds {stored_count} symbols over {stored_alphabet}, expected {count} over {alphabet}"
        )));
    }
    decode_stream(data)
}

/// Decodes a stream using the count and alphabet from its own header.
pub fn decode_stream(data: &[u8]) -> Result<Vec<u32>> {
    let (count, alphabet) = read_header(data)?;
    let payload = &data[HEADER_LEN..];
    if alphabet == 0 {
        return Err(Error::Corrupt("zero alphabet".into()));
    }
    if count == 0 || alphabet == 1 {
        if !payload.is_empty() {
            return Err(Error::Corrupt(format!("{} unexpected payload bytes", payload.len())));
        }
        return Ok(vec![0; count]);
    }
    // Every symbol costs at least one bit of payload in the worst case only
    // for non-degenerate models, so cap the allocation by payload size.
    let mut symbols = Vec::with_capacity(count.min(payload.len().saturating_mul(64)));
    let (model_symbols, shift) = split(alphabet);
    let mut model = AdaptiveModel::new(model_symbols);
    let mut dec = Decoder::new(payload)?;
    for _ in 0..count {
        let target = dec.target(model.total());
        let (high, cum, freq) = model.find(target);
        dec.consume(cum, freq, model.total())?;
        model.update(high);
        let low = dec.decode_flat(shift)?;
        let s = (high << shift) | low;
        if s >= alphabet {
            return Err(Error::Corrupt(format!("decoded symbol {s} outside alphabet {alphabet}")));
        }
        symbols.push(s);
    }
    dec.finish()?;
    Ok(symbols)
}

fn read_header(data: &[u8]) -> Result<(usize, u32)> {
    if data.len() < HEADER_LEN {
        return Err(Error::Corrupt(format!(
            "stream of {} bytes is shorter than its header",
            data.len()
        )));
    }
    let count = u32::from_le_bytes(data[0..4].try_into().unwrap()) as usize;
    let alphabet = u32::from_le_bytes(data[4..8].try_into().unwrap());
    Ok((count, alphabet))
}

/// Frequency table over a Fenwick tree.
struct AdaptiveModel {
    freq: Vec<u32>,
    tree: Vec<u32>,
    total: u32,
    size: usize,
}

impl AdaptiveModel {
    fn new(symbols: u32) -> Self {
        let n = symbols as usize;
        let mut m = Self {
            freq: vec![1; n],
            tree: vec![0; n + 1],
            total: symbols,
            size: n.next_power_of_two(),
        };
        m.rebuild();
        m
    }

    fn total(&self) -> u32 {
        self.total
    }

    fn rebuild(&mut self) {
        let n = self.freq.len();
        self.tree.iter_mut().for_each(|t| *t = 0);
        for i in 1..=n {
            self.tree[i] += self.freq[i - 1];
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                self.tree[parent] += self.tree[i];
            }
        }
        self.total = self.freq.iter().sum();
    }

    fn cumulative(&self, symbol: u32) -> u32 {
        let mut i = symbol as usize;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i &= i - 1;
        }
        sum
    }

    fn interval(&self, symbol: u32) -> (u32, u32) {
        (self.cumulative(symbol), self.freq[symbol as usize])
    }

    /// Symbol whose interval contains `target`, with its interval.
    fn find(&self, target: u32) -> (u32, u32, u32) {
        let n = self.freq.len();
        let mut pos = 0usize;
        let mut rem = target;
        let mut step = self.size;
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        let symbol = pos.min(n - 1);
        (symbol as u32, target - rem, self.freq[symbol])
    }

    fn update(&mut self, symbol: u32) {
        self.freq[symbol as usize] += INCREMENT;
        self.total += INCREMENT;
        if self.total > MAX_TOTAL {
            for f in &mut self.freq {
                *f = f.div_ceil(2);
            }
            self.rebuild();
        } else {
            let mut i = symbol as usize + 1;
            while i <= self.freq.len() {
                self.tree[i] += INCREMENT;
                i += i & i.wrapping_neg();
            }
        }
    }
}

struct Encoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Encoder {
    fn new(out: Vec<u8>) -> Self {
        Self {
            low: 0,
            range: u32::MAX,
            cache: 0,
            cache_size: 1,
            out,
        }
    }

    fn encode(&mut self, cum: u32, freq: u32, total: u32) {
        let r = self.range / total;
        self.low += r as u64 * cum as u64;
        self.range = if cum + freq == total {
            self.range - r * cum
        } else {
            r * freq
        };
        self.normalize();
    }

    fn encode_flat(&mut self, value: u32, bits: u32) {
        let mut remaining = bits;
        while remaining > 0 {
            let chunk = remaining.min(FLAT_CHUNK);
            remaining -= chunk;
            let digit = (value >> remaining) & ((1 << chunk) - 1);
            let r = self.range >> chunk;
            self.low += r as u64 * digit as u64;
            self.range = r;
            self.normalize();
        }
    }

    fn normalize(&mut self) {
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || (self.low >> 32) != 0 {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            loop {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = ((self.low >> 24) & 0xFF) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

struct Decoder<'a> {
    data: &'a [u8],
    pos: usize,
    code: u32,
    range: u32,
    r: u32,
}

impl<'a> Decoder<'a> {
    fn new(data: &'a [u8]) -> Result<Self> {
        if data.len() < 5 {
            return Err(Error::Corrupt("range-coded payload truncated".into()));
        }
        if data[0] != 0 {
            return Err(Error::Corrupt("range-coded payload has a bad lead byte".into()));
        }
        let code = data[1..5].iter().fold(0u32, |c, &b| (c << 8) | b as u32);
        Ok(Self {
            data,
            pos: 5,
            code,
            range: u32::MAX,
            r: 0,
        })
    }

    fn target(&mut self, total: u32) -> u32 {
        self.r = self.range / total;
        (self.code / self.r).min(total - 1)
    }

    fn consume(&mut self, cum: u32, freq: u32, total: u32) -> Result<()> {
        self.code -= self.r * cum;
        self.range = if cum + freq == total {
            self.range - self.r * cum
        } else {
            self.r * freq
        };
        self.normalize()
    }

    fn decode_flat(&mut self, bits: u32) -> Result<u32> {
        let mut value = 0;
        let mut remaining = bits;
        while remaining > 0 {
            let chunk = remaining.min(FLAT_CHUNK);
            remaining -= chunk;
            let r = self.range >> chunk;
            let digit = self.code / r;
            if digit >> chunk != 0 {
                return Err(Error::Corrupt("flat digit out of range".into()));
            }
            self.code -= r * digit;
            self.range = r;
            self.normalize()?;
            value = (value << chunk) | digit;
        }
        Ok(value)
    }

    fn normalize(&mut self) -> Result<()> {
        while self.range < TOP {
            let byte = *self
                .data
                .get(self.pos)
                .ok_or_else(|| Error::Corrupt("range-coded payload truncated".into()))?;
            self.pos += 1;
            self.code = (self.code << 8) | byte as u32;
            self.range <<= 8;
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Corrupt(format!(
                "{} trailing payload bytes",
                self.data.len() - self.pos
            )));
        }
        Ok(())
    }
}

/// Order-0 empirical entropy of a stream, in bytes.
pub fn empirical_entropy_bytes(symbols: &[u32]) -> f64 {
    use std::collections::HashMap;
    if symbols.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for &s in symbols {
        *counts.entry(s).or_default() += 1;
    }
    let n = symbols.len() as f64;
    let bits: f64 = counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -(c as f64) * p.log2()
        })
        .sum();
    bits / 8.0
}
