//! Byte payloads packed into field symbols.
//!
//! Bytes form one big-endian bit stream, cut into chunks of
//! `floor(log2 |K|)` bits. Each chunk, read as an integer, is a valid element
//! because it is below |K|. The byte length lives in the cluster metadata,
//! so trailing zero bits and zero symbols are pure padding.

/// Largest byte payload that fits in `slots` symbols.
pub fn byte_capacity(slots: usize, bits: usize) -> usize {
    slots * bits / 8
}

pub fn pack(bytes: &[u8], bits: usize, slots: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(slots);
    let mut acc: u128 = 0;
    let mut have = 0;
    for &b in bytes {
        acc = (acc << 8) | b as u128;
        have += 8;
        while have >= bits {
            have -= bits;
            out.push((acc >> have) as u64 & mask(bits));
        }
        acc &= (1u128 << have) - 1;
    }
    if have > 0 {
        out.push(((acc << (bits - have)) as u64) & mask(bits));
    }
    out.resize(slots.max(out.len()), 0);
    out
}

pub fn unpack(symbols: &[u64], bits: usize, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    let mut acc: u128 = 0;
    let mut have = 0;
    for &s in symbols {
        if out.len() == len {
            break;
        }
        acc = (acc << bits) | s as u128;
        have += bits;
        while have >= 8 && out.len() < len {
            have -= 8;
            out.push((acc >> have) as u8);
        }
        acc &= (1u128 << have) - 1;
    }
    out
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}
