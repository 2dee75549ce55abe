//! Golomb-Rice coding with power-of-two divisors.

use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};

/// Default cap on the unary run accepted while decoding. Residuals of 8-bit
/// channels zigzag to at most 510, so longer runs mean a corrupt stream.
pub const MAX_UNARY: u32 = 512;

/// Quotient `value >> k` in unary (ones, then a zero), remainder in `k` bits.
pub fn encode(value: u32, k: u32, out: &mut BitBuf) {
    let q = value >> k;
    for _ in 0..q {
        out.push_bit(true);
    }
    out.push_bit(false);
    out.push_bits(u64::from(value), k);
}

pub fn encoded_len(value: u32, k: u32) -> u32 {
    (value >> k) + 1 + k
}

pub fn decode(r: &mut BitReader<'_>, k: u32, max_unary: u32) -> Result<u32> {
    let mut q = 0u32;
    while r.read_bit()? {
        q += 1;
        if q > max_unary {
            return Err(Error::Corrupt("Golomb-Rice unary run too long".into()));
        }
    }
    Ok((q << k) | r.read_bits(k)? as u32)
}

/// Maps signed residuals to non-negative integers: 0, -1, 1, -2, 2 ... ->
/// 0, 1, 2, 3, 4 ...
pub fn zigzag(v: i32) -> u32 {
    ((v << 1) ^ (v >> 31)) as u32
}

pub fn unzigzag(u: u32) -> i32 {
    ((u >> 1) as i32) ^ -((u & 1) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(buf: &BitBuf) -> String {
        let mut r = buf.reader();
        (0..buf.len())
            .map(|_| if r.read_bit().unwrap() { '1' } else { '0' })
            .collect()
    }

    #[test]
    fn fixtures() {
        let mut b = BitBuf::new();
        encode(0, 0, &mut b);
        assert_eq!(bits_of(&b), "0");

        let mut b = BitBuf::new();
        encode(5, 2, &mut b);
        assert_eq!(bits_of(&b), "1001");
        assert_eq!(encoded_len(5, 2), 4);
    }

    #[test]
    fn exhaustive_round_trip() {
        for k in 0..=6 {
            let mut b = BitBuf::new();
            for v in 0..=10_000 {
                encode(v, k, &mut b);
            }
            let mut r = b.reader();
            for v in 0..=10_000 {
                assert_eq!(decode(&mut r, k, u32::MAX).unwrap(), v);
            }
            assert_eq!(r.remaining(), 0);
        }
    }

    #[test]
    fn lengths_match_encoder() {
        for k in 0..=6 {
            for v in (0..2000).step_by(7) {
                let mut b = BitBuf::new();
                encode(v, k, &mut b);
                assert_eq!(b.len() as u32, encoded_len(v, k));
            }
        }
    }

    #[test]
    fn runaway_unary_is_corrupt() {
        let mut b = BitBuf::new();
        for _ in 0..(MAX_UNARY + 10) {
            b.push_bit(true);
        }
        assert!(decode(&mut b.reader(), 0, MAX_UNARY).is_err());
    }

    #[test]
    fn zigzag_mapping() {
        let pairs = [
            (0, 0),
            (-1, 1),
            (1, 2),
            (-2, 3),
            (2, 4),
            (-255, 509),
            (255, 510),
        ];
        for (v, u) in pairs {
            assert_eq!(zigzag(v), u);
            assert_eq!(unzigzag(u), v);
        }
    }
}
