//! Jenkins' one-at-a-time hash.

/// Streaming one-at-a-time state. Bytes are added as unsigned values and all
/// arithmetic wraps at 32 bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OneAtATime {
    state: u32,
}

impl OneAtATime {
    pub fn new() -> Self {
        OneAtATime { state: 0 }
    }

    #[inline]
    pub fn add(&mut self, byte: u8) {
        let mut h = self.state.wrapping_add(byte as u32);
        h = h.wrapping_add(h << 10);
        h ^= h >> 6;
        self.state = h;
    }

    pub fn add_all(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.add(b);
        }
    }

    #[inline]
    pub fn finish(self) -> u32 {
        let mut h = self.state;
        h = h.wrapping_add(h << 3);
        h ^= h >> 11;
        h.wrapping_add(h << 15)
    }
}

pub fn oat_hash(bytes: &[u8]) -> u32 {
    let mut h = OneAtATime::new();
    h.add_all(bytes);
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Golden values produced by compiling the reference C routines.
    #[test]
    fn golden_vectors() {
        assert_eq!(oat_hash(&[]), 0);
        assert_eq!(oat_hash(b"a"), 0xca2e_9442);
        assert_eq!(oat_hash(&[1, 2, 3]), 0xf926_da4f);
        assert_eq!(
            oat_hash(b"The quick brown fox jumps over the lazy dog"),
            0x519e_91f5
        );
    }

    #[test]
    fn high_bytes_are_unsigned() {
        assert_eq!(oat_hash(&[0x80, 0xff]), 0xd19d_12ac);
    }

    #[test]
    fn streaming_matches_one_shot() {
        let data: Vec<u8> = (0..=255).collect();
        let mut h = OneAtATime::new();
        for chunk in data.chunks(7) {
            h.add_all(chunk);
        }
        assert_eq!(h.finish(), oat_hash(&data));
    }
}
