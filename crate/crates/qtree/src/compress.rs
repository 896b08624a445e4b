//! Deflate as the default compressor for compression distances.

use std::io::Write;

use flate2::write::DeflateEncoder;
use flate2::Compression;
use quartet_core::ncd::Compressor;

/// Raw deflate stream size at a fixed level (9 by default).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Deflate {
    level: u32,
}

impl Default for Deflate {
    fn default() -> Self {
        Deflate { level: 9 }
    }
}

impl Deflate {
    pub fn with_level(level: u32) -> Deflate {
        Deflate { level: level.min(9) }
    }

    pub fn level(&self) -> u32 {
        self.level
    }
}

impl Compressor for Deflate {
    fn compressed_len(&self, data: &[u8]) -> usize {
        let mut enc = DeflateEncoder::new(Vec::with_capacity(data.len() / 2 + 16), Compression::new(self.level));
        enc.write_all(data).expect("writing to memory");
        enc.finish().expect("writing to memory").len()
    }

    fn name(&self) -> &str {
        "deflate"
    }
}
