//! Pixels, frames and the fixed 8x8 block / 2x2 sub-block tiling.
//!
//! Frames store packed 32-bit colors. A color packs its channels as the
//! little-endian word of the bytes `R, G, B, A`, so the red channel occupies
//! the low byte. Equality of colors is exact bitwise equality.

use crate::error::{Error, Result};

pub const BLOCK_DIM: u32 = 8;
pub const SUB_BLOCK_DIM: u32 = 2;
pub const PIXELS_PER_BLOCK: usize = 64;
pub const SUB_BLOCKS_PER_BLOCK: usize = 16;
pub const PIXEL_BITS: u32 = 32;
/// Uncompressed size of one 8x8 block of RGBA8888.
pub const BLOCK_BITS: u32 = PIXELS_PER_BLOCK as u32 * PIXEL_BITS;

/// One RGBA8888 pixel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Pixel {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Pixel {
    pub const fn new(r: u8, g: u8, b: u8, a: u8) -> Self {
        Self { r, g, b, a }
    }

    pub const fn opaque(r: u8, g: u8, b: u8) -> Self {
        Self::new(r, g, b, 255)
    }

    pub const fn packed(self) -> u32 {
        u32::from_le_bytes([self.r, self.g, self.b, self.a])
    }

    pub const fn from_packed(value: u32) -> Self {
        let [r, g, b, a] = value.to_le_bytes();
        Self { r, g, b, a }
    }

    pub const fn channels(self) -> [u8; 4] {
        [self.r, self.g, self.b, self.a]
    }
}

/// A width x height grid of packed pixels in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    pixels: Vec<u32>,
}

impl Frame {
    pub fn new(width: u32, height: u32, pixels: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!("{width}x{height}")));
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(Error::InvalidGeometry(format!(
                "{width}x{height} needs {expected} pixels, got {}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, color: u32) -> Result<Self> {
        Self::new(width, height, vec![color; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    pub fn pixels(&self) -> &[u32] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u32] {
        &mut self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, color: u32) {
        self.pixels[(y * self.width + x) as usize] = color;
    }

    pub fn blocks_wide(&self) -> u32 {
        self.width.div_ceil(BLOCK_DIM)
    }

    pub fn blocks_high(&self) -> u32 {
        self.height.div_ceil(BLOCK_DIM)
    }

    pub fn block_count(&self) -> usize {
        self.blocks_wide() as usize * self.blocks_high() as usize
    }

    /// Materializes the block at `at`, replicating the last row/column into
    /// positions that fall outside the frame.
    pub fn block(&self, at: BlockRef) -> Block {
        let mut pixels = [0u32; PIXELS_PER_BLOCK];
        let mut real = 0u64;
        for dy in 0..BLOCK_DIM {
            for dx in 0..BLOCK_DIM {
                let x = at.x0 + dx;
                let y = at.y0 + dy;
                let i = (dy * BLOCK_DIM + dx) as usize;
                if x < self.width && y < self.height {
                    real |= 1 << i;
                }
                pixels[i] = self.get(x.min(self.width - 1), y.min(self.height - 1));
            }
        }
        Block {
            origin: at,
            pixels,
            real,
        }
    }

    /// Writes the in-frame pixels of `block` back at its origin.
    pub fn put_block(&mut self, block: &Block) {
        for dy in 0..BLOCK_DIM {
            for dx in 0..BLOCK_DIM {
                let (x, y) = (block.origin.x0 + dx, block.origin.y0 + dy);
                if x < self.width && y < self.height {
                    self.set(x, y, block.pixels[(dy * BLOCK_DIM + dx) as usize]);
                }
            }
        }
    }
}

/// Origin of an 8x8 block within a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockRef {
    pub x0: u32,
    pub y0: u32,
}

/// Block origins covering `frame` in raster order.
pub fn blocks(frame: &Frame) -> impl ExactSizeIterator<Item = BlockRef> + Clone {
    let wide = frame.blocks_wide();
    let count = frame.block_count() as u32;
    (0..count).map(move |i| BlockRef {
        x0: (i % wide) * BLOCK_DIM,
        y0: (i / wide) * BLOCK_DIM,
    })
}

/// An 8x8 block of packed pixels. Bit `i` of `real` is set when pixel `i`
/// (raster order within the block) lies inside the frame; the rest is padding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub origin: BlockRef,
    pub pixels: [u32; PIXELS_PER_BLOCK],
    pub real: u64,
}

pub type SubBlock = [u32; 4];

impl Block {
    pub fn from_pixels(pixels: [u32; PIXELS_PER_BLOCK]) -> Self {
        Self {
            origin: BlockRef { x0: 0, y0: 0 },
            pixels,
            real: u64::MAX,
        }
    }

    pub fn uniform(color: u32) -> Self {
        Self::from_pixels([color; PIXELS_PER_BLOCK])
    }

    pub fn real_pixels(&self) -> u32 {
        self.real.count_ones()
    }

    pub fn is_padded(&self) -> bool {
        self.real != u64::MAX
    }

    /// Number of sub-blocks holding at least one in-frame pixel.
    pub fn real_sub_blocks(&self) -> u32 {
        (0..SUB_BLOCKS_PER_BLOCK)
            .filter(|&s| {
                sub_block_indices(s)
                    .iter()
                    .any(|&i| self.real >> i & 1 == 1)
            })
            .count() as u32
    }

    pub fn sub_blocks(&self) -> [SubBlock; SUB_BLOCKS_PER_BLOCK] {
        sub_blocks(self)
    }

    pub fn set_sub_block(&mut self, s: usize, values: SubBlock) {
        for (&i, v) in sub_block_indices(s).iter().zip(values) {
            self.pixels[i] = v;
        }
    }
}

/// Block-relative pixel indices of sub-block `s`, in raster order.
pub const fn sub_block_indices(s: usize) -> [usize; 4] {
    let base = (s / 4) * 16 + (s % 4) * 2;
    [base, base + 1, base + 8, base + 9]
}

/// The sixteen 2x2 groups of `block` in raster order.
pub fn sub_blocks(block: &Block) -> [SubBlock; SUB_BLOCKS_PER_BLOCK] {
    std::array::from_fn(|s| sub_block_indices(s).map(|i| block.pixels[i]))
}
