//! Seeded synthetic traces.
//!
//! `ui-like` renders a scrolling list screen: fixed status and app bars, a
//! content area of list rows (icon, text-like glyph strips, dividers,
//! occasional thumbnails) that scrolls a few pixels per frame, and a few
//! small dirty rectangles that change color every frame. `2d-like` moves
//! sprites over a tiled backdrop. `noise` and `gradient` are the extremes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::surface::{Frame, Pixel};
use crate::trace::{Category, SurfaceTrace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    #[default]
    #[serde(rename = "ui-like")]
    UiLike,
    #[serde(rename = "2d-like")]
    TwoDLike,
    #[serde(rename = "noise")]
    Noise,
    #[serde(rename = "gradient")]
    Gradient,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::UiLike => "ui-like",
            Generator::TwoDLike => "2d-like",
            Generator::Noise => "noise",
            Generator::Gradient => "gradient",
        })
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ui-like" | "ui" => Ok(Generator::UiLike),
            "2d-like" | "2d" => Ok(Generator::TwoDLike),
            "noise" => Ok(Generator::Noise),
            "gradient" => Ok(Generator::Gradient),
            other => Err(Error::Config(format!("unknown generator {other:?}"))),
        }
    }
}

impl Generator {
    pub fn category(self) -> Category {
        match self {
            Generator::UiLike => Category::Ui,
            Generator::TwoDLike => Category::TwoD,
            Generator::Noise | Generator::Gradient => Category::Synthetic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub generator: Generator,
    pub width: u32,
    pub height: u32,
    pub frame_count: usize,
    /// Distinct base colors the scene draws from.
    pub palette_size: u32,
    /// Content scroll per frame, in pixels.
    pub scroll: u32,
    /// Rectangles repainted every frame.
    pub dirty_rects: u32,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            generator: Generator::UiLike,
            width: 720,
            height: 1280,
            frame_count: 10,
            palette_size: 12,
            scroll: 4,
            dirty_rects: 3,
            seed: 1,
        }
    }
}

impl SynthParams {
    pub fn new(
        generator: Generator,
        width: u32,
        height: u32,
        frame_count: usize,
        seed: u64,
    ) -> Self {
        Self {
            generator,
            width,
            height,
            frame_count,
            seed,
            ..Self::default()
        }
    }

    pub fn name(&self) -> String {
        format!("{}-{}", self.generator, self.seed)
    }
}

pub fn generate(params: &SynthParams) -> Result<SurfaceTrace> {
    if params.width == 0 || params.height == 0 {
        return Err(Error::Config(format!(
            "frame size {}x{}",
            params.width, params.height
        )));
    }
    if params.frame_count < 2 {
        return Err(Error::Config(
            "synthetic traces need at least 2 frames".into(),
        ));
    }
    let frames = match params.generator {
        Generator::UiLike => ui_like(params),
        Generator::TwoDLike => two_d_like(params),
        Generator::Noise => noise(params),
        Generator::Gradient => gradient(params),
    }?;
    SurfaceTrace::new(params.name(), params.generator.category(), frames)
}

fn random_color(rng: &mut SplitMix64) -> u32 {
    rng.next_u32() | 0xFF00_0000
}

fn blend(a: u32, b: u32, t: u32) -> u32 {
    let (pa, pb) = (Pixel::from_packed(a), Pixel::from_packed(b));
    let mix = |x: u8, y: u8| ((u32::from(x) * (4 - t) + u32::from(y) * t) / 4) as u8;
    Pixel::new(mix(pa.r, pb.r), mix(pa.g, pb.g), mix(pa.b, pb.b), 255).packed()
}

/// Mutable pixel canvas with clipped drawing.
struct Canvas {
    width: u32,
    height: u32,
    px: Vec<u32>,
}

impl Canvas {
    fn new(width: u32, height: u32, color: u32) -> Self {
        Self {
            width,
            height,
            px: vec![color; (width * height) as usize],
        }
    }

    fn fill(&mut self, x: i64, y: i64, w: i64, h: i64, color: u32) {
        let x0 = x.clamp(0, i64::from(self.width)) as u32;
        let x1 = (x + w).clamp(0, i64::from(self.width)) as u32;
        let y0 = y.clamp(0, i64::from(self.height)) as u32;
        let y1 = (y + h).clamp(0, i64::from(self.height)) as u32;
        for yy in y0..y1 {
            let row = (yy * self.width) as usize;
            self.px[row + x0 as usize..row + x1 as usize].fill(color);
        }
    }

    fn put(&mut self, x: i64, y: i64, color: u32) {
        if x >= 0 && y >= 0 && x < i64::from(self.width) && y < i64::from(self.height) {
            self.px[(y as u32 * self.width + x as u32) as usize] = color;
        }
    }

    /// Copies rows `[src_y, src_y + h)` of `src` to row `dst_y` of `self`.
    fn blit_rows(&mut self, src: &Canvas, src_y: u32, dst_y: u32, h: u32) {
        let w = self.width.min(src.width) as usize;
        for r in 0..h {
            let (sy, dy) = (src_y + r, dst_y + r);
            if sy >= src.height || dy >= self.height {
                break;
            }
            let s = (sy * src.width) as usize;
            let d = (dy * self.width) as usize;
            self.px[d..d + w].copy_from_slice(&src.px[s..s + w]);
        }
    }

    fn into_frame(self) -> Result<Frame> {
        Frame::new(self.width, self.height, self.px)
    }
}

/// Line of text-like glyphs: 5x7 cells with seeded strokes and soft edges.
fn text_strip(c: &mut Canvas, rng: &mut SplitMix64, x: i64, y: i64, max_w: i64, ink: u32, bg: u32) {
    let soft = blend(ink, bg, 2);
    let words = 2 + rng.below(5) as i64;
    let mut cx = x;
    for _ in 0..words {
        let letters = 2 + rng.below(7) as i64;
        for _ in 0..letters {
            if cx + 6 > x + max_w {
                return;
            }
            let bits = rng.next_u64();
            for gy in 0..7 {
                for gx in 0..5 {
                    if bits >> (gy * 5 + gx) & 1 == 1 {
                        let edge = bits >> (35 + (gy * 5 + gx) % 29) & 1 == 1;
                        c.put(cx + gx, y + gy, if edge { soft } else { ink });
                    }
                }
            }
            cx += 6;
        }
        cx += 5;
    }
}

fn ui_like(params: &SynthParams) -> Result<Vec<Frame>> {
    let mut rng = SplitMix64::new(params.seed);
    let (w, h) = (params.width, params.height);
    let n = params.palette_size.max(4) as usize;
    let background = Pixel::new(
        240 + rng.below(16) as u8,
        240 + rng.below(16) as u8,
        240 + rng.below(16) as u8,
        255,
    )
    .packed();
    let ink = Pixel::new(
        rng.below(48) as u8,
        rng.below(48) as u8,
        rng.below(48) as u8,
        255,
    )
    .packed();
    let accents: Vec<u32> = (0..n - 2).map(|_| random_color(&mut rng)).collect();
    let divider = blend(background, ink, 1);

    let status_h = (h / 40).max(2);
    let bar_h = (h / 16).max(4);
    let nav_h = (h / 20).max(2);
    let content_y = status_h + bar_h;
    let content_h = h.saturating_sub(content_y + nav_h).max(1);
    let scroll_total = params.scroll * params.frame_count as u32;
    let row_h = (h / 18).max(12);

    // Tall scrollable canvas.
    let mut content = Canvas::new(w, content_h + scroll_total, background);
    let mut y = 0i64;
    while y < i64::from(content.height) {
        let icon = row_h as i64 * 2 / 3;
        let margin = (row_h as i64 - icon) / 2;
        let accent = accents[rng.below(accents.len() as u64) as usize];
        content.fill(margin, y + margin, icon, icon, accent);
        let text_x = 2 * margin + icon;
        let text_w = i64::from(w) - text_x - margin;
        if rng.chance(1, 6) {
            // photo-like thumbnail
            let tw = icon * 2;
            let tx = i64::from(w) - margin - tw;
            let base = Pixel::from_packed(random_color(&mut rng));
            for ty in 0..icon {
                for tx2 in 0..tw {
                    let shade = |v: u8, d: i64| (i64::from(v) + d).clamp(0, 255) as u8;
                    let p = Pixel::new(
                        shade(base.r, tx2),
                        shade(base.g, ty),
                        shade(base.b, tx2 - ty),
                        255,
                    );
                    content.put(tx + tx2, y + margin + ty, p.packed());
                }
            }
            text_strip(
                &mut content,
                &mut rng,
                text_x,
                y + margin,
                text_w - tw - margin,
                ink,
                background,
            );
        } else {
            text_strip(
                &mut content,
                &mut rng,
                text_x,
                y + margin,
                text_w,
                ink,
                background,
            );
        }
        let sub = blend(ink, background, 2);
        text_strip(
            &mut content,
            &mut rng,
            text_x,
            y + margin + 10,
            text_w / 2,
            sub,
            background,
        );
        content.fill(
            text_x,
            y + row_h as i64 - 1,
            i64::from(w) - text_x,
            1,
            divider,
        );
        y += row_h as i64;
    }

    let bar = accents[0];
    let mut chrome = Canvas::new(w, h, background);
    chrome.fill(0, 0, i64::from(w), i64::from(status_h), blend(bar, ink, 2));
    chrome.fill(0, i64::from(status_h), i64::from(w), i64::from(bar_h), bar);
    text_strip(
        &mut chrome,
        &mut rng,
        16,
        i64::from(status_h + bar_h / 3),
        i64::from(w) / 2,
        background,
        bar,
    );
    let nav_y = i64::from(h - nav_h.min(h));
    chrome.fill(
        0,
        nav_y,
        i64::from(w),
        i64::from(nav_h),
        blend(background, ink, 1),
    );
    let dirty: Vec<(i64, i64, i64, i64)> = (0..params.dirty_rects)
        .map(|_| {
            let dw = 4 + rng.below(u64::from(w / 8).max(1)) as i64;
            let dh = 4 + rng.below(u64::from(h / 32).max(1)) as i64;
            let dx = rng.below(u64::from(w)) as i64;
            let dy = rng.below(u64::from(h)) as i64;
            (dx, dy, dw, dh)
        })
        .collect();

    (0..params.frame_count)
        .map(|t| {
            let mut frame = Canvas {
                width: w,
                height: h,
                px: chrome.px.clone(),
            };
            frame.blit_rows(
                &content,
                params.scroll * t as u32,
                content_y,
                content_h.min(h - content_y.min(h)),
            );
            let mut frng = SplitMix64::new(params.seed ^ (t as u64).wrapping_mul(0x9E37_79B9));
            for &(x, y, dw, dh) in &dirty {
                let c = accents[frng.below(accents.len() as u64) as usize];
                frame.fill(x, y, dw, dh, c);
            }
            frame.into_frame()
        })
        .collect()
}

fn two_d_like(params: &SynthParams) -> Result<Vec<Frame>> {
    let mut rng = SplitMix64::new(params.seed);
    let (w, h) = (params.width, params.height);
    let n = params.palette_size.max(4) as usize;
    let colors: Vec<u32> = (0..n).map(|_| random_color(&mut rng)).collect();
    let tile = 16i64;
    let tiles: Vec<[u32; 2]> = (0..4)
        .map(|i| [colors[i % n], colors[(i + 1) % n]])
        .collect();
    let map_w = i64::from(w) / tile + 2;
    let map: Vec<usize> = (0..map_w * (i64::from(h) / tile + 2))
        .map(|_| rng.below(tiles.len() as u64) as usize)
        .collect();
    struct Sprite {
        x: i64,
        y: i64,
        dx: i64,
        dy: i64,
        size: i64,
        body: u32,
        outline: u32,
    }
    let mut sprites: Vec<Sprite> = (0..6 + params.dirty_rects)
        .map(|_| Sprite {
            x: rng.below(u64::from(w)) as i64,
            y: rng.below(u64::from(h)) as i64,
            dx: rng.below(9) as i64 - 4,
            dy: rng.below(9) as i64 - 4,
            size: 8 + rng.below(24) as i64,
            body: colors[rng.below(n as u64) as usize],
            outline: colors[rng.below(n as u64) as usize],
        })
        .collect();
    let mut out = Vec::with_capacity(params.frame_count);
    for t in 0..params.frame_count as i64 {
        let mut c = Canvas::new(w, h, colors[0]);
        let off = t * i64::from(params.scroll) / 2;
        for y in 0..i64::from(h) {
            for x in 0..i64::from(w) {
                let (mx, my) = ((x + off) / tile, y / tile);
                let idx = ((my % (map.len() as i64 / map_w)) * map_w + mx % map_w) as usize;
                let [a, b] = tiles[map[idx]];
                let inner = ((x + off) % tile) / 4 + (y % tile) / 4;
                c.put(x, y, if inner % 3 == 0 { b } else { a });
            }
        }
        for s in sprites.iter_mut() {
            c.fill(s.x - 1, s.y - 1, s.size + 2, s.size + 2, s.outline);
            c.fill(s.x, s.y, s.size, s.size, s.body);
            s.x = (s.x + s.dx).rem_euclid(i64::from(w));
            s.y = (s.y + s.dy).rem_euclid(i64::from(h));
        }
        out.push(c.into_frame()?);
    }
    Ok(out)
}

fn noise(params: &SynthParams) -> Result<Vec<Frame>> {
    let mut rng = SplitMix64::new(params.seed);
    (0..params.frame_count)
        .map(|_| {
            let px = (0..params.width * params.height)
                .map(|_| random_color(&mut rng))
                .collect();
            Frame::new(params.width, params.height, px)
        })
        .collect()
}

fn gradient(params: &SynthParams) -> Result<Vec<Frame>> {
    let (w, h) = (params.width, params.height);
    let phase = (params.seed % 256) as u32;
    (0..params.frame_count as u32)
        .map(|t| {
            let px = (0..w * h)
                .map(|i| {
                    let (x, y) = (i % w, i / w);
                    let r = (x * 255 / w.max(1) + t * params.scroll + phase) as u8;
                    let g = (y * 255 / h.max(1)) as u8;
                    let b = ((x + y) / 4 + t) as u8;
                    Pixel::new(r, g, b, 255).packed()
                })
                .collect();
            Frame::new(w, h, px)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{color_change, pixel_change};

    #[test]
    fn deterministic() {
        for generator in [
            Generator::UiLike,
            Generator::TwoDLike,
            Generator::Noise,
            Generator::Gradient,
        ] {
            let params = SynthParams::new(generator, 96, 80, 3, 5);
            let a = generate(&params).unwrap();
            let b = generate(&params).unwrap();
            assert_eq!(a.frames(), b.frames(), "{generator}");
            let other = generate(&SynthParams { seed: 6, ..params }).unwrap();
            if generator != Generator::Gradient {
                assert_ne!(a.frames(), other.frames(), "{generator}");
            }
        }
    }

    #[test]
    fn ui_scroll_changes_pixels_more_than_colors() {
        let trace = generate(&SynthParams::new(Generator::UiLike, 180, 320, 4, 9)).unwrap();
        for pair in trace.frames().windows(2) {
            let p = pixel_change(&pair[0], &pair[1]).unwrap();
            let c = color_change(&pair[0], &pair[1]).unwrap();
            assert!(p > c, "pixel {p} color {c}");
        }
    }

    #[test]
    fn rejects_degenerate_params() {
        assert!(generate(&SynthParams::new(Generator::Noise, 0, 4, 2, 1)).is_err());
        assert!(generate(&SynthParams::new(Generator::Noise, 4, 4, 1, 1)).is_err());
    }

    #[test]
    fn tiny_frames() {
        for generator in [Generator::UiLike, Generator::TwoDLike] {
            generate(&SynthParams::new(generator, 3, 5, 2, 1)).unwrap();
        }
    }
}
