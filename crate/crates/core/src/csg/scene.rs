//! Packed boolean rasters.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canvas dimensions in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Canvas {
    pub width: u16,
    pub height: u16,
}

impl Canvas {
    pub fn new(width: u16, height: u16) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidCanvas { width, height });
        }
        Ok(Self { width, height })
    }

    pub const fn square(dim: u16) -> Self {
        Self { width: dim, height: dim }
    }

    pub fn pixels(self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn words(self) -> usize {
        self.pixels().div_ceil(64)
    }

    /// Parses `WxH`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidCanvasSpec(text.to_string());
        let (w, h) = text.split_once(['x', 'X']).ok_or_else(bad)?;
        let w = w.trim().parse().map_err(|_| bad())?;
        let h = h.trim().parse().map_err(|_| bad())?;
        Self::new(w, h)
    }
}

impl Default for Canvas {
    fn default() -> Self {
        Self::square(32)
    }
}

impl fmt::Display for Canvas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// A `width × height` bitmap stored row-major, pixel `(u, v)` at bit `v * width + u`.
///
/// Bits past the last pixel are always zero, so equality and hashing can work
/// on the raw words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scene {
    canvas: Canvas,
    words: Box<[u64]>,
}

impl Scene {
    pub fn empty(canvas: Canvas) -> Self {
        Self { canvas, words: vec![0; canvas.words()].into_boxed_slice() }
    }

    pub fn full(canvas: Canvas) -> Self {
        let mut s = Self::empty(canvas);
        s.set_range(0, canvas.pixels());
        s
    }

    pub fn from_fn(canvas: Canvas, mut filled: impl FnMut(i32, i32) -> bool) -> Self {
        let mut s = Self::empty(canvas);
        for v in 0..canvas.height as i32 {
            for u in 0..canvas.width as i32 {
                if filled(u, v) {
                    s.set(u, v, true);
                }
            }
        }
        s
    }

    pub fn from_pixels(canvas: Canvas, pixels: impl IntoIterator<Item = (i32, i32)>) -> Self {
        let mut s = Self::empty(canvas);
        for (u, v) in pixels {
            s.set(u, v, true);
        }
        s
    }

    /// Builds a scene from raw words. Bits past the last pixel are cleared.
    pub fn from_words(canvas: Canvas, words: Vec<u64>) -> Result<Self> {
        if words.len() != canvas.words() {
            return Err(Error::SceneFormat(format!(
                "expected {} words for a {canvas} canvas, got {}",
                canvas.words(),
                words.len()
            )));
        }
        let mut s = Self { canvas, words: words.into_boxed_slice() };
        s.clear_tail();
        Ok(s)
    }

    #[inline]
    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    #[inline]
    pub fn width(&self) -> u16 {
        self.canvas.width
    }

    #[inline]
    pub fn height(&self) -> u16 {
        self.canvas.height
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    fn index(&self, u: i32, v: i32) -> Option<usize> {
        let (w, h) = (self.canvas.width as i32, self.canvas.height as i32);
        (0 <= u && u < w && 0 <= v && v < h).then(|| (v * w + u) as usize)
    }

    /// Out-of-canvas reads are `false`.
    #[inline]
    pub fn get(&self, u: i32, v: i32) -> bool {
        match self.index(u, v) {
            Some(i) => self.words[i / 64] >> (i % 64) & 1 == 1,
            None => false,
        }
    }

    /// Out-of-canvas writes are discarded.
    #[inline]
    pub fn set(&mut self, u: i32, v: i32, filled: bool) {
        if let Some(i) = self.index(u, v) {
            let bit = 1u64 << (i % 64);
            if filled {
                self.words[i / 64] |= bit;
            } else {
                self.words[i / 64] &= !bit;
            }
        }
    }

    /// Sets bits `[lo, hi)` of the flat index space.
    fn set_range(&mut self, lo: usize, hi: usize) {
        let mut i = lo;
        while i < hi {
            let w = i / 64;
            let off = i % 64;
            let n = (64 - off).min(hi - i);
            let mask = if n == 64 { !0 } else { ((1u64 << n) - 1) << off };
            self.words[w] |= mask;
            i += n;
        }
    }

    fn clear_range(&mut self, lo: usize, hi: usize) {
        let mut i = lo;
        while i < hi {
            let w = i / 64;
            let off = i % 64;
            let n = (64 - off).min(hi - i);
            let mask = if n == 64 { !0 } else { ((1u64 << n) - 1) << off };
            self.words[w] &= !mask;
            i += n;
        }
    }

    fn clear_tail(&mut self) {
        let n = self.canvas.pixels();
        if n % 64 != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << (n % 64)) - 1;
        }
    }

    /// Fills the inclusive box `[u1, u2] × [v1, v2]`, clipped to the canvas.
    pub fn fill_box(&mut self, u1: i32, v1: i32, u2: i32, v2: i32) {
        let (w, h) = (self.canvas.width as i32, self.canvas.height as i32);
        let (u1, u2) = (u1.max(0), u2.min(w - 1));
        let (v1, v2) = (v1.max(0), v2.min(h - 1));
        if u1 > u2 || v1 > v2 {
            return;
        }
        for v in v1..=v2 {
            let base = (v * w) as usize;
            self.set_range(base + u1 as usize, base + u2 as usize + 1);
        }
    }

    pub fn count(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn pixels(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        let w = self.canvas.width as usize;
        self.words.iter().enumerate().flat_map(move |(wi, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let i = wi * 64 + b;
                Some(((i % w) as i32, (i / w) as i32))
            })
        })
    }

    pub fn same_canvas(&self, other: &Scene) -> Result<()> {
        if self.canvas != other.canvas {
            return Err(Error::DimensionMismatch { left: self.canvas, right: other.canvas });
        }
        Ok(())
    }

    pub fn union_with(&mut self, other: &Scene) {
        debug_assert_eq!(self.canvas, other.canvas);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn diff_with(&mut self, other: &Scene) {
        debug_assert_eq!(self.canvas, other.canvas);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    pub fn intersect_with(&mut self, other: &Scene) {
        debug_assert_eq!(self.canvas, other.canvas);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    pub fn intersection(&self, other: &Scene) -> Scene {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn xor_with(&mut self, other: &Scene) {
        debug_assert_eq!(self.canvas, other.canvas);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    pub fn union(&self, other: &Scene) -> Scene {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &Scene) -> Scene {
        let mut s = self.clone();
        s.diff_with(other);
        s
    }

    pub fn xor(&self, other: &Scene) -> Scene {
        let mut s = self.clone();
        s.xor_with(other);
        s
    }

    /// `(|a ∧ b|, |a ∨ b|)` by population count.
    #[inline]
    pub fn overlap_counts(&self, other: &Scene) -> (u32, u32) {
        debug_assert_eq!(self.canvas, other.canvas);
        let mut inter = 0;
        let mut union = 0;
        for (a, b) in self.words.iter().zip(other.words.iter()) {
            inter += (a & b).count_ones();
            union += (a | b).count_ones();
        }
        (inter, union)
    }

    /// ORs `src` translated by `(dx, dy)` into `self`: pixel `(u, v)` of `src`
    /// lands on `(u + dx, v + dy)`; pixels leaving the canvas are dropped.
    pub fn or_translated(&mut self, src: &Scene, dx: i32, dy: i32) {
        debug_assert_eq!(self.canvas, src.canvas);
        let (w, h) = (self.canvas.width as i32, self.canvas.height as i32);
        if dx.abs() >= w || dy.abs() >= h {
            return;
        }
        if dx == 0 && dy == 0 {
            self.union_with(src);
            return;
        }
        let mut shifted = Scene::empty(self.canvas);
        shift_words(&src.words, &mut shifted.words, (dy * w + dx) as isize);
        // Pixels that wrapped across a row boundary land in the columns
        // vacated by the shift.
        if dx != 0 {
            let (lo, hi) = if dx > 0 { (0, dx) } else { (w + dx, w) };
            for v in 0..h {
                let base = (v * w) as usize;
                shifted.clear_range(base + lo as usize, base + hi as usize);
            }
        }
        shifted.clear_tail();
        self.union_with(&shifted);
    }

    pub fn translated(&self, dx: i32, dy: i32) -> Scene {
        let mut out = Scene::empty(self.canvas);
        out.or_translated(self, dx, dy);
        out
    }

    /// Parses the text scene format: a `scene <width> <height>` header line,
    /// then `height` rows of `width` characters from `{0, 1}`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim_end).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::SceneFormat("empty input".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("scene") {
            return Err(Error::SceneFormat(format!("bad header {header:?}")));
        }
        let mut dim = |name: &str| -> Result<u16> {
            parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::SceneFormat(format!("missing or invalid {name} in header")))
        };
        let canvas = Canvas::new(dim("width")?, dim("height")?)?;
        let mut scene = Scene::empty(canvas);
        for v in 0..canvas.height as i32 {
            let row = lines
                .next()
                .ok_or_else(|| Error::SceneFormat(format!("missing row {v}")))?;
            if row.chars().count() != canvas.width as usize {
                return Err(Error::SceneFormat(format!(
                    "row {v} has {} columns, expected {}",
                    row.chars().count(),
                    canvas.width
                )));
            }
            for (u, c) in row.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => scene.set(u as i32, v, true),
                    other => {
                        return Err(Error::SceneFormat(format!(
                            "row {v} column {u}: unexpected character {other:?}"
                        )))
                    }
                }
            }
        }
        if let Some(extra) = lines.next() {
            return Err(Error::SceneFormat(format!("trailing content {extra:?}")));
        }
        Ok(scene)
    }

    pub fn to_text(&self) -> String {
        self.grid('1', '0', true)
    }

    /// Human-readable rendering with `#` for filled and `.` for empty pixels.
    pub fn to_ascii(&self) -> String {
        self.grid('#', '.', false)
    }

    fn grid(&self, on: char, off: char, header: bool) -> String {
        let (w, h) = (self.canvas.width as i32, self.canvas.height as i32);
        let mut out = String::with_capacity(((w + 1) * (h + 1)) as usize);
        if header {
            out.push_str(&format!("scene {w} {h}\n"));
        }
        for v in 0..h {
            for u in 0..w {
                out.push(if self.get(u, v) { on } else { off });
            }
            out.push('\n');
        }
        out
    }

    /// Run-length bit string, e.g. `0*12 1*3 0*241`.
    pub fn to_rle(&self) -> String {
        let n = self.canvas.pixels();
        let w = self.canvas.width as usize;
        let mut runs: Vec<String> = Vec::new();
        let mut i = 0;
        while i < n {
            let bit = self.get((i % w) as i32, (i / w) as i32);
            let start = i;
            while i < n && self.get((i % w) as i32, (i / w) as i32) == bit {
                i += 1;
            }
            runs.push(format!("{}*{}", bit as u8, i - start));
        }
        runs.join(" ")
    }

    /// Approximate heap + inline footprint in bytes.
    pub fn footprint(&self) -> usize {
        std::mem::size_of::<Self>() + self.words.len() * 8
    }
}

/// `dst = src << k` over the flat bit index (negative `k` shifts toward bit 0).
fn shift_words(src: &[u64], dst: &mut [u64], k: isize) {
    let n = src.len() as isize;
    let word_shift = k.div_euclid(64);
    let bit_shift = k.rem_euclid(64) as u32;
    for (i, out) in dst.iter_mut().enumerate() {
        let j = i as isize - word_shift;
        let lo = if (0..n).contains(&j) { src[j as usize] } else { 0 };
        let hi = if bit_shift != 0 && (0..n).contains(&(j - 1)) { src[(j - 1) as usize] } else { 0 };
        *out = if bit_shift == 0 { lo } else { (lo << bit_shift) | (hi >> (64 - bit_shift)) };
    }
}

impl fmt::Debug for Scene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scene({}, {} filled)\n{}", self.canvas, self.count(), self.to_ascii())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_translate(s: &Scene, dx: i32, dy: i32) -> Scene {
        Scene::from_fn(s.canvas(), |u, v| s.get(u - dx, v - dy))
    }

    #[test]
    fn translate_matches_per_pixel() {
        for &(w, h) in &[(5u16, 3u16), (16, 16), (13, 9), (70, 3)] {
            let c = Canvas::new(w, h).unwrap();
            let s = Scene::from_fn(c, |u, v| (u * 7 + v * 3) % 5 < 2);
            for dx in -(w as i32)..=(w as i32) {
                for dy in -(h as i32)..=(h as i32) {
                    assert_eq!(s.translated(dx, dy), naive_translate(&s, dx, dy), "{w}x{h} by ({dx},{dy})");
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let c = Canvas::new(5, 3).unwrap();
        let s = Scene::from_pixels(c, [(0, 0), (4, 2), (2, 1)]);
        let text = s.to_text();
        assert!(text.starts_with("scene 5 3\n10000\n"));
        assert_eq!(Scene::parse(&text).unwrap(), s);
    }

    #[test]
    fn parse_errors() {
        assert!(Scene::parse("").is_err());
        assert!(Scene::parse("scene 2 2\n01\n").is_err());
        assert!(Scene::parse("scene 2 2\n01\n0x\n").is_err());
        assert!(Scene::parse("scene 2 2\n011\n00\n").is_err());
        assert!(Scene::parse("picture 2 2\n01\n00\n").is_err());
    }

    #[test]
    fn out_of_canvas_reads_false() {
        let s = Scene::full(Canvas::square(4));
        assert!(!s.get(-1, 0));
        assert!(!s.get(4, 0));
        assert!(s.get(3, 3));
        assert_eq!(s.count(), 16);
    }

    #[test]
    fn fill_box_clips() {
        let mut s = Scene::empty(Canvas::square(4));
        s.fill_box(-2, 2, 10, 10);
        assert_eq!(s.count(), 8);
    }

    #[test]
    fn rle() {
        let s = Scene::from_pixels(Canvas::new(4, 1).unwrap(), [(1, 0), (2, 0)]);
        assert_eq!(s.to_rle(), "0*1 1*2 0*1");
    }
}
