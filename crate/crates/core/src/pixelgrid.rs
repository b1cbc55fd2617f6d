//! Bit-packed rasters of the dual regions `V_{k,l}` over `[-1, 1]^2`.
//!
//! Pixel `(i, j)` is 1-based; `i` indexes the real part `a`, `j` the
//! imaginary part `b`, and covers
//! `[(i-1)/Q - 1, i/Q - 1] x [(j-1)/Q - 1, j/Q - 1]` with `Q = 2^k`.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex;

use crate::dynamics::{NatExtOrbit, NatExtState};
use crate::error::{Error, Result};
use crate::regions::{boundary_translates, classify_interior, rotate_point, RegionId};

pub const MAX_K: u32 = 16;

#[derive(Clone, PartialEq, Eq)]
pub struct PixelGrid {
    k: u32,
    size: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    region: RegionId,
}

impl fmt::Debug for PixelGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PixelGrid")
            .field("k", &self.k)
            .field("region", &self.region)
            .field("occupied", &self.count_ones())
            .finish()
    }
}

impl PixelGrid {
    pub fn new(k: u32, region: RegionId) -> Result<Self> {
        if !(1..=MAX_K).contains(&k) {
            return Err(Error::Config(format!("k = {k} outside 1..={MAX_K}")));
        }
        let size = 2usize << k;
        let words_per_row = size.div_ceil(64);
        Ok(Self {
            k,
            size,
            words_per_row,
            bits: vec![0; words_per_row * size],
            region,
        })
    }

    fn empty_like(&self) -> Self {
        Self {
            bits: vec![0; self.bits.len()],
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> Self {
        Self {
            k: self.k,
            size: self.size,
            words_per_row: self.words_per_row,
            bits: Vec::new(),
            region: self.region,
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `Q = 2^k`.
    pub fn q(&self) -> usize {
        self.size / 2
    }

    /// Side length `2Q`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn region(&self) -> RegionId {
        self.region
    }

    pub fn memory_bytes(&self) -> usize {
        self.bits.len() * 8
    }

    #[inline]
    fn locate(&self, i: usize, j: usize) -> (usize, u64) {
        debug_assert!((1..=self.size).contains(&i) && (1..=self.size).contains(&j));
        let col = i - 1;
        ((j - 1) * self.words_per_row + col / 64, 1u64 << (col % 64))
    }

    /// Panics on out-of-range indices in debug builds.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        let (w, m) = self.locate(i, j);
        self.bits[w] & m != 0
    }

    /// Bounds-checked read; out-of-range cells read as `false`.
    #[inline]
    pub fn get_or_false(&self, i: isize, j: isize) -> bool {
        let s = self.size as isize;
        (1..=s).contains(&i) && (1..=s).contains(&j) && self.get(i as usize, j as usize)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        let (w, m) = self.locate(i, j);
        self.bits[w] |= m;
    }

    pub fn clear(&mut self, i: usize, j: usize) {
        let (w, m) = self.locate(i, j);
        self.bits[w] &= !m;
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn occupancy(&self) -> f64 {
        self.count_ones() as f64 / (self.size * self.size) as f64
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn row(&self, j: usize) -> &[u64] {
        let start = (j - 1) * self.words_per_row;
        &self.bits[start..start + self.words_per_row]
    }

    /// Set pixels of row `j` in increasing `i`.
    pub fn row_ones(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(j).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit + 1)
            })
        })
    }

    /// All set pixels, row by row.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.size).flat_map(move |j| self.row_ones(j).map(move |i| (i, j)))
    }

    pub fn check_index(&self, i: usize, j: usize) -> Result<()> {
        if (1..=self.size).contains(&i) && (1..=self.size).contains(&j) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                i: i as i64,
                j: j as i64,
                size: self.size as u32,
            })
        }
    }

    /// `(i/Q - 1/(2Q) - 1) + (j/Q - 1/(2Q) - 1) i`.
    pub fn pixel_center(&self, i: usize, j: usize) -> Result<Complex<f64>> {
        self.check_index(i, j)?;
        Ok(Complex::new(self.center_coord(i), self.center_coord(j)))
    }

    #[inline]
    pub fn center_coord(&self, i: usize) -> f64 {
        let q = self.q() as f64;
        (2 * i) as f64 / (2.0 * q) - 1.0 / (2.0 * q) - 1.0
    }

    #[inline]
    fn coord_index(&self, x: f64) -> usize {
        let q = self.q() as f64;
        let raw = ((x + 1.0) * q).floor() as i64 + 1;
        raw.clamp(1, self.size as i64) as usize
    }

    /// `i = floor((Re w + 1) Q) + 1` clamped to `1..=2Q`, likewise for `j`.
    pub fn pixel_index(&self, w: &Complex<f64>) -> Result<(usize, usize)> {
        if !(w.re.abs() <= 1.0 && w.im.abs() <= 1.0) {
            return Err(Error::OutOfRange(format!("{w}")));
        }
        Ok((self.coord_index(w.re), self.coord_index(w.im)))
    }

    /// Sets the pixel containing `w`; points outside the square are ignored.
    #[inline]
    pub fn mark(&mut self, w: &Complex<f64>) -> bool {
        if w.re.abs() <= 1.0 && w.im.abs() <= 1.0 {
            let (i, j) = (self.coord_index(w.re), self.coord_index(w.im));
            self.set(i, j);
            true
        } else {
            false
        }
    }

    fn mask_tail(&mut self) {
        let rem = self.size % 64;
        if rem != 0 {
            let mask = (1u64 << rem) - 1;
            for j in 0..self.size {
                self.bits[j * self.words_per_row + self.words_per_row - 1] &= mask;
            }
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        Ok(out)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.k != other.k {
            return Err(Error::ResolutionMismatch {
                left: self.k,
                right: other.k,
            });
        }
        Ok(())
    }

    /// Number of cells where the grids differ.
    pub fn symmetric_difference(&self, other: &Self) -> Result<u64> {
        self.check_compatible(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum())
    }

    /// Halves the resolution; a coarse pixel is set if any of its four fine
    /// pixels is.
    pub fn downsample(&self) -> Result<Self> {
        let mut out = PixelGrid::new(self.k - 1, self.region)?;
        for (i, j) in self.ones() {
            out.set(i.div_ceil(2), j.div_ceil(2));
        }
        Ok(out)
    }

    /// Raster of `(-i)^j V`, i.e. the grid for `rotate_region(region, j)`.
    pub fn rotated(&self, quarter_turns: i32) -> Self {
        let mut out = self.empty_like();
        out.region = self.region.rotate(quarter_turns);
        let n = self.size + 1;
        for (i, j) in self.ones() {
            let (mut a, mut b) = (i, j);
            for _ in 0..quarter_turns.rem_euclid(4) {
                (a, b) = (b, n - a);
            }
            out.set(a, b);
        }
        out
    }

    /// Mirror axis of this grid's region.
    pub fn mirror(&self) -> Mirror {
        Mirror::for_region(self.region)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        write!(
            out,
            "HCFGRID v1 k={} region=K{},{}\n",
            self.k,
            self.region.k(),
            self.region.l()
        )?;
        let row_bytes = self.size.div_ceil(8);
        for j in 1..=self.size {
            let bytes: Vec<u8> = self
                .row(j)
                .iter()
                .flat_map(|w| w.to_le_bytes())
                .take(row_bytes)
                .collect();
            out.write_all(&bytes)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let data = fs::read(path)?;
        let bad = |reason: &str| Error::Format {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        };
        let newline = data
            .iter()
            .position(|&c| c == b'\n')
            .ok_or_else(|| bad("missing header"))?;
        let header = std::str::from_utf8(&data[..newline]).map_err(|_| bad("header is not text"))?;
        let mut fields = header.split(' ');
        if fields.next() != Some("HCFGRID") || fields.next() != Some("v1") {
            return Err(bad("bad magic"));
        }
        let k: u32 = fields
            .next()
            .and_then(|f| f.strip_prefix("k="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("missing k"))?;
        let region: RegionId = fields
            .next()
            .and_then(|f| f.strip_prefix("region="))
            .ok_or_else(|| bad("missing region"))?
            .parse()
            .map_err(|_| bad("bad region"))?;
        if fields.next().is_some() {
            return Err(bad("trailing header fields"));
        }
        let mut grid = PixelGrid::new(k, region).map_err(|_| bad("k out of range"))?;
        let row_bytes = grid.size.div_ceil(8);
        let payload = &data[newline + 1..];
        if payload.len() != row_bytes * grid.size {
            return Err(bad(&format!(
                "payload has {} bytes, header implies {}",
                payload.len(),
                row_bytes * grid.size
            )));
        }
        for (j, chunk) in payload.chunks(row_bytes).enumerate() {
            for (w, bytes) in chunk.chunks(8).enumerate() {
                let mut buf = [0u8; 8];
                buf[..bytes.len()].copy_from_slice(bytes);
                grid.bits[j * grid.words_per_row + w] = u64::from_le_bytes(buf);
            }
        }
        grid.mask_tail();
        Ok(grid)
    }

    /// Binary PBM (P4); set pixels are black, top row is the largest `b`.
    pub fn export_pbm(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        write!(out, "P4\n{} {}\n", self.size, self.size)?;
        let row_bytes = self.size.div_ceil(8);
        let mut buf = vec![0u8; row_bytes];
        for j in (1..=self.size).rev() {
            buf.iter_mut().for_each(|b| *b = 0);
            for i in self.row_ones(j) {
                buf[(i - 1) / 8] |= 0x80 >> ((i - 1) % 8);
            }
            out.write_all(&buf)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Reflection symmetry of a `V_{k,l}` raster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mirror {
    /// About `b = -a`: `(i, j) -> (2Q+1-j, 2Q+1-i)`.
    AntiDiagonal,
    /// About `b = a`: `(i, j) -> (j, i)`.
    Diagonal,
    /// About `b = 0`: `(i, j) -> (i, 2Q+1-j)`.
    RealAxis,
    /// About `a = 0`: `(i, j) -> (2Q+1-i, j)`.
    ImaginaryAxis,
}

impl Mirror {
    /// `V_{1,1}` and `V_{2,1}` reflect about `b = -a`, `V_{3,1}` about `b = 0`;
    /// a quarter turn of the region turns the axis with it.
    pub fn for_region(r: RegionId) -> Self {
        let odd = r.l() % 2 == 1;
        match (r.k(), odd) {
            (3, true) => Mirror::RealAxis,
            (3, false) => Mirror::ImaginaryAxis,
            (_, true) => Mirror::AntiDiagonal,
            (_, false) => Mirror::Diagonal,
        }
    }

    #[inline]
    pub fn apply(self, i: usize, j: usize, size: usize) -> (usize, usize) {
        let n = size + 1;
        match self {
            Mirror::AntiDiagonal => (n - j, n - i),
            Mirror::Diagonal => (j, i),
            Mirror::RealAxis => (i, n - j),
            Mirror::ImaginaryAxis => (n - i, j),
        }
    }

    /// Columns of row `j` in the closed half domain kept by the symmetric
    /// flood fill; `None` if the row is entirely in the other half.
    fn half_columns(self, j: usize, size: usize) -> Option<(usize, usize)> {
        match self {
            Mirror::AntiDiagonal => Some((1, size + 1 - j)),
            Mirror::Diagonal => Some((1, j)),
            Mirror::RealAxis => (j <= size / 2).then_some((1, size)),
            Mirror::ImaginaryAxis => Some((1, size / 2)),
        }
    }
}

/// Outcome of a rasterization run.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRun {
    pub steps: u64,
    /// Steps whose `z` fell in a region feeding the grid.
    pub region_visits: u64,
    /// Set pixels after the run.
    pub occupied: u64,
    pub final_state: NatExtState<f64>,
}

/// Simple rasterization: after every step with `z` in the grid's region,
/// set the pixel containing `w`.
pub fn populate_orbit(
    grid: &mut PixelGrid,
    seed: &NatExtState<f64>,
    iterations: u64,
) -> Result<OrbitRun> {
    let target = grid.region();
    let mut orbit = NatExtOrbit::new(seed.clone());
    let mut visits = 0;
    for _ in 0..iterations {
        let s = orbit.advance()?;
        if classify_interior(&s.z) == Some(target) {
            visits += 1;
            let w = s.w;
            grid.mark(&w);
        }
    }
    Ok(OrbitRun {
        steps: iterations,
        region_visits: visits,
        occupied: grid.count_ones(),
        final_state: orbit.state().clone(),
    })
}

/// Like [`populate_orbit`] but also uses visits to the three rotated copies
/// of the region: `(z, w)` in `K_{k,l'} x V_{k,l'}` gives
/// `(-i)^{l-l'} w` in `V_{k,l}`.
pub fn populate_orbit_rotated(
    grid: &mut PixelGrid,
    seed: &NatExtState<f64>,
    iterations: u64,
) -> Result<OrbitRun> {
    let target = grid.region();
    let mut orbit = NatExtOrbit::new(seed.clone());
    let mut visits = 0;
    for _ in 0..iterations {
        let s = orbit.advance()?;
        if let Some(r) = classify_interior(&s.z) {
            if r.k() == target.k() {
                visits += 1;
                let w = rotate_point(&s.w, target.rotation() - r.rotation());
                grid.mark(&w);
            }
        }
    }
    Ok(OrbitRun {
        steps: iterations,
        region_visits: visits,
        occupied: grid.count_ones(),
        final_state: orbit.state().clone(),
    })
}

/// Boundary rasterization of `V_{1,1}`: for `z` in `K_{k,l}` set the pixels
/// containing `1/(w + alpha)` for each translate `alpha` of that region
/// (see [`boundary_translates`]).
pub fn populate_boundary(
    grid: &mut PixelGrid,
    seed: &NatExtState<f64>,
    iterations: u64,
) -> Result<OrbitRun> {
    let k11 = RegionId::new(1, 1)?;
    if grid.region() != k11 {
        return Err(Error::RegionMismatch {
            expected: k11,
            actual: grid.region(),
        });
    }
    let tables: Vec<Vec<Complex<f64>>> = RegionId::all()
        .map(|r| {
            boundary_translates(r)
                .iter()
                .map(|a| Complex::new(a.re as f64, a.im as f64))
                .collect()
        })
        .collect();
    let mut orbit = NatExtOrbit::new(seed.clone());
    let mut visits = 0;
    for _ in 0..iterations {
        let s = orbit.advance()?;
        if let Some(r) = classify_interior(&s.z) {
            visits += 1;
            for alpha in &tables[r.index()] {
                let u = (s.w + alpha).inv();
                grid.mark(&u);
            }
        }
    }
    Ok(OrbitRun {
        steps: iterations,
        region_visits: visits,
        occupied: grid.count_ones(),
        final_state: orbit.state().clone(),
    })
}

/// `cell(i,j) |= cell(mirror(i,j))`, with the mirror axis of the region.
pub fn fill_symmetry(g: &PixelGrid) -> PixelGrid {
    let mirror = g.mirror();
    let mut out = g.clone();
    for (i, j) in g.ones() {
        let (a, b) = mirror.apply(i, j, g.size);
        out.set(a, b);
    }
    out
}

/// One pass: a cell becomes set when its four orthogonal neighbours are.
pub fn fill_neighbors(g: &PixelGrid) -> PixelGrid {
    let words = g.words_per_row;
    let mut out = g.clone();
    if g.size < 3 {
        return out;
    }
    for j in 2..g.size {
        let up = g.row(j + 1);
        let down = g.row(j - 1);
        let row = g.row(j);
        for w in 0..words {
            // bit p of `left` holds column p-1, of `right` column p+1
            let carry_in = if w > 0 { row[w - 1] >> 63 } else { 0 };
            let left = (row[w] << 1) | carry_in;
            let carry_next = if w + 1 < words { row[w + 1] << 63 } else { 0 };
            let right = (row[w] >> 1) | carry_next;
            out.bits[(j - 1) * words + w] |= up[w] & down[w] & left & right;
        }
    }
    out.mask_tail();
    out
}

/// Scanline fill of the free cells reachable from the free border cells of
/// the allowed area. `blocked` must be `size x size`; `columns(j)` gives the
/// allowed column range of row `j`.
fn exterior(
    blocked: &PixelGrid,
    columns: impl Fn(usize) -> Option<(usize, usize)>,
) -> PixelGrid {
    let n = blocked.size;
    let mut seen = blocked.empty_like();
    let free = |seen: &PixelGrid, i: usize, j: usize| !blocked.get(i, j) && !seen.get(i, j);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for j in 1..=n {
        if let Some((lo, hi)) = columns(j) {
            if j == 1 || j == n {
                stack.extend((lo..=hi).map(|i| (i, j)));
            } else {
                stack.push((lo, j));
                if hi == n {
                    stack.push((hi, j));
                }
            }
        }
    }
    while let Some((i, j)) = stack.pop() {
        if !free(&seen, i, j) {
            continue;
        }
        let (lo, hi) = columns(j).expect("seed inside the allowed area");
        let mut left = i;
        while left > lo && free(&seen, left - 1, j) {
            left -= 1;
        }
        let mut right = i;
        while right < hi && free(&seen, right + 1, j) {
            right += 1;
        }
        for x in left..=right {
            seen.set(x, j);
        }
        for nj in [j.wrapping_sub(1), j + 1] {
            if nj < 1 || nj > n {
                continue;
            }
            let Some((nlo, nhi)) = columns(nj) else {
                continue;
            };
            let (from, to) = (left.max(nlo), right.min(nhi));
            let mut in_run = false;
            for x in from..=to {
                let f = free(&seen, x, nj);
                if f && !in_run {
                    stack.push((x, nj));
                }
                in_run = f;
            }
        }
    }
    seen
}

fn negate(g: &PixelGrid) -> PixelGrid {
    let mut out = g.clone();
    out.bits.iter_mut().for_each(|w| *w = !*w);
    out.mask_tail();
    out
}

/// Sets every cell not connected (4-connectivity) to the border through
/// unset cells.
pub fn flood_fill(g: &PixelGrid) -> PixelGrid {
    let n = g.size;
    negate(&exterior(g, |_| Some((1, n))))
}

/// Flood fill of the mirror-symmetrized grid, computed on one closed half of
/// the square and reflected back. Folding along the axis preserves
/// 4-connectivity, so this equals `flood_fill(fill_symmetry(g))`.
pub fn flood_fill_symmetric(g: &PixelGrid) -> PixelGrid {
    let sym = fill_symmetry(g);
    let mirror = g.mirror();
    let n = g.size;
    let half = exterior(&sym, |j| mirror.half_columns(j, n));
    let mut outside = half.clone();
    for (i, j) in half.ones() {
        let (a, b) = mirror.apply(i, j, n);
        outside.set(a, b);
    }
    negate(&outside)
}

/// Hole-repair strategy applied after rasterization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FillStrategy {
    None,
    Symmetry,
    Neighbors,
    Flood,
    #[default]
    FloodSymmetry,
}

impl FillStrategy {
    pub const ALL: [FillStrategy; 5] = [
        FillStrategy::None,
        FillStrategy::Symmetry,
        FillStrategy::Neighbors,
        FillStrategy::Flood,
        FillStrategy::FloodSymmetry,
    ];

    pub fn apply(self, g: &PixelGrid) -> PixelGrid {
        match self {
            FillStrategy::None => g.clone(),
            FillStrategy::Symmetry => fill_symmetry(g),
            FillStrategy::Neighbors => fill_neighbors(g),
            FillStrategy::Flood => flood_fill(g),
            FillStrategy::FloodSymmetry => flood_fill_symmetric(g),
        }
    }
}

impl fmt::Display for FillStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FillStrategy::None => "none",
            FillStrategy::Symmetry => "symmetry",
            FillStrategy::Neighbors => "neighbors",
            FillStrategy::Flood => "flood",
            FillStrategy::FloodSymmetry => "flood+symmetry",
        })
    }
}

impl FromStr for FillStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FillStrategy::ALL
            .into_iter()
            .find(|f| f.to_string() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown fill strategy {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(k: u8, l: u8) -> RegionId {
        RegionId::new(k, l).unwrap()
    }

    fn grid(k: u32) -> PixelGrid {
        PixelGrid::new(k, region(1, 1)).unwrap()
    }

    fn from_cells(k: u32, r: RegionId, cells: &[(usize, usize)]) -> PixelGrid {
        let mut g = PixelGrid::new(k, r).unwrap();
        for &(i, j) in cells {
            g.set(i, j);
        }
        g
    }

    #[test]
    fn pixel_center_examples() {
        let g = grid(1);
        assert_eq!(g.pixel_center(1, 1).unwrap(), Complex::new(-0.75, -0.75));
        assert_eq!(g.pixel_center(4, 4).unwrap(), Complex::new(0.75, 0.75));
        assert_eq!(g.pixel_center(3, 2).unwrap(), Complex::new(0.25, -0.25));
        assert!(matches!(
            g.pixel_center(0, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(g.pixel_center(5, 1).is_err());
    }

    #[test]
    fn pixel_index_examples() {
        let g = grid(1);
        assert_eq!(g.pixel_index(&Complex::new(-0.75, -0.75)).unwrap(), (1, 1));
        assert_eq!(g.pixel_index(&Complex::new(0.0, 0.0)).unwrap(), (3, 3));
        assert_eq!(g.pixel_index(&Complex::new(0.999, 0.999)).unwrap(), (4, 4));
        assert_eq!(g.pixel_index(&Complex::new(1.0, -1.0)).unwrap(), (4, 1));
        assert!(matches!(
            g.pixel_index(&Complex::new(1.5, 0.0)),
            Err(Error::OutOfRange(_))
        ));
        assert!(g.pixel_index(&Complex::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn index_inverts_center() {
        for k in [1, 3, 6] {
            let g = grid(k);
            let half = 0.5 / g.q() as f64;
            for i in 1..=g.size() {
                for j in (1..=g.size()).step_by(3) {
                    let c = g.pixel_center(i, j).unwrap();
                    assert_eq!(g.pixel_index(&c).unwrap(), (i, j));
                    let corner = c + Complex::new(half * 0.999, -half * 0.999);
                    assert_eq!(g.pixel_index(&corner).unwrap(), (i, j));
                }
            }
        }
    }

    #[test]
    fn bits_and_iteration() {
        let mut g = grid(6);
        g.set(1, 1);
        g.set(64, 2);
        g.set(65, 2);
        g.set(64, 64);
        assert_eq!(g.count_ones(), 4);
        assert_eq!(g.ones().collect::<Vec<_>>(), vec![(1, 1), (64, 2), (65, 2), (64, 64)]);
        g.clear(64, 2);
        assert!(!g.get(64, 2));
        assert!(!g.get_or_false(0, 1));
        assert!(!g.get_or_false(1, 129));
    }

    #[test]
    fn symmetry_fill_examples() {
        let g = from_cells(2, region(1, 1), &[(1, 2)]);
        let s = fill_symmetry(&g);
        let n = g.size();
        assert_eq!(s.ones().count(), 2);
        assert!(s.get(1, 2) && s.get(n - 1, n));
        assert_eq!(fill_symmetry(&s), s);
        assert!(fill_symmetry(&grid(3)).is_empty());

        let g = from_cells(2, region(3, 1), &[(2, 1)]);
        assert!(fill_symmetry(&g).get(2, 8));
    }

    #[test]
    fn mirror_axes_follow_rotation() {
        let g = from_cells(3, region(2, 1), &[(2, 5), (7, 1), (3, 3)]);
        let sym = fill_symmetry(&g);
        for turns in 1..4 {
            assert_eq!(fill_symmetry(&sym.rotated(turns)), sym.rotated(turns));
        }
        let g = from_cells(3, region(3, 1), &[(2, 5), (7, 1)]);
        let sym = fill_symmetry(&g);
        for turns in 1..4 {
            assert_eq!(fill_symmetry(&sym.rotated(turns)), sym.rotated(turns));
        }
    }

    #[test]
    fn neighbor_fill_examples() {
        let plus = from_cells(3, region(1, 1), &[(4, 5), (4, 3), (3, 4), (5, 4)]);
        let filled = fill_neighbors(&plus);
        assert!(filled.get(4, 4));
        assert_eq!(filled.count_ones(), 5);

        let lone = from_cells(3, region(1, 1), &[(4, 4)]);
        assert_eq!(fill_neighbors(&lone), lone);

        let full = negate(&grid(3));
        assert_eq!(fill_neighbors(&full), full);

        // across a word boundary
        let plus = from_cells(6, region(1, 1), &[(64, 10), (66, 10), (65, 9), (65, 11)]);
        assert!(fill_neighbors(&plus).get(65, 10));
        let plus = from_cells(6, region(1, 1), &[(64, 10), (62, 10), (63, 9), (63, 11)]);
        assert!(fill_neighbors(&plus).get(63, 10));
    }

    fn ring(k: u32, lo: usize, hi: usize) -> PixelGrid {
        let mut g = grid(k);
        for t in lo..=hi {
            g.set(t, lo);
            g.set(t, hi);
            g.set(lo, t);
            g.set(hi, t);
        }
        g
    }

    #[test]
    fn flood_fill_examples() {
        let g = ring(3, 3, 12);
        let f = flood_fill(&g);
        assert_eq!(f.count_ones(), 100);
        assert!(f.get(7, 7));
        assert!(flood_fill(&grid(3)).is_empty());
        assert_eq!(flood_fill(&f), f);

        // a gap in the ring lets the fill leak in
        let mut leaky = ring(3, 3, 12);
        leaky.clear(3, 7);
        assert_eq!(flood_fill(&leaky), leaky);
    }

    #[test]
    fn symmetric_flood_matches_full_flood() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for r in RegionId::all() {
            for density in [0.2, 0.45, 0.6] {
                let mut g = PixelGrid::new(3, r).unwrap();
                for j in 1..=g.size() {
                    for i in 1..=g.size() {
                        if rng.random_bool(density) {
                            g.set(i, j);
                        }
                    }
                }
                assert_eq!(flood_fill_symmetric(&g), flood_fill(&fill_symmetry(&g)), "{r}");
            }
        }
    }

    #[test]
    fn rotation_of_pixels() {
        let g = from_cells(1, region(1, 1), &[(1, 2)]);
        let r = g.rotated(1);
        assert_eq!(r.region(), region(1, 2));
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![(2, 4)]);
        // matches the point map w -> -i w
        let w = g.pixel_center(1, 2).unwrap();
        let rw = rotate_point(&w, 1);
        assert_eq!(r.pixel_index(&rw).unwrap(), (2, 4));
        assert_eq!(g.rotated(4), g);
    }

    #[test]
    fn strategy_names() {
        for s in FillStrategy::ALL {
            assert_eq!(s.to_string().parse::<FillStrategy>().unwrap(), s);
        }
        assert!("bogus".parse::<FillStrategy>().is_err());
    }

    #[test]
    fn populate_requires_k11_for_boundary() {
        let mut g = PixelGrid::new(5, region(2, 1)).unwrap();
        let seed = crate::dynamics::default_seed();
        assert!(matches!(
            populate_boundary(&mut g, &seed, 10),
            Err(Error::RegionMismatch { .. })
        ));
    }

    #[test]
    fn zero_iterations() {
        let seed = crate::dynamics::default_seed();
        let mut g = grid(5);
        assert_eq!(populate_orbit(&mut g, &seed, 0).unwrap().occupied, 0);
        assert_eq!(populate_boundary(&mut g, &seed, 0).unwrap().occupied, 0);
    }

    mod props {
        use proptest::prelude::*;

        use super::*;

        fn any_grid() -> impl Strategy<Value = PixelGrid> {
            (1u8..=3, 1u8..=4, proptest::collection::vec(any::<bool>(), 256)).prop_map(
                |(k, l, cells)| {
                    let mut g = PixelGrid::new(3, RegionId::new(k, l).unwrap()).unwrap();
                    for (idx, on) in cells.into_iter().enumerate() {
                        if on {
                            g.set(idx % 16 + 1, idx / 16 + 1);
                        }
                    }
                    g
                },
            )
        }

        fn contains(big: &PixelGrid, small: &PixelGrid) -> bool {
            small.ones().all(|(i, j)| big.get(i, j))
        }

        proptest! {
            #[test]
            fn fills_are_monotone(g in any_grid()) {
                prop_assert!(contains(&flood_fill(&g), &g));
                prop_assert!(contains(&fill_neighbors(&g), &g));
                prop_assert!(contains(&flood_fill_symmetric(&g), &g));
            }

            #[test]
            fn flood_is_idempotent(g in any_grid()) {
                let f = flood_fill(&g);
                prop_assert_eq!(flood_fill(&f), f);
            }

            #[test]
            fn symmetry_is_a_closure(g in any_grid()) {
                let s = fill_symmetry(&g);
                prop_assert_eq!(fill_symmetry(&s), s);
            }

            #[test]
            fn save_load_round_trip(g in any_grid()) {
                let dir = tempfile::tempdir().unwrap();
                let path = dir.path().join("g.hcfgrid");
                g.save(&path).unwrap();
                prop_assert_eq!(PixelGrid::load(&path).unwrap(), g);
            }
        }
    }
}
