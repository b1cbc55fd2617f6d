//! Quadrature of the Taylor coefficients `h_{m,n}` over rasterized dual
//! regions, the `a + b c^k` extrapolation, orbit statistics and pointwise
//! density evaluation.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::{GaussOrbit, NatExtState};
use crate::error::{Error, Result};
use crate::gaussian::{in_fundamental_domain, recip};
use crate::pixelgrid::{
    populate_boundary, populate_orbit, populate_orbit_rotated, FillStrategy, PixelGrid,
};
use crate::regions::{classify, classify_interior, distance_to_boundary, Classification, RegionId};
use crate::taylor::kernel_matrix;

/// Count of set pixels in the 3x3 block around `(i, j)`, divided by 9.
pub fn smoothing_weight(g: &PixelGrid, i: usize, j: usize) -> f64 {
    let (i, j) = (i as isize, j as isize);
    let mut count = 0;
    for dj in -1..=1 {
        for di in -1..=1 {
            if g.get_or_false(i + di, j + dj) {
                count += 1;
            }
        }
    }
    count as f64 / 9.0
}

/// Pixel weighting in the quadrature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Smoothing {
    /// `F(i, j)`: the 3x3 neighbourhood average.
    #[default]
    Neighborhood,
    /// `F = 1` on every set pixel.
    None,
}

impl Smoothing {
    #[inline]
    pub fn weight(self, g: &PixelGrid, i: usize, j: usize) -> f64 {
        match self {
            Smoothing::Neighborhood => smoothing_weight(g, i, j),
            Smoothing::None => 1.0,
        }
    }
}

impl std::fmt::Display for Smoothing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Smoothing::Neighborhood => "neighborhood",
            Smoothing::None => "none",
        })
    }
}

impl std::str::FromStr for Smoothing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "neighborhood" | "f" => Ok(Smoothing::Neighborhood),
            "none" => Ok(Smoothing::None),
            other => Err(Error::Config(format!("unknown smoothing {other:?}"))),
        }
    }
}

/// `(L+1) x (L+1)` matrix indexed by `(m, n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffMatrix {
    l: usize,
    values: Vec<f64>,
}

impl CoeffMatrix {
    pub fn zeros(l: usize) -> Self {
        Self {
            l,
            values: vec![0.0; (l + 1) * (l + 1)],
        }
    }

    pub fn degree(&self) -> usize {
        self.l
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[m * (self.l + 1) + n]
    }

    pub fn set(&mut self, m: usize, n: usize, v: f64) {
        self.values[m * (self.l + 1) + n] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn add_assign(&mut self, other: &Self) {
        self.values
            .iter_mut()
            .zip(&other.values)
            .for_each(|(a, b)| *a += b);
    }

    fn add_scaled(&mut self, coeffs: &[f64], scale: f64) {
        self.values
            .iter_mut()
            .zip(coeffs)
            .for_each(|(a, b)| *a += scale * b);
    }
}

/// Result of [`estimate_coeffs`].
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    /// Taylor coefficients `h_{m,n}`.
    pub coeffs: CoeffMatrix,
    pub pixels: u64,
    /// Pixels dropped because the kernel is singular there.
    pub skipped: u64,
}

#[derive(Clone)]
struct Partial {
    sum: CoeffMatrix,
    pixels: u64,
    skipped: u64,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.sum.add_assign(&other.sum);
        self.pixels += other.pixels;
        self.skipped += other.skipped;
        self
    }
}

/// Sums `leaf(j)` over rows `lo..hi` as a balanced binary tree. The tree
/// shape depends only on the range, so the result is bit-identical for any
/// number of worker threads.
fn tree_sum<T, F, M>(lo: usize, hi: usize, leaf: &F, merge: &M) -> T
where
    T: Send,
    F: Fn(usize) -> T + Sync,
    M: Fn(T, T) -> T + Sync,
{
    if hi - lo == 1 {
        return leaf(lo);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(
        || tree_sum(lo, mid, leaf, merge),
        || tree_sum(mid, hi, leaf, merge),
    );
    merge(a, b)
}

/// `h_{m,n}(x0, y0) ≈ Σ F(i,j)/Q^2 · H_{m,n}(a_i, b_j)` over set pixels,
/// with `H_{m,n}` in Taylor-coefficient normalization.
pub fn estimate_coeffs(
    g: &PixelGrid,
    x0: f64,
    y0: f64,
    l: usize,
    smoothing: Smoothing,
) -> Result<Estimate> {
    let q2 = (g.q() * g.q()) as f64;
    let leaf = |row: usize| {
        let j = row + 1;
        let mut part = Partial {
            sum: CoeffMatrix::zeros(l),
            pixels: 0,
            skipped: 0,
        };
        let b = g.center_coord(j);
        for i in g.row_ones(j) {
            let a = g.center_coord(i);
            match kernel_matrix(a, b, x0, y0, l) {
                Ok(h) => {
                    part.sum
                        .add_scaled(h.coefficients(), smoothing.weight(g, i, j) / q2);
                    part.pixels += 1;
                }
                Err(_) => part.skipped += 1,
            }
        }
        part
    };
    let total = tree_sum(0, g.size(), &leaf, &|a: Partial, b| a.merge(b));
    Ok(Estimate {
        coeffs: total.sum,
        pixels: total.pixels,
        skipped: total.skipped,
    })
}

/// Estimates `h_{m,n}` per resolution `k` at one base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub base: (f64, f64),
    pub region: RegionId,
    pub l: usize,
    rows: BTreeMap<u32, CoeffMatrix>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    k: u32,
    m: usize,
    n: usize,
    value: f64,
}

impl CoeffTable {
    pub fn new(region: RegionId, base: (f64, f64), l: usize) -> Self {
        Self {
            base,
            region,
            l,
            rows: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, k: u32, coeffs: CoeffMatrix) {
        assert_eq!(coeffs.degree(), self.l, "matrix degree");
        self.rows.insert(k, coeffs);
    }

    pub fn get(&self, k: u32, m: usize, n: usize) -> Option<f64> {
        self.rows.get(&k).map(|c| c.get(m, n))
    }

    pub fn resolutions(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows.keys().copied()
    }

    pub fn matrix(&self, k: u32) -> Option<&CoeffMatrix> {
        self.rows.get(&k)
    }

    /// `(k, h_{m,n})` for every stored `k`.
    pub fn series(&self, m: usize, n: usize) -> Vec<(u32, f64)> {
        self.rows.iter().map(|(&k, c)| (k, c.get(m, n))).collect()
    }

    /// CSV with header `k,m,n,value`, rows ordered by `k`, `m`, `n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (&k, c) in &self.rows {
            for m in 0..=self.l {
                for n in 0..=self.l {
                    w.serialize(CsvRow {
                        k,
                        m,
                        n,
                        value: c.get(m, n),
                    })?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a CSV written by [`CoeffTable::write_csv`]; every `k` must
    /// carry a complete matrix.
    pub fn read_csv<R: Read>(input: R, region: RegionId, base: (f64, f64)) -> Result<Self> {
        let mut entries: BTreeMap<u32, BTreeMap<(usize, usize), f64>> = BTreeMap::new();
        let mut l = 0;
        for row in csv::Reader::from_reader(input).deserialize() {
            let row: CsvRow = row?;
            l = l.max(row.m).max(row.n);
            entries.entry(row.k).or_default().insert((row.m, row.n), row.value);
        }
        let mut table = CoeffTable::new(region, base, l);
        for (k, cells) in entries {
            if cells.len() != (l + 1) * (l + 1) {
                return Err(Error::Parse(format!("incomplete matrix for k = {k}")));
            }
            let mut c = CoeffMatrix::zeros(l);
            for ((m, n), v) in cells {
                c.set(m, n, v);
            }
            table.insert(k, c);
        }
        Ok(table)
    }
}

/// `a + b c^k` fitted to one coefficient series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub m: usize,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// `None` for a degenerate (constant) series.
    pub c: Option<f64>,
    pub rms: f64,
    pub degenerate: bool,
}

impl FitResult {
    pub fn for_coefficient(self, m: usize, n: usize) -> Self {
        Self { m, n, ..self }
    }

    pub fn predict(&self, k: f64) -> f64 {
        match self.c {
            Some(c) => self.a + self.b * c.powf(k),
            None => self.a,
        }
    }
}

fn sum_sq(ks: &[f64], ys: &[f64], a: f64, b: f64, c: f64) -> f64 {
    ks.iter()
        .zip(ys)
        .map(|(k, y)| (a + b * c.powf(*k) - y).powi(2))
        .sum()
}

/// Best `(a, b)` for fixed `c`.
fn linear_ab(ks: &[f64], ys: &[f64], c: f64) -> Option<(f64, f64)> {
    let mut ata = Matrix2::zeros();
    let mut aty = Vector2::zeros();
    for (k, y) in ks.iter().zip(ys) {
        let row = Vector2::new(1.0, c.powf(*k));
        ata += row * row.transpose();
        aty += row * *y;
    }
    let sol = ata.lu().solve(&aty)?;
    Some((sol[0], sol[1]))
}

/// Least-squares fit of `a + b c^k`: a scan over `c` in `[0.05, 0.95]`
/// with the linear part solved exactly, then Gauss-Newton with step
/// halving that keeps `0 < c < 1`.
pub fn fit_exponential(series: &[(u32, f64)]) -> Result<FitResult> {
    let mut distinct: Vec<u32> = series.iter().map(|s| s.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: distinct.len(),
        });
    }
    let ks: Vec<f64> = series.iter().map(|s| s.0 as f64).collect();
    let ys: Vec<f64> = series.iter().map(|s| s.1).collect();
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    let count = ys.len() as f64;
    let degenerate = |mean: f64| FitResult {
        m: 0,
        n: 0,
        a: mean,
        b: 0.0,
        c: None,
        rms: (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / count).sqrt(),
        degenerate: true,
    };
    let mean = ys.iter().sum::<f64>() / count;
    if hi - lo <= 1e-12 {
        return Ok(degenerate(mean));
    }

    let mut best: Option<(f64, f64, f64, f64)> = None;
    for step in 0..=180 {
        let c = 0.05 + 0.005 * step as f64;
        if let Some((a, b)) = linear_ab(&ks, &ys, c) {
            let ss = sum_sq(&ks, &ys, a, b, c);
            if best.is_none_or(|bst| ss < bst.3) {
                best = Some((a, b, c, ss));
            }
        }
    }
    let Some((mut a, mut b, mut c, mut ss)) = best else {
        return Ok(degenerate(mean));
    };

    for _ in 0..200 {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (k, y) in ks.iter().zip(&ys) {
            let ck = c.powf(*k);
            let r = a + b * ck - y;
            let jac = Vector3::new(1.0, ck, b * k * c.powf(k - 1.0));
            jtj += jac * jac.transpose();
            jtr += jac * r;
        }
        let Some(delta) = jtj.lu().solve(&(-jtr)) else {
            break;
        };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let (na, nb, nc) = (a + t * delta[0], b + t * delta[1], c + t * delta[2]);
            if nc > 0.0 && nc < 1.0 {
                let nss = sum_sq(&ks, &ys, na, nb, nc);
                if nss.is_finite() && nss <= ss {
                    let gain = ss - nss;
                    (a, b, c) = (na, nb, nc);
                    improved = gain > 1e-30 && gain > ss * 1e-14;
                    ss = nss;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Ok(degenerate(mean));
    }
    Ok(FitResult {
        m: 0,
        n: 0,
        a,
        b,
        c: Some(c),
        rms: (ss / count).sqrt(),
        degenerate: false,
    })
}

/// Visit counts of the Gauss-map orbit per region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionCounts {
    pub counts: [u64; 12],
    pub boundary: u64,
    pub total: u64,
}

impl RegionCounts {
    pub fn frequency(&self, r: RegionId) -> f64 {
        self.counts[r.index()] as f64 / self.total as f64
    }
}

pub fn region_counts(seed: &NatExtState<f64>, iterations: u64) -> Result<RegionCounts> {
    let mut orbit = GaussOrbit::new(seed.z);
    let mut counts = [0u64; 12];
    let mut boundary = 0;
    for _ in 0..iterations {
        let z = orbit.advance()?;
        match classify_interior(&z) {
            Some(r) => counts[r.index()] += 1,
            None => boundary += 1,
        }
    }
    Ok(RegionCounts {
        counts,
        boundary,
        total: iterations,
    })
}

/// Fraction of orbit steps with `z` in `r`.
pub fn region_frequency(r: RegionId, seed: &NatExtState<f64>, iterations: u64) -> Result<f64> {
    Ok(region_counts(seed, iterations)?.frequency(r))
}

/// Orbit estimate of the density (or of a directional derivative) at
/// `x0 + y0 i`: visits to balls of radius `eps/2` centred at
/// `x0 + y0 i + n eps d` are normalized by `iterations · π (eps/2)^2` and
/// combined with the forward-difference stencil of the given order.
pub fn finite_difference_density(
    x0: f64,
    y0: f64,
    direction: Complex<f64>,
    order: usize,
    eps: f64,
    seed: &NatExtState<f64>,
    iterations: u64,
) -> Result<f64> {
    if order > 2 {
        return Err(Error::Config(format!("stencil order {order} not in 0..=2")));
    }
    if !(eps > 0.0) || direction.norm() == 0.0 {
        return Err(Error::Config("need eps > 0 and a nonzero direction".into()));
    }
    let dir = direction / direction.norm();
    let radius = eps / 2.0;
    let centers: Vec<Complex<f64>> = (0..=order)
        .map(|n| Complex::new(x0, y0) + dir * (n as f64 * eps))
        .collect();
    let mut home = None;
    for (idx, c) in centers.iter().enumerate() {
        let crosses = !in_fundamental_domain(c) || distance_to_boundary(c) <= radius;
        let region = if crosses { None } else { classify_interior(c) };
        match (region, home) {
            (None, _) => return Err(Error::StencilCrossesBoundary { index: idx + 1 }),
            (Some(r), None) => home = Some(r),
            (Some(r), Some(h)) if r != h => {
                return Err(Error::StencilCrossesBoundary { index: idx + 1 })
            }
            _ => {}
        }
    }
    let r2 = radius * radius;
    let mut counts = vec![0u64; centers.len()];
    let mut orbit = GaussOrbit::new(seed.z);
    for _ in 0..iterations {
        let z = orbit.advance()?;
        for (count, c) in counts.iter_mut().zip(&centers) {
            if (z - c).norm_sqr() < r2 {
                *count += 1;
            }
        }
    }
    let area = std::f64::consts::PI * r2;
    let d: Vec<f64> = counts
        .iter()
        .map(|&u| u as f64 / (iterations as f64 * area))
        .collect();
    Ok(match order {
        0 => d[0],
        1 => (d[1] - d[0]) / eps,
        _ => (d[2] - 2.0 * d[1] + d[0]) / (eps * eps),
    })
}

/// Relative defect of the transfer-operator fixed point equation
/// `h(z) = Σ |α+z|^{-4} h(1/(α+z))`, summed over `|α| <= radius` with
/// `1/(α+z)` in `K`. Terms whose preimage lands exactly on a region
/// boundary are dropped.
pub fn functional_eq_residual<F>(z: Complex<f64>, density: F, radius: f64) -> Result<f64>
where
    F: Fn(&Complex<f64>) -> Result<f64>,
{
    let hz = density(&z)?;
    let r = radius.floor() as i64;
    let mut total = 0.0;
    for re in -r..=r {
        for im in -r..=r {
            if ((re * re + im * im) as f64) > radius * radius {
                continue;
            }
            let shifted = Complex::new(re as f64, im as f64) + z;
            if shifted.norm_sqr() == 0.0 {
                continue;
            }
            let u = recip(&shifted);
            if !in_fundamental_domain(&u) {
                continue;
            }
            match density(&u) {
                Ok(h) => total += h / shifted.norm_sqr().powi(2),
                Err(Error::BoundaryPoint(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok((hz - total).abs() / hz)
}

/// Weighted sample points `(w, F/Q^2)` of one dual region.
#[derive(Clone, Debug)]
struct WeightedPoints {
    w: Vec<Complex<f64>>,
    weight: Vec<f64>,
}

/// Filled grids for all twelve regions, prepared for `h(z)` evaluation.
#[derive(Clone, Debug)]
pub struct DensityGrids {
    k: u32,
    points: Vec<Option<WeightedPoints>>,
}

impl DensityGrids {
    /// Uses every set pixel at its centre.
    pub fn new(grids: &[PixelGrid], smoothing: Smoothing) -> Result<Self> {
        Self::build(grids, smoothing, None)
    }

    /// Merges pixels into cells of side `1/2^cell_k` carrying total weight
    /// at the weighted centroid. The kernel is smooth on the unit square for
    /// `z` in `K`, so this only adds an `O(4^-cell_k)` error and makes
    /// repeated evaluation much cheaper.
    pub fn coarsened(grids: &[PixelGrid], smoothing: Smoothing, cell_k: u32) -> Result<Self> {
        Self::build(grids, smoothing, Some(cell_k))
    }

    fn build(grids: &[PixelGrid], smoothing: Smoothing, cell_k: Option<u32>) -> Result<Self> {
        let mut points: Vec<Option<WeightedPoints>> = vec![None; 12];
        let mut k = None;
        for g in grids {
            if *k.get_or_insert(g.k()) != g.k() {
                return Err(Error::ResolutionMismatch {
                    left: k.unwrap(),
                    right: g.k(),
                });
            }
            let q2 = (g.q() * g.q()) as f64;
            let shift = cell_k.map_or(0, |c| g.k().saturating_sub(c));
            let mut cells: BTreeMap<(usize, usize), (Complex<f64>, f64)> = BTreeMap::new();
            for (i, j) in g.ones() {
                let wt = smoothing.weight(g, i, j) / q2;
                let w = Complex::new(g.center_coord(i), g.center_coord(j));
                let cell = cells
                    .entry(((i - 1) >> shift, (j - 1) >> shift))
                    .or_insert((Complex::new(0.0, 0.0), 0.0));
                cell.0 += w * wt;
                cell.1 += wt;
            }
            let (w, weight) = cells
                .into_values()
                .map(|(sum, wt)| (sum / wt, wt))
                .unzip();
            points[g.region().index()] = Some(WeightedPoints { w, weight });
        }
        Ok(Self {
            k: k.unwrap_or(0),
            points,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn has_region(&self, r: RegionId) -> bool {
        self.points[r.index()].is_some()
    }

    /// `h(z) = Σ F/Q^2 |z w + 1|^{-4}` over the grid of the region of `z`.
    pub fn density_at(&self, z: &Complex<f64>) -> Result<f64> {
        let region = match classify(z)? {
            Classification::Region(r) => r,
            Classification::Boundary => return Err(Error::BoundaryPoint(format!("{z}"))),
        };
        let pts = self.points[region.index()]
            .as_ref()
            .ok_or(Error::MissingGrid(region))?;
        let one = Complex::new(1.0, 0.0);
        Ok(pts
            .w
            .iter()
            .zip(&pts.weight)
            .map(|(w, wt)| wt / (z * w + one).norm_sqr().powi(2))
            .sum())
    }
}

/// How a dual-region raster is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuildMethod {
    /// Mark `w` whenever `z` visits the region.
    Orbit,
    /// As `Orbit`, also folding in the three rotated copies of the region.
    OrbitRotated,
    /// Mark the translates `1/(w + α)` tracing the boundary (`V_{1,1}` only).
    Boundary,
}

impl BuildMethod {
    /// `100 Q^2` for orbit sampling, `3 Q^2` for the boundary variant.
    pub fn default_iterations(self, k: u32) -> u64 {
        let q2 = 1u64 << (2 * k);
        match self {
            BuildMethod::Orbit | BuildMethod::OrbitRotated => 100 * q2,
            BuildMethod::Boundary => 3 * q2,
        }
    }
}

impl std::fmt::Display for BuildMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BuildMethod::Orbit => "orbit",
            BuildMethod::OrbitRotated => "orbit-rotated",
            BuildMethod::Boundary => "boundary",
        })
    }
}

impl std::str::FromStr for BuildMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "orbit" => Ok(BuildMethod::Orbit),
            "orbit-rotated" => Ok(BuildMethod::OrbitRotated),
            "boundary" => Ok(BuildMethod::Boundary),
            other => Err(Error::Config(format!("unknown build method {other:?}"))),
        }
    }
}

/// Rasterizes and fills one region.
pub fn build_grid(
    region: RegionId,
    k: u32,
    method: BuildMethod,
    fill: FillStrategy,
    seed: &NatExtState<f64>,
    iterations: Option<u64>,
) -> Result<PixelGrid> {
    let mut g = PixelGrid::new(k, region)?;
    let iterations = iterations.unwrap_or_else(|| method.default_iterations(k));
    match method {
        BuildMethod::Orbit => populate_orbit(&mut g, seed, iterations)?,
        BuildMethod::OrbitRotated => populate_orbit_rotated(&mut g, seed, iterations)?,
        BuildMethod::Boundary => populate_boundary(&mut g, seed, iterations)?,
    };
    Ok(fill.apply(&g))
}

/// Grids for all twelve regions: `V_{1,1}` from the boundary variant,
/// `V_{2,1}` and `V_{3,1}` from rotated orbit sampling, the rest by exact
/// quarter turns.
pub fn build_all_regions(
    k: u32,
    fill: FillStrategy,
    seed: &NatExtState<f64>,
    orbit_iterations: Option<u64>,
) -> Result<Vec<PixelGrid>> {
    let bases = [
        build_grid(RegionId::new(1, 1)?, k, BuildMethod::Boundary, fill, seed, None)?,
        build_grid(
            RegionId::new(2, 1)?,
            k,
            BuildMethod::OrbitRotated,
            fill,
            seed,
            orbit_iterations,
        )?,
        build_grid(
            RegionId::new(3, 1)?,
            k,
            BuildMethod::OrbitRotated,
            fill,
            seed,
            orbit_iterations,
        )?,
    ];
    let mut out = Vec::with_capacity(12);
    for base in &bases {
        for turns in 0..4 {
            out.push(base.rotated(turns));
        }
    }
    Ok(out)
}
