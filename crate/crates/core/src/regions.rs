//! The twelve analyticity regions `K_{k,l}` of the fundamental domain, the
//! 13-state automaton over the marked digit alphabet, and the table of
//! translates used by the boundary rasterization of `V_{1,1}`.
//!
//! Notation: `D_c` is the open unit disk around `c` for `c` in `{±1, ±i}`,
//! `C_c` the open unit disk around a corner `c` in `{±1±i}`.
//! `K_{1,1} = K ∩ C_{-1-i}`, `K_{2,1} = K ∩ D_{-1} ∩ D_{-i} \ C_{-1-i}`,
//! `K_{3,1} = K ∩ D_{-1} \ (D_i ∪ D_{-i})` and `K_{k,l} = i^{l-1} K_{k,1}`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{format_gaussian, in_fundamental_domain, is_digit, GaussianInt};
use crate::parse::parse_gaussian;
use crate::scalar::FloatScalar;

/// Tolerance on circle membership below which a point counts as boundary.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Multiplies by `i^j` exactly (a coordinate swap plus sign changes).
pub fn rotate_by_i<T: Clone + std::ops::Neg<Output = T>>(z: &Complex<T>, j: i32) -> Complex<T> {
    let (re, im) = (z.re.clone(), z.im.clone());
    match j.rem_euclid(4) {
        0 => Complex::new(re, im),
        1 => Complex::new(-im, re),
        2 => Complex::new(-re, -im),
        _ => Complex::new(im, -re),
    }
}

/// Companion point map of [`rotate_region`]: `w -> (-i)^j w`.
pub fn rotate_point<T: Clone + std::ops::Neg<Output = T>>(w: &Complex<T>, j: i32) -> Complex<T> {
    rotate_by_i(w, -j)
}

/// `i^r`.
fn unit(r: i32) -> GaussianInt {
    rotate_by_i(&Complex::new(1, 0), r)
}

/// Index pair `(k, l)` of one of the twelve regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RegionId {
    k: u8,
    l: u8,
}

impl RegionId {
    pub fn new(k: u8, l: u8) -> Result<Self> {
        if (1..=3).contains(&k) && (1..=4).contains(&l) {
            Ok(Self { k, l })
        } else {
            Err(Error::Parse(format!("region index ({k},{l}) out of range")))
        }
    }

    pub const fn k(self) -> u8 {
        self.k
    }

    pub const fn l(self) -> u8 {
        self.l
    }

    /// All twelve regions, `k` major.
    pub fn all() -> impl Iterator<Item = RegionId> {
        (1..=3).flat_map(|k| (1..=4).map(move |l| RegionId { k, l }))
    }

    /// Position in [`RegionId::all`].
    pub fn index(self) -> usize {
        (self.k as usize - 1) * 4 + self.l as usize - 1
    }

    /// Number of quarter turns from `K_{k,1}`.
    pub fn rotation(self) -> i32 {
        self.l as i32 - 1
    }

    pub fn base(self) -> RegionId {
        RegionId { k: self.k, l: 1 }
    }

    pub fn rotate(self, j: i32) -> RegionId {
        rotate_region(self, j)
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{},{}", self.k, self.l)
    }
}

impl FromStr for RegionId {
    type Err = Error;

    /// Accepts `1,1`, `K1,1` and `K11`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix(['K', 'k']).unwrap_or(t);
        let (k, l) = match t.split_once(',') {
            Some((k, l)) => (k.trim(), l.trim()),
            None if t.len() == 2 => t.split_at(1),
            None => return Err(Error::Parse(format!("invalid region {s:?}"))),
        };
        let k = k.parse().map_err(|_| Error::Parse(format!("invalid region {s:?}")))?;
        let l = l.parse().map_err(|_| Error::Parse(format!("invalid region {s:?}")))?;
        RegionId::new(k, l)
    }
}

/// `(k, l) -> (k, ((l - 1 + j) mod 4) + 1)`.
pub fn rotate_region(r: RegionId, j: i32) -> RegionId {
    RegionId {
        k: r.k,
        l: ((r.l as i32 - 1 + j).rem_euclid(4) + 1) as u8,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    Region(RegionId),
    Boundary,
}

impl Classification {
    pub fn region(self) -> Option<RegionId> {
        match self {
            Classification::Region(r) => Some(r),
            Classification::Boundary => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Region(r) => r.fmt(f),
            Classification::Boundary => f.write_str("boundary"),
        }
    }
}

/// Centers `-alpha` of the eight circles `|z + alpha| = 1` that cut `K`.
const CIRCLE_SHIFTS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
    (1.0, 1.0),
    (1.0, -1.0),
    (-1.0, 1.0),
    (-1.0, -1.0),
];

fn dist<T: FloatScalar>(z: &Complex<T>, shift: (f64, f64)) -> T {
    dist_sqr(z, shift).sqrt()
}

#[inline]
fn dist_sqr<T: FloatScalar>(z: &Complex<T>, shift: (f64, f64)) -> T {
    (*z + Complex::new(T::lit(shift.0), T::lit(shift.1))).norm_sqr()
}

/// Classifies with [`BOUNDARY_EPS`].
pub fn classify<T: FloatScalar>(z: &Complex<T>) -> Result<Classification> {
    classify_with_tolerance(z, T::lit(BOUNDARY_EPS))
}

pub fn classify_with_tolerance<T: FloatScalar>(z: &Complex<T>, eps: T) -> Result<Classification> {
    if !in_fundamental_domain(z) {
        return Err(Error::Domain(format!("{}{:+}i", z.re.approx_f64(), z.im.approx_f64())));
    }
    if CIRCLE_SHIFTS
        .iter()
        .any(|&s| (dist(z, s) - T::one()).abs() <= eps)
    {
        return Ok(Classification::Boundary);
    }
    Ok(classify_interior(z).map_or(Classification::Boundary, Classification::Region))
}

/// Region lookup without the boundary test; `None` only on circle arcs and
/// at 0 where no strict inequality set holds.
#[inline]
pub fn classify_interior<T: FloatScalar>(z: &Complex<T>) -> Option<RegionId> {
    let one = T::one();
    for l in 0..4i32 {
        let w = rotate_by_i(z, -l);
        let in_minus_one = dist_sqr(&w, (1.0, 0.0)) < one;
        if !in_minus_one {
            continue;
        }
        let l = (l + 1) as u8;
        if dist_sqr(&w, (1.0, 1.0)) < one {
            return Some(RegionId { k: 1, l });
        }
        let in_minus_i = dist_sqr(&w, (0.0, 1.0)) < one;
        let in_plus_i = dist_sqr(&w, (0.0, -1.0)) < one;
        if in_minus_i {
            return Some(RegionId { k: 2, l });
        }
        if !in_plus_i {
            return Some(RegionId { k: 3, l });
        }
    }
    None
}

/// Distance from `z` to the nearest region boundary: a circle arc or an
/// edge of `K`.
pub fn distance_to_boundary(z: &Complex<f64>) -> f64 {
    let arcs = CIRCLE_SHIFTS
        .iter()
        .map(|&s| (dist(z, s) - 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    let edges = [z.re + 0.5, 0.5 - z.re, z.im + 0.5, 0.5 - z.im]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    arcs.min(edges)
}

/// Translates `alpha` such that `1/(w + alpha)` traces the boundary of
/// `V_{1,1}` whenever `z` lies in the given region.
pub fn alpha_translates(r: RegionId) -> &'static [GaussianInt] {
    const fn g(re: i64, im: i64) -> GaussianInt {
        Complex { re, im }
    }
    const K11: [GaussianInt; 1] = [g(-1, 2)];
    const K21: [GaussianInt; 3] = [g(-2, 1), g(-2, 2), g(-1, 3)];
    const K31: [GaussianInt; 1] = [g(-2, 0)];
    const K12: [GaussianInt; 1] = [g(2, 2)];
    const K22: [GaussianInt; 4] = [g(1, 2), g(2, 2), g(3, 2), g(3, 1)];
    const K32: [GaussianInt; 1] = [g(0, 3)];
    const K13: [GaussianInt; 1] = [g(2, -1)];
    const K23: [GaussianInt; 3] = [g(1, -2), g(2, -2), g(3, -1)];
    const K33: [GaussianInt; 1] = [g(3, 0)];
    const K14: [GaussianInt; 1] = [g(-1, -1)];
    const K24: [GaussianInt; 2] = [g(-1, -2), g(-2, -1)];
    const K34: [GaussianInt; 1] = [g(0, -2)];
    match (r.k, r.l) {
        (1, 1) => &K11,
        (2, 1) => &K21,
        (3, 1) => &K31,
        (1, 2) => &K12,
        (2, 2) => &K22,
        (3, 2) => &K32,
        (1, 3) => &K13,
        (2, 3) => &K23,
        (3, 3) => &K33,
        (1, 4) => &K14,
        (2, 4) => &K24,
        (3, 4) => &K34,
        _ => unreachable!("RegionId invariant"),
    }
}

/// Whether some `u` in `K_{1,1}` has `1/(alpha + u)` in `K_r`, i.e. whether
/// `V_r + alpha` really is a piece of the inverted `V_{1,1}`. Decided on a
/// 64x64 sample of `K_{1,1}`.
pub fn translate_reaches_k11(r: RegionId, alpha: GaussianInt) -> bool {
    let k11 = RegionId { k: 1, l: 1 };
    let a = Complex::new(alpha.re as f64, alpha.im as f64);
    (0..64)
        .flat_map(|i| (0..64).map(move |j| (i, j)))
        .map(|(i, j)| Complex::new(-0.5 + (i as f64 + 0.5) / 128.0, -0.5 + (j as f64 + 0.5) / 128.0))
        .filter(|u| classify_interior(u) == Some(k11))
        .any(|u| {
            let z = crate::gaussian::recip(&(a + u));
            in_fundamental_domain(&z) && classify_interior(&z) == Some(r)
        })
}

/// [`alpha_translates`] restricted to entries passing
/// [`translate_reaches_k11`]. Drops `1+2i` and `2+2i` from `K_{2,2}`,
/// whose images fall outside `V_{1,1}`.
pub fn boundary_translates(r: RegionId) -> &'static [GaussianInt] {
    static TABLE: OnceLock<Vec<Vec<GaussianInt>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        RegionId::all()
            .map(|r| {
                alpha_translates(r)
                    .iter()
                    .copied()
                    .filter(|&a| translate_reaches_k11(r, a))
                    .collect()
            })
            .collect()
    });
    &table[r.index()]
}

/// Element of the marked alphabet `G'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Digit {
    value: GaussianInt,
    marked: bool,
}

/// `±2±i`, `±1±2i`, `±2±2i`.
pub fn is_markable(value: GaussianInt) -> bool {
    matches!(
        (value.re.abs(), value.im.abs()),
        (2, 1) | (1, 2) | (2, 2)
    )
}

impl Digit {
    /// Unmarked digit; `value` must lie in `G`.
    pub fn new(value: GaussianInt) -> Result<Self> {
        if !is_digit(value) {
            return Err(Error::Parse(format!(
                "{} is not a digit (0, ±1, ±i are excluded)",
                format_gaussian(&value)
            )));
        }
        Ok(Self {
            value,
            marked: false,
        })
    }

    pub fn marked(value: GaussianInt) -> Result<Self> {
        Self::with_mark(value, true)
    }

    pub fn with_mark(value: GaussianInt, marked: bool) -> Result<Self> {
        let d = Self::new(value)?;
        if marked && !is_markable(value) {
            return Err(Error::IllegalMark(format_gaussian(&value)));
        }
        Ok(Self { marked, ..d })
    }

    pub fn value(self) -> GaussianInt {
        self.value
    }

    pub fn is_marked(self) -> bool {
        self.marked
    }

    pub fn unmarked(self) -> Self {
        Self {
            marked: false,
            ..self
        }
    }

    pub fn neg(self) -> Self {
        Self {
            value: -self.value,
            ..self
        }
    }

    pub fn conj(self) -> Self {
        Self {
            value: self.value.conj(),
            ..self
        }
    }

    /// Multiplies the value by `i^j`.
    pub fn rotate(self, j: i32) -> Self {
        Self {
            value: rotate_by_i(&self.value, j),
            ..self
        }
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_gaussian(&self.value))?;
        if self.marked {
            f.write_str("'")?;
        }
        Ok(())
    }
}

impl FromStr for Digit {
    type Err = Error;

    /// `2+i`, `2+i'` and `(2+i)'`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (body, marked) = match t.strip_suffix('\'') {
            Some(b) => (b.trim(), true),
            None => (t, false),
        };
        let body = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .unwrap_or(body);
        Digit::with_mark(parse_gaussian(body)?, marked)
    }
}

/// Parses a comma separated digit word such as `2, 2+i', -3-2i`.
pub fn parse_word(s: &str) -> Result<Vec<Digit>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

/// Automaton states: the full domain and twelve subregions of `K`.
///
/// * `S1(r) = K \ D_{-i^r}`
/// * `S2(r) = K \ C_{i^r (-1-i)}`
/// * `S3(r) = K \ (D_{-i^r} ∪ D_{-i^{r+1}})`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subregion {
    Full,
    S1(u8),
    S2(u8),
    S3(u8),
}

impl Subregion {
    pub fn all() -> impl Iterator<Item = Subregion> {
        std::iter::once(Subregion::Full).chain((0..3).flat_map(|family| {
            (0..4u8).map(move |r| match family {
                0 => Subregion::S1(r),
                1 => Subregion::S2(r),
                _ => Subregion::S3(r),
            })
        }))
    }

    pub fn rotate(self, j: i32) -> Self {
        let rot = |r: u8| (r as i32 + j).rem_euclid(4) as u8;
        match self {
            Subregion::Full => Subregion::Full,
            Subregion::S1(r) => Subregion::S1(rot(r)),
            Subregion::S2(r) => Subregion::S2(rot(r)),
            Subregion::S3(r) => Subregion::S3(rot(r)),
        }
    }

    /// Image under `z -> conj(z)`.
    pub fn conjugate(self) -> Self {
        let m = |r: u8, c: i32| (c - r as i32).rem_euclid(4) as u8;
        match self {
            Subregion::Full => Subregion::Full,
            Subregion::S1(r) => Subregion::S1(m(r, 0)),
            Subregion::S2(r) => Subregion::S2(m(r, 3)),
            Subregion::S3(r) => Subregion::S3(m(r, 3)),
        }
    }

    fn rotation(self) -> i32 {
        match self {
            Subregion::Full => 0,
            Subregion::S1(r) | Subregion::S2(r) | Subregion::S3(r) => r as i32,
        }
    }

    /// Whether `d` may follow a digit whose remainder lies in this region.
    /// Each rotated state is reduced to rotation 0 by turning the digit.
    pub fn admits(self, d: &Digit) -> bool {
        let a = rotate_by_i(&d.value, self.rotation());
        let m = d.marked;
        match self {
            Subregion::Full => !m,
            Subregion::S1(_) => !m && a.re >= 0,
            Subregion::S3(_) => !m && a.re >= 0 && a.im <= 0,
            Subregion::S2(_) => {
                let only_marked = matches!((a.re, a.im), (-1, 2) | (-2, 1) | (-2, 2));
                (a.re, a.im) != (-1, 1) && m == only_marked
            }
        }
    }

    /// Disk centers removed from `K`, as `(center, is_corner)`.
    fn excluded_disks(self) -> Vec<GaussianInt> {
        let r = self.rotation();
        match self {
            Subregion::Full => vec![],
            Subregion::S1(_) => vec![-unit(r)],
            Subregion::S2(_) => vec![rotate_by_i(&Complex::new(-1, -1), r)],
            Subregion::S3(_) => vec![-unit(r), -unit(r + 1)],
        }
    }

    /// Geometric membership of `z ∈ K`, allowing `tol` slack on the removed
    /// disks.
    pub fn contains(self, z: &Complex<f64>, tol: f64) -> bool {
        in_fundamental_domain(z)
            && self.excluded_disks().iter().all(|c| {
                let c = Complex::new(c.re as f64, c.im as f64);
                (z - c).norm() >= 1.0 - tol
            })
    }

    /// The regions `K_{k,l}` whose union (with boundaries) forms this state.
    pub fn regions(self) -> Vec<RegionId> {
        let excluded = self.excluded_disks();
        RegionId::all()
            .filter(|id| {
                let r = id.rotation();
                // disks (and the corner disk) that contain K_{k,l}
                let mut inside = vec![-unit(r)];
                if id.k <= 2 {
                    inside.push(-unit(r + 1));
                }
                if id.k == 1 {
                    inside.push(rotate_by_i(&Complex::new(-1, -1), r));
                }
                excluded.iter().all(|c| !inside.contains(c))
            })
            .collect()
    }
}

impl fmt::Display for Subregion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subregion::Full => f.write_str("FULL"),
            Subregion::S1(r) => write!(f, "S1({r})"),
            Subregion::S2(r) => write!(f, "S2({r})"),
            Subregion::S3(r) => write!(f, "S3({r})"),
        }
    }
}

fn transition_table() -> &'static HashMap<Digit, Subregion> {
    static TABLE: OnceLock<HashMap<Digit, Subregion>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let d = |re, im, marked| Digit {
            value: Complex::new(re, im),
            marked,
        };
        let rows = [
            (d(2, 0, false), Subregion::S1(0)),
            (d(2, 1, true), Subregion::S1(0)),
            (d(0, 2, false), Subregion::S1(1)),
            (d(1, 2, true), Subregion::S1(1)),
            (d(1, 1, false), Subregion::S3(0)),
            (d(2, 1, false), Subregion::S2(0)),
            (d(1, 2, false), Subregion::S2(0)),
            (d(2, 2, true), Subregion::S2(0)),
        ];
        let mut table = HashMap::new();
        for (digit, state) in rows {
            for (dd, ss) in [
                (digit, state),
                (digit.neg(), state.rotate(2)),
                (digit.conj(), state.conjugate()),
                (digit.neg().conj(), state.rotate(2).conjugate()),
            ] {
                if let Some(prev) = table.insert(dd, ss) {
                    assert_eq!(prev, ss, "symmetry images disagree for {dd}");
                }
            }
        }
        table
    })
}

/// The region in which the remainder lies right after digit `d`.
pub fn region_after(d: &Digit) -> Subregion {
    transition_table()
        .get(d)
        .copied()
        .unwrap_or(Subregion::Full)
}

/// Predicate over admissible successors of a digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuccessorSet(pub Subregion);

impl SuccessorSet {
    pub fn contains(&self, d: &Digit) -> bool {
        self.0.admits(d)
    }
}

pub fn successor_set(d: &Digit) -> SuccessorSet {
    SuccessorSet(region_after(d))
}

pub fn next_subregion(current: Subregion, d: &Digit) -> Result<Subregion> {
    if !current.admits(d) {
        return Err(Error::NotAdmissible {
            state: current.to_string(),
            digit: d.to_string(),
        });
    }
    Ok(region_after(d))
}

/// Every consecutive pair passes the successor test.
pub fn is_admissible(word: &[Digit]) -> bool {
    word.windows(2).all(|p| successor_set(&p[0]).contains(&p[1]))
}

/// Picks the marked or unmarked twin of `value` that is admissible in
/// `state`.
pub fn assign_mark(state: Subregion, value: GaussianInt) -> Result<Digit> {
    let plain = Digit::new(value)?;
    if state.admits(&plain) {
        return Ok(plain);
    }
    if is_markable(value) {
        let marked = Digit { marked: true, ..plain };
        if state.admits(&marked) {
            return Ok(marked);
        }
    }
    Err(Error::NotAdmissible {
        state: state.to_string(),
        digit: plain.to_string(),
    })
}

/// Runs the automaton over the digits of an expansion, assigning marks.
pub fn mark_digits(digits: &[GaussianInt]) -> Result<Vec<Digit>> {
    let mut state = Subregion::Full;
    digits
        .iter()
        .map(|&v| {
            let d = assign_mark(state, v)?;
            state = region_after(&d);
            Ok(d)
        })
        .collect()
}
