//! Binary and flat grayscale morphology on bounded grids.
//!
//! Dilation clips translates to the grid. Erosion keeps a pixel `p` when
//! every in-bounds pixel of `B_p` lies in the image, which makes the pair an
//! exact Galois connection on the lattice of subsets of the grid.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::GaloisConnection;
use crate::poset::{bit, powerset_lattice, FinitePoset};
use crate::rational::{format_rational, Rational};

pub type Point = (i64, i64);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl BinaryImage {
    pub fn empty(width: usize, height: usize) -> Self {
        BinaryImage {
            width,
            height,
            pixels: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        BinaryImage {
            width,
            height,
            pixels: vec![true; width * height],
        }
    }

    pub fn from_points(width: usize, height: usize, points: &[Point]) -> Result<Self> {
        let mut img = Self::empty(width, height);
        for &p in points {
            if !img.in_bounds(p) {
                return Err(Error::dims(
                    "image point",
                    format!("inside {width}x{height}"),
                    format!("{p:?}"),
                ));
            }
            img.set(p, true);
        }
        Ok(img)
    }

    /// Row-major rows of pixels, `rows[y][x]`.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if let Some((y, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(Error::dims(format!("bitmap row {y}"), width, r.len()));
        }
        Ok(BinaryImage {
            width,
            height,
            pixels: rows.concat(),
        })
    }

    /// Pixel `i` (row-major) is set iff bit `i` of `mask` is.
    pub fn from_mask(width: usize, height: usize, mask: u64) -> Self {
        BinaryImage {
            width,
            height,
            pixels: (0..width * height).map(|i| mask & bit(i) != 0).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .fold(0, |m, (i, _)| m | bit(i))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn in_bounds(&self, (x, y): Point) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn get(&self, p: Point) -> bool {
        self.in_bounds(p) && self.pixels[p.1 as usize * self.width + p.0 as usize]
    }

    pub fn set(&mut self, p: Point, on: bool) {
        let w = self.width;
        self.pixels[p.1 as usize * w + p.0 as usize] = on;
    }

    pub fn points(&self) -> Vec<Point> {
        self.grid().filter(|&p| self.get(p)).collect()
    }

    pub fn grid(&self) -> impl Iterator<Item = Point> {
        let (w, h) = (self.width as i64, self.height as i64);
        (0..h).flat_map(move |y| (0..w).map(move |x| (x, y)))
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.pixels.chunks(self.width.max(1)).take(self.height).map(<[bool]>::to_vec).collect()
    }

    pub fn count(&self) -> usize {
        self.pixels.iter().filter(|&&b| b).count()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.pixels.iter().zip(&other.pixels).all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && b)
    }

    fn zip(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!((self.width, self.height), (other.width, other.height), "image shapes differ");
        BinaryImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().zip(&other.pixels).map(|(&a, &b)| op(a, b)).collect(),
        }
    }
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// A nonempty set of offsets relative to the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructuringElement {
    offsets: Vec<Point>,
}

impl StructuringElement {
    pub fn new(offsets: &[Point]) -> Result<Self> {
        let set: BTreeSet<Point> = offsets.iter().copied().collect();
        if set.is_empty() {
            return Err(Error::schema("structuring element", "must contain at least one offset"));
        }
        Ok(StructuringElement {
            offsets: set.into_iter().collect(),
        })
    }

    pub fn origin() -> Self {
        StructuringElement { offsets: vec![(0, 0)] }
    }

    /// Horizontal bar `{(0,0), (1,0), …}` of the given length.
    pub fn bar(len: usize) -> Self {
        let offsets: Vec<Point> = (0..len.max(1) as i64).map(|x| (x, 0)).collect();
        StructuringElement { offsets }
    }

    pub fn offsets(&self) -> &[Point] {
        &self.offsets
    }
}

pub fn dilate(x: &BinaryImage, b: &StructuringElement) -> BinaryImage {
    let mut out = BinaryImage::empty(x.width, x.height);
    for (px, py) in x.points() {
        for &(ox, oy) in &b.offsets {
            let q = (px + ox, py + oy);
            if out.in_bounds(q) {
                out.set(q, true);
            }
        }
    }
    out
}

pub fn erode(y: &BinaryImage, b: &StructuringElement) -> BinaryImage {
    let mut out = BinaryImage::empty(y.width, y.height);
    for p in y.grid() {
        let keep = b.offsets.iter().all(|&(ox, oy)| {
            let q = (p.0 + ox, p.1 + oy);
            !y.in_bounds(q) || y.get(q)
        });
        if keep {
            out.set(p, true);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filter {
    Open,
    Close,
}

pub fn open_close(x: &BinaryImage, b: &StructuringElement, which: Filter) -> BinaryImage {
    match which {
        Filter::Open => dilate(&erode(x, b), b),
        Filter::Close => erode(&dilate(x, b), b),
    }
}

pub fn opening(x: &BinaryImage, b: &StructuringElement) -> BinaryImage {
    open_close(x, b, Filter::Open)
}

pub fn closing(x: &BinaryImage, b: &StructuringElement) -> BinaryImage {
    open_close(x, b, Filter::Close)
}

/// Names of the six filters generated by opening `φ` and closing `κ`,
/// written right to left (`kappa_phi` applies `φ` first).
pub const FILTER_NAMES: [&str; 6] = ["phi", "kappa", "kappa_phi", "phi_kappa", "phi_kappa_phi", "kappa_phi_kappa"];

/// Applies a word over `{φ, κ}`; the last letter acts first.
pub fn apply_word(x: &BinaryImage, b: &StructuringElement, word: &[Filter]) -> BinaryImage {
    word.iter()
        .rev()
        .fold(x.clone(), |acc, &f| open_close(&acc, b, f))
}

fn word_of(name: &str) -> Vec<Filter> {
    name.split('_')
        .map(|w| if w == "phi" { Filter::Open } else { Filter::Close })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositeReport {
    #[serde(skip)]
    pub filters: BTreeMap<String, BinaryImage>,
    pub idempotent: bool,
    pub chain_holds: bool,
    /// Every one-letter extension of the six filters is again one of them.
    pub closed: bool,
    pub violations: Vec<String>,
}

impl CompositeReport {
    pub fn holds(&self) -> bool {
        self.idempotent && self.chain_holds && self.closed
    }
}

/// Evaluates `φ, κ, κφ, φκ, φκφ, κφκ` on `x` and checks idempotence, the
/// order chain `φ ≤ φκφ ≤ κφ, φκ ≤ κφκ ≤ κ` and closure under composition.
pub fn composite_filter_lattice(x: &BinaryImage, b: &StructuringElement) -> CompositeReport {
    let mut filters = BTreeMap::new();
    for name in FILTER_NAMES {
        filters.insert(name.to_string(), apply_word(x, b, &word_of(name)));
    }
    let mut violations = Vec::new();
    let mut idempotent = true;
    for name in FILTER_NAMES {
        let once = &filters[name];
        let twice = apply_word(once, b, &word_of(name));
        if &twice != once {
            idempotent = false;
            violations.push(format!("{name} is not idempotent"));
        }
    }
    let chain = [
        ("phi", "phi_kappa_phi"),
        ("phi_kappa_phi", "kappa_phi"),
        ("phi_kappa_phi", "phi_kappa"),
        ("kappa_phi", "kappa_phi_kappa"),
        ("phi_kappa", "kappa_phi_kappa"),
        ("kappa_phi_kappa", "kappa"),
    ];
    let mut chain_holds = true;
    for (lo, hi) in chain {
        if !filters[lo].is_subset(&filters[hi]) {
            chain_holds = false;
            violations.push(format!("{lo} is not below {hi}"));
        }
    }
    let mut closed = true;
    for name in FILTER_NAMES {
        for (letter, f) in [("phi", Filter::Open), ("kappa", Filter::Close)] {
            let next = open_close(&filters[name], b, f);
            if !filters.values().any(|v| v == &next) {
                closed = false;
                violations.push(format!("{letter} after {name} leaves the six filters"));
            }
        }
    }
    CompositeReport {
        filters,
        idempotent,
        chain_holds,
        closed,
        violations,
    }
}

/// The power-set lattice of a `width × height` grid (at most 16 pixels) and
/// the image each lattice element stands for.
pub fn image_lattice(width: usize, height: usize) -> Result<(FinitePoset, Vec<BinaryImage>)> {
    let labels: Vec<String> = (0..height)
        .flat_map(|y| (0..width).map(move |x| pixel_label(x, y)))
        .collect();
    let (poset, masks) = powerset_lattice(&labels)?;
    let mut sorted = labels.clone();
    sorted.sort();
    let images = masks
        .iter()
        .map(|&m| {
            let mut img = BinaryImage::empty(width, height);
            for (i, l) in sorted.iter().enumerate() {
                if m & bit(i) != 0 {
                    let pos = labels.iter().position(|k| k == l).expect("same labels");
                    img.set(((pos % width) as i64, (pos / width) as i64), true);
                }
            }
            img
        })
        .collect();
    Ok((poset, images))
}

fn pixel_label(x: usize, y: usize) -> String {
    format!("x{x:02}y{y:02}")
}

/// Dilation and erosion by `b` as a Galois connection on the image lattice.
pub fn morphology_connection(width: usize, height: usize, b: &StructuringElement) -> Result<(GaloisConnection, Vec<BinaryImage>)> {
    let (poset, images) = image_lattice(width, height)?;
    let index: BTreeMap<u64, usize> = images.iter().enumerate().map(|(i, img)| (img.to_mask(), i)).collect();
    let f: Vec<usize> = images.iter().map(|x| index[&dilate(x, b).to_mask()]).collect();
    let g: Vec<usize> = images.iter().map(|y| index[&erode(y, b).to_mask()]).collect();
    let c = GaloisConnection::new(poset.clone(), poset, f, g)?;
    Ok((c, images))
}

/// Extended rationals for grayscale values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extended {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        use Extended::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => write!(f, "-inf"),
            Extended::PosInf => write!(f, "+inf"),
            Extended::Finite(r) => write!(f, "{}", format_rational(r)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlatOp {
    Dilate,
    Erode,
}

/// Windowed max (dilation over the reflected window) or min (erosion over
/// the window) of a 1-D signal. Reads outside the domain return `-∞` for
/// dilation and `+∞` for erosion.
pub fn flat_filter(f: &[Extended], window: &[i64], which: FlatOp) -> Vec<Extended> {
    let n = f.len() as i64;
    (0..n)
        .map(|x| {
            let reads = window.iter().map(|&b| {
                let at = match which {
                    FlatOp::Dilate => x - b,
                    FlatOp::Erode => x + b,
                };
                if (0..n).contains(&at) {
                    f[at as usize].clone()
                } else if which == FlatOp::Dilate {
                    Extended::NegInf
                } else {
                    Extended::PosInf
                }
            });
            match which {
                FlatOp::Dilate => reads.max().unwrap_or(Extended::NegInf),
                FlatOp::Erode => reads.min().unwrap_or(Extended::PosInf),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn row(points: &[i64], width: usize) -> BinaryImage {
        let pts: Vec<Point> = points.iter().map(|&x| (x, 0)).collect();
        BinaryImage::from_points(width, 1, &pts).unwrap()
    }

    #[test]
    fn dilation_examples() {
        let x = row(&[0, 1], 4);
        assert_eq!(dilate(&x, &StructuringElement::origin()), x);
        assert_eq!(dilate(&x, &StructuringElement::bar(2)), row(&[0, 1, 2], 4));
        let empty = BinaryImage::empty(4, 1);
        assert_eq!(dilate(&empty, &StructuringElement::bar(2)), empty);
    }

    #[test]
    fn erosion_examples() {
        let x = row(&[0, 1], 4);
        assert_eq!(erode(&x, &StructuringElement::origin()), x);
        assert_eq!(erode(&x, &StructuringElement::bar(2)), row(&[0], 4));
        let full = BinaryImage::full(4, 1);
        assert_eq!(erode(&full, &StructuringElement::bar(2)), full);
    }

    #[test]
    fn opening_removes_isolated_pixel() {
        let x = BinaryImage::from_points(5, 3, &[(2, 1)]).unwrap();
        let bar = StructuringElement::bar(2);
        assert_eq!(opening(&x, &bar), BinaryImage::empty(5, 3));
        assert_eq!(opening(&x, &StructuringElement::origin()), x);
        assert_eq!(closing(&x, &StructuringElement::origin()), x);
    }

    #[test]
    fn opening_is_idempotent_and_sandwiched() {
        let b = StructuringElement::new(&[(0, 0), (1, 0), (0, 1)]).unwrap();
        for mask in 0..(1u64 << 9) {
            let x = BinaryImage::from_mask(3, 3, mask);
            let o = opening(&x, &b);
            let c = closing(&x, &b);
            assert_eq!(opening(&o, &b), o);
            assert_eq!(closing(&c, &b), c);
            assert!(o.is_subset(&x) && x.is_subset(&c));
        }
    }

    #[test]
    fn composite_filters_collapse_for_origin() {
        let x = BinaryImage::from_points(3, 2, &[(0, 0), (2, 1)]).unwrap();
        let r = composite_filter_lattice(&x, &StructuringElement::origin());
        assert!(r.holds());
        assert!(r.filters.values().all(|f| f == &x));
    }

    #[test]
    fn connection_on_small_grid() {
        let b = StructuringElement::bar(2);
        let (c, images) = morphology_connection(2, 2, &b).unwrap();
        assert_eq!(images.len(), 16);
        assert!(c.check().holds);
    }

    #[test]
    fn flat_filters() {
        let f: Vec<Extended> = [1, 5, 2].iter().map(|&v| Extended::Finite(int(v))).collect();
        assert_eq!(flat_filter(&f, &[0], FlatOp::Dilate), f);
        let five = Extended::Finite(int(5));
        let one = Extended::Finite(int(1));
        assert_eq!(flat_filter(&f, &[-1, 0, 1], FlatOp::Dilate), vec![five.clone(), five.clone(), five]);
        let two = Extended::Finite(int(2));
        assert_eq!(flat_filter(&f, &[-1, 0, 1], FlatOp::Erode), vec![one.clone(), one, two]);
        assert_eq!(
            flat_filter(&f, &[1], FlatOp::Dilate),
            vec![Extended::NegInf, Extended::Finite(int(1)), Extended::Finite(int(5))]
        );
        assert_eq!(
            flat_filter(&f, &[1], FlatOp::Erode),
            vec![Extended::Finite(int(5)), Extended::Finite(int(2)), Extended::PosInf]
        );
    }
}
