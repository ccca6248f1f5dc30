//! The plane tiling generated by a wrapping, and its decomposition into strips.
//!
//! Images of the wrapping squares under every group element tile the plane,
//! and the tiling is invariant under the group. [`expand_orbit`] materializes
//! the part of it meeting a window plus a one-cell margin; [`strip_decomposition`]
//! splits that patch into strips of squares (consecutive squares share a full
//! side, non-consecutive ones share no vertex) and reads off the projection
//! counts `q1, q2` of the translation periods onto the strip normal.

use std::collections::{HashMap, HashSet};

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::construct::WrappingSpec;
use crate::field::{rational_sqrt, QuadExt};
use crate::geometry::{clip_to_box, first_interior_overlap, BBox, ConvexPolygon, Point2, SquareShape};
use crate::quotient::Lattice;
use crate::verify::verify_wrapping;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("input is not a valid wrapping: {0}")]
    InvalidSpec(String),
    #[error("reflected window is not inside the patch margin")]
    MarginTooSmall,
    #[error("cannot classify strips: {0}")]
    AmbiguousAtBoundary(String),
    #[error("projection is not an integer multiple of the side: {0}")]
    NonIntegerProjection(String),
    #[error("patch squares do not tile: {0}")]
    NotATiling(String),
    #[error("patch squares are not parallel to each other")]
    Misaligned,
}

/// The orbit tiling restricted to `cover`, which is `window` grown by one
/// translation cell `(2b, 2)` on every side.
#[derive(Clone, Debug)]
pub struct TilingPatch {
    /// Every orbit square whose interior meets `cover`, sorted by center `(y, x)`.
    pub squares: Vec<SquareShape>,
    pub window: BBox,
    pub cover: BBox,
    pub lattice: Lattice,
    pub side_sq: QuadExt,
}

impl TilingPatch {
    /// Indices of the squares whose interior meets the window.
    pub fn window_squares(&self) -> Vec<usize> {
        (0..self.squares.len())
            .filter(|&i| meets_interior(&self.squares[i].to_polygon(), &self.window))
            .collect()
    }

    /// Exact area accounting: squares are interior-disjoint and their parts inside
    /// `region` add up to its area.
    pub fn covers_exactly(&self, region: &BBox) -> Result<(), TilingError> {
        let polys: Vec<ConvexPolygon> = self.squares.iter().map(SquareShape::to_polygon).collect();
        if let Some((i, j)) = first_interior_overlap(&polys) {
            return Err(TilingError::NotATiling(format!("squares {i} and {j} overlap")));
        }
        let inside: QuadExt = polys
            .par_iter()
            .filter_map(|p| clip_to_box(p, region).map(|c| c.area()))
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        if inside != region.area() {
            return Err(TilingError::NotATiling(format!(
                "covered area {inside} differs from region area {}",
                region.area()
            )));
        }
        Ok(())
    }
}

fn meets_interior(poly: &ConvexPolygon, region: &BBox) -> bool {
    poly.bbox().overlaps_open(region) && clip_to_box(poly, region).is_some()
}

/// Integer range `lo..=hi` of translation indices that can bring `[min, max]`
/// (scaled by `period`) to meet `[lo_target, hi_target]`.
fn index_range(min: &QuadExt, max: &QuadExt, lo_target: &QuadExt, hi_target: &QuadExt, period: &QuadExt) -> (i64, i64) {
    let lo = ((lo_target - max) / period).floor();
    let hi = ((hi_target - min) / period).floor() + 1i32;
    (lo.to_i64().expect("window index fits i64"), hi.to_i64().expect("window index fits i64"))
}

/// All orbit squares meeting `window` grown by one translation cell.
pub fn expand_orbit(spec: &WrappingSpec, window: &BBox) -> Result<TilingPatch, TilingError> {
    let report = verify_wrapping(spec);
    if !report.is_valid {
        return Err(TilingError::InvalidSpec(format!(
            "folded area {} vs {}, overlap {:?}",
            report.folded_area, report.target_area, report.overlap_found.map(|o| o.sources)
        )));
    }
    let lattice = Lattice::new(spec.b.clone()).map_err(|e| TilingError::InvalidSpec(e.to_string()))?;
    let two_b = lattice.two_b();
    let two = QuadExt::from_integer(2);
    let cover = window.grow(&two_b, &two);

    let jobs: Vec<(usize, bool)> = (0..spec.squares.len()).flat_map(|i| [(i, false), (i, true)]).collect();
    let found: Vec<Vec<SquareShape>> = jobs
        .par_iter()
        .map(|&(i, reflect)| {
            let base = if reflect {
                spec.squares[i].half_turn(&Point2::origin())
            } else {
                spec.squares[i].clone()
            };
            let bb = base.to_polygon().bbox();
            let (x0, x1) = index_range(&bb.min.x, &bb.max.x, &cover.min.x, &cover.max.x, &two_b);
            let (y0, y1) = index_range(&bb.min.y, &bb.max.y, &cover.min.y, &cover.max.y, &two);
            let mut out = Vec::new();
            for t1 in x0..=x1 {
                for t2 in y0..=y1 {
                    let t = Point2::new(&two_b * &QuadExt::from_integer(t1), QuadExt::from_integer(2 * t2));
                    let image = base.translate(&t);
                    if meets_interior(&image.to_polygon(), &cover) {
                        out.push(image);
                    }
                }
            }
            out
        })
        .collect();

    let mut seen = HashSet::new();
    let mut squares: Vec<SquareShape> =
        found.into_iter().flatten().filter(|s| seen.insert(s.canonical_key())).collect();
    let mut keyed: Vec<(Point2, SquareShape)> = squares.drain(..).map(|s| (s.center(), s)).collect();
    keyed.sort_by(|(a, _), (b, _)| a.y.cmp(&b.y).then_with(|| a.x.cmp(&b.x)));
    let squares = keyed.into_iter().map(|(_, s)| s).collect();

    let patch = TilingPatch { squares, window: window.clone(), cover, lattice, side_sq: spec.side_sq.clone() };
    patch.covers_exactly(&patch.cover)?;
    Ok(patch)
}

/// Whether the half turn about the lattice node `(m·b, n)` maps every patch
/// square meeting the window onto a patch square.
pub fn check_invariance(patch: &TilingPatch, node: (i64, i64)) -> Result<bool, TilingError> {
    let center = patch.lattice.node(node.0, node.1);
    let twice = &center + &center;
    let w = &patch.window;
    let reflected = BBox::new(&twice - &w.max, &twice - &w.min);
    if !patch.cover.contains_box(&reflected) {
        return Err(TilingError::MarginTooSmall);
    }
    let keys: HashSet<[Point2; 4]> = patch.squares.iter().map(SquareShape::canonical_key).collect();
    Ok(patch
        .window_squares()
        .into_par_iter()
        .all(|i| keys.contains(&patch.squares[i].half_turn(&twice).canonical_key())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripCase {
    /// Some neighbouring squares meet along part of a side; the strip direction is forced.
    Offset,
    /// All contacts are full sides; the squares form a grid.
    Grid,
}

#[derive(Clone, Debug)]
pub struct StripReport {
    /// Patch-local strips, each a list of square indices in order along `direction`.
    pub strips: Vec<Vec<usize>>,
    /// A square edge vector along the strips, pointing into the half-plane `x > 0`
    /// (or straight up).
    pub direction: Point2,
    pub case_tag: StripCase,
    pub q1: u64,
    pub q2: u64,
    /// Squares per fundamental domain, `2b / side²`.
    pub g: u64,
}

/// Coordinates of a square's lowest corner in the basis of its own edges, in side units.
type Cell = (QuadExt, QuadExt);

fn local_cells(patch: &TilingPatch) -> Result<(Point2, Vec<Cell>), TilingError> {
    let e1 = patch.squares[0].edge();
    let e2 = e1.perp();
    let s2 = patch.side_sq.clone();
    let allowed = [e1.clone(), -&e1, e2.clone(), -&e2];
    let cells = patch
        .squares
        .par_iter()
        .map(|sq| {
            let v = sq.vertices();
            if !(0..4).all(|k| allowed.contains(&(&v[(k + 1) % 4] - &v[k]))) {
                return Err(TilingError::Misaligned);
            }
            let alpha = v.iter().map(|p| p.dot(&e1) / &s2).min().expect("four vertices");
            let beta = v.iter().map(|p| p.dot(&e2) / &s2).min().expect("four vertices");
            Ok((alpha, beta))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((e1, cells))
}

/// True if some square in line `k` has a partial contact with a square in line `k + 1`.
/// Lines are keyed by one local coordinate; positions along the line are the other.
fn has_partial_contact(lines: &HashMap<QuadExt, Vec<QuadExt>>) -> bool {
    let one = QuadExt::one();
    lines.iter().any(|(k, positions)| {
        let Some(next) = lines.get(&(k + &one)) else {
            return false;
        };
        positions.iter().any(|a| {
            let lo = a - &one;
            let hi = a + &one;
            let start = next.partition_point(|x| x <= &lo);
            next[start..].iter().take_while(|x| **x < hi).any(|x| x != a)
        })
    })
}

fn orient_positive_x(v: Point2) -> Point2 {
    if v.x.is_negative() || (v.x.is_zero() && v.y.is_negative()) {
        -&v
    } else {
        v
    }
}

/// Splits the patch into strips and computes the projection counts.
pub fn strip_decomposition(patch: &TilingPatch) -> Result<StripReport, TilingError> {
    if patch.squares.len() < 2 {
        return Err(TilingError::AmbiguousAtBoundary("fewer than two squares".into()));
    }
    let (e1, cells) = local_cells(patch)?;
    let e2 = e1.perp();
    let index: HashMap<&Cell, usize> = cells.iter().enumerate().map(|(i, c)| (c, i)).collect();

    let mut rows: HashMap<QuadExt, Vec<QuadExt>> = HashMap::new();
    let mut cols: HashMap<QuadExt, Vec<QuadExt>> = HashMap::new();
    for (a, b) in &cells {
        rows.entry(b.clone()).or_default().push(a.clone());
        cols.entry(a.clone()).or_default().push(b.clone());
    }
    rows.values_mut().chain(cols.values_mut()).for_each(|v| v.sort());

    let along_rows = has_partial_contact(&rows);
    let along_cols = has_partial_contact(&cols);
    let one = QuadExt::one();
    let zero = QuadExt::zero();
    let (case_tag, direction) = match (along_rows, along_cols) {
        (true, true) => {
            return Err(TilingError::NotATiling("partial contacts in both directions".into()));
        }
        (true, false) => (StripCase::Offset, e1.clone()),
        (false, true) => (StripCase::Offset, e2.clone()),
        (false, false) => {
            // first full-side adjacency in patch order
            let steps = [(&one, &zero), (&zero, &one)];
            let first = cells.iter().enumerate().find_map(|(i, (a, b))| {
                steps
                    .iter()
                    .flat_map(|(da, db)| {
                        [(a + *da, b + *db), (a - *da, b - *db)]
                    })
                    .filter_map(|c| index.get(&c).copied())
                    .filter(|&j| j > i)
                    .min()
                    .map(|j| (i, j))
            });
            let Some((i, j)) = first else {
                return Err(TilingError::AmbiguousAtBoundary("no two squares share a side".into()));
            };
            (StripCase::Grid, &patch.squares[j].center() - &patch.squares[i].center())
        }
    };
    let direction = orient_positive_x(direction);
    let step = (direction.dot(&e1) / &patch.side_sq, direction.dot(&e2) / &patch.side_sq);

    let mut strips = Vec::new();
    for (i, (a, b)) in cells.iter().enumerate() {
        if index.contains_key(&(a - &step.0, b - &step.1)) {
            continue;
        }
        let mut strip = vec![i];
        let mut cur = (a + &step.0, b + &step.1);
        while let Some(&j) = index.get(&cur) {
            strip.push(j);
            cur = (&cur.0 + &step.0, &cur.1 + &step.1);
        }
        strips.push(strip);
    }
    for strip in &strips {
        check_strip(patch, strip)?;
    }

    let g = squares_per_domain(patch)?;
    let mut report = StripReport { strips, direction, case_tag, q1: 0, q2: 0, g };
    let (q1, q2) = strip_direction_and_q(patch, &report)?;
    report.q1 = q1;
    report.q2 = q2;
    Ok(report)
}

/// Consecutive squares share exactly one full side; others share no vertex.
fn check_strip(patch: &TilingPatch, strip: &[usize]) -> Result<(), TilingError> {
    let mut owners: HashMap<&Point2, Vec<usize>> = HashMap::new();
    for (pos, &i) in strip.iter().enumerate() {
        for v in patch.squares[i].vertices() {
            owners.entry(v).or_default().push(pos);
        }
    }
    let mut shared = vec![0usize; strip.len().saturating_sub(1)];
    for positions in owners.values() {
        match positions.as_slice() {
            [_] => {}
            [p, q] if q == &(p + 1) => shared[*p] += 1,
            _ => {
                return Err(TilingError::NotATiling(format!(
                    "strip squares at positions {positions:?} share a vertex"
                )))
            }
        }
    }
    if let Some(k) = shared.iter().position(|&c| c != 2) {
        return Err(TilingError::NotATiling(format!("strip squares {k} and {} do not share a side", k + 1)));
    }
    Ok(())
}

fn squares_per_domain(patch: &TilingPatch) -> Result<u64, TilingError> {
    let g = patch.lattice.fundamental_area() / &patch.side_sq;
    g.as_rational()
        .filter(|q| q.is_integer() && q.is_positive())
        .and_then(|q| q.to_integer().to_u64())
        .ok_or_else(|| TilingError::NotATiling(format!("2b / side² = {g} is not a positive integer")))
}

fn integer_sqrt_of(v: &QuadExt, what: &str) -> Result<u64, TilingError> {
    v.as_rational()
        .and_then(rational_sqrt)
        .filter(|r| r.is_integer())
        .and_then(|r| r.to_integer().to_u64())
        .ok_or_else(|| TilingError::NonIntegerProjection(format!("{what}² = {v}")))
}

/// `q1, q2` with `|(−2b, 0)·N| = q1·a` and `|(0, 2)·N| = q2·a` for the unit strip normal `N`.
pub fn strip_direction_and_q(patch: &TilingPatch, report: &StripReport) -> Result<(u64, u64), TilingError> {
    let normal = report.direction.perp();
    let denom = normal.norm_sq() * &patch.side_sq;
    let p1 = Point2::new(-patch.lattice.two_b(), QuadExt::zero()).dot(&normal);
    let p2 = Point2::new(QuadExt::zero(), QuadExt::from_integer(2)).dot(&normal);
    let q1 = integer_sqrt_of(&(&p1 * &p1 / &denom), "q1")?;
    let q2 = integer_sqrt_of(&(&p2 * &p2 / &denom), "q2")?;
    Ok((q1, q2))
}

/// Builds a window `[0, w] × [0, h]`.
pub fn window_box(w: QuadExt, h: QuadExt) -> BBox {
    BBox::new(Point2::origin(), Point2::new(w, h))
}
