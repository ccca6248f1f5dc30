//! Checking that a set of squares wraps the envelope.
//!
//! Every square is cut along the translation cells, moved into the base cell
//! `[0, 2b] × [0, 2]`, and its part above `y = 1` is turned about `(b, 1)`.
//! The resulting pieces live in `[0, 2b] × [0, 1]`, a region of area `2b`.
//! Pairwise interior-disjoint pieces with total area exactly `2b` cover it,
//! which is the wrapping condition.

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use rayon::prelude::*;
use thiserror::Error;

use crate::construct::WrappingSpec;
use crate::field::QuadExt;
use crate::geometry::{
    clip_halfplane, clip_to_box, convex_intersection_area, first_interior_overlap, ConvexPolygon,
    GeometryError, HalfPlane, Point2, SquareShape,
};
use crate::quotient::{GroupElement, Lattice, QuotientError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("malformed square #{index}: {source}")]
    MalformedSquare { index: usize, source: GeometryError },
    #[error(transparent)]
    Width(#[from] QuotientError),
    #[error("coordinates of square #{0} are not in the field of b")]
    MixedField(usize),
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// A convex part of one square, moved into the fundamental region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedPiece {
    pub polygon: ConvexPolygon,
    pub source: usize,
    /// Maps the original fragment onto `polygon`.
    pub element: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub pieces: (usize, usize),
    pub sources: (usize, usize),
    pub area: QuadExt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub is_valid: bool,
    pub squares_equal: bool,
    pub folded_area: QuadExt,
    pub target_area: QuadExt,
    pub overlap_found: Option<Overlap>,
    pub piece_count: usize,
    /// Why the squares were rejected before folding, if they were.
    pub note: Option<String>,
}

fn check_fields(spec: &WrappingSpec) -> Result<(), VerifyError> {
    let field_of = |q: &QuadExt| q.is_compatible(&spec.b) && q.is_compatible(&spec.side_sq);
    if !spec.b.is_compatible(&spec.side_sq) {
        return Err(VerifyError::MixedField(0));
    }
    for (i, sq) in spec.squares.iter().enumerate() {
        if !sq.vertices().iter().all(|v| field_of(&v.x) && field_of(&v.y)) {
            return Err(VerifyError::MixedField(i));
        }
    }
    // squares may use a radicand b does not carry (rational b); they must agree among themselves
    let mut radicand = None;
    for (i, sq) in spec.squares.iter().enumerate() {
        for q in sq.vertices().iter().flat_map(|v| [&v.x, &v.y]) {
            if q.is_rational() {
                continue;
            }
            match &radicand {
                None => radicand = Some(q.radicand().clone()),
                Some(d) if d != q.radicand() => return Err(VerifyError::MixedField(i)),
                _ => {}
            }
        }
    }
    Ok(())
}

fn fold_square(index: usize, sq: &SquareShape, lattice: &Lattice) -> Vec<FoldedPiece> {
    let poly = sq.to_polygon();
    let bb = poly.bbox();
    let two_b = lattice.two_b();
    let two = QuadExt::from_integer(2);
    let kx0 = (&bb.min.x / &two_b).floor();
    let kx1 = (&bb.max.x / &two_b).floor();
    let ky0 = (&bb.min.y / &two).floor();
    let ky1 = (&bb.max.y / &two).floor();
    let turn = GroupElement::half_turn_at(1.into(), 1.into());
    let below = HalfPlane::new(Point2::from_ints(0, 1), QuadExt::one());
    let cell = lattice.cell_box();

    let mut pieces = Vec::new();
    let mut kx = kx0;
    while kx <= kx1 {
        let mut ky = ky0.clone();
        while ky <= ky1 {
            let g = GroupElement::translation(-kx.clone(), -ky.clone());
            let shifted = poly.translate(&g.translation_vector(lattice));
            if let Some(frag) = clip_to_box(&shifted, &cell) {
                if let Some(lo) = clip_halfplane(&frag, &below) {
                    pieces.push(FoldedPiece { polygon: lo, source: index, element: g.clone() });
                }
                if let Some(hi) = clip_halfplane(&frag, &below.reversed()) {
                    pieces.push(FoldedPiece {
                        polygon: turn.apply_polygon(lattice, &hi),
                        source: index,
                        element: turn.compose(&g),
                    });
                }
            }
            ky += 1;
        }
        kx += 1;
    }
    pieces
}

/// Folds every square into `[0, 2b] × [0, 1]`.
pub fn fold_wrapping(spec: &WrappingSpec) -> Result<Vec<FoldedPiece>, VerifyError> {
    let lattice = Lattice::new(spec.b.clone())?;
    for (index, sq) in spec.squares.iter().enumerate() {
        SquareShape::from_vertices(sq.vertices().clone())
            .map_err(|source| VerifyError::MalformedSquare { index, source })?;
    }
    check_fields(spec)?;
    let nested: Vec<Vec<FoldedPiece>> = spec
        .squares
        .par_iter()
        .enumerate()
        .map(|(i, sq)| fold_square(i, sq, &lattice))
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

/// The first pair of pieces (in sweep order) whose interiors meet.
pub fn find_overlap(pieces: &[FoldedPiece]) -> Option<Overlap> {
    let polys: Vec<ConvexPolygon> = pieces.iter().map(|p| p.polygon.clone()).collect();
    first_interior_overlap(&polys).map(|(i, j)| Overlap {
        pieces: (i, j),
        sources: (pieces[i].source, pieces[j].source),
        area: convex_intersection_area(&polys[i], &polys[j]),
    })
}

fn squares_equal(spec: &WrappingSpec) -> Result<(), String> {
    for (i, sq) in spec.squares.iter().enumerate() {
        let checked = SquareShape::from_vertices(sq.vertices().clone())
            .map_err(|e| format!("square #{i}: {e}"))?;
        if checked.side_sq() != &spec.side_sq {
            return Err(format!("square #{i} has squared side {}", checked.side_sq()));
        }
    }
    Ok(())
}

/// Exact check of the wrapping conditions. Failures are reported, never raised.
pub fn verify_wrapping(spec: &WrappingSpec) -> VerificationReport {
    let target_area = &spec.b + &spec.b;
    let rejected = |note: String| VerificationReport {
        is_valid: false,
        squares_equal: false,
        folded_area: QuadExt::zero(),
        target_area: target_area.clone(),
        overlap_found: None,
        piece_count: 0,
        note: Some(note),
    };
    if let Err(e) = check_fields(spec) {
        return rejected(e.to_string());
    }
    let equal = squares_equal(spec);
    let pieces = match fold_wrapping(spec) {
        Ok(p) => p,
        Err(e) => return rejected(e.to_string()),
    };
    let folded_area: QuadExt = pieces.iter().map(|p| p.polygon.area()).sum();
    let overlap_found = find_overlap(&pieces);
    let squares_equal = equal.is_ok();
    VerificationReport {
        is_valid: squares_equal && overlap_found.is_none() && folded_area == target_area,
        squares_equal,
        folded_area,
        target_area,
        overlap_found,
        piece_count: pieces.len(),
        note: equal.err(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloReport {
    pub samples: u64,
    /// Fraction of samples covered by at least one piece.
    pub coverage_fraction: f64,
    pub mean_multiplicity: f64,
    pub max_multiplicity: u32,
}

impl MonteCarloReport {
    /// Largest standard error of a Bernoulli proportion at this sample size, `√(1/(4N))`.
    pub fn sigma(&self) -> f64 {
        (0.25 / self.samples as f64).sqrt()
    }
}

struct FloatPiece {
    pts: Vec<(f64, f64)>,
}

impl FloatPiece {
    fn contains(&self, x: f64, y: f64) -> bool {
        let n = self.pts.len();
        (0..n).all(|i| {
            let (ax, ay) = self.pts[i];
            let (bx, by) = self.pts[(i + 1) % n];
            (bx - ax) * (y - ay) - (by - ay) * (x - ax) >= 0.0
        })
    }
}

/// Samples `[0, 2b) × [0, 1)` uniformly and counts how many folded pieces hold each point.
///
/// Double precision throughout. The generator is PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`)
/// seeded with `seed_from_u64(seed)`; a sample takes two draws, x then y, each mapped to
/// `[0, 1)` as `(next_u64 >> 11) · 2⁻⁵³`.
pub fn monte_carlo_check(
    spec: &WrappingSpec,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloReport, VerifyError> {
    if samples == 0 {
        return Err(VerifyError::NoSamples);
    }
    let pieces = fold_wrapping(spec)?;
    let width = (&spec.b + &spec.b).to_f64();
    let float_pieces: Vec<FloatPiece> = pieces
        .iter()
        .map(|p| FloatPiece { pts: p.polygon.vertices().iter().map(Point2::to_f64).collect() })
        .collect();

    // bucket grid over the sampling region
    let cells_x = ((pieces.len() as f64).sqrt() * width.max(1.0)).ceil().clamp(1.0, 4096.0) as usize;
    let cells_y = ((pieces.len() as f64).sqrt()).ceil().clamp(1.0, 4096.0) as usize;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells_x * cells_y];
    let to_cell = |v: f64, extent: f64, n: usize| ((v / extent * n as f64).floor().max(0.0) as usize).min(n - 1);
    for (k, fp) in float_pieces.iter().enumerate() {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for &(x, y) in &fp.pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let eps = 1e-9 * width.max(1.0);
        let (cx0, cx1) = (to_cell(x0 - eps, width, cells_x), to_cell(x1 + eps, width, cells_x));
        let (cy0, cy1) = (to_cell(y0 - eps, 1.0, cells_y), to_cell(y1 + eps, 1.0, cells_y));
        for cy in cy0..=cy1 {
            for cx in cx0..=cx1 {
                buckets[cy * cells_x + cx].push(k);
            }
        }
    }

    let mut rng = Pcg64::seed_from_u64(seed);
    let mut unit = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let (mut covered, mut total, mut max_mult) = (0u64, 0u64, 0u32);
    for _ in 0..samples {
        let x = unit() * width;
        let y = unit();
        let bucket = &buckets[to_cell(y, 1.0, cells_y) * cells_x + to_cell(x, width, cells_x)];
        let count = bucket.iter().filter(|&&k| float_pieces[k].contains(x, y)).count() as u32;
        if count > 0 {
            covered += 1;
        }
        total += count as u64;
        max_mult = max_mult.max(count);
    }
    Ok(MonteCarloReport {
        samples,
        coverage_fraction: covered as f64 / samples as f64,
        mean_multiplicity: total as f64 / samples as f64,
        max_multiplicity: max_mult,
    })
}
