//! The lattice `Λ = {(m·b, n)}` of a `1 × b` envelope, the group generated by
//! half turns about its nodes, and folding into a fundamental domain.
//!
//! The group has two kinds of elements: translations by `(2b·t₁, 2·t₂)` and
//! half turns `X ↦ −X + (2b·t₁, 2·t₂)` (the half turn about node `(b·t₁, t₂)`).
//! The fundamental region used throughout is `[0, 2b) × [0, 1]`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::QuadExt;
use crate::geometry::{BBox, ConvexPolygon, Point2, SquareShape};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("envelope width must be positive, got {0}")]
    NonPositiveWidth(Box<QuadExt>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    b: QuadExt,
}

impl Lattice {
    pub fn new(b: QuadExt) -> Result<Self, QuotientError> {
        if !b.is_positive() {
            return Err(QuotientError::NonPositiveWidth(Box::new(b)));
        }
        Ok(Lattice { b })
    }

    pub fn b(&self) -> &QuadExt {
        &self.b
    }

    pub fn two_b(&self) -> QuadExt {
        &self.b + &self.b
    }

    /// The node `(m·b, n)`.
    pub fn node(&self, m: i64, n: i64) -> Point2 {
        Point2::new(&self.b * &QuadExt::from_integer(m), QuadExt::from_integer(n))
    }

    /// `[0, 2b] × [0, 1]`, closure of the fundamental region.
    pub fn fundamental_box(&self) -> BBox {
        BBox::new(Point2::origin(), Point2::new(self.two_b(), QuadExt::one()))
    }

    /// `[0, 2b] × [0, 2]`, closure of one translation cell.
    pub fn cell_box(&self) -> BBox {
        BBox::new(Point2::origin(), Point2::new(self.two_b(), QuadExt::from_integer(2)))
    }

    pub fn fundamental_area(&self) -> QuadExt {
        self.two_b()
    }
}

/// `X ↦ (−1)^reflect · X + (2b·t₁, 2·t₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub reflect: bool,
    pub t1: BigInt,
    pub t2: BigInt,
}

impl GroupElement {
    pub fn identity() -> Self {
        Self::translation(BigInt::zero(), BigInt::zero())
    }

    pub fn translation(t1: BigInt, t2: BigInt) -> Self {
        GroupElement { reflect: false, t1, t2 }
    }

    /// Half turn about the node `(m·b, n)`.
    pub fn half_turn_at(m: BigInt, n: BigInt) -> Self {
        GroupElement { reflect: true, t1: m, t2: n }
    }

    pub fn is_identity(&self) -> bool {
        !self.reflect && self.t1.is_zero() && self.t2.is_zero()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let (o1, o2) = if self.reflect {
            (-&other.t1, -&other.t2)
        } else {
            (other.t1.clone(), other.t2.clone())
        };
        GroupElement { reflect: self.reflect ^ other.reflect, t1: o1 + &self.t1, t2: o2 + &self.t2 }
    }

    pub fn inverse(&self) -> GroupElement {
        if self.reflect {
            self.clone()
        } else {
            GroupElement::translation(-&self.t1, -&self.t2)
        }
    }

    pub fn translation_vector(&self, lattice: &Lattice) -> Point2 {
        Point2::new(
            lattice.two_b() * QuadExt::from_bigint(self.t1.clone()),
            QuadExt::from_bigint(&self.t2 * 2),
        )
    }

    pub fn apply(&self, lattice: &Lattice, p: &Point2) -> Point2 {
        let t = self.translation_vector(lattice);
        if self.reflect {
            &t - p
        } else {
            p + &t
        }
    }

    pub fn apply_polygon(&self, lattice: &Lattice, poly: &ConvexPolygon) -> ConvexPolygon {
        // a half turn preserves orientation, so the result is still counterclockwise
        poly.map_points(|p| self.apply(lattice, p))
    }

    pub fn apply_square(&self, lattice: &Lattice, sq: &SquareShape) -> SquareShape {
        let t = self.translation_vector(lattice);
        if self.reflect {
            sq.half_turn(&t)
        } else {
            sq.translate(&t)
        }
    }
}

/// Reduces `p` modulo the translations `(2b, 0)` and `(0, 2)` into `[0, 2b) × [0, 2)`.
fn reduce_translations(p: &Point2, lattice: &Lattice) -> (Point2, GroupElement) {
    let two_b = lattice.two_b();
    let two = QuadExt::from_integer(2);
    let k1 = (&p.x / &two_b).floor();
    let k2 = (&p.y / &two).floor();
    let g = GroupElement::translation(-k1, -k2);
    (g.apply(lattice, p), g)
}

/// Folds `p` into `[0, 2b) × [0, 1]`, returning the image and the element that maps `p` to it.
pub fn fold_point(p: &Point2, lattice: &Lattice) -> (Point2, GroupElement) {
    let (q, g) = reduce_translations(p, lattice);
    if q.y <= QuadExt::one() {
        return (q, g);
    }
    // upper half of the cell: half turn about (b, 1), then re-reduce x
    let turn = GroupElement::half_turn_at(BigInt::one(), BigInt::one());
    let mut g = turn.compose(&g);
    let mut q = turn.apply(lattice, &q);
    if q.x == lattice.two_b() {
        let shift = GroupElement::translation(-BigInt::one(), BigInt::zero());
        q = shift.apply(lattice, &q);
        g = shift.compose(&g);
    }
    (q, g)
}

/// True iff some group element maps `p` to `q`.
pub fn equivalent(p: &Point2, q: &Point2, lattice: &Lattice) -> bool {
    let (rp, _) = reduce_translations(p, lattice);
    let (rq, _) = reduce_translations(q, lattice);
    if rp == rq {
        return true;
    }
    // σ(x, y) = ((2b − x) mod 2b, (2 − y) mod 2), the half turn at the origin on residues
    let (sigma, _) = reduce_translations(&(-&rp), lattice);
    sigma == rq
}
