//! Exact convex geometry over `Q(√d)`.
//!
//! Everything downstream (squares, the construction rectangle, folded pieces)
//! is convex, so the only boolean operation needed is half-plane clipping.
//! Intersections of a segment with a line use field operations only, so the
//! results stay in the same quadratic field as the inputs.

use std::ops::{Add, Neg, Sub};

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{rat, QuadExt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("polygon needs at least three non-collinear vertices")]
    Degenerate,
    #[error("polygon is not convex and counterclockwise")]
    NotConvex,
    #[error("square edge vector is zero")]
    ZeroEdge,
    #[error("malformed square: {0}")]
    MalformedSquare(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point2 {
    pub x: QuadExt,
    pub y: QuadExt,
}

impl Point2 {
    pub fn new(x: QuadExt, y: QuadExt) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(x.into(), y.into())
    }

    pub fn origin() -> Self {
        Point2::from_ints(0, 0)
    }

    pub fn dot(&self, o: &Point2) -> QuadExt {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point2) -> QuadExt {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm_sq(&self) -> QuadExt {
        self.dot(self)
    }

    /// Rotation by +90°.
    pub fn perp(&self) -> Point2 {
        Point2::new(-&self.y, self.x.clone())
    }

    pub fn scale(&self, k: &QuadExt) -> Point2 {
        Point2::new(&self.x * k, &self.y * k)
    }

    pub fn midpoint(&self, o: &Point2) -> Point2 {
        let half = QuadExt::from_rational(rat(1, 2));
        (self + o).scale(&half)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl Add<&Point2> for &Point2 {
    type Output = Point2;
    fn add(self, o: &Point2) -> Point2 {
        Point2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub<&Point2> for &Point2 {
    type Output = Point2;
    fn sub(self, o: &Point2) -> Point2 {
        Point2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-&self.x, -&self.y)
    }
}

/// Signed doubled area of the triangle `a, b, c` (positive when counterclockwise).
pub fn orient(a: &Point2, b: &Point2, c: &Point2) -> QuadExt {
    (b - a).cross(&(c - a))
}

/// Closed axis-aligned box `[min.x, max.x] × [min.y, max.y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBox {
    pub min: Point2,
    pub max: Point2,
}

impl BBox {
    pub fn new(min: Point2, max: Point2) -> Self {
        BBox { min, max }
    }

    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Point2>) -> Self {
        let mut it = pts.into_iter();
        let first = it.next().expect("bounding box of no points");
        let (mut x0, mut y0, mut x1, mut y1) =
            (first.x.clone(), first.y.clone(), first.x.clone(), first.y.clone());
        for p in it {
            if p.x < x0 {
                x0 = p.x.clone();
            }
            if p.x > x1 {
                x1 = p.x.clone();
            }
            if p.y < y0 {
                y0 = p.y.clone();
            }
            if p.y > y1 {
                y1 = p.y.clone();
            }
        }
        BBox::new(Point2::new(x0, y0), Point2::new(x1, y1))
    }

    pub fn width(&self) -> QuadExt {
        &self.max.x - &self.min.x
    }

    pub fn height(&self) -> QuadExt {
        &self.max.y - &self.min.y
    }

    pub fn area(&self) -> QuadExt {
        self.width() * self.height()
    }

    /// True when the open interiors of the two boxes meet.
    pub fn overlaps_open(&self, o: &BBox) -> bool {
        self.min.x < o.max.x && o.min.x < self.max.x && self.min.y < o.max.y && o.min.y < self.max.y
    }

    pub fn contains_box(&self, o: &BBox) -> bool {
        self.min.x <= o.min.x && o.max.x <= self.max.x && self.min.y <= o.min.y && o.max.y <= self.max.y
    }

    pub fn grow(&self, dx: &QuadExt, dy: &QuadExt) -> BBox {
        BBox::new(
            Point2::new(&self.min.x - dx, &self.min.y - dy),
            Point2::new(&self.max.x + dx, &self.max.y + dy),
        )
    }

    /// The box as a polygon, or `None` if it has no interior.
    pub fn to_polygon(&self) -> Option<ConvexPolygon> {
        ConvexPolygon::new(vec![
            self.min.clone(),
            Point2::new(self.max.x.clone(), self.min.y.clone()),
            self.max.clone(),
            Point2::new(self.min.x.clone(), self.max.y.clone()),
        ])
        .ok()
    }

    /// The four half-planes `normal·X <= offset` whose intersection is the box.
    pub fn halfplanes(&self) -> [HalfPlane; 4] {
        [
            HalfPlane::new(Point2::from_ints(-1, 0), -&self.min.x),
            HalfPlane::new(Point2::from_ints(1, 0), self.max.x.clone()),
            HalfPlane::new(Point2::from_ints(0, -1), -&self.min.y),
            HalfPlane::new(Point2::from_ints(0, 1), self.max.y.clone()),
        ]
    }
}

/// `{X : normal·X <= offset}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlane {
    pub normal: Point2,
    pub offset: QuadExt,
}

impl HalfPlane {
    pub fn new(normal: Point2, offset: QuadExt) -> Self {
        HalfPlane { normal, offset }
    }

    /// The closed side to the left of the directed line `a → b`.
    pub fn left_of(a: &Point2, b: &Point2) -> Self {
        let e = b - a;
        let normal = Point2::new(e.y.clone(), -&e.x);
        let offset = normal.dot(a);
        HalfPlane { normal, offset }
    }

    pub fn reversed(&self) -> Self {
        HalfPlane { normal: -&self.normal, offset: -&self.offset }
    }

    /// `normal·p − offset`; nonpositive inside.
    pub fn eval(&self, p: &Point2) -> QuadExt {
        self.normal.dot(p) - &self.offset
    }
}

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Drops repeated and collinear vertices, then checks strict convexity
    /// and counterclockwise orientation.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        let vertices = simplify(vertices);
        if vertices.len() < 3 {
            return Err(GeometryError::Degenerate);
        }
        let n = vertices.len();
        for i in 0..n {
            let turn = orient(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
            if !turn.is_positive() {
                return Err(GeometryError::NotConvex);
            }
        }
        // a star winding (total turn 4π) passes the local test; the fan from v0 catches it
        if (1..n - 1).any(|i| !orient(&vertices[0], &vertices[i], &vertices[i + 1]).is_positive()) {
            return Err(GeometryError::NotConvex);
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Point2, &Point2)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> QuadExt {
        polygon_area(self)
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(&self.vertices)
    }

    pub fn map_points(&self, f: impl Fn(&Point2) -> Point2) -> ConvexPolygon {
        // affine maps with positive determinant keep the polygon valid
        ConvexPolygon { vertices: self.vertices.iter().map(f).collect() }
    }

    pub fn translate(&self, t: &Point2) -> ConvexPolygon {
        self.map_points(|p| p + t)
    }

    /// Closed containment test.
    pub fn contains(&self, p: &Point2) -> bool {
        self.edges().all(|(a, b)| !orient(a, b, p).is_negative())
    }

    pub fn centroid_of_vertices(&self) -> Point2 {
        let n = QuadExt::from_integer(self.vertices.len() as i64);
        let sx: QuadExt = self.vertices.iter().map(|p| &p.x).sum();
        let sy: QuadExt = self.vertices.iter().map(|p| &p.y).sum();
        Point2::new(sx / &n, sy / n)
    }
}

fn simplify(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let drop = (0..n).find(|&i| {
            let prev = &pts[(i + n - 1) % n];
            let next = &pts[(i + 1) % n];
            prev == &pts[i] || orient(prev, &pts[i], next).is_zero()
        });
        match drop {
            Some(i) => {
                pts.remove(i);
            }
            None => return pts,
        }
    }
}

/// Shoelace area.
pub fn polygon_area(p: &ConvexPolygon) -> QuadExt {
    let twice: QuadExt = p.edges().map(|(a, b)| a.cross(b)).sum();
    twice.scale(&rat(1, 2))
}

/// `P ∩ {normal·X <= offset}`, or `None` when the result has no interior.
pub fn clip_halfplane(p: &ConvexPolygon, hp: &HalfPlane) -> Option<ConvexPolygon> {
    let vals: Vec<QuadExt> = p.vertices.iter().map(|v| hp.eval(v)).collect();
    if vals.iter().all(|v| !v.is_positive()) {
        return Some(p.clone());
    }
    if vals.iter().all(|v| !v.is_negative()) {
        return None;
    }
    let n = p.vertices.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (si, sj) = (vals[i].signum(), vals[j].signum());
        if si <= 0 {
            out.push(p.vertices[i].clone());
        }
        if (si < 0 && sj > 0) || (si > 0 && sj < 0) {
            let t = &vals[i] / (&vals[i] - &vals[j]);
            let d = &p.vertices[j] - &p.vertices[i];
            out.push(&p.vertices[i] + &d.scale(&t));
        }
    }
    ConvexPolygon::new(out).ok()
}

pub fn clip_to_box(p: &ConvexPolygon, b: &BBox) -> Option<ConvexPolygon> {
    b.halfplanes().iter().try_fold(p.clone(), |acc, hp| clip_halfplane(&acc, hp))
}

pub fn convex_intersection(p: &ConvexPolygon, q: &ConvexPolygon) -> Option<ConvexPolygon> {
    q.edges()
        .try_fold(p.clone(), |acc, (a, b)| clip_halfplane(&acc, &HalfPlane::left_of(a, b)))
}

/// Exact area of `P ∩ Q`; zero iff the interiors are disjoint.
pub fn convex_intersection_area(p: &ConvexPolygon, q: &ConvexPolygon) -> QuadExt {
    convex_intersection(p, q).map_or_else(QuadExt::zero, |r| r.area())
}

/// Separating-axis test: true iff the interiors of `p` and `q` meet.
///
/// Two convex polygons have disjoint interiors exactly when some edge line of
/// one of them has the whole other polygon on its closed outer side.
pub fn interiors_overlap(p: &ConvexPolygon, q: &ConvexPolygon) -> bool {
    fn separated_by_edges_of(p: &ConvexPolygon, q: &ConvexPolygon) -> bool {
        p.edges().any(|(a, b)| q.vertices.iter().all(|v| !orient(a, b, v).is_positive()))
    }
    !(separated_by_edges_of(p, q) || separated_by_edges_of(q, p))
}

/// First pair `(i, j)`, `i < j`, of polygons whose interiors meet, in sweep order
/// over the left edges of their bounding boxes. Deterministic for a given input.
pub fn first_interior_overlap(polys: &[ConvexPolygon]) -> Option<(usize, usize)> {
    let boxes: Vec<BBox> = polys.par_iter().map(ConvexPolygon::bbox).collect();
    let mut order: Vec<usize> = (0..polys.len()).collect();
    order.sort_by(|&a, &b| boxes[a].min.x.cmp(&boxes[b].min.x));
    order.par_iter().enumerate().find_map_first(|(pos, &i)| {
        for &j in &order[pos + 1..] {
            if boxes[j].min.x >= boxes[i].max.x {
                break;
            }
            if boxes[i].overlaps_open(&boxes[j]) && interiors_overlap(&polys[i], &polys[j]) {
                return Some((i.min(j), i.max(j)));
            }
        }
        None
    })
}

/// A square given by four counterclockwise vertices and its squared side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareShape {
    vertices: [Point2; 4],
    side_sq: QuadExt,
}

impl SquareShape {
    /// Validates equal sides and right angles exactly.
    pub fn from_vertices(vertices: [Point2; 4]) -> Result<Self, GeometryError> {
        let e: Vec<Point2> = (0..4).map(|i| &vertices[(i + 1) % 4] - &vertices[i]).collect();
        let side_sq = e[0].norm_sq();
        if side_sq.is_zero() {
            return Err(GeometryError::ZeroEdge);
        }
        if e.iter().any(|v| v.norm_sq() != side_sq) {
            return Err(GeometryError::MalformedSquare("unequal sides"));
        }
        if (0..4).any(|i| !e[i].dot(&e[(i + 1) % 4]).is_zero()) {
            return Err(GeometryError::MalformedSquare("corner is not a right angle"));
        }
        if !e[0].cross(&e[1]).is_positive() {
            return Err(GeometryError::MalformedSquare("vertices are not counterclockwise"));
        }
        Ok(SquareShape { vertices, side_sq })
    }

    pub fn vertices(&self) -> &[Point2; 4] {
        &self.vertices
    }

    pub fn side_sq(&self) -> &QuadExt {
        &self.side_sq
    }

    /// Edge vector `v0 → v1`.
    pub fn edge(&self) -> Point2 {
        &self.vertices[1] - &self.vertices[0]
    }

    pub fn center(&self) -> Point2 {
        self.vertices[0].midpoint(&self.vertices[2])
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon { vertices: self.vertices.to_vec() }
    }

    pub fn translate(&self, t: &Point2) -> SquareShape {
        SquareShape {
            vertices: self.vertices.clone().map(|v| &v + t),
            side_sq: self.side_sq.clone(),
        }
    }

    /// Applies `X ↦ −X + t` (a half turn), keeping counterclockwise order.
    pub fn half_turn(&self, t: &Point2) -> SquareShape {
        SquareShape {
            vertices: self.vertices.clone().map(|v| t - &v),
            side_sq: self.side_sq.clone(),
        }
    }

    /// Vertices sorted by `(x, y)`: equal squares get equal keys regardless of labelling.
    pub fn canonical_key(&self) -> [Point2; 4] {
        let mut v = self.vertices.clone();
        v.sort_by(|a, b| a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y)));
        v
    }
}

/// The square `v0, v0+e, v0+e+e⊥, v0+e⊥` with `e⊥` the +90° rotation of `e`.
pub fn make_square(v0: &Point2, edge: &Point2) -> Result<SquareShape, GeometryError> {
    let side_sq = edge.norm_sq();
    if side_sq.is_zero() {
        return Err(GeometryError::ZeroEdge);
    }
    let p = edge.perp();
    let v1 = v0 + edge;
    let v2 = &v1 + &p;
    let v3 = v0 + &p;
    Ok(SquareShape { vertices: [v0.clone(), v1, v2, v3], side_sq })
}
