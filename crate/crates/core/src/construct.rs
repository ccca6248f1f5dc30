//! Building a wrapping from `(p, r, ±)`.
//!
//! With `r = n/m` in lowest terms, the rectangle `K` spanned by `2·(b·m, n)` and
//! `w = (b·n, −b²·m) / (b²m² + n²)` has area `2b` and side ratio `4m²p`. Writing
//! `4m²p = u/v` in lowest terms, `K` splits into a `u × v` grid of equal squares.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;

use crate::characterize::{b_from_params, CharacterizeError, WrapParams};
use crate::field::{QuadExt, Rational};
use crate::geometry::{make_square, ConvexPolygon, Point2, SquareShape};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub w: WrapParams,
    /// Denominator of `r` (1 when `r = 0`).
    pub m: BigInt,
    /// Numerator of `r`.
    pub n: BigInt,
    /// `u/v = 4m²p` in lowest terms.
    pub u: BigInt,
    pub v: BigInt,
    pub b: QuadExt,
}

impl ConstructionParams {
    pub fn from_params(w: &WrapParams) -> Result<Self, CharacterizeError> {
        let b = b_from_params(w)?;
        let m = w.r.denom().clone();
        let n = w.r.numer().clone();
        let ratio = Rational::from_integer(&m * &m * 4) * &w.p;
        Ok(ConstructionParams {
            w: w.clone(),
            m,
            n,
            u: ratio.numer().clone(),
            v: ratio.denom().clone(),
            b,
        })
    }

    /// Number of squares, `u·v`.
    pub fn square_count(&self) -> BigInt {
        &self.u * &self.v
    }

    /// Checks the coprimality and ratio invariants.
    pub fn is_consistent(&self) -> bool {
        let ratio = Rational::from_integer(&self.m * &self.m * 4) * &self.w.p;
        self.m.gcd(&self.n) == BigInt::from(1)
            && self.u.gcd(&self.v) == BigInt::from(1)
            && ratio == Rational::new(self.u.clone(), self.v.clone())
            && b_from_params(&self.w).as_ref() == Ok(&self.b)
    }

    fn mq(&self) -> QuadExt {
        QuadExt::from_bigint(self.m.clone())
    }

    fn nq(&self) -> QuadExt {
        QuadExt::from_bigint(self.n.clone())
    }

    /// `b²m² + n²`.
    pub fn s(&self) -> QuadExt {
        let bm = &self.b * &self.mq();
        &bm * &bm + self.nq() * self.nq()
    }

    /// Corner `(−bm, −n)` of `K`.
    pub fn anchor(&self) -> Point2 {
        Point2::new(-(&self.b * &self.mq()), -self.nq())
    }

    /// Long side of `K`, `(2bm, 2n)`.
    pub fn long_side(&self) -> Point2 {
        let two = QuadExt::from_integer(2);
        Point2::new(&self.b * &self.mq() * &two, self.nq() * two)
    }

    /// Short side of `K`, `(bn, −b²m) / (b²m² + n²)`.
    pub fn short_side(&self) -> Point2 {
        let s = self.s();
        Point2::new(
            &self.b * &self.nq() / &s,
            -(&self.b * &self.b * self.mq()) / s,
        )
    }
}

/// A finite set of equal squares claimed to wrap the `1 × b` envelope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrappingSpec {
    pub b: QuadExt,
    pub squares: Vec<SquareShape>,
    pub side_sq: QuadExt,
    pub provenance: Option<ConstructionParams>,
}

impl WrappingSpec {
    pub fn new(b: QuadExt, squares: Vec<SquareShape>, side_sq: QuadExt) -> Self {
        WrappingSpec { b, squares, side_sq, provenance: None }
    }
}

/// The rectangle `K`, counterclockwise from `(−bm, −n)`.
pub fn build_rectangle_k(cp: &ConstructionParams) -> ConvexPolygon {
    let a = cp.anchor();
    let l = cp.long_side();
    let w = cp.short_side();
    let a_w = &a + &w;
    let far = &a + &l;
    let far_w = &far + &w;
    ConvexPolygon::new(vec![a, a_w, far_w, far]).expect("rectangle K is non-degenerate for valid params")
}

/// Cuts `K` into a `u × v` grid; output is row-major in `(j, i)` with `i` along the long side.
pub fn grid_cut(cp: &ConstructionParams) -> WrappingSpec {
    let u = QuadExt::from_bigint(cp.u.clone());
    let v = QuadExt::from_bigint(cp.v.clone());
    let step_long = cp.long_side().scale(&u.recip().expect("u > 0"));
    let step_short = cp.short_side().scale(&v.recip().expect("v > 0"));
    let anchor = cp.anchor();
    let (nu, nv) = (to_usize(&cp.u), to_usize(&cp.v));
    let squares: Vec<SquareShape> = (0..nu * nv)
        .into_par_iter()
        .map(|k| {
            let (j, i) = (k / nu, k % nu);
            let corner = &(&anchor + &step_long.scale(&QuadExt::from_integer(i as i64)))
                + &step_short.scale(&QuadExt::from_integer(j as i64));
            make_square(&corner, &step_short).expect("grid step is nonzero")
        })
        .collect();
    let side_sq = step_short.norm_sq();
    WrappingSpec { b: cp.b.clone(), squares, side_sq, provenance: Some(cp.clone()) }
}

fn to_usize(n: &BigInt) -> usize {
    usize::try_from(n).expect("grid dimension fits in memory")
}

pub fn construct_wrapping(w: &WrapParams) -> Result<WrappingSpec, CharacterizeError> {
    let cp = ConstructionParams::from_params(w)?;
    Ok(grid_cut(&cp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characterize::RootSign;
    use crate::field::{rat, rat_int};
    use crate::geometry::polygon_area;

    fn cp(p: Rational, r: Rational, sign: RootSign) -> ConstructionParams {
        ConstructionParams::from_params(&WrapParams::new(p, r, sign).unwrap()).unwrap()
    }

    fn pt(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    #[test]
    fn params_for_examples() {
        let c = cp(rat_int(2), rat_int(1), RootSign::Plus);
        assert_eq!((c.m.clone(), c.n.clone(), c.u.clone(), c.v.clone()), (1.into(), 1.into(), 8.into(), 1.into()));
        assert!(c.is_consistent());
        let c = cp(rat(1, 2), rat_int(0), RootSign::Plus);
        assert_eq!((c.m.clone(), c.n.clone(), c.u.clone(), c.v.clone()), (1.into(), 0.into(), 2.into(), 1.into()));
        let c = cp(rat(5, 6), rat(1, 2), RootSign::Minus);
        // 4·4·5/6 = 40/3
        assert_eq!((c.m.clone(), c.u.clone(), c.v.clone()), (2.into(), 40.into(), 3.into()));
        assert!(c.is_consistent());
    }

    #[test]
    fn axis_aligned_k_for_unit_width() {
        let c = cp(rat(1, 2), rat_int(0), RootSign::Plus);
        let k = build_rectangle_k(&c);
        assert_eq!(k.vertices(), &[pt(-1, 0), pt(-1, -1), pt(1, -1), pt(1, 0)][..]);
    }

    #[test]
    fn tilted_k_area_and_sides() {
        let c = cp(rat_int(2), rat_int(1), RootSign::Plus);
        let k = build_rectangle_k(&c);
        assert_eq!(polygon_area(&k), &c.b + &c.b);
        let v = k.vertices();
        let short = (&v[1] - &v[0]).norm_sq();
        let long = (&v[3] - &v[0]).norm_sq();
        assert_eq!(long, c.s().scale(&rat_int(4)));
        assert_eq!(short, &c.b * &c.b / c.s());
        assert_eq!(&long / &short, QuadExt::from_integer(64));
        // the long side points along (b, 1)
        assert!((&v[3] - &v[0]).cross(&Point2::new(c.b.clone(), QuadExt::one())).is_zero());
    }

    #[test]
    fn heart_identity() {
        for (p, r, s) in [
            (rat_int(2), rat_int(1), RootSign::Plus),
            (rat(7, 3), rat(2, 5), RootSign::Minus),
            (rat(3, 4), rat_int(0), RootSign::Plus),
        ] {
            let c = cp(p, r, s);
            let m = QuadExt::from_bigint(c.m.clone());
            let lhs = c.s();
            let rhs = QuadExt::from_rational(c.w.p.clone() * rat_int(2)) * &m * &m * &c.b;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn grid_examples() {
        let spec = grid_cut(&cp(rat(1, 2), rat_int(0), RootSign::Plus));
        assert_eq!(spec.squares.len(), 2);
        assert_eq!(spec.side_sq, QuadExt::one());
        assert_eq!(spec.squares[0].vertices(), &[pt(-1, 0), pt(-1, -1), pt(0, -1), pt(0, 0)]);

        let spec = grid_cut(&cp(rat_int(2), rat_int(1), RootSign::Plus));
        assert_eq!(spec.squares.len(), 8);
        assert_eq!(spec.side_sq, spec.b.scale(&rat(1, 4)));

        let spec = grid_cut(&cp(rat_int(1), rat_int(1), RootSign::Plus));
        assert_eq!(spec.b, QuadExt::one());
        assert_eq!(spec.squares.len(), 4);
        assert_eq!(spec.side_sq, QuadExt::from_rational(rat(1, 2)));
    }

    #[test]
    fn grid_squares_tile_k() {
        let c = cp(rat(5, 6), rat(1, 2), RootSign::Minus);
        let spec = grid_cut(&c);
        let g = QuadExt::from_bigint(c.square_count());
        assert_eq!(&g * &spec.side_sq, &c.b + &c.b);
        let total: QuadExt = spec.squares.iter().map(|s| polygon_area(&s.to_polygon())).sum();
        assert_eq!(total, polygon_area(&build_rectangle_k(&c)));
        let k = build_rectangle_k(&c);
        for s in &spec.squares {
            assert_eq!(s.side_sq(), &spec.side_sq);
            assert!(s.vertices().iter().all(|v| k.contains(v)));
            SquareShape::from_vertices(s.vertices().clone()).unwrap();
        }
    }

    #[test]
    fn construct_propagates_invalid() {
        let w = WrapParams { p: rat_int(1), r: rat_int(2), sign: RootSign::Plus };
        assert!(construct_wrapping(&w).is_err());
        let w = WrapParams { p: rat_int(3), r: rat_int(1), sign: RootSign::Plus };
        assert_eq!(construct_wrapping(&w).unwrap().squares.len(), 12);
    }
}
