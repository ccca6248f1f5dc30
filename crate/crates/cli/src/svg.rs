//! Deterministic SVG output.
//!
//! Coordinates are exact field elements rounded half-up to a fixed number of
//! decimal places; the rounding is presentation only. The y axis is flipped so
//! that the picture has the usual mathematical orientation.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use wrapkit::field::{rat, QuadExt, Rational};
use wrapkit::geometry::{BBox, Point2};

pub const DEFAULT_PRECISION: u32 = 12;

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("nothing to draw")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// A polygon to draw, colored by `source`.
#[derive(Clone, Debug)]
pub struct Shape {
    pub points: Vec<Point2>,
    pub source: usize,
}

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Decimal places for every emitted coordinate.
    pub precision: u32,
    /// Draw the lattice nodes `(m·b, n)` inside the picture.
    pub lattice: Option<QuadExt>,
    /// A dashed rectangle, e.g. the fundamental domain or a window.
    pub outline: Option<BBox>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { precision: DEFAULT_PRECISION, lattice: None, outline: None }
    }
}

/// `x` rounded half-up to `precision` decimal places, without trailing zeros.
pub fn decimal(x: &QuadExt, precision: u32) -> String {
    let scale = BigInt::from(10u32).pow(precision);
    let scaled = x * &QuadExt::from_bigint(scale.clone()) + QuadExt::from_rational(rat(1, 2));
    fixed(&scaled.floor(), &scale, precision)
}

fn fixed(n: &BigInt, scale: &BigInt, precision: u32) -> String {
    let sign = if n.is_negative() { "-" } else { "" };
    let n = n.abs();
    let (int, frac) = (&n / scale, &n % scale);
    if frac.is_zero() {
        return format!("{sign}{int}");
    }
    let digits = format!("{frac:0>width$}", width = precision as usize);
    format!("{sign}{int}.{}", digits.trim_end_matches('0'))
}

fn round_outward(x: &QuadExt, precision: u32, up: bool) -> QuadExt {
    let scale = BigInt::from(10u32).pow(precision);
    let s = x * &QuadExt::from_bigint(scale.clone());
    let n = if up { s.ceil() } else { s.floor() };
    QuadExt::from_rational(Rational::new(n, scale))
}

fn hue(source: usize) -> usize {
    (source * 137) % 360
}

struct Canvas {
    precision: u32,
}

impl Canvas {
    fn x(&self, v: &QuadExt) -> String {
        decimal(v, self.precision)
    }

    fn y(&self, v: &QuadExt) -> String {
        decimal(&-v, self.precision)
    }

    fn points(&self, pts: &[Point2]) -> String {
        pts.iter().map(|p| format!("{},{}", self.x(&p.x), self.y(&p.y))).collect::<Vec<_>>().join(" ")
    }
}

pub fn render_svg(shapes: &[Shape], options: &SvgOptions) -> Result<String, SvgError> {
    if shapes.is_empty() {
        return Err(SvgError::Empty);
    }
    let mut all: Vec<&Point2> = shapes.iter().flat_map(|s| s.points.iter()).collect();
    if let Some(o) = &options.outline {
        all.push(&o.min);
        all.push(&o.max);
    }
    let bb = BBox::of_points(all.iter().copied());
    let extent = bb.width().max(bb.height());
    let pad = extent.scale(&rat(1, 20));
    let stroke = extent.scale(&rat(1, 400));
    let prec = options.precision;
    let min_x = round_outward(&(&bb.min.x - &pad), prec, false);
    let max_x = round_outward(&(&bb.max.x + &pad), prec, true);
    // flipped: the top edge of the picture is −max_y
    let top = round_outward(&-(&bb.max.y + &pad), prec, false);
    let bottom = round_outward(&-(&bb.min.y - &pad), prec, true);
    let c = Canvas { precision: prec };

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
        decimal(&min_x, prec),
        decimal(&top, prec),
        decimal(&(&max_x - &min_x), prec),
        decimal(&(&bottom - &top), prec),
    )
    .unwrap();
    let sw = decimal(&stroke, prec);
    writeln!(out, r#"<g stroke="black" stroke-width="{sw}" stroke-linejoin="round">"#).unwrap();
    for s in shapes {
        writeln!(
            out,
            r#"<polygon data-source="{}" fill="hsl({},60%,75%)" points="{}"/>"#,
            s.source,
            hue(s.source),
            c.points(&s.points)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();

    if let Some(o) = &options.outline {
        let corners = [
            o.min.clone(),
            Point2::new(o.max.x.clone(), o.min.y.clone()),
            o.max.clone(),
            Point2::new(o.min.x.clone(), o.max.y.clone()),
        ];
        writeln!(
            out,
            r#"<polygon class="outline" fill="none" stroke="red" stroke-width="{}" stroke-dasharray="{} {}" points="{}"/>"#,
            decimal(&(&stroke + &stroke), prec),
            decimal(&stroke.scale(&rat(8, 1)), prec),
            decimal(&stroke.scale(&rat(4, 1)), prec),
            c.points(&corners)
        )
        .unwrap();
    }

    if let Some(b) = &options.lattice {
        let r = decimal(&stroke.scale(&rat(3, 1)), prec);
        let to_i64 = |n: BigInt| n.to_i64().expect("picture spans a modest number of lattice cells");
        let (m0, m1) = (to_i64((&bb.min.x / b).ceil()), to_i64((&bb.max.x / b).floor()));
        let (n0, n1) = (to_i64(bb.min.y.ceil()), to_i64(bb.max.y.floor()));
        writeln!(out, r#"<g class="lattice" fill="black">"#).unwrap();
        for n in n0..=n1 {
            for m in m0..=m1 {
                let x = b * &QuadExt::from_integer(m);
                let y = QuadExt::from_integer(n);
                writeln!(out, r#"<circle cx="{}" cy="{}" r="{r}"/>"#, c.x(&x), c.y(&y)).unwrap();
            }
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

pub fn write_svg(path: &Path, shapes: &[Shape], options: &SvgOptions) -> Result<(), SvgError> {
    let text = render_svg(shapes, options)?;
    std::fs::write(path, text).map_err(|source| SvgError::Io { path: path.display().to_string(), source })
}
