//! Planar Euclidean primitives.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::error::Error;

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Linear interpolation `self + t (other - self)` without range checks.
    pub fn lerp(&self, other: Point, t: f64) -> Point {
        Point::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Euclidean distance.
pub fn dist(p: Point, q: Point) -> f64 {
    (p - q).norm()
}

/// A straight segment between `b` and `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub b: Point,
    pub c: Point,
}

impl Segment {
    pub const fn new(b: Point, c: Point) -> Self {
        Segment { b, c }
    }

    pub fn length(&self) -> f64 {
        dist(self.b, self.c)
    }

    /// Point at parameter `t` in `[0, 1]`; `t = 0` is `b`, `t = 1` is `c`.
    pub fn point_at(&self, t: f64) -> Result<Point, Error> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParameterOutOfRange(t));
        }
        Ok(self.b.lerp(self.c, t))
    }

    /// Same as [`Segment::point_at`] but clamps `t` into the unit interval.
    pub fn point_at_clamped(&self, t: f64) -> Point {
        self.b.lerp(self.c, t.clamp(0.0, 1.0))
    }

    pub fn midpoint(&self) -> Point {
        self.b.lerp(self.c, 0.5)
    }

    /// Closest point of the segment to `p`.
    pub fn project(&self, p: Point) -> Point {
        let d = self.c - self.b;
        let len2 = d.x * d.x + d.y * d.y;
        if len2 == 0.0 {
            return self.b;
        }
        let t = ((p.x - self.b.x) * d.x + (p.y - self.b.y) * d.y) / len2;
        self.point_at_clamped(t)
    }

    pub fn dist_to_point(&self, p: Point) -> f64 {
        dist(self.project(p), p)
    }

    /// Minimum distance between any point of `self` and any point of `other`.
    pub fn dist_to_segment(&self, other: &Segment) -> f64 {
        if self.intersects(other) {
            return 0.0;
        }
        self.dist_to_point(other.b)
            .min(self.dist_to_point(other.c))
            .min(other.dist_to_point(self.b))
            .min(other.dist_to_point(self.c))
    }

    fn intersects(&self, other: &Segment) -> bool {
        fn orient(a: Point, b: Point, c: Point) -> f64 {
            (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
        }
        let d1 = orient(other.b, other.c, self.b);
        let d2 = orient(other.b, other.c, self.c);
        let d3 = orient(self.b, self.c, other.b);
        let d4 = orient(self.b, self.c, other.c);
        ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
            && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    }
}

/// Length of a segment; same as [`Segment::length`].
pub fn edge_length(s: &Segment) -> f64 {
    s.length()
}

/// Point on a segment at parameter `t`, rejecting `t` outside `[0, 1]`.
pub fn point_on_segment(s: &Segment, t: f64) -> Result<Point, Error> {
    s.point_at(t)
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn new(min: Point, max: Point) -> Self {
        BBox { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    /// Smallest box containing every point of the iterator; `None` when empty.
    pub fn enclosing(points: impl IntoIterator<Item = Point>) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut bb = BBox::new(first, first);
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn diameter(&self) -> f64 {
        dist(self.min, self.max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dist_examples() {
        assert_eq!(dist(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        assert_eq!(dist(Point::new(1.0, 1.0), Point::new(1.0, 1.0)), 0.0);
        let d = dist(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn point_on_segment_examples() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        assert_eq!(point_on_segment(&s, 0.0).unwrap(), Point::new(0.0, 0.0));
        assert_eq!(point_on_segment(&s, 0.5).unwrap(), Point::new(5.0, 0.0));
        let s = Segment::new(Point::new(2.0, 2.0), Point::new(2.0, 8.0));
        assert_eq!(point_on_segment(&s, 0.25).unwrap(), Point::new(2.0, 3.5));
        assert!(point_on_segment(&s, 1.5).is_err());
        assert!(point_on_segment(&s, -0.1).is_err());
    }

    #[test]
    fn edge_length_examples() {
        let seg = |a: (f64, f64), b: (f64, f64)| Segment::new(Point::new(a.0, a.1), Point::new(b.0, b.1));
        assert_eq!(edge_length(&seg((0.0, 0.0), (3.0, 4.0))), 5.0);
        assert_eq!(edge_length(&seg((1.0, 1.0), (1.0, 1.0))), 0.0);
        assert_eq!(edge_length(&seg((0.0, 0.0), (0.0, 7.0))), 7.0);
    }

    #[test]
    fn segment_distances() {
        let a = Segment::new(Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        let b = Segment::new(Point::new(5.0, 1.0), Point::new(5.0, 2.0));
        assert!((a.dist_to_segment(&b) - 1.0).abs() < 1e-12);
        let c = Segment::new(Point::new(5.0, -1.0), Point::new(5.0, 2.0));
        assert_eq!(a.dist_to_segment(&c), 0.0);
    }

    fn pt() -> impl Strategy<Value = Point> {
        (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn dist_symmetric(p in pt(), q in pt()) {
            prop_assert_eq!(dist(p, q), dist(q, p));
        }

        #[test]
        fn triangle_inequality(p in pt(), q in pt(), r in pt()) {
            prop_assert!(dist(p, r) <= dist(p, q) + dist(q, r) + 1e-9);
        }

        #[test]
        fn sub_segment_length(b in pt(), c in pt(), s in 0.0..=1.0f64, t in 0.0..=1.0f64) {
            let seg = Segment::new(b, c);
            let sub = Segment::new(seg.point_at(s).unwrap(), seg.point_at(t).unwrap());
            prop_assert!((edge_length(&sub) - (s - t).abs() * edge_length(&seg)).abs() < 1e-9);
        }
    }
}
