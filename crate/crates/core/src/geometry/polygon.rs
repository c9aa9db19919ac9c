//! Convex polygons over exact or floating coordinates: half-plane clipping,
//! separating-axis intersection and shoelace area.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::matrices::{rational_to_f64, Entries, Matrix};

/// Coordinate field used by the polygon kernels.
pub trait Coord: Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    /// Exact for rationals (every finite double is a dyadic rational).
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_exact() -> bool;
    /// Row-major entries of `m` in this field.
    fn matrix_entries(m: &Matrix) -> Vec<Self>;

    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
    fn abs(&self) -> Self {
        if *self < Self::zero() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl Coord for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_exact() -> bool {
        false
    }
    fn matrix_entries(m: &Matrix) -> Vec<Self> {
        m.to_f64_vec()
    }
}

impl Coord for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite coordinate")
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_exact() -> bool {
        true
    }
    fn matrix_entries(m: &Matrix) -> Vec<Self> {
        match m.entries() {
            Entries::Rational(v) => v.clone(),
            Entries::Float(v) => v.iter().map(|x| Self::from_f64(*x)).collect(),
        }
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

pub type Point<T> = [T; 2];

/// Closed half-plane `{x : n·x <= c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlane<T> {
    pub normal: Point<T>,
    pub offset: T,
}

impl<T: Coord> HalfPlane<T> {
    pub fn eval(&self, p: &Point<T>) -> T {
        self.normal[0]
            .mul(&p[0])
            .add(&self.normal[1].mul(&p[1]))
            .sub(&self.offset)
    }

    /// The closed complement `{x : n·x >= c}`.
    pub fn flipped(&self) -> Self {
        HalfPlane {
            normal: [self.normal[0].neg(), self.normal[1].neg()],
            offset: self.offset.neg(),
        }
    }
}

/// Convex polygon with counterclockwise vertices. May be degenerate
/// (fewer than three vertices or zero area) after clipping.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon<T = f64> {
    vertices: Vec<Point<T>>,
}

fn cross<T: Coord>(o: &Point<T>, a: &Point<T>, b: &Point<T>) -> T {
    let ax = a[0].sub(&o[0]);
    let ay = a[1].sub(&o[1]);
    let bx = b[0].sub(&o[0]);
    let by = b[1].sub(&o[1]);
    ax.mul(&by).sub(&ay.mul(&bx))
}

impl<T: Coord> ConvexPolygon<T> {
    /// Takes the vertices of a convex polygon in either orientation.
    pub fn new(mut vertices: Vec<Point<T>>) -> Self {
        vertices.dedup();
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let p = ConvexPolygon { vertices };
        if p.signed_area2() < T::zero() {
            let mut v = p.vertices;
            v.reverse();
            ConvexPolygon { vertices: v }
        } else {
            p
        }
    }

    pub fn rectangle(lo: Point<T>, hi: Point<T>) -> Self {
        ConvexPolygon::new(vec![
            [lo[0].clone(), lo[1].clone()],
            [hi[0].clone(), lo[1].clone()],
            [hi[0].clone(), hi[1].clone()],
            [lo[0].clone(), hi[1].clone()],
        ])
    }

    pub fn unit_square() -> Self {
        Self::rectangle([T::zero(), T::zero()], [T::one(), T::one()])
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn signed_area2(&self) -> T {
        let n = self.vertices.len();
        let mut s = T::zero();
        if n < 3 {
            return s;
        }
        for i in 1..n - 1 {
            s = s.add(&cross(&self.vertices[0], &self.vertices[i], &self.vertices[i + 1]));
        }
        s
    }

    pub fn area(&self) -> T {
        self.signed_area2().div(&T::one().add(&T::one()))
    }

    pub fn area_f64(&self) -> f64 {
        self.area().to_f64()
    }

    /// Interior of `self` is the left side of every edge.
    pub fn half_planes(&self) -> Vec<HalfPlane<T>> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = &self.vertices[i];
                let b = &self.vertices[(i + 1) % n];
                let dx = b[0].sub(&a[0]);
                let dy = b[1].sub(&a[1]);
                let normal = [dy.clone(), dx.neg()];
                let offset = normal[0].mul(&a[0]).add(&normal[1].mul(&a[1]));
                HalfPlane { normal, offset }
            })
            .collect()
    }

    /// Sutherland–Hodgman clip against one closed half-plane.
    pub fn clip(&self, h: &HalfPlane<T>) -> ConvexPolygon<T> {
        let n = self.vertices.len();
        if n == 0 {
            return self.clone();
        }
        let vals: Vec<T> = self.vertices.iter().map(|v| h.eval(v)).collect();
        let zero = T::zero();
        if vals.iter().all(|s| *s <= zero) {
            return self.clone();
        }
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (s, e) = (&self.vertices[i], &self.vertices[j]);
            let (ds, de) = (&vals[i], &vals[j]);
            let s_in = *ds <= zero;
            let e_in = *de <= zero;
            if s_in {
                out.push(s.clone());
            }
            if s_in != e_in && *ds != zero && *de != zero {
                let t = ds.div(&ds.sub(de));
                out.push([s[0].add(&e[0].sub(&s[0]).mul(&t)), s[1].add(&e[1].sub(&s[1]).mul(&t))]);
            }
        }
        ConvexPolygon::new_unchecked(out)
    }

    fn new_unchecked(mut vertices: Vec<Point<T>>) -> Self {
        vertices.dedup();
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        ConvexPolygon { vertices }
    }

    /// Splits into the parts inside and outside `h`.
    pub fn split(&self, h: &HalfPlane<T>) -> (ConvexPolygon<T>, ConvexPolygon<T>) {
        (self.clip(h), self.clip(&h.flipped()))
    }

    pub fn intersection(&self, other: &ConvexPolygon<T>) -> ConvexPolygon<T> {
        let mut r = self.clone();
        for h in other.half_planes() {
            if r.is_empty() {
                break;
            }
            r = r.clip(&h);
        }
        r
    }

    /// `self \ other` as disjoint convex pieces (boundaries shared).
    pub fn difference(&self, other: &ConvexPolygon<T>) -> Vec<ConvexPolygon<T>> {
        let mut rest = self.clone();
        let mut out = Vec::new();
        for h in other.half_planes() {
            let (inside, outside) = rest.split(&h);
            if outside.has_area() {
                out.push(outside);
            }
            rest = inside;
            if !rest.has_area() {
                break;
            }
        }
        out
    }

    /// Positive area. For floats, slivers below a relative threshold are
    /// treated as degenerate.
    pub fn has_area(&self) -> bool {
        if self.vertices.len() < 3 {
            return false;
        }
        let a = self.area();
        if T::is_exact() {
            return a > T::zero();
        }
        let (lo, hi) = self.bbox();
        let w = hi[0].sub(&lo[0]).to_f64().abs();
        let h = hi[1].sub(&lo[1]).to_f64().abs();
        let s = w.max(h);
        a.to_f64() > 1e-13 * s * s
    }

    pub fn bbox(&self) -> (Point<T>, Point<T>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for i in 0..2 {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        (lo, hi)
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point<T>) -> bool {
        if self.vertices.len() < 3 {
            return false;
        }
        self.half_planes().iter().all(|h| h.eval(p) <= T::zero())
    }

    /// Whether the closed polygons share a point (separating-axis test).
    pub fn intersects(&self, other: &ConvexPolygon<T>) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        let axes = self.axes().chain(other.axes()).collect::<Vec<_>>();
        for ax in axes {
            let (a0, a1) = self.project(&ax);
            let (b0, b1) = other.project(&ax);
            if a1 < b0 || b1 < a0 {
                return false;
            }
        }
        true
    }

    fn axes(&self) -> impl Iterator<Item = Point<T>> + '_ {
        let n = self.vertices.len();
        (0..n).flat_map(move |i| {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            let dx = b[0].sub(&a[0]);
            let dy = b[1].sub(&a[1]);
            // edge normal, plus the edge itself to cover degenerate segments
            [[dy.clone(), dx.neg()], [dx, dy]]
        })
    }

    fn project(&self, ax: &Point<T>) -> (T, T) {
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for v in &self.vertices {
            let d = v[0].mul(&ax[0]).add(&v[1].mul(&ax[1]));
            if lo.as_ref().is_none_or(|l| d < *l) {
                lo = Some(d.clone());
            }
            if hi.as_ref().is_none_or(|h| d > *h) {
                hi = Some(d);
            }
        }
        (lo.expect("nonempty"), hi.expect("nonempty"))
    }

    /// Image under `x ↦ M x + t` for a row-major 2x2 `M`.
    pub fn transform(&self, m: &[T], t: &Point<T>) -> ConvexPolygon<T> {
        ConvexPolygon::new(
            self.vertices
                .iter()
                .map(|v| {
                    [
                        m[0].mul(&v[0]).add(&m[1].mul(&v[1])).add(&t[0]),
                        m[2].mul(&v[0]).add(&m[3].mul(&v[1])).add(&t[1]),
                    ]
                })
                .collect(),
        )
    }

    pub fn to_f64(&self) -> ConvexPolygon<f64> {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| [v[0].to_f64(), v[1].to_f64()]).collect(),
        }
    }

    pub fn centroid_f64(&self) -> [f64; 2] {
        let n = self.vertices.len() as f64;
        let mut c = [0.0, 0.0];
        for v in &self.vertices {
            c[0] += v[0].to_f64() / n;
            c[1] += v[1].to_f64() / n;
        }
        c
    }

    /// Smallest value of the linear functional `n·x` over the polygon.
    pub fn min_along(&self, n: &Point<T>) -> T {
        self.project(n).0
    }
}

impl ConvexPolygon<f64> {
    /// Exact rational copy of a float polygon.
    pub fn to_rational(&self) -> ConvexPolygon<BigRational> {
        ConvexPolygon {
            vertices: self
                .vertices
                .iter()
                .map(|v| [BigRational::from_f64(v[0]), BigRational::from_f64(v[1])])
                .collect(),
        }
    }

    /// Euclidean distance from `p` to the closed polygon (0 inside).
    pub fn distance_to(&self, p: &[f64; 2]) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len2 = dx * dx + dy * dy;
            let t = if len2 > 0.0 {
                (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (qx, qy) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
            best = best.min((qx * qx + qy * qy).sqrt());
        }
        best
    }
}
