//! Dilated cubes `Q_{j,k} = A^j([0,1]^d + k)`: point location, vertex
//! geometry and enumeration of the cubes that meet a region.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::polygon::{ConvexPolygon, Coord};
use super::region::Region;
use crate::error::{Error, Result};
use crate::matrices::{apply_f64, Entries, ExpansiveMatrix, Mode};

/// Convex cell in dimension 1 (interval) or 2 (polygon).
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexPolytope<T = f64> {
    Interval([T; 2]),
    Polygon(ConvexPolygon<T>),
}

impl<T: Coord> ConvexPolytope<T> {
    pub fn volume(&self) -> T {
        match self {
            ConvexPolytope::Interval([a, b]) => b.sub(a).abs(),
            ConvexPolytope::Polygon(p) => p.area(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexPolytope::Interval(_) => 1,
            ConvexPolytope::Polygon(_) => 2,
        }
    }
}

/// One dilated cube, borrowed against its matrix.
#[derive(Debug, Clone)]
pub struct DyadicCube<'a> {
    matrix: &'a ExpansiveMatrix,
    scale: i64,
    index: Vec<i64>,
}

impl<'a> DyadicCube<'a> {
    pub fn new(matrix: &'a ExpansiveMatrix, scale: i64, index: Vec<i64>) -> Result<Self> {
        if index.len() != matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                found: index.len(),
            });
        }
        Ok(DyadicCube { matrix, scale, index })
    }

    pub fn matrix(&self) -> &'a ExpansiveMatrix {
        self.matrix
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn index(&self) -> &[i64] {
        &self.index
    }

    /// `|det A|^j`.
    pub fn volume(&self) -> f64 {
        self.matrix.det_abs_pow(self.scale as f64)
    }

    /// All `2^d` corners `A^j(k + ε)`, `ε ∈ {0,1}^d`.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.index.len();
        let m = self.matrix.power_f64(self.scale);
        (0..1usize << d)
            .map(|mask| {
                let u: Vec<f64> = (0..d)
                    .map(|i| self.index[i] as f64 + ((mask >> i) & 1) as f64)
                    .collect();
                let mut x = vec![0.0; d];
                apply_f64(&m, &u, &mut x);
                x
            })
            .collect()
    }

    pub fn polytope(&self) -> Result<ConvexPolytope<f64>> {
        cube_polytope(&self.matrix.power_f64(self.scale), &self.index)
    }

    /// Exact vertices in rational mode.
    pub fn polytope_exact(&self) -> Option<ConvexPolytope<BigRational>> {
        let p = self.matrix.power(self.scale);
        match p.entries() {
            Entries::Rational(v) => cube_polytope(v, &self.index).ok(),
            Entries::Float(_) => None,
        }
    }

    /// Membership in the half-open cube `A^j([0,1)^d + k)`.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(cube_of_point(self.matrix, self.scale, x)? == self.index)
    }
}

/// Cube `M([0,1]^d + k)` for a row-major `M`, `d ∈ {1, 2}`.
pub fn cube_polytope<T: Coord>(m: &[T], k: &[i64]) -> Result<ConvexPolytope<T>> {
    let int = |n: i64| T::from_f64(n as f64);
    match k.len() {
        1 => {
            let a = m[0].mul(&int(k[0]));
            let b = m[0].mul(&int(k[0] + 1));
            Ok(if a <= b {
                ConvexPolytope::Interval([a, b])
            } else {
                ConvexPolytope::Interval([b, a])
            })
        }
        2 => {
            let corners = [(0, 0), (1, 0), (1, 1), (0, 1)];
            let v = corners
                .iter()
                .map(|&(e0, e1)| {
                    let u0 = int(k[0] + e0);
                    let u1 = int(k[1] + e1);
                    [m[0].mul(&u0).add(&m[1].mul(&u1)), m[2].mul(&u0).add(&m[3].mul(&u1))]
                })
                .collect();
            Ok(ConvexPolytope::Polygon(ConvexPolygon::new(v)))
        }
        d => Err(Error::InvalidInput(format!(
            "cube polytopes are available for d <= 2, got d = {d}"
        ))),
    }
}

/// The `k` with `x ∈ A^j([0,1)^d + k)`, i.e. `floor(A^{-j} x)`. Exact in
/// rational mode.
pub fn cube_of_point(a: &ExpansiveMatrix, j: i64, x: &[f64]) -> Result<Vec<i64>> {
    let d = a.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("point must be finite".into()));
    }
    let minv = a.power(-j);
    match minv.entries() {
        Entries::Rational(m) => {
            let xr: Vec<BigRational> = x.iter().map(|v| BigRational::from_f64(*v)).collect();
            (0..d)
                .map(|i| {
                    let s = (0..d).fold(BigRational::from_f64(0.0), |acc, c| acc + &m[i * d + c] * &xr[c]);
                    s.numer()
                        .div_floor(s.denom())
                        .to_i64()
                        .ok_or_else(|| Error::InvalidInput("cube index overflows i64".into()))
                })
                .collect()
        }
        Entries::Float(_) => Ok(locate_f64(&a.power_f64(-j), x)),
    }
}

/// Floating point location with a precomputed `A^{-j}`.
#[inline]
pub fn locate_f64(minv: &[f64], x: &[f64]) -> Vec<i64> {
    let mut u = vec![0.0; x.len()];
    apply_f64(minv, x, &mut u);
    u.iter().map(|v| v.floor() as i64).collect()
}

/// All `k` whose cube at scale `j` meets `region`. With `closed` the cubes
/// are `A^j([0,1]^d + k)`; otherwise `A^j([0,1)^d + k)`. Supports `d ∈ {1, 2}`.
pub fn cubes_meeting_region(a: &ExpansiveMatrix, j: i64, region: &Region, closed: bool) -> Result<Vec<Vec<i64>>> {
    region.validate()?;
    let d = a.dim();
    if region.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: region.dim(),
        });
    }
    if d > 2 {
        return Err(Error::InvalidInput(format!(
            "cube enumeration against regions is available for d <= 2, got d = {d}"
        )));
    }
    let mut out = match a.mode() {
        Mode::Rational => {
            let m = a.power(-j);
            let fwd = a.power(j);
            match (m.entries(), fwd.entries()) {
                (Entries::Rational(minv), Entries::Rational(mj)) => {
                    meeting::<BigRational>(minv, mj, d, region, closed)?
                }
                _ => unreachable!("rational mode"),
            }
        }
        Mode::Float => meeting::<f64>(&a.power_f64(-j), &a.power_f64(j), d, region, closed)?,
    };
    out.sort();
    out.dedup();
    Ok(out)
}

fn meeting<T: Coord>(minv: &[T], mj: &[T], d: usize, region: &Region, closed: bool) -> Result<Vec<Vec<i64>>> {
    match region {
        Region::Union { parts } => {
            let mut all = Vec::new();
            for p in parts {
                all.extend(meeting(minv, mj, d, p, closed)?);
            }
            Ok(all)
        }
        _ if d == 1 => Ok(meeting_1d(minv, region, closed)),
        Region::Ball { center, radius } => Ok(meeting_ball_2d(minv, mj, [center[0], center[1]], *radius)),
        _ => {
            let poly = region.as_polygon().expect("2-D box or polygon");
            Ok(meeting_polygon_2d(minv, &poly, closed))
        }
    }
}

fn meeting_1d<T: Coord>(minv: &[T], region: &Region, closed: bool) -> Vec<Vec<i64>> {
    // closed [u,v] (box) or open (u,v) (ball) in unit coordinates
    let (lo, hi, open) = match region {
        Region::Box { lo, hi } => (lo[0], hi[0], false),
        Region::Ball { center, radius } => (center[0] - radius, center[0] + radius, true),
        _ => unreachable!("1-D regions are boxes or balls"),
    };
    let s = &minv[0];
    let mut u = s.mul(&T::from_f64(lo));
    let mut v = s.mul(&T::from_f64(hi));
    if u > v {
        std::mem::swap(&mut u, &mut v);
    }
    if open && u >= v {
        return Vec::new();
    }
    let k0 = u.to_f64().floor() as i64 - 1;
    let k1 = v.to_f64().floor() as i64 + 1;
    (k0..=k1)
        .filter(|&k| {
            let a = T::from_f64(k as f64);
            let b = T::from_f64((k + 1) as f64);
            if open {
                a < v && b > u
            } else if closed {
                a <= v && b >= u
            } else {
                a <= v && b > u
            }
        })
        .map(|k| vec![k])
        .collect()
}

fn meeting_polygon_2d<T: Coord>(minv: &[T], poly: &ConvexPolygon<f64>, closed: bool) -> Vec<Vec<i64>> {
    let exact: ConvexPolygon<T> = ConvexPolygon::new(
        poly.vertices()
            .iter()
            .map(|v| [T::from_f64(v[0]), T::from_f64(v[1])])
            .collect(),
    );
    let t = exact.transform(minv, &[T::zero(), T::zero()]);
    if t.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = t.bbox();
    let (k0x, k1x) = (lo[0].to_f64().floor() as i64 - 1, hi[0].to_f64().floor() as i64 + 1);
    let (k0y, k1y) = (lo[1].to_f64().floor() as i64 - 1, hi[1].to_f64().floor() as i64 + 1);
    let mut out = Vec::new();
    for kx in k0x..=k1x {
        for ky in k0y..=k1y {
            let a = [T::from_f64(kx as f64), T::from_f64(ky as f64)];
            let b = [T::from_f64((kx + 1) as f64), T::from_f64((ky + 1) as f64)];
            let cell = ConvexPolygon::rectangle(a.clone(), b.clone());
            let hit = if closed {
                cell.intersects(&t)
            } else {
                // C = T ∩ closed cell; a convex C misses [a, b) only if it
                // lies on the far edges x = b0 or y = b1
                let c = t.intersection(&cell);
                !c.is_empty()
                    && c.min_along(&[T::one(), T::zero()]) < b[0]
                    && c.min_along(&[T::zero(), T::one()]) < b[1]
            };
            if hit {
                out.push(vec![kx, ky]);
            }
        }
    }
    out
}

fn meeting_ball_2d<T: Coord>(minv: &[T], mj: &[T], center: [f64; 2], r: f64) -> Vec<Vec<i64>> {
    // An open ball meets a closed cube iff it meets the cube's interior, so
    // the closed and half-open answers agree.
    let square = ConvexPolygon::rectangle(
        [T::from_f64(center[0] - r), T::from_f64(center[1] - r)],
        [T::from_f64(center[0] + r), T::from_f64(center[1] + r)],
    );
    let t = square.transform(minv, &[T::zero(), T::zero()]);
    let (lo, hi) = t.bbox();
    let mf: Vec<f64> = mj.iter().map(|v| v.to_f64()).collect();
    let mut out = Vec::new();
    for kx in lo[0].to_f64().floor() as i64 - 1..=hi[0].to_f64().floor() as i64 + 1 {
        for ky in lo[1].to_f64().floor() as i64 - 1..=hi[1].to_f64().floor() as i64 + 1 {
            if let Ok(ConvexPolytope::Polygon(q)) = cube_polytope(&mf, &[kx, ky]) {
                if q.distance_to(&center) < r {
                    out.push(vec![kx, ky]);
                }
            }
        }
    }
    out
}
