use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::polygon::ConvexPolygon;
use crate::error::{Error, Result};

/// Bounded region of `ℝ^d`. Boxes and polygons are closed, balls are open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Polygon { polygon: ConvexPolygonDoc },
    Union { parts: Vec<Region> },
}

/// Serialized polygon vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygonDoc {
    pub vertices: Vec<[f64; 2]>,
}

impl Region {
    pub fn unit_cube(d: usize) -> Self {
        Region::Box {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let r = Region::Box { lo, hi };
        r.validate()?;
        Ok(r)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let r = Region::Ball { center, radius };
        r.validate()?;
        Ok(r)
    }

    pub fn polygon(p: &ConvexPolygon<f64>) -> Self {
        Region::Polygon {
            polygon: ConvexPolygonDoc {
                vertices: p.vertices().to_vec(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Region::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidInput(
                        "box corners must have equal positive dimension".into(),
                    ));
                }
                if !finite(lo) || !finite(hi) {
                    return Err(Error::InvalidInput("region is unbounded".into()));
                }
                if lo.iter().zip(hi).any(|(a, b)| a > b) {
                    return Err(Error::InvalidInput("box has lo > hi".into()));
                }
            }
            Region::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::InvalidInput("ball center is empty".into()));
                }
                if !finite(center) || !radius.is_finite() {
                    return Err(Error::InvalidInput("region is unbounded".into()));
                }
                if *radius < 0.0 {
                    return Err(Error::InvalidInput("negative radius".into()));
                }
            }
            Region::Polygon { polygon } => {
                if polygon.vertices.iter().any(|v| !finite(v)) {
                    return Err(Error::InvalidInput("region is unbounded".into()));
                }
            }
            Region::Union { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidInput("empty union".into()));
                }
                let d = parts[0].dim();
                for p in parts {
                    p.validate()?;
                    if p.dim() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: p.dim(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
            Region::Polygon { .. } => 2,
            Region::Union { parts } => parts.first().map_or(0, |p| p.dim()),
        }
    }

    pub fn as_polygon(&self) -> Option<ConvexPolygon<f64>> {
        match self {
            Region::Polygon { polygon } => Some(ConvexPolygon::new(polygon.vertices.clone())),
            Region::Box { lo, hi } if lo.len() == 2 => Some(ConvexPolygon::rectangle([lo[0], lo[1]], [hi[0], hi[1]])),
            _ => None,
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Box { lo, hi } => (lo.clone(), hi.clone()),
            Region::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Region::Polygon { polygon } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in &polygon.vertices {
                    for i in 0..2 {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            Region::Union { parts } => {
                let d = self.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for p in parts {
                    let (l, h) = p.bbox();
                    for i in 0..d {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= *v && *v <= *b),
            Region::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 < radius * radius
            }
            Region::Polygon { .. } => {
                let p = self.as_polygon().expect("polygon");
                p.contains(&[x[0], x[1]])
            }
            Region::Union { parts } => parts.iter().any(|p| p.contains(x)),
        }
    }

    /// Lebesgue measure of a box, ball or polygon. Unions report `None`
    /// unless they have a single part.
    pub fn volume(&self) -> Option<f64> {
        match self {
            Region::Box { lo, hi } => Some(lo.iter().zip(hi).map(|(a, b)| b - a).product()),
            Region::Ball { center, radius } => Some(ball_volume(center.len(), *radius)),
            Region::Polygon { .. } => Some(self.as_polygon().expect("polygon").area()),
            Region::Union { parts } if parts.len() == 1 => parts[0].volume(),
            Region::Union { .. } => None,
        }
    }
}

/// Volume of a `d`-dimensional Euclidean ball.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    // V_d = (2π/d) V_{d-2}, V_0 = 1, V_1 = 2
    let mut k = d % 2;
    let mut vd = if k == 0 { 1.0 } else { 2.0 };
    while k + 2 <= d {
        k += 2;
        vd *= 2.0 * std::f64::consts::PI / k as f64;
    }
    vd * r.powi(d as i32)
}

impl FromStr for Region {
    type Err = Error;

    /// `box:x0,y0,x1,y1` (any even count, lo then hi) or `ball:cx,cy,r`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("region literal {s:?} lacks a kind prefix")))?;
        let nums = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match kind.trim() {
            "box" => {
                if nums.is_empty() || nums.len() % 2 != 0 {
                    return Err(Error::Parse(format!("box needs 2d numbers, got {}", nums.len())));
                }
                let d = nums.len() / 2;
                Region::boxed(nums[..d].to_vec(), nums[d..].to_vec())
            }
            "ball" => {
                if nums.len() < 2 {
                    return Err(Error::Parse("ball needs a center and a radius".into()));
                }
                let r = *nums.last().expect("nonempty");
                Region::ball(nums[..nums.len() - 1].to_vec(), r)
            }
            other => Err(Error::Parse(format!("unknown region kind {other:?}"))),
        }
    }
}
