//! Exact 2-D overlay of convex polygons by incremental half-plane clipping.
//!
//! Every atomic piece is a convex polygon labeled with the set of inputs that
//! contain it. Pieces with equal labels are grouped into cells.

use std::collections::BTreeMap;

use super::polygon::{ConvexPolygon, Coord};
use crate::error::{Error, Result};

pub const DEFAULT_OVERLAY_BUDGET: usize = 4096;

/// Pieces allowed per input polygon before the overlay gives up.
const PIECES_PER_POLYGON: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct OverlayCell<T = f64> {
    pub pieces: Vec<ConvexPolygon<T>>,
    /// Sorted indices of the input polygons containing this cell.
    pub members: Vec<usize>,
}

impl<T: Coord> OverlayCell<T> {
    pub fn area(&self) -> T {
        self.pieces.iter().fold(T::zero(), |s, p| s.add(&p.area()))
    }
}

struct Piece<T> {
    poly: ConvexPolygon<T>,
    bbox: ([T; 2], [T; 2]),
    members: Vec<usize>,
}

fn boxes_overlap<T: Coord>(a: &([T; 2], [T; 2]), b: &([T; 2], [T; 2])) -> bool {
    a.0[0] <= b.1[0] && b.0[0] <= a.1[0] && a.0[1] <= b.1[1] && b.0[1] <= a.1[1]
}

/// Partition of the union of `polygons` into cells labeled by membership.
/// Degenerate inputs are ignored. Fails with [`Error::Capacity`] when the
/// input count exceeds `budget` or the piece count explodes.
pub fn overlay_cells_2d<T: Coord>(polygons: &[ConvexPolygon<T>], budget: usize) -> Result<Vec<OverlayCell<T>>> {
    if polygons.len() > budget {
        return Err(Error::Capacity {
            what: "overlay polygons",
            count: polygons.len(),
            budget,
        });
    }
    let piece_budget = budget.max(1) * PIECES_PER_POLYGON;
    let mut pieces: Vec<Piece<T>> = Vec::new();
    let mut inputs: Vec<(usize, ([T; 2], [T; 2]))> = Vec::new();
    for (i, p) in polygons.iter().enumerate() {
        if !p.has_area() {
            continue;
        }
        let pb = p.bbox();
        let hps = p.half_planes();
        let mut next = Vec::with_capacity(pieces.len() + 4);
        for piece in pieces.drain(..) {
            if !boxes_overlap(&piece.bbox, &pb) {
                next.push(piece);
                continue;
            }
            let mut rest = piece.poly;
            let mut outside = Vec::new();
            for h in &hps {
                let (inside, out) = rest.split(h);
                if out.has_area() {
                    outside.push(out);
                }
                rest = inside;
                if !rest.has_area() {
                    break;
                }
            }
            if rest.has_area() {
                let mut m = piece.members.clone();
                m.push(i);
                next.push(Piece {
                    bbox: rest.bbox(),
                    poly: rest,
                    members: m,
                });
            }
            for o in outside {
                next.push(Piece {
                    bbox: o.bbox(),
                    poly: o,
                    members: piece.members.clone(),
                });
            }
        }
        // part of p not covered by earlier inputs
        let mut fresh = vec![p.clone()];
        for (k, kb) in &inputs {
            if fresh.is_empty() {
                break;
            }
            if !boxes_overlap(kb, &pb) {
                continue;
            }
            let mut nf = Vec::new();
            for f in fresh {
                nf.extend(f.difference(&polygons[*k]));
            }
            fresh = nf;
        }
        for f in fresh {
            next.push(Piece {
                bbox: f.bbox(),
                poly: f,
                members: vec![i],
            });
        }
        pieces = next;
        inputs.push((i, pb));
        if pieces.len() > piece_budget {
            return Err(Error::Capacity {
                what: "overlay pieces",
                count: pieces.len(),
                budget: piece_budget,
            });
        }
    }
    let mut cells: BTreeMap<Vec<usize>, Vec<ConvexPolygon<T>>> = BTreeMap::new();
    for p in pieces {
        cells.entry(p.members).or_default().push(p.poly);
    }
    Ok(cells
        .into_iter()
        .map(|(members, pieces)| OverlayCell { pieces, members })
        .collect())
}
