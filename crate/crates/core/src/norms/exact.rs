//! Exact integration of piecewise constant stacks over `d ∈ {1, 2}`.

use std::collections::HashMap;

use num_rational::BigRational;

use super::sequence::ExplicitSequence;
use crate::error::{Error, Result};
use crate::geometry::{cube_polytope, overlay_cells_2d, ConvexPolytope, Coord};
use crate::matrices::{ExpansiveMatrix, Mode};
use crate::orbit::SpaceParams;

/// One stored coefficient with its scale weight folded in:
/// `w = |det A|^{-j(α+1/2)} |c_{j,k}|`.
#[derive(Debug, Clone)]
pub(crate) struct Atom {
    pub j: i64,
    pub k: Vec<i64>,
    pub w: f64,
}

pub(crate) fn atoms(e: &ExplicitSequence, s: &SpaceParams) -> Vec<Atom> {
    let shift = s.alpha + 0.5;
    e.iter()
        .map(|(j, k, v)| Atom {
            j,
            k: k.clone(),
            w: s.matrix.det_abs_pow(-(j as f64) * shift) * v.norm(),
        })
        .filter(|a| a.w > 0.0)
        .collect()
}

/// How overlapping atoms combine on a cell.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Combine {
    /// `Σ w^q`
    PowerSum(f64),
    Max,
}

impl Combine {
    pub fn new(q: f64) -> Self {
        if q.is_infinite() {
            Combine::Max
        } else {
            Combine::PowerSum(q)
        }
    }

    #[inline]
    pub fn lift(self, w: f64) -> f64 {
        match self {
            Combine::PowerSum(q) => w.powf(q),
            Combine::Max => w,
        }
    }

    #[inline]
    pub fn join(self, acc: f64, lifted: f64) -> f64 {
        match self {
            Combine::PowerSum(_) => acc + lifted,
            Combine::Max => acc.max(lifted),
        }
    }

    /// Stack value from the combined quantity.
    #[inline]
    pub fn root(self, v: f64) -> f64 {
        match self {
            Combine::PowerSum(q) => v.powf(1.0 / q),
            Combine::Max => v,
        }
    }
}

/// A piece of the stack: a region of `ℝ^d` with its measure and the
/// combined value of every atom covering it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cell {
    pub measure: f64,
    pub combined: f64,
}

fn forward<T: Coord>(a: &ExpansiveMatrix, j: i64) -> Vec<T> {
    T::matrix_entries(&a.power(j))
}

pub(crate) fn atom_polytope<T: Coord>(a: &ExpansiveMatrix, atom: &Atom) -> Result<ConvexPolytope<T>> {
    cube_polytope(&forward::<T>(a, atom.j), &atom.k)
}

fn cells_1d<T: Coord>(pieces: &[(ConvexPolytope<T>, f64)], comb: Combine) -> Vec<Cell> {
    let ivs: Vec<(T, T, f64)> = pieces
        .iter()
        .map(|(p, w)| match p {
            ConvexPolytope::Interval([lo, hi]) => (lo.clone(), hi.clone(), comb.lift(*w)),
            ConvexPolytope::Polygon(_) => unreachable!("1-D piece"),
        })
        .filter(|(lo, hi, _)| hi > lo)
        .collect();
    let mut ends: Vec<T> = ivs.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
    ends.sort_by(|x, y| x.partial_cmp(y).expect("ordered coordinates"));
    ends.dedup();
    if ends.len() < 2 {
        return Vec::new();
    }
    let find = |x: &T| {
        ends.binary_search_by(|e| e.partial_cmp(x).expect("ordered"))
            .expect("endpoint")
    };
    let mut vals = vec![0.0f64; ends.len() - 1];
    let mut hit = vec![false; ends.len() - 1];
    for (lo, hi, v) in &ivs {
        for i in find(lo)..find(hi) {
            vals[i] = comb.join(vals[i], *v);
            hit[i] = true;
        }
    }
    (0..vals.len())
        .filter(|&i| hit[i])
        .map(|i| Cell {
            measure: ends[i + 1].sub(&ends[i]).to_f64(),
            combined: vals[i],
        })
        .collect()
}

fn cells_2d<T: Coord>(pieces: Vec<(ConvexPolytope<T>, f64)>, comb: Combine, budget: usize) -> Result<Vec<Cell>> {
    let mut polys = Vec::with_capacity(pieces.len());
    let mut lifted = Vec::with_capacity(pieces.len());
    for (p, w) in pieces {
        match p {
            ConvexPolytope::Polygon(p) => polys.push(p),
            ConvexPolytope::Interval(_) => unreachable!("2-D piece"),
        }
        lifted.push(comb.lift(w));
    }
    Ok(overlay_cells_2d(&polys, budget)?
        .into_iter()
        .map(|c| Cell {
            measure: c.area().to_f64(),
            combined: c.members.iter().fold(0.0, |acc, &i| comb.join(acc, lifted[i])),
        })
        .collect())
}

/// Weighted pieces `(A^j(S + k), w)` for sub-boxes `S = [lo, hi] ⊆ [0,1]^d`;
/// `None` means the whole unit cube.
pub(crate) type SubBoxFn<'a> = &'a dyn Fn(&Atom) -> Option<(Vec<f64>, Vec<f64>)>;

fn pieces<T: Coord>(
    a: &ExpansiveMatrix,
    atoms: &[Atom],
    sub: Option<SubBoxFn>,
) -> Result<Vec<(ConvexPolytope<T>, f64)>> {
    let d = a.dim();
    atoms
        .iter()
        .map(|at| {
            let m = forward::<T>(a, at.j);
            let Some((lo, hi)) = sub.and_then(|f| f(at)) else {
                return Ok((cube_polytope(&m, &at.k)?, at.w));
            };
            // M (diag(hi - lo) u + k + lo) = M' u + M (k + lo)
            let mut scaled = m.clone();
            for c in 0..d {
                let w = T::from_f64(hi[c] - lo[c]);
                for r in 0..d {
                    scaled[r * d + c] = scaled[r * d + c].mul(&w);
                }
            }
            let shift: Vec<T> = (0..d).map(|c| T::from_f64(at.k[c] as f64 + lo[c])).collect();
            let t: Vec<T> = (0..d)
                .map(|r| (0..d).fold(T::zero(), |s, c| s.add(&m[r * d + c].mul(&shift[c]))))
                .collect();
            let base = cube_polytope(&scaled, &vec![0; d])?;
            Ok((
                match base {
                    ConvexPolytope::Interval([x, y]) => ConvexPolytope::Interval([x.add(&t[0]), y.add(&t[0])]),
                    ConvexPolytope::Polygon(p) => ConvexPolytope::Polygon(p.transform(
                        &[T::one(), T::zero(), T::zero(), T::one()],
                        &[t[0].clone(), t[1].clone()],
                    )),
                },
                at.w,
            ))
        })
        .collect()
}

fn cells_generic<T: Coord>(
    a: &ExpansiveMatrix,
    atoms: &[Atom],
    comb: Combine,
    budget: usize,
    sub: Option<SubBoxFn>,
) -> Result<Vec<Cell>> {
    let ps = pieces::<T>(a, atoms, sub)?;
    if a.dim() == 1 {
        Ok(cells_1d(&ps, comb))
    } else {
        cells_2d(ps, comb, budget)
    }
}

/// Partition of the support of the stack into constant pieces.
pub(crate) fn stack_cells(a: &ExpansiveMatrix, atoms: &[Atom], q: f64, budget: usize) -> Result<Vec<Cell>> {
    stack_cells_sub(a, atoms, q, budget, None)
}

/// As [`stack_cells`] with every cube replaced by the image of a sub-box.
pub(crate) fn stack_cells_sub(
    a: &ExpansiveMatrix,
    atoms: &[Atom],
    q: f64,
    budget: usize,
    sub: Option<SubBoxFn>,
) -> Result<Vec<Cell>> {
    let comb = Combine::new(q);
    match (a.dim(), a.mode()) {
        (1 | 2, Mode::Rational) => cells_generic::<BigRational>(a, atoms, comb, budget, sub),
        (1 | 2, Mode::Float) => cells_generic::<f64>(a, atoms, comb, budget, sub),
        (d, _) => Err(Error::InvalidCombination(format!(
            "exact evaluation is available for d <= 2, got d = {d}"
        ))),
    }
}

/// `∫ stack^p` assembled from cells.
pub(crate) fn integrate_cells(cells: &[Cell], p: f64, q: f64) -> f64 {
    let comb = Combine::new(q);
    cells.iter().map(|c| comb.root(c.combined).powf(p) * c.measure).sum()
}

/// For each cube `P` at scale `jp` meeting some atom with `j <= jp`, the
/// integral `∫_P Σ_{j <= jp} Σ_k w^q 1_Q`. Keys are sorted.
pub(crate) fn candidate_integrals(
    a: &ExpansiveMatrix,
    atoms: &[Atom],
    q: f64,
    jp: i64,
) -> Result<Vec<(Vec<i64>, f64)>> {
    match (a.dim(), a.mode()) {
        (1, Mode::Rational) => candidates_generic::<BigRational>(a, atoms, q, jp),
        (1, Mode::Float) => candidates_generic::<f64>(a, atoms, q, jp),
        (2, Mode::Rational) => candidates_generic::<BigRational>(a, atoms, q, jp),
        (2, Mode::Float) => candidates_generic::<f64>(a, atoms, q, jp),
        (d, _) => Err(Error::InvalidCombination(format!(
            "exact evaluation is available for d <= 2, got d = {d}"
        ))),
    }
}

fn candidates_generic<T: Coord>(a: &ExpansiveMatrix, atoms: &[Atom], q: f64, jp: i64) -> Result<Vec<(Vec<i64>, f64)>> {
    let mp = forward::<T>(a, jp);
    let minv = T::matrix_entries(&a.power(-jp));
    let d = a.dim();
    let mut acc: HashMap<Vec<i64>, f64> = HashMap::new();
    for at in atoms.iter().filter(|at| at.j <= jp) {
        let wq = at.w.powf(q);
        let q_atom = atom_polytope::<T>(a, at)?;
        for k in meeting_cubes(&q_atom, &minv, d) {
            let p_cube = cube_polytope(&mp, &k)?;
            let m = overlap_measure(&q_atom, &p_cube);
            if m > 0.0 {
                *acc.entry(k).or_insert(0.0) += wq * m;
            }
        }
    }
    let mut out: Vec<_> = acc.into_iter().collect();
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(out)
}

/// Indices `k` at the scale with inverse `minv` whose cubes may overlap `q`
/// with positive measure: the integer box around `minv · q`.
pub(crate) fn meeting_cubes<T: Coord>(q: &ConvexPolytope<T>, minv: &[T], d: usize) -> Vec<Vec<i64>> {
    let pts: Vec<Vec<T>> = match q {
        ConvexPolytope::Interval([lo, hi]) => vec![vec![lo.clone()], vec![hi.clone()]],
        ConvexPolytope::Polygon(p) => p.vertices().iter().map(|v| v.to_vec()).collect(),
    };
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for x in &pts {
        for r in 0..d {
            let u = (0..d)
                .fold(T::zero(), |s, c| s.add(&minv[r * d + c].mul(&x[c])))
                .to_f64();
            lo[r] = lo[r].min(u);
            hi[r] = hi[r].max(u);
        }
    }
    let lo: Vec<i64> = lo.iter().map(|v| v.floor() as i64 - 1).collect();
    let hi: Vec<i64> = hi.iter().map(|v| v.ceil() as i64).collect();
    let mut out = vec![Vec::new()];
    for r in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo[r]..=hi[r]).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

pub(crate) fn overlap_measure<T: Coord>(x: &ConvexPolytope<T>, y: &ConvexPolytope<T>) -> f64 {
    match (x, y) {
        (ConvexPolytope::Interval([a, b]), ConvexPolytope::Interval([c, d])) => {
            let lo = if a > c { a } else { c };
            let hi = if b < d { b } else { d };
            if hi > lo {
                hi.sub(lo).to_f64()
            } else {
                0.0
            }
        }
        (ConvexPolytope::Polygon(p), ConvexPolytope::Polygon(r)) => {
            let i = p.intersection(r);
            if i.has_area() {
                i.area_f64()
            } else {
                0.0
            }
        }
        _ => 0.0,
    }
}
