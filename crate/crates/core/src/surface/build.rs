use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use thiserror::Error;

use crate::geom::{Cell, Grid, Point, Rect};
use crate::scalar::Scalar;

use super::complex::{CellComplex, VertexKind};
use super::{Surface, SurfaceError, SurfacePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssembleError {
    /// The prescribed identification cannot be realised by gluing whole
    /// overlaps; it pinches or branches somewhere.
    #[error("identification is not a surface near {0}")]
    NotASurface(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Offsets (in half-indices) from a face to the eight faces sharing an edge
/// or a vertex with it.
const NEIGHBOURS: [(isize, isize); 4] = [(2, 0), (0, 2), (2, 2), (2, -2)];

/// Build a surface with one rectangle per face cell of `grid`.
///
/// `key(face, cell)` names the class of `cell` in the closure of `face`; two
/// faces are glued when their shared edge or vertex has the same key. Fails if
/// the resulting quotient differs from the prescribed one, which happens
/// exactly when the prescription is not locally a surface. `base.rect` is a
/// face index. The output is simplified.
pub fn assemble<T: Scalar, K: Eq + Hash + Clone>(
    grid: &Grid<T>,
    faces: &[Cell],
    key: impl Fn(usize, Cell) -> K,
    base: SurfacePoint<T>,
    open: bool,
) -> Result<Surface<T>, AssembleError> {
    let mut at: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, c) in faces.iter().enumerate() {
        at.entry(*c).or_default().push(i);
    }
    let mut glue = BTreeSet::new();
    for (i, c) in faces.iter().enumerate() {
        for (dx, dy) in NEIGHBOURS {
            let (Some(hx), Some(hy)) = (c.hx.checked_add_signed(dx), c.hy.checked_add_signed(dy)) else {
                continue;
            };
            let Some(others) = at.get(&Cell::new(hx, hy)) else { continue };
            let shared = Cell::new((c.hx + hx) / 2, (c.hy + hy) / 2);
            let ki = key(i, shared);
            for &j in others {
                if key(j, shared) == ki {
                    glue.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    let rects: Vec<Rect<T>> = faces.iter().map(|c| grid.face_rect(c)).collect();

    let check = CellComplex::build(&rects, &glue, grid.clone());
    let mut seen: HashMap<(Cell, K), usize> = HashMap::new();
    let mut class_key: HashMap<usize, K> = HashMap::new();
    for (i, c) in faces.iter().enumerate() {
        let mut cells = c.boundary();
        cells.push(*c);
        for cell in cells {
            let k = key(i, cell);
            let id = check.class_of(i, cell).expect("face contains its closure");
            let bad = match seen.get(&(cell, k.clone())) {
                Some(&other) => other != id,
                None => false,
            } || class_key.get(&id).is_some_and(|prev| *prev != k);
            if bad {
                return Err(AssembleError::NotASurface(format!("{}", grid.sample(&cell))));
            }
            seen.insert((cell, k.clone()), id);
            class_key.insert(id, k);
        }
    }
    let s = Surface::new(rects, glue, base, open)?;
    Ok(simplify(&s))
}

fn overlap_area<T: Scalar>(a: &Rect<T>, b: &Rect<T>) -> T {
    if !a.overlaps(b) {
        return T::zero();
    }
    let [x0, x1, y0, y1] = a.meet_bounds(b).expect("overlapping");
    (x1 - x0) * (y1 - y0)
}

/// The union of two rectangles, if it is itself a rectangle.
fn union_rect<T: Scalar>(a: &Rect<T>, b: &Rect<T>) -> Option<Rect<T>> {
    let h = a.hull(b);
    (h.area() == a.area() + b.area() - overlap_area(a, b)).then_some(h)
}

/// Merge glued pairs whose union is a rectangle when no other rectangle can
/// tell the difference. The quotient and basepoint are unchanged.
pub fn simplify<T: Scalar>(s: &Surface<T>) -> Surface<T> {
    let n = s.rects().len();
    let mut rects: Vec<Option<Rect<T>>> = s.rects().iter().cloned().map(Some).collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(i, j) in s.glue() {
        adj[i].insert(j);
        adj[j].insert(i);
    }
    let mut base = s.base().rect;
    loop {
        let mut changed = false;
        for i in 0..n {
            if rects[i].is_none() {
                continue;
            }
            let partners: Vec<usize> = adj[i].iter().copied().filter(|&j| j > i).collect();
            for j in partners {
                let (Some(a), Some(b)) = (rects[i].clone(), rects[j].clone()) else { continue };
                let Some(r) = union_rect(&a, &b) else { continue };
                let compatible = (0..n).all(|g| {
                    if g == i || g == j {
                        return true;
                    }
                    let Some(gr) = &rects[g] else { return true };
                    let (gi, gj) = (adj[g].contains(&i), adj[g].contains(&j));
                    if gi == gj {
                        return true;
                    }
                    // Only glued to one half: its contact with the other half
                    // must already lie in the glued half.
                    let (glued, other) = if gi { (&a, &b) } else { (&b, &a) };
                    match other.meet_bounds(gr) {
                        None => true,
                        Some(m) => glued.contains_bounds(&m),
                    }
                });
                if !compatible {
                    continue;
                }
                let moved: Vec<usize> = adj[j].iter().copied().collect();
                for g in moved {
                    adj[g].remove(&j);
                    if g != i {
                        adj[g].insert(i);
                        adj[i].insert(g);
                    }
                }
                adj[j].clear();
                adj[i].remove(&j);
                rects[i] = Some(r);
                rects[j] = None;
                if base == j {
                    base = i;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let alive: Vec<usize> = (0..n).filter(|&i| rects[i].is_some()).collect();
    let pos = |i: usize| alive.binary_search(&i).expect("alive");
    let mut glue = Vec::new();
    for &i in &alive {
        for &j in &adj[i] {
            if i < j {
                glue.push((pos(i), pos(j)));
            }
        }
    }
    Surface::new(
        alive.iter().map(|&i| rects[i].clone().expect("alive")).collect(),
        glue,
        SurfacePoint::new(pos(base), s.base().point.clone()),
        s.is_open(),
    )
    .expect("merging keeps structure")
}

/// Thicken every pinched vertex by a small square glued to the rectangles
/// meeting there, turning corner-only contact into an interior vertex.
pub fn repair_butterflies<T: Scalar>(s: &Surface<T>) -> Surface<T> {
    let c = s.complex();
    let pinched: Vec<_> = c.vertices().filter(|&v| c.vertex_kind(v) == VertexKind::Pinched).collect();
    if pinched.is_empty() {
        return s.clone();
    }
    let delta = c.grid().min_gap().expect("nonempty grid") * T::half() * T::half();
    let mut rects = s.rects().to_vec();
    let mut glue: Vec<(usize, usize)> = s.glue().iter().copied().collect();
    for v in pinched {
        let p: Point<T> = c.sample(v);
        let square = Rect::new(
            p.x.clone() - delta.clone(),
            p.x.clone() + delta.clone(),
            p.y.clone() - delta.clone(),
            p.y + delta.clone(),
        )
        .expect("positive size");
        let idx = rects.len();
        rects.push(square);
        glue.extend(c.class(v).members.iter().map(|&m| (m, idx)));
    }
    Surface::new(rects, glue, s.base().clone(), s.is_open()).expect("indices are in range")
}
