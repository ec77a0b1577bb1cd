use std::collections::HashMap;

use crate::geom::{Cell, Direction, Point, RectiLoop};
use crate::scalar::Scalar;

use super::complex::{CellComplex, ClassId};

/// A boundary component: its developed curve plus the vertex classes at the
/// corners, aligned with `curve.vertices()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryLoop<T> {
    pub curve: RectiLoop<T>,
    pub corners: Vec<ClassId>,
}

struct Step {
    from: ClassId,
    to: ClassId,
    dir: Direction,
}

/// Orient a boundary edge so the surface lies on its left.
fn orient<T: Scalar>(c: &CellComplex<T>, e: ClassId) -> Option<Step> {
    let faces = c.faces_around(e);
    if faces.len() != 1 {
        return None;
    }
    let ec = c.class(e).cell;
    let fc = c.class(faces[0]).cell;
    let (dir, from, to) = if ec.is_horizontal_edge() {
        let (l, r) = (Cell::new(ec.hx - 1, ec.hy), Cell::new(ec.hx + 1, ec.hy));
        if fc.hy > ec.hy {
            (Direction::East, l, r)
        } else {
            (Direction::West, r, l)
        }
    } else {
        let (b, t) = (Cell::new(ec.hx, ec.hy - 1), Cell::new(ec.hx, ec.hy + 1));
        if fc.hx > ec.hx {
            (Direction::South, t, b)
        } else {
            (Direction::North, b, t)
        }
    };
    Some(Step { from: c.neighbor_at(e, from)?, to: c.neighbor_at(e, to)?, dir })
}

/// Trace every boundary component of a complex that passed the local
/// manifold checks. Loops are listed by their smallest boundary edge and start
/// at the first corner after it.
pub(crate) fn trace<T: Scalar>(c: &CellComplex<T>) -> Vec<BoundaryLoop<T>> {
    let mut steps: Vec<(ClassId, Step)> = c.edges().filter_map(|e| Some((e, orient(c, e)?))).collect();
    steps.sort_by_key(|s| s.0);
    let mut outgoing: HashMap<ClassId, usize> = HashMap::new();
    for (i, (_, s)) in steps.iter().enumerate() {
        outgoing.insert(s.from, i);
    }
    let mut used = vec![false; steps.len()];
    let mut loops = Vec::new();
    for start in 0..steps.len() {
        if used[start] {
            continue;
        }
        let mut seq: Vec<(ClassId, Direction)> = Vec::new();
        let mut i = start;
        loop {
            used[i] = true;
            seq.push((steps[i].1.from, steps[i].1.dir));
            match outgoing.get(&steps[i].1.to) {
                Some(&n) if !used[n] => i = n,
                _ => break,
            }
        }
        // Corners are vertices where the direction changes.
        let n = seq.len();
        let corner_idx: Vec<usize> = (0..n)
            .filter(|&k| seq[(k + n - 1) % n].1 != seq[k].1)
            .collect();
        let mut corners: Vec<ClassId> = corner_idx.iter().map(|&k| seq[k].0).collect();
        if corners.len() < 4 {
            continue;
        }
        let pts: Vec<Point<T>> = corners.iter().map(|&v| c.sample(v)).collect();
        let curve = match RectiLoop::new(pts) {
            Ok(l) => l,
            Err(_) => continue,
        };
        corners.shrink_to_fit();
        loops.push(BoundaryLoop { curve, corners });
    }
    loops
}
