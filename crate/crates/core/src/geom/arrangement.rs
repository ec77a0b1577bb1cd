use std::collections::{BTreeMap, BTreeSet};

use crate::scalar::Scalar;

use super::{Cell, Grid, Rect};

#[derive(Clone, Debug)]
pub struct ArrFace<T> {
    pub cell: Cell,
    pub rect: Rect<T>,
    /// Indices of the input rectangles containing this face.
    pub containing: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ArrEdge {
    pub cell: Cell,
    /// Faces (indices into `Arrangement::faces`) bounded by this edge; one or two.
    pub faces: Vec<usize>,
}

/// Full grid refinement of a finite set of rectangles.
#[derive(Clone, Debug)]
pub struct Arrangement<T> {
    pub grid: Grid<T>,
    pub faces: Vec<ArrFace<T>>,
    pub edges: Vec<ArrEdge>,
    pub vertices: Vec<Cell>,
}

impl<T: Scalar> Arrangement<T> {
    /// Faces sharing an edge with `face`.
    pub fn neighbors(&self, face: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.faces.contains(&face))
            .flat_map(|e| e.faces.iter().copied())
            .filter(|&f| f != face)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Refine by every distinct input coordinate; keep the grid faces covered by
/// at least one input, together with the edges and vertices in their closures.
pub fn overlay<T: Scalar>(rects: &[Rect<T>]) -> Arrangement<T> {
    let grid = Grid::from_rects(rects);
    let mut faces = Vec::new();
    let mut face_index = BTreeMap::new();
    for (i, r) in rects.iter().enumerate() {
        let (x0, x1, y0, y1) = grid.span(r).expect("grid contains rectangle sides");
        for hx in (x0 + 1..x1).step_by(2) {
            for hy in (y0 + 1..y1).step_by(2) {
                let cell = Cell::new(hx, hy);
                let idx = *face_index.entry(cell).or_insert_with(|| {
                    faces.push(ArrFace {
                        cell,
                        rect: grid.face_rect(&cell),
                        containing: Vec::new(),
                    });
                    faces.len() - 1
                });
                faces[idx].containing.push(i);
            }
        }
    }
    // Deterministic face order regardless of input order.
    let mut order: Vec<usize> = (0..faces.len()).collect();
    order.sort_by_key(|&i| faces[i].cell);
    let faces: Vec<ArrFace<T>> = order.into_iter().map(|i| faces[i].clone()).collect();
    let face_of: BTreeMap<Cell, usize> =
        faces.iter().enumerate().map(|(i, f)| (f.cell, i)).collect();

    let mut edge_faces: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
    let mut vertices = BTreeSet::new();
    for (i, f) in faces.iter().enumerate() {
        for c in f.cell.boundary() {
            if c.is_edge() {
                edge_faces.entry(c).or_default().push(i);
            } else {
                vertices.insert(c);
            }
        }
    }
    debug_assert!(edge_faces.values().all(|v| v.len() <= 2));
    let _ = face_of;
    Arrangement {
        grid,
        faces,
        edges: edge_faces
            .into_iter()
            .map(|(cell, faces)| ArrEdge { cell, faces })
            .collect(),
        vertices: vertices.into_iter().collect(),
    }
}
