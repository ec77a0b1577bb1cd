use crate::geom::{Grid, Rect};
use crate::scalar::Scalar;

use super::complex::{CellComplex, ClassId};
use super::{Surface, SurfaceError, SurfacePoint};

/// A rectangular union inside a host surface, given as rectangles each lying
/// in one host rectangle. With `open` set it denotes the interior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubUnion<T> {
    pub pieces: Vec<(usize, Rect<T>)>,
    pub open: bool,
}

/// A sub-union located in the host's complex on a common grid.
#[derive(Clone, Debug)]
pub struct Placement<T> {
    pub complex: CellComplex<T>,
    /// Host classes covered by the closed union.
    pub closed: Vec<bool>,
    /// Host classes in the interior of the union.
    pub interior: Vec<bool>,
    pieces: Vec<(usize, Rect<T>)>,
}

impl<T: Scalar> Placement<T> {
    pub fn classes(&self, open: bool) -> &[bool] {
        if open {
            &self.interior
        } else {
            &self.closed
        }
    }

    /// Host class of a piece's copy of a cell.
    fn class(&self, piece: usize, cell: crate::geom::Cell) -> ClassId {
        self.complex.class_of(self.pieces[piece].0, cell).expect("piece lies in its host")
    }
}

impl<T: Scalar> SubUnion<T> {
    pub fn new(pieces: Vec<(usize, Rect<T>)>, open: bool) -> Self {
        SubUnion { pieces, open }
    }

    /// The whole host.
    pub fn whole(host: &Surface<T>) -> Self {
        SubUnion { pieces: host.rects().iter().cloned().enumerate().collect(), open: host.is_open() }
    }

    pub fn place(&self, host: &Surface<T>) -> Result<Placement<T>, SurfaceError> {
        let grid = host.complex().grid().merged(&Grid::from_rects(self.pieces.iter().map(|p| &p.1)));
        self.place_on(host, &grid)
    }

    /// Place on a given grid, which must refine the host and the pieces.
    pub fn place_on(&self, host: &Surface<T>, grid: &Grid<T>) -> Result<Placement<T>, SurfaceError> {
        if self.pieces.is_empty() {
            return Err(SurfaceError::InvalidSubUnion("no pieces".into()));
        }
        for (h, r) in &self.pieces {
            let hr = host
                .rects()
                .get(*h)
                .ok_or_else(|| SurfaceError::InvalidSubUnion(format!("no host rectangle {h}")))?;
            if !hr.contains_rect(r) {
                return Err(SurfaceError::InvalidSubUnion(format!("{r:?} is not inside host rectangle {h}")));
            }
        }
        let complex = CellComplex::build(host.rects(), host.glue(), grid.clone());
        let mut closed = vec![false; complex.len()];
        for (h, r) in &self.pieces {
            let (x0, x1, y0, y1) = complex.grid().span(r).expect("grid refines pieces");
            for hx in x0..=x1 {
                for hy in y0..=y1 {
                    closed[complex.class_of(*h, crate::geom::Cell::new(hx, hy)).expect("inside host")] = true;
                }
            }
        }
        let interior = (0..complex.len())
            .map(|id| {
                closed[id]
                    && !complex.is_boundary(id)
                    && complex.faces_around(id).iter().all(|&f| closed[f])
            })
            .collect();
        Ok(Placement { complex, closed, interior, pieces: self.pieces.clone() })
    }

    /// Present the union as a surface of its own. Two pieces are glued when
    /// the host identifies their whole overlap; a partial identification is
    /// an error (subdivide the pieces first). The basepoint is the host's
    /// when the union contains it.
    pub fn to_surface(&self, host: &Surface<T>) -> Result<Surface<T>, SurfaceError> {
        let placed = self.place(host)?;
        let mut glue = Vec::new();
        for a in 0..self.pieces.len() {
            for b in a + 1..self.pieces.len() {
                let Some(bounds) = self.pieces[a].1.meet_bounds(&self.pieces[b].1) else { continue };
                let grid = placed.complex.grid();
                let (Some(x0), Some(x1), Some(y0), Some(y1)) =
                    (grid.line_x(&bounds[0]), grid.line_x(&bounds[1]), grid.line_y(&bounds[2]), grid.line_y(&bounds[3]))
                else {
                    unreachable!("grid refines pieces")
                };
                let (mut same, mut differ) = (false, false);
                for hx in 2 * x0..=2 * x1 {
                    for hy in 2 * y0..=2 * y1 {
                        let cell = crate::geom::Cell::new(hx, hy);
                        if placed.class(a, cell) == placed.class(b, cell) {
                            same = true;
                        } else {
                            differ = true;
                        }
                    }
                }
                match (same, differ) {
                    (true, false) => glue.push((a, b)),
                    (false, _) => {}
                    (true, true) => {
                        return Err(SurfaceError::InvalidSubUnion(format!(
                            "pieces {a} and {b} are only partly identified in the host"
                        )))
                    }
                }
            }
        }
        let host_base = host.base();
        let base_cell = placed.complex.grid().locate(&host_base.point).expect("base in grid");
        let host_class = placed.complex.class_of(host_base.rect, base_cell).expect("base in host");
        let base = (0..self.pieces.len())
            .find(|&i| self.pieces[i].1.contains(&host_base.point) && placed.class(i, base_cell) == host_class)
            .map(|i| SurfacePoint::new(i, host_base.point.clone()))
            .unwrap_or_else(|| SurfacePoint::new(0, self.pieces[0].1.corners()[0].clone()));
        Surface::new(self.pieces.iter().map(|p| p.1.clone()).collect(), glue, base, self.open)
    }
}
