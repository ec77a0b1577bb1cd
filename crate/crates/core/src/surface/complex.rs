use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::geom::{Cell, Grid, Point, Rect};
use crate::scalar::Scalar;
use crate::unionfind::UnionFind;

pub type ClassId = usize;

/// One cell of the quotient: a grid cell together with the rectangle copies
/// identified there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellClass {
    pub cell: Cell,
    /// Indices of the rectangles whose copy of `cell` lies in this class, sorted.
    pub members: Vec<usize>,
    /// Classes whose closure contains this one.
    pub up: Vec<ClassId>,
    /// Proper faces of the closure.
    pub down: Vec<ClassId>,
}

impl CellClass {
    pub fn dim(&self) -> usize {
        self.cell.dim()
    }
}

/// Local picture around a vertex class.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VertexKind {
    /// A full turn of exactly four faces.
    Interior,
    /// A single fan of faces between two boundary edges.
    Fan(usize),
    /// A cycle of the wrong length: a cone point.
    Cone(usize),
    /// The faces around the vertex form more than one fan or cycle.
    Pinched,
}

/// Grid refinement of a glued rectangle family, quotiented by the gluing.
#[derive(Clone, Debug)]
pub struct CellComplex<T> {
    grid: Grid<T>,
    spans: Vec<(usize, usize, usize, usize)>,
    classes: Vec<CellClass>,
    lookup: HashMap<(usize, Cell), ClassId>,
}

impl<T: Scalar> CellComplex<T> {
    /// `grid` must contain every rectangle side. Glue pairs whose rectangles do
    /// not share a cell have no effect.
    pub fn build(rects: &[Rect<T>], glue: &BTreeSet<(usize, usize)>, grid: Grid<T>) -> Self {
        let spans: Vec<_> = rects
            .iter()
            .map(|r| grid.span(r).expect("grid refines every rectangle"))
            .collect();
        let mut by_cell: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
        for (i, &(x0, x1, y0, y1)) in spans.iter().enumerate() {
            for hx in x0..=x1 {
                for hy in y0..=y1 {
                    by_cell.entry(Cell::new(hx, hy)).or_default().push(i);
                }
            }
        }

        let mut classes = Vec::new();
        let mut lookup = HashMap::new();
        for (cell, rs) in by_cell {
            let mut groups: Vec<Vec<usize>> = if rs.len() == 1 {
                vec![rs]
            } else {
                let mut uf = UnionFind::new(rs.len());
                for a in 0..rs.len() {
                    for b in a + 1..rs.len() {
                        if glue.contains(&(rs[a], rs[b])) {
                            uf.union(a, b);
                        }
                    }
                }
                let (labels, k) = uf.labels();
                let mut g = vec![Vec::new(); k];
                for (idx, l) in labels.into_iter().enumerate() {
                    g[l].push(rs[idx]);
                }
                g
            };
            // Members are pushed in increasing rectangle order, so each group is
            // sorted and groups are ordered by their smallest member.
            groups.sort();
            for members in groups {
                let id = classes.len();
                for &m in &members {
                    lookup.insert((m, cell), id);
                }
                classes.push(CellClass { cell, members, up: Vec::new(), down: Vec::new() });
            }
        }

        let (nx, ny) = (grid.nx(), grid.ny());
        for class in &mut classes {
            let cell = class.cell;
            let rep = class.members[0];
            let mut down: Vec<ClassId> = cell.boundary().iter().map(|b| lookup[&(rep, *b)]).collect();
            down.sort_unstable();
            let mut up = Vec::new();
            for &m in &class.members {
                let (x0, x1, y0, y1) = spans[m];
                for c in cell.cofaces(nx, ny) {
                    if (x0..=x1).contains(&c.hx) && (y0..=y1).contains(&c.hy) {
                        up.push(lookup[&(m, c)]);
                    }
                }
            }
            up.sort_unstable();
            up.dedup();
            class.down = down;
            class.up = up;
        }
        CellComplex { grid, spans, classes, lookup }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn classes(&self) -> &[CellClass] {
        &self.classes
    }

    pub fn class(&self, id: ClassId) -> &CellClass {
        &self.classes[id]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn rect_count(&self) -> usize {
        self.spans.len()
    }

    pub fn class_of(&self, rect: usize, cell: Cell) -> Option<ClassId> {
        self.lookup.get(&(rect, cell)).copied()
    }

    /// Class of the copy of `p` in rectangle `rect`.
    pub fn locate(&self, rect: usize, p: &Point<T>) -> Option<ClassId> {
        self.class_of(rect, self.grid.locate(p)?)
    }

    pub fn faces(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.classes.len()).filter(|&i| self.classes[i].dim() == 2)
    }

    pub fn edges(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.classes.len()).filter(|&i| self.classes[i].dim() == 1)
    }

    pub fn vertices(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.classes.len()).filter(|&i| self.classes[i].dim() == 0)
    }

    /// Faces in the closure-star of a class.
    pub fn faces_around(&self, id: ClassId) -> Vec<ClassId> {
        if self.classes[id].dim() == 2 {
            return vec![id];
        }
        self.classes[id].up.iter().copied().filter(|&u| self.classes[u].dim() == 2).collect()
    }

    /// The neighbour (in either direction of the closure relation) at `cell`.
    pub fn neighbor_at(&self, id: ClassId, cell: Cell) -> Option<ClassId> {
        let c = &self.classes[id];
        if c.cell == cell {
            return Some(id);
        }
        if c.cell.closure_contains(&cell) {
            c.down.iter().copied().find(|&d| self.classes[d].cell == cell)
        } else {
            c.up.iter().copied().find(|&u| self.classes[u].cell == cell)
        }
    }

    /// All neighbours at `cell`; more than one only near a branch.
    pub fn neighbors_at(&self, id: ClassId, cell: Cell) -> Vec<ClassId> {
        let c = &self.classes[id];
        if c.cell == cell {
            return vec![id];
        }
        if c.cell.closure_contains(&cell) {
            c.down.iter().copied().filter(|&d| self.classes[d].cell == cell).collect()
        } else {
            c.up.iter().copied().filter(|&u| self.classes[u].cell == cell).collect()
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.classes
            .iter()
            .map(|c| if c.dim() == 1 { -1 } else { 1 })
            .sum()
    }

    pub fn vertex_kind(&self, v: ClassId) -> VertexKind {
        let c = &self.classes[v];
        debug_assert_eq!(c.dim(), 0);
        let faces: Vec<ClassId> = self.faces_around(v);
        let edges: Vec<ClassId> =
            c.up.iter().copied().filter(|&u| self.classes[u].dim() == 1).collect();
        let index = |f: ClassId| faces.iter().position(|&g| g == f).expect("face in star");
        let mut uf = UnionFind::new(faces.len());
        let mut links = 0;
        let mut dangling = 0;
        for &e in &edges {
            let fs = self.faces_around(e);
            match fs.len() {
                1 => dangling += 1,
                2 => {
                    links += 1;
                    uf.union(index(fs[0]), index(fs[1]));
                }
                _ => return VertexKind::Pinched,
            }
        }
        let (_, components) = uf.labels();
        if components != 1 {
            return VertexKind::Pinched;
        }
        if dangling == 0 && links == faces.len() {
            if faces.len() == 4 {
                VertexKind::Interior
            } else {
                VertexKind::Cone(faces.len())
            }
        } else if dangling == 2 && links + 1 == faces.len() {
            VertexKind::Fan(faces.len())
        } else {
            VertexKind::Pinched
        }
    }

    /// Whether the class lies on the boundary of the surface.
    pub fn is_boundary(&self, id: ClassId) -> bool {
        match self.classes[id].dim() {
            2 => false,
            1 => self.faces_around(id).len() < 2,
            _ => self.vertex_kind(id) != VertexKind::Interior,
        }
    }

    /// Dev footprint `[x_lo, x_hi, y_lo, y_hi]` of a class.
    pub fn footprint(&self, id: ClassId) -> [T; 4] {
        self.grid.footprint(&self.classes[id].cell)
    }

    /// A point in the relative interior of the class.
    pub fn sample(&self, id: ClassId) -> Point<T> {
        self.grid.sample(&self.classes[id].cell)
    }

    /// Connected components of the whole complex.
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.classes.len());
        for (i, c) in self.classes.iter().enumerate() {
            for &d in &c.down {
                uf.union(i, d);
            }
        }
        uf.labels().1
    }

    /// Classes reachable from `start` through classes accepted by `keep`.
    pub fn flood(&self, start: &[ClassId], keep: impl Fn(ClassId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.classes.len()];
        let mut stack: Vec<ClassId> = start.iter().copied().filter(|&s| keep(s)).collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(c) = stack.pop() {
            for &n in self.classes[c].up.iter().chain(&self.classes[c].down) {
                if !seen[n] && keep(n) {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        seen
    }
}
