//! Disks: those bounded by a loop, smallest disks around unions, images of
//! immersions, nested rational unions and a countable family of unions.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::geom::{Cell, Direction, Grid, Point, Rect, RectiLoop};
use crate::lattice::{fuse, LatticeError};
use crate::morphism::{dedupe, embeds, immerses, ImmersionMap};
use crate::scalar::Scalar;
use crate::transform::lift_segment;
use crate::surface::{
    assemble, simplify, AssembleError, CellComplex, ClassId, Classification, SubUnion, Surface, SurfaceError,
    SurfacePoint, VertexKind,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DiskError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("the filled disk is not contained in the surface")]
    NotContainedInS,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("search too large: {0}")]
    TooLarge(String),
}

impl From<AssembleError> for DiskError {
    fn from(e: AssembleError) -> Self {
        match e {
            AssembleError::Surface(s) => DiskError::Surface(s),
            other => DiskError::PreconditionViolated(other.to_string()),
        }
    }
}

/// Faces on either side of an edge cell, if inside the grid.
fn sides(e: Cell) -> [Option<Cell>; 2] {
    if e.hx % 2 == 1 {
        [e.hy.checked_sub(1).map(|y| Cell::new(e.hx, y)), Some(Cell::new(e.hx, e.hy + 1))]
    } else {
        [e.hx.checked_sub(1).map(|x| Cell::new(x, e.hy)), Some(Cell::new(e.hx + 1, e.hy))]
    }
}

/// The face on the left of a traversal leaving vertex cell `v` in direction `d`.
fn left_quadrant(v: Cell, d: Direction) -> Option<Cell> {
    let (hx, hy) = (v.hx, v.hy);
    Some(match d {
        Direction::East => Cell::new(hx + 1, hy + 1),
        Direction::North => Cell::new(hx.checked_sub(1)?, hy + 1),
        Direction::West => Cell::new(hx.checked_sub(1)?, hy.checked_sub(1)?),
        Direction::South => Cell::new(hx + 1, hy.checked_sub(1)?),
    })
}

/// Gluing data forced by a loop: copies of each face, and for each interior
/// edge the number of copy pairs glued across it.
struct Gluings<T> {
    grid: Grid<T>,
    copies: Vec<Cell>,
    edges: Vec<(Vec<usize>, Vec<usize>, usize)>,
}

impl<T: Scalar> Gluings<T> {
    fn new(gamma: &RectiLoop<T>) -> Option<Self> {
        if gamma.turning_number() != 1 {
            return None;
        }
        let region = gamma.region_decomposition().ok()?;
        let grid = Grid::new(gamma.vertices().iter().map(|p| p.x.clone()), gamma.vertices().iter().map(|p| p.y.clone()));
        let mut copies = Vec::new();
        let mut copies_of: HashMap<Cell, Vec<usize>> = HashMap::new();
        for (r, w) in &region {
            let cell = grid.locate(&r.center()).expect("region face in grid");
            for _ in 0..*w {
                copies_of.entry(cell).or_default().push(copies.len());
                copies.push(cell);
            }
        }
        // Traversals of each unit edge with the given face on the left.
        let mut left: HashMap<(Cell, Option<Cell>), usize> = HashMap::new();
        for (a, b) in gamma.edges() {
            let d = Direction::between(a, b).expect("validated loop");
            let (i0, i1, fixed) = if d.is_horizontal() {
                (grid.line_x(&a.x)?, grid.line_x(&b.x)?, grid.line_y(&a.y)?)
            } else {
                (grid.line_y(&a.y)?, grid.line_y(&b.y)?, grid.line_x(&a.x)?)
            };
            for i in i0.min(i1)..i0.max(i1) {
                let e = if d.is_horizontal() { Cell::new(2 * i + 1, 2 * fixed) } else { Cell::new(2 * fixed, 2 * i + 1) };
                let [lo, hi] = sides(e);
                let face = match d {
                    Direction::East | Direction::South => hi,
                    Direction::West | Direction::North => lo,
                };
                *left.entry((e, face)).or_default() += 1;
            }
        }
        let count = |c: Option<Cell>| c.and_then(|c| copies_of.get(&c)).map_or(0, Vec::len);
        let mut edges = Vec::new();
        for e in grid.cells().filter(|c| c.dim() == 1) {
            let [f, g] = sides(e);
            let g = g.filter(|g| g.hx < grid.nx() && g.hy < grid.ny());
            let mf = count(f).checked_sub(left.get(&(e, f)).copied().unwrap_or(0))?;
            let mg = count(g).checked_sub(left.get(&(e, g)).copied().unwrap_or(0))?;
            if mf != mg {
                return None;
            }
            if mf > 0 {
                edges.push((copies_of[&f?].clone(), copies_of[&g?].clone(), mf));
            }
        }
        // Loop traversals that leave the grid cannot be accounted for.
        if left.keys().any(|(_, f)| f.is_none_or(|f| f.hx >= grid.nx() || f.hy >= grid.ny())) {
            return None;
        }
        Some(Gluings { grid, copies, edges })
    }

    /// Every choice of matchings, one per edge.
    fn for_each(&self, visit: &mut impl FnMut(&[(usize, usize)])) {
        let mut glue = Vec::new();
        self.descend(0, &mut glue, visit);
    }

    fn descend(&self, k: usize, glue: &mut Vec<(usize, usize)>, visit: &mut impl FnMut(&[(usize, usize)])) {
        let Some((fs, gs, m)) = self.edges.get(k) else {
            visit(glue);
            return;
        };
        for chosen in combinations(fs.len(), *m) {
            for image in arrangements(gs.len(), *m) {
                let before = glue.len();
                glue.extend(chosen.iter().zip(&image).map(|(&a, &b)| (fs[a].min(gs[b]), fs[a].max(gs[b]))));
                self.descend(k + 1, glue, visit);
                glue.truncate(before);
            }
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Ordered selections of `k` distinct indices below `n`.
fn arrangements(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(n, k, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, k, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Re-anchor a disk whose boundary develops to `gamma` at the centre of the
/// face of `gamma`'s own grid just left of its first edge, on the sheet
/// next to the boundary there.
pub fn anchor_on<T: Scalar>(s: &Surface<T>, gamma: &RectiLoop<T>) -> Option<Surface<T>> {
    let loops = s.boundary_loops().ok()?;
    let [l] = loops.as_slice() else { return None };
    let k = (0..l.curve.len()).find(|&k| l.curve.rotated(k).vertices() == gamma.vertices())?;
    let c = s.complex();
    let v = l.corners[k];
    let [v0, v1, ..] = gamma.vertices() else { return None };
    let d = Direction::between(v0, v1)?;
    let q = left_quadrant(c.class(v).cell, d)?;
    let face = c.faces_around(v).into_iter().find(|&f| c.class(f).cell == q)?;
    let own = Grid::new(gamma.vertices().iter().map(|p| p.x.clone()), gamma.vertices().iter().map(|p| p.y.clone()));
    let target = own.sample(&left_quadrant(own.locate(v0)?, d)?);
    let path = lift_segment(c, face, &c.sample(face), &target)?;
    let last = *path.last()?;
    s.with_base(SurfacePoint::new(c.class(last).members[0], target)).ok()
}

/// Candidate disk from copies of loop faces glued along `glue`, if it is a
/// disk bounded by `gamma`.
fn disk_from<T: Scalar>(
    grid: &Grid<T>,
    copies: &[Cell],
    glue: &[(usize, usize)],
    gamma: &RectiLoop<T>,
) -> Option<Surface<T>> {
    let rects: Vec<Rect<T>> = copies.iter().map(|c| grid.face_rect(c)).collect();
    let base = SurfacePoint::new(0, rects[0].center());
    let s = Surface::new(rects, glue.iter().copied(), base, false).ok()?;
    if s.classify() != Classification::Disk {
        return None;
    }
    anchor_on(&s, gamma).map(|s| simplify(&s))
}

/// Every disk, up to isomorphism, whose boundary develops to `gamma`. Each is
/// based at the centre of the face just left of the first edge of `gamma`.
pub fn disks_bounded_by<T: Scalar>(gamma: &RectiLoop<T>) -> Vec<Surface<T>> {
    let Some(g) = Gluings::new(gamma) else { return Vec::new() };
    let mut found = Vec::new();
    g.for_each(&mut |glue| {
        if let Some(s) = disk_from(&g.grid, &g.copies, glue, gamma) {
            found.push(s);
        }
    });
    dedupe(found)
}

/// `set` plus every component of its complement that stays away from the
/// boundary of the complex.
fn fill_holes<T: Scalar>(c: &CellComplex<T>, set: &[bool]) -> Vec<bool> {
    let mut out = set.to_vec();
    let mut seen = set.to_vec();
    for start in 0..c.len() {
        if seen[start] {
            continue;
        }
        let comp = c.flood(&[start], |id| !set[id]);
        let members: Vec<ClassId> = (0..c.len()).filter(|&i| comp[i]).collect();
        let enclosed = members.iter().all(|&i| !c.is_boundary(i));
        for &i in &members {
            seen[i] = true;
            if enclosed {
                out[i] = true;
            }
        }
    }
    out
}

/// The surface made of the faces in `set`, with the identifications of `c`.
fn surface_on<T: Scalar>(
    c: &CellComplex<T>,
    set: &[bool],
    base: &Point<T>,
    base_class: ClassId,
    open: bool,
) -> Result<Surface<T>, DiskError> {
    let ids: Vec<ClassId> = c.faces().filter(|&f| set[f]).collect();
    let cells: Vec<Cell> = ids.iter().map(|&f| c.class(f).cell).collect();
    let around = c.faces_around(base_class);
    let bi = ids
        .iter()
        .position(|f| around.contains(f))
        .ok_or_else(|| DiskError::PreconditionViolated("the basepoint is not in the union".into()))?;
    let key = |i: usize, cell: Cell| c.neighbor_at(ids[i], cell).expect("closure is complete");
    Ok(assemble(c.grid(), &cells, key, SurfacePoint::new(bi, base.clone()), open)?)
}

/// The smallest closed disk in `s` containing the closed union `k`: `k` with
/// every hole that `s` fills.
pub fn smallest_closed_disk<T: Scalar>(s: &Surface<T>, k: &SubUnion<T>) -> Result<Surface<T>, DiskError> {
    if k.open {
        return Err(DiskError::PreconditionViolated("the union must be closed".into()));
    }
    let placed = k.place(s)?;
    let c = &placed.complex;
    let base = c.locate(s.base().rect, &s.base().point).expect("base in its rectangle");
    if !placed.closed[base] {
        return Err(DiskError::PreconditionViolated("the basepoint is not in the union".into()));
    }
    let filled = fill_holes(c, &placed.closed);
    let out = surface_on(c, &filled, &s.base().point, base, false)?;
    if out.classify() != Classification::Disk {
        return Err(DiskError::NotContainedInS);
    }
    Ok(out)
}

/// The open union `u` together with every compact component of its
/// complement in `s`.
pub fn smallest_open_disk<T: Scalar>(s: &Surface<T>, u: &SubUnion<T>) -> Result<Surface<T>, DiskError> {
    let placed = u.place(s)?;
    let c = &placed.complex;
    let base = c.locate(s.base().rect, &s.base().point).expect("base in its rectangle");
    if !placed.interior[base] {
        return Err(DiskError::PreconditionViolated("the basepoint is not in the open union".into()));
    }
    let filled = fill_holes(c, &placed.interior);
    surface_on(c, &filled, &s.base().point, base, true)
}

/// Cap on the quotients explored by [`immersed_images`].
pub const MAX_QUOTIENTS: usize = 4096;

/// Whether the complex identifies the whole overlap of rectangles `i` and `j`.
fn overlap_identified<T: Scalar>(c: &CellComplex<T>, rects: &[Rect<T>], i: usize, j: usize) -> bool {
    let Some(b) = rects[i].meet_bounds(&rects[j]) else { return false };
    let g = c.grid();
    let (Some(x0), Some(x1), Some(y0), Some(y1)) = (g.line_x(&b[0]), g.line_x(&b[1]), g.line_y(&b[2]), g.line_y(&b[3]))
    else {
        return false;
    };
    (2 * x0..=2 * x1).all(|hx| (2 * y0..=2 * y1).all(|hy| c.class_of(i, Cell::new(hx, hy)) == c.class_of(j, Cell::new(hx, hy))))
}

/// Images of `k` under immersions, up to isomorphism: the legal surfaces
/// obtained by gluing more pairs of `k`'s rectangles. Glue sets are kept
/// closed (every pair whose overlap is already identified is added), and the
/// search stops with an error after [`MAX_QUOTIENTS`] of them.
pub fn immersed_images<T: Scalar>(k: &Surface<T>) -> Result<Vec<Surface<T>>, DiskError> {
    let rects = k.rects();
    let grid = k.complex().grid().clone();
    let free: Vec<(usize, usize)> = (0..rects.len())
        .flat_map(|i| (i + 1..rects.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| rects[i].touches(&rects[j]) && !k.is_glued(i, j))
        .collect();
    let close = |glue: BTreeSet<(usize, usize)>| -> BTreeSet<(usize, usize)> {
        let c = CellComplex::build(rects, &glue, grid.clone());
        let mut out = glue;
        out.extend(free.iter().copied().filter(|&(i, j)| overlap_identified(&c, rects, i, j)));
        out
    };
    let start = close(k.glue().clone());
    let mut seen: HashSet<BTreeSet<(usize, usize)>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(glue) = queue.pop_front() {
        let s = Surface::new(rects.to_vec(), glue.iter().copied(), k.base().clone(), k.is_open())?;
        if s.is_valid() && immerses(k, &s) {
            out.push(simplify(&s));
        }
        for &pair in free.iter().filter(|p| !glue.contains(p)) {
            let mut next = glue.clone();
            next.insert(pair);
            let next = close(next);
            if seen.insert(next.clone()) {
                if seen.len() > MAX_QUOTIENTS {
                    return Err(DiskError::TooLarge(format!("more than {MAX_QUOTIENTS} quotients")));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(dedupe(out))
}

/// Smallest open disks around embedded images of the open surface `u`: the
/// disks bounded by its outer boundary, based over `u`'s basepoint on every
/// sheet where `u` embeds.
pub fn smallest_open_disks_of_embeddings<T: Scalar>(u: &Surface<T>) -> Result<Vec<Surface<T>>, DiskError> {
    if !u.is_open() {
        return Err(DiskError::PreconditionViolated("expected an open surface".into()));
    }
    match u.classify() {
        Classification::Disk => return Ok(vec![u.clone()]),
        Classification::PuncturedDisk(_) => {}
        Classification::NotAPlanarPiece => {
            return Err(DiskError::PreconditionViolated("expected a disk or punctured disk".into()))
        }
    }
    let loops = u.loops()?;
    let outer = loops
        .iter()
        .find(|l| l.turning_number() == 1)
        .ok_or_else(|| DiskError::PreconditionViolated("no outer boundary".into()))?;
    let at = &u.base().point;
    let mut out = Vec::new();
    for v in disks_bounded_by(outer) {
        let mut sheets = BTreeSet::new();
        for (i, r) in v.rects().iter().enumerate() {
            if !r.contains(at) {
                continue;
            }
            let p = SurfacePoint::new(i, at.clone());
            if !sheets.insert(v.class_of(&p)?) {
                continue;
            }
            let Ok(vp) = v.with_base(p).and_then(|v| v.with_open(true)) else { continue };
            if vp.is_valid() && embeds(u, &vp) {
                let f = fuse(&[u.clone(), vp])?.surface;
                if f.classify() == Classification::Disk {
                    out.push(f);
                }
            }
        }
    }
    Ok(dedupe(out))
}

/// Insert midlines between consecutive lines.
fn halve<T: Scalar>(g: &Grid<T>) -> Grid<T> {
    let mids = |v: &[T]| -> Vec<T> {
        let m: Vec<T> = v.windows(2).map(|w| (w[0].clone() + w[1].clone()) * T::half()).collect();
        v.iter().cloned().chain(m).collect()
    };
    Grid::new(mids(g.xs()), mids(g.ys()))
}

/// Cells of a grid refined `2^times` fold that lie inside half-index `h`.
fn refine_index(h: usize, times: u32) -> std::ops::RangeInclusive<usize> {
    let f = 1usize << times;
    if h.is_multiple_of(2) {
        f * h..=f * h
    } else {
        f * h - (f - 1)..=f * h + (f - 1)
    }
}

/// A closed rational union strictly between `k1` and `k3`: a thin collar of
/// the image of `k1`, thickened at corner contacts, and filled to a disk when
/// `k3` is one.
pub fn nested_rational_union<T: Scalar>(
    k1: &Surface<T>,
    k3: &Surface<T>,
    witness: &ImmersionMap<T>,
) -> Result<Surface<T>, DiskError> {
    let violated = |m: &str| Err(DiskError::PreconditionViolated(m.into()));
    if k1.is_open() || k3.is_open() {
        return violated("both unions must be closed");
    }
    if !witness.is_injective() || witness.target().rect_count() != k3.rects().len() {
        return violated("the witness is not an embedding into k3");
    }
    let joint = witness.target();
    let image = witness.image_classes();
    if (0..joint.len()).any(|d| image[d] && joint.is_boundary(d)) {
        return violated("k1 meets the boundary of k3");
    }
    const TIMES: u32 = 2;
    let grid = halve(&halve(joint.grid()));
    let rects: Vec<Rect<T>> = k3.rects().iter().map(|r| r.translate(witness.shift())).collect();
    let c = CellComplex::build(&rects, k3.glue(), grid);
    let mut inside = vec![false; c.len()];
    for d in (0..joint.len()).filter(|&d| image[d]) {
        let class = joint.class(d);
        for hx in refine_index(class.cell.hx, TIMES) {
            for hy in refine_index(class.cell.hy, TIMES) {
                let id = c.class_of(class.members[0], Cell::new(hx, hy)).expect("refined cell in its rectangle");
                inside[id] = true;
            }
        }
    }
    let close = |faces: &[bool]| -> Vec<bool> {
        let mut out = faces.to_vec();
        for f in c.faces().filter(|&f| faces[f]) {
            for &d in &c.class(f).down {
                out[d] = true;
            }
        }
        out
    };
    let mut faces = vec![false; c.len()];
    for id in (0..c.len()).filter(|&id| inside[id]) {
        for f in c.faces_around(id) {
            faces[f] = true;
        }
    }
    // Corner contacts get the full star of the vertex.
    loop {
        let set = close(&faces);
        let pinched: Vec<ClassId> = c
            .vertices()
            .filter(|&v| set[v] && c.vertex_kind(v) == VertexKind::Interior)
            .filter(|&v| {
                let fs = c.faces_around(v);
                let kept: Vec<ClassId> = fs.iter().copied().filter(|&f| faces[f]).collect();
                kept.len() == 2 && {
                    let (a, b) = (c.class(kept[0]).cell, c.class(kept[1]).cell);
                    a.hx != b.hx && a.hy != b.hy
                }
            })
            .collect();
        if pinched.is_empty() {
            break;
        }
        for v in pinched {
            for f in c.faces_around(v) {
                faces[f] = true;
            }
        }
    }
    let mut set = close(&faces);
    if (0..c.len()).any(|id| set[id] && c.is_boundary(id)) {
        return violated("k1 is too close to the boundary of k3");
    }
    if k3.classify() == Classification::Disk {
        set = fill_holes(&c, &set);
    }
    let base = &k1.base().point;
    let host_base = witness.map_point(k1.base()).expect("the basepoint maps");
    let base_class = c.locate(host_base.rect, base).expect("base in its rectangle");
    surface_on(&c, &set, base, base_class, false)
}

/// The subbasis search window: coordinates lie in `[-w, w]`.
pub const SUBBASIS_WINDOW: i64 = 1;

/// [`enumerate_subbasis_in`] on the default window.
pub fn enumerate_subbasis<T: Scalar>(max_rects: usize, denom_bound: i64) -> Vec<Surface<T>> {
    enumerate_subbasis_in(max_rects, denom_bound, SUBBASIS_WINDOW)
}

/// Every closed union of at most `max_rects` rectangles with corners in
/// `[-window, window]²` whose denominators are at most `denom_bound`, based at
/// the origin, up to isomorphism. The order is deterministic.
pub fn enumerate_subbasis_in<T: Scalar>(max_rects: usize, denom_bound: i64, window: i64) -> Vec<Surface<T>> {
    assert!(max_rects >= 1 && denom_bound >= 1 && window >= 1);
    let coords: Vec<T> = (1..=denom_bound)
        .flat_map(|d| (-window * d..=window * d).map(move |n| (n, d)))
        .map(|(n, d)| T::from_int(n) / T::from_int(d))
        .collect::<BTreeSet<T>>()
        .into_iter()
        .collect();
    let intervals: Vec<(T, T)> = (0..coords.len())
        .flat_map(|i| (i + 1..coords.len()).map(move |j| (i, j)))
        .map(|(i, j)| (coords[i].clone(), coords[j].clone()))
        .collect();
    let all: Vec<Rect<T>> = intervals
        .iter()
        .flat_map(|x| intervals.iter().map(move |y| (x, y)))
        .map(|(x, y)| Rect::new(x.0.clone(), x.1.clone(), y.0.clone(), y.1.clone()).expect("proper intervals"))
        .collect();
    let origin = Point::origin();
    let mut found = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn extend<T: Scalar>(
        all: &[Rect<T>],
        chosen: &mut Vec<usize>,
        max: usize,
        origin: &Point<T>,
        found: &mut Vec<Surface<T>>,
    ) {
        if !chosen.is_empty() {
            let rects: Vec<Rect<T>> = chosen.iter().map(|&i| all[i].clone()).collect();
            let pairs: Vec<(usize, usize)> = (0..rects.len())
                .flat_map(|i| (i + 1..rects.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| rects[i].touches(&rects[j]))
                .collect();
            if pairs.len() + 1 >= rects.len() {
                for mask in 0u64..1 << pairs.len() {
                    let glue: Vec<(usize, usize)> =
                        (0..pairs.len()).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
                    if glue.len() + 1 < rects.len() {
                        continue;
                    }
                    for b in (0..rects.len()).filter(|&b| rects[b].contains(origin)) {
                        let base = SurfacePoint::new(b, origin.clone());
                        if let Ok(s) = Surface::checked(rects.clone(), glue.iter().copied(), base, false) {
                            found.push(s);
                        }
                    }
                }
            }
        }
        if chosen.len() == max {
            return;
        }
        let from = chosen.last().copied().unwrap_or(0);
        for i in from..all.len() {
            chosen.push(i);
            extend(all, chosen, max, origin, found);
            chosen.pop();
        }
    }
    extend(&all, &mut chosen, max_rects, &origin, &mut found);
    dedupe(found)
}

#[cfg(test)]
mod tests;
