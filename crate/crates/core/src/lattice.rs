//! Joins and meets in the immersion order, and limits of monotone chains.

use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::geom::{Cell, Grid, Point};
use crate::morphism::{convergence_certificate, find_immersion, immerses, CertificateReport, ImmersionMap};
use crate::scalar::Scalar;
use crate::surface::{assemble, AssembleError, CellComplex, ClassId, Classification, Surface, SurfacePoint};
use crate::unionfind::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("no inputs")]
    Empty,
    #[error("the identification is not locally a surface: {0}")]
    NotASurface(String),
    #[error("input {0} does not immerse into the result")]
    Injection(usize),
    #[error("not a chain: step {0} fails")]
    NotAChain(usize),
    #[error("the two points are not identified")]
    NotIdentified,
}

impl From<AssembleError> for LatticeError {
    fn from(e: AssembleError) -> Self {
        LatticeError::NotASurface(e.to_string())
    }
}

/// The join with its structure maps.
#[derive(Clone, Debug)]
pub struct FusionResult<T> {
    pub surface: Surface<T>,
    pub injections: Vec<ImmersionMap<T>>,
}

/// A meet: a surface, or the bottom element below every surface.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum CoreResult<T> {
    Surface(Surface<T>),
    Empty,
}

impl<T: Scalar> CoreResult<T> {
    pub fn surface(&self) -> Option<&Surface<T>> {
        match self {
            CoreResult::Surface(s) => Some(s),
            CoreResult::Empty => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, CoreResult::Empty)
    }
}

/// Inputs translated so their basepoints sit at the origin, built on one grid.
struct Joint<T> {
    grid: Grid<T>,
    complexes: Vec<CellComplex<T>>,
    bases: Vec<ClassId>,
    /// Cells usable in each input: all of a closed one, the interior of an open one.
    active: Vec<Vec<bool>>,
}

impl<T: Scalar> Joint<T> {
    fn new(inputs: &[Surface<T>]) -> Self {
        let normal: Vec<Surface<T>> = inputs.iter().map(|s| s.normalize()).collect();
        let grid = normal
            .iter()
            .map(|s| s.complex().grid().clone())
            .reduce(|a, b| a.merged(&b))
            .expect("nonempty");
        let complexes: Vec<CellComplex<T>> =
            normal.iter().map(|s| CellComplex::build(s.rects(), s.glue(), grid.clone())).collect();
        let bases = normal
            .iter()
            .zip(&complexes)
            .map(|(s, c)| c.locate(s.base().rect, &Point::origin()).expect("base in its rectangle"))
            .collect();
        let active = normal
            .iter()
            .zip(&complexes)
            .map(|(s, c)| (0..c.len()).map(|id| !s.is_open() || !c.is_boundary(id)).collect())
            .collect();
        Joint { grid, complexes, bases, active }
    }
}

fn base_face<K: PartialEq>(faces: &[Cell], keys: impl Fn(usize) -> Option<K>, base: &K) -> Option<usize> {
    (0..faces.len()).find(|&i| keys(i).as_ref() == Some(base))
}

/// Key naming the class of a cell in a face's closure.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum FuseKey {
    Class(usize),
    /// A boundary cell of open inputs only, private to one face.
    Lone(usize, Cell),
}

/// The least upper bound: the smallest identification of the inputs' cells
/// that contains the basepoints and is closed under continuation.
pub fn fuse<T: Scalar>(inputs: &[Surface<T>]) -> Result<FusionResult<T>, LatticeError> {
    if inputs.is_empty() {
        return Err(LatticeError::Empty);
    }
    let joint = Joint::new(inputs);
    let offsets: Vec<usize> = joint
        .complexes
        .iter()
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += c.len();
            Some(o)
        })
        .collect();
    let total: usize = joint.complexes.iter().map(|c| c.len()).sum();
    let owner = |g: usize| offsets.partition_point(|&o| o <= g) - 1;
    let local = |g: usize| {
        let k = owner(g);
        (k, g - offsets[k])
    };
    let is_active = |g: usize| {
        let (k, id) = local(g);
        joint.active[k][id]
    };

    let mut uf = UnionFind::new(total);
    for k in 1..inputs.len() {
        uf.union(offsets[0] + joint.bases[0], offsets[k] + joint.bases[k]);
    }
    loop {
        let mut changed = false;
        let mut seen: HashMap<(usize, Cell), usize> = HashMap::new();
        for g in 0..total {
            if !is_active(g) {
                continue;
            }
            let (k, id) = local(g);
            let c = &joint.complexes[k];
            let class = c.class(id);
            let root = uf.find(g);
            for &n in class.up.iter().chain(&class.down) {
                let gn = offsets[k] + n;
                if !is_active(gn) {
                    continue;
                }
                match seen.get(&(root, c.class(n).cell)) {
                    Some(&other) => changed |= uf.union(other, gn),
                    None => {
                        seen.insert((root, c.class(n).cell), gn);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // One face per group of identified active faces.
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for g in 0..total {
        let (k, id) = local(g);
        if is_active(g) && joint.complexes[k].class(id).dim() == 2 {
            members.entry(uf.find(g)).or_default().push(g);
        }
    }
    let groups: Vec<&Vec<usize>> = members.values().collect();
    let faces: Vec<Cell> = groups
        .iter()
        .map(|m| {
            let (k, id) = local(m[0]);
            joint.complexes[k].class(id).cell
        })
        .collect();
    let mut table: HashMap<(usize, Cell), FuseKey> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        let mut cells = f.boundary();
        cells.push(*f);
        for cell in cells {
            let found = groups[i].iter().find_map(|&g| {
                let (k, id) = local(g);
                let n = joint.complexes[k].neighbor_at(id, cell).expect("closure is complete");
                joint.active[k][n].then_some(offsets[k] + n)
            });
            let key = match found {
                Some(g) => FuseKey::Class(uf.find(g)),
                None => FuseKey::Lone(i, cell),
            };
            table.insert((i, cell), key);
        }
    }
    // Cells that are boundary in every input get their identifications
    // from the faces glued along active edges next to them.
    let entries: Vec<(usize, Cell)> = table.keys().copied().collect();
    let slot: HashMap<(usize, Cell), usize> = entries.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    let mut joined = UnionFind::new(entries.len());
    let mut by_key: HashMap<&FuseKey, Vec<usize>> = HashMap::new();
    for (k, e) in entries.iter().enumerate() {
        if let FuseKey::Class(_) = table[e] {
            by_key.entry(&table[e]).or_default().push(k);
        }
    }
    for group in by_key.values() {
        for &k in &group[1..] {
            joined.union(group[0], k);
            let ((i, e), (j, _)) = (entries[group[0]], entries[k]);
            if e.dim() == 1 {
                for v in e.boundary() {
                    joined.union(slot[&(i, v)], slot[&(j, v)]);
                }
            }
        }
    }
    let base_key = FuseKey::Class(uf.find(offsets[0] + joint.bases[0]));
    let base_cell = joint.complexes[0].class(joint.bases[0]).cell;
    let bi = base_face(&faces, |i| table.get(&(i, base_cell)).cloned(), &base_key)
        .ok_or_else(|| LatticeError::NotASurface("no face at the basepoint".into()))?;
    let roots: Vec<usize> = {
        let mut j = joined;
        (0..entries.len()).map(|k| j.find(k)).collect()
    };
    let open = inputs.iter().all(|s| s.is_open());
    let surface = assemble(&joint.grid, &faces, |i, c| roots[slot[&(i, c)]], SurfacePoint::new(bi, Point::origin()), open)?;
    // Closed pieces meeting only at a boundary basepoint have no join.
    if !surface.is_valid() {
        return Err(LatticeError::NotASurface(surface.report().to_string()));
    }

    let mut injections = Vec::with_capacity(inputs.len());
    for (k, s) in inputs.iter().enumerate() {
        injections.push(find_immersion(s, &surface).map_err(|_| LatticeError::Injection(k))?);
    }
    Ok(FusionResult { surface, injections })
}

/// The greatest lower bound, built as the basepoint component of the fibre
/// product of the inputs' cells.
pub fn core<T: Scalar>(inputs: &[Surface<T>]) -> Result<CoreResult<T>, LatticeError> {
    if inputs.is_empty() {
        return Err(LatticeError::Empty);
    }
    let joint = Joint::new(inputs);
    let n = inputs.len();
    let cs = &joint.complexes;

    // Face tuples reachable from the basepoint across shared edges.
    let base_cell = cs[0].class(joint.bases[0]).cell;
    let mut index: HashMap<Vec<ClassId>, usize> = HashMap::new();
    let mut tuples: Vec<Vec<ClassId>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut push = |t: Vec<ClassId>, tuples: &mut Vec<Vec<ClassId>>, queue: &mut VecDeque<usize>| {
        if !index.contains_key(&t) {
            index.insert(t.clone(), tuples.len());
            queue.push_back(tuples.len());
            tuples.push(t);
        }
    };
    for f in cs[0].faces_around(joint.bases[0]) {
        let cell = cs[0].class(f).cell;
        let t: Option<Vec<ClassId>> =
            (0..n).map(|k| cs[k].neighbors_at(joint.bases[k], cell).into_iter().find(|&x| joint.active[k][x])).collect();
        if let Some(t) = t {
            push(t, &mut tuples, &mut queue);
        }
    }
    if tuples.is_empty() {
        return Ok(CoreResult::Empty);
    }
    while let Some(i) = queue.pop_front() {
        let t = tuples[i].clone();
        let cell = cs[0].class(t[0]).cell;
        for e in cell.boundary().into_iter().filter(|c| c.is_edge()) {
            let (Some(hx), Some(hy)) = ((2 * e.hx).checked_sub(cell.hx), (2 * e.hy).checked_sub(cell.hy)) else {
                continue;
            };
            let across = Cell::new(hx, hy);
            let next: Option<Vec<ClassId>> = (0..n)
                .map(|k| {
                    let ek = cs[k].neighbor_at(t[k], e)?;
                    if !joint.active[k][ek] {
                        return None;
                    }
                    cs[k].neighbors_at(ek, across).into_iter().find(|&x| joint.active[k][x])
                })
                .collect();
            if let Some(next) = next {
                push(next, &mut tuples, &mut queue);
            }
        }
    }

    let faces: Vec<Cell> = tuples.iter().map(|t| cs[0].class(t[0]).cell).collect();
    let closure_tuple =
        |i: usize, cell: Cell| -> Vec<ClassId> { (0..n).map(|k| cs[k].neighbor_at(tuples[i][k], cell).expect("closure")).collect() };
    // Around a vertex tuple, faces form wings joined through shared edge
    // tuples; only faces of one wing are glued at the vertex.
    let mut by_vertex: HashMap<Vec<ClassId>, Vec<usize>> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for v in f.boundary().into_iter().filter(|c| c.is_vertex()) {
            by_vertex.entry(closure_tuple(i, v)).or_default().push(i);
        }
    }
    let mut wing: HashMap<(usize, Vec<ClassId>), usize> = HashMap::new();
    for (v, around) in &by_vertex {
        let mut uf = UnionFind::new(around.len());
        for a in 0..around.len() {
            for b in a + 1..around.len() {
                let (fa, fb) = (faces[around[a]], faces[around[b]]);
                let (dx, dy) = (fa.hx.abs_diff(fb.hx), fa.hy.abs_diff(fb.hy));
                if dx + dy == 2 {
                    let e = Cell::new((fa.hx + fb.hx) / 2, (fa.hy + fb.hy) / 2);
                    if closure_tuple(around[a], e) == closure_tuple(around[b], e) {
                        uf.union(a, b);
                    }
                }
            }
        }
        for a in 0..around.len() {
            let root = (0..around.len()).find(|&b| uf.same(a, b)).expect("self");
            wing.insert((around[a], v.clone()), around[root]);
        }
    }
    let key = |i: usize, cell: Cell| -> (Vec<ClassId>, usize) {
        let t = closure_tuple(i, cell);
        let w = if cell.is_vertex() { wing[&(i, t.clone())] } else { 0 };
        (t, w)
    };
    let base_tuple: Vec<ClassId> = joint.bases.clone();
    let Some(bi) = (0..faces.len()).find(|&i| closure_tuple(i, base_cell) == base_tuple) else {
        return Ok(CoreResult::Empty);
    };
    let open = inputs.iter().any(|s| s.is_open());
    let Ok(surface) = assemble(&joint.grid, &faces, key, SurfacePoint::new(bi, Point::origin()), open) else {
        return Ok(CoreResult::Empty);
    };
    if !surface.is_valid() || !inputs.iter().all(|p| immerses(&surface, p)) {
        return Ok(CoreResult::Empty);
    }
    Ok(CoreResult::Surface(surface))
}

/// Disks among the chain, used as probes.
fn disk_probes<T: Scalar>(chain: &[Surface<T>]) -> Vec<Surface<T>> {
    chain.iter().filter(|s| s.classify() == Classification::Disk).cloned().collect()
}

/// Limit of an increasing chain: its fusion, with a certificate on the prefix.
pub fn direct_limit<T: Scalar>(chain: &[Surface<T>]) -> Result<(FusionResult<T>, CertificateReport), LatticeError> {
    if chain.is_empty() {
        return Err(LatticeError::Empty);
    }
    if let Some(i) = (0..chain.len() - 1).find(|&i| !immerses(&chain[i], &chain[i + 1])) {
        return Err(LatticeError::NotAChain(i));
    }
    let fused = fuse(chain)?;
    let report = convergence_certificate(chain, Some(&fused.surface), &disk_probes(chain))
        .expect("probes are disks and the chain is nonempty");
    Ok((fused, report))
}

/// Limit of a decreasing chain: its core, with a certificate on the prefix.
pub fn inverse_limit<T: Scalar>(chain: &[Surface<T>]) -> Result<(CoreResult<T>, CertificateReport), LatticeError> {
    if chain.is_empty() {
        return Err(LatticeError::Empty);
    }
    if let Some(i) = (0..chain.len() - 1).find(|&i| !immerses(&chain[i + 1], &chain[i])) {
        return Err(LatticeError::NotAChain(i));
    }
    let meet = core(chain)?;
    let report = convergence_certificate(chain, meet.surface(), &disk_probes(chain))
        .expect("probes are disks and the chain is nonempty");
    Ok((meet, report))
}

fn identifies<T: Scalar>(
    inputs: &[Surface<T>],
    keep: &[usize],
    p: (usize, &SurfacePoint<T>),
    q: (usize, &SurfacePoint<T>),
) -> bool {
    let sub: Vec<Surface<T>> = keep.iter().map(|&k| inputs[k].clone()).collect();
    let Ok(f) = fuse(&sub) else { return false };
    let pos = |k: usize| keep.iter().position(|&x| x == k).expect("kept");
    let (Some(a), Some(b)) = (f.injections[pos(p.0)].map_point(p.1), f.injections[pos(q.0)].map_point(q.1)) else {
        return false;
    };
    f.surface.same_point(&a, &b).unwrap_or(false)
}

/// A small sub-family whose fusion already identifies `p` (in input `i`) with
/// `q` (in input `j`), found by dropping inputs one at a time.
pub fn fusion_finiteness_witness<T: Scalar>(
    inputs: &[Surface<T>],
    i: usize,
    p: &SurfacePoint<T>,
    j: usize,
    q: &SurfacePoint<T>,
) -> Result<Vec<usize>, LatticeError> {
    let mut keep: Vec<usize> = (0..inputs.len()).collect();
    if !identifies(inputs, &keep, (i, p), (j, q)) {
        return Err(LatticeError::NotIdentified);
    }
    for k in 0..inputs.len() {
        if k == i || k == j {
            continue;
        }
        let trial: Vec<usize> = keep.iter().copied().filter(|&x| x != k).collect();
        if identifies(inputs, &trial, (i, p), (j, q)) {
            keep = trial;
        }
    }
    Ok(keep)
}
