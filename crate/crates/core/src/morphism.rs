//! Immersions and embeddings between surfaces, found by analytic continuation
//! over a common grid refinement.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::geom::{Grid, Point};
use crate::scalar::Scalar;
use crate::surface::{CellComplex, ClassId, Classification, SubUnion, Surface, SurfaceError, SurfacePoint};

/// Where continuation broke down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// The target has no face meeting its basepoint where the source has one.
    Base { cell: String },
    /// Crossing an edge of the source finds no face in the target.
    MissingFace { face: ClassId, edge: String },
    /// Two continuations reach one source cell at different target cells.
    Monodromy { at: String },
    /// A cell lands on the boundary of an open target.
    NotInterior { at: String },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::Base { cell } => write!(f, "no matching face at the basepoint near {cell}"),
            Obstruction::MissingFace { face, edge } => {
                write!(f, "continuation from face {face} across the edge at {edge} leaves the target")
            }
            Obstruction::Monodromy { at } => write!(f, "continuations disagree at {at}"),
            Obstruction::NotInterior { at } => write!(f, "image meets the boundary of the open target at {at}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no immersion: {0}")]
pub struct NoImmersion(pub Obstruction);

/// The unique immersion from a source to a target, at cell level on a common
/// grid. Target coordinates are shifted so both basepoints develop alike.
#[derive(Clone, Debug)]
pub struct ImmersionMap<T> {
    source: CellComplex<T>,
    target: CellComplex<T>,
    shift: Point<T>,
    cell_map: Vec<Option<ClassId>>,
    injective: bool,
    source_rects: Vec<crate::geom::Rect<T>>,
}

impl<T: Scalar> ImmersionMap<T> {
    pub fn source(&self) -> &CellComplex<T> {
        &self.source
    }

    /// The target complex, in source coordinates.
    pub fn target(&self) -> &CellComplex<T> {
        &self.target
    }

    /// Source developed coordinates minus target developed coordinates.
    pub fn shift(&self) -> &Point<T> {
        &self.shift
    }

    /// Image of each source class; `None` for boundary cells of an open source.
    pub fn cell_map(&self) -> &[Option<ClassId>] {
        &self.cell_map
    }

    pub fn image(&self, id: ClassId) -> Option<ClassId> {
        self.cell_map[id]
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    /// Target classes hit by the map.
    pub fn image_classes(&self) -> Vec<bool> {
        let mut hit = vec![false; self.target.len()];
        for d in self.cell_map.iter().flatten() {
            hit[*d] = true;
        }
        hit
    }

    /// Image of a source point, named in target coordinates.
    pub fn map_point(&self, p: &SurfacePoint<T>) -> Option<SurfacePoint<T>> {
        let c = self.source.locate(p.rect, &p.point)?;
        let d = self.cell_map[c]?;
        Some(SurfacePoint::new(self.target.class(d).members[0], p.point.sub(&self.shift)))
    }

    /// The image as a surface on the source rectangles: two rectangles are
    /// glued when the map identifies their whole overlap.
    pub fn image_surface(&self, source: &Surface<T>) -> Result<Surface<T>, SurfaceError> {
        let rects = &self.source_rects;
        let grid = self.source.grid();
        let mut glue = Vec::new();
        for i in 0..rects.len() {
            for j in i + 1..rects.len() {
                let Some(b) = rects[i].meet_bounds(&rects[j]) else { continue };
                let (x0, x1) = (grid.line_x(&b[0]).unwrap(), grid.line_x(&b[1]).unwrap());
                let (y0, y1) = (grid.line_y(&b[2]).unwrap(), grid.line_y(&b[3]).unwrap());
                let (mut same, mut differ) = (false, false);
                for hx in 2 * x0..=2 * x1 {
                    for hy in 2 * y0..=2 * y1 {
                        let cell = crate::geom::Cell::new(hx, hy);
                        let a = self.source.class_of(i, cell).and_then(|c| self.cell_map[c]);
                        let b = self.source.class_of(j, cell).and_then(|c| self.cell_map[c]);
                        match (a, b) {
                            (Some(a), Some(b)) if a == b => same = true,
                            (Some(_), Some(_)) => differ = true,
                            _ => {}
                        }
                    }
                }
                if same && differ {
                    return Err(SurfaceError::InvalidSubUnion(format!(
                        "rectangles {i} and {j} are only partly identified by the immersion"
                    )));
                }
                if same {
                    glue.push((i, j));
                }
            }
        }
        Surface::new(rects.clone(), glue, source.base().clone(), source.is_open())
    }
}

fn boundary_flags<T: Scalar>(c: &CellComplex<T>, wanted: bool) -> Vec<bool> {
    if !wanted {
        return vec![false; c.len()];
    }
    (0..c.len()).map(|id| c.is_boundary(id)).collect()
}

/// Continue a map from `alpha0 ↦ beta0` over the whole source. Boundary cells
/// of an open source are skipped; images must avoid the boundary of an open
/// target.
pub fn continue_from<T: Scalar>(
    a: &CellComplex<T>,
    alpha0: ClassId,
    a_open: bool,
    b: &CellComplex<T>,
    beta0: ClassId,
    b_open: bool,
) -> Result<(Vec<Option<ClassId>>, bool), Obstruction> {
    let a_bd = boundary_flags(a, a_open);
    let b_bd = boundary_flags(b, b_open);
    let active = |c: ClassId| !a_bd[c];
    let mut map: Vec<Option<ClassId>> = vec![None; a.len()];
    let at = |c: ClassId| format!("{}", a.sample(c));

    let assign = |map: &mut Vec<Option<ClassId>>, c: ClassId, d: ClassId| -> Result<bool, Obstruction> {
        match map[c] {
            Some(prev) if prev == d => Ok(false),
            Some(_) => Err(Obstruction::Monodromy { at: at(c) }),
            None => {
                if b_bd[d] {
                    return Err(Obstruction::NotInterior { at: at(c) });
                }
                map[c] = Some(d);
                Ok(true)
            }
        }
    };

    let mut queue = VecDeque::new();
    if active(alpha0) {
        assign(&mut map, alpha0, beta0)?;
    }
    for f in a.faces_around(alpha0) {
        let cell = a.class(f).cell;
        let g = b
            .neighbors_at(beta0, cell)
            .into_iter()
            .next()
            .ok_or_else(|| Obstruction::Base { cell: format!("{}", a.sample(f)) })?;
        assign(&mut map, f, g)?;
        if !queue.contains(&f) {
            queue.push_back(f);
        }
    }
    while let Some(f) = queue.pop_front() {
        let g = map[f].expect("queued faces are mapped");
        for &d in &a.class(f).down {
            if !active(d) {
                continue;
            }
            let d2 = b.neighbor_at(g, a.class(d).cell).expect("closure of a face is complete");
            assign(&mut map, d, d2)?;
        }
        for &e in &a.class(f).down {
            if a.class(e).dim() != 1 || !active(e) {
                continue;
            }
            let e2 = map[e].expect("assigned above");
            for h in a.faces_around(e) {
                if h == f {
                    continue;
                }
                let h2 = b
                    .neighbors_at(e2, a.class(h).cell)
                    .into_iter()
                    .find(|&x| b.class(x).dim() == 2)
                    .ok_or_else(|| Obstruction::MissingFace { face: f, edge: at(e) })?;
                if assign(&mut map, h, h2)? {
                    queue.push_back(h);
                }
            }
        }
    }

    let mut seen: HashMap<ClassId, ClassId> = HashMap::new();
    let mut injective = true;
    for (c, d) in map.iter().enumerate() {
        if let Some(d) = d {
            if seen.insert(*d, c).is_some() {
                injective = false;
            }
        }
    }
    Ok((map, injective))
}

/// Find the unique immersion on a grid refined further by `extra`.
pub fn find_immersion_on<T: Scalar>(
    a: &Surface<T>,
    b: &Surface<T>,
    extra: Option<&Grid<T>>,
) -> Result<ImmersionMap<T>, NoImmersion> {
    let shift = a.base().point.sub(&b.base().point);
    let b_rects: Vec<_> = b.rects().iter().map(|r| r.translate(&shift)).collect();
    let mut grid = a.complex().grid().merged(&Grid::from_rects(&b_rects));
    if let Some(extra) = extra {
        grid = grid.merged(extra);
    }
    let ca = CellComplex::build(a.rects(), a.glue(), grid.clone());
    let cb = CellComplex::build(&b_rects, b.glue(), grid);
    let alpha0 = ca.locate(a.base().rect, &a.base().point).expect("base in its rectangle");
    let beta0 = cb.locate(b.base().rect, &a.base().point).expect("base in its rectangle");
    let (cell_map, injective) =
        continue_from(&ca, alpha0, a.is_open(), &cb, beta0, b.is_open()).map_err(NoImmersion)?;
    Ok(ImmersionMap { source: ca, target: cb, shift, cell_map, injective, source_rects: a.rects().to_vec() })
}

/// The unique basepoint-preserving, dev-respecting map from `a` into `b`.
pub fn find_immersion<T: Scalar>(a: &Surface<T>, b: &Surface<T>) -> Result<ImmersionMap<T>, NoImmersion> {
    find_immersion_on(a, b, None)
}

pub fn immerses<T: Scalar>(a: &Surface<T>, b: &Surface<T>) -> bool {
    find_immersion(a, b).is_ok()
}

pub fn embeds<T: Scalar>(a: &Surface<T>, b: &Surface<T>) -> bool {
    find_immersion(a, b).is_ok_and(|m| m.is_injective())
}

/// Mutual immersion.
pub fn isomorphic<T: Scalar>(a: &Surface<T>, b: &Surface<T>) -> bool {
    a.is_open() == b.is_open() && immerses(a, b) && immerses(b, a)
}

/// Drop surfaces isomorphic to an earlier one, keeping first occurrences.
pub fn dedupe<T: Scalar>(items: impl IntoIterator<Item = Surface<T>>) -> Vec<Surface<T>> {
    let mut buckets: HashMap<crate::surface::Fingerprint<T>, Vec<usize>> = HashMap::new();
    let mut out: Vec<Surface<T>> = Vec::new();
    for s in items {
        let key = s.fingerprint();
        let bucket = buckets.entry(key).or_default();
        if bucket.iter().any(|&i| isomorphic(&out[i], &s)) {
            continue;
        }
        bucket.push(out.len());
        out.push(s);
    }
    out
}

/// The four kinds of subbasic open sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubbasisKind {
    Immerses,
    Embeds,
    NotImmerses,
    NotEmbeds,
}

pub fn subbasis_membership<T: Scalar>(kind: SubbasisKind, test_set: &Surface<T>, q: &Surface<T>) -> bool {
    match kind {
        SubbasisKind::Immerses => immerses(test_set, q),
        SubbasisKind::Embeds => embeds(test_set, q),
        SubbasisKind::NotImmerses => !immerses(test_set, q),
        SubbasisKind::NotEmbeds => !embeds(test_set, q),
    }
}

/// Grid through the given points and sub-union pieces.
fn extra_grid<T: Scalar>(sub: &SubUnion<T>, points: &[Point<T>]) -> Grid<T> {
    let g = Grid::from_rects(sub.pieces.iter().map(|p| &p.1));
    g.merged(&Grid::new(points.iter().map(|p| p.x.clone()), points.iter().map(|p| p.y.clone())))
}

/// The immersion, the source classes covered by a sub-union, and a target class.
type BundleHit<T> = (ImmersionMap<T>, Vec<bool>, ClassId);

/// Source classes covered by `sub` on the map's grid, and the target class of `q`.
fn locate_for_bundle<T: Scalar>(
    k: &Surface<T>,
    sub: &SubUnion<T>,
    target: &Surface<T>,
    q: &SurfacePoint<T>,
) -> Result<Option<BundleHit<T>>, SurfaceError> {
    target.class_of(q)?;
    let shift = k.base().point.sub(&target.base().point);
    let q_dev = q.point.add(&shift);
    let extra = extra_grid(sub, std::slice::from_ref(&q_dev));
    let Ok(map) = find_immersion_on(k, target, Some(&extra)) else { return Ok(None) };
    let covered = sub.place_on(k, map.source().grid())?;
    let qc = map.target().locate(q.rect, &q_dev).expect("q lies in its rectangle");
    Ok(Some((map, covered.classes(sub.open).to_vec(), qc)))
}

/// Whether `K ⇝ target` and `q` is the image of a point of the open set `u ⊂ K`.
pub fn bundle_membership_plus<T: Scalar>(
    k: &Surface<T>,
    u: &SubUnion<T>,
    target: &Surface<T>,
    q: &SurfacePoint<T>,
) -> Result<bool, SurfaceError> {
    let Some((map, covered, qc)) = locate_for_bundle(k, u, target, q)? else { return Ok(false) };
    Ok((0..covered.len()).any(|c| covered[c] && map.image(c) == Some(qc)))
}

/// Whether `K2 ⇝ target` and `q` is not the image of any point of the closed
/// union `k1 ⊂ K2`.
pub fn bundle_membership_minus<T: Scalar>(
    k2: &Surface<T>,
    k1: &SubUnion<T>,
    target: &Surface<T>,
    q: &SurfacePoint<T>,
) -> Result<bool, SurfaceError> {
    let k1 = SubUnion { pieces: k1.pieces.clone(), open: false };
    let Some((map, covered, qc)) = locate_for_bundle(k2, &k1, target, q)? else { return Ok(false) };
    Ok(!(0..covered.len()).any(|c| covered[c] && map.image(c) == Some(qc)))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("probe {0} is not a closed disk")]
    InvalidProbe(usize),
    #[error("empty sequence")]
    EmptySequence,
}

/// Criterion A for one probe: a closed disk in the limit must immerse into a
/// tail of the sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailCheck {
    pub probe: usize,
    /// The probe embeds in the limit, so the criterion applies.
    pub applies: bool,
    /// First sampled index from which the probe immerses into every later term.
    pub from_index: Option<usize>,
    pub passed: bool,
}

/// Criterion B for one probe: a disk that keeps embedding into the sequence
/// must immerse into the limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitCheck {
    pub probe: usize,
    /// The probe embeds in the last sampled term, standing in for
    /// "infinitely many terms".
    pub applies: bool,
    pub immerses_in_limit: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateReport {
    pub tail: Vec<TailCheck>,
    pub limit: Vec<LimitCheck>,
    pub passed: bool,
}

impl CertificateReport {
    pub const CAVEAT: &'static str = "checked on a finite prefix with finitely many probes: evidence, not proof";
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate: {}", if self.passed { "pass" } else { "fail" })?;
        for t in &self.tail {
            let from = t.from_index.map_or("never".to_string(), |i| i.to_string());
            writeln!(f, "  A probe {}: applies={} from={} {}", t.probe, t.applies, from, ok(t.passed))?;
        }
        for l in &self.limit {
            writeln!(
                f,
                "  B probe {}: applies={} immerses_in_limit={} {}",
                l.probe,
                l.applies,
                l.immerses_in_limit,
                ok(l.passed)
            )?;
        }
        write!(f, "  note: {}", Self::CAVEAT)
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

/// Check both convergence criteria on a finite prefix. `limit = None` stands
/// for the added point below every surface.
pub fn convergence_certificate<T: Scalar>(
    seq: &[Surface<T>],
    limit: Option<&Surface<T>>,
    probes: &[Surface<T>],
) -> Result<CertificateReport, CertificateError> {
    if seq.is_empty() {
        return Err(CertificateError::EmptySequence);
    }
    for (i, p) in probes.iter().enumerate() {
        if p.classify() != Classification::Disk {
            return Err(CertificateError::InvalidProbe(i));
        }
    }
    let last = seq.last().expect("nonempty");
    let mut tail = Vec::new();
    let mut lim = Vec::new();
    for (i, d) in probes.iter().enumerate() {
        let applies = limit.is_some_and(|l| embeds(d, l));
        let from_index = if applies {
            let mut from = None;
            for n in (0..seq.len()).rev() {
                if immerses(d, &seq[n]) {
                    from = Some(n);
                } else {
                    break;
                }
            }
            from
        } else {
            None
        };
        tail.push(TailCheck { probe: i, applies, from_index, passed: !applies || from_index.is_some() });

        let applies = embeds(d, last);
        let immerses_in_limit = limit.is_some_and(|l| immerses(d, l));
        lim.push(LimitCheck { probe: i, applies, immerses_in_limit, passed: !applies || immerses_in_limit });
    }
    let passed = tail.iter().all(|t| t.passed) && lim.iter().all(|l| l.passed);
    Ok(CertificateReport { tail, limit: lim, passed })
}
