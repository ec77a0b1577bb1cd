//! Straight-line lifting, embedding radii and the flat path metric.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::geom::{Cell, Grid, Point};
use crate::scalar::{exact_sqrt, sqrt_bounds, Scalar};
use crate::surface::{CellComplex, ClassId, SubUnion, Surface, SurfaceError, SurfacePoint, VertexKind};

use super::TransformError;

/// Grid cells met by the closed segment `[a, b]`, in order, without
/// consecutive repeats. `None` if the segment leaves the grid.
pub fn segment_cells<T: Scalar>(grid: &Grid<T>, a: &Point<T>, b: &Point<T>) -> Option<Vec<Cell>> {
    let d = b.sub(a);
    let mut ts = vec![T::zero(), T::one()];
    let mut crossings = |lines: &[T], from: &T, delta: &T| {
        if delta.is_zero() {
            return;
        }
        let (lo, hi) = if delta.is_positive() { (from.clone(), from.clone() + delta.clone()) } else { (from.clone() + delta.clone(), from.clone()) };
        let start = lines.partition_point(|v| *v <= lo);
        for v in lines[start..].iter().take_while(|v| **v < hi) {
            ts.push((v.clone() - from.clone()) / delta.clone());
        }
    };
    crossings(grid.xs(), &a.x, &d.x);
    crossings(grid.ys(), &a.y, &d.y);
    ts.sort();
    ts.dedup();
    let at = |t: &T| a.add(&d.scale(t));
    let mut cells = vec![grid.locate(a)?];
    for w in ts.windows(2) {
        let mid = (w[0].clone() + w[1].clone()) * T::half();
        cells.push(grid.locate(&at(&mid))?);
        cells.push(grid.locate(&at(&w[1]))?);
    }
    cells.dedup();
    Some(cells)
}

/// Follow a segment starting from `start` (whose cell is the segment's first
/// cell). Returns the classes visited, or `None` once the segment leaves the
/// surface.
pub fn lift_segment<T: Scalar>(
    c: &CellComplex<T>,
    start: ClassId,
    a: &Point<T>,
    b: &Point<T>,
) -> Option<Vec<ClassId>> {
    let cells = segment_cells(c.grid(), a, b)?;
    debug_assert_eq!(c.class(start).cell, cells[0]);
    let mut out = vec![start];
    for cell in &cells[1..] {
        let next = c.neighbor_at(*out.last().expect("nonempty"), *cell)?;
        out.push(next);
    }
    Some(out)
}

/// An embedding radius, kept exact through its square.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ERValue<T> {
    pub squared: T,
}

impl<T: Scalar> ERValue<T> {
    pub fn new(squared: T) -> Self {
        ERValue { squared }
    }

    /// The radius itself when it is rational.
    pub fn exact(&self) -> Option<T> {
        exact_sqrt(&self.squared.to_big()).and_then(|r| T::from_big(&r))
    }

    pub fn to_f64(&self) -> f64 {
        self.squared.to_f64().sqrt()
    }
}

impl<T: Scalar> fmt::Display for ERValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "sqrt({})", self.squared),
        }
    }
}

/// Nearest point of the closed axis-parallel segment `[u, v]` to `p`.
fn nearest_on_segment<T: Scalar>(u: &Point<T>, v: &Point<T>, p: &Point<T>) -> Point<T> {
    let clamp = |x: &T, a: &T, b: &T| x.clone().clamp(a.clone().min(b.clone()), a.clone().max(b.clone()));
    Point::new(clamp(&p.x, &u.x, &v.x), clamp(&p.y, &u.y, &v.y))
}

/// Precomputed boundary data for repeated radius queries on one surface.
pub struct Radii<'a, T> {
    s: &'a Surface<T>,
    boundary: Vec<bool>,
    edges: Vec<(ClassId, Point<T>, Point<T>)>,
}

impl<'a, T: Scalar> Radii<'a, T> {
    pub fn new(s: &'a Surface<T>) -> Self {
        let c = s.complex();
        let boundary: Vec<bool> = (0..c.len()).map(|id| c.is_boundary(id)).collect();
        let edges = c
            .edges()
            .filter(|&e| boundary[e])
            .map(|e| {
                let [x0, x1, y0, y1] = c.footprint(e);
                (e, Point::new(x0, y0), Point::new(x1, y1))
            })
            .collect();
        Radii { s, boundary, edges }
    }

    pub fn surface(&self) -> &Surface<T> {
        self.s
    }

    /// Boundary edge cells with their endpoints.
    pub fn boundary_edges(&self) -> &[(ClassId, Point<T>, Point<T>)] {
        &self.edges
    }

    /// Lower bound for the radius at a developed point: the distance to the
    /// nearest boundary edge on any sheet.
    pub fn lower_bound(&self, p: &Point<T>) -> T {
        self.edges.iter().map(|(_, u, v)| nearest_on_segment(u, v, p).dist2(p)).min().expect("surfaces have boundary")
    }

    /// Whether the straight segment from `p` (in class `cls`) to `t` runs
    /// through the interior and ends on the boundary.
    fn reaches_boundary(&self, cls: ClassId, p: &Point<T>, t: &Point<T>) -> bool {
        match lift_segment(self.s.complex(), cls, p, t) {
            Some(path) => {
                let (last, inner) = path.split_last().expect("nonempty");
                self.boundary[*last] && inner.iter().all(|&id| !self.boundary[id])
            }
            None => false,
        }
    }

    pub fn at_class(&self, cls: ClassId, p: &Point<T>) -> ERValue<T> {
        if self.boundary[cls] {
            return ERValue::new(T::zero());
        }
        let mut cands: Vec<(T, Point<T>)> = self
            .edges
            .iter()
            .map(|(_, u, v)| {
                let x = nearest_on_segment(u, v, p);
                (x.dist2(p), x)
            })
            .collect();
        cands.sort_by(|a, b| a.0.cmp(&b.0));
        cands.dedup();
        for (d2, x) in cands {
            if self.reaches_boundary(cls, p, &x) {
                return ERValue::new(d2);
            }
        }
        unreachable!("a compact surface has a visible boundary point")
    }

    pub fn at(&self, p: &SurfacePoint<T>) -> Result<ERValue<T>, SurfaceError> {
        let cls = self.s.class_of(p)?;
        Ok(self.at_class(cls, &p.point))
    }
}

/// Largest `r` such that the open `r`-ball about `p` embeds.
pub fn embedding_radius<T: Scalar>(s: &Surface<T>, p: &SurfacePoint<T>) -> Result<ERValue<T>, SurfaceError> {
    Radii::new(s).at(p)
}

/// Minimum of the embedding radius over a closed sub-union avoiding the
/// boundary. The minimum sits at a vertex of the union or at the foot of a
/// boundary vertex on an edge of the union; candidates are visited in order
/// of a lower bound so most are skipped.
pub fn min_embedding_radius<T: Scalar>(s: &Surface<T>, k: &SubUnion<T>) -> Result<ERValue<T>, TransformError> {
    let placed = k.place(s)?;
    let pc = &placed.complex;
    if (0..pc.len()).any(|id| placed.closed[id] && pc.is_boundary(id)) {
        return Err(TransformError::KTouchesBoundary);
    }
    let radii = Radii::new(s);
    let mut corners: Vec<Point<T>> = radii.edges.iter().flat_map(|(_, u, v)| [u.clone(), v.clone()]).collect();
    corners.sort();
    corners.dedup();

    let mut cands: Vec<SurfacePoint<T>> = Vec::new();
    for id in (0..pc.len()).filter(|&id| placed.closed[id]) {
        let class = pc.class(id);
        let rect = class.members[0];
        match class.dim() {
            0 => cands.push(SurfacePoint::new(rect, pc.sample(id))),
            1 => {
                let [x0, x1, y0, y1] = pc.footprint(id);
                let (u, v) = (Point::new(x0, y0), Point::new(x1, y1));
                for w in &corners {
                    cands.push(SurfacePoint::new(rect, nearest_on_segment(&u, &v, w)));
                }
            }
            _ => {}
        }
    }
    let mut keyed: Vec<(T, SurfacePoint<T>)> = cands.into_iter().map(|p| (radii.lower_bound(&p.point), p)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut best: Option<T> = None;
    for (lb, p) in keyed {
        if best.as_ref().is_some_and(|b| *b <= lb) {
            break;
        }
        let er = radii.at(&p)?.squared;
        if best.as_ref().is_none_or(|b| er < *b) {
            best = Some(er);
        }
    }
    Ok(ERValue::new(best.expect("a union has vertices")))
}

/// A chart of the open `r`-ball about a point.
pub struct BallChart<'a, T> {
    s: &'a Surface<T>,
    center: SurfacePoint<T>,
    center_class: ClassId,
    radius: T,
    cells: Vec<ClassId>,
}

impl<'a, T: Scalar> BallChart<'a, T> {
    pub fn center(&self) -> &SurfacePoint<T> {
        &self.center
    }

    pub fn radius(&self) -> &T {
        &self.radius
    }

    /// Classes of the surface met by the ball.
    pub fn cells(&self) -> &[ClassId] {
        &self.cells
    }

    /// The point at offset `v` from the centre; `None` outside the ball.
    pub fn lift(&self, v: &Point<T>) -> Option<SurfacePoint<T>> {
        if v.norm2() >= self.radius.clone() * self.radius.clone() {
            return None;
        }
        let target = self.center.point.add(v);
        let path = lift_segment(self.s.complex(), self.center_class, &self.center.point, &target)?;
        Some(self.s.point_in_class(*path.last().expect("nonempty"), target))
    }
}

/// Dev-preserving chart of the `r`-ball about `p`, for `r` up to the
/// embedding radius.
pub fn ball_embed<'a, T: Scalar>(
    s: &'a Surface<T>,
    p: &SurfacePoint<T>,
    r: T,
) -> Result<BallChart<'a, T>, TransformError> {
    let er = embedding_radius(s, p)?;
    if !r.is_positive() || r.clone() * r.clone() > er.squared {
        return Err(TransformError::RadiusTooLarge { requested: r.to_string(), radius: er.to_string() });
    }
    let c = s.complex();
    let start = s.class_of(p)?;
    let r2 = r.clone() * r.clone();
    let meets = |id: ClassId| {
        let [x0, x1, y0, y1] = c.footprint(id);
        let near = Point::new(p.point.x.clone().clamp(x0, x1), p.point.y.clone().clamp(y0, y1));
        near.dist2(&p.point) < r2
    };
    let mut seen = vec![false; c.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(id) = stack.pop() {
        let class = c.class(id);
        for &n in class.up.iter().chain(&class.down) {
            if !seen[n] && meets(n) {
                seen[n] = true;
                stack.push(n);
            }
        }
    }
    let cells = (0..c.len()).filter(|&i| seen[i]).collect();
    Ok(BallChart { s, center: p.clone(), center_class: start, radius: r, cells })
}

/// A polygonal path length, kept as exact squared leg lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathLength<T> {
    pub legs: Vec<T>,
}

impl<T: Scalar> PathLength<T> {
    pub fn to_f64(&self) -> f64 {
        self.legs.iter().map(|l| l.to_f64().sqrt()).sum()
    }

    /// Rational bounds on the length, each leg to `2^-bits`.
    pub fn bounds(&self, bits: u32) -> (BigRational, BigRational) {
        self.legs.iter().fold((BigRational::zero(), BigRational::zero()), |(lo, hi), l| {
            let (a, b) = sqrt_bounds(&l.to_big(), bits);
            (lo + a, hi + b)
        })
    }
}

/// Shortest paths in the flat metric. Geodesics bend only at reflex boundary
/// corners, so the path graph has those corners plus the two endpoints.
pub struct Geodesics<'a, T> {
    s: &'a Surface<T>,
    reflex: Vec<(ClassId, Point<T>)>,
    /// Squared length of the straight leg between two reflex corners, if visible.
    legs: Vec<Vec<Option<T>>>,
    dist: Vec<Vec<f64>>,
    next: Vec<Vec<Option<usize>>>,
}

impl<'a, T: Scalar> Geodesics<'a, T> {
    pub fn new(s: &'a Surface<T>) -> Self {
        let c = s.complex();
        let reflex: Vec<(ClassId, Point<T>)> =
            c.vertices().filter(|&v| c.vertex_kind(v) == VertexKind::Fan(3)).map(|v| (v, c.sample(v))).collect();
        let n = reflex.len();
        let mut legs = vec![vec![None; n]; n];
        let mut dist = vec![vec![f64::INFINITY; n]; n];
        let mut next = vec![vec![None; n]; n];
        for i in 0..n {
            dist[i][i] = 0.0;
            next[i][i] = Some(i);
            for j in i + 1..n {
                if visible(c, reflex[i].0, &reflex[i].1, reflex[j].0, &reflex[j].1) {
                    let l = reflex[i].1.dist2(&reflex[j].1);
                    let f = l.to_f64().sqrt();
                    legs[i][j] = Some(l.clone());
                    legs[j][i] = Some(l);
                    dist[i][j] = f;
                    dist[j][i] = f;
                    next[i][j] = Some(j);
                    next[j][i] = Some(i);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = dist[i][k] + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                        next[i][j] = next[i][k];
                    }
                }
            }
        }
        Geodesics { s, reflex, legs, dist, next }
    }

    pub fn reflex_corners(&self) -> usize {
        self.reflex.len()
    }

    fn route(&self, mut i: usize, j: usize) -> Vec<T> {
        let mut out = Vec::new();
        while i != j {
            let k = self.next[i][j].expect("connected route");
            out.push(self.legs[i][k].clone().expect("visible leg"));
            i = k;
        }
        out
    }

    /// Visible reflex corners from a point, with squared leg lengths.
    fn sight(&self, cls: ClassId, p: &Point<T>) -> Vec<Option<T>> {
        let c = self.s.complex();
        self.reflex.iter().map(|(v, vp)| visible(c, cls, p, *v, vp).then(|| p.dist2(vp))).collect()
    }

    /// Intrinsic distance between two points.
    pub fn distance(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<PathLength<T>, SurfaceError> {
        let (cp, cq) = (self.s.class_of(p)?, self.s.class_of(q)?);
        let c = self.s.complex();
        if visible(c, cp, &p.point, cq, &q.point) {
            return Ok(PathLength { legs: vec![p.point.dist2(&q.point)] });
        }
        let (sp, sq) = (self.sight(cp, &p.point), self.sight(cq, &q.point));
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, a) in sp.iter().enumerate() {
            let Some(a) = a else { continue };
            for (j, b) in sq.iter().enumerate() {
                let Some(b) = b else { continue };
                let total = a.to_f64().sqrt() + self.dist[i][j] + b.to_f64().sqrt();
                if total.is_finite() && best.is_none_or(|(t, _, _)| total < t) {
                    best = Some((total, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("a connected surface joins any two points");
        let mut legs = vec![sp[i].clone().expect("visible")];
        legs.extend(self.route(i, j));
        legs.push(sq[j].clone().expect("visible"));
        Ok(PathLength { legs })
    }
}

fn visible<T: Scalar>(c: &CellComplex<T>, from: ClassId, p: &Point<T>, to: ClassId, q: &Point<T>) -> bool {
    lift_segment(c, from, p, q).is_some_and(|path| *path.last().expect("nonempty") == to)
}

/// Decide `|ER(p) - ER(q)| <= d` exactly for a straight path, by certified
/// interval arithmetic otherwise. `None` when the intervals never separate.
pub fn lipschitz_holds<T: Scalar>(er_p: &ERValue<T>, er_q: &ERValue<T>, d: &PathLength<T>) -> Option<bool> {
    let (a, b) = (er_p.squared.to_big(), er_q.squared.to_big());
    match d.legs.as_slice() {
        [] => return Some(a == b),
        [c] => {
            // |√a − √b| ≤ √c  ⟺  a + b − c ≤ 2√(ab)
            let c = c.to_big();
            let lhs = a.clone() + b.clone() - c;
            let four = BigRational::from_integer(4.into());
            return Some(lhs <= BigRational::zero() || lhs.clone() * lhs <= four * a * b);
        }
        _ => {}
    }
    for bits in [64, 128, 256] {
        let (alo, ahi) = sqrt_bounds(&a, bits);
        let (blo, bhi) = sqrt_bounds(&b, bits);
        let (dlo, dhi) = d.bounds(bits);
        let diff_hi = (ahi.clone() - blo.clone()).max(bhi.clone() - alo.clone());
        let diff_lo = (alo - bhi).max(blo - ahi).max(BigRational::zero());
        if diff_hi <= dlo {
            return Some(true);
        }
        if diff_lo.cmp(&dhi) == Ordering::Greater {
            return Some(false);
        }
    }
    None
}
