//! Acceptance suite. Prints one line per criterion and fails if any criterion
//! fails. Instance counts and tolerances are the constants below; every check
//! is exact, so the only tolerance is the number of allowed failures (zero).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::process::ExitCode;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rectsurf::disks::{anchor_on, disks_bounded_by, enumerate_subbasis};
use rectsurf::geom::{Cell, Grid};
use rectsurf::io::{parse_surface, print_surface};
use rectsurf::lattice::{core, direct_limit, fuse, inverse_limit, CoreResult, LatticeError};
use rectsurf::morphism::{convergence_certificate, find_immersion, immerses, isomorphic};
use rectsurf::samples::{self, RandomSpec};
use rectsurf::scalar::sqrt_bounds;
use rectsurf::transform::{
    act_pointed, embedding_radius, lipschitz_holds, min_embedding_radius, perturb_embed_check, rebase, AxisAffine,
    Geodesics, Radii,
};
use rectsurf::unionfind::UnionFind;
use rectsurf::{Classification, Point, RatLoop, RatRect, RatSurface, RatSurfacePoint, Rational, SubUnion, SurfacePoint};

const ALLOWED_FAILURES: usize = 0;

const C1_PAIRS: usize = 500;
const C2_TRIPLES: usize = 200;
const C3_INSTANCES: usize = 200;
const C3_LOWER_BOUND_POOL: (usize, i64) = (2, 2);
const C3_POOL_STRIDE: usize = 3;
const C4_DISK_PAIRS: usize = 200;
const C5_SURFACES: usize = 500;
const C5_MAX_RECTS: usize = 10;
const C6_LOOPS: usize = 20;
const C6_MAX_EDGES: usize = 8;
const C7_SURFACES: usize = 50;
const C7_PAIRS_PER_SURFACE: usize = 1000;
const C7_MONOTONE: usize = 100;
const C8_SURFACES: usize = 200;
const C9_SURFACES: usize = 50;
const C9_DIAGONALS: [(i64, i64, i64, i64); 5] = [(1, 1, 1, 1), (2, 1, 1, 1), (1, 3, 1, 1), (3, 2, 1, 5), (1, 2, 7, 4)];

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Desk-scale generator settings: at most `max_rects` rectangles, denominators
/// at most 4.
fn spec(max_rects: usize) -> RandomSpec {
    RandomSpec { max_rects, denom: 4, window: 3, extra_glue: 0.5 }
}

/// Isomorphism and Euler characteristic computed from the raw presentation,
/// without the library's cell complex or immersion search.
mod oracle {
    use super::*;

    struct Cells {
        keys: Vec<(usize, Cell)>,
        index: HashMap<(usize, Cell), usize>,
        uf: UnionFind,
    }

    impl Cells {
        fn new(s: &RatSurface, grid: &Grid<Rational>) -> Cells {
            let mut keys = Vec::new();
            let spans: Vec<_> = s.rects().iter().map(|r| grid.span(r).expect("rect on grid")).collect();
            for (i, &(x0, x1, y0, y1)) in spans.iter().enumerate() {
                for hx in x0..=x1 {
                    for hy in y0..=y1 {
                        keys.push((i, Cell::new(hx, hy)));
                    }
                }
            }
            let index: HashMap<_, _> = keys.iter().enumerate().map(|(n, k)| (*k, n)).collect();
            let mut uf = UnionFind::new(keys.len());
            for &(i, j) in s.glue() {
                let (a, b) = (spans[i], spans[j]);
                let (x0, x1, y0, y1) = (a.0.max(b.0), a.1.min(b.1), a.2.max(b.2), a.3.min(b.3));
                for hx in x0..=x1 {
                    for hy in y0..=y1 {
                        let c = Cell::new(hx, hy);
                        uf.union(index[&(i, c)], index[&(j, c)]);
                    }
                }
            }
            Cells { keys, index, uf }
        }

        fn root(&mut self, rect: usize, c: Cell) -> Option<usize> {
            let n = *self.index.get(&(rect, c))?;
            Some(self.uf.find(n))
        }
    }

    pub fn euler(s: &RatSurface) -> i64 {
        let grid = Grid::from_rects(s.rects());
        let mut cells = Cells::new(s, &grid);
        let mut seen = HashSet::new();
        let mut chi = 0;
        for n in 0..cells.keys.len() {
            let r = cells.uf.find(n);
            if seen.insert(r) {
                chi += if cells.keys[r].1.dim() == 1 { -1 } else { 1 };
            }
        }
        chi
    }

    /// (edge, face on the far side) for the four sides of a face, E N W S.
    fn sides(c: Cell) -> [Option<(Cell, Cell)>; 4] {
        [
            Some((Cell::new(c.hx + 1, c.hy), Cell::new(c.hx + 2, c.hy))),
            Some((Cell::new(c.hx, c.hy + 1), Cell::new(c.hx, c.hy + 2))),
            c.hx.checked_sub(2).map(|x| (Cell::new(c.hx - 1, c.hy), Cell::new(x, c.hy))),
            c.hy.checked_sub(2).map(|y| (Cell::new(c.hx, c.hy - 1), Cell::new(c.hx, y))),
        ]
    }

    type Walk = Vec<(Cell, [Option<usize>; 4])>;

    /// Breadth-first walk over faces from the first quadrant face at the
    /// basepoint, crossing sides in a fixed order. Labels are assigned on first
    /// visit, so equal walks mean equal surfaces.
    fn walk(s: &RatSurface, grid: &Grid<Rational>) -> Option<Walk> {
        let mut cells = Cells::new(s, grid);
        let faces: Vec<(usize, Cell)> = cells.keys.iter().copied().filter(|(_, c)| c.is_face()).collect();
        let mut member: HashMap<usize, (usize, Cell)> = HashMap::new();
        let mut across: HashMap<usize, BTreeSet<(Cell, usize)>> = HashMap::new();
        for &(k, f) in &faces {
            let fr = cells.root(k, f)?;
            member.entry(fr).or_insert((k, f));
            for (e, _) in sides(f).into_iter().flatten() {
                let er = cells.root(k, e)?;
                across.entry(er).or_default().insert((f, fr));
            }
        }
        let b = grid.locate(&s.base().point)?;
        let br = cells.root(s.base().rect, b)?;
        let mut start = None;
        for &(k, f) in &faces {
            if f.closure_contains(&b) && cells.root(k, b) == Some(br) {
                let fr = cells.root(k, f)?;
                start = start.min(Some((f, fr))).or(Some((f, fr)));
            }
        }
        let (_, first) = start?;
        let mut label = HashMap::from([(first, 0usize)]);
        let mut order = vec![first];
        let mut out = Vec::new();
        let mut next = 0;
        while next < order.len() {
            let fr = order[next];
            next += 1;
            let (k, c) = member[&fr];
            let mut row = [None; 4];
            for (slot, side) in sides(c).into_iter().enumerate() {
                let Some((e, far)) = side else { continue };
                let er = cells.root(k, e)?;
                let near: Vec<usize> = across[&er].iter().filter(|(f, _)| *f == c).map(|x| x.1).collect();
                let other: Vec<usize> = across[&er].iter().filter(|(f, _)| *f == far).map(|x| x.1).collect();
                if near.len() > 1 || other.len() > 1 {
                    return None;
                }
                if let Some(&o) = other.first() {
                    let n = label.len();
                    let l = *label.entry(o).or_insert_with(|| {
                        order.push(o);
                        n
                    });
                    row[slot] = Some(l);
                }
            }
            out.push((c, row));
        }
        // Faces unreachable from the base mean the presentation is not one piece.
        (out.len() == member.len()).then_some(out)
    }

    pub fn same_surface(a: &RatSurface, b: &RatSurface) -> bool {
        if a.is_open() != b.is_open() {
            return false;
        }
        let (a, b) = (a.normalize(), b.normalize());
        let grid = Grid::from_rects(a.rects().iter().chain(b.rects()));
        match (walk(&a, &grid), walk(&b, &grid)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Every valid gluing of winding-number copies of the loop's region along
    /// whole sides, each side used at most once, kept when it is a disk bounded
    /// by `gamma`; anchored on the loop and deduplicated.
    pub fn disks(gamma: &RatLoop) -> Vec<RatSurface> {
        let Ok(region) = gamma.region_decomposition() else { return Vec::new() };
        let rects: Vec<RatRect> = region.iter().flat_map(|(r, w)| std::iter::repeat_n(r.clone(), *w as usize)).collect();
        if rects.is_empty() {
            return Vec::new();
        }
        let mut pairs = Vec::new();
        for i in 0..rects.len() {
            for j in 0..rects.len() {
                let (a, b) = (&rects[i], &rects[j]);
                if a.x_hi() == b.x_lo() && a.y_lo() == b.y_lo() {
                    pairs.push((i, j, (i, 1), (j, 3)));
                }
                if a.y_hi() == b.y_lo() && a.x_lo() == b.x_lo() {
                    pairs.push((i, j, (i, 2), (j, 0)));
                }
            }
        }
        type Pair = (usize, usize, (usize, usize), (usize, usize));
        struct Search<'a> {
            pairs: &'a [Pair],
            rects: &'a [RatRect],
            gamma: &'a RatLoop,
            used: HashSet<(usize, usize)>,
            glue: Vec<(usize, usize)>,
            out: Vec<RatSurface>,
        }
        fn go(s: &mut Search, k: usize) {
            if k == s.pairs.len() {
                let base = SurfacePoint::new(0, s.rects[0].center());
                if let Ok(d) = RatSurface::new(s.rects.to_vec(), s.glue.iter().copied(), base, false) {
                    if d.classify() == Classification::Disk && d.loops().unwrap()[0].cyclically_equal(s.gamma) {
                        if let Some(d) = anchor_on(&d, s.gamma) {
                            if !s.out.iter().any(|x| same_surface(x, &d)) {
                                s.out.push(d);
                            }
                        }
                    }
                }
                return;
            }
            go(s, k + 1);
            let (i, j, si, sj) = s.pairs[k];
            if !s.used.contains(&si) && !s.used.contains(&sj) {
                s.used.extend([si, sj]);
                s.glue.push((i, j));
                go(s, k + 1);
                s.glue.pop();
                s.used.remove(&si);
                s.used.remove(&sj);
            }
        }
        let mut search =
            Search { pairs: &pairs, rects: &rects, gamma, used: HashSet::new(), glue: Vec::new(), out: Vec::new() };
        go(&mut search, 0);
        search.out
    }
}

use oracle::same_surface;

/// Failures of one criterion, with the first few described.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: usize,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.notes.len() < 3 {
                self.notes.push(what());
            }
        }
    }

    // The allowance is zero today; keep the comparison so raising it is a one-line change.
    #[allow(clippy::absurd_extreme_comparisons)]
    fn passed(&self) -> bool {
        self.failures <= ALLOWED_FAILURES
    }
}

/// Surfaces produced anywhere in the suite, for the serialization criterion.
#[derive(Default)]
struct Seen(Vec<RatSurface>);

impl Seen {
    fn keep(&mut self, s: &RatSurface) -> RatSurface {
        self.0.push(s.clone());
        s.clone()
    }
}

/// Same surface cut in two along one rectangle and listed in shuffled order.
fn represent(r: &mut ChaCha8Rng, s: &RatSurface) -> RatSurface {
    let n = s.rects().len();
    let cut = r.gen_range(0..n);
    let old = &s.rects()[cut];
    let (a, b) = if r.gen_bool(0.5) {
        let mid = (old.x_lo().clone() + old.x_hi().clone()) * q(1, 2);
        (
            RatRect::new(old.x_lo().clone(), mid.clone(), old.y_lo().clone(), old.y_hi().clone()).unwrap(),
            RatRect::new(mid, old.x_hi().clone(), old.y_lo().clone(), old.y_hi().clone()).unwrap(),
        )
    } else {
        let mid = (old.y_lo().clone() + old.y_hi().clone()) * q(1, 2);
        (
            RatRect::new(old.x_lo().clone(), old.x_hi().clone(), old.y_lo().clone(), mid.clone()).unwrap(),
            RatRect::new(old.x_lo().clone(), old.x_hi().clone(), mid, old.y_hi().clone()).unwrap(),
        )
    };
    // Pieces: old indices except `cut`, then the two halves.
    let mut pieces: Vec<(RatRect, usize)> =
        s.rects().iter().enumerate().filter(|(i, _)| *i != cut).map(|(i, x)| (x.clone(), i)).collect();
    pieces.push((a, cut));
    pieces.push((b, cut));
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, r.gen_range(0..=i));
    }
    let rects: Vec<RatRect> = order.iter().map(|&k| pieces[k].0.clone()).collect();
    let origin: Vec<usize> = order.iter().map(|&k| pieces[k].1).collect();
    let mut glue = Vec::new();
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            let (oi, oj) = (origin[i], origin[j]);
            let joined = if oi == oj { true } else { s.is_glued(oi, oj) };
            if joined && rects[i].touches(&rects[j]) {
                glue.push((i, j));
            }
        }
    }
    let base = s.base();
    let rect = (0..rects.len()).find(|&i| origin[i] == base.rect && rects[i].contains(&base.point)).unwrap();
    RatSurface::checked(rects, glue, SurfacePoint::new(rect, base.point.clone()), s.is_open()).unwrap()
}

fn c1(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let mut r = rng(1);
    let (mut related, mut mutual) = (0, 0);
    for i in 0..C1_PAIRS {
        let host = seen.keep(&samples::random_surface(&mut r, &spec(6)));
        let a = seen.keep(&samples::random_subsurface(&mut r, &host));
        let b = seen.keep(&match i % 3 {
            0 => samples::random_surface(&mut r, &spec(6)),
            1 => represent(&mut r, &a),
            _ => samples::random_subsurface(&mut r, &host),
        });
        let c = seen.keep(&samples::random_subsurface(&mut r, &a));
        for x in [&a, &b] {
            t.check(immerses(x, x), || format!("not reflexive: {x:?}"));
        }
        let (ab, ba) = (immerses(&a, &b), immerses(&b, &a));
        related += usize::from(ab || ba);
        if ab && ba {
            mutual += 1;
            t.check(same_surface(&a, &b), || format!("mutual immersion of distinct surfaces {a:?} {b:?}"));
        }
        if i % 3 == 1 {
            t.check(ab && ba, || format!("re-presentation not isomorphic: {a:?} {b:?}"));
        }
        t.check(same_surface(&a, &b) == isomorphic(&a, &b), || format!("isomorphism disagrees with oracle {a:?} {b:?}"));
        // Composable triples c -> a -> host and c -> a -> b.
        for z in [&host, &b] {
            if immerses(&c, &a) && immerses(&a, z) {
                t.check(immerses(&c, z), || format!("not transitive: {c:?} {a:?} {z:?}"));
            }
        }
    }
    (t, format!("{C1_PAIRS} pairs, {related} related, {mutual} mutual"))
}

/// A join may be missing only for closed pieces that all have the basepoint
/// on their boundary, where two of them can meet in a single corner.
fn join_may_be_missing(inputs: &[&RatSurface]) -> bool {
    inputs.iter().all(|s| !s.is_open() && s.complex().is_boundary(s.base_class()))
}

fn c2(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let mut r = rng(2);
    let (mut below, mut missing) = (0, 0);
    let mut j = |t: &mut Tally, xs: &[&RatSurface]| -> Option<RatSurface> {
        match fuse(&xs.iter().map(|x| (*x).clone()).collect::<Vec<_>>()) {
            Ok(f) => Some(f.surface),
            Err(e) => {
                missing += 1;
                t.check(matches!(e, LatticeError::NotASurface(_)) && join_may_be_missing(xs), || {
                    format!("fuse failed: {e} on {xs:?}")
                });
                None
            }
        }
    };
    for i in 0..C2_TRIPLES {
        let p = seen.keep(&samples::random_surface(&mut r, &spec(4)));
        let s = seen.keep(&if i % 2 == 0 {
            samples::random_surface(&mut r, &spec(4))
        } else {
            samples::random_subsurface(&mut r, &p)
        });
        let u = seen.keep(&samples::random_surface(&mut r, &spec(4)));
        let pp = j(&mut t, &[&p, &p]);
        t.check(pp.is_some_and(|pp| same_surface(&pp, &p)), || format!("not idempotent: {p:?}"));
        let (ps, sp) = (j(&mut t, &[&p, &s]), j(&mut t, &[&s, &p]));
        t.check(ps.is_some() == sp.is_some(), || format!("join exists in one order only: {p:?} {s:?}"));
        let (Some(ps), Some(sp)) = (ps, sp) else { continue };
        seen.keep(&ps);
        t.check(same_surface(&ps, &sp), || format!("not commutative: {p:?} {s:?}"));
        let left = j(&mut t, &[&ps, &u]);
        let right = j(&mut t, &[&s, &u]).and_then(|su| j(&mut t, &[&p, &su]));
        let all = j(&mut t, &[&p, &s, &u]);
        for x in left.iter().chain(&right) {
            t.check(all.as_ref().is_some_and(|a| same_surface(a, x)), || format!("not associative: {p:?} {s:?} {u:?}"));
        }
        if let Some(a) = &all {
            seen.keep(a);
        }
        // Absorption both ways.
        match core(&[p.clone(), s.clone()]) {
            Ok(CoreResult::Surface(m)) => {
                seen.keep(&m);
                let pm = j(&mut t, &[&p, &m]);
                t.check(pm.is_some_and(|x| same_surface(&x, &p)), || format!("p v (p ^ s) != p: {p:?} {s:?}"));
            }
            Ok(CoreResult::Empty) => {}
            Err(e) => t.check(false, || format!("core failed: {e}")),
        }
        let absorbed = core(&[p.clone(), ps.clone()]);
        t.check(
            matches!(&absorbed, Ok(CoreResult::Surface(m)) if same_surface(m, &p)),
            || format!("p ^ (p v s) != p: {p:?} {s:?}"),
        );
        // P immerses in Q exactly when P v Q = Q.
        for (x, y, xy) in [(&s, &p, &sp), (&p, &s, &ps)] {
            let lhs = immerses(x, y);
            below += usize::from(lhs);
            t.check(lhs == same_surface(xy, y), || format!("order and join disagree: {x:?} {y:?}"));
        }
    }
    (t, format!("{C2_TRIPLES} triples, {below} comparable pairs, {missing} joins absent at a corner"))
}

fn c3(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let mut r = rng(3);
    let pool: Vec<RatSurface> = enumerate_subbasis(C3_LOWER_BOUND_POOL.0, C3_LOWER_BOUND_POOL.1);
    let mut bounds = 0;
    for k in 0..C3_INSTANCES {
        let host = seen.keep(&samples::random_surface(&mut r, &spec(6)));
        let p = seen.keep(&samples::random_subsurface(&mut r, &host));
        let s = seen.keep(&samples::random_subsurface(&mut r, &host));
        match fuse(&[p.clone(), s.clone()]) {
            Ok(f) => t.check(immerses(&seen.keep(&f.surface), &host), || format!("join above {host:?} fails")),
            Err(e) => t.check(false, || format!("fuse failed: {e}")),
        }
        let m = match core(&[p.clone(), s.clone()]) {
            Ok(CoreResult::Surface(m)) => Some(seen.keep(&m)),
            Ok(CoreResult::Empty) => None,
            Err(e) => {
                t.check(false, || format!("core failed: {e}"));
                continue;
            }
        };
        // Each instance takes every third pool member, rotating the offset,
        // so every member is tried against a third of the instances.
        for l in pool.iter().skip(k % C3_POOL_STRIDE).step_by(C3_POOL_STRIDE) {
            if immerses(l, &p) && immerses(l, &s) {
                bounds += 1;
                t.check(m.as_ref().is_some_and(|m| immerses(l, m)), || format!("lower bound {l:?} misses the meet"));
            }
        }
    }
    (t, format!("{C3_INSTANCES} instances, pool of {}, {bounds} lower bounds", pool.len()))
}

fn random_disk(r: &mut ChaCha8Rng) -> RatSurface {
    loop {
        let s = samples::random_surface(r, &spec(5));
        if s.classify() == Classification::Disk {
            return s;
        }
    }
}

/// Some grid cell carries two sheets.
fn multi_sheeted(s: &RatSurface) -> bool {
    let c = s.complex();
    let mut cells = HashSet::new();
    c.faces().any(|id| !cells.insert(c.class(id).cell))
}

fn c4(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let mut r = rng(4);
    let ramp: RatSurface = samples::winding_staircase();
    let mut sheets = 0;
    for i in 0..C4_DISK_PAIRS {
        // Every other pair comes from pieces of the winding ramp.
        let (a, b) = if i % 2 == 0 {
            (random_disk(&mut r), random_disk(&mut r))
        } else {
            (samples::random_subsurface(&mut r, &ramp), samples::random_subsurface(&mut r, &ramp))
        };
        let (a, b) = (seen.keep(&a), seen.keep(&b));
        match fuse(&[a.clone(), b.clone()]) {
            Ok(f) => {
                let f = seen.keep(&f.surface);
                sheets += usize::from(multi_sheeted(&f));
                t.check(f.classify() == Classification::Disk, || format!("fusion of disks is {}: {a:?} {b:?}", f.classify()));
            }
            Err(e) => t.check(false, || format!("fuse failed: {e}")),
        }
    }
    (t, format!("{C4_DISK_PAIRS} pairs, {sheets} multi-sheeted results"))
}

/// A window frame with `h` holes: two long bars joined by `h + 1` posts.
fn frame(h: i64) -> RatSurface {
    let mut rects = vec![RatRect::ints(0, 2 * h + 1, 0, 1), RatRect::ints(0, 2 * h + 1, 2, 3)];
    rects.extend((0..=h).map(|i| RatRect::ints(2 * i, 2 * i + 1, 0, 3)));
    let glue: Vec<(usize, usize)> = (2..rects.len()).flat_map(|k| [(0, k), (1, k)]).collect();
    RatSurface::checked(rects, glue, SurfacePoint::new(0, Point::new(q(1, 2), q(1, 2))), false).unwrap()
}

fn c5(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let mut r = rng(5);
    let mut extreme = 0i64;
    for _ in 0..C5_SURFACES {
        let s = seen.keep(&samples::random_surface(&mut r, &RandomSpec { extra_glue: 0.7, ..spec(C5_MAX_RECTS) }));
        let n = s.rects().len() as u32;
        let chi = s.euler_characteristic();
        extreme = extreme.max(chi.abs());
        t.check(chi == oracle::euler(&s), || format!("chi {chi} disagrees with the oracle on {s:?}"));
        t.check(chi.unsigned_abs() < 2u64.pow(n), || format!("|chi| = {} with {n} rects", chi.abs()));
    }
    for h in 1..=C5_MAX_RECTS as i64 - 3 {
        let f = seen.keep(&frame(h));
        let n = f.rects().len() as u32;
        let chi = f.euler_characteristic();
        extreme = extreme.max(chi.abs());
        t.check(chi == 1 - h && chi == oracle::euler(&f), || format!("frame with {h} holes has chi {chi}"));
        t.check(chi.unsigned_abs() < 2u64.pow(n), || format!("|chi| = {} with {n} rects", chi.abs()));
    }
    let unit: RatSurface = seen.keep(&samples::unit_square());
    let ann: RatSurface = seen.keep(&samples::square_annulus());
    t.check(unit.euler_characteristic() == 1, || "chi(rectangle) != 1".into());
    t.check(ann.euler_characteristic() == 0, || "chi(annulus) != 0".into());
    (t, format!("{C5_SURFACES} surfaces, max |chi| {extreme}"))
}

/// Random loop alternating between `k` x- and `k` y-coordinates in `0..=3`.
fn random_loop(r: &mut ChaCha8Rng) -> Option<RatLoop> {
    let k = r.gen_range(2..=C6_MAX_EDGES / 2);
    let xs: Vec<i64> = (0..k).map(|_| r.gen_range(0..=3)).collect();
    let ys: Vec<i64> = (0..k).map(|_| r.gen_range(0..=3)).collect();
    let mut v = Vec::new();
    for i in 0..k {
        v.push((xs[i], ys[i]));
        v.push((xs[(i + 1) % k], ys[i]));
    }
    let pts = v.iter().map(|&(x, y)| Point::new(q(x, 1), q(y, 1))).collect();
    RatLoop::new(pts).ok()
}

fn c6(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let square = RatLoop::ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
    let found = disks_bounded_by(&square);
    t.check(found.len() == 1, || format!("unit square bounds {} disks", found.len()));
    let found = disks_bounded_by(&square.reversed());
    t.check(found.is_empty(), || format!("clockwise square bounds {} disks", found.len()));

    let mut r = rng(6);
    let mut loops = Vec::new();
    while loops.len() < C6_LOOPS {
        if let Some(l) = random_loop(&mut r) {
            loops.push(l);
        }
    }
    // Boundaries of random disks, some of them multi-sheeted.
    let disk_spec = RandomSpec { max_rects: 4, denom: 1, window: 2, extra_glue: 0.5 };
    let mut from_disks = 0;
    while from_disks < C6_LOOPS {
        let s: RatSurface = samples::random_surface(&mut r, &disk_spec);
        if s.classify() == Classification::Disk {
            let l = s.loops().unwrap().remove(0);
            if l.len() <= C6_MAX_EDGES {
                loops.push(l);
                from_disks += 1;
            }
        }
    }
    let mut bounding = 0;
    for gamma in &loops {
        let got = disks_bounded_by(gamma);
        let want = oracle::disks(gamma);
        bounding += usize::from(!want.is_empty());
        let same = got.len() == want.len() && got.iter().all(|d| want.iter().any(|w| same_surface(d, w)));
        t.check(same, || format!("{} disks vs {} by exhaustion for {:?}", got.len(), want.len(), gamma.vertices()));
        for d in &got {
            seen.keep(d);
        }
    }
    (t, format!("{} loops, {bounding} bound a disk", loops.len()))
}

fn c7(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let unit: RatSurface = samples::unit_square();
    let centre = SurfacePoint::new(0, Point::new(q(1, 2), q(1, 2)));
    let er = embedding_radius(&unit, &centre).unwrap();
    t.check(er.exact() == Some(q(1, 2)), || format!("ER(unit square centre) = {er}"));

    let mut r = rng(7);
    let (mut pairs, mut undecided) = (0, 0);
    for _ in 0..C7_SURFACES {
        let s = seen.keep(&samples::random_surface(&mut r, &spec(5)));
        let radii = Radii::new(&s);
        let g = Geodesics::new(&s);
        // 46 points give 1035 pairs.
        let pts: Vec<RatSurfacePoint> = (0..46).map(|_| samples::random_point(&mut r, &s, 8)).collect();
        let ers: Vec<_> = pts.iter().map(|p| radii.at(p).unwrap()).collect();
        let devs: Vec<_> = pts.iter().map(|p| s.dev(p).unwrap()).collect();
        let mut here = 0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = g.distance(&pts[i], &pts[j]).unwrap();
                // A path is never shorter than the chord.
                let (chord, _) = sqrt_bounds(&devs[i].dist2(&devs[j]), 64);
                t.check(d.bounds(64).1 >= chord, || "path shorter than chord".into());
                match lipschitz_holds(&ers[i], &ers[j], &d) {
                    Some(ok) => t.check(ok, || format!("ER not 1-Lipschitz at {:?} {:?} in {s:?}", pts[i], pts[j])),
                    None => undecided += 1,
                }
                here += 1;
            }
        }
        t.check(here >= C7_PAIRS_PER_SURFACE, || format!("only {here} pairs"));
        pairs += here;
    }
    let mut monotone = 0;
    while monotone < C7_MONOTONE {
        let s = seen.keep(&samples::random_surface(&mut r, &spec(5)));
        let sub = seen.keep(&samples::random_subsurface(&mut r, &s));
        let map = find_immersion(&sub, &s).unwrap();
        let u = samples::random_point(&mut r, &sub, 8);
        let image = map.map_point(&u).unwrap();
        let (lo, hi) = (embedding_radius(&sub, &u).unwrap(), embedding_radius(&s, &image).unwrap());
        t.check(hi >= lo, || format!("ER drops under immersion: {lo} > {hi}"));
        monotone += 1;
    }
    (t, format!("{pairs} pairs ({undecided} equal within certified bounds), {monotone} immersions"))
}

/// The developing map: coordinates relative to the basepoint.
fn dev(s: &RatSurface, p: &RatSurfacePoint) -> Point<Rational> {
    s.dev(p).unwrap().sub(&s.dev(s.base()).unwrap())
}

fn all_cells(s: &RatSurface) -> Vec<RatSurfacePoint> {
    let c = s.complex();
    (0..c.len()).map(|id| s.point_in_class(id, c.sample(id))).collect()
}

fn c8(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let mut r = rng(8);
    let (mut cells, mut perturbed) = (0, 0);
    for _ in 0..C8_SURFACES {
        let s = seen.keep(&samples::random_surface(&mut r, &spec(5)));
        let p = samples::random_point(&mut r, &s, 4);
        let (moved, beta) = rebase(&s, &p).unwrap();
        seen.keep(&moved);
        let shift = dev(&s, &p);
        for x in all_cells(&s) {
            cells += 1;
            t.check(dev(&moved, &beta.apply(&x)) == dev(&s, &x).sub(&shift), || format!("dev mismatch at {x:?}"));
        }
        let (back, _) = rebase(&moved, &beta.apply(s.base())).unwrap();
        t.check(same_surface(&back, &s), || format!("double rebase changes {s:?}"));

        // Perturbation: a square K about the base inside the radius, and a
        // point closer to the base than the minimal radius over K.
        let b = s.base().rect;
        let er = embedding_radius(&s, s.base()).unwrap();
        if er.squared.is_zero() {
            continue;
        }
        let h = Rational::from_float(er.to_f64() * 0.3).unwrap();
        let centre = s.base().point.clone();
        let piece = RatRect::new(
            centre.x.clone() - h.clone(),
            centre.x.clone() + h.clone(),
            centre.y.clone() - h.clone(),
            centre.y.clone() + h.clone(),
        )
        .unwrap();
        if !h.is_positive() || !s.rects()[b].contains_rect(&piece) {
            continue;
        }
        let k = SubUnion::new(vec![(b, piece)], false);
        let Ok(eps) = min_embedding_radius(&s, &k) else { continue };
        let step = Rational::from_float(eps.to_f64() * 0.45).unwrap();
        let dir = [(1, 0), (0, 1), (-1, 0), (1, 1), (-1, -1)][r.gen_range(0..5)];
        let v = Point::new(centre.x.clone() + step.clone() * q(dir.0, 1), centre.y.clone() + step * q(dir.1, 1));
        if !s.rects()[b].contains(&v) {
            continue;
        }
        perturbed += 1;
        let ok = perturb_embed_check(&s, &k, &SurfacePoint::new(b, v));
        t.check(ok == Ok(true), || format!("perturbation fails: {ok:?} on {s:?}"));
    }
    (t, format!("{C8_SURFACES} rebased surfaces, {cells} cells, {perturbed} perturbations"))
}

fn c9(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let mut r = rng(9);
    let diagonals: Vec<AxisAffine<Rational>> =
        C9_DIAGONALS.iter().map(|&(a, b, c, d)| AxisAffine::diag(q(a, b), q(c, d))).collect();
    let group: Vec<AxisAffine<Rational>> = AxisAffine::signed_permutations()
        .iter()
        .flat_map(|p| diagonals.iter().map(move |d| p.compose(d)))
        .collect();
    let mut cells = 0;
    for _ in 0..C9_SURFACES {
        let s = seen.keep(&samples::random_surface(&mut r, &spec(4)));
        let sub = samples::random_subsurface(&mut r, &s);
        let other = samples::random_surface(&mut r, &spec(4));
        let points = all_cells(&s);
        for h in &group {
            let hs = act_pointed(h, &s, s.base()).0;
            t.check(hs.is_valid(), || format!("H(S) invalid for {s:?}"));
            for x in &points {
                cells += 1;
                let (hs, hx) = act_pointed(h, &s, x);
                t.check(dev(&hs, &hx) == h.apply(&dev(&s, x)), || format!("dev H != H dev at {x:?}"));
            }
            let (hsub, hother) = (act_pointed(h, &sub, sub.base()).0, act_pointed(h, &other, other.base()).0);
            t.check(immerses(&hsub, &hs), || "immersion lost under H".into());
            t.check(immerses(&other, &s) == immerses(&hother, &hs), || "immersion created under H".into());
        }
    }
    (t, format!("{} maps x {C9_SURFACES} surfaces, {cells} cells", group.len()))
}

fn c10(seen: &mut Seen) -> (Tally, String) {
    let mut t = Tally::default();
    let probes: Vec<RatSurface> = enumerate_subbasis(1, 2);
    let direct: [(&str, Vec<RatSurface>, RatSurface); 2] = [
        ("growing squares", samples::growing_squares(6), samples::centered_square(q(6, 1))),
        ("wrapping staircase", samples::staircase_chain(9), samples::staircase(9)),
    ];
    for (name, chain, expected) in &direct {
        match direct_limit(chain) {
            Ok((f, report)) => {
                let limit = seen.keep(&f.surface);
                let join = fuse(chain).unwrap().surface;
                t.check(same_surface(&limit, &join) && same_surface(&limit, expected), || format!("{name}: wrong limit"));
                t.check(report.passed, || format!("{name}: certificate fails\n{report}"));
                let wide = convergence_certificate(chain, Some(&limit), &probes).unwrap();
                t.check(wide.passed, || format!("{name}: subbasis certificate fails\n{wide}"));
            }
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
    let l = |k: i64| {
        RatSurface::checked(
            vec![RatRect::ints(0, 2 * k, 0, k), RatRect::ints(0, k, 0, 2 * k)],
            [(0, 1)],
            SurfacePoint::new(0, Point::new(q(1, 2), q(1, 2))),
            false,
        )
        .unwrap()
    };
    let inverse: [(&str, Vec<RatSurface>); 2] =
        [("shrinking squares", samples::shrinking_squares(6)), ("nested Ls", vec![l(4), l(3), l(2), l(1)])];
    for (name, chain) in &inverse {
        match inverse_limit(chain) {
            Ok((CoreResult::Surface(m), report)) => {
                let m = seen.keep(&m);
                t.check(same_surface(&m, chain.last().unwrap()), || format!("{name}: limit is not the last term"));
                t.check(report.passed, || format!("{name}: certificate fails\n{report}"));
                let wide = convergence_certificate(chain, Some(&m), &probes).unwrap();
                t.check(wide.passed, || format!("{name}: subbasis certificate fails\n{wide}"));
            }
            Ok((CoreResult::Empty, _)) => t.check(false, || format!("{name}: empty limit")),
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
    (t, "2 direct and 2 inverse chains".to_string())
}

fn c11(seen: &Seen) -> (Tally, String) {
    let mut t = Tally::default();
    for s in &seen.0 {
        let text = print_surface(s);
        match parse_surface::<Rational>(&text) {
            Ok(back) => {
                t.check(same_surface(&back, s) && isomorphic(&back, s), || format!("round trip changes {s:?}"));
                t.check(print_surface(&back) == text, || format!("printing is not stable for {s:?}"));
            }
            Err(e) => t.check(false, || format!("reparse failed: {e}")),
        }
    }
    (t, format!("{} surfaces", seen.0.len()))
}

fn main() -> ExitCode {
    // Accept and ignore libtest flags such as `--nocapture`.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut seen = Seen::default();
    type Criterion = fn(&mut Seen) -> (Tally, String);
    let criteria: [(&str, Criterion); 10] = [
        ("immersion order laws", c1),
        ("lattice laws", c2),
        ("fusion and core universality", c3),
        ("disk closure of fusion", c4),
        ("Euler bound", c5),
        ("rectilinear disk enumeration", c6),
        ("embedding radius", c7),
        ("basepoint algebra", c8),
        ("group action equivariance", c9),
        ("limits", c10),
    ];
    let mut failed = 0;
    let mut report = |n: usize, name: &str, (tally, detail): (Tally, String), secs: f64| {
        let verdict = if tally.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} {verdict} {name}: {} checks, {} failures (allowed {ALLOWED_FAILURES}); {detail} [{secs:.1}s]",
            tally.checks, tally.failures
        );
        for note in &tally.notes {
            println!("    {note}");
        }
        failed += usize::from(!tally.passed());
    };
    for (n, (name, run)) in criteria.iter().enumerate() {
        if filter.as_ref().is_some_and(|f| !name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = run(&mut seen);
        report(n + 1, name, out, start.elapsed().as_secs_f64());
    }
    let start = Instant::now();
    let out = c11(&seen);
    report(11, "serialization round trip", out, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
