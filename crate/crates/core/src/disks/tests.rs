use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::morphism::{find_immersion, isomorphic};
use crate::samples::{self, RandomSpec};
use crate::transform::embedding_radius;

type Q = BigRational;
type S = Surface<Q>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn pt(x: Q, y: Q) -> Point<Q> {
    Point::new(x, y)
}

fn half(n: i64) -> Q {
    q(n, 2)
}

fn rect(x0: Q, x1: Q, y0: Q, y1: Q) -> Rect<Q> {
    Rect::new(x0, x1, y0, y1).unwrap()
}

/// Exhaustive oracle: copies of every region face by winding number, then
/// every set of glued copy pairs across grid edges in which each side of a
/// copy is used at most once, filtered to disks bounded by `gamma`.
fn oracle_disks(gamma: &RectiLoop<Q>) -> Vec<S> {
    let Ok(region) = gamma.region_decomposition() else { return Vec::new() };
    let rects: Vec<Rect<Q>> = region.iter().flat_map(|(r, w)| std::iter::repeat_n(r.clone(), *w as usize)).collect();
    if rects.is_empty() {
        return Vec::new();
    }
    // Pairs sharing a whole side, tagged with the sides used.
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
    let mut out = Vec::new();
    let mut used = HashSet::new();
    let mut glue = Vec::new();
    type Match = (usize, usize, (usize, usize), (usize, usize));
    fn go(
        k: usize,
        pairs: &[Match],
        used: &mut HashSet<(usize, usize)>,
        glue: &mut Vec<(usize, usize)>,
        rects: &[Rect<Q>],
        gamma: &RectiLoop<Q>,
        out: &mut Vec<S>,
    ) {
        if k == pairs.len() {
            let base = SurfacePoint::new(0, rects[0].center());
            if let Ok(s) = S::new(rects.to_vec(), glue.iter().copied(), base, false) {
                if s.classify() == Classification::Disk && s.loops().unwrap()[0].cyclically_equal(gamma) {
                    out.push(s);
                }
            }
            return;
        }
        go(k + 1, pairs, used, glue, rects, gamma, out);
        let (i, j, si, sj) = pairs[k];
        if !used.contains(&si) && !used.contains(&sj) {
            used.insert(si);
            used.insert(sj);
            glue.push((i, j));
            go(k + 1, pairs, used, glue, rects, gamma, out);
            glue.pop();
            used.remove(&si);
            used.remove(&sj);
        }
    }
    go(0, &pairs, &mut used, &mut glue, &rects, gamma, &mut out);
    // Unpointed comparison: re-anchor each on the loop.
    dedupe(out.iter().filter_map(|s| anchor_on(s, gamma)))
}

fn same_lists(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| isomorphic(x, y)))
}

#[test]
fn squares_bound_one_disk() {
    let gamma = RectiLoop::<Q>::ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
    let disks = disks_bounded_by(&gamma);
    assert_eq!(disks.len(), 1);
    assert!(isomorphic(&disks[0], &samples::unit_square()));
    assert!(disks_bounded_by(&gamma.reversed()).is_empty());

    let l = samples::l_shape::<Q>();
    let gamma = &l.loops().unwrap()[0];
    let disks = disks_bounded_by(gamma);
    assert_eq!(disks.len(), 1);
    assert!(isomorphic(&disks[0], &anchor_on(&l, gamma).unwrap()));
}

#[test]
fn staircase_loops_match_exhaustive_gluing() {
    for n in 4..=6 {
        let s = samples::staircase::<Q>(n);
        let gamma = &s.loops().unwrap()[0];
        let region = gamma.region_decomposition().unwrap();
        assert!(region.iter().any(|(_, w)| *w == 1) && region.iter().any(|(_, w)| *w == 2));
        let disks = disks_bounded_by(gamma);
        assert!(same_lists(&disks, &oracle_disks(gamma)), "staircase {n}");
        assert!(disks.iter().any(|d| isomorphic(d, &anchor_on(&s, gamma).unwrap())));
        for d in &disks {
            assert_eq!(d.classify(), Classification::Disk);
            assert!(d.loops().unwrap()[0].cyclically_equal(gamma));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_disk_loops(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let spec = RandomSpec { max_rects: 4, denom: 1, window: 2, ..RandomSpec::default() };
        let s: S = samples::random_surface(&mut r, &spec);
        prop_assume!(s.classify() == Classification::Disk);
        let gamma = &s.loops().unwrap()[0];
        let disks = disks_bounded_by(gamma);
        prop_assert!(disks.iter().any(|d| isomorphic(d, &anchor_on(&s, gamma).unwrap())));
        prop_assert!(same_lists(&disks, &oracle_disks(gamma)));
    }
}

fn whole(s: &S) -> SubUnion<Q> {
    SubUnion::whole(s)
}

fn bands_in(host: usize) -> Vec<(usize, Rect<Q>)> {
    samples::square_annulus::<Q>().rects().iter().map(|r| (host, r.clone())).collect()
}

#[test]
fn closed_disks() {
    let sq = samples::unit_square::<Q>();
    assert!(isomorphic(&smallest_closed_disk(&sq, &whole(&sq)).unwrap(), &sq));

    // The annulus inside the filled square fills up.
    let big = S::rectangle(Rect::ints(0, 3, 0, 3), pt(half(3), half(1))).unwrap();
    let k = SubUnion::new(bands_in(0), false);
    let d = smallest_closed_disk(&big, &k).unwrap();
    assert!(isomorphic(&d, &big));

    // With a lid glued to all four bands, the filling uses the lid; its area
    // is that of the disk bounded by the inner loop.
    let ann = samples::square_annulus::<Q>();
    let mut rects = ann.rects().to_vec();
    rects.push(Rect::ints(1, 2, 1, 2));
    let mut glue: Vec<(usize, usize)> = ann.glue().iter().copied().collect();
    glue.extend((0..4).map(|i| (i, 4)));
    let lidded = S::checked(rects, glue, ann.base().clone(), false).unwrap();
    let k = SubUnion::new((0..4).map(|i| (i, ann.rects()[i].clone())).collect(), false);
    let d = smallest_closed_disk(&lidded, &k).unwrap();
    let inner = ann.loops().unwrap().into_iter().find(|l| l.turning_number() == -1).unwrap();
    let holes = disks_bounded_by(&inner.reversed());
    assert_eq!(holes.len(), 1);
    assert_eq!(d.area(), ann.area() + holes[0].area());
    assert!(embeds(&k.to_surface(&lidded).unwrap(), &d));

    // Without the lid there is nothing to fill with.
    assert_eq!(smallest_closed_disk(&ann, &whole(&ann)).unwrap_err(), DiskError::NotContainedInS);
}

#[test]
fn closed_disks_in_the_staircase() {
    let s = samples::winding_staircase::<Q>();
    let k = SubUnion::new((2..7).map(|i| (i, s.rects()[i].clone())).collect(), false);
    let d = smallest_closed_disk(&s, &k).unwrap();
    assert!(isomorphic(&d, &k.to_surface(&s).unwrap()));
}

#[test]
fn open_disks() {
    let sq = samples::unit_square::<Q>().with_open(true).unwrap();
    assert!(isomorphic(&smallest_open_disk(&sq, &whole(&sq)).unwrap(), &sq));

    let big = S::rectangle(Rect::ints(0, 3, 0, 3), pt(half(3), half(1))).unwrap();
    let u = SubUnion::new(bands_in(0), true);
    let d = smallest_open_disk(&big, &u).unwrap();
    assert!(isomorphic(&d, &big.with_open(true).unwrap()));

    let ann = samples::square_annulus::<Q>();
    let d = smallest_open_disk(&ann, &SubUnion::new(whole(&ann).pieces, true)).unwrap();
    assert_eq!(d.classify(), Classification::PuncturedDisk(1));
}

/// Flood-fill oracle on faces: two faces outside `u` are joined when they
/// share a closure cell outside `u`; a group is compact when none of its
/// cells lies on the boundary of the host.
fn oracle_open_area(s: &S, u: &SubUnion<Q>) -> Q {
    let placed = u.place(s).unwrap();
    let c = &placed.complex;
    let inside = &placed.interior;
    let faces: Vec<ClassId> = c.faces().collect();
    let closure = |f: ClassId| {
        let mut v = c.class(f).down.clone();
        v.push(f);
        v
    };
    let mut uf = crate::unionfind::UnionFind::new(c.len());
    for &f in faces.iter().filter(|&&f| !inside[f]) {
        for x in closure(f) {
            if !inside[x] {
                uf.union(f, x);
            }
        }
    }
    let mut open_group = HashSet::new();
    for (x, &ins) in inside.iter().enumerate().take(c.len()) {
        if !ins && c.is_boundary(x) {
            open_group.insert(uf.find(x));
        }
    }
    faces
        .iter()
        .filter(|&&f| inside[f] || !open_group.contains(&uf.find(f)))
        .map(|&f| {
            let [x0, x1, y0, y1] = c.footprint(f);
            (x1 - x0) * (y1 - y0)
        })
        .fold(q(0, 1), |a, b| a + b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn open_disks_match_flood_fill(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let s: S = samples::random_surface(&mut r, &RandomSpec::default());
        let base = s.base().rect;
        let keep: Vec<(usize, Rect<Q>)> = (0..s.rects().len())
            .filter(|&i| i == base || r.gen_bool(0.6))
            .map(|i| (i, s.rects()[i].clone()))
            .collect();
        let u = SubUnion::new(keep, true);
        let placed = u.place(&s).unwrap();
        let c = &placed.complex;
        prop_assume!(placed.interior[c.locate(base, &s.base().point).unwrap()]);
        match smallest_open_disk(&s, &u) {
            Ok(d) => prop_assert_eq!(d.area(), oracle_open_area(&s, &u)),
            // Filling can fail only when the result is not locally a surface.
            Err(e) => prop_assert!(matches!(e, DiskError::PreconditionViolated(_)), "{e}"),
        }
    }

    #[test]
    fn closed_disks_are_minimal(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let s: S = samples::random_surface(&mut r, &RandomSpec::default());
        prop_assume!(s.classify() == Classification::Disk);
        let base = s.base().rect;
        let keep: Vec<(usize, Rect<Q>)> = (0..s.rects().len())
            .filter(|&i| i == base || r.gen_bool(0.6))
            .map(|i| (i, s.rects()[i].clone()))
            .collect();
        let k = SubUnion::new(keep, false);
        let Ok(ks) = k.to_surface(&s).and_then(|k| k.into_valid()) else { return Ok(()) };
        if let Ok(d) = smallest_closed_disk(&s, &k) {
            prop_assert_eq!(d.classify(), Classification::Disk);
            prop_assert!(embeds(&ks, &d));
            prop_assert!(embeds(&d, &s));
            // Any disk between k and s contains the result.
            let mut more = k.pieces.clone();
            more.extend((0..s.rects().len()).filter(|_| r.gen_bool(0.5)).map(|i| (i, s.rects()[i].clone())));
            let bigger = SubUnion::new(more, false);
            if let Ok(b) = bigger.to_surface(&s) {
                if b.classify() == Classification::Disk {
                    prop_assert!(immerses(&d, &b));
                }
            }
        }
    }
}

#[test]
fn images_of_flat_and_winding() {
    let l = samples::l_shape::<Q>();
    let images = immersed_images(&l).unwrap();
    assert_eq!(images.len(), 1);
    assert!(isomorphic(&images[0], &l));

    let w = samples::winding_staircase::<Q>();
    let images = immersed_images(&w).unwrap();
    assert!(images.iter().any(|i| isomorphic(i, &w)));
    let flat = samples::square_annulus::<Q>().with_base(SurfacePoint::new(0, w.base().point.clone())).unwrap();
    assert!(images.iter().any(|i| isomorphic(i, &flat)));
    let n = w.rects().len();
    let free = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| w.rects()[i].touches(&w.rects()[j]) && !w.is_glued(i, j))
        .count();
    assert!(images.len() <= 1 << free);
    for i in &images {
        assert!(immerses(&w, i));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn images_cover_immersions(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let spec = RandomSpec { max_rects: 4, ..RandomSpec::default() };
        let k: S = samples::random_surface(&mut r, &spec);
        let other: S = samples::random_surface(&mut r, &spec);
        let t = fuse(&[k.clone(), other]).unwrap().surface;
        let images = immersed_images(&k).unwrap();
        let m = find_immersion(&k, &t).unwrap();
        if let Ok(image) = m.image_surface(&k) {
            prop_assert!(images.iter().any(|i| isomorphic(i, &image)));
        }
        let total = k.rects().len() * (k.rects().len() - 1) / 2;
        prop_assert!(images.len() <= 1 << (total - k.glue().len()));
    }
}

#[test]
fn open_disks_of_embeddings() {
    let sq = samples::unit_square::<Q>().with_open(true).unwrap();
    let out = smallest_open_disks_of_embeddings(&sq).unwrap();
    assert_eq!(out.len(), 1);
    assert!(isomorphic(&out[0], &sq));

    let ann = samples::square_annulus::<Q>().with_open(true).unwrap();
    let out = smallest_open_disks_of_embeddings(&ann).unwrap();
    let big = S::rectangle(Rect::ints(0, 3, 0, 3), ann.base().point.clone()).unwrap().with_open(true).unwrap();
    assert_eq!(out.len(), 1);
    assert!(isomorphic(&out[0], &big));
}

/// Targets made of the annulus bands plus extra rectangles glued to random
/// overlapping earlier ones; where the annulus fills to a disk, that disk is
/// listed.
#[test]
fn open_disks_of_embeddings_match_targets() {
    let ann = samples::square_annulus::<Q>();
    let u = ann.with_open(true).unwrap();
    let listed = smallest_open_disks_of_embeddings(&u).unwrap();
    let extras = [Rect::ints(1, 2, 1, 2), Rect::ints(0, 3, 0, 3), Rect::ints(0, 2, 0, 2), Rect::ints(1, 3, 1, 3)];
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut filled = 0;
    for _ in 0..200 {
        let mut rects = ann.rects().to_vec();
        let mut glue: Vec<(usize, usize)> = ann.glue().iter().copied().collect();
        for _ in 0..r.gen_range(1..=2) {
            let e = extras[r.gen_range(0..extras.len())].clone();
            let idx = rects.len();
            for (j, rj) in rects.iter().enumerate() {
                if rj.overlaps(&e) && r.gen_bool(0.7) {
                    glue.push((j, idx));
                }
            }
            rects.push(e);
        }
        let Ok(t) = S::checked(rects, glue, ann.base().clone(), false) else { continue };
        let Ok(d) = smallest_open_disk(&t, &SubUnion::new(bands_in(0).into_iter().enumerate().map(|(i, (_, r))| (i, r)).collect(), true)) else {
            continue;
        };
        if d.classify() == Classification::Disk {
            filled += 1;
            assert!(listed.iter().any(|l| isomorphic(l, &d)));
        }
    }
    assert!(filled > 0);
}

fn strictly_nested(k1: &S, k2: &S, k3: &S) -> bool {
    immerses(k1, &k2.with_open(true).unwrap()) && embeds(k1, k2) && immerses(k2, &k3.with_open(true).unwrap()) && embeds(k2, k3)
}

#[test]
fn nested_unions() {
    let k3 = samples::unit_square::<Q>();
    let k1 = S::rectangle(rect(q(1, 4), q(3, 4), q(1, 4), q(3, 4)), pt(half(1), half(1))).unwrap();
    let k2 = nested_rational_union(&k1, &k3, &find_immersion(&k1, &k3).unwrap()).unwrap();
    assert!(strictly_nested(&k1, &k2, &k3));
    assert_eq!(k2.classify(), Classification::Disk);

    // An L deep inside the annulus.
    let ann = samples::square_annulus::<Q>();
    let l = S::checked(
        vec![rect(q(1, 2), q(5, 2), q(1, 4), q(3, 4)), rect(q(9, 4), q(11, 4), q(1, 4), q(5, 2))],
        [(0, 1)],
        SurfacePoint::new(0, pt(half(3), half(1))),
        false,
    )
    .unwrap();
    let k2 = nested_rational_union(&l, &ann, &find_immersion(&l, &ann).unwrap()).unwrap();
    assert!(strictly_nested(&l, &k2, &ann));

    // A thin ring: kept as a ring in the annulus, filled in the square.
    let ring = S::checked(
        vec![
            rect(q(1, 4), q(11, 4), q(1, 4), q(3, 4)),
            rect(q(9, 4), q(11, 4), q(1, 4), q(11, 4)),
            rect(q(1, 4), q(11, 4), q(9, 4), q(11, 4)),
            rect(q(1, 4), q(3, 4), q(1, 4), q(11, 4)),
        ],
        [(0, 1), (1, 2), (2, 3), (0, 3)],
        SurfacePoint::new(0, pt(half(3), half(1))),
        false,
    )
    .unwrap();
    let k2 = nested_rational_union(&ring, &ann, &find_immersion(&ring, &ann).unwrap()).unwrap();
    assert!(strictly_nested(&ring, &k2, &ann));
    assert_eq!(k2.classify(), Classification::PuncturedDisk(1));
    let big = S::rectangle(Rect::ints(0, 3, 0, 3), pt(half(3), half(1))).unwrap();
    let k2 = nested_rational_union(&ring, &big, &find_immersion(&ring, &big).unwrap()).unwrap();
    assert!(strictly_nested(&ring, &k2, &big));
    assert_eq!(k2.classify(), Classification::Disk);

    // Touching the boundary is refused.
    let err = nested_rational_union(&k3, &k3, &find_immersion(&k3, &k3).unwrap()).unwrap_err();
    assert!(matches!(err, DiskError::PreconditionViolated(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nested_random(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let k3: S = samples::random_surface(&mut r, &RandomSpec::default());
        let er = embedding_radius(&k3, k3.base()).unwrap();
        prop_assume!(er.squared > q(0, 1));
        // A square of half-width below the radius, around the basepoint.
        let mut h = q(1, 1);
        while h.clone() * h.clone() >= er.squared {
            h *= q(1, 2);
        }
        let h = h * q(1, 2);
        let b = k3.base().point.clone();
        let k1 = S::rectangle(rect(b.x.clone() - h.clone(), b.x.clone() + h.clone(), b.y.clone() - h.clone(), b.y.clone() + h), b).unwrap();
        let m = find_immersion(&k1, &k3).unwrap();
        let k2 = nested_rational_union(&k1, &k3, &m).unwrap();
        prop_assert!(strictly_nested(&k1, &k2, &k3));
        if k3.classify() == Classification::Disk {
            prop_assert_eq!(k2.classify(), Classification::Disk);
        }
    }
}

/// Brute force over ordered rectangle lists and glue sets, classes found by
/// pairwise comparison.
fn oracle_subbasis_count(max_rects: usize) -> usize {
    let ints: Vec<(i64, i64)> = vec![(-1, 0), (0, 1), (-1, 1)];
    let all: Vec<Rect<Q>> = ints.iter().flat_map(|&(a, b)| ints.iter().map(move |&(c, d)| Rect::ints(a, b, c, d))).collect();
    let mut found: Vec<S> = Vec::new();
    let mut lists: Vec<Vec<Rect<Q>>> = all.iter().map(|r| vec![r.clone()]).collect();
    let mut frontier = lists.clone();
    for _ in 1..max_rects {
        frontier = frontier.iter().flat_map(|l| all.iter().map(move |r| [l.clone(), vec![r.clone()]].concat())).collect();
        lists.extend(frontier.iter().cloned());
    }
    for rects in lists {
        let n = rects.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0..1u32 << pairs.len() {
            let glue: Vec<(usize, usize)> = (0..pairs.len()).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
            for b in 0..n {
                let base = SurfacePoint::new(b, Point::origin());
                if let Ok(s) = S::checked(rects.clone(), glue.clone(), base, false) {
                    if !found.iter().any(|f| isomorphic(f, &s)) {
                        found.push(s);
                    }
                }
            }
        }
    }
    found.len()
}

#[test]
fn subbasis_counts() {
    let one = enumerate_subbasis::<Q>(1, 1);
    assert_eq!(one.len(), 9);
    let two = enumerate_subbasis::<Q>(2, 1);
    assert_eq!(two.len(), oracle_subbasis_count(2));
    for (i, a) in two.iter().enumerate() {
        assert!(a.is_valid() && a.base().point.is_origin());
        for b in &two[i + 1..] {
            assert!(!isomorphic(a, b));
        }
    }
    assert_eq!(enumerate_subbasis::<Q>(2, 1).len(), two.len());
    let halves = enumerate_subbasis::<Q>(1, 2);
    assert_eq!(halves.len(), 64);
}

