//! Fixture surfaces and random generators shared by tests, the acceptance
//! suite and the command line.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::geom::{Point, Rect};
use crate::scalar::Scalar;
use crate::surface::{Surface, SurfacePoint};

fn q<T: Scalar>(n: i64, d: i64) -> T {
    T::from_big(&BigRational::new(BigInt::from(n), BigInt::from(d))).expect("small rational")
}

fn pt<T: Scalar>(x: (i64, i64), y: (i64, i64)) -> Point<T> {
    Point::new(q(x.0, x.1), q(y.0, y.1))
}

/// `[0,1]²` based at its centre.
pub fn unit_square<T: Scalar>() -> Surface<T> {
    Surface::rectangle(Rect::ints(0, 1, 0, 1), pt((1, 2), (1, 2))).expect("valid")
}

/// `[-r, r]²` based at the origin.
pub fn centered_square<T: Scalar>(r: T) -> Surface<T> {
    let rect = Rect::new(-r.clone(), r.clone(), -r.clone(), r).expect("positive radius");
    Surface::rectangle(rect, Point::origin()).expect("valid")
}

/// `[0,3]²` minus the open hole `(1,2)²`, as four glued bands.
pub fn square_annulus<T: Scalar>() -> Surface<T> {
    let rects = vec![
        Rect::ints(0, 3, 0, 1),
        Rect::ints(2, 3, 0, 3),
        Rect::ints(0, 3, 2, 3),
        Rect::ints(0, 1, 0, 3),
    ];
    Surface::checked(rects, [(0, 1), (1, 2), (2, 3), (0, 3)], SurfacePoint::new(0, pt((3, 2), (1, 2))), false)
        .expect("valid")
}

/// Two rectangles forming an L.
pub fn l_shape<T: Scalar>() -> Surface<T> {
    let rects = vec![Rect::ints(0, 2, 0, 1), Rect::ints(0, 1, 0, 2)];
    Surface::checked(rects, [(0, 1)], SurfacePoint::new(0, pt((1, 2), (1, 2))), false).expect("valid")
}

/// The `k`-th band of the ramp around the hole `(1,2)²`, cycling bottom,
/// right, top, left.
fn band<T: Scalar>(k: usize) -> Rect<T> {
    match k % 4 {
        0 => Rect::ints(0, 3, 0, 1),
        1 => Rect::ints(2, 3, 0, 3),
        2 => Rect::ints(0, 3, 2, 3),
        _ => Rect::ints(0, 1, 0, 3),
    }
}

/// A ramp of `n` bands winding around a square hole, each glued only to its
/// successor. With more than four bands the ramp overlaps itself on different
/// sheets; nine bands wind past two full turns. Based in band 0.
pub fn staircase<T: Scalar>(n: usize) -> Surface<T> {
    assert!(n >= 1);
    let rects = (0..n).map(band).collect();
    let glue: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Surface::checked(rects, glue, SurfacePoint::new(0, pt((3, 2), (1, 2))), false).expect("ramp is a disk")
}

/// The nine-band staircase based on its middle sheet.
pub fn winding_staircase<T: Scalar>() -> Surface<T> {
    staircase::<T>(9).with_base(SurfacePoint::new(4, pt((3, 2), (1, 2)))).expect("valid")
}

/// Nested squares `[-n, n]²`, `n = 1..=len`.
pub fn growing_squares<T: Scalar>(len: usize) -> Vec<Surface<T>> {
    (1..=len as i64).map(|n| centered_square(T::from_int(n))).collect()
}

/// Nested squares `[-1/n, 1/n]²`, `n = 1..=len`.
pub fn shrinking_squares<T: Scalar>(len: usize) -> Vec<Surface<T>> {
    (1..=len as i64).map(|n| centered_square(q(1, n))).collect()
}

/// Staircases with `1..=len` bands, all based in band 0.
pub fn staircase_chain<T: Scalar>(len: usize) -> Vec<Surface<T>> {
    (1..=len).map(staircase).collect()
}

/// Parameters for random surfaces.
#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub max_rects: usize,
    /// Coordinates are multiples of `1/d` for some `d <= denom`.
    pub denom: i64,
    /// Half-width of the coordinate window, in whole units.
    pub window: i64,
    /// Probability of gluing a new rectangle to an overlapping non-parent.
    pub extra_glue: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { max_rects: 6, denom: 4, window: 3, extra_glue: 0.5 }
    }
}

fn random_interval<T: Scalar>(rng: &mut impl Rng, spec: &RandomSpec) -> (T, T) {
    let d = rng.gen_range(1..=spec.denom);
    let lim = spec.window * d;
    let a = rng.gen_range(-lim..lim);
    let b = rng.gen_range(a + 1..=lim);
    (q(a, d), q(b, d))
}

fn random_rect<T: Scalar>(rng: &mut impl Rng, spec: &RandomSpec) -> Rect<T> {
    let (x0, x1) = random_interval(rng, spec);
    let (y0, y1) = random_interval(rng, spec);
    Rect::new(x0, x1, y0, y1).expect("nondegenerate")
}

/// Random valid surface based at the origin. Each new rectangle overlaps and
/// is glued to an earlier one; further overlaps are glued with probability
/// `extra_glue`, so several sheets can arise.
pub fn random_surface<T: Scalar>(rng: &mut impl Rng, spec: &RandomSpec) -> Surface<T> {
    loop {
        let first = loop {
            let r: Rect<T> = random_rect(rng, spec);
            if r.contains(&Point::origin()) {
                break r;
            }
        };
        let n = rng.gen_range(1..=spec.max_rects);
        let mut rects = vec![first];
        let mut glue = Vec::new();
        let mut tries = 0;
        while rects.len() < n && tries < 50 {
            tries += 1;
            let r: Rect<T> = random_rect(rng, spec);
            let parent = rng.gen_range(0..rects.len());
            if !rects[parent].overlaps(&r) {
                continue;
            }
            let idx = rects.len();
            let mut g = vec![(parent, idx)];
            for (j, other) in rects.iter().enumerate() {
                if j != parent && other.touches(&r) && rng.gen_bool(spec.extra_glue) {
                    g.push((j, idx));
                }
            }
            let candidate = Surface::new(
                rects.iter().cloned().chain([r.clone()]).collect(),
                glue.iter().copied().chain(g.iter().copied()).collect::<Vec<_>>(),
                SurfacePoint::new(0, Point::origin()),
                false,
            )
            .expect("indices in range");
            if candidate.is_valid() {
                rects.push(r);
                glue.extend(g);
            }
        }
        if let Ok(s) = Surface::checked(rects, glue, SurfacePoint::new(0, Point::origin()), false) {
            return s;
        }
    }
}

/// Random valid surface embedded in the plane: every touching pair is glued.
pub fn random_flat_surface<T: Scalar>(rng: &mut impl Rng, spec: &RandomSpec) -> Surface<T> {
    random_surface(rng, &RandomSpec { extra_glue: 1.0, ..*spec })
}

/// A random valid sub-presentation: a subset of rectangles containing the
/// base rectangle, with the glue restricted. It immerses into `s`.
pub fn random_subsurface<T: Scalar>(rng: &mut impl Rng, s: &Surface<T>) -> Surface<T> {
    let n = s.rects().len();
    loop {
        let mut keep = vec![s.base().rect];
        for i in 0..n {
            if i != s.base().rect && rng.gen_bool(0.5) {
                keep.push(i);
            }
        }
        if let Ok(sub) = s.restrict(&keep, s.base().rect) {
            if sub.is_valid() {
                return sub;
            }
        }
    }
}

/// A random point of the surface with coordinates on a `1/denom` lattice
/// inside a random rectangle.
pub fn random_point<T: Scalar>(rng: &mut impl Rng, s: &Surface<T>, denom: i64) -> SurfacePoint<T> {
    let i = rng.gen_range(0..s.rects().len());
    let r = &s.rects()[i];
    let t = |lo: &T, hi: &T, rng: &mut dyn rand::RngCore| {
        let k = rng.gen_range(0..=denom);
        lo.clone() + (hi.clone() - lo.clone()) * q::<T>(k, denom)
    };
    let x = t(r.x_lo(), r.x_hi(), rng);
    let y = t(r.y_lo(), r.y_hi(), rng);
    SurfacePoint::new(i, Point::new(x, y))
}
