use std::fmt;

use thiserror::Error;

use crate::geom::{Point, Rect};
use crate::scalar::Scalar;
use crate::surface::{Surface, SurfacePoint};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("not a signed permutation with positive scaling: {0}")]
pub struct NotAxisAffine(pub String);

/// A linear map fixing the origin that sends axis-parallel rectangles to
/// axis-parallel rectangles: a signed permutation matrix times a positive
/// diagonal. Stored as the matrix `[[a, b], [c, d]]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AxisAffine<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

impl<T: Scalar> AxisAffine<T> {
    /// Exactly one nonzero entry per row and column.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, NotAxisAffine> {
        let diagonal = b.is_zero() && c.is_zero() && !a.is_zero() && !d.is_zero();
        let swap = a.is_zero() && d.is_zero() && !b.is_zero() && !c.is_zero();
        if !(diagonal || swap) {
            return Err(NotAxisAffine(format!("[[{a}, {b}], [{c}, {d}]]")));
        }
        Ok(AxisAffine { a, b, c, d })
    }

    pub fn identity() -> Self {
        AxisAffine::diag(T::one(), T::one())
    }

    /// `diag(dx, dy)`; negative entries reflect.
    pub fn diag(dx: T, dy: T) -> Self {
        AxisAffine::new(dx, T::zero(), T::zero(), dy).expect("nonzero diagonal")
    }

    /// The eight symmetries of the square.
    pub fn signed_permutations() -> Vec<Self> {
        let mut out = Vec::new();
        for swap in [false, true] {
            for sx in [1, -1] {
                for sy in [1, -1] {
                    let (x, y) = (T::from_int(sx), T::from_int(sy));
                    out.push(if swap {
                        AxisAffine::new(T::zero(), x, y, T::zero())
                    } else {
                        AxisAffine::new(x, T::zero(), T::zero(), y)
                    }
                    .expect("signed permutation"));
                }
            }
        }
        out
    }

    pub fn matrix(&self) -> [&T; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn reverses_orientation(&self) -> bool {
        self.det().is_negative()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = |x: &T, y: &T, z: &T, w: &T| x.clone() * y.clone() + z.clone() * w.clone();
        AxisAffine {
            a: m(&self.a, &other.a, &self.b, &other.c),
            b: m(&self.a, &other.b, &self.b, &other.d),
            c: m(&self.c, &other.a, &self.d, &other.c),
            d: m(&self.c, &other.b, &self.d, &other.d),
        }
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        AxisAffine {
            a: self.d.clone() / det.clone(),
            b: -self.b.clone() / det.clone(),
            c: -self.c.clone() / det.clone(),
            d: self.a.clone() / det,
        }
    }

    pub fn apply(&self, p: &Point<T>) -> Point<T> {
        Point::new(
            self.a.clone() * p.x.clone() + self.b.clone() * p.y.clone(),
            self.c.clone() * p.x.clone() + self.d.clone() * p.y.clone(),
        )
    }

    pub fn apply_rect(&self, r: &Rect<T>) -> Rect<T> {
        let [p, q, ..] = r.corners();
        let (p, q) = (self.apply(&p), self.apply(&q));
        let [_, _, s, t] = r.corners();
        let (s, t) = (self.apply(&s), self.apply(&t));
        let xs = [&p.x, &q.x, &s.x, &t.x];
        let ys = [&p.y, &q.y, &s.y, &t.y];
        let lo = |v: [&T; 4]| v.into_iter().min().expect("four").clone();
        let hi = |v: [&T; 4]| v.into_iter().max().expect("four").clone();
        Rect::new(lo(xs), hi(xs), lo(ys), hi(ys)).expect("invertible maps keep extent")
    }
}

impl<T: fmt::Display> fmt::Debug for AxisAffine<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Map every rectangle and the basepoint by `h`; glue is unchanged. Boundary
/// orientation is recomputed from the new geometry, so orientation-reversing
/// maps need no extra care.
pub fn act<T: Scalar>(h: &AxisAffine<T>, s: &Surface<T>) -> Surface<T> {
    act_pointed(h, s, s.base()).0
}

/// `act` together with the image of a point.
pub fn act_pointed<T: Scalar>(
    h: &AxisAffine<T>,
    s: &Surface<T>,
    p: &SurfacePoint<T>,
) -> (Surface<T>, SurfacePoint<T>) {
    let rects = s.rects().iter().map(|r| h.apply_rect(r)).collect();
    let base = SurfacePoint::new(s.base().rect, h.apply(&s.base().point));
    let out = Surface::new(rects, s.glue().iter().copied(), base, s.is_open()).expect("same structure");
    (out, SurfacePoint::new(p.rect, h.apply(&p.point)))
}
