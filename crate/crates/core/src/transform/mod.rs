//! Basepoint changes, embedding radii, ball charts and the axis-preserving
//! linear action.

mod affine;
mod radius;

pub use affine::{act, act_pointed, AxisAffine, NotAxisAffine};
pub use radius::{
    ball_embed, embedding_radius, lift_segment, lipschitz_holds, min_embedding_radius, segment_cells, BallChart,
    ERValue, Geodesics, PathLength, Radii,
};

use thiserror::Error;

use crate::geom::Point;
use crate::morphism::find_immersion;
use crate::scalar::Scalar;
use crate::surface::{SubUnion, Surface, SurfaceError, SurfacePoint};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("radius {requested} exceeds the embedding radius {radius}")]
    RadiusTooLarge { requested: String, radius: String },
    #[error("the union meets the boundary")]
    KTouchesBoundary,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// The translation identifying a surface with its rebased copy, acting on
/// point names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasepointMap<T> {
    pub offset: Point<T>,
}

impl<T: Scalar> BasepointMap<T> {
    pub fn apply(&self, p: &SurfacePoint<T>) -> SurfacePoint<T> {
        SurfacePoint::new(p.rect, p.point.sub(&self.offset))
    }

    pub fn inverse(&self) -> Self {
        BasepointMap { offset: self.offset.neg() }
    }
}

/// The same surface based at `p`, translated so `p` develops to the origin.
pub fn rebase<T: Scalar>(s: &Surface<T>, p: &SurfacePoint<T>) -> Result<(Surface<T>, BasepointMap<T>), SurfaceError> {
    let offset = s.dev(p)?;
    let map = BasepointMap { offset: offset.clone() };
    let moved = s.translate(&offset.neg()).with_base(map.apply(p))?;
    Ok((moved, map))
}

/// Build the embedding of `k` into the surface rebased at `p`, obtained by
/// pushing every point of `k` along `dev(p) - dev(base)`, and verify it
/// against [`find_immersion`]. Requires the base in `k`, `p` within the
/// embedding radius of `k` and reached straight from the base.
pub fn perturb_embed_check<T: Scalar>(
    s: &Surface<T>,
    k: &SubUnion<T>,
    p: &SurfacePoint<T>,
) -> Result<bool, TransformError> {
    let eps = min_embedding_radius(s, k)?;
    let base = s.base();
    let v = s.dev(p)?.sub(&base.point);
    if v.norm2() >= eps.squared {
        return Err(TransformError::PreconditionViolated(format!("displacement is not below {eps}")));
    }
    let c = s.complex();
    let reach = lift_segment(c, s.base_class(), &base.point, &p.point);
    if reach.and_then(|path| path.last().copied()) != Some(s.class_of(p)?) {
        return Err(TransformError::PreconditionViolated("p is not reached straight from the basepoint".into()));
    }
    let ks = k.to_surface(s)?;
    if ks.base().point != base.point {
        return Err(TransformError::PreconditionViolated("the basepoint is not in the union".into()));
    }
    let ks = ks.into_valid()?;
    let (target, beta) = rebase(s, p)?;
    let Ok(map) = find_immersion(&ks, &target) else { return Ok(false) };
    if !map.is_injective() {
        return Ok(false);
    }
    // Compare with the explicit formula at every corner of every piece.
    for (i, r) in ks.rects().iter().enumerate() {
        for corner in r.corners() {
            let x = SurfacePoint::new(i, corner.clone());
            let Some(image) = map.map_point(&x) else { return Ok(false) };
            let host = SurfacePoint::new(k.pieces[i].0, corner.clone());
            let pushed = lift_segment(c, s.class_of(&host)?, &corner, &corner.add(&v))
                .and_then(|path| path.last().copied());
            let back = beta.inverse().apply(&image);
            if pushed != Some(s.class_of(&back)?) || back.point != corner.add(&v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
