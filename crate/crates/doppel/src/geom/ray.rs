//! Classification of how two viewing rays relate in 3D.
//!
//! Viewing rays are generically skew, so "the intersection point" is taken as
//! the pair of mutual closest points; the signs of their ray parameters decide
//! whether the surrogate intersection lies in front of or behind each camera.

use super::camera::PosedCamera;

/// Rays whose directions are closer to parallel than this (measured by sin of
/// the angle between them) are classified by the fallback rule instead of the
/// ill-conditioned closest-point system.
const PARALLEL_SIN_EPS: f64 = 1e-8;

/// The three viewing-ray cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayCase {
    /// Closest points lie ahead of both cameras.
    FrontFront,
    /// Closest points lie behind (or at) both cameras.
    BehindBehind,
    /// Ahead of one camera, behind the other.
    Mixed,
}

/// Mutual closest points of two viewing rays, by signed ray parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayRelation {
    pub case: RayCase,
    /// Signed parameter (meters) of the closest point along the first ray.
    pub t_a: f64,
    /// Signed parameter (meters) of the closest point along the second ray.
    pub t_b: f64,
    /// Distance between the two closest points, meters.
    pub gap: f64,
}

fn case_from_params(t_a: f64, t_b: f64) -> RayCase {
    // t = 0 counts as behind: a surface at the camera center is not imaged.
    let front_a = t_a > 0.0;
    let front_b = t_b > 0.0;
    match (front_a, front_b) {
        (true, true) => RayCase::FrontFront,
        (false, false) => RayCase::BehindBehind,
        _ => RayCase::Mixed,
    }
}

/// Computes the mutual closest points of the two viewing rays and classifies
/// the pair by the signs of the ray parameters.
pub fn classify_ray_relation(a: &PosedCamera, b: &PosedCamera) -> RayRelation {
    let d_a = a.dir();
    let d_b = b.dir();
    let w = a.center - b.center;

    let dot = d_a.dot(&d_b);
    let denom = 1.0 - dot * dot; // = sin^2 of the angle between unit dirs

    if denom < PARALLEL_SIN_EPS * PARALLEL_SIN_EPS {
        // Near-parallel: classify each ray by where the other camera sits,
        // which is continuous with the generic case as the angle closes.
        let t_a = d_a.dot(&-w); // projection of (b.center - a.center)
        let t_b = d_b.dot(&w);
        let perp = w - d_a * d_a.dot(&w);
        return RayRelation {
            case: case_from_params(t_a, t_b),
            t_a,
            t_b,
            gap: perp.norm(),
        };
    }

    // Closest points of lines a.center + t_a d_a and b.center + t_b d_b.
    let d = d_a.dot(&w);
    let e = d_b.dot(&w);
    let t_a = (dot * e - d) / denom;
    let t_b = (e - dot * d) / denom;

    let p_a = a.center + d_a * t_a;
    let p_b = b.center + d_b * t_b;

    RayRelation {
        case: case_from_params(t_a, t_b),
        t_a,
        t_b,
        gap: (p_a - p_b).norm(),
    }
}
