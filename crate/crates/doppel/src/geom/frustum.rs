//! Truncated view frustums and their exact intersection test.
//!
//! A frustum is the rectangular pyramid of a camera's view clipped at near
//! and far planes: a convex polytope with 8 vertices. Intersection between
//! two frustums is decided by the separating-axis test, which is exact for
//! convex polytopes; a sampling oracle cross-checks it in the test suite.

use nalgebra::Vector3;

use super::camera::PosedCamera;
use super::GeomError;

/// A camera view frustum clipped at near/far, in the camera's local frame.
#[derive(Debug, Clone)]
pub struct Frustum {
    /// Near-plane corners then far-plane corners, in cyclic corner order.
    vertices: [Vector3<f64>; 8],
    /// Unit-free face normal directions: viewing axis plus 4 side normals.
    face_axes: [Vector3<f64>; 5],
    /// Edge directions: the 4 corner rays plus the two cross-section axes.
    edge_dirs: [Vector3<f64>; 6],
    /// Inward-oriented planes (normal, offset) with `n . p >= d` inside.
    planes: [(Vector3<f64>, f64); 6],
}

/// Orthonormal right/up completion of a viewing direction, with zero roll:
/// the image rows stay as level as the direction allows. A camera pointing
/// straight up or down falls back to north as the up reference.
pub fn camera_basis(dir: Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let world_up = Vector3::z();
    let reference = if dir.dot(&world_up).abs() > 1.0 - 1e-9 {
        Vector3::y()
    } else {
        world_up
    };
    let right = dir.cross(&reference).normalize();
    let up = right.cross(&dir);
    (right, up)
}

impl Frustum {
    pub fn from_camera(cam: &PosedCamera, near: f64, far: f64) -> Result<Self, GeomError> {
        if !(near.is_finite() && far.is_finite()) || near <= 0.0 || far <= near {
            return Err(GeomError::InvalidFrustumRange { near, far });
        }
        let forward = cam.dir();
        let (right, up) = camera_basis(forward);
        let i = &cam.intrinsics;

        // Corner offsets in the image plane at unit forward depth. Image v
        // grows downward, so it maps to -up.
        let a_min = (0.0 - i.cx) / i.fx;
        let a_max = (f64::from(cam.width) - i.cx) / i.fx;
        let b_min = (0.0 - i.cy) / i.fy;
        let b_max = (f64::from(cam.height) - i.cy) / i.fy;

        // Cyclic corner order so adjacent pairs share a side face.
        let corners = [
            (a_min, b_min),
            (a_max, b_min),
            (a_max, b_max),
            (a_min, b_max),
        ];
        let rays = corners.map(|(a, b)| forward + right * a - up * b);

        let mut vertices = [Vector3::zeros(); 8];
        for (k, ray) in rays.iter().enumerate() {
            vertices[k] = cam.center + ray * near;
            vertices[k + 4] = cam.center + ray * far;
        }

        let face_axes = [
            forward,
            rays[0].cross(&rays[1]),
            rays[1].cross(&rays[2]),
            rays[2].cross(&rays[3]),
            rays[3].cross(&rays[0]),
        ];
        let edge_dirs = [rays[0], rays[1], rays[2], rays[3], right, up];

        // Inward planes: near/far caps plus the four sides. Side normals are
        // oriented toward the opposite corner ray.
        let mut planes = [(Vector3::zeros(), 0.0); 6];
        planes[0] = (forward, forward.dot(&(cam.center + forward * near)));
        planes[1] = (-forward, -forward.dot(&(cam.center + forward * far)));
        for k in 0..4 {
            let mut n = face_axes[k + 1];
            let other = rays[(k + 2) % 4];
            if n.dot(&other) < 0.0 {
                n = -n;
            }
            planes[k + 2] = (n, n.dot(&cam.center));
        }

        Ok(Self {
            vertices,
            face_axes,
            edge_dirs,
            planes,
        })
    }

    pub fn vertices(&self) -> &[Vector3<f64>; 8] {
        &self.vertices
    }

    /// True if the point lies inside or on the frustum boundary.
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        self.planes.iter().all(|(n, d)| n.dot(p) >= *d - 1e-9)
    }

    fn project(&self, axis: &Vector3<f64>) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in &self.vertices {
            let s = axis.dot(v);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }
}

/// True iff the truncated view frustums of the two cameras intersect.
///
/// Symmetric in its arguments; exact for the convex clipped pyramids.
pub fn frustum_overlap(
    a: &PosedCamera,
    b: &PosedCamera,
    near: f64,
    far: f64,
) -> Result<bool, GeomError> {
    let fa = Frustum::from_camera(a, near, far)?;
    let fb = Frustum::from_camera(b, near, far)?;
    Ok(frustums_intersect(&fa, &fb))
}

/// Separating-axis test over face normals and pairwise edge cross products.
pub fn frustums_intersect(fa: &Frustum, fb: &Frustum) -> bool {
    let mut separated_on = |axis: Vector3<f64>| -> bool {
        if axis.norm_squared() < 1e-18 {
            return false; // degenerate axis carries no information
        }
        let (a_lo, a_hi) = fa.project(&axis);
        let (b_lo, b_hi) = fb.project(&axis);
        a_hi < b_lo || b_hi < a_lo
    };

    for axis in fa.face_axes.iter().chain(fb.face_axes.iter()) {
        if separated_on(*axis) {
            return false;
        }
    }
    for ea in &fa.edge_dirs {
        for eb in &fb.edge_dirs {
            if separated_on(ea.cross(eb)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::camera::Intrinsics;

    fn cam(center: [f64; 3], dir: [f64; 3]) -> PosedCamera {
        PosedCamera::new(
            Vector3::from(center),
            Vector3::from(dir),
            Intrinsics::new(500.0, 500.0, 400.0, 300.0).unwrap(),
            800,
            600,
        )
        .unwrap()
    }

    #[test]
    fn frustum_intersects_itself() {
        let a = cam([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert!(frustum_overlap(&a, &a, 0.5, 200.0).unwrap());
    }

    #[test]
    fn back_to_back_frustums_disjoint() {
        let a = cam([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let b = cam([0.0, 0.0, 0.0], [0.0, -1.0, 0.0]);
        assert!(!frustum_overlap(&a, &b, 0.5, 200.0).unwrap());
    }

    #[test]
    fn collinear_cameras_share_volume() {
        let a = cam([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let b = cam([0.0, 50.0, 0.0], [0.0, 1.0, 0.0]);
        assert!(frustum_overlap(&a, &b, 0.5, 100.0).unwrap());
    }

    #[test]
    fn far_apart_parallel_frustums_disjoint() {
        let a = cam([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let b = cam([1000.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert!(!frustum_overlap(&a, &b, 0.5, 200.0).unwrap());
    }

    #[test]
    fn overlap_is_symmetric() {
        let a = cam([0.0, 0.0, 0.0], [1.0, 0.4, 0.0]);
        let b = cam([30.0, -10.0, 2.0], [-0.6, 1.0, 0.1]);
        assert_eq!(
            frustum_overlap(&a, &b, 0.5, 200.0).unwrap(),
            frustum_overlap(&b, &a, 0.5, 200.0).unwrap()
        );
    }

    #[test]
    fn invalid_clip_range_rejected() {
        let a = cam([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert!(frustum_overlap(&a, &a, 0.0, 200.0).is_err());
        assert!(frustum_overlap(&a, &a, 5.0, 5.0).is_err());
        assert!(frustum_overlap(&a, &a, 10.0, 2.0).is_err());
    }

    #[test]
    fn contains_center_ray_points() {
        let a = cam([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let f = Frustum::from_camera(&a, 0.5, 200.0).unwrap();
        assert!(f.contains(&Vector3::new(0.0, 1.0, 0.0)));
        assert!(f.contains(&Vector3::new(0.0, 199.0, 0.0)));
        assert!(!f.contains(&Vector3::new(0.0, 0.1, 0.0))); // before near plane
        assert!(!f.contains(&Vector3::new(0.0, 201.0, 0.0))); // beyond far plane
        assert!(!f.contains(&Vector3::new(0.0, -5.0, 0.0))); // behind camera
    }
}
