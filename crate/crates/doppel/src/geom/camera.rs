//! Camera metadata and poses in a local metric frame.

use nalgebra::Vector3;

use super::geodesy::{ecef_to_enu, wgs84_to_ecef, Geodetic};
use super::GeomError;

/// Pinhole intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self, GeomError> {
        if !(fx.is_finite() && fy.is_finite() && cx.is_finite() && cy.is_finite()) {
            return Err(GeomError::NonFinite("intrinsics"));
        }
        if fx <= 0.0 || fy <= 0.0 {
            return Err(GeomError::NonPositiveFocal { fx, fy });
        }
        Ok(Self { fx, fy, cx, cy })
    }
}

/// A camera described by geotag metadata: position, compass heading, and
/// intrinsic calibration, as recorded alongside each image.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoCamera {
    pub id: String,
    pub position: Geodetic,
    /// Degrees clockwise from true north, normalized to [0, 360).
    pub heading: f64,
    /// Degrees toward Up, in [-90, 90]. Zero when the metadata lacks it.
    pub pitch: f64,
    pub intrinsics: Intrinsics,
    pub width: u32,
    pub height: u32,
}

impl GeoCamera {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: impl Into<String>,
        position: Geodetic,
        heading: f64,
        pitch: f64,
        intrinsics: Intrinsics,
        width: u32,
        height: u32,
    ) -> Result<Self, GeomError> {
        let id = id.into();
        if id.is_empty() {
            return Err(GeomError::EmptyCameraId);
        }
        if !heading.is_finite() || !pitch.is_finite() {
            return Err(GeomError::NonFinite("heading/pitch"));
        }
        if !(-90.0..=90.0).contains(&pitch) {
            return Err(GeomError::PitchOutOfRange(pitch));
        }
        if width == 0 || height == 0 {
            return Err(GeomError::ZeroImageSize { width, height });
        }
        Ok(Self {
            id,
            position,
            heading: heading.rem_euclid(360.0),
            pitch,
            intrinsics,
            width,
            height,
        })
    }
}

/// Identifies the local metric frame a [`PosedCamera`] lives in, so that
/// geometry between cameras posed against different ENU origins is rejected
/// instead of silently computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    /// Directly constructed coordinates; the caller owns frame consistency.
    Local,
    /// ENU frame anchored at the given geodetic origin.
    Enu(Geodetic),
}

/// A camera posed in a local metric frame: center, unit viewing direction,
/// and intrinsics. Input to all pair geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PosedCamera {
    pub center: Vector3<f64>,
    dir: Vector3<f64>,
    pub intrinsics: Intrinsics,
    pub width: u32,
    pub height: u32,
    pub frame: Frame,
}

impl PosedCamera {
    pub fn new(
        center: Vector3<f64>,
        dir: Vector3<f64>,
        intrinsics: Intrinsics,
        width: u32,
        height: u32,
    ) -> Result<Self, GeomError> {
        if !center.iter().all(|c| c.is_finite()) {
            return Err(GeomError::NonFinite("camera center"));
        }
        let norm = dir.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(GeomError::NonFinite("viewing direction"));
        }
        Ok(Self {
            center,
            dir: dir / norm,
            intrinsics,
            width,
            height,
            frame: Frame::Local,
        })
    }

    /// Unit viewing direction; normalized at construction.
    pub fn dir(&self) -> Vector3<f64> {
        self.dir
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }
}

/// Converts a compass heading and pitch to a unit viewing direction in ENU.
///
/// Heading 0 points north, 90 east; pitch rotates toward Up.
pub fn heading_to_direction(heading_deg: f64, pitch_deg: f64) -> Vector3<f64> {
    let h = heading_deg.to_radians();
    let p = pitch_deg.to_radians();
    let (sin_h, cos_h) = h.sin_cos();
    let (sin_p, cos_p) = p.sin_cos();
    Vector3::new(sin_h * cos_p, cos_h * cos_p, sin_p)
}

/// Poses a geotagged camera in the ENU frame anchored at `origin`.
pub fn camera_from_geotag(cam: &GeoCamera, origin: Geodetic) -> PosedCamera {
    let center = ecef_to_enu(wgs84_to_ecef(cam.position), origin);
    let dir = heading_to_direction(cam.heading, cam.pitch);
    PosedCamera {
        center,
        dir,
        intrinsics: cam.intrinsics,
        width: cam.width,
        height: cam.height,
        frame: Frame::Enu(origin),
    }
}

/// Euclidean distance between camera centers, meters.
pub fn camera_distance(a: &PosedCamera, b: &PosedCamera) -> f64 {
    (a.center - b.center).norm()
}

/// Angle between the viewing directions, degrees in [0, 180].
pub fn view_angle(a: &PosedCamera, b: &PosedCamera) -> f64 {
    a.dir.dot(&b.dir).clamp(-1.0, 1.0).acos().to_degrees()
}

/// Angle subtended by the rays through opposite image corners (0,0) and
/// (width,height), degrees. Supports an arbitrary principal point.
pub fn diagonal_fov(i: &Intrinsics, width: u32, height: u32) -> f64 {
    let corner = |u: f64, v: f64| {
        Vector3::new((u - i.cx) / i.fx, (v - i.cy) / i.fy, 1.0).normalize()
    };
    let r0 = corner(0.0, 0.0);
    let r1 = corner(f64::from(width), f64::from(height));
    r0.dot(&r1).clamp(-1.0, 1.0).acos().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::geodesy::{ecef_to_wgs84, enu_to_ecef};
    use approx::assert_abs_diff_eq;

    fn intr() -> Intrinsics {
        Intrinsics::new(500.0, 500.0, 400.0, 300.0).unwrap()
    }

    #[test]
    fn heading_cardinal_directions() {
        let north = heading_to_direction(0.0, 0.0);
        assert_abs_diff_eq!((north - Vector3::new(0.0, 1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        let east = heading_to_direction(90.0, 0.0);
        assert_abs_diff_eq!((east - Vector3::new(1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        let sw = heading_to_direction(225.0, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!((sw - Vector3::new(-h, -h, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn heading_direction_is_unit_for_any_input() {
        for heading in (0..360).step_by(7) {
            for pitch in (-90..=90).step_by(15) {
                let d = heading_to_direction(f64::from(heading), f64::from(pitch));
                assert_abs_diff_eq!(d.norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn geotag_at_origin_poses_at_zero() {
        let origin = Geodetic::new(45.0, 7.0, 250.0).unwrap();
        let cam = GeoCamera::new("a", origin, 0.0, 0.0, intr(), 800, 600).unwrap();
        let posed = camera_from_geotag(&cam, origin);
        assert_abs_diff_eq!(posed.center.norm(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!((posed.dir() - Vector3::new(0.0, 1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_eq!(posed.frame, Frame::Enu(origin));
    }

    #[test]
    fn geotag_ten_meters_east_heading_west() {
        // Build the geotag by the inverse ENU offset, then pose it back.
        let origin = Geodetic::new(45.0, 7.0, 250.0).unwrap();
        let east10 = ecef_to_wgs84(enu_to_ecef(Vector3::new(10.0, 0.0, 0.0), origin));
        let cam = GeoCamera::new("a", east10, 270.0, 0.0, intr(), 800, 600).unwrap();
        let posed = camera_from_geotag(&cam, origin);
        assert_abs_diff_eq!((posed.center - Vector3::new(10.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!((posed.dir() - Vector3::new(-1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_latitude_is_domain_error() {
        assert!(Geodetic::new(100.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn heading_normalizes_modulo_360() {
        let origin = Geodetic::new(0.0, 0.0, 0.0).unwrap();
        let cam = GeoCamera::new("a", origin, 450.0, 0.0, intr(), 800, 600).unwrap();
        assert_abs_diff_eq!(cam.heading, 90.0, epsilon = 1e-12);
        let neg = GeoCamera::new("b", origin, -90.0, 0.0, intr(), 800, 600).unwrap();
        assert_abs_diff_eq!(neg.heading, 270.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_examples() {
        let a = PosedCamera::new(Vector3::zeros(), Vector3::y(), intr(), 800, 600).unwrap();
        let b = PosedCamera::new(Vector3::new(3.0, 4.0, 0.0), Vector3::y(), intr(), 800, 600).unwrap();
        assert_abs_diff_eq!(camera_distance(&a, &a), 0.0);
        assert_abs_diff_eq!(camera_distance(&a, &b), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(camera_distance(&a, &b), camera_distance(&b, &a));
    }

    #[test]
    fn view_angle_examples() {
        let mk = |d: Vector3<f64>| PosedCamera::new(Vector3::zeros(), d, intr(), 800, 600).unwrap();
        assert_abs_diff_eq!(view_angle(&mk(Vector3::y()), &mk(Vector3::y())), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(view_angle(&mk(Vector3::y()), &mk(-Vector3::y())), 180.0, epsilon = 1e-9);
        assert_abs_diff_eq!(view_angle(&mk(Vector3::y()), &mk(Vector3::x())), 90.0, epsilon = 1e-9);
    }

    #[test]
    fn diagonal_fov_examples() {
        assert_abs_diff_eq!(diagonal_fov(&intr(), 800, 600), 90.0, epsilon = 1e-9);

        let tele = Intrinsics::new(1e9, 1e9, 400.0, 300.0).unwrap();
        assert!(diagonal_fov(&tele, 800, 600) < 1e-4);

        // Corner principal point: rays (0,0,1) and (1.6, 1.2, 1)/|.|.
        let corner = Intrinsics::new(500.0, 500.0, 0.0, 0.0).unwrap();
        let expected = (1.0 / (1.0f64 + 1.6 * 1.6 + 1.2 * 1.2).sqrt()).acos().to_degrees();
        assert_abs_diff_eq!(diagonal_fov(&corner, 800, 600), expected, epsilon = 1e-9);
        assert_abs_diff_eq!(expected, 63.434_948_822_922_01, epsilon = 1e-6);
    }

    #[test]
    fn diagonal_fov_decreases_with_focal_length() {
        let mut prev = 180.0;
        for f in [300.0, 500.0, 900.0, 2000.0, 10_000.0] {
            let i = Intrinsics::new(f, f, 400.0, 300.0).unwrap();
            let fov = diagonal_fov(&i, 800, 600);
            assert!(fov < prev, "fov must strictly decrease: {fov} !< {prev}");
            prev = fov;
        }
    }
}
