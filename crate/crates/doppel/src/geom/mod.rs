//! Geodetic conversion, camera poses from geotag metadata, and the ray and
//! frustum predicates that the pair-mining rules are built from.
//!
//! Everything here is a pure function of immutable inputs and safe to call
//! from any number of threads.

mod camera;
mod frustum;
mod geodesy;
mod ray;

pub use camera::{
    camera_distance, camera_from_geotag, diagonal_fov, heading_to_direction, view_angle, Frame,
    GeoCamera, Intrinsics, PosedCamera,
};
pub use frustum::{camera_basis, frustum_overlap, frustums_intersect, Frustum};
pub use geodesy::{
    ecef_to_enu, ecef_to_wgs84, enu_to_ecef, wgs84_to_ecef, EcefPoint, Geodetic, WGS84_A, WGS84_B,
    WGS84_E2, WGS84_F,
};
pub use ray::{classify_ray_relation, RayCase, RayRelation};

/// Errors from geometric and geodetic construction.
#[derive(Debug, thiserror::Error)]
pub enum GeomError {
    #[error("latitude {0} outside [-90, 90]")]
    LatitudeOutOfRange(f64),
    #[error("pitch {0} outside [-90, 90]")]
    PitchOutOfRange(f64),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("focal lengths must be positive (fx={fx}, fy={fy})")]
    NonPositiveFocal { fx: f64, fy: f64 },
    #[error("camera id must be non-empty")]
    EmptyCameraId,
    #[error("image size must be positive ({width}x{height})")]
    ZeroImageSize { width: u32, height: u32 },
    #[error("frustum clip range requires 0 < near < far (near={near}, far={far})")]
    InvalidFrustumRange { near: f64, far: f64 },
}
