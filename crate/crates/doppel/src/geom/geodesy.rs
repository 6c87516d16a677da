//! WGS84 geodetic / ECEF / local ENU conversions.
//!
//! All heights are ellipsoidal; no geoid model is applied. The local tangent
//! frame is East-North-Up anchored at a geodetic origin.

use nalgebra::Vector3;

use super::GeomError;

/// WGS84 semi-major axis in meters.
pub const WGS84_A: f64 = 6_378_137.0;
/// WGS84 flattening.
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;
/// WGS84 semi-minor axis in meters.
pub const WGS84_B: f64 = WGS84_A * (1.0 - WGS84_F);
/// First eccentricity squared.
pub const WGS84_E2: f64 = WGS84_F * (2.0 - WGS84_F);

/// A geodetic position on the WGS84 ellipsoid (degrees, degrees, meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodetic {
    pub lat: f64,
    pub lon: f64,
    pub alt: f64,
}

impl Geodetic {
    /// Validates ranges and normalizes longitude into [-180, 180].
    ///
    /// Latitude outside [-90, 90] is a domain error rather than wrapped:
    /// a wrapped latitude silently flips the hemisphere.
    pub fn new(lat: f64, lon: f64, alt: f64) -> Result<Self, GeomError> {
        if !lat.is_finite() || !lon.is_finite() || !alt.is_finite() {
            return Err(GeomError::NonFinite("geodetic coordinate"));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(GeomError::LatitudeOutOfRange(lat));
        }
        Ok(Self {
            lat,
            lon: normalize_longitude(lon),
            alt,
        })
    }
}

/// A point in the Earth-Centered-Earth-Fixed frame, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcefPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EcefPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeomError> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(GeomError::NonFinite("ECEF coordinate"));
        }
        Ok(Self { x, y, z })
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self {
            x: v.x,
            y: v.y,
            z: v.z,
        }
    }
}

/// Wraps a longitude into [-180, 180].
fn normalize_longitude(lon: f64) -> f64 {
    let mut l = (lon + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid maps 180 to -180; keep the conventional upper bound inclusive.
    if l == -180.0 && lon > 0.0 {
        l = 180.0;
    }
    l
}

/// Converts a WGS84 geodetic position to ECEF.
pub fn wgs84_to_ecef(geo: Geodetic) -> EcefPoint {
    let lat = geo.lat.to_radians();
    let lon = geo.lon.to_radians();
    let (sin_lat, cos_lat) = lat.sin_cos();
    let (sin_lon, cos_lon) = lon.sin_cos();
    // Prime-vertical radius of curvature.
    let n = WGS84_A / (1.0 - WGS84_E2 * sin_lat * sin_lat).sqrt();
    EcefPoint {
        x: (n + geo.alt) * cos_lat * cos_lon,
        y: (n + geo.alt) * cos_lat * sin_lon,
        z: (n * (1.0 - WGS84_E2) + geo.alt) * sin_lat,
    }
}

/// Converts an ECEF point back to WGS84 geodetic coordinates.
///
/// Bowring's initial estimate followed by fixed-point polish; converges to
/// well below 1e-9 degrees / 1e-6 m for any terrestrial point.
pub fn ecef_to_wgs84(p: EcefPoint) -> Geodetic {
    let lon = p.y.atan2(p.x);
    let rho = (p.x * p.x + p.y * p.y).sqrt();

    if rho < 1e-9 {
        // On the polar axis: latitude is +/-90 and altitude is measured from the pole.
        let lat = if p.z >= 0.0 { 90.0 } else { -90.0 };
        return Geodetic {
            lat,
            lon: lon.to_degrees(),
            alt: p.z.abs() - WGS84_B,
        };
    }

    // Bowring's parametric-latitude bootstrap.
    let ep2 = (WGS84_A * WGS84_A - WGS84_B * WGS84_B) / (WGS84_B * WGS84_B);
    let theta = (p.z * WGS84_A).atan2(rho * WGS84_B);
    let (sin_t, cos_t) = theta.sin_cos();
    let mut lat = (p.z + ep2 * WGS84_B * sin_t.powi(3)).atan2(rho - WGS84_E2 * WGS84_A * cos_t.powi(3));

    // A few fixed-point iterations pin the remaining error far below tolerance.
    let mut n = WGS84_A;
    for _ in 0..4 {
        let sin_lat = lat.sin();
        n = WGS84_A / (1.0 - WGS84_E2 * sin_lat * sin_lat).sqrt();
        lat = (p.z + WGS84_E2 * n * sin_lat).atan2(rho);
    }

    let sin_lat = lat.sin();
    let cos_lat = lat.cos();
    let alt = if cos_lat.abs() > 1e-6 {
        rho / cos_lat - n
    } else {
        p.z / sin_lat - n * (1.0 - WGS84_E2)
    };

    Geodetic {
        lat: lat.to_degrees(),
        lon: lon.to_degrees(),
        alt,
    }
}

/// Rotation rows of the ECEF->ENU basis at the given origin.
fn enu_basis(origin: Geodetic) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let lat = origin.lat.to_radians();
    let lon = origin.lon.to_radians();
    let (sin_lat, cos_lat) = lat.sin_cos();
    let (sin_lon, cos_lon) = lon.sin_cos();
    let east = Vector3::new(-sin_lon, cos_lon, 0.0);
    let north = Vector3::new(-sin_lat * cos_lon, -sin_lat * sin_lon, cos_lat);
    let up = Vector3::new(cos_lat * cos_lon, cos_lat * sin_lon, sin_lat);
    (east, north, up)
}

/// East-North-Up coordinates of `p` relative to `origin`.
pub fn ecef_to_enu(p: EcefPoint, origin: Geodetic) -> Vector3<f64> {
    let o = wgs84_to_ecef(origin);
    let d = p.as_vector() - o.as_vector();
    let (east, north, up) = enu_basis(origin);
    Vector3::new(east.dot(&d), north.dot(&d), up.dot(&d))
}

/// Inverse of [`ecef_to_enu`] for the same origin.
pub fn enu_to_ecef(enu: Vector3<f64>, origin: Geodetic) -> EcefPoint {
    let o = wgs84_to_ecef(origin);
    let (east, north, up) = enu_basis(origin);
    EcefPoint::from_vector(o.as_vector() + east * enu.x + north * enu.y + up * enu.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equator_prime_meridian_on_semi_major_axis() {
        let p = wgs84_to_ecef(Geodetic::new(0.0, 0.0, 0.0).unwrap());
        assert_abs_diff_eq!(p.x, 6_378_137.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn north_pole_on_semi_minor_axis() {
        let p = wgs84_to_ecef(Geodetic::new(90.0, 0.0, 0.0).unwrap());
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.z, 6_356_752.314_245, epsilon = 1e-6);
    }

    #[test]
    fn ninety_degrees_longitude_rotates_x_into_y() {
        let p = wgs84_to_ecef(Geodetic::new(0.0, 90.0, 0.0).unwrap());
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.y, 6_378_137.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn latitude_out_of_range_rejected() {
        assert!(matches!(
            Geodetic::new(100.0, 0.0, 0.0),
            Err(GeomError::LatitudeOutOfRange(_))
        ));
    }

    #[test]
    fn longitude_wraps_into_range() {
        let g = Geodetic::new(10.0, 270.0, 0.0).unwrap();
        assert_abs_diff_eq!(g.lon, -90.0, epsilon = 1e-12);
    }

    #[test]
    fn enu_origin_maps_to_zero() {
        let origin = Geodetic::new(47.2, 8.5, 410.0).unwrap();
        let enu = ecef_to_enu(wgs84_to_ecef(origin), origin);
        assert_abs_diff_eq!(enu.norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn pure_altitude_offset_is_pure_up() {
        let origin = Geodetic::new(47.2, 8.5, 410.0).unwrap();
        let above = Geodetic::new(47.2, 8.5, 415.0).unwrap();
        let enu = ecef_to_enu(wgs84_to_ecef(above), origin);
        assert_abs_diff_eq!(enu.x, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(enu.y, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(enu.z, 5.0, epsilon = 1e-6);
    }

    #[test]
    fn hundred_meters_north_at_equator() {
        // Independent route: convert a latitude offset of 100 m over the
        // meridian radius of curvature and compare against the ENU answer.
        let origin = Geodetic::new(0.0, 0.0, 0.0).unwrap();
        let meridian_radius = WGS84_A * (1.0 - WGS84_E2); // at the equator
        let dlat = (100.0 / meridian_radius).to_degrees();
        let north = Geodetic::new(dlat, 0.0, 0.0).unwrap();
        let enu = ecef_to_enu(wgs84_to_ecef(north), origin);
        assert_abs_diff_eq!(enu.x, 0.0, epsilon = 1e-3);
        assert_abs_diff_eq!(enu.y, 100.0, epsilon = 1e-3);
        assert_abs_diff_eq!(enu.z, 0.0, epsilon = 1e-3);
    }

    #[test]
    fn geodetic_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let lat = rng.gen_range(-89.99..=89.99);
            let lon = rng.gen_range(-180.0..180.0);
            let alt = rng.gen_range(-500.0..9000.0);
            let back = ecef_to_wgs84(wgs84_to_ecef(Geodetic { lat, lon, alt }));
            assert_abs_diff_eq!(back.lat, lat, epsilon = 1e-9);
            assert_abs_diff_eq!(back.lon, lon, epsilon = 1e-9);
            assert_abs_diff_eq!(back.alt, alt, epsilon = 1e-6);
        }
    }

    #[test]
    fn geodetic_round_trip_at_poles() {
        for lat in [90.0, -90.0] {
            let back = ecef_to_wgs84(wgs84_to_ecef(Geodetic { lat, lon: 0.0, alt: 12.0 }));
            assert_abs_diff_eq!(back.lat, lat, epsilon = 1e-9);
            assert_abs_diff_eq!(back.alt, 12.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn enu_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let origin = Geodetic {
                lat: rng.gen_range(-89.0..=89.0),
                lon: rng.gen_range(-180.0..180.0),
                alt: rng.gen_range(-100.0..3000.0),
            };
            let enu = Vector3::new(
                rng.gen_range(-5000.0..5000.0),
                rng.gen_range(-5000.0..5000.0),
                rng.gen_range(-1000.0..1000.0),
            );
            let back = ecef_to_enu(enu_to_ecef(enu, origin), origin);
            assert_abs_diff_eq!((back - enu).norm(), 0.0, epsilon = 1e-6);
        }
    }
}
