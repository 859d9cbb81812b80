//! Spherical viewport geometry for 360° scenes.
//!
//! Coordinate frame: +X forward (azimuth 0, elevation 0), Z up, Y left.
//! Azimuth grows clockwise when seen from above, so a positive azimuth is
//! to the viewer's right and points from +X toward -Y. Elevation grows
//! upwards. All public angles are in degrees.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Distance of the subtitle plane from the camera on a unit video sphere.
pub const SUBTITLE_PLANE_RADIUS: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("azimuth {0} outside [-180, 180]")]
    AzimuthRange(f64),
    #[error("elevation {0} outside [-90, 90]")]
    ElevationRange(f64),
    #[error("latitude {0} outside [-90, 90]")]
    LatitudeRange(f64),
    #[error("{name} {value} is not finite")]
    NotFinite { name: &'static str, value: f64 },
    #[error("texture coordinate {name}={value} outside [0, 1]")]
    TextureRange { name: &'static str, value: f64 },
    #[error("viewport {name} {value} out of range")]
    ViewportRange { name: &'static str, value: f64 },
    #[error("horizontal plane axis undefined at pitch {0}")]
    GimbalDegenerate(f64),
}

/// Wraps an angle into the half-open interval (-180, 180].
pub fn wrap_degrees(angle: f64) -> f64 {
    let r = angle.rem_euclid(360.0);
    // rem_euclid may round up to exactly 360 for tiny negative inputs
    let r = if r >= 360.0 { 0.0 } else { r };
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

fn finite(name: &'static str, value: f64) -> Result<f64, GeometryError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(GeometryError::NotFinite { name, value })
    }
}

/// A direction in the scene. Construction enforces the angle ranges, so no
/// `Direction` value can hold an out-of-range angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction {
    azimuth: f64,
    elevation: f64,
}

impl Direction {
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self, GeometryError> {
        finite("azimuth", azimuth)?;
        finite("elevation", elevation)?;
        if !(-180.0..=180.0).contains(&azimuth) {
            return Err(GeometryError::AzimuthRange(azimuth));
        }
        if !(-90.0..=90.0).contains(&elevation) {
            return Err(GeometryError::ElevationRange(elevation));
        }
        // normalise negative zero so serialization never prints "-0"
        Ok(Direction {
            azimuth: azimuth + 0.0,
            elevation: elevation + 0.0,
        })
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            azimuth: f64,
            elevation: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        Direction::new(raw.azimuth, raw.elevation).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Unit vector pointing along `d`.
pub fn direction_to_unit_vector(d: Direction) -> Vec3 {
    let a = d.azimuth.to_radians();
    let e = d.elevation.to_radians();
    Vec3::new(e.cos() * a.cos(), -e.cos() * a.sin(), e.sin())
}

/// Maps equirectangular texture coordinates (u rightward, v downward) to a
/// scene direction. The texture center lands on +X.
pub fn equirect_uv_to_direction(u: f64, v: f64) -> Result<Direction, GeometryError> {
    for (name, value) in [("u", u), ("v", v)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(GeometryError::TextureRange { name, value });
        }
    }
    Direction::new(wrap_degrees((u - 0.5) * 360.0), (0.5 - v) * 180.0)
}

/// Converts an `imac:equirectangularLongitude/Latitude` pair to a direction.
///
/// Longitude grows when turning left while azimuth grows clockwise, so the
/// two are sign-opposed: azimuth = wrap(-longitude).
pub fn longitude_latitude_to_direction(
    longitude: f64,
    latitude: f64,
) -> Result<Direction, GeometryError> {
    finite("longitude", longitude)?;
    finite("latitude", latitude)?;
    if !(-90.0..=90.0).contains(&latitude) {
        return Err(GeometryError::LatitudeRange(latitude));
    }
    Direction::new(wrap_degrees(-longitude), latitude)
}

/// Inverse of [`longitude_latitude_to_direction`]; longitude in [0, 360).
pub fn direction_to_longitude_latitude(d: Direction) -> (f64, f64) {
    let lon = (-d.azimuth).rem_euclid(360.0);
    let lon = if lon >= 360.0 { 0.0 } else { lon };
    (lon + 0.0, d.elevation)
}

/// Shortest signed rotation from the viewport yaw to the target azimuth.
/// Positive means the target lies to the viewer's right.
pub fn angular_offset(viewport_yaw: f64, target_azimuth: f64) -> f64 {
    wrap_degrees(target_azimuth - viewport_yaw)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewportState {
    yaw: f64,
    pitch: f64,
    hfov: f64,
    vfov: f64,
}

impl ViewportState {
    pub fn new(yaw: f64, pitch: f64, hfov: f64, vfov: f64) -> Result<Self, GeometryError> {
        let checks: [(&'static str, f64, bool); 4] = [
            ("yaw", yaw, (-180.0..=180.0).contains(&yaw)),
            ("pitch", pitch, (-90.0..=90.0).contains(&pitch)),
            ("hfov", hfov, hfov > 0.0 && hfov < 360.0),
            ("vfov", vfov, vfov > 0.0 && vfov < 180.0),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(GeometryError::ViewportRange { name, value });
            }
        }
        Ok(ViewportState {
            yaw,
            pitch,
            hfov,
            vfov,
        })
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn hfov(&self) -> f64 {
        self.hfov
    }

    pub fn vfov(&self) -> f64 {
        self.vfov
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum IndicatorStyle {
    Arrow,
    Radar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum IndicatorKind {
    NoneVisible,
    ArrowLeft,
    ArrowRight,
    Radar,
}

impl IndicatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IndicatorKind::NoneVisible => "noneVisible",
            IndicatorKind::ArrowLeft => "arrowLeft",
            IndicatorKind::ArrowRight => "arrowRight",
            IndicatorKind::Radar => "radar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndicatorCue {
    pub kind: IndicatorKind,
    /// Speaker azimuth minus viewport yaw, wrapped to (-180, 180].
    pub relative_azimuth: f64,
}

/// Decides which speaker indicator to show. Visibility is horizontal only.
pub fn indicator_for(viewport: &ViewportState, d: Direction, style: IndicatorStyle) -> IndicatorCue {
    let relative_azimuth = angular_offset(viewport.yaw, d.azimuth);
    let kind = match style {
        IndicatorStyle::Radar => IndicatorKind::Radar,
        IndicatorStyle::Arrow if relative_azimuth.abs() <= viewport.hfov / 2.0 => {
            IndicatorKind::NoneVisible
        }
        IndicatorStyle::Arrow if relative_azimuth > 0.0 => IndicatorKind::ArrowRight,
        IndicatorStyle::Arrow => IndicatorKind::ArrowLeft,
    };
    IndicatorCue {
        kind,
        relative_azimuth,
    }
}

/// Orthonormal frame of the viewport-fixed subtitle plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrame {
    pub center: Vec3,
    /// Horizontal, pointing to the viewer's right.
    pub x_axis: Vec3,
    /// Completes the frame, pointing upwards on screen.
    pub y_axis: Vec3,
}

/// Anchors the root container plane orthogonal to the view vector, just
/// inside the unit video sphere.
pub fn subtitle_plane_anchor(viewport: &ViewportState) -> Result<PlaneFrame, GeometryError> {
    if viewport.pitch.abs() == 90.0 {
        return Err(GeometryError::GimbalDegenerate(viewport.pitch));
    }
    let view = direction_to_unit_vector(Direction::new(viewport.yaw, viewport.pitch)?);
    let a = viewport.yaw.to_radians();
    let x_axis = Vec3::new(-a.sin(), -a.cos(), 0.0);
    let up = Vec3::new(0.0, 0.0, 1.0);
    let y_axis = (up - view * up.dot(view)).normalized();
    Ok(PlaneFrame {
        center: view * SUBTITLE_PLANE_RADIUS,
        x_axis,
        y_axis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(a: f64, e: f64) -> Direction {
        Direction::new(a, e).unwrap()
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    // Brute-force shortest wrap: try raw and raw ± 360, keep the smallest
    // magnitude, ties resolve to the positive candidate.
    fn offset_oracle(yaw: f64, target: f64) -> f64 {
        let raw = target - yaw;
        let mut best = raw;
        for c in [raw - 360.0, raw + 360.0, raw - 720.0, raw + 720.0] {
            if c.abs() < best.abs() || (c.abs() == best.abs() && c > best) {
                best = c;
            }
        }
        best
    }

    #[test]
    fn unit_vectors_follow_axis_convention() {
        assert!(close(direction_to_unit_vector(dir(0.0, 0.0)), Vec3::new(1.0, 0.0, 0.0), 1e-12));
        assert!(close(direction_to_unit_vector(dir(0.0, 90.0)), Vec3::new(0.0, 0.0, 1.0), 1e-12));
        assert!(close(direction_to_unit_vector(dir(90.0, 0.0)), Vec3::new(0.0, -1.0, 0.0), 1e-12));
    }

    #[test]
    fn direction_rejects_out_of_range() {
        assert_eq!(Direction::new(200.0, 0.0), Err(GeometryError::AzimuthRange(200.0)));
        assert_eq!(Direction::new(0.0, -91.0), Err(GeometryError::ElevationRange(-91.0)));
        assert!(Direction::new(f64::NAN, 0.0).is_err());
        assert!(Direction::new(-180.0, -90.0).is_ok());
    }

    #[test]
    fn equirect_examples() {
        assert_eq!(equirect_uv_to_direction(0.5, 0.5).unwrap(), dir(0.0, 0.0));
        assert_eq!(equirect_uv_to_direction(0.5, 0.0).unwrap(), dir(0.0, 90.0));
        let d = equirect_uv_to_direction(0.75, 0.5).unwrap();
        assert_eq!(d, dir(90.0, 0.0));
        // inverse mapping oracle
        let u = d.azimuth() / 360.0 + 0.5;
        let v = 0.5 - d.elevation() / 180.0;
        assert_eq!((u, v), (0.75, 0.5));
        assert_eq!(equirect_uv_to_direction(0.0, 0.5).unwrap().azimuth(), 180.0);
        assert!(equirect_uv_to_direction(1.5, 0.5).is_err());
    }

    #[test]
    fn longitude_examples() {
        let d = longitude_latitude_to_direction(300.0, 10.0).unwrap();
        // oracle: among -300, -300 + 360, -300 - 360 the one in (-180, 180]
        let expected = [-300.0, 60.0, -660.0]
            .into_iter()
            .find(|c: &f64| *c > -180.0 && *c <= 180.0)
            .unwrap();
        assert!((d.azimuth() - expected).abs() <= 1e-12);
        assert_eq!(d.elevation(), 10.0);
        assert_eq!(longitude_latitude_to_direction(0.0, 0.0).unwrap(), dir(0.0, 0.0));
        assert_eq!(longitude_latitude_to_direction(180.0, 0.0).unwrap(), dir(180.0, 0.0));
        assert_eq!(
            longitude_latitude_to_direction(10.0, 95.0),
            Err(GeometryError::LatitudeRange(95.0))
        );
        assert_eq!(direction_to_longitude_latitude(d), (300.0, 10.0));
    }

    #[test]
    fn offset_examples() {
        assert_eq!(angular_offset(0.0, 0.0), 0.0);
        assert_eq!(angular_offset(170.0, -170.0), offset_oracle(170.0, -170.0));
        assert_eq!(angular_offset(170.0, -170.0), 20.0);
        assert_eq!(angular_offset(0.0, -30.0), -30.0);
        assert_eq!(angular_offset(90.0, -30.0), -120.0);
        assert_eq!(angular_offset(0.0, 180.0), 180.0);
        assert_eq!(angular_offset(180.0, 0.0), 180.0);
        assert_eq!(angular_offset(-90.0, 90.0), 180.0);
    }

    #[test]
    fn wrap_handles_boundaries() {
        assert_eq!(wrap_degrees(-180.0), 180.0);
        assert_eq!(wrap_degrees(540.0), 180.0);
        assert_eq!(wrap_degrees(-1e-20), 0.0);
        assert_eq!(wrap_degrees(360.0), 0.0);
    }

    #[test]
    fn indicator_examples() {
        let vp = ViewportState::new(0.0, 0.0, 90.0, 60.0).unwrap();
        let c = indicator_for(&vp, dir(30.0, 0.0), IndicatorStyle::Arrow);
        assert_eq!(c.kind, IndicatorKind::NoneVisible);
        let c = indicator_for(&vp, dir(60.0, 0.0), IndicatorStyle::Arrow);
        assert_eq!(c, IndicatorCue { kind: IndicatorKind::ArrowRight, relative_azimuth: 60.0 });
        let c = indicator_for(&vp, dir(60.0, 0.0), IndicatorStyle::Radar);
        assert_eq!(c, IndicatorCue { kind: IndicatorKind::Radar, relative_azimuth: 60.0 });
        let c = indicator_for(&vp, dir(-45.0, 0.0), IndicatorStyle::Arrow);
        assert_eq!(c.kind, IndicatorKind::NoneVisible);
        let c = indicator_for(&vp, dir(-46.0, 0.0), IndicatorStyle::Arrow);
        assert_eq!(c.kind, IndicatorKind::ArrowLeft);
    }

    #[test]
    fn viewport_ranges() {
        assert!(ViewportState::new(0.0, 0.0, 360.0, 90.0).is_err());
        assert!(ViewportState::new(0.0, 0.0, 90.0, 0.0).is_err());
        assert!(ViewportState::new(181.0, 0.0, 90.0, 60.0).is_err());
    }

    #[test]
    fn plane_anchor_examples() {
        let f = subtitle_plane_anchor(&ViewportState::new(0.0, 0.0, 90.0, 60.0).unwrap()).unwrap();
        assert!(close(f.center, Vec3::new(0.99, 0.0, 0.0), 1e-12));
        assert!(close(f.x_axis, Vec3::new(0.0, -1.0, 0.0), 1e-12));
        assert!(close(f.y_axis, Vec3::new(0.0, 0.0, 1.0), 1e-12));

        // oracle: rotate the origin frame by the azimuth rotation about Z
        // (clockwise-from-above, i.e. -90° in the right-handed sense)
        let rot = |v: Vec3| {
            let t = (-90.0f64).to_radians();
            Vec3::new(v.x * t.cos() - v.y * t.sin(), v.x * t.sin() + v.y * t.cos(), v.z)
        };
        let g = subtitle_plane_anchor(&ViewportState::new(90.0, 0.0, 90.0, 60.0).unwrap()).unwrap();
        assert!(close(g.center, rot(f.center), 1e-12));
        assert!(close(g.x_axis, rot(f.x_axis), 1e-12));
        assert!(close(g.center, Vec3::new(0.0, -0.99, 0.0), 1e-12));
        assert!(close(g.x_axis, Vec3::new(-1.0, 0.0, 0.0), 1e-12));

        let err = subtitle_plane_anchor(&ViewportState::new(0.0, 90.0, 90.0, 60.0).unwrap());
        assert_eq!(err, Err(GeometryError::GimbalDegenerate(90.0)));
    }

    #[test]
    fn plane_frame_is_orthonormal_off_axis() {
        let f = subtitle_plane_anchor(&ViewportState::new(-37.0, 61.0, 90.0, 60.0).unwrap()).unwrap();
        let view = f.center * (1.0 / SUBTITLE_PLANE_RADIUS);
        assert!((f.x_axis.norm() - 1.0).abs() < 1e-9);
        assert!((f.y_axis.norm() - 1.0).abs() < 1e-9);
        assert!(f.x_axis.dot(f.y_axis).abs() < 1e-9);
        assert!(f.x_axis.dot(view).abs() < 1e-9);
        assert!(f.y_axis.dot(view).abs() < 1e-9);
        assert_eq!(f.x_axis.z, 0.0);
        assert!(f.y_axis.z > 0.0);
    }
}
