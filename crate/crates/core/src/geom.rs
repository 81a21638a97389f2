//! Earth and GEO geometry: coverage sizing, field of view, subarray pitch
//! bound and the conversion of a ground target into antenna steering angles.
//!
//! The Earth is a sphere. The antenna frame is nadir-pointing with `x` toward
//! local east and `y` toward local north at the sub-satellite point; `θ` is
//! measured from nadir and `φ` from `+x` toward `+y`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Earth radius used throughout, in km.
pub const EARTH_RADIUS_KM: f64 = 6317.0;
/// Geostationary altitude above the surface, in km.
pub const GEO_ALTITUDE_KM: f64 = 35786.0;

const BISECTION_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitGeometry {
    pub earth_radius_km: f64,
    #[serde(default = "default_altitude")]
    pub altitude_km: f64,
    pub satellite_longitude_deg: f64,
}

fn default_altitude() -> f64 {
    GEO_ALTITUDE_KM
}

impl Default for OrbitGeometry {
    fn default() -> Self {
        Self {
            earth_radius_km: EARTH_RADIUS_KM,
            altitude_km: GEO_ALTITUDE_KM,
            satellite_longitude_deg: 13.0,
        }
    }
}

impl OrbitGeometry {
    pub fn new(earth_radius_km: f64, altitude_km: f64, satellite_longitude_deg: f64) -> Result<Self> {
        let geo = Self {
            earth_radius_km,
            altitude_km,
            satellite_longitude_deg,
        };
        geo.validate()?;
        Ok(geo)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.earth_radius_km > 0.0 && self.earth_radius_km.is_finite()) {
            return Err(Error::Validation(format!(
                "earth_radius_km must be > 0, got {}",
                self.earth_radius_km
            )));
        }
        if !(self.altitude_km > 0.0 && self.altitude_km.is_finite()) {
            return Err(Error::Validation(format!(
                "altitude_km must be > 0, got {}",
                self.altitude_km
            )));
        }
        if !(-180.0..=180.0).contains(&self.satellite_longitude_deg) {
            return Err(Error::Validation(format!(
                "satellite_longitude_deg must be in [-180, 180], got {}",
                self.satellite_longitude_deg
            )));
        }
        Ok(())
    }

    /// `R_e / (R_e + h)`.
    pub fn radius_ratio(&self) -> f64 {
        self.earth_radius_km / (self.earth_radius_km + self.altitude_km)
    }

    /// Satellite position in Earth-centred Earth-fixed coordinates, km.
    pub fn satellite_ecef(&self) -> [f64; 3] {
        let r = self.earth_radius_km + self.altitude_km;
        let lon = self.satellite_longitude_deg.to_radians();
        [r * lon.cos(), r * lon.sin(), 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTarget {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
}

impl GroundTarget {
    pub fn new(latitude_deg: f64, longitude_deg: f64) -> Result<Self> {
        let t = Self {
            latitude_deg,
            longitude_deg,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.latitude_deg) {
            return Err(Error::Validation(format!(
                "latitude must be in [-90, 90], got {}",
                self.latitude_deg
            )));
        }
        if !(-180.0..=180.0).contains(&self.longitude_deg) {
            return Err(Error::Validation(format!(
                "longitude must be in [-180, 180], got {}",
                self.longitude_deg
            )));
        }
        Ok(())
    }

    /// Position on the spherical Earth in ECEF coordinates, km.
    pub fn ecef(&self, earth_radius_km: f64) -> [f64; 3] {
        let lat = self.latitude_deg.to_radians();
        let lon = self.longitude_deg.to_radians();
        [
            earth_radius_km * lat.cos() * lon.cos(),
            earth_radius_km * lat.cos() * lon.sin(),
            earth_radius_km * lat.sin(),
        ]
    }
}

/// Beam direction in the antenna frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SteeringAngles {
    /// Off-nadir angle.
    pub theta_deg: f64,
    /// Azimuth in the antenna plane, `[0, 360)`.
    pub phi_deg: f64,
}

impl SteeringAngles {
    pub const BROADSIDE: SteeringAngles = SteeringAngles {
        theta_deg: 0.0,
        phi_deg: 0.0,
    };

    pub fn new(theta_deg: f64, phi_deg: f64) -> Self {
        Self {
            theta_deg,
            phi_deg: phi_deg.rem_euclid(360.0),
        }
    }

    /// Direction cosines `(u, v, w)` along `x`, `y` and boresight.
    pub fn direction_cosines(&self) -> (f64, f64, f64) {
        let (st, ct) = self.theta_deg.to_radians().sin_cos();
        let (sp, cp) = self.phi_deg.to_radians().sin_cos();
        (st * cp, st * sp, ct)
    }

    pub fn from_direction_cosines(u: f64, v: f64, w: f64) -> Self {
        let rho = u.hypot(v);
        let theta = rho.atan2(w).to_degrees();
        let phi = if rho == 0.0 {
            0.0
        } else {
            v.atan2(u).to_degrees()
        };
        Self::new(theta, phi)
    }

    /// Azimuth/elevation pair used for the principal cuts.
    pub fn to_az_el(&self) -> AzEl {
        let (u, v, w) = self.direction_cosines();
        AzEl {
            az_deg: u.atan2(w).to_degrees(),
            el_deg: v.clamp(-1.0, 1.0).asin().to_degrees(),
        }
    }
}

/// Elevation-over-azimuth angles in the antenna frame:
/// `u = sin(az)·cos(el)`, `v = sin(el)`, `w = cos(az)·cos(el)`.
///
/// Azimuth rotates about the north (`y`) axis, elevation tilts toward north.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AzEl {
    pub az_deg: f64,
    pub el_deg: f64,
}

impl AzEl {
    pub fn direction_cosines(&self) -> (f64, f64, f64) {
        let (sa, ca) = self.az_deg.to_radians().sin_cos();
        let (se, ce) = self.el_deg.to_radians().sin_cos();
        (sa * ce, se, ca * ce)
    }

    pub fn to_steering(&self) -> SteeringAngles {
        let (u, v, w) = self.direction_cosines();
        SteeringAngles::from_direction_cosines(u, v, w)
    }
}

/// Half-angle of the spherical cap of area `coverage_area_km2`, seen from the
/// Earth's centre, in degrees.
pub fn coverage_half_angle(coverage_area_km2: f64, geo: &OrbitGeometry) -> Result<f64> {
    let hemisphere = 2.0 * PI * geo.earth_radius_km.powi(2);
    if !(coverage_area_km2 > 0.0 && coverage_area_km2 <= hemisphere) {
        return Err(Error::Domain(format!(
            "coverage area {coverage_area_km2} km² outside (0, {hemisphere:.1}]"
        )));
    }
    Ok((1.0 - coverage_area_km2 / hemisphere).acos().to_degrees())
}

/// Area of the spherical cap with central half-angle `alpha_deg`.
pub fn cap_area(alpha_deg: f64, geo: &OrbitGeometry) -> f64 {
    2.0 * PI * geo.earth_radius_km.powi(2) * (1.0 - alpha_deg.to_radians().cos())
}

/// Full −3 dB beamwidth (degrees) needed so the beam edge lands on the rim of
/// a cap with central half-angle `alpha_c_deg` at nadir.
///
/// Solves `sin θ = R_e/(R_e+h)·sin(θ+α)` on `[0°, 90°]` by bisection and
/// returns `2θ`.
pub fn required_beamwidth(alpha_c_deg: f64, geo: &OrbitGeometry) -> Result<f64> {
    if !(alpha_c_deg > 0.0) {
        return Err(Error::Domain(format!(
            "coverage half-angle must be > 0, got {alpha_c_deg}"
        )));
    }
    let half = solve_beam_half_angle(alpha_c_deg.to_radians(), geo.radius_ratio())?;
    if half + alpha_c_deg.to_radians() > PI / 2.0 {
        return Err(Error::Geometry(format!(
            "cap half-angle {alpha_c_deg}° extends beyond the horizon"
        )));
    }
    Ok(2.0 * half.to_degrees())
}

/// Residual of the law-of-sines relation, radians in.
pub fn beamwidth_residual(theta_rad: f64, alpha_rad: f64, ratio: f64) -> f64 {
    theta_rad.sin() - ratio * (theta_rad + alpha_rad).sin()
}

fn solve_beam_half_angle(alpha: f64, ratio: f64) -> Result<f64> {
    let f = |t: f64| beamwidth_residual(t, alpha, ratio);
    let (mut lo, mut hi) = (0.0_f64, PI / 2.0);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Geometry(format!(
            "no root of the beam-edge relation in [0°, 90°] for α = {}°",
            alpha.to_degrees()
        )));
    }
    let neg_at_lo = flo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < BISECTION_RESIDUAL * 1e-2 || hi - lo < f64::EPSILON {
            return Ok(mid);
        }
        if (fm < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Elements per dimension for a square aperture with the given −3 dB
/// beamwidth, rounded up to a whole number of subarrays.
pub fn elements_per_dimension(
    beamwidth_deg: f64,
    efficiency: f64,
    element_pitch_wavelengths: f64,
    subarray_dim: usize,
) -> Result<usize> {
    if !(beamwidth_deg > 0.0 && efficiency > 0.0 && element_pitch_wavelengths > 0.0)
        || subarray_dim == 0
    {
        return Err(Error::Domain(format!(
            "element sizing needs positive inputs (beamwidth {beamwidth_deg}, efficiency {efficiency}, pitch {element_pitch_wavelengths}, subarray {subarray_dim})"
        )));
    }
    let raw = 0.886 / (efficiency * beamwidth_deg.to_radians() * element_pitch_wavelengths);
    let groups = (raw / subarray_dim as f64 - 1e-9).ceil().max(1.0) as usize;
    Ok(groups * subarray_dim)
}

/// Half-angle field of view of the Earth disc, degrees.
pub fn field_of_view(geo: &OrbitGeometry) -> f64 {
    geo.radius_ratio().atan().to_degrees()
}

/// Largest subarray pitch (in wavelengths) that keeps grating lobes outside
/// `±fov_deg` at any scan inside it.
pub fn max_subarray_pitch(fov_deg: f64) -> Result<f64> {
    if !(fov_deg > 0.0 && fov_deg <= 90.0) {
        return Err(Error::Domain(format!(
            "field of view must be in (0, 90], got {fov_deg}"
        )));
    }
    Ok(1.0 / (2.0 * fov_deg.to_radians().sin()))
}

/// Line of sight from the satellite to `target`, expressed in the antenna
/// frame as `(east, north, nadir)` components in km.
///
/// Works in an Earth-fixed frame rotated so the satellite sits on the `x`
/// axis, which keeps the sub-satellite point exactly on boresight.
pub fn line_of_sight(target: &GroundTarget, geo: &OrbitGeometry) -> [f64; 3] {
    let r = geo.earth_radius_km;
    let lat = target.latitude_deg.to_radians();
    let dlon = (target.longitude_deg - geo.satellite_longitude_deg).to_radians();
    let t = [r * lat.cos() * dlon.cos(), r * lat.cos() * dlon.sin(), r * lat.sin()];
    let s = r + geo.altitude_km;
    [t[1], t[2], s - t[0]]
}

/// Whether the target faces the satellite (positive elevation).
pub fn faces_satellite(target: &GroundTarget, geo: &OrbitGeometry) -> bool {
    let lat = target.latitude_deg.to_radians();
    let dlon = (target.longitude_deg - geo.satellite_longitude_deg).to_radians();
    let cos_central = lat.cos() * dlon.cos();
    // (S − T)·T > 0  ⇔  (R+h)·cos γ > R
    (geo.earth_radius_km + geo.altitude_km) * cos_central > geo.earth_radius_km
}

/// Converts a ground target into steering angles of the nadir-pointing array.
pub fn target_to_steering(target: &GroundTarget, geo: &OrbitGeometry) -> Result<SteeringAngles> {
    target.validate()?;
    geo.validate()?;
    let [e, n, z] = line_of_sight(target, geo);
    let steering = SteeringAngles::from_direction_cosines(e, n, z);
    let fov = field_of_view(geo);
    if !faces_satellite(target, geo) || steering.theta_deg > fov {
        return Err(Error::NotVisible {
            lat_deg: target.latitude_deg,
            lon_deg: target.longitude_deg,
            off_nadir_deg: steering.theta_deg,
            fov_deg: fov,
        });
    }
    if e == 0.0 && n == 0.0 {
        return Ok(SteeringAngles::BROADSIDE);
    }
    Ok(steering)
}

/// Result of the coverage → array sizing chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArraySizing {
    pub coverage_half_angle_deg: f64,
    /// Exact −3 dB beamwidth from the law-of-sines solution.
    pub beamwidth_deg: f64,
    /// Beamwidth used for element sizing: `beamwidth_deg` quantized down to
    /// 0.01°, which errs toward more elements.
    pub design_beamwidth_deg: f64,
    pub elements_per_dim: usize,
    pub subarrays_per_dim: usize,
    pub fov_deg: f64,
    pub max_subarray_pitch_wavelengths: f64,
}

/// Runs the full dimensioning chain from a nadir coverage area.
pub fn size_array(
    coverage_area_km2: f64,
    geo: &OrbitGeometry,
    efficiency: f64,
    element_pitch_wavelengths: f64,
    subarray_dim: usize,
) -> Result<ArraySizing> {
    let alpha = coverage_half_angle(coverage_area_km2, geo)?;
    let beamwidth = required_beamwidth(alpha, geo)?;
    let design = (beamwidth * 100.0 + 1e-9).floor() / 100.0;
    let design = if design > 0.0 { design } else { beamwidth };
    let elements =
        elements_per_dimension(design, efficiency, element_pitch_wavelengths, subarray_dim)?;
    let fov = field_of_view(geo);
    Ok(ArraySizing {
        coverage_half_angle_deg: alpha,
        beamwidth_deg: beamwidth,
        design_beamwidth_deg: design,
        elements_per_dim: elements,
        subarrays_per_dim: elements / subarray_dim,
        fov_deg: fov,
        max_subarray_pitch_wavelengths: max_subarray_pitch(fov)?,
    })
}
