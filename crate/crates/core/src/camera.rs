//! Thin-lens camera geometry and sensor sampling.
//!
//! Conventions used throughout the crate:
//!
//! ```text
//! 1/f = 1/s' + 1/s          s  = object distance (mm)
//! M   = s'/s  ~  f/s        s' = image distance (mm), f = focal length (mm)
//!
//! sensor Nyquist      xi'_sensor = 1 / (2 dx')     cycles/mm on the sensor
//! object sampling     dx         = (s/f) dx'       mm per pixel on the object
//! object Nyquist      xi_object  = 1 / (2 dx)      cycles/mm on the object
//! ```
//!
//! `dx'` is the pixel pitch. The far-field approximation `M ~ f/s` drives the
//! sampling quantities; the exact solution is also reported so callers can
//! see the error they are accepting. Digital frequencies elsewhere in the
//! crate are cycles/sample: multiply cycles/mm by the relevant sampling
//! interval to convert.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Sensor and lens parameters of one acquisition device.
///
/// Serialized form is the camera-spec JSON file consumed by the CLI:
/// `{"name", "focal_length_mm", "pixel_pitch_um", "sensor_width_px",
/// "sensor_height_px"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub name: String,
    pub focal_length_mm: f64,
    pub pixel_pitch_um: f64,
    pub sensor_width_px: u32,
    pub sensor_height_px: u32,
}

impl CameraSpec {
    pub fn new(
        name: impl Into<String>,
        focal_length_mm: f64,
        pixel_pitch_um: f64,
        sensor_width_px: u32,
        sensor_height_px: u32,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            focal_length_mm,
            pixel_pitch_um,
            sensor_width_px,
            sensor_height_px,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.focal_length_mm.is_finite() || self.focal_length_mm <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "focal length must be positive, got {}",
                self.focal_length_mm
            )));
        }
        if !self.pixel_pitch_um.is_finite() || self.pixel_pitch_um <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "pixel pitch must be positive, got {}",
                self.pixel_pitch_um
            )));
        }
        if self.sensor_width_px == 0 || self.sensor_height_px == 0 {
            return Err(Error::InvalidInput(
                "sensor dimensions must be nonzero".into(),
            ));
        }
        Ok(())
    }

    /// Pixel pitch in millimeters.
    pub fn pixel_pitch_mm(&self) -> f64 {
        self.pixel_pitch_um * 1e-3
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let spec: CameraSpec = serde_json::from_str(&text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        Ok(std::fs::write(path, text)?)
    }
}

/// Where the subject sits relative to the camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGeometry {
    pub object_distance_mm: f64,
    /// Physical object height, only needed for magnification queries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_height_mm: Option<f64>,
}

impl SceneGeometry {
    pub fn new(object_distance_mm: f64) -> Result<Self> {
        Self::with_height(object_distance_mm, None)
    }

    pub fn with_height(object_distance_mm: f64, object_height_mm: Option<f64>) -> Result<Self> {
        let geom = Self {
            object_distance_mm,
            object_height_mm,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Re-checks the constructor invariants; useful after deserializing.
    pub fn validate(&self) -> Result<()> {
        if !self.object_distance_mm.is_finite() || self.object_distance_mm <= 0.0 {
            return Err(Error::Geometry(format!(
                "object distance must be positive, got {}",
                self.object_distance_mm
            )));
        }
        if let Some(h) = self.object_height_mm {
            if !h.is_finite() || h <= 0.0 {
                return Err(Error::Geometry(format!(
                    "object height must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }

    /// True when the subject is far enough that `M ~ f/s` is comfortably
    /// below 2% error (s >= 50 f). Informational, never enforced.
    pub fn is_far_field(&self, spec: &CameraSpec) -> bool {
        self.object_distance_mm >= 50.0 * spec.focal_length_mm
    }
}

/// Exact thin-lens solution plus the far-field shortcut and its error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinLensSolution {
    /// Exact image distance `s' = 1 / (1/f - 1/s)`.
    pub image_distance_mm: f64,
    /// Exact magnification `M = s'/s`.
    pub magnification: f64,
    /// Far-field shortcut `M ~ f/s`.
    pub magnification_approx: f64,
    /// `(M - M_approx) / M`, always positive for real objects.
    pub approx_rel_error: f64,
    /// Image-side height `h' = M h`, when the geometry carries a height.
    pub image_height_mm: Option<f64>,
}

/// Solves the thin-lens equation for a camera/scene combination.
///
/// Fails when `s <= f`: at or inside the focal distance no real image forms.
pub fn solve_thin_lens(spec: &CameraSpec, geom: &SceneGeometry) -> Result<ThinLensSolution> {
    let f = spec.focal_length_mm;
    let s = geom.object_distance_mm;
    if s <= f {
        return Err(Error::Geometry(format!(
            "object distance {s} mm must exceed focal length {f} mm for a real image"
        )));
    }
    let inv_image = 1.0 / f - 1.0 / s;
    let image_distance = 1.0 / inv_image;
    let magnification = image_distance / s;
    let magnification_approx = f / s;
    let approx_rel_error = (magnification - magnification_approx) / magnification;
    Ok(ThinLensSolution {
        image_distance_mm: image_distance,
        magnification,
        magnification_approx,
        approx_rel_error,
        image_height_mm: geom.object_height_mm.map(|h| magnification * h),
    })
}

/// Sampling rates of a capture, on the sensor and referred to the object.
///
/// Built with the far-field magnification, so the three fields satisfy
/// `object_nyquist = 1 / (2 object_sampling_interval)` by construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingModel {
    /// `1 / (2 dx')`, cycles/mm on the sensor.
    pub sensor_nyquist_cyc_per_mm: f64,
    /// `dx = (s/f) dx'`, mm between adjacent pixel footprints on the object.
    pub object_sampling_interval_mm: f64,
    /// `1 / (2 dx)`, cycles/mm resolvable on the object.
    pub object_nyquist_cyc_per_mm: f64,
}

/// Computes sensor and object-plane sampling for a camera at a distance.
pub fn sampling_model(spec: &CameraSpec, geom: &SceneGeometry) -> Result<SamplingModel> {
    spec.validate()?;
    if geom.object_distance_mm <= spec.focal_length_mm {
        return Err(Error::Geometry(format!(
            "object distance {} mm must exceed focal length {} mm",
            geom.object_distance_mm, spec.focal_length_mm
        )));
    }
    let pitch_mm = spec.pixel_pitch_mm();
    let interval = pitch_mm * geom.object_distance_mm / spec.focal_length_mm;
    Ok(SamplingModel {
        sensor_nyquist_cyc_per_mm: 0.5 / pitch_mm,
        object_sampling_interval_mm: interval,
        object_nyquist_cyc_per_mm: 0.5 / interval,
    })
}

/// Pitch ratio `dx'_source / dx'_target` between two devices.
///
/// Equals the ratio of object-plane sampling frequencies target-over-source
/// when both shoot from the same distance with the same focal length, and is
/// the factor by which a cutoff measured on the source system is rescaled
/// for the target system.
pub fn pixel_size_ratio(source: &CameraSpec, target: &CameraSpec) -> f64 {
    source.pixel_pitch_um / target.pixel_pitch_um
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cam(f: f64, pitch_um: f64) -> CameraSpec {
        CameraSpec::new("test", f, pitch_um, 512, 512).unwrap()
    }

    #[test]
    fn far_subject_matches_approximation() {
        // f = 105 mm subject at 105 m: M within 0.1% of f/s.
        let sol = solve_thin_lens(&cam(105.0, 6.25), &SceneGeometry::new(105_000.0).unwrap())
            .unwrap();
        assert_relative_eq!(sol.image_distance_mm, 105_000.0 / 999.0, max_relative = 1e-12);
        assert_relative_eq!(sol.magnification, 0.001001001001001001, max_relative = 1e-12);
        assert_relative_eq!(sol.magnification_approx, 0.001, max_relative = 1e-12);
        assert_relative_eq!(sol.approx_rel_error, 0.001, max_relative = 1e-9);
    }

    #[test]
    fn unit_magnification_at_twice_focal() {
        let sol =
            solve_thin_lens(&cam(105.0, 6.25), &SceneGeometry::new(210.0).unwrap()).unwrap();
        assert_relative_eq!(sol.image_distance_mm, 210.0, max_relative = 1e-12);
        assert_relative_eq!(sol.magnification, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn moderate_distance_error_is_visible() {
        // f = 55 mm at 5.5 m: s' = 5500/99, approximation reads 1% low.
        let sol = solve_thin_lens(&cam(55.0, 4.88), &SceneGeometry::new(5500.0).unwrap()).unwrap();
        assert_relative_eq!(sol.image_distance_mm, 5500.0 / 99.0, max_relative = 1e-12);
        assert_relative_eq!(sol.magnification, 0.010101010101010102, max_relative = 1e-12);
        assert_relative_eq!(sol.magnification_approx, 0.01, max_relative = 1e-12);
        assert_relative_eq!(sol.approx_rel_error, 0.01, max_relative = 1e-9);
    }

    #[test]
    fn image_height_follows_magnification() {
        let geom = SceneGeometry::with_height(210.0, Some(40.0)).unwrap();
        let sol = solve_thin_lens(&cam(105.0, 6.25), &geom).unwrap();
        assert_relative_eq!(sol.image_height_mm.unwrap(), 40.0, max_relative = 1e-12);
    }

    #[test]
    fn object_at_or_inside_focal_length_rejected() {
        assert!(solve_thin_lens(&cam(105.0, 6.25), &SceneGeometry::new(105.0).unwrap()).is_err());
        assert!(solve_thin_lens(&cam(105.0, 6.25), &SceneGeometry::new(50.0).unwrap()).is_err());
    }

    #[test]
    fn sampling_605_pitch_at_hundred_focal_lengths() {
        // 6.25 um pitch, f = 105 mm, s = 105 m: 80 cycles/mm on the sensor,
        // 6.25 mm per pixel on the object, 0.08 cycles/mm resolvable.
        let m = sampling_model(&cam(105.0, 6.25), &SceneGeometry::new(105_000.0).unwrap())
            .unwrap();
        assert_relative_eq!(m.sensor_nyquist_cyc_per_mm, 80.0, max_relative = 1e-12);
        assert_relative_eq!(m.object_sampling_interval_mm, 6.25, max_relative = 1e-12);
        assert_relative_eq!(m.object_nyquist_cyc_per_mm, 0.08, max_relative = 1e-12);
    }

    #[test]
    fn sampling_488_pitch_sensor_nyquist() {
        let m = sampling_model(&cam(105.0, 4.88), &SceneGeometry::new(105_000.0).unwrap())
            .unwrap();
        assert_relative_eq!(
            m.sensor_nyquist_cyc_per_mm,
            102.45901639344262,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sampling_self_consistency() {
        let m = sampling_model(&cam(55.0, 4.88), &SceneGeometry::new(4321.0).unwrap()).unwrap();
        assert_relative_eq!(
            m.object_nyquist_cyc_per_mm * 2.0 * m.object_sampling_interval_mm,
            1.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn doubling_distance_halves_object_nyquist_exactly() {
        let near = sampling_model(&cam(55.0, 6.25), &SceneGeometry::new(3000.0).unwrap()).unwrap();
        let far = sampling_model(&cam(55.0, 6.25), &SceneGeometry::new(6000.0).unwrap()).unwrap();
        // Doubling s doubles dx and halves xi_object with no rounding: the
        // quotients share a mantissa and differ only in exponent.
        assert_eq!(far.object_sampling_interval_mm, 2.0 * near.object_sampling_interval_mm);
        assert_eq!(2.0 * far.object_nyquist_cyc_per_mm, near.object_nyquist_cyc_per_mm);
    }

    #[test]
    fn pitch_ratio_between_reference_bodies() {
        // 6.25 um source vs 4.88 um target.
        let coarse = cam(105.0, 6.25);
        let fine = cam(105.0, 4.88);
        let alpha = pixel_size_ratio(&coarse, &fine);
        assert!((alpha - 1.2807).abs() <= 1e-4, "alpha = {alpha}");
        assert_relative_eq!(pixel_size_ratio(&coarse, &coarse), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            pixel_size_ratio(&fine, &coarse),
            4.88 / 6.25,
            max_relative = 1e-12
        );
    }

    #[test]
    fn far_field_flag_threshold() {
        let spec = cam(105.0, 6.25);
        assert!(SceneGeometry::new(50.0 * 105.0).unwrap().is_far_field(&spec));
        assert!(!SceneGeometry::new(49.9 * 105.0).unwrap().is_far_field(&spec));
    }

    #[test]
    fn camera_spec_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cam.json");
        let spec = cam(55.0, 4.88);
        spec.to_json_file(&path).unwrap();
        assert_eq!(CameraSpec::from_json_file(&path).unwrap(), spec);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(CameraSpec::new("bad", 0.0, 6.25, 512, 512).is_err());
        assert!(CameraSpec::new("bad", 105.0, -1.0, 512, 512).is_err());
        assert!(CameraSpec::new("bad", 105.0, 6.25, 0, 512).is_err());
        assert!(SceneGeometry::new(0.0).is_err());
        assert!(SceneGeometry::with_height(100.0, Some(0.0)).is_err());
    }

    proptest! {
        #[test]
        fn approximation_error_equals_f_over_s(
            f in 1.0f64..500.0,
            ratio in 100.0f64..100_000.0,
        ) {
            let s = f * ratio;
            let sol = solve_thin_lens(&cam(f, 6.25), &SceneGeometry::new(s).unwrap()).unwrap();
            // (M - f/s)/M collapses to f/s analytically; beyond 100 focal
            // lengths the shortcut is always inside 1.01%.
            prop_assert!(sol.approx_rel_error > 0.0);
            prop_assert!(sol.approx_rel_error < 0.0101);
            prop_assert!((sol.approx_rel_error - f / s).abs() < 1e-9);
        }

        #[test]
        fn pitch_ratios_are_reciprocal(
            a in 1.0f64..20.0,
            b in 1.0f64..20.0,
        ) {
            let ca = cam(105.0, a);
            let cb = cam(105.0, b);
            let product = pixel_size_ratio(&ca, &cb) * pixel_size_ratio(&cb, &ca);
            prop_assert!((product - 1.0).abs() < 1e-12);
        }

        #[test]
        fn scaling_distance_scales_interval_linearly(
            s in 500.0f64..50_000.0,
            k in 1.0f64..8.0,
        ) {
            let spec = cam(55.0, 6.25);
            let base = sampling_model(&spec, &SceneGeometry::new(s).unwrap()).unwrap();
            let scaled = sampling_model(&spec, &SceneGeometry::new(s * k).unwrap()).unwrap();
            let expect = base.object_sampling_interval_mm * k;
            prop_assert!((scaled.object_sampling_interval_mm - expect).abs() <= 1e-12 * expect);
        }
    }
}
