//! Channel gains and random user placement for the VLC and RF links.
//!
//! The VLC access point sits at height `L` above the receiver plane and serves a
//! disc of radius `r_e`; both the irradiance and incidence angles satisfy
//! `cos = L / d` with `d = sqrt(r^2 + L^2)`, so the line-of-sight DC gain
//! collapses to a function of the radial distance only:
//!
//! ```text
//! h(r) = Xi (m + 1) L^(m+1) / (r^2 + L^2)^((m+3)/2),   Xi = A Rp T g / (2 pi)
//! ```
//!
//! The concentrator gain `g` is evaluated inside the field of view and treated
//! as a constant of the configuration, like `Xi` itself.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Geometry and photodetector parameters of a VLC access point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlcApConfig {
    /// Vertical separation between LED and photodetector plane, metres.
    pub height: f64,
    /// Coverage radius on the receiver plane, metres.
    pub cell_radius: f64,
    /// LED half-power semi-angle, degrees.
    pub semi_angle_deg: f64,
    /// Photodetector area, m².
    pub pd_area: f64,
    /// Photodetector responsivity, A/W.
    pub responsivity: f64,
    /// Optical filter gain.
    pub filter_gain: f64,
    /// Receiver field of view, degrees.
    pub fov_deg: f64,
    /// Refractive index of the concentrator.
    pub refractive_index: f64,
    /// Total electrical signal power, W.
    pub tx_elec_power: f64,
    /// Noise power spectral density, A²/Hz.
    pub noise_psd: f64,
    /// Signal bandwidth, Hz.
    pub bandwidth: f64,
}

impl Default for VlcApConfig {
    /// Simulation defaults of the reference indoor scenario.
    fn default() -> Self {
        VlcApConfig {
            height: 2.15,
            cell_radius: 3.6,
            semi_angle_deg: 45.0,
            pd_area: 1e-4,
            responsivity: 0.4,
            filter_gain: 1.0,
            fov_deg: 60.0,
            refractive_index: 1.5,
            tx_elec_power: 0.25,
            noise_psd: 20e-21,
            bandwidth: 20e6,
        }
    }
}

impl VlcApConfig {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "VlcApConfig";
        if !(self.semi_angle_deg > 0.0 && self.semi_angle_deg < 90.0) {
            return Err(Error::domain(OP, format!("semi_angle_deg {} not in (0, 90)", self.semi_angle_deg)));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg <= 90.0) {
            return Err(Error::domain(OP, format!("fov_deg {} not in (0, 90]", self.fov_deg)));
        }
        for (name, v) in [
            ("height", self.height),
            ("cell_radius", self.cell_radius),
            ("pd_area", self.pd_area),
            ("responsivity", self.responsivity),
            ("filter_gain", self.filter_gain),
            ("refractive_index", self.refractive_index),
            ("tx_elec_power", self.tx_elec_power),
            ("noise_psd", self.noise_psd),
            ("bandwidth", self.bandwidth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(OP, format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Lambertian order `m` of the LED.
    pub fn lambertian_order(&self) -> Result<f64> {
        lambertian_order(self.semi_angle_deg)
    }

    /// `Xi = A Rp T g / (2 pi)` with the in-view concentrator gain.
    pub fn xi(&self) -> f64 {
        let g = concentrator_gain(self, 0.0);
        self.pd_area * self.responsivity * self.filter_gain * g / (2.0 * std::f64::consts::PI)
    }

    /// Transmit SNR `Pe / (N0 B)` implied by the power and noise fields.
    pub fn derived_snr(&self) -> f64 {
        self.tx_elec_power / (self.noise_psd * self.bandwidth)
    }

    /// Whether the incidence angle at the cell edge stays inside the field of view.
    pub fn fov_covers_cell(&self) -> bool {
        (self.cell_radius / self.height).atan().to_degrees() <= self.fov_deg
    }
}

/// Radio access point parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfApConfig {
    pub path_loss_exp: f64,
    /// Radius of the disc the RF users are spread over, metres.
    pub cell_radius: f64,
    /// Number of Gauss–Chebyshev nodes in the closed-form sum rate.
    pub chebyshev_order: usize,
    pub tx_power: f64,
    pub noise_var: f64,
    pub bandwidth: f64,
}

impl Default for RfApConfig {
    fn default() -> Self {
        RfApConfig {
            path_loss_exp: 3.0,
            cell_radius: 5.0,
            chebyshev_order: 10,
            tx_power: 1.0,
            noise_var: 1e-3,
            bandwidth: 20e6,
        }
    }
}

impl RfApConfig {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "RfApConfig";
        if !(self.path_loss_exp >= 2.0 && self.path_loss_exp.is_finite()) {
            return Err(Error::domain(OP, format!("path_loss_exp {} < 2", self.path_loss_exp)));
        }
        if !(self.cell_radius > 0.0 && self.cell_radius.is_finite()) {
            return Err(Error::domain(OP, format!("cell_radius {} must be positive", self.cell_radius)));
        }
        if self.chebyshev_order == 0 {
            return Err(Error::domain(OP, "chebyshev_order must be at least 1"));
        }
        for (name, v) in [
            ("tx_power", self.tx_power),
            ("noise_var", self.noise_var),
            ("bandwidth", self.bandwidth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(OP, format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Transmit SNR `P / sigma_z^2`.
    pub fn snr(&self) -> f64 {
        self.tx_power / self.noise_var
    }

    /// Mean channel power at the cell edge, `D^-PL`.
    pub fn edge_path_gain(&self) -> f64 {
        self.cell_radius.powf(-self.path_loss_exp)
    }
}

/// Variance of the additive channel-estimation error on each link (linear).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CsiErrorModel {
    pub sigma_sq_vlc: f64,
    pub sigma_sq_rf: f64,
}

impl CsiErrorModel {
    pub const PERFECT: CsiErrorModel = CsiErrorModel {
        sigma_sq_vlc: 0.0,
        sigma_sq_rf: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_sq_vlc >= 0.0 && self.sigma_sq_vlc.is_finite()) {
            return Err(Error::domain("CsiErrorModel", format!("sigma_sq_vlc {} < 0", self.sigma_sq_vlc)));
        }
        if !(self.sigma_sq_rf >= 0.0 && self.sigma_sq_rf < 1.0) {
            return Err(Error::domain("CsiErrorModel", format!("sigma_sq_rf {} not in [0, 1)", self.sigma_sq_rf)));
        }
        Ok(())
    }
}

/// Radial positions of `K` users inside a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPlacement {
    pub radii: Vec<f64>,
}

impl UserPlacement {
    /// Euclidean distances to an AP mounted `height` above the user plane.
    pub fn distances(&self, height: f64) -> Vec<f64> {
        self.radii.iter().map(|r| r.hypot(height)).collect()
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// `m = -1 / log2(cos(semi_angle))`.
pub fn lambertian_order(semi_angle_deg: f64) -> Result<f64> {
    if !(semi_angle_deg > 0.0 && semi_angle_deg < 90.0) {
        return Err(Error::domain(
            "lambertian_order",
            format!("semi-angle {semi_angle_deg} deg not in (0, 90)"),
        ));
    }
    let c = semi_angle_deg.to_radians().cos();
    Ok(-1.0 / c.log2())
}

/// Non-imaging concentrator: `n^2 / sin^2(FOV)` inside the field of view, 0 outside.
pub fn concentrator_gain(cfg: &VlcApConfig, incidence_deg: f64) -> f64 {
    if incidence_deg <= cfg.fov_deg {
        let s = cfg.fov_deg.to_radians().sin();
        cfg.refractive_index * cfg.refractive_index / (s * s)
    } else {
        0.0
    }
}

/// Line-of-sight DC gain at radial distance `r` from the cell centre.
pub fn vlc_los_gain(cfg: &VlcApConfig, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r <= cfg.cell_radius) {
        return Err(Error::domain(
            "vlc_los_gain",
            format!("radius {r} outside [0, {}]", cfg.cell_radius),
        ));
    }
    let m = cfg.lambertian_order()?;
    Ok(los_gain_unchecked(cfg.xi(), m, cfg.height, r))
}

#[inline]
pub(crate) fn los_gain_unchecked(xi: f64, m: f64, height: f64, r: f64) -> f64 {
    let d2 = r * r + height * height;
    xi * (m + 1.0) * height.powf(m + 1.0) / d2.powf(0.5 * (m + 3.0))
}

/// Support `[lambda_min, lambda_max]` of the squared VLC gain.
pub fn gain_sq_bounds(cfg: &VlcApConfig) -> Result<(f64, f64)> {
    let m = cfg.lambertian_order()?;
    let xi = cfg.xi();
    let hmax = los_gain_unchecked(xi, m, cfg.height, 0.0);
    let hmin = los_gain_unchecked(xi, m, cfg.height, cfg.cell_radius);
    Ok((hmin * hmin, hmax * hmax))
}

/// `K` i.i.d. radii uniform over a disc (`r = R sqrt(U)`).
pub fn sample_user_radii<R: Rng + ?Sized>(cell_radius: f64, users: usize, rng: &mut R) -> UserPlacement {
    let radii = (0..users).map(|_| sample_radius(cell_radius, rng)).collect();
    UserPlacement { radii }
}

#[inline]
pub(crate) fn sample_radius<R: Rng + ?Sized>(cell_radius: f64, rng: &mut R) -> f64 {
    cell_radius * rng.random::<f64>().sqrt()
}

/// One draw of `|h| = |H| / d^(PL/2)` with `H ~ CN(0, 1)`.
pub fn rf_gain_sample<R: Rng + ?Sized>(cfg: &RfApConfig, distance: f64, rng: &mut R) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::domain("rf_gain_sample", format!("distance {distance} must be positive")));
    }
    let h = complex_normal_power(rng).sqrt();
    Ok(h / distance.powf(0.5 * cfg.path_loss_exp))
}

/// `|z|^2` for `z ~ CN(0, 1)`.
#[inline]
pub(crate) fn complex_normal_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    0.5 * (re * re + im * im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lambertian_order_reference_angles() {
        assert!((lambertian_order(60.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((lambertian_order(45.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(lambertian_order(0.0).is_err());
        assert!(lambertian_order(90.0).is_err());
        assert!(lambertian_order(-5.0).is_err());
    }

    #[test]
    fn concentrator_inside_boundary_outside() {
        let cfg = VlcApConfig::default();
        assert!((concentrator_gain(&cfg, 30.0) - 3.0).abs() < 1e-12);
        assert!((concentrator_gain(&cfg, 60.0) - 3.0).abs() < 1e-12);
        assert_eq!(concentrator_gain(&cfg, 75.0), 0.0);
    }

    #[test]
    fn nadir_gain_matches_hand_value() {
        let cfg = VlcApConfig::default();
        let xi = 1e-4 * 0.4 * 1.0 * 3.0 / (2.0 * std::f64::consts::PI);
        let expected = xi * 3.0 / (2.15 * 2.15);
        let h0 = vlc_los_gain(&cfg, 0.0).unwrap();
        assert!((h0 - expected).abs() / expected < 1e-14);
        assert!((h0 - 1.2395e-5).abs() < 1e-9);
    }

    #[test]
    fn gain_rejects_out_of_cell_radius() {
        let cfg = VlcApConfig::default();
        assert!(vlc_los_gain(&cfg, -0.1).is_err());
        assert!(vlc_los_gain(&cfg, 3.61).is_err());
        assert!(vlc_los_gain(&cfg, 3.6).is_ok());
    }

    #[test]
    fn bounds_match_endpoint_gains_and_ratio_identity() {
        let cfg = VlcApConfig::default();
        let (lmin, lmax) = gain_sq_bounds(&cfg).unwrap();
        let h0 = vlc_los_gain(&cfg, 0.0).unwrap();
        let he = vlc_los_gain(&cfg, cfg.cell_radius).unwrap();
        assert!((lmax - h0 * h0).abs() / lmax < 1e-12);
        assert!((lmin - he * he).abs() / lmin < 1e-12);
        assert!((lmax - 1.5364e-10).abs() < 1e-13);
        let l2 = cfg.height * cfg.height;
        let ratio = (l2 / (cfg.cell_radius * cfg.cell_radius + l2)).powi(5);
        assert!((lmin / lmax - ratio).abs() / ratio < 1e-12);
    }

    #[test]
    fn degenerate_cell_collapses_support() {
        let cfg = VlcApConfig {
            cell_radius: 1e-9,
            ..Default::default()
        };
        let (lmin, lmax) = gain_sq_bounds(&cfg).unwrap();
        assert!((lmax - lmin) / lmax < 1e-15);
    }

    #[test]
    fn table_geometry_sits_inside_fov() {
        assert!(VlcApConfig::default().fov_covers_cell());
    }

    #[test]
    fn radii_are_reproducible_for_a_seed() {
        let a = sample_user_radii(3.6, 1, &mut ChaCha8Rng::seed_from_u64(7));
        let b = sample_user_radii(3.6, 1, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert!(a.radii[0] >= 0.0 && a.radii[0] <= 3.6);
        assert_eq!(a.distances(2.15)[0], a.radii[0].hypot(2.15));
    }

    #[test]
    fn rf_gain_rejects_nonpositive_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = RfApConfig::default();
        assert!(rf_gain_sample(&cfg, 0.0, &mut rng).is_err());
        assert!(rf_gain_sample(&cfg, -1.0, &mut rng).is_err());
    }

    #[test]
    fn rf_unit_distance_has_no_path_loss() {
        let cfg = RfApConfig {
            path_loss_exp: 3.7,
            ..Default::default()
        };
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        let g = rf_gain_sample(&cfg, 1.0, &mut a).unwrap();
        assert_eq!(g, complex_normal_power(&mut b).sqrt());
    }

    #[test]
    fn config_validation() {
        assert!(VlcApConfig::default().validate().is_ok());
        let bad = VlcApConfig {
            semi_angle_deg: 120.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = RfApConfig {
            path_loss_exp: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = CsiErrorModel {
            sigma_sq_vlc: 0.0,
            sigma_sq_rf: 1.0,
        };
        assert!(bad.validate().is_err());
    }
}
