//! Network geometry and block-fading channels.
//!
//! Direct device-to-BS links are Rayleigh faded. The weak-device-to-RIS and
//! RIS-to-BS links are Rician with factor `K` around a unit-modulus LoS
//! component. Path loss follows `gamma0 * d^-eta` with positive exponents.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{check_len, Error, Result};

pub type Point = [f64; 3];

pub fn distance(a: &Point, b: &Point) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Deterministic component of the Rician RIS links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LosModel {
    /// Half-wavelength uniform phase ramp `exp(-j*pi*l*sin(azimuth))`.
    #[default]
    Ula,
    /// All-ones LoS vector.
    Ones,
}

impl LosModel {
    pub fn steering(self, n: usize, azimuth: f64) -> Vec<Complex64> {
        match self {
            LosModel::Ula => {
                let s = azimuth.sin();
                (0..n)
                    .map(|l| Complex64::from_polar(1.0, -PI * l as f64 * s))
                    .collect()
            }
            LosModel::Ones => vec![Complex64::new(1.0, 0.0); n],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub bs_position: Point,
    pub ris_position: Point,
    pub strong_positions: Vec<Point>,
    pub weak_positions: Vec<Point>,
    pub d_sb: Vec<f64>,
    pub d_wb: Vec<f64>,
    pub d_wr: Vec<f64>,
    pub d_rb: f64,
    pub l_elements: usize,
}

impl Topology {
    pub fn clusters(&self) -> usize {
        self.strong_positions.len()
    }

    /// Azimuth of the RIS-to-device direction, used for the LoS ramp.
    pub fn weak_azimuth(&self, w: usize) -> f64 {
        let p = &self.weak_positions[w];
        (p[1] - self.ris_position[1]).atan2(p[0] - self.ris_position[0])
    }

    pub fn bs_azimuth(&self) -> f64 {
        (self.bs_position[1] - self.ris_position[1]).atan2(self.bs_position[0] - self.ris_position[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    pub gamma0: f64,
    pub eta_rb: f64,
    pub eta_wr: f64,
    pub eta_sb: f64,
    pub eta_wb: f64,
    pub rician_k: f64,
    pub los_model: LosModel,
}

impl FadingParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gamma0 > 0.0
            && [self.eta_rb, self.eta_wr, self.eta_sb, self.eta_wb]
                .iter()
                .all(|e| *e > 0.0 && e.is_finite())
            && self.rician_k >= 0.0
            && self.rician_k.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad fading parameters: {self:?}")))
        }
    }
}

/// All channel realizations of one slot. Index `i` of every per-device
/// vector refers to strong device `i` or weak device `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSlot {
    pub h_sb: Vec<Complex64>,
    pub h_wb: Vec<Complex64>,
    pub h_wr: Vec<Vec<Complex64>>,
    pub h_rb: Vec<Complex64>,
    pub slot_index: usize,
}

impl ChannelSlot {
    pub fn clusters(&self) -> usize {
        self.h_sb.len()
    }

    pub fn l_elements(&self) -> usize {
        self.h_rb.len()
    }

    /// Effective gain of weak device `w` under phases `theta`.
    pub fn weak_gain(&self, w: usize, theta: &[f64]) -> Result<f64> {
        effective_gain(&self.h_wr[w], theta, &self.h_rb, self.h_wb[w])
    }

    /// Gain of weak device `w` through the direct link only.
    pub fn direct_gain(&self, w: usize) -> f64 {
        self.h_wb[w].norm_sqr()
    }

    pub fn strong_gain(&self, s: usize) -> f64 {
        self.h_sb[s].norm_sqr()
    }
}

fn check_geometry(config: &ScenarioConfig) -> Result<()> {
    if config.i_clusters == 0 {
        return Err(Error::InvalidConfig("i_clusters must be >= 1".into()));
    }
    if config.l_elements == 0 {
        return Err(Error::InvalidConfig("l_elements must be >= 1".into()));
    }
    for (name, v) in [
        ("d_s", config.d_s),
        ("d_w", config.d_w),
        ("d_rb", config.d_rb),
        ("h_b", config.h_b),
        ("h_r", config.h_r),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")));
        }
    }
    Ok(())
}

/// Places strong devices on the circle of radius `d_s` around the BS ground
/// point and weak devices on the circle of radius `d_w` around the RIS
/// ground point, with uniform polar angles.
pub fn place_devices<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<Topology> {
    check_geometry(config)?;
    let n = config.i_clusters;
    let strong: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
    let weak: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
    place_devices_at(config, &strong, &weak)
}

/// Same as [`place_devices`] with explicit polar angles.
pub fn place_devices_at(config: &ScenarioConfig, strong_angles: &[f64], weak_angles: &[f64]) -> Result<Topology> {
    check_geometry(config)?;
    check_len(config.i_clusters, strong_angles.len())?;
    check_len(config.i_clusters, weak_angles.len())?;

    let bs = [0.0, 0.0, config.h_b];
    let ris = [config.d_rb, 0.0, config.h_r];
    let strong_positions: Vec<Point> = strong_angles
        .iter()
        .map(|a| [config.d_s * a.cos(), config.d_s * a.sin(), 0.0])
        .collect();
    let weak_positions: Vec<Point> = weak_angles
        .iter()
        .map(|a| [config.d_w * a.cos() + config.d_rb, config.d_w * a.sin(), 0.0])
        .collect();

    Ok(Topology {
        d_sb: strong_positions.iter().map(|p| distance(p, &bs)).collect(),
        d_wb: weak_positions.iter().map(|p| distance(p, &bs)).collect(),
        d_wr: weak_positions.iter().map(|p| distance(p, &ris)).collect(),
        d_rb: distance(&ris, &bs),
        bs_position: bs,
        ris_position: ris,
        strong_positions,
        weak_positions,
        l_elements: config.l_elements,
    })
}

/// `sqrt(gamma0 * d^-eta)`.
pub fn large_scale_amplitude(distance: f64, exponent: f64, gamma0: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Domain(format!("distance must be > 0, got {distance}")));
    }
    Ok((gamma0 * distance.powf(-exponent)).sqrt())
}

fn cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Circularly-symmetric complex Gaussian draws with unit variance.
pub fn sample_rayleigh<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| cn01(rng)).collect()
}

/// `sqrt(k/(k+1)) * los + sqrt(1/(k+1)) * CN(0,1)`, elementwise.
pub fn sample_rician<R: Rng + ?Sized>(rng: &mut R, k: f64, los: &[Complex64]) -> Result<Vec<Complex64>> {
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("Rician factor must be >= 0, got {k}")));
    }
    if let Some(bad) = los.iter().find(|c| (c.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::Domain(format!("LoS entry {bad} is not unit modulus")));
    }
    let (a, b) = if k.is_infinite() {
        (1.0, 0.0)
    } else {
        ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
    };
    Ok(los.iter().map(|l| l * a + cn01(rng) * b).collect())
}

/// Draws every channel of slot `t`. Draw order is fixed: strong direct links,
/// weak direct links, RIS-to-BS vector, then one weak-to-RIS vector per
/// weak device.
pub fn sample_slot<R: Rng + ?Sized>(
    topology: &Topology,
    params: &FadingParams,
    t: usize,
    rng: &mut R,
) -> Result<ChannelSlot> {
    params.validate()?;
    let l = topology.l_elements;
    if l == 0 {
        return Err(Error::InvalidConfig("RIS needs at least one element".into()));
    }

    let mut h_sb = Vec::with_capacity(topology.clusters());
    for d in &topology.d_sb {
        h_sb.push(cn01(rng) * large_scale_amplitude(*d, params.eta_sb, params.gamma0)?);
    }
    let mut h_wb = Vec::with_capacity(topology.clusters());
    for d in &topology.d_wb {
        h_wb.push(cn01(rng) * large_scale_amplitude(*d, params.eta_wb, params.gamma0)?);
    }

    let amp_rb = large_scale_amplitude(topology.d_rb, params.eta_rb, params.gamma0)?;
    let los_rb = params.los_model.steering(l, topology.bs_azimuth());
    let h_rb: Vec<Complex64> = sample_rician(rng, params.rician_k, &los_rb)?
        .into_iter()
        .map(|h| h * amp_rb)
        .collect();

    let mut h_wr = Vec::with_capacity(topology.clusters());
    for (w, d) in topology.d_wr.iter().enumerate() {
        let amp = large_scale_amplitude(*d, params.eta_wr, params.gamma0)?;
        let los = params.los_model.steering(l, topology.weak_azimuth(w));
        h_wr.push(
            sample_rician(rng, params.rician_k, &los)?
                .into_iter()
                .map(|h| h * amp)
                .collect(),
        );
    }

    Ok(ChannelSlot {
        h_sb,
        h_wb,
        h_wr,
        h_rb,
        slot_index: t,
    })
}

/// `|sum_l h_wr[l] * exp(j*theta[l]) * conj(h_rb[l]) + h_wb|^2`.
pub fn effective_gain(h_wr: &[Complex64], theta: &[f64], h_rb: &[Complex64], h_wb: Complex64) -> Result<f64> {
    check_len(h_wr.len(), theta.len())?;
    check_len(h_wr.len(), h_rb.len())?;
    let cascaded: Complex64 = h_wr
        .iter()
        .zip(theta)
        .zip(h_rb)
        .map(|((a, th), b)| a * Complex64::cis(*th) * b.conj())
        .sum();
    Ok((cascaded + h_wb).norm_sqr())
}

/// Best achievable single-user gain `(sum_l |h_wr||h_rb| + |h_wb|)^2`.
pub fn coherent_gain_bound(h_wr: &[Complex64], h_rb: &[Complex64], h_wb: Complex64) -> f64 {
    let s: f64 = h_wr.iter().zip(h_rb).map(|(a, b)| a.norm() * b.norm()).sum();
    (s + h_wb.norm()).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::from_seed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn strong_device_at_zero_angle() {
        let cfg = ScenarioConfig {
            i_clusters: 1,
            ..Default::default()
        };
        let topo = place_devices_at(&cfg, &[0.0], &[0.0]).unwrap();
        assert_eq!(topo.strong_positions[0], [10.0, 0.0, 0.0]);
        assert!((topo.d_sb[0] - 200f64.sqrt()).abs() < 1e-12);
        assert!((topo.d_sb[0] - 14.142).abs() < 1e-3);
        assert_eq!(topo.weak_positions[0], [160.0, 0.0, 0.0]);
    }

    #[test]
    fn ris_bs_distance_equal_heights() {
        let cfg = ScenarioConfig::default();
        let topo = place_devices(&cfg, &mut from_seed(3)).unwrap();
        assert!((topo.d_rb - 150.0).abs() < 1e-12);
    }

    #[test]
    fn placements_respect_radii_and_distances() {
        let cfg = ScenarioConfig {
            i_clusters: 1,
            ..Default::default()
        };
        let mut rng = from_seed(11);
        for _ in 0..1000 {
            let t = place_devices(&cfg, &mut rng).unwrap();
            let w = t.weak_positions[0];
            let s = t.strong_positions[0];
            assert!(((w[0] - cfg.d_rb).hypot(w[1]) - cfg.d_w).abs() < 1e-9);
            assert!((s[0].hypot(s[1]) - cfg.d_s).abs() < 1e-9);
            assert_eq!(w[2], 0.0);
            assert_eq!(s[2], 0.0);
            assert!((t.d_wr[0] - distance(&w, &t.ris_position)).abs() < 1e-9);
            assert!((t.d_wb[0] - distance(&w, &t.bs_position)).abs() < 1e-9);
            assert!((t.d_sb[0] - distance(&s, &t.bs_position)).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_geometry_rejected() {
        let cfg = ScenarioConfig {
            h_r: 0.0,
            ..Default::default()
        };
        assert!(matches!(place_devices(&cfg, &mut from_seed(0)), Err(Error::InvalidConfig(_))));
        let cfg = ScenarioConfig {
            d_w: -1.0,
            ..Default::default()
        };
        assert!(matches!(place_devices(&cfg, &mut from_seed(0)), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn path_loss_amplitude() {
        assert!((large_scale_amplitude(1.0, 3.7, 1e-3).unwrap() - 0.031_622_776_6).abs() < 1e-9);
        let a = large_scale_amplitude(100.0, 3.5, 1.0).unwrap();
        assert!((a - 10f64.powf(-3.5)).abs() / a < 1e-12);
        let a1 = large_scale_amplitude(20.0, 2.0, 1e-3).unwrap();
        let a2 = large_scale_amplitude(40.0, 2.0, 1e-3).unwrap();
        assert!((a1 / a2 - 2.0).abs() < 1e-12);
        assert!(matches!(large_scale_amplitude(0.0, 2.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(large_scale_amplitude(-3.0, 2.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn path_loss_is_decreasing() {
        let mut prev = f64::INFINITY;
        for d in [1.5, 2.0, 10.0, 150.0] {
            let a = large_scale_amplitude(d, 2.2, 1e-3).unwrap();
            assert!(a < prev);
            prev = a;
        }
        let a = large_scale_amplitude(20.0, 2.2, 1e-3).unwrap();
        let b = large_scale_amplitude(20.0, 3.5, 1e-3).unwrap();
        assert!(b < a);
    }

    #[test]
    fn rayleigh_moments() {
        let h = sample_rayleigh(&mut from_seed(5), 100_000);
        let mean: Complex64 = h.iter().sum::<Complex64>() / h.len() as f64;
        assert!(mean.norm() < 0.02);
        let p: f64 = h.iter().map(|x| x.norm_sqr()).sum::<f64>() / h.len() as f64;
        assert!((p - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn rician_los_dominant_limit() {
        let los = vec![c(1.0, 0.0); 8];
        let h = sample_rician(&mut from_seed(2), 1e9, &los).unwrap();
        for x in h {
            assert!((x - c(1.0, 0.0)).norm() < 1e-3);
        }
    }

    #[test]
    fn rician_unit_power() {
        let los = LosModel::Ula.steering(10, 0.7);
        let mut rng = from_seed(9);
        let mut acc = 0.0;
        let draws = 10_000;
        for _ in 0..draws {
            acc += sample_rician(&mut rng, 2.0, &los)
                .unwrap()
                .iter()
                .map(|x| x.norm_sqr())
                .sum::<f64>();
        }
        let p = acc / (draws * 10) as f64;
        assert!((p - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn rician_rejects_non_unit_los() {
        let los = vec![c(1.0, 0.0), c(0.5, 0.0)];
        assert!(matches!(sample_rician(&mut from_seed(0), 1.0, &los), Err(Error::Domain(_))));
    }

    #[test]
    fn slot_shapes_and_independence() {
        let cfg = ScenarioConfig {
            i_clusters: 3,
            l_elements: 4,
            ..Default::default()
        };
        let mut rng = from_seed(21);
        let topo = place_devices(&cfg, &mut rng).unwrap();
        let params = cfg.fading_params();
        let a = sample_slot(&topo, &params, 0, &mut rng).unwrap();
        let b = sample_slot(&topo, &params, 1, &mut rng).unwrap();
        assert_eq!(a.h_rb.len(), 4);
        assert!(a.h_wr.iter().all(|v| v.len() == 4));
        assert_eq!(a.h_sb.len(), 3);
        assert_ne!(a.h_sb, b.h_sb);
        assert_ne!(a.h_rb, b.h_rb);
        assert!(a.h_wr.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite()));
    }

    #[test]
    fn strong_link_power_matches_path_loss() {
        let cfg = ScenarioConfig {
            i_clusters: 1,
            l_elements: 2,
            ..Default::default()
        };
        let mut rng = from_seed(4);
        let topo = place_devices(&cfg, &mut rng).unwrap();
        let params = cfg.fading_params();
        let slots = 10_000;
        let mut acc = 0.0;
        for t in 0..slots {
            acc += sample_slot(&topo, &params, t, &mut rng).unwrap().strong_gain(0);
        }
        let expected = params.gamma0 * topo.d_sb[0].powf(-params.eta_sb);
        let measured = acc / slots as f64;
        assert!((measured / expected - 1.0).abs() < 0.03, "{measured} vs {expected}");
    }

    #[test]
    fn effective_gain_examples() {
        let one = [c(1.0, 0.0)];
        assert!((effective_gain(&one, &[0.0], &one, c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(effective_gain(&one, &[PI], &one, c(1.0, 0.0)).unwrap() < 1e-30);
        assert!(matches!(
            effective_gain(&one, &[0.0, 1.0], &one, c(0.0, 0.0)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn effective_gain_zero_phase_expansion_and_periodicity() {
        let mut rng = from_seed(8);
        let h_wr = sample_rayleigh(&mut rng, 6);
        let h_rb = sample_rayleigh(&mut rng, 6);
        let h_wb = sample_rayleigh(&mut rng, 1)[0];
        let zero = vec![0.0; 6];
        let direct: Complex64 = h_wr.iter().zip(&h_rb).map(|(a, b)| a * b.conj()).sum::<Complex64>() + h_wb;
        let g = effective_gain(&h_wr, &zero, &h_rb, h_wb).unwrap();
        assert!((g - direct.norm_sqr()).abs() < 1e-12 * g.max(1.0));

        let theta: Vec<f64> = (0..6).map(|i| 0.3 * i as f64).collect();
        let mut shifted = theta.clone();
        shifted[2] += 2.0 * PI;
        let g1 = effective_gain(&h_wr, &theta, &h_rb, h_wb).unwrap();
        let g2 = effective_gain(&h_wr, &shifted, &h_rb, h_wb).unwrap();
        assert!((g1 - g2).abs() < 1e-12 * g1.max(1.0));
        assert!(g1 <= coherent_gain_bound(&h_wr, &h_rb, h_wb) * (1.0 + 1e-12));
    }

    #[test]
    fn ula_steering_is_unit_modulus() {
        for az in [0.0, 0.4, PI / 2.0, 2.5] {
            for v in LosModel::Ula.steering(16, az) {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(LosModel::Ones.steering(3, 1.0), vec![c(1.0, 0.0); 3]);
    }
}
