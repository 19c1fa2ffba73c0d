//! Random downlink instances for a single hexagonal cell.
//!
//! Users are dropped uniformly in a hexagon around the base station, at least
//! `min_distance_m` away from it. Each user gets one log-normal shadowing draw
//! and an independent Rayleigh power gain per subcarrier on top of the
//! distance-dependent path loss `intercept + slope · log10(d_km)` dB.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::error::{Error, Result};
use crate::model::{Instance, InstanceData};

/// Floor applied to drawn user weights so they stay strictly positive.
pub const MIN_WEIGHT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub users: usize,
    pub subcarriers: usize,
    pub max_multiplexed: usize,
    pub cell_radius_m: f64,
    pub min_distance_m: f64,
    /// Carried for completeness; the path-loss formula already folds it in.
    pub carrier_frequency_hz: f64,
    pub path_loss_intercept_db: f64,
    pub path_loss_slope_db: f64,
    pub shadowing_std_db: f64,
    pub rayleigh_variance: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub p_max_w: f64,
    /// Per-subcarrier limit; `None` leaves the constraint inactive.
    pub p_max_subcarrier_w: Option<f64>,
    pub delta_w: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            users: 10,
            subcarriers: 20,
            max_multiplexed: 2,
            cell_radius_m: 1000.0,
            min_distance_m: 35.0,
            carrier_frequency_hz: 2e9,
            path_loss_intercept_db: 128.1,
            path_loss_slope_db: 37.6,
            shadowing_std_db: 10.0,
            rayleigh_variance: 1.0,
            noise_psd_dbm_hz: -174.0,
            bandwidth_hz: 5e6,
            p_max_w: 10.0,
            p_max_subcarrier_w: None,
            delta_w: 0.01,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.users == 0 || self.subcarriers == 0 {
            return bad("users and subcarriers must be at least 1");
        }
        if self.max_multiplexed == 0 || self.max_multiplexed > self.users {
            return bad("max_multiplexed must be in 1..=users");
        }
        if !(self.cell_radius_m > 0.0) || !(self.min_distance_m >= 0.0) {
            return bad("cell_radius_m must be > 0 and min_distance_m >= 0");
        }
        // the inscribed circle of the hexagon must leave room outside the exclusion disc
        if self.min_distance_m >= self.cell_radius_m * 3f64.sqrt() / 2.0 {
            return bad("min_distance_m must be below the hexagon apothem");
        }
        if !(self.shadowing_std_db >= 0.0) || !(self.rayleigh_variance > 0.0) {
            return bad("shadowing_std_db must be >= 0 and rayleigh_variance > 0");
        }
        if !(self.bandwidth_hz > 0.0) || !(self.p_max_w > 0.0) || !(self.delta_w > 0.0) {
            return bad("bandwidth_hz, p_max_w and delta_w must be > 0");
        }
        if self.delta_w > self.p_max_w {
            return bad("delta_w must not exceed p_max_w");
        }
        if let Some(c) = self.p_max_subcarrier_w {
            if !(c > 0.0 && c <= self.p_max_w) {
                return bad("p_max_subcarrier_w must be in (0, p_max_w]");
            }
        }
        Ok(())
    }

    /// Path loss in dB at distance `d_m` meters.
    pub fn path_loss_db(&self, d_m: f64) -> f64 {
        self.path_loss_intercept_db + self.path_loss_slope_db * (d_m / 1000.0).log10()
    }

    /// Receiver noise power on one subcarrier, in W.
    pub fn noise_power_w(&self) -> f64 {
        let w_n = self.bandwidth_hz / self.subcarriers as f64;
        10f64.powf((self.noise_psd_dbm_hz - 30.0) / 10.0) * w_n
    }

    /// Apply one `key = value` setting. Unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::InvalidConfig(format!("bad value for {key}: {v:?}")))
        }
        match key {
            "users" => self.users = num(key, value)?,
            "subcarriers" => self.subcarriers = num(key, value)?,
            "max_multiplexed" => self.max_multiplexed = num(key, value)?,
            "cell_radius_m" => self.cell_radius_m = num(key, value)?,
            "min_distance_m" => self.min_distance_m = num(key, value)?,
            "carrier_frequency_hz" => self.carrier_frequency_hz = num(key, value)?,
            "path_loss_intercept_db" => self.path_loss_intercept_db = num(key, value)?,
            "path_loss_slope_db" => self.path_loss_slope_db = num(key, value)?,
            "shadowing_std_db" => self.shadowing_std_db = num(key, value)?,
            "rayleigh_variance" => self.rayleigh_variance = num(key, value)?,
            "noise_psd_dbm_hz" => self.noise_psd_dbm_hz = num(key, value)?,
            "bandwidth_hz" => self.bandwidth_hz = num(key, value)?,
            "p_max_w" => self.p_max_w = num(key, value)?,
            "p_max_subcarrier_w" => {
                self.p_max_subcarrier_w = match value {
                    "" | "none" => None,
                    v => Some(num(key, v)?),
                }
            }
            "delta_w" => self.delta_w = num(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parse a flat `key = value` file on top of the defaults.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (key, value) in parse_kv(text)? {
            cfg.set(&key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Split flat `key = value` text into pairs. `#` starts a comment; blank lines
/// are skipped.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Uniform point in a flat-top hexagon of circumradius `r`, outside a disc of
/// radius `r_min`. Returns the distance to the center.
fn drop_user(rng: &mut impl Rng, r: f64, r_min: f64) -> f64 {
    let half_h = r * 3f64.sqrt() / 2.0;
    loop {
        let x: f64 = rng.random_range(-r..r);
        let y: f64 = rng.random_range(-half_h..half_h);
        let inside = 3f64.sqrt() * x.abs() + y.abs() <= 3f64.sqrt() * r;
        let d = x.hypot(y);
        if inside && d >= r_min {
            return d;
        }
    }
}

/// Draw a random instance. The same `(config, seed)` always yields the same instance.
pub fn generate_instance(config: &ChannelConfig, seed: u64) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = config.users;
    let n = config.subcarriers;
    let shadow = Normal::new(0.0, config.shadowing_std_db).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let fading = Exp::new(1.0 / config.rayleigh_variance).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let noise = config.noise_power_w();

    let mut weights = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    for _ in 0..k {
        let d = drop_user(&mut rng, config.cell_radius_m, config.min_distance_m);
        let w: f64 = rng.random();
        weights.push(w.max(MIN_WEIGHT));
        let loss_db = config.path_loss_db(d) + shadow.sample(&mut rng);
        let large_scale = 10f64.powf(-loss_db / 10.0);
        gains.push((0..n).map(|_| large_scale * fading.sample(&mut rng)).collect::<Vec<f64>>());
    }
    // Exp can return exactly 0 with vanishing probability; keep gains positive
    for g in gains.iter_mut().flatten() {
        if *g <= 0.0 {
            *g = f64::MIN_POSITIVE;
        }
    }

    Instance::new(InstanceData {
        weights,
        bandwidths: vec![config.bandwidth_hz / n as f64; n],
        gains,
        noise: vec![vec![noise; n]; k],
        p_max: config.p_max_w,
        p_max_sub: config.p_max_subcarrier_w.map(|c| vec![c; n]),
        delta: config.delta_w,
        max_multiplexed: config.max_multiplexed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DecodingOrder;

    #[test]
    fn default_matches_simulation_table() {
        let cfg = ChannelConfig::default();
        let inst = generate_instance(&cfg, 1).unwrap();
        assert_eq!(inst.subcarriers(), 20);
        assert_eq!(inst.bandwidths()[0], 5e6 / 20.0);
        assert_eq!(inst.p_max(), 10.0);
        assert_eq!(inst.delta(), 0.01);
        assert_eq!(inst.levels(), 1000);
        let total: f64 = inst.bandwidths().iter().sum();
        assert!((total - 5e6).abs() < 1e-6);
    }

    #[test]
    fn path_loss_at_one_km() {
        assert_eq!(ChannelConfig::default().path_loss_db(1000.0), 128.1);
    }

    #[test]
    fn same_seed_same_instance() {
        let cfg = ChannelConfig { users: 7, ..Default::default() };
        assert_eq!(generate_instance(&cfg, 42).unwrap(), generate_instance(&cfg, 42).unwrap());
        assert_ne!(generate_instance(&cfg, 42).unwrap(), generate_instance(&cfg, 43).unwrap());
    }

    #[test]
    fn generated_order_is_sorted() {
        let cfg = ChannelConfig { users: 12, subcarriers: 5, ..Default::default() };
        for seed in 0..10 {
            let inst = generate_instance(&cfg, seed).unwrap();
            let order = DecodingOrder::new(&inst);
            for n in 0..inst.subcarriers() {
                let p = order.permutation(n);
                for w in p.windows(2) {
                    assert!(inst.normalized_noise(w[0], n) >= inst.normalized_noise(w[1], n));
                }
            }
            assert!(inst.weights().iter().all(|&w| (MIN_WEIGHT..=1.0).contains(&w)));
        }
    }

    #[test]
    fn users_land_inside_the_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let d = drop_user(&mut rng, 1000.0, 35.0);
            assert!((35.0..=1000.0).contains(&d));
        }
    }

    #[test]
    fn kv_parsing() {
        let cfg = ChannelConfig::from_kv("# table\nusers = 4\n subcarriers=3 # trailing\n\np_max_subcarrier_w = 2.5\n").unwrap();
        assert_eq!((cfg.users, cfg.subcarriers, cfg.p_max_subcarrier_w), (4, 3, Some(2.5)));
        assert!(ChannelConfig::from_kv("users 4").is_err());
        assert!(ChannelConfig::from_kv("colour = blue").is_err());
        assert!(ChannelConfig::from_kv("users = many").is_err());
        assert!(ChannelConfig::from_kv("users = 2\nmax_multiplexed = 3").is_err());
    }
}
