//! Scenario files: flat `key = value` lines with dotted section prefixes.
//!
//! ```text
//! # building, metres
//! building.x_b = 30
//! building.y_b = 40
//! building.z_b = 60
//! radio.f_ghz = 2
//! radio.snr_min_db = 25
//! radio.noise_dbm = -120
//! radio.g_r_dir_db = 14.4
//! methods = FOBS, ABS, AUDA
//! sweep.theta_min = 10
//! sweep.theta_max = 40
//! sweep.theta_step = 2
//! seed = 7
//! ```
//!
//! `sweep.r_far = 5, 10` may replace the three `sweep.theta_*` keys.

use std::collections::BTreeMap;
use std::path::Path;

use crate::coverage::{DEFAULT_SAMPLES, DEFAULT_VOXEL_SIZE, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::geometry::{auda_offset, BuildingDims};
use crate::link_budget::RadioParams;
use crate::placement::Method;

/// Receiver and channel parameters; the beamwidth comes from each plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub f_ghz: f64,
    pub snr_min_db: f64,
    pub noise_dbm: f64,
    pub g_r_dir_db: f64,
    pub g_r_omni_db: f64,
    pub grf_db: f64,
}

impl RadioConfig {
    pub fn params(&self, theta_b: f64) -> RadioParams {
        RadioParams {
            f_ghz: self.f_ghz,
            theta_b,
            snr_min_db: self.snr_min_db,
            noise_dbm: self.noise_dbm,
            g_r_dir_db: self.g_r_dir_db,
            g_r_omni_db: self.g_r_omni_db,
            grf_db: self.grf_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Beamwidths from `min` to `max` inclusive, degrees.
    Theta { min: f64, max: f64, step: f64 },
    /// Far-face radii, metres.
    RFar(Vec<f64>),
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Sweep::Theta { min, max, step } => {
                let n = ((max - min) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| min + i as f64 * step).collect()
            }
            Sweep::RFar(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub building: BuildingDims,
    pub radio: Option<RadioConfig>,
    pub methods: Vec<Method>,
    pub sweep: Sweep,
    pub seed: u64,
    pub n_samples: usize,
    pub voxel_size: f64,
    /// UAV distance from side A for FOBS; defaults to the AUDA rule.
    pub fobs_standoff: Option<f64>,
    /// UAV height above the roof for ABS; defaults to the AUDA rule on `z_b`.
    pub abs_standoff: Option<f64>,
}

const KEYS: &[&str] = &[
    "building.x_b",
    "building.y_b",
    "building.z_b",
    "radio.f_ghz",
    "radio.snr_min_db",
    "radio.noise_dbm",
    "radio.g_r_dir_db",
    "radio.g_r_omni_db",
    "radio.grf_db",
    "methods",
    "sweep.theta_min",
    "sweep.theta_max",
    "sweep.theta_step",
    "sweep.r_far",
    "seed",
    "mc.samples",
    "voxel_size",
    "fobs.standoff",
    "abs.standoff",
];

const REQUIRED_RADIO: [&str; 4] = ["radio.f_ghz", "radio.snr_min_db", "radio.noise_dbm", "radio.g_r_dir_db"];

struct Entries(BTreeMap<&'static str, (usize, String)>);

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.0.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        let Some((line, v)) = self.raw(key) else { return Ok(None) };
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(Error::Config { line, msg: format!("{key}: expected a number, got {v:?}") }),
        }
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| Error::Missing(format!("missing key {key}")))
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        match self.number(key)? {
            Some(x) if x <= 0.0 => {
                Err(Error::Config { line: self.0[key].0, msg: format!("{key} must be positive, got {x}") })
            }
            other => Ok(other),
        }
    }

    fn list<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<Vec<T>>> {
        let Some((line, v)) = self.raw(key) else { return Ok(None) };
        let mut out = Vec::new();
        for item in v.split(',') {
            let item = item.trim();
            match parse(item) {
                Some(x) => out.push(x),
                None => return Err(Error::Config { line, msg: format!("{key}: bad list item {item:?}") }),
            }
        }
        Ok(Some(out))
    }
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(Error::Config { line, msg: format!("expected key = value, got {content:?}") });
            };
            let (k, v) = (k.trim(), v.trim());
            let Some(key) = KEYS.iter().find(|known| **known == k) else {
                return Err(Error::Config { line, msg: format!("unknown key {k:?}") });
            };
            if v.is_empty() {
                return Err(Error::Config { line, msg: format!("{k}: empty value") });
            }
            if let Some((first, _)) = entries.insert(*key, (line, v.to_string())) {
                return Err(Error::Config { line, msg: format!("{k} already set on line {first}") });
            }
        }
        let e = Entries(entries);

        let building = BuildingDims::new(e.required("building.x_b")?, e.required("building.y_b")?, e.required("building.z_b")?)?;

        let radio = if REQUIRED_RADIO.iter().any(|k| e.raw(k).is_some()) {
            let grf_db = e.number("radio.grf_db")?.unwrap_or(0.0);
            if grf_db < 0.0 {
                return Err(Error::Config { line: e.0["radio.grf_db"].0, msg: "radio.grf_db must be non-negative".into() });
            }
            Some(RadioConfig {
                f_ghz: e.positive("radio.f_ghz")?.ok_or_else(|| Error::Missing("missing key radio.f_ghz".into()))?,
                snr_min_db: e.required("radio.snr_min_db")?,
                noise_dbm: e.required("radio.noise_dbm")?,
                g_r_dir_db: e.required("radio.g_r_dir_db")?,
                g_r_omni_db: e.number("radio.g_r_omni_db")?.unwrap_or(0.0),
                grf_db,
            })
        } else {
            None
        };

        let methods = e.list("methods", |s| s.parse::<Method>().ok())?.unwrap_or_else(|| Method::ALL.to_vec());

        let theta_keys = ["sweep.theta_min", "sweep.theta_max", "sweep.theta_step"];
        let sweep = match (e.list("sweep.r_far", |s| s.parse::<f64>().ok().filter(|x| x.is_finite()))?, theta_keys.iter().any(|k| e.raw(k).is_some())) {
            (Some(_), true) => {
                let line = e.0["sweep.r_far"].0;
                return Err(Error::Config { line, msg: "sweep.r_far cannot be combined with sweep.theta_*".into() });
            }
            (Some(r), false) => {
                if let Some(bad) = r.iter().find(|x| **x <= 0.0) {
                    return Err(Error::Config { line: e.0["sweep.r_far"].0, msg: format!("r_far values must be positive, got {bad}") });
                }
                Sweep::RFar(r)
            }
            (None, true) => {
                let min = e.required("sweep.theta_min")?;
                let max = e.required("sweep.theta_max")?;
                let step = e.required("sweep.theta_step")?;
                let line = e.0["sweep.theta_step"].0;
                if step <= 0.0 {
                    return Err(Error::Config { line, msg: format!("sweep.theta_step must be positive, got {step}") });
                }
                if !(min > 0.0 && max >= min && max < 180.0) {
                    return Err(Error::Config { line, msg: format!("need 0 < theta_min <= theta_max < 180, got {min}..{max}") });
                }
                Sweep::Theta { min, max, step }
            }
            (None, false) => return Err(Error::Missing("missing sweep: give sweep.theta_min/max/step or sweep.r_far".into())),
        };

        let seed = match e.raw("seed") {
            None => return Err(Error::Missing("missing key seed".into())),
            Some((line, v)) => v.parse::<u64>().map_err(|_| Error::Config { line, msg: format!("seed: expected a non-negative integer, got {v:?}") })?,
        };

        let n_samples = match e.raw("mc.samples") {
            None => DEFAULT_SAMPLES,
            Some((line, v)) => match v.parse::<f64>() {
                Ok(x) if x.fract() == 0.0 && x >= MIN_SAMPLES as f64 && x <= 1e12 => x as usize,
                _ => return Err(Error::Config { line, msg: format!("mc.samples: expected an integer >= {MIN_SAMPLES}, got {v:?}") }),
            },
        };

        let voxel_size = e.positive("voxel_size")?.unwrap_or(DEFAULT_VOXEL_SIZE);
        Ok(Scenario {
            building,
            radio,
            methods,
            sweep,
            seed,
            n_samples,
            voxel_size,
            fobs_standoff: e.positive("fobs.standoff")?,
            abs_standoff: e.positive("abs.standoff")?,
        })
    }

    /// Standoff of a packed method's UAVs from their target side.
    pub fn standoff(&self, method: Method) -> Result<f64> {
        match method {
            Method::Fobs => self.fobs_standoff.map_or_else(|| auda_offset(self.building.x_b), Ok),
            Method::Abs => self.abs_standoff.map_or_else(|| auda_offset(self.building.z_b), Ok),
            Method::Auda => auda_offset(self.building.x_b),
        }
    }

    pub fn radio(&self) -> Result<RadioConfig> {
        self.radio.ok_or_else(|| Error::Missing(format!("missing radio parameters ({})", REQUIRED_RADIO.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
# reference building
building.x_b = 30
building.y_b = 40
building.z_b = 60   # tall
radio.f_ghz = 2
radio.snr_min_db = 25
radio.noise_dbm = -120
radio.g_r_dir_db = 14.4
methods = FOBS, AUDA
sweep.theta_min = 10
sweep.theta_max = 40
sweep.theta_step = 2
seed = 7
";

    #[test]
    fn parses_reference() {
        let s = Scenario::parse(BASE).unwrap();
        assert_eq!(s.building, BuildingDims::new(30.0, 40.0, 60.0).unwrap());
        assert_eq!(s.methods, vec![Method::Fobs, Method::Auda]);
        assert_eq!(s.seed, 7);
        assert_eq!(s.n_samples, DEFAULT_SAMPLES);
        assert_eq!(s.sweep.values().len(), 16);
        assert_eq!(*s.sweep.values().last().unwrap(), 40.0);
        let r = s.radio().unwrap();
        assert_eq!((r.f_ghz, r.grf_db), (2.0, 0.0));
        assert!((s.standoff(Method::Fobs).unwrap() - 30.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = BASE.replace("seed = 7", "seed = 7\nbuilding.w = 3");
        match Scenario::parse(&text) {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 14);
                assert!(msg.contains("building.w"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_values_report_line() {
        let text = BASE.replace("radio.f_ghz = 2", "radio.f_ghz = two");
        assert!(matches!(Scenario::parse(&text), Err(Error::Config { line: 5, .. })));
        let text = BASE.replace("sweep.theta_step = 2", "sweep.theta_step = 0");
        assert!(matches!(Scenario::parse(&text), Err(Error::Config { line: 12, .. })));
        let text = BASE.replace("methods = FOBS, AUDA", "methods = FOBS, XYZ");
        assert!(matches!(Scenario::parse(&text), Err(Error::Config { line: 9, .. })));
        let text = format!("{BASE}seed = 8\n");
        assert!(matches!(Scenario::parse(&text), Err(Error::Config { line: 14, .. })));
        assert!(matches!(Scenario::parse("just words"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn missing_seed_and_sweep() {
        assert!(matches!(Scenario::parse(&BASE.replace("seed = 7", "")), Err(Error::Missing(_))));
        let text = BASE.replace("sweep.theta_min = 10\n", "").replace("sweep.theta_max = 40\n", "").replace("sweep.theta_step = 2\n", "");
        assert!(matches!(Scenario::parse(&text), Err(Error::Missing(_))));
        let text = format!("{BASE}sweep.r_far = 5, 10\n");
        assert!(matches!(Scenario::parse(&text), Err(Error::Config { .. })));
    }

    #[test]
    fn radio_optional_but_all_or_nothing() {
        let text: String = BASE.lines().filter(|l| !l.starts_with("radio.")).map(|l| format!("{l}\n")).collect();
        let s = Scenario::parse(&text).unwrap();
        assert!(matches!(s.radio(), Err(Error::Missing(_))));
        let text = BASE.replace("radio.noise_dbm = -120\n", "");
        assert!(matches!(Scenario::parse(&text), Err(Error::Missing(_))));
    }

    #[test]
    fn r_far_sweep_and_options() {
        let text = "building.x_b = 30\nbuilding.y_b = 40\nbuilding.z_b = 60\nsweep.r_far = 5, 10\nseed = 1\nmc.samples = 20000\nvoxel_size = 1\nfobs.standoff = 12.5\n";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.sweep, Sweep::RFar(vec![5.0, 10.0]));
        assert_eq!(s.n_samples, 20_000);
        assert_eq!(s.voxel_size, 1.0);
        assert_eq!(s.standoff(Method::Fobs).unwrap(), 12.5);
        assert_eq!(s.methods, Method::ALL.to_vec());
        assert!(Scenario::parse(&text.replace("mc.samples = 20000", "mc.samples = 10")).is_err());
    }
}
