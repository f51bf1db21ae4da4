//! Declarative scenario description shared by the config file and the
//! command-line flags, plus resolution into library types.
//!
//! Values are human units: GHz, dBm, meters, degrees. Precedence is
//! flag > config file > built-in default.

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;

use ris_emf::{
    dbvpm_to_vpm, limit_lookup, Authority, EirpPreset, GainPattern, LinkBudget, Mode, Point3,
    RisArray, Scenario,
};

/// Flat optional view of every tunable; unknown config keys are rejected.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub freq_ghz: Option<f64>,
    pub n: Option<usize>,
    pub spacing_frac: Option<f64>,
    pub h_ris: Option<f64>,
    pub h_user: Option<f64>,
    pub d_br: Option<f64>,
    pub pmax_dbm: Option<f64>,
    pub eirp: Option<String>,
    pub mode: Option<String>,
    pub target: Option<[f64; 3]>,
    pub area: Option<f64>,
    pub res: Option<f64>,
    pub pattern_exp: Option<f64>,
    pub azimuth_pattern: Option<bool>,
    pub authority: Option<String>,
    pub limit_vpm: Option<f64>,
    pub limit_dbvpm: Option<f64>,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub samples_per_decade: Option<usize>,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn from_file(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("config: cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("config: {}", path.display()))
    }

    /// Overlay `flags` on top of `self`; present flag values win.
    pub fn overridden_by(mut self, flags: ScenarioConfig) -> Self {
        // A power source given on the command line replaces both config forms.
        if flags.pmax_dbm.is_some() || flags.eirp.is_some() {
            self.pmax_dbm = None;
            self.eirp = None;
        }
        // Same for the limit specification; an explicit numeric limit on the
        // command line also displaces a config authority lookup and vice
        // versa through the resolution order in `limit_vpm`.
        if flags.limit_vpm.is_some() || flags.limit_dbvpm.is_some() || flags.authority.is_some() {
            self.limit_vpm = None;
            self.limit_dbvpm = None;
        }
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if flags.$field.is_some() { self.$field = flags.$field; })*
            };
        }
        take!(
            freq_ghz,
            n,
            spacing_frac,
            h_ris,
            h_user,
            d_br,
            pmax_dbm,
            eirp,
            mode,
            target,
            area,
            res,
            pattern_exp,
            azimuth_pattern,
            authority,
            limit_vpm,
            limit_dbvpm,
            y_min,
            y_max,
            samples_per_decade,
            h_min,
            h_max,
            trials,
            seed
        );
        self
    }

    fn require<T: Copy>(value: Option<T>, field: &str) -> anyhow::Result<T> {
        value.ok_or_else(|| anyhow!("missing required field '{field}'"))
    }

    pub fn frequency_hz(&self) -> anyhow::Result<f64> {
        Ok(Self::require(self.freq_ghz, "freq_ghz")? * 1e9)
    }

    pub fn authority(&self) -> anyhow::Result<Authority> {
        match &self.authority {
            Some(a) => Ok(a.parse::<Authority>()?),
            None => bail!("missing required field 'authority'"),
        }
    }

    /// EIRP in watts from `pmax_dbm` or a preset; exactly one must be given.
    pub fn p_max_watts(&self) -> anyhow::Result<f64> {
        match (self.pmax_dbm, &self.eirp) {
            (Some(_), Some(_)) => bail!("fields 'pmax_dbm' and 'eirp' are mutually exclusive"),
            (Some(dbm), None) => Ok(ris_emf::dbm_to_watts(dbm)),
            (None, Some(name)) => Ok(name.parse::<EirpPreset>()?.watts()),
            (None, None) => bail!("missing power: set 'pmax_dbm' or 'eirp'"),
        }
    }

    /// Exposure limit in V/m from `limit_vpm`, `limit_dbvpm` or the
    /// authority's table value at the scenario frequency.
    pub fn limit_vpm(&self) -> anyhow::Result<f64> {
        let sources = self.limit_vpm.is_some() as u8 + self.limit_dbvpm.is_some() as u8;
        if sources > 1 {
            bail!("fields 'limit_vpm' and 'limit_dbvpm' are mutually exclusive");
        }
        if let Some(v) = self.limit_vpm {
            return Ok(v);
        }
        if let Some(db) = self.limit_dbvpm {
            return Ok(dbvpm_to_vpm(db));
        }
        if self.authority.is_some() {
            return Ok(limit_lookup(self.authority()?, self.frequency_hz()?)?);
        }
        bail!("missing limit: set 'limit_vpm', 'limit_dbvpm' or 'authority'")
    }

    pub fn pattern(&self) -> anyhow::Result<GainPattern> {
        Ok(GainPattern::new(
            self.pattern_exp.unwrap_or(3.0),
            self.azimuth_pattern.unwrap_or(false),
        )?)
    }

    pub fn mode(&self) -> anyhow::Result<Mode> {
        match self
            .mode
            .as_deref()
            .unwrap_or("ro")
            .to_ascii_lowercase()
            .as_str()
        {
            "ro" => Ok(Mode::Ro),
            "bo" => {
                let t = self
                    .target
                    .ok_or_else(|| anyhow!("mode 'bo' requires field 'target' (x,y,h)"))?;
                Ok(Mode::Bo {
                    target: Point3::new(t[0], t[1], t[2])?,
                })
            }
            other => bail!("field 'mode': expected 'ro' or 'bo', got '{other}'"),
        }
    }

    /// Assemble the full scenario; every field is validated by the library
    /// constructors.
    pub fn scenario(&self) -> anyhow::Result<Scenario> {
        let frequency = self.frequency_hz()?;
        let link = LinkBudget::new(
            frequency,
            self.p_max_watts()?,
            Self::require(self.d_br, "d_br")?,
        )?;
        let spacing = self.spacing_frac.unwrap_or(0.5) * link.wavelength();
        let array = RisArray::new(
            Self::require(self.n, "n")?,
            spacing,
            Self::require(self.h_ris, "h_ris")?,
        )?;
        Ok(Scenario::new(
            link,
            array,
            self.pattern()?,
            self.mode()?,
            self.h_user.unwrap_or(1.5),
        )?)
    }

    pub fn area(&self) -> f64 {
        self.area.unwrap_or(10.0)
    }

    pub fn res(&self) -> f64 {
        self.res.unwrap_or(0.05)
    }

    pub fn y_min(&self) -> f64 {
        self.y_min.unwrap_or(1e-3)
    }

    pub fn y_max(&self) -> f64 {
        self.y_max.unwrap_or(20.0)
    }

    pub fn samples_per_decade(&self) -> usize {
        self.samples_per_decade.unwrap_or(200)
    }

    pub fn height_range(&self, user_height: f64) -> (f64, f64) {
        (
            self.h_min.unwrap_or(user_height),
            self.h_max.unwrap_or(10.0),
        )
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(100)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// Parse a "x,y,h" flag value.
pub fn parse_target(raw: &str) -> anyhow::Result<[f64; 3]> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("field 'target': expected \"x,y,h\", got '{raw}'");
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .parse::<f64>()
            .map_err(|_| anyhow!("field 'target': '{part}' is not a number"))?;
    }
    Ok(out)
}
