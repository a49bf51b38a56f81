//! Parameter sweeps and CSV serialization of their results.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::config::ScenarioConfig;
use crate::engine::{monte_carlo, monte_carlo_arms, Arm, Policy, PolicySummary};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "axis,axis_value,policy,mean_avg_sum_aoi,std,ci95_lo,ci95_hi,success_rate,runs,seed";
pub const PER_DEVICE_HEADER: &str = "axis,axis_value,policy,device,role,mean_avg_aoi";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    LElements,
    GammaThDb,
    PMaxDbm,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::LElements => "l_elements",
            SweepAxis::GammaThDb => "gamma_th_db",
            SweepAxis::PMaxDbm => "p_max_dbm",
        }
    }

    /// Value of this axis in `config`.
    pub fn value_of(self, config: &ScenarioConfig) -> f64 {
        match self {
            SweepAxis::LElements => config.l_elements as f64,
            SweepAxis::GammaThDb => config.gamma_th_db,
            SweepAxis::PMaxDbm => config.p_max_dbm,
        }
    }

    /// Copy of `config` with this axis set to `value`.
    pub fn apply(self, config: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut c = config.clone();
        match self {
            SweepAxis::LElements => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(Error::Range {
                        field: "l_elements",
                        reason: format!("sweep value {value} is not a positive integer"),
                    });
                }
                c.l_elements = value as usize;
            }
            SweepAxis::GammaThDb => c.gamma_th_db = value,
            SweepAxis::PMaxDbm => c.p_max_dbm = value,
        }
        c.validate()?;
        Ok(c)
    }

    /// Axes that only change link parameters, so phases can be shared.
    fn link_only(self) -> bool {
        !matches!(self, SweepAxis::LElements)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "l_elements" => Ok(SweepAxis::LElements),
            "gamma_th_db" => Ok(SweepAxis::GammaThDb),
            "p_max_dbm" => Ok(SweepAxis::PMaxDbm),
            other => Err(Error::Parse(format!(
                "unknown sweep axis '{other}'; expected l_elements, gamma_th_db or p_max_dbm"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub axis: String,
    pub axis_value: f64,
    pub policy: String,
    pub mean_avg_sum_aoi: f64,
    pub std: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub success_rate: f64,
    pub runs: usize,
    pub seed: u64,
    /// Strong devices first, then weak devices. Not part of the main CSV.
    pub per_device: Vec<f64>,
}

impl ResultRow {
    pub fn from_summary(axis: SweepAxis, axis_value: f64, s: &PolicySummary) -> Self {
        Self {
            axis: axis.as_str().to_string(),
            axis_value,
            policy: s.policy.name(),
            mean_avg_sum_aoi: s.stats.mean,
            std: s.stats.std,
            ci95_lo: s.stats.ci95_lo,
            ci95_hi: s.stats.ci95_hi,
            success_rate: s.success_rate,
            runs: s.runs,
            seed: s.base_seed,
            per_device: s.per_device_mean.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Rows ordered by axis value, then policy name.
    pub fn sorted_rows(&self) -> Vec<&ResultRow> {
        let mut rows: Vec<&ResultRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| {
            a.axis_value
                .total_cmp(&b.axis_value)
                .then_with(|| a.policy.cmp(&b.policy))
        });
        rows
    }

    pub fn find(&self, axis_value: f64, policy: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.axis_value == axis_value && r.policy == policy)
    }
}

/// Monte Carlo (`config.mc_runs` runs from `config.seed`) at every axis
/// value for every policy.
pub fn run_sweep(config: &ScenarioConfig, axis: SweepAxis, values: &[f64], policies: &[Policy]) -> Result<ResultTable> {
    if values.is_empty() {
        return Err(Error::Domain("sweep needs at least one value".into()));
    }
    if policies.is_empty() {
        return Err(Error::Domain("sweep needs at least one policy".into()));
    }
    config.validate()?;
    let configs = values
        .iter()
        .map(|v| axis.apply(config, *v))
        .collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::default();
    if axis.link_only() {
        let arms: Vec<Arm> = configs
            .iter()
            .flat_map(|c| policies.iter().map(move |p| Arm::new(*p, c)))
            .collect();
        let summaries = monte_carlo_arms(config, &arms, config.mc_runs, config.seed)?;
        for (k, s) in summaries.iter().enumerate() {
            table
                .rows
                .push(ResultRow::from_summary(axis, values[k / policies.len()], s));
        }
    } else {
        for (c, v) in configs.iter().zip(values) {
            for s in monte_carlo(c, policies, c.mc_runs, c.seed)? {
                table.rows.push(ResultRow::from_summary(axis, *v, &s));
            }
        }
    }
    Ok(table)
}

/// A single configuration, reported as an `l_elements` row per policy.
pub fn run_single(config: &ScenarioConfig, policies: &[Policy]) -> Result<ResultTable> {
    let axis = SweepAxis::LElements;
    run_sweep(config, axis, &[axis.value_of(config)], policies)
}

/// C `%.9g` formatting.
pub fn format_g9(x: f64) -> String {
    const PRECISION: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..PRECISION).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn to_csv(table: &ResultTable) -> String {
    let mut out = String::with_capacity(64 * (table.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in table.sorted_rows() {
        let fields = [
            r.axis.clone(),
            format_g9(r.axis_value),
            r.policy.clone(),
            format_g9(r.mean_avg_sum_aoi),
            format_g9(r.std),
            format_g9(r.ci95_lo),
            format_g9(r.ci95_hi),
            format_g9(r.success_rate),
            r.runs.to_string(),
            r.seed.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// One row per device: strong devices `s0..`, then weak devices `w0..`.
pub fn to_per_device_csv(table: &ResultTable) -> String {
    let mut out = String::new();
    out.push_str(PER_DEVICE_HEADER);
    out.push('\n');
    for r in table.sorted_rows() {
        let half = r.per_device.len() / 2;
        for (d, a) in r.per_device.iter().enumerate() {
            let (role, idx) = if d < half { ("strong", d) } else { ("weak", d - half) };
            out.push_str(&format!(
                "{},{},{},{}{idx},{role},{}\n",
                r.axis,
                format_g9(r.axis_value),
                r.policy,
                &role[..1],
                format_g9(*a)
            ));
        }
    }
    out
}

pub fn write_results(table: &ResultTable, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_csv(table))?;
    Ok(())
}

pub fn write_per_device(table: &ResultTable, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_per_device_csv(table))?;
    Ok(())
}

/// Parses a results CSV. The header must match [`CSV_HEADER`] exactly.
pub fn parse_results(text: &str) -> Result<ResultTable> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => return Err(Error::Parse(format!("unexpected header '{h}'"))),
        None => return Err(Error::Parse("empty results file".into())),
    }
    let mut table = ResultTable::default();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(Error::Parse(format!("line {line_no}: expected 10 fields, found {}", f.len())));
        }
        let num = |k: usize| -> Result<f64> {
            f[k].parse()
                .map_err(|_| Error::Parse(format!("line {line_no}: bad number '{}'", f[k])))
        };
        let int = |k: usize| -> Result<u64> {
            f[k].parse()
                .map_err(|_| Error::Parse(format!("line {line_no}: bad integer '{}'", f[k])))
        };
        table.rows.push(ResultRow {
            axis: f[0].to_string(),
            axis_value: num(1)?,
            policy: f[2].to_string(),
            mean_avg_sum_aoi: num(3)?,
            std: num(4)?,
            ci95_lo: num(5)?,
            ci95_hi: num(6)?,
            success_rate: num(7)?,
            runs: int(8)? as usize,
            seed: int(9)?,
            per_device: vec![],
        });
    }
    Ok(table)
}
