//! Slotted AoI simulation, baseline policies and Monte Carlo aggregation.
//!
//! Per slot: choose RIS phases, price every strong/weak pair, pair the
//! devices, allocate power inside each pair, then update all ages.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::channel::{place_devices, sample_slot, ChannelSlot, Topology};
use crate::clustering::{build_cost_matrix, hungarian, price_pair};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::phase::{optimize_phases, random_phases};
use crate::power::{LinkParams, PowerDecision, PowerMode};
use crate::rng::{stream, SimRng, Stream};

/// Ages of the strong and the weak devices, in slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AoIState {
    pub strong: Vec<u64>,
    pub weak: Vec<u64>,
    pub t: u64,
}

impl AoIState {
    /// All ages zero at `t = 0`.
    pub fn new(clusters: usize) -> Self {
        Self {
            strong: vec![0; clusters],
            weak: vec![0; clusters],
            t: 0,
        }
    }

    pub fn clusters(&self) -> usize {
        self.strong.len()
    }

    pub fn total(&self) -> u64 {
        self.strong.iter().chain(&self.weak).sum()
    }

    /// Strong devices first, then weak devices.
    pub fn ages(&self) -> impl Iterator<Item = u64> + '_ {
        self.strong.iter().chain(&self.weak).copied()
    }
}

pub fn step_age(prev: u64, success: bool) -> u64 {
    if success {
        1
    } else {
        prev + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseMode {
    Sdr,
    Random,
    /// No RIS: weak devices only see their direct link.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusteringMode {
    Hungarian,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Policy {
    pub phase_mode: PhaseMode,
    pub clustering_mode: ClusteringMode,
    pub power_mode: PowerMode,
}

const PRESETS: [(&str, Policy); 5] = [
    ("proposed", Policy::new(PhaseMode::Sdr, ClusteringMode::Hungarian, PowerMode::Feasibility)),
    (
        "opt-cluster-random-ris",
        Policy::new(PhaseMode::Random, ClusteringMode::Hungarian, PowerMode::Feasibility),
    ),
    (
        "random-cluster-opt-ris",
        Policy::new(PhaseMode::Sdr, ClusteringMode::Random, PowerMode::Feasibility),
    ),
    ("random-random", Policy::new(PhaseMode::Random, ClusteringMode::Random, PowerMode::Feasibility)),
    ("no-ris", Policy::new(PhaseMode::None, ClusteringMode::Hungarian, PowerMode::Feasibility)),
];

impl Policy {
    pub const fn new(phase_mode: PhaseMode, clustering_mode: ClusteringMode, power_mode: PowerMode) -> Self {
        Self {
            phase_mode,
            clustering_mode,
            power_mode,
        }
    }

    pub const PROPOSED: Policy = PRESETS[0].1;
    pub const OPT_CLUSTER_RANDOM_RIS: Policy = PRESETS[1].1;
    pub const RANDOM_CLUSTER_OPT_RIS: Policy = PRESETS[2].1;
    pub const RANDOM_RANDOM: Policy = PRESETS[3].1;
    pub const NO_RIS: Policy = PRESETS[4].1;

    pub fn presets() -> impl Iterator<Item = (&'static str, Policy)> {
        PRESETS.into_iter()
    }

    /// Preset name, or `phase:clustering:power` for other combinations.
    pub fn name(&self) -> String {
        if let Some((n, _)) = PRESETS.iter().find(|(_, p)| p == self) {
            return (*n).to_string();
        }
        let phase = match self.phase_mode {
            PhaseMode::Sdr => "sdr",
            PhaseMode::Random => "random",
            PhaseMode::None => "none",
        };
        let clustering = match self.clustering_mode {
            ClusteringMode::Hungarian => "hungarian",
            ClusteringMode::Random => "random",
        };
        let power = match self.power_mode {
            PowerMode::Feasibility => "feasibility",
            PowerMode::Max => "max",
        };
        format!("{phase}:{clustering}:{power}")
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((_, p)) = PRESETS.iter().find(|(n, _)| *n == s) {
            return Ok(*p);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::Parse(format!(
                "unknown policy '{s}'; expected one of {} or phase:clustering:power",
                names.join(", ")
            ))
        };
        let [phase, clustering, power] = parts[..] else {
            return Err(bad());
        };
        let phase_mode = match phase {
            "sdr" => PhaseMode::Sdr,
            "random" => PhaseMode::Random,
            "none" => PhaseMode::None,
            _ => return Err(bad()),
        };
        let clustering_mode = match clustering {
            "hungarian" => ClusteringMode::Hungarian,
            "random" => ClusteringMode::Random,
            _ => return Err(bad()),
        };
        let power_mode = match power {
            "feasibility" => PowerMode::Feasibility,
            "max" => PowerMode::Max,
            _ => return Err(bad()),
        };
        Ok(Policy::new(phase_mode, clustering_mode, power_mode))
    }
}

/// RIS configuration chosen for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotPhases {
    /// `None` when the RIS is absent.
    pub theta: Option<Vec<f64>>,
    /// Effective gain of every weak device under `theta`.
    pub weak_gains: Vec<f64>,
    pub sdr_bound: Option<f64>,
    /// The relaxation failed and random phases were used instead.
    pub fallback: bool,
}

impl SlotPhases {
    pub fn min_gain(&self) -> f64 {
        self.weak_gains.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn gains_for(slot: &ChannelSlot, theta: &[f64]) -> Result<Vec<f64>> {
    (0..slot.clusters()).map(|w| slot.weak_gain(w, theta)).collect()
}

/// Phase step of the slot pipeline. A relaxation failure falls back to
/// uniform random phases and sets the `fallback` flag.
pub fn choose_phases(slot: &ChannelSlot, mode: PhaseMode, config: &ScenarioConfig, rng: &mut SimRng) -> Result<SlotPhases> {
    let l = slot.l_elements();
    match mode {
        PhaseMode::None => Ok(SlotPhases {
            theta: None,
            weak_gains: (0..slot.clusters()).map(|w| slot.direct_gain(w)).collect(),
            sdr_bound: None,
            fallback: false,
        }),
        PhaseMode::Random => {
            let theta = random_phases(l, rng);
            Ok(SlotPhases {
                weak_gains: gains_for(slot, &theta)?,
                theta: Some(theta),
                sdr_bound: None,
                fallback: false,
            })
        }
        PhaseMode::Sdr => match optimize_phases(slot, config.gr_samples, config.sdr_tolerance, rng) {
            Ok(sol) => Ok(SlotPhases {
                weak_gains: gains_for(slot, &sol.theta)?,
                theta: Some(sol.theta),
                sdr_bound: Some(sol.sdr_bound),
                fallback: false,
            }),
            Err(Error::SolverFailure { .. }) => {
                let theta = random_phases(l, rng);
                Ok(SlotPhases {
                    weak_gains: gains_for(slot, &theta)?,
                    theta: Some(theta),
                    sdr_bound: None,
                    fallback: true,
                })
            }
            Err(e) => Err(e),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub slot_index: usize,
    /// `pairing[s]` is the weak partner of strong device `s`.
    pub pairing: Vec<usize>,
    /// One decision per cluster, indexed by strong device.
    pub decisions: Vec<PowerDecision>,
    pub successes: usize,
    pub sdr_bound: Option<f64>,
    pub achieved_min_gain: f64,
    pub fallback: bool,
}

/// Clustering, power allocation and age update for one slot whose phases
/// are already fixed.
pub fn apply_slot(
    state: &AoIState,
    slot: &ChannelSlot,
    phases: &SlotPhases,
    policy: &Policy,
    link: &LinkParams,
    rng: &mut SimRng,
) -> Result<(AoIState, SlotRecord)> {
    let n = state.clusters();
    crate::error::check_len(n, slot.clusters())?;
    let pairing = match policy.clustering_mode {
        ClusteringMode::Hungarian => {
            let cost = build_cost_matrix(state, slot, &phases.weak_gains, link, policy.power_mode)?;
            hungarian(&cost)?.pairing
        }
        ClusteringMode::Random => {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        }
    };

    let mut next = AoIState {
        strong: vec![0; n],
        weak: vec![0; n],
        t: state.t + 1,
    };
    let mut decisions = Vec::with_capacity(n);
    let mut successes = 0;
    for (s, &w) in pairing.iter().enumerate() {
        let (d, _) = price_pair(state, slot, &phases.weak_gains, link, policy.power_mode, s, w);
        next.strong[s] = step_age(state.strong[s], d.strong_success);
        next.weak[w] = step_age(state.weak[w], d.weak_success);
        successes += d.strong_success as usize + d.weak_success as usize;
        decisions.push(d);
    }
    let record = SlotRecord {
        slot_index: slot.slot_index,
        pairing,
        decisions,
        successes,
        sdr_bound: phases.sdr_bound,
        achieved_min_gain: phases.min_gain(),
        fallback: phases.fallback,
    };
    Ok((next, record))
}

/// Random draws a policy consumes within one episode.
pub struct PolicyStreams {
    pub phase: SimRng,
    pub clustering: SimRng,
}

impl PolicyStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            phase: stream(seed, Stream::Phase),
            clustering: stream(seed, Stream::Clustering),
        }
    }
}

/// Full slot pipeline for a single policy.
pub fn run_slot(
    state: &AoIState,
    slot: &ChannelSlot,
    policy: &Policy,
    config: &ScenarioConfig,
    streams: &mut PolicyStreams,
) -> Result<(AoIState, SlotRecord)> {
    let phases = choose_phases(slot, policy.phase_mode, config, &mut streams.phase)?;
    apply_slot(state, slot, &phases, policy, &LinkParams::from_config(config), &mut streams.clustering)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    /// Time average of the mean age over all `2I` devices.
    pub avg_sum_aoi: f64,
    /// Strong devices first, then weak devices.
    pub per_device_avg_aoi: Vec<f64>,
    /// Delivered packets over `2I * T` transmission opportunities.
    pub success_rate: f64,
    /// `None` for slots without a relaxation.
    pub sdr_bound_trace: Vec<Option<f64>>,
    pub achieved_gain_trace: Vec<f64>,
    pub fallbacks: usize,
    pub seed: u64,
}

struct Accumulator {
    total: u64,
    per_device: Vec<u64>,
    successes: u64,
    sdr: Vec<Option<f64>>,
    gains: Vec<f64>,
    fallbacks: usize,
}

impl Accumulator {
    fn new(devices: usize, t: usize) -> Self {
        Self {
            total: 0,
            per_device: vec![0; devices],
            successes: 0,
            sdr: Vec::with_capacity(t),
            gains: Vec::with_capacity(t),
            fallbacks: 0,
        }
    }

    fn record(&mut self, state: &AoIState, rec: &SlotRecord) {
        self.total += state.total();
        for (acc, a) in self.per_device.iter_mut().zip(state.ages()) {
            *acc += a;
        }
        self.successes += rec.successes as u64;
        self.sdr.push(rec.sdr_bound);
        self.gains.push(rec.achieved_min_gain);
        self.fallbacks += rec.fallback as usize;
    }

    fn finish(self, t: usize, seed: u64) -> MetricsRecord {
        let devices = self.per_device.len();
        let opportunities = (devices * t) as f64;
        MetricsRecord {
            avg_sum_aoi: self.total as f64 / opportunities,
            per_device_avg_aoi: self.per_device.iter().map(|a| *a as f64 / t as f64).collect(),
            success_rate: self.successes as f64 / opportunities,
            sdr_bound_trace: self.sdr,
            achieved_gain_trace: self.gains,
            fallbacks: self.fallbacks,
            seed,
        }
    }
}

/// A policy evaluated under particular link parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arm {
    pub policy: Policy,
    pub link: LinkParams,
}

impl Arm {
    pub fn new(policy: Policy, config: &ScenarioConfig) -> Self {
        Self {
            policy,
            link: LinkParams::from_config(config),
        }
    }
}

/// Runs several arms on the same seed in lockstep.
///
/// Topology, channels and phases do not depend on the link parameters, so
/// each slot's channels are drawn once and phases are computed once per
/// distinct phase mode. The record of each arm is identical to running its
/// policy alone with [`run_episode`] on a config carrying the arm's link
/// parameters.
pub fn run_arms(config: &ScenarioConfig, arms: &[Arm], seed: u64) -> Result<Vec<MetricsRecord>> {
    config.validate()?;
    let topology: Topology = place_devices(config, &mut stream(seed, Stream::Topology))?;
    let fading = config.fading_params();
    let n = config.i_clusters;
    let t_slots = config.t_slots;

    let mut modes: Vec<PhaseMode> = arms.iter().map(|a| a.policy.phase_mode).collect();
    modes.sort();
    modes.dedup();
    let mut phase_rngs: Vec<SimRng> = modes.iter().map(|_| stream(seed, Stream::Phase)).collect();

    let mut channel_rng = stream(seed, Stream::Channel);
    let mut states: Vec<AoIState> = arms.iter().map(|_| AoIState::new(n)).collect();
    let mut cluster_rngs: Vec<SimRng> = arms.iter().map(|_| stream(seed, Stream::Clustering)).collect();
    let mut accs: Vec<Accumulator> = arms.iter().map(|_| Accumulator::new(2 * n, t_slots)).collect();

    for t in 0..t_slots {
        let slot = sample_slot(&topology, &fading, t, &mut channel_rng)?;
        let phases = modes
            .iter()
            .zip(phase_rngs.iter_mut())
            .map(|(m, rng)| choose_phases(&slot, *m, config, rng))
            .collect::<Result<Vec<_>>>()?;
        for (k, arm) in arms.iter().enumerate() {
            let idx = modes.binary_search(&arm.policy.phase_mode).expect("mode present");
            let (next, rec) = apply_slot(&states[k], &slot, &phases[idx], &arm.policy, &arm.link, &mut cluster_rngs[k])?;
            accs[k].record(&next, &rec);
            states[k] = next;
        }
    }
    Ok(accs.into_iter().map(|a| a.finish(t_slots, seed)).collect())
}

/// [`run_arms`] with every policy under the config's own link parameters.
pub fn run_paired_episode(config: &ScenarioConfig, policies: &[Policy], seed: u64) -> Result<Vec<MetricsRecord>> {
    let arms: Vec<Arm> = policies.iter().map(|p| Arm::new(*p, config)).collect();
    run_arms(config, &arms, seed)
}

/// `T` slots from a fresh topology with all ages starting at zero.
pub fn run_episode(config: &ScenarioConfig, policy: &Policy, seed: u64) -> Result<MetricsRecord> {
    Ok(run_paired_episode(config, std::slice::from_ref(policy), seed)?.remove(0))
}

/// Mean, sample standard deviation and 95% normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub std: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub n: usize,
}

pub const Z95: f64 = 1.959963984540054;

impl SampleStats {
    /// A single sample has zero spread and a zero-width interval.
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n == 0 {
            return Err(Error::Domain("no samples".into()));
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let half = Z95 * std / (n as f64).sqrt();
        Ok(Self {
            mean,
            std,
            ci95_lo: mean - half,
            ci95_hi: mean + half,
            n,
        })
    }

    /// Stats of the per-run differences `a[r] - b[r]`.
    pub fn paired_difference(a: &[f64], b: &[f64]) -> Result<Self> {
        crate::error::check_len(a.len(), b.len())?;
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self::from_samples(&d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySummary {
    pub policy: Policy,
    pub link: LinkParams,
    pub stats: SampleStats,
    pub success_rate: f64,
    pub per_device_mean: Vec<f64>,
    /// Per-run `avg_sum_aoi`, in run order.
    pub samples: Vec<f64>,
    pub fallbacks: usize,
    pub runs: usize,
    pub base_seed: u64,
}

/// Runs `runs` paired episodes with seeds `base_seed + r` in parallel and
/// aggregates each policy.
pub fn monte_carlo(config: &ScenarioConfig, policies: &[Policy], runs: usize, base_seed: u64) -> Result<Vec<PolicySummary>> {
    let arms: Vec<Arm> = policies.iter().map(|p| Arm::new(*p, config)).collect();
    monte_carlo_arms(config, &arms, runs, base_seed)
}

/// [`monte_carlo`] over arbitrary arms sharing channels and phases.
pub fn monte_carlo_arms(config: &ScenarioConfig, arms: &[Arm], runs: usize, base_seed: u64) -> Result<Vec<PolicySummary>> {
    if runs == 0 {
        return Err(Error::Domain("runs must be >= 1".into()));
    }
    config.validate()?;
    let per_run: Vec<Vec<MetricsRecord>> = (0..runs)
        .into_par_iter()
        .map(|r| run_arms(config, arms, base_seed.wrapping_add(r as u64)))
        .collect::<Result<_>>()?;

    arms.iter()
        .enumerate()
        .map(|(k, arm)| {
            let samples: Vec<f64> = per_run.iter().map(|m| m[k].avg_sum_aoi).collect();
            let devices = per_run[0][k].per_device_avg_aoi.len();
            let mut per_device_mean = vec![0.0; devices];
            for m in &per_run {
                for (acc, a) in per_device_mean.iter_mut().zip(&m[k].per_device_avg_aoi) {
                    *acc += a;
                }
            }
            per_device_mean.iter_mut().for_each(|a| *a /= runs as f64);
            Ok(PolicySummary {
                policy: arm.policy,
                link: arm.link,
                stats: SampleStats::from_samples(&samples)?,
                success_rate: per_run.iter().map(|m| m[k].success_rate).sum::<f64>() / runs as f64,
                per_device_mean,
                samples,
                fallbacks: per_run.iter().map(|m| m[k].fallbacks).sum(),
                runs,
                base_seed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(i: usize, l: usize, t: usize) -> ScenarioConfig {
        ScenarioConfig {
            i_clusters: i,
            l_elements: l,
            t_slots: t,
            gr_samples: 20,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn step_age_examples() {
        assert_eq!(step_age(3, false), 4);
        assert_eq!(step_age(7, true), 1);
        assert_eq!(step_age(0, false), 1);
    }

    #[test]
    fn policy_names_round_trip() {
        for (name, p) in Policy::presets() {
            assert_eq!(p.name(), name);
            assert_eq!(name.parse::<Policy>().unwrap(), p);
        }
        let custom: Policy = "sdr:hungarian:max".parse().unwrap();
        assert_eq!(custom.power_mode, PowerMode::Max);
        assert_eq!(custom.name(), "sdr:hungarian:max");
        assert!("fancy".parse::<Policy>().is_err());
        assert!("sdr:hungarian".parse::<Policy>().is_err());
    }

    #[test]
    fn hopeless_links_give_arithmetic_series() {
        let mut c = small(3, 4, 100);
        c.gamma_th_db = 200.0;
        let m = run_episode(&c, &Policy::PROPOSED, 1).unwrap();
        assert_eq!(m.avg_sum_aoi, 50.5);
        assert_eq!(m.success_rate, 0.0);
        assert!(m.per_device_avg_aoi.iter().all(|a| *a == 50.5));
    }

    #[test]
    fn trivial_threshold_gives_unit_age() {
        let mut c = small(3, 4, 50);
        c.gamma_th_db = -200.0;
        for (_, p) in Policy::presets() {
            let m = run_episode(&c, &p, 2).unwrap();
            assert_eq!(m.avg_sum_aoi, 1.0, "{p}");
            assert_eq!(m.success_rate, 1.0);
        }
    }

    #[test]
    fn episodes_are_reproducible() {
        let c = small(2, 2, 30);
        let a = run_episode(&c, &Policy::PROPOSED, 9).unwrap();
        let b = run_episode(&c, &Policy::PROPOSED, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn paired_run_matches_solo_runs() {
        let mut c = small(3, 4, 20);
        c.gamma0_db = -10.0;
        let policies: Vec<Policy> = Policy::presets().map(|(_, p)| p).collect();
        let paired = run_paired_episode(&c, &policies, 4).unwrap();
        for (p, m) in policies.iter().zip(&paired) {
            assert_eq!(&run_episode(&c, p, 4).unwrap(), m, "{p}");
        }
    }

    #[test]
    fn shared_arms_match_separate_configs() {
        let mut c = small(3, 4, 20);
        c.gamma0_db = -10.0;
        let mut hard = c.clone();
        hard.gamma_th_db = 48.0;
        let arms = [
            Arm::new(Policy::PROPOSED, &c),
            Arm::new(Policy::PROPOSED, &hard),
            Arm::new(Policy::RANDOM_CLUSTER_OPT_RIS, &hard),
        ];
        let shared = run_arms(&c, &arms, 8).unwrap();
        assert_eq!(shared[0], run_episode(&c, &Policy::PROPOSED, 8).unwrap());
        assert_eq!(shared[1], run_episode(&hard, &Policy::PROPOSED, 8).unwrap());
        assert_eq!(shared[2], run_episode(&hard, &Policy::RANDOM_CLUSTER_OPT_RIS, 8).unwrap());
    }

    #[test]
    fn ages_stay_within_bounds() {
        let mut c = small(3, 4, 40);
        c.gamma0_db = -10.0;
        let config = c.clone();
        let topo = place_devices(&config, &mut stream(3, Stream::Topology)).unwrap();
        let mut ch = stream(3, Stream::Channel);
        let mut streams = PolicyStreams::new(3);
        let mut state = AoIState::new(3);
        for t in 0..40 {
            let slot = sample_slot(&topo, &config.fading_params(), t, &mut ch).unwrap();
            let (next, rec) = run_slot(&state, &slot, &Policy::PROPOSED, &config, &mut streams).unwrap();
            let mut seen = rec.pairing.clone();
            seen.sort();
            assert_eq!(seen, vec![0, 1, 2]);
            for a in next.ages() {
                assert!(a >= 1 && a <= next.t);
            }
            state = next;
        }
    }

    #[test]
    fn stats_conventions() {
        let s = SampleStats::from_samples(&[3.5]).unwrap();
        assert_eq!((s.mean, s.std, s.ci95_lo, s.ci95_hi), (3.5, 0.0, 3.5, 3.5));
        let s = SampleStats::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(SampleStats::from_samples(&[]).is_err());
    }

    #[test]
    fn monte_carlo_single_run_and_identical_policies() {
        let c = small(2, 3, 10);
        let one = monte_carlo(&c, &[Policy::PROPOSED], 1, 5).unwrap();
        let solo = run_episode(&c, &Policy::PROPOSED, 5).unwrap();
        assert_eq!(one[0].stats.mean, solo.avg_sum_aoi);
        assert_eq!(one[0].stats.ci95_lo, one[0].stats.ci95_hi);

        let twin = monte_carlo(&c, &[Policy::RANDOM_RANDOM, Policy::RANDOM_RANDOM], 4, 5).unwrap();
        assert_eq!(twin[0].stats, twin[1].stats);
        assert!(monte_carlo(&c, &[Policy::PROPOSED], 0, 5).is_err());
    }
}
