//! Brute-force validation suites.
//!
//! Each suite checks one building block against an independent oracle on
//! random instances and returns a report instead of panicking, so the CLI
//! can run all of them and summarize.

use std::fmt;

use rand::Rng;

use crate::channel::{coherent_gain_bound, sample_rayleigh, ChannelSlot};
use crate::clustering::{hungarian, CostMatrix};
use crate::config::ScenarioConfig;
use crate::engine::{run_episode, Policy};
use crate::error::Result;
use crate::phase::{exhaustive_phase_oracle, lifted_from_phases, optimize_phases, random_phases, LiftedInstance};
use crate::power::{sinr_strong, sinr_weak, weak_power_bounds, LinkBudget};
use crate::rng::{from_seed, SimRng};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {:<22} cases={:<6} failures={:<4} {}",
            self.name, self.cases, self.failures, self.detail
        )
    }
}

fn report(name: &'static str, cases: usize, failures: usize, detail: String) -> OracleReport {
    OracleReport {
        name,
        cases,
        failures,
        passed: failures == 0,
        detail,
    }
}

/// Unit-variance Rayleigh slot with `w` weak devices and `l` elements.
pub fn rayleigh_slot(rng: &mut SimRng, l: usize, w: usize) -> ChannelSlot {
    ChannelSlot {
        h_sb: sample_rayleigh(rng, w),
        h_wb: sample_rayleigh(rng, w),
        h_wr: (0..w).map(|_| sample_rayleigh(rng, l)).collect(),
        h_rb: sample_rayleigh(rng, l),
        slot_index: 0,
    }
}

/// The lifted quadratic form plus the direct power reproduces the effective
/// gain computed from the raw channels.
pub fn lifting_identity(cases: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = from_seed(seed);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let l = rng.random_range(1..=16);
        let slot = rayleigh_slot(&mut rng, l, 1);
        let inst = LiftedInstance::from_slot(&slot)?;
        let theta = random_phases(l, &mut rng);
        let vbar = lifted_from_phases(&theta);
        let lifted = vbar.dotc(&(&inst.thetas[0] * &vbar)).re + inst.direct_powers[0];
        let direct = slot.weak_gain(0, &theta)?;
        let rel = (lifted - direct).abs() / direct.max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if rel > 1e-10 {
            failures += 1;
        }
    }
    Ok(report("lifting_identity", cases, failures, format!("max_rel_err={worst:.2e}")))
}

fn random_budget(rng: &mut SimRng) -> LinkBudget {
    let noise = 10f64.powf(rng.random_range(-15.0..-12.0));
    let gth = 10f64.powf(rng.random_range(0.0..5.0));
    let p_max = 10f64.powf(rng.random_range(-3.0..0.0));
    let (g_s, g_w) = if rng.random_bool(0.5) {
        // near the joint-feasibility boundary
        (
            gth * (gth + 1.0) * noise / p_max * 10f64.powf(rng.random_range(-1.0..2.0)),
            gth * noise / p_max * 10f64.powf(rng.random_range(-1.0..3.0)),
        )
    } else {
        (
            10f64.powf(rng.random_range(-14.0..-4.0)),
            if rng.random_bool(0.05) {
                0.0
            } else {
                10f64.powf(rng.random_range(-16.0..-6.0))
            },
        )
    };
    LinkBudget {
        strong_gain: g_s,
        weak_effective_gain: g_w,
        noise_power: noise,
        sinr_threshold: gth,
        p_max,
    }
}

/// Every point of the predicted weak-power range meets both SINR
/// constraints, points just outside violate the predicted constraint, and
/// infeasible budgets admit no power at all.
pub fn power_range(cases: usize, seed: u64) -> OracleReport {
    const GRID: usize = 21;
    const REL: f64 = 1e-6;
    // slack for the rounding of p * g / sigma^2 at the exact endpoints
    const SLACK: f64 = 1e-12;
    let mut rng = from_seed(seed);
    let mut failures = 0;
    let mut feasible = 0;
    for _ in 0..cases {
        let b = random_budget(&mut rng);
        let gth = b.sinr_threshold;
        let strong_ok = |p: f64| sinr_strong(b.p_max, p, &b) >= gth * (1.0 - SLACK);
        let weak_ok = |p: f64| sinr_weak(p, &b) >= gth * (1.0 - SLACK);
        let pb = weak_power_bounds(&b);
        let mut ok = true;
        if pb.feasible() {
            feasible += 1;
            for k in 0..GRID {
                let p = pb.p_min + (pb.p_max_eff - pb.p_min) * k as f64 / (GRID - 1) as f64;
                ok &= strong_ok(p) && weak_ok(p) && p <= b.p_max * (1.0 + SLACK);
            }
            let below = pb.p_min * (1.0 - REL);
            ok &= !weak_ok(below) && strong_ok(below);
            let above = pb.p_max_eff * (1.0 + REL);
            ok &= weak_ok(above);
            if pb.p_max_eff < b.p_max {
                ok &= !strong_ok(above);
            } else {
                ok &= above > b.p_max;
            }
        } else {
            let strictly = |p: f64| {
                sinr_strong(b.p_max, p, &b) >= gth * (1.0 + 1e-9) && sinr_weak(p, &b) >= gth * (1.0 + 1e-9)
            };
            for k in 0..=200 {
                ok &= !strictly(b.p_max * k as f64 / 200.0);
            }
            if pb.p_min.is_finite() && pb.p_min <= b.p_max {
                ok &= !strictly(pb.p_min);
            }
        }
        failures += (!ok) as usize;
    }
    report("power_range", cases, failures, format!("feasible_budgets={feasible}"))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Hungarian total cost equals the minimum over all permutations.
pub fn hungarian_optimality(cases: usize, n: usize, seed: u64) -> Result<OracleReport> {
    let perms = permutations(n);
    let mut rng = from_seed(seed);
    let mut failures = 0;
    for _ in 0..cases {
        let cost = CostMatrix::from_fn(n, |_, _| rng.random_range(0.0..100.0));
        let best = perms
            .iter()
            .map(|p| p.iter().enumerate().map(|(s, w)| cost.get(s, *w)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let got = hungarian(&cost)?.total_cost;
        if (got - best).abs() > 1e-9 * best.abs().max(1.0) {
            failures += 1;
        }
    }
    Ok(report("hungarian_optimality", cases, failures, format!("n={n}")))
}

/// Quantized exhaustive optimum never exceeds the relaxation bound, and
/// Gaussian randomization gets within 90% of it on at least 95% of the
/// instances.
pub fn sdr_sandwich(cases: usize, samples: usize, seed: u64) -> Result<OracleReport> {
    const LEVELS: usize = 16;
    let mut rng = from_seed(seed);
    let mut bound_violations = 0;
    let mut good = 0;
    let mut worst_ratio = f64::INFINITY;
    for _ in 0..cases {
        let l = rng.random_range(2..=6);
        let w = rng.random_range(2..=3);
        let slot = rayleigh_slot(&mut rng, l, w);
        let (_, quantized) = exhaustive_phase_oracle(&slot, LEVELS)?;
        let sol = optimize_phases(&slot, samples, 1e-8, &mut rng)?;
        if quantized > sol.sdr_bound + 1e-6 {
            bound_violations += 1;
        }
        let ratio = sol.achieved_min_gain / quantized;
        worst_ratio = worst_ratio.min(ratio);
        if ratio >= 0.9 {
            good += 1;
        }
    }
    let needed = (cases * 95).div_ceil(100);
    Ok(OracleReport {
        name: "sdr_sandwich",
        cases,
        failures: bound_violations + cases - good,
        passed: bound_violations == 0 && good >= needed,
        detail: format!("bound_violations={bound_violations} within_90pct={good}/{cases} worst_ratio={worst_ratio:.3}"),
    })
}

/// With one weak device the optimum is the coherent sum of magnitudes.
pub fn single_user_optimum(per_size: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = from_seed(seed);
    let mut failures = 0;
    let mut cases = 0;
    let mut worst = 0.0f64;
    for l in [1, 2, 4, 8, 16, 32] {
        for _ in 0..per_size {
            cases += 1;
            let slot = rayleigh_slot(&mut rng, l, 1);
            let sol = optimize_phases(&slot, 100, 1e-8, &mut rng)?;
            let bound = coherent_gain_bound(&slot.h_wr[0], &slot.h_rb, slot.h_wb[0]);
            let rel = (sol.achieved_min_gain / bound - 1.0).abs();
            worst = worst.max(rel);
            if rel > 1e-6 {
                failures += 1;
            }
        }
    }
    Ok(report("single_user_optimum", cases, failures, format!("max_rel_err={worst:.2e}")))
}

/// Hopeless links give the arithmetic-series average `(T + 1) / 2`;
/// trivially satisfied links give exactly 1.
pub fn aoi_arithmetic() -> Result<OracleReport> {
    let base = ScenarioConfig {
        i_clusters: 4,
        l_elements: 4,
        t_slots: 100,
        gr_samples: 10,
        ..ScenarioConfig::default()
    };
    let fail = ScenarioConfig {
        gamma_th_db: 300.0,
        ..base.clone()
    };
    let succeed = ScenarioConfig {
        gamma_th_db: -300.0,
        ..base
    };
    let mut failures = 0;
    let mut cases = 0;
    let mut seen = Vec::new();
    for (_, p) in Policy::presets() {
        cases += 2;
        let a = run_episode(&fail, &p, 1)?.avg_sum_aoi;
        let b = run_episode(&succeed, &p, 1)?.avg_sum_aoi;
        failures += (a != 50.5) as usize + (b != 1.0) as usize;
        seen.push((a, b));
    }
    Ok(report(
        "aoi_arithmetic",
        cases,
        failures,
        format!("failure_avg={} success_avg={}", seen[0].0, seen[0].1),
    ))
}

/// All suites at their full sizes.
pub fn run_all(seed: u64) -> Result<Vec<OracleReport>> {
    Ok(vec![
        lifting_identity(1000, seed)?,
        power_range(10_000, seed),
        hungarian_optimality(200, 6, seed)?,
        sdr_sandwich(100, 500, seed)?,
        single_user_optimum(5, seed)?,
        aoi_arithmetic()?,
    ])
}
