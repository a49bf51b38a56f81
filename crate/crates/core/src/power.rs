//! SIC power control inside one NOMA pair.
//!
//! The BS decodes the strong device first, treating the weak one as
//! interference, then decodes the weak device interference-free. The strong
//! device always transmits at `p_max`; only the weak device's power is
//! chosen. All quantities are linear (watts, ratios).

/// Link budget of one candidate (strong, weak) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// `|h_sb|^2`
    pub strong_gain: f64,
    /// Effective gain of the weak device under the slot's RIS phases.
    pub weak_effective_gain: f64,
    pub noise_power: f64,
    pub sinr_threshold: f64,
    pub p_max: f64,
}

/// Slot-independent part of a link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub noise_power: f64,
    pub sinr_threshold: f64,
    pub p_max: f64,
}

impl LinkParams {
    pub fn from_config(config: &crate::config::ScenarioConfig) -> Self {
        Self {
            noise_power: config.noise_power(),
            sinr_threshold: config.gamma_th(),
            p_max: config.p_max(),
        }
    }

    pub fn budget(&self, strong_gain: f64, weak_effective_gain: f64) -> LinkBudget {
        LinkBudget {
            strong_gain,
            weak_effective_gain,
            noise_power: self.noise_power,
            sinr_threshold: self.sinr_threshold,
            p_max: self.p_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PowerMode {
    /// Closed-form bounds with the age-aware fallback.
    Feasibility,
    /// Both devices always at `p_max`.
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDecision {
    pub p_strong: f64,
    pub p_weak: f64,
    pub strong_success: bool,
    pub weak_success: bool,
    pub jointly_feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBounds {
    /// Smallest weak power meeting the weak SINR; `+inf` for a zero gain.
    pub p_min: f64,
    /// Largest weak power that keeps the strong SINR and the power budget.
    pub p_max_eff: f64,
}

impl PowerBounds {
    pub fn feasible(&self) -> bool {
        self.p_min.is_finite() && self.p_min <= self.p_max_eff
    }
}

pub fn sinr_strong(p_s: f64, p_w: f64, budget: &LinkBudget) -> f64 {
    p_s * budget.strong_gain / (p_w * budget.weak_effective_gain + budget.noise_power)
}

pub fn sinr_weak(p_w: f64, budget: &LinkBudget) -> f64 {
    p_w * budget.weak_effective_gain / budget.noise_power
}

/// Feasible weak-power interval `[p_min, p_max_eff]`.
pub fn weak_power_bounds(budget: &LinkBudget) -> PowerBounds {
    let gth = budget.sinr_threshold;
    let noise = budget.noise_power;
    let g_w = budget.weak_effective_gain;
    if g_w <= 0.0 {
        return PowerBounds {
            p_min: f64::INFINITY,
            p_max_eff: budget.p_max,
        };
    }
    let p_min = gth * noise / g_w;
    let headroom = ((budget.p_max * budget.strong_gain - gth * noise) / (gth * g_w)).max(0.0);
    PowerBounds {
        p_min,
        p_max_eff: headroom.min(budget.p_max),
    }
}

fn decision(budget: &LinkBudget, p_weak: f64, jointly_feasible: bool) -> PowerDecision {
    let p_strong = budget.p_max;
    PowerDecision {
        p_strong,
        p_weak,
        strong_success: sinr_strong(p_strong, p_weak, budget) >= budget.sinr_threshold,
        weak_success: sinr_weak(p_weak, budget) >= budget.sinr_threshold,
        jointly_feasible,
    }
}

/// Smallest representable power at or above `p_min` (and at most `cap`)
/// whose recomputed weak SINR clears the threshold. Absorbs the rounding of
/// `gth * noise / g` so that the chosen power really succeeds.
fn settle_weak_power(p_min: f64, cap: f64, budget: &LinkBudget) -> f64 {
    let mut p = p_min;
    for _ in 0..8 {
        if sinr_weak(p, budget) >= budget.sinr_threshold {
            break;
        }
        p = p.next_up();
    }
    p.min(cap)
}

fn resulting_sum(d: &PowerDecision, age_strong: u64, age_weak: u64) -> u64 {
    let s = if d.strong_success { 1 } else { age_strong + 1 };
    let w = if d.weak_success { 1 } else { age_weak + 1 };
    s + w
}

/// Chooses the weak power for a pair.
///
/// Jointly feasible pairs transmit with the minimum feasible weak power.
/// Otherwise the pair can either let the weak device through at `p_min`
/// (favor-weak, only when `p_min <= p_max`) or silence it so the strong
/// device sees no interference (favor-strong). The option with the smaller
/// resulting sum of ages wins; ties go to favor-weak.
pub fn allocate_cluster_power(budget: &LinkBudget, age_strong: u64, age_weak: u64) -> PowerDecision {
    let bounds = weak_power_bounds(budget);
    if bounds.feasible() {
        let p = settle_weak_power(bounds.p_min, bounds.p_max_eff, budget);
        return decision(budget, p, true);
    }

    let favor_strong = decision(budget, 0.0, false);
    if !(bounds.p_min.is_finite() && bounds.p_min <= budget.p_max) {
        return favor_strong;
    }
    let favor_weak = decision(budget, settle_weak_power(bounds.p_min, budget.p_max, budget), false);
    if resulting_sum(&favor_weak, age_strong, age_weak) <= resulting_sum(&favor_strong, age_strong, age_weak) {
        favor_weak
    } else {
        favor_strong
    }
}

/// Both devices transmit at `p_max`, no power control.
pub fn allocate_max_power(budget: &LinkBudget) -> PowerDecision {
    let mut d = decision(budget, budget.p_max, false);
    d.jointly_feasible = weak_power_bounds(budget).feasible();
    d
}
