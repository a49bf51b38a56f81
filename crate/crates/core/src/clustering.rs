//! Strong/weak pairing.
//!
//! Every candidate pair is priced by the sum of the two ages it would have
//! after this slot's transmissions; the assignment minimizing the total is
//! found with the Hungarian method.

use crate::channel::ChannelSlot;
use crate::engine::AoIState;
use crate::error::{Error, Result};
use crate::power::{allocate_cluster_power, allocate_max_power, LinkParams, PowerDecision, PowerMode};

/// Square cost matrix, rows are strong devices and columns weak devices.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    values: Vec<f64>,
}

impl CostMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            crate::error::check_len(n, row.len())?;
            values.extend_from_slice(row);
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for s in 0..n {
            for w in 0..n {
                values.push(f(s, w));
            }
        }
        Self { n, values }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: usize, w: usize) -> f64 {
        self.values[s * self.n + w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `pairing[s]` is the weak device paired with strong device `s`.
    pub pairing: Vec<usize>,
    pub total_cost: f64,
}

impl Assignment {
    pub fn from_pairing(cost: &CostMatrix, pairing: Vec<usize>) -> Self {
        let total_cost = pairing.iter().enumerate().map(|(s, w)| cost.get(s, *w)).sum();
        Self { pairing, total_cost }
    }
}

/// Power decision and resulting sum of ages for strong `s` paired with weak `w`.
pub fn price_pair(
    ages: &AoIState,
    slot: &ChannelSlot,
    weak_gains: &[f64],
    link: &LinkParams,
    mode: PowerMode,
    s: usize,
    w: usize,
) -> (PowerDecision, f64) {
    let budget = link.budget(slot.strong_gain(s), weak_gains[w]);
    let (age_s, age_w) = (ages.strong[s], ages.weak[w]);
    let d = match mode {
        PowerMode::Feasibility => allocate_cluster_power(&budget, age_s, age_w),
        PowerMode::Max => allocate_max_power(&budget),
    };
    let next_s = crate::engine::step_age(age_s, d.strong_success);
    let next_w = crate::engine::step_age(age_w, d.weak_success);
    (d, (next_s + next_w) as f64)
}

/// Entry `(s, w)` is the post-slot `A_s + A_w` if `s` and `w` were paired.
/// `weak_gains[w]` is the effective gain of weak device `w` under the
/// slot's phase configuration.
pub fn build_cost_matrix(
    ages: &AoIState,
    slot: &ChannelSlot,
    weak_gains: &[f64],
    link: &LinkParams,
    mode: PowerMode,
) -> Result<CostMatrix> {
    let n = slot.clusters();
    crate::error::check_len(n, weak_gains.len())?;
    crate::error::check_len(n, ages.strong.len())?;
    crate::error::check_len(n, ages.weak.len())?;
    Ok(CostMatrix::from_fn(n, |s, w| price_pair(ages, slot, weak_gains, link, mode, s, w).1))
}

/// Minimum-cost perfect matching.
///
/// Runs the O(n^3) shortest-augmenting-path Hungarian method, then, among
/// all optimal matchings, returns the lexicographically smallest pairing.
/// Optimal matchings are exactly the perfect matchings on the edges left
/// tight by the final dual potentials, so the tie-break is a greedy walk
/// over rows on that subgraph.
pub fn hungarian(cost: &CostMatrix) -> Result<Assignment> {
    let n = cost.size();
    for s in 0..n {
        for w in 0..n {
            if !cost.get(s, w).is_finite() {
                return Err(Error::NonFinite { row: s, col: w });
            }
        }
    }
    if n == 0 {
        return Ok(Assignment {
            pairing: vec![],
            total_cost: 0.0,
        });
    }

    // 1-based potentials with a virtual column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    let mut col_to_row = vec![0usize; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
        col_to_row[j - 1] = owner[j] - 1;
    }

    let scale = cost.values.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let eps = 1e-9 * scale;
    let tight = |r: usize, c: usize| cost.get(r, c) - u[r + 1] - v[c + 1] <= eps;

    lexicographic_tight_matching(n, &tight, &mut row_to_col, &mut col_to_row);
    Ok(Assignment::from_pairing(cost, row_to_col))
}

fn lexicographic_tight_matching(
    n: usize,
    tight: &dyn Fn(usize, usize) -> bool,
    row_to_col: &mut [usize],
    col_to_row: &mut [usize],
) {
    let mut locked_row = vec![false; n];
    let mut next = vec![usize::MAX; n];
    for i in 0..n {
        let c0 = row_to_col[i];
        // rows that can hand their column over along a tight alternating
        // path ending in c0; next[r] is the column r moves to
        let mut good = vec![false; n];
        let mut queue = vec![c0];
        let mut head = 0;
        while head < queue.len() {
            let c = queue[head];
            head += 1;
            for r in 0..n {
                if r == i || locked_row[r] || good[r] || row_to_col[r] == c || !tight(r, c) {
                    continue;
                }
                good[r] = true;
                next[r] = c;
                queue.push(row_to_col[r]);
            }
        }

        let chosen = (0..n).find(|&j| {
            let r = col_to_row[j];
            tight(i, j) && !locked_row[r] && (j == c0 || good[r])
        });
        if let Some(j) = chosen {
            if j != c0 {
                let mut r = col_to_row[j];
                row_to_col[i] = j;
                col_to_row[j] = i;
                loop {
                    let c = next[r];
                    let prev = col_to_row[c];
                    row_to_col[r] = c;
                    col_to_row[c] = r;
                    if c == c0 {
                        break;
                    }
                    r = prev;
                }
            }
        }
        locked_row[i] = true;
    }
}
