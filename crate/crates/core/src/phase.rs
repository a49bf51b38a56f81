//! Shared RIS phase configuration for all weak devices.
//!
//! The max-min gain problem is lifted to `(L+1) x (L+1)` matrices, relaxed
//! to a semidefinite program ([`crate::sdr`]) and rounded back to unit
//! modulus phases by Gaussian randomization.
//!
//! Phase convention: with `Q_l = conj(h_rb[l]) * h_wr[l]` and
//! `v_l = exp(-j * theta_l)`, the cascaded channel equals `v^H Q`, so the
//! effective gain is `|vbar^H a|^2` with `vbar = [v; 1]` and
//! `a = [Q; h_wb]`. Every conversion between a lifted vector and phases goes
//! through [`phases_from_lifted`] and [`lifted_from_phases`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{effective_gain, ChannelSlot};
use crate::error::{check_len, Error, Result};
use crate::sdr::{solve_max_min, SdrOptions};

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

const TWO_PI: f64 = 2.0 * PI;

/// Per-slot lifted problem data, one entry per weak device.
#[derive(Debug, Clone)]
pub struct LiftedInstance {
    pub thetas: Vec<CMat>,
    pub direct_powers: Vec<f64>,
    /// `a_w = [Q_w; h_wb]`, so that `Theta_w + |h_wb|^2 e_L e_L^T = a_w a_w^H`.
    pub augmented: Vec<CVec>,
    pub l: usize,
}

impl LiftedInstance {
    pub fn from_parts(qs: &[Vec<Complex64>], h_wb: &[Complex64]) -> Result<Self> {
        check_len(qs.len(), h_wb.len())?;
        if qs.is_empty() {
            return Err(Error::Domain("need at least one weak device".into()));
        }
        let l = qs[0].len();
        let mut thetas = Vec::with_capacity(qs.len());
        let mut augmented = Vec::with_capacity(qs.len());
        for (q, h) in qs.iter().zip(h_wb) {
            check_len(l, q.len())?;
            thetas.push(build_lifted(q, *h));
            augmented.push(CVec::from_iterator(l + 1, q.iter().copied().chain(std::iter::once(*h))));
        }
        Ok(Self {
            thetas,
            direct_powers: h_wb.iter().map(|h| h.norm_sqr()).collect(),
            augmented,
            l,
        })
    }

    pub fn from_slot(slot: &ChannelSlot) -> Result<Self> {
        let qs = slot
            .h_wr
            .iter()
            .map(|h_wr| build_q(h_wr, &slot.h_rb))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(&qs, &slot.h_wb)
    }

    pub fn weak_devices(&self) -> usize {
        self.augmented.len()
    }

    /// `min_w |vbar^H a_w|^2`.
    pub fn min_gain_lifted(&self, vbar: &CVec) -> f64 {
        self.augmented
            .iter()
            .map(|a| vbar.dotc(a).norm_sqr())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_gain(&self, theta: &[f64]) -> f64 {
        self.min_gain_lifted(&lifted_from_phases(theta))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSolution {
    pub theta: Vec<f64>,
    pub achieved_min_gain: f64,
    /// Relaxation optimum, an upper bound on any achievable min gain.
    pub sdr_bound: f64,
    pub rank_one_exact: bool,
}

/// `Q_l = conj(h_rb[l]) * h_wr[l]`.
pub fn build_q(h_wr: &[Complex64], h_rb: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(h_wr.len(), h_rb.len())?;
    Ok(h_wr.iter().zip(h_rb).map(|(w, r)| r.conj() * w).collect())
}

/// `Theta = [[Q Q^H, Q conj(h_wb)], [h_wb Q^H, 0]]`.
pub fn build_lifted(q: &[Complex64], h_wb: Complex64) -> CMat {
    let l = q.len();
    CMat::from_fn(l + 1, l + 1, |i, j| match (i < l, j < l) {
        (true, true) => q[i] * q[j].conj(),
        (true, false) => q[i] * h_wb.conj(),
        (false, true) => h_wb * q[j].conj(),
        (false, false) => Complex64::new(0.0, 0.0),
    })
}

/// `vbar = [exp(-j theta); 1]`.
pub fn lifted_from_phases(theta: &[f64]) -> CVec {
    CVec::from_iterator(
        theta.len() + 1,
        theta
            .iter()
            .map(|t| Complex64::cis(-t))
            .chain(std::iter::once(Complex64::new(1.0, 0.0))),
    )
}

/// Inverse of [`lifted_from_phases`] for any vector proportional to a lifted
/// vector: `theta_l = arg(r_last) - arg(r_l)`, wrapped to `[0, 2pi)`.
pub fn phases_from_lifted(r: &CVec) -> Vec<f64> {
    let last = r[r.len() - 1];
    r.iter().take(r.len() - 1).map(|rl| wrap_phase((rl.conj() * last).arg())).collect()
}

pub fn wrap_phase(t: f64) -> f64 {
    let w = t.rem_euclid(TWO_PI);
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone)]
pub struct SdrResult {
    pub v: CMat,
    pub zeta: f64,
    pub iterations: usize,
}

/// Solves the relaxation. `tolerance` is relative to the largest `|a_w|^2`.
pub fn solve_sdr(instance: &LiftedInstance, tolerance: f64) -> Result<SdrResult> {
    let sol = solve_max_min(
        &instance.augmented,
        &SdrOptions {
            tolerance,
            ..Default::default()
        },
    )?;
    Ok(SdrResult {
        v: sol.v,
        zeta: sol.zeta,
        iterations: sol.iterations,
    })
}

fn cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub theta: Vec<f64>,
    pub min_gain: f64,
}

/// Rounds `V` to unit-modulus phases. The principal eigenvector is always
/// the first candidate, followed by `x` draws of `V^{1/2} xi`; the best
/// min-gain candidate wins, earlier candidates on ties.
pub fn gaussian_randomize<R: Rng + ?Sized>(
    v: &CMat,
    instance: &LiftedInstance,
    x: usize,
    rng: &mut R,
) -> Result<Candidate> {
    let n = instance.l + 1;
    if v.nrows() != n || v.ncols() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: v.nrows(),
        });
    }
    if x == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    let herm = (v + v.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let imax = eig.eigenvalues.imax();

    let consider = |theta: Vec<f64>, best: &mut Option<Candidate>| {
        let g = instance.min_gain(&theta);
        if best.as_ref().is_none_or(|b| g > b.min_gain) {
            *best = Some(Candidate { theta, min_gain: g });
        }
    };

    let mut best = None;
    consider(phases_from_lifted(&eig.eigenvectors.column(imax).into_owned()), &mut best);

    let roots: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let factor = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, j)] * roots[j]);
    for _ in 0..x {
        let xi = CVec::from_iterator(n, (0..n).map(|_| cn01(rng)));
        let r = &factor * xi;
        consider(phases_from_lifted(&r), &mut best);
    }
    Ok(best.expect("at least one candidate"))
}

/// Ratio below which the second eigenvalue counts as numerically zero.
pub const RANK_ONE_RATIO: f64 = 1e-6;

fn rank_one(v: &CMat) -> bool {
    let mut ev: Vec<f64> = v.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.len() < 2 || ev[0] <= 0.0 || ev[1].max(0.0) / ev[0] < RANK_ONE_RATIO
}

/// Min effective gain over all weak devices, computed from raw channels.
pub fn slot_min_gain(slot: &ChannelSlot, theta: &[f64]) -> Result<f64> {
    let mut g = f64::INFINITY;
    for w in 0..slot.clusters() {
        g = g.min(effective_gain(&slot.h_wr[w], theta, &slot.h_rb, slot.h_wb[w])?);
    }
    Ok(g)
}

/// SDR followed by Gaussian randomization with `x` draws.
pub fn optimize_phases<R: Rng + ?Sized>(slot: &ChannelSlot, x: usize, tolerance: f64, rng: &mut R) -> Result<PhaseSolution> {
    if slot.clusters() == 0 {
        return Err(Error::Domain("slot has no weak devices".into()));
    }
    let instance = LiftedInstance::from_slot(slot)?;
    let sdr = solve_sdr(&instance, tolerance)?;
    let best = gaussian_randomize(&sdr.v, &instance, x, rng)?;
    let achieved = slot_min_gain(slot, &best.theta)?;
    Ok(PhaseSolution {
        rank_one_exact: rank_one(&sdr.v),
        theta: best.theta,
        achieved_min_gain: achieved,
        sdr_bound: sdr.zeta,
    })
}

/// Uniform phases on `[0, 2pi)`.
pub fn random_phases<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Vec<f64> {
    (0..l).map(|_| rng.random::<f64>() * TWO_PI).collect()
}

pub const EXHAUSTIVE_LIMIT: f64 = 1e8;

/// Brute-force max-min over phases quantized to `2 pi k / levels`.
/// Returns the first maximizer in lexicographic order of level indices.
pub fn exhaustive_phase_oracle(slot: &ChannelSlot, levels: usize) -> Result<(Vec<f64>, f64)> {
    let l = slot.l_elements();
    let w = slot.clusters();
    if levels == 0 || w == 0 {
        return Err(Error::Domain("need levels >= 1 and at least one weak device".into()));
    }
    let size = (levels as f64).powi(l as i32);
    if size > EXHAUSTIVE_LIMIT {
        return Err(Error::InstanceTooLarge(format!("{levels}^{l} = {size:.3e} configurations exceed {EXHAUSTIVE_LIMIT:.0e}")));
    }

    // terms[e][k][w]: contribution of element e at level k to user w
    let rot: Vec<Complex64> = (0..levels).map(|k| Complex64::cis(TWO_PI * k as f64 / levels as f64)).collect();
    let mut terms = vec![vec![vec![Complex64::new(0.0, 0.0); w]; levels]; l];
    for u in 0..w {
        check_len(l, slot.h_wr[u].len())?;
        for e in 0..l {
            let q = slot.h_wr[u][e] * slot.h_rb[e].conj();
            for k in 0..levels {
                terms[e][k][u] = q * rot[k];
            }
        }
    }

    let mut partial = vec![vec![Complex64::new(0.0, 0.0); w]; l + 1];
    partial[0].clone_from(&slot.h_wb);
    let mut idx = vec![0usize; l];
    let mut best_idx = idx.clone();
    let mut best = f64::NEG_INFINITY;
    let mut depth = 0usize;
    // iterative depth-first walk: partial[d] is the sum over elements < d
    loop {
        if depth == l {
            let g = partial[l].iter().map(|c| c.norm_sqr()).fold(f64::INFINITY, f64::min);
            if g > best {
                best = g;
                best_idx.clone_from(&idx);
            }
            // advance odometer
            loop {
                if depth == 0 {
                    let theta = best_idx.iter().map(|k| TWO_PI * *k as f64 / levels as f64).collect();
                    return Ok((theta, best));
                }
                depth -= 1;
                idx[depth] += 1;
                if idx[depth] < levels {
                    break;
                }
                idx[depth] = 0;
            }
        }
        let (head, tail) = partial.split_at_mut(depth + 1);
        let k = idx[depth];
        for u in 0..w {
            tail[0][u] = head[depth][u] + terms[depth][k][u];
        }
        depth += 1;
    }
}

/// Checks that `achieved` and `bound` satisfy the relaxation sandwich.
pub fn within_bound(achieved: f64, bound: f64) -> bool {
    achieved <= bound + 1e-6 * bound.max(1.0)
}
