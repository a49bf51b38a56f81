//! Primal-dual interior-point solver for the max-min semidefinite relaxation
//!
//! ```text
//!   maximize    zeta
//!   subject to  a_w^H V a_w >= zeta      for every w
//!               V_kk = 1                 for every k
//!               V Hermitian PSD
//! ```
//!
//! Standard form: the primal cone is `H^n_+ x R^{W+1}_+` holding
//! `(V, zeta, s_1..s_W)`, with equality constraints `V_kk = 1` and
//! `a_w^H V a_w - zeta - s_w = 0`; the objective is `min -zeta`. Every
//! constraint matrix is either `e_k e_k^T` or the rank-one `a_w a_w^H`, so the
//! Schur complement is assembled in `O(n^2 W + n W^2)` without forming any
//! constraint matrix.
//!
//! Iterations follow the HKM search direction with a Mehrotra
//! predictor-corrector step, from an infeasible start. Data is scaled so the
//! largest `|a_w|^2` is one; `tolerance` applies to the scaled problem.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

/// Fraction of the distance to the cone boundary taken per step.
const TAU: f64 = 0.98;
const REFINE_STEPS: usize = 2;
/// Primal residual of a direction below which refinement is skipped.
const REFINE_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, Copy)]
pub struct SdrOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SdrOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdrSolution {
    /// Unit-diagonal PSD matrix.
    pub v: CMat,
    /// Relaxation optimum in the units of the input vectors.
    pub zeta: f64,
    pub iterations: usize,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

/// Scaled problem data plus the current iterate.
struct Ipm<'a> {
    n: usize,
    b: &'a [CVec],
    x: CMat,
    xl: Vec<f64>,
    y: Vec<f64>,
    z: CMat,
    zl: Vec<f64>,
}

/// Per-iteration quantities shared by the predictor and the corrector.
struct Frame {
    g: CMat,
    schur: Cholesky<f64, nalgebra::Dyn>,
    lx: CMat,
    lz: CMat,
    rp: Vec<f64>,
    rd: CMat,
    rdl: Vec<f64>,
    base: Vec<f64>,
}

struct Direction {
    dx: CMat,
    dxl: Vec<f64>,
    dy: Vec<f64>,
    dz: CMat,
    dzl: Vec<f64>,
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn quad(a: &CVec, m: &CMat) -> Complex64 {
    a.dotc(&(m * a))
}

fn inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Cholesky factorization that fails on matrices that are not positive
/// definite. The complex factorization takes square roots of negative pivots
/// instead of rejecting them, so the pivots are checked afterwards.
fn cholesky_pd(m: CMat) -> Option<Cholesky<Complex64, nalgebra::Dyn>> {
    let chol = Cholesky::new(m)?;
    let ok = chol
        .l_dirty()
        .diagonal()
        .iter()
        .all(|d| d.re > 0.0 && d.im.abs() <= 1e-12 * d.re);
    ok.then_some(chol)
}

/// Largest `alpha <= cap` with `x + alpha * d` positive semidefinite, where
/// `l` is the Cholesky factor of `x`. A successful factorization at `cap`
/// skips the eigenvalue computation.
fn max_psd_step(x: &CMat, l: &CMat, d: &CMat, cap: f64) -> f64 {
    if cholesky_pd(x + d * Complex64::new(cap, 0.0)).is_some() {
        return cap;
    }
    let Some(t) = l.solve_lower_triangular(d) else {
        return 0.0;
    };
    let Some(w) = l.solve_lower_triangular(&t.adjoint()) else {
        return 0.0;
    };
    let lmin = hermitian_part(&w)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if lmin >= 0.0 {
        cap
    } else {
        (-1.0 / lmin).min(cap)
    }
}

fn max_lp_step(x: &[f64], d: &[f64]) -> f64 {
    x.iter()
        .zip(d)
        .filter(|(_, d)| **d < 0.0)
        .map(|(x, d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

impl<'a> Ipm<'a> {
    fn new(b: &'a [CVec]) -> Self {
        let n = b[0].len();
        let w = b.len();
        Self {
            n,
            b,
            x: CMat::identity(n, n),
            xl: vec![1.0; w + 1],
            y: vec![0.0; n + w],
            z: CMat::identity(n, n),
            zl: vec![1.0; w + 1],
        }
    }

    fn m(&self) -> usize {
        self.n + self.b.len()
    }

    /// `A(K)` for an arbitrary (not necessarily Hermitian) matrix block.
    fn a_matrix(&self, k: &CMat) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.m());
        out.extend((0..self.n).map(|i| k[(i, i)].re));
        out.extend(self.b.iter().map(|a| quad(a, k).re));
        out
    }

    fn a_lp(&self, xl: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m()];
        for (w, s) in xl[1..].iter().enumerate() {
            out[self.n + w] = -xl[0] - s;
        }
        out
    }

    /// `A^T(y)`: Hermitian block and LP block.
    fn at(&self, y: &[f64]) -> (CMat, Vec<f64>) {
        let mut m = CMat::from_diagonal(&CVec::from_iterator(
            self.n,
            y[..self.n].iter().map(|v| Complex64::new(*v, 0.0)),
        ));
        let mut lp = vec![0.0; self.b.len() + 1];
        for (w, a) in self.b.iter().enumerate() {
            let yw = y[self.n + w];
            m.ger(Complex64::new(yw, 0.0), a, &a.conjugate(), Complex64::new(1.0, 0.0));
            lp[0] -= yw;
            lp[1 + w] = -yw;
        }
        (m, lp)
    }

    fn residuals(&self) -> (Vec<f64>, CMat, Vec<f64>) {
        let ax = self.a_matrix(&self.x);
        let al = self.a_lp(&self.xl);
        let rp: Vec<f64> = (0..self.m())
            .map(|i| {
                let rhs = if i < self.n { 1.0 } else { 0.0 };
                rhs - ax[i] - al[i]
            })
            .collect();
        let (aty, atl) = self.at(&self.y);
        let rd = -(&self.z + aty);
        let mut rdl: Vec<f64> = self.zl.iter().zip(&atl).map(|(z, a)| -z - a).collect();
        rdl[0] -= 1.0;
        (rp, rd, rdl)
    }

    fn mu(&self) -> f64 {
        let lp: f64 = self.xl.iter().zip(&self.zl).map(|(x, z)| x * z).sum();
        (inner(&self.x, &self.z) + lp) / (self.n + self.xl.len()) as f64
    }

    fn schur(&self, g: &CMat) -> DMatrix<f64> {
        let n = self.n;
        let nw = self.b.len();
        let m = n + nw;
        let bmat = CMat::from_columns(self.b);
        let xb = &self.x * &bmat;
        let gb = g * &bmat;
        let bxb = bmat.adjoint() * &xb;
        let bgb = bmat.adjoint() * &gb;

        let mut s = DMatrix::<f64>::zeros(m, m);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = (self.x[(i, j)] * g[(j, i)]).re;
            }
        }
        for w in 0..nw {
            for i in 0..n {
                let v = (xb[(i, w)] * gb[(i, w)].conj()).re;
                s[(i, n + w)] = v;
                s[(n + w, i)] = v;
            }
            for u in 0..nw {
                s[(n + w, n + u)] = (bxb[(w, u)] * bgb[(u, w)]).re + self.xl[0] / self.zl[0];
            }
            s[(n + w, n + w)] += self.xl[1 + w] / self.zl[1 + w];
        }
        s
    }

    /// Solves for the direction whose complementarity target is
    /// `dX + X dZ G = r_mat`, `dx + x dz / z = r_lp`.
    /// Part of the Schur right-hand side shared by predictor and corrector.
    fn rhs_base(&self, g: &CMat, rp: &[f64], rd: &CMat, rdl: &[f64]) -> Vec<f64> {
        let a3 = self.a_matrix(&(&self.x * rd * g));
        let scaled: Vec<f64> = (0..self.xl.len()).map(|k| self.xl[k] / self.zl[k] * rdl[k]).collect();
        let a4 = self.a_lp(&scaled);
        (0..self.m()).map(|i| rp[i] + a3[i] + a4[i]).collect()
    }

    fn direction(&self, f: &Frame, r_mat: &CMat, r_lp: &[f64]) -> Direction {
        let a1 = self.a_matrix(r_mat);
        let a2 = self.a_lp(r_lp);
        let rhs = DVector::from_iterator(self.m(), (0..self.m()).map(|i| f.base[i] - a1[i] - a2[i]));
        let mut dy: Vec<f64> = f.schur.solve(&rhs).iter().copied().collect();

        // the Schur complement loses accuracy as mu -> 0; refine dy against
        // the primal equations evaluated with the exact operator
        let mut dir = self.complete(&dy, f, r_mat, r_lp);
        for _ in 0..REFINE_STEPS {
            let adx = self.a_matrix(&dir.dx);
            let adl = self.a_lp(&dir.dxl);
            let e = DVector::from_iterator(self.m(), (0..self.m()).map(|i| f.rp[i] - adx[i] - adl[i]));
            if e.amax() <= REFINE_THRESHOLD {
                break;
            }
            let fix = f.schur.solve(&e);
            dy.iter_mut().zip(fix.iter()).for_each(|(y, d)| *y += d);
            dir = self.complete(&dy, f, r_mat, r_lp);
        }
        dir
    }

    /// Back-substitutes `dy` into the remaining direction blocks.
    fn complete(&self, dy: &[f64], f: &Frame, r_mat: &CMat, r_lp: &[f64]) -> Direction {
        let (aty, atl) = self.at(dy);
        let dz = hermitian_part(&(&f.rd - aty));
        let dzl: Vec<f64> = f.rdl.iter().zip(&atl).map(|(r, a)| r - a).collect();
        let dx = hermitian_part(&(r_mat - &self.x * &dz * &f.g));
        let dxl: Vec<f64> = (0..self.xl.len())
            .map(|k| r_lp[k] - self.xl[k] * dzl[k] / self.zl[k])
            .collect();
        Direction {
            dx,
            dxl,
            dy: dy.to_vec(),
            dz,
            dzl,
        }
    }

    /// Primal and dual step lengths, capped at `cap`.
    fn step_lengths(&self, f: &Frame, d: &Direction, cap: f64) -> (f64, f64) {
        let ap = max_psd_step(&self.x, &f.lx, &d.dx, cap).min(max_lp_step(&self.xl, &d.dxl));
        let ad = max_psd_step(&self.z, &f.lz, &d.dz, cap).min(max_lp_step(&self.zl, &d.dzl));
        (ap, ad)
    }
}

/// Solves `max zeta s.t. a_w^H V a_w >= zeta, diag(V) = 1, V >= 0`.
pub fn solve_max_min(vectors: &[CVec], options: &SdrOptions) -> Result<SdrSolution> {
    if vectors.is_empty() {
        return Err(Error::Domain("need at least one constraint vector".into()));
    }
    let n = vectors[0].len();
    if n == 0 {
        return Err(Error::Domain("empty constraint vector".into()));
    }
    for v in vectors {
        crate::error::check_len(n, v.len())?;
        if v.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Domain("non-finite channel coefficient".into()));
        }
    }
    if !(options.tolerance > 0.0) {
        return Err(Error::Domain("tolerance must be > 0".into()));
    }

    let scale = vectors.iter().map(|v| v.norm_squared()).fold(0.0, f64::max);
    if scale == 0.0 || scale < f64::MIN_POSITIVE {
        return Ok(SdrSolution {
            v: CMat::identity(n, n),
            zeta: 0.0,
            iterations: 0,
            gap: 0.0,
            primal_infeasibility: 0.0,
            dual_infeasibility: 0.0,
        });
    }
    let inv = Complex64::new(1.0 / scale.sqrt(), 0.0);
    let scaled: Vec<CVec> = vectors.iter().map(|v| v * inv).collect();

    let mut ipm = Ipm::new(&scaled);
    let tol = options.tolerance;
    let bnorm = 1.0 + (n as f64).sqrt();
    let (mut gap, mut pinf, mut dinf) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);

    for iter in 0..=options.max_iterations {
        let (rp, rd, rdl) = ipm.residuals();
        let pobj = -ipm.xl[0];
        let dobj: f64 = ipm.y[..n].iter().sum();
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        pinf = rp.iter().map(|r| r * r).sum::<f64>().sqrt() / bnorm;
        dinf = (rd.norm_squared() + rdl.iter().map(|r| r * r).sum::<f64>()).sqrt() / 2.0;
        if gap <= tol && pinf <= tol && dinf <= tol {
            return Ok(finish(&ipm, &scaled, scale, iter, gap, pinf, dinf));
        }
        if iter == options.max_iterations {
            break;
        }

        let Some(zchol) = cholesky_pd(ipm.z.clone()) else {
            break;
        };
        let g = hermitian_part(&zchol.inverse());
        let mut schur = ipm.schur(&g);
        let schur = match Cholesky::new(schur.clone()) {
            Some(c) => c,
            None => {
                let bump = 1e-14 * (1.0 + schur.diagonal().amax());
                for i in 0..schur.nrows() {
                    schur[(i, i)] += bump;
                }
                match Cholesky::new(schur) {
                    Some(c) => c,
                    None => break,
                }
            }
        };
        let Some(xchol) = cholesky_pd(ipm.x.clone()) else {
            break;
        };
        let base = ipm.rhs_base(&g, &rp, &rd, &rdl);
        let f = Frame {
            g,
            schur,
            lx: xchol.l(),
            lz: zchol.l(),
            rp,
            rd,
            rdl,
            base,
        };
        let mu = ipm.mu();

        // predictor
        let r_mat = -ipm.x.clone();
        let r_lp: Vec<f64> = ipm.xl.iter().map(|x| -x).collect();
        let pred = ipm.direction(&f, &r_mat, &r_lp);
        let (ap, ad) = ipm.step_lengths(&f, &pred, 1.0);
        let x_aff = &ipm.x + &pred.dx * Complex64::new(ap, 0.0);
        let z_aff = &ipm.z + &pred.dz * Complex64::new(ad, 0.0);
        let lp_aff: f64 = (0..ipm.xl.len())
            .map(|k| (ipm.xl[k] + ap * pred.dxl[k]) * (ipm.zl[k] + ad * pred.dzl[k]))
            .sum();
        let mu_aff = (inner(&x_aff, &z_aff) + lp_aff) / (n + ipm.xl.len()) as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let target = Complex64::new(sigma * mu, 0.0);
        let r_mat = &f.g * target - &ipm.x - &pred.dx * &pred.dz * &f.g;
        let r_lp: Vec<f64> = (0..ipm.xl.len())
            .map(|k| sigma * mu / ipm.zl[k] - ipm.xl[k] - pred.dxl[k] * pred.dzl[k] / ipm.zl[k])
            .collect();
        let dir = ipm.direction(&f, &r_mat, &r_lp);
        let (ap, ad) = ipm.step_lengths(&f, &dir, 1.0 / TAU);
        let ap = (TAU * ap).min(1.0);
        let ad = (TAU * ad).min(1.0);
        if !(ap > 0.0 && ad > 0.0) {
            break;
        }

        ipm.x = hermitian_part(&(&ipm.x + &dir.dx * Complex64::new(ap, 0.0)));
        for (x, d) in ipm.xl.iter_mut().zip(&dir.dxl) {
            *x += ap * d;
        }
        for (y, d) in ipm.y.iter_mut().zip(&dir.dy) {
            *y += ad * d;
        }
        ipm.z = hermitian_part(&(&ipm.z + &dir.dz * Complex64::new(ad, 0.0)));
        for (z, d) in ipm.zl.iter_mut().zip(&dir.dzl) {
            *z += ad * d;
        }
    }

    Err(Error::SolverFailure {
        iterations: options.max_iterations,
        gap,
        pinf,
        dinf,
    })
}

fn finish(ipm: &Ipm<'_>, scaled: &[CVec], scale: f64, iterations: usize, gap: f64, pinf: f64, dinf: f64) -> SdrSolution {
    let n = ipm.n;
    let d: Vec<f64> = (0..n).map(|k| 1.0 / ipm.x[(k, k)].re.max(f64::MIN_POSITIVE).sqrt()).collect();
    let v = CMat::from_fn(n, n, |i, j| ipm.x[(i, j)] * (d[i] * d[j]));
    let v = hermitian_part(&v);
    let primal = scaled.iter().map(|a| quad(a, &v).re).fold(f64::INFINITY, f64::min);
    let dual_bound = -ipm.y[..n].iter().sum::<f64>();
    SdrSolution {
        v,
        zeta: primal.max(dual_bound) * scale,
        iterations,
        gap,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cvec(v: &[(f64, f64)]) -> CVec {
        CVec::from_iterator(v.len(), v.iter().map(|(a, b)| Complex64::new(*a, *b)))
    }

    #[test]
    fn single_constraint_is_coherent_sum() {
        let a = cvec(&[(0.3, -0.4), (1.0, 2.0), (-0.5, 0.1)]);
        let expected = a.iter().map(|c| c.norm()).sum::<f64>().powi(2);
        let sol = solve_max_min(std::slice::from_ref(&a), &SdrOptions::default()).unwrap();
        assert!((sol.zeta - expected).abs() < 1e-7 * expected, "{} vs {expected}", sol.zeta);
        for k in 0..3 {
            assert!((sol.v[(k, k)].re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let a = cvec(&[(0.0, 0.0), (0.0, 0.0)]);
        let sol = solve_max_min(&[a.clone(), a], &SdrOptions::default()).unwrap();
        assert_eq!(sol.zeta, 0.0);
        assert_eq!(sol.v, CMat::identity(2, 2));
    }

    #[test]
    fn two_orthogonal_users_share_budget() {
        // a1 = e1 + e2, a2 = e1 - e2: a rank-one V can serve one at 4, the
        // other at 0; the relaxation balances them at 2.
        let a1 = cvec(&[(1.0, 0.0), (1.0, 0.0)]);
        let a2 = cvec(&[(1.0, 0.0), (-1.0, 0.0)]);
        let sol = solve_max_min(&[a1, a2], &SdrOptions::default()).unwrap();
        assert!((sol.zeta - 2.0).abs() < 1e-6, "{}", sol.zeta);
    }

    #[test]
    fn solution_is_feasible_and_scale_invariant() {
        let a1 = cvec(&[(1e-7, 2e-7), (-3e-7, 1e-7), (2e-7, 0.0), (0.0, -1e-7)]);
        let a2 = cvec(&[(0.0, 1e-7), (1e-7, 1e-7), (-2e-7, 1e-7), (1e-7, 0.0)]);
        let opts = SdrOptions::default();
        let small = solve_max_min(&[a1.clone(), a2.clone()], &opts).unwrap();
        let k = Complex64::new(1e7, 0.0);
        let big = solve_max_min(&[&a1 * k, &a2 * k], &opts).unwrap();
        assert!((small.zeta * 1e14 / big.zeta - 1.0).abs() < 1e-6);

        let eig = big.v.clone().symmetric_eigenvalues();
        assert!(eig.min() > -1e-8);
        for a in [&a1 * k, &a2 * k] {
            assert!(quad(&a, &big.v).re >= big.zeta * (1.0 - 1e-6));
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_max_min(&[], &SdrOptions::default()).is_err());
        let a = cvec(&[(1.0, 0.0)]);
        let b = cvec(&[(1.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            solve_max_min(&[a, b], &SdrOptions::default()),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
