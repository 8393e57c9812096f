//! Semidefinite relaxation of the binary activation problem.
//!
//! The lifted variable `V ~ alpha_bar alpha_bar^T` is relaxed to the set
//!
//! ```text
//! { V : V PSD, V[N,N] = 1, 0 <= V[i,i] <= 1 for i < N }
//! ```
//!
//! and the fractional objective is handled by bisection on the level `t`:
//! level `t` is feasible when some relaxed `V` reaches
//! `tr((R_H - t R_G) V) >= t * sigma^2 / P`.
//!
//! Each level is decided with an ADMM splitting between the affine/box set
//! and the PSD cone. Every iterate yields a feasible point (a diagonal
//! rescaling of the PSD iterate) and a dual bound (from the scaled
//! multiplier), so most levels are decided long before the iterates settle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::array::ActivationProfile;
use crate::error::{invalid, Error, Result};
use crate::slnr::{homogenize, LiftedProblem};

const SYMMETRY_TOL: f64 = 1e-12;

/// How often (in iterations) the dual bound is refreshed; it costs one eigenvalue sweep.
const DUAL_BOUND_EVERY: usize = 5;
/// How often the penalty parameter is rebalanced.
const RHO_UPDATE_EVERY: usize = 10;
/// Relative gap below which a settled iterate decides the level.
const SETTLED_GAP: f64 = 1e-3;

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(invalid(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(invalid(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Frobenius-nearest PSD matrix and the clamped eigenvalues.
fn psd_part(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>, DVector<f64>) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let clamped = eig.eigenvalues.map(|l| l.max(0.0));
    let scaled = &eig.eigenvectors * DMatrix::from_diagonal(&clamped);
    let projected = symmetrize(&(&scaled * eig.eigenvectors.transpose()));
    (projected, eig.eigenvectors, clamped)
}

/// Projects a symmetric matrix onto the PSD cone by clamping negative eigenvalues.
pub fn project_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(m)?;
    Ok(psd_part(m).0)
}

/// One bisection level of the relaxed activation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpInstance {
    /// `R_H - t R_G`, symmetric, dimension N+1.
    pub objective: DMatrix<f64>,
    /// The level `t`.
    pub level: f64,
    /// `sigma^2 / P`.
    pub constant: f64,
}

impl SdpInstance {
    pub fn new(signal: &DMatrix<f64>, leakage: &DMatrix<f64>, level: f64, constant: f64) -> Result<Self> {
        if signal.shape() != leakage.shape() {
            return Err(invalid("signal and leakage matrices differ in shape"));
        }
        if signal.nrows() < 1 {
            return Err(invalid("empty SDP instance"));
        }
        let objective = signal - leakage * level;
        check_symmetric(&objective)?;
        Ok(Self { objective, level, constant })
    }

    pub fn dim(&self) -> usize {
        self.objective.nrows()
    }

    /// Right-hand side `t * sigma^2 / P` of the level test.
    pub fn threshold(&self) -> f64 {
        self.level * self.constant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Feasible,
    Infeasible,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Best feasible point of the relaxation found (always satisfies the constraints).
    pub v_star: DMatrix<f64>,
    pub status: SdpStatus,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    /// `tr(objective * v_star)`.
    pub objective_value: f64,
    /// Certified upper bound on the relaxation optimum (may be infinite).
    pub upper_bound: f64,
}

/// ADMM state carried between bisection levels.
#[derive(Debug, Clone)]
pub struct FeasibilitySolver {
    dim: usize,
    tol: f64,
    max_iter: usize,
    rho: f64,
    scale: f64,
    z: DMatrix<f64>,
    u: DMatrix<f64>,
}

impl FeasibilitySolver {
    pub fn new(dim: usize, tol: f64, max_iter: usize) -> Self {
        let mut z = DMatrix::zeros(dim, dim);
        if dim > 0 {
            z[(dim - 1, dim - 1)] = 1.0;
        }
        Self {
            dim,
            tol,
            max_iter,
            rho: 1.0 / dim.max(1) as f64,
            scale: 1.0,
            z,
            u: DMatrix::zeros(dim, dim),
        }
    }

    /// Seeds the PSD iterate with `w w^T`.
    pub fn warm_start(&mut self, w: &[f64]) {
        let v = DVector::from_column_slice(w);
        self.z = &v * v.transpose();
    }

    /// Projection onto `V_ii = V_i,last = V_last,i` in `[0, 1]` and `V_last,last = 1`.
    fn project_affine(&self, x: &mut DMatrix<f64>) {
        let last = self.dim - 1;
        for i in 0..last {
            let a = ((x[(i, i)] + x[(i, last)] + x[(last, i)]) / 3.0).clamp(0.0, 1.0);
            x[(i, i)] = a;
            x[(i, last)] = a;
            x[(last, i)] = a;
        }
        x[(last, last)] = 1.0;
    }

    /// Rescales rows and columns of a PSD matrix into the constraint set;
    /// `None` if the anchor entry vanished.
    fn feasible_from(&self, z: &DMatrix<f64>) -> Option<DMatrix<f64>> {
        let last = self.dim - 1;
        if z[(last, last)] <= 0.0 {
            return None;
        }
        let anchor = 1.0 / z[(last, last)].sqrt();
        let s: Vec<f64> = (0..self.dim)
            .map(|i| {
                if i == last {
                    return anchor;
                }
                let (x, d) = (z[(i, last)] * anchor, z[(i, i)]);
                // s x = s^2 d ties the diagonal to the anchor column
                if x > 0.0 && d > 0.0 {
                    x / d
                } else {
                    0.0
                }
            })
            .collect();
        let mut v = DMatrix::from_fn(self.dim, self.dim, |i, j| z[(i, j)] * s[i] * s[j]);
        for i in 0..last {
            let a = v[(i, last)].clamp(0.0, 1.0);
            v[(i, i)] = a;
            v[(i, last)] = a;
            v[(last, i)] = a;
        }
        v[(last, last)] = 1.0;
        Some(v)
    }

    /// Weak-duality bound on `max tr(Q V)` from the scaled multiplier.
    ///
    /// Any `N` supported on the constrained entries gives
    /// `tr(Q V) <= sup tr(N V) + dim * lambda_max(Q - N)^+` over the feasible set.
    fn dual_bound(&self, q: &DMatrix<f64>) -> f64 {
        let last = self.dim - 1;
        let w = q - &self.u * self.rho;
        let mut slack = q.clone();
        let mut support = w[(last, last)];
        slack[(last, last)] -= w[(last, last)];
        for i in 0..last {
            let tied = [(i, i), (i, last), (last, i)];
            support += tied.iter().map(|&e| w[e]).sum::<f64>().max(0.0);
            for e in tied {
                slack[e] -= w[e];
            }
        }
        let lmax = slack.symmetric_eigenvalues().max().max(0.0);
        support + self.dim as f64 * lmax
    }

    /// Decides one level, warm-started from the previous call.
    pub fn solve(&mut self, inst: &SdpInstance) -> Result<SdpSolution> {
        if inst.dim() != self.dim {
            return Err(invalid(format!("instance dimension {} != solver dimension {}", inst.dim(), self.dim)));
        }
        let scale = inst.objective.norm().max(inst.threshold().abs()).max(f64::MIN_POSITIVE);
        // keep the multiplier consistent with the new normalisation
        self.u *= self.scale / scale;
        self.scale = scale;
        let q = &inst.objective / scale;
        let target = inst.threshold() / scale;
        let slack_tol = self.tol * (1.0 + target.abs());

        let trace = |v: &DMatrix<f64>| q.dot(v);
        let mut best = self.feasible_from(&self.z).unwrap_or_else(|| {
            let mut e = DMatrix::zeros(self.dim, self.dim);
            e[(self.dim - 1, self.dim - 1)] = 1.0;
            e
        });
        let mut best_value = trace(&best);
        let mut upper = f64::INFINITY;
        let mut primal_res = f64::INFINITY;
        let mut dual_res = f64::INFINITY;

        let finish = |status, v: DMatrix<f64>, value: f64, upper: f64, it, pr, dr| SdpSolution {
            v_star: v,
            status,
            primal_residual: pr,
            dual_residual: dr,
            iterations: it,
            objective_value: value * scale,
            upper_bound: upper * scale,
        };

        if best_value >= target {
            return Ok(finish(SdpStatus::Feasible, best, best_value, upper, 0, 0.0, 0.0));
        }

        for it in 1..=self.max_iter {
            let mut x = &self.z - &self.u + &q / self.rho;
            self.project_affine(&mut x);
            let z_prev = std::mem::replace(&mut self.z, psd_part(&(&x + &self.u)).0);
            let diff = &x - &self.z;
            self.u += &diff;
            primal_res = diff.norm();
            dual_res = self.rho * (&self.z - &z_prev).norm();

            if let Some(v) = self.feasible_from(&self.z) {
                let value = trace(&v);
                if value > best_value {
                    best_value = value;
                    best = v;
                }
            }
            if best_value >= target {
                return Ok(finish(SdpStatus::Feasible, best, best_value, upper, it, primal_res, dual_res));
            }
            if it % DUAL_BOUND_EVERY == 0 {
                upper = upper.min(self.dual_bound(&q));
                if upper < target {
                    return Ok(finish(SdpStatus::Infeasible, best, best_value, upper, it, primal_res, dual_res));
                }
            }

            let znorm = self.z.norm().max(1.0);
            let settled = primal_res <= self.tol * znorm && dual_res <= self.tol * znorm;
            if settled && it % DUAL_BOUND_EVERY != 0 {
                upper = upper.min(self.dual_bound(&q));
                if upper < target {
                    return Ok(finish(SdpStatus::Infeasible, best, best_value, upper, it, primal_res, dual_res));
                }
            }
            // small steps alone are not trusted: the certified gap must be small too
            let gap = upper - best_value;
            if gap <= slack_tol || (settled && gap <= SETTLED_GAP * (1.0 + target.abs())) {
                let status = if best_value >= target - slack_tol {
                    SdpStatus::Feasible
                } else {
                    SdpStatus::Infeasible
                };
                return Ok(finish(status, best, best_value, upper, it, primal_res, dual_res));
            }

            if it % RHO_UPDATE_EVERY == 0 {
                if primal_res > 10.0 * dual_res {
                    self.rho *= 2.0;
                    self.u *= 0.5;
                } else if dual_res > 10.0 * primal_res {
                    self.rho *= 0.5;
                    self.u *= 2.0;
                }
            }
        }
        Ok(finish(SdpStatus::MaxIterations, best, best_value, upper, self.max_iter, primal_res, dual_res))
    }
}

/// Decides a single level from a cold start.
pub fn solve_feasibility_step(inst: &SdpInstance, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    FeasibilitySolver::new(inst.dim(), tol, max_iter).solve(inst)
}

/// Tunables of the relaxation pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdrOptions {
    /// Gaussian candidates drawn from the relaxed solution.
    pub num_samples: usize,
    /// Relative width at which bisection stops.
    pub bisection_tol: f64,
    /// Convergence tolerance of a single level.
    pub feasibility_tol: f64,
    pub max_iter: usize,
}

impl Default for SdrOptions {
    fn default() -> Self {
        Self { num_samples: 1000, bisection_tol: 1e-3, feasibility_tol: 1e-6, max_iter: 5000 }
    }
}

#[derive(Debug, Clone)]
pub struct BisectionOutcome {
    pub v_star: DMatrix<f64>,
    pub t_star: f64,
    /// Final bracket.
    pub t_lo: f64,
    pub t_hi: f64,
    /// Number of halvings performed.
    pub iterations: usize,
    /// Levels whose step hit the iteration cap; they were classified by the best feasible value found.
    pub unconverged_steps: usize,
}

/// Signal/leakage matrices normalised so that `tr(R_H)` is one.
struct NormalizedLift {
    signal: DMatrix<f64>,
    leakage: DMatrix<f64>,
    constant: f64,
}

impl NormalizedLift {
    fn new(lp: &LiftedProblem) -> Self {
        let signal = lp.signal_matrix();
        let s = signal.trace().max(f64::MIN_POSITIVE);
        Self { signal: signal / s, leakage: lp.leakage_matrix() / s, constant: lp.noise_over_power / s }
    }

    fn instance(&self, level: f64) -> Result<SdpInstance> {
        SdpInstance::new(&self.signal, &self.leakage, level, self.constant)
    }
}

fn classify(sol: &SdpSolution, unconverged: &mut usize) -> bool {
    match sol.status {
        SdpStatus::Feasible => true,
        SdpStatus::Infeasible => false,
        SdpStatus::MaxIterations => {
            *unconverged += 1;
            false
        }
    }
}

/// Largest level whose relaxation is feasible, to relative width `opts.bisection_tol`.
///
/// `t_lo` must be feasible and `t_hi` infeasible; both are checked.
pub fn sdr_bisection(lp: &LiftedProblem, t_lo: f64, t_hi: f64, opts: &SdrOptions) -> Result<BisectionOutcome> {
    if !(t_lo.is_finite() && t_hi.is_finite() && t_lo <= t_hi) {
        return Err(invalid(format!("bad bisection interval [{t_lo}, {t_hi}]")));
    }
    let norm = NormalizedLift::new(lp);
    let mut solver = FeasibilitySolver::new(lp.elements() + 1, opts.feasibility_tol, opts.max_iter);
    solver.warm_start(&vec![1.0; lp.elements() + 1]);
    let mut unconverged = 0;
    let lo_sol = solver.solve(&norm.instance(t_lo)?)?;
    if !classify(&lo_sol, &mut unconverged) {
        return Err(invalid(format!("lower level {t_lo} is not feasible")));
    }
    let hi_sol = solver.solve(&norm.instance(t_hi)?)?;
    if classify(&hi_sol, &mut unconverged) {
        return Err(invalid(format!("upper level {t_hi} is feasible")));
    }
    let mut out = bisect(&norm, &mut solver, t_lo, t_hi, lo_sol.v_star, opts)?;
    out.unconverged_steps += unconverged;
    Ok(out)
}

/// Halves a verified bracket `[lo, hi]` until its width drops below `bisection_tol * hi`
/// (measured against the initial upper end).
fn bisect(
    norm: &NormalizedLift,
    solver: &mut FeasibilitySolver,
    mut lo: f64,
    mut hi: f64,
    mut v_star: DMatrix<f64>,
    opts: &SdrOptions,
) -> Result<BisectionOutcome> {
    let mut unconverged = 0;
    let mut iterations = 0;
    while hi - lo > opts.bisection_tol * hi {
        let mid = 0.5 * (lo + hi);
        let sol = solver.solve(&norm.instance(mid)?)?;
        if classify(&sol, &mut unconverged) {
            lo = mid;
            v_star = sol.v_star;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(BisectionOutcome { v_star, t_star: lo, t_lo: lo, t_hi: hi, iterations, unconverged_steps: unconverged })
}

/// Brackets the relaxation optimum by doubling from the ratio of `start`
/// (which the rank-one lift of `start` certifies as feasible), then bisects.
pub fn bracket_and_bisect(
    lp: &LiftedProblem,
    start: &ActivationProfile,
    opts: &SdrOptions,
) -> Result<BisectionOutcome> {
    if start.len() != lp.elements() {
        return Err(invalid("starting profile length does not match the problem"));
    }
    let norm = NormalizedLift::new(lp);
    let mut solver = FeasibilitySolver::new(lp.elements() + 1, opts.feasibility_tol, opts.max_iter);
    let w = homogenize(start);
    solver.warm_start(&w);
    let wv = DVector::from_vec(w);
    let mut v_lo = &wv * wv.transpose();
    let mut lo = lp.profile_ratio(start);
    let mut hi = if lo > 0.0 { 2.0 * lo } else { 1.0 / norm.constant };
    let mut unconverged = 0;
    for _ in 0..200 {
        let sol = solver.solve(&norm.instance(hi)?)?;
        if !classify(&sol, &mut unconverged) {
            let mut out = bisect(&norm, &mut solver, lo, hi, v_lo, opts)?;
            out.unconverged_steps += unconverged;
            return Ok(out);
        }
        v_lo = sol.v_star;
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::NonConvergence("could not bracket the relaxation optimum".into()))
}

/// Ordering used to pick among binary candidates: larger ratio, then fewer
/// active elements, then the lexicographically smaller profile.
pub(crate) fn better_candidate(ratio: f64, profile: &[bool], best_ratio: f64, best: &[bool]) -> bool {
    const TIE: f64 = 1e-12;
    if ratio > best_ratio * (1.0 + TIE) {
        return true;
    }
    if ratio < best_ratio * (1.0 - TIE) {
        return false;
    }
    let (a, b) = (profile.iter().filter(|&&x| x).count(), best.iter().filter(|&&x| x).count());
    a < b || (a == b && profile < best)
}

/// Draws Gaussian vectors with covariance `v_star`, quantizes them to binary
/// profiles and returns the best by the lifted ratio.
///
/// Each sample `x` is multiplied by the sign of its anchor entry `x[N]`
/// (resolving the sign ambiguity), clamped to `[0, 1]` and thresholded at 0.5. The all-on
/// profile and the rounded diagonal of `v_star` are always considered.
pub fn gaussian_randomization(
    v_star: &DMatrix<f64>,
    lp: &LiftedProblem,
    num_samples: usize,
    rng_seed: u64,
) -> Result<ActivationProfile> {
    let n = lp.elements();
    if v_star.shape() != (n + 1, n + 1) {
        return Err(invalid(format!("covariance is {:?}, expected {}x{}", v_star.shape(), n + 1, n + 1)));
    }
    if num_samples == 0 {
        return Err(invalid("at least one Gaussian sample is required"));
    }
    let (_, vectors, values) = psd_part(v_star);
    let factor = &vectors * DMatrix::from_diagonal(&values.map(f64::sqrt));

    let mut best = vec![true; n];
    let mut best_ratio = lp.profile_ratio(&ActivationProfile::all_on(n));
    let mut consider = |profile: Vec<bool>| {
        let ratio = lp.profile_ratio(&ActivationProfile::new(profile.clone()));
        if better_candidate(ratio, &profile, best_ratio, &best) {
            best_ratio = ratio;
            best = profile;
        }
    };

    consider((0..n).map(|i| v_star[(i, i)] >= 0.5).collect());

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut z = DVector::zeros(n + 1);
    for _ in 0..num_samples {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let x = &factor * &z;
        let anchor = x[n];
        if anchor == 0.0 {
            continue;
        }
        consider((0..n).map(|i| (x[i] * anchor.signum()).clamp(0.0, 1.0) >= 0.5).collect());
    }
    Ok(ActivationProfile::new(best))
}
