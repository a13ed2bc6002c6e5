//! The operator `T_k f = ½ C(e_k q f̄)`, the solve for `(μ₁, μ₂)`, the
//! scattering transform `R(q)(k) = (1/π)∫ e_k q μ̄₁ dx` and its inverse
//! `I(f) = conj(R(conj f))`.
//!
//! `μ₁ = 1 + u` where `u` solves `(I − T_k²) u = T_k²(1)`. `T_k` is
//! conjugate-linear, so `T_k²` is complex-linear and Krylov methods apply.

mod krylov;
mod sweep;

pub(crate) use sweep::map_lattice;
pub use sweep::{
    inverse_scatter, plancherel_defect, roundtrip_error, scatter_grid, PlancherelReport, ScatterGrid,
};

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::cauchy::{KernelKind, KernelPlan, KernelScratch};
use crate::fourier::{expect_spec, phase};
use crate::grids::{ComplexGrid, GridError};
use crate::scalar::Real;
use krylov::gmres;

/// Contraction estimates or Neumann increment ratios at or above this switch to Krylov.
pub const SWITCH_RATIO: f64 = 0.9;
const KRYLOV_RESTART: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    NeumannThenKrylov,
    NeumannOnly,
    KrylovOnly,
}

/// The iteration that produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodUsed {
    Neumann,
    Krylov,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("no convergence at k = {}: residual {:e} after {} iterations", .0.k_re, .0.final_residual, .0.iterations)]
    NonConvergence(Box<SolveReport>),
    #[error("{failed} of {total} k-points failed to converge")]
    TooManyFailures { failed: usize, total: usize },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    max_iterations: usize,
    residual_tolerance: f64,
    method: Method,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iterations: 200, residual_tolerance: 1e-10, method: Method::default() }
    }
}

impl SolverOptions {
    pub fn new(max_iterations: usize, residual_tolerance: f64, method: Method) -> Result<Self, ScatterError> {
        if max_iterations < 1 {
            return Err(ScatterError::InvalidOptions("max_iterations must be at least 1".into()));
        }
        if !(residual_tolerance > 0.0 && residual_tolerance.is_finite()) {
            return Err(ScatterError::InvalidOptions(format!(
                "residual_tolerance must be positive, got {residual_tolerance}"
            )));
        }
        Ok(Self { max_iterations, residual_tolerance, method })
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn residual_tolerance(&self) -> f64 {
        self.residual_tolerance
    }

    pub fn method(&self) -> Method {
        self.method
    }
}

/// Convergence diagnostics for one `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub k_re: f64,
    pub k_im: f64,
    /// Applications of `T_k²` spent in the iteration.
    pub iterations: usize,
    /// `‖(I − T_k²)(μ₁ − 1) − T_k²(1)‖₂`, recomputed for the returned iterate.
    pub final_residual: f64,
    pub method_used: MethodUsed,
    /// `‖T_k²(μ₁ − 1)‖₂ / ‖μ₁ − 1‖₂` at the returned iterate, or
    /// `‖T_k²(1)‖₂ / ‖1‖₂` when `μ₁ = 1`.
    pub contraction_estimate: f64,
    pub converged: bool,
}

/// `μ₁`, `μ₂` on the potential's window, with the solve diagnostics.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub mu1: ComplexGrid<T>,
    pub mu2: ComplexGrid<T>,
    pub report: SolveReport,
}

type Buf<T> = Vec<Complex<T>>;

/// Scratch owned by one worker.
pub struct Workspace<T> {
    kernel: KernelScratch<T>,
    ekq: Buf<T>,
    rhs: Buf<T>,
    u: Buf<T>,
    next: Buf<T>,
    mid: Buf<T>,
    tmp: Buf<T>,
}

impl<T: Real> Workspace<T> {
    /// `μ₁ − 1` from the last solve.
    pub(crate) fn deviation(&self) -> &[Complex<T>] {
        &self.u
    }
}

/// A potential together with its Cauchy kernel plan.
pub struct Scatterer<T: Real> {
    q: ComplexGrid<T>,
    plan: KernelPlan<T>,
    options: SolverOptions,
}

fn zeros<T: Real>(len: usize) -> Buf<T> {
    vec![Complex::new(T::zero(), T::zero()); len]
}

impl<T: Real> Scatterer<T> {
    pub fn new(q: ComplexGrid<T>, options: SolverOptions) -> Self {
        let plan = KernelPlan::new(*q.spec());
        Self { q, plan, options }
    }

    pub fn potential(&self) -> &ComplexGrid<T> {
        &self.q
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn workspace(&self) -> Workspace<T> {
        let len = self.q.spec().len();
        Workspace {
            kernel: self.plan.scratch(),
            ekq: zeros(len),
            rhs: zeros(len),
            u: zeros(len),
            next: zeros(len),
            mid: zeros(len),
            tmp: zeros(len),
        }
    }

    fn weighted_norm(&self, v: &[Complex<T>]) -> T {
        (crate::grids::l2_norm_sqr(v) * self.q.spec().cell_area()).sqrt()
    }

    /// Loads `e_k q` into the workspace.
    pub(crate) fn prepare(&self, k: Complex<T>, ws: &mut Workspace<T>) {
        for (slot, (x, qv)) in ws.ekq.iter_mut().zip(self.q.samples()) {
            *slot = phase(k, x) * qv;
        }
    }

    /// `out = T_k f` for the prepared `k`.
    fn apply_t(&self, ekq: &[Complex<T>], f: &[Complex<T>], out: &mut [Complex<T>], tmp: &mut [Complex<T>], ks: &mut KernelScratch<T>) {
        let half = T::of(0.5);
        for ((t, e), v) in tmp.iter_mut().zip(ekq).zip(f) {
            *t = e * v.conj() * half;
        }
        self.plan.convolve_into(KernelKind::Cauchy, tmp, out, ks);
    }

    /// `T_k f` on full grids.
    pub fn apply_tk(&self, k: Complex<T>, f: &ComplexGrid<T>) -> Result<ComplexGrid<T>, ScatterError> {
        expect_spec(f.spec(), self.q.spec())?;
        let mut ws = self.workspace();
        self.prepare(k, &mut ws);
        let mut out = zeros(f.spec().len());
        self.apply_t(&ws.ekq, f.values(), &mut out, &mut ws.tmp, &mut ws.kernel);
        Ok(ComplexGrid::from_values(*self.q.spec(), out)?)
    }

    /// Applies `T_k^m` to `f` in place for the prepared `k`.
    pub(crate) fn apply_power(&self, ws: &mut Workspace<T>, f: &mut Buf<T>, m: usize) {
        for _ in 0..m {
            self.apply_t(&ws.ekq, f, &mut ws.mid, &mut ws.tmp, &mut ws.kernel);
            std::mem::swap(f, &mut ws.mid);
        }
    }

    /// `(h²/π) Σ e_k q conj(g)` for the prepared `k`.
    pub(crate) fn pair_with(&self, ws: &Workspace<T>, g: &[Complex<T>]) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let s = ws.ekq.iter().zip(g).fold(zero, |acc, (e, v)| acc + e * v.conj());
        s * (self.q.spec().cell_area() / T::PI())
    }

    /// Solves for `u = μ₁ − 1` at `k`, leaving it in the workspace.
    pub(crate) fn solve_in(&self, k: Complex<T>, ws: &mut Workspace<T>) -> SolveReport {
        self.prepare(k, ws);
        let opts = self.options;
        let tol = T::of(opts.residual_tolerance);
        let one_norm = self.q.spec().half_width() * T::of(2.0);

        // rhs = T²(1)
        let one = vec![Complex::new(T::one(), T::zero()); ws.u.len()];
        {
            let Workspace { kernel, ekq, rhs, mid, tmp, .. } = ws;
            self.apply_t(ekq, &one, mid, tmp, kernel);
            self.apply_t(ekq, mid, rhs, tmp, kernel);
        }
        let rhs_norm = self.weighted_norm(&ws.rhs);
        let zero = Complex::new(T::zero(), T::zero());
        ws.u.fill(zero);

        let mut report = SolveReport {
            k_re: k.re.wide(),
            k_im: k.im.wide(),
            iterations: 0,
            final_residual: f64::INFINITY,
            method_used: MethodUsed::Neumann,
            contraction_estimate: (rhs_norm / one_norm).wide(),
            converged: false,
        };

        let mut use_krylov = match opts.method {
            Method::KrylovOnly => true,
            Method::NeumannOnly => false,
            Method::NeumannThenKrylov => report.contraction_estimate >= SWITCH_RATIO,
        };
        if !use_krylov {
            let mut prev: Option<T> = None;
            let mut u_is_zero = true;
            loop {
                // next = T²(u) + rhs
                if u_is_zero {
                    ws.next.copy_from_slice(&ws.rhs);
                } else {
                    let Workspace { kernel, ekq, u, next, mid, tmp, rhs } = &mut *ws;
                    self.apply_t(ekq, u, mid, tmp, kernel);
                    self.apply_t(ekq, mid, next, tmp, kernel);
                    for (a, b) in next.iter_mut().zip(rhs.iter()) {
                        *a += b;
                    }
                }
                let diff: Buf<T> = ws.next.iter().zip(&ws.u).map(|(a, b)| a - b).collect();
                let res = self.weighted_norm(&diff);
                report.final_residual = res.wide();
                if res <= tol {
                    report.converged = true;
                    if !u_is_zero {
                        self.measure_contraction(ws, &mut report);
                    }
                    return report;
                }
                let stalled = prev.is_some_and(|p| res.is_nan() || res >= p * T::of(SWITCH_RATIO));
                if !res.is_finite() || (stalled && opts.method == Method::NeumannThenKrylov) {
                    use_krylov = true;
                    if !res.is_finite() {
                        ws.u.fill(zero);
                    }
                    break;
                }
                if report.iterations >= opts.max_iterations {
                    if !u_is_zero {
                        self.measure_contraction(ws, &mut report);
                    }
                    return report;
                }
                prev = Some(res);
                std::mem::swap(&mut ws.u, &mut ws.next);
                u_is_zero = false;
                report.iterations += 1;
            }
        }

        if use_krylov {
            report.method_used = MethodUsed::Krylov;
            let budget = opts.max_iterations.saturating_sub(report.iterations).max(1);
            let h = self.q.spec().spacing();
            let Workspace { kernel, ekq, rhs, u, next, tmp, .. } = &mut *ws;
            let mut inner = zeros::<T>(u.len());
            let outcome = gmres(
                |x, out| {
                    self.apply_t(ekq, x, &mut inner, tmp, kernel);
                    self.apply_t(ekq, &inner, out, tmp, kernel);
                    for (o, xi) in out.iter_mut().zip(x) {
                        *o = *xi - *o;
                    }
                },
                rhs,
                u,
                tol / h,
                KRYLOV_RESTART,
                budget,
            );
            report.iterations += outcome.matvecs;
            // Recompute the residual directly.
            self.apply_t(ekq, u, &mut inner, tmp, kernel);
            self.apply_t(ekq, &inner, next, tmp, kernel);
            let diff: Buf<T> = next.iter().zip(rhs.iter()).zip(u.iter()).map(|((a, b), c)| a + b - c).collect();
            let res = self.weighted_norm(&diff);
            let (t2u, un) = (self.weighted_norm(next), self.weighted_norm(u));
            report.final_residual = res.wide();
            report.converged = res <= tol;
            if un > T::zero() {
                report.contraction_estimate = (t2u / un).wide();
            }
        }
        report
    }

    /// Sets the contraction estimate from `T_k²` applied to the current `u`.
    fn measure_contraction(&self, ws: &mut Workspace<T>, report: &mut SolveReport) {
        let Workspace { kernel, ekq, u, next, mid, tmp, .. } = ws;
        self.apply_t(ekq, u, mid, tmp, kernel);
        self.apply_t(ekq, mid, next, tmp, kernel);
        let un = self.weighted_norm(u);
        if un > T::zero() {
            report.contraction_estimate = (self.weighted_norm(next) / un).wide();
        }
    }

    /// Solves for `μ₁` and `μ₂ = T_k(μ₁)` at `k`.
    pub fn solve_mu(&self, k: Complex<T>) -> Result<Solution<T>, ScatterError> {
        let mut ws = self.workspace();
        let report = self.solve_in(k, &mut ws);
        if !report.converged {
            return Err(ScatterError::NonConvergence(Box::new(report)));
        }
        let spec = *self.q.spec();
        let mu1: Buf<T> = ws.u.iter().map(|v| v + T::one()).collect();
        let mut mu2 = zeros(spec.len());
        self.apply_t(&ws.ekq, &mu1, &mut mu2, &mut ws.tmp, &mut ws.kernel);
        Ok(Solution {
            mu1: ComplexGrid::from_values(spec, mu1)?,
            mu2: ComplexGrid::from_values(spec, mu2)?,
            report,
        })
    }

    /// `R(q)(k)` using a caller-owned workspace; failures are reported, not raised.
    pub fn scatter_with(&self, k: Complex<T>, ws: &mut Workspace<T>) -> (Complex<T>, SolveReport) {
        let report = self.solve_in(k, ws);
        if !report.converged {
            return (Complex::new(T::zero(), T::zero()), report);
        }
        // conj(μ₁) = 1 + conj(u)
        let zero = Complex::new(T::zero(), T::zero());
        let s = ws.ekq.iter().zip(&ws.u).fold(zero, |acc, (e, v)| acc + e * (v.conj() + T::one()));
        (s * (self.q.spec().cell_area() / T::PI()), report)
    }

    /// `R(q)(k)`.
    pub fn scatter_at(&self, k: Complex<T>) -> Result<(Complex<T>, SolveReport), ScatterError> {
        let (r, report) = self.scatter_with(k, &mut self.workspace());
        if report.converged {
            Ok((r, report))
        } else {
            Err(ScatterError::NonConvergence(Box::new(report)))
        }
    }
}

/// `T_k f = ½ C(e_k q f̄)`.
pub fn apply_tk<T: Real>(q: &ComplexGrid<T>, k: Complex<T>, f: &ComplexGrid<T>) -> Result<ComplexGrid<T>, ScatterError> {
    Scatterer::new(q.clone(), SolverOptions::default()).apply_tk(k, f)
}

pub fn solve_mu<T: Real>(q: &ComplexGrid<T>, k: Complex<T>, options: SolverOptions) -> Result<Solution<T>, ScatterError> {
    Scatterer::new(q.clone(), options).solve_mu(k)
}

pub fn scatter_at<T: Real>(
    q: &ComplexGrid<T>,
    k: Complex<T>,
    options: SolverOptions,
) -> Result<(Complex<T>, SolveReport), ScatterError> {
    Scatterer::new(q.clone(), options).scatter_at(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::cauchy_transform;
    use crate::grids::{make_grid, GridSpec};

    fn gaussian(spec: GridSpec<f64>, amp: f64) -> ComplexGrid<f64> {
        make_grid(spec, |a, b| Complex::new(amp * (-(a * a + b * b)).exp(), 0.0)).unwrap()
    }

    fn spec() -> GridSpec<f64> {
        GridSpec::new(64, 8.0).unwrap()
    }

    fn residual_of(s: &Scatterer<f64>, k: Complex<f64>, mu1: &ComplexGrid<f64>) -> f64 {
        let one = ComplexGrid::constant(*mu1.spec(), Complex::new(1.0, 0.0));
        let u = mu1.sub(&one).unwrap();
        let t2u = s.apply_tk(k, &s.apply_tk(k, &u).unwrap()).unwrap();
        let t21 = s.apply_tk(k, &s.apply_tk(k, &one).unwrap()).unwrap();
        u.sub(&t2u).unwrap().sub(&t21).unwrap().l2_norm()
    }

    #[test]
    fn tk_is_conjugate_linear() {
        let q = gaussian(spec(), 0.5);
        let k = Complex::new(0.7, -0.3);
        let f = make_grid(spec(), |a, b| Complex::new((-(a * a) / 2.0).exp() * b.sin(), (-(b * b)).exp())).unwrap();
        let g = make_grid(spec(), |a, b| Complex::new((-(a * a + b * b) / 3.0).exp(), a.cos() * (-(b * b)).exp())).unwrap();
        let c = Complex::new(0.3, 1.7);
        let lhs = apply_tk(&q, k, &f.scale(c).unwrap().add(&g).unwrap()).unwrap();
        let rhs = apply_tk(&q, k, &f).unwrap().scale(c.conj()).unwrap().add(&apply_tk(&q, k, &g).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-13);
        let i = Complex::new(0.0, 1.0);
        let lhs = apply_tk(&q, k, &f.scale(i).unwrap()).unwrap();
        let rhs = apply_tk(&q, k, &f).unwrap().scale(-i).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn tk_squared_is_linear() {
        let s = Scatterer::new(gaussian(spec(), 0.5), SolverOptions::default());
        let k = Complex::new(-0.4, 1.1);
        let f = make_grid(spec(), |a, b| Complex::new((-(a * a + b * b)).exp(), b * (-(a * a + b * b)).exp())).unwrap();
        let c = Complex::new(-0.6, 0.9);
        let t2 = |g: &ComplexGrid<f64>| s.apply_tk(k, &s.apply_tk(k, g).unwrap()).unwrap();
        let lhs = t2(&f.scale(c).unwrap());
        let rhs = t2(&f).scale(c).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn t0_of_one_is_half_cauchy() {
        let q = gaussian(spec(), 1.0);
        let one = ComplexGrid::constant(spec(), Complex::new(1.0, 0.0));
        let t = apply_tk(&q, Complex::new(0.0, 0.0), &one).unwrap();
        let c = cauchy_transform(&q).scale(Complex::new(0.5, 0.0)).unwrap();
        assert!(t.max_abs_diff(&c).unwrap() < 1e-10);
        assert!(apply_tk(&q, Complex::new(1.0, 0.0), &ComplexGrid::zeros(spec())).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn spec_mismatch_is_rejected() {
        let q = gaussian(spec(), 1.0);
        let f = ComplexGrid::zeros(GridSpec::new(32, 8.0).unwrap());
        assert!(matches!(apply_tk(&q, Complex::new(0.0, 0.0), &f), Err(ScatterError::Grid(_))));
    }

    #[test]
    fn zero_potential_gives_trivial_solution() {
        let q = ComplexGrid::zeros(spec());
        let sol = solve_mu(&q, Complex::new(1.0, 2.0), SolverOptions::default()).unwrap();
        assert_eq!(sol.report.iterations, 0);
        assert!(sol.mu1.values().iter().all(|v| *v == Complex::new(1.0, 0.0)));
        assert_eq!(sol.mu2.max_abs(), 0.0);
        let (r, _) = scatter_at(&q, Complex::new(0.5, 0.0), SolverOptions::default()).unwrap();
        assert_eq!(r, Complex::new(0.0, 0.0));
    }

    #[test]
    fn options_are_validated() {
        assert!(SolverOptions::new(0, 1e-10, Method::default()).is_err());
        assert!(SolverOptions::new(10, 0.0, Method::default()).is_err());
        assert!(SolverOptions::new(10, f64::NAN, Method::default()).is_err());
        assert!(SolverOptions::new(1, 1e-3, Method::KrylovOnly).is_ok());
    }

    #[test]
    fn neumann_tail_bound() {
        let q = gaussian(spec(), 0.5);
        let k = Complex::new(0.0, 0.0);
        let s = Scatterer::new(q, SolverOptions::default());
        let sol = s.solve_mu(k).unwrap();
        let one = ComplexGrid::constant(spec(), Complex::new(1.0, 0.0));
        let u = sol.mu1.sub(&one).unwrap();
        let t21 = s.apply_tk(k, &s.apply_tk(k, &one).unwrap()).unwrap();
        let lhs = u.sub(&t21).unwrap().l2_norm();
        let c = sol.report.contraction_estimate;
        assert!(c < SWITCH_RATIO);
        assert!(lhs <= c * u.l2_norm() + 1e-10, "{lhs} vs {c}·{}", u.l2_norm());
    }

    #[test]
    fn reported_residuals_verify_directly() {
        let q = gaussian(spec(), 0.5);
        for method in [Method::NeumannOnly, Method::KrylovOnly, Method::NeumannThenKrylov] {
            let opts = SolverOptions::new(200, 1e-10, method).unwrap();
            let s = Scatterer::new(q.clone(), opts);
            for k in [Complex::new(0.0, 0.0), Complex::new(1.5, -0.5)] {
                let sol = s.solve_mu(k).unwrap();
                assert!(sol.report.final_residual <= 1e-10);
                let direct = residual_of(&s, k, &sol.mu1);
                assert!(direct <= 1e-10, "{method:?} {k}: {direct}");
                let mu2 = s.apply_tk(k, &sol.mu1).unwrap();
                assert!(mu2.max_abs_diff(&sol.mu2).unwrap() == 0.0);
            }
        }
    }

    #[test]
    fn krylov_and_neumann_agree() {
        let q = gaussian(spec(), 0.5);
        let k = Complex::new(0.3, 0.2);
        let a = solve_mu(&q, k, SolverOptions::new(200, 1e-12, Method::NeumannOnly).unwrap()).unwrap();
        let b = solve_mu(&q, k, SolverOptions::new(200, 1e-12, Method::KrylovOnly).unwrap()).unwrap();
        assert_eq!(b.report.method_used, MethodUsed::Krylov);
        assert!(a.mu1.max_abs_diff(&b.mu1).unwrap() < 1e-10);
    }

    #[test]
    fn strong_potential_falls_back_to_krylov() {
        let q = gaussian(spec(), 4.0);
        let s = Scatterer::new(q, SolverOptions::default());
        let k = Complex::new(0.0, 0.0);
        let sol = s.solve_mu(k).unwrap();
        assert_eq!(sol.report.method_used, MethodUsed::Krylov);
        assert!(residual_of(&s, k, &sol.mu1) <= 1e-10);
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let q = gaussian(spec(), 0.5);
        let opts = SolverOptions::new(1, 1e-14, Method::NeumannOnly).unwrap();
        match solve_mu(&q, Complex::new(0.0, 0.0), opts) {
            Err(ScatterError::NonConvergence(report)) => {
                assert!(!report.converged);
                assert!(report.final_residual > 1e-14);
            }
            other => panic!("expected failure, got {:?}", other.map(|s| s.report)),
        }
    }

    #[test]
    fn mu1_decays_in_k() {
        let q = gaussian(spec(), 1.0);
        let one = ComplexGrid::constant(spec(), Complex::new(1.0, 0.0));
        let dev = |k: f64| solve_mu(&q, Complex::new(k, 0.0), SolverOptions::default()).unwrap().mu1.sub(&one).unwrap().l2_norm();
        let (near, far) = (dev(2.0), dev(8.0));
        assert!(far <= 0.5 * near, "{far} vs {near}");
    }

    #[test]
    fn born_limit_for_weak_gaussian() {
        let eps = 0.01;
        let q = gaussian(GridSpec::new(128, 8.0).unwrap(), eps);
        let s = Scatterer::new(q, SolverOptions::default());
        for k in [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(1.0, 1.0)] {
            let (r, report) = s.scatter_at(k).unwrap();
            assert!(report.converged);
            let born = eps * (-k.norm_sqr()).exp();
            assert!((r - born).norm() < 1e-5, "{k}: {r} vs {born}");
        }
    }

    #[test]
    fn sweep_is_independent_of_worker_count() {
        let q = gaussian(GridSpec::new(32, 6.0).unwrap(), 0.5);
        let kspec = GridSpec::new(16, 2.0).unwrap();
        let runs: Vec<_> = [1, 3, 4].iter().map(|&w| scatter_grid(&q, kspec, SolverOptions::default(), w).unwrap()).collect();
        for r in &runs[1..] {
            assert!(r.values.values().iter().zip(runs[0].values.values()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
        }
        assert!(runs[0].failed.is_empty());
        assert_eq!(runs[0].reports.len(), kspec.len());
    }

    #[test]
    fn sweep_matches_pointwise_and_zero_maps_to_zero() {
        let q = gaussian(GridSpec::new(32, 6.0).unwrap(), 0.5);
        let kspec = GridSpec::new(16, 2.0).unwrap();
        let sweep = scatter_grid(&q, kspec, SolverOptions::default(), 2).unwrap();
        let s = Scatterer::new(q.clone(), SolverOptions::default());
        let (r, _) = s.scatter_at(kspec.point(1, 3)).unwrap();
        assert_eq!(sweep.values.at(1, 3), r);
        let zero = scatter_grid(&ComplexGrid::zeros(*q.spec()), kspec, SolverOptions::default(), 1).unwrap();
        assert_eq!(zero.values.max_abs(), 0.0);
        let back = inverse_scatter(&ComplexGrid::zeros(kspec), *q.spec(), SolverOptions::default(), 1).unwrap();
        assert_eq!(back.values.max_abs(), 0.0);
    }

    #[test]
    fn inverse_obeys_conjugation_law() {
        let kspec = GridSpec::new(16, 4.0).unwrap();
        let xspec = GridSpec::new(16, 1.0).unwrap();
        let r = make_grid(kspec, |a: f64, b: f64| Complex::new(0.3 * (-(a * a + b * b)).exp(), 0.1 * a * (-(a * a + b * b)).exp())).unwrap();
        let inv = inverse_scatter(&r.conjugate(), xspec, SolverOptions::default(), 1).unwrap();
        let fwd = scatter_grid(&r, xspec, SolverOptions::default(), 1).unwrap();
        assert_eq!(inv.values, fwd.values.conjugate());
    }

    #[test]
    fn excessive_failures_abort_the_sweep() {
        let q = gaussian(GridSpec::new(16, 4.0).unwrap(), 0.5);
        let opts = SolverOptions::new(1, 1e-15, Method::NeumannOnly).unwrap();
        let err = scatter_grid(&q, GridSpec::new(16, 1.0).unwrap(), opts, 1).unwrap_err();
        assert!(matches!(err, ScatterError::TooManyFailures { failed: 256, total: 256 }));
    }
}
