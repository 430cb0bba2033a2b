// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Damped Gauss-Newton (Levenberg-Marquardt) least squares and ordinary
//! linear regression.
//!
//! The solver minimises `Σ r_i(p)²` for a residual vector supplied by a
//! [`Problem`]. The damping schedule is fixed so that fits are reproducible:
//!
//! - Marquardt scaling, `(JᵀJ + λ·diag(JᵀJ)) δ = -Jᵀr`, starting at `λ = 1e-3`;
//! - `λ /= 10` on an accepted step, `λ *= 10` on a rejected one;
//! - after an accepted step whose actual cost reduction matched the
//!   quadratic prediction to 1 %, the next iteration first tries the
//!   undamped Gauss-Newton step and keeps it if it lowers the cost;
//! - converged when the relative step and the relative change of the cost
//!   are both below `1e-10`, when the residual vanishes to `1e-12` of its
//!   starting norm, or when no damping up to `1e16` lowers the cost;
//! - at most 200 accepted steps.
//!
//! Jacobians come from forward differences with step `max(1e-8, 1e-8·|p|)`
//! unless the problem provides an analytic one. Box bounds are handled by a
//! smooth change of variables (see [`Bound`]); the covariance is mapped back
//! to the user's parameters.

use nalgebra::{DMatrix, DVector};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("normal equations are singular (rank-deficient Jacobian, parameter `{0}` is not determined by the data)")]
    RankDeficient(String),
    #[error("model produced non-finite residuals at the initial parameters")]
    ModelDomain,
    #[error("initial parameter vector is not finite")]
    NonFiniteInitial,
    #[error("need at least as many residuals as parameters ({parameters}), got {residuals}")]
    InsufficientData { residuals: usize, parameters: usize },
    #[error("x values are all equal; slope is undefined")]
    DegenerateAbscissa,
    #[error("x and y have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("parameter count mismatch: {0} names, {1} initial values")]
    ParameterCount(usize, usize),
}

/// Box constraint on one parameter, enforced by a change of variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Free,
    Lower(f64),
    Upper(f64),
    Interval(f64, f64),
}

impl Bound {
    // Internal value u -> external p.
    fn to_external(self, u: f64) -> f64 {
        match self {
            Bound::Free => u,
            Bound::Lower(a) => a - 1.0 + (u * u + 1.0).sqrt(),
            Bound::Upper(b) => b + 1.0 - (u * u + 1.0).sqrt(),
            Bound::Interval(a, b) => a + (b - a) * (u.sin() + 1.0) / 2.0,
        }
    }

    // dp/du
    fn derivative(self, u: f64) -> f64 {
        match self {
            Bound::Free => 1.0,
            Bound::Lower(_) => u / (u * u + 1.0).sqrt(),
            Bound::Upper(_) => -u / (u * u + 1.0).sqrt(),
            Bound::Interval(a, b) => (b - a) * u.cos() / 2.0,
        }
    }

    // External p -> internal u. Values on or past a bound are nudged
    // inside so the transform has a non-zero derivative to start from.
    fn to_internal(self, p: f64) -> f64 {
        const NUDGE: f64 = 1e-3;
        match self {
            Bound::Free => p,
            Bound::Lower(a) => {
                let s = (p - a).max(NUDGE) + 1.0;
                (s * s - 1.0).sqrt()
            }
            Bound::Upper(b) => {
                let s = (b - p).max(NUDGE) + 1.0;
                (s * s - 1.0).sqrt()
            }
            Bound::Interval(a, b) => {
                let z = (2.0 * (p - a) / (b - a) - 1.0).clamp(-1.0 + NUDGE, 1.0 - NUDGE);
                z.asin()
            }
        }
    }
}

/// A nonlinear least-squares problem.
pub trait Problem {
    fn parameter_names(&self) -> Vec<String>;

    fn residuals(&self, params: &[f64]) -> Vec<f64>;

    /// Analytic Jacobian `∂r_i/∂p_j`, rows = residuals.
    fn jacobian(&self, _params: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    fn bounds(&self) -> Vec<Bound> {
        vec![Bound::Free; self.parameter_names().len()]
    }
}

type JacobianFn<'a> = Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'a>;

/// Closure-backed [`Problem`].
pub struct FnProblem<'a, F> {
    names: Vec<String>,
    bounds: Vec<Bound>,
    residual_fn: F,
    jacobian_fn: Option<JacobianFn<'a>>,
}

impl<'a, F> FnProblem<'a, F>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    pub fn new(names: &[&str], residual_fn: F) -> Self {
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            bounds: vec![Bound::Free; names.len()],
            residual_fn,
            jacobian_fn: None,
        }
    }

    pub fn with_jacobian(mut self, jacobian_fn: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'a) -> Self {
        self.jacobian_fn = Some(Box::new(jacobian_fn));
        self
    }

    pub fn with_bounds(mut self, bounds: Vec<Bound>) -> Self {
        assert_eq!(bounds.len(), self.names.len(), "one bound per parameter");
        self.bounds = bounds;
        self
    }
}

impl<F> Problem for FnProblem<'_, F>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    fn parameter_names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn residuals(&self, params: &[f64]) -> Vec<f64> {
        (self.residual_fn)(params)
    }

    fn jacobian(&self, params: &[f64]) -> Option<DMatrix<f64>> {
        self.jacobian_fn.as_ref().map(|f| f(params))
    }

    fn bounds(&self) -> Vec<Bound> {
        self.bounds.clone()
    }
}

/// How the parameter covariance is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceScale {
    /// `s²(JᵀJ)⁻¹` with `s² = Σr²/(m - n)`; residuals carry unknown noise.
    #[default]
    ResidualVariance,
    /// `(JᵀJ)⁻¹`; residuals are already divided by their standard deviations.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub initial_damping: f64,
    pub covariance: CovarianceScale,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-10,
            initial_damping: 1e-3,
            covariance: CovarianceScale::ResidualVariance,
        }
    }
}

/// Parameter estimates with their covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub covariance: DMatrix<f64>,
    /// Euclidean norm of the final residual vector.
    pub residual_norm: f64,
    pub n_iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.values[i])
    }

    pub fn std_err(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.covariance[(i, i)].max(0.0).sqrt())
    }

    pub fn std_errs(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.covariance[(i, i)].max(0.0).sqrt()).collect()
    }

    pub fn correlation(&self, a: &str, b: &str) -> Option<f64> {
        let (i, j) = (self.index(a)?, self.index(b)?);
        let d = (self.covariance[(i, i)] * self.covariance[(j, j)]).sqrt();
        Some(if d > 0.0 { self.covariance[(i, j)] / d } else { 0.0 })
    }
}

impl Serialize for FitResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Param<'a> {
            name: &'a str,
            value: f64,
            std_err: f64,
        }
        let params: Vec<Param<'_>> = self
            .names
            .iter()
            .zip(&self.values)
            .zip(self.std_errs())
            .map(|((name, &value), std_err)| Param { name, value, std_err })
            .collect();
        let cov: Vec<Vec<f64>> = (0..self.covariance.nrows())
            .map(|i| self.covariance.row(i).iter().copied().collect())
            .collect();
        let mut s = serializer.serialize_struct("FitResult", 5)?;
        s.serialize_field("parameters", &params)?;
        s.serialize_field("covariance", &cov)?;
        s.serialize_field("residual_norm", &self.residual_norm)?;
        s.serialize_field("n_iterations", &self.n_iterations)?;
        s.serialize_field("converged", &self.converged)?;
        s.end()
    }
}

struct Transformed<'a, P: Problem + ?Sized> {
    problem: &'a P,
    bounds: Vec<Bound>,
}

impl<P: Problem + ?Sized> Transformed<'_, P> {
    fn external(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.bounds).map(|(&u, b)| b.to_external(u)).collect()
    }

    fn residuals(&self, u: &[f64]) -> DVector<f64> {
        DVector::from_vec(self.problem.residuals(&self.external(u)))
    }

    fn jacobian(&self, u: &[f64], r0: &DVector<f64>) -> DMatrix<f64> {
        let p = self.external(u);
        if let Some(mut j) = self.problem.jacobian(&p) {
            for (col, (b, &uc)) in self.bounds.iter().zip(u).enumerate() {
                let d = b.derivative(uc);
                j.column_mut(col).scale_mut(d);
            }
            return j;
        }
        let mut j = DMatrix::zeros(r0.len(), u.len());
        let mut shifted = u.to_vec();
        for col in 0..u.len() {
            let h = (1e-8 * u[col].abs()).max(1e-8);
            shifted[col] = u[col] + h;
            let r = self.residuals(&shifted);
            // Use the step that was actually representable.
            let dh = shifted[col] - u[col];
            for row in 0..r0.len() {
                j[(row, col)] = (r[row] - r0[row]) / dh;
            }
            shifted[col] = u[col];
        }
        j
    }
}

fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Solve `(A + λ·diag(A)) δ = -g`. `None` when the damped matrix is not
/// positive definite.
fn damped_step(a: &DMatrix<f64>, g: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let mut m = a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += lambda * a[(i, i)];
    }
    let chol = m.cholesky()?;
    let step = chol.solve(&(-g));
    step.iter().all(|x| x.is_finite()).then_some(step)
}

/// Index of a parameter whose Jacobian column is (numerically) dependent on
/// the others, if any.
fn rank_defect(j: &DMatrix<f64>) -> Option<usize> {
    let n = j.ncols();
    let norms: Vec<f64> = (0..n).map(|c| j.column(c).norm()).collect();
    if let Some(c) = norms.iter().position(|&x| x == 0.0 || !x.is_finite()) {
        return Some(c);
    }
    // Column-equilibrate so badly scaled but independent parameters pass.
    let mut scaled = j.clone();
    for (c, &nrm) in norms.iter().enumerate() {
        scaled.column_mut(c).scale_mut(1.0 / nrm);
    }
    let svd = scaled.clone().svd(false, true);
    let smax = svd.singular_values.max();
    let (imin, smin) = svd.singular_values.argmin();
    if smin <= 1e-10 * smax {
        let v_t = svd.v_t.as_ref()?;
        let row = v_t.row(imin);
        let (c, _) = row.iter().enumerate().fold((0, 0.0), |acc, (c, &x)| {
            if x.abs() > acc.1 {
                (c, x.abs())
            } else {
                acc
            }
        });
        return Some(c);
    }
    None
}

/// Minimise `Σ r_i(p)²` starting from `initial`.
pub fn least_squares<P: Problem + ?Sized>(
    problem: &P,
    initial: &[f64],
    options: &FitOptions,
) -> Result<FitResult, FitError> {
    let names = problem.parameter_names();
    if names.len() != initial.len() {
        return Err(FitError::ParameterCount(names.len(), initial.len()));
    }
    if initial.iter().any(|x| !x.is_finite()) {
        return Err(FitError::NonFiniteInitial);
    }
    let bounds = problem.bounds();
    let tp = Transformed { problem, bounds: bounds.clone() };
    let n = initial.len();
    let mut u: Vec<f64> = initial.iter().zip(&bounds).map(|(&p, b)| b.to_internal(p)).collect();

    let mut r = tp.residuals(&u);
    let m = r.len();
    if m < n {
        return Err(FitError::InsufficientData { residuals: m, parameters: n });
    }
    if !all_finite(&r) {
        return Err(FitError::ModelDomain);
    }
    let mut cost = r.norm_squared();
    let initial_norm = cost.sqrt();
    let mut lambda = options.initial_damping;
    let mut iterations = 0;
    let mut converged = cost == 0.0;
    let mut try_gauss_newton = false;

    let mut j = tp.jacobian(&u, &r);
    if let Some(c) = rank_defect(&j) {
        return Err(FitError::RankDeficient(names[c].clone()));
    }

    while !converged && iterations < options.max_iterations {
        let a = j.transpose() * &j;
        let g = j.transpose() * &r;

        let mut accepted = None;
        if try_gauss_newton {
            if let Some(step) = damped_step(&a, &g, 0.0) {
                let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let rt = tp.residuals(&trial);
                if all_finite(&rt) && rt.norm_squared() < cost {
                    accepted = Some((trial, rt, step, 1.0));
                }
            }
        }
        while accepted.is_none() {
            if lambda > 1e16 {
                break;
            }
            match damped_step(&a, &g, lambda) {
                Some(step) => {
                    let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                    let rt = tp.residuals(&trial);
                    let ct = rt.norm_squared();
                    if all_finite(&rt) && ct < cost {
                        // Predicted reduction of the local quadratic model.
                        let jd = &j * &step;
                        let predicted = -(2.0 * g.dot(&step) + jd.norm_squared());
                        let rho = if predicted > 0.0 { (cost - ct) / predicted } else { 0.0 };
                        accepted = Some((trial, rt, step, rho));
                        lambda /= 10.0;
                    } else {
                        lambda *= 10.0;
                    }
                }
                None => lambda *= 10.0,
            }
        }

        let Some((trial, rt, step, rho)) = accepted else {
            // No damping lowers the cost: we are at the minimum to precision.
            converged = true;
            break;
        };
        iterations += 1;
        let new_cost = rt.norm_squared();
        let unorm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let small_step = step.norm() <= options.tolerance * (unorm + options.tolerance);
        let small_change = (cost - new_cost).abs() <= options.tolerance * cost;
        try_gauss_newton = (rho - 1.0).abs() < 0.01;
        u = trial;
        r = rt;
        cost = new_cost;
        if (small_step && small_change) || cost.sqrt() <= 1e-12 * initial_norm {
            converged = true;
        }
        j = tp.jacobian(&u, &r);
    }

    // Parameters sitting on a bound have a vanishing transform derivative;
    // they are reported with zero variance and left out of the inversion.
    let deriv: Vec<f64> = bounds.iter().zip(&u).map(|(b, &x)| b.derivative(x)).collect();
    let free: Vec<usize> = (0..n)
        .filter(|&c| matches!(bounds[c], Bound::Free) || deriv[c].abs() >= 1e-6)
        .collect();
    let inv = if free.is_empty() {
        DMatrix::zeros(0, 0)
    } else {
        let j_free = j.select_columns(&free);
        if let Some(c) = rank_defect(&j_free) {
            return Err(FitError::RankDeficient(names[free[c]].clone()));
        }
        let a = j_free.transpose() * &j_free;
        a.clone()
            .try_inverse()
            .or_else(|| a.pseudo_inverse(1e-300).ok())
            .ok_or_else(|| FitError::RankDeficient(names[free[0]].clone()))?
    };
    let scale = match options.covariance {
        CovarianceScale::Unit => 1.0,
        CovarianceScale::ResidualVariance if m > n => cost / (m - n) as f64,
        CovarianceScale::ResidualVariance => 0.0,
    };
    let mut covariance = DMatrix::zeros(n, n);
    for (a_i, &ci) in free.iter().enumerate() {
        for (a_k, &ck) in free.iter().enumerate() {
            covariance[(ci, ck)] = deriv[ci] * inv[(a_i, a_k)] * scale * deriv[ck];
        }
    }
    // Symmetrise away rounding noise.
    covariance = (&covariance + covariance.transpose()) * 0.5;

    Ok(FitResult {
        names,
        values: tp.external(&u),
        covariance,
        residual_norm: cost.sqrt(),
        n_iterations: iterations,
        converged,
    })
}

/// Ordinary least squares line `y = slope·x + intercept` with standard errors.
///
/// With exactly two points the fit is exact and the reported standard errors
/// are zero.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<FitResult, FitError> {
    if x.len() != y.len() {
        return Err(FitError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(FitError::InsufficientData { residuals: n, parameters: 2 });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&xi| (xi - mx) * (xi - mx)).sum();
    if sxx == 0.0 || x.iter().all(|&xi| xi == x[0]) {
        return Err(FitError::DegenerateAbscissa);
    }
    let sxy: f64 = x.iter().zip(y).map(|(&xi, &yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let e = yi - (slope * xi + intercept);
            e * e
        })
        .sum();
    let s2 = if n > 2 { rss / (nf - 2.0) } else { 0.0 };
    let var_slope = s2 / sxx;
    let var_intercept = s2 * (1.0 / nf + mx * mx / sxx);
    let cov_si = -mx * s2 / sxx;
    Ok(FitResult {
        names: vec!["slope".into(), "intercept".into()],
        values: vec![slope, intercept],
        covariance: DMatrix::from_row_slice(2, 2, &[var_slope, cov_si, cov_si, var_intercept]),
        residual_norm: rss.sqrt(),
        n_iterations: 1,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn line_problem(x: Vec<f64>, y: Vec<f64>) -> impl Problem {
        let xj = x.clone();
        FnProblem::new(&["slope", "intercept"], move |p: &[f64]| {
            x.iter().zip(&y).map(|(&xi, &yi)| p[0] * xi + p[1] - yi).collect()
        })
        .with_jacobian(move |_p: &[f64]| {
            DMatrix::from_fn(xj.len(), 2, |r, c| if c == 0 { xj[r] } else { 1.0 })
        })
    }

    #[test]
    fn linear_model_exact_data_converges_in_two_iterations() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|&x| 3.25 * x - 1.5).collect();
        let fit = least_squares(&line_problem(x, y), &[0.0, 0.0], &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(fit.n_iterations <= 2, "took {} iterations", fit.n_iterations);
        assert_relative_eq!(fit.values[0], 3.25, max_relative = 1e-13);
        assert_relative_eq!(fit.values[1], -1.5, max_relative = 1e-13);
    }

    #[test]
    fn exponential_fit_matches_log_linear_oracle() {
        // Noiseless y = A exp(-k t): the log-linear regression is exact.
        let t: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|&t| 2.5 * (-1.7 * t).exp()).collect();
        let log_y: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        let oracle = linear_fit(&t, &log_y).unwrap();
        let (k_oracle, a_oracle) = (-oracle.values[0], oracle.values[1].exp());

        let (tt, yy) = (t.clone(), y.clone());
        let problem = FnProblem::new(&["amplitude", "rate"], move |p: &[f64]| {
            tt.iter().zip(&yy).map(|(&t, &y)| p[0] * (-p[1] * t).exp() - y).collect()
        });
        let fit = least_squares(&problem, &[1.0, 1.0], &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.values[0], a_oracle, max_relative = 1e-8);
        assert_relative_eq!(fit.values[1], k_oracle, max_relative = 1e-8);
    }

    #[test]
    fn no_data_variation_is_rank_deficient() {
        let problem = FnProblem::new(&["gain"], |p: &[f64]| vec![p[0] * 0.0 - 1.0; 5]);
        assert_eq!(
            least_squares(&problem, &[1.0], &FitOptions::default()),
            Err(FitError::RankDeficient("gain".into()))
        );
    }

    #[test]
    fn duplicated_parameter_is_rank_deficient() {
        let problem = FnProblem::new(&["a", "b"], |p: &[f64]| {
            (0..6).map(|i| (p[0] + p[1]) * i as f64 - 1.0).collect()
        });
        assert!(matches!(
            least_squares(&problem, &[1.0, 1.0], &FitOptions::default()),
            Err(FitError::RankDeficient(_))
        ));
    }

    #[test]
    fn error_paths() {
        let p = FnProblem::new(&["a", "b"], |_p: &[f64]| vec![1.0]);
        assert!(matches!(
            least_squares(&p, &[0.0, 0.0], &FitOptions::default()),
            Err(FitError::InsufficientData { .. })
        ));
        let p = FnProblem::new(&["a"], |p: &[f64]| vec![p[0].ln(); 3]);
        assert_eq!(least_squares(&p, &[-1.0], &FitOptions::default()), Err(FitError::ModelDomain));
        assert_eq!(least_squares(&p, &[f64::NAN], &FitOptions::default()), Err(FitError::NonFiniteInitial));
        assert_eq!(least_squares(&p, &[1.0, 2.0], &FitOptions::default()), Err(FitError::ParameterCount(1, 2)));
    }

    #[test]
    fn residual_norm_never_increases() {
        // Rosenbrock in residual form; record the cost at every accepted step
        // by re-running with increasing iteration caps.
        let problem = FnProblem::new(&["x", "y"], |p: &[f64]| vec![1.0 - p[0], 10.0 * (p[1] - p[0] * p[0])]);
        let mut last = f64::INFINITY;
        for cap in 0..40 {
            let opts = FitOptions { max_iterations: cap, ..FitOptions::default() };
            let fit = least_squares(&problem, &[-1.2, 1.0], &opts).unwrap();
            assert!(fit.residual_norm <= last, "cap {cap}: {} > {last}", fit.residual_norm);
            last = fit.residual_norm;
        }
        let fit = least_squares(&problem, &[-1.2, 1.0], &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.values[0], 1.0, max_relative = 1e-8);
        assert_relative_eq!(fit.values[1], 1.0, max_relative = 1e-8);
    }

    #[test]
    fn bounded_parameter_stays_inside() {
        // Unconstrained optimum at -2; bound at 0 pins the estimate there.
        let problem = FnProblem::new(&["a"], |p: &[f64]| vec![p[0] + 2.0, 0.1 * (p[0] + 2.0)])
            .with_bounds(vec![Bound::Lower(0.0)]);
        let fit = least_squares(&problem, &[1.0], &FitOptions::default()).unwrap();
        assert!(fit.values[0] >= 0.0 && fit.values[0] < 1e-6);

        let problem = FnProblem::new(&["a"], |p: &[f64]| vec![p[0] - 0.3, 2.0 * (p[0] - 0.3)])
            .with_bounds(vec![Bound::Interval(0.0, 1.0)]);
        let fit = least_squares(&problem, &[0.9], &FitOptions::default()).unwrap();
        assert_relative_eq!(fit.values[0], 0.3, max_relative = 1e-9);
    }

    fn noisy_line(seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let x: Vec<f64> = (0..25).map(|i| i as f64 / 5.0).collect();
        let y = x.iter().map(|&x| 1.2 * x + 0.7 + noise.sample(&mut rng)).collect();
        (x, y)
    }

    #[test]
    fn least_squares_agrees_with_closed_form_ols() {
        let (x, y) = noisy_line(3);
        let ols = linear_fit(&x, &y).unwrap();
        let fit = least_squares(&line_problem(x, y), &[0.0, 0.0], &FitOptions::default()).unwrap();
        for i in 0..2 {
            assert_relative_eq!(fit.values[i], ols.values[i], max_relative = 1e-12);
            for k in 0..2 {
                assert_relative_eq!(fit.covariance[(i, k)], ols.covariance[(i, k)], max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn covariance_rescales_with_parameter() {
        let (x, y) = noisy_line(11);
        let c = 7.5;
        let base = least_squares(&line_problem(x.clone(), y.clone()), &[0.0, 0.0], &FitOptions::default()).unwrap();
        // slope' = c·slope: residual uses slope'/c.
        let (xx, yy) = (x, y);
        let scaled_problem = FnProblem::new(&["slope", "intercept"], move |p: &[f64]| {
            xx.iter().zip(&yy).map(|(&xi, &yi)| p[0] / c * xi + p[1] - yi).collect()
        });
        let scaled = least_squares(&scaled_problem, &[0.0, 0.0], &FitOptions::default()).unwrap();
        assert_relative_eq!(scaled.values[0], c * base.values[0], max_relative = 1e-8);
        assert_relative_eq!(scaled.covariance[(0, 0)], c * c * base.covariance[(0, 0)], max_relative = 1e-5);
        assert_relative_eq!(scaled.covariance[(1, 1)], base.covariance[(1, 1)], max_relative = 1e-5);
    }

    #[test]
    fn linear_fit_examples() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let fit = linear_fit(&x, &x).unwrap();
        assert_relative_eq!(fit.values[0], 1.0);
        assert!(fit.values[1].abs() < 1e-15);
        let fit = linear_fit(&x, &[4.0; 4]).unwrap();
        assert_eq!(fit.values[0], 0.0);
        assert_eq!(linear_fit(&[2.0; 3], &[1.0, 2.0, 3.0]), Err(FitError::DegenerateAbscissa));
        assert_eq!(linear_fit(&[1.0], &[1.0, 2.0]), Err(FitError::LengthMismatch(1, 2)));
    }

    #[test]
    fn fit_result_serializes_parameters() {
        let fit = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.5]).unwrap();
        let json = serde_json::to_value(&fit).unwrap();
        assert_eq!(json["parameters"][0]["name"], "slope");
        assert_eq!(json["covariance"].as_array().unwrap().len(), 2);
        assert!(fit.correlation("slope", "intercept").unwrap() < 0.0);
    }

    proptest! {
        #[test]
        fn fit_is_equivariant_under_permutation(seed in 0u64..1000, rot in 1usize..24) {
            let (x, y) = noisy_line(seed);
            let mut xp = x.clone();
            let mut yp = y.clone();
            xp.rotate_left(rot);
            yp.rotate_left(rot);
            xp.swap(0, 5);
            yp.swap(0, 5);
            let a = least_squares(&line_problem(x, y), &[0.0, 0.0], &FitOptions::default()).unwrap();
            let b = least_squares(&line_problem(xp, yp), &[0.0, 0.0], &FitOptions::default()).unwrap();
            for i in 0..2 {
                prop_assert!((a.values[i] - b.values[i]).abs() <= 1e-12 * (1.0 + a.values[i].abs()));
            }
        }
    }
}
