use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};

use super::{covariance_from_objective, residuals, Covariance, Dataset, FdSteps, FitParams, ForwardModel};
use crate::error::{invalid, Result};
use crate::grid::CoincidenceMap;
use crate::walk::CouplingSpread;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Box-projected Levenberg-Marquardt with a forward-difference Jacobian.
    LevenbergMarquardt,
    /// Nelder-Mead simplex on the clamped parameters.
    NelderMead,
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub method: FitMethod,
    pub max_iter: usize,
    /// Number of starting values of `alpha` spread over one period.
    pub alpha_starts: usize,
    /// Iterations given to each start before the best one is refined.
    pub screen_iter: usize,
    pub seed: u64,
    /// Names of parameters held at their initial value (see [`FitParams::names`]).
    pub frozen: Vec<String>,
    pub nodes: usize,
    pub steps: FdSteps,
    /// Relative decrease of the loss below which the fit counts as converged.
    pub tol: f64,
    pub compute_errors: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            method: FitMethod::LevenbergMarquardt,
            max_iter: 200,
            alpha_starts: 8,
            screen_iter: 6,
            seed: 0,
            frozen: Vec::new(),
            nodes: CouplingSpread::DEFAULT_NODES,
            steps: FdSteps::default(),
            tol: 1e-12,
            compute_errors: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: FitParams,
    /// Two-standard-deviation errors; zero for frozen parameters.
    pub std_errors: Vec<f64>,
    /// Residual sum `r`.
    pub loss: f64,
    pub covariance: DMatrix<f64>,
    /// `observed - forward` per observation.
    pub residual_maps: Vec<CoincidenceMap>,
    pub converged: bool,
    pub iterations: usize,
    pub pinv_warning: bool,
    pub s2: f64,
    pub free: Vec<bool>,
    pub nodes: usize,
}

impl FitResult {
    pub fn names(&self) -> Vec<String> {
        self.params.names()
    }
}

struct Problem<'a> {
    model: ForwardModel,
    dataset: &'a Dataset,
    base: Vec<f64>,
    free: Vec<usize>,
    bounds: Vec<(f64, f64)>,
}

impl Problem<'_> {
    fn full(&self, x: &[f64]) -> Result<FitParams> {
        let mut v = self.base.clone();
        for (&i, &xi) in self.free.iter().zip(x) {
            v[i] = xi;
        }
        FitParams::from_slice(&v)
    }

    fn project(&self, x: &mut [f64]) {
        for (&i, xi) in self.free.iter().zip(x.iter_mut()) {
            let (lo, hi) = self.bounds[i];
            *xi = xi.clamp(lo, hi);
        }
    }

    fn residual(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(DVector::from_vec(self.model.residual_vector(&self.full(x)?, self.dataset)?))
    }

    fn loss(&self, x: &[f64]) -> Result<f64> {
        self.model.loss(&self.full(x)?, self.dataset)
    }
}

struct Outcome {
    x: Vec<f64>,
    loss: f64,
    converged: bool,
    iterations: usize,
}

fn levenberg_marquardt(pb: &Problem, x0: &[f64], max_iter: usize, opts: &FitOptions) -> Result<Outcome> {
    let p = x0.len();
    let mut x = x0.to_vec();
    pb.project(&mut x);
    let mut res = pb.residual(&x)?;
    let mut r = res.norm_squared();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        if r == 0.0 {
            converged = true;
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(res.len(), p);
        for c in 0..p {
            let (lo, hi) = pb.bounds[pb.free[c]];
            let mut h = opts.steps.step(x[c]);
            if x[c] + h > hi {
                h = -h;
            }
            let mut y = x.clone();
            y[c] = (x[c] + h).max(lo);
            let actual = y[c] - x[c];
            let ry = pb.residual(&y)?;
            jac.set_column(c, &((ry - &res) / actual));
        }
        let a = jac.tr_mul(&jac);
        let grad = jac.tr_mul(&res);
        let top = (0..p).map(|i| a[(i, i)]).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
        let mut accepted = false;
        while lambda < 1e16 {
            let mut m = a.clone();
            for i in 0..p {
                m[(i, i)] += lambda * a[(i, i)].max(1e-12 * top);
            }
            let step = match m.clone().cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => match m.lu().solve(&(-&grad)) {
                    Some(s) => s,
                    None => {
                        lambda *= 4.0;
                        continue;
                    }
                },
            };
            let mut xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            pb.project(&mut xn);
            let rn_res = pb.residual(&xn)?;
            let rn = rn_res.norm_squared();
            if rn < r {
                let small_step = x.iter().zip(&xn).all(|(a, b)| (a - b).abs() <= 1e-12 * (a.abs() + 1e-9));
                let small_gain = r - rn <= opts.tol * r;
                x = xn;
                res = rn_res;
                r = rn;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if small_step || small_gain {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            // no downhill step at any damping: a minimum to working precision
            converged = true;
        }
        if converged {
            break;
        }
    }
    Ok(Outcome { x, loss: r, converged, iterations })
}

fn nelder_mead(pb: &Problem, x0: &[f64], max_iter: usize, opts: &FitOptions) -> Result<Outcome> {
    let p = x0.len();
    let clamp = |v: &mut Vec<f64>| pb.project(v);
    let eval = |v: &[f64]| pb.loss(v);
    let mut start = x0.to_vec();
    clamp(&mut start);
    let mut simplex = vec![start.clone()];
    for i in 0..p {
        let mut v = start.clone();
        let h = if v[i] != 0.0 { 0.1 * v[i].abs() } else { 0.05 };
        v[i] += h;
        clamp(&mut v);
        if v[i] == start[i] {
            v[i] -= 2.0 * h;
            clamp(&mut v);
        }
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect::<Result<_>>()?;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=p).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let (best, worst) = (values[0], values[p]);
        if worst - best <= opts.tol * best.abs() || worst == best {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..p).map(|j| simplex[..p].iter().map(|v| v[j]).sum::<f64>() / p as f64).collect();
        let toward = |t: f64| {
            let mut v: Vec<f64> = (0..p).map(|j| centroid[j] + t * (simplex[p][j] - centroid[j])).collect();
            clamp(&mut v);
            v
        };
        let xr = toward(-1.0);
        let fr = eval(&xr)?;
        if fr < values[0] {
            let xe = toward(-2.0);
            let fe = eval(&xe)?;
            if fe < fr {
                simplex[p] = xe;
                values[p] = fe;
            } else {
                simplex[p] = xr;
                values[p] = fr;
            }
            continue;
        }
        if fr < values[p - 1] {
            simplex[p] = xr;
            values[p] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[p] {
            let xc = toward(-0.5);
            let fc = eval(&xc)?;
            (xc, fc)
        } else {
            let xc = toward(0.5);
            let fc = eval(&xc)?;
            (xc, fc)
        };
        if fc < values[p].min(fr) {
            simplex[p] = xc;
            values[p] = fc;
            continue;
        }
        for i in 1..=p {
            let mut v: Vec<f64> = (0..p).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
            clamp(&mut v);
            values[i] = eval(&v)?;
            simplex[i] = v;
        }
    }
    let best = (0..=p).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("nonempty simplex");
    Ok(Outcome { x: simplex[best].clone(), loss: values[best], converged, iterations })
}

fn run(pb: &Problem, x0: &[f64], max_iter: usize, opts: &FitOptions) -> Result<Outcome> {
    match opts.method {
        FitMethod::LevenbergMarquardt => levenberg_marquardt(pb, x0, max_iter, opts),
        FitMethod::NelderMead => nelder_mead(pb, x0, max_iter, opts),
    }
}

/// Least-squares fit of the state family to every observation at once.
///
/// Several starting values of `alpha` are first iterated briefly; the best is
/// then refined to convergence. The returned parameters are canonical (see
/// [`FitParams::canonical`]). An unconverged fit still returns its best point
/// with `converged == false`.
pub fn fit(dataset: &Dataset, init: &FitParams, opts: &FitOptions) -> Result<FitResult> {
    init.validate()?;
    if init.g.len() != dataset.len() {
        return Err(invalid(format!("{} couplings for {} observations", init.g.len(), dataset.len())));
    }
    let names = init.names();
    for name in &opts.frozen {
        if !names.contains(name) {
            return Err(invalid(format!("unknown parameter to freeze: {name}")));
        }
    }
    let free_mask: Vec<bool> = names.iter().map(|n| !opts.frozen.contains(n)).collect();
    let free: Vec<usize> = (0..names.len()).filter(|&i| free_mask[i]).collect();
    if free.is_empty() {
        return Err(invalid("every parameter is frozen"));
    }
    let pb = Problem {
        model: ForwardModel::with_nodes(dataset.reference().clone(), opts.nodes)?,
        dataset,
        base: init.to_vec(),
        free: free.clone(),
        bounds: init.bounds(),
    };
    let x0: Vec<f64> = free.iter().map(|&i| pb.base[i]).collect();
    let alpha_slot = free.iter().position(|&i| i == 1);

    let mut starts = vec![x0.clone()];
    if let Some(slot) = alpha_slot {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
        let n = opts.alpha_starts.max(1);
        for j in 1..n {
            let mut s = x0.clone();
            s[slot] = x0[slot] + (j as f64 + rng.random_range(-0.25..0.25)) * PI / n as f64;
            starts.push(s);
        }
    }
    let best = if starts.len() == 1 {
        run(&pb, &x0, opts.max_iter, opts)?
    } else {
        let mut screened: Option<Outcome> = None;
        let mut used = 0;
        for s in &starts {
            let o = run(&pb, s, opts.screen_iter, opts)?;
            used = used.max(o.iterations);
            if screened.as_ref().is_none_or(|b| o.loss < b.loss) {
                screened = Some(o);
            }
        }
        let s = screened.expect("at least one start");
        let mut o = run(&pb, &s.x, opts.max_iter, opts)?;
        o.iterations += used;
        o
    };

    let mut full = pb.full(&best.x)?;
    if free_mask[1..4].iter().all(|&b| b) {
        full = full.canonical();
    }
    let p = full.len();
    let mut result = FitResult {
        loss: pb.model.loss(&full, dataset)?,
        params: full,
        std_errors: vec![0.0; p],
        covariance: DMatrix::zeros(p, p),
        residual_maps: Vec::new(),
        converged: best.converged,
        iterations: best.iterations,
        pinv_warning: false,
        s2: 0.0,
        free: free_mask,
        nodes: opts.nodes,
    };
    result.residual_maps = residuals(&result, dataset)?.per_observation;
    if opts.compute_errors {
        let cov = errors_with(&result, dataset, &pb.model, opts.steps)?;
        apply_errors(&mut result, &cov);
    }
    Ok(result)
}

fn errors_with(result: &FitResult, dataset: &Dataset, model: &ForwardModel, steps: FdSteps) -> Result<Covariance> {
    let base = result.params.to_vec();
    let free: Vec<usize> = (0..base.len()).filter(|&i| result.free[i]).collect();
    let x: Vec<f64> = free.iter().map(|&i| base[i]).collect();
    let objective = |y: &[f64]| {
        let mut v = base.clone();
        for (&i, &yi) in free.iter().zip(y) {
            v[i] = yi;
        }
        model.loss_extended(&FitParams::from_slice(&v)?, dataset)
    };
    covariance_from_objective(objective, &x, dataset.n_data(), steps)
}

fn apply_errors(result: &mut FitResult, cov: &Covariance) {
    let free: Vec<usize> = (0..result.free.len()).filter(|&i| result.free[i]).collect();
    let p = result.free.len();
    result.covariance = DMatrix::zeros(p, p);
    result.std_errors = vec![0.0; p];
    for (a, &i) in free.iter().enumerate() {
        result.std_errors[i] = cov.std_errors[a];
        for (b, &j) in free.iter().enumerate() {
            result.covariance[(i, j)] = cov.covariance[(a, b)];
        }
    }
    result.pinv_warning = cov.pinv_warning;
    result.s2 = cov.s2;
}

/// Hessian-based covariance and two-standard-deviation errors at the fitted
/// point, over the parameters that were free in the fit.
pub fn errors(result: &FitResult, dataset: &Dataset, steps: FdSteps) -> Result<Covariance> {
    let model = ForwardModel::with_nodes(dataset.reference().clone(), result.nodes)?;
    errors_with(result, dataset, &model, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::EnergyGrid;
    use crate::synth::{synthesize, PairTemplate};

    fn truth() -> FitParams {
        FitParams { f: 0.3, alpha: 0.91, beta: 0.05, gamma: -0.08, g: vec![0.7, 1.1], sigma: 0.2, ratio: 0.3 }
    }

    fn dataset(noise: f64, seed: u64) -> Dataset {
        let grid = EnergyGrid::new(-13.2, 1.2, 3, 22).unwrap();
        let reference = PairTemplate::default().reference(grid).unwrap();
        synthesize(&truth(), &reference, &[1.0, 2.0], 9, noise, seed).unwrap()
    }

    fn quick() -> FitOptions {
        FitOptions { nodes: 9, alpha_starts: 1, ..FitOptions::default() }
    }

    #[test]
    fn noiseless_round_trip() {
        let ds = dataset(0.0, 0);
        let t = truth();
        let mut init = t.clone();
        init.f *= 1.15;
        init.alpha *= 0.9;
        init.g[0] *= 1.1;
        init.sigma *= 0.85;
        let r = fit(&ds, &init, &quick()).unwrap();
        assert!(r.converged);
        for (a, b) in r.params.to_vec().iter().zip(t.to_vec()) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
        assert!(r.loss < 1e-16);
        assert!(r.std_errors.iter().all(|e| *e < 1e-5));
    }

    #[test]
    fn frozen_separable_fit_is_worse() {
        let ds = dataset(0.0, 0);
        let opts = FitOptions { compute_errors: false, ..quick() };
        let free = fit(&ds, &truth(), &opts).unwrap();
        let sep_init = FitParams { f: 0.0, ..truth() };
        let frozen_opts = FitOptions { frozen: vec!["f".into(), "alpha".into(), "beta".into(), "gamma".into()], ..opts };
        let sep = fit(&ds, &sep_init, &frozen_opts).unwrap();
        assert_eq!(sep.params.f, 0.0);
        assert!(sep.loss > free.loss);
        assert!(sep.loss > 1e3 * free.loss.max(1e-30));
    }

    #[test]
    fn nelder_mead_improves_loss() {
        let ds = dataset(0.0, 0);
        let mut init = truth();
        init.f = 0.25;
        init.sigma = 0.22;
        let opts = FitOptions {
            method: FitMethod::NelderMead,
            frozen: vec!["alpha".into(), "beta".into(), "gamma".into(), "g1".into(), "g2".into(), "ratio".into()],
            max_iter: 300,
            compute_errors: false,
            ..quick()
        };
        let model = ForwardModel::with_nodes(ds.reference().clone(), 9).unwrap();
        let before = model.loss(&init, &ds).unwrap();
        let r = fit(&ds, &init, &opts).unwrap();
        assert!(r.loss < 1e-4 * before);
        assert!((r.params.f - 0.3).abs() < 1e-3 && (r.params.sigma - 0.2).abs() < 1e-3);
    }

    #[test]
    fn alpha_multistart_is_deterministic() {
        let ds = dataset(0.0, 0);
        let mut init = truth();
        init.alpha = 0.4;
        let opts = FitOptions { alpha_starts: 4, compute_errors: false, ..quick() };
        let a = fit(&ds, &init, &opts).unwrap();
        let b = fit(&ds, &init, &opts).unwrap();
        assert_eq!(a.params, b.params);
        assert!((a.params.alpha - 0.91).abs() < 1e-5);
    }

    #[test]
    fn unconverged_reports_best_so_far() {
        let ds = dataset(0.0, 0);
        let mut init = truth();
        init.f = 0.1;
        let opts = FitOptions { max_iter: 1, compute_errors: false, ..quick() };
        let r = fit(&ds, &init, &opts).unwrap();
        assert!(!r.converged);
        let model = ForwardModel::with_nodes(ds.reference().clone(), 9).unwrap();
        assert!(r.loss < model.loss(&init, &ds).unwrap());
    }
}
