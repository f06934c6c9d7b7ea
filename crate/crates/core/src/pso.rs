//! Global-best particle swarm minimizer over a box.

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct PsoParams {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub position_bounds: (f64, f64),
    pub seed: u64,
}

impl Default for PsoParams {
    /// Constriction-factor constants (Clerc–Kennedy).
    fn default() -> Self {
        PsoParams {
            swarm_size: 30,
            iterations: 200,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            position_bounds: (-10.0, 10.0),
            seed: 0,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::invalid("swarm_size must be >= 2"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("iterations must be >= 1"));
        }
        let (lo, hi) = self.position_bounds;
        if !(lo < hi) {
            return Err(Error::invalid("position bounds need low < high"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PsoOutcome {
    pub best: Vec<f64>,
    pub fitness: f64,
    /// Global-best fitness after initialization and after every iteration.
    pub history: Vec<f64>,
}

/// Minimizes `objective` over `[low, high]^dim`. Non-finite objective values
/// count as +inf.
pub fn minimize<F>(dim: usize, params: &PsoParams, mut objective: F) -> Result<PsoOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    params.validate()?;
    if dim == 0 {
        return Err(Error::invalid("cannot optimize over zero dimensions"));
    }
    let (lo, hi) = params.position_bounds;
    let vmax = 0.5 * (hi - lo);
    let mut rng = Rng::new(params.seed);
    let mut eval = |x: &[f64]| {
        let f = objective(x);
        if f.is_finite() {
            f
        } else {
            f64::INFINITY
        }
    };

    let n = params.swarm_size;
    let mut pos: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.uniform_in(lo, hi)).collect()).collect();
    let mut vel: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.uniform_in(-vmax, vmax)).collect()).collect();
    let mut pbest = pos.clone();
    let mut pbest_f: Vec<f64> = pos.iter().map(|x| eval(x)).collect();

    let mut g = 0;
    for i in 1..n {
        if pbest_f[i] < pbest_f[g] {
            g = i;
        }
    }
    let mut gbest = pbest[g].clone();
    let mut gbest_f = pbest_f[g];
    let mut history = Vec::with_capacity(params.iterations + 1);
    history.push(gbest_f);

    for _ in 0..params.iterations {
        for i in 0..n {
            for d in 0..dim {
                let r1 = rng.uniform();
                let r2 = rng.uniform();
                let v = params.inertia * vel[i][d]
                    + params.cognitive * r1 * (pbest[i][d] - pos[i][d])
                    + params.social * r2 * (gbest[d] - pos[i][d]);
                vel[i][d] = v.clamp(-vmax, vmax);
                pos[i][d] = (pos[i][d] + vel[i][d]).clamp(lo, hi);
            }
            let f = eval(&pos[i]);
            if f < pbest_f[i] {
                pbest_f[i] = f;
                pbest[i].clone_from(&pos[i]);
                if f < gbest_f {
                    gbest_f = f;
                    gbest.clone_from(&pos[i]);
                }
            }
        }
        history.push(gbest_f);
    }

    Ok(PsoOutcome { best: gbest, fitness: gbest_f, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sphere_minimum() {
        let p = PsoParams { seed: 4, ..Default::default() };
        let out = minimize(3, &p, |x| x.iter().map(|v| (v - 1.5).powi(2)).sum()).unwrap();
        assert!(out.fitness < 1e-8, "{}", out.fitness);
        assert!(out.best.iter().all(|v| (v - 1.5).abs() < 1e-3));
    }

    #[test]
    fn history_never_increases_and_positions_stay_in_bounds() {
        let p = PsoParams { seed: 1, iterations: 50, position_bounds: (-1.0, 2.0), ..Default::default() };
        let out = minimize(2, &p, |x| {
            assert!(x.iter().all(|v| (-1.0..=2.0).contains(v)));
            (x[0] - 5.0).powi(2) + x[1].sin()
        })
        .unwrap();
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(out.history.len(), 51);
        assert!((out.best[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_params() {
        let bad = PsoParams { swarm_size: 1, ..Default::default() };
        assert!(minimize(1, &bad, |_| 0.0).is_err());
        let bad = PsoParams { position_bounds: (1.0, 1.0), ..Default::default() };
        assert!(minimize(1, &bad, |_| 0.0).is_err());
    }

    #[test]
    fn nan_objective_is_treated_as_infinite() {
        let p = PsoParams { seed: 2, iterations: 20, ..Default::default() };
        let out = minimize(1, &p, |x| if x[0] < 0.0 { f64::NAN } else { x[0] }).unwrap();
        assert!(out.fitness.is_finite());
        assert!(out.best[0] >= 0.0);
    }
}
