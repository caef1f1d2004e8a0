#![allow(dead_code)]

use gencol::{CostSpec, DiscreteMarginal, Problem};
use minilp::{ComparisonOp, OptimizationDirection};
use rand::Rng;

/// Positive weights normalized to one.
pub fn random_weights<R: Rng>(rng: &mut R, l: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..l).map(|_| rng.gen_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Random marginals and a dense random positive cost on `sizes`.
pub fn random_problem<R: Rng>(rng: &mut R, sizes: &[usize]) -> Problem<f64> {
    let marginals = sizes
        .iter()
        .map(|&l| DiscreteMarginal::new(random_weights(rng, l)).unwrap())
        .collect();
    let n: usize = sizes.iter().product();
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let cost = CostSpec::dense(sizes.to_vec(), values).unwrap();
    Problem::new(marginals, cost).unwrap()
}

/// Uniform marginals with integer costs in `0..max`, which makes ties and
/// degenerate vertices common.
pub fn degenerate_problem<R: Rng>(rng: &mut R, sizes: &[usize], max: u32) -> Problem<f64> {
    let marginals = sizes.iter().map(|&l| DiscreteMarginal::uniform(l).unwrap()).collect();
    let n: usize = sizes.iter().product();
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0..max) as f64).collect();
    let cost = CostSpec::dense(sizes.to_vec(), values).unwrap();
    Problem::new(marginals, cost).unwrap()
}

/// Optimal value of the full transport LP from an independent solver.
pub fn reference_objective(problem: &Problem<f64>) -> f64 {
    let sizes = problem.sizes().to_vec();
    let configs = gencol::model::all_configurations(&sizes);
    let mut lp = minilp::Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = configs
        .iter()
        .map(|r| lp.add_var(problem.cost().at(r), (0.0, f64::INFINITY)))
        .collect();
    for (axis, m) in problem.marginals().iter().enumerate() {
        for (x, &w) in m.weights().iter().enumerate() {
            let terms: Vec<_> = configs
                .iter()
                .zip(&vars)
                .filter(|(r, _)| r.indices()[axis] == x)
                .map(|(_, &v)| (v, 1.0))
                .collect();
            lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, w);
        }
    }
    lp.solve().unwrap().objective()
}

pub fn tol_lp(problem: &Problem<f64>) -> f64 {
    1e-9 * (1.0 + problem.cost_scale())
}
