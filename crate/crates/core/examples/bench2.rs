use hamlp_core::*;
use std::time::Instant;

fn main() {
    // find a slow infeasible n=6 instance and a feasible one
    for seed in [3u64, 4, 5] {
        let spec = harness::RandomSweepSpec { n: 6, count: 1, arc_probability: rational::rat(1,2), seed, weights: harness::WeightScheme::None };
        let instances = harness::random_instances(&spec).unwrap();
        let (g, _) = &instances[0];
        let compat = compat::build_compat_matrix(g);
        let cuts = compat::zero_indices(&compat);
        let hull = polytope::build_hull_system(6).unwrap();
        let cut = polytope::apply_cuts(&hull, &cuts).unwrap();
        let t = Instant::now();
        let outcome = solver::solve_feasibility(&cut).unwrap();
        println!("n=6 seed={seed}: {:?} status={} vars={} cuts={}", t.elapsed(), outcome.status, cut.var_count(), cuts.len());
    }
}
