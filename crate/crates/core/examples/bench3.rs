use hamlp_core::*;
use std::time::Instant;

fn main() {
    for n in [5usize, 6, 7] {
        let mut total = std::time::Duration::ZERO;
        let mut worst = std::time::Duration::ZERO;
        let count = if n == 5 { 10 } else { 8 };
        let mut feas = 0;
        for seed in 0..count {
            let spec = harness::RandomSweepSpec { n, count: 1, arc_probability: rational::rat(1,2), seed, weights: harness::WeightScheme::None };
            let instances = harness::random_instances(&spec).unwrap();
            let (g, _) = &instances[0];
            let compat = compat::build_compat_matrix(g);
            let cuts = compat::zero_indices(&compat);
            let hull = polytope::build_hull_system(n).unwrap();
            let cut = polytope::apply_cuts(&hull, &cuts).unwrap();
            let t = Instant::now();
            let outcome = solver::solve_feasibility(&cut).unwrap();
            assert!(solver::verify_certificate(&cut, &outcome));
            let d = t.elapsed();
            if outcome.status == solver::SolveStatus::Feasible { feas += 1; }
            total += d;
            if d > worst { worst = d; }
        }
        println!("n={n}: {count} instances, total={total:?}, worst={worst:?}, feasible={feas}");
    }
}
