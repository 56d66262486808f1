use hamlp_core::*;
use std::time::Instant;

fn main() {
    // n=4 exhaustive sweep timing, unit weights
    let t = Instant::now();
    let out = harness::sweep_exhaustive(3, harness::WeightScheme::Unit).unwrap();
    println!("n=3 exhaustive (64, unit): {:?}  violations={} anomalies={}",
        t.elapsed(), out.report.violations.len(), out.report.anomaly_count);

    // sample of n=4 instances
    let spec = harness::RandomSweepSpec { n: 4, count: 32, arc_probability: rational::rat(1,2), seed: 1, weights: harness::WeightScheme::Unit };
    let t = Instant::now();
    let out = harness::sweep_random(&spec).unwrap();
    println!("n=4 random x32 (unit): {:?} violations={}", t.elapsed(), out.report.violations.len());

    // single n=5, n=6, n=7 feasibility solves on random digraphs
    for n in [5usize, 6, 7] {
        let spec = harness::RandomSweepSpec { n, count: 1, arc_probability: rational::rat(1,2), seed: 3, weights: harness::WeightScheme::None };
        let instances = harness::random_instances(&spec).unwrap();
        let (g, _) = &instances[0];
        let t = Instant::now();
        let compat = compat::build_compat_matrix(g);
        let cuts = compat::zero_indices(&compat);
        let hull = polytope::build_hull_system(n).unwrap();
        let cut = polytope::apply_cuts(&hull, &cuts).unwrap();
        let build = t.elapsed();
        let t = Instant::now();
        let outcome = solver::solve_feasibility(&cut).unwrap();
        let solve = t.elapsed();
        let t = Instant::now();
        let ok = solver::verify_certificate(&cut, &outcome);
        println!("n={n}: build={build:?} solve={solve:?} verify={:?} status={} ok={ok} vars={} rows={}",
            t.elapsed(), outcome.status, cut.var_count(), cut.row_count());
    }
}
