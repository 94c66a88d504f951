//! Exploratory probe of the full pipeline (run with --nocapture).

use sensid::calib::McmcConfig;
use sensid::design::latin_hypercube;
use sensid::ident::{enumerate_subsets, run_subset_study, StudyOptions, StudySetup};
use sensid::model::{generate_dataset, make_benchmark, BenchmarkConfig, DesignPoint};
use sensid::rng::rng_from;

#[test]
#[ignore]
fn probe_sweep_direct() {
    probe(false);
}

#[test]
#[ignore]
fn probe_sweep_emulated() {
    probe(true);
}

fn probe(use_emulator: bool) {
    let t0 = std::time::Instant::now();
    let truth = make_benchmark(&BenchmarkConfig::default()).unwrap();
    let design: Vec<DesignPoint> =
        latin_hypercube(&truth.simulator.design_bounds, 40, &mut rng_from(5))
            .unwrap()
            .into_iter()
            .map(DesignPoint::new)
            .collect();
    let dataset = generate_dataset(&truth, &design, 6).unwrap();
    let prior = sensid::calib::PriorSpec::uniform(&truth.simulator.calib_bounds);
    let opts = StudyOptions {
        use_emulator,
        ..Default::default()
    };
    let setup = StudySetup::build(&dataset, &truth.simulator, &prior, &opts, 11).unwrap();
    println!("setup built in {:?}", t0.elapsed());

    let subsets = enumerate_subsets(4).unwrap();
    let mcmc = McmcConfig::with_steps(20_000, 0);
    let t1 = std::time::Instant::now();
    let results = run_subset_study(&setup, &subsets, &mcmc, 100).unwrap();
    println!("sweep ({} chains) in {:?}", results.len(), t1.elapsed());

    println!("\nsubset |       p1       p2       p3       p4       p5  | conv acc");
    for r in &results {
        print!("{:>6} |", r.label);
        for k in 0..5 {
            print!(" {:8.4}", r.std[k]);
        }
        println!("  | {} {:.2}", r.converged, r.acceptance_rate);
    }
    println!("\nmeans:");
    for r in &results {
        print!("{:>6} |", r.label);
        for k in 0..5 {
            print!(" {:8.4}", r.mean[k]);
        }
        println!();
    }
}
