//! Checks the lifted engine against plain per-configuration runs, on the
//! travel bundle and on a batch of random instances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vdatalog::oracle::{
    check_theorem1, plain_infer, restrict, Verdict, DEFAULT_MAX_CONFIGURATIONS,
};
use vdatalog::pcbdd::BddManager;
use vdatalog::workload::{random_bundle, Shape};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for i in 0..50 {
        let shape = Shape::ALL[i % Shape::ALL.len()];
        let bundle = random_bundle(&mut rng, shape, 30, 100, 6);
        let mut mgr = BddManager::new();
        let (edb, config) = bundle.load(&mut mgr).unwrap();
        match check_theorem1(
            &bundle.program,
            &edb,
            &config,
            &mut mgr,
            DEFAULT_MAX_CONFIGURATIONS,
        )
        .unwrap()
        {
            Verdict::Pass { configurations } => checked += configurations,
            Verdict::Counterexample(c) => {
                print!("{}", c.report());
                std::process::exit(1);
            }
        }
    }
    println!("50 random instances agree in {checked} configurations");

    // one configuration by hand
    let bundle = random_bundle(&mut rng, Shape::TransitiveClosure, 8, 12, 3);
    let mut mgr = BddManager::new();
    let (edb, config) = bundle.load(&mut mgr).unwrap();
    if let Some(conf) = mgr
        .enumerate_configurations(config.feature_model, 64)
        .unwrap()
        .first()
    {
        let input = restrict(&edb, conf, &mgr);
        let out = plain_infer(&bundle.program, &input);
        println!(
            "in {}: {} edges, {} paths",
            conf.describe(mgr.features()),
            input.tuples("Edge").len(),
            out.tuples("Path").len()
        );
    }
}
