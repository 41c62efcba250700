mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use valuesched_core::moead::Moead;
use valuesched_core::{Instance, MoeadConfig, Variant};

#[test]
fn short_runs_keep_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = MoeadConfig {
        generations: 50,
        ..MoeadConfig::default().with_population(20)
    };
    for case in 0..100u64 {
        let s = common::random_scenario(&mut rng, &common::Shape::medium());
        let inst = Instance::new(&s).unwrap();
        let variant = Variant::ALL[case as usize % 2];
        let cfg = MoeadConfig { seed: case, ..cfg.clone() };
        let mut engine = Moead::new(&inst, cfg.clone(), variant).unwrap();
        let mut ideal = engine.ideal();
        while !engine.is_finished() {
            engine.step();
            let now = engine.ideal();
            assert!(now[0] <= ideal[0] && now[1] <= ideal[1], "case {case}: ideal moved back");
            ideal = now;
            assert!(engine.archive().is_mutually_non_dominated(), "case {case}");
        }
        for e in engine.archive().entries() {
            assert!(e.chromosome.is_valid_for(&inst));
            let ev = e.chromosome.evaluate(&inst);
            assert_eq!(ev.objectives, e.objectives);
        }
        let again = valuesched_core::run(&inst, &cfg, variant).unwrap();
        assert_eq!(&again, engine.archive(), "case {case}: not deterministic");
    }
}
