use valuesched_core::harness::{default_dz_pairs, reference_scenario};
use valuesched_core::{validate_scenario, Instance, Variant};

#[test]
fn reference_first_element_is_the_worked_example() {
    let s = reference_scenario();
    assert!(validate_scenario(&s).is_valid());
    let rows: Vec<(&str, &str, f64, f64)> = s.orders[0].jobs[0]
        .options
        .iter()
        .map(|o| (o.machine_id.as_str(), o.mode_id.as_str(), o.duration_s, o.max_profit))
        .collect();
    assert_eq!(
        rows,
        vec![
            ("M1", "Mode 1", 2833.5, 167.0),
            ("M1", "Mode 2", 2956.2, 168.4),
            ("M1", "Mode 3", 3042.1, 175.9),
            ("M1", "Mode 4", 3174.1, 192.1),
            ("M2", "Mode 1", 2033.5, 230.0),
            ("M2", "Mode 2", 2156.2, 237.1),
            ("M2", "Mode 3", 2242.1, 238.6),
            ("M2", "Mode 4", 2674.1, 273.1),
            ("M3", "Mode 1", 1256.2, 481.6),
            ("M3", "Mode 2", 1633.5, 462.1),
            ("M3", "Mode 3", 1842.1, 519.3),
            ("M3", "Mode 4", 1974.1, 596.9),
        ]
    );
    for o in &s.orders {
        assert_eq!((o.curve.d_s, o.curve.z_s), (30_000.0, 40_000.0));
    }
}

#[test]
fn reference_plant_cannot_finish_everything_in_time() {
    let s = reference_scenario();
    let fastest: f64 = s
        .orders
        .iter()
        .map(|o| o.jobs[0].options.iter().map(|p| p.duration_s).fold(f64::INFINITY, f64::min))
        .sum();
    // one serial resource, so the shortest makespan is the sum of fastest options
    assert!(fastest > 45_000.0);
    let inst = Instance::new(&s).unwrap();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    let c = valuesched_core::Chromosome::random(&inst, Variant::Standard, &mut rng);
    assert!(c.evaluate(&inst).objectives.makespan_s >= fastest);
}

#[test]
fn sweep_pairs() {
    let p = default_dz_pairs();
    assert_eq!(p.len(), 14);
    assert_eq!(p[0], (5000.0, 10000.0));
    assert_eq!(p[13], (35000.0, 45000.0));
    assert!(p.iter().all(|(d, z)| d < z));
}
