mod common;

use common::{enumerate_log_masses, log_length};
use moran_core::estimators::{log_mass_and_length, partition_sum};
use moran_core::model::{cylinder, locate, Level, LevelSchedule, ModelParams, Word};
use proptest::prelude::*;

fn factorial_model() -> ModelParams {
    ModelParams::new(7.0, 2.6, 0.3, 0.2, LevelSchedule::factorial()).unwrap()
}

#[test]
fn cylinders_tile_in_lexicographic_order() {
    let m = factorial_model();
    for n in 1..=12usize {
        let lm = enumerate_log_masses(&m, n as Level);
        let mut prev_right = f64::NEG_INFINITY;
        for (i, w) in Word::all(n).enumerate() {
            let c = cylinder(&m, &w).unwrap();
            assert!((c.log_measure - lm[i]).abs() < 1e-12);
            assert!((c.log_length - log_length(&m, n as Level)).abs() < 1e-12);
            assert!(c.left > prev_right, "cylinders overlap at n = {n}");
            prev_right = c.right();
        }
        assert!(prev_right <= 1.0 + 1e-12);
    }
}

#[test]
fn level_seven_log_masses_from_words() {
    let m = ModelParams::reference();
    let lm = enumerate_log_masses(&m, 7);
    for (i, w) in Word::all(7).enumerate() {
        let (mass, len) = log_mass_and_length(&m, &w, &[7]).unwrap()[0];
        assert!((mass - lm[i]).abs() < 1e-12);
        assert!((len - log_length(&m, 7)).abs() < 1e-12);
    }
}

#[test]
fn partition_sum_at_zero_counts_words() {
    let m = factorial_model();
    for n in [1, 5, 30, 500] {
        let v = partition_sum(&m, n, 0.0).unwrap();
        assert!((v - n as f64 * 2f64.ln()).abs() < 1e-9 * n as f64);
    }
}

proptest! {
    #[test]
    fn locate_inverts_cylinder(digits in proptest::collection::vec(0u8..=1, 1..14), frac in 0.0f64..1.0) {
        let m = factorial_model();
        let w = Word::new(digits).unwrap();
        let c = cylinder(&m, &w).unwrap();
        let x = c.left + frac * c.length();
        // a point well inside I_w resolves to w; depth stays where lengths dwarf rounding
        prop_assume!(frac > 1e-6 && frac < 1.0 - 1e-6);
        let found = locate(&m, x, w.len()).unwrap();
        prop_assert_eq!(found, w);
    }
}
