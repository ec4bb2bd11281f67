mod common;

use jones_core::bracket::{bracket_oracle, bracket_split, jones_of_diagram, split, Engine, EngineOptions};
use jones_core::diagram::crossing_count;
use jones_core::par::Parallelism;
use proptest::prelude::*;

#[test]
fn engines_agree_on_random_polygons() {
    for (_, d) in common::corpus(1, 150, 10) {
        let oracle = jones_of_diagram(&d, Engine::Oracle).unwrap();
        assert_eq!(jones_of_diagram(&d, Engine::Split).unwrap(), oracle, "{}", d.to_json());
        assert_eq!(jones_of_diagram(&d, Engine::SplitRm).unwrap(), oracle, "{}", d.to_json());
    }
}

#[test]
fn sequential_and_parallel_match() {
    for (_, d) in common::corpus(2, 30, 14) {
        let seq = EngineOptions { parallelism: Parallelism::Sequential, ..Default::default() };
        let par = EngineOptions::default();
        assert_eq!(bracket_split(&d, &seq).unwrap(), bracket_split(&d, &par).unwrap());
        assert_eq!(bracket_oracle(&d).unwrap(), bracket_split(&d, &seq).unwrap());
    }
}

#[test]
fn split_covers_every_crossing() {
    for (_, d) in common::corpus(3, 60, 16) {
        if crossing_count(&d) == 0 {
            continue;
        }
        let (l1, l2) = split(&d).unwrap();
        let n = crossing_count(&d);
        assert_eq!(l1.crossing_count() + l2.crossing_count(), n);
        assert!(l1.crossing_count() >= 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn split_matches_oracle(seed in any::<u64>()) {
        let (_, d) = common::corpus(seed, 1, 12).pop().unwrap();
        prop_assert_eq!(bracket_split(&d, &EngineOptions::default()).unwrap(), bracket_oracle(&d).unwrap());
    }
}
