use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sideways_core::rvm::{execute, parse_program};
use sideways_core::theory::random_program;
use sideways_core::{Algorithm, Word64};

fn arb_program() -> impl Strategy<Value = sideways_core::Program> {
    any::<u64>().prop_map(|seed| random_program(&mut ChaCha8Rng::seed_from_u64(seed), 20, 6))
}

fn arb_input() -> impl Strategy<Value = Word64> {
    (1u32..=16, any::<u64>()).prop_map(|(n, v)| Word64::reduced(n, v).unwrap())
}

proptest! {
    #[test]
    fn execution_is_deterministic(p in arb_program(), x in arb_input()) {
        let a = execute(&p, x, 2_000, true).unwrap();
        let b = execute(&p, x, 2_000, true).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn counters_match_trace(p in arb_program(), x in arb_input()) {
        let r = execute(&p, x, 2_000, true).unwrap();
        let trace = r.trace.as_ref().unwrap();
        prop_assert!(r.counters.incdec_steps <= r.counters.total_steps);
        prop_assert_eq!(trace.len() as u64, r.counters.total_steps + 1);
        let events = trace
            .windows(2)
            .filter(|w| p.instructions()[w[0].pc].is_incdec())
            .count() as u64;
        prop_assert_eq!(events, r.counters.incdec_steps);
        for pair in trace.windows(2) {
            prop_assert!(pair[0].incdec_index <= pair[1].incdec_index);
        }
        for s in trace {
            prop_assert!(s.registers.iter().all(|w| w.width() == x.width()));
        }
        prop_assert_eq!(r.output.is_some(), r.halt_reason == sideways_core::rvm::HaltReason::Out);
    }

    #[test]
    fn program_text_roundtrips(p in arb_program()) {
        prop_assert_eq!(parse_program(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn generated_programs_count_wide_words(n in 13u32..=64, v in any::<u64>()) {
        let x = Word64::reduced(n, v).unwrap();
        for algo in [Algorithm::Wegner, Algorithm::Dense, Algorithm::Combined] {
            let g = algo.generate(n).unwrap();
            let r = execute(g.program(), x, 1_000_000, false).unwrap();
            prop_assert_eq!(r.output.unwrap().to_u64(), u64::from(x.popcount_naive()));
            prop_assert_eq!(r.counters.incdec_steps, g.predicted_incdec(x.popcount_naive()));
        }
    }
}

#[test]
fn literals_are_rejected() {
    for text in ["INC 1", "MOV x 0", "BZ x 3", "ZERO 0x1", "OR x -1"] {
        assert!(parse_program(text).is_err(), "{text}");
    }
}
