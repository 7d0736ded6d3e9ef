use sideways_core::progs::{
    combined_incdec, combined_incdec_bound, constant_program, dense_incdec, twobit_program,
    wegner_incdec, Algorithm, CONSTANT_STEP_FACTOR,
};
use sideways_core::rvm::{execute, HaltReason};
use sideways_core::Word64;

fn exhaustive(algo: Algorithm, width: u32, mut check: impl FnMut(Word64, u64, u64)) {
    let g = algo.generate(width).unwrap();
    for v in 0..1u64 << width {
        let x = Word64::new(width, v).unwrap();
        let r = execute(g.program(), x, 1_000_000, false).unwrap();
        assert_eq!(r.halt_reason, HaltReason::Out, "{algo} {x:?}");
        let out = r.output.unwrap().to_u64();
        assert_eq!(out, u64::from(x.popcount_naive()), "{algo} {x:?}");
        assert_eq!(r.counters.incdec_steps, g.predicted_incdec(x.popcount_naive()));
        check(x, out, r.counters.incdec_steps);
    }
}

#[test]
fn wegner_costs_two_per_one() {
    for n in 1..=12 {
        exhaustive(Algorithm::Wegner, n, |x, _, incdec| {
            assert_eq!(incdec, wegner_incdec(x.popcount_naive()));
        });
    }
}

#[test]
fn dense_costs_setup_plus_two_per_zero() {
    for n in 1..=12 {
        exhaustive(Algorithm::Dense, n, |x, _, incdec| {
            assert_eq!(incdec, dense_incdec(n, x.popcount_naive()));
        });
    }
}

#[test]
fn combined_stays_inside_envelope() {
    for n in 1..=12 {
        exhaustive(Algorithm::Combined, n, |x, _, incdec| {
            let nu = x.popcount_naive();
            assert_eq!(incdec, combined_incdec(n, nu));
            assert!(incdec <= combined_incdec_bound(n, nu), "n={n} {x:?}");
        });
    }
}

#[test]
fn combined_beyond_exhaustive_range() {
    // Spot checks at larger widths against the closed form.
    let g = Algorithm::Combined.generate(64).unwrap();
    for v in [0u64, 1, u64::MAX, u64::MAX - 1, 0xF0F0_F0F0_F0F0_F0F0, 1 << 63] {
        let x = Word64::new(64, v).unwrap();
        let r = execute(g.program(), x, 1_000_000, false).unwrap();
        assert_eq!(r.output.unwrap().to_u64(), u64::from(v.count_ones()));
        assert_eq!(r.counters.incdec_steps, combined_incdec(64, v.count_ones()));
    }
}

#[test]
fn twobit_all_inputs() {
    let g = twobit_program();
    for (bits, nu, incdec) in [("00", 0, 0), ("01", 1, 1), ("10", 1, 1), ("11", 2, 1)] {
        let r = execute(g.program(), bits.parse::<Word64>().unwrap(), 100, false).unwrap();
        assert_eq!(r.output.unwrap().to_u64(), nu);
        assert_eq!(r.counters.incdec_steps, incdec);
    }
}

#[test]
fn constant_generation_is_logarithmic() {
    for t in 0..=4096u64 {
        let g = constant_program(t, 13).unwrap();
        let r = execute(g.program(), Word64::zero(13).unwrap(), 10_000, false).unwrap();
        assert_eq!(r.output.unwrap().to_u64(), t);
        assert_eq!(r.counters.incdec_steps, g.predicted_incdec(0));
        let limit = CONSTANT_STEP_FACTOR * ((t + 2) as f64).log2();
        assert!((r.counters.total_steps as f64) <= limit, "t={t}");
    }
}
