use rayon::prelude::*;

use sideways_core::progs::{
    combined_incdec_bound, constant_incdec, constant_program, GeneratedProgram, CONSTANT_STEP_FACTOR,
};
use sideways_core::rvm::{execute_with, Semantics, Standard};
use sideways_core::theory::faults::Fault;
use sideways_core::theory::{lower_bound_audit_with, msb_flip_probe, AdversaryParams};
use sideways_core::{Algorithm, Word64};

use crate::UsageError;

/// Largest width the exhaustive checks accept.
pub const MAX_VERIFY_WIDTH: u32 = 12;

/// Per-run instruction budget. The shipped counters need a few hundred
/// steps at most below width 13, so a faulty interpreter that loops is cut
/// off quickly.
pub const VERIFY_BUDGET: u64 = 10_000;

/// Largest target of the constant-construction check.
pub const CONSTANT_LIMIT: u64 = 4096;
const CONSTANT_WIDTH: u32 = 13;

/// Failure lines kept per check; the rest are only counted.
const KEEP: usize = 16;

pub const VERIFY_HEADER: &str = "status,check,program,width,subject,detail";

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub max_width: u32,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_width: MAX_VERIFY_WIDTH,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    /// One CSV line per check, `ok` or `skip` or `FAIL`.
    pub lines: Vec<String>,
    pub checks: u64,
    pub failures: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn text(&self) -> String {
        let mut s = String::from(VERIFY_HEADER);
        s.push('\n');
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s.push_str(&format!(
            "# {} checks, {} failures: {}\n",
            self.checks,
            self.failures,
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        s
    }

    fn ok(&mut self, check: &str, program: &str, width: u32, subject: &str) {
        self.checks += 1;
        self.lines.push(format!("ok,{check},{program},{width},{subject},"));
    }

    fn skip(&mut self, check: &str, program: &str, width: u32, why: &str) {
        self.lines.push(format!("skip,{check},{program},{width},,{why}"));
    }

    /// Records one check with all its failing cases.
    fn record(&mut self, check: &str, program: &str, width: u32, subject: &str, fails: Vec<(String, String)>) {
        if fails.is_empty() {
            return self.ok(check, program, width, subject);
        }
        self.checks += 1;
        self.failures += fails.len() as u64;
        let total = fails.len();
        for (input, detail) in fails.into_iter().take(KEEP) {
            self.lines.push(format!("FAIL,{check},{program},{width},{input},{detail}"));
        }
        if total > KEEP {
            self.lines
                .push(format!("FAIL,{check},{program},{width},,{} more failures", total - KEEP));
        }
    }
}

/// Exhaustive correctness and step-count checks at widths `1..=max_width`,
/// optionally under a faulty interpreter.
pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport, UsageError> {
    if !(1..=MAX_VERIFY_WIDTH).contains(&cfg.max_width) {
        return Err(UsageError(format!(
            "verify runs exhaustively and supports widths 1..={MAX_VERIFY_WIDTH}, got {}",
            cfg.max_width
        )));
    }
    let semantics: &dyn Semantics<u64> = match cfg.fault {
        None => &Standard,
        Some(f) => f.semantics(),
    };
    let mut report = VerifyReport::default();

    naive_identity(&mut report);
    for a in [Algorithm::Wegner, Algorithm::Dense] {
        report.skip("oracle", a.name(), 1, "restricted counters start at width 2");
    }

    for n in 2..=cfg.max_width {
        let mut algos = vec![Algorithm::Wegner, Algorithm::Dense, Algorithm::Combined];
        if n == 2 {
            algos.push(Algorithm::TwoBit);
        }
        for a in algos {
            let g = a.generate(n).map_err(UsageError::from)?;
            check_counter(&mut report, &g, semantics);
            check_audit(&mut report, &g, semantics);
            check_probes(&mut report, &g);
        }
    }

    check_constants(&mut report, semantics);
    Ok(report)
}

fn naive_identity(report: &mut VerifyReport) {
    let mut fails = Vec::new();
    for v in 0..=1u64 {
        let w = Word64::new(1, v).expect("1-bit value");
        if u64::from(w.popcount_naive()) != v {
            fails.push((w.to_bits(), format!("popcount {} != value", w.popcount_naive())));
        }
    }
    report.record("identity", "naive", 1, "popcount(x) = x", fails);
}

fn check_counter(report: &mut VerifyReport, g: &GeneratedProgram, semantics: &dyn Semantics<u64>) {
    let n = g.width();
    let algo = g.algorithm().expect("counter program");
    let name = algo.name();
    let runs: Vec<(Word64, Option<u64>, u64)> = (0..1u64 << n)
        .into_par_iter()
        .map(|v| {
            let x = Word64::new(n, v).expect("v < 2^n");
            let r = execute_with(g.program(), x, VERIFY_BUDGET, semantics, &mut ()).expect("budget is positive");
            (x, r.output.map(|w| w.to_u64()), r.counters.incdec_steps)
        })
        .collect();

    let subject = format!("all {} inputs", runs.len());
    let mut oracle = Vec::new();
    let mut law = Vec::new();
    let mut bound = Vec::new();
    for &(x, out, incdec) in &runs {
        let nu = x.popcount_naive();
        if out != Some(u64::from(nu)) {
            let got = out.map_or("none".to_owned(), |o| o.to_string());
            oracle.push((x.to_bits(), format!("output {got} expected {nu}")));
        }
        let want = g.predicted_incdec(nu);
        if incdec != want {
            law.push((x.to_bits(), format!("incdec {incdec} expected {want}")));
        }
        if algo == Algorithm::Combined {
            let b = combined_incdec_bound(n, nu);
            if incdec > b {
                bound.push((x.to_bits(), format!("incdec {incdec} above {b}")));
            }
        }
    }
    report.record("oracle", name, n, &subject, oracle);
    report.record("step-law", name, n, &subject, law);
    if algo == Algorithm::Combined {
        report.record("combined-bound", name, n, &subject, bound);
    }
    if algo == Algorithm::TwoBit {
        let fails = runs
            .iter()
            .filter(|&&(x, _, incdec)| !x.is_zero() && incdec != 1)
            .map(|&(x, _, incdec)| (x.to_bits(), format!("incdec {incdec} expected 1")))
            .collect();
        report.record("twobit-exact", name, n, "nonzero inputs", fails);
    }
}

fn check_audit(report: &mut VerifyReport, g: &GeneratedProgram, semantics: &dyn Semantics<u64>) {
    let n = g.width();
    let name = g.algorithm().expect("counter program").name();
    match lower_bound_audit_with(g, n, semantics, VERIFY_BUDGET) {
        Ok(a) => {
            let fails = a
                .failures
                .iter()
                .map(|f| {
                    let got = f.output.map_or("none".to_owned(), |o| o.to_string());
                    (
                        f.input.clone(),
                        format!("{:?} nu={} output={got} incdec={} bound={}", f.kind, f.nu, f.incdec, f.bound),
                    )
                })
                .collect();
            report.record("lower-bound", name, n, &format!("{} inputs", a.bound_checked), fails);
        }
        Err(e) => report.record("lower-bound", name, n, "", vec![(String::new(), e.to_string())]),
    }
}

/// MSB-flip probes over every `e = d` adversary word that is not balanced.
/// These always use the standard interpreter.
fn check_probes(report: &mut VerifyReport, g: &GeneratedProgram) {
    let n = g.width();
    let name = g.algorithm().expect("counter program").name();
    let mut fails = Vec::new();
    let mut probes = 0;
    for m in 0..n.div_ceil(2) {
        for e in [false, true] {
            let p = AdversaryParams::new(e, m, e, n).expect("2m < n");
            if 2 * p.nu() == n {
                continue;
            }
            probes += 1;
            match msb_flip_probe(g, &p, VERIFY_BUDGET) {
                Ok(r) if r.holds => {}
                Ok(r) => {
                    let d = r.divergence.expect("failed probe has a divergence");
                    fails.push((
                        p.to_bits(),
                        format!("diverged at i={} < {} (stream {})", d.incdec_index, r.bound, d.stream_index),
                    ));
                }
                Err(e) => fails.push((p.to_bits(), e.to_string())),
            }
        }
    }
    report.record("msb-flip", name, n, &format!("{probes} adversary words"), fails);
}

fn check_constants(report: &mut VerifyReport, semantics: &dyn Semantics<u64>) {
    let fails: Vec<(String, String)> = (0..=CONSTANT_LIMIT)
        .into_par_iter()
        .filter_map(|t| {
            let g = constant_program(t, CONSTANT_WIDTH).expect("t fits");
            let zero = Word64::zero(CONSTANT_WIDTH).expect("valid width");
            let r = execute_with(g.program(), zero, VERIFY_BUDGET, semantics, &mut ()).expect("budget is positive");
            let limit = CONSTANT_STEP_FACTOR * ((t + 2) as f64).log2();
            let out = r.output.map(|w| w.to_u64());
            if out != Some(t) {
                let got = out.map_or("none".to_owned(), |o| o.to_string());
                Some((t.to_string(), format!("built {got}")))
            } else if r.counters.incdec_steps != constant_incdec(t) {
                Some((t.to_string(), format!("incdec {} expected {}", r.counters.incdec_steps, constant_incdec(t))))
            } else if r.counters.total_steps as f64 > limit {
                Some((t.to_string(), format!("total {} above {limit:.2}", r.counters.total_steps)))
            } else {
                None
            }
        })
        .collect();
    report.record(
        "constant",
        "constant",
        CONSTANT_WIDTH,
        &format!("targets 0..={CONSTANT_LIMIT}"),
        fails,
    );
}
