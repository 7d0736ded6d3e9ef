use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sideways_core::rvm::execute;
use sideways_core::{Algorithm, Word64};

use crate::{Format, UsageError};

pub const CSV_HEADER: &str = "input_bits,nu,output,incdec_steps,total_steps";

/// Widths up to this are swept exhaustively; wider ones are sampled.
pub const EXHAUSTIVE_LIMIT: u32 = 20;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub width: u32,
    pub algo: Algorithm,
    pub seed: u64,
    pub samples: usize,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub input: Word64,
    pub nu: u32,
    /// Absent when the run hit the budget.
    pub output: Option<u64>,
    pub incdec_steps: u64,
    pub total_steps: u64,
}

fn inputs(cfg: &SweepConfig) -> Vec<u64> {
    if cfg.width <= EXHAUSTIVE_LIMIT {
        return (0..1u64 << cfg.width).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let top = if cfg.width == 64 { u64::MAX } else { (1u64 << cfg.width) - 1 };
    (0..cfg.samples).map(|_| rng.gen_range(0..=top)).collect()
}

pub fn sweep_rows(cfg: &SweepConfig) -> Result<Vec<SweepRow>, UsageError> {
    if !cfg.algo.supports_width(cfg.width) {
        return Err(UsageError(format!("{} does not run at width {}", cfg.algo, cfg.width)));
    }
    if cfg.budget == 0 {
        return Err(UsageError("budget must be positive".into()));
    }
    let g = cfg.algo.generate(cfg.width)?;
    Ok(inputs(cfg)
        .into_par_iter()
        .map(|v| {
            let input = Word64::new(cfg.width, v).expect("value fits width");
            let r = execute(g.program(), input, cfg.budget, false).expect("budget is positive");
            SweepRow {
                input,
                nu: input.popcount_naive(),
                output: r.output.map(|w| w.to_u64()),
                incdec_steps: r.counters.incdec_steps,
                total_steps: r.counters.total_steps,
            }
        })
        .collect())
}

/// One row per input: `input_bits,nu,output,incdec_steps,total_steps`.
pub fn sweep(cfg: &SweepConfig, format: Format) -> Result<String, UsageError> {
    let rows = sweep_rows(cfg)?;
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
        }
        Format::Markdown => {
            out.push_str("| input_bits | nu | output | incdec_steps | total_steps |\n");
            out.push_str("|---|---|---|---|---|\n");
        }
    }
    for r in rows {
        let output = r.output.map(|o| o.to_string()).unwrap_or_default();
        match format {
            Format::Csv => out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.input, r.nu, output, r.incdec_steps, r.total_steps
            )),
            Format::Markdown => out.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                r.input, r.nu, output, r.incdec_steps, r.total_steps
            )),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(width: u32, algo: Algorithm) -> SweepConfig {
        SweepConfig {
            width,
            algo,
            seed: 1,
            samples: 64,
            budget: 1_000_000,
        }
    }

    #[test]
    fn wegner_width_4() {
        let csv = sweep(&cfg(4, Algorithm::Wegner), Format::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 17);
        let row = lines.iter().find(|l| l.starts_with("1011,")).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(&fields[..4], ["1011", "3", "3", "6"]);
        assert!(lines.contains(&"0000,0,0,0,2"));
    }

    #[test]
    fn dense_width_4() {
        let csv = sweep(&cfg(4, Algorithm::Dense), Format::Csv).unwrap();
        let row = csv.lines().find(|l| l.starts_with("1111,")).unwrap();
        assert!(row.starts_with("1111,4,4,4,"));
        let zero = csv.lines().find(|l| l.starts_with("0000,")).unwrap();
        assert!(zero.starts_with("0000,0,0,"));
    }

    #[test]
    fn sampled_sweep_is_seeded() {
        let c = cfg(40, Algorithm::Combined);
        let a = sweep(&c, Format::Csv).unwrap();
        assert_eq!(a.lines().count(), 65);
        assert_eq!(a, sweep(&c, Format::Csv).unwrap());
        let other = SweepConfig { seed: 2, ..c };
        assert_ne!(a, sweep(&other, Format::Csv).unwrap());
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(sweep(&cfg(3, Algorithm::TwoBit), Format::Csv).is_err());
        assert!(sweep(&cfg(0, Algorithm::Wegner), Format::Csv).is_err());
        assert!(sweep(&cfg(65, Algorithm::Dense), Format::Csv).is_err());
    }
}
