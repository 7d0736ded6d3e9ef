use sideways_core::progs::reference::{broadword_popcount_counted, HAKMEM_OPS};
use sideways_core::theory::lower_bound_audit;
use sideways_core::{Algorithm, Word};

use crate::Format;

/// Widths with measured columns.
pub const TABLE_WIDTHS: [u32; 2] = [8, 12];

struct Row {
    method: &'static str,
    ops: &'static str,
    lower: &'static str,
    upper: &'static str,
    measured: [String; 2],
    note: String,
}

fn worst_incdec(a: Algorithm, n: u32) -> String {
    let g = a.generate(n).expect("width in range");
    let r = lower_bound_audit(&g, n).expect("audit width in range");
    r.worst_incdec.to_string()
}

fn broadword_ops<T: sideways_core::Scalar>(n: u32) -> String {
    let w = Word::<T>::ones(n).expect("width fits storage");
    broadword_popcount_counted(&w).1.to_string()
}

fn rows() -> Vec<Row> {
    let restricted = |method, a, upper| Row {
        method,
        ops: "INC, DEC, AND, OR, MOV, 0",
        lower: "Ω(min(ν, n−ν))",
        upper,
        measured: TABLE_WIDTHS.map(|n| worst_incdec(a, n)),
        note: "worst-case INC/DEC count over all inputs".into(),
    };
    vec![
        restricted("wegner", Algorithm::Wegner, "O(ν)"),
        restricted("dense", Algorithm::Dense, "O(n−ν+log n)"),
        restricted("combined", Algorithm::Combined, "O(min(ν, n−ν+log n))"),
        Row {
            method: "pal",
            ops: "restricted + mult/div by 2",
            lower: "",
            upper: "",
            measured: ["n/a".into(), "n/a".into()],
            note: "not implemented".into(),
        },
        Row {
            method: "broadword",
            ops: "+, >>, AND",
            lower: "",
            upper: "O(log n)",
            measured: [broadword_ops::<u8>(8), broadword_ops::<u16>(12)],
            note: "word operations; width 12 uses 16-bit storage".into(),
        },
        Row {
            method: "multiplication",
            ops: "+, >>, AND, *",
            lower: "",
            upper: "O(1)",
            measured: ["n/a".into(), "n/a".into()],
            note: "not implemented".into(),
        },
        Row {
            method: "hakmem",
            ops: "-, >>, AND, %",
            lower: "",
            upper: "O(1)",
            measured: ["n/a".into(), "n/a".into()],
            note: format!("32-bit words only: {HAKMEM_OPS} word operations"),
        },
    ]
}

/// Complexity summary with measured operation counts at widths 8 and 12.
pub fn table(format: Format) -> String {
    let rows = rows();
    let [w0, w1] = TABLE_WIDTHS;
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&format!("method,ops,lower,upper,measured_n{w0},measured_n{w1},note\n"));
            for r in rows {
                out.push_str(&format!(
                    "{},\"{}\",\"{}\",\"{}\",{},{},\"{}\"\n",
                    r.method, r.ops, r.lower, r.upper, r.measured[0], r.measured[1], r.note
                ));
            }
        }
        Format::Markdown => {
            out.push_str(&format!(
                "| method | operations | lower bound | upper bound | n={w0} | n={w1} | note |\n"
            ));
            out.push_str("|---|---|---|---|---|---|---|\n");
            for r in rows {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} | {} |\n",
                    r.method, r.ops, r.lower, r.upper, r.measured[0], r.measured[1], r.note
                ));
            }
        }
    }
    out
}
