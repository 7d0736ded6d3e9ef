use std::collections::HashMap;

use thiserror::Error;

use super::{Instruction, Program, Reg, Target};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown opcode {0:?}")]
    UnknownOpcode(String),
    #[error("{opcode} takes {expected} operand(s), got {actual}")]
    Arity {
        opcode: String,
        expected: usize,
        actual: usize,
    },
    #[error("constant {0:?} not allowed; only ZERO produces a constant")]
    Constant(String),
    #[error("invalid identifier {0:?}")]
    BadIdentifier(String),
    #[error("unresolved label {0:?}")]
    UnresolvedLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("too many registers")]
    TooManyRegisters,
}

enum Operand {
    Reg,
    Label,
}

fn signature(op: &str) -> Option<&'static [Operand]> {
    use Operand::*;
    Some(match op {
        "ZERO" | "INC" | "DEC" | "OUT" => &[Reg],
        "MOV" | "AND" | "OR" => &[Reg, Reg],
        "BZ" | "BNZ" => &[Reg, Label],
        "BEQ" | "BLT" => &[Reg, Reg, Label],
        "JMP" => &[Label],
        _ => return None,
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn looks_numeric(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '#' || c == '$')
}

struct Pending<'a> {
    line: usize,
    opcode: String,
    regs: Vec<Reg>,
    label: Option<&'a str>,
}

/// Parses program text.
///
/// One instruction per line, an optional `label:` prefix, operands
/// separated by whitespace (commas are accepted too), and `;` starting a
/// comment. Registers are declared by use and start at zero; `x` holds the
/// input. Numeric literals are rejected everywhere.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut registers: Vec<String> = vec!["x".to_owned()];
    let mut reg_index: HashMap<String, u16> = HashMap::from([("x".to_owned(), 0)]);
    let mut labels: Vec<(String, usize)> = Vec::new();
    let mut pending: Vec<Pending<'_>> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let err = |kind| ParseError { line, kind };
        let code = raw.split(';').next().unwrap_or("").trim();
        if code.is_empty() {
            continue;
        }
        let mut body = code;
        if let Some((head, rest)) = code.split_once(':') {
            let name = head.trim();
            if !is_identifier(name) {
                return Err(err(ParseErrorKind::BadIdentifier(name.to_owned())));
            }
            if labels.iter().any(|(l, _)| l == name) {
                return Err(err(ParseErrorKind::DuplicateLabel(name.to_owned())));
            }
            labels.push((name.to_owned(), pending.len()));
            body = rest.trim();
            if body.is_empty() {
                continue;
            }
        }

        let mut tokens = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let opcode = tokens.next().expect("non-empty body").to_ascii_uppercase();
        let operands: Vec<&str> = tokens.collect();
        let sig = signature(&opcode).ok_or_else(|| err(ParseErrorKind::UnknownOpcode(opcode.clone())))?;
        if let Some(lit) = operands.iter().find(|t| looks_numeric(t)) {
            return Err(err(ParseErrorKind::Constant((*lit).to_owned())));
        }
        if operands.len() != sig.len() {
            return Err(err(ParseErrorKind::Arity {
                opcode,
                expected: sig.len(),
                actual: operands.len(),
            }));
        }

        let mut regs = Vec::new();
        let mut label = None;
        for (kind, tok) in sig.iter().zip(&operands) {
            if !is_identifier(tok) {
                return Err(err(ParseErrorKind::BadIdentifier((*tok).to_owned())));
            }
            match kind {
                Operand::Reg => {
                    let id = match reg_index.get(*tok) {
                        Some(&id) => id,
                        None => {
                            let id = u16::try_from(registers.len())
                                .map_err(|_| err(ParseErrorKind::TooManyRegisters))?;
                            registers.push((*tok).to_owned());
                            reg_index.insert((*tok).to_owned(), id);
                            id
                        }
                    };
                    regs.push(Reg(id));
                }
                Operand::Label => label = Some(*tok),
            }
        }
        pending.push(Pending {
            line,
            opcode,
            regs,
            label,
        });
    }

    let resolve = |p: &Pending<'_>| -> Result<Target, ParseError> {
        let name = p.label.expect("signature has a label operand");
        labels
            .iter()
            .find(|(l, _)| l == name)
            .map(|&(_, i)| Target(i))
            .ok_or_else(|| ParseError {
                line: p.line,
                kind: ParseErrorKind::UnresolvedLabel(name.to_owned()),
            })
    };

    let instructions = pending
        .iter()
        .map(|p| {
            let r = &p.regs;
            Ok(match p.opcode.as_str() {
                "ZERO" => Instruction::Zero(r[0]),
                "MOV" => Instruction::Mov(r[0], r[1]),
                "INC" => Instruction::Inc(r[0]),
                "DEC" => Instruction::Dec(r[0]),
                "AND" => Instruction::And(r[0], r[1]),
                "OR" => Instruction::Or(r[0], r[1]),
                "BZ" => Instruction::Bz(r[0], resolve(p)?),
                "BNZ" => Instruction::Bnz(r[0], resolve(p)?),
                "BEQ" => Instruction::Beq(r[0], r[1], resolve(p)?),
                "BLT" => Instruction::Blt(r[0], r[1], resolve(p)?),
                "JMP" => Instruction::Jmp(resolve(p)?),
                "OUT" => Instruction::Out(r[0]),
                _ => unreachable!("opcode validated against signature table"),
            })
        })
        .collect::<Result<Vec<_>, ParseError>>()?;

    Ok(Program {
        instructions,
        registers: registers.into(),
        labels,
    })
}
