use thiserror::Error;

use super::{Clause, CnfFormula, Origin};

/// DIMACS ingestion failures; every variant names the 1-based input line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: malformed or missing `p cnf <vars> <clauses>` header")]
    MalformedHeader { line: usize },
    #[error("line {line}: `{token}` is not an integer literal")]
    MalformedLiteral { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange { line: usize, literal: i32, num_vars: usize },
    #[error("line {line}: variable {var} repeated in clause")]
    RepeatedVariableInClause { line: usize, var: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("line {line}: clause not terminated by 0")]
    UnterminatedClause { line: usize },
    #[error("line {line}: header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { line: usize, declared: usize, found: usize },
}

/// Parses DIMACS CNF text. Clause order is preserved; clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut clause_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() || !current.is_empty() || !clauses.is_empty() {
                return Err(DimacsError::MalformedHeader { line });
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or(DimacsError::MalformedHeader { line })?);
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::MalformedHeader { line })?;
        for token in trimmed.split_whitespace() {
            let literal: i32 =
                token.parse().map_err(|_| DimacsError::MalformedLiteral { line, token: token.to_string() })?;
            if literal == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line });
                }
                let lits = std::mem::take(&mut current);
                clauses.push(Clause::new(lits).expect("literals validated while reading"));
                continue;
            }
            if literal.unsigned_abs() as usize > num_vars {
                return Err(DimacsError::LiteralOutOfRange { line, literal, num_vars });
            }
            if current.iter().any(|l| l.unsigned_abs() == literal.unsigned_abs()) {
                return Err(DimacsError::RepeatedVariableInClause { line, var: literal.unsigned_abs() as usize });
            }
            if current.is_empty() {
                clause_line = line;
            }
            current.push(literal);
        }
    }

    let (num_vars, declared) = header.ok_or(DimacsError::MalformedHeader { line: last_line.max(1) })?;
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause { line: clause_line });
    }
    if declared != clauses.len() {
        return Err(DimacsError::ClauseCountMismatch { line: last_line.max(1), declared, found: clauses.len() });
    }
    Ok(CnfFormula::new(num_vars, clauses, Origin::Parsed).expect("ranges validated while reading"))
}
