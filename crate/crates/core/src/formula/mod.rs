//! CNF formulas over indexed Boolean variables.
//!
//! Variables are numbered `1..=num_vars`; a literal is a nonzero `i32` whose
//! sign carries the polarity. Assignments index coordinate `i - 1` for
//! variable `i`, and the packed-word form used by enumeration stores variable
//! `i` in bit `i - 1`.

mod coloring;
mod dimacs;
mod random;
mod reduce;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use coloring::{encode_three_color, ColorVarMap};
pub use dimacs::{parse_dimacs, DimacsError};
pub use random::random_ksat;
pub use reduce::{localize_auxiliaries, pad_to_3cnf, split_to_3cnf, AuxMap, CopyMap};

/// Errors raised while constructing or transforming formulas.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("clause is empty")]
    EmptyClause,
    #[error("literal 0 is not a valid literal")]
    ZeroLiteral,
    #[error("variable {var} repeated in clause")]
    RepeatedVariable { var: usize },
    #[error("literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange { literal: i32, num_vars: usize },
    #[error("assignment has length {found}, formula has {expected} variables")]
    LengthMismatch { expected: usize, found: usize },
    #[error("clause width {k} exceeds variable count {n}")]
    WidthExceedsVars { k: usize, n: usize },
    #[error("gadget partition covers {partition} clauses, formula has {clauses}")]
    IncompletePartition { clauses: usize, partition: usize },
}

/// Where a formula came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Parsed,
    Generated,
    Reduced,
    Gadget,
}

/// A disjunction of literals on distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Clause {
    lits: Vec<i32>,
}

impl Clause {
    pub fn new(lits: Vec<i32>) -> Result<Self, FormulaError> {
        if lits.is_empty() {
            return Err(FormulaError::EmptyClause);
        }
        for (i, &l) in lits.iter().enumerate() {
            if l == 0 {
                return Err(FormulaError::ZeroLiteral);
            }
            if lits[..i].iter().any(|&p| p.unsigned_abs() == l.unsigned_abs()) {
                return Err(FormulaError::RepeatedVariable { var: l.unsigned_abs() as usize });
            }
        }
        Ok(Self { lits })
    }

    pub fn lits(&self) -> &[i32] {
        &self.lits
    }

    pub fn width(&self) -> usize {
        self.lits.len()
    }

    /// Underlying variable indices, in literal order.
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.lits.iter().map(|l| l.unsigned_abs() as usize)
    }

    pub fn max_var(&self) -> usize {
        self.vars().max().unwrap_or(0)
    }

    pub fn is_satisfied_by(&self, x: &Assignment) -> bool {
        self.lits.iter().any(|&l| x.get(l.unsigned_abs() as usize) == (l > 0))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " ∨ ")?;
            }
            if *l < 0 {
                write!(f, "¬")?;
            }
            write!(f, "x{}", l.unsigned_abs())?;
        }
        write!(f, ")")
    }
}

/// A point of `{0,1}^n`; `get(i)` is the value of variable `i` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    /// Unpacks the low `n` bits of `word`, variable `i` taken from bit `i - 1`.
    pub fn from_word(n: usize, word: u64) -> Self {
        Self { bits: (0..n).map(|i| word >> i & 1 == 1).collect() }
    }

    /// Parses a string such as `"010"`, first character = variable 1.
    pub fn from_bitstring(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.bits[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.bits[var - 1] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Packs into a word; only meaningful for `len() <= 64`.
    pub fn to_word(&self) -> u64 {
        self.bits.iter().enumerate().fold(0, |w, (i, &b)| w | (b as u64) << i)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Renders a packed word as the bit string of its first `n` variables.
pub fn word_to_bitstring(n: usize, word: u64) -> String {
    (0..n).map(|i| if word >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// A CNF formula whose solution set is studied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    origin: Origin,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>, origin: Origin) -> Result<Self, FormulaError> {
        for c in &clauses {
            if let Some(&l) = c.lits().iter().find(|l| l.unsigned_abs() as usize > num_vars) {
                return Err(FormulaError::LiteralOutOfRange { literal: l, num_vars });
            }
        }
        Ok(Self { num_vars, clauses, origin })
    }

    /// Builds from raw literal lists; convenient for tests and gadgets.
    pub fn from_lits(num_vars: usize, lits: &[&[i32]], origin: Origin) -> Result<Self, FormulaError> {
        let clauses = lits.iter().map(|c| Clause::new(c.to_vec())).collect::<Result<Vec<_>, _>>()?;
        Self::new(num_vars, clauses, origin)
    }

    pub fn empty(num_vars: usize) -> Self {
        Self { num_vars, clauses: Vec::new(), origin: Origin::Generated }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    /// Adds a clause, widening the variable range if needed.
    pub fn push_clause(&mut self, clause: Clause) {
        self.num_vars = self.num_vars.max(clause.max_var());
        self.clauses.push(clause);
    }

    /// Widens the variable range without adding clauses.
    pub fn with_num_vars(mut self, num_vars: usize) -> Self {
        self.num_vars = self.num_vars.max(num_vars);
        self
    }

    /// Conjunction over the same variable indices.
    pub fn conjoin(&self, other: &CnfFormula) -> CnfFormula {
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        CnfFormula { num_vars: self.num_vars.max(other.num_vars), clauses, origin: self.origin }
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<bool, FormulaError> {
        if x.len() != self.num_vars {
            return Err(FormulaError::LengthMismatch { expected: self.num_vars, found: x.len() });
        }
        Ok(self.clauses.iter().all(|c| c.is_satisfied_by(x)))
    }

    /// Compiles to per-clause bit masks for word-level evaluation (`num_vars <= 64`).
    pub fn compile(&self) -> CompiledCnf {
        assert!(self.num_vars <= 64, "word evaluation needs at most 64 variables");
        let (pos, neg) = self
            .clauses
            .iter()
            .map(|c| {
                c.lits().iter().fold((0u64, 0u64), |(p, n), &l| {
                    let bit = 1u64 << (l.unsigned_abs() - 1);
                    if l > 0 {
                        (p | bit, n)
                    } else {
                        (p, n | bit)
                    }
                })
            })
            .unzip();
        CompiledCnf { pos, neg }
    }

    /// Canonical DIMACS text: header line, one zero-terminated clause per line.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c.lits() {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Clause masks for evaluating packed assignments.
///
/// A clause is satisfied by `x` iff `x & pos != 0` or `!x & neg != 0`.
#[derive(Debug, Clone)]
pub struct CompiledCnf {
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl CompiledCnf {
    /// `(pos, neg)` variable masks per clause, in clause order.
    pub fn clause_masks(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.pos.iter().copied().zip(self.neg.iter().copied())
    }

    #[inline]
    pub fn satisfies(&self, x: u64) -> bool {
        self.pos.iter().zip(&self.neg).all(|(&p, &n)| x & p != 0 || !x & n != 0)
    }

    /// True iff some clause is falsified at a corner of the subcube
    /// `{base ^ s : s ⊆ free}`. A clause forbids the subcube exactly when each
    /// of its literals sits on a free coordinate or is false under `base`.
    #[inline]
    pub fn forbids_subcube(&self, free: u64, base: u64) -> bool {
        self.pos.iter().zip(&self.neg).any(|(&p, &n)| {
            let fixed_pos = p & !free;
            let fixed_neg = n & !free;
            base & fixed_pos == 0 && !base & fixed_neg == 0
        })
    }
}

/// The formula `(x1 ∨ x2 ∨ x3) ∧ (¬x1 ∨ ¬x2 ∨ ¬x3)`, whose solution complex is a hexagon.
pub fn circle_formula() -> CnfFormula {
    CnfFormula::from_lits(3, &[&[1, 2, 3], &[-1, -2, -3]], Origin::Generated).expect("circle formula is well formed")
}
