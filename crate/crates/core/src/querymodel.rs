//! Subcube-query oracles and the adversary game against query strategies.
//!
//! A strategy sees only the answers to its own past queries. The adversary
//! hides `m` ring gadgets on disjoint variable blocks and answers `NO` to a
//! query covering the support of a still-undecided gadget, committing that
//! gadget as probed. While some gadget is unprobed at halt, the transcript
//! is consistent with both the all-enabled formula (satisfiable) and the
//! same formula with that gadget disabled (unsatisfiable), so any verdict
//! is refuted.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{bits, Face};
use crate::formula::{Clause, CnfFormula, CompiledCnf};
use crate::gadgets::{combine, make_ring_gadget, GadgetInstance, VarAllocator};

/// Gadgets per game: nine variables each within a 64-bit word.
pub const MAX_ADVERSARY_GADGETS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("strategy exceeded the budget of {budget} queries")]
    BudgetExhausted { budget: usize },
    #[error("adversary needs between 1 and {limit} gadgets, got {m}")]
    FamilySize { m: usize, limit: usize },
}

/// An axis-aligned subcube `{base ^ s : s ⊆ free}` of the n-cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SubcubeQuery {
    pub n: usize,
    pub free: u64,
    pub base: u64,
}

impl SubcubeQuery {
    /// `free_coords` are 1-based; `fixed` holds the values of the other
    /// coordinates as a word with bit `i - 1` for coordinate `i`.
    pub fn new(n: usize, free_coords: &[usize], fixed: u64) -> Result<Self, QueryError> {
        if n > 64 {
            return Err(QueryError::MalformedQuery(format!("ambient dimension {n} exceeds 64")));
        }
        let mut free = 0u64;
        for &c in free_coords {
            if c == 0 || c > n {
                return Err(QueryError::MalformedQuery(format!("coordinate {c} outside 1..={n}")));
            }
            if free >> (c - 1) & 1 == 1 {
                return Err(QueryError::MalformedQuery(format!("coordinate {c} repeated")));
            }
            free |= 1 << (c - 1);
        }
        Self::from_masks(n, free, fixed & !free)
    }

    pub fn from_masks(n: usize, free: u64, base: u64) -> Result<Self, QueryError> {
        let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        if n > 64 || (free | base) & !full != 0 {
            return Err(QueryError::MalformedQuery(format!("bits set beyond coordinate {n}")));
        }
        if free & base != 0 {
            return Err(QueryError::MalformedQuery("base has bits on free coordinates".into()));
        }
        Ok(Self { n, free, base })
    }

    /// Parses a pattern such as `*01*`: character `i` is coordinate `i + 1`.
    pub fn from_pattern(pattern: &str) -> Result<Self, QueryError> {
        let n = pattern.chars().count();
        let (mut free, mut base) = (0u64, 0u64);
        for (i, ch) in pattern.chars().enumerate() {
            match ch {
                '*' => free |= 1 << i,
                '1' => base |= 1 << i,
                '0' => {}
                other => return Err(QueryError::MalformedQuery(format!("unexpected character {other:?}"))),
            }
        }
        Self::from_masks(n, free, base)
    }

    pub fn dim(&self) -> usize {
        self.free.count_ones() as usize
    }

    pub fn face(&self) -> Face {
        Face { free: self.free, base: self.base }
    }

    pub fn pattern(&self) -> String {
        crate::gadgets::face_pattern(&self.face(), self.n)
    }

    /// The subcube contains every coordinate of `mask` as a free axis.
    pub fn covers(&self, mask: u64) -> bool {
        self.free & mask == mask
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
}

pub trait SubcubeOracle {
    fn ambient_dim(&self) -> usize;
    fn query(&mut self, q: &SubcubeQuery) -> Result<Answer, QueryError>;
    /// Queries answered so far.
    fn count(&self) -> usize;
}

/// Answers from a fixed formula: `YES` iff every corner satisfies it.
#[derive(Debug, Clone)]
pub struct FormulaOracle {
    n: usize,
    compiled: CompiledCnf,
    count: usize,
}

impl FormulaOracle {
    pub fn new(f: &CnfFormula) -> Result<Self, QueryError> {
        if f.num_vars() > 64 {
            return Err(QueryError::MalformedQuery(format!("{} variables exceed 64", f.num_vars())));
        }
        Ok(Self { n: f.num_vars(), compiled: f.compile(), count: 0 })
    }
}

impl SubcubeOracle for FormulaOracle {
    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn query(&mut self, q: &SubcubeQuery) -> Result<Answer, QueryError> {
        if q.n != self.n {
            return Err(QueryError::MalformedQuery(format!("query dimension {} against {} variables", q.n, self.n)));
        }
        self.count += 1;
        Ok(if self.compiled.forbids_subcube(q.free, q.base) { Answer::No } else { Answer::Yes })
    }

    fn count(&self) -> usize {
        self.count
    }
}

/// One query against `f` through a fresh counting oracle.
pub fn oracle_query(f: &CnfFormula, q: &SubcubeQuery) -> Result<Answer, QueryError> {
    FormulaOracle::new(f)?.query(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Query(SubcubeQuery),
    Halt(Verdict),
}

/// A deterministic query strategy. It is handed the answers to its previous
/// queries and nothing else.
pub trait Strategy {
    fn next(&mut self, history: &[Answer]) -> Move;
}

/// Issues a fixed list of queries, then halts with a fixed verdict.
#[derive(Debug, Clone)]
pub struct ScriptedStrategy {
    pub queries: Vec<SubcubeQuery>,
    pub verdict: Verdict,
}

impl Strategy for ScriptedStrategy {
    fn next(&mut self, history: &[Answer]) -> Move {
        match self.queries.get(history.len()) {
            Some(q) => Move::Query(*q),
            None => Move::Halt(self.verdict),
        }
    }
}

/// `m` ring gadgets on consecutive nine-variable blocks.
#[derive(Debug, Clone)]
pub struct AdversaryFamily {
    pub gadgets: Vec<GadgetInstance>,
    /// The all-enabled conjunction.
    pub formula: CnfFormula,
    /// Per gadget, the mask of the coordinates varied by its designated chain.
    pub supports: Vec<u64>,
}

impl AdversaryFamily {
    pub fn new(m: usize) -> Result<Self, QueryError> {
        if m == 0 || m > MAX_ADVERSARY_GADGETS {
            return Err(QueryError::FamilySize { m, limit: MAX_ADVERSARY_GADGETS });
        }
        let mut alloc = VarAllocator::new(0);
        let gadgets: Vec<GadgetInstance> = (0..m).map(|i| make_ring_gadget(i, &mut alloc)).collect();
        let supports = gadgets.iter().map(|g| g.cycle_support().iter().fold(0u64, |w, &v| w | 1 << (v - 1))).collect();
        Ok(Self { formula: combine(&gadgets), gadgets, supports })
    }

    pub fn n(&self) -> usize {
        self.formula.num_vars()
    }

    pub fn len(&self) -> usize {
        self.gadgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gadgets.is_empty()
    }

    /// The subcube varying exactly the support of gadget `i`, other coordinates 0.
    pub fn support_query(&self, i: usize) -> SubcubeQuery {
        SubcubeQuery { n: self.n(), free: self.supports[i], base: 0 }
    }

    /// The family formula with gadget `i` disabled by the unit clause `¬b_i`.
    pub fn disabled(&self, i: usize) -> CnfFormula {
        let b = self.gadgets[i].role("b").expect("ring gadgets name b");
        let mut f = self.formula.clone();
        f.push_clause(Clause::new(vec![-(b as i32)]).expect("unit clause"));
        f
    }
}

/// Satisfiability of a formula whose clauses each live inside one block of
/// `block` consecutive variables, settling every block by brute force.
/// `None` if some clause spans two blocks.
pub fn blockwise_satisfiable(f: &CnfFormula, block: usize) -> Option<bool> {
    let block_of = |v: usize| (v - 1) / block;
    let mut per_block: Vec<Vec<Clause>> = vec![Vec::new(); f.num_vars().div_ceil(block)];
    for c in f.clauses() {
        let k = block_of(c.vars().next().expect("clauses are nonempty"));
        if c.vars().any(|v| block_of(v) != k) {
            return None;
        }
        let lo = (k * block) as i32;
        let lits = c.lits().iter().map(|&l| l.signum() * (l.abs() - lo)).collect();
        per_block[k].push(Clause::new(lits).expect("shifted clause stays valid"));
    }
    Some(per_block.into_iter().enumerate().all(|(k, clauses)| {
        let width = block.min(f.num_vars() - k * block);
        let compiled = CnfFormula::new(width, clauses, f.origin()).expect("shifted clauses in range").compile();
        (0..1u64 << width).any(|x| compiled.satisfies(x))
    }))
}

/// The adversary as an oracle.
#[derive(Debug, Clone)]
pub struct Adversary {
    family: AdversaryFamily,
    active: Vec<usize>,
    log: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptEntry {
    pub index: usize,
    pub pattern: String,
    pub free: Vec<usize>,
    pub answer: Answer,
    /// Gadget committed by this query, if any.
    pub removed: Option<usize>,
    /// Undecided gadgets after the answer.
    pub active: Vec<usize>,
}

impl Adversary {
    pub fn new(family: AdversaryFamily) -> Self {
        let active = (0..family.len()).collect();
        Self { family, active, log: Vec::new() }
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.log
    }
}

impl SubcubeOracle for Adversary {
    fn ambient_dim(&self) -> usize {
        self.family.n()
    }

    /// `NO` without a commitment if the query covers an already committed
    /// support; otherwise `NO` committing the smallest covered undecided
    /// gadget; otherwise `YES`.
    fn query(&mut self, q: &SubcubeQuery) -> Result<Answer, QueryError> {
        if q.n != self.family.n() {
            return Err(QueryError::MalformedQuery(format!(
                "query dimension {} against {} variables",
                q.n,
                self.family.n()
            )));
        }
        let covers = |i: usize| q.covers(self.family.supports[i]);
        let committed = (0..self.family.len()).any(|i| !self.active.contains(&i) && covers(i));
        let mut removed = None;
        let answer = if committed {
            Answer::No
        } else if let Some(pos) = self.active.iter().position(|&i| covers(i)) {
            removed = Some(self.active.remove(pos));
            Answer::No
        } else {
            Answer::Yes
        };
        self.log.push(TranscriptEntry {
            index: self.log.len(),
            pattern: q.pattern(),
            free: bits(q.free).map(|b| b + 1).collect(),
            answer,
            removed,
            active: self.active.clone(),
        });
        Ok(answer)
    }

    fn count(&self) -> usize {
        self.log.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Completion {
    /// Gadget disabled by `¬b`, if any.
    pub disabled_gadget: Option<usize>,
    pub satisfiable: bool,
    pub dimacs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdversaryReport {
    pub m: usize,
    pub queries: usize,
    pub verdict: Verdict,
    pub transcript: Vec<TranscriptEntry>,
    pub active_at_halt: Vec<usize>,
    pub refuted: bool,
    /// Present when refuted: a satisfiable and an unsatisfiable completion,
    /// both consistent with the transcript.
    pub completions: Option<(Completion, Completion)>,
}

impl AdversaryReport {
    /// One JSON object per query.
    pub fn transcript_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.transcript {
            writeln!(out, "{}", serde_json::to_string(e).expect("entries serialize")).expect("writing to a string");
        }
        out
    }
}

/// Plays `strategy` against the adversary over `m` ring gadgets.
pub fn adversary_run(m: usize, strategy: &mut dyn Strategy, budget: usize) -> Result<AdversaryReport, QueryError> {
    let family = AdversaryFamily::new(m)?;
    let mut adv = Adversary::new(family.clone());
    let mut history = Vec::new();
    let verdict = loop {
        match strategy.next(&history) {
            Move::Halt(v) => break v,
            Move::Query(q) => {
                if history.len() == budget {
                    return Err(QueryError::BudgetExhausted { budget });
                }
                history.push(adv.query(&q)?);
            }
        }
    };
    let active = adv.active().to_vec();
    let refuted = !active.is_empty();
    let completions = active.first().map(|&i| {
        let block = 9;
        let sat = Completion {
            disabled_gadget: None,
            satisfiable: blockwise_satisfiable(&family.formula, block) == Some(true),
            dimacs: family.formula.to_dimacs(),
        };
        let off = family.disabled(i);
        let unsat = Completion {
            disabled_gadget: Some(i),
            satisfiable: blockwise_satisfiable(&off, block) == Some(true),
            dimacs: off.to_dimacs(),
        };
        (sat, unsat)
    });
    Ok(AdversaryReport {
        m,
        queries: history.len(),
        verdict,
        transcript: adv.transcript().to_vec(),
        active_at_halt: active,
        refuted,
        completions,
    })
}

/// Re-asks every query of a transcript and checks the answers.
pub fn replay(oracle: &mut dyn SubcubeOracle, queries: &[(SubcubeQuery, Answer)]) -> Result<bool, QueryError> {
    for (q, a) in queries {
        if oracle.query(q)? != *a {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::circle_formula;

    fn probing(family_m: usize, order: &[usize]) -> ScriptedStrategy {
        let fam = AdversaryFamily::new(family_m).unwrap();
        ScriptedStrategy { queries: order.iter().map(|&i| fam.support_query(i)).collect(), verdict: Verdict::Sat }
    }

    #[test]
    fn circle_oracle() {
        let f = circle_formula();
        let mut o = FormulaOracle::new(&f).unwrap();
        assert_eq!(o.query(&SubcubeQuery::from_pattern("010").unwrap()).unwrap(), Answer::Yes);
        assert_eq!(o.query(&SubcubeQuery::new(3, &[1, 2], 0b100).unwrap()).unwrap(), Answer::No);
        assert_eq!(o.count(), 2);
        assert_eq!(oracle_query(&CnfFormula::empty(4), &SubcubeQuery::from_pattern("*1**").unwrap()), Ok(Answer::Yes));
    }

    #[test]
    fn malformed_queries() {
        assert!(SubcubeQuery::new(3, &[4], 0).is_err());
        assert!(SubcubeQuery::new(3, &[1, 1], 0).is_err());
        assert!(SubcubeQuery::from_masks(3, 0b1, 0b1).is_err());
        assert!(SubcubeQuery::from_pattern("0x1").is_err());
        let mut o = FormulaOracle::new(&circle_formula()).unwrap();
        assert!(o.query(&SubcubeQuery::from_pattern("01").unwrap()).is_err());
    }

    #[test]
    fn probing_every_support_is_not_refuted() {
        let r = adversary_run(4, &mut probing(4, &[0, 1, 2, 3]), 10).unwrap();
        assert_eq!(r.queries, 4);
        assert!(!r.refuted);
        assert!(r.completions.is_none());
    }

    #[test]
    fn halting_early_is_refuted() {
        let r = adversary_run(4, &mut probing(4, &[0, 1, 2]), 10).unwrap();
        assert!(r.refuted);
        assert_eq!(r.active_at_halt, vec![3]);
        let (sat, unsat) = r.completions.clone().unwrap();
        assert!(sat.satisfiable);
        assert!(!unsat.satisfiable);
        assert_eq!(unsat.disabled_gadget, Some(3));
        assert_eq!(r.transcript_jsonl().lines().count(), 3);
    }

    #[test]
    fn zero_queries_refuted_and_budget_enforced() {
        assert!(adversary_run(1, &mut probing(1, &[]), 0).unwrap().refuted);
        assert_eq!(adversary_run(2, &mut probing(2, &[0, 1]), 1), Err(QueryError::BudgetExhausted { budget: 1 }));
    }

    #[test]
    fn repeated_probe_commits_nothing_new() {
        let r = adversary_run(2, &mut probing(2, &[0, 0]), 5).unwrap();
        assert_eq!(r.transcript[1].removed, None);
        assert_eq!(r.transcript[1].answer, Answer::No);
        assert!(r.refuted);
    }

    #[test]
    fn blockwise_check_matches_enumeration() {
        let fam = AdversaryFamily::new(2).unwrap();
        assert_eq!(blockwise_satisfiable(&fam.formula, 9), Some(true));
        assert_eq!(blockwise_satisfiable(&fam.disabled(1), 9), Some(false));
        assert_eq!(blockwise_satisfiable(&fam.formula, 4), None);
        let s = crate::complex::enumerate_solutions(&fam.formula, 26).unwrap();
        assert_eq!(s.len(), 128 * 128);
    }

    #[test]
    fn formula_oracle_replays() {
        let f = circle_formula();
        let qs: Vec<(SubcubeQuery, Answer)> = ["010", "111", "*10", "**1"]
            .iter()
            .map(|p| {
                let q = SubcubeQuery::from_pattern(p).unwrap();
                (q, oracle_query(&f, &q).unwrap())
            })
            .collect();
        assert!(replay(&mut FormulaOracle::new(&f).unwrap(), &qs).unwrap());
    }
}
