use serde::Serialize;

use super::GadgetError;
use crate::formula::CnfFormula;

/// Context variables left unassigned are quantified existentially; at most
/// this many are allowed.
const MAX_FREE_CONTEXT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CornerRow {
    /// 1-based row number.
    pub index: usize,
    /// Values of the triple, first coordinate leftmost.
    pub bits: String,
    /// The last two coordinates of the triple agree.
    pub equality_holds: bool,
    pub all_clauses_satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CornerTable {
    pub triple: [usize; 3],
    pub rows: Vec<CornerRow>,
    pub satisfying_rows: Vec<usize>,
}

/// The eight corners of the 3-cube varying `triple` under `context`
/// (`context[i]` fixes variable `i + 1`; `None` leaves it free). A corner
/// counts as satisfied when some completion of the free context variables
/// satisfies `f`. Rows run through `000..111` with the first coordinate as
/// the most significant bit.
pub fn corner_table(f: &CnfFormula, triple: [usize; 3], context: &[Option<bool>]) -> Result<CornerTable, GadgetError> {
    let n = f.num_vars();
    if context.len() != n {
        return Err(GadgetError::ContextLength { expected: n, found: context.len() });
    }
    if triple.iter().any(|&c| c == 0 || c > n)
        || triple[0] == triple[1]
        || triple[1] == triple[2]
        || triple[0] == triple[2]
    {
        return Err(GadgetError::BadTriple { n });
    }
    if let Some(&c) = triple.iter().find(|&&c| context[c - 1].is_some()) {
        return Err(GadgetError::CoordAssignedInContext { coord: c });
    }
    let free: Vec<usize> = (0..n).filter(|&i| context[i].is_none() && !triple.contains(&(i + 1))).collect();
    if free.len() > MAX_FREE_CONTEXT {
        return Err(GadgetError::TooManyFreeVariables { free: free.len(), limit: MAX_FREE_CONTEXT });
    }
    let fixed = context.iter().enumerate().fold(0u64, |w, (i, v)| if *v == Some(true) { w | 1 << i } else { w });
    let compiled = f.compile();
    let rows: Vec<CornerRow> = (0..8u64)
        .map(|p| {
            let t = [p >> 2 & 1, p >> 1 & 1, p & 1];
            let corner = triple.iter().zip(t).fold(fixed, |w, (&c, b)| w | b << (c - 1));
            let sat = (0..1u64 << free.len()).any(|s| {
                let x = free.iter().enumerate().fold(corner, |w, (j, &i)| w | (s >> j & 1) << i);
                compiled.satisfies(x)
            });
            CornerRow {
                index: p as usize + 1,
                bits: t.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect(),
                equality_holds: t[1] == t[2],
                all_clauses_satisfied: sat,
            }
        })
        .collect();
    let satisfying_rows = rows.iter().filter(|r| r.all_clauses_satisfied).map(|r| r.index).collect();
    Ok(CornerTable { triple, rows, satisfying_rows })
}
