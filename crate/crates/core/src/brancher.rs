//! From a value heuristic's ranking to an ordered list of branches.
//!
//! Values ranked equally (exactly, or within a percentage band of the group
//! head) form a tie. Labelling emits one singleton branch per value and
//! the discrepancy grows by one per value; partitioning emits one branch per
//! tie group and a branch's discrepancy is the number of values in the
//! groups preceding it. With no ties the two coincide.

use crate::error::{Error, Result};

/// A domain value with its heuristic score. Higher ranks are better.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedValue {
    pub value: i32,
    pub rank: f64,
}

impl RankedValue {
    pub fn new(value: i32, rank: f64) -> Self {
        RankedValue { value, rank }
    }
}

/// A maximal set of equivalently ranked values, ordered ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct TieGroup {
    pub values: Vec<i32>,
    pub rank: f64,
}

/// One branch of a branching disjunction: the sub-domain it restricts the
/// variable to, plus its discrepancy weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub allowed: Vec<i32>,
    pub weight: u64,
}

pub type BranchList = Vec<Branch>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchMode {
    Labelling,
    Partitioning,
}

/// Sorts by rank descending and splits into maximal equivalence groups.
///
/// With `equivalence_pct == 0` a group holds exactly the values of identical
/// rank; with `e > 0` a value joins the current group iff
/// `|rank - reference| <= e * |reference|`, the reference being the rank of
/// the group's first (highest) value. Values inside a group are ordered
/// ascending.
pub fn group_ties(ranked: &[RankedValue], equivalence_pct: f64) -> Result<Vec<TieGroup>> {
    if ranked.is_empty() {
        return Err(Error::InvalidArgument("group_ties: empty ranking".into()));
    }
    if equivalence_pct.is_nan() || equivalence_pct < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "group_ties: negative or NaN equivalence percentage {equivalence_pct}"
        )));
    }
    if let Some(bad) = ranked.iter().find(|r| !r.rank.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "group_ties: non-finite rank for value {}",
            bad.value
        )));
    }

    let mut sorted = ranked.to_vec();
    sorted.sort_by(|a, b| {
        b.rank
            .partial_cmp(&a.rank)
            .unwrap()
            .then_with(|| a.value.cmp(&b.value))
    });

    let mut groups: Vec<TieGroup> = Vec::new();
    for rv in sorted {
        let joins = match groups.last() {
            Some(group) => {
                let reference = group.rank;
                if equivalence_pct == 0.0 {
                    rv.rank == reference
                } else {
                    (rv.rank - reference).abs() <= equivalence_pct * reference.abs()
                }
            }
            None => false,
        };
        if joins {
            let group = groups.last_mut().unwrap();
            group.values.push(rv.value);
        } else {
            groups.push(TieGroup {
                values: vec![rv.value],
                rank: rv.rank,
            });
        }
    }
    for group in &mut groups {
        group.values.sort_unstable();
    }
    Ok(groups)
}

/// One singleton branch per value, flattened in group order; branch `j` has
/// discrepancy weight `j`.
pub fn labelling_branches(groups: &[TieGroup]) -> BranchList {
    groups
        .iter()
        .flat_map(|g| g.values.iter().copied())
        .enumerate()
        .map(|(j, value)| Branch {
            allowed: vec![value],
            weight: j as u64,
        })
        .collect()
}

/// One branch per tie group in rank order; branch `j`'s weight is the total
/// number of values in groups before it.
pub fn partitioning_branches(groups: &[TieGroup]) -> BranchList {
    let mut weight = 0u64;
    groups
        .iter()
        .map(|g| {
            let branch = Branch {
                allowed: g.values.clone(),
                weight,
            };
            weight += g.values.len() as u64;
            branch
        })
        .collect()
}

pub fn branches_for(mode: BranchMode, groups: &[TieGroup]) -> BranchList {
    match mode {
        BranchMode::Labelling => labelling_branches(groups),
        BranchMode::Partitioning => partitioning_branches(groups),
    }
}
