//! Variables, trailed domains, and propagation to fixpoint.
//!
//! [`ProblemState`] holds one [`Domain`] per variable plus a trail of
//! removals so that backtracking restores domains exactly. [`Space`] couples
//! a state with its registered propagators and runs them to fixpoint with a
//! FIFO queue, re-enqueueing watchers of changed variables.

use crate::domain::Domain;
use crate::error::{Error, Result};

pub type VarId = usize;

/// A propagator emptied some domain; the current node is failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wipeout;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Fixpoint,
    Failure,
}

/// Outcome of running propagation: final status plus how many values were
/// deleted across all domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagationResult {
    pub status: Status,
    pub removed: usize,
}

impl PropagationResult {
    pub fn is_failure(&self) -> bool {
        self.status == Status::Failure
    }
}

/// Domains plus a reversible trail of removals.
#[derive(Debug, Clone)]
pub struct ProblemState {
    domains: Vec<Domain>,
    trail: Vec<(VarId, i32)>,
    marks: Vec<usize>,
    changed: Vec<VarId>,
    changed_flag: Vec<bool>,
}

impl ProblemState {
    pub fn new(domains: Vec<Domain>) -> Self {
        let n = domains.len();
        ProblemState {
            domains,
            trail: Vec::new(),
            marks: Vec::new(),
            changed: Vec::new(),
            changed_flag: vec![false; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn domain(&self, var: VarId) -> &Domain {
        &self.domains[var]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    /// True when every variable is bound.
    pub fn all_singleton(&self) -> bool {
        self.domains.iter().all(|d| d.len() == 1)
    }

    pub(crate) fn trail_len(&self) -> usize {
        self.trail.len()
    }

    /// Removes `value` from `var`'s domain, recording the removal on the
    /// trail. `Err(Wipeout)` if the domain empties.
    pub fn remove(&mut self, var: VarId, value: i32) -> std::result::Result<bool, Wipeout> {
        if !self.domains[var].remove(value) {
            return Ok(false);
        }
        self.trail.push((var, value));
        if !self.changed_flag[var] {
            self.changed_flag[var] = true;
            self.changed.push(var);
        }
        if self.domains[var].is_empty() {
            Err(Wipeout)
        } else {
            Ok(true)
        }
    }

    /// Shrinks `var`'s domain to exactly `allowed` (which must be a non-empty
    /// subset of it). Returns the number of removals.
    pub(crate) fn restrict_values(
        &mut self,
        var: VarId,
        allowed: &[i32],
    ) -> std::result::Result<usize, Wipeout> {
        let to_remove: Vec<i32> = self.domains[var]
            .iter()
            .filter(|v| !allowed.contains(v))
            .collect();
        let mut removed = 0;
        for value in to_remove {
            self.remove(var, value)?;
            removed += 1;
        }
        Ok(removed)
    }

    /// Opens a new choice point.
    pub fn push_level(&mut self) {
        self.marks.push(self.trail.len());
    }

    /// Undoes every removal since the matching [`push_level`](Self::push_level).
    pub fn pop_level(&mut self) {
        let mark = self.marks.pop().expect("pop_level without push_level");
        while self.trail.len() > mark {
            let (var, value) = self.trail.pop().unwrap();
            self.domains[var].insert(value);
        }
    }

    pub(crate) fn drain_changes(&mut self, into: &mut Vec<VarId>) {
        for &var in &self.changed {
            self.changed_flag[var] = false;
            into.push(var);
        }
        self.changed.clear();
    }

    pub(crate) fn clear_changes(&mut self) {
        for &var in &self.changed {
            self.changed_flag[var] = false;
        }
        self.changed.clear();
    }
}

/// A constraint propagator over a fixed set of watched variables.
///
/// `propagate` removes unsupported values through the state (so removals are
/// trailed) and reports `Wipeout` when some domain empties. A propagator is
/// re-run whenever one of its watched variables changes.
pub trait Propagator {
    fn vars(&self) -> &[VarId];
    fn propagate(&mut self, state: &mut ProblemState) -> std::result::Result<(), Wipeout>;
}

/// A [`ProblemState`] together with its registered propagators.
pub struct Space {
    state: ProblemState,
    propagators: Vec<Box<dyn Propagator>>,
    watchers: Vec<Vec<usize>>,
}

impl Space {
    pub fn new(domains: Vec<Domain>) -> Self {
        let n = domains.len();
        Space {
            state: ProblemState::new(domains),
            propagators: Vec::new(),
            watchers: vec![Vec::new(); n],
        }
    }

    pub fn add_propagator(&mut self, propagator: Box<dyn Propagator>) {
        let idx = self.propagators.len();
        for &var in propagator.vars() {
            self.watchers[var].push(idx);
        }
        self.propagators.push(propagator);
    }

    pub fn num_vars(&self) -> usize {
        self.state.num_vars()
    }

    pub fn domain(&self, var: VarId) -> &Domain {
        self.state.domain(var)
    }

    pub fn state(&self) -> &ProblemState {
        &self.state
    }

    pub fn push_level(&mut self) {
        self.state.push_level();
    }

    pub fn pop_level(&mut self) {
        self.state.pop_level();
    }

    /// Restricts `var` to `allowed` and propagates to fixpoint.
    ///
    /// `allowed` must be a non-empty subset of the current domain; anything
    /// else is an invalid argument, not a failure.
    pub fn restrict(&mut self, var: VarId, allowed: &[i32]) -> Result<PropagationResult> {
        if allowed.is_empty() {
            return Err(Error::InvalidArgument(
                "restrict: allowed set is empty".into(),
            ));
        }
        if var >= self.state.num_vars() {
            return Err(Error::InvalidArgument(format!(
                "restrict: no variable {var}"
            )));
        }
        if let Some(bad) = allowed
            .iter()
            .find(|v| !self.state.domain(var).contains(**v))
        {
            return Err(Error::InvalidArgument(format!(
                "restrict: value {bad} not in domain of variable {var}"
            )));
        }
        let before = self.state.trail_len();
        match self.state.restrict_values(var, allowed) {
            Err(Wipeout) => Ok(PropagationResult {
                status: Status::Failure,
                removed: self.state.trail_len() - before,
            }),
            Ok(_) => {
                let mut result = self.propagate_fixpoint();
                result.removed = self.state.trail_len() - before;
                Ok(result)
            }
        }
    }

    /// Runs every propagator to mutual fixpoint (FIFO, re-enqueue on change).
    pub fn propagate_fixpoint(&mut self) -> PropagationResult {
        let before = self.state.trail_len();
        let mut queue: std::collections::VecDeque<usize> = (0..self.propagators.len()).collect();
        let mut in_queue = vec![true; self.propagators.len()];
        let mut propagators = std::mem::take(&mut self.propagators);
        let mut changed_vars = Vec::new();
        let mut failed = false;
        self.state.clear_changes();
        while let Some(p) = queue.pop_front() {
            in_queue[p] = false;
            match propagators[p].propagate(&mut self.state) {
                Err(Wipeout) => {
                    failed = true;
                    break;
                }
                Ok(()) => {
                    self.state.drain_changes(&mut changed_vars);
                    for &var in &changed_vars {
                        for &q in &self.watchers[var] {
                            if !in_queue[q] {
                                in_queue[q] = true;
                                queue.push_back(q);
                            }
                        }
                    }
                    changed_vars.clear();
                }
            }
        }
        self.propagators = propagators;
        PropagationResult {
            status: if failed {
                Status::Failure
            } else {
                Status::Fixpoint
            },
            removed: self.state.trail_len() - before,
        }
    }
}
