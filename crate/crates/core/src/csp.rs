//! Depth-first search over finite-domain variables with forbidden
//! conjunctions ("nogoods").
//!
//! Every nogood is attached to its highest-indexed variable and checked the
//! moment that variable is assigned, so a partial assignment is pruned as
//! soon as some forbidden conjunction lies entirely inside it. Solutions come
//! out in lexicographic order of the assignment vector.

use crate::budget::Budget;
use crate::error::Result;

/// A forbidden conjunction `var_0 = val_0 ∧ … ∧ var_k = val_k`.
pub type Nogood = Vec<(usize, u32)>;

#[derive(Debug, Clone)]
pub struct Csp {
    domain: u32,
    fixed: Vec<Option<u32>>,
    checks: Vec<Vec<Nogood>>,
    contradiction: bool,
}

impl Csp {
    pub fn new(num_vars: usize, domain: u32) -> Self {
        Csp {
            domain,
            fixed: vec![None; num_vars],
            checks: vec![Vec::new(); num_vars],
            contradiction: domain == 0 && num_vars > 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.fixed.len()
    }

    pub fn domain(&self) -> u32 {
        self.domain
    }

    /// Adds a nogood. Nogoods that contradict themselves (the same variable
    /// required to take two values) can never fire and are dropped; the empty
    /// nogood makes the whole problem unsatisfiable.
    pub fn forbid(&mut self, mut nogood: Nogood) {
        nogood.sort_unstable();
        nogood.dedup();
        for w in nogood.windows(2) {
            if w[0].0 == w[1].0 {
                return;
            }
        }
        match nogood.last() {
            None => self.contradiction = true,
            Some(&(last, _)) => self.checks[last].push(nogood),
        }
    }

    /// Restricts `var` to a single value.
    pub fn fix(&mut self, var: usize, value: u32) {
        if value >= self.domain {
            self.contradiction = true;
        }
        match self.fixed[var] {
            Some(v) if v != value => self.contradiction = true,
            _ => self.fixed[var] = Some(value),
        }
    }

    pub fn num_nogoods(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    fn range(&self, var: usize) -> (u32, u32) {
        match self.fixed[var] {
            Some(v) => (v, v + 1),
            None => (0, self.domain),
        }
    }

    fn consistent_at(&self, var: usize, assign: &[u32]) -> bool {
        self.checks[var]
            .iter()
            .all(|ng| ng.iter().any(|&(v, val)| assign[v] != val))
    }

    /// Checks a complete assignment against every nogood and fixed value.
    pub fn satisfies(&self, assign: &[u32]) -> bool {
        !self.contradiction
            && assign.len() == self.num_vars()
            && (0..self.num_vars()).all(|v| {
                let (lo, hi) = self.range(v);
                (lo..hi).contains(&assign[v]) && self.consistent_at(v, assign)
            })
    }

    pub fn solutions<'c, 'b>(&'c self, budget: &'b mut Budget) -> Solutions<'c, 'b> {
        Solutions {
            csp: self,
            state: SearchState::new(self.num_vars()),
            budget,
        }
    }

    pub fn find_first(&self, budget: &mut Budget) -> Result<Option<Vec<u32>>> {
        self.solutions(budget).next().transpose()
    }

    pub fn count(&self, budget: &mut Budget) -> Result<u64> {
        let mut n = 0;
        for s in self.solutions(budget) {
            s?;
            n += 1;
        }
        Ok(n)
    }
}

/// Resumable cursor of the depth-first search, kept apart from the problem so
/// that owners of a [`Csp`] can drive it without self-borrowing.
#[derive(Debug, Clone)]
pub struct SearchState {
    assign: Vec<u32>,
    cursor: Vec<u32>,
    depth: usize,
    started: bool,
    done: bool,
}

impl SearchState {
    pub fn new(num_vars: usize) -> Self {
        SearchState {
            assign: vec![0; num_vars],
            cursor: vec![0; num_vars],
            depth: 0,
            started: false,
            done: false,
        }
    }

    pub fn next(&mut self, csp: &Csp, budget: &mut Budget) -> Option<Result<Vec<u32>>> {
        if self.done {
            return None;
        }
        let n = csp.num_vars();
        if !self.started {
            self.started = true;
            if csp.contradiction {
                self.done = true;
                return None;
            }
            if n == 0 {
                self.done = true;
                return Some(Ok(Vec::new()));
            }
            self.depth = 0;
            self.cursor[0] = csp.range(0).0;
        } else {
            self.depth = n - 1;
            self.cursor[n - 1] = self.assign[n - 1] + 1;
        }
        loop {
            let d = self.depth;
            let (_, hi) = csp.range(d);
            if self.cursor[d] >= hi {
                if d == 0 {
                    self.done = true;
                    return None;
                }
                self.depth -= 1;
                let p = self.depth;
                self.cursor[p] = self.assign[p] + 1;
                continue;
            }
            if let Err(e) = budget.charge(1) {
                self.done = true;
                return Some(Err(e));
            }
            let v = self.cursor[d];
            self.assign[d] = v;
            if csp.consistent_at(d, &self.assign) {
                if d + 1 == n {
                    return Some(Ok(self.assign.clone()));
                }
                self.depth = d + 1;
                self.cursor[d + 1] = csp.range(d + 1).0;
            } else {
                self.cursor[d] = v + 1;
            }
        }
    }
}

/// Iterator over solutions. After a budget error it yields nothing more.
pub struct Solutions<'c, 'b> {
    csp: &'c Csp,
    state: SearchState,
    budget: &'b mut Budget,
}

impl Iterator for Solutions<'_, '_> {
    type Item = Result<Vec<u32>>;

    fn next(&mut self) -> Option<Self::Item> {
        self.state.next(self.csp, self.budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(csp: &Csp, n: usize) -> Vec<Vec<u32>> {
        let k = csp.domain();
        let total = (k as usize).pow(n as u32);
        (0..total)
            .map(|mut i| {
                let mut v = vec![0; n];
                for j in (0..n).rev() {
                    v[j] = (i % k as usize) as u32;
                    i /= k as usize;
                }
                v
            })
            .filter(|v| csp.satisfies(v))
            .collect()
    }

    #[test]
    fn no_adjacent_ones() {
        let mut csp = Csp::new(4, 2);
        for i in 0..3 {
            csp.forbid(vec![(i, 1), (i + 1, 1)]);
        }
        let sols: Vec<_> = csp
            .solutions(&mut Budget::unlimited())
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(sols, brute(&csp, 4));
        assert_eq!(sols.len(), 8);
    }

    #[test]
    fn fixed_variables_restrict_search() {
        let mut csp = Csp::new(3, 3);
        csp.fix(1, 2);
        csp.forbid(vec![(0, 0), (1, 2)]);
        let sols: Vec<_> = csp
            .solutions(&mut Budget::unlimited())
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(sols, brute(&csp, 3));
        assert!(sols.iter().all(|s| s[1] == 2 && s[0] != 0));
    }

    #[test]
    fn empty_nogood_is_unsat_and_conflicting_is_dropped() {
        let mut csp = Csp::new(2, 2);
        csp.forbid(vec![(0, 0), (0, 1)]);
        assert_eq!(csp.num_nogoods(), 0);
        assert_eq!(csp.count(&mut Budget::unlimited()).unwrap(), 4);
        csp.forbid(vec![]);
        assert_eq!(csp.count(&mut Budget::unlimited()).unwrap(), 0);
    }

    #[test]
    fn budget_exhaustion_is_reported_once() {
        let csp = Csp::new(10, 2);
        let mut budget = Budget::new(5);
        let items: Vec<_> = csp.solutions(&mut budget).collect();
        assert!(matches!(items.last(), Some(Err(_))));
        assert_eq!(items.iter().filter(|r| r.is_err()).count(), 1);
    }
}
