use crate::error::{Error, Result};

/// Node-count budget for search procedures.
///
/// Counting nodes instead of wall time keeps every run reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
    spent: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, spent: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.spent
    }

    pub fn is_exhausted(&self) -> bool {
        self.spent >= self.limit
    }

    /// Charges `n` nodes, failing once the limit would be exceeded.
    pub fn charge(&mut self, n: u64) -> Result<()> {
        if self.limit - self.spent < n {
            self.spent = self.limit;
            return Err(Error::BudgetExhausted { spent: self.spent });
        }
        self.spent += n;
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(10_000_000)
    }
}
