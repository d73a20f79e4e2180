use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::model::ArmId;

/// Per-arm pull counters. Safe to bump from several threads at once.
#[derive(Debug)]
pub struct SampleLedger {
    pulls: Vec<AtomicU64>,
}

impl SampleLedger {
    pub fn new(num_arms: usize) -> Self {
        Self {
            pulls: (0..num_arms).map(|_| AtomicU64::new(0)).collect(),
        }
    }

    pub(crate) fn record(&self, arm: ArmId, count: u64) {
        self.pulls[arm].fetch_add(count, Ordering::Relaxed);
    }

    pub fn pulls(&self, arm: ArmId) -> u64 {
        self.pulls[arm].load(Ordering::Relaxed)
    }

    pub fn total(&self) -> u64 {
        self.pulls.iter().map(|c| c.load(Ordering::Relaxed)).sum()
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        let pulls: Vec<u64> = self
            .pulls
            .iter()
            .map(|c| c.load(Ordering::Relaxed))
            .collect();
        LedgerSnapshot {
            total: pulls.iter().sum(),
            pulls,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub total: u64,
    pub pulls: Vec<u64>,
}

impl LedgerSnapshot {
    /// Pulls issued between `earlier` and `self`.
    pub fn since(&self, earlier: &LedgerSnapshot) -> LedgerSnapshot {
        let pulls: Vec<u64> = self
            .pulls
            .iter()
            .zip(&earlier.pulls)
            .map(|(now, then)| now - then)
            .collect();
        LedgerSnapshot {
            total: pulls.iter().sum(),
            pulls,
        }
    }
}
