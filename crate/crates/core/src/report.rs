use serde::{Deserialize, Serialize};

/// Pass/fail tally for one checked law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawOutcome {
    pub name: String,
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    pub worst_residual: f64,
}

impl LawOutcome {
    pub fn new(name: impl Into<String>) -> Self {
        LawOutcome {
            name: name.into(),
            checked: 0,
            passed: 0,
            failed: 0,
            worst_residual: 0.0,
        }
    }

    /// Records one check. Non-finite residuals count as failures and are
    /// stored as `f64::MAX` so reports stay valid JSON.
    pub fn record(&mut self, ok: bool, residual: f64) -> bool {
        let ok = ok && residual.is_finite();
        let residual = if residual.is_finite() {
            residual.abs()
        } else {
            f64::MAX
        };
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.worst_residual = self.worst_residual.max(residual);
        ok
    }

    pub fn merge(&mut self, other: &LawOutcome) {
        self.checked += other.checked;
        self.passed += other.passed;
        self.failed += other.failed;
        self.worst_residual = self.worst_residual.max(other.worst_residual);
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Tally keyed by law name, kept in first-recorded order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LawTally {
    pub laws: Vec<LawOutcome>,
}

impl LawTally {
    pub fn law(&mut self, name: &str) -> &mut LawOutcome {
        match self.laws.iter().position(|l| l.name == name) {
            Some(i) => &mut self.laws[i],
            None => {
                self.laws.push(LawOutcome::new(name));
                self.laws.last_mut().expect("just pushed")
            }
        }
    }

    pub fn record(&mut self, name: &str, ok: bool, residual: f64) -> bool {
        self.law(name).record(ok, residual)
    }

    pub fn merge(&mut self, other: &LawTally) {
        for l in &other.laws {
            self.law(&l.name).merge(l);
        }
    }

    pub fn failures(&self) -> u64 {
        self.laws.iter().map(|l| l.failed).sum()
    }

    pub fn get(&self, name: &str) -> Option<&LawOutcome> {
        self.laws.iter().find(|l| l.name == name)
    }
}
