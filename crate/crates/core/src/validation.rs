use std::fmt;

/// Outcome of a single named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Indices locating the first failure, when the check failed.
    pub witness: Option<Vec<usize>>,
}

/// A list of named checks plus non-fatal warnings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn push(&mut self, name: &'static str, witness: Option<Vec<usize>>) {
        self.checks.push(Check {
            name,
            passed: witness.is_none(),
            witness,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.witness {
                None => writeln!(f, "pass  {}", c.name)?,
                Some(w) => writeln!(f, "FAIL  {}  witness {:?}", c.name, w)?,
            }
        }
        for w in &self.warnings {
            writeln!(f, "warn  {w}")?;
        }
        Ok(())
    }
}
