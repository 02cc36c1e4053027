use serde::{Deserialize, Serialize};

/// Where a check's threshold or target comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// A value stated by the source derivation (formulas, angles, start points).
    #[serde(rename = "PAPER")]
    Paper,
    /// Follows directly from definitions.
    #[serde(rename = "TRIVIAL")]
    Trivial,
    /// Computed by an independent oracle.
    #[serde(rename = "DERIVED")]
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
    pub provenance: Provenance,
}

/// Threshold for checks that only record a measurement.
pub const RECORD_ONLY: f64 = f64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub runtime_s: f64,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), checks: Vec::new(), runtime_s: 0.0 }
    }

    /// Records `measured ≤ threshold`. NaN never passes.
    pub fn check(&mut self, id: impl Into<String>, measured: f64, threshold: f64, provenance: Provenance) -> bool {
        let pass = measured <= threshold;
        self.checks.push(Check { id: id.into(), measured, threshold, pass, provenance });
        pass
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Appends the checks of `other`, adding its runtime.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.runtime_s += other.runtime_s;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_semantics() {
        let mut r = VerificationReport::new("demo");
        assert!(r.check("a", 1e-13, 1e-12, Provenance::Derived));
        assert!(!r.check("b", f64::NAN, 1.0, Provenance::Trivial));
        assert!(r.check("c", 3.0, RECORD_ONLY, Provenance::Derived));
        assert!(!r.all_pass());
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn json_schema() {
        let mut r = VerificationReport::new("demo");
        r.check("x", 0.5, 1.0, Provenance::Paper);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["suite"], "demo");
        assert_eq!(v["checks"][0]["id"], "x");
        assert_eq!(v["checks"][0]["provenance"], "PAPER");
        assert_eq!(v["checks"][0]["pass"], true);
        assert!(v["runtime_s"].is_number());
    }
}
