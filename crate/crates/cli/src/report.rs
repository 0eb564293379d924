use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Timeout,
}

impl Answer {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    pub fn from_option(b: Option<bool>) -> Self {
        b.map_or(Answer::Timeout, Answer::from_bool)
    }
}

/// One compared case: `left` is the reference side, `right` the side
/// under test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: String,
    pub left: Answer,
    pub right: Answer,
    pub agree: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_us: Option<u64>,
}

impl CaseRecord {
    pub fn new(id: impl Into<String>, left: Answer, right: Answer) -> Self {
        CaseRecord {
            id: id.into(),
            left,
            right,
            agree: left == right,
            wall_us: None,
        }
    }

    pub fn timed_out(&self) -> bool {
        self.left == Answer::Timeout || self.right == Answer::Timeout
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub agree: usize,
    /// Both sides decided and differ.
    pub disagree: usize,
    pub timeouts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub records: Vec<CaseRecord>,
    pub summary: Summary,
    pub timeouts: Vec<String>,
}

impl VerificationReport {
    /// Sorts records by id and derives the summary.
    pub fn new(suite: impl Into<String>, seed: u64, mut records: Vec<CaseRecord>) -> Self {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let timeouts: Vec<String> = records.iter().filter(|r| r.timed_out()).map(|r| r.id.clone()).collect();
        let agree = records.iter().filter(|r| r.agree).count();
        let summary = Summary {
            total: records.len(),
            agree,
            disagree: records.len() - agree - timeouts.len(),
            timeouts: timeouts.len(),
        };
        VerificationReport {
            suite: suite.into(),
            seed,
            records,
            summary,
            timeouts,
        }
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &CaseRecord> {
        self.records.iter().filter(|r| !r.agree && !r.timed_out())
    }

    pub fn passed(&self) -> bool {
        self.summary.disagree == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_counts() {
        let records = vec![
            CaseRecord::new("b", Answer::Yes, Answer::Yes),
            CaseRecord::new("a", Answer::Yes, Answer::No),
            CaseRecord::new("c", Answer::No, Answer::Timeout),
        ];
        let report = VerificationReport::new("demo", 7, records);
        assert_eq!(report.records[0].id, "a");
        assert_eq!(
            report.summary,
            Summary {
                total: 3,
                agree: 1,
                disagree: 1,
                timeouts: 1
            }
        );
        assert_eq!(report.timeouts, vec!["c".to_string()]);
        assert!(!report.passed());
        let json = serde_json::to_string(&report).unwrap();
        assert!(!json.contains("wall_us"));
    }
}
