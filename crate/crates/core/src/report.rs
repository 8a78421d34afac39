//! Machine-readable verification reports shared by the library and the CLI.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

/// One named check inside a suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckItem {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckItem { name: name.into(), status: CheckStatus::Pass, detail: detail.into() }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckItem { name: name.into(), status: CheckStatus::Fail, detail: detail.into() }
    }

    pub fn from_bool(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            Self::pass(name, detail)
        } else {
            Self::fail(name, detail)
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// A verification suite run at a declared scale.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub scale: String,
    pub items: Vec<CheckItem>,
    pub wall_time_ms: u128,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, scale: impl Into<String>) -> Self {
        SuiteReport { suite: suite.into(), scale: scale.into(), items: Vec::new(), wall_time_ms: 0 }
    }

    pub fn push(&mut self, item: CheckItem) {
        self.items.push(item);
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(CheckItem::passed)
    }

    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| !i.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in &self.items {
            let tag = if i.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{tag}] {}: {}\n", i.name, i.detail));
        }
        let overall = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "suite {} ({}): {overall} in {} ms\n",
            self.suite, self.scale, self.wall_time_ms
        ));
        out
    }
}
