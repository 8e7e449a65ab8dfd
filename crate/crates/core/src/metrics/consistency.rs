use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{LabelMatch, MetricsError, PredictionRecord};
use crate::corpus::EditKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConsistencyScope {
    /// Original and all three edits.
    All,
    Par,
    Sco,
    Aff,
}

impl ConsistencyScope {
    pub const ALL_SCOPES: [ConsistencyScope; 4] = [
        ConsistencyScope::All,
        ConsistencyScope::Par,
        ConsistencyScope::Sco,
        ConsistencyScope::Aff,
    ];

    /// Edit kinds that must be present (and correct) besides the original.
    pub fn required_edits(self) -> &'static [EditKind] {
        match self {
            ConsistencyScope::All => &EditKind::EDITS,
            ConsistencyScope::Par => &[EditKind::Paraphrase],
            ConsistencyScope::Sco => &[EditKind::Scope],
            ConsistencyScope::Aff => &[EditKind::Affirmative],
        }
    }
}

impl fmt::Display for ConsistencyScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConsistencyScope::All => "all",
            ConsistencyScope::Par => "par",
            ConsistencyScope::Sco => "sco",
            ConsistencyScope::Aff => "aff",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConsistencyScore {
    pub consistent: usize,
    pub eligible: usize,
    /// Groups lacking a member the scope needs.
    pub excluded: usize,
}

impl ConsistencyScore {
    pub fn value(&self) -> Option<f64> {
        (self.eligible > 0).then(|| self.consistent as f64 / self.eligible as f64)
    }
}

fn slot(kind: EditKind) -> usize {
    match kind {
        EditKind::Original => 0,
        EditKind::Paraphrase => 1,
        EditKind::Scope => 2,
        EditKind::Affirmative => 3,
    }
}

/// Fraction of eligible groups whose original and required edits are all
/// answered correctly. Groups missing a required member are excluded.
pub fn group_consistency(
    records: &[PredictionRecord],
    scope: ConsistencyScope,
    policy: LabelMatch,
) -> Result<ConsistencyScore, MetricsError> {
    let mut groups: BTreeMap<&str, [Option<bool>; 4]> = BTreeMap::new();
    for r in records {
        let (Some(group), Some(kind)) = (r.group_id.as_deref(), r.edit_kind) else {
            return Err(MetricsError::Ungrouped(r.example_id.clone()));
        };
        let members = groups.entry(group).or_default();
        if members[slot(kind)].replace(r.is_correct(policy)).is_some() {
            return Err(MetricsError::MalformedGroup {
                group: group.to_string(),
                kind,
            });
        }
    }
    let mut score = ConsistencyScore::default();
    for members in groups.values() {
        let needed = std::iter::once(EditKind::Original).chain(scope.required_edits().iter().copied());
        let outcomes: Option<Vec<bool>> = needed.map(|k| members[slot(k)]).collect();
        match outcomes {
            None => score.excluded += 1,
            Some(outcomes) => {
                score.eligible += 1;
                if outcomes.into_iter().all(|ok| ok) {
                    score.consistent += 1;
                }
            }
        }
    }
    Ok(score)
}
