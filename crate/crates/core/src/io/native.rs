//! The native JSON instance schema.
//!
//! ```json
//! {
//!   "name": "t1",
//!   "ticks_per_day": 1.0,
//!   "groups": [{ "id": 1, "name": "crew", "capacity": 2 }],
//!   "activities": [
//!     {
//!       "id": 1,
//!       "duration": 2,
//!       "workgroup": "interior",
//!       "demands": { "1": 1 },
//!       "successors": [3]
//!     }
//!   ]
//! }
//! ```
//!
//! Unknown fields are rejected. `parse_native` and `serialize_native`
//! round-trip valid instances losslessly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::io::IoError;
use crate::model::{validate_instance, Activity, ActivityId, Instance, ResourceGroup};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    name: String,
    ticks_per_day: f64,
    groups: Vec<GroupDoc>,
    activities: Vec<ActivityDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupDoc {
    id: i64,
    name: String,
    capacity: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActivityDoc {
    id: i64,
    duration: i64,
    workgroup: String,
    #[serde(default)]
    demands: BTreeMap<String, i64>,
    #[serde(default)]
    successors: Vec<i64>,
}

/// Parses and validates a native JSON instance.
pub fn parse_native(text: &str) -> Result<Instance, IoError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(IoError::from_json)?;
    let instance = instance_from_doc(doc)?;
    let report = validate_instance(&instance);
    if !report.is_valid() {
        return Err(IoError::Invalid(report));
    }
    Ok(instance)
}

fn instance_from_doc(doc: InstanceDoc) -> Result<Instance, IoError> {
    let mut groups = Vec::with_capacity(doc.groups.len());
    for g in doc.groups {
        if g.id <= 0 {
            return Err(IoError::Semantic(format!("group '{}': id must be positive, got {}", g.name, g.id)));
        }
        if g.capacity < 0 {
            return Err(IoError::Semantic(format!("group {}: negative capacity {}", g.id, g.capacity)));
        }
        groups.push(ResourceGroup {
            id: g.id as u32,
            name: g.name,
            capacity: g.capacity.try_into().map_err(|_| {
                IoError::Semantic(format!("group {}: capacity {} out of range", g.id, g.capacity))
            })?,
        });
    }

    let mut activities = Vec::with_capacity(doc.activities.len());
    let mut precedence = BTreeSet::new();
    for a in &doc.activities {
        if a.id <= 0 {
            return Err(IoError::Semantic(format!("activity id must be positive, got {}", a.id)));
        }
        let id = a.id as ActivityId;
        if a.duration < 0 {
            return Err(IoError::Semantic(format!("activity {id}: negative duration {}", a.duration)));
        }
        let mut demands = BTreeMap::new();
        for (key, &units) in &a.demands {
            let group: u32 = key.parse().map_err(|_| {
                IoError::Semantic(format!("activity {id}: demand key '{key}' is not a group id"))
            })?;
            if units < 0 {
                return Err(IoError::Semantic(format!(
                    "activity {id}: negative demand {units} for group {group}"
                )));
            }
            demands.insert(group, units as u32);
        }
        for &succ in &a.successors {
            if succ <= 0 {
                return Err(IoError::Semantic(format!(
                    "activity {id}: successor id must be positive, got {succ}"
                )));
            }
            precedence.insert((id, succ as ActivityId));
        }
        activities.push(Activity {
            id,
            duration: a.duration as u64,
            workgroup: a.workgroup.clone(),
            demands,
        });
    }

    Ok(Instance { name: doc.name, ticks_per_day: doc.ticks_per_day, activities, groups, precedence })
}

/// Serialises an instance to the native schema; inverse of [`parse_native`]
/// on valid instances.
pub fn serialize_native(instance: &Instance) -> String {
    let mut successors: BTreeMap<ActivityId, Vec<i64>> = BTreeMap::new();
    for &(pred, succ) in &instance.precedence {
        successors.entry(pred).or_default().push(succ as i64);
    }
    let doc = InstanceDoc {
        name: instance.name.clone(),
        ticks_per_day: instance.ticks_per_day,
        groups: instance
            .groups
            .iter()
            .map(|g| GroupDoc { id: g.id as i64, name: g.name.clone(), capacity: g.capacity as i64 })
            .collect(),
        activities: instance
            .activities
            .iter()
            .map(|a| ActivityDoc {
                id: a.id as i64,
                duration: a.duration as i64,
                workgroup: a.workgroup.clone(),
                demands: a.demands.iter().map(|(g, &u)| (g.to_string(), u as i64)).collect(),
                successors: successors.remove(&a.id).unwrap_or_default(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance docs always serialise");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::critical_path;

    const T1_JSON: &str = r#"{
        "name": "t1",
        "ticks_per_day": 1.0,
        "groups": [{"id": 1, "name": "crew", "capacity": 2}],
        "activities": [
            {"id": 1, "duration": 2, "workgroup": "default", "demands": {"1": 1}, "successors": [3]},
            {"id": 2, "duration": 3, "workgroup": "default", "demands": {"1": 1}, "successors": [3]},
            {"id": 3, "duration": 2, "workgroup": "default", "demands": {"1": 2}, "successors": [4]},
            {"id": 4, "duration": 1, "workgroup": "default", "demands": {"1": 1}, "successors": []}
        ]
    }"#;

    #[test]
    fn parses_t1_and_round_trips() {
        let instance = parse_native(T1_JSON).unwrap();
        assert_eq!(instance.activities.len(), 4);
        assert_eq!(critical_path(&instance).unwrap().cp_length, 6);
        let text = serialize_native(&instance);
        let again = parse_native(&text).unwrap();
        assert_eq!(again, instance);
    }

    #[test]
    fn negative_duration_names_the_activity() {
        let doc = T1_JSON.replace(r#""id": 2, "duration": 3"#, r#""id": 2, "duration": -1"#);
        let err = parse_native(&doc).unwrap_err();
        assert_eq!(err, IoError::Semantic("activity 2: negative duration -1".into()));
    }

    #[test]
    fn cycles_are_reported_with_members() {
        let doc = T1_JSON.replace(r#""id": 4, "duration": 1, "workgroup": "default", "demands": {"1": 1}, "successors": []"#,
            r#""id": 4, "duration": 1, "workgroup": "default", "demands": {"1": 1}, "successors": [1]"#);
        match parse_native(&doc).unwrap_err() {
            IoError::Invalid(report) => {
                let text = report.to_string();
                assert!(text.contains("cycle"), "{text}");
                assert!(text.contains('1') && text.contains('3') && text.contains('4'), "{text}");
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_carry_a_position() {
        let doc = T1_JSON.replace(r#""ticks_per_day": 1.0,"#, r#""ticks_per_day": 1.0, "bogus": 5,"#);
        match parse_native(&doc).unwrap_err() {
            IoError::Json { line, message, .. } => {
                assert!(line >= 1);
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("expected a JSON error, got {other:?}"),
        }
    }

    #[test]
    fn bad_demand_keys_and_unknown_groups_are_diagnosed() {
        let doc = T1_JSON.replace(r#""demands": {"1": 2}"#, r#""demands": {"x": 2}"#);
        assert_eq!(
            parse_native(&doc).unwrap_err(),
            IoError::Semantic("activity 3: demand key 'x' is not a group id".into())
        );
        let doc = T1_JSON.replace(r#""demands": {"1": 2}"#, r#""demands": {"9": 2}"#);
        assert!(matches!(parse_native(&doc).unwrap_err(), IoError::Invalid(_)));
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        match parse_native("{\n  \"name\": }").unwrap_err() {
            IoError::Json { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("expected a JSON error, got {other:?}"),
        }
    }
}
