//! CSV writers with a byte-stable output contract: ASCII commas, LF line
//! endings, `.` decimal separators, fixed headers, fixed row order.

use crate::ga::ConvergenceLog;
use crate::sgs::Schedule;

/// One row per (activity, group, unit) assignment, sorted by start tick,
/// then activity, group and unit id.
pub fn write_schedule(schedule: &Schedule) -> String {
    let mut rows: Vec<(u64, u32, u32, u32, &str)> = Vec::new();
    for row in &schedule.rows {
        for assignment in &row.assignments {
            for &unit in &assignment.units {
                rows.push((row.start, row.activity, assignment.group, unit, row.workgroup.as_str()));
            }
        }
    }
    rows.sort_by_key(|&(start, activity, group, unit, _)| (start, activity, group, unit));

    let mut out = String::from("activity_id,workgroup,start_tick,finish_tick,group_id,unit_id\n");
    for (start, activity, group, unit, workgroup) in rows {
        let finish = schedule.row(activity).expect("row exists for every assignment").finish;
        out.push_str(&format!(
            "{activity},{},{start},{finish},{group},{unit}\n",
            field(workgroup)
        ));
    }
    out
}

/// One row per generation: the convergence curve behind a run.
/// `elapsed_ms` is the engine's deterministic work clock.
pub fn write_convergence(log: &ConvergenceLog, ticks_per_day: f64) -> String {
    let mut out =
        String::from("generation,best_makespan_ticks,best_makespan_days,mean_makespan_ticks,elapsed_ms\n");
    for record in &log.records {
        let days = record.best_ticks as f64 / ticks_per_day;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            record.generation, record.best_ticks, days, record.mean_ticks, record.elapsed_ms
        ));
    }
    out
}

/// Quotes a field only when it contains a delimiter, quote or newline.
fn field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::{ConvergenceLog, ConvergenceRecord};
    use crate::model::{Activity, Instance, ResourceGroup};
    use crate::sgs::{serial_sgs, Policy};
    use std::collections::{BTreeMap, BTreeSet};

    fn t1() -> Instance {
        let durations = [2, 3, 2, 1];
        Instance {
            name: "t1".into(),
            ticks_per_day: 1.0,
            activities: (1..=4)
                .map(|id| Activity {
                    id,
                    duration: durations[id as usize - 1],
                    workgroup: "default".into(),
                    demands: BTreeMap::from([(1, if id == 3 { 2 } else { 1 })]),
                })
                .collect(),
            groups: vec![ResourceGroup { id: 1, name: "crew".into(), capacity: 2 }],
            precedence: BTreeSet::from([(1, 3), (2, 3), (3, 4)]),
        }
    }

    fn t2() -> Instance {
        let workgroups = ["W-B", "W-A", "W-A"];
        Instance {
            name: "t2".into(),
            ticks_per_day: 1.0,
            activities: (1..=3)
                .map(|id| Activity {
                    id,
                    duration: 2,
                    workgroup: workgroups[id as usize - 1].into(),
                    demands: BTreeMap::from([(1, 1)]),
                })
                .collect(),
            groups: vec![ResourceGroup { id: 1, name: "crew".into(), capacity: 2 }],
            precedence: BTreeSet::from([(1, 3), (2, 3)]),
        }
    }

    #[test]
    fn t1_schedule_yields_five_assignment_rows() {
        let csv = write_schedule(&serial_sgs(&t1(), &[1, 2, 3, 4], Policy::Est).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "activity_id,workgroup,start_tick,finish_tick,group_id,unit_id");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1], "1,default,0,2,1,1");
        assert_eq!(lines[2], "2,default,0,3,1,2");
        assert_eq!(lines[3], "3,default,3,5,1,1");
        assert_eq!(lines[4], "3,default,3,5,1,2");
        assert_eq!(lines[5], "4,default,5,6,1,1");
    }

    #[test]
    fn no_assignments_means_header_only() {
        let mut inst = t1();
        for a in &mut inst.activities {
            a.demands.clear();
        }
        let csv = write_schedule(&serial_sgs(&inst, &[1, 2, 3, 4], Policy::Est).unwrap());
        assert_eq!(csv, "activity_id,workgroup,start_tick,finish_tick,group_id,unit_id\n");
    }

    #[test]
    fn policies_differ_only_in_the_unit_column() {
        let est = write_schedule(&serial_sgs(&t2(), &[1, 2, 3], Policy::Est).unwrap());
        let west = write_schedule(&serial_sgs(&t2(), &[1, 2, 3], Policy::West).unwrap());
        let differing: Vec<(&str, &str)> =
            est.lines().zip(west.lines()).filter(|(a, b)| a != b).collect();
        assert_eq!(differing, vec![("3,W-A,2,4,1,1", "3,W-A,2,4,1,2")]);
    }

    #[test]
    fn convergence_rows_and_days_scaling() {
        let log = ConvergenceLog {
            records: (1..=3)
                .map(|generation| ConvergenceRecord {
                    generation,
                    best_ticks: 12 - generation,
                    mean_ticks: 12.5,
                    elapsed_ms: generation * 10,
                })
                .collect(),
        };
        let csv = write_convergence(&log, 2.0);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "generation,best_makespan_ticks,best_makespan_days,mean_makespan_ticks,elapsed_ms"
        );
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "1,11,5.5,12.5,10");
        assert_eq!(lines[3], "3,9,4.5,12.5,30");

        let single = ConvergenceLog { records: log.records[..1].to_vec() };
        assert_eq!(write_convergence(&single, 2.0).lines().count(), 2);
    }

    #[test]
    fn writers_are_deterministic() {
        let schedule = serial_sgs(&t1(), &[1, 2, 3, 4], Policy::West).unwrap();
        assert_eq!(write_schedule(&schedule), write_schedule(&schedule.clone()));
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        assert_eq!(field("a,b"), "\"a,b\"");
        assert_eq!(field("plain"), "plain");
    }
}
