//! Parser for the single-mode PSPLIB ".sm" benchmark layout.
//!
//! Dummy source/sink activities are kept with their zero durations and
//! demands so makespans line up with published results. Every activity gets
//! the workgroup "default" (the format has no such concept) and the tick
//! scale is one tick per day.

use std::collections::{BTreeMap, BTreeSet};

use crate::io::IoError;
use crate::model::{validate_instance, Activity, ActivityId, Instance, ResourceGroup};

pub fn parse_psplib(text: &str) -> Result<Instance, IoError> {
    let lines: Vec<&str> = text.lines().collect();

    let jobs = header_count(&lines, "jobs (incl.")?;
    let renewables = header_count(&lines, "- renewable")?;

    let name = lines
        .iter()
        .find(|l| l.contains("file with basedata"))
        .and_then(|l| l.split(':').nth(1))
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .unwrap_or_else(|| "psplib-instance".to_string());

    // PRECEDENCE RELATIONS: one line per job after the column header.
    let prec_start = section_start(&lines, "PRECEDENCE RELATIONS", 2)?;
    let mut successors: Vec<(ActivityId, Vec<ActivityId>)> = Vec::with_capacity(jobs);
    for offset in 0..jobs {
        let lineno = prec_start + offset;
        let line = data_line(&lines, lineno).ok_or_else(|| IoError::Format {
            line: lineno + 1,
            message: format!("expected {jobs} precedence lines, found {offset}"),
        })?;
        let fields = ints(line, lineno)?;
        if fields.len() < 3 {
            return Err(IoError::Format {
                line: lineno + 1,
                message: "precedence line needs jobnr, #modes and #successors".into(),
            });
        }
        let (jobnr, modes, nsucc) = (fields[0], fields[1], fields[2]);
        if modes != 1 {
            return Err(IoError::Format {
                line: lineno + 1,
                message: format!("job {jobnr} has {modes} modes; only single-mode instances are supported"),
            });
        }
        if fields.len() != 3 + nsucc as usize {
            return Err(IoError::Format {
                line: lineno + 1,
                message: format!("job {jobnr} declares {nsucc} successors but lists {}", fields.len() - 3),
            });
        }
        successors.push((jobnr as ActivityId, fields[3..].iter().map(|&s| s as ActivityId).collect()));
    }

    // REQUESTS/DURATIONS: jobnr, mode, duration, one demand per group.
    let mut req_start = section_start(&lines, "REQUESTS/DURATIONS", 2)?;
    if lines.get(req_start).is_some_and(|l| l.trim_start().starts_with('-')) {
        req_start += 1;
    }
    let mut durations: BTreeMap<ActivityId, u64> = BTreeMap::new();
    let mut demands: BTreeMap<ActivityId, BTreeMap<u32, u32>> = BTreeMap::new();
    for offset in 0..jobs {
        let lineno = req_start + offset;
        let line = data_line(&lines, lineno).ok_or_else(|| IoError::Format {
            line: lineno + 1,
            message: format!("expected {jobs} request/duration lines, found {offset}"),
        })?;
        let fields = ints(line, lineno)?;
        if fields.len() != 3 + renewables {
            return Err(IoError::Format {
                line: lineno + 1,
                message: format!(
                    "request line has {} fields, expected jobnr, mode, duration and {renewables} demands",
                    fields.len()
                ),
            });
        }
        let jobnr = fields[0] as ActivityId;
        durations.insert(jobnr, fields[2] as u64);
        let mut per_group = BTreeMap::new();
        for (g, &units) in fields[3..].iter().enumerate() {
            if units > 0 {
                per_group.insert(g as u32 + 1, units as u32);
            }
        }
        demands.insert(jobnr, per_group);
    }

    // RESOURCEAVAILABILITIES: a column-header line, then the capacities.
    let avail_start = section_start(&lines, "RESOURCEAVAILABILITIES", 2)?;
    let line = data_line(&lines, avail_start).ok_or_else(|| IoError::Format {
        line: avail_start + 1,
        message: "missing resource availability values".into(),
    })?;
    let capacities = ints(line, avail_start)?;
    if capacities.len() != renewables {
        return Err(IoError::Format {
            line: avail_start + 1,
            message: format!("found {} capacities, expected {renewables}", capacities.len()),
        });
    }

    let groups = capacities
        .iter()
        .enumerate()
        .map(|(g, &cap)| ResourceGroup {
            id: g as u32 + 1,
            name: format!("R{}", g + 1),
            capacity: cap as u32,
        })
        .collect();

    let mut activities = Vec::with_capacity(jobs);
    let mut precedence = BTreeSet::new();
    for (jobnr, succs) in &successors {
        let duration = *durations.get(jobnr).ok_or_else(|| IoError::Semantic(format!(
            "job {jobnr} appears in precedence but not in requests/durations"
        )))?;
        activities.push(Activity {
            id: *jobnr,
            duration,
            workgroup: "default".into(),
            demands: demands.remove(jobnr).unwrap_or_default(),
        });
        for &s in succs {
            precedence.insert((*jobnr, s));
        }
    }

    let instance =
        Instance { name, ticks_per_day: 1.0, activities, groups, precedence };
    let report = validate_instance(&instance);
    if !report.is_valid() {
        return Err(IoError::Invalid(report));
    }
    Ok(instance)
}

/// The integer following the matching header's colon.
fn header_count(lines: &[&str], needle: &str) -> Result<usize, IoError> {
    for (i, line) in lines.iter().enumerate() {
        if line.contains(needle) {
            let digits: String =
                line.chars().filter(|c| c.is_ascii_digit() || c.is_whitespace()).collect();
            return digits
                .split_whitespace()
                .next()
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| IoError::Format {
                    line: i + 1,
                    message: format!("no count found on '{needle}' line"),
                });
        }
    }
    Err(IoError::Semantic(format!("missing '{needle}' header")))
}

/// Index of the first data line of a section: the section header plus its
/// column-header lines.
fn section_start(lines: &[&str], needle: &str, skip: usize) -> Result<usize, IoError> {
    lines
        .iter()
        .position(|l| l.contains(needle))
        .map(|i| i + skip)
        .ok_or_else(|| IoError::Semantic(format!("missing '{needle}' section")))
}

/// A data line, unless the section ended (separator row of asterisks).
fn data_line<'a>(lines: &[&'a str], index: usize) -> Option<&'a str> {
    let line = lines.get(index)?;
    if line.trim_start().starts_with('*') || line.trim().is_empty() {
        return None;
    }
    Some(line)
}

fn ints(line: &str, lineno: usize) -> Result<Vec<i64>, IoError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<i64>().map_err(|_| IoError::Format {
                line: lineno + 1,
                message: format!("'{tok}' is not a number"),
            })
        })
        .collect()
}
