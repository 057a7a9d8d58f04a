use std::io::{self, Write};

use serde::Serialize;

use crate::engine::{FrontResult, Scenario, Score};

/// One scenario line of a JSONL output file.
#[derive(Debug, Serialize)]
pub struct ScenarioRecord<'a> {
    pub features: Vec<&'a str>,
    pub log10_p: f64,
    pub crit_sum: u32,
    pub p_g: f64,
    pub c_g: f64,
}

impl<'a> ScenarioRecord<'a> {
    pub fn new(scenario: &'a Scenario, score: &Score) -> Self {
        ScenarioRecord {
            features: scenario.iter().collect(),
            log10_p: score.log10_p,
            crit_sum: score.crit_sum,
            p_g: score.p_g(),
            c_g: score.c_g(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }
}

pub fn write_record<W: Write + ?Sized>(out: &mut W, scenario: &Scenario, score: &Score) -> io::Result<()> {
    writeln!(out, "{}", ScenarioRecord::new(scenario, score).to_line())
}

/// Every front scenario, point by point in front order.
pub fn write_front_jsonl(out: &mut impl Write, front: &FrontResult) -> io::Result<()> {
    for (score, scenario) in front.scenarios() {
        write_record(out, scenario, score)?;
    }
    Ok(())
}

/// One row per front point.
pub fn write_front_csv(out: impl Write, front: &FrontResult) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["log10_p", "crit_sum", "scenario_count", "representative_features"])?;
    for point in &front.points {
        let representative = point
            .scenarios
            .first()
            .map(|s| s.iter().collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        w.write_record([
            format!("{:?}", point.score.log10_p),
            point.score.crit_sum.to_string(),
            point.scenarios.len().to_string(),
            representative,
        ])?;
    }
    w.flush()
}

#[derive(Debug, Default, Serialize)]
pub struct Counts {
    pub features: usize,
    pub constraints: usize,
    pub valid_examined: u64,
    pub front_points: usize,
    pub front_scenarios: usize,
    pub truncated: bool,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub elapsed_ms: u64,
    pub counts: Counts,
}
