use serde::{Deserialize, Serialize};

pub const TIMELINE_HEADER: &str = "run_id,mode,generation,elapsed_ms,covered,total";

/// Simulated frame rate used to turn ticks into elapsed time.
pub const TICKS_PER_SECOND: u64 = 30;

pub fn ticks_to_ms(ticks: u64) -> u64 {
    ticks * 1000 / TICKS_PER_SECOND
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub generation: u64,
    /// Simulated game time spent so far, robustness replays included.
    pub elapsed_ms: u64,
    pub covered: usize,
    pub total: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageTimeline {
    pub points: Vec<TimelinePoint>,
}

impl CoverageTimeline {
    pub fn push(&mut self, p: TimelinePoint) {
        debug_assert!(self.points.last().is_none_or(|l| l.covered <= p.covered));
        self.points.push(p);
    }

    pub fn final_coverage(&self) -> f64 {
        self.points.last().map_or(0.0, |p| if p.total == 0 { 0.0 } else { p.covered as f64 / p.total as f64 })
    }

    /// Rows without the header.
    pub fn csv_rows(&self, run_id: &str, mode: &str) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!("{run_id},{mode},{},{},{},{}\n", p.generation, p.elapsed_ms, p.covered, p.total));
        }
        out
    }

    pub fn to_csv(&self, run_id: &str, mode: &str) -> String {
        format!("{TIMELINE_HEADER}\n{}", self.csv_rows(run_id, mode))
    }
}
