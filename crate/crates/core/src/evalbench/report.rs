use std::fmt::Write as _;

use serde::Serialize;

use super::metrics::{ClassRmse, LandingMetrics};

/// Location and spread of a set of values; `std` is the sample standard
/// deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Summary {
    /// Summary of the finite values in `values`; all fields are NaN when
    /// there are none.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        let n = v.len();
        if n == 0 {
            return Summary {
                mean: f64::NAN,
                median: f64::NAN,
                std: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
                n,
            };
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        v.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        Summary {
            mean,
            median,
            std,
            min: v[0],
            max: v[n - 1],
            n,
        }
    }
}

/// What happened during one simulated frame.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FrameRecord {
    pub seed: u64,
    pub frame: usize,
    pub timestamp: f64,
    pub altitude_agl: f64,
    pub rmse: ClassRmse,
    pub render_ms: f64,
    pub fuse_ms: f64,
    /// Snapshot plus detection; zero when detection did not run on this frame.
    pub detect_ms: f64,
    pub fused_points: usize,
    pub updated_cells: usize,
    /// Points fused per target level, coarsest first.
    pub points_per_level: Vec<usize>,
}

/// Landing metrics of one seeded run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub metrics: LandingMetrics,
}

/// Landing metrics of several runs of the same configuration, with the frame
/// log of every run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub label: String,
    pub runs: Vec<RunRecord>,
    pub frames: Vec<FrameRecord>,
    /// Payload bytes of the map of the last run.
    pub memory_bytes: usize,
}

impl EvalReport {
    pub fn new(label: impl Into<String>) -> Self {
        EvalReport {
            label: label.into(),
            ..Default::default()
        }
    }

    /// Counts summed over all runs.
    pub fn pooled(&self) -> LandingMetrics {
        let mut m = LandingMetrics::default();
        for r in &self.runs {
            m.merge(&r.metrics);
        }
        m
    }

    /// Spread of the per-run recall.
    pub fn recall(&self) -> Summary {
        Summary::of(self.runs.iter().filter_map(|r| r.metrics.recall()))
    }

    pub fn detection_rate(&self) -> Summary {
        Summary::of(self.runs.iter().filter_map(|r| r.metrics.detection_rate()))
    }

    pub fn false_positive_rate(&self) -> Summary {
        Summary::of(self.runs.iter().filter_map(|r| r.metrics.false_positive_rate()))
    }

    pub fn fuse_ms(&self) -> Summary {
        Summary::of(self.frames.iter().map(|f| f.fuse_ms))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

/// Frame log as CSV, one line per frame.
pub fn frames_csv(frames: &[FrameRecord]) -> String {
    let mut s = String::from(
        "seed,frame,timestamp,altitude_agl,rmse_flat,rmse_rock,rmse_cliff,rmse_total,render_ms,fuse_ms,detect_ms,fused_points,updated_cells,points_per_level\n",
    );
    for f in frames {
        let levels: Vec<String> = f.points_per_level.iter().map(usize::to_string).collect();
        let _ = writeln!(
            s,
            "{},{},{:.3},{:.3},{},{},{},{},{:.3},{:.3},{:.3},{},{},{}",
            f.seed,
            f.frame,
            f.timestamp,
            f.altitude_agl,
            opt(f.rmse.flat),
            opt(f.rmse.rock),
            opt(f.rmse.cliff),
            opt(f.rmse.total),
            f.render_ms,
            f.fuse_ms,
            f.detect_ms,
            f.fused_points,
            f.updated_cells,
            levels.join(";")
        );
    }
    s
}

/// Per-run landing metrics as CSV.
pub fn runs_csv(reports: &[&EvalReport]) -> String {
    let mut s = String::from(
        "label,seed,evaluated_cells,correct_cells,true_hazard_cells,false_safe_cells,rocks_visible,rocks_detected,recall,detection_rate,false_positive_rate\n",
    );
    for rep in reports {
        for r in &rep.runs {
            let m = &r.metrics;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                rep.label,
                r.seed,
                m.evaluated_cells,
                m.correct_cells,
                m.true_hazard_cells,
                m.false_safe_cells,
                m.rocks_visible,
                m.rocks_detected,
                opt(m.recall()),
                opt(m.detection_rate()),
                opt(m.false_positive_rate())
            );
        }
    }
    s
}

/// Formats a rate in percent, or a dash when undefined.
pub(crate) fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{:.2}", 100.0 * x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_values() {
        let s = Summary::of([1.0, 2.0, 3.0, f64::NAN]);
        assert_eq!(s.n, 3);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.median, 2.0);
        assert_eq!(Summary::of([4.0, 1.0, 3.0, 2.0]).median, 2.5);
        assert_eq!(s.std, 1.0);
        assert_eq!((s.min, s.max), (1.0, 3.0));
        assert!(Summary::of([]).mean.is_nan());
    }

    #[test]
    fn frame_csv_has_header_and_rows() {
        let f = FrameRecord {
            points_per_level: vec![1, 2, 3],
            ..Default::default()
        };
        let csv = frames_csv(&[f.clone(), f]);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().ends_with("1;2;3"));
    }
}
