//! Published measurement tuples of the reference tank and simulation survey,
//! and a checker that re-solves each one.

use serde::Serialize;

use crate::estimation::{solve_height, ObservationPair};

/// Altitude change between the two frames of every published tuple, meters.
pub const DELTA_H: f64 = 0.1;
/// Largest accepted gap between a recomputed and a published estimate, cm.
pub const TOLERANCE_CM: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Tank frame measured on the fan image.
    Fan,
    /// Tank frame measured on the polar raster.
    Polar,
    /// Simulated frame.
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table3Row {
    pub label: &'static str,
    pub target: u8,
    pub variant: Variant,
    pub r1: f64,
    pub l1: f64,
    pub r2: f64,
    pub l2: f64,
    /// Ground truth as printed; only the fan rows carry one.
    pub gt_cm: Option<f64>,
    pub est_cm: f64,
    pub error_cm: f64,
}

const fn row(
    label: &'static str,
    target: u8,
    variant: Variant,
    m: [f64; 4],
    gt_cm: Option<f64>,
    est_cm: f64,
    error_cm: f64,
) -> Table3Row {
    Table3Row {
        label,
        target,
        variant,
        r1: m[0],
        l1: m[1],
        r2: m[2],
        l2: m[3],
        gt_cm,
        est_cm,
        error_cm,
    }
}

use Variant::{Fan, Polar, Simulated};

#[allow(clippy::approx_constant)]
pub const ROWS: [Table3Row; 15] = [
    row(
        "1",
        1,
        Fan,
        [580.0, 56.0, 592.0, 43.0],
        Some(2.8),
        2.932,
        -0.132,
    ),
    row(
        "1*",
        1,
        Polar,
        [270.0, 26.0, 272.0, 20.0],
        None,
        3.110,
        -0.310,
    ),
    row(
        "1-S",
        1,
        Simulated,
        [518.0, 28.0, 535.0, 24.0],
        None,
        2.637,
        0.163,
    ),
    row(
        "2",
        2,
        Fan,
        [585.0, 61.0, 587.0, 49.0],
        Some(3.9),
        4.185,
        -0.285,
    ),
    row(
        "2*",
        2,
        Polar,
        [291.0, 29.0, 294.0, 23.0],
        None,
        3.639,
        0.261,
    ),
    row(
        "2-S",
        2,
        Simulated,
        [493.0, 32.0, 514.0, 28.0],
        None,
        3.500,
        0.400,
    ),
    row(
        "3",
        3,
        Fan,
        [462.0, 50.0, 475.0, 42.0],
        Some(4.7),
        4.832,
        -0.132,
    ),
    row(
        "3*",
        3,
        Polar,
        [219.0, 25.0, 222.0, 20.0],
        None,
        4.274,
        0.426,
    ),
    row(
        "3-S",
        3,
        Simulated,
        [417.0, 26.0, 440.0, 24.0],
        None,
        4.358,
        0.342,
    ),
    row(
        "4",
        4,
        Fan,
        [513.0, 35.0, 525.0, 30.0],
        Some(3.0),
        3.517,
        -0.517,
    ),
    row(
        "4*",
        4,
        Polar,
        [248.0, 22.0, 256.0, 18.0],
        None,
        3.390,
        -0.390,
    ),
    row(
        "4-S",
        4,
        Simulated,
        [444.0, 26.0, 466.0, 23.0],
        None,
        3.141,
        0.141,
    ),
    row(
        "5",
        5,
        Fan,
        [495.0, 35.0, 504.0, 28.0],
        Some(2.8),
        2.593,
        0.207,
    ),
    row(
        "5*",
        5,
        Polar,
        [242.0, 23.0, 248.0, 18.0],
        None,
        3.071,
        -0.271,
    ),
    row(
        "5-S",
        5,
        Simulated,
        [436.0, 20.0, 457.0, 18.0],
        None,
        2.786,
        0.014,
    ),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowCheck {
    pub label: String,
    pub r1: f64,
    pub l1: f64,
    pub r2: f64,
    pub l2: f64,
    pub published_est_cm: f64,
    pub computed_cm: Option<f64>,
    pub diff_cm: Option<f64>,
    pub pass: bool,
    /// Printed error against `gt − computed`, for rows with a printed GT.
    pub published_error_cm: Option<f64>,
    pub computed_error_cm: Option<f64>,
    pub error_pass: Option<bool>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table3Report {
    pub delta_h_m: f64,
    pub tolerance_cm: f64,
    pub rows: Vec<RowCheck>,
    pub passed: usize,
    pub failed: usize,
}

impl Table3Report {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<6} {:>6} {:>5} {:>6} {:>5} {:>9} {:>9} {:>8}  result\n",
            "row", "R1", "L1", "R2", "L2", "published", "computed", "|diff|"
        );
        for r in &self.rows {
            let comp = r
                .computed_cm
                .map_or("error".to_string(), |v| format!("{v:.3}"));
            let diff = r.diff_cm.map_or("-".to_string(), |v| format!("{v:.4}"));
            s += &format!(
                "{:<6} {:>6} {:>5} {:>6} {:>5} {:>9.3} {:>9} {:>8}  {}",
                r.label,
                r.r1,
                r.l1,
                r.r2,
                r.l2,
                r.published_est_cm,
                comp,
                diff,
                if r.pass { "PASS" } else { "FAIL" }
            );
            if let Some(n) = &r.note {
                s += &format!("  ({n})");
            }
            s.push('\n');
        }
        s += &format!(
            "{}/{} rows within ±{} cm\n",
            self.passed,
            self.rows.len(),
            self.tolerance_cm
        );
        s
    }
}

/// Re-solves every row with `ΔH = 0.1 m` and compares against the published
/// estimate.
pub fn reproduce(rows: &[Table3Row]) -> Table3Report {
    let checks: Vec<RowCheck> = rows
        .iter()
        .map(|r| {
            let pair = ObservationPair::from_measurements(r.label, r.r1, r.l1, r.r2, r.l2, DELTA_H);
            let solved = solve_height(&pair);
            let computed = solved.as_ref().ok().map(|e| e.height_cm());
            let diff = computed.map(|c| (c - r.est_cm).abs());
            let pass = diff.is_some_and(|d| d <= TOLERANCE_CM);
            let computed_error = r.gt_cm.zip(computed).map(|(g, c)| g - c);
            let error_pass = r
                .gt_cm
                .and(computed_error)
                .map(|e| (e - r.error_cm).abs() <= TOLERANCE_CM);
            let note = match (&solved, pass) {
                (Err(e), _) => Some(e.to_string()),
                (Ok(_), false) => Some(format!(
                    "recomputed estimate differs from the published {:.3} cm",
                    r.est_cm
                )),
                _ => None,
            };
            RowCheck {
                label: r.label.to_string(),
                r1: r.r1,
                l1: r.l1,
                r2: r.r2,
                l2: r.l2,
                published_est_cm: r.est_cm,
                computed_cm: computed,
                diff_cm: diff,
                pass,
                published_error_cm: r.gt_cm.map(|_| r.error_cm),
                computed_error_cm: computed_error,
                error_pass,
                note,
            }
        })
        .collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    Table3Report {
        delta_h_m: DELTA_H,
        tolerance_cm: TOLERANCE_CM,
        failed: checks.len() - passed,
        rows: checks,
        passed,
    }
}
