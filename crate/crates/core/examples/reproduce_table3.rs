//! Re-solves the published tank and simulation measurement tuples.

use shadowheight::table3::{reproduce, ROWS};

fn main() {
    let report = reproduce(&ROWS);
    print!("{}", report.to_text());
    for r in report.rows.iter().filter(|r| r.error_pass.is_some()) {
        println!(
            "row {:<3} printed error {:+.3} cm, recomputed {:+.3} cm",
            r.label,
            r.published_error_cm.unwrap(),
            r.computed_error_cm.unwrap()
        );
    }
}
