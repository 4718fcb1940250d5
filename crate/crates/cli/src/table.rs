use std::fmt::Write;

use moga_vrptw::io::FrontEntry;

pub const HEADER: &str = "    #  total_distance  vehicle_count  total_tw_violation  violated_tw_count";

/// One row per alternative, ordered by total distance. Columns are fixed width
/// and always in objective order.
pub fn render(entries: &[FrontEntry]) -> String {
    let mut rows: Vec<&FrontEntry> = entries.iter().collect();
    rows.sort_by(|a, b| a.objectives.total_distance.total_cmp(&b.objectives.total_distance));
    let mut out = String::from(HEADER);
    out.push('\n');
    for (k, e) in rows.iter().enumerate() {
        let o = &e.objectives;
        let _ = writeln!(
            out,
            "{k:>5}  {:>14.3}  {:>13}  {:>18.3}  {:>17}",
            o.total_distance, o.vehicle_count, o.total_tw_violation, o.violated_tw_count
        );
    }
    out
}
