/// Renders a number with 17 significant digits so tables round-trip exactly.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // normalize -0
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}
