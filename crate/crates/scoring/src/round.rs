/// Rounds half away from zero at the given number of decimals.
pub fn round_half_away(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round() / scale
}

/// Error in cm formatted to 2 decimals, the table convention.
pub fn format_error_cm(value: f64) -> String {
    format!("{:.2}", round_half_away(value, 2))
}

/// Percentage formatted to 1 decimal.
pub fn format_percent(value: f64) -> String {
    format!("{:.1}", round_half_away(value, 1))
}

/// Grasp rate as "78.8%" or "N/A" when nothing was attempted.
pub fn format_grasp_rate(rate: Option<f64>) -> String {
    match rate {
        Some(r) => format!("{}%", format_percent(r * 100.0)),
        None => "N/A".to_string(),
    }
}
