//! Number formatting and argument parsing helpers.

use heisenberg::HPoint;

use super::CliError;

/// `%.9g`-style rendering for human-readable tables.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        format!("{}e{e}", trim_zeros(mantissa.to_string()))
    }
}

/// Shortest round-trip rendering for machine-readable output.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float serialises")
    } else {
        format!("{x}")
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Comma list or JSON array of reals.
pub fn parse_reals(text: &str) -> Result<Vec<f64>, CliError> {
    let text = text.trim();
    if text.starts_with('[') {
        return serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("cannot parse '{text}' as a JSON array: {e}")));
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("cannot parse '{s}' as a number in '{text}'")))
        })
        .collect()
}

pub fn parse_point(text: &str, m: Option<usize>) -> Result<HPoint, CliError> {
    let coords = parse_reals(text)?;
    if let Some(m) = m {
        if coords.len() != 2 * m + 1 {
            return Err(CliError::Input(format!(
                "point '{text}' has {} coordinates, m = {m} needs {}",
                coords.len(),
                2 * m + 1
            )));
        }
    }
    Ok(HPoint::from_slice(&coords)?)
}

pub fn parse_pair(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => Ok((a, b)),
            _ => Err(CliError::Input(format!("expected NX,NY, got '{text}'"))),
        },
        _ => Err(CliError::Input(format!("expected NX,NY, got '{text}'"))),
    }
}
