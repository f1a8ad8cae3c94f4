//! Concise `value(uncertainty)` notation.

const SUPERSCRIPT: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn superscript(exp: i32) -> String {
    let mut s = String::new();
    if exp < 0 {
        s.push('⁻');
    }
    for c in exp.unsigned_abs().to_string().chars() {
        s.push(SUPERSCRIPT[c.to_digit(10).expect("decimal digit") as usize]);
    }
    s
}

/// `digits * 10^-decimals` written out with exactly `decimals` fraction digits.
fn fixed(digits: i128, decimals: u32) -> String {
    let sign = if digits < 0 { "-" } else { "" };
    let abs = digits.unsigned_abs().to_string();
    if decimals == 0 {
        return format!("{sign}{abs}");
    }
    let d = decimals as usize;
    let padded = if abs.len() <= d { format!("{}{abs}", "0".repeat(d + 1 - abs.len())) } else { abs };
    let (int, frac) = padded.split_at(padded.len() - d);
    format!("{sign}{int}.{frac}")
}

fn num_digits(n: u128) -> i32 {
    n.to_string().len() as i32
}

/// Formats an estimate with its standard error in parentheses.
///
/// The error is rounded to two significant digits, or one when the second
/// would be zero; the value is rounded to the same decimal place. Values of
/// magnitude 0.1 to 99 are written plainly, others as mantissa times a
/// power of ten. A zero error is marked exact.
///
/// ```
/// use adequacy_mlmc::experiment::estimate_format;
/// assert_eq!(estimate_format(0.00171, 0.00013), "1.71(13)×10⁻³");
/// assert_eq!(estimate_format(2100.0, 400.0), "2.1(4)×10³");
/// assert_eq!(estimate_format(0.238, 0.024), "0.238(24)");
/// assert_eq!(estimate_format(5.0, 0.0), "5.0 (exact)");
/// ```
pub fn estimate_format(value: f64, stderr: f64) -> String {
    if !value.is_finite() || !stderr.is_finite() || stderr < 0.0 {
        return format!("{value:?} (n/a)");
    }
    if stderr == 0.0 {
        let short = format!("{value:?}");
        if short.len() <= 8 || value == 0.0 {
            return format!("{short} (exact)");
        }
        let place = value.abs().log10().floor() as i32 - 3;
        return format!("{} (exact)", render((value / 10f64.powi(place)).round() as i128, place, None));
    }
    // Decimal place of the last kept error digit.
    let mut place = stderr.log10().floor() as i32 - 1;
    let mut se_digits = (stderr / 10f64.powi(place)).round() as u128;
    if se_digits >= 100 {
        place += 1;
        se_digits = (stderr / 10f64.powi(place)).round() as u128;
    }
    if se_digits % 10 == 0 {
        place += 1;
        se_digits /= 10;
    }
    render((value / 10f64.powi(place)).round() as i128, place, Some(se_digits))
}

/// `v_digits * 10^place`, with the error digits (same place) in parentheses.
fn render(v_digits: i128, place: i32, se_digits: Option<u128>) -> String {
    let exponent = if v_digits == 0 { 0 } else { place + num_digits(v_digits.unsigned_abs()) - 1 };
    let paren = |scale: u128| se_digits.map_or_else(String::new, |d| format!("({})", d * scale));
    if (-1..=1).contains(&exponent) {
        if place >= 0 {
            let scale = 10u128.pow(place as u32);
            return format!("{}{}", v_digits * scale as i128, paren(scale));
        }
        return format!("{}{}", fixed(v_digits, (-place) as u32), paren(1));
    }
    format!("{}{}×10{}", fixed(v_digits, (exponent - place) as u32), paren(1), superscript(exponent))
}
