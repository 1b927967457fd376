/// 17 significant digits in positional notation: `0.0000000000000000`,
/// `49.500000000000000`, `0.0012345678901234568`.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if exp > 16 {
        return sci;
    }
    let decimals = (16 - exp) as usize;
    format!("{x:.decimals$}")
}

/// 17 significant digits in scientific notation.
pub fn format_sci(x: f64) -> String {
    format!("{x:.16e}")
}
