//! Locale-independent numeric text with 10 significant digits.

/// `x` rounded to 10 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.9e}").parse().expect("formatted float parses")
}

/// Shortest text that reads back as `round_sig(x)`; plain decimal for
/// moderate magnitudes, scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let r = round_sig(x);
    let e = r.abs().log10().floor();
    if (-6.0..16.0).contains(&e) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
