//! Value parsers for unit-suffixed command-line numbers.

fn split_suffix(s: &str) -> (&str, &str) {
    let s = s.trim();
    let cut = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_alphabetic() || *c == 'μ' || *c == 'Ω')
        .last()
        .map_or(s.len(), |(i, _)| i);
    // keep exponents like 1e9 and words like inf together with the number
    let (num, unit) = s.split_at(cut);
    if num.is_empty() || num.ends_with(['e', 'E']) {
        (s, "")
    } else {
        (num.trim(), unit)
    }
}

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("'{s}' is not a number"))
}

/// `num`·10^exp, exact to the decimal literal when `num` has no exponent.
fn scaled(num: &str, exp: i32) -> Result<f64, String> {
    let x = number(num)?;
    if exp == 0 || num.contains(['e', 'E']) || !x.is_finite() {
        return Ok(x * 10f64.powi(exp));
    }
    number(&format!("{num}e{exp}"))
}

/// Cyclic frequency in Hz; accepts `Hz`, `kHz`, `MHz`, `GHz` suffixes.
pub fn freq(s: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(s);
    let exp = match unit.to_ascii_lowercase().as_str() {
        "" | "hz" => 0,
        "khz" => 3,
        "mhz" => 6,
        "ghz" => 9,
        _ => return Err(format!("unknown frequency unit '{unit}'")),
    };
    scaled(num, exp)
}

/// Length in m; accepts `m`, `mm`, `um`, `μm`, `nm`.
pub fn length(s: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(s);
    let exp = match unit {
        "" | "m" => 0,
        "mm" => -3,
        "um" | "μm" => -6,
        "nm" => -9,
        _ => return Err(format!("unknown length unit '{unit}'")),
    };
    scaled(num, exp)
}

/// `name=value` electrode bias.
pub fn bias(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=volts, got '{s}'"))?;
    Ok((k.trim().to_owned(), number(v.trim())?))
}

/// `x0,x1,y0,y1` in μm.
pub fn window(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s.split(',').map(|t| number(t.trim())).collect::<Result<_, _>>()?;
    <[f64; 4]>::try_from(v).map_err(|_| "window needs four comma-separated values".to_owned())
}
