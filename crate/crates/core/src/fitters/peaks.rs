use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Refined location (same units as the input axis).
    pub freq: f64,
    /// Refined height.
    pub height: f64,
    pub prominence: f64,
}

/// Centered boxcar average of width `w` (odd widths are symmetric; 0 or 1
/// returns the input).
pub fn boxcar(values: &[f64], w: usize) -> Vec<f64> {
    if w <= 1 {
        return values.to_vec();
    }
    let half = w / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let a = i.saturating_sub(half);
            let b = (i + half + 1).min(n);
            values[a..b].iter().sum::<f64>() / (b - a) as f64
        })
        .collect()
}

/// Local maxima of `values` whose topographic prominence is at least
/// `min_prominence`, located to sub-sample precision by a parabola through
/// the three samples around each maximum. Sorted by position.
pub fn find_peaks(freqs: &[f64], values: &[f64], min_prominence: f64, smooth: usize) -> Vec<Peak> {
    let y = boxcar(values, smooth);
    let n = y.len().min(freqs.len());
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if !(y[i] > y[i - 1]) {
            i += 1;
            continue;
        }
        // extend over a flat top
        let mut j = i;
        while j + 1 < n && y[j + 1] == y[i] {
            j += 1;
        }
        if j + 1 >= n || !(y[j + 1] < y[i]) {
            i = j + 1;
            continue;
        }
        let top = y[i];
        let mut left_min = top;
        for k in (0..i).rev() {
            if y[k] > top {
                break;
            }
            left_min = left_min.min(y[k]);
        }
        let mut right_min = top;
        for &v in &y[j + 1..n] {
            if v > top {
                break;
            }
            right_min = right_min.min(v);
        }
        let prominence = top - left_min.max(right_min);
        if prominence >= min_prominence {
            let c = (i + j) / 2;
            let (f, h) = if c > 0 && c + 1 < n && i == j {
                refine(freqs[c - 1], freqs[c], freqs[c + 1], y[c - 1], y[c], y[c + 1])
            } else {
                (0.5 * (freqs[i] + freqs[j]), top)
            };
            out.push(Peak {
                freq: f,
                height: h,
                prominence,
            });
        }
        i = j + 1;
    }
    out
}

fn refine(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    // parabola through three points (non-uniform spacing allowed)
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let a = (d1 - d0) / (x2 - x0);
    if !(a < 0.0) {
        return (x1, y1);
    }
    let b = d0 - a * (x0 + x1);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    let yv = y1 + (xv - x1) * (d0 + a * (xv - x0));
    (xv, yv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_single_peak() {
        let xs: Vec<f64> = (0..201).map(|k| k as f64 * 0.01).collect();
        let x0 = 1.0137;
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 + ((x - x0) / 0.05f64).powi(2))).collect();
        let p = find_peaks(&xs, &ys, 0.1, 0);
        assert_eq!(p.len(), 1);
        assert!((p[0].freq - x0).abs() < 0.01);
        assert!((p[0].height - 1.0).abs() < 0.01);
    }

    #[test]
    fn monotone_and_prominence_filter() {
        let xs: Vec<f64> = (0..50).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * 0.1).collect();
        assert!(find_peaks(&xs, &ys, 0.0, 0).is_empty());
        let wiggle: Vec<f64> = xs.iter().map(|x| (x * 0.7).sin() * 1e-3 + if (*x as i64) == 25 { 1.0 } else { 0.0 }).collect();
        let p = find_peaks(&xs, &wiggle, 0.5, 0);
        assert_eq!(p.len(), 1);
        assert!((p[0].freq - 25.0).abs() < 0.5);
    }

    #[test]
    fn parabola_vertex_exact() {
        let f = |x: f64| 2.0 - 3.0 * (x - 0.37).powi(2);
        let (x, y) = refine(0.0, 0.3, 0.8, f(0.0), f(0.3), f(0.8));
        assert!((x - 0.37).abs() < 1e-12 && (y - 2.0).abs() < 1e-12);
    }
}
