//! Quadrature rules.

/// 4-point Gauss-Legendre abscissae on `[0, 1]`.
pub const GL4_NODES: [f64; 4] = [
    0.069_431_844_202_973_71,
    0.330_009_478_207_571_9,
    0.669_990_521_792_428_1,
    0.930_568_155_797_026_3,
];
/// Matching weights (sum to 1).
pub const GL4_WEIGHTS: [f64; 4] = [
    0.173_927_422_568_726_93,
    0.326_072_577_431_273_07,
    0.326_072_577_431_273_07,
    0.173_927_422_568_726_93,
];

/// Integral of `f` over `[a, b]` with one 4-point Gauss-Legendre panel.
pub fn gauss4(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = b - a;
    GL4_NODES
        .iter()
        .zip(GL4_WEIGHTS)
        .map(|(&t, w)| w * f(a + t * h))
        .sum::<f64>()
        * h
}

/// Composite Simpson rule on equally spaced samples.
///
/// An even sample count (odd number of intervals) closes with the 3/8 rule on
/// the last three intervals.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ if n % 2 == 1 => simpson_odd(values, h),
        _ => {
            let head = &values[..n - 3];
            let tail = &values[n - 4..];
            simpson_odd(head, h)
                + 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3])
        }
    }
}

fn simpson_odd(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n == 1 {
        return 0.0;
    }
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Simpson rule for `f` on `[a, b]` with at least `min_intervals` panels.
pub fn simpson_fn(a: f64, b: f64, min_intervals: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = min_intervals.max(2) + min_intervals % 2;
    let h = (b - a) / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| f(a + i as f64 * h)).collect();
    simpson(&values, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss4_exact_for_degree_seven() {
        let v = gauss4(-1.0, 2.0, |x| x.powi(7) - 3.0 * x.powi(4) + 1.0);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - 3.0 * (32.0 + 1.0) / 5.0 + 3.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn simpson_both_parities() {
        for n in [9usize, 10, 101, 102] {
            let h = std::f64::consts::PI / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
            assert!((simpson(&v, h) - 2.0).abs() < 2e-3, "n = {n}");
        }
        let h = 0.01;
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 * h).powi(3)).collect();
        let exact = (999.0 * h).powi(4) / 4.0;
        assert!((simpson(&v, h) - exact).abs() < 1e-9 * exact);
    }
}
