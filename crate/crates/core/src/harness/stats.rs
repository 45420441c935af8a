//! Small statistics used by the harness: exact one-sided sign test and
//! linear-interpolation quartiles.

/// P(X >= k) for X ~ Binomial(n, 1/2), computed exactly in f64.
pub fn binomial_upper_tail(n: u64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    // accumulate C(n, i) / 2^n via the multiplicative recurrence
    let mut coef = 1.0f64; // C(n, 0)
    let mut tail = 0.0;
    for i in 0..=n {
        if i >= k {
            tail += coef;
        }
        coef = coef * (n - i) as f64 / (i + 1) as f64;
    }
    tail / 2f64.powi(n as i32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTest {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    pub win_fraction: f64,
    /// One-sided p-value against the 50% null, ties discarded.
    pub p_value: f64,
}

/// Paired one-sided sign test: an entry > 0 counts as a win.
pub fn sign_test(deltas: &[f64]) -> SignTest {
    let wins = deltas.iter().filter(|&&d| d > 0.0).count();
    let losses = deltas.iter().filter(|&&d| d < 0.0).count();
    let ties = deltas.len() - wins - losses;
    let n = wins + losses;
    let p_value = if n == 0 {
        1.0
    } else {
        binomial_upper_tail(n as u64, wins as u64)
    };
    SignTest {
        wins,
        losses,
        ties,
        win_fraction: if deltas.is_empty() {
            0.0
        } else {
            wins as f64 / deltas.len() as f64
        },
        p_value,
    }
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// (q1, median, q3) of an unsorted sample.
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    (
        quantile(&v, 0.25),
        quantile(&v, 0.5),
        quantile(&v, 0.75),
    )
}
