//! Floating-point helpers usable without `std`.

use alloc::vec::Vec;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, p: f64) -> f64 {
    libm::pow(x, p)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}

/// `-x ln x` with the convention `0 ln 0 = 0`.
#[inline]
pub fn xlogx_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * ln(x)
    }
}

/// Shannon entropy (nats) of a probability vector.
pub fn shannon(p: &[f64]) -> f64 {
    p.iter().map(|&x| xlogx_neg(x)).sum()
}

/// Numerically stable `ln Σ exp(x_i)`. Returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| exp(x - m)).sum();
    m + ln(s)
}

/// Running log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += exp(x - self.max);
        } else {
            self.sum = self.sum * exp(self.max - x) + 1.0;
            self.max = x;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + ln(self.sum)
        }
    }
}

/// Table of `ln k!` for `k = 0..=n`.
pub fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += ln(k as f64);
        out.push(acc);
    }
    out
}

/// Key used for exact deduplication: rounds to 12 decimal digits.
#[inline]
pub(crate) fn dedup_key(x: f64) -> i64 {
    round(x * 1e12) as i64
}

/// Saturating `base^exp` in `u128`.
pub fn pow_saturating(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Number of compositions of `n` into `parts` nonnegative parts, saturating.
pub fn compositions_count(n: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(n == 0);
    }
    // C(n + parts - 1, parts - 1)
    let k = parts - 1;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n + k - i) as u128) / (i as u128 + 1);
        if acc == u128::MAX {
            break;
        }
    }
    acc
}

/// Visit every composition of `total` into `parts` nonnegative integers in
/// lexicographic order.
pub(crate) fn for_each_composition(total: usize, parts: usize, mut f: impl FnMut(&[usize])) {
    fn rec(buf: &mut [usize], pos: usize, left: usize, f: &mut dyn FnMut(&[usize])) {
        if pos + 1 == buf.len() {
            buf[pos] = left;
            f(buf);
            return;
        }
        for v in 0..=left {
            buf[pos] = v;
            rec(buf, pos + 1, left - v, f);
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    let mut buf = alloc::vec![0usize; parts];
    rec(&mut buf, 0, total, &mut f);
}

/// Odometer over all maps `[n] -> [q]`, least significant position last.
pub(crate) fn for_each_map(n: usize, q: usize, mut f: impl FnMut(&[usize])) {
    if q == 0 {
        if n == 0 {
            f(&[]);
        }
        return;
    }
    let mut phi = alloc::vec![0usize; n];
    loop {
        f(&phi);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            phi[i] += 1;
            if phi[i] < q {
                break;
            }
            phi[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn compositions_enumerate_all() {
        for total in 0..6 {
            for parts in 1..4 {
                let mut seen: Vec<Vec<usize>> = Vec::new();
                for_each_composition(total, parts, |c| {
                    assert_eq!(c.iter().sum::<usize>(), total);
                    seen.push(c.to_vec());
                });
                assert_eq!(seen.len() as u128, compositions_count(total, parts));
                let mut sorted = seen.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), seen.len());
            }
        }
    }

    #[test]
    fn maps_enumerate_all() {
        let mut count = 0;
        for_each_map(3, 3, |_| count += 1);
        assert_eq!(count, 27);
        let mut count = 0;
        for_each_map(0, 2, |phi| {
            assert!(phi.is_empty());
            count += 1
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let xs = vec![0.1, -2.0, 3.5, 1.0];
        let direct = ln(xs.iter().map(|&x| exp(x)).sum::<f64>());
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-14);
        let mut acc = LogSumExp::new();
        for &x in &xs {
            acc.push(x);
        }
        assert!((acc.value() - direct).abs() < 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
