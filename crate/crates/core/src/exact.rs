//! Error-free floating point summation.
//!
//! Tree costs are sums of thousands of terms and two scorers must agree on
//! them bit for bit, so every sum is accumulated exactly (as a list of
//! non-overlapping partials) and rounded once at the end. The result is the
//! correctly rounded value of the real sum, independent of term order.

use alloc::vec::Vec;
use core::cmp::Ordering;

/// Running exact sum of `f64` terms.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                core::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    /// Adds the exact product `a * b`.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_product(a, b);
        self.add(p);
        if e != 0.0 {
            self.add(e);
        }
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    /// Correctly rounded value of the accumulated sum.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // half-way case: the remaining partials decide the rounding direction
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Correctly rounded sum of a slice.
pub fn exact_sum(values: &[f64]) -> f64 {
    let mut acc = ExactSum::new();
    acc.extend(values.iter().copied());
    acc.value()
}

/// `a + b = s + e` exactly, with `s = fl(a + b)`.
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

fn split(a: f64) -> (f64, f64) {
    const FACTOR: f64 = 134_217_729.0; // 2^27 + 1
    let c = FACTOR * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// `a * b = p + e` exactly, with `p = fl(a * b)` (Dekker).
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

/// Exact comparison of `a + b` against `c + d`.
pub fn cmp_pair_sums(a: f64, b: f64, c: f64, d: f64) -> Ordering {
    let (s1, e1) = two_sum(a, b);
    let (s2, e2) = two_sum(c, d);
    match s1.partial_cmp(&s2).unwrap_or(Ordering::Equal) {
        Ordering::Equal => e1.partial_cmp(&e2).unwrap_or(Ordering::Equal),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_is_exact() {
        assert_eq!(exact_sum(&[1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum(&[0.1; 10]), 1.0);
        assert_eq!(exact_sum(&[]), 0.0);
    }

    #[test]
    fn order_independent() {
        let xs = [0.1, 0.7, 1e-17, 3.3, -2.2, 1e16, -1e16, 0.3];
        let mut ys = xs;
        ys.reverse();
        assert_eq!(exact_sum(&xs).to_bits(), exact_sum(&ys).to_bits());
    }

    #[test]
    fn products() {
        let mut acc = ExactSum::new();
        acc.add_product(0.1, 3.0);
        acc.add(-0.30000000000000004);
        // 0.1 * 3 is not exactly representable; the residual survives
        assert!(acc.value() != 0.0);
        let (p, e) = two_product(0.1, 3.0);
        assert_eq!(p + e, p);
        assert!(e != 0.0);
    }

    #[test]
    fn pair_sum_comparison() {
        assert_eq!(cmp_pair_sums(0.1, 0.2, 0.3, 0.0), Ordering::Greater);
        assert_eq!(cmp_pair_sums(1.0, 2.0, 2.0, 1.0), Ordering::Equal);
        assert_eq!(cmp_pair_sums(1.0, 1e-30, 1.0, 0.0), Ordering::Greater);
    }
}
