//! Floating-point helpers shared by the evaluators: compensated summation and
//! argument reduction for large trigonometric arguments.

use std::f64::consts::PI;

const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Neumaier-compensated running sum.
///
/// The order of `add` calls fully determines the result, so two accumulators
/// fed the same sequence agree bit-for-bit.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both compensation terms.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Returns `action * k` reduced into `[-π, π]`.
///
/// The product is split into its rounded value and exact rounding error with
/// an FMA, and 2π is subtracted in two pieces, so the result stays accurate to
/// a few ulps of π even when `action * k` is ~1e7.
pub fn reduced_angle(action: f64, k: f64) -> f64 {
    let p = action * k;
    let err = action.mul_add(k, -p);
    let turns = (p / TWO_PI_HI).round();
    if turns == 0.0 {
        return p + err;
    }
    let r = (-turns).mul_add(TWO_PI_HI, p);
    (-turns).mul_add(TWO_PI_LO, r) + err
}

/// Returns `count * weight` reduced modulo 2 into `[-1, 1]`.
///
/// `count` must be an integer-valued float below 2^53. Used for phases kept in
/// units of π, where a reduction modulo 2 is exact.
pub fn half_turns_mod2(count: f64, weight: f64) -> f64 {
    let p = count * weight;
    let err = count.mul_add(weight, -p);
    let r = p - 2.0 * (p * 0.5).round();
    r + err
}

/// `sin(π x)` for `x` already reduced to a small range.
#[inline]
pub fn sin_pi(x: f64) -> f64 {
    let x = x - 2.0 * (x * 0.5).round();
    // exact zeros at integers keep vanishing terms identically zero
    if x == 0.0 || x.abs() == 1.0 {
        return 0.0;
    }
    (PI * x).sin()
}
