//! Compensated floating-point accumulation shared across the numeric modules.

/// Streaming Neumaier-compensated sum. The compensation term absorbs the
/// rounding error of each addition, which keeps million-term probability
/// sums and large least-squares accumulations accurate to ~1 ulp.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub(crate) const fn new() -> Self {
        Accumulator { sum: 0.0, comp: 0.0 }
    }

    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = Accumulator::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_that_naive_summation_loses() {
        // 1 + 2^-60 repeated: naive accumulation drops every tiny term.
        let mut acc = Accumulator::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(2f64.powi(-60));
        }
        acc.add(-1.0);
        let exact = 1000.0 * 2f64.powi(-60);
        assert!((acc.total() - exact).abs() < 1e-25);
    }

    #[test]
    fn matches_plain_sum_on_benign_input() {
        let values = [0.1, 0.2, 0.3, 0.4];
        assert!((compensated_sum(&values) - 1.0).abs() < 1e-15);
    }
}
