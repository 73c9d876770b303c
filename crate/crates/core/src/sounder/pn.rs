//! Maximal-length PN sequence generation.

use crate::error::{ChanError, Result};

/// Known-primitive feedback tap sets per register order, used when a caller
/// does not supply taps. Every entry is verified by the full-period check in
/// [`PnSequence::generate`].
const DEFAULT_TAPS: &[(u32, &[u32])] = &[
    (2, &[2, 1]),
    (3, &[3, 2]),
    (4, &[4, 3]),
    (5, &[5, 3]),
    (6, &[6, 5]),
    (7, &[7, 6]),
    (8, &[8, 6, 5, 4]),
    (9, &[9, 5]),
    (10, &[10, 7]),
    (11, &[11, 9]),
    (12, &[12, 11, 10, 4]),
    (13, &[13, 12, 11, 8]),
    (14, &[14, 13, 12, 2]),
    (15, &[15, 14]),
    (16, &[16, 15, 13, 4]),
];

const MIN_ORDER: u32 = 2;
const MAX_ORDER: u32 = 24;

/// A bipolar maximal-length sequence of 2^m - 1 chips at a given chip rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PnSequence {
    chips: Vec<i8>,
    order: u32,
    chip_rate_mcps: f64,
}

impl PnSequence {
    /// Generate an m-sequence from a Fibonacci LFSR of the given order.
    ///
    /// `taps` lists the exponents of the feedback polynomial (the register
    /// order must be among them). The taps are validated by running the
    /// register through a full cycle: anything short of period 2^m - 1 is
    /// rejected as non-primitive.
    pub fn generate(order: u32, taps: &[u32], chip_rate_mcps: f64) -> Result<Self> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
            return Err(ChanError::InvalidTaps(format!(
                "register order {order} out of range [{MIN_ORDER}, {MAX_ORDER}]"
            )));
        }
        if !(chip_rate_mcps > 0.0) {
            return Err(ChanError::InvalidTaps(format!(
                "chip rate {chip_rate_mcps} Mcps must be positive"
            )));
        }
        if taps.is_empty() || taps.iter().any(|&t| t == 0 || t > order) {
            return Err(ChanError::InvalidTaps(format!(
                "taps must be in 1..={order}"
            )));
        }
        if !taps.contains(&order) {
            return Err(ChanError::InvalidTaps(format!(
                "taps must include the register order {order}"
            )));
        }
        let mut sorted = taps.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != taps.len() {
            return Err(ChanError::InvalidTaps("duplicate taps".into()));
        }

        let expected = (1u64 << order) - 1;
        let initial: u32 = 1;
        let mut state = initial;
        let mut chips = Vec::with_capacity(expected as usize);
        let mut period: u64 = 0;
        loop {
            chips.push(if state & 1 == 1 { 1 } else { -1 });
            // right-shift Fibonacci form: taps reflect to shifts of (m - t)
            let mut feedback = 0u32;
            for &t in &sorted {
                feedback ^= (state >> (order - t)) & 1;
            }
            state = (state >> 1) | (feedback << (order - 1));
            period += 1;
            if state == initial || period > expected {
                break;
            }
        }
        if period != expected {
            return Err(ChanError::NonPrimitiveTaps {
                order,
                period,
                expected,
            });
        }
        Ok(Self {
            chips,
            order,
            chip_rate_mcps,
        })
    }

    /// Generate with the default primitive taps for `order`.
    pub fn max_length(order: u32, chip_rate_mcps: f64) -> Result<Self> {
        let taps = DEFAULT_TAPS
            .iter()
            .find(|(m, _)| *m == order)
            .map(|(_, t)| *t)
            .ok_or_else(|| ChanError::InvalidTaps(format!("no default taps for order {order}")))?;
        Self::generate(order, taps, chip_rate_mcps)
    }

    pub fn chips(&self) -> &[i8] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn chip_rate_mcps(&self) -> f64 {
        self.chip_rate_mcps
    }

    /// Chip duration in ns (2 ns at 500 Mcps).
    pub fn chip_period_ns(&self) -> f64 {
        1e3 / self.chip_rate_mcps
    }

    /// Sum of chips; an m-sequence is balanced within one.
    pub fn balance(&self) -> i64 {
        self.chips.iter().map(|&c| c as i64).sum()
    }

    /// Periodic autocorrelation at an integer chip lag: the sequence length
    /// at zero lag and -1 everywhere else.
    pub fn periodic_autocorrelation(&self, lag: usize) -> i64 {
        let n = self.len();
        let lag = lag % n;
        let mut acc: i64 = 0;
        for i in 0..n {
            let j = (i + lag) % n;
            acc += (self.chips[i] * self.chips[j]) as i64;
        }
        acc
    }

    /// Sample-and-hold upsampling by an integer factor.
    pub fn upsampled(&self, factor: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() * factor);
        for &c in &self.chips {
            for _ in 0..factor {
                out.push(c as f64);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_m3_sequence() {
        let pn = PnSequence::generate(3, &[3, 2], 500.0).unwrap();
        assert_eq!(pn.len(), 7);
        assert_eq!(pn.periodic_autocorrelation(0), 7);
        for lag in 1..7 {
            assert_eq!(pn.periodic_autocorrelation(lag), -1, "lag {lag}");
        }
    }

    #[test]
    fn default_m11_is_balanced() {
        let pn = PnSequence::max_length(11, 500.0).unwrap();
        assert_eq!(pn.len(), 2047);
        assert_eq!(pn.balance().abs(), 1);
        assert!((pn.chip_period_ns() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_primitive_taps_are_rejected() {
        // x^4 + x^2 + 1 factors; the register cycles short of 15
        let err = PnSequence::generate(4, &[4, 2], 500.0).unwrap_err();
        match err {
            ChanError::NonPrimitiveTaps {
                period, expected, ..
            } => {
                assert!(period < expected);
            }
            other => panic!("expected NonPrimitiveTaps, got {other:?}"),
        }
    }

    #[test]
    fn invalid_taps_are_rejected() {
        assert!(PnSequence::generate(4, &[], 500.0).is_err());
        assert!(PnSequence::generate(4, &[5], 500.0).is_err());
        assert!(PnSequence::generate(4, &[3, 2], 500.0).is_err());
        assert!(PnSequence::generate(1, &[1], 500.0).is_err());
        assert!(PnSequence::generate(4, &[4, 3], 0.0).is_err());
    }

    #[test]
    fn autocorrelation_two_valued_up_to_m13() {
        for order in 2..=13u32 {
            let pn = PnSequence::max_length(order, 500.0).unwrap();
            let n = pn.len() as i64;
            assert_eq!(pn.balance().abs(), 1, "order {order} balance");
            assert_eq!(pn.periodic_autocorrelation(0), n);
            for lag in 1..pn.len() {
                assert_eq!(
                    pn.periodic_autocorrelation(lag),
                    -1,
                    "order {order} lag {lag}"
                );
            }
        }
    }

    #[test]
    fn upsampled_holds_chips() {
        let pn = PnSequence::generate(3, &[3, 2], 500.0).unwrap();
        let up = pn.upsampled(2);
        assert_eq!(up.len(), 14);
        for (i, &s) in up.iter().enumerate() {
            assert_eq!(s, pn.chips()[i / 2] as f64);
        }
    }
}
