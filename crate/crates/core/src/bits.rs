//! Eventually periodic bit sequences in minimal form.

use crate::automaton::primitive_root;
use num_integer::lcm;
use std::fmt;

/// An infinite bit sequence `pre (period)^inf`, kept minimal: the period is
/// primitive and no tail of the preperiod could be absorbed into a rotation
/// of the period. Minimality makes equality of sequences plain `==`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EventuallyPeriodicBits {
    pre: Vec<bool>,
    period: Vec<bool>,
}

impl EventuallyPeriodicBits {
    pub fn new(pre: Vec<bool>, period: Vec<bool>) -> EventuallyPeriodicBits {
        assert!(!period.is_empty(), "period must be nonempty");
        let mut period = primitive_root(&period).to_vec();
        let mut pre = pre;
        while let Some(&last) = pre.last() {
            if last != *period.last().unwrap() {
                break;
            }
            pre.pop();
            let tail = period.pop().unwrap();
            period.insert(0, tail);
        }
        EventuallyPeriodicBits { pre, period }
    }

    pub fn constant(bit: bool) -> EventuallyPeriodicBits {
        EventuallyPeriodicBits { pre: Vec::new(), period: vec![bit] }
    }

    pub fn zero() -> EventuallyPeriodicBits {
        EventuallyPeriodicBits::constant(false)
    }

    pub fn bit(&self, i: usize) -> bool {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn preperiod(&self) -> &[bool] {
        &self.pre
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn xor(&self, other: &EventuallyPeriodicBits) -> EventuallyPeriodicBits {
        let pre_len = self.pre.len().max(other.pre.len());
        let per_len = lcm(self.period.len(), other.period.len());
        let pre = (0..pre_len).map(|i| self.bit(i) ^ other.bit(i)).collect();
        let period =
            (pre_len..pre_len + per_len).map(|i| self.bit(i) ^ other.bit(i)).collect();
        EventuallyPeriodicBits::new(pre, period)
    }

    pub fn is_all_ones(&self) -> bool {
        self.pre.is_empty() && self.period == [true]
    }

    pub fn is_all_zeros(&self) -> bool {
        self.pre.is_empty() && self.period == [false]
    }
}

impl fmt::Display for EventuallyPeriodicBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.pre {
            write!(f, "{}", b as u8)?;
        }
        write!(f, "(")?;
        for &b in &self.period {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")^inf")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_minimizes() {
        let a = EventuallyPeriodicBits::new(vec![true], vec![false, true, false, true]);
        assert_eq!(a, EventuallyPeriodicBits::new(vec![], vec![true, false]));
        assert_eq!(a.to_string(), "(10)^inf");

        let b = EventuallyPeriodicBits::new(vec![true, false], vec![false]);
        assert_eq!(b.to_string(), "1(0)^inf");
        assert_eq!(b.preperiod(), &[true]);

        let c = EventuallyPeriodicBits::new(vec![true, true, true], vec![true]);
        assert!(c.is_all_ones());
    }

    #[test]
    fn indexing_walks_pre_then_period() {
        let a = EventuallyPeriodicBits::new(vec![true, true], vec![false, true]);
        let expected = [true, true, false, true, false, true, false];
        for (i, &b) in expected.iter().enumerate() {
            assert_eq!(a.bit(i), b);
        }
    }

    #[test]
    fn xor_aligns_preperiods_and_periods() {
        let a = EventuallyPeriodicBits::new(vec![true], vec![false]);
        let b = EventuallyPeriodicBits::new(vec![false], vec![true]);
        assert!(a.xor(&b).is_all_ones());
        let c = EventuallyPeriodicBits::new(vec![], vec![true, false]);
        let d = EventuallyPeriodicBits::new(vec![], vec![false, true]);
        assert!(c.xor(&d).is_all_ones());
        assert!(c.xor(&c).is_all_zeros());
        let e = EventuallyPeriodicBits::new(vec![], vec![true, false, false]);
        let f = c.xor(&e);
        for i in 0..12 {
            assert_eq!(f.bit(i), c.bit(i) ^ e.bit(i));
        }
    }
}
