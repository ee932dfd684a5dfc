//! Deterministic pairwise (tree) summation.
//!
//! Terms are combined as the leaves of a balanced binary tree in the order
//! they are pushed, so the result depends only on the sequence of terms.
//! Memory is logarithmic in the number of terms.

#[derive(Debug, Clone, Default)]
pub struct PairwiseSum {
    // (height, partial sum); heights strictly decrease from bottom to top
    stack: Vec<(u32, f64)>,
}

impl PairwiseSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        let mut node = (0u32, value);
        while let Some(&(height, partial)) = self.stack.last() {
            if height != node.0 {
                break;
            }
            self.stack.pop();
            node = (height + 1, partial + node.1);
        }
        self.stack.push(node);
    }

    pub fn total(&self) -> f64 {
        self.stack
            .iter()
            .rev()
            .fold(None, |acc: Option<f64>, &(_, partial)| {
                Some(match acc {
                    Some(upper) => partial + upper,
                    None => partial,
                })
            })
            .unwrap_or(0.0)
    }
}

impl Extend<f64> for PairwiseSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for value in iter {
            self.push(value);
        }
    }
}

pub fn pairwise_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = PairwiseSum::new();
    acc.extend(values);
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recursive(values: &[f64]) -> f64 {
        // reference: split at the largest power of two below len
        match values.len() {
            0 => 0.0,
            1 => values[0],
            len => {
                let mut half = 1;
                while half * 2 < len {
                    half *= 2;
                }
                recursive(&values[..half]) + recursive(&values[half..])
            }
        }
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(pairwise_sum(std::iter::empty()), 0.0);
    }

    #[test]
    fn matches_recursive_tree() {
        for len in 0..70 {
            let values: Vec<f64> = (0..len).map(|i| 1.0 / (i as f64 + 3.0)).collect();
            assert_eq!(
                pairwise_sum(values.iter().copied()).to_bits(),
                recursive(&values).to_bits(),
                "len {len}"
            );
        }
    }

    #[test]
    fn beats_naive_on_many_small_terms() {
        let n = 1 << 20;
        let tree = pairwise_sum(std::iter::repeat_n(0.1, n));
        let naive: f64 = std::iter::repeat_n(0.1, n).sum();
        let exact = 0.1 * n as f64;
        assert!((tree - exact).abs() <= (naive - exact).abs());
        assert!((tree - exact).abs() < 1e-9);
    }
}
