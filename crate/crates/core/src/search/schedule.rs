use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::Dims;

/// One stage of a run: moves only touch terms supported inside the leading
/// `constraint` sub-blocks, for `budget` iterations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub constraint: Dims,
    pub budget: u64,
}

/// A single unconstrained stage.
pub fn unconstrained(dims: Dims, budget: u64) -> Vec<Stage> {
    vec![Stage {
        constraint: dims,
        budget,
    }]
}

/// The sequence of boxes grown from `(2,2,2)` to `dims`: after each stage the
/// smallest coordinate still below its target grows by one, ties going to
/// `n`, then `m`, then `p`. That gives `n + m + p - 5` stages.
pub fn constraint_sequence(dims: Dims) -> Vec<Dims> {
    let target = [dims.n, dims.m, dims.p];
    let mut cur = [2usize; 3];
    let mut out = vec![Dims {
        n: 2,
        m: 2,
        p: 2,
    }];
    while cur != target {
        let axis = (0..3)
            .filter(|&a| cur[a] < target[a])
            .min_by_key(|&a| (cur[a], a))
            .unwrap();
        cur[axis] += 1;
        out.push(Dims {
            n: cur[0],
            m: cur[1],
            p: cur[2],
        });
    }
    out
}

/// Splits `total` across `stages` so that the cumulative split points
/// `round(total^(k/stages))` are evenly spaced on a log scale.
pub fn log_spaced_budgets(total: u64, stages: usize) -> Vec<u64> {
    if stages == 0 {
        return Vec::new();
    }
    let mut prev = 0u64;
    (1..=stages)
        .map(|k| {
            let cum = if k == stages || total == 0 {
                total
            } else {
                ((total as f64).powf(k as f64 / stages as f64).round() as u64).min(total)
            };
            let b = cum.saturating_sub(prev);
            prev = prev.max(cum);
            b
        })
        .collect()
}

/// Edge-constraint schedule for `dims` with `total` iterations.
pub fn default_schedule(n: usize, m: usize, p: usize, total: u64) -> Result<Vec<Stage>> {
    let dims = Dims::new(n, m, p)?;
    let boxes = constraint_sequence(dims);
    let budgets = log_spaced_budgets(total, boxes.len());
    Ok(boxes
        .into_iter()
        .zip(budgets)
        .map(|(constraint, budget)| Stage { constraint, budget })
        .collect())
}

pub(crate) fn validate(dims: Dims, schedule: &[Stage]) -> Result<()> {
    let last = schedule
        .last()
        .ok_or_else(|| Error::Params("schedule is empty".into()))?;
    if last.constraint != dims {
        return Err(Error::Params(format!(
            "last stage must be unconstrained ({dims}), found {}",
            last.constraint
        )));
    }
    if let Some(bad) = schedule.iter().find(|s| !dims.contains(&s.constraint)) {
        return Err(Error::Params(format!(
            "stage box {} exceeds {dims}",
            bad.constraint
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxes(n: usize, m: usize, p: usize) -> Vec<(usize, usize, usize)> {
        default_schedule(n, m, p, 1000)
            .unwrap()
            .iter()
            .map(|s| (s.constraint.n, s.constraint.m, s.constraint.p))
            .collect()
    }

    #[test]
    fn cube_555() {
        assert_eq!(
            boxes(5, 5, 5),
            vec![
                (2, 2, 2),
                (3, 2, 2),
                (3, 3, 2),
                (3, 3, 3),
                (4, 3, 3),
                (4, 4, 3),
                (4, 4, 4),
                (5, 4, 4),
                (5, 5, 4),
                (5, 5, 5)
            ]
        );
    }

    #[test]
    fn small_cases() {
        assert_eq!(boxes(2, 2, 2), vec![(2, 2, 2)]);
        let b = boxes(3, 3, 3);
        assert_eq!(b.len(), 4);
        assert_eq!(*b.last().unwrap(), (3, 3, 3));
        assert_eq!(boxes(2, 3, 4), vec![(2, 2, 2), (2, 3, 2), (2, 3, 3), (2, 3, 4)]);
        for (n, m, p) in [(2, 4, 5), (4, 5, 5), (3, 3, 5)] {
            assert_eq!(boxes(n, m, p).len(), n + m + p - 5);
        }
        assert!(default_schedule(1, 2, 2, 10).is_err());
    }

    #[test]
    fn budgets_are_log_spaced_and_sum_to_total() {
        let b = log_spaced_budgets(10_000, 4);
        assert_eq!(b, vec![10, 90, 900, 9000]);
        for (total, k) in [(0, 3), (1, 5), (123_456, 10), (1_000_000, 1)] {
            assert_eq!(log_spaced_budgets(total, k).iter().sum::<u64>(), total);
        }
        assert_eq!(log_spaced_budgets(77, 1), vec![77]);
    }

    #[test]
    fn validation() {
        let d = Dims::new(3, 3, 3).unwrap();
        assert!(validate(d, &[]).is_err());
        assert!(validate(d, &unconstrained(Dims::new(2, 2, 2).unwrap(), 5)).is_err());
        assert!(validate(d, &unconstrained(d, 5)).is_ok());
    }
}
