use serde::{Deserialize, Serialize};

use super::LimitError;

/// Values on the uniform grid `x0, x0 + dx, ...`, linearly interpolated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledPath {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl SampledPath {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Self {
        assert!(dx > 0.0, "grid step must be positive");
        Self { x0, dx, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn end(&self) -> f64 {
        self.x(self.len().saturating_sub(1))
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.values.len();
        assert!(n > 0, "empty path");
        let t = (x - self.x0) / self.dx;
        if t <= 0.0 {
            return self.values[0];
        }
        let i = t.floor() as usize;
        if i + 1 >= n {
            return self.values[n - 1];
        }
        let w = t - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

/// A right-continuous nondecreasing step function on `[start, end]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub start: f64,
    pub end: f64,
    pub initial: f64,
    /// `(x, value from x on)`, sorted by `x`.
    pub jumps: Vec<(f64, f64)>,
}

impl StepFunction {
    pub fn value_at(&self, x: f64) -> f64 {
        let idx = self.jumps.partition_point(|&(t, _)| t <= x);
        if idx == 0 {
            self.initial
        } else {
            self.jumps[idx - 1].1
        }
    }

    /// Jumps with location in `(a, b]`.
    pub fn jumps_in(&self, a: f64, b: f64) -> &[(f64, f64)] {
        let lo = self.jumps.partition_point(|&(t, _)| t <= a);
        let hi = self.jumps.partition_point(|&(t, _)| t <= b);
        &self.jumps[lo..hi]
    }

    /// Number of distinct values taken on `[a, b]`.
    pub fn distinct_values_on(&self, a: f64, b: f64) -> usize {
        1 + self.jumps_in(a, b).len()
    }

    /// `(x, size)` for every jump.
    pub fn increments(&self) -> Vec<(f64, f64)> {
        let mut prev = self.initial;
        self.jumps
            .iter()
            .map(|&(x, v)| {
                let d = v - prev;
                prev = v;
                (x, d)
            })
            .collect()
    }
}

/// `path(x) - min(path on [start, x])`.
pub fn reflect(path: &SampledPath) -> Result<SampledPath, LimitError> {
    if path.is_empty() {
        return Err(LimitError::EmptyPath);
    }
    let mut min = f64::INFINITY;
    let values = path
        .values
        .iter()
        .map(|&v| {
            min = min.min(v);
            v - min
        })
        .collect();
    Ok(SampledPath::new(path.x0, path.dx, values))
}

/// Output of [`coalesce`].
#[derive(Clone, Debug, PartialEq)]
pub struct Coalesced {
    pub paths: Vec<SampledPath>,
    /// Meeting point of path `i` with the already coalesced path `i + 1`;
    /// `None` if they never meet on the grid. The last entry is always `None`.
    pub taus: Vec<Option<f64>>,
}

/// Coalesce reflected paths ending at a common point.
///
/// Path `i` starts at `-x_i` with `x_0 <= x_1 <= ...`, so starts are
/// nonincreasing in `i`. Working down from the last path, path `i` keeps its
/// own values until the first grid point where it reaches the coalesced path
/// `i + 1`, and follows that path afterwards.
pub fn coalesce(paths: &[SampledPath]) -> Result<Coalesced, LimitError> {
    coalesce_by(paths, |_, gap| gap <= 0.0)
}

/// [`coalesce`] with a caller-supplied meeting rule. `meets(previous_gap,
/// gap)` sees the gap `upper - lower` at the previous and the current grid
/// point (`previous_gap` is `None` at the start of the lower path).
pub(crate) fn coalesce_by<F>(paths: &[SampledPath], mut meets: F) -> Result<Coalesced, LimitError>
where
    F: FnMut(Option<f64>, f64) -> bool,
{
    let Some(last) = paths.last() else {
        return Ok(Coalesced {
            paths: Vec::new(),
            taus: Vec::new(),
        });
    };
    let dx = last.dx;
    let end = last.end();
    for (i, p) in paths.iter().enumerate() {
        if p.is_empty() {
            return Err(LimitError::EmptyPath);
        }
        if (p.dx - dx).abs() > 1e-12 * dx || (p.end() - end).abs() > 1e-6 * dx {
            return Err(LimitError::GridMismatch);
        }
        if i > 0 && p.len() < paths[i - 1].len() {
            return Err(LimitError::UnorderedStarts {
                index: i,
                previous: i - 1,
            });
        }
    }
    let k = paths.len();
    let mut out: Vec<SampledPath> = paths.to_vec();
    let mut taus = vec![None; k];
    for i in (0..k - 1).rev() {
        let (head, tail) = out.split_at_mut(i + 1);
        let own = &mut head[i];
        let next = &tail[0];
        // Grid offset of path i inside path i + 1.
        let shift = next.len() - own.len();
        let mut met = None;
        let mut previous_gap = None;
        for j in 0..own.len() {
            if met.is_none() {
                let gap = next.values[j + shift] - own.values[j];
                if meets(previous_gap, gap) {
                    met = Some(j);
                }
                previous_gap = Some(gap);
            }
            if met.is_some() {
                own.values[j] = next.values[j + shift];
            }
        }
        taus[i] = met.map(|j| own.x(j));
    }
    Ok(Coalesced { paths: out, taus })
}
