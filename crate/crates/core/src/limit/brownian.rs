use crate::rng::{mix, CounterRng};

use super::LimitError;

/// A keyed Brownian path on the grid `base_dx / 2^depth`.
///
/// Values at base grid points come from keyed Gaussian increments; finer
/// points are filled in by Brownian-bridge midpoint refinement with keyed
/// noise. The path at depth `d + 1` therefore agrees with the path at depth
/// `d` on every other grid point, so runs at `dx` and `dx / 2` see the same
/// Brownian motion.
#[derive(Clone, Copy, Debug)]
pub struct CoupledBrownian {
    rng: CounterRng,
    sigma: f64,
    base_dx: f64,
    depth: u32,
}

impl CoupledBrownian {
    /// Path number `stream` of the family `label` under `seed`.
    pub fn new(seed: u64, label: &str, stream: u64, sigma: f64, base_dx: f64, depth: u32) -> Self {
        assert!(depth < 24, "refinement depth {depth} too large");
        Self {
            rng: CounterRng::new(mix(&[seed, stream]), label),
            sigma,
            base_dx,
            depth,
        }
    }

    /// Depth `d` with `dx = base_dx / 2^d`.
    pub fn depth_for(dx: f64, base_dx: f64) -> Result<u32, LimitError> {
        let ratio = base_dx / dx;
        let d = ratio.log2().round();
        if d < 0.0 || d > 23.0 || ((d.exp2() - ratio) / ratio).abs() > 1e-9 {
            return Err(LimitError::InvalidRequest(format!(
                "dx = {dx} is not base_dx = {base_dx} divided by a power of two"
            )));
        }
        Ok(d as u32)
    }

    pub fn dx(&self) -> f64 {
        self.base_dx / (1u64 << self.depth) as f64
    }

    /// Cursor yielding `W(0) = 0, W(dx), W(2 dx), ...`.
    pub fn cursor(&self) -> BrownianCursor {
        let n = 1usize << self.depth;
        BrownianCursor {
            path: *self,
            block: 0,
            vals: vec![0.0; n + 1],
            pos: n,
            started: false,
        }
    }

    /// The first `n` grid values.
    pub fn values(&self, n: usize) -> Vec<f64> {
        let mut c = self.cursor();
        (0..n).map(|_| c.next_value()).collect()
    }

    fn fill_block(&self, block: u64, start: f64, vals: &mut [f64]) {
        let n = vals.len() - 1;
        vals[0] = start;
        vals[n] = start + self.sigma * self.base_dx.sqrt() * self.rng.normal3(0, block, 0);
        let mut h = self.base_dx;
        let mut step = n;
        for level in 1..=self.depth as u64 {
            let half = step / 2;
            let sd = self.sigma * (h / 4.0).sqrt();
            let mut idx = half;
            let mut m = 1u64;
            while idx < n {
                let mid = 0.5 * (vals[idx - half] + vals[idx + half]);
                vals[idx] = mid + sd * self.rng.normal3(level, block, m);
                idx += step;
                m += 2;
            }
            step = half;
            h *= 0.5;
        }
    }
}

/// Sequential reader over a [`CoupledBrownian`].
#[derive(Clone, Debug)]
pub struct BrownianCursor {
    path: CoupledBrownian,
    block: u64,
    vals: Vec<f64>,
    pos: usize,
    started: bool,
}

impl BrownianCursor {
    #[inline]
    pub fn next_value(&mut self) -> f64 {
        if !self.started {
            self.started = true;
            return 0.0;
        }
        let n = self.vals.len() - 1;
        if self.pos == n {
            let start = self.vals[n];
            let mut vals = std::mem::take(&mut self.vals);
            self.path.fill_block(self.block, start, &mut vals);
            self.vals = vals;
            self.block += 1;
            self.pos = 0;
        }
        self.pos += 1;
        self.vals[self.pos]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refined_path_contains_the_coarse_one() {
        let coarse = CoupledBrownian::new(3, "t", 9, 0.7, 1e-2, 0).values(101);
        let fine = CoupledBrownian::new(3, "t", 9, 0.7, 1e-2, 2).values(401);
        for (i, c) in coarse.iter().enumerate() {
            assert!((fine[4 * i] - c).abs() < 1e-12, "index {i}");
        }
        assert_eq!(coarse[0], 0.0);
    }

    #[test]
    fn increments_have_the_right_variance() {
        let sigma = 0.5;
        for depth in [0, 1, 3] {
            let b = CoupledBrownian::new(1, "t", 0, sigma, 0.01, depth);
            let dx = b.dx();
            let v = b.values(200_001);
            let n = (v.len() - 1) as f64;
            let var: f64 = v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / n;
            let expected = sigma * sigma * dx;
            assert!((var / expected - 1.0).abs() < 0.02, "depth {depth}: {var} vs {expected}");
        }
    }

    #[test]
    fn depth_detection() {
        assert_eq!(CoupledBrownian::depth_for(1e-4, 1e-4).unwrap(), 0);
        assert_eq!(CoupledBrownian::depth_for(5e-5, 1e-4).unwrap(), 1);
        assert!(CoupledBrownian::depth_for(3e-5, 1e-4).is_err());
        assert!(CoupledBrownian::depth_for(2e-4, 1e-4).is_err());
    }
}
