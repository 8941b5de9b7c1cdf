//! Whole-path sampler built from coalescing blue Brownian paths.
//!
//! Time runs backwards from the axis: the black path `B` (diffusivity 1)
//! and the blue path of level `y` (diffusivity `rho`, started at `y`) are
//! indexed by `x >= 0`. Level `y` is killed at `T_y`, the first grid point
//! where it is at or below `B`, and the process is
//! `C_x = inf{ y : T_y > x }` over the sampled levels.
//!
//! Levels are added one at a time. A new level moves independently until it
//! meets the nearest existing level below or above it and follows that one
//! afterwards, so existing levels never change and `y -> T_y` stays
//! nondecreasing.

use serde::{Deserialize, Serialize};

use super::brownian::CoupledBrownian;
use super::path::StepFunction;
use super::{steps_for, LimitError};

/// Settings for [`sample_limit_path`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPathConfig {
    pub rho: f64,
    pub xmax: f64,
    pub dx: f64,
    pub seed: u64,
    /// Grid on which the Brownian noise is keyed; `dx` must be this divided
    /// by a power of two. Runs that share `base_dx` and `seed` see the same
    /// Brownian paths.
    pub base_dx: f64,
    /// Left end of the window `[x_lo, xmax]` in which jumps are resolved.
    pub x_lo: f64,
    /// Target gap between adjacent levels around a jump, relative to the
    /// upper level.
    pub rel_tol: f64,
    pub max_levels: usize,
}

impl LimitPathConfig {
    pub fn new(rho: f64, xmax: f64, dx: f64, seed: u64) -> Self {
        Self {
            rho,
            xmax,
            dx,
            seed,
            base_dx: dx,
            x_lo: xmax / 100.0,
            rel_tol: 1e-3,
            max_levels: 4096,
        }
    }

    /// Resolve only the value at `x`.
    pub fn marginal(rho: f64, x: f64, dx: f64, seed: u64) -> Self {
        Self {
            x_lo: x,
            ..Self::new(rho, x, dx, seed)
        }
    }

    pub fn with_base_dx(mut self, base_dx: f64) -> Self {
        self.base_dx = base_dx;
        self
    }

    pub fn with_window(mut self, x_lo: f64) -> Self {
        self.x_lo = x_lo;
        self
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_levels(mut self, max_levels: usize) -> Self {
        self.max_levels = max_levels;
        self
    }

    fn validate(&self) -> Result<u32, LimitError> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(LimitError::InvalidRho(self.rho));
        }
        let bad = |msg: String| Err(LimitError::InvalidRequest(msg));
        if !(self.xmax.is_finite() && self.xmax > 0.0) {
            return bad(format!("xmax must be positive, got {}", self.xmax));
        }
        if !(self.dx > 0.0 && self.dx <= self.xmax) {
            return bad(format!("dx must lie in (0, xmax], got {}", self.dx));
        }
        if !(self.x_lo > 0.0 && self.x_lo <= self.xmax) {
            return bad(format!("x_lo must lie in (0, xmax], got {}", self.x_lo));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol));
        }
        if self.max_levels < 2 {
            return bad("max_levels must be at least 2".into());
        }
        CoupledBrownian::depth_for(self.dx, self.base_dx)
    }
}

/// Levels and their killing times, sorted by level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingProfile {
    pub levels: Vec<f64>,
    /// `T_y`; `f64::INFINITY` when the level survives past `xmax`.
    pub times: Vec<f64>,
}

impl HittingProfile {
    pub fn is_monotone(&self) -> bool {
        self.times.windows(2).all(|w| w[0] <= w[1])
    }

    /// Smallest sampled level with `T_y > x`.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let i = self.times.partition_point(|&t| t <= x);
        self.levels.get(i).copied()
    }
}

/// Output of [`sample_limit_path`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPathSample {
    pub config: LimitPathConfig,
    /// `x -> inf{ y sampled : T_y > x }` on `[0, xmax]`.
    pub step: StepFunction,
    pub profile: HittingProfile,
    /// Largest relative level gap left around a jump inside the window.
    pub resolution: f64,
    /// Set when `max_levels` was reached before `rel_tol`.
    pub under_resolved: bool,
}

impl LimitPathSample {
    /// The path, or an error if the refinement budget ran out.
    pub fn require_resolved(self) -> Result<Self, LimitError> {
        if self.under_resolved {
            Err(LimitError::RefinementBudgetExceeded {
                levels: self.profile.levels.len(),
            })
        } else {
            Ok(self)
        }
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.step.value_at(x)
    }
}

struct Level {
    y: f64,
    // Own values at steps 0..own.len(); later steps come from `merged`.
    own: Vec<f64>,
    merged: Option<usize>,
    // Killing step, or `steps + 1` for survivors.
    death: usize,
}

struct Family {
    rho: f64,
    seed: u64,
    base_dx: f64,
    depth: u32,
    steps: usize,
    black: Vec<f64>,
    levels: Vec<Level>,
    // Level ids sorted by y.
    order: Vec<usize>,
}

impl Family {
    fn value(&self, mut id: usize, j: usize) -> f64 {
        loop {
            let l = &self.levels[id];
            if j < l.own.len() {
                return l.own[j];
            }
            id = l.merged.expect("lookup past a level's death");
        }
    }

    /// Alive at step `j` in the sense that its path is still defined there.
    fn defined_at(&self, id: usize, j: usize) -> bool {
        j <= self.levels[id].death.min(self.steps)
    }

    /// Add level `y` between the levels at positions `pos - 1` and `pos` of
    /// `order`.
    fn insert(&mut self, pos: usize, y: f64) {
        let lower = pos.checked_sub(1).map(|p| self.order[p]);
        let upper = self.order.get(pos).copied();
        let noise = CoupledBrownian::new(self.seed, "blue", y.to_bits(), self.rho, self.base_dx, self.depth);
        let mut cursor = noise.cursor();
        cursor.next_value();
        let mut own = vec![y];
        let mut merged = None;
        let mut death = self.steps + 1;
        for j in 1..=self.steps {
            let a = y + cursor.next_value();
            if let Some(lo) = lower {
                if self.defined_at(lo, j) && a <= self.value(lo, j) {
                    merged = Some(lo);
                    death = self.levels[lo].death;
                    break;
                }
            }
            if a <= self.black[j] {
                own.push(a);
                death = j;
                break;
            }
            if let Some(up) = upper {
                if self.defined_at(up, j) && a >= self.value(up, j) {
                    merged = Some(up);
                    death = self.levels[up].death;
                    break;
                }
            }
            own.push(a);
        }
        let id = self.levels.len();
        self.levels.push(Level {
            y,
            own,
            merged,
            death,
        });
        self.order.insert(pos, id);
    }

    fn y_at(&self, pos: usize) -> f64 {
        self.levels[self.order[pos]].y
    }

    fn death_at(&self, pos: usize) -> usize {
        self.levels[self.order[pos]].death
    }
}

/// Sample the limiting process on `[0, xmax]` from the dual construction.
///
/// The level set starts geometric around the typical scale `sqrt(xmax)`, is
/// extended until the lowest level dies before `x_lo` and the highest
/// survives past `xmax`, and is then bisected around every jump in
/// `[x_lo, xmax]` until adjacent levels are within `rel_tol`.
pub fn sample_limit_path(cfg: &LimitPathConfig) -> Result<LimitPathSample, LimitError> {
    let depth = cfg.validate()?;
    let steps = steps_for(cfg.xmax, cfg.dx);
    let lo_steps = (cfg.x_lo / cfg.dx * (1.0 + 1e-9)).floor() as usize;
    let black_noise = CoupledBrownian::new(cfg.seed, "black", 0, 1.0, cfg.base_dx, depth);
    let mut fam = Family {
        rho: cfg.rho,
        seed: cfg.seed,
        base_dx: cfg.base_dx,
        depth,
        steps,
        black: black_noise.values(steps + 1),
        levels: Vec::new(),
        order: Vec::new(),
    };

    let scale = ((1.0 + cfg.rho * cfg.rho) * cfg.xmax).sqrt();
    for k in -6..=2 {
        let n = fam.order.len();
        fam.insert(n, scale * 2f64.powf(k as f64 / 2.0));
    }
    let mut under_resolved = false;
    let budget_left = |fam: &Family| fam.levels.len() < cfg.max_levels;

    while fam.death_at(fam.order.len() - 1) <= steps {
        if !budget_left(&fam) {
            under_resolved = true;
            break;
        }
        let n = fam.order.len();
        let top = fam.y_at(n - 1);
        fam.insert(n, 2.0 * top);
    }
    // A bottom level this close to zero that still outlives `x_lo` means the
    // value there is zero to grid accuracy; halving further never ends when
    // the discrete black path stays below its start.
    let floor = cfg.rel_tol * cfg.dx.sqrt();
    while fam.death_at(0) > lo_steps {
        let bottom = fam.y_at(0);
        if bottom < floor {
            break;
        }
        if !budget_left(&fam) {
            under_resolved = true;
            break;
        }
        fam.insert(0, 0.5 * bottom);
    }

    let unresolved = |fam: &Family, i: usize| {
        let (d0, d1) = (fam.death_at(i), fam.death_at(i + 1));
        let (y0, y1) = (fam.y_at(i), fam.y_at(i + 1));
        d0 < d1 && d0 <= steps && d1 > lo_steps && y1 - y0 > cfg.rel_tol * y1
    };
    loop {
        let pending: Vec<usize> = (0..fam.order.len() - 1)
            .filter(|&i| unresolved(&fam, i))
            .collect();
        if pending.is_empty() {
            break;
        }
        if fam.levels.len() + pending.len() > cfg.max_levels {
            under_resolved = true;
            break;
        }
        // Insert from the top so earlier positions stay valid.
        for &i in pending.iter().rev() {
            let mid = 0.5 * (fam.y_at(i) + fam.y_at(i + 1));
            fam.insert(i + 1, mid);
        }
    }

    let n = fam.order.len();
    let levels: Vec<f64> = (0..n).map(|p| fam.y_at(p)).collect();
    let deaths: Vec<usize> = (0..n).map(|p| fam.death_at(p)).collect();
    let times = deaths
        .iter()
        .map(|&d| if d > steps { f64::INFINITY } else { d as f64 * cfg.dx })
        .collect();

    let mut resolution = 0.0f64;
    for i in 0..n - 1 {
        let (d0, d1) = (deaths[i], deaths[i + 1]);
        if d0 < d1 && d0 <= steps && d1 > lo_steps {
            resolution = resolution.max((levels[i + 1] - levels[i]) / levels[i + 1]);
        }
    }

    let mut jumps = Vec::new();
    let mut i = 0;
    while i < n {
        let d = deaths[i];
        if d > steps {
            break;
        }
        let mut next = i + 1;
        while next < n && deaths[next] == d {
            next += 1;
        }
        match levels.get(next) {
            Some(&y) => jumps.push((d as f64 * cfg.dx, y)),
            None => under_resolved = true,
        }
        i = next;
    }

    Ok(LimitPathSample {
        config: cfg.clone(),
        step: StepFunction {
            start: 0.0,
            end: steps as f64 * cfg.dx,
            initial: levels[0],
            jumps,
        },
        profile: HittingProfile { levels, times },
        resolution,
        under_resolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hitting_times_are_monotone_and_consistent_with_the_step_function() {
        for seed in 0..10 {
            let cfg = LimitPathConfig::new(0.5, 2.0, 1e-3, seed).with_window(0.05);
            let s = sample_limit_path(&cfg).unwrap();
            assert!(!s.under_resolved);
            assert!(s.profile.is_monotone(), "seed {seed}");
            assert!(s.profile.times.iter().all(|&t| t > 0.0));
            assert!(s.resolution <= cfg.rel_tol);
            for x in [0.05, 0.3, 1.0, 1.7, 2.0] {
                assert_eq!(Some(s.value_at(x)), s.profile.value_at(x), "seed {seed} x {x}");
            }
            let inc = s.step.increments();
            assert!(inc.iter().all(|&(_, d)| d > 0.0));
        }
    }

    #[test]
    fn marginal_mode_brackets_the_value() {
        let cfg = LimitPathConfig::marginal(0.5, 1.0, 1e-3, 3);
        let s = sample_limit_path(&cfg).unwrap();
        let v = s.value_at(1.0);
        let i = s.profile.levels.iter().position(|&y| y == v).unwrap();
        assert!(s.profile.times[i] > 1.0);
        assert!(i > 0 && s.profile.times[i - 1] <= 1.0);
        assert!((v - s.profile.levels[i - 1]) / v <= cfg.rel_tol);
    }

    #[test]
    fn refined_grid_sees_the_same_noise() {
        let coarse = LimitPathConfig::new(0.5, 1.0, 2e-3, 1).with_window(0.1);
        let fine = coarse.clone().with_base_dx(2e-3);
        let fine = LimitPathConfig { dx: 1e-3, ..fine };
        let a = sample_limit_path(&coarse).unwrap();
        let b = sample_limit_path(&fine).unwrap();
        // Same Brownian motions; values differ only by grid effects.
        let va = a.value_at(1.0);
        let vb = b.value_at(1.0);
        assert!((va - vb).abs() < 0.2 * va.max(vb), "{va} vs {vb}");
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let cfg = LimitPathConfig::new(0.5, 1.0, 1e-3, 2)
            .with_window(0.01)
            .with_max_levels(12);
        let s = sample_limit_path(&cfg).unwrap();
        assert!(s.under_resolved);
        assert!(matches!(
            s.require_resolved(),
            Err(LimitError::RefinementBudgetExceeded { .. })
        ));
    }

    #[test]
    fn black_path_below_zero_gives_a_zero_value() {
        // The discrete black path of this seed never returns above its first
        // step, so every small level outlives x = 1.
        let cfg = LimitPathConfig::marginal(0.5, 1.0, 2.5e-4, 1_375_479_894_600_477_254);
        let s = sample_limit_path(&cfg).unwrap();
        assert!(!s.under_resolved);
        assert!(s.profile.levels.len() < 100);
        assert!(s.value_at(1.0) < cfg.rel_tol * cfg.dx.sqrt());
    }

    #[test]
    fn rho_zero_is_rejected() {
        let cfg = LimitPathConfig::new(0.0, 1.0, 1e-3, 0);
        assert_eq!(sample_limit_path(&cfg), Err(LimitError::InvalidRho(0.0)));
    }
}
