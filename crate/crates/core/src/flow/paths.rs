//! Black, red and blue lattice paths of the graphical construction.
//!
//! Columns are sites `x <= 0` plus the terminal column `1`, which stands for
//! the vertical axis just right of the origin. The black path is
//! `B(x) = eta(x) + ... + eta(0)` with `B(1) = 0`. A red arrow sits on every
//! lattice point `(x, h)` with `h >= B(x)`; it points down with probability
//! `zeta`. A red path started at `(x0, B(x0))` moves one column right per
//! step, following the arrow under it and reflecting on the black path:
//!
//! ```text
//! R(x + 1) = max(R(x) - down(x, R(x)), B(x + 1))
//! ```
//!
//! Its height at column 1 is distributed as the flow `C_{-x0}`.

use serde::{Deserialize, Serialize};

use crate::model::EtaSampler;
use crate::rng::{site_word, CounterRng};

/// Source of red-arrow directions.
pub trait ArrowSource {
    /// Whether the arrow at `(column, height)` points down.
    ///
    /// Only queried at `height > B(column + 1)`, where the direction can
    /// matter.
    fn points_down(&mut self, column: i64, height: u64) -> bool;
}

/// i.i.d. arrows keyed by `(seed, column, height)`; nothing is stored.
#[derive(Clone, Copy, Debug)]
pub struct ArrowField {
    zeta: f64,
    rng: CounterRng,
}

impl ArrowField {
    pub fn new(zeta: f64, seed: u64) -> Self {
        Self {
            zeta,
            rng: CounterRng::new(seed, "arrows"),
        }
    }

    #[inline]
    pub fn down(&self, column: i64, height: u64) -> bool {
        self.rng.uniform2(site_word(column), height) < self.zeta
    }
}

impl ArrowSource for ArrowField {
    #[inline]
    fn points_down(&mut self, column: i64, height: u64) -> bool {
        self.down(column, height)
    }
}

/// Cumulative particle profile read from the origin leftwards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlackPath {
    left: i64,
    eta: Vec<u32>,
    // cumulative[i] = B(left + i); one extra entry for B(1) = 0.
    cumulative: Vec<u64>,
}

impl BlackPath {
    /// Black path of `eta(left), ..., eta(0)`.
    pub fn from_counts(eta: Vec<u32>) -> Self {
        assert!(!eta.is_empty(), "black path needs at least site 0");
        let left = -(eta.len() as i64 - 1);
        let mut cumulative = vec![0u64; eta.len() + 1];
        for i in (0..eta.len()).rev() {
            cumulative[i] = cumulative[i + 1] + eta[i] as u64;
        }
        Self {
            left,
            eta,
            cumulative,
        }
    }

    /// Sample `eta` on `[-n, 0]`.
    pub fn sample(n: u64, sampler: &EtaSampler) -> Self {
        let eta = (-(n as i64)..=0).map(|x| sampler.at(x)).collect();
        Self::from_counts(eta)
    }

    /// Leftmost site.
    pub fn left(&self) -> i64 {
        self.left
    }

    pub fn eta(&self, x: i64) -> u32 {
        self.eta[(x - self.left) as usize]
    }

    pub fn etas(&self) -> &[u32] {
        &self.eta
    }

    /// `B(x)` for `left <= x <= 1`.
    #[inline]
    pub fn height(&self, x: i64) -> u64 {
        self.cumulative[(x - self.left) as usize]
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.left && x <= 1
    }
}

/// One reflected step of a red path leaving `column` at `height`.
#[inline]
pub(crate) fn red_step<A: ArrowSource + ?Sized>(
    black: &BlackPath,
    arrows: &mut A,
    column: i64,
    height: u64,
) -> u64 {
    let floor = black.height(column + 1);
    if height <= floor {
        return floor;
    }
    let next = height - arrows.points_down(column, height) as u64;
    next.max(floor)
}

/// A red path on the columns `start..=1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedPath {
    start: i64,
    heights: Vec<u64>,
}

impl RedPath {
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Height at `column`, for `start <= column <= 1`.
    pub fn at(&self, column: i64) -> u64 {
        self.heights[(column - self.start) as usize]
    }

    pub fn heights(&self) -> &[u64] {
        &self.heights
    }

    /// Height on the axis; the flow value this path encodes.
    pub fn terminal(&self) -> u64 {
        *self.heights.last().expect("red paths are nonempty")
    }
}

/// Follow the red arrows from `(start, B(start))` to the axis.
pub fn red_path<A: ArrowSource + ?Sized>(black: &BlackPath, arrows: &mut A, start: i64) -> RedPath {
    assert!(
        start >= black.left() && start <= 0,
        "red path start {start} outside the black path"
    );
    let mut heights = Vec::with_capacity((1 - start + 1) as usize);
    let mut h = black.height(start);
    heights.push(h);
    for x in start..=0 {
        h = red_step(black, arrows, x, h);
        heights.push(h);
    }
    RedPath { start, heights }
}

/// A dual blue path, read from the axis leftwards.
///
/// A path of level `y >= 1` starts on the axis at height `y - 1/2`. Heights
/// are stored as the integer part `a` of `a + 1/2`. The path moving from
/// column `c + 1` to column `c` goes up by one exactly when the red arrow at
/// `(c, a + 1)` points down, so it never crosses a red path. It dies at the
/// first column where it lies below the black path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BluePath {
    level: u64,
    // heights[i] is the integer part at column 1 - i.
    heights: Vec<u64>,
    death: Option<i64>,
}

impl BluePath {
    pub fn level(&self) -> u64 {
        self.level
    }

    /// Integer part of the height at `column`, while the path is alive there.
    pub fn at(&self, column: i64) -> Option<u64> {
        let i = 1 - column;
        if i < 0 {
            return None;
        }
        self.heights.get(i as usize).copied()
    }

    /// Leftmost column on which the path is alive.
    pub fn last_alive_column(&self) -> i64 {
        1 - (self.heights.len() as i64 - 1)
    }

    /// Column where the path hits the black path; `None` if it is still
    /// alive at the left end of the black path.
    pub fn death(&self) -> Option<i64> {
        self.death
    }
}

/// Dual blue paths started on the axis at the given levels.
pub fn blue_paths<A: ArrowSource + ?Sized>(
    black: &BlackPath,
    arrows: &mut A,
    levels: &[u64],
) -> Vec<BluePath> {
    levels
        .iter()
        .map(|&level| {
            assert!(level >= 1, "blue levels start at 1");
            let mut a = level - 1;
            let mut heights = vec![a];
            let mut death = None;
            let mut column = 0i64;
            while column >= black.left() {
                let floor = black.height(column);
                if a + 1 < floor {
                    death = Some(column);
                    break;
                }
                a += arrows.points_down(column, a + 1) as u64;
                if a < floor {
                    death = Some(column);
                    break;
                }
                heights.push(a);
                column -= 1;
            }
            BluePath {
                level,
                heights,
                death,
            }
        })
        .collect()
}
