//! Coordinate update order policies and the walk-coverage (`S_l`) tracker.
//!
//! Deterministic policies ignore the seed; random policies draw from a
//! seeded ChaCha stream, so identical seed and residual history give an
//! identical coordinate sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sparse::{SparseMatrix, SparseVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulerKind {
    /// Breadth-first neighborhoods of the target, layer by layer.
    RoundRobinNeighborhood,
    /// Fixed sweep over 0..n, skipping zero residuals.
    CyclicNonzero,
    /// Uniform over the nonzero coordinates of `r`.
    UniformCensored,
    /// Uniform over a support padded to `min(td, n)`; pad draws are no-op ticks.
    PaddedUniform,
    /// Probability proportional to `|r_u|`.
    ProportionalAbs,
    /// Probability proportional to `r_u²`.
    ProportionalSquare,
    /// `argmax |r_u|`, lowest index on ties.
    GreedyMax,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 7] = [
        SchedulerKind::RoundRobinNeighborhood,
        SchedulerKind::CyclicNonzero,
        SchedulerKind::UniformCensored,
        SchedulerKind::PaddedUniform,
        SchedulerKind::ProportionalAbs,
        SchedulerKind::ProportionalSquare,
        SchedulerKind::GreedyMax,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::RoundRobinNeighborhood => "round_robin_neighborhood",
            SchedulerKind::CyclicNonzero => "cyclic_nonzero",
            SchedulerKind::UniformCensored => "uniform_censored",
            SchedulerKind::PaddedUniform => "padded_uniform",
            SchedulerKind::ProportionalAbs => "proportional_abs",
            SchedulerKind::ProportionalSquare => "proportional_square",
            SchedulerKind::GreedyMax => "greedy_max",
        }
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchedulerKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidParam(format!("unknown scheduler '{s}'")))
    }
}

/// A scheduler decision: update a coordinate, or burn a no-op tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Draw {
    Update(usize),
    Tick,
}

/// Stateful update-order policy bound to one system and target.
pub struct Scheduler {
    kind: SchedulerKind,
    rng: ChaCha8Rng,
    n: usize,
    d: usize,
    /// Cumulative BFS layers of the target (round robin only).
    layers: Vec<Vec<usize>>,
    layer_idx: usize,
    pos: usize,
}

impl Scheduler {
    pub fn new(kind: SchedulerKind, seed: u64, g: &SparseMatrix, target: usize) -> Result<Self> {
        if target >= g.n() {
            return Err(Error::IndexOutOfRange { index: target, dim: g.n() });
        }
        let layers = if kind == SchedulerKind::RoundRobinNeighborhood {
            bfs_layers(g, target)
        } else {
            Vec::new()
        };
        Ok(Scheduler {
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
            n: g.n(),
            d: g.max_row_nnz(),
            layers,
            layer_idx: 0,
            pos: 0,
        })
    }

    pub fn kind(&self) -> SchedulerKind {
        self.kind
    }

    /// Next coordinate to update given the residual and the task index `t`
    /// (tasks performed so far, ticks included).
    pub fn next(&mut self, r: &SparseVector, t: u64) -> Result<Draw> {
        match self.kind {
            SchedulerKind::RoundRobinNeighborhood => self.next_round_robin(r),
            SchedulerKind::CyclicNonzero => self.next_cyclic(r),
            SchedulerKind::UniformCensored => {
                let entries = r.entries();
                if entries.is_empty() {
                    return Err(Error::EmptyResidual);
                }
                Ok(Draw::Update(entries[self.rng.gen_range(0..entries.len())].0))
            }
            SchedulerKind::PaddedUniform => self.next_padded(r, t),
            SchedulerKind::ProportionalAbs => self.next_weighted(r, |v| v.abs()),
            SchedulerKind::ProportionalSquare => self.next_weighted(r, |v| v * v),
            SchedulerKind::GreedyMax => {
                let entries = r.entries();
                if entries.is_empty() {
                    return Err(Error::EmptyResidual);
                }
                let mut best = entries[0];
                for &(idx, v) in &entries[1..] {
                    if v.abs() > best.1.abs() {
                        best = (idx, v);
                    }
                }
                Ok(Draw::Update(best.0))
            }
        }
    }

    fn next_round_robin(&mut self, r: &SparseVector) -> Result<Draw> {
        let last = self.layers.len() - 1;
        let budget: usize = self.layers.iter().map(|l| l.len()).sum::<usize>() + self.layers[last].len();
        for _ in 0..budget {
            let layer = &self.layers[self.layer_idx.min(last)];
            if self.pos >= layer.len() {
                self.pos = 0;
                self.layer_idx = if self.layer_idx >= last { last } else { self.layer_idx + 1 };
                // saturated: keep sweeping the full reachable set
                continue;
            }
            let u = layer[self.pos];
            self.pos += 1;
            if self.pos >= layer.len() {
                self.pos = 0;
                self.layer_idx = if self.layer_idx >= last { last } else { self.layer_idx + 1 };
            }
            if r.get(u) != 0.0 {
                return Ok(Draw::Update(u));
            }
        }
        Err(Error::EmptyResidual)
    }

    fn next_cyclic(&mut self, r: &SparseVector) -> Result<Draw> {
        for _ in 0..self.n {
            let u = self.pos;
            self.pos = (self.pos + 1) % self.n;
            if r.get(u) != 0.0 {
                return Ok(Draw::Update(u));
            }
        }
        Err(Error::EmptyResidual)
    }

    fn next_padded(&mut self, r: &SparseVector, t: u64) -> Result<Draw> {
        let entries = r.entries();
        // t = 0 forces the single initial update; the padded support
        // min(td, n) is only defined from the first step on.
        if t == 0 {
            if entries.is_empty() {
                return Err(Error::EmptyResidual);
            }
            return Ok(Draw::Update(entries[self.rng.gen_range(0..entries.len())].0));
        }
        let denom = ((t as usize).saturating_mul(self.d)).min(self.n).max(1);
        let prob = (entries.len() as f64 / denom as f64).min(1.0);
        if self.rng.gen::<f64>() < prob {
            if entries.is_empty() {
                return Ok(Draw::Tick);
            }
            Ok(Draw::Update(entries[self.rng.gen_range(0..entries.len())].0))
        } else {
            Ok(Draw::Tick)
        }
    }

    fn next_weighted(&mut self, r: &SparseVector, weight: fn(f64) -> f64) -> Result<Draw> {
        let entries = r.entries();
        if entries.is_empty() {
            return Err(Error::EmptyResidual);
        }
        let total: f64 = entries.iter().map(|&(_, v)| weight(v)).sum();
        let mut u = self.rng.gen::<f64>() * total;
        for &(idx, v) in entries {
            u -= weight(v);
            if u <= 0.0 {
                return Ok(Draw::Update(idx));
            }
        }
        Ok(Draw::Update(entries[entries.len() - 1].0))
    }
}

/// Cumulative BFS layers `N_i(0) ⊆ N_i(1) ⊆ …` of node `i` over the graph
/// of `g`, up to saturation. Each layer is sorted.
pub fn bfs_layers(g: &SparseMatrix, i: usize) -> Vec<Vec<usize>> {
    let mut layers = vec![vec![i]];
    let mut current: Vec<usize> = vec![i];
    let mut seen = vec![false; g.n()];
    seen[i] = true;
    loop {
        let mut frontier = Vec::new();
        for &u in &current {
            for &(v, _) in g.row(u) {
                if !seen[v] {
                    seen[v] = true;
                    frontier.push(v);
                }
            }
        }
        if frontier.is_empty() {
            return layers;
        }
        current = frontier;
        let mut next_layer = layers.last().unwrap().clone();
        next_layer.extend_from_slice(&current);
        next_layer.sort_unstable();
        layers.push(next_layer);
    }
}

/// Coverage times of the expanding neighborhoods: `s_values[l]` is the
/// first task index after which all walks of length ≤ l are counted, per
/// the recursion `S_l = min{t ≥ S_{l-1}: N_i(l) ⊆ {u_{S_{l-1}}, …, u_{t-1}}}`.
#[derive(Debug, Clone)]
pub struct WalkCoverage {
    pub layers: Vec<Vec<usize>>,
    /// `None` marks a layer the sequence never covered.
    pub s_values: Vec<Option<usize>>,
}

impl WalkCoverage {
    /// Bounded-delay parameter: the largest gap `S_l - S_{l-1}` over the
    /// covered prefix.
    pub fn bounded_delay(&self) -> Option<usize> {
        let mut prev = 0usize;
        let mut max_gap = None;
        for s in self.s_values.iter() {
            let s = (*s)?;
            let gap = s - prev;
            max_gap = Some(max_gap.map_or(gap, |m: usize| m.max(gap)));
            prev = s;
        }
        max_gap
    }

    /// CSV lines `(l, layer_size, S_l)`; uncovered layers print `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,layer_size,s_l\n");
        for (l, (layer, s)) in self.layers.iter().zip(&self.s_values).enumerate() {
            let s_str = s.map_or("inf".to_string(), |v| v.to_string());
            out.push_str(&format!("{},{},{}\n", l, layer.len(), s_str));
        }
        out
    }
}

/// Scan an update sequence (ticks as `None`) and compute the `S_l` values
/// against the BFS layers of node `i`.
pub fn sl_tracker(sequence: &[Option<usize>], g: &SparseMatrix, i: usize) -> WalkCoverage {
    let layers = bfs_layers(g, i);
    let mut s_values = Vec::with_capacity(layers.len());
    let mut window_start = 0usize;
    let mut blocked = false;
    for layer in &layers {
        if blocked {
            s_values.push(None);
            continue;
        }
        let mut remaining: std::collections::HashSet<usize> = layer.iter().copied().collect();
        let mut found = None;
        for (k, u) in sequence.iter().enumerate().skip(window_start) {
            if let Some(u) = u {
                remaining.remove(u);
            }
            if remaining.is_empty() {
                found = Some(k + 1);
                break;
            }
        }
        match found {
            Some(s) => {
                s_values.push(Some(s));
                window_start = s;
            }
            None => {
                s_values.push(None);
                blocked = true;
            }
        }
    }
    WalkCoverage { layers, s_values }
}
