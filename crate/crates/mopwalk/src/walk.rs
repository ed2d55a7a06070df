//! Monte Carlo trajectories of truncated band chains.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::band::{BandedOperator, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Rescale boundary rows so they sum to 1.
    Renormalize,
    /// Send the dropped mass to an absorbing sink; trajectories stop there.
    Absorb,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub truncation: usize,
    pub boundary: Boundary,
    pub trials: u64,
    pub horizon: usize,
    pub seed: u64,
    /// Trial `t` starts at `starts[t % starts.len()]`.
    pub starts: Vec<usize>,
    /// Transition counts from the start state are kept for steps `1..=record_steps`.
    pub record_steps: usize,
    /// First-passage and return histograms are kept for states below this.
    pub track: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            truncation: 60,
            boundary: Boundary::Absorb,
            trials: 10_000,
            horizon: 1_000,
            seed: 0,
            starts: vec![0],
            record_steps: 3,
            track: 5,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truncation < 10 {
            return Err(Error::InvalidParams(format!("truncation must be at least 10, got {}", self.truncation)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParams("at least one trial is required".into()));
        }
        if self.starts.is_empty() || self.starts.iter().any(|&s| s >= self.truncation) {
            return Err(Error::InvalidParams("start states must lie below the truncation".into()));
        }
        Ok(())
    }
}

/// Row-stochastic matrix on `0..size`, plus the sink `size` in absorbing mode.
#[derive(Clone, Debug)]
pub struct FiniteChain<T> {
    pub size: usize,
    pub rows: Vec<Vec<(usize, T)>>,
    pub sink: Option<usize>,
}

impl<T: Scalar> FiniteChain<T> {
    pub fn row_sum(&self, i: usize) -> T {
        let z = self.rows[i][0].1.zero_like();
        self.rows[i].iter().fold(z, |acc, (_, v)| acc.add(v))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        self.rows[i].iter().find(|(k, _)| *k == j).map(|(_, v)| v)
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    /// Dense `P^r` over all states including the sink.
    pub fn power(&self, r: usize) -> Vec<Vec<T>> {
        let n = self.rows.len();
        let z = self.rows[0][0].1.zero_like();
        let mut dense = vec![vec![z.clone(); n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                dense[i][*j] = v.clone();
            }
        }
        crate::band::dense_pow(&dense, r)
    }

    /// Cumulative rows in double precision for sampling.
    pub fn sampler(&self) -> Sampler {
        let cdf = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                row.iter()
                    .filter(|(_, v)| v.sign() == std::cmp::Ordering::Greater)
                    .map(|(j, v)| {
                        acc += v.to_f64();
                        (*j, acc)
                    })
                    .collect()
            })
            .collect();
        Sampler { cdf, sink: self.sink }
    }
}

/// Cuts a stochastic band to its first `truncation` states.
pub fn truncate<T: Scalar>(p: &BandedOperator<T>, truncation: usize, boundary: Boundary) -> Result<FiniteChain<T>> {
    if p.valid_rows() < truncation {
        return Err(Error::InvalidParams(format!(
            "band of size {} has {} complete rows, fewer than the truncation {truncation}",
            p.size(),
            p.valid_rows()
        )));
    }
    let mut rows = Vec::with_capacity(truncation + 1);
    for i in 0..truncation {
        let mut kept = Vec::new();
        let mut dropped = p.get(i, i).zero_like();
        for j in p.row_range(i) {
            let v = p.get(i, j).clone();
            if j < truncation {
                kept.push((j, v));
            } else {
                dropped = dropped.add(&v);
            }
        }
        match boundary {
            Boundary::Renormalize => {
                let total = kept.iter().fold(dropped.zero_like(), |a, (_, v)| a.add(v));
                if total.sign() != std::cmp::Ordering::Greater {
                    return Err(Error::Invariant(format!("row {i} keeps no mass")));
                }
                for (_, v) in kept.iter_mut() {
                    *v = v.div(&total);
                }
            }
            Boundary::Absorb => {
                if dropped.sign() != std::cmp::Ordering::Equal {
                    kept.push((truncation, dropped));
                }
            }
        }
        rows.push(kept);
    }
    let sink = match boundary {
        Boundary::Renormalize => None,
        Boundary::Absorb => {
            let one = p.get(0, 0).one_like();
            rows.push(vec![(truncation, one)]);
            Some(truncation)
        }
    };
    Ok(FiniteChain { size: truncation, rows, sink })
}

#[derive(Clone, Debug)]
pub struct Sampler {
    cdf: Vec<Vec<(usize, f64)>>,
    sink: Option<usize>,
}

impl Sampler {
    fn step(&self, i: usize, u: f64) -> usize {
        let row = &self.cdf[i];
        let total = row.last().map(|x| x.1).unwrap_or(1.0);
        let target = u * total;
        row.iter().find(|(_, c)| *c > target).unwrap_or(&row[row.len() - 1]).0
    }
}

/// Counts merged by addition, so the result does not depend on merge order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStats {
    /// `(from, to, step) → count`, with `from` the start state of the trajectory.
    pub transition_counts: BTreeMap<(usize, usize, usize), u64>,
    /// `(i, j) → count` of every observed one-step move.
    pub moves: BTreeMap<(usize, usize), u64>,
    /// `(start, j) → hitting time → count`; `j = start` records the first return.
    pub first_passage: BTreeMap<(usize, usize), BTreeMap<usize, u64>>,
    /// `state → gap between successive visits → count`.
    pub returns: BTreeMap<usize, BTreeMap<usize, u64>>,
    /// Trajectories started at each state.
    pub started: BTreeMap<usize, u64>,
    pub absorbed: u64,
    pub steps: u64,
    pub horizon: usize,
}

fn bump<K: Ord>(m: &mut BTreeMap<K, u64>, k: K, by: u64) {
    *m.entry(k).or_insert(0) += by;
}

impl WalkStats {
    fn merge(mut self, other: WalkStats) -> WalkStats {
        for (k, v) in other.transition_counts {
            bump(&mut self.transition_counts, k, v);
        }
        for (k, v) in other.moves {
            bump(&mut self.moves, k, v);
        }
        for (k, h) in other.first_passage {
            let e = self.first_passage.entry(k).or_default();
            for (t, c) in h {
                bump(e, t, c);
            }
        }
        for (k, h) in other.returns {
            let e = self.returns.entry(k).or_default();
            for (t, c) in h {
                bump(e, t, c);
            }
        }
        for (k, v) in other.started {
            bump(&mut self.started, k, v);
        }
        self.absorbed += other.absorbed;
        self.steps += other.steps;
        self.horizon = self.horizon.max(other.horizon);
        self
    }

    /// `(count of X_step = to, trajectories started at from)`.
    pub fn frequency(&self, from: usize, to: usize, step: usize) -> (u64, u64) {
        let c = self.transition_counts.get(&(from, to, step)).copied().unwrap_or(0);
        (c, self.started.get(&from).copied().unwrap_or(0))
    }

    /// `(moves i → j, moves out of i)`.
    pub fn move_frequency(&self, i: usize, j: usize) -> (u64, u64) {
        let c = self.moves.get(&(i, j)).copied().unwrap_or(0);
        let total = self.moves.range((i, 0)..=(i, usize::MAX)).map(|(_, v)| v).sum();
        (c, total)
    }

    pub fn to_json(&self) -> Value {
        let hist = |h: &BTreeMap<usize, u64>| h.iter().map(|(t, c)| json!([t, c])).collect::<Vec<_>>();
        json!({
            "horizon": self.horizon,
            "steps": self.steps,
            "absorbed": self.absorbed,
            "started": self.started.iter().map(|(s, c)| json!({"state": s, "count": c})).collect::<Vec<_>>(),
            "transition_counts": self.transition_counts.iter()
                .map(|((f, t, s), c)| json!({"from": f, "to": t, "step": s, "count": c}))
                .collect::<Vec<_>>(),
            "moves": self.moves.iter()
                .map(|((f, t), c)| json!({"from": f, "to": t, "count": c}))
                .collect::<Vec<_>>(),
            "first_passage": self.first_passage.iter()
                .map(|((i, j), h)| json!({"from": i, "to": j, "histogram": hist(h)}))
                .collect::<Vec<_>>(),
            "returns": self.returns.iter()
                .map(|(i, h)| json!({"state": i, "histogram": hist(h)}))
                .collect::<Vec<_>>(),
        })
    }
}

fn trajectory(sampler: &Sampler, cfg: &SimConfig, trial: u64, stats: &mut WalkStats) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let start = cfg.starts[(trial % cfg.starts.len() as u64) as usize];
    bump(&mut stats.started, start, 1);
    let mut state = start;
    let mut last_visit: BTreeMap<usize, usize> = BTreeMap::new();
    if state < cfg.track {
        last_visit.insert(state, 0);
    }
    let mut hit = vec![false; cfg.track];
    for t in 1..=cfg.horizon {
        let next = sampler.step(state, rng.gen::<f64>());
        bump(&mut stats.moves, (state, next), 1);
        stats.steps += 1;
        state = next;
        if t <= cfg.record_steps {
            bump(&mut stats.transition_counts, (start, state, t), 1);
        }
        if Some(state) == sampler.sink {
            stats.absorbed += 1;
            break;
        }
        if state < cfg.track {
            if !hit[state] {
                hit[state] = true;
                bump(stats.first_passage.entry((start, state)).or_default(), t, 1);
            }
            if let Some(prev) = last_visit.insert(state, t) {
                bump(stats.returns.entry(state).or_default(), t - prev, 1);
            }
        }
    }
}

const CHUNK: u64 = 256;

/// Runs `cfg.trials` trajectories; identical seed and configuration give identical statistics.
pub fn simulate<T: Scalar>(chain: &FiniteChain<T>, cfg: &SimConfig) -> Result<WalkStats> {
    cfg.validate()?;
    if chain.size != cfg.truncation {
        return Err(Error::InvalidParams(format!(
            "chain has {} states, configuration expects {}",
            chain.size, cfg.truncation
        )));
    }
    let sampler = chain.sampler();
    let chunks = cfg.trials.div_ceil(CHUNK);
    let stats = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = WalkStats { horizon: cfg.horizon, ..Default::default() };
            for trial in c * CHUNK..((c + 1) * CHUNK).min(cfg.trials) {
                trajectory(&sampler, cfg, trial, &mut s);
            }
            s
        })
        .reduce(|| WalkStats { horizon: cfg.horizon, ..Default::default() }, WalkStats::merge);
    Ok(stats)
}

/// `F̂^n_{ij}` for `n = 1..=horizon`: fraction of trajectories from `i` that reached `j` by step `n`.
pub fn first_passage_empirical(stats: &WalkStats, i: usize, j: usize) -> Result<Vec<f64>> {
    let total = stats.started.get(&i).copied().unwrap_or(0);
    if total == 0 {
        return Err(Error::InsufficientData(i));
    }
    let empty = BTreeMap::new();
    let h = stats.first_passage.get(&(i, j)).unwrap_or(&empty);
    let mut acc = 0u64;
    Ok((1..=stats.horizon)
        .map(|n| {
            acc += h.get(&n).copied().unwrap_or(0);
            acc as f64 / total as f64
        })
        .collect())
}

/// `n, F̂` rows.
pub fn first_passage_csv(curve: &[f64]) -> String {
    let mut out = String::from("n,F\n");
    for (n, f) in curve.iter().enumerate() {
        out.push_str(&format!("{},{f}\n", n + 1));
    }
    out
}

/// `|count - n p| ≤ k sqrt(n p (1-p))`; degenerate `p` requires the exact count.
pub fn within_sigma(count: u64, total: u64, p: f64, k: f64) -> bool {
    let n = total as f64;
    let mean = n * p;
    let sd = (n * p * (1.0 - p)).max(0.0).sqrt();
    (count as f64 - mean).abs() <= k * sd + 1e-9
}

/// Exact dropped mass per row, for checking the absorbing cut.
pub fn dropped_mass(p: &BandedOperator<Rational>, truncation: usize) -> Vec<Rational> {
    (0..truncation)
        .map(|i| p.row_range(i).filter(|&j| j >= truncation).map(|j| p.get(i, j).clone()).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::Profile;
    use crate::markov::jp_stochastic_ii;
    use crate::params::JPParams;

    #[test]
    fn truncation_modes() {
        let p = jp_stochastic_ii(20, &JPParams::recurrent_example()).unwrap();
        let r = truncate(&p, 10, Boundary::Renormalize).unwrap();
        for i in 0..10 {
            assert_eq!(r.row_sum(i), 1);
        }
        assert_eq!(r.get(3, 2), Some(p.get(3, 2)));
        let a = truncate(&p, 10, Boundary::Absorb).unwrap();
        let dropped = dropped_mass(&p, 10);
        for i in 0..10 {
            assert_eq!(a.row_sum(i), 1);
            let sink = a.get(i, 10).cloned().unwrap_or_default();
            assert_eq!(sink, dropped[i]);
        }
        assert!(truncate(&p, 19, Boundary::Absorb).is_err());
    }

    #[test]
    fn self_loop_chain() {
        let mut p = BandedOperator::new(12, 0, 1, Profile::TypeII, Rational::new());
        for i in 0..12 {
            p.set(i, i, Rational::from(1));
        }
        let chain = truncate(&p, 10, Boundary::Absorb).unwrap();
        let cfg = SimConfig { truncation: 10, trials: 50, horizon: 20, ..Default::default() };
        let s = simulate(&chain, &cfg).unwrap();
        assert_eq!(s.moves.len(), 1);
        assert_eq!(s.moves[&(0, 0)], 50 * 20);
        assert_eq!(s.absorbed, 0);
        assert_eq!(first_passage_empirical(&s, 0, 0).unwrap()[0], 1.0);
        assert!(matches!(first_passage_empirical(&s, 3, 0), Err(Error::InsufficientData(3))));
    }

    #[test]
    fn reproducible() {
        let p = jp_stochastic_ii(40, &JPParams::transient_example()).unwrap();
        let chain = truncate(&p, 30, Boundary::Absorb).unwrap();
        let cfg = SimConfig { truncation: 30, trials: 2000, horizon: 200, seed: 7, starts: vec![0, 1], ..Default::default() };
        let a = simulate(&chain, &cfg).unwrap();
        let b = simulate(&chain, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
        let c = simulate(&chain, &SimConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, c);
        let curve = first_passage_empirical(&a, 0, 0).unwrap();
        assert!(curve.windows(2).all(|w| w[0] <= w[1]) && curve.iter().all(|f| (0.0..=1.0).contains(f)));
    }
}
