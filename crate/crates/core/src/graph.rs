//! The layered configuration graph: plain vertices, double vertices, the
//! hidden last configuration, finish times and path makespans.
//!
//! The graph depends only on the job pool and the machine count, so one graph
//! serves every speed vector.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::config::{
    config_compare, extract_sets, find_mu, log_floor_delta, scale_template, shape_for, tiny_bound, validate, validate_with, weights,
    C5Mode, Config, Entry, ScaleStep, ScaleTemplate, Shape, SizeVector,
};
use crate::instance::{floor_div_i64, JobPool};
use crate::numerics::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    I,
    II,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    A,
    B,
}

/// A vertex on one of the layers `1..=m-3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plain {
    pub level: Level,
    /// 1-based layer.
    pub layer: usize,
    pub alpha: Config,
}

/// A vertex of the united layer `m-2`, always on level II.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Double {
    pub first: Config,
    pub second: Config,
    pub hidden: Config,
    pub case: Case,
}

impl Double {
    pub fn configs(&self) -> [&Config; 3] {
        [&self.first, &self.second, &self.hidden]
    }
}

/// A finish time or makespan; infinity sorts above every finite value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Finish {
    Finite(Rational),
    Infinite,
}

impl Finish {
    pub fn zero() -> Self {
        Finish::Finite(Rational::zero())
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Finish::Finite(r) => Some(r),
            Finish::Infinite => None,
        }
    }
}

/// `work / s`, with the speed-0 convention.
pub fn ratio(work: &Rational, s: &Rational) -> Finish {
    if s.is_zero() {
        if work.is_zero() {
            Finish::zero()
        } else {
            Finish::Infinite
        }
    } else {
        Finish::Finite(work / s)
    }
}

/// Finish time: total weight plus one block when new blocks start here.
pub fn finish_time(alpha: &Config, s: &Rational, pool: &JobPool) -> Finish {
    let w = weights(alpha, pool);
    let mut work = w.total();
    if alpha.has_new_blocks() {
        work += &w.block_size;
    }
    ratio(&work, s)
}

/// `|alpha| / s` without the block bonus.
pub fn plain_ratio(alpha: &Config, s: &Rational, pool: &JobPool) -> Finish {
    ratio(&weights(alpha, pool).total(), s)
}

/// Which extra vertex rule a generated tail must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailRule {
    /// Level I: no small jobs and no blocks.
    LevelI,
    /// Level II on layers `1..=m-3`: the block bound `(V3)`.
    LevelII,
    /// Configurations inside a double vertex.
    Unrestricted,
}

/// Coordinates of a configuration other than its vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    pub z: i64,
    pub zb: i64,
    pub mu: i64,
    pub top: i64,
}

fn for_each_choice(ranges: &[(u32, u32)], mut f: impl FnMut(&[u32])) {
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return;
    }
    let mut cur: Vec<u32> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == cur.len() {
                return;
            }
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = ranges[i].0;
            i += 1;
        }
    }
}

/// `(V3)`: `n_lambda^1 <= max(n_lambda^o, floor(X_lambda / block) - 1)`.
pub fn v3_bound(pool: &JobPool, zb: i64, head_tiny: u32) -> u32 {
    let p = &pool.params;
    let x = pool.indexing.weight_up_to(p.lambda(zb));
    let f = floor_div_i64(&x, &p.block_size(zb)) - 1;
    let f = if f < 0 { 0 } else { f as u32 };
    head_tiny.max(f)
}

/// All valid configurations with the given frame and head whose large set
/// weighs at least `l_floor`, filtered by `rule`.
pub fn enumerate_tails(pool: &JobPool, frame: Frame, head: &SizeVector, l_floor: &Rational, rule: TailRule) -> Vec<Config> {
    let p = &pool.params;
    let lambda = p.lambda(frame.zb);
    let big_lambda = p.big_lambda(frame.z);
    let slots = &pool.indexing.slots;
    let mut out = Vec::new();
    let make = |tail: SizeVector| Config {
        z: frame.z,
        mu: frame.mu,
        zb: frame.zb,
        top: frame.top,
        head: head.clone(),
        tail,
    };

    // the liberal empty configuration
    if head.is_content_empty() && l_floor.is_zero() {
        let c = make(head.clone());
        if validate(&c, pool).is_valid() {
            out.push(c);
        }
    }

    let mut l_slots = Vec::new();
    let mut l_ranges = Vec::new();
    let mut s_slots = Vec::new();
    let mut s_ranges = Vec::new();
    for (i, slot) in slots.iter().enumerate() {
        match head.entries[i] {
            Entry::Absent => {}
            Entry::Scalar(a) => {
                if slot.l >= frame.mu + 2 {
                    l_slots.push(i);
                    l_ranges.push((a, slot.n_max()));
                } else {
                    s_slots.push(i);
                    s_ranges.push((a, if rule == TailRule::LevelI { a } else { slot.n_max() }));
                }
            }
            Entry::Triple(l0, m, s0) => {
                l_slots.push(i);
                l_ranges.push((l0, m));
                s_slots.push(i);
                s_ranges.push((s0, if rule == TailRule::LevelI { s0 } else { slot.n_max() }));
            }
        }
    }
    let tiny_hi = match rule {
        TailRule::LevelI => head.tiny,
        TailRule::LevelII => v3_bound(pool, frame.zb, head.tiny).min(tiny_bound(pool, frame.zb)),
        TailRule::Unrestricted => tiny_bound(pool, frame.zb),
    };
    s_ranges.push((head.tiny, tiny_hi));

    for_each_choice(&l_ranges, |lc| {
        let mut lw = Rational::zero();
        for (k, &i) in l_slots.iter().enumerate() {
            let a = match head.entries[i] {
                Entry::Scalar(a) => a,
                Entry::Triple(l0, _, _) => l0,
                Entry::Absent => unreachable!(),
            };
            if lc[k] > a {
                lw += slots[i].weight(a, lc[k]);
            }
        }
        if !lw.is_positive() || &lw < l_floor {
            return;
        }
        if find_mu(&lw, lambda, big_lambda, p) != Some(frame.mu) {
            return;
        }
        for_each_choice(&s_ranges, |sc| {
            let mut tail = head.clone();
            for (k, &i) in l_slots.iter().enumerate() {
                tail.entries[i] = match tail.entries[i] {
                    Entry::Scalar(_) => Entry::Scalar(lc[k]),
                    Entry::Triple(_, m, s) => Entry::Triple(lc[k], m, s),
                    Entry::Absent => unreachable!(),
                };
            }
            for (k, &i) in s_slots.iter().enumerate() {
                tail.entries[i] = match tail.entries[i] {
                    Entry::Scalar(_) => Entry::Scalar(sc[k]),
                    Entry::Triple(l, m, _) => Entry::Triple(l, m, sc[k]),
                    Entry::Absent => unreachable!(),
                };
            }
            tail.tiny = sc[s_slots.len()];
            let c = make(tail);
            if validate(&c, pool).is_valid() {
                out.push(c);
            }
        });
    });
    out
}

/// Heads allowed on the first layer `(V1)`: nothing allocated before.
pub fn first_layer_heads(pool: &JobPool, frame: Frame) -> Vec<SizeVector> {
    let lambda = pool.params.lambda(frame.zb);
    let mut entries = Vec::with_capacity(pool.indexing.len());
    let mut free = Vec::new();
    for (i, slot) in pool.indexing.slots.iter().enumerate() {
        entries.push(match shape_for(slot.l, lambda, frame.top, frame.mu) {
            Shape::Absent => Entry::Absent,
            Shape::Scalar => Entry::Scalar(0),
            Shape::Triple => {
                free.push((i, 0, slot.n_max()));
                Entry::Triple(0, 0, 0)
            }
        });
    }
    ScaleTemplate { tiny: 0, entries, free }.heads()
}

/// Frames `(z, mu)` with `zb = z` for plain configurations.
fn plain_frames(pool: &JobPool) -> Vec<Frame> {
    let p = &pool.params;
    let mut out = Vec::new();
    for &z in &pool.magnitudes {
        for mu in p.lambda(z) + 1..=p.big_lambda(z) {
            out.push(Frame {
                z,
                zb: z,
                mu,
                top: p.big_lambda(z),
            });
        }
    }
    out
}

/// The configuration of the last machine, determined by the one before it.
pub fn hidden_config(prev: &Config, pool: &JobPool) -> Config {
    let p = &pool.params;
    let top = pool.z_max().map_or(prev.top, |z| p.big_lambda(z));
    let lambda = prev.lambda(p);
    let mut head = prev.tail.clone();
    let mut tail = SizeVector {
        tiny: tiny_bound(pool, prev.zb),
        entries: Vec::with_capacity(head.entries.len()),
    };
    for (i, slot) in pool.indexing.slots.iter().enumerate() {
        let shape = shape_for(slot.l, lambda, top, prev.mu);
        if slot.l > prev.top && slot.l <= top {
            head.entries[i] = match shape {
                Shape::Triple => Entry::Triple(0, 0, 0),
                _ => Entry::Scalar(0),
            };
        }
        tail.entries.push(match head.entries[i] {
            Entry::Absent => Entry::Absent,
            Entry::Scalar(_) => Entry::Scalar(slot.n_max()),
            Entry::Triple(_, m, _) => Entry::Triple(m, m, slot.n_max()),
        });
    }
    Config {
        z: prev.z,
        mu: prev.mu,
        zb: prev.zb,
        top,
        head,
        tail,
    }
}

/// Whether the hidden configuration passes the clauses with the one-sided `(C5)`.
pub fn hidden_is_valid(hidden: &Config, pool: &JobPool) -> bool {
    validate_with(hidden, pool, C5Mode::Hidden).is_valid()
}

/// Case of the last three configurations, or `None` when neither case holds.
///
/// Assumes `second` already carries the block exponent its case requires.
pub fn check_tail_case(first: &Config, second: &Config, hidden: &Config, pool: &JobPool) -> Option<Case> {
    let k = pool.params.rho_shift;
    let case = if second.z - first.z < 2 * k { Case::A } else { Case::B };
    match case {
        Case::A if second.zb != first.z => return None,
        Case::B if second.zb != second.z => return None,
        _ => {}
    }
    let w: Vec<_> = [first, second, hidden].iter().map(|c| weights(c, pool)).collect();
    let blocks = [first.blocks(), second.blocks(), hidden.blocks()];
    let ok = match case {
        Case::A => {
            w[0].tilde() <= w[1].tilde()
                && w[1].tilde() <= w[2].tilde()
                && w[0].total() <= w[1].total()
                && w[1].total() <= w[2].total()
                && (first.tail.tiny == 0 || {
                    let total: u32 = blocks.iter().sum();
                    let six = blocks.iter().filter(|&&b| b >= 6).count();
                    total >= 18 && six >= 2
                })
        }
        Case::B => {
            w[1].tilde() <= w[2].tilde()
                && w[1].total() <= w[2].total()
                && (first.tail.is_content_empty() || blocks[1] + blocks[2] >= 6)
        }
    };
    ok.then_some(case)
}

/// Large-set weight `|L_alpha|`.
pub fn large_weight(alpha: &Config, pool: &JobPool) -> Rational {
    weights(alpha, pool).large
}

/// Every configuration `beta` with `beta in Scale(alpha)` at the given frame
/// and `|L_beta| >= |L_alpha|`.
fn scaled_successors(alpha: &Config, frame: Frame, pool: &JobPool, rule: TailRule) -> Vec<Config> {
    let step = ScaleStep {
        z: frame.z,
        zb: frame.zb,
        mu: frame.mu,
    };
    let Some(template) = scale_template(alpha, step, pool) else {
        return Vec::new();
    };
    let floor = large_weight(alpha, pool);
    let mut out = Vec::new();
    for head in template.heads() {
        out.extend(enumerate_tails(pool, frame, &head, &floor, rule));
    }
    out
}

/// Target frames reachable from `alpha` with the given block-exponent rule.
///
/// A successor of a configuration with a nonempty tail has a nonempty large set
/// of weight between `|L_alpha|` and the total job weight, so only the middle
/// classes `find_mu` can return for that range are listed.
fn frames_after(alpha: &Config, pool: &JobPool, zb_of: impl Fn(i64) -> i64) -> Vec<Frame> {
    let p = &pool.params;
    let (mu_lo, mu_hi) = if alpha.tail.is_content_empty() {
        (i64::MIN, i64::MAX)
    } else {
        let lw = large_weight(alpha, pool);
        let lo = if lw.is_zero() { i64::MIN } else { log_floor_delta(&lw, p).map_or(i64::MIN, |e| e - 1) };
        let hi = log_floor_delta(&pool.indexing.total_weight(), p).map_or(i64::MAX, |e| e - 1);
        (lo, hi)
    };
    let mut out = Vec::new();
    for &z in pool.magnitudes.iter().filter(|&&z| z >= alpha.z) {
        let zb = zb_of(z);
        let lo = alpha.mu.max(p.lambda(zb) + 1).max(mu_lo);
        for mu in lo..=p.big_lambda(z).min(mu_hi) {
            out.push(Frame {
                z,
                zb,
                mu,
                top: p.big_lambda(z),
            });
        }
    }
    out
}

/// Edge test between consecutive plain configurations: scale membership, large-set
/// growth and level order.
pub fn edge(from: (Level, &Config), to: (Level, &Config), pool: &JobPool) -> bool {
    from.0 <= to.0
        && crate::config::in_scale(from.1, to.1, pool)
        && large_weight(from.1, pool) <= large_weight(to.1, pool)
}

/// The graph for a job pool and `m >= 3` machines.
#[derive(Clone, Debug)]
pub struct Graph {
    pub pool: Arc<JobPool>,
    pub m: usize,
    /// Plain layers `1..=m-3`; `layers[i]` is layer `i+1`.
    pub layers: Vec<Vec<Plain>>,
    /// `succ[i][v]`: indices into `layers[i+1]`, or into `doubles` for the last plain layer.
    pub succ: Vec<Vec<Vec<usize>>>,
    pub doubles: Vec<Double>,
    /// For `m = 3`, double vertices have no predecessor; otherwise unused.
    pub visited: Vec<usize>,
}

impl Graph {
    pub fn new(pool: Arc<JobPool>, m: usize) -> Graph {
        assert!(m >= 3, "graph needs at least three machines");
        let mut g = Graph {
            pool,
            m,
            layers: Vec::new(),
            succ: Vec::new(),
            doubles: Vec::new(),
            visited: Vec::new(),
        };
        if g.pool.n() == 0 {
            return g;
        }
        g.build();
        g
    }

    fn build(&mut self) {
        let pool = self.pool.clone();
        let plain_count = self.m - 3;
        let mut double_index: BTreeMap<(Config, Config), usize> = BTreeMap::new();
        if plain_count == 0 {
            for frame in plain_frames(&pool) {
                for head in first_layer_heads(&pool, frame) {
                    for first in enumerate_tails(&pool, frame, &head, &Rational::zero(), TailRule::Unrestricted) {
                        self.push_doubles(&first, &mut double_index);
                    }
                }
            }
            self.visited.push(self.doubles.len());
            return;
        }
        let mut first_layer = Vec::new();
        for frame in plain_frames(&pool) {
            for head in first_layer_heads(&pool, frame) {
                for level in [Level::I, Level::II] {
                    let rule = if level == Level::I { TailRule::LevelI } else { TailRule::LevelII };
                    for alpha in enumerate_tails(&pool, frame, &head, &Rational::zero(), rule) {
                        first_layer.push(Plain { level, layer: 1, alpha });
                    }
                }
            }
        }
        self.layers.push(first_layer);
        for li in 0..plain_count {
            let mut succ_lists = Vec::with_capacity(self.layers[li].len());
            if li + 1 < plain_count {
                let mut index: BTreeMap<(Level, Config), usize> = BTreeMap::new();
                let mut next: Vec<Plain> = Vec::new();
                for v in &self.layers[li] {
                    let mut list = Vec::new();
                    for frame in frames_after(&v.alpha, &pool, |z| z) {
                        let levels: &[Level] = if v.level == Level::I { &[Level::I, Level::II] } else { &[Level::II] };
                        for &level in levels {
                            let rule = if level == Level::I { TailRule::LevelI } else { TailRule::LevelII };
                            for beta in scaled_successors(&v.alpha, frame, &pool, rule) {
                                let key = (level, beta);
                                let idx = *index.entry(key.clone()).or_insert_with(|| {
                                    next.push(Plain {
                                        level,
                                        layer: li + 2,
                                        alpha: key.1.clone(),
                                    });
                                    next.len() - 1
                                });
                                list.push(idx);
                            }
                        }
                    }
                    succ_lists.push(list);
                }
                self.layers.push(next);
            } else {
                let vs: Vec<Config> = self.layers[li].iter().map(|v| v.alpha.clone()).collect();
                let mut by_first: BTreeMap<Config, Vec<usize>> = BTreeMap::new();
                for alpha in vs {
                    let mut list = Vec::new();
                    for frame in frames_after(&alpha, &pool, |z| z) {
                        for first in scaled_successors(&alpha, frame, &pool, TailRule::Unrestricted) {
                            if let Some(known) = by_first.get(&first) {
                                list.extend_from_slice(known);
                                continue;
                            }
                            let found = self.push_doubles(&first, &mut double_index);
                            list.extend_from_slice(&found);
                            by_first.insert(first, found);
                        }
                    }
                    succ_lists.push(list);
                }
            }
            self.succ.push(succ_lists);
        }
        self.visited = self.layers.iter().map(|l| l.len()).collect();
        self.visited.push(self.doubles.len());
    }

    /// Adds every double vertex starting with `first`; returns their indices.
    fn push_doubles(&mut self, first: &Config, index: &mut BTreeMap<(Config, Config), usize>) -> Vec<usize> {
        let pool = self.pool.clone();
        let k = pool.params.rho_shift;
        let mut out = Vec::new();
        let fz = first.z;
        for frame in frames_after(first, &pool, |z| if z - fz < 2 * k { fz } else { z }) {
            for second in scaled_successors(first, frame, &pool, TailRule::Unrestricted) {
                if let Some(&idx) = index.get(&(first.clone(), second.clone())) {
                    out.push(idx);
                    continue;
                }
                let hidden = hidden_config(&second, &pool);
                if !hidden_is_valid(&hidden, &pool) || large_weight(&second, &pool) > large_weight(&hidden, &pool) {
                    continue;
                }
                let Some(case) = check_tail_case(first, &second, &hidden, &pool) else {
                    continue;
                };
                self.doubles.push(Double {
                    first: first.clone(),
                    second: second.clone(),
                    hidden,
                    case,
                });
                let idx = self.doubles.len() - 1;
                index.insert((first.clone(), second), idx);
                out.push(idx);
            }
        }
        out
    }

    /// Order used between double vertices: first configuration, then second, then case.
    pub fn compare_doubles(&self, a: usize, b: usize) -> Ordering {
        let (x, y) = (&self.doubles[a], &self.doubles[b]);
        config_compare(&x.first, &y.first, &self.pool)
            .then_with(|| config_compare(&x.second, &y.second, &self.pool))
            .then_with(|| x.case.cmp(&y.case))
    }

    pub fn sets_of(&self, alpha: &Config) -> crate::config::ConfigSets {
        extract_sets(alpha, &self.pool)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Params;
    use crate::numerics::{int, rat};

    fn graph(sizes: &[Rational], t: u32, m: usize) -> Graph {
        let pool = JobPool::new(sizes, Params::new(int(1), t).unwrap()).unwrap();
        Graph::new(Arc::new(pool), m)
    }

    #[test]
    fn sizes_probe() {
        for (sizes, t, m) in [
            (alloc::vec![int(4), int(4), int(4)], 1, 3),
            (alloc::vec![int(4), int(4), int(4)], 1, 4),
            (alloc::vec![int(2), int(2)], 1, 3),
            (alloc::vec![int(1), int(3), int(5), rat(1, 2)], 2, 4),
        ] {
            let g = graph(&sizes, t, m);
            std::println!("{sizes:?} t={t} m={m}: visited {:?}", g.visited);
        }
    }
}
