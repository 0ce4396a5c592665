//! Path optimization over the configuration graph, the job partition built
//! from the chosen path, and the full scheme.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Zero;

use crate::config::{config_compare, extract_sets, weights, Config};
use crate::error::Error;
use crate::graph::{finish_time, plain_ratio, ratio, Case, Finish, Graph, Level};
use crate::instance::{Instance, JobPool};
use crate::numerics::{int, rat, Rational};

/// A chosen `m`-path, flattened to one configuration per machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPath {
    /// `configs[i]` belongs to machine `i` (0-based); the last one is hidden.
    pub configs: Vec<Config>,
    pub levels: Vec<Level>,
    /// 1-based switch index.
    pub k: usize,
    pub case: Option<Case>,
    pub makespan: Finish,
}

impl MPath {
    /// The path of a job-free instance.
    pub fn empty(m: usize) -> MPath {
        MPath {
            configs: Vec::new(),
            levels: vec![Level::II; m],
            k: m.saturating_sub(2).max(1),
            case: None,
            makespan: Finish::zero(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}

/// Makespan of a flattened path: max finish time except the switch vertex.
pub fn path_makespan(path: &MPath, speeds: &[Rational], pool: &JobPool) -> Finish {
    let m = path.configs.len();
    let mut best = Finish::zero();
    for (i, c) in path.configs.iter().enumerate() {
        let no_bonus = if path.k + 2 == m { i + 3 >= m } else { i + 1 == path.k };
        let f = if no_bonus {
            plain_ratio(c, &speeds[i], pool)
        } else {
            finish_time(c, &speeds[i], pool)
        };
        best = best.max(f);
    }
    best
}

#[derive(Clone, Debug)]
struct Table {
    big_m: Vec<Vec<Finish>>,
    succ: Vec<Vec<Option<usize>>>,
    pred: Vec<Vec<Option<usize>>>,
    d_m: Vec<Finish>,
    d_pred: Vec<Option<usize>>,
}

/// Picks the argmin of `key` over `cands`, ties by `tie`.
fn pick<K: Ord>(cands: impl Iterator<Item = usize>, key: impl Fn(usize) -> K, tie: impl Fn(usize, usize) -> Ordering) -> Option<usize> {
    let mut best: Option<(K, usize)> = None;
    for c in cands {
        let k = key(c);
        best = match best {
            None => Some((k, c)),
            Some((bk, b)) => match k.cmp(&bk).then_with(|| tie(c, b)) {
                Ordering::Less => Some((k, c)),
                _ => Some((bk, b)),
            },
        };
    }
    best.map(|(_, c)| c)
}

fn build_table(g: &Graph, speeds: &[Rational]) -> Table {
    let pool = &*g.pool;
    let m = g.m;
    let plain = g.layers.len();
    let s_last = [&speeds[m - 3], &speeds[m - 2], &speeds[m - 1]];
    let d_opt: Vec<Finish> = g
        .doubles
        .iter()
        .map(|d| {
            let cs = d.configs();
            (0..3).map(|j| finish_time(cs[j], s_last[j], pool)).max().unwrap()
        })
        .collect();
    let mut d_m: Vec<Finish> = g
        .doubles
        .iter()
        .map(|d| {
            let cs = d.configs();
            (0..3).map(|j| plain_ratio(cs[j], s_last[j], pool)).max().unwrap()
        })
        .collect();

    let inf = |n: usize| vec![Finish::Infinite; n];
    let mut opt: Vec<Vec<Finish>> = g.layers.iter().map(|l| inf(l.len())).collect();
    let mut big_m: Vec<Vec<Finish>> = g.layers.iter().map(|l| inf(l.len())).collect();
    let mut succ: Vec<Vec<Option<usize>>> = g.layers.iter().map(|l| vec![None; l.len()]).collect();
    let mut pred: Vec<Vec<Option<usize>>> = g.layers.iter().map(|l| vec![None; l.len()]).collect();

    // backward sweep over level II
    for li in (0..plain).rev() {
        for (vi, v) in g.layers[li].iter().enumerate() {
            if v.level != Level::II {
                continue;
            }
            let cands = g.succ[li][vi].iter().copied();
            let chosen = if li + 1 == plain {
                pick(cands, |d| d_opt[d].clone(), |a, b| g.compare_doubles(a, b))
            } else {
                let next = &g.layers[li + 1];
                let o = &opt[li + 1];
                pick(
                    cands.filter(|&w| next[w].level == Level::II),
                    |w| o[w].clone(),
                    |a, b| config_compare(&next[a].alpha, &next[b].alpha, pool),
                )
            };
            succ[li][vi] = chosen;
            let next_opt = match chosen {
                None => Finish::Infinite,
                Some(w) if li + 1 == plain => d_opt[w].clone(),
                Some(w) => opt[li + 1][w].clone(),
            };
            let s = &speeds[li];
            opt[li][vi] = finish_time(&v.alpha, s, pool).max(next_opt.clone());
            big_m[li][vi] = plain_ratio(&v.alpha, s, pool).max(next_opt);
        }
    }

    // forward sweep over level I
    let mut d_pred = vec![None; g.doubles.len()];
    if plain > 0 {
        for (vi, v) in g.layers[0].iter().enumerate() {
            if v.level == Level::I {
                opt[0][vi] = finish_time(&v.alpha, &speeds[0], pool);
            }
        }
        for li in 1..=plain {
            // reverse adjacency from level-I vertices of layer li-1
            let target_len = if li == plain { g.doubles.len() } else { g.layers[li].len() };
            let mut preds: Vec<Vec<usize>> = vec![Vec::new(); target_len];
            for (ui, u) in g.layers[li - 1].iter().enumerate() {
                if u.level == Level::I {
                    for &w in &g.succ[li - 1][ui] {
                        preds[w].push(ui);
                    }
                }
            }
            let prev = &g.layers[li - 1];
            let prev_opt = opt[li - 1].clone();
            for (wi, list) in preds.iter().enumerate() {
                let chosen = pick(
                    list.iter().copied(),
                    |u| prev_opt[u].clone(),
                    |a, b| config_compare(&prev[a].alpha, &prev[b].alpha, pool),
                );
                let p_opt = chosen.map_or(Finish::Infinite, |u| prev_opt[u].clone());
                if li == plain {
                    d_pred[wi] = chosen;
                    d_m[wi] = d_m[wi].clone().max(p_opt);
                } else {
                    pred[li][wi] = chosen;
                    let w = &g.layers[li][wi];
                    match w.level {
                        Level::I => opt[li][wi] = finish_time(&w.alpha, &speeds[li], pool).max(p_opt),
                        Level::II => big_m[li][wi] = big_m[li][wi].clone().max(p_opt),
                    }
                }
            }
        }
    }
    Table {
        big_m,
        succ,
        pred,
        d_m,
        d_pred,
    }
}

/// Second-largest of three values after the largest.
fn top_two(mut v: [Finish; 3]) -> (Finish, Finish) {
    v.sort();
    (v[2].clone(), v[1].clone())
}

/// Selects the optimal `m`-path.
pub fn optpath(g: &Graph, speeds: &[Rational]) -> Result<MPath, Error> {
    let pool = &*g.pool;
    let m = g.m;
    if pool.n() == 0 {
        return Ok(MPath::empty(m));
    }
    let t = build_table(g, speeds);
    let plain = g.layers.len();

    let mut best = Finish::Infinite;
    for li in 0..plain {
        for (vi, v) in g.layers[li].iter().enumerate() {
            if v.level == Level::II {
                best = best.min(t.big_m[li][vi].clone());
            }
        }
    }
    for f in &t.d_m {
        best = best.min(f.clone());
    }
    if best == Finish::Infinite {
        return Err(Error::NoPath);
    }

    let s_last = [&speeds[m - 3], &speeds[m - 2], &speeds[m - 1]];
    let doubles_at_best: Vec<usize> = (0..g.doubles.len()).filter(|&d| t.d_m[d] == best).collect();
    let mut configs: Vec<Config> = Vec::new();
    let mut levels = Vec::new();
    let (k, case) = if !doubles_at_best.is_empty() {
        let any_a = doubles_at_best.iter().any(|&d| g.doubles[d].case == Case::A);
        let chosen = if any_a {
            let group_key = |d: usize| {
                let x = &g.doubles[d];
                (
                    x.first.without_tiny(),
                    x.second.without_tiny(),
                    x.hidden.tail.tiny - x.first.head.tiny,
                )
            };
            let cands: Vec<usize> = doubles_at_best.iter().copied().filter(|&d| g.doubles[d].case == Case::A).collect();
            let cmp_key = |a: &(Config, Config, u32), b: &(Config, Config, u32)| {
                config_compare(&a.0, &b.0, pool)
                    .then_with(|| config_compare(&a.1, &b.1, pool))
                    .then_with(|| a.2.cmp(&b.2))
            };
            let mut key = group_key(cands[0]);
            for &d in &cands[1..] {
                let k2 = group_key(d);
                if cmp_key(&k2, &key) == Ordering::Less {
                    key = k2;
                }
            }
            let group: Vec<usize> = cands.into_iter().filter(|&d| group_key(d) == key).collect();
            pick(
                group.into_iter(),
                |d| {
                    let cs = g.doubles[d].configs();
                    let r = [0, 1, 2].map(|j| plain_ratio(cs[j], s_last[j], pool));
                    (top_two(r), cs[0].blocks(), cs[1].blocks())
                },
                |a, b| g.compare_doubles(a, b),
            )
            .expect("nonempty group")
        } else {
            pick(
                doubles_at_best.iter().copied(),
                |d| {
                    let x = &g.doubles[d];
                    core::cmp::Reverse(weights(&x.second, pool).total() + weights(&x.hidden, pool).total())
                },
                |a, b| g.compare_doubles(a, b),
            )
            .expect("nonempty")
        };
        let d = &g.doubles[chosen];
        // prefix through level-I predecessors
        let mut prefix = Vec::new();
        let mut cur = t.d_pred[chosen];
        let mut li = plain;
        while li > 0 {
            let u = cur.expect("switch vertex has a level-I prefix");
            prefix.push(g.layers[li - 1][u].alpha.clone());
            li -= 1;
            cur = if li > 0 { t.pred[li][u] } else { None };
        }
        prefix.reverse();
        levels.extend(core::iter::repeat(Level::I).take(prefix.len()));
        configs.extend(prefix);
        configs.push(d.first.clone());
        configs.push(d.second.clone());
        configs.push(d.hidden.clone());
        levels.extend([Level::II; 3]);
        (m - 2, Some(d.case))
    } else {
        let mut layer = 0;
        for li in (0..plain).rev() {
            if g.layers[li].iter().enumerate().any(|(vi, v)| v.level == Level::II && t.big_m[li][vi] == best) {
                layer = li;
                break;
            }
        }
        let cands = g.layers[layer]
            .iter()
            .enumerate()
            .filter(|(vi, v)| v.level == Level::II && t.big_m[layer][*vi] == best)
            .map(|(vi, _)| vi);
        let vk = pick(cands, |_| (), |a, b| config_compare(&g.layers[layer][a].alpha, &g.layers[layer][b].alpha, pool))
            .expect("nonempty");
        let mut prefix = Vec::new();
        let mut cur = t.pred[layer][vk];
        let mut li = layer;
        while li > 0 {
            let u = cur.expect("switch vertex has a level-I prefix");
            prefix.push(g.layers[li - 1][u].alpha.clone());
            li -= 1;
            cur = if li > 0 { t.pred[li][u] } else { None };
        }
        prefix.reverse();
        levels.extend(core::iter::repeat(Level::I).take(prefix.len()));
        configs.extend(prefix);
        configs.push(g.layers[layer][vk].alpha.clone());
        levels.push(Level::II);
        let mut cur = vk;
        let mut li = layer;
        loop {
            let next = t.succ[li][cur].expect("switch vertex has a suffix");
            if li + 1 == plain {
                let d = &g.doubles[next];
                configs.push(d.first.clone());
                configs.push(d.second.clone());
                configs.push(d.hidden.clone());
                levels.extend([Level::II; 3]);
                break (layer + 1, Some(d.case));
            }
            li += 1;
            cur = next;
            configs.push(g.layers[li][cur].alpha.clone());
            levels.push(Level::II);
        }
    };
    Ok(MPath {
        configs,
        levels,
        k,
        case,
        makespan: best,
    })
}

/// Jobs of `alpha` without blocks: `L_alpha` plus the non-tiny small jobs.
pub fn tilde_jobs(alpha: &Config, pool: &JobPool) -> Vec<usize> {
    let sets = extract_sets(alpha, pool);
    let mut v = sets.large;
    v.extend(sets.small);
    v
}

/// Tiny block work `W_i` of a configuration.
pub fn block_work(alpha: &Config, pool: &JobPool) -> Rational {
    weights(alpha, pool).block_work()
}

/// Whether the switch machine is filled low: `|alpha_k| / s_k <= (1 - eps/2) M`.
pub fn is_low(alpha_k: &Config, s_k: &Rational, makespan: &Finish, pool: &JobPool) -> bool {
    let eps = &pool.params.epsilon;
    match makespan {
        Finish::Infinite => true,
        Finish::Finite(mq) => {
            let bound = (int(1) - eps / int(2)) * mq;
            plain_ratio(alpha_k, s_k, pool) <= Finish::Finite(bound)
        }
    }
}

/// Output of the partition step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub sets: Vec<Vec<usize>>,
    /// LOW or HIGH for a switch below `m-2`; `None` otherwise.
    pub low: Option<bool>,
    /// Corrections of the last three machines that could not be met.
    pub diagnostics: Vec<alloc::string::String>,
}

fn prefix_sums(t: &[usize], pool: &JobPool) -> Vec<Rational> {
    let mut out = Vec::with_capacity(t.len() + 1);
    out.push(Rational::zero());
    for &id in t {
        let next = out.last().unwrap() + pool.size(id);
        out.push(next);
    }
    out
}

/// Distributes the jobs according to a path.
pub fn partition(path: &MPath, speeds: &[Rational], pool: &JobPool) -> Partition {
    let m = speeds.len();
    if path.is_empty() {
        return Partition {
            sets: vec![Vec::new(); m],
            low: None,
            diagnostics: Vec::new(),
        };
    }
    let mut sets: Vec<Vec<usize>> = path.configs.iter().map(|c| tilde_jobs(c, pool)).collect();
    let mut used = vec![false; pool.n()];
    for s in &sets {
        for &id in s {
            used[id] = true;
        }
    }
    let mut tiny: Vec<usize> = (0..pool.n()).filter(|&id| !used[id]).collect();
    tiny.sort_by(|&a, &b| pool.size(a).cmp(pool.size(b)).then(a.cmp(&b)));
    let pre = prefix_sums(&tiny, pool);
    let mut diagnostics = Vec::new();
    let mut low = None;

    if path.k + 2 == m {
        let cuts = last_three_cuts(path, speeds, pool, &pre, &mut diagnostics);
        let (a, b) = cuts;
        sets[m - 3].extend_from_slice(&tiny[..a]);
        sets[m - 2].extend_from_slice(&tiny[a..b]);
        sets[m - 1].extend_from_slice(&tiny[b..]);
    } else {
        let k = path.k - 1;
        let is_l = is_low(&path.configs[k], &speeds[k], &path.makespan, pool);
        low = Some(is_l);
        let mut w = Rational::zero();
        let mut r = 0usize;
        for i in k..m - 1 {
            w += block_work(&path.configs[i], pool);
            let u = if is_l {
                // minimal u with prefix >= W, capped
                (0..pre.len()).find(|&u| pre[u] >= w).unwrap_or(tiny.len())
            } else {
                (0..pre.len()).rev().find(|&u| pre[u] <= w).unwrap_or(0)
            };
            let u = u.max(r);
            sets[i].extend_from_slice(&tiny[r..u]);
            r = u;
        }
        sets[m - 1].extend_from_slice(&tiny[r..]);
    }
    for s in &mut sets {
        s.sort_unstable();
    }
    Partition { sets, low, diagnostics }
}

/// Cut points `(a, b)` of the ascending tiny list among the last three machines.
fn last_three_cuts(
    path: &MPath,
    speeds: &[Rational],
    pool: &JobPool,
    pre: &[Rational],
    diagnostics: &mut Vec<alloc::string::String>,
) -> (usize, usize) {
    let m = speeds.len();
    let n = pre.len() - 1;
    let cs = [&path.configs[m - 3], &path.configs[m - 2], &path.configs[m - 1]];
    let ss = [&speeds[m - 3], &speeds[m - 2], &speeds[m - 1]];
    let tilde: [Rational; 3] = cs.map(|c| weights(c, pool).tilde());
    let load = |a: usize, b: usize| -> [Rational; 3] {
        [
            &tilde[0] + &pre[a],
            &tilde[1] + &(&pre[b] - &pre[a]),
            &tilde[2] + &(&pre[n] - &pre[b]),
        ]
    };
    let first_free = match path.case {
        Some(Case::A) => cs[0].tail.tiny == 0,
        _ => cs[0].tail.is_content_empty(),
    };
    if first_free {
        // exact two-machine split on (m-1, m)
        let mut best: Option<((Finish, bool), usize)> = None;
        for b in 0..=n {
            let q = load(0, b);
            let ms = ratio(&q[1], ss[1]).max(ratio(&q[2], ss[2]));
            let key = (ms, q[1] > q[2]);
            if best.as_ref().map_or(true, |(bk, _)| key < *bk) {
                best = Some((key, b));
            }
        }
        return (0, best.expect("n >= 0").1);
    }

    let caps: [Rational; 3] = cs.map(|c| block_work(c, pool));
    let ga = (0..=n).rev().find(|&a| pre[a] <= caps[0]).unwrap_or(0);
    let gb = (ga..=n).rev().find(|&b| &pre[b] - &pre[ga] <= caps[1]).unwrap_or(ga);

    let alpha_r: [Finish; 3] = [0, 1, 2].map(|j| plain_ratio(cs[j], ss[j], pool));
    let local_m = alpha_r.iter().max().unwrap().clone();
    let eps = &pool.params.epsilon;
    let scaled = |f: Rational| match &local_m {
        Finish::Finite(x) => Finish::Finite(f * x),
        Finish::Infinite => Finish::Infinite,
    };
    let low_bound = scaled(int(1) - eps * rat(2, 3));
    let high_bound = scaled(int(1) - eps / int(2));
    let low: [bool; 3] = [0, 1, 2].map(|j| alpha_r[j] <= low_bound);
    let high: [bool; 3] = [0, 1, 2].map(|j| alpha_r[j] >= high_bound);
    let totals: [Rational; 3] = cs.map(|c| weights(c, pool).total());
    let n_low = low.iter().filter(|&&x| x).count();
    let n_high = high.iter().filter(|&&x| x).count();
    let six: [Rational; 3] = cs.map(|c| c.block_size(&pool.params) * int(6));

    let violations = |a: usize, b: usize| -> u32 {
        let q = load(a, b);
        let tiny_work = [pre[a].clone(), &pre[b] - &pre[a], &pre[n] - &pre[b]];
        let mut v = 0;
        if n_low == 1 && n_high == 2 {
            let i = low.iter().position(|&x| x).unwrap();
            if q[i] < totals[i] {
                v += 1;
            }
        }
        if 3 - n_high == 2 {
            for i in 0..3 {
                if !high[i] && tiny_work[i] < six[i] {
                    v += 1;
                }
            }
        }
        v
    };
    let mut best: Option<((u32, bool, Finish, usize, usize, usize), (usize, usize))> = None;
    for a in 0..=n {
        for b in a..=n {
            let q = load(a, b);
            let monotone = q[0] <= q[1] && q[1] <= q[2];
            let overflow = match &path.makespan {
                Finish::Finite(mq) => (0..3)
                    .map(|j| match ratio(&q[j], ss[j]) {
                        Finish::Finite(r) if &r > mq => Finish::Finite(r - mq),
                        Finish::Finite(_) => Finish::zero(),
                        Finish::Infinite => Finish::Infinite,
                    })
                    .max()
                    .unwrap(),
                Finish::Infinite => Finish::zero(),
            };
            let dist = a.abs_diff(ga) + b.abs_diff(gb);
            let key = (violations(a, b), !monotone, overflow, dist, a, b);
            if best.as_ref().map_or(true, |(bk, _)| key < *bk) {
                best = Some((key, (a, b)));
            }
        }
    }
    let (key, cuts) = best.expect("at least one cut pair");
    if key.0 > 0 {
        diagnostics.push(alloc::format!("{} correction(s) on the last three machines unmet", key.0));
    }
    if key.1 {
        diagnostics.push("last three workloads not monotone".into());
    }
    cuts
}

/// Result of the whole scheme on an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    /// Job ids per input machine.
    pub assignment: Vec<Vec<usize>>,
    /// Workload per input machine.
    pub workloads: Vec<Rational>,
    pub path: MPath,
    pub partition: Partition,
    /// Sorted sets `P_i` per internal (sorted, padded) machine.
    pub sorted_sets: Vec<Vec<usize>>,
    /// `order[i]`: partition index whose set became `sorted_sets[i]`.
    pub order: Vec<usize>,
    /// Makespan of the output on the raw input speeds.
    pub achieved: Rational,
    pub visited: Vec<usize>,
}

impl Schedule {
    /// Path makespan `M(Q)`; counts the blocks of the last three configurations.
    pub fn makespan(&self) -> &Finish {
        &self.path.makespan
    }
}

/// Runs the scheme with a prebuilt graph for the instance's pool and machine count.
pub fn ptas_with_graph(inst: &Instance, g: &Graph) -> Result<Schedule, Error> {
    let pool = &*inst.pool;
    let path = optpath(g, &inst.speeds)?;
    let part = partition(&path, &inst.speeds, pool);
    let mut order: Vec<usize> = (0..inst.m()).collect();
    let w: Vec<Rational> = part.sets.iter().map(|s| pool.weight_of(s)).collect();
    order.sort_by(|&a, &b| w[a].cmp(&w[b]).then(a.cmp(&b)));
    let sorted_sets: Vec<Vec<usize>> = order.iter().map(|&i| part.sets[i].clone()).collect();
    let mut assignment = vec![Vec::new(); inst.input_machines];
    for (i, set) in sorted_sets.iter().enumerate() {
        match inst.origin[i] {
            Some(o) => assignment[o] = set.clone(),
            None if set.is_empty() => {}
            None => return Err(Error::Precondition("a padding machine received jobs".into())),
        }
    }
    let workloads: Vec<Rational> = assignment.iter().map(|s| pool.weight_of(s)).collect();
    let mut achieved = Rational::zero();
    for (w, s) in workloads.iter().zip(inst.input_speeds()) {
        if w.is_zero() {
            continue;
        }
        if s.is_zero() {
            return Err(Error::Precondition("a speed-0 machine received jobs".into()));
        }
        achieved = achieved.max(w / s);
    }
    Ok(Schedule {
        assignment,
        workloads,
        path,
        partition: part,
        sorted_sets,
        order,
        achieved,
        visited: g.visited.clone(),
    })
}

/// Runs the scheme, building the graph.
pub fn ptas(inst: &Instance) -> Result<Schedule, Error> {
    let g = Graph::new(inst.pool.clone(), inst.m());
    ptas_with_graph(inst, &g)
}
