//! Translation of an allocation into an `m`-path of the graph.
//!
//! Jobs at or below a machine's tiny threshold become blocks; every other job
//! is counted into cumulative size vectors along the fixed class order. Each
//! configuration is checked with the same predicates the graph uses, so a
//! failure names the rule the allocation could not meet.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::canonical::Part;
use crate::config::{
    find_mu, in_scale, scale_template, shape_for, tiny_bound, validate, Config, Entry, ScaleStep, Shape, SizeVector,
};
use crate::graph::{check_tail_case, hidden_config, hidden_is_valid, large_weight, v3_bound, Case, Finish, Level};
use crate::instance::{magnitude_exponent, JobPool};
use crate::numerics::{floor_int, rat, Rational};
use crate::solver::{path_makespan, MPath};

/// Why an allocation has no path encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodeFailure {
    pub machine: usize,
    pub clause: String,
}

impl fmt::Display for EncodeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "machine {}: {}", self.machine, self.clause)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoded {
    pub path: MPath,
    /// Blocks moved to the last machine to meet block bounds.
    pub pushed_blocks: u32,
}

fn fail<T>(machine: usize, clause: impl Into<String>) -> Result<T, EncodeFailure> {
    Err(EncodeFailure {
        machine,
        clause: clause.into(),
    })
}

struct Counts {
    large: Vec<u32>,
    small: Vec<u32>,
}

/// Vector for the given frame from cumulative per-class counts.
fn vector(pool: &JobPool, lambda: i64, top: i64, mu: i64, c: &Counts, x: &[u32], tiny: u32) -> SizeVector {
    let entries = pool
        .indexing
        .slots
        .iter()
        .enumerate()
        .map(|(s, slot)| match shape_for(slot.l, lambda, top, mu) {
            Shape::Absent => Entry::Absent,
            Shape::Scalar => Entry::Scalar(c.large[s] + c.small[s]),
            Shape::Triple => Entry::Triple(c.large[s], x[s], x[s] + c.small[s]),
        })
        .collect();
    SizeVector { tiny, entries }
}

/// Encodes a canonical allocation given per internal machine (ascending speed, padded).
pub fn encode_path(parts: &[Part], speeds: &[Rational], pool: &JobPool) -> Result<Encoded, EncodeFailure> {
    let m = parts.len();
    assert!(m >= 3 && speeds.len() == m, "need at least three machines");
    let p = &pool.params;
    let Some(z_min) = pool.z_min() else {
        return Ok(Encoded {
            path: MPath::empty(m),
            pushed_blocks: 0,
        });
    };
    let k = p.rho_shift;
    let slot_of = |id: usize| pool.indexing.slot_of(pool.jobs[id].class).expect("job class has a slot");

    // magnitudes: largest job so far
    let mut z = vec![z_min; m];
    let mut cur = z_min;
    for (i, part) in parts.iter().enumerate() {
        for id in part.jobs() {
            cur = cur.max(magnitude_exponent(&pool.jobs[id].size));
        }
        z[i] = cur;
    }
    let mut zb = z.clone();
    if z[m - 2] - z[m - 3] < 2 * k {
        zb[m - 2] = z[m - 3];
    }
    zb[m - 1] = zb[m - 2];
    let lambda: Vec<i64> = zb.iter().map(|&b| p.lambda(b)).collect();

    // non-tiny jobs and tiny work per machine
    let mut large: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut small: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut tiny_work: Vec<Rational> = Vec::with_capacity(m);
    for (i, part) in parts.iter().enumerate() {
        let big = |id: &usize| pool.jobs[*id].class > lambda[i];
        large.push(part.large.iter().copied().filter(big).collect());
        small.push(part.small.iter().copied().filter(big).collect());
        tiny_work.push(pool.weight_of(&part.jobs().into_iter().filter(|id| !big(id)).collect::<Vec<_>>()));
    }
    let mut x = vec![0u32; pool.indexing.len()];
    for l in &large {
        for &id in l {
            x[slot_of(id)] += 1;
        }
    }

    let mut counts = Counts {
        large: vec![0; pool.indexing.len()],
        small: vec![0; pool.indexing.len()],
    };
    let mut configs: Vec<Config> = Vec::with_capacity(m);
    let mut levels: Vec<Level> = Vec::with_capacity(m);
    let mut pushed = 0u32;
    let mut switch: Option<usize> = None;
    for i in 0..m - 1 {
        let top = p.big_lambda(z[i]);
        let lw = pool.weight_of(&large[i]);
        let prev_mu = configs.last().map(|c| c.mu);
        let mu = if lw.is_zero() {
            if !small[i].is_empty() || !tiny_work[i].is_zero() {
                return fail(i, "(C5): small or tiny jobs without large jobs");
            }
            prev_mu.unwrap_or(lambda[i] + 1).max(lambda[i] + 1)
        } else {
            match find_mu(&lw, lambda[i], top, p) {
                Some(mu) => mu,
                None => return fail(i, "(C5): no middle class fits |L|"),
            }
        };

        let head_tiny = match configs.last() {
            None => 0,
            Some(prev) => {
                let step = ScaleStep { z: z[i], zb: zb[i], mu };
                match scale_template(prev, step, pool) {
                    Some(t) => t.tiny,
                    None => return fail(i, "(S): no scaled head exists"),
                }
            }
        };
        let head = vector(pool, lambda[i], top, mu, &counts, &x, head_tiny);
        for &id in &large[i] {
            counts.large[slot_of(id)] += 1;
        }
        for &id in &small[i] {
            counts.small[slot_of(id)] += 1;
        }
        let block = p.block_size(zb[i]);
        let blocks = floor_int(&(&tiny_work[i] / &block + rat(1, 2)));
        let blocks: u32 = u32::try_from(blocks).unwrap_or(u32::MAX);
        let mut tail_tiny = head_tiny.saturating_add(blocks);
        let level_two = switch.is_some() || !small[i].is_empty() || blocks > 0 || i + 3 >= m;
        let mut cap = tiny_bound(pool, zb[i]);
        if level_two && i + 3 < m {
            cap = cap.min(v3_bound(pool, zb[i], head_tiny));
        }
        if tail_tiny > cap {
            pushed += tail_tiny - cap.max(head_tiny);
            tail_tiny = cap.max(head_tiny);
        }
        let tail = vector(pool, lambda[i], top, mu, &counts, &x, tail_tiny);
        let alpha = Config {
            z: z[i],
            mu,
            zb: zb[i],
            top,
            head,
            tail,
        };

        let report = validate(&alpha, pool);
        if let Some((clause, why)) = report.violations.first() {
            return fail(i, format!("{clause:?}: {why}"));
        }
        match configs.last() {
            None => {
                if alpha.head.tiny != 0 || !alpha.head.is_content_empty() {
                    return fail(i, "(V1): first head is not empty");
                }
            }
            Some(prev) => {
                if !in_scale(prev, &alpha, pool) {
                    return fail(i, "(S): head is not a scaled previous tail");
                }
                if large_weight(prev, pool) > large_weight(&alpha, pool) {
                    return fail(i, "edge: |L| decreases");
                }
            }
        }
        if level_two && switch.is_none() {
            switch = Some(i);
        }
        levels.push(if level_two { Level::II } else { Level::I });
        configs.push(alpha);
    }

    let second = &configs[m - 2];
    let hidden = hidden_config(second, pool);
    if !hidden_is_valid(&hidden, pool) {
        return fail(m - 1, "hidden configuration is invalid");
    }
    if large_weight(second, pool) > large_weight(&hidden, pool) {
        return fail(m - 1, "edge: |L| decreases into the hidden configuration");
    }
    let case: Option<Case> = check_tail_case(&configs[m - 3], second, &hidden, pool);
    if case.is_none() {
        return fail(m - 2, "tail case: neither case holds");
    }
    configs.push(hidden);
    levels.push(Level::II);
    let mut path = MPath {
        configs,
        levels,
        k: switch.map_or(m - 2, |s| s + 1).min(m - 2),
        case,
        makespan: Finish::zero(),
    };
    path.makespan = path_makespan(&path, speeds, pool);
    Ok(Encoded {
        path,
        pushed_blocks: pushed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::numerics::int;

    #[test]
    fn empty_allocation() {
        let inst = Instance::new(&[], &[int(1)], int(1), 1).unwrap();
        let parts = vec![Part::default(); 3];
        let e = encode_path(&parts, &inst.speeds, &inst.pool).unwrap();
        assert!(e.path.is_empty());
    }

    #[test]
    fn one_job_per_machine() {
        let inst = Instance::new(&[int(4), int(4), int(4)], &[int(1), int(1), int(1)], int(1), 1).unwrap();
        let parts: Vec<Part> = (0..3)
            .map(|i| Part {
                large: vec![i],
                small: vec![],
            })
            .collect();
        let e = encode_path(&parts, &inst.speeds, &inst.pool).unwrap();
        assert_eq!(e.pushed_blocks, 0);
        assert_eq!(e.path.configs.len(), 3);
    }
}
