//! Minimum makespan over every `m`-path, by explicit enumeration.

use alloc::vec::Vec;

use crate::graph::{Finish, Graph, Level};
use crate::numerics::Rational;
use crate::solver::{path_makespan, MPath};

/// Number of paths above which enumeration gives up.
pub const PATH_LIMIT: u64 = 5_000_000;

fn evaluate(g: &Graph, speeds: &[Rational], plain: &[(usize, usize)], d: usize, best: &mut Finish) {
    let m = g.m;
    let dv = &g.doubles[d];
    let mut configs = Vec::with_capacity(m);
    let mut levels = Vec::with_capacity(m);
    for &(layer, v) in plain {
        let p = &g.layers[layer][v];
        configs.push(p.alpha.clone());
        levels.push(p.level);
    }
    for c in dv.configs() {
        configs.push(c.clone());
        levels.push(Level::II);
    }
    let k = levels.iter().position(|&l| l == Level::II).map_or(m - 2, |i| i + 1).min(m - 2);
    let path = MPath {
        configs,
        levels,
        k,
        case: Some(dv.case),
        makespan: Finish::Infinite,
    };
    let f = path_makespan(&path, speeds, &g.pool);
    if f < *best {
        *best = f;
    }
}

fn walk(g: &Graph, speeds: &[Rational], plain: &mut Vec<(usize, usize)>, best: &mut Finish, count: &mut u64) -> bool {
    let depth = plain.len();
    let &(layer, v) = plain.last().expect("nonempty prefix");
    let plain_count = g.m - 3;
    for &next in &g.succ[layer][v] {
        if depth == plain_count {
            *count += 1;
            if *count > PATH_LIMIT {
                return false;
            }
            evaluate(g, speeds, plain, next, best);
        } else {
            plain.push((depth, next));
            let ok = walk(g, speeds, plain, best, count);
            plain.pop();
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Smallest path makespan, `None` when the enumeration limit is hit.
/// An empty graph yields `Finish::Infinite`.
pub fn min_path_makespan(g: &Graph, speeds: &[Rational]) -> Option<Finish> {
    let mut best = Finish::Infinite;
    let mut count = 0u64;
    if g.m == 3 {
        for d in 0..g.doubles.len() {
            evaluate(g, speeds, &[], d, &mut best);
        }
        return Some(best);
    }
    let Some(first) = g.layers.first() else {
        return Some(best);
    };
    for v in 0..first.len() {
        let mut plain = alloc::vec![(0usize, v)];
        if !walk(g, speeds, &mut plain, &mut best, &mut count) {
            return None;
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::numerics::int;
    use crate::solver::optpath;

    fn agree(sizes: &[i64], speeds: &[i64], t: u32) {
        let sizes: Vec<Rational> = sizes.iter().map(|&x| int(x)).collect();
        let speeds: Vec<Rational> = speeds.iter().map(|&x| int(x)).collect();
        let inst = Instance::new(&sizes, &speeds, int(1), t).unwrap();
        let g = Graph::new(inst.pool.clone(), inst.m());
        let brute = min_path_makespan(&g, &inst.speeds).unwrap();
        match optpath(&g, &inst.speeds) {
            Ok(p) => assert_eq!(p.makespan, brute, "sizes {sizes:?} speeds {speeds:?}"),
            Err(_) => assert_eq!(brute, Finish::Infinite),
        }
    }

    #[test]
    fn optpath_matches_enumeration() {
        agree(&[2, 2], &[1, 2, 4], 1);
        agree(&[4, 4, 4], &[1, 1, 1], 1);
        agree(&[4, 4, 4], &[1, 1, 1, 2], 1);
        agree(&[1, 2, 4], &[1, 2, 2, 4], 1);
        agree(&[8, 1], &[1, 1, 1], 1);
    }
}
