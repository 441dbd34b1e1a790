//! Test oracles that share no code with the library: `i128` fractions,
//! basis enumeration, and `i(s)` computed from its definition.

#![allow(dead_code)]

use kelleyscope::algebra::{Family, GroundSet};
use kelleyscope::generators::{generate, InstanceKind, InstanceSpec};
use kelleyscope::Rational;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Ratio<i128>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn to_rational(x: Q) -> Rational {
    Rational::new(*x.numer() as i64, *x.denom() as i64)
}

/// Solve `B z = rhs` by Gauss-Jordan; `None` if singular.
pub fn solve_square(mut mat: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Option<Vec<Q>> {
    let k = rhs.len();
    for col in 0..k {
        let p = (col..k).find(|&r| mat[r][col] != q(0))?;
        mat.swap(col, p);
        rhs.swap(col, p);
        let inv = q(1) / mat[col][col];
        for j in 0..k {
            mat[col][j] *= inv;
        }
        rhs[col] *= inv;
        for r in 0..k {
            if r != col && mat[r][col] != q(0) {
                let f = mat[r][col];
                for j in 0..k {
                    let v = mat[col][j];
                    mat[r][j] -= f * v;
                }
                let v = rhs[col];
                rhs[r] -= f * v;
            }
        }
    }
    Some(rhs)
}

pub fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(
        n: usize,
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(n, k, i + 1, cur, visit);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut Vec::new(), &mut visit);
}

/// Row-reduces `[A | b]` (given column-wise) and keeps only independent
/// rows; callers pass feasible systems, so dependent rows are redundant.
pub fn drop_dependent_rows(cols: Vec<Vec<Q>>, rhs: Vec<Q>) -> (Vec<Vec<Q>>, Vec<Q>) {
    let m = rhs.len();
    let mut rows: Vec<Vec<Q>> = (0..m)
        .map(|i| cols.iter().map(|c| c[i]).chain([rhs[i]]).collect())
        .collect();
    let width = cols.len();
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..m).find(|&r| rows[r][col] != q(0)) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..m {
            if r != rank && rows[r][col] != q(0) {
                let f = rows[r][col] / rows[rank][col];
                for j in 0..=width {
                    let v = rows[rank][j];
                    rows[r][j] -= f * v;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    let new_cols = (0..width)
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect();
    let new_rhs = rows.iter().map(|r| r[width]).collect();
    (new_cols, new_rhs)
}

/// Optimum of `max c.z` over `{z >= 0 : A z = b}` (columns given), by
/// enumerating every basis. `None` when infeasible.
pub fn best_basic_solution(cols: Vec<Vec<Q>>, rhs: Vec<Q>, c: &[Q], maximize: bool) -> Option<Q> {
    let (cols, rhs) = drop_dependent_rows(cols, rhs);
    let m = rhs.len();
    let mut best: Option<Q> = None;
    combinations(cols.len(), m, |basis| {
        let mat: Vec<Vec<Q>> = (0..m)
            .map(|i| basis.iter().map(|&j| cols[j][i]).collect())
            .collect();
        let Some(z) = solve_square(mat, rhs.clone()) else {
            return;
        };
        if z.iter().any(|v| *v < q(0)) {
            return;
        }
        let obj: Q = basis.iter().zip(&z).map(|(&j, v)| c[j] * v).sum();
        best = Some(match best {
            None => obj,
            Some(b) if maximize => b.max(obj),
            Some(b) => b.min(obj),
        });
    });
    best
}

pub fn lists(f: &Family) -> Vec<Vec<usize>> {
    f.to_file().elements
}

/// Sequence side by basis enumeration: minimize `t` over weightings `w` of
/// the family with every atom's load at most `t`. Slack form columns are
/// `w_a`, `t` (nonnegative here since loads are), and one slack per atom.
pub fn vertex_inum(f: &Family) -> Rational {
    let n = f.ground().size();
    let els = lists(f);
    let m = els.len();
    // Rows: one per atom (load - t + slack = 0), then sum w = 1.
    let rows = n + 1;
    let mut cols: Vec<Vec<Q>> = Vec::new();
    for e in &els {
        let mut col = vec![q(0); rows];
        for &x in e {
            col[x] = q(1);
        }
        col[n] = q(1);
        cols.push(col);
    }
    let mut t = vec![q(-1); rows];
    t[n] = q(0);
    cols.push(t);
    for x in 0..n {
        let mut s = vec![q(0); rows];
        s[x] = q(1);
        cols.push(s);
    }
    let mut rhs = vec![q(0); rows];
    rhs[n] = q(1);
    let mut c = vec![q(0); cols.len()];
    c[m] = q(1);
    to_rational(best_basic_solution(cols, rhs, &c, false).expect("uniform weights are feasible"))
}

/// `i(s)` from its definition: the largest total multiplicity of a
/// sub-multiset whose members have a common point.
pub fn definitional_index(els: &[Vec<usize>], ground: usize, counts: &[u64]) -> u64 {
    let support: Vec<usize> = (0..els.len()).filter(|&i| counts[i] > 0).collect();
    let mut best = 0;
    for mask in 1u32..(1 << support.len()) {
        let mut common = vec![true; ground];
        let mut mult = 0;
        for (b, &i) in support.iter().enumerate() {
            if mask & (1 << b) != 0 {
                mult += counts[i];
                let mut inside = vec![false; ground];
                for &x in &els[i] {
                    inside[x] = true;
                }
                for x in 0..ground {
                    common[x] &= inside[x];
                }
            }
        }
        if common.iter().any(|c| *c) {
            best = best.max(mult);
        }
    }
    best
}

/// Minimum of `i(s)/|s|` over all sequences of length `1..=max_len`.
pub fn definitional_bruteforce(f: &Family, max_len: u64) -> Rational {
    let els = lists(f);
    let ground = f.ground().size();
    let mut counts = vec![0u64; els.len()];
    let mut best: Option<(u64, u64)> = None;
    fn rec(pos: usize, left: u64, counts: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
        if pos == counts.len() {
            visit(counts);
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            rec(pos + 1, left - c, counts, visit);
        }
        counts[pos] = 0;
    }
    rec(0, max_len, &mut counts, &mut |cs| {
        let total: u64 = cs.iter().sum();
        if total == 0 {
            return;
        }
        let i = definitional_index(&els, ground, cs);
        if best.is_none_or(|(bi, bt)| i * bt < bi * total) {
            best = Some((i, total));
        }
    });
    let (i, t) = best.expect("family is nonempty");
    Rational::new(i as i64, t as i64)
}

/// Fewest blocks of a partition of `f` with every block's intersection
/// number (by [`vertex_inum`]) above `1 - eps`. Covers can be shrunk to
/// partitions without losing feasibility, so this is the minimum cover.
///
/// Elements are placed one at a time; a partial partition is abandoned as
/// soon as a block fails, which is sound because subfamilies of feasible
/// blocks are feasible.
pub fn exhaustive_mn(f: &Family, eps: &Rational) -> usize {
    let delta = Rational::one() - eps;
    let els = lists(f);
    let n = f.ground().size();
    let feasible = |block: &[usize]| -> bool {
        let mut common = vec![true; n];
        for &i in block {
            let mut inside = vec![false; n];
            for &x in &els[i] {
                inside[x] = true;
            }
            for x in 0..n {
                common[x] &= inside[x];
            }
        }
        if common.iter().any(|c| *c) {
            // Centered: I = 1.
            return Rational::one() > delta;
        }
        let disjoint_pair = block.iter().enumerate().any(|(x, &a)| {
            block[x + 1..]
                .iter()
                .any(|&b| !els[a].iter().any(|p| els[b].contains(p)))
        });
        if disjoint_pair && delta >= Rational::new(1, 2) {
            // Two disjoint members repeated once each give i(s)/|s| = 1/2.
            return false;
        }
        vertex_inum(&f.subfamily(block).unwrap()) > delta
    };
    struct S<'a> {
        m: usize,
        best: usize,
        cache: std::collections::HashMap<Vec<usize>, bool>,
        feasible: &'a dyn Fn(&[usize]) -> bool,
    }
    fn rec(s: &mut S, i: usize, blocks: &mut Vec<Vec<usize>>) {
        if blocks.len() >= s.best {
            return;
        }
        if i == s.m {
            s.best = blocks.len();
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            let key = blocks[b].clone();
            let feasible = s.feasible;
            let ok = *s.cache.entry(key.clone()).or_insert_with(|| feasible(&key));
            if ok {
                rec(s, i + 1, blocks);
            }
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(s, i + 1, blocks);
        blocks.pop();
    }
    if f.is_empty() {
        return 0;
    }
    let mut s = S {
        m: f.len(),
        best: usize::MAX,
        cache: std::collections::HashMap::new(),
        feasible: &feasible,
    };
    rec(&mut s, 0, &mut Vec::new());
    s.best
}

pub fn family(ground: usize, lists: &[Vec<usize>]) -> Family {
    Family::from_atom_lists(GroundSet::new(ground).unwrap(), lists).unwrap()
}

/// The nonzero elements of the full algebra on `n` atoms.
pub fn full_b_plus(n: usize) -> Family {
    let lists: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|x| mask & (1 << x) != 0).collect())
        .collect();
    family(n, &lists)
}

/// Seeded random family with ground in `1..=max_ground` and size in
/// `1..=max_elems`, drawn through the library's `random` generator.
pub fn seeded_family(seed: u64, max_ground: usize, max_elems: usize) -> Family {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(1..=max_ground);
    let m = rng.gen_range(1..=max_elems);
    let p = Rational::new(rng.gen_range(1..=3), 4);
    generate(&InstanceSpec::new(InstanceKind::Random { n, m, p }, seed)).unwrap()
}
