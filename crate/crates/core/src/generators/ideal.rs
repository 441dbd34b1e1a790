//! Finite truncations of classical ideals on the natural numbers.
//!
//! Positivity with respect to an ideal is an infinitary notion, so each
//! ideal is shadowed on `[0, N)` by a threshold proxy:
//!
//! * `density(d)`: `|a| >= ceil(d * N)`.
//! * `summable(theta)`: `sum_{i in a} 1/(i+1) >= theta`.
//! * `grid(c, r)`: on `[0, N) x [0, N)`, flattened column by column
//!   (`index = column * N + row`), at least `c` columns each meeting `a` in
//!   at least `r` points. This stands in for the product ideal whose
//!   positive sets have infinitely many infinite columns.
//!
//! Structured mode emits the inclusion-minimal positive sets when they fit
//! in the budget, otherwise a fixed skeleton (intervals, or blocks for the
//! grid) topped up to the budget with seeded samples. Intervals mode emits
//! only the skeleton; sampled mode emits `budget` seeded positive sets.

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Family};
use crate::error::{Error, Result};
use crate::generators::{
    below, binomial, check_all, family_from_lists, k_subsets, min_size_for, random_permutation,
    random_subset, rng_for,
};
use crate::rational::Rational;

/// Largest truncation length for which summable minimal sets are enumerated.
const SUMMABLE_ENUMERATION_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum IdealKind {
    Density { d: Rational },
    Summable { theta: Rational },
    Grid { c: usize, r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealSpec {
    #[serde(flatten)]
    pub kind: IdealKind,
    /// Truncation length.
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationMode {
    Structured,
    Intervals,
    Sampled,
}

impl IdealSpec {
    pub fn ground_size(&self) -> usize {
        match self.kind {
            IdealKind::Grid { .. } => self.n * self.n,
            _ => self.n,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::domain("ideal truncation: N must be at least 1"));
        }
        match &self.kind {
            IdealKind::Density { d } => {
                if !d.is_positive() || *d >= 1 {
                    return Err(Error::domain(format!(
                        "density: d = {d} must lie in (0, 1)"
                    )));
                }
            }
            IdealKind::Summable { theta } => {
                if !theta.is_positive() {
                    return Err(Error::domain(format!(
                        "summable: theta = {theta} must be positive"
                    )));
                }
                let total = harmonic(n);
                if *theta > total {
                    return Err(Error::domain(format!(
                        "summable: theta = {theta} exceeds the full harmonic weight of [0, {n}), which is {total} (~{:.4})",
                        total.to_f64()
                    )));
                }
            }
            IdealKind::Grid { c, r } => {
                if *c == 0 || *c > n || *r == 0 || *r > n {
                    return Err(Error::domain(format!(
                        "grid: need 1 <= c <= N and 1 <= r <= N, got c = {c}, r = {r}, N = {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The positivity proxy.
    pub fn is_positive(&self, a: &Element) -> bool {
        match &self.kind {
            IdealKind::Density { d } => a.count() >= min_size_for(d, self.n),
            IdealKind::Summable { theta } => harmonic_weight(a.atoms()) >= *theta,
            IdealKind::Grid { c, r } => {
                let n = self.n;
                let mut per_column = vec![0usize; n];
                for x in a.atoms() {
                    per_column[x / n] += 1;
                }
                per_column.iter().filter(|&&k| k >= *r).count() >= *c
            }
        }
    }
}

fn harmonic(n: usize) -> Rational {
    harmonic_weight(0..n)
}

fn harmonic_weight(atoms: impl Iterator<Item = usize>) -> Rational {
    atoms.map(|i| Rational::new(1, i as i64 + 1)).sum()
}

pub fn ideal_truncation(
    ideal: &IdealSpec,
    mode: TruncationMode,
    budget: usize,
    seed: u64,
) -> Result<Family> {
    ideal.validate()?;
    if budget == 0 && mode != TruncationMode::Intervals {
        return Err(Error::domain("ideal truncation: budget must be at least 1"));
    }
    let mut rng = rng_for(seed);
    let n = ideal.n;
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<usize> {
        match &ideal.kind {
            IdealKind::Density { d } => {
                let k = min_size_for(d, n);
                let size = k + below(rng, n - k + 1);
                random_subset(rng, n, size)
            }
            IdealKind::Summable { theta } => {
                let mut weight = Rational::zero();
                let mut out = Vec::new();
                for x in random_permutation(rng, n) {
                    if weight >= *theta {
                        break;
                    }
                    weight += &Rational::new(1, x as i64 + 1);
                    out.push(x);
                }
                out.sort_unstable();
                out
            }
            IdealKind::Grid { c, r } => {
                let cols = random_subset(rng, n, *c);
                let mut out = Vec::new();
                for col in cols {
                    out.extend(
                        random_subset(rng, n, *r)
                            .into_iter()
                            .map(|row| col * n + row),
                    );
                }
                out.sort_unstable();
                out
            }
        }
    };

    let lists: Vec<Vec<usize>> = match mode {
        TruncationMode::Sampled => (0..budget).map(|_| sample(&mut rng)).collect(),
        TruncationMode::Intervals => skeleton(ideal),
        TruncationMode::Structured => match minimal_sets(ideal, budget) {
            Some(all) => all,
            None => {
                let mut out = skeleton(ideal);
                while out.len() < budget {
                    out.push(sample(&mut rng));
                }
                out
            }
        },
    };
    let family = family_from_lists(ideal.ground_size(), &lists)?;
    if family.is_empty() {
        return Err(Error::domain("ideal truncation produced no positive sets"));
    }
    check_all(&family, |e| ideal.is_positive(e))?;
    Ok(family)
}

/// All inclusion-minimal positive sets, or `None` when there are more than
/// `budget` of them (or too many candidates to enumerate).
fn minimal_sets(ideal: &IdealSpec, budget: usize) -> Option<Vec<Vec<usize>>> {
    let n = ideal.n;
    match &ideal.kind {
        IdealKind::Density { d } => {
            let k = min_size_for(d, n);
            (binomial(n, k) <= budget as u64).then(|| k_subsets(n, k))
        }
        IdealKind::Summable { theta } => {
            if n > SUMMABLE_ENUMERATION_LIMIT {
                return None;
            }
            // Integer weights L/(i+1) with L = lcm(1..=n).
            let lcm = (1..=n as u128).fold(1u128, |acc, v| acc / gcd(acc, v) * v);
            let w: Vec<u128> = (0..n).map(|i| lcm / (i as u128 + 1)).collect();
            let scaled = theta * &Rational::from(lcm as u64);
            let need = u128::try_from(scaled.ceil()).ok()?;
            let mut weight = vec![0u128; 1 << n];
            for mask in 1usize..1 << n {
                let low = mask.trailing_zeros() as usize;
                weight[mask] = weight[mask & (mask - 1)] + w[low];
            }
            let mut out: Vec<Vec<usize>> = Vec::new();
            // Order: by size, then lexicographic.
            for size in 1..=n {
                for set in k_subsets(n, size) {
                    let mask: usize = set.iter().map(|&i| 1usize << i).sum();
                    if weight[mask] >= need && set.iter().all(|&i| weight[mask ^ (1 << i)] < need) {
                        if out.len() == budget {
                            return None;
                        }
                        out.push(set);
                    }
                }
            }
            Some(out)
        }
        IdealKind::Grid { c, r } => {
            let count = binomial(n, *c).checked_mul(binomial(n, *r).checked_pow(*c as u32)?)?;
            if count > budget as u64 {
                return None;
            }
            let row_sets = k_subsets(n, *r);
            let mut out = Vec::new();
            for cols in k_subsets(n, *c) {
                let mut idx = vec![0usize; *c];
                loop {
                    let mut set: Vec<usize> = cols
                        .iter()
                        .zip(&idx)
                        .flat_map(|(&col, &ri)| row_sets[ri].iter().map(move |&row| col * n + row))
                        .collect();
                    set.sort_unstable();
                    out.push(set);
                    // Odometer over row choices, last column fastest.
                    let Some(p) = (0..*c).rev().find(|&p| idx[p] + 1 < row_sets.len()) else {
                        break;
                    };
                    idx[p] += 1;
                    for q in idx.iter_mut().skip(p + 1) {
                        *q = 0;
                    }
                }
            }
            Some(out)
        }
    }
}

/// Deterministic fallback family: intervals of the minimal length (density),
/// shortest positive intervals per start (summable), aligned blocks (grid).
fn skeleton(ideal: &IdealSpec) -> Vec<Vec<usize>> {
    let n = ideal.n;
    match &ideal.kind {
        IdealKind::Density { d } => {
            let k = min_size_for(d, n);
            (0..=n - k).map(|i| (i..i + k).collect()).collect()
        }
        IdealKind::Summable { theta } => {
            let mut out = Vec::new();
            for start in 0..n {
                let mut weight = Rational::zero();
                for end in start..n {
                    weight += &Rational::new(1, end as i64 + 1);
                    if weight >= *theta {
                        out.push((start..=end).collect());
                        break;
                    }
                }
            }
            out
        }
        IdealKind::Grid { c, r } => {
            let mut out = Vec::new();
            for c0 in 0..=n - c {
                for r0 in 0..=n - r {
                    let set: Vec<usize> = (c0..c0 + c)
                        .flat_map(|col| (r0..r0 + r).map(move |row| col * n + row))
                        .collect();
                    out.push(set);
                }
            }
            out
        }
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
