//! Reproducible instance catalog.
//!
//! All randomness comes from one stream: ChaCha8 (`rand_chacha` 0.3) seeded
//! with `seed_from_u64(seed)`. Draws are taken as raw `u64` words or through
//! `gen_range` on `u64`, and Bernoulli trials compare a raw word against the
//! exact rational probability, so instances are bit-identical across runs
//! and platforms for a fixed seed.

mod ideal;
pub mod sweep;

use num_bigint::BigInt;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Family, GroundSet};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use ideal::{ideal_truncation, IdealKind, IdealSpec, TruncationMode};

/// Default truncation budget (elements per instance).
pub const DEFAULT_TRUNCATION_BUDGET: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(flatten)]
    pub kind: InstanceKind,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum InstanceKind {
    /// The `n` atoms.
    Atoms { n: usize },
    /// All `k`-subsets of `[n)`, lexicographic.
    Ksubsets { n: usize, k: usize },
    /// All nonempty intervals `[i, j)` of `[n)`, by start then end.
    Intervals { n: usize },
    /// `m` elements, each atom included with probability `p`; empty draws
    /// are redrawn.
    Random { n: usize, m: usize, p: Rational },
    /// `m` subsets of `[n)` of relative size at least `delta`.
    MeasureThreshold { n: usize, delta: Rational, m: usize },
    IdealTruncation {
        ideal: IdealSpec,
        mode: TruncationMode,
        #[serde(default = "default_budget")]
        budget: usize,
    },
}

fn default_budget() -> usize {
    DEFAULT_TRUNCATION_BUDGET
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind, seed: u64) -> Self {
        InstanceSpec { kind, seed }
    }

    /// The same spec with its size parameter (`n`, or the truncation
    /// length) replaced.
    pub fn with_size(&self, size: usize) -> InstanceSpec {
        let mut s = self.clone();
        match &mut s.kind {
            InstanceKind::Atoms { n }
            | InstanceKind::Ksubsets { n, .. }
            | InstanceKind::Intervals { n }
            | InstanceKind::Random { n, .. }
            | InstanceKind::MeasureThreshold { n, .. } => *n = size,
            InstanceKind::IdealTruncation { ideal, .. } => ideal.n = size,
        }
        s
    }
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `true` with probability exactly `p` (for `p` in `[0, 1]`), comparing one
/// raw 64-bit draw `u` against `p * 2^64`.
pub(crate) fn bernoulli(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    let u = BigInt::from(rng.next_u64());
    u * p.denom() < p.numer() << 64
}

/// Uniform in `[0, bound)`.
pub(crate) fn below(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    rng.gen_range(0..bound as u64) as usize
}

/// A uniformly random `size`-subset of `[n)`, sorted.
pub(crate) fn random_subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = i + below(rng, n - i);
        pool.swap(i, j);
    }
    let mut out = pool[..size].to_vec();
    out.sort_unstable();
    out
}

/// A uniformly random permutation of `[n)`.
pub(crate) fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..n.saturating_sub(1) {
        let j = i + below(rng, n - i);
        pool.swap(i, j);
    }
    pool
}

/// All `k`-subsets of `[n)` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

pub(crate) fn family_from_lists(ground: usize, lists: &[Vec<usize>]) -> Result<Family> {
    Family::from_atom_lists(GroundSet::new(ground)?, lists)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(msg()))
    }
}

pub fn generate(spec: &InstanceSpec) -> Result<Family> {
    let mut rng = rng_for(spec.seed);
    match &spec.kind {
        InstanceKind::Atoms { n } => {
            require(*n >= 1, || "atoms: n must be at least 1".into())?;
            let lists: Vec<Vec<usize>> = (0..*n).map(|i| vec![i]).collect();
            family_from_lists(*n, &lists)
        }
        InstanceKind::Ksubsets { n, k } => {
            require(*n >= 1, || "ksubsets: n must be at least 1".into())?;
            require(*k >= 1 && k <= n, || {
                format!("ksubsets: k = {k} must lie in [1, {n}]")
            })?;
            family_from_lists(*n, &k_subsets(*n, *k))
        }
        InstanceKind::Intervals { n } => {
            require(*n >= 1, || "intervals: n must be at least 1".into())?;
            let lists: Vec<Vec<usize>> = (0..*n)
                .flat_map(|i| (i + 1..=*n).map(move |j| (i..j).collect()))
                .collect();
            family_from_lists(*n, &lists)
        }
        InstanceKind::Random { n, m, p } => {
            require(*n >= 1, || "random: n must be at least 1".into())?;
            require(*m >= 1, || "random: m must be at least 1".into())?;
            require(p.is_positive() && *p <= 1, || {
                format!("random: p = {p} must lie in (0, 1]")
            })?;
            let mut lists = Vec::with_capacity(*m);
            while lists.len() < *m {
                let draw: Vec<usize> = (0..*n).filter(|_| bernoulli(&mut rng, p)).collect();
                if !draw.is_empty() {
                    lists.push(draw);
                }
            }
            family_from_lists(*n, &lists)
        }
        InstanceKind::MeasureThreshold { n, delta, m } => {
            require(*n >= 1, || "measure_threshold: n must be at least 1".into())?;
            require(*m >= 1, || "measure_threshold: m must be at least 1".into())?;
            require(delta.is_positive() && *delta <= 1, || {
                format!("measure_threshold: delta = {delta} must lie in (0, 1]")
            })?;
            let min_size = min_size_for(delta, *n);
            let lists: Vec<Vec<usize>> = (0..*m)
                .map(|_| {
                    let size = min_size + below(&mut rng, *n - min_size + 1);
                    random_subset(&mut rng, *n, size)
                })
                .collect();
            family_from_lists(*n, &lists)
        }
        InstanceKind::IdealTruncation {
            ideal,
            mode,
            budget,
        } => ideal_truncation(ideal, *mode, *budget, spec.seed),
    }
}

/// `ceil(fraction * n)`, at least 1.
pub(crate) fn min_size_for(fraction: &Rational, n: usize) -> usize {
    let c = (fraction * &Rational::from(n)).ceil();
    usize::try_from(c).unwrap_or(usize::MAX).max(1)
}

/// Indices of elements failing `pred`.
pub(crate) fn check_all(f: &Family, pred: impl Fn(&Element) -> bool) -> Result<()> {
    match f.elements().iter().position(|e| !pred(e)) {
        Some(i) => Err(Error::domain(format!(
            "generated element {i} fails its positivity proxy"
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lists(f: &Family) -> Vec<Vec<usize>> {
        f.to_file().elements
    }

    #[test]
    fn atoms_and_ksubsets() {
        let f = generate(&InstanceSpec::new(InstanceKind::Atoms { n: 3 }, 0)).unwrap();
        assert_eq!(lists(&f), vec![vec![0], vec![1], vec![2]]);
        let f = generate(&InstanceSpec::new(InstanceKind::Ksubsets { n: 3, k: 2 }, 0)).unwrap();
        assert_eq!(lists(&f), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        for (n, k) in [(5, 2), (6, 3), (7, 1), (4, 4)] {
            assert_eq!(k_subsets(n, k).len() as u64, binomial(n, k));
        }
    }

    #[test]
    fn intervals_count() {
        for n in 1..8 {
            let f = generate(&InstanceSpec::new(InstanceKind::Intervals { n }, 0)).unwrap();
            assert_eq!(f.len(), n * (n + 1) / 2);
        }
    }

    #[test]
    fn invalid_params() {
        let bad = [
            InstanceKind::Atoms { n: 0 },
            InstanceKind::Ksubsets { n: 3, k: 4 },
            InstanceKind::Ksubsets { n: 3, k: 0 },
            InstanceKind::Random {
                n: 3,
                m: 2,
                p: Rational::zero(),
            },
            InstanceKind::Random {
                n: 3,
                m: 2,
                p: Rational::new(3, 2),
            },
            InstanceKind::MeasureThreshold {
                n: 3,
                delta: Rational::zero(),
                m: 1,
            },
        ];
        for kind in bad {
            assert!(
                matches!(
                    generate(&InstanceSpec::new(kind.clone(), 1)),
                    Err(Error::Domain(_))
                ),
                "{kind:?}"
            );
        }
    }

    #[test]
    fn random_is_deterministic() {
        let spec = InstanceSpec::new(
            InstanceKind::Random {
                n: 6,
                m: 5,
                p: Rational::new(1, 2),
            },
            42,
        );
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        let other = generate(&InstanceSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn bernoulli_extremes() {
        let mut rng = rng_for(7);
        assert!((0..100).all(|_| bernoulli(&mut rng, &Rational::one())));
        assert!((0..100).all(|_| !bernoulli(&mut rng, &Rational::zero())));
    }

    #[test]
    fn measure_threshold_sizes() {
        let spec = InstanceSpec::new(
            InstanceKind::MeasureThreshold {
                n: 8,
                delta: Rational::new(3, 8),
                m: 30,
            },
            9,
        );
        let f = generate(&spec).unwrap();
        assert_eq!(f.len(), 30);
        assert!(f.elements().iter().all(|e| e.count() >= 3));
    }

    #[test]
    fn spec_json_shape() {
        let spec = InstanceSpec::new(
            InstanceKind::Random {
                n: 6,
                m: 5,
                p: Rational::new(1, 2),
            },
            42,
        );
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"random","params":{"n":6,"m":5,"p":"1/2"},"seed":42}"#
        );
        let back: InstanceSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
