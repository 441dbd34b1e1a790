//! The intersection number `I(A)` of a family, exactly and by enumeration.
//!
//! For a sequence `s` of elements, `i(s)` is the size of the largest
//! sub-multiset with nonzero meet. In a set algebra a sub-multiset has a
//! nonzero meet exactly when some atom lies in all of its members, so
//! `i(s)` is the largest total multiplicity of elements sharing one atom.
//! Every finite Boolean algebra is a set algebra over its atoms, so this
//! reduction is exact at finite scale.
//!
//! `I(A) = inf_s i(s)/|s|` is computed through the minimax identity
//!
//! ```text
//! max_mu  min_{a in A} mu(a)  =  min_w  max_x  sum_{a contains x} w(a)
//! ```
//!
//! where `mu` ranges over probability measures on the atoms and `w` over
//! probability weightings of `A`. The left side is solved as an LP; its
//! optimal row multipliers are an optimal `w`, and clearing denominators
//! in `w` gives an integer sequence attaining the infimum.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::Family;
use crate::error::{Error, Result};
use crate::kelley::Measure;
use crate::lp::{self, Bound, Direction, LpInstance, LpStatus, Sense};
use crate::rational::{lcm_of_denominators, Rational};

/// Default cap on the number of multisets [`intersection_number_bruteforce`]
/// may visit.
pub const DEFAULT_BRUTE_FORCE_BUDGET: u64 = 20_000_000;

/// A finite sequence over a family, kept as multiplicities per element index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, u64)>", into = "Vec<(usize, u64)>")]
pub struct WeightedSequence {
    /// Sorted by index; every count positive.
    entries: Vec<(usize, u64)>,
}

impl WeightedSequence {
    pub fn new(entries: impl IntoIterator<Item = (usize, u64)>) -> Result<Self> {
        let mut merged = std::collections::BTreeMap::new();
        for (i, c) in entries {
            if c > 0 {
                *merged.entry(i).or_insert(0u64) += c;
            }
        }
        if merged.is_empty() {
            return Err(Error::domain(
                "sequence needs at least one positive multiplicity",
            ));
        }
        Ok(WeightedSequence {
            entries: merged.into_iter().collect(),
        })
    }

    /// From a dense count vector indexed by element.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        WeightedSequence::new(counts.iter().copied().enumerate())
    }

    pub fn entries(&self) -> &[(usize, u64)] {
        &self.entries
    }

    /// `|s|`.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    fn check_indices(&self, f: &Family) -> Result<()> {
        match self.entries.iter().find(|(i, _)| *i >= f.len()) {
            Some((i, _)) => Err(Error::structural(format!(
                "sequence index {i} out of range for family of size {}",
                f.len()
            ))),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<(usize, u64)>> for WeightedSequence {
    type Error = Error;
    fn try_from(v: Vec<(usize, u64)>) -> Result<Self> {
        WeightedSequence::new(v)
    }
}

impl From<WeightedSequence> for Vec<(usize, u64)> {
    fn from(s: WeightedSequence) -> Self {
        s.entries
    }
}

/// `i(s)`: the largest total multiplicity of elements sharing an atom.
pub fn intersection_index(f: &Family, s: &WeightedSequence) -> Result<u64> {
    s.check_indices(f)?;
    let mut load = vec![0u64; f.ground().size()];
    for &(i, c) in s.entries() {
        for x in f.elements()[i].atoms() {
            load[x] += c;
        }
    }
    Ok(load.into_iter().max().unwrap_or(0))
}

/// `i(s) / |s|`.
pub fn sequence_ratio(f: &Family, s: &WeightedSequence) -> Result<Rational> {
    let i = intersection_index(f, s)?;
    Ok(Rational::from(i) / Rational::from(s.total()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionCertificate {
    pub value: Rational,
    /// Measure whose minimum over the family equals `value`.
    pub witness_measure: Option<Measure>,
    /// Sequence whose ratio `i(s)/|s|` equals `value`.
    pub witness_sequence: Option<WeightedSequence>,
    pub lp_verified: bool,
}

/// What [`intersection_number_exact_with`] does with an empty family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyFamilyPolicy {
    /// `I(empty) = 1`, with no witnesses.
    #[default]
    ConventionOne,
    Reject,
}

/// The measure-side LP: variables `mu_0..mu_{n-1} >= 0` and a free `t`;
/// maximize `t` subject to `mu(a) - t >= 0` for each `a` (rows in family
/// order) and `sum mu = 1` (last row).
pub fn measure_side_lp(f: &Family) -> LpInstance {
    let n = f.ground().size();
    let mut objective = vec![Rational::zero(); n];
    objective.push(Rational::one());
    let mut lp = LpInstance::new(Direction::Maximize, objective);
    lp.bounds[n] = Bound::free();
    for a in f.elements() {
        let mut row = vec![Rational::zero(); n + 1];
        for x in a.atoms() {
            row[x] = Rational::one();
        }
        row[n] = -Rational::one();
        lp.add_row(row, Sense::Ge, Rational::zero());
    }
    let mut total = vec![Rational::one(); n];
    total.push(Rational::zero());
    lp.add_row(total, Sense::Eq, Rational::one());
    lp
}

/// The sequence-side LP, the dual of [`measure_side_lp`]: variables
/// `w_a >= 0` (family order) and a free `z`; minimize `z` subject to
/// `sum_{a contains x} w_a - z <= 0` for each atom and `sum w = 1`.
pub fn sequence_side_lp(f: &Family) -> LpInstance {
    let m = f.len();
    let n = f.ground().size();
    let mut objective = vec![Rational::zero(); m];
    objective.push(Rational::one());
    let mut lp = LpInstance::new(Direction::Minimize, objective);
    lp.bounds[m] = Bound::free();
    for x in 0..n {
        let mut row: Vec<Rational> = f
            .elements()
            .iter()
            .map(|a| {
                if a.contains(x) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        row.push(-Rational::one());
        lp.add_row(row, Sense::Le, Rational::zero());
    }
    let mut total = vec![Rational::one(); m];
    total.push(Rational::zero());
    lp.add_row(total, Sense::Eq, Rational::one());
    lp
}

pub fn intersection_number_exact(f: &Family) -> Result<IntersectionCertificate> {
    intersection_number_exact_with(f, EmptyFamilyPolicy::default())
}

pub fn intersection_number_exact_with(
    f: &Family,
    policy: EmptyFamilyPolicy,
) -> Result<IntersectionCertificate> {
    if f.is_empty() {
        return match policy {
            EmptyFamilyPolicy::ConventionOne => Ok(IntersectionCertificate {
                value: Rational::one(),
                witness_measure: None,
                witness_sequence: None,
                lp_verified: true,
            }),
            EmptyFamilyPolicy::Reject => {
                Err(Error::domain("intersection number of an empty family"))
            }
        };
    }
    let n = f.ground().size();
    let lp_instance = measure_side_lp(f);
    let sol = lp::solve(&lp_instance)?;
    if sol.status != LpStatus::Optimal {
        // The uniform measure is always feasible and t <= 1, so this is a bug.
        return Err(Error::structural(format!(
            "intersection LP returned {:?}",
            sol.status
        )));
    }
    let lp_verified = lp::verify(&lp_instance, &sol);
    let value = sol.value.clone();
    let measure = Measure::new(sol.primal[..n].to_vec())?;

    // Row multipliers of the >= rows are <= 0; their negation is the
    // optimal weighting of the family.
    let weights: Vec<Rational> = sol.dual[..f.len()].iter().map(|y| -y).collect();
    let scale = lcm_of_denominators(&weights);
    let mut counts: Vec<BigUint> = weights
        .iter()
        .map(|w| {
            let scaled = w * &Rational::from_big(scale.clone().into(), 1.into());
            scaled.numer().magnitude().clone()
        })
        .collect();
    let g = counts.iter().fold(BigUint::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() {
        for c in counts.iter_mut() {
            *c = &*c / &g;
        }
    }
    let counts: Vec<u64> = counts
        .iter()
        .map(|c| {
            c.to_u64()
                .ok_or_else(|| Error::domain("witness multiplicity does not fit in 64 bits"))
        })
        .collect::<Result<_>>()?;
    let sequence = WeightedSequence::from_counts(&counts)?;

    Ok(IntersectionCertificate {
        value,
        witness_measure: Some(measure),
        witness_sequence: Some(sequence),
        lp_verified,
    })
}

/// Recomputes `min_a mu(a)` and `i(s)/|s|` and checks both equal the
/// certified value. Only these equalities are checked; the witnesses need
/// not be canonical.
pub fn verify_certificate(cert: &IntersectionCertificate, f: &Family) -> bool {
    if f.is_empty() {
        return cert.value == 1
            && cert.witness_measure.is_none()
            && cert.witness_sequence.is_none();
    }
    let (Some(mu), Some(seq)) = (&cert.witness_measure, &cert.witness_sequence) else {
        return false;
    };
    if mu.ground() != f.ground().size() {
        return false;
    }
    let Some(measure_side) = mu.min_over(f) else {
        return false;
    };
    let Ok(sequence_side) = sequence_ratio(f, seq) else {
        return false;
    };
    measure_side == cert.value && sequence_side == cert.value
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub value: Rational,
    pub witness: WeightedSequence,
    /// Longest sequence length enumerated.
    pub max_len: u64,
    pub enumerated: u64,
}

/// Number of nonempty multisets of size at most `max_len` over `k` kinds:
/// `C(k + max_len, max_len) - 1`.
pub fn multiset_count(k: usize, max_len: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 1..=max_len {
        acc = acc * BigUint::from(k as u64 + i) / BigUint::from(i);
    }
    acc - 1u32
}

/// Minimum of `i(s)/|s|` over every sequence with `1 <= |s| <= max_len`.
///
/// Refuses with a budget error, before enumerating anything, when the
/// number of multisets exceeds `budget`.
pub fn intersection_number_bruteforce(
    f: &Family,
    max_len: u64,
    budget: u64,
) -> Result<BruteForceResult> {
    if f.is_empty() {
        return Err(Error::domain("brute force needs a nonempty family"));
    }
    if max_len == 0 {
        return Err(Error::domain("brute force length bound must be at least 1"));
    }
    let count = multiset_count(f.len(), max_len);
    if count > BigUint::from(budget) {
        return Err(Error::Budget {
            what: format!(
                "brute force over {} elements up to length {max_len} ({count} multisets)",
                f.len()
            ),
            limit: budget,
            unit: "multisets",
            hint: String::new(),
        });
    }

    let members: Vec<Vec<usize>> = f.elements().iter().map(|e| e.atoms().collect()).collect();
    let mut search = BruteSearch {
        members: &members,
        load: vec![0; f.ground().size()],
        counts: vec![0; f.len()],
        best: None,
        enumerated: 0,
    };
    search.visit(0, 0, max_len);
    let (num, den, counts) = search.best.expect("at least one nonempty multiset");
    Ok(BruteForceResult {
        value: Rational::from(num) / Rational::from(den),
        witness: WeightedSequence::from_counts(&counts)?,
        max_len,
        enumerated: search.enumerated,
    })
}

struct BruteSearch<'a> {
    members: &'a [Vec<usize>],
    load: Vec<u64>,
    counts: Vec<u64>,
    best: Option<(u64, u64, Vec<u64>)>,
    enumerated: u64,
}

impl BruteSearch<'_> {
    fn visit(&mut self, idx: usize, total: u64, max_len: u64) {
        if idx == self.members.len() {
            if total == 0 {
                return;
            }
            self.enumerated += 1;
            let top = self.load.iter().copied().max().unwrap_or(0);
            let better = match &self.best {
                None => true,
                Some((bn, bd, _)) => {
                    (top as u128) * (*bd as u128) < (*bn as u128) * (total as u128)
                }
            };
            if better {
                self.best = Some((top, total, self.counts.clone()));
            }
            return;
        }
        // Multiplicity 0 first, then increasing.
        self.visit(idx + 1, total, max_len);
        let mut added = 0u64;
        while total + added < max_len {
            added += 1;
            for &x in &self.members[idx] {
                self.load[x] += 1;
            }
            self.counts[idx] = added;
            self.visit(idx + 1, total + added, max_len);
        }
        for &x in &self.members[idx] {
            self.load[x] -= added;
        }
        self.counts[idx] = 0;
    }
}
