//! Minimal covers of a family by classes of intersection number `> 1 - eps`.
//!
//! Feasibility is downward closed (a subfamily never has a smaller
//! intersection number), so a minimum cover can always be shrunk to a
//! partition. Exact mode therefore searches set partitions: elements are
//! placed one at a time into an existing class or a new one, with a greedy
//! cover as the initial upper bound and a clique of pairwise-incompatible
//! elements as the lower bound.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Family;
use crate::error::{Error, Result};
use crate::intersection::intersection_number_exact;
use crate::kelley::{CoverCertificate, CoverClass, Measure};
use crate::rational::Rational;

/// Default node budget for exact search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFeasibility {
    pub feasible: bool,
    /// Exact intersection number of the class.
    pub value: Rational,
    /// Optimal measure of the class; present when feasible.
    pub witness: Option<Measure>,
}

/// Is `I(class) > delta` (or `>=` when `strict` is false)?
pub fn class_feasible(
    f: &Family,
    class: &[usize],
    delta: &Rational,
    strict: bool,
) -> Result<ClassFeasibility> {
    if class.is_empty() {
        return Err(Error::domain("candidate class is empty"));
    }
    let sub = f.subfamily(class)?;
    let cert = intersection_number_exact(&sub)?;
    let feasible = if strict {
        cert.value > *delta
    } else {
        cert.value >= *delta
    };
    Ok(ClassFeasibility {
        feasible,
        value: cert.value,
        witness: if feasible { cert.witness_measure } else { None },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MnMode {
    Exact,
    Greedy,
}

impl std::str::FromStr for MnMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MnMode::Exact),
            "greedy" => Ok(MnMode::Greedy),
            other => Err(Error::domain(format!(
                "unknown mode {other:?}, expected exact or greedy"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MnReport {
    pub epsilon: Rational,
    pub k: usize,
    pub mode: MnMode,
    /// Classes need `I > 1 - epsilon` when set, `I >= 1 - epsilon` otherwise.
    pub strict: bool,
    /// Only exact mode proves minimality.
    pub optimal: bool,
    /// Size of a set of pairwise-incompatible elements.
    pub lower_bound: usize,
    pub search_nodes: u64,
    /// Each class threshold is the class's exact intersection number.
    pub certificate: CoverCertificate,
}

struct Search<'a> {
    fam: &'a Family,
    delta: Rational,
    strict: bool,
    values: HashMap<Vec<usize>, (bool, Rational, Option<Measure>)>,
}

impl Search<'_> {
    fn check(&mut self, class: &[usize]) -> Result<bool> {
        let mut key = class.to_vec();
        key.sort_unstable();
        if let Some((ok, _, _)) = self.values.get(&key) {
            return Ok(*ok);
        }
        let r = class_feasible(self.fam, &key, &self.delta, self.strict)?;
        let ok = r.feasible;
        self.values.insert(key, (r.feasible, r.value, r.witness));
        Ok(ok)
    }

    fn class_entry(&mut self, class: &[usize]) -> Result<(Rational, Measure)> {
        let mut key = class.to_vec();
        key.sort_unstable();
        if !self.values.contains_key(&key) {
            self.check(&key)?;
        }
        let (ok, value, witness) = &self.values[&key];
        debug_assert!(*ok);
        Ok((
            value.clone(),
            witness.clone().expect("feasible class has a witness"),
        ))
    }

    fn greedy(&mut self) -> Result<Vec<Vec<usize>>> {
        let mut uncovered: Vec<usize> = (0..self.fam.len()).collect();
        let mut classes = Vec::new();
        while !uncovered.is_empty() {
            let mut best: Option<Vec<usize>> = None;
            for &seed in &uncovered {
                let mut class = vec![seed];
                for &e in &uncovered {
                    if e == seed {
                        continue;
                    }
                    class.push(e);
                    if !self.check(&class)? {
                        class.pop();
                    }
                }
                if best.as_ref().is_none_or(|b| class.len() > b.len()) {
                    best = Some(class);
                }
            }
            let mut chosen = best.expect("uncovered is nonempty");
            chosen.sort_unstable();
            uncovered.retain(|e| chosen.binary_search(e).is_err());
            classes.push(chosen);
        }
        Ok(classes)
    }
}

struct Bnb<'s, 'a> {
    search: &'s mut Search<'a>,
    order: Vec<usize>,
    compatible: Vec<Vec<bool>>,
    best: Vec<Vec<usize>>,
    lower_bound: usize,
    nodes: u64,
    budget: u64,
}

impl Bnb<'_, '_> {
    fn run(&mut self, pos: usize, classes: &mut Vec<Vec<usize>>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget {
                what: format!("exact cover search over {} elements", self.order.len()),
                limit: self.budget,
                unit: "search nodes",
                hint: "; try --mode greedy".to_string(),
            });
        }
        if self.best.len() == self.lower_bound || classes.len() >= self.best.len() {
            return Ok(());
        }
        if pos == self.order.len() {
            self.best = classes.clone();
            return Ok(());
        }
        let e = self.order[pos];
        for c in 0..classes.len() {
            if !classes[c].iter().all(|&m| self.compatible[m][e]) {
                continue;
            }
            classes[c].push(e);
            if self.search.check(&classes[c])? {
                self.run(pos + 1, classes)?;
            }
            classes[c].pop();
            if self.best.len() == self.lower_bound {
                return Ok(());
            }
        }
        if classes.len() + 1 < self.best.len() {
            classes.push(vec![e]);
            self.run(pos + 1, classes)?;
            classes.pop();
        }
        Ok(())
    }
}

/// Smallest number of classes, each with intersection number strictly
/// greater than `1 - epsilon`, covering `f`.
pub fn mn_min_cover(f: &Family, epsilon: &Rational, mode: MnMode, budget: u64) -> Result<MnReport> {
    mn_min_cover_with(f, epsilon, mode, budget, true)
}

/// As [`mn_min_cover`], with `strict = false` accepting classes at exactly
/// `1 - epsilon`.
pub fn mn_min_cover_with(
    f: &Family,
    epsilon: &Rational,
    mode: MnMode,
    budget: u64,
    strict: bool,
) -> Result<MnReport> {
    if !epsilon.is_positive() || *epsilon >= 1 {
        return Err(Error::domain(format!(
            "epsilon {epsilon} is outside (0, 1)"
        )));
    }
    let delta = Rational::one() - epsilon;

    // Work on distinct elements; duplicates join their representative's class.
    let dedup = f.deduplicated();
    let rep_of: Vec<usize> = f
        .elements()
        .iter()
        .map(|e| {
            dedup
                .elements()
                .iter()
                .position(|d| d == e)
                .expect("every element has a representative")
        })
        .collect();

    let mut search = Search {
        fam: &dedup,
        delta,
        strict,
        values: HashMap::new(),
    };
    let n = dedup.len();

    let mut compatible = vec![vec![true; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let ok = search.check(&[i, j])?;
            compatible[i][j] = ok;
            compatible[j][i] = ok;
        }
    }
    let clique = incompatible_clique(&compatible);
    let lower_bound = clique.len();

    let greedy = search.greedy()?;
    let (classes, optimal, nodes) = match mode {
        MnMode::Greedy => (greedy, false, 0),
        MnMode::Exact => {
            let degree = |i: usize| compatible[i].iter().filter(|c| !**c).count();
            let mut rest: Vec<usize> = (0..n).filter(|i| !clique.contains(i)).collect();
            rest.sort_by_key(|&i| (std::cmp::Reverse(degree(i)), i));
            let order: Vec<usize> = clique.iter().copied().chain(rest).collect();
            let mut bnb = Bnb {
                search: &mut search,
                order,
                compatible,
                best: greedy,
                lower_bound,
                nodes: 0,
                budget,
            };
            bnb.run(0, &mut Vec::new())?;
            let mut best = bnb.best;
            let nodes = bnb.nodes;
            for c in best.iter_mut() {
                c.sort_unstable();
            }
            best.sort();
            (best, true, nodes)
        }
    };

    let mut cover_classes = Vec::with_capacity(classes.len());
    for class in &classes {
        let (value, witness) = search.class_entry(class)?;
        let members: Vec<usize> = (0..f.len())
            .filter(|&i| class.contains(&rep_of[i]))
            .collect();
        cover_classes.push(CoverClass {
            members,
            threshold: value,
            witness,
        });
    }
    Ok(MnReport {
        epsilon: epsilon.clone(),
        k: cover_classes.len(),
        mode,
        strict,
        optimal,
        lower_bound,
        search_nodes: nodes,
        certificate: CoverCertificate::new(f, cover_classes),
    })
}

/// Greedy clique in the incompatibility graph, highest degree first.
fn incompatible_clique(compatible: &[Vec<bool>]) -> Vec<usize> {
    let n = compatible.len();
    let degree = |i: usize| compatible[i].iter().filter(|c| !**c).count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(degree(i)), i));
    let mut clique: Vec<usize> = Vec::new();
    for i in order {
        if clique.iter().all(|&c| !compatible[c][i]) {
            clique.push(i);
        }
    }
    clique
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroundSet;

    fn fam(n: usize, lists: &[&[usize]]) -> Family {
        let lists: Vec<Vec<usize>> = lists.iter().map(|l| l.to_vec()).collect();
        Family::from_atom_lists(GroundSet::new(n).unwrap(), &lists).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn feasibility_examples() {
        let f = fam(2, &[&[0], &[1]]);
        assert!(class_feasible(&f, &[0], &r(9, 10), true).unwrap().feasible);
        let strict = class_feasible(&f, &[0, 1], &r(1, 2), true).unwrap();
        assert!(!strict.feasible);
        assert_eq!(strict.value, r(1, 2));
        assert!(strict.witness.is_none());
        let weak = class_feasible(&f, &[0, 1], &r(1, 2), false).unwrap();
        assert!(weak.feasible && weak.witness.is_some());
        assert!(matches!(
            class_feasible(&f, &[2], &r(1, 2), true),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            class_feasible(&f, &[], &r(1, 2), true),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn size_two_full_algebra() {
        let f = fam(2, &[&[0], &[1], &[0, 1]]);
        let rep = mn_min_cover(&f, &r(2, 5), MnMode::Exact, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(rep.k, 2);
        assert!(rep.optimal);
        assert!(rep.certificate.covers_all);
        for c in &rep.certificate.classes {
            assert!(c.threshold > r(3, 5));
        }
    }

    #[test]
    fn singleton_family() {
        let f = fam(3, &[&[1, 2]]);
        for mode in [MnMode::Exact, MnMode::Greedy] {
            let rep = mn_min_cover(&f, &r(1, 7), mode, DEFAULT_SEARCH_BUDGET).unwrap();
            assert_eq!(rep.k, 1);
        }
    }

    #[test]
    fn atoms_plus_top() {
        let f = fam(3, &[&[0], &[1], &[2], &[0, 1, 2]]);
        let rep = mn_min_cover(&f, &r(2, 5), MnMode::Exact, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(rep.k, 3);
        assert_eq!(rep.lower_bound, 3);
    }

    #[test]
    fn empty_family_needs_no_classes() {
        let f = Family::new(GroundSet::new(2).unwrap(), vec![]).unwrap();
        let rep = mn_min_cover(&f, &r(1, 2), MnMode::Exact, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(rep.k, 0);
        assert!(rep.certificate.covers_all);
    }

    #[test]
    fn duplicates_share_a_class() {
        let f = fam(2, &[&[0], &[1], &[0], &[1]]);
        let rep = mn_min_cover(&f, &r(1, 3), MnMode::Exact, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(rep.k, 2);
        let mut members: Vec<Vec<usize>> = rep
            .certificate
            .classes
            .iter()
            .map(|c| c.members.clone())
            .collect();
        members.sort();
        assert_eq!(members, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn non_strict_merges_boundary_classes() {
        // Two disjoint atoms have I = 1/2 exactly.
        let f = fam(2, &[&[0], &[1]]);
        let strict = mn_min_cover(&f, &r(1, 2), MnMode::Exact, DEFAULT_SEARCH_BUDGET).unwrap();
        let weak =
            mn_min_cover_with(&f, &r(1, 2), MnMode::Exact, DEFAULT_SEARCH_BUDGET, false).unwrap();
        assert_eq!((strict.k, weak.k), (2, 1));
        assert!(!weak.strict);
    }

    #[test]
    fn epsilon_range() {
        let f = fam(2, &[&[0]]);
        assert!(mn_min_cover(&f, &Rational::one(), MnMode::Exact, 10).is_err());
        assert!(mn_min_cover(&f, &Rational::zero(), MnMode::Exact, 10).is_err());
    }

    #[test]
    fn budget_is_reported() {
        // Large epsilon makes everything compatible pairwise but not as a
        // whole; a tiny budget cannot finish.
        let lists: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6, (i + 2) % 6]).collect();
        let f = Family::from_atom_lists(GroundSet::new(6).unwrap(), &lists).unwrap();
        let greedy = mn_min_cover(&f, &r(1, 2), MnMode::Greedy, 1).unwrap();
        let exact = mn_min_cover(&f, &r(1, 2), MnMode::Exact, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(greedy.k >= exact.k);
        if exact.search_nodes > 1 {
            assert!(matches!(
                mn_min_cover(&f, &r(1, 2), MnMode::Exact, 1),
                Err(Error::Budget { .. })
            ));
        }
    }
}
