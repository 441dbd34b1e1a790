//! Finite set algebras `P(atoms)`: elements, families, and the structural
//! diagnostics used elsewhere (antichains, centeredness, principal quotients).
//!
//! Every finite Boolean algebra is isomorphic to the power set of its atoms,
//! so representing elements as atom sets loses no generality. Quotients by an
//! ideal are always principal at this scale; they are provided as plumbing and
//! the interesting structure lives in [`Family`] values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground sizes above this are accepted, but the exact suites stay below it.
pub const DEFAULT_MAX_GROUND: usize = 64;

/// Subfamily size searched exhaustively by [`is_centered`].
pub const DEFAULT_CENTERED_BOUND: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::domain("ground set must have at least one atom"));
        }
        Ok(GroundSet { size, labels: None })
    }

    pub fn with_labels(size: usize, labels: Vec<String>) -> Result<Self> {
        let mut g = GroundSet::new(size)?;
        if labels.len() != size {
            return Err(Error::structural(format!(
                "labels: expected {size} labels, got {}",
                labels.len()
            )));
        }
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::structural("labels: labels must be distinct"));
        }
        g.labels = Some(labels);
        Ok(g)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn empty(&self) -> Element {
        Element::zero(self.size)
    }

    pub fn top(&self) -> Element {
        Element::zero(self.size).complement()
    }

    pub fn atom(&self, index: usize) -> Result<Element> {
        Element::from_atoms(self.size, [index])
    }

    pub fn element(&self, atoms: impl IntoIterator<Item = usize>) -> Result<Element> {
        Element::from_atoms(self.size, atoms)
    }
}

/// A member of `P([0, ground))`, stored as a bit-vector over atoms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    ground: usize,
    words: Vec<u64>,
}

fn word_count(ground: usize) -> usize {
    ground.div_ceil(64)
}

impl Element {
    pub fn zero(ground: usize) -> Self {
        Element {
            ground,
            words: vec![0; word_count(ground)],
        }
    }

    pub fn from_atoms(ground: usize, atoms: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut e = Element::zero(ground);
        for a in atoms {
            if a >= ground {
                return Err(Error::structural(format!(
                    "atom index {a} out of range for ground of size {ground}"
                )));
            }
            e.words[a / 64] |= 1u64 << (a % 64);
        }
        Ok(e)
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn contains(&self, atom: usize) -> bool {
        atom < self.ground && self.words[atom / 64] >> (atom % 64) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i * 64 + tz)
            })
        })
    }

    fn check_ground(&self, other: &Element) -> Result<()> {
        if self.ground != other.ground {
            return Err(Error::structural(format!(
                "mismatched grounds: {} vs {}",
                self.ground, other.ground
            )));
        }
        Ok(())
    }

    pub fn meet(&self, other: &Element) -> Result<Element> {
        self.check_ground(other)?;
        Ok(self.zip_with(other, |a, b| a & b))
    }

    pub fn join(&self, other: &Element) -> Result<Element> {
        self.check_ground(other)?;
        Ok(self.zip_with(other, |a, b| a | b))
    }

    pub fn complement(&self) -> Element {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.ground % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Element {
            ground: self.ground,
            words,
        }
    }

    pub fn is_subset(&self, other: &Element) -> Result<bool> {
        self.check_ground(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    /// Meet without the ground check, for callers that already know both
    /// sides come from the same family.
    pub(crate) fn meet_unchecked(&self, other: &Element) -> Element {
        self.zip_with(other, |a, b| a & b)
    }

    fn zip_with(&self, other: &Element, f: impl Fn(u64, u64) -> u64) -> Element {
        Element {
            ground: self.ground,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}

/// A finite list of nonzero elements over one ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    ground: GroundSet,
    elements: Vec<Element>,
    dedup: bool,
}

impl Family {
    /// Fails on a zero element or on an element over a different ground.
    pub fn new(ground: GroundSet, elements: Vec<Element>) -> Result<Self> {
        for (i, e) in elements.iter().enumerate() {
            if e.ground() != ground.size() {
                return Err(Error::structural(format!(
                    "elements[{i}]: ground {} does not match family ground {}",
                    e.ground(),
                    ground.size()
                )));
            }
            if e.is_zero() {
                return Err(Error::domain(format!(
                    "elements[{i}]: empty element is not in B+"
                )));
            }
        }
        Ok(Family {
            ground,
            elements,
            dedup: false,
        })
    }

    pub fn from_atom_lists(ground: GroundSet, lists: &[Vec<usize>]) -> Result<Self> {
        let elements = lists
            .iter()
            .enumerate()
            .map(|(i, l)| {
                Element::from_atoms(ground.size(), l.iter().copied())
                    .map_err(|e| Error::structural(format!("elements[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Family::new(ground, elements)
    }

    /// Same family with repeated elements merged, keeping first occurrences.
    pub fn deduplicated(&self) -> Family {
        let mut seen = std::collections::HashSet::new();
        let elements = self
            .elements
            .iter()
            .filter(|e| seen.insert((*e).clone()))
            .cloned()
            .collect();
        Family {
            ground: self.ground.clone(),
            elements,
            dedup: true,
        }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_dedup(&self) -> bool {
        self.dedup
    }

    pub fn subfamily(&self, indices: &[usize]) -> Result<Family> {
        let elements = indices
            .iter()
            .map(|&i| {
                self.elements.get(i).cloned().ok_or_else(|| {
                    Error::structural(format!(
                        "element index {i} out of range for family of size {}",
                        self.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Family {
            ground: self.ground.clone(),
            elements,
            dedup: self.dedup,
        })
    }

    /// Meet of all elements; the top element for an empty family.
    pub fn global_meet(&self) -> Element {
        self.elements
            .iter()
            .fold(self.ground.top(), |acc, e| acc.meet_unchecked(e))
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile {
            ground: self.ground.size(),
            labels: self.ground.labels().map(|l| l.to_vec()),
            elements: self.elements.iter().map(|e| e.atoms().collect()).collect(),
        }
    }
}

/// Canonical on-disk instance:
/// `{ "ground": n, "labels": [...], "elements": [[atoms], ...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub ground: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub elements: Vec<Vec<usize>>,
}

impl FamilyFile {
    pub fn into_family(&self) -> Result<Family> {
        let ground = match &self.labels {
            Some(l) => GroundSet::with_labels(self.ground, l.clone()),
            None => GroundSet::new(self.ground),
        }
        .map_err(|e| Error::structural(format!("ground: {e}")))?;
        Family::from_atom_lists(ground, &self.elements)
    }
}

/// True iff distinct positions hold pairwise disjoint elements.
pub fn is_antichain(f: &Family) -> bool {
    let els = f.elements();
    (0..els.len()).all(|i| (i + 1..els.len()).all(|j| els[i].meet_unchecked(&els[j]).is_zero()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenteredCheck {
    pub centered: bool,
    pub global_meet_nonzero: bool,
    /// Smallest subfamily (element indices) with zero meet, when one of size
    /// at most the search bound exists.
    pub witness: Option<Vec<usize>>,
}

pub fn is_centered(f: &Family) -> CenteredCheck {
    is_centered_with_bound(f, DEFAULT_CENTERED_BOUND)
}

/// Decides centeredness exactly and searches subfamilies of size up to
/// `bound` for a smallest one with zero meet.
///
/// In a set algebra the whole family is itself a finite subfamily, so a zero
/// global meet settles the question; `bound` only limits the witness search.
pub fn is_centered_with_bound(f: &Family, bound: usize) -> CenteredCheck {
    let global_meet_nonzero = !f.global_meet().is_zero();
    if global_meet_nonzero {
        return CenteredCheck {
            centered: true,
            global_meet_nonzero,
            witness: None,
        };
    }
    let n = f.len();
    let mut witness = None;
    for size in 1..=bound.min(n) {
        if let Some(w) = first_zero_meet_of_size(f, size) {
            witness = Some(w);
            break;
        }
    }
    CenteredCheck {
        centered: false,
        global_meet_nonzero,
        witness,
    }
}

fn first_zero_meet_of_size(f: &Family, size: usize) -> Option<Vec<usize>> {
    fn rec(
        els: &[Element],
        start: usize,
        size: usize,
        acc: &Element,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == size {
            return acc.is_zero();
        }
        let remaining = size - chosen.len();
        for i in start..=els.len() - remaining {
            let next = acc.meet_unchecked(&els[i]);
            chosen.push(i);
            if rec(els, i + 1, size, &next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::with_capacity(size);
    rec(f.elements(), 0, size, &f.ground().top(), &mut chosen).then_some(chosen)
}

/// `P(ground) / <generators>`: the set algebra on the atoms outside the
/// union of the generators, with the trace map onto it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub ground: GroundSet,
    /// Original index of each surviving atom, in increasing order.
    pub surviving: Vec<usize>,
    source_size: usize,
}

impl Quotient {
    pub fn project(&self, e: &Element) -> Result<Element> {
        if e.ground() != self.source_size {
            return Err(Error::structural(format!(
                "element over ground {} projected through quotient of ground {}",
                e.ground(),
                self.source_size
            )));
        }
        Element::from_atoms(
            self.surviving.len(),
            self.surviving
                .iter()
                .enumerate()
                .filter(|(_, &orig)| e.contains(orig))
                .map(|(i, _)| i),
        )
    }
}

pub fn quotient_by_ideal(ground: &GroundSet, generators: &[Element]) -> Result<Quotient> {
    let mut union = ground.empty();
    for g in generators {
        union = union.join(g)?;
    }
    let surviving: Vec<usize> = (0..ground.size()).filter(|&a| !union.contains(a)).collect();
    if surviving.is_empty() {
        return Err(Error::domain(
            "ideal generators cover the whole ground: improper ideal",
        ));
    }
    let q_ground = match ground.labels() {
        Some(l) => GroundSet::with_labels(
            surviving.len(),
            surviving.iter().map(|&a| l[a].clone()).collect(),
        )?,
        None => GroundSet::new(surviving.len())?,
    };
    Ok(Quotient {
        ground: q_ground,
        surviving,
        source_size: ground.size(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(n: usize, atoms: &[usize]) -> Element {
        Element::from_atoms(n, atoms.iter().copied()).unwrap()
    }

    fn fam(n: usize, lists: &[&[usize]]) -> Family {
        let lists: Vec<Vec<usize>> = lists.iter().map(|l| l.to_vec()).collect();
        Family::from_atom_lists(GroundSet::new(n).unwrap(), &lists).unwrap()
    }

    #[test]
    fn meet_examples() {
        assert_eq!(el(3, &[0, 1]).meet(&el(3, &[1, 2])).unwrap(), el(3, &[1]));
        let a = el(3, &[0, 2]);
        assert_eq!(a.meet(&a).unwrap(), a);
        assert!(el(3, &[0]).meet(&el(3, &[1])).unwrap().is_zero());
        assert!(matches!(
            el(3, &[0]).meet(&el(4, &[0])),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn complement_masks_tail() {
        let top = GroundSet::new(70).unwrap().top();
        assert_eq!(top.count(), 70);
        assert!(top.complement().is_zero());
        assert_eq!(el(3, &[1]).complement(), el(3, &[0, 2]));
    }

    #[test]
    fn ground_and_labels() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::with_labels(2, vec!["a".into()]).is_err());
        assert!(GroundSet::with_labels(2, vec!["a".into(), "a".into()]).is_err());
        assert!(GroundSet::with_labels(2, vec!["a".into(), "b".into()]).is_ok());
        assert!(Element::from_atoms(3, [3]).is_err());
    }

    #[test]
    fn family_rejects_zero_elements() {
        let g = GroundSet::new(3).unwrap();
        let err = Family::from_atom_lists(g, &[vec![0], vec![]]).unwrap_err();
        assert!(err.to_string().contains("elements[1]"));
    }

    #[test]
    fn dedup_keeps_first_occurrences() {
        let f = fam(3, &[&[0], &[1], &[0], &[1, 2]]);
        let d = f.deduplicated();
        assert!(d.is_dedup());
        assert_eq!(d.len(), 3);
        assert_eq!(d.elements()[2], el(3, &[1, 2]));
    }

    #[test]
    fn antichain_examples() {
        assert!(is_antichain(&fam(3, &[&[0], &[1], &[2]])));
        assert!(!is_antichain(&fam(3, &[&[0, 1], &[1, 2]])));
        assert!(is_antichain(&fam(3, &[&[0, 1]])));
    }

    #[test]
    fn centered_examples() {
        let c = is_centered(&fam(3, &[&[0, 1], &[0, 2], &[0]]));
        assert!(c.centered && c.global_meet_nonzero);

        let c = is_centered(&fam(3, &[&[0], &[1]]));
        assert!(!c.centered);
        assert_eq!(c.witness, Some(vec![0, 1]));

        // Pairwise intersecting, but no atom is common to all three.
        let c = is_centered(&fam(3, &[&[0, 1], &[1, 2], &[0, 2]]));
        assert!(!c.centered);
        assert_eq!(c.witness, Some(vec![0, 1, 2]));
    }

    #[test]
    fn centered_witness_respects_bound() {
        let c = is_centered_with_bound(&fam(3, &[&[0, 1], &[1, 2], &[0, 2]]), 2);
        assert!(!c.centered);
        assert_eq!(c.witness, None);
    }

    #[test]
    fn quotient_examples() {
        let g = GroundSet::new(4).unwrap();
        let q = quotient_by_ideal(&g, &[el(4, &[3])]).unwrap();
        assert_eq!(q.surviving, vec![0, 1, 2]);
        assert_eq!(q.project(&el(4, &[1, 3])).unwrap(), el(3, &[1]));

        let q = quotient_by_ideal(&g, &[]).unwrap();
        assert_eq!(q.surviving, vec![0, 1, 2, 3]);
        assert_eq!(q.project(&el(4, &[0, 3])).unwrap(), el(4, &[0, 3]));

        let err = quotient_by_ideal(&g, &[el(4, &[0, 1]), el(4, &[2, 3])]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn family_file_round_trip() {
        let text = r#"{"ground":3,"elements":[[0,1],[2],[0,1]]}"#;
        let file: FamilyFile = serde_json::from_str(text).unwrap();
        let f = file.into_family().unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(serde_json::to_string(&f.to_file()).unwrap(), text);
    }

    fn element_strategy(n: usize) -> impl Strategy<Value = Element> {
        proptest::collection::vec(any::<bool>(), n).prop_map(move |bits| {
            Element::from_atoms(
                n,
                bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
            )
            .unwrap()
        })
    }

    fn triple() -> impl Strategy<Value = (Element, Element, Element)> {
        (1usize..80).prop_flat_map(|n| {
            (
                element_strategy(n),
                element_strategy(n),
                element_strategy(n),
            )
        })
    }

    proptest! {
        #[test]
        fn boolean_algebra_laws((a, b, c) in triple()) {
            let m = |x: &Element, y: &Element| x.meet(y).unwrap();
            let j = |x: &Element, y: &Element| x.join(y).unwrap();
            prop_assert_eq!(m(&m(&a, &b), &c), m(&a, &m(&b, &c)));
            prop_assert_eq!(j(&j(&a, &b), &c), j(&a, &j(&b, &c)));
            prop_assert_eq!(m(&a, &j(&b, &c)), j(&m(&a, &b), &m(&a, &c)));
            prop_assert_eq!(j(&a, &m(&b, &c)), m(&j(&a, &b), &j(&a, &c)));
            prop_assert_eq!(m(&a, &b).complement(), j(&a.complement(), &b.complement()));
            prop_assert_eq!(j(&a, &b).complement(), m(&a.complement(), &b.complement()));
            prop_assert!(m(&a, &a.complement()).is_zero());
        }

        #[test]
        fn quotient_is_homomorphism(
            (a, b, gen) in triple()
        ) {
            let ground = GroundSet::new(a.ground()).unwrap();
            prop_assume!(gen.count() < a.ground());
            let q = quotient_by_ideal(&ground, &[gen]).unwrap();
            let p = |x: &Element| q.project(x).unwrap();
            prop_assert_eq!(p(&a.meet(&b).unwrap()), p(&a).meet(&p(&b)).unwrap());
            prop_assert_eq!(p(&a.join(&b).unwrap()), p(&a).join(&p(&b)).unwrap());
            prop_assert_eq!(p(&a.complement()), p(&a).complement());
        }

        #[test]
        fn antichain_is_not_centered(parts in proptest::collection::vec(0usize..6, 2..6)) {
            // Assign each atom to one block; nonempty blocks form an antichain.
            let n = parts.len();
            let mut lists: Vec<Vec<usize>> = vec![Vec::new(); 6];
            for (atom, &block) in parts.iter().enumerate() {
                lists[block].push(atom);
            }
            lists.retain(|l| !l.is_empty());
            let f = Family::from_atom_lists(GroundSet::new(n).unwrap(), &lists).unwrap();
            prop_assert!(is_antichain(&f));
            if f.len() >= 2 {
                prop_assert!(!is_centered(&f).centered);
            }
        }
    }
}
