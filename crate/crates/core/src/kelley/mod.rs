//! Strictly positive measures and covers by families of positive
//! intersection number, in both directions, at finite scale.
//!
//! * [`synthesize_measure_from_cover`]: given classes with witness measures
//!   and positive thresholds, average the witnesses with weights `2^-j` into
//!   one measure that is positive on every covered element.
//! * [`cover_from_measure`]: given a measure, split a family into bands
//!   `{a : mu(a) >= q}` along a threshold grid; each band has intersection
//!   number at least its threshold.
//!
//! The minimal `epsilon`-cover search lives in [`mn`].

pub mod mn;

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Family};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use mn::{
    class_feasible, mn_min_cover, mn_min_cover_with, ClassFeasibility, MnMode, MnReport,
    DEFAULT_SEARCH_BUDGET,
};

/// A probability measure on the atoms of a finite ground set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct Measure {
    weights: Vec<Rational>,
}

impl Measure {
    /// Fails unless every weight is nonnegative and they sum to exactly 1.
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("measure needs at least one atom"));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| w.is_negative()) {
            return Err(Error::domain(format!(
                "measure weight {i} is negative ({w})"
            )));
        }
        let total: Rational = weights.iter().sum();
        if total != 1 {
            return Err(Error::domain(format!(
                "measure weights sum to {total}, not 1"
            )));
        }
        Ok(Measure { weights })
    }

    pub fn uniform(ground: usize) -> Self {
        assert!(ground > 0);
        Measure {
            weights: vec![Rational::new(1, ground as i64); ground],
        }
    }

    pub fn point_mass(ground: usize, atom: usize) -> Self {
        assert!(atom < ground);
        let mut weights = vec![Rational::zero(); ground];
        weights[atom] = Rational::one();
        Measure { weights }
    }

    pub fn ground(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// `mu(a)`; atoms outside the measure's ground contribute nothing.
    pub fn of(&self, a: &Element) -> Rational {
        a.atoms().filter_map(|x| self.weights.get(x)).sum()
    }

    /// `min_{a in f} mu(a)`, or `None` for an empty family.
    pub fn min_over(&self, f: &Family) -> Option<Rational> {
        f.elements().iter().map(|a| self.of(a)).min()
    }
}

impl TryFrom<Vec<Rational>> for Measure {
    type Error = Error;
    fn try_from(v: Vec<Rational>) -> Result<Self> {
        Measure::new(v)
    }
}

impl From<Measure> for Vec<Rational> {
    fn from(m: Measure) -> Self {
        m.weights
    }
}

/// Where strict positivity is checked.
#[derive(Debug, Clone, Copy)]
pub enum PositivityTarget<'a> {
    /// Every nonzero element of the full algebra; equivalently every atom.
    FullAlgebra,
    Family(&'a Family),
}

pub fn is_strictly_positive(mu: &Measure, target: PositivityTarget<'_>) -> bool {
    match target {
        PositivityTarget::FullAlgebra => mu.weights().iter().all(Rational::is_positive),
        PositivityTarget::Family(f) => f.elements().iter().all(|a| mu.of(a).is_positive()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverClass {
    /// Element indices into the family.
    pub members: Vec<usize>,
    pub threshold: Rational,
    pub witness: Measure,
}

/// Classes of a family, each certified by a measure that is at least the
/// class threshold on every member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub classes: Vec<CoverClass>,
    pub covers_all: bool,
}

impl CoverCertificate {
    /// Builds the certificate and computes `covers_all` against `f`.
    pub fn new(f: &Family, classes: Vec<CoverClass>) -> Self {
        let mut seen = vec![false; f.len()];
        for c in &classes {
            for &i in &c.members {
                if let Some(s) = seen.get_mut(i) {
                    *s = true;
                }
            }
        }
        CoverCertificate {
            classes,
            covers_all: seen.iter().all(|s| *s),
        }
    }

    /// Structural checks against `f`: classes nonempty, indices in range,
    /// witness grounds match, and the recorded `covers_all` is accurate.
    pub fn check_structure(&self, f: &Family) -> Result<()> {
        for (j, c) in self.classes.iter().enumerate() {
            if c.members.is_empty() {
                return Err(Error::structural(format!("classes[{j}]: class is empty")));
            }
            if let Some(i) = c.members.iter().find(|&&i| i >= f.len()) {
                return Err(Error::structural(format!(
                    "classes[{j}]: element index {i} out of range for family of size {}",
                    f.len()
                )));
            }
            if c.witness.ground() != f.ground().size() {
                return Err(Error::structural(format!(
                    "classes[{j}]: witness has {} weights, ground has {} atoms",
                    c.witness.ground(),
                    f.ground().size()
                )));
            }
        }
        let recomputed = CoverCertificate::new(f, self.classes.clone()).covers_all;
        if recomputed != self.covers_all {
            return Err(Error::structural(format!(
                "covers_all is recorded as {} but the classes give {recomputed}",
                self.covers_all
            )));
        }
        Ok(())
    }
}

/// Per-class check: does the witness reach the threshold on every member?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub class: usize,
    pub verified: bool,
    /// Smallest witness value over the class members.
    pub min_value: Rational,
}

pub fn verify_classes(f: &Family, cover: &CoverCertificate) -> Result<Vec<ClassVerdict>> {
    cover.check_structure(f)?;
    Ok(cover
        .classes
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let min_value = c
                .members
                .iter()
                .map(|&i| c.witness.of(&f.elements()[i]))
                .min()
                .expect("classes are nonempty");
            ClassVerdict {
                class: j,
                verified: min_value >= c.threshold,
                min_value,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesizedMeasure {
    pub measure: Measure,
    /// `c` in `mu = c * sum_j 2^-j witness_j`.
    pub normalization: Rational,
    /// `2^-j` for classes `j = 1, 2, ...`.
    pub class_weights: Vec<Rational>,
    pub strictly_positive_on_family: bool,
    pub strictly_positive_on_full_algebra: bool,
    /// The cover reaches every atom of the ground as a family member.
    pub exhausts_full_algebra: bool,
}

/// `mu = c * sum_j 2^-j witness_j` with `c = 1 / sum_j 2^-j`, classes
/// numbered from 1. For `a` in class `j`, `mu(a) >= c * 2^-j * threshold_j`.
pub fn synthesize_measure_from_cover(
    f: &Family,
    cover: &CoverCertificate,
) -> Result<SynthesizedMeasure> {
    if cover.classes.is_empty() {
        return Err(Error::domain("cover has no classes"));
    }
    for (j, c) in cover.classes.iter().enumerate() {
        if !c.threshold.is_positive() {
            return Err(Error::domain(format!(
                "classes[{j}]: threshold {} is not positive",
                c.threshold
            )));
        }
    }
    for v in verify_classes(f, cover)? {
        if !v.verified {
            return Err(Error::Certificate {
                class: v.class,
                reason: format!(
                    "witness gives {} on some member, below threshold {}",
                    v.min_value, cover.classes[v.class].threshold
                ),
            });
        }
    }

    let class_weights: Vec<Rational> = (1..=cover.classes.len())
        .map(|j| Rational::pow2_neg(j as u32))
        .collect();
    let normalization = class_weights.iter().sum::<Rational>().recip();
    let n = f.ground().size();
    let mut weights = vec![Rational::zero(); n];
    for (c, cw) in cover.classes.iter().zip(&class_weights) {
        let k = cw * &normalization;
        for (w, v) in weights.iter_mut().zip(c.witness.weights()) {
            *w += &(&k * v);
        }
    }
    let measure = Measure::new(weights)?;
    let covered_atoms: Vec<bool> = {
        let mut seen = vec![false; n];
        for c in &cover.classes {
            for &i in &c.members {
                let e = &f.elements()[i];
                if e.count() == 1 {
                    seen[e.atoms().next().expect("one atom")] = true;
                }
            }
        }
        seen
    };
    Ok(SynthesizedMeasure {
        strictly_positive_on_family: is_strictly_positive(&measure, PositivityTarget::Family(f)),
        strictly_positive_on_full_algebra: is_strictly_positive(
            &measure,
            PositivityTarget::FullAlgebra,
        ),
        exhausts_full_algebra: covered_atoms.iter().all(|s| *s),
        measure,
        normalization,
        class_weights,
    })
}

/// Bands `{a : mu(a) >= q}` along a descending grid; each element joins the
/// first (largest) threshold it meets. Empty bands are dropped.
pub fn cover_from_measure(mu: &Measure, f: &Family, grid: &[Rational]) -> Result<CoverCertificate> {
    if grid.is_empty() {
        return Err(Error::domain("threshold grid is empty"));
    }
    if let Some(q) = grid.iter().find(|q| !q.is_positive() || **q > 1) {
        return Err(Error::domain(format!("grid value {q} is outside (0, 1]")));
    }
    if grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::domain("threshold grid must be strictly descending"));
    }
    if mu.ground() != f.ground().size() {
        return Err(Error::structural(format!(
            "measure has {} weights, ground has {} atoms",
            mu.ground(),
            f.ground().size()
        )));
    }
    let mut bands: Vec<Vec<usize>> = vec![Vec::new(); grid.len()];
    for (i, a) in f.elements().iter().enumerate() {
        let m = mu.of(a);
        if let Some(b) = grid.iter().position(|q| m >= *q) {
            bands[b].push(i);
        }
    }
    let classes = bands
        .into_iter()
        .zip(grid)
        .filter(|(members, _)| !members.is_empty())
        .map(|(members, q)| CoverClass {
            members,
            threshold: q.clone(),
            witness: mu.clone(),
        })
        .collect();
    Ok(CoverCertificate::new(f, classes))
}
