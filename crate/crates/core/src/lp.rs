//! Exact linear programming over rationals.
//!
//! A dense two-phase tableau simplex with Bland's smallest-index rule for
//! both the entering and the leaving variable. Identical inputs always take
//! the same pivot path, so solutions (including which optimal vertex is
//! returned) are deterministic.
//!
//! Dual multipliers come from the final basis: each constraint row owns a
//! column that started as a unit vector (its slack or artificial), and the
//! reduced cost of that column is minus the row's multiplier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Default for Bound {
    fn default() -> Self {
        Bound::nonnegative()
    }
}

impl Bound {
    pub fn nonnegative() -> Self {
        Bound {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    pub fn free() -> Self {
        Bound {
            lower: None,
            upper: None,
        }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Bound {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpInstance {
    pub direction: Direction,
    pub objective: Vec<Rational>,
    /// Row-major constraint matrix.
    pub rows: Vec<Vec<Rational>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<Rational>,
    pub bounds: Vec<Bound>,
}

impl LpInstance {
    /// An instance over `vars` nonnegative variables with no rows yet.
    pub fn new(direction: Direction, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LpInstance {
            direction,
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![Bound::nonnegative(); n],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, sense: Sense, rhs: Rational) -> &mut Self {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn check_dimensions(&self) -> Result<()> {
        let n = self.num_vars();
        let m = self.rows.len();
        if self.senses.len() != m || self.rhs.len() != m {
            return Err(Error::structural(format!(
                "lp: {m} rows but {} senses and {} right-hand sides",
                self.senses.len(),
                self.rhs.len()
            )));
        }
        if self.bounds.len() != n {
            return Err(Error::structural(format!(
                "lp: {n} variables but {} bounds",
                self.bounds.len()
            )));
        }
        if let Some((i, row)) = self.rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::structural(format!(
                "lp: row {i} has {} coefficients, expected {n}",
                row.len()
            )));
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l > u {
                    return Err(Error::domain(format!(
                        "lp: variable {j} has lower bound {l} above upper bound {u}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; zero unless optimal.
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// One multiplier per constraint row.
    pub dual: Vec<Rational>,
}

impl LpSolution {
    fn without_optimum(status: LpStatus) -> Self {
        LpSolution {
            status,
            value: Rational::zero(),
            primal: Vec::new(),
            dual: Vec::new(),
        }
    }
}

/// How an original variable is expressed in nonnegative tableau columns:
/// `x = offset + sum(coeff * column)`.
struct VarMap {
    offset: Rational,
    terms: Vec<(usize, Rational)>,
}

struct Tableau {
    /// `B^-1 [A | b]`, rhs in the last column.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B^-1 A_j`, and `-c_B x_B` in the last slot.
    obj: Vec<Rational>,
    ncols: usize,
}

impl Tableau {
    fn price(&mut self, costs: &[Rational]) {
        let mut obj: Vec<Rational> = costs.to_vec();
        obj.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (o, t) in obj.iter_mut().zip(&self.t[i]) {
                *o -= &(cb * t);
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        let pivot_row: Vec<Rational> = self.t[row].iter().map(|v| v / &p).collect();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &(&f * pv);
                }
            }
        }
        let f = self.obj[col].clone();
        if !f.is_zero() {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &(&f * pv);
                }
            }
        }
        self.t[row] = pivot_row;
        self.basis[row] = col;
    }

    /// Runs Bland's rule to optimality; `false` when unbounded.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.ncols).find(|&j| allowed(j) && self.obj[j].is_positive());
            let Some(q) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.t.iter().enumerate() {
                let a = &row[q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, q),
                None => return false,
            }
        }
    }
}

pub fn solve(lp: &LpInstance) -> Result<LpSolution> {
    lp.check_dimensions()?;
    let n = lp.num_vars();

    // Internally always maximize.
    let costs: Vec<Rational> = match lp.direction {
        Direction::Maximize => lp.objective.clone(),
        Direction::Minimize => lp.objective.iter().map(|c| -c).collect(),
    };

    // Rewrite variables in terms of nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for b in &lp.bounds {
        match (&b.lower, &b.upper) {
            (Some(l), u) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = u {
                    bound_rows.push((col, u - l));
                }
                maps.push(VarMap {
                    offset: l.clone(),
                    terms: vec![(col, Rational::one())],
                });
            }
            (None, Some(u)) => {
                let col = ncols;
                ncols += 1;
                maps.push(VarMap {
                    offset: u.clone(),
                    terms: vec![(col, -Rational::one())],
                });
            }
            (None, None) => {
                let col = ncols;
                ncols += 2;
                maps.push(VarMap {
                    offset: Rational::zero(),
                    terms: vec![(col, Rational::one()), (col + 1, -Rational::one())],
                });
            }
        }
    }
    let nstd = ncols;

    // Standard-form rows over the nonnegative columns.
    let mut std_rows: Vec<(Vec<Rational>, Sense, Rational)> = Vec::new();
    for ((row, &sense), b) in lp.rows.iter().zip(&lp.senses).zip(&lp.rhs) {
        let mut coeffs = vec![Rational::zero(); nstd];
        let mut rhs = b.clone();
        for (a, map) in row.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            rhs -= &(a * &map.offset);
            for (col, c) in &map.terms {
                coeffs[*col] += &(a * c);
            }
        }
        std_rows.push((coeffs, sense, rhs));
    }
    for (col, ub) in &bound_rows {
        let mut coeffs = vec![Rational::zero(); nstd];
        coeffs[*col] = Rational::one();
        std_rows.push((coeffs, Sense::Le, ub.clone()));
    }
    let mut std_costs = vec![Rational::zero(); nstd];
    for (c, map) in costs.iter().zip(&maps) {
        for (col, k) in &map.terms {
            std_costs[*col] += &(c * k);
        }
    }

    // Make every rhs nonnegative, remembering which rows were negated.
    let mut row_sign = Vec::with_capacity(std_rows.len());
    for (coeffs, sense, rhs) in std_rows.iter_mut() {
        if rhs.is_negative() {
            for c in coeffs.iter_mut() {
                *c = -&*c;
            }
            *rhs = -&*rhs;
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
            row_sign.push(false);
        } else {
            row_sign.push(true);
        }
    }

    // Column layout: structural | one slack/surplus per inequality | one
    // artificial per >= or = row.
    let m = std_rows.len();
    let mut unit_col = vec![0usize; m];
    let mut extra: Vec<(usize, Rational)> = Vec::new();
    let mut col = nstd;
    for (i, (_, sense, _)) in std_rows.iter().enumerate() {
        match sense {
            Sense::Le => {
                extra.push((i, Rational::one()));
                unit_col[i] = col;
                col += 1;
            }
            Sense::Ge => {
                extra.push((i, -Rational::one()));
                col += 1;
            }
            Sense::Eq => {}
        }
    }
    let first_artificial = col;
    let mut artificials = Vec::new();
    for (i, (_, sense, _)) in std_rows.iter().enumerate() {
        if *sense != Sense::Le {
            unit_col[i] = col;
            artificials.push(col);
            col += 1;
        }
    }
    let total = col;

    let mut t = vec![vec![Rational::zero(); total + 1]; m];
    for (i, (coeffs, _, rhs)) in std_rows.iter().enumerate() {
        t[i][..nstd].clone_from_slice(coeffs);
        t[i][total] = rhs.clone();
        t[i][unit_col[i]] = Rational::one();
    }
    for (k, (i, v)) in extra.iter().enumerate() {
        t[*i][nstd + k] = v.clone();
    }
    let mut tab = Tableau {
        t,
        basis: unit_col.clone(),
        obj: Vec::new(),
        ncols: total,
    };

    // Phase 1: maximize -(sum of artificials).
    if !artificials.is_empty() {
        let mut phase1 = vec![Rational::zero(); total];
        for &a in &artificials {
            phase1[a] = -Rational::one();
        }
        tab.price(&phase1);
        tab.optimize(&|_| true);
        if !tab.obj[total].is_zero() {
            return Ok(LpSolution::without_optimum(LpStatus::Infeasible));
        }
        for i in 0..m {
            if tab.basis[i] >= first_artificial {
                if let Some(j) = (0..first_artificial).find(|&j| !tab.t[i][j].is_zero()) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    // Phase 2.
    let mut phase2 = std_costs;
    phase2.resize(total, Rational::zero());
    tab.price(&phase2);
    if !tab.optimize(&|j| j < first_artificial) {
        return Ok(LpSolution::without_optimum(LpStatus::Unbounded));
    }

    let mut xstd = vec![Rational::zero(); total];
    for (i, &b) in tab.basis.iter().enumerate() {
        xstd[b] = tab.t[i][total].clone();
    }
    let primal: Vec<Rational> = maps
        .iter()
        .map(|map| {
            let mut v = map.offset.clone();
            for (col, k) in &map.terms {
                v += &(k * &xstd[*col]);
            }
            v
        })
        .collect();

    let flip = lp.direction == Direction::Minimize;
    let dual: Vec<Rational> = (0..lp.num_rows())
        .map(|i| {
            let pi = -&tab.obj[unit_col[i]];
            let y = if row_sign[i] { pi } else { -pi };
            if flip {
                -y
            } else {
                y
            }
        })
        .collect();

    let value: Rational = lp.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();

    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        primal,
        dual,
    })
}

/// Objective bound implied by the row multipliers `y`, with the bound
/// multipliers chosen implicitly from the reduced costs. `None` when `y`
/// has a wrong sign or leaves a reduced cost pointing at an infinite bound.
pub fn dual_objective(lp: &LpInstance, y: &[Rational]) -> Option<Rational> {
    if y.len() != lp.num_rows() {
        return None;
    }
    let max = lp.direction == Direction::Maximize;
    for (yi, sense) in y.iter().zip(&lp.senses) {
        let ok = match (sense, max) {
            (Sense::Eq, _) => true,
            (Sense::Le, true) | (Sense::Ge, false) => !yi.is_negative(),
            (Sense::Ge, true) | (Sense::Le, false) => !yi.is_positive(),
        };
        if !ok {
            return None;
        }
    }
    let mut value: Rational = lp.rhs.iter().zip(y).map(|(b, yi)| b * yi).sum();
    for (j, bound) in lp.bounds.iter().enumerate() {
        let mut r = lp.objective[j].clone();
        for (row, yi) in lp.rows.iter().zip(y) {
            r -= &(&row[j] * yi);
        }
        if r.is_zero() {
            continue;
        }
        // Maximize: positive reduced cost pushes x up, so it is charged at
        // the upper bound. Minimize mirrors this.
        let at = if r.is_positive() == max {
            &bound.upper
        } else {
            &bound.lower
        };
        match at {
            Some(v) => value += &(&r * v),
            None => return None,
        }
    }
    Some(value)
}

pub fn is_primal_feasible(lp: &LpInstance, x: &[Rational]) -> bool {
    if x.len() != lp.num_vars() {
        return false;
    }
    let bounds_ok = lp.bounds.iter().zip(x).all(|(b, v)| {
        b.lower.as_ref().is_none_or(|l| v >= l) && b.upper.as_ref().is_none_or(|u| v <= u)
    });
    bounds_ok
        && lp
            .rows
            .iter()
            .zip(&lp.senses)
            .zip(&lp.rhs)
            .all(|((row, sense), b)| {
                let lhs: Rational = row.iter().zip(x).map(|(a, v)| a * v).sum();
                match sense {
                    Sense::Le => lhs <= *b,
                    Sense::Eq => lhs == *b,
                    Sense::Ge => lhs >= *b,
                }
            })
}

/// Checks an optimality certificate: primal feasibility, dual feasibility,
/// and exact equality of the primal objective, the dual objective and the
/// reported value.
pub fn verify(lp: &LpInstance, sol: &LpSolution) -> bool {
    if sol.status != LpStatus::Optimal || lp.check_dimensions().is_err() {
        return false;
    }
    if !is_primal_feasible(lp, &sol.primal) {
        return false;
    }
    let primal_value: Rational = lp
        .objective
        .iter()
        .zip(&sol.primal)
        .map(|(c, x)| c * x)
        .sum();
    match dual_objective(lp, &sol.dual) {
        Some(d) => d == primal_value && primal_value == sol.value,
        None => false,
    }
}
