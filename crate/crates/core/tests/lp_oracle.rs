//! Cross-checks the simplex against brute-force vertex enumeration.
//!
//! The oracle works on its own `i128` fractions and enumerates every basis
//! of the slack form, so it shares no code with the solver under test.

mod common;

use common::{best_basic_solution, q, to_rational, Q};
use kelleyscope::lp::{self, Direction, LpInstance, LpStatus, Sense};
use kelleyscope::Rational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Small {
    maximize: bool,
    c: Vec<i64>,
    a: Vec<Vec<i64>>,
    senses: Vec<Sense>,
    b: Vec<i64>,
}

impl Small {
    fn to_lp(&self) -> LpInstance {
        let dir = if self.maximize {
            Direction::Maximize
        } else {
            Direction::Minimize
        };
        let mut lp = LpInstance::new(
            dir,
            self.c.iter().map(|&v| Rational::from_integer(v)).collect(),
        );
        for ((row, &s), &b) in self.a.iter().zip(&self.senses).zip(&self.b) {
            lp.add_row(
                row.iter().map(|&v| Rational::from_integer(v)).collect(),
                s,
                Rational::from_integer(b),
            );
        }
        lp
    }
}

/// Random instance with x >= 0 and a row `sum x <= cap`, built around a
/// feasible point so it is always feasible and bounded.
fn random_instance(rng: &mut ChaCha8Rng) -> Small {
    let n = rng.gen_range(1..=8usize);
    let m = rng.gen_range(1..=8usize);
    let x0: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
    let mut a = Vec::new();
    let mut senses = Vec::new();
    let mut b = Vec::new();
    let cap: i64 = x0.iter().sum::<i64>() + rng.gen_range(0..=4);
    a.push(vec![1; n]);
    senses.push(Sense::Le);
    b.push(cap);
    for _ in 1..m {
        let row: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let lhs: i64 = row.iter().zip(&x0).map(|(p, q)| p * q).sum();
        let (s, rhs) = match rng.gen_range(0..3) {
            0 => (Sense::Le, lhs + rng.gen_range(0..=2)),
            1 => (Sense::Ge, lhs - rng.gen_range(0..=2)),
            _ => (Sense::Eq, lhs),
        };
        a.push(row);
        senses.push(s);
        b.push(rhs);
    }
    Small {
        maximize: rng.gen_bool(0.5),
        c: (0..n).map(|_| rng.gen_range(-4..=4)).collect(),
        a,
        senses,
        b,
    }
}

/// Best objective over all basic feasible solutions of the slack form.
fn vertex_oracle(p: &Small) -> Option<Q> {
    let n = p.c.len();
    let m = p.a.len();
    // Columns: structural then one slack per inequality.
    let mut cols: Vec<Vec<Q>> = (0..n)
        .map(|j| (0..m).map(|i| q(p.a[i][j] as i128)).collect())
        .collect();
    for (i, s) in p.senses.iter().enumerate() {
        let sign = match s {
            Sense::Le => 1,
            Sense::Ge => -1,
            Sense::Eq => continue,
        };
        let mut col = vec![q(0); m];
        col[i] = q(sign);
        cols.push(col);
    }
    let rhs: Vec<Q> = p.b.iter().map(|&v| q(v as i128)).collect();
    let mut c: Vec<Q> = p.c.iter().map(|&v| q(v as i128)).collect();
    c.resize(cols.len(), q(0));
    best_basic_solution(cols, rhs, &c, p.maximize)
}

#[test]
fn simplex_matches_vertex_enumeration() {
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_instance(&mut rng);
        let lp = p.to_lp();
        let sol = lp::solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal, "seed {seed}");
        assert!(lp::verify(&lp, &sol), "seed {seed}: certificate rejected");
        let oracle = vertex_oracle(&p).expect("feasible by construction");
        assert_eq!(sol.value, to_rational(oracle), "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn row_scaling_preserves_value(seed in any::<u64>(), scales in proptest::collection::vec(1i64..7, 8), dens in proptest::collection::vec(1i64..5, 8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_instance(&mut rng);
        let lp = p.to_lp();
        let mut scaled = lp.clone();
        for i in 0..scaled.num_rows() {
            let k = Rational::new(scales[i], dens[i]);
            for v in scaled.rows[i].iter_mut() {
                *v = &*v * &k;
            }
            scaled.rhs[i] = &scaled.rhs[i] * &k;
        }
        let a = lp::solve(&lp).unwrap();
        let b = lp::solve(&scaled).unwrap();
        prop_assert_eq!(&a.value, &b.value);
        prop_assert!(lp::verify(&scaled, &b));

        // Scaling the objective scales the value.
        let k = Rational::new(scales[0], dens[0]);
        let mut obj_scaled = lp.clone();
        for c in obj_scaled.objective.iter_mut() {
            *c = &*c * &k;
        }
        let c = lp::solve(&obj_scaled).unwrap();
        prop_assert_eq!(c.value, &a.value * &k);
    }
}
