//! Fourier–Motzkin feasibility for small systems of strict and non-strict
//! linear inequalities over the rationals.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// `Σ coeffs[i]·x_i + constant > 0` (strict) or `≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
    pub strict: bool,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, constant: Rational, strict: bool) -> Constraint {
        Constraint { coeffs, constant, strict }
    }

    /// Scales so the first nonzero coefficient has magnitude 1, which makes
    /// duplicate detection structural.
    fn canonical(mut self) -> Constraint {
        let pivot = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs());
        if let Some(p) = pivot {
            for c in &mut self.coeffs {
                *c /= &p;
            }
            self.constant /= &p;
        }
        self
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn trivially_holds(&self) -> bool {
        if self.strict {
            self.constant.is_positive()
        } else {
            !self.constant.is_negative()
        }
    }
}

/// `Some(true)` if the system has a rational solution, `Some(false)` if it
/// has none, `None` if elimination exceeded `cap` constraints.
pub fn feasible(n_vars: usize, constraints: &[Constraint], cap: usize) -> Option<bool> {
    let mut set: BTreeSet<Constraint> = BTreeSet::new();
    for c in constraints {
        debug_assert_eq!(c.coeffs.len(), n_vars);
        if c.is_trivial() {
            if !c.trivially_holds() {
                return Some(false);
            }
            continue;
        }
        set.insert(c.clone().canonical());
    }
    for k in 0..n_vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for c in set {
            if c.coeffs[k].is_positive() {
                pos.push(c);
            } else if c.coeffs[k].is_negative() {
                neg.push(c);
            } else {
                rest.insert(c);
            }
        }
        if pos.len() * neg.len() + rest.len() > cap {
            return None;
        }
        for p in &pos {
            for n in &neg {
                let a = &p.coeffs[k];
                let b = -&n.coeffs[k];
                let coeffs: Vec<Rational> =
                    p.coeffs.iter().zip(&n.coeffs).map(|(x, y)| x * &b + y * a).collect();
                let c = Constraint {
                    coeffs,
                    constant: &p.constant * &b + &n.constant * a,
                    strict: p.strict || n.strict,
                };
                if c.is_trivial() {
                    if !c.trivially_holds() {
                        return Some(false);
                    }
                } else {
                    rest.insert(c.canonical());
                }
            }
        }
        set = rest;
    }
    Some(set.iter().all(Constraint::trivially_holds))
}
