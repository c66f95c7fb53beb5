//! Right-hand sides that depend on exogenous parameters.
//!
//! Constraint RHS values are polynomials in named parameters (demands),
//! never baked-in floats, so that envelope-theorem gradients can be read
//! off the duals without re-deriving which rows a demand entered.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A scalar exogenous parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ParamId {
    /// Real power demand at `bus` in `period` (MW).
    DemandReal { bus: usize, period: usize },
    /// Reactive power demand at `bus` in `period` (MVAr).
    DemandImag { bus: usize, period: usize },
    /// Anonymous parameter, used by generic models and tests.
    Free(u32),
}

/// Values for every parameter a model references.
pub type ParamValues = BTreeMap<ParamId, f64>;

/// b(u) = constant + sum_k coeff_k * u_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineRhs {
    pub constant: f64,
    pub terms: Vec<(ParamId, f64)>,
}

impl AffineRhs {
    pub fn constant(c: f64) -> Self {
        AffineRhs {
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn term(param: ParamId, coeff: f64) -> Self {
        AffineRhs {
            constant: 0.0,
            terms: vec![(param, coeff)],
        }
    }

    pub fn eval(&self, params: &ParamValues) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|(p, c)| c * params.get(p).copied().unwrap_or(0.0))
                .sum::<f64>()
    }
}

/// RHS polynomial: affine, or the square of an affine form (RLT rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RhsPolynomial {
    Affine(AffineRhs),
    SquaredAffine(AffineRhs),
}

impl RhsPolynomial {
    pub fn constant(c: f64) -> Self {
        RhsPolynomial::Affine(AffineRhs::constant(c))
    }

    pub fn eval(&self, params: &ParamValues) -> f64 {
        match self {
            RhsPolynomial::Affine(a) => a.eval(params),
            RhsPolynomial::SquaredAffine(a) => {
                let v = a.eval(params);
                v * v
            }
        }
    }

    /// Accumulate `scale * d(rhs)/d(param)` into `out` for every parameter
    /// this RHS depends on.
    pub fn accumulate_grad(&self, params: &ParamValues, scale: f64, out: &mut ParamValues) {
        match self {
            RhsPolynomial::Affine(a) => {
                for (p, c) in &a.terms {
                    *out.entry(*p).or_insert(0.0) += scale * c;
                }
            }
            RhsPolynomial::SquaredAffine(a) => {
                let v = a.eval(params);
                for (p, c) in &a.terms {
                    *out.entry(*p).or_insert(0.0) += scale * 2.0 * v * c;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(ParamId, f64)]) -> ParamValues {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn affine_eval_and_grad() {
        let p0 = ParamId::Free(0);
        let p1 = ParamId::Free(1);
        let rhs = RhsPolynomial::Affine(AffineRhs {
            constant: 2.0,
            terms: vec![(p0, 3.0), (p1, -1.0)],
        });
        let vals = params(&[(p0, 4.0), (p1, 10.0)]);
        // 2 + 3*4 - 10 = 4
        assert_eq!(rhs.eval(&vals), 4.0);
        let mut g = ParamValues::new();
        rhs.accumulate_grad(&vals, 2.0, &mut g);
        assert_eq!(g[&p0], 6.0);
        assert_eq!(g[&p1], -2.0);
    }

    #[test]
    fn squared_eval_and_chain_rule() {
        let p0 = ParamId::Free(0);
        let rhs = RhsPolynomial::SquaredAffine(AffineRhs {
            constant: 1.0,
            terms: vec![(p0, 2.0)],
        });
        let vals = params(&[(p0, 3.0)]);
        // (1 + 6)^2 = 49
        assert_eq!(rhs.eval(&vals), 49.0);
        let mut g = ParamValues::new();
        rhs.accumulate_grad(&vals, 1.0, &mut g);
        // d/dp (1+2p)^2 = 2*(1+2p)*2 = 28 at p=3
        assert_eq!(g[&p0], 28.0);
    }

    #[test]
    fn missing_param_counts_as_zero() {
        let p0 = ParamId::Free(0);
        let rhs = RhsPolynomial::Affine(AffineRhs::term(p0, 5.0));
        assert_eq!(rhs.eval(&ParamValues::new()), 0.0);
    }
}
