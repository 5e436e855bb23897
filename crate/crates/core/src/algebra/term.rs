use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Element, FiniteBao};
use crate::error::{Error, Result};

/// Terms over the `TCA_n` signature plus the derived operators `q_i`, `s_i^j`
/// and symmetric difference.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Var(String),
    Zero,
    One,
    Diag(usize, usize),
    Not(Box<Term>),
    Cyl(usize, Box<Term>),
    Int(usize, Box<Term>),
    Q(usize, Box<Term>),
    Subst(usize, usize, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Xor(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn cyl(i: usize, t: Term) -> Term {
        Term::Cyl(i, Box::new(t))
    }

    pub fn int(i: usize, t: Term) -> Term {
        Term::Int(i, Box::new(t))
    }

    pub fn q(i: usize, t: Term) -> Term {
        Term::Q(i, Box::new(t))
    }

    pub fn subst(i: usize, j: usize, t: Term) -> Term {
        Term::Subst(i, j, Box::new(t))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Term, b: Term) -> Term {
        Term::Xor(Box::new(a), Box::new(b))
    }

    /// Largest index mentioned, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One => 0,
            Term::Diag(i, j) => i.max(j) + 1,
            Term::Subst(i, j, t) => (i.max(j) + 1).max(t.arity()),
            Term::Not(t) => t.arity(),
            Term::Cyl(i, t) | Term::Int(i, t) | Term::Q(i, t) => (i + 1).max(t.arity()),
            Term::Join(a, b) | Term::Meet(a, b) | Term::Xor(a, b) => a.arity().max(b.arity()),
        }
    }
}

/// Evaluate `t` in `a` under `env`.
pub fn eval_term(a: &FiniteBao, t: &Term, env: &BTreeMap<String, Element>) -> Result<Element> {
    let need = t.arity();
    if need > a.dim() {
        return Err(Error::Index { index: need - 1, dim: a.dim() });
    }
    eval(a, t, env)
}

fn eval(a: &FiniteBao, t: &Term, env: &BTreeMap<String, Element>) -> Result<Element> {
    Ok(match t {
        Term::Var(v) => env.get(v).cloned().ok_or_else(|| Error::Unbound(v.clone()))?,
        Term::Zero => a.bottom(),
        Term::One => a.top(),
        Term::Diag(i, j) => a.diag(*i, *j),
        Term::Not(s) => a.complement(&eval(a, s, env)?),
        Term::Cyl(i, s) => a.cyl(*i, &eval(a, s, env)?),
        Term::Int(i, s) => a.interior(*i, &eval(a, s, env)?),
        Term::Q(i, s) => a.q(*i, &eval(a, s, env)?),
        Term::Subst(i, j, s) => a.subst(*i, *j, &eval(a, s, env)?),
        Term::Join(x, y) => a.join(&eval(a, x, env)?, &eval(a, y, env)?),
        Term::Meet(x, y) => a.meet(&eval(a, x, env)?, &eval(a, y, env)?),
        Term::Xor(x, y) => {
            let mut z = eval(a, x, env)?;
            z.symmetric_difference_with(&eval(a, y, env)?);
            z
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::complex_algebra;
    use crate::toposet::square_frame;

    fn square2() -> FiniteBao {
        complex_algebra(square_frame(2, 2, None).unwrap())
    }

    #[test]
    fn substitution_of_diagonal_is_top() {
        let a = square2();
        let env = BTreeMap::from([("x".to_string(), a.diag(0, 1))]);
        let v = eval_term(&a, &Term::subst(0, 1, Term::var("x")), &env).unwrap();
        assert_eq!(v, a.top());
    }

    #[test]
    fn q_of_top_is_top() {
        let a = square2();
        let v = eval_term(&a, &Term::q(0, Term::One), &BTreeMap::new()).unwrap();
        assert_eq!(v, a.top());
    }

    #[test]
    fn self_xor_is_bottom() {
        let a = square2();
        let env = BTreeMap::from([("x".to_string(), a.diag(0, 1))]);
        let v = eval_term(&a, &Term::xor(Term::var("x"), Term::var("x")), &env).unwrap();
        assert_eq!(v, a.bottom());
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let a = square2();
        assert!(matches!(
            eval_term(&a, &Term::var("y"), &BTreeMap::new()),
            Err(Error::Unbound(_))
        ));
    }

    #[test]
    fn index_out_of_range_is_an_error() {
        let a = square2();
        assert!(eval_term(&a, &Term::cyl(2, Term::One), &BTreeMap::new()).is_err());
    }
}
