//! Formulas with `m` variables over the atoms of an algebra, evaluated with
//! the clique-guarded semantics.
//!
//! Syntax: `a(x0,x1)` (an atom applied to `n` variables; quote names with
//! odd characters as `"(0,1)"(x0,x1)`), `x0 = x1`, `true`, `false`, `!φ`,
//! `φ & ψ`, `φ | ψ`, `exists x1 φ`, `box x0 φ`, parentheses.

use std::fmt;

use super::square::{check_size, CliqueTest};
use super::Representation;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    Atom { name: String, vars: Vec<usize> },
    Eq(usize, usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(usize, Box<Formula>),
    Interior(usize, Box<Formula>),
}

impl Formula {
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Formula::True => None,
            Formula::Atom { vars, .. } => vars.iter().copied().max(),
            Formula::Eq(i, j) => Some(*i.max(j)),
            Formula::Not(f) => f.max_var(),
            Formula::And(f, g) | Formula::Or(f, g) => f.max_var().max(g.max_var()),
            Formula::Exists(i, f) | Formula::Interior(i, f) => Some(f.max_var().map_or(*i, |v| v.max(*i))),
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::Atom { .. } | Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(f, g) | Formula::Or(f, g) => f.quantifier_depth().max(g.quantifier_depth()),
            Formula::Exists(_, f) | Formula::Interior(_, f) => 1 + f.quantifier_depth(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let plain = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || "_.^{}-+".contains(c));
        match self {
            Formula::True => write!(f, "true"),
            Formula::Atom { name, vars } => {
                let vs: Vec<String> = vars.iter().map(|v| format!("x{v}")).collect();
                if plain(name) && !matches!(name.as_str(), "true" | "false" | "exists" | "box") {
                    write!(f, "{name}({})", vs.join(","))
                } else {
                    write!(f, "{name:?}({})", vs.join(","))
                }
            }
            Formula::Eq(i, j) => write!(f, "x{i} = x{j}"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::And(g, h) => write!(f, "({g} & {h})"),
            Formula::Or(g, h) => write!(f, "({g} | {h})"),
            Formula::Exists(i, g) => write!(f, "exists x{i} {g}"),
            Formula::Interior(i, g) => write!(f, "box x{i} {g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Quoted(String),
    Var(usize),
    Open,
    Close,
    Comma,
    Equals,
    Not,
    And,
    Or,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut it = src.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '(' | ')' | ',' | '=' | '!' | '~' | '&' | '|' => {
                it.next();
                out.push(match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    ',' => Tok::Comma,
                    '=' => Tok::Equals,
                    '&' => Tok::And,
                    '|' => Tok::Or,
                    _ => Tok::Not,
                });
            }
            '"' => {
                it.next();
                let mut s = String::new();
                loop {
                    match it.next() {
                        Some('"') => break,
                        Some('\\') => s.extend(it.next()),
                        Some(ch) => s.push(ch),
                        None => return Err(Error::Parse("unterminated quoted name".into())),
                    }
                }
                out.push(Tok::Quoted(s));
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = it.peek() {
                    if ch.is_alphanumeric() || "_.^{}-+".contains(ch) {
                        s.push(ch);
                        it.next();
                    } else {
                        break;
                    }
                }
                if s.is_empty() {
                    return Err(Error::Parse(format!("unexpected character `{c}`")));
                }
                let var = s.strip_prefix('x').and_then(|d| d.parse::<usize>().ok());
                out.push(match var {
                    Some(v) => Tok::Var(v),
                    None => Tok::Name(s),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(Error::Parse(format!("expected {want:?}, found {other:?}"))),
        }
    }

    fn var(&mut self) -> Result<usize> {
        match self.next() {
            Some(Tok::Var(v)) => Ok(v),
            other => Err(Error::Parse(format!("expected a variable, found {other:?}"))),
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.next();
            f = Formula::Or(Box::new(f), Box::new(self.and()?));
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.next();
            f = Formula::And(Box::new(f), Box::new(self.unary()?));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.next();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Name(k)) if (k == "exists" || k == "box") && matches!(self.toks.get(self.at + 1), Some(Tok::Var(_))) => {
                self.next();
                let i = self.var()?;
                let body = Box::new(self.unary()?);
                Ok(if k == "exists" { Formula::Exists(i, body) } else { Formula::Interior(i, body) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.next() {
            Some(Tok::Open) => {
                let f = self.or()?;
                self.expect(Tok::Close)?;
                Ok(f)
            }
            Some(Tok::Name(k)) if k == "true" && self.peek() != Some(&Tok::Open) => Ok(Formula::True),
            Some(Tok::Name(k)) if k == "false" && self.peek() != Some(&Tok::Open) => {
                Ok(Formula::Not(Box::new(Formula::True)))
            }
            Some(Tok::Var(i)) => {
                self.expect(Tok::Equals)?;
                Ok(Formula::Eq(i, self.var()?))
            }
            Some(Tok::Name(name)) | Some(Tok::Quoted(name)) => {
                self.expect(Tok::Open)?;
                let mut vars = vec![self.var()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.next();
                    vars.push(self.var()?);
                }
                self.expect(Tok::Close)?;
                Ok(Formula::Atom { name, vars })
            }
            other => Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }
}

pub fn parse_formula(src: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let f = p.or()?;
    if p.at < p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.at)));
    }
    Ok(f)
}

/// Sequences in `^mU` are indexed by their base-`|U|` numeral.
struct Space {
    u: usize,
    m: usize,
    size: usize,
}

impl Space {
    fn decode(&self, mut k: usize) -> Vec<usize> {
        let mut s = vec![0; self.m];
        for slot in s.iter_mut().rev() {
            *slot = k % self.u;
            k /= self.u;
        }
        s
    }

    fn stride(&self, i: usize) -> usize {
        self.u.pow((self.m - 1 - i) as u32)
    }
}

/// The sequences `s ∈ C^m` with `M, s ⊨_c φ`, lexicographically.
///
/// `exists x_i φ` holds at `s` iff some `t ∈ C^m` with `t ≡_i s` satisfies
/// `φ`; `box x_i φ` holds iff some such `t` has `t_i` in the interior of
/// `{u : s^i_u ⊨ φ}`. Subformulas are evaluated on all of `^mU`.
pub fn clique_guarded_eval(rep: &Representation, phi: &Formula, m: usize) -> Result<Vec<Vec<usize>>> {
    if let Some(v) = phi.max_var().filter(|&v| v >= m) {
        return Err(Error::Index { index: v, dim: m });
    }
    let u = rep.base.len();
    check_size(u, m)?;
    let space = Space { u, m, size: u.pow(m as u32) };
    let mut test = CliqueTest::new(rep)?;
    let clique: Vec<bool> = (0..space.size).map(|k| test.is_clique(&space.decode(k))).collect();
    let sat = eval(rep, phi, &space, &clique)?;
    Ok((0..space.size).filter(|&k| clique[k] && sat[k]).map(|k| space.decode(k)).collect())
}

fn eval(rep: &Representation, phi: &Formula, sp: &Space, clique: &[bool]) -> Result<Vec<bool>> {
    Ok(match phi {
        Formula::True => vec![true; sp.size],
        Formula::Eq(i, j) => (0..sp.size).map(|k| {
            let s = sp.decode(k);
            s[*i] == s[*j]
        }).collect(),
        Formula::Atom { name, vars } => {
            if vars.len() != rep.n {
                return Err(Error::Parse(format!("{name} takes {} variables", rep.n)));
            }
            let atom = rep.atoms.iter().position(|a| a == name).ok_or_else(|| Error::UnknownAtom(name.clone()))?;
            (0..sp.size)
                .map(|k| {
                    let s = sp.decode(k);
                    let t: Vec<usize> = vars.iter().map(|&v| s[v]).collect();
                    rep.label_of(&t) == Some(atom)
                })
                .collect()
        }
        Formula::Not(f) => eval(rep, f, sp, clique)?.into_iter().map(|b| !b).collect(),
        Formula::And(f, g) => {
            let (a, b) = (eval(rep, f, sp, clique)?, eval(rep, g, sp, clique)?);
            a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
        }
        Formula::Or(f, g) => {
            let (a, b) = (eval(rep, f, sp, clique)?, eval(rep, g, sp, clique)?);
            a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
        }
        Formula::Exists(i, f) => {
            let inner = eval(rep, f, sp, clique)?;
            let st = sp.stride(*i);
            (0..sp.size)
                .map(|k| {
                    let base = k - sp.decode(k)[*i] * st;
                    (0..sp.u).any(|x| clique[base + x * st] && inner[base + x * st])
                })
                .collect()
        }
        Formula::Interior(i, f) => {
            let topo = rep
                .topology
                .as_ref()
                .ok_or_else(|| Error::Precondition("box needs a topology on the base".into()))?;
            let inner = eval(rep, f, sp, clique)?;
            let st = sp.stride(*i);
            (0..sp.size)
                .map(|k| {
                    let base = k - sp.decode(k)[*i] * st;
                    let fibre = |x: usize| inner[base + x * st];
                    // x is interior iff every y above x is in the fibre
                    (0..sp.u).any(|x| {
                        clique[base + x * st] && (0..sp.u).all(|y| !topo.leq(x, y) || fibre(y))
                    })
                })
                .collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let f = parse_formula("exists x1 (a(x0,x1) & !x0 = x1) | box x0 \"(0,1)\"(x0,x2)").unwrap();
        assert_eq!(f.quantifier_depth(), 1);
        assert_eq!(f.max_var(), Some(2));
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        for bad in ["a(x0", "x0 =", "exists x0", "a(x0) &", "\"open", "a(x0) x1"] {
            assert!(matches!(parse_formula(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn keywords_as_atom_names() {
        assert_eq!(
            parse_formula("box(x0)").unwrap(),
            Formula::Atom { name: "box".into(), vars: vec![0] }
        );
        assert_eq!(parse_formula("false").unwrap(), Formula::Not(Box::new(Formula::True)));
    }

    use crate::algebra::complex_algebra;
    use crate::toposet::{all_sequences, square_frame, FiniteTopology, SetAlgebraUnit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_rep(u: usize, topology: Option<FiniteTopology>) -> Representation {
        let frame = square_frame(u, 2, None).unwrap();
        let points = all_sequences(u, 2);
        Representation {
            n: 2,
            base: (0..u).map(|x| x.to_string()).collect(),
            label: (0..points.len()).collect(),
            points,
            atoms: frame.names().to_vec(),
            topology,
        }
    }

    // plain Tarskian satisfaction, one assignment at a time
    fn classical(rep: &Representation, f: &Formula, s: &mut Vec<usize>) -> bool {
        match f {
            Formula::True => true,
            Formula::Eq(i, j) => s[*i] == s[*j],
            Formula::Atom { name, vars } => {
                let t: Vec<usize> = vars.iter().map(|&v| s[v]).collect();
                rep.label_of(&t).map(|k| &rep.atoms[k]) == Some(name)
            }
            Formula::Not(g) => !classical(rep, g, s),
            Formula::And(g, h) => classical(rep, g, s) && classical(rep, h, s),
            Formula::Or(g, h) => classical(rep, g, s) || classical(rep, h, s),
            Formula::Exists(i, g) | Formula::Interior(i, g) => {
                let keep = s[*i];
                let found = (0..rep.base.len()).any(|x| {
                    s[*i] = x;
                    classical(rep, g, s)
                });
                s[*i] = keep;
                found
            }
        }
    }

    fn random_formula(rng: &mut ChaCha8Rng, atoms: &[String], m: usize, depth: usize) -> Formula {
        let leaf = depth == 0 || rng.gen_bool(0.25);
        let var = |rng: &mut ChaCha8Rng| rng.gen_range(0..m);
        if leaf {
            return match rng.gen_range(0..3) {
                0 => Formula::True,
                1 => Formula::Eq(var(rng), var(rng)),
                _ => Formula::Atom { name: atoms[rng.gen_range(0..atoms.len())].clone(), vars: vec![var(rng), var(rng)] },
            };
        }
        let sub = |rng: &mut ChaCha8Rng| Box::new(random_formula(rng, atoms, m, depth - 1));
        match rng.gen_range(0..4) {
            0 => Formula::Not(sub(rng)),
            1 => Formula::And(sub(rng), sub(rng)),
            2 => Formula::Or(sub(rng), sub(rng)),
            _ => Formula::Exists(var(rng), sub(rng)),
        }
    }

    #[test]
    fn trivial_formula_gives_all_cliques() {
        let base: Vec<String> = (0..3).map(|x| x.to_string()).collect();
        let v = SetAlgebraUnit::generalized(base, &[vec![0, 1], vec![2]], 2).unwrap();
        let frame = crate::toposet::unit_frame(&v, None).unwrap();
        let rep = Representation {
            n: 2,
            base: v.base().to_vec(),
            points: v.points().to_vec(),
            label: (0..v.points().len()).collect(),
            atoms: complex_algebra(frame).frame().names().to_vec(),
            topology: None,
        };
        let f = parse_formula("x0 = x0").unwrap();
        assert_eq!(clique_guarded_eval(&rep, &f, 3).unwrap(), super::super::gaifman_cliques(&rep, 3).unwrap());
    }

    #[test]
    fn square_units_agree_with_classical_semantics() {
        let rep = square_rep(3, None);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = 3;
        for _ in 0..200 {
            let f = random_formula(&mut rng, &rep.atoms, m, 3);
            let got = clique_guarded_eval(&rep, &f, m).unwrap();
            let want: Vec<Vec<usize>> =
                all_sequences(3, m).into_iter().filter(|s| classical(&rep, &f, &mut s.clone())).collect();
            assert_eq!(got, want, "{f}");
        }
    }

    #[test]
    fn discrete_box_is_exists() {
        let rep = square_rep(3, Some(FiniteTopology::discrete(3)));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let body = random_formula(&mut rng, &rep.atoms, 3, 2);
            let i = rng.gen_range(0..3);
            let b = Formula::Interior(i, Box::new(body.clone()));
            let e = Formula::Exists(i, Box::new(body));
            assert_eq!(clique_guarded_eval(&rep, &b, 3).unwrap(), clique_guarded_eval(&rep, &e, 3).unwrap());
        }
    }

    #[test]
    fn box_needs_a_topology_and_variables_are_bounded() {
        let rep = square_rep(2, None);
        let f = parse_formula("box x0 x0 = x1").unwrap();
        assert!(matches!(clique_guarded_eval(&rep, &f, 3), Err(Error::Precondition(_))));
        let g = parse_formula("x0 = x3").unwrap();
        assert!(matches!(clique_guarded_eval(&rep, &g, 3), Err(Error::Index { .. })));
    }

    #[test]
    fn indiscrete_box_needs_the_whole_fibre() {
        let rep = square_rep(2, Some(FiniteTopology::indiscrete(2)));
        // at most one value of x0 equals x1, so the fibre is never everything
        let f = parse_formula("box x0 x0 = x1").unwrap();
        assert!(clique_guarded_eval(&rep, &f, 3).unwrap().is_empty());
        let g = parse_formula("box x0 (x0 = x1 | !x0 = x1)").unwrap();
        assert_eq!(clique_guarded_eval(&rep, &g, 3).unwrap().len(), 8);
    }
}
