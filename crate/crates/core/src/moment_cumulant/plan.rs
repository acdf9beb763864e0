//! The recursive evaluation plan behind E_π and E_D.
//!
//! A plan depends only on (χ, π), so it is built once as an expression tree
//! whose leaves index the operator tuple. Evaluation walks the tree against
//! any [`OperatorSpace`].

use crate::base_algebra::{BElem, OperatorSpace};
use crate::bnc_core::{side_permutation, BncPartition, Side, SideMap};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// T_k, 0-based position in the original tuple.
    Op(usize),
    /// L_{E(expr)} or R_{E(expr)}. `either` marks a suffix absorption where
    /// the side is a free choice.
    Ins { side: Side, expr: Arc<Expr>, either: bool },
}

/// E(t₁t₂⋯) for a word of terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr(pub Vec<Term>);

/// Result of running the recursion on a set of strings, some of which may
/// reach the top.
#[derive(Clone, Debug)]
pub enum Plan {
    Closed(Arc<Expr>),
    /// (string index, fused word) for each top-reaching string.
    Open(Vec<(usize, Vec<Term>)>),
}

/// Runs the block-absorption recursion. `strings` partitions 0..n; strings
/// with `top[i]` set reach the top and are never absorbed.
pub fn build_plan(chi: &SideMap, strings: &[Vec<usize>], top: &[bool]) -> Plan {
    let n = chi.len();
    let s = side_permutation(chi);
    let mut pre: Vec<Vec<Term>> = vec![vec![]; n];
    let mut post: Vec<Vec<Term>> = vec![vec![]; n];
    let mut alive: Vec<bool> = vec![true; strings.len()];

    let word = |v: &[usize], pre: &[Vec<Term>], post: &[Vec<Term>]| -> Vec<Term> {
        let mut w = vec![];
        for &p in v {
            w.extend(pre[p].iter().cloned());
            w.push(Term::Op(p));
            w.extend(post[p].iter().cloned());
        }
        w
    };

    loop {
        let closed: Vec<usize> = (0..strings.len()).filter(|&i| alive[i] && !top[i]).collect();
        let n_alive = alive.iter().filter(|&&a| a).count();
        if closed.is_empty() {
            break;
        }
        if n_alive == 1 {
            let v = &strings[closed[0]];
            return Plan::Closed(Arc::new(Expr(word(v, &pre, &post))));
        }
        let vi = *closed.iter().max_by_key(|&&i| strings[i][0]).unwrap();
        let v = &strings[vi];
        let h = v[0];
        let side = chi.side(h);
        let val = Arc::new(Expr(word(v, &pre, &post)));
        alive[vi] = false;

        let crossing: Vec<usize> = (0..strings.len())
            .filter(|&i| alive[i] && *strings[i].last().unwrap() > h && (top[i] || strings[i][0] < h))
            .collect();
        if crossing.is_empty() {
            // V is a suffix of what remains: T_k C_{val} at the last
            // remaining position before it.
            let k = (0..strings.len())
                .filter(|&i| alive[i])
                .flat_map(|i| strings[i].iter().copied())
                .filter(|&p| p < h)
                .max()
                .expect("another block remains");
            post[k].push(Term::Ins { side, expr: val, either: true });
        } else {
            // The spine adjacent to min(V) is the crossing string whose part
            // below h comes nearest to h in the order ≺.
            let near = |i: usize| {
                let ranks = strings[i].iter().filter(|&&w| w > h).map(|&w| s.rank(w));
                match side {
                    Side::Left => ranks.min().unwrap(),
                    Side::Right => ranks.max().unwrap(),
                }
            };
            let w = match side {
                Side::Left => crossing.iter().copied().min_by_key(|&i| near(i)),
                Side::Right => crossing.iter().copied().max_by_key(|&i| near(i)),
            }
            .unwrap();
            let k = *strings[w].iter().find(|&&x| x > h).unwrap();
            pre[k].insert(0, Term::Ins { side, expr: val, either: false });
        }
    }

    Plan::Open((0..strings.len()).filter(|&i| alive[i]).map(|i| (i, word(&strings[i], &pre, &post))).collect())
}

type PlanKey = (SideMap, Vec<Vec<usize>>);

fn plan_cache() -> &'static Mutex<HashMap<PlanKey, Arc<Expr>>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<Expr>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The plan of E_π, cached per (χ, π).
pub fn plan_for(pi: &BncPartition) -> Arc<Expr> {
    let key = (pi.chi().clone(), pi.blocks().to_vec());
    if let Some(e) = plan_cache().lock().unwrap().get(&key) {
        return e.clone();
    }
    let top = vec![false; pi.num_blocks()];
    let Plan::Closed(e) = build_plan(pi.chi(), pi.blocks(), &top) else {
        unreachable!("closed strings only")
    };
    plan_cache().lock().unwrap().insert(key, e.clone());
    e
}

/// Evaluates plans against one operator tuple, memoizing subexpressions.
pub struct Evaluator<'a, S: OperatorSpace> {
    space: &'a S,
    ops: &'a [S::Op],
    check: bool,
    memo: HashMap<Arc<Expr>, BElem>,
}

impl<'a, S: OperatorSpace> Evaluator<'a, S> {
    /// With `check` set, every free L/R choice is evaluated both ways and
    /// compared.
    pub fn new(space: &'a S, ops: &'a [S::Op], check: bool) -> Self {
        Evaluator { space, ops, check, memo: HashMap::new() }
    }

    pub fn space(&self) -> &S {
        self.space
    }

    pub fn eval(&mut self, e: &Arc<Expr>) -> Result<BElem> {
        if let Some(v) = self.memo.get(e) {
            return Ok(v.clone());
        }
        let v = self.space.vacuum();
        let out = self.space.project(&self.apply_terms(&e.0, v, false)?);
        if self.check && e.0.iter().any(|t| matches!(t, Term::Ins { either: true, .. })) {
            let v = self.space.vacuum();
            let alt = self.space.project(&self.apply_terms(&e.0, v, true)?);
            if alt != out {
                return Err(Error::ChoiceDisagreement { block: render(e, false) });
            }
        }
        self.memo.insert(e.clone(), out.clone());
        Ok(out)
    }

    /// Applies t₁t₂⋯ to `v`, rightmost first. With `flip`, free choices take
    /// the opposite side.
    pub fn apply_terms(&mut self, terms: &[Term], mut v: S::Vector, flip: bool) -> Result<S::Vector> {
        for t in terms.iter().rev() {
            v = match t {
                Term::Op(k) => self.space.apply(&self.ops[*k], &v)?,
                Term::Ins { side, expr, either } => {
                    let b = self.eval(expr)?;
                    let side = if *either && flip { side.opposite() } else { *side };
                    match side {
                        Side::Left => self.space.apply_left_mult(&b, &v),
                        Side::Right => self.space.apply_right_mult(&b, &v),
                    }
                }
            };
        }
        Ok(v)
    }
}

/// Text form of a plan, e.g. `E(T1T2 L_{E(T3 L_{E(T4T7)} T5 R_{E(T6T8)} T9)})`.
pub fn render(e: &Expr, unicode: bool) -> String {
    let mut out = String::from("E(");
    render_terms(&e.0, unicode, &mut out);
    out.push(')');
    out
}

pub fn render_terms(terms: &[Term], unicode: bool, out: &mut String) {
    let mut prev_op = None;
    for t in terms {
        match t {
            Term::Op(k) => {
                if prev_op == Some(false) {
                    out.push(' ');
                }
                out.push('T');
                if unicode {
                    out.extend((k + 1).to_string().chars().map(subscript));
                } else {
                    let _ = write!(out, "{}", k + 1);
                }
                prev_op = Some(true);
            }
            Term::Ins { side, expr, .. } => {
                if prev_op.is_some() {
                    out.push(' ');
                }
                out.push(if *side == Side::Left { 'L' } else { 'R' });
                out.push_str("_{");
                out.push_str(&render(expr, unicode));
                out.push('}');
                prev_op = Some(false);
            }
        }
    }
}

fn subscript(c: char) -> char {
    char::from_u32('₀' as u32 + c.to_digit(10).unwrap()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnc_core::enumerate_bnc;

    fn trace(pi: &str, chi: &str) -> String {
        let c = SideMap::parse(chi).unwrap();
        render(&plan_for(&BncPartition::parse(pi, &c).unwrap()), false)
    }

    #[test]
    fn nine_node_trace() {
        assert_eq!(
            trace("1,2|3,5,9|4,7|6,8", "lrllrrlrr"),
            "E(T1T2 L_{E(T3 L_{E(T4T7)} T5 R_{E(T6T8)} T9)})"
        );
        let c = SideMap::parse("lrllrrlrr").unwrap();
        let p = BncPartition::parse("1,2|3,5,9|4,7|6,8", &c).unwrap();
        assert_eq!(render(&plan_for(&p), true), "E(T₁T₂ L_{E(T₃ L_{E(T₄T₇)} T₅ R_{E(T₆T₈)} T₉)})");
    }

    #[test]
    fn small_traces() {
        assert_eq!(trace("1,2,3", "lrl"), "E(T1T2T3)");
        assert_eq!(trace("1|2", "ll"), "E(T1 L_{E(T2)})");
        assert_eq!(trace("1|2", "lr"), "E(T1 R_{E(T2)})");
        assert_eq!(trace("1,3|2", "lll"), "E(T1 L_{E(T2)} T3)");
        assert_eq!(trace("1,3|2", "lrl"), "E(T1 R_{E(T2)} T3)");
    }

    #[test]
    fn every_position_appears_once() {
        fn collect(e: &Expr, out: &mut Vec<usize>) {
            for t in &e.0 {
                match t {
                    Term::Op(k) => out.push(*k),
                    Term::Ins { expr, .. } => collect(expr, out),
                }
            }
        }
        for n in 1..=6 {
            for c in SideMap::all(n) {
                for p in enumerate_bnc(&c).unwrap() {
                    let mut seen = vec![];
                    collect(&plan_for(&p), &mut seen);
                    seen.sort();
                    assert_eq!(seen, (0..n).collect::<Vec<_>>());
                }
            }
        }
    }
}
