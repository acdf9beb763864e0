//! Moment and cumulant series μ^z_α and κ^z_α of a two-faced family.

use super::{e_pi, kappa_pi, mixed::FamilyGens, OperatorTuple};
use crate::base_algebra::{BElem, OperatorSpace};
use crate::bnc_core::{BncPartition, Side, SideMap};
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// α : {1,…,n} → I ⊔ J, stored as (face, index) pairs. Left entries index I.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesKey {
    alpha: Vec<(Side, usize)>,
}

impl SeriesKey {
    pub fn new(alpha: Vec<(Side, usize)>) -> Self {
        SeriesKey { alpha }
    }

    /// Text form `l1,r2,l1` with 1-based indices.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |t: &str| Error::Parse(format!("series index {t:?}: expected l<k> or r<k>"));
        let alpha = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let side = match t.chars().next() {
                    Some('l') => Side::Left,
                    Some('r') => Side::Right,
                    _ => return Err(bad(t)),
                };
                let k: usize = t[1..].parse().map_err(|_| bad(t))?;
                if k == 0 {
                    return Err(bad(t));
                }
                Ok((side, k - 1))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesKey { alpha })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[(Side, usize)] {
        &self.alpha
    }

    /// χ_α.
    pub fn chi(&self) -> SideMap {
        SideMap::new(self.alpha.iter().map(|a| a.0).collect())
    }

    /// Every key of length n with indices below `n_left` and `n_right`.
    pub fn all(n: usize, n_left: usize, n_right: usize) -> Vec<SeriesKey> {
        let mut out = vec![SeriesKey { alpha: vec![] }];
        for _ in 0..n {
            let mut next = vec![];
            for key in &out {
                for (side, count) in [(Side::Left, n_left), (Side::Right, n_right)] {
                    for i in 0..count {
                        let mut a = key.alpha.clone();
                        a.push((side, i));
                        next.push(SeriesKey { alpha: a });
                    }
                }
            }
            out = next;
        }
        out
    }

    /// (z_{α(1)}, …, z_{α(n)}).
    pub fn tuple<S: OperatorSpace>(&self, space: &Arc<S>, z: &FamilyGens<S>) -> Result<OperatorTuple<S>> {
        let ops = self
            .alpha
            .iter()
            .map(|&(side, i)| {
                z.gens(side)
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange { index: i, n: z.gens(side).len() })
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorTuple::new_unchecked(space.clone(), self.chi(), ops)
    }
}

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.alpha.iter().map(|(s, i)| format!("{}{}", s.letter(), i + 1)).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// (z_{α(1)}C_{b₁}, …, z_{α(n−1)}C_{b_{n−1}}, z_{α(n)}).
fn inserted<S: OperatorSpace>(
    space: &Arc<S>,
    z: &FamilyGens<S>,
    alpha: &SeriesKey,
    bs: &[BElem],
) -> Result<OperatorTuple<S>> {
    let n = alpha.len();
    if n == 0 {
        return Err(Error::Precondition("empty series key".into()));
    }
    if bs.len() != n - 1 {
        return Err(Error::Arity { expected: n - 1, got: bs.len() });
    }
    let t = alpha.tuple(space, z)?;
    let ops = t
        .ops()
        .iter()
        .enumerate()
        .map(|(k, op)| match bs.get(k) {
            None => op.clone(),
            Some(b) => {
                let c = match alpha.alpha[k].0 {
                    Side::Left => space.left_mult(b),
                    Side::Right => space.right_mult(b),
                };
                space.compose(op, &c)
            }
        })
        .collect();
    OperatorTuple::new_unchecked(space.clone(), alpha.chi(), ops)
}

/// μ^z_α(b₁,…,b_{n−1}).
pub fn moment_series<S: OperatorSpace>(
    space: &Arc<S>,
    z: &FamilyGens<S>,
    alpha: &SeriesKey,
    bs: &[BElem],
) -> Result<BElem> {
    let t = inserted(space, z, alpha, bs)?;
    e_pi(&BncPartition::one(t.chi()), &t)
}

/// κ^z_α(b₁,…,b_{n−1}).
pub fn cumulant_series<S: OperatorSpace>(
    space: &Arc<S>,
    z: &FamilyGens<S>,
    alpha: &SeriesKey,
    bs: &[BElem],
) -> Result<BElem> {
    let t = inserted(space, z, alpha, bs)?;
    kappa_pi(&BncPartition::one(t.chi()), &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_algebra::{b_one, Bimodule};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn key_round_trip_and_counts() {
        let k = SeriesKey::parse("l1,r2,l1").unwrap();
        assert_eq!(k.to_string(), "l1,r2,l1");
        assert_eq!(k.chi().to_string(), "lrl");
        assert!(SeriesKey::parse("x1").is_err());
        assert!(SeriesKey::parse("l0").is_err());
        assert_eq!(SeriesKey::all(3, 2, 1).len(), 27);
    }

    #[test]
    fn unit_insertions_and_order_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let x = Arc::new(Bimodule::random(2, 1, &mut rng));
        let z = FamilyGens::<Bimodule>::new(
            vec![x.random_left_operator(2, &mut rng)],
            vec![x.random_right_operator(2, &mut rng)],
        );
        let one = SeriesKey::parse("r1").unwrap();
        let m = moment_series(&x, &z, &one, &[]).unwrap();
        assert_eq!(m, x.expectation(&z.right[0]).unwrap());
        assert_eq!(m, cumulant_series(&x, &z, &one, &[]).unwrap());
        let key = SeriesKey::parse("l1,r1,l1").unwrap();
        let t = key.tuple(&x, &z).unwrap();
        let ones = vec![b_one(2); 2];
        assert_eq!(moment_series(&x, &z, &key, &ones).unwrap(), super::super::joint_moment(&t).unwrap());
        assert_eq!(
            cumulant_series(&x, &z, &key, &ones).unwrap(),
            kappa_pi(&BncPartition::one(t.chi()), &t).unwrap()
        );
        assert!(matches!(moment_series(&x, &z, &key, &ones[..1]), Err(Error::Arity { .. })));
    }
}
