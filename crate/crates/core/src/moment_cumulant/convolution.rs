//! Cumulants of products of two bi-free families over a scalar base.

use super::{bimult::Comparison, bnc_list, kappa_pi, mixed::FamilyGens, MomentTable, SeriesKey};
use crate::base_algebra::{b_zero, OperatorSpace};
use crate::bnc_core::{kreweras, BncPartition, Side};
use crate::error::{Error, Result};
use std::sync::Arc;

/// κ_{χ_α}(z_{α(1)},…,z_{α(n)}) with z_i = z′_i z″_i on the left and
/// z_j = z″_j z′_j on the right, against Σ_π κ_π(z′)·κ_{K(π)}(z″).
pub fn multiplicative_convolution_scalar<S: OperatorSpace>(
    space: &Arc<S>,
    alpha: &SeriesKey,
    z1: &FamilyGens<S>,
    z2: &FamilyGens<S>,
) -> Result<Comparison> {
    let d = space.b_dim();
    if d != 1 {
        return Err(Error::NotScalar(d));
    }
    let t1 = alpha.tuple(space, z1)?;
    let t2 = alpha.tuple(space, z2)?;
    let chi = alpha.chi();
    let products = (0..alpha.len())
        .map(|k| match chi.side(k) {
            Side::Left => space.compose(&t1.ops()[k], &t2.ops()[k]),
            Side::Right => space.compose(&t2.ops()[k], &t1.ops()[k]),
        })
        .collect();
    let z = super::OperatorTuple::new_unchecked(space.clone(), chi.clone(), products)?;
    let lhs = kappa_pi(&BncPartition::one(&chi), &z)?;
    let (m1, m2) = (MomentTable::new(&t1, true)?, MomentTable::new(&t2, true)?);
    let mut rhs = b_zero(1);
    for pi in bnc_list(&chi)?.iter() {
        rhs = &rhs + &(&m1.cumulant(pi)? * &m2.cumulant(&kreweras(pi))?);
    }
    Ok(Comparison { lhs, rhs })
}
