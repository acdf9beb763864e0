//! Set partitions, side maps and the lattice BNC(χ) of bi-non-crossing
//! partitions.
//!
//! Positions are 0-based throughout the API. The text encodings (`"llrlr"`,
//! `"1,3|2,4,5"`, `"1,1,2"`) are 1-based, matching how the objects are
//! usually written down.

use crate::error::{Error, Result};
use crate::scalar::catalan;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default bound on the arity accepted by [`enumerate_bnc`].
pub const DEFAULT_ENUM_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Left => 'l',
            Side::Right => 'r',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// χ : {1..n} → {ℓ, r}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SideMap(Vec<Side>);

impl SideMap {
    pub fn new(sides: Vec<Side>) -> Self {
        SideMap(sides)
    }

    pub fn all_left(n: usize) -> Self {
        SideMap(vec![Side::Left; n])
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                'l' | 'L' => Ok(Side::Left),
                'r' | 'R' => Ok(Side::Right),
                _ => Err(Error::Parse(format!("side map {s:?}: unexpected {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SideMap)
    }

    /// Every side map of arity `n`, in binary order with `l` < `r`.
    pub fn all(n: usize) -> Vec<SideMap> {
        (0..1u64 << n)
            .map(|bits| {
                SideMap(
                    (0..n)
                        .map(|i| if bits >> (n - 1 - i) & 1 == 1 { Side::Right } else { Side::Left })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn side(&self, i: usize) -> Side {
        self.0[i]
    }

    pub fn sides(&self) -> &[Side] {
        &self.0
    }

    /// χ|_S for a sorted list of positions.
    pub fn restrict(&self, positions: &[usize]) -> SideMap {
        SideMap(positions.iter().map(|&i| self.0[i]).collect())
    }

    /// χ|_{∖q}.
    pub fn remove(&self, q: usize) -> SideMap {
        let mut v = self.0.clone();
        v.remove(q);
        SideMap(v)
    }
}

impl fmt::Display for SideMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

/// ε : {1..n} → K, with labels stored as small integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ShadingMap(Vec<usize>);

impl ShadingMap {
    pub fn new(labels: Vec<usize>) -> Self {
        ShadingMap(labels)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(ShadingMap(vec![]));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("shading {s:?}: bad label {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(ShadingMap)
    }

    /// Every shading of arity `n` with labels in `0..k`.
    pub fn all(n: usize, k: usize) -> Vec<ShadingMap> {
        let mut out = vec![];
        let mut cur = vec![0; n];
        loop {
            out.push(ShadingMap(cur.clone()));
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < k {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn label(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// The partition ε⁻¹(K).
    pub fn as_partition(&self) -> SetPartition {
        SetPartition::from_labels(&self.0)
    }

    pub fn restrict(&self, positions: &[usize]) -> ShadingMap {
        ShadingMap(positions.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for ShadingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A set partition of {0..n} in canonical form: blocks sorted by minimum,
/// elements ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in b {
                if x >= n {
                    return Err(Error::InvalidPartition(format!("element {} outside 1..{n}", x + 1)));
                }
                if seen[x] {
                    return Err(Error::InvalidPartition(format!("element {} repeated", x + 1)));
                }
                seen[x] = true;
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("element {} missing", x + 1)));
        }
        Ok(Self::canonical(n, blocks))
    }

    fn canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        SetPartition { n, blocks }
    }

    /// Partition whose blocks are the level sets of `labels`.
    pub fn from_labels<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = vec![];
        for (i, l) in labels.iter().enumerate() {
            let b = *index.entry(*l).or_insert_with(|| {
                blocks.push(vec![]);
                blocks.len() - 1
            });
            blocks[b].push(i);
        }
        SetPartition { n: labels.len(), blocks }
    }

    pub fn finest(n: usize) -> Self {
        SetPartition { n, blocks: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn coarsest(n: usize) -> Self {
        let blocks = if n == 0 { vec![] } else { vec![(0..n).collect()] };
        SetPartition { n, blocks }
    }

    /// Parse `"1,3|2,4,5"`. The arity is the largest element.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(SetPartition { n: 0, blocks: vec![] });
        }
        let mut blocks = vec![];
        for part in s.split('|') {
            let mut block = vec![];
            for t in part.split(',') {
                let x: usize = t
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("partition {s:?}: bad element {t:?}")))?;
                if x == 0 {
                    return Err(Error::Parse(format!("partition {s:?}: elements are 1-based")));
                }
                block.push(x - 1);
            }
            blocks.push(block);
        }
        let n = blocks.iter().flatten().max().map_or(0, |m| m + 1);
        Self::from_blocks(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index of every element.
    pub fn labels(&self) -> Vec<usize> {
        let mut l = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                l[x] = b;
            }
        }
        l
    }

    pub fn block_of(&self, x: usize) -> &[usize] {
        self.blocks.iter().find(|b| b.contains(&x)).expect("element in range")
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of(x).contains(&y)
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        if self.n != other.n {
            return false;
        }
        let lo = other.labels();
        self.blocks.iter().all(|b| b.iter().all(|&x| lo[x] == lo[b[0]]))
    }

    pub fn meet(&self, other: &SetPartition) -> SetPartition {
        let l1 = self.labels();
        let l2 = other.labels();
        let pairs: Vec<(usize, usize)> = (0..self.n).map(|i| (l1[i], l2[i])).collect();
        SetPartition::from_labels(&pairs)
    }

    /// Join in the lattice of all set partitions.
    pub fn join_all(&self, other: &SetPartition) -> SetPartition {
        let mut uf = UnionFind::new(self.n);
        for b in self.blocks.iter().chain(other.blocks.iter()) {
            for w in b.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.partition()
    }

    /// Whether two blocks cross in the natural order: a < b < c < d with
    /// a, c in one block and b, d in the other.
    pub fn is_noncrossing(&self) -> bool {
        let l = self.labels();
        // A stack discipline: when x revisits an open block, every block
        // opened above it must already be complete.
        let mut last = vec![0usize; self.blocks.len()];
        for b in &self.blocks {
            last[l[b[0]]] = *b.last().unwrap();
        }
        let mut stack: Vec<usize> = vec![];
        for x in 0..self.n {
            let b = l[x];
            if self.blocks[b][0] == x {
                stack.push(b);
            } else {
                while let Some(&top) = stack.last() {
                    if top == b {
                        break;
                    }
                    if last[top] > x {
                        return false;
                    }
                    stack.pop();
                }
            }
        }
        true
    }

    /// The image under a position map, `x ↦ map[x]`.
    pub fn map_positions(&self, map: &[usize]) -> SetPartition {
        let blocks = self.blocks.iter().map(|b| b.iter().map(|&x| map[x]).collect()).collect();
        Self::canonical(self.n, blocks)
    }

    /// Blocks lying inside `subset` (which must be a union of blocks),
    /// relabeled to 0..|subset| preserving order.
    pub fn restrict(&self, subset: &[usize]) -> Result<SetPartition> {
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &x) in sorted.iter().enumerate() {
            if x >= self.n {
                return Err(Error::IndexOutOfRange { index: x, n: self.n });
            }
            pos[x] = i;
        }
        let mut blocks = vec![];
        for b in &self.blocks {
            let inside = b.iter().filter(|&&x| pos[x] != usize::MAX).count();
            if inside == b.len() {
                blocks.push(b.iter().map(|&x| pos[x]).collect());
            } else if inside != 0 {
                return Err(Error::NotUnionOfBlocks);
            }
        }
        Ok(Self::canonical(sorted.len(), blocks))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn partition(&mut self) -> SetPartition {
        let labels: Vec<usize> = (0..self.0.len()).map(|x| self.find(x)).collect();
        SetPartition::from_labels(&labels)
    }
}

/// s_χ as a sequence: `images[k]` is the position read k-th when reading the
/// left positions top to bottom and then the right positions bottom to top.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChiPermutation {
    images: Vec<usize>,
    inverse: Vec<usize>,
}

impl ChiPermutation {
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn apply_inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    /// Position of `x` in the order ≺_χ.
    pub fn rank(&self, x: usize) -> usize {
        self.inverse[x]
    }

    /// a ≺_χ b.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.inverse[a] < self.inverse[b]
    }

    /// s_χ⁻¹·π, a partition in non-crossing coordinates.
    pub fn to_nc(&self, pi: &SetPartition) -> SetPartition {
        pi.map_positions(&self.inverse)
    }

    /// s_χ·π.
    pub fn from_nc(&self, pi: &SetPartition) -> SetPartition {
        pi.map_positions(&self.images)
    }
}

pub fn side_permutation(chi: &SideMap) -> ChiPermutation {
    let n = chi.len();
    let mut images: Vec<usize> = (0..n).filter(|&i| chi.side(i) == Side::Left).collect();
    images.extend((0..n).rev().filter(|&i| chi.side(i) == Side::Right));
    let mut inverse = vec![0; n];
    for (k, &x) in images.iter().enumerate() {
        inverse[x] = k;
    }
    ChiPermutation { images, inverse }
}

pub fn is_bi_noncrossing(pi: &SetPartition, chi: &SideMap) -> Result<bool> {
    if pi.n() != chi.len() {
        return Err(Error::Arity { expected: chi.len(), got: pi.n() });
    }
    Ok(side_permutation(chi).to_nc(pi).is_noncrossing())
}

/// A partition together with the side map it is bi-non-crossing for.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BncPartition {
    chi: SideMap,
    partition: SetPartition,
}

impl BncPartition {
    pub fn new(partition: SetPartition, chi: SideMap) -> Result<Self> {
        if !is_bi_noncrossing(&partition, &chi)? {
            return Err(Error::NotBiNoncrossing(partition.to_string()));
        }
        Ok(BncPartition { chi, partition })
    }

    pub fn parse(pi: &str, chi: &SideMap) -> Result<Self> {
        let p = SetPartition::parse(pi)?;
        Self::new(p, chi.clone())
    }

    pub(crate) fn new_unchecked(partition: SetPartition, chi: SideMap) -> Self {
        debug_assert!(side_permutation(&chi).to_nc(&partition).is_noncrossing());
        BncPartition { chi, partition }
    }

    /// 0_χ.
    pub fn zero(chi: &SideMap) -> Self {
        BncPartition { chi: chi.clone(), partition: SetPartition::finest(chi.len()) }
    }

    /// 1_χ.
    pub fn one(chi: &SideMap) -> Self {
        BncPartition { chi: chi.clone(), partition: SetPartition::coarsest(chi.len()) }
    }

    pub fn chi(&self) -> &SideMap {
        &self.chi
    }

    pub fn partition(&self) -> &SetPartition {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.chi.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        self.partition.blocks()
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn is_one(&self) -> bool {
        self.partition.num_blocks() == 1
    }
}

impl fmt::Display for BncPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.partition)
    }
}

fn same_chi(a: &BncPartition, b: &BncPartition) -> Result<()> {
    if a.chi != b.chi {
        return Err(Error::ChiMismatch);
    }
    Ok(())
}

/// NC(n) in lexicographic order.
pub fn enumerate_nc(n: usize) -> Vec<SetPartition> {
    // Each element either opens a block or joins a block that is still
    // visible; joining a block closes every block opened after it.
    fn rec(
        x: usize,
        n: usize,
        blocks: &mut Vec<Vec<usize>>,
        stack: &mut Vec<usize>,
        out: &mut Vec<SetPartition>,
    ) {
        if x == n {
            out.push(SetPartition::canonical(n, blocks.clone()));
            return;
        }
        for depth in 0..stack.len() {
            let b = stack[depth];
            let saved: Vec<usize> = stack.drain(depth + 1..).collect();
            blocks[b].push(x);
            rec(x + 1, n, blocks, stack, out);
            blocks[b].pop();
            stack.extend(saved);
        }
        blocks.push(vec![x]);
        stack.push(blocks.len() - 1);
        rec(x + 1, n, blocks, stack, out);
        stack.pop();
        blocks.pop();
    }
    let mut out = vec![];
    rec(0, n, &mut vec![], &mut vec![], &mut out);
    out.sort();
    out
}

pub fn enumerate_bnc(chi: &SideMap) -> Result<Vec<BncPartition>> {
    enumerate_bnc_with_limit(chi, DEFAULT_ENUM_LIMIT)
}

pub fn enumerate_bnc_with_limit(chi: &SideMap, limit: usize) -> Result<Vec<BncPartition>> {
    let n = chi.len();
    if n > limit {
        return Err(Error::LimitExceeded { n, limit, count: catalan(n) });
    }
    let s = side_permutation(chi);
    let mut out: Vec<BncPartition> = enumerate_nc(n)
        .iter()
        .map(|p| BncPartition { chi: chi.clone(), partition: s.from_nc(p) })
        .collect();
    out.sort_by(|a, b| a.partition.cmp(&b.partition));
    Ok(out)
}

/// π ≤ σ.
pub fn refines(pi: &BncPartition, sigma: &BncPartition) -> Result<bool> {
    same_chi(pi, sigma)?;
    Ok(pi.partition.refines(&sigma.partition))
}

pub fn meet_bnc(pi: &BncPartition, sigma: &BncPartition) -> Result<BncPartition> {
    same_chi(pi, sigma)?;
    Ok(BncPartition::new_unchecked(pi.partition.meet(&sigma.partition), pi.chi.clone()))
}

pub fn join_bnc(pi: &BncPartition, sigma: &BncPartition) -> Result<BncPartition> {
    same_chi(pi, sigma)?;
    let s = side_permutation(&pi.chi);
    let joined = nc_join(&s.to_nc(&pi.partition), &s.to_nc(&sigma.partition));
    Ok(BncPartition::new_unchecked(s.from_nc(&joined), pi.chi.clone()))
}

/// Join in NC(n): join in P(n), then merge crossing blocks until none cross.
pub fn nc_join(a: &SetPartition, b: &SetPartition) -> SetPartition {
    let mut p = a.join_all(b);
    loop {
        match first_crossing(&p) {
            None => return p,
            Some((i, j)) => {
                let mut blocks = p.blocks.clone();
                let bj = blocks.remove(j);
                blocks[i].extend(bj);
                p = SetPartition::canonical(p.n, blocks);
            }
        }
    }
}

fn first_crossing(p: &SetPartition) -> Option<(usize, usize)> {
    let bs = &p.blocks;
    for i in 0..bs.len() {
        for j in i + 1..bs.len() {
            if blocks_cross(&bs[i], &bs[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Disjoint u, v cross iff two consecutive elements of v enclose part of u
/// while u also has an element outside them.
fn blocks_cross(u: &[usize], v: &[usize]) -> bool {
    v.windows(2).any(|w| {
        let inside = u.iter().any(|&x| w[0] < x && x < w[1]);
        let outside = u.iter().any(|&x| x < w[0] || x > w[1]);
        inside && outside
    })
}

/// K_NC(π) = π⁻¹γ as permutations, γ = (0 1 … n−1).
pub fn kreweras_nc(pi: &SetPartition) -> SetPartition {
    let n = pi.n();
    let mut prev = vec![0; n];
    for b in pi.blocks() {
        for (j, &x) in b.iter().enumerate() {
            prev[b[(j + 1) % b.len()]] = x;
        }
    }
    let k: Vec<usize> = (0..n).map(|i| prev[(i + 1) % n]).collect();
    let mut labels = vec![usize::MAX; n];
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        let mut x = start;
        while labels[x] == usize::MAX {
            labels[x] = start;
            x = k[x];
        }
    }
    SetPartition::from_labels(&labels)
}

/// K_BNC(π) = s_χ·K_NC(s_χ⁻¹·π).
pub fn kreweras(pi: &BncPartition) -> BncPartition {
    let s = side_permutation(&pi.chi);
    let k = kreweras_nc(&s.to_nc(&pi.partition));
    BncPartition::new_unchecked(s.from_nc(&k), pi.chi.clone())
}

/// π|_S relabeled to 0..|S|, with χ|_S.
pub fn restrict(pi: &BncPartition, subset: &[usize]) -> Result<BncPartition> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let p = pi.partition.restrict(&sorted)?;
    Ok(BncPartition::new_unchecked(p, pi.chi.restrict(&sorted)))
}

/// π|_{q=q+1}: identify q and q+1, then drop q.
pub fn collapse(pi: &BncPartition, q: usize) -> Result<BncPartition> {
    let n = pi.n();
    if q + 1 >= n {
        return Err(Error::IndexOutOfRange { index: q, n });
    }
    let mut labels = pi.partition.labels();
    let (from, to) = (labels[q], labels[q + 1]);
    for l in labels.iter_mut() {
        if *l == from {
            *l = to;
        }
    }
    labels.remove(q);
    BncPartition::new(SetPartition::from_labels(&labels), pi.chi.remove(q))
}

/// χ̂ for the grouping `k(0) = 0 < k(1) < … < k(m) = n`.
pub fn hat_chi(chi: &SideMap, groups: &[usize]) -> Result<SideMap> {
    check_groups(chi.len(), groups)?;
    let mut sides = vec![];
    for p in 0..chi.len() {
        sides.extend(std::iter::repeat(chi.side(p)).take(groups[p + 1] - groups[p]));
    }
    Ok(SideMap(sides))
}

fn check_groups(m: usize, groups: &[usize]) -> Result<()> {
    if groups.len() != m + 1 {
        return Err(Error::MalformedGroups(format!("expected {} cut points, got {}", m + 1, groups.len())));
    }
    if groups[0] != 0 {
        return Err(Error::MalformedGroups("k(0) must be 0".into()));
    }
    if groups.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::MalformedGroups("cut points must increase strictly".into()));
    }
    Ok(())
}

/// π ↦ π̂: node p becomes the run k(p−1)+1..k(p).
pub fn hat_embed(pi: &BncPartition, groups: &[usize]) -> Result<BncPartition> {
    let chi_hat = hat_chi(&pi.chi, groups)?;
    let blocks = pi
        .blocks()
        .iter()
        .map(|b| b.iter().flat_map(|&p| groups[p]..groups[p + 1]).collect())
        .collect();
    let n = *groups.last().unwrap();
    Ok(BncPartition::new_unchecked(SetPartition::canonical(n, blocks), chi_hat))
}

/// π ≤_lat σ: π ≤ σ and inside every σ-block the π-blocks are consecutive
/// runs in the natural order.
pub fn is_lateral_refinement(pi: &BncPartition, sigma: &BncPartition) -> Result<bool> {
    same_chi(pi, sigma)?;
    Ok(lateral_refines(&pi.partition, &sigma.partition))
}

pub(crate) fn lateral_refines(pi: &SetPartition, sigma: &SetPartition) -> bool {
    if !pi.refines(sigma) {
        return false;
    }
    let l = pi.labels();
    sigma.blocks().iter().all(|w| {
        let mut seen = std::collections::HashSet::new();
        let mut prev = usize::MAX;
        w.iter().all(|&x| {
            if l[x] == prev {
                return true;
            }
            prev = l[x];
            seen.insert(l[x])
        })
    })
}

/// Every lateral refinement of σ, each σ-block cut at an arbitrary subset of
/// its gaps.
pub fn lateral_refinements(sigma: &SetPartition) -> Vec<SetPartition> {
    let mut out = vec![vec![]];
    for w in sigma.blocks() {
        let gaps = w.len() - 1;
        let mut next = vec![];
        for partial in &out {
            for mask in 0..1u32 << gaps {
                let mut blocks: Vec<Vec<usize>> = partial.clone();
                let mut cur = vec![w[0]];
                for g in 0..gaps {
                    if mask >> g & 1 == 1 {
                        blocks.push(std::mem::take(&mut cur));
                    }
                    cur.push(w[g + 1]);
                }
                blocks.push(cur);
                next.push(blocks);
            }
        }
        out = next;
    }
    out.into_iter().map(|b| SetPartition::canonical(sigma.n(), b)).collect()
}
