//! Dyadic cubes `Q_{j,m} = 2^{-j}([0,1)^n + m)` and the non-uniformly
//! distributed cube sets `A_j` used by the second family of test functions.

use std::collections::HashMap;

use serde::Serialize;

use crate::{Error, Result};

/// Largest admissible `|level|`; keeps `2^level` exact in 64-bit integers.
pub const MAX_LEVEL: i32 = 62;

/// Upper bound on the number of members a [`DistributedCubeSet`] may hold.
pub const MAX_MEMBERS: u64 = 1 << 28;

/// `floor(m / 2^shift)` for non-negative shifts, exact for all `i64`.
#[inline]
pub fn floor_shift(m: i64, shift: u32) -> i64 {
    if shift >= 63 {
        if m < 0 {
            -1
        } else {
            0
        }
    } else {
        m >> shift
    }
}

/// `floor(2^e)` for `e >= 0`. Exponents within `1e-9` of an integer are
/// snapped so that e.g. `3 * 0.5 * 2` yields exactly `8`.
pub fn floor_pow2(e: f64) -> u64 {
    debug_assert!(e >= -1e-9);
    let r = e.round();
    if (e - r).abs() < 1e-9 {
        if r <= 0.0 {
            return 1;
        }
        return 1u64 << (r as u32);
    }
    e.exp2().floor() as u64
}

/// The half-open cube `2^{-level}([0,1)^n + offset)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DyadicCube {
    level: i32,
    offset: Vec<i64>,
}

impl DyadicCube {
    pub fn new(level: i32, offset: Vec<i64>) -> Result<Self> {
        if level.abs() > MAX_LEVEL {
            return Err(Error::invalid(format!(
                "cube level {level} outside [-{MAX_LEVEL}, {MAX_LEVEL}]"
            )));
        }
        if offset.is_empty() {
            return Err(Error::invalid("cube offset must have at least one coordinate"));
        }
        Ok(Self { level, offset })
    }

    /// `Q_{0,0}` in dimension `n`.
    pub fn unit(n: usize) -> Self {
        Self {
            level: 0,
            offset: vec![0; n],
        }
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    /// Side length `2^{-level}`.
    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// Lebesgue measure `2^{-level n}`.
    pub fn volume(&self) -> f64 {
        (-(self.level as f64) * self.dim() as f64).exp2()
    }

    pub fn lower_corner(&self) -> Vec<f64> {
        let side = self.side();
        self.offset.iter().map(|&m| m as f64 * side).collect()
    }

    pub fn upper_corner(&self) -> Vec<f64> {
        let side = self.side();
        self.offset.iter().map(|&m| (m + 1) as f64 * side).collect()
    }

    /// The unique cube at `level <= self.level` containing `self`.
    pub fn ancestor(&self, level: i32) -> Option<Self> {
        if level > self.level || level < -MAX_LEVEL {
            return None;
        }
        let shift = (self.level - level) as u32;
        Some(Self {
            level,
            offset: self.offset.iter().map(|&m| floor_shift(m, shift)).collect(),
        })
    }

    pub fn parent(&self) -> Option<Self> {
        self.ancestor(self.level - 1)
    }

    /// The `2^n` children in lexicographic order of their offsets.
    pub fn children(&self) -> Vec<Self> {
        if self.level >= MAX_LEVEL {
            return Vec::new();
        }
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| Self {
                level: self.level + 1,
                offset: child_offset(&self.offset, mask),
            })
            .collect()
    }

    /// Whether the half-open cube meets the half-open box `[lo, hi)`.
    pub fn intersects_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        let side = self.side();
        self.offset
            .iter()
            .zip(lo.iter().zip(hi))
            .all(|(&m, (&a, &b))| (m as f64) * side < b && ((m + 1) as f64) * side > a)
    }
}

/// Offset of the child selected by `mask`; axis 0 is the most significant bit
/// so that increasing masks enumerate children lexicographically.
pub(crate) fn child_offset(parent: &[i64], mask: usize) -> Vec<i64> {
    let n = parent.len();
    parent
        .iter()
        .enumerate()
        .map(|(k, &m)| 2 * m + ((mask >> (n - 1 - k)) & 1) as i64)
        .collect()
}

/// Whether `inner ⊆ outer` as half-open cubes.
pub fn contains(inner: &DyadicCube, outer: &DyadicCube) -> Result<bool> {
    if inner.dim() != outer.dim() {
        return Err(Error::DimensionMismatch {
            expected: outer.dim(),
            got: inner.dim(),
        });
    }
    if inner.level < outer.level {
        return Ok(false);
    }
    let shift = (inner.level - outer.level) as u32;
    Ok(inner
        .offset
        .iter()
        .zip(&outer.offset)
        .all(|(&m, &k)| floor_shift(m, shift) == k))
}

/// A set of level-`level` offsets inside `[0,1)^dim` concentrated towards the
/// origin: roughly `2^{(level-J) alpha}` members in every `Q_{J,0}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributedCubeSet {
    pub dim: usize,
    pub alpha: f64,
    pub level: u32,
    /// Offsets in lexicographic order.
    pub members: Vec<Vec<i64>>,
    pub c_tilde: f64,
}

impl DistributedCubeSet {
    /// Wrap an arbitrary member list (no invariants are checked; see
    /// [`verify_distribution_bounds`]).
    pub fn from_members(dim: usize, alpha: f64, level: u32, mut members: Vec<Vec<i64>>) -> Self {
        members.sort();
        Self {
            dim,
            alpha,
            level,
            members,
            c_tilde: c_tilde(dim, alpha),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of members `m` with `Q_{level,m} ⊂ Q_{J,K}`.
    pub fn count_in(&self, coarse_level: u32, k: &[i64]) -> usize {
        let shift = self.level.saturating_sub(coarse_level);
        self.members
            .iter()
            .filter(|m| m.iter().zip(k).all(|(&mi, &ki)| floor_shift(mi, shift) == ki))
            .count()
    }
}

/// `max(1, (2^d + 2^alpha - 2) / (2^alpha - 1))`.
pub fn c_tilde(dim: usize, alpha: f64) -> f64 {
    let two_a = alpha.exp2();
    let value = ((dim as f64).exp2() + two_a - 2.0) / (two_a - 1.0);
    value.max(1.0)
}

/// Build `A_j` for `j = level`.
///
/// `Q_{j,0}` is always a member. Walking the shells `Q_{J-1,0} \ Q_{J,0}` from
/// `J = level` down to `1`, each shell receives exactly
/// `floor(2^{(j-J+1)alpha}) - floor(2^{(j-J)alpha})` members, split as evenly
/// as possible over its `2^dim - 1` sibling cubes (extra members go to the
/// lexicographically first siblings). Inside a sibling, members are spread by
/// recursive balanced splitting over children, again lexicographically.
pub fn construct_distributed_cubes(dim: usize, alpha: f64, level: u32) -> Result<DistributedCubeSet> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if dim > 16 {
        return Err(Error::invalid("dimension above 16 is not supported"));
    }
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::invalid(format!(
            "alpha must lie strictly between 0 and {dim}, got {alpha}"
        )));
    }
    if level as i32 > MAX_LEVEL {
        return Err(Error::invalid(format!("level {level} exceeds {MAX_LEVEL}")));
    }
    let total = floor_pow2(level as f64 * alpha);
    if total > MAX_MEMBERS {
        return Err(Error::invalid(format!(
            "floor(2^(level*alpha)) = {total} members exceeds the supported maximum {MAX_MEMBERS}"
        )));
    }

    let target = |coarse: u32| floor_pow2((level - coarse) as f64 * alpha);
    let siblings = (1usize << dim) - 1;
    let mut members = Vec::with_capacity(total as usize);
    members.push(vec![0; dim]);

    for coarse in (1..=level).rev() {
        let shell = target(coarse - 1) - target(coarse);
        let base = shell / siblings as u64;
        let extra = (shell % siblings as u64) as usize;
        for (rank, mask) in (1..=siblings).enumerate() {
            let count = base + u64::from(rank < extra);
            if count == 0 {
                continue;
            }
            // Q_{coarse,K} with K = mask bits, a child of Q_{coarse-1,0}.
            let sibling = child_offset(&vec![0; dim], mask);
            spread(dim, coarse, sibling, count, level, &mut members)?;
        }
    }

    members.sort();
    Ok(DistributedCubeSet {
        dim,
        alpha,
        level,
        members,
        c_tilde: c_tilde(dim, alpha),
    })
}

fn spread(dim: usize, level: u32, offset: Vec<i64>, count: u64, target: u32, out: &mut Vec<Vec<i64>>) -> Result<()> {
    let capacity_bits = (target - level) as u64 * dim as u64;
    if capacity_bits < 63 && count > (1u64 << capacity_bits) {
        return Err(Error::invalid(format!(
            "cannot place {count} members in a level-{level} cube at resolution {target}"
        )));
    }
    if level == target {
        out.push(offset);
        return Ok(());
    }
    let children = 1u64 << dim;
    let base = count / children;
    let extra = count % children;
    for mask in 0..children {
        let c = base + u64::from(mask < extra);
        if c == 0 {
            // Remaining children are empty too.
            break;
        }
        spread(dim, level + 1, child_offset(&offset, mask as usize), c, target, out)?;
    }
    Ok(())
}

/// Counts for one coarse level `J`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCounts {
    pub coarse_level: u32,
    /// Members inside `Q_{J,0}`.
    pub corner_count: usize,
    /// Largest count over all `Q_{J,K}` with `0 <= K_i < 2^J`.
    pub max_count: usize,
    pub argmax: Vec<i64>,
    /// `floor(2^{(j-J) alpha})`.
    pub lower_bound: u64,
    /// `c_tilde * 2^{(j-J) alpha}`.
    pub upper_bound: f64,
    pub balance_ok: bool,
    pub pinning_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionReport {
    pub cardinality: usize,
    pub expected_cardinality: u64,
    pub cardinality_ok: bool,
    /// Every member lies in `[0, 2^j)^dim` and no member repeats.
    pub containment_ok: bool,
    pub levels: Vec<LevelCounts>,
    pub passed: bool,
}

/// Exhaustively count members in every `Q_{J,K}`, `J = 0..=level`, and check
/// cardinality, the factor-2 balance bound and the pinning bounds.
pub fn verify_distribution_bounds(set: &DistributedCubeSet) -> DistributionReport {
    let j = set.level;
    let side = if j >= 63 { i64::MAX } else { 1i64 << j };
    let expected_cardinality = floor_pow2(j as f64 * set.alpha);
    let mut sorted = set.members.clone();
    sorted.sort();
    sorted.dedup();
    let containment_ok = sorted.len() == set.members.len()
        && set
            .members
            .iter()
            .all(|m| m.len() == set.dim && m.iter().all(|&x| (0..side).contains(&x)));

    let mut levels = Vec::with_capacity(j as usize + 1);
    for coarse in 0..=j {
        let shift = j - coarse;
        let mut counts: HashMap<Vec<i64>, usize> = HashMap::new();
        for m in &set.members {
            let key: Vec<i64> = m.iter().map(|&x| floor_shift(x, shift)).collect();
            *counts.entry(key).or_default() += 1;
        }
        let corner_count = counts.get(&vec![0; set.dim]).copied().unwrap_or(0);
        let (argmax, max_count) = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(k, &c)| (k.clone(), c))
            .unwrap_or((vec![0; set.dim], 0));
        let exponent = shift as f64 * set.alpha;
        let lower_bound = floor_pow2(exponent);
        let upper_bound = set.c_tilde * exponent.exp2();
        levels.push(LevelCounts {
            coarse_level: coarse,
            corner_count,
            max_count,
            argmax,
            lower_bound,
            upper_bound,
            balance_ok: max_count <= 2 * corner_count,
            pinning_ok: lower_bound <= corner_count as u64 && corner_count as f64 <= upper_bound,
        });
    }

    let cardinality_ok = set.members.len() as u64 == expected_cardinality;
    let passed = cardinality_ok && containment_ok && levels.iter().all(|l| l.balance_ok && l.pinning_ok);
    DistributionReport {
        cardinality: set.members.len(),
        expected_cardinality,
        cardinality_ok,
        containment_ok,
        levels,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(level: i32, offset: &[i64]) -> DyadicCube {
        DyadicCube::new(level, offset.to_vec()).unwrap()
    }

    #[test]
    fn containment_examples() {
        assert!(contains(&cube(1, &[0, 0]), &cube(0, &[0, 0])).unwrap());
        assert!(contains(&cube(0, &[0]), &cube(0, &[0])).unwrap());
        assert!(!contains(&cube(2, &[3]), &cube(1, &[0])).unwrap());
        assert!(contains(&cube(2, &[3]), &cube(1, &[1])).unwrap());
        // Negative offsets use floor division.
        assert!(contains(&cube(3, &[-1]), &cube(0, &[-1])).unwrap());
        assert!(contains(&cube(0, &[5]), &cube(-2, &[1])).unwrap());
        assert!(!contains(&cube(0, &[0]), &cube(1, &[0])).unwrap());
    }

    #[test]
    fn containment_rejects_dimension_mismatch() {
        let err = contains(&cube(0, &[0]), &cube(0, &[0, 0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn level_bounds_enforced() {
        assert!(DyadicCube::new(63, vec![0]).is_err());
        assert!(DyadicCube::new(-63, vec![0]).is_err());
        assert!(DyadicCube::new(62, vec![0]).is_ok());
        assert!(DyadicCube::new(0, vec![]).is_err());
    }

    #[test]
    fn floor_shift_extremes() {
        assert_eq!(floor_shift(-1, 1), -1);
        assert_eq!(floor_shift(-3, 1), -2);
        assert_eq!(floor_shift(i64::MAX, 100), 0);
        assert_eq!(floor_shift(i64::MIN, 100), -1);
    }

    #[test]
    fn children_partition_parent() {
        let p = cube(1, &[1, -1]);
        let kids = p.children();
        assert_eq!(kids.len(), 4);
        assert_eq!(kids[0].offset(), &[2, -2]);
        assert_eq!(kids[1].offset(), &[2, -1]);
        assert_eq!(kids[3].offset(), &[3, -1]);
        for k in &kids {
            assert_eq!(k.parent().unwrap(), p);
        }
        let vol: f64 = kids.iter().map(DyadicCube::volume).sum();
        assert_eq!(vol, p.volume());
    }

    #[test]
    fn base_of_induction() {
        let set = construct_distributed_cubes(1, 0.5, 0).unwrap();
        assert_eq!(set.members, vec![vec![0]]);
        let report = verify_distribution_bounds(&set);
        assert!(report.passed);
        assert_eq!(report.levels.len(), 1);
        assert_eq!(report.levels[0].corner_count, 1);
    }

    #[test]
    fn two_dimensional_alpha_one() {
        let set = construct_distributed_cubes(2, 1.0, 3).unwrap();
        assert_eq!(set.len(), 8);
        assert_eq!(set.c_tilde, 4.0);
        // Brute-force count inside Q_{1,0}: offsets with both coordinates < 4.
        let in_q10 = set.members.iter().filter(|m| m[0] < 4 && m[1] < 4).count();
        assert!((4..=16).contains(&in_q10), "{in_q10}");
        assert_eq!(set.count_in(1, &[0, 0]), in_q10);
        let report = verify_distribution_bounds(&set);
        assert!(report.passed, "{report:?}");
        assert_eq!(report.levels.len(), 4);
    }

    #[test]
    fn one_shell_by_hand() {
        let set = construct_distributed_cubes(2, 1.0, 1).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.members.contains(&vec![0, 0]));
        // The single shell member lands in the first sibling (0,1).
        assert_eq!(set.members, vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn hand_executed_one_dimensional_case() {
        // j = 3, alpha = 1/2: targets floor(2^{k/2}) for k = 0..3 are 1,1,2,2,
        // so only the shell Q_{1,0} \ Q_{2,0} (offsets 2,3) receives a member.
        let set = construct_distributed_cubes(1, 0.5, 3).unwrap();
        assert_eq!(set.members, vec![vec![0], vec![2]]);
        assert!(verify_distribution_bounds(&set).passed);
    }

    #[test]
    fn corner_cluster_violates_balance() {
        // Eight members packed into the far corner cube Q_{1,(1,1)} while
        // Q_{1,0} only holds the origin.
        let mut members = vec![vec![0, 0]];
        for a in 6..8 {
            for b in 4..8 {
                members.push(vec![a, b]);
            }
        }
        members.truncate(8);
        let set = DistributedCubeSet::from_members(2, 1.0, 3, members);
        let report = verify_distribution_bounds(&set);
        assert!(!report.passed);
        assert!(report.levels.iter().any(|l| !l.balance_ok));
    }

    #[test]
    fn out_of_cube_member_detected() {
        let set = DistributedCubeSet::from_members(1, 0.5, 2, vec![vec![0], vec![4]]);
        assert!(!verify_distribution_bounds(&set).containment_ok);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(construct_distributed_cubes(2, 0.0, 3).is_err());
        assert!(construct_distributed_cubes(2, 2.0, 3).is_err());
        assert!(construct_distributed_cubes(1, -0.5, 3).is_err());
        assert!(construct_distributed_cubes(0, 0.5, 3).is_err());
    }

    #[test]
    fn c_tilde_floor_is_one() {
        assert_eq!(c_tilde(1, 0.5), (2.0 + 2f64.sqrt() - 2.0) / (2f64.sqrt() - 1.0));
        assert!(c_tilde(1, 0.999) >= 1.0);
        assert_eq!(c_tilde(2, 1.0), 4.0);
    }

    #[test]
    fn floor_pow2_snaps_integers() {
        assert_eq!(floor_pow2(0.3 * 10.0), 8);
        assert_eq!(floor_pow2(1.5), 2);
        assert_eq!(floor_pow2(0.0), 1);
        assert_eq!(floor_pow2(18.0), 1 << 18);
    }
}
