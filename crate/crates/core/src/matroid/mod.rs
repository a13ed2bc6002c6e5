//! Exact checks on the vector families `E₁ ⊂ Z^{N+1}` and `E₂ ⊂ Z^{2N+1}`:
//! explicit basis pairs for every ordered pair of elements, and membership
//! of `θ ≡ ½` in the basis polytope.

mod cases;
mod exact;
mod polytope;

pub use cases::{appendix_basis_pair, verify_basis_pair, verify_pair, BasisPair, PairCheck, PairFailure};
pub use exact::{determinant, rank};
pub use polytope::{phi_point, verify_lemma_geom, LemmaGeomReport, PolytopePoint, Rational};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Largest number of candidate subsets `enumerate_bases` will scan.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyKind {
    E1,
    E2,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::E1 => "E1",
            FamilyKind::E2 => "E2",
        })
    }
}

/// The role of a family element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Role {
    /// `e_j`.
    Unit(usize),
    /// `e_i − e_{i+1}` in `E₁`.
    Difference(usize),
    /// `Σ_{j<2m} (−1)^j e_j` in `E₂`.
    LeftSum(usize),
    /// `Σ_{j<2m} (−1)^j e_{2N−j}` in `E₂`.
    RightSum(usize),
    /// `ζ = Σ (−1)^j e_j`.
    Zeta,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Unit(j) => write!(f, "e{j}"),
            Role::Difference(i) => write!(f, "e{}-e{}", i, i + 1),
            Role::LeftSum(m) => write!(f, "dL{m}"),
            Role::RightSum(m) => write!(f, "dR{m}"),
            Role::Zeta => f.write_str("zeta"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatroidError {
    #[error("{kind} needs N >= {min}, got {n}")]
    OrderTooSmall { kind: FamilyKind, n: usize, min: usize },
    #[error("{kind} with N = {n} exceeds the supported range (N <= {max})")]
    OrderTooLarge { kind: FamilyKind, n: usize, max: usize },
    #[error("subset has {found} elements, expected {expected}")]
    WrongSubsetSize { expected: usize, found: usize },
    #[error("index {index} is outside a family of {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("subset repeats index {0}")]
    RepeatedIndex(usize),
    #[error("v and w must differ")]
    SameElement,
    #[error("{candidates} candidate subsets exceed the limit of {limit}")]
    EnumerationLimit { candidates: u128, limit: u128 },
    #[error("no case covers v = {v}, w = {w}")]
    UnreachableCase { v: Role, w: Role },
}

/// An ordered list of integer vectors with their roles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VectorFamily {
    kind: FamilyKind,
    order: usize,
    dim: usize,
    vectors: Vec<Vec<i64>>,
    roles: Vec<Role>,
}

fn unit(dim: usize, j: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[j] = 1;
    v
}

fn sign(j: usize) -> i64 {
    if j.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Units `e₀..e_N`, differences `e₀−e₁ … e_{N−1}−e_N`, then `ζ`.
pub fn build_e1(order: usize) -> Result<VectorFamily, MatroidError> {
    if order < 2 {
        return Err(MatroidError::OrderTooSmall { kind: FamilyKind::E1, n: order, min: 2 });
    }
    let dim = order + 1;
    let mut roles: Vec<Role> = (0..dim).map(Role::Unit).collect();
    roles.extend((0..order).map(Role::Difference));
    roles.push(Role::Zeta);
    Ok(VectorFamily::from_roles(FamilyKind::E1, order, dim, roles))
}

/// Units `e₀..e_{2N}`, left sums for `m = 1..N`, right sums for `m = 1..N`, then `ζ`.
pub fn build_e2(order: usize) -> Result<VectorFamily, MatroidError> {
    if order < 1 {
        return Err(MatroidError::OrderTooSmall { kind: FamilyKind::E2, n: order, min: 1 });
    }
    let dim = 2 * order + 1;
    let mut roles: Vec<Role> = (0..dim).map(Role::Unit).collect();
    roles.extend((1..=order).map(Role::LeftSum));
    roles.extend((1..=order).map(Role::RightSum));
    roles.push(Role::Zeta);
    Ok(VectorFamily::from_roles(FamilyKind::E2, order, dim, roles))
}

pub fn build_family(kind: FamilyKind, order: usize) -> Result<VectorFamily, MatroidError> {
    match kind {
        FamilyKind::E1 => build_e1(order),
        FamilyKind::E2 => build_e2(order),
    }
}

impl VectorFamily {
    fn from_roles(kind: FamilyKind, order: usize, dim: usize, roles: Vec<Role>) -> Self {
        let vectors = roles.iter().map(|r| vector_of(*r, dim)).collect();
        Self { kind, order, dim, vectors, roles }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// The `N` the family was built from.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn index_of(&self, role: Role) -> Option<usize> {
        self.roles.iter().position(|r| *r == role)
    }

    fn check_index(&self, index: usize) -> Result<(), MatroidError> {
        if index < self.len() {
            Ok(())
        } else {
            Err(MatroidError::IndexOutOfRange { index, len: self.len() })
        }
    }

    /// The coordinate reversal `e_k → e_{dim−1−k}` as a map on roles.
    ///
    /// On `E₂` it maps every vector onto a family vector; on `E₁` the
    /// differences and, for odd `N`, `ζ` land on a family vector up to sign.
    pub fn reflect(&self, role: Role) -> Role {
        let top = self.dim - 1;
        match role {
            Role::Unit(j) => Role::Unit(top - j),
            Role::Difference(i) => Role::Difference(self.order - 1 - i),
            Role::LeftSum(m) => Role::RightSum(m),
            Role::RightSum(m) => Role::LeftSum(m),
            Role::Zeta => Role::Zeta,
        }
    }
}

fn vector_of(role: Role, dim: usize) -> Vec<i64> {
    match role {
        Role::Unit(j) => unit(dim, j),
        Role::Difference(i) => {
            let mut v = unit(dim, i);
            v[i + 1] = -1;
            v
        }
        Role::LeftSum(m) => {
            let mut v = vec![0; dim];
            (0..2 * m).for_each(|j| v[j] = sign(j));
            v
        }
        Role::RightSum(m) => {
            let mut v = vec![0; dim];
            (0..2 * m).for_each(|j| v[dim - 1 - j] = sign(j));
            v
        }
        Role::Zeta => (0..dim).map(sign).collect(),
    }
}

/// Whether the vectors at `subset` form a basis of the ambient space.
pub fn is_basis(family: &VectorFamily, subset: &[usize]) -> Result<bool, MatroidError> {
    if subset.len() != family.dim {
        return Err(MatroidError::WrongSubsetSize { expected: family.dim, found: subset.len() });
    }
    for (i, &a) in subset.iter().enumerate() {
        family.check_index(a)?;
        if subset[..i].contains(&a) {
            return Err(MatroidError::RepeatedIndex(a));
        }
    }
    let rows: Vec<Vec<i64>> = subset.iter().map(|&i| family.vectors[i].clone()).collect();
    Ok(determinant(rows) != 0)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Every basis among the family's `dim`-subsets, in lexicographic order.
pub fn enumerate_bases(family: &VectorFamily) -> Result<Vec<Vec<usize>>, MatroidError> {
    let (n, k) = (family.len(), family.dim);
    let candidates = binomial(n, k);
    if candidates > ENUMERATION_LIMIT {
        return Err(MatroidError::EnumerationLimit { candidates, limit: ENUMERATION_LIMIT });
    }
    let mut out = Vec::new();
    if k > n {
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if is_basis(family, &idx)? {
            out.push(idx.clone());
        }
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return Ok(out);
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn float_rank(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())) else {
                break;
            };
            if m[p][c].abs() < 1e-9 {
                continue;
            }
            m.swap(rank, p);
            for r in rank + 1..m.len() {
                let f = m[r][c] / m[rank][c];
                let pivot = m[rank].clone();
                for (x, p) in m[r][c..cols].iter_mut().zip(&pivot[c..cols]) {
                    *x -= f * p;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn smallest_families_match_their_listing() {
        let e1 = build_e1(2).unwrap();
        let expected: Vec<Vec<i64>> =
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, 0], vec![0, 1, -1], vec![1, -1, 1]];
        assert_eq!(e1.vectors(), &expected[..]);
        let e2 = build_e2(1).unwrap();
        let expected: Vec<Vec<i64>> =
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, 0], vec![0, -1, 1], vec![1, -1, 1]];
        assert_eq!(e2.vectors(), &expected[..]);
        assert!(matches!(build_e1(1), Err(MatroidError::OrderTooSmall { min: 2, .. })));
        assert!(matches!(build_e2(0), Err(MatroidError::OrderTooSmall { min: 1, .. })));
    }

    #[test]
    fn families_have_the_stated_size_and_distinct_nonzero_vectors() {
        for n in 2..=8 {
            let f = build_e1(n).unwrap();
            assert_eq!((f.len(), f.dim()), (2 * n + 2, n + 1));
            check_distinct(&f);
        }
        for n in 1..=8 {
            let f = build_e2(n).unwrap();
            assert_eq!((f.len(), f.dim()), (4 * n + 2, 2 * n + 1));
            check_distinct(&f);
        }
    }

    fn check_distinct(f: &VectorFamily) {
        for (i, v) in f.vectors().iter().enumerate() {
            assert!(v.iter().any(|&x| x != 0));
            assert!(!f.vectors()[..i].contains(v));
        }
    }

    #[test]
    fn basis_examples() {
        let f = build_e1(2).unwrap();
        assert!(is_basis(&f, &[0, 1, 2]).unwrap());
        assert!(is_basis(&f, &[3, 4, 5]).unwrap());
        assert_eq!(determinant(vec![vec![1, -1, 0], vec![0, 1, -1], vec![1, -1, 1]]), 1);
        assert!(!is_basis(&f, &[0, 1, 3]).unwrap());
        assert!(matches!(is_basis(&f, &[0, 1]), Err(MatroidError::WrongSubsetSize { expected: 3, found: 2 })));
        assert!(matches!(is_basis(&f, &[0, 0, 1]), Err(MatroidError::RepeatedIndex(0))));
        assert!(matches!(is_basis(&f, &[0, 1, 9]), Err(MatroidError::IndexOutOfRange { .. })));
    }

    #[test]
    fn enumeration_matches_a_brute_force_scan() {
        let f = build_e1(2).unwrap();
        let bases = enumerate_bases(&f).unwrap();
        let mut brute = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    let rows = vec![f.vectors()[a].clone(), f.vectors()[b].clone(), f.vectors()[c].clone()];
                    if float_rank(&rows) == 3 {
                        brute.push(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(bases, brute);
        assert_eq!(bases.len(), 16);
        assert!(bases.iter().all(|b| is_basis(&f, b).unwrap()));
    }

    #[test]
    fn units_alone_have_one_basis() {
        let f = VectorFamily::from_roles(FamilyKind::E1, 3, 4, (0..4).map(Role::Unit).collect());
        assert_eq!(enumerate_bases(&f).unwrap(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn enumeration_guard() {
        let f = build_e2(6).unwrap();
        assert!(matches!(enumerate_bases(&f), Err(MatroidError::EnumerationLimit { .. })));
    }

    #[test]
    fn exact_and_float_rank_agree_on_random_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let families: Vec<_> = (2..=6).map(|n| build_e1(n).unwrap()).chain((1..=5).map(|n| build_e2(n).unwrap())).collect();
        for t in 0..1000 {
            let f = &families[t % families.len()];
            let subset = sample(&mut rng, f.len(), f.dim()).into_vec();
            let rows: Vec<_> = subset.iter().map(|&i| f.vectors()[i].clone()).collect();
            assert_eq!(is_basis(f, &subset).unwrap(), float_rank(&rows) == f.dim(), "{subset:?}");
        }
    }

    #[test]
    fn reversal_maps_e1_onto_itself_up_to_sign() {
        for n in 2..=7 {
            let f = build_e1(n).unwrap();
            for (role, v) in f.roles().iter().zip(f.vectors()) {
                let rev: Vec<i64> = v.iter().rev().copied().collect();
                let image = &f.vectors()[f.index_of(f.reflect(*role)).unwrap()];
                let neg: Vec<i64> = rev.iter().map(|x| -x).collect();
                assert!(*image == rev || *image == neg, "{role}");
            }
        }
    }

    #[test]
    fn reversal_maps_e2_onto_itself_exactly() {
        for n in 1..=7 {
            let f = build_e2(n).unwrap();
            for (role, v) in f.roles().iter().zip(f.vectors()) {
                let rev: Vec<i64> = v.iter().rev().copied().collect();
                assert_eq!(f.vectors()[f.index_of(f.reflect(*role)).unwrap()], rev, "{role}");
            }
        }
    }

    proptest! {
        #[test]
        fn determinant_is_multiplicative_under_row_swaps(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 4)) {
            let mut swapped = rows.clone();
            swapped.swap(0, 3);
            prop_assert_eq!(determinant(rows.clone()), -determinant(swapped));
            prop_assert_eq!(determinant(rows.clone()) != 0, rank(rows) == 4);
        }
    }
}
