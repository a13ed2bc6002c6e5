//! For each ordered pair `v ≠ w` of a family, two bases `B₁`, `B₂` with
//! `B₁ ∩ B₂ = {v}` and `E ∖ (B₁ ∪ B₂) = {w}`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{is_basis, FamilyKind, MatroidError, Role, VectorFamily};

/// Two bases, as sorted family indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisPair {
    pub b1: Vec<usize>,
    pub b2: Vec<usize>,
}

/// The first condition a candidate pair violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairFailure {
    FirstNotBasis,
    SecondNotBasis,
    IntersectionNotV,
    ComplementNotW,
}

impl fmt::Display for PairFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairFailure::FirstNotBasis => "B1 is not a basis",
            PairFailure::SecondNotBasis => "B2 is not a basis",
            PairFailure::IntersectionNotV => "intersection ≠ {v}",
            PairFailure::ComplementNotW => "complement ≠ {w}",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub v: Role,
    pub w: Role,
    pub pair: BasisPair,
    pub failure: Option<PairFailure>,
}

impl PairCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

type Roles = Vec<Role>;

/// Outcome of a case-table lookup.
enum Case {
    Bases(Roles, Roles),
    /// Handled by applying the coordinate reversal first.
    Reflect,
    Uncovered,
}

fn units(range: impl Iterator<Item = usize>) -> impl Iterator<Item = Role> {
    range.map(Role::Unit)
}

fn without(set: &[Role], drop: &[Role]) -> Roles {
    set.iter().filter(|r| !drop.contains(r)).copied().collect()
}

fn with(mut set: Roles, add: &[Role]) -> Roles {
    set.extend_from_slice(add);
    set
}

fn roles_for(f: &VectorFamily, v: Role, w: Role) -> Case {
    let s: Roles = units(0..f.dim()).collect();
    let d: Roles = f.roles().iter().filter(|r| !matches!(r, Role::Unit(_) | Role::Zeta)).copied().collect();
    match f.kind() {
        FamilyKind::E1 => e1_case(f.order(), &s, &d, v, w),
        FamilyKind::E2 => e2_case(f.order(), &s, &d, v, w),
    }
}

fn e1_case(n: usize, s: &[Role], d: &[Role], v: Role, w: Role) -> Case {
    use Role::{Difference as Diff, Unit, Zeta};
    let sv = |r: &[usize]| r.iter().map(|&j| Unit(j)).collect::<Roles>();
    let (b1, b2) = match (v, w) {
        (Unit(_), Unit(_)) => (with(without(s, &[w]), &[Zeta]), with(d.to_vec(), &[v])),
        (Unit(_), Zeta) => (s.to_vec(), with(d.to_vec(), &[v])),
        (Unit(k), Diff(i)) => {
            // w = e_{ℓ−1} − e_ℓ with ℓ = i + 1
            let hat = if k <= i { Unit(n) } else { Unit(0) };
            (with(without(s, &[hat]), &[Zeta]), with(without(d, &[w]), &[v, hat]))
        }
        (Diff(i), Unit(k)) => {
            if k != i && k != i + 1 {
                (with(without(s, &[w, Unit(i)]), &[Zeta, v]), with(d.to_vec(), &[Unit(i)]))
            } else {
                let Some(m) = (0..=n).find(|&m| m != i && m != i + 1) else {
                    return Case::Uncovered;
                };
                (with(without(s, &[Unit(m), w]), &[Zeta, v]), with(d.to_vec(), &[Unit(m)]))
            }
        }
        (Diff(a), Diff(b)) => {
            if a > b {
                return Case::Reflect;
            }
            let ends = [Unit(a), Unit(b + 1)];
            (with(without(s, &ends), &[Zeta, v]), with(without(d, &[w]), &ends))
        }
        (Zeta, Unit(k)) => {
            if n == 2 && k == 1 {
                (sv(&[0, 2]).into_iter().chain([Zeta]).collect(), vec![Diff(0), Diff(1), Zeta])
            } else if k + 1 >= n {
                return Case::Reflect;
            } else {
                let b1 = d[..=k].iter().copied().chain(units(k + 1..n)).chain([Zeta]).collect();
                let b2 = units(0..k).chain([Unit(n)]).chain(d[k + 1..].iter().copied()).chain([Zeta]).collect();
                (b1, b2)
            }
        }
        (Zeta, Diff(k)) => {
            if n == 2 && k == 1 {
                (vec![Unit(0), Unit(2), Zeta], vec![Unit(1), Diff(0), Zeta])
            } else if k + 1 >= n {
                return Case::Reflect;
            } else {
                let b1 = units(1..k + 2).chain(d[k + 1..].iter().copied()).chain([Zeta]).collect();
                let b2 = [Unit(0)].into_iter().chain(units(k + 2..=n)).chain(d[..k].iter().copied()).chain([Zeta]).collect();
                (b1, b2)
            }
        }
        (Diff(i), Zeta) => (with(without(s, &[Unit(i + 1)]), &[v]), with(d.to_vec(), &[Unit(i + 1)])),
        _ => return Case::Uncovered,
    };
    Case::Bases(b1, b2)
}

fn support(r: Role, dim: usize) -> Vec<usize> {
    match r {
        Role::LeftSum(m) => (0..2 * m).collect(),
        Role::RightSum(m) => (dim - 2 * m..dim).collect(),
        Role::Unit(j) => vec![j],
        Role::Zeta => (0..dim).collect(),
        Role::Difference(i) => vec![i, i + 1],
    }
}

fn e2_case(n: usize, s: &[Role], d: &[Role], v: Role, w: Role) -> Case {
    use Role::{LeftSum as Left, RightSum as Right, Unit, Zeta};
    let dim = 2 * n + 1;
    let (b1, b2) = match (v, w) {
        (Unit(_), Unit(_)) => (with(without(s, &[w]), &[Zeta]), with(d.to_vec(), &[v])),
        (Unit(_), Zeta) => (s.to_vec(), with(d.to_vec(), &[v])),
        (Zeta, Unit(_)) => (with(without(s, &[w]), &[Zeta]), with(d.to_vec(), &[Zeta])),
        (Left(_) | Right(_), Left(m)) => {
            let a = 2 * m;
            let supp = support(v, dim);
            let Some(b) = (0..dim).find(|&b| b != 2 * m - 1 && b != a && supp.contains(&a) != supp.contains(&b)) else {
                return Case::Uncovered;
            };
            let ends = [Unit(a), Unit(b)];
            (with(without(s, &ends), &[Zeta, v]), with(without(d, &[w]), &ends))
        }
        (_, Right(_)) | (Right(_), _) => return Case::Reflect,
        (Unit(j), Left(m)) => {
            let l = if j == 2 * m - 1 || j == 2 * m { Unit(0) } else { Unit(2 * m - 1) };
            (with(without(s, &[l]), &[Zeta]), with(without(d, &[w]), &[v, l]))
        }
        (Left(m), Unit(j)) => {
            let hat = if j < 2 * m { Unit(2 * n) } else { Unit(0) };
            (with(without(s, &[w, hat]), &[Zeta, v]), with(d.to_vec(), &[hat]))
        }
        (Left(m), Zeta) => {
            let k = Unit(2 * m - 1);
            (with(without(s, &[k]), &[v]), with(d.to_vec(), &[k]))
        }
        (Zeta, Left(m)) => {
            let k = Unit(2 * m - 1);
            (with(without(s, &[k]), &[Zeta]), with(without(d, &[w]), &[Zeta, k]))
        }
        _ => return Case::Uncovered,
    };
    Case::Bases(b1, b2)
}

fn indices(f: &VectorFamily, roles: &[Role]) -> Vec<usize> {
    let mut out: Vec<usize> = roles.iter().filter_map(|r| f.index_of(*r)).collect();
    out.sort_unstable();
    out
}

fn role_at(f: &VectorFamily, index: usize) -> Result<Role, MatroidError> {
    f.roles().get(index).copied().ok_or(MatroidError::IndexOutOfRange { index, len: f.len() })
}

/// The basis pair for `(v, w)`, given as family indices.
pub fn appendix_basis_pair(f: &VectorFamily, v: usize, w: usize) -> Result<BasisPair, MatroidError> {
    let (rv, rw) = (role_at(f, v)?, role_at(f, w)?);
    if v == w {
        return Err(MatroidError::SameElement);
    }
    let unreachable = || MatroidError::UnreachableCase { v: rv, w: rw };
    let (b1, b2) = match roles_for(f, rv, rw) {
        Case::Bases(b1, b2) => (b1, b2),
        Case::Uncovered => return Err(unreachable()),
        Case::Reflect => match roles_for(f, f.reflect(rv), f.reflect(rw)) {
            Case::Bases(b1, b2) => {
                let back = |b: Roles| b.into_iter().map(|r| f.reflect(r)).collect::<Roles>();
                (back(b1), back(b2))
            }
            _ => return Err(unreachable()),
        },
    };
    let (b1, b2) = (indices(f, &b1), indices(f, &b2));
    if b1.len() != f.dim() || b2.len() != f.dim() {
        return Err(unreachable());
    }
    Ok(BasisPair { b1, b2 })
}

/// Checks an arbitrary pair against `(v, w)`.
pub fn verify_basis_pair(f: &VectorFamily, pair: &BasisPair, v: usize, w: usize) -> Result<PairCheck, MatroidError> {
    let (rv, rw) = (role_at(f, v)?, role_at(f, w)?);
    let set1: BTreeSet<usize> = pair.b1.iter().copied().collect();
    let set2: BTreeSet<usize> = pair.b2.iter().copied().collect();
    let failure = if set1.len() != f.dim() || !is_basis(f, &pair.b1)? {
        Some(PairFailure::FirstNotBasis)
    } else if set2.len() != f.dim() || !is_basis(f, &pair.b2)? {
        Some(PairFailure::SecondNotBasis)
    } else if set1.intersection(&set2).copied().collect::<Vec<_>>() != [v] {
        Some(PairFailure::IntersectionNotV)
    } else if (0..f.len()).filter(|i| !set1.contains(i) && !set2.contains(i)).collect::<Vec<_>>() != [w] {
        Some(PairFailure::ComplementNotW)
    } else {
        None
    };
    Ok(PairCheck { v: rv, w: rw, pair: pair.clone(), failure })
}

/// Builds the pair for `(v, w)` and checks it.
pub fn verify_pair(f: &VectorFamily, v: usize, w: usize) -> Result<PairCheck, MatroidError> {
    let pair = appendix_basis_pair(f, v, w)?;
    verify_basis_pair(f, &pair, v, w)
}
