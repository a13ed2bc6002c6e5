//! Points of the basis polytope `P(E) = conv{χ_B : B a basis}` with exact
//! convex-combination certificates.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{build_family, exact, is_basis, verify_pair, BasisPair, FamilyKind, MatroidError, PairCheck, VectorFamily};

pub type Rational = Ratio<i64>;

/// Largest `N` accepted by `verify_lemma_geom`.
pub const MAX_LEMMA_ORDER: usize = 16;

/// One vertex `χ_B` of a certificate with its weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub weight: Rational,
    pub basis: Vec<usize>,
}

/// `θ : E → [0, 1]` with an optional certificate `θ = Σ λ_B χ_B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopePoint {
    pub theta: Vec<Rational>,
    pub certificate: Option<Vec<Vertex>>,
}

fn indicator(len: usize, basis: &[usize]) -> Vec<Rational> {
    let mut chi = vec![Rational::zero(); len];
    basis.iter().for_each(|&i| chi[i] = Rational::one());
    chi
}

impl PolytopePoint {
    /// Recomputes the certificate exactly: every vertex is a basis, weights
    /// are nonnegative and sum to 1, and the weighted indicators sum to `θ`.
    pub fn certificate_is_valid(&self, f: &VectorFamily) -> bool {
        let Some(cert) = &self.certificate else {
            return false;
        };
        let in_range = self.theta.len() == f.len()
            && self.theta.iter().all(|t| *t >= Rational::zero() && *t <= Rational::one());
        let weights_ok = cert.iter().all(|v| v.weight >= Rational::zero())
            && cert.iter().map(|v| v.weight).sum::<Rational>() == Rational::one();
        let bases_ok = cert.iter().all(|v| is_basis(f, &v.basis).unwrap_or(false));
        let mut sum = vec![Rational::zero(); f.len()];
        for v in cert {
            for (s, c) in sum.iter_mut().zip(indicator(f.len(), &v.basis)) {
                *s += c * v.weight;
            }
        }
        in_range && weights_ok && bases_ok && sum == self.theta
    }
}

/// `Φ_{v,w} = ½(χ_{B₁} + χ_{B₂})`.
pub fn phi_point(f: &VectorFamily, pair: &BasisPair) -> PolytopePoint {
    let half = Rational::new(1, 2);
    let (c1, c2) = (indicator(f.len(), &pair.b1), indicator(f.len(), &pair.b2));
    let theta = c1.iter().zip(&c2).map(|(a, b)| (a + b) * half).collect();
    let certificate = vec![Vertex { weight: half, basis: pair.b1.clone() }, Vertex { weight: half, basis: pair.b2.clone() }];
    PolytopePoint { theta, certificate: Some(certificate) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaGeomReport {
    pub kind: FamilyKind,
    pub order: usize,
    pub dim: usize,
    pub elements: usize,
    pub pairs: Vec<PairCheck>,
    /// Every `Φ_{v,w}` takes only the values `1, 0, ½` and sums to `dim`.
    pub phi_points_valid: bool,
    /// The uniform average of all `Φ_{v,w}` equals `½` at every element.
    pub average_is_half: bool,
    pub certificate_valid: bool,
    pub vertices: usize,
    pub min_weight: String,
    /// Rank of `{χ_B − χ_{B₀}}` over the certificate's vertices.
    pub span_rank: usize,
    /// Dimension of the directions of `{Σθ = dim}`, i.e. `|E| − 1`.
    pub required_rank: usize,
}

impl LemmaGeomReport {
    pub fn failed_pairs(&self) -> impl Iterator<Item = &PairCheck> {
        self.pairs.iter().filter(|p| !p.passed())
    }

    pub fn passed(&self) -> bool {
        self.failed_pairs().next().is_none()
            && self.phi_points_valid
            && self.average_is_half
            && self.certificate_valid
            && self.span_rank == self.required_rank
    }
}

/// Checks every `Φ_{v,w}`, certifies `θ ≡ ½` as their average and checks
/// that the certificate's vertices span the hyperplane `{Σθ = dim}`.
pub fn verify_lemma_geom(kind: FamilyKind, order: usize) -> Result<LemmaGeomReport, MatroidError> {
    if order > MAX_LEMMA_ORDER {
        return Err(MatroidError::OrderTooLarge { kind, n: order, max: MAX_LEMMA_ORDER });
    }
    let f = build_family(kind, order)?;
    let len = f.len();
    let count = (len * (len - 1)) as i64;
    let dim = Rational::from_integer(f.dim() as i64);
    let (zero, one, half) = (Rational::zero(), Rational::one(), Rational::new(1, 2));

    let mut pairs = Vec::with_capacity(len * (len - 1));
    let mut weights: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    let mut phi_points_valid = true;
    for v in 0..len {
        for w in (0..len).filter(|&w| w != v) {
            let check = verify_pair(&f, v, w)?;
            let phi = phi_point(&f, &check.pair);
            phi_points_valid &= phi.theta.iter().all(|t| *t == zero || *t == one || *t == half)
                && phi.theta[v] == one
                && phi.theta[w] == zero
                && phi.theta.iter().sum::<Rational>() == dim
                && phi.certificate_is_valid(&f);
            for vertex in phi.certificate.into_iter().flatten() {
                *weights.entry(vertex.basis).or_insert(zero) += vertex.weight / count;
            }
            pairs.push(check);
        }
    }

    let cert: Vec<Vertex> = weights.into_iter().map(|(basis, weight)| Vertex { weight, basis }).collect();
    let mut theta = vec![zero; len];
    for v in &cert {
        for &i in &v.basis {
            theta[i] += v.weight;
        }
    }
    let average_is_half = theta.iter().all(|t| *t == half);
    let point = PolytopePoint { theta, certificate: Some(cert) };
    let certificate_valid = point.certificate_is_valid(&f);
    let cert = point.certificate.unwrap_or_default();
    let min_weight = cert.iter().map(|v| v.weight).min().unwrap_or(zero);

    let diffs: Vec<Vec<i64>> = match cert.first() {
        Some(base) => {
            let chi = |b: &[usize]| {
                let mut c = vec![0i64; len];
                b.iter().for_each(|&i| c[i] = 1);
                c
            };
            let c0 = chi(&base.basis);
            cert[1..].iter().map(|v| chi(&v.basis).iter().zip(&c0).map(|(a, b)| a - b).collect()).collect()
        }
        None => Vec::new(),
    };
    Ok(LemmaGeomReport {
        kind,
        order,
        dim: f.dim(),
        elements: len,
        pairs,
        phi_points_valid,
        average_is_half,
        certificate_valid: certificate_valid && min_weight > zero,
        vertices: cert.len(),
        min_weight: min_weight.to_string(),
        span_rank: exact::rank(diffs),
        required_rank: len - 1,
    })
}
