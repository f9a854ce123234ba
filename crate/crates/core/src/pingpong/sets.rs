use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::random::random_unit_vector;
use crate::linalg::{inner, unit_line_distance, vnorm, CVector, Field, Subspace, C64};

/// Rejection sampler gives up after this many proposals per requested point.
const MAX_PROPOSALS_PER_POINT: usize = 10_000;

/// Subsets of projective space built from metric balls and complements of
/// hyperplane neighbourhoods.
///
/// Radii are in the angle metric `d = sin(angle)`; balls are closed and the
/// neighbourhood removed by `HyperplaneComplement` is open.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProjectiveSet {
    Ball {
        #[serde(with = "vec_doc")]
        center: CVector,
        radius: f64,
    },
    HyperplaneComplement {
        #[serde(with = "vec_doc")]
        normal: CVector,
        radius: f64,
    },
    Union { members: Vec<ProjectiveSet> },
}

/// Fubini-Study angle of a distance in `[0, 1]`.
#[inline]
pub(crate) fn ang(d: f64) -> f64 {
    d.clamp(0.0, 1.0).asin()
}

fn unit(v: CVector, what: &str) -> Result<CVector> {
    let n = vnorm(&v);
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Invalid(format!("{what}: vector must be nonzero and finite")));
    }
    Ok(v / C64::new(n, 0.0))
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0 && r <= 1.0) {
        return Err(Error::Invalid(format!("radius must lie in (0, 1], got {r}")));
    }
    Ok(())
}

impl ProjectiveSet {
    pub fn ball(center: CVector, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self::Ball { center: unit(center, "ball center")?, radius })
    }

    pub fn ball_around(line: &Subspace, radius: f64) -> Result<Self> {
        if line.dim() != 1 {
            return Err(Error::DimensionMismatch(format!("ball center must be a line, got dim {}", line.dim())));
        }
        Self::ball(line.unit_vector(), radius)
    }

    /// `P(K^d)` minus the open `radius`-neighbourhood of `P(normal^perp)`.
    pub fn hyperplane_complement(normal: CVector, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self::HyperplaneComplement { normal: unit(normal, "hyperplane normal")?, radius })
    }

    pub fn union(members: Vec<ProjectiveSet>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Invalid("union needs at least one member".into()));
        }
        let s = Self::Union { members };
        s.ambient_dim()?;
        Ok(s)
    }

    /// Renormalizes vectors and checks radii and dimensions (for deserialized input).
    pub fn normalized(&self) -> Result<Self> {
        match self {
            Self::Ball { center, radius } => Self::ball(center.clone(), *radius),
            Self::HyperplaneComplement { normal, radius } => Self::hyperplane_complement(normal.clone(), *radius),
            Self::Union { members } => Self::union(members.iter().map(|m| m.normalized()).collect::<Result<_>>()?),
        }
    }

    pub fn ambient_dim(&self) -> Result<usize> {
        match self {
            Self::Ball { center, .. } => Ok(center.len()),
            Self::HyperplaneComplement { normal, .. } => Ok(normal.len()),
            Self::Union { members } => {
                let d = members.first().ok_or_else(|| Error::Invalid("empty union".into()))?.ambient_dim()?;
                for m in &members[1..] {
                    let e = m.ambient_dim()?;
                    if e != d {
                        return Err(Error::DimensionMismatch(format!("union members live in K^{d} and K^{e}")));
                    }
                }
                Ok(d)
            }
        }
    }

    /// Signed membership slack of the unit vector `x`: nonnegative iff `[x]` is a member.
    pub fn slack(&self, x: &CVector) -> f64 {
        match self {
            Self::Ball { center, radius } => radius - unit_line_distance(center, x),
            Self::HyperplaneComplement { normal, radius } => inner(normal, x).norm().min(1.0) - radius,
            Self::Union { members } => members.iter().map(|m| m.slack(x)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Membership of the line through `x` (any nonzero representative).
    pub fn contains(&self, x: &CVector) -> bool {
        let n = vnorm(x);
        n > 0.0 && self.slack(&(x / C64::new(n, 0.0))) >= 0.0
    }

    pub fn primitives(&self) -> Vec<&ProjectiveSet> {
        match self {
            Self::Union { members } => members.iter().flat_map(|m| m.primitives()).collect(),
            p => vec![p],
        }
    }

    /// `count` members drawn with `rng`; every returned vector is unit and passes [`contains`](Self::contains).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, field: Field, count: usize) -> Result<Vec<CVector>> {
        let prims = self.primitives();
        let d = self.ambient_dim()?;
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            let p = prims[k % prims.len()];
            let mut tries = 0;
            loop {
                let x = p.propose(rng, field, d);
                if self.slack(&x) >= 0.0 {
                    out.push(x);
                    break;
                }
                tries += 1;
                if tries >= MAX_PROPOSALS_PER_POINT {
                    return Err(Error::Degenerate("rejection sampler could not find members of the set".into()));
                }
            }
        }
        Ok(out)
    }

    /// Seeded, prefix-stable sample: the first `m` points do not depend on `count >= m`.
    pub fn sample_seeded(&self, seed: u64, label: &str, field: Field, count: usize) -> Result<Vec<CVector>> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, label));
        self.sample(&mut rng, field, count)
    }

    fn propose<R: Rng + ?Sized>(&self, rng: &mut R, field: Field, d: usize) -> CVector {
        match self {
            Self::Ball { center, radius } => {
                let c = if field == Field::Real { real_part(center) } else { center.clone() };
                let mut u = random_unit_vector(rng, d, field);
                u -= &c * inner(&c, &u);
                let n = vnorm(&u);
                if d == 1 || n < 1e-12 {
                    return c;
                }
                u /= C64::new(n, 0.0);
                let k = if field == Field::Real { d - 1 } else { 2 * (d - 1) };
                let phi = ang(*radius) * rng.random::<f64>().powf(1.0 / k as f64);
                c * C64::new(phi.cos(), 0.0) + u * C64::new(phi.sin(), 0.0)
            }
            _ => random_unit_vector(rng, d, field),
        }
    }
}

fn real_part(v: &CVector) -> CVector {
    let r = v.map(|z| C64::new(z.re, 0.0));
    let n = vnorm(&r);
    if n > 0.0 { r / C64::new(n, 0.0) } else { v.clone() }
}

/// Per-set seed derived from the run seed and the set label.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let h = Sha256::digest(label.as_bytes());
    let mut b = [0u8; 8];
    b.copy_from_slice(&h[..8]);
    seed ^ u64::from_le_bytes(b)
}

/// Lower bound for `dist(x, P(normal^perp))` over the ball `B(c, r)`.
pub(crate) fn ball_dist_lower(center: &CVector, radius: f64, normal: &CVector) -> f64 {
    (ang(inner(normal, center).norm()) - ang(radius)).max(0.0).sin()
}

/// Sufficient condition for `a` being a subset of `b` from primitive geometry.
/// `false` means "not certified", not "not a subset".
pub fn certified_subset(a: &ProjectiveSet, b: &ProjectiveSet) -> bool {
    match a {
        ProjectiveSet::Union { members } => members.iter().all(|m| certified_subset(m, b)),
        ProjectiveSet::Ball { center, radius } => ball_in(center, *radius, b),
        ProjectiveSet::HyperplaneComplement { .. } => match b {
            ProjectiveSet::Union { members } => members.iter().any(|m| certified_subset(a, m)),
            _ => a == b,
        },
    }
}

/// Whether the ball `B(c, r)` sits inside `b` (by angles, exact up to rounding).
pub(crate) fn ball_in(c: &CVector, r: f64, b: &ProjectiveSet) -> bool {
    match b {
        ProjectiveSet::Ball { center, radius } => ang(unit_line_distance(center, c)) + ang(r) <= ang(*radius),
        ProjectiveSet::HyperplaneComplement { normal, radius } => ball_dist_lower(c, r, normal) >= *radius,
        ProjectiveSet::Union { members } => members.iter().any(|m| ball_in(c, r, m)),
    }
}

/// Sufficient condition for disjointness (ball primitives only).
pub fn certified_disjoint(a: &ProjectiveSet, b: &ProjectiveSet) -> bool {
    let pa = a.primitives();
    let pb = b.primitives();
    pa.iter().all(|x| {
        pb.iter().all(|y| match (x, y) {
            (ProjectiveSet::Ball { center: c1, radius: r1 }, ProjectiveSet::Ball { center: c2, radius: r2 }) => {
                ang(unit_line_distance(c1, c2)) > ang(*r1) + ang(*r2)
            }
            (ProjectiveSet::Ball { center, radius }, ProjectiveSet::HyperplaneComplement { normal, radius: t })
            | (ProjectiveSet::HyperplaneComplement { normal, radius: t }, ProjectiveSet::Ball { center, radius }) => {
                (ang(inner(normal, center).norm()) + ang(*radius)) < ang(*t)
            }
            _ => false,
        })
    })
}

mod vec_doc {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Real(f64),
        Complex([f64; 2]),
    }

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        let real = v.iter().all(|z| z.im == 0.0);
        let entries: Vec<Entry> =
            v.iter().map(|z| if real { Entry::Real(z.re) } else { Entry::Complex([z.re, z.im]) }).collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CVector, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        if entries.is_empty() {
            return Err(serde::de::Error::custom("vector must be nonempty"));
        }
        Ok(CVector::from_iterator(
            entries.len(),
            entries.into_iter().map(|e| match e {
                Entry::Real(x) => C64::new(x, 0.0),
                Entry::Complex([a, b]) => C64::new(a, b),
            }),
        ))
    }
}

/// Serde helper for unit-vector witnesses.
pub mod point_doc {
    pub use super::vec_doc::{deserialize, serialize};
}
