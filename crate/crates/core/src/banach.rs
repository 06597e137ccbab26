//! Concrete finite-dimensional Banach spaces, their norms, one-sided norm
//! derivatives through the duality map, and coordinatewise lattice operations.
//!
//! Elements are plain `&[f64]` slices whose length must equal the space's
//! `dim`. All functions here are pure.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance defining the argmax set of the sup norm.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Scale-aware uniqueness tolerance for one-sided pairings: `1e-9 * (1 + |h|)`.
pub const PAIRING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    /// `R^dim` with the unweighted `l^r` norm.
    FiniteLr,
    /// `C(K)` sampled at `dim` points of `K`, with the max norm.
    SampledSup,
    /// `L^r(S)` for a measure space `S` sampled at `dim` points with quadrature weights.
    GridLr,
    /// Euclidean space; identical to `FiniteLr` with exponent 2.
    Hilbert,
}

/// An exponent in `[1, inf]`. Serializes as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(r: f64) -> Result<Self> {
        if r == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if r.is_finite() && r >= 1.0 {
            Ok(Exponent::Finite(r))
        } else {
            Err(Error::InvalidArgument(format!(
                "exponent must lie in [1, inf], got {r}"
            )))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(r) => s.serialize_f64(*r),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(r) => Exponent::new(r).map_err(de::Error::custom),
            Raw::Str(s) if s == "inf" => Ok(Exponent::Infinity),
            Raw::Str(s) => Err(de::Error::custom(format!(
                "exponent must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Which concrete space `X` is in play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct SpaceDescriptor {
    kind: SpaceKind,
    dim: usize,
    exponent: Exponent,
    weights: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    kind: SpaceKind,
    dim: usize,
    exponent: Exponent,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<RawSpace> for SpaceDescriptor {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        SpaceDescriptor::new(raw.kind, raw.dim, raw.exponent, raw.weights)
    }
}

impl From<SpaceDescriptor> for RawSpace {
    fn from(s: SpaceDescriptor) -> Self {
        RawSpace {
            kind: s.kind,
            dim: s.dim,
            exponent: s.exponent,
            weights: s.weights,
        }
    }
}

/// How a norm is actually evaluated once aliases are resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
enum NormShape {
    Sup,
    One,
    Euclid,
    Power(f64),
}

impl SpaceDescriptor {
    pub fn new(kind: SpaceKind, dim: usize, exponent: Exponent, weights: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("space dimension must be at least 1".into()));
        }
        if let Exponent::Finite(r) = exponent {
            Exponent::new(r)?;
        }
        match kind {
            SpaceKind::Hilbert if exponent != Exponent::Finite(2.0) => {
                return Err(Error::InvalidArgument("Hilbert space fixes exponent 2".into()));
            }
            SpaceKind::SampledSup if !exponent.is_infinite() => {
                return Err(Error::InvalidArgument("SampledSup requires exponent inf".into()));
            }
            _ => {}
        }
        if let Some(w) = &weights {
            if kind != SpaceKind::GridLr {
                return Err(Error::InvalidArgument("weights are only allowed for GridLr".into()));
            }
            if w.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: w.len(),
                });
            }
            if w.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
                return Err(Error::InvalidArgument("weights must be positive and finite".into()));
            }
        }
        Ok(SpaceDescriptor {
            kind,
            dim,
            exponent,
            weights,
        })
    }

    pub fn finite_lr(dim: usize, r: f64) -> Result<Self> {
        Self::new(SpaceKind::FiniteLr, dim, Exponent::new(r)?, None)
    }

    pub fn sampled_sup(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::SampledSup, dim, Exponent::Infinity, None)
    }

    /// `L^r(0,1)` sampled at `dim` cell centres with uniform weights `1/dim`.
    pub fn grid_lr(dim: usize, r: f64) -> Result<Self> {
        Self::new(SpaceKind::GridLr, dim, Exponent::new(r)?, None)
    }

    pub fn grid_lr_weighted(weights: Vec<f64>, r: f64) -> Result<Self> {
        Self::new(SpaceKind::GridLr, weights.len(), Exponent::new(r)?, Some(weights))
    }

    pub fn hilbert(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Hilbert, dim, Exponent::Finite(2.0), None)
    }

    /// The real line, used for pointwise norms and scalar probes.
    pub fn scalar() -> Self {
        SpaceDescriptor {
            kind: SpaceKind::FiniteLr,
            dim: 1,
            exponent: Exponent::Finite(1.0),
            weights: None,
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn is_scalar(&self) -> bool {
        self.dim == 1
    }

    /// Quadrature weight of coordinate `s`. Uniform `1/dim` for GridLr
    /// without explicit weights, `1` for every other kind.
    #[inline]
    pub fn weight(&self, s: usize) -> f64 {
        match (&self.weights, self.kind) {
            (Some(w), _) => w[s],
            (None, SpaceKind::GridLr) => 1.0 / self.dim as f64,
            _ => 1.0,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.dim).map(|s| self.weight(s)).collect()
    }

    pub fn is_weighted(&self) -> bool {
        self.kind == SpaceKind::GridLr
    }

    pub fn lattice_capable(&self) -> bool {
        matches!(
            self.kind,
            SpaceKind::FiniteLr | SpaceKind::GridLr | SpaceKind::SampledSup
        )
    }

    pub fn order_continuous(&self) -> bool {
        match self.kind {
            SpaceKind::SampledSup => false,
            _ => !self.exponent.is_infinite(),
        }
    }

    fn shape(&self) -> NormShape {
        match self.exponent {
            Exponent::Infinity => NormShape::Sup,
            Exponent::Finite(r) if r == 1.0 => NormShape::One,
            Exponent::Finite(r) if r == 2.0 => NormShape::Euclid,
            Exponent::Finite(r) => NormShape::Power(r),
        }
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn require_lattice(&self) -> Result<()> {
        if self.lattice_capable() {
            Ok(())
        } else {
            Err(Error::Capability(format!(
                "{:?} is not a Banach lattice here",
                self.kind
            )))
        }
    }

    /// Norm without the conformance check; callers guarantee the length.
    pub(crate) fn norm_unchecked(&self, x: &[f64]) -> f64 {
        match self.shape() {
            NormShape::Sup => x.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            NormShape::One => {
                if self.is_weighted() {
                    x.iter().enumerate().map(|(s, v)| self.weight(s) * v.abs()).sum()
                } else {
                    x.iter().map(|v| v.abs()).sum()
                }
            }
            NormShape::Euclid => {
                let sq: f64 = if self.is_weighted() {
                    x.iter().enumerate().map(|(s, v)| self.weight(s) * v * v).sum()
                } else {
                    x.iter().map(|v| v * v).sum()
                };
                sq.sqrt()
            }
            NormShape::Power(r) => {
                let acc: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(s, v)| self.weight(s) * v.abs().powf(r))
                    .sum();
                acc.powf(1.0 / r)
            }
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}(dim={}, r={})", self.kind, self.dim, self.exponent)
    }
}

/// Right and left derivatives of a functional along a direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub plus: f64,
    pub minus: f64,
    pub unique: bool,
}

impl PairingResult {
    fn new(plus: f64, minus: f64, h_norm: f64) -> Self {
        let unique = (plus - minus).abs() <= PAIRING_TOLERANCE * (1.0 + h_norm);
        PairingResult { plus, minus, unique }
    }
}

pub fn norm(space: &SpaceDescriptor, x: &[f64]) -> Result<f64> {
    space.check(x)?;
    Ok(space.norm_unchecked(x))
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `D_h^+ |x|` and `D_h^- |x|` in closed form, i.e. the max and min of
/// `<h, x'>` over the duality set `J(x)`.
pub fn one_sided_norm_derivative(space: &SpaceDescriptor, x: &[f64], h: &[f64]) -> Result<PairingResult> {
    space.check(x)?;
    space.check(h)?;
    Ok(one_sided_unchecked(space, x, h))
}

pub(crate) fn one_sided_unchecked(space: &SpaceDescriptor, x: &[f64], h: &[f64]) -> PairingResult {
    let h_norm = space.norm_unchecked(h);
    let x_norm = space.norm_unchecked(x);
    if x_norm == 0.0 {
        return PairingResult::new(h_norm, -h_norm, h_norm);
    }
    match space.shape() {
        NormShape::Sup => {
            let cut = x_norm * (1.0 - TIE_TOLERANCE);
            let mut plus = f64::NEG_INFINITY;
            let mut minus = f64::INFINITY;
            for (xk, hk) in x.iter().zip(h) {
                if xk.abs() >= cut {
                    let v = sign(*xk) * hk;
                    plus = plus.max(v);
                    minus = minus.min(v);
                }
            }
            PairingResult::new(plus, minus, h_norm)
        }
        NormShape::One => {
            let mut smooth = 0.0;
            let mut kink = 0.0;
            for (s, (xs, hs)) in x.iter().zip(h).enumerate() {
                let w = space.weight(s);
                if *xs == 0.0 {
                    kink += w * hs.abs();
                } else {
                    smooth += w * sign(*xs) * hs;
                }
            }
            PairingResult::new(smooth + kink, smooth - kink, h_norm)
        }
        NormShape::Euclid => {
            let dot: f64 = x
                .iter()
                .zip(h)
                .enumerate()
                .map(|(s, (xs, hs))| space.weight(s) * xs * hs)
                .sum();
            let v = dot / x_norm;
            PairingResult::new(v, v, h_norm)
        }
        NormShape::Power(r) => {
            let acc: f64 = x
                .iter()
                .zip(h)
                .enumerate()
                .map(|(s, (xs, hs))| space.weight(s) * xs.abs().powf(r - 1.0) * sign(*xs) * hs)
                .sum();
            let v = acc * x_norm.powf(1.0 - r);
            PairingResult::new(v, v, h_norm)
        }
    }
}

/// `<x, f>` for the coordinate pairing of the space (weighted for GridLr).
pub fn dual_pairing(space: &SpaceDescriptor, x: &[f64], functional: &[f64]) -> Result<f64> {
    space.check(x)?;
    space.check(functional)?;
    Ok(pairing_unchecked(space, x, functional))
}

#[inline]
pub(crate) fn pairing_unchecked(space: &SpaceDescriptor, x: &[f64], f: &[f64]) -> f64 {
    if space.is_weighted() {
        x.iter()
            .zip(f)
            .enumerate()
            .map(|(s, (a, b))| space.weight(s) * a * b)
            .sum()
    } else {
        x.iter().zip(f).map(|(a, b)| a * b).sum()
    }
}

/// Norm of a functional in the dual space, with respect to `dual_pairing`.
pub fn dual_norm(space: &SpaceDescriptor, functional: &[f64]) -> Result<f64> {
    space.check(functional)?;
    let f = functional;
    let w = |s: usize| space.weight(s);
    Ok(match space.shape() {
        // dual of (weighted) sup is (weighted) l^1
        NormShape::Sup => f.iter().enumerate().map(|(s, v)| w(s) * v.abs()).sum(),
        NormShape::One => f.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        NormShape::Euclid => space.norm_unchecked(f),
        NormShape::Power(r) => {
            let q = r / (r - 1.0);
            let acc: f64 = f.iter().enumerate().map(|(s, v)| w(s) * v.abs().powf(q)).sum();
            acc.powf(1.0 / q)
        }
    })
}

/// An element of the duality set `J(x)`: dual norm one and `<x, x'> = |x|`.
/// Returns `None` at `x = 0`, where `J(0)` is the whole dual unit ball.
pub fn norming_functional(space: &SpaceDescriptor, x: &[f64]) -> Result<Option<Vec<f64>>> {
    space.check(x)?;
    let n = space.norm_unchecked(x);
    if n == 0.0 {
        return Ok(None);
    }
    let f = match space.shape() {
        NormShape::Sup => {
            let k = x
                .iter()
                .enumerate()
                .fold(
                    (0, 0.0_f64),
                    |best, (k, v)| if v.abs() > best.1 { (k, v.abs()) } else { best },
                )
                .0;
            let mut f = vec![0.0; x.len()];
            f[k] = sign(x[k]) / space.weight(k);
            f
        }
        NormShape::One => x.iter().map(|v| sign(*v)).collect(),
        NormShape::Euclid => x.iter().map(|v| v / n).collect(),
        NormShape::Power(r) => x.iter().map(|v| sign(*v) * (v.abs() / n).powf(r - 1.0)).collect(),
    };
    Ok(Some(f))
}

pub fn lattice_abs(space: &SpaceDescriptor, v: &[f64]) -> Result<Vec<f64>> {
    space.require_lattice()?;
    space.check(v)?;
    Ok(v.iter().map(|x| x.abs()).collect())
}

pub fn lattice_pos(space: &SpaceDescriptor, v: &[f64]) -> Result<Vec<f64>> {
    space.require_lattice()?;
    space.check(v)?;
    Ok(v.iter().map(|x| x.max(0.0)).collect())
}

/// `(sign v)(w) = P_{v+} w - P_{v-} w`, coordinatewise `(v/|v|) w` off the zero set.
pub fn sign_apply(space: &SpaceDescriptor, v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    space.require_lattice()?;
    space.check(v)?;
    space.check(w)?;
    Ok(v.iter()
        .zip(w)
        .map(|(a, b)| {
            if *a > 0.0 {
                *b
            } else if *a < 0.0 {
                -*b
            } else {
                0.0
            }
        })
        .collect())
}

/// Projection of `w` onto the band disjoint from `|v|`: keep `w` where `v = 0`.
pub fn band_projection_disjoint(space: &SpaceDescriptor, v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    space.require_lattice()?;
    space.check(v)?;
    space.check(w)?;
    Ok(v.iter().zip(w).map(|(a, b)| if *a == 0.0 { *b } else { 0.0 }).collect())
}

/// One-sided Gateaux derivatives of `v -> |v|` along `w`:
/// `(sign v) w +- P_{|v|^d} |w|`.
pub fn abs_one_sided(space: &SpaceDescriptor, v: &[f64], w: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let signed = sign_apply(space, v, w)?;
    let band = band_projection_disjoint(space, v, &lattice_abs(space, w)?)?;
    let plus = signed.iter().zip(&band).map(|(a, b)| a + b).collect();
    let minus = signed.iter().zip(&band).map(|(a, b)| a - b).collect();
    Ok((plus, minus))
}
