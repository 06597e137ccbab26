use serde::{Deserialize, Serialize};

use crate::banach::{self, Exponent};
use crate::calculus::{holder_beta, HolderOptions, HolderReport};
use crate::corpus::ScalarProbe;
use crate::error::{Error, Result};
use crate::gridfn::GridFunction;

/// Whether `W^{1,p} -> L^r` holds on a bounded box in dimension `d`.
pub fn embedding_admissible(d: usize, p: Exponent, r: Exponent) -> bool {
    let df = d as f64;
    match (p, r) {
        (_, Exponent::Infinity) => matches!(p, Exponent::Finite(q) if q > df) || p.is_infinite(),
        (Exponent::Infinity, _) => true,
        (Exponent::Finite(p), Exponent::Finite(r)) => {
            if p < df {
                r <= df * p / (df - p)
            } else {
                true
            }
        }
    }
}

fn embedding_quotient(u: &GridFunction, p: Exponent, r: Exponent) -> Result<f64> {
    let w = u.sobolev_norm(p)?;
    Ok(if w == 0.0 { 0.0 } else { u.bochner_norm(r) / w })
}

/// Grids scalar probes on the grid of `u`.
pub(crate) fn grid_probes(u: &GridFunction, probes: &[ScalarProbe]) -> Result<Vec<GridFunction>> {
    probes
        .iter()
        .map(|g| GridFunction::sample_scalar(u.domain().clone(), u.grid().clone(), |x| g.eval(x)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub p: Exponent,
    pub r: Exponent,
    pub lr_norm: f64,
    pub w_norm: f64,
    /// `|u|_{L^r} / |u|_{W^{1,p}}`.
    pub vector_quotient: f64,
    /// Worst scalar quotient over the probes and `|u(.)|_X`.
    pub scalar_constant: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// `|u|_{L^r(X)} <= C |u|_{W^{1,p}(X)}` with `C` the empirical scalar constant.
pub fn embedding_check(u: &GridFunction, p: Exponent, r: Exponent, probes: &[ScalarProbe]) -> Result<EmbeddingReport> {
    if !embedding_admissible(u.d(), p, r) {
        return Err(Error::InvalidArgument(format!(
            "W^{{1,{p}}} does not embed into L^{r} in dimension {}",
            u.d()
        )));
    }
    let mut scalar_constant = embedding_quotient(&u.pointwise_norms(), p, r)?;
    for g in grid_probes(u, probes)? {
        scalar_constant = scalar_constant.max(embedding_quotient(&g, p, r)?);
    }
    let w_norm = u.sobolev_norm(p)?;
    let lr_norm = u.bochner_norm(r);
    let vector_quotient = if w_norm == 0.0 { 0.0 } else { lr_norm / w_norm };
    let ratio = if scalar_constant == 0.0 {
        1.0
    } else {
        vector_quotient / scalar_constant
    };
    Ok(EmbeddingReport {
        p,
        r,
        lr_norm,
        w_norm,
        vector_quotient,
        scalar_constant,
        ratio,
        pass: lr_norm <= scalar_constant * w_norm * (1.0 + 1e-9) && ratio <= 1.0 + 1e-6,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantTransferReport {
    pub p: Exponent,
    pub r: Exponent,
    /// Worst quotient over the vector corpus and every `g x0`.
    pub vector_constant: f64,
    /// Worst quotient over the scalar probes and every `|u(.)|_X`.
    pub scalar_constant: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Worst-case embedding constants of a vector corpus against its scalar
/// counterpart. The vector side also contains `g x0` for every scalar
/// function `g` of the scalar side, so the two constants agree.
pub fn embedding_constant_transfer(
    vectors: &[GridFunction],
    x0: &[f64],
    probes: &[ScalarProbe],
    p: Exponent,
    r: Exponent,
) -> Result<ConstantTransferReport> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidArgument("vector corpus must be non-empty".into()))?;
    first.space().check(x0)?;
    if !embedding_admissible(first.d(), p, r) {
        return Err(Error::InvalidArgument(format!("W^{{1,{p}}} does not embed into L^{r}")));
    }
    let mut scalars: Vec<GridFunction> = vectors.iter().map(|u| u.pointwise_norms()).collect();
    for u in vectors {
        scalars.extend(grid_probes(u, probes)?);
    }
    let mut scalar_constant = 0.0_f64;
    let mut vector_constant = 0.0_f64;
    for g in &scalars {
        scalar_constant = scalar_constant.max(embedding_quotient(g, p, r)?);
        let lifted = g.map(first.space().clone(), |v| x0.iter().map(|c| v[0] * c).collect())?;
        vector_constant = vector_constant.max(embedding_quotient(&lifted, p, r)?);
    }
    for u in vectors {
        vector_constant = vector_constant.max(embedding_quotient(u, p, r)?);
    }
    let ratio = if scalar_constant == 0.0 {
        1.0
    } else {
        vector_constant / scalar_constant
    };
    Ok(ConstantTransferReport {
        p,
        r,
        vector_constant,
        scalar_constant,
        ratio,
        pass: (ratio - 1.0).abs() <= 1e-6,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyReport {
    pub p: Exponent,
    pub alpha: f64,
    pub holder: HolderReport,
    pub w_norm: f64,
    /// Constant used in the bound: supplied, or measured on scalar probes.
    pub constant: f64,
    pub constant_measured: bool,
    pub pass: bool,
}

/// `beta_alpha(u) <= C |u|_{W^{1,p}}` with `alpha = 1 - d/p`.
///
/// Without an explicit `constant`, `C` is the worst scalar Holder quotient
/// over the probes, `|u(.)|_X` and `<u, x'>` for a norming functional `x'`
/// of `u(xi) - u(eta)` at the maximising pair.
pub fn morrey_check(
    u: &GridFunction,
    p: Exponent,
    constant: Option<f64>,
    probes: &[ScalarProbe],
    opts: HolderOptions,
) -> Result<MorreyReport> {
    let d = u.d() as f64;
    let alpha = match p {
        Exponent::Infinity => 1.0,
        Exponent::Finite(q) if q > d => 1.0 - d / q,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "Morrey's inequality needs p > d, got p = {p} and d = {}",
                u.d()
            )))
        }
    };
    let holder = holder_beta(u, alpha, opts)?;
    let w_norm = u.sobolev_norm(p)?;
    let (constant, constant_measured) = match constant {
        Some(c) => (c, false),
        None => {
            let quotient = |g: &GridFunction| -> Result<f64> {
                let w = g.sobolev_norm(p)?;
                Ok(if w == 0.0 {
                    0.0
                } else {
                    holder_beta(g, alpha, opts)?.beta / w
                })
            };
            let mut c = quotient(&u.pointwise_norms())?;
            if let Some((a, b)) = holder.argmax {
                let diff: Vec<f64> = u.value(a).iter().zip(u.value(b)).map(|(x, y)| x - y).collect();
                if let Some(f) = banach::norming_functional(u.space(), &diff)? {
                    c = c.max(quotient(&u.apply_functional(&f)?)?);
                }
            }
            for g in grid_probes(u, probes)? {
                c = c.max(quotient(&g)?);
            }
            (c, true)
        }
    };
    Ok(MorreyReport {
        p,
        alpha,
        pass: holder.beta <= constant * w_norm * (1.0 + 1e-9),
        holder,
        w_norm,
        constant,
        constant_measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::SpaceDescriptor;
    use crate::corpus::scalar_probes;
    use crate::gridfn::{BoxDomain, GridSpec};

    #[test]
    fn admissible_pairs() {
        let f = Exponent::Finite;
        assert!(embedding_admissible(2, f(1.0), f(2.0)));
        assert!(!embedding_admissible(3, f(2.0), f(6.5)));
        assert!(embedding_admissible(3, f(2.0), f(6.0)));
        assert!(embedding_admissible(2, f(2.0), f(1e6)));
        assert!(!embedding_admissible(2, f(2.0), Exponent::Infinity));
        assert!(embedding_admissible(1, f(2.0), Exponent::Infinity));
    }

    #[test]
    fn constant_function_has_unit_ratio() {
        let sp = SpaceDescriptor::grid_lr(3, 1.5).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(2), GridSpec::uniform(2, 16).unwrap(), sp, |_| {
            vec![1.0, -2.0, 0.5]
        })
        .unwrap();
        let r = embedding_check(&u, Exponent::Finite(2.0), Exponent::Finite(4.0), &[]).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12 && r.pass);
        assert!((r.lr_norm - r.w_norm).abs() < 1e-12);
        assert!(embedding_check(&u, Exponent::Finite(2.0), Exponent::Infinity, &[]).is_err());
    }

    #[test]
    fn vector_never_beats_scalar() {
        let dom = BoxDomain::unit(1);
        let probes = scalar_probes(&dom, 10, 1);
        for seed in 0..20 {
            let s = crate::corpus::smooth_vector("v", &dom, &SpaceDescriptor::sampled_sup(3).unwrap(), seed);
            let u = s.grid(64).unwrap();
            let r = embedding_check(&u, Exponent::Finite(1.5), Exponent::Finite(7.0), &probes).unwrap();
            assert!(r.ratio <= 1.0 + 1e-6, "{}", r.ratio);
        }
    }

    #[test]
    fn transfer_is_exact_for_lifted_scalars() {
        let dom = BoxDomain::unit(2);
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let probes = scalar_probes(&dom, 6, 3);
        let vectors: Vec<GridFunction> = (0..4)
            .map(|s| crate::corpus::smooth_vector("v", &dom, &sp, 10 + s).grid(24).unwrap())
            .collect();
        let r = embedding_constant_transfer(
            &vectors,
            &[0.6, 0.8],
            &probes,
            Exponent::Finite(1.0),
            Exponent::Finite(2.0),
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn morrey_with_unit_constant() {
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let u = GridFunction::sample(
            BoxDomain::unit(1),
            GridSpec::uniform(1, 256).unwrap(),
            sp.clone(),
            |t| vec![t[0].cos(), t[0].sin()],
        )
        .unwrap();
        let r = morrey_check(&u, Exponent::Finite(2.0), Some(1.0), &[], HolderOptions::default()).unwrap();
        assert!(r.pass && (r.alpha - 0.5).abs() < 1e-15);
        let c = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, 32).unwrap(), sp, |_| {
            vec![1.0, 1.0]
        })
        .unwrap();
        assert_eq!(
            morrey_check(&c, Exponent::Finite(2.0), Some(1.0), &[], HolderOptions::default())
                .unwrap()
                .holder
                .beta,
            0.0
        );
        assert!(morrey_check(&c, Exponent::Finite(1.0), None, &[], HolderOptions::default()).is_err());
    }

    #[test]
    fn measured_morrey_constant() {
        let dom = BoxDomain::unit(1);
        let probes = scalar_probes(&dom, 5, 2);
        let u = crate::corpus::smooth_vector("v", &dom, &SpaceDescriptor::finite_lr(3, 1.0).unwrap(), 4)
            .grid(128)
            .unwrap();
        let r = morrey_check(&u, Exponent::Finite(3.0), None, &probes, HolderOptions::default()).unwrap();
        assert!(r.constant_measured && r.pass);
    }
}
