use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banach::{Exponent, SpaceDescriptor};
use crate::error::{Error, Result};
use crate::gridfn::{BoxDomain, GridFunction, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoveringVerdict {
    Stable,
    Growing,
}

/// One refinement/truncation level of a family.
#[derive(Debug, Clone)]
pub struct ProbeLevel {
    pub members: Vec<GridFunction>,
    /// Space `Y` for the second bound; `None` for a family bounded only in
    /// `L^p(X)`.
    pub y_space: Option<SpaceDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCounts {
    pub level: usize,
    pub n_cells: usize,
    pub truncation: usize,
    pub members: usize,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringProfile {
    pub eps_list: Vec<f64>,
    pub levels: Vec<LevelCounts>,
    pub method: String,
    pub verdict: CoveringVerdict,
}

impl CoveringProfile {
    pub fn counts_at(&self, eps_index: usize) -> Vec<usize> {
        self.levels.iter().map(|l| l.counts[eps_index]).collect()
    }

    /// `N(eps)` at the finest level over `N(eps)` at the coarsest.
    pub fn growth(&self, eps_index: usize) -> f64 {
        let c = self.counts_at(eps_index);
        *c.last().unwrap_or(&0) as f64 / (*c.first().unwrap_or(&1)).max(1) as f64
    }
}

/// Covering radii of the greedy farthest-point net: `radii[k]` is the
/// largest distance to the first `k + 1` centres. Centre 0 is member 0.
pub fn greedy_net_radii(members: &[GridFunction], p: Exponent) -> Result<Vec<f64>> {
    let Some(first) = members.first() else {
        return Ok(Vec::new());
    };
    for m in members {
        first.same_layout(m)?;
    }
    let dist = |a: usize, b: usize| -> f64 {
        let (x, y) = (&members[a], &members[b]);
        let k = x.space().dim();
        let norms = x.values().chunks(k).zip(y.values().chunks(k)).map(|(u, v)| {
            let diff: Vec<f64> = u.iter().zip(v).map(|(s, t)| s - t).collect();
            x.space().norm_unchecked(&diff)
        });
        crate::gridfn::lp_of_norms(norms, x.cell_volume(), p)
    };
    let mut nearest: Vec<f64> = (0..members.len()).into_par_iter().map(|i| dist(0, i)).collect();
    let mut radii = Vec::with_capacity(members.len());
    loop {
        // first index attaining the maximum keeps the order deterministic
        let (far, r) = nearest.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
        radii.push(r.max(0.0));
        if r <= 0.0 || radii.len() == members.len() {
            break;
        }
        let fresh: Vec<f64> = (0..members.len()).into_par_iter().map(|i| dist(far, i)).collect();
        for (n, f) in nearest.iter_mut().zip(fresh) {
            *n = n.min(f);
        }
    }
    Ok(radii)
}

/// Size of the greedy net that covers within `eps`.
pub fn net_count(radii: &[f64], eps: f64) -> usize {
    radii.iter().position(|&r| r <= eps).map_or(radii.len(), |k| k + 1)
}

fn certify(level: usize, f: &GridFunction, p: Exponent, y: Option<&SpaceDescriptor>, bound: f64) -> Result<()> {
    let slack = bound * (1.0 + 1e-9);
    let lp = f.bochner_norm(p);
    if lp > slack {
        return Err(Error::Certification(format!(
            "member at level {level} has L^p(X) norm {lp} above {bound}"
        )));
    }
    if let Some(y) = y {
        let w = f.sobolev_norm(p)?;
        let ly = f.with_values(y.clone(), f.values().to_vec())?.bochner_norm(p);
        if w > slack || ly > slack {
            return Err(Error::Certification(format!(
                "member at level {level} has W^{{1,p}}(X) norm {w} and L^p(Y) norm {ly}; bound {bound}"
            )));
        }
    }
    Ok(())
}

/// Greedy covering counts `N(eps)` of a family in `L^p(Omega, X)` along a
/// refinement/truncation path. Every member is certified against `bound`
/// in `L^p(X)` and, when the level names a `Y`, in `W^{1,p}(X)` and
/// `L^p(Y)`. The verdict is `STABLE` when no level needs more than twice
/// the centres of the coarsest level, for every `eps`.
pub fn aubin_lions_probe(levels: &[ProbeLevel], p: Exponent, eps_list: &[f64], bound: f64) -> Result<CoveringProfile> {
    if levels.is_empty() || eps_list.is_empty() {
        return Err(Error::InvalidArgument("need at least one level and one eps".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let mut out = Vec::with_capacity(levels.len());
    for (level, l) in levels.iter().enumerate() {
        if l.members.is_empty() {
            return Err(Error::InvalidArgument(format!("level {level} has no members")));
        }
        if let Some(y) = &l.y_space {
            if y.dim() != l.members[0].space().dim() {
                return Err(Error::DimensionMismatch {
                    expected: l.members[0].space().dim(),
                    got: y.dim(),
                });
            }
        }
        l.members
            .par_iter()
            .try_for_each(|f| certify(level, f, p, l.y_space.as_ref(), bound))?;
        let radii = greedy_net_radii(&l.members, p)?;
        out.push(LevelCounts {
            level,
            n_cells: l.members[0].grid().cells()[0],
            truncation: l.members[0].space().dim(),
            members: l.members.len(),
            counts: eps_list.iter().map(|&e| net_count(&radii, e)).collect(),
        });
    }
    let stable = (0..eps_list.len()).all(|e| {
        let base = out[0].counts[e];
        out.iter().all(|l| l.counts[e] <= 2 * base)
    });
    Ok(CoveringProfile {
        eps_list: eps_list.to_vec(),
        levels: out,
        method: "greedy farthest-point net, first member as seed, ties to lowest index".into(),
        verdict: if stable {
            CoveringVerdict::Stable
        } else {
            CoveringVerdict::Growing
        },
    })
}

/// Weights `4^{s}` of the compactly embedded space at truncation `m`.
pub fn compact_weights(m: usize) -> Vec<f64> {
    (0..m).map(|s| 4f64.powi(s as i32)).collect()
}

/// Cells and truncation of level `l`: `8 * 2^l` cells, `4 + 4 l` coordinates.
pub fn compact_schedule(level: usize) -> (usize, usize) {
    (8 << level, 4 + 4 * level)
}

struct Member {
    z: Vec<f64>,
    shift: f64,
}

fn members(count: usize, max_dim: usize, seed: u64) -> Vec<Member> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let z: Vec<f64> = (0..max_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = z.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
            Member {
                z: z.iter().map(|v| v / n).collect(),
                shift: rng.random_range(0.0..1.0),
            }
        })
        .collect()
}

/// Family bounded in `W^{1,2}((0,1), X) cap L^2((0,1), Y)` with
/// `X = l^2(m)` and `|x|_Y^2 = sum 4^s x_s^2`: members are
/// `a (1 + 0.25 sin(2 pi (t - c)))` with `a_s = 0.3 2^{-s} z_s` and `z` in
/// the unit ball. With `oscillating = false` the members are the constants
/// `a`. Members are identical across levels up to truncation.
pub fn compact_family(count: usize, levels: usize, seed: u64, oscillating: bool) -> Result<Vec<ProbeLevel>> {
    let max_dim = compact_schedule(levels.saturating_sub(1)).1;
    let pool = members(count, max_dim, seed);
    (0..levels)
        .map(|l| {
            let (n, m) = compact_schedule(l);
            let x = SpaceDescriptor::hilbert(m)?;
            let grid = GridSpec::uniform(1, n)?;
            let fam = pool
                .iter()
                .map(|mem| {
                    let a: Vec<f64> = (0..m).map(|s| 0.3 * 0.5f64.powi(s as i32) * mem.z[s]).collect();
                    let c = mem.shift;
                    GridFunction::sample(BoxDomain::unit(1), grid.clone(), x.clone(), |t| {
                        let phi = if oscillating {
                            1.0 + 0.25 * (2.0 * std::f64::consts::PI * (t[0] - c)).sin()
                        } else {
                            1.0
                        };
                        a.iter().map(|v| v * phi).collect()
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ProbeLevel {
                members: fam,
                y_space: Some(SpaceDescriptor::grid_lr_weighted(compact_weights(m), 2.0)?),
            })
        })
        .collect()
}

/// Control family bounded only in `L^p(X)`: the normalised cell
/// indicators `|cell|^{-1/p} 1_cell x0` of each level, pairwise
/// `2^{1/p}` apart.
pub fn indicator_control_family(levels: usize, p: f64) -> Result<Vec<ProbeLevel>> {
    (0..levels)
        .map(|l| {
            let (n, _) = compact_schedule(l);
            let x = SpaceDescriptor::hilbert(2)?;
            let height = (n as f64).powf(1.0 / p);
            let fam = (0..n)
                .map(|cell| {
                    let mut values = vec![0.0; 2 * n];
                    values[2 * cell] = 0.6 * height;
                    values[2 * cell + 1] = 0.8 * height;
                    GridFunction::new(BoxDomain::unit(1), GridSpec::uniform(1, n)?, x.clone(), values)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ProbeLevel {
                members: fam,
                y_space: None,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: Exponent = Exponent::Finite(2.0);
    const EPS: [f64; 3] = [0.05, 0.1, 0.2];

    fn brute_force_radii(members: &[GridFunction]) -> Vec<f64> {
        let n = members.len();
        let d = |a: usize, b: usize| members[a].sub(&members[b]).unwrap().bochner_norm(P);
        let mut centres = vec![0];
        let mut radii = Vec::new();
        loop {
            let (far, r) = (0..n)
                .map(|i| (i, centres.iter().map(|&c| d(c, i)).fold(f64::INFINITY, f64::min)))
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            radii.push(r);
            if r <= 0.0 || radii.len() == n {
                return radii;
            }
            centres.push(far);
        }
    }

    #[test]
    fn greedy_radii_match_brute_force() {
        let fam = compact_family(40, 2, 5, true).unwrap();
        for l in &fam {
            let fast = greedy_net_radii(&l.members, P).unwrap();
            let slow = brute_force_radii(&l.members);
            assert_eq!(fast.len(), slow.len());
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b), "{a} vs {b}");
            }
            assert!(fast.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }
    }

    #[test]
    fn compact_family_is_stable() {
        let fam = compact_family(400, 4, 11, true).unwrap();
        let prof = aubin_lions_probe(&fam, P, &EPS, 1.0).unwrap();
        assert_eq!(prof.verdict, CoveringVerdict::Stable, "{prof:?}");
        for l in &prof.levels {
            assert!(l.counts.windows(2).all(|w| w[1] <= w[0]));
        }
        assert_eq!(prof.levels[3].n_cells, 64);
        assert_eq!(prof.levels[3].truncation, 16);
    }

    #[test]
    fn constant_ball_is_stable() {
        let fam = compact_family(300, 4, 2, false).unwrap();
        let prof = aubin_lions_probe(&fam, P, &EPS, 1.0).unwrap();
        assert_eq!(prof.verdict, CoveringVerdict::Stable);
    }

    #[test]
    fn control_family_grows() {
        let fam = indicator_control_family(4, 2.0).unwrap();
        let prof = aubin_lions_probe(&fam, P, &EPS, 1.0).unwrap();
        assert_eq!(prof.verdict, CoveringVerdict::Growing);
        assert_eq!(prof.counts_at(1), vec![8, 16, 32, 64]);
        assert!(prof.growth(1) >= 4.0);
    }

    #[test]
    fn singleton_and_certification() {
        let mut fam = compact_family(1, 2, 0, true).unwrap();
        let prof = aubin_lions_probe(&fam, P, &EPS, 1.0).unwrap();
        assert!(prof.levels.iter().all(|l| l.counts == vec![1, 1, 1]));
        fam[1].members[0] = fam[1].members[0].scale(100.0);
        assert!(matches!(
            aubin_lions_probe(&fam, P, &EPS, 1.0),
            Err(Error::Certification(_))
        ));
        // indicators are bounded in L^p(X) but not in W^{1,p}(X)
        let mut ctl = indicator_control_family(2, 2.0).unwrap();
        ctl[0].y_space = Some(SpaceDescriptor::hilbert(2).unwrap());
        assert!(matches!(
            aubin_lions_probe(&ctl, P, &EPS, 1.0),
            Err(Error::Certification(_))
        ));
    }
}
