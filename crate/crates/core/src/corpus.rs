//! Sample functions shared by the verification suite and the tests.
//!
//! A [`Sample`] is a pointwise rule on a box, so the same function can be
//! gridded at every level of a refinement ladder. Kinks and zero crossings
//! are placed on dyadic cell faces, which keeps them off the nodes of every
//! grid with a power-of-two cell count.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::banach::SpaceDescriptor;
use crate::error::Result;
use crate::gridfn::{BoxDomain, GridFunction, GridSpec};

pub type Rule = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct Sample {
    pub name: String,
    pub domain: BoxDomain,
    pub space: SpaceDescriptor,
    pub rule: Rule,
}

impl fmt::Debug for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sample")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("space", &self.space)
            .finish()
    }
}

impl Sample {
    pub fn new<F>(name: impl Into<String>, domain: BoxDomain, space: SpaceDescriptor, rule: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Sample {
            name: name.into(),
            domain,
            space,
            rule: Arc::new(rule),
        }
    }

    pub fn d(&self) -> usize {
        self.domain.dim()
    }

    /// Samples the rule on `n` cells per axis.
    pub fn grid(&self, n: usize) -> Result<GridFunction> {
        let rule = self.rule.clone();
        GridFunction::sample(
            self.domain.clone(),
            GridSpec::uniform(self.d(), n)?,
            self.space.clone(),
            move |x| rule(x),
        )
    }
}

/// A random smooth scalar function
/// `c0 + sum_m a_m prod_j cos(pi k_mj y_j + phi_mj)` in normalised coordinates `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProbe {
    lo: Vec<f64>,
    width: Vec<f64>,
    c0: f64,
    modes: Vec<(f64, Vec<f64>, Vec<f64>)>,
}

impl ScalarProbe {
    pub fn random(domain: &BoxDomain, rng: &mut ChaCha8Rng) -> Self {
        let d = domain.dim();
        let modes = (0..3)
            .map(|_| {
                let a = rng.random_range(-1.0..1.0);
                let k = (0..d).map(|_| rng.random_range(0..4) as f64).collect();
                let phi = (0..d).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
                (a, k, phi)
            })
            .collect();
        ScalarProbe {
            lo: domain.lo().to_vec(),
            width: (0..d).map(|j| domain.width(j)).collect(),
            c0: rng.random_range(-1.0..1.0),
            modes,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.c0;
        for (a, k, phi) in &self.modes {
            let mut p = *a;
            for j in 0..x.len() {
                let y = (x[j] - self.lo[j]) / self.width[j];
                p *= (std::f64::consts::PI * k[j] * y + phi[j]).cos();
            }
            v += p;
        }
        v
    }
}

/// `count` seeded smooth scalar probes on `domain`.
pub fn scalar_probes(domain: &BoxDomain, count: usize, seed: u64) -> Vec<ScalarProbe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| ScalarProbe::random(domain, &mut rng)).collect()
}

/// Smooth vector sample whose coordinates are independent probes.
pub fn smooth_vector(name: &str, domain: &BoxDomain, space: &SpaceDescriptor, seed: u64) -> Sample {
    let probes = scalar_probes(domain, space.dim(), seed);
    Sample::new(name, domain.clone(), space.clone(), move |x| {
        probes.iter().map(|p| p.eval(x)).collect()
    })
}

fn coords<const K: usize>(
    f: impl Fn(&[f64]) -> [f64; K] + Send + Sync + 'static,
) -> impl Fn(&[f64]) -> Vec<f64> + Send + Sync {
    move |x| f(x).to_vec()
}

/// Thirty samples spread over Hilbert, `l^1`, sampled sup and `L^r` for
/// `r` in {1.5, 2, 3}, mixing smooth points, zero crossings and sup ties.
pub fn norm_chain_corpus() -> Vec<Sample> {
    let line = BoxDomain::unit(1);
    let square = BoxDomain::unit(2);
    let mut out = Vec::new();

    let h2 = SpaceDescriptor::hilbert(2).unwrap();
    let h3 = SpaceDescriptor::hilbert(3).unwrap();
    out.push(Sample::new(
        "hilbert-circle",
        BoxDomain::interval(0.0, 6.0).unwrap(),
        h2.clone(),
        coords(|x| [x[0].cos(), x[0].sin()]),
    ));
    out.push(Sample::new(
        "hilbert-spiral",
        line.clone(),
        h2.clone(),
        coords(|x| [(1.0 + x[0]) * (3.0 * x[0]).cos(), (1.0 + x[0]) * (3.0 * x[0]).sin()]),
    ));
    out.push(Sample::new(
        "hilbert-crossing",
        line.clone(),
        h3.clone(),
        coords(|x| [x[0] - 0.5, 0.3 + (2.0 * x[0]).sin(), x[0] * x[0]]),
    ));
    out.push(Sample::new(
        "hilbert-plane",
        square.clone(),
        h2.clone(),
        coords(|x| [1.0 + x[0] * x[1], (x[0] - x[1]).cos()]),
    ));
    out.push(Sample::new(
        "hilbert-saddle",
        square.clone(),
        h3,
        coords(|x| [x[0] - x[1] + 0.5, (2.0 * x[1]).sin(), 0.5 + x[0] * x[0]]),
    ));

    let l1 = SpaceDescriptor::finite_lr(3, 1.0).unwrap();
    out.push(Sample::new(
        "l1-kink",
        line.clone(),
        l1.clone(),
        coords(|x| [x[0] - 0.5, 1.0 + x[0] * x[0], (x[0] - 0.25) * (x[0] + 1.0)]),
    ));
    out.push(Sample::new(
        "l1-smooth",
        line.clone(),
        l1.clone(),
        coords(|x| [2.0 + x[0].sin(), 1.0 + x[0], 0.5 * (1.0 + x[0] * x[0])]),
    ));
    out.push(Sample::new(
        "l1-wave",
        line.clone(),
        l1.clone(),
        coords(|x| [(2.0 * std::f64::consts::PI * x[0]).sin(), 0.5 - x[0] * x[0] * 2.0, 1.0]),
    ));
    out.push(Sample::new(
        "l1-plane",
        square.clone(),
        l1.clone(),
        coords(|x| [x[0] - 0.5, x[1] - 0.25, 1.0 + x[0] * x[1]]),
    ));
    out.push(Sample::new(
        "l1-bowl",
        square.clone(),
        l1,
        coords(|x| [x[0] * x[0] + x[1], (x[0] - 0.75) * (1.0 + x[1]), 0.3]),
    ));

    let sup = SpaceDescriptor::sampled_sup(3).unwrap();
    out.push(Sample::new(
        "sup-switch",
        line.clone(),
        sup.clone(),
        coords(|x| [1.0 + (x[0] - 0.5), 1.0 - (x[0] - 0.5), 0.2 * x[0]]),
    ));
    out.push(Sample::new(
        "sup-dominant",
        line.clone(),
        sup.clone(),
        coords(|x| [3.0 + x[0].sin(), x[0], -1.0 + x[0] * x[0]]),
    ));
    out.push(Sample::new(
        "sup-negative",
        line.clone(),
        sup.clone(),
        coords(|x| [-2.0 - x[0] * x[0], 1.0 + x[0], 0.5 * (3.0 * x[0]).cos()]),
    ));
    out.push(Sample::new(
        "sup-plane",
        square.clone(),
        sup.clone(),
        coords(|x| [1.0 + (x[0] - 0.5) * (1.0 + x[1]), 1.0 - (x[0] - 0.5), 0.1 * x[1]]),
    ));
    out.push(Sample::new(
        "sup-bowl",
        square.clone(),
        sup,
        coords(|x| [2.0 + x[0] * x[1], -(1.0 + x[0] * x[0]), x[1]]),
    ));

    for r in [1.5, 2.0, 3.0] {
        let sp = SpaceDescriptor::grid_lr(4, r).unwrap();
        out.push(Sample::new(
            format!("lr{r}-crossing"),
            line.clone(),
            sp.clone(),
            coords(|x| [x[0] - 0.5, 1.0 + x[0], (x[0] - 0.25) * 2.0, (3.0 * x[0]).cos()]),
        ));
        out.push(Sample::new(
            format!("lr{r}-smooth"),
            line.clone(),
            sp.clone(),
            coords(|x| [1.0 + x[0] * x[0], 2.0 - x[0], (2.0 * x[0]).exp(), 0.5]),
        ));
        out.push(Sample::new(
            format!("lr{r}-oscillation"),
            line.clone(),
            sp.clone(),
            coords(|x| {
                [
                    (5.0 * x[0]).sin() + 1.5,
                    x[0] * x[0] * x[0],
                    1.0 - x[0],
                    (x[0] + 1.0).ln(),
                ]
            }),
        ));
        out.push(Sample::new(
            format!("lr{r}-plane"),
            square.clone(),
            sp.clone(),
            coords(|x| [x[0] - 0.5, x[1] + 1.0, x[0] * x[1], 1.0 - x[1] * x[1]]),
        ));
        out.push(Sample::new(
            format!("lr{r}-bowl"),
            square.clone(),
            sp,
            coords(|x| [1.0 + x[0] * x[0] + x[1] * x[1], (x[0] - x[1]).sin(), 0.25, x[1] - 0.75]),
        ));
    }
    out
}

/// Order-continuous lattice samples (finite `l^r` and `L^r`) with zero crossings on dyadic faces.
pub fn lattice_corpus() -> Vec<Sample> {
    let line = BoxDomain::unit(1);
    let square = BoxDomain::unit(2);
    let mut out = Vec::new();
    for (tag, sp) in [
        ("l1", SpaceDescriptor::finite_lr(3, 1.0).unwrap()),
        ("l2", SpaceDescriptor::finite_lr(3, 2.0).unwrap()),
        ("lr3", SpaceDescriptor::grid_lr(3, 3.0).unwrap()),
    ] {
        out.push(Sample::new(
            format!("{tag}-line"),
            line.clone(),
            sp.clone(),
            coords(|x| [x[0] - 0.5, (x[0] - 0.25) * (1.0 + x[0]), 1.0 + x[0] * x[0]]),
        ));
        out.push(Sample::new(
            format!("{tag}-wave"),
            line.clone(),
            sp.clone(),
            coords(|x| [(2.0 * std::f64::consts::PI * x[0]).sin(), 0.75 - x[0], -1.0 - x[0]]),
        ));
        out.push(Sample::new(
            format!("{tag}-plane"),
            square.clone(),
            sp,
            coords(|x| [x[0] - 0.5, (x[1] - 0.25) * (1.0 + x[0]), x[0] * x[1] - 2.0]),
        ));
    }
    out
}

/// Smooth samples for the difference-quotient criterion, each with its
/// exact `max_j |D_j u|_{L^p}` for `p = 2` as an analytic oracle.
pub fn c1_corpus() -> Vec<(Sample, f64)> {
    let line = BoxDomain::unit(1);
    let square = BoxDomain::unit(2);
    let pi = std::f64::consts::PI;
    let h2 = SpaceDescriptor::hilbert(2).unwrap();
    vec![
        // |u'| = 1 on the unit circle path
        (
            Sample::new("circle", line.clone(), h2.clone(), coords(|x| [x[0].cos(), x[0].sin()])),
            1.0,
        ),
        // u = (sin pi t, t^2): int pi^2 cos^2 + 4 t^2 = pi^2/2 + 4/3
        (
            Sample::new(
                "sine-square",
                line,
                h2.clone(),
                coords(move |x| [(pi * x[0]).sin(), x[0] * x[0]]),
            ),
            (pi * pi / 2.0 + 4.0 / 3.0).sqrt(),
        ),
        // u = (x0 x1, x1): D_0 u = (x1, 0) with L^2 norm sqrt(1/3); D_1 u = (x0, 1) with sqrt(4/3)
        (
            Sample::new("bilinear", square, h2, coords(|x| [x[0] * x[1], x[1]])),
            (4.0f64 / 3.0).sqrt(),
        ),
    ]
}

/// `prod_j sin(pi y_j)`, vanishing on the boundary of the box.
pub fn box_bubble(domain: &BoxDomain, x: &[f64]) -> f64 {
    (0..x.len())
        .map(|j| (std::f64::consts::PI * (x[j] - domain.lo()[j]) / domain.width(j)).sin())
        .product()
}

/// Ten members of `W_0^{1,p}` and ten non-members, across spaces and dimensions.
/// The boolean is the expected verdict.
pub fn w0_corpus() -> Vec<(Sample, bool)> {
    let line = BoxDomain::unit(1);
    let square = BoxDomain::unit(2);
    let wide = BoxDomain::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
    let h2 = SpaceDescriptor::hilbert(2).unwrap();
    let l1 = SpaceDescriptor::finite_lr(3, 1.0).unwrap();
    let sup = SpaceDescriptor::sampled_sup(2).unwrap();
    let lr = SpaceDescriptor::grid_lr(3, 3.0).unwrap();
    let mut out = Vec::new();

    let b = |dom: &BoxDomain| {
        let dom = dom.clone();
        move |x: &[f64]| box_bubble(&dom, x)
    };
    {
        let g = b(&line);
        out.push((
            Sample::new("member-sine-h", line.clone(), h2.clone(), move |x| {
                vec![3.0 * g(x), 4.0 * g(x)]
            }),
            true,
        ));
    }
    out.push((
        Sample::new("member-parabola-h", line.clone(), h2.clone(), |x| {
            let q = x[0] * (1.0 - x[0]);
            vec![q, q * x[0]]
        }),
        true,
    ));
    {
        let g = b(&line);
        out.push((
            Sample::new("member-sine-l1", line.clone(), l1.clone(), move |x| {
                vec![g(x), -2.0 * g(x) * x[0], g(x) * g(x)]
            }),
            true,
        ));
    }
    {
        let g = b(&line);
        out.push((
            Sample::new("member-sine-sup", line.clone(), sup.clone(), move |x| {
                vec![g(x), g(x) * (x[0] - 0.5)]
            }),
            true,
        ));
    }
    {
        let g = b(&line);
        out.push((
            Sample::new("member-sine-lr", line.clone(), lr.clone(), move |x| {
                vec![g(x), 2.0 * g(x), -g(x) * x[0]]
            }),
            true,
        ));
    }
    {
        let g = b(&square);
        out.push((
            Sample::new("member-bubble-h", square.clone(), h2.clone(), move |x| {
                vec![g(x), g(x) * x[1]]
            }),
            true,
        ));
    }
    {
        let g = b(&square);
        out.push((
            Sample::new("member-bubble-l1", square.clone(), l1.clone(), move |x| {
                vec![g(x), g(x) * x[0], -g(x)]
            }),
            true,
        ));
    }
    {
        let g = b(&square);
        out.push((
            Sample::new("member-bubble-sup", square.clone(), sup.clone(), move |x| {
                vec![g(x) * (1.0 + x[0]), -g(x)]
            }),
            true,
        ));
    }
    {
        let g = b(&wide);
        out.push((
            Sample::new("member-bubble-wide", wide.clone(), lr.clone(), move |x| {
                vec![g(x), g(x) * x[0], g(x) * g(x)]
            }),
            true,
        ));
    }
    out.push((
        Sample::new("member-product-lr", square.clone(), lr.clone(), |x| {
            let q = x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]);
            vec![q, 4.0 * q, -q]
        }),
        true,
    ));

    out.push((
        Sample::new("constant-h", line.clone(), h2.clone(), |_| vec![3.0, 4.0]),
        false,
    ));
    out.push((
        Sample::new("affine-h", line.clone(), h2.clone(), |x| vec![x[0], 1.0 - x[0]]),
        false,
    ));
    {
        let g = b(&line);
        out.push((
            Sample::new("one-coordinate-l1", line.clone(), l1.clone(), move |x| {
                vec![g(x), 1.0 + x[0], g(x)]
            }),
            false,
        ));
    }
    out.push((
        Sample::new("cosine-sup", line.clone(), sup.clone(), |x| {
            vec![(std::f64::consts::PI * x[0]).cos(), 0.0]
        }),
        false,
    ));
    {
        let g = b(&line);
        out.push((
            Sample::new("one-coordinate-lr", line.clone(), lr.clone(), move |x| {
                vec![g(x), g(x), 0.5 + x[0] * x[0]]
            }),
            false,
        ));
    }
    out.push((
        Sample::new("constant-square-h", square.clone(), h2, |_| vec![1.0, 0.0]),
        false,
    ));
    out.push((
        Sample::new("edge-l1", square.clone(), l1.clone(), |x| vec![x[0], 0.0, x[0] * x[1]]),
        false,
    ));
    {
        let g = b(&square);
        out.push((
            Sample::new("one-coordinate-sup", square.clone(), sup, move |x| {
                vec![g(x), x[1] * x[1]]
            }),
            false,
        ));
    }
    out.push((
        Sample::new("exp-wide", wide, lr.clone(), |x| vec![(0.5 * x[0]).exp(), 0.0, x[1]]),
        false,
    ));
    {
        let g = b(&square);
        out.push((
            Sample::new("one-coordinate-lr-square", square, lr, move |x| {
                vec![g(x), 1.0 - x[0] * x[1], 0.0]
            }),
            false,
        ));
    }
    out
}

/// One-dimensional samples on `(0, 1)` for the Morrey check; the last one is `sqrt(t) x0`.
pub fn morrey_corpus() -> Vec<Sample> {
    let line = BoxDomain::unit(1);
    let h2 = SpaceDescriptor::hilbert(2).unwrap();
    let l1 = SpaceDescriptor::finite_lr(3, 1.0).unwrap();
    let sup = SpaceDescriptor::sampled_sup(3).unwrap();
    let lr = SpaceDescriptor::grid_lr(3, 1.5).unwrap();
    vec![
        Sample::new("constant", line.clone(), h2.clone(), |_| vec![1.0, -2.0]),
        Sample::new("circle", line.clone(), h2.clone(), |x| vec![x[0].cos(), x[0].sin()]),
        Sample::new("fast-circle", line.clone(), h2.clone(), |x| {
            vec![(6.0 * x[0]).cos(), (6.0 * x[0]).sin()]
        }),
        Sample::new("l1-mixed", line.clone(), l1, |x| {
            vec![x[0] - 0.5, x[0] * x[0], (3.0 * x[0]).sin()]
        }),
        Sample::new("sup-mixed", line.clone(), sup, |x| {
            vec![1.0 - x[0], x[0], 0.5 * (4.0 * x[0]).cos()]
        }),
        Sample::new("lr-mixed", line.clone(), lr, |x| {
            vec![x[0].exp(), -x[0], (x[0] - 0.25).abs()]
        }),
        Sample::new("sqrt", line, h2, |x| {
            let r = x[0].sqrt();
            vec![0.6 * r, 0.8 * r]
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_have_expected_sizes() {
        assert_eq!(norm_chain_corpus().len(), 30);
        let w0 = w0_corpus();
        assert_eq!(w0.len(), 20);
        assert_eq!(w0.iter().filter(|(_, m)| *m).count(), 10);
    }

    #[test]
    fn samples_grid_at_every_level() {
        for s in norm_chain_corpus().iter().chain(lattice_corpus().iter()) {
            let u = s.grid(8).unwrap();
            assert_eq!(u.node_count(), 8usize.pow(s.d() as u32));
        }
    }

    #[test]
    fn probes_are_seeded() {
        let d = BoxDomain::unit(2);
        assert_eq!(scalar_probes(&d, 3, 5), scalar_probes(&d, 3, 5));
        assert_ne!(scalar_probes(&d, 3, 5), scalar_probes(&d, 3, 6));
    }
}
