use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use sobolev_banach::banach::{
    abs_one_sided, band_projection_disjoint, lattice_abs, norm, one_sided_norm_derivative, sign_apply,
};
use sobolev_banach::SpaceDescriptor;

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5EED),
        failure_persistence: None,
        ..Config::default()
    }
}

fn space(kind: u8, dim: usize) -> SpaceDescriptor {
    match kind {
        0 => SpaceDescriptor::hilbert(dim),
        1 => SpaceDescriptor::finite_lr(dim, 1.0),
        2 => SpaceDescriptor::finite_lr(dim, 3.0),
        3 => SpaceDescriptor::sampled_sup(dim),
        4 => SpaceDescriptor::grid_lr(dim, 1.5),
        _ => SpaceDescriptor::grid_lr_weighted((0..dim).map(|s| 1.0 + s as f64).collect(), 2.5),
    }
    .unwrap()
}

const KINDS: u8 = 6;

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=6).prop_flat_map(|d| {
        (
            prop::collection::vec(-10.0..10.0f64, d),
            prop::collection::vec(-10.0..10.0f64, d),
        )
    })
}

fn shifted(x: &[f64], h: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(h).map(|(a, b)| a + t * b).collect()
}

fn quotient(sp: &SpaceDescriptor, x: &[f64], h: &[f64], t: f64) -> f64 {
    (norm(sp, &shifted(x, h, t)).unwrap() - norm(sp, x).unwrap()) / t
}

/// Richardson-extrapolated one-sided quotients at each step; `sign` picks the side.
fn richardson(sp: &SpaceDescriptor, x: &[f64], h: &[f64], sign: f64) -> Vec<f64> {
    [1e-3, 1e-4, 1e-5, 1e-6, 1e-7]
        .iter()
        .map(|&t| {
            let q = |s: f64| quotient(sp, x, h, sign * s);
            2.0 * q(t / 2.0) - q(t)
        })
        .collect()
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn triangle_inequality_and_homogeneity((x, y) in pair(), lambda in -50.0..50.0f64) {
        for kind in 0..KINDS {
            let sp = space(kind, x.len());
            let (nx, ny) = (norm(&sp, &x).unwrap(), norm(&sp, &y).unwrap());
            let sum = norm(&sp, &shifted(&x, &y, 1.0)).unwrap();
            prop_assert!(sum <= nx + ny + 1e-12 * (nx + ny), "{sp}: {sum} > {nx} + {ny}");
            let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            let ns = norm(&sp, &scaled).unwrap();
            prop_assert!((ns - lambda.abs() * nx).abs() <= 1e-13 * lambda.abs() * nx, "{sp}: {ns} vs {}", lambda.abs() * nx);
            prop_assert!(nx > 0.0 || x.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn difference_quotients_increase((x, h) in pair()) {
        let ts = [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0];
        for kind in 0..KINDS {
            let sp = space(kind, x.len());
            let slack = 1e-12 * (norm(&sp, &x).unwrap() + norm(&sp, &h).unwrap()) / ts[0];
            let q: Vec<f64> = ts.iter().map(|&t| quotient(&sp, &x, &h, t)).collect();
            for w in q.windows(2) {
                prop_assert!(w[0] <= w[1] + slack, "{sp}: {q:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn one_sided_derivative_matches_richardson_oracle((mut x, h) in pair(), zero in prop::option::of(0usize..6)) {
        // optionally put x on the l^1 kink set
        if let Some(k) = zero {
            let k = k % x.len();
            x[k] = 0.0;
        }
        for kind in 0..KINDS {
            let sp = space(kind, x.len());
            let scale = 1.0 + norm(&sp, &h).unwrap();
            let plus = richardson(&sp, &x, &h, 1.0);
            let minus = richardson(&sp, &x, &h, -1.0);
            // the oracle's own smoothness test: stable extrapolation over the middle steps
            let stable = |r: &[f64]| r[1..4].iter().all(|v| (v - r[2]).abs() <= 1e-7 * scale);
            if !stable(&plus) || !stable(&minus) {
                continue;
            }
            let r = one_sided_norm_derivative(&sp, &x, &h).unwrap();
            prop_assert!((r.plus - plus[2]).abs() <= 1e-6 * scale, "{sp}: plus {} vs oracle {}", r.plus, plus[2]);
            prop_assert!((r.minus - minus[2]).abs() <= 1e-6 * scale, "{sp}: minus {} vs oracle {}", r.minus, minus[2]);
        }
    }

    #[test]
    fn lattice_identities_are_exact((mut v, w) in pair(), zero in 0usize..6) {
        let k = zero % v.len();
        v[k] = 0.0;
        for sp in [space(1, v.len()), space(2, v.len()), space(4, v.len())] {
            let abs = lattice_abs(&sp, &v).unwrap();
            prop_assert_eq!(sign_apply(&sp, &v, &v).unwrap(), abs.clone());
            let (plus, minus) = abs_one_sided(&sp, &v, &w).unwrap();
            let band = band_projection_disjoint(&sp, &v, &lattice_abs(&sp, &w).unwrap()).unwrap();
            for s in 0..v.len() {
                prop_assert_eq!(plus[s] - minus[s], 2.0 * band[s]);
            }
        }
    }
}
