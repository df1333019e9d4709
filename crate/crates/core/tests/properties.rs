use std::sync::Arc;

use proptest::prelude::*;

use ck_core::bounds::integer_bound;
use ck_core::chart::{Chart, Scalar};
use ck_core::coleman::{expand_double_integral, expand_g, expand_single_integral, ColemanSpec};
use ck_core::diffops::{build_annihilator, compose_with_base, is_zero_series, AlgebraicOperator, BaseDerivation};
use ck_core::funcfield::CurveFunction;
use ck_core::hyperelliptic::{CurveModel, DiskCenter, DiskDescriptor, DiskKind, ModelKind};
use ck_core::padics::factorial_valuation;
use ck_core::rational::{q, qf};
use ck_core::{Prime, TruncatedSeries, Q};

fn rational() -> impl Strategy<Value = Q> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| qf(n, d))
}

fn series(len: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(rational(), len).prop_map(move |c| TruncatedSeries::from_rationals(&c, len))
}

/// `y^2 = x^3 + x + 1` near `(0, 1)` at `p = 5`.
fn elliptic_chart(work: usize) -> (CurveModel, Chart) {
    let c = CurveModel::from_ints(ModelKind::Odd, &[1, 1, 0, 1]).unwrap();
    let disk = DiskDescriptor { kind: DiskKind::AffineNonWeierstrass, center: DiskCenter::Affine { x: 0, y: 1 } };
    let chart = Chart::new(&c, disk, Prime::new(5).unwrap(), work).unwrap();
    (c, chart)
}

fn sc(r: &Q) -> Scalar {
    Scalar::rational(r.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_matches_brute_force(n in 0u64..5000, pi in 0usize..4) {
        let p = [3u64, 5, 7, 11][pi];
        let brute: u64 = (1..=n).map(|mut k| {
            let mut v = 0;
            while k % p == 0 {
                k /= p;
                v += 1;
            }
            v
        }).sum();
        prop_assert_eq!(factorial_valuation(n, Prime::new(p).unwrap()), brute);
    }

    #[test]
    fn integer_bound_is_largest_below(n in -10_000i64..10_000, d in 1i64..50) {
        let r = qf(n, d);
        let b = integer_bound(&r).unwrap();
        prop_assert!(q(b) < r);
        prop_assert!(r <= q(b + 1));
    }

    #[test]
    fn series_product_and_inverse(a in series(10), b in series(10), c0 in 1i64..20) {
        prop_assert_eq!(&a * &b, &b * &a);
        let mut coeffs = b.coeffs().to_vec();
        coeffs[0] = q(c0);
        let unit: TruncatedSeries = TruncatedSeries::from_rationals(&coeffs, 10);
        let inv = unit.inverse().unwrap();
        prop_assert_eq!(&unit * &inv, TruncatedSeries::one(10));
    }

    #[test]
    fn annihilator_kills_its_inputs(fs in prop::collection::vec(series(16), 1..4), gap in 0usize..3) {
        let s: Vec<usize> = (0..=fs.len()).map(|i| i * (gap + 1)).collect();
        let d = build_annihilator(&s, &fs).unwrap();
        for f in &fs {
            prop_assert!(is_zero_series(&d.apply(f).unwrap()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn expand_g_is_linear(
        a1 in prop::collection::vec(rational(), 4),
        a2 in prop::collection::vec(rational(), 4),
        v1 in prop::collection::vec(rational(), 2),
        v2 in prop::collection::vec(rational(), 2),
        h1 in rational(),
        h2 in rational(),
        lambda in rational(),
    ) {
        let (c, chart) = elliptic_chart(40);
        let f = Arc::new(c.f().clone());
        let build = |a: &[Q], v: &[Q], h: &Q| {
            let mut spec = ColemanSpec::zero(c.clone());
            spec.a_matrix = vec![a[..2].to_vec(), a[2..].to_vec()];
            spec.a_vector = v.to_vec();
            spec.base_constants = vec![q(1), qf(-1, 2)];
            spec.h = CurveFunction::x(&f).scale(h);
            spec
        };
        let combo: Vec<Q> = a1.iter().zip(&a2).map(|(x, y)| x + &lambda * y).collect();
        let vcombo: Vec<Q> = v1.iter().zip(&v2).map(|(x, y)| x + &lambda * y).collect();
        let t = 16;
        let g1 = expand_g(&build(&a1, &v1, &h1), &chart, t).unwrap();
        let g2 = expand_g(&build(&a2, &v2, &h2), &chart, t).unwrap();
        let g = expand_g(&build(&combo, &vcombo, &(&h1 + &lambda * &h2)), &chart, t).unwrap();
        prop_assert_eq!(g, &g1 + &g2.scale(&sc(&lambda)));
    }

    #[test]
    fn shuffle_relation(ci in rational(), cj in rational(), cij in rational(), i in 0usize..2, j in 0usize..2) {
        let (c, chart) = elliptic_chart(40);
        let f = Arc::new(c.f().clone());
        let fi = CurveFunction::x_pow_over_y(&f, i);
        let fj = CurveFunction::x_pow_over_y(&f, j);
        let t = 14;
        let ii = expand_single_integral(&fi, &chart, t, &ci).unwrap();
        let ij = expand_single_integral(&fj, &chart, t, &cj).unwrap();
        // J_ij + J_ji = I_i I_j once the constants satisfy c_ij + c_ji = c_i c_j
        let cji = &ci * &cj - &cij;
        let jij = expand_double_integral(&fi, &fj, &chart, t, &cj, &cij).unwrap();
        let jji = expand_double_integral(&fj, &fi, &chart, t, &ci, &cji).unwrap();
        prop_assert_eq!(&jij + &jji, &ii * &ij);
    }

    #[test]
    fn elliptic_operator_maps_g_to_x_plus_a(a in rational(), b in rational(), c0 in rational(), c1 in rational()) {
        let (c, chart) = elliptic_chart(40);
        let p = Prime::new(5).unwrap();
        let mut spec = ColemanSpec::elliptic(c.clone(), a.clone(), b).unwrap();
        spec.base_constants = vec![c0, c1];
        let t = 16;
        let d1 = AlgebraicOperator::power(&c, 1, BaseDerivation::DOmega0).localize(&chart, t - 1).unwrap();
        let d = compose_with_base(&d1, &chart.omega0_factor(t).unwrap(), p).unwrap();
        let image = d.apply(&expand_g(&spec, &chart, t).unwrap()).unwrap();
        let f = spec.h.curve_poly().clone();
        let expected = chart.expand(&CurveFunction::x(&f).add(&CurveFunction::constant(&f, a)), image.precision()).unwrap();
        prop_assert_eq!(image, expected);
    }
}
