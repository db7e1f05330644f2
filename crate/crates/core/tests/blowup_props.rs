mod common;

use common::{jet, naive_compose, prepared_model, q, var};
use proptest::prelude::*;
use resolvkit::blowup::{
    blowup_pullback, jacobian_determinant, lemma71_check, normal_crossings_jets, order_along_center,
    strict_transform_hypersurface, Center, ChartMap,
};
use resolvkit::series::monomial_unit_decompose;
use resolvkit::{Jet, Multiindex, OrderResult};

/// Chart formulas written out directly.
fn chart_formulas(ch: &ChartMap, t: u32) -> Vec<Jet> {
    let n = ch.n;
    (0..n)
        .map(|j| {
            if ch.center.contains(j) && j != ch.chart_index {
                &var(n, t, ch.chart_index) * &var(n, t, j)
            } else {
                var(n, t, j)
            }
        })
        .collect()
}

fn center_strategy(n: usize) -> impl Strategy<Value = (Vec<usize>, usize)> {
    prop::collection::btree_set(0..n, 1..=n).prop_flat_map(|s| {
        let v: Vec<usize> = s.into_iter().collect();
        let k = v.len();
        (Just(v), 0..k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pullback_is_a_ring_homomorphism(a in jet(3, 8, 4, 5), b in jet(3, 8, 4, 5), (c, i) in center_strategy(3)) {
        let ch = ChartMap::new(Center::new(c.clone(), 3).unwrap(), c[i], 3).unwrap();
        let p = |f: &Jet| blowup_pullback(f, &ch);
        prop_assert_eq!(p(&(&a * &b)), &p(&a) * &p(&b));
        prop_assert_eq!(p(&(&a + &b)), &p(&a) + &p(&b));
        prop_assert_eq!(p(&a), naive_compose(&a, &chart_formulas(&ch, 8), 8));
    }

    #[test]
    fn weak_transform_exponent_is_the_center_order(f in jet(3, 10, 4, 5), (c, i) in center_strategy(3)) {
        let center = Center::new(c.clone(), 3).unwrap();
        let f = &f * &var(3, 10, c[0]);
        prop_assume!(!f.is_zero());
        let ch = ChartMap::new(center.clone(), c[i], 3).unwrap();
        let (e, h) = strict_transform_hypersurface(&f, &ch).unwrap();
        prop_assert_eq!(OrderResult::Finite(e), order_along_center(&f, &center));
        prop_assert!(h.terms().any(|(a, _)| a[c[i]] == 0));
    }

    #[test]
    fn derivative_identities_hold(f in jet(3, 10, 4, 5), (c, i) in center_strategy(3), pick in 0u32..4) {
        let center = Center::new(c.clone(), 3).unwrap();
        let f = &f * &var(3, 10, c[0]);
        prop_assume!(!f.is_zero());
        let mu = order_along_center(&f, &center).finite().unwrap();
        let e = 1 + pick % mu;
        prop_assert!(lemma71_check(&f, &center, c[i], e).unwrap().all_hold());
    }

    #[test]
    fn composite_jacobian_is_a_signed_monomial(steps in prop::collection::vec(center_strategy(3), 1..4)) {
        let charts: Vec<ChartMap> = steps
            .iter()
            .map(|(c, i)| ChartMap::new(Center::new(c.clone(), 3).unwrap(), c[*i], 3).unwrap())
            .collect();
        let det = jacobian_determinant(&charts, 16).unwrap();
        let (alpha, u) = monomial_unit_decompose(&det).unwrap();
        prop_assert!(u == Jet::one(3, u.truncation()) || u == -Jet::one(3, u.truncation()), "{}", u);
        let expected: u32 = charts.iter().map(|ch| ch.center.codim() as u32 - 1).sum();
        prop_assert!(alpha.degree() >= expected);
    }

    #[test]
    fn coordinate_hyperplanes_stay_normal_crossing(hs in prop::collection::btree_set(0usize..3, 0..=3), (c, i) in center_strategy(3)) {
        let center = Center::new(c.clone(), 3).unwrap();
        let ch = ChartMap::new(center.clone(), c[i], 3).unwrap();
        let mut jets: Vec<Jet> = hs
            .iter()
            .map(|&k| strict_transform_hypersurface(&var(3, 10, k), &ch).unwrap().1)
            .filter(|j| !j.is_unit())
            .collect();
        jets.push(var(3, 10, c[i]));
        let refs: Vec<&Jet> = jets.iter().collect();
        prop_assert!(normal_crossings_jets(&refs).holds);
    }

    #[test]
    fn points_off_the_other_charts_drop_order(
        d in 2u32..4,
        extra in prop::collection::vec((prop::collection::vec(0usize..2, 1..3), jet(2, 10, 2, 3)), 2),
        shift in -3i64..3,
    ) {
        // model in (x1, x2, x3) with x3 the distinguished variable and I = {1}
        let g = prepared_model(3, 14, d, &[0], &extra);
        let ch = ChartMap::new(Center::new(vec![0, 2], 3).unwrap(), 2, 3).unwrap();
        let (e, h) = strict_transform_hypersurface(&g, &ch).unwrap();
        prop_assert_eq!(e, d);
        // y1 = 0 and y3 = 0 lie outside chart 1; x2 is free
        let pt = vec![q(0), q(shift), q(0)];
        prop_assert!(h.evaluate(&pt) != q(0));
        prop_assert_eq!(h.translate(&pt).unwrap().order(), OrderResult::Finite(0));
    }
}

#[test]
fn chart_examples() {
    let cusp = Jet::from_int_terms(2, 12, &[(&[0, 2], 1), (&[3, 0], -1)]);
    let c = Center::new(vec![0, 1], 2).unwrap();
    let (e, h) = strict_transform_hypersurface(&cusp, &ChartMap::new(c.clone(), 0, 2).unwrap()).unwrap();
    assert_eq!(e, 2);
    assert_eq!(h, Jet::from_int_terms(2, 10, &[(&[0, 2], 1), (&[1, 0], -1)]));
    let (e, h) = strict_transform_hypersurface(&cusp, &ChartMap::new(c, 1, 2).unwrap()).unwrap();
    assert_eq!(e, 2);
    assert_eq!(h, Jet::from_int_terms(2, 10, &[(&[0, 0], 1), (&[3, 1], -1)]));
    let m = Jet::monomial(2, 12, Multiindex(vec![2, 3]), q(1));
    assert_eq!(order_along_center(&m, &Center::new(vec![0, 1], 2).unwrap()), OrderResult::Finite(5));
}
