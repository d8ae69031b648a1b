use hybridsim::{BoxSet, Interval, Signal};
use proptest::prelude::*;

fn interval() -> impl Strategy<Value = Interval> {
    (-5.0f64..5.0, 0.0f64..4.0, any::<bool>(), any::<bool>())
        .prop_map(|(lo, w, lc, hc)| Interval::new(lo, lo + w, lc, hc))
}

fn steps() -> impl Strategy<Value = Vec<(f64, Vec<f64>)>> {
    prop::collection::vec((0.05f64..1.0, -1.0f64..1.0), 1..6).prop_map(|raw| {
        let mut t = 0.0;
        raw.into_iter()
            .enumerate()
            .map(|(k, (dt, v))| {
                if k > 0 {
                    t += dt;
                }
                (t, vec![v])
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn pontryagin_difference_is_the_largest_translate_set(a in interval(), b in interval(), s in 0.0f64..1.0) {
        let d = a.pontryagin_diff(&b);
        // endpoints are recomputed by subtraction then addition, so allow rounding
        let slack = Interval::new(a.lo - 1e-9, a.hi + 1e-9, a.lo_closed, a.hi_closed);
        prop_assert!(d.is_empty() || d.minkowski_sum(&b).is_subset_of(&slack));
        // any x whose translate x + B fits in A belongs to the difference
        let x = -6.0 + 12.0 * s;
        let translate = Interval::new(x + b.lo, x + b.hi, b.lo_closed, b.hi_closed);
        if !b.is_empty() && translate.is_subset_of(&a) {
            prop_assert!(d.contains(x));
        }
    }

    #[test]
    fn minkowski_sum_contains_pairwise_sums(a in interval(), b in interval(), s in 0.0f64..1.0, r in 0.0f64..1.0) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let p = a.closure().lo + s * a.width();
        let q = b.closure().lo + r * b.width();
        prop_assume!(a.contains(p) && b.contains(q));
        prop_assert!(a.minkowski_sum(&b).contains(p + q));
    }

    #[test]
    fn interior_and_closure_bracket_the_interval(a in interval(), s in 0.0f64..1.0) {
        let x = a.lo + s * a.width();
        if a.interior().contains(x) {
            prop_assert!(a.contains(x));
        }
        if a.contains(x) {
            prop_assert!(a.closure().contains(x));
        }
    }

    #[test]
    fn box_intersection_is_pointwise(a in interval(), b in interval(), c in interval(), d in interval(), x in -6.0f64..6.0, y in -6.0f64..6.0) {
        let p = BoxSet::new(vec![a, b]);
        let q = BoxSet::new(vec![c, d]);
        let i = p.intersect(&q);
        prop_assert_eq!(i.contains(&[x, y]), p.contains(&[x, y]) && q.contains(&[x, y]));
    }

    #[test]
    fn step_signals_are_right_continuous(st in steps(), s in 0.0f64..1.0) {
        let w = Signal::steps(&st, BoxSet::closed(&[-1.0], &[1.0])).unwrap();
        for (t, v) in &st {
            prop_assert_eq!(w.eval(*t).unwrap(), v.clone());
            prop_assert_eq!(w.right_limit(*t).unwrap(), v.clone());
        }
        let t = s * (st.last().unwrap().0 + 1.0);
        let expected = st.iter().rev().find(|(b, _)| *b <= t).unwrap().1.clone();
        prop_assert_eq!(w.eval(t).unwrap(), expected);
    }

    #[test]
    fn shifting_moves_the_time_origin(st in steps(), a in 0.0f64..2.0, s in 0.0f64..3.0) {
        let w = Signal::steps(&st, BoxSet::closed(&[-1.0], &[1.0])).unwrap();
        let shifted = w.shift(a);
        prop_assert_eq!(shifted.eval(s).unwrap(), w.eval(s + a).unwrap());
    }
}
