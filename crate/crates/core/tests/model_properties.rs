use moldsched::allocator::{
    allocate, allocation_cap, initial_allocation, initial_allocation_exhaustive, params_for,
};
use moldsched::model::{ModelKind, SpeedupSpec};
use proptest::prelude::*;

fn times(spec: &SpeedupSpec, procs: usize) -> Vec<f64> {
    (1..=procs)
        .map(|p| spec.exec_time(p, procs).unwrap())
        .collect()
}

fn spec_strategy() -> impl Strategy<Value = (SpeedupSpec, usize)> {
    let procs = 1usize..=96;
    let w = prop_oneof![Just(0.0), 1e-3f64..1e4];
    let small = prop_oneof![Just(0.0), 1e-4f64..50.0];
    (procs, w, small.clone(), small, 1usize..=128, 0usize..4).prop_map(
        |(procs, w, d, c, pbar, which)| {
            let spec = match which {
                0 => SpeedupSpec::roofline(w.max(1e-3), pbar).unwrap(),
                1 => SpeedupSpec::communication(w, c).unwrap(),
                2 => SpeedupSpec::amdahl(w, d).unwrap(),
                _ => SpeedupSpec::general(w, d, c, pbar).unwrap(),
            };
            (spec, procs)
        },
    )
}

const REL: f64 = 1e-12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn time_falls_and_area_grows_up_to_pmax((spec, procs) in spec_strategy()) {
        let st = spec.extremal_stats(procs).unwrap();
        let t = times(&spec, procs);
        for p in 1..st.p_max {
            let (a, b) = (t[p - 1], t[p]);
            prop_assert!(b <= a * (1.0 + REL), "time rises at p={p}: {a} -> {b}");
            prop_assert!(p as f64 * a <= (p + 1) as f64 * b * (1.0 + REL), "area falls at p={p}");
        }
    }

    #[test]
    fn speedup_never_superlinear((spec, procs) in spec_strategy()) {
        let st = spec.extremal_stats(procs).unwrap();
        let t = times(&spec, procs);
        for p in 1..=st.p_max {
            for q in p..=st.p_max {
                prop_assert!(t[p - 1] * p as f64 <= t[q - 1] * q as f64 * (1.0 + REL));
            }
        }
    }

    #[test]
    fn extremal_stats_match_scan((spec, procs) in spec_strategy()) {
        let st = spec.extremal_stats(procs).unwrap();
        let t = times(&spec, procs);
        let min_t = t.iter().copied().fold(f64::INFINITY, f64::min);
        let min_a = t.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).fold(f64::INFINITY, f64::min);
        let near: Vec<usize> = (1..=procs).filter(|&p| t[p - 1] <= min_t * (1.0 + REL)).collect();
        prop_assert!((st.t_min - min_t).abs() <= min_t * REL);
        prop_assert!((st.a_min - min_a).abs() <= min_a * REL);
        prop_assert!(near.contains(&st.p_max), "p_max {} not among minimizers {near:?}", st.p_max);
        // Beyond p_max nothing gets meaningfully faster.
        prop_assert!(st.p_max == near[0] || t[near[0] - 1] >= st.t_min * (1.0 - REL));
    }

    #[test]
    fn specializations_agree_with_general(w in 1e-3f64..1e3, d in 0.0f64..20.0, c in 0.0f64..5.0, pbar in 1usize..40, procs in 1usize..40) {
        let pairs = [
            (SpeedupSpec::roofline(w, pbar).unwrap(), SpeedupSpec::general(w, 0.0, 0.0, pbar).unwrap()),
            (SpeedupSpec::communication(w, c).unwrap(), SpeedupSpec::general(w, 0.0, c, procs).unwrap()),
            (SpeedupSpec::amdahl(w, d).unwrap(), SpeedupSpec::general(w, d, 0.0, procs).unwrap()),
        ];
        for (special, general) in pairs {
            let a = times(&special, procs);
            prop_assert_eq!(&a, &times(&general, procs));
            let table = SpeedupSpec::tabulated(a.clone()).unwrap();
            prop_assert_eq!(&a, &times(&table, procs));
            let (s1, s2) = (special.extremal_stats(procs).unwrap(), general.extremal_stats(procs).unwrap());
            prop_assert_eq!(s1.p_max, s2.p_max);
            prop_assert_eq!(s1.t_min, s2.t_min);
        }
    }

    #[test]
    fn allocation_ratios_within_model_bounds((spec, procs) in spec_strategy()) {
        let params = params_for(spec.kind());
        let st = spec.extremal_stats(procs).unwrap();
        let p = initial_allocation(&spec, procs, &params).unwrap();
        prop_assert_eq!(p, initial_allocation_exhaustive(&spec, procs, &params).unwrap());
        let area = spec.area(p, procs).unwrap();
        let time = spec.exec_time(p, procs).unwrap();
        if st.a_min > 0.0 {
            prop_assert!(area / st.a_min <= params.alpha + 1e-9, "area ratio {}", area / st.a_min);
            prop_assert!(time / st.t_min <= params.beta + 1e-9, "time ratio {}", time / st.t_min);
        } else {
            prop_assert_eq!(time, 0.0);
        }
        let fin = allocate(&spec, procs, &params).unwrap();
        prop_assert!(fin.procs >= 1 && fin.procs <= p && fin.procs <= allocation_cap(procs, params.mu));
        prop_assert_eq!(fin.initial, p);
    }

    #[test]
    fn tabulated_allocation_stays_in_range(table in proptest::collection::vec(0.01f64..10.0, 1..40)) {
        let procs = table.len();
        let spec = SpeedupSpec::tabulated(table).unwrap();
        let params = params_for(ModelKind::Tabulated);
        let fin = allocate(&spec, procs, &params).unwrap();
        let st = spec.extremal_stats(procs).unwrap();
        prop_assert!(fin.procs >= 1 && fin.procs <= procs);
        prop_assert!(spec.area(fin.initial, procs).unwrap() <= params.alpha * st.a_min * (1.0 + 1e-12));
    }
}
