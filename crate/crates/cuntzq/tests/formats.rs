use cuntzq::mtx::{self, MtxMatrix};
use cuntzq::parse::{parse_chaos, parse_polynomial};
use cuntzq::random;
use cuntzq_core::basis::BasisSpec;
use cuntzq_core::quantizer::build_qhat;
use cuntzq_core::{Complex64, PhaseSpace};
use proptest::prelude::*;

#[test]
fn exported_matrix_reads_back_bit_identical() {
    let s = PhaseSpace::new(BasisSpec::with_level(2, 3)).unwrap();
    let f = parse_polynomial("q1^2 p2 - 1/3 q2 + p1", 2).unwrap();
    let qh = build_qhat(&s, &f).unwrap();
    let m = MtxMatrix::from_coeff(&qh, vec!["test".into()]);
    let back = mtx::read(&mtx::to_string(&m)).unwrap();
    assert_eq!(back, m);
    for (i, j, v) in &back.entries {
        assert_eq!(*v, qh.entry(*i as usize, *j as usize));
    }
}

proptest! {
    #[test]
    fn polynomial_display_parses_back(seed in any::<u64>(), n in 1usize..=3, d in 0u32..=4) {
        let f = random::polynomial(&mut random::rng(seed), n, d);
        prop_assert_eq!(parse_polynomial(&f.to_string(), n).unwrap(), f);
    }

    #[test]
    fn chaos_display_parses_back(seed in any::<u64>(), k in 1usize..=4, d in 0u32..=3) {
        let f = random::chaos(&mut random::rng(seed), k, d);
        prop_assert_eq!(parse_chaos(&f.to_string(), k).unwrap(), f);
    }

    #[test]
    fn mtx_round_trip(entries in proptest::collection::vec((0u64..50, 0u64..50, any::<f64>(), any::<f64>()), 0..40)) {
        let entries: Vec<_> = entries
            .into_iter()
            .filter(|e| e.2.is_finite() && e.3.is_finite())
            .map(|(i, j, a, b)| (i, j, Complex64::new(a + 0.0, b + 0.0)))
            .collect();
        let m = MtxMatrix { rows: 50, cols: 50, entries, comments: vec![] };
        prop_assert_eq!(mtx::read(&mtx::to_string(&m)).unwrap(), m);
    }
}
