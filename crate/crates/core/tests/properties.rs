use nalgebra::DMatrix;
use nullag_core::algebra::{det_sum_expansion, format_rational, int, parse_rational, Rational};
use nullag_core::certify::{
    exact_span_dim, find_certificate_d_le_3, grassmann_genericity, reduce_chain, two_atom_measure, CertificateSearch,
    ChainOptions, ChainOutcome, Chart, LAMBDA_TOL,
};
use nullag_core::conslaw::{build_atoms, iterate_weights, FluxFunction, IterationOptions};
use nullag_core::measures::{farkas_solve, is_null_lagrangian, FarkasOutcome, FarkasProblem};
use nullag_core::subspace::{apply_ops, find_rank_one, minor_span, same_polynomial_span, PencilOp, RankOneOptions, SearchMode};
use nullag_core::{RationalMatrix, Subspace};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(lo..=hi, rows * cols)
        .prop_map(move |v| RationalMatrix::new(rows, cols, v.into_iter().map(int).collect()).unwrap())
}

fn subspace(max_m: usize, max_n: usize, max_d: usize) -> impl Strategy<Value = Subspace> {
    (1..=max_m, 1..=max_n, 1..=max_d)
        .prop_filter("d ≤ m·n", |(m, n, d)| d <= &(m * n))
        .prop_flat_map(|(m, n, d)| prop::collection::vec(matrix(m, n, -2, 2), d).prop_map(move |b| Subspace::new(m, n, b)))
        .prop_filter_map("independent basis", Result::ok)
}

fn nonzero_factor() -> impl Strategy<Value = Rational> {
    ((1i64..=3), (1i64..=3), any::<bool>()).prop_map(|(p, q, neg)| Rational::new((if neg { -p } else { p }).into(), q.into()))
}

fn ops(m: usize, n: usize, len: usize) -> impl Strategy<Value = Vec<PencilOp>> {
    let op = (0..6usize, 0..m, 0..m, 0..n, 0..n, nonzero_factor()).prop_filter_map("distinct indices", move |(kind, r1, r2, c1, c2, f)| {
        match kind {
            0 => Some(PencilOp::RowSwap { a: r1, b: r2 }),
            1 => Some(PencilOp::RowScale { row: r1, factor: f }),
            2 if r1 != r2 => Some(PencilOp::RowAdd { target: r1, source: r2, factor: f }),
            3 => Some(PencilOp::ColSwap { a: c1, b: c2 }),
            4 => Some(PencilOp::ColScale { col: c1, factor: f }),
            5 if c1 != c2 => Some(PencilOp::ColAdd { target: c1, source: c2, factor: f }),
            _ => None,
        }
    });
    prop::collection::vec(op, 0..=len)
}

fn with_ops(max: usize, max_d: usize) -> impl Strategy<Value = (Subspace, Vec<PencilOp>)> {
    subspace(max, max, max_d).prop_flat_map(|k| {
        let (m, n) = (k.m(), k.n());
        (Just(k), ops(m, n, 8))
    })
}

fn opts() -> RankOneOptions {
    RankOneOptions { density: 4_000, ..RankOneOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = Rational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn det_of_sum_expands_over_minors((a, x) in (1usize..=4).prop_flat_map(|n| (matrix(n, n, -5, 5), matrix(n, n, -5, 5)))) {
        prop_assert_eq!(det_sum_expansion(&a, &x).unwrap(), a.add(&x).unwrap().det().unwrap());
    }

    #[test]
    fn minor_spans_survive_pencil_operations((k, ops) in with_ops(3, 3)) {
        let t = apply_ops(&k, &ops).unwrap();
        for p in 2..=k.m().min(k.n()) {
            prop_assert!(same_polynomial_span(&minor_span(&k, p).unwrap(), &minor_span(&t, p).unwrap()));
        }
    }

    #[test]
    fn exact_rank_one_answer_survives_operations((k, ops) in with_ops(3, 2)) {
        let t = apply_ops(&k, &ops).unwrap();
        let a = find_rank_one(&k, SearchMode::Exact, &opts()).unwrap();
        let b = find_rank_one(&t, SearchMode::Exact, &opts()).unwrap();
        prop_assert!(a.conclusive && b.conclusive);
        prop_assert_eq!(a.found(), b.found());
        prop_assert_eq!(a.found(), find_rank_one(&k.transpose(), SearchMode::Exact, &opts()).unwrap().found());
    }

    #[test]
    fn small_dimension_dichotomy(k in subspace(3, 3, 2)) {
        // For d ≤ 2 the rank-1 search is exact, so exactly one side must hold.
        let search = find_rank_one(&k, SearchMode::Exact, &opts()).unwrap();
        let cert = find_certificate_d_le_3(&k, &opts()).unwrap();
        match cert {
            CertificateSearch::Found { .. } => prop_assert!(!search.found()),
            CertificateSearch::RankOne { .. } => prop_assert!(search.found()),
            CertificateSearch::NotFound => prop_assert!(false, "no answer for d = {}", k.d()),
        }
        if let Some(z) = search.rational_witness() {
            let mu = two_atom_measure(&k, z).unwrap();
            prop_assert!(is_null_lagrangian(&mu, (k.m(), k.n()), nullag_core::algebra::MinorOrder::All).unwrap().verdict);
        }
    }

    #[test]
    fn chains_descend_and_verify(k in subspace(3, 3, 3)) {
        let options = ChainOptions { rank_one: opts(), ..ChainOptions::default() };
        let outcome = reduce_chain(&k, &options).unwrap();
        let cert = match &outcome {
            ChainOutcome::Certificate(c) => c,
            ChainOutcome::Obstruction { partial, .. } => partial,
        };
        let dims: Vec<usize> = cert.chain.iter().map(|s| s.cone_basis.cols()).collect();
        prop_assert!(dims.windows(2).all(|w| w[1] < w[0]));
        prop_assert_eq!(dims.first().copied().unwrap_or(k.d()), k.d());
        if outcome.certificate().is_some() {
            prop_assert!(cert.verify().unwrap().verified);
        }
        // Same seed, same answer.
        let again = reduce_chain(&k, &options).unwrap();
        prop_assert_eq!(serde_json::to_string(&outcome).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn farkas_alternative_is_exclusive(
        (a, b) in (1usize..=4, 1usize..=5).prop_flat_map(|(m, n)| (matrix(m, n, -3, 3), prop::collection::vec(-3i64..=3, m)))
    ) {
        let p = FarkasProblem::new(a, b.into_iter().map(int).collect()).unwrap();
        match farkas_solve(&p).unwrap() {
            FarkasOutcome::Feasible(x) => prop_assert!(p.check_solution(&x)),
            FarkasOutcome::Infeasible(y) => prop_assert!(p.check_certificate(&y)),
        }
    }

    #[test]
    fn lambda_tracks_exact_span(entries in prop::collection::vec(-2i64..=2, 14 * 2)) {
        let chart = Chart::standard(2, 4, 4).unwrap();
        let a = RationalMatrix::new(14, 2, entries.iter().copied().map(int).collect()).unwrap();
        let af = DMatrix::from_fn(14, 2, |i, j| entries[i * 2 + j] as f64);
        let rep = grassmann_genericity(&chart, &af, 0).unwrap();
        let exact = exact_span_dim(&chart, &a).unwrap();
        prop_assert_eq!(rep.span_dim, exact);
        prop_assert_eq!(rep.lambda.abs() > LAMBDA_TOL, exact == 3);
    }

    #[test]
    fn five_atom_iteration_respects_bounds(s0 in 0.02f64..0.2, t0 in 0.02f64..0.2, c in -1.0f64..1.0) {
        let flux = FluxFunction::by_name(&format!("quadratic:{c}")).unwrap();
        let sys = build_atoms(&flux, [0.0, 0.0], s0, t0).unwrap();
        let it = iterate_weights(&sys, sys.eps0 / 2.0, &IterationOptions::default()).unwrap();
        prop_assert!(it.within_guarantee && it.bounds_hold, "{:?}", it);
        prop_assert!(it.residual <= 1e-12);
    }
}
