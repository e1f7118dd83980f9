use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use proptest::prelude::*;

use regreal_core::analysis::{equivalence_on_grid, exact_value, lipschitz_estimate};
use regreal_core::artifact::{export_dot, Artifact, ArtifactFile};
use regreal_core::convert::{ntrans_to_buchi, Pipeline, PipelineConfig, Provenance};
use regreal_core::corpus::{delta_counted, f_tilde, f_z, StreamingEvaluator, SupportPredicate};
use regreal_core::digits::{
    binary_expansions, canonical_expansion, format_rational, parse_rational, rat,
};
use regreal_core::pwl::{denormalize_value, normalize_value, tooth, tooth_by_formula};
use regreal_core::transducer::{delayed_copier, eval_exact_rational};
use regreal_core::{BinaryWord, Lasso, PwlFunction, Rational};

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=200).prop_flat_map(|q| (0..=q).prop_map(move |p| rat(p, q)))
}

fn binary_lasso() -> impl Strategy<Value = Lasso<u8>> {
    (
        prop::collection::vec(0u8..=1, 0..8),
        prop::collection::vec(0u8..=1, 1..6),
    )
        .prop_map(|(p, q)| Lasso::new(p, q).unwrap())
}

fn signed_lasso() -> impl Strategy<Value = Lasso<i8>> {
    (
        prop::collection::vec(-1i8..=1, 0..8),
        prop::collection::vec(-1i8..=1, 1..6),
    )
        .prop_map(|(p, q)| Lasso::new(p, q).unwrap())
}

/// PWL function with dyadic breakpoints and rational values in `[-2, 2]`.
fn pwl() -> impl Strategy<Value = PwlFunction> {
    (
        prop::collection::btree_set(1i64..64, 0..5),
        prop::collection::vec((-40i64..=40, 1i64..=20), 7),
    )
        .prop_map(|(interior, values)| {
            let xs = std::iter::once(0)
                .chain(interior)
                .chain(std::iter::once(64))
                .map(|k| rat(k, 64));
            let points = xs
                .zip(values)
                .map(|(x, (p, q))| (x, rat(p, q * 10)))
                .collect();
            PwlFunction::new(points).unwrap()
        })
}

fn identity_pipeline() -> &'static Pipeline {
    static PIPELINE: OnceLock<Pipeline> = OnceLock::new();
    PIPELINE.get_or_init(|| {
        Pipeline::build(&PwlFunction::identity(), &PipelineConfig::default()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lasso_text_round_trip(w in signed_lasso()) {
        let back: Lasso<i8> = w.to_string().parse().unwrap();
        prop_assert_eq!(&back, &w);
    }

    #[test]
    fn lasso_reshaping_keeps_the_word(w in binary_lasso(), k in 0usize..4, r in 0usize..6) {
        prop_assert!(w.unrolled(k).same_word(&w));
        prop_assert!(w.rolled(r).same_word(&w));
        prop_assert!(w.normalized().same_word(&w));
        prop_assert_eq!(w.normalized().value(), w.value());
    }

    #[test]
    fn expansions_represent_the_value(x in unit_rational()) {
        let reps = binary_expansions(&x).unwrap();
        prop_assert!(!reps.is_empty() && reps.len() <= 2);
        prop_assert_eq!(&reps[0], &canonical_expansion(&x).unwrap());
        for rep in &reps {
            prop_assert_eq!(rep.value(), x.clone());
        }
    }

    #[test]
    fn rational_text_round_trip(x in unit_rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn normalization_inverts(y in unit_rational()) {
        prop_assert_eq!(denormalize_value(&normalize_value(&y)), y);
    }

    #[test]
    fn pwl_artifact_round_trip(f in pwl()) {
        let file = ArtifactFile::new(Artifact::Pwl(f), Provenance::new("corpus"));
        prop_assert_eq!(ArtifactFile::parse(&file.to_string_pretty()).unwrap(), file);
    }

    #[test]
    fn lattice_identities(f in pwl(), g in pwl(), x in unit_rational()) {
        let (fx, gx) = (f.eval(&x).unwrap(), g.eval(&x).unwrap());
        prop_assert_eq!(f.lattice_max(&g).eval(&x).unwrap(), fx.clone().max(gx.clone()));
        prop_assert_eq!(f.max_via_modulus(&g).eval(&x).unwrap(), fx.clone().max(gx.clone()));
        prop_assert_eq!(f.min_via_modulus(&g).eval(&x).unwrap(), fx.clone().min(gx));
        prop_assert_eq!(f.modulus().eval(&x).unwrap(), fx.abs());
        prop_assert_eq!(
            f.pos_part().eval(&x).unwrap() - f.neg_part().eval(&x).unwrap(),
            fx
        );
    }

    #[test]
    fn tooth_formula_agrees(a in 0i64..63, span in 1i64..=64, h in 1i64..=16, x in unit_rational()) {
        let b = (a + span).min(64);
        let (p, q, r) = (rat(a, 64), rat(b, 64), rat(h, 16));
        prop_assert_eq!(
            tooth(&p, &q, &r).unwrap().eval(&x).unwrap(),
            tooth_by_formula(&p, &q, &r).unwrap().eval(&x).unwrap()
        );
    }

    #[test]
    fn lipschitz_estimate_is_monotone_and_bounded(f in pwl(), depth in 0u32..7) {
        let e = |x: &Rational| f.eval(x);
        let coarse = lipschitz_estimate(e, depth).unwrap();
        let fine = lipschitz_estimate(e, depth + 1).unwrap();
        prop_assert!(coarse <= fine);
        prop_assert!(fine <= f.lipschitz_bound());
    }

    #[test]
    fn grid_deviation_is_a_metric(f in pwl(), g in pwl(), h in pwl(), depth in 0u32..6) {
        let dev = |a: &PwlFunction, b: &PwlFunction| {
            equivalence_on_grid(|x| a.eval(x), |x| b.eval(x), depth, &Rational::zero())
                .unwrap()
                .max_deviation
        };
        prop_assert_eq!(dev(&f, &g), dev(&g, &f));
        prop_assert!(dev(&f, &f).is_zero());
        prop_assert!(dev(&f, &h) <= dev(&f, &g) + dev(&g, &h));
    }

    #[test]
    fn fz_is_one_lipschitz(x in unit_rational(), y in unit_rational(), cofinite in any::<bool>()) {
        let support = if cofinite {
            SupportPredicate::everywhere()
        } else {
            SupportPredicate::finite([3, 5, 7])
        };
        let f = f_z(support);
        prop_assert!((f.eval(&x) - f.eval(&y)).abs() <= (x - y).abs());
    }

    #[test]
    fn witness_step_counts_are_linear(bits in prop::collection::vec(0u8..=1, 0..200)) {
        let sigma = BinaryWord::new(bits).unwrap();
        let budget = |c: u64| c * (sigma.len() as u64 + 1);
        prop_assert!(delta_counted(&sigma).1 <= budget(3));
        prop_assert!(f_tilde().eval_word(&sigma, sigma.len()).steps <= budget(6));
    }

    #[test]
    fn stream_evaluation_matches_exact_value(bits in prop::collection::vec(0u8..=1, 0..24)) {
        let sigma = BinaryWord::new(bits).unwrap();
        let f = f_z(SupportPredicate::everywhere());
        let out = f.eval_word(&sigma, 16);
        prop_assert_eq!(&out.value, &f.eval(&sigma.value()));
        prop_assert_eq!(out.digits.len(), 16);
    }

    #[test]
    fn delayed_copier_is_exact(w in binary_lasso(), delay in 0usize..5) {
        let t = delayed_copier(delay);
        let out = eval_exact_rational(&t, &w.map(|b| b as i8)).unwrap();
        prop_assert_eq!(out.value, w.value());
    }

    #[test]
    fn copier_graph_is_the_diagonal(x in binary_lasso(), y in binary_lasso()) {
        let graph = ntrans_to_buchi(delayed_copier(0).fst()).unwrap();
        prop_assert_eq!(graph.accepts_graph(&x, &y).unwrap(), x.value() == y.value());
    }

    #[test]
    fn identity_pipeline_is_exact_on_rationals(x in unit_rational()) {
        let p = identity_pipeline();
        prop_assert_eq!(p.user_value(&exact_value(&p.ad, &x).unwrap()), x);
    }

    #[test]
    fn identity_pipeline_reads_signed_inputs(w in signed_lasso()) {
        let x = w.value();
        prop_assume!(!x.is_negative());
        let p = identity_pipeline();
        let out = eval_exact_rational(&p.ad, &w).unwrap();
        prop_assert_eq!(p.user_value(&out.value), x);
    }

    #[test]
    fn dot_export_is_stable(delay in 0usize..3) {
        let artifact = Artifact::DetFst(delayed_copier(delay));
        let dot = export_dot(&artifact, 1 << 10).unwrap();
        prop_assert_eq!(&dot, &export_dot(&artifact, 1 << 10).unwrap());
        prop_assert!(dot.starts_with("digraph"));
    }
}
