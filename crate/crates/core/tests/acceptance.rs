//! End-to-end acceptance criteria, one PASS/FAIL line each.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regreal_core::analysis::{
    base_obstruction_probe, check_invariants, exact_value, lipschitz_estimate, signed_input,
    InvariantConfig,
};
use regreal_core::buchi::{determinize, DEFAULT_STATE_CAP};
use regreal_core::convert::{ntrans_to_buchi, Ad, Pipeline, PipelineConfig};
use regreal_core::corpus::{
    counterexample_fn, counterexample_transducer, delta_counted, f_tilde, f_z, f_z_pwl,
    identity_buchi, StreamingEvaluator, SupportPredicate, FZ_CUTOFF,
};
use regreal_core::digits::{binary_expansions, dyadic_grid, pow2, rat};
use regreal_core::pwl::{tooth, tooth_by_formula};
use regreal_core::transducer::{computes_on_grid, constant_zero_writer, eval_exact_rational};
use regreal_core::{BinaryWord, BuchiAutomaton, Fst, Lasso, PwlFunction, Rational, Transducer};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

struct Case {
    name: &'static str,
    source: PwlFunction,
    pipeline: Pipeline,
}

fn cases() -> Vec<Case> {
    let sources = [
        ("constant 0", PwlFunction::constant(rat(0, 1))),
        ("identity", PwlFunction::identity()),
        (
            "tooth(1/4,1/2,1/8)",
            tooth(&rat(1, 4), &rat(1, 2), &rat(1, 8)).expect("valid tooth"),
        ),
        (
            "fz{3}",
            f_z_pwl(&SupportPredicate::finite([3]), FZ_CUTOFF).expect("finite support"),
        ),
    ];
    let config = PipelineConfig::default();
    sources
        .into_iter()
        .map(|(name, source)| {
            let pipeline = Pipeline::build(&source, &config)
                .unwrap_or_else(|e| panic!("pipeline for {name}: {e}"));
            Case {
                name,
                source,
                pipeline,
            }
        })
        .collect()
}

/// Every lasso with `|prefix| ≤ max_prefix` and `1 ≤ |period| ≤ max_period`.
fn lassos<S: Copy + Eq>(alphabet: &[S], max_prefix: usize, max_period: usize) -> Vec<Lasso<S>> {
    fn words<S: Copy>(alphabet: &[S], len: usize) -> Vec<Vec<S>> {
        (0..len).fold(vec![Vec::new()], |acc, _| {
            acc.iter()
                .flat_map(|w| {
                    alphabet.iter().map(move |&a| {
                        let mut w = w.clone();
                        w.push(a);
                        w
                    })
                })
                .collect()
        })
    }
    let prefixes: Vec<Vec<S>> = (0..=max_prefix).flat_map(|n| words(alphabet, n)).collect();
    let periods: Vec<Vec<S>> = (1..=max_period).flat_map(|n| words(alphabet, n)).collect();
    prefixes
        .iter()
        .flat_map(|p| {
            periods
                .iter()
                .map(move |q| Lasso::new(p.clone(), q.clone()).expect("nonempty period"))
        })
        .collect()
}

/// Shortest form of each ultimately periodic word: primitive period, prefix not
/// ending in the period's last symbol.
fn is_reduced<S: Copy + Eq>(w: &Lasso<S>) -> bool {
    let per = w.period();
    let primitive = (1..per.len())
        .filter(|d| per.len() % d == 0)
        .all(|d| per.chunks(d).any(|c| c != &per[..d]));
    primitive && w.prefix().last() != per.last()
}

/// Distinct states a deterministic transducer visits on its first `steps` inputs.
fn visited_states<T: Transducer>(t: &T, w: &Lasso<i8>, steps: usize) -> usize {
    let mut state = t.initial_states().remove(0);
    let mut seen = HashSet::from([state.clone()]);
    for i in 0..steps {
        state = if i < t.delay() {
            t.delay_successors(&state, w.at(i))
                .expect("defined")
                .remove(0)
        } else {
            t.successors(&state, w.at(i)).expect("defined").remove(0).1
        };
        seen.insert(state.clone());
    }
    seen.len()
}

fn ad_user_value(case: &Case, ad: &Ad, x: &Rational) -> regreal_core::Result<Rational> {
    Ok(case.pipeline.user_value(&exact_value(ad, x)?))
}

fn criterion_1(cases: &[Case]) -> Outcome {
    let tol = pow2(-8);
    let mut details = Vec::new();
    for case in cases {
        let p = &case.pipeline;
        let f = |x: &Rational| case.source.eval(x).expect("in domain");
        let normalized = |x: &Rational| p.function.eval(x).expect("in domain");
        let mut reps = 0;
        for x in dyadic_grid(6) {
            let y = normalized(&x);
            let y_reps = binary_expansions(&y).map_err(fail)?;
            for rep in binary_expansions(&x).map_err(fail)? {
                reps += 1;
                for yr in &y_reps {
                    ensure(p.graph.accepts_graph(&rep, yr).map_err(fail)?, || {
                        format!("{}: graph rejects ({rep}, {yr})", case.name)
                    })?;
                    ensure(p.det.accepts_graph(&rep, yr).map_err(fail)?, || {
                        format!("{}: determinized graph rejects ({rep}, {yr})", case.name)
                    })?;
                }
                let out = eval_exact_rational(&p.ad, &signed_input(&rep)).map_err(fail)?;
                let dev = (p.user_value(&out.value) - f(&x)).abs();
                ensure(dev <= tol, || {
                    format!("{}: A_d off by {dev} at {rep}", case.name)
                })?;
            }
        }
        // Twelve normalized digits bound the original-range error by 12·2^-12 < 2^-8.
        let grid = computes_on_grid(&p.ahat, normalized, 6, 12).map_err(fail)?;
        let ahat_dev = &grid.max_deviation * rat(8, 1);
        ensure(grid.pass && ahat_dev <= tol, || {
            format!("{}: Â grid deviation {ahat_dev}", case.name)
        })?;
        let mut signed = 0;
        for word in signed_words(6) {
            for tail in [0i8, 1, -1] {
                let w = Lasso::new(word.clone(), vec![tail]).expect("nonempty period");
                let x = w.value();
                if x < Rational::zero() || x > Rational::one() {
                    continue;
                }
                signed += 1;
                let out = eval_exact_rational(&p.ad, &w).map_err(fail)?;
                let dev = (p.user_value(&out.value) - f(&x)).abs();
                ensure(dev <= tol, || {
                    format!("{}: A_d off by {dev} at {w}", case.name)
                })?;
            }
        }
        details.push(format!(
            "{} D={} reps={reps} signed={signed} Â-dev={ahat_dev}",
            case.name,
            p.delay()
        ));
    }
    Ok(details.join("; "))
}

fn signed_words(len: usize) -> Vec<Vec<i8>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.iter()
            .flat_map(|w| {
                [-1i8, 0, 1].into_iter().map(move |d| {
                    let mut w = w.clone();
                    w.push(d);
                    w
                })
            })
            .collect()
    })
}

fn criterion_2(cases: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut points = vec![rat(1, 3)];
    while points.len() < 25 {
        let q: i64 = rng.gen_range(1..=48);
        let x = rat(rng.gen_range(0..=q), q);
        if !points.contains(&x) {
            points.push(x);
        }
    }
    let mut max_steps = 0;
    for case in cases {
        let ad = &case.pipeline.ad;
        for x in &points {
            for rep in binary_expansions(x).map_err(fail)? {
                let w = signed_input(&rep);
                let out = eval_exact_rational(ad, &w).map_err(fail)?;
                let value = case.pipeline.user_value(&out.value);
                let expected = case.source.eval(x).map_err(fail)?;
                ensure(value == expected, || {
                    format!("{} at {x}: got {value}, expected {expected}", case.name)
                })?;
                let states = visited_states(ad, &w, out.steps);
                let bound = ad.delay() + w.prefix().len() + (states + 1) * w.period().len();
                ensure(out.steps <= bound, || {
                    format!("{} at {x}: {} steps exceed {bound}", case.name, out.steps)
                })?;
                max_steps = max_steps.max(out.steps);
            }
        }
    }
    let identity = cases
        .iter()
        .find(|c| c.name == "identity")
        .expect("identity case");
    let third = ad_user_value(identity, &identity.pipeline.ad, &rat(1, 3)).map_err(fail)?;
    ensure(third == rat(1, 3), || format!("identity(1/3) = {third}"))?;
    Ok(format!(
        "{} rationals x {} pipelines exact, max steps {max_steps}, identity(1/3) = 1/3",
        points.len(),
        cases.len()
    ))
}

/// Accepted pairs and accepted `1^ω`-tailed outputs of `A₀(t)` over all short lassos.
fn a0_exhaustive(
    name: &str,
    t: &Fst,
    f: impl Fn(&Rational) -> Rational,
) -> Result<(String, usize), String> {
    let graph = ntrans_to_buchi(t).map_err(fail)?;
    let shift = pow2(-(t.delay() as i64));
    let words = lassos(&[0u8, 1], 4, 3);
    let mut accepted = 0;
    let mut twins = 0;
    for x in &words {
        let y_expected = f(&x.value()) * &shift;
        for y in &words {
            let accepts = graph.accepts_graph(x, y).map_err(fail)?;
            let graph_point = y.value() == y_expected;
            ensure(accepts == graph_point, || {
                format!("{name}: accepts({x}, {y}) = {accepts}, f = {y_expected}")
            })?;
            if accepts {
                accepted += 1;
                let tail_ones = y.period().iter().all(|&d| d == 1);
                if tail_ones && !y_expected.is_one() {
                    twins += 1;
                }
            }
        }
    }
    let detail = format!(
        "{name}: {} pairs, {accepted} accepted, {twins} twin outputs",
        words.len() * words.len()
    );
    Ok((detail, twins))
}

/// Writes `1` then `0` forever: the constant `1/2`, whose output has two representations.
fn half_writer() -> Fst {
    let transitions = [(0, 0, 1, 1), (0, 1, 1, 1), (1, 0, 0, 1), (1, 1, 0, 1)];
    Fst::new(2, vec![0, 1], vec![0, 1], vec![0], 0, [], transitions).expect("valid")
}

fn criterion_3() -> Outcome {
    let cx = counterexample_fn();
    let runs = [
        a0_exhaustive("counterexample", &counterexample_transducer(), |x| {
            cx.eval(x)
        })?,
        a0_exhaustive(
            "zero writer",
            &constant_zero_writer(vec![0, 1]).into_fst(),
            |_| Rational::zero(),
        )?,
        a0_exhaustive("half writer", &half_writer(), |_| rat(1, 2))?,
    ];
    let (details, twins): (Vec<String>, Vec<usize>) = runs.into_iter().unzip();
    ensure(twins[0] > 0 && twins[2] > 0, || {
        format!("twin outputs missing: {}", details.join("; "))
    })?;
    Ok(details.join("; "))
}

fn criterion_4(cases: &[Case]) -> Outcome {
    let mut automata: Vec<(String, BuchiAutomaton)> = vec![
        ("identity".into(), identity_buchi()),
        (
            "A0(counterexample)".into(),
            ntrans_to_buchi(&counterexample_transducer()).map_err(fail)?,
        ),
        (
            "A0(constant writer)".into(),
            ntrans_to_buchi(&constant_zero_writer(vec![0, 1]).into_fst()).map_err(fail)?,
        ),
    ];
    automata.extend(
        cases
            .iter()
            .map(|c| (format!("graph({})", c.name), c.pipeline.graph.clone())),
    );
    let words: Vec<Lasso<usize>> = lassos(&[0usize, 1, 2, 3], 5, 5)
        .into_iter()
        .filter(is_reduced)
        .collect();
    for (name, a) in &automata {
        let (det, _) = determinize(a, DEFAULT_STATE_CAP).map_err(fail)?;
        for w in &words {
            let (src, d) = (
                a.accepts_lasso(w).map_err(fail)?,
                det.accepts_lasso(w).map_err(fail)?,
            );
            ensure(src == d, || {
                format!("{name}: source {src}, determinized {d} on {w:?}")
            })?;
        }
    }
    Ok(format!(
        "{} automata x {} reduced lassos, 0 disagreements",
        automata.len(),
        words.len()
    ))
}

fn criterion_5(cases: &[Case]) -> Outcome {
    let mut details = Vec::new();
    for case in cases {
        let report =
            check_invariants(&case.pipeline.ad, &InvariantConfig::default()).map_err(fail)?;
        ensure(report.pass(), || {
            format!("{}: {}", case.name, report.to_json())
        })?;
        details.push(format!(
            "{} prefixes={} ad-steps={} samples={}",
            case.name, report.prefixes, report.ad.steps, report.relative_samples
        ));
    }
    Ok(format!("0 violations; {}", details.join("; ")))
}

fn criterion_6() -> Outcome {
    let f = counterexample_fn();
    let half = rat(1, 2);
    for n in 1..=10i64 {
        let above = f.eval(&(pow2(-n - 1) + pow2(-n - 3)));
        let below = f.eval(&(pow2(-n - 1) + rat(3, 1) * pow2(-n - 3)));
        ensure(above > half && half > below, || {
            format!("n={n}: {above} > 1/2 > {below} fails")
        })?;
    }
    let grid =
        computes_on_grid(&counterexample_transducer(), |x| f.eval(x), 8, 10).map_err(fail)?;
    ensure(grid.pass, || format!("grid check failed: {grid:?}"))?;
    Ok(format!(
        "inequalities for n ≤ 10; grid depth 8 precision 10 max deviation {}",
        grid.max_deviation
    ))
}

/// Words of length ≤ 64: every word up to length 10, then runs that hit the
/// longest scans, then seeded random words.
fn step_corpus() -> Vec<BinaryWord> {
    let mut out: Vec<Vec<u8>> = (0..=10)
        .flat_map(|len| {
            (0u32..1 << len).map(move |bits| (0..len).map(|i| (bits >> i & 1) as u8).collect())
        })
        .collect();
    for len in 11..=64usize {
        for n in 1..len {
            let mut w = vec![0u8; len];
            w[n - 1] = 1;
            out.push(w.clone());
            w[n + 1..].fill(1);
            out.push(w);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for len in 11..=64usize {
        for _ in 0..64 {
            out.push((0..len).map(|_| rng.gen_range(0..=1)).collect());
        }
    }
    out.into_iter()
        .map(|w| BinaryWord::new(w).expect("binary"))
        .collect()
}

/// Checks `steps ≤ c·(|σ|+1)` on every sample and reports the tightest fitted constant.
fn linear_fit(name: &str, samples: &[(usize, u64)], c: u64) -> Outcome {
    let fitted = samples
        .iter()
        .map(|&(len, steps)| steps as f64 / (len as f64 + 1.0))
        .fold(0.0, f64::max);
    if let Some((len, steps)) = samples
        .iter()
        .find(|&&(len, steps)| steps > c * (len as u64 + 1))
    {
        return Err(format!(
            "{name}: {steps} steps on a word of length {len} exceed C={c}"
        ));
    }
    Ok(format!("{name} C={c} (fitted {fitted:.2})"))
}

fn criterion_7() -> Outcome {
    let one = Rational::one();
    for support in [
        SupportPredicate::everywhere(),
        SupportPredicate::finite([3, 5]),
    ] {
        let fz = f_z(support.clone());
        let lip = lipschitz_estimate(|x| Ok(fz.eval(x)), 10).map_err(fail)?;
        ensure(lip <= one, || format!("{support}: slope {lip} at depth 10"))?;
    }
    let ft = f_tilde();
    for n in 3..=8i64 {
        let v = ft.eval(&pow2(-n));
        ensure(v == pow2(-n * n), || format!("f̃(2^-{n}) = {v}"))?;
    }
    let words = step_corpus();
    let delta: Vec<(usize, u64)> = words
        .iter()
        .map(|w| (w.len(), delta_counted(w).1))
        .collect();
    let tilde: Vec<(usize, u64)> = words
        .iter()
        .map(|w| (w.len(), ft.eval_word(w, w.len()).steps))
        .collect();
    // Cost model: δ scans σ at most twice and writes at most |σ| digits; f̃ adds the
    // lazily generated 1^{n²} and the requested precision.
    let fits = [linear_fit("delta", &delta, 3)?, linear_fit("f̃", &tilde, 6)?];
    let cofinite = f_z(SupportPredicate::everywhere());
    for m in 1..=16 {
        let r = base_obstruction_probe(|x| Ok(cofinite.eval(x)), m).map_err(fail)?;
        ensure(r.found(), || format!("cofinite: no witness at budget {m}"))?;
    }
    let finite = f_z(SupportPredicate::finite([3, 5]));
    for m in 6..=16 {
        let r = base_obstruction_probe(|x| Ok(finite.eval(x)), m).map_err(fail)?;
        ensure(!r.found(), || {
            format!("fz{{3,5}}: spurious witness {:?} at budget {m}", r.witness)
        })?;
    }
    Ok(format!(
        "1-Lipschitz at depth 10; f̃(2^-n) = 2^-n² for 3 ≤ n ≤ 8; {} words, {}; obstruction found for cofinite m ≤ 16, absent for fz{{3,5}} at 6 ≤ m ≤ 16",
        words.len(),
        fits.join(", ")
    ))
}

fn random_pwl(rng: &mut ChaCha8Rng) -> PwlFunction {
    let k = rng.gen_range(1..=4);
    let mut xs: Vec<Rational> = (0..k).map(|_| rat(rng.gen_range(1..64), 64)).collect();
    xs.push(Rational::zero());
    xs.push(Rational::one());
    xs.sort();
    xs.dedup();
    let points = xs
        .into_iter()
        .map(|x| (x, rat(rng.gen_range(-40..=40), rng.gen_range(1..=20))))
        .collect();
    PwlFunction::new(points).expect("sorted breakpoints")
}

fn random_point(rng: &mut ChaCha8Rng) -> Rational {
    let q: i64 = rng.gen_range(1..=97);
    rat(rng.gen_range(0..=q), q)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let trials = 50;
    let at = |f: &PwlFunction, x: &Rational| f.eval(x).expect("in domain");
    for _ in 0..trials {
        let (f, g, x) = (
            random_pwl(&mut rng),
            random_pwl(&mut rng),
            random_point(&mut rng),
        );
        let (fx, gx) = (at(&f, &x), at(&g, &x));
        let max = at(&f.max_via_modulus(&g), &x);
        ensure(
            max == fx.clone().max(gx.clone()) && max == at(&f.lattice_max(&g), &x),
            || format!("max identity at {x}: {f} {g}"),
        )?;
        let min = at(&f.min_via_modulus(&g), &x);
        ensure(
            min == fx.clone().min(gx) && min == at(&f.lattice_min(&g), &x),
            || format!("min identity at {x}"),
        )?;
        ensure(at(&f.modulus(), &x) == fx.abs(), || {
            format!("mod identity at {x}")
        })?;
        let split = at(&f.pos_part(), &x) - at(&f.neg_part(), &x);
        ensure(split == fx, || format!("f = f⁺ − f⁻ at {x}"))?;
    }
    for _ in 0..trials {
        let a = rng.gen_range(0..63);
        let b = rng.gen_range(a + 1..=64);
        let (p, q, r) = (rat(a, 64), rat(b, 64), rat(rng.gen_range(1..=16), 16));
        let x = random_point(&mut rng);
        let direct = at(&tooth(&p, &q, &r).map_err(fail)?, &x);
        let formula = at(&tooth_by_formula(&p, &q, &r).map_err(fail)?, &x);
        ensure(direct == formula, || format!("tooth({p},{q},{r}) at {x}"))?;
    }
    Ok(format!("{trials} seeded points per identity, all exact"))
}

fn criterion_9(cases: &[Case]) -> Outcome {
    let mut details = Vec::new();
    for case in cases {
        let ad = &case.pipeline.ad;
        let estimate = lipschitz_estimate(|x| ad_user_value(case, ad, x), 8).map_err(fail)?;
        let bound = case.source.lipschitz_bound();
        ensure(estimate <= bound, || {
            format!("{}: estimate {estimate} > bound {bound}", case.name)
        })?;
        details.push(format!("{} {estimate} ≤ {bound}", case.name));
    }
    Ok(details.join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cases = cases();
    println!(
        "pipelines built in {:.1?}: {}",
        start.elapsed(),
        cases
            .iter()
            .map(|c| format!("{} D={}", c.name, c.pipeline.delay()))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(|| criterion_1(&cases))),
        (2, Box::new(|| criterion_2(&cases))),
        (3, Box::new(criterion_3)),
        (4, Box::new(|| criterion_4(&cases))),
        (5, Box::new(|| criterion_5(&cases))),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
        (9, Box::new(|| criterion_9(&cases))),
    ];
    let mut failures = 0;
    for (n, run) in &criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        let elapsed = t0.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({elapsed:.1?}) {detail}"),
            Err(why) => {
                failures += 1;
                println!("criterion {n}: FAIL ({elapsed:.1?}) {why}");
            }
        }
    }
    let total = start.elapsed();
    println!("acceptance total {total:.1?}, {failures} failing");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
