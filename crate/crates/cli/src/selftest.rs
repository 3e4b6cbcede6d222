//! The invariant suite behind `bc-canon selftest`.

use std::collections::BTreeMap;

use bc_canon::csd::{cs_decompose, cs_reconstruct};
use bc_canon::io::{matrix_to_json, parse_matrix_str};
use bc_canon::matcore::{
    diagonal, numerical_rank, random_unitary, row_space_angle, seeded_rng, singular_values,
    unitarity_residual, ComplexMatrix,
};
use bc_canon::{
    block_rank_formula, canonical_decompose, check_self_adjoint, construct_from_w,
    even_canonical_decompose, generate_random_even_pair, generate_random_pair, predicted_ranks,
    recover_w, Classification, OrderSpec, Tolerances,
};
use rand::Rng;

use crate::{ExitStatus, Metric, Report};

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: BTreeMap<&'static str, usize>,
    worst: BTreeMap<&'static str, f64>,
}

impl Tally {
    fn check(&mut self, name: &'static str, ok: bool) {
        self.checks += 1;
        if !ok {
            *self.failures.entry(name).or_default() += 1;
        }
    }

    /// `value < bound`, remembering the largest value seen.
    fn below(&mut self, name: &'static str, value: f64, bound: f64) {
        let w = self.worst.entry(name).or_insert(0.0);
        *w = w.max(value);
        self.check(name, value < bound);
    }

    fn error(&mut self, name: &'static str) {
        self.check(name, false);
    }
}

fn conditioned(m: usize, seed: u64) -> ComplexMatrix {
    let sv: Vec<f64> = (0..m).map(|j| 1.0 + 49.0 * j as f64 / (m - 1).max(1) as f64).collect();
    random_unitary(m, seed) * diagonal(&sv) * random_unitary(m, seed ^ 0x5eed)
}

fn odd_trial(t: &mut Tally, spec: &OrderSpec, seed: u64, tol: &Tolerances) -> bc_canon::Result<()> {
    let n = spec.n;
    let m = spec.m;

    for (p, q) in [(n + 1, n), (n, n + 1)] {
        let w = random_unitary(m, seed ^ (p as u64) << 32);
        let f = cs_decompose(&w, p, q, tol)?;
        t.below("csd_round_trip", (cs_reconstruct(&f) - &w).norm(), 1e-9);
        let corners = [&f.u1, &f.u2, &f.v1, &f.v2].map(unitarity_residual);
        t.below("csd_corner_unitarity", corners.into_iter().fold(0.0, f64::max), 1e-10);
        let pyth = f.cos.iter().zip(&f.sin).map(|(c, s)| (c * c + s * s - 1.0).abs()).fold(0.0, f64::max);
        t.below("csd_pythagorean", pyth, 1e-12);
        t.check("csd_cos_sorted", f.cos.windows(2).all(|w| w[0] >= w[1]));
        let small = if p < q {
            w.view((0, 0), (p, p)).into_owned()
        } else {
            w.view((p, p), (q, q)).into_owned()
        };
        let sv = singular_values(&small)?;
        let gap = f.cos.iter().zip(&sv).map(|(c, s)| (c - s).abs()).fold(0.0, f64::max);
        t.below("csd_cos_block_svd", gap, 1e-10);
    }

    let w0 = random_unitary(m, seed);
    let pair = construct_from_w(&w0, spec, tol)?;
    let rep = check_self_adjoint(&pair, tol)?;
    t.check("self_adjoint_closure", rep.is_self_adjoint());
    t.below("gram_residual", rep.gram_residual, 1e-11);
    t.below("w_round_trip", (recover_w(&pair, tol)? - &w0).norm(), 1e-9);
    let moved = pair.left_multiply(&conditioned(m, seed.wrapping_add(17)));
    t.below("w_row_op_invariance", (recover_w(&moved, tol)? - &w0).norm(), 1e-8);

    let mut rng = seeded_rng(seed);
    let k = rng.random_range(0..=n);
    let pair = generate_random_pair(spec, seed, Some(k))?;
    let ra = numerical_rank(&pair.a, tol)?;
    let rb = numerical_rank(&pair.b, tol)?;
    t.check("rank_equality", ra == rb);
    t.check("rank_bounds", n < ra && ra <= m);
    t.check("generator_target_rank", ra == m - k);
    let form = canonical_decompose(&moved, tol)?;
    let normal = construct_from_w(&form.w, spec, tol)?.stacked();
    let rebuilt = form.reconstruct();
    t.below("canonical_reconstruction", (&rebuilt - normal).norm(), 1e-9);
    t.below("canonical_row_space_angle", row_space_angle(&rebuilt, &moved.stacked(), tol)?, 1e-8);

    let form = canonical_decompose(&pair, tol)?;
    let (pa, pb, null) = predicted_ranks(&form, tol)?;
    t.check("predicted_rank_matches_svd", (pa, pb) == (ra, rb));
    t.check("null_count_matches_target", null == k);
    t.check("block_rank_formula", block_rank_formula(&form.w, spec, tol)? == (ra, rb));
    t.check(
        "classification_dichotomy",
        form.classification != Classification::Separated
            && (form.classification == Classification::Coupled) == (ra == m),
    );
    t.check("rank_offset", form.r == ra - (n + 1));

    let text = matrix_to_json(&pair.a);
    let back = parse_matrix_str(&text)?;
    t.check(
        "serialization_bit_exact",
        back.iter().zip(pair.a.iter()).all(|(x, y)| {
            x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
        }),
    );
    Ok(())
}

fn even_trial(t: &mut Tally, n: usize, seed: u64, tol: &Tolerances) -> bc_canon::Result<()> {
    let k = seeded_rng(seed).random_range(0..=n);
    let pair = generate_random_even_pair(n, seed, Some(k))?;
    t.check("even_self_adjoint", check_self_adjoint(&pair, tol)?.is_self_adjoint());
    let form = even_canonical_decompose(&pair, tol)?;
    t.below("even_reconstruction", (form.reconstruct() - pair.stacked()).norm(), 1e-9);
    t.check("even_rank_s", form.rank_s == n - k);
    let expected = match form.rank_s {
        0 => Classification::Separated,
        r if r == n => Classification::Coupled,
        _ => Classification::Mixed,
    };
    t.check("even_trichotomy", form.classification == expected);
    if form.classification == Classification::Separated {
        let rows = form.core() * form.right_factor();
        let m = 2 * n;
        let leak = rows.view((0, m), (n, m)).norm() + rows.view((n, 0), (n, m)).norm();
        t.below("even_separated_support", leak, 1e-10);
    }
    Ok(())
}

pub fn run_selftest(orders: &[usize], trials: usize, seed: u64, tol: &Tolerances) -> bc_canon::Result<(Report, ExitStatus)> {
    let mut report = Report::new("selftest");
    let mut tally = Tally::default();
    let mut specs = Vec::new();
    for &m in orders {
        specs.push(OrderSpec::from_size(m)?);
    }
    for spec in &specs {
        for trial in 0..trials {
            let s = seed
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add((spec.m as u64) << 20)
                .wrapping_add(trial as u64);
            let outcome = if spec.is_odd_order() {
                odd_trial(&mut tally, spec, s, tol)
            } else {
                even_trial(&mut tally, spec.n, s, tol)
            };
            if outcome.is_err() {
                tally.error("no_error");
            }
        }
    }
    let failures: usize = tally.failures.values().sum();
    report.metric("checks", tally.checks);
    report.metric("failures", failures);
    report.metric("trials", trials * specs.len());
    for (name, worst) in &tally.worst {
        report.metrics.insert(format!("max_{name}"), Metric::Real(*worst));
    }
    if failures == 0 {
        report.verdict = "all invariants hold".into();
        Ok((report, ExitStatus::Success))
    } else {
        let names: Vec<String> = tally.failures.iter().map(|(k, v)| format!("{k} x{v}")).collect();
        report.verdict = format!("failed: {}", names.join(", "));
        Ok((report, ExitStatus::Failure))
    }
}
