//! Block construction checks: agreement with a plain linear scan, boundary
//! minimality, and the certified bounds the constructions promise.

mod common;

use bc_lab::blocks::{
    block_probabilities, blocked_model, build_blocks_theorem_a, build_blocks_theorem_b,
};
use bc_lab::models::{FiniteStaticModel, IndependentModel, MarginalSpec, Model};

fn power_model() -> Model {
    Model::Independent(
        IndependentModel::new(MarginalSpec::Power {
            c: 1.0,
            alpha: 2.0,
            shift: 1,
        })
        .unwrap(),
    )
}

fn half_model() -> Model {
    Model::Independent(IndependentModel::new(MarginalSpec::Constant { p: 0.5 }).unwrap())
}

fn preset_model() -> Model {
    Model::FiniteStatic(FiniteStaticModel::counterexample_preset())
}

#[test]
fn theorem_a_boundaries_match_linear_scan() {
    let model = power_model();
    let plan = build_blocks_theorem_a(&model, 8, 1 << 16).unwrap();
    let mut lower = 0usize;
    for (k, &boundary) in plan.boundaries().iter().enumerate() {
        let threshold = 0.5f64.powi(k as i32 + 1);
        let oracle = common::linear_scan_boundary(&model, lower, 1 << 16, threshold).unwrap();
        assert_eq!(boundary, oracle, "block {}", k + 1);
        lower = boundary;
    }
}

#[test]
fn theorem_a_boundaries_are_minimal() {
    let model = power_model();
    let plan = build_blocks_theorem_a(&model, 8, 1 << 16).unwrap();
    let mut lower = 0usize;
    for (k, &boundary) in plan.boundaries().iter().enumerate() {
        let threshold = 0.5f64.powi(k as i32 + 1);
        assert!(model.tail_union_upper(boundary).unwrap() <= threshold);
        if boundary > lower + 1 {
            assert!(
                model.tail_union_upper(boundary - 1).unwrap() > threshold,
                "block {} boundary {} is not minimal",
                k + 1,
                boundary
            );
        }
        lower = boundary;
    }
}

#[test]
fn theorem_a_block_sums_are_summable() {
    let model = power_model();
    let plan = build_blocks_theorem_a(&model, 10, 1 << 18).unwrap();
    let probs = block_probabilities(&model, &plan).unwrap();
    for (k, &p) in probs.probabilities.iter().enumerate() {
        assert!(
            p <= 0.5f64.powi(k as i32) * 2.0 + 1e-12,
            "P(B_{}) = {} exceeds 2^{}",
            k + 1,
            p,
            1 - (k as i32 + 1)
        );
    }
    assert!(*probs.partial_sums.last().unwrap() <= 2.0);
}

#[test]
fn theorem_b_boundaries_match_linear_scan() {
    for model in [half_model(), preset_model()] {
        let plan = build_blocks_theorem_b(&model, 10, 1 << 16).unwrap();
        let mut lower = 0usize;
        for (k, &boundary) in plan.boundaries().iter().enumerate() {
            // Strict coverage: survival over the block drops below 2^{-k}.
            let threshold = 0.5f64.powi(k as i32 + 1);
            let oracle = common::linear_scan_coverage(&model, lower, 1 << 16, threshold).unwrap();
            assert_eq!(boundary, oracle, "block {}", k + 1);
            lower = boundary;
        }
    }
}

#[test]
fn theorem_b_achieves_coverage_and_bounded_variance() {
    let model = half_model();
    let plan = build_blocks_theorem_b(&model, 30, 1 << 16).unwrap();
    for k in 1..=plan.len() {
        let (a, b) = plan.block_range(k);
        let union = model.range_union(a, b).unwrap();
        assert!(
            union > 1.0 - 0.5f64.powi(k as i32),
            "block {k} union {union} misses coverage"
        );
    }
    let blocked = blocked_model(&model, &plan).unwrap();
    let table = blocked.moments(plan.len()).unwrap();
    let bound = 3.0 + 2.0 * 2f64.sqrt();
    for entry in &table.entries {
        assert!(entry.mean > entry.m as f64 - 1.0, "mean at m={}", entry.m);
        assert!(
            entry.variance <= bound + 1e-9,
            "variance {} at m={} exceeds {}",
            entry.variance,
            entry.m,
            bound
        );
    }
}

#[test]
fn blocked_moments_agree_with_double_sum() {
    let model = preset_model();
    let plan = build_blocks_theorem_b(&model, 12, 1 << 12).unwrap();
    let blocked = blocked_model(&model, &plan).unwrap();
    let table = blocked.moments(12).unwrap();
    for m in [1, 5, 12] {
        let mean = common::mean_simple_sum(&blocked, m);
        let var = common::variance_double_sum(&blocked, m);
        common::assert_entry_close(table.at(m), mean, var, 1e-12);
    }
}

#[test]
fn theorem_a_fails_on_non_vanishing_tail() {
    let err = build_blocks_theorem_a(&half_model(), 3, 1 << 12).unwrap_err();
    let message = err.to_string();
    assert!(
        message.contains("not almost surely finite"),
        "unexpected error: {message}"
    );
}

#[test]
fn nested_blocking_flattens_to_composed_boundaries() {
    let model = half_model();
    let plan = build_blocks_theorem_b(&model, 8, 1 << 12).unwrap();
    let blocked = blocked_model(&model, &plan).unwrap();
    let outer = bc_lab::blocks::BlockPlan::user_given(vec![2, 4, 6, 8]).unwrap();
    let nested = blocked_model(&blocked, &outer).unwrap();
    // Blocks of blocks collapse to unions over base ranges; marginals
    // must match the base range unions at the composed boundaries.
    let bounds = plan.boundaries();
    for k in 1usize..=4 {
        // Outer block k spans blocked indices (2(k-1), 2k], i.e. base
        // indices (bounds[2(k-1)-1], bounds[2k-1]] with 0 for k = 1.
        let lower = if k == 1 { 0 } else { bounds[2 * (k - 1) - 1] };
        let upper = bounds[2 * k - 1];
        let expected = model.range_union(lower, upper).unwrap();
        let got = nested.marginal(k).unwrap();
        assert!(
            (got - expected).abs() < 1e-12,
            "nested block {k}: {got} vs {expected}"
        );
    }
}
