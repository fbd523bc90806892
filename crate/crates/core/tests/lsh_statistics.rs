//! Monte-Carlo checks of the random-hyperplane collision law and of the
//! table plan's recall guarantee.

use std::f64::consts::PI;

use fsd_core::{plan_tables, signature, LshIndex, LshParams, NeighborIndex, TermId, TermVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const SUPPORT: u32 = 100;

/// Unit vectors `x`, `y` with non-negative weights and `cos(x, y) = cos_xy`:
/// `x = a s + b u`, `y = a s + b w` with `s`, `u`, `w` of disjoint support and
/// `a^2 = cos_xy`, `a^2 + b^2 = 1`.
fn planted_pair(rng: &mut impl Rng, base: u32, cos_xy: f64) -> (TermVector<f64>, TermVector<f64>) {
    let mut part = |offset: u32| -> Vec<(TermId, f64)> {
        let w: Vec<f64> = (0..SUPPORT).map(|_| rng.gen_range(0.5..1.5)).collect();
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter()
            .enumerate()
            .map(|(i, x)| (TermId(base + offset + i as u32), x / n))
            .collect()
    };
    let (s, u, w) = (part(0), part(SUPPORT), part(2 * SUPPORT));
    let a = cos_xy.sqrt();
    let b = (1.0 - cos_xy).sqrt();
    let mix = |other: &[(TermId, f64)]| {
        s.iter()
            .map(|&(t, x)| (t, a * x))
            .chain(other.iter().map(|&(t, x)| (t, b * x)))
            .collect::<Vec<_>>()
    };
    (
        TermVector::from_weights("x", mix(&u)).unwrap(),
        TermVector::from_weights("y", mix(&w)).unwrap(),
    )
}

fn cos_for_collision(p: f64) -> f64 {
    ((1.0 - p) * PI).cos()
}

#[test]
fn planted_pairs_have_the_requested_cosine() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for c in [0.1, 0.5, 0.95] {
        let (x, y) = planted_pair(&mut rng, 0, c);
        assert!((x.dot(&y) - c).abs() < 1e-12);
    }
}

#[test]
fn collision_rate_follows_the_angle() {
    let params = LshParams::new(64, 1, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for theta_frac in [0.1, 0.25, 0.4] {
        let cos_xy = (theta_frac * PI).cos();
        let (mut agree, mut total) = (0u64, 0u64);
        for pair in 0..10_000u32 {
            let (x, y) = planted_pair(&mut rng, pair * 3 * SUPPORT, cos_xy);
            let sx = signature(&x, 0, &params).bits;
            let sy = signature(&y, 0, &params).bits;
            agree += u64::from(64 - (sx ^ sy).count_ones());
            total += 64;
        }
        let measured = agree as f64 / total as f64;
        let expected = 1.0 - theta_frac;
        assert!(
            (measured - expected).abs() <= 0.02,
            "theta = {theta_frac} pi: collision {measured:.4}, expected {expected:.4}"
        );
    }
}

/// Fraction of trials in which the planted neighbour is not a candidate.
fn planted_miss_rate(trials: u64, distractors: usize, k: u32, tables: usize, cos_xy: f64) -> f64 {
    let mut missed = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let mut index = LshIndex::new(LshParams::new(k, tables, trial).unwrap());
        let (query, neighbour) = planted_pair(&mut rng, 0, cos_xy);
        for d in 0..distractors {
            let terms: Vec<(TermId, f64)> = (0..20)
                .map(|_| (TermId(rng.gen_range(0..5000)), rng.gen_range(0.1..1.0)))
                .collect();
            index
                .insert(TermVector::from_weights(format!("n{d}"), terms).unwrap())
                .unwrap();
        }
        index.insert(neighbour).unwrap();
        if !index.candidates(&query).iter().any(|c| c.doc_id() == "y") {
            missed += 1;
        }
    }
    missed as f64 / trials as f64
}

#[test]
fn planned_tables_bound_the_miss_rate() {
    let (phi, k) = (0.05, 13);
    let tables = plan_tables(phi, 0.9, k).unwrap();
    assert_eq!(tables, 11);
    let miss = planted_miss_rate(100, 500, k, tables, cos_for_collision(0.9));
    assert!(miss <= phi + 0.05, "miss rate {miss}");
    assert!(miss <= 0.07, "retrieved in only {:.0}% of trials", 100.0 * (1.0 - miss));
}

#[test]
fn recall_bound_is_per_hyperplane_not_per_cosine() {
    // cosine 0.9 is an angle of 0.144 pi; one table catches it with
    // probability 0.856^13 = 0.133, so 11 tables miss about 21% of the time
    let miss = planted_miss_rate(100, 100, 13, 11, 0.9);
    assert!((0.1..0.35).contains(&miss), "miss rate {miss}");
}

#[test]
fn a_single_table_misses_far_more_often() {
    // sanity check that the recall test can fail at all
    let miss = planted_miss_rate(40, 100, 13, 1, cos_for_collision(0.9));
    assert!(miss > 0.4, "miss rate {miss}");
}
