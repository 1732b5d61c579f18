//! Windowed effort features against brute-force window oracles, weight
//! linearity, and the monotonicity properties of the space features.

use moma_core::features::effort::{
    covered_area, covered_distance, flow_effort, kinetic_energy, space_effort, time_effort,
    weight_effort,
};
use moma_core::features::JointWeights;
use moma_core::kinematics::{acceleration, jerk_magnitude, jerk_vector, velocity};
use moma_core::math::Axis;
use moma_core::timed::TimedSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const JOINTS: usize = 3;

/// Smooth random motion: sums of sinusoids per coordinate.
fn random_motion(rng: &mut ChaCha8Rng, rate: f64, frames: usize) -> TimedSeries<f64> {
    let mut params = Vec::new();
    for _ in 0..JOINTS * 3 {
        let terms: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| {
                (
                    rng.random_range(0.1..1.0),
                    rng.random_range(0.3..2.5),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        params.push(terms);
    }
    let mut s = TimedSeries::offline_fixed_rate(3 * JOINTS, rate, 0.0).unwrap();
    for i in 0..frames {
        let t = i as f64 / rate;
        let column: Vec<f64> = params
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|(a, f, p)| a * (std::f64::consts::TAU * f * t + p).sin())
                    .sum()
            })
            .collect();
        s.push_frame(&column, None).unwrap();
    }
    s
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn windowed_features_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rate = 50.0;
    let frames = 120;
    let positions = random_motion(&mut rng, rate, frames);
    let weights = JointWeights::new(vec![0.5, 0.3, 0.2]).unwrap();
    let window = 13usize;

    let velocities: Vec<_> = (0..JOINTS).map(|n| velocity(&positions, n).unwrap()).collect();
    let energy = kinetic_energy(&velocities, &weights).unwrap();

    // Energy oracle: recompute directly from velocity frames.
    for i in 0..frames {
        let mut total = 0.0;
        for (k, v) in velocities.iter().enumerate() {
            let v = v.vec3(i).unwrap();
            let e = v.x * v.x + v.y * v.y + v.z * v.z;
            assert!(close(energy.per_joint[k].value(0, i).unwrap(), e, 1e-12));
            total += weights.get(k) * e;
        }
        assert!(close(energy.whole_body.value(0, i).unwrap(), total, 1e-12));
    }

    // Weight effort: brute-force trailing max.
    let we = weight_effort(&energy.whole_body, window).unwrap();
    for i in 0..frames {
        let lo = (i + 1).saturating_sub(window);
        let expect = (lo..=i)
            .map(|j| energy.whole_body.value(0, j).unwrap())
            .fold(f64::MIN, f64::max);
        assert!(close(we.value(0, i).unwrap(), expect, 1e-9), "frame {i}");
    }

    // Time effort: brute-force windowed mean of acceleration magnitudes.
    let accels: Vec<_> = (0..JOINTS)
        .map(|n| acceleration(&positions, n).unwrap())
        .collect();
    let te = time_effort(&accels, &weights, window).unwrap();
    for i in 0..frames {
        let lo = (i + 1).saturating_sub(window);
        let mut total = 0.0;
        for (k, a) in accels.iter().enumerate() {
            let mean: f64 = (lo..=i)
                .map(|j| a.vec3(j).unwrap().norm())
                .sum::<f64>()
                / (i - lo + 1) as f64;
            assert!(close(te.per_joint[k].value(0, i).unwrap(), mean, 1e-9));
            total += weights.get(k) * mean;
        }
        assert!(close(te.whole_body.value(0, i).unwrap(), total, 1e-9), "frame {i}");
    }

    // Flow effort: brute-force windowed mean of jerk magnitudes.
    let mags: Vec<_> = (0..JOINTS)
        .map(|n| jerk_magnitude(&jerk_vector(&positions, n).unwrap()).unwrap())
        .collect();
    let fe = flow_effort(&mags, &weights, window).unwrap();
    for i in 0..frames {
        let lo = (i + 1).saturating_sub(window);
        let mut total = 0.0;
        for (k, m) in mags.iter().enumerate() {
            let mean: f64 = (lo..=i)
                .map(|j| m.series.value(0, j).unwrap())
                .sum::<f64>()
                / (i - lo + 1) as f64;
            total += weights.get(k) * mean;
        }
        assert!(close(fe.whole_body.value(0, i).unwrap(), total, 1e-9), "frame {i}");
    }
}

#[test]
fn space_effort_brute_force_and_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let rate = 30.0;
    let frames = 90;
    let window = 9usize;
    for case in 0..50 {
        let positions = random_motion(&mut rng, rate, frames);
        let weights = JointWeights::uniform(1).unwrap();
        let se = space_effort(&positions, &[1], &weights, window, 1e-6).unwrap();
        for i in 0..frames {
            let lo = (i + 1).saturating_sub(window);
            let got = se.whole_body.value(0, i).unwrap();
            if i == lo {
                assert!(got.is_nan());
                continue;
            }
            let at = |j: usize| {
                let f = positions.frame(j).unwrap();
                [f[3], f[4], f[5]]
            };
            let dist = |a: [f64; 3], b: [f64; 3]| {
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
            };
            let path: f64 = (lo + 1..=i).map(|j| dist(at(j), at(j - 1))).sum();
            let net = dist(at(i), at(lo));
            if net < 1e-6 {
                assert!(got.is_nan(), "case {case} frame {i}");
            } else {
                let expect = path / net;
                assert!(close(got, expect, 1e-9), "case {case} frame {i}: {got} vs {expect}");
                // Triangle inequality up to rounding.
                assert!(got >= 1.0 - 1e-12, "case {case} frame {i}: {got}");
            }
        }
    }
}

#[test]
fn weight_effort_monotone_in_window_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let positions = random_motion(&mut rng, 50.0, 100);
    let weights = JointWeights::new(vec![0.4, 0.4, 0.2]).unwrap();
    let velocities: Vec<_> = (0..JOINTS).map(|n| velocity(&positions, n).unwrap()).collect();
    let energy = kinetic_energy(&velocities, &weights).unwrap().whole_body;
    let small = weight_effort(&energy, 5).unwrap();
    let large = weight_effort(&energy, 20).unwrap();
    for i in 0..energy.len() {
        assert!(large.value(0, i).unwrap() >= small.value(0, i).unwrap(), "frame {i}");
    }
}

#[test]
fn aggregates_linear_in_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let positions = random_motion(&mut rng, 50.0, 80);
    let velocities: Vec<_> = (0..JOINTS).map(|n| velocity(&positions, n).unwrap()).collect();
    let w1 = JointWeights::new(vec![0.2, 0.3, 0.5]).unwrap();
    let w2 = JointWeights::new(vec![0.4, 0.3, 0.3]).unwrap();
    let e1 = kinetic_energy(&velocities, &w1).unwrap();
    let e2 = kinetic_energy(&velocities, &w2).unwrap();
    for i in 0..e1.whole_body.len() {
        // Doubling joint 0's share (0.2 -> 0.4) at joint 2's expense changes
        // the aggregate by the closed-form difference.
        let delta = 0.2 * e1.per_joint[0].value(0, i).unwrap()
            - 0.2 * e1.per_joint[2].value(0, i).unwrap();
        let got = e2.whole_body.value(0, i).unwrap() - e1.whole_body.value(0, i).unwrap();
        assert!(close(got, delta, 1e-9), "frame {i}: {got} vs {delta}");
    }
}

#[test]
fn covered_features_match_brute_force_prefixes() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let positions = random_motion(&mut rng, 25.0, 60);
    let dist = covered_distance(&positions, 0, Axis::Z).unwrap();
    let area = covered_area(&positions, 0, Axis::Z).unwrap();

    let ground: Vec<(f64, f64)> = (0..60)
        .map(|i| {
            let f = positions.frame(i).unwrap();
            (f[0], f[1])
        })
        .collect();

    let mut acc = 0.0;
    for i in 0..60 {
        if i > 0 {
            let (du, dv) = (ground[i].0 - ground[i - 1].0, ground[i].1 - ground[i - 1].1);
            acc += (du * du + dv * dv).sqrt();
        }
        assert!(close(dist.value(0, i).unwrap(), acc, 1e-12), "frame {i}");

        // Prefix hull area via the brute-force oracle.
        let prefix: Vec<moma_core::geometry::GroundPoint<f64>> = ground[..=i]
            .iter()
            .map(|(u, v)| moma_core::geometry::GroundPoint::new(*u, *v))
            .collect();
        let hull = moma_core::geometry::convex_hull(&prefix);
        let expect = moma_core::geometry::polygon_area(&hull);
        assert!(
            close(area.value(0, i).unwrap(), expect, 1e-9),
            "frame {i}: {} vs {expect}",
            area.value(0, i).unwrap()
        );
    }
}
