// Oracle code favors explicit index arithmetic over iterators.
#![allow(clippy::needless_range_loop)]

//! WEI/FI/II against independent recomputation, and the WEI bound
//! M <= WEI <= M + (1 - T).

use moma_core::features::accel::{AccelParams, AccelRig};
use moma_core::kinematics::DerivativeTrack;
use moma_core::timed::TimedSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rig_from_velocities(frames: &[Vec<[f64; 3]>], params: AccelParams<f64>) -> AccelRig<f64> {
    let tracks: Vec<DerivativeTrack<f64>> = frames
        .iter()
        .map(|joint_frames| {
            let mut s = TimedSeries::offline_fixed_rate(3, 100.0, 0.0).unwrap();
            for f in joint_frames {
                s.push_frame(f, None).unwrap();
            }
            DerivativeTrack { series: s, order: 1 }
        })
        .collect();
    AccelRig::new(tracks, params).unwrap()
}

#[test]
fn wei_matches_manual_evaluation_and_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let joints = 4;
    let frames = 50;
    for &threshold in &[0.0, 0.5, 1.0] {
        let velocity_frames: Vec<Vec<[f64; 3]>> = (0..joints)
            .map(|_| {
                (0..frames)
                    .map(|_| {
                        [
                            rng.random_range(-2.0..2.0),
                            rng.random_range(-2.0..2.0),
                            rng.random_range(-2.0..2.0),
                        ]
                    })
                    .collect()
            })
            .collect();
        let params = AccelParams {
            wei_threshold: threshold,
            ..AccelParams::for_rate(100.0)
        };
        let rig = rig_from_velocities(&velocity_frames, params);
        for f in 0..frames {
            // Independent recomputation straight from the velocity samples.
            let energies: Vec<f64> = velocity_frames
                .iter()
                .map(|joint| {
                    let v = joint[f];
                    0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
                })
                .collect();
            for (j, e) in energies.iter().enumerate() {
                assert_eq!(rig.joint_energy(j, f).unwrap(), *e);
            }
            let m = energies.iter().cloned().fold(f64::MIN, f64::max);
            let k = energies
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                .unwrap()
                .0;
            let mut contributions = 0.0;
            for (j, e) in energies.iter().enumerate() {
                if j != k {
                    contributions += (e / m) * ((1.0 - threshold) / (joints - 1) as f64);
                }
            }
            let expect = m + contributions;
            let got = rig.wei(f).unwrap();
            assert!(
                (got - expect).abs() <= 1e-12 * expect.max(1.0),
                "T={threshold} frame {f}: {got} vs {expect}"
            );
            assert!(got >= m);
            assert!(got <= m + (1.0 - threshold) + 1e-12);
        }
    }
}

#[test]
fn fluidity_and_impulsivity_match_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let joints = 4;
    let frames = 60;
    // Smooth velocities so jerk is well-behaved.
    let velocity_frames: Vec<Vec<[f64; 3]>> = (0..joints)
        .map(|_| {
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let amp: f64 = rng.random_range(0.5..2.0);
            (0..frames)
                .map(|i| {
                    let t = i as f64 / 100.0;
                    [
                        amp * (7.0 * t + phase).sin(),
                        amp * (5.0 * t + phase).cos(),
                        amp * (3.0 * t).sin(),
                    ]
                })
                .collect()
        })
        .collect();
    let params = AccelParams {
        impulse_lag: 10,
        ..AccelParams::for_rate(100.0)
    };
    let rig = rig_from_velocities(&velocity_frames, params);
    let dt = 1.0 / 100.0;
    for f in 11..frames - 1 {
        for j in 0..joints {
            // Independent jerk: three-point second difference of velocity.
            let (prev, cur, next) = (
                velocity_frames[j][f - 1],
                velocity_frames[j][f],
                velocity_frames[j][f + 1],
            );
            let jerk: Vec<f64> = (0..3)
                .map(|d| (next[d] - 2.0 * cur[d] + prev[d]) / (dt * dt))
                .collect();
            let denom = (jerk[0] * jerk[0] + jerk[1] * jerk[1] + jerk[2] * jerk[2]).max(1e-9);
            let fi = rig.fluidity(j, f).unwrap();
            assert!(
                (fi - 1.0 / denom).abs() <= 1e-9 * (1.0 / denom),
                "joint {j} frame {f}"
            );
            assert!(fi > 0.0);

            // Impulsivity: (1/FI) * WEI(f) / WEI(f - lag).
            let past = rig.wei(f - 10).unwrap();
            let ii = rig.impulsivity(j, f).unwrap();
            if past < 1e-9 {
                assert!(ii.is_none());
            } else {
                let expect = (1.0 / fi) * rig.wei(f).unwrap() / past;
                let got = ii.unwrap();
                assert!(
                    (got - expect).abs() <= 1e-9 * expect.abs().max(1e-12),
                    "joint {j} frame {f}: {got} vs {expect}"
                );
                assert!(got >= 0.0);
            }
        }
    }
}

#[test]
fn wei_scale_consistency() {
    // Scaling all velocities by s scales M by s^2 and leaves each C_i
    // unchanged (the J_i/M ratios are invariant).
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let joints = 4;
    let base: Vec<Vec<[f64; 3]>> = (0..joints)
        .map(|_| {
            (0..10)
                .map(|_| {
                    [
                        rng.random_range(0.1..1.0),
                        rng.random_range(0.1..1.0),
                        rng.random_range(0.1..1.0),
                    ]
                })
                .collect()
        })
        .collect();
    let scaled: Vec<Vec<[f64; 3]>> = base
        .iter()
        .map(|joint| {
            joint
                .iter()
                .map(|v| [3.0 * v[0], 3.0 * v[1], 3.0 * v[2]])
                .collect()
        })
        .collect();
    let params = AccelParams {
        wei_threshold: 0.25,
        ..AccelParams::for_rate(100.0)
    };
    let rig_a = rig_from_velocities(&base, params);
    let rig_b = rig_from_velocities(&scaled, params);
    for f in 0..10 {
        let m_a = (0..joints)
            .map(|j| rig_a.joint_energy(j, f).unwrap())
            .fold(f64::MIN, f64::max);
        let m_b = (0..joints)
            .map(|j| rig_b.joint_energy(j, f).unwrap())
            .fold(f64::MIN, f64::max);
        assert!((m_b - 9.0 * m_a).abs() <= 1e-9 * m_b.max(1.0));
        let c_a = rig_a.wei(f).unwrap() - m_a;
        let c_b = rig_b.wei(f).unwrap() - m_b;
        assert!((c_a - c_b).abs() <= 1e-9, "frame {f}: {c_a} vs {c_b}");
    }
}
