//! Ring/offline equivalence and time-query invariants, checked against a
//! plain offline shadow copy fed the same pushes.

use moma_core::timed::TimedSeries;
use proptest::prelude::*;

/// Push the same frames into a ring and an offline shadow; the ring's
/// materialization must equal the shadow's trailing `capacity` frames.
fn check_shadow(capacity: usize, frames: &[Vec<f64>], stamped: bool) {
    let dims = frames.first().map(Vec::len).unwrap_or(1);
    let (mut ring, mut shadow) = if stamped {
        (
            TimedSeries::ring_stamped(dims, capacity).unwrap(),
            TimedSeries::offline_stamped(dims),
        )
    } else {
        (
            TimedSeries::ring_fixed_rate(dims, capacity, 120.0, 0.25).unwrap(),
            TimedSeries::offline_fixed_rate(dims, 120.0, 0.25).unwrap(),
        )
    };
    for (i, frame) in frames.iter().enumerate() {
        let t = stamped.then_some(0.1 + i as f64 * 0.01);
        ring.push_frame(frame, t).unwrap();
        shadow.push_frame(frame, t).unwrap();
    }
    let skip = frames.len().saturating_sub(capacity);
    let materialized = ring.to_offline();
    assert_eq!(materialized.len(), frames.len() - skip);
    for i in 0..materialized.len() {
        assert_eq!(materialized.frame(i).unwrap(), shadow.frame(skip + i).unwrap());
        assert_eq!(
            materialized.time_of_index(i).unwrap(),
            shadow.time_of_index(skip + i).unwrap()
        );
        // Same queries answered identically by the ring itself.
        assert_eq!(ring.frame(i).unwrap(), shadow.frame(skip + i).unwrap());
        assert_eq!(
            ring.time_of_index(i).unwrap(),
            shadow.time_of_index(skip + i).unwrap()
        );
    }
}

proptest! {
    #[test]
    fn ring_matches_offline_shadow(
        capacity in 1usize..12,
        frame_count in 0usize..40,
        stamped in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let frames: Vec<Vec<f64>> = (0..frame_count)
            .map(|_| (0..3).map(|_| next() * 10.0 - 5.0).collect())
            .collect();
        check_shadow(capacity, &frames, stamped);
    }

    #[test]
    fn time_of_index_strictly_increasing(
        frame_count in 2usize..60,
        fixed in any::<bool>(),
    ) {
        let mut s = if fixed {
            TimedSeries::offline_fixed_rate(1, 91.0, -1.5).unwrap()
        } else {
            TimedSeries::offline_stamped(1)
        };
        for i in 0..frame_count {
            // Irregular but strictly increasing stamps.
            let t = i as f64 * 0.013 + (i % 3) as f64 * 0.001;
            s.push_frame(&[i as f64], (!fixed).then_some(t)).unwrap();
        }
        for i in 1..frame_count {
            prop_assert!(s.time_of_index(i).unwrap() > s.time_of_index(i - 1).unwrap());
        }
        // Nearest-index round trip through every stored frame time.
        for i in 0..frame_count {
            let t = s.time_of_index(i).unwrap();
            prop_assert_eq!(s.index_at_time(t).unwrap(), i);
        }
    }

    #[test]
    fn window_of_ring_spans_eviction(
        capacity in 2usize..10,
        extra in 1usize..20,
    ) {
        // Fill past capacity so the physical layout wraps, then window the
        // whole retained range: contents must be chronological.
        let mut ring = TimedSeries::ring_fixed_rate(1, capacity, 100.0, 0.0).unwrap();
        let total = capacity + extra;
        for i in 0..total {
            ring.push_frame(&[i as f64], None).unwrap();
        }
        let w = ring.window(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        prop_assert_eq!(w.len(), capacity);
        for i in 0..capacity {
            prop_assert_eq!(w.value(0, i).unwrap(), (extra + i) as f64);
        }
    }
}

#[test]
fn fixed_rate_ring_time_model_advances_start() {
    let mut ring = TimedSeries::ring_fixed_rate(2, 3, 50.0, 1.0).unwrap();
    for i in 0..7 {
        ring.push_frame(&[i as f64, 0.0], None).unwrap();
    }
    // 4 evictions: logical frame 0 is absolute frame 4 at t = 1 + 4/50.
    assert_eq!(ring.time_of_index(0).unwrap(), 1.0 + 4.0 / 50.0);
    match ring.time_model() {
        moma_core::timed::TimeModel::FixedRate { frame_rate, start } => {
            assert_eq!(frame_rate, 50.0);
            assert_eq!(start, 1.0 + 4.0 / 50.0);
        }
        _ => panic!("expected fixed rate"),
    }
}
