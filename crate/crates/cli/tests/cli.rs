//! End-to-end runs of the `moma` binary against the shipped demo assets.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .unwrap()
        .to_path_buf()
}

fn moma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moma"))
        .args(args)
        .current_dir(repo_root())
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("moma-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn extract_demo_features_to_csv() {
    let out = tmp("extract.csv");
    let result = moma(&[
        "extract",
        "assets/demo_walk.bvh",
        "--features",
        "com,weight_effort:0.5,covered_distance,wei",
        "--segments",
        "configs/segments_demo.txt",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "time,com_x,com_y,com_z,weight_effort_0.5,covered_distance,wei"
    );
    // One row per frame of the 300-frame demo.
    assert_eq!(csv.lines().count(), 301);
}

#[test]
fn extract_is_deterministic() {
    let (a, b) = (tmp("det_a.csv"), tmp("det_b.csv"));
    for out in [&a, &b] {
        let result = moma(&[
            "extract",
            "assets/demo_walk.bvh",
            "--features",
            "kinetic_energy,flow_effort:0.25",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn unknown_feature_exits_2() {
    let result = moma(&[
        "extract",
        "assets/demo_walk.bvh",
        "--features",
        "not_a_feature",
        "-o",
        tmp("unused.csv").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn unreadable_input_exits_1() {
    let result = moma(&[
        "extract",
        "no/such/file.bvh",
        "--features",
        "com",
        "-o",
        tmp("unused2.csv").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn balance_labels_written() {
    let csv = tmp("balance.csv");
    let lab = tmp("balance.lab");
    let result = moma(&[
        "extract",
        "assets/demo_walk.bvh",
        "--features",
        "balance,continuous_balance",
        "--segments",
        "configs/segments_demo.txt",
        "--labels",
        lab.to_str().unwrap(),
        "-o",
        csv.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    let labels = std::fs::read_to_string(&lab).unwrap();
    assert!(!labels.is_empty());
    for line in labels.lines() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(fields.len(), 3);
        assert!(["balanced", "off_balance", "airborne"].contains(&fields[2]));
    }
}

#[test]
fn template_build_and_self_match() {
    let template = tmp("gesture.tpl");
    let result = moma(&[
        "template",
        "build",
        "--defs",
        "configs/relational40.txt",
        "assets/demo_walk.bvh",
        "assets/demo_walk.bvh",
        "-o",
        template.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    let text = std::fs::read_to_string(&template).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(header, vec!["40", "300", "0.1", "0.9"]);

    // Self-match finds at least one interval.
    let lab = tmp("match.lab");
    let result = moma(&[
        "template",
        "match",
        template.to_str().unwrap(),
        "assets/demo_walk.bvh",
        "--defs",
        "configs/relational40.txt",
        "--threshold",
        "0.1",
        "-o",
        lab.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    let labels = std::fs::read_to_string(&lab).unwrap();
    assert!(!labels.trim().is_empty(), "self-match produced no intervals");
    assert!(labels.lines().all(|l| l.ends_with("gesture")));

    // Threshold zero: strict inequality, empty label file.
    let empty = tmp("empty.lab");
    let result = moma(&[
        "template",
        "match",
        template.to_str().unwrap(),
        "assets/demo_walk.bvh",
        "--defs",
        "configs/relational40.txt",
        "--threshold",
        "0",
        "-o",
        empty.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), "");
}

#[test]
fn stream_rejects_bad_configs() {
    // No features enabled.
    let config = tmp("no_features.conf");
    std::fs::write(&config, "listen_port 0\nemit_port 9999\nnodes 2\n").unwrap();
    let result = moma(&["stream", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));

    // Occupied port.
    let holder = std::net::UdpSocket::bind("0.0.0.0:0").unwrap();
    let port = holder.local_addr().unwrap().port();
    let config = tmp("busy_port.conf");
    std::fs::write(
        &config,
        format!("listen_port {port}\nemit_port 9999\nnodes 2\nfeature covered_distance\n"),
    )
    .unwrap();
    let result = moma(&["stream", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn postural_load_with_table() {
    let out = tmp("load.csv");
    let result = moma(&[
        "extract",
        "assets/demo_walk.bvh",
        "--features",
        "postural_load,sphereness",
        "--segments",
        "configs/segments_demo.txt",
        "--discomfort",
        "configs/discomfort_demo.txt",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("time,postural_load,sphereness_0,sphereness_1\n"));
    // Postural load is a sum of non-negative spline scores here.
    for line in csv.lines().skip(1) {
        let load: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(load >= 0.0);
    }
}
