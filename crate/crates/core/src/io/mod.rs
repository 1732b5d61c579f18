//! File formats: BVH input, `.lab` label files, CSV feature tables.

pub mod bvh;
pub mod csv;
pub mod lab;

pub use bvh::{parse_bvh, RawBvh};
pub use csv::{export_feature_csv, parse_feature_csv};
pub use lab::{read_labels, write_labels, Label};
