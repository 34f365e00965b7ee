//! Sparse data file in, training-ready matrix out.
//!
//! Parses the 1-based `label index:value` sparse format, maps the labels
//! onto {0, 1}, drops selected feature columns, and appends a constant bias
//! feature, mirroring what the `ingest` subcommand does on the command line.
//!
//! ```sh
//! cargo run --example ingest_libsvm
//! ```

use std::error::Error;

use dlagp::data::{parse_libsvm, preprocess, write_libsvm, LabelMap, RawDataset};
use dlagp::losses::{AggregateLoss, LossKind, Objective};

fn main() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("toy.libsvm");
    std::fs::write(
        &path,
        "+1 1:0.5 3:-1.25 4:2\n\
         -1 2:0.75 4:-0.5\n\
         +1 1:-0.25 2:1 3:0.5 4:1\n\
         -1 3:-0.75\n",
    )?;

    let raw = parse_libsvm(&path)?;
    println!(
        "parsed {} rows, {} feature columns (zeros filled in)",
        raw.len(),
        raw.dim
    );

    // -1 becomes 0, +1 stays 1; drop column 2; bias gets appended.
    let map: LabelMap = "-1=0,1=1".parse()?;
    let drop = [2usize].into_iter().collect();
    let ds = preprocess(&raw, &map, &drop)?;
    println!(
        "prepared {} examples of dimension {} (4 - 1 dropped + bias)",
        ds.len(),
        ds.dim()
    );
    assert_eq!(ds.dim(), 4);

    // The prepared matrix round-trips through the same sparse format.
    let prepared = RawDataset {
        labels: ds.points().iter().map(|p| p.y).collect(),
        features: ds.points().iter().map(|p| p.x.clone()).collect(),
        dim: ds.dim(),
    };
    let out = dir.path().join("prepared.libsvm");
    write_libsvm(&out, &prepared)?;
    println!("--- {}", out.display());
    print!("{}", std::fs::read_to_string(&out)?);

    // And it is immediately usable as an objective.
    let f = AggregateLoss::from_dataset(&ds, LossKind::BinaryCrossEntropy)?;
    let w0 = vec![0.0; ds.dim()];
    println!(
        "loss at the origin = {:.6}, smoothness = {:.4}",
        f.eval(&w0)?,
        f.smoothness()
    );
    Ok(())
}
