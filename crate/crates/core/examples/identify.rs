//! DCT features plus a nearest-neighbour classifier on a synthetic corpus,
//! or on an ORL tree when a directory is given.
//!
//!     cargo run --release -p tdface --example identify [ORL_DIR]

use tdface::classifiers::Metric;
use tdface::dataset::{load_orl, split_first_k, synth_corpus};
use tdface::eval::{run_experiment, ClassifierSpec, FeatureSpec};
use tdface::transforms::{TransformKind, ZonalMask};
use tdface::Execution;

fn main() -> tdface::Result<()> {
    let exec = Execution::default();
    let corpus = match std::env::args().nth(1) {
        Some(dir) => load_orl(dir, exec)?,
        None => synth_corpus(0, 40, 10, 112, 92)?,
    };
    let split = split_first_k(&corpus, 5)?;
    let feature = FeatureSpec::masked(TransformKind::Dct, ZonalMask::rectangular(10)?);
    let nn = ClassifierSpec::Nn { metric: Metric::Mad };
    let result = run_experiment(&split, &feature, &nn, exec)?;
    println!(
        "{} / {}: {:.1}% of {} probes",
        result.feature,
        result.classifier,
        result.identification_rate,
        result.outcomes.len()
    );
    Ok(())
}
