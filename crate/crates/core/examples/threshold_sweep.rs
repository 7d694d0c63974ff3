//! F1 against the detection threshold on a noisy, detector-like corpus.

use blurtrack::eval::{threshold_sweep, EvalConfig};
use blurtrack::extract::DetectParams;
use blurtrack::io::report::sweep_text;
use blurtrack::synth::{detection_corpus, rng, CorpusConfig};

pub fn run() -> Vec<f64> {
    let corpus = detection_corpus(&CorpusConfig::default(), &mut rng(2024)).expect("valid corpus");
    let deltas: Vec<f64> = (3..=9).map(|k| k as f64 / 10.0).collect();
    let rows = threshold_sweep(
        &corpus,
        &deltas,
        &DetectParams::default(),
        &EvalConfig::default(),
    );
    print!("{}", sweep_text(&rows));
    rows.iter().map(|r| r.report.f1).collect()
}

#[allow(dead_code)]
fn main() {
    run();
}
