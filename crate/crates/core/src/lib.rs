//! Streaming first-story detection.
//!
//! Documents flow through [`textprep`] into an incrementally updated TF-IDF
//! [`vecspace`], are hashed into a multi-table random-hyperplane
//! [`lshindex`], and the [`detector`] labels each one novel or redundant from
//! its minimum cosine distance to the retrieved candidates. [`evaluation`]
//! scores verdicts against ground truth with miss/false-alarm rates, DET
//! curves and the normalized detection cost; [`streamio`] handles the
//! line-delimited file formats and synthetic test streams.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix it to `f64`.

pub mod detector;
pub mod evaluation;
pub mod lshindex;
pub mod scalar;
pub mod streamio;
pub mod textprep;
pub mod vecspace;

pub use detector::{
    run_stream, run_stream_exhaustive, score, Detector, DetectorConfig, DetectorError, Verdict,
    WeightingMode,
};
pub use evaluation::{
    confusion, cost_norm, det_curve, probit, write_det_csv, CostParams, DetCurve, DetPoint,
    ErrorRates, EvalError, Truth,
};
pub use lshindex::{
    plan_tables, signature, ExhaustiveIndex, LshError, LshIndex, LshParams, NeighborIndex,
    Signature,
};
pub use scalar::Scalar;
pub use streamio::{
    generate_synthetic, join_truth, read_stream, read_verdicts, write_stream, write_verdicts,
    Document, StreamError, SynthConfig,
};
pub use textprep::{preprocess, stem, tokenize, Stoplist, TokenBag};
pub use vecspace::{cosine, TermId, TermVector, VecSpaceError, VectorSpaceState, Vocabulary};

pub type TermVector64 = TermVector<f64>;
pub type TermVector32 = TermVector<f32>;
pub type Verdict64 = Verdict<f64>;
pub type DetectorConfig64 = DetectorConfig<f64>;
pub type LshDetector64 = Detector<f64, LshIndex<f64>>;
pub type OracleDetector64 = Detector<f64, ExhaustiveIndex<f64>>;
pub type CostParams64 = CostParams<f64>;
pub type DetCurve64 = DetCurve<f64>;
pub type DetPoint64 = DetPoint<f64>;
