//! Linear intention-to-act classifier over the classifier vector.
//!
//! The engagement score is the logistic of the linear margin `W·G + bias`,
//! so it lies in `[0, 1]` and is strictly monotone in the margin. Training is
//! subgradient descent on the L2-regularized hinge loss.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::features::{extract_features, evaluate_bank, ClassifierVector, FeatureError, ThresholdConfig, BANK_SIZE};
use crate::skeleton::suite::GamePhase;
use crate::skeleton::Frame;

#[derive(Debug, Error, PartialEq)]
pub enum IntentError {
    #[error("training data must contain both labels")]
    DegenerateData,
    #[error("{frames} frames but {labels} labels")]
    LengthMismatch { frames: usize, labels: usize },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("line {line}: {message}")]
    ModelFile { line: usize, message: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Engagement score in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EngagementScore(f64);

impl EngagementScore {
    pub fn new(value: f64) -> Option<Self> {
        (0.0..=1.0).contains(&value).then_some(EngagementScore(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntentModel {
    pub weights: [f64; BANK_SIZE],
    pub bias: f64,
    pub threshold: f64,
}

impl Default for IntentModel {
    fn default() -> Self {
        IntentModel {
            weights: [0.0; BANK_SIZE],
            bias: 0.0,
            threshold: 0.5,
        }
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl IntentModel {
    pub fn validate(&self) -> Result<(), IntentError> {
        if !self.weights.iter().all(|w| w.is_finite()) || !self.bias.is_finite() {
            return Err(IntentError::InvalidModel("non-finite weight or bias".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(IntentError::InvalidModel(format!(
                "threshold {} outside (0, 1)",
                self.threshold
            )));
        }
        Ok(())
    }

    pub fn margin(&self, g: ClassifierVector) -> f64 {
        let terms = || {
            self.weights
                .iter()
                .zip(g.iter())
                .filter(|(_, b)| *b)
                .map(|(w, _)| *w)
                .chain([self.bias])
        };
        let sum: f64 = terms().sum();
        if sum.is_finite() {
            return sum;
        }
        // Overflowed partway; sum at a smaller scale so cancelling terms
        // still cancel.
        let scale = terms().fold(0.0f64, |m, w| m.max(w.abs()));
        terms().map(|w| w / scale).sum::<f64>() * scale
    }

    pub fn score(&self, g: ClassifierVector) -> EngagementScore {
        EngagementScore(logistic(self.margin(g)))
    }

    pub fn classify(&self, s: EngagementScore) -> bool {
        s.value() >= self.threshold
    }

    /// Score and decision in one call.
    pub fn intent(&self, g: ClassifierVector) -> (EngagementScore, bool) {
        let s = self.score(g);
        (s, self.classify(s))
    }

    /// `w<i> <value>` for each weight, then `bias` and `threshold`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("w{i} {w}\n"));
        }
        out.push_str(&format!("bias {}\nthreshold {}\n", self.bias, self.threshold));
        out
    }

    pub fn from_text(text: &str) -> Result<Self, IntentError> {
        let mut weights = [None; BANK_SIZE];
        let mut bias = None;
        let mut threshold = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| IntentError::ModelFile { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut toks = content.split_whitespace();
            let key = toks.next().unwrap_or_default();
            let value: f64 = toks
                .next()
                .ok_or_else(|| err(format!("missing value for `{key}`")))?
                .parse()
                .map_err(|_| err(format!("invalid value for `{key}`")))?;
            if toks.next().is_some() {
                return Err(err("trailing tokens".into()));
            }
            let slot = match key {
                "bias" => &mut bias,
                "threshold" => &mut threshold,
                _ => {
                    let i: usize = key
                        .strip_prefix('w')
                        .and_then(|s| s.parse().ok())
                        .filter(|&i| i < BANK_SIZE)
                        .ok_or_else(|| err(format!("unknown key `{key}`")))?;
                    &mut weights[i]
                }
            };
            if slot.replace(value).is_some() {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        let missing = |what: String| IntentError::ModelFile {
            line: 0,
            message: format!("missing `{what}`"),
        };
        let mut w = [0.0; BANK_SIZE];
        for (i, slot) in weights.iter().enumerate() {
            w[i] = slot.ok_or_else(|| missing(format!("w{i}")))?;
        }
        let model = IntentModel {
            weights: w,
            bias: bias.ok_or_else(|| missing("bias".into()))?,
            threshold: threshold.ok_or_else(|| missing("threshold".into()))?,
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub epochs: usize,
    /// Initial step size, decayed as `learning_rate / epoch` (1-based).
    pub learning_rate: f64,
    pub lambda: f64,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            epochs: 50,
            learning_rate: 0.1,
            lambda: 1e-4,
            seed: 42,
            threshold: 0.5,
        }
    }
}

/// Fits a linear max-margin model. Deterministic for fixed data, seed and
/// hyperparameters.
pub fn train(data: &[(ClassifierVector, bool)], hp: &Hyperparams) -> Result<IntentModel, IntentError> {
    let positives = data.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == data.len() {
        return Err(IntentError::DegenerateData);
    }
    let xs: Vec<[f64; BANK_SIZE]> = data
        .iter()
        .map(|(g, _)| std::array::from_fn(|i| if g.get(i) { 1.0 } else { 0.0 }))
        .collect();
    let ys: Vec<f64> = data.iter().map(|(_, y)| if *y { 1.0 } else { -1.0 }).collect();

    let mut w = [0.0; BANK_SIZE];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    for epoch in 1..=hp.epochs {
        let eta = hp.learning_rate / epoch as f64;
        order.shuffle(&mut rng);
        for &k in &order {
            let x = &xs[k];
            let y = ys[k];
            let margin = y * (w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b);
            let shrink = 1.0 - eta * hp.lambda;
            if margin < 1.0 {
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi = *wi * shrink + eta * y * xi;
                }
                b += eta * y;
            } else {
                for wi in w.iter_mut() {
                    *wi *= shrink;
                }
            }
        }
    }
    let model = IntentModel {
        weights: w,
        bias: b,
        threshold: hp.threshold,
    };
    model.validate()?;
    Ok(model)
}

/// Fraction of samples whose decision matches the label.
pub fn accuracy(model: &IntentModel, data: &[(ClassifierVector, bool)]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let correct = data
        .iter()
        .filter(|(g, y)| model.intent(*g).1 == *y)
        .count();
    correct as f64 / data.len() as f64
}

/// Labels each frame's classifier vector with whether its game phase is
/// `Play`.
pub fn build_training_set(
    frames: &[Frame],
    phases: &[GamePhase],
    cfg: &ThresholdConfig,
) -> Result<Vec<(ClassifierVector, bool)>, IntentError> {
    if frames.len() != phases.len() {
        return Err(IntentError::LengthMismatch {
            frames: frames.len(),
            labels: phases.len(),
        });
    }
    let mut out = Vec::with_capacity(frames.len());
    let mut prev: std::collections::HashMap<u32, &Frame> = Default::default();
    for (frame, phase) in frames.iter().zip(phases) {
        let features = extract_features(frame, prev.get(&frame.user_id).copied(), cfg)?;
        prev.insert(frame.user_id, frame);
        out.push((evaluate_bank(&features, cfg), *phase == GamePhase::Play));
    }
    Ok(out)
}
