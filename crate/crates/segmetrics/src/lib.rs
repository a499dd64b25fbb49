//! Segmentation evaluation: pixel confusion matrices, class-subset mIoU and
//! the two checkpoint-selection rules (best target performance vs. clean
//! source-validation selection).

mod checkpoint;

pub use checkpoint::{select_checkpoint, CheckpointEntry, CheckpointLog, SelectionMode};

use imgcore::Image;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("metric undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Label value excluded from every count.
pub const IGNORE_INDEX: u8 = 255;

/// K x K pixel counts; `counts[truth][pred]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    num_classes: usize,
    counts: Vec<u64>,
    ignore_index: u8,
}

/// Per-class IoU plus the subset mean.
#[derive(Debug, Clone, Serialize)]
pub struct MiouReport {
    /// IoU per evaluated class; `None` where the denominator is zero.
    pub per_class: Vec<(usize, Option<f64>)>,
    pub miou: f64,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize) -> Self {
        Self {
            num_classes,
            counts: vec![0; num_classes * num_classes],
            ignore_index: IGNORE_INDEX,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn count(&self, truth: usize, pred: usize) -> u64 {
        self.counts[truth * self.num_classes + pred]
    }

    pub fn set_count(&mut self, truth: usize, pred: usize, value: u64) {
        self.counts[truth * self.num_classes + pred] = value;
    }

    /// Accumulate one truth/prediction pair of single-channel label maps.
    /// Pixels whose truth or prediction equals the ignore index are skipped;
    /// any other label at or above `num_classes` is an error.
    pub fn accumulate(&mut self, truth: &Image, pred: &Image) -> Result<()> {
        if truth.channels() != 1 || pred.channels() != 1 {
            return Err(MetricsError::InvalidInput("label maps must be single channel".into()));
        }
        if truth.width() != pred.width() || truth.height() != pred.height() {
            return Err(MetricsError::InvalidInput(format!(
                "dimension mismatch: truth {}x{}, prediction {}x{}",
                truth.width(),
                truth.height(),
                pred.width(),
                pred.height()
            )));
        }
        for (&t, &p) in truth.samples().iter().zip(pred.samples()) {
            if t == self.ignore_index || p == self.ignore_index {
                continue;
            }
            if t as usize >= self.num_classes || p as usize >= self.num_classes {
                return Err(MetricsError::InvalidInput(format!(
                    "label {} outside 0..{}",
                    t.max(p),
                    self.num_classes
                )));
            }
            self.counts[t as usize * self.num_classes + p as usize] += 1;
        }
        Ok(())
    }

    /// Merge another matrix (partial accumulation from another worker).
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if self.num_classes != other.num_classes {
            return Err(MetricsError::InvalidInput("class count mismatch in merge".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// IoU per class and the mean over the subset (default: all classes).
    /// Classes with an empty denominator are excluded from the mean.
    pub fn miou(&self, class_subset: Option<&[usize]>) -> Result<MiouReport> {
        let classes: Vec<usize> = match class_subset {
            Some(subset) => {
                if subset.is_empty() {
                    return Err(MetricsError::Undefined("empty class subset".into()));
                }
                for &c in subset {
                    if c >= self.num_classes {
                        return Err(MetricsError::InvalidInput(format!(
                            "class {c} outside 0..{}",
                            self.num_classes
                        )));
                    }
                }
                subset.to_vec()
            }
            None => (0..self.num_classes).collect(),
        };
        let mut per_class = Vec::with_capacity(classes.len());
        let mut sum = 0.0;
        let mut evaluated = 0usize;
        for &c in &classes {
            let tp = self.count(c, c);
            let fp: u64 = (0..self.num_classes).filter(|&t| t != c).map(|t| self.count(t, c)).sum();
            let fn_: u64 =
                (0..self.num_classes).filter(|&p| p != c).map(|p| self.count(c, p)).sum();
            let denom = tp + fp + fn_;
            if denom == 0 {
                per_class.push((c, None));
            } else {
                let iou = tp as f64 / denom as f64;
                per_class.push((c, Some(iou)));
                sum += iou;
                evaluated += 1;
            }
        }
        if evaluated == 0 {
            return Err(MetricsError::Undefined(
                "every class in the subset has an empty denominator".into(),
            ));
        }
        Ok(MiouReport { per_class, miou: sum / evaluated as f64 })
    }
}
