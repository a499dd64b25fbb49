//! Deterministic image augmentation catalog with seeded pipelines and
//! sub-policy tables.
//!
//! Pipelines are declarative JSON documents. Every stage fires with its own
//! probability, and each (image, stage) pair draws from a substream derived
//! from the master seed and the image's index, so outputs do not depend on
//! batch composition, processing order or worker count.

pub mod canny;
pub mod color;
pub mod geometry;
pub mod params;
pub mod pointops;
pub mod policy;
pub mod texture;
pub mod weather;

pub use params::*;
pub use policy::{apply_policy, Policy, PolicyOp};

use imgcore::{Image, RngStream};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AugError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Image(#[from] imgcore::ImageError),
}

pub type Result<T> = std::result::Result<T, AugError>;

/// One augmentation with its parameter record.
#[derive(Debug, Clone)]
pub enum AugKind {
    CropRandom(CropParams),
    CropResizedRandom(CropResizedParams),
    FlipHorizontal,
    Cutout(CutoutParams),
    ElasticTransform(ElasticParams),
    ShiftScaleRotate(ShiftScaleRotateParams),
    BrightnessContrast(BrightnessContrastParams),
    ColorJitter(ColorJitterParams),
    Grayscale,
    Clahe(ClaheParams),
    GaussianBlur(GaussianBlurParams),
    GaussianNoise(GaussianNoiseParams),
    Fog(FogParams),
    Rain(RainParams),
    Snow(SnowParams),
    SunFlare(SunFlareParams),
    CannyEdge(CannyParams),
    PointOp(PointOpParams),
    Policy(Policy),
}

impl AugKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::CropRandom(_) => "crop_random",
            Self::CropResizedRandom(_) => "crop_resized_random",
            Self::FlipHorizontal => "flip_horizontal",
            Self::Cutout(_) => "cutout",
            Self::ElasticTransform(_) => "elastic_transform",
            Self::ShiftScaleRotate(_) => "shift_scale_rotate",
            Self::BrightnessContrast(_) => "brightness_contrast",
            Self::ColorJitter(_) => "color_jitter",
            Self::Grayscale => "grayscale",
            Self::Clahe(_) => "clahe",
            Self::GaussianBlur(_) => "gaussian_blur",
            Self::GaussianNoise(_) => "gaussian_noise",
            Self::Fog(_) => "fog",
            Self::Rain(_) => "rain",
            Self::Snow(_) => "snow",
            Self::SunFlare(_) => "sun_flare",
            Self::CannyEdge(_) => "canny_edge",
            Self::PointOp(_) => "point_op",
            Self::Policy(_) => "policy",
        }
    }

    /// Run the augmentation, returning the image and a log of the sampled
    /// parameter values.
    pub fn apply(&self, img: &Image, rng: &mut RngStream) -> Result<(Image, Value)> {
        match self {
            Self::CropRandom(p) => geometry::crop_random(img, rng, p),
            Self::CropResizedRandom(p) => geometry::crop_resized_random(img, rng, p),
            Self::FlipHorizontal => Ok((geometry::flip_horizontal(img), Value::Null)),
            Self::Cutout(p) => geometry::cutout(img, rng, p),
            Self::ElasticTransform(p) => geometry::elastic_transform(img, rng, p),
            Self::ShiftScaleRotate(p) => geometry::shift_scale_rotate(img, rng, p),
            Self::BrightnessContrast(p) => color::brightness_contrast(img, rng, p),
            Self::ColorJitter(p) => color::color_jitter(img, rng, p),
            Self::Grayscale => Ok((color::grayscale(img)?, Value::Null)),
            Self::Clahe(p) => color::clahe(img, rng, p),
            Self::GaussianBlur(p) => texture::gaussian_blur(img, rng, p),
            Self::GaussianNoise(p) => texture::gaussian_noise(img, rng, p),
            Self::Fog(p) => weather::fog(img, rng, p),
            Self::Rain(p) => weather::rain(img, rng, p),
            Self::Snow(p) => weather::snow(img, rng, p),
            Self::SunFlare(p) => weather::sun_flare(img, rng, p),
            Self::CannyEdge(p) => canny::canny_edge(img, rng, p),
            Self::PointOp(p) => pointops::point_op_stage(img, rng, p),
            Self::Policy(p) => policy::apply_policy(p, img, rng),
        }
    }

    /// Static parameter checks done at parse time: ranges ordered, counts
    /// sane. Sampled values are additionally validated where they are used.
    fn validate(&self) -> Result<()> {
        let range_ok = |r: &[f64; 2], what: &str| {
            if r[0] > r[1] || !r[0].is_finite() || !r[1].is_finite() {
                Err(AugError::Spec(format!("{what} range [{}, {}] is empty", r[0], r[1])))
            } else {
                Ok(())
            }
        };
        match self {
            Self::CropRandom(p) => {
                if p.width == 0 || p.height == 0 {
                    return Err(AugError::Spec("crop size must be at least 1x1".into()));
                }
            }
            Self::CropResizedRandom(p) => {
                range_ok(&p.scale, "scale")?;
                range_ok(&p.ratio, "ratio")?;
                if p.scale[0] <= 0.0 || p.ratio[0] <= 0.0 {
                    return Err(AugError::Spec("scale and ratio must be positive".into()));
                }
            }
            Self::Cutout(p) => {
                if p.min_holes > p.max_holes {
                    return Err(AugError::Spec("cutout min_holes exceeds max_holes".into()));
                }
            }
            Self::ShiftScaleRotate(p) => {
                range_ok(&p.scale, "scale")?;
                if p.scale[0] <= 0.0 {
                    return Err(AugError::Spec("scale must be positive".into()));
                }
            }
            Self::ColorJitter(p) => {
                range_ok(&p.brightness, "brightness")?;
                range_ok(&p.contrast, "contrast")?;
                range_ok(&p.saturation, "saturation")?;
            }
            Self::Clahe(p) => {
                range_ok(&p.clip_limit, "clip_limit")?;
                if p.tiles[0] == 0 || p.tiles[1] == 0 {
                    return Err(AugError::Spec("clahe tile grid must be at least 1x1".into()));
                }
            }
            Self::GaussianBlur(p) => {
                if p.kernel_sizes.is_empty() || p.kernel_sizes.iter().any(|k| k % 2 == 0) {
                    return Err(AugError::Spec("kernel sizes must be a nonempty odd set".into()));
                }
            }
            Self::GaussianNoise(p) => range_ok(&p.variance, "variance")?,
            Self::Fog(p) => range_ok(&p.coef, "fog coef")?,
            Self::Snow(p) => range_ok(&p.point, "snow point")?,
            Self::Policy(p) => p.validate()?,
            _ => {}
        }
        Ok(())
    }
}

/// A parametrized augmentation plus its application probability.
#[derive(Debug, Clone)]
pub struct AugSpec {
    pub kind: AugKind,
    pub probability: f64,
}

/// Ordered, seeded augmentation stages.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub master_seed: u64,
    pub stages: Vec<AugSpec>,
}

fn default_probability() -> f64 {
    0.5
}

#[derive(Serialize, Deserialize)]
struct RawStage {
    kind: String,
    #[serde(default = "default_probability")]
    probability: f64,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    params: Value,
}

#[derive(Serialize, Deserialize)]
struct RawPipeline {
    #[serde(default)]
    seed: u64,
    stages: Vec<RawStage>,
}

fn params_from<T: serde::de::DeserializeOwned + Default>(raw: Value) -> Result<T> {
    if raw.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(raw).map_err(|e| AugError::Spec(e.to_string()))
}

impl AugSpec {
    fn from_raw(raw: RawStage) -> Result<Self> {
        if !(0.0..=1.0).contains(&raw.probability) {
            return Err(AugError::Spec(format!(
                "stage {}: probability {} outside [0, 1]",
                raw.kind, raw.probability
            )));
        }
        let kind = match raw.kind.as_str() {
            "crop_random" => AugKind::CropRandom(params_from(raw.params)?),
            "crop_resized_random" => AugKind::CropResizedRandom(params_from(raw.params)?),
            "flip_horizontal" => AugKind::FlipHorizontal,
            "cutout" => AugKind::Cutout(params_from(raw.params)?),
            "elastic_transform" => AugKind::ElasticTransform(params_from(raw.params)?),
            "shift_scale_rotate" => AugKind::ShiftScaleRotate(params_from(raw.params)?),
            "brightness_contrast" => AugKind::BrightnessContrast(params_from(raw.params)?),
            "color_jitter" => AugKind::ColorJitter(params_from(raw.params)?),
            "grayscale" => AugKind::Grayscale,
            "clahe" => AugKind::Clahe(params_from(raw.params)?),
            "gaussian_blur" => AugKind::GaussianBlur(params_from(raw.params)?),
            "gaussian_noise" => AugKind::GaussianNoise(params_from(raw.params)?),
            "fog" => AugKind::Fog(params_from(raw.params)?),
            "rain" => AugKind::Rain(params_from(raw.params)?),
            "snow" => AugKind::Snow(params_from(raw.params)?),
            "sun_flare" => AugKind::SunFlare(params_from(raw.params)?),
            "canny_edge" => AugKind::CannyEdge(params_from(raw.params)?),
            "point_op" => AugKind::PointOp(
                serde_json::from_value(raw.params).map_err(|e| AugError::Spec(e.to_string()))?,
            ),
            "policy" => AugKind::Policy(
                serde_json::from_value(raw.params).map_err(|e| AugError::Spec(e.to_string()))?,
            ),
            other => return Err(AugError::Spec(format!("unknown augmentation kind {other:?}"))),
        };
        kind.validate()?;
        Ok(Self { kind, probability: raw.probability })
    }

    fn to_raw(&self) -> RawStage {
        let params = match &self.kind {
            AugKind::FlipHorizontal | AugKind::Grayscale => Value::Null,
            AugKind::CropRandom(p) => serde_json::to_value(p).unwrap(),
            AugKind::CropResizedRandom(p) => serde_json::to_value(p).unwrap(),
            AugKind::Cutout(p) => serde_json::to_value(p).unwrap(),
            AugKind::ElasticTransform(p) => serde_json::to_value(p).unwrap(),
            AugKind::ShiftScaleRotate(p) => serde_json::to_value(p).unwrap(),
            AugKind::BrightnessContrast(p) => serde_json::to_value(p).unwrap(),
            AugKind::ColorJitter(p) => serde_json::to_value(p).unwrap(),
            AugKind::Clahe(p) => serde_json::to_value(p).unwrap(),
            AugKind::GaussianBlur(p) => serde_json::to_value(p).unwrap(),
            AugKind::GaussianNoise(p) => serde_json::to_value(p).unwrap(),
            AugKind::Fog(p) => serde_json::to_value(p).unwrap(),
            AugKind::Rain(p) => serde_json::to_value(p).unwrap(),
            AugKind::Snow(p) => serde_json::to_value(p).unwrap(),
            AugKind::SunFlare(p) => serde_json::to_value(p).unwrap(),
            AugKind::CannyEdge(p) => serde_json::to_value(p).unwrap(),
            AugKind::PointOp(p) => serde_json::to_value(p).unwrap(),
            AugKind::Policy(p) => serde_json::to_value(p).unwrap(),
        };
        RawStage { kind: self.kind.name().into(), probability: self.probability, params }
    }
}

impl Pipeline {
    pub fn new(master_seed: u64, stages: Vec<AugSpec>) -> Self {
        Self { master_seed, stages }
    }

    /// Parse the declarative JSON document `{seed, stages: [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawPipeline =
            serde_json::from_str(text).map_err(|e| AugError::Spec(e.to_string()))?;
        let stages = raw.stages.into_iter().map(AugSpec::from_raw).collect::<Result<Vec<_>>>()?;
        Ok(Self { master_seed: raw.seed, stages })
    }

    pub fn to_json(&self) -> String {
        let raw = RawPipeline {
            seed: self.master_seed,
            stages: self.stages.iter().map(AugSpec::to_raw).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("pipeline serialization cannot fail")
    }
}

/// Log entry for one stage of one image.
#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub kind: String,
    pub fired: bool,
    pub params: Value,
}

/// Run the pipeline on one image.
///
/// Each stage draws from a stream derived from (master_seed, image_index,
/// stage_index); the first draw is the stage's Bernoulli gate. Processing
/// order over images therefore cannot influence any output.
pub fn apply_pipeline(
    pipeline: &Pipeline,
    img: &Image,
    image_index: u64,
) -> Result<(Image, Vec<StageRecord>)> {
    let mut current = img.clone();
    let mut records = Vec::with_capacity(pipeline.stages.len());
    for (stage_index, stage) in pipeline.stages.iter().enumerate() {
        let mut rng = RngStream::derive(pipeline.master_seed, &[image_index, stage_index as u64]);
        let fired = rng.bernoulli(stage.probability);
        let mut params = Value::Null;
        if fired {
            let (next, sampled) = stage.kind.apply(&current, &mut rng)?;
            current = next;
            params = sampled;
        }
        records.push(StageRecord {
            stage: stage_index,
            kind: stage.kind.name().into(),
            fired,
            params,
        });
    }
    Ok((current, records))
}
