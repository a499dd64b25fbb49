//! Parameter records for every augmentation, with the documented defaults.
//! All of them deserialize from the `params` object of a pipeline stage, so
//! every default below can be overridden from the JSON side.

use serde::{Deserialize, Serialize};

fn default_crop_dim() -> u32 {
    512
}

/// Sub-rectangle crop at a uniformly chosen offset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CropParams {
    #[serde(default = "default_crop_dim")]
    pub width: u32,
    #[serde(default = "default_crop_dim")]
    pub height: u32,
}

impl Default for CropParams {
    fn default() -> Self {
        Self { width: 512, height: 512 }
    }
}

/// Random area/aspect crop followed by a bilinear resize to the target size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CropResizedParams {
    #[serde(default = "default_crop_dim")]
    pub width: u32,
    #[serde(default = "default_crop_dim")]
    pub height: u32,
    #[serde(default = "CropResizedParams::default_scale")]
    pub scale: [f64; 2],
    #[serde(default = "CropResizedParams::default_ratio")]
    pub ratio: [f64; 2],
}

impl CropResizedParams {
    fn default_scale() -> [f64; 2] {
        [0.5, 1.0]
    }
    fn default_ratio() -> [f64; 2] {
        [0.75, 4.0 / 3.0]
    }
}

impl Default for CropResizedParams {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            scale: Self::default_scale(),
            ratio: Self::default_ratio(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutoutParams {
    #[serde(default = "CutoutParams::default_min_holes")]
    pub min_holes: u32,
    #[serde(default = "CutoutParams::default_max_holes")]
    pub max_holes: u32,
    #[serde(default = "CutoutParams::default_hole_size")]
    pub hole_width: u32,
    #[serde(default = "CutoutParams::default_hole_size")]
    pub hole_height: u32,
    #[serde(default)]
    pub fill: u8,
}

impl CutoutParams {
    fn default_min_holes() -> u32 {
        1
    }
    fn default_max_holes() -> u32 {
        8
    }
    fn default_hole_size() -> u32 {
        8
    }
}

impl Default for CutoutParams {
    fn default() -> Self {
        Self { min_holes: 1, max_holes: 8, hole_width: 8, hole_height: 8, fill: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElasticParams {
    #[serde(default = "ElasticParams::default_alpha")]
    pub alpha: f64,
    #[serde(default = "ElasticParams::default_sigma")]
    pub sigma: f64,
}

impl ElasticParams {
    fn default_alpha() -> f64 {
        1.0
    }
    fn default_sigma() -> f64 {
        50.0
    }
}

impl Default for ElasticParams {
    fn default() -> Self {
        Self { alpha: 1.0, sigma: 50.0 }
    }
}

/// Shift as a fraction of each dimension, scale factor range, rotation
/// limit in degrees.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShiftScaleRotateParams {
    #[serde(default = "ShiftScaleRotateParams::default_shift")]
    pub shift_limit: f64,
    #[serde(default = "ShiftScaleRotateParams::default_scale")]
    pub scale: [f64; 2],
    #[serde(default = "ShiftScaleRotateParams::default_rotate")]
    pub rotate_limit: f64,
}

impl ShiftScaleRotateParams {
    fn default_shift() -> f64 {
        0.0625
    }
    fn default_scale() -> [f64; 2] {
        [0.9, 1.1]
    }
    fn default_rotate() -> f64 {
        45.0
    }
}

impl Default for ShiftScaleRotateParams {
    fn default() -> Self {
        Self { shift_limit: 0.0625, scale: [0.9, 1.1], rotate_limit: 45.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BrightnessContrastParams {
    #[serde(default = "BrightnessContrastParams::default_limit")]
    pub brightness_limit: f64,
    #[serde(default = "BrightnessContrastParams::default_limit")]
    pub contrast_limit: f64,
}

impl BrightnessContrastParams {
    fn default_limit() -> f64 {
        0.2
    }
}

impl Default for BrightnessContrastParams {
    fn default() -> Self {
        Self { brightness_limit: 0.2, contrast_limit: 0.2 }
    }
}

/// Factor ranges for brightness/contrast/saturation; hue shift is a fraction
/// of the full 360 degree circle (0.2 means up to +/-72 degrees).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColorJitterParams {
    #[serde(default = "ColorJitterParams::default_factor")]
    pub brightness: [f64; 2],
    #[serde(default = "ColorJitterParams::default_factor")]
    pub contrast: [f64; 2],
    #[serde(default = "ColorJitterParams::default_factor")]
    pub saturation: [f64; 2],
    #[serde(default = "ColorJitterParams::default_hue")]
    pub hue: f64,
}

impl ColorJitterParams {
    fn default_factor() -> [f64; 2] {
        [0.8, 1.2]
    }
    fn default_hue() -> f64 {
        0.2
    }
}

impl Default for ColorJitterParams {
    fn default() -> Self {
        Self {
            brightness: [0.8, 1.2],
            contrast: [0.8, 1.2],
            saturation: [0.8, 1.2],
            hue: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaheParams {
    #[serde(default = "ClaheParams::default_clip")]
    pub clip_limit: [f64; 2],
    #[serde(default = "ClaheParams::default_tiles")]
    pub tiles: [u32; 2],
}

impl ClaheParams {
    fn default_clip() -> [f64; 2] {
        [1.0, 4.0]
    }
    fn default_tiles() -> [u32; 2] {
        [8, 8]
    }
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self { clip_limit: [1.0, 4.0], tiles: [8, 8] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianBlurParams {
    #[serde(default = "GaussianBlurParams::default_kernels")]
    pub kernel_sizes: Vec<u32>,
}

impl GaussianBlurParams {
    fn default_kernels() -> Vec<u32> {
        vec![3, 5, 7]
    }
}

impl Default for GaussianBlurParams {
    fn default() -> Self {
        Self { kernel_sizes: Self::default_kernels() }
    }
}

/// Noise variance range on the 8-bit scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianNoiseParams {
    #[serde(default = "GaussianNoiseParams::default_variance")]
    pub variance: [f64; 2],
}

impl GaussianNoiseParams {
    fn default_variance() -> [f64; 2] {
        [10.0, 50.0]
    }
}

impl Default for GaussianNoiseParams {
    fn default() -> Self {
        Self { variance: Self::default_variance() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FogParams {
    #[serde(default = "FogParams::default_coef")]
    pub coef: [f64; 2],
}

impl FogParams {
    fn default_coef() -> [f64; 2] {
        [0.3, 1.0]
    }
}

impl Default for FogParams {
    fn default() -> Self {
        Self { coef: Self::default_coef() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RainParams {
    /// Streak slant limit in degrees from vertical.
    #[serde(default = "RainParams::default_slant")]
    pub slant_limit: f64,
    #[serde(default = "RainParams::default_length")]
    pub drop_length: u32,
    #[serde(default = "RainParams::default_color")]
    pub color: [u8; 3],
    #[serde(default = "RainParams::default_brightness")]
    pub brightness: f64,
}

impl RainParams {
    fn default_slant() -> f64 {
        10.0
    }
    fn default_length() -> u32 {
        20
    }
    fn default_color() -> [u8; 3] {
        [200, 200, 200]
    }
    fn default_brightness() -> f64 {
        0.7
    }
}

impl Default for RainParams {
    fn default() -> Self {
        Self {
            slant_limit: 10.0,
            drop_length: 20,
            color: [200, 200, 200],
            brightness: 0.7,
        }
    }
}

/// Pixels whose lightness falls below the sampled snow point (as a fraction
/// of 255) are brightened by `brightness`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnowParams {
    #[serde(default = "SnowParams::default_point")]
    pub point: [f64; 2],
    #[serde(default = "SnowParams::default_brightness")]
    pub brightness: f64,
}

impl SnowParams {
    fn default_point() -> [f64; 2] {
        [0.1, 0.3]
    }
    fn default_brightness() -> f64 {
        2.5
    }
}

impl Default for SnowParams {
    fn default() -> Self {
        Self { point: Self::default_point(), brightness: 2.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SunFlareParams {
    #[serde(default = "SunFlareParams::default_discs")]
    pub discs: u32,
    /// Radius of the first disc as a fraction of min(width, height).
    #[serde(default = "SunFlareParams::default_radius")]
    pub radius_fraction: f64,
    /// Spacing between disc centers as a fraction of min(width, height).
    #[serde(default = "SunFlareParams::default_step")]
    pub step_fraction: f64,
    /// Blend strength of the first disc; later discs decay linearly.
    #[serde(default = "SunFlareParams::default_alpha")]
    pub alpha: f64,
}

impl SunFlareParams {
    fn default_discs() -> u32 {
        8
    }
    fn default_radius() -> f64 {
        0.125
    }
    fn default_step() -> f64 {
        0.1
    }
    fn default_alpha() -> f64 {
        0.5
    }
}

impl Default for SunFlareParams {
    fn default() -> Self {
        Self { discs: 8, radius_fraction: 0.125, step_fraction: 0.1, alpha: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CannyParams {
    #[serde(default = "CannyParams::default_low")]
    pub low: f64,
    #[serde(default = "CannyParams::default_high")]
    pub high: f64,
    #[serde(default = "CannyParams::default_sigma")]
    pub smooth_sigma: f64,
}

impl CannyParams {
    fn default_low() -> f64 {
        100.0
    }
    fn default_high() -> f64 {
        200.0
    }
    fn default_sigma() -> f64 {
        1.4
    }
}

impl Default for CannyParams {
    fn default() -> Self {
        Self { low: 100.0, high: 200.0, smooth_sigma: 1.4 }
    }
}

/// Point-operation selector used by both `point_op` stages and policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointOpKind {
    Posterize,
    Solarize,
    Equalize,
    Autocontrast,
    Invert,
    ShearX,
    ShearY,
    Color,
}

impl PointOpKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Posterize => "posterize",
            Self::Solarize => "solarize",
            Self::Equalize => "equalize",
            Self::Autocontrast => "autocontrast",
            Self::Invert => "invert",
            Self::ShearX => "shear_x",
            Self::ShearY => "shear_y",
            Self::Color => "color",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointOpParams {
    pub op: PointOpKind,
    #[serde(default)]
    pub magnitude: f64,
}
