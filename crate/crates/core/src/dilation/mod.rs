//! Explicit dilations `T^k = E U^k J` on finite truncations, and the
//! semigroup tools around them.

mod bundle;
mod kernel;
mod semigroup;

pub use bundle::{
    dilate_fourier_finite, dilate_schur, verify_dilation, BundleInvariants, BundleSummary, DilationBundle,
    MultiplierMap, ResidualReport, DENSE_LIMIT, MAX_AMBIENT_DIM,
};
pub use kernel::{
    discretize_kernel, semigroup_convolution, ConvolutionConfig, ConvolutionReport, KernelFunction, NormEntry,
    QuadratureConfig, SemigroupSource,
};
pub use semigroup::{
    gaussian_semigroup_dilate, schoenberg_check, GaussianReport, SchoenbergCertificate, SchoenbergReport,
    SemigroupSpec,
};
