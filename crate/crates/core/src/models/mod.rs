//! Generating models, their densities and theoretical dependence values.

mod density;
mod family;
mod theory;

pub use density::{joint_density, DensityModel};
pub use family::{
    bandlimited_half_width, bandlimited_pdf, sample_model, GenModel, Nonlinearity, PdfFamily, SampleSet,
    BANDLIMITED_NORMALIZER, TAIL_MASS,
};
pub use theory::{
    theoretical_dcorr_oracle, theoretical_mdep, theoretical_mdep_with, theoretical_mi, theoretical_mi_with,
    theoretical_pearson, theory_spec, OracleEstimate,
};
