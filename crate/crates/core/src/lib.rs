pub mod ac_analysis;
pub mod curve;
pub mod decomposition;
pub mod error;
pub mod oracle;
pub mod space;
pub mod speed_measure;
pub mod variation;
