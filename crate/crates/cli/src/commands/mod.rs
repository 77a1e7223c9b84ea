pub mod alpha_beta;
pub mod estimate;
pub mod evaluate;
pub mod predict;
pub mod simulate;
pub mod synthesize;
pub mod train;
pub mod trainset;
