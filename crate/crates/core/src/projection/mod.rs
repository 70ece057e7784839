//! 2-D projections for separability inspection: exact t-SNE plus an SVG
//! scatter emitter.

mod svg;
mod tsne;

pub use svg::scatter_svg;
pub use tsne::{
    calibrate_affinities, kl_and_gradient, pairwise_squared_distances, symmetrize, tsne_project,
    ProjectedPoint, Projection2D, TsneConfig, TsneRun,
};
