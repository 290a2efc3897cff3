//! Exact shape algebra: shapes, piecewise-constant BV functions, jump-facet
//! arithmetic, norms, and Minkowski dilation volumes.

mod dilation;
mod facets;
mod norms;
mod overlap;
mod shape;

pub use dilation::{
    dilated_volume, make_whisker_disk, DilatedVolume, McOpts, Region, VolumeMethod, WhiskerDisk,
};
pub use facets::{
    jump_facets, jump_product, jump_product_of_facets, Carrier, Exactness, JumpFacet,
    JumpProductResult,
};
pub use norms::{inner_product, l1_norm, l2_norm_sq, sup_norm};
pub use overlap::{lens_area, lens_volume, overlap_measure, pairwise_area, Resolved};
pub use shape::{BVFunction, Shape, ShapeKind};

/// Total jump variation |D^j u|(R^d) = sum |u+ - u-| * measure over facets.
pub fn total_variation(u: &BVFunction) -> crate::Result<f64> {
    Ok(jump_facets(u)?
        .iter()
        .map(|f| (f.plus - f.minus).abs() * f.measure)
        .sum())
}

/// Directional variation |D_v u| = sum |u+ - u-| |nu . v| * measure.
pub fn directional_variation(u: &BVFunction, v: &crate::vec::Point) -> crate::Result<f64> {
    let d = u.dim();
    Ok(jump_facets(u)?
        .iter()
        .map(|f| (f.plus - f.minus).abs() * crate::vec::dot(&f.normal, v, d).abs() * f.measure)
        .sum())
}
