//! Closed-form surfaces, fields and radial functions used as exact oracles.

mod example51;
mod radial;
mod surfaces;

pub use example51::{
    example51_curvature_term, example51_distribution, example51_field, example51_gradient_integrals,
    example51_plane_integral, example51_profile, example51_surface_integral, example51_vertex_field,
    plane_asymptote, plateau_radius, Example51Integrals, Improper, PlaneAsymptote,
};
pub use radial::{
    entropy, gn_extremal, gradient_norm, logsobolev_extremal, lp_norm, radial_integral, RadialFunction,
    RadialShape,
};
pub use surfaces::{make_surface, Surface};
