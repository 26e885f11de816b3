//! Grid readers, generators and mesh transforms.

pub mod cartesian;
pub mod cornerpoint;
pub mod grdecl;
pub mod transform;

pub use cartesian::{cartesian, structured, twisted_cartesian};
pub use cornerpoint::{box_spec, build_cornerpoint, pad_embed, CornerPointSpec, LayeredModel};
pub use grdecl::{parse_grdecl, write_grdecl};
pub use transform::{flip_vertical, insert_edge_midnodes, scale, triangulate_faces};
