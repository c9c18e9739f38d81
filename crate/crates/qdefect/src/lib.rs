pub mod defect;
pub mod deform;
pub mod error;
pub mod f2;
pub mod fgraph;
pub mod hgp;
pub mod par;
pub mod search;
pub mod symplectic;
pub mod trace;
pub mod wormhole;
