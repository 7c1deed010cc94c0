//! Exact combinatorial engine for the classification of degree-2
//! Dolgachev–Nikulin–Voisin models.

pub mod curve;
pub mod enumeration;
pub mod lattice;
pub mod lp;
pub mod morifan;
pub mod pairs;
pub mod projectivity;
pub mod state;
