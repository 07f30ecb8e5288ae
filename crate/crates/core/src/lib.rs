//! Cubical solution complexes of CNF formulas and the tooling around them:
//! F2 homology, gadget constructions with machine-checked certificates,
//! random 3-SAT face statistics, solution-graph spectra and the subcube-query
//! adversary game.

pub mod complex;
pub mod formula;
pub mod gadgets;
pub mod graph;
pub mod homology;
pub mod querymodel;
pub mod randomlab;
pub mod spectral;
