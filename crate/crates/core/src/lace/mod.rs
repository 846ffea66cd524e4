//! Graphs on integer intervals, laces, and the `K`/`J` weights of explicit paths.

pub mod graph;
pub mod laces;
pub mod weights;
pub mod xi;

pub use graph::{compatible_edges, is_compatible, is_connected, is_minimally_connected, lace_of, Edge, Graph};
pub use laces::{
    all_laces, basic_lace, beta, enumerate_laces, overline, underline, ConnectedGraphs, EdgeIndex, Lace,
    LaceTable,
};
pub use weights::{
    check_recursion_identity, j_weight_bruteforce, j_weight_lace, k_weight, k_weight_expanded, Contacts,
    JEvaluator, Path,
};
pub use xi::{xi_mc, XiKernel};
