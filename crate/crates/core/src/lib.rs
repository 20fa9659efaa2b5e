//! Weighted graph embeddings.
//!
//! Every node of an undirected graph gets a position in `R^d` and a weight
//! derived from its degree. Positions are optimized so that the weighted
//! distance `|p_u - p_v| / (w_u w_v)^(1/d)` of neighbors falls below a
//! threshold and that of non-neighbors above it. Embeddings are scored by
//! how well the best threshold reconstructs the edge set.

pub mod cli;
pub mod error;
pub mod eval;
pub mod girg;
pub mod graph;
pub mod index;
pub mod loss;
pub mod optimizer;
pub mod rtree;
mod seed;
pub mod space;

pub use error::{Error, Result};
pub use eval::{best_f1_exact, best_f1_sampled, precision_recall, EvalMode, ReconstructionReport};
pub use girg::{sample_girg, GirgConfig};
pub use graph::{parse_edge_list, parse_edge_list_str, Graph};
pub use index::{build_index, WeightClassForest};
pub use loss::{loss_terms, total_loss_oracle, GradientField, LossFamily, LossSpec};
pub use optimizer::{compute_gradient, embed, embed_with, AdamState, EmbedOutcome, GradientStats, OptimizerConfig};
pub use space::{assign_weights, init_positions, EmbeddingFile, WeightedEmbedding};
