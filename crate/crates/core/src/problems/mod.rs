//! Problem adapters: each turns an application into a [`Problem`](crate::solvers::Problem).

mod graph;
mod maxcut;
mod mvc;
mod sat;
mod ternary;
mod toynn;
mod varselect;

pub use graph::WeightedGraph;
pub use maxcut::{cut_value, maxcut_problem, relative_loss, MaxCut};
pub use mvc::{cover_size, is_vertex_cover, mvc_problem, refine_cover, repair_cover, uncovered_edges, Mvc};
pub use sat::{sat3_problem, violated_clauses, CnfFormula, Literal, Sat3};
pub use ternary::{decode_weights, ternary_problem, weight_accuracy, TernaryDataset, TernaryNetwork};
pub use toynn::{toynn_problem, ToyNetwork};
pub use varselect::{
    indicator_accuracy, ols_fit, varselect_pipeline, varselect_problem, RegressionDataset, SelectedModel,
    VariableSelection,
};
