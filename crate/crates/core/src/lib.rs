pub mod api;
pub mod canonical;
pub mod cli;
pub mod corpus;
pub mod graph;
pub mod model;
pub mod store;
