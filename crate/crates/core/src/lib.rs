pub mod annotate;
pub mod article;
mod fsutil;
pub mod graph;
pub mod lsi;
pub mod names;
pub mod platform;
pub mod users;
