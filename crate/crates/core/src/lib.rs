pub mod bicomp_skeleton;
pub mod chains;
pub mod cli;
pub mod error;
pub mod graph_core;
pub mod oracle;
pub mod stepping_sets;
pub mod colourer;
pub mod params;
pub mod pipeline;
pub mod splitter_hierarchy;
pub mod tsplitter;
