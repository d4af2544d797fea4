//! Instance generators and file formats.

mod chains;
mod io;
mod lb;
mod random;

pub use chains::{
    adversary_makespan_floor, chains_adversary_simulate, gen_chains_instance, log_speedup_table,
    reference_chain_schedule, ChainInfo, ChainsInstance, PhaseGap, PhaseTrace,
};
pub use io::{
    graph_to_json, lb_meta_json, parse_graph, read_graph, read_json, write_graph, write_json,
    write_lb_instance, GraphDocument, FORMAT_VERSION,
};
pub use lb::{
    constraint_report, edge_rules_hold, expected_edges, forced_shape, gen_lb_graph,
    reference_lb_schedule, ConstraintCheck, ConstraintReport, LbInstance, LbMeta, LbTask,
    ShapeReport,
};
pub use random::{gen_random_dag, ParamRanges, RandomDagConfig};
