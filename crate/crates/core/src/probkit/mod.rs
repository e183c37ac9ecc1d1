//! Exact finite joint distributions and the Shannon measures computed on them.

mod dist;
pub mod fixtures;
mod fork;
mod io;
mod measures;

pub use dist::{Atom, Event, JointDistribution, Symbol};
pub use fork::build_markov_fork;
pub use io::{load_distribution, Loaded};
pub use measures::{
    cond_entropy, entropy, info_report, mutual_info, triple_mutual_info, InfoReport,
};

/// Variable names of a role that may be absent; a missing column models a constant.
pub fn optional_role<'a, P: crate::Exact>(d: &JointDistribution<P>, name: &'a str) -> Vec<&'a str> {
    if d.has_variable(name) {
        vec![name]
    } else {
        Vec::new()
    }
}
