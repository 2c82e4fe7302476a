//! Forwarding snapshots: per-FEC forwarding graphs, their validation, and
//! their translation to path automata at a chosen granularity.

mod fec;
mod graph;

pub use fec::{load_fecs, parse_fec, Fec, FecError, FecReader, Traffic};
pub use graph::{coarsen, graph_to_fsa, project_to_fsa, ForwardingGraph, GraphError, Node};

use std::fmt;
use std::str::FromStr;

/// The resolution at which locations are distinguished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Granularity {
    Interface,
    Device,
    Group,
}

impl Granularity {
    pub const ALL: [Granularity; 3] = [Granularity::Interface, Granularity::Device, Granularity::Group];

    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Interface => "interface",
            Granularity::Device => "device",
            Granularity::Group => "group",
        }
    }

    /// The database attribute naming an entity at this granularity.
    pub fn attribute(self) -> &'static str {
        match self {
            Granularity::Interface => "name",
            Granularity::Device => "device",
            Granularity::Group => "group",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interface" => Ok(Granularity::Interface),
            "device" | "router" => Ok(Granularity::Device),
            "group" => Ok(Granularity::Group),
            _ => Err(format!("unknown granularity {s:?} (expected interface, device or group)")),
        }
    }
}
