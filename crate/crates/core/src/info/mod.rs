//! Plug-in and exact information functionals over aligned pixel tuples.

mod fundamental;
mod histogram;
mod partition;
pub(crate) mod pmf;
mod profile;

pub use fundamental::{densest, finest, fundamental_partition, FundamentalPartition, INFO_TOL, MAX_PARTITION_M};
pub use histogram::{tuple_codes, CodeCounter, JointHistogram};
pub use partition::{bell, Partition, PartitionIter};
pub use pmf::JointPmf;
pub use profile::{entropy_bits, EntropyProfile, EntropyTable, InfoKind, InfoValue, NONNEG_SLACK};

pub(crate) use fundamental::check_partition_guard;
