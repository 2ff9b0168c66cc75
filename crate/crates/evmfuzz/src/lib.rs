//! A self-contained security fuzzer for EVM-style smart contracts.
//!
//! Contracts (creation code + ABI) are deployed into an in-memory
//! instrumented virtual machine. The fuzzer generates ABI-conformant call
//! pools, executes randomized call sequences from three caller kinds
//! (creator, plain EOA, and a built-in attacker agent), and evaluates
//! trace-based oracles for seven vulnerability classes: gasless send,
//! exception disorder, reentrancy, timestamp dependency, block number
//! dependency, dangerous delegatecall, and freezing ether.

pub mod abi;
pub mod agent;
pub mod analysis;
pub mod asm;
pub mod campaign;
pub mod corpus;
pub mod evm;
pub mod fixtures;
pub mod hash;
pub mod inputgen;
pub mod opcode;
pub mod oracle;
pub mod report;
pub mod word;

pub use campaign::{run_campaign, CampaignConfig};
pub use oracle::{OracleKind, OracleVerdict};
pub use report::{write_report, Report};
pub use word::{Address, Wei, Word};
