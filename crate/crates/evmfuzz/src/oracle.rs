//! The seven trace-based vulnerability oracles.
//!
//! Each oracle reads completed call-record trees (plus per-session
//! statistics for the frozen-ether check) and never mutates state. The
//! composite oracles are built from independently exposed sub-predicates.

use serde::Serialize;

use crate::analysis::TransferCapability;
use crate::evm::{CallKind, CallOutcome, CallRecord, SEND_STIPEND};
use crate::inputgen::{CallerKind, FuzzCall};
use crate::word::{Address, Wei, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum OracleKind {
    #[serde(rename = "gasless-send")]
    GaslessSend,
    #[serde(rename = "exception-disorder")]
    ExceptionDisorder,
    #[serde(rename = "reentrancy")]
    Reentrancy,
    #[serde(rename = "timestamp-dependency")]
    TimestampDependency,
    #[serde(rename = "blocknum-dependency")]
    BlockNumDependency,
    #[serde(rename = "dangerous-delegatecall")]
    DangerousDelegateCall,
    #[serde(rename = "freezing-ether")]
    FreezingEther,
}

pub const ALL_ORACLES: [OracleKind; 7] = [
    OracleKind::GaslessSend,
    OracleKind::ExceptionDisorder,
    OracleKind::Reentrancy,
    OracleKind::TimestampDependency,
    OracleKind::BlockNumDependency,
    OracleKind::DangerousDelegateCall,
    OracleKind::FreezingEther,
];

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::GaslessSend => "gasless-send",
            OracleKind::ExceptionDisorder => "exception-disorder",
            OracleKind::Reentrancy => "reentrancy",
            OracleKind::TimestampDependency => "timestamp-dependency",
            OracleKind::BlockNumDependency => "blocknum-dependency",
            OracleKind::DangerousDelegateCall => "dangerous-delegatecall",
            OracleKind::FreezingEther => "freezing-ether",
        }
    }

    pub fn parse(name: &str) -> Option<OracleKind> {
        ALL_ORACLES.iter().copied().find(|k| k.name() == name)
    }
}

/// Serializable snapshot of the call that produced a verdict; together with
/// the campaign seed it suffices to replay the finding.
#[derive(Debug, Clone, Serialize)]
pub struct TriggeringCall {
    pub caller: CallerKind,
    pub target: Address,
    pub function: Option<String>,
    pub calldata: String,
    pub value: String,
    pub gas: u64,
}

impl From<&FuzzCall> for TriggeringCall {
    fn from(call: &FuzzCall) -> TriggeringCall {
        TriggeringCall {
            caller: call.caller_kind,
            target: call.target,
            function: call.function.as_ref().map(|f| f.canonical_signature.clone()),
            calldata: format!("0x{}", hex::encode(&call.calldata)),
            value: call.value.to_string(),
            gas: call.gas_budget,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerdictEvidence {
    /// Child indices from the root to the matched record.
    pub path: Vec<usize>,
    /// Monitored opcodes that satisfied the oracle.
    pub opcodes: Vec<String>,
    /// Matched call attributes, human readable.
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleVerdict {
    pub kind: OracleKind,
    pub contract: Address,
    pub evidence: VerdictEvidence,
    pub triggering_call: TriggeringCall,
}

/// Ambient facts about the trace being checked.
#[derive(Debug, Clone)]
pub struct TraceInfo<'a> {
    /// The contract under test.
    pub contract: Address,
    pub agent: Address,
    /// Calldata of the initial call into the contract.
    pub top_input: &'a [u8],
    pub triggering: &'a FuzzCall,
}

/// Per-contract facts accumulated over a whole fuzz session.
#[derive(Debug, Clone)]
pub struct SessionStats {
    pub contract: Address,
    pub max_balance_observed: Wei,
    pub executed_delegatecall: bool,
    pub static_flags: TransferCapability,
    pub delegate_witness: Option<FuzzCall>,
}

impl SessionStats {
    pub fn new(contract: Address, static_flags: TransferCapability) -> SessionStats {
        SessionStats {
            contract,
            max_balance_observed: Word::zero(),
            executed_delegatecall: false,
            static_flags,
            delegate_witness: None,
        }
    }

    /// Monotone maximum of the contract's committed balance.
    pub fn observe_balance(&mut self, balance: Wei) {
        if balance > self.max_balance_observed {
            self.max_balance_observed = balance;
        }
    }

    /// Notes delegatecall executions performed by the contract under test.
    pub fn observe_trace(&mut self, root: &CallRecord, triggering: &FuzzCall) {
        if self.executed_delegatecall {
            return;
        }
        let mut found = false;
        root.walk(&mut |record, _| {
            if record.kind == CallKind::DelegateCall && record.caller == self.contract {
                found = true;
            }
        });
        if found {
            self.executed_delegatecall = true;
            self.delegate_witness = Some(triggering.clone());
        }
    }
}

// ---------------------------------------------------------------------------
// Sub-predicates. The composite oracles are conjunctions/disjunctions of
// these; they are exposed so the formulas can be tested piecewise.
// ---------------------------------------------------------------------------

fn is_send(record: &CallRecord) -> bool {
    record.kind == CallKind::Send
}

/// A failed record, any failure class.
fn threw(record: &CallRecord) -> bool {
    record.outcome != CallOutcome::Success
}

/// TIMESTAMP executed by code belonging to the contract under test
/// (including its code run via delegatecall into it).
pub fn timestamp_op(root: &CallRecord, under_test: Address) -> bool {
    opcode_in_contract(root, under_test, "TIMESTAMP")
}

/// NUMBER executed by code belonging to the contract under test.
pub fn blocknum_op(root: &CallRecord, under_test: Address) -> bool {
    opcode_in_contract(root, under_test, "NUMBER")
}

fn opcode_in_contract(root: &CallRecord, under_test: Address, opcode: &str) -> bool {
    let mut found = false;
    root.walk(&mut |record, _| {
        // `callee` is the code provider for both calls and delegatecalls.
        if record.callee == under_test && record.opcode_trace.contains(&opcode) {
            found = true;
        }
    });
    found
}

/// Some contract-issued call in the tree is a send. The root is excluded:
/// it is the fuzzer's own input, not behavior of the code under test.
pub fn send_call(root: &CallRecord) -> bool {
    let mut found = false;
    root.walk(&mut |record, depth| {
        if depth > 0 && is_send(record) {
            found = true;
        }
    });
    found
}

/// Some contract-issued call moved ether (value > 0), root excluded.
pub fn ether_transfer(root: &CallRecord) -> bool {
    let mut found = false;
    root.walk(&mut |record, depth| {
        if depth > 0 && !record.value.is_zero() {
            found = true;
        }
    });
    found
}

/// Root-to-leaf paths of the record tree.
fn paths(root: &CallRecord) -> Vec<Vec<&CallRecord>> {
    fn go<'a>(record: &'a CallRecord, current: &mut Vec<&'a CallRecord>, out: &mut Vec<Vec<&'a CallRecord>>) {
        current.push(record);
        if record.internal_calls.is_empty() {
            out.push(current.clone());
        } else {
            for child in &record.internal_calls {
                go(child, current, out);
            }
        }
        current.pop();
    }
    let mut out = Vec::new();
    go(root, &mut Vec::new(), &mut out);
    out
}

/// ReentrancyCall: some (callee, selector) pair occurs at two distinct
/// depths on one root-to-leaf path. The root itself is the originating call
/// and is not counted; only what its execution caused can witness a cycle.
pub fn reentrancy_call(root: &CallRecord) -> bool {
    paths(root).iter().any(|path| path_has_repeated_pair(path))
}

fn path_has_repeated_pair(path: &[&CallRecord]) -> bool {
    let descendants = &path[1..];
    for (i, a) in descendants.iter().enumerate() {
        for b in &descendants[i + 1..] {
            if a.callee == b.callee && a.selector == b.selector {
                return true;
            }
        }
    }
    false
}

/// CallAgentWithValue: a call on the path carries value to the agent with
/// more gas than a send stipend, i.e. enough to run a reentrant fallback.
pub fn call_agent_with_value(root: &CallRecord, agent: Address) -> bool {
    paths(root).iter().any(|path| path_calls_agent_with_value(path, agent))
}

fn path_calls_agent_with_value(path: &[&CallRecord], agent: Address) -> bool {
    path.iter().any(|record| {
        record.kind == CallKind::Call
            && !record.value.is_zero()
            && record.gas_limit > SEND_STIPEND
            && record.callee == agent
    })
}

// ---------------------------------------------------------------------------
// The oracles.
// ---------------------------------------------------------------------------

/// Fires when a send (empty input, 2300 gas, value > 0) runs out of gas:
/// the recipient's fallback exhausted the stipend.
pub fn check_gasless_send(root: &CallRecord, info: &TraceInfo) -> Option<OracleVerdict> {
    let path = find_path(root, &|record| {
        is_send(record) && record.outcome == CallOutcome::OutOfGas
    })?;
    Some(OracleVerdict {
        kind: OracleKind::GaslessSend,
        contract: info.contract,
        evidence: VerdictEvidence {
            path,
            opcodes: vec!["CALL".to_string()],
            detail: format!("send with gas limit {SEND_STIPEND} and empty input ran out of gas"),
        },
        triggering_call: info.triggering.into(),
    })
}

/// Fires when the root call succeeds while a nested call failed: the
/// exception was swallowed by a low-level call site instead of propagating.
pub fn check_exception_disorder(root: &CallRecord, info: &TraceInfo) -> Option<OracleVerdict> {
    if threw(root) {
        return None;
    }
    let path = find_path_from_depth(root, 1, &threw)?;
    let failed = record_at(root, &path);
    Some(OracleVerdict {
        kind: OracleKind::ExceptionDisorder,
        contract: info.contract,
        evidence: VerdictEvidence {
            path,
            opcodes: Vec::new(),
            detail: format!("root succeeded while a nested call failed with {:?}", failed.outcome),
        },
        triggering_call: info.triggering.into(),
    })
}

/// ReentrancyCall AND CallAgentWithValue, witnessed on the same path of an
/// agent-initiated trace.
pub fn check_reentrancy(root: &CallRecord, info: &TraceInfo) -> Option<OracleVerdict> {
    if root.caller != info.agent {
        return None;
    }
    for path in paths(root) {
        if path_has_repeated_pair(&path) && path_calls_agent_with_value(&path, info.agent) {
            let indices = path_indices(root, &path);
            return Some(OracleVerdict {
                kind: OracleKind::Reentrancy,
                contract: info.contract,
                evidence: VerdictEvidence {
                    path: indices,
                    opcodes: vec!["CALL".to_string()],
                    detail: "a (callee, selector) pair repeats along a path that also \
                             sends value to the agent with more than stipend gas"
                        .to_string(),
                },
                triggering_call: info.triggering.into(),
            });
        }
    }
    None
}

/// TimestampOp AND (SendCall OR EtherTransfer).
pub fn check_timestamp_dependency(root: &CallRecord, info: &TraceInfo) -> Option<OracleVerdict> {
    if timestamp_op(root, info.contract) && (send_call(root) || ether_transfer(root)) {
        Some(OracleVerdict {
            kind: OracleKind::TimestampDependency,
            contract: info.contract,
            evidence: VerdictEvidence {
                path: Vec::new(),
                opcodes: vec!["TIMESTAMP".to_string()],
                detail: "TIMESTAMP executed and ether moved in the same trace".to_string(),
            },
            triggering_call: info.triggering.into(),
        })
    } else {
        None
    }
}

/// BlockNumOp AND (SendCall OR EtherTransfer).
pub fn check_blocknum_dependency(root: &CallRecord, info: &TraceInfo) -> Option<OracleVerdict> {
    if blocknum_op(root, info.contract) && (send_call(root) || ether_transfer(root)) {
        Some(OracleVerdict {
            kind: OracleKind::BlockNumDependency,
            contract: info.contract,
            evidence: VerdictEvidence {
                path: Vec::new(),
                opcodes: vec!["NUMBER".to_string()],
                detail: "NUMBER executed and ether moved in the same trace".to_string(),
            },
            triggering_call: info.triggering.into(),
        })
    } else {
        None
    }
}

/// Fires when a delegatecall's target function comes from the initial
/// call's input: its selector appears as a contiguous subsequence of the
/// top-level calldata.
pub fn check_dangerous_delegatecall(
    root: &CallRecord,
    top_input: &[u8],
    info: &TraceInfo,
) -> Option<OracleVerdict> {
    let path = find_path(root, &|record| {
        record.kind == CallKind::DelegateCall
            && record.input.len() >= 4
            && contains_subsequence(top_input, &record.input[..4])
    })?;
    Some(OracleVerdict {
        kind: OracleKind::DangerousDelegateCall,
        contract: info.contract,
        evidence: VerdictEvidence {
            path,
            opcodes: vec!["DELEGATECALL".to_string()],
            detail: "delegatecall selector tainted by top-level calldata".to_string(),
        },
        triggering_call: info.triggering.into(),
    })
}

/// Fires once per session: the contract held ether and relied on
/// delegatecall, while its own code has no call or selfdestruct to ever
/// move that ether out.
pub fn check_freezing_ether(contract: Address, stats: &SessionStats) -> Option<OracleVerdict> {
    if stats.max_balance_observed > Word::zero()
        && stats.executed_delegatecall
        && !stats.static_flags.has_call
        && !stats.static_flags.has_selfdestruct
    {
        let triggering = stats.delegate_witness.as_ref()?;
        Some(OracleVerdict {
            kind: OracleKind::FreezingEther,
            contract,
            evidence: VerdictEvidence {
                path: Vec::new(),
                opcodes: vec!["DELEGATECALL".to_string()],
                detail: format!(
                    "balance reached {} with no call/selfdestruct in own code",
                    stats.max_balance_observed
                ),
            },
            triggering_call: triggering.into(),
        })
    } else {
        None
    }
}

/// Runs every enabled per-trace oracle over one completed trace. The
/// per-session freezing-ether check runs separately at session end.
pub fn evaluate_all(
    root: &CallRecord,
    info: &TraceInfo,
    enabled: &[OracleKind],
) -> Vec<OracleVerdict> {
    let mut verdicts = Vec::new();
    for kind in enabled {
        let verdict = match kind {
            OracleKind::GaslessSend => check_gasless_send(root, info),
            OracleKind::ExceptionDisorder => check_exception_disorder(root, info),
            OracleKind::Reentrancy => check_reentrancy(root, info),
            OracleKind::TimestampDependency => check_timestamp_dependency(root, info),
            OracleKind::BlockNumDependency => check_blocknum_dependency(root, info),
            OracleKind::DangerousDelegateCall => {
                check_dangerous_delegatecall(root, info.top_input, info)
            }
            OracleKind::FreezingEther => None,
        };
        verdicts.extend(verdict);
    }
    verdicts
}

// ---------------------------------------------------------------------------
// Tree helpers.
// ---------------------------------------------------------------------------

/// Child-index path to the first record (depth-first) matching the
/// predicate, root included.
fn find_path(root: &CallRecord, matches: &dyn Fn(&CallRecord) -> bool) -> Option<Vec<usize>> {
    find_path_from_depth(root, 0, matches)
}

fn find_path_from_depth(
    root: &CallRecord,
    min_depth: usize,
    matches: &dyn Fn(&CallRecord) -> bool,
) -> Option<Vec<usize>> {
    fn go(
        record: &CallRecord,
        depth: usize,
        min_depth: usize,
        matches: &dyn Fn(&CallRecord) -> bool,
        path: &mut Vec<usize>,
    ) -> bool {
        if depth >= min_depth && matches(record) {
            return true;
        }
        for (index, child) in record.internal_calls.iter().enumerate() {
            path.push(index);
            if go(child, depth + 1, min_depth, matches, path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::new();
    go(root, 0, min_depth, matches, &mut path).then_some(path)
}

fn record_at<'a>(root: &'a CallRecord, path: &[usize]) -> &'a CallRecord {
    let mut record = root;
    for &index in path {
        record = &record.internal_calls[index];
    }
    record
}

/// Converts a borrowed path (record refs) into child indices.
fn path_indices(root: &CallRecord, path: &[&CallRecord]) -> Vec<usize> {
    let mut indices = Vec::new();
    let mut current = root;
    for target in &path[1..] {
        let index = current
            .internal_calls
            .iter()
            .position(|child| std::ptr::eq(child, *target))
            .expect("path records are children of their predecessors");
        indices.push(index);
        current = &current.internal_calls[index];
    }
    indices
}

fn contains_subsequence(haystack: &[u8], needle: &[u8]) -> bool {
    if needle.is_empty() || haystack.len() < needle.len() {
        return false;
    }
    haystack.windows(needle.len()).any(|window| window == needle)
}
