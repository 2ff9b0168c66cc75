//! In-memory instrumented EVM: world state, value transfer, gas accounting,
//! call semantics including the 2300 send stipend, and exception semantics.
//! Every transaction yields a tree of call records carrying the monitored
//! opcode trace the vulnerability oracles consume.

mod interpreter;

pub use interpreter::{Frame, Machine, Step, CALL_DEPTH_LIMIT, STACK_LIMIT};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::agent::AgentState;
use crate::word::{Address, Wei, Word};

/// Fixed gas forwarded by a value-bearing send; enough to log, not enough
/// to re-enter.
pub const SEND_STIPEND: u64 = 2300;

#[derive(Debug, Error, PartialEq)]
pub enum EvmError {
    #[error("unknown account {0}")]
    UnknownAccount(Address),
    #[error("balance too low: account {0} cannot fund the requested amount")]
    InsufficientBalance(Address),
    #[error("deployment reverted")]
    DeployRevert,
    #[error("deployment ran out of gas")]
    DeployOutOfGas,
    #[error("gas available is below the call base cost")]
    OutOfGas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AccountKind {
    Eoa,
    Contract,
    Agent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Account {
    pub address: Address,
    pub balance: Wei,
    pub code: Vec<u8>,
    pub storage: BTreeMap<Word, Word>,
    pub kind: AccountKind,
}

impl Account {
    pub fn new(address: Address, kind: AccountKind, balance: Wei) -> Account {
        Account { address, balance, code: Vec::new(), storage: BTreeMap::new(), kind }
    }
}

/// Block attributes fixed for the duration of one transaction. The harness
/// advances them monotonically between fuzz transactions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockContext {
    pub timestamp: Word,
    pub number: Word,
}

impl BlockContext {
    pub fn advance(&mut self) {
        self.timestamp += Word::from(15u8);
        self.number += Word::one();
    }
}

/// The in-memory chain: accounts plus attack-agent bookkeeping. The agent
/// state is session bookkeeping, not chain state: it is excluded from
/// snapshots and canonical serialization so that reverted transactions
/// cannot reset reentry counters.
#[derive(Debug, Clone)]
#[derive(Default)]
pub struct WorldState {
    pub accounts: BTreeMap<Address, Account>,
    pub deploy_counter: u64,
    pub agent: AgentState,
}


/// Chain state captured before a call, restored when the call fails.
#[derive(Debug, Clone)]
pub struct StateSnapshot {
    accounts: BTreeMap<Address, Account>,
    deploy_counter: u64,
}

impl WorldState {
    pub fn create_account(&mut self, address: Address, kind: AccountKind, balance: Wei) {
        self.accounts.insert(address, Account::new(address, kind, balance));
    }

    pub fn account(&self, address: Address) -> Option<&Account> {
        self.accounts.get(&address)
    }

    pub fn balance_of(&self, address: Address) -> Wei {
        self.accounts.get(&address).map(|a| a.balance).unwrap_or_default()
    }

    pub fn code_of(&self, address: Address) -> &[u8] {
        self.accounts.get(&address).map(|a| a.code.as_slice()).unwrap_or(&[])
    }

    pub fn storage_get(&self, address: Address, key: Word) -> Word {
        self.accounts
            .get(&address)
            .and_then(|a| a.storage.get(&key).copied())
            .unwrap_or_default()
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot { accounts: self.accounts.clone(), deploy_counter: self.deploy_counter }
    }

    pub fn restore(&mut self, snapshot: StateSnapshot) {
        self.accounts = snapshot.accounts;
        self.deploy_counter = snapshot.deploy_counter;
    }

    /// Sum of all balances; invariant across transactions since there are
    /// no mint or burn paths.
    pub fn total_ether(&self) -> Wei {
        let mut sum = Word::zero();
        for account in self.accounts.values() {
            sum += account.balance;
        }
        sum
    }

    /// Deterministic byte serialization of the account state, used to check
    /// revert atomicity exactly.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (address, account) in &self.accounts {
            out.extend_from_slice(address.as_bytes());
            out.extend_from_slice(&account.balance.to_big_endian());
            out.push(match account.kind {
                AccountKind::Eoa => 0,
                AccountKind::Contract => 1,
                AccountKind::Agent => 2,
            });
            out.extend_from_slice(&(account.code.len() as u64).to_be_bytes());
            out.extend_from_slice(&account.code);
            out.extend_from_slice(&(account.storage.len() as u64).to_be_bytes());
            for (key, value) in &account.storage {
                out.extend_from_slice(&key.to_big_endian());
                out.extend_from_slice(&value.to_big_endian());
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CallKind {
    Call,
    DelegateCall,
    Send,
    Create,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CallOutcome {
    Success,
    Revert,
    OutOfGas,
    InvalidOp,
    BalanceTooLow,
}

impl CallOutcome {
    pub fn is_success(self) -> bool {
        self == CallOutcome::Success
    }
}

/// One instrumented call, forming a tree per transaction.
#[derive(Debug, Clone)]
pub struct CallRecord {
    pub caller: Address,
    pub callee: Address,
    pub kind: CallKind,
    pub selector: Option<[u8; 4]>,
    pub input: Vec<u8>,
    pub value: Wei,
    pub gas_limit: u64,
    pub gas_used: u64,
    pub outcome: CallOutcome,
    pub internal_calls: Vec<CallRecord>,
    pub opcode_trace: Vec<&'static str>,
}

impl CallRecord {
    fn new(caller: Address, callee: Address, kind: CallKind, input: &[u8], value: Wei, gas: u64) -> CallRecord {
        let selector = if input.len() >= 4 {
            Some([input[0], input[1], input[2], input[3]])
        } else {
            None
        };
        CallRecord {
            caller,
            callee,
            kind,
            selector,
            input: input.to_vec(),
            value,
            gas_limit: gas,
            gas_used: 0,
            outcome: CallOutcome::Success,
            internal_calls: Vec::new(),
            opcode_trace: Vec::new(),
        }
    }

    /// Depth-first walk over the whole tree, root included.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a CallRecord, usize)) {
        fn go<'a>(record: &'a CallRecord, depth: usize, visit: &mut dyn FnMut(&'a CallRecord, usize)) {
            visit(record, depth);
            for child in &record.internal_calls {
                go(child, depth + 1, visit);
            }
        }
        go(self, 0, visit);
    }

    /// All records in depth-first order with their depths.
    pub fn flatten(&self) -> Vec<(&CallRecord, usize)> {
        let mut out = Vec::new();
        self.walk(&mut |record, depth| out.push((record, depth)));
        out
    }
}

/// Per-opcode gas costs. The table is deliberately flat: costs only need to
/// be large enough that a 2300 stipend cannot fund a value-bearing call
/// (call base 700 plus the stipend itself exceed 2300).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GasSchedule {
    pub default_cost: u64,
    pub sload: u64,
    pub sstore: u64,
    pub sha3_base: u64,
    pub sha3_per_word: u64,
    pub call_base: u64,
    pub selfdestruct: u64,
    pub deploy_gas: u64,
}

impl Default for GasSchedule {
    fn default() -> Self {
        GasSchedule {
            default_cost: 3,
            sload: 200,
            sstore: 5000,
            sha3_base: 30,
            sha3_per_word: 6,
            call_base: 700,
            selfdestruct: 5000,
            deploy_gas: 10_000_000,
        }
    }
}

impl GasSchedule {
    /// Applies `key -> cost` overrides from the harness config.
    pub fn apply_overrides(&mut self, overrides: &BTreeMap<String, u64>) {
        for (key, &cost) in overrides {
            match key.as_str() {
                "default" => self.default_cost = cost,
                "sload" => self.sload = cost,
                "sstore" => self.sstore = cost,
                "sha3_base" => self.sha3_base = cost,
                "sha3_per_word" => self.sha3_per_word = cost,
                "call_base" => self.call_base = cost,
                "selfdestruct" => self.selfdestruct = cost,
                "deploy_gas" => self.deploy_gas = cost,
                _ => {}
            }
        }
    }
}

/// Gas actually forwarded to a callee.
///
/// A zero-gas request with value is a send and forwards exactly the 2300
/// stipend. A sized request with value gets the stipend added on top. The
/// caller is charged the base cost plus everything forwarded, so the result
/// is clamped so that charge can never exceed `available`.
pub fn compute_forwarded_gas(
    requested: u64,
    available: u64,
    value: Wei,
    schedule: &GasSchedule,
) -> Result<u64, EvmError> {
    if available < schedule.call_base {
        return Err(EvmError::OutOfGas);
    }
    if value.is_zero() {
        return Ok(requested.min(available - schedule.call_base));
    }
    // Value-bearing calls must fund the stipend on top of the base cost;
    // this is what makes a 2300-gas frame unable to issue one.
    if available < schedule.call_base + SEND_STIPEND {
        return Err(EvmError::OutOfGas);
    }
    if requested == 0 {
        return Ok(SEND_STIPEND);
    }
    Ok(requested.min(available - schedule.call_base - SEND_STIPEND) + SEND_STIPEND)
}

/// Executes one transaction against the state, committing effects only when
/// the root call succeeds. Returns the root of the instrumented call tree.
#[allow(clippy::too_many_arguments)]
pub fn execute_transaction(
    state: &mut WorldState,
    caller: Address,
    target: Address,
    input: &[u8],
    value: Wei,
    gas: u64,
    ctx: &BlockContext,
    schedule: &GasSchedule,
) -> Result<CallRecord, EvmError> {
    if !state.accounts.contains_key(&caller) {
        return Err(EvmError::UnknownAccount(caller));
    }
    let mut machine = Machine::new(state, ctx, schedule);
    let (record, _gas_left, _output) =
        machine.call_into(caller, caller, target, input, value, gas, CallKind::Call);
    Ok(record)
}

/// Deploys a contract: runs `init_code || constructor_args` as code and
/// installs whatever it returns as the runtime code of a fresh account at a
/// deterministic address. Failure leaves the state untouched.
pub fn deploy_contract(
    state: &mut WorldState,
    creator: Address,
    init_code: &[u8],
    constructor_args: &[u8],
    endowment: Wei,
    ctx: &BlockContext,
    schedule: &GasSchedule,
) -> Result<Address, EvmError> {
    if !state.accounts.contains_key(&creator) {
        return Err(EvmError::UnknownAccount(creator));
    }
    if state.balance_of(creator) < endowment {
        return Err(EvmError::InsufficientBalance(creator));
    }

    let address = derive_address(creator, state.deploy_counter);
    let snapshot = state.snapshot();
    state.deploy_counter += 1;

    state.create_account(address, AccountKind::Contract, Word::zero());
    state.accounts.get_mut(&creator).expect("checked").balance -= endowment;
    state.accounts.get_mut(&address).expect("created").balance += endowment;

    let mut code = init_code.to_vec();
    code.extend_from_slice(constructor_args);

    let record = CallRecord::new(creator, address, CallKind::Create, &[], endowment, schedule.deploy_gas);
    let mut frame = Frame::new(code, address, address, creator, endowment, Vec::new(), schedule.deploy_gas, record);
    let mut machine = Machine::new(state, ctx, schedule);
    let outcome = machine.run_frame(&mut frame);

    match outcome {
        CallOutcome::Success => {
            let runtime = frame.output.clone();
            state.accounts.get_mut(&address).expect("created").code = runtime;
            Ok(address)
        }
        CallOutcome::OutOfGas => {
            state.restore(snapshot);
            Err(EvmError::DeployOutOfGas)
        }
        _ => {
            state.restore(snapshot);
            Err(EvmError::DeployRevert)
        }
    }
}

/// Fresh deterministic deployment address: Keccak-256 of creator and a
/// per-state counter, truncated to 20 bytes.
pub fn derive_address(creator: Address, counter: u64) -> Address {
    let mut preimage = Vec::with_capacity(28);
    preimage.extend_from_slice(creator.as_bytes());
    preimage.extend_from_slice(&counter.to_be_bytes());
    let digest = crate::hash::keccak256(&preimage);
    Address::from_slice(&digest[12..])
}
