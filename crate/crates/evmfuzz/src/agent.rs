//! The built-in attacker account.
//!
//! The agent is a native account kind recognized by the interpreter rather
//! than deployed bytecode: it initiates calls into a target contract and,
//! when called back (e.g. through a fallback-style transfer), re-issues the
//! stored call to attempt reentrancy. An alternative mode burns more gas
//! than a send stipend provides, forcing out-of-gas on stipend-limited
//! transfers.

use crate::evm::{execute_transaction, BlockContext, CallRecord, EvmError, GasSchedule, WorldState};
use crate::word::{Address, Wei};

/// Gas consumed by the expensive fallback; above the 2300 send stipend and
/// below any reasonable explicit call budget.
pub const AGENT_BURN_GAS: u64 = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentMode {
    /// Accept transfers and do nothing.
    Passive,
    /// Re-issue the stored call on every receive, up to the reentry limit.
    Reentrant,
    /// Burn more gas than a send stipend before returning.
    ExpensiveFallback,
}

#[derive(Debug, Clone)]
pub struct AgentState {
    pub stored_target: Option<Address>,
    pub stored_calldata: Vec<u8>,
    pub reentry_depth: u32,
    pub reentry_limit: u32,
    pub mode: AgentMode,
}

impl Default for AgentState {
    fn default() -> Self {
        AgentState {
            stored_target: None,
            stored_calldata: Vec::new(),
            reentry_depth: 0,
            reentry_limit: 2,
            mode: AgentMode::Passive,
        }
    }
}

/// What the interpreter should do on behalf of the agent when a call
/// reaches it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentAction {
    /// Return success without touching anything.
    Accept,
    /// Consume this much gas, failing out-of-gas if less is available.
    Burn(u64),
    /// Re-issue the stored call with the gas available.
    Reissue { target: Address, calldata: Vec<u8> },
}

impl AgentState {
    /// Decides the agent's reaction to an incoming call. Bumps the reentry
    /// counter when it commits to a reentrant call, which bounds recursion
    /// regardless of what the target does.
    pub fn on_receive(&mut self) -> AgentAction {
        match self.mode {
            AgentMode::Passive => AgentAction::Accept,
            AgentMode::ExpensiveFallback => AgentAction::Burn(AGENT_BURN_GAS),
            AgentMode::Reentrant => match self.stored_target {
                Some(target) if self.reentry_depth < self.reentry_limit => {
                    self.reentry_depth += 1;
                    AgentAction::Reissue { target, calldata: self.stored_calldata.clone() }
                }
                _ => AgentAction::Accept,
            },
        }
    }

    /// Arms the agent for a new campaign call: remembers what to re-issue
    /// and resets the reentry counter.
    pub fn arm(&mut self, target: Address, calldata: &[u8]) {
        self.stored_target = Some(target);
        self.stored_calldata = calldata.to_vec();
        self.reentry_depth = 0;
    }
}

/// Issues an attack call from the agent: stores (target, calldata) so the
/// agent can re-enter, then executes the transaction. The resulting record
/// tree is the attack trace.
#[allow(clippy::too_many_arguments)]
pub fn agent_initiate(
    state: &mut WorldState,
    agent: Address,
    target: Address,
    calldata: &[u8],
    value: Wei,
    gas: u64,
    ctx: &BlockContext,
    schedule: &GasSchedule,
) -> Result<CallRecord, EvmError> {
    state.agent.arm(target, calldata);
    execute_transaction(state, agent, target, calldata, value, gas, ctx, schedule)
}
