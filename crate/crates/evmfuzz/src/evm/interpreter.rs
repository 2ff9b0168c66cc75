//! The stack-machine interpreter and the instrumented call mechanics.
//!
//! Low-level call failure never propagates: the parent frame sees 0 pushed
//! and keeps running, while the failed child's state delta is rolled back.
//! Revert, out-of-gas, and invalid operations abort only their own frame.

use std::collections::HashSet;

use crate::agent::AgentAction;
use crate::hash::keccak256;
use crate::opcode as op;
use crate::word::{byte_of, signed_lt, Address, Wei, Word};

use super::{
    compute_forwarded_gas, AccountKind, BlockContext, CallKind, CallOutcome, CallRecord,
    GasSchedule, WorldState, SEND_STIPEND,
};

pub const STACK_LIMIT: usize = 1024;
pub const CALL_DEPTH_LIMIT: usize = 1024;

/// Memory is capped instead of metered; blowing past the cap reads as
/// resource exhaustion.
const MEMORY_LIMIT: usize = 1 << 20;

/// Grow the stack before it runs out; call recursion up to the depth limit
/// is much deeper than default thread stacks allow.
const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_GROW_BYTES: usize = 8 * 1024 * 1024;

/// Result of executing a single opcode.
#[derive(Debug, PartialEq, Eq)]
pub enum Step {
    Continue,
    Halt(CallOutcome),
}

enum Flow {
    Continue,
    Halt(CallOutcome),
}

/// One execution frame: code, stack, memory, and the call record being
/// accumulated for it.
pub struct Frame {
    pub code: Vec<u8>,
    pub pc: usize,
    pub stack: Vec<Word>,
    pub memory: Vec<u8>,
    pub gas: u64,
    /// Account whose storage and balance this frame operates on.
    pub context_address: Address,
    /// Account whose code is running (differs under delegatecall).
    pub code_address: Address,
    pub caller: Address,
    pub callvalue: Wei,
    pub calldata: Vec<u8>,
    pub output: Vec<u8>,
    pub record: CallRecord,
    jumpdests: HashSet<usize>,
}

impl Frame {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        code: Vec<u8>,
        context_address: Address,
        code_address: Address,
        caller: Address,
        callvalue: Wei,
        calldata: Vec<u8>,
        gas: u64,
        record: CallRecord,
    ) -> Frame {
        let jumpdests = scan_jumpdests(&code);
        Frame {
            code,
            pc: 0,
            stack: Vec::new(),
            memory: Vec::new(),
            gas,
            context_address,
            code_address,
            caller,
            callvalue,
            calldata,
            output: Vec::new(),
            record,
            jumpdests,
        }
    }

    fn push(&mut self, value: Word) -> Result<(), CallOutcome> {
        if self.stack.len() >= STACK_LIMIT {
            return Err(CallOutcome::InvalidOp);
        }
        self.stack.push(value);
        Ok(())
    }

    fn pop(&mut self) -> Result<Word, CallOutcome> {
        self.stack.pop().ok_or(CallOutcome::InvalidOp)
    }

    fn charge(&mut self, cost: u64) -> Result<(), CallOutcome> {
        if self.gas < cost {
            self.gas = 0;
            return Err(CallOutcome::OutOfGas);
        }
        self.gas -= cost;
        Ok(())
    }

    fn mem_index(w: Word) -> Result<usize, CallOutcome> {
        if w > Word::from(MEMORY_LIMIT) {
            return Err(CallOutcome::OutOfGas);
        }
        Ok(w.as_usize())
    }

    fn mem_grow(&mut self, offset: usize, len: usize) -> Result<(), CallOutcome> {
        if len == 0 {
            return Ok(());
        }
        let end = offset.checked_add(len).ok_or(CallOutcome::OutOfGas)?;
        if end > MEMORY_LIMIT {
            return Err(CallOutcome::OutOfGas);
        }
        if self.memory.len() < end {
            self.memory.resize(end, 0);
        }
        Ok(())
    }

    fn mem_read(&mut self, offset: Word, len: Word) -> Result<Vec<u8>, CallOutcome> {
        let offset = Self::mem_index(offset)?;
        let len = Self::mem_index(len)?;
        self.mem_grow(offset, len)?;
        Ok(self.memory[offset..offset + len].to_vec())
    }

    fn mem_write(&mut self, offset: usize, bytes: &[u8]) -> Result<(), CallOutcome> {
        self.mem_grow(offset, bytes.len())?;
        self.memory[offset..offset + bytes.len()].copy_from_slice(bytes);
        Ok(())
    }

    fn trace(&mut self, opcode: u8) {
        if op::is_monitored(opcode) {
            if let Some(name) = op::mnemonic(opcode) {
                self.record.opcode_trace.push(name);
            }
        }
    }
}

/// JUMPDEST offsets, skipping PUSH immediates.
fn scan_jumpdests(code: &[u8]) -> HashSet<usize> {
    let mut dests = HashSet::new();
    let mut pc = 0;
    while pc < code.len() {
        let opcode = code[pc];
        if opcode == op::JUMPDEST {
            dests.insert(pc);
        }
        pc += 1 + op::push_width(opcode);
    }
    dests
}

/// Interpreter bound to one world state and block context.
pub struct Machine<'a> {
    pub state: &'a mut WorldState,
    pub ctx: &'a BlockContext,
    pub schedule: &'a GasSchedule,
    depth: usize,
}

impl<'a> Machine<'a> {
    pub fn new(state: &'a mut WorldState, ctx: &'a BlockContext, schedule: &'a GasSchedule) -> Machine<'a> {
        Machine { state, ctx, schedule, depth: 0 }
    }

    /// Runs a regular (value-carrying) call: transfers value, executes the
    /// callee, rolls back on failure. Returns the record, the gas returned
    /// to the caller, and the callee's output.
    ///
    /// Recursion can legitimately reach the 1024 call-depth limit, far past
    /// what a default thread stack tolerates, so the stack grows on demand.
    #[allow(clippy::too_many_arguments)]
    pub fn call_into(
        &mut self,
        payer: Address,
        apparent_caller: Address,
        callee: Address,
        input: &[u8],
        value: Wei,
        gas: u64,
        kind: CallKind,
    ) -> (CallRecord, u64, Vec<u8>) {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_GROW_BYTES, || {
            self.call_into_inner(payer, apparent_caller, callee, input, value, gas, kind)
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn call_into_inner(
        &mut self,
        payer: Address,
        apparent_caller: Address,
        callee: Address,
        input: &[u8],
        value: Wei,
        gas: u64,
        kind: CallKind,
    ) -> (CallRecord, u64, Vec<u8>) {
        let mut record = CallRecord::new(payer, callee, kind, input, value, gas);
        if self.depth >= CALL_DEPTH_LIMIT {
            record.outcome = CallOutcome::Revert;
            return (record, gas, Vec::new());
        }
        if self.state.balance_of(payer) < value {
            record.outcome = CallOutcome::BalanceTooLow;
            return (record, gas, Vec::new());
        }

        let snapshot = self.state.snapshot();
        if !self.state.accounts.contains_key(&callee) {
            self.state.create_account(callee, AccountKind::Eoa, Word::zero());
        }
        if !value.is_zero() {
            self.state.accounts.get_mut(&payer).expect("payer checked").balance -= value;
            self.state.accounts.get_mut(&callee).expect("just ensured").balance += value;
        }

        let callee_kind = self.state.accounts[&callee].kind;
        self.depth += 1;
        let (outcome, gas_left, output) = if callee_kind == AccountKind::Agent {
            let (outcome, gas_left) = self.agent_receive(callee, gas, &mut record);
            (outcome, gas_left, Vec::new())
        } else {
            let code = self.state.code_of(callee).to_vec();
            if code.is_empty() {
                (CallOutcome::Success, gas, Vec::new())
            } else {
                let mut frame = Frame::new(
                    code,
                    callee,
                    callee,
                    apparent_caller,
                    value,
                    input.to_vec(),
                    gas,
                    record,
                );
                let outcome = self.run_frame(&mut frame);
                let gas_left = frame.gas;
                let output = frame.output.clone();
                record = frame.record;
                (outcome, gas_left, output)
            }
        };
        self.depth -= 1;

        if outcome != CallOutcome::Success {
            self.state.restore(snapshot);
        }
        record.outcome = outcome;
        record.gas_used = gas - gas_left;
        (record, gas_left, output)
    }

    /// Runs target code in the caller's storage context. No value moves.
    fn delegate_into(
        &mut self,
        context_address: Address,
        preserved_caller: Address,
        preserved_value: Wei,
        target: Address,
        input: &[u8],
        gas: u64,
    ) -> (CallRecord, u64, Vec<u8>) {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_GROW_BYTES, || {
            self.delegate_into_inner(
                context_address,
                preserved_caller,
                preserved_value,
                target,
                input,
                gas,
            )
        })
    }

    fn delegate_into_inner(
        &mut self,
        context_address: Address,
        preserved_caller: Address,
        preserved_value: Wei,
        target: Address,
        input: &[u8],
        gas: u64,
    ) -> (CallRecord, u64, Vec<u8>) {
        let mut record =
            CallRecord::new(context_address, target, CallKind::DelegateCall, input, Word::zero(), gas);
        if self.depth >= CALL_DEPTH_LIMIT {
            record.outcome = CallOutcome::Revert;
            return (record, gas, Vec::new());
        }

        let is_agent =
            self.state.accounts.get(&target).map(|a| a.kind) == Some(AccountKind::Agent);
        let code = if is_agent { Vec::new() } else { self.state.code_of(target).to_vec() };
        if code.is_empty() {
            // Nothing to run; delegating to codeless targets trivially succeeds.
            return (record, gas, Vec::new());
        }

        let snapshot = self.state.snapshot();
        self.depth += 1;
        let mut frame = Frame::new(
            code,
            context_address,
            target,
            preserved_caller,
            preserved_value,
            input.to_vec(),
            gas,
            record,
        );
        let outcome = self.run_frame(&mut frame);
        self.depth -= 1;

        let gas_left = frame.gas;
        let output = frame.output.clone();
        record = frame.record;
        if outcome != CallOutcome::Success {
            self.state.restore(snapshot);
        }
        record.outcome = outcome;
        record.gas_used = gas - gas_left;
        (record, gas_left, output)
    }

    /// Native behavior of the attacker agent when a call reaches it.
    fn agent_receive(
        &mut self,
        agent_address: Address,
        gas: u64,
        record: &mut CallRecord,
    ) -> (CallOutcome, u64) {
        match self.state.agent.on_receive() {
            AgentAction::Accept => (CallOutcome::Success, gas),
            AgentAction::Burn(amount) => {
                if gas < amount {
                    (CallOutcome::OutOfGas, 0)
                } else {
                    (CallOutcome::Success, gas - amount)
                }
            }
            AgentAction::Reissue { target, calldata } => {
                if gas < self.schedule.call_base {
                    return (CallOutcome::Success, gas);
                }
                let forwarded = gas - self.schedule.call_base;
                record.opcode_trace.push("CALL");
                let (child, child_left, _) = self.call_into(
                    agent_address,
                    agent_address,
                    target,
                    &calldata,
                    Word::zero(),
                    forwarded,
                    CallKind::Call,
                );
                record.internal_calls.push(child);
                // The agent swallows the child's outcome, as a low-level
                // call site would.
                (CallOutcome::Success, child_left)
            }
        }
    }

    pub fn run_frame(&mut self, frame: &mut Frame) -> CallOutcome {
        loop {
            match self.step_interpreter(frame) {
                Step::Continue => {}
                Step::Halt(outcome) => return outcome,
            }
        }
    }

    /// Executes one opcode: deducts gas, pushes monitored opcodes onto the
    /// record's trace, and validates jump targets.
    pub fn step_interpreter(&mut self, frame: &mut Frame) -> Step {
        match self.exec_op(frame) {
            Ok(Flow::Continue) => Step::Continue,
            Ok(Flow::Halt(outcome)) => Step::Halt(outcome),
            Err(outcome) => Step::Halt(outcome),
        }
    }

    fn exec_op(&mut self, frame: &mut Frame) -> Result<Flow, CallOutcome> {
        if frame.pc >= frame.code.len() {
            return Ok(Flow::Halt(CallOutcome::Success));
        }
        let opcode = frame.code[frame.pc];
        let default = self.schedule.default_cost;
        match opcode {
            op::STOP => Ok(Flow::Halt(CallOutcome::Success)),

            op::ADD => self.binop(frame, |a, b| a.overflowing_add(b).0),
            op::MUL => self.binop(frame, |a, b| a.overflowing_mul(b).0),
            op::SUB => self.binop(frame, |a, b| a.overflowing_sub(b).0),
            op::DIV => self.binop(frame, |a, b| if b.is_zero() { Word::zero() } else { a / b }),
            op::MOD => self.binop(frame, |a, b| if b.is_zero() { Word::zero() } else { a % b }),
            op::EXP => self.binop(frame, |a, b| a.overflowing_pow(b).0),
            op::LT => self.binop(frame, |a, b| bool_word(a < b)),
            op::GT => self.binop(frame, |a, b| bool_word(a > b)),
            op::SLT => self.binop(frame, |a, b| bool_word(signed_lt(a, b))),
            op::SGT => self.binop(frame, |a, b| bool_word(signed_lt(b, a))),
            op::EQ => self.binop(frame, |a, b| bool_word(a == b)),
            op::AND => self.binop(frame, |a, b| a & b),
            op::OR => self.binop(frame, |a, b| a | b),
            op::XOR => self.binop(frame, |a, b| a ^ b),
            op::BYTE => self.binop(frame, byte_of),
            op::ISZERO => {
                frame.charge(default)?;
                let a = frame.pop()?;
                frame.push(bool_word(a.is_zero()))?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }
            op::NOT => {
                frame.charge(default)?;
                let a = frame.pop()?;
                frame.push(!a)?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::SHA3 => {
                let offset = frame.pop()?;
                let len = frame.pop()?;
                let len_usize = Frame::mem_index(len)?;
                let words = (len_usize as u64).div_ceil(32);
                frame.charge(self.schedule.sha3_base + self.schedule.sha3_per_word * words)?;
                let data = frame.mem_read(offset, len)?;
                frame.trace(op::SHA3);
                frame.push(Word::from_big_endian(&keccak256(&data)))?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::ADDRESS => self.push_env(frame, opcode, frame.context_address.to_word()),
            op::CALLER => self.push_env(frame, opcode, frame.caller.to_word()),
            op::CALLVALUE => self.push_env(frame, opcode, frame.callvalue),
            op::CALLDATASIZE => self.push_env(frame, opcode, Word::from(frame.calldata.len())),
            op::CODESIZE => self.push_env(frame, opcode, Word::from(frame.code.len())),
            op::TIMESTAMP => self.push_env(frame, opcode, self.ctx.timestamp),
            op::NUMBER => self.push_env(frame, opcode, self.ctx.number),
            op::PC => self.push_env(frame, opcode, Word::from(frame.pc)),
            op::GAS => {
                frame.charge(default)?;
                frame.push(Word::from(frame.gas))?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::BALANCE => {
                frame.charge(default)?;
                let address = Address::from_word(frame.pop()?);
                frame.trace(op::BALANCE);
                frame.push(self.state.balance_of(address))?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::CALLDATALOAD => {
                frame.charge(default)?;
                let offset = frame.pop()?;
                let mut buf = [0u8; 32];
                if offset <= Word::from(u32::MAX) {
                    let offset = offset.as_usize();
                    for (i, slot) in buf.iter_mut().enumerate() {
                        *slot = frame.calldata.get(offset + i).copied().unwrap_or(0);
                    }
                }
                frame.push(Word::from_big_endian(&buf))?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }
            op::CALLDATACOPY => {
                frame.charge(default)?;
                let mem_off = frame.pop()?;
                let data_off = frame.pop()?;
                let len = frame.pop()?;
                let bytes = slice_padded(&frame.calldata, data_off, len)?;
                frame.mem_write(Frame::mem_index(mem_off)?, &bytes)?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }
            op::CODECOPY => {
                frame.charge(default)?;
                let mem_off = frame.pop()?;
                let code_off = frame.pop()?;
                let len = frame.pop()?;
                let bytes = slice_padded(&frame.code, code_off, len)?;
                frame.mem_write(Frame::mem_index(mem_off)?, &bytes)?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::POP => {
                frame.charge(default)?;
                frame.pop()?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }
            op::MLOAD => {
                frame.charge(default)?;
                let offset = frame.pop()?;
                let bytes = frame.mem_read(offset, Word::from(32u8))?;
                frame.push(Word::from_big_endian(&bytes))?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }
            op::MSTORE => {
                frame.charge(default)?;
                let offset = frame.pop()?;
                let value = frame.pop()?;
                frame.mem_write(Frame::mem_index(offset)?, &value.to_big_endian())?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }
            op::MSTORE8 => {
                frame.charge(default)?;
                let offset = frame.pop()?;
                let value = frame.pop()?;
                frame.mem_write(Frame::mem_index(offset)?, &[buf_low_byte(value)])?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::SLOAD => {
                frame.charge(self.schedule.sload)?;
                let key = frame.pop()?;
                frame.trace(op::SLOAD);
                frame.push(self.state.storage_get(frame.context_address, key))?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }
            op::SSTORE => {
                frame.charge(self.schedule.sstore)?;
                let key = frame.pop()?;
                let value = frame.pop()?;
                frame.trace(op::SSTORE);
                let context = frame.context_address;
                let account = self
                    .state
                    .accounts
                    .get_mut(&context)
                    .expect("context account exists while executing");
                if value.is_zero() {
                    account.storage.remove(&key);
                } else {
                    account.storage.insert(key, value);
                }
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::JUMP => {
                frame.charge(default)?;
                let dest = frame.pop()?;
                frame.pc = validate_jump(frame, dest)?;
                Ok(Flow::Continue)
            }
            op::JUMPI => {
                frame.charge(default)?;
                let dest = frame.pop()?;
                let cond = frame.pop()?;
                if cond.is_zero() {
                    frame.pc += 1;
                } else {
                    frame.pc = validate_jump(frame, dest)?;
                }
                Ok(Flow::Continue)
            }
            op::JUMPDEST => {
                frame.charge(default)?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            _ if op::is_push(opcode) => {
                frame.charge(default)?;
                let width = op::push_width(opcode);
                let start = frame.pc + 1;
                let end = (start + width).min(frame.code.len());
                let mut buf = [0u8; 32];
                let slice = &frame.code[start..end];
                buf[32 - slice.len()..].copy_from_slice(slice);
                frame.push(Word::from_big_endian(&buf))?;
                frame.pc = start + width;
                Ok(Flow::Continue)
            }
            _ if (op::DUP1..=op::DUP16).contains(&opcode) => {
                frame.charge(default)?;
                let n = (opcode - op::DUP1) as usize + 1;
                if frame.stack.len() < n {
                    return Err(CallOutcome::InvalidOp);
                }
                let value = frame.stack[frame.stack.len() - n];
                frame.push(value)?;
                frame.pc += 1;
                Ok(Flow::Continue)
            }
            _ if (op::SWAP1..=op::SWAP16).contains(&opcode) => {
                frame.charge(default)?;
                let n = (opcode - op::SWAP1) as usize + 1;
                if frame.stack.len() < n + 1 {
                    return Err(CallOutcome::InvalidOp);
                }
                let top = frame.stack.len() - 1;
                frame.stack.swap(top, top - n);
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::LOG0 | op::LOG1 | op::LOG2 => {
                frame.charge(default)?;
                let offset = frame.pop()?;
                let len = frame.pop()?;
                for _ in 0..(opcode - op::LOG0) {
                    frame.pop()?;
                }
                let _payload = frame.mem_read(offset, len)?;
                frame.trace(opcode);
                frame.pc += 1;
                Ok(Flow::Continue)
            }

            op::CALL => self.exec_call(frame),
            op::DELEGATECALL => self.exec_delegatecall(frame),

            op::RETURN => {
                frame.charge(default)?;
                let offset = frame.pop()?;
                let len = frame.pop()?;
                frame.output = frame.mem_read(offset, len)?;
                Ok(Flow::Halt(CallOutcome::Success))
            }
            op::REVERT => {
                frame.charge(default)?;
                let offset = frame.pop()?;
                let len = frame.pop()?;
                frame.output = frame.mem_read(offset, len)?;
                Ok(Flow::Halt(CallOutcome::Revert))
            }
            op::SELFDESTRUCT => {
                frame.charge(self.schedule.selfdestruct)?;
                let beneficiary = Address::from_word(frame.pop()?);
                frame.trace(op::SELFDESTRUCT);
                let context = frame.context_address;
                if !self.state.accounts.contains_key(&beneficiary) {
                    self.state.create_account(beneficiary, AccountKind::Eoa, Word::zero());
                }
                let balance = self.state.balance_of(context);
                self.state.accounts.get_mut(&context).expect("context exists").balance = Word::zero();
                self.state.accounts.get_mut(&beneficiary).expect("just ensured").balance += balance;
                Ok(Flow::Halt(CallOutcome::Success))
            }

            _ => Err(CallOutcome::InvalidOp),
        }
    }

    fn binop(
        &mut self,
        frame: &mut Frame,
        f: impl Fn(Word, Word) -> Word,
    ) -> Result<Flow, CallOutcome> {
        frame.charge(self.schedule.default_cost)?;
        let a = frame.pop()?;
        let b = frame.pop()?;
        frame.push(f(a, b))?;
        frame.pc += 1;
        Ok(Flow::Continue)
    }

    fn push_env(&mut self, frame: &mut Frame, opcode: u8, value: Word) -> Result<Flow, CallOutcome> {
        frame.charge(self.schedule.default_cost)?;
        frame.trace(opcode);
        frame.push(value)?;
        frame.pc += 1;
        Ok(Flow::Continue)
    }

    fn exec_call(&mut self, frame: &mut Frame) -> Result<Flow, CallOutcome> {
        let gas_req = frame.pop()?;
        let to = Address::from_word(frame.pop()?);
        let value = frame.pop()?;
        let in_off = frame.pop()?;
        let in_len = frame.pop()?;
        let out_off = frame.pop()?;
        let out_len = frame.pop()?;

        let requested = clamp_u64(gas_req);
        let forwarded = compute_forwarded_gas(requested, frame.gas, value, self.schedule)
            .map_err(|_| CallOutcome::OutOfGas)?;
        frame.charge(self.schedule.call_base + forwarded)?;
        let input = frame.mem_read(in_off, in_len)?;

        let kind = if !value.is_zero() && input.is_empty() && forwarded == SEND_STIPEND {
            CallKind::Send
        } else {
            CallKind::Call
        };

        frame.trace(op::CALL);
        let (child, child_gas_left, output) =
            self.call_into(frame.context_address, frame.context_address, to, &input, value, forwarded, kind);
        let ok = child.outcome.is_success();
        frame.record.internal_calls.push(child);
        frame.gas += child_gas_left;

        if ok && !output.is_empty() {
            let copy_len = Frame::mem_index(out_len)?.min(output.len());
            if copy_len > 0 {
                frame.mem_write(Frame::mem_index(out_off)?, &output[..copy_len])?;
            }
        }
        frame.push(bool_word(ok))?;
        frame.pc += 1;
        Ok(Flow::Continue)
    }

    fn exec_delegatecall(&mut self, frame: &mut Frame) -> Result<Flow, CallOutcome> {
        let gas_req = frame.pop()?;
        let to = Address::from_word(frame.pop()?);
        let in_off = frame.pop()?;
        let in_len = frame.pop()?;
        let out_off = frame.pop()?;
        let out_len = frame.pop()?;

        let requested = clamp_u64(gas_req);
        let forwarded = compute_forwarded_gas(requested, frame.gas, Word::zero(), self.schedule)
            .map_err(|_| CallOutcome::OutOfGas)?;
        frame.charge(self.schedule.call_base + forwarded)?;
        let input = frame.mem_read(in_off, in_len)?;

        frame.trace(op::DELEGATECALL);
        let (child, child_gas_left, output) = self.delegate_into(
            frame.context_address,
            frame.caller,
            frame.callvalue,
            to,
            &input,
            forwarded,
        );
        let ok = child.outcome.is_success();
        frame.record.internal_calls.push(child);
        frame.gas += child_gas_left;

        if ok && !output.is_empty() {
            let copy_len = Frame::mem_index(out_len)?.min(output.len());
            if copy_len > 0 {
                frame.mem_write(Frame::mem_index(out_off)?, &output[..copy_len])?;
            }
        }
        frame.push(bool_word(ok))?;
        frame.pc += 1;
        Ok(Flow::Continue)
    }
}

fn bool_word(b: bool) -> Word {
    if b {
        Word::one()
    } else {
        Word::zero()
    }
}

fn buf_low_byte(w: Word) -> u8 {
    (w.low_u64() & 0xff) as u8
}

fn clamp_u64(w: Word) -> u64 {
    if w > Word::from(u64::MAX) {
        u64::MAX
    } else {
        w.low_u64()
    }
}

fn validate_jump(frame: &Frame, dest: Word) -> Result<usize, CallOutcome> {
    if dest > Word::from(frame.code.len()) {
        return Err(CallOutcome::InvalidOp);
    }
    let dest = dest.as_usize();
    if !frame.jumpdests.contains(&dest) {
        return Err(CallOutcome::InvalidOp);
    }
    Ok(dest)
}

/// Reads `[offset, offset+len)` from a data buffer, zero-padding past the end.
fn slice_padded(data: &[u8], offset: Word, len: Word) -> Result<Vec<u8>, CallOutcome> {
    let len = Frame::mem_index(len)?;
    let mut out = vec![0u8; len];
    if offset <= Word::from(u32::MAX) {
        let offset = offset.as_usize();
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = data.get(offset + i).copied().unwrap_or(0);
        }
    }
    Ok(out)
}
