//! End-to-end fuzzing campaigns: deploy the corpus into an in-memory chain,
//! run one isolated session per contract, evaluate oracles, and aggregate a
//! deterministic report.
//!
//! Sessions are independent: each gets its own copy of the freshly deployed
//! world and its own seeded RNG, so contracts may be fuzzed in parallel
//! without any session observing another's effects.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::abi::ContractAbi;
use crate::agent::{agent_initiate, AgentMode};
use crate::analysis::{
    build_selector_index, find_function_selectors, scan_transfer_capability, SelectorIndex,
    SelectorUsage, TransferCapability,
};
use crate::corpus::{load_corpus, ContractArtifact, CorpusError};
use crate::evm::{
    deploy_contract, execute_transaction, AccountKind, BlockContext, CallRecord, EvmError,
    GasSchedule, WorldState,
};
use crate::hash::keccak256;
use crate::inputgen::{
    build_private_pool, generate_call_pool, select_next_call, AddressEnv, CallerBalances,
    CallerKind, FuzzCall,
};
use crate::oracle::{
    check_freezing_ether, evaluate_all, OracleKind, OracleVerdict, SessionStats, TraceInfo,
    ALL_ORACLES,
};
use crate::report::{CampaignEcho, ContractReport, Report};
use crate::word::{Address, Word};

/// Externally owned account that deploys the corpus.
pub const CREATOR: Address = Address([0x11; 20]);
/// Externally owned account with no relationship to any contract.
pub const PLAIN_EOA: Address = Address([0x22; 20]);
/// The native attacker agent.
pub const AGENT: Address = Address([0x33; 20]);
/// A well-known library account fixtures can hardcode as a delegate target.
pub const LIBRARY: Address = Address([0x44; 20]);

pub const CREATOR_BALANCE: u64 = 100_000_000_000_000;
pub const EOA_BALANCE: u64 = 1_000_000_000;
pub const GENESIS_TIMESTAMP: u64 = 1_600_000_000;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub corpus_dir: PathBuf,
    pub seed: u64,
    pub k: usize,
    pub max_calls_per_contract: usize,
    pub gas_budget: u64,
    pub enabled_oracles: Vec<OracleKind>,
    pub reentry_limit: u32,
    /// Value draws stay below caller balance / divisor.
    pub value_divisor: u64,
    /// Agent modes exercised by the targeted attack passes, in order.
    pub attack_modes: Vec<AgentMode>,
    pub output_path: Option<PathBuf>,
    pub gas_overrides: BTreeMap<String, u64>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            corpus_dir: PathBuf::from("corpus"),
            seed: 42,
            k: 10,
            max_calls_per_contract: 200,
            gas_budget: 1_000_000,
            enabled_oracles: ALL_ORACLES.to_vec(),
            reentry_limit: 2,
            value_divisor: 16,
            attack_modes: vec![AgentMode::Reentrant, AgentMode::ExpensiveFallback],
            output_path: None,
            gas_overrides: BTreeMap::new(),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.k == 0 {
            return Err(CampaignError::ConfigInvalid("k must be at least 1".into()));
        }
        if self.gas_budget == 0 {
            return Err(CampaignError::ConfigInvalid("gas budget must be nonzero".into()));
        }
        if self.enabled_oracles.is_empty() {
            return Err(CampaignError::ConfigInvalid("no oracles enabled".into()));
        }
        if self.value_divisor == 0 {
            return Err(CampaignError::ConfigInvalid("value divisor must be nonzero".into()));
        }
        Ok(())
    }

    pub fn schedule(&self) -> GasSchedule {
        let mut schedule = GasSchedule::default();
        schedule.apply_overrides(&self.gas_overrides);
        schedule
    }
}

/// How sessions are scheduled across contracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub enum ExecutionMode {
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}


pub fn address_env() -> AddressEnv {
    AddressEnv { creator: CREATOR, plain_eoa: PLAIN_EOA, agent: AGENT }
}

/// Fresh chain with the fuzzer's own accounts installed.
pub fn genesis_world(reentry_limit: u32) -> (WorldState, BlockContext) {
    let mut world = WorldState::default();
    world.create_account(CREATOR, AccountKind::Eoa, Word::from(CREATOR_BALANCE));
    world.create_account(PLAIN_EOA, AccountKind::Eoa, Word::from(EOA_BALANCE));
    world.create_account(AGENT, AccountKind::Agent, Word::from(EOA_BALANCE));
    world.create_account(LIBRARY, AccountKind::Contract, Word::zero());
    world.accounts.get_mut(&LIBRARY).expect("just created").code = vec![0x00]; // STOP
    world.agent.reentry_limit = reentry_limit;
    let ctx = BlockContext { timestamp: Word::from(GENESIS_TIMESTAMP), number: Word::one() };
    (world, ctx)
}

/// One deployed contract ready for fuzzing.
#[derive(Debug, Clone)]
pub struct DeployedContract {
    pub name: String,
    pub address: Address,
    pub abi: ContractAbi,
    pub usage: SelectorUsage,
    pub flags: TransferCapability,
}

/// The shared pre-session world: everything deployed, statically analyzed,
/// and indexed.
pub struct PreparedCampaign {
    pub base_world: WorldState,
    pub base_ctx: BlockContext,
    pub contracts: Vec<DeployedContract>,
    pub index: SelectorIndex,
}

/// Deploys every artifact (workflow steps 1-2): endowments move from the
/// creator, runtime code is statically analyzed, and the global selector
/// index is built over the whole corpus.
pub fn prepare_campaign(
    artifacts: &[ContractArtifact],
    config: &CampaignConfig,
) -> PreparedCampaign {
    let schedule = config.schedule();
    let (mut world, ctx) = genesis_world(config.reentry_limit);
    let mut contracts = Vec::new();

    for artifact in artifacts {
        match deploy_contract(
            &mut world,
            CREATOR,
            &artifact.creation_code,
            &artifact.constructor_args,
            artifact.endowment,
            &ctx,
            &schedule,
        ) {
            Ok(address) => {
                let runtime = world.code_of(address).to_vec();
                let usage = find_function_selectors(&runtime, &artifact.abi.functions);
                let flags = scan_transfer_capability(&runtime);
                contracts.push(DeployedContract {
                    name: artifact.name.clone(),
                    address,
                    abi: artifact.abi.clone(),
                    usage,
                    flags,
                });
            }
            Err(error) => {
                eprintln!("warning: deploy failed for `{}`: {error}", artifact.name);
            }
        }
    }

    let corpus_index: Vec<(Address, Vec<crate::abi::AbiFunction>)> =
        contracts.iter().map(|c| (c.address, c.abi.functions.clone())).collect();
    let index = build_selector_index(&corpus_index);

    PreparedCampaign { base_world: world, base_ctx: ctx, contracts, index }
}

/// Everything one fuzz session produced.
pub struct SessionOutcome {
    pub report: ContractReport,
    pub traces: Vec<CallRecord>,
}

fn session_rng(seed: u64, contract_index: usize) -> ChaCha12Rng {
    let mut preimage = Vec::with_capacity(16);
    preimage.extend_from_slice(&seed.to_be_bytes());
    preimage.extend_from_slice(&(contract_index as u64).to_be_bytes());
    ChaCha12Rng::from_seed(keccak256(&preimage))
}

/// Per-contract fuzzing state: an isolated copy of the deployed world, a
/// derived RNG, and the oracle bookkeeping accumulated call by call.
struct Session<'a> {
    contract: &'a DeployedContract,
    config: &'a CampaignConfig,
    schedule: GasSchedule,
    env: AddressEnv,
    world: WorldState,
    ctx: BlockContext,
    rng: ChaCha12Rng,
    stats: SessionStats,
    verdicts: BTreeMap<OracleKind, OracleVerdict>,
    coverage: std::collections::BTreeSet<String>,
    traces: Vec<CallRecord>,
    calls_executed: usize,
    collect_traces: bool,
}

impl Session<'_> {
    /// Executes one fuzz call, advances the block context, and feeds the
    /// resulting trace to the per-trace oracles and session statistics.
    fn run_call(&mut self, call: &FuzzCall, override_value: Option<Word>) {
        let mut call = call.clone();
        if let Some(value) = override_value {
            call.value = value;
        }
        let caller = self.env.resolve(call.caller_kind);
        let result: Result<CallRecord, EvmError> = match call.caller_kind {
            CallerKind::Agent => agent_initiate(
                &mut self.world,
                caller,
                call.target,
                &call.calldata,
                call.value,
                call.gas_budget,
                &self.ctx,
                &self.schedule,
            ),
            _ => execute_transaction(
                &mut self.world,
                caller,
                call.target,
                &call.calldata,
                call.value,
                call.gas_budget,
                &self.ctx,
                &self.schedule,
            ),
        };
        self.ctx.advance();
        let Ok(root) = result else { return };
        self.calls_executed += 1;

        if root.outcome.is_success() {
            if let Some(fn_abi) = &call.function {
                self.coverage.insert(fn_abi.canonical_signature.clone());
            }
        }
        self.stats.observe_balance(self.world.balance_of(self.contract.address));
        self.stats.observe_trace(&root, &call);

        let info = TraceInfo {
            contract: self.contract.address,
            agent: AGENT,
            top_input: &call.calldata,
            triggering: &call,
        };
        for verdict in evaluate_all(&root, &info, &self.config.enabled_oracles) {
            self.verdicts.entry(verdict.kind).or_insert(verdict);
        }
        if self.collect_traces {
            self.traces.push(root);
        }
    }
}

/// Runs the full fuzz session for one contract (workflow steps 3-5):
/// private pools, call-pool generation, randomized execution interleaved
/// with agent attack passes, and per-trace plus per-session oracles.
pub fn run_contract_session(
    prepared: &PreparedCampaign,
    contract_index: usize,
    config: &CampaignConfig,
    collect_traces: bool,
) -> SessionOutcome {
    let contract = &prepared.contracts[contract_index];
    let mut session = Session {
        contract,
        config,
        schedule: config.schedule(),
        env: address_env(),
        world: prepared.base_world.clone(),
        ctx: prepared.base_ctx,
        rng: session_rng(config.seed, contract_index),
        stats: SessionStats::new(contract.address, contract.flags),
        verdicts: BTreeMap::new(),
        coverage: Default::default(),
        traces: Vec::new(),
        calls_executed: 0,
        collect_traces,
    };

    // Per-function private pools from the selector analysis.
    let mut pools: BTreeMap<String, Vec<Address>> = BTreeMap::new();
    for fn_abi in &contract.abi.functions {
        let pool = build_private_pool(fn_abi, &contract.usage, &prepared.index, contract.address);
        pools.insert(fn_abi.canonical_signature.clone(), pool);
    }

    let balances = CallerBalances {
        creator: session.world.balance_of(CREATOR),
        plain_eoa: session.world.balance_of(PLAIN_EOA),
        agent: session.world.balance_of(AGENT),
        value_divisor: config.value_divisor,
    };
    let pool = generate_call_pool(
        contract.address,
        &contract.abi,
        &pools,
        &session.env,
        &balances,
        &mut session.rng,
        config.k,
        config.gas_budget,
    );
    assert_eq!(
        pool.len(),
        crate::inputgen::expected_pool_size(&contract.abi, config.k),
        "call pool for `{}` violates the pool-size law",
        contract.name
    );

    // A zero call budget disables fuzzing outright: nothing executes, no
    // balance is ever observed, no oracle can fire.
    let fuzzing_enabled = config.max_calls_per_contract > 0;

    // Step 4a: randomized pool fuzzing with the agent armed for reentry.
    session.world.agent.mode = AgentMode::Reentrant;
    if fuzzing_enabled && !pool.is_empty() {
        for _ in 0..config.max_calls_per_contract {
            let call = select_next_call(&pool, &mut session.rng).expect("pool checked nonempty");
            session.run_call(call, None);
        }
    }

    // Step 4b: targeted agent attack passes. For every function (and the
    // fallback) replay agent calls under each configured mode: the
    // reentrant agent first, then the expensive fallback that starves send
    // stipends. Valued calls run twice: the block timestamp advances by an
    // odd amount per transaction, so consecutive runs cover both timestamp
    // parities.
    for &mode in &config.attack_modes {
        if !fuzzing_enabled {
            break;
        }
        session.world.agent.mode = mode;
        let mut groups: Vec<Option<String>> =
            contract.abi.functions.iter().map(|f| Some(f.canonical_signature.clone())).collect();
        if contract.abi.has_fallback {
            groups.push(None);
        }
        for group in groups {
            for valued in [false, true] {
                let call = pool.iter().find(|c| {
                    c.caller_kind == CallerKind::Agent
                        && c.function.as_ref().map(|f| f.canonical_signature.clone()) == group
                        && c.value.is_zero() != valued
                });
                let Some(call) = call else { continue };
                let repeats = if valued { 2 } else { 1 };
                for _ in 0..repeats {
                    let value = valued.then(|| {
                        crate::inputgen::draw_value(
                            session.world.balance_of(AGENT),
                            config.value_divisor,
                            &mut session.rng,
                        )
                    });
                    session.run_call(call, value);
                }
            }
        }
    }

    // Step 5: the per-session oracle.
    if config.enabled_oracles.contains(&OracleKind::FreezingEther) {
        if let Some(verdict) = check_freezing_ether(contract.address, &session.stats) {
            session.verdicts.entry(verdict.kind).or_insert(verdict);
        }
    }

    let report = ContractReport {
        name: contract.name.clone(),
        address: contract.address,
        calls_executed: session.calls_executed,
        coverage: session.coverage.into_iter().collect(),
        verdicts: session.verdicts.into_values().collect(),
    };
    SessionOutcome { report, traces: session.traces }
}

fn run_sessions(
    prepared: &PreparedCampaign,
    config: &CampaignConfig,
    mode: ExecutionMode,
    collect_traces: bool,
) -> Vec<SessionOutcome> {
    match mode {
        ExecutionMode::Sequential => (0..prepared.contracts.len())
            .map(|i| run_contract_session(prepared, i, config, collect_traces))
            .collect(),
        #[cfg(feature = "parallel")]
        ExecutionMode::Parallel => {
            use rayon::prelude::*;
            (0..prepared.contracts.len())
                .into_par_iter()
                .map(|i| run_contract_session(prepared, i, config, collect_traces))
                .collect()
        }
    }
}

fn assemble_report(config: &CampaignConfig, outcomes: Vec<SessionOutcome>) -> Report {
    let mut totals: BTreeMap<String, usize> = ALL_ORACLES
        .iter()
        .map(|kind| (kind.name().to_string(), 0))
        .collect();
    let mut contracts = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        for verdict in &outcome.report.verdicts {
            *totals.entry(verdict.kind.name().to_string()).or_insert(0) += 1;
        }
        contracts.push(outcome.report);
    }
    Report {
        schema: 1,
        campaign: CampaignEcho {
            seed: config.seed,
            k: config.k,
            max_calls_per_contract: config.max_calls_per_contract,
            gas_budget: config.gas_budget,
            reentry_limit: config.reentry_limit,
            oracles: config.enabled_oracles.iter().map(|k| k.name().to_string()).collect(),
        },
        contracts,
        totals,
    }
}

/// Runs the whole campaign over pre-loaded artifacts.
pub fn run_campaign_with_artifacts(
    config: &CampaignConfig,
    artifacts: &[ContractArtifact],
    mode: ExecutionMode,
) -> Result<Report, CampaignError> {
    config.validate()?;
    let prepared = prepare_campaign(artifacts, config);
    let outcomes = run_sessions(&prepared, config, mode, false);
    Ok(assemble_report(config, outcomes))
}

/// Loads the corpus from `config.corpus_dir` and runs the campaign.
pub fn run_campaign(config: &CampaignConfig) -> Result<Report, CampaignError> {
    config.validate()?;
    let artifacts = load_corpus(&config.corpus_dir)?;
    run_campaign_with_artifacts(config, &artifacts, ExecutionMode::default())
}

/// Executed traces grouped per contract name.
pub type ContractTraces = Vec<(String, Vec<CallRecord>)>;

/// Campaign variant that also returns every executed trace per contract;
/// test suites use this to assert trace-level invariants.
pub fn run_campaign_with_traces(
    config: &CampaignConfig,
    artifacts: &[ContractArtifact],
) -> Result<(Report, ContractTraces), CampaignError> {
    config.validate()?;
    let prepared = prepare_campaign(artifacts, config);
    let outcomes = run_sessions(&prepared, config, ExecutionMode::Sequential, true);
    let mut traces = Vec::with_capacity(outcomes.len());
    let mut kept = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        traces.push((outcome.report.name.clone(), outcome.traces));
        kept.push(SessionOutcome { report: outcome.report, traces: Vec::new() });
    }
    Ok((assemble_report(config, kept), traces))
}

/// Static-analysis-only pipeline backing the `analyze` subcommand.
#[derive(Debug, serde::Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub contracts: Vec<AnalyzedContract>,
    pub selector_index: BTreeMap<String, Vec<Address>>,
}

#[derive(Debug, serde::Serialize)]
pub struct AnalyzedContract {
    pub name: String,
    pub address: Address,
    pub functions: Vec<String>,
    pub selector_usage: BTreeMap<String, Vec<String>>,
    pub transfer_capability: TransferCapability,
}

pub fn run_analysis(config: &CampaignConfig) -> Result<AnalysisReport, CampaignError> {
    let artifacts = load_corpus(&config.corpus_dir)?;
    let prepared = prepare_campaign(&artifacts, config);
    let contracts = prepared
        .contracts
        .iter()
        .map(|c| AnalyzedContract {
            name: c.name.clone(),
            address: c.address,
            functions: c.abi.functions.iter().map(|f| f.canonical_signature.clone()).collect(),
            selector_usage: c
                .usage
                .map
                .iter()
                .map(|(sig, selectors)| {
                    (sig.clone(), selectors.iter().map(|s| format!("0x{}", hex::encode(s))).collect())
                })
                .collect(),
            transfer_capability: c.flags,
        })
        .collect();
    let selector_index = prepared
        .index
        .map
        .iter()
        .map(|(selector, addresses)| (format!("0x{}", hex::encode(selector)), addresses.clone()))
        .collect();
    Ok(AnalysisReport { schema: 1, contracts, selector_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn fixture_dir() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        fixtures::write_corpus(dir.path()).unwrap();
        dir
    }

    #[test]
    fn zero_call_budget_executes_nothing() {
        let dir = fixture_dir();
        let config = CampaignConfig {
            corpus_dir: dir.path().to_path_buf(),
            max_calls_per_contract: 0,
            ..Default::default()
        };
        let report = run_campaign(&config).unwrap();
        assert!(!report.contracts.is_empty());
        for contract in &report.contracts {
            assert_eq!(contract.calls_executed, 0);
            assert!(contract.verdicts.is_empty());
            assert!(contract.coverage.is_empty());
        }
        assert_eq!(report.total_verdicts(), 0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let config = CampaignConfig { k: 0, ..Default::default() };
        assert!(matches!(config.validate(), Err(CampaignError::ConfigInvalid(_))));
        let config = CampaignConfig { gas_budget: 0, ..Default::default() };
        assert!(matches!(config.validate(), Err(CampaignError::ConfigInvalid(_))));
        let config = CampaignConfig { enabled_oracles: Vec::new(), ..Default::default() };
        assert!(matches!(config.validate(), Err(CampaignError::ConfigInvalid(_))));
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let config =
            CampaignConfig { corpus_dir: dir.path().to_path_buf(), ..Default::default() };
        assert!(matches!(run_campaign(&config), Err(CampaignError::Corpus(_))));
    }

    #[test]
    fn oracle_filter_limits_verdicts() {
        let dir = fixture_dir();
        let config = CampaignConfig {
            corpus_dir: dir.path().to_path_buf(),
            enabled_oracles: vec![crate::oracle::OracleKind::Reentrancy],
            max_calls_per_contract: 120,
            ..Default::default()
        };
        let report = run_campaign(&config).unwrap();
        for contract in &report.contracts {
            for verdict in &contract.verdicts {
                assert_eq!(verdict.kind, crate::oracle::OracleKind::Reentrancy);
            }
        }
        assert!(report.totals["reentrancy"] >= 1);
        assert_eq!(report.totals["gasless-send"], 0);
    }

    #[test]
    fn analysis_pipeline_reports_selector_usage_and_index() {
        let dir = fixture_dir();
        let config =
            CampaignConfig { corpus_dir: dir.path().to_path_buf(), ..Default::default() };
        let analysis = run_analysis(&config).unwrap();
        assert_eq!(analysis.schema, 1);

        let spender = analysis.contracts.iter().find(|c| c.name == "spender").unwrap();
        let used = &spender.selector_usage["pay(address,uint256)"];
        assert_eq!(used, &vec!["0xa9059cbb".to_string()]);
        assert!(!spender.transfer_capability.has_delegatecall);
        assert!(spender.transfer_capability.has_call);

        let token = analysis.contracts.iter().find(|c| c.name == "token").unwrap();
        let holders = &analysis.selector_index["0xa9059cbb"];
        assert!(holders.contains(&token.address));

        let frozen = analysis.contracts.iter().find(|c| c.name == "frozen_wallet").unwrap();
        assert!(frozen.transfer_capability.has_delegatecall);
        assert!(!frozen.transfer_capability.has_call);
        assert!(!frozen.transfer_capability.has_selfdestruct);
    }

    #[test]
    fn genesis_accounts_are_installed() {
        let (world, ctx) = genesis_world(2);
        assert_eq!(world.accounts[&CREATOR].kind, crate::evm::AccountKind::Eoa);
        assert_eq!(world.accounts[&AGENT].kind, crate::evm::AccountKind::Agent);
        assert_eq!(world.accounts[&LIBRARY].code, vec![0x00]);
        assert_eq!(world.agent.reentry_limit, 2);
        assert_eq!(ctx.timestamp, crate::word::Word::from(GENESIS_TIMESTAMP));
    }

    #[test]
    fn private_pools_route_token_addresses_into_spender_calls() {
        let dir = fixture_dir();
        let config =
            CampaignConfig { corpus_dir: dir.path().to_path_buf(), ..Default::default() };
        let artifacts = crate::corpus::load_corpus(dir.path()).unwrap();
        let prepared = prepare_campaign(&artifacts, &config);

        let spender = prepared.contracts.iter().find(|c| c.name == "spender").unwrap();
        let token = prepared.contracts.iter().find(|c| c.name == "token").unwrap();
        let pay = &spender.abi.functions[0];
        let pool = crate::inputgen::build_private_pool(
            pay,
            &spender.usage,
            &prepared.index,
            spender.address,
        );
        assert_eq!(pool, vec![token.address]);
    }
}
