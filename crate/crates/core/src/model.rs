//! Physical model: units, channels, power-amplifier consumption, circuit
//! power and the scenario/schedule value types.
//!
//! Everything is SI internally (W, Hz, s, bit/s, linear gains). Conversions
//! from dB/dBm/Mbps happen at the edges.

use crate::error::{Error, Result};
use crate::oracle::OracleReport;
use std::fmt;
use std::str::FromStr;

/// Default parameters of the reference deployment.
pub mod defaults {
    pub const BANDWIDTH_HZ: f64 = 10e6;
    pub const FRAME_T_S: f64 = 10e-3;
    pub const N0_DBM_PER_HZ: f64 = -174.0;
    pub const LINK_DISTANCE_M: f64 = 50.0;
    pub const SELF_DISTANCE_M: f64 = 0.05;
    pub const ALPHA_DB: f64 = 60.0;
    /// Order: a, r, b.
    pub const P_MAX_DBM: [f64; 3] = [46.0, 37.0, 23.0];
    pub const P_IDLE_MW: [f64; 3] = [30.0, 15.0, 5.0];
    pub const P_BASE_MW: [f64; 3] = [100.0, 50.0, 20.0];
    pub const EPSILON_MW_PER_GBPS: f64 = 50.0;
    pub const ETA_MAX: f64 = 0.35;
    pub const PAPR_DB: f64 = 8.0;
    pub const ETPA_U: f64 = 0.0082;
    pub const RATE_MBPS: f64 = 32.5;
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Thermal noise power in W over `bandwidth_hz` for a density given in dBm/Hz.
pub fn noise_power(n0_dbm_per_hz: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_watts(n0_dbm_per_hz) * bandwidth_hz
}

/// Linear gain of the `103.8 + 21 log10(d)` dB path-loss law, with `distance`
/// in the law's native unit (km).
pub fn pathloss_gain(distance: f64) -> f64 {
    let loss_db = 103.8 + 21.0 * distance.log10();
    10f64.powf(-loss_db / 10.0)
}

/// Gain of a relay link `d_m` metres long.
pub fn link_gain(d_m: f64) -> f64 {
    pathloss_gain(d_m / 1000.0)
}

/// Residual self-interference gain after `alpha` (linear) of cancellation.
///
/// The pre-cancellation coupling reuses the path-loss law with the antenna
/// separation fed in directly, so 5 cm of separation couples as strongly as
/// a 50 m link before cancellation.
pub fn residual_self_gain(d_self_m: f64, alpha: f64) -> f64 {
    pathloss_gain(d_self_m) / alpha
}

/// Bits delivered per joule.
pub fn ee_from_energy(r_fl: f64, r_rl: f64, frame_t: f64, e_total: f64) -> Result<f64> {
    if !(e_total > 0.0) || !e_total.is_finite() {
        return Err(Error::InvalidParameter {
            name: "e_total",
            value: e_total,
            requirement: "must be positive and finite",
        });
    }
    Ok((r_fl + r_rl) * frame_t / e_total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    A,
    B,
    Relay,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Node::A => "a",
            Node::B => "b",
            Node::Relay => "r",
        })
    }
}

/// One value per node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerNode<T> {
    pub a: T,
    pub b: T,
    pub r: T,
}

impl<T> PerNode<T> {
    pub fn new(a: T, b: T, r: T) -> Self {
        Self { a, b, r }
    }

    pub fn get(&self, node: Node) -> &T {
        match node {
            Node::A => &self.a,
            Node::B => &self.b,
            Node::Relay => &self.r,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerNode<U> {
        PerNode {
            a: f(&self.a),
            b: f(&self.b),
            r: f(&self.r),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Node, &T)> {
        [
            (Node::A, &self.a),
            (Node::B, &self.b),
            (Node::Relay, &self.r),
        ]
        .into_iter()
    }
}

impl<T: Copy> PerNode<T> {
    pub fn splat(v: T) -> Self {
        Self { a: v, b: v, r: v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PaKind {
    /// Class-B stage, consumption grows with the square root of output power.
    Tpa,
    /// Envelope-tracking stage, affine consumption.
    Etpa,
}

impl PaKind {
    pub const ALL: [PaKind; 2] = [PaKind::Tpa, PaKind::Etpa];

    pub fn as_str(self) -> &'static str {
        match self {
            PaKind::Tpa => "tpa",
            PaKind::Etpa => "etpa",
        }
    }
}

impl fmt::Display for PaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PaKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tpa" => Ok(PaKind::Tpa),
            "etpa" => Ok(PaKind::Etpa),
            _ => Err(format!("unknown PA kind `{s}` (expected tpa or etpa)")),
        }
    }
}

/// Power-amplifier consumption model for one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaModel {
    pub kind: PaKind,
    /// Maximum output power, W.
    pub p_max: f64,
    /// Efficiency at `p_max`.
    pub eta_max: f64,
    /// Peak-to-average power ratio (linear). Only used by ETPA.
    pub kappa: f64,
    /// Static-loss factor of the ETPA. Zero gives the ideal (linear) PA.
    pub u: f64,
}

impl PaModel {
    pub fn tpa(p_max: f64, eta_max: f64) -> Result<Self> {
        Self::validated(PaModel {
            kind: PaKind::Tpa,
            p_max,
            eta_max,
            kappa: 1.0,
            u: 0.0,
        })
    }

    pub fn etpa(p_max: f64, eta_max: f64, kappa: f64, u: f64) -> Result<Self> {
        Self::validated(PaModel {
            kind: PaKind::Etpa,
            p_max,
            eta_max,
            kappa,
            u,
        })
    }

    /// Ideal PA: consumption `p / eta_max`.
    pub fn ideal(p_max: f64, eta_max: f64) -> Result<Self> {
        Self::etpa(p_max, eta_max, 1.0, 0.0)
    }

    /// Same limits with a different kind; `kappa`/`u` are kept for ETPA.
    pub fn with_kind(mut self, kind: PaKind) -> Self {
        self.kind = kind;
        self
    }

    fn validated(pa: PaModel) -> Result<Self> {
        pa.validate()?;
        Ok(pa)
    }

    pub fn validate(&self) -> Result<()> {
        positive("p_max", self.p_max)?;
        if !(self.eta_max > 0.0 && self.eta_max <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eta_max",
                value: self.eta_max,
                requirement: "must lie in (0, 1]",
            });
        }
        if !(self.kappa >= 1.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParameter {
                name: "kappa",
                value: self.kappa,
                requirement: "must be >= 1",
            });
        }
        if !(self.u >= 0.0) || !self.u.is_finite() {
            return Err(Error::InvalidParameter {
                name: "u",
                value: self.u,
                requirement: "must be >= 0",
            });
        }
        Ok(())
    }

    /// Consumed power at output `p`, without the range check.
    pub fn consumption_unchecked(&self, p: f64) -> f64 {
        match self.kind {
            PaKind::Tpa => (p * self.p_max).sqrt() / self.eta_max,
            PaKind::Etpa => {
                let uk = self.u * self.kappa;
                (p + uk * self.p_max) / ((1.0 + uk) * self.eta_max)
            }
        }
    }

    /// Consumed power at output `p`; errors outside `[0, p_max]`.
    pub fn consumption(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) || p > self.p_max {
            return Err(Error::PowerBudget {
                p,
                p_max: self.p_max,
            });
        }
        Ok(self.consumption_unchecked(p))
    }

    /// Consumption at zero output (the ETPA static offset).
    pub fn offset(&self) -> f64 {
        self.consumption_unchecked(0.0)
    }
}

pub fn pa_consumption(p: f64, pa: &PaModel) -> Result<f64> {
    pa.consumption(p)
}

/// Non-PA power draw of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeCircuit {
    /// Always-on baseband/RF power while active, W.
    pub p_base: f64,
    /// Power while idle, W.
    pub p_idle: f64,
    /// Dynamic processing power per bit/s, W/(bit/s).
    pub epsilon: f64,
}

impl NodeCircuit {
    pub fn new(p_base: f64, p_idle: f64, epsilon: f64) -> Result<Self> {
        let c = NodeCircuit {
            p_base,
            p_idle,
            epsilon,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn zero() -> Self {
        NodeCircuit {
            p_base: 0.0,
            p_idle: 0.0,
            epsilon: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("p_base", self.p_base)?;
        non_negative("p_idle", self.p_idle)?;
        non_negative("epsilon", self.epsilon)
    }
}

/// Transmit-mode draw: PA + dynamic processing + base power.
pub fn tx_circuit_power(node: &NodeCircuit, pa: &PaModel, p: f64, rate: f64) -> Result<f64> {
    Ok(pa.consumption(p)? + node.epsilon * rate + node.p_base)
}

/// Receive-mode draw: dynamic processing + base power.
pub fn rx_circuit_power(node: &NodeCircuit, rate: f64) -> f64 {
    node.epsilon * rate + node.p_base
}

/// Link gains, residual self-interference gains and noise powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSet {
    pub g_ar: f64,
    pub g_br: f64,
    pub g_ra: f64,
    pub g_rb: f64,
    pub gs_a: f64,
    pub gs_b: f64,
    pub gs_r: f64,
    pub sigma2_a: f64,
    pub sigma2_b: f64,
    pub sigma2_r: f64,
}

impl ChannelSet {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g_ar: f64,
        g_br: f64,
        g_ra: f64,
        g_rb: f64,
        gs: PerNode<f64>,
        sigma2: PerNode<f64>,
    ) -> Result<Self> {
        let c = ChannelSet {
            g_ar,
            g_br,
            g_ra,
            g_rb,
            gs_a: gs.a,
            gs_b: gs.b,
            gs_r: gs.r,
            sigma2_a: sigma2.a,
            sigma2_b: sigma2.b,
            sigma2_r: sigma2.r,
        };
        c.validate()?;
        Ok(c)
    }

    /// Reciprocal links (`g_ra = g_ar`, `g_rb = g_br`) with a common noise power.
    pub fn reciprocal(g_ar: f64, g_br: f64, gs: PerNode<f64>, sigma2: f64) -> Result<Self> {
        Self::new(g_ar, g_br, g_ar, g_br, gs, PerNode::splat(sigma2))
    }

    pub fn validate(&self) -> Result<()> {
        positive("g_ar", self.g_ar)?;
        positive("g_br", self.g_br)?;
        positive("g_ra", self.g_ra)?;
        positive("g_rb", self.g_rb)?;
        non_negative("gs_a", self.gs_a)?;
        non_negative("gs_b", self.gs_b)?;
        non_negative("gs_r", self.gs_r)?;
        positive("sigma2_a", self.sigma2_a)?;
        positive("sigma2_b", self.sigma2_b)?;
        positive("sigma2_r", self.sigma2_r)
    }

    /// Exchange the roles of the two terminals.
    pub fn swapped(&self) -> Self {
        ChannelSet {
            g_ar: self.g_br,
            g_br: self.g_ar,
            g_ra: self.g_rb,
            g_rb: self.g_ra,
            gs_a: self.gs_b,
            gs_b: self.gs_a,
            gs_r: self.gs_r,
            sigma2_a: self.sigma2_b,
            sigma2_b: self.sigma2_a,
            sigma2_r: self.sigma2_r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Full-duplex relay, one slot where all three nodes transmit.
    Fd1ts,
    /// Full-duplex relay, forward exchange in slot 1 and reverse in slot 2.
    Fd2ts,
    /// Half-duplex relay: terminals transmit in slot 1, relay broadcasts in slot 2.
    Hd2ts,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Fd1ts, Strategy::Fd2ts, Strategy::Hd2ts];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Fd1ts => "fd1ts",
            Strategy::Fd2ts => "fd2ts",
            Strategy::Hd2ts => "hd2ts",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fd1ts" => Ok(Strategy::Fd1ts),
            "fd2ts" => Ok(Strategy::Fd2ts),
            "hd2ts" | "hd" => Ok(Strategy::Hd2ts),
            _ => Err(format!(
                "unknown strategy `{s}` (expected fd1ts, fd2ts or hd2ts)"
            )),
        }
    }
}

/// How the dynamic circuit term `epsilon * rate` is attributed in the
/// single-slot and half-duplex energies.
///
/// `AsPrinted` lumps the circuit draw of a slot into one constant: the summed
/// base powers plus a shared `epsilon` times the slot's traffic; the single
/// slot uses twice the base powers and `epsilon * (r_fl + 2 r_rl)`, which is
/// not symmetric in the two directions. `FirstPrinciples` charges every
/// transmitting and receiving node for the bits it actually handles. Both
/// coincide for the two-slot full-duplex strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CircuitAccounting {
    #[default]
    AsPrinted,
    FirstPrinciples,
}

impl FromStr for CircuitAccounting {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "printed" | "as-printed" | "as_printed" => Ok(CircuitAccounting::AsPrinted),
            "first-principles" | "first_principles" => Ok(CircuitAccounting::FirstPrinciples),
            _ => Err(format!(
                "unknown accounting `{s}` (expected printed or first-principles)"
            )),
        }
    }
}

impl fmt::Display for CircuitAccounting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CircuitAccounting::AsPrinted => "printed",
            CircuitAccounting::FirstPrinciples => "first-principles",
        })
    }
}

/// One problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bandwidth_w: f64,
    pub frame_t: f64,
    /// Forward demand a -> b, bit/s.
    pub r_fl: f64,
    /// Reverse demand b -> a, bit/s.
    pub r_rl: f64,
    pub strategy: Strategy,
    pub pa: PerNode<PaModel>,
    pub circuit: PerNode<NodeCircuit>,
    pub channels: ChannelSet,
    /// Use the high-load approximation of the single-slot powers.
    pub asymptotic_1ts: bool,
    pub accounting: CircuitAccounting,
}

impl Scenario {
    /// The reference deployment: 50 m links, 60 dB cancellation, ETPA at every
    /// node, 32.5 Mbit/s each way, two-slot full duplex.
    pub fn reference() -> Self {
        use defaults::*;
        let sigma2 = noise_power(N0_DBM_PER_HZ, BANDWIDTH_HZ);
        let g = link_gain(LINK_DISTANCE_M);
        let gs = residual_self_gain(SELF_DISTANCE_M, db_to_linear(ALPHA_DB));
        let kappa = db_to_linear(PAPR_DB);
        let pa = |i: usize| PaModel {
            kind: PaKind::Etpa,
            p_max: dbm_to_watts(P_MAX_DBM[i]),
            eta_max: ETA_MAX,
            kappa,
            u: ETPA_U,
        };
        let eps = EPSILON_MW_PER_GBPS * 1e-12;
        let circ = |i: usize| NodeCircuit {
            p_base: P_BASE_MW[i] * 1e-3,
            p_idle: P_IDLE_MW[i] * 1e-3,
            epsilon: eps,
        };
        Scenario {
            bandwidth_w: BANDWIDTH_HZ,
            frame_t: FRAME_T_S,
            r_fl: RATE_MBPS * 1e6,
            r_rl: RATE_MBPS * 1e6,
            strategy: Strategy::Fd2ts,
            pa: PerNode::new(pa(0), pa(2), pa(1)),
            circuit: PerNode::new(circ(0), circ(2), circ(1)),
            channels: ChannelSet {
                g_ar: g,
                g_br: g,
                g_ra: g,
                g_rb: g,
                gs_a: gs,
                gs_b: gs,
                gs_r: gs,
                sigma2_a: sigma2,
                sigma2_b: sigma2,
                sigma2_r: sigma2,
            },
            asymptotic_1ts: false,
            accounting: CircuitAccounting::AsPrinted,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("bandwidth_w", self.bandwidth_w)?;
        positive("frame_t", self.frame_t)?;
        non_negative("r_fl", self.r_fl)?;
        non_negative("r_rl", self.r_rl)?;
        positive("r_fl + r_rl", self.r_fl + self.r_rl)?;
        for (_, pa) in self.pa.iter() {
            pa.validate()?;
        }
        for (_, c) in self.circuit.iter() {
            c.validate()?;
        }
        self.channels.validate()
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_rates(mut self, r_fl: f64, r_rl: f64) -> Self {
        self.r_fl = r_fl;
        self.r_rl = r_rl;
        self
    }

    pub fn with_pa_kind(mut self, kind: PaKind) -> Self {
        self.pa = self.pa.map(|p| p.with_kind(kind));
        self
    }

    pub fn with_accounting(mut self, accounting: CircuitAccounting) -> Self {
        self.accounting = accounting;
        self
    }

    pub fn with_asymptotic_1ts(mut self, on: bool) -> Self {
        self.asymptotic_1ts = on;
        self
    }

    /// Set the residual self-interference of every node from a cancellation
    /// level in dB, keeping the reference antenna separation.
    pub fn with_cancellation_db(mut self, alpha_db: f64) -> Self {
        let gs = residual_self_gain(defaults::SELF_DISTANCE_M, db_to_linear(alpha_db));
        self.channels.gs_a = gs;
        self.channels.gs_b = gs;
        self.channels.gs_r = gs;
        self
    }

    /// The same instance with terminals `a` and `b` exchanged.
    pub fn swapped_terminals(&self) -> Self {
        let mut s = self.clone();
        std::mem::swap(&mut s.r_fl, &mut s.r_rl);
        s.pa = PerNode::new(self.pa.b, self.pa.a, self.pa.r);
        s.circuit = PerNode::new(self.circuit.b, self.circuit.a, self.circuit.r);
        s.channels = self.channels.swapped();
        s
    }

    pub fn total_rate(&self) -> f64 {
        self.r_fl + self.r_rl
    }

    /// Sum of idle powers, W.
    pub fn idle_power(&self) -> f64 {
        self.circuit.a.p_idle + self.circuit.b.p_idle + self.circuit.r.p_idle
    }

    /// Sum of base powers, W.
    pub fn base_power(&self) -> f64 {
        self.circuit.a.p_base + self.circuit.b.p_base + self.circuit.r.p_base
    }

    /// Scenario-wide dynamic processing coefficient used by the compact
    /// circuit constants (mean over nodes).
    pub fn common_epsilon(&self) -> f64 {
        (self.circuit.a.epsilon + self.circuit.b.epsilon + self.circuit.r.epsilon) / 3.0
    }
}

/// Which broadcast constraint sets the single-slot relay power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveBroadcast {
    /// The relay-to-`a` link (reverse traffic) is the tighter one.
    Reverse,
    /// The relay-to-`b` link (forward traffic) is the tighter one.
    Forward,
}

/// An optimised allocation.
///
/// `t2` is zero for the single-slot strategy. Strategies with a single relay
/// power (single-slot and half-duplex) report it in both relay fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub strategy: Strategy,
    pub t1: f64,
    pub t2: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_r_fwd: f64,
    pub p_r_rev: f64,
    pub e_total: f64,
    /// Energy efficiency, bit/J.
    pub ee: f64,
    pub active_broadcast: Option<ActiveBroadcast>,
    pub oracle: Option<OracleReport>,
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            requirement: "must be positive and finite",
        })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            requirement: "must be non-negative and finite",
        })
    }
}
