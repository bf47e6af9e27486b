//! Sector cost `J_i = L_i + κ Σ_{j≠i} L_j`, the potential
//! `Φ = κ Σ_i L_i + (1−κ) Σ_{i∈M_o} C_ii`, and the self-prioritization bound.
//!
//! Cost and potential values are produced as [`Scaled`] numbers: when κ is a
//! ratio `num/den` they are exact integers in units of `1/den`, so equality
//! checks between deltas never depend on rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Sub;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::airspace::{ActionProfile, Footprint, LoadTable, Scenario, SectorId};
use crate::error::ModelError;

/// Cooperativeness factor in `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub enum Kappa {
    Ratio { num: u64, den: u64 },
    Real(f64),
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Kappa {
    pub const ZERO: Kappa = Kappa::Ratio { num: 0, den: 1 };
    pub const ONE: Kappa = Kappa::Ratio { num: 1, den: 1 };

    pub fn ratio(num: u64, den: u64) -> Result<Self, ModelError> {
        if den == 0 || num > den {
            return Err(ModelError::KappaRange(format!("{num}/{den}")));
        }
        let g = gcd(num, den).max(1);
        Ok(Kappa::Ratio {
            num: num / g,
            den: den / g,
        })
    }

    pub fn real(value: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(ModelError::KappaRange(value.to_string()));
        }
        if value == 0.0 {
            return Ok(Self::ZERO);
        }
        if value == 1.0 {
            return Ok(Self::ONE);
        }
        Ok(Kappa::Real(value))
    }

    pub fn value(&self) -> f64 {
        match *self {
            Kappa::Ratio { num, den } => num as f64 / den as f64,
            Kappa::Real(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Kappa::Ratio { .. })
    }

    pub fn is_zero(&self) -> bool {
        self.value() == 0.0
    }

    pub fn is_one(&self) -> bool {
        self.value() == 1.0
    }

    /// `full + κ·weighted + (1−κ)·complement`.
    pub fn mix(&self, full: u64, weighted: u64, complement: u64) -> Scaled {
        match *self {
            Kappa::Ratio { num, den } => Scaled::Exact(
                den as i128 * full as i128 + num as i128 * weighted as i128 + (den - num) as i128 * complement as i128,
            ),
            Kappa::Real(k) => Scaled::Real(full as f64 + k * weighted as f64 + (1.0 - k) * complement as f64),
        }
    }

    /// Converts a scaled value back to aircraft-bins.
    pub fn unscale(&self, value: Scaled) -> f64 {
        match (*self, value) {
            (Kappa::Ratio { den, .. }, Scaled::Exact(v)) => v as f64 / den as f64,
            (_, Scaled::Real(v)) => v,
            (Kappa::Real(_), Scaled::Exact(v)) => v as f64,
        }
    }
}

impl PartialEq for Kappa {
    fn eq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Kappa::Ratio { num: a, den: b }, Kappa::Ratio { num: c, den: d }) => a == c && b == d,
            _ => self.value() == other.value(),
        }
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Kappa::Ratio { num, den: 1 } => write!(f, "{num}"),
            Kappa::Ratio { num, den } => {
                // Decimal form when the ratio is a terminating power-of-ten fraction.
                let mut d = den;
                let mut digits = 0u32;
                while d % 10 == 0 {
                    d /= 10;
                    digits += 1;
                }
                if d == 1 {
                    let int = num / den;
                    let frac = num % den;
                    write!(f, "{int}.{frac:0width$}", width = digits as usize)
                } else if den % 2 == 0 || den % 5 == 0 {
                    write!(f, "{}", self.value())
                } else {
                    write!(f, "{num}/{den}")
                }
            }
            Kappa::Real(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Kappa {
    type Err = ModelError;

    /// Accepts `a/b`, plain decimals and scientific notation. Decimal input
    /// is kept as an exact ratio.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ModelError::KappaRange(s.to_string());
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse::<u64>().map_err(|_| bad())?;
            let den = b.trim().parse::<u64>().map_err(|_| bad())?;
            return Kappa::ratio(num, den);
        }
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let digits = format!("{int}{frac}");
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = frac.len() as i32 - exp;
        let exact = (|| {
            let mut num: u64 = digits.parse().ok()?;
            let mut den: u64 = 1;
            if scale >= 0 {
                den = 10u64.checked_pow(scale as u32)?;
            } else {
                num = num.checked_mul(10u64.checked_pow((-scale) as u32)?)?;
            }
            Some((num, den))
        })();
        match exact {
            Some((num, den)) => Kappa::ratio(num, den),
            None => Kappa::real(s.parse::<f64>().map_err(|_| bad())?),
        }
    }
}

impl Serialize for Kappa {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            Kappa::Ratio { num, den } => serializer.serialize_str(&format!("{num}/{den}")),
            Kappa::Real(v) => serializer.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for Kappa {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Number(v) => v.to_string().parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A cost or potential value. `Exact` is in units of `1/den` of the κ
/// ratio that produced it; `Real` is already in aircraft-bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaled {
    Exact(i128),
    Real(f64),
}

impl Scaled {
    pub fn zero_like(&self) -> Scaled {
        match self {
            Scaled::Exact(_) => Scaled::Exact(0),
            Scaled::Real(_) => Scaled::Real(0.0),
        }
    }

    /// Orderable key for the GA. Exact below 2^53.
    pub fn as_fitness(&self) -> f64 {
        match *self {
            Scaled::Exact(v) => v as f64,
            Scaled::Real(v) => v,
        }
    }

    /// Equality: exact for `Exact`, within 1e-9 for `Real`.
    pub fn matches(&self, other: &Scaled) -> bool {
        match (*self, *other) {
            (Scaled::Exact(a), Scaled::Exact(b)) => a == b,
            (a, b) => (a.as_fitness() - b.as_fitness()).abs() <= 1e-9,
        }
    }
}

impl PartialOrd for Scaled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (*self, *other) {
            (Scaled::Exact(a), Scaled::Exact(b)) => a.partial_cmp(&b),
            (a, b) => a.as_fitness().partial_cmp(&b.as_fitness()),
        }
    }
}

impl Sub for Scaled {
    type Output = Scaled;

    fn sub(self, rhs: Scaled) -> Scaled {
        match (self, rhs) {
            (Scaled::Exact(a), Scaled::Exact(b)) => Scaled::Exact(a - b),
            (a, b) => Scaled::Real(a.as_fitness() - b.as_fitness()),
        }
    }
}

/// `J_i` from a vector of per-sector overloads.
pub fn cost_from_overloads(overloads: &[u64], agent: SectorId, kappa: Kappa) -> Scaled {
    let own = overloads[agent.index()];
    let total: u64 = overloads.iter().sum();
    kappa.mix(own, total - own, 0)
}

pub fn cost_from_loads(loads: &LoadTable, agent: SectorId, kappa: Kappa) -> Scaled {
    cost_from_overloads(loads.per_sector_overload(), agent, kappa)
}

/// `J_i(x)` in aircraft-bins.
pub fn cost(scenario: &Scenario, profile: &ActionProfile, agent: SectorId, kappa: Kappa) -> Result<f64, ModelError> {
    scenario.check_sector(agent)?;
    let loads = crate::airspace::compute_loads(scenario, profile)?;
    Ok(kappa.unscale(cost_from_loads(&loads, agent, kappa)))
}

/// `Φ(x)`; in binned mode the second term runs over overloaded cells.
pub fn potential_from_loads(loads: &LoadTable, kappa: Kappa) -> Scaled {
    kappa.mix(0, loads.total_overload(), loads.own_contribution_on_overloaded())
}

pub fn potential(scenario: &Scenario, profile: &ActionProfile, kappa: Kappa) -> Result<f64, ModelError> {
    let loads = crate::airspace::compute_loads(scenario, profile)?;
    Ok(kappa.unscale(potential_from_loads(&loads, kappa)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationDelta {
    pub agent: SectorId,
    /// `ΔJ_i` in aircraft-bins.
    pub delta_cost: f64,
    /// `ΔΦ` in aircraft-bins.
    pub delta_potential: f64,
    pub delta_cost_scaled: Scaled,
    pub delta_potential_scaled: Scaled,
    pub overload_set_fixed: bool,
    pub resource_overload_set_fixed: bool,
}

impl DeviationDelta {
    /// Whether `ΔJ_i = ΔΦ` (exact for ratio κ, 1e-9 otherwise).
    pub fn is_exact_potential(&self) -> bool {
        self.delta_cost_scaled.matches(&self.delta_potential_scaled)
    }
}

pub fn deviation_delta_from_loads(
    before: &LoadTable,
    after: &LoadTable,
    agent: SectorId,
    kappa: Kappa,
) -> DeviationDelta {
    let dj = cost_from_loads(after, agent, kappa) - cost_from_loads(before, agent, kappa);
    let dphi = potential_from_loads(after, kappa) - potential_from_loads(before, kappa);
    DeviationDelta {
        agent,
        delta_cost: kappa.unscale(dj),
        delta_potential: kappa.unscale(dphi),
        delta_cost_scaled: dj,
        delta_potential_scaled: dphi,
        overload_set_fixed: before.overloaded_sectors() == after.overloaded_sectors(),
        resource_overload_set_fixed: before.overloaded_resources() == after.overloaded_resources(),
    }
}

pub fn deviation_delta(
    scenario: &Scenario,
    x: &ActionProfile,
    x_dev: &ActionProfile,
    agent: SectorId,
    kappa: Kappa,
) -> Result<DeviationDelta, ModelError> {
    scenario.check_sector(agent)?;
    match x.deviator(scenario, x_dev)? {
        Some(s) if s != agent => return Err(ModelError::NotUnilateral { sectors: vec![agent, s] }),
        _ => {}
    }
    let footprint = Footprint::new(scenario);
    let before = LoadTable::from_footprint(scenario, &footprint, x);
    let after = LoadTable::from_footprint(scenario, &footprint, x_dev);
    Ok(deviation_delta_from_loads(&before, &after, agent, kappa))
}

/// `1 / (n (m − 1))`: κ strictly below this keeps every sector
/// self-prioritizing.
pub fn self_prioritization_bound(n: usize, m: usize) -> Result<f64, ModelError> {
    self_prioritization_ratio(n, m).map(|(num, den)| num as f64 / den as f64)
}

/// The bound as the exact ratio `(1, n (m − 1))`.
pub fn self_prioritization_ratio(n: usize, m: usize) -> Result<(u64, u64), ModelError> {
    if m < 2 || n < 1 {
        return Err(ModelError::BoundUndefined { n, m });
    }
    Ok((1, n as u64 * (m as u64 - 1)))
}
