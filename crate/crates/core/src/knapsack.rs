//! Classical 0/1 knapsack semantics: feasibility, objective value, exact
//! solvers and the approximation ratio.
//!
//! Bit `i` of a [`BitString`] selects item `i` and is printed at position `i`
//! from the left. The same index is used for choice-register qubit `i`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Two objective values closer than this are treated as equal when breaking
/// ties between optimal selections.
pub const VALUE_TIE_EPS: f64 = 1e-9;

/// Largest item count accepted by [`solve_brute_force`].
pub const BRUTE_FORCE_MAX_ITEMS: usize = 25;

/// A binary knapsack problem: maximize `sum x_i v_i` subject to
/// `sum x_i w_i <= capacity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tickers: Option<Vec<String>>,
    pub values: Vec<f64>,
    pub weights: Vec<u64>,
    pub capacity: u64,
}

impl KnapsackInstance {
    pub fn new(values: Vec<f64>, weights: Vec<u64>, capacity: u64) -> Result<Self> {
        let inst = KnapsackInstance {
            tickers: None,
            values,
            weights,
            capacity,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_tickers(mut self, tickers: Vec<String>) -> Result<Self> {
        if tickers.len() != self.values.len() {
            return Err(Error::InvalidInstance(format!(
                "{} tickers for {} items",
                tickers.len(),
                self.values.len()
            )));
        }
        self.tickers = Some(tickers);
        Ok(self)
    }

    /// Checks the structural invariants. Instances read from JSON should be
    /// passed through this before use.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidInstance("no items".into()));
        }
        if self.values.len() != self.weights.len() {
            return Err(Error::InvalidInstance(format!(
                "{} values but {} weights",
                self.values.len(),
                self.weights.len()
            )));
        }
        if let Some(t) = &self.tickers {
            if t.len() != self.values.len() {
                return Err(Error::InvalidInstance(format!(
                    "{} tickers for {} items",
                    t.len(),
                    self.values.len()
                )));
            }
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance(format!("non-finite value {v}")));
        }
        if self.weights.iter().all(|&w| w == 0) {
            return Err(Error::InvalidInstance("all weights are zero".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_weight_all(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// True when every selection fits, which makes the problem trivial.
    pub fn is_trivial(&self) -> bool {
        self.capacity >= self.total_weight_all()
    }

    fn check_len(&self, x: &BitString) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Item selection; `bits[i]` is true when item `i` is taken.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BitString(vec![false; n])
    }

    /// Decodes a register index where bit `i` of `index` is item `i`.
    pub fn from_index(index: usize, n: usize) -> Self {
        BitString((0..n).map(|i| (index >> i) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    /// The `i`-th Hamming neighbour.
    pub fn flipped(&self, i: usize) -> Self {
        let mut bits = self.0.clone();
        bits[i] = !bits[i];
        BitString(bits)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !matches!(c, '(' | ')' | ',' | ' '))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInstance(format!(
                    "bad bit {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Optimal selection returned by the exact solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BksSolution {
    pub bits: BitString,
    pub value: f64,
    pub weight: u64,
}

pub fn total_weight(x: &BitString, inst: &KnapsackInstance) -> Result<u64> {
    inst.check_len(x)?;
    Ok(x.bits()
        .iter()
        .zip(&inst.weights)
        .filter(|(&b, _)| b)
        .map(|(_, &w)| w)
        .sum())
}

pub fn total_value(x: &BitString, inst: &KnapsackInstance) -> Result<f64> {
    inst.check_len(x)?;
    Ok(x.bits()
        .iter()
        .zip(&inst.values)
        .filter(|(&b, _)| b)
        .map(|(_, &v)| v)
        .sum())
}

pub fn is_feasible(x: &BitString, inst: &KnapsackInstance) -> Result<bool> {
    Ok(total_weight(x, inst)? <= inst.capacity)
}

/// Exhaustive search over all `2^N` selections.
///
/// Among selections whose value is within [`VALUE_TIE_EPS`] of the optimum the
/// lexicographically smallest printed bitstring wins.
pub fn solve_brute_force(inst: &KnapsackInstance) -> Result<BksSolution> {
    let n = inst.len();
    if n > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::TooManyItems {
            max: BRUTE_FORCE_MAX_ITEMS,
            got: n,
        });
    }
    let mut best: Option<BksSolution> = None;
    for code in 0..(1usize << n) {
        // item 0 is the most significant printed bit, so counting `code` up
        // walks the printed strings in lexicographic order
        let bits = BitString::new((0..n).map(|i| (code >> (n - 1 - i)) & 1 == 1).collect());
        let weight = total_weight(&bits, inst)?;
        if weight > inst.capacity {
            continue;
        }
        let value = total_value(&bits, inst)?;
        match &best {
            Some(b) if value <= b.value + VALUE_TIE_EPS => {}
            _ => {
                best = Some(BksSolution {
                    bits,
                    value,
                    weight,
                })
            }
        }
    }
    // the empty selection is always feasible
    Ok(best.expect("empty selection is feasible"))
}

/// Dynamic programming over integer capacity with backtracking.
///
/// `table[i][c]` is the best value reachable with items `i..N` and capacity
/// `c`. Recovery walks items in index order and skips an item whenever the
/// optimum is still reachable without it, which yields the lexicographically
/// smallest optimal bitstring.
pub fn solve_dp(inst: &KnapsackInstance) -> Result<BksSolution> {
    inst.validate()?;
    let n = inst.len();
    let cap = inst.capacity.min(inst.total_weight_all()) as usize;
    let mut table = vec![vec![0.0f64; cap + 1]; n + 1];
    for i in (0..n).rev() {
        let w = inst.weights[i] as usize;
        let v = inst.values[i];
        for c in 0..=cap {
            let skip = table[i + 1][c];
            table[i][c] = if w <= c {
                skip.max(v + table[i + 1][c - w])
            } else {
                skip
            };
        }
    }

    let target = table[0][cap];
    let mut bits = Vec::with_capacity(n);
    let mut remaining = cap;
    let mut acc = 0.0;
    for i in 0..n {
        let w = inst.weights[i] as usize;
        let skip_reaches = acc + table[i + 1][remaining] >= target - VALUE_TIE_EPS;
        if skip_reaches || w > remaining {
            bits.push(false);
        } else {
            bits.push(true);
            acc += inst.values[i];
            remaining -= w;
        }
    }
    let bits = BitString::new(bits);
    Ok(BksSolution {
        value: total_value(&bits, inst)?,
        weight: total_weight(&bits, inst)?,
        bits,
    })
}

pub fn approximation_ratio(achieved: f64, optimal: f64) -> Result<f64> {
    if optimal <= 0.0 || !optimal.is_finite() {
        return Err(Error::NonPositiveOptimum(optimal));
    }
    Ok(achieved / optimal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(values: &[f64], capacity: u64) -> KnapsackInstance {
        KnapsackInstance::new(values.to_vec(), vec![1; values.len()], capacity).unwrap()
    }

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    const FOUR: [f64; 4] = [0.2430, 0.2602, 0.1047, 0.2430];
    const FIVE: [f64; 5] = [0.2430, 0.2602, 0.1047, 0.0716, 0.2430];
    const EIGHT: [f64; 8] = [
        0.2430, 0.1899, 0.1780, 0.1903, 0.2874, 0.4203, 0.0797, 0.1341,
    ];

    #[test]
    fn weights() {
        let i3 = unit(&[0.1, 0.2, 0.3], 1);
        assert_eq!(total_weight(&bits("000"), &i3).unwrap(), 0);
        assert_eq!(total_weight(&bits("11"), &unit(&[0.1, 0.2], 1)).unwrap(), 2);
        assert_eq!(total_weight(&bits("1011"), &unit(&FOUR, 2)).unwrap(), 3);
        assert!(matches!(
            total_weight(&bits("10"), &i3),
            Err(Error::LengthMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn values() {
        let i2 = unit(&[0.2430, 0.2602], 1);
        assert_eq!(total_value(&bits("01"), &i2).unwrap(), 0.2602);
        assert_eq!(total_value(&bits("00"), &i2).unwrap(), 0.0);
        assert!((total_value(&bits("1100"), &unit(&FOUR, 2)).unwrap() - 0.5032).abs() < 1e-12);
    }

    #[test]
    fn feasibility() {
        let i2 = unit(&[0.2430, 0.2602], 1);
        assert!(!is_feasible(&bits("11"), &i2).unwrap());
        assert!(is_feasible(&bits("01"), &i2).unwrap());
        assert!(is_feasible(&bits("11001100"), &unit(&EIGHT, 4)).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        let s = solve_brute_force(&unit(&[0.2430, 0.2602], 1)).unwrap();
        assert_eq!(s.bits.to_string(), "01");
        assert_eq!(s.value, 0.2602);

        // MSFT+AAPL ties AAPL+NVDA; the smaller string wins
        let s = solve_brute_force(&unit(&FIVE, 2)).unwrap();
        assert_eq!(s.bits.to_string(), "01001");
        assert!((s.value - 0.5032).abs() < 1e-12);

        let s = solve_brute_force(&unit(&FIVE, 0)).unwrap();
        assert_eq!(s.bits, BitString::zeros(5));
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn brute_force_guard() {
        let inst = unit(&[0.1; 26], 3);
        assert!(matches!(
            solve_brute_force(&inst),
            Err(Error::TooManyItems { max: 25, got: 26 })
        ));
    }

    #[test]
    fn dp_examples() {
        let s = solve_dp(&unit(&FOUR, 2)).unwrap();
        assert!((s.value - 0.5032).abs() < 1e-12);
        assert_eq!(s.bits.to_string(), "0101");

        let s = solve_dp(&unit(&EIGHT, 4)).unwrap();
        assert!((s.value - 1.1410).abs() < 1e-12);
        assert_eq!(s.bits.to_string(), "10011100");
        assert_eq!(s.weight, 4);

        let s = solve_dp(&unit(&EIGHT, 0)).unwrap();
        assert_eq!(s.bits, BitString::zeros(8));
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn dp_with_zero_weight_items() {
        let inst = KnapsackInstance::new(vec![0.5, 0.3, 0.9], vec![0, 2, 3], 2).unwrap();
        let s = solve_dp(&inst).unwrap();
        assert_eq!(s.bits.to_string(), "110");
        assert_eq!(s, solve_brute_force(&inst).unwrap());
    }

    #[test]
    fn ratio() {
        assert_eq!(approximation_ratio(0.2602, 0.2602).unwrap(), 1.0);
        let r = approximation_ratio(0.4860, 0.5032).unwrap();
        assert!((r - 0.965818759936407).abs() < 1e-12);
        assert_eq!(approximation_ratio(0.0, 0.5032).unwrap(), 0.0);
        assert!(approximation_ratio(0.1, 0.0).is_err());
        assert!(approximation_ratio(0.1, -1.0).is_err());
    }

    #[test]
    fn bitstring_index_round_trip() {
        let b = bits("1011");
        assert_eq!(b.to_index(), 0b1101);
        assert_eq!(BitString::from_index(0b1101, 4), b);
        assert_eq!(bits("(0,1,0)"), bits("010"));
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn instance_validation() {
        assert!(KnapsackInstance::new(vec![], vec![], 0).is_err());
        assert!(KnapsackInstance::new(vec![0.1], vec![1, 1], 0).is_err());
        assert!(KnapsackInstance::new(vec![0.1, 0.2], vec![0, 0], 0).is_err());
        assert!(KnapsackInstance::new(vec![f64::NAN], vec![1], 0).is_err());
        let trivial = KnapsackInstance::new(vec![0.1, 0.2], vec![1, 1], 5).unwrap();
        assert!(trivial.is_trivial());
    }
}
