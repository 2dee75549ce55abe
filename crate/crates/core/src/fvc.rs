//! Frequent Values Collector: a bounded associative color -> count tracker.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coherence::histogram;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::surface::Frame;

/// Replacement policy applied when a new color arrives at a full set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Least frequent color.
    #[default]
    Lfc,
    /// Second least frequent color; the least frequent entry survives.
    #[serde(rename = "2lfc")]
    SecondLfc,
    Lru,
    Random,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Lfc => "lfc",
            Policy::SecondLfc => "2lfc",
            Policy::Lru => "lru",
            Policy::Random => "random",
        })
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lfc" => Ok(Policy::Lfc),
            "2lfc" => Ok(Policy::SecondLfc),
            "lru" => Ok(Policy::Lru),
            "random" => Ok(Policy::Random),
            other => Err(Error::Config(format!("unknown policy {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Associativity {
    #[default]
    Full,
    /// N-way set associative.
    Ways(u32),
    DirectMapped,
}

impl Associativity {
    fn ways(self, entry_count: usize) -> usize {
        match self {
            Associativity::Full => entry_count,
            Associativity::Ways(n) => n as usize,
            Associativity::DirectMapped => 1,
        }
    }
}

impl TryFrom<String> for Associativity {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Associativity> for String {
    fn from(a: Associativity) -> Self {
        a.to_string()
    }
}

impl fmt::Display for Associativity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Associativity::Full => f.write_str("full"),
            Associativity::Ways(n) => write!(f, "{n}way"),
            Associativity::DirectMapped => f.write_str("direct"),
        }
    }
}

impl FromStr for Associativity {
    type Err = Error;

    /// Accepts `full`, `direct`, or a way count such as `4` / `4way`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "full" | "fa" => Ok(Associativity::Full),
            "direct" | "dm" | "1" | "1way" => Ok(Associativity::DirectMapped),
            other => other
                .trim_end_matches("way")
                .trim_end_matches('-')
                .parse::<u32>()
                .ok()
                .filter(|n| n.is_power_of_two())
                .map(Associativity::Ways)
                .ok_or_else(|| Error::Config(format!("unknown associativity {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FvcConfig {
    pub entry_count: usize,
    pub associativity: Associativity,
    pub policy: Policy,
    /// Observe one in every `pixel_sampling` pixels.
    pub pixel_sampling: u32,
    pub rng_seed: u64,
}

impl Default for FvcConfig {
    fn default() -> Self {
        Self {
            entry_count: 64,
            associativity: Associativity::Full,
            policy: Policy::Lfc,
            pixel_sampling: 1,
            rng_seed: 0,
        }
    }
}

impl FvcConfig {
    pub fn with_entries(entry_count: usize) -> Self {
        Self {
            entry_count,
            ..Self::default()
        }
    }

    /// Structural checks needed to build a collector. Range limits of the
    /// experiment harness live in `config`.
    pub fn check(&self) -> Result<()> {
        if !self.entry_count.is_power_of_two() {
            return Err(Error::Config(format!(
                "FVC size {} is not a power of two",
                self.entry_count
            )));
        }
        let ways = self.associativity.ways(self.entry_count);
        if ways == 0 || !ways.is_power_of_two() || ways > self.entry_count {
            return Err(Error::Config(format!(
                "{} ways do not fit a {}-entry FVC",
                ways, self.entry_count
            )));
        }
        if self.pixel_sampling == 0 {
            return Err(Error::Config("pixel sampling divisor must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Entry {
    color: u32,
    frequency: u64,
    last_touch: u64,
    valid: bool,
}

#[derive(Clone, Debug)]
pub struct Fvc {
    config: FvcConfig,
    ways: usize,
    set_mask: u32,
    entries: Vec<Entry>,
    slot_of: HashMap<u32, usize>,
    samples_observed: u64,
    clock: u64,
    rng: SplitMix64,
}

impl Fvc {
    pub fn new(config: FvcConfig) -> Result<Self> {
        config.check()?;
        let ways = config.associativity.ways(config.entry_count);
        let sets = config.entry_count / ways;
        Ok(Self {
            config,
            ways,
            set_mask: sets as u32 - 1,
            entries: vec![Entry::default(); config.entry_count],
            slot_of: HashMap::with_capacity(config.entry_count),
            samples_observed: 0,
            clock: 0,
            rng: SplitMix64::new(config.rng_seed),
        })
    }

    pub fn config(&self) -> &FvcConfig {
        &self.config
    }

    pub fn samples_observed(&self) -> u64 {
        self.samples_observed
    }

    pub fn len(&self) -> usize {
        self.slot_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slot_of.is_empty()
    }

    /// Invalidates every entry and zeroes the sample count. The replacement
    /// generator keeps its stream so RANDOM stays deterministic per run.
    pub fn reset(&mut self) {
        self.entries.fill(Entry::default());
        self.slot_of.clear();
        self.samples_observed = 0;
        self.clock = 0;
    }

    /// Records one sampled pixel.
    pub fn observe(&mut self, color: u32) {
        self.samples_observed += 1;
        self.clock += 1;
        if let Some(&slot) = self.slot_of.get(&color) {
            let e = &mut self.entries[slot];
            e.frequency += 1;
            e.last_touch = self.clock;
            return;
        }
        let set = (color & self.set_mask) as usize;
        let range = set * self.ways..(set + 1) * self.ways;
        let slot = match self.entries[range.clone()].iter().position(|e| !e.valid) {
            Some(free) => range.start + free,
            None => {
                let victim = range.start + self.pick_victim(range.clone());
                self.slot_of.remove(&self.entries[victim].color);
                victim
            }
        };
        self.entries[slot] = Entry {
            color,
            frequency: 1,
            last_touch: self.clock,
            valid: true,
        };
        self.slot_of.insert(color, slot);
    }

    fn pick_victim(&mut self, range: std::ops::Range<usize>) -> usize {
        if self.config.policy == Policy::Random {
            return self.rng.below(range.len() as u64) as usize;
        }
        let set = &self.entries[range];
        let by_frequency = |&(_, e): &(usize, &Entry)| (e.frequency, e.color);
        match self.config.policy {
            Policy::Lfc => set
                .iter()
                .enumerate()
                .min_by_key(by_frequency)
                .map(|(i, _)| i)
                .unwrap_or(0),
            Policy::SecondLfc => {
                let mut ranked: Vec<_> = set.iter().enumerate().collect();
                ranked.sort_by_key(by_frequency);
                ranked
                    .get(1)
                    .or(ranked.first())
                    .map(|&(i, _)| i)
                    .unwrap_or(0)
            }
            Policy::Lru => set
                .iter()
                .enumerate()
                .min_by_key(|(_, e)| e.last_touch)
                .map(|(i, _)| i)
                .unwrap_or(0),
            Policy::Random => unreachable!(),
        }
    }

    /// Feeds every `pixel_sampling`-th pixel of `frame` in raster order.
    pub fn observe_frame(&mut self, frame: &Frame) {
        let n = self.config.pixel_sampling as usize;
        for &color in frame.pixels().iter().step_by(n) {
            self.observe(color);
        }
    }

    /// Sum of tracked frequencies over samples observed.
    pub fn coverage(&self) -> Result<f64> {
        if self.samples_observed == 0 {
            return Err(Error::UndefinedCoverage);
        }
        let tracked: u64 = self
            .entries
            .iter()
            .filter(|e| e.valid)
            .map(|e| e.frequency)
            .sum();
        Ok(tracked as f64 / self.samples_observed as f64)
    }

    /// Valid entries by descending frequency, ties by ascending color.
    pub fn ranked_values(&self) -> Vec<(u32, u64)> {
        let mut ranked: Vec<_> = self
            .entries
            .iter()
            .filter(|e| e.valid)
            .map(|e| (e.color, e.frequency))
            .collect();
        sort_ranked(&mut ranked);
        ranked
    }
}

pub fn sort_ranked(values: &mut [(u32, u64)]) {
    values.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
}

/// Pixel mass of the colors in `collected` divided by the pixel mass of the
/// true `collected.len()` most frequent colors of `frame`.
pub fn relative_coverage(collected: &[(u32, u64)], frame: &Frame) -> Result<f64> {
    if frame.pixel_count() == 0 {
        return Err(Error::Empty("frame"));
    }
    let hist = histogram(frame);
    let mut truth: Vec<u64> = hist.values().copied().collect();
    truth.sort_unstable_by(|a, b| b.cmp(a));
    let ideal: u64 = truth.iter().take(collected.len()).sum();
    if ideal == 0 {
        return Ok(1.0);
    }
    let got: u64 = collected
        .iter()
        .map(|(c, _)| hist.get(c).copied().unwrap_or(0))
        .sum();
    Ok(got as f64 / ideal as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    const A: u32 = 0xA;
    const B: u32 = 0xB;
    const C: u32 = 0xC;

    fn fvc(entries: usize, policy: Policy) -> Fvc {
        Fvc::new(FvcConfig {
            entry_count: entries,
            policy,
            ..FvcConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn counts_hits_and_inserts() {
        let mut f = fvc(2, Policy::Lfc);
        for c in [A, A, B] {
            f.observe(c);
        }
        assert_eq!(f.ranked_values(), vec![(A, 2), (B, 1)]);
    }

    #[test]
    fn lfc_evicts_least_frequent() {
        let mut f = fvc(2, Policy::Lfc);
        for _ in 0..5 {
            f.observe(A);
        }
        f.observe(B);
        f.observe(C);
        assert_eq!(f.ranked_values(), vec![(A, 5), (C, 1)]);
    }

    #[test]
    fn second_lfc_protects_least_frequent() {
        let mut f = fvc(4, Policy::SecondLfc);
        for (c, n) in [(1, 5), (2, 4), (3, 3), (4, 1)] {
            for _ in 0..n {
                f.observe(c);
            }
        }
        f.observe(9);
        let colors: Vec<u32> = f.ranked_values().iter().map(|v| v.0).collect();
        assert_eq!(colors, vec![1, 2, 4, 9]);
    }

    #[test]
    fn lru_evicts_oldest_touch() {
        let mut f = fvc(2, Policy::Lru);
        for c in [A, A, A, B, A] {
            f.observe(c);
        }
        f.observe(C);
        let mut colors: Vec<u32> = f.ranked_values().iter().map(|v| v.0).collect();
        colors.sort();
        assert_eq!(colors, vec![A, C]);
    }

    #[test]
    fn random_is_seeded() {
        let run = |seed| {
            let mut f = Fvc::new(FvcConfig {
                entry_count: 16,
                policy: Policy::Random,
                rng_seed: seed,
                ..FvcConfig::default()
            })
            .unwrap();
            let mut rng = SplitMix64::new(1);
            for _ in 0..5000 {
                f.observe(rng.below(64) as u32);
            }
            f.ranked_values()
        };
        assert_eq!(run(3), run(3));
    }

    #[test]
    fn set_index_uses_low_bits() {
        let mut f = Fvc::new(FvcConfig {
            entry_count: 4,
            associativity: Associativity::DirectMapped,
            ..FvcConfig::default()
        })
        .unwrap();
        // 0x10 and 0x20 share set 0; 0x01 lives in set 1
        f.observe(0x10);
        f.observe(0x01);
        f.observe(0x20);
        let mut colors: Vec<u32> = f.ranked_values().iter().map(|v| v.0).collect();
        colors.sort();
        assert_eq!(colors, vec![0x01, 0x20]);
    }

    #[test]
    fn coverage_requires_samples() {
        let f = fvc(16, Policy::Lfc);
        assert!(matches!(f.coverage(), Err(Error::UndefinedCoverage)));
    }

    #[test]
    fn single_color_coverage_is_one() {
        let mut f = fvc(16, Policy::Lfc);
        f.observe_frame(&Frame::filled(16, 16, 7).unwrap());
        assert_eq!(f.coverage().unwrap(), 1.0);
    }

    /// 65 colors, each appearing 4 times, interleaved; replayed step by step
    /// against a straightforward vector model of LFC.
    #[test]
    fn coverage_matches_replay_oracle() {
        let stream: Vec<u32> = (0..4).flat_map(|_| 0..65u32).collect();
        let mut f = fvc(64, Policy::Lfc);
        let mut model: Vec<(u32, u64)> = Vec::new();
        for &c in &stream {
            f.observe(c);
            if let Some(e) = model.iter_mut().find(|e| e.0 == c) {
                e.1 += 1;
            } else if model.len() < 64 {
                model.push((c, 1));
            } else {
                let victim = (0..model.len())
                    .min_by_key(|&i| (model[i].1, model[i].0))
                    .unwrap();
                model[victim] = (c, 1);
            }
        }
        let tracked: u64 = model.iter().map(|e| e.1).sum();
        let expected = tracked as f64 / stream.len() as f64;
        assert_eq!(f.coverage().unwrap(), expected);
        let mut m = model.clone();
        sort_ranked(&mut m);
        assert_eq!(f.ranked_values(), m);
    }

    #[test]
    fn tie_break_by_ascending_color() {
        let mut f = fvc(4, Policy::Lfc);
        for c in [A, B, A, B, A, B] {
            f.observe(c);
        }
        assert_eq!(f.ranked_values(), vec![(A, 3), (B, 3)]);
        let mut g = fvc(4, Policy::Lfc);
        for c in [0x20, 0x10, 0x20, 0x10] {
            g.observe(c);
        }
        assert_eq!(g.ranked_values(), vec![(0x10, 2), (0x20, 2)]);
    }

    #[test]
    fn relative_coverage_full_capture() {
        let px = (0..64).map(|i| i % 5).collect();
        let frame = Frame::new(8, 8, px).unwrap();
        let mut f = fvc(16, Policy::Lfc);
        f.observe_frame(&frame);
        assert_eq!(relative_coverage(&f.ranked_values(), &frame).unwrap(), 1.0);
    }

    /// A frequent early color is pushed out by a late burst of new colors.
    #[test]
    fn relative_coverage_adversarial() {
        let mut px = vec![1u32; 24];
        px.extend([2u32; 20]);
        px.extend(100..120u32);
        let frame = Frame::new(8, 8, px).unwrap();
        let mut f = fvc(2, Policy::Lfc);
        f.observe_frame(&frame);
        let ranked = f.ranked_values();
        // replay: {1:24, 2:20}; color 100 evicts 2, then each later burst
        // color evicts its frequency-1 predecessor
        assert_eq!(ranked, vec![(1, 24), (119, 1)]);
        let rc = relative_coverage(&ranked, &frame).unwrap();
        assert_eq!(rc, (24.0 + 1.0) / (24.0 + 20.0));
        assert!(rc < 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(Fvc::new(FvcConfig::with_entries(48)).is_err());
        assert!(Fvc::new(FvcConfig {
            associativity: Associativity::Ways(128),
            ..FvcConfig::default()
        })
        .is_err());
        assert_eq!(
            "8way".parse::<Associativity>().unwrap(),
            Associativity::Ways(8)
        );
        assert_eq!("2lfc".parse::<Policy>().unwrap(), Policy::SecondLfc);
    }
}
