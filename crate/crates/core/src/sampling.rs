//! Seeded sampling and stratified train/validation/test splits keyed on the
//! gold co-occurrence count.
//!
//! Allocation: each stratum is divided by largest-remainder rounding of
//! `ratio * stratum_size`; then split totals are forced to the largest-remainder
//! rounding of `ratio * N` by moving single items between splits, always taking
//! from the stratum whose allocation most exceeds its exact quota.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const STRATA: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    #[serde(rename = "id")]
    pub post_id: String,
    pub split: Split,
    pub stratum: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios(pub [f64; 3]);

impl Ratios {
    pub const DEFAULT: Ratios = Ratios([0.70, 0.15, 0.15]);

    pub fn new(train: f64, validation: f64, test: f64) -> Result<Ratios> {
        let r = Ratios([train, validation, test]);
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidRatios(format!("{:?} must all be positive", self.0)));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidRatios(format!("{:?} sum to {sum}, not 1", self.0)));
        }
        Ok(())
    }
}

impl Default for Ratios {
    fn default() -> Self {
        Ratios::DEFAULT
    }
}

/// Uniform sample of `n` items without replacement, in original order.
pub fn random_sample<T: Clone>(items: &[T], n: usize, seed: u64) -> Result<Vec<T>> {
    if n > items.len() {
        return Err(Error::SampleTooLarge {
            requested: n,
            available: items.len(),
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut picked = rand::seq::index::sample(&mut rng, items.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| items[i].clone()).collect())
}

/// Largest-remainder apportionment of `total` by `ratios`; ties go to the
/// earlier split.
pub fn largest_remainder(total: usize, ratios: &Ratios) -> [usize; 3] {
    let quotas = ratios.0.map(|r| r * total as f64);
    let mut out = quotas.map(|q| libm::floor(q) as usize);
    let assigned: usize = out.iter().sum();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - libm::floor(quotas[a]);
        let fb = quotas[b] - libm::floor(quotas[b]);
        fb.partial_cmp(&fa).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        out[i] += 1;
    }
    out
}

/// Per-stratum split sizes, rows indexed by stratum, columns by [`Split`].
pub fn allocate(stratum_sizes: &[usize; STRATA], ratios: &Ratios) -> [[usize; 3]; STRATA] {
    let mut alloc = stratum_sizes.map(|n| largest_remainder(n, ratios));
    let total: usize = stratum_sizes.iter().sum();
    let targets = largest_remainder(total, ratios);
    let quota = |k: usize, s: usize| stratum_sizes[k] as f64 * ratios.0[s];

    loop {
        let totals: [usize; 3] = core::array::from_fn(|s| alloc.iter().map(|row| row[s]).sum());
        let Some(from) = (0..3).find(|&s| totals[s] > targets[s]) else {
            break;
        };
        let to = (0..3)
            .find(|&s| totals[s] < targets[s])
            .expect("split totals and targets both sum to N");
        let surplus = |k: usize, s: usize| alloc[k][s] as f64 - quota(k, s);
        let k = (0..STRATA)
            .filter(|&k| alloc[k][from] > 0)
            .max_by(|&a, &b| {
                let sa = surplus(a, from) - surplus(a, to);
                let sb = surplus(b, from) - surplus(b, to);
                // max_by keeps the last maximum; reverse the index order so the
                // lowest stratum wins ties
                sa.partial_cmp(&sb).unwrap_or(core::cmp::Ordering::Equal).then(b.cmp(&a))
            })
            .expect("a split over target has at least one item");
        alloc[k][from] -= 1;
        alloc[k][to] += 1;
    }
    alloc
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedSplit<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
    /// One entry per input item, in input order.
    pub assignments: Vec<SplitAssignment>,
    pub warnings: Vec<String>,
}

impl<T> StratifiedSplit<T> {
    pub fn get(&self, split: Split) -> &[T] {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }

    pub fn totals(&self) -> [usize; 3] {
        [self.train.len(), self.validation.len(), self.test.len()]
    }

    /// Count of items per stratum and split.
    pub fn table(&self) -> [[usize; 3]; STRATA] {
        let mut t = [[0; 3]; STRATA];
        for a in &self.assignments {
            t[a.stratum as usize][a.split.index()] += 1;
        }
        t
    }
}

/// Split `items` so each stratum keeps the global ratios. Within a stratum,
/// membership is a seeded shuffle; every output keeps input order.
pub fn stratified_split<T: Clone>(
    items: &[T],
    id_of: impl Fn(&T) -> &str,
    stratum_of: impl Fn(&T) -> u8,
    ratios: &Ratios,
    seed: u64,
) -> Result<StratifiedSplit<T>> {
    ratios.validate()?;
    let mut warnings = Vec::new();
    let mut split_of = alloc::vec![Split::Train; items.len()];
    let strata: Vec<u8> = items.iter().map(&stratum_of).collect();
    if let Some((i, &s)) = strata.iter().enumerate().find(|(_, &s)| s as usize >= STRATA) {
        return Err(Error::InvalidRecord(format!(
            "stratum {s} of {:?} is outside 0..=3",
            id_of(&items[i])
        )));
    }

    if !items.is_empty() && items.len() < 3 {
        warnings.push(format!(
            "only {} records; all assigned to train",
            items.len()
        ));
    } else if !items.is_empty() {
        let mut members: [Vec<usize>; STRATA] = Default::default();
        for (i, &s) in strata.iter().enumerate() {
            members[s as usize].push(i);
        }
        let sizes = members.each_ref().map(Vec::len);
        let alloc = allocate(&sizes, ratios);
        let mut rng = rng_from_seed(seed);
        for (k, idx) in members.iter_mut().enumerate() {
            idx.shuffle(&mut rng);
            let [n_train, n_val, _] = alloc[k];
            for (pos, &i) in idx.iter().enumerate() {
                split_of[i] = if pos < n_train {
                    Split::Train
                } else if pos < n_train + n_val {
                    Split::Validation
                } else {
                    Split::Test
                };
            }
        }
    }

    let mut out = StratifiedSplit {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        assignments: Vec::with_capacity(items.len()),
        warnings,
    };
    for (i, item) in items.iter().enumerate() {
        let split = split_of[i];
        match split {
            Split::Train => out.train.push(item.clone()),
            Split::Validation => out.validation.push(item.clone()),
            Split::Test => out.test.push(item.clone()),
        }
        out.assignments.push(SplitAssignment {
            post_id: id_of(item).into(),
            split,
            stratum: strata[i],
        });
    }
    Ok(out)
}
