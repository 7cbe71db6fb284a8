use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64_with_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

/// Train/valid/test percentages and the shuffle seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub ratios: [u32; 3],
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(ratios: [u32; 3], seed: u64) -> Result<SplitSpec, String> {
        if ratios.iter().sum::<u32>() != 100 {
            return Err(format!("ratios must sum to 100, got {ratios:?}"));
        }
        Ok(SplitSpec { ratios, seed })
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            ratios: [85, 10, 5],
            seed: 0,
        }
    }
}

/// Parses `85:10:5`.
impl FromStr for SplitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<u32> = s
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| format!("bad ratio {p:?} in {s:?}")))
            .collect::<Result<_, _>>()?;
        let ratios: [u32; 3] = parts.try_into().map_err(|_| format!("expected three ratios, got {s:?}"))?;
        SplitSpec::new(ratios, 0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Splits<T> {
    pub train: Vec<T>,
    pub valid: Vec<T>,
    pub test: Vec<T>,
}

impl<T> Splits<T> {
    pub fn get(&self, split: Split) -> &[T] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.valid.len(), self.test.len())
    }
}

/// Split per record, grouped by `group`. Groups are visited in the order of
/// a seeded hash of their key; each goes to test, then valid, while it
/// fits under the floor of that split's share, and otherwise to train.
/// The result depends only on the seed and the multiset of group keys.
pub fn assign_split<K: AsRef<str>>(groups: &[K], spec: &SplitSpec) -> Vec<Split> {
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for g in groups {
        *sizes.entry(g.as_ref()).or_default() += 1;
    }
    let mut order: Vec<(u64, &str, usize)> = sizes
        .into_iter()
        .map(|(k, n)| (xxh3_64_with_seed(k.as_bytes(), spec.seed), k, n))
        .collect();
    order.sort_unstable();

    let total = groups.len();
    let valid_target = total * spec.ratios[1] as usize / 100;
    let test_target = total * spec.ratios[2] as usize / 100;
    let (mut valid, mut test) = (0, 0);
    let mut by_group: BTreeMap<&str, Split> = BTreeMap::new();
    for (_, key, n) in order {
        let split = if test + n <= test_target {
            test += n;
            Split::Test
        } else if valid + n <= valid_target {
            valid += n;
            Split::Valid
        } else {
            Split::Train
        };
        by_group.insert(key, split);
    }
    groups.iter().map(|g| by_group[g.as_ref()]).collect()
}

/// Partitions `records`, keeping each group within one split. Records keep
/// their input order inside a split.
pub fn split_dataset<T: Clone>(records: &[T], group: impl Fn(&T) -> String, spec: &SplitSpec) -> Splits<T> {
    let keys: Vec<String> = records.iter().map(group).collect();
    let mut out = Splits {
        train: Vec::new(),
        valid: Vec::new(),
        test: Vec::new(),
    };
    for (r, s) in records.iter().zip(assign_split(&keys, spec)) {
        match s {
            Split::Train => out.train.push(r.clone()),
            Split::Valid => out.valid.push(r.clone()),
            Split::Test => out.test.push(r.clone()),
        }
    }
    out
}
