//! Hard partitions of one axis (documents or keywords) with linkage-style
//! cluster numbering: the original items are clusters `0..n`, and each merge
//! creates the next id starting at `n`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterId(pub usize);

impl ClusterId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<ClusterId>,
    members: BTreeMap<ClusterId, Vec<usize>>,
    next_id: usize,
}

impl Partition {
    /// Every item alone in its own cluster, ids `0..n_items`.
    pub fn singletons(n_items: usize) -> Result<Self> {
        if n_items < 2 {
            return Err(Error::invalid(format!(
                "a partition needs at least 2 items, got {n_items}"
            )));
        }
        Ok(Self {
            assignment: (0..n_items).map(ClusterId).collect(),
            members: (0..n_items).map(|i| (ClusterId(i), vec![i])).collect(),
            next_id: n_items,
        })
    }

    /// Wraps an arbitrary labelling. Labels become the cluster ids and new
    /// merges are numbered after the largest label.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("empty labelling"));
        }
        let mut members: BTreeMap<ClusterId, Vec<usize>> = BTreeMap::new();
        for (item, &label) in labels.iter().enumerate() {
            members.entry(ClusterId(label)).or_default().push(item);
        }
        let next_id = labels.iter().max().map_or(0, |m| m + 1).max(labels.len());
        Ok(Self {
            assignment: labels.iter().map(|&l| ClusterId(l)).collect(),
            members,
            next_id,
        })
    }

    pub fn n_items(&self) -> usize {
        self.assignment.len()
    }

    /// Number of live clusters.
    pub fn n_clusters(&self) -> usize {
        self.members.len()
    }

    pub fn next_id(&self) -> ClusterId {
        ClusterId(self.next_id)
    }

    pub fn cluster_of(&self, item: usize) -> ClusterId {
        self.assignment[item]
    }

    pub fn assignment(&self) -> &[ClusterId] {
        &self.assignment
    }

    /// Cluster id of every item as a plain label vector.
    pub fn labels(&self) -> Vec<usize> {
        self.assignment.iter().map(|c| c.0).collect()
    }

    pub fn is_live(&self, id: ClusterId) -> bool {
        self.members.contains_key(&id)
    }

    pub fn size(&self, id: ClusterId) -> Option<usize> {
        self.members.get(&id).map(Vec::len)
    }

    /// Items of a live cluster in ascending order of insertion.
    pub fn members(&self, id: ClusterId) -> Option<&[usize]> {
        self.members.get(&id).map(Vec::as_slice)
    }

    /// Live cluster ids, ascending.
    pub fn cluster_ids(&self) -> impl Iterator<Item = ClusterId> + '_ {
        self.members.keys().copied()
    }

    /// `(id, size)` of every live cluster, ascending by id.
    pub fn cluster_sizes(&self) -> impl Iterator<Item = (ClusterId, usize)> + '_ {
        self.members.iter().map(|(&id, m)| (id, m.len()))
    }

    /// Size-based cluster probabilities `|c| / n`, ascending by id.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n_items() as f64;
        self.members.values().map(|m| m.len() as f64 / n).collect()
    }

    /// Merges two live clusters into a new one and returns its id.
    pub fn merge(&mut self, a: ClusterId, b: ClusterId) -> Result<ClusterId> {
        if a == b {
            return Err(Error::InvalidMerge(format!("cannot merge cluster {a} with itself")));
        }
        for id in [a, b] {
            if !self.is_live(id) {
                return Err(Error::InvalidMerge(format!("cluster {id} is not live")));
            }
        }
        let new_id = ClusterId(self.next_id);
        self.next_id += 1;
        let mut items = self.members.remove(&a).expect("checked live");
        items.extend(self.members.remove(&b).expect("checked live"));
        for &item in &items {
            self.assignment[item] = new_id;
        }
        self.members.insert(new_id, items);
        Ok(new_id)
    }

    /// Non-mutating form of [`Partition::merge`].
    pub fn merged(&self, a: ClusterId, b: ClusterId) -> Result<Partition> {
        let mut next = self.clone();
        next.merge(a, b)?;
        Ok(next)
    }
}
