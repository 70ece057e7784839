//! Near-clone removal: pairwise two-level Jaccard, transitive closure via
//! union-find, one representative kept per duplicate group.

use serde::{Deserialize, Serialize};

use super::similarity::{profile_similarity, DedupConfig, TokenProfile};
use super::{MethodRecord, Split};

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// One removed record, reported against the group representative it
/// duplicated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DedupRemoval {
    pub group_id: usize,
    pub kept_id: String,
    pub removed_id: String,
    pub key_jaccard: f64,
    pub multiset_jaccard: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DedupReport {
    pub removals: Vec<DedupRemoval>,
    pub groups: usize,
}

impl DedupReport {
    /// `group_id,kept_id,removed_id,key_jaccard,multiset_jaccard` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("group_id,kept_id,removed_id,key_jaccard,multiset_jaccard\n");
        for r in &self.removals {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.group_id, r.kept_id, r.removed_id, r.key_jaccard, r.multiset_jaccard
            ));
        }
        out
    }
}

/// Remove near-clones. Records `a`, `b` are duplicates iff
/// `key_jaccard >= t0` and `multiset_jaccard >= t1`; the relation is closed
/// transitively. Each group keeps one representative: the lexicographically
/// smallest id among its train records when the group touches train
/// (cross-split duplicates resolve in favor of train), else the smallest id
/// overall. Idempotent.
pub fn dedup(corpus: &[MethodRecord], cfg: DedupConfig) -> (Vec<MethodRecord>, DedupReport) {
    let n = corpus.len();
    let profiles: Vec<TokenProfile> = corpus.iter().map(TokenProfile::of).collect();
    let mut uf = UnionFind::new(n);

    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&profiles[i], &profiles[j]);
            // cheap exact upper bounds before the full comparison
            let key_bound = jaccard_upper_bound(a.key_set.len(), b.key_set.len());
            if key_bound < cfg.t0 {
                continue;
            }
            let multi_bound = jaccard_upper_bound(a.total, b.total);
            if multi_bound < cfg.t1 {
                continue;
            }
            let (key, multi) = profile_similarity(a, b);
            if key >= cfg.t0 && multi >= cfg.t1 {
                uf.union(i, j);
            }
        }
    }

    // collect groups in a deterministic order
    let mut members: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = uf.find(i);
        members.entry(root).or_default().push(i);
    }

    let mut kept = vec![false; n];
    let mut report = DedupReport::default();
    let mut groups: Vec<Vec<usize>> = members.into_values().collect();
    // stable group numbering: order groups by their smallest record id
    groups.sort_by(|a, b| min_id(corpus, a).cmp(min_id(corpus, b)));

    for (group_id, group) in groups.iter().enumerate() {
        let representative = pick_representative(corpus, group);
        kept[representative] = true;
        for &i in group {
            if i == representative {
                continue;
            }
            let (key, multi) = profile_similarity(&profiles[representative], &profiles[i]);
            report.removals.push(DedupRemoval {
                group_id,
                kept_id: corpus[representative].id.clone(),
                removed_id: corpus[i].id.clone(),
                key_jaccard: key,
                multiset_jaccard: multi,
            });
        }
    }
    report.groups = groups.len();

    let kept_records = corpus
        .iter()
        .enumerate()
        .filter(|(i, _)| kept[*i])
        .map(|(_, r)| r.clone())
        .collect();
    (kept_records, report)
}

fn jaccard_upper_bound(len_a: usize, len_b: usize) -> f64 {
    if len_a == 0 && len_b == 0 {
        return 1.0;
    }
    if len_a == 0 || len_b == 0 {
        return 0.0;
    }
    len_a.min(len_b) as f64 / len_a.max(len_b) as f64
}

fn min_id<'a>(corpus: &'a [MethodRecord], group: &[usize]) -> &'a str {
    group
        .iter()
        .map(|&i| corpus[i].id.as_str())
        .min()
        .expect("groups are non-empty")
}

fn pick_representative(corpus: &[MethodRecord], group: &[usize]) -> usize {
    let train: Vec<usize> = group
        .iter()
        .copied()
        .filter(|&i| corpus[i].split == Split::Train)
        .collect();
    let pool = if train.is_empty() { group } else { &train };
    pool.iter()
        .copied()
        .min_by(|&a, &b| corpus[a].id.cmp(&corpus[b].id))
        .expect("groups are non-empty")
}
