use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ptrans::{BipartiteDims, Inertia};

/// Known inertias of `M^Gamma` over NPT states on `C^m (x) C^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub dims: BipartiteDims,
    pub known_members: BTreeSet<Inertia>,
    pub known_excluded: BTreeSet<Inertia>,
    pub complete: bool,
    /// The `(n-1)(2n-1)` family for `m = 3` (either factor), empty otherwise.
    pub family: Vec<Inertia>,
}

impl CatalogEntry {
    pub fn is_member(&self, i: &Inertia) -> bool {
        self.known_members.contains(i)
    }

    pub fn is_excluded(&self, i: &Inertia) -> bool {
        self.known_excluded.contains(i)
    }
}

/// Family `(k, 3n-2-2k-j, j+k+2)` for `1 <= k <= n-1`, `0 <= j <= 3n-2-2k`,
/// in that iteration order.
pub fn family_arrays(n: usize) -> Vec<Inertia> {
    let mut out = Vec::new();
    for k in 1..n {
        let Some(top) = (3 * n).checked_sub(2 + 2 * k) else { continue };
        for j in 0..=top {
            out.push(Inertia::new(k, top - j, j + k + 2));
        }
    }
    out
}

fn set(items: &[(usize, usize, usize)]) -> BTreeSet<Inertia> {
    items.iter().map(|&(a, b, c)| Inertia::new(a, b, c)).collect()
}

pub const N23: [(usize, usize, usize); 4] = [(1, 2, 3), (1, 1, 4), (1, 0, 5), (2, 0, 4)];

pub const N33: [(usize, usize, usize); 13] = [
    (1, 0, 8),
    (1, 1, 7),
    (1, 2, 6),
    (1, 3, 5),
    (1, 4, 4),
    (1, 5, 3),
    (2, 0, 7),
    (2, 1, 6),
    (2, 2, 5),
    (2, 3, 4),
    (3, 0, 6),
    (3, 1, 5),
    (4, 0, 5),
];

pub const N33_EXCLUDED: [(usize, usize, usize); 2] = [(4, 1, 4), (3, 2, 4)];

pub const N34_EXCLUDED: [(usize, usize, usize); 9] = [
    (7, 0, 5),
    (7, 1, 4),
    (7, 2, 3),
    (8, 0, 4),
    (8, 1, 3),
    (9, 0, 3),
    (6, 2, 4),
    (6, 3, 3),
    (5, 4, 3),
];

/// Curated catalog. The set is symmetric in the two factors, so `3x2` and
/// `4x3` share the data of `2x3` and `3x4`.
pub fn known_catalog(dims: BipartiteDims) -> CatalogEntry {
    let (small, large) = (dims.m.min(dims.n), dims.m.max(dims.n));
    let family = if small == 3 || large == 3 {
        family_arrays(if small == 3 { large } else { small })
    } else {
        Vec::new()
    };
    let (known_members, known_excluded, complete) = match (small, large) {
        (2, 3) => (set(&N23), BTreeSet::new(), true),
        (3, 3) => (set(&N33), set(&N33_EXCLUDED), true),
        (3, 4) => (family.iter().copied().collect(), set(&N34_EXCLUDED), false),
        _ => (family.iter().copied().collect(), BTreeSet::new(), false),
    };
    CatalogEntry { dims, known_members, known_excluded, complete, family }
}
