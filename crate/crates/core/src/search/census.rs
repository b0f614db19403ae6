use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::CatalogEntry;
use super::sample::{sample_state_with, task_rng};
use super::thread_pool;
use crate::error::{Error, Result};
use crate::linalg::eigvalsh;
use crate::ptrans::{partial_transpose, BipartiteDims, Inertia};

/// Ranks assigned to census samples, cycling by sample index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankSchedule {
    pub ranks: Vec<usize>,
}

impl RankSchedule {
    pub fn full(dims: BipartiteDims) -> Self {
        Self { ranks: vec![dims.order()] }
    }

    /// `d, d-1, d-2` (clamped at 1).
    pub fn mixed(dims: BipartiteDims) -> Self {
        let d = dims.order();
        Self { ranks: (0..3).map(|k| d.saturating_sub(k).max(1)).collect() }
    }

    pub fn rank_for(&self, sample: usize) -> usize {
        self.ranks[sample % self.ranks.len()]
    }

    pub fn validate(&self, dims: BipartiteDims) -> Result<()> {
        let d = dims.order();
        if self.ranks.is_empty() {
            return Err(Error::InvalidConfig("empty rank schedule".into()));
        }
        match self.ranks.iter().find(|&&r| r == 0 || r > d) {
            Some(&rank) => Err(Error::BadRank { rank, order: d }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CensusRow {
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
    pub count: usize,
}

impl CensusRow {
    pub fn inertia(&self) -> Inertia {
        Inertia::new(self.neg, self.zero, self.pos)
    }
}

/// Histogram of `In(M^Gamma)` over sampled states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub dims: BipartiteDims,
    pub samples: usize,
    pub seed: u64,
    pub zero_tol: f64,
    pub schedule: RankSchedule,
    /// Sorted by inertia.
    pub rows: Vec<CensusRow>,
}

impl Census {
    pub fn count(&self, inertia: &Inertia) -> usize {
        self.rows.iter().find(|r| r.inertia() == *inertia).map_or(0, |r| r.count)
    }

    pub fn classify(&self, catalog: &CatalogEntry) -> CensusClassification {
        let mut c = CensusClassification::default();
        for row in &self.rows {
            let i = row.inertia();
            if i.neg == 0 {
                c.ppt += row.count;
                continue;
            }
            c.npt += row.count;
            if i.pos < 3 {
                c.ew_violations += row.count;
            }
            if catalog.is_excluded(&i) {
                c.excluded_hits.push(*row);
            } else if !catalog.is_member(&i) {
                if catalog.complete {
                    c.outside_complete.push(*row);
                } else {
                    c.new_outside_catalog.push(*row);
                }
            }
        }
        c
    }
}

/// Census rows judged against a catalog. PPT samples are counted but never
/// flagged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CensusClassification {
    pub ppt: usize,
    pub npt: usize,
    /// Observed arrays the catalog excludes.
    pub excluded_hits: Vec<CensusRow>,
    /// Observed arrays missing from a complete catalog.
    pub outside_complete: Vec<CensusRow>,
    /// Observed arrays missing from an incomplete catalog; informational.
    pub new_outside_catalog: Vec<CensusRow>,
    /// NPT samples whose partial transpose has fewer than three positive eigenvalues.
    pub ew_violations: usize,
}

impl CensusClassification {
    pub fn flagged(&self) -> bool {
        !self.excluded_hits.is_empty() || !self.outside_complete.is_empty() || self.ew_violations > 0
    }
}

/// One census per tolerance over the same samples.
///
/// Sample `i` has rank `schedule.rank_for(i)` and its own generator stream,
/// so the histograms do not depend on the number of threads.
pub fn inertia_census_multi(
    dims: BipartiteDims,
    samples: usize,
    schedule: &RankSchedule,
    seed: u64,
    zero_tols: &[f64],
) -> Result<Vec<Census>> {
    if samples == 0 {
        return Err(Error::InvalidConfig("census needs at least one sample".into()));
    }
    schedule.validate(dims)?;
    let spectra: Vec<Result<(Vec<f64>, f64)>> = thread_pool().install(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| {
                let state = sample_state_with(&mut task_rng(seed, i as u64), dims, schedule.rank_for(i))?;
                let pt = partial_transpose(&state, dims)?;
                let scale = pt.frobenius_norm().max(1.0);
                Ok((eigvalsh(&pt)?, scale))
            })
            .collect()
    });
    let mut maps = vec![BTreeMap::<Inertia, usize>::new(); zero_tols.len()];
    for s in spectra {
        let (mu, scale) = s?;
        for (map, &tol) in maps.iter_mut().zip(zero_tols) {
            *map.entry(Inertia::from_eigenvalues(&mu, tol * scale)).or_default() += 1;
        }
    }
    Ok(maps
        .into_iter()
        .zip(zero_tols)
        .map(|(map, &zero_tol)| Census {
            dims,
            samples,
            seed,
            zero_tol,
            schedule: schedule.clone(),
            rows: map
                .into_iter()
                .map(|(i, count)| CensusRow { neg: i.neg, zero: i.zero, pos: i.pos, count })
                .collect(),
        })
        .collect())
}

pub fn inertia_census(
    dims: BipartiteDims,
    samples: usize,
    schedule: &RankSchedule,
    seed: u64,
    zero_tol: f64,
) -> Result<Census> {
    Ok(inertia_census_multi(dims, samples, schedule, seed, &[zero_tol])?.remove(0))
}
